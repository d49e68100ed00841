use std::fmt;
use std::ops::Index;

use num_traits::{One, Zero};

use super::{fmt_rat, to_f64, Rat};

/// Dense row-major rational matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Rat::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rat::one());
        }
        m
    }

    /// Builds from row-major data. Panics if `data.len() != rows * cols`.
    pub fn from_data(rows: usize, cols: usize, data: Vec<Rat>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length");
        Self { rows, cols, data }
    }

    /// Builds from rows; `cols` disambiguates the zero-row case.
    pub fn from_rows(cols: usize, rows: &[Vec<Rat>]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend(r.iter().cloned());
        }
        Self { rows: rows.len(), cols, data }
    }

    /// Builds from columns; `rows` disambiguates the zero-column case.
    pub fn from_columns(rows: usize, columns: &[Vec<Rat>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "ragged columns");
            for (i, x) in c.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows: Vec<Vec<Rat>> = rows.iter().map(|r| super::rvec(r)).collect();
        Self::from_rows(cols, &rows)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Rat) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rat> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Rat>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn row_vecs(&self) -> Vec<Vec<Rat>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, other.rows, "matrix product dimensions");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let idx = i * out.cols + j;
                        out.data[idx] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(self.cols, v.len(), "matrix-vector dimensions");
        (0..self.rows).map(|i| super::dot(self.row(i), v)).collect()
    }

    /// Horizontal concatenation; all blocks must share the row count.
    pub fn hstack(rows: usize, blocks: &[&RatMatrix]) -> RatMatrix {
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let mut offset = 0;
        for b in blocks {
            assert_eq!(b.rows, rows, "hstack row mismatch");
            for i in 0..rows {
                for j in 0..b.cols {
                    out.set(i, offset + j, b.get(i, j).clone());
                }
            }
            offset += b.cols;
        }
        out
    }

    /// Vertical concatenation; all blocks must share the column count.
    pub fn vstack(cols: usize, blocks: &[&RatMatrix]) -> RatMatrix {
        let mut data = Vec::new();
        let mut rows = 0;
        for b in blocks {
            assert_eq!(b.cols, cols, "vstack column mismatch");
            data.extend(b.data.iter().cloned());
            rows += b.rows;
        }
        Self { rows, cols, data }
    }

    pub fn block_diagonal(blocks: &[&RatMatrix]) -> RatMatrix {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out.set(r0 + i, c0 + j, b.get(i, j).clone());
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    pub fn select_columns(&self, idx: &[usize]) -> RatMatrix {
        let mut out = Self::zeros(self.rows, idx.len());
        for (jj, &j) in idx.iter().enumerate() {
            for i in 0..self.rows {
                out.set(i, jj, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn select_rows(&self, idx: &[usize]) -> RatMatrix {
        let rows: Vec<Vec<Rat>> = idx.iter().map(|&i| self.row(i).to_vec()).collect();
        Self::from_rows(self.cols, &rows)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn rank(&self) -> usize {
        rref(self).pivots.len()
    }

    /// Largest absolute entry, as a float.
    pub fn max_abs_f64(&self) -> f64 {
        self.data.iter().map(|x| to_f64(x).abs()).fold(0.0, f64::max)
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).iter().map(to_f64).collect()).collect()
    }

    pub fn scale(&self, s: &Rat) -> RatMatrix {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * s).collect() }
    }

    pub fn sub(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    /// Inverse of a square matrix, `None` when singular.
    pub fn inverse(&self) -> Option<RatMatrix> {
        assert_eq!(self.rows, self.cols, "inverse of non-square matrix");
        let n = self.rows;
        let aug = RatMatrix::hstack(n, &[self, &RatMatrix::identity(n)]);
        let r = rref(&aug);
        if r.pivots.iter().take_while(|&&p| p < n).count() < n {
            return None;
        }
        let right: Vec<usize> = (n..2 * n).collect();
        Some(r.matrix.select_columns(&right).select_rows(&(0..n).collect::<Vec<_>>()))
    }
}

impl Index<(usize, usize)> for RatMatrix {
    type Output = Rat;

    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        self.get(i, j)
    }
}

impl fmt::Display for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(fmt_rat).collect();
            write!(f, "[{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Reduced row echelon form with its pivot columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub matrix: RatMatrix,
    pub pivots: Vec<usize>,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

pub fn rref(m: &RatMatrix) -> Rref {
    let mut a = m.clone();
    let (rows, cols) = (a.rows, a.cols);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a.get(i, c).is_zero()) else {
            continue;
        };
        if p != r {
            for j in 0..cols {
                a.data.swap(p * cols + j, r * cols + j);
            }
        }
        let inv = a.get(r, c).recip();
        for j in c..cols {
            let v = a.get(r, j) * &inv;
            a.set(r, j, v);
        }
        for i in 0..rows {
            if i == r || a.get(i, c).is_zero() {
                continue;
            }
            let factor = a.get(i, c).clone();
            for j in c..cols {
                let v = a.get(i, j) - &factor * a.get(r, j);
                a.set(i, j, v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    Rref { matrix: a, pivots }
}

/// Null-space basis in free-variable canonical form: the vector attached
/// to free column `f` has coordinate 1 at `f` and 0 at every other free
/// column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelBasis {
    pub ambient_dim: usize,
    pub vectors: Vec<Vec<Rat>>,
    pub free_columns: Vec<usize>,
}

impl KernelBasis {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Basis vectors as the columns of an `ambient_dim × dim` matrix.
    pub fn as_matrix(&self) -> RatMatrix {
        RatMatrix::from_columns(self.ambient_dim, &self.vectors)
    }
}

pub fn kernel_basis(m: &RatMatrix) -> KernelBasis {
    let r = rref(m);
    let cols = m.cols();
    let mut is_pivot = vec![false; cols];
    for &p in &r.pivots {
        is_pivot[p] = true;
    }
    let free_columns: Vec<usize> = (0..cols).filter(|&c| !is_pivot[c]).collect();
    let vectors = free_columns
        .iter()
        .map(|&f| {
            let mut v = vec![Rat::zero(); cols];
            v[f] = Rat::one();
            for (row, &p) in r.pivots.iter().enumerate() {
                v[p] = -r.matrix.get(row, f).clone();
            }
            v
        })
        .collect();
    KernelBasis { ambient_dim: cols, vectors, free_columns }
}

/// Generalized inverse `M*` with `M M* M = M`, from the rank factorization
/// `M = F G`: `M* = Gᵀ (G Gᵀ)⁻¹ (Fᵀ F)⁻¹ Fᵀ`.
pub fn g_inverse(m: &RatMatrix) -> RatMatrix {
    let r = rref(m);
    let rank = r.rank();
    if rank == 0 {
        return RatMatrix::zeros(m.cols(), m.rows());
    }
    let f = m.select_columns(&r.pivots);
    let g = r.matrix.select_rows(&(0..rank).collect::<Vec<_>>());
    let gt = g.transpose();
    let ft = f.transpose();
    let ggt_inv = g.mul(&gt).inverse().expect("G has full row rank");
    let ftf_inv = ft.mul(&f).inverse().expect("F has full column rank");
    gt.mul(&ggt_inv).mul(&ftf_inv).mul(&ft)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratlin::{rq, rvec};

    #[test]
    fn rref_of_rank_one_matrix() {
        let r = rref(&RatMatrix::from_i64(&[&[1, 1], &[1, 1]]));
        assert_eq!(r.matrix, RatMatrix::from_i64(&[&[1, 1], &[0, 0]]));
        assert_eq!(r.pivots, vec![0]);
    }

    #[test]
    fn rref_of_identity_is_identity() {
        let r = rref(&RatMatrix::identity(3));
        assert_eq!(r.matrix, RatMatrix::identity(3));
        assert_eq!(r.pivots, vec![0, 1, 2]);
    }

    #[test]
    fn rref_of_cayley_matrix_has_rank_three() {
        // Source complexes [[0,2,3,1],[0,1,0,1]] stacked on the all-ones row.
        // Hand elimination: swap the ones row up, eliminate, and the three
        // rows stay independent (the 3x3 minor on columns 0,1,2 is -3).
        let m = RatMatrix::from_i64(&[&[0, 2, 3, 1], &[0, 1, 0, 1], &[1, 1, 1, 1]]);
        let r = rref(&m);
        assert_eq!(r.rank(), 3);
        assert_eq!(r.pivots, vec![0, 1, 2]);
    }

    #[test]
    fn kernel_of_single_row() {
        let k = kernel_basis(&RatMatrix::from_i64(&[&[1, 1]]));
        assert_eq!(k.vectors, vec![rvec(&[-1, 1])]);
    }

    #[test]
    fn kernel_of_two_component_gamma_contains_known_generators() {
        let gamma = RatMatrix::from_i64(&[&[1, 1, -1, 1], &[1, -1, 0, 0]]);
        let k = kernel_basis(&gamma);
        assert_eq!(k.dim(), 2);
        for v in &k.vectors {
            assert!(crate::ratlin::is_zero_vec(&gamma.mul_vec(v)));
        }
        let span = crate::ratlin::Subspace::span(4, &k.vectors);
        assert!(span.contains(&rvec(&[1, 1, 2, 0])));
        assert!(span.contains(&rvec(&[0, 0, 1, 1])));
        assert!(gamma.mul_vec(&rvec(&[1, 1, 2, 0])).iter().all(|x| x.is_zero()));
    }

    #[test]
    fn kernel_of_identity_is_empty() {
        assert!(kernel_basis(&RatMatrix::identity(4)).is_empty());
    }

    #[test]
    fn g_inverse_of_identity_and_diagonal() {
        assert_eq!(g_inverse(&RatMatrix::identity(3)), RatMatrix::identity(3));
        let m = RatMatrix::from_i64(&[&[2, 0], &[0, 0]]);
        let g = g_inverse(&m);
        let mut expected = RatMatrix::zeros(2, 2);
        expected.set(0, 0, rq(1, 2));
        assert_eq!(g, expected);
        assert_eq!(m.mul(&g).mul(&m), m);
    }

    #[test]
    fn g_inverse_of_zero_matrix() {
        let m = RatMatrix::zeros(2, 3);
        let g = g_inverse(&m);
        assert_eq!((g.rows(), g.cols()), (3, 2));
        assert_eq!(m.mul(&g).mul(&m), m);
    }

    #[test]
    fn inverse_roundtrip() {
        let m = RatMatrix::from_i64(&[&[2, 1], &[1, 1]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), RatMatrix::identity(2));
        assert!(RatMatrix::from_i64(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }
}
