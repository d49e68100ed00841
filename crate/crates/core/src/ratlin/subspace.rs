use super::{kernel_basis, rref, Rat, RatMatrix};

/// A linear subspace of `Q^ambient`, stored as the nonzero rows of the
/// RREF of a spanning set. The representation is canonical, so derived
/// equality is subspace equality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    basis: RatMatrix,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Self { ambient, basis: RatMatrix::zeros(0, ambient) }
    }

    pub fn full(ambient: usize) -> Self {
        Self { ambient, basis: RatMatrix::identity(ambient) }
    }

    pub fn span(ambient: usize, vectors: &[Vec<Rat>]) -> Self {
        let m = RatMatrix::from_rows(ambient, vectors);
        Self::row_space(&m)
    }

    pub fn row_space(m: &RatMatrix) -> Self {
        let r = rref(m);
        let keep: Vec<usize> = (0..r.rank()).collect();
        Self { ambient: m.cols(), basis: r.matrix.select_rows(&keep) }
    }

    /// Image (column space) of `m`.
    pub fn column_space(m: &RatMatrix) -> Self {
        Self::row_space(&m.transpose())
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> Vec<Vec<Rat>> {
        self.basis.row_vecs()
    }

    /// Basis vectors as matrix columns (`ambient × dim`).
    pub fn basis_matrix(&self) -> RatMatrix {
        self.basis.transpose()
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        let extended = RatMatrix::vstack(self.ambient, &[&self.basis, &RatMatrix::from_rows(self.ambient, &[v.to_vec()])]);
        extended.rank() == self.dim()
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient, other.ambient);
        Self::row_space(&RatMatrix::vstack(self.ambient, &[&self.basis, &other.basis]))
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        other.sum(self).dim() == other.dim()
    }

    pub fn orthogonal_complement(&self) -> Subspace {
        let k = kernel_basis(&self.basis);
        Self::span(self.ambient, &k.vectors)
    }

    /// True when the given subspaces are independent, i.e. their sum is
    /// direct.
    pub fn is_direct_sum(parts: &[Subspace]) -> bool {
        let Some(first) = parts.first() else { return true };
        let total = parts.iter().skip(1).fold(first.clone(), |acc, p| acc.sum(p));
        total.dim() == parts.iter().map(Subspace::dim).sum::<usize>()
    }

    pub fn sum_all(ambient: usize, parts: &[Subspace]) -> Subspace {
        parts.iter().fold(Subspace::zero(ambient), |acc, p| acc.sum(p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratlin::rvec;

    #[test]
    fn canonical_equality() {
        let a = Subspace::span(3, &[rvec(&[1, 1, 0]), rvec(&[0, 1, 1])]);
        let b = Subspace::span(3, &[rvec(&[1, 2, 1]), rvec(&[1, 0, -1]), rvec(&[2, 2, 0])]);
        assert_eq!(a, b);
        assert_eq!(a.dim(), 2);
        assert!(a.contains(&rvec(&[1, 0, -1])));
        assert!(!a.contains(&rvec(&[1, 0, 0])));
    }

    #[test]
    fn complement_is_orthogonal() {
        let a = Subspace::span(3, &[rvec(&[1, -1, 0])]);
        let c = a.orthogonal_complement();
        assert_eq!(c.dim(), 2);
        for v in c.basis() {
            assert!(num_traits::Zero::is_zero(&crate::ratlin::dot(&v, &rvec(&[1, -1, 0]))));
        }
        assert_eq!(Subspace::full(2).orthogonal_complement(), Subspace::zero(2));
    }

    #[test]
    fn direct_sum_detection() {
        let a = Subspace::span(3, &[rvec(&[1, 0, 0])]);
        let b = Subspace::span(3, &[rvec(&[0, 1, 0])]);
        let c = Subspace::span(3, &[rvec(&[1, 1, 0])]);
        assert!(Subspace::is_direct_sum(&[a.clone(), b.clone()]));
        assert!(!Subspace::is_direct_sum(&[a, b, c]));
    }
}
