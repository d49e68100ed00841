//! Phase-one simplex deciding whether `ker m` meets the open positive
//! orthant.
//!
//! The cone is scale invariant, so `m v = 0, v > 0` is feasible iff
//! `m v = 0, v >= 1` is. Substituting `v = 1 + w` gives the standard form
//! `m w = -m 1, w >= 0`, solved with artificials and Bland's rule.

use num_traits::{One, Signed, Zero};

use super::{dot, Rat, RatMatrix};

/// Dual witness of infeasibility: `mᵀ u >= 0` with `mᵀ u != 0`, so no
/// strictly positive `v` can satisfy `m v = 0` (Stiemke alternative).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FarkasCertificate {
    pub u: Vec<Rat>,
}

impl FarkasCertificate {
    pub fn verify(&self, m: &RatMatrix) -> bool {
        if self.u.len() != m.rows() {
            return false;
        }
        let combo = m.transpose().mul_vec(&self.u);
        combo.iter().all(|x| !x.is_negative()) && combo.iter().any(|x| !x.is_zero())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Feasibility {
    Point(Vec<Rat>),
    Infeasible(FarkasCertificate),
}

pub fn strictly_positive_kernel_point(m: &RatMatrix) -> Option<Vec<Rat>> {
    match positive_kernel_feasibility(m) {
        Feasibility::Point(v) => Some(v),
        Feasibility::Infeasible(_) => None,
    }
}

pub fn positive_kernel_feasibility(m: &RatMatrix) -> Feasibility {
    let (p, c) = (m.rows(), m.cols());
    let ones = vec![Rat::one(); c];
    let rhs0: Vec<Rat> = m.mul_vec(&ones).into_iter().map(|x| -x).collect();
    let signs: Vec<Rat> = rhs0.iter().map(|x| if x.is_negative() { -Rat::one() } else { Rat::one() }).collect();

    let width = c + p;
    let mut tab = RatMatrix::zeros(p, width);
    let mut rhs = Vec::with_capacity(p);
    for i in 0..p {
        for j in 0..c {
            tab.set(i, j, &signs[i] * m.get(i, j));
        }
        tab.set(i, c + i, Rat::one());
        rhs.push(&signs[i] * &rhs0[i]);
    }
    let mut basis: Vec<usize> = (c..width).collect();
    let mut reduced: Vec<Rat> = (0..width)
        .map(|j| if j < c { -(0..p).fold(Rat::zero(), |acc, i| acc + tab.get(i, j)) } else { Rat::zero() })
        .collect();

    // Bland's rule: lowest-index entering column, lowest-index leaving
    // basic variable among ratio ties.
    while let Some(enter) = (0..width).find(|&j| reduced[j].is_negative()) {
        let mut leave: Option<(usize, Rat)> = None;
        for i in 0..p {
            let a = tab.get(i, enter);
            if !a.is_positive() {
                continue;
            }
            let ratio = &rhs[i] / a;
            leave = match leave {
                None => Some((i, ratio)),
                Some((bi, br)) => {
                    if ratio < br || (ratio == br && basis[i] < basis[bi]) {
                        Some((i, ratio))
                    } else {
                        Some((bi, br))
                    }
                }
            };
        }
        // Phase one is bounded below by zero.
        let (row, _) = leave.expect("phase-one objective is bounded");
        let piv = tab.get(row, enter).clone();
        for j in 0..width {
            let v = tab.get(row, j) / &piv;
            tab.set(row, j, v);
        }
        rhs[row] = &rhs[row] / &piv;
        for i in 0..p {
            if i == row {
                continue;
            }
            let f = tab.get(i, enter).clone();
            if f.is_zero() {
                continue;
            }
            for j in 0..width {
                let v = tab.get(i, j) - &f * tab.get(row, j);
                tab.set(i, j, v);
            }
            rhs[i] = &rhs[i] - &f * &rhs[row];
        }
        let f = reduced[enter].clone();
        for (j, r) in reduced.iter_mut().enumerate() {
            *r -= &f * tab.get(row, j);
        }
        basis[row] = enter;
    }

    let objective = (0..p).filter(|&i| basis[i] >= c).fold(Rat::zero(), |acc, i| acc + &rhs[i]);
    if objective.is_zero() {
        let mut v = ones;
        for (i, &b) in basis.iter().enumerate() {
            if b < c {
                v[b] += &rhs[i];
            }
        }
        debug_assert!(m.mul_vec(&v).iter().all(Zero::is_zero));
        Feasibility::Point(v)
    } else {
        // Artificial column c+i has cost 1, so its reduced cost is 1 - y_i.
        let u: Vec<Rat> = (0..p).map(|i| -(&signs[i] * (Rat::one() - &reduced[c + i]))).collect();
        let cert = FarkasCertificate { u };
        debug_assert!(cert.verify(m));
        debug_assert!(dot(&m.mul_vec(&vec![Rat::one(); c]), &cert.u) >= Rat::zero());
        Feasibility::Infeasible(cert)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratlin::all_positive;

    fn check(m: &RatMatrix) -> Option<Vec<Rat>> {
        match positive_kernel_feasibility(m) {
            Feasibility::Point(v) => {
                assert!(all_positive(&v));
                assert!(m.mul_vec(&v).iter().all(Zero::is_zero));
                Some(v)
            }
            Feasibility::Infeasible(cert) => {
                assert!(cert.verify(m), "certificate must re-check");
                None
            }
        }
    }

    #[test]
    fn example_one_gamma_has_positive_point() {
        let gamma = RatMatrix::from_i64(&[&[1, 1, -1, 1], &[1, -1, 0, 0]]);
        assert!(check(&gamma).is_some());
    }

    #[test]
    fn example_two_gamma_fails_when_k15_large() {
        // k12=1, k15=4, other rate constants 1.
        let gamma = RatMatrix::from_i64(&[&[-4, -1, 3, -3], &[1, -1, -1, 1]]);
        assert!(check(&gamma).is_none());
    }

    #[test]
    fn single_row_of_ones_is_infeasible() {
        assert!(check(&RatMatrix::from_i64(&[&[1, 1]])).is_none());
    }

    #[test]
    fn degenerate_shapes() {
        assert_eq!(check(&RatMatrix::zeros(0, 3)), Some(vec![Rat::one(); 3]));
        assert_eq!(check(&RatMatrix::zeros(2, 0)), Some(vec![]));
        assert!(check(&RatMatrix::identity(2)).is_none());
    }
}
