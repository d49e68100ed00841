//! Exact rational arithmetic and dense linear algebra over `BigRational`.
//!
//! Every structural quantity in the crate (ranks, kernels, subspace
//! equalities, positivity of kernel points) is computed here without
//! tolerances. Floating point only enters in [`crate::equilib`].

mod matrix;
mod simplex;
mod subspace;

pub use matrix::{g_inverse, kernel_basis, rref, KernelBasis, RatMatrix, Rref};
pub use simplex::{
    positive_kernel_feasibility, strictly_positive_kernel_point, FarkasCertificate, Feasibility,
};
pub use subspace::Subspace;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational; always kept in lowest terms with a
/// positive denominator.
pub type Rat = BigRational;

/// Integer as a rational.
pub fn ri(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// `n / d` as a rational. Panics if `d == 0`.
pub fn rq(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Converts a slice of integers into a rational vector.
pub fn rvec(v: &[i64]) -> Vec<Rat> {
    v.iter().map(|&x| ri(x)).collect()
}

pub fn to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn vec_to_f64(v: &[Rat]) -> Vec<f64> {
    v.iter().map(to_f64).collect()
}

/// Formats as `p` for integers and `p/q` otherwise.
pub fn fmt_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p`, `p/q`, or a decimal such as `-1.25e-3`, exactly.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let t = s.trim();
    let bad = || Error::InvalidRational(s.to_string());
    if t.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rat::new(p, q));
    }
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(pos) => {
            let e: i32 = t[pos + 1..].parse().map_err(|_| bad())?;
            (&t[..pos], e)
        }
        None => (t, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let joined = format!("{int_part}{frac_part}");
    let numer: BigInt = if joined.is_empty() { BigInt::zero() } else { joined.parse().map_err(|_| bad())? };
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = if scale >= 0 {
        Rat::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        Rat::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    if negative {
        value = -value;
    }
    Ok(value)
}

/// Exact dot product.
pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).fold(Rat::zero(), |acc, (x, y)| acc + x * y)
}

pub fn is_zero_vec(v: &[Rat]) -> bool {
    v.iter().all(Zero::is_zero)
}

pub fn all_positive(v: &[Rat]) -> bool {
    v.iter().all(Signed::is_positive)
}

/// Scales `v` so its coordinates sum to one. Returns `None` for a zero sum.
pub fn normalize_sum(v: &[Rat]) -> Option<Vec<Rat>> {
    let s: Rat = v.iter().sum();
    if s.is_zero() {
        return None;
    }
    Some(v.iter().map(|x| x / &s).collect())
}

/// Rescales `v` by a positive factor to coprime integers. The zero vector
/// is returned unchanged.
pub fn primitive_integer(v: &[Rat]) -> Vec<Rat> {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Rat::from_integer(lcm.clone())).to_integer()).collect();
    let gcd = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if gcd.is_zero() {
        return v.to_vec();
    }
    ints.into_iter().map(|x| Rat::from_integer(x / &gcd)).collect()
}
