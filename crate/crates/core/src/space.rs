//! Concrete normed spaces and their finitely representable vectors.
//!
//! Sequence spaces (`l_p`, `c_0`) store finitely supported sequences
//! `x_1, x_2, ..., x_K` (index 1 first, trailing zeros implied). `Poly(a, b)`
//! stores monomial coefficients `c_0, c_1, ..., c_d` of a polynomial viewed
//! as an element of `C[a, b]` with the maximum norm.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Field element. Real-space computations keep `im == 0`.
pub type Scalar = Complex64;

/// Largest magnitude allowed anywhere in a stored vector or norm.
pub const MAGNITUDE_LIMIT: f64 = 1e300;

/// Number of Chebyshev extrema used to evaluate polynomial sup-norms.
pub const NORM_GRID_POINTS: usize = 513;

/// Maximum polynomial degree carried by a `Poly` vector.
pub const MAX_POLY_DEGREE: usize = 400;

/// Maximum support length of a sequence vector.
pub const MAX_SUPPORT: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", try_from = "RawSpace")]
pub enum Space {
    Lp { p: f64 },
    C0,
    Poly { a: f64, b: f64 },
}

// Deserialization goes through this mirror so the invariants are checked.
#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum RawSpace {
    Lp { p: f64 },
    C0,
    Poly { a: f64, b: f64 },
}

impl TryFrom<RawSpace> for Space {
    type Error = Error;

    fn try_from(raw: RawSpace) -> Result<Self> {
        match raw {
            RawSpace::Lp { p } => Space::lp(p),
            RawSpace::C0 => Ok(Space::C0),
            RawSpace::Poly { a, b } => Space::poly(a, b),
        }
    }
}

impl Space {
    pub fn lp(p: f64) -> Result<Self> {
        if p.is_finite() && p >= 1.0 {
            Ok(Space::Lp { p })
        } else {
            Err(Error::Param(format!("l_p needs finite p >= 1, got {p}")))
        }
    }

    pub fn poly(a: f64, b: f64) -> Result<Self> {
        if a.is_finite() && b.is_finite() && a < b {
            Ok(Space::Poly { a, b })
        } else {
            Err(Error::Param(format!("C[a,b] needs a < b, got [{a}, {b}]")))
        }
    }

    pub fn is_sequence(&self) -> bool {
        !matches!(self, Space::Poly { .. })
    }

    pub fn is_l2(&self) -> bool {
        matches!(self, Space::Lp { p } if *p == 2.0)
    }

    fn max_len(&self) -> usize {
        match self {
            Space::Poly { .. } => MAX_POLY_DEGREE + 1,
            _ => MAX_SUPPORT,
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Space::Lp { p } => write!(f, "l{p}"),
            Space::C0 => write!(f, "c0"),
            Space::Poly { a, b } => write!(f, "C[{a},{b}]"),
        }
    }
}

/// A finitely representable element of a [`Space`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawVector")]
pub struct Vector {
    space: Space,
    coeffs: Vec<Scalar>,
}

#[derive(Deserialize)]
struct RawVector {
    space: Space,
    coeffs: Vec<Scalar>,
}

impl TryFrom<RawVector> for Vector {
    type Error = Error;

    fn try_from(raw: RawVector) -> Result<Self> {
        Vector::new(raw.space, raw.coeffs)
    }
}

fn check_magnitude(coeffs: &[Scalar], context: &str) -> Result<()> {
    for c in coeffs {
        let m = c.norm();
        if !m.is_finite() || m > MAGNITUDE_LIMIT {
            return Err(Error::overflow(context));
        }
    }
    Ok(())
}

impl Vector {
    /// Builds a vector, trimming trailing exact zeros.
    pub fn new(space: Space, mut coeffs: Vec<Scalar>) -> Result<Self> {
        check_magnitude(&coeffs, "vector construction")?;
        while coeffs.last().is_some_and(|c| *c == Scalar::new(0.0, 0.0)) {
            coeffs.pop();
        }
        if coeffs.len() > space.max_len() {
            return Err(Error::DegreeOverflow {
                len: coeffs.len(),
                cap: space.max_len(),
            });
        }
        Ok(Vector { space, coeffs })
    }

    pub fn from_real(space: Space, coeffs: &[f64]) -> Result<Self> {
        Vector::new(space, coeffs.iter().map(|&x| Scalar::new(x, 0.0)).collect())
    }

    pub fn zero(space: Space) -> Self {
        Vector {
            space,
            coeffs: Vec::new(),
        }
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    /// Coefficient `i` (0-based), zero beyond the stored length.
    pub fn coeff(&self, i: usize) -> Scalar {
        self.coeffs.get(i).copied().unwrap_or_default()
    }

    /// Stored length after trimming: support length for sequences,
    /// degree + 1 for polynomials.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn norm(&self) -> Result<f64> {
        norm(self)
    }

    pub fn scale(&self, alpha: Scalar) -> Result<Vector> {
        Vector::new(self.space, self.coeffs.iter().map(|c| alpha * c).collect())
    }

    pub fn add(&self, other: &Vector) -> Result<Vector> {
        axpy(Scalar::new(1.0, 0.0), self, other)
    }

    pub fn sub(&self, other: &Vector) -> Result<Vector> {
        axpy(Scalar::new(-1.0, 0.0), other, self)
    }

    pub fn distance(&self, other: &Vector) -> Result<f64> {
        self.sub(other)?.norm()
    }

    pub(crate) fn same_space(&self, other: &Vector) -> Result<()> {
        if self.space == other.space {
            Ok(())
        } else {
            Err(Error::SpaceMismatch {
                left: self.space.to_string(),
                right: other.space.to_string(),
            })
        }
    }
}

/// Norm of `v` in its space: `l_p` norm, supremum norm on `c_0`, or the
/// maximum of `|v|` over the Chebyshev-extrema grid for `Poly`.
pub fn norm(v: &Vector) -> Result<f64> {
    let value = match v.space {
        Space::Lp { p } => lp_norm(&v.coeffs, p),
        Space::C0 => v.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max),
        Space::Poly { a, b } => poly_sup(&v.coeffs, a, b),
    };
    if !value.is_finite() || value > MAGNITUDE_LIMIT {
        return Err(Error::overflow(format!("norm in {}", v.space)));
    }
    Ok(value)
}

fn lp_norm(coeffs: &[Scalar], p: f64) -> f64 {
    let peak = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return 0.0;
    }
    if p == 1.0 {
        return coeffs.iter().map(|c| c.norm()).sum();
    }
    let sum: f64 = coeffs.iter().map(|c| (c.norm() / peak).powf(p)).sum();
    peak * sum.powf(1.0 / p)
}

/// The 513 Chebyshev extrema mapped to `[a, b]`, endpoints pinned exactly.
pub fn norm_grid(a: f64, b: f64) -> impl Iterator<Item = f64> {
    let last = NORM_GRID_POINTS - 1;
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    (0..NORM_GRID_POINTS).map(move |j| {
        if j == 0 {
            b
        } else if j == last {
            a
        } else {
            mid + half * (PI * j as f64 / last as f64).cos()
        }
    })
}

thread_local! {
    static GRID_CACHE: RefCell<Option<(f64, f64, Vec<f64>)>> = const { RefCell::new(None) };
}

/// Grid maximum of `|v|`, evaluating all grid points per coefficient so the
/// inner loop vectorizes. Same operations, in the same order, as [`horner`].
fn poly_sup(coeffs: &[Scalar], a: f64, b: f64) -> f64 {
    GRID_CACHE.with(|cache| {
        let mut cache = cache.borrow_mut();
        if !matches!(&*cache, Some((ca, cb, _)) if *ca == a && *cb == b) {
            *cache = Some((a, b, norm_grid(a, b).collect()));
        }
        let grid = &cache.as_ref().expect("filled above").2;
        let n = grid.len();
        let mut re = vec![0.0; n];
        let mut im = vec![0.0; n];
        for c in coeffs.iter().rev() {
            let (re, im, grid) = (&mut re[..n], &mut im[..n], &grid[..n]);
            for j in 0..n {
                re[j] = re[j] * grid[j] + c.re;
            }
            for j in 0..n {
                im[j] = im[j] * grid[j] + c.im;
            }
        }
        re.iter()
            .zip(&im)
            .map(|(r, i)| Scalar::new(*r, *i).norm())
            .fold(0.0, f64::max)
    })
}

fn horner(coeffs: &[Scalar], t: f64) -> Scalar {
    coeffs
        .iter()
        .rev()
        .fold(Scalar::new(0.0, 0.0), |acc, c| acc * t + c)
}

/// `alpha * x + y`, coefficientwise.
pub fn axpy(alpha: Scalar, x: &Vector, y: &Vector) -> Result<Vector> {
    x.same_space(y)?;
    let len = x.coeffs.len().max(y.coeffs.len());
    let coeffs = (0..len).map(|i| alpha * x.coeff(i) + y.coeff(i)).collect();
    Vector::new(x.space, coeffs)
}

/// `e_k` for sequence spaces, the monomial `x^(k-1)` for `Poly`.
pub fn canonical_basis(space: Space, k: usize) -> Result<Vector> {
    if k == 0 {
        return Err(Error::Param("basis index is 1-based".into()));
    }
    let mut coeffs = vec![Scalar::new(0.0, 0.0); k];
    coeffs[k - 1] = Scalar::new(1.0, 0.0);
    Vector::new(space, coeffs)
}

/// Horner evaluation of a `Poly` vector at `t`.
pub fn eval_poly(v: &Vector, t: f64) -> Result<Scalar> {
    match v.space {
        Space::Poly { a, b } => {
            if t < a || t > b || t.is_nan() {
                return Err(Error::Domain { t, a, b });
            }
            Ok(horner(&v.coeffs, t))
        }
        other => Err(Error::SpaceMismatch {
            left: other.to_string(),
            right: "C[a,b]".into(),
        }),
    }
}

/// Evaluation without the domain check, for internal recentering.
pub(crate) fn eval_poly_unchecked(coeffs: &[Scalar], t: f64) -> Scalar {
    horner(coeffs, t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Scalar {
        Scalar::new(re, 0.0)
    }

    #[test]
    fn norm_examples() {
        let l2 = Space::lp(2.0).unwrap();
        assert_eq!(canonical_basis(l2, 1).unwrap().norm().unwrap(), 1.0);

        let l1 = Space::lp(1.0).unwrap();
        let v = Vector::from_real(l1, &[1.0, 0.5, 0.25]).unwrap();
        assert_eq!(v.norm().unwrap(), 1.75);

        let p01 = Space::poly(0.0, 1.0).unwrap();
        let v = Vector::from_real(p01, &[-0.5, 1.0]).unwrap();
        // dense-grid oracle: max over 10001 equispaced points
        let oracle = (0..=10_000)
            .map(|i| (i as f64 / 10_000.0 - 0.5).abs())
            .fold(0.0, f64::max);
        assert!((v.norm().unwrap() - oracle).abs() < 1e-12);
        assert_eq!(v.norm().unwrap(), 0.5);
    }

    #[test]
    fn c0_is_sup() {
        let v = Vector::new(Space::C0, vec![c(1.0), Scalar::new(0.0, -3.0), c(2.0)]).unwrap();
        assert_eq!(v.norm().unwrap(), 3.0);
    }

    #[test]
    fn axpy_examples() {
        let l1 = Space::lp(1.0).unwrap();
        let v = Vector::from_real(l1, &[3.0, -1.0, 4.0]).unwrap();
        let w = Vector::from_real(l1, &[1.0, 2.0]).unwrap();
        assert_eq!(axpy(c(0.0), &v, &w).unwrap(), w);
        let e1 = canonical_basis(l1, 1).unwrap();
        let e2 = canonical_basis(l1, 2).unwrap();
        assert_eq!(axpy(c(1.0), &e1, &e2).unwrap().coeffs(), &[c(1.0), c(1.0)]);
        assert!(axpy(c(-1.0), &v, &v).unwrap().is_zero());
    }

    #[test]
    fn axpy_rejects_mismatch() {
        let a = canonical_basis(Space::C0, 1).unwrap();
        let b = canonical_basis(Space::lp(1.0).unwrap(), 1).unwrap();
        assert!(matches!(
            axpy(c(1.0), &a, &b),
            Err(Error::SpaceMismatch { .. })
        ));
    }

    #[test]
    fn basis_examples() {
        let l2 = Space::lp(2.0).unwrap();
        assert_eq!(canonical_basis(l2, 1).unwrap().coeffs(), &[c(1.0)]);
        let l1 = Space::lp(1.0).unwrap();
        assert_eq!(
            canonical_basis(l1, 3).unwrap().coeffs(),
            &[c(0.0), c(0.0), c(1.0)]
        );
        let p = Space::poly(0.0, 1.0).unwrap();
        assert_eq!(canonical_basis(p, 2).unwrap().coeffs(), &[c(0.0), c(1.0)]);
        assert!(canonical_basis(p, 0).is_err());
    }

    #[test]
    fn eval_examples() {
        let p01 = Space::poly(0.0, 1.0).unwrap();
        let one = Vector::from_real(p01, &[1.0]).unwrap();
        assert_eq!(eval_poly(&one, 0.3).unwrap(), c(1.0));
        let p02 = Space::poly(0.0, 2.0).unwrap();
        let sq = Vector::from_real(p02, &[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(eval_poly(&sq, 2.0).unwrap(), c(4.0));
        let e = Vector::from_real(p01, &[1.0, 1.0, 0.5]).unwrap();
        assert_eq!(eval_poly(&e, 1.0).unwrap(), c(2.5));
        assert!(matches!(eval_poly(&e, 1.5), Err(Error::Domain { .. })));
    }

    #[test]
    fn overflow_is_loud() {
        let l2 = Space::lp(2.0).unwrap();
        assert!(matches!(
            Vector::from_real(l2, &[1e301]),
            Err(Error::Overflow { .. })
        ));
        let v = Vector::from_real(l2, &[1e300, 1e300]).unwrap();
        assert!(matches!(v.norm(), Err(Error::Overflow { .. })));
        // scaling keeps large-but-representable l_p norms exact enough
        let v = Vector::from_real(Space::lp(3.0).unwrap(), &[1e200, 1e200]).unwrap();
        assert!((v.norm().unwrap() / (1e200 * 2f64.powf(1.0 / 3.0)) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn trailing_zeros_trimmed() {
        let l2 = Space::lp(2.0).unwrap();
        let v = Vector::from_real(l2, &[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(v.len(), 1);
        assert!(Vector::from_real(l2, &[0.0]).unwrap().is_zero());
    }

    #[test]
    fn degree_cap() {
        let p = Space::poly(0.0, 1.0).unwrap();
        let mut coeffs = vec![0.0; MAX_POLY_DEGREE + 2];
        coeffs[MAX_POLY_DEGREE + 1] = 1.0;
        assert!(matches!(
            Vector::from_real(p, &coeffs),
            Err(Error::DegreeOverflow { .. })
        ));
    }

    #[test]
    fn invalid_spaces() {
        assert!(Space::lp(0.5).is_err());
        assert!(Space::poly(1.0, 1.0).is_err());
        let bad: std::result::Result<Space, _> =
            serde_json::from_str(r#"{"kind":"poly","a":2,"b":1}"#);
        assert!(bad.is_err());
    }

    #[test]
    fn json_shape() {
        let v = Vector::from_real(Space::lp(2.0).unwrap(), &[1.0, -2.0]).unwrap();
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(
            s,
            r#"{"space":{"kind":"lp","p":2.0},"coeffs":[[1.0,0.0],[-2.0,0.0]]}"#
        );
        let back: Vector = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
        let c0: Vector = serde_json::from_str(r#"{"space":{"kind":"c0"},"coeffs":[[0,1]]}"#).unwrap();
        assert_eq!(c0.coeffs(), &[Scalar::new(0.0, 1.0)]);
    }
}
