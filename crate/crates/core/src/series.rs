//! Truncated series constructions driven by a right inverse.
//!
//! Eigenvectors of `A^n` are built as `sum_m lambda^m B^{mn} f` (plus the
//! finitely many `lambda^-m A^{mn} f` terms when `f` is not in a kernel),
//! periodic points are the special case `lambda = 1`, and hypercyclic vectors
//! come from a greedy schedule `sum_k B^{n(k)} f_k`.

use serde::{Deserialize, Serialize};

use crate::enumerate::canonical_enumeration;
use crate::error::{Error, Result};
use crate::linalg::span_residual;
use crate::pairs::OperatorPair;
use crate::space::{Scalar, Vector, MAGNITUDE_LIMIT};

/// Hard cap on the number of series terms on either side.
pub const MAX_TERMS: usize = 10_000;

/// Relative residual accepted for kernel membership of the isomorphism input.
pub const KERNEL_MEMBERSHIP_TOL: f64 = 1e-10;

/// Relative residual accepted for eigenvector inputs of the inverse map.
pub const EIGEN_INPUT_TOL: f64 = 1e-6;

/// Steps of `A^n` tried before giving up on exact vanishing of the negative side.
const NILPOTENCY_PROBE: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    ASide,
    BSide,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralEstimate {
    pub side: Side,
    pub value: f64,
    /// `(n, ||T^n f||)`; norms below the smallest double read as 0.
    pub samples: Vec<(usize, f64)>,
    pub fit_alpha: f64,
    pub fit_quality: f64,
    pub exact_zero: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesResult {
    pub vector: Vector,
    /// Highest power index kept on the `B` side.
    #[serde(rename = "truncation_M")]
    pub truncation_m: usize,
    pub tail_bound: f64,
    pub residual: Option<f64>,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypercyclicSchedule {
    pub targets: Vec<Vector>,
    pub exponents: Vec<usize>,
    pub per_step_residual_bound: Vec<f64>,
}

fn check_seed(p: &OperatorPair, f: &Vector) -> Result<()> {
    if f.space() != p.space() {
        return Err(Error::SpaceMismatch {
            left: p.space().to_string(),
            right: f.space().to_string(),
        });
    }
    if !p.is_dense_member(f) {
        return Err(Error::Param("seed is not in the dense set Y".into()));
    }
    Ok(())
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::Param(format!("tolerance must be positive, got {tol}")))
    }
}

fn check_power(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::Param("power index must be >= 1".into()))
    } else {
        Ok(())
    }
}

/// Estimates `limsup ||T^n f||^{1/n}` from the iterates `n = 1..=n_max`.
///
/// Iterates are renormalized at every step so the estimate survives norms far
/// outside the double range; only the logarithms are accumulated.
pub fn local_spectral_radius(
    p: &OperatorPair,
    f: &Vector,
    side: Side,
    n_max: usize,
) -> Result<SpectralEstimate> {
    check_seed(p, f)?;
    if n_max < 8 {
        return Err(Error::Param(format!("n_max must be >= 8, got {n_max}")));
    }
    let exact = |samples| SpectralEstimate {
        side,
        value: 0.0,
        samples,
        fit_alpha: 0.0,
        fit_quality: 0.0,
        exact_zero: true,
    };
    if f.is_zero() {
        return Ok(exact(Vec::new()));
    }
    let norm0 = f.norm()?;
    let mut g = f.scale(Scalar::new(1.0 / norm0, 0.0))?;
    let mut log_norm = norm0.ln();
    let mut logs = Vec::with_capacity(n_max);
    let mut samples = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let h = match side {
            Side::ASide => p.apply_a(&g)?,
            Side::BSide => p.apply_b(&g)?,
        };
        if h.is_zero() {
            samples.push((n, 0.0));
            return Ok(exact(samples));
        }
        let nh = h.norm()?;
        log_norm += nh.ln();
        logs.push(log_norm);
        samples.push((n, log_norm.exp()));
        g = h.scale(Scalar::new(1.0 / nh, 0.0))?;
    }

    let start = n_max.div_ceil(2);
    let window: Vec<(f64, f64)> = (start..=n_max)
        .map(|n| (n as f64, logs[n - 1]))
        .collect();
    let count = window.len() as f64;
    let mean_x = window.iter().map(|w| w.0).sum::<f64>() / count;
    let mean_y = window.iter().map(|w| w.1).sum::<f64>() / count;
    let sxx: f64 = window.iter().map(|w| (w.0 - mean_x).powi(2)).sum();
    let sxy: f64 = window
        .iter()
        .map(|w| (w.0 - mean_x) * (w.1 - mean_y))
        .sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let fit_quality = window
        .iter()
        .map(|&(x, y)| (intercept + slope * x - y).abs() / y.abs().max(1.0))
        .fold(0.0, f64::max);
    let fit_alpha = slope.exp();
    let tail_root = window
        .iter()
        .map(|&(x, y)| (y / x).exp())
        .fold(0.0, f64::max);
    Ok(SpectralEstimate {
        side,
        value: fit_alpha.max(tail_root),
        samples,
        fit_alpha,
        fit_quality,
        exact_zero: false,
    })
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    /// Divergence reported as a violation of the convergence annulus.
    Annulus,
    /// Divergence reported as a failed ratio certificate.
    Ratio,
}

impl Mode {
    fn divergence(self, ratio: f64, modulus: f64, detail: String) -> Error {
        match self {
            Mode::Annulus => Error::AnnulusViolation { modulus, detail },
            Mode::Ratio => Error::NotConvergent { ratio },
        }
    }
}

/// Certified factor `S` with `||sum_{m>M} lambda^m B^{mn} f|| <= S ||lambda^M B^{Mn} f||`.
///
/// With an analytic bound this is `sum_{j>=1} |lambda|^j ||B^{jn}||`, summed in
/// log space; the remainder estimate assumes the term ratios do not increase,
/// which holds for all built-in bounds.
fn tail_factor(p: &OperatorPair, f: &Vector, n: usize, lambda: Scalar, mode: Mode) -> Result<f64> {
    let modulus = lambda.norm();
    if modulus == 0.0 {
        return Ok(0.0);
    }
    let log_mod = modulus.ln();
    let log_limit = MAGNITUDE_LIMIT.ln();
    if p.has_b_norm_bound() {
        let log_term = |j: usize| j as f64 * log_mod + p.log_b_norm_bound(j * n).unwrap_or(0.0);
        let mut log_sum = f64::NEG_INFINITY;
        let mut prev_ratio = f64::INFINITY;
        let mut t = log_term(1);
        for j in 1..=100 * MAX_TERMS {
            if t == f64::NEG_INFINITY {
                break;
            }
            log_sum = log_add(log_sum, t);
            if log_sum > log_limit {
                return Err(Error::overflow(format!(
                    "tail factor for |lambda| = {modulus}, n = {n}"
                )));
            }
            let next = log_term(j + 1);
            let ratio = (next - t).exp();
            if ratio < 1.0 {
                let rest = t + (ratio / (1.0 - ratio)).ln();
                return Ok(log_add(log_sum, rest).exp());
            }
            if j >= 2 && ratio >= prev_ratio * (1.0 - 1e-9) {
                return Err(mode.divergence(
                    ratio,
                    modulus,
                    format!("term ratio {ratio} of the B-side series does not drop below 1"),
                ));
            }
            prev_ratio = ratio;
            t = next;
        }
        Ok(log_sum.exp())
    } else {
        let est = local_spectral_radius(p, f, Side::BSide, 64)?;
        let q = modulus * est.value.powi(n as i32);
        if q >= 1.0 {
            return Err(mode.divergence(
                q,
                modulus,
                format!("estimated B-side ratio {q} is not below 1"),
            ));
        }
        Ok(q / (1.0 - q))
    }
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Sum of the negative-index terms `sum_{m>=1} lambda^-m A^{mn} f` and its tail bound.
fn a_side(
    p: &OperatorPair,
    f: &Vector,
    n: usize,
    lambda: Scalar,
    tol: f64,
    mode: Mode,
) -> Result<(Option<Vector>, f64)> {
    let first = p.apply_a_pow(f, n)?;
    if first.is_zero() {
        return Ok((None, 0.0));
    }
    let modulus = lambda.norm();
    if modulus == 0.0 {
        return Err(mode.divergence(
            f64::INFINITY,
            0.0,
            "lambda = 0 needs a seed in the kernel of A^n".into(),
        ));
    }
    let inv = Scalar::new(1.0, 0.0) / lambda;
    let mut h = first.scale(inv)?;
    let mut sum = h.clone();
    let mut q: Option<f64> = None;
    for m in 1..=MAX_TERMS {
        let next = p.apply_a_pow(&h, n)?;
        if next.is_zero() {
            return Ok((Some(sum), 0.0));
        }
        if m == NILPOTENCY_PROBE {
            let est = local_spectral_radius(p, f, Side::ASide, 64)?;
            let ratio = est.value.powi(n as i32) / modulus;
            if ratio >= 1.0 {
                return Err(mode.divergence(
                    ratio,
                    modulus,
                    format!("estimated A-side ratio {ratio} is not below 1"),
                ));
            }
            q = Some(ratio);
        }
        h = next.scale(inv)?;
        sum = sum.add(&h)?;
        if let Some(q) = q {
            let bound = h.norm()? * q / (1.0 - q);
            if bound < tol / 4.0 {
                return Ok((Some(sum), bound));
            }
        }
    }
    Err(Error::ToleranceUnreachable {
        tol,
        terms: MAX_TERMS,
    })
}

fn laurent(
    p: &OperatorPair,
    f: &Vector,
    n: usize,
    lambda: Scalar,
    tol: f64,
    mode: Mode,
) -> Result<SeriesResult> {
    check_power(n)?;
    check_tol(tol)?;
    if !(lambda.re.is_finite() && lambda.im.is_finite()) {
        return Err(Error::Param("lambda must be finite".into()));
    }
    check_seed(p, f)?;
    if f.is_zero() {
        return Ok(SeriesResult {
            vector: f.clone(),
            truncation_m: 0,
            tail_bound: 0.0,
            residual: None,
            converged: true,
        });
    }
    let modulus = lambda.norm();
    let (neg, neg_tail) = a_side(p, f, n, lambda, tol, mode)?;
    let s = tail_factor(p, f, n, lambda, mode)?;

    let mut acc = f.clone();
    let mut g = f.clone();
    let mut m = 0;
    let mut g_norm = g.norm()?;
    let pos_tail = loop {
        let tail = g_norm * s;
        if g.is_zero() || (tail < tol / 2.0 && modulus * g_norm < tol / 2.0) {
            break if g.is_zero() { 0.0 } else { tail };
        }
        if m == MAX_TERMS {
            return Err(Error::ToleranceUnreachable {
                tol,
                terms: MAX_TERMS,
            });
        }
        g = p.apply_b_pow(&g, n)?.scale(lambda)?;
        acc = acc.add(&g)?;
        g_norm = g.norm()?;
        m += 1;
    };
    if let Some(neg) = neg {
        acc = acc.add(&neg)?;
    }
    let tail_bound = pos_tail + neg_tail;
    Ok(SeriesResult {
        vector: acc,
        truncation_m: m,
        tail_bound,
        residual: None,
        converged: tail_bound <= tol,
    })
}

/// Truncated eigenvector series for `A^n` at `lambda`, seeded by `f`.
pub fn eigenvector(
    p: &OperatorPair,
    f: &Vector,
    n: usize,
    lambda: Scalar,
    tol: f64,
) -> Result<SeriesResult> {
    if f.is_zero() {
        return Err(Error::ZeroVector);
    }
    laurent(p, f, n, lambda, tol, Mode::Annulus)
}

/// Truncated series for a point of period `big_n`; equals `eigenvector` at `lambda = 1`.
pub fn periodic_point(p: &OperatorPair, f: &Vector, big_n: usize, tol: f64) -> Result<SeriesResult> {
    laurent(p, f, big_n, Scalar::new(1.0, 0.0), tol, Mode::Ratio)
}

/// `sum_{m=0}^{m_plus} lambda^m B^{mn} f` plus the exactly vanishing negative
/// side. Used to compare truncations without certification.
pub fn truncated_series(
    p: &OperatorPair,
    f: &Vector,
    n: usize,
    lambda: Scalar,
    m_plus: usize,
) -> Result<Vector> {
    check_power(n)?;
    check_seed(p, f)?;
    let (neg, _) = a_side(p, f, n, lambda, f64::MIN_POSITIVE, Mode::Annulus)?;
    let mut acc = f.clone();
    let mut g = f.clone();
    for _ in 0..m_plus {
        g = p.apply_b_pow(&g, n)?.scale(lambda)?;
        if g.is_zero() {
            break;
        }
        acc = acc.add(&g)?;
    }
    match neg {
        Some(neg) => acc.add(&neg),
        None => Ok(acc),
    }
}

fn kernel_membership_residual(p: &OperatorPair, n: usize, f0: &Vector) -> Result<f64> {
    let basis: Vec<Vec<Scalar>> = p
        .kernel_basis(n)
        .iter()
        .map(|b| b.coeffs().to_vec())
        .collect();
    let r = span_residual(&basis, f0.coeffs());
    let r = Vector::new(p.space(), r)?;
    Ok(r.norm()? / (1.0 + f0.norm()?))
}

/// `f0 -> sum_{m>=0} lambda^m B^{mn} f0`, from `ker A^n` onto `ker(A^n - lambda)`.
pub fn kernel_isomorphism(
    p: &OperatorPair,
    n: usize,
    lambda: Scalar,
    f0: &Vector,
    tol: f64,
) -> Result<Vector> {
    check_power(n)?;
    check_tol(tol)?;
    check_seed(p, f0)?;
    let residual = kernel_membership_residual(p, n, f0)?;
    if residual > KERNEL_MEMBERSHIP_TOL {
        return Err(Error::NotInKernel { residual });
    }
    if f0.is_zero() {
        return Ok(f0.clone());
    }
    laurent(p, f0, n, lambda, tol, Mode::Ratio).map(|r| r.vector)
}

/// `f -> f - lambda B^n f`, the inverse of [`kernel_isomorphism`].
pub fn kernel_isomorphism_inverse(
    p: &OperatorPair,
    n: usize,
    lambda: Scalar,
    f_nl: &Vector,
) -> Result<Vector> {
    check_power(n)?;
    check_seed(p, f_nl)?;
    let defect = p.apply_a_pow(f_nl, n)?.sub(&f_nl.scale(lambda)?)?;
    let residual = defect.norm()? / (1.0 + f_nl.norm()?);
    if residual > EIGEN_INPUT_TOL {
        return Err(Error::NotEigen { residual });
    }
    let image = p.apply_b_pow(f_nl, n)?.scale(lambda)?;
    f_nl.sub(&image)
}

/// Smallest `d` with `A^d f = 0`, probing up to `cap` steps.
fn nilpotency_degree(p: &OperatorPair, f: &Vector, cap: usize) -> Result<Option<usize>> {
    let mut g = f.clone();
    for d in 0..=cap {
        if g.is_zero() {
            return Ok(Some(d));
        }
        g = p.apply_a(&g)?;
    }
    Ok(None)
}

/// Lazily extended norms `||B^t f||`, `t = 0, 1, ...`.
struct BOrbit {
    current: Vector,
    norms: Vec<f64>,
}

impl BOrbit {
    fn new(f: &Vector) -> Result<Self> {
        Ok(BOrbit {
            current: f.clone(),
            norms: vec![f.norm()?],
        })
    }

    fn norm(&mut self, p: &OperatorPair, t: usize) -> Result<f64> {
        while self.norms.len() <= t {
            self.current = p.apply_b(&self.current)?;
            self.norms.push(self.current.norm()?);
        }
        Ok(self.norms[t])
    }
}

/// Partial sum `sum_{k<=K} B^{n(k)} f_k` over the canonical enumeration.
///
/// `n(k)` is the smallest exponent above `n(k-1)` with
/// `||B^{n(k)-n(i)} f_k|| <= 2^-k` for every earlier exponent `n(i)`
/// (`n(0) = 0`) and with `A^{n(k)-n(j)} f_j = 0` for every earlier target.
/// The first condition makes every per-step residual at most `2^-k`.
pub fn hypercyclic_vector(
    p: &OperatorPair,
    big_k: usize,
    budget_exponent: usize,
) -> Result<(SeriesResult, HypercyclicSchedule)> {
    if big_k == 0 {
        return Err(Error::Param("K must be >= 1".into()));
    }
    if !p.is_locally_nilpotent() {
        return Err(Error::UnsupportedPair(
            "the dense set is not contained in the union of the kernels of A^n".into(),
        ));
    }
    if p.decay_profile() == crate::pairs::DecayProfile::Unknown {
        return Err(Error::UnsupportedPair("decay profile is unknown".into()));
    }
    let space = p.space();
    let targets: Vec<Vector> = canonical_enumeration(space).take(big_k).collect();
    let mut degrees = Vec::with_capacity(big_k);
    for t in &targets {
        let d = nilpotency_degree(p, t, budget_exponent.max(MAX_TERMS))?.ok_or_else(|| {
            Error::UnsupportedPair("a target is not annihilated by any power of A".into())
        })?;
        degrees.push(d);
    }

    let mut exponents: Vec<usize> = Vec::with_capacity(big_k);
    let mut orbits = Vec::with_capacity(big_k);
    for (idx, target) in targets.iter().enumerate() {
        let k = idx + 1;
        let threshold = 0.5f64.powi(k as i32);
        let mut orbit = BOrbit::new(target)?;
        let floor = exponents.last().map_or(1, |&e| e + 1);
        let lower = exponents
            .iter()
            .zip(&degrees)
            .map(|(&e, &d)| e + d)
            .fold(floor, usize::max);
        let mut chosen = None;
        'search: for m in lower..=budget_exponent {
            for &prev in std::iter::once(&0).chain(exponents.iter()) {
                if orbit.norm(p, m - prev)? > threshold {
                    continue 'search;
                }
            }
            chosen = Some(m);
            break;
        }
        let m = chosen.ok_or(Error::BudgetExceeded {
            k,
            budget: budget_exponent,
        })?;
        exponents.push(m);
        orbits.push(orbit);
    }

    let tail = 0.5f64.powi(big_k as i32);
    let mut bounds = Vec::with_capacity(big_k);
    for k in 0..big_k {
        let mut s = tail;
        for j in k + 1..big_k {
            s += orbits[j].norm(p, exponents[j] - exponents[k])?;
        }
        bounds.push(s);
    }

    let mut f = Vector::zero(space);
    for (t, &e) in targets.iter().zip(&exponents) {
        f = f.add(&p.apply_b_pow(t, e)?)?;
    }
    let result = SeriesResult {
        vector: f,
        truncation_m: big_k,
        tail_bound: tail,
        residual: None,
        converged: true,
    };
    Ok((
        result,
        HypercyclicSchedule {
            targets,
            exponents,
            per_step_residual_bound: bounds,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairs::{make_bounded_shift, make_differentiation, make_unbounded_shift};
    use crate::space::{canonical_basis, Space};

    fn c(re: f64) -> Scalar {
        Scalar::new(re, 0.0)
    }

    fn l1() -> Space {
        Space::lp(1.0).unwrap()
    }

    #[test]
    fn radius_examples() {
        let p = make_bounded_shift(c(2.0), l1()).unwrap();
        let e3 = canonical_basis(l1(), 3).unwrap();
        let est = local_spectral_radius(&p, &e3, Side::BSide, 64).unwrap();
        assert!((est.value - 0.5).abs() < 1e-6);
        assert!(!est.exact_zero);

        let e2 = canonical_basis(l1(), 2).unwrap();
        let est = local_spectral_radius(&p, &e2, Side::ASide, 64).unwrap();
        assert!(est.exact_zero);
        assert_eq!(est.value, 0.0);

        let d = make_differentiation(0.0, 1.0).unwrap();
        let one = Vector::from_real(d.space(), &[1.0]).unwrap();
        let est = local_spectral_radius(&d, &one, Side::BSide, 30).unwrap();
        assert!(est.value <= 0.2, "{}", est.value);
        assert!(matches!(
            local_spectral_radius(&d, &one, Side::BSide, 7),
            Err(Error::Param(_))
        ));
    }

    #[test]
    fn periodic_zero_seed() {
        let p = make_bounded_shift(c(2.0), l1()).unwrap();
        let r = periodic_point(&p, &Vector::zero(l1()), 1, 1e-10).unwrap();
        assert!(r.vector.is_zero());
        assert!(r.converged);
        assert_eq!(r.tail_bound, 0.0);
    }

    #[test]
    fn periodic_geometric() {
        let p = make_bounded_shift(c(2.0), l1()).unwrap();
        let e1 = canonical_basis(l1(), 1).unwrap();
        let r = periodic_point(&p, &e1, 1, 1e-10).unwrap();
        assert!(r.converged);
        for (k, x) in r.vector.coeffs().iter().enumerate() {
            assert_eq!(*x, c(0.5f64.powi(k as i32)));
        }
        let af = p.apply_a(&r.vector).unwrap();
        assert!(af.distance(&r.vector).unwrap() <= 1e-10);
    }

    #[test]
    fn eigen_examples() {
        let p = make_bounded_shift(c(2.0), l1()).unwrap();
        let e1 = canonical_basis(l1(), 1).unwrap();
        let r = eigenvector(&p, &e1, 1, c(0.5), 1e-10).unwrap();
        for (k, x) in r.vector.coeffs().iter().enumerate() {
            assert_eq!(*x, c(0.25f64.powi(k as i32)));
        }
        let r0 = eigenvector(&p, &e1, 1, c(0.0), 1e-10).unwrap();
        assert_eq!(r0.vector, e1);
        assert_eq!(r0.truncation_m, 0);
        assert!(matches!(
            eigenvector(&p, &e1, 1, c(3.0), 1e-10),
            Err(Error::AnnulusViolation { .. })
        ));
    }

    #[test]
    fn lambda_zero_off_kernel() {
        let p = make_bounded_shift(c(2.0), l1()).unwrap();
        let e3 = canonical_basis(l1(), 3).unwrap();
        assert!(matches!(
            eigenvector(&p, &e3, 1, c(0.0), 1e-10),
            Err(Error::AnnulusViolation { .. })
        ));
        let r = eigenvector(&p, &e3, 1, c(1.0), 1e-10).unwrap();
        let defect = p.apply_a(&r.vector).unwrap().distance(&r.vector).unwrap();
        assert!(defect < 1e-9);
    }

    #[test]
    fn unbounded_huge_lambda() {
        let p = make_unbounded_shift(c(2.0), l1()).unwrap();
        let e1 = canonical_basis(l1(), 1).unwrap();
        let r = eigenvector(&p, &e1, 2, c(1e6), 1e-10).unwrap();
        assert!(r.converged);
        let av = p.apply_a_pow(&r.vector, 2).unwrap();
        let d = av.sub(&r.vector.scale(c(1e6)).unwrap()).unwrap();
        assert!(d.norm().unwrap() / (1.0 + r.vector.norm().unwrap()) < 1e-10);
    }

    #[test]
    fn iso_examples() {
        let p = make_bounded_shift(c(2.0), l1()).unwrap();
        let zero = Vector::zero(l1());
        assert!(kernel_isomorphism(&p, 1, c(0.5), &zero, 1e-10).unwrap().is_zero());
        let e1 = canonical_basis(l1(), 1).unwrap();
        assert_eq!(kernel_isomorphism(&p, 1, c(0.0), &e1, 1e-10).unwrap(), e1);
        let e3 = canonical_basis(l1(), 3).unwrap();
        assert!(matches!(
            kernel_isomorphism(&p, 2, c(0.5), &e3, 1e-10),
            Err(Error::NotInKernel { .. })
        ));
        assert!(matches!(
            kernel_isomorphism(&p, 1, c(3.0), &e1, 1e-10),
            Err(Error::NotConvergent { .. })
        ));

        let e2 = canonical_basis(l1(), 2).unwrap();
        let img = kernel_isomorphism(&p, 2, c(0.5), &e2, 1e-10).unwrap();
        let back = kernel_isomorphism_inverse(&p, 2, c(0.5), &img).unwrap();
        assert!(back.distance(&e2).unwrap() <= 1e-8);
        assert_eq!(kernel_isomorphism_inverse(&p, 2, c(0.0), &e1).unwrap(), e1);
        assert!(matches!(
            kernel_isomorphism_inverse(&p, 1, c(0.5), &e3),
            Err(Error::NotEigen { .. })
        ));
    }

    #[test]
    fn iso_exponential() {
        let d = make_differentiation(0.0, 1.0).unwrap();
        let one = Vector::from_real(d.space(), &[1.0]).unwrap();
        let ex = kernel_isomorphism(&d, 1, c(1.0), &one, 1e-10).unwrap();
        let defect = d.apply_a(&ex).unwrap().sub(&ex).unwrap().norm().unwrap();
        assert!(defect <= 1e-10 * (1.0 + ex.norm().unwrap()));
        let back = kernel_isomorphism_inverse(&d, 1, c(1.0), &ex).unwrap();
        assert!(back.distance(&one).unwrap() <= 1e-8);
    }

    #[test]
    fn hypercyclic_single_term() {
        let p = make_bounded_shift(c(2.0), l1()).unwrap();
        let (r, s) = hypercyclic_vector(&p, 1, 100).unwrap();
        let n1 = s.exponents[0];
        let back = p.apply_a_pow(&r.vector, n1).unwrap();
        assert_eq!(back, s.targets[0]);
        assert!(matches!(hypercyclic_vector(&p, 3, 1), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn hypercyclic_three_terms() {
        let p = make_bounded_shift(c(2.0), l1()).unwrap();
        let (r, s) = hypercyclic_vector(&p, 3, 200).unwrap();
        assert!(s.exponents.windows(2).all(|w| w[0] < w[1]));
        for k in 0..3 {
            let bk = p.apply_b_pow(&s.targets[k], s.exponents[k]).unwrap();
            assert!(bk.norm().unwrap() <= 0.5f64.powi(k as i32 + 1));
            let d = p
                .apply_a_pow(&r.vector, s.exponents[k])
                .unwrap()
                .distance(&s.targets[k])
                .unwrap();
            assert!(d <= s.per_step_residual_bound[k] + 1e-15);
            assert!(s.per_step_residual_bound[k] <= 0.5f64.powi(k as i32));
        }
    }
}
