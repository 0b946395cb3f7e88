//! Hypothesis checks, residual verification, spectrum scans and probes.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::enumerate::canonical_samples;
use crate::error::{Error, Result};
use crate::linalg::min_singular_value;
use crate::pairs::{AdjointView, DecayProfile, OperatorPair};
use crate::series::{eigenvector, local_spectral_radius, SeriesResult, Side};
use crate::space::{canonical_basis, Scalar, Vector};

/// Accepted defect of `A B f = f`, relative to `1 + ||f||`.
pub const HYPOTHESIS1_TOL: f64 = 1e-12;
/// Estimates below this count as vanishing local spectral radius.
pub const SUPER_THRESHOLD: f64 = 0.05;
/// A uniform rate must stay this far below 1.
pub const UNIFORM_MARGIN: f64 = 0.05;
/// Smallest singular value that still counts as a trivial intersection.
pub const DISJOINT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecayClass {
    SchOnly,
    SccGeometric,
    SccUniform,
    SccSuper,
    Fails,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRates {
    pub id: usize,
    pub r_a: f64,
    pub r_b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisVerdict {
    pub hypothesis1_ok: bool,
    pub hypothesis1_max_defect: f64,
    pub decay_class: DecayClass,
    /// Supremum over samples of `max(r_A, r_B)`.
    pub uniform_alpha: f64,
    pub per_sample: Vec<SampleRates>,
    pub notes: Vec<String>,
}

fn hypothesis1_defect(p: &OperatorPair, f: &Vector) -> Result<f64> {
    let abf = p.apply_a(&p.apply_b(f)?)?;
    Ok(abf.distance(f)? / (1.0 + f.norm()?))
}

fn last_norm(samples: &[(usize, f64)]) -> f64 {
    samples.last().map_or(0.0, |s| s.1)
}

/// Checks `A B f = f` and classifies the decay of `A^n f`, `B^n f` on the
/// first `sample_count` vectors of the canonical enumeration.
pub fn check_hypotheses(p: &OperatorPair, sample_count: usize, n_max: usize) -> Result<HypothesisVerdict> {
    if sample_count == 0 {
        return Err(Error::Param("sample_count must be >= 1".into()));
    }
    let samples = canonical_samples(p.space(), sample_count);
    let mut notes = Vec::new();
    let mut max_defect: f64 = 0.0;
    let mut rates = Vec::with_capacity(samples.len());
    let mut all_vanish = true;
    let mut errored = false;
    for (id, f) in samples.iter().enumerate() {
        match hypothesis1_defect(p, f) {
            Ok(d) => max_defect = max_defect.max(d),
            Err(e) => {
                notes.push(format!("sample {id}: A B f failed with {}", e.name()));
                max_defect = f64::INFINITY;
            }
        }
        let mut side_rate = |side: Side| match local_spectral_radius(p, f, side, n_max) {
            Ok(est) => {
                let f_norm = f.norm().unwrap_or(f64::INFINITY);
                if !est.exact_zero && last_norm(&est.samples) > 1e-3 * f_norm {
                    all_vanish = false;
                }
                est.value
            }
            Err(e) => {
                notes.push(format!("sample {id}: {side:?} estimate failed with {}", e.name()));
                errored = true;
                all_vanish = false;
                f64::INFINITY
            }
        };
        let r_a = side_rate(Side::ASide);
        let r_b = side_rate(Side::BSide);
        rates.push(SampleRates { id, r_a, r_b });
    }
    let hypothesis1_ok = max_defect <= HYPOTHESIS1_TOL;
    let sup = rates
        .iter()
        .map(|r| r.r_a.max(r.r_b))
        .fold(0.0, f64::max);
    let decay_class = if !hypothesis1_ok || errored {
        DecayClass::Fails
    } else if sup < SUPER_THRESHOLD {
        DecayClass::SccSuper
    } else if sup <= 1.0 - UNIFORM_MARGIN {
        DecayClass::SccUniform
    } else if sup < 1.0 {
        DecayClass::SccGeometric
    } else if all_vanish {
        DecayClass::SchOnly
    } else {
        DecayClass::Fails
    };
    if !hypothesis1_ok {
        notes.push(format!("A B f = f defect {max_defect:e} exceeds {HYPOTHESIS1_TOL:e}"));
    }
    notes.push(format!(
        "rates are limsup surrogates from n <= {n_max}; they over-estimate, never under-estimate"
    ));
    Ok(HypothesisVerdict {
        hypothesis1_ok,
        hypothesis1_max_defect: max_defect,
        decay_class,
        uniform_alpha: sup,
        per_sample: rates,
        notes,
    })
}

fn relation_residual(p: &OperatorPair, v: &Vector, n: usize, lambda: Scalar) -> Result<f64> {
    let d = p.apply_a_pow(v, n)?.sub(&v.scale(lambda)?)?;
    Ok(d.norm()? / (1.0 + v.norm()?))
}

/// `||A^N f_N - f_N|| / (1 + ||f_N||)`, also stored in `result.residual`.
pub fn verify_periodic(p: &OperatorPair, result: &mut SeriesResult, big_n: usize) -> Result<f64> {
    if big_n == 0 {
        return Err(Error::Param("period must be >= 1".into()));
    }
    let r = if result.vector.is_zero() {
        0.0
    } else {
        relation_residual(p, &result.vector, big_n, Scalar::new(1.0, 0.0))?
    };
    result.residual = Some(r);
    Ok(r)
}

/// `||A^n f - lambda f|| / (1 + ||f||)`, also stored in `result.residual`.
pub fn verify_eigen(p: &OperatorPair, result: &mut SeriesResult, n: usize, lambda: Scalar) -> Result<f64> {
    if n == 0 {
        return Err(Error::Param("power index must be >= 1".into()));
    }
    if result.vector.is_zero() {
        return Err(Error::ZeroVector);
    }
    let r = relation_residual(p, &result.vector, n, lambda)?;
    result.residual = Some(r);
    Ok(r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CellStatus {
    Constructed { residual: f64 },
    Diverged { reason: String },
    Skipped { reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Prediction {
    InsidePredictedRegion,
    OutsideOrUnknown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanCell {
    pub lambda: Scalar,
    pub n: usize,
    pub status: CellStatus,
    pub predicted: Prediction,
}

impl ScanCell {
    pub fn is_constructed(&self) -> bool {
        matches!(self.status, CellStatus::Constructed { .. })
    }

    pub fn residual(&self) -> Option<f64> {
        match self.status {
            CellStatus::Constructed { residual } => Some(residual),
            _ => None,
        }
    }

    pub fn status_name(&self) -> &'static str {
        match self.status {
            CellStatus::Constructed { .. } => "constructed",
            CellStatus::Diverged { .. } => "diverged",
            CellStatus::Skipped { .. } => "skipped",
        }
    }
}

/// Region of the point spectrum of `A^n` guaranteed by the decay profile alone.
pub fn predicted_region(p: &OperatorPair, n: usize, lambda: Scalar) -> Prediction {
    let modulus = lambda.norm();
    let inside = match p.decay_profile() {
        DecayProfile::Geometric { alpha_hint } => {
            let outer = alpha_hint.powi(n as i32).recip();
            if p.is_locally_nilpotent() {
                modulus < outer
            } else {
                modulus > alpha_hint.powi(n as i32) && modulus < outer
            }
        }
        DecayProfile::Superexponential => p.is_locally_nilpotent() || modulus > 0.0,
        DecayProfile::Unknown => false,
    };
    if inside {
        Prediction::InsidePredictedRegion
    } else {
        Prediction::OutsideOrUnknown
    }
}

fn scan_cell(p: &OperatorPair, n: usize, lambda: Scalar, tol: f64, seed: &Vector) -> ScanCell {
    let status = match eigenvector(p, seed, n, lambda, tol) {
        Ok(mut r) => match verify_eigen(p, &mut r, n, lambda) {
            Ok(residual) => CellStatus::Constructed { residual },
            Err(e) => CellStatus::Skipped {
                reason: e.name().into(),
            },
        },
        Err(e @ (Error::AnnulusViolation { .. } | Error::NotConvergent { .. })) => {
            CellStatus::Diverged {
                reason: e.name().into(),
            }
        }
        Err(e) => CellStatus::Skipped {
            reason: e.name().into(),
        },
    };
    ScanCell {
        lambda,
        n,
        status,
        predicted: predicted_region(p, n, lambda),
    }
}

/// Attempts the eigenvector construction at every grid point, in parallel.
/// Cells come back in grid order.
pub fn spectrum_scan(
    p: &OperatorPair,
    n: usize,
    grid: &[Scalar],
    tol: f64,
    seed_f: &Vector,
) -> Result<Vec<ScanCell>> {
    if grid.is_empty() {
        return Err(Error::Param("scan grid is empty".into()));
    }
    if n == 0 {
        return Err(Error::Param("power index must be >= 1".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::Param(format!("tolerance must be positive, got {tol}")));
    }
    if seed_f.space() != p.space() {
        return Err(Error::SpaceMismatch {
            left: p.space().to_string(),
            right: seed_f.space().to_string(),
        });
    }
    if !p.is_dense_member(seed_f) {
        return Err(Error::Param("seed is not in the dense set Y".into()));
    }
    if seed_f.is_zero() {
        return Err(Error::ZeroVector);
    }
    Ok(grid
        .par_iter()
        .map(|&lambda| scan_cell(p, n, lambda, tol, seed_f))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitHit {
    pub target_index: usize,
    pub best_n: usize,
    pub best_distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitProbe {
    pub hits: Vec<OrbitHit>,
    /// Largest `n` for which `A^n f` was evaluated.
    pub scanned_to: usize,
    pub halted: Option<String>,
}

/// Closest approach of the orbit `A^n f`, `n = 0..=n_max`, to each target.
/// Ties go to the smallest `n`.
pub fn orbit_density_probe(
    p: &OperatorPair,
    f: &Vector,
    targets: &[Vector],
    n_max: usize,
) -> Result<OrbitProbe> {
    if targets.is_empty() {
        return Err(Error::Param("no targets given".into()));
    }
    let mut hits: Vec<OrbitHit> = (0..targets.len())
        .map(|i| OrbitHit {
            target_index: i,
            best_n: 0,
            best_distance: f64::INFINITY,
        })
        .collect();
    let mut g = f.clone();
    let mut halted = None;
    let mut scanned_to = 0;
    for n in 0..=n_max {
        for (hit, t) in hits.iter_mut().zip(targets) {
            let d = g.distance(t)?;
            if d < hit.best_distance {
                hit.best_distance = d;
                hit.best_n = n;
            }
        }
        scanned_to = n;
        if n == n_max {
            break;
        }
        match p.apply_a(&g) {
            Ok(next) => g = next,
            Err(e) => {
                halted = Some(format!("orbit stopped after n = {n}: {}", e.name()));
                break;
            }
        }
    }
    Ok(OrbitProbe {
        hits,
        scanned_to,
        halted,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ProbeMode {
    BoundedOrbit,
    EigenvalueFound { lambda: Scalar, residual: f64 },
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdjointProbeResult {
    pub mode: ProbeMode,
    pub witness: Vector,
    pub orbit_norms: Vec<f64>,
    pub notes: Vec<String>,
}

/// Accepted relative eigen-defect for an adjoint eigenvalue.
pub const ADJOINT_EIGEN_TOL: f64 = 1e-8;
/// Allowed growth of the tail half of the orbit over its head half.
pub const BOUNDED_RATIO: f64 = 1.0 + 1e-6;

fn eigen_probe(view: &AdjointView, g: &Vector) -> Result<Option<(Scalar, f64)>> {
    let image = view.apply(g)?;
    let Some(i) = g.coeffs().iter().position(|c| *c != Scalar::new(0.0, 0.0)) else {
        return Ok(None);
    };
    let lambda = image.coeff(i) / g.coeff(i);
    let residual = image.sub(&g.scale(lambda)?)?.norm()? / g.norm()?;
    Ok((residual <= ADJOINT_EIGEN_TOL).then_some((lambda, residual)))
}

fn orbit_norms(view: &AdjointView, g: &Vector, n_max: usize) -> (Vec<f64>, bool) {
    let mut norms = Vec::with_capacity(n_max + 1);
    let mut h = g.clone();
    for n in 0..=n_max {
        match h.norm() {
            Ok(x) => norms.push(x),
            Err(_) => return (norms, false),
        }
        if n < n_max {
            match view.apply(&h) {
                Ok(next) => h = next,
                Err(_) => return (norms, false),
            }
        }
    }
    (norms, true)
}

fn looks_bounded(norms: &[f64], start: f64) -> bool {
    if norms.len() < 2 {
        return false;
    }
    let half = norms.len() / 2;
    let head = norms[..half].iter().copied().fold(0.0, f64::max);
    let tail = norms[half..].iter().copied().fold(0.0, f64::max);
    let peak = head.max(tail);
    tail <= BOUNDED_RATIO * head && peak <= 10.0 * start
}

/// Looks for a dual vector with a bounded adjoint orbit or an adjoint
/// eigenvalue among `candidates`. Either outcome rules out hypercyclicity of
/// the underlying operator; neither outcome proves anything.
pub fn probe_adjoint(view: &AdjointView, candidates: &[Vector], n_max: usize) -> Result<AdjointProbeResult> {
    if candidates.is_empty() {
        return Err(Error::Param("no candidates given".into()));
    }
    if candidates.iter().any(Vector::is_zero) {
        return Err(Error::ZeroVector);
    }
    let notes = vec![
        "only the supplied candidates are tested; absence of an adjoint eigenvalue is not established".to_string(),
    ];
    for g in candidates {
        if g.space() != view.space {
            return Err(Error::SpaceMismatch {
                left: view.space.to_string(),
                right: g.space().to_string(),
            });
        }
        let (norms, finished) = orbit_norms(view, g, n_max);
        if let Some((lambda, residual)) = eigen_probe(view, g)? {
            return Ok(AdjointProbeResult {
                mode: ProbeMode::EigenvalueFound { lambda, residual },
                witness: g.clone(),
                orbit_norms: norms,
                notes,
            });
        }
        if finished && looks_bounded(&norms, g.norm()?) {
            return Ok(AdjointProbeResult {
                mode: ProbeMode::BoundedOrbit,
                witness: g.clone(),
                orbit_norms: norms,
                notes,
            });
        }
    }
    let g = &candidates[0];
    let (norms, _) = orbit_norms(view, g, n_max);
    Ok(AdjointProbeResult {
        mode: ProbeMode::Inconclusive,
        witness: g.clone(),
        orbit_norms: norms,
        notes,
    })
}

/// [`probe_adjoint`] on the adjoint of `A`.
pub fn adjoint_nonhc_probe(p: &OperatorPair, candidates: &[Vector], n_max: usize) -> Result<AdjointProbeResult> {
    probe_adjoint(&p.adjoint_view()?, candidates, n_max)
}

/// `true` when `ker A^n` and the image under `B^n` of the first
/// `support_cap` basis vectors of `Y` meet only in 0.
pub fn check_kernel_range_disjoint(p: &OperatorPair, n: usize, support_cap: usize) -> Result<bool> {
    if n == 0 {
        return Err(Error::Param("power index must be >= 1".into()));
    }
    if support_cap == 0 {
        return Err(Error::Param("support cap must be >= 1".into()));
    }
    let kernel = p.kernel_basis(n);
    if kernel.is_empty() {
        return Ok(true);
    }
    let mut columns = Vec::with_capacity(kernel.len() + support_cap);
    let mut push = |v: &Vector| -> Result<()> {
        let scale = v.coeffs().iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if scale > 0.0 {
            columns.push(v.coeffs().iter().map(|c| c / scale).collect());
        }
        Ok(())
    };
    for k in &kernel {
        push(k)?;
    }
    for k in 1..=support_cap {
        let u = canonical_basis(p.space(), k)?;
        push(&p.apply_b_pow(&u, n)?)?;
    }
    Ok(min_singular_value(&columns) > DISJOINT_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairs::{make_bounded_shift, make_differentiation, multiple_pair};
    use crate::series::periodic_point;
    use crate::space::Space;

    fn c(re: f64) -> Scalar {
        Scalar::new(re, 0.0)
    }

    #[test]
    fn check_examples() {
        let p = make_bounded_shift(c(2.0), Space::lp(1.0).unwrap()).unwrap();
        let v = check_hypotheses(&p, 20, 64).unwrap();
        assert!(v.hypothesis1_max_defect <= 1e-12);
        assert_eq!(v.decay_class, DecayClass::SccUniform);
        assert!((v.uniform_alpha - 0.5).abs() < 0.05, "{}", v.uniform_alpha);

        let m = multiple_pair(&p, Scalar::new(0.0, 1.0)).unwrap();
        let w = check_hypotheses(&m, 20, 64).unwrap();
        assert_eq!(w.decay_class, v.decay_class);
        assert_eq!(w.per_sample, v.per_sample);

        let d = make_differentiation(0.0, 1.0).unwrap();
        let v = check_hypotheses(&d, 20, 128).unwrap();
        assert_eq!(v.decay_class, DecayClass::SccSuper);
    }

    #[test]
    fn periodic_residuals() {
        let p = make_bounded_shift(c(2.0), Space::lp(1.0).unwrap()).unwrap();
        let mut zero = periodic_point(&p, &Vector::zero(p.space()), 1, 1e-10).unwrap();
        assert_eq!(verify_periodic(&p, &mut zero, 1).unwrap(), 0.0);
        assert!(matches!(verify_eigen(&p, &mut zero, 1, c(1.0)), Err(Error::ZeroVector)));
        let e1 = canonical_basis(p.space(), 1).unwrap();
        let mut r = periodic_point(&p, &e1, 1, 1e-10).unwrap();
        let res = verify_periodic(&p, &mut r, 1).unwrap();
        assert!(res <= 1e-9);
        assert_eq!(r.residual, Some(res));
        assert_eq!(verify_eigen(&p, &mut r, 1, c(1.0)).unwrap(), res);
    }

    #[test]
    fn scan_examples() {
        let p = make_bounded_shift(c(2.0), Space::lp(1.0).unwrap()).unwrap();
        let e1 = canonical_basis(p.space(), 1).unwrap();
        let grid = [c(0.0), c(0.5), Scalar::new(0.0, 1.0), c(-1.9), c(2.5)];
        let cells = spectrum_scan(&p, 1, &grid, 1e-10, &e1).unwrap();
        for cell in &cells[..4] {
            assert!(cell.residual().unwrap() <= 1e-10, "{cell:?}");
            assert_eq!(cell.predicted, Prediction::InsidePredictedRegion);
        }
        assert!(matches!(cells[4].status, CellStatus::Diverged { .. }));
        assert_eq!(cells[4].predicted, Prediction::OutsideOrUnknown);
    }

    #[test]
    fn orbit_examples() {
        let p = make_bounded_shift(c(2.0), Space::lp(1.0).unwrap()).unwrap();
        let e1 = canonical_basis(p.space(), 1).unwrap();
        let probe = orbit_density_probe(&p, &e1, &[e1.clone()], 10).unwrap();
        assert_eq!(probe.hits[0].best_n, 0);
        assert_eq!(probe.hits[0].best_distance, 0.0);
        let f = p.apply_b_pow(&e1, 5).unwrap();
        let probe = orbit_density_probe(&p, &f, &[e1], 10).unwrap();
        assert_eq!(probe.hits[0].best_n, 5);
        assert_eq!(probe.hits[0].best_distance, 0.0);
    }

    #[test]
    fn kernel_range_examples() {
        let p = make_bounded_shift(c(2.0), Space::lp(1.0).unwrap()).unwrap();
        assert!(check_kernel_range_disjoint(&p, 2, 12).unwrap());
        let d = make_differentiation(0.0, 1.0).unwrap();
        assert!(check_kernel_range_disjoint(&d, 1, 12).unwrap());
    }

    #[test]
    fn probe_rejects_zero_candidates() {
        let p = make_bounded_shift(c(2.0), Space::lp(2.0).unwrap()).unwrap();
        let zero = Vector::zero(p.space());
        assert!(matches!(adjoint_nonhc_probe(&p, &[zero], 8), Err(Error::ZeroVector)));
        let q = make_bounded_shift(c(2.0), Space::lp(1.0).unwrap()).unwrap();
        let e1 = canonical_basis(q.space(), 1).unwrap();
        assert!(matches!(adjoint_nonhc_probe(&q, &[e1], 8), Err(Error::NoAdjoint)));
    }
}
