//! Operator / right-inverse pairs `(A, B, Y)`.
//!
//! A pair bundles a forward map `A`, a right inverse `B` with `A B f = f` on
//! the dense set `Y`, the kernels of the powers of `A`, and whatever analytic
//! decay information is known about the iterates of `B`. Three families are
//! built in (bounded and unbounded weighted backward shifts on sequence
//! spaces, differentiation on polynomials in `C[a, b]`), together with the
//! power, multiple and swap transforms.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{canonical_basis, eval_poly_unchecked, Scalar, Space, Vector};

pub type VecMap = Arc<dyn Fn(&Vector) -> Result<Vector> + Send + Sync>;
pub type KernelFn = Arc<dyn Fn(usize) -> Vec<Vector> + Send + Sync>;
pub type MemberFn = Arc<dyn Fn(&Vector) -> bool + Send + Sync>;
/// `k -> ln(bound on ||B^k||)`; `-inf` means `B^k = 0`.
pub type LogBoundFn = Arc<dyn Fn(usize) -> f64 + Send + Sync>;

/// Which flavour of geometric decay of `A^n f`, `B^n f` the pair is known to have.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DecayProfile {
    /// `max(||A^n f||, ||B^n f||) <= c alpha^n` with one `alpha` for all of `Y`.
    Geometric { alpha_hint: f64 },
    /// Both local spectral radii vanish on `Y`.
    Superexponential,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum PairDescriptor {
    BoundedShift { w: Scalar, space: Space },
    UnboundedShift { w: Scalar, space: Space },
    Differentiation { a: f64, b: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "transform", rename_all = "kebab-case")]
pub enum Transform {
    Power { n: usize, base: Box<PairSpec> },
    Multiple { lambda: Scalar, base: Box<PairSpec> },
    Swap { base: Box<PairSpec> },
}

/// Serializable description of how a pair was built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PairSpec {
    Family(PairDescriptor),
    Transform(Transform),
    Custom { custom: String },
}

impl PairDescriptor {
    pub fn build(&self) -> Result<OperatorPair> {
        match self {
            PairDescriptor::BoundedShift { w, space } => make_bounded_shift(*w, *space),
            PairDescriptor::UnboundedShift { w, space } => make_unbounded_shift(*w, *space),
            PairDescriptor::Differentiation { a, b } => make_differentiation(*a, *b),
        }
    }
}

impl PairSpec {
    pub fn build(&self) -> Result<OperatorPair> {
        match self {
            PairSpec::Family(d) => d.build(),
            PairSpec::Transform(Transform::Power { n, base }) => power_pair(&base.build()?, *n),
            PairSpec::Transform(Transform::Multiple { lambda, base }) => {
                multiple_pair(&base.build()?, *lambda)
            }
            PairSpec::Transform(Transform::Swap { base }) => swap_pair(&base.build()?),
            PairSpec::Custom { custom } => Err(Error::UnsupportedPair(format!(
                "custom pair '{custom}' cannot be rebuilt from its description"
            ))),
        }
    }
}

#[derive(Clone)]
pub struct OperatorPair {
    spec: PairSpec,
    space: Space,
    apply_a: VecMap,
    apply_b: VecMap,
    dense_member: MemberFn,
    kernel_basis: KernelFn,
    decay: DecayProfile,
    log_b_norm_bound: Option<LogBoundFn>,
    /// Direct evaluation of the same bound where it is exact in floating point.
    b_norm_direct: Option<LogBoundFn>,
    adjoint: Option<VecMap>,
    b_adjoint: Option<VecMap>,
    invertible: bool,
    locally_nilpotent: bool,
}

impl fmt::Debug for OperatorPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OperatorPair")
            .field("spec", &self.spec)
            .field("space", &self.space)
            .field("decay", &self.decay)
            .field("invertible", &self.invertible)
            .field("locally_nilpotent", &self.locally_nilpotent)
            .finish_non_exhaustive()
    }
}

/// Incremental construction of custom pairs (test doubles, experiments).
pub struct PairBuilder {
    pair: OperatorPair,
}

impl PairBuilder {
    pub fn kernel_basis(mut self, f: impl Fn(usize) -> Vec<Vector> + Send + Sync + 'static) -> Self {
        self.pair.kernel_basis = Arc::new(f);
        self
    }

    pub fn dense_member(mut self, f: impl Fn(&Vector) -> bool + Send + Sync + 'static) -> Self {
        self.pair.dense_member = Arc::new(f);
        self
    }

    pub fn decay(mut self, decay: DecayProfile) -> Self {
        self.pair.decay = decay;
        self
    }

    pub fn log_b_norm_bound(mut self, f: impl Fn(usize) -> f64 + Send + Sync + 'static) -> Self {
        self.pair.log_b_norm_bound = Some(Arc::new(f));
        self
    }

    pub fn adjoint(
        mut self,
        f: impl Fn(&Vector) -> Result<Vector> + Send + Sync + 'static,
    ) -> Self {
        self.pair.adjoint = Some(Arc::new(f));
        self
    }

    pub fn b_adjoint(
        mut self,
        f: impl Fn(&Vector) -> Result<Vector> + Send + Sync + 'static,
    ) -> Self {
        self.pair.b_adjoint = Some(Arc::new(f));
        self
    }

    pub fn invertible(mut self, flag: bool) -> Self {
        self.pair.invertible = flag;
        self
    }

    pub fn locally_nilpotent(mut self, flag: bool) -> Self {
        self.pair.locally_nilpotent = flag;
        self
    }

    pub fn build(self) -> OperatorPair {
        self.pair
    }
}

impl OperatorPair {
    /// Starts a custom pair. Defaults: `Y` is every vector of `space`, empty
    /// kernels, unknown decay, no bounds or adjoints, not invertible.
    pub fn builder(
        name: impl Into<String>,
        space: Space,
        apply_a: impl Fn(&Vector) -> Result<Vector> + Send + Sync + 'static,
        apply_b: impl Fn(&Vector) -> Result<Vector> + Send + Sync + 'static,
    ) -> PairBuilder {
        PairBuilder {
            pair: OperatorPair {
                spec: PairSpec::Custom {
                    custom: name.into(),
                },
                space,
                apply_a: Arc::new(apply_a),
                apply_b: Arc::new(apply_b),
                dense_member: Arc::new(move |v: &Vector| v.space() == space),
                kernel_basis: Arc::new(|_| Vec::new()),
                decay: DecayProfile::Unknown,
                log_b_norm_bound: None,
                b_norm_direct: None,
                adjoint: None,
                b_adjoint: None,
                invertible: false,
                locally_nilpotent: false,
            },
        }
    }

    pub fn spec(&self) -> &PairSpec {
        &self.spec
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn apply_a(&self, v: &Vector) -> Result<Vector> {
        (self.apply_a)(v)
    }

    pub fn apply_b(&self, v: &Vector) -> Result<Vector> {
        (self.apply_b)(v)
    }

    pub fn apply_a_pow(&self, v: &Vector, k: usize) -> Result<Vector> {
        let mut g = v.clone();
        for _ in 0..k {
            if g.is_zero() {
                break;
            }
            g = self.apply_a(&g)?;
        }
        Ok(g)
    }

    pub fn apply_b_pow(&self, v: &Vector, k: usize) -> Result<Vector> {
        let mut g = v.clone();
        for _ in 0..k {
            if g.is_zero() {
                break;
            }
            g = self.apply_b(&g)?;
        }
        Ok(g)
    }

    pub fn is_dense_member(&self, v: &Vector) -> bool {
        (self.dense_member)(v)
    }

    pub fn kernel_basis(&self, n: usize) -> Vec<Vector> {
        (self.kernel_basis)(n)
    }

    pub fn decay_profile(&self) -> DecayProfile {
        self.decay
    }

    /// Analytic bound on `||B^n||`, when known.
    pub fn b_norm_bound(&self, n: usize) -> Option<f64> {
        match &self.b_norm_direct {
            Some(f) => Some(f(n)),
            None => self.log_b_norm_bound.as_ref().map(|f| f(n).exp()),
        }
    }

    pub fn log_b_norm_bound(&self, n: usize) -> Option<f64> {
        self.log_b_norm_bound.as_ref().map(|f| f(n))
    }

    pub fn has_b_norm_bound(&self) -> bool {
        self.log_b_norm_bound.is_some()
    }

    pub fn adjoint_apply(&self, v: &Vector) -> Option<Result<Vector>> {
        self.adjoint.as_ref().map(|f| f(v))
    }

    pub fn has_adjoint(&self) -> bool {
        self.adjoint.is_some()
    }

    pub fn is_invertible(&self) -> bool {
        self.invertible
    }

    /// `Y` is contained in the union of the kernels of the powers of `A`.
    pub fn is_locally_nilpotent(&self) -> bool {
        self.locally_nilpotent
    }

    /// The adjoint `A*`, packaged for the non-hypercyclicity probes.
    pub fn adjoint_view(&self) -> Result<AdjointView> {
        let apply = self.adjoint.clone().ok_or(Error::NoAdjoint)?;
        Ok(AdjointView {
            label: format!("adjoint of A for {}", describe(&self.spec)),
            space: self.space,
            apply,
        })
    }

    /// The adjoint `B*` of the right inverse, i.e. the probe for `B`
    /// promoted to the main operator.
    pub fn right_inverse_adjoint_view(&self) -> Result<AdjointView> {
        let apply = self.b_adjoint.clone().ok_or(Error::NoAdjoint)?;
        Ok(AdjointView {
            label: format!("adjoint of B for {}", describe(&self.spec)),
            space: self.space,
            apply,
        })
    }
}

fn describe(spec: &PairSpec) -> String {
    serde_json::to_string(spec).unwrap_or_else(|_| "pair".into())
}

/// The action of an adjoint operator on representable dual vectors.
#[derive(Clone)]
pub struct AdjointView {
    pub label: String,
    pub space: Space,
    apply: VecMap,
}

impl AdjointView {
    pub fn new(
        label: impl Into<String>,
        space: Space,
        apply: impl Fn(&Vector) -> Result<Vector> + Send + Sync + 'static,
    ) -> Self {
        AdjointView {
            label: label.into(),
            space,
            apply: Arc::new(apply),
        }
    }

    pub fn apply(&self, v: &Vector) -> Result<Vector> {
        (self.apply)(v)
    }
}

impl fmt::Debug for AdjointView {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AdjointView")
            .field("label", &self.label)
            .field("space", &self.space)
            .finish_non_exhaustive()
    }
}

fn one() -> Scalar {
    Scalar::new(1.0, 0.0)
}

fn zero() -> Scalar {
    Scalar::new(0.0, 0.0)
}

fn check_weight(w: Scalar, space: Space) -> Result<()> {
    if !(w.norm() > 1.0) || !w.norm().is_finite() {
        return Err(Error::Param(format!("shift weight needs |w| > 1, got |w| = {}", w.norm())));
    }
    if !space.is_sequence() {
        return Err(Error::Param(format!("shifts act on l_p or c0, not {space}")));
    }
    Ok(())
}

fn unit_vectors(space: Space, n: usize) -> Vec<Vector> {
    (1..=n)
        .map(|k| canonical_basis(space, k).expect("k >= 1"))
        .collect()
}

/// `0 * x` is zero even when `x` overflowed to infinity.
fn weighted(x: Scalar, factor: Scalar) -> Scalar {
    if x == zero() {
        zero()
    } else {
        x * factor
    }
}

/// `A x = w (x_2, x_3, ...)`, `B x = w^-1 (0, x_1, x_2, ...)`.
pub fn make_bounded_shift(w: Scalar, space: Space) -> Result<OperatorPair> {
    check_weight(w, space)?;
    let inv = one() / w;
    let log_w = w.norm().ln();
    let mut pair = OperatorPair::builder("", space, |_| unreachable!(), |_| unreachable!())
        .kernel_basis(move |n| unit_vectors(space, n))
        .decay(DecayProfile::Geometric {
            alpha_hint: 1.0 / w.norm(),
        })
        .log_b_norm_bound(move |k| -(k as f64) * log_w)
        .locally_nilpotent(true)
        .build();
    pair.spec = PairSpec::Family(PairDescriptor::BoundedShift { w, space });
    let abs_w = w.norm();
    pair.b_norm_direct = Some(Arc::new(move |k| abs_w.powf(-(k as f64))));
    pair.apply_a = Arc::new(move |v: &Vector| {
        check_seq(space, v)?;
        Vector::new(space, v.coeffs().iter().skip(1).map(|x| w * x).collect())
    });
    pair.apply_b = Arc::new(move |v: &Vector| {
        check_seq(space, v)?;
        if v.is_zero() {
            return Ok(v.clone());
        }
        let mut out = Vec::with_capacity(v.len() + 1);
        out.push(zero());
        out.extend(v.coeffs().iter().map(|x| inv * x));
        Vector::new(space, out)
    });
    if space.is_l2() {
        let wc = w.conj();
        let inv_c = inv.conj();
        pair.adjoint = Some(Arc::new(move |v: &Vector| {
            check_seq(space, v)?;
            if v.is_zero() {
                return Ok(v.clone());
            }
            let mut out = Vec::with_capacity(v.len() + 1);
            out.push(zero());
            out.extend(v.coeffs().iter().map(|x| wc * x));
            Vector::new(space, out)
        }));
        pair.b_adjoint = Some(Arc::new(move |v: &Vector| {
            check_seq(space, v)?;
            Vector::new(space, v.coeffs().iter().skip(1).map(|x| inv_c * x).collect())
        }));
    }
    Ok(pair)
}

/// `(A x)_k = w^k x_{k+1}`, `(B x)_k = w^-(k-1) x_{k-1}`.
pub fn make_unbounded_shift(w: Scalar, space: Space) -> Result<OperatorPair> {
    check_weight(w, space)?;
    let inv = one() / w;
    let log_w = w.norm().ln();
    let mut pair = OperatorPair::builder("", space, |_| unreachable!(), |_| unreachable!())
        .kernel_basis(move |n| unit_vectors(space, n))
        .decay(DecayProfile::Superexponential)
        .log_b_norm_bound(move |k| {
            let k = k as f64;
            -0.5 * k * (k + 1.0) * log_w
        })
        .locally_nilpotent(true)
        .build();
    pair.spec = PairSpec::Family(PairDescriptor::UnboundedShift { w, space });
    let abs_w = w.norm();
    pair.b_norm_direct = Some(Arc::new(move |k| {
        let k = k as f64;
        abs_w.powf(-0.5 * k * (k + 1.0))
    }));
    pair.apply_a = Arc::new(move |v: &Vector| {
        check_seq(space, v)?;
        let mut factor = one();
        let mut out = Vec::with_capacity(v.len());
        for x in v.coeffs().iter().skip(1) {
            factor *= w;
            out.push(weighted(*x, factor));
        }
        Vector::new(space, out)
    });
    pair.apply_b = Arc::new(move |v: &Vector| {
        check_seq(space, v)?;
        if v.is_zero() {
            return Ok(v.clone());
        }
        let mut factor = one();
        let mut out = Vec::with_capacity(v.len() + 1);
        out.push(zero());
        for x in v.coeffs() {
            factor *= inv;
            out.push(x * factor);
        }
        Vector::new(space, out)
    });
    if space.is_l2() {
        let wc = w.conj();
        let inv_c = inv.conj();
        pair.adjoint = Some(Arc::new(move |v: &Vector| {
            check_seq(space, v)?;
            if v.is_zero() {
                return Ok(v.clone());
            }
            let mut factor = one();
            let mut out = Vec::with_capacity(v.len() + 1);
            out.push(zero());
            for x in v.coeffs() {
                factor *= wc;
                out.push(weighted(*x, factor));
            }
            Vector::new(space, out)
        }));
        pair.b_adjoint = Some(Arc::new(move |v: &Vector| {
            check_seq(space, v)?;
            let mut factor = one();
            let mut out = Vec::with_capacity(v.len());
            for x in v.coeffs().iter().skip(1) {
                factor *= inv_c;
                out.push(x * factor);
            }
            Vector::new(space, out)
        }));
    }
    Ok(pair)
}

fn check_seq(space: Space, v: &Vector) -> Result<()> {
    if v.space() == space {
        Ok(())
    } else {
        Err(Error::SpaceMismatch {
            left: space.to_string(),
            right: v.space().to_string(),
        })
    }
}

/// Lower bound on `ln k!`: exact summation for small `k`, Stirling beyond.
fn ln_factorial_lower(k: usize) -> f64 {
    if k <= 170 {
        (2..=k).map(|i| (i as f64).ln()).sum()
    } else {
        let k = k as f64;
        k * k.ln() - k + 0.5 * (2.0 * std::f64::consts::PI * k).ln()
    }
}

fn antiderivative(coeffs: &[Scalar]) -> Vec<Scalar> {
    let mut out = Vec::with_capacity(coeffs.len() + 1);
    out.push(zero());
    out.extend(
        coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c / (k as f64 + 1.0)),
    );
    out
}

/// `D f = f'` with the Volterra operator `[B f](x) = int_a^x f(t) dt`.
pub fn make_differentiation(a: f64, b: f64) -> Result<OperatorPair> {
    let space = Space::poly(a, b)?;
    let log_len = (b - a).ln();
    let mut pair = OperatorPair::builder("", space, |_| unreachable!(), |_| unreachable!())
        .kernel_basis(move |n| {
            (1..=n)
                .map(|k| canonical_basis(space, k).expect("k >= 1"))
                .collect()
        })
        .decay(DecayProfile::Superexponential)
        .log_b_norm_bound(move |k| k as f64 * log_len - ln_factorial_lower(k))
        .locally_nilpotent(true)
        .build();
    pair.spec = PairSpec::Family(PairDescriptor::Differentiation { a, b });
    pair.apply_a = Arc::new(move |v: &Vector| {
        check_seq(space, v)?;
        let out = v
            .coeffs()
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * k as f64)
            .collect();
        Vector::new(space, out)
    });
    pair.apply_b = Arc::new(move |v: &Vector| {
        check_seq(space, v)?;
        if v.is_zero() {
            return Ok(v.clone());
        }
        let mut out = antiderivative(v.coeffs());
        let at_a = eval_poly_unchecked(&out, a);
        out[0] -= at_a;
        Vector::new(space, out)
    });
    // int_x^b g(t) dt, the adjoint of the Volterra operator under the
    // integral pairing; dual elements are represented by polynomial densities.
    pair.b_adjoint = Some(Arc::new(move |v: &Vector| {
        check_seq(space, v)?;
        if v.is_zero() {
            return Ok(v.clone());
        }
        let mut out: Vec<Scalar> = antiderivative(v.coeffs()).into_iter().map(|c| -c).collect();
        let at_b = eval_poly_unchecked(&out, b);
        out[0] -= at_b;
        Vector::new(space, out)
    }));
    Ok(pair)
}

fn iterate(map: VecMap, n: usize) -> VecMap {
    Arc::new(move |v: &Vector| {
        let mut g = v.clone();
        for _ in 0..n {
            if g.is_zero() {
                break;
            }
            g = map(&g)?;
        }
        Ok(g)
    })
}

/// `(A^n, B^n)` over the same `Y`.
pub fn power_pair(p: &OperatorPair, n: usize) -> Result<OperatorPair> {
    if n == 0 {
        return Err(Error::Param("power must be >= 1".into()));
    }
    let base_kernel = p.kernel_basis.clone();
    let decay = match p.decay {
        DecayProfile::Geometric { alpha_hint } => DecayProfile::Geometric {
            alpha_hint: alpha_hint.powi(n as i32),
        },
        other => other,
    };
    Ok(OperatorPair {
        spec: PairSpec::Transform(Transform::Power {
            n,
            base: Box::new(p.spec.clone()),
        }),
        space: p.space,
        apply_a: iterate(p.apply_a.clone(), n),
        apply_b: iterate(p.apply_b.clone(), n),
        dense_member: p.dense_member.clone(),
        kernel_basis: Arc::new(move |m| base_kernel(m * n)),
        decay,
        log_b_norm_bound: p.log_b_norm_bound.clone().map(|f| {
            let g: LogBoundFn = Arc::new(move |m| f(m * n));
            g
        }),
        b_norm_direct: p.b_norm_direct.clone().map(|f| {
            let g: LogBoundFn = Arc::new(move |m| f(m * n));
            g
        }),
        adjoint: p.adjoint.clone().map(|f| iterate(f, n)),
        b_adjoint: p.b_adjoint.clone().map(|f| iterate(f, n)),
        invertible: p.invertible,
        locally_nilpotent: p.locally_nilpotent,
    })
}

fn scaled(map: VecMap, s: Scalar) -> VecMap {
    Arc::new(move |v: &Vector| map(v)?.scale(s))
}

/// `(lambda A, lambda^-1 B)` over the same `Y`.
pub fn multiple_pair(p: &OperatorPair, lambda: Scalar) -> Result<OperatorPair> {
    let modulus = lambda.norm();
    if modulus == 0.0 || !modulus.is_finite() {
        return Err(Error::Param("multiple needs lambda != 0".into()));
    }
    let inv = one() / lambda;
    let decay = match p.decay {
        DecayProfile::Geometric { alpha_hint } => {
            // A-side rates scale by |lambda|, B-side by 1/|lambda|; the A side
            // is irrelevant when A is nilpotent on each element of Y.
            let alpha = if p.locally_nilpotent {
                alpha_hint / modulus
            } else {
                alpha_hint * modulus.max(1.0 / modulus)
            };
            if alpha < 1.0 {
                DecayProfile::Geometric { alpha_hint: alpha }
            } else {
                DecayProfile::Unknown
            }
        }
        other => other,
    };
    let log_mod = modulus.ln();
    Ok(OperatorPair {
        spec: PairSpec::Transform(Transform::Multiple {
            lambda,
            base: Box::new(p.spec.clone()),
        }),
        space: p.space,
        apply_a: scaled(p.apply_a.clone(), lambda),
        apply_b: scaled(p.apply_b.clone(), inv),
        dense_member: p.dense_member.clone(),
        kernel_basis: p.kernel_basis.clone(),
        decay,
        log_b_norm_bound: p.log_b_norm_bound.clone().map(|f| {
            let g: LogBoundFn = Arc::new(move |k| f(k) - k as f64 * log_mod);
            g
        }),
        b_norm_direct: p.b_norm_direct.clone().map(|f| {
            let g: LogBoundFn = Arc::new(move |k| f(k) / modulus.powf(k as f64));
            g
        }),
        adjoint: p.adjoint.clone().map(|f| scaled(f, lambda.conj())),
        b_adjoint: p.b_adjoint.clone().map(|f| scaled(f, inv.conj())),
        invertible: p.invertible,
        locally_nilpotent: p.locally_nilpotent,
    })
}

/// Exchanges the roles of `A` and `B`; requires `B` to be a two-sided inverse.
pub fn swap_pair(p: &OperatorPair) -> Result<OperatorPair> {
    if !p.invertible {
        return Err(Error::NotInvertible);
    }
    Ok(OperatorPair {
        spec: PairSpec::Transform(Transform::Swap {
            base: Box::new(p.spec.clone()),
        }),
        space: p.space,
        apply_a: p.apply_b.clone(),
        apply_b: p.apply_a.clone(),
        dense_member: p.dense_member.clone(),
        // B is injective, so ker B^n = {0}.
        kernel_basis: Arc::new(|_| Vec::new()),
        decay: p.decay,
        log_b_norm_bound: None,
        b_norm_direct: None,
        adjoint: p.b_adjoint.clone(),
        b_adjoint: p.adjoint.clone(),
        invertible: true,
        locally_nilpotent: false,
    })
}
