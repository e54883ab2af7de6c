//! Utility functions on `(0, inf)` and their derived functionals.
//!
//! A utility is strictly increasing, strictly concave and satisfies the Inada
//! conditions `u'(0+) = inf`, `u'(inf) = 0`. Besides `u` itself the entropy
//! machinery needs the inverse `u^-1`, the inverse marginal `I = (u')^-1`, the
//! limits `u(0)`, `u(inf)` and the convex dual
//!
//! ```text
//! u*(y) = sup_{x > 0} (u(x) - y x) = u(I(y)) - y I(y),   u*(0) = u(inf),  u*(inf) = u(0).
//! ```
//!
//! Built-in families carry closed forms for all of these. Custom utilities
//! only need `u` and `u'`; the inverses are synthesized by bisection.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::extreal::ExtReal;

/// Shared scalar function used by custom utilities.
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Relative tolerance of synthesized inverses.
pub const INVERSE_REL_TOL: f64 = 1e-12;

const INVERSE_BRACKET: (f64, f64) = (1e-12, 1e12);

/// Order `gamma` of the isoelastic utility `(x^gamma - 1) / gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsoelasticParams {
    gamma: f64,
}

impl IsoelasticParams {
    pub fn new(gamma: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma >= 1.0 || gamma == 0.0 {
            return Err(Error::InvalidGamma(gamma));
        }
        Ok(IsoelasticParams { gamma })
    }

    pub fn gamma(self) -> f64 {
        self.gamma
    }
}

/// Built-in utility families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Log,
    Isoelastic,
}

/// Transformations that map a utility to another utility.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Transform {
    /// `a u + b`, `a > 0`.
    Affine { a: f64, b: f64 },
    /// `x -> u(k x)`, `k > 0`.
    Rescale { k: f64 },
}

#[derive(Clone)]
struct CustomFns {
    eval: ScalarFn,
    marginal: ScalarFn,
    inverse: Option<ScalarFn>,
    inverse_marginal: Option<ScalarFn>,
    u_at_zero: ExtReal,
    u_at_infinity: ExtReal,
}

#[derive(Clone)]
enum Kind {
    Log,
    Isoelastic(f64),
    Affine {
        a: f64,
        b: f64,
        inner: Arc<UtilitySpec>,
    },
    Rescale {
        k: f64,
        inner: Arc<UtilitySpec>,
    },
    Custom(Arc<CustomFns>),
}

/// An immutable utility function together with its derived maps.
#[derive(Clone)]
pub struct UtilitySpec {
    kind: Kind,
    label: String,
}

impl fmt::Debug for UtilitySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("UtilitySpec").field("label", &self.label).finish()
    }
}

/// Builds a closed-form built-in utility.
pub fn make_builtin(family: Family, params: Option<IsoelasticParams>) -> Result<UtilitySpec> {
    match (family, params) {
        (Family::Log, _) => Ok(UtilitySpec::log()),
        (Family::Isoelastic, Some(p)) => Ok(UtilitySpec {
            kind: Kind::Isoelastic(p.gamma),
            label: format!("iso:{}", p.gamma),
        }),
        (Family::Isoelastic, None) => Err(Error::InvalidGamma(0.0)),
    }
}

/// Applies an affine map or a rescaling to `base`.
pub fn transform(base: &UtilitySpec, kind: Transform) -> Result<UtilitySpec> {
    match kind {
        Transform::Affine { a, b } => {
            if !(a > 0.0 && a.is_finite()) {
                return Err(Error::InvalidScale { name: "a", value: a });
            }
            if !b.is_finite() {
                return Err(Error::InvalidScale { name: "b", value: b });
            }
            Ok(UtilitySpec {
                label: format!("affine:{a}:{b}:{}", base.label),
                kind: Kind::Affine {
                    a,
                    b,
                    inner: Arc::new(base.clone()),
                },
            })
        }
        Transform::Rescale { k } => {
            if !(k > 0.0 && k.is_finite()) {
                return Err(Error::InvalidScale { name: "k", value: k });
            }
            Ok(UtilitySpec {
                label: format!("rescale:{k}:{}", base.label),
                kind: Kind::Rescale {
                    k,
                    inner: Arc::new(base.clone()),
                },
            })
        }
    }
}

impl UtilitySpec {
    /// `u(x) = ln x`.
    pub fn log() -> Self {
        UtilitySpec {
            kind: Kind::Log,
            label: "log".to_string(),
        }
    }

    /// `u(x) = (x^gamma - 1) / gamma`.
    pub fn isoelastic(gamma: f64) -> Result<Self> {
        make_builtin(Family::Isoelastic, Some(IsoelasticParams::new(gamma)?))
    }

    /// A user-supplied utility given only by `u` and `u'` and its limits at
    /// the ends of `(0, inf)`. Inverses are synthesized numerically unless
    /// attached with [`UtilitySpec::with_inverse`] or
    /// [`UtilitySpec::with_inverse_marginal`].
    pub fn custom<F, G>(
        label: impl Into<String>,
        eval: F,
        marginal: G,
        u_at_zero: ExtReal,
        u_at_infinity: ExtReal,
    ) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        UtilitySpec {
            kind: Kind::Custom(Arc::new(CustomFns {
                eval: Arc::new(eval),
                marginal: Arc::new(marginal),
                inverse: None,
                inverse_marginal: None,
                u_at_zero,
                u_at_infinity,
            })),
            label: label.into(),
        }
    }

    /// Attaches a closed-form inverse to a custom utility. No effect on
    /// built-ins.
    pub fn with_inverse<F>(mut self, inverse: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if let Kind::Custom(fns) = &mut self.kind {
            Arc::make_mut(fns).inverse = Some(Arc::new(inverse));
        }
        self
    }

    /// Attaches a closed-form inverse marginal to a custom utility.
    pub fn with_inverse_marginal<F>(mut self, inverse_marginal: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if let Kind::Custom(fns) = &mut self.kind {
            Arc::make_mut(fns).inverse_marginal = Some(Arc::new(inverse_marginal));
        }
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// The isoelastic order if this is a plain isoelastic utility.
    pub fn isoelastic_gamma(&self) -> Option<f64> {
        match self.kind {
            Kind::Isoelastic(g) => Some(g),
            _ => None,
        }
    }

    pub fn is_log(&self) -> bool {
        matches!(self.kind, Kind::Log)
    }

    /// Strips affine wrappers, which leave every entropy unchanged.
    pub fn affine_core(&self) -> &UtilitySpec {
        match &self.kind {
            Kind::Affine { inner, .. } => inner.affine_core(),
            _ => self,
        }
    }

    /// `u(x)`.
    pub fn eval(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::Log => x.ln(),
            Kind::Isoelastic(g) => (g * x.ln()).exp_m1() / g,
            Kind::Affine { a, b, inner } => a * inner.eval(x) + b,
            Kind::Rescale { k, inner } => inner.eval(k * x),
            Kind::Custom(fns) => (fns.eval)(x),
        }
    }

    /// `u(e^t)`, evaluated without forming `e^t` where a closed form allows.
    pub fn eval_exp(&self, t: f64) -> f64 {
        match &self.kind {
            Kind::Log => t,
            Kind::Isoelastic(g) => (g * t).exp_m1() / g,
            Kind::Affine { a, b, inner } => a * inner.eval_exp(t) + b,
            Kind::Rescale { k, inner } => inner.eval_exp(t + k.ln()),
            Kind::Custom(fns) => (fns.eval)(t.exp()),
        }
    }

    /// `u'(x)`.
    pub fn marginal(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::Log => 1.0 / x,
            Kind::Isoelastic(g) => x.powf(g - 1.0),
            Kind::Affine { a, inner, .. } => a * inner.marginal(x),
            Kind::Rescale { k, inner } => k * inner.marginal(k * x),
            Kind::Custom(fns) => (fns.marginal)(x),
        }
    }

    /// `u^-1(y)`, extended by `0` below `u(0)` and `inf` above `u(inf)`.
    pub fn inverse(&self, y: f64) -> f64 {
        match &self.kind {
            Kind::Log => y.exp(),
            Kind::Isoelastic(g) => {
                let base = g * y;
                if base <= -1.0 {
                    if *g < 0.0 {
                        f64::INFINITY
                    } else {
                        0.0
                    }
                } else {
                    (base.ln_1p() / g).exp()
                }
            }
            Kind::Affine { a, b, inner } => inner.inverse((y - b) / a),
            Kind::Rescale { k, inner } => inner.inverse(y) / k,
            Kind::Custom(fns) => match &fns.inverse {
                Some(inv) => inv(y),
                None => {
                    let eval = &fns.eval;
                    if ExtReal::Finite(y) >= fns.u_at_infinity {
                        f64::INFINITY
                    } else if ExtReal::Finite(y) <= fns.u_at_zero {
                        0.0
                    } else {
                        invert_increasing(|x| eval(x), y)
                    }
                }
            },
        }
    }

    /// `ln u^-1(y)`, with the same boundary extension as [`UtilitySpec::inverse`].
    pub fn log_inverse(&self, y: f64) -> f64 {
        match &self.kind {
            Kind::Log => y,
            Kind::Isoelastic(g) => {
                let base = g * y;
                if base <= -1.0 {
                    if *g < 0.0 {
                        f64::INFINITY
                    } else {
                        f64::NEG_INFINITY
                    }
                } else {
                    base.ln_1p() / g
                }
            }
            Kind::Affine { a, b, inner } => inner.log_inverse((y - b) / a),
            Kind::Rescale { k, inner } => inner.log_inverse(y) - k.ln(),
            Kind::Custom(_) => self.inverse(y).ln(),
        }
    }

    /// `I(y) = (u')^-1(y)` for `y > 0`.
    pub fn inverse_marginal(&self, y: f64) -> f64 {
        match &self.kind {
            Kind::Log => 1.0 / y,
            Kind::Isoelastic(g) => y.powf(1.0 / (g - 1.0)),
            Kind::Affine { a, inner, .. } => inner.inverse_marginal(y / a),
            Kind::Rescale { k, inner } => inner.inverse_marginal(y / k) / k,
            Kind::Custom(fns) => match &fns.inverse_marginal {
                Some(inv) => inv(y),
                None => {
                    let marginal = &fns.marginal;
                    invert_increasing(|x| -marginal(x), -y)
                }
            },
        }
    }

    /// `u(0) = lim_{x -> 0+} u(x)`.
    pub fn u_at_zero(&self) -> ExtReal {
        match &self.kind {
            Kind::Log => ExtReal::NegInf,
            Kind::Isoelastic(g) if *g > 0.0 => ExtReal::Finite(-1.0 / g),
            Kind::Isoelastic(_) => ExtReal::NegInf,
            Kind::Affine { a, b, inner } => inner.u_at_zero().affine(*a, *b),
            Kind::Rescale { inner, .. } => inner.u_at_zero(),
            Kind::Custom(fns) => fns.u_at_zero,
        }
    }

    /// `u(inf) = lim_{x -> inf} u(x)`.
    pub fn u_at_infinity(&self) -> ExtReal {
        match &self.kind {
            Kind::Log => ExtReal::PosInf,
            Kind::Isoelastic(g) if *g < 0.0 => ExtReal::Finite(-1.0 / g),
            Kind::Isoelastic(_) => ExtReal::PosInf,
            Kind::Affine { a, b, inner } => inner.u_at_infinity().affine(*a, *b),
            Kind::Rescale { inner, .. } => inner.u_at_infinity(),
            Kind::Custom(fns) => fns.u_at_infinity,
        }
    }

    /// `u*(y)` for finite `y > 0`.
    pub fn dual(&self, y: f64) -> f64 {
        let x = self.inverse_marginal(y);
        self.eval(x) - y * x
    }
}

/// Solves `f(x) = y` for increasing `f` on `(0, inf)` by bisection on an
/// expanding bracket. Returns NaN when no bracket is found.
fn invert_increasing(f: impl Fn(f64) -> f64, y: f64) -> f64 {
    let (mut lo, mut hi) = INVERSE_BRACKET;
    while f(lo) > y {
        lo *= 0.5;
        if lo < f64::MIN_POSITIVE {
            return f64::NAN;
        }
    }
    while f(hi) < y {
        hi *= 2.0;
        if !hi.is_finite() {
            return f64::NAN;
        }
    }
    for _ in 0..2000 {
        if hi - lo <= INVERSE_REL_TOL * lo {
            break;
        }
        // geometric midpoint while the bracket spans orders of magnitude
        let mid = if hi > 4.0 * lo {
            (lo * hi).sqrt()
        } else {
            0.5 * (lo + hi)
        };
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(mid);
        if v == y {
            return mid;
        }
        if v < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `u*(y)` on `[0, inf]` with `u*(0) = u(inf)` and `u*(inf) = u(0)`.
pub fn convex_dual(u: &UtilitySpec, y: ExtReal) -> Result<ExtReal> {
    match y {
        ExtReal::NegInf => Err(Error::NegativeArgument(f64::NEG_INFINITY)),
        ExtReal::PosInf => Ok(u.u_at_zero()),
        ExtReal::Finite(v) if v < 0.0 || v.is_nan() => Err(Error::NegativeArgument(v)),
        ExtReal::Finite(v) if v == 0.0 => Ok(u.u_at_infinity()),
        ExtReal::Finite(v) => Ok(ExtReal::from_f64(u.dual(v))),
    }
}

/// Asymptotic elasticity `limsup_{x -> inf} x u'(x) / u(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Elasticity {
    pub value: f64,
    /// `false` when the value is a numerical estimate.
    pub exact: bool,
    /// Set when `u` changes sign on the sampling grid or is not positive on
    /// its tail, where the ratio is not informative.
    pub low_confidence: bool,
}

/// Exact for built-ins; otherwise estimated on the grid `x = 10^j`,
/// `j = 1..=12`, as the largest ratio over the last three grid points.
pub fn asymptotic_elasticity(u: &UtilitySpec) -> Elasticity {
    match u.kind {
        Kind::Log => Elasticity {
            value: 0.0,
            exact: true,
            low_confidence: false,
        },
        Kind::Isoelastic(g) => Elasticity {
            value: g.max(0.0),
            exact: true,
            low_confidence: false,
        },
        _ => {
            let grid: Vec<f64> = (1..=12).map(|j| 10f64.powi(j)).collect();
            let values: Vec<f64> = grid.iter().map(|&x| u.eval(x)).collect();
            let changes_sign = values.windows(2).any(|w| (w[0] > 0.0) != (w[1] > 0.0));
            let tail = grid.len() - 3;
            let tail_nonpositive = values[tail..].iter().any(|&v| v <= 0.0);
            let value = grid[tail..]
                .iter()
                .zip(&values[tail..])
                .map(|(&x, &v)| x * u.marginal(x) / v)
                .fold(f64::NEG_INFINITY, f64::max);
            Elasticity {
                value,
                exact: false,
                low_confidence: changes_sign || tail_nonpositive,
            }
        }
    }
}

/// A single failed check in an [`InadaReport`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NotIncreasing { x0: f64, x1: f64 },
    NotConcave { x0: f64, x1: f64 },
    MarginalNotDecreasing { x0: f64, x1: f64 },
    NonPositiveMarginal { x: f64 },
    InverseRoundTrip { x: f64, rel_error: f64 },
    InverseMarginalRoundTrip { x: f64, rel_error: f64 },
}

/// Result of [`check_inada`]; empty means every sampled check passed.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct InadaReport {
    pub violations: Vec<Violation>,
}

impl InadaReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Round-trip tolerance used by [`check_inada`].
pub const ROUND_TRIP_TOL: f64 = 1e-8;

/// Samples monotonicity, strict concavity (midpoint above chord), decreasing
/// marginal and inverse round trips on `grid`.
pub fn check_inada(u: &UtilitySpec, grid: &[f64]) -> Result<InadaReport> {
    if grid.len() < 3 {
        return Err(Error::BadGrid(format!(
            "need at least 3 points, got {}",
            grid.len()
        )));
    }
    if let Some(x) = grid.iter().find(|x| !(**x > 0.0 && x.is_finite())) {
        return Err(Error::BadGrid(format!("entry {x} is not a positive real")));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::BadGrid("grid is not strictly increasing".into()));
    }

    let mut violations = Vec::new();
    for w in grid.windows(2) {
        let (x0, x1) = (w[0], w[1]);
        let (u0, u1) = (u.eval(x0), u.eval(x1));
        if !(u0 < u1) {
            violations.push(Violation::NotIncreasing { x0, x1 });
        }
        if !(u.eval(0.5 * (x0 + x1)) > 0.5 * (u0 + u1)) {
            violations.push(Violation::NotConcave { x0, x1 });
        }
        if !(u.marginal(x0) > u.marginal(x1)) {
            violations.push(Violation::MarginalNotDecreasing { x0, x1 });
        }
    }
    for &x in grid {
        let m = u.marginal(x);
        if !(m > 0.0) {
            violations.push(Violation::NonPositiveMarginal { x });
        }
        let rel_error = ((u.inverse(u.eval(x)) - x) / x).abs();
        if !(rel_error <= ROUND_TRIP_TOL) {
            violations.push(Violation::InverseRoundTrip { x, rel_error });
        }
        let rel_error = ((u.inverse_marginal(m) - x) / x).abs();
        if !(rel_error <= ROUND_TRIP_TOL) {
            violations.push(Violation::InverseMarginalRoundTrip { x, rel_error });
        }
    }
    Ok(InadaReport { violations })
}
