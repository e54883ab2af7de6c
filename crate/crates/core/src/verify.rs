//! Randomized identity suite tying every quantity back to the relative
//! u-entropy.
//!
//! Each trial draws `(p, q, u)` from a per-trial ChaCha stream, so trials are
//! reproducible individually and the aggregate does not depend on
//! evaluation order.

use std::fmt;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::discrete::{h_u, n_u, relative_h, relative_n};
use crate::error::Result;
use crate::extreal::ExtReal;
use crate::prob::ProbVector;
use crate::related::{
    arimoto, arimoto_via_entropy, fhs_entropy, fhs_entropy_by_definition, fhs_relative,
    fhs_relative_by_definition, frittelli, renyi, shannon, sharma_mittal, OrderAlpha,
};
use crate::solver::SolveConfig;
use crate::utility::UtilitySpec;

/// The checked identities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Identity {
    /// Primal and dual formulas for `n_u(p)` agree.
    PrimalDual,
    /// `D_u(p||q)` from its definition equals `u(e^{H_u(p||q)}) - u(1)`.
    FhsRelative,
    /// FHS U-entropy by its definition equals the rescaled-utility route.
    FhsEntropy,
    /// `H^A_{-u}(p) = -n_u(p) = -u(e^{-h_u(p)})`.
    Arimoto,
    /// `Delta_u(q, p) = N_u(p||q)`.
    FrittelliDelta,
    /// `delta_u(q, p) = e^{H_u(p||q)} - 1`.
    FrittelliDistance,
    /// Shannon/KL for log utility, Renyi for isoelastic utilities.
    ClosedForm,
    /// `D_u(p||q)` equals the Sharma-Mittal closed form for isoelastic `u`.
    SharmaMittal,
}

impl Identity {
    pub const ALL: [Identity; 8] = [
        Identity::PrimalDual,
        Identity::FhsRelative,
        Identity::FhsEntropy,
        Identity::Arimoto,
        Identity::FrittelliDelta,
        Identity::FrittelliDistance,
        Identity::ClosedForm,
        Identity::SharmaMittal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Identity::PrimalDual => "primal_dual",
            Identity::FhsRelative => "fhs_relative",
            Identity::FhsEntropy => "fhs_entropy",
            Identity::Arimoto => "arimoto",
            Identity::FrittelliDelta => "frittelli_delta",
            Identity::FrittelliDistance => "frittelli_distance",
            Identity::ClosedForm => "closed_form",
            Identity::SharmaMittal => "sharma_mittal",
        }
    }

    pub fn default_tolerance(self) -> f64 {
        match self {
            Identity::FrittelliDelta | Identity::FrittelliDistance => 1e-8,
            _ => 1e-9,
        }
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

/// Discrepancy between two extended reals: absolute up to magnitude 1,
/// relative beyond. Equal infinities agree; anything involving NaN or a
/// finite/infinite mismatch is `inf`.
pub fn deviation(a: ExtReal, b: ExtReal) -> f64 {
    match (a, b) {
        (ExtReal::Finite(x), ExtReal::Finite(y)) => {
            let d = (x - y).abs() / 1f64.max(x.abs()).max(y.abs());
            if d.is_nan() {
                f64::INFINITY
            } else {
                d
            }
        }
        (x, y) if x == y => 0.0,
        _ => f64::INFINITY,
    }
}

/// One failed comparison, with everything needed to reproduce it.
#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    pub identity: Identity,
    pub trial: usize,
    pub utility: String,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub lhs: ExtReal,
    pub rhs: ExtReal,
    pub deviation: f64,
    pub error: Option<String>,
}

/// Aggregate over all trials for one identity.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityStat {
    pub identity: Identity,
    pub checks: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
}

impl IdentityStat {
    pub fn passed(&self) -> bool {
        self.max_deviation < self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub seed: u64,
    pub trials: usize,
    pub stats: Vec<IdentityStat>,
    pub failures: Vec<Counterexample>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.stats.iter().all(IdentityStat::passed)
    }
}

/// The default utility panel: log and isoelastic orders
/// `{-2, -1, -0.5, 0.25, 0.5, 0.75}`.
pub fn default_utilities() -> Vec<UtilitySpec> {
    let mut us = vec![UtilitySpec::log()];
    for g in [-2.0, -1.0, -0.5, 0.25, 0.5, 0.75] {
        us.push(UtilitySpec::isoelastic(g).expect("valid gamma"));
    }
    us
}

/// Dirichlet(1, .., 1) draw in `S_k`.
pub fn random_simplex<R: Rng + ?Sized>(rng: &mut R, k: usize) -> ProbVector {
    let w: Vec<f64> = (0..k).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    ProbVector::with_renormalize(w, true).expect("positive mass")
}

/// Sets `p[index] = 0` and renormalizes.
pub fn zero_atom(p: &ProbVector, index: usize) -> ProbVector {
    let mut w = p.as_slice().to_vec();
    w[index] = 0.0;
    ProbVector::with_renormalize(w, true).expect("another atom carries mass")
}

/// A random instance of the suite.
#[derive(Debug, Clone)]
pub struct Draw {
    pub utility: UtilitySpec,
    pub p: ProbVector,
    pub q: ProbVector,
}

/// Draw for `trial`: `k` in `2..=6`, Dirichlet `p` and `q`, occasionally with
/// a zero atom in either (which creates singular mass).
pub fn draw(seed: u64, trial: usize, utilities: &[UtilitySpec]) -> Draw {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    let utility = utilities[rng.gen_range(0..utilities.len())].clone();
    let k = rng.gen_range(2..=6);
    let mut p = random_simplex(&mut rng, k);
    let mut q = random_simplex(&mut rng, k);
    if rng.gen_bool(0.2) {
        p = zero_atom(&p, rng.gen_range(0..k));
    }
    if rng.gen_bool(0.3) {
        q = zero_atom(&q, rng.gen_range(0..k));
    }
    Draw { utility, p, q }
}

type Comparison = (Identity, ExtReal, ExtReal, Option<String>);

#[derive(Default)]
struct Recorder {
    out: Vec<Comparison>,
}

impl Recorder {
    fn check(&mut self, identity: Identity, pair: Result<(ExtReal, ExtReal)>) {
        match pair {
            Ok((lhs, rhs)) => self.out.push((identity, lhs, rhs, None)),
            Err(e) => self.out.push((
                identity,
                ExtReal::Finite(f64::NAN),
                ExtReal::Finite(f64::NAN),
                Some(e.to_string()),
            )),
        }
    }
}

/// Closed-form entropies for the affine core of `u`, if it is log or
/// isoelastic: `(h(p), H(p||q))`.
fn closed_forms(u: &UtilitySpec, p: &ProbVector, q: &ProbVector) -> Option<Result<(ExtReal, ExtReal)>> {
    let core = u.affine_core();
    if core.is_log() {
        return Some(shannon(p, None).and_then(|h| Ok((h, shannon(p, Some(q))?))));
    }
    let gamma = core.isoelastic_gamma()?;
    Some(OrderAlpha::from_gamma(gamma).and_then(|a| Ok((renyi(a, p, None)?, renyi(a, p, Some(q))?))))
}

fn run_trial(d: &Draw, cfg: &SolveConfig) -> Vec<Comparison> {
    let (u, p, q) = (&d.utility, &d.p, &d.q);
    let mut rec = Recorder::default();

    rec.check(
        Identity::PrimalDual,
        n_u(u, p, cfg).map(|s| (s.value, ExtReal::Finite(s.dual_value))),
    );

    let p_ac_q = p.is_abs_continuous_wrt(q).unwrap_or(false);
    if p_ac_q {
        rec.check(
            Identity::FhsRelative,
            fhs_relative_by_definition(u, p, q, cfg)
                .and_then(|(direct, _)| Ok((direct, fhs_relative(u, p, q, cfg)?))),
        );
    }

    rec.check(
        Identity::FhsEntropy,
        fhs_entropy_by_definition(u, p, cfg).and_then(|a| Ok((a, fhs_entropy(u, p, cfg)?))),
    );

    rec.check(
        Identity::Arimoto,
        arimoto(u, p, true, cfg).and_then(|a| {
            let normalized = crate::utility::transform(
                u,
                crate::utility::Transform::Affine {
                    a: 1.0,
                    b: -u.eval(1.0),
                },
            )?;
            Ok((a, arimoto_via_entropy(&normalized, p, cfg)?))
        }),
    );

    // Frittelli with mu = q, nu = p requires q << p
    if q.is_abs_continuous_wrt(p).unwrap_or(false) {
        match frittelli(u, q, p, cfg) {
            Ok(f) => {
                rec.check(
                    Identity::FrittelliDelta,
                    relative_n(u, p, q, cfg).map(|n| (f.delta_cap, n.value)),
                );
                rec.check(
                    Identity::FrittelliDistance,
                    relative_h(u, p, q, cfg).map(|h| {
                        let expected = match h.entropy {
                            ExtReal::Finite(x) => ExtReal::from_f64(x.exp_m1()),
                            other => other,
                        };
                        (f.distance, expected)
                    }),
                );
            }
            Err(e) => {
                rec.check(Identity::FrittelliDelta, Err(e.clone()));
                rec.check(Identity::FrittelliDistance, Err(e));
            }
        }
    }

    if let Some(closed) = closed_forms(u, p, q) {
        match closed {
            Ok((h_closed, rel_closed)) => {
                rec.check(
                    Identity::ClosedForm,
                    h_u(u, p, cfg).map(|r| (r.entropy, h_closed)),
                );
                rec.check(
                    Identity::ClosedForm,
                    relative_h(u, p, q, cfg).map(|r| (r.entropy, rel_closed)),
                );
            }
            Err(e) => rec.check(Identity::ClosedForm, Err(e)),
        }
    }

    if p_ac_q {
        if let Some(gamma) = u.isoelastic_gamma() {
            rec.check(
                Identity::SharmaMittal,
                OrderAlpha::from_gamma(gamma).and_then(|a| {
                    Ok((fhs_relative(u, p, q, cfg)?, sharma_mittal(a, p, q)?))
                }),
            );
        }
    }

    rec.out
}

/// Runs `trials` random draws and aggregates per-identity deviations.
///
/// `tolerance` overrides every identity's default tolerance when given.
pub fn run_identity_suite(
    seed: u64,
    trials: usize,
    utilities: &[UtilitySpec],
    tolerance: Option<f64>,
    cfg: &SolveConfig,
) -> VerifyReport {
    let utilities: Vec<UtilitySpec> = if utilities.is_empty() {
        default_utilities()
    } else {
        utilities.to_vec()
    };
    let mut stats: Vec<IdentityStat> = Identity::ALL
        .iter()
        .map(|&identity| IdentityStat {
            identity,
            checks: 0,
            max_deviation: 0.0,
            tolerance: tolerance.unwrap_or(identity.default_tolerance()),
        })
        .collect();
    let mut failures = Vec::new();

    for trial in 0..trials {
        let d = draw(seed, trial, &utilities);
        for (identity, lhs, rhs, error) in run_trial(&d, cfg) {
            let dev = if error.is_some() {
                f64::INFINITY
            } else {
                deviation(lhs, rhs)
            };
            let stat = stats
                .iter_mut()
                .find(|s| s.identity == identity)
                .expect("every identity has a stat");
            stat.checks += 1;
            stat.max_deviation = stat.max_deviation.max(dev);
            if !(dev < stat.tolerance) {
                failures.push(Counterexample {
                    identity,
                    trial,
                    utility: d.utility.label().to_string(),
                    p: d.p.as_slice().to_vec(),
                    q: d.q.as_slice().to_vec(),
                    lhs,
                    rhs,
                    deviation: dev,
                    error,
                });
            }
        }
    }
    VerifyReport {
        seed,
        trials,
        stats,
        failures,
    }
}
