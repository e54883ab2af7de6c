//! Discrete u-entropy and relative u-entropy on finite probability spaces.
//!
//! For `p` in `S_k` the optimal expected utility of a unit budget is
//!
//! ```text
//! n_u(p) = sup_{w in S_k} sum_i u(w_i) p_i
//!        = sum_i u(I(L/p_i)) p_i = sum_i u*(L/p_i) p_i + L,
//! ```
//!
//! where the multiplier `L` solves `sum_i I(L/p_i) = 1`. The u-entropy is
//! `h_u(p) = -ln u^-1(n_u(p))`. Against a reference `q` the budget constraint
//! becomes `sum_i w_i q_i = 1` and `H_u(p||q) = ln u^-1(N_u(p||q))`; the part of
//! `p` singular to `q` can absorb unbounded wealth and contributes
//! `mass * u(inf)`.
//!
//! Zero atoms follow `I(inf) = 0` and `0 * (+-inf) = 0`: they receive no
//! wealth and add nothing to either sum.

use std::thread;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::prob::{check_same_len, ProbVector};
use crate::solver::{solve_budget, solve_lambda, BudgetTerm, LambdaSolution, SolveConfig};
use crate::utility::UtilitySpec;

/// Relative agreement required between the primal and dual value formulas.
pub const PRIMAL_DUAL_TOL: f64 = 1e-9;

/// Round-off below zero that is clamped away from entropies.
const NEGATIVE_CLAMP: f64 = 1e-12;

/// Optimal value of the discrete allocation problem.
#[derive(Debug, Clone, PartialEq)]
pub struct NuSolution {
    /// `sum_i u(w_i*) p_i`.
    pub value: ExtReal,
    /// `sum_i u*(L/p_i) p_i + L`.
    pub dual_value: f64,
    pub lambda: LambdaSolution,
    /// `w_i* = I(L/p_i)`, zero on null atoms.
    pub allocation: Vec<f64>,
}

/// Scalar value of an entropy computation together with its diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyReport {
    /// `n_u(p)` or `N_u(p||q)`.
    pub n_value: ExtReal,
    /// `h_u(p)` or `H_u(p||q)`.
    pub entropy: ExtReal,
    pub lambda: Option<f64>,
    pub allocation: Option<Vec<f64>>,
    pub utility_label: String,
}

fn check_primal_dual(primal: f64, dual: f64) -> Result<()> {
    if (primal - dual).abs() > PRIMAL_DUAL_TOL * (1.0 + primal.abs()) {
        return Err(Error::SelfCheck(format!(
            "primal value {primal} and dual value {dual} disagree"
        )));
    }
    Ok(())
}

/// `n_u(p)` with the multiplier and optimal allocation.
pub fn n_u(u: &UtilitySpec, p: &ProbVector, cfg: &SolveConfig) -> Result<NuSolution> {
    let lambda = solve_lambda(u, p, cfg)?;
    let l = lambda.lambda;
    let allocation: Vec<f64> = p
        .iter()
        .map(|&pi| if pi > 0.0 { u.inverse_marginal(l / pi) } else { 0.0 })
        .collect();
    let primal: f64 = p
        .iter()
        .zip(&allocation)
        .filter(|(&pi, _)| pi > 0.0)
        .map(|(&pi, &w)| u.eval(w) * pi)
        .sum();
    let dual: f64 = p
        .iter()
        .filter(|&&pi| pi > 0.0)
        .map(|&pi| u.dual(l / pi) * pi)
        .sum::<f64>()
        + l;
    check_primal_dual(primal, dual)?;
    Ok(NuSolution {
        value: ExtReal::from_f64(primal),
        dual_value: dual,
        lambda,
        allocation,
    })
}

/// Discrete u-entropy `h_u(p) = -ln u^-1(n_u(p))`, which lies in `[0, ln k]`.
pub fn h_u(u: &UtilitySpec, p: &ProbVector, cfg: &SolveConfig) -> Result<EntropyReport> {
    let sol = n_u(u, p, cfg)?;
    let n = sol.value.to_f64();
    let mut h = -u.log_inverse(n);
    if h < 0.0 && h >= -NEGATIVE_CLAMP {
        h = 0.0;
    }
    Ok(EntropyReport {
        n_value: sol.value,
        entropy: ExtReal::from_f64(h),
        lambda: Some(sol.lambda.lambda),
        allocation: Some(sol.allocation),
        utility_label: u.label().to_string(),
    })
}

/// Lebesgue decomposition of `p` with respect to `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    /// Mass of `p` on `{i : q_i = 0}`.
    pub singular_mass: f64,
    /// Mass of `p` on `{i : q_i > 0}`.
    pub ac_mass: f64,
    /// Restriction of `p` to the support of `q`, normalized; `None` when
    /// `p` and `q` are mutually singular.
    pub ac_normalized: Option<ProbVector>,
    /// `{i : q_i > 0}`.
    pub support: Vec<usize>,
}

pub fn lebesgue_decompose(p: &ProbVector, q: &ProbVector) -> Result<Decomposition> {
    check_same_len(p, q)?;
    let support = q.support();
    let singular_mass: f64 = p
        .iter()
        .zip(q.iter())
        .filter(|(_, &qi)| qi == 0.0)
        .map(|(&pi, _)| pi)
        .sum();
    let ac: Vec<f64> = support.iter().map(|&i| p[i]).collect();
    let ac_mass: f64 = ac.iter().sum();
    let ac_normalized = if ac_mass > 0.0 {
        Some(ProbVector::with_renormalize(ac, true)?)
    } else {
        None
    };
    Ok(Decomposition {
        singular_mass,
        ac_mass,
        ac_normalized,
        support,
    })
}

/// `N_u(p||q)` with its diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct RelativeSolution {
    pub value: ExtReal,
    pub decomposition: Decomposition,
    /// Multiplier of the absolutely continuous part, if one was solved.
    pub lambda: Option<LambdaSolution>,
    /// Optimal `q`-density `w*` (with `sum_i w_i q_i = 1`), present when `p << q`.
    pub allocation: Option<Vec<f64>>,
}

/// Value of `sup { sum_i u(w_i) p_i : w >= 0, sum_i w_i q_i = 1 }` for `p << q`
/// given on the support of `q`. Returns the value, multiplier and density.
fn equivalent_part(
    u: &UtilitySpec,
    p: &[f64],
    q: &[f64],
    cfg: &SolveConfig,
) -> Result<(f64, LambdaSolution, Vec<f64>)> {
    let terms: Vec<BudgetTerm> = p
        .iter()
        .zip(q)
        .filter(|(&pi, _)| pi > 0.0)
        .map(|(&pi, &qi)| BudgetTerm {
            weight: qi,
            rate: qi / pi,
        })
        .collect();
    let min_ratio = p
        .iter()
        .zip(q)
        .filter(|(&pi, _)| pi > 0.0)
        .map(|(&pi, &qi)| pi / qi)
        .fold(f64::INFINITY, f64::min);
    let lambda = solve_budget(u, &terms, u.marginal(1.0) * min_ratio, cfg)?;
    let l = lambda.lambda;
    let density: Vec<f64> = p
        .iter()
        .zip(q)
        .map(|(&pi, &qi)| {
            if pi > 0.0 {
                u.inverse_marginal(l * qi / pi)
            } else {
                0.0
            }
        })
        .collect();
    let primal: f64 = p
        .iter()
        .zip(&density)
        .filter(|(&pi, _)| pi > 0.0)
        .map(|(&pi, &w)| u.eval(w) * pi)
        .sum();
    let dual: f64 = p
        .iter()
        .zip(q)
        .filter(|(&pi, _)| pi > 0.0)
        .map(|(&pi, &qi)| u.dual(l * qi / pi) * pi)
        .sum::<f64>()
        + l;
    check_primal_dual(primal, dual)?;
    Ok((primal, lambda, density))
}

/// Relative optimal utility `N_u(p||q)`.
///
/// Splits `p` into its part singular to `q` and its absolutely continuous
/// part and combines `singular_mass * u(inf) + ac_mass * N_u(p_ac||q)`.
pub fn relative_n(
    u: &UtilitySpec,
    p: &ProbVector,
    q: &ProbVector,
    cfg: &SolveConfig,
) -> Result<RelativeSolution> {
    let decomposition = lebesgue_decompose(p, q)?;
    let singular = u.u_at_infinity().scale(decomposition.singular_mass);
    if singular == ExtReal::PosInf {
        return Ok(RelativeSolution {
            value: ExtReal::PosInf,
            decomposition,
            lambda: None,
            allocation: None,
        });
    }
    let Some(ac) = decomposition.ac_normalized.as_ref() else {
        return Ok(RelativeSolution {
            value: u.u_at_infinity(),
            decomposition,
            lambda: None,
            allocation: None,
        });
    };
    let q_support: Vec<f64> = decomposition.support.iter().map(|&i| q[i]).collect();
    let (ac_value, lambda, density) = equivalent_part(u, ac.as_slice(), &q_support, cfg)?;
    let value = singular
        .checked_add(ExtReal::from_f64(decomposition.ac_mass * ac_value))
        .ok_or_else(|| Error::SelfCheck("inf - inf in relative value".into()))?;
    let allocation = (decomposition.singular_mass == 0.0).then(|| {
        let mut w = vec![0.0; p.len()];
        for (&i, &wi) in decomposition.support.iter().zip(&density) {
            w[i] = wi;
        }
        w
    });
    Ok(RelativeSolution {
        value,
        decomposition,
        lambda: Some(lambda),
        allocation,
    })
}

/// `ln u^-1(N)`, the relative entropy belonging to an optimal value `N`;
/// `+inf` once `N` reaches `u(inf)`.
pub fn entropy_from_value(u: &UtilitySpec, n: ExtReal) -> ExtReal {
    match n {
        ExtReal::PosInf => ExtReal::PosInf,
        ExtReal::NegInf => ExtReal::NegInf,
        ExtReal::Finite(v) => {
            if ExtReal::Finite(v) >= u.u_at_infinity() {
                return ExtReal::PosInf;
            }
            let mut h = u.log_inverse(v);
            if h < 0.0 && h >= -NEGATIVE_CLAMP {
                h = 0.0;
            }
            ExtReal::from_f64(h)
        }
    }
}

/// Relative u-entropy `H_u(p||q) = ln u^-1(N_u(p||q))` in `[0, inf]`.
pub fn relative_h(
    u: &UtilitySpec,
    p: &ProbVector,
    q: &ProbVector,
    cfg: &SolveConfig,
) -> Result<EntropyReport> {
    let sol = relative_n(u, p, q, cfg)?;
    Ok(EntropyReport {
        n_value: sol.value,
        entropy: entropy_from_value(u, sol.value),
        lambda: sol.lambda.map(|l| l.lambda),
        allocation: sol.allocation,
        utility_label: u.label().to_string(),
    })
}

/// Largest number of atoms accepted by the grid oracles.
pub const MAX_GRID_ATOMS: usize = 4;
pub const MIN_GRID_RESOLUTION: usize = 100;

/// Maximum over integer compositions `n_1 + .. + n_m = resolution`,
/// `n_j >= 1`, of `sum_j tables[j][n_j]`.
pub(crate) fn grid_max(tables: &[Vec<f64>], resolution: usize) -> f64 {
    fn rest(tables: &[Vec<f64>], remaining: usize) -> f64 {
        match tables.len() {
            1 => tables[0][remaining],
            2 => (1..remaining)
                .map(|j| tables[0][j] + tables[1][remaining - j])
                .fold(f64::NEG_INFINITY, f64::max),
            _ => (1..remaining.saturating_sub(tables.len() - 2))
                .map(|j| tables[0][j] + rest(&tables[1..], remaining - j))
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }

    let m = tables.len();
    if m <= 2 {
        return rest(tables, resolution);
    }
    // split the first coordinate across threads; the max is order independent
    let firsts: Vec<usize> = (1..=resolution - (m - 1)).collect();
    let workers = thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(firsts.len());
    let chunk = firsts.len().div_ceil(workers);
    thread::scope(|s| {
        let handles: Vec<_> = firsts
            .chunks(chunk)
            .map(|js| {
                s.spawn(move || {
                    js.iter()
                        .map(|&j| tables[0][j] + rest(&tables[1..], resolution - j))
                        .fold(f64::NEG_INFINITY, f64::max)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("grid worker panicked"))
            .fold(f64::NEG_INFINITY, f64::max)
    })
}

pub(crate) fn check_grid_args(k: usize, resolution: usize) -> Result<()> {
    if k > MAX_GRID_ATOMS {
        return Err(Error::TooLarge(k));
    }
    if resolution < MIN_GRID_RESOLUTION {
        return Err(Error::ResolutionTooSmall(resolution));
    }
    Ok(())
}

/// Brute-force `n_u(p)`: the best `sum_i u(w_i) p_i` over simplex points with
/// coordinates in `(1/resolution) Z`, where atoms of positive mass hold at
/// least one unit and null atoms hold none. A lower bound on `n_u(p)`.
pub fn brute_force_n_u(u: &UtilitySpec, p: &ProbVector, resolution: usize) -> Result<ExtReal> {
    check_grid_args(p.len(), resolution)?;
    let n = resolution as f64;
    let tables: Vec<Vec<f64>> = p
        .iter()
        .filter(|&&pi| pi > 0.0)
        .map(|&pi| {
            (0..=resolution)
                .map(|j| if j == 0 { f64::NEG_INFINITY } else { pi * u.eval(j as f64 / n) })
                .collect()
        })
        .collect();
    Ok(ExtReal::from_f64(grid_max(&tables, resolution)))
}
