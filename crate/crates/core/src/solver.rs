//! One-dimensional kernels: the bracketed root-find for the budget multiplier
//! and a bracketed golden-section maximizer.

use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::prob::ProbVector;
use crate::utility::UtilitySpec;

/// Tolerances and limits shared by the scalar solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_iter: usize,
    pub bracket_growth: f64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            rel_tol: 1e-12,
            abs_tol: 1e-14,
            max_iter: 200,
            bracket_growth: 2.0,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return Err(Error::InvalidConfig("tolerances must be positive".into()));
        }
        if self.max_iter < 8 {
            return Err(Error::InvalidConfig("max_iter must be at least 8".into()));
        }
        if !(self.bracket_growth > 1.0) || !self.bracket_growth.is_finite() {
            return Err(Error::InvalidConfig("bracket_growth must exceed 1".into()));
        }
        Ok(())
    }
}

/// The multiplier `Lambda` solving a budget equation, with diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaSolution {
    pub lambda: f64,
    /// `phi(lambda) - 1` at the returned multiplier.
    pub residual: f64,
    pub iterations: usize,
    /// Final bracket `[lo, hi]` with `phi(lo) >= 1 >= phi(hi)`.
    pub bracket: (f64, f64),
}

/// One term `weight * I(lambda * rate)` of a budget function.
#[derive(Debug, Clone, Copy)]
pub(crate) struct BudgetTerm {
    pub weight: f64,
    pub rate: f64,
}

/// `phi(lambda) = sum_j weight_j * I(lambda * rate_j)`.
pub(crate) fn budget(u: &UtilitySpec, terms: &[BudgetTerm], lambda: f64) -> f64 {
    terms
        .iter()
        .map(|t| t.weight * u.inverse_marginal(lambda * t.rate))
        .sum()
}

/// Solves `phi(lambda) = 1` for the strictly decreasing budget function
/// `phi` by bisection, starting the bracket at `start` and growing it
/// geometrically in whichever direction is needed.
pub(crate) fn solve_budget(
    u: &UtilitySpec,
    terms: &[BudgetTerm],
    start: f64,
    cfg: &SolveConfig,
) -> Result<LambdaSolution> {
    cfg.validate()?;
    if terms.is_empty() {
        return Err(Error::DegenerateInput);
    }
    let phi = |lambda: f64| budget(u, terms, lambda);
    let growth = cfg.bracket_growth;

    let mut lo = start;
    let mut iterations = 0;
    while phi(lo) < 1.0 {
        lo /= growth;
        iterations += 1;
        if lo < f64::MIN_POSITIVE || iterations > cfg.max_iter {
            return Err(Error::NoConvergence {
                iterations,
                lo,
                hi: start,
            });
        }
    }
    let mut hi = lo * growth;
    while phi(hi) >= 1.0 {
        lo = hi;
        hi *= growth;
        iterations += 1;
        if !hi.is_finite() || iterations > cfg.max_iter {
            return Err(Error::NoConvergence { iterations, lo, hi });
        }
    }

    // phi(lo) >= 1 > phi(hi); bisect to full precision
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if iterations >= cfg.max_iter {
            break;
        }
        iterations += 1;
        let v = phi(mid);
        if v == 1.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if v > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let (r_lo, r_hi) = (phi(lo) - 1.0, phi(hi) - 1.0);
    let (lambda, residual) = if r_lo.abs() <= r_hi.abs() {
        (lo, r_lo)
    } else {
        (hi, r_hi)
    };
    let width_ok = hi - lo <= cfg.rel_tol * lambda || hi - lo <= cfg.abs_tol;
    if !width_ok || residual.abs() > cfg.rel_tol {
        return Err(Error::NoConvergence { iterations, lo, hi });
    }
    Ok(LambdaSolution {
        lambda,
        residual,
        iterations,
        bracket: (lo, hi),
    })
}

/// `alpha(p) = u'(1) * max_j p_j`, the lower edge of the multiplier bracket.
pub fn lambda_lower_bound(u: &UtilitySpec, p: &ProbVector) -> f64 {
    u.marginal(1.0) * p.max()
}

/// Finds the unique `Lambda_p >= alpha(p)` with `sum_{p_i > 0} I(Lambda_p / p_i) = 1`.
///
/// Atoms with `p_i = 0` contribute `I(inf) = 0` and are skipped.
pub fn solve_lambda(u: &UtilitySpec, p: &ProbVector, cfg: &SolveConfig) -> Result<LambdaSolution> {
    let terms: Vec<BudgetTerm> = p
        .iter()
        .filter(|&&pi| pi > 0.0)
        .map(|&pi| BudgetTerm {
            weight: 1.0,
            rate: 1.0 / pi,
        })
        .collect();
    if terms.is_empty() {
        return Err(Error::DegenerateInput);
    }
    let alpha = lambda_lower_bound(u, p);
    // phi(alpha) >= I(u'(1)) = 1 up to round-off
    let at_alpha = budget(u, &terms, alpha);
    if at_alpha < 1.0 - 1e-9 {
        return Err(Error::SelfCheck(format!(
            "budget at alpha(p) = {alpha} is {at_alpha} < 1"
        )));
    }
    solve_budget(u, &terms, alpha, cfg)
}

/// Location and value of a one-dimensional maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub argmax: f64,
    pub value: ExtReal,
    /// Set when the supremum is approached at the lower end `x -> 0+`.
    pub at_boundary: bool,
}

/// Upper limit for bracket expansion; beyond it the objective is declared
/// unbounded above.
const EXPANSION_CEILING: f64 = 1e50;

/// Maximizes a concave `f` on `(0, inf)` by geometric bracket expansion from
/// `initial_guess` followed by golden-section search.
///
/// Non-finite and NaN evaluations count as `-inf`, which shrinks the bracket
/// toward the finite region. Expansion toward zero stops at `cfg.abs_tol`, at
/// which point the maximum is reported at that edge and flagged.
pub fn maximize_concave_1d<F>(f: F, initial_guess: f64, cfg: &SolveConfig) -> Result<Maximum>
where
    F: Fn(f64) -> ExtReal,
{
    cfg.validate()?;
    if !(initial_guess > 0.0 && initial_guess.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "initial guess {initial_guess} must be positive"
        )));
    }
    let eval = |x: f64| -> f64 {
        match f(x) {
            ExtReal::Finite(v) if v.is_nan() => f64::NEG_INFINITY,
            v => v.to_f64(),
        }
    };
    let growth = cfg.bracket_growth;

    let mut b = initial_guess;
    let mut fb = eval(b);
    if fb == f64::INFINITY {
        return Ok(Maximum {
            argmax: b,
            value: ExtReal::PosInf,
            at_boundary: false,
        });
    }
    let mut steps = 0;

    let mut c = b * growth;
    let mut fc = eval(c);
    let mut a;
    if fc > fb {
        // climb upward
        loop {
            a = b;
            b = c;
            fb = fc;
            c = b * growth;
            fc = eval(c);
            steps += 1;
            if fc == f64::INFINITY || c > EXPANSION_CEILING {
                return Err(Error::UnboundedAbove);
            }
            if fc <= fb {
                break;
            }
            if steps > cfg.max_iter {
                return Err(Error::NoConvergence {
                    iterations: steps,
                    lo: a,
                    hi: c,
                });
            }
        }
    } else {
        a = b / growth;
        let mut fa = eval(a);
        while fa > fb {
            c = b;
            b = a;
            fb = fa;
            a = b / growth;
            steps += 1;
            if fa == f64::INFINITY {
                return Ok(Maximum {
                    argmax: b,
                    value: ExtReal::PosInf,
                    at_boundary: false,
                });
            }
            if a < cfg.abs_tol {
                return Ok(Maximum {
                    argmax: b,
                    value: ExtReal::from_f64(fb),
                    at_boundary: true,
                });
            }
            fa = eval(a);
            if steps > cfg.max_iter {
                return Err(Error::NoConvergence {
                    iterations: steps,
                    lo: a,
                    hi: c,
                });
            }
        }
    }
    // golden-section on [a, c] with fb >= max(fa, fc)
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut lo, mut hi) = (a, c);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = eval(x1);
    let mut f2 = eval(x2);
    let mut iterations = 0;
    while hi - lo > cfg.rel_tol * 0.5 * (lo + hi) && hi - lo > cfg.abs_tol * 1e-2 {
        iterations += 1;
        if iterations > cfg.max_iter {
            return Err(Error::NoConvergence {
                iterations,
                lo,
                hi,
            });
        }
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = eval(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = eval(x2);
        }
    }
    let (mut argmax, mut best) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    if fb > best {
        argmax = b;
        best = fb;
    }
    Ok(Maximum {
        argmax,
        value: ExtReal::from_f64(best),
        at_boundary: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SolveConfig {
        SolveConfig::default()
    }

    #[test]
    fn log_lambda_is_one() {
        let p = ProbVector::new(vec![0.3, 0.7]).unwrap();
        let s = solve_lambda(&UtilitySpec::log(), &p, &cfg()).unwrap();
        assert!((s.lambda - 1.0).abs() <= 1e-12);
        assert!(s.residual.abs() <= 1e-12);
    }

    #[test]
    fn isoelastic_lambda_closed_form() {
        let u = UtilitySpec::isoelastic(0.5).unwrap();
        let p = ProbVector::new(vec![0.8, 0.2]).unwrap();
        let s = solve_lambda(&u, &p, &cfg()).unwrap();
        let expected = 0.68f64.sqrt();
        assert!((s.lambda - expected).abs() / expected < 1e-12);
        // substitute back: sum I(Lambda/p_i) = sum (Lambda/p_i)^-2
        let back: f64 = [0.8f64, 0.2].iter().map(|pi| (expected / pi).powi(-2)).sum();
        assert!((back - 1.0).abs() < 1e-12);
    }

    #[test]
    fn point_mass_ignores_zero_atom() {
        let p = ProbVector::new(vec![1.0, 0.0]).unwrap();
        let s = solve_lambda(&UtilitySpec::log(), &p, &cfg()).unwrap();
        assert!((s.lambda - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn bracket_brackets_root() {
        let u = UtilitySpec::isoelastic(0.75).unwrap();
        let p = ProbVector::new(vec![0.05, 0.15, 0.8]).unwrap();
        let terms: Vec<BudgetTerm> = p
            .iter()
            .map(|&pi| BudgetTerm {
                weight: 1.0,
                rate: 1.0 / pi,
            })
            .collect();
        let s = solve_lambda(&u, &p, &cfg()).unwrap();
        let (lo, hi) = s.bracket;
        assert!(budget(&u, &terms, lo) >= 1.0);
        assert!(budget(&u, &terms, hi) <= 1.0);
        assert!(s.lambda >= lambda_lower_bound(&u, &p) * (1.0 - 1e-12));
    }

    #[test]
    fn different_starts_agree() {
        let u = UtilitySpec::isoelastic(-2.0).unwrap();
        let p = ProbVector::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let terms: Vec<BudgetTerm> = p
            .iter()
            .map(|&pi| BudgetTerm {
                weight: 1.0,
                rate: 1.0 / pi,
            })
            .collect();
        let a = solve_budget(&u, &terms, 1e-3, &cfg()).unwrap().lambda;
        let b = solve_budget(&u, &terms, 1e3, &cfg()).unwrap().lambda;
        assert!((a - b).abs() <= 1e-12 * a);
    }

    #[test]
    fn bad_config_rejected() {
        let p = ProbVector::new(vec![1.0]).unwrap();
        let bad = SolveConfig {
            max_iter: 3,
            ..SolveConfig::default()
        };
        assert!(matches!(
            solve_lambda(&UtilitySpec::log(), &p, &bad),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn too_few_iterations_reports_bracket() {
        let u = UtilitySpec::isoelastic(0.5).unwrap();
        let p = ProbVector::new(vec![0.8, 0.2]).unwrap();
        let tight = SolveConfig {
            max_iter: 10,
            ..SolveConfig::default()
        };
        match solve_lambda(&u, &p, &tight) {
            Err(Error::NoConvergence { lo, hi, .. }) => assert!(lo < hi),
            other => panic!("expected NoConvergence, got {other:?}"),
        }
    }

    #[test]
    fn quadratic_maximum() {
        let m = maximize_concave_1d(|x| ExtReal::Finite(-(x - 3.0).powi(2)), 1.0, &cfg()).unwrap();
        assert!((m.argmax - 3.0).abs() < 1e-7);
        assert!(m.value.finite().unwrap().abs() < 1e-14);
        assert!(!m.at_boundary);
    }

    #[test]
    fn long_upward_climb() {
        let m = maximize_concave_1d(|x| ExtReal::Finite(40.0 * x.ln() - x), 1.0, &cfg()).unwrap();
        assert!((m.argmax - 40.0).abs() < 1e-6);
    }

    #[test]
    fn maximum_below_guess() {
        let m = maximize_concave_1d(|x| ExtReal::Finite(x.ln() - x / 0.01), 1.0, &cfg()).unwrap();
        assert!((m.argmax - 0.01).abs() < 1e-8);
    }

    #[test]
    fn decreasing_objective_hits_boundary() {
        let m = maximize_concave_1d(|x| ExtReal::Finite(-x), 1.0, &cfg()).unwrap();
        assert!(m.at_boundary);
        assert!(m.argmax < 1e-13);
    }

    #[test]
    fn increasing_objective_is_unbounded() {
        assert_eq!(
            maximize_concave_1d(|x| ExtReal::Finite(x), 1.0, &cfg()),
            Err(Error::UnboundedAbove)
        );
    }

    #[test]
    fn non_finite_values_shrink_bracket() {
        // -inf beyond x = 5, concave peak at 4
        let f = |x: f64| {
            if x > 5.0 {
                ExtReal::NegInf
            } else {
                ExtReal::Finite(-(x - 4.0).powi(2))
            }
        };
        let m = maximize_concave_1d(f, 1.0, &cfg()).unwrap();
        assert!((m.argmax - 4.0).abs() < 1e-7);
    }
}
