//! Classical entropies and the utility-based quantities that reduce to the
//! relative u-entropy.
//!
//! | Quantity | Computed as |
//! |----------|-------------|
//! | FHS U-relative entropy `D_u(p‖q)` | `u(e^{H_u(p‖q)}) - u(1)` |
//! | FHS U-entropy `H_u(p)` | `u_k(1) - u_k(e^{-h_{u_k}(p)})`, `u_k(x) = u(kx)` |
//! | Arimoto entropy `H^A_{-u}(p)` | `-n_u(p)` for `u(1) = 0` |
//! | Frittelli `Delta_u(mu, nu)`, `delta_u` | one-dimensional dual search over `Lambda` |
//!
//! Each also has a slower route straight from its definition, used as a
//! cross-check.

use crate::discrete::{
    check_grid_args, entropy_from_value, grid_max, h_u, lebesgue_decompose, n_u, relative_h,
};
use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::prob::{check_same_len, ProbVector};
use crate::solver::{maximize_concave_1d, SolveConfig};
use crate::utility::{transform, Transform, UtilitySpec};

/// Renyi order `alpha` in `(0, 1) ∪ (1, inf)`, paired with the isoelastic
/// order `gamma = 1 - 1/alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderAlpha {
    alpha: f64,
}

impl OrderAlpha {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) || alpha == 1.0 {
            return Err(Error::InvalidAlpha(alpha));
        }
        Ok(OrderAlpha { alpha })
    }

    /// `alpha = 1 / (1 - gamma)`.
    pub fn from_gamma(gamma: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma >= 1.0 || gamma == 0.0 {
            return Err(Error::InvalidGamma(gamma));
        }
        OrderAlpha::new(1.0 / (1.0 - gamma))
    }

    pub fn alpha(self) -> f64 {
        self.alpha
    }

    pub fn gamma(self) -> f64 {
        1.0 - 1.0 / self.alpha
    }
}

/// Shannon entropy `-sum p_i ln p_i`, or with `q` the Kullback-Leibler
/// divergence `sum_{q_i > 0} p_i ln(p_i/q_i)` (`+inf` unless `p << q`).
pub fn shannon(p: &ProbVector, q: Option<&ProbVector>) -> Result<ExtReal> {
    match q {
        None => Ok(ExtReal::from_f64(
            -p.iter()
                .filter(|&&pi| pi > 0.0)
                .map(|&pi| pi * pi.ln())
                .sum::<f64>(),
        )),
        Some(q) => {
            if !p.is_abs_continuous_wrt(q)? {
                return Ok(ExtReal::PosInf);
            }
            let kl: f64 = p
                .iter()
                .zip(q.iter())
                .filter(|(&pi, _)| pi > 0.0)
                .map(|(&pi, &qi)| pi * (pi / qi).ln())
                .sum();
            Ok(ExtReal::from_f64(kl.max(0.0)))
        }
    }
}

/// `sum_{q_i > 0} p_i^alpha q_i^(1 - alpha)`.
fn renyi_sum(alpha: f64, p: &ProbVector, q: &ProbVector) -> f64 {
    p.iter()
        .zip(q.iter())
        .filter(|(&pi, &qi)| pi > 0.0 && qi > 0.0)
        .map(|(&pi, &qi)| pi.powf(alpha) * qi.powf(1.0 - alpha))
        .sum()
}

/// Renyi entropy `ln(sum p_i^alpha) / (1 - alpha)`, or with `q` the Renyi
/// divergence `ln(sum p_i^alpha q_i^(1-alpha)) / (alpha - 1)`.
///
/// For `alpha < 1` atoms with `q_i = 0` simply drop out of the sum; for
/// `alpha > 1` the divergence is `+inf` unless `p << q`.
pub fn renyi(alpha: OrderAlpha, p: &ProbVector, q: Option<&ProbVector>) -> Result<ExtReal> {
    let a = alpha.alpha;
    match q {
        None => {
            let s: f64 = p
                .iter()
                .filter(|&&pi| pi > 0.0)
                .map(|&pi| pi.powf(a))
                .sum();
            Ok(ExtReal::from_f64(s.ln() / (1.0 - a)))
        }
        Some(q) => {
            check_same_len(p, q)?;
            if a > 1.0 && !p.is_abs_continuous_wrt(q)? {
                return Ok(ExtReal::PosInf);
            }
            let s = renyi_sum(a, p, q);
            if s == 0.0 {
                // mutually singular with alpha < 1
                return Ok(ExtReal::PosInf);
            }
            Ok(ExtReal::from_f64((s.ln() / (a - 1.0)).max(0.0)))
        }
    }
}

/// Sharma-Mittal-type divergence
/// `(alpha/(alpha-1)) ((sum p_i^alpha q_i^(1-alpha))^(1/alpha) - 1)`,
/// with the same support conventions as [`renyi`].
pub fn sharma_mittal(alpha: OrderAlpha, p: &ProbVector, q: &ProbVector) -> Result<ExtReal> {
    check_same_len(p, q)?;
    let a = alpha.alpha;
    if a > 1.0 && !p.is_abs_continuous_wrt(q)? {
        return Ok(ExtReal::PosInf);
    }
    let s = renyi_sum(a, p, q);
    Ok(ExtReal::from_f64(a / (a - 1.0) * (s.powf(1.0 / a) - 1.0)))
}

fn require_abs_continuous(
    p: &ProbVector,
    q: &ProbVector,
    first: &'static str,
    second: &'static str,
) -> Result<()> {
    if !p.is_abs_continuous_wrt(q)? {
        return Err(Error::NotAbsolutelyContinuous { first, second });
    }
    Ok(())
}

/// Friedman-Huang-Sandow U-relative entropy
/// `D_u(p||q) = sup_{w in S_k} sum_i u(w_i/q_i) p_i - u(1)`, via
/// `D_u = u(e^{H_u(p||q)}) - u(1)`. Defined only for `p << q`.
pub fn fhs_relative(
    u: &UtilitySpec,
    p: &ProbVector,
    q: &ProbVector,
    cfg: &SolveConfig,
) -> Result<ExtReal> {
    require_abs_continuous(p, q, "p", "q")?;
    let h = relative_h(u, p, q, cfg)?.entropy;
    Ok(match h {
        ExtReal::Finite(h) => ExtReal::from_f64(u.eval_exp(h) - u.eval(1.0)),
        _ => h,
    })
}

/// `D_u(p||q)` from its definition: the optimal portfolio `w in S_k` for
/// odds `1/q_i` is formed explicitly and `sum_i u(w_i/q_i) p_i - u(1)`
/// evaluated. Returns the value and the portfolio.
pub fn fhs_relative_by_definition(
    u: &UtilitySpec,
    p: &ProbVector,
    q: &ProbVector,
    cfg: &SolveConfig,
) -> Result<(ExtReal, Vec<f64>)> {
    require_abs_continuous(p, q, "p", "q")?;
    let sol = crate::discrete::relative_n(u, p, q, cfg)?;
    let density = sol
        .allocation
        .ok_or_else(|| Error::SelfCheck("no density for p << q".into()))?;
    // density w_i with sum w_i q_i = 1  <=>  portfolio w_i q_i in S_k
    let portfolio: Vec<f64> = density.iter().zip(q.iter()).map(|(w, qi)| w * qi).collect();
    let value: f64 = p
        .iter()
        .zip(q.iter())
        .zip(&portfolio)
        .filter(|((&pi, _), _)| pi > 0.0)
        .map(|((&pi, &qi), &wi)| u.eval(wi / qi) * pi)
        .sum::<f64>()
        - u.eval(1.0);
    Ok((ExtReal::from_f64(value), portfolio))
}

/// Grid oracle for `D_u(p||q)`: best `sum_i u(w_i/q_i) p_i - u(1)` over the
/// simplex grid of the given resolution. Lower bound; `k <= 4`.
pub fn brute_force_fhs_relative(
    u: &UtilitySpec,
    p: &ProbVector,
    q: &ProbVector,
    resolution: usize,
) -> Result<ExtReal> {
    require_abs_continuous(p, q, "p", "q")?;
    check_grid_args(p.len(), resolution)?;
    let n = resolution as f64;
    let tables: Vec<Vec<f64>> = p
        .iter()
        .zip(q.iter())
        .filter(|(&pi, _)| pi > 0.0)
        .map(|(&pi, &qi)| {
            (0..=resolution)
                .map(|j| {
                    if j == 0 {
                        f64::NEG_INFINITY
                    } else {
                        pi * u.eval(j as f64 / n / qi)
                    }
                })
                .collect()
        })
        .collect();
    Ok(ExtReal::from_f64(grid_max(&tables, resolution) - u.eval(1.0)))
}

/// Friedman-Huang-Sandow U-entropy `H_u(p) = u_k(1) - u_k(e^{-h_{u_k}(p)})`.
pub fn fhs_entropy(u: &UtilitySpec, p: &ProbVector, cfg: &SolveConfig) -> Result<ExtReal> {
    let k = p.len() as f64;
    let uk = transform(u, Transform::Rescale { k })?;
    let h = h_u(&uk, p, cfg)?.entropy.to_f64();
    Ok(ExtReal::from_f64(uk.eval(1.0) - uk.eval_exp(-h)))
}

/// `H_u(p) = u(k) - u(1) - D_u(p || p_(k))`, the defining formula.
pub fn fhs_entropy_by_definition(
    u: &UtilitySpec,
    p: &ProbVector,
    cfg: &SolveConfig,
) -> Result<ExtReal> {
    let k = p.len();
    let uniform = ProbVector::uniform(k)?;
    let d = fhs_relative(u, p, &uniform, cfg)?;
    Ok(ExtReal::from_f64(u.eval(k as f64) - u.eval(1.0) - d.to_f64()))
}

/// Tolerance on `|u(1)|` for Arimoto's normalization requirement.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Arimoto entropy `inf_{w in S_k} sum_i -u(w_i) p_i = -n_u(p)`.
///
/// Requires `u(1) = 0`. With `normalize` set, `u` is first replaced by
/// `u - u(1)`; otherwise a nonzero `u(1)` is an error.
pub fn arimoto(
    u: &UtilitySpec,
    p: &ProbVector,
    normalize: bool,
    cfg: &SolveConfig,
) -> Result<ExtReal> {
    let u1 = u.eval(1.0);
    let shifted;
    let u = if u1.abs() > NORMALIZATION_TOL {
        if !normalize {
            return Err(Error::UtilityNotNormalized(u1));
        }
        shifted = transform(u, Transform::Affine { a: 1.0, b: -u1 })?;
        &shifted
    } else {
        u
    };
    let n = n_u(u, p, cfg)?.value;
    Ok(n.scale(-1.0))
}

/// `-u(e^{-h_u(p)})`, the closed-form companion of [`arimoto`].
pub fn arimoto_via_entropy(u: &UtilitySpec, p: &ProbVector, cfg: &SolveConfig) -> Result<ExtReal> {
    let h = h_u(u, p, cfg)?.entropy.to_f64();
    Ok(ExtReal::from_f64(-u.eval_exp(-h)))
}

/// Frittelli quantities for a pair `mu << nu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frittelli {
    /// `Delta_u(mu, nu)`.
    pub delta_cap: ExtReal,
    /// `delta_u(mu, nu) = u^-1(Delta_u) - 1`.
    pub distance: ExtReal,
    /// Optimal `Lambda` of the absolutely continuous part, if searched.
    pub lambda: Option<f64>,
}

/// Frittelli generalised distance.
///
/// `Delta_u(mu, nu)` is the extremum over `Lambda > 0` of
/// `Lambda + sum_i u*(Lambda mu_i/nu_i) nu_i`. The objective is convex in
/// `Lambda`, so the extremum is its minimum, found by maximizing the negated
/// objective. The part of `nu` singular to `mu` is split off first and
/// contributes `mass * u(inf)`.
pub fn frittelli(
    u: &UtilitySpec,
    mu: &ProbVector,
    nu: &ProbVector,
    cfg: &SolveConfig,
) -> Result<Frittelli> {
    require_abs_continuous(mu, nu, "mu", "nu")?;
    // Lebesgue decomposition of nu with respect to mu
    let dec = lebesgue_decompose(nu, mu)?;
    let singular = u.u_at_infinity().scale(dec.singular_mass);
    if singular == ExtReal::PosInf {
        return Ok(Frittelli {
            delta_cap: ExtReal::PosInf,
            distance: ExtReal::PosInf,
            lambda: None,
        });
    }
    // mu << nu gives nu_i > 0 wherever mu_i > 0, so the ac part is non-empty
    let nu_ac = dec
        .ac_normalized
        .as_ref()
        .ok_or_else(|| Error::SelfCheck("empty absolutely continuous part".into()))?;
    let terms: Vec<(f64, f64)> = dec
        .support
        .iter()
        .zip(nu_ac.iter())
        .map(|(&i, &n)| (mu[i] / n, n))
        .collect();
    let neg_objective = |lambda: f64| {
        let s: f64 = terms
            .iter()
            .map(|&(ratio, weight)| u.dual(lambda * ratio) * weight)
            .sum();
        ExtReal::from_f64(-(lambda + s))
    };
    let best = maximize_concave_1d(neg_objective, 1.0, cfg)?;
    let ac_value = best.value.scale(-1.0);
    let delta_cap = singular
        .checked_add(ac_value.scale(dec.ac_mass))
        .ok_or_else(|| Error::SelfCheck("inf - inf in Frittelli value".into()))?;
    let distance = match entropy_from_value(u, delta_cap) {
        ExtReal::Finite(h) => ExtReal::from_f64(h.exp_m1()),
        other => other,
    };
    Ok(Frittelli {
        delta_cap,
        distance,
        lambda: Some(best.argmax),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pv(w: &[f64]) -> ProbVector {
        ProbVector::new(w.to_vec()).unwrap()
    }

    fn cfg() -> SolveConfig {
        SolveConfig::default()
    }

    const KL_FIXTURE: f64 = 0.143_841_036_225_890_4;

    #[test]
    fn shannon_values() {
        let h = shannon(&pv(&[0.5, 0.5]), None).unwrap().to_f64();
        assert!((h - 2f64.ln()).abs() < 1e-15);
        let kl = shannon(&pv(&[1.0, 0.0]), Some(&pv(&[0.5, 0.5]))).unwrap();
        assert!((kl.to_f64() - 2f64.ln()).abs() < 1e-15);
        assert_eq!(
            shannon(&pv(&[0.5, 0.5]), Some(&pv(&[1.0, 0.0]))).unwrap(),
            ExtReal::PosInf
        );
        assert_eq!(
            shannon(&pv(&[1.0]), Some(&pv(&[0.5, 0.5]))),
            Err(Error::LengthMismatch(1, 2))
        );
    }

    #[test]
    fn renyi_values() {
        let two = OrderAlpha::new(2.0).unwrap();
        let h = renyi(two, &pv(&[0.8, 0.2]), None).unwrap().to_f64();
        assert!((h + 0.68f64.ln()).abs() < 1e-15);
        let half = OrderAlpha::new(0.5).unwrap();
        let d = renyi(half, &pv(&[0.5, 0.5]), Some(&pv(&[1.0, 0.0]))).unwrap();
        assert!((d.to_f64() - 2f64.ln()).abs() < 1e-15);
        assert_eq!(
            renyi(two, &pv(&[0.5, 0.5]), Some(&pv(&[1.0, 0.0]))).unwrap(),
            ExtReal::PosInf
        );
        assert!(matches!(OrderAlpha::new(1.0), Err(Error::InvalidAlpha(_))));
        assert!(matches!(OrderAlpha::new(-0.5), Err(Error::InvalidAlpha(_))));
        assert!((OrderAlpha::from_gamma(-1.0).unwrap().alpha() - 0.5).abs() < 1e-15);
        assert!((OrderAlpha::new(2.0).unwrap().gamma() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn fhs_relative_values() {
        let p = pv(&[0.3, 0.7]);
        let d = fhs_relative(&UtilitySpec::log(), &p, &p, &cfg()).unwrap();
        assert!(d.to_f64().abs() < 1e-12);
        let d = fhs_relative(&UtilitySpec::log(), &pv(&[0.5, 0.5]), &pv(&[0.25, 0.75]), &cfg())
            .unwrap();
        assert!((d.to_f64() - KL_FIXTURE).abs() < 1e-12);
        // frozen from a scipy grid sup over the simplex
        let iso = UtilitySpec::isoelastic(0.5).unwrap();
        let (p, q) = (pv(&[0.8, 0.2]), pv(&[0.5, 0.5]));
        let d = fhs_relative(&iso, &p, &q, &cfg()).unwrap().to_f64();
        assert!((d - 0.332_380_757_938_115_9).abs() < 1e-9);
        let sm = sharma_mittal(OrderAlpha::new(2.0).unwrap(), &p, &q).unwrap();
        assert!((d - sm.to_f64()).abs() < 1e-12);
        let (direct, portfolio) = fhs_relative_by_definition(&iso, &p, &q, &cfg()).unwrap();
        assert!((direct.to_f64() - d).abs() < 1e-12);
        assert!((portfolio.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let bf = brute_force_fhs_relative(&iso, &p, &q, 20_000).unwrap().to_f64();
        assert!(bf <= d + 1e-12 && d - bf < 1e-6);
    }

    #[test]
    fn fhs_relative_requires_abs_continuity() {
        assert!(matches!(
            fhs_relative(&UtilitySpec::log(), &pv(&[0.5, 0.5]), &pv(&[1.0, 0.0]), &cfg()),
            Err(Error::NotAbsolutelyContinuous { .. })
        ));
    }

    #[test]
    fn fhs_entropy_values() {
        let log = UtilitySpec::log();
        let h = fhs_entropy(&log, &pv(&[0.5, 0.5]), &cfg()).unwrap().to_f64();
        assert!((h - 2f64.ln()).abs() < 1e-12);
        let h = fhs_entropy(&log, &pv(&[1.0, 0.0]), &cfg()).unwrap().to_f64();
        assert!(h.abs() < 1e-12);
        let iso = UtilitySpec::isoelastic(-1.0).unwrap();
        let p = pv(&[0.5, 0.5]);
        let a = fhs_entropy(&iso, &p, &cfg()).unwrap().to_f64();
        let b = fhs_entropy_by_definition(&iso, &p, &cfg()).unwrap().to_f64();
        assert!((a - 0.5).abs() < 1e-12);
        assert!((b - 0.5).abs() < 1e-12);
        // gamma = 1/2, alpha = 2: k^{1/2} (2/(1-2)) (0.68^{1/2} - 1)
        let iso = UtilitySpec::isoelastic(0.5).unwrap();
        let h = fhs_entropy(&iso, &pv(&[0.8, 0.2]), &cfg()).unwrap().to_f64();
        assert!((h - 0.496_046_366_808_07).abs() < 1e-9);
        let closed = 2f64.sqrt() * (2.0 / (1.0 - 2.0)) * (0.68f64.sqrt() - 1.0);
        assert!((h - closed).abs() < 1e-12);
    }

    #[test]
    fn arimoto_values() {
        let log = UtilitySpec::log();
        let a = arimoto(&log, &pv(&[0.5, 0.5]), false, &cfg()).unwrap().to_f64();
        assert!((a - 2f64.ln()).abs() < 1e-12);
        let a = arimoto(&log, &pv(&[1.0, 0.0]), false, &cfg()).unwrap().to_f64();
        assert!(a.abs() < 1e-12);
        let iso = UtilitySpec::isoelastic(-1.0).unwrap();
        let p = pv(&[0.8, 0.2]);
        let a = arimoto(&iso, &p, false, &cfg()).unwrap().to_f64();
        assert!((a - 0.8).abs() < 1e-12);
        let b = arimoto_via_entropy(&iso, &p, &cfg()).unwrap().to_f64();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn arimoto_normalization() {
        let shifted = transform(&UtilitySpec::log(), Transform::Affine { a: 1.0, b: 2.0 }).unwrap();
        let p = pv(&[0.5, 0.5]);
        assert!(matches!(
            arimoto(&shifted, &p, false, &cfg()),
            Err(Error::UtilityNotNormalized(_))
        ));
        let a = arimoto(&shifted, &p, true, &cfg()).unwrap().to_f64();
        assert!((a - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn frittelli_log_equal_measures() {
        let p = pv(&[0.5, 0.5]);
        let f = frittelli(&UtilitySpec::log(), &p, &p, &cfg()).unwrap();
        assert!(f.delta_cap.to_f64().abs() < 1e-12);
        assert!(f.distance.to_f64().abs() < 1e-12);
        assert!((f.lambda.unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn frittelli_log_fixture() {
        let f = frittelli(&UtilitySpec::log(), &pv(&[0.25, 0.75]), &pv(&[0.5, 0.5]), &cfg())
            .unwrap();
        assert!((f.delta_cap.to_f64() - KL_FIXTURE).abs() < 1e-12);
        assert!((f.distance.to_f64() - 0.154_700_538_379_251_5).abs() < 1e-12);
    }

    #[test]
    fn frittelli_singular_part() {
        let iso = UtilitySpec::isoelastic(-1.0).unwrap();
        let f = frittelli(&iso, &pv(&[1.0, 0.0]), &pv(&[0.5, 0.5]), &cfg()).unwrap();
        assert!((f.delta_cap.to_f64() - 0.5).abs() < 1e-12);
        assert!((f.distance.to_f64() - 1.0).abs() < 1e-12);
        let f = frittelli(&UtilitySpec::log(), &pv(&[1.0, 0.0]), &pv(&[0.5, 0.5]), &cfg()).unwrap();
        assert_eq!(f.delta_cap, ExtReal::PosInf);
        assert!(matches!(
            frittelli(&iso, &pv(&[0.5, 0.5]), &pv(&[1.0, 0.0]), &cfg()),
            Err(Error::NotAbsolutelyContinuous { .. })
        ));
    }
}
