use proptest::prelude::*;

use uentropy::discrete::{h_u, n_u, relative_h, relative_n};
use uentropy::prob::ProbVector;
use uentropy::solver::SolveConfig;
use uentropy::utility::{transform, Transform, UtilitySpec};

const GAMMAS: [f64; 6] = [-2.0, -1.0, -0.5, 0.25, 0.5, 0.75];

fn cfg() -> SolveConfig {
    SolveConfig::default()
}

fn utility() -> impl Strategy<Value = UtilitySpec> {
    (0..=GAMMAS.len()).prop_map(|i| match i {
        0 => UtilitySpec::log(),
        i => UtilitySpec::isoelastic(GAMMAS[i - 1]).unwrap(),
    })
}

/// Strictly positive weights, normalized.
fn simplex(k: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = ProbVector> {
    prop::collection::vec(0.01f64..1.0, k).prop_map(|w| {
        let s: f64 = w.iter().sum();
        ProbVector::new(w.iter().map(|x| x / s).collect()).unwrap()
    })
}

fn triple(
    k: std::ops::RangeInclusive<usize>,
) -> impl Strategy<Value = (ProbVector, ProbVector, ProbVector)> {
    k.prop_flat_map(|k| (simplex(k..=k), simplex(k..=k), simplex(k..=k)))
}

fn h(u: &UtilitySpec, p: &ProbVector) -> f64 {
    h_u(u, p, &cfg()).unwrap().entropy.to_f64()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn entropy_within_bounds(u in utility(), p in simplex(2..=6)) {
        let v = h(&u, &p);
        prop_assert!(v >= 0.0 && v <= (p.len() as f64).ln() + 1e-12, "h = {v}");
    }

    #[test]
    fn permutation_invariant(u in utility(), p in simplex(2..=6), seed in any::<u64>()) {
        let k = p.len();
        let mut idx: Vec<usize> = (0..k).collect();
        idx.rotate_left((seed % k as u64) as usize);
        idx.swap(0, k - 1);
        let q = p.permuted(&idx).unwrap();
        prop_assert!((h(&u, &p) - h(&u, &q)).abs() <= 1e-12);
    }

    #[test]
    fn zero_padding_invariant(u in utility(), p in simplex(2..=5), extra in 1usize..4) {
        prop_assert!((h(&u, &p) - h(&u, &p.padded(extra))).abs() <= 1e-12);
    }

    #[test]
    fn affine_invariant(u in utility(), p in simplex(2..=6), a in 0.1f64..10.0, b in -5.0f64..5.0) {
        let v = transform(&u, Transform::Affine { a, b }).unwrap();
        prop_assert!((h(&u, &p) - h(&v, &p)).abs() <= 1e-10);
    }

    #[test]
    fn rescale_identity(u in utility(), p in simplex(2..=6)) {
        let k = p.len();
        let uniform = ProbVector::uniform(k).unwrap();
        let lhs = relative_h(&u, &p, &uniform, &cfg()).unwrap().entropy.to_f64();
        let uk = transform(&u, Transform::Rescale { k: k as f64 }).unwrap();
        prop_assert!((lhs - ((k as f64).ln() - h(&uk, &p))).abs() <= 1e-9);
    }

    #[test]
    fn relative_value_convex((p1, p2, q) in triple(2..=6), a in 0.0f64..1.0, u in utility()) {
        let n = |p: &ProbVector| relative_n(&u, p, &q, &cfg()).unwrap().value.to_f64();
        let mixed = n(&p1.mix(&p2, a).unwrap());
        prop_assert!(mixed <= a * n(&p1) + (1.0 - a) * n(&p2) + 1e-9);
    }

    #[test]
    fn fenchel_young(u in utility(), x in 1e-3f64..1e3, y in 1e-3f64..1e3) {
        let dual = u.dual(y);
        prop_assert!(u.eval(x) - y * x <= dual + 1e-12 * (1.0 + dual.abs()));
        let xi = u.inverse_marginal(y);
        let at = u.eval(xi) - y * xi;
        prop_assert!((at - dual).abs() <= 1e-9 * (1.0 + dual.abs()));
    }

    #[test]
    fn utility_round_trips(u in utility(), e in -6.0f64..6.0) {
        let x = 10f64.powf(e);
        prop_assert!((u.inverse_marginal(u.marginal(x)) - x).abs() / x <= 1e-10);
        // u(x) is only resolvable from u(inf) while the gap exceeds a few ulps
        let gap = (u.u_at_infinity().to_f64() - u.eval(x)).abs();
        prop_assume!(gap > 1e-6 * u.eval(x).abs().max(1.0));
        prop_assert!((u.inverse(u.eval(x)) - x).abs() / x <= 1e-10);
    }

    #[test]
    fn multiplier_scaling_law(i in 0..GAMMAS.len(), p in simplex(2..=6)) {
        let g = GAMMAS[i];
        let u = UtilitySpec::isoelastic(g).unwrap();
        let alpha = 1.0 / (1.0 - g);
        let lam = n_u(&u, &p, &cfg()).unwrap().lambda.lambda;
        let want = p.iter().map(|x| x.powf(alpha)).sum::<f64>().powf(1.0 - g);
        prop_assert!((lam - want).abs() / lam <= 1e-9);
    }

    #[test]
    fn continuous_in_p(u in utility(), p in simplex(2..=6), dir in prop::collection::vec(-1.0f64..1.0, 6)) {
        let k = p.len();
        let mean: f64 = dir[..k].iter().sum::<f64>() / k as f64;
        let eps = 1e-6;
        let moved: Vec<f64> = p.iter().zip(&dir[..k]).map(|(x, d)| x + eps * (d - mean)).collect();
        let q = ProbVector::new(moved).unwrap();
        prop_assert!((h(&u, &p) - h(&u, &q)).abs() <= 1e-4);
    }

    #[test]
    fn relative_entropy_zero_on_diagonal(u in utility(), p in simplex(2..=6)) {
        let v = relative_h(&u, &p, &p, &cfg()).unwrap().entropy.to_f64();
        prop_assert!(v.abs() <= 1e-9);
    }
}
