//! Randomized invariants of the Young calculus, the ball norms and the
//! maximal operators.

use olab_core::field::{ball_family, ball_mean, sample};
use olab_core::maximal::{dyadic_maximal, dyadic_sharp, hl_maximal};
use olab_core::norms::{ball_norm, om_norm};
use olab_core::{Ball, BallPolicy, DyadicFamily, FieldSpec, GrowthFunction, SampledField, Window, YoungFunction};
use proptest::prelude::*;

fn window() -> Window {
    Window::new(1, 2.0, 32).unwrap()
}

fn field(values: &[f64]) -> SampledField {
    SampledField::new(window(), values.to_vec()).unwrap()
}

fn values() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-4.0f64..4.0, 32)
}

fn ball() -> impl Strategy<Value = Ball> {
    (0usize..32, 0u32..6).prop_map(|(i, j)| {
        let w = window();
        Ball::at_cell(&w, i, w.h() * f64::from(1u32 << j))
    })
}

fn young() -> impl Strategy<Value = YoungFunction> {
    prop_oneof![
        (1.1f64..5.0).prop_map(|p| YoungFunction::power(p).unwrap()),
        (1.1f64..4.0, 0.0f64..2.0).prop_map(|(p, q)| YoungFunction::power_log(p, q).unwrap()),
        Just(YoungFunction::ExpMinusOne),
    ]
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inverse_round_trip(phi in young(), u in 1e-6f64..1e6) {
        let t = phi.inverse(u);
        prop_assert!(close(phi.eval(t), u, 1e-9), "{}: Φ(Φ⁻¹({u})) = {}", phi.label(), phi.eval(t));
    }

    #[test]
    fn inverse_product_sandwich(phi in young(), u in 1e-6f64..1e6) {
        let prod = phi.inverse(u) * phi.complementary().inverse(u);
        prop_assert!(prod >= u * (1.0 - 1e-9) && prod <= 2.0 * u * (1.0 + 1e-9), "{}: {prod} at {u}", phi.label());
    }

    #[test]
    fn young_is_convex(phi in young(), a in 0.0f64..20.0, b in 0.0f64..20.0) {
        let mid = phi.eval(0.5 * (a + b));
        prop_assert!(mid <= 0.5 * (phi.eval(a) + phi.eval(b)) * (1.0 + 1e-12) + 1e-300);
    }

    #[test]
    fn mean_is_linear(f in values(), g in values(), a in -3.0f64..3.0, c in -3.0f64..3.0, b in ball()) {
        let lhs = ball_mean(&field(&f).zip(&field(&g), |x, y| a * x + c * y).unwrap(), &b).unwrap();
        let rhs = a * ball_mean(&field(&f), &b).unwrap() + c * ball_mean(&field(&g), &b).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
    }

    #[test]
    fn mean_commutes_with_constant_shift(f in values(), c in -3.0f64..3.0, b in ball()) {
        let shifted = field(&f).map(|x| x + c).with_exterior(c).unwrap();
        let lhs = ball_mean(&shifted, &b).unwrap();
        let rhs = ball_mean(&field(&f), &b).unwrap() + c;
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
    }

    #[test]
    fn ball_norm_is_homogeneous(f in values(), c in -5.0f64..5.0, phi in young(), b in ball()) {
        let vp = GrowthFunction::power_neg(1.0);
        let base = ball_norm(&field(&f), &phi, &vp, &b).unwrap().value;
        let scaled = ball_norm(&field(&f).scale(c), &phi, &vp, &b).unwrap().value;
        prop_assert!(close(scaled, c.abs() * base, 1e-8) || (base * c.abs()) < 1e-300, "{scaled} vs {}", c.abs() * base);
    }

    #[test]
    fn om_norm_triangle(f in values(), g in values(), p in 1.0f64..4.0) {
        let w = window();
        let fam = ball_family(&w, BallPolicy::strided(4)).unwrap();
        let phi = YoungFunction::power(p).unwrap();
        let vp = GrowthFunction::power_neg(0.5);
        let (ff, gg) = (field(&f), field(&g));
        let sum = om_norm(&ff.zip(&gg, |x, y| x + y).unwrap(), &phi, &vp, &fam).unwrap().value;
        let parts = om_norm(&ff, &phi, &vp, &fam).unwrap().value + om_norm(&gg, &phi, &vp, &fam).unwrap().value;
        prop_assert!(sum <= parts * (1.0 + 1e-8));
    }

    #[test]
    fn ball_holder_with_factor_two(f in values(), g in values(), phi in young(), b in ball()) {
        let one = GrowthFunction::constant(1.0).unwrap();
        let (ff, gg) = (field(&f), field(&g));
        let lhs = ball_mean(&ff.zip(&gg, |x, y| (x * y).abs()).unwrap(), &b).unwrap();
        let nf = ball_norm(&ff, &phi, &one, &b).unwrap().value;
        let ng = ball_norm(&gg, &phi.complementary(), &one, &b).unwrap().value;
        prop_assert!(lhs <= 2.0 * nf * ng * (1.0 + 1e-9), "{lhs} > 2·{nf}·{ng}");
    }

    #[test]
    fn maximal_is_sublinear(f in values(), g in values(), c in -3.0f64..3.0) {
        let w = window();
        let fam = ball_family(&w, BallPolicy::full()).unwrap();
        let (ff, gg) = (field(&f), field(&g));
        let m_sum = hl_maximal(&ff.zip(&gg, |x, y| x + y).unwrap(), &fam).unwrap();
        let mf = hl_maximal(&ff, &fam).unwrap();
        let mg = hl_maximal(&gg, &fam).unwrap();
        let mc = hl_maximal(&ff.scale(c), &fam).unwrap();
        for i in 0..w.len() {
            prop_assert!(m_sum.values()[i] <= (mf.values()[i] + mg.values()[i]) * (1.0 + 1e-12) + 1e-12);
            prop_assert!(close(mc.values()[i], c.abs() * mf.values()[i], 1e-12) || mf.values()[i] == 0.0);
        }
    }

    #[test]
    fn dyadic_sharp_below_twice_maximal(seed in 0u64..1000) {
        let w = window();
        let f = sample(&FieldSpec::RandomStep { seed, depth: 5 }, &w).unwrap();
        let q = DyadicFamily::whole(&w, w.log2_cells()).unwrap();
        let md = dyadic_maximal(&f, &q).unwrap();
        let ms = dyadic_sharp(&f, &q).unwrap();
        for i in q.root_cells() {
            prop_assert!(ms.values()[i] <= 2.0 * md.values()[i]);
        }
    }

    #[test]
    fn power_compose_matches_composition(p in 1.5f64..5.0, theta in 0.3f64..1.0, t in 0.01f64..10.0) {
        prop_assume!(p * theta >= 1.0);
        let phi = YoungFunction::power(p).unwrap();
        let composed = phi.power_compose(theta).unwrap();
        prop_assert!(close(composed.eval(t), phi.eval(t.powf(theta)), 1e-12));
    }
}
