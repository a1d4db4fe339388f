use proptest::prelude::*;

use varmotion::dirdep::{self, DirDepParams};
use varmotion::eulergen::{euler_family, gf_lhs, gf_partial_sum};
use varmotion::geo2d::{self, Geo2dParams};
use varmotion::mc::{run_replicas, run_replicas_seq};
use varmotion::planar::{self, PlanarParams};
use varmotion::rng::stream;
use varmotion::telegraph::{self, TelegraphParams};
use varmotion::timevar::{self, SigmaProfile};
use varmotion::velocitymap::{PowerVariant, VelocityModel};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn time_grid(t: f64, k: usize) -> impl Iterator<Item = f64> {
    (0..=k).map(move |i| t * i as f64 / k as f64)
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn appell_coefficient_identity(a in 0.1f64..4.0, theta in 0.05f64..8.0) {
        let fam = euler_family(40, a, theta).unwrap();
        for n in 1..=40usize {
            for m in 1..=n {
                let lhs = m as f64 * fam[n].coeffs[m];
                let rhs = n as f64 * fam[n - 1].coeffs[m - 1];
                prop_assert!(lhs == rhs || rel(lhs, rhs) < 1e-12, "n={n} m={m}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn generating_function_partial_sums(
        a in 0.2f64..3.0,
        theta in 0.1f64..5.0,
        x in -1.5f64..1.5,
        t in -0.5f64..0.5,
    ) {
        let lhs = gf_lhs(a, theta, x, t);
        let sum = gf_partial_sum(a, theta, x, t, 40).unwrap();
        prop_assert!((lhs - sum).abs() <= 1e-10 * lhs.abs());
    }

    #[test]
    fn telegraph_law_is_symmetric(
        lambda in 0.05f64..20.0,
        c in 0.1f64..5.0,
        t in 0.05f64..4.0,
        frac in -0.999f64..0.999,
    ) {
        let p = TelegraphParams::new(lambda, c).unwrap();
        let z = frac * c * t;
        let (f, g) = (telegraph::density(&p, z, t).unwrap(), telegraph::density(&p, -z, t).unwrap());
        prop_assert!(f > 0.0 && rel(f, g) < 1e-12);
        let (lo, hi) = (telegraph::cdf(&p, -z, t).unwrap(), telegraph::cdf(&p, z, t).unwrap());
        prop_assert!((lo + hi - 1.0).abs() < 1e-9);
    }

    #[test]
    fn telegraph_paths_stay_in_the_cone(lambda in 0.1f64..30.0, c in 0.1f64..3.0, seed in any::<u64>()) {
        let p = TelegraphParams::new(lambda, c).unwrap();
        let path = telegraph::sample_path(&p, 2.0, &mut stream(seed, 0)).unwrap();
        for s in time_grid(2.0, 40) {
            prop_assert!(path.position(s).abs() <= c * s * (1.0 + 1e-12) + 1e-15);
        }
    }

    #[test]
    fn velocity_maps_conjugate_the_telegraph_path(
        family in 0usize..5,
        x0 in 0.05f64..0.95,
        lambda in 0.2f64..5.0,
        seed in any::<u64>(),
    ) {
        let c = 1.0;
        let model = match family {
            0 => VelocityModel::constant(c, x0),
            1 => VelocityModel::linear(c, x0),
            2 => VelocityModel::logistic(c, x0),
            3 => VelocityModel::symlogistic(c, x0),
            _ => VelocityModel::power(c, x0, 0.5, PowerVariant::Reflect),
        }
        .unwrap();
        let params = TelegraphParams::new(lambda, c).unwrap();
        let path = telegraph::sample_path(&params, 1.5, &mut stream(seed, 1)).unwrap();
        let mapped = model.transform_path(&path);
        let (lo, hi) = model.state_space();
        for s in time_grid(1.5, 30) {
            let (x, z) = (mapped.position(s), path.position(s));
            if family == 4 {
                // Reflected power motion: X^b = |x0^b + b T|.
                let b = 0.5;
                prop_assert!((x.powf(b) - (x0.powf(b) + b * z).abs()).abs() < 1e-9);
            } else {
                prop_assert!((model.w(x) - z).abs() < 1e-9 * z.abs().max(1.0));
                // Natural and entrance barriers are never attained.
                prop_assert!(x > lo && x < hi);
            }
        }
    }

    #[test]
    fn planar_paths_stay_in_the_square(
        lambda in 0.1f64..20.0,
        c in 0.1f64..3.0,
        p in 0.01f64..0.99,
        seed in any::<u64>(),
    ) {
        let params = PlanarParams::new(lambda, c, p).unwrap();
        let path = planar::sample_planar(&params, 1.0, &mut stream(seed, 2)).unwrap();
        for s in time_grid(1.0, 25) {
            let (u, v) = path.position(s);
            let bound = c * s * (1.0 + 1e-12) + 1e-15;
            prop_assert!((u + v).abs() <= bound && (u - v).abs() <= bound);
        }
    }

    #[test]
    fn side_laws_agree(lambda in 0.1f64..10.0, t in 0.1f64..3.0, frac in 0.001f64..0.999) {
        let params = PlanarParams::new(lambda, 1.0, 0.5).unwrap();
        let u = frac * t;
        let q = planar::side_density_q(&params, u, t).unwrap();
        let h = planar::side_density_H(&params, 2.0 * u - t, t).unwrap();
        prop_assert!((q - 2.0 * h).abs() <= 1e-10 * q.abs().max(1.0));
    }

    #[test]
    fn dirdep_paths_stay_inside(
        lambda in 0.1f64..50.0,
        c in 0.1f64..20.0,
        x0 in 0.001f64..0.999,
        seed in any::<u64>(),
    ) {
        let params = DirDepParams::new(lambda, c, x0).unwrap();
        let path = dirdep::sample_path(&params, 2.0, &mut stream(seed, 3)).unwrap();
        for s in time_grid(2.0, 40) {
            let x = path.position(s);
            prop_assert!(x > 0.0 && x < 1.0, "x({s}) = {x}");
        }
    }

    #[test]
    fn timevar_paths_respect_the_speed_budget(
        lambda in 0.1f64..20.0,
        a in 0.1f64..2.0,
        b in 0.0f64..2.0,
        seed in any::<u64>(),
    ) {
        let params = TelegraphParams::new(lambda, 1.3).unwrap();
        let profile = SigmaProfile::Affine { a, b };
        let path = timevar::sample_path(&profile, &params, 1.0, &mut stream(seed, 4)).unwrap();
        for s in time_grid(1.0, 20) {
            let budget = 1.3 * profile.integral(0.0, s);
            prop_assert!(path.position(s).abs() <= budget * (1.0 + 1e-12) + 1e-15);
        }
    }

    #[test]
    fn geo2d_log_returns_stay_in_the_square(
        lambda in 0.1f64..20.0,
        p in 0.01f64..0.99,
        x0 in 0.1f64..10.0,
        y0 in 0.1f64..10.0,
        seed in any::<u64>(),
    ) {
        let params = Geo2dParams::new(lambda, 0.8, p, x0, y0).unwrap();
        let s = geo2d::sample(&params, 1.0, &mut stream(seed, 5)).unwrap();
        let (u, v) = ((s.x / x0).ln(), (s.y / y0).ln());
        prop_assert!((u + v).abs() <= 0.8 + 1e-12 && (u - v).abs() <= 0.8 + 1e-12);
    }
}

proptest! {
    #![proptest_config(config(16))]

    #[test]
    fn covariance_scales_quadratically(
        lambda in 0.2f64..10.0,
        a in 0.1f64..2.0,
        b in 0.0f64..2.0,
        s in 0.05f64..1.0,
        dt in 0.0f64..1.0,
    ) {
        let params = TelegraphParams::new(lambda, 0.7).unwrap();
        let profile = SigmaProfile::Affine { a, b };
        let t = s + dt;
        let base = timevar::covariance(&profile, &params, s, t).unwrap();
        let doubled = timevar::covariance(&profile.scaled(2.0), &params, s, t).unwrap();
        prop_assert!(rel(doubled, 4.0 * base) < 1e-12);
        let swapped = timevar::covariance(&profile, &params, t, s).unwrap();
        prop_assert!(rel(base, swapped) < 1e-12);
    }

    #[test]
    fn parallel_and_sequential_replicas_agree(n in 0usize..300, seed in any::<u64>()) {
        let params = PlanarParams::new(3.0, 1.0, 0.4).unwrap();
        let f = |rng: &mut varmotion::rng::Stream| {
            let e = planar::sample_planar_endpoint(&params, 1.0, rng);
            (e.u, e.v, e.events)
        };
        prop_assert_eq!(run_replicas(n, seed, f), run_replicas_seq(n, seed, f));
    }
}

#[test]
fn built_in_laws_carry_unit_mass() {
    let t = 0.8;
    for lambda in [0.3, 1.0, 4.0] {
        let params = TelegraphParams::new(lambda, 1.0).unwrap();
        let models = [
            VelocityModel::constant(1.0, 0.2).unwrap(),
            VelocityModel::linear(1.0, 0.7).unwrap(),
            VelocityModel::logistic(1.0, 0.3).unwrap(),
            VelocityModel::symlogistic(1.0, -0.4).unwrap(),
            // Starts far enough from 0 that the barrier is out of reach by t.
            VelocityModel::power(1.0, 2.0, 0.5, PowerVariant::Reflect).unwrap(),
        ];
        for m in &models {
            let law = m.law(&params);
            let mass = law.total_mass(t, 1e-12);
            assert!((mass - 1.0).abs() < 1e-8, "{} lambda={lambda}: {mass}", m.name());
            let s = m.support(&params, t).unwrap();
            assert_eq!((s.lower, s.upper), (m.w_inv(-t), m.w_inv(t)));
            assert_eq!(law.support(t), (s.lower, s.upper));
        }
    }
}
