use std::f64::consts::PI;

use helfrich_core::constructions::{genus_surface, south_pole_bump, BumpSpec, GenusSurfaceSpec};
use helfrich_core::diagnostics::{euler_genus, mueller_roeger_check, triangulate};
use helfrich_core::energy::{energy_report, genus_from_gauss, HelfrichParams};
use helfrich_core::surface::curvature_at;
use proptest::prelude::*;

fn spec() -> impl Strategy<Value = GenusSurfaceSpec> {
    (2u32..4, 0u32..4, 0.02f64..0.14, 1.0f64..6.0, 0.01f64..0.95)
        .prop_map(|(m, g, d, r, th)| GenusSurfaceSpec::new(m, g, d, r, th))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gauss_bonnet_and_mesh_genus(s in spec()) {
        let asm = genus_surface(&s).unwrap();
        let r = energy_report(&asm, HelfrichParams::default(), 1e-9).unwrap();
        prop_assert!((r.total_gauss - 4.0 * PI * (1.0 - s.g as f64)).abs() < 1e-2, "{}", r.total_gauss);
        prop_assert_eq!(genus_from_gauss(&asm, 1e-9).unwrap(), s.g as i64);
        let mesh = triangulate(&asm, 24).unwrap();
        mesh.check_watertight().unwrap();
        prop_assert!(mesh.is_connected());
        prop_assert_eq!(euler_genus(&mesh).unwrap(), s.g as i64);
    }

    #[test]
    fn willmore_at_least_area_in_ball(s in spec()) {
        let asm = genus_surface(&s).unwrap();
        let r = mueller_roeger_check(&asm, 1e-9).unwrap();
        prop_assert!(r.holds, "{:?}", r);
    }

    #[test]
    fn pointwise_curvature_identities(s in spec(), t in 0.0f64..0.02) {
        let base = genus_surface(&s).unwrap();
        let asm = south_pole_bump(&base, &BumpSpec { t, alpha: 0.5 }).unwrap();
        for p in &asm.patches {
            for (u, v) in p.interior_samples(5) {
                let c = curvature_at(p, u, v).unwrap();
                let scale = 1.0 + c.h * c.h + c.k.abs();
                prop_assert!(c.h * c.h - 4.0 * c.k >= -1e-9 * scale);
                prop_assert!((c.sff - (c.h * c.h - 2.0 * c.k)).abs() <= 1e-8 * scale);
                let q = curvature_at(&p.flipped(), u, v).unwrap();
                prop_assert_eq!((q.h, q.k), (-c.h, c.k));
            }
        }
    }

    #[test]
    fn energies_invariant_under_flip(s in spec()) {
        let asm = genus_surface(&s).unwrap();
        let (a, b) = (
            energy_report(&asm, HelfrichParams::default(), 1e-9).unwrap(),
            energy_report(&asm.flipped(), HelfrichParams::default(), 1e-9).unwrap(),
        );
        prop_assert!((a.willmore - b.willmore).abs() < 1e-9 && (a.total_gauss - b.total_gauss).abs() < 1e-9);
        prop_assert!((a.mean_curvature + b.mean_curvature).abs() < 1e-9);
    }
}
