//! Solver invariants on coarse meshes.

use fgmopt::fem::{
    effective_stress, material_at, run_thermoelastic, MaterialPair, ProblemConfig, SymTensor3, ThermalLoad,
};
use fgmopt::profile::{tensor_product, ProfileScheme};
use fgmopt::rng::seeded;
use proptest::prelude::*;

fn coarse(mut cfg: ProblemConfig, n: usize) -> ProblemConfig {
    cfg.nx = n;
    cfg.ny = n;
    cfg
}

fn random_p2_profile(seed: u64) -> fgmopt::profile::Profile2D {
    let s = ProfileScheme::standard(20, 20, 0.15, 0.06);
    s.genes_to_profile_2d(&s.generate_genes(&mut seeded(seed))).unwrap()
}

#[test]
fn rule_of_mixtures_endpoints() {
    let az = MaterialPair::aluminum_zirconia();
    let metal = material_at(&az, 1.0).unwrap();
    assert_eq!((metal.e, metal.k), (70e9, 233.0));
    let ceramic = material_at(&az, 0.0).unwrap();
    assert_eq!((ceramic.e, ceramic.k), (200e9, 2.2));
    let half = material_at(&MaterialPair::nickel_alumina(), 0.5).unwrap();
    assert!((half.e - 296.25e9).abs() < 1.0, "{}", half.e);
    assert!(material_at(&az, 1.5).is_err());
}

#[test]
fn uniaxial_and_shear_effective_stress() {
    assert!((effective_stress(&SymTensor3::plane(-3e6, 0.0, 0.0, 0.0)) - 3e6).abs() < 1e-6);
    assert!((effective_stress(&SymTensor3::plane(0.0, 0.0, 0.0, 2e6)) - 3f64.sqrt() * 2e6).abs() < 1e-6);
}

#[test]
fn stress_is_linear_in_temperature_change() {
    let p = tensor_product(
        &fgmopt::profile::power_law_profile(8, 2.0),
        &fgmopt::profile::power_law_profile(8, 1.0),
        0.1,
        0.1,
    );
    let mut cfg = coarse(ProblemConfig::problem1(), 8);
    let full = run_thermoelastic(&p, &cfg).unwrap();
    cfg.thermal = ThermalLoad::UniformChange { delta: -350.0 };
    let half = run_thermoelastic(&p, &cfg).unwrap();
    let rel = (full.sigma_e_max - 2.0 * half.sigma_e_max).abs() / full.sigma_e_max;
    assert!(rel < 1e-9, "rel={rel:e}");
    for (a, b) in full.gauss.iter().zip(&half.gauss) {
        assert!((a.effective - 2.0 * b.effective).abs() <= 1e-9 * full.sigma_e_max);
    }
}

#[test]
fn reruns_are_bit_identical() {
    let p = random_p2_profile(5);
    let cfg = coarse(ProblemConfig::problem2(), 8);
    let a = run_thermoelastic(&p, &cfg).unwrap();
    let b = run_thermoelastic(&p, &cfg).unwrap();
    assert_eq!(a.temperature, b.temperature);
    assert_eq!(a.displacement, b.displacement);
    assert_eq!(a.sigma_e_max.to_bits(), b.sigma_e_max.to_bits());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn effective_stress_ignores_hydrostatic_part(
        t in prop::array::uniform6(-1e8f64..1e8),
        p in -1e8f64..1e8,
    ) {
        let s = SymTensor3(t);
        let a = effective_stress(&s);
        let b = effective_stress(&s.shifted(p));
        prop_assert!(a >= 0.0);
        prop_assert!((a - b).abs() <= 1e-7 * (1.0 + a));
    }

    #[test]
    fn problem2_fields_obey_the_physics(seed in any::<u64>()) {
        let p = random_p2_profile(seed);
        let cfg = coarse(ProblemConfig::problem2(), 6);
        let r = run_thermoelastic(&p, &cfg).unwrap();
        // maximum principle: boundary data lies in [0, 500]
        prop_assert!(r.temperature.iter().all(|&t| (-1e-9..=500.0 + 1e-9).contains(&t)));
        let s = r.summary("problem2");
        let imbalance = s.heat_imbalance.unwrap();
        prop_assert!(imbalance.abs() <= 1e-8, "imbalance {imbalance:e}");
        prop_assert!(r.gauss.iter().all(|g| g.effective >= 0.0));
        let peak = r.gauss.iter().map(|g| g.effective).fold(0.0, f64::max);
        prop_assert_eq!(peak, r.sigma_e_max);
        prop_assert!((0.0..=1.0).contains(&r.v_ca));
    }
}
