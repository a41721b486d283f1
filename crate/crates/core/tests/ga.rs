use fgmopt::fem::ProblemConfig;
use fgmopt::ga::{
    evolve, hybrid_fitness, polynomial_mutation, sbx_crossover, static_penalty, tournament_select, uses_surrogate,
    ConstraintSpec, ConstraintValues, EvalSource, Evaluator, GaConfig, Individual, Objective, Surrogates, Termination,
};
use fgmopt::neural::{StressConfig, StressSurrogate};
use fgmopt::profile::{GeneBounds, GradationGenes, ProfileScheme};
use fgmopt::rng::seeded;
use proptest::prelude::*;
use rand::Rng;

fn scheme2() -> ProfileScheme {
    ProfileScheme::standard(20, 20, 0.15, 0.06)
}

/// Stress surrogate whose prediction is `(a + b * input[1]) * 1e6` Pa.
fn affine_surrogate(a: f64, b: f64) -> StressSurrogate {
    let mut m = StressSurrogate::new(42, &StressConfig { hidden: vec![2], ..StressConfig::problem2() }, &mut seeded(0)).unwrap();
    let layers = m.net.layers_mut();
    layers[0].weights.iter_mut().for_each(|w| *w = 0.0);
    layers[0].weights[1 * 2] = 1.0; // input 1 -> hidden 0
    layers[0].bias = vec![0.0, 1.0];
    layers[0].activation = fgmopt::neural::Activation::Identity;
    layers[1].weights = vec![b, a];
    layers[1].bias = vec![0.0];
    m
}

fn dummy(fitness: f64) -> Individual {
    Individual {
        genes: GradationGenes { phi_x1: 0.5, phi_y1: 0.05, alphas_x: vec![], alphas_y: vec![] },
        objective: fitness,
        penalty: 0.0,
        fitness,
        eval_source: EvalSource::Fem,
        sigma_prediction: None,
        sigma_e_max: fitness,
        v_ca: 0.5,
        max_metal_temperature: None,
    }
}

#[test]
fn sbx_preserves_parent_mean_with_wide_bounds() {
    let mut rng = seeded(1);
    let bounds = GeneBounds { lower: vec![-1e12; 5], upper: vec![1e12; 5] };
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let p1: Vec<f64> = (0..5).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let p2: Vec<f64> = (0..5).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (c1, c2) = sbx_crossover(&p1, &p2, 2.0, &bounds, 1.0, &mut rng);
        for i in 0..5 {
            worst = worst.max(((c1[i] + c2[i]) - (p1[i] + p2[i])).abs() / 2.0);
        }
    }
    assert!(worst < 1e-12, "mean drift {worst}");
}

#[test]
fn offspring_and_mutants_stay_in_bounds() {
    let bounds = scheme2().gene_bounds();
    let mut rng = seeded(2);
    let draw = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<f64> {
        bounds.lower.iter().zip(&bounds.upper).map(|(&l, &h)| if rng.gen_bool(0.2) { if rng.gen() { l } else { h } } else { rng.gen_range(l..=h) }).collect()
    };
    for t in 0..100_000 {
        let eta = [0.01, 0.3, 2.0, 10.0, 50.0][t % 5];
        let (p1, p2) = (draw(&mut rng), draw(&mut rng));
        let (mut c1, c2) = sbx_crossover(&p1, &p2, eta, &bounds, 0.5, &mut rng);
        assert!(bounds.contains(&c1) && bounds.contains(&c2), "crossover left bounds at trial {t}");
        polynomial_mutation(&mut c1, eta * 5.0, &bounds, 0.4, &mut rng);
        assert!(bounds.contains(&c1), "mutation left bounds at trial {t}");
    }
}

#[test]
fn mutation_concentrates_as_eta_grows() {
    let bounds = GeneBounds { lower: vec![0.0], upper: vec![1.0] };
    let median = |eta: f64| {
        let mut rng = seeded(3);
        let mut d: Vec<f64> = (0..20_000)
            .map(|_| {
                let mut g = [0.5];
                polynomial_mutation(&mut g, eta, &bounds, 1.0, &mut rng);
                (g[0] - 0.5).abs()
            })
            .collect();
        d.sort_by(f64::total_cmp);
        d[d.len() / 2]
    };
    let (m5, m20, m100) = (median(5.0), median(20.0), median(100.0));
    assert!(m5 > m20 && m20 > m100, "{m5} {m20} {m100}");
}

#[test]
fn tournament_pressure() {
    let pop: Vec<Individual> = (0..20).map(|i| dummy(i as f64)).collect();
    let mut rng = seeded(4);
    assert_eq!(tournament_select(&pop, 20, &mut rng), 0);
    let worst = (0..10_000).filter(|_| tournament_select(&pop, 4, &mut rng) == 19).count();
    assert!((worst as f64) < 10.0);
    let tied: Vec<Individual> = (0..6).map(|_| dummy(1.0)).collect();
    for _ in 0..100 {
        let i = tournament_select(&tied, 6, &mut rng);
        assert_eq!(i, 0);
    }
}

#[test]
fn dispatch_follows_threshold() {
    assert!(uses_surrogate(-5.0, 0.0));
    assert!(uses_surrogate(60e6, 50e6));
    assert!(uses_surrogate(50e6, 50e6));
    assert!(!uses_surrogate(40e6, 50e6));

    let problem = ProblemConfig::problem2();
    let scheme = scheme2();
    let spec = ConstraintSpec::unconstrained(Objective::Stress);
    let genes = scheme.generate_genes(&mut seeded(5));
    for (level, expected) in [(40.0, EvalSource::Fem), (60.0, EvalSource::Surrogate)] {
        let s = affine_surrogate(level, 0.0);
        let ev = Evaluator { problem: &problem, scheme: &scheme, spec: &spec, surrogates: Some(Surrogates { stress: &s, temperature: None }) };
        let ind = hybrid_fitness(&genes, &ev, 50e6).unwrap();
        assert_eq!(ind.eval_source, expected);
        assert!((ind.sigma_prediction.unwrap() - level * 1e6).abs() < 1e-3);
        assert_eq!(ind.fitness, ind.objective + ind.penalty);
    }
    let s = affine_surrogate(40.0, 0.0);
    let ev = Evaluator { problem: &problem, scheme: &scheme, spec: &spec, surrogates: Some(Surrogates { stress: &s, temperature: None }) };
    assert_eq!(hybrid_fitness(&genes, &ev, 0.0).unwrap().eval_source, EvalSource::Surrogate);
}

#[test]
fn temperature_constraint_requires_operator_model() {
    let problem = ProblemConfig::problem2();
    let scheme = scheme2();
    let spec = ConstraintSpec { theta_max: Some(275.0), ..ConstraintSpec::unconstrained(Objective::Stress) };
    let s = affine_surrogate(60.0, 0.0);
    let ev = Evaluator { problem: &problem, scheme: &scheme, spec: &spec, surrogates: Some(Surrogates { stress: &s, temperature: None }) };
    assert!(evolve(&GaConfig { population_size: 4, min_generations: 1, ..GaConfig::problem2() }, &ev, None).is_err());
}

fn surrogate_run(seed: u64) -> fgmopt::ga::RunRecord {
    let problem = ProblemConfig::problem2();
    let scheme = scheme2();
    let spec = ConstraintSpec { v_star: Some(0.3), ..ConstraintSpec::unconstrained(Objective::Stress) };
    let s = affine_surrogate(30.0, 500.0);
    let ev = Evaluator { problem: &problem, scheme: &scheme, spec: &spec, surrogates: Some(Surrogates { stress: &s, temperature: None }) };
    let cfg = GaConfig { population_size: 24, min_generations: 15, max_generations: 25, sigma_star: 0.0, seed, ..GaConfig::problem2() };
    evolve(&cfg, &ev, None).unwrap()
}

#[test]
fn elitism_keeps_best_fitness_monotone_and_runs_are_reproducible() {
    let a = surrogate_run(9);
    for w in a.generations.windows(2) {
        assert!(w[1].best_fitness <= w[0].best_fitness);
    }
    assert!(a.generations.last().unwrap().best_fitness < a.generations[0].best_fitness);
    assert_eq!(a.to_json().unwrap(), surrogate_run(9).to_json().unwrap());
    assert_ne!(a.to_json().unwrap(), surrogate_run(10).to_json().unwrap());
    let (fem, surr) = a.evaluation_counts();
    assert_eq!(fem, 0);
    assert_eq!(surr, 24 + (a.generations.len() - 1) * 22);
    assert!(a.verification.sigma_e_max > 0.0);
}

#[test]
fn flat_landscape_stops_at_min_generations() {
    let problem = ProblemConfig::problem2();
    let scheme = scheme2();
    let spec = ConstraintSpec::unconstrained(Objective::Stress);
    let s = affine_surrogate(70.0, 0.0);
    let ev = Evaluator { problem: &problem, scheme: &scheme, spec: &spec, surrogates: Some(Surrogates { stress: &s, temperature: None }) };
    let cfg = GaConfig { population_size: 8, min_generations: 6, stall_generations: 3, max_generations: 40, sigma_star: 0.0, ..GaConfig::problem2() };
    let rec = evolve(&cfg, &ev, None).unwrap();
    assert_eq!(rec.termination, Termination::Stall);
    assert_eq!(rec.generations.len(), 7);
    assert_eq!(rec.generations.last().unwrap().generation, 6);
}

proptest! {
    #[test]
    fn penalty_zero_iff_feasible(v in 0.0f64..1.0, t in 0.0f64..600.0, s in 0.0f64..3e8) {
        let spec = ConstraintSpec { v_star: Some(0.15), theta_max: Some(275.0), sigma_allow: Some(150e6), ..ConstraintSpec::unconstrained(Objective::CeramicFraction) };
        let vals = ConstraintValues { v_ca: Some(v), max_metal_temperature: Some(t), sigma_e_max: Some(s) };
        let p = static_penalty(&vals, &spec).unwrap();
        let feasible = v <= 0.15 && t <= 275.0 && s <= 150e6;
        prop_assert_eq!(p == 0.0, feasible);
        prop_assert!(p >= 0.0);
    }

    #[test]
    fn penalty_monotone_in_violation(a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let spec = ConstraintSpec { v_star: Some(0.15), ..ConstraintSpec::unconstrained(Objective::Stress) };
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let p = |v: f64| static_penalty(&ConstraintValues { v_ca: Some(v), ..Default::default() }, &spec).unwrap();
        prop_assert!(p(lo) <= p(hi));
    }

    #[test]
    fn weight_scaling_keeps_feasible_ranking(
        pts in prop::collection::vec((0.0f64..0.4, 1e6f64..2e8), 2..20),
        factor in 0.1f64..100.0,
    ) {
        let spec = ConstraintSpec { v_star: Some(0.2), ..ConstraintSpec::unconstrained(Objective::Stress) };
        let scaled = spec.scaled_weights(factor);
        let score = |sp: &ConstraintSpec| -> Vec<(bool, f64)> {
            pts.iter().map(|&(v, s)| {
                let p = static_penalty(&ConstraintValues { v_ca: Some(v), sigma_e_max: Some(s), ..Default::default() }, sp).unwrap();
                (p == 0.0, s + p)
            }).collect()
        };
        let (a, b) = (score(&spec), score(&scaled));
        for i in 0..pts.len() {
            prop_assert_eq!(a[i].0, b[i].0);
            for j in 0..pts.len() {
                if a[i].0 && a[j].0 {
                    prop_assert_eq!(a[i].1 < a[j].1, b[i].1 < b[j].1);
                }
            }
        }
    }
}
