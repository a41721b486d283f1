//! Acceptance criteria 1-8. Each test prints one `criterion N: PASS|FAIL`
//! line with the measured values, then asserts the verdict.
//!
//! Criterion 3 generates 3000 FEM samples and trains both surrogates, which
//! takes several minutes; criterion 7 reuses the trained stress model.

use std::sync::OnceLock;

use fgmopt::fem::verify::run_checks;
use fgmopt::fem::{run_thermoelastic, ProblemConfig};
use fgmopt::ga::{
    evolve, polynomial_mutation, sbx_crossover, uses_surrogate, ConstraintSpec, EvalSource, Evaluator, GaConfig,
    Objective, Surrogates,
};
use fgmopt::neural::{Activation, DenseNet, OperatorConfig, OperatorNet, StressConfig, StressSurrogate};
use fgmopt::pipeline::{
    generate_dataset, load_dataset, operator_data, run_experiment, scheme_for, split_indices, train_stress,
    ExperimentConfig, Sample,
};
use fgmopt::profile::{
    power_law_alphas, power_law_exact_ratios, power_law_first_node, power_law_profile, replay_ratios, GeneBounds,
    Profile2D,
};
use fgmopt::rng::seeded;
use rand::Rng;

fn verdict(n: usize, pass: bool, detail: &str) {
    println!("criterion {n}: {} {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {n} failed: {detail}");
}

#[test]
fn criterion_1_fem_analytic_verification() {
    let checks = run_checks().expect("verification problems solve");
    let get = |name: &str| checks.iter().find(|c| c.name == name).unwrap_or_else(|| panic!("missing check {name}"));
    let required = [
        ("thermal_patch_test", 1e-9),
        ("parabolic_conduction", 1e-6),
        ("elastic_patch_test", 1e-8),
        ("free_expansion_stress_ratio", 1e-6),
    ];
    let mut parts = Vec::new();
    let mut pass = checks.iter().all(|c| c.passed);
    for (name, tol) in required {
        let c = get(name);
        pass &= c.passed && c.tolerance <= tol;
        parts.push(format!("{name}={:.2e}", c.value));
    }
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    verdict(1, pass, &format!("{} checks, failed {failed:?}; {}", checks.len(), parts.join(" ")));
}

fn peak_stress(cfg: &ProblemConfig, ceramic: impl Fn(f64, f64) -> f64) -> f64 {
    let profile = Profile2D::from_fn(cfg.nx, cfg.ny, cfg.length, cfg.height, ceramic);
    run_thermoelastic(&profile, cfg).expect("reference solve").sigma_e_max / 1e6
}

#[test]
fn criterion_2_reference_profile_stresses() {
    let p2 = ProblemConfig::problem2();
    let p1 = ProblemConfig::problem1();
    let mut rows = vec![
        ("p2 linear-y", peak_stress(&p2, |_, y| y), 80.0),
        ("p2 bilinear", peak_stress(&p2, |x, y| x * y), 97.2),
    ];
    for (name, m, reference) in [("p1 m=0.5", 0.5, 410.0), ("p1 m=1", 1.0, 309.0), ("p1 m=2", 2.0, 355.0), ("p1 m=3", 3.0, 486.0)] {
        rows.push((name, peak_stress(&p1, |_, y| y.powf(m)), reference));
    }
    let pass = rows.iter().all(|&(_, v, r)| (v - r).abs() <= 0.1 * r);
    let detail: Vec<String> =
        rows.iter().map(|(name, v, r)| format!("{name} {v:.1} MPa (ref {r}, {:+.0}%)", 100.0 * (v / r - 1.0))).collect();
    verdict(2, pass, &detail.join("; "));
}

struct Trained {
    stress: StressSurrogate,
    stress_test_r2: f64,
    operator_test_r2: f64,
}

const DATA_SEED: u64 = 11;

fn trained() -> &'static Trained {
    static CELL: OnceLock<Trained> = OnceLock::new();
    CELL.get_or_init(|| {
        let problem = ProblemConfig::problem2();
        let dir = tempfile::tempdir().unwrap();
        generate_dataset(&problem, 3000, DATA_SEED, dir.path()).expect("dataset");
        let ds = load_dataset(dir.path()).expect("dataset loads");

        let (stress, history) = train_stress(&ds, &StressConfig::problem2(), 1).expect("stress training");
        let stress_test_r2 = history.last().and_then(|r| r.test_r2).expect("test metrics");

        // The first 2000 samples of a seed are the samples a 2000-sample run
        // with that seed would draw, so they are split the same way.
        let mut first: Vec<&Sample> = ds.train.iter().chain(&ds.test).filter(|s| s.index < 2000).collect();
        first.sort_by_key(|s| s.index);
        let (tr, te) = split_indices(2000, DATA_SEED);
        let pick = |ix: &[usize]| -> Vec<Sample> { ix.iter().map(|&i| first[i].clone()).collect() };
        let scheme = scheme_for(&problem);
        let train = operator_data(&pick(&tr), &scheme).unwrap();
        let test = operator_data(&pick(&te), &scheme).unwrap();
        let cfg = OperatorConfig::default();
        let mut rng = seeded(1);
        let mut net = OperatorNet::new(scheme.input_dim(), scheme.length, scheme.height, &cfg, &mut rng).unwrap();
        let history = net.train(&train, Some(&test), &cfg.stages, &mut rng).expect("operator training");
        let operator_test_r2 = history.last().and_then(|r| r.test_r2).expect("test metrics");
        Trained { stress, stress_test_r2, operator_test_r2 }
    })
}

#[test]
fn criterion_3_surrogate_quality() {
    let t = trained();
    let pass = t.stress_test_r2 >= 0.95 && t.operator_test_r2 >= 0.98;
    verdict(
        3,
        pass,
        &format!("stress DNN test R2 {:.4} (>= 0.95); operator test R2 {:.4} (>= 0.98)", t.stress_test_r2, t.operator_test_r2),
    );
}

#[test]
fn criterion_4_gradient_correctness() {
    let mut rng = seeded(4);
    let (mut worst, mut probed) = (0.0f64, 0);
    for (sizes, hidden) in [(vec![5, 7, 6, 2], Activation::Tanh), (vec![4, 9, 3], Activation::Tanh)] {
        let mut net = DenseNet::new(&sizes, hidden, Activation::Identity, &mut rng).unwrap();
        let batch = 6;
        let x: Vec<f64> = (0..batch * sizes[0]).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let y: Vec<f64> = (0..batch * sizes[sizes.len() - 1]).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (_, grads) = net.mse_gradients(&x, &y, batch).unwrap();
        let analytic: Vec<f64> = grads.slices().concat();
        let n_params = analytic.len();
        for _ in 0..50 {
            let k = rng.gen_range(0..n_params);
            let loss_at = |net: &mut DenseNet, delta: f64| {
                let mut off = k;
                for s in net.param_slices_mut() {
                    if off < s.len() {
                        s[off] += delta;
                        break;
                    }
                    off -= s.len();
                }
                net.mse_gradients(&x, &y, batch).unwrap().0
            };
            let h = 1e-5;
            let plus = loss_at(&mut net, h);
            let minus = loss_at(&mut net, -2.0 * h);
            loss_at(&mut net, h);
            let fd = (plus - minus) / (2.0 * h);
            let rel = (fd - analytic[k]).abs() / fd.abs().max(analytic[k].abs()).max(1e-8);
            worst = worst.max(rel);
            probed += 1;
        }
    }
    verdict(4, probed == 100 && worst <= 1e-4, &format!("{probed} parameters, worst relative error {worst:.2e}"));
}

#[test]
fn criterion_5_ga_operator_properties() {
    let mut rng = seeded(5);
    let wide = GeneBounds { lower: vec![-1e12; 4], upper: vec![1e12; 4] };
    let mut drift = 0.0f64;
    for _ in 0..10_000 {
        let p1: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let p2: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (c1, c2) = sbx_crossover(&p1, &p2, 2.0, &wide, 1.0, &mut rng);
        for i in 0..4 {
            drift = drift.max(((c1[i] + c2[i]) - (p1[i] + p2[i])).abs() / 2.0);
        }
    }

    let problem = ProblemConfig::problem2();
    let scheme = scheme_for(&problem);
    let bounds = scheme.gene_bounds();
    let draw = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<f64> {
        bounds.lower.iter().zip(&bounds.upper).map(|(&l, &h)| rng.gen_range(l..=h)).collect()
    };
    let mut escapes = 0;
    for t in 0..100_000 {
        let eta = [0.01, 0.5, 2.0, 20.0][t % 4];
        let (p1, p2) = (draw(&mut rng), draw(&mut rng));
        let (mut c1, c2) = sbx_crossover(&p1, &p2, eta, &bounds, 0.5, &mut rng);
        escapes += usize::from(!bounds.contains(&c1) || !bounds.contains(&c2));
        polynomial_mutation(&mut c1, eta * 5.0, &bounds, 0.4, &mut rng);
        escapes += usize::from(!bounds.contains(&c1));
    }

    let spec = ConstraintSpec::unconstrained(Objective::Stress);
    let ev = Evaluator::fem_only(&problem, &scheme, &spec);
    let cfg = GaConfig { population_size: 12, min_generations: 8, max_generations: 8, seed: 5, ..GaConfig::problem2() };
    let a = evolve(&cfg, &ev, None).unwrap();
    let b = evolve(&cfg, &ev, None).unwrap();
    let monotone = a.generations.windows(2).all(|w| w[1].best_fitness <= w[0].best_fitness);
    let identical = a.to_json().unwrap() == b.to_json().unwrap();

    let pass = drift <= 1e-12 && escapes == 0 && monotone && identical;
    verdict(
        5,
        pass,
        &format!("SBX mean drift {drift:.1e}; {escapes} out-of-bounds in 1e5 trials; elitism monotone {monotone}; bit-identical rerun {identical}"),
    );
}

fn desk_run(case: &str) -> fgmopt::pipeline::ResultBundle {
    let cfg: ExperimentConfig = serde_json::from_value(serde_json::json!({
        "problem": "problem2",
        "case": case,
        "fem_only": true,
        "seed": 1,
        "ga": {"population_size": 40, "min_generations": 30, "max_generations": 30}
    }))
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    run_experiment(&cfg, None, dir.path()).expect("experiment runs").bundle
}

#[test]
fn criterion_6_end_to_end_optimization() {
    let problem = ProblemConfig::problem2();
    let scheme = scheme_for(&problem);
    let mut pass = true;
    let mut detail = Vec::new();
    for case in ["case1", "case2", "case3", "case4"] {
        let rec = desk_run(case).record;
        let v = &rec.verification;
        let profile = scheme.genes_to_profile_2d(&rec.optimum.genes).unwrap();
        let fem = run_thermoelastic(&profile, &problem).unwrap();
        let reverified = fem.sigma_e_max == v.sigma_e_max;
        let sigma = v.sigma_e_max / 1e6;
        let t_metal = v.max_metal_temperature.unwrap_or(f64::NAN);
        let ok = reverified
            && match case {
                "case1" => sigma <= 40.0,
                "case2" => rec.verified_feasible && v.v_ca <= 0.15 + 1e-3 && sigma <= 120.0,
                "case3" => t_metal <= 275.0,
                _ => rec.verified_feasible && v.v_ca <= 0.45,
            };
        pass &= ok;
        detail.push(format!(
            "{case} {} sigma {sigma:.1} MPa, V_ca {:.3}, metal T {t_metal:.0} C, feasible {}",
            if ok { "ok" } else { "MISS" },
            v.v_ca,
            rec.verified_feasible
        ));
    }
    verdict(6, pass, &detail.join("; "));
}

#[test]
fn criterion_7_hybrid_dispatch_audit() {
    let t = trained();
    let problem = ProblemConfig::problem2();
    let scheme = scheme_for(&problem);
    let spec = ConstraintSpec::unconstrained(Objective::Stress);
    let ev = Evaluator {
        problem: &problem,
        scheme: &scheme,
        spec: &spec,
        surrogates: Some(Surrogates { stress: &t.stress, temperature: None }),
    };
    let sigma_star = 50e6;
    let cfg = GaConfig { population_size: 40, min_generations: 20, max_generations: 20, sigma_star, seed: 7, ..GaConfig::problem2() };
    let rec = evolve(&cfg, &ev, None).unwrap();
    let violations = rec
        .dispatch
        .iter()
        .filter(|e| {
            let expected = match e.sigma_prediction {
                Some(p) if uses_surrogate(p, sigma_star) => EvalSource::Surrogate,
                _ => EvalSource::Fem,
            };
            e.eval_source != expected
        })
        .count();
    let (fem, surr) = rec.evaluation_counts();
    let pass = violations == 0 && !rec.dispatch.is_empty();
    verdict(7, pass, &format!("{} decisions, {fem} FEM, {surr} surrogate, {violations} violations", rec.dispatch.len()));
}

#[test]
fn criterion_8_power_law_subset() {
    let n = 100;
    let max_err = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let mut exact_worst = 0.0f64;
    for m in [0.5, 1.0, 2.0, 3.0] {
        let replay = replay_ratios(power_law_first_node(n, m), &power_law_exact_ratios(n, m), false);
        exact_worst = exact_worst.max(max_err(&replay, power_law_profile(n, m).values()));
    }
    // First-order ratios overshoot the last node, which normalization absorbs.
    let mut first_order = Vec::new();
    for m in [1.0, 2.0, 3.0] {
        let replay = replay_ratios(power_law_first_node(n, m), &power_law_alphas(n, m), true);
        first_order.push((m, max_err(&replay, power_law_profile(n, m).values())));
    }
    let pass = exact_worst <= 1e-12 && first_order.iter().all(|&(_, e)| e <= 0.01);
    let fo: Vec<String> = first_order.iter().map(|(m, e)| format!("m={m} {e:.2e}")).collect();
    verdict(8, pass, &format!("exact replay {exact_worst:.1e}; first-order n=100 {}", fo.join(" ")));
}
