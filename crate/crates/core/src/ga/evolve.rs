use std::io::Write;

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ConstraintSpec, GaConfig};
use super::fitness::{hybrid_fitness, EvalSource, Evaluator, Individual};
use super::operators::{eta_schedule, polynomial_mutation, sbx_crossover, tournament_select};
use super::{GaError, Result};
use crate::fem::{run_thermoelastic, FemSummary};
use crate::profile::GradationGenes;
use crate::rng::{derived, seeded};

/// Dispatch decision for one evaluated individual.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispatchEntry {
    pub generation: usize,
    pub index: usize,
    pub sigma_prediction: Option<f64>,
    pub eval_source: EvalSource,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: usize,
    pub best_fitness: f64,
    pub best_objective: f64,
    pub best_penalty: f64,
    pub best_sigma_e_max: f64,
    pub best_v_ca: f64,
    pub feasible_fraction: f64,
    /// New evaluations this generation; elites are not re-scored.
    pub fem_evaluations: usize,
    pub surrogate_evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Stall,
    MaxGenerations,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub build: String,
    pub config: GaConfig,
    pub spec: ConstraintSpec,
    pub termination: Termination,
    pub generations: Vec<GenerationRecord>,
    pub dispatch: Vec<DispatchEntry>,
    /// Best feasible individual seen, or the best overall if none was feasible.
    pub optimum: Individual,
    pub optimum_feasible: bool,
    pub profile_x: Vec<f64>,
    pub profile_y: Vec<f64>,
    /// Independent FEM solve of the optimum.
    pub verification: FemSummary,
    /// `|optimum sigma - FEM sigma| / FEM sigma`.
    pub sigma_relative_error: f64,
    /// Constraints re-evaluated on the FEM solution.
    pub verified_feasible: bool,
}

impl RunRecord {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| GaError::InvalidConfig(e.to_string()))
    }

    pub fn evaluation_counts(&self) -> (usize, usize) {
        self.generations.iter().fold((0, 0), |(f, s), g| (f + g.fem_evaluations, s + g.surrogate_evaluations))
    }

    /// `generation,best_sigma_e_max_mpa,best_v_ca,best_fitness,feasible_fraction`.
    pub fn write_convergence_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "generation,best_sigma_e_max_mpa,best_v_ca,best_fitness,feasible_fraction")?;
        for g in &self.generations {
            writeln!(
                out,
                "{},{},{},{},{}",
                g.generation,
                g.best_sigma_e_max / 1e6,
                g.best_v_ca,
                g.best_fitness,
                g.feasible_fraction
            )?;
        }
        Ok(())
    }
}

fn evaluate_all(
    genes: Vec<Vec<f64>>,
    ev: &Evaluator<'_>,
    sigma_star: f64,
    n_ax: usize,
    n_ay: usize,
) -> Result<Vec<Individual>> {
    genes
        .into_par_iter()
        .map(|g| hybrid_fitness(&GradationGenes::from_vec(&g, n_ax, n_ay)?, ev, sigma_star))
        .collect()
}

/// Stable ranking by fitness; ties keep population order.
fn ranking(pop: &[Individual]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..pop.len()).collect();
    idx.sort_by(|&a, &b| pop[a].fitness.total_cmp(&pop[b].fitness));
    idx
}

/// Runs the GA until the stall rule fires after `min_generations`, or
/// `max_generations` is reached. `initial` genomes, when given, seed the
/// first population; the rest is drawn from the profile scheme.
pub fn evolve(config: &GaConfig, ev: &Evaluator<'_>, initial: Option<&[GradationGenes]>) -> Result<RunRecord> {
    config.validate()?;
    ev.validate()?;
    let bounds = ev.scheme.gene_bounds();
    let (n_ax, n_ay) = (ev.scheme.x.n_alphas(), ev.scheme.y.n_alphas());
    let tolerance = config.stall_tolerance.unwrap_or_else(|| ev.spec.objective.default_stall_tolerance());
    let mut rng = seeded(config.seed);

    let mut genes0: Vec<Vec<f64>> = Vec::with_capacity(config.population_size);
    for g in initial.unwrap_or(&[]).iter().take(config.population_size) {
        let v = g.to_vec();
        bounds.check(&v)?;
        genes0.push(v);
    }
    while genes0.len() < config.population_size {
        genes0.push(ev.scheme.generate_genes(&mut rng).to_vec());
    }
    let mut pop = evaluate_all(genes0, ev, config.sigma_star, n_ax, n_ay)?;

    let mut dispatch = Vec::new();
    let mut generations = Vec::new();
    let mut best_feasible: Option<Individual> = None;
    let mut best_any: Option<Individual> = None;
    let mut fresh_from = 0;
    let mut generation = 0;
    let termination = loop {
        let order = ranking(&pop);
        let best = &pop[order[0]];
        let fresh = &pop[fresh_from..];
        for (i, ind) in pop.iter().enumerate().skip(fresh_from) {
            dispatch.push(DispatchEntry { generation, index: i, sigma_prediction: ind.sigma_prediction, eval_source: ind.eval_source });
        }
        let fem = fresh.iter().filter(|i| i.eval_source == EvalSource::Fem).count();
        generations.push(GenerationRecord {
            generation,
            best_fitness: best.fitness,
            best_objective: best.objective,
            best_penalty: best.penalty,
            best_sigma_e_max: best.sigma_e_max,
            best_v_ca: best.v_ca,
            feasible_fraction: pop.iter().filter(|i| i.is_feasible()).count() as f64 / pop.len() as f64,
            fem_evaluations: fem,
            surrogate_evaluations: fresh.len() - fem,
        });
        if best_any.as_ref().map_or(true, |b| best.fitness < b.fitness) {
            best_any = Some(best.clone());
        }
        if let Some(f) = order.iter().map(|&i| &pop[i]).find(|i| i.is_feasible()) {
            if best_feasible.as_ref().map_or(true, |b| f.fitness < b.fitness) {
                best_feasible = Some(f.clone());
            }
        }

        if generation >= config.min_generations && generation >= config.stall_generations {
            let then = generations[generation - config.stall_generations].best_fitness;
            if then - best.fitness <= tolerance {
                break Termination::Stall;
            }
        }
        if generation >= config.max_generations {
            break Termination::MaxGenerations;
        }

        let eta_c = eta_schedule(config.eta_c_base, generation, config.eta_sign);
        let eta_m = eta_schedule(config.eta_m_base, generation, config.eta_sign);
        let n_children = config.population_size - config.elite_count;
        let mut children: Vec<Vec<f64>> = Vec::with_capacity(n_children + 1);
        let mut pair = 0u64;
        while children.len() < n_children {
            let a = tournament_select(&pop, config.tournament_size, &mut rng);
            let b = tournament_select(&pop, config.tournament_size, &mut rng);
            let mut local = derived(config.seed, generation as u64 + 1, pair);
            pair += 1;
            let (pa, pb) = (pop[a].genes.to_vec(), pop[b].genes.to_vec());
            let (mut c1, mut c2) = if local.gen::<f64>() < config.crossover_probability {
                sbx_crossover(&pa, &pb, eta_c, &bounds, config.sbx_gene_probability, &mut local)
            } else {
                (pa, pb)
            };
            polynomial_mutation(&mut c1, eta_m, &bounds, config.mutation_probability, &mut local);
            polynomial_mutation(&mut c2, eta_m, &bounds, config.mutation_probability, &mut local);
            children.push(c1);
            children.push(c2);
        }
        children.truncate(n_children);

        let mut next: Vec<Individual> = order[..config.elite_count].iter().map(|&i| pop[i].clone()).collect();
        next.extend(evaluate_all(children, ev, config.sigma_star, n_ax, n_ay)?);
        pop = next;
        fresh_from = config.elite_count;
        generation += 1;
    };

    let optimum_feasible = best_feasible.is_some();
    let optimum = best_feasible.or(best_any).expect("at least one generation");
    let (px, py) = ev.scheme.genes_to_profiles(&optimum.genes)?;
    let profile = ev.scheme.genes_to_profile_2d(&optimum.genes)?;
    let fem = run_thermoelastic(&profile, ev.problem)?;
    let verification = fem.summary(&ev.problem.name);
    let check = super::penalty::ConstraintValues {
        sigma_e_max: Some(fem.sigma_e_max),
        v_ca: Some(fem.v_ca),
        max_metal_temperature: fem.max_metal_temperature,
    };
    let verified_feasible = super::penalty::static_penalty(&check, ev.spec)? == 0.0;
    let sigma_relative_error = (optimum.sigma_e_max - fem.sigma_e_max).abs() / fem.sigma_e_max.abs().max(f64::MIN_POSITIVE);
    Ok(RunRecord {
        build: crate::BUILD_FINGERPRINT.into(),
        config: config.clone(),
        spec: ev.spec.clone(),
        termination,
        generations,
        dispatch,
        optimum,
        optimum_feasible,
        profile_x: px.values().to_vec(),
        profile_y: py.values().to_vec(),
        verification,
        sigma_relative_error,
        verified_feasible,
    })
}
