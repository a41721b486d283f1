use rand::seq::index::sample;
use rand::Rng as _;

use super::config::EtaSign;
use super::fitness::Individual;
use crate::profile::GeneBounds;
use crate::rng::Rng;

/// Lower limit on the distribution indices.
pub const ETA_FLOOR: f64 = 0.01;

/// `base [1 + (1 - exp(+-g / 100)) / 2]`, floored at [`ETA_FLOOR`].
pub fn eta_schedule(base: f64, generation: usize, sign: EtaSign) -> f64 {
    let e = match sign {
        EtaSign::Positive => (generation as f64 / 100.0).exp(),
        EtaSign::Negative => (-(generation as f64) / 100.0).exp(),
    };
    (base * (1.0 + 0.5 * (1.0 - e))).max(ETA_FLOOR)
}

/// Index of the fittest of `k` distinct random members; ties go to the lower index.
pub fn tournament_select(population: &[Individual], k: usize, rng: &mut Rng) -> usize {
    let k = k.clamp(1, population.len());
    let mut best: Option<usize> = None;
    for i in sample(rng, population.len(), k).into_iter() {
        best = match best {
            Some(b) if population[b].fitness < population[i].fitness => Some(b),
            Some(b) if population[b].fitness == population[i].fitness && b < i => Some(b),
            _ => Some(i),
        };
    }
    best.expect("k >= 1")
}

fn spread(u: f64, alpha: f64, eta: f64) -> f64 {
    let e = 1.0 / (eta + 1.0);
    if u <= 1.0 / alpha {
        (u * alpha).powf(e)
    } else {
        (1.0 / (2.0 - u * alpha)).powf(e)
    }
}

/// Bounded simulated binary crossover. Each gene is recombined with
/// probability `gene_probability`; the children are then swapped with
/// probability 1/2.
pub fn sbx_crossover(
    p1: &[f64],
    p2: &[f64],
    eta: f64,
    bounds: &GeneBounds,
    gene_probability: f64,
    rng: &mut Rng,
) -> (Vec<f64>, Vec<f64>) {
    let mut c1 = p1.to_vec();
    let mut c2 = p2.to_vec();
    for i in 0..p1.len() {
        if rng.gen::<f64>() > gene_probability {
            continue;
        }
        let (lo, hi) = (bounds.lower[i], bounds.upper[i]);
        let (y1, y2) = if p1[i] <= p2[i] { (p1[i], p2[i]) } else { (p2[i], p1[i]) };
        let d = y2 - y1;
        if d <= 1e-14 {
            continue;
        }
        let u: f64 = rng.gen();
        let alpha_of = |beta: f64| 2.0 - beta.powf(-(eta + 1.0));
        let b1 = spread(u, alpha_of(1.0 + 2.0 * (y1 - lo) / d), eta);
        let b2 = spread(u, alpha_of(1.0 + 2.0 * (hi - y2) / d), eta);
        let lo_child = (0.5 * ((y1 + y2) - b1 * d)).clamp(lo, hi);
        let hi_child = (0.5 * ((y1 + y2) + b2 * d)).clamp(lo, hi);
        if rng.gen::<bool>() {
            c1[i] = hi_child;
            c2[i] = lo_child;
        } else {
            c1[i] = lo_child;
            c2[i] = hi_child;
        }
    }
    (c1, c2)
}

/// Bounded polynomial mutation, each gene independently with `probability`.
pub fn polynomial_mutation(genes: &mut [f64], eta: f64, bounds: &GeneBounds, probability: f64, rng: &mut Rng) {
    for (i, y) in genes.iter_mut().enumerate() {
        if rng.gen::<f64>() >= probability {
            continue;
        }
        let (lo, hi) = (bounds.lower[i], bounds.upper[i]);
        let width = hi - lo;
        if !(width > 0.0) {
            continue;
        }
        let d1 = (*y - lo) / width;
        let d2 = (hi - *y) / width;
        let pow = 1.0 / (eta + 1.0);
        let u: f64 = rng.gen();
        let dq = if u < 0.5 {
            let v = 2.0 * u + (1.0 - 2.0 * u) * (1.0 - d1).powf(eta + 1.0);
            v.powf(pow) - 1.0
        } else {
            let v = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * (1.0 - d2).powf(eta + 1.0);
            1.0 - v.powf(pow)
        };
        *y = (*y + dq * width).clamp(lo, hi);
    }
}
