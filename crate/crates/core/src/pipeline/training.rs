use super::dataset::{Dataset, Sample};
use super::{PipelineError, Result};
use crate::neural::{History, OperatorConfig, OperatorData, OperatorNet, StressConfig, StressSurrogate};
use crate::profile::ProfileScheme;
use crate::rng::seeded;

/// Surrogate inputs `(phi_x, phi_y)` and peak stresses in Pa.
pub fn stress_xy(samples: &[Sample]) -> (Vec<Vec<f64>>, Vec<f64>) {
    samples.iter().map(|s| (s.profile_x.iter().chain(&s.profile_y).copied().collect(), s.sigma_e_max)).unzip()
}

/// Temperatures at the profile grid nodes of `scheme`.
pub fn operator_data(samples: &[Sample], scheme: &ProfileScheme) -> Result<OperatorData> {
    let (nx, ny) = (scheme.x.n_elems, scheme.y.n_elems);
    let mut points = Vec::with_capacity((nx + 1) * (ny + 1));
    for i in 0..=nx {
        for j in 0..=ny {
            points.push([scheme.length * i as f64 / nx as f64, scheme.height * j as f64 / ny as f64]);
        }
    }
    let mut data = OperatorData { inputs: Vec::new(), points, targets: Vec::new() };
    for s in samples {
        let t = s
            .temperature_grid
            .as_ref()
            .ok_or_else(|| PipelineError::InvalidDataset(format!("sample {} has no temperature grid", s.index)))?;
        data.inputs.push(s.profile_x.iter().chain(&s.profile_y).copied().collect());
        data.targets.push(t.clone());
    }
    Ok(data)
}

fn fingerprint(ds: &Dataset, seed: u64) -> String {
    format!(
        "problem={} dataset_seed={} train={} test={} train_sha256={} seed={}",
        ds.manifest.problem,
        ds.manifest.seed,
        ds.train.len(),
        ds.test.len(),
        ds.manifest.files.first().map(|f| f.sha256.as_str()).unwrap_or(""),
        seed
    )
}

pub fn train_stress(ds: &Dataset, config: &StressConfig, seed: u64) -> Result<(StressSurrogate, History)> {
    let mut rng = seeded(seed);
    let mut model = StressSurrogate::new(ds.manifest.scheme.input_dim(), config, &mut rng)?;
    let (x, y) = stress_xy(&ds.train);
    let (tx, ty) = stress_xy(&ds.test);
    let test = if ty.is_empty() { None } else { Some((tx.as_slice(), ty.as_slice())) };
    model.init_output_bias(&y);
    let history = model.train(&x, &y, test, &config.stages, &mut rng)?;
    model.training_fingerprint = fingerprint(ds, seed);
    Ok((model, history))
}

pub fn train_operator(ds: &Dataset, config: &OperatorConfig, seed: u64) -> Result<(OperatorNet, History)> {
    let scheme = &ds.manifest.scheme;
    let mut rng = seeded(seed);
    let mut model = OperatorNet::new(scheme.input_dim(), scheme.length, scheme.height, config, &mut rng)?;
    let train = operator_data(&ds.train, scheme)?;
    let test = if ds.test.is_empty() { None } else { Some(operator_data(&ds.test, scheme)?) };
    let history = model.train(&train, test.as_ref(), &config.stages, &mut rng)?;
    model.training_fingerprint = fingerprint(ds, seed);
    Ok((model, history))
}
