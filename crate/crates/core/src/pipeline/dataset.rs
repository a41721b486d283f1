use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{PipelineError, Result};
use crate::fem::{run_thermoelastic, ProblemConfig, ThermalLoad};
use crate::profile::{GradationGenes, ProfileScheme};
use crate::rng::derived;

const MANIFEST_FORMAT: &str = "fgmopt.dataset.v1";
/// Attempts per sample index before generation gives up.
const MAX_ATTEMPTS: u32 = 16;
pub const TRAIN_FRACTION: f64 = 0.8;

/// One FEM-labelled gradation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub index: usize,
    pub problem: String,
    pub seed: u64,
    /// Replacement draw that produced this sample; zero unless a solve failed.
    pub attempt: u32,
    pub genes: GradationGenes,
    pub profile_x: Vec<f64>,
    pub profile_y: Vec<f64>,
    /// Pa.
    pub sigma_e_max: f64,
    /// Temperature at profile grid nodes, `i * (ny + 1) + j`; absent without conduction.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temperature_grid: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    pub name: String,
    pub records: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub format: String,
    pub build: String,
    pub problem: String,
    pub count: usize,
    pub seed: u64,
    pub split_ratio: f64,
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    pub files: Vec<FileEntry>,
    /// Failed solves that were replaced by fresh draws.
    pub replaced: usize,
    pub scheme: ProfileScheme,
    pub problem_config: ProblemConfig,
}

/// Manifest plus both partitions, each in index order.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub manifest: DatasetManifest,
    pub train: Vec<Sample>,
    pub test: Vec<Sample>,
}

/// Profile scheme whose grid matches the problem's element grid.
pub fn scheme_for(problem: &ProblemConfig) -> ProfileScheme {
    ProfileScheme::standard(problem.nx, problem.ny, problem.length, problem.height)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Seeded `round(0.8 n)` / rest partition, each part sorted.
pub fn split_indices(count: usize, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..count).collect();
    idx.shuffle(&mut derived(seed, u64::MAX, 1));
    let n_train = (count as f64 * TRAIN_FRACTION).round() as usize;
    let (mut train, mut test) = (idx[..n_train].to_vec(), idx[n_train..].to_vec());
    train.sort_unstable();
    test.sort_unstable();
    (train, test)
}

fn make_sample(problem: &ProblemConfig, scheme: &ProfileScheme, seed: u64, index: usize) -> Result<(Sample, u32)> {
    let mut last = None;
    for attempt in 0..MAX_ATTEMPTS {
        let genes = scheme.generate_genes(&mut derived(seed, index as u64, attempt as u64));
        let (px, py) = scheme.genes_to_profiles(&genes)?;
        let profile = scheme.genes_to_profile_2d(&genes)?;
        match run_thermoelastic(&profile, problem) {
            Ok(r) => {
                let temperature_grid = match problem.thermal {
                    ThermalLoad::Conduction { .. } => Some(r.temperature_on_grid(&profile)),
                    ThermalLoad::UniformChange { .. } => None,
                };
                let sample = Sample {
                    index,
                    problem: problem.name.clone(),
                    seed,
                    attempt,
                    genes,
                    profile_x: px.values().to_vec(),
                    profile_y: py.values().to_vec(),
                    sigma_e_max: r.sigma_e_max,
                    temperature_grid,
                };
                return Ok((sample, attempt));
            }
            Err(e) => last = Some(e),
        }
    }
    Err(PipelineError::SolveFailure { index, attempts: MAX_ATTEMPTS, last: last.expect("at least one attempt") })
}

fn write_ndjson(path: &Path, samples: &[&Sample]) -> Result<FileEntry> {
    let mut buf = Vec::new();
    for s in samples {
        serde_json::to_writer(&mut buf, s)?;
        buf.push(b'\n');
    }
    fs::write(path, &buf)?;
    Ok(FileEntry {
        name: path.file_name().expect("file path").to_string_lossy().into_owned(),
        records: samples.len(),
        sha256: sha256_hex(&buf),
    })
}

/// Draws `count` profiles, labels them with FEM and writes `train.ndjson`,
/// `test.ndjson` and `manifest.json` to `out_dir`. Sample `i` depends only
/// on `(seed, i)`, so the output does not depend on the thread count.
pub fn generate_dataset(problem: &ProblemConfig, count: usize, seed: u64, out_dir: &Path) -> Result<DatasetManifest> {
    if count == 0 {
        return Err(PipelineError::InvalidConfig("count must be positive".into()));
    }
    problem.validate()?;
    let scheme = scheme_for(problem);
    let results: Vec<(Sample, u32)> =
        (0..count).into_par_iter().map(|i| make_sample(problem, &scheme, seed, i)).collect::<Result<_>>()?;
    let replaced = results.iter().map(|(_, a)| *a as usize).sum();
    let samples: Vec<Sample> = results.into_iter().map(|(s, _)| s).collect();

    fs::create_dir_all(out_dir)?;
    let (train, test) = split_indices(count, seed);
    let pick = |idx: &[usize]| idx.iter().map(|&i| &samples[i]).collect::<Vec<_>>();
    let files = vec![
        write_ndjson(&out_dir.join("train.ndjson"), &pick(&train))?,
        write_ndjson(&out_dir.join("test.ndjson"), &pick(&test))?,
    ];
    let manifest = DatasetManifest {
        format: MANIFEST_FORMAT.into(),
        build: crate::BUILD_FINGERPRINT.into(),
        problem: problem.name.clone(),
        count,
        seed,
        split_ratio: TRAIN_FRACTION,
        train,
        test,
        files,
        replaced,
        scheme,
        problem_config: problem.clone(),
    };
    let mut f = fs::File::create(out_dir.join("manifest.json"))?;
    serde_json::to_writer_pretty(&mut f, &manifest)?;
    f.write_all(b"\n")?;
    Ok(manifest)
}

fn read_ndjson(path: &Path) -> Result<Vec<Sample>> {
    let reader = BufReader::new(fs::File::open(path)?);
    let mut out = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if !line.trim().is_empty() {
            out.push(serde_json::from_str(&line)?);
        }
    }
    Ok(out)
}

/// Reads a dataset directory, checking checksums and the partition.
pub fn load_dataset(dir: &Path) -> Result<Dataset> {
    let manifest: DatasetManifest = serde_json::from_str(&fs::read_to_string(dir.join("manifest.json"))?)?;
    if manifest.format != MANIFEST_FORMAT {
        return Err(PipelineError::InvalidDataset(format!("unsupported format '{}'", manifest.format)));
    }
    for entry in &manifest.files {
        let bytes = fs::read(dir.join(&entry.name))?;
        if sha256_hex(&bytes) != entry.sha256 {
            return Err(PipelineError::Checksum(entry.name.clone()));
        }
    }
    let train = read_ndjson(&dir.join("train.ndjson"))?;
    let test = read_ndjson(&dir.join("test.ndjson"))?;
    let ids = |s: &[Sample]| s.iter().map(|s| s.index).collect::<Vec<_>>();
    if ids(&train) != manifest.train || ids(&test) != manifest.test {
        return Err(PipelineError::InvalidDataset("records disagree with the manifest split".into()));
    }
    Ok(Dataset { manifest, train, test })
}
