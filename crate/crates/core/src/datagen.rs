//! Offline dataset collection with amateur-survival MOEAs, training-set
//! construction, and dataset persistence.
//!
//! A dataset directory holds `meta.json` (task, embedded instance,
//! provenance, normalization stats, reference point) and `data.csv` (one row
//! per pair: genotype columns, then raw objective columns, reals with 17
//! significant digits). Collection is reproducible: identical config and
//! seeds produce identical file bytes.

use std::collections::HashSet;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moea::{random_genotypes, run_algorithm, Algorithm, OperatorConfig, Population, SurvivalPolicy};
use crate::pareto::{hypervolume, nadir_reference, normalize_objectives, nsga2_select, NormStats};
use crate::problems::{CombinatorialInstance, TaskEvaluator, TaskSpec};
use crate::types::{Genotype, SearchSpace};

/// Reference points sit at 1.1 in normalized objective space.
pub const REFERENCE_SCALE: f64 = 1.1;

/// Collection parameters: which expert algorithms run, how many independent
/// runs each, and the amateur-survival acceptance probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollectConfig {
    pub algorithms: Vec<Algorithm>,
    pub runs: usize,
    pub mu: usize,
    pub generations: usize,
    /// Probability of elitist survival; `1 - p` admits inferior solutions.
    pub amateur_p: f64,
    /// Populations are sampled every this many generations (including
    /// generation 0).
    pub collect_every: usize,
    /// Optional dataset size cap; a seeded uniform subsample is taken when
    /// the deduplicated union is larger.
    pub target: Option<usize>,
    pub seed: u64,
    pub operators: OperatorConfig,
}

impl Default for CollectConfig {
    fn default() -> Self {
        Self {
            algorithms: vec![Algorithm::Nsga2, Algorithm::Moead, Algorithm::Nsga3],
            runs: 4,
            mu: 100,
            generations: 50,
            amateur_p: 0.9,
            collect_every: 1,
            target: Some(10_000),
            seed: 0,
            operators: OperatorConfig::default(),
        }
    }
}

impl CollectConfig {
    pub fn validate(&self) -> Result<()> {
        if self.algorithms.is_empty() {
            return Err(Error::Config("at least one collection algorithm required".into()));
        }
        if self.runs == 0 || self.mu < 2 || self.collect_every == 0 {
            return Err(Error::Config("runs >= 1, mu >= 2, collect_every >= 1 required".into()));
        }
        if !(0.0..=1.0).contains(&self.amateur_p) {
            return Err(Error::Config(format!("amateur_p must lie in [0, 1], got {}", self.amateur_p)));
        }
        self.operators.validate()
    }
}

/// Dataset provenance: the configuration and seed that produced it, plus any
/// later training-set transformations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetProvenance {
    pub collect: CollectConfig,
    /// Percentile of top-ranked solutions removed by training-set
    /// construction, if applied.
    pub removed_top_percent: Option<f64>,
    /// Fraction kept by data pruning, if applied.
    pub prune_keep_fraction: Option<f64>,
}

/// The offline dataset: genotypes, raw and normalized objectives, the stats
/// linking them, and the nadir-derived reference point. The sole training
/// input of every surrogate.
#[derive(Debug, Clone)]
pub struct OfflineDataset {
    pub task: TaskSpec,
    pub instance: Option<CombinatorialInstance>,
    pub x: Vec<Genotype>,
    pub y_raw: Vec<Vec<f64>>,
    pub y_norm: Vec<Vec<f64>>,
    pub stats: NormStats,
    pub reference_point: Vec<f64>,
    pub provenance: DatasetProvenance,
}

impl OfflineDataset {
    /// Builds a dataset from raw pairs, fitting normalization stats and the
    /// reference point.
    pub fn from_pairs(
        task: TaskSpec,
        instance: Option<CombinatorialInstance>,
        x: Vec<Genotype>,
        y_raw: Vec<Vec<f64>>,
        provenance: DatasetProvenance,
    ) -> Result<Self> {
        if x.len() != y_raw.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} genotypes vs {} objective vectors",
                x.len(),
                y_raw.len()
            )));
        }
        if y_raw.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("dataset contains non-finite objectives".into()));
        }
        let (y_norm, stats) = normalize_objectives(&y_raw)?;
        let reference_point = nadir_reference(&y_raw, REFERENCE_SCALE)?;
        Ok(Self { task, instance, x, y_raw, y_norm, stats, reference_point, provenance })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Rebuilds the dataset from a subset of row indices, re-fitting stats
    /// and the reference point on the survivors.
    pub fn subset(&self, rows: &[usize], provenance: DatasetProvenance) -> Result<OfflineDataset> {
        OfflineDataset::from_pairs(
            self.task.clone(),
            self.instance.clone(),
            rows.iter().map(|&i| self.x[i].clone()).collect(),
            rows.iter().map(|&i| self.y_raw[i].clone()).collect(),
            provenance,
        )
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let meta = DatasetMeta {
            task: self.task.clone(),
            instance: self.instance.clone(),
            n_points: self.len(),
            norm_stats: self.stats.clone(),
            reference_point: self.reference_point.clone(),
            provenance: self.provenance.clone(),
        };
        std::fs::write(dir.join("meta.json"), serde_json::to_string_pretty(&meta)?)?;

        let mut writer = csv::Writer::from_path(dir.join("data.csv"))?;
        let m = self.task.num_objectives;
        let mut header: Vec<String> = (0..self.task.dims).map(|i| format!("x{i}")).collect();
        header.extend((0..m).map(|i| format!("f{i}")));
        writer.write_record(&header)?;
        for (g, y) in self.x.iter().zip(&self.y_raw) {
            let mut row: Vec<String> = match g {
                Genotype::Continuous(v) => v.iter().map(|x| format!("{x:.16e}")).collect(),
                Genotype::Permutation(p) => p.iter().map(|i| i.to_string()).collect(),
            };
            row.extend(y.iter().map(|v| format!("{v:.16e}")));
            writer.write_record(&row)?;
        }
        writer.flush()?;
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<OfflineDataset> {
        let meta: DatasetMeta = serde_json::from_str(&std::fs::read_to_string(dir.join("meta.json"))?)?;
        let mut reader = csv::Reader::from_path(dir.join("data.csv"))?;
        let dims = meta.task.dims;
        let m = meta.task.num_objectives;
        let permutation = matches!(meta.task.space, SearchSpace::Permutation { .. });
        let mut x = Vec::with_capacity(meta.n_points);
        let mut y_raw = Vec::with_capacity(meta.n_points);
        for record in reader.records() {
            let record = record?;
            if record.len() != dims + m {
                return Err(Error::DimensionMismatch(format!(
                    "row has {} columns, expected {}",
                    record.len(),
                    dims + m
                )));
            }
            let g = if permutation {
                Genotype::Permutation(
                    (0..dims)
                        .map(|i| record[i].parse::<usize>().map_err(|e| Error::Config(e.to_string())))
                        .collect::<Result<_>>()?,
                )
            } else {
                Genotype::Continuous(
                    (0..dims)
                        .map(|i| record[i].parse::<f64>().map_err(|e| Error::Config(e.to_string())))
                        .collect::<Result<_>>()?,
                )
            };
            let y: Vec<f64> = (dims..dims + m)
                .map(|i| record[i].parse::<f64>().map_err(|e| Error::Config(e.to_string())))
                .collect::<Result<_>>()?;
            x.push(g);
            y_raw.push(y);
        }
        if x.len() != meta.n_points {
            return Err(Error::Config(format!(
                "meta declares {} points, data.csv has {}",
                meta.n_points,
                x.len()
            )));
        }
        let ds = OfflineDataset::from_pairs(meta.task, meta.instance, x, y_raw, meta.provenance)?;
        // stats and reference point must reproduce exactly from the stored rows
        if ds.stats != meta.norm_stats || ds.reference_point != meta.reference_point {
            return Err(Error::Config(
                "stored normalization stats do not match the data rows".into(),
            ));
        }
        Ok(ds)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct DatasetMeta {
    task: TaskSpec,
    instance: Option<CombinatorialInstance>,
    n_points: usize,
    norm_stats: NormStats,
    reference_point: Vec<f64>,
    provenance: DatasetProvenance,
}

/// Amateur survivor selection over an evaluated (mu + k) pool: with
/// probability `p` the NSGA-II selection, otherwise mu members drawn
/// uniformly without replacement.
pub fn amateur_survival(
    pool_objectives: &[Vec<f64>],
    mu: usize,
    p: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<usize>> {
    let policy = SurvivalPolicy::Amateur { p };
    policy.validate()?;
    crate::moea::select_survivors(policy, pool_objectives, mu, rng)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Independent stream seed for (base seed, stream index).
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    splitmix64(base ^ splitmix64(stream))
}

/// Operator config adjusted to the task: depot rotation only applies to TSP
/// and CVRP permutations.
pub fn operators_for_task(task: &TaskSpec, base: &OperatorConfig) -> OperatorConfig {
    let mut cfg = base.clone();
    if matches!(task.space, SearchSpace::Permutation { .. }) {
        cfg.start_from_zero =
            base.start_from_zero && (task.name.starts_with("bi-tsp") || task.name.starts_with("bi-cvrp"));
    }
    cfg
}

/// Collects an offline dataset: each (algorithm, run) cell runs
/// independently under amateur survival, populations are sampled every
/// `collect_every` generations, and the union is deduplicated by exact
/// genotype. Cells execute in parallel and merge in a fixed order, so the
/// result depends only on the config.
pub fn collect_dataset(
    task: &TaskSpec,
    instance: Option<&CombinatorialInstance>,
    cfg: &CollectConfig,
) -> Result<OfflineDataset> {
    cfg.validate()?;
    let operators = operators_for_task(task, &cfg.operators);
    let cells: Vec<(usize, Algorithm, usize)> = cfg
        .algorithms
        .iter()
        .enumerate()
        .flat_map(|(ai, &alg)| (0..cfg.runs).map(move |r| (ai, alg, r)))
        .collect();

    let samples: Vec<Result<Vec<(Genotype, Vec<f64>)>>> = cells
        .par_iter()
        .map(|&(ai, alg, run)| {
            let cell_seed = derive_seed(cfg.seed, (ai * cfg.runs + run) as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(cell_seed);
            let evaluator = TaskEvaluator::new(task, instance);
            let members = random_genotypes(&task.space, &operators, cfg.mu, &mut rng);
            let init = Population::from_members(members, &evaluator)?;
            let mut collected: Vec<(Genotype, Vec<f64>)> = Vec::new();
            run_algorithm(
                alg,
                &evaluator,
                init,
                cfg.mu,
                cfg.generations,
                &operators,
                &mut rng,
                SurvivalPolicy::Amateur { p: cfg.amateur_p },
                &mut |gen, pop| {
                    if gen % cfg.collect_every == 0 {
                        collected.extend(
                            pop.members.iter().cloned().zip(pop.objectives.iter().cloned()),
                        );
                    }
                },
            )?;
            Ok(collected)
        })
        .collect();

    let mut x: Vec<Genotype> = Vec::new();
    let mut y: Vec<Vec<f64>> = Vec::new();
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    for cell in samples {
        for (g, objs) in cell? {
            if seen.insert(g.dedup_key()) {
                x.push(g);
                y.push(objs);
            }
        }
    }

    if let Some(target) = cfg.target {
        if x.len() > target {
            let mut trim_rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, u64::MAX));
            let mut keep = rand::seq::index::sample(&mut trim_rng, x.len(), target).into_vec();
            keep.sort_unstable();
            x = keep.iter().map(|&i| x[i].clone()).collect();
            y = keep.iter().map(|&i| y[i].clone()).collect();
        } else if x.len() < target {
            log::warn!(
                "collection produced {} unique points, below the target {target}; keeping the smaller dataset",
                x.len()
            );
        }
    }

    OfflineDataset::from_pairs(
        task.clone(),
        instance.cloned(),
        x,
        y,
        DatasetProvenance { collect: cfg.clone(), removed_top_percent: None, prune_keep_fraction: None },
    )
}

/// Training-set construction: drops the best `floor(k/100 * n)` points under
/// the NSGA-II ordering over raw objectives and re-fits normalization on the
/// survivors (which also re-derives the reference point).
pub fn build_training_set(ds: &OfflineDataset, remove_top_percent: f64) -> Result<OfflineDataset> {
    if !(0.0..100.0).contains(&remove_top_percent) {
        return Err(Error::InvalidArgument(format!(
            "remove_top_percent must lie in [0, 100), got {remove_top_percent}"
        )));
    }
    let n = ds.len();
    let order = nsga2_select(&ds.y_raw, n)?;
    let removed = (remove_top_percent / 100.0 * n as f64).floor() as usize;
    let mut retained: Vec<usize> = order[removed..].to_vec();
    retained.sort_unstable();
    let provenance = DatasetProvenance {
        removed_top_percent: Some(remove_top_percent),
        ..ds.provenance.clone()
    };
    ds.subset(&retained, provenance)
}

/// The best solution subset of the dataset: the first `min(n, len)` points of
/// the NSGA-II ordering and their hypervolume against the dataset reference
/// point.
pub fn d_best(ds: &OfflineDataset, n: usize) -> Result<(Vec<usize>, f64)> {
    if ds.is_empty() {
        return Err(Error::EmptyInput("dataset is empty"));
    }
    let take = n.min(ds.len());
    let subset = nsga2_select(&ds.y_raw, take)?;
    let objs: Vec<Vec<f64>> = subset.iter().map(|&i| ds.y_raw[i].clone()).collect();
    let hv = hypervolume(&objs, &ds.reference_point);
    Ok((subset, hv))
}
