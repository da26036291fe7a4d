use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::SimConfig;
use super::population::Population;
use super::SimError;

/// Population summary at one sampling time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub event: u64,
    pub mean_p: f64,
    pub mean_p_g1: f64,
    pub mean_p_g2: f64,
    pub theta: f64,
    pub mean_w: f64,
    pub mean_w_g1: f64,
    pub mean_w_g2: f64,
    /// Relative utility gap between the richer and the poorer group.
    pub inequality: f64,
}

impl Sample {
    fn values(&self) -> [f64; 8] {
        [
            self.mean_p,
            self.mean_p_g1,
            self.mean_p_g2,
            self.theta,
            self.mean_w,
            self.mean_w_g1,
            self.mean_w_g2,
            self.inequality,
        ]
    }

    fn from_values(event: u64, v: [f64; 8]) -> Self {
        Self {
            event,
            mean_p: v[0],
            mean_p_g1: v[1],
            mean_p_g2: v[2],
            theta: v[3],
            mean_w: v[4],
            mean_w_g1: v[5],
            mean_w_g2: v[6],
            inequality: v[7],
        }
    }
}

/// Samples taken at event 0, every `N` events, and at the end of the run.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub samples: Vec<Sample>,
}

impl TrajectoryRecord {
    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }
}

/// RNG for replicate `replicate` of a run seeded with `seed`: ChaCha8 keyed
/// by the master seed, on stream number `replicate`.
pub fn replicate_rng(seed: u64, replicate: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate);
    rng
}

fn sample_times(config: &SimConfig) -> impl Iterator<Item = u64> {
    let step = config.sample_interval();
    let end = config.events;
    (0..=end / step)
        .map(move |k| k * step)
        .chain((end % step != 0).then_some(end))
}

/// One replicate of the copying process.
pub fn run_trajectory(config: &SimConfig, replicate: u64) -> Result<TrajectoryRecord, SimError> {
    let mut pop = Population::new(config)?;
    let mut rng = replicate_rng(config.seed, replicate);
    let mut samples = Vec::new();
    let mut absorbed: Option<Sample> = None;

    for t in sample_times(config) {
        if let Some(s) = &absorbed {
            samples.push(Sample { event: t, ..*s });
            continue;
        }
        while pop.events() < t {
            pop.copy_event(&mut rng)?;
        }
        pop.rebuild();
        let sample = pop.observe();
        check_sample(&sample, &pop)?;
        samples.push(sample);
        // without mutation a monomorphic population can never change again
        if config.mutation_rate == 0.0 && pop.is_monomorphic() {
            absorbed = Some(sample);
        }
    }
    Ok(TrajectoryRecord { samples })
}

fn check_sample(sample: &Sample, pop: &Population) -> Result<(), SimError> {
    match sample.values().into_iter().find(|v| !v.is_finite()) {
        None => Ok(()),
        Some(value) => Err(SimError::NonFinite {
            event: sample.event,
            individual: 0,
            value,
            snapshot: Box::new(pop.snapshot()),
        }),
    }
}

/// Mean and standard error of a quantity across replicates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    /// Zero for a single replicate.
    pub std_error: f64,
}

impl Estimate {
    pub fn from_values(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std_error = if values.len() < 2 {
            0.0
        } else {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
            (var / n).sqrt()
        };
        Self { mean, std_error }
    }
}

/// Final-state statistics of an ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSummary {
    pub replicates: usize,
    pub final_mean_p: Estimate,
    pub final_inequality: Estimate,
    pub final_mean_w: Estimate,
    pub final_mean_w_g1: Estimate,
    pub final_mean_w_g2: Estimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleResult {
    /// Pointwise mean over replicates.
    pub mean: TrajectoryRecord,
    pub summary: EnsembleSummary,
}

/// Runs `config.replicates` independent replicates in parallel. Replicate `k`
/// uses [`replicate_rng`]`(config.seed, k)`, and results are reduced in
/// replicate order, so the output does not depend on the thread count.
pub fn run_ensemble(config: &SimConfig) -> Result<EnsembleResult, SimError> {
    config.validate()?;
    let runs: Vec<TrajectoryRecord> = (0..config.replicates as u64)
        .into_par_iter()
        .map(|k| run_trajectory(config, k))
        .collect::<Result<_, _>>()?;
    Ok(aggregate(&runs))
}

fn aggregate(runs: &[TrajectoryRecord]) -> EnsembleResult {
    let n = runs.len() as f64;
    let len = runs[0].samples.len();
    let samples = (0..len)
        .map(|t| {
            let mut acc = [0.0; 8];
            for run in runs {
                for (a, v) in acc.iter_mut().zip(run.samples[t].values()) {
                    *a += v;
                }
            }
            Sample::from_values(runs[0].samples[t].event, acc.map(|a| a / n))
        })
        .collect();

    let finals: Vec<&Sample> = runs.iter().map(|r| r.samples.last().expect("nonempty")).collect();
    let est = |f: fn(&Sample) -> f64| Estimate::from_values(&finals.iter().map(|s| f(s)).collect::<Vec<_>>());
    EnsembleResult {
        mean: TrajectoryRecord { samples },
        summary: EnsembleSummary {
            replicates: runs.len(),
            final_mean_p: est(|s| s.mean_p),
            final_inequality: est(|s| s.inequality),
            final_mean_w: est(|s| s.mean_w),
            final_mean_w_g1: est(|s| s.mean_w_g1),
            final_mean_w_g2: est(|s| s.mean_w_g2),
        },
    }
}
