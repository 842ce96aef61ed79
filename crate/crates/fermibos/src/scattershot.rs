//! Scattershot sampling with fermionic pair sources: every trial draws a
//! herald configuration from the source network `V`, discards bunched
//! heralds, and pushes the surviving single-occupancy input through the
//! target network `U` with bosonic counting statistics.
//!
//! The effective mode symmetry of the pair sources is symmetric even
//! though the underlying particles anti-commute, which is why the heralded
//! inputs sample the permanent distribution; [`verify_scattershot_oracle`]
//! checks exactly that against the dense first-quantization oracle.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{
    enumerate_configurations, output_distribution_fast, total_variation, OccupationVector,
    OutputDistribution, Statistics,
};
use crate::linalg::{determinant, fourier_row_network, haar_random_unitary, ComplexMatrix};
use crate::oracle::{
    apply_network, build_epsilon_state, condition_on_outcome, oracle_distribution_of_state,
    povm_probability, InternalStateSet, SymmetryFlag,
};

/// Allowed deviation of `|V_0k|^2` from `1/M` in a strict scattershot
/// source network.
pub const HERALD_FLATNESS_TOLERANCE: f64 = 1e-12;

/// Full description of one scattershot experiment.
#[derive(Clone, Debug)]
pub struct ScattershotConfig {
    modes: usize,
    particles: usize,
    trials: usize,
    seed: u64,
    network_v: ComplexMatrix,
    network_u: ComplexMatrix,
}

impl ScattershotConfig {
    /// Standard setup: `V` is the symmetric multiport (flat herald row),
    /// `U` a Haar-random unitary drawn from `seed`.
    pub fn new(modes: usize, particles: usize, trials: usize, seed: u64) -> Result<Self> {
        Self::with_networks(
            modes,
            particles,
            trials,
            seed,
            fourier_row_network(modes),
            haar_random_unitary(modes, seed),
        )
    }

    /// Custom networks. `V` must be unitary with a flat first row (every
    /// herald weight `1/M`); `U` must be unitary of the same dimension.
    pub fn with_networks(
        modes: usize,
        particles: usize,
        trials: usize,
        seed: u64,
        network_v: ComplexMatrix,
        network_u: ComplexMatrix,
    ) -> Result<Self> {
        if particles == 0 || particles > modes {
            return Err(Error::TooManyFermions { particles, modes });
        }
        for (label, net) in [("V", &network_v), ("U", &network_u)] {
            if !net.is_square() || net.rows() != modes {
                return Err(Error::DimensionMismatch {
                    context: if label == "V" {
                        "source network dimension"
                    } else {
                        "target network dimension"
                    },
                    expected: modes,
                    found: net.rows(),
                });
            }
            net.require_unitary()?;
        }
        let flat = 1.0 / modes as f64;
        let deviation = (0..modes)
            .map(|k| (network_v.get(0, k).norm_sqr() - flat).abs())
            .fold(0.0, f64::max);
        if deviation > HERALD_FLATNESS_TOLERANCE {
            return Err(Error::HeraldRowNotFlat {
                deviation,
                tolerance: HERALD_FLATNESS_TOLERANCE,
            });
        }
        Ok(Self {
            modes,
            particles,
            trials,
            seed,
            network_v,
            network_u,
        })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn trials(&self) -> usize {
        self.trials
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn network_v(&self) -> &ComplexMatrix {
        &self.network_v
    }

    pub fn network_u(&self) -> &ComplexMatrix {
        &self.network_u
    }
}

/// Herald distribution of `N` pair sources behind the unitary `V`: all
/// source excitations start in mode 1, so
/// `p(n) = (N!/mu(n)) prod_k |V_1k|^(2 n_k)`.
pub fn herald_distribution(v: &ComplexMatrix, particles: usize) -> Result<OutputDistribution> {
    v.require_unitary()?;
    let modes = v.rows();
    let weights: Vec<f64> = (0..modes).map(|k| v.get(0, k).norm_sqr()).collect();
    let configs = enumerate_configurations(modes, particles, Statistics::Bosonic)?;
    let n_fact = (1..=particles as u64).map(|k| k as f64).product::<f64>();
    let mut entries = BTreeMap::new();
    for config in configs {
        let mut p = n_fact / config.multiplicity()? as f64;
        for (k, &count) in config.counts().iter().enumerate() {
            p *= weights[k].powi(count as i32);
        }
        entries.insert(config, p);
    }
    OutputDistribution::from_entries(modes, particles, Statistics::Bosonic, entries)
}

/// Probability that a flat-row herald lands on a single-occupancy
/// configuration: `prod_(q=1)^(N-1) (1 - q/M)`, i.e. `M!/((M-N)! M^N)`.
pub fn non_bunching_probability(modes: usize, particles: usize) -> f64 {
    if particles > modes {
        return 0.0;
    }
    let m = modes as f64;
    (1..particles).map(|q| 1.0 - q as f64 / m).product()
}

/// One scattershot trial. `output` is absent when the herald bunched and
/// the trial was discarded.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub herald: OccupationVector,
    pub bunched: bool,
    pub output: Option<OccupationVector>,
}

/// Per-herald tally. `empirical_tv` compares the empirical conditional
/// output frequencies against the exact permanent distribution and is
/// absent for bunched heralds.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HeraldReport {
    pub herald: OccupationVector,
    pub count: usize,
    pub empirical_tv: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScattershotSummary {
    pub modes: usize,
    pub particles: usize,
    pub trials: usize,
    pub seed: u64,
    pub non_bunched: usize,
    pub discard_rate: f64,
    pub expected_non_bunching: f64,
    pub heralds: Vec<HeraldReport>,
}

pub struct ScattershotRun {
    pub records: Vec<TrialRecord>,
    pub summary: ScattershotSummary,
}

fn draw_index(cumulative: &[f64], x: f64) -> usize {
    match cumulative.iter().position(|&c| x < c) {
        Some(i) => i,
        None => cumulative.len() - 1,
    }
}

/// Runs the full experiment. Each trial owns an independent deterministic
/// random stream (`seed` with stream id `trial + 1`), so results do not
/// depend on thread count or scheduling.
pub fn run_scattershot(config: &ScattershotConfig) -> Result<ScattershotRun> {
    let herald_dist = herald_distribution(&config.network_v, config.particles)?;
    let heralds: Vec<OccupationVector> = herald_dist.entries().map(|(m, _)| m.clone()).collect();
    let herald_cumulative: Vec<f64> = herald_dist
        .entries()
        .scan(0.0, |acc, (_, p)| {
            *acc += p;
            Some(*acc)
        })
        .collect();

    // Pass 1: draw the herald index and the output quantile per trial.
    let picks: Vec<(usize, f64)> = (0..config.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(trial as u64 + 1);
            let herald_pick = draw_index(&herald_cumulative, rng.random::<f64>());
            let output_quantile = rng.random::<f64>();
            (herald_pick, output_quantile)
        })
        .collect();

    // Pass 2: compute the conditional distribution of each herald that
    // actually fired, then resolve outputs.
    let needed: BTreeSet<usize> = picks
        .iter()
        .map(|&(index, _)| index)
        .filter(|&index| heralds[index].is_single_occupancy())
        .collect();
    let conditionals: BTreeMap<usize, (Vec<OccupationVector>, Vec<f64>)> = needed
        .into_par_iter()
        .map(|index| {
            let dist =
                output_distribution_fast(&config.network_u, &heralds[index], Statistics::Bosonic)?;
            let configs: Vec<OccupationVector> = dist.entries().map(|(m, _)| m.clone()).collect();
            let cumulative: Vec<f64> = dist
                .entries()
                .scan(0.0, |acc, (_, p)| {
                    *acc += p;
                    Some(*acc)
                })
                .collect();
            Ok((index, (configs, cumulative)))
        })
        .collect::<Result<_>>()?;

    let records: Vec<TrialRecord> = picks
        .par_iter()
        .enumerate()
        .map(|(trial, &(herald_pick, output_quantile))| {
            let herald = heralds[herald_pick].clone();
            let bunched = !herald.is_single_occupancy();
            let output = if bunched {
                None
            } else {
                let (configs, cumulative) = &conditionals[&herald_pick];
                Some(configs[draw_index(cumulative, output_quantile)].clone())
            };
            TrialRecord {
                trial,
                herald,
                bunched,
                output,
            }
        })
        .collect();

    let summary = summarize(config, &herald_dist, &records)?;
    Ok(ScattershotRun { records, summary })
}

fn summarize(
    config: &ScattershotConfig,
    herald_dist: &OutputDistribution,
    records: &[TrialRecord],
) -> Result<ScattershotSummary> {
    let mut herald_counts: BTreeMap<OccupationVector, usize> = BTreeMap::new();
    let mut output_counts: BTreeMap<OccupationVector, BTreeMap<OccupationVector, usize>> =
        BTreeMap::new();
    let mut non_bunched = 0usize;
    for record in records {
        *herald_counts.entry(record.herald.clone()).or_insert(0) += 1;
        if let Some(output) = &record.output {
            non_bunched += 1;
            *output_counts
                .entry(record.herald.clone())
                .or_default()
                .entry(output.clone())
                .or_insert(0) += 1;
        }
    }
    let mut heralds = Vec::new();
    for (herald, &count) in &herald_counts {
        let empirical_tv = match output_counts.get(herald) {
            Some(counts) => {
                let total: usize = counts.values().sum();
                let empirical: BTreeMap<OccupationVector, f64> = counts
                    .iter()
                    .map(|(m, &c)| (m.clone(), c as f64 / total as f64))
                    .collect();
                let exact =
                    output_distribution_fast(&config.network_u, herald, Statistics::Bosonic)?;
                let exact_map: BTreeMap<OccupationVector, f64> =
                    exact.entries().map(|(m, p)| (m.clone(), p)).collect();
                Some(total_variation(&empirical, &exact_map))
            }
            None => None,
        };
        heralds.push(HeraldReport {
            herald: herald.clone(),
            count,
            empirical_tv,
        });
    }
    let expected_non_bunching: f64 = herald_dist
        .entries()
        .filter(|(m, _)| m.is_single_occupancy())
        .map(|(_, p)| p)
        .sum();
    let discard_rate = if records.is_empty() {
        0.0
    } else {
        (records.len() - non_bunched) as f64 / records.len() as f64
    };
    Ok(ScattershotSummary {
        modes: config.modes,
        particles: config.particles,
        trials: config.trials,
        seed: config.seed,
        non_bunched,
        discard_rate,
        expected_non_bunching,
        heralds,
    })
}

/// Writes one JSON object per line, in trial order.
pub fn write_records_jsonl<W: Write>(
    records: &[TrialRecord],
    mut writer: W,
) -> std::io::Result<()> {
    for record in records {
        serde_json::to_writer(&mut writer, record)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

/// Cross-validates the scattershot pipeline against the dense oracle at
/// small size: builds the anti-symmetrized pair-source state with all
/// excitations in mode 1 and linearly independent internal states, pushes
/// it through the flat-row source network, and compares (a) every herald
/// probability against [`herald_distribution`] and (b) every conditional
/// output distribution against the bosonic fast path through a Haar-random
/// target network. Returns the worst absolute deviation found.
pub fn verify_scattershot_oracle(
    modes: usize,
    particles: usize,
    internal_dim: usize,
    seed: u64,
) -> Result<f64> {
    if internal_dim < particles {
        return Err(Error::DimensionMismatch {
            context: "internal dimension for independent states",
            expected: particles,
            found: internal_dim,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let internal = loop {
        let vectors: Vec<Vec<Complex64>> = (0..particles)
            .map(|_| {
                let mut v: Vec<Complex64> = (0..internal_dim)
                    .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                    .collect();
                let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                for z in &mut v {
                    *z /= norm;
                }
                v
            })
            .collect();
        let candidate = InternalStateSet::from_vectors(internal_dim, vectors)?;
        // Reject nearly dependent draws so the anti-symmetrized source
        // state stays well conditioned.
        if determinant(&candidate.gram())?.re > 1e-2 {
            break candidate;
        }
    };
    let v = fourier_row_network(modes);
    let u = haar_random_unitary(modes, rng.random::<u64>());

    let mut source_counts = vec![0usize; modes];
    source_counts[0] = particles;
    let source = OccupationVector::new(source_counts);
    let state = build_epsilon_state(&source, &internal, SymmetryFlag::A, SymmetryFlag::A)?;
    let heralded = apply_network(&state, &v)?;

    let herald_ref = herald_distribution(&v, particles)?;
    let mut worst: f64 = 0.0;
    for (herald, p_ref) in herald_ref.entries() {
        let p = povm_probability(&heralded, herald)?;
        worst = worst.max((p - p_ref).abs());
        if herald.is_single_occupancy() && p > 1e-12 {
            let (post, _) = condition_on_outcome(&heralded, herald)?;
            let oracle_out = oracle_distribution_of_state(&post, &u, Statistics::Bosonic)?;
            let fast_out = output_distribution_fast(&u, herald, Statistics::Bosonic)?;
            worst = worst.max(oracle_out.max_abs_deviation(&fast_out));
        }
    }
    Ok(worst)
}
