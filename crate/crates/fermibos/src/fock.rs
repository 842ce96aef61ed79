//! Occupation-number configurations and the fast second-quantized path:
//! output amplitudes from permanents (bosons) or determinants (fermions)
//! of occupation submatrices.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{build_submatrix, determinant, permanent, ComplexMatrix};

/// Cap on enumerated configuration spaces (desk scale).
pub const ENUMERATION_CAP: u128 = 2_000_000;
/// Tolerance on the normalization contract of a distribution.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-10;

/// Particle statistics selecting the counting rule and the fast kernel.
/// `General` marks distributions of non-identical particles, which only the
/// first-quantization oracle can produce.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistics {
    Bosonic,
    Fermionic,
    General,
}

impl fmt::Display for Statistics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statistics::Bosonic => write!(f, "bosonic"),
            Statistics::Fermionic => write!(f, "fermionic"),
            Statistics::General => write!(f, "general"),
        }
    }
}

impl FromStr for Statistics {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "bosonic" => Ok(Statistics::Bosonic),
            "fermionic" => Ok(Statistics::Fermionic),
            "general" => Ok(Statistics::General),
            other => Err(format!("unknown statistics `{other}`")),
        }
    }
}

/// Occupation numbers `(n_1, ..., n_M)` over `M` modes. Ordering is
/// lexicographic, which fixes the canonical configuration order everywhere
/// in this crate: `(0,2) < (1,1) < (2,0)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OccupationVector(Vec<usize>);

impl OccupationVector {
    pub fn new(counts: Vec<usize>) -> Self {
        Self(counts)
    }

    /// Rebuilds occupations from a list of (zero-based) mode labels.
    pub fn from_modes(modes: &[usize], mode_count: usize) -> Self {
        let mut counts = vec![0; mode_count];
        for &m in modes {
            counts[m] += 1;
        }
        Self(counts)
    }

    pub fn modes(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn counts(&self) -> &[usize] {
        &self.0
    }

    pub fn is_single_occupancy(&self) -> bool {
        self.0.iter().all(|&c| c <= 1)
    }

    /// First mode holding more than one particle, if any.
    pub fn first_bunched_mode(&self) -> Option<(usize, usize)> {
        self.0
            .iter()
            .enumerate()
            .find(|(_, &c)| c > 1)
            .map(|(m, &c)| (m, c))
    }

    /// Multiplicity `mu(n) = prod_k n_k!`; errors on 64-bit overflow.
    pub fn multiplicity(&self) -> Result<u64> {
        let mut product: u64 = 1;
        for &count in &self.0 {
            for factor in 2..=count as u64 {
                product =
                    product
                        .checked_mul(factor)
                        .ok_or_else(|| Error::MultiplicityOverflow {
                            counts: self.0.clone(),
                        })?;
            }
        }
        Ok(product)
    }

    /// Particle mode labels in ascending order, one per particle:
    /// `(1,0,2)` over three modes expands to `[0, 2, 2]`.
    pub fn mode_list(&self) -> Vec<usize> {
        let mut modes = Vec::with_capacity(self.total());
        for (mode, &count) in self.0.iter().enumerate() {
            modes.extend(std::iter::repeat_n(mode, count));
        }
        modes
    }
}

impl fmt::Display for OccupationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for OccupationVector {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let counts = s
            .split(',')
            .map(|part| {
                part.trim()
                    .parse::<usize>()
                    .map_err(|e| format!("bad occupation `{part}`: {e}"))
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        if counts.is_empty() {
            return Err("empty occupation vector".into());
        }
        Ok(Self(counts))
    }
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut result: u128 = 1;
    for i in 0..k {
        result = result * (n - i) / (i + 1);
    }
    result
}

/// Number of configurations of `particles` particles over `modes` modes:
/// `C(M+N-1, N)` for bosons, `C(M, N)` for fermions.
pub fn configuration_count(modes: usize, particles: usize, statistics: Statistics) -> u128 {
    let m = modes as u128;
    let n = particles as u128;
    if n == 0 {
        return 1;
    }
    match statistics {
        Statistics::Bosonic | Statistics::General => binomial(m + n - 1, n),
        Statistics::Fermionic => binomial(m, n),
    }
}

/// Enumerates all occupation vectors of `particles` particles over `modes`
/// modes in lexicographic order. Fermionic statistics restrict every count
/// to at most one and require `particles <= modes`.
pub fn enumerate_configurations(
    modes: usize,
    particles: usize,
    statistics: Statistics,
) -> Result<Vec<OccupationVector>> {
    if statistics == Statistics::Fermionic && particles > modes {
        return Err(Error::TooManyFermions { particles, modes });
    }
    let count = configuration_count(modes, particles, statistics);
    if count > ENUMERATION_CAP {
        return Err(Error::EnumerationTooLarge {
            count,
            cap: ENUMERATION_CAP,
        });
    }
    let max_per_mode = if statistics == Statistics::Fermionic {
        1
    } else {
        particles
    };
    let mut out = Vec::with_capacity(count as usize);
    let mut counts = vec![0usize; modes];
    fill(&mut out, &mut counts, 0, particles, max_per_mode);
    return Ok(out);

    fn fill(
        out: &mut Vec<OccupationVector>,
        counts: &mut Vec<usize>,
        mode: usize,
        remaining: usize,
        max_per_mode: usize,
    ) {
        if mode == counts.len() {
            if remaining == 0 {
                out.push(OccupationVector::new(counts.clone()));
            }
            return;
        }
        if mode + 1 == counts.len() {
            if remaining <= max_per_mode {
                counts[mode] = remaining;
                out.push(OccupationVector::new(counts.clone()));
                counts[mode] = 0;
            }
            return;
        }
        for c in 0..=remaining.min(max_per_mode) {
            counts[mode] = c;
            fill(out, counts, mode + 1, remaining - c, max_per_mode);
            counts[mode] = 0;
        }
    }
}

fn validate_io(
    u: &ComplexMatrix,
    input: &OccupationVector,
    output: &OccupationVector,
) -> Result<()> {
    u.require_unitary()?;
    if input.modes() != u.rows() {
        return Err(Error::DimensionMismatch {
            context: "input occupations",
            expected: u.rows(),
            found: input.modes(),
        });
    }
    if output.modes() != u.cols() {
        return Err(Error::DimensionMismatch {
            context: "output occupations",
            expected: u.cols(),
            found: output.modes(),
        });
    }
    if input.total() != output.total() {
        return Err(Error::ParticleNumber {
            input: input.total(),
            output: output.total(),
        });
    }
    Ok(())
}

fn boson_amplitude_raw(
    u: &ComplexMatrix,
    input: &OccupationVector,
    output: &OccupationVector,
) -> Result<Complex64> {
    if input.total() == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let sub = build_submatrix(u, input.counts(), output.counts())?;
    let per = permanent(&sub)?;
    let weight = ((input.multiplicity()? as f64) * (output.multiplicity()? as f64)).sqrt();
    Ok(per / weight)
}

fn fermion_amplitude_raw(
    u: &ComplexMatrix,
    input: &OccupationVector,
    output: &OccupationVector,
) -> Result<Complex64> {
    for occ in [input, output] {
        if let Some((mode, count)) = occ.first_bunched_mode() {
            return Err(Error::PauliViolation { mode, count });
        }
    }
    if input.total() == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let sub = build_submatrix(u, input.counts(), output.counts())?;
    determinant(&sub)
}

/// Transition amplitude for `input.total()` bosons through the network `U`:
/// `per(U[n|m]) / sqrt(mu(n) mu(m))`.
pub fn boson_amplitude(
    u: &ComplexMatrix,
    input: &OccupationVector,
    output: &OccupationVector,
) -> Result<Complex64> {
    validate_io(u, input, output)?;
    boson_amplitude_raw(u, input, output)
}

/// Transition amplitude for fermions through `U`: `det(U[n|m])` with rows
/// and columns in ascending mode order. Both occupations must be
/// single-occupancy.
pub fn fermion_amplitude(
    u: &ComplexMatrix,
    input: &OccupationVector,
    output: &OccupationVector,
) -> Result<Complex64> {
    validate_io(u, input, output)?;
    fermion_amplitude_raw(u, input, output)
}

/// Exact output distribution over a unitary network, keyed by configuration
/// in lexicographic order.
///
/// Serializes as `{"M": .., "N": .., "statistics": "..", "entries":
/// [{"m": [..], "p": ..}, ..]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DistributionJson", into = "DistributionJson")]
pub struct OutputDistribution {
    modes: usize,
    particles: usize,
    statistics: Statistics,
    entries: BTreeMap<OccupationVector, f64>,
}

#[derive(Serialize, Deserialize)]
struct DistributionJson {
    #[serde(rename = "M")]
    modes: usize,
    #[serde(rename = "N")]
    particles: usize,
    statistics: Statistics,
    entries: Vec<DistributionEntryJson>,
}

#[derive(Serialize, Deserialize)]
struct DistributionEntryJson {
    m: Vec<usize>,
    p: f64,
}

impl TryFrom<DistributionJson> for OutputDistribution {
    type Error = Error;

    fn try_from(json: DistributionJson) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for entry in json.entries {
            entries.insert(OccupationVector::new(entry.m), entry.p);
        }
        OutputDistribution::from_entries(json.modes, json.particles, json.statistics, entries)
    }
}

impl From<OutputDistribution> for DistributionJson {
    fn from(d: OutputDistribution) -> Self {
        DistributionJson {
            modes: d.modes,
            particles: d.particles,
            statistics: d.statistics,
            entries: d
                .entries
                .iter()
                .map(|(m, &p)| DistributionEntryJson {
                    m: m.counts().to_vec(),
                    p,
                })
                .collect(),
        }
    }
}

impl OutputDistribution {
    /// Validates shapes, probability range, and the normalization contract
    /// (`sum p = 1` within [`NORMALIZATION_TOLERANCE`]). Vanishing
    /// probabilities are kept; nothing is pruned.
    pub fn from_entries(
        modes: usize,
        particles: usize,
        statistics: Statistics,
        entries: BTreeMap<OccupationVector, f64>,
    ) -> Result<Self> {
        for (config, &p) in &entries {
            if config.modes() != modes {
                return Err(Error::DimensionMismatch {
                    context: "distribution entry",
                    expected: modes,
                    found: config.modes(),
                });
            }
            if config.total() != particles {
                return Err(Error::ParticleNumber {
                    input: particles,
                    output: config.total(),
                });
            }
            if !(-1e-12..=1.0 + 1e-9).contains(&p) || !p.is_finite() {
                return Err(Error::ProbabilityOutOfRange {
                    context: config.to_string(),
                    value: p,
                });
            }
        }
        let sum: f64 = entries.values().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::NormalizationBroken { sum });
        }
        Ok(Self {
            modes,
            particles,
            statistics,
            entries,
        })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Probability of a configuration; configurations outside the support
    /// count as zero.
    pub fn probability(&self, config: &OccupationVector) -> f64 {
        self.entries.get(config).copied().unwrap_or(0.0)
    }

    /// Entries in lexicographic configuration order.
    pub fn entries(&self) -> impl Iterator<Item = (&OccupationVector, f64)> {
        self.entries.iter().map(|(m, &p)| (m, p))
    }

    pub fn normalization_error(&self) -> f64 {
        (self.entries.values().sum::<f64>() - 1.0).abs()
    }

    /// Largest pointwise probability difference over the union of supports.
    pub fn max_abs_deviation(&self, other: &Self) -> f64 {
        let mut dev: f64 = 0.0;
        for (config, p) in self.entries() {
            dev = dev.max((p - other.probability(config)).abs());
        }
        for (config, p) in other.entries() {
            dev = dev.max((p - self.probability(config)).abs());
        }
        dev
    }

    /// Total variation distance `0.5 * sum |p - q|`.
    pub fn total_variation(&self, other: &Self) -> f64 {
        total_variation(&self.entries, &other.entries)
    }

    /// CSV rendering with header `m_1,...,m_M,p`, rows in lexicographic
    /// configuration order.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for k in 1..=self.modes {
            out.push_str(&format!("m_{k},"));
        }
        out.push_str("p\n");
        for (config, p) in self.entries() {
            out.push_str(&format!("{config},{p}\n"));
        }
        out
    }
}

/// Total variation distance between two maps of probabilities.
pub fn total_variation(
    a: &BTreeMap<OccupationVector, f64>,
    b: &BTreeMap<OccupationVector, f64>,
) -> f64 {
    let mut sum = 0.0;
    for (config, p) in a {
        sum += (p - b.get(config).copied().unwrap_or(0.0)).abs();
    }
    for (config, q) in b {
        if !a.contains_key(config) {
            sum += q.abs();
        }
    }
    0.5 * sum
}

/// Exact output distribution of `input` through `U` on the fast
/// second-quantized path. Bosonic probabilities come from permanents,
/// fermionic ones from determinants; `General` statistics are rejected
/// because they require the first-quantization oracle.
pub fn output_distribution_fast(
    u: &ComplexMatrix,
    input: &OccupationVector,
    statistics: Statistics,
) -> Result<OutputDistribution> {
    u.require_unitary()?;
    if input.modes() != u.rows() {
        return Err(Error::DimensionMismatch {
            context: "input occupations",
            expected: u.rows(),
            found: input.modes(),
        });
    }
    if statistics == Statistics::General {
        return Err(Error::StatisticsNeedOracle {
            statistics: "general",
        });
    }
    if statistics == Statistics::Fermionic {
        if let Some((mode, count)) = input.first_bunched_mode() {
            return Err(Error::PauliViolation { mode, count });
        }
    }
    let configs = enumerate_configurations(input.modes(), input.total(), statistics)?;
    let mut entries = BTreeMap::new();
    for output in configs {
        let amp = match statistics {
            Statistics::Bosonic => boson_amplitude_raw(u, input, &output)?,
            Statistics::Fermionic => fermion_amplitude_raw(u, input, &output)?,
            Statistics::General => unreachable!("rejected above"),
        };
        entries.insert(output, amp.norm_sqr());
    }
    OutputDistribution::from_entries(input.modes(), input.total(), statistics, entries)
}
