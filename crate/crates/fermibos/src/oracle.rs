//! First-quantization oracle: dense tensor states of `N` labeled particles,
//! each carrying a network mode (`M` values) and an internal label
//! (`D` values). Everything here is brute force on purpose; the module
//! exists to cross-validate the permanent/determinant fast path from an
//! independent representation.
//!
//! Basis layout is particle-major with mode-then-internal inside each
//! particle: the amplitude index is `sum_a (k_a * D + j_a) * (M*D)^(N-1-a)`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{enumerate_configurations, OccupationVector, OutputDistribution, Statistics};
use crate::linalg::{determinant, for_each_permutation, permanent, ComplexMatrix};

/// Particle-count cap for dense oracle states.
pub const ORACLE_PARTICLE_CAP: usize = 4;
/// Cap on the dense state dimension `(M*D)^N`.
pub const ORACLE_DIMENSION_CAP: u128 = 4096;
/// Below this weight a symmetrized state counts as vanishing.
pub const VANISHING_TOLERANCE: f64 = 1e-14;

/// Exchange symmetry flag: `S` (symmetric) or `A` (anti-symmetric).
/// Multiplication follows the sign rule `A * A = S`, `S * A = A`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SymmetryFlag {
    S,
    A,
}

impl SymmetryFlag {
    /// Character of a permutation under this flag: `+1` for `S`,
    /// the parity sign for `A`.
    pub fn sign(self, odd_permutation: bool) -> f64 {
        match self {
            SymmetryFlag::S => 1.0,
            SymmetryFlag::A => {
                if odd_permutation {
                    -1.0
                } else {
                    1.0
                }
            }
        }
    }

    /// Counting statistics of Fock states carrying this flag.
    pub fn statistics(self) -> Statistics {
        match self {
            SymmetryFlag::S => Statistics::Bosonic,
            SymmetryFlag::A => Statistics::Fermionic,
        }
    }
}

impl std::ops::Mul for SymmetryFlag {
    type Output = SymmetryFlag;

    fn mul(self, rhs: SymmetryFlag) -> SymmetryFlag {
        if self == rhs {
            SymmetryFlag::S
        } else {
            SymmetryFlag::A
        }
    }
}

impl fmt::Display for SymmetryFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymmetryFlag::S => write!(f, "S"),
            SymmetryFlag::A => write!(f, "A"),
        }
    }
}

impl FromStr for SymmetryFlag {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "S" | "s" => Ok(SymmetryFlag::S),
            "A" | "a" => Ok(SymmetryFlag::A),
            other => Err(format!("unknown symmetry flag `{other}` (expected S or A)")),
        }
    }
}

/// Tensor factor a permutation or symmetrizer acts on.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Factor {
    Modes,
    Internal,
    Both,
}

/// A set of `N` unit-norm internal states in `C^D`, one per particle.
///
/// Serializes as `{"D": .., "vectors": [[[re, im], ..], ..]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "InternalJson", into = "InternalJson")]
pub struct InternalStateSet {
    dim: usize,
    vectors: Vec<Vec<Complex64>>,
}

#[derive(Serialize, Deserialize)]
struct InternalJson {
    #[serde(rename = "D")]
    dim: usize,
    vectors: Vec<Vec<[f64; 2]>>,
}

impl TryFrom<InternalJson> for InternalStateSet {
    type Error = Error;

    fn try_from(json: InternalJson) -> Result<Self> {
        let vectors = json
            .vectors
            .into_iter()
            .map(|v| v.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
            .collect();
        InternalStateSet::from_vectors(json.dim, vectors)
    }
}

impl From<InternalStateSet> for InternalJson {
    fn from(set: InternalStateSet) -> Self {
        InternalJson {
            dim: set.dim,
            vectors: set
                .vectors
                .iter()
                .map(|v| v.iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }
}

impl InternalStateSet {
    /// Validates dimensions and unit norms (tolerance 1e-12).
    pub fn from_vectors(dim: usize, vectors: Vec<Vec<Complex64>>) -> Result<Self> {
        for (index, v) in vectors.iter().enumerate() {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    context: "internal state",
                    expected: dim,
                    found: v.len(),
                });
            }
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > 1e-12 {
                return Err(Error::InternalNotNormalized { index, norm });
            }
        }
        Ok(Self { dim, vectors })
    }

    /// `n` mutually orthogonal basis states in `C^n` (maximal
    /// distinguishability resource).
    pub fn orthonormal(n: usize) -> Self {
        let vectors = (0..n)
            .map(|i| {
                (0..n)
                    .map(|d| Complex64::new(if d == i { 1.0 } else { 0.0 }, 0.0))
                    .collect()
            })
            .collect();
        Self { dim: n, vectors }
    }

    /// Two states in `C^2` with real overlap `g`:
    /// `phi_1 = e_1`, `phi_2 = g e_1 + sqrt(1-g^2) e_2`.
    pub fn pairwise_overlap(overlap: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&overlap) {
            return Err(Error::OverlapOutOfRange { overlap });
        }
        let ortho = (1.0 - overlap * overlap).max(0.0).sqrt();
        let vectors = vec![
            vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            vec![Complex64::new(overlap, 0.0), Complex64::new(ortho, 0.0)],
        ];
        Ok(Self { dim: 2, vectors })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vector(&self, index: usize) -> &[Complex64] {
        &self.vectors[index]
    }

    pub fn overlap(&self, a: usize, b: usize) -> Complex64 {
        self.vectors[a]
            .iter()
            .zip(&self.vectors[b])
            .map(|(x, y)| x.conj() * y)
            .sum()
    }

    /// Gram matrix `G_ab = <phi_a|phi_b>` (Hermitian, unit diagonal).
    pub fn gram(&self) -> ComplexMatrix {
        let n = self.len();
        ComplexMatrix::from_fn(n, n, |a, b| self.overlap(a, b))
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n as u64).map(|k| k as f64).product()
}

/// Normalization constant of the internally symmetrized state:
/// `c = [w(G)/N!]^(-1/2)` with `w = per` for flag `S` and `w = det` for
/// flag `A`. Errors with a vanishing-state report when `w(G)/N!` falls to
/// [`VANISHING_TOLERANCE`] or below.
pub fn normalization_constant(internal: &InternalStateSet, eps2: SymmetryFlag) -> Result<f64> {
    let n = internal.len();
    let gram = internal.gram();
    let weight = match eps2 {
        SymmetryFlag::S => permanent(&gram)?,
        SymmetryFlag::A => determinant(&gram)?,
    };
    debug_assert!(weight.im.abs() < 1e-10, "Gram weight must be real");
    let scaled = weight.re / factorial(n);
    if scaled <= VANISHING_TOLERANCE {
        return Err(Error::VanishingState {
            detail: format!(
                "internal Gram weight {}(G)/N! = {scaled:.3e} at or below {VANISHING_TOLERANCE:.0e} for flag {eps2}",
                match eps2 {
                    SymmetryFlag::S => "per",
                    SymmetryFlag::A => "det",
                }
            ),
        });
    }
    Ok(scaled.powf(-0.5))
}

/// Shape of a dense oracle space: `N` particles, each with a mode label in
/// `0..M` and an internal label in `0..D`.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct TensorSpace {
    modes: usize,
    internal_dim: usize,
    particles: usize,
}

impl TensorSpace {
    pub fn new(modes: usize, internal_dim: usize, particles: usize) -> Result<Self> {
        if modes == 0 {
            return Err(Error::DimensionMismatch {
                context: "tensor space modes",
                expected: 1,
                found: 0,
            });
        }
        if internal_dim == 0 {
            return Err(Error::DimensionMismatch {
                context: "tensor space internal dimension",
                expected: 1,
                found: 0,
            });
        }
        if particles == 0 || particles > ORACLE_PARTICLE_CAP {
            return Err(Error::OracleParticleCap {
                particles,
                cap: ORACLE_PARTICLE_CAP,
            });
        }
        let dim = ((modes * internal_dim) as u128).pow(particles as u32);
        if dim > ORACLE_DIMENSION_CAP {
            return Err(Error::OracleDimensionCap {
                dim,
                cap: ORACLE_DIMENSION_CAP,
            });
        }
        Ok(Self {
            modes,
            internal_dim,
            particles,
        })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn internal_dim(&self) -> usize {
        self.internal_dim
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    /// Dense dimension `(M*D)^N`.
    pub fn dim(&self) -> usize {
        (self.modes * self.internal_dim).pow(self.particles as u32)
    }

    fn base(&self) -> usize {
        self.modes * self.internal_dim
    }

    /// Index of the basis state with the given per-particle labels.
    pub fn encode(&self, modes: &[usize], internals: &[usize]) -> usize {
        debug_assert_eq!(modes.len(), self.particles);
        debug_assert_eq!(internals.len(), self.particles);
        let mut idx = 0;
        for a in 0..self.particles {
            debug_assert!(modes[a] < self.modes && internals[a] < self.internal_dim);
            idx = idx * self.base() + modes[a] * self.internal_dim + internals[a];
        }
        idx
    }

    /// Per-particle labels of a basis index.
    pub fn decode(&self, index: usize, modes: &mut [usize], internals: &mut [usize]) {
        let mut rest = index;
        for a in (0..self.particles).rev() {
            let digit = rest % self.base();
            rest /= self.base();
            modes[a] = digit / self.internal_dim;
            internals[a] = digit % self.internal_dim;
        }
    }

    /// For each destination index, the source index under the particle
    /// permutation `perm` acting on the chosen factor: destination labels
    /// at position `perm(b)` come from source position `b`.
    fn permuted_index_map(&self, perm: &[usize], factor: Factor) -> Vec<usize> {
        let n = self.particles;
        let dim = self.dim();
        let mut map = vec![0usize; dim];
        let mut ks = vec![0usize; n];
        let mut js = vec![0usize; n];
        let mut src_ks = vec![0usize; n];
        let mut src_js = vec![0usize; n];
        for (dest, entry) in map.iter_mut().enumerate() {
            self.decode(dest, &mut ks, &mut js);
            for b in 0..n {
                src_ks[b] = match factor {
                    Factor::Modes | Factor::Both => ks[perm[b]],
                    Factor::Internal => ks[b],
                };
                src_js[b] = match factor {
                    Factor::Internal | Factor::Both => js[perm[b]],
                    Factor::Modes => js[b],
                };
            }
            *entry = self.encode(&src_ks, &src_js);
        }
        map
    }
}

/// Dense first-quantization state over a [`TensorSpace`].
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledStateVector {
    space: TensorSpace,
    amps: Vec<Complex64>,
}

impl LabeledStateVector {
    pub fn zero(space: TensorSpace) -> Self {
        Self {
            amps: vec![Complex64::new(0.0, 0.0); space.dim()],
            space,
        }
    }

    /// Product state `|k_1, phi_1> ... |k_N, phi_N>`: particle `a` sits in
    /// mode `modes[a]` carrying internal state `internal.vector(a)`.
    pub fn product_state(
        space: TensorSpace,
        modes: &[usize],
        internal: &InternalStateSet,
    ) -> Result<Self> {
        if modes.len() != space.particles() {
            return Err(Error::DimensionMismatch {
                context: "product state modes",
                expected: space.particles(),
                found: modes.len(),
            });
        }
        if internal.len() != space.particles() {
            return Err(Error::InternalStateCount {
                expected: space.particles(),
                found: internal.len(),
            });
        }
        if internal.dim() != space.internal_dim() {
            return Err(Error::DimensionMismatch {
                context: "internal dimension",
                expected: space.internal_dim(),
                found: internal.dim(),
            });
        }
        if let Some(&bad) = modes.iter().find(|&&k| k >= space.modes()) {
            return Err(Error::DimensionMismatch {
                context: "mode label",
                expected: space.modes(),
                found: bad,
            });
        }
        let mut state = Self::zero(space);
        let n = space.particles();
        let d = space.internal_dim();
        let mut js = vec![0usize; n];
        loop {
            let mut amp = Complex64::new(1.0, 0.0);
            for (a, &j) in js.iter().enumerate() {
                amp *= internal.vector(a)[j];
            }
            if amp != Complex64::new(0.0, 0.0) {
                let idx = space.encode(modes, &js);
                state.amps[idx] = amp;
            }
            // Odometer over internal labels.
            let mut a = n;
            loop {
                if a == 0 {
                    return Ok(state);
                }
                a -= 1;
                js[a] += 1;
                if js[a] < d {
                    break;
                }
                js[a] = 0;
            }
        }
    }

    pub fn space(&self) -> TensorSpace {
        self.space
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, modes: &[usize], internals: &[usize]) -> Complex64 {
        self.amps[self.space.encode(modes, internals)]
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.space != other.space {
            return Err(Error::DimensionMismatch {
                context: "state inner product",
                expected: self.space.dim(),
                found: other.space.dim(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            space: self.space,
            amps: self.amps.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.space != other.space {
            return Err(Error::DimensionMismatch {
                context: "state sum",
                expected: self.space.dim(),
                found: other.space.dim(),
            });
        }
        Ok(Self {
            space: self.space,
            amps: self
                .amps
                .iter()
                .zip(&other.amps)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Applies the permutation operator `P_sigma` on the chosen factor.
    pub fn apply_permutation(&self, perm: &[usize], factor: Factor) -> Self {
        let map = self.space.permuted_index_map(perm, factor);
        let amps = map.iter().map(|&src| self.amps[src]).collect();
        Self {
            space: self.space,
            amps,
        }
    }

    /// Applies the symmetrizer `S_eps = (1/N!) sum_sigma eps(sigma)
    /// P_sigma` on the chosen factor.
    pub fn symmetrized(&self, eps: SymmetryFlag, factor: Factor) -> Self {
        let n = self.space.particles();
        let dim = self.space.dim();
        let mut out = vec![Complex64::new(0.0, 0.0); dim];
        for_each_permutation(n, |perm, odd| {
            let sign = eps.sign(odd);
            let map = self.space.permuted_index_map(perm, factor);
            for (dest, &src) in map.iter().enumerate() {
                out[dest] += sign * self.amps[src];
            }
        });
        let weight = 1.0 / factorial(n);
        Self {
            space: self.space,
            amps: out.iter().map(|z| z * weight).collect(),
        }
    }
}

/// Dense matrix of the permutation operator `P_sigma` on the chosen factor.
pub fn permutation_operator(space: TensorSpace, perm: &[usize], factor: Factor) -> ComplexMatrix {
    let dim = space.dim();
    let map = space.permuted_index_map(perm, factor);
    let mut op = ComplexMatrix::zeros(dim, dim);
    for (dest, &src) in map.iter().enumerate() {
        op.set(dest, src, Complex64::new(1.0, 0.0));
    }
    op
}

/// Dense matrix of the symmetrizer `S_eps` on the chosen factor.
pub fn symmetrizer(space: TensorSpace, eps: SymmetryFlag, factor: Factor) -> ComplexMatrix {
    let dim = space.dim();
    let mut op = ComplexMatrix::zeros(dim, dim);
    for_each_permutation(space.particles(), |perm, odd| {
        let sign = eps.sign(odd);
        let map = space.permuted_index_map(perm, factor);
        for (dest, &src) in map.iter().enumerate() {
            let v = op.get(dest, src) + Complex64::new(sign, 0.0);
            op.set(dest, src, v);
        }
    });
    op.scale(Complex64::new(1.0 / factorial(space.particles()), 0.0))
}

/// Checks the factorization identity `(I (x) S_e2) S_e1 = S_(e1 e2) (x) S_e2`
/// as dense operators; returns the Frobenius norm of the difference.
pub fn verify_projector_identity(
    eps1: SymmetryFlag,
    eps2: SymmetryFlag,
    modes: usize,
    internal_dim: usize,
    particles: usize,
) -> Result<f64> {
    let space = TensorSpace::new(modes, internal_dim, particles)?;
    let lhs = symmetrizer(space, eps2, Factor::Internal).matmul(&symmetrizer(
        space,
        eps1,
        Factor::Both,
    ))?;
    let rhs = symmetrizer(space, eps1 * eps2, Factor::Modes).matmul(&symmetrizer(
        space,
        eps2,
        Factor::Internal,
    ))?;
    Ok(lhs.sub(&rhs)?.frobenius_norm())
}

/// Builds the epsilon-symmetrized input state
/// `c sqrt(N!/mu(n)) (I (x) S_e2) S_e1 |k, phi>` for occupations `n` and
/// the given internal states. The construction checks the factorized form
/// (mode Fock factor times symmetrized internal factor) to 1e-12 and the
/// unit norm to 1e-10, and fails loudly if either breaks.
pub fn build_epsilon_state(
    n: &OccupationVector,
    internal: &InternalStateSet,
    eps1: SymmetryFlag,
    eps2: SymmetryFlag,
) -> Result<LabeledStateVector> {
    let particles = n.total();
    if internal.len() != particles {
        return Err(Error::InternalStateCount {
            expected: particles,
            found: internal.len(),
        });
    }
    let space = TensorSpace::new(n.modes(), internal.dim(), particles)?;
    let effective = eps1 * eps2;
    if effective == SymmetryFlag::A && !n.is_single_occupancy() {
        let (mode, count) = n.first_bunched_mode().expect("bunched mode exists");
        return Err(Error::VanishingState {
            detail: format!(
                "mode {mode} holds {count} particles but the effective mode symmetry is anti-symmetric"
            ),
        });
    }
    let c = normalization_constant(internal, eps2)?;
    let modes = n.mode_list();
    let product = LabeledStateVector::product_state(space, &modes, internal)?;
    let state = product
        .symmetrized(eps1, Factor::Both)
        .symmetrized(eps2, Factor::Internal);
    let weight = c * (factorial(particles) / n.multiplicity()? as f64).sqrt();
    let state = state.scale(Complex64::new(weight, 0.0));

    let norm = state.norm();
    assert!(
        (norm - 1.0).abs() < 1e-10,
        "built state has norm {norm}, expected 1"
    );
    verify_factorized_form(&state, n, internal, effective, eps2, c)?;
    Ok(state)
}

/// The built state must equal `c * ||n^(eff)> (x) S_e2 |phi>` pointwise.
fn verify_factorized_form(
    state: &LabeledStateVector,
    n: &OccupationVector,
    internal: &InternalStateSet,
    effective: SymmetryFlag,
    eps2: SymmetryFlag,
    c: f64,
) -> Result<()> {
    let particles = n.total();
    let mode_space = TensorSpace::new(n.modes(), 1, particles)?;
    let trivial =
        InternalStateSet::from_vectors(1, vec![vec![Complex64::new(1.0, 0.0)]; particles])?;
    let mode_factor = LabeledStateVector::product_state(mode_space, &n.mode_list(), &trivial)?
        .symmetrized(effective, Factor::Both)
        .scale(Complex64::new(
            (factorial(particles) / n.multiplicity()? as f64).sqrt(),
            0.0,
        ));
    let internal_space = TensorSpace::new(1, internal.dim(), particles)?;
    let internal_factor =
        LabeledStateVector::product_state(internal_space, &vec![0; particles], internal)?
            .symmetrized(eps2, Factor::Both);

    let space = state.space();
    let mut ks = vec![0usize; particles];
    let mut js = vec![0usize; particles];
    let zeros = vec![0usize; particles];
    let mut worst: f64 = 0.0;
    for (idx, &amp) in state.amplitudes().iter().enumerate() {
        space.decode(idx, &mut ks, &mut js);
        let expected = Complex64::new(c, 0.0)
            * mode_factor.amplitude(&ks, &zeros)
            * internal_factor.amplitude(&zeros, &js);
        worst = worst.max((amp - expected).norm());
    }
    assert!(
        worst < 1e-12,
        "factorized form deviates by {worst:.3e}; construction is inconsistent"
    );
    Ok(())
}

/// Propagates every particle through the single-particle network `U`
/// (modes transform; internal labels ride along untouched).
pub fn apply_network(state: &LabeledStateVector, u: &ComplexMatrix) -> Result<LabeledStateVector> {
    let space = state.space();
    if !u.is_square() {
        return Err(Error::NonSquare {
            rows: u.rows(),
            cols: u.cols(),
        });
    }
    if u.rows() != space.modes() {
        return Err(Error::DimensionMismatch {
            context: "network dimension",
            expected: space.modes(),
            found: u.rows(),
        });
    }
    u.require_unitary()?;
    let m = space.modes();
    let d = space.internal_dim();
    let n = space.particles();
    let b = m * d;
    let dim = space.dim();
    let mut amps = state.amplitudes().to_vec();
    let mut scratch = vec![Complex64::new(0.0, 0.0); m];
    for a in 0..n {
        let stride = b.pow((n - 1 - a) as u32);
        let block = b * stride;
        for hi in 0..dim / block {
            for j in 0..d {
                for lo in 0..stride {
                    let base = hi * block + j * stride + lo;
                    for (k, s) in scratch.iter_mut().enumerate() {
                        *s = amps[base + k * d * stride];
                    }
                    for l in 0..m {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for (k, s) in scratch.iter().enumerate() {
                            acc += u.get(k, l) * s;
                        }
                        amps[base + l * d * stride] = acc;
                    }
                }
            }
        }
    }
    Ok(LabeledStateVector { space, amps })
}

fn distinct_orderings(m: &OccupationVector) -> Vec<Vec<usize>> {
    let sorted = m.mode_list();
    let n = sorted.len();
    let mut orderings = BTreeSet::new();
    for_each_permutation(n, |perm, _| {
        let ordering: Vec<usize> = perm.iter().map(|&p| sorted[p]).collect();
        orderings.insert(ordering);
    });
    orderings.into_iter().collect()
}

/// Sums `|amplitude|^2` over every internal label assignment for the given
/// ordered mode labels.
fn mass_of_ordering(state: &LabeledStateVector, ordering: &[usize]) -> f64 {
    let space = state.space();
    let n = space.particles();
    let d = space.internal_dim();
    let mut js = vec![0usize; n];
    let mut mass = 0.0;
    loop {
        mass += state.amplitude(ordering, &js).norm_sqr();
        let mut a = n;
        loop {
            if a == 0 {
                return mass;
            }
            a -= 1;
            js[a] += 1;
            if js[a] < d {
                break;
            }
            js[a] = 0;
        }
    }
}

/// Probability of counting the configuration `m` at the output: the mass of
/// every distinct ordering of `m`'s mode labels, all internal labels traced
/// out. Valid for arbitrary states; on exchange-symmetric states it equals
/// the single-ordering form of [`povm_probability_symmetric`].
pub fn povm_probability(state: &LabeledStateVector, m: &OccupationVector) -> Result<f64> {
    let space = state.space();
    if m.modes() != space.modes() {
        return Err(Error::DimensionMismatch {
            context: "measured configuration",
            expected: space.modes(),
            found: m.modes(),
        });
    }
    if m.total() != space.particles() {
        return Err(Error::ParticleNumber {
            input: space.particles(),
            output: m.total(),
        });
    }
    Ok(distinct_orderings(m)
        .iter()
        .map(|ordering| mass_of_ordering(state, ordering))
        .sum())
}

/// Single-ordering probability `(N!/mu(m)) * mass(sorted labels)`; equal to
/// [`povm_probability`] on exchange-symmetric states only.
pub fn povm_probability_symmetric(state: &LabeledStateVector, m: &OccupationVector) -> Result<f64> {
    let space = state.space();
    if m.modes() != space.modes() {
        return Err(Error::DimensionMismatch {
            context: "measured configuration",
            expected: space.modes(),
            found: m.modes(),
        });
    }
    if m.total() != space.particles() {
        return Err(Error::ParticleNumber {
            input: space.particles(),
            output: m.total(),
        });
    }
    let weight = factorial(space.particles()) / m.multiplicity()? as f64;
    Ok(weight * mass_of_ordering(state, &m.mode_list()))
}

/// Occupation-measurement update: zeroes every amplitude whose mode labels
/// do not realize `m`, returns the renormalized state and the outcome
/// probability. Errors when the outcome has vanishing probability.
pub fn condition_on_outcome(
    state: &LabeledStateVector,
    m: &OccupationVector,
) -> Result<(LabeledStateVector, f64)> {
    let p = povm_probability(state, m)?;
    if p <= VANISHING_TOLERANCE {
        return Err(Error::VanishingState {
            detail: format!("conditioning on outcome {m} of probability {p:.3e}"),
        });
    }
    let space = state.space();
    let n = space.particles();
    let mut ks = vec![0usize; n];
    let mut js = vec![0usize; n];
    let scale = 1.0 / p.sqrt();
    let mut amps = state.amplitudes().to_vec();
    for (idx, amp) in amps.iter_mut().enumerate() {
        space.decode(idx, &mut ks, &mut js);
        if &OccupationVector::from_modes(&ks, space.modes()) != m {
            *amp = Complex64::new(0.0, 0.0);
        } else {
            *amp *= scale;
        }
    }
    Ok((LabeledStateVector { space, amps }, p))
}

/// Dense operator `(N!/mu(m)) |l><l| (x) I` for the ascending ordering `l`
/// of `m` (diagonal in the product basis).
pub fn povm_ordered_operator(space: TensorSpace, m: &OccupationVector) -> Result<ComplexMatrix> {
    if m.modes() != space.modes() {
        return Err(Error::DimensionMismatch {
            context: "measured configuration",
            expected: space.modes(),
            found: m.modes(),
        });
    }
    if m.total() != space.particles() {
        return Err(Error::ParticleNumber {
            input: space.particles(),
            output: m.total(),
        });
    }
    let weight = factorial(space.particles()) / m.multiplicity()? as f64;
    let sorted = m.mode_list();
    let n = space.particles();
    let d = space.internal_dim();
    let mut op = ComplexMatrix::zeros(space.dim(), space.dim());
    let mut js = vec![0usize; n];
    loop {
        let idx = space.encode(&sorted, &js);
        op.set(idx, idx, Complex64::new(weight, 0.0));
        let mut a = n;
        loop {
            if a == 0 {
                return Ok(op);
            }
            a -= 1;
            js[a] += 1;
            if js[a] < d {
                break;
            }
            js[a] = 0;
        }
    }
}

/// Symmetrized POVM element `S_eps Pi_l S_eps`.
pub fn povm_element(
    space: TensorSpace,
    eps: SymmetryFlag,
    m: &OccupationVector,
) -> Result<ComplexMatrix> {
    let s = symmetrizer(space, eps, Factor::Both);
    let pi = povm_ordered_operator(space, m)?;
    s.matmul(&pi)?.matmul(&s)
}

/// Completeness of the symmetrized POVM: `sum_m Pi^(eps)(m) = S_eps`.
/// Returns the Frobenius norm of the difference.
pub fn verify_povm_completeness(
    eps: SymmetryFlag,
    modes: usize,
    internal_dim: usize,
    particles: usize,
) -> Result<f64> {
    let space = TensorSpace::new(modes, internal_dim, particles)?;
    let mut sum = ComplexMatrix::zeros(space.dim(), space.dim());
    for m in enumerate_configurations(modes, particles, Statistics::Bosonic)? {
        sum = sum.add(&povm_element(space, eps, &m)?)?;
    }
    let s = symmetrizer(space, eps, Factor::Both);
    Ok(sum.sub(&s)?.frobenius_norm())
}

/// Checks that the mode-symmetrized ordered projector acts as a Fock-state
/// dyad: `(S_eps (x) I) Pi_l (S_eps (x) I) = |n_eps><n_eps| (x) I` with
/// `|n_eps>` the normalized (anti-)symmetrized occupation state. Returns
/// the worst entrywise deviation over all configurations (skipping bunched
/// ones for the anti-symmetric flag, whose Fock states vanish).
pub fn verify_fock_projector(
    eps: SymmetryFlag,
    modes: usize,
    internal_dim: usize,
    particles: usize,
) -> Result<f64> {
    let space = TensorSpace::new(modes, internal_dim, particles)?;
    let s_modes = symmetrizer(space, eps, Factor::Modes);
    let mode_space = TensorSpace::new(modes, 1, particles)?;
    let trivial =
        InternalStateSet::from_vectors(1, vec![vec![Complex64::new(1.0, 0.0)]; particles])?;
    let mut worst: f64 = 0.0;
    for m in enumerate_configurations(modes, particles, Statistics::Bosonic)? {
        if eps == SymmetryFlag::A && !m.is_single_occupancy() {
            continue;
        }
        let pi = povm_ordered_operator(space, &m)?;
        let lhs = s_modes.matmul(&pi)?.matmul(&s_modes)?;

        let fock = LabeledStateVector::product_state(mode_space, &m.mode_list(), &trivial)?
            .symmetrized(eps, Factor::Both)
            .scale(Complex64::new(
                (factorial(particles) / m.multiplicity()? as f64).sqrt(),
                0.0,
            ));
        let mut rhs = ComplexMatrix::zeros(space.dim(), space.dim());
        let mut ks_r = vec![0; particles];
        let mut js_r = vec![0; particles];
        let mut ks_c = vec![0; particles];
        let mut js_c = vec![0; particles];
        let zeros = vec![0; particles];
        for r in 0..space.dim() {
            space.decode(r, &mut ks_r, &mut js_r);
            for c in 0..space.dim() {
                space.decode(c, &mut ks_c, &mut js_c);
                if js_r != js_c {
                    continue;
                }
                let v = fock.amplitude(&ks_r, &zeros) * fock.amplitude(&ks_c, &zeros).conj();
                rhs.set(r, c, v);
            }
        }
        worst = worst.max(lhs.max_abs_diff(&rhs));
    }
    Ok(worst)
}

/// Commutation of the symmetrized POVM element with the internal
/// symmetrizer: `||(I (x) S_e2) Pi^(e1)(m) - Pi^(e1)(m) (I (x) S_e2)||_F`.
pub fn verify_povm_commutation(
    eps_povm: SymmetryFlag,
    eps_internal: SymmetryFlag,
    modes: usize,
    internal_dim: usize,
    particles: usize,
    m: &OccupationVector,
) -> Result<f64> {
    let space = TensorSpace::new(modes, internal_dim, particles)?;
    let pi = povm_element(space, eps_povm, m)?;
    let s2 = symmetrizer(space, eps_internal, Factor::Internal);
    let left = s2.matmul(&pi)?;
    let right = pi.matmul(&s2)?;
    Ok(left.sub(&right)?.frobenius_norm())
}

/// Output distribution of an arbitrary dense state through `U`, computed
/// entirely in first quantization. The statistics tag records how the
/// state was prepared (`General` for raw states).
pub fn oracle_distribution_of_state(
    state: &LabeledStateVector,
    u: &ComplexMatrix,
    statistics: Statistics,
) -> Result<OutputDistribution> {
    let space = state.space();
    let evolved = apply_network(state, u)?;
    let configs = enumerate_configurations(space.modes(), space.particles(), Statistics::Bosonic)?;
    let mut entries = std::collections::BTreeMap::new();
    for m in configs {
        let p = povm_probability(&evolved, &m)?;
        entries.insert(m, p);
    }
    OutputDistribution::from_entries(space.modes(), space.particles(), statistics, entries)
}

/// Output distribution of the epsilon-symmetrized input state built from
/// `n`, tagged with the statistics of the effective flag `eps1 * eps2`.
pub fn oracle_distribution(
    n: &OccupationVector,
    internal: &InternalStateSet,
    eps1: SymmetryFlag,
    eps2: SymmetryFlag,
    u: &ComplexMatrix,
) -> Result<OutputDistribution> {
    let state = build_epsilon_state(n, internal, eps1, eps2)?;
    oracle_distribution_of_state(&state, u, (eps1 * eps2).statistics())
}
