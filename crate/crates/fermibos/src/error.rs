use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while building states, networks, or
/// distributions. Validation failures (bad shapes, exceeded caps, vanishing
/// states) are recoverable input errors; [`Error::NormalizationBroken`]
/// signals a violated numerical contract.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is {rows}x{cols} but a square matrix is required")]
    NonSquare { rows: usize, cols: usize },

    #[error("{rows}x{cols} matrix needs {expected} entries, got {found}")]
    EntryCount {
        rows: usize,
        cols: usize,
        expected: usize,
        found: usize,
    },

    #[error("{context}: expected dimension {expected}, got {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("permanent kernel capped at N = {cap}, got N = {size}")]
    PermanentCap { size: usize, cap: usize },

    #[error("permutation-sum reference kernel capped at N = {cap}, got N = {size}")]
    NaiveCap { size: usize, cap: usize },

    #[error("matrix is not unitary: ||U^H U - I||_F = {deviation:.3e} exceeds {tolerance:.1e}")]
    NotUnitary { deviation: f64, tolerance: f64 },

    #[error("input carries {input} particles but output carries {output}")]
    ParticleNumber { input: usize, output: usize },

    #[error("fermionic occupation exceeds one: mode {mode} holds {count} particles")]
    PauliViolation { mode: usize, count: usize },

    #[error("cannot place {particles} fermions in {modes} modes")]
    TooManyFermions { particles: usize, modes: usize },

    #[error("occupation multiplicity of {counts:?} overflows 64 bits")]
    MultiplicityOverflow { counts: Vec<usize> },

    #[error("configuration space holds {count} entries, above the enumeration cap {cap}")]
    EnumerationTooLarge { count: u128, cap: u128 },

    #[error("empty submatrix: occupations must carry at least one particle")]
    EmptySubmatrix,

    #[error("{statistics} statistics require the first-quantization oracle path")]
    StatisticsNeedOracle { statistics: &'static str },

    #[error("internal state {index} has norm {norm} (unit norm required within 1e-12)")]
    InternalNotNormalized { index: usize, norm: f64 },

    #[error("expected {expected} internal states, got {found}")]
    InternalStateCount { expected: usize, found: usize },

    #[error("internal overlap must satisfy |g| <= 1, got {overlap}")]
    OverlapOutOfRange { overlap: f64 },

    #[error("oracle space capped at N = {cap} particles, got N = {particles}")]
    OracleParticleCap { particles: usize, cap: usize },

    #[error("oracle space dimension (M*D)^N = {dim} exceeds the cap {cap}")]
    OracleDimensionCap { dim: u128, cap: u128 },

    #[error("symmetrized state vanishes: {detail}")]
    VanishingState { detail: String },

    #[error(
        "herald row is not flat: max | |V_1k|^2 - 1/M | = {deviation:.3e} exceeds {tolerance:.1e}"
    )]
    HeraldRowNotFlat { deviation: f64, tolerance: f64 },

    #[error("distribution breaks normalization: sum of probabilities is {sum:.15}")]
    NormalizationBroken { sum: f64 },

    #[error("probability out of range at {context}: {value:.3e}")]
    ProbabilityOutOfRange { context: String, value: f64 },
}
