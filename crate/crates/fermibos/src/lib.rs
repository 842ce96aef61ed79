//! Exact simulation of bosons, fermions, and non-identical particles in
//! unitary linear networks.
//!
//! The fast path computes transition amplitudes from matrix permanents
//! (bosons) and determinants (fermions) of input/output submatrices of the
//! network. A dense first-quantization oracle carries particles with
//! internal degrees of freedom explicitly and cross-validates the fast
//! path, including the duality where anti-symmetrizing both the mode and
//! the internal factor restores bosonic counting statistics. On top of the
//! two routes sit two-particle interference scans and a scattershot
//! sampler with fermionic pair sources.
//!
//! Everything is deterministic: random objects derive from explicit seeds
//! through counter-based generators, and parallel sampling assigns one
//! stream per trial so thread scheduling never changes results.

pub mod duality;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod oracle;
pub mod scattershot;

pub use duality::{hom_curve, run_duality_check, DualityReport, HomPoint};
pub use error::{Error, Result};
pub use fock::{
    boson_amplitude, configuration_count, enumerate_configurations, fermion_amplitude,
    output_distribution_fast, total_variation, OccupationVector, OutputDistribution, Statistics,
    ENUMERATION_CAP, NORMALIZATION_TOLERANCE,
};
pub use linalg::{
    build_submatrix, determinant, for_each_permutation, fourier_row_network, haar_random_unitary,
    permanent, permanent_naive, permutation_parity, ComplexMatrix, NAIVE_PERMANENT_CAP,
    PERMANENT_CAP, UNITARY_TOLERANCE,
};
pub use oracle::{
    apply_network, build_epsilon_state, condition_on_outcome, normalization_constant,
    oracle_distribution, oracle_distribution_of_state, permutation_operator, povm_element,
    povm_ordered_operator, povm_probability, povm_probability_symmetric, symmetrizer,
    verify_fock_projector, verify_povm_commutation, verify_povm_completeness,
    verify_projector_identity, Factor, InternalStateSet, LabeledStateVector, SymmetryFlag,
    TensorSpace, ORACLE_DIMENSION_CAP, ORACLE_PARTICLE_CAP, VANISHING_TOLERANCE,
};
pub use scattershot::{
    herald_distribution, non_bunching_probability, run_scattershot, verify_scattershot_oracle,
    write_records_jsonl, HeraldReport, ScattershotConfig, ScattershotRun, ScattershotSummary,
    TrialRecord, HERALD_FLATNESS_TOLERANCE,
};
