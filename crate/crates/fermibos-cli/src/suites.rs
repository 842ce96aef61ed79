//! Named verification suites behind `fermibos verify`: each one runs an
//! exact identity of the simulator at small size and reports its worst
//! numerical deviation against a fixed tolerance.

use anyhow::Context;
use fermibos::{
    enumerate_configurations, fourier_row_network, haar_random_unitary, herald_distribution,
    hom_curve, non_bunching_probability, permanent, permanent_naive, run_duality_check,
    verify_fock_projector, verify_povm_commutation, verify_povm_completeness,
    verify_projector_identity, verify_scattershot_oracle, ComplexMatrix, InternalStateSet,
    OccupationVector, Statistics, SymmetryFlag,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SUITE_NAMES: [&str; 9] = [
    "projector-identity",
    "povm-completeness",
    "povm-commutation",
    "fock-projector",
    "duality-table",
    "herald-uniform",
    "scattershot-oracle",
    "permanent-oracle",
    "hom-dip",
];

pub struct SuiteOutcome {
    pub name: &'static str,
    pub deviation: f64,
    pub tolerance: f64,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.deviation < self.tolerance
    }
}

const FLAGS: [SymmetryFlag; 2] = [SymmetryFlag::S, SymmetryFlag::A];

pub fn run_suite(name: &str, seed: u64) -> anyhow::Result<SuiteOutcome> {
    match name {
        "projector-identity" => {
            let mut worst: f64 = 0.0;
            for eps1 in FLAGS {
                for eps2 in FLAGS {
                    for particles in [2, 3] {
                        worst = worst.max(verify_projector_identity(eps1, eps2, 2, 2, particles)?);
                    }
                }
            }
            outcome("projector-identity", worst, 1e-12)
        }
        "povm-completeness" => {
            let mut worst: f64 = 0.0;
            for eps in FLAGS {
                for particles in [2, 3] {
                    worst = worst.max(verify_povm_completeness(eps, 2, 2, particles)?);
                }
            }
            outcome("povm-completeness", worst, 1e-12)
        }
        "povm-commutation" => {
            let mut worst: f64 = 0.0;
            for eps_povm in FLAGS {
                for eps_internal in FLAGS {
                    for particles in [2, 3] {
                        for m in enumerate_configurations(2, particles, Statistics::Bosonic)? {
                            worst = worst.max(verify_povm_commutation(
                                eps_povm,
                                eps_internal,
                                2,
                                2,
                                particles,
                                &m,
                            )?);
                        }
                    }
                }
            }
            outcome("povm-commutation", worst, 1e-12)
        }
        "fock-projector" => {
            let mut worst: f64 = 0.0;
            for eps in FLAGS {
                for particles in [2, 3] {
                    worst = worst.max(verify_fock_projector(eps, 2, 2, particles)?);
                }
            }
            outcome("fock-projector", worst, 1e-12)
        }
        "duality-table" => {
            let mut worst: f64 = 0.0;
            for eps1 in FLAGS {
                for eps2 in FLAGS {
                    for modes in [2usize, 3] {
                        let input = {
                            let mut counts = vec![0; modes];
                            counts[0] = 1;
                            counts[1] = 1;
                            OccupationVector::new(counts)
                        };
                        let internal = InternalStateSet::orthonormal(2);
                        for offset in 0..3u64 {
                            let u = haar_random_unitary(modes, seed + offset);
                            let report = run_duality_check(eps1, eps2, &input, &internal, &u)?;
                            anyhow::ensure!(
                                report.verdict == (eps1 * eps2).statistics(),
                                "({eps1},{eps2}) produced verdict {} instead of {}",
                                report.verdict,
                                (eps1 * eps2).statistics()
                            );
                            worst = worst.max(report.max_abs_deviation);
                        }
                    }
                }
            }
            outcome("duality-table", worst, 1e-10)
        }
        "herald-uniform" => {
            let mut worst: f64 = 0.0;
            for modes in 2usize..=8 {
                for particles in 1usize..=4.min(modes) {
                    let dist = herald_distribution(&fourier_row_network(modes), particles)?;
                    let uniform = (1..=particles as u64).map(|k| k as f64).product::<f64>()
                        / (modes as f64).powi(particles as i32);
                    let mut mass = 0.0;
                    for (config, p) in dist.entries() {
                        if config.is_single_occupancy() {
                            mass += p;
                            worst = worst.max((p - uniform).abs());
                        }
                    }
                    worst = worst.max((mass - non_bunching_probability(modes, particles)).abs());
                }
            }
            outcome("herald-uniform", worst, 1e-12)
        }
        "scattershot-oracle" => {
            let worst = verify_scattershot_oracle(2, 2, 2, seed)?;
            outcome("scattershot-oracle", worst, 1e-10)
        }
        "permanent-oracle" => {
            let mut worst: f64 = 0.0;
            for size in 2usize..=7 {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ size as u64);
                for _ in 0..25 {
                    let m = ComplexMatrix::from_fn(size, size, |_, _| {
                        Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
                    });
                    let fast = permanent(&m)?;
                    let slow = permanent_naive(&m)?;
                    worst = worst.max((fast - slow).norm() / slow.norm().max(1e-300));
                }
            }
            outcome("permanent-oracle", worst, 1e-12)
        }
        "hom-dip" => {
            let mut worst: f64 = 0.0;
            let expectations = [
                (SymmetryFlag::S, SymmetryFlag::S, 1.0, 0.0),
                (SymmetryFlag::S, SymmetryFlag::S, 0.0, 0.5),
                (SymmetryFlag::A, SymmetryFlag::S, 1.0, 1.0),
                (SymmetryFlag::S, SymmetryFlag::A, 0.0, 1.0),
                (SymmetryFlag::A, SymmetryFlag::A, 0.0, 0.0),
            ];
            for (eps1, eps2, overlap, expected) in expectations {
                let point = hom_curve(&[overlap], eps1, eps2)?
                    .pop()
                    .context("empty interference scan")?;
                let coincidence = point
                    .coincidence
                    .with_context(|| format!("({eps1},{eps2}) vanished at overlap {overlap}"))?;
                worst = worst.max((coincidence - expected).abs());
            }
            outcome("hom-dip", worst, 1e-12)
        }
        other => anyhow::bail!(
            "unknown suite `{other}` (expected one of {} or `all`)",
            SUITE_NAMES.join(", ")
        ),
    }
}

fn outcome(name: &'static str, deviation: f64, tolerance: f64) -> anyhow::Result<SuiteOutcome> {
    Ok(SuiteOutcome {
        name,
        deviation,
        tolerance,
    })
}
