//! Boson-fermion duality checks: the counting statistics of a symmetrized
//! input depend only on the product of the mode flag and the internal flag.
//! This module runs both computational routes (permanent/determinant fast
//! path versus the dense first-quantization oracle) and reports how far
//! apart they land, plus two-particle interference curves on a balanced
//! beam splitter.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::fock::{output_distribution_fast, OccupationVector, OutputDistribution, Statistics};
use crate::linalg::{fourier_row_network, ComplexMatrix};
use crate::oracle::{
    apply_network, build_epsilon_state, oracle_distribution, povm_probability, Factor,
    InternalStateSet, LabeledStateVector, SymmetryFlag, TensorSpace,
};

/// Outcome of one duality check: the effective flag, the statistics verdict
/// it implies, and the deviation between the fast path and the oracle.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DualityReport {
    pub eps1: SymmetryFlag,
    pub eps2: SymmetryFlag,
    pub effective: SymmetryFlag,
    pub verdict: Statistics,
    pub max_abs_deviation: f64,
    #[serde(rename = "fast_distribution")]
    pub fast: OutputDistribution,
    #[serde(rename = "oracle_distribution")]
    pub oracle: OutputDistribution,
}

/// Computes the output distribution of the `(eps1, eps2)`-symmetrized input
/// twice, once per route, and packages the comparison. The fast route uses
/// permanents when the effective flag is `S` and determinants when it is
/// `A`, with no reference to the internal states at all.
pub fn run_duality_check(
    eps1: SymmetryFlag,
    eps2: SymmetryFlag,
    n: &OccupationVector,
    internal: &InternalStateSet,
    u: &ComplexMatrix,
) -> Result<DualityReport> {
    let effective = eps1 * eps2;
    let verdict = effective.statistics();
    let fast = output_distribution_fast(u, n, verdict)?;
    let oracle = oracle_distribution(n, internal, eps1, eps2, u)?;
    let max_abs_deviation = oracle.max_abs_deviation(&fast);
    Ok(DualityReport {
        eps1,
        eps2,
        effective,
        verdict,
        max_abs_deviation,
        fast,
        oracle,
    })
}

/// One point of a two-particle interference scan. `coincidence` is absent
/// when the requested state vanishes at that overlap (the `note` says why).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomPoint {
    pub overlap: f64,
    pub coincidence: Option<f64>,
    pub note: Option<String>,
}

/// Coincidence probability p(1,1) behind a balanced beam splitter for a
/// two-particle input, one particle per port, with internal states of real
/// overlap `g` scanned over `grid`.
///
/// The internal flag picks the state family:
///
/// * `eps2 = S`: the particles stay in the product internal state
///   `|phi_1>|phi_2(g)>`; the full input is the normalized
///   `eps1`-symmetrized product. Bosons (`eps1 = S`) show the classic dip
///   `(1 - g^2)/2`, fermions (`eps1 = A`) the peak `(1 + g^2)/2`.
/// * `eps2 = A`: the internal pair is anti-symmetrized. The mode factor is
///   then an exact Fock state with effective flag `eps1 * eps2`, and the
///   coincidence locks to 0 (effective `S`) or 1 (effective `A`) for every
///   `g < 1`; at `g = 1` the state vanishes and the point carries a note.
pub fn hom_curve(grid: &[f64], eps1: SymmetryFlag, eps2: SymmetryFlag) -> Result<Vec<HomPoint>> {
    let splitter = fourier_row_network(2);
    let coincidence_target = OccupationVector::new(vec![1, 1]);
    let mut points = Vec::with_capacity(grid.len());
    for &overlap in grid {
        let internal = InternalStateSet::pairwise_overlap(overlap)?;
        let input = match eps2 {
            SymmetryFlag::S => {
                let space = TensorSpace::new(2, 2, 2)?;
                let product = LabeledStateVector::product_state(space, &[0, 1], &internal)?;
                let sym = product.symmetrized(eps1, Factor::Both);
                let norm = sym.norm();
                // Distinct input ports keep the symmetrized norm at
                // sqrt(1/2) for every overlap, so this never fires.
                if norm * norm <= 1e-14 {
                    points.push(HomPoint {
                        overlap,
                        coincidence: None,
                        note: Some("symmetrized product state vanishes".to_string()),
                    });
                    continue;
                }
                Ok(sym.scale(Complex64::new(1.0 / norm, 0.0)))
            }
            SymmetryFlag::A => {
                build_epsilon_state(&coincidence_target, &internal, eps1, SymmetryFlag::A)
            }
        };
        match input {
            Ok(state) => {
                let out = apply_network(&state, &splitter)?;
                let p = povm_probability(&out, &coincidence_target)?;
                points.push(HomPoint {
                    overlap,
                    coincidence: Some(p),
                    note: None,
                });
            }
            Err(crate::error::Error::VanishingState { detail }) => {
                points.push(HomPoint {
                    overlap,
                    coincidence: None,
                    note: Some(detail),
                });
            }
            Err(other) => return Err(other),
        }
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::haar_random_unitary;

    fn occ(counts: &[usize]) -> OccupationVector {
        OccupationVector::new(counts.to_vec())
    }

    fn point(eps1: SymmetryFlag, eps2: SymmetryFlag, g: f64) -> HomPoint {
        hom_curve(&[g], eps1, eps2).unwrap().pop().unwrap()
    }

    #[test]
    fn bosonic_dip_vanishes_at_full_overlap() {
        let p = point(SymmetryFlag::S, SymmetryFlag::S, 1.0);
        assert!(p.coincidence.unwrap().abs() < 1e-12);
    }

    #[test]
    fn orthogonal_internals_give_classical_coincidence() {
        for eps1 in [SymmetryFlag::S, SymmetryFlag::A] {
            let p = point(eps1, SymmetryFlag::S, 0.0);
            assert!((p.coincidence.unwrap() - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn antisymmetric_internals_lock_the_coincidence() {
        // Effective A: certain coincidence. Effective S: never.
        for g in [0.0, 0.3, 0.9] {
            let pa = point(SymmetryFlag::S, SymmetryFlag::A, g);
            assert!((pa.coincidence.unwrap() - 1.0).abs() < 1e-12, "g={g}");
            let ps = point(SymmetryFlag::A, SymmetryFlag::A, g);
            assert!(ps.coincidence.unwrap().abs() < 1e-12, "g={g}");
        }
    }

    #[test]
    fn antisymmetric_internals_vanish_at_full_overlap() {
        let p = point(SymmetryFlag::S, SymmetryFlag::A, 1.0);
        assert!(p.coincidence.is_none());
        assert!(p.note.unwrap().contains("det"));
    }

    #[test]
    fn product_state_curves_follow_the_closed_forms() {
        let grid: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        let bosons = hom_curve(&grid, SymmetryFlag::S, SymmetryFlag::S).unwrap();
        let fermions = hom_curve(&grid, SymmetryFlag::A, SymmetryFlag::S).unwrap();
        for (b, f) in bosons.iter().zip(&fermions) {
            let g = b.overlap;
            assert!((b.coincidence.unwrap() - (1.0 - g * g) / 2.0).abs() < 1e-12);
            assert!((f.coincidence.unwrap() - (1.0 + g * g) / 2.0).abs() < 1e-12);
        }
        // Monotone: the dip falls, the peak climbs.
        for w in bosons.windows(2) {
            assert!(w[1].coincidence.unwrap() <= w[0].coincidence.unwrap() + 1e-15);
        }
        for w in fermions.windows(2) {
            assert!(w[1].coincidence.unwrap() >= w[0].coincidence.unwrap() - 1e-15);
        }
    }

    #[test]
    fn verdict_depends_only_on_the_effective_flag() {
        let internal = InternalStateSet::orthonormal(2);
        let u = haar_random_unitary(3, 11);
        let n = occ(&[1, 1, 0]);
        let table = [
            (SymmetryFlag::S, SymmetryFlag::S, Statistics::Bosonic),
            (SymmetryFlag::A, SymmetryFlag::A, Statistics::Bosonic),
            (SymmetryFlag::S, SymmetryFlag::A, Statistics::Fermionic),
            (SymmetryFlag::A, SymmetryFlag::S, Statistics::Fermionic),
        ];
        for (eps1, eps2, expected) in table {
            let report = run_duality_check(eps1, eps2, &n, &internal, &u).unwrap();
            assert_eq!(report.verdict, expected, "({eps1},{eps2})");
            assert_eq!(report.effective, eps1 * eps2);
            assert!(
                report.max_abs_deviation < 1e-10,
                "({eps1},{eps2}): {}",
                report.max_abs_deviation
            );
        }
    }

    #[test]
    fn swapped_flags_give_identical_fast_distributions() {
        let internal = InternalStateSet::orthonormal(2);
        let u = haar_random_unitary(3, 23);
        let n = occ(&[0, 1, 1]);
        let sa = run_duality_check(SymmetryFlag::S, SymmetryFlag::A, &n, &internal, &u).unwrap();
        let as_ = run_duality_check(SymmetryFlag::A, SymmetryFlag::S, &n, &internal, &u).unwrap();
        assert_eq!(sa.verdict, as_.verdict);
        assert!(sa.fast.max_abs_deviation(&as_.fast) < 1e-15);
        assert!(sa.max_abs_deviation < 1e-10 && as_.max_abs_deviation < 1e-10);
    }

    #[test]
    fn antisymmetric_pair_accepts_bunched_input() {
        // (A, A) has effective flag S, so two particles may share a mode as
        // long as their internal states stay linearly independent. The
        // counting statistics come out bosonic.
        let internal = InternalStateSet::orthonormal(2);
        let u = haar_random_unitary(2, 31);
        let n = occ(&[2, 0]);
        let report =
            run_duality_check(SymmetryFlag::A, SymmetryFlag::A, &n, &internal, &u).unwrap();
        assert_eq!(report.verdict, Statistics::Bosonic);
        assert!(report.max_abs_deviation < 1e-10);
    }

    #[test]
    fn report_serializes_with_both_distributions() {
        let internal = InternalStateSet::orthonormal(2);
        let u = haar_random_unitary(2, 3);
        let report = run_duality_check(
            SymmetryFlag::S,
            SymmetryFlag::S,
            &occ(&[1, 1]),
            &internal,
            &u,
        )
        .unwrap();
        let text = serde_json::to_string(&report).unwrap();
        assert!(text.contains("\"fast_distribution\""));
        assert!(text.contains("\"oracle_distribution\""));
        assert!(text.contains("\"verdict\":\"bosonic\""));
        let back: DualityReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back.effective, SymmetryFlag::S);
    }
}
