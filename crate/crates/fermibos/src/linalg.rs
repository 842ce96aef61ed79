//! Dense complex matrices and the kernels behind every statistics
//! computation in this crate: occupation submatrices, permanents,
//! determinants, and random unitary networks.
//!
//! All numerics are `f64`; matrices are stored row-major.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hard cap on the Ryser permanent kernel (`O(2^N N)` work).
pub const PERMANENT_CAP: usize = 20;
/// Hard cap on the permutation-sum reference kernel (`O(N! N)` work).
pub const NAIVE_PERMANENT_CAP: usize = 9;
/// Frobenius tolerance for the unitarity contract `||U^H U - I||_F`.
pub const UNITARY_TOLERANCE: f64 = 1e-12;

/// Dense complex matrix, row-major.
///
/// Serializes as `{"rows": R, "cols": C, "entries": [[re, im], ...]}` with
/// entries in row-major order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    entries: Vec<[f64; 2]>,
}

impl TryFrom<MatrixJson> for ComplexMatrix {
    type Error = Error;

    fn try_from(json: MatrixJson) -> Result<Self> {
        let entries = json
            .entries
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        ComplexMatrix::new(json.rows, json.cols, entries)
    }
}

impl From<ComplexMatrix> for MatrixJson {
    fn from(m: ComplexMatrix) -> Self {
        MatrixJson {
            rows: m.rows,
            cols: m.cols,
            entries: m.entries.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries; errors if the buffer length
    /// does not match `rows * cols`.
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::EntryCount {
                rows,
                cols,
                expected: rows * cols,
                found: entries.len(),
            });
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    /// Fills a matrix row by row from `f(row, col)`.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                entries.push(f(r, c));
            }
        }
        Self {
            rows,
            cols,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.cols + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.entries[row * self.cols + col] = value;
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r).conj())
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                context: "matrix product",
                expected: self.cols,
                found: rhs.rows,
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..rhs.cols {
                    let v = out.get(r, c) + a * rhs.get(k, c);
                    out.set(r, c, v);
                }
            }
        }
        Ok(out)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch {
                context: "matrix difference",
                expected: self.rows * self.cols,
                found: rhs.rows * rhs.cols,
            });
        }
        let entries = self
            .entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch {
                context: "matrix sum",
                expected: self.rows * self.cols,
                found: rhs.rows * rhs.cols,
            });
        }
        let entries = self
            .entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        self.entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `||U^H U - I||_F`; errors on non-square input.
    pub fn unitarity_deviation(&self) -> Result<f64> {
        if !self.is_square() {
            return Err(Error::NonSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let gram = self.dagger().matmul(self)?;
        gram.sub(&Self::identity(self.rows))
            .map(|d| d.frobenius_norm())
    }

    /// Enforces the unitarity contract at [`UNITARY_TOLERANCE`].
    pub fn require_unitary(&self) -> Result<()> {
        let deviation = self.unitarity_deviation()?;
        if deviation < UNITARY_TOLERANCE {
            Ok(())
        } else {
            Err(Error::NotUnitary {
                deviation,
                tolerance: UNITARY_TOLERANCE,
            })
        }
    }
}

/// Builds the occupation submatrix `U[n|m]`: row `k` of `U` is taken
/// `input[k]` times and column `l` is taken `output[l]` times, both in
/// ascending index order, yielding an `N x N` matrix for `N` particles.
pub fn build_submatrix(
    u: &ComplexMatrix,
    input: &[usize],
    output: &[usize],
) -> Result<ComplexMatrix> {
    if !u.is_square() {
        return Err(Error::NonSquare {
            rows: u.rows(),
            cols: u.cols(),
        });
    }
    if input.len() != u.rows() {
        return Err(Error::DimensionMismatch {
            context: "input occupations",
            expected: u.rows(),
            found: input.len(),
        });
    }
    if output.len() != u.cols() {
        return Err(Error::DimensionMismatch {
            context: "output occupations",
            expected: u.cols(),
            found: output.len(),
        });
    }
    let n_in: usize = input.iter().sum();
    let n_out: usize = output.iter().sum();
    if n_in != n_out {
        return Err(Error::ParticleNumber {
            input: n_in,
            output: n_out,
        });
    }
    if n_in == 0 {
        return Err(Error::EmptySubmatrix);
    }
    let expand = |counts: &[usize]| -> Vec<usize> {
        let mut idx = Vec::with_capacity(n_in);
        for (i, &c) in counts.iter().enumerate() {
            idx.extend(std::iter::repeat_n(i, c));
        }
        idx
    };
    let row_idx = expand(input);
    let col_idx = expand(output);
    Ok(ComplexMatrix::from_fn(n_in, n_in, |r, c| {
        u.get(row_idx[r], col_idx[c])
    }))
}

/// Permanent via Ryser's formula with Gray-code subset updates,
/// `O(2^N N)`. Capped at [`PERMANENT_CAP`]; the empty matrix has
/// permanent 1 by convention.
pub fn permanent(a: &ComplexMatrix) -> Result<Complex64> {
    if !a.is_square() {
        return Err(Error::NonSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    if n == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    if n > PERMANENT_CAP {
        return Err(Error::PermanentCap {
            size: n,
            cap: PERMANENT_CAP,
        });
    }
    let mut row_sums = vec![Complex64::new(0.0, 0.0); n];
    let mut total = Complex64::new(0.0, 0.0);
    for k in 1u64..(1u64 << n) {
        // Gray code: exactly one column enters or leaves the subset per step.
        let bit = k.trailing_zeros() as usize;
        let gray = k ^ (k >> 1);
        if gray & (1 << bit) != 0 {
            for (r, s) in row_sums.iter_mut().enumerate() {
                *s += a.get(r, bit);
            }
        } else {
            for (r, s) in row_sums.iter_mut().enumerate() {
                *s -= a.get(r, bit);
            }
        }
        let product: Complex64 = row_sums.iter().product();
        if gray.count_ones() % 2 == 0 {
            total += product;
        } else {
            total -= product;
        }
    }
    if n.is_multiple_of(2) {
        Ok(total)
    } else {
        Ok(-total)
    }
}

/// Visits every permutation of `0..n` along with its parity
/// (`true` = odd), using Heap's algorithm; no allocation per step.
pub fn for_each_permutation(n: usize, mut visit: impl FnMut(&[usize], bool)) {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut stack = vec![0usize; n];
    let mut odd = false;
    visit(&perm, odd);
    let mut i = 1;
    while i < n {
        if stack[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(stack[i], i);
            }
            odd = !odd;
            visit(&perm, odd);
            stack[i] += 1;
            i = 1;
        } else {
            stack[i] = 0;
            i += 1;
        }
    }
}

/// Parity of a permutation given as image array (`true` = odd), by cycle
/// decomposition.
pub fn permutation_parity(perm: &[usize]) -> bool {
    let mut seen = vec![false; perm.len()];
    let mut odd = false;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut at = start;
        while !seen[at] {
            seen[at] = true;
            at = perm[at];
            len += 1;
        }
        if len % 2 == 0 {
            odd = !odd;
        }
    }
    odd
}

/// Reference permanent as a direct sum over all `N!` permutations,
/// `O(N! N)`. Capped at [`NAIVE_PERMANENT_CAP`]; used to validate the
/// Ryser kernel.
pub fn permanent_naive(a: &ComplexMatrix) -> Result<Complex64> {
    if !a.is_square() {
        return Err(Error::NonSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    if n == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    if n > NAIVE_PERMANENT_CAP {
        return Err(Error::NaiveCap {
            size: n,
            cap: NAIVE_PERMANENT_CAP,
        });
    }
    let mut total = Complex64::new(0.0, 0.0);
    for_each_permutation(n, |perm, _| {
        let mut product = Complex64::new(1.0, 0.0);
        for (r, &c) in perm.iter().enumerate() {
            product *= a.get(r, c);
        }
        total += product;
    });
    Ok(total)
}

/// Determinant via LU decomposition with partial pivoting, `O(N^3)`.
/// The empty matrix has determinant 1 by convention.
pub fn determinant(a: &ComplexMatrix) -> Result<Complex64> {
    if !a.is_square() {
        return Err(Error::NonSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    if n == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let mut m = a.entries().to_vec();
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r1, &r2| {
                m[r1 * n + col]
                    .norm()
                    .partial_cmp(&m[r2 * n + col].norm())
                    .expect("finite entries")
            })
            .expect("non-empty range");
        let pivot = m[pivot_row * n + col];
        if pivot.norm() == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        if pivot_row != col {
            for c in 0..n {
                m.swap(col * n + c, pivot_row * n + c);
            }
            det = -det;
        }
        det *= pivot;
        for r in (col + 1)..n {
            let factor = m[r * n + col] / pivot;
            if factor.norm() == 0.0 {
                continue;
            }
            for c in col..n {
                let sub = factor * m[col * n + c];
                m[r * n + c] -= sub;
            }
        }
    }
    Ok(det)
}

/// Haar-random unitary: complex Ginibre matrix orthonormalized by
/// two-pass modified Gram-Schmidt, which matches QR with the diagonal of
/// `R` normalized to positive reals. Deterministic for a given seed.
pub fn haar_random_unitary(dim: usize, seed: u64) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = 1.0 / 2.0_f64.sqrt();
    let mut g = ComplexMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * scale, im * scale)
    });
    for j in 0..dim {
        let mut v: Vec<Complex64> = (0..dim).map(|r| g.get(r, j)).collect();
        // Second pass restores orthogonality lost to cancellation.
        for _ in 0..2 {
            for i in 0..j {
                let mut proj = Complex64::new(0.0, 0.0);
                for (r, vr) in v.iter().enumerate() {
                    proj += g.get(r, i).conj() * vr;
                }
                for (r, vr) in v.iter_mut().enumerate() {
                    *vr -= proj * g.get(r, i);
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        debug_assert!(norm > 1e-12, "Ginibre column collapsed");
        for (r, vr) in v.iter().enumerate() {
            g.set(r, j, vr / norm);
        }
    }
    g
}

/// Discrete-Fourier-transform network `V_kl = exp(2 pi i k l / dim) / sqrt(dim)`
/// (zero-based indices). Every first-row entry has modulus `1/sqrt(dim)`;
/// `dim = 2` gives the balanced beam splitter.
pub fn fourier_row_network(dim: usize) -> ComplexMatrix {
    let norm = 1.0 / (dim as f64).sqrt();
    ComplexMatrix::from_fn(dim, dim, |k, l| {
        let phase = 2.0 * std::f64::consts::PI * (k as f64) * (l as f64) / (dim as f64);
        Complex64::from_polar(norm, phase)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn balanced_splitter() -> ComplexMatrix {
        let s = 1.0 / 2.0_f64.sqrt();
        ComplexMatrix::new(2, 2, vec![c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)]).unwrap()
    }

    fn determinant_naive(a: &ComplexMatrix) -> Complex64 {
        let n = a.rows();
        let mut total = c(0.0, 0.0);
        for_each_permutation(n, |perm, odd| {
            let mut product = if odd { c(-1.0, 0.0) } else { c(1.0, 0.0) };
            for (r, &col) in perm.iter().enumerate() {
                product *= a.get(r, col);
            }
            total += product;
        });
        total
    }

    fn random_matrix(n: usize, seed: u64) -> ComplexMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ComplexMatrix::from_fn(n, n, |_, _| {
            c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        })
    }

    #[test]
    fn new_rejects_bad_entry_count() {
        let err = ComplexMatrix::new(2, 2, vec![c(1.0, 0.0)]).unwrap_err();
        assert!(matches!(
            err,
            Error::EntryCount {
                expected: 4,
                found: 1,
                ..
            }
        ));
    }

    #[test]
    fn json_round_trip_preserves_entries() {
        let m = random_matrix(3, 11);
        let text = serde_json::to_string(&m).unwrap();
        assert!(text.contains("\"rows\":3"));
        assert!(text.contains("\"entries\":[["));
        let back: ComplexMatrix = serde_json::from_str(&text).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn json_rejects_mismatched_entry_count() {
        let text = r#"{"rows":2,"cols":2,"entries":[[1.0,0.0]]}"#;
        assert!(serde_json::from_str::<ComplexMatrix>(text).is_err());
    }

    #[test]
    fn submatrix_single_occupancy_returns_matrix_itself() {
        let u = random_matrix(3, 5);
        let sub = build_submatrix(&u, &[1, 1, 1], &[1, 1, 1]).unwrap();
        assert_eq!(sub, u);
    }

    #[test]
    fn submatrix_duplicates_rows_and_columns_in_ascending_order() {
        let u = random_matrix(3, 7);
        let sub = build_submatrix(&u, &[2, 1, 0], &[1, 1, 1]).unwrap();
        // Row 0 twice, then row 1; columns 0, 1, 2.
        for col in 0..3 {
            assert_eq!(sub.get(0, col), u.get(0, col));
            assert_eq!(sub.get(1, col), u.get(0, col));
            assert_eq!(sub.get(2, col), u.get(1, col));
        }
        let sub = build_submatrix(&u, &[1, 1, 1], &[0, 2, 1]).unwrap();
        // Column 1 twice, then column 2.
        for row in 0..3 {
            assert_eq!(sub.get(row, 0), u.get(row, 1));
            assert_eq!(sub.get(row, 1), u.get(row, 1));
            assert_eq!(sub.get(row, 2), u.get(row, 2));
        }
    }

    #[test]
    fn submatrix_rejects_mismatched_particle_numbers() {
        let u = ComplexMatrix::identity(2);
        let err = build_submatrix(&u, &[1, 1], &[1, 0]).unwrap_err();
        assert!(matches!(
            err,
            Error::ParticleNumber {
                input: 2,
                output: 1
            }
        ));
    }

    #[test]
    fn submatrix_rejects_empty_occupations() {
        let u = ComplexMatrix::identity(2);
        let err = build_submatrix(&u, &[0, 0], &[0, 0]).unwrap_err();
        assert!(matches!(err, Error::EmptySubmatrix));
    }

    #[test]
    fn permanent_of_all_ones_is_factorial() {
        for n in 1..=6 {
            let a = ComplexMatrix::from_fn(n, n, |_, _| c(1.0, 0.0));
            let expected: f64 = (1..=n).map(|k| k as f64).product();
            let p = permanent(&a).unwrap();
            assert!((p - c(expected, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn permanent_of_balanced_splitter_vanishes() {
        let p = permanent(&balanced_splitter()).unwrap();
        assert!(p.norm() < 1e-15);
    }

    #[test]
    fn permanent_matches_two_by_two_closed_form() {
        let a = ComplexMatrix::new(
            2,
            2,
            vec![c(1.0, 2.0), c(0.5, -1.0), c(-2.0, 0.25), c(3.0, 1.0)],
        )
        .unwrap();
        let expected = c(1.0, 2.0) * c(3.0, 1.0) + c(0.5, -1.0) * c(-2.0, 0.25);
        assert!((permanent(&a).unwrap() - expected).norm() < 1e-14);
    }

    #[test]
    fn permanent_agrees_with_permutation_sum() {
        for n in 1..=7 {
            for seed in 0..4 {
                let a = random_matrix(n, seed + 100 * n as u64);
                let fast = permanent(&a).unwrap();
                let slow = permanent_naive(&a).unwrap();
                assert!(
                    (fast - slow).norm() <= 1e-12 * slow.norm().max(1.0),
                    "n = {n}, seed = {seed}"
                );
            }
        }
    }

    #[test]
    fn permanent_respects_cap() {
        let a = ComplexMatrix::zeros(21, 21);
        assert!(matches!(
            permanent(&a).unwrap_err(),
            Error::PermanentCap { size: 21, cap: 20 }
        ));
        let a = ComplexMatrix::zeros(10, 10);
        assert!(matches!(
            permanent_naive(&a).unwrap_err(),
            Error::NaiveCap { size: 10, cap: 9 }
        ));
    }

    #[test]
    fn permanent_rejects_non_square() {
        let a = ComplexMatrix::zeros(2, 3);
        assert!(matches!(
            permanent(&a),
            Err(Error::NonSquare { rows: 2, cols: 3 })
        ));
    }

    #[test]
    fn empty_matrix_conventions() {
        let a = ComplexMatrix::zeros(0, 0);
        assert_eq!(permanent(&a).unwrap(), c(1.0, 0.0));
        assert_eq!(determinant(&a).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn determinant_of_balanced_splitter_is_minus_one() {
        let d = determinant(&balanced_splitter()).unwrap();
        assert!((d - c(-1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn determinant_agrees_with_signed_permutation_sum() {
        for n in 1..=6 {
            for seed in 0..4 {
                let a = random_matrix(n, seed + 17 * n as u64);
                let fast = determinant(&a).unwrap();
                let slow = determinant_naive(&a);
                assert!(
                    (fast - slow).norm() <= 1e-11 * slow.norm().max(1.0),
                    "n = {n}, seed = {seed}"
                );
            }
        }
    }

    #[test]
    fn determinant_of_singular_matrix_vanishes() {
        let a = ComplexMatrix::new(
            2,
            2,
            vec![c(1.0, 1.0), c(2.0, 2.0), c(2.0, 2.0), c(4.0, 4.0)],
        )
        .unwrap();
        assert!(determinant(&a).unwrap().norm() < 1e-14);
    }

    #[test]
    fn diagonal_permanent_equals_determinant_equals_product() {
        let d = [c(0.3, 0.1), c(-1.2, 0.4), c(2.0, -0.7), c(0.9, 0.0)];
        let a = ComplexMatrix::from_fn(4, 4, |r, col| if r == col { d[r] } else { c(0.0, 0.0) });
        let product: Complex64 = d.iter().product();
        assert!((permanent(&a).unwrap() - product).norm() < 1e-13);
        assert!((determinant(&a).unwrap() - product).norm() < 1e-13);
    }

    #[test]
    fn heap_enumeration_covers_all_permutations_with_parity() {
        let mut seen = std::collections::BTreeSet::new();
        for_each_permutation(4, |perm, odd| {
            assert_eq!(permutation_parity(perm), odd);
            seen.insert(perm.to_vec());
        });
        assert_eq!(seen.len(), 24);
    }

    #[test]
    fn haar_unitary_passes_unitarity_contract() {
        for dim in 1..=12 {
            let u = haar_random_unitary(dim, 42 + dim as u64);
            assert!(u.unitarity_deviation().unwrap() < 1e-12, "dim = {dim}");
        }
    }

    #[test]
    fn haar_unitary_has_unimodular_determinant() {
        for seed in 0..5 {
            let u = haar_random_unitary(6, seed);
            let d = determinant(&u).unwrap();
            assert!((d.norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn haar_unitary_is_deterministic_per_seed() {
        let a = haar_random_unitary(5, 7);
        let b = haar_random_unitary(5, 7);
        assert_eq!(a, b);
        let other = haar_random_unitary(5, 8);
        assert!(a.max_abs_diff(&other) > 1e-3);
    }

    #[test]
    fn one_dimensional_haar_is_a_phase() {
        let u = haar_random_unitary(1, 3);
        assert!((u.get(0, 0).norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn fourier_network_matches_balanced_splitter_at_dim_two() {
        let v = fourier_row_network(2);
        assert!(v.max_abs_diff(&balanced_splitter()) < 1e-15);
    }

    #[test]
    fn fourier_network_is_unitary_with_flat_rows() {
        for dim in 1..=8 {
            let v = fourier_row_network(dim);
            assert!(v.unitarity_deviation().unwrap() < 1e-12);
            let expected = 1.0 / (dim as f64).sqrt();
            for l in 0..dim {
                assert!((v.get(0, l).norm() - expected).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn unitarity_deviation_flags_non_unitary_matrix() {
        let a = ComplexMatrix::from_fn(3, 3, |r, c_| c((r + c_) as f64, 0.0));
        assert!(matches!(a.require_unitary(), Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn determinant_naive_matches_three_by_three_closed_form() {
        let a = random_matrix(3, 23);
        let expected = a.get(0, 0) * (a.get(1, 1) * a.get(2, 2) - a.get(1, 2) * a.get(2, 1))
            - a.get(0, 1) * (a.get(1, 0) * a.get(2, 2) - a.get(1, 2) * a.get(2, 0))
            + a.get(0, 2) * (a.get(1, 0) * a.get(2, 1) - a.get(1, 1) * a.get(2, 0));
        assert!((determinant_naive(&a) - expected).norm() < 1e-13);
        assert!((determinant(&a).unwrap() - expected).norm() < 1e-13);
    }
}
