//! Small dense complex linear algebra: kets, operators, a cyclic Jacobi
//! eigensolver for Hermitian matrices, and Haar-random orthonormal bases.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Norm tolerance for unit vectors.
pub const UNIT_TOL: f64 = 1e-10;
/// Tolerance on `A - A^dagger` for an operator flagged Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Default cap on Jacobi rotations.
pub const DEFAULT_ROTATION_CAP: usize = 10_000;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// A unit-norm vector of complex amplitudes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<C64>", into = "Vec<C64>")]
pub struct Ket {
    amps: Vec<C64>,
}

impl Ket {
    /// Wraps `amps`, requiring unit norm within [`UNIT_TOL`].
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::UnsupportedDimension(0));
        }
        let norm = l2_norm(&amps);
        if (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Ket { amps })
    }

    /// Rescales `amps` to unit norm.
    pub fn normalized(mut amps: Vec<C64>) -> Result<Self> {
        let norm = l2_norm(&amps);
        if amps.is_empty() || norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized { norm });
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        Ok(Ket { amps })
    }

    /// Computational basis vector `|index>` (0-based).
    pub fn basis_state(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::IndexOutOfRange {
                what: "basis state",
                index,
                bound: dim,
            });
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Ok(Ket { amps })
    }

    pub(crate) fn from_raw(amps: Vec<C64>) -> Self {
        Ket { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        l2_norm(&self.amps)
    }

    /// Multiplies every amplitude by `exp(i * theta)`.
    pub fn with_phase(&self, theta: f64) -> Ket {
        let phase = C64::from_polar(1.0, theta);
        Ket {
            amps: self.amps.iter().map(|a| a * phase).collect(),
        }
    }
}

impl TryFrom<Vec<C64>> for Ket {
    type Error = Error;

    fn try_from(amps: Vec<C64>) -> Result<Self> {
        Ket::new(amps)
    }
}

impl From<Ket> for Vec<C64> {
    fn from(ket: Ket) -> Self {
        ket.amps
    }
}

fn l2_norm(v: &[C64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// `<a|b>`, conjugate-linear in `a`.
pub fn inner_product(a: &Ket, b: &Ket) -> Result<C64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    Ok(dot(a.amplitudes(), b.amplitudes()))
}

pub(crate) fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// `|<a|b>|^2` for kets already known to share a dimension.
pub(crate) fn overlap_sq(a: &Ket, b: &Ket) -> f64 {
    dot(a.amplitudes(), b.amplitudes()).norm_sqr()
}

/// A square complex matrix, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    dim: usize,
    entries: Vec<C64>,
    hermitian: bool,
}

impl Operator {
    pub fn from_entries(dim: usize, entries: Vec<C64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::UnsupportedDimension(0));
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        Ok(Operator {
            dim,
            entries,
            hermitian: false,
        })
    }

    /// Builds from nested rows, checking they are square.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
            entries.extend_from_slice(row);
        }
        Operator::from_entries(dim, entries)
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![ZERO; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = ONE;
        }
        Operator {
            dim,
            entries,
            hermitian: true,
        }
    }

    /// `|v><v|`.
    pub fn projector(v: &Ket) -> Self {
        let d = v.dim();
        let a = v.amplitudes();
        let mut entries = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                entries.push(a[i] * a[j].conj());
            }
        }
        Operator {
            dim: d,
            entries,
            hermitian: true,
        }
    }

    /// `sum_i |v_i><v_i|`.
    pub fn sum_of_projectors(vectors: &[Ket]) -> Result<Self> {
        let first = vectors
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty vector list".into()))?;
        let d = first.dim();
        let mut entries = vec![ZERO; d * d];
        for v in vectors {
            if v.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: v.dim(),
                });
            }
            let a = v.amplitudes();
            for i in 0..d {
                for j in 0..d {
                    entries[i * d + j] += a[i] * a[j].conj();
                }
            }
        }
        Ok(Operator {
            dim: d,
            entries,
            hermitian: true,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries[row * self.dim + col]
    }

    pub fn rows(&self) -> Vec<Vec<C64>> {
        self.entries.chunks(self.dim).map(<[C64]>::to_vec).collect()
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    /// `max |A_ij - conj(A_ji)|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let dev = (self.get(i, j) - self.get(j, i).conj()).norm();
                worst = worst.max(dev);
            }
        }
        worst
    }

    /// Sets the Hermitian flag after checking it within [`HERMITIAN_TOL`].
    pub fn into_hermitian(mut self) -> Result<Self> {
        let deviation = self.hermitian_deviation();
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        self.hermitian = true;
        Ok(self)
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        self.entries
            .chunks(self.dim)
            .map(|row| row.iter().zip(v).map(|(a, x)| a * x).sum())
            .collect()
    }

    /// `<v|A|v>`.
    pub fn expectation(&self, v: &Ket) -> C64 {
        dot(v.amplitudes(), &self.apply(v.amplitudes()))
    }

    /// `t * self + (1 - t) * other`.
    pub fn mix(&self, other: &Operator, t: f64) -> Result<Operator> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a * t + b * (1.0 - t))
            .collect();
        Ok(Operator {
            dim: self.dim,
            entries,
            hermitian: self.hermitian && other.hermitian,
        })
    }
}

/// Eigenvalues of a Hermitian operator in ascending order, via cyclic
/// complex Jacobi rotations.
pub fn hermitian_eigenvalues(op: &Operator) -> Result<Vec<f64>> {
    hermitian_eigenvalues_capped(op, DEFAULT_ROTATION_CAP)
}

pub fn hermitian_eigenvalues_capped(op: &Operator, max_rotations: usize) -> Result<Vec<f64>> {
    let deviation = op.hermitian_deviation();
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let n = op.dim();
    let mut a = op.entries().to_vec();
    // Symmetrize so tiny anti-Hermitian noise cannot stall the sweeps.
    for i in 0..n {
        a[i * n + i] = C64::new(a[i * n + i].re, 0.0);
        for j in i + 1..n {
            let avg = (a[i * n + j] + a[j * n + i].conj()) * 0.5;
            a[i * n + j] = avg;
            a[j * n + i] = avg.conj();
        }
    }

    let scale = a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let threshold = f64::EPSILON * scale.max(f64::MIN_POSITIVE);
    let mut rotations = 0usize;

    loop {
        let off = off_diagonal_norm(&a, n);
        if off <= threshold {
            break;
        }
        if rotations >= max_rotations {
            return Err(Error::NoConvergence {
                iterations: rotations,
                residual: off,
            });
        }
        for p in 0..n {
            for q in p + 1..n {
                let g = a[p * n + q];
                let g_abs = g.norm();
                if g_abs <= threshold * 1e-3 {
                    continue;
                }
                if rotations >= max_rotations {
                    break;
                }
                rotations += 1;
                jacobi_rotate(&mut a, n, p, q);
            }
        }
    }

    let mut eig: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}

fn off_diagonal_norm(a: &[C64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Zeroes `a[p][q]` with the unitary `J = D R`, where `D` removes the phase of
/// `a[p][q]` and `R` is the real symmetric Jacobi rotation.
fn jacobi_rotate(a: &mut [C64], n: usize, p: usize, q: usize) {
    let g = a[p * n + q];
    let g_abs = g.norm();
    let phase = g / g_abs;
    let app = a[p * n + p].re;
    let aqq = a[q * n + q].re;
    let theta = (aqq - app) / (2.0 * g_abs);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let j_pp = C64::new(c, 0.0);
    let j_pq = C64::new(s, 0.0);
    let j_qp = -phase.conj() * s;
    let j_qq = phase.conj() * c;

    // A <- A J
    for r in 0..n {
        let x = a[r * n + p];
        let y = a[r * n + q];
        a[r * n + p] = x * j_pp + y * j_qp;
        a[r * n + q] = x * j_pq + y * j_qq;
    }
    // A <- J^dagger A
    for col in 0..n {
        let x = a[p * n + col];
        let y = a[q * n + col];
        a[p * n + col] = j_pp.conj() * x + j_qp.conj() * y;
        a[q * n + col] = j_pq.conj() * x + j_qq.conj() * y;
    }
    a[p * n + q] = ZERO;
    a[q * n + p] = ZERO;
    a[p * n + p].im = 0.0;
    a[q * n + q].im = 0.0;
}

/// Largest eigenvalue of a Hermitian positive-semidefinite operator, which is
/// its operator norm.
pub fn operator_norm(op: &Operator) -> Result<f64> {
    operator_norm_capped(op, DEFAULT_ROTATION_CAP)
}

pub fn operator_norm_capped(op: &Operator, max_rotations: usize) -> Result<f64> {
    let eig = hermitian_eigenvalues_capped(op, max_rotations)?;
    let max = *eig.last().expect("dimension is positive");
    let min = eig[0];
    if min < -1e-10 * max.abs().max(1.0) {
        return Err(Error::NotPositive {
            min_eigenvalue: min,
        });
    }
    Ok(max)
}

/// An ordered orthonormal set of `d` kets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Ket>", into = "Vec<Ket>")]
pub struct Basis {
    vectors: Vec<Ket>,
}

impl Basis {
    /// Requires `d` vectors of dimension `d`, orthonormal within [`UNIT_TOL`].
    pub fn new(vectors: Vec<Ket>) -> Result<Self> {
        Basis::with_tolerance(vectors, UNIT_TOL)
    }

    pub fn with_tolerance(vectors: Vec<Ket>, tol: f64) -> Result<Self> {
        let d = vectors.len();
        if d == 0 {
            return Err(Error::UnsupportedDimension(0));
        }
        for v in &vectors {
            if v.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: v.dim(),
                });
            }
        }
        let basis = Basis { vectors };
        if let Some((i, j, deviation)) = basis.worst_gram_entry() {
            if deviation > tol {
                return Err(Error::NotOrthonormal { i, j, deviation });
            }
        }
        Ok(basis)
    }

    pub(crate) fn from_raw(vectors: Vec<Ket>) -> Self {
        Basis { vectors }
    }

    /// The computational basis.
    pub fn standard(dim: usize) -> Self {
        Basis {
            vectors: (0..dim)
                .map(|i| Ket::basis_state(dim, i).expect("index in range"))
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[Ket] {
        &self.vectors
    }

    pub fn vector(&self, k: usize) -> &Ket {
        &self.vectors[k]
    }

    /// Largest `|<v_i|v_j> - delta_ij|` and where it occurs.
    pub fn worst_gram_entry(&self) -> Option<(usize, usize, f64)> {
        let mut worst: Option<(usize, usize, f64)> = None;
        for (i, a) in self.vectors.iter().enumerate() {
            for (j, b) in self.vectors.iter().enumerate().skip(i) {
                let target = if i == j { ONE } else { ZERO };
                let dev = (dot(a.amplitudes(), b.amplitudes()) - target).norm();
                if worst.is_none_or(|(_, _, w)| dev > w) {
                    worst = Some((i, j, dev));
                }
            }
        }
        worst
    }

    /// Reorders vectors so that position `k` holds the old vector `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Basis> {
        let d = self.dim();
        let mut seen = vec![false; d];
        if perm.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: perm.len(),
            });
        }
        for &p in perm {
            if p >= d || seen[p] {
                return Err(Error::InvalidArgument(format!("{perm:?} is not a permutation")));
            }
            seen[p] = true;
        }
        Ok(Basis {
            vectors: perm.iter().map(|&p| self.vectors[p].clone()).collect(),
        })
    }

    /// Multiplies vector `k` by `exp(i * phases[k])`.
    pub fn with_phases(&self, phases: &[f64]) -> Basis {
        Basis {
            vectors: self
                .vectors
                .iter()
                .zip(phases)
                .map(|(v, &t)| v.with_phase(t))
                .collect(),
        }
    }

    /// Applies a rotation in the plane of vectors `k` and `l`:
    /// `v_k' = cos(a) v_k + e^{i b} sin(a) v_l`, `v_l' = -e^{-i b} sin(a) v_k + cos(a) v_l`.
    pub fn rotated(&self, k: usize, l: usize, angle: f64, phase: f64) -> Basis {
        let (s, c) = angle.sin_cos();
        let e = C64::from_polar(1.0, phase);
        let mut vectors = self.vectors.clone();
        let vk = self.vectors[k].amplitudes();
        let vl = self.vectors[l].amplitudes();
        vectors[k] = Ket::from_raw(
            vk.iter()
                .zip(vl)
                .map(|(x, y)| x * c + e * s * y)
                .collect(),
        );
        vectors[l] = Ket::from_raw(
            vk.iter()
                .zip(vl)
                .map(|(x, y)| -e.conj() * s * x + y * c)
                .collect(),
        );
        Basis { vectors }
    }
}

impl Basis {
    /// Gram-Schmidt pass over the vectors in order.
    pub fn reorthonormalized(&self) -> Basis {
        let mut done: Vec<Vec<C64>> = Vec::with_capacity(self.dim());
        for v in &self.vectors {
            let mut col = v.amplitudes().to_vec();
            for q in &done {
                let proj = dot(q, &col);
                col.iter_mut().zip(q).for_each(|(c, qi)| *c -= proj * qi);
            }
            let norm = l2_norm(&col);
            col.iter_mut().for_each(|c| *c /= norm);
            done.push(col);
        }
        Basis {
            vectors: done.into_iter().map(Ket::from_raw).collect(),
        }
    }
}

impl TryFrom<Vec<Ket>> for Basis {
    type Error = Error;

    fn try_from(vectors: Vec<Ket>) -> Result<Self> {
        Basis::new(vectors)
    }
}

impl From<Basis> for Vec<Ket> {
    fn from(b: Basis) -> Self {
        b.vectors
    }
}

/// Haar-distributed orthonormal basis of `C^d`, deterministic in `seed`.
///
/// Draws a complex Ginibre matrix and orthonormalizes its columns with
/// Gram-Schmidt. Gram-Schmidt yields a triangular factor with positive real
/// diagonal, which is the phase convention that makes the unitary factor
/// Haar distributed.
pub fn haar_random_basis(d: usize, seed: u64) -> Result<Basis> {
    if d < 2 {
        return Err(Error::UnsupportedDimension(d));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let mut columns: Vec<Vec<C64>> = (0..d)
        .map(|_| {
            (0..d)
                .map(|_| {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    C64::new(re * scale, im * scale)
                })
                .collect()
        })
        .collect();

    for j in 0..d {
        let (done, rest) = columns.split_at_mut(j);
        let col = &mut rest[0];
        // Two passes of modified Gram-Schmidt keep orthogonality near machine precision.
        for _ in 0..2 {
            for q in done.iter() {
                let proj = dot(q, col);
                col.iter_mut().zip(q).for_each(|(c, qi)| *c -= proj * qi);
            }
        }
        let norm = l2_norm(col);
        col.iter_mut().for_each(|c| *c /= norm);
    }

    Ok(Basis {
        vectors: columns.into_iter().map(Ket::from_raw).collect(),
    })
}
