//! The conventional King's game: the physicist prepares `rho`, the king
//! measures in one of the `d + 1` bases of a MUB family (chosen uniformly),
//! the physicist measures in `chi`, learns `mu`, and guesses `j` from a
//! decision table `s(k, mu)`.
//!
//! Indices are 0-based in the API. JSON and display forms use 1-based `j`, `k`
//! and 0-based `mu`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigenvalues, overlap_sq, Basis, Ket, Operator, HERMITIAN_TOL, UNIT_TOL,
};
use crate::mub::MubFamily;

/// A density operator. Pure states keep their ket as a witness but are
/// evaluated through the matrix like any other state.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    matrix: Operator,
    pure: Option<Ket>,
}

impl DensityOperator {
    pub fn pure(state: Ket) -> Self {
        DensityOperator {
            matrix: Operator::projector(&state),
            pure: Some(state),
        }
    }

    /// Validates Hermiticity, positivity (eigenvalues >= -1e-10) and unit trace.
    pub fn from_matrix(matrix: Operator) -> Result<Self> {
        let deviation = matrix.hermitian_deviation();
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > UNIT_TOL || trace.im.abs() > UNIT_TOL {
            return Err(Error::BadTrace { trace: trace.re });
        }
        let min_eigenvalue = hermitian_eigenvalues(&matrix)?[0];
        if min_eigenvalue < -1e-10 {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        Ok(DensityOperator {
            matrix: matrix.into_hermitian()?,
            pure: None,
        })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let mut entries = Operator::identity(dim).entries().to_vec();
        entries.iter_mut().for_each(|e| *e /= dim as f64);
        let matrix = Operator::from_entries(dim, entries)
            .and_then(Operator::into_hermitian)
            .expect("scaled identity is Hermitian");
        DensityOperator { matrix, pure: None }
    }

    /// `t * a + (1 - t) * b` for `t` in `[0, 1]`.
    pub fn mixture(a: &DensityOperator, b: &DensityOperator, t: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidArgument(format!("mixing weight {t} not in [0, 1]")));
        }
        Ok(DensityOperator {
            matrix: a.matrix.mix(&b.matrix, t)?,
            pure: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &Operator {
        &self.matrix
    }

    pub fn pure_state(&self) -> Option<&Ket> {
        self.pure.as_ref()
    }

    /// `<v|rho|v>`.
    pub fn weight(&self, v: &Ket) -> f64 {
        self.matrix.expectation(v).re
    }
}

/// The decision function `s: (k, mu) -> j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DecisionTable {
    dim: usize,
    // 0-based guesses, index mu * dim + k.
    guesses: Vec<usize>,
}

impl DecisionTable {
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> usize) -> Result<Self> {
        let mut guesses = Vec::with_capacity(dim * (dim + 1));
        for mu in 0..=dim {
            for k in 0..dim {
                let j = f(k, mu);
                if j >= dim {
                    return Err(Error::InvalidDecision {
                        k: k + 1,
                        mu,
                        value: j + 1,
                        d: dim,
                    });
                }
                guesses.push(j);
            }
        }
        Ok(DecisionTable { dim, guesses })
    }

    /// Rows indexed by `k = 1..=d`, columns by `mu = 0..=d`, entries `j` in `1..=d`.
    pub fn from_one_based(dim: usize, rows: &[Vec<usize>]) -> Result<Self> {
        if rows.len() != dim {
            return Err(Error::Malformed(format!(
                "decision table has {} rows, expected {dim}",
                rows.len()
            )));
        }
        for (k, row) in rows.iter().enumerate() {
            if row.len() != dim + 1 {
                return Err(Error::Malformed(format!(
                    "decision row k = {} has {} entries, expected {}",
                    k + 1,
                    row.len(),
                    dim + 1
                )));
            }
            for (mu, &j) in row.iter().enumerate() {
                if j == 0 || j > dim {
                    return Err(Error::InvalidDecision {
                        k: k + 1,
                        mu,
                        value: j,
                        d: dim,
                    });
                }
            }
        }
        DecisionTable::from_fn(dim, |k, mu| rows[k][mu] - 1)
    }

    pub fn to_one_based(&self) -> Vec<Vec<usize>> {
        (0..self.dim)
            .map(|k| (0..=self.dim).map(|mu| self.guess(k, mu) + 1).collect())
            .collect()
    }

    pub(crate) fn from_flat(dim: usize, guesses: Vec<usize>) -> Self {
        debug_assert_eq!(guesses.len(), dim * (dim + 1));
        DecisionTable { dim, guesses }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Guessed `j` (0-based) for outcome `k` and revealed basis `mu`.
    pub fn guess(&self, k: usize, mu: usize) -> usize {
        self.guesses[mu * self.dim + k]
    }

    /// Column `mu` as the map `k -> j`.
    pub fn column(&self, mu: usize) -> &[usize] {
        &self.guesses[mu * self.dim..(mu + 1) * self.dim]
    }

    /// The table matching a basis whose vector `k` is the old vector `perm[k]`.
    pub fn permute_outcomes(&self, perm: &[usize]) -> Result<DecisionTable> {
        if perm.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: perm.len(),
            });
        }
        DecisionTable::from_fn(self.dim, |k, mu| self.guess(perm[k], mu))
    }
}

/// Success probability of a strategy with its per-basis breakdown.
#[derive(Clone, Debug, PartialEq)]
pub struct GameReport {
    pub total: f64,
    /// Conditional success probability given the king used basis `mu`.
    pub per_mu: Vec<f64>,
    pub decision: DecisionTable,
}

#[derive(Serialize, Deserialize)]
pub struct GameReportJson {
    pub d: usize,
    pub total: f64,
    pub per_mu: Vec<f64>,
    /// Rows `k = 1..=d`, columns `mu = 0..=d`, 1-based `j`.
    pub decision: Vec<Vec<usize>>,
}

impl GameReport {
    pub fn to_json(&self) -> GameReportJson {
        GameReportJson {
            d: self.decision.dim(),
            total: self.total,
            per_mu: self.per_mu.clone(),
            decision: self.decision.to_one_based(),
        }
    }
}

/// `w[mu][k][j] = <Psi^mu_j|rho|Psi^mu_j> |<Psi^mu_j|chi_k>|^2`.
pub(crate) struct Payoff {
    pub dim: usize,
    values: Vec<f64>,
    overlaps: Vec<f64>,
}

impl Payoff {
    pub fn new(rho: &DensityOperator, chi: &Basis, mubs: &MubFamily) -> Result<Self> {
        let d = mubs.dim();
        for got in [rho.dim(), chi.dim()] {
            if got != d {
                return Err(Error::DimensionMismatch { expected: d, got });
            }
        }
        let mut values = Vec::with_capacity((d + 1) * d * d);
        let mut overlaps = Vec::with_capacity((d + 1) * d * d);
        for mu in 0..=d {
            let prior: Vec<f64> = mubs.basis(mu).vectors().iter().map(|v| rho.weight(v)).collect();
            for k in 0..d {
                for (j, p) in prior.iter().enumerate() {
                    let ov = overlap_sq(mubs.vector(mu, j), chi.vector(k));
                    overlaps.push(ov);
                    values.push(p * ov);
                }
            }
        }
        Ok(Payoff {
            dim: d,
            values,
            overlaps,
        })
    }

    #[inline]
    pub fn get(&self, mu: usize, k: usize, j: usize) -> f64 {
        self.values[(mu * self.dim + k) * self.dim + j]
    }

    #[inline]
    fn overlap(&self, mu: usize, k: usize, j: usize) -> f64 {
        self.overlaps[(mu * self.dim + k) * self.dim + j]
    }

    pub fn evaluate(&self, s: &DecisionTable) -> GameReport {
        let d = self.dim;
        let per_mu: Vec<f64> = (0..=d)
            .map(|mu| (0..d).map(|k| self.get(mu, k, s.guess(k, mu))).sum())
            .collect();
        let total = per_mu.iter().sum::<f64>() / (d + 1) as f64;
        GameReport {
            total,
            per_mu,
            decision: s.clone(),
        }
    }

    pub fn argmax_table(&self) -> DecisionTable {
        let d = self.dim;
        let mut guesses = Vec::with_capacity(d * (d + 1));
        for mu in 0..=d {
            for k in 0..d {
                // Strict comparison keeps the smallest j among ties.
                let mut best = 0;
                for j in 1..d {
                    if self.get(mu, k, j) > self.get(mu, k, best) {
                        best = j;
                    }
                }
                guesses.push(best);
            }
        }
        DecisionTable::from_flat(d, guesses)
    }
}

/// `P(k | mu, j, chi) = |<Psi^mu_j|chi_k>|^2` (0-based `j`, `k`).
pub fn outcome_probability(
    mubs: &MubFamily,
    mu: usize,
    j: usize,
    chi: &Basis,
    k: usize,
) -> Result<f64> {
    let psi = mubs.checked_vector(mu, j)?;
    if chi.dim() != mubs.dim() {
        return Err(Error::DimensionMismatch {
            expected: mubs.dim(),
            got: chi.dim(),
        });
    }
    if k >= chi.dim() {
        return Err(Error::IndexOutOfRange {
            what: "outcome k",
            index: k,
            bound: chi.dim(),
        });
    }
    Ok(overlap_sq(psi, chi.vector(k)))
}

/// `P_d(rho, chi, s) = 1/(d+1) sum_mu sum_k <Psi^mu_s|rho|Psi^mu_s> |<Psi^mu_s|chi_k>|^2`
/// with `s = s(k, mu)`.
pub fn success_probability(
    rho: &DensityOperator,
    chi: &Basis,
    s: &DecisionTable,
    mubs: &MubFamily,
) -> Result<GameReport> {
    if s.dim() != mubs.dim() {
        return Err(Error::DimensionMismatch {
            expected: mubs.dim(),
            got: s.dim(),
        });
    }
    Ok(Payoff::new(rho, chi, mubs)?.evaluate(s))
}

/// The pointwise argmax decision `s_max(k, mu) = argmax_j <Psi^mu_j|rho|Psi^mu_j> |<Psi^mu_j|chi_k>|^2`,
/// ties resolved to the smallest `j`.
pub fn optimal_decision(
    rho: &DensityOperator,
    chi: &Basis,
    mubs: &MubFamily,
) -> Result<DecisionTable> {
    Ok(Payoff::new(rho, chi, mubs)?.argmax_table())
}

/// `success_probability` with `optimal_decision`.
pub fn optimal_report(rho: &DensityOperator, chi: &Basis, mubs: &MubFamily) -> Result<GameReport> {
    let payoff = Payoff::new(rho, chi, mubs)?;
    Ok(payoff.evaluate(&payoff.argmax_table()))
}

/// Result of exhaustive enumeration over decision tables.
#[derive(Clone, Debug, PartialEq)]
pub struct BruteForce {
    pub table: DecisionTable,
    pub value: f64,
    pub visited: u64,
}

/// Largest `d` for which [`brute_force_decision`] will enumerate.
pub const BRUTE_FORCE_MAX_DIM: usize = 3;

/// Enumerates every decision table and keeps the lexicographically smallest
/// maximizer (entries ordered by `mu`, then `k`).
pub fn brute_force_decision(
    rho: &DensityOperator,
    chi: &Basis,
    mubs: &MubFamily,
) -> Result<BruteForce> {
    let d = mubs.dim();
    let cells = d * (d + 1);
    if d > BRUTE_FORCE_MAX_DIM {
        return Err(Error::EnumerationTooLarge { d, exponent: cells });
    }
    let payoff = Payoff::new(rho, chi, mubs)?;
    // cell c = mu * d + k
    let cell_value = |c: usize, j: usize| payoff.get(c / d, c % d, j);

    let mut current = vec![0usize; cells];
    let mut best = current.clone();
    let mut best_value = f64::NEG_INFINITY;
    let mut visited = 0u64;
    loop {
        visited += 1;
        let value = current
            .iter()
            .enumerate()
            .map(|(c, &j)| cell_value(c, j))
            .sum::<f64>()
            / (d + 1) as f64;
        if value > best_value {
            best_value = value;
            best.copy_from_slice(&current);
        }
        // Odometer with the last cell fastest gives lexicographic order.
        let mut pos = cells;
        loop {
            if pos == 0 {
                return Ok(BruteForce {
                    table: DecisionTable::from_flat(d, best),
                    value: best_value,
                    visited,
                });
            }
            pos -= 1;
            current[pos] += 1;
            if current[pos] < d {
                break;
            }
            current[pos] = 0;
        }
    }
}

/// The assignment maps `f_mu(j) = argmax_k <Psi^mu_j|rho|Psi^mu_j> |<Psi^mu_j|chi_k>|^2`,
/// one vector `j -> k` per `mu`.
///
/// Ties go to the larger bare overlap `|<Psi^mu_j|chi_k>|^2`, then the smallest
/// `k`; this only matters when `<Psi^mu_j|rho|Psi^mu_j> = 0`.
pub fn assignment_maps(
    rho: &DensityOperator,
    chi: &Basis,
    mubs: &MubFamily,
) -> Result<Vec<Vec<usize>>> {
    let payoff = Payoff::new(rho, chi, mubs)?;
    let d = payoff.dim;
    let key = |mu: usize, k: usize, j: usize| (payoff.get(mu, k, j), payoff.overlap(mu, k, j));
    Ok((0..=d)
        .map(|mu| {
            (0..d)
                .map(|j| {
                    let mut best = 0;
                    for k in 1..d {
                        if key(mu, k, j) > key(mu, best, j) {
                            best = k;
                        }
                    }
                    best
                })
                .collect()
        })
        .collect())
}

/// The restricted rule `s(k, mu) = f_mu^{-1}(k)`, defined only when every
/// assignment map is a bijection. Otherwise reports each failing `mu`.
pub fn bijective_decision(
    rho: &DensityOperator,
    chi: &Basis,
    mubs: &MubFamily,
) -> Result<DecisionTable> {
    let maps = assignment_maps(rho, chi, mubs)?;
    let d = mubs.dim();
    let mut failing = Vec::new();
    let mut inverse = vec![0usize; d * (d + 1)];
    for (mu, f) in maps.iter().enumerate() {
        let mut hit = vec![false; d];
        for (j, &k) in f.iter().enumerate() {
            hit[k] = true;
            inverse[mu * d + k] = j;
        }
        if hit.iter().any(|h| !h) {
            failing.push(mu);
        }
    }
    if failing.is_empty() {
        Ok(DecisionTable::from_flat(d, inverse))
    } else {
        Err(Error::NotBijective { failing })
    }
}

/// `(2 sqrt(d) + d - 1) / (sqrt(d) (d + 1))`.
pub fn aravind_bound(d: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::UnsupportedDimension(d));
    }
    let d = d as f64;
    let r = d.sqrt();
    Ok((2.0 * r + d - 1.0) / (r * (d + 1.0)))
}

/// Default threshold for [`zero_overlap_pairs`].
pub const ZERO_OVERLAP_TOL: f64 = 1e-12;

/// Pairs `(j, mu)` (1-based `j`) with `|<Psi^mu_j|phi>|^2 < tol`, sorted by `(mu, j)`.
pub fn zero_overlap_pairs(phi: &Ket, mubs: &MubFamily, tol: f64) -> Result<Vec<(usize, usize)>> {
    let d = mubs.dim();
    if phi.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: phi.dim(),
        });
    }
    let mut pairs = Vec::new();
    for mu in 0..=d {
        for j in 0..d {
            if overlap_sq(mubs.vector(mu, j), phi) < tol {
                pairs.push((j + 1, mu));
            }
        }
    }
    Ok(pairs)
}
