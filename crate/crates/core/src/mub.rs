//! Complete families of `d + 1` mutually unbiased bases.
//!
//! Supported dimensions are the primes (quadratic Gauss-sum construction for
//! odd primes, Pauli eigenbases for `d = 2`) and `d = 4` (a fixed table of
//! unimodular vectors).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, Basis, Ket, C64, ONE};

/// `d + 1` bases of `C^d`, labelled `mu = 0..=d` by position.
///
/// Construction through [`mub_family`] or [`d4_table`] yields a certified
/// family. Families read from JSON are only shape-checked so that defects can
/// be reported by [`verify_mub`].
#[derive(Clone, Debug, PartialEq)]
pub struct MubFamily {
    dim: usize,
    bases: Vec<Basis>,
}

impl MubFamily {
    /// Checks only the shape: `d + 1` bases of `d` vectors of length `d`.
    pub fn from_bases(dim: usize, bases: Vec<Basis>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::UnsupportedDimension(dim));
        }
        if bases.len() != dim + 1 {
            return Err(Error::Malformed(format!(
                "expected {} bases for d = {dim}, got {}",
                dim + 1,
                bases.len()
            )));
        }
        for (mu, b) in bases.iter().enumerate() {
            if b.dim() != dim || b.vectors().iter().any(|v| v.dim() != dim) {
                return Err(Error::Malformed(format!(
                    "basis {mu} is not {dim} vectors of length {dim}"
                )));
            }
        }
        Ok(MubFamily { dim, bases })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bases(&self) -> &[Basis] {
        &self.bases
    }

    pub fn basis(&self, mu: usize) -> &Basis {
        &self.bases[mu]
    }

    /// `|Psi^mu_j>` with 0-based `j`.
    pub fn vector(&self, mu: usize, j: usize) -> &Ket {
        self.bases[mu].vector(j)
    }

    pub fn checked_vector(&self, mu: usize, j: usize) -> Result<&Ket> {
        if mu > self.dim {
            return Err(Error::IndexOutOfRange {
                what: "basis label mu",
                index: mu,
                bound: self.dim + 1,
            });
        }
        if j >= self.dim {
            return Err(Error::IndexOutOfRange {
                what: "outcome j",
                index: j,
                bound: self.dim,
            });
        }
        Ok(self.vector(mu, j))
    }

    /// Replaces one vector's amplitudes verbatim. Intended for defect
    /// injection in diagnostics.
    pub fn with_vector_replaced(&self, mu: usize, j: usize, amps: Vec<C64>) -> Result<MubFamily> {
        self.checked_vector(mu, j)?;
        if amps.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: amps.len(),
            });
        }
        let mut bases = self.bases.clone();
        let mut vectors: Vec<Ket> = bases[mu].vectors().to_vec();
        vectors[j] = Ket::from_raw(amps);
        bases[mu] = Basis::from_raw(vectors);
        Ok(MubFamily {
            dim: self.dim,
            bases,
        })
    }

    pub fn to_json(&self) -> MubFamilyJson {
        MubFamilyJson {
            d: self.dim,
            bases: self
                .bases
                .iter()
                .map(|b| {
                    b.vectors()
                        .iter()
                        .map(|v| v.amplitudes().to_vec())
                        .collect()
                })
                .collect(),
        }
    }

    pub fn from_json(json: MubFamilyJson) -> Result<Self> {
        let bases = json
            .bases
            .into_iter()
            .map(|b| Basis::from_raw(b.into_iter().map(Ket::from_raw).collect()))
            .collect();
        MubFamily::from_bases(json.d, bases)
    }
}

/// Wire form: `{"d": int, "bases": [[[[re, im], ...], ...], ...]}`, vectors
/// row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MubFamilyJson {
    pub d: usize,
    pub bases: Vec<Vec<Vec<C64>>>,
}

fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            return false;
        }
        p += 1;
    }
    true
}

/// Builds a complete MUB family for prime `d` or `d = 4`.
///
/// For odd prime `d`, basis 0 is the computational basis and basis
/// `mu in 1..=d` has components `<k|Psi^mu_j> = d^{-1/2} w^{mu k^2 + j k}` with
/// `w = exp(2 pi i / d)` and `j, k in 0..d`.
pub fn mub_family(d: usize) -> Result<MubFamily> {
    match d {
        2 => Ok(pauli_family()),
        4 => Ok(d4_table()),
        _ if d > 2 && is_prime(d) => Ok(gauss_sum_family(d)),
        _ => Err(Error::UnsupportedDimension(d)),
    }
}

fn pauli_family() -> MubFamily {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let i = C64::new(0.0, 1.0);
    let raw = |v: [C64; 2]| Ket::from_raw(v.iter().map(|a| a * h).collect());
    let bases = vec![
        Basis::standard(2),
        Basis::from_raw(vec![raw([ONE, ONE]), raw([ONE, -ONE])]),
        Basis::from_raw(vec![raw([ONE, i]), raw([ONE, -i])]),
    ];
    MubFamily { dim: 2, bases }
}

fn gauss_sum_family(d: usize) -> MubFamily {
    let norm = 1.0 / (d as f64).sqrt();
    let step = 2.0 * std::f64::consts::PI / d as f64;
    // Exponents are reduced mod d before exponentiating so equal phases are bit-identical.
    let root = |e: usize| C64::from_polar(norm, step * (e % d) as f64);
    let mut bases = vec![Basis::standard(d)];
    for mu in 1..=d {
        let vectors = (0..d)
            .map(|j| Ket::from_raw((0..d).map(|k| root(mu * k * k + j * k)).collect()))
            .collect();
        bases.push(Basis::from_raw(vectors));
    }
    MubFamily { dim: d, bases }
}

/// The fixed `d = 4` family: the computational basis followed by four bases of
/// unimodular vectors scaled by `1/2`, rows `mu = 0..=4`, columns `j = 1..=4`.
pub fn d4_table() -> MubFamily {
    const P: C64 = ONE;
    const N: C64 = C64::new(-1.0, 0.0);
    const I: C64 = C64::new(0.0, 1.0);
    const J: C64 = C64::new(0.0, -1.0);
    let rows: [[[C64; 4]; 4]; 4] = [
        [[P, P, P, P], [P, N, P, N], [P, P, N, N], [P, N, N, P]],
        [[P, I, I, N], [P, J, I, P], [P, I, J, P], [P, J, J, N]],
        [[P, N, I, I], [P, P, J, I], [P, P, I, J], [P, N, J, J]],
        [[P, I, N, I], [P, J, P, I], [P, I, P, J], [P, J, N, J]],
    ];
    let mut bases = vec![Basis::standard(4)];
    for row in rows {
        let vectors = row
            .iter()
            .map(|v| Ket::from_raw(v.iter().map(|a| a * 0.5).collect()))
            .collect();
        bases.push(Basis::from_raw(vectors));
    }
    MubFamily { dim: 4, bases }
}

/// Outcome of [`verify_mub`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MubReport {
    pub pass: bool,
    pub tolerance: f64,
    /// Largest `| |<Psi^mu_i|Psi^nu_j>|^2 - target |`.
    pub max_deviation: f64,
    /// `(mu, i, nu, j)` with 0-based `i, j` where `max_deviation` occurs.
    pub worst_pair: Option<(usize, usize, usize, usize)>,
}

/// Certifies `|<Psi^mu_i|Psi^nu_j>|^2 = delta_{mu nu} delta_ij + (1 - delta_{mu nu}) / d`
/// for every pair of vectors in the family.
pub fn verify_mub(family: &MubFamily, tol: f64) -> MubReport {
    let d = family.dim();
    let unbiased = 1.0 / d as f64;
    let mut max_deviation = 0.0f64;
    let mut worst_pair = None;
    for mu in 0..=d {
        for i in 0..d {
            let a = family.vector(mu, i).amplitudes();
            for nu in mu..=d {
                let start = if nu == mu { i } else { 0 };
                for j in start..d {
                    let b = family.vector(nu, j).amplitudes();
                    let target = match (mu == nu, i == j) {
                        (true, true) => 1.0,
                        (true, false) => 0.0,
                        (false, _) => unbiased,
                    };
                    let dev = (dot(a, b).norm_sqr() - target).abs();
                    // NaN amplitudes must fail, so compare with a negated >=.
                    if dev.is_nan() || dev > max_deviation {
                        max_deviation = if dev.is_nan() { f64::INFINITY } else { dev };
                        worst_pair = Some((mu, i, nu, j));
                    }
                }
            }
        }
    }
    MubReport {
        pass: max_deviation <= tol,
        tolerance: tol,
        max_deviation,
        worst_pair,
    }
}
