//! Operator-norm bounds for sums of rank-one projectors, and the
//! restricted-input bound on the conventional success probability.
//!
//! For unit vectors `phi_1..phi_m` and `L = sum_i |phi_i><phi_i|`,
//! `||L||` is bounded by `lim_n (1^T A^{n-1} 1)^{1/n}` where
//! `A_ij = |<phi_i|phi_j>|`. That limit is the Perron root of `A`. The truncated
//! sequence is kept as an independent witness.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{DensityOperator, Payoff};
use crate::linalg::{hermitian_eigenvalues, operator_norm, Basis, Ket, Operator, C64};
use crate::mub::{verify_mub, MubFamily};

/// Number of Gelfand terms used by [`lemma_bound`].
pub const GELFAND_TERMS: usize = 64;
/// Allowed slack when checking the Perron root against the power-iteration witness.
pub const WITNESS_SLACK: f64 = 1e-9;
/// Allowed slack on each certification link.
pub const CERT_SLACK: f64 = 1e-9;

/// Unit vectors of a common dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorSet {
    vectors: Vec<Ket>,
}

impl VectorSet {
    pub fn new(vectors: Vec<Ket>) -> Result<Self> {
        let first = vectors
            .first()
            .ok_or_else(|| Error::InvalidArgument("vector set must be non-empty".into()))?;
        let d = first.dim();
        if let Some(v) = vectors.iter().find(|v| v.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: v.dim(),
            });
        }
        Ok(VectorSet { vectors })
    }

    pub fn dim(&self) -> usize {
        self.vectors[0].dim()
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[Ket] {
        &self.vectors
    }

    /// `sum_i |phi_i><phi_i|`.
    pub fn projector_sum(&self) -> Operator {
        Operator::sum_of_projectors(&self.vectors).expect("non-empty, common dimension")
    }

    pub fn to_json(&self) -> VectorSetJson {
        VectorSetJson {
            d: self.dim(),
            vectors: self
                .vectors
                .iter()
                .map(|v| v.amplitudes().to_vec())
                .collect(),
        }
    }

    pub fn from_json(json: VectorSetJson) -> Result<Self> {
        let mut vectors = Vec::with_capacity(json.vectors.len());
        for (i, amps) in json.vectors.into_iter().enumerate() {
            if amps.len() != json.d {
                return Err(Error::DimensionMismatch {
                    expected: json.d,
                    got: amps.len(),
                }
                .context(format!("vector {i}")));
            }
            vectors.push(Ket::new(amps).map_err(|e| e.context(format!("vector {i}")))?);
        }
        VectorSet::new(vectors)
    }
}

/// Wire form `{"d": int, "vectors": [[[re, im], ...], ...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VectorSetJson {
    pub d: usize,
    pub vectors: Vec<Vec<C64>>,
}

/// `A_ij = |<phi_i|phi_j>|`, symmetric with unit diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct AbsGram {
    m: usize,
    entries: Vec<f64>,
}

impl AbsGram {
    pub fn size(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.m + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.entries
            .chunks(self.m)
            .map(|row| row.iter().zip(v).map(|(a, x)| a * x).sum())
            .collect()
    }

    /// Largest eigenvalue, which for a nonnegative symmetric matrix is the
    /// Perron root and the spectral radius.
    pub fn perron_root(&self) -> Result<f64> {
        let entries = self.entries.iter().map(|&a| C64::new(a, 0.0)).collect();
        let op = Operator::from_entries(self.m, entries)?;
        let eig = hermitian_eigenvalues(&op)?;
        Ok(*eig.last().expect("m >= 1"))
    }
}

pub fn abs_gram(vs: &VectorSet) -> AbsGram {
    let m = vs.len();
    let mut entries = vec![0.0; m * m];
    for i in 0..m {
        entries[i * m + i] = 1.0;
        for j in i + 1..m {
            let a = crate::linalg::inner_product(&vs.vectors[i], &vs.vectors[j])
                .expect("common dimension")
                .norm()
                .min(1.0);
            entries[i * m + j] = a;
            entries[j * m + i] = a;
        }
    }
    AbsGram { m, entries }
}

/// Power iterates of the absolute Gram matrix with the quantities derived from them.
#[derive(Clone, Debug, PartialEq)]
pub struct GelfandTrace {
    /// `b_n = (1^T A^{n-1} 1)^{1/n}` for `n = 2..=n_max`.
    pub terms: Vec<f64>,
    /// Rayleigh quotient of the last iterate; a lower bound on the Perron root.
    pub lower: f64,
    /// Collatz-Wielandt ratio `max_i (A v)_i / v_i` of the last iterate; an upper bound.
    pub upper: f64,
}

/// `b_n = (sum_{i_1..i_n} prod_k A_{i_k i_{k+1}})^{1/n} = (1^T A^{n-1} 1)^{1/n}`
/// for `n = 2..=n_max`.
pub fn gelfand_sequence(vs: &VectorSet, n_max: usize) -> Result<Vec<f64>> {
    Ok(gelfand_trace(&abs_gram(vs), n_max)?.terms)
}

/// Runs the power sequence `v_n = A^{n-1} 1` with log-scale normalization.
pub fn gelfand_trace(gram: &AbsGram, n_max: usize) -> Result<GelfandTrace> {
    if n_max < 2 {
        return Err(Error::InvalidArgument(format!("n_max = {n_max}, need at least 2")));
    }
    let m = gram.size();
    // v holds A^{n-1} 1 / exp(log_scale).
    let mut v = vec![1.0; m];
    let mut log_scale = 0.0f64;
    let mut terms = Vec::with_capacity(n_max - 1);
    let mut lower = 0.0;
    let mut upper = f64::INFINITY;
    for n in 2..=n_max {
        let next = gram.apply(&v);
        let is_last = n == n_max;
        if is_last {
            // v > 0 because A has unit diagonal and nonnegative entries.
            let vv: f64 = v.iter().map(|x| x * x).sum();
            let vav: f64 = v.iter().zip(&next).map(|(a, b)| a * b).sum();
            lower = vav / vv;
            upper = next
                .iter()
                .zip(&v)
                .map(|(a, b)| a / b)
                .fold(f64::NEG_INFINITY, f64::max);
        }
        let peak = next.iter().cloned().fold(0.0, f64::max);
        v = next.into_iter().map(|x| x / peak).collect();
        log_scale += peak.ln();
        let sum: f64 = v.iter().sum();
        terms.push(((sum.ln() + log_scale) / n as f64).exp());
    }
    Ok(GelfandTrace {
        terms,
        lower,
        upper,
    })
}

/// Evaluation of the projector-sum bound for one vector set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaEvaluation {
    pub perron_root: f64,
    pub n_terms: usize,
    /// `b_{n_terms}`.
    pub gelfand_tail: f64,
    /// `b_{n_terms} - perron_root`.
    pub gelfand_gap: f64,
    pub witness_lower: f64,
    pub witness_upper: f64,
}

/// Perron root of the absolute Gram matrix together with its Gelfand witness.
///
/// Fails with [`Error::GelfandMismatch`] if the eigensolver's root falls outside
/// the interval bracketed by the power iterates.
pub fn lemma_evaluation(vs: &VectorSet, n_terms: usize) -> Result<LemmaEvaluation> {
    let gram = abs_gram(vs);
    let root = gram.perron_root()?;
    let trace = gelfand_trace(&gram, n_terms)?;
    let slack = WITNESS_SLACK * root.max(1.0);
    if root < trace.lower - slack || root > trace.upper + slack {
        let residual = (trace.lower - root).max(root - trace.upper);
        return Err(Error::GelfandMismatch {
            root,
            lower: trace.lower,
            upper: trace.upper,
            residual,
        });
    }
    let tail = *trace.terms.last().expect("n_terms >= 2");
    Ok(LemmaEvaluation {
        perron_root: root,
        n_terms,
        gelfand_tail: tail,
        gelfand_gap: tail - root,
        witness_lower: trace.lower,
        witness_upper: trace.upper,
    })
}

/// Upper bound on `||sum_i |phi_i><phi_i|||`: the Perron root of [`abs_gram`].
pub fn lemma_bound(vs: &VectorSet) -> Result<f64> {
    Ok(lemma_evaluation(vs, GELFAND_TERMS)?.perron_root)
}

/// The bound on `P_d` for inputs drawn from the MUB family:
/// `(1 / (d + 1)) (1 + (sqrt(d) + d - 1) / sqrt(d))`.
pub fn theorem_bound(d: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::UnsupportedDimension(d));
    }
    let d = d as f64;
    let norm_bound = (d.sqrt() + d - 1.0) / d.sqrt();
    Ok((1.0 + norm_bound) / (d + 1.0))
}

/// `(sqrt(d) + d - 1) / sqrt(d)`, the projector-sum bound for one vector from
/// each of `d` mutually unbiased bases.
pub fn mub_norm_bound(d: usize) -> f64 {
    let d = d as f64;
    (d.sqrt() + d - 1.0) / d.sqrt()
}

/// One inequality of the certification chain, `lhs <= rhs`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Link {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

impl Link {
    fn new(name: &'static str, lhs: f64, rhs: f64) -> Self {
        Link {
            name,
            lhs,
            rhs,
            slack: rhs - lhs,
        }
    }
}

/// Numeric trace of the bound chain for one input vector and control basis.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certification {
    pub d: usize,
    /// Input state as `(j, mu)`, 1-based `j`.
    pub input: (usize, usize),
    pub probability: f64,
    /// `||L_k||` with `L_k = sum_{mu != mu0} |Psi^mu_{s(k,mu)}><Psi^mu_{s(k,mu)}|`.
    pub norms: Vec<f64>,
    /// Perron roots bounding each `||L_k||`.
    pub lemma_bounds: Vec<f64>,
    pub theorem_bound: f64,
    pub links: Vec<Link>,
    pub pass: bool,
}

impl Certification {
    pub fn min_slack(&self) -> f64 {
        self.links
            .iter()
            .map(|l| l.slack)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Certifies `P(rho, chi, s_max) <= theorem_bound(d)` for `rho = |Psi^mu0_j0><Psi^mu0_j0|`
/// (`input = (mu0, j0)`, 0-based `j0`) through the intermediate norm bounds.
pub fn certify_theorem(
    mubs: &MubFamily,
    chi: &Basis,
    input: (usize, usize),
) -> Result<Certification> {
    let d = mubs.dim();
    let (mu0, j0) = input;
    let psi = mubs.checked_vector(mu0, j0)?.clone();
    if chi.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: chi.dim(),
        });
    }
    let report = verify_mub(mubs, 1e-10);
    if !report.pass {
        return Err(Error::InvalidArgument(format!(
            "family is not mutually unbiased (deviation {:e})",
            report.max_deviation
        )));
    }

    let rho = DensityOperator::pure(psi);
    let payoff = Payoff::new(&rho, chi, mubs)?;
    let s_max = payoff.argmax_table();
    let probability = payoff.evaluate(&s_max).total;

    let mut norms = Vec::with_capacity(d);
    let mut lemma_bounds = Vec::with_capacity(d);
    for k in 0..d {
        let selected: Vec<Ket> = (0..=d)
            .filter(|&mu| mu != mu0)
            .map(|mu| mubs.vector(mu, s_max.guess(k, mu)).clone())
            .collect();
        let vs = VectorSet::new(selected)?;
        norms.push(operator_norm(&vs.projector_sum())?);
        lemma_bounds.push(lemma_bound(&vs)?);
    }

    let scale = 1.0 / (d + 1) as f64;
    let inv_d = 1.0 / d as f64;
    let norm_chain = scale * (1.0 + inv_d * norms.iter().sum::<f64>());
    let lemma_chain = scale * (1.0 + inv_d * lemma_bounds.iter().sum::<f64>());
    let bound = theorem_bound(d)?;
    let closed = mub_norm_bound(d);

    let worst = |pairs: &mut dyn Iterator<Item = (f64, f64)>| {
        pairs
            .min_by(|a, b| (a.1 - a.0).total_cmp(&(b.1 - b.0)))
            .expect("d >= 2")
    };
    let (norm_lhs, norm_rhs) = worst(&mut norms.iter().cloned().zip(lemma_bounds.iter().cloned()));
    let (lemma_lhs, _) = worst(&mut lemma_bounds.iter().map(|&b| (b, closed)));

    let links = vec![
        Link::new("probability <= norm chain", probability, norm_chain),
        Link::new("||L_k|| <= Perron root", norm_lhs, norm_rhs),
        Link::new("Perron root <= closed form", lemma_lhs, closed),
        Link::new("Perron chain <= theorem bound", lemma_chain, bound),
        Link::new("probability <= theorem bound", probability, bound),
    ];
    let pass = links.iter().all(|l| l.slack >= -CERT_SLACK);
    Ok(Certification {
        d,
        input: (j0 + 1, mu0),
        probability,
        norms,
        lemma_bounds,
        theorem_bound: bound,
        links,
        pass,
    })
}
