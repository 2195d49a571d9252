//! Independent oracles shared by the integration tests. Nothing here calls the
//! code paths it is used to check.
#![allow(dead_code)]

use mean_king::{Ket, Operator, C64};
use nalgebra::{Complex, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_vec(rng: &mut impl Rng, d: usize) -> Vec<C64> {
    (0..d)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

pub fn random_ket(rng: &mut impl Rng, d: usize) -> Ket {
    Ket::normalized(gaussian_vec(rng, d)).unwrap()
}

/// `G G^dagger / tr` for a complex Gaussian `G` of the given rank.
pub fn random_density_matrix(rng: &mut impl Rng, d: usize, rank: usize) -> Operator {
    let g: Vec<Vec<C64>> = (0..rank).map(|_| gaussian_vec(rng, d)).collect();
    let mut entries = vec![C64::new(0.0, 0.0); d * d];
    for col in &g {
        for i in 0..d {
            for j in 0..d {
                entries[i * d + j] += col[i] * col[j].conj();
            }
        }
    }
    let trace: f64 = (0..d).map(|i| entries[i * d + i].re).sum();
    entries.iter_mut().for_each(|e| *e /= trace);
    // Exact Hermitian symmetry.
    for i in 0..d {
        entries[i * d + i].im = 0.0;
        for j in i + 1..d {
            entries[j * d + i] = entries[i * d + j].conj();
        }
    }
    Operator::from_entries(d, entries).unwrap()
}

/// Largest eigenvalue from nalgebra's Hermitian eigensolver.
pub fn nalgebra_max_eigenvalue(op: &Operator) -> f64 {
    let d = op.dim();
    let m = DMatrix::from_fn(d, d, |i, j| {
        let z = op.get(i, j);
        Complex::new(z.re, z.im)
    });
    m.symmetric_eigenvalues()
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `sum_{i_1..i_n} prod_{k=1}^{n-1} |<phi_{i_k}|phi_{i_{k+1}}>|` by direct enumeration.
pub fn nested_sum(vectors: &[Ket], n: usize) -> f64 {
    let m = vectors.len();
    let modulus = |a: &Ket, b: &Ket| -> f64 {
        a.amplitudes()
            .iter()
            .zip(b.amplitudes())
            .map(|(x, y)| x.conj() * y)
            .sum::<C64>()
            .norm()
    };
    let mut idx = vec![0usize; n];
    let mut total = 0.0;
    loop {
        let mut prod = 1.0;
        for k in 0..n - 1 {
            prod *= modulus(&vectors[idx[k]], &vectors[idx[k + 1]]);
        }
        total += prod;
        let mut pos = n;
        loop {
            if pos == 0 {
                return total;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < m {
                break;
            }
            idx[pos] = 0;
        }
    }
}
