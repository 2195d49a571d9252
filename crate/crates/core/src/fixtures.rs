//! The two published counterexample strategies, where a non-MUB input state
//! beats the claimed bound `(2 sqrt(d) + d - 1) / (sqrt(d) (d + 1))`.

use std::f64::consts::{FRAC_PI_4, SQRT_2};

use crate::error::Result;
use crate::game::{optimal_report, DensityOperator, GameReport};
use crate::linalg::{Basis, Ket, C64};
use crate::mub::{mub_family, MubFamily};

/// Tolerance for orthonormality of the printed vectors.
pub const FIXTURE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct CounterexampleFixture {
    pub d: usize,
    pub phi: Ket,
    pub chi: Basis,
    /// Published success probability under the optimal decision.
    pub expected: f64,
    /// How closely `expected` pins the value (4 d.p. decimal vs. closed form).
    pub expected_tol: f64,
    /// Published `(j, mu)` pairs with `<Psi^mu_j|phi> = 0`, in the order printed.
    pub reported_zero_pairs: Vec<(usize, usize)>,
}

impl CounterexampleFixture {
    /// The MUB family the fixture is evaluated against.
    pub fn mubs(&self) -> MubFamily {
        mub_family(self.d).expect("fixture dimensions are supported")
    }

    pub fn rho(&self) -> DensityOperator {
        DensityOperator::pure(self.phi.clone())
    }

    /// `P_d(phi, chi, s_max)`.
    pub fn evaluate(&self) -> Result<GameReport> {
        optimal_report(&self.rho(), &self.chi, &self.mubs())
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn ket(amps: Vec<C64>) -> Ket {
    Ket::new(amps).expect("printed fixture vectors are unit norm")
}

/// `d = 3`: `phi = (0, i/sqrt2, (3 + sqrt3 i)/(2 sqrt6))`, published value `~0.8212`.
///
/// Under the Gauss-sum family the computed value is `(21 + 2 sqrt2 + sqrt6)/32`.
pub fn counterexample_d3() -> CounterexampleFixture {
    let s2 = SQRT_2;
    let s3 = 3f64.sqrt();
    let s6 = 6f64.sqrt();
    let phi = ket(vec![c(0.0, 0.0), c(0.0, 1.0 / s2), c(3.0, s3) / (2.0 * s6)]);
    let e = |theta: f64| C64::from_polar(1.0, theta);
    let chi = Basis::with_tolerance(
        vec![
            ket(vec![
                c(1.0 / s2, 0.0),
                c(0.0, s3 / (2.0 * s2)),
                -e(3.0 * FRAC_PI_4) / (2.0 * s2),
            ]),
            ket(vec![
                c(0.0, 1.0 / s2),
                c(s3 / (2.0 * s2), 0.0),
                -e(FRAC_PI_4) / (2.0 * s2),
            ]),
            ket(vec![c(0.0, 0.0), e(-FRAC_PI_4) / 2.0, c(s3 / 2.0, 0.0)]),
        ],
        FIXTURE_TOL,
    )
    .expect("printed d = 3 basis is orthonormal");
    CounterexampleFixture {
        d: 3,
        phi,
        chi,
        expected: 0.8212,
        expected_tol: 5e-5,
        reported_zero_pairs: vec![(2, 1), (1, 2), (1, 3), (1, 4)],
    }
}

/// `d = 4`: `phi = (1, 0, -1, 0)/sqrt2` against the tabulated family, value
/// `(6493 + 1065 sqrt3)/10240`.
pub fn counterexample_d4() -> CounterexampleFixture {
    let s3 = 3f64.sqrt();
    let h = 1.0 / SQRT_2;
    let phi = ket(vec![c(h, 0.0), c(0.0, 0.0), c(-h, 0.0), c(0.0, 0.0)]);
    let chi = Basis::with_tolerance(
        vec![
            ket(vec![
                c(0.0, s3 / 2.0),
                c(9.0, 3.0 * s3) / 32.0,
                c(-s3, 1.0) / 32.0,
                c(3.0, -3.0 * s3) / 16.0,
            ]),
            ket(vec![
                c(s3, 1.0) / 4.0,
                c(-9.0 * s3, 9.0) / 32.0,
                c(0.0, -s3 / 16.0),
                c(3.0 * s3, 9.0) / 16.0,
            ]),
            ket(vec![
                c(0.0, 0.0),
                c(5.0, -5.0 * s3) / 16.0,
                c(-3.0 * s3, -9.0) / 16.0,
                c(3.0, s3) / 8.0,
            ]),
            ket(vec![
                c(0.0, 0.0),
                c(-3.0, s3) / 8.0,
                c(0.0, -0.75),
                c(-1.0, -s3) / 4.0,
            ]),
        ],
        FIXTURE_TOL,
    )
    .expect("printed d = 4 basis is orthonormal");
    CounterexampleFixture {
        d: 4,
        phi,
        chi,
        expected: (6493.0 + 1065.0 * s3) / 10240.0,
        expected_tol: 1e-9,
        reported_zero_pairs: vec![(2, 0), (4, 0), (1, 1), (2, 1), (2, 4), (3, 4)],
    }
}

/// Looks up a fixture by name (`d3` or `d4`).
pub fn by_name(name: &str) -> Option<CounterexampleFixture> {
    match name {
        "d3" => Some(counterexample_d3()),
        "d4" => Some(counterexample_d4()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{aravind_bound, zero_overlap_pairs, ZERO_OVERLAP_TOL};
    use crate::mub::d4_table;

    #[test]
    fn d3_third_vector() {
        let f = counterexample_d3();
        let v = f.chi.vector(2).amplitudes();
        let r = 0.5 * std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(v[0], c(0.0, 0.0));
        assert!((v[1] - c(r, -r)).norm() < 1e-15);
        assert!((v[2] - c(3f64.sqrt() / 2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn printed_bases_are_orthonormal() {
        for f in [counterexample_d3(), counterexample_d4()] {
            let (_, _, dev) = f.chi.worst_gram_entry().unwrap();
            assert!(dev < FIXTURE_TOL, "d = {}: {dev}", f.d);
            assert!((f.phi.norm() - 1.0).abs() < FIXTURE_TOL);
        }
    }

    #[test]
    fn d4_fourth_vector_norm_by_hand() {
        // 12/64 + 36/64 + 16/64 = 1
        let v = counterexample_d4().chi.vector(3).amplitudes().to_vec();
        let parts: Vec<f64> = v.iter().map(|a| a.norm_sqr() * 64.0).collect();
        assert!((parts[1] - 12.0).abs() < 1e-12);
        assert!((parts[2] - 36.0).abs() < 1e-12);
        assert!((parts[3] - 16.0).abs() < 1e-12);
    }

    #[test]
    fn d4_reproduces_closed_form() {
        let f = counterexample_d4();
        assert_eq!(f.mubs(), d4_table());
        let report = f.evaluate().unwrap();
        assert!((report.total - f.expected).abs() < 1e-9);
        assert!(report.total > aravind_bound(4).unwrap() + 0.02);
    }

    #[test]
    fn d3_matches_decimal_and_corrected_closed_form() {
        let f = counterexample_d3();
        let report = f.evaluate().unwrap();
        assert!((report.total - f.expected).abs() < f.expected_tol);
        let closed = (21.0 + 2.0 * SQRT_2 + 6f64.sqrt()) / 32.0;
        assert!((report.total - closed).abs() < 1e-12);
        assert!(report.total > aravind_bound(3).unwrap() + 0.02);
    }

    #[test]
    fn d4_zero_pairs_match_publication() {
        let f = counterexample_d4();
        let pairs = zero_overlap_pairs(&f.phi, &f.mubs(), ZERO_OVERLAP_TOL).unwrap();
        let mut reported = f.reported_zero_pairs.clone();
        reported.sort_by_key(|&(j, mu)| (mu, j));
        assert_eq!(pairs, reported);
    }

    #[test]
    fn d3_zero_pairs_match_publication_up_to_relabeling() {
        // The Gauss-sum family puts the zeros at (1,0), (2,1), (2,2), (2,3).
        // Shifting mu to 1-based labels and swapping the first two vectors of
        // every basis gives the published list.
        let f = counterexample_d3();
        let pairs = zero_overlap_pairs(&f.phi, &f.mubs(), ZERO_OVERLAP_TOL).unwrap();
        assert_eq!(pairs, vec![(1, 0), (2, 1), (2, 2), (2, 3)]);
        let swap = |j: usize| match j {
            1 => 2,
            2 => 1,
            other => other,
        };
        let mut relabeled: Vec<_> = pairs.iter().map(|&(j, mu)| (swap(j), mu + 1)).collect();
        let mut reported = f.reported_zero_pairs.clone();
        relabeled.sort();
        reported.sort();
        assert_eq!(relabeled, reported);
    }

    #[test]
    fn lookup() {
        assert_eq!(by_name("d3").unwrap().d, 3);
        assert_eq!(by_name("d4").unwrap().d, 4);
        assert!(by_name("d5").is_none());
    }
}
