//! Strategy files: an input state, a control basis, the MUB family, and an
//! optional decision table.
//!
//! ```json
//! {"d": 2,
//!  "rho": {"pure": [[1.0, 0.0], [0.0, 0.0]]},
//!  "chi": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]],
//!  "mub": "builtin",
//!  "decision": [[1, 1, 1], [2, 1, 1]]}
//! ```
//!
//! `rho` may instead be `{"matrix": [[[re, im], ...], ...]}`; `mub` may be an
//! inline family `{"d": ..., "bases": ...}`. Decision rows are `k = 1..=d`,
//! columns `mu = 0..=d`, entries 1-based `j`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fixtures::CounterexampleFixture;
use crate::game::{optimal_report, success_probability, DecisionTable, DensityOperator, GameReport};
use crate::linalg::{Basis, Ket, Operator, C64};
use crate::mub::{mub_family, MubFamily, MubFamilyJson};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RhoJson {
    Pure(Vec<C64>),
    Matrix(Vec<Vec<C64>>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MubJson {
    Named(String),
    Inline(MubFamilyJson),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyJson {
    pub d: usize,
    pub rho: RhoJson,
    pub chi: Vec<Vec<C64>>,
    pub mub: MubJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decision: Option<Vec<Vec<usize>>>,
}

/// A validated strategy.
#[derive(Clone, Debug)]
pub struct Strategy {
    pub rho: DensityOperator,
    pub chi: Basis,
    pub mubs: MubFamily,
    pub decision: Option<DecisionTable>,
}

impl Strategy {
    pub fn from_json(json: StrategyJson) -> Result<Self> {
        let d = json.d;
        let check_len = |len: usize, what: &str| {
            if len == d {
                Ok(())
            } else {
                Err(Error::DimensionMismatch { expected: d, got: len }.context(what.to_string()))
            }
        };
        let rho = match json.rho {
            RhoJson::Pure(amps) => {
                check_len(amps.len(), "rho.pure")?;
                DensityOperator::pure(Ket::new(amps).map_err(|e| e.context("rho.pure"))?)
            }
            RhoJson::Matrix(rows) => {
                check_len(rows.len(), "rho.matrix")?;
                let op = Operator::from_rows(&rows).map_err(|e| e.context("rho.matrix"))?;
                DensityOperator::from_matrix(op).map_err(|e| e.context("rho.matrix"))?
            }
        };
        check_len(json.chi.len(), "chi")?;
        let mut vectors = Vec::with_capacity(d);
        for (k, amps) in json.chi.into_iter().enumerate() {
            let what = format!("chi[{}]", k + 1);
            check_len(amps.len(), &what)?;
            vectors.push(Ket::new(amps).map_err(|e| e.context(what))?);
        }
        let chi = Basis::new(vectors).map_err(|e| e.context("chi"))?;
        let mubs = match json.mub {
            MubJson::Named(name) if name == "builtin" => {
                mub_family(d).map_err(|e| e.context("mub"))?
            }
            MubJson::Named(name) => {
                return Err(Error::Malformed(format!("mub: unknown family {name:?}")))
            }
            MubJson::Inline(fam) => {
                check_len(fam.d, "mub.d")?;
                MubFamily::from_json(fam).map_err(|e| e.context("mub"))?
            }
        };
        let decision = json
            .decision
            .map(|rows| DecisionTable::from_one_based(d, &rows))
            .transpose()
            .map_err(|e| e.context("decision"))?;
        Ok(Strategy {
            rho,
            chi,
            mubs,
            decision,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        Strategy::from_json(serde_json::from_str(text)?)
    }

    /// Evaluates with the stored decision, or with the optimal one when
    /// `optimal` is set or none is stored.
    pub fn evaluate(&self, optimal: bool) -> Result<GameReport> {
        match (&self.decision, optimal) {
            (Some(s), false) => success_probability(&self.rho, &self.chi, s, &self.mubs),
            _ => optimal_report(&self.rho, &self.chi, &self.mubs),
        }
    }
}

impl CounterexampleFixture {
    /// Exports as a strategy file against the builtin family.
    pub fn to_strategy_json(&self) -> StrategyJson {
        StrategyJson {
            d: self.d,
            rho: RhoJson::Pure(self.phi.amplitudes().to_vec()),
            chi: self
                .chi
                .vectors()
                .iter()
                .map(|v| v.amplitudes().to_vec())
                .collect(),
            mub: MubJson::Named("builtin".into()),
            decision: None,
        }
    }
}
