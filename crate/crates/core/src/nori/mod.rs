//! Semisimple envelopes of finite matrix groups over `GF(ℓ)`.
//!
//! The envelope is presented through its Lie algebra: logarithms of the
//! order-`ℓ` elements span a nilpotent set whose bracket closure is the Lie
//! algebra of the group generated by the one-parameter subgroups
//! `t ↦ exp(t · log x)`. Type identification, weights and the torus are all
//! read off that algebra.

mod catalog;
mod envelope;
mod explog;
mod group;
mod invariants;
mod lie;
mod roots;
mod weights;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ff::{self, matrix, FfError, Field, Matrix, PrimeField};

pub use catalog::{cartan_matrix_of, identify_components, CatalogComponent};
pub use envelope::{
    analyze_group, assemble_envelope, quotient_check, Envelope, EnvelopeReport, QuotientCheck,
};
pub use explog::{trunc_exp, trunc_log};
pub use group::{
    bfs_enumerate, eval_word, order_ell_elements, EnumeratedGroup, ScanMode, UnipotentSet,
};
pub use invariants::{induced_action, invariant_subspace};
pub use lie::{lie_closure, LieSubalgebra};
pub use roots::{identify_type, FactorInfo, SemisimpleTypeData};
pub use weights::{joint_eigenspaces, weights_on_ambient, WeightData};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NoriError {
    #[error("nori: group enumeration exceeded the cap of {0} elements")]
    BfsCapExceeded(usize),
    #[error("nori: matrix is not unipotent")]
    NotUnipotent,
    #[error("nori: matrix is not nilpotent")]
    NotNilpotent,
    #[error("nori: ℓ = {ell} must exceed N = {n} for truncated exp/log")]
    SmallCharacteristic { ell: u64, n: usize },
    #[error("nori: algebra is not semisimple at this ℓ (degenerate Killing form)")]
    NotSemisimple,
    #[error("nori: no regular semisimple element found in {0} draws")]
    NoRegularElement(usize),
    #[error("nori: root decomposition failed: {0}")]
    RootSystem(String),
    #[error("nori: Cartan matrix does not match the catalog: {0}")]
    UnknownType(String),
    #[error("nori: weight {value} exceeds the bound {bound}; ℓ may be too small for a faithful lift")]
    WeightBound { value: i64, bound: i64 },
    #[error("nori: weights disagree between two Cartan draws")]
    LiftMismatch,
    #[error("nori: Cartan elements are not simultaneously diagonalizable over the splitting field")]
    NotDiagonalizable,
    #[error("nori: invariant computation exceeds the budget (dim U = {0})")]
    Budget(usize),
    #[error("nori: central element does not commute with the Lie algebra")]
    NonCommuting,
    #[error("nori: central element of order {order} is too small to lift weights bounded by {bound}")]
    CentralOrder { order: u128, bound: i64 },
    #[error("nori: ℓ = {ell} is below the working threshold {min}")]
    BelowEllMin { ell: u64, min: u64 },
    #[error("nori: invalid group: {0}")]
    InvalidGroup(String),
    #[error(transparent)]
    Field(#[from] FfError),
    #[error(transparent)]
    Formchar(#[from] crate::formchar::FormcharError),
    #[error(transparent)]
    LieRank(#[from] crate::lierank::LieRankError),
}

/// Configurable stand-ins for the non-effective constants.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Overrides `max(2N, 7)` when set.
    pub ell_min_override: Option<u64>,
    /// Overrides the default weight bound `N` when set.
    pub weight_bound_override: Option<i64>,
    pub field_cap: u128,
    pub bfs_cap: usize,
    pub cartan_draws: usize,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            ell_min_override: None,
            weight_bound_override: None,
            field_cap: ff::DEFAULT_FIELD_CAP,
            bfs_cap: 1_000_000,
            cartan_draws: 32,
        }
    }
}

impl Thresholds {
    pub fn ell_min(&self, n: usize) -> u64 {
        self.ell_min_override
            .unwrap_or_else(|| (2 * n as u64).max(7))
    }

    pub fn weight_bound(&self, n: usize) -> i64 {
        self.weight_bound_override.unwrap_or(n as i64)
    }
}

/// Finite subgroup of `GL_N(GF(ℓ))` given by generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GroupJson", into = "GroupJson")]
pub struct MatrixGroup {
    pub n: usize,
    pub ell: u64,
    pub generators: Vec<Matrix<u64>>,
    pub label: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct GroupJson {
    n: usize,
    ell: u64,
    generators: Vec<Vec<Vec<i64>>>,
    #[serde(default)]
    label: String,
}

impl TryFrom<GroupJson> for MatrixGroup {
    type Error = NoriError;

    fn try_from(j: GroupJson) -> Result<Self, NoriError> {
        MatrixGroup::from_integer_rows(j.n, j.ell, &j.generators, &j.label)
    }
}

impl From<MatrixGroup> for GroupJson {
    fn from(g: MatrixGroup) -> Self {
        GroupJson {
            n: g.n,
            ell: g.ell,
            generators: g
                .generators
                .iter()
                .map(|m| {
                    m.to_rows()
                        .into_iter()
                        .map(|r| r.into_iter().map(|x| x as i64).collect())
                        .collect()
                })
                .collect(),
            label: g.label,
        }
    }
}

impl MatrixGroup {
    pub fn new(n: usize, ell: u64, generators: Vec<Matrix<u64>>, label: &str) -> Result<Self, NoriError> {
        if !ff::is_prime(ell) || ell >= (1 << 32) {
            return Err(NoriError::Field(FfError::NotPrime(ell)));
        }
        let f = PrimeField::new(ell);
        for (i, g) in generators.iter().enumerate() {
            if g.rows() != n || g.cols() != n {
                return Err(NoriError::InvalidGroup(format!("generator {i} is not {n}x{n}")));
            }
            if g.data().iter().any(|x| *x >= ell) {
                return Err(NoriError::InvalidGroup(format!("generator {i} has unreduced entries")));
            }
            if f.is_zero(&matrix::determinant(&f, g)) {
                return Err(NoriError::InvalidGroup(format!("generator {i} is singular mod {ell}")));
            }
        }
        Ok(Self {
            n,
            ell,
            generators,
            label: label.to_string(),
        })
    }

    /// Reduce integer matrices mod `ℓ`.
    pub fn from_integer_rows(
        n: usize,
        ell: u64,
        gens: &[Vec<Vec<i64>>],
        label: &str,
    ) -> Result<Self, NoriError> {
        if !ff::is_prime(ell) || ell >= (1 << 32) {
            return Err(NoriError::Field(FfError::NotPrime(ell)));
        }
        let f = PrimeField::new(ell);
        let mut out = Vec::with_capacity(gens.len());
        for (i, g) in gens.iter().enumerate() {
            if g.len() != n || g.iter().any(|r| r.len() != n) {
                return Err(NoriError::InvalidGroup(format!("generator {i} is not {n}x{n}")));
            }
            out.push(Matrix::from_rows(
                g.iter()
                    .map(|r| r.iter().map(|x| f.reduce_i64(*x)).collect())
                    .collect(),
            ));
        }
        Self::new(n, ell, out, label)
    }

    pub fn field(&self) -> PrimeField {
        PrimeField::new(self.ell)
    }
}
