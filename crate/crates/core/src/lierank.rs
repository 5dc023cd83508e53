//! Composition factors of finite groups of Lie type in characteristic
//! `ℓ ≥ 5` and the `𝔤`-type / total `ℓ`-ranks built from them.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LieRankError {
    #[error("lierank: invalid simple type {0}")]
    InvalidType(String),
    #[error("lierank: twist {twist} is not allowed for type {ty}")]
    InvalidTwist { ty: SimpleType, twist: u8 },
    #[error("lierank: characteristic {0} is below 5")]
    SmallCharacteristic(u64),
    #[error("lierank: f must be positive")]
    ZeroF,
    #[error("lierank: order formula not available for {0}")]
    Unsupported(SimpleType),
    #[error("lierank: order overflows 128 bits")]
    Overflow,
}

/// Simple Lie type with its rank. Constructors do not validate; use
/// [`SimpleType::validate`] or parse from a string.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum SimpleType {
    A(u32),
    B(u32),
    C(u32),
    D(u32),
    E(u32),
    F4,
    G2,
}

impl SimpleType {
    pub fn rank(&self) -> u32 {
        match *self {
            SimpleType::A(n) | SimpleType::B(n) | SimpleType::C(n) | SimpleType::D(n) | SimpleType::E(n) => n,
            SimpleType::F4 => 4,
            SimpleType::G2 => 2,
        }
    }

    /// Series letter, e.g. `'A'`.
    pub fn series(&self) -> char {
        match self {
            SimpleType::A(_) => 'A',
            SimpleType::B(_) => 'B',
            SimpleType::C(_) => 'C',
            SimpleType::D(_) => 'D',
            SimpleType::E(_) => 'E',
            SimpleType::F4 => 'F',
            SimpleType::G2 => 'G',
        }
    }

    /// Rejects the low-rank coincidences (`B1`, `C1`, `C2`, `D2`, `D3`) so
    /// that each isomorphism class has exactly one name.
    pub fn validate(&self) -> Result<(), LieRankError> {
        let ok = match *self {
            SimpleType::A(n) => n >= 1,
            SimpleType::B(n) => n >= 2,
            SimpleType::C(n) => n >= 3,
            SimpleType::D(n) => n >= 4,
            SimpleType::E(n) => (6..=8).contains(&n),
            SimpleType::F4 | SimpleType::G2 => true,
        };
        if ok {
            Ok(())
        } else {
            Err(LieRankError::InvalidType(self.to_string()))
        }
    }

    /// Dimension of the Lie algebra.
    pub fn dimension(&self) -> u32 {
        match *self {
            SimpleType::A(n) => n * (n + 2),
            SimpleType::B(n) | SimpleType::C(n) => n * (2 * n + 1),
            SimpleType::D(n) => n * (2 * n - 1),
            SimpleType::E(6) => 78,
            SimpleType::E(7) => 133,
            SimpleType::E(_) => 248,
            SimpleType::F4 => 52,
            SimpleType::G2 => 14,
        }
    }

    /// Number of roots.
    pub fn root_count(&self) -> u32 {
        self.dimension() - self.rank()
    }
}

impl fmt::Display for SimpleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.series(), self.rank())
    }
}

impl FromStr for SimpleType {
    type Err = LieRankError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || LieRankError::InvalidType(s.to_string());
        let mut chars = s.chars();
        let series = chars.next().ok_or_else(bad)?;
        let n: u32 = chars.as_str().parse().map_err(|_| bad())?;
        let ty = match (series, n) {
            ('A', n) => SimpleType::A(n),
            ('B', n) => SimpleType::B(n),
            ('C', n) => SimpleType::C(n),
            ('D', n) => SimpleType::D(n),
            ('E', n) => SimpleType::E(n),
            ('F', 4) => SimpleType::F4,
            ('G', 2) => SimpleType::G2,
            _ => return Err(bad()),
        };
        ty.validate()?;
        Ok(ty)
    }
}

impl From<SimpleType> for String {
    fn from(t: SimpleType) -> String {
        t.to_string()
    }
}

impl TryFrom<String> for SimpleType {
    type Error = LieRankError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

/// A non-cyclic composition factor: the group of type `ty` (twisted by
/// `twist`) over `F_q`, `q = ℓ^f`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LieFactorDescriptor {
    #[serde(rename = "type")]
    pub ty: SimpleType,
    pub twist: u8,
    pub f: u32,
    pub ell: u64,
}

impl LieFactorDescriptor {
    pub fn new(ty: SimpleType, twist: u8, f: u32, ell: u64) -> Result<Self, LieRankError> {
        let d = Self { ty, twist, f, ell };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<(), LieRankError> {
        self.ty.validate()?;
        if self.ell < 5 {
            return Err(LieRankError::SmallCharacteristic(self.ell));
        }
        if self.f == 0 {
            return Err(LieRankError::ZeroF);
        }
        let ok = match self.twist {
            1 => true,
            2 => matches!(self.ty, SimpleType::A(n) if n >= 2)
                || matches!(self.ty, SimpleType::D(_) | SimpleType::E(6)),
            3 => self.ty == SimpleType::D(4),
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(LieRankError::InvalidTwist {
                ty: self.ty,
                twist: self.twist,
            })
        }
    }

    /// Name of the non-cyclic factor, e.g. `PSL2(7)`, `2A2(7^2)`.
    pub fn factor_name(&self) -> String {
        let exp = self.f * u32::from(self.twist);
        let field = if exp == 1 {
            self.ell.to_string()
        } else {
            format!("{}^{}", self.ell, exp)
        };
        match (self.ty, self.twist) {
            (SimpleType::A(1), 1) => format!("PSL2({field})"),
            (ty, 1) => format!("{ty}({field})"),
            (ty, t) => format!("{t}{ty}({field})"),
        }
    }

    /// `g`-type rank of this single factor.
    pub fn rank_for(&self, g: SimpleType) -> u64 {
        if self.ty == g {
            u64::from(self.f) * u64::from(g.rank())
        } else {
            0
        }
    }
}

/// Composition factors up to multiplicity of cyclic groups.
pub fn composition_factors(d: &LieFactorDescriptor) -> Result<Vec<String>, LieRankError> {
    d.validate()?;
    Ok(vec![d.factor_name(), "cyclic".to_string()])
}

pub fn g_type_rank(factors: &[LieFactorDescriptor], g: SimpleType) -> u64 {
    factors.iter().map(|d| d.rank_for(g)).sum()
}

/// Same rank through the adjoint formulation: an adjoint simple group over
/// `F_{ℓ^{f'}}` splitting into `m` copies of type `h` over the closure
/// contributes `f' · m · rank(h)`. A descriptor over `F_{ℓ^f}` is viewed
/// over `F_ℓ` by restriction of scalars, i.e. `f' = 1`, `m = f`.
pub fn g_type_rank_adjoint(factors: &[LieFactorDescriptor], g: SimpleType) -> u64 {
    factors
        .iter()
        .filter(|d| d.ty == g)
        .map(|d| adjoint_rank(1, d.f, g))
        .sum()
}

pub fn adjoint_rank(f_prime: u32, m: u32, h: SimpleType) -> u64 {
    u64::from(f_prime) * u64::from(m) * u64::from(h.rank())
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankReport {
    pub total_rank: u64,
    pub per_type: BTreeMap<SimpleType, u64>,
    /// Parity of `rk^{A4} / 4`.
    pub an_parity: u8,
}

impl RankReport {
    pub fn rank_of(&self, g: SimpleType) -> u64 {
        self.per_type.get(&g).copied().unwrap_or(0)
    }

    /// Number of `A_n` factors counted with multiplicity `f`, i.e.
    /// `rk^{A_n} / n`.
    pub fn an_count(&self, n: u32) -> u64 {
        self.rank_of(SimpleType::A(n)) / u64::from(n)
    }
}

pub fn total_rank(factors: &[LieFactorDescriptor]) -> RankReport {
    let mut per_type = BTreeMap::new();
    for d in factors {
        *per_type.entry(d.ty).or_insert(0) += d.rank_for(d.ty);
    }
    let total_rank = per_type.values().sum();
    let a4 = per_type.get(&SimpleType::A(4)).copied().unwrap_or(0);
    RankReport {
        total_rank,
        per_type,
        an_parity: ((a4 / 4) % 2) as u8,
    }
}

/// `f` times the sum of ranks of the simple factors over the closure.
pub fn closure_rank(f: u32, closure_types: &[SimpleType]) -> u64 {
    u64::from(f) * closure_types.iter().map(|t| u64::from(t.rank())).sum::<u64>()
}

fn checked_pow(q: u128, e: u32) -> Result<u128, LieRankError> {
    q.checked_pow(e).ok_or(LieRankError::Overflow)
}

/// `|G^sc(F_q)|` for the split simply connected group of classical type.
pub fn chevalley_order(ty: SimpleType, q: u128) -> Result<u128, LieRankError> {
    ty.validate()?;
    let mul = |a: u128, b: u128| a.checked_mul(b).ok_or(LieRankError::Overflow);
    let mut acc: u128;
    match ty {
        SimpleType::A(n) => {
            acc = checked_pow(q, n * (n + 1) / 2)?;
            for i in 2..=n + 1 {
                acc = mul(acc, checked_pow(q, i)? - 1)?;
            }
        }
        SimpleType::B(n) | SimpleType::C(n) => {
            acc = checked_pow(q, n * n)?;
            for i in 1..=n {
                acc = mul(acc, checked_pow(q, 2 * i)? - 1)?;
            }
        }
        SimpleType::D(n) => {
            acc = mul(checked_pow(q, n * (n - 1))?, checked_pow(q, n)? - 1)?;
            for i in 1..n {
                acc = mul(acc, checked_pow(q, 2 * i)? - 1)?;
            }
        }
        other => return Err(LieRankError::Unsupported(other)),
    }
    Ok(acc)
}
