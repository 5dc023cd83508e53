pub mod ff;
pub mod formchar;
pub mod inertia;
pub mod lierank;
pub mod nori;
pub mod sysharness;

pub type FpMatrix = ff::Matrix<u64>;
pub type ExtMatrix = ff::Matrix<ff::ExtElem>;
pub type Rationals = ff::NumField<num_rational::Rational64>;
