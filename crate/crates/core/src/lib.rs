//! Exact symbolic computation of holomorphic vector fields on complex flag
//! supermanifolds `F^{m|n}_{k|l}`.
//!
//! The crate builds the supermanifolds in coordinates (supermatrix charts with
//! exact transition maps over ℚ), realizes the natural `gl(m|n)` action by
//! fundamental vector fields, and determines the full Lie superalgebra of
//! global holomorphic vector fields — and of global functions — by exact
//! linear algebra on a degree-bounded ansatz.
//!
//! Everything is exact: coefficients are arbitrary-precision rationals and all
//! asserted identities hold on the nose, not up to rounding.

pub mod atlas;
pub mod fields;
pub mod lie;
pub mod linalg;
pub mod reference;
pub mod solver;
pub mod supermatrix;
pub mod superpoly;
pub mod weights;

mod error;

pub use error::Error;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;

pub(crate) mod rat {
    use num_bigint::BigInt;
    use num_rational::BigRational;

    pub fn int(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[cfg_attr(not(test), allow(dead_code))]
    pub fn frac(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }
}
