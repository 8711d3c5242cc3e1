//! Characteristic quasi-polynomials and intersection lattices of integral
//! hyperplane arrangements reduced modulo `q`.
//!
//! An arrangement is given by an `m x n` integer matrix `C` whose columns
//! `c_j` define hyperplanes `H_{j,q} = { x in Z_q^m : x c_j = 0 }`. The size of
//! the complement `M(A_q)` is a quasi-polynomial in `q` whose constituents
//! depend only on `gcd(rho0, q)`; it is assembled from Smith normal forms of
//! the column submatrices.
//!
//! ```
//! use modarr::{char_quasi_poly, Arrangement, IntMatrix};
//!
//! let arr = Arrangement::new(IntMatrix::from_rows(&[[1, 1, -2], [-1, 1, 1]])).unwrap();
//! let qp = char_quasi_poly(&arr).unwrap();
//! assert_eq!(qp.period(), 6);
//! assert_eq!(qp.evaluate(5).unwrap(), 12.into());
//! ```

pub mod arrangement;
mod bigint_serde;
pub mod chi;
pub mod error;
pub mod io;
pub mod lattice;
pub mod matrix;
pub mod minors;
pub mod numtheory;
pub mod oracle;
pub mod poly;
pub mod quasi;
pub mod report;
pub mod snf;
pub mod subset;
pub mod verify;

pub use arrangement::{Arrangement, Limits};
pub use chi::{characteristic_polynomial, chi_cross_check, ChiCrossCheck};
pub use error::{Error, Result};
pub use lattice::{
    build_lattice, closure, coarseness_check, hasse_dot, q0_bound, verify_periodicity, Flat,
    IntersectionLattice,
};
pub use matrix::IntMatrix;
pub use minors::nonzero_minors_lcm;
pub use poly::IntPoly;
pub use quasi::{char_quasi_poly, CharQuasiPolynomial, QuasiMonomial};
pub use snf::{
    elementary_divisors, in_column_space_mod_q, kernel_cardinality, smith_normal_form, SmithData,
};
pub use subset::ColumnSet;
