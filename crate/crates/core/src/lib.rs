//! Exact kernel cusp forms and coefficient matrices for twisted periods of
//! level-one modular forms.
//!
//! The crate computes, in exact cyclotomic arithmetic, the Fourier coefficients of
//! the traced Eisenstein products `F_{K,l,chi}` and traced Rankin-Cohen brackets
//! `G_{K,l,chi}`, builds the coefficient matrices used to certify linear
//! independence of twisted periods, evaluates the explicit error bounds, and runs
//! the verification tasks exposed by the `tperiods` command-line tool.

pub mod bernoulli;
pub mod bounds;
pub mod chars;
pub mod cycmat;
pub mod exact;
pub mod kernels;
pub mod qforms;
pub mod verify;

pub use chars::{CharFilter, DirichletCharacter, Parity};
pub use cycmat::CycMatrix;
pub use exact::{Cyclotomic, Rational};
pub use kernels::{KernelKind, KernelSpec};
pub use qforms::QSeries;
