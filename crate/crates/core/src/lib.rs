//! Exact computation with principal minors of matrices over fields with
//! an involution: multiaffine polynomial arithmetic, Rayleigh
//! differences, Hermitian square factorizations, reconstruction of
//! (Hermitian) determinantal representations, membership tests for the
//! image of the principal minor map, and an explicit family of
//! polynomials whose single-variable specializations are all
//! determinantal while the polynomial itself is not.

pub mod action;
pub mod counterexamples;
pub mod detrep;
pub mod error;
pub mod exactfield;
pub mod matrix;
pub mod mpoly;
pub mod par;
pub mod rayleigh;
pub mod squares;

pub use error::Error;
