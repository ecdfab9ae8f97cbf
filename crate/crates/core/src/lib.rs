//! Exact computations with K3-type rational Hodge structures, their
//! endomorphism fields and symmetric algebras, and k-symplectic structures.

pub mod exactmath;
pub mod hodge;
pub mod ksympl;
pub mod perdom;
pub mod qforms;
pub mod symalg;
