//! Exact arithmetic: rationals, polynomials, number fields with certified
//! embeddings, and linear algebra over any [`Field`].

pub mod embed;
pub mod factor;
pub mod field;
pub mod interval;
pub mod linalg;
pub mod mpoly;
pub mod numfield;
pub mod poly;
pub mod rational;

pub use embed::{certified_sign, ComplexEmbedding, PairExpr, Sign, SignError, SignTarget};
pub use field::{Field, Rationals};
pub use linalg::{Matrix, MatrixQ, Solution};
pub use numfield::{FieldElement, NumberField, NumberFieldError};
pub use poly::QPoly;
pub use rational::{frac, parse_rational, rat, Rational};

/// Matrix over a number field.
pub type MatrixF = Matrix<FieldElement>;

/// Shorthand for [`NumberField::new`].
pub fn nf_create(f: QPoly) -> Result<NumberField, NumberFieldError> {
    NumberField::new(f)
}

/// All complex embeddings of `k`.
pub fn nf_embeddings(k: &NumberField) -> &[ComplexEmbedding] {
    k.embeddings()
}

/// Exact solution set of A·x = b over `f`.
pub fn solve_linear<F: Field>(f: &F, a: &Matrix<F::Elem>, b: &[F::Elem]) -> Solution<F::Elem> {
    linalg::solve(f, a, b)
}
