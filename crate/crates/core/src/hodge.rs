//! K3-type Hodge structures given by an algebraic period.
//!
//! A period Ω ∈ V ⊗ F spans V^{2,0} once an embedding σ: F → ℂ is fixed;
//! V^{0,2} is its image under the conjugate embedding and V^{1,1} is the
//! q-orthogonal of both. Everything below is decided exactly: conditions over
//! F are expanded in the power basis into rational linear equations, and the
//! only inequality (q(Ω, Ω̄) > 0) goes through certified interval evaluation.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::exactmath::embed::{PairExpr, Sign, SignError, DEFAULT_PRECISION};
use crate::exactmath::factor::is_irreducible;
use crate::exactmath::linalg::{self, coordinates, intersect, kernel, mat_add, mat_mul, mat_scale, row_space, MatrixQ};
use crate::exactmath::{Field, FieldElement, NumberField, NumberFieldError, QPoly, Rational, Rationals};
use crate::qforms::{orth_complement, signature, signature_of, QuadraticSpace, Signature};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HodgeError {
    #[error("period has {got} coordinates, the space has dimension {expected}")]
    Shape { expected: usize, got: usize },
    #[error("period coordinate {0} lies in a different number field")]
    ForeignElement(usize),
    #[error("embedding index {index} out of range for a field of degree {degree}")]
    NoSuchEmbedding { index: usize, degree: usize },
    #[error("signature is ({}, {}), expected (2, m - 2)", .0.positives, .0.negatives)]
    WrongSignature(Signature),
    #[error("period is the zero vector")]
    ZeroPeriod,
    #[error("q(Omega, Omega) = {0} is not zero")]
    IsotropyFails(FieldElement),
    #[error("q(Omega, conj Omega) is {} at the chosen embedding", .0.as_str())]
    PositivityFails(Sign),
    #[error(transparent)]
    Sign(#[from] SignError),
    #[error("endomorphism algebra is not commutative")]
    NotCommutative,
    #[error("endomorphism algebra is not closed: {0}")]
    NotClosed(&'static str),
    #[error("minimal polynomial {0} of the primitive element has both real and non-real roots")]
    MixedRoots(QPoly),
    #[error("no primitive element found for the endomorphism algebra")]
    NoPrimitive,
    #[error(transparent)]
    Field(#[from] NumberFieldError),
    #[error("internal consistency check failed: {0}")]
    Internal(&'static str),
}

/// Unvalidated period data.
#[derive(Debug, Clone)]
pub struct PeriodCandidate {
    pub space: QuadraticSpace,
    pub field: NumberField,
    pub embedding: usize,
    pub omega: Vec<FieldElement>,
}

/// A period satisfying q(Ω,Ω) = 0 and q(Ω,Ω̄) > 0 on a space of signature (2, m−2).
#[derive(Debug, Clone)]
pub struct K3Period {
    space: QuadraticSpace,
    field: NumberField,
    embedding: usize,
    omega: Vec<FieldElement>,
}

impl K3Period {
    pub fn space(&self) -> &QuadraticSpace {
        &self.space
    }
    pub fn field(&self) -> &NumberField {
        &self.field
    }
    pub fn embedding(&self) -> usize {
        self.embedding
    }
    pub fn omega(&self) -> &[FieldElement] {
        &self.omega
    }
}

/// σ-value of Σ g_kl Ω_k conj(Ω_l) as an expression in σ(x) and its conjugate.
pub fn hermitian_expr(gram: &MatrixQ, field: &NumberField, l: &[FieldElement]) -> PairExpr {
    let mut acc = PairExpr::zero(field);
    let conj: Vec<PairExpr> = l.iter().map(PairExpr::of_conj).collect();
    for (k, lk) in l.iter().enumerate() {
        if lk.is_zero() {
            continue;
        }
        let a = PairExpr::of(lk);
        for (j, cj) in conj.iter().enumerate() {
            let g = gram.get(k, j);
            if g.is_zero() || cj.is_trivially_zero() {
                continue;
            }
            acc = acc.add(&a.mul(cj).scale(g));
        }
    }
    acc
}

/// Certificates for the two period conditions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodCertificate {
    /// q(l, l) computed in F (always zero when the check passes).
    pub isotropy: FieldElement,
    /// Sign of q(l, l̄) at the embedding.
    pub positivity: Sign,
}

/// Checks q(l,l) = 0 in F and q(l, l̄) > 0 at the embedding `emb`.
pub fn check_period_conditions(
    space: &QuadraticSpace,
    field: &NumberField,
    emb: usize,
    l: &[FieldElement],
    precision: u32,
) -> Result<PeriodCertificate, HodgeError> {
    if l.len() != space.dim() {
        return Err(HodgeError::Shape {
            expected: space.dim(),
            got: l.len(),
        });
    }
    if let Some(i) = l.iter().position(|x| x.field() != field) {
        return Err(HodgeError::ForeignElement(i));
    }
    if emb >= field.degree() {
        return Err(HodgeError::NoSuchEmbedding {
            index: emb,
            degree: field.degree(),
        });
    }
    if l.iter().all(|x| x.is_zero()) {
        return Err(HodgeError::ZeroPeriod);
    }
    let iso = space.form_over(field, l, l);
    if !iso.is_zero() {
        return Err(HodgeError::IsotropyFails(iso));
    }
    let h = hermitian_expr(space.gram(), field, l);
    let (re, im) = h.signs_at(field.embedding(emb), precision)?;
    if im != Sign::Zero {
        return Err(HodgeError::Internal("hermitian value is not real"));
    }
    if re != Sign::Positive {
        return Err(HodgeError::PositivityFails(re));
    }
    Ok(PeriodCertificate {
        isotropy: iso,
        positivity: re,
    })
}

pub fn validate_period(c: PeriodCandidate) -> Result<K3Period, HodgeError> {
    validate_period_with_precision(c, DEFAULT_PRECISION)
}

pub fn validate_period_with_precision(c: PeriodCandidate, precision: u32) -> Result<K3Period, HodgeError> {
    let m = c.space.dim();
    let sig = signature(&c.space);
    if sig.positives != 2 || sig.negatives + 2 != m {
        return Err(HodgeError::WrongSignature(sig));
    }
    check_period_conditions(&c.space, &c.field, c.embedding, &c.omega, precision)?;
    Ok(K3Period {
        space: c.space,
        field: c.field,
        embedding: c.embedding,
        omega: c.omega,
    })
}

/// A validated period with its transcendental lattice T and algebraic part T^⊥.
#[derive(Debug, Clone)]
pub struct K3Hodge {
    period: K3Period,
    trans: MatrixQ,
    alg: MatrixQ,
    // Ω in the basis `trans`, an F-vector of length dim T
    omega_t: Vec<FieldElement>,
    gram_t: MatrixQ,
}

impl K3Hodge {
    pub fn period(&self) -> &K3Period {
        &self.period
    }
    /// Canonical (reduced echelon) basis of T, one vector per row.
    pub fn trans(&self) -> &MatrixQ {
        &self.trans
    }
    /// Canonical basis of T^⊥.
    pub fn alg(&self) -> &MatrixQ {
        &self.alg
    }
    pub fn dim_t(&self) -> usize {
        self.trans.rows()
    }
    /// Ω expressed in the basis of T.
    pub fn omega_t(&self) -> &[FieldElement] {
        &self.omega_t
    }
    /// Gram matrix of q restricted to T (in the basis of T).
    pub fn gram_t(&self) -> &MatrixQ {
        &self.gram_t
    }
    pub fn field(&self) -> &NumberField {
        self.period.field()
    }
}

/// The vectors v_j with Ω = Σ_j v_j ⊗ x^j.
pub fn coefficient_vectors(omega: &[FieldElement], degree: usize) -> Vec<Vec<Rational>> {
    (0..degree)
        .map(|j| omega.iter().map(|w| w.coords()[j].clone()).collect())
        .collect()
}

pub fn transcendental_lattice(p: K3Period) -> Result<K3Hodge, HodgeError> {
    let f = Rationals;
    let m = p.space.dim();
    let e = p.field.degree();
    let vs = coefficient_vectors(&p.omega, e);
    let trans = row_space(&f, &MatrixQ::from_rows(vs.clone(), m));
    let alg = orth_complement(&p.space, &trans);
    let t = trans.rows();

    // Minimality: every coefficient vector lies in T, and dim T equals their rank.
    let mut cs = Vec::with_capacity(e);
    for v in &vs {
        cs.push(coordinates(&f, &trans, v).ok_or(HodgeError::Internal("coefficient vector outside T"))?);
    }
    if linalg::rank(&f, &MatrixQ::from_rows(vs, m)) != t {
        return Err(HodgeError::Internal("T is not spanned by the coefficient vectors"));
    }
    if t + alg.rows() != m || intersect(&f, &trans, &alg).rows() != 0 {
        return Err(HodgeError::Internal("T and its orthogonal do not split V"));
    }
    let gram_t = p.space.restrict(&trans);
    let sig = signature_of(&gram_t);
    if sig.positives != 2 || sig.negatives + 2 != t {
        return Err(HodgeError::WrongSignature(sig));
    }
    let omega_t = (0..t)
        .map(|i| p.field.element((0..e).map(|j| cs[j][i].clone()).collect()))
        .collect();
    Ok(K3Hodge {
        period: p,
        trans,
        alg,
        omega_t,
        gram_t,
    })
}

/// W is a Hodge substructure iff W = (W∩T) + (W∩T^⊥) with W∩T ∈ {0, T}.
pub fn is_hodge_substructure(h: &K3Hodge, w: &MatrixQ) -> bool {
    let f = Rationals;
    let w = row_space(&f, w);
    let a = intersect(&f, &w, &h.trans).rows();
    let b = intersect(&f, &w, &h.alg).rows();
    a + b == w.rows() && (a == 0 || a == h.dim_t())
}

/// Rational linear equations in N unknowns forcing L(u) ∥ ω, where
/// L(u)_a = Σ_k coef[a][k]·u_k with coefficients in F.
fn parallel_rows(omega: &[FieldElement], coef: &[Vec<FieldElement>], n: usize) -> Vec<Vec<Rational>> {
    let t = omega.len();
    let e = omega[0].field().degree();
    let mut rows = Vec::new();
    for a in 0..t {
        for b in a + 1..t {
            // Σ_k u_k (coef[a][k] ω_b − coef[b][k] ω_a) = 0
            let entries: Vec<FieldElement> = (0..n)
                .map(|k| &(&coef[a][k] * &omega[b]) - &(&coef[b][k] * &omega[a]))
                .collect();
            for j in 0..e {
                let row: Vec<Rational> = entries.iter().map(|x| x.coords()[j].clone()).collect();
                if row.iter().any(|c| !c.is_zero()) {
                    rows.push(row);
                }
            }
        }
    }
    rows
}

/// Solutions (as t×t matrices) of the stacked parallelism conditions.
fn solve_matrix_conditions(t: usize, rows: Vec<Vec<Rational>>) -> Vec<MatrixQ> {
    let f = Rationals;
    let n = t * t;
    let k = if rows.is_empty() {
        linalg::identity(&f, n)
    } else {
        kernel(&f, &MatrixQ::from_rows(rows, n))
    };
    (0..k.rows())
        .map(|r| MatrixQ::new(t, t, k.row(r).to_vec()))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    TotallyReal,
    Cm,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::TotallyReal => "TotallyReal",
            Classification::Cm => "CM",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MtFamily {
    SpecialOrthogonal,
    Unitary,
}

impl MtFamily {
    pub fn as_str(&self) -> &'static str {
        match self {
            MtFamily::SpecialOrthogonal => "SO_E",
            MtFamily::Unitary => "U_E",
        }
    }
}

/// The Mumford-Tate group as (family, rank over E).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MtDescriptor {
    pub family: MtFamily,
    pub rank: usize,
}

#[derive(Debug, Clone)]
pub struct PrimitiveElement {
    /// Coefficients in `EndFieldResult::basis`.
    pub coeffs: Vec<Rational>,
    pub matrix: MatrixQ,
    pub minpoly: QPoly,
}

#[derive(Debug, Clone)]
pub struct EndFieldResult {
    pub basis: Vec<MatrixQ>,
    pub e: usize,
    pub primitive: PrimitiveElement,
    /// E as an abstract number field ℚ[x]/(minpoly of the primitive element).
    pub field: NumberField,
    pub classification: Classification,
    /// Basis of E₀ (CM only; empty when totally real).
    pub fixed_subalgebra: Vec<MatrixQ>,
    /// a* = q_T⁻¹ aᵀ q_T for each basis element a.
    pub adjoint_action: Vec<MatrixQ>,
    pub mt: MtDescriptor,
}

impl EndFieldResult {
    pub fn n_e(&self) -> usize {
        self.mt.rank
    }
}

/// The adjoint a* = G⁻¹ aᵀ G with respect to the Gram matrix G.
pub fn adjoint(gram: &MatrixQ, a: &MatrixQ) -> MatrixQ {
    let f = Rationals;
    let gi = linalg::inverse(&f, gram).expect("nondegenerate form");
    mat_mul(&f, &mat_mul(&f, &gi, &a.transpose()), gram)
}

fn flat(m: &MatrixQ) -> Vec<Rational> {
    m.data().to_vec()
}

fn in_span(basis: &[MatrixQ], x: &MatrixQ) -> Option<Vec<Rational>> {
    let f = Rationals;
    let rows: Vec<Vec<Rational>> = basis.iter().map(flat).collect();
    let b = MatrixQ::from_rows(rows, x.rows() * x.cols());
    coordinates(&f, &b, &flat(x))
}

fn combination(basis: &[MatrixQ], cs: &[Rational]) -> MatrixQ {
    let f = Rationals;
    let t = basis[0].rows();
    basis
        .iter()
        .zip(cs)
        .fold(linalg::zeros(&f, t, t), |acc, (b, c)| mat_add(&f, &acc, &mat_scale(&f, c, b)))
}

const PRIMITIVE_SEED: u64 = 0x0e4d_f1e1;

pub fn endomorphism_field(h: &K3Hodge) -> Result<EndFieldResult, HodgeError> {
    let f = Rationals;
    let t = h.dim_t();
    let k = h.field();
    let omega = h.omega_t();
    let g = h.gram_t();
    let gi = linalg::inverse(&f, g).ok_or(HodgeError::Internal("q restricted to T is degenerate"))?;
    let n = t * t;
    let zero = k.zero();

    // φ(Ω) ∥ Ω
    let mut coef = vec![vec![zero.clone(); n]; t];
    for a in 0..t {
        for c in 0..t {
            coef[a][a * t + c] = omega[c].clone();
        }
    }
    let mut rows = parallel_rows(omega, &coef, n);
    // φ*(Ω) ∥ Ω, with (φ*Ω)_a = Σ_{r,p} G⁻¹_{ap} (GΩ)_r φ_{rp}
    let g_f = g.map(|x| k.from_rational(x));
    let g_omega = linalg::mat_vec(k, &g_f, omega);
    let mut coef = vec![vec![zero.clone(); n]; t];
    for a in 0..t {
        for r in 0..t {
            for p in 0..t {
                coef[a][r * t + p] = g_omega[r].scale(gi.get(a, p));
            }
        }
    }
    rows.extend(parallel_rows(omega, &coef, n));
    let basis = solve_matrix_conditions(t, rows);
    let e = basis.len();

    let id = linalg::identity(&f, t);
    if in_span(&basis, &id).is_none() {
        return Err(HodgeError::NotClosed("identity"));
    }
    for i in 0..e {
        for j in i + 1..e {
            if mat_mul(&f, &basis[i], &basis[j]) != mat_mul(&f, &basis[j], &basis[i]) {
                return Err(HodgeError::NotCommutative);
            }
        }
        for j in 0..e {
            if in_span(&basis, &mat_mul(&f, &basis[i], &basis[j])).is_none() {
                return Err(HodgeError::NotClosed("product"));
            }
        }
    }
    let adjoint_action: Vec<MatrixQ> = basis.iter().map(|a| adjoint(g, a)).collect();
    for (a, s) in basis.iter().zip(&adjoint_action) {
        if in_span(&basis, s).is_none() {
            return Err(HodgeError::NotClosed("adjoint"));
        }
        if &adjoint(g, s) != a {
            return Err(HodgeError::Internal("adjoint is not an involution"));
        }
    }
    if t % e != 0 {
        return Err(HodgeError::Internal("dim E does not divide dim T"));
    }

    let primitive = find_primitive(&basis)?;
    if !is_irreducible(&primitive.minpoly) {
        return Err(HodgeError::Internal("endomorphism algebra is not a field"));
    }
    let field = NumberField::new(primitive.minpoly.clone())?;

    let totally_real = basis.iter().zip(&adjoint_action).all(|(a, s)| a == s);
    let classification = if totally_real {
        Classification::TotallyReal
    } else {
        Classification::Cm
    };
    let fixed_subalgebra = if totally_real {
        Vec::new()
    } else {
        // a = Σ c_i b_i with a* = a
        let rows: Vec<Vec<Rational>> = (0..n)
            .map(|pos| {
                (0..e)
                    .map(|i| &adjoint_action[i].data()[pos] - &basis[i].data()[pos])
                    .collect()
            })
            .collect();
        let ker = kernel(&f, &MatrixQ::from_rows(rows, e));
        (0..ker.rows()).map(|r| combination(&basis, ker.row(r))).collect()
    };
    if !totally_real && 2 * fixed_subalgebra.len() != e {
        return Err(HodgeError::Internal("fixed subalgebra is not of index 2"));
    }

    let reals = field.embeddings().iter().filter(|s| s.is_real()).count();
    match classification {
        Classification::TotallyReal if reals != e => return Err(HodgeError::MixedRoots(primitive.minpoly.clone())),
        Classification::Cm if reals != 0 => return Err(HodgeError::MixedRoots(primitive.minpoly.clone())),
        _ => {}
    }

    let mt = MtDescriptor {
        family: if totally_real {
            MtFamily::SpecialOrthogonal
        } else {
            MtFamily::Unitary
        },
        rank: t / e,
    };
    Ok(EndFieldResult {
        basis,
        e,
        primitive,
        field,
        classification,
        fixed_subalgebra,
        adjoint_action,
        mt,
    })
}

/// Each basis matrix in turn, then random combinations with coefficients in
/// [−3, 3], until the minimal polynomial has degree e.
fn find_primitive(basis: &[MatrixQ]) -> Result<PrimitiveElement, HodgeError> {
    let e = basis.len();
    let unit = |i: usize| -> Vec<Rational> {
        (0..e)
            .map(|j| if i == j { Rational::one() } else { Rational::zero() })
            .collect()
    };
    let mut candidates: Vec<Vec<Rational>> = (0..e).map(unit).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(PRIMITIVE_SEED);
    for _ in 0..200 {
        candidates.push((0..e).map(|_| Rational::from_integer(rng.gen_range(-3i64..=3).into())).collect());
    }
    for coeffs in candidates {
        if coeffs.iter().all(|c| c.is_zero()) {
            continue;
        }
        let matrix = combination(basis, &coeffs);
        let minpoly = linalg::minimal_polynomial(&matrix);
        if minpoly.degree() == Some(e) {
            return Ok(PrimitiveElement { coeffs, matrix, minpoly });
        }
    }
    Err(HodgeError::NoPrimitive)
}

/// Rational Hodge classes in T ⊗ T, as t×t matrices X (τ = Σ X_ij t_i ⊗ t_j).
///
/// With u = q(·, Ω) the (4,0), (3,1) and (1,3), (0,4) components vanish iff
/// X·u ∥ Ω and Xᵀ·u ∥ Ω up to conjugation, and X is rational so the
/// conjugate conditions follow.
pub fn hodge_classes_tensor_square(h: &K3Hodge) -> Vec<MatrixQ> {
    let t = h.dim_t();
    let k = h.field();
    let omega = h.omega_t();
    let g_f = h.gram_t().map(|x| k.from_rational(x));
    let u = linalg::mat_vec(k, &g_f, omega);
    let n = t * t;
    let zero = k.zero();
    let mut coef = vec![vec![zero.clone(); n]; t];
    for a in 0..t {
        for j in 0..t {
            coef[a][a * t + j] = u[j].clone();
        }
    }
    let mut rows = parallel_rows(omega, &coef, n);
    let mut coef = vec![vec![zero; n]; t];
    for a in 0..t {
        for i in 0..t {
            coef[a][i * t + a] = u[i].clone();
        }
    }
    rows.extend(parallel_rows(omega, &coef, n));
    solve_matrix_conditions(t, rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rational::rat;

    fn gaussian_period() -> K3Period {
        let k = NumberField::new(QPoly::from_ints(&[1, 0, 1])).unwrap();
        let space = QuadraticSpace::diagonal(&[rat(1), rat(1)]).unwrap();
        let omega = vec![k.one(), k.gen()];
        validate_period(PeriodCandidate {
            space,
            field: k,
            embedding: 0,
            omega,
        })
        .unwrap()
    }

    #[test]
    fn gaussian_example() {
        let h = transcendental_lattice(gaussian_period()).unwrap();
        assert_eq!(h.dim_t(), 2);
        assert_eq!(h.alg().rows(), 0);
        let ef = endomorphism_field(&h).unwrap();
        assert_eq!(ef.e, 2);
        assert_eq!(ef.classification, Classification::Cm);
        assert_eq!(ef.fixed_subalgebra.len(), 1);
        assert_eq!(ef.mt, MtDescriptor { family: MtFamily::Unitary, rank: 1 });
        assert_eq!(hodge_classes_tensor_square(&h).len(), 2);
    }

    #[test]
    fn rational_isotropic_period_fails_positivity() {
        let k = NumberField::rationals();
        let space = QuadraticSpace::diagonal(&[rat(1), rat(1), rat(-1)]).unwrap();
        let omega = vec![k.one(), k.zero(), k.one()];
        let r = validate_period(PeriodCandidate {
            space,
            field: k,
            embedding: 0,
            omega,
        });
        assert!(matches!(r, Err(HodgeError::PositivityFails(Sign::Zero))));
    }
}
