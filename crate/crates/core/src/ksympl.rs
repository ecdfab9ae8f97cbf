//! k-symplectic structures Ψ: W → Λ²V and the Clifford-module bounds.
//!
//! Ψ is given by the images Ψ₁…Ψ_k of a basis of W. The Pfaffian of the
//! generic member Σ tᵢΨᵢ is computed symbolically; a k-symplectic structure
//! has Pf = c·q(t)ⁿ with n = dim V / 4 and q a nondegenerate quadratic form,
//! and Σ tᵢΨᵢ drops to rank dim V / 2 on the quadric {q = 0}.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::exactmath::linalg::{self, det, inverse, mat_mul, Matrix, MatrixQ};
use crate::exactmath::mpoly::MPoly;
use crate::exactmath::rational::rational_sqrt;
use crate::exactmath::{Field, FieldElement, NumberField, QPoly, Rational, Rationals};
use crate::qforms::diagonalize;

/// Largest dim V accepted by the symbolic Pfaffian.
pub const MAX_V_DIM: usize = 8;
/// Largest dim W accepted.
pub const MAX_K: usize = 5;

const PFAFFIAN_SEED: u64 = 0x9fa5_5eed;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KsError {
    #[error("matrix dimension {0} is odd")]
    OddDimension(usize),
    #[error("dim V = {v_dim}, k = {k} exceeds the limits dim V <= {MAX_V_DIM}, k <= {MAX_K}")]
    TooLarge { v_dim: usize, k: usize },
    #[error("dim V = {0} is not divisible by 4")]
    NotMultipleOfFour(usize),
    #[error("the family is empty")]
    Empty,
    #[error("matrix {index} is {rows}x{cols}, expected {v_dim}x{v_dim}")]
    Shape { index: usize, rows: usize, cols: usize, v_dim: usize },
    #[error("matrix {0} is not antisymmetric")]
    NotAntisymmetric(usize),
    #[error("the matrices are linearly dependent")]
    Dependent,
    #[error("Pfaffian failed the Pf^2 = det check")]
    PfaffianCheckFailed,
    #[error("Pfaffian vanishes identically")]
    NotGenericallySymplectic,
    #[error("Pfaffian is not c*q^n for a quadratic form q: {0}")]
    NotQuadricPower(String),
    #[error("the extracted quadric is degenerate")]
    DegenerateQuadric,
    #[error("rank on the quadric is {got}, expected {expected}")]
    WrongRankOnQuadric { expected: usize, got: usize },
    #[error("base point is isotropic for the quadric")]
    BasePointIsotropic,
    #[error("base point has {got} coordinates, expected {expected}")]
    BasePointShape { expected: usize, got: usize },
    #[error("Clifford relations fail: {0}")]
    RelationsFail(String),
    #[error("candidate was not verified as k-symplectic")]
    NotVerified,
}

/// Antisymmetric rational matrices Ψ₁…Ψ_k on V, dim V ≡ 0 mod 4, independent.
#[derive(Debug, Clone)]
pub struct KSymplecticCandidate {
    v_dim: usize,
    psis: Vec<MatrixQ>,
}

impl KSymplecticCandidate {
    pub fn new(psis: Vec<MatrixQ>) -> Result<Self, KsError> {
        let first = psis.first().ok_or(KsError::Empty)?;
        let v_dim = first.rows();
        for (index, p) in psis.iter().enumerate() {
            if p.rows() != v_dim || p.cols() != v_dim {
                return Err(KsError::Shape {
                    index,
                    rows: p.rows(),
                    cols: p.cols(),
                    v_dim,
                });
            }
            for i in 0..v_dim {
                for j in i..v_dim {
                    if p.get(i, j) != &-p.get(j, i) {
                        return Err(KsError::NotAntisymmetric(index));
                    }
                }
            }
        }
        if v_dim % 2 == 1 {
            return Err(KsError::OddDimension(v_dim));
        }
        if v_dim % 4 != 0 {
            return Err(KsError::NotMultipleOfFour(v_dim));
        }
        let flat = MatrixQ::from_rows(psis.iter().map(|p| p.data().to_vec()).collect(), v_dim * v_dim);
        if linalg::rank(&Rationals, &flat) != psis.len() {
            return Err(KsError::Dependent);
        }
        Ok(KSymplecticCandidate { v_dim, psis })
    }

    pub fn v_dim(&self) -> usize {
        self.v_dim
    }

    pub fn k(&self) -> usize {
        self.psis.len()
    }

    pub fn psis(&self) -> &[MatrixQ] {
        &self.psis
    }

    /// Ψ(ω) = Σ ωᵢΨᵢ.
    pub fn at(&self, w: &[Rational]) -> MatrixQ {
        let f = Rationals;
        self.psis
            .iter()
            .zip(w)
            .fold(linalg::zeros(&f, self.v_dim, self.v_dim), |acc, (p, c)| {
                linalg::mat_add(&f, &acc, &linalg::mat_scale(&f, c, p))
            })
    }

    /// Ψ(ω) for ω with coordinates in a number field.
    pub fn at_over(&self, k: &NumberField, w: &[FieldElement]) -> Matrix<FieldElement> {
        Matrix::from_fn(self.v_dim, self.v_dim, |i, j| {
            self.psis
                .iter()
                .zip(w)
                .fold(k.zero(), |acc, (p, c)| &acc + &c.scale(p.get(i, j)))
        })
    }

    /// Σ tᵢΨᵢ with polynomial entries.
    pub fn generic(&self) -> Matrix<MPoly> {
        let k = self.k();
        Matrix::from_fn(self.v_dim, self.v_dim, |i, j| {
            MPoly::linear(&self.psis.iter().map(|p| p.get(i, j).clone()).collect::<Vec<_>>())
        })
        .map(|p| if p.nvars() == 0 { MPoly::zero(k) } else { p.clone() })
    }
}

/// A homogeneous polynomial in k variables with Pf² = det verified at
/// sampled rational points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PfaffianForm {
    pub poly: MPoly,
}

fn pf_rec(a: &Matrix<MPoly>, idx: &[usize], nvars: usize) -> MPoly {
    if idx.is_empty() {
        return MPoly::constant(nvars, Rational::one());
    }
    let i0 = idx[0];
    let mut acc = MPoly::zero(nvars);
    for (pos, &j) in idx.iter().enumerate().skip(1) {
        let e = a.get(i0, j);
        if e.is_zero() {
            continue;
        }
        let rest: Vec<usize> = idx[1..].iter().copied().filter(|&x| x != j).collect();
        let term = e.mul(&pf_rec(a, &rest, nvars));
        acc = if pos % 2 == 1 { acc.add(&term) } else { acc.sub(&term) };
    }
    acc
}

/// Pf(A) by expansion along the first row, so that Pf([[0, p], [−p, 0]]) = p
/// and Pf of the block sum of [[0, 1], [−1, 0]] is 1. The top-level cofactors
/// are evaluated in parallel and summed in a fixed order.
pub fn pfaffian(a: &Matrix<MPoly>) -> Result<MPoly, KsError> {
    let n = a.rows();
    if n % 2 == 1 {
        return Err(KsError::OddDimension(n));
    }
    let nvars = if n == 0 { 0 } else { a.get(0, 0).nvars() };
    if n > MAX_V_DIM || nvars > MAX_K {
        return Err(KsError::TooLarge { v_dim: n, k: nvars });
    }
    if n == 0 {
        return Ok(MPoly::constant(nvars, Rational::one()));
    }
    let idx: Vec<usize> = (0..n).collect();
    let terms: Vec<MPoly> = (1..n)
        .into_par_iter()
        .map(|j| {
            let e = a.get(0, j);
            if e.is_zero() {
                return MPoly::zero(nvars);
            }
            let rest: Vec<usize> = idx[1..].iter().copied().filter(|&x| x != j).collect();
            let t = e.mul(&pf_rec(a, &rest, nvars));
            if j % 2 == 1 {
                t
            } else {
                t.scale(&-Rational::one())
            }
        })
        .collect();
    Ok(terms.iter().fold(MPoly::zero(nvars), |acc, t| acc.add(t)))
}

/// Symbolic Pfaffian of the generic member, checked against the determinant
/// at three sampled rational points.
pub fn candidate_pfaffian(c: &KSymplecticCandidate) -> Result<PfaffianForm, KsError> {
    if c.v_dim > MAX_V_DIM || c.k() > MAX_K {
        return Err(KsError::TooLarge { v_dim: c.v_dim, k: c.k() });
    }
    let poly = pfaffian(&c.generic())?;
    let mut rng = ChaCha8Rng::seed_from_u64(PFAFFIAN_SEED);
    for _ in 0..3 {
        let pt: Vec<Rational> = (0..c.k())
            .map(|_| Rational::new(rng.gen_range(-9i64..=9).into(), rng.gen_range(1i64..=5).into()))
            .collect();
        let v = poly.eval(&pt);
        if &v * &v != det(&Rationals, &c.at(&pt)) {
            return Err(KsError::PfaffianCheckFailed);
        }
    }
    Ok(PfaffianForm { poly })
}

/// A point on the quadric, possibly over a quadratic extension.
#[derive(Debug, Clone)]
pub struct QuadricPoint {
    /// Defining polynomial of the field of the coordinates (x for ℚ).
    pub field_poly: QPoly,
    pub coords: Vec<FieldElement>,
}

#[derive(Debug, Clone)]
pub struct KSymplecticReport {
    pub ok: bool,
    pub pfaffian: MPoly,
    /// Symmetric k×k matrix of the degeneracy quadric q(t) = tᵀQt.
    pub quadric: Option<MatrixQ>,
    pub scalar: Option<Rational>,
    pub power: usize,
    pub rank_on_quadric: Option<usize>,
    pub witness: Option<QuadricPoint>,
    pub failure: Option<KsError>,
}

fn quadratic_matrix(q: &MPoly, k: usize) -> MatrixQ {
    MatrixQ::from_fn(k, k, |i, j| {
        let mut e = vec![0u32; k];
        e[i] += 1;
        e[j] += 1;
        let c = q.coeff(&e);
        if i == j {
            c
        } else {
            c / Rational::from_integer(2.into())
        }
    })
}

fn search_points(k: usize) -> Vec<Vec<Rational>> {
    let r = |x: i64| Rational::from_integer(x.into());
    let mut out = Vec::new();
    for i in 0..k {
        let mut v = vec![r(0); k];
        v[i] = r(1);
        out.push(v);
    }
    for i in 0..k {
        for j in i + 1..k {
            for s in [1, -1, 2, -2] {
                let mut v = vec![r(0); k];
                v[i] = r(1);
                v[j] = r(s);
                out.push(v);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(PFAFFIAN_SEED ^ 1);
    for _ in 0..64 {
        out.push((0..k).map(|_| r(rng.gen_range(-5..=5))).collect());
    }
    out
}

/// Writes p = c·qⁿ with q(w) = 1 for the first search point w where p(w) ≠ 0.
/// Returns `None` when p is not of that shape.
pub fn extract_quadric_power(p: &MPoly, n: usize) -> Option<(Rational, MPoly)> {
    let k = p.nvars();
    if p.is_zero() || k == 0 || n == 0 || !p.is_homogeneous() || p.degree() != Some(2 * n as u32) {
        return None;
    }
    let w = search_points(k).into_iter().find(|w| !p.eval(w).is_zero())?;
    let i0 = w.iter().position(|x| !x.is_zero()).unwrap();
    // t = T s with T e_0 = w and the other columns unit vectors e_j, j ≠ i0.
    let mut cols: Vec<Vec<Rational>> = vec![w.clone()];
    for j in 0..k {
        if j != i0 {
            let mut e = vec![Rational::zero(); k];
            e[j] = Rational::one();
            cols.push(e);
        }
    }
    let t = MatrixQ::from_columns(&cols, k);
    let ps = p.substitute_linear(&t.row_vecs());
    let cs = ps.coefficients_in(0);
    let top = cs.get(2 * n)?.coeff(&vec![0; k]);
    debug_assert!(!top.is_zero());
    let c = |i: usize| cs.get(i).cloned().unwrap_or_else(|| MPoly::zero(k)).scale(&top.recip());
    let nr = Rational::from_integer(n.into());
    let b = c(2 * n - 1).scale(&nr.recip());
    let binom2 = Rational::from_integer((n * (n.saturating_sub(1)) / 2).into());
    let cc = c(2 * n - 2).sub(&b.mul(&b).scale(&binom2)).scale(&nr.recip());
    let s0 = MPoly::var(k, 0);
    let qs = s0.mul(&s0).add(&b.mul(&s0)).add(&cc);
    if qs.pow(n as u32).scale(&top) != ps {
        return None;
    }
    let tinv = inverse(&Rationals, &t).expect("change of variables is invertible");
    let q = qs.substitute_linear(&tinv.row_vecs());
    Some((top, q))
}

/// A point of {q = 0}: rational when two diagonal entries of a congruence
/// diagonalization have a square ratio of opposite sign, otherwise over the
/// quadratic extension splitting the first anisotropic plane.
pub fn quadric_point(quadric: &MatrixQ) -> QuadricPoint {
    let k = quadric.rows();
    let (p, d) = diagonalize(quadric);
    for i in 0..k {
        for j in i + 1..k {
            if let Some(r) = rational_sqrt(&(-&d[j] / &d[i])) {
                let field = NumberField::rationals();
                let coords = (0..k)
                    .map(|row| field.from_rational(&(&r * p.get(row, i) + p.get(row, j))))
                    .collect();
                return QuadricPoint {
                    field_poly: QPoly::x(),
                    coords,
                };
            }
        }
    }
    // s² = −d₁/d₀, point s·p₀ + p₁
    let poly = QPoly::new(vec![&d[1] / &d[0], Rational::zero(), Rational::one()]);
    let field = NumberField::new(poly.clone()).expect("-d1/d0 is not a square");
    let s = field.gen();
    let coords = (0..k)
        .map(|row| &s.scale(p.get(row, 0)) + &field.from_rational(p.get(row, 1)))
        .collect();
    QuadricPoint {
        field_poly: poly,
        coords,
    }
}

/// A rational point with q ≠ 0: the first vector of a diagonalizing basis.
pub fn default_base_point(quadric: &MatrixQ) -> Vec<Rational> {
    let (p, _) = diagonalize(quadric);
    p.column(0)
}

/// Rank of Ψ(w) over the field of the point.
pub fn rank_at_point(c: &KSymplecticCandidate, pt: &QuadricPoint) -> usize {
    let field = pt.coords[0].field().clone();
    linalg::rank(&field, &c.at_over(&field, &pt.coords))
}

/// Checks Pf(Ψ(t)) = c·q(t)ⁿ with q a nondegenerate quadric and n = dim V / 4,
/// then that Ψ has rank ½ dim V at a point of the quadric.
///
/// The rank condition is sometimes stated as ½ dim W. Only ½ dim V is
/// consistent with the eigenspace count r = dim H¹/2 used for the
/// divisibility bound, so that is the reading checked here.
pub fn verify_k_symplectic(c: &KSymplecticCandidate) -> Result<KSymplecticReport, KsError> {
    let pf = candidate_pfaffian(c)?;
    let n = c.v_dim / 4;
    let mut report = KSymplecticReport {
        ok: false,
        pfaffian: pf.poly.clone(),
        quadric: None,
        scalar: None,
        power: n,
        rank_on_quadric: None,
        witness: None,
        failure: None,
    };
    let fail = |mut r: KSymplecticReport, e: KsError| {
        r.failure = Some(e);
        Ok(r)
    };
    if pf.poly.is_zero() {
        return fail(report, KsError::NotGenericallySymplectic);
    }
    if c.k() == 1 {
        return fail(
            report,
            KsError::NotQuadricPower("a one-dimensional W carries no nondegenerate quadric".into()),
        );
    }
    let Some((scalar, q)) = extract_quadric_power(&pf.poly, n) else {
        return fail(report, KsError::NotQuadricPower(format!("Pf = {}", pf.poly)));
    };
    let quadric = quadratic_matrix(&q, c.k());
    report.quadric = Some(quadric.clone());
    report.scalar = Some(scalar);
    if det(&Rationals, &quadric).is_zero() {
        return fail(report, KsError::DegenerateQuadric);
    }
    let pt = quadric_point(&quadric);
    let rank = rank_at_point(c, &pt);
    report.rank_on_quadric = Some(rank);
    report.witness = Some(pt);
    if rank != c.v_dim / 2 {
        return fail(
            report,
            KsError::WrongRankOnQuadric {
                expected: c.v_dim / 2,
                got: rank,
            },
        );
    }
    report.ok = true;
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct CliffordReport {
    pub base: Vec<Rational>,
    /// q-orthogonal basis ω₁…ω_{k−1} of ω₀^⊥.
    pub basis: Vec<Vec<Rational>>,
    /// Aᵢ = Ψ(ω₀)⁻¹Ψ(ωᵢ).
    pub operators: Vec<MatrixQ>,
    /// Aᵢ² = λᵢ·Id with λᵢ = −q(ωᵢ)/q(ω₀).
    pub lambdas: Vec<Rational>,
}

pub fn clifford_operators(
    c: &KSymplecticCandidate,
    report: &KSymplecticReport,
    base: &[Rational],
) -> Result<CliffordReport, KsError> {
    let f = Rationals;
    let (true, Some(quadric)) = (report.ok, report.quadric.as_ref()) else {
        return Err(KsError::NotVerified);
    };
    let k = c.k();
    if base.len() != k {
        return Err(KsError::BasePointShape {
            expected: k,
            got: base.len(),
        });
    }
    let qv = |v: &[Rational]| crate::qforms::bilinear(&f, quadric, v, v);
    let q0 = qv(base);
    if q0.is_zero() {
        return Err(KsError::BasePointIsotropic);
    }
    let lowered = linalg::mat_vec(&f, quadric, base);
    let perp = linalg::kernel(&f, &MatrixQ::from_rows(vec![lowered], k));
    let r = mat_mul(&f, &mat_mul(&f, &perp, quadric), &perp.transpose());
    let (p, _) = diagonalize(&r);
    let basis: Vec<Vec<Rational>> = (0..perp.rows())
        .map(|i| {
            (0..k)
                .map(|col| (0..perp.rows()).map(|j| p.get(j, i) * perp.get(j, col)).sum())
                .collect()
        })
        .collect();
    let psi0_inv = inverse(&f, &c.at(base)).ok_or_else(|| KsError::RelationsFail("Psi(w0) is singular".into()))?;
    let operators: Vec<MatrixQ> = basis.iter().map(|w| mat_mul(&f, &psi0_inv, &c.at(w))).collect();
    let id = linalg::identity(&f, c.v_dim);
    let mut lambdas = Vec::with_capacity(operators.len());
    for (i, a) in operators.iter().enumerate() {
        let lambda = -qv(&basis[i]) / &q0;
        let sq = mat_mul(&f, a, a);
        if sq != linalg::mat_scale(&f, &lambda, &id) {
            return Err(KsError::RelationsFail(format!("A{}^2 is not {} Id", i + 1, lambda)));
        }
        lambdas.push(lambda);
        for (j, b) in operators.iter().enumerate().skip(i + 1) {
            let ac = linalg::mat_add(&f, &mat_mul(&f, a, b), &mat_mul(&f, b, a));
            if !linalg::is_zero_matrix(&f, &ac) {
                return Err(KsError::RelationsFail(format!("A{} and A{} do not anticommute", i + 1, j + 1)));
            }
        }
    }
    Ok(CliffordReport {
        base: base.to_vec(),
        basis,
        operators,
        lambdas,
    })
}

/// 2^⌊(k−1)/2⌋, the divisor of dim V forced by a k-symplectic structure.
pub fn divisibility_bound(k: u64) -> BigUint {
    assert!(k >= 1, "k must be positive");
    BigUint::one() << ((k - 1) / 2)
}

/// 2^⌊(d+1)/2⌋ for a symplectic torus with k-symplectic H¹ in a family of
/// essential dimension d.
pub fn torus_bound(d: u64) -> BigUint {
    BigUint::one() << ((d + 1) / 2)
}

/// Whether dim H¹ is divisible by [`torus_bound`].
pub fn check_torus(d: u64, dim_h1: u64) -> bool {
    (BigUint::from(dim_h1) % torus_bound(d)).is_zero()
}

/// Both readings of the torus divisibility statement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorusReadings {
    pub bound: BigUint,
    /// dim H¹ divisible by the bound.
    pub h1_divisible: bool,
    /// dim_ℂ = dim H¹ / 2 divisible by the bound.
    pub complex_dim_divisible: bool,
}

pub fn torus_readings(d: u64, dim_h1: u64) -> TorusReadings {
    let bound = torus_bound(d);
    let complex_dim_divisible = dim_h1 % 2 == 0 && (BigUint::from(dim_h1 / 2) % &bound).is_zero();
    TorusReadings {
        h1_divisible: check_torus(d, dim_h1),
        complex_dim_divisible,
        bound,
    }
}

/// (d + 2)·e, the lower bound on dim H²_tr of a subvariety.
pub fn subvariety_bound(d: u64, e: u64) -> BigUint {
    BigUint::from(d + 2) * BigUint::from(e)
}
