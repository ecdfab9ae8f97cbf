//! Graded symmetric algebras and their harmonic quotients.
//!
//! Sym*(V) is modelled as homogeneous polynomials in the basis vectors
//! e₁…e_m. The harmonic quotient Sym*₊(V) = Sym*(V)/(b) is realized as the
//! kernel of the contraction Λ = Σ g_jk ∂_j ∂_k, a complement to b·Sym*(V).

mod tha;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use thiserror::Error;

use crate::exactmath::linalg::{self, Matrix};
use crate::exactmath::Field;
use crate::qforms::bivector_from_inverse;

pub use tha::{build_tha, e_structure, EStructure, ThaError, ThaMode, ThaResult};

/// Exponent vector of a monomial. Iteration order is graded-lexicographic:
/// lower degree first and, within a degree, e₁² before e₁e₂ before e₂².
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: Vec<u32>,
    degree: u32,
}

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        let degree = exps.iter().sum();
        Monomial { exps, degree }
    }

    pub fn one(m: usize) -> Self {
        Monomial::new(vec![0; m])
    }

    pub fn var(m: usize, j: usize) -> Self {
        let mut e = vec![0; m];
        e[j] = 1;
        Monomial::new(e)
    }

    /// e_j·e_k.
    pub fn pair(m: usize, j: usize, k: usize) -> Self {
        let mut e = vec![0; m];
        e[j] += 1;
        e[k] += 1;
        Monomial::new(e)
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn degree(&self) -> usize {
        self.degree as usize
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        Monomial::new(self.exps.iter().zip(&o.exps).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, o: &Self) -> Ordering {
        self.degree.cmp(&o.degree).then_with(|| o.exps.cmp(&self.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degree == 0 {
            return write!(f, "1");
        }
        let mut first = true;
        for (j, &a) in self.exps.iter().enumerate() {
            if a == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if a == 1 {
                write!(f, "e{}", j + 1)?;
            } else {
                write!(f, "e{}^{}", j + 1, a)?;
            }
        }
        Ok(())
    }
}

/// All degree-i monomials in m variables, in graded-lex order.
pub fn monomials(m: usize, i: usize) -> Vec<Monomial> {
    fn rec(m: usize, j: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if j + 1 == m {
            cur[j] = left;
            out.push(Monomial::new(cur.clone()));
            cur[j] = 0;
            return;
        }
        for a in (0..=left).rev() {
            cur[j] = a;
            rec(m, j + 1, left - a, cur, out);
        }
        cur[j] = 0;
    }
    let mut out = Vec::new();
    if m == 0 {
        if i == 0 {
            out.push(Monomial::new(Vec::new()));
        }
        return out;
    }
    rec(m, 0, i as u32, &mut vec![0; m], &mut out);
    out
}

fn binom(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, j| acc * (n - j) / (j + 1))
}

/// dim Sym^i of an m-dimensional space, C(m+i−1, i); zero for negative i.
pub fn sym_dim(m: usize, i: i64) -> u64 {
    if i < 0 || m == 0 {
        return u64::from(i == 0 && m == 0);
    }
    binom((m as u64) + (i as u64) - 1, i as u64)
}

/// dim Sym^i − dim Sym^{i−2}, the dimension of the harmonic part.
pub fn harm_dim(m: usize, i: i64) -> u64 {
    if i < 0 {
        return 0;
    }
    sym_dim(m, i) - sym_dim(m, i - 2)
}

/// Dimensions of the summands Sym^i_i, Sym^i_{i−2}, … of Sym^i.
pub fn sym_decompose_dims(m: usize, i: usize) -> Vec<u64> {
    (0..=i / 2).map(|j| harm_dim(m, (i - 2 * j) as i64)).collect()
}

/// A homogeneous element of Sym^degree over a field with m generators.
pub struct SymElement<F: Field> {
    m: usize,
    degree: usize,
    terms: BTreeMap<Monomial, F::Elem>,
}

impl<F: Field> Clone for SymElement<F> {
    fn clone(&self) -> Self {
        SymElement {
            m: self.m,
            degree: self.degree,
            terms: self.terms.clone(),
        }
    }
}

impl<F: Field> PartialEq for SymElement<F> {
    fn eq(&self, o: &Self) -> bool {
        self.m == o.m && self.degree == o.degree && self.terms == o.terms
    }
}

impl<F: Field> fmt::Debug for SymElement<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter()).finish()
    }
}

impl<F: Field> SymElement<F> {
    pub fn zero(m: usize, degree: usize) -> Self {
        SymElement {
            m,
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(f: &F, m: usize, c: F::Elem) -> Self {
        let mut s = SymElement::zero(m, 0);
        s.add_term(f, Monomial::one(m), c);
        s
    }

    /// Σ x_j e_j.
    pub fn linear(f: &F, x: &[F::Elem]) -> Self {
        let m = x.len();
        let mut s = SymElement::zero(m, 1);
        for (j, c) in x.iter().enumerate() {
            s.add_term(f, Monomial::var(m, j), c.clone());
        }
        s
    }

    pub fn monomial(f: &F, mono: Monomial, c: F::Elem) -> Self {
        let mut s = SymElement::zero(mono.exps.len(), mono.degree());
        s.add_term(f, mono, c);
        s
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &F::Elem)> {
        self.terms.iter()
    }

    pub fn coeff(&self, f: &F, mono: &Monomial) -> F::Elem {
        self.terms.get(mono).cloned().unwrap_or_else(|| f.zero())
    }

    pub fn add_term(&mut self, f: &F, mono: Monomial, c: F::Elem) {
        assert_eq!(mono.degree(), self.degree, "inhomogeneous term");
        if f.is_zero(&c) {
            return;
        }
        match self.terms.get_mut(&mono) {
            Some(v) => {
                let s = f.add(v, &c);
                if f.is_zero(&s) {
                    self.terms.remove(&mono);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(mono, c);
            }
        }
    }

    pub fn add(&self, f: &F, o: &Self) -> Self {
        assert_eq!((self.m, self.degree), (o.m, o.degree));
        let mut s = self.clone();
        for (k, c) in &o.terms {
            s.add_term(f, k.clone(), c.clone());
        }
        s
    }

    pub fn sub(&self, f: &F, o: &Self) -> Self {
        self.add(f, &o.scale(f, &f.neg(&f.one())))
    }

    pub fn scale(&self, f: &F, c: &F::Elem) -> Self {
        let mut s = SymElement::zero(self.m, self.degree);
        for (k, v) in &self.terms {
            s.add_term(f, k.clone(), f.mul(c, v));
        }
        s
    }

    pub fn mul(&self, f: &F, o: &Self) -> Self {
        assert_eq!(self.m, o.m);
        let mut s = SymElement::zero(self.m, self.degree + o.degree);
        for (a, x) in &self.terms {
            for (b, y) in &o.terms {
                s.add_term(f, a.mul(b), f.mul(x, y));
            }
        }
        s
    }

    /// Coordinates in the graded-lex monomial basis of Sym^degree.
    pub fn to_vector(&self, f: &F) -> Vec<F::Elem> {
        monomials(self.m, self.degree)
            .iter()
            .map(|mo| self.coeff(f, mo))
            .collect()
    }

    pub fn from_vector(f: &F, m: usize, degree: usize, v: &[F::Elem]) -> Self {
        let mut s = SymElement::zero(m, degree);
        for (mo, c) in monomials(m, degree).into_iter().zip(v) {
            s.add_term(f, mo, c.clone());
        }
        s
    }
}

/// Σ g_jk ∂_j ∂_k applied to `x`.
pub fn contract<F: Field>(f: &F, gram: &Matrix<F::Elem>, x: &SymElement<F>) -> SymElement<F> {
    let m = x.m;
    if x.degree < 2 {
        return SymElement::zero(m, 0);
    }
    let mut out = SymElement::zero(m, x.degree - 2);
    for (mono, c) in &x.terms {
        for j in 0..m {
            for k in 0..m {
                let g = gram.get(j, k);
                if f.is_zero(g) {
                    continue;
                }
                let aj = mono.exps[j];
                let ak = if j == k { mono.exps[k].saturating_sub(1) } else { mono.exps[k] };
                if aj == 0 || ak == 0 {
                    continue;
                }
                let mut e = mono.exps.clone();
                e[j] -= 1;
                e[k] -= 1;
                let w = f.mul(&f.from_int((aj * ak) as i64), &f.mul(g, c));
                out.add_term(f, Monomial::new(e), w);
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Full,
    Harmonic,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymError {
    #[error("degree {degree} exceeds the top degree {top}")]
    DegreeTooHigh { degree: usize, top: usize },
    #[error("harmonic mode needs dim >= 3, got {0}")]
    HarmonicDimTooSmall(usize),
    #[error("top degree must be at least 1")]
    TopTooSmall,
    #[error("form matrix is not square, symmetric and invertible")]
    BadForm,
    #[error("x^n vanished for a nonzero x: the nondegeneracy theorem failed")]
    PowerVanished,
    #[error("element lives in a space of dimension {got}, algebra has {expected}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Sym*(V) or Sym*₊(V) truncated at degree `top`, over the field `F`, with
/// the form given by its Gram matrix.
pub struct SymAlgebra<F: Field> {
    field: F,
    gram: Matrix<F::Elem>,
    b: SymElement<F>,
    mode: Mode,
    top: usize,
    // inverse of Λ∘b on Sym^(i−2), indexed by i
    solvers: Vec<OnceLock<Matrix<F::Elem>>>,
}

impl<F: Field> SymAlgebra<F> {
    pub fn new(field: F, gram: Matrix<F::Elem>, mode: Mode, top: usize) -> Result<Self, SymError> {
        if top < 1 {
            return Err(SymError::TopTooSmall);
        }
        if !gram.is_square() {
            return Err(SymError::BadForm);
        }
        let m = gram.rows();
        if gram != gram.transpose() {
            return Err(SymError::BadForm);
        }
        let inv = linalg::inverse(&field, &gram).ok_or(SymError::BadForm)?;
        if mode == Mode::Harmonic && m < 3 {
            return Err(SymError::HarmonicDimTooSmall(m));
        }
        let b = bivector_from_inverse(&field, &inv);
        Ok(SymAlgebra {
            field,
            gram,
            b,
            mode,
            top,
            solvers: (0..=top).map(|_| OnceLock::new()).collect(),
        })
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn gram(&self) -> &Matrix<F::Elem> {
        &self.gram
    }

    /// The dual bivector b.
    pub fn bivector(&self) -> &SymElement<F> {
        &self.b
    }

    fn check(&self, x: &SymElement<F>) -> Result<(), SymError> {
        if x.m != self.dim() {
            return Err(SymError::DimensionMismatch {
                expected: self.dim(),
                got: x.m,
            });
        }
        if x.degree > self.top {
            return Err(SymError::DegreeTooHigh {
                degree: x.degree,
                top: self.top,
            });
        }
        Ok(())
    }

    pub fn contract(&self, x: &SymElement<F>) -> SymElement<F> {
        contract(&self.field, &self.gram, x)
    }

    fn solver(&self, i: usize) -> &Matrix<F::Elem> {
        self.solvers[i].get_or_init(|| {
            let f = &self.field;
            let m = self.dim();
            let basis = monomials(m, i - 2);
            let cols: Vec<Vec<F::Elem>> = basis
                .iter()
                .map(|mo| {
                    let y = SymElement::monomial(f, mo.clone(), f.one());
                    self.contract(&self.b.mul(f, &y)).to_vector(f)
                })
                .collect();
            let mat = Matrix::from_columns(&cols, basis.len());
            linalg::inverse(f, &mat).expect("contraction after multiplication by b is invertible")
        })
    }

    /// The harmonic representative h with x = h + b·y and Λh = 0.
    pub fn harmonic_project(&self, x: &SymElement<F>) -> Result<SymElement<F>, SymError> {
        self.check(x)?;
        if x.degree < 2 {
            return Ok(x.clone());
        }
        let f = &self.field;
        let rhs = self.contract(x).to_vector(f);
        let y = linalg::mat_vec(f, self.solver(x.degree), &rhs);
        let y = SymElement::from_vector(f, self.dim(), x.degree - 2, &y);
        Ok(x.sub(f, &self.b.mul(f, &y)))
    }

    /// Product in the algebra: plain in Full mode, projected in Harmonic mode.
    pub fn multiply(&self, a: &SymElement<F>, c: &SymElement<F>) -> Result<SymElement<F>, SymError> {
        self.check(a)?;
        self.check(c)?;
        let p = a.mul(&self.field, c);
        self.check(&p)?;
        match self.mode {
            Mode::Full => Ok(p),
            Mode::Harmonic => self.harmonic_project(&p),
        }
    }

    /// Reduces an arbitrary homogeneous element to its normal form.
    pub fn normal_form(&self, x: &SymElement<F>) -> Result<SymElement<F>, SymError> {
        match self.mode {
            Mode::Full => {
                self.check(x)?;
                Ok(x.clone())
            }
            Mode::Harmonic => self.harmonic_project(x),
        }
    }

    /// xⁿ for n = top; nonzero whenever x ≠ 0.
    pub fn power_top(&self, x: &[F::Elem]) -> Result<SymElement<F>, SymError> {
        let f = &self.field;
        if x.len() != self.dim() {
            return Err(SymError::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        let lin = SymElement::linear(f, x);
        let mut p = SymElement::constant(f, self.dim(), f.one());
        for _ in 0..self.top {
            p = p.mul(f, &lin);
        }
        let p = self.normal_form(&p)?;
        if p.is_zero() && !lin.is_zero() {
            return Err(SymError::PowerVanished);
        }
        Ok(p)
    }

    /// Dimension of degree i of the algebra.
    pub fn graded_dim(&self, i: usize) -> u64 {
        match self.mode {
            Mode::Full => sym_dim(self.dim(), i as i64),
            Mode::Harmonic => harm_dim(self.dim(), i as i64),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rational::{frac, rat};
    use crate::exactmath::{Rational, Rationals};

    fn ident(m: usize) -> Matrix<Rational> {
        linalg::identity(&Rationals, m)
    }

    #[test]
    fn dimension_formulas() {
        assert_eq!(sym_dim(4, 0), 1);
        assert_eq!(sym_dim(3, 2), 6);
        assert_eq!(sym_dim(5, 4), 70);
        assert_eq!(monomials(5, 4).len(), 70);
        assert_eq!(sym_decompose_dims(3, 2), vec![5, 1]);
        assert_eq!(sym_decompose_dims(3, 4), vec![9, 5, 1]);
        assert_eq!(harm_dim(4, 3), 16);
        assert_eq!(harm_dim(7, 0), 1);
        assert_eq!(harm_dim(7, 1), 7);
        for i in 0..6 {
            assert_eq!(harm_dim(3, i), 2 * i as u64 + 1);
        }
    }

    #[test]
    fn graded_lex_order() {
        let ms: Vec<String> = monomials(3, 2).iter().map(|m| m.to_string()).collect();
        assert_eq!(ms, ["e1^2", "e1*e2", "e1*e3", "e2^2", "e2*e3", "e3^2"]);
    }

    #[test]
    fn projection_examples() {
        let f = Rationals;
        let alg = SymAlgebra::new(f, ident(3), Mode::Harmonic, 4).unwrap();
        assert!(alg.harmonic_project(alg.bivector()).unwrap().is_zero());
        let e1 = SymElement::linear(&f, &[rat(1), rat(0), rat(0)]);
        assert_eq!(alg.harmonic_project(&e1).unwrap(), e1);
        let sq = alg.multiply(&e1, &e1).unwrap();
        let mut want = SymElement::zero(3, 2);
        want.add_term(&f, Monomial::pair(3, 0, 0), frac(2, 3));
        want.add_term(&f, Monomial::pair(3, 1, 1), frac(-1, 3));
        want.add_term(&f, Monomial::pair(3, 2, 2), frac(-1, 3));
        assert_eq!(sq, want);
        let e2 = SymElement::linear(&f, &[rat(0), rat(1), rat(0)]);
        assert_eq!(
            alg.multiply(&e1, &e2).unwrap(),
            SymElement::monomial(&f, Monomial::pair(3, 0, 1), rat(1))
        );
    }

    #[test]
    fn degree_limits() {
        let f = Rationals;
        let alg = SymAlgebra::new(f, ident(3), Mode::Harmonic, 2).unwrap();
        let e1 = SymElement::linear(&f, &[rat(1), rat(0), rat(0)]);
        let sq = e1.mul(&f, &e1);
        assert!(matches!(alg.multiply(&sq, &e1), Err(SymError::DegreeTooHigh { .. })));
        assert!(matches!(
            SymAlgebra::new(f, ident(2), Mode::Harmonic, 2),
            Err(SymError::HarmonicDimTooSmall(2))
        ));
    }

    #[test]
    fn isotropic_power_survives() {
        let f = Rationals;
        let g = Matrix::from_fn(3, 3, |i, j| {
            if i != j {
                rat(0)
            } else if i == 2 {
                rat(-1)
            } else {
                rat(1)
            }
        });
        let alg = SymAlgebra::new(f, g, Mode::Harmonic, 2).unwrap();
        let p = alg.power_top(&[rat(1), rat(0), rat(1)]).unwrap();
        assert!(!p.is_zero());
        assert!(alg.power_top(&[rat(0), rat(0), rat(0)]).unwrap().is_zero());
    }
}
