//! Number fields ℚ[x]/(f) and their elements.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

use num_traits::{One, Zero};
use thiserror::Error;

use super::embed::{isolate_roots, ComplexEmbedding};
use super::factor::{find_factor, MAX_FACTOR_DEGREE};
use super::field::Field;
use super::linalg::MatrixQ;
use super::poly::QPoly;
use super::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumberFieldError {
    #[error("defining polynomial {0} is not monic")]
    NotMonic(QPoly),
    #[error("defining polynomial {poly} is reducible: it has the factor {factor}")]
    Reducible { poly: QPoly, factor: QPoly },
    #[error("defining polynomial has degree {0}, the limit is {MAX_FACTOR_DEGREE}")]
    DegreeTooLarge(usize),
    #[error("defining polynomial must have degree at least 1")]
    Constant,
}

struct Inner {
    poly: QPoly,
    degree: usize,
    embeddings: OnceLock<Vec<ComplexEmbedding>>,
}

/// ℚ[x]/(f) for a monic irreducible f. Cheap to clone.
#[derive(Clone)]
pub struct NumberField {
    inner: Arc<Inner>,
}

impl fmt::Debug for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NumberField({})", self.inner.poly)
    }
}

impl PartialEq for NumberField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.poly == other.inner.poly
    }
}

impl Eq for NumberField {}

impl NumberField {
    /// Validates `f` (monic, 1 ≤ deg ≤ 16, irreducible) and builds the field.
    pub fn new(f: QPoly) -> Result<Self, NumberFieldError> {
        let degree = match f.degree() {
            None | Some(0) => return Err(NumberFieldError::Constant),
            Some(d) => d,
        };
        if degree > MAX_FACTOR_DEGREE {
            return Err(NumberFieldError::DegreeTooLarge(degree));
        }
        if !f.is_monic() {
            return Err(NumberFieldError::NotMonic(f));
        }
        if let Some(factor) = find_factor(&f) {
            return Err(NumberFieldError::Reducible { poly: f, factor });
        }
        Ok(NumberField {
            inner: Arc::new(Inner {
                poly: f,
                degree,
                embeddings: OnceLock::new(),
            }),
        })
    }

    /// ℚ presented as ℚ[x]/(x).
    pub fn rationals() -> Self {
        NumberField::new(QPoly::x()).expect("x is irreducible")
    }

    pub fn poly(&self) -> &QPoly {
        &self.inner.poly
    }

    pub fn degree(&self) -> usize {
        self.inner.degree
    }

    /// All complex embeddings: real ones first in increasing order, then
    /// conjugate pairs with the upper half-plane member first.
    pub fn embeddings(&self) -> &[ComplexEmbedding] {
        self.inner
            .embeddings
            .get_or_init(|| isolate_roots(&self.inner.poly))
    }

    pub fn embedding(&self, i: usize) -> &ComplexEmbedding {
        &self.embeddings()[i]
    }

    /// The class of x.
    pub fn gen(&self) -> FieldElement {
        self.from_poly(&QPoly::x())
    }

    pub fn element(&self, coords: Vec<Rational>) -> FieldElement {
        assert!(coords.len() <= self.degree(), "too many power-basis coordinates");
        let mut coords = coords;
        coords.resize(self.degree(), Rational::zero());
        FieldElement {
            field: self.clone(),
            coords,
        }
    }

    /// Reduces an arbitrary polynomial modulo the defining polynomial.
    pub fn from_poly(&self, p: &QPoly) -> FieldElement {
        let r = p.rem(self.poly());
        let mut coords = r.coeffs().to_vec();
        coords.resize(self.degree(), Rational::zero());
        FieldElement {
            field: self.clone(),
            coords,
        }
    }

    /// Matrix of multiplication by x in the power basis (columns are images).
    pub fn companion(&self) -> MatrixQ {
        let e = self.degree();
        let f = self.poly();
        MatrixQ::from_fn(e, e, |i, j| {
            if j + 1 < e {
                if i == j + 1 {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            } else {
                -f.coeff(i)
            }
        })
    }
}

/// An element of a number field in power-basis coordinates.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElement {
    field: NumberField,
    coords: Vec<Rational>,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.as_poly())
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_poly())
    }
}

impl FieldElement {
    pub fn field(&self) -> &NumberField {
        &self.field
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn as_poly(&self) -> QPoly {
        QPoly::new(self.coords.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    /// The rational value when the element lies in ℚ.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.coords.iter().skip(1).all(|c| c.is_zero()) {
            Some(self.coords[0].clone())
        } else {
            None
        }
    }

    fn check(&self, o: &FieldElement) {
        assert!(self.field == o.field, "elements of different number fields");
    }

    /// Inverse via the extended Euclidean algorithm; `None` for zero.
    pub fn inv(&self) -> Option<FieldElement> {
        if self.is_zero() {
            return None;
        }
        let (mut r0, mut r1) = (self.field.poly().clone(), self.as_poly());
        let (mut s0, mut s1) = (QPoly::zero(), QPoly::one());
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            let s = &s0 - &(&q * &s1);
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        // r0 is a nonzero constant since f is irreducible.
        debug_assert_eq!(r0.degree(), Some(0));
        let c = r0.leading().recip();
        Some(self.field.from_poly(&s0.scale(&c)))
    }

    pub fn pow(&self, k: u32) -> FieldElement {
        let mut acc = self.field.from_poly(&QPoly::one());
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn scale(&self, r: &Rational) -> FieldElement {
        FieldElement {
            field: self.field.clone(),
            coords: self.coords.iter().map(|c| c * r).collect(),
        }
    }

    /// Matrix of multiplication by `self` in the power basis.
    pub fn mul_matrix(&self) -> MatrixQ {
        let e = self.field.degree();
        let mut cols = Vec::with_capacity(e);
        let mut b = self.clone();
        let x = self.field.gen();
        for _ in 0..e {
            cols.push(b.coords.clone());
            b = &b * &x;
        }
        MatrixQ::from_columns(&cols, e)
    }

    pub fn trace(&self) -> Rational {
        let m = self.mul_matrix();
        (0..m.rows()).map(|i| m.get(i, i).clone()).sum()
    }
}

impl Add for &FieldElement {
    type Output = FieldElement;
    fn add(self, o: &FieldElement) -> FieldElement {
        self.check(o);
        FieldElement {
            field: self.field.clone(),
            coords: self.coords.iter().zip(&o.coords).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &FieldElement {
    type Output = FieldElement;
    fn sub(self, o: &FieldElement) -> FieldElement {
        self.check(o);
        FieldElement {
            field: self.field.clone(),
            coords: self.coords.iter().zip(&o.coords).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &FieldElement {
    type Output = FieldElement;
    fn mul(self, o: &FieldElement) -> FieldElement {
        self.check(o);
        self.field.from_poly(&(&self.as_poly() * &o.as_poly()))
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement {
            field: self.field.clone(),
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }
}

impl Field for NumberField {
    type Elem = FieldElement;

    fn zero(&self) -> FieldElement {
        self.element(Vec::new())
    }
    fn one(&self) -> FieldElement {
        self.element(vec![Rational::one()])
    }
    fn from_rational(&self, r: &Rational) -> FieldElement {
        self.element(vec![r.clone()])
    }
    fn is_zero(&self, a: &FieldElement) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        a + b
    }
    fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        a - b
    }
    fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        a * b
    }
    fn neg(&self, a: &FieldElement) -> FieldElement {
        -a
    }
    fn inv(&self, a: &FieldElement) -> Option<FieldElement> {
        a.inv()
    }
    fn scale(&self, r: &Rational, a: &FieldElement) -> FieldElement {
        a.scale(r)
    }
}
