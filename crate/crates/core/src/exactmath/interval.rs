//! Closed intervals and rectangles with rational endpoints.
//!
//! Results of every operation are rounded outward to multiples of 2^-bits so
//! that endpoint sizes stay bounded while the enclosure property is kept.

use std::cmp::Ordering;

use num_traits::{Signed, Zero};

use super::rational::{ceil_dyadic, floor_dyadic, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    pub fn point(x: Rational) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn zero() -> Self {
        Interval::point(Rational::zero())
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// `Some` sign when the interval excludes 0.
    pub fn sign(&self) -> Option<Ordering> {
        if self.lo.is_positive() {
            Some(Ordering::Greater)
        } else if self.hi.is_negative() {
            Some(Ordering::Less)
        } else {
            None
        }
    }

    /// Largest absolute value of a point of the interval.
    pub fn mag(&self) -> Rational {
        let a = self.lo.abs();
        let b = self.hi.abs();
        if a > b {
            a
        } else {
            b
        }
    }

    fn round(self, bits: u32) -> Self {
        Interval {
            lo: floor_dyadic(&self.lo, bits),
            hi: ceil_dyadic(&self.hi, bits),
        }
    }

    pub fn add(&self, o: &Interval, bits: u32) -> Interval {
        Interval::new(&self.lo + &o.lo, &self.hi + &o.hi).round(bits)
    }

    pub fn sub(&self, o: &Interval, bits: u32) -> Interval {
        Interval::new(&self.lo - &o.hi, &self.hi - &o.lo).round(bits)
    }

    pub fn neg(&self) -> Interval {
        Interval::new(-&self.hi, -&self.lo)
    }

    pub fn mul(&self, o: &Interval, bits: u32) -> Interval {
        let ps = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        let lo = ps.iter().min().unwrap().clone();
        let hi = ps.iter().max().unwrap().clone();
        Interval::new(lo, hi).round(bits)
    }

    pub fn scale(&self, c: &Rational, bits: u32) -> Interval {
        self.mul(&Interval::point(c.clone()), bits)
    }
}

/// A rectangle [re] × [im] in the complex plane.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexInterval {
    pub re: Interval,
    pub im: Interval,
}

impl ComplexInterval {
    pub fn real(x: Interval) -> Self {
        ComplexInterval {
            re: x,
            im: Interval::zero(),
        }
    }

    pub fn from_rational(x: &Rational) -> Self {
        ComplexInterval::real(Interval::point(x.clone()))
    }

    pub fn zero() -> Self {
        ComplexInterval::real(Interval::zero())
    }

    pub fn conj(&self) -> Self {
        ComplexInterval {
            re: self.re.clone(),
            im: self.im.neg(),
        }
    }

    pub fn add(&self, o: &Self, bits: u32) -> Self {
        ComplexInterval {
            re: self.re.add(&o.re, bits),
            im: self.im.add(&o.im, bits),
        }
    }

    pub fn sub(&self, o: &Self, bits: u32) -> Self {
        ComplexInterval {
            re: self.re.sub(&o.re, bits),
            im: self.im.sub(&o.im, bits),
        }
    }

    pub fn mul(&self, o: &Self, bits: u32) -> Self {
        ComplexInterval {
            re: self.re.mul(&o.re, bits).sub(&self.im.mul(&o.im, bits), bits),
            im: self.re.mul(&o.im, bits).add(&self.im.mul(&o.re, bits), bits),
        }
    }

    pub fn scale(&self, c: &Rational, bits: u32) -> Self {
        ComplexInterval {
            re: self.re.scale(c, bits),
            im: self.im.scale(c, bits),
        }
    }

    /// Upper bound for |z| over the rectangle (by the 1-norm).
    pub fn mag_bound(&self) -> Rational {
        self.re.mag() + self.im.mag()
    }

    /// Horner evaluation of a rational polynomial (constant-first coefficients).
    pub fn eval_poly(coeffs: &[Rational], z: &Self, bits: u32) -> Self {
        let mut acc = ComplexInterval::zero();
        for c in coeffs.iter().rev() {
            acc = acc.mul(z, bits).add(&ComplexInterval::from_rational(c), bits);
        }
        acc
    }
}
