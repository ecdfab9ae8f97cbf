//! Sparse multivariate polynomials over ℚ.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use super::poly::write_terms;
use super::rational::Rational;

/// Σ c_α t^α in `nvars` variables; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl MPoly {
    pub fn zero(nvars: usize) -> Self {
        MPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = MPoly::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = MPoly::zero(nvars);
        p.add_term(e, Rational::one());
        p
    }

    /// Σ c_i t_i.
    pub fn linear(cs: &[Rational]) -> Self {
        let n = cs.len();
        let mut p = MPoly::zero(n);
        for (i, c) in cs.iter().enumerate() {
            let mut e = vec![0; n];
            e[i] = 1;
            p.add_term(e, c.clone());
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &[u32]) -> Rational {
        self.terms.get(e).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, e: Vec<u32>, c: Rational) {
        debug_assert_eq!(e.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        let v = self.terms.entry(e.clone()).or_insert_with(Rational::zero);
        *v += c;
        if v.is_zero() {
            self.terms.remove(&e);
        }
    }

    /// Total degree; `None` for zero.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|e| e.iter().sum::<u32>());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|x| x == d),
        }
    }

    pub fn add(&self, o: &MPoly) -> MPoly {
        let mut p = self.clone();
        for (e, c) in &o.terms {
            p.add_term(e.clone(), c.clone());
        }
        p
    }

    pub fn sub(&self, o: &MPoly) -> MPoly {
        self.add(&o.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> MPoly {
        let mut p = MPoly::zero(self.nvars);
        for (e, v) in &self.terms {
            p.add_term(e.clone(), v * c);
        }
        p
    }

    pub fn mul(&self, o: &MPoly) -> MPoly {
        let mut p = MPoly::zero(self.nvars);
        for (a, x) in &self.terms {
            for (b, y) in &o.terms {
                let e = a.iter().zip(b).map(|(i, j)| i + j).collect();
                p.add_term(e, x * y);
            }
        }
        p
    }

    pub fn pow(&self, k: u32) -> MPoly {
        let mut acc = MPoly::constant(self.nvars, Rational::one());
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .zip(x)
                    .fold(c.clone(), |acc, (&k, xi)| acc * num_traits::pow(xi.clone(), k as usize))
            })
            .sum()
    }

    /// p(L₁(s), …, L_n(s)) for linear forms L_i in `subs[i]` (each of length m).
    pub fn substitute_linear(&self, subs: &[Vec<Rational>]) -> MPoly {
        let m = subs.first().map_or(0, |s| s.len());
        let lin: Vec<MPoly> = subs.iter().map(|s| MPoly::linear(s)).collect();
        let mut out = MPoly::zero(m);
        for (e, c) in &self.terms {
            let mut t = MPoly::constant(m, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = t.mul(&lin[i].pow(k));
                }
            }
            out = out.add(&t);
        }
        out
    }

    /// Coefficients as a polynomial in variable `i`: entry k is the
    /// coefficient of t_i^k (a polynomial still in all variables, with t_i absent).
    pub fn coefficients_in(&self, i: usize) -> Vec<MPoly> {
        let mut out: Vec<MPoly> = Vec::new();
        for (e, c) in &self.terms {
            let k = e[i] as usize;
            if out.len() <= k {
                out.resize(k + 1, MPoly::zero(self.nvars));
            }
            let mut e2 = e.clone();
            e2[i] = 0;
            out[k].add_term(e2, c.clone());
        }
        out
    }
}

impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms.iter().rev().map(|(e, c)| {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| if k == 1 { format!("t{}", i + 1) } else { format!("t{}^{k}", i + 1) })
                .collect();
            (c, mono.join("*"))
        });
        write_terms(f, terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rational::rat;

    #[test]
    fn square_of_sum() {
        let p = MPoly::var(2, 0).add(&MPoly::var(2, 1));
        let q = p.pow(2);
        assert_eq!(q.coeff(&[1, 1]), rat(2));
        assert!(q.is_homogeneous());
        assert_eq!(q.eval(&[rat(2), rat(3)]), rat(25));
    }

    #[test]
    fn linear_substitution() {
        // t1*t2 with t1 = s1 + s2, t2 = s1 - s2 gives s1^2 - s2^2
        let p = MPoly::var(2, 0).mul(&MPoly::var(2, 1));
        let q = p.substitute_linear(&[vec![rat(1), rat(1)], vec![rat(1), rat(-1)]]);
        assert_eq!(q.coeff(&[2, 0]), rat(1));
        assert_eq!(q.coeff(&[0, 2]), rat(-1));
        assert_eq!(q.coeff(&[1, 1]), rat(0));
    }
}
