//! Factorization over ℚ for small degree.
//!
//! The polynomial is reduced to a primitive square-free integer polynomial,
//! factored modulo a single prime larger than twice the Mignotte bound
//! (distinct-degree followed by Cantor-Zassenhaus equal-degree splitting), and
//! the modular factors are recombined by subset search with exact trial
//! division over ℤ. Because the prime exceeds the coefficient bound no Hensel
//! lifting is needed.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::poly::QPoly;

/// Largest degree accepted by [`find_factor`] and [`factor`].
pub const MAX_FACTOR_DEGREE: usize = 16;

const SPLIT_SEED: u64 = 0x5eed_f00d;

/// A nontrivial monic factor of `f` over ℚ, or `None` when `f` is irreducible.
///
/// Constants and the zero polynomial have no factors. Panics if the degree
/// exceeds [`MAX_FACTOR_DEGREE`].
pub fn find_factor(f: &QPoly) -> Option<QPoly> {
    let n = f.degree()?;
    assert!(n <= MAX_FACTOR_DEGREE, "degree {n} exceeds the factorization limit");
    if n <= 1 {
        return None;
    }
    let g = f.gcd(&f.derivative());
    if g.degree().is_some_and(|d| d >= 1) {
        return Some(g);
    }
    let ints = f.primitive_integer();
    zassenhaus_split(&ints).map(|g| QPoly::from_bigints(&g).monic())
}

/// Complete factorization into monic irreducibles (with repetition), sorted by
/// degree and then coefficients, times the leading coefficient of `f`.
pub fn factor(f: &QPoly) -> Vec<QPoly> {
    let mut out = Vec::new();
    let mut stack = vec![f.monic()];
    while let Some(p) = stack.pop() {
        if p.degree().is_none_or(|d| d == 0) {
            continue;
        }
        match find_factor(&p) {
            None => out.push(p),
            Some(g) => {
                let (q, r) = p.divrem(&g);
                debug_assert!(r.is_zero());
                stack.push(g);
                stack.push(q.monic());
            }
        }
    }
    out.sort_by(|a, b| {
        a.degree()
            .cmp(&b.degree())
            .then_with(|| a.coeffs().cmp(b.coeffs()))
    });
    out
}

pub fn is_irreducible(f: &QPoly) -> bool {
    f.degree().is_some_and(|d| d >= 1) && find_factor(f).is_none()
}

/// Polynomials over 𝔽_p, constant-first, entries in [0, p).
#[derive(Clone, Debug, PartialEq, Eq)]
struct ModPoly(Vec<BigInt>);

struct PrimeField {
    p: BigInt,
}

impl PrimeField {
    fn reduce(&self, a: &BigInt) -> BigInt {
        a.mod_floor(&self.p)
    }

    fn norm(&self, mut v: Vec<BigInt>) -> ModPoly {
        for c in v.iter_mut() {
            *c = self.reduce(c);
        }
        while v.last().is_some_and(|c| c.is_zero()) {
            v.pop();
        }
        ModPoly(v)
    }

    fn inv(&self, a: &BigInt) -> BigInt {
        let e = self.p.extended_gcd(&self.reduce(a));
        debug_assert!(e.gcd.is_one());
        self.reduce(&e.y)
    }

    fn deg(a: &ModPoly) -> Option<usize> {
        a.0.len().checked_sub(1)
    }

    fn sub(&self, a: &ModPoly, b: &ModPoly) -> ModPoly {
        let n = a.0.len().max(b.0.len());
        let z = BigInt::zero();
        self.norm(
            (0..n)
                .map(|i| a.0.get(i).unwrap_or(&z) - b.0.get(i).unwrap_or(&z))
                .collect(),
        )
    }

    fn mul(&self, a: &ModPoly, b: &ModPoly) -> ModPoly {
        if a.0.is_empty() || b.0.is_empty() {
            return ModPoly(Vec::new());
        }
        let mut out = vec![BigInt::zero(); a.0.len() + b.0.len() - 1];
        for (i, x) in a.0.iter().enumerate() {
            for (j, y) in b.0.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        self.norm(out)
    }

    fn divrem(&self, a: &ModPoly, d: &ModPoly) -> (ModPoly, ModPoly) {
        let dd = Self::deg(d).expect("division by zero polynomial mod p");
        let lc_inv = self.inv(d.0.last().unwrap());
        let mut r = a.0.clone();
        if r.len() <= dd {
            return (ModPoly(Vec::new()), a.clone());
        }
        let mut q = vec![BigInt::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = self.reduce(&(&r[k + dd] * &lc_inv));
            if !c.is_zero() {
                for (j, dc) in d.0.iter().enumerate() {
                    r[k + j] = self.reduce(&(&r[k + j] - &c * dc));
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (self.norm(q), self.norm(r))
    }

    fn rem(&self, a: &ModPoly, d: &ModPoly) -> ModPoly {
        self.divrem(a, d).1
    }

    fn monic(&self, a: &ModPoly) -> ModPoly {
        match a.0.last() {
            None => a.clone(),
            Some(lc) => {
                let inv = self.inv(lc);
                self.norm(a.0.iter().map(|c| c * &inv).collect())
            }
        }
    }

    fn gcd(&self, a: &ModPoly, b: &ModPoly) -> ModPoly {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.0.is_empty() {
            let r = self.rem(&a, &b);
            a = b;
            b = r;
        }
        self.monic(&a)
    }

    fn powmod(&self, base: &ModPoly, exp: &BigUint, m: &ModPoly) -> ModPoly {
        let mut result = self.norm(vec![BigInt::one()]);
        let mut b = self.rem(base, m);
        let bits = exp.bits();
        for i in 0..bits {
            if exp.bit(i) {
                result = self.rem(&self.mul(&result, &b), m);
            }
            if i + 1 < bits {
                b = self.rem(&self.mul(&b, &b), m);
            }
        }
        result
    }

    fn derivative(&self, a: &ModPoly) -> ModPoly {
        self.norm(
            a.0.iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }
}

fn is_probable_prime(n: &BigInt) -> bool {
    let two = BigInt::from(2);
    if n < &two {
        return false;
    }
    const SMALL: [u32; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &SMALL {
        let p = BigInt::from(p);
        if n == &p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }
    let n_minus_1: BigInt = n - 1;
    let mut d = n_minus_1.clone();
    let mut s = 0u32;
    while d.is_even() {
        d >>= 1;
        s += 1;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(n.bits());
    let mut bases: Vec<BigInt> = SMALL.iter().map(|&b| BigInt::from(b)).collect();
    for _ in 0..8 {
        let k: u64 = rng.gen_range(2..u64::MAX);
        bases.push(BigInt::from(k) % (n - 3u32) + 2u32);
    }
    'outer: for a in bases {
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n_minus_1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Distinct-degree factorization of a monic square-free polynomial:
/// pairs (d, product of all irreducible factors of degree d).
fn distinct_degree(fp: &PrimeField, f: &ModPoly) -> Vec<(usize, ModPoly)> {
    let x = fp.norm(vec![BigInt::zero(), BigInt::one()]);
    let p = fp.p.to_biguint().unwrap();
    let mut out = Vec::new();
    let mut g = f.clone();
    let mut h = x.clone();
    let mut d = 0;
    while PrimeField::deg(&g).is_some_and(|n| n >= 2 * (d + 1)) {
        d += 1;
        h = fp.powmod(&h, &p, &g);
        let u = fp.gcd(&fp.sub(&h, &x), &g);
        if PrimeField::deg(&u).is_some_and(|n| n > 0) {
            g = fp.divrem(&g, &u).0;
            h = fp.rem(&h, &g);
            out.push((d, u));
        }
    }
    if PrimeField::deg(&g).is_some_and(|n| n > 0) {
        let n = PrimeField::deg(&g).unwrap();
        out.push((n, g));
    }
    out
}

fn equal_degree(fp: &PrimeField, u: &ModPoly, d: usize, rng: &mut ChaCha8Rng, out: &mut Vec<ModPoly>) {
    let n = PrimeField::deg(u).unwrap();
    if n == d {
        out.push(u.clone());
        return;
    }
    let exp: BigUint = (fp.p.to_biguint().unwrap().pow(d as u32) - 1u32) / 2u32;
    let one = fp.norm(vec![BigInt::one()]);
    loop {
        let a = fp.norm(
            (0..n)
                .map(|_| BigInt::from(rng.gen::<u64>()))
                .collect(),
        );
        if PrimeField::deg(&a).is_none_or(|k| k == 0) {
            continue;
        }
        let b = fp.sub(&fp.powmod(&a, &exp, u), &one);
        let g = fp.gcd(&b, u);
        let k = PrimeField::deg(&g).unwrap_or(0);
        if k > 0 && k < n {
            let h = fp.divrem(u, &g).0;
            equal_degree(fp, &g, d, rng, out);
            equal_degree(fp, &fp.monic(&h), d, rng, out);
            return;
        }
    }
}

fn symmetric(a: &BigInt, p: &BigInt) -> BigInt {
    let r = a.mod_floor(p);
    if &(&r * 2) > p {
        r - p
    } else {
        r
    }
}

fn int_divides(f: &[BigInt], g: &[BigInt]) -> Option<Vec<BigInt>> {
    // Exact division f / g over ℤ; None if it leaves a remainder or a fraction.
    let dg = g.len() - 1;
    if f.len() < g.len() {
        return None;
    }
    let lc = g.last().unwrap();
    let mut r = f.to_vec();
    let mut q = vec![BigInt::zero(); f.len() - dg];
    for k in (0..q.len()).rev() {
        let (c, rem) = r[k + dg].div_rem(lc);
        if !rem.is_zero() {
            return None;
        }
        if !c.is_zero() {
            for (j, gc) in g.iter().enumerate() {
                r[k + j] -= &c * gc;
            }
        }
        q[k] = c;
    }
    if r.iter().all(|c| c.is_zero()) {
        Some(q)
    } else {
        None
    }
}

fn primitive(v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    let mut v: Vec<BigInt> = if g.is_zero() { v } else { v.into_iter().map(|c| c / &g).collect() };
    if v.last().is_some_and(|c| c.is_negative()) {
        v = v.into_iter().map(|c| -c).collect();
    }
    v
}

/// Returns a nontrivial primitive factor of a primitive square-free integer
/// polynomial of degree ≥ 2, or `None` if it is irreducible.
fn zassenhaus_split(f: &[BigInt]) -> Option<Vec<BigInt>> {
    let n = f.len() - 1;
    let lc = f.last().unwrap().clone();
    let norm2 = f.iter().fold(BigInt::zero(), |acc, c| acc + c * c).sqrt() + 1;
    let bound = &lc * (BigInt::one() << n) * norm2;
    let mut p: BigInt = 2 * bound + 1;
    let fp = loop {
        if is_probable_prime(&p) && !(&lc % &p).is_zero() {
            let fp = PrimeField { p: p.clone() };
            let fm = fp.norm(f.to_vec());
            let g = fp.gcd(&fm, &fp.derivative(&fm));
            if PrimeField::deg(&g) == Some(0) {
                break fp;
            }
        }
        p += 1;
    };

    let fm = fp.monic(&fp.norm(f.to_vec()));
    let mut rng = ChaCha8Rng::seed_from_u64(SPLIT_SEED);
    let mut modular = Vec::new();
    for (d, u) in distinct_degree(&fp, &fm) {
        equal_degree(&fp, &u, d, &mut rng, &mut modular);
    }
    if modular.len() == 1 {
        return None;
    }
    // Deterministic order: by degree, then coefficients.
    modular.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));

    let r = modular.len();
    for size in 1..=r / 2 {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            let mut prod = fp.norm(vec![lc.clone()]);
            for &i in &idx {
                prod = fp.mul(&prod, &modular[i]);
            }
            let cand: Vec<BigInt> = prod.0.iter().map(|c| symmetric(c, &fp.p)).collect();
            let cand = primitive(cand);
            if cand.len() >= 2 && cand.len() <= n {
                let f0 = &f[0];
                let c0 = &cand[0];
                let plausible = if c0.is_zero() { f0.is_zero() } else { (f0 % c0).is_zero() };
                if plausible && int_divides(f, &cand).is_some() {
                    return Some(cand);
                }
            }
            // next combination
            let mut k = size;
            loop {
                if k == 0 {
                    break;
                }
                k -= 1;
                if idx[k] < r - size + k {
                    idx[k] += 1;
                    for j in k + 1..size {
                        idx[j] = idx[j - 1] + 1;
                    }
                    break;
                }
                if k == 0 {
                    k = usize::MAX;
                    break;
                }
            }
            if k == usize::MAX {
                break;
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_primes() {
        let primes: Vec<u32> = (0..60).filter(|&n| is_probable_prime(&BigInt::from(n))).collect();
        assert_eq!(
            primes,
            vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]
        );
        assert!(is_probable_prime(&BigInt::from(1_000_000_007u64)));
        assert!(!is_probable_prime(&(BigInt::from(1_000_000_007u64) * 998_244_353u64)));
    }

    #[test]
    fn irreducible_examples() {
        for cs in [
            &[1, 0, 1][..],
            &[-2, 0, 1],
            &[-2, 0, 0, 1],
            &[1, 0, 0, 0, 1],
            &[9, 0, -2, 0, 1],
            &[-1, 0, -1, 0, 1],
            &[1, 1, 1, 1, 1],
        ] {
            assert!(is_irreducible(&QPoly::from_ints(cs)), "{cs:?}");
        }
    }

    #[test]
    fn reducible_examples_give_true_factors() {
        for cs in [
            &[-1, 0, 1][..],
            &[4, 0, 0, 0, 1],      // x^4 + 4 = (x^2+2x+2)(x^2-2x+2)
            &[0, 0, 1, 0, -1, 0, 1], // x^2 (x^4 - x^2 + 1)
            &[-1, 0, 0, 0, 0, 0, 1],
            &[2, 0, 3, 0, 1],      // (x^2+1)(x^2+2)
        ] {
            let f = QPoly::from_ints(cs);
            let g = find_factor(&f).expect("reducible");
            let (_, r) = f.divrem(&g);
            assert!(r.is_zero());
            let d = g.degree().unwrap();
            assert!(d >= 1 && d < f.degree().unwrap());
        }
    }

    #[test]
    fn full_factorization_multiplies_back() {
        // (x^2 + 1)(x - 3)(x^3 - 2)
        let f = &(&QPoly::from_ints(&[1, 0, 1]) * &QPoly::from_ints(&[-3, 1]))
            * &QPoly::from_ints(&[-2, 0, 0, 1]);
        let fs = factor(&f);
        assert_eq!(fs.len(), 3);
        let prod = fs.iter().fold(QPoly::one(), |acc, g| &acc * g);
        assert_eq!(prod, f);
        assert!(fs.iter().all(is_irreducible));
    }

    #[test]
    fn degree_sixteen_swinnerton_dyer_like() {
        // x^16 + 1 is irreducible (cyclotomic Φ_32) but splits into many factors mod primes.
        let mut cs = vec![0i64; 17];
        cs[0] = 1;
        cs[16] = 1;
        assert!(is_irreducible(&QPoly::from_ints(&cs)));
    }
}
