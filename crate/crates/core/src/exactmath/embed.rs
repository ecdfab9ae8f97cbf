//! Certified complex embeddings and sign decisions.
//!
//! Real roots are isolated with Sturm sequences. Non-real roots are isolated in
//! the upper half-plane by quadtree subdivision, counting roots in a rectangle
//! with the argument principle: along each edge f = P + iQ with P, Q ∈ ℚ[t],
//! and the winding number is −½ Σ Ind(Q/P), each Cauchy index being read off a
//! signed remainder sequence. Boxes are shrunk further by dyadic Newton steps,
//! certified by the inclusion disk |z − α| ≤ n·|f(z)/f′(z)|. Everything is
//! exact; floating point is never consulted.
//!
//! Sign questions about values v(α) (and more generally about expressions in
//! α and ᾱ) are settled by interval evaluation on shrinking root boxes. An
//! exact zero is detected with a lower bound on the nonzero eigenvalues of
//! Σ c_ab C^a ⊗ C^b, whose spectrum contains every value Σ c_ab σ(x)^a τ(x)^b.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use super::interval::{ComplexInterval, Interval};
use super::linalg::{charpoly, MatrixQ};
use super::numfield::{FieldElement, NumberField};
use super::poly::QPoly;
use super::rational::{ceil_dyadic, floor_dyadic, frac, pow2, rat, Rational};

/// Starting precision (bits) for sign certification.
pub const DEFAULT_PRECISION: u32 = 64;

const MAX_PRECISION: u32 = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    fn from_ordering(o: Ordering) -> Sign {
        match o {
            Ordering::Less => Sign::Negative,
            Ordering::Equal => Sign::Zero,
            Ordering::Greater => Sign::Positive,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Sign::Negative => "negative",
            Sign::Zero => "zero",
            Sign::Positive => "positive",
        }
    }
}

/// What [`certified_sign`] is asked to decide.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignTarget {
    /// Sign of Re σ(v).
    RealPart,
    /// σ(v) is claimed to be real; certify that and return its sign.
    RealValue,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignError {
    #[error("value is not real at embedding {0}: its imaginary part is certified nonzero")]
    NotRealValued(usize),
    #[error("precision limit reached without separating from zero")]
    PrecisionExhausted,
}

/// One complex embedding of a number field, given by an isolating box around
/// the image of the generator.
pub struct ComplexEmbedding {
    index: usize,
    root_box: ComplexInterval,
    is_real: bool,
    conjugate_index: usize,
    poly: QPoly,
    refined: Mutex<ComplexInterval>,
}

impl Clone for ComplexEmbedding {
    fn clone(&self) -> Self {
        ComplexEmbedding {
            index: self.index,
            root_box: self.root_box.clone(),
            is_real: self.is_real,
            conjugate_index: self.conjugate_index,
            poly: self.poly.clone(),
            refined: Mutex::new(self.refined.lock().unwrap().clone()),
        }
    }
}

impl std::fmt::Debug for ComplexEmbedding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ComplexEmbedding")
            .field("index", &self.index)
            .field("root_box", &self.root_box)
            .field("is_real", &self.is_real)
            .field("conjugate_index", &self.conjugate_index)
            .finish()
    }
}

impl PartialEq for ComplexEmbedding {
    fn eq(&self, o: &Self) -> bool {
        self.index == o.index && self.root_box == o.root_box && self.poly == o.poly
    }
}

impl ComplexEmbedding {
    pub fn index(&self) -> usize {
        self.index
    }

    /// The isolating rectangle found at construction.
    pub fn root_box(&self) -> &ComplexInterval {
        &self.root_box
    }

    pub fn is_real(&self) -> bool {
        self.is_real
    }

    pub fn conjugate_index(&self) -> usize {
        self.conjugate_index
    }

    /// True when the root lies in the upper half-plane.
    pub fn is_upper(&self) -> bool {
        self.root_box.im.lo.is_positive()
    }

    /// A box around the root of width at most 2^-bits in each direction.
    pub fn refined_box(&self, bits: u32) -> ComplexInterval {
        let target = pow2(-(bits as i64));
        let mut cache = self.refined.lock().unwrap();
        if cache.re.width() <= target && cache.im.width() <= target {
            return cache.clone();
        }
        let b = if self.is_real {
            refine_real(&self.poly, &cache, &target)
        } else if self.is_upper() {
            refine_complex(&self.poly, &self.root_box, &cache, bits)
        } else {
            refine_complex(&self.poly, &self.root_box.conj(), &cache.conj(), bits).conj()
        };
        *cache = b.clone();
        b
    }
}

// ---------------------------------------------------------------------------
// Sturm sequences and real roots

fn sturm_sequence(p: &QPoly) -> Vec<QPoly> {
    let mut seq = vec![p.clone(), p.derivative()];
    while !seq.last().unwrap().is_zero() {
        let n = seq.len();
        let r = seq[n - 2].rem(&seq[n - 1]);
        seq.push(-&r);
    }
    seq.pop();
    seq
}

fn sign_of(r: &Rational) -> i8 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}

fn variations(seq: &[QPoly], x: &Rational) -> usize {
    let mut last = 0i8;
    let mut v = 0;
    for p in seq {
        let s = sign_of(&p.eval(x));
        if s != 0 {
            if last != 0 && s != last {
                v += 1;
            }
            last = s;
        }
    }
    v
}

fn squarefree_part(p: &QPoly) -> QPoly {
    let g = p.gcd(&p.derivative());
    p.divrem(&g).0.monic()
}

/// Number of distinct real roots of `p` in the closed interval [a, b].
pub fn count_real_roots(p: &QPoly, a: &Rational, b: &Rational) -> usize {
    if p.is_zero() || p.degree() == Some(0) || a > b {
        return 0;
    }
    let sf = squarefree_part(p);
    let seq = sturm_sequence(&sf);
    let inner = variations(&seq, a) - variations(&seq, b);
    inner + usize::from(sf.eval(a).is_zero())
}

/// Cauchy bound rounded up to a power of two, plus one so that boxes of this
/// radius have roots strictly inside.
fn root_radius(f: &QPoly) -> Rational {
    let lc = f.leading();
    let m = f
        .coeffs()
        .iter()
        .map(|c| (c / &lc).abs())
        .fold(Rational::zero(), |a, b| if b > a { b } else { a });
    let bound = m + rat(1);
    let mut r = rat(1);
    while r <= bound {
        r *= rat(2);
    }
    r * rat(2)
}

fn isolate_real(f: &QPoly, radius: &Rational) -> Vec<Interval> {
    let seq = sturm_sequence(f);
    let mut out = Vec::new();
    let mut stack = vec![(-radius.clone(), radius.clone())];
    while let Some((a, b)) = stack.pop() {
        // roots in (a, b]; a is never a root
        let n = variations(&seq, &a) - variations(&seq, &b);
        if n == 0 {
            continue;
        }
        if f.eval(&b).is_zero() && n == 1 {
            out.push(Interval::point(b));
            continue;
        }
        if n == 1 {
            out.push(Interval::new(a, b));
            continue;
        }
        let mut m = (&a + &b) / rat(2);
        let w = &b - &a;
        let mut j = 1;
        while f.eval(&m).is_zero() {
            m = (&a + &b) / rat(2) + &w * frac(j, 64);
            j += 1;
        }
        stack.push((m.clone(), b));
        stack.push((a, m));
    }
    out.sort_by(|x, y| x.lo.cmp(&y.lo));
    // Open-left intervals may have a root exactly at `hi`; keep them closed.
    out
}

fn refine_real(f: &QPoly, b: &ComplexInterval, target: &Rational) -> ComplexInterval {
    let (mut lo, mut hi) = (b.re.lo.clone(), b.re.hi.clone());
    if lo == hi {
        return b.clone();
    }
    if f.eval(&hi).is_zero() {
        return ComplexInterval::real(Interval::point(hi));
    }
    let s_hi = sign_of(&f.eval(&hi));
    while &(&hi - &lo) > target {
        let m = (&lo + &hi) / rat(2);
        let s = sign_of(&f.eval(&m));
        if s == 0 {
            return ComplexInterval::real(Interval::point(m));
        }
        if s == s_hi {
            hi = m;
        } else {
            lo = m;
        }
    }
    ComplexInterval::real(Interval::new(lo, hi))
}

// ---------------------------------------------------------------------------
// Root counting in rectangles

/// f(z0 + t·d) as (Re, Im) polynomials in t.
fn restrict(f: &QPoly, z0: (&Rational, &Rational), d: (&Rational, &Rational)) -> (QPoly, QPoly) {
    let u = QPoly::new(vec![z0.0.clone(), d.0.clone()]);
    let v = QPoly::new(vec![z0.1.clone(), d.1.clone()]);
    let (mut a, mut b) = (QPoly::zero(), QPoly::zero());
    for c in f.coeffs().iter().rev() {
        let na = &(&(&a * &u) - &(&b * &v)) + &QPoly::constant(c.clone());
        let nb = &(&a * &v) + &(&b * &u);
        a = na;
        b = nb;
    }
    (a, b)
}

fn segment_has_root(re: &QPoly, im: &QPoly) -> bool {
    let g = re.gcd(im);
    match g.degree() {
        None => true, // f identically zero on the line; impossible for f ≠ 0
        Some(0) => false,
        Some(_) => count_real_roots(&g, &Rational::zero(), &Rational::one()) > 0,
    }
}

fn cauchy_index(p: &QPoly, q: &QPoly) -> i64 {
    if q.is_zero() {
        return 0;
    }
    let mut seq = vec![p.clone(), q.clone()];
    loop {
        let n = seq.len();
        let r = seq[n - 2].rem(&seq[n - 1]);
        if r.is_zero() {
            break;
        }
        seq.push(-&r);
    }
    variations(&seq, &Rational::zero()) as i64 - variations(&seq, &Rational::one()) as i64
}

#[derive(Clone, Debug)]
struct Rect {
    x0: Rational,
    x1: Rational,
    y0: Rational,
    y1: Rational,
}

impl Rect {
    fn corners(&self) -> [(Rational, Rational); 4] {
        [
            (self.x0.clone(), self.y0.clone()),
            (self.x1.clone(), self.y0.clone()),
            (self.x1.clone(), self.y1.clone()),
            (self.x0.clone(), self.y1.clone()),
        ]
    }
}

/// Number of roots of f inside `r`, whose boundary must be root-free.
fn count_in_rect(f: &QPoly, r: &Rect) -> usize {
    let cs = r.corners();
    let mut edges = Vec::with_capacity(4);
    for k in 0..4 {
        let (a, b) = (&cs[k], &cs[(k + 1) % 4]);
        let d = (&b.0 - &a.0, &b.1 - &a.1);
        edges.push(restrict(f, (&a.0, &a.1), (&d.0, &d.1)));
    }
    debug_assert!(edges.iter().all(|(p, q)| !segment_has_root(p, q)));
    // Rotate by (1 + k·i) so that no corner value is purely imaginary.
    let mut k = 0i64;
    let rotated = loop {
        let kk = rat(k);
        let rot: Vec<(QPoly, QPoly)> = edges
            .iter()
            .map(|(p, q)| (p - &q.scale(&kk), &p.scale(&kk) + q))
            .collect();
        let ok = rot
            .iter()
            .all(|(p, _)| !p.eval(&Rational::zero()).is_zero() && !p.eval(&Rational::one()).is_zero());
        if ok {
            break rot;
        }
        k += 1;
    };
    let total: i64 = rotated.iter().map(|(p, q)| cauchy_index(p, q)).sum();
    debug_assert!(total <= 0 && total % 2 == 0);
    (-total / 2) as usize
}

fn vertical_clean(f: &QPoly, x: &Rational, y0: &Rational, y1: &Rational) -> bool {
    let d = y1 - y0;
    let (p, q) = restrict(f, (x, y0), (&Rational::zero(), &d));
    !segment_has_root(&p, &q)
}

fn horizontal_clean(f: &QPoly, y: &Rational, x0: &Rational, x1: &Rational) -> bool {
    let d = x1 - x0;
    let (p, q) = restrict(f, (x0, y), (&d, &Rational::zero()));
    !segment_has_root(&p, &q)
}

/// A cut point near the middle of [a, b] accepted by `clean`.
fn cut(a: &Rational, b: &Rational, clean: impl Fn(&Rational) -> bool) -> Rational {
    let mid = (a + b) / rat(2);
    let w = b - a;
    for j in 0..32i64 {
        let off = if j % 2 == 0 { j / 2 } else { -(j + 1) / 2 };
        let c = &mid + &w * frac(off, 64);
        if clean(&c) {
            return c;
        }
    }
    unreachable!("finitely many roots cannot block 32 distinct cuts")
}

/// Roots in the strip [x0,x1] × (0, y1].
fn count_in_strip(f: &QPoly, x0: &Rational, x1: &Rational, y1: &Rational) -> usize {
    let sym = Rect {
        x0: x0.clone(),
        x1: x1.clone(),
        y0: -y1.clone(),
        y1: y1.clone(),
    };
    let all = count_in_rect(f, &sym);
    let real = count_real_roots(f, x0, x1);
    (all - real) / 2
}

fn isolate_upper(f: &QPoly, radius: &Rational, pairs: usize) -> Vec<Rect> {
    enum Region {
        Strip(Rational, Rational, Rational),
        Box(Rect),
    }
    let mut out = Vec::new();
    if pairs == 0 {
        return out;
    }
    let mut stack = vec![(Region::Strip(-radius.clone(), radius.clone(), radius.clone()), pairs)];
    while let Some((region, n)) = stack.pop() {
        match region {
            Region::Strip(x0, x1, y1) => {
                let c = cut(&Rational::zero(), &y1, |c| horizontal_clean(f, c, &x0, &x1));
                let lower = count_in_strip(f, &x0, &x1, &c);
                if lower > 0 {
                    stack.push((Region::Strip(x0.clone(), x1.clone(), c.clone()), lower));
                }
                if n > lower {
                    let r = Rect { x0, x1, y0: c, y1 };
                    stack.push((Region::Box(r), n - lower));
                }
            }
            Region::Box(r) if n == 1 => out.push(r),
            Region::Box(r) => {
                let cx = cut(&r.x0, &r.x1, |c| vertical_clean(f, c, &r.y0, &r.y1));
                let cy = cut(&r.y0, &r.y1, |c| horizontal_clean(f, c, &r.x0, &r.x1));
                let quads = [
                    Rect { x0: r.x0.clone(), x1: cx.clone(), y0: r.y0.clone(), y1: cy.clone() },
                    Rect { x0: cx.clone(), x1: r.x1.clone(), y0: r.y0.clone(), y1: cy.clone() },
                    Rect { x0: r.x0.clone(), x1: cx.clone(), y0: cy.clone(), y1: r.y1.clone() },
                    Rect { x0: cx.clone(), x1: r.x1.clone(), y0: cy.clone(), y1: r.y1.clone() },
                ];
                let mut left = n;
                for (k, q) in quads.into_iter().enumerate() {
                    let m = if k == 3 { left } else { count_in_rect(f, &q) };
                    left -= m;
                    if m > 0 {
                        stack.push((Region::Box(q), m));
                    }
                }
            }
        }
    }
    out
}

fn refine_upper(f: &QPoly, b: &ComplexInterval, target: &Rational) -> ComplexInterval {
    let mut r = Rect {
        x0: b.re.lo.clone(),
        x1: b.re.hi.clone(),
        y0: b.im.lo.clone(),
        y1: b.im.hi.clone(),
    };
    while &(&r.x1 - &r.x0) > target || &(&r.y1 - &r.y0) > target {
        if &(&r.x1 - &r.x0) > target {
            let c = cut(&r.x0, &r.x1, |c| vertical_clean(f, c, &r.y0, &r.y1));
            let left = Rect { x1: c.clone(), ..r.clone() };
            if count_in_rect(f, &left) == 1 {
                r = left;
            } else {
                r.x0 = c;
            }
        }
        if &(&r.y1 - &r.y0) > target {
            let c = cut(&r.y0, &r.y1, |c| horizontal_clean(f, c, &r.x0, &r.x1));
            let bottom = Rect { y1: c.clone(), ..r.clone() };
            if count_in_rect(f, &bottom) == 1 {
                r = bottom;
            } else {
                r.y0 = c;
            }
        }
    }
    ComplexInterval {
        re: Interval::new(r.x0, r.x1),
        im: Interval::new(r.y0, r.y1),
    }
}

type Complex = (Rational, Rational);

/// f(z) and f'(z) by Horner's rule in exact complex rationals.
fn eval_with_derivative(f: &QPoly, z: &Complex) -> (Complex, Complex) {
    let zero = || (Rational::zero(), Rational::zero());
    let (mut v, mut d) = (zero(), zero());
    for c in f.coeffs().iter().rev() {
        // d = d·z + v, v = v·z + c
        d = (&d.0 * &z.0 - &d.1 * &z.1 + &v.0, &d.0 * &z.1 + &d.1 * &z.0 + &v.1);
        v = (&v.0 * &z.0 - &v.1 * &z.1 + c, &v.0 * &z.1 + &v.1 * &z.0);
    }
    (v, d)
}

/// Dyadic upper bound on √r for r ≥ 0.
fn sqrt_upper(r: &Rational, bits: u32) -> Rational {
    let scaled = ceil_dyadic(&(r * pow2(2 * bits as i64)), 0).to_integer();
    let s = scaled.sqrt() + BigInt::one();
    Rational::new(s, BigInt::one() << bits)
}

/// Newton iteration from the centre of `start`, rounded to dyadics. A disk of
/// radius n·|f(z)/f'(z)| around z always contains a root; once that disk is
/// inside the isolating box it contains the root of the box, and once its
/// radius is small enough the enclosing square is returned.
fn newton_box(f: &QPoly, isolating: &ComplexInterval, start: &ComplexInterval, bits: u32) -> Option<ComplexInterval> {
    let n = Rational::from_integer(f.degree()?.into());
    let full = bits + 24;
    let target = pow2(-(bits as i64) - 1);
    let mut z: Complex = ((&start.re.lo + &start.re.hi) / rat(2), (&start.im.lo + &start.im.hi) / rat(2));
    // working precision doubles until it reaches `full`
    let mut prec = 32.min(full);
    for _ in 0..(2 * (bits.max(8) as usize).ilog2() as usize + 64) {
        let (v, d) = eval_with_derivative(f, &z);
        let dn = &d.0 * &d.0 + &d.1 * &d.1;
        if dn.is_zero() {
            return None;
        }
        if prec == full {
            let vn = &v.0 * &v.0 + &v.1 * &v.1;
            let r = sqrt_upper(&(&n * &n * &vn / &dn), full);
            let sq = ComplexInterval {
                re: Interval::new(&z.0 - &r, &z.0 + &r),
                im: Interval::new(&z.1 - &r, &z.1 + &r),
            };
            let inside = isolating.re.lo <= sq.re.lo
                && sq.re.hi <= isolating.re.hi
                && isolating.im.lo <= sq.im.lo
                && sq.im.hi <= isolating.im.hi;
            if inside && r <= target {
                return Some(sq);
            }
        }
        // z − v/d = z − v·conj(d)/|d|²
        let q = ((&v.0 * &d.0 + &v.1 * &d.1) / &dn, (&v.1 * &d.0 - &v.0 * &d.1) / &dn);
        z = (floor_dyadic(&(&z.0 - &q.0), prec), floor_dyadic(&(&z.1 - &q.1), prec));
        // raise the precision once the iteration has settled at the current one
        let small = pow2(-(prec as i64) / 2);
        if q.0.abs() <= small && q.1.abs() <= small {
            prec = (2 * prec).min(full);
        }
    }
    None
}

/// Shrinks the box around an upper-half-plane root to width 2^-bits. Newton
/// is tried from the current box; when it does not certify, the box is
/// bisected a few times exactly and Newton is retried.
fn refine_complex(f: &QPoly, isolating: &ComplexInterval, current: &ComplexInterval, bits: u32) -> ComplexInterval {
    let target = pow2(-(bits as i64));
    let mut b = current.clone();
    loop {
        if b.re.width() <= target && b.im.width() <= target {
            return b;
        }
        if let Some(nb) = newton_box(f, isolating, &b, bits) {
            return nb;
        }
        let w = if b.re.width() > b.im.width() { b.re.width() } else { b.im.width() };
        let step = &w / rat(16);
        b = refine_upper(f, &b, if step > target { &step } else { &target });
    }
}

/// Isolates every complex root of a square-free polynomial and pairs the
/// embeddings under complex conjugation.
pub fn isolate_roots(f: &QPoly) -> Vec<ComplexEmbedding> {
    let f = f.monic();
    assert!(f.is_squarefree(), "root isolation needs a square-free polynomial");
    let n = f.degree().unwrap();
    let radius = root_radius(&f);
    let reals = isolate_real(&f, &radius);
    let pairs = (n - reals.len()) / 2;
    let mut uppers = isolate_upper(&f, &radius, pairs);
    uppers.sort_by(|a, b| a.x0.cmp(&b.x0).then_with(|| a.y0.cmp(&b.y0)));

    let mut out = Vec::with_capacity(n);
    let mk = |index, root_box: ComplexInterval, is_real, conjugate_index| ComplexEmbedding {
        index,
        refined: Mutex::new(root_box.clone()),
        root_box,
        is_real,
        conjugate_index,
        poly: f.clone(),
    };
    for iv in reals {
        let i = out.len();
        out.push(mk(i, ComplexInterval::real(iv), true, i));
    }
    for r in uppers {
        let i = out.len();
        let b = ComplexInterval {
            re: Interval::new(r.x0, r.x1),
            im: Interval::new(r.y0, r.y1),
        };
        out.push(mk(i, b.clone(), false, i + 1));
        out.push(mk(i + 1, b.conj(), false, i));
    }
    debug_assert_eq!(out.len(), n);
    out
}

// ---------------------------------------------------------------------------
// Expressions in σ(x) and its conjugate

/// Σ c_ab αᵃ ᾱᵇ where α = σ(x) for the generator x; exponents are reduced
/// below the field degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairExpr {
    field: NumberField,
    terms: BTreeMap<(usize, usize), Rational>,
}

impl PairExpr {
    pub fn zero(field: &NumberField) -> Self {
        PairExpr {
            field: field.clone(),
            terms: BTreeMap::new(),
        }
    }

    /// σ(v).
    pub fn of(v: &FieldElement) -> Self {
        let mut e = PairExpr::zero(v.field());
        for (a, c) in v.coords().iter().enumerate() {
            if !c.is_zero() {
                e.terms.insert((a, 0), c.clone());
            }
        }
        e
    }

    /// The complex conjugate of σ(v).
    pub fn of_conj(v: &FieldElement) -> Self {
        PairExpr::of(v).swap()
    }

    pub fn is_trivially_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Exchanges the roles of α and ᾱ, i.e. complex conjugation.
    pub fn swap(&self) -> Self {
        PairExpr {
            field: self.field.clone(),
            terms: self.terms.iter().map(|(&(a, b), c)| ((b, a), c.clone())).collect(),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (k, c) in &o.terms {
            let e = terms.entry(*k).or_insert_with(Rational::zero);
            *e += c;
            if e.is_zero() {
                terms.remove(k);
            }
        }
        PairExpr {
            field: self.field.clone(),
            terms,
        }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        if r.is_zero() {
            return PairExpr::zero(&self.field);
        }
        PairExpr {
            field: self.field.clone(),
            terms: self.terms.iter().map(|(k, c)| (*k, c * r)).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&rat(-1)))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let e = self.field.degree();
        // powers x^k reduced mod f, for k < 2e - 1
        let pw: Vec<Vec<Rational>> = (0..2 * e)
            .map(|k| self.field.from_poly(&QPoly::monomial(Rational::one(), k)).coords().to_vec())
            .collect();
        let mut terms: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
        for ((a1, b1), c1) in &self.terms {
            for ((a2, b2), c2) in &o.terms {
                let c = c1 * c2;
                let (ra, rb) = (&pw[a1 + a2], &pw[b1 + b2]);
                for (i, x) in ra.iter().enumerate() {
                    if x.is_zero() {
                        continue;
                    }
                    for (j, y) in rb.iter().enumerate() {
                        if y.is_zero() {
                            continue;
                        }
                        *terms.entry((i, j)).or_insert_with(Rational::zero) += &c * x * y;
                    }
                }
            }
        }
        terms.retain(|_, c| !c.is_zero());
        PairExpr {
            field: self.field.clone(),
            terms,
        }
    }

    /// Interval enclosure of the value at `emb`, using a root box of width 2^-bits.
    pub fn enclose(&self, emb: &ComplexEmbedding, bits: u32) -> ComplexInterval {
        let z = emb.refined_box(bits);
        let w = z.conj();
        let prec = 2 * bits + 16;
        let e = self.field.degree();
        let mut zp = vec![ComplexInterval::from_rational(&Rational::one())];
        let mut wp = zp.clone();
        for k in 1..e {
            zp.push(zp[k - 1].mul(&z, prec));
            wp.push(wp[k - 1].mul(&w, prec));
        }
        let mut acc = ComplexInterval::zero();
        for ((a, b), c) in &self.terms {
            acc = acc.add(&zp[*a].mul(&wp[*b], prec).scale(c, prec), prec);
        }
        acc
    }

    /// Positive lower bound on |value| whenever the value is nonzero.
    fn separation_bound(&self) -> Rational {
        let e = self.field.degree();
        let c = self.field.companion();
        let mut cp = vec![crate::exactmath::linalg::identity(&crate::exactmath::field::Rationals, e)];
        for k in 1..e {
            cp.push(crate::exactmath::linalg::mat_mul(&crate::exactmath::field::Rationals, &cp[k - 1], &c));
        }
        let n = e * e;
        let mut m = MatrixQ::filled(n, n, Rational::zero());
        for ((a, b), coef) in &self.terms {
            let (x, y) = (&cp[*a], &cp[*b]);
            for i1 in 0..e {
                for j1 in 0..e {
                    let xv = x.get(i1, j1);
                    if xv.is_zero() {
                        continue;
                    }
                    for i2 in 0..e {
                        for j2 in 0..e {
                            let yv = y.get(i2, j2);
                            if yv.is_zero() {
                                continue;
                            }
                            let (r, s) = (i1 * e + i2, j1 * e + j2);
                            let v = m.get(r, s) + coef * xv * yv;
                            m.set(r, s, v);
                        }
                    }
                }
            }
        }
        let chi = charpoly(&m);
        let low = chi.coeffs().iter().position(|c| !c.is_zero()).unwrap();
        let g0 = chi.coeff(low).abs();
        let gmax = chi
            .coeffs()
            .iter()
            .skip(low + 1)
            .map(|c| c.abs())
            .fold(Rational::zero(), |a, b| if b > a { b } else { a });
        &g0 / (&g0 + gmax)
    }

    /// Decides whether the value at `emb` is exactly zero.
    pub fn is_zero_at(&self, emb: &ComplexEmbedding, start_bits: u32) -> Result<bool, SignError> {
        if self.terms.is_empty() {
            return Ok(true);
        }
        if emb.is_real() {
            // α = ᾱ, so the expression collapses to a field element.
            let mut p = QPoly::zero();
            for ((a, b), c) in &self.terms {
                p = &p + &QPoly::monomial(c.clone(), a + b);
            }
            return Ok(self.field.from_poly(&p).is_zero());
        }
        if self.terms.keys().all(|&(_, b)| b == 0) || self.terms.keys().all(|&(a, _)| a == 0) {
            return Ok(false);
        }
        let mut bound = None;
        let mut bits = start_bits.max(8);
        while bits <= MAX_PRECISION {
            let v = self.enclose(emb, bits);
            if v.re.sign().is_some() || v.im.sign().is_some() {
                return Ok(false);
            }
            if v.mag_bound() < *bound.get_or_insert_with(|| self.separation_bound()) {
                return Ok(true);
            }
            bits *= 2;
        }
        Err(SignError::PrecisionExhausted)
    }

    /// Signs of the real and imaginary parts of the value at `emb`, both
    /// certified (zero decided exactly).
    pub fn signs_at(&self, emb: &ComplexEmbedding, start_bits: u32) -> Result<(Sign, Sign), SignError> {
        let re = self.add(&self.swap()).scale(&frac(1, 2));
        // i·Im(value)
        let im_i = self.sub(&self.swap()).scale(&frac(1, 2));
        let re_zero = re.is_zero_at(emb, start_bits)?;
        let im_zero = emb.is_real() || im_i.is_zero_at(emb, start_bits)?;
        let mut bits = start_bits.max(8);
        loop {
            let v = self.enclose(emb, bits);
            let rs = if re_zero { Some(Sign::Zero) } else { v.re.sign().map(Sign::from_ordering) };
            let is = if im_zero { Some(Sign::Zero) } else { v.im.sign().map(Sign::from_ordering) };
            if let (Some(r), Some(i)) = (rs, is) {
                return Ok((r, i));
            }
            bits *= 2;
            if bits > MAX_PRECISION {
                return Err(SignError::PrecisionExhausted);
            }
        }
    }
}

/// Sign of σ(v) (when real) or of Re σ(v), with the precision at which the
/// answer was certified.
pub fn certified_sign_with_precision(
    v: &FieldElement,
    emb: &ComplexEmbedding,
    target: SignTarget,
    start_bits: u32,
) -> Result<(Sign, u32), SignError> {
    if v.is_zero() {
        return Ok((Sign::Zero, start_bits));
    }
    let expr = PairExpr::of(v);
    if !emb.is_real() {
        match target {
            SignTarget::RealValue => {
                let im_i = expr.sub(&expr.swap());
                if !im_i.is_zero_at(emb, start_bits)? {
                    return Err(SignError::NotRealValued(emb.index()));
                }
            }
            SignTarget::RealPart => {
                let re = expr.add(&expr.swap());
                if re.is_zero_at(emb, start_bits)? {
                    return Ok((Sign::Zero, start_bits));
                }
            }
        }
    }
    // The value (or its real part) is now known to be nonzero.
    let mut bits = start_bits.max(8);
    while bits <= MAX_PRECISION {
        if let Some(s) = expr.enclose(emb, bits).re.sign() {
            return Ok((Sign::from_ordering(s), bits));
        }
        bits *= 2;
    }
    Err(SignError::PrecisionExhausted)
}

pub fn certified_sign(v: &FieldElement, emb: &ComplexEmbedding, target: SignTarget) -> Result<Sign, SignError> {
    certified_sign_with_precision(v, emb, target, DEFAULT_PRECISION).map(|(s, _)| s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(cs: &[i64]) -> NumberField {
        NumberField::new(QPoly::from_ints(cs)).unwrap()
    }

    fn check_structure(k: &NumberField) {
        let es = k.embeddings();
        assert_eq!(es.len(), k.degree());
        let reals = es.iter().filter(|e| e.is_real()).count();
        let pairs = es.iter().filter(|e| !e.is_real()).count();
        assert_eq!(reals + pairs, k.degree());
        assert_eq!(pairs % 2, 0);
        for e in es {
            let c = &es[e.conjugate_index()];
            assert_eq!(c.conjugate_index(), e.index());
            assert_eq!(e.is_real(), c.index() == e.index());
        }
    }

    #[test]
    fn real_quadratic() {
        let k = field(&[-2, 0, 1]);
        check_structure(&k);
        assert!(k.embeddings().iter().all(|e| e.is_real()));
        let v = k.element(vec![rat(-1), rat(1)]);
        // x - 1 is negative at -√2 and positive at +√2.
        assert_eq!(certified_sign(&v, k.embedding(0), SignTarget::RealValue), Ok(Sign::Negative));
        assert_eq!(certified_sign(&v, k.embedding(1), SignTarget::RealValue), Ok(Sign::Positive));
    }

    #[test]
    fn gaussian() {
        let k = field(&[1, 0, 1]);
        check_structure(&k);
        assert!(k.embeddings().iter().all(|e| !e.is_real()));
        assert!(k.embedding(0).is_upper());
        let x = k.gen();
        assert_eq!(certified_sign(&x, k.embedding(0), SignTarget::RealPart), Ok(Sign::Zero));
        assert_eq!(
            certified_sign(&x, k.embedding(0), SignTarget::RealValue),
            Err(SignError::NotRealValued(0))
        );
        let one = k.element(vec![rat(1)]);
        let v = &(&one + &x) * &(&one - &x);
        assert_eq!(certified_sign(&v, k.embedding(1), SignTarget::RealValue), Ok(Sign::Positive));
    }

    #[test]
    fn cube_root_of_two() {
        let k = field(&[-2, 0, 0, 1]);
        check_structure(&k);
        assert_eq!(k.embeddings().iter().filter(|e| e.is_real()).count(), 1);
    }

    #[test]
    fn hermitian_norm_is_positive_and_real() {
        let k = field(&[1, 0, 1]);
        let v = k.element(vec![rat(2), rat(3)]);
        let e = PairExpr::of(&v).mul(&PairExpr::of_conj(&v));
        for emb in k.embeddings() {
            assert_eq!(e.signs_at(emb, 16), Ok((Sign::Positive, Sign::Zero)));
        }
    }

    #[test]
    fn counting_in_rectangles() {
        // roots ±i, ±2i of (x^2+1)(x^2+4)
        let f = QPoly::from_ints(&[4, 0, 5, 0, 1]);
        let r = Rect { x0: rat(-1), x1: rat(1), y0: frac(1, 2), y1: frac(3, 2) };
        assert_eq!(count_in_rect(&f, &r), 1);
        let r = Rect { x0: rat(-1), x1: rat(1), y0: rat(-3), y1: rat(3) };
        assert_eq!(count_in_rect(&f, &r), 4);
    }
}
