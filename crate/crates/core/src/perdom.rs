//! The period domain {l : q(l,l) = 0, q(l, l̄) > 0}, transversality for
//! polynomial period paths, and the essential-dimension bounds.

use num_traits::Zero;
use rand::Rng;
use thiserror::Error;

use crate::exactmath::rational::rational_sqrt;
use crate::exactmath::{FieldElement, NumberField, QPoly, Rational};
use crate::hodge::{check_period_conditions, HodgeError, MtDescriptor, PeriodCertificate};
use crate::qforms::{diagonalize, QuadraticSpace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PerdomError {
    #[error("path has {got} coordinates, expected {expected}")]
    Shape { expected: usize, got: usize },
    #[error("path is identically zero")]
    ZeroPath,
    #[error("q(l(t), l(t)) = {} is not identically zero", .0.display_in("t"))]
    NotIsotropicPath(QPoly),
    #[error("Mumford-Tate rank {0} is below 2")]
    RankTooSmall(usize),
}

/// Certifies l ∈ Per(V, q) at the embedding `emb` of F, for any form q.
pub fn per_membership(
    space: &QuadraticSpace,
    field: &NumberField,
    emb: usize,
    l: &[FieldElement],
    precision: u32,
) -> Result<PeriodCertificate, HodgeError> {
    check_period_conditions(space, field, emb, l, precision)
}

/// A polynomial curve t ↦ ℓ(t) in V.
#[derive(Debug, Clone)]
pub struct PeriodPath {
    space: QuadraticSpace,
    coords: Vec<QPoly>,
}

impl PeriodPath {
    pub fn new(space: QuadraticSpace, coords: Vec<QPoly>) -> Result<Self, PerdomError> {
        if coords.len() != space.dim() {
            return Err(PerdomError::Shape {
                expected: space.dim(),
                got: coords.len(),
            });
        }
        if coords.iter().all(QPoly::is_zero) {
            return Err(PerdomError::ZeroPath);
        }
        Ok(PeriodPath { space, coords })
    }

    pub fn space(&self) -> &QuadraticSpace {
        &self.space
    }

    pub fn coords(&self) -> &[QPoly] {
        &self.coords
    }

    pub fn derivative(&self) -> Vec<QPoly> {
        self.coords.iter().map(QPoly::derivative).collect()
    }
}

/// Σ g_ij x_i y_j for polynomial vectors.
pub fn poly_form(space: &QuadraticSpace, x: &[QPoly], y: &[QPoly]) -> QPoly {
    let g = space.gram();
    let mut acc = QPoly::zero();
    for (i, xi) in x.iter().enumerate() {
        if xi.is_zero() {
            continue;
        }
        for (j, yj) in y.iter().enumerate() {
            let c = g.get(i, j);
            if !c.is_zero() && !yj.is_zero() {
                acc = &acc + &(xi * yj).scale(c);
            }
        }
    }
    acc
}

/// Checks q(ℓ, ℓ) ≡ 0, then returns whether q(ℓ, ℓ′) ≡ 0.
pub fn griffiths_check(path: &PeriodPath) -> Result<bool, PerdomError> {
    let iso = poly_form(&path.space, &path.coords, &path.coords);
    if !iso.is_zero() {
        return Err(PerdomError::NotIsotropicPath(iso));
    }
    let d = path.derivative();
    Ok(poly_form(&path.space, &path.coords, &d).is_zero())
}

fn constant_vec(v: &[Rational]) -> Vec<QPoly> {
    v.iter().map(|c| QPoly::constant(c.clone())).collect()
}

fn axpy(acc: &mut [QPoly], c: &QPoly, v: &[QPoly]) {
    for (a, x) in acc.iter_mut().zip(v) {
        *a = &*a + &(c * x);
    }
}

/// Eichler transformation x ↦ x + q(a,x)e − q(e,x)a − ½q(a,a)q(e,x)e for an
/// isotropic e and a(t) ⊥ e. It is q-orthogonal for each t.
pub fn eichler(space: &QuadraticSpace, e: &[Rational], a: &[QPoly], x: &[QPoly]) -> Vec<QPoly> {
    let ep = constant_vec(e);
    let qax = poly_form(space, a, x);
    let qex = poly_form(space, &ep, x);
    let qaa = poly_form(space, a, a);
    let half = Rational::new(1.into(), 2.into());
    let mut out = x.to_vec();
    axpy(&mut out, &qax, &ep);
    axpy(&mut out, &-&qex, a);
    axpy(&mut out, &-&(&qaa * &qex).scale(&half), &ep);
    out
}

/// A rational hyperbolic pair (e, f): q(e,e) = q(f,f) = 0, q(e,f) ≠ 0.
pub fn hyperbolic_pair(space: &QuadraticSpace) -> Option<(Vec<Rational>, Vec<Rational>)> {
    let (p, d) = diagonalize(space.gram());
    let m = space.dim();
    for i in 0..m {
        for j in i + 1..m {
            if let Some(r) = rational_sqrt(&(-&d[j] / &d[i])) {
                let e = (0..m).map(|k| &r * p.get(k, i) + p.get(k, j)).collect();
                let f = (0..m).map(|k| -&r * p.get(k, i) + p.get(k, j)).collect();
                return Some((e, f));
            }
        }
    }
    None
}

/// A polynomial vector in e^⊥ with small random coefficients and degree ≤ `degree`.
fn random_perp<R: Rng>(space: &QuadraticSpace, e: &[Rational], degree: usize, rng: &mut R) -> Vec<QPoly> {
    let m = space.dim();
    let lowered = space.lower(e);
    let pivot = lowered.iter().position(|x| !x.is_zero()).expect("e is nonzero");
    let mut coeffs: Vec<Vec<Rational>> = vec![Vec::new(); m];
    for _ in 0..=degree {
        let mut v: Vec<Rational> = (0..m).map(|_| Rational::from_integer(rng.gen_range(-3i64..=3).into())).collect();
        // project onto e^⊥ by solving for the pivot coordinate
        v[pivot] = Rational::zero();
        let s: Rational = v.iter().zip(&lowered).map(|(a, b)| a * b).sum();
        v[pivot] = -s / &lowered[pivot];
        for (c, x) in coeffs.iter_mut().zip(v) {
            c.push(x);
        }
    }
    coeffs.into_iter().map(QPoly::new).collect()
}

/// An isotropic polynomial path obtained by applying two random polynomial
/// Eichler transformations to a fixed isotropic vector. `None` when q has no
/// rational hyperbolic pair.
pub fn random_isotropic_path<R: Rng>(space: &QuadraticSpace, degree: usize, rng: &mut R) -> Option<PeriodPath> {
    let (e, f) = hyperbolic_pair(space)?;
    let a1 = random_perp(space, &e, degree, rng);
    let a2 = random_perp(space, &f, degree, rng);
    let x = eichler(space, &e, &a1, &constant_vec(&f));
    let x = eichler(space, &f, &a2, &x);
    PeriodPath::new(space.clone(), x).ok()
}

/// n_E − 2, the largest essential dimension compatible with dim_E T = n_E.
pub fn essential_dim_bound(n_e: u64) -> i64 {
    n_e as i64 - 2
}

/// Whether a family of essential dimension d can carry dim_E T = n_E, read as
/// n_E ≤ d + 2. The subvariety and torus bounds use the inequality the other
/// way round (n_E ≥ d + 2), which is where [`essential_dim_bound`] comes from;
/// the two agree exactly at n_E = d + 2.
pub fn check_family(n_e: u64, d: u64) -> bool {
    n_e <= d + 2
}

/// Dimension of the Mumford-Tate orbit of the period, n_E − 2 in both cases.
pub fn orbit_dimension(mt: &MtDescriptor) -> Result<usize, PerdomError> {
    if mt.rank < 2 {
        return Err(PerdomError::RankTooSmall(mt.rank));
    }
    Ok(mt.rank - 2)
}
