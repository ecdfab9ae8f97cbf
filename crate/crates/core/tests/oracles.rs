//! Independent oracles: brute-force factorization search, a floating-point
//! solver for Hodge endomorphisms, and brute-force harmonic dimensions.

use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};

use hodgekit_core::exactmath::factor::{factor, is_irreducible};
use hodgekit_core::exactmath::linalg::{self, MatrixQ};
use hodgekit_core::exactmath::{rat, Field, FieldElement, NumberField, QPoly, Rational, Rationals};
use hodgekit_core::hodge::{
    endomorphism_field, transcendental_lattice, validate_period, Classification, MtDescriptor, MtFamily,
    PeriodCandidate,
};
use hodgekit_core::qforms::QuadraticSpace;
use hodgekit_core::symalg::{build_tha, harm_dim, sym_dim};

/// Searches for a monic integer factor of degree `d` by matching coefficients of
/// (x^d + ...)(x^{n-d} + ...) with all coefficients in [-b, b].
fn brute_force_has_factor(p: &[i64], b: i64) -> bool {
    let n = p.len() - 1;
    let target = QPoly::from_ints(p);
    for d in 1..=n / 2 {
        let count = (2 * b + 1).pow(d as u32);
        for code in 0..count {
            let mut c = code;
            let mut cs: Vec<i64> = (0..d)
                .map(|_| {
                    let v = c % (2 * b + 1) - b;
                    c /= 2 * b + 1;
                    v
                })
                .collect();
            cs.push(1);
            let f = QPoly::from_ints(&cs);
            if target.rem(&f).is_zero() {
                return true;
            }
        }
    }
    false
}

#[test]
fn quartic_irreducibility_oracle() {
    // x^4 - x^2 - 1: a factor of a monic integer polynomial has coefficients
    // bounded by the Mignotte bound, well below 5 here.
    let p = [-1, 0, -1, 0, 1];
    assert!(!brute_force_has_factor(&p, 5));
    assert!(is_irreducible(&QPoly::from_ints(&p)));
    for p in [vec![1, 0, 0, 0, 1], vec![1, 0, 1], vec![-2, 0, 1], vec![1, 1, 1, 1, 1]] {
        assert_eq!(brute_force_has_factor(&p, 5), !is_irreducible(&QPoly::from_ints(&p)), "{p:?}");
    }
    for p in [vec![4, 0, 0, 0, 1], vec![-1, 0, 0, 0, 1], vec![6, 5, 1], vec![2, 3, 4, 2, 1]] {
        assert!(brute_force_has_factor(&p, 5));
        assert!(!is_irreducible(&QPoly::from_ints(&p)));
        let fs = factor(&QPoly::from_ints(&p));
        let prod = fs.iter().fold(QPoly::one(), |acc, f| &acc * f);
        assert_eq!(prod, QPoly::from_ints(&p));
    }
}

fn to_c(v: &FieldElement, emb: usize) -> Complex64 {
    let b = v.field().embedding(emb).refined_box(80);
    let mid = |lo: &Rational, hi: &Rational| ((lo + hi) / rat(2)).to_f64().unwrap();
    let r = v.as_poly();
    let x = Complex64::new(mid(&b.re.lo, &b.re.hi), mid(&b.im.lo, &b.im.hi));
    r.coeffs().iter().rev().fold(Complex64::zero(), |acc, c| acc * x + c.to_f64().unwrap())
}

fn conjugates(omega: &[FieldElement]) -> Vec<Vec<Complex64>> {
    (0..omega[0].field().degree())
        .map(|emb| omega.iter().map(|v| to_c(v, emb)).collect())
        .collect()
}

/// Reduced row echelon form with partial pivoting; returns (rref, pivot columns).
fn rref_c(mut a: Vec<Vec<Complex64>>, cols: usize) -> (Vec<Vec<Complex64>>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some((best, _)) = (r..a.len())
            .map(|i| (i, a[i][c].norm()))
            .filter(|(_, n)| *n > 1e-9)
            .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
        else {
            continue;
        };
        a.swap(r, best);
        let p = a[r][c];
        for x in a[r].iter_mut() {
            *x /= p;
        }
        for i in 0..a.len() {
            if i != r {
                let f = a[i][c];
                if f.norm() > 0.0 {
                    for j in 0..cols {
                        let v = a[r][j];
                        a[i][j] -= f * v;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == a.len() {
            break;
        }
    }
    (a, pivots)
}

fn kernel_c(a: Vec<Vec<Complex64>>, cols: usize) -> Vec<Vec<Complex64>> {
    let (r, piv) = rref_c(a, cols);
    (0..cols)
        .filter(|c| !piv.contains(c))
        .map(|free| {
            let mut v = vec![Complex64::zero(); cols];
            v[free] = Complex64::new(1.0, 0.0);
            for (row, &p) in piv.iter().enumerate() {
                v[p] = -r[row][free];
            }
            v
        })
        .collect()
}

/// Conditions XΩ ∈ ℂΩ and X V^{1,1} ⊆ V^{1,1} on real X, straight from the
/// Hodge decomposition at one embedding.
fn hodge_conditions(gram: &MatrixQ, omega: &[Complex64]) -> Vec<Vec<Complex64>> {
    let t = omega.len();
    let g: Vec<Vec<f64>> = (0..t).map(|i| (0..t).map(|j| gram.get(i, j).to_f64().unwrap()).collect()).collect();
    let lower = |w: &[Complex64]| -> Vec<Complex64> {
        (0..t).map(|a| (0..t).map(|b| w[b] * g[a][b]).sum()).collect()
    };
    let oc: Vec<Complex64> = omega.iter().map(|z| z.conj()).collect();
    let v11 = kernel_c(vec![lower(omega), lower(&oc)], t);
    // complex linear conditions on the t*t real unknowns X_ab
    let mut conds: Vec<Vec<Complex64>> = Vec::new();
    for i in 0..t {
        for j in i + 1..t {
            let mut row = vec![Complex64::zero(); t * t];
            for k in 0..t {
                row[i * t + k] += omega[k] * omega[j];
                row[j * t + k] -= omega[k] * omega[i];
            }
            conds.push(row);
        }
    }
    for v in &v11 {
        for target in [lower(omega), lower(&oc)] {
            let mut row = vec![Complex64::zero(); t * t];
            for a in 0..t {
                for b in 0..t {
                    row[a * t + b] += target[a] * v[b];
                }
            }
            conds.push(row);
        }
    }
    conds
}

/// dim_ℚ of the rational Hodge endomorphisms, solved in floating point. The
/// conditions at all conjugates of Ω together are defined over ℚ, so the real
/// solution space has the same dimension as the rational one.
fn float_endomorphism_dim(gram: &MatrixQ, omegas: &[Vec<Complex64>]) -> usize {
    let t = gram.rows();
    let mut real_rows = Vec::new();
    for r in omegas.iter().flat_map(|om| hodge_conditions(gram, om)) {
        real_rows.push(r.iter().map(|z| Complex64::new(z.re, 0.0)).collect());
        real_rows.push(r.iter().map(|z| Complex64::new(z.im, 0.0)).collect());
    }
    kernel_c(real_rows, t * t).len()
}

struct Example {
    gram: Vec<Rational>,
    field: Vec<i64>,
    omega: fn(&NumberField) -> Vec<FieldElement>,
}

fn zeta8_sqrt2(k: &NumberField) -> FieldElement {
    let x = k.gen();
    &x - &x.pow(3)
}

fn examples() -> Vec<Example> {
    vec![
        Example { gram: vec![rat(1), rat(1)], field: vec![1, 0, 1], omega: |k| vec![k.one(), k.gen()] },
        Example {
            gram: vec![rat(1), rat(1), rat(-1)],
            field: vec![1, 0, 0, 0, 1],
            omega: |k| vec![zeta8_sqrt2(k), k.gen().pow(2), k.one()],
        },
        Example {
            gram: vec![rat(1), rat(1), rat(-1), rat(-1)],
            field: vec![1, 0, 1],
            omega: |k| vec![k.one(), k.gen(), k.zero(), k.zero()],
        },
        Example {
            gram: vec![rat(1), rat(1), rat(-1), rat(-5)],
            field: vec![1, 0, 0, 0, 1],
            omega: |k| vec![zeta8_sqrt2(k), k.gen().pow(2), k.one(), k.zero()],
        },
        Example {
            gram: vec![rat(1), rat(1), rat(-1), rat(-1)],
            field: vec![1, 0, 0, 0, 1],
            omega: |k| {
                let x = k.gen();
                vec![k.one().scale(&rat(2)), &x + &x.pow(3), k.one(), k.one()]
            },
        },
    ]
}

#[test]
fn endomorphism_field_matches_float_solver() {
    for (n, ex) in examples().into_iter().enumerate() {
        let k = NumberField::new(QPoly::from_ints(&ex.field)).unwrap();
        let space = QuadraticSpace::diagonal(&ex.gram).unwrap();
        let omega = (ex.omega)(&k);
        let mut checked = 0;
        for emb in 0..k.degree() {
            let cand = PeriodCandidate { space: space.clone(), field: k.clone(), embedding: emb, omega: omega.clone() };
            let Ok(p) = validate_period(cand) else { continue };
            let h = transcendental_lattice(p).unwrap();
            let ef = endomorphism_field(&h).unwrap();
            assert_eq!(ef.e, float_endomorphism_dim(h.gram_t(), &conjugates(h.omega_t())), "example {n}, embedding {emb}");
            checked += 1;
        }
        assert!(checked > 0, "example {n} has no valid embedding");
    }
}

/// V = E² for E = ℚ(√2) with q(x, y) = Tr(√2 x·y), and Ω the σ₁-component of
/// (1, i). Besides E, the rotation (x₁, x₂) ↦ (−x₂, x₁) preserves Ω, so the
/// endomorphism field is ℚ(√2, i).
#[test]
fn real_quadratic_form_gains_cm() {
    let r = |x: i64| rat(x);
    let block = [[r(0), r(4)], [r(4), r(0)]];
    let gram = MatrixQ::from_fn(4, 4, |i, j| if i / 2 == j / 2 { block[i % 2][j % 2].clone() } else { r(0) });
    let space = QuadraticSpace::new(gram).unwrap();
    let k = NumberField::new(QPoly::from_ints(&[1, 0, 0, 0, 1])).unwrap();
    let s2 = zeta8_sqrt2(&k);
    let i = k.gen().pow(2);
    let omega = vec![s2.clone(), k.one(), &s2 * &i, i.clone()];
    let mut found = false;
    for emb in 0..4 {
        let cand = PeriodCandidate { space: space.clone(), field: k.clone(), embedding: emb, omega: omega.clone() };
        let Ok(p) = validate_period(cand) else { continue };
        found = true;
        let h = transcendental_lattice(p).unwrap();
        assert_eq!(h.dim_t(), 4);
        let ef = endomorphism_field(&h).unwrap();
        assert_eq!(float_endomorphism_dim(h.gram_t(), &conjugates(h.omega_t())), 4);
        assert_eq!(ef.e, 4);
        assert_eq!(ef.classification, Classification::Cm);
        assert_eq!(ef.mt, MtDescriptor { family: MtFamily::Unitary, rank: 1 });
        assert_eq!(ef.primitive.minpoly.degree(), Some(4));
        assert_eq!(ef.fixed_subalgebra.len(), 2);
        assert_eq!(build_tha(&h, &ef, 2).unwrap().graded_dims_q, vec![4, 4, 4]);
    }
    assert!(found);
}

/// Rank of Δ = Σ ∂ⱼ² from degree i to degree i − 2 on explicitly enumerated monomials.
fn brute_harm_dim(m: usize, i: usize) -> u64 {
    fn monos(m: usize, i: usize) -> Vec<Vec<u32>> {
        if m == 1 {
            return vec![vec![i as u32]];
        }
        (0..=i)
            .flat_map(|a| {
                monos(m - 1, i - a).into_iter().map(move |mut r| {
                    r.insert(0, a as u32);
                    r
                })
            })
            .collect()
    }
    let src = monos(m, i);
    if i < 2 {
        return src.len() as u64;
    }
    let dst = monos(m, i - 2);
    let mut mat = MatrixQ::from_fn(dst.len(), src.len(), |_, _| rat(0));
    for (c, e) in src.iter().enumerate() {
        for j in 0..m {
            if e[j] >= 2 {
                let mut f = e.clone();
                f[j] -= 2;
                let r = dst.iter().position(|d| *d == f).unwrap();
                let v = mat.get(r, c) + rat((e[j] * (e[j] - 1)) as i64);
                mat.set(r, c, v);
            }
        }
    }
    (src.len() - linalg::rank(&Rationals, &mat)) as u64
}

#[test]
fn harmonic_dimensions_brute_force() {
    for m in 3..=6 {
        for i in 0..=6 {
            assert_eq!(harm_dim(m, i as i64), brute_harm_dim(m, i), "m={m} i={i}");
            assert_eq!(sym_dim(m, i as i64), brute_harm_dim(m, i) + if i >= 2 { sym_dim(m, i as i64 - 2) } else { 0 });
        }
    }
}
