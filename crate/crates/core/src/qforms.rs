//! Nondegenerate rational quadratic spaces.

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::exactmath::linalg::{self, det, inverse, kernel, mat_mul, MatrixQ};
use crate::exactmath::{Field, FieldElement, NumberField, Rational, Rationals};
use crate::symalg::{Monomial, SymElement};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QFormError {
    #[error("Gram matrix is {0}x{1}, not square")]
    NotSquare(usize, usize),
    #[error("Gram matrix is not symmetric at entry ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("Gram matrix is degenerate (determinant 0)")]
    Degenerate,
    #[error("Gram matrix is empty")]
    Empty,
    #[error("vector has length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Signature {
    pub positives: usize,
    pub negatives: usize,
}

/// (V, q) with V = ℚ^m and q given by a symmetric nondegenerate Gram matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticSpace {
    gram: MatrixQ,
    gram_inv: MatrixQ,
}

impl QuadraticSpace {
    pub fn new(gram: MatrixQ) -> Result<Self, QFormError> {
        if !gram.is_square() {
            return Err(QFormError::NotSquare(gram.rows(), gram.cols()));
        }
        if gram.rows() == 0 {
            return Err(QFormError::Empty);
        }
        check_symmetric(&gram)?;
        let gram_inv = inverse(&Rationals, &gram).ok_or(QFormError::Degenerate)?;
        Ok(QuadraticSpace { gram, gram_inv })
    }

    pub fn diagonal(entries: &[Rational]) -> Result<Self, QFormError> {
        let n = entries.len();
        QuadraticSpace::new(MatrixQ::from_fn(n, n, |i, j| {
            if i == j {
                entries[i].clone()
            } else {
                Rational::zero()
            }
        }))
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &MatrixQ {
        &self.gram
    }

    pub fn gram_inverse(&self) -> &MatrixQ {
        &self.gram_inv
    }

    /// q(v, w).
    pub fn form(&self, v: &[Rational], w: &[Rational]) -> Rational {
        bilinear(&Rationals, &self.gram, v, w)
    }

    /// q extended F-bilinearly.
    pub fn form_over(&self, k: &NumberField, v: &[FieldElement], w: &[FieldElement]) -> FieldElement {
        let g = self.gram.map(|x| k.from_rational(x));
        bilinear(k, &g, v, w)
    }

    /// The covector q(v, ·) = G·v.
    pub fn lower(&self, v: &[Rational]) -> Vec<Rational> {
        linalg::mat_vec(&Rationals, &self.gram, v)
    }

    /// Gram matrix of q restricted to the row span of `basis`.
    pub fn restrict(&self, basis: &MatrixQ) -> MatrixQ {
        let f = Rationals;
        mat_mul(&f, &mat_mul(&f, basis, &self.gram), &basis.transpose())
    }

    pub fn check_vector(&self, v: &[Rational]) -> Result<(), QFormError> {
        if v.len() != self.dim() {
            return Err(QFormError::DimensionMismatch {
                expected: self.dim(),
                got: v.len(),
            });
        }
        Ok(())
    }
}

fn check_symmetric(g: &MatrixQ) -> Result<(), QFormError> {
    for i in 0..g.rows() {
        for j in i + 1..g.cols() {
            if g.get(i, j) != g.get(j, i) {
                return Err(QFormError::NotSymmetric(i, j));
            }
        }
    }
    Ok(())
}

/// vᵀ G w over any field.
pub fn bilinear<F: Field>(f: &F, g: &linalg::Matrix<F::Elem>, v: &[F::Elem], w: &[F::Elem]) -> F::Elem {
    let gw = linalg::mat_vec(f, g, w);
    linalg::dot(f, v, &gw)
}

/// Congruence diagonalization of a symmetric matrix: returns (P, d) with
/// Pᵀ G P = diag(d). When no diagonal pivot is available but an off-diagonal
/// entry g_ij is, column i is replaced by e_i + e_j, making the pivot 2·g_ij.
pub fn diagonalize(g: &MatrixQ) -> (MatrixQ, Vec<Rational>) {
    let f = Rationals;
    let n = g.rows();
    let mut a = g.clone();
    let mut p = linalg::identity(&f, n);
    let mut d = Vec::with_capacity(n);
    for k in 0..n {
        if a.get(k, k).is_zero() {
            if let Some(i) = (k + 1..n).find(|&i| !a.get(i, i).is_zero()) {
                swap_sym(&mut a, &mut p, k, i);
            } else if let Some(j) = (k + 1..n).find(|&j| !a.get(k, j).is_zero()) {
                add_sym(&mut a, &mut p, k, j);
            } else if let Some((i, j)) = (k + 1..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| !a.get(i, j).is_zero())
            {
                add_sym(&mut a, &mut p, i, j);
                swap_sym(&mut a, &mut p, k, i);
            }
        }
        let piv = a.get(k, k).clone();
        d.push(piv.clone());
        if piv.is_zero() {
            continue;
        }
        for i in k + 1..n {
            let c = a.get(i, k) / &piv;
            if c.is_zero() {
                continue;
            }
            // column op: col_i -= c col_k; row op: row_i -= c row_k
            for r in 0..n {
                let v = a.get(r, i) - &c * a.get(r, k);
                a.set(r, i, v);
            }
            for s in 0..n {
                let v = a.get(i, s) - &c * a.get(k, s);
                a.set(i, s, v);
            }
            for r in 0..n {
                let v = p.get(r, i) - &c * p.get(r, k);
                p.set(r, i, v);
            }
        }
    }
    (p, d)
}

fn swap_sym(a: &mut MatrixQ, p: &mut MatrixQ, i: usize, j: usize) {
    let n = a.rows();
    for r in 0..n {
        let (x, y) = (a.get(r, i).clone(), a.get(r, j).clone());
        a.set(r, i, y);
        a.set(r, j, x);
        let (x, y) = (p.get(r, i).clone(), p.get(r, j).clone());
        p.set(r, i, y);
        p.set(r, j, x);
    }
    for s in 0..n {
        let (x, y) = (a.get(i, s).clone(), a.get(j, s).clone());
        a.set(i, s, y);
        a.set(j, s, x);
    }
}

/// col_i += col_j and row_i += row_j.
fn add_sym(a: &mut MatrixQ, p: &mut MatrixQ, i: usize, j: usize) {
    let n = a.rows();
    for r in 0..n {
        let v = a.get(r, i) + a.get(r, j);
        a.set(r, i, v);
        let v = p.get(r, i) + p.get(r, j);
        p.set(r, i, v);
    }
    for s in 0..n {
        let v = a.get(i, s) + a.get(j, s);
        a.set(i, s, v);
    }
}

pub fn signature_of(g: &MatrixQ) -> Signature {
    let (_, d) = diagonalize(g);
    Signature {
        positives: d.iter().filter(|x| x.is_positive()).count(),
        negatives: d.iter().filter(|x| x.is_negative()).count(),
    }
}

pub fn signature(q: &QuadraticSpace) -> Signature {
    signature_of(q.gram())
}

/// Canonical basis of {v : q(v, w) = 0 for all w in W}.
pub fn orth_complement(q: &QuadraticSpace, w: &MatrixQ) -> MatrixQ {
    let f = Rationals;
    if w.rows() == 0 {
        return linalg::identity(&f, q.dim());
    }
    kernel(&f, &mat_mul(&f, w, q.gram()))
}

/// The bivector b = Σ g^{jk} e_j e_k ∈ Sym²(V) dual to q, in monomial
/// coordinates: e_j² carries g^{jj} and e_j e_k (j < k) carries 2·g^{jk}.
pub fn dual_bivector(q: &QuadraticSpace) -> SymElement<Rationals> {
    bivector_from_inverse(&Rationals, q.gram_inverse())
}

pub fn bivector_from_inverse<F: Field>(f: &F, inv: &linalg::Matrix<F::Elem>) -> SymElement<F> {
    let m = inv.rows();
    let mut b = SymElement::zero(m, 2);
    for j in 0..m {
        for k in j..m {
            let c = if j == k {
                inv.get(j, j).clone()
            } else {
                f.add(inv.get(j, k), inv.get(k, j))
            };
            b.add_term(f, Monomial::pair(m, j, k), c);
        }
    }
    b
}

/// b(α, β) for covectors α, β, i.e. αᵀ G⁻¹ β.
pub fn bivector_pairing(q: &QuadraticSpace, alpha: &[Rational], beta: &[Rational]) -> Rational {
    bilinear(&Rationals, q.gram_inverse(), alpha, beta)
}

pub fn is_isotropic(q: &QuadraticSpace, v: &[Rational]) -> bool {
    q.form(v, v).is_zero()
}

pub fn determinant(q: &QuadraticSpace) -> Rational {
    det(&Rationals, q.gram())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rational::{frac, rat};

    fn diag(xs: &[i64]) -> QuadraticSpace {
        QuadraticSpace::diagonal(&xs.iter().map(|&x| rat(x)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn signatures() {
        assert_eq!(signature(&diag(&[1, 1, -1])), Signature { positives: 2, negatives: 1 });
        assert_eq!(signature(&diag(&[1, 1, 1, 1])), Signature { positives: 4, negatives: 0 });
        let h = QuadraticSpace::new(MatrixQ::from_rows(
            vec![vec![rat(0), rat(1)], vec![rat(1), rat(0)]],
            2,
        ))
        .unwrap();
        assert_eq!(signature(&h), Signature { positives: 1, negatives: 1 });
    }

    #[test]
    fn diagonalization_is_a_congruence() {
        let g = MatrixQ::from_rows(
            vec![
                vec![rat(0), rat(1), rat(2)],
                vec![rat(1), rat(0), rat(3)],
                vec![rat(2), rat(3), rat(0)],
            ],
            3,
        );
        let (p, d) = diagonalize(&g);
        let f = Rationals;
        let c = mat_mul(&f, &mat_mul(&f, &p.transpose(), &g), &p);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { d[i].clone() } else { rat(0) };
                assert_eq!(c.get(i, j), &want);
            }
        }
    }

    #[test]
    fn construction_errors() {
        let ns = MatrixQ::from_rows(vec![vec![rat(1), rat(2)], vec![rat(0), rat(1)]], 2);
        assert_eq!(QuadraticSpace::new(ns), Err(QFormError::NotSymmetric(0, 1)));
        let dg = MatrixQ::from_rows(vec![vec![rat(1), rat(1)], vec![rat(1), rat(1)]], 2);
        assert_eq!(QuadraticSpace::new(dg), Err(QFormError::Degenerate));
    }

    #[test]
    fn orthogonal_complements() {
        let q = diag(&[1, 1, -1]);
        let w = MatrixQ::from_rows(vec![vec![rat(1), rat(0), rat(0)]], 3);
        let c = orth_complement(&q, &w);
        assert_eq!(
            c.row_vecs(),
            vec![vec![rat(0), rat(1), rat(0)], vec![rat(0), rat(0), rat(1)]]
        );
        assert_eq!(orth_complement(&q, &MatrixQ::from_rows(vec![], 3)).rows(), 3);
        assert_eq!(orth_complement(&q, &linalg::identity(&Rationals, 3)).rows(), 0);
    }

    #[test]
    fn bivectors() {
        let b = dual_bivector(&diag(&[2]));
        assert_eq!(b.coeff(&Rationals, &Monomial::pair(1, 0, 0)), frac(1, 2));
        let h = QuadraticSpace::new(MatrixQ::from_rows(
            vec![vec![rat(0), rat(1)], vec![rat(1), rat(0)]],
            2,
        ))
        .unwrap();
        let b = dual_bivector(&h);
        assert_eq!(b.coeff(&Rationals, &Monomial::pair(2, 0, 1)), rat(2));
        assert_eq!(b.coeff(&Rationals, &Monomial::pair(2, 0, 0)), rat(0));
    }

    #[test]
    fn isotropy() {
        let q = diag(&[1, 1, -1]);
        assert!(is_isotropic(&q, &[rat(0), rat(0), rat(0)]));
        assert!(is_isotropic(&q, &[rat(1), rat(0), rat(1)]));
        assert!(!is_isotropic(&diag(&[1, 1]), &[rat(1), rat(-3)]));
    }
}
