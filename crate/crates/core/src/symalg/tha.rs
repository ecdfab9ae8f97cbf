//! The transcendental Hodge algebra of a hyperkähler manifold, built from
//! (T, q, E, n): Sym*_E(T) in the CM case, Sym*₊,E(T) in the totally real case.

use num_traits::{One, Zero};
use thiserror::Error;

use super::{harm_dim, sym_dim, Mode, SymAlgebra, SymError};
use crate::exactmath::linalg::{self, mat_mul, Matrix, MatrixQ};
use crate::exactmath::{Field, FieldElement, MatrixF, NumberField, Rational, Rationals};
use crate::hodge::{Classification, EndFieldResult, K3Hodge};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ThaError {
    #[error("n must be at least 1")]
    NTooSmall,
    #[error("totally real case needs dim_E T >= 3 for the harmonic quotient, got {0}")]
    HarmonicDimTooSmall(usize),
    #[error("trace-form transfer check failed: {0}")]
    TransferFailed(&'static str),
    #[error(transparent)]
    Sym(#[from] SymError),
}

/// T as an E-vector space.
#[derive(Debug, Clone)]
pub struct EStructure {
    /// E-basis of T (rows, in T-coordinates).
    pub basis: MatrixQ,
    /// Columns p^k v_j (j-major, k < e): the ℚ-basis induced by the E-basis.
    pub change_of_basis: MatrixQ,
    /// Action of the primitive element on T.
    pub primitive_action: MatrixQ,
    pub field: NumberField,
    pub n_e: usize,
}

impl EStructure {
    /// E-coordinates of a vector of T (given in T-coordinates).
    pub fn e_coords(&self, w: &[Rational]) -> Vec<FieldElement> {
        let f = Rationals;
        let e = self.field.degree();
        let c = linalg::solve(&f, &self.change_of_basis, w)
            .particular
            .expect("change of basis is invertible");
        (0..self.n_e)
            .map(|j| self.field.element(c[j * e..(j + 1) * e].to_vec()))
            .collect()
    }

    /// The vector a·v_j of T, where a = Σ a_k p^k.
    pub fn element_times_basis(&self, a: &FieldElement, j: usize) -> Vec<Rational> {
        let e = self.field.degree();
        let t = self.change_of_basis.rows();
        let mut out = vec![Rational::zero(); t];
        for (k, c) in a.coords().iter().enumerate() {
            let col = self.change_of_basis.column(j * e + k);
            for i in 0..t {
                out[i] += c * &col[i];
            }
        }
        out
    }
}

/// Greedy E-basis: unit vectors of T in order, skipping those already in the
/// E-span of the chosen ones.
pub fn e_structure(h: &K3Hodge, ef: &EndFieldResult) -> EStructure {
    let f = Rationals;
    let t = h.dim_t();
    let e = ef.e;
    let p = &ef.primitive.matrix;
    let mut chosen: Vec<Vec<Rational>> = Vec::new();
    let mut cols: Vec<Vec<Rational>> = Vec::new();
    for i in 0..t {
        if cols.len() == t {
            break;
        }
        let mut v = vec![Rational::zero(); t];
        v[i] = Rational::one();
        let mut orbit = Vec::with_capacity(e);
        let mut w = v.clone();
        for _ in 0..e {
            orbit.push(w.clone());
            w = linalg::mat_vec(&f, p, &w);
        }
        let mut trial = cols.clone();
        trial.extend(orbit.iter().cloned());
        if linalg::rank(&f, &MatrixQ::from_rows(trial.clone(), t)) == trial.len() {
            chosen.push(v);
            cols = trial;
        }
    }
    debug_assert_eq!(cols.len(), t);
    EStructure {
        basis: MatrixQ::from_rows(chosen.clone(), t),
        change_of_basis: MatrixQ::from_columns(&cols, t),
        primitive_action: p.clone(),
        field: ef.field.clone(),
        n_e: chosen.len(),
    }
}

/// The E-bilinear form q_E on the E-structure with Tr_{E/ℚ} ∘ q_E = q|_T.
/// Needs every element of E to be q-self-adjoint (the totally real case).
pub fn trace_transfer(h: &K3Hodge, es: &EStructure) -> MatrixF {
    let k = &es.field;
    let e = k.degree();
    let g = h.gram_t();
    let f = Rationals;
    // trace form Tr(x^a x^b)
    let powers: Vec<FieldElement> = (0..e).map(|a| k.gen().pow(a as u32)).collect();
    let tr = MatrixQ::from_fn(e, e, |a, b| (&powers[a] * &powers[b]).trace());
    let n = es.n_e;
    let mut out = Matrix::filled(n, n, k.zero());
    for j in 0..n {
        for l in 0..n {
            // functional a ↦ q(a v_j, v_l) on the power basis, then c with Tr(x^a c) = that
            let vl = es.element_times_basis(&k.one(), l);
            let rhs: Vec<Rational> = powers
                .iter()
                .map(|pa| {
                    let w = es.element_times_basis(pa, j);
                    crate::qforms::bilinear(&f, g, &w, &vl)
                })
                .collect();
            let c = linalg::solve(&f, &tr, &rhs).particular.expect("trace form is nondegenerate");
            out.set(j, l, k.element(c));
        }
    }
    out
}

/// Checks that E-linear q-skew endomorphisms of T are q_E-skew, i.e. that
/// so_E(q|_T) preserves the transferred form.
pub fn transfer_is_invariant(h: &K3Hodge, es: &EStructure, q_e: &MatrixF) -> bool {
    let f = Rationals;
    let t = h.dim_t();
    let g = h.gram_t();
    let p = &es.primitive_action;
    let n = t * t;
    // X p − p X = 0 and Gx + XᵀG = 0 in the unknowns X_rc
    let mut rows = Vec::new();
    for a in 0..t {
        for b in 0..t {
            let mut r1 = vec![Rational::zero(); n];
            let mut r2 = vec![Rational::zero(); n];
            for c in 0..t {
                r1[a * t + c] += p.get(c, b);
                r1[c * t + b] -= p.get(a, c);
                r2[c * t + b] += g.get(a, c);
                r2[c * t + a] += g.get(c, b);
            }
            rows.push(r1);
            rows.push(r2);
        }
    }
    let ker = linalg::kernel(&f, &MatrixQ::from_rows(rows, n));
    let k = &es.field;
    let ne = es.n_e;
    for r in 0..ker.rows() {
        let x = MatrixQ::new(t, t, ker.row(r).to_vec());
        // E-matrix of X on the E-basis
        let cols: Vec<Vec<FieldElement>> = (0..ne)
            .map(|j| {
                let v = es.element_times_basis(&k.one(), j);
                es.e_coords(&linalg::mat_vec(&f, &x, &v))
            })
            .collect();
        let xe = Matrix::from_columns(&cols, ne);
        let lhs = mat_mul(k, &xe.transpose(), q_e);
        let rhs = mat_mul(k, q_e, &xe);
        let sum = linalg::mat_add(k, &lhs, &rhs);
        if !linalg::is_zero_matrix(k, &sum) {
            return false;
        }
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThaMode {
    FullE,
    HarmonicE,
}

impl ThaMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            ThaMode::FullE => "Full_E",
            ThaMode::HarmonicE => "Harmonic_E",
        }
    }
}

pub struct ThaResult {
    pub mode: ThaMode,
    pub n: usize,
    pub e: usize,
    pub n_e: usize,
    pub graded_dims_e: Vec<u64>,
    pub graded_dims_q: Vec<u64>,
    pub estructure: EStructure,
    /// q_E in the totally real case.
    pub form_e: Option<MatrixF>,
    /// Multiplication on the E-presentation.
    pub algebra: SymAlgebra<NumberField>,
}

pub fn build_tha(h: &K3Hodge, ef: &EndFieldResult, n: usize) -> Result<ThaResult, ThaError> {
    if n < 1 {
        return Err(ThaError::NTooSmall);
    }
    let es = e_structure(h, ef);
    let n_e = es.n_e;
    let e = ef.e;
    let k = es.field.clone();
    let (mode, form_e, algebra) = match ef.classification {
        Classification::Cm => {
            // Full mode never contracts, so the form is only a placeholder.
            let id = linalg::identity(&k, n_e);
            (ThaMode::FullE, None, SymAlgebra::new(k, id, Mode::Full, n)?)
        }
        Classification::TotallyReal => {
            if n_e < 3 {
                return Err(ThaError::HarmonicDimTooSmall(n_e));
            }
            let q_e = trace_transfer(h, &es);
            if !transfer_is_invariant(h, &es, &q_e) {
                return Err(ThaError::TransferFailed("so_E does not preserve q_E"));
            }
            let alg = SymAlgebra::new(k, q_e.clone(), Mode::Harmonic, n)?;
            (ThaMode::HarmonicE, Some(q_e), alg)
        }
    };
    let graded_dims_e: Vec<u64> = (0..=n)
        .map(|i| match mode {
            ThaMode::FullE => sym_dim(n_e, i as i64),
            ThaMode::HarmonicE => harm_dim(n_e, i as i64),
        })
        .collect();
    let graded_dims_q = graded_dims_e.iter().map(|d| d * e as u64).collect();
    Ok(ThaResult {
        mode,
        n,
        e,
        n_e,
        graded_dims_e,
        graded_dims_q,
        estructure: es,
        form_e,
        algebra,
    })
}
