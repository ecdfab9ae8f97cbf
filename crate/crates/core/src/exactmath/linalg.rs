//! Exact dense linear algebra over any [`Field`].
//!
//! Everything is Gauss-Jordan elimination on exact elements. Bases returned by
//! [`kernel`] and [`row_space`] are the nonzero rows of a reduced row-echelon
//! matrix (leading entry 1), so equal subspaces produce identical output.

use std::fmt;

use num_traits::Zero;

use super::field::{Field, Rationals};
use super::poly::QPoly;
use super::rational::Rational;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type MatrixQ = Matrix<Rational>;

impl<T: Clone> Matrix<T> {
    /// Row-major data; panics if the length does not match.
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data has wrong length");
        Matrix { rows, cols, data }
    }

    pub fn filled(rows: usize, cols: usize, value: T) -> Self {
        Matrix { rows, cols, data: vec![value; rows * cols] }
    }

    /// Panics on ragged input. An empty list gives a 0×`cols` matrix.
    pub fn from_rows(rows: Vec<Vec<T>>, cols: usize) -> Self {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged matrix rows");
            data.extend(row);
        }
        Matrix { rows: r, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    /// Columns given as vectors.
    pub fn from_columns(cols: &[Vec<T>], rows: usize) -> Self {
        Matrix::from_fn(rows, cols.len(), |i, j| cols[j][i].clone())
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Matrix::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[i * self.cols..(i + 1) * self.cols])?;
        }
        write!(f, "]")
    }
}

pub fn identity<F: Field>(f: &F, n: usize) -> Matrix<F::Elem> {
    Matrix::from_fn(n, n, |i, j| if i == j { f.one() } else { f.zero() })
}

pub fn zeros<F: Field>(f: &F, rows: usize, cols: usize) -> Matrix<F::Elem> {
    Matrix::filled(rows, cols, f.zero())
}

pub fn mat_mul<F: Field>(f: &F, a: &Matrix<F::Elem>, b: &Matrix<F::Elem>) -> Matrix<F::Elem> {
    assert_eq!(a.cols, b.rows, "matrix product shape mismatch");
    let mut out = zeros(f, a.rows, b.cols);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let aik = a.get(i, k);
            if f.is_zero(aik) {
                continue;
            }
            for j in 0..b.cols {
                let t = f.mul(aik, b.get(k, j));
                let cur = out.get(i, j);
                let s = f.add(cur, &t);
                out.set(i, j, s);
            }
        }
    }
    out
}

pub fn mat_vec<F: Field>(f: &F, a: &Matrix<F::Elem>, v: &[F::Elem]) -> Vec<F::Elem> {
    assert_eq!(a.cols, v.len(), "matrix-vector shape mismatch");
    (0..a.rows)
        .map(|i| dot(f, a.row(i), v))
        .collect()
}

pub fn dot<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> F::Elem {
    a.iter()
        .zip(b)
        .fold(f.zero(), |acc, (x, y)| f.add(&acc, &f.mul(x, y)))
}

pub fn mat_add<F: Field>(f: &F, a: &Matrix<F::Elem>, b: &Matrix<F::Elem>) -> Matrix<F::Elem> {
    assert!(a.rows == b.rows && a.cols == b.cols);
    Matrix::from_fn(a.rows, a.cols, |i, j| f.add(a.get(i, j), b.get(i, j)))
}

pub fn mat_sub<F: Field>(f: &F, a: &Matrix<F::Elem>, b: &Matrix<F::Elem>) -> Matrix<F::Elem> {
    assert!(a.rows == b.rows && a.cols == b.cols);
    Matrix::from_fn(a.rows, a.cols, |i, j| f.sub(a.get(i, j), b.get(i, j)))
}

pub fn mat_scale<F: Field>(f: &F, c: &F::Elem, a: &Matrix<F::Elem>) -> Matrix<F::Elem> {
    a.map(|x| f.mul(c, x))
}

pub fn is_zero_matrix<F: Field>(f: &F, a: &Matrix<F::Elem>) -> bool {
    a.data.iter().all(|x| f.is_zero(x))
}

/// Reduced row-echelon form together with the pivot columns.
#[derive(Clone, Debug)]
pub struct Rref<T> {
    pub matrix: Matrix<T>,
    pub pivots: Vec<usize>,
}

pub fn rref<F: Field>(f: &F, m: &Matrix<F::Elem>) -> Rref<F::Elem> {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..a.cols {
        if r == a.rows {
            break;
        }
        let Some(p) = (r..a.rows).find(|&i| !f.is_zero(a.get(i, c))) else {
            continue;
        };
        a.swap_rows(r, p);
        let inv = f.inv(a.get(r, c)).expect("nonzero pivot");
        for j in c..a.cols {
            let v = f.mul(a.get(r, j), &inv);
            a.set(r, j, v);
        }
        for i in 0..a.rows {
            if i == r {
                continue;
            }
            let factor = a.get(i, c).clone();
            if f.is_zero(&factor) {
                continue;
            }
            for j in c..a.cols {
                let v = f.sub(a.get(i, j), &f.mul(&factor, a.get(r, j)));
                a.set(i, j, v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    Rref { matrix: a, pivots }
}

pub fn rank<F: Field>(f: &F, m: &Matrix<F::Elem>) -> usize {
    rref(f, m).pivots.len()
}

/// Canonical basis of the row space: nonzero rows of the RREF.
pub fn row_space<F: Field>(f: &F, m: &Matrix<F::Elem>) -> Matrix<F::Elem> {
    let r = rref(f, m);
    let k = r.pivots.len();
    Matrix::from_fn(k, m.cols, |i, j| r.matrix.get(i, j).clone())
}

/// Canonical basis of the right kernel {x : m·x = 0}, as rows.
pub fn kernel<F: Field>(f: &F, m: &Matrix<F::Elem>) -> Matrix<F::Elem> {
    let n = m.cols;
    let r = rref(f, m);
    let free: Vec<usize> = (0..n).filter(|c| !r.pivots.contains(c)).collect();
    let mut basis = Vec::with_capacity(free.len());
    for &fc in &free {
        let mut v = vec![f.zero(); n];
        v[fc] = f.one();
        for (row, &pc) in r.pivots.iter().enumerate() {
            v[pc] = f.neg(r.matrix.get(row, fc));
        }
        basis.push(v);
    }
    let raw = Matrix::from_rows(basis, n);
    row_space(f, &raw)
}

/// Solution set of A·x = b.
#[derive(Clone, Debug)]
pub struct Solution<T> {
    /// `None` when the system is inconsistent.
    pub particular: Option<Vec<T>>,
    /// Canonical kernel basis (rows).
    pub kernel: Matrix<T>,
}

pub fn solve<F: Field>(f: &F, a: &Matrix<F::Elem>, b: &[F::Elem]) -> Solution<F::Elem> {
    assert_eq!(a.rows, b.len(), "right-hand side has wrong length");
    let n = a.cols;
    let aug = Matrix::from_fn(a.rows, n + 1, |i, j| {
        if j < n {
            a.get(i, j).clone()
        } else {
            b[i].clone()
        }
    });
    let r = rref(f, &aug);
    let kernel = kernel(f, a);
    if r.pivots.last() == Some(&n) {
        return Solution { particular: None, kernel };
    }
    let mut x = vec![f.zero(); n];
    for (row, &pc) in r.pivots.iter().enumerate() {
        x[pc] = r.matrix.get(row, n).clone();
    }
    Solution { particular: Some(x), kernel }
}

pub fn inverse<F: Field>(f: &F, a: &Matrix<F::Elem>) -> Option<Matrix<F::Elem>> {
    assert!(a.is_square(), "inverse of a non-square matrix");
    let n = a.rows;
    let aug = Matrix::from_fn(n, 2 * n, |i, j| {
        if j < n {
            a.get(i, j).clone()
        } else if j - n == i {
            f.one()
        } else {
            f.zero()
        }
    });
    let r = rref(f, &aug);
    if r.pivots.len() < n || r.pivots[n - 1] >= n {
        return None;
    }
    Some(Matrix::from_fn(n, n, |i, j| r.matrix.get(i, j + n).clone()))
}

pub fn det<F: Field>(f: &F, a: &Matrix<F::Elem>) -> F::Elem {
    assert!(a.is_square(), "determinant of a non-square matrix");
    let n = a.rows;
    let mut m = a.clone();
    let mut d = f.one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !f.is_zero(m.get(i, c))) else {
            return f.zero();
        };
        if p != c {
            m.swap_rows(p, c);
            d = f.neg(&d);
        }
        let piv = m.get(c, c).clone();
        d = f.mul(&d, &piv);
        let inv = f.inv(&piv).expect("nonzero pivot");
        for i in c + 1..n {
            let factor = f.mul(m.get(i, c), &inv);
            if f.is_zero(&factor) {
                continue;
            }
            for j in c..n {
                let v = f.sub(m.get(i, j), &f.mul(&factor, m.get(c, j)));
                m.set(i, j, v);
            }
        }
    }
    d
}

/// Basis (canonical rows) of the intersection of two row spaces in the same ambient space.
pub fn intersect<F: Field>(f: &F, a: &Matrix<F::Elem>, b: &Matrix<F::Elem>) -> Matrix<F::Elem> {
    assert_eq!(a.cols, b.cols);
    let n = a.cols;
    if a.rows == 0 || b.rows == 0 {
        return Matrix::from_rows(Vec::new(), n);
    }
    // x·A = y·B  <=>  [Aᵀ | -Bᵀ] (x; y) = 0
    let stacked = Matrix::from_fn(n, a.rows + b.rows, |i, j| {
        if j < a.rows {
            a.get(j, i).clone()
        } else {
            f.neg(b.get(j - a.rows, i))
        }
    });
    let ker = kernel(f, &stacked);
    let vecs: Vec<Vec<F::Elem>> = (0..ker.rows)
        .map(|k| {
            let coeffs = &ker.row(k)[..a.rows];
            (0..n)
                .map(|j| {
                    coeffs
                        .iter()
                        .enumerate()
                        .fold(f.zero(), |acc, (i, c)| f.add(&acc, &f.mul(c, a.get(i, j))))
                })
                .collect()
        })
        .collect();
    row_space(f, &Matrix::from_rows(vecs, n))
}

/// Canonical basis of the sum of two row spaces.
pub fn span_sum<F: Field>(f: &F, a: &Matrix<F::Elem>, b: &Matrix<F::Elem>) -> Matrix<F::Elem> {
    assert_eq!(a.cols, b.cols);
    let mut rows = a.row_vecs();
    rows.extend(b.row_vecs());
    row_space(f, &Matrix::from_rows(rows, a.cols))
}

/// Coordinates of `v` in the row basis `basis`, if `v` lies in its span.
pub fn coordinates<F: Field>(f: &F, basis: &Matrix<F::Elem>, v: &[F::Elem]) -> Option<Vec<F::Elem>> {
    solve(f, &basis.transpose(), v).particular
}

/// Characteristic polynomial det(t·I − A) of a rational matrix, via reduction
/// to upper Hessenberg form.
pub fn charpoly(a: &MatrixQ) -> QPoly {
    assert!(a.is_square(), "characteristic polynomial of a non-square matrix");
    let f = Rationals;
    let n = a.rows;
    let mut h = a.clone();
    for m in 1..n.saturating_sub(1) {
        let Some(i) = (m..n).find(|&i| !h.get(i, m - 1).is_zero()) else {
            continue;
        };
        if i != m {
            h.swap_rows(i, m);
            for r in 0..n {
                let (x, y) = (h.get(r, i).clone(), h.get(r, m).clone());
                h.set(r, i, y);
                h.set(r, m, x);
            }
        }
        let piv = h.get(m, m - 1).clone();
        for i in m + 1..n {
            let u = h.get(i, m - 1) / &piv;
            if u.is_zero() {
                continue;
            }
            for j in 0..n {
                let v = h.get(i, j) - &u * h.get(m, j);
                h.set(i, j, v);
            }
            for r in 0..n {
                let v = h.get(r, m) + &u * h.get(r, i);
                h.set(r, m, v);
            }
        }
    }
    // Recurrence on leading principal submatrices of the Hessenberg matrix.
    let mut p: Vec<QPoly> = vec![QPoly::one()];
    for k in 1..=n {
        let t_minus = QPoly::new(vec![-h.get(k - 1, k - 1).clone(), f.one()]);
        let mut pk = &t_minus * &p[k - 1];
        let mut prod = f.one();
        for i in 1..k {
            prod = &prod * h.get(k - i, k - i - 1);
            let term = p[k - i - 1].scale(&(&prod * h.get(k - i - 1, k - 1)));
            pk = &pk - &term;
        }
        p.push(pk);
    }
    p.pop().unwrap()
}

/// Minimal polynomial of a square rational matrix (monic), found as the first
/// linear dependency among I, A, A², … .
pub fn minimal_polynomial(a: &MatrixQ) -> QPoly {
    assert!(a.is_square(), "minimal polynomial of a non-square matrix");
    let f = Rationals;
    let n = a.rows;
    let mut powers: Vec<Vec<Rational>> = vec![identity(&f, n).data];
    let mut cur = identity(&f, n);
    loop {
        cur = mat_mul(&f, &cur, a);
        let k = powers.len();
        let cols = Matrix::from_columns(&powers, n * n);
        if let Some(c) = solve(&f, &cols, &cur.data).particular {
            let mut coeffs: Vec<Rational> = c.into_iter().map(|x| -x).collect();
            coeffs.push(Rational::from_integer(1.into()));
            debug_assert_eq!(coeffs.len(), k + 1);
            return QPoly::new(coeffs);
        }
        powers.push(cur.data.clone());
    }
}
