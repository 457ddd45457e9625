//! Sparse symmetric matrices and an LDLᵀ factorization without pivoting.
//!
//! Matrices arising from the graph discretization are chains (edge
//! interiors) coupled through a handful of vertex unknowns. With the vertex
//! unknowns numbered last the fill-in is bounded by the number of vertices
//! per column, so a plain elimination-tree factorization is enough.
//!
//! The factorization is generic over real and complex scalars. Complex
//! matrices are treated as complex *symmetric* (plain transpose, no
//! conjugation), which is what the Crank–Nicolson operator `M + i·dt/2·A`
//! needs.

use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};

pub trait Scalar:
    Copy
    + Zero
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + std::fmt::Debug
{
    fn from_real(v: f64) -> Self;
    fn modulus(self) -> f64;
}

impl Scalar for f64 {
    fn from_real(v: f64) -> Self {
        v
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    fn from_real(v: f64) -> Self {
        Complex64::new(v, 0.0)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
}

/// Symmetric sparsity pattern in CSR form, both triangles stored, columns
/// sorted within each row, diagonal always present.
#[derive(Debug, Clone, PartialEq)]
pub struct SymPattern {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    diag: Vec<usize>,
}

impl SymPattern {
    /// Builds the pattern from off-diagonal couplings `(i, j)`, `i != j`, in
    /// any order and with repetitions.
    pub fn from_couplings(n: usize, couplings: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut rows: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        for (i, j) in couplings {
            if i != j {
                rows[i].push(j);
                rows[j].push(i);
            }
        }
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut diag = Vec::with_capacity(n);
        row_ptr.push(0);
        for (i, mut row) in rows.into_iter().enumerate() {
            row.sort_unstable();
            row.dedup();
            let offset = cols.len();
            diag.push(offset + row.binary_search(&i).expect("diagonal present"));
            cols.extend(row);
            row_ptr.push(cols.len());
        }
        SymPattern {
            n,
            row_ptr,
            cols,
            diag,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    /// Storage position of entry `(i, j)`, if it is in the pattern.
    pub fn position(&self, i: usize, j: usize) -> Option<usize> {
        let row = &self.cols[self.row_ptr[i]..self.row_ptr[i + 1]];
        row.binary_search(&j).ok().map(|k| self.row_ptr[i] + k)
    }

    pub fn row(&self, i: usize) -> std::ops::Range<usize> {
        self.row_ptr[i]..self.row_ptr[i + 1]
    }

    pub fn col(&self, k: usize) -> usize {
        self.cols[k]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix<T> {
    pattern: Arc<SymPattern>,
    values: Vec<T>,
}

impl<T: Scalar> SymMatrix<T> {
    pub fn zeros(pattern: Arc<SymPattern>) -> Self {
        let values = vec![T::zero(); pattern.nnz()];
        SymMatrix { pattern, values }
    }

    pub fn pattern(&self) -> &Arc<SymPattern> {
        &self.pattern
    }

    pub fn dim(&self) -> usize {
        self.pattern.n
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Adds `v` at `(i, j)` and, for `i != j`, at `(j, i)`.
    ///
    /// Panics if the entry is outside the pattern.
    pub fn add_sym(&mut self, i: usize, j: usize, v: T) {
        let p = self.pattern.position(i, j).expect("entry in pattern");
        self.values[p] = self.values[p] + v;
        if i != j {
            let q = self.pattern.position(j, i).expect("entry in pattern");
            self.values[q] = self.values[q] + v;
        }
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.pattern
            .position(i, j)
            .map_or(T::zero(), |p| self.values[p])
    }

    pub fn diagonal(&self) -> Vec<T> {
        self.pattern.diag.iter().map(|&p| self.values[p]).collect()
    }

    pub fn add_diagonal(&mut self, d: &[T]) {
        for (&p, &v) in self.pattern.diag.iter().zip(d) {
            self.values[p] = self.values[p] + v;
        }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> SymMatrix<U> {
        SymMatrix {
            pattern: Arc::clone(&self.pattern),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn matvec<V>(&self, x: &[V]) -> Vec<V>
    where
        V: Scalar,
        T: Into<V>,
    {
        let p = &self.pattern;
        (0..p.n)
            .map(|i| {
                p.row(i).fold(V::zero(), |acc, k| {
                    acc + self.values[k].into() * x[p.cols[k]]
                })
            })
            .collect()
    }

    pub fn factor(&self) -> Result<Ldlt<T>> {
        Ldlt::new(self)
    }
}

impl SymMatrix<f64> {
    /// `x·Ax` for a real matrix and complex vector (the matrix is symmetric,
    /// so the value is real).
    pub fn quadratic_form(&self, x: &[Complex64]) -> f64 {
        let p = &self.pattern;
        let mut acc = 0.0;
        for i in 0..p.n {
            let mut row = Complex64::zero();
            for k in p.row(i) {
                row += self.values[k] * x[p.cols[k]];
            }
            acc += (x[i].conj() * row).re;
        }
        acc
    }

    pub fn quadratic_form_real(&self, x: &[f64]) -> f64 {
        let p = &self.pattern;
        (0..p.n)
            .map(|i| x[i] * p.row(i).map(|k| self.values[k] * x[p.cols[k]]).sum::<f64>())
            .sum()
    }

    /// Lower bound on the spectrum of the pencil `(A, diag(m))` from
    /// Gershgorin discs of `D^{-1/2} A D^{-1/2}`.
    pub fn gershgorin_bounds(&self, m: &[f64]) -> (f64, f64) {
        let p = &self.pattern;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..p.n {
            let mut centre = 0.0;
            let mut radius = 0.0;
            for k in p.row(i) {
                let j = p.cols[k];
                let v = self.values[k] / (m[i] * m[j]).sqrt();
                if j == i {
                    centre = v;
                } else {
                    radius += v.abs();
                }
            }
            lo = lo.min(centre - radius);
            hi = hi.max(centre + radius);
        }
        (lo, hi)
    }
}

/// `L D Lᵀ` with unit lower-triangular `L` stored by columns.
#[derive(Debug, Clone)]
pub struct Ldlt<T> {
    n: usize,
    col_ptr: Vec<usize>,
    rows: Vec<usize>,
    l: Vec<T>,
    d: Vec<T>,
}

impl<T: Scalar> Ldlt<T> {
    pub fn new(a: &SymMatrix<T>) -> Result<Self> {
        let p = &a.pattern;
        let n = p.n;

        // symbolic: column structures via the elimination tree
        let mut structs: Vec<Vec<usize>> = Vec::with_capacity(n);
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut mark = vec![usize::MAX; n];
        for j in 0..n {
            let mut s = Vec::new();
            mark[j] = j;
            for k in p.row(j) {
                let i = p.cols[k];
                if i > j && mark[i] != j {
                    mark[i] = j;
                    s.push(i);
                }
            }
            for &c in &children[j] {
                for &i in &structs[c] {
                    if i > j && mark[i] != j {
                        mark[i] = j;
                        s.push(i);
                    }
                }
            }
            s.sort_unstable();
            if let Some(&parent) = s.first() {
                children[parent].push(j);
            }
            structs.push(s);
        }

        let mut col_ptr = Vec::with_capacity(n + 1);
        col_ptr.push(0);
        for s in &structs {
            col_ptr.push(col_ptr.last().unwrap() + s.len());
        }
        let rows: Vec<usize> = structs.into_iter().flatten().collect();
        let mut l = vec![T::zero(); rows.len()];
        let mut d = a.diagonal();
        for j in 0..n {
            for k in p.row(j) {
                let i = p.cols[k];
                if i > j {
                    let pos = col_ptr[j] + rows[col_ptr[j]..col_ptr[j + 1]].binary_search(&i).unwrap();
                    l[pos] = a.values[k];
                }
            }
        }

        // numeric, right-looking
        for j in 0..n {
            let dj = d[j];
            if !(dj.modulus() > 0.0 && dj.modulus().is_finite()) {
                return Err(Error::SingularMatrix(j));
            }
            let range = col_ptr[j]..col_ptr[j + 1];
            for a_idx in range.clone() {
                let i = rows[a_idx];
                let lij = l[a_idx] / dj;
                // update column i with rows >= i from column j
                d[i] = d[i] - lij * l[a_idx];
                for b_idx in a_idx + 1..range.end {
                    let k = rows[b_idx];
                    let target = &rows[col_ptr[i]..col_ptr[i + 1]];
                    let pos = col_ptr[i] + target.binary_search(&k).expect("symbolic fill");
                    l[pos] = l[pos] - lij * l[b_idx];
                }
            }
            for idx in range {
                l[idx] = l[idx] / dj;
            }
        }
        Ok(Ldlt {
            n,
            col_ptr,
            rows,
            l,
            d,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn fill(&self) -> usize {
        self.rows.len()
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    pub fn solve_in_place(&self, x: &mut [T]) {
        for j in 0..self.n {
            let xj = x[j];
            for idx in self.col_ptr[j]..self.col_ptr[j + 1] {
                let i = self.rows[idx];
                x[i] = x[i] - self.l[idx] * xj;
            }
        }
        for (xj, &dj) in x.iter_mut().zip(&self.d) {
            *xj = *xj / dj;
        }
        for j in (0..self.n).rev() {
            let mut acc = x[j];
            for idx in self.col_ptr[j]..self.col_ptr[j + 1] {
                acc = acc - self.l[idx] * x[self.rows[idx]];
            }
            x[j] = acc;
        }
    }
}

impl Ldlt<f64> {
    /// Number of negative pivots; by Sylvester's law of inertia this is the
    /// number of negative eigenvalues of the factored matrix.
    pub fn negative_pivots(&self) -> usize {
        self.d.iter().filter(|&&v| v < 0.0).count()
    }
}
