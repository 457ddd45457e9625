//! Discrete elements of the energy space: one complex value per unknown,
//! continuous at vertices by construction.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, GraphPoint};
use crate::mesh::Mesh;

#[derive(Debug, Clone, PartialEq)]
pub struct GraphFunction {
    mesh: Arc<Mesh>,
    values: Vec<Complex64>,
}

/// Both sides of the Gagliardo–Nirenberg interpolation bound
/// `‖f‖_p ≤ C ‖f‖_{H¹}^θ ‖f‖_q^{1-θ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GnCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub theta: f64,
}

impl GnCheck {
    pub fn ratio(&self) -> f64 {
        if self.rhs == 0.0 {
            0.0
        } else {
            self.lhs / self.rhs
        }
    }
}

impl GraphFunction {
    pub fn zeros(mesh: Arc<Mesh>) -> Self {
        let n = mesh.num_dofs();
        GraphFunction {
            mesh,
            values: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    pub fn from_values(mesh: Arc<Mesh>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != mesh.num_dofs() {
            return Err(Error::InvalidArgument(format!(
                "expected {} values, got {}",
                mesh.num_dofs(),
                values.len()
            )));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::InvalidArgument("non-finite value".into()));
        }
        Ok(GraphFunction { mesh, values })
    }

    pub fn from_real(mesh: Arc<Mesh>, values: &[f64]) -> Result<Self> {
        Self::from_values(mesh, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    /// Samples `f` at every unknown. Vertex unknowns are sampled on one
    /// incident edge, so `f` should be continuous there.
    pub fn from_fn(mesh: Arc<Mesh>, f: impl Fn(GraphPoint) -> Complex64) -> Self {
        let values = mesh.dof_points().iter().map(|&p| f(p)).collect();
        GraphFunction { mesh, values }
    }

    pub fn from_real_fn(mesh: Arc<Mesh>, f: impl Fn(GraphPoint) -> f64) -> Self {
        Self::from_fn(mesh, |p| Complex64::new(f(p), 0.0))
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn same_mesh(&self, other: &GraphFunction) -> bool {
        Arc::ptr_eq(&self.mesh, &other.mesh) || self.mesh == other.mesh
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        GraphFunction {
            mesh: Arc::clone(&self.mesh),
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    pub fn scaled_real(&self, c: f64) -> Self {
        self.scaled(Complex64::new(c, 0.0))
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        GraphFunction {
            mesh: Arc::clone(&self.mesh),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_with(
        &self,
        other: &GraphFunction,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self> {
        if !self.same_mesh(other) {
            return Err(Error::MeshMismatch);
        }
        Ok(GraphFunction {
            mesh: Arc::clone(&self.mesh),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn sub(&self, other: &GraphFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Values at the nodes of edge `e`, including both endpoints; zero at a
    /// Dirichlet end.
    pub fn edge_values(&self, e: EdgeId) -> Vec<Complex64> {
        self.mesh
            .edge(e)
            .dofs
            .iter()
            .map(|d| d.map_or(Complex64::new(0.0, 0.0), |d| self.values[d]))
            .collect()
    }

    /// `‖f‖_p`: trapezoid rule for finite `p`, nodal maximum for `p = ∞`.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if p.is_nan() || p < 2.0 {
            return Err(Error::InvalidArgument(format!("L^p norm needs p ≥ 2, got {p}")));
        }
        if p.is_infinite() {
            return Ok(self.values.iter().map(|v| v.norm()).fold(0.0, f64::max));
        }
        Ok(self.lp_power(p).powf(1.0 / p))
    }

    /// `Σ w_i |f_i|^p`, the quadrature of `∫|f|^p`.
    pub fn lp_power(&self, p: f64) -> f64 {
        self.values
            .iter()
            .zip(self.mesh.weights())
            .map(|(v, w)| w * v.norm().powf(p))
            .sum()
    }

    /// `M[f] = ‖f‖²`.
    pub fn mass(&self) -> f64 {
        self.values
            .iter()
            .zip(self.mesh.weights())
            .map(|(v, w)| w * v.norm_sqr())
            .sum()
    }

    /// `‖f′‖²` from per-interval difference quotients.
    pub fn derivative_norm_sq(&self) -> f64 {
        (0..self.mesh.edges().len())
            .map(|e| self.edge_derivative_sq(e))
            .sum()
    }

    fn edge_derivative_sq(&self, e: EdgeId) -> f64 {
        let h = self.mesh.edge(e).h;
        self.edge_values(e)
            .windows(2)
            .map(|w| (w[1] - w[0]).norm_sqr() / h)
            .sum()
    }

    pub fn h1_norm(&self) -> f64 {
        (self.derivative_norm_sq() + self.mass()).sqrt()
    }

    /// `H¹` norm of the restriction to the listed edges, with the trapezoid
    /// rule applied edge by edge.
    pub fn h1_norm_on(&self, edges: &[EdgeId]) -> f64 {
        let mut total = 0.0;
        for &e in edges {
            let em = self.mesh.edge(e);
            let vals = self.edge_values(e);
            let n = vals.len() - 1;
            for (k, v) in vals.iter().enumerate() {
                let w = if k == 0 || k == n { 0.5 * em.h } else { em.h };
                total += w * v.norm_sqr();
            }
            total += self.edge_derivative_sq(e);
        }
        total.sqrt()
    }

    /// `Σ w_i f_i conj(g_i)`.
    pub fn inner(&self, other: &GraphFunction) -> Result<Complex64> {
        if !self.same_mesh(other) {
            return Err(Error::MeshMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .zip(self.mesh.weights())
            .map(|((a, b), w)| a * b.conj() * w)
            .sum())
    }

    /// `H¹` inner product, consistent with [`GraphFunction::h1_norm`].
    pub fn h1_inner(&self, other: &GraphFunction) -> Result<Complex64> {
        let mut acc = self.inner(other)?;
        for e in 0..self.mesh.edges().len() {
            let h = self.mesh.edge(e).h;
            let a = self.edge_values(e);
            let b = other.edge_values(e);
            for k in 0..a.len() - 1 {
                acc += (a[k + 1] - a[k]) * (b[k + 1] - b[k]).conj() / h;
            }
        }
        Ok(acc)
    }

    /// Evaluates both sides of the Gagliardo–Nirenberg bound with
    /// `θ = (2/(2+q))(1 - q/p)`, for `2 ≤ q ≤ p ≤ ∞`.
    pub fn gn_check(&self, p: f64, q: f64) -> Result<GnCheck> {
        if !(q >= 2.0 && p >= q) {
            return Err(Error::InvalidArgument(format!(
                "need 2 ≤ q ≤ p ≤ ∞, got p = {p}, q = {q}"
            )));
        }
        let theta = if p.is_infinite() {
            2.0 / (2.0 + q)
        } else {
            2.0 / (2.0 + q) * (1.0 - q / p)
        };
        let lhs = self.lp_norm(p)?;
        let rhs = self.h1_norm().powf(theta) * self.lp_norm(q)?.powf(1.0 - theta);
        Ok(GnCheck { lhs, rhs, theta })
    }
}
