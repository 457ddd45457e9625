//! P1 assembly of the linear energy
//! `E_lin[f] = ‖f′‖² + (f, W f) + Σ_v α(v) |f(v)|²`.
//!
//! The L² product is the trapezoid (lumped P1) mass, so `M` is diagonal. The
//! same weights integrate the nonlinear terms, which keeps the mass and the
//! discrete energy exact invariants of the time stepping and makes the
//! nonlinear residual the exact gradient of the discrete energy.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::function::GraphFunction;
use crate::linalg::{SymMatrix, SymPattern};
use crate::mesh::Mesh;
use crate::potential::PotentialExpr;

#[derive(Debug, Clone)]
pub struct LinearForm {
    mesh: Arc<Mesh>,
    a: SymMatrix<f64>,
    perturbation: SymMatrix<f64>,
    m: Vec<f64>,
}

impl LinearForm {
    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn dim(&self) -> usize {
        self.m.len()
    }

    /// Stiffness + potential + vertex terms.
    pub fn a(&self) -> &SymMatrix<f64> {
        &self.a
    }

    /// Potential and vertex terms only.
    pub fn perturbation(&self) -> &SymMatrix<f64> {
        &self.perturbation
    }

    /// Diagonal of the (lumped) mass matrix.
    pub fn m(&self) -> &[f64] {
        &self.m
    }

    /// `f* A f`.
    pub fn energy_lin(&self, f: &GraphFunction) -> f64 {
        self.energy_lin_values(f.values())
    }

    /// `f* A f` for raw nodal values. The stiffness part is summed from
    /// interval differences, which avoids the cancellation between the
    /// `O(1/h)` entries of `A`.
    pub fn energy_lin_values(&self, values: &[Complex64]) -> f64 {
        let node = |d: Option<usize>| d.map_or(Complex64::new(0.0, 0.0), |d| values[d]);
        let stiffness: f64 = self
            .mesh
            .edges()
            .iter()
            .map(|em| {
                em.dofs
                    .windows(2)
                    .map(|w| (node(w[1]) - node(w[0])).norm_sqr())
                    .sum::<f64>()
                    / em.h
            })
            .sum();
        stiffness + self.perturbation.quadratic_form(values)
    }

    /// `f* M f`.
    pub fn mass(&self, f: &GraphFunction) -> f64 {
        f.values()
            .iter()
            .zip(&self.m)
            .map(|(v, w)| w * v.norm_sqr())
            .sum()
    }

    /// `A + shift·M` as a new matrix on the same pattern.
    pub fn shifted(&self, shift: f64) -> SymMatrix<f64> {
        let mut out = self.a.clone();
        let d: Vec<f64> = self.m.iter().map(|w| shift * w).collect();
        out.add_diagonal(&d);
        out
    }

    /// Smallest `b` such that `|(f,Wf) + Σα|f(v)|²| ≤ a‖f′‖² + b‖f‖²` holds on
    /// all `samples`, for a given `a`.
    pub fn form_bound(&self, samples: &[GraphFunction], a: f64) -> f64 {
        samples
            .iter()
            .filter(|f| f.mass() > 0.0)
            .map(|f| {
                let pert = self.perturbation.quadratic_form(f.values()).abs();
                (pert - a * f.derivative_norm_sq()) / f.mass()
            })
            .fold(f64::NEG_INFINITY, f64::max)
            .max(0.0)
    }
}

/// Assembles the form with the potentials and δ strengths stored on the
/// graph.
pub fn assemble(mesh: Arc<Mesh>) -> Result<LinearForm> {
    let graph = Arc::clone(mesh.graph());
    let potentials: Vec<PotentialExpr> = graph.edges().iter().map(|e| e.potential.clone()).collect();
    assemble_with(mesh, &potentials, &graph.alphas())
}

pub fn assemble_with(mesh: Arc<Mesh>, potentials: &[PotentialExpr], alphas: &[f64]) -> Result<LinearForm> {
    let graph = mesh.graph();
    if potentials.len() != graph.num_edges() || alphas.len() != graph.num_vertices() {
        return Err(Error::InvalidArgument(
            "one potential per edge and one strength per vertex required".into(),
        ));
    }
    let couplings = mesh.edges().iter().flat_map(|em| {
        em.dofs.windows(2).filter_map(|w| match (w[0], w[1]) {
            (Some(a), Some(b)) => Some((a, b)),
            _ => None,
        })
    });
    let pattern = Arc::new(SymPattern::from_couplings(mesh.num_dofs(), couplings));
    let mut a = SymMatrix::zeros(Arc::clone(&pattern));
    let mut pert = SymMatrix::zeros(pattern);

    for (e, em) in mesh.edges().iter().enumerate() {
        let h = em.h;
        let w = &potentials[e];
        for k in 0..em.intervals {
            let (p, q) = (em.dofs[k], em.dofs[k + 1]);
            let mid = em.x(k) + 0.5 * h;
            let wm = if w.is_zero() {
                0.0
            } else {
                w.evaluate(mid)
                    .map_err(|_| Error::PotentialEvaluation { edge: e, x: mid })?
            };
            let stiff = 1.0 / h;
            let mass_diag = wm * h / 3.0;
            let mass_off = wm * h / 6.0;
            for (i, mi) in [(p, mass_diag), (q, mass_diag)] {
                if let Some(i) = i {
                    a.add_sym(i, i, stiff + mi);
                    pert.add_sym(i, i, mi);
                }
            }
            if let (Some(i), Some(j)) = (p, q) {
                a.add_sym(i, j, -stiff + mass_off);
                pert.add_sym(i, j, mass_off);
            }
        }
    }
    for (v, &alpha) in alphas.iter().enumerate() {
        let d = mesh.vertex_dof(v);
        a.add_sym(d, d, alpha);
        pert.add_sym(d, d, alpha);
    }
    Ok(LinearForm {
        m: mesh.weights().to_vec(),
        mesh,
        a,
        perturbation: pert,
    })
}

/// `∫ W₋^r` over the truncated graph by midpoint sampling, with
/// `W₋ = max(-W, 0)`. Returns `None` when the sum is not finite.
pub fn negative_part_integral(mesh: &Mesh, r: f64) -> Result<Option<f64>> {
    let graph = mesh.graph();
    let mut total = 0.0;
    for (e, em) in mesh.edges().iter().enumerate() {
        let w = &graph.edge(e).potential;
        for k in 0..em.intervals {
            let x = em.x(k) + 0.5 * em.h;
            let v = w
                .evaluate(x)
                .map_err(|_| Error::PotentialEvaluation { edge: e, x })?;
            total += em.h * (-v).max(0.0).powf(r);
        }
    }
    Ok(total.is_finite().then_some(total))
}

/// Vertex hat function: one at the unknown of vertex `v`, zero elsewhere.
pub fn vertex_hat(mesh: &Arc<Mesh>, v: usize) -> GraphFunction {
    let mut f = GraphFunction::zeros(Arc::clone(mesh));
    f.values_mut()[mesh.vertex_dof(v)] = Complex64::new(1.0, 0.0);
    f
}
