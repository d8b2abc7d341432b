//! Induced surface currents on a closed perfect conductor.
//!
//! The current has two parts.
//!
//! * Charge flow. A moving external charge changes the induced surface
//!   charge, and `div K = -d sigma / dt` has to be carried by a surface
//!   current. The rate `d sigma / dt` comes from the charge BEM driven by
//!   `dU_ext/dt`. For every external element, that rate is the potential of
//!   a point dipole whose moment equals the element's current moment, since
//!   `d rho / dt = -div J`. The flow is distributed over the panel adjacency
//!   graph by the minimum-norm edge flux solution.
//! * A divergence-free part from a stream function `psi`, piecewise linear
//!   over triangles with one value per vertex. On a triangle the basis
//!   function of vertex `i` carries the current moment `e_i / 2`, where
//!   `e_i` is the counter-clockwise edge opposite `i`. The values are fitted
//!   so that the total field cancels the external `B` at interior probes.
//!
//! Without the charge-flow part the external field of a moving point charge
//! is not curl-free inside the shield, and no divergence-free surface
//! current can cancel it.
//!
//! Fields are `curl A` by central differences of the kernel's vector
//! potential.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rayon::prelude::*;

use super::charge::ChargeSolver;
use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::kernel::{curl_of_vector_potential, magnetic_field, QuadratureSettings};
use crate::mesh::SurfaceMesh;
use crate::sources::{CurrentElement, Distribution};
use crate::Vec3;

/// Tikhonov weight relative to the mean diagonal of the normal matrix.
pub const TIKHONOV: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct InducedCurrentSolution {
    /// A per mesh vertex; the gauge vertex and unused vertices are zero
    pub stream_values: Vec<f64>,
    /// A per mesh edge, from the edge's first panel to its second
    pub edge_flux: Vec<f64>,
    /// max |B_total| / max |B_external| over the fit probes
    pub residual_b: f64,
    /// fewer probe equations than stream unknowns; the fit is minimum norm
    pub underdetermined: bool,
    elements: Vec<CurrentElement>,
}

impl InducedCurrentSolution {
    /// Point current elements: one per triangle for the stream part, two per
    /// edge for the charge flow.
    pub fn elements(&self) -> &[CurrentElement] {
        &self.elements
    }

    pub fn to_distribution(&self, label: &str) -> Result<Distribution> {
        Distribution::new(label, self.elements.clone())
    }
}

#[derive(Debug, Clone)]
struct Triangle {
    centroid: Vec3,
    vertices: [usize; 3],
    /// current moment per unit stream value at each vertex, `e_i / 2`
    moments: [Vec3; 3],
}

enum Fit {
    /// `x = A^T (A A^T + lambda)^-1 b`
    MinNorm(Cholesky<f64, Dyn>),
    /// `x = (A^T A + lambda)^-1 A^T b`
    Normal(Cholesky<f64, Dyn>),
}

/// Factored system for one mesh and probe set.
pub struct CurrentSolver {
    mesh: SurfaceMesh,
    probes: Vec<Vec3>,
    charge: ChargeSolver,
    flow: Cholesky<f64, Dyn>,
    triangles: Vec<Triangle>,
    /// column of each vertex, `None` for the gauge vertex and unused ones
    columns: Vec<Option<usize>>,
    design: DMatrix<f64>,
    fit: Fit,
    underdetermined: bool,
    curl_step: f64,
}

impl std::fmt::Debug for CurrentSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CurrentSolver")
            .field("panels", &self.mesh.len())
            .field("probes", &self.probes.len())
            .field("unknowns", &self.design.ncols())
            .field("underdetermined", &self.underdetermined)
            .finish()
    }
}

/// `B` at `point` per unit current moment along x, y, z (columns).
fn unit_response(center: Vec3, point: Vec3, h: f64, settings: &QuadratureSettings) -> nalgebra::Matrix3<f64> {
    let mut m = nalgebra::Matrix3::zeros();
    for k in 0..3 {
        let mut moment = Vec3::zeros();
        moment[k] = 1.0;
        let e = [CurrentElement::current(center, moment)];
        m.set_column(k, &curl_of_vector_potential(&e, point, h, settings));
    }
    m
}

fn max_norm(v: &[Vec3]) -> f64 {
    v.iter().map(|b| b.norm()).fold(0.0, f64::max)
}

impl CurrentSolver {
    /// Build the stream-function design matrix and factor the fit and the
    /// charge-flow systems. Probes must lie strictly inside the closed mesh.
    pub fn new(mesh: &SurfaceMesh, probes: &[Vec3], settings: &QuadratureSettings) -> Result<Self> {
        settings.validate()?;
        mesh.validate_closed()?;
        if probes.is_empty() {
            return Err(Error::NoProbes);
        }
        for &p in probes {
            if !mesh.contains(p) {
                return Err(Error::WrongSide {
                    point: p.into(),
                    where_: "outside the conductor",
                    winding: mesh.winding_number(p),
                });
            }
        }

        let verts = mesh.vertices();
        let mut triangles = Vec::new();
        for panel in mesh.panels() {
            for tri in panel.triangles() {
                let [a, b, c] = tri.map(|i| verts[i]);
                triangles.push(Triangle {
                    centroid: (a + b + c) / 3.0,
                    vertices: tri,
                    moments: [(c - b) / 2.0, (a - c) / 2.0, (b - a) / 2.0],
                });
            }
        }

        // gauge: drop the last used vertex
        let used = mesh.used_vertices();
        let gauge = used.iter().rposition(|&u| u).expect("mesh has panels");
        let mut columns = vec![None; verts.len()];
        let mut n_free = 0;
        for (v, col) in columns.iter_mut().enumerate() {
            if used[v] && v != gauge {
                *col = Some(n_free);
                n_free += 1;
            }
        }

        let curl_step = 1e-4
            * probes
                .iter()
                .map(|&p| mesh.nearest_centroid_distance(p))
                .fold(f64::INFINITY, f64::min);
        let rows: Vec<Vec<f64>> = probes
            .par_iter()
            .map(|&p| {
                let mut block = vec![0.0; 3 * n_free];
                for t in &triangles {
                    let r = unit_response(t.centroid, p, curl_step, settings);
                    for (v, m) in t.vertices.iter().zip(&t.moments) {
                        if let Some(c) = columns[*v] {
                            let b = r * m;
                            for k in 0..3 {
                                block[k * n_free + c] += b[k];
                            }
                        }
                    }
                }
                block
            })
            .collect();
        let n_rows = 3 * probes.len();
        let mut design = DMatrix::zeros(n_rows, n_free);
        for (i, block) in rows.iter().enumerate() {
            for k in 0..3 {
                for c in 0..n_free {
                    design[(3 * i + k, c)] = block[k * n_free + c];
                }
            }
        }

        let underdetermined = n_rows < n_free;
        let regularize = |mut g: DMatrix<f64>| {
            let lambda = TIKHONOV * g.trace() / g.nrows() as f64;
            for k in 0..g.nrows() {
                g[(k, k)] += lambda;
            }
            g.cholesky()
                .ok_or(Error::IllConditioned { condition: f64::INFINITY })
        };
        let fit = if underdetermined {
            Fit::MinNorm(regularize(&design * design.transpose())?)
        } else {
            Fit::Normal(regularize(design.transpose() * &design)?)
        };

        // panel graph Laplacian plus the constant mode, for the charge flow
        let n = mesh.len();
        let mut lap = DMatrix::from_element(n, n, 1.0 / n as f64);
        for e in mesh.edges() {
            let (a, b) = (e.panels[0].unwrap(), e.panels[1].unwrap());
            lap[(a, a)] += 1.0;
            lap[(b, b)] += 1.0;
            lap[(a, b)] -= 1.0;
            lap[(b, a)] -= 1.0;
        }
        let flow = lap
            .cholesky()
            .ok_or(Error::IllConditioned { condition: f64::INFINITY })?;

        Ok(Self {
            mesh: mesh.clone(),
            probes: probes.to_vec(),
            charge: ChargeSolver::new(mesh, false)?,
            flow,
            triangles,
            columns,
            design,
            fit,
            underdetermined,
            curl_step,
        })
    }

    pub fn mesh(&self) -> &SurfaceMesh {
        &self.mesh
    }

    /// The isolated-conductor charge solver used for the charge flow.
    pub fn charge_solver(&self) -> &ChargeSolver {
        &self.charge
    }

    pub fn probes(&self) -> &[Vec3] {
        &self.probes
    }

    pub fn underdetermined(&self) -> bool {
        self.underdetermined
    }

    /// Edge fluxes carrying `d sigma / dt` induced by the external currents.
    fn charge_flow(&self, external: &Distribution) -> Result<Vec<f64>> {
        let k = PhysicalConstants::SI.coulomb();
        let rate: Vec<f64> = self
            .charge
            .collocation_points()
            .par_iter()
            .map(|&c| {
                external
                    .elements()
                    .iter()
                    .map(|e| {
                        let d = c - e.position;
                        let r = d.norm();
                        k * e.current_moment.dot(&d) / (r * r * r)
                    })
                    .sum()
            })
            .collect();
        let (q_dot, _) = self.charge.solve_centroid_potential(&rate)?;
        let y = self.flow.solve(&DVector::from_iterator(
            q_dot.len(),
            q_dot.iter().map(|q| -q),
        ));
        Ok(self
            .mesh
            .edges()
            .iter()
            .map(|e| y[e.panels[0].unwrap()] - y[e.panels[1].unwrap()])
            .collect())
    }

    fn flow_elements(&self, edge_flux: &[f64]) -> Vec<CurrentElement> {
        let panels = self.mesh.panels();
        let verts = self.mesh.vertices();
        let mut out = Vec::with_capacity(2 * edge_flux.len());
        for (e, &f) in self.mesh.edges().iter().zip(edge_flux) {
            let m = (verts[e.vertices[0]] + verts[e.vertices[1]]) / 2.0;
            let a = panels[e.panels[0].unwrap()].centroid;
            let b = panels[e.panels[1].unwrap()].centroid;
            out.push(CurrentElement::current((a + m) / 2.0, (m - a) * f));
            out.push(CurrentElement::current((m + b) / 2.0, (b - m) * f));
        }
        out
    }

    fn stream_elements(&self, stream: &[f64]) -> Vec<CurrentElement> {
        self.triangles
            .iter()
            .map(|t| {
                let moment = t
                    .vertices
                    .iter()
                    .zip(&t.moments)
                    .map(|(v, m)| m * stream[*v])
                    .sum();
                CurrentElement::current(t.centroid, moment)
            })
            .collect()
    }

    /// `B` of bare current elements at each point.
    fn field_of(&self, elements: &[CurrentElement], points: &[Vec3], settings: &QuadratureSettings) -> Vec<Vec3> {
        points
            .par_iter()
            .map(|&p| curl_of_vector_potential(elements, p, self.curl_step, settings))
            .collect()
    }

    pub fn solve(
        &self,
        external: &Distribution,
        settings: &QuadratureSettings,
    ) -> Result<InducedCurrentSolution> {
        external.require_nonempty()?;
        let edge_flux = self.charge_flow(external)?;
        let flow = self.flow_elements(&edge_flux);

        let b_ext = self
            .probes
            .par_iter()
            .map(|&p| magnetic_field(external, p, settings))
            .collect::<Result<Vec<Vec3>>>()?;
        let b_flow = self.field_of(&flow, &self.probes, settings);
        let target = DVector::from_iterator(
            3 * self.probes.len(),
            b_ext
                .iter()
                .zip(&b_flow)
                .flat_map(|(a, b)| (-(a + b)).iter().copied().collect::<Vec<_>>()),
        );
        let x = match &self.fit {
            Fit::MinNorm(chol) => self.design.transpose() * chol.solve(&target),
            Fit::Normal(chol) => chol.solve(&(self.design.transpose() * &target)),
        };
        let mut stream_values = vec![0.0; self.columns.len()];
        for (v, col) in self.columns.iter().enumerate() {
            if let Some(c) = col {
                stream_values[v] = x[*c];
            }
        }
        let fitted = &self.design * &x;
        let total: Vec<Vec3> = (0..self.probes.len())
            .map(|i| {
                b_ext[i] + b_flow[i]
                    + Vec3::new(fitted[3 * i], fitted[3 * i + 1], fitted[3 * i + 2])
            })
            .collect();
        let ext_max = max_norm(&b_ext);
        let total_max = max_norm(&total);
        let residual_b = if ext_max > 0.0 {
            total_max / ext_max
        } else if total_max == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };

        let mut elements = self.stream_elements(&stream_values);
        elements.extend(flow);
        Ok(InducedCurrentSolution {
            stream_values,
            edge_flux,
            residual_b,
            underdetermined: self.underdetermined,
            elements,
        })
    }

    /// `B` of the induced currents at arbitrary interior points.
    pub fn induced_field(
        &self,
        solution: &InducedCurrentSolution,
        points: &[Vec3],
        settings: &QuadratureSettings,
    ) -> Vec<Vec3> {
        self.field_of(&solution.elements, points, settings)
    }

    /// Charge-flow check: net edge outflow of every panel, which must equal
    /// minus the panel's charge rate.
    pub fn panel_outflow(&self, solution: &InducedCurrentSolution) -> Vec<f64> {
        let mut out = vec![0.0; self.mesh.len()];
        for (e, f) in self.mesh.edges().iter().zip(&solution.edge_flux) {
            out[e.panels[0].unwrap()] += f;
            out[e.panels[1].unwrap()] -= f;
        }
        out
    }
}

/// Build the solver and solve once. See [`CurrentSolver`] to reuse the
/// factorizations across many external sources.
pub fn solve_induced_current(
    mesh: &SurfaceMesh,
    external: &Distribution,
    interior_probes: &[Vec3],
    settings: &QuadratureSettings,
) -> Result<InducedCurrentSolution> {
    external.require_nonempty()?;
    CurrentSolver::new(mesh, interior_probes, settings)?.solve(external, settings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sphere_probes(r: f64) -> Vec<Vec3> {
        let mut p = Vec::new();
        for i in -2..=2 {
            for j in -2..=2 {
                for k in -2..=2 {
                    p.push(Vec3::new(i as f64, j as f64, k as f64) * r / 2.0);
                }
            }
        }
        p
    }

    fn loop_source(center: Vec3, radius: f64, current: f64) -> Distribution {
        let n = 48;
        let elements = (0..n)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / n as f64;
                let dl = 2.0 * std::f64::consts::PI * radius / n as f64;
                CurrentElement::current(
                    center + Vec3::new(radius * t.cos(), radius * t.sin(), 0.0),
                    Vec3::new(-t.sin(), t.cos(), 0.0) * current * dl,
                )
            })
            .collect();
        Distribution::new("loop", elements).unwrap()
    }

    #[test]
    fn zero_current_gives_zero_stream() {
        let mesh = SurfaceMesh::icosphere(Vec3::zeros(), 1.0, 2).unwrap();
        let still = Distribution::new("source", vec![CurrentElement::charge(Vec3::new(0.0, 0.0, 3.0), 1e-9)])
            .unwrap();
        let s = solve_induced_current(&mesh, &still, &sphere_probes(0.3), &QuadratureSettings::default())
            .unwrap();
        assert!(s.stream_values.iter().all(|&v| v == 0.0));
        assert!(s.edge_flux.iter().all(|&v| v == 0.0));
        assert_eq!(s.residual_b, 0.0);
    }

    #[test]
    fn sphere_expels_external_loop_field() {
        let mesh = SurfaceMesh::icosphere(Vec3::zeros(), 1.0, 3).unwrap();
        let settings = QuadratureSettings::default();
        let solver = CurrentSolver::new(&mesh, &sphere_probes(0.3), &settings).unwrap();
        assert!(solver.underdetermined());
        let source = loop_source(Vec3::new(0.0, 0.0, 2.5), 1.0, 1.0);
        let s = solver.solve(&source, &settings).unwrap();
        assert!(s.residual_b < 1e-3, "{}", s.residual_b);
        // held-out points inside the probe cloud
        let check: Vec<Vec3> = sphere_probes(0.25).iter().map(|p| p + Vec3::new(0.02, -0.01, 0.03)).collect();
        let induced = solver.induced_field(&s, &check, &settings);
        for (p, b) in check.iter().zip(&induced) {
            let ext = magnetic_field(&source, *p, &settings).unwrap();
            assert!((ext + b).norm() < 0.02 * ext.norm(), "{p:?}");
        }
        // closed loops induce no charge flow
        let flow_max = s.edge_flux.iter().fold(0.0f64, |m, f| m.max(f.abs()));
        let stream_max = s.stream_values.iter().fold(0.0f64, |m, f| m.max(f.abs()));
        assert!(flow_max < 1e-3 * stream_max);
    }

    #[test]
    fn stream_part_has_no_net_moment_and_scales_linearly() {
        let mesh = SurfaceMesh::icosphere(Vec3::zeros(), 1.0, 2).unwrap();
        let settings = QuadratureSettings::default();
        let solver = CurrentSolver::new(&mesh, &sphere_probes(0.3), &settings).unwrap();
        let a = solver.solve(&loop_source(Vec3::new(0.5, 0.0, 2.0), 0.5, 1.0), &settings).unwrap();
        let b = solver.solve(&loop_source(Vec3::new(0.5, 0.0, 2.0), 0.5, 2.0), &settings).unwrap();
        for (x, y) in a.stream_values.iter().zip(&b.stream_values) {
            assert_relative_eq!(*y, 2.0 * x, max_relative = 1e-9, epsilon = 1e-18);
        }
        let stream = solver.stream_elements(&a.stream_values);
        let net: Vec3 = stream.iter().map(|e| e.current_moment).sum();
        let scale: f64 = stream.iter().map(|e| e.current_moment.norm()).sum();
        assert!(net.norm() < 1e-12 * scale);
    }

    #[test]
    fn moving_charge_flow_balances_charge_rate() {
        let mesh = SurfaceMesh::icosphere(Vec3::zeros(), 1.0, 2).unwrap();
        let settings = QuadratureSettings::default();
        let solver = CurrentSolver::new(&mesh, &sphere_probes(0.3), &settings).unwrap();
        let (q, v) = (1e-9, Vec3::new(0.0, 1e3, 0.0));
        let at = Vec3::new(3.0, 0.0, 0.0);
        let moving = Distribution::new("particle", vec![CurrentElement::new(at, q, v * q)]).unwrap();
        let s = solver.solve(&moving, &settings).unwrap();
        // d sigma / dt by finite differences of two static solves
        let dt = 1e-6;
        let solve_at = |x: Vec3| {
            solver
                .charge
                .solve(&Distribution::new("p", vec![CurrentElement::charge(x, q)]).unwrap(), &settings)
                .unwrap()
                .panel_charges
        };
        let (plus, minus) = (solve_at(at + v * dt), solve_at(at - v * dt));
        let outflow = solver.panel_outflow(&s);
        let scale = plus.iter().map(|x| x.abs()).fold(0.0, f64::max) / dt;
        for k in 0..mesh.len() {
            let rate = (plus[k] - minus[k]) / (2.0 * dt);
            assert!((outflow[k] + rate).abs() < 1e-4 * scale, "panel {k}");
        }
        assert!(s.residual_b < 0.01, "{}", s.residual_b);
    }

    #[test]
    fn probes_validated() {
        let mesh = SurfaceMesh::icosphere(Vec3::zeros(), 1.0, 1).unwrap();
        let settings = QuadratureSettings::default();
        assert!(matches!(CurrentSolver::new(&mesh, &[], &settings), Err(Error::NoProbes)));
        assert!(matches!(
            CurrentSolver::new(&mesh, &[Vec3::new(2.0, 0.0, 0.0)], &settings),
            Err(Error::WrongSide { .. })
        ));
        let open = SurfaceMesh::plate(Vec3::zeros(), Vec3::z(), 1.0, 2, 1.0).unwrap();
        assert!(CurrentSolver::new(&open, &[Vec3::zeros()], &settings).is_err());
    }
}
