//! Induced surface charge on a perfect conductor: first-kind collocation with
//! one uniform charge per panel.
//!
//! Unknowns are the panel charges `Q_l`. At every panel centroid `c_k`
//!
//! ```text
//! sum_l Q_l / (4 pi eps0 A_l) int_l dA / |c_k - y| + U_ext(c_k) = V_s
//! ```
//!
//! with `V_s = 0` for a grounded conductor. An isolated conductor adds `V_s`
//! as an unknown together with the constraint `sum_l Q_l = 0`. The dense
//! system is LU-factored once, so many right-hand sides are cheap.

use nalgebra::{DMatrix, DVector, Dyn, LU};
use rayon::prelude::*;

use super::quadrature::PanelRule;
use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::kernel::{scalar_potential, QuadratureSettings};
use crate::mesh::SurfaceMesh;
use crate::sources::{CurrentElement, Distribution};
use crate::Vec3;

/// Condition estimates above this are rejected.
pub const MAX_CONDITION: f64 = 1e13;

#[derive(Debug, Clone, PartialEq)]
pub struct InducedChargeSolution {
    /// C/m^2 per panel
    pub sigma: Vec<f64>,
    /// C per panel, `sigma * area`
    pub panel_charges: Vec<f64>,
    /// C
    pub total_charge: f64,
    /// V; zero when grounded
    pub conductor_potential: f64,
    /// max |U - V_s| over one off-centroid check point per panel, V
    pub residual: f64,
    /// lower-bound estimate of the 1-norm condition number
    pub condition_estimate: f64,
}

impl InducedChargeSolution {
    /// One point charge per panel centroid.
    pub fn to_distribution(&self, mesh: &SurfaceMesh, label: &str) -> Result<Distribution> {
        let elements = mesh
            .panels()
            .iter()
            .zip(&self.panel_charges)
            .map(|(p, &q)| CurrentElement::charge(p.centroid, q))
            .collect();
        Distribution::new(label, elements)
    }

    /// Each panel charge spread over `4^level` sub-triangle centroids per fan
    /// triangle; better for evaluation points close to the surface.
    pub fn to_distribution_refined(
        &self,
        mesh: &SurfaceMesh,
        label: &str,
        level: usize,
    ) -> Result<Distribution> {
        if !(1..=3).contains(&level) {
            return Err(Error::invalid("level", "refinement level is 1, 2 or 3"));
        }
        let mut elements = Vec::new();
        for (p, &q) in mesh.panels().iter().zip(&self.panel_charges) {
            let rule = PanelRule::new(p);
            elements.extend(
                rule.points(level)
                    .iter()
                    .map(|&(x, w)| CurrentElement::charge(x, q * w / p.area)),
            );
        }
        Distribution::new(label, elements)
    }
}

/// Factored collocation system for one mesh.
pub struct ChargeSolver {
    mesh: SurfaceMesh,
    rules: Vec<PanelRule>,
    grounded: bool,
    lu: LU<f64, Dyn, Dyn>,
    condition: f64,
    coulomb: f64,
    /// unit of the scaled conductor-potential unknown, V/C
    scale: f64,
}

impl std::fmt::Debug for ChargeSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ChargeSolver")
            .field("panels", &self.mesh.len())
            .field("grounded", &self.grounded)
            .field("condition", &self.condition)
            .finish()
    }
}

/// Potential at `x` of unit charge spread uniformly over each panel, V/C.
fn potential_row(rules: &[PanelRule], coulomb: f64, x: Vec3, row: &mut [f64]) {
    for (entry, rule) in row.iter_mut().zip(rules) {
        *entry = coulomb * rule.inverse_distance_integral(x) / rule.area;
    }
}

/// Lower bound on `||A||_1 ||A^-1||_1` from a few fixed probe vectors.
fn condition_estimate(a: &DMatrix<f64>, lu: &LU<f64, Dyn, Dyn>) -> Option<f64> {
    let n = a.nrows();
    let norm_a = a
        .column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let golden = 0.618_033_988_749_895;
    let probes = [
        DVector::from_element(n, 1.0),
        DVector::from_fn(n, |k, _| if k % 2 == 0 { 1.0 } else { -1.0 }),
        DVector::from_fn(n, |k, _| (k as f64 * golden * 7.0).fract() - 0.5),
        DVector::from_fn(n, |k, _| ((k * k) as f64 * golden).fract() - 0.5),
    ];
    let mut worst: f64 = 0.0;
    for x in probes {
        let y = lu.solve(&x)?;
        if y.iter().any(|v| !v.is_finite()) {
            return None;
        }
        worst = worst.max(y.lp_norm(1) / x.lp_norm(1));
    }
    Some(norm_a * worst)
}

impl ChargeSolver {
    /// Assemble and factor the system. Open meshes are accepted (thin
    /// plates); closed ones must be outward oriented.
    pub fn new(mesh: &SurfaceMesh, grounded: bool) -> Result<Self> {
        if mesh.is_closed() {
            mesh.validate_closed()?;
        }
        let coulomb = PhysicalConstants::SI.coulomb();
        let rules = PanelRule::for_mesh(mesh);
        let n = rules.len();
        let dim = if grounded { n } else { n + 1 };
        let mut data = vec![0.0; dim * dim];
        data.par_chunks_mut(dim).take(n).enumerate().for_each(|(k, row)| {
            potential_row(&rules, coulomb, rules[k].centroid, &mut row[..n]);
        });
        // the isolated constraint row and potential column are scaled to the
        // mean diagonal so the augmented matrix stays balanced
        let scale = (0..n).map(|k| data[k * dim + k]).sum::<f64>() / n as f64;
        if !grounded {
            for k in 0..n {
                data[k * dim + n] = -scale;
                data[n * dim + k] = scale;
            }
        }
        let a = DMatrix::from_row_slice(dim, dim, &data);
        let lu = a.clone().lu();
        let condition = condition_estimate(&a, &lu).unwrap_or(f64::INFINITY);
        if !(condition <= MAX_CONDITION) {
            return Err(Error::IllConditioned { condition });
        }
        Ok(Self {
            mesh: mesh.clone(),
            rules,
            grounded,
            lu,
            condition,
            coulomb,
            scale,
        })
    }

    pub fn mesh(&self) -> &SurfaceMesh {
        &self.mesh
    }

    pub fn grounded(&self) -> bool {
        self.grounded
    }

    pub fn condition_estimate(&self) -> f64 {
        self.condition
    }

    /// Reject source elements strictly inside a closed conductor.
    pub fn check_exterior(&self, external: &Distribution) -> Result<()> {
        if !self.mesh.is_closed() {
            return Ok(());
        }
        for e in external.elements() {
            if self.mesh.contains(e.position) {
                return Err(Error::WrongSide {
                    point: e.position.into(),
                    where_: "inside the conductor",
                    winding: self.mesh.winding_number(e.position),
                });
            }
        }
        Ok(())
    }

    /// Panel charges and conductor potential for a given external potential
    /// at the panel centroids.
    pub(crate) fn solve_centroid_potential(&self, u_ext: &[f64]) -> Result<(Vec<f64>, f64)> {
        let n = self.rules.len();
        let dim = if self.grounded { n } else { n + 1 };
        let rhs = DVector::from_fn(dim, |k, _| if k < n { -u_ext[k] } else { 0.0 });
        let x = self
            .lu
            .solve(&rhs)
            .ok_or(Error::IllConditioned { condition: f64::INFINITY })?;
        let potential = if self.grounded { 0.0 } else { x[n] * self.scale };
        Ok((x.iter().take(n).copied().collect(), potential))
    }

    /// Panel centroids, the collocation points.
    pub fn collocation_points(&self) -> Vec<Vec3> {
        self.rules.iter().map(|r| r.centroid).collect()
    }

    /// Solve for sources anywhere off the surface, including inside a closed
    /// conductor.
    pub fn solve_any_side(
        &self,
        external: &Distribution,
        settings: &QuadratureSettings,
    ) -> Result<InducedChargeSolution> {
        external.require_nonempty()?;
        let ext = |x: Vec3| scalar_potential(external, x, settings);
        let u_ext: Vec<f64> = self
            .rules
            .par_iter()
            .map(|r| ext(r.centroid))
            .collect::<Result<_>>()?;
        let (panel_charges, conductor_potential) = self.solve_centroid_potential(&u_ext)?;

        // check points: first level-1 sub-centroid of each panel, which is
        // off the collocation point but on the surface
        let residual = self
            .rules
            .par_iter()
            .map(|r| -> Result<f64> {
                let p = r.points(1)[0].0;
                let u = self.potential_of_charges(&panel_charges, p) + ext(p)?;
                Ok((u - conductor_potential).abs())
            })
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);

        let sigma = panel_charges
            .iter()
            .zip(&self.rules)
            .map(|(q, r)| q / r.area)
            .collect();
        Ok(InducedChargeSolution {
            sigma,
            total_charge: panel_charges.iter().sum(),
            panel_charges,
            conductor_potential,
            residual,
            condition_estimate: self.condition,
        })
    }

    /// Solve for sources outside the conductor.
    pub fn solve(
        &self,
        external: &Distribution,
        settings: &QuadratureSettings,
    ) -> Result<InducedChargeSolution> {
        self.check_exterior(external)?;
        self.solve_any_side(external, settings)
    }

    fn potential_of_charges(&self, charges: &[f64], x: Vec3) -> f64 {
        charges
            .iter()
            .zip(&self.rules)
            .map(|(q, r)| q / r.area * r.inverse_distance_integral(x))
            .sum::<f64>()
            * self.coulomb
    }

    /// Potential of the induced charge at `x`, V, with near-field panel
    /// quadrature.
    pub fn induced_potential(&self, solution: &InducedChargeSolution, x: Vec3) -> f64 {
        self.potential_of_charges(&solution.panel_charges, x)
    }

    /// `-grad` of [`Self::induced_potential`] by central differences with
    /// step `1e-4` of the distance to the nearest centroid.
    pub fn induced_field(&self, solution: &InducedChargeSolution, x: Vec3) -> Vec3 {
        let h = 1e-4 * self.mesh.nearest_centroid_distance(x);
        let mut e = Vec3::zeros();
        for k in 0..3 {
            let mut d = Vec3::zeros();
            d[k] = h;
            e[k] = -(self.induced_potential(solution, x + d) - self.induced_potential(solution, x - d))
                / (2.0 * h);
        }
        e
    }
}

/// Assemble, factor and solve in one go. See [`ChargeSolver`] to reuse the
/// factorization.
pub fn solve_induced_charge(
    mesh: &SurfaceMesh,
    external: &Distribution,
    grounded: bool,
    settings: &QuadratureSettings,
) -> Result<InducedChargeSolution> {
    external.require_nonempty()?;
    let solver = ChargeSolver::new(mesh, grounded)?;
    solver.solve(external, settings)
}
