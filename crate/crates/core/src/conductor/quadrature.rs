//! `int_panel dA / |x - y|` for flat panels.
//!
//! Points in the panel's own plane use the closed-form polygon integral.
//! Off-plane points use a centroid rule on the panel, refined to 4, 16 or 64
//! sub-triangles per fan triangle as the point gets closer.

use crate::mesh::{Panel, SurfaceMesh};
use crate::Vec3;

/// Distance-to-diameter ratios below which the next refinement level kicks
/// in: level 1 under 4, level 2 under 2, level 3 under 1.
pub const NEAR_FIELD_RATIOS: [f64; 3] = [4.0, 2.0, 1.0];

/// Relative off-plane distance below which a point counts as coplanar.
const COPLANAR: f64 = 1e-9;

#[derive(Debug, Clone)]
pub(crate) struct PanelRule {
    pub centroid: Vec3,
    pub normal: Vec3,
    pub area: f64,
    pub diameter: f64,
    corners: Vec<Vec3>,
    /// (point, weight) per refinement level 1..=3
    levels: [Vec<(Vec3, f64)>; 3],
}

fn subdivide(tri: [Vec3; 3], depth: u32, out: &mut Vec<(Vec3, f64)>) {
    if depth == 0 {
        let area = 0.5 * (tri[1] - tri[0]).cross(&(tri[2] - tri[0])).norm();
        out.push(((tri[0] + tri[1] + tri[2]) / 3.0, area));
        return;
    }
    let [a, b, c] = tri;
    let (ab, bc, ca) = ((a + b) / 2.0, (b + c) / 2.0, (c + a) / 2.0);
    for t in [[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]] {
        subdivide(t, depth - 1, out);
    }
}

impl PanelRule {
    pub fn new(panel: &Panel) -> Self {
        let v = &panel.vertices;
        let levels = [1, 2, 3].map(|depth| {
            let mut out = Vec::with_capacity(2 * 4usize.pow(depth));
            for k in 1..v.len() - 1 {
                subdivide([v[0], v[k], v[k + 1]], depth, &mut out);
            }
            out
        });
        Self {
            centroid: panel.centroid,
            normal: panel.normal,
            area: panel.area,
            diameter: panel.diameter(),
            corners: v.clone(),
            levels,
        }
    }

    pub fn for_mesh(mesh: &SurfaceMesh) -> Vec<Self> {
        mesh.panels().iter().map(Self::new).collect()
    }

    /// Sub-triangle centroids and areas at `level` (1 to 3).
    pub fn points(&self, level: usize) -> &[(Vec3, f64)] {
        &self.levels[level - 1]
    }

    /// `int dA / |x - y|` over the panel, m.
    pub fn inverse_distance_integral(&self, x: Vec3) -> f64 {
        let r = (x - self.centroid).norm();
        let ratio = r / self.diameter;
        if ratio >= NEAR_FIELD_RATIOS[0] {
            return self.area / r;
        }
        if (x - self.centroid).dot(&self.normal).abs() <= COPLANAR * self.diameter {
            return self.in_plane_integral(x);
        }
        let level = 1 + NEAR_FIELD_RATIOS[1..].iter().filter(|&&t| ratio < t).count();
        self.points(level)
            .iter()
            .map(|(p, w)| w / (x - p).norm())
            .sum()
    }

    /// Closed form for `x` in the panel plane: the polygon splits into
    /// triangles (x, edge), each contributing
    /// `h [asinh(s_b / |h|) - asinh(s_a / |h|)]` with `h` the signed distance
    /// from `x` to the edge line and `s` the tangential coordinates of the
    /// edge ends.
    pub fn in_plane_integral(&self, x: Vec3) -> f64 {
        let n = self.corners.len();
        let mut total = 0.0;
        for k in 0..n {
            let a = self.corners[k];
            let b = self.corners[(k + 1) % n];
            let length = (b - a).norm();
            let t = (b - a) / length;
            let outward = t.cross(&self.normal);
            let h = (a - x).dot(&outward);
            if h.abs() <= 1e-14 * self.diameter {
                continue;
            }
            let sa = (a - x).dot(&t);
            let sb = sa + length;
            total += h * ((sb / h.abs()).asinh() - (sa / h.abs()).asinh());
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn square(side: f64) -> SurfaceMesh {
        SurfaceMesh::plate(Vec3::zeros(), Vec3::z(), side / 2.0, 1, 1.0).unwrap()
    }

    /// Independent oracle: exact potential integral of a flat polygon at any
    /// point, edge by edge with the out-of-plane correction.
    fn exact_polygon_integral(corners: &[Vec3], normal: Vec3, x: Vec3) -> f64 {
        let d = (x - corners[0]).dot(&normal);
        let rho = x - normal * d;
        let n = corners.len();
        let mut total = 0.0;
        for k in 0..n {
            let a = corners[k];
            let b = corners[(k + 1) % n];
            let t = (b - a).normalize();
            let u = t.cross(&normal);
            let p0 = (a - rho).dot(&u);
            let lm = (a - rho).dot(&t);
            let lp = (b - rho).dot(&t);
            let r0sq = p0 * p0 + d * d;
            let rp = (r0sq + lp * lp).sqrt();
            let rm = (r0sq + lm * lm).sqrt();
            if p0.abs() > 1e-15 {
                total += p0 * ((rp + lp) / (rm + lm)).ln();
            }
            total -= d.abs()
                * ((p0 * lp / (r0sq + d.abs() * rp)).atan() - (p0 * lm / (r0sq + d.abs() * rm)).atan());
        }
        total
    }

    #[test]
    fn square_self_term() {
        let a = 0.3;
        let m = square(a);
        let rule = PanelRule::new(&m.panels()[0]);
        let expected = 4.0 * a * 1f64.asinh();
        assert_relative_eq!(rule.inverse_distance_integral(Vec3::zeros()), expected, max_relative = 1e-14);
    }

    #[test]
    fn in_plane_matches_exact_off_centre_and_outside() {
        let m = SurfaceMesh::new(
            vec![Vec3::new(0.0, 0.0, 0.0), Vec3::new(2.0, 0.2, 0.0), Vec3::new(0.5, 1.5, 0.0)],
            vec![vec![0, 1, 2]],
        )
        .unwrap();
        let p = &m.panels()[0];
        let rule = PanelRule::new(p);
        for x in [Vec3::new(0.7, 0.4, 0.0), Vec3::new(3.0, 2.0, 0.0), Vec3::new(-0.5, 0.5, 0.0)] {
            assert_relative_eq!(
                rule.in_plane_integral(x),
                exact_polygon_integral(&p.vertices, p.normal, x),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn refined_rule_accuracy_off_plane() {
        let m = square(1.0);
        let p = &m.panels()[0];
        let rule = PanelRule::new(p);
        // each refinement band stays within its design error
        for (x, tol) in [
            (Vec3::new(0.2, 0.1, 0.6), 3e-3),
            (Vec3::new(0.9, 0.0, 1.2), 1e-3),
            (Vec3::new(1.5, 1.5, 1.5), 1e-3),
            (Vec3::new(4.0, 3.0, 2.0), 3e-3),
        ] {
            let exact = exact_polygon_integral(&p.vertices, p.normal, x);
            let got = rule.inverse_distance_integral(x);
            assert!((got - exact).abs() / exact < tol, "{x:?}: {got} vs {exact}");
        }
    }

    #[test]
    fn sub_rules_partition_the_area() {
        let m = SurfaceMesh::unit_cube();
        for p in m.panels() {
            let rule = PanelRule::new(p);
            for level in 1..=3 {
                let sum: f64 = rule.points(level).iter().map(|(_, w)| w).sum();
                assert_relative_eq!(sum, p.area, max_relative = 1e-13);
            }
        }
    }
}
