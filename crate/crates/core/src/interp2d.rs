//! Piecewise-linear interpolation of 2D grid functions on a two-triangle
//! split of each mesh cell, with exact integrals and a quadrature oracle.
//!
//! In a cell with corners `A=(0,0)`, `B=(h1,0)`, `C=(0,h2)`, `D=(h1,h2)`
//! (relative to its lower-left node) the triangles are `T1 = conv{A,B,D}`
//! and `T2 = conv{A,C,D}`.

use crate::error::{invalid, Error, Result};
use crate::grid::{GridFunction, Mesh};
use crate::inequalities::triple_term;
use crate::norms::{d_norm_squared, lp_power_sum};

/// Continuous interpolant, linear on every triangle.
#[derive(Debug, Clone)]
pub struct TriangulatedInterpolant {
    u: GridFunction,
}

/// One triangle: vertex coordinates and nodal values.
#[derive(Debug, Clone, Copy)]
pub struct Triangle {
    pub vertices: [[f64; 2]; 3],
    pub values: [f64; 3],
    pub area: f64,
}

/// Quadrature result with the change from the previous refinement level.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureEstimate {
    pub value: f64,
    pub refinement_change: f64,
}

pub fn interpolate(u: &GridFunction) -> Result<TriangulatedInterpolant> {
    if u.mesh().dim() != 2 {
        return Err(invalid(format!(
            "interpolant needs a 2D mesh, got n = {}",
            u.mesh().dim()
        )));
    }
    Ok(TriangulatedInterpolant { u: u.clone() })
}

impl TriangulatedInterpolant {
    pub fn mesh(&self) -> &Mesh {
        self.u.mesh()
    }

    fn corners(&self, i: usize, j: usize) -> [f64; 4] {
        let m = self.mesh();
        let k = m.flat_unchecked(&[i, j]);
        let (s0, s1) = (m.stride(0), m.stride(1));
        let v = self.u.values();
        [v[k], v[k + s0], v[k + s1], v[k + s0 + s1]]
    }

    /// The two triangles of cell `(i, j)`, `T1` first.
    pub fn cell_triangles(&self, i: usize, j: usize) -> [Triangle; 2] {
        let m = self.mesh();
        let [ua, ub, uc, ud] = self.corners(i, j);
        let (x0, x1) = (m.coord(0, i), m.coord(0, i + 1));
        let (y0, y1) = (m.coord(1, j), m.coord(1, j + 1));
        let area = 0.5 * m.cell_volume();
        [
            Triangle {
                vertices: [[x0, y0], [x1, y0], [x1, y1]],
                values: [ua, ub, ud],
                area,
            },
            Triangle {
                vertices: [[x0, y0], [x0, y1], [x1, y1]],
                values: [ua, uc, ud],
                area,
            },
        ]
    }

    pub fn triangles(&self) -> impl Iterator<Item = Triangle> + '_ {
        let n = self.mesh().counts().to_vec();
        (0..n[0]).flat_map(move |i| (0..n[1]).flat_map(move |j| self.cell_triangles(i, j)))
    }

    /// Constant gradients on `T1` and `T2` of cell `(i, j)`.
    pub fn gradients(&self, i: usize, j: usize) -> [[f64; 2]; 2] {
        let h = self.mesh().spacing();
        let [ua, ub, uc, ud] = self.corners(i, j);
        [
            [(ub - ua) / h[0], (ud - ub) / h[1]],
            [(ud - uc) / h[0], (uc - ua) / h[1]],
        ]
    }

    /// `ũ(x)`; points outside the closed box are rejected.
    pub fn eval(&self, x: [f64; 2]) -> Result<f64> {
        let m = self.mesh();
        let d = m.domain();
        let mut cell = [0usize; 2];
        let mut local = [0.0; 2];
        for a in 0..2 {
            if x[a] < d.lower()[a] || x[a] > d.upper()[a] {
                return Err(invalid(format!("point {x:?} lies outside the domain")));
            }
            let r = (x[a] - d.lower()[a]) / m.spacing()[a];
            let c = (r.floor() as usize).min(m.counts()[a] - 1);
            cell[a] = c;
            local[a] = r - c as f64;
        }
        let [ua, ub, uc, ud] = self.corners(cell[0], cell[1]);
        let (s, t) = (local[0], local[1]);
        Ok(if t <= s {
            ua + s * (ub - ua) + t * (ud - ub)
        } else {
            ua + t * (uc - ua) + s * (ud - uc)
        })
    }

    /// `∫ ũ^p` for nonnegative data, exact.
    pub fn power_integral(&self, p: u32) -> Result<f64> {
        if p == 0 {
            return Err(invalid("power must be at least 1"));
        }
        if self.u.values().iter().any(|v| *v < 0.0) {
            return Err(Error::InvalidParameter(
                "power integral requires nonnegative data".into(),
            ));
        }
        Ok(self.polynomial_integral(p))
    }

    /// `∫ ũ^p` for any sign pattern; the closed form is a polynomial identity.
    pub fn polynomial_integral(&self, p: u32) -> f64 {
        let w = 2.0 / ((p as f64 + 1.0) * (p as f64 + 2.0));
        self.triangles()
            .map(|t| w * t.area * triple_term(t.values[0], t.values[1], t.values[2], p))
            .sum()
    }

    /// `∫ |∇ũ|²`, exact.
    pub fn gradient_energy(&self) -> f64 {
        let n = self.mesh().counts();
        let half_cell = 0.5 * self.mesh().cell_volume();
        let mut acc = 0.0;
        for i in 0..n[0] {
            for j in 0..n[1] {
                for g in self.gradients(i, j) {
                    acc += half_cell * (g[0] * g[0] + g[1] * g[1]);
                }
            }
        }
        acc
    }

    /// Continuum `‖ũ‖_{W^{1,2}}`.
    pub fn w12_norm(&self) -> f64 {
        (self.polynomial_integral(2) + self.gradient_energy()).sqrt()
    }

    /// `∫ F(ũ)` by a degree-5 seven-point rule on `4^levels` sub-triangles of
    /// every mesh triangle.
    pub fn quadrature_integral(&self, f: impl Fn(f64) -> f64, levels: u32) -> QuadratureEstimate {
        let mut fine = 0.0;
        let mut coarse = 0.0;
        for t in self.triangles() {
            fine += refined_rule(&t, &f, levels);
            coarse += refined_rule(&t, &f, levels.saturating_sub(1));
        }
        QuadratureEstimate {
            value: fine,
            refinement_change: (fine - coarse).abs(),
        }
    }
}

/// Dunavant degree-5 rule in barycentric coordinates.
fn seven_point() -> [([f64; 3], f64); 7] {
    let s15 = 15f64.sqrt();
    let a = (6.0 - s15) / 21.0;
    let b = (6.0 + s15) / 21.0;
    let wa = (155.0 - s15) / 1200.0;
    let wb = (155.0 + s15) / 1200.0;
    [
        ([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], 9.0 / 40.0),
        ([1.0 - 2.0 * a, a, a], wa),
        ([a, 1.0 - 2.0 * a, a], wa),
        ([a, a, 1.0 - 2.0 * a], wa),
        ([1.0 - 2.0 * b, b, b], wb),
        ([b, 1.0 - 2.0 * b, b], wb),
        ([b, b, 1.0 - 2.0 * b], wb),
    ]
}

fn refined_rule(t: &Triangle, f: &impl Fn(f64) -> f64, levels: u32) -> f64 {
    // nodal values of a linear function subdivide linearly, so recurse on values only
    fn rec(
        v: [f64; 3],
        area: f64,
        f: &dyn Fn(f64) -> f64,
        level: u32,
        rule: &[([f64; 3], f64); 7],
    ) -> f64 {
        if level == 0 {
            return area
                * rule
                    .iter()
                    .map(|(l, w)| w * f(l[0] * v[0] + l[1] * v[1] + l[2] * v[2]))
                    .sum::<f64>();
        }
        let m01 = 0.5 * (v[0] + v[1]);
        let m12 = 0.5 * (v[1] + v[2]);
        let m02 = 0.5 * (v[0] + v[2]);
        let a = 0.25 * area;
        rec([v[0], m01, m02], a, f, level - 1, rule)
            + rec([m01, v[1], m12], a, f, level - 1, rule)
            + rec([m02, m12, v[2]], a, f, level - 1, rule)
            + rec([m01, m12, m02], a, f, level - 1, rule)
    }
    rec(t.values, t.area, f, levels, &seven_point())
}

/// `(lhs, rhs)` of the rectangle estimate `∫_Q |ũ|^q <= c^q |Q| (1+q/2)^{1+q/2} ‖ũ‖^q_{W^{1,2}(Q)}`
/// with `c = max{2 sqrt(π) α/β, 2 sqrt(π) β/α, 2/sqrt(|Q|)}`.
pub fn rectangle_estimate_check(u: &GridFunction, q: f64) -> Result<(f64, f64)> {
    let interp = interpolate(u)?;
    if !(q >= 1.0) {
        return Err(invalid(format!("need q >= 1, got {q}")));
    }
    let d = u.mesh().domain();
    let (alpha, beta) = (d.width(0), d.width(1));
    for e in [alpha, beta] {
        if !(1.0..=2.0).contains(&e) {
            return Err(invalid(format!(
                "rectangle edges must lie in [1, 2], got {alpha} x {beta}"
            )));
        }
    }
    let area = alpha * beta;
    let sp = 2.0 * std::f64::consts::PI.sqrt();
    let c = (sp * alpha / beta)
        .max(sp * beta / alpha)
        .max(2.0 / area.sqrt());
    let lhs = interp.quadrature_integral(|v| v.abs().powf(q), 4).value;
    let rhs = c.powf(q) * area * (1.0 + q / 2.0).powf(1.0 + q / 2.0) * interp.w12_norm().powf(q);
    Ok((lhs, rhs))
}

/// Sums of `‖u‖^p_{L^p}` and `‖u‖_D²` over the whole box and over its four
/// congruent quarters.
#[derive(Debug, Clone, Copy)]
pub struct AdditivityReport {
    pub lp_whole: f64,
    pub lp_parts: f64,
    pub d_whole: f64,
    pub d_parts: f64,
}

impl AdditivityReport {
    pub fn holds(&self) -> bool {
        let tol = 1e-12;
        self.lp_whole <= self.lp_parts * (1.0 + tol)
            && self.lp_parts <= 4.0 * self.lp_whole * (1.0 + tol)
            && self.d_whole <= self.d_parts * (1.0 + tol)
            && self.d_parts <= 2.0 * self.d_whole * (1.0 + tol)
    }
}

pub fn norm_additivity(u: &GridFunction, p: f64) -> Result<AdditivityReport> {
    let m = u.mesh();
    if m.dim() != 2 || m.counts().iter().any(|n| n % 2 != 0) {
        return Err(invalid("four-way split needs a 2D mesh with even counts"));
    }
    let (h0, h1) = (m.counts()[0] / 2, m.counts()[1] / 2);
    let mut lp_parts = 0.0;
    let mut d_parts = 0.0;
    for (lo, hi) in [
        ([0, 0], [h0, h1]),
        ([h0, 0], [2 * h0, h1]),
        ([0, h1], [h0, 2 * h1]),
        ([h0, h1], [2 * h0, 2 * h1]),
    ] {
        let part = u.restrict(&lo, &hi)?;
        lp_parts += lp_power_sum(&part, p);
        d_parts += d_norm_squared(&part);
    }
    Ok(AdditivityReport {
        lp_whole: lp_power_sum(u, p),
        lp_parts,
        d_whole: d_norm_squared(u),
        d_parts,
    })
}
