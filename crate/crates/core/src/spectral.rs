//! First Dirichlet eigenpair of `-Δ_h` on a box and an independent numerical check.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{GridFunction, Mesh};
use crate::linalg::{conjugate_gradient, CsrMatrix};
use crate::norms::{d_norm_squared, lp_power_sum};

/// Closed-form first eigenpair.
#[derive(Debug, Clone)]
pub struct EigenPair {
    /// `λ_{1,h} = Σ 4/h_i² sin²(π h_i / (2(b_i - a_i)))`
    pub lambda1h: f64,
    /// Continuous eigenvalue `Σ π²/(b_i - a_i)²`.
    pub lambda1: f64,
    /// `Π sin(π(x_i - a_i)/(b_i - a_i))`, maximum 1 on odd meshes.
    pub phi: GridFunction,
    /// `t = 1 / Σ φ 𝒉`
    pub t_scale: f64,
}

impl EigenPair {
    /// `t φ`, which has unit discrete L¹ norm.
    pub fn normalized_phi(&self) -> GridFunction {
        self.phi.scaled(self.t_scale).expect("finite scaling")
    }
}

/// Discrete first eigenvalue from the closed formula.
pub fn first_eigenvalue(mesh: &Mesh) -> f64 {
    let d = mesh.domain();
    (0..mesh.dim())
        .map(|i| {
            let h = mesh.spacing()[i];
            4.0 / (h * h) * (PI * h / (2.0 * d.width(i))).sin().powi(2)
        })
        .sum()
}

pub fn first_eigenpair(mesh: &Mesh) -> EigenPair {
    let counts = mesh.counts().to_vec();
    let phi = GridFunction::from_index_fn(mesh, |idx| {
        idx.iter()
            .zip(&counts)
            .map(|(&k, &n)| {
                if k == 0 || k == n {
                    0.0
                } else {
                    (PI * k as f64 / n as f64).sin()
                }
            })
            .product()
    })
    .expect("sines are finite");
    let mass: f64 = phi.values().iter().sum::<f64>() * mesh.cell_volume();
    EigenPair {
        lambda1h: first_eigenvalue(mesh),
        lambda1: mesh.domain().first_eigenvalue(),
        t_scale: 1.0 / mass,
        phi,
    }
}

/// `min_x t φ(x) |Ω|² / (2^n dist(x, ∂Ω_h)^n)` over interior points.
pub fn distance_bound_check(pair: &EigenPair) -> f64 {
    let mesh = pair.phi.mesh();
    let n = mesh.dim() as i32;
    let vol2 = mesh.domain().volume().powi(2);
    let mut idx = vec![0usize; mesh.dim()];
    let mut worst = f64::INFINITY;
    for k in mesh.interior_indices() {
        mesh.multi_index_into(k, &mut idx);
        let d = mesh.dist_unchecked(&idx);
        let r = pair.t_scale * pair.phi.at(k) * vol2 / (2f64.powi(n) * d.powi(n));
        worst = worst.min(r);
    }
    worst
}

/// `‖u‖_D² / ‖u‖_{L²}²`.
pub fn rayleigh_quotient(u: &GridFunction) -> f64 {
    d_norm_squared(u) / lp_power_sum(u, 2.0)
}

/// Result of the numerical eigen-solve.
#[derive(Debug, Clone, Serialize)]
pub struct OracleEigen {
    pub lambda: f64,
    #[serde(skip)]
    pub vector: GridFunction,
    pub iterations: usize,
    pub residual: f64,
}

/// Smallest eigenvalue of the assembled `-Δ_h` by inverse power iteration.
///
/// Each step solves with CG to relative tolerance `1e-12`; the eigenvector is
/// scaled to maximum 1.
pub fn eigen_oracle(mesh: &Mesh) -> Result<OracleEigen> {
    let n = mesh.interior_len();
    if n > 100_000 {
        return Err(Error::InvalidParameter(format!(
            "eigen oracle limited to 1e5 interior points, mesh has {n}"
        )));
    }
    let a = CsrMatrix::shifted_laplacian(mesh, None);
    let diag = a.diagonal();
    let mut x = vec![1.0; n];
    let mut ax = vec![0.0; n];
    let normalize = |v: &mut Vec<f64>| {
        let s = v.iter().map(|t| t * t).sum::<f64>().sqrt();
        v.iter_mut().for_each(|t| *t /= s);
    };
    normalize(&mut x);
    for it in 1..=10_000 {
        let y = conjugate_gradient(
            |p, q| a.matvec(p, q),
            &diag,
            &x,
            Some(&x),
            1e-12,
            20 * n + 100,
        )?
        .x;
        x = y;
        normalize(&mut x);
        a.matvec(&x, &mut ax);
        let lambda: f64 = x.iter().zip(&ax).map(|(p, q)| p * q).sum();
        let res = x
            .iter()
            .zip(&ax)
            .map(|(p, q)| (q - lambda * p).powi(2))
            .sum::<f64>()
            .sqrt()
            / lambda;
        if res <= 1e-10 {
            let mx = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let sign = if x.iter().sum::<f64>() < 0.0 {
                -1.0
            } else {
                1.0
            };
            let vals: Vec<f64> = x.iter().map(|v| sign * v / mx).collect();
            return Ok(OracleEigen {
                lambda,
                vector: GridFunction::from_interior(mesh, &vals)?,
                iterations: it,
                residual: res,
            });
        }
    }
    Err(Error::NotConverged {
        what: "inverse power iteration".into(),
        iterations: 10_000,
    })
}
