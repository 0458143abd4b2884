//! Discrete norms on the closed grid and distance-weighted sums.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::grid::GridFunction;

/// Which norm to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum NormKind {
    Lp(f64),
    Linf,
    /// `(Σ_i Σ |D_i^+u|² 𝒉)^{1/2}`
    D,
    W12,
    /// Luxemburg norm for `A(t) = e^{t²} - 1`.
    OrliczA,
}

/// Young function `A(t) = e^{t²} - 1`.
pub fn young_a(t: f64) -> f64 {
    (t * t).exp_m1()
}

pub fn norm(u: &GridFunction, kind: NormKind) -> Result<f64> {
    match kind {
        NormKind::Lp(p) => lp_norm(u, p),
        NormKind::Linf => Ok(u.max_abs()),
        NormKind::D => Ok(d_norm_squared(u).sqrt()),
        NormKind::W12 => Ok((lp_power_sum(u, 2.0) + d_norm_squared(u)).sqrt()),
        NormKind::OrliczA => Ok(orlicz_norm(u)),
    }
}

pub fn lp_norm(u: &GridFunction, p: f64) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(invalid(format!("L^p needs finite p >= 1, got {p}")));
    }
    // scale by the maximum so large exponents neither overflow nor underflow
    let m = u.max_abs();
    if m == 0.0 {
        return Ok(0.0);
    }
    let cell = u.mesh().cell_volume();
    let s: f64 = u
        .values()
        .iter()
        .map(|v| (v.abs() / m).powf(p))
        .sum::<f64>()
        * cell;
    Ok(m * s.powf(1.0 / p))
}

/// `Σ_{Ω̄_h} |u|^p 𝒉` for any `p > 0`.
pub fn lp_power_sum(u: &GridFunction, p: f64) -> f64 {
    let cell = u.mesh().cell_volume();
    if p == 2.0 {
        u.values().iter().map(|v| v * v).sum::<f64>() * cell
    } else {
        u.values().iter().map(|v| v.abs().powf(p)).sum::<f64>() * cell
    }
}

/// `‖u‖_D²`.
pub fn d_norm_squared(u: &GridFunction) -> f64 {
    let mesh = u.mesh();
    let v = u.values();
    let cell = mesh.cell_volume();
    let mut idx = vec![0usize; mesh.dim()];
    let mut acc = 0.0;
    for k in 0..mesh.len() {
        mesh.multi_index_into(k, &mut idx);
        for i in 0..mesh.dim() {
            if idx[i] < mesh.counts()[i] {
                let d = (v[k + mesh.stride(i)] - v[k]) / mesh.spacing()[i];
                acc += d * d;
            }
        }
    }
    acc * cell
}

/// `Σ_{Ω̄_h} A(|u|/k) 𝒉`, non-increasing in `k`.
pub fn orlicz_sum(u: &GridFunction, k: f64) -> f64 {
    u.values().iter().map(|v| young_a(v.abs() / k)).sum::<f64>() * u.mesh().cell_volume()
}

/// Smallest `k` with `Σ A(|u|/k) 𝒉 <= 1`.
///
/// The largest value alone forces `k >= M/sqrt(ln(1+1/𝒉))`, and every term is
/// at most `1/#supp` once `k = M/sqrt(ln(1+1/(𝒉 #supp)))`, so the root lies in
/// that bracket. The returned value is the upper end of the final bracket.
pub fn orlicz_norm(u: &GridFunction) -> f64 {
    let m = u.max_abs();
    if m == 0.0 {
        return 0.0;
    }
    let cell = u.mesh().cell_volume();
    let support = u.values().iter().filter(|v| **v != 0.0).count() as f64;
    let mut lo = m / (1.0 / cell).ln_1p().sqrt();
    let mut hi = m / (1.0 / (cell * support)).ln_1p().sqrt();
    while orlicz_sum(u, hi) > 1.0 {
        hi *= 1.0 + 1e-12;
    }
    while hi - lo > 1e-13 * hi {
        let mid = 0.5 * (lo + hi);
        if orlicz_sum(u, mid) <= 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// `Σ_{Ω_h} |u|^α / dist(x, ∂Ω_h)^β 𝒉` over interior points.
pub fn weighted_sum(u: &GridFunction, alpha: f64, beta: f64) -> Result<f64> {
    if !(alpha >= 0.0) || !(beta >= 0.0) {
        return Err(invalid(format!(
            "weighted sum needs alpha, beta >= 0, got ({alpha}, {beta})"
        )));
    }
    let mesh = u.mesh();
    let mut idx = vec![0usize; mesh.dim()];
    let mut acc = 0.0;
    for k in 0..mesh.len() {
        mesh.multi_index_into(k, &mut idx);
        if !mesh.is_interior(&idx) {
            continue;
        }
        let d = mesh.dist_unchecked(&idx);
        acc += u.at(k).abs().powf(alpha) / d.powf(beta);
    }
    Ok(acc * mesh.cell_volume())
}
