//! One-dimensional machinery: comparison principle, the Poisson problem with
//! quarter-period frequency, growth-function quantities and the a priori bound
//! on `Ω = (-L, L)`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use quadrature::double_exponential;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::grid::{BoxDomain, GridFunction, Mesh};
use crate::spectral::first_eigenvalue;

/// Upper end of every scan for thresholds; beyond this the tail is treated as
/// not certified.
pub const SEARCH_CAP: f64 = 1e12;
const DENSE: usize = 1 << 12;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Autonomous lower growth `g` with `G(s) = ∫_K^s g`.
#[derive(Clone)]
pub struct Growth1D {
    name: String,
    g: ScalarFn,
    k: f64,
}

impl fmt::Debug for Growth1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Growth1D")
            .field("name", &self.name)
            .field("k", &self.k)
            .finish()
    }
}

impl Growth1D {
    /// Validates `g(0) > 0`, strict monotonicity on a sample grid and a
    /// decreasing tail of `s/sqrt(G(s))` at `s = 10^k`.
    pub fn new(
        name: impl Into<String>,
        g: impl Fn(f64) -> f64 + Send + Sync + 'static,
        k: f64,
    ) -> Result<Self> {
        if !(k > 0.0) || !k.is_finite() {
            return Err(invalid(format!("K must be positive, got {k}")));
        }
        let growth = Self {
            name: name.into(),
            g: Arc::new(g),
            k,
        };
        let g0 = growth.g(0.0);
        if !(g0 > 0.0) {
            return Err(Error::HypothesisViolated(format!(
                "need g(0) > 0, got {g0}"
            )));
        }
        // 0, then geometric from 1e-3 to 1e6
        let mut prev = g0;
        for i in 0..=180 {
            let s = 10f64.powf(-3.0 + i as f64 / 20.0);
            let v = growth.g(s);
            if !(v > prev) && v.is_finite() {
                return Err(Error::HypothesisViolated(format!(
                    "g is not strictly increasing near s = {s}"
                )));
            }
            prev = v;
        }
        let mut prev = f64::INFINITY;
        for e in 1..=6 {
            let s = 10f64.powi(e);
            if s <= k {
                continue;
            }
            let v = s / growth.big_g(s).sqrt();
            if !(v <= prev) {
                return Err(Error::HypothesisViolated(format!(
                    "s/sqrt(G(s)) does not decrease at s = {s}"
                )));
            }
            prev = v;
        }
        Ok(growth)
    }

    /// `s³ + 1`
    pub fn cubic_plus_one(k: f64) -> Result<Self> {
        Self::new("cubic_plus_one", |s: f64| s * s * s + 1.0, k)
    }

    /// `s^p + 1`
    pub fn power_plus_one(p: f64, k: f64) -> Result<Self> {
        if !(p > 1.0) {
            return Err(invalid(format!("power growth needs p > 1, got {p}")));
        }
        Self::new(
            format!("power_plus_one:{p}"),
            move |s: f64| s.powf(p) + 1.0,
            k,
        )
    }

    /// `e^s`
    pub fn exponential(k: f64) -> Result<Self> {
        Self::new("exp", f64::exp, k)
    }

    /// Looks up `cubic_plus_one`, `power_plus_one:<p>` or `exp`.
    pub fn by_name(name: &str, k: f64) -> Result<Self> {
        match name {
            "cubic_plus_one" => Self::cubic_plus_one(k),
            "exp" => Self::exponential(k),
            _ => match name.strip_prefix("power_plus_one:") {
                Some(p) => Self::power_plus_one(
                    p.parse()
                        .map_err(|_| invalid(format!("bad exponent in {name}")))?,
                    k,
                ),
                None => Err(invalid(format!("unknown growth {name}"))),
            },
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn g(&self, s: f64) -> f64 {
        (self.g)(s)
    }

    /// `∫_a^b g`, `+inf` once the integrand overflows.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        if a == b {
            return 0.0;
        }
        let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
        let top = self.g(hi);
        if !top.is_finite() {
            return sign * f64::INFINITY;
        }
        let scale = (hi - lo) * top.abs().max(self.g(lo).abs());
        let out = double_exponential::integrate(|t| self.g(t), lo, hi, (1e-13 * scale).max(1e-10));
        sign * out.integral
    }

    /// `G(s) = ∫_K^s g`, negative below `K`.
    pub fn big_g(&self, s: f64) -> f64 {
        self.integral(self.k, s)
    }
}

/// Result of checking the discrete comparison principle on one function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ComparisonOutcome {
    /// hypotheses hold and `w <= 0`
    Holds,
    /// hypotheses hold but `w > 0` somewhere
    ConclusionFails,
    HypothesisViolated,
}

/// Re-checks `-D⁺D⁻w <= λ_{0,h} w`, `w(a), w(b) <= 0` and `λ_{0,h} < λ_{1,h}`,
/// then reports whether `w <= 0`.
pub fn comparison_holds(w: &GridFunction, lambda0h: f64) -> Result<ComparisonOutcome> {
    let mesh = w.mesh();
    if mesh.dim() != 1 {
        return Err(invalid("comparison principle is one-dimensional"));
    }
    if !(lambda0h < first_eigenvalue(mesh)) {
        return Ok(ComparisonOutcome::HypothesisViolated);
    }
    let v = w.values();
    let n = v.len() - 1;
    if v[0] > 0.0 || v[n] > 0.0 {
        return Ok(ComparisonOutcome::HypothesisViolated);
    }
    let h2 = mesh.spacing()[0].powi(2);
    for k in 1..n {
        let lhs = (2.0 * v[k] - v[k - 1] - v[k + 1]) / h2;
        let rhs = lambda0h * v[k];
        let scale = (v[k - 1].abs() + 2.0 * v[k].abs() + v[k + 1].abs()) / h2 + rhs.abs();
        if lhs - rhs > 1e-12 * scale {
            return Ok(ComparisonOutcome::HypothesisViolated);
        }
    }
    Ok(if v.iter().all(|x| *x <= 0.0) {
        ComparisonOutcome::Holds
    } else {
        ComparisonOutcome::ConclusionFails
    })
}

/// `μ = (4/h²) sin²(πh/(4(b-a)))`
pub fn poisson_mu(a: f64, b: f64, h: f64) -> f64 {
    4.0 / (h * h) * (PI * h / (4.0 * (b - a))).sin().powi(2)
}

fn interval_mesh(a: f64, b: f64, h: f64) -> Result<Mesh> {
    if !(b > a) || !(h > 0.0) {
        return Err(invalid(format!(
            "need a < b and h > 0, got ({a}, {b}, {h})"
        )));
    }
    let ratio = (b - a) / h;
    let n = ratio.round();
    if (ratio - n).abs() > 1e-9 * ratio || n < 2.0 {
        return Err(invalid(format!(
            "(b-a)/h must be an integer >= 2, got {ratio}"
        )));
    }
    Mesh::new(BoxDomain::new(vec![a], vec![b])?, vec![n as usize])
}

/// Solution of `-D⁺D⁻v = μv - A` on `(a,b)_h`, `v(a) = γ`, `v(b) = 0`.
pub fn poisson_closed_form(a: f64, b: f64, h: f64, gamma: f64, big_a: f64) -> Result<GridFunction> {
    if !(gamma >= 0.0) || !(big_a >= 0.0) {
        return Err(invalid(format!(
            "need gamma, A >= 0, got ({gamma}, {big_a})"
        )));
    }
    let mesh = interval_mesh(a, b, h)?;
    let n = mesh.counts()[0];
    let r = big_a / poisson_mu(a, b, mesh.spacing()[0]);
    GridFunction::from_index_fn(&mesh, |idx| {
        if idx[0] == n {
            return 0.0;
        }
        let theta = PI * idx[0] as f64 / (2.0 * n as f64);
        (gamma - r) * theta.cos() - r * theta.sin() + r
    })
}

/// Largest interior residual of `-D⁺D⁻v - μv + A`, relative to the size of the
/// stencil terms.
pub fn poisson_residual(v: &GridFunction, mu: f64, big_a: f64) -> f64 {
    let x = v.values();
    let h2 = v.mesh().spacing()[0].powi(2);
    (1..x.len() - 1)
        .map(|k| {
            let res = (2.0 * x[k] - x[k - 1] - x[k + 1]) / h2 - mu * x[k] + big_a;
            let scale =
                (x[k - 1].abs() + 2.0 * x[k].abs() + x[k + 1].abs()) / h2 + mu * x[k].abs() + big_a;
            if scale == 0.0 {
                0.0
            } else {
                res.abs() / scale
            }
        })
        .fold(0.0, f64::max)
}

/// `(-D⁺v(a), (γ + (b-a)²A) π/(2(b-a)))`
pub fn poisson_slope_bound(v: &GridFunction, gamma: f64, big_a: f64) -> (f64, f64) {
    let mesh = v.mesh();
    let len = mesh.domain().width(0);
    let slope = -(v.values()[1] - v.values()[0]) / mesh.spacing()[0];
    (slope, (gamma + len * len * big_a) * PI / (2.0 * len))
}

/// `(ρ, ok)` pairs are produced lazily by `pred`; finds the threshold past
/// which `pred` holds, certified on `r 2^j` and densely on `[r, 2r]`.
fn tail_threshold(start: f64, what: &str, pred: impl Fn(f64) -> bool + Sync) -> Result<f64> {
    let fail = || Error::NotConverged {
        what: format!("{what} below {SEARCH_CAP:e}"),
        iterations: 0,
    };
    let mut lo = start;
    loop {
        let mut hi = lo * 2.0;
        while !pred(hi) {
            lo = hi;
            hi *= 2.0;
            if hi > SEARCH_CAP {
                return Err(fail());
            }
        }
        for _ in 0..200 {
            if hi - lo <= 1e-12 * hi {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if pred(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let geometric = (0..=40).map(|j| hi * 2f64.powi(j));
        let dense = (1..=256).map(|i| hi * (1.0 + i as f64 / 256.0));
        let probes: Vec<f64> = geometric.chain(dense).collect();
        let bad = probes
            .par_iter()
            .copied()
            .filter(|&r| !pred(r))
            .reduce(|| 0.0, f64::max);
        if bad == 0.0 {
            return Ok(hi);
        }
        lo = bad;
        if lo > SEARCH_CAP {
            return Err(fail());
        }
    }
}

/// Maximum of a scalar function on `[a,b]` by a dense scan and golden-section
/// refinement around the best sample.
pub(crate) fn scan_max(f: impl Fn(f64) -> f64 + Sync, a: f64, b: f64) -> (f64, f64) {
    let step = (b - a) / DENSE as f64;
    let (i, v) = (0..=DENSE)
        .into_par_iter()
        .map(|i| (i, f(a + i as f64 * step)))
        .reduce(
            || (0, f64::NEG_INFINITY),
            |x, y| if y.1 > x.1 { y } else { x },
        );
    let (mut lo, mut hi) = (
        (a + (i as f64 - 1.0) * step).max(a),
        (a + (i as f64 + 1.0) * step).min(b),
    );
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let x1 = hi - ratio * (hi - lo);
        let x2 = lo + ratio * (hi - lo);
        if f(x1) >= f(x2) {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    let x = 0.5 * (lo + hi);
    let fx = f(x);
    if fx > v {
        (x, fx)
    } else {
        (a + i as f64 * step, v)
    }
}

/// `(A, K₁)` with `f(x,s) >= λ₀s - A` for all `s >= 0`, `x ∈ [-L,L]` and
/// `g(s) >= λ₀s` for `s >= K₁`, where `λ₀ = (π/L)²`.
pub fn linear_minorant(
    f: impl Fn(f64, f64) -> f64 + Sync,
    growth: &Growth1D,
    big_l: f64,
) -> Result<(f64, f64)> {
    if !(big_l > 0.0) {
        return Err(invalid(format!("need L > 0, got {big_l}")));
    }
    let lambda0 = (PI / big_l).powi(2);
    let k1 = superlinear_threshold(growth, lambda0)?;
    let (_, a_g) = scan_max(|s| lambda0 * s - growth.g(s), 0.0, k1);
    let a_f = scan_max_2d(|x, s| lambda0 * s - f(x, s), -big_l, big_l, 0.0, k1);
    Ok((a_f.max(a_g).max(0.0), k1))
}

/// Smallest `K₁ >= K` past which `g(s) >= λ₀s`.
fn superlinear_threshold(growth: &Growth1D, lambda0: f64) -> Result<f64> {
    let k = growth.k();
    let ok = |s: f64| growth.g(s) >= lambda0 * s;
    let mut top = k.max(1.0);
    while !(0..=40).all(|j| ok(top * 2f64.powi(j))) {
        top *= 2.0;
        if top > SEARCH_CAP {
            return Err(Error::NotConverged {
                what: "g(s) >= λ₀s threshold".into(),
                iterations: 0,
            });
        }
    }
    let step = (top - k) / DENSE as f64;
    let last_bad = (0..=DENSE).rev().find(|&i| !ok(k + i as f64 * step));
    let Some(i) = last_bad else { return Ok(k) };
    let (mut lo, mut hi) = (k + i as f64 * step, k + (i + 1) as f64 * step);
    while hi - lo > 1e-14 * hi {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

fn scan_max_2d(f: impl Fn(f64, f64) -> f64 + Sync, x0: f64, x1: f64, s0: f64, s1: f64) -> f64 {
    let mut bx = (x0, x1);
    let mut bs = (s0, s1);
    let mut best = f64::NEG_INFINITY;
    let mut pts = DENSE;
    for _ in 0..4 {
        let (dx, ds) = ((bx.1 - bx.0) / pts as f64, (bs.1 - bs.0) / pts as f64);
        let (i, j, v) = (0..=pts)
            .into_par_iter()
            .map(|i| {
                let x = bx.0 + i as f64 * dx;
                (0..=pts).map(|j| (i, j, f(x, bs.0 + j as f64 * ds))).fold(
                    (0, 0, f64::NEG_INFINITY),
                    |a, b| if b.2 > a.2 { b } else { a },
                )
            })
            .reduce(
                || (0, 0, f64::NEG_INFINITY),
                |a, b| if b.2 > a.2 { b } else { a },
            );
        best = best.max(v);
        let (cx, cs) = (bx.0 + i as f64 * dx, bs.0 + j as f64 * ds);
        bx = ((cx - dx).max(x0), (cx + dx).min(x1));
        bs = ((cs - ds).max(s0), (cs + ds).min(s1));
        pts = 64;
    }
    best
}

/// `(∫₀^R ds/sqrt(G(R)-G(s)), 2R/sqrt(G(R)))`.
pub fn kappa_tail_check(growth: &Growth1D, r: f64) -> Result<(f64, f64)> {
    if !(r > growth.k()) {
        return Err(invalid(format!("need R > K = {}, got {r}", growth.k())));
    }
    let gr = growth.big_g(r);
    // s = R - t² removes the inverse square root at s = R
    let integrand = |t: f64| {
        if t == 0.0 {
            return 2.0 / growth.g(r).sqrt();
        }
        2.0 * t / growth.integral(r - t * t, r).sqrt()
    };
    let out = double_exponential::integrate(integrand, 0.0, r.sqrt(), 1e-8);
    if !out.integral.is_finite() {
        return Err(Error::NotConverged {
            what: "kappa quadrature".into(),
            iterations: out.num_function_evaluations as usize,
        });
    }
    Ok((out.integral, 2.0 * r / gr.sqrt()))
}

/// Constants of the one-dimensional a priori bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bound1DReport {
    #[serde(rename = "lambda0")]
    pub lambda0: f64,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "K1")]
    pub k1: f64,
    #[serde(rename = "R1")]
    pub r1: f64,
    #[serde(rename = "Rbound")]
    pub rbound: f64,
    #[serde(rename = "Mbar")]
    pub mbar: f64,
}

/// `M̄ >= ‖u‖_∞` for nonnegative solutions on `(-L, L)` with `f >= g` above `K`.
pub fn apriori_bound_1d(
    f: impl Fn(f64, f64) -> f64 + Sync,
    growth: &Growth1D,
    big_l: f64,
) -> Result<Bound1DReport> {
    let (a, k1) = linear_minorant(&f, growth, big_l)?;
    let k = growth.k();
    let r1 = tail_threshold(k, "2ρ/sqrt(G(ρ)) <= L/2", |rho| {
        let g = growth.big_g(rho);
        g > 0.0 && 2.0 * rho / g.sqrt() <= 0.5 * big_l
    })?;
    let level = growth.big_g(k) / (k * k) + (PI / big_l + a * PI * big_l / (2.0 * k)).powi(2);
    let rbound = tail_threshold(k, "G(ρ)/ρ² threshold", |rho| {
        growth.big_g(rho) / (rho * rho) > level
    })?;
    let mbar = 2.0 * r1.max(rbound) + a * big_l * big_l / 16.0;
    Ok(Bound1DReport {
        lambda0: (PI / big_l).powi(2),
        a,
        k1,
        r1,
        rbound,
        mbar,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cubic() -> Growth1D {
        Growth1D::cubic_plus_one(1.0).unwrap()
    }

    #[test]
    fn growth_validation() {
        assert!(Growth1D::new("neg", |s: f64| s * s * s - 1.0, 1.0).is_err());
        assert!(Growth1D::new("linear", |s: f64| s + 1.0, 1.0).is_err());
        assert!(Growth1D::new("flat", |_s: f64| 1.0, 1.0).is_err());
        assert!(Growth1D::by_name("power_plus_one:2.5", 1.0).is_ok());
        assert!(Growth1D::by_name("exp", 1.0).is_ok());
        assert!(Growth1D::by_name("sqrt", 1.0).is_err());
        assert!((cubic().big_g(2.0) - 4.75).abs() < 1e-12);
        assert!((cubic().big_g(10.0) - 2508.75).abs() < 1e-9);
        assert!(cubic().big_g(0.5) < 0.0);
    }

    #[test]
    fn comparison_examples() {
        let mesh = Mesh::new(BoxDomain::unit(1).unwrap(), vec![16]).unwrap();
        let zero = GridFunction::zeros(&mesh);
        assert_eq!(
            comparison_holds(&zero, 0.0).unwrap(),
            ComparisonOutcome::Holds
        );
        let phi = crate::spectral::first_eigenpair(&mesh).phi;
        assert_eq!(
            comparison_holds(&phi.scaled(-1.0).unwrap(), 0.0).unwrap(),
            ComparisonOutcome::Holds
        );
        assert_eq!(
            comparison_holds(&phi, 0.0).unwrap(),
            ComparisonOutcome::HypothesisViolated
        );
        assert_eq!(
            comparison_holds(&zero, 1e6).unwrap(),
            ComparisonOutcome::HypothesisViolated
        );
    }

    #[test]
    fn poisson_cosine() {
        let v = poisson_closed_form(0.0, 1.0, 0.25, 1.0, 0.0).unwrap();
        for (k, x) in v.values().iter().enumerate() {
            assert!((x - (PI * k as f64 * 0.25 / 2.0).cos()).abs() < 1e-15);
        }
        assert!(poisson_residual(&v, poisson_mu(0.0, 1.0, 0.25), 0.0) <= 1e-13);
        assert_eq!(
            poisson_closed_form(0.0, 1.0, 0.25, 0.0, 0.0)
                .unwrap()
                .max_abs(),
            0.0
        );
        assert!(poisson_closed_form(0.0, 1.0, 0.3, 0.0, 0.0).is_err());
        assert!(poisson_closed_form(0.0, 1.0, 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn poisson_endpoint_with_unit_ratio() {
        let mu = poisson_mu(0.0, 1.0, 0.125);
        let v = poisson_closed_form(0.0, 1.0, 0.125, 0.0, mu).unwrap();
        // γ - A/μ = -1, A/μ = 1: v = 1 - cos - sin
        assert_eq!(v.values()[8], 0.0);
        assert_eq!(v.values()[0], 0.0);
        let th = PI * 3.0 / 16.0;
        assert!((v.values()[3] - (1.0 - th.cos() - th.sin())).abs() < 1e-15);
        assert!(poisson_residual(&v, mu, mu) < 1e-13);
        assert!(mu < first_eigenvalue(v.mesh()));
    }

    #[test]
    fn cubic_minorant() {
        let g = cubic();
        let (a, k1) = linear_minorant(|_, s| s * s * s + 1.0, &g, 1.0).unwrap();
        let pi2 = PI * PI;
        // largest root of s³ - π²s + 1 by bisection
        let (mut lo, mut hi) = (2.0f64, 4.0f64);
        for _ in 0..100 {
            let m = 0.5 * (lo + hi);
            if m * m * m - pi2 * m + 1.0 > 0.0 {
                hi = m
            } else {
                lo = m
            }
        }
        assert!((k1 - hi).abs() < 1e-10 && k1 <= 3.1, "{k1}");
        let s = (pi2 / 3.0).sqrt();
        assert!((a - (pi2 * s - s * s * s - 1.0)).abs() < 1e-9, "{a}");
        assert!((a - 10.93).abs() < 0.01);
    }

    #[test]
    fn kappa_examples() {
        let g = cubic();
        let (i, b) = kappa_tail_check(&g, 2.0).unwrap();
        assert!((b - 4.0 / 4.75f64.sqrt()).abs() < 1e-12);
        assert!(i <= b && i > 0.0);
        let (i, b) = kappa_tail_check(&g, 10.0).unwrap();
        assert!((b - 20.0 / 2508.75f64.sqrt()).abs() < 1e-12);
        assert!(i <= b);
        let (i, b) = kappa_tail_check(&g, 1.0 + 1e-6).unwrap();
        assert!(i.is_finite() && b.is_finite());
        assert!(kappa_tail_check(&g, 0.5).is_err());
    }

    #[test]
    fn cubic_bound() {
        let g = cubic();
        let r = apriori_bound_1d(|_, s| s * s * s + 1.0, &g, 1.0).unwrap();
        assert!(r.mbar.is_finite() && r.mbar >= 2.0 * g.k());
        assert!((r.mbar - (2.0 * r.r1.max(r.rbound) + r.a / 16.0)).abs() < 1e-12 * r.mbar);
        // independent bracket for 2ρ/sqrt(G(ρ)) = 1/2, G in closed form
        let big_g = |x: f64| (x.powi(4) - 1.0) / 4.0 + x - 1.0;
        let (mut lo, mut hi) = (1.5f64, 1e3f64);
        for _ in 0..200 {
            let m = 0.5 * (lo + hi);
            if 2.0 * m / big_g(m).sqrt() <= 0.5 {
                hi = m
            } else {
                lo = m
            }
        }
        assert!((r.r1 - hi).abs() < 1e-8 * hi, "{} vs {hi}", r.r1);
        let mut prev = r.mbar;
        for l in [0.5, 0.25] {
            let m = apriori_bound_1d(|_, s| s * s * s + 1.0, &g, l)
                .unwrap()
                .mbar;
            assert!(m > prev);
            prev = m;
        }
    }
}
