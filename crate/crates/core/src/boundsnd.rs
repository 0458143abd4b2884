//! Moser-iteration L∞ bounds for linear and subcritical nonlinear difference
//! equations in `n >= 2` dimensions, and the full a priori bound pipeline.

use rayon::prelude::*;
use serde::Serialize;

use crate::calculus::discrete_laplacian;
use crate::error::{invalid, Error, Result};
use crate::grid::{BoxDomain, GridFunction};
use crate::inequalities::{
    hardy_sobolev_constant, poincare_upper, sobolev2_constant, sobolev_constant, HsParams,
};
use crate::norms::lp_norm;

/// Exponents of one Moser iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MoserParams {
    n: usize,
    q: f64,
    n_hat: Option<f64>,
}

impl MoserParams {
    /// `q > n/2` for `n >= 3`; for `n = 2` an auxiliary `n̂` with `q > n̂/2 > 1`.
    pub fn new(n: usize, q: f64, n_hat: Option<f64>) -> Result<Self> {
        match (n, n_hat) {
            (0 | 1, _) => Err(invalid(format!("Moser bounds need n >= 2, got {n}"))),
            (2, Some(m)) => {
                if !(m / 2.0 > 1.0) || !(q > m / 2.0) {
                    return Err(Error::HypothesisViolated(format!(
                        "need q > n̂/2 > 1, got q = {q}, n̂ = {m}"
                    )));
                }
                Ok(Self { n, q, n_hat })
            }
            (2, None) => Err(invalid("n = 2 needs an auxiliary dimension n̂")),
            (_, Some(_)) => Err(invalid("n̂ is only used for n = 2")),
            (_, None) => {
                if !(q > n as f64 / 2.0) || !q.is_finite() {
                    return Err(Error::HypothesisViolated(format!(
                        "need q > n/2 = {}, got q = {q}",
                        n as f64 / 2.0
                    )));
                }
                Ok(Self { n, q, n_hat })
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn n_hat(&self) -> Option<f64> {
        self.n_hat
    }

    /// `q' = q/(q-1)`
    pub fn q_prime(&self) -> f64 {
        self.q / (self.q - 1.0)
    }

    /// `n` for `n >= 3`, `n̂` for `n = 2`.
    pub fn effective_dim(&self) -> f64 {
        self.n_hat.unwrap_or(self.n as f64)
    }

    /// Growth factor `l = m/((m-2)q')` of `t_k = l^k`.
    pub fn l(&self) -> f64 {
        let m = self.effective_dim();
        m / ((m - 2.0) * self.q_prime())
    }

    /// `(m(q-1)/(2q-m))²`
    pub fn exponent(&self) -> f64 {
        let m = self.effective_dim();
        (m * (self.q - 1.0) / (2.0 * self.q - m)).powi(2)
    }

    /// Dimension-dependent prefactor of `‖|a|+1‖^{1/2}` in the iteration constant `C`.
    fn sobolev_factor(&self, domain: &BoxDomain) -> Result<f64> {
        match self.n_hat {
            Some(m) => {
                Ok(4.0 * m / (m - 2.0) * sobolev2_constant() * (1.0 + poincare_upper(domain)))
            }
            None => sobolev_constant(self.n),
        }
    }
}

/// Iteration constant `C` with `m_{k+1} <= (t_k C)^{1/t_k} (...)`.
pub fn moser_c(params: &MoserParams, a_norm_lq: f64, domain: &BoxDomain) -> Result<f64> {
    check_dim(params, domain)?;
    Ok(params.sobolev_factor(domain)? * a_norm_lq.sqrt())
}

fn check_dim(params: &MoserParams, domain: &BoxDomain) -> Result<()> {
    if params.n != domain.dim() {
        return Err(invalid(format!(
            "parameters are for n = {}, domain has n = {}",
            params.n,
            domain.dim()
        )));
    }
    Ok(())
}

/// `K = max{l, sqrt(2) C}^{(m(q-1)/(2q-m))²}` for the given `‖|a|+1‖_{L^q}`.
pub fn moser_k(params: &MoserParams, a_norm_lq: f64, domain: &BoxDomain) -> Result<f64> {
    let c = moser_c(params, a_norm_lq, domain)?;
    Ok(params.l().max(2f64.sqrt() * c).powf(params.exponent()))
}

/// `(2K)^{q'} ‖u‖_{L²} + 2K ‖b‖_∞ (1 + |Ω|)`.
pub fn linear_linf_bound(
    params: &MoserParams,
    u_l2: f64,
    b_inf: f64,
    a_norm_lq: f64,
    domain: &BoxDomain,
) -> Result<f64> {
    if u_l2 < 0.0 || b_inf < 0.0 || a_norm_lq < 0.0 {
        return Err(invalid("norms must be nonnegative"));
    }
    let k = moser_k(params, a_norm_lq, domain)?;
    Ok((2.0 * k).powf(params.q_prime()) * u_l2 + 2.0 * k * b_inf * (1.0 + domain.volume()))
}

/// `K_u` of the nonlinear Moser bound given `‖u‖_D` and `|f(x,s)| <= C2|s|^p + C3`.
pub fn nonlinear_ku(
    params: &MoserParams,
    p: f64,
    c2: f64,
    u_dnorm: f64,
    domain: &BoxDomain,
) -> Result<f64> {
    check_dim(params, domain)?;
    if !(p > 1.0) {
        return Err(invalid(format!("need p > 1, got {p}")));
    }
    let n = params.n as f64;
    let q = params.q;
    let vol_q = domain.volume().powf(1.0 / q);
    let arg = match params.n_hat {
        None => {
            let pc = (n + 2.0) / (n - 2.0);
            if p >= pc {
                return Err(Error::HypothesisViolated(format!(
                    "need p < (n+2)/(n-2) = {pc}, got p = {p}"
                )));
            }
            let q_exact = 2.0 * n / ((n - 2.0) * (p - 1.0));
            if (q - q_exact).abs() > 1e-12 * q_exact {
                return Err(invalid(format!(
                    "for n >= 3 the exponent is q = 2n/((n-2)(p-1)) = {q_exact}, got {q}"
                )));
            }
            let cs = sobolev_constant(params.n)?;
            cs * 2f64.sqrt() * (c2 * cs.powf(p - 1.0) * u_dnorm.powf(p - 1.0) + vol_q).sqrt()
        }
        Some(m) => {
            let qmin = (2.0 / (p - 1.0)).max(1.0);
            if !(q > qmin) {
                return Err(Error::HypothesisViolated(format!(
                    "need q > max(1, 2/(p-1)) = {qmin}, got {q}"
                )));
            }
            let cp = poincare_upper(domain);
            4.0 * m / (m - 2.0)
                * (2.0 * sobolev2_constant() * (1.0 + cp) * q * (p - 1.0)).powf((p + 1.0) / 2.0)
                * (c2 * u_dnorm.powf(p - 1.0) + vol_q).sqrt()
        }
    };
    Ok(params.l().max(arg).powf(params.exponent()))
}

/// Output of the D-norm stage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DNormBound {
    pub p_tilde: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta: f64,
    pub c_hs1: f64,
    pub c_hs2: f64,
    /// Second argument of the max bounding `‖u‖_D^{p̃-p}`
    pub max_argument: f64,
    pub d_norm_bound: f64,
}

fn check_pipeline_inputs(
    n: usize,
    p: f64,
    lambda: f64,
    cs: [f64; 3],
    domain: &BoxDomain,
) -> Result<()> {
    if domain.dim() != n || n < 2 {
        return Err(invalid(format!(
            "need n >= 2 matching the domain, got n = {n}, domain n = {}",
            domain.dim()
        )));
    }
    let pc = n as f64 / (n as f64 - 1.0);
    if !(p > 1.0 && p < pc) {
        return Err(Error::HypothesisViolated(format!(
            "need 1 < p < n/(n-1) = {pc}, got p = {p}"
        )));
    }
    let l1 = domain.first_eigenvalue();
    if !(lambda > l1) {
        return Err(Error::HypothesisViolated(format!(
            "need lambda > lambda_1 = {l1}, got {lambda}"
        )));
    }
    if cs.iter().any(|c| !(*c >= 0.0) || !c.is_finite()) {
        return Err(invalid(format!(
            "constants C1, C2, C3 must be finite and nonnegative, got {cs:?}"
        )));
    }
    Ok(())
}

/// Bound on `‖u‖_D` for nonnegative solutions with `f >= λs - C1`, `f <= C2 s^p + C3`.
pub fn dnorm_apriori(
    n: usize,
    p: f64,
    lambda: f64,
    c1: f64,
    c2: f64,
    c3: f64,
    domain: &BoxDomain,
) -> Result<DNormBound> {
    check_pipeline_inputs(n, p, lambda, [c1, c2, c3], domain)?;
    let nf = n as f64;
    let p_tilde = 0.5 * (p + nf / (nf - 1.0));
    let beta = nf * (p_tilde - 1.0);
    let (alpha1, alpha2) = (p + p_tilde, p_tilde);
    let c_hs1 = hardy_sobolev_constant(&HsParams::new(alpha1, beta, n)?, domain)?;
    let c_hs2 = hardy_sobolev_constant(&HsParams::new(alpha2, beta, n)?, domain)?;
    let l1 = domain.first_eigenvalue();
    let vol = domain.volume();
    let base = c1 * l1 * vol * vol / ((lambda - l1) * 2f64.powi(n as i32));
    let max_argument = base.powf(p_tilde - 1.0) * (c2 * c_hs1 + c3 * c_hs2);
    let d_norm_bound = max_argument.max(1.0).powf(1.0 / (p_tilde - p));
    Ok(DNormBound {
        p_tilde,
        alpha1,
        alpha2,
        beta,
        c_hs1,
        c_hs2,
        max_argument,
        d_norm_bound,
    })
}

/// Every constant of the n-dimensional a priori bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NdBoundReport {
    pub n: usize,
    pub p: f64,
    pub lambda: f64,
    pub lambda1: f64,
    pub poincare: f64,
    pub p_tilde: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta: f64,
    pub d_norm_bound: f64,
    pub q: f64,
    pub q_prime: f64,
    pub n_hat: Option<f64>,
    pub ku: f64,
    pub mbar: f64,
}

const Q_FACTORS: [f64; 4] = [1.1, 1.5, 2.0, 4.0];
const N_HATS: [f64; 4] = [2.2, 2.5, 3.0, 4.0];

/// `M̄ >= ‖u‖_∞` for every nonnegative solution under the growth hypotheses.
///
/// For `n = 2` the free exponents `(q, n̂)` are taken from a fixed grid and the
/// smallest finite `M̄` is returned.
pub fn apriori_bound_nd(
    n: usize,
    p: f64,
    lambda: f64,
    c1: f64,
    c2: f64,
    c3: f64,
    domain: &BoxDomain,
) -> Result<NdBoundReport> {
    let dn = dnorm_apriori(n, p, lambda, c1, c2, c3, domain)?;
    let cp = poincare_upper(domain);
    let vol = domain.volume();
    let candidates: Vec<MoserParams> = if n >= 3 {
        vec![MoserParams::new(
            n,
            2.0 * n as f64 / ((n as f64 - 2.0) * (p - 1.0)),
            None,
        )?]
    } else {
        let q0 = (2.0 / (p - 1.0)).max(1.01);
        Q_FACTORS
            .iter()
            .flat_map(|f| {
                N_HATS
                    .iter()
                    .filter_map(move |&m| MoserParams::new(2, q0 * f, Some(m)).ok())
            })
            .collect()
    };
    let best = candidates
        .par_iter()
        .map(|params| {
            let ku = nonlinear_ku(params, p, c2, dn.d_norm_bound, domain)?;
            let mbar = (2.0 * ku).powf(params.q_prime()) * cp * dn.d_norm_bound
                + 2.0 * ku * c3 * (1.0 + vol);
            Ok((*params, ku, mbar))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|(_, _, m)| m.is_finite())
        .min_by(|a, b| a.2.total_cmp(&b.2));
    let (params, ku, mbar) =
        best.ok_or_else(|| Error::NonFinite("every candidate bound overflowed".into()))?;
    Ok(NdBoundReport {
        n,
        p,
        lambda,
        lambda1: domain.first_eigenvalue(),
        poincare: cp,
        p_tilde: dn.p_tilde,
        alpha1: dn.alpha1,
        alpha2: dn.alpha2,
        beta: dn.beta,
        d_norm_bound: dn.d_norm_bound,
        q: params.q(),
        q_prime: params.q_prime(),
        n_hat: params.n_hat(),
        ku,
        mbar,
    })
}

/// One step of the Moser trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MoserStep {
    pub k: usize,
    pub t: f64,
    /// `‖u₊‖_{L^{2q' t_k}}`
    pub m: f64,
    /// comparison sequence from the iteration
    pub m_tilde: f64,
}

/// Measured `m_k` against the comparison sequence `m̃_k` for a solution of
/// `-Δ_h u = a u + b`.
pub fn moser_iteration_trace(
    u: &GridFunction,
    a: &GridFunction,
    b: &GridFunction,
    params: &MoserParams,
    steps: usize,
) -> Result<Vec<MoserStep>> {
    u.same_mesh(a)?;
    u.same_mesh(b)?;
    let mesh = u.mesh();
    check_dim(params, mesh.domain())?;
    let lap = discrete_laplacian(u);
    let mut res: f64 = 0.0;
    let mut scale: f64 = 1.0;
    for k in mesh.interior_indices() {
        let rhs = a.at(k) * u.at(k) + b.at(k);
        res = res.max((-lap.at(k) - rhs).abs());
        scale = scale.max(rhs.abs());
    }
    if res > 1e-8 * scale {
        return Err(Error::InvalidParameter(format!(
            "u does not solve the linear equation, residual {res:e}"
        )));
    }
    let a1 = GridFunction::from_index_fn(mesh, |idx| {
        if mesh.is_interior(idx) {
            a.at(mesh.flat_unchecked(idx)).abs() + 1.0
        } else {
            0.0
        }
    })?;
    let c = moser_c(params, lp_norm(&a1, params.q)?, mesh.domain())?;
    let up = u.positive_part();
    let b_inf = b
        .interior_values()
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let qp = params.q_prime();
    let l = params.l();
    let mut out = Vec::with_capacity(steps + 1);
    let mut m_tilde = lp_norm(&up, 2.0 * qp)? + b_inf * (1.0 + mesh.domain().volume());
    for k in 0..=steps {
        let t = l.powi(k as i32);
        out.push(MoserStep {
            k,
            t,
            m: lp_norm(&up, 2.0 * qp * t)?,
            m_tilde,
        });
        m_tilde *= (t * 2f64.sqrt() * c).powf(1.0 / t);
    }
    Ok(out)
}

/// `(y^{2s+1} - z^{2s+1})(y - z)/(y^{s+1} - z^{s+1})²`, continuous at `y = z`.
pub fn moser_quotient(s: f64, y: f64, z: f64) -> f64 {
    let (hi, lo) = if y >= z { (y, z) } else { (z, y) };
    if hi == 0.0 || hi == lo {
        return (2.0 * s + 1.0) / ((s + 1.0) * (s + 1.0));
    }
    if lo == 0.0 {
        return 1.0;
    }
    // with r = lo/hi, 1 - r^c = -expm1(c ln r)
    let lr = (lo / hi).ln();
    ((2.0 * s + 1.0) * lr).exp_m1() * lr.exp_m1() / ((s + 1.0) * lr).exp_m1().powi(2)
}

/// `(‖u₊‖_{L^β}, ε‖u₊‖_{L^γ} + ε^{-μ}‖u₊‖_{L^α})` with
/// `μ = (1/α - 1/β)/(1/β - 1/γ)`; `γ = ∞` is allowed.
pub fn interpolation_inequality(
    u: &GridFunction,
    alpha: f64,
    beta: f64,
    gamma: f64,
    eps: f64,
) -> Result<(f64, f64)> {
    if !(1.0 <= alpha && alpha <= beta && beta < gamma) || !(eps > 0.0) {
        return Err(invalid(format!(
            "need 1 <= alpha <= beta < gamma and eps > 0, got ({alpha}, {beta}, {gamma}, {eps})"
        )));
    }
    let up = u.positive_part();
    let inv_g = if gamma.is_infinite() {
        0.0
    } else {
        1.0 / gamma
    };
    let mu = (1.0 / alpha - 1.0 / beta) / (1.0 / beta - inv_g);
    let ng = if gamma.is_infinite() {
        up.max_abs()
    } else {
        lp_norm(&up, gamma)?
    };
    Ok((
        lp_norm(&up, beta)?,
        eps * ng + eps.powf(-mu) * lp_norm(&up, alpha)?,
    ))
}

/// Smallest relative gap of `D_i^+u D_i^+φ - D_i^+u₊ D_i^+φ` with
/// `φ = u₊^{2s+1}` over all edges; nonnegative when the test-function
/// inequality holds.
pub fn test_function_gap(u: &GridFunction, s: f64) -> f64 {
    let mesh = u.mesh();
    let v = u.values();
    let mut idx = vec![0usize; mesh.dim()];
    let mut worst = f64::INFINITY;
    for k in 0..mesh.len() {
        mesh.multi_index_into(k, &mut idx);
        for i in 0..mesh.dim() {
            if idx[i] == mesh.counts()[i] {
                continue;
            }
            let (x0, x1) = (v[k], v[k + mesh.stride(i)]);
            let h = mesh.spacing()[i];
            let dphi = (x1.max(0.0).powf(2.0 * s + 1.0) - x0.max(0.0).powf(2.0 * s + 1.0)) / h;
            let lhs = (x1 - x0) / h * dphi;
            let rhs = (x1.max(0.0) - x0.max(0.0)) / h * dphi;
            let scale = lhs.abs().max(rhs.abs());
            let gap = if scale == 0.0 {
                0.0
            } else {
                (lhs - rhs) / scale
            };
            worst = worst.min(gap);
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_arithmetic() {
        let p = MoserParams::new(3, 3.0, None).unwrap();
        assert!((p.q_prime() - 1.5).abs() < 1e-15);
        assert!((p.exponent() - 4.0).abs() < 1e-12);
        assert!((p.l() - 2.0).abs() < 1e-12);
        let cube = BoxDomain::unit(3).unwrap();
        let k = moser_k(&p, 1.0, &cube).unwrap();
        let expected = 2.0f64
            .max(sobolev_constant(3).unwrap() * 2f64.sqrt())
            .powf(4.0);
        assert!((k - expected).abs() < 1e-9 * expected);
    }

    #[test]
    fn parameter_validation() {
        assert!(MoserParams::new(3, 1.5, None).is_err());
        assert!(MoserParams::new(2, 4.0, Some(3.0)).is_ok());
        assert!(MoserParams::new(2, 1.4, Some(3.0)).is_err());
        assert!(MoserParams::new(2, 4.0, Some(2.0)).is_err());
        assert!(MoserParams::new(2, 4.0, None).is_err());
        let sq = BoxDomain::unit(2).unwrap();
        assert!(
            moser_k(&MoserParams::new(2, 4.0, Some(3.0)).unwrap(), 1.0, &sq)
                .unwrap()
                .is_finite()
        );
    }

    #[test]
    fn linear_bound_is_linear_in_b() {
        let sq = BoxDomain::unit(2).unwrap();
        let p = MoserParams::new(2, 4.0, Some(3.0)).unwrap();
        assert_eq!(linear_linf_bound(&p, 0.0, 0.0, 1.0, &sq).unwrap(), 0.0);
        let one = linear_linf_bound(&p, 0.0, 1.0, 1.0, &sq).unwrap();
        let two = linear_linf_bound(&p, 0.0, 2.0, 1.0, &sq).unwrap();
        assert!((two - 2.0 * one).abs() <= 1e-15 * two);
    }

    #[test]
    fn nonlinear_q_for_three_dimensions() {
        let p = 1.4;
        let q: f64 = 6.0 / 0.4;
        assert!((q - 15.0).abs() < 1e-12);
        let params = MoserParams::new(3, q, None).unwrap();
        assert!((params.q_prime() - 15.0 / 14.0).abs() < 1e-14);
        let cube = BoxDomain::unit(3).unwrap();
        assert!(nonlinear_ku(&params, p, 1.0, 0.0, &cube)
            .unwrap()
            .is_finite());
        assert!(nonlinear_ku(
            &MoserParams::new(3, 10.0, None).unwrap(),
            p,
            1.0,
            0.0,
            &cube
        )
        .is_err());
        assert!(nonlinear_ku(
            &MoserParams::new(3, 1.6, None).unwrap(),
            6.0,
            1.0,
            0.0,
            &cube
        )
        .is_err());
        let sq = BoxDomain::unit(2).unwrap();
        assert!(nonlinear_ku(
            &MoserParams::new(2, 3.9, Some(3.0)).unwrap(),
            1.5,
            1.0,
            1.0,
            &sq
        )
        .is_err());
    }

    #[test]
    fn pipeline_exponents() {
        let sq = BoxDomain::unit(2).unwrap();
        let l1 = sq.first_eigenvalue();
        let d = dnorm_apriori(2, 1.5, 2.0 * l1, 1.0, 1.0, 1.0, &sq).unwrap();
        assert!((d.p_tilde - 1.75).abs() < 1e-15);
        assert!((d.beta - 1.5).abs() < 1e-15);
        assert!((d.alpha1 - 3.25).abs() < 1e-15 && (d.alpha2 - 1.75).abs() < 1e-15);
        let cube = BoxDomain::unit(3).unwrap();
        let d3 =
            dnorm_apriori(3, 1.2, 2.0 * cube.first_eigenvalue(), 1.0, 1.0, 1.0, &cube).unwrap();
        assert!((d3.p_tilde - 1.35).abs() < 1e-14 && (d3.beta - 1.05).abs() < 1e-14);
        assert!(d3.alpha1 <= HsParams::alpha_max(d3.beta, 3));
        assert!(dnorm_apriori(2, 1.5, l1, 1.0, 1.0, 1.0, &sq).is_err());
        assert!(dnorm_apriori(2, 2.5, 2.0 * l1, 1.0, 1.0, 1.0, &sq).is_err());
    }

    #[test]
    fn degenerate_constants() {
        let sq = BoxDomain::unit(2).unwrap();
        let r = apriori_bound_nd(2, 1.5, 30.0, 0.0, 0.0, 0.0, &sq).unwrap();
        assert_eq!(r.d_norm_bound, 1.0);
        let expected = (2.0 * r.ku).powf(r.q_prime) * r.poincare;
        assert!((r.mbar - expected).abs() <= 1e-12 * expected);
    }

    #[test]
    fn bound_is_monotone_in_growth_constants() {
        let sq = BoxDomain::unit(2).unwrap();
        let lam = 2.0 * sq.first_eigenvalue();
        let mut prev = 0.0;
        for c in [0.5, 1.0, 2.0, 4.0] {
            let m = apriori_bound_nd(2, 1.5, lam, 1.0, c, 1.0, &sq)
                .unwrap()
                .mbar;
            assert!(m >= prev);
            prev = m;
        }
        let mut prev = 0.0;
        for c in [0.5, 1.0, 2.0, 4.0] {
            let m = apriori_bound_nd(2, 1.5, lam, 1.0, 1.0, c, &sq)
                .unwrap()
                .mbar;
            assert!(m >= prev);
            prev = m;
        }
    }

    #[test]
    fn quotient_limits() {
        for s in [0.0, 0.5, 1.0, 3.0] {
            assert!(
                (moser_quotient(s, 2.0, 2.0) - (2.0 * s + 1.0) / (s + 1.0).powi(2)).abs() < 1e-15
            );
            assert!(
                (moser_quotient(s, 2.0, 2.0 * (1.0 + 1e-9)) - moser_quotient(s, 2.0, 2.0)).abs()
                    < 1e-8
            );
            assert_eq!(moser_quotient(s, 0.0, 1.5), 1.0);
        }
        assert!((moser_quotient(0.0, 1.0, 3.0) - 1.0).abs() < 1e-15);
    }

    fn unit_load() -> (GridFunction, GridFunction, GridFunction) {
        let m = crate::grid::Mesh::uniform(BoxDomain::unit(2).unwrap(), 24).unwrap();
        let zero = GridFunction::zeros(&m);
        let one = GridFunction::from_interior(&m, &vec![1.0; m.interior_len()]).unwrap();
        let u = crate::solver::solve_linear(&m, &zero, &one).unwrap();
        (u, zero, one)
    }

    #[test]
    fn trace_dominated_on_unit_load() {
        let (u, a, b) = unit_load();
        let params = MoserParams::new(2, 4.0, Some(3.0)).unwrap();
        let trace = moser_iteration_trace(&u, &a, &b, &params, 8).unwrap();
        assert_eq!(trace.len(), 9);
        for s in &trace {
            assert!(s.m <= s.m_tilde, "{s:?}");
        }
        let bound = linear_linf_bound(
            &params,
            lp_norm(&u, 2.0).unwrap(),
            1.0,
            1.0,
            u.mesh().domain(),
        )
        .unwrap();
        assert!(bound >= u.max_abs());
        // a non-solution is rejected
        assert!(moser_iteration_trace(&u.scaled(2.0).unwrap(), &a, &b, &params, 3).is_err());
    }

    #[test]
    fn interpolation_and_test_function() {
        let m = crate::grid::Mesh::new(BoxDomain::unit(2).unwrap(), vec![9, 7]).unwrap();
        for i in 0..20 {
            let (_, u) = crate::sampling::random_sample(&m, 5, i);
            let qp = 1.5;
            for eps in [0.1, 1.0, 10.0] {
                let (lhs, rhs) =
                    interpolation_inequality(&u, 2.0, 2.0 * qp, f64::INFINITY, eps).unwrap();
                assert!(lhs <= rhs * (1.0 + 1e-12));
            }
            for s in [0.0, 0.5, 2.0] {
                assert!(test_function_gap(&u, s) >= -1e-12);
            }
        }
        assert!(interpolation_inequality(&GridFunction::zeros(&m), 3.0, 2.0, 4.0, 1.0).is_err());
    }
}
