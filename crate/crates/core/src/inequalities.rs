//! Explicit constants of the discrete Poincaré, Sobolev, Hardy and
//! Hardy–Sobolev inequalities, and randomized checks of each.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::grid::{BoxDomain, GridFunction, Mesh};
use crate::norms::{d_norm_squared, lp_norm, lp_power_sum, orlicz_norm, weighted_sum};
use crate::sampling::{adversaries, random_sample, sample_seed};
use crate::spectral::first_eigenvalue;

/// Constant of the discrete Hardy inequality on boxes.
pub const HARDY_CONSTANT: f64 = 4.0;

/// Bracket for the Poincaré constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoincareConstants {
    /// `1/sqrt(λ_{1,h})`, the sharp value on this mesh
    pub lower: f64,
    /// `sqrt(Σ (b_i - a_i)²)/(2n)`, independent of `h`
    pub upper: f64,
}

pub fn poincare_constant(mesh: &Mesh) -> PoincareConstants {
    PoincareConstants {
        lower: 1.0 / first_eigenvalue(mesh).sqrt(),
        upper: poincare_upper(mesh.domain()),
    }
}

/// Mesh-independent Poincaré constant `sqrt(Σ (b_i - a_i)²)/(2n)`.
pub fn poincare_upper(domain: &BoxDomain) -> f64 {
    domain.diagonal() / (2.0 * domain.dim() as f64)
}

/// `C_S(n) = 4(n-1)/(sqrt(n)(n-2))` for `n >= 3`.
pub fn sobolev_constant(n: usize) -> Result<f64> {
    if n < 3 {
        return Err(invalid(format!("C_S(n) is defined for n >= 3, got {n}")));
    }
    let n = n as f64;
    Ok(4.0 * (n - 1.0) / (n.sqrt() * (n - 2.0)))
}

/// `C_S(2) = 8 sqrt(2π(e + 256))`.
pub fn sobolev2_constant() -> f64 {
    8.0 * (2.0 * std::f64::consts::PI * (std::f64::consts::E + 256.0)).sqrt()
}

/// Exponents of a Hardy–Sobolev inequality, validated on construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HsParams {
    alpha: f64,
    beta: f64,
    n: usize,
}

impl HsParams {
    pub fn new(alpha: f64, beta: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::HypothesisViolated(format!(
                "dimension n = {n} must be at least 2"
            )));
        }
        if !(0.0..2.0).contains(&beta) {
            return Err(Error::HypothesisViolated(format!(
                "need 0 <= beta < 2, got beta = {beta}"
            )));
        }
        if !(beta <= alpha) || !alpha.is_finite() {
            return Err(Error::HypothesisViolated(format!(
                "need beta <= alpha, got alpha = {alpha}, beta = {beta}"
            )));
        }
        if n >= 3 {
            let top = Self::alpha_max(beta, n);
            if alpha > top * (1.0 + 1e-14) {
                return Err(Error::HypothesisViolated(format!(
                    "need alpha <= (2n - 2beta)/(n - 2) = {top}, got alpha = {alpha}"
                )));
            }
        }
        Ok(Self { alpha, beta, n })
    }

    /// Upper end of the admissible `alpha` range for `n >= 3`.
    pub fn alpha_max(beta: f64, n: usize) -> f64 {
        (2.0 * n as f64 - 2.0 * beta) / (n as f64 - 2.0)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// `C_HS(n, α, β, Ω)`.
pub fn hardy_sobolev_constant(params: &HsParams, domain: &BoxDomain) -> Result<f64> {
    if domain.dim() != params.n {
        return Err(invalid(format!(
            "parameters are for n = {}, domain has n = {}",
            params.n,
            domain.dim()
        )));
    }
    let (a, b) = (params.alpha, params.beta);
    let ch = HARDY_CONSTANT.powf(b / 2.0);
    if params.n >= 3 {
        let n = params.n as f64;
        let e = (2.0 * (n - b) - (n - 2.0) * a) / (2.0 * n);
        Ok(ch * sobolev_constant(params.n)?.powf(a - b) * domain.volume().powf(e))
    } else {
        let cp = poincare_upper(domain);
        let d = a - b;
        Ok(ch
            * sobolev2_constant().powf(d)
            * (4.0 * d / (2.0 - b)).powf(d)
            * (1.0 + cp * cp).powf(d / 2.0))
    }
}

/// Which inequality a randomized check targets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Inequality {
    /// `‖u‖_{L²} <= C ‖u‖_D`
    Poincare,
    /// `Σ u²/dist² 𝒉 <= C ‖u‖_D²`
    Hardy,
    /// `‖u‖_{L^{2n/(n-2)}} <= C ‖u‖_D`, `n >= 3`
    SobolevN,
    /// `‖u‖_A <= C ‖u‖_{W^{1,2}}`, `n = 2`
    Sobolev2Orlicz,
    /// `‖u‖_{L^p} <= 2 C p ‖u‖_{W^{1,2}}`, `n = 2`, `p >= 2`
    Sobolev2Lp { p: f64 },
    /// `Σ |u|^α/dist^β 𝒉 <= C ‖u‖_D^α`
    HardySobolev { alpha: f64, beta: f64 },
}

impl Inequality {
    pub fn name(&self) -> String {
        match self {
            Inequality::Poincare => "poincare".into(),
            Inequality::Hardy => "hardy".into(),
            Inequality::SobolevN => "sobolev_n".into(),
            Inequality::Sobolev2Orlicz => "sobolev_2_orlicz".into(),
            Inequality::Sobolev2Lp { p } => format!("sobolev_2_lp({p})"),
            Inequality::HardySobolev { alpha, beta } => format!("hardy_sobolev({alpha},{beta})"),
        }
    }

    /// Parses `poincare`, `hardy`, `sobolev_n`, `sobolev_2_orlicz`,
    /// `sobolev_2_lp:<p>` and `hardy_sobolev:<alpha>,<beta>`.
    pub fn parse(s: &str) -> Result<Self> {
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| invalid(format!("bad number {t:?}: {e}")))
        };
        match (head, arg) {
            ("poincare", None) => Ok(Inequality::Poincare),
            ("hardy", None) => Ok(Inequality::Hardy),
            ("sobolev_n", None) => Ok(Inequality::SobolevN),
            ("sobolev_2_orlicz", None) => Ok(Inequality::Sobolev2Orlicz),
            ("sobolev_2_lp", Some(p)) => Ok(Inequality::Sobolev2Lp { p: num(p)? }),
            ("hardy_sobolev", Some(ab)) => {
                let (a, b) = ab
                    .split_once(',')
                    .ok_or_else(|| invalid("hardy_sobolev needs <alpha>,<beta>"))?;
                Ok(Inequality::HardySobolev {
                    alpha: num(a)?,
                    beta: num(b)?,
                })
            }
            _ => Err(invalid(format!("unknown inequality {s:?}"))),
        }
    }

    /// The constant from the theory for this mesh.
    pub fn constant(&self, mesh: &Mesh) -> Result<f64> {
        let n = mesh.dim();
        match *self {
            Inequality::Poincare => Ok(poincare_upper(mesh.domain())),
            Inequality::Hardy => Ok(HARDY_CONSTANT),
            Inequality::SobolevN => sobolev_constant(n),
            Inequality::Sobolev2Orlicz | Inequality::Sobolev2Lp { .. } => {
                if n != 2 {
                    return Err(invalid(format!("{} needs n = 2, got {n}", self.name())));
                }
                if let Inequality::Sobolev2Lp { p } = *self {
                    if !(p >= 2.0) {
                        return Err(invalid(format!("L^p corollary needs p >= 2, got {p}")));
                    }
                    return Ok(2.0 * sobolev2_constant() * p);
                }
                Ok(sobolev2_constant())
            }
            Inequality::HardySobolev { alpha, beta } => {
                hardy_sobolev_constant(&HsParams::new(alpha, beta, n)?, mesh.domain())
            }
        }
    }

    /// `LHS / RHS` for one function; `None` when both sides vanish.
    pub fn ratio(&self, u: &GridFunction, constant: f64) -> Result<Option<f64>> {
        let d2 = d_norm_squared(u);
        let (lhs, rhs) = match *self {
            Inequality::Poincare => (lp_power_sum(u, 2.0).sqrt(), constant * d2.sqrt()),
            Inequality::Hardy => (weighted_sum(u, 2.0, 2.0)?, constant * d2),
            Inequality::SobolevN => {
                let n = u.mesh().dim() as f64;
                (lp_norm(u, 2.0 * n / (n - 2.0))?, constant * d2.sqrt())
            }
            Inequality::Sobolev2Orlicz => (
                orlicz_norm(u),
                constant * (lp_power_sum(u, 2.0) + d2).sqrt(),
            ),
            Inequality::Sobolev2Lp { p } => (
                lp_norm(u, p)?,
                constant * (lp_power_sum(u, 2.0) + d2).sqrt(),
            ),
            Inequality::HardySobolev { alpha, beta } => (
                weighted_sum(u, alpha, beta)?,
                constant * d2.powf(alpha / 2.0),
            ),
        };
        if lhs == 0.0 && rhs == 0.0 {
            return Ok(None);
        }
        Ok(Some(lhs / rhs))
    }
}

/// Outcome of a randomized inequality check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityReport {
    pub name: String,
    pub constant_used: f64,
    pub samples_tested: usize,
    /// Largest `LHS/RHS` seen
    pub worst_ratio: f64,
    /// Stream seed of the worst random sample, `None` if an adversary won
    pub worst_sample_seed: Option<u64>,
    pub worst_sample_kind: String,
    pub passed: bool,
}

pub fn check_inequality(
    ineq: Inequality,
    mesh: &Mesh,
    samples: usize,
    seed: u64,
) -> Result<InequalityReport> {
    let c = ineq.constant(mesh)?;
    check_inequality_with_constant(ineq, mesh, samples, seed, c)
}

/// Like [`check_inequality`] with a caller-supplied constant.
pub fn check_inequality_with_constant(
    ineq: Inequality,
    mesh: &Mesh,
    samples: usize,
    seed: u64,
    constant: f64,
) -> Result<InequalityReport> {
    let random: Vec<(f64, Option<u64>, &'static str)> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let (kind, u) = random_sample(mesh, seed, i);
            Ok(ineq
                .ratio(&u, constant)?
                .map(|r| (r, Some(sample_seed(seed, i)), kind.name())))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let mut worst = (f64::NEG_INFINITY, None, "none");
    let mut tested = 0;
    for (kind, u) in adversaries(mesh) {
        if let Some(r) = ineq.ratio(&u, constant)? {
            tested += 1;
            if r > worst.0 {
                worst = (r, None, kind.name());
            }
        }
    }
    tested += random.len();
    for entry in random {
        if entry.0 > worst.0 {
            worst = entry;
        }
    }
    Ok(InequalityReport {
        name: ineq.name(),
        constant_used: constant,
        samples_tested: tested,
        worst_ratio: worst.0,
        worst_sample_seed: worst.1,
        worst_sample_kind: worst.2.into(),
        passed: worst.0 <= 1.0,
    })
}

/// `Σ_{i+j+k=p} a^i b^j c^k`, the second divided difference of `t^{p+2}` at
/// `a, b, c`; exact for coincident arguments.
pub fn triple_term(a: f64, b: f64, c: f64, p: u32) -> f64 {
    // Σ_q a^{p-q} s_q with s_q = Σ_{r<=q} b^r c^{q-r} = b^q + c s_{q-1}
    let p = p as usize;
    let apows: Vec<f64> = std::iter::successors(Some(1.0), |x| Some(x * a))
        .take(p + 1)
        .collect();
    let mut total = 0.0;
    let mut s = 0.0;
    let mut bq = 1.0;
    for q in 0..=p {
        s = bq + c * s;
        total += apows[p - q] * s;
        bq *= b;
    }
    total
}

/// `(lhs, rhs) = (Σ_{k>=1} u_k²/(kh)², 4 Σ (D^+u)²)` for a sequence with `u_0 = 0`.
pub fn hardy_1d_sequence_check(values: &[f64], h: f64) -> Result<(f64, f64)> {
    if values.first().copied().unwrap_or(0.0) != 0.0 {
        return Err(invalid("sequence must start with 0"));
    }
    let lhs = values
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, u)| (u / (k as f64 * h)).powi(2))
        .sum();
    let rhs = 4.0
        * values
            .windows(2)
            .map(|w| ((w[1] - w[0]) / h).powi(2))
            .sum::<f64>();
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square(n: usize) -> Mesh {
        Mesh::uniform(BoxDomain::unit(2).unwrap(), n).unwrap()
    }

    #[test]
    fn poincare_values() {
        assert!((poincare_constant(&unit_square(2)).upper - 2f64.sqrt() / 4.0).abs() < 1e-15);
        assert!((poincare_constant(&unit_square(2)).lower - 0.25).abs() < 1e-15);
        let m = Mesh::new(BoxDomain::unit(1).unwrap(), vec![5]).unwrap();
        assert_eq!(poincare_constant(&m).upper, 0.5);
        for n in [2, 3, 8, 40] {
            let c = poincare_constant(&unit_square(n));
            assert!(c.lower <= c.upper);
        }
    }

    #[test]
    fn sobolev_values() {
        assert!((sobolev_constant(3).unwrap() - 8.0 / 3f64.sqrt()).abs() < 1e-14);
        assert!((sobolev_constant(4).unwrap() - 3.0).abs() < 1e-14);
        for n in 3..=20 {
            assert!(sobolev_constant(n).unwrap() <= 5.0);
        }
        assert!(sobolev_constant(2).is_err());
        let c2 = sobolev2_constant();
        assert!((c2 - 322.55).abs() < 0.01);
        assert!(
            ((c2 / 8.0).powi(2) - 2.0 * std::f64::consts::PI * (std::f64::consts::E + 256.0)).abs()
                < 1e-9
        );
    }

    #[test]
    fn hardy_sobolev_values() {
        let cube = BoxDomain::unit(3).unwrap();
        let c = hardy_sobolev_constant(&HsParams::new(2.0, 0.0, 3).unwrap(), &cube).unwrap();
        assert!((c - 64.0 / 3.0).abs() < 1e-12);
        let sq = BoxDomain::unit(2).unwrap();
        let c = hardy_sobolev_constant(&HsParams::new(2.0, 1.0, 2).unwrap(), &sq).unwrap();
        assert!((c - 2.0 * sobolev2_constant() * 4.0 * (1.125f64).sqrt()).abs() < 1e-9);
        for n in [2, 3] {
            let d = BoxDomain::new(vec![0.0; n], vec![2.0; n]).unwrap();
            let c = hardy_sobolev_constant(&HsParams::new(1.5, 1.5, n).unwrap(), &d).unwrap();
            let expected = if n == 3 {
                4f64.powf(0.75) * 8f64.powf(0.5 / 2.0)
            } else {
                4f64.powf(0.75)
            };
            assert!((c - expected).abs() < 1e-12, "{c} {expected}");
        }
    }

    #[test]
    fn hardy_sobolev_admissibility() {
        assert!(HsParams::new(1.0, 2.0, 3).is_err());
        assert!(HsParams::new(0.5, 1.0, 3).is_err());
        assert!(HsParams::new(6.0, 0.0, 3).is_ok());
        assert!(HsParams::new(6.1, 0.0, 3).is_err());
        assert!(HsParams::new(50.0, 1.0, 2).is_ok());
        assert!(HsParams::new(1.0, 0.0, 1).is_err());
    }

    #[test]
    fn triple_term_examples() {
        assert_eq!(triple_term(0.0, 1.0, 2.0, 1), 3.0);
        assert_eq!(triple_term(0.0, 0.0, 0.0, 3), 0.0);
        // h_2(1,1,1) counts the six monomials of degree 2 in three variables
        assert_eq!(triple_term(1.0, 1.0, 1.0, 2), 6.0);
        assert_eq!(triple_term(2.0, 0.0, 0.0, 4), 16.0);
    }

    #[test]
    fn hardy_sequences() {
        assert_eq!(
            hardy_1d_sequence_check(&[0.0, 0.0, 0.0], 0.3).unwrap(),
            (0.0, 0.0)
        );
        assert_eq!(
            hardy_1d_sequence_check(&[0.0, 1.0], 1.0).unwrap(),
            (1.0, 4.0)
        );
        assert!(hardy_1d_sequence_check(&[1.0, 1.0], 1.0).is_err());
    }

    #[test]
    fn poincare_eigenfunction_attains_lower_bound() {
        let m = Mesh::new(
            BoxDomain::new(vec![0.0, 0.0], vec![2.0, 1.0]).unwrap(),
            vec![12, 8],
        )
        .unwrap();
        let c = poincare_constant(&m);
        let phi = crate::spectral::first_eigenpair(&m).phi;
        let r = Inequality::Poincare.ratio(&phi, c.lower).unwrap().unwrap();
        assert!((r - 1.0).abs() < 1e-10);
        let r = Inequality::Poincare.ratio(&phi, c.upper).unwrap().unwrap();
        assert!((r - c.lower / c.upper).abs() < 1e-10);
    }

    #[test]
    fn reports_are_deterministic() {
        let m = unit_square(8);
        let a = check_inequality(Inequality::Hardy, &m, 40, 3).unwrap();
        let b = check_inequality(Inequality::Hardy, &m, 40, 3).unwrap();
        assert_eq!(a, b);
        assert!(a.passed);
        assert_eq!(a.samples_tested, 43);
    }

    #[test]
    fn parse_names() {
        assert_eq!(
            Inequality::parse("sobolev_2_lp:4").unwrap(),
            Inequality::Sobolev2Lp { p: 4.0 }
        );
        assert_eq!(
            Inequality::parse("hardy_sobolev:2,0.5").unwrap(),
            Inequality::HardySobolev {
                alpha: 2.0,
                beta: 0.5
            }
        );
        assert!(Inequality::parse("nope").is_err());
    }
}
