//! Newton solver for `-Δ_h u = f(x, u)` with zero Dirichlet data.

mod nonlinearity;

pub use nonlinearity::{c1_by_scan, find, load_registry, Form, Metadata, Minorant, Nonlinearity};

use serde::Serialize;

use crate::calculus::{discrete_laplacian, point_mass_balance, InteriorLaplacian};
use crate::error::{Error, Result};
use crate::grid::{GridFunction, Mesh};
use crate::linalg::{conjugate_gradient, BandedLu, CsrMatrix};
use crate::spectral::{first_eigenpair, first_eigenvalue};

const CG_TOL: f64 = 1e-12;
const MAX_NEWTON: usize = 200;
const DAMPING_STEPS: i32 = 8;
const CONTINUATION: [f64; 6] = [1.0, 1.5, 0.75, 2.0, 0.5, 3.0];

/// Solves `(-Δ_h + diag(shift)) u = rhs` on the interior.
///
/// Uses Jacobi-preconditioned CG when `λ_{1,h} + min shift > 0`, which bounds
/// the smallest eigenvalue from below, and a banded LU factorisation otherwise.
pub fn solve_linear(mesh: &Mesh, shift: &GridFunction, rhs: &GridFunction) -> Result<GridFunction> {
    shift.same_mesh(rhs)?;
    if shift.mesh() != mesh {
        return Err(Error::MeshMismatch);
    }
    let s = shift.interior_values();
    let b = rhs.interior_values();
    let x = solve_interior(mesh, &s, &b)?;
    GridFunction::from_interior(mesh, &x)
}

fn solve_interior(mesh: &Mesh, shift: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    let min_shift = shift.iter().copied().fold(f64::INFINITY, f64::min);
    if first_eigenvalue(mesh) + min_shift > 0.0 {
        let op = InteriorLaplacian::new(mesh);
        let diag: Vec<f64> = shift.iter().map(|s| op.diagonal() + s).collect();
        let apply = |x: &[f64], out: &mut [f64]| {
            op.apply(x, out);
            for ((o, x), s) in out.iter_mut().zip(x).zip(shift) {
                *o += s * x;
            }
        };
        let out = conjugate_gradient(apply, &diag, b, None, CG_TOL, 20 * b.len() + 100)?;
        Ok(out.x)
    } else {
        let a = CsrMatrix::shifted_laplacian(mesh, Some(shift));
        Ok(BandedLu::factor(&a)?.solve(b))
    }
}

/// Starting point of Newton's method.
#[derive(Debug, Clone)]
pub enum InitialGuess {
    Zero,
    /// `τ φ_{1,h}`; `None` picks `τ* = (λ_{1,h}/‖φ‖_∞^{p-1})^{1/(p-1)}` from
    /// the growth exponent and continues over multiples of it on failure.
    /// Without a usable exponent (linear or custom `f`) it starts from zero.
    ScaledEigen(Option<f64>),
    Custom(GridFunction),
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveResult {
    #[serde(skip)]
    pub u: GridFunction,
    pub residual_inf: f64,
    /// `‖f(·, u₊)‖_∞` over the interior
    pub f_inf: f64,
    pub newton_iters: usize,
    pub min_value: f64,
    pub converged: bool,
    /// `‖F‖_∞` after each accepted Newton step, starting from the initial guess
    pub residual_history: Vec<f64>,
    /// `τ` of the successful scaled-eigenfunction start
    pub tau: Option<f64>,
}

impl SolveResult {
    /// `max r_{k+1}/r_k²` over the last three residuals; small and bounded on
    /// a quadratically convergent tail.
    pub fn quadratic_tail_constant(&self) -> Option<f64> {
        let h = &self.residual_history;
        if h.len() < 3 {
            return None;
        }
        let tail = &h[h.len() - 3..];
        Some(
            tail.windows(2)
                .map(|w| w[1] / (w[0] * w[0]))
                .fold(0.0, f64::max),
        )
    }
}

struct Problem<'a> {
    mesh: &'a Mesh,
    f: &'a Nonlinearity,
    op: InteriorLaplacian,
    coords: Vec<Vec<f64>>,
}

impl<'a> Problem<'a> {
    fn new(mesh: &'a Mesh, f: &'a Nonlinearity) -> Self {
        let coords = mesh
            .interior_indices()
            .into_iter()
            .map(|k| mesh.coordinate(&mesh.multi_index(k)))
            .collect();
        Self {
            mesh,
            f,
            op: InteriorLaplacian::new(mesh),
            coords,
        }
    }

    fn source(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.coords)
            .map(|(v, c)| self.f.evaluate(c, v.max(0.0)))
            .collect()
    }

    /// `(F(x), ‖F‖_∞, ‖f‖_∞)`
    fn residual(&self, x: &[f64]) -> (Vec<f64>, f64, f64) {
        let src = self.source(x);
        let mut r = vec![0.0; x.len()];
        self.op.apply(x, &mut r);
        let mut rinf: f64 = 0.0;
        for (r, s) in r.iter_mut().zip(&src) {
            *r -= s;
            rinf = rinf.max(r.abs());
        }
        let finf = src.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if !rinf.is_finite() {
            rinf = f64::INFINITY;
        }
        (r, rinf, finf)
    }

    fn newton(
        &self,
        mut x: Vec<f64>,
        tol: f64,
        budget: usize,
    ) -> Result<(Vec<f64>, Vec<f64>, bool, f64, f64)> {
        let (mut r, mut rinf, mut finf) = self.residual(&x);
        let mut history = vec![rinf];
        for _ in 0..budget {
            if rinf <= tol * finf.max(1.0) {
                return Ok((x, history, true, rinf, finf));
            }
            let shift: Vec<f64> = x
                .iter()
                .zip(&self.coords)
                .map(|(v, c)| -self.f.derivative(c, v.max(0.0)))
                .collect();
            if shift.iter().any(|s| !s.is_finite()) {
                break;
            }
            let rhs: Vec<f64> = r.iter().map(|v| -v).collect();
            let delta = match solve_interior(self.mesh, &shift, &rhs) {
                Ok(d) => d,
                Err(_) => break,
            };
            let mut accepted = false;
            for j in 0..=DAMPING_STEPS {
                let t = 0.5f64.powi(j);
                let trial: Vec<f64> = x.iter().zip(&delta).map(|(a, d)| a + t * d).collect();
                let (tr, tinf, tf) = self.residual(&trial);
                if tinf < rinf {
                    (x, r, rinf, finf) = (trial, tr, tinf, tf);
                    accepted = true;
                    break;
                }
            }
            if !accepted {
                break;
            }
            history.push(rinf);
        }
        let ok = rinf <= tol * finf.max(1.0);
        Ok((x, history, ok, rinf, finf))
    }
}

/// Damped Newton on `F(u) = -Δ_h u - f(·, u₊)`.
///
/// Negative values are reported through `min_value`, never clipped. A run
/// that exhausts its budget returns the best iterate with `converged = false`.
pub fn solve_nonlinear(
    mesh: &Mesh,
    f: &Nonlinearity,
    initial: InitialGuess,
    tol: f64,
) -> Result<SolveResult> {
    let problem = Problem::new(mesh, f);
    let n = mesh.interior_len();
    let starts: Vec<(Option<f64>, Vec<f64>)> = match initial {
        InitialGuess::Zero => vec![(None, vec![0.0; n])],
        InitialGuess::Custom(u) => {
            if u.mesh() != mesh {
                return Err(Error::MeshMismatch);
            }
            vec![(None, u.interior_values())]
        }
        InitialGuess::ScaledEigen(tau) => {
            let pair = first_eigenpair(mesh);
            let phi = pair.phi.interior_values();
            let taus: Vec<f64> = match (tau, f.growth_exponent()) {
                (Some(t), _) => vec![t],
                (None, Some(p)) if p != 1.0 => {
                    let pmax = phi.iter().copied().fold(0.0, f64::max);
                    let star = (pair.lambda1h / pmax.powf(p - 1.0)).powf(1.0 / (p - 1.0));
                    CONTINUATION.iter().map(|c| c * star).collect()
                }
                (None, _) => vec![0.0],
            };
            taus.into_iter()
                .map(|t| (Some(t), phi.iter().map(|v| t * v).collect()))
                .collect()
        }
    };
    let mut best: Option<SolveResult> = None;
    let mut used = 0;
    for (tau, x0) in starts {
        if used >= MAX_NEWTON {
            break;
        }
        let (x, history, converged, rinf, finf) = problem.newton(x0, tol, MAX_NEWTON - used)?;
        used += history.len() - 1;
        let u = GridFunction::from_interior(mesh, &x)?;
        let result = SolveResult {
            min_value: x.iter().copied().fold(f64::INFINITY, f64::min),
            u,
            residual_inf: rinf,
            f_inf: finf,
            newton_iters: history.len() - 1,
            converged,
            residual_history: history,
            tau,
        };
        if converged {
            return Ok(result);
        }
        if best
            .as_ref()
            .is_none_or(|b| result.residual_inf < b.residual_inf)
        {
            best = Some(result);
        }
    }
    best.ok_or_else(|| Error::NotConverged {
        what: "Newton".into(),
        iterations: used,
    })
}

/// Test with the normalised eigenfunction `tφ`: both sides of
/// `Σ u tφ 𝒉 <= C1/(λ-λ1)` and `Σ f tφ 𝒉 <= C1 λ1/(λ-λ1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenTest {
    pub u_phi: f64,
    pub u_phi_bound: f64,
    pub f_phi: f64,
    pub f_phi_bound: f64,
}

impl EigenTest {
    pub fn holds(&self) -> bool {
        self.u_phi <= self.u_phi_bound && self.f_phi <= self.f_phi_bound
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Verification {
    /// `‖-Δ_h u - f(·,u₊)‖_∞` recomputed from scratch
    pub stencil_residual: f64,
    /// largest relative weak-form residual over interior point masses
    pub weak_form_residual: f64,
    pub min_value: f64,
    pub nonnegative: bool,
    pub eigen_test: Option<EigenTest>,
}

/// Independent re-checks of a computed solution.
pub fn verify_solution(result: &SolveResult, f: &Nonlinearity) -> Result<Verification> {
    let u = &result.u;
    let mesh = u.mesh();
    let lap = discrete_laplacian(u);
    let fu = GridFunction::from_index_fn(mesh, |idx| {
        if mesh.is_interior(idx) {
            f.evaluate(
                &mesh.coordinate(idx),
                u.at(mesh.flat_unchecked(idx)).max(0.0),
            )
        } else {
            0.0
        }
    })?;
    let interior = mesh.interior_indices();
    let mut stencil: f64 = 0.0;
    let mut weak: f64 = 0.0;
    for &k in &interior {
        stencil = stencil.max((-lap.at(k) - fu.at(k)).abs());
        weak = weak.max(point_mass_balance(u, &fu, k)?.relative_residual());
    }
    let min_value = interior
        .iter()
        .map(|&k| u.at(k))
        .fold(f64::INFINITY, f64::min);
    let eigen_test = match f.metadata() {
        Some(m) if m.lambda > mesh.domain().first_eigenvalue() => {
            let pair = first_eigenpair(mesh);
            let tphi = pair.normalized_phi();
            let cell = mesh.cell_volume();
            let dot = |g: &GridFunction| {
                interior.iter().map(|&k| g.at(k) * tphi.at(k)).sum::<f64>() * cell
            };
            let gap = m.lambda - pair.lambda1;
            Some(EigenTest {
                u_phi: dot(u),
                u_phi_bound: m.c1 / gap,
                f_phi: dot(&fu),
                f_phi_bound: m.c1 * pair.lambda1 / gap,
            })
        }
        _ => None,
    };
    Ok(Verification {
        stencil_residual: stencil,
        weak_form_residual: weak,
        min_value: if interior.is_empty() { 0.0 } else { min_value },
        nonnegative: min_value >= 0.0 || interior.is_empty(),
        eigen_test,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::BoxDomain;

    #[test]
    fn linear_examples() {
        let m = Mesh::new(BoxDomain::unit(1).unwrap(), vec![2]).unwrap();
        let zero = GridFunction::zeros(&m);
        let one = GridFunction::from_interior(&m, &[1.0]).unwrap();
        let u = solve_linear(&m, &zero, &one).unwrap();
        assert!((u.values()[1] - 0.125).abs() < 1e-15);
        assert_eq!(solve_linear(&m, &zero, &zero).unwrap().max_abs(), 0.0);

        let m = Mesh::new(BoxDomain::unit(2).unwrap(), vec![12, 9]).unwrap();
        let pair = first_eigenpair(&m);
        let rhs = pair.phi.scaled(pair.lambda1h).unwrap();
        let u = solve_linear(&m, &GridFunction::zeros(&m), &rhs).unwrap();
        for (a, b) in u.values().iter().zip(pair.phi.values()) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn indefinite_shift_uses_direct_solve() {
        let m = Mesh::new(BoxDomain::unit(2).unwrap(), vec![8, 8]).unwrap();
        let shift = GridFunction::from_interior(&m, &vec![-30.0; m.interior_len()]).unwrap();
        let rhs = GridFunction::from_interior(&m, &vec![1.0; m.interior_len()]).unwrap();
        let u = solve_linear(&m, &shift, &rhs).unwrap();
        let lap = discrete_laplacian(&u);
        for k in m.interior_indices() {
            assert!((-lap.at(k) - 30.0 * u.at(k) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn trivial_solution_at_eigenvalue() {
        let m = Mesh::new(BoxDomain::unit(2).unwrap(), vec![10, 10]).unwrap();
        let f = Nonlinearity::new(
            "lin",
            Form::Affine {
                a: first_eigenvalue(&m),
                b: 0.0,
            },
        )
        .unwrap();
        let r = solve_nonlinear(&m, &f, InitialGuess::Zero, 1e-10).unwrap();
        assert!(r.converged && r.u.max_abs() == 0.0);
        let v = verify_solution(&r, &f).unwrap();
        assert_eq!(v.stencil_residual, 0.0);
        assert!(v.nonnegative);
    }

    #[test]
    fn cubic_one_dimensional() {
        let m = Mesh::new(BoxDomain::symmetric_interval(1.0).unwrap(), vec![64]).unwrap();
        let f = Nonlinearity::new("cubic", Form::CubicPlusOne)
            .unwrap()
            .with_metadata(Metadata {
                lambda: 1.0,
                c1: 1.0,
                c2: 1.0,
                c3: 1.0,
                p: 3.0,
            });
        let r = solve_nonlinear(&m, &f, InitialGuess::ScaledEigen(None), 1e-10).unwrap();
        assert!(r.converged, "{:?}", r.residual_history);
        assert!(r.residual_inf <= 1e-10 * r.f_inf.max(1.0));
        assert!(r.min_value >= 0.0);
        let v = verify_solution(&r, &f).unwrap();
        assert!(v.weak_form_residual <= 1e-10 && v.nonnegative);
        // continuation from -Δu = 1 reaches a solution too
        let lin = solve_linear(
            &m,
            &GridFunction::zeros(&m),
            &GridFunction::from_interior(&m, &vec![1.0; 63]).unwrap(),
        )
        .unwrap();
        let r2 = solve_nonlinear(&m, &f, InitialGuess::Custom(lin), 1e-10).unwrap();
        assert!(r2.converged);
    }

    #[test]
    fn pure_power_leaves_trivial_solution() {
        let m = Mesh::new(BoxDomain::unit(2).unwrap(), vec![16, 16]).unwrap();
        let f = Nonlinearity::new("p15", Form::Power { p: 1.5 })
            .unwrap()
            .with_metadata(Metadata {
                lambda: 0.0,
                c1: 0.0,
                c2: 1.0,
                c3: 0.0,
                p: 1.5,
            });
        let r = solve_nonlinear(&m, &f, InitialGuess::ScaledEigen(None), 1e-10).unwrap();
        assert!(r.converged);
        assert!(r.u.max_abs() > 1.0);
        for k in m.interior_indices() {
            assert!(r.u.at(k) > 0.0);
        }
        if let Some(c) = r.quadratic_tail_constant() {
            assert!(c.is_finite());
        }
    }
}
