//! The one-dimensional pipeline for -u'' = u³ + 1 on (-1, 1): Poisson
//! comparison function, growth quantities, the bound, and solutions below it.

use meshbound::bounds1d::{
    apriori_bound_1d, kappa_tail_check, poisson_closed_form, poisson_mu, poisson_residual,
    poisson_slope_bound, Growth1D,
};
use meshbound::solver::{solve_nonlinear, Form, InitialGuess, Metadata, Nonlinearity};
use meshbound::{BoxDomain, Mesh, Result};

fn main() -> Result<()> {
    let h = 1.0 / 64.0;
    let v = poisson_closed_form(0.0, 1.0, h, 1.0, 10.0)?;
    let (slope, bound) = poisson_slope_bound(&v, 1.0, 10.0);
    println!(
        "Poisson: residual {:.1e}, -D⁺v(a) = {slope:.4} <= {bound:.4}",
        poisson_residual(&v, poisson_mu(0.0, 1.0, h), 10.0)
    );

    let g = Growth1D::cubic_plus_one(1.0)?;
    for r in [2.0, 10.0] {
        let (i, b) = kappa_tail_check(&g, r)?;
        println!("R = {r}: ∫ ds/sqrt(G(R)-G(s)) = {i:.6} <= {b:.6}");
    }
    let report = apriori_bound_1d(|_, s| s * s * s + 1.0, &g, 1.0)?;
    println!("{}", serde_json::to_string_pretty(&report)?);

    let f = Nonlinearity::new("cubic", Form::CubicPlusOne)?.with_metadata(Metadata {
        lambda: 0.0,
        c1: 0.0,
        c2: 1.0,
        c3: 1.0,
        p: 3.0,
    });
    for n in [8, 32, 128, 512] {
        let mesh = Mesh::new(BoxDomain::symmetric_interval(1.0)?, vec![n])?;
        let r = solve_nonlinear(&mesh, &f, InitialGuess::ScaledEigen(None), 1e-10)?;
        println!(
            "N = {n:>4}: ‖u‖∞ = {:.8}  (M̄ = {:.3})  converged = {}",
            r.u.max_abs(),
            report.mbar,
            r.converged
        );
    }
    Ok(())
}
