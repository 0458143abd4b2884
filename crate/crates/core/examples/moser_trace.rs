//! Measured L^{2q't_k} norms of the solution of -Δ_h u = 1 against the
//! comparison sequence of the iteration.

use meshbound::boundsnd::{linear_linf_bound, moser_iteration_trace, MoserParams};
use meshbound::norms::lp_norm;
use meshbound::solver::solve_linear;
use meshbound::{BoxDomain, GridFunction, Mesh, Result};

fn main() -> Result<()> {
    let mesh = Mesh::uniform(BoxDomain::unit(2)?, 48)?;
    let a = GridFunction::zeros(&mesh);
    let b = GridFunction::from_interior(&mesh, &vec![1.0; mesh.interior_len()])?;
    let u = solve_linear(&mesh, &a, &b)?;
    let params = MoserParams::new(2, 4.0, Some(3.0))?;

    println!("{:>3} {:>10} {:>14} {:>14}", "k", "t_k", "m_k", "m̃_k");
    for s in moser_iteration_trace(&u, &a, &b, &params, 8)? {
        println!(
            "{:>3} {:>10.4} {:>14.6e} {:>14.6e}",
            s.k, s.t, s.m, s.m_tilde
        );
    }
    let bound = linear_linf_bound(&params, lp_norm(&u, 2.0)?, 1.0, 1.0, mesh.domain())?;
    println!("‖u‖∞ = {:.6}, linear bound = {bound:.4e}", u.max_abs());
    Ok(())
}
