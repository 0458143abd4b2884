//! ‖u_h‖∞ against h for -Δu = u³ on the unit square, above the critical
//! exponent n/(n-1) = 2. No bound applies; the table is for inspection.

use meshbound::solver::{solve_nonlinear, Form, InitialGuess, Metadata, Nonlinearity};
use meshbound::{BoxDomain, Mesh, Result};

fn main() -> Result<()> {
    let f = Nonlinearity::new("cubic", Form::Power { p: 3.0 })?.with_metadata(Metadata {
        lambda: 0.0,
        c1: 0.0,
        c2: 1.0,
        c3: 0.0,
        p: 3.0,
    });
    println!("{:>6} {:>10} {:>14} {:>8}", "N", "h", "‖u_h‖∞", "iters");
    for n in [8, 16, 32, 64, 128] {
        let mesh = Mesh::uniform(BoxDomain::unit(2)?, n)?;
        let r = solve_nonlinear(&mesh, &f, InitialGuess::ScaledEigen(None), 1e-10)?;
        println!(
            "{n:>6} {:>10.6} {:>14.8} {:>8}",
            mesh.max_spacing(),
            r.u.max_abs(),
            r.newton_iters
        );
    }
    Ok(())
}
