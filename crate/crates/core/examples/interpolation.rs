//! Piecewise-linear interpolation on the two-triangle split of each cell.

use meshbound::interp2d::{interpolate, norm_additivity, rectangle_estimate_check};
use meshbound::norms::{norm, NormKind};
use meshbound::{BoxDomain, GridFunction, Mesh, Result};

fn main() -> Result<()> {
    let mesh = Mesh::new(BoxDomain::new(vec![0.0, 0.0], vec![1.5, 1.0])?, vec![12, 8])?;
    let u = GridFunction::from_fn(&mesh, |x| {
        (std::f64::consts::PI * x[0] / 1.5).sin() * x[1] * (1.0 - x[1])
    })?;
    let ui = interpolate(&u)?;

    for p in [1, 2, 4] {
        let exact = ui.power_integral(p)?;
        let quad = ui.quadrature_integral(|v| v.powi(p as i32), 3);
        println!(
            "∫ ũ^{p}: exact {exact:.15e}, quadrature {:.15e}",
            quad.value
        );
    }
    println!(
        "∫|∇ũ|² = {:.12}, ‖u‖_D² = {:.12}",
        ui.gradient_energy(),
        norm(&u, NormKind::D)?.powi(2)
    );
    println!("ũ(0.7, 0.45) = {:.6}", ui.eval([0.7, 0.45])?);

    let add = norm_additivity(&u, 2.0)?;
    println!(
        "L² whole {:.6} vs parts {:.6}; D whole {:.6} vs parts {:.6}",
        add.lp_whole, add.lp_parts, add.d_whole, add.d_parts
    );
    for q in [1.0, 2.0, 4.0] {
        let (lhs, rhs) = rectangle_estimate_check(&u, q)?;
        println!("rectangle estimate q = {q}: {lhs:.4e} <= {rhs:.4e}");
    }
    Ok(())
}
