//! Summation by parts on a 2D grid: for u and f = -Δ_h u, the gradient pairing
//! with any test function vanishing on the boundary equals Σ f φ 𝒉.

use meshbound::calculus::{diff, discrete_laplacian, weak_form_balance, Direction};
use meshbound::{BoxDomain, GridFunction, Mesh, Result};

fn main() -> Result<()> {
    let mesh = Mesh::new(BoxDomain::new(vec![0.0, 0.0], vec![2.0, 1.0])?, vec![16, 8])?;
    println!(
        "h = {:?}, interior points = {}",
        mesh.spacing(),
        mesh.interior_len()
    );

    let u = GridFunction::from_fn(&mesh, |x| {
        (x[0] * (2.0 - x[0]) * x[1] * (1.0 - x[1])).powi(2)
    })?;
    let f = discrete_laplacian(&u).scaled(-1.0)?;

    let dx = diff(&u, 0, Direction::Forward)?;
    println!(
        "D_1^+ u at (4, 4) = {:.6}",
        dx.get(&[4, 4]).unwrap_or(f64::NAN)
    );

    let phi = GridFunction::from_index_fn(&mesh, |idx| {
        if mesh.is_interior(idx) {
            (idx[0] * idx[1]) as f64 * 0.01
        } else {
            0.0
        }
    })?;
    let b = weak_form_balance(&u, &f, &phi)?;
    println!("Σ D⁺u·D⁺φ 𝒉 = {:.15e}", b.gradient_term);
    println!("Σ f φ 𝒉      = {:.15e}", b.source_term);
    println!("relative residual = {:.2e}", b.relative_residual());
    Ok(())
}
