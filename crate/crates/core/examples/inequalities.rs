//! Explicit inequality constants and seeded worst-ratio searches.

use meshbound::grid::parse_mesh;
use meshbound::inequalities::{
    check_inequality, hardy_sobolev_constant, poincare_constant, sobolev2_constant,
    sobolev_constant, HsParams, Inequality,
};
use meshbound::Result;

fn main() -> Result<()> {
    let seed = 7;
    let square = parse_mesh("24x24")?;
    let c = poincare_constant(&square);
    println!(
        "Poincaré on the unit square: lower {:.6}, upper {:.6}",
        c.lower, c.upper
    );
    for n in 3..=6 {
        println!("C_S({n}) = {:.6}", sobolev_constant(n)?);
    }
    println!("C_S(2) = {:.3}", sobolev2_constant());
    let hs = HsParams::new(2.5, 1.0, 2)?;
    println!(
        "C_HS(α=2.5, β=1, n=2) on the unit square = {:.4e}",
        hardy_sobolev_constant(&hs, square.domain())?
    );

    let cube = parse_mesh("10x10x10")?;
    let checks = [
        (Inequality::Poincare, &square),
        (Inequality::Hardy, &square),
        (Inequality::Sobolev2Orlicz, &square),
        (Inequality::Sobolev2Lp { p: 4.0 }, &square),
        (
            Inequality::HardySobolev {
                alpha: 2.5,
                beta: 1.0,
            },
            &square,
        ),
        (Inequality::SobolevN, &cube),
    ];
    println!(
        "{:>24} {:>12} {:>12} {:>16}",
        "inequality", "constant", "worst", "worst kind"
    );
    for (ineq, mesh) in checks {
        let r = check_inequality(ineq, mesh, 150, seed)?;
        println!(
            "{:>24} {:>12.4e} {:>12.4e} {:>16}",
            r.name, r.constant_used, r.worst_ratio, r.worst_sample_kind
        );
        assert!(r.passed);
    }
    Ok(())
}
