//! Subcritical sweep for -Δu = u^1.5 + 1 on the unit square with CSV/JSON export.
//!
//! Pass an output directory as the first argument (default: target/mesh_sweep).

use std::path::PathBuf;

use meshbound::solver::{c1_by_scan, Form, Metadata, Nonlinearity};
use meshbound::sweep::{run_sweep, write_outputs, SweepConfig, SweepMode};
use meshbound::{BoxDomain, Result};

fn main() -> Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("target/mesh_sweep"));
    let domain = BoxDomain::unit(2)?;
    let lambda = 2.0 * domain.first_eigenvalue();
    let c1 = c1_by_scan(|s| s.powf(1.5) + 1.0, lambda)?;
    let f = Nonlinearity::new(
        "power_1.5_plus_one",
        Form::PowerPlusConst { p: 1.5, c: 1.0 },
    )?
    .with_metadata(Metadata {
        lambda,
        c1,
        c2: 1.0,
        c3: 1.0,
        p: 1.5,
    });
    let config = SweepConfig {
        domain,
        nonlinearity: f,
        meshes: [8, 16, 32, 64].iter().map(|&n| vec![n, n]).collect(),
        mode: SweepMode::Subcritical,
        seed: 0,
        tol: 1e-10,
    };
    let outcome = run_sweep(&config)?;
    for row in &outcome.rows {
        let r = &row.record;
        println!(
            "N = {:?}: ‖u‖∞ = {:.6}, ‖u‖_D = {:.6}, residual = {:.1e}, passed = {:?}",
            r.counts, r.u_inf, r.u_d, r.residual, r.passed
        );
    }
    println!("M̄ = {:.3e}", outcome.bound.map_or(f64::NAN, |b| b.mbar()));
    write_outputs(&outcome, &out)?;
    println!("wrote {}", out.display());
    Ok(())
}
