//! Closed-form first eigenpair against an inverse-iteration oracle.

use meshbound::grid::parse_mesh;
use meshbound::spectral::{distance_bound_check, eigen_oracle, first_eigenpair, rayleigh_quotient};
use meshbound::Result;

fn main() -> Result<()> {
    println!(
        "{:>20} {:>18} {:>18} {:>10} {:>10}",
        "mesh", "λ_1h", "oracle", "rel err", "λ_1"
    );
    for spec in ["4", "64", "16x8", "32x32@0:2,0:1", "12x12x12"] {
        let mesh = parse_mesh(spec)?;
        let pair = first_eigenpair(&mesh);
        let oracle = eigen_oracle(&mesh)?;
        let err = (oracle.lambda - pair.lambda1h).abs() / pair.lambda1h;
        println!(
            "{spec:>20} {:>18.12} {:>18.12} {err:>10.1e} {:>10.5}",
            pair.lambda1h, oracle.lambda, pair.lambda1
        );
        assert!(pair.lambda1h < pair.lambda1);
        let rq = rayleigh_quotient(&pair.phi);
        println!(
            "{:>20} Rayleigh quotient of φ = {rq:.12}, t|Ω| = {:.6}",
            "",
            distance_bound_check(&pair)
        );
    }
    Ok(())
}
