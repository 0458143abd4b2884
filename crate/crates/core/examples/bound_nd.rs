//! Moser constants and the n-dimensional bound for f(s) = s^p + 1.

use meshbound::boundsnd::{apriori_bound_nd, dnorm_apriori, moser_k, MoserParams};
use meshbound::solver::c1_by_scan;
use meshbound::{BoxDomain, Result};

fn main() -> Result<()> {
    let square = BoxDomain::unit(2)?;
    let params = MoserParams::new(2, 4.0, Some(3.0))?;
    println!(
        "n = 2, q = 4, n̂ = 3: l = {:.4}, exponent = {:.4}, K = {:.4e}",
        params.l(),
        params.exponent(),
        moser_k(&params, 1.0, &square)?
    );

    for (n, p) in [(2usize, 1.5), (2, 1.7), (2, 1.9), (3, 1.2), (3, 1.4)] {
        let domain = BoxDomain::unit(n)?;
        let lambda = 2.0 * domain.first_eigenvalue();
        let c1 = c1_by_scan(|s| s.powf(p) + 1.0, lambda)?;
        let d = dnorm_apriori(n, p, lambda, c1, 1.0, 1.0, &domain)?;
        // close to the critical exponent the constants leave the f64 range
        let r = match apriori_bound_nd(n, p, lambda, c1, 1.0, 1.0, &domain) {
            Ok(r) => r,
            Err(e) => {
                println!(
                    "n = {n}, p = {p}: ‖u‖_D <= {:.3e}, no finite bound ({e})",
                    d.d_norm_bound
                );
                continue;
            }
        };
        println!(
            "n = {n}, p = {p}: C1 = {c1:.4e}, p̃ = {:.3}, β = {:.3}, ‖u‖_D <= {:.3e}, q = {:.3}, K_u = {:.3e}, M̄ = {:.3e}",
            d.p_tilde, d.beta, d.d_norm_bound, r.q, r.ku, r.mbar
        );
    }
    Ok(())
}
