//! Sup-in-time residual of the Sod-like run against ε.

use mft::diagnostics::rate_harness;
use mft::scenarios::scenario;
use mft::Result;

fn main() -> Result<()> {
    let eps = [0.2, 0.1, 0.05, 0.025];
    let fit = rate_harness(|e| scenario("sod_like", e)?.run(), &eps)?;
    for (e, r) in fit.epsilons.iter().zip(&fit.sup_residuals) {
        println!("eps = {e:<6} sup |R| = {r:.4e}");
    }
    println!("slope = {:.3}", fit.slope.unwrap_or(f64::NAN));
    Ok(())
}
