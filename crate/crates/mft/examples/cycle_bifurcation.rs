//! Closure of the periodic cycle as the strength grows.

use mft::scenarios::cycle::{build_cycle, critical_strength, mach_proxy};
use mft::Result;

fn main() -> Result<()> {
    let (z0, gamma) = (1.0, 1.4);
    for i in 1..10 {
        let zeta = 0.1 * i as f64 * z0;
        let c = build_cycle(z0, zeta, gamma, 1.0)?;
        println!("zeta = {zeta:.1}  beta = {:.6}  z5 - z0 = {:+.6}  closed: {}", c.beta, c.z5_minus_z0, c.closed);
    }
    let cs = critical_strength(z0, gamma, 1.0)?;
    println!("critical strength {:.10} ({} sign change(s))", cs.zeta_star, cs.sign_changes.len());
    let c = build_cycle(z0, 1.02 * cs.zeta_star, gamma, 1.0)?;
    if let (Some(l), Some(m)) = (c.left, mach_proxy(&c)) {
        println!("left state p = {:.3e}, alpha = {:.4}, shock |sigma|/c = {m:.1}", l.w_l.p, l.alpha);
    }
    Ok(())
}
