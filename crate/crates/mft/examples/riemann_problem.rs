//! Solve a p-system Riemann problem and print the middle state and waves.

use mft::grp::Jump;
use mft::{Result, State, System};

fn main() -> Result<()> {
    let sys = System::psystem(1.4, 1.0);
    let (l, r) = (State::new(1.0, 0.5), State::new(0.3, -0.2));
    let sol = sys.solve_grp(l, r, &[0.0, 0.0])?;
    let m = sol.middle();
    println!("middle state: p = {:.12}, u = {:.12}", m.p, m.u);
    for k in 0..sys.n() {
        let Some(kind) = sol.kinds[k] else {
            println!("family {k}: no wave");
            continue;
        };
        let j = Jump::new(&sys, k, kind, sol.states[k], sol.states[k + 1]);
        println!("family {k}: {:<12} strength {:+.6}  speed {:+.6}", kind.label(), j.strength, j.speed);
    }

    // widths force the simple branch even where the exact solution is a shock
    let forced = sys.solve_grp(l, r, &[0.1, 0.1])?;
    println!("with positive widths: {:?}", forced.kinds);
    Ok(())
}
