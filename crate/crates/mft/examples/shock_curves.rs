//! Walk the backward and forward wave curves through a state and check the
//! jump condition on each shock.

use mft::model::norm3;
use mft::psystem::{Direction, PSystem};
use mft::{Result, State, System};

fn main() -> Result<()> {
    let ps = PSystem::new(1.4, 1.0);
    let sys = System::psystem(1.4, 1.0);
    let wa = State::new(1.0, 0.0);
    println!("{:>6} {:>10} {:>12} {:>12} {:>10}", "dir", "p_b", "u_b", "sigma", "|RH|");
    for dir in [Direction::Backward, Direction::Forward] {
        for pb in [1.5, 2.0, 4.0, 10.0] {
            let (wb, sigma) = ps.shock_to(wa, pb, dir)?;
            let (l, r) = match dir {
                Direction::Backward => (wa, wb),
                Direction::Forward => (wb, wa),
            };
            let rh = norm3(sys.raw_residual(&l, &r, sigma));
            println!("{:>6?} {pb:>10.3} {:>12.6} {sigma:>12.6} {rh:>10.2e}", dir, wb.u);
        }
    }
    println!("simple waves:");
    for pb in [0.2, 0.5, 2.0] {
        let wb = ps.simple_wave_to(wa, pb, Direction::Forward)?;
        println!("  p_b = {pb:<4} u_b = {:+.6}", wb.u);
    }
    Ok(())
}
