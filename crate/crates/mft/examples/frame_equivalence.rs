//! Lagrangian wave speeds mapped to the Eulerian frame agree with speeds
//! computed directly from the Eulerian jump conditions.

use mft::euler::Euler;
use mft::scenarios::scenario;
use mft::{Result, WaveKind};

fn main() -> Result<()> {
    let s = scenario("euler_sod", 0.05)?;
    let rec = s.run()?;
    let e = Euler::new(1.4);
    for w in &rec.final_sequence.waves {
        let a_e = e.to_eulerian_speed(&w.left, &w.right, w.speed);
        let direct = match w.kind {
            WaveKind::Shock | WaveKind::Contact => e.eulerian_mass_speed(&w.left, &w.right),
            _ => continue,
        };
        println!("{:<10} a_L = {:+.6}  a_E = {:+.12}  direct = {:+.12}", w.kind.label(), w.speed, a_e, direct);
    }
    Ok(())
}
