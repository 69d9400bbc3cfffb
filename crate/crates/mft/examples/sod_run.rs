//! Run the Sod-like p-system problem and write its artifacts to `out/sod`.

use mft::io::{self, OutputSection};
use mft::scenarios::scenario;
use mft::Result;

fn main() -> Result<()> {
    let s = scenario("sod_like", 0.05)?;
    let rec = s.run()?;
    let out = OutputSection { dir: "out/sod".into(), frames: 3, ..OutputSection::default() };
    let a = io::write_run(&s, &rec, &out)?;
    println!("{} waves at t = {}", rec.final_sequence.waves.len(), rec.t_final);
    println!("sup residual {:.3e}, stop: {}", rec.sup_residual(), rec.stop.label());
    for p in a.profiles {
        println!("wrote {}", p.display());
    }
    Ok(())
}
