//! Front plot of the compressive ramp: fans steepen and collapse into shocks.

use mft::io::front_plot;
use mft::scenarios::scenario;
use mft::Result;

fn main() -> Result<()> {
    let s = scenario("compressive_ramp", 0.05)?;
    let rec = s.run()?;
    std::fs::create_dir_all("out")?;
    std::fs::write("out/compressive_ramp.svg", front_plot(&rec, &s.name))?;
    println!("{} segments, {} events -> out/compressive_ramp.svg", rec.segments.len(), rec.event_count());
    Ok(())
}
