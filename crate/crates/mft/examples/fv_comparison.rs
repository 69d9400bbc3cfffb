//! L¹ distance between the front-tracking profile and a Godunov reference.

use mft::init_recon::{l1_distance, reconstruct};
use mft::scenarios::{reference_fv_grids, scenario, self_convergence_error};
use mft::Result;

fn main() -> Result<()> {
    let s = scenario("single_rarefaction", 0.025)?;
    let sys = s.system();
    let rec = s.run()?;
    let profile = reconstruct(&sys, &rec.final_sequence);
    let grids = [250, 500, 1000];
    let fv = reference_fv_grids(&sys, &s.data, s.config.domain, &grids, 0.9, s.config.t_end)?;
    for (n, sol) in grids.iter().zip(&fv) {
        let d = l1_distance(|x| profile.eval(x), |x| sol.eval(x), 0.0, 1.0, 20_000);
        println!("n = {n:<5} L1(mFT, FV) = {d:.4e}");
    }
    println!("self-convergence 500 vs 1000: {:.4e}", self_convergence_error(&fv[1], &fv[2]));
    Ok(())
}
