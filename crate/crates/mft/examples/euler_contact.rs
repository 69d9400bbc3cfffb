//! Gas dynamics with a contact: the entropy jump rides at zero Lagrangian
//! speed while acoustic waves cross it.

use mft::init_recon::kind_counts;
use mft::scenarios::scenario;
use mft::{Result, WaveKind};

fn main() -> Result<()> {
    let s = scenario("euler_contact", 0.05)?;
    let rec = s.run()?;
    let [shocks, contacts, rarefactions, compressions] = kind_counts(&rec.final_sequence);
    println!("{shocks} shocks, {rarefactions} rarefactions, {compressions} compressions, {contacts} contacts");
    for w in rec.final_sequence.waves.iter().filter(|w| w.kind == WaveKind::Contact) {
        println!("contact at x = {:.6}: s {:.4} -> {:.4}, p {:.6} | {:.6}", w.position_at(rec.t_final), w.left.s, w.right.s, w.left.p, w.right.p);
    }
    println!("{} events, ledger holds: {}", rec.event_count(), mft::diagnostics::conservation_ledger(&rec).holds);
    Ok(())
}
