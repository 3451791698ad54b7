//! Validity intervals, sensor leases and snapshots of a dynamic knowledge base.
//!
//! `cargo run -p lpaas-core --example temporal_kb`

use lpaas_core::clock::Timestamp;
use lpaas_core::kb::TemporalKb;
use lpaas_core::logic::{parse_clause, parse_theory};

fn show(kb: &TemporalKb, at: u64) {
    let snapshot = kb.snapshot_at(Timestamp(at));
    let clauses: Vec<String> = snapshot.clauses().iter().map(|c| c.to_string()).collect();
    println!("t={at:>4}: {}", clauses.join(" "));
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let kb = TemporalKb::new(true);
    kb.set_theory(parse_theory("room(kitchen). threshold(25).")?, Timestamp(100));
    // a reading that expires after 300 ms
    kb.ingest_fact(parse_clause("temp(kitchen, 21).")?, Some(300), Timestamp(200))?;
    // a new theory closes the previous one instead of erasing it
    kb.set_theory(parse_theory("room(kitchen). threshold(30).")?, Timestamp(400));

    for at in [50, 100, 200, 399, 400, 499, 500] {
        show(&kb, at);
    }

    println!("timeline:");
    for entry in kb.entries() {
        let to = entry.validity.to.map_or("open".to_string(), |t| t.millis().to_string());
        println!("  {:<20} [{}, {}) {:?}", entry.clause.to_string(), entry.validity.from.millis(), to, entry.origin);
    }

    // snapshots are immutable: later ingestion does not change one already taken
    let frozen = kb.snapshot_at(Timestamp(450));
    kb.ingest_fact(parse_clause("temp(kitchen, 24).")?, None, Timestamp(450))?;
    println!("frozen snapshot has {} clauses, a fresh one {}", frozen.clauses().len(), kb.snapshot_at(Timestamp(450)).clauses().len());
    Ok(())
}
