//! Exercise the two-tier memory model directly: first-touch placement,
//! quota-limited promotion and demotion of cold pages.

use tiermem::tiersim::{LatencyModel, MigrationQuota, TierState};
use tiermem::{AccessEvent, SimConfig};

fn main() -> tiermem::Result<()> {
    let cfg = SimConfig { fast_pages: 64, slow_pages: 256, ..SimConfig::default() };
    let mut tiers = TierState::new(&cfg, LatencyModel::from_config(&cfg, 3000.0));

    let mut latency = 0.0;
    for page in 0..200u64 {
        latency += tiers.access(&AccessEvent::read(page, page))?.latency_ns;
    }
    println!("after first touch: {} fast, {} slow, {latency:.0} ns", tiers.fast_used(), tiers.slow_used());

    let mut quota = MigrationQuota::new(2000.0, 0.01);
    println!("quota per epoch: {} pages", quota.per_epoch());
    let hot: Vec<u64> = (150..200).collect();
    let result = tiers.promote(&hot, &mut quota);
    println!("promotion: {result:?}");

    quota.start_epoch();
    let demoted = tiers.demote_cold(16, &mut quota);
    println!("demoted {demoted} cold pages, fast free {}", tiers.fast_free());
    println!("totals: {:?}", tiers.total_counters());
    tiers.check_invariants().map_err(tiermem::Error::Simulation)?;
    Ok(())
}
