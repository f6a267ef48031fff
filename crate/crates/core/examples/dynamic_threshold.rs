//! Watch the dynamic threshold follow a workload whose skew changes midway.

use tiermem::experiment::{run_experiment, ExperimentConfig, Intervals, WorkloadSpec};
use tiermem::sketch::SketchParams;
use tiermem::workloads::{ZipfPhase, ZipfSpec};
use tiermem::SimConfig;

fn main() -> tiermem::Result<()> {
    let events = 1_000_000;
    let cfg = ExperimentConfig {
        sim: SimConfig { fast_pages: 4096, slow_pages: 16_384, ..SimConfig::default() },
        sketch: SketchParams { hist_threshold_ceiling: 256, ..SketchParams::with_shape(64 << 10, 2) },
        intervals: Intervals { cycles_per_ns: 1e-4, ..Intervals::default() },
        workload: WorkloadSpec::Zipf(ZipfSpec {
            total_pages: 16_384,
            exponent: 0.8,
            events,
            phase_shifts: vec![ZipfPhase { at_cycle: events / 2, perm_seed: 7, exponent: Some(1.2) }],
            ..ZipfSpec::default()
        }),
        ..ExperimentConfig::default()
    };
    let out = run_experiment(&cfg)?;
    println!("{:>6} {:>9} {:>9} {:>5} {:>6} {:>8}", "epoch", "threshold", "p", "e", "moved", "fast");
    for r in out.epochs.iter().step_by(50) {
        println!(
            "{:>6} {:>9} {:>9.5} {:>5} {:>6} {:>8.3}",
            r.epoch,
            r.threshold,
            r.p.unwrap_or(f64::NAN),
            r.error_bound,
            r.promotions + r.demotions,
            r.fast_fraction()
        );
    }
    println!("latency per access {:.2} ns", out.summary.latency_per_access_ns);
    Ok(())
}
