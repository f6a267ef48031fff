//! Sweep the sketch width and print the resulting comparison table.

use tiermem::experiment::{run_sweep, sweep_to_csv, ExperimentConfig, Intervals, WorkloadSpec};
use tiermem::workloads::ZipfSpec;
use tiermem::SimConfig;

fn main() -> tiermem::Result<()> {
    let mut base = ExperimentConfig {
        sim: SimConfig { fast_pages: 4096, slow_pages: 16_384, ..SimConfig::default() },
        intervals: Intervals { cycles_per_ns: 1e-4, ..Intervals::default() },
        workload: WorkloadSpec::Zipf(ZipfSpec {
            total_pages: 16_384,
            exponent: 1.0,
            events: 500_000,
            ..ZipfSpec::default()
        }),
        ..ExperimentConfig::default()
    };
    base.set("sketch.hist_threshold_ceiling", "256")?;
    let widths: Vec<String> = ["4096", "16384", "65536", "262144"].iter().map(|s| s.to_string()).collect();
    let rows = run_sweep(&base, "W", &widths)?;
    print!("{}", sweep_to_csv("W", &base, &rows));
    Ok(())
}
