//! Compare slow-tier traffic across the profilers and first-touch placement
//! on one skewed workload.

use tiermem::experiment::{run_experiment, ExperimentConfig, Intervals, PolicySpec, WorkloadSpec};
use tiermem::profilers::ProfilerKind;
use tiermem::sketch::SketchParams;
use tiermem::workloads::ZipfSpec;
use tiermem::SimConfig;

fn main() -> tiermem::Result<()> {
    let base = ExperimentConfig {
        sim: SimConfig { fast_pages: 4096, slow_pages: 16_384, ..SimConfig::default() },
        sketch: SketchParams { hist_threshold_ceiling: 256, ..SketchParams::with_shape(64 << 10, 2) },
        intervals: Intervals { cycles_per_ns: 1e-4, ..Intervals::default() },
        workload: WorkloadSpec::Zipf(ZipfSpec {
            total_pages: 16_384,
            exponent: 1.2,
            events: 1_000_000,
            ..ZipfSpec::default()
        }),
        ..ExperimentConfig::default()
    };
    println!(
        "{:<12} {:>13} {:>11} {:>11} {:>15}",
        "profiler", "slow fraction", "promotions", "demotions", "profiling cyc"
    );
    for kind in ProfilerKind::ALL {
        let cfg = ExperimentConfig { profiler: kind, ..base.clone() };
        let s = run_experiment(&cfg)?.summary;
        println!(
            "{:<12} {:>13.4} {:>11} {:>11} {:>15}",
            kind.name(),
            s.slow_fraction,
            s.promotions,
            s.demotions,
            s.profiling_cost_cycles
        );
    }
    let cfg = ExperimentConfig { policy: PolicySpec::None, ..base };
    println!("{:<12} {:>13.4}", "first-touch", run_experiment(&cfg)?.summary.slow_fraction);
    Ok(())
}
