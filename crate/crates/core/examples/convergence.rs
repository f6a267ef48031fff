//! Shift the GUPS hot set and track how quickly each profiler moves the new
//! hot pages into the fast tier.

use tiermem::experiment::{run_experiment, ExperimentConfig, Intervals, WorkloadSpec};
use tiermem::profilers::ProfilerKind;
use tiermem::sketch::SketchParams;
use tiermem::workloads::GupsSpec;
use tiermem::SimConfig;

const SHIFT_EPOCH: usize = 300;

fn main() -> tiermem::Result<()> {
    println!("{:<10} fast-tier hit fraction every 100 epochs after the shift", "profiler");
    for kind in [ProfilerKind::Neoprof, ProfilerKind::PmuSample, ProfilerKind::PteScan] {
        let cfg = ExperimentConfig {
            profiler: kind,
            sim: SimConfig { fast_pages: 1638, slow_pages: 8192, ..SimConfig::default() },
            sketch: SketchParams { hist_threshold_ceiling: 256, ..SketchParams::with_shape(64 << 10, 2) },
            intervals: Intervals { cycles_per_ns: 1e-4, ..Intervals::default() },
            workload: WorkloadSpec::Gups(GupsSpec {
                total_pages: 8192,
                shift_at: Some(SHIFT_EPOCH as u64 * 1000),
                events: 1_600_000,
                ..GupsSpec::default()
            }),
            ..ExperimentConfig::default()
        };
        let out = run_experiment(&cfg)?;
        let trail: Vec<String> =
            out.epochs[SHIFT_EPOCH..].iter().step_by(100).map(|r| format!("{:.2}", r.fast_fraction())).collect();
        println!("{:<10} {}", kind.name(), trail.join(" "));
    }
    Ok(())
}
