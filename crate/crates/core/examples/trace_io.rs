//! Generate a GUPS trace, write it in both trace formats and read it back.

use tiermem::trace::{read_trace, streams, write_trace};
use tiermem::workloads::{gen_gups, GupsSpec};
use tiermem::SimRng;

fn main() -> tiermem::Result<()> {
    let spec = GupsSpec { total_pages: 4096, events: 100_000, shift_at: Some(50_000), ..GupsSpec::default() };
    let trace = gen_gups(&spec, &mut SimRng::stream(3, streams::WORKLOAD))?;
    for (cycle, region) in &trace.regions {
        println!("from cycle {cycle:>6}: hot pages [{}, {})", region.start, region.start + region.len);
    }

    let dir = std::env::temp_dir().join(format!("tiermem-trace-io-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    for name in ["gups.trace", "gups.txt"] {
        let path = dir.join(name);
        write_trace(&trace.events, &path)?;
        let back = read_trace(&path)?;
        let bytes = std::fs::metadata(&path)?.len();
        println!("{name}: {bytes} bytes, {} events, identical: {}", back.len(), back == trace.events);
    }
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
