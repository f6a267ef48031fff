//! Feed a skewed page stream through the count-min detector and compare its
//! estimates and hot-page reports with exact counts.

use std::collections::HashMap;

use tiermem::sketch::{SketchDetector, SketchParams};
use tiermem::trace::streams;
use tiermem::workloads::{gen_zipf, ZipfSpec};
use tiermem::SimRng;

fn main() -> tiermem::Result<()> {
    let spec = ZipfSpec { total_pages: 50_000, exponent: 1.1, events: 200_000, ..ZipfSpec::default() };
    let events = gen_zipf(&spec, &mut SimRng::stream(1, streams::WORKLOAD))?;

    let mut detector = SketchDetector::new(SketchParams::with_shape(16 << 10, 2), 32, 1)?;
    let threshold = 200;
    let mut exact: HashMap<u64, u64> = HashMap::new();
    for e in &events {
        detector.observe(e.page, threshold);
        *exact.entry(e.page).or_default() += 1;
    }

    let mut top: Vec<(u64, u64)> = exact.iter().map(|(&p, &c)| (p, c)).collect();
    top.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    println!("{:>10} {:>8} {:>9}", "page", "exact", "estimate");
    for &(page, count) in top.iter().take(10) {
        println!("{page:>10} {count:>8} {:>9}", detector.estimate(page));
    }

    let truly_hot = exact.values().filter(|&&c| c > threshold as u64).count();
    let reported = detector.drain_hot_pages();
    println!("\ntheta = {threshold}: {} pages reported, {truly_hot} exceed it exactly", reported.len());

    let hist = detector.compute_histogram();
    let nonzero: Vec<String> = hist
        .counts()
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .take(8)
        .map(|(i, c)| format!("[{}, {}):{c}", hist.lower_edge(i), hist.upper_edge(i)))
        .collect();
    println!("lane-0 histogram (first bins): {}", nonzero.join(" "));
    println!("error bound e = {}", detector.error_bound());
    Ok(())
}
