//! Drive the profiling device through its command interface: snoop accesses,
//! read the state monitor, pull hot pages and the counter histogram.

use tiermem::profilers::NeoProfDevice;
use tiermem::sketch::SketchParams;
use tiermem::AccessEvent;

fn main() -> tiermem::Result<()> {
    let mut device = NeoProfDevice::new(SketchParams::with_shape(4096, 2), 32, 9)?.with_transfer_cycles(4);
    device.set_threshold(20);

    for i in 0..10_000u64 {
        let page = if i % 4 == 0 { 100 + i % 8 } else { 10_000 + i };
        let event = if i % 3 == 0 { AccessEvent::write(i * 10, page) } else { AccessEvent::read(i * 10, page) };
        device.snoop(&event);
    }

    println!("samples {} (reads {}, writes {})", device.nr_sample(), device.rd_cnt(), device.wr_cnt());
    let sample = device.sample_monitor(100_000);
    println!("bandwidth {:.3}, read fraction {:.3}", sample.bandwidth, sample.read_fraction);

    println!("{} hot pages pending", device.nr_hot_pages());
    while let Some(page) = device.hot_page() {
        println!("  hot page {page}");
    }

    device.set_hist_en();
    if let Some(bins) = device.hist() {
        let occupied = bins.iter().filter(|&&c| c > 0).count();
        println!("histogram: {} bins, {occupied} occupied", device.nr_hist_bins());
    }
    device.reset();
    println!("after reset: {} hot pages, threshold {}", device.nr_hot_pages(), device.threshold());
    Ok(())
}
