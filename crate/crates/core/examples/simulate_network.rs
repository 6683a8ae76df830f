//! Simulates a month of weekday mornings on a 12-station stretch of the
//! synthetic network and summarises the logs.
//!
//! ```text
//! cargo run --release --example simulate_network -- [out_dir]
//! ```

use odsage::network::SyntheticLayout;
use odsage::simulator::{disruption_index, simulate, SimConfig, SimParams};
use odsage::time::format_iso;

fn main() -> odsage::Result<()> {
    let full = SyntheticLayout::default().build()?;
    let stretch = full.contiguous_path(0, 12)?;
    let network = full.subnetwork(&stretch)?;
    println!(
        "network: {} of {} stations, {} lines",
        network.n_stations(),
        full.n_stations(),
        network.lines().len()
    );

    let params = SimParams {
        n_days: 20,
        ..SimParams::default()
    };
    let config = SimConfig::from_params(&params, &network, 42)?;
    let (trips, trains) = simulate(&config, &network)?;
    let calendar = config.calendar();
    println!(
        "{} trips and {} train stops over {} days",
        trips.len(),
        trains.len(),
        calendar.len()
    );

    let cancelled = trains.events().iter().filter(|e| e.cancelled).count();
    let late = trains.events().iter().filter(|e| e.delay > 180).count();
    println!("cancelled stops: {cancelled}, stops more than 3 minutes late: {late}");

    // The most disrupted hour seen at any station, sampled on interval boundaries.
    let mut worst = (0.0, 0, 0);
    for g in 0..calendar.n_global_slots() {
        let t = calendar.from_global_slot(g).start();
        for st in 0..network.n_stations() {
            let di = disruption_index(&trains, st, t);
            if di > worst.0 {
                worst = (di, st, t);
            }
        }
    }
    println!(
        "peak disruption index {:.2} at {} ({})",
        worst.0,
        network.stations()[worst.1].name,
        format_iso(worst.2)
    );

    let journeys: Vec<i64> = trips
        .events()
        .iter()
        .map(|t| t.tap_out - t.tap_in)
        .collect();
    let mean = journeys.iter().sum::<i64>() as f64 / journeys.len().max(1) as f64;
    println!("mean tap-in to tap-out time: {:.1} min", mean / 60.0);

    if let Some(dir) = std::env::args().nth(1) {
        let dir = std::path::PathBuf::from(dir);
        std::fs::create_dir_all(&dir)?;
        network.write_csv(&dir)?;
        trips.write_csv(&dir.join("trips.csv"))?;
        trains.write_csv(&dir.join("trains.csv"))?;
        println!(
            "wrote stations.csv, lines.csv, trips.csv and trains.csv to {}",
            dir.display()
        );
    }
    Ok(())
}
