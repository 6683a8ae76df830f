//! Builds the four OD graphs (temporal, centroid, origin, destination) for a
//! 12-station network and compares DTW and FFT temporal graphs.

use std::collections::BTreeSet;
use std::time::Instant;

use odsage::features::TripIndex;
use odsage::graphs::{
    build_graph_set, percentile_threshold, temporal_distance_matrix, threshold_graph, GraphConfig,
    TemporalMethod,
};
use odsage::network::{enumerate_od_pairs, PairMode, SyntheticLayout};
use odsage::simulator::{simulate, SimConfig, SimParams};

fn main() -> odsage::Result<()> {
    let full = SyntheticLayout::default().build()?;
    let network = full.subnetwork(&full.contiguous_path(0, 12)?)?;
    let pairs = enumerate_od_pairs(&network, PairMode::AllPairs, None)?;
    let network = network.with_od_pairs(pairs)?;

    let params = SimParams {
        n_days: 30,
        ..SimParams::default()
    };
    let config = SimConfig::from_params(&params, &network, 7)?;
    let (trips, _) = simulate(&config, &network)?;
    let calendar = config.calendar();
    let days: BTreeSet<_> = calendar.days().iter().copied().collect();
    let series = TripIndex::new(&trips, &calendar).demand_series(&network, &days);
    println!(
        "{} ODs, demand series of {} intervals",
        series.len(),
        series[0].len()
    );

    let t = Instant::now();
    let (graphs, metas) = build_graph_set(&network, &series, &GraphConfig::default())?;
    println!("built in {:.2?}", t.elapsed());
    for meta in &metas {
        println!(
            "  {:<12} {:>5} edges  threshold {:>10.3}",
            meta.kind.as_str(),
            meta.n_edges,
            meta.threshold.unwrap_or(f64::NAN)
        );
    }

    let busiest = (0..graphs.n())
        .max_by_key(|&v| graphs.temporal().degree(v))
        .unwrap_or(0);
    let od = network.od_pairs()[busiest];
    println!(
        "OD {}→{} has {} temporal neighbours",
        network.stations()[od.origin].name,
        network.stations()[od.destination].name,
        graphs.temporal().degree(busiest)
    );

    for method in [TemporalMethod::Dtw, TemporalMethod::Fft] {
        let t = Instant::now();
        let d = temporal_distance_matrix(&series, method)?;
        let sigma = percentile_threshold(&d, 0.05)?;
        let g = threshold_graph(&d, sigma)?;
        println!(
            "{method:?}: {} edges at σ = {sigma:.2} ({:.2?})",
            g.n_edges(),
            t.elapsed()
        );
    }
    Ok(())
}
