//! Ridge regression with a validated penalty and the dense two-layer GCN,
//! including the GCN's refusal to allocate a full-scale adjacency matrix.

use std::collections::BTreeSet;

use odsage::baselines::{
    gcn_train, normalized_adjacency, GcnConfig, RidgeModel, DEFAULT_LAMBDA, LAMBDA_GRID,
};
use odsage::eval::{rmse_mae, split_days, EvalIndex};
use odsage::features::{assemble_dataset, FeatureOptions, SampleSet, TripIndex};
use odsage::graphs::{
    build_graph_set, cap_edges, spatial_distance_matrix, GraphConfig, SpatialKind,
};
use odsage::network::{enumerate_od_pairs, IdEncoding, PairMode, SyntheticLayout};
use odsage::simulator::{simulate, SimConfig, SimParams};

fn score(
    samples: &[&SampleSet],
    truth: &[f64],
    f: impl Fn(&SampleSet) -> Vec<f64>,
) -> odsage::Result<(f64, f64)> {
    let preds: Vec<f64> = samples.iter().flat_map(|s| f(s)).collect();
    rmse_mae(&preds, truth)
}

fn main() -> odsage::Result<()> {
    let full = SyntheticLayout::default().build()?;
    let network = full.subnetwork(&full.contiguous_path(0, 12)?)?;
    let pairs = enumerate_od_pairs(&network, PairMode::AllPairs, None)?;
    let network = network.with_od_pairs(pairs)?;
    let params = SimParams {
        n_days: 40,
        ..SimParams::default()
    };
    let sim = SimConfig::from_params(&params, &network, 11)?;
    let (trips, trains) = simulate(&sim, &network)?;
    let calendar = sim.calendar();
    let (train_days, _) = split_days(calendar.days(), 0.25, 11)?;
    let options = FeatureOptions {
        normalize_on: Some(train_days.clone()),
        ..FeatureOptions::raw(IdEncoding::OnehotOd)
    };
    let dataset = assemble_dataset(&trips, &trains, &network, &calendar, &options)?;
    let (train_set, test_set) = dataset.split(&train_days);
    let truth = EvalIndex::new(&test_set).truth;

    // Hold out the last fifth of the training days to choose the penalty.
    let ordered: Vec<_> = train_days.iter().copied().collect();
    let fit_days: BTreeSet<_> = ordered[..ordered.len() * 4 / 5].iter().copied().collect();
    let (fit, val): (Vec<&SampleSet>, Vec<&SampleSet>) = train_set
        .iter()
        .partition(|s| fit_days.contains(&s.interval.date));
    let chosen = RidgeModel::fit_with_validation(&fit, &val, &LAMBDA_GRID)?;
    println!(
        "ridge penalty chosen on validation days: {:e}",
        chosen.lambda
    );
    for lambda in [DEFAULT_LAMBDA, chosen.lambda] {
        let ridge = RidgeModel::fit_samples(&train_set, lambda)?;
        let (rmse, mae) = score(&test_set, &truth, |s| {
            ridge.predict(s.features.view()).unwrap().to_vec()
        })?;
        println!("ridge λ={lambda:e}: rmse {rmse:.4} mae {mae:.4}");
    }

    let series = TripIndex::new(&trips, &calendar).demand_series(&network, &train_days);
    let (graphs, _) = build_graph_set(&network, &series, &GraphConfig::default())?;
    let config = GcnConfig {
        epochs: 3,
        ..GcnConfig::default()
    };
    let (gcn, losses) = gcn_train(&train_set, graphs.temporal(), &config)?;
    let (rmse, mae) = score(&test_set, &truth, |s| {
        gcn.predict(s.features.view()).unwrap().to_vec()
    })?;
    println!("gcn losses {losses:.4?}: rmse {rmse:.4} mae {mae:.4}");

    // All 6972 ODs of the full network need a dense 6972×6972 matrix.
    let full = full
        .clone()
        .with_od_pairs(enumerate_od_pairs(&full, PairMode::AllPairs, None)?)?;
    let origin = cap_edges(&spatial_distance_matrix(&full, SpatialKind::Origin), 10_000);
    match normalized_adjacency(&origin, config.memory_limit_bytes) {
        Err(e) => println!("full scale: {e}"),
        Ok(_) => println!("full scale: adjacency fits in memory"),
    }
    Ok(())
}
