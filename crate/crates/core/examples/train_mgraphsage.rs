//! Trains the multi-graph GraphSAGE model on the twelve busiest ODs of the
//! small network and tracks test error per epoch.
//!
//! ```text
//! cargo run --release --example train_mgraphsage -- [epochs]
//! ```

use odsage::eval::{rmse_mae, split_days, EvalIndex};
use odsage::features::{assemble_dataset, FeatureOptions, TripIndex};
use odsage::graphs::{build_graph_set, GraphConfig};
use odsage::model::{init_model, predict_samples, train, Aggregation, TrainConfig};
use odsage::network::{enumerate_od_pairs, IdEncoding, PairMode, SyntheticLayout};
use odsage::simulator::{simulate, SimConfig, SimParams};

fn main() -> odsage::Result<()> {
    let epochs: usize = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(8);

    let full = SyntheticLayout::default().build()?;
    let network = full.subnetwork(&full.contiguous_path(0, 12)?)?;
    let params = SimParams {
        n_days: 80,
        ..SimParams::default()
    };
    let sim = SimConfig::from_params(&params, &network, 3)?;
    let (trips, trains) = simulate(&sim, &network)?;
    let calendar = sim.calendar();
    let pairs = enumerate_od_pairs(&network, PairMode::TopKByMeanDemand(12), Some(&trips))?;
    let network = network.with_od_pairs(pairs)?;

    let (train_days, _) = split_days(calendar.days(), 0.25, 3)?;
    let options = FeatureOptions {
        normalize_on: Some(train_days.clone()),
        ..FeatureOptions::raw(IdEncoding::OnehotOd)
    };
    let dataset = assemble_dataset(&trips, &trains, &network, &calendar, &options)?;
    let series = TripIndex::new(&trips, &calendar).demand_series(&network, &train_days);
    let (graphs, _) = build_graph_set(&network, &series, &GraphConfig::default())?;
    let (train_set, test_set) = dataset.split(&train_days);
    println!(
        "{} training and {} test boundaries, {} features per OD",
        train_set.len(),
        test_set.len(),
        dataset.layout.width()
    );

    let truth = EvalIndex::new(&test_set).truth;
    let mut model = init_model(&train_set, &TrainConfig::default())?;
    for epoch in 0..epochs {
        let config = TrainConfig {
            epochs: 1,
            seed: epoch as u64,
            ..TrainConfig::default()
        };
        let report = train(&mut model, &train_set, &graphs, &config)?;
        let preds: Vec<f64> = predict_samples(&model, &test_set, &graphs, Aggregation::Full, 0)?
            .into_iter()
            .flat_map(|p| p.to_vec())
            .collect();
        let (rmse, mae) = rmse_mae(&preds, &truth)?;
        println!(
            "epoch {epoch:>2}  train loss {:.4}  test rmse {rmse:.4}  mae {mae:.4}",
            report.epoch_losses[0]
        );
    }

    let path = std::env::temp_dir().join("odsage_example_model.json");
    model.save(&path)?;
    println!("checkpoint written to {}", path.display());
    Ok(())
}
