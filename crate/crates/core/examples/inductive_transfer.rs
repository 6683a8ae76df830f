//! Trains on the twelve busiest ODs and then predicts every OD of the same
//! stretch without retraining. Station-signed node ids keep the feature width
//! independent of the OD set, so the learned weights apply to unseen vertices.

use odsage::eval::{rmse_mae, split_days, EvalIndex};
use odsage::features::{assemble_dataset, FeatureOptions, TripIndex};
use odsage::graphs::{build_graph_set, GraphConfig};
use odsage::model::{init_model, predict_samples, train, Aggregation, TrainConfig};
use odsage::network::{enumerate_od_pairs, IdEncoding, PairMode, SyntheticLayout};
use odsage::simulator::{simulate, SimConfig, SimParams};

fn main() -> odsage::Result<()> {
    let full = SyntheticLayout::default().build()?;
    let base = full.subnetwork(&full.contiguous_path(0, 12)?)?;
    let params = SimParams {
        n_days: 60,
        ..SimParams::default()
    };
    let sim = SimConfig::from_params(&params, &base, 5)?;
    let (trips, trains) = simulate(&sim, &base)?;
    let calendar = sim.calendar();
    let (train_days, _) = split_days(calendar.days(), 0.25, 5)?;

    let build = |mode| -> odsage::Result<_> {
        let network = base
            .clone()
            .with_od_pairs(enumerate_od_pairs(&base, mode, Some(&trips))?)?;
        let options = FeatureOptions {
            normalize_on: Some(train_days.clone()),
            ..FeatureOptions::raw(IdEncoding::SignedStation)
        };
        let dataset = assemble_dataset(&trips, &trains, &network, &calendar, &options)?;
        let series = TripIndex::new(&trips, &calendar).demand_series(&network, &train_days);
        let (graphs, _) = build_graph_set(&network, &series, &GraphConfig::default())?;
        Ok((dataset, graphs))
    };
    let (small, small_graphs) = build(PairMode::TopKByMeanDemand(12))?;
    let (large, large_graphs) = build(PairMode::AllPairs)?;
    println!(
        "training graph: {} ODs; transfer graph: {} ODs; {} features each",
        small_graphs.n(),
        large_graphs.n(),
        small.layout.width()
    );

    let (train_set, _) = small.split(&train_days);
    let config = TrainConfig {
        epochs: 6,
        seed: 5,
        ..TrainConfig::default()
    };
    let mut model = init_model(&train_set, &config)?;
    train(&mut model, &train_set, &small_graphs, &config)?;

    for (name, dataset, graphs) in [
        ("seen ODs", &small, &small_graphs),
        ("all ODs", &large, &large_graphs),
    ] {
        let (_, test) = dataset.split(&train_days);
        let truth = EvalIndex::new(&test).truth;
        let preds: Vec<f64> =
            predict_samples(&model, &test, graphs, Aggregation::Sampled([10, 10]), 0)?
                .into_iter()
                .flat_map(|p| p.to_vec())
                .collect();
        let (rmse, mae) = rmse_mae(&preds, &truth)?;
        println!(
            "{name:<9} rmse {rmse:.4} mae {mae:.4} over {} predictions",
            truth.len()
        );
    }
    Ok(())
}
