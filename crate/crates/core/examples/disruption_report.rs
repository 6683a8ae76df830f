//! Runs the staged pipeline on the twelve-OD case with the reliability
//! ablation switched on, then prints how each method fares when origin or
//! destination stations are disrupted.
//!
//! ```text
//! cargo run --release --example disruption_report -- [artifact_dir]
//! ```

use odsage::pipeline::{Pipeline, PipelineConfig, Scale, METHOD_MGRAPHSAGE, METHOD_NO_RELIABILITY};

fn main() -> odsage::Result<()> {
    let root = std::env::args()
        .nth(1)
        .map(std::path::PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("odsage_disruption_report"));
    let mut config = PipelineConfig::preset(Scale::TwelveOd);
    config.simulator.n_days = 120;
    config.eval.reliability_ablation = true;
    let report = Pipeline::with_root(config, &root)?.all()?;
    print!("{report}");

    println!("\neffect of the reliability features on mGraphSAGE:");
    let mut scenarios: Vec<&str> = report.rows.iter().map(|r| r.scenario.as_str()).collect();
    scenarios.dedup();
    for s in scenarios {
        let (Some(with), Some(without)) = (
            report.row(s, METHOD_MGRAPHSAGE),
            report.row(s, METHOD_NO_RELIABILITY),
        ) else {
            continue;
        };
        println!(
            "  {s:<20} rmse {:.4} → {:.4} without ({:+.1}%)",
            with.rmse,
            without.rmse,
            100.0 * (without.rmse / with.rmse - 1.0)
        );
    }
    println!("artifacts in {}", root.display());
    Ok(())
}
