//! The whole pipeline through the library API, stage by stage, with the
//! manifest written after each one.
//!
//! ```text
//! cargo run --release --example full_pipeline -- [twelve_od|tiny|full] [artifact_dir]
//! ```

use std::time::Instant;

use odsage::pipeline::{Pipeline, PipelineConfig, Scale, Stage};

fn main() -> odsage::Result<()> {
    let mut args = std::env::args().skip(1);
    let scale = match args.next().as_deref() {
        None | Some("twelve_od") => Scale::TwelveOd,
        Some("tiny") => Scale::Tiny,
        Some("full") => Scale::Full,
        Some(other) => {
            return Err(odsage::Error::config(
                "scale",
                format!("unknown preset {other}"),
            ))
        }
    };
    let root = args
        .next()
        .map(std::path::PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("odsage_full_pipeline"));

    let mut config = PipelineConfig::preset(scale);
    if scale == Scale::Full {
        // A handful of days keeps the full network within a laptop budget.
        config.simulator.n_days = 5;
    }
    println!("config hash {}", config.hash());
    let pipeline = Pipeline::with_root(config, &root)?;
    for stage in [
        Stage::Simulate,
        Stage::Features,
        Stage::Graphs,
        Stage::Train,
        Stage::Evaluate,
    ] {
        let t = Instant::now();
        let report = pipeline.run(stage)?;
        println!(
            "{stage:<9} {:>8.1?}  {}",
            t.elapsed(),
            pipeline.stage_dir(stage).display()
        );
        if let Some(report) = report {
            print!("{report}");
        }
    }
    Ok(())
}
