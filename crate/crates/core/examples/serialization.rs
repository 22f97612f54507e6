//! Saves a compiled circuit and an activated model as JSON, loads them back
//! and checks the round trip is bit-exact.
//!
//! Run with `cargo run --example serialization -- /tmp/models`.

use std::path::PathBuf;

use mpskit::algebra::{ActivatedMps, ScaleInvariantSigmoid};
use mpskit::boolean::{compile_gate, GateKind};
use mpskit::io::Model;

fn main() -> mpskit::Result<()> {
    let dir = PathBuf::from(
        std::env::args()
            .nth(1)
            .unwrap_or_else(|| std::env::temp_dir().display().to_string()),
    );
    std::fs::create_dir_all(&dir)?;

    let g = compile_gate(&GateKind::Threshold(3, 2))?;
    let circuit = Model::Plain {
        mps: g.mps.clone(),
        feature_maps: g.feature_maps.clone(),
    };
    let activated = Model::from(ActivatedMps::from_mps(
        g.mps,
        g.feature_maps,
        ScaleInvariantSigmoid::scaled_logistic(0.5)?,
    )?);

    for (name, model) in [("threshold.json", circuit), ("threshold_activated.json", activated)] {
        let path = dir.join(name);
        model.save(&path)?;
        let back = Model::load(&path)?;
        println!(
            "{}: {} bytes, round trip exact: {}",
            path.display(),
            std::fs::metadata(&path)?.len(),
            back == model
        );
    }
    Ok(())
}
