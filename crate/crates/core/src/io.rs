//! JSON model documents.
//!
//! ```json
//! {"version": 1, "kind": "mps", "boundary": "open", "label_site": null,
//!  "sites": [{"left_bond": 1, "phys_dim": 2, "right_bond": 1, "label_dim": 0, "data": [1.0, 0.0]}],
//!  "feature_maps": [{"kind": "binary_indicator"}]}
//! ```
//!
//! Activated models use `"kind": "activated_mps"` and add `sigma` and
//! `out_weights`. Floats are written in shortest round-trip form, so every
//! tensor (integer-valued or not) survives a save/load cycle bit for bit.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::algebra::{ActivatedMps, ScaleInvariantSigmoid};
use crate::error::{Error, Result};
use crate::mps::{Boundary, FeatureMap, Mps, SiteTensor};

pub const FORMAT_VERSION: u32 = 1;

/// A model as stored on disk.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Plain { mps: Mps, feature_maps: Vec<FeatureMap> },
    Activated(ActivatedMps),
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum Kind {
    Mps,
    ActivatedMps,
}

#[derive(Serialize, Deserialize)]
struct Document {
    version: u32,
    kind: Kind,
    boundary: Boundary,
    label_site: Option<usize>,
    sites: Vec<SiteTensor>,
    feature_maps: Vec<FeatureMap>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sigma: Option<ScaleInvariantSigmoid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    out_weights: Option<Vec<f64>>,
}

impl Model {
    pub fn mps(&self) -> &Mps {
        match self {
            Model::Plain { mps, .. } => mps,
            Model::Activated(a) => a.core(),
        }
    }

    pub fn feature_maps(&self) -> &[FeatureMap] {
        match self {
            Model::Plain { feature_maps, .. } => feature_maps,
            Model::Activated(a) => a.feature_maps(),
        }
    }

    pub fn to_json(&self) -> String {
        let mps = self.mps();
        let (kind, sigma, out_weights) = match self {
            Model::Plain { .. } => (Kind::Mps, None, None),
            Model::Activated(a) => (Kind::ActivatedMps, Some(*a.sigma()), Some(a.out_weights().to_vec())),
        };
        let doc = Document {
            version: FORMAT_VERSION,
            kind,
            boundary: mps.boundary(),
            label_site: mps.label_site(),
            sites: mps.sites().to_vec(),
            feature_maps: self.feature_maps().to_vec(),
            sigma,
            out_weights,
        };
        serde_json::to_string_pretty(&doc).expect("documents serialize")
    }

    pub fn from_json(text: &str) -> Result<Model> {
        let doc: Document = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        if doc.version != FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported document version {}", doc.version)));
        }
        let sites = doc
            .sites
            .into_iter()
            .enumerate()
            .map(|(i, s)| {
                // Deserialized tensors bypass the constructor; re-validate.
                SiteTensor::new(
                    s.left_bond(),
                    s.phys_dim(),
                    s.right_bond(),
                    s.label_dim(),
                    s.data().to_vec(),
                )
                .map_err(|e| Error::Format(format!("site {i}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let mps = Mps::new(sites, doc.boundary)?;
        if mps.label_site() != doc.label_site {
            return Err(Error::Format(format!(
                "label_site {:?} does not match the tensors ({:?})",
                doc.label_site,
                mps.label_site()
            )));
        }
        for fm in &doc.feature_maps {
            fm.validate()?;
        }
        mps.check_feature_maps(&doc.feature_maps)?;
        match doc.kind {
            Kind::Mps => {
                if doc.sigma.is_some() || doc.out_weights.is_some() {
                    return Err(Error::Format(
                        "plain mps documents carry no sigma or out_weights".into(),
                    ));
                }
                Ok(Model::Plain {
                    mps,
                    feature_maps: doc.feature_maps,
                })
            }
            Kind::ActivatedMps => {
                let sigma = doc.sigma.ok_or_else(|| Error::Format("missing sigma".into()))?;
                let w = doc
                    .out_weights
                    .ok_or_else(|| Error::Format("missing out_weights".into()))?;
                Ok(Model::Activated(ActivatedMps::new(mps, doc.feature_maps, w, sigma)?))
            }
        }
    }

    pub fn load(path: &Path) -> Result<Model> {
        Model::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = self.to_json();
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }
}

impl From<ActivatedMps> for Model {
    fn from(a: ActivatedMps) -> Self {
        Model::Activated(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn and_gate() -> Model {
        let a = SiteTensor::new(1, 2, 1, 0, vec![1.0, 0.0]).unwrap();
        Model::Plain {
            mps: Mps::new(vec![a.clone(), a], Boundary::Open).unwrap(),
            feature_maps: vec![FeatureMap::BinaryIndicator; 2],
        }
    }

    #[test]
    fn plain_round_trip() {
        let m = and_gate();
        let text = m.to_json();
        assert!(text.contains("\"kind\": \"mps\""));
        assert_eq!(Model::from_json(&text).unwrap(), m);
    }

    #[test]
    fn awkward_floats_round_trip() {
        let vals = vec![0.1, -1.0 / 3.0, 1e-300, 6.02214076e23];
        let t = SiteTensor::new(1, 4, 1, 1, vals.clone()).unwrap();
        let mps = Mps::new(vec![t], Boundary::Open).unwrap();
        let fm = FeatureMap::Custom {
            rows: vec![vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]; 4],
        };
        let a = ActivatedMps::new(
            mps,
            vec![fm],
            vec![0.7],
            ScaleInvariantSigmoid::reciprocal_shift(0.3).unwrap(),
        )
        .unwrap();
        let m = Model::from(a);
        let back = Model::from_json(&m.to_json()).unwrap();
        let bits = |m: &Model| m.mps().site(0).data().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&back), bits(&m));
        assert_eq!(back, m);
    }

    #[test]
    fn rejects_inconsistent_documents() {
        let text = and_gate().to_json();
        let bad_len = text.replacen("\"data\": [\n        1.0,\n        0.0\n      ]", "\"data\": [1.0]", 1);
        assert_ne!(bad_len, text);
        assert!(matches!(Model::from_json(&bad_len), Err(Error::Format(_))));
        let bad_label = text.replace("\"label_site\": null", "\"label_site\": 0");
        assert!(Model::from_json(&bad_label).is_err());
        let bad_version = text.replace("\"version\": 1", "\"version\": 9");
        assert!(Model::from_json(&bad_version).is_err());
        assert!(Model::from_json("{").is_err());
    }
}
