use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::DataError;
use crate::engine::ClusterLabels;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterEntry {
    pub id: u32,
    pub members: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub k: usize,
    pub min: Option<usize>,
    pub max: Option<usize>,
    pub outliers: usize,
}

/// JSON summary of one run. Contains no timestamps so output bytes depend
/// only on inputs and seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub metadata: Value,
    pub clusters: Vec<ClusterEntry>,
    pub noise: Vec<String>,
    pub counts: Counts,
}

impl ResultDocument {
    pub fn new(metadata: Value, clusters: Vec<ClusterEntry>, noise: Vec<String>) -> Self {
        let sizes = clusters.iter().map(|c| c.members.len());
        let counts = Counts {
            k: clusters.len(),
            min: sizes.clone().min(),
            max: sizes.max(),
            outliers: noise.len(),
        };
        ResultDocument {
            metadata,
            clusters,
            noise,
            counts,
        }
    }

    /// `ids[i]` names line `i`.
    pub fn from_labels(metadata: Value, labels: &ClusterLabels, ids: &[String]) -> Self {
        let clusters = labels
            .clusters
            .iter()
            .enumerate()
            .map(|(j, m)| ClusterEntry {
                id: j as u32 + 1,
                members: m.iter().map(|&i| ids[i].clone()).collect(),
            })
            .collect();
        let noise = labels.noise().into_iter().map(|i| ids[i].clone()).collect();
        Self::new(metadata, clusters, noise)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<(), DataError> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_cluster_one_noise() {
        let d = ResultDocument::new(
            Value::Null,
            vec![ClusterEntry {
                id: 1,
                members: vec!["a".into(), "b".into()],
            }],
            vec!["c".into()],
        );
        assert_eq!(
            d.counts,
            Counts {
                k: 1,
                min: Some(2),
                max: Some(2),
                outliers: 1
            }
        );
    }

    #[test]
    fn empty_document() {
        let d = ResultDocument::new(Value::Null, vec![], vec![]);
        assert_eq!(d.counts.k, 0);
        let back: ResultDocument = serde_json::from_str(&serde_json::to_string(&d).unwrap()).unwrap();
        assert_eq!(back, d);
    }
}
