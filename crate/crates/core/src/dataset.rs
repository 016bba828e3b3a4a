//! On-disk training datasets: one JSON-lines manifest per design, a shared
//! edge list, and one feature CSV per sample.

use std::collections::HashMap;
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::aig::Aig;
use crate::error::{Error, Result};
use crate::features::{dynamic_features, edge_list, features_from_csv, features_to_csv, edges_from_text, edges_to_text, GraphSample, StaticFeatures};
use crate::predictor::{features_matrix, Adjacency, Dataset, GraphInput};
use crate::sampling::SampleRecord;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub design_id: String,
    pub seed: u64,
    pub index: usize,
    pub strategy: String,
    /// Run-length encoded decision vector.
    pub decisions: String,
    pub reduction: usize,
    pub label: f64,
    /// Paths relative to the manifest's directory.
    pub features: String,
    pub edges: String,
}

/// Writes `<dir>/<design>.edges`, `<dir>/<design>/NNNN.csv` per record and
/// the manifest `<dir>/<design>.jsonl`, whose path is returned.
pub fn write_dataset(
    dir: &Path,
    aig: &Aig,
    stat: &StaticFeatures,
    records: &[SampleRecord],
    seed: u64,
    directed: bool,
) -> Result<PathBuf> {
    let Some(first) = records.first() else {
        return Err(Error::config("no samples to write"));
    };
    let design = &first.design_id;
    let sample_dir = dir.join(design);
    fs::create_dir_all(&sample_dir)?;
    let edges = edge_list(aig, &stat.nodes, directed);
    let edges_name = format!("{design}.edges");
    fs::write(dir.join(&edges_name), edges_to_text(&stat.nodes, &edges))?;
    let mut manifest = String::new();
    for r in records {
        let dynamic = dynamic_features(aig, &r.applied)?;
        let sample = GraphSample::new(Vec::new(), stat, &dynamic)?;
        let rel = format!("{design}/{:04}.csv", r.index);
        fs::write(dir.join(&rel), features_to_csv(&sample.nodes, &sample.features))?;
        let entry = ManifestEntry {
            design_id: r.design_id.clone(),
            seed,
            index: r.index,
            strategy: r.strategy.name().to_string(),
            decisions: r.decisions.to_rle(),
            reduction: r.reduction,
            label: r.label,
            features: rel,
            edges: edges_name.clone(),
        };
        manifest.push_str(&serde_json::to_string(&entry)?);
        manifest.push('\n');
    }
    let path = dir.join(format!("{design}.jsonl"));
    fs::write(&path, manifest)?;
    Ok(path)
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>> {
    let f = BufReader::new(fs::File::open(path)?);
    let mut out = Vec::new();
    for line in f.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line)?);
    }
    Ok(out)
}

/// Loads every sample listed in the manifests into a training dataset.
pub fn load_dataset(manifests: &[PathBuf]) -> Result<(Vec<ManifestEntry>, Dataset)> {
    let mut entries = Vec::new();
    let mut data = Dataset::default();
    let mut adjacency: HashMap<PathBuf, (Vec<u32>, Arc<Adjacency>)> = HashMap::new();
    for m in manifests {
        let base = m.parent().unwrap_or(Path::new("."));
        for e in read_manifest(m)? {
            let (nodes, rows) = features_from_csv(&fs::read_to_string(base.join(&e.features))?)?;
            let edges_path = base.join(&e.edges);
            if !adjacency.contains_key(&edges_path) {
                let edges = edges_from_text(&fs::read_to_string(&edges_path)?, &nodes)?;
                let adj = Arc::new(Adjacency::new(nodes.len(), &edges)?);
                adjacency.insert(edges_path.clone(), (nodes.clone(), adj));
            }
            let (known, adj) = &adjacency[&edges_path];
            if *known != nodes {
                return Err(Error::shape(format!("{} rows differ from the design's other samples", e.features)));
            }
            data.push(GraphInput::new(adj.clone(), features_matrix(&rows))?, e.label, &e.design_id);
            entries.push(e);
        }
    }
    Ok((entries, data))
}
