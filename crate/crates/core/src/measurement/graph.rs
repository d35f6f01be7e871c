use std::collections::BTreeSet;
use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::Pvm;
use crate::error::{Error, Result};
use crate::operator::Projector;

/// Stable identity of a projector under floating-point noise.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProjectorKey(String);

impl ProjectorKey {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ProjectorKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Hermitizes, quantizes every entry to a grid of size `eps_key`, and
/// hashes the grid coordinates together with the dimension.
pub fn projector_key(p: &Projector, eps_key: f64) -> ProjectorKey {
    let h = p.matrix().hermitize();
    let mut hasher = Sha256::new();
    hasher.update((p.dim() as u64).to_le_bytes());
    for z in h.row_major() {
        for part in [z.re, z.im] {
            let q = (part / eps_key).round() as i64;
            hasher.update(q.to_le_bytes());
        }
    }
    let digest = hasher.finalize();
    let hex: String = digest[..16].iter().map(|b| format!("{b:02x}")).collect();
    ProjectorKey(hex)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphNode {
    pub key: ProjectorKey,
    pub rank: usize,
    /// Number of list entries (PVM indices) containing the node.
    pub degree: usize,
    /// Same count after merging PVMs whose element keys coincide.
    pub distinct_degree: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphSummary {
    pub nodes: usize,
    pub max_degree: usize,
    pub nodes_with_degree_ge2: usize,
}

/// Projector/measurement incidence structure over a list of PVMs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntertwineGraph {
    pub nodes: Vec<GraphNode>,
    pub incidence: Vec<(ProjectorKey, usize)>,
}

impl IntertwineGraph {
    pub fn node(&self, key: &ProjectorKey) -> Option<&GraphNode> {
        self.nodes.iter().find(|n| &n.key == key)
    }

    pub fn degree(&self, key: &ProjectorKey) -> usize {
        self.node(key).map_or(0, |n| n.degree)
    }

    pub fn summary(&self) -> GraphSummary {
        GraphSummary {
            nodes: self.nodes.len(),
            max_degree: self.nodes.iter().map(|n| n.degree).max().unwrap_or(0),
            nodes_with_degree_ge2: self.nodes.iter().filter(|n| n.degree >= 2).count(),
        }
    }
}

pub fn intertwine_graph(pvms: &[Pvm], eps_key: f64) -> Result<IntertwineGraph> {
    if let Some(first) = pvms.first() {
        if let Some(other) = pvms.iter().find(|m| m.dim() != first.dim()) {
            return Err(Error::MixedDimensions { first: first.dim(), other: other.dim() });
        }
    }

    struct Acc {
        rank: usize,
        pvms: BTreeSet<usize>,
        classes: BTreeSet<Vec<ProjectorKey>>,
    }

    let mut nodes: IndexMap<ProjectorKey, Acc> = IndexMap::new();
    let mut incidence = Vec::new();
    for (index, m) in pvms.iter().enumerate() {
        let keys: Vec<ProjectorKey> = m.elements().iter().map(|p| projector_key(p, eps_key)).collect();
        let mut class = keys.clone();
        class.sort();
        for (key, p) in keys.into_iter().zip(m.elements()) {
            let entry = nodes.entry(key.clone()).or_insert_with(|| Acc {
                rank: p.rank(),
                pvms: BTreeSet::new(),
                classes: BTreeSet::new(),
            });
            if entry.pvms.insert(index) {
                incidence.push((key, index));
            }
            entry.classes.insert(class.clone());
        }
    }

    let nodes = nodes
        .into_iter()
        .map(|(key, acc)| GraphNode {
            key,
            rank: acc.rank,
            degree: acc.pvms.len(),
            distinct_degree: acc.classes.len(),
        })
        .collect();
    Ok(IntertwineGraph { nodes, incidence })
}
