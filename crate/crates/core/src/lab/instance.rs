use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::graph::{Graph, PartStructure};
use crate::lists::{Color, ListAssignment};
use crate::pipeline::{BicliqueSystem, MultipartiteInstance};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub generator: String,
    #[serde(default)]
    pub params: BTreeMap<String, serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl Metadata {
    pub fn new(generator: &str) -> Self {
        Metadata {
            generator: generator.to_string(),
            params: BTreeMap::new(),
            seed: None,
            warnings: Vec::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        self.params.insert(
            key.to_string(),
            serde_json::to_value(value).expect("parameters serialize"),
        );
        self
    }
}

/// On-disk instance. Without `edges` the graph is the complete multipartite
/// graph on `parts`; with `edges`, `parts` is only required to partition
/// the vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub schema_version: u32,
    pub parts: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<(usize, usize)>>,
    pub lists: BTreeMap<usize, Vec<Color>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub planted: Option<BicliqueSystem>,
    pub metadata: Metadata,
}

impl InstanceFile {
    pub fn from_multipartite(inst: &MultipartiteInstance, metadata: Metadata) -> Self {
        InstanceFile {
            schema_version: SCHEMA_VERSION,
            parts: inst.parts().parts().to_vec(),
            edges: None,
            lists: lists_map(inst.lists()),
            planted: None,
            metadata,
        }
    }

    /// An arbitrary graph; every vertex is placed in its own part.
    pub fn from_graph(g: &Graph, lists: &ListAssignment, metadata: Metadata) -> Self {
        InstanceFile {
            schema_version: SCHEMA_VERSION,
            parts: (0..g.vertex_count()).map(|v| vec![v]).collect(),
            edges: Some(g.edges()),
            lists: lists_map(lists),
            planted: None,
            metadata,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.parts.iter().map(Vec::len).sum()
    }

    fn check_version(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(LabError::invalid(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        Ok(())
    }

    pub fn part_structure(&self) -> Result<PartStructure> {
        self.check_version()?;
        PartStructure::new(self.vertex_count(), self.parts.clone())
    }

    pub fn graph(&self) -> Result<Graph> {
        let parts = self.part_structure()?;
        match &self.edges {
            Some(edges) => Graph::new(parts.vertex_count(), edges),
            None => Ok(parts.to_graph()),
        }
    }

    /// Lists keyed densely by `0..n`.
    pub fn list_assignment(&self) -> Result<ListAssignment> {
        let n = self.vertex_count();
        if let Some(v) = (0..n).find(|v| !self.lists.contains_key(v)) {
            return Err(LabError::invalid(format!("vertex {v} has no list")));
        }
        if let Some(&v) = self.lists.keys().find(|&&v| v >= n) {
            return Err(LabError::invalid(format!("list given for vertex {v} outside 0..{n}")));
        }
        ListAssignment::new(self.lists.values().cloned().collect())
    }

    /// Only for files without explicit edges.
    pub fn multipartite(&self) -> Result<MultipartiteInstance> {
        if self.edges.is_some() {
            return Err(LabError::invalid(
                "instance carries explicit edges, not a complete multipartite graph",
            ));
        }
        MultipartiteInstance::new(self.part_structure()?, self.list_assignment()?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let f: InstanceFile = serde_json::from_str(s)?;
        f.check_version()?;
        Ok(f)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut s = self.to_json()?;
        s.push('\n');
        std::fs::write(path, s)?;
        Ok(())
    }
}

fn lists_map(lists: &ListAssignment) -> BTreeMap<usize, Vec<Color>> {
    lists.lists().iter().cloned().enumerate().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_list_rejected() {
        let mut f = InstanceFile::from_multipartite(
            &MultipartiteInstance::complete(&[1, 1], ListAssignment::uniform(2, 2).unwrap()).unwrap(),
            Metadata::new("test"),
        );
        f.lists.remove(&1);
        assert!(matches!(f.list_assignment(), Err(LabError::InvalidArgument(_))));
    }

    #[test]
    fn explicit_edges_round_trip() {
        let g = Graph::cycle(5).unwrap();
        let f = InstanceFile::from_graph(&g, &ListAssignment::uniform(5, 3).unwrap(), Metadata::new("c5"));
        let back = InstanceFile::from_json(&f.to_json().unwrap()).unwrap();
        assert_eq!(back, f);
        assert_eq!(back.graph().unwrap(), g);
        assert!(back.multipartite().is_err());
    }

    #[test]
    fn wrong_schema_version() {
        let s = r#"{"schema_version": 9, "parts": [[0]], "lists": {"0": [1]}, "metadata": {"generator": "x"}}"#;
        assert!(InstanceFile::from_json(s).is_err());
    }
}
