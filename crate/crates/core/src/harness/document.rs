//! JSON interchange:
//! `{"n": 3, "edges": [[0,1],[1,2]], "boundary": [0,2], "rotation": [...], "meta": {...}}`.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{BoundaryGraph, RotationGraph};

/// Default cap on vertices accepted from documents.
pub const DEFAULT_MAX_N: usize = 20_000;
pub const MAX_N_VAR: &str = "STEKLOV_MAX_N";

/// Instance cap from the environment, falling back to [`DEFAULT_MAX_N`].
pub fn instance_cap() -> usize {
    std::env::var(MAX_N_VAR)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_N)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    pub boundary: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub meta: BTreeMap<String, serde_json::Value>,
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Schema {
        path: path.into(),
        message: message.into(),
    }
}

impl GraphDocument {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    /// Single-line JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(self).expect("document serializes");
        s.push('\n');
        s
    }

    pub fn from_boundary_graph(g: &BoundaryGraph) -> Self {
        GraphDocument {
            n: g.n(),
            edges: g.edges().iter().map(|&(u, v)| [u, v]).collect(),
            boundary: g.boundary().to_vec(),
            rotation: None,
            meta: BTreeMap::new(),
        }
    }

    pub fn from_rotation_graph(rg: &RotationGraph) -> Self {
        GraphDocument {
            rotation: Some(rg.rotation().to_vec()),
            ..Self::from_boundary_graph(rg.base())
        }
    }

    pub fn with_meta(mut self, meta: BTreeMap<String, serde_json::Value>) -> Self {
        self.meta = meta;
        self
    }

    pub fn check_size(&self, cap: usize) -> Result<()> {
        if self.n > cap {
            return Err(Error::InstanceTooLarge { n: self.n, cap });
        }
        Ok(())
    }

    /// Validates the document, naming the offending entry on failure.
    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        let mut seen = HashSet::new();
        for (i, &[u, v]) in self.edges.iter().enumerate() {
            let path = format!("edges[{i}]");
            if u >= n || v >= n {
                return Err(schema(path, format!("endpoint out of range for n = {n}")));
            }
            if u == v {
                return Err(schema(path, "self loop"));
            }
            if u > v {
                return Err(schema(path, "smaller endpoint must come first"));
            }
            if !seen.insert((u, v)) {
                return Err(schema(path, "duplicate edge"));
            }
        }
        if self.boundary.is_empty() {
            return Err(schema("boundary", "must not be empty"));
        }
        let mut on = HashSet::new();
        for (i, &b) in self.boundary.iter().enumerate() {
            if b >= n {
                return Err(schema(format!("boundary[{i}]"), format!("vertex out of range for n = {n}")));
            }
            if !on.insert(b) {
                return Err(schema(format!("boundary[{i}]"), "duplicate vertex"));
            }
        }
        if let Some(rot) = &self.rotation {
            if rot.len() != n {
                return Err(schema("rotation", format!("expected {n} lists, found {}", rot.len())));
            }
            let mut nbrs = vec![Vec::new(); n];
            for &[u, v] in &self.edges {
                nbrs[u].push(v);
                nbrs[v].push(u);
            }
            for (v, list) in rot.iter().enumerate() {
                let mut a = list.clone();
                a.sort_unstable();
                nbrs[v].sort_unstable();
                if a != nbrs[v] {
                    return Err(schema(
                        format!("rotation[{v}]"),
                        "must list every neighbor exactly once",
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn to_boundary_graph(&self) -> Result<BoundaryGraph> {
        self.validate()?;
        let edges: Vec<(usize, usize)> = self.edges.iter().map(|e| (e[0], e[1])).collect();
        BoundaryGraph::new(self.n, &edges, &self.boundary)
    }

    pub fn to_rotation_graph(&self) -> Result<RotationGraph> {
        let base = self.to_boundary_graph()?;
        let rotation = self
            .rotation
            .clone()
            .ok_or_else(|| schema("rotation", "required for this operation"))?;
        RotationGraph::new(base, rotation)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::generators::Family;

    #[test]
    fn round_trip_families() {
        for fam in [
            Family::Tetrahedron,
            Family::Sphere { level: 1 },
            Family::Torus { n: 3, m: 4 },
            Family::Genus { g: 2, resolution: 4 },
            Family::Path { n: 5 },
        ] {
            let rg = fam.build().unwrap();
            let doc = GraphDocument::from_rotation_graph(&rg).with_meta(fam.metadata());
            let back = GraphDocument::parse(&doc.to_json()).unwrap();
            assert_eq!(back, doc);
            assert_eq!(back.to_rotation_graph().unwrap(), rg);
        }
    }

    #[test]
    fn positional_errors() {
        let e = GraphDocument::parse("{\"n\": 2,\n \"edges\": [[0,1]],\n \"boundary\": [0,]}").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e:?}");
        let e = GraphDocument::parse(r#"{"n":2,"edges":[],"boundary":[0],"extra":1}"#).unwrap_err();
        assert!(matches!(e, Error::Parse { .. }));
        let doc = GraphDocument::parse(r#"{"n":3,"edges":[[0,1],[2,1]],"boundary":[0]}"#).unwrap();
        assert_eq!(
            doc.to_boundary_graph().unwrap_err(),
            schema("edges[1]", "smaller endpoint must come first")
        );
        let doc = GraphDocument::parse(r#"{"n":3,"edges":[[0,1]],"boundary":[0,7]}"#).unwrap();
        assert!(matches!(doc.validate(), Err(Error::Schema { path, .. }) if path == "boundary[1]"));
        let doc = GraphDocument::parse(r#"{"n":3,"edges":[[0,1],[1,2]],"boundary":[0],"rotation":[[1],[0],[1]]}"#)
            .unwrap();
        assert!(matches!(doc.validate(), Err(Error::Schema { path, .. }) if path == "rotation[1]"));
        let doc = GraphDocument::parse(r#"{"n":2,"edges":[[0,1]],"boundary":[0]}"#).unwrap();
        assert!(matches!(doc.to_rotation_graph(), Err(Error::Schema { path, .. }) if path == "rotation"));
        assert_eq!(doc.check_size(1), Err(Error::InstanceTooLarge { n: 2, cap: 1 }));
    }
}
