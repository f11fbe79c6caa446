use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hypergraph on named vertices; every edge is a set of vertex indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypergraph {
    #[serde(rename = "vertices")]
    pub vertex_names: Vec<String>,
    pub edges: Vec<BTreeSet<usize>>,
    /// Optional edge labels; they become the vertex names of the dual.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub edge_names: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HypergraphReport {
    pub empty_edges: Vec<usize>,
    pub uncovered_vertices: Vec<usize>,
    /// `(edge, vertex index)` pairs pointing past the vertex list.
    pub dangling: Vec<(usize, usize)>,
    /// `(i, j)` with `E_i ⊆ E_j`, `i ≠ j`.
    pub nested: Vec<(usize, usize)>,
    pub bad_edge_names: bool,
}

impl HypergraphReport {
    pub fn is_valid(&self) -> bool {
        self.empty_edges.is_empty() && self.uncovered_vertices.is_empty() && self.dangling.is_empty() && !self.bad_edge_names
    }

    pub fn is_simple(&self) -> bool {
        self.is_valid() && self.nested.is_empty()
    }
}

impl fmt::Display for HypergraphReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.empty_edges.is_empty() {
            parts.push(format!("empty edges {:?}", one_based(&self.empty_edges)));
        }
        if !self.uncovered_vertices.is_empty() {
            parts.push(format!("uncovered vertices {:?}", one_based(&self.uncovered_vertices)));
        }
        for (e, v) in &self.dangling {
            parts.push(format!("edge {} names vertex index {v}, out of range", e + 1));
        }
        if self.bad_edge_names {
            parts.push("edge_names length differs from edge count".into());
        }
        for (i, j) in &self.nested {
            parts.push(format!("E{} is contained in E{}", i + 1, j + 1));
        }
        if parts.is_empty() {
            write!(f, "valid, simple")
        } else {
            write!(f, "{}", parts.join("; "))
        }
    }
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|i| i + 1).collect()
}

impl Hypergraph {
    pub fn new(vertex_names: Vec<String>, edges: Vec<BTreeSet<usize>>) -> Self {
        Hypergraph { vertex_names, edges, edge_names: Vec::new() }
    }

    /// Vertices named `x1, x2, …` and 1-based edge lists.
    pub fn from_one_based(n_vertices: usize, edges: &[&[usize]]) -> Result<Self> {
        let edges = edges
            .iter()
            .map(|e| {
                e.iter()
                    .map(|&v| {
                        v.checked_sub(1).ok_or_else(|| Error::InvalidValue("vertex numbers are 1-based".into()))
                    })
                    .collect()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Hypergraph::new((1..=n_vertices).map(|i| format!("x{i}")).collect(), edges))
    }

    pub fn n_vertices(&self) -> usize {
        self.vertex_names.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edge_name(&self, j: usize) -> String {
        self.edge_names.get(j).cloned().unwrap_or_else(|| format!("E{}", j + 1))
    }

    pub fn validate(&self) -> HypergraphReport {
        let n = self.n_vertices();
        let mut report = HypergraphReport::default();
        let mut covered = vec![false; n];
        for (j, e) in self.edges.iter().enumerate() {
            if e.is_empty() {
                report.empty_edges.push(j);
            }
            for &v in e {
                match covered.get_mut(v) {
                    Some(c) => *c = true,
                    None => report.dangling.push((j, v)),
                }
            }
        }
        report.uncovered_vertices = (0..n).filter(|&v| !covered[v]).collect();
        for (i, a) in self.edges.iter().enumerate() {
            for (j, b) in self.edges.iter().enumerate() {
                if i != j && a.is_subset(b) {
                    report.nested.push((i, j));
                }
            }
        }
        report.bad_edge_names = !self.edge_names.is_empty() && self.edge_names.len() != self.edges.len();
        report
    }

    pub fn is_simple(&self) -> bool {
        self.validate().is_simple()
    }

    /// `|V| × |E|` membership matrix.
    pub fn incidence(&self) -> Vec<Vec<bool>> {
        (0..self.n_vertices()).map(|v| self.edges.iter().map(|e| e.contains(&v)).collect()).collect()
    }

    /// Vertices become edges and edges become vertices:
    /// `X_i = { e_j | x_i ∈ E_j }`.
    pub fn dual(&self) -> Result<Hypergraph> {
        let report = self.validate();
        if !report.is_valid() {
            return Err(Error::Structure(format!("dual of an invalid hypergraph: {report}")));
        }
        let edges = (0..self.n_vertices())
            .map(|v| (0..self.n_edges()).filter(|&j| self.edges[j].contains(&v)).collect())
            .collect();
        Ok(Hypergraph {
            vertex_names: (0..self.n_edges()).map(|j| self.edge_name(j)).collect(),
            edges,
            edge_names: self.vertex_names.clone(),
        })
    }

    /// Equal vertex count and edge lists, ignoring names.
    pub fn same_structure(&self, other: &Hypergraph) -> bool {
        self.n_vertices() == other.n_vertices() && self.edges == other.edges
    }
}
