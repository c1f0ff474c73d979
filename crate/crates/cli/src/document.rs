//! On-disk graph documents.

use std::fs;
use std::path::Path;

use cayley_spectra::generators::GenericGraph;
use cayley_spectra::{CayleyGraph, Graph};
use serde::{Deserialize, Serialize};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub format_version: u32,
    #[serde(flatten)]
    pub body: Body,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Body {
    Cayley {
        moduli: Vec<u64>,
        /// Every element of `A`, sorted lexicographically.
        connection_set: Vec<Vec<u64>>,
    },
    Generic {
        n: usize,
        /// Pairs `[u, v]` with `u < v`, sorted.
        edges: Vec<(usize, usize)>,
    },
}

pub enum LoadedGraph {
    Cayley(CayleyGraph),
    Generic(GenericGraph),
}

impl LoadedGraph {
    pub fn as_graph(&self) -> &dyn Graph {
        match self {
            LoadedGraph::Cayley(g) => g,
            LoadedGraph::Generic(g) => g,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            LoadedGraph::Cayley(_) => "cayley",
            LoadedGraph::Generic(_) => "generic",
        }
    }
}

impl GraphDocument {
    pub fn from_cayley(g: &CayleyGraph) -> Self {
        let mut connection_set: Vec<Vec<u64>> =
            g.connection_set().elements().iter().map(|a| a.residues().to_vec()).collect();
        connection_set.sort();
        Self {
            format_version: FORMAT_VERSION,
            body: Body::Cayley { moduli: g.group().moduli().to_vec(), connection_set },
        }
    }

    pub fn from_generic(g: &GenericGraph) -> Self {
        Self { format_version: FORMAT_VERSION, body: Body::Generic { n: g.order(), edges: g.edges() } }
    }

    pub fn to_graph(&self) -> Result<LoadedGraph, String> {
        if self.format_version != FORMAT_VERSION {
            return Err(format!("unsupported format_version {} (expected {FORMAT_VERSION})", self.format_version));
        }
        match &self.body {
            Body::Cayley { moduli, connection_set } => {
                let residues: Vec<Vec<i64>> =
                    connection_set.iter().map(|a| a.iter().map(|&r| r as i64).collect()).collect();
                CayleyGraph::from_parts(moduli, &residues).map(LoadedGraph::Cayley).map_err(|e| e.to_string())
            }
            Body::Generic { n, edges } => {
                if let Some((u, v)) = edges.iter().find(|(u, v)| u >= v) {
                    return Err(format!("edge [{u}, {v}] is not of the form u < v"));
                }
                GenericGraph::new(*n, edges.iter().copied()).map(LoadedGraph::Generic).map_err(|e| e.to_string())
            }
        }
    }

    pub fn read(path: &Path) -> Result<Self, String> {
        let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }
}
