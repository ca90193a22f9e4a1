use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::oracle::VertexKey;
use super::patch::{Patch, PatchEdge};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const EXCHANGE_VERSION: u32 = 1;

/// Text form of a patch. Field order is fixed; weights are exact strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatchDocument {
    pub version: u32,
    pub descriptor: String,
    pub radius: usize,
    pub vertices: Vec<VertexKey>,
    /// `(i, j, weight, multiplicity)` for every in-patch bundle `i -> j`.
    pub adjacency: Vec<(usize, usize, String, u32)>,
    pub vertex_weights: Vec<String>,
    /// Weighted out-degree mass, including edges leaving the patch.
    pub out_mass: Vec<String>,
    pub frontier: Vec<bool>,
    pub depth: Vec<usize>,
}

impl<S: Scalar> Patch<S> {
    pub fn to_document(&self) -> PatchDocument {
        let mut adjacency = Vec::new();
        for (i, adj) in self.adjacency.iter().enumerate() {
            for e in adj {
                adjacency.push((i, e.neighbor, e.weight.to_exact_string(), e.multiplicity));
            }
        }
        PatchDocument {
            version: EXCHANGE_VERSION,
            descriptor: self.descriptor.clone(),
            radius: self.radius,
            vertices: self.vertices.clone(),
            adjacency,
            vertex_weights: self.vertex_weights.iter().map(Scalar::to_exact_string).collect(),
            out_mass: self.out_mass.iter().map(Scalar::to_exact_string).collect(),
            frontier: self.frontier.clone(),
            depth: self.depth.clone(),
        }
    }

    pub fn from_document(doc: &PatchDocument) -> Result<Self> {
        if doc.version != EXCHANGE_VERSION {
            return Err(Error::Data(format!("unsupported patch document version {}", doc.version)));
        }
        let n = doc.vertices.len();
        if doc.vertex_weights.len() != n || doc.out_mass.len() != n || doc.frontier.len() != n || doc.depth.len() != n {
            return Err(Error::Data("patch document arrays have inconsistent lengths".into()));
        }
        let parse = |s: &str| S::parse_exact(s).ok_or_else(|| Error::Data(format!("bad weight string {:?}", s)));
        let mut adjacency: Vec<Vec<PatchEdge<S>>> = vec![Vec::new(); n];
        for (i, j, w, m) in &doc.adjacency {
            if *i >= n || *j >= n {
                return Err(Error::Data(format!("adjacency entry ({}, {}) out of range", i, j)));
            }
            adjacency[*i].push(PatchEdge { neighbor: *j, weight: parse(w)?, multiplicity: *m });
        }
        let index: HashMap<VertexKey, usize> = doc.vertices.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        if index.len() != n {
            return Err(Error::Data("duplicate vertex keys in patch document".into()));
        }
        Ok(Patch {
            vertices: doc.vertices.clone(),
            index,
            adjacency,
            vertex_weights: doc.vertex_weights.iter().map(|s| parse(s)).collect::<Result<_>>()?,
            out_mass: doc.out_mass.iter().map(|s| parse(s)).collect::<Result<_>>()?,
            frontier: doc.frontier.clone(),
            depth: doc.depth.clone(),
            radius: doc.radius,
            descriptor: doc.descriptor.clone(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("patch document serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: PatchDocument = serde_json::from_str(text).map_err(|e| Error::Data(e.to_string()))?;
        Self::from_document(&doc)
    }
}
