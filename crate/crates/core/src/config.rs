//! JSON configuration files describing a curve configuration: the decorated
//! dual graph, the geometry kind, optional user base values and the weight.

use crate::error::{Error, Result};
use crate::graph::{CurveClass, DualGraph, Edge, EdgeId, Vertex, VertexId};
use crate::invariants::{GeometryKind, LayeredProvider, UserBaseEntry, UserTableProvider, WeightKind};
use crate::rational::parse_rat;
use serde::Deserialize;

#[derive(Debug, Deserialize)]
pub struct ConfigFile {
    pub graph: GraphConfig,
    pub geometry: String,
    #[serde(default)]
    pub weight: Option<String>,
    #[serde(default)]
    pub base_table: Vec<BaseTableEntry>,
}

#[derive(Debug, Deserialize)]
pub struct GraphConfig {
    pub vertices: Vec<VertexConfig>,
    #[serde(default)]
    pub edges: Vec<(u32, u32)>,
}

#[derive(Debug, Deserialize)]
pub struct VertexConfig {
    pub id: u32,
    #[serde(default = "default_omega")]
    pub omega_deg: u32,
    pub h_deg: u32,
    #[serde(default = "default_rational")]
    pub rational: bool,
}

fn default_omega() -> u32 {
    1
}

fn default_rational() -> bool {
    true
}

#[derive(Debug, Deserialize)]
pub struct BaseTableEntry {
    /// Multiset of nonzero multidegrees of the tree class.
    pub gamma: Vec<u64>,
    #[serde(default)]
    pub n: Option<i64>,
    /// Exact rational as "p/q" or "p".
    pub value: String,
}

pub struct LoadedConfig {
    pub graph: DualGraph,
    pub geometry: GeometryKind,
    pub weight: WeightKind,
    pub provider: LayeredProvider,
}

pub fn parse_config(text: &str) -> Result<LoadedConfig> {
    let file: ConfigFile =
        serde_json::from_str(text).map_err(|e| Error::InvalidConfig(format!("bad JSON: {e}")))?;
    let vertices: Vec<Vertex> = file
        .graph
        .vertices
        .iter()
        .map(|v| Vertex {
            id: VertexId(v.id),
            omega_deg: v.omega_deg,
            h_deg: v.h_deg,
            rational: v.rational,
        })
        .collect();
    let edges: Vec<Edge> = file
        .graph
        .edges
        .iter()
        .enumerate()
        .map(|(i, &(u, v))| Edge {
            id: EdgeId(i as u32),
            tail: VertexId(u),
            head: VertexId(v),
        })
        .collect();
    let graph = DualGraph::new(vertices, edges)?;

    let geometry = match file.geometry.as_str() {
        "super-rigid" => GeometryKind::SuperRigid,
        "surface-type" => GeometryKind::SurfaceType,
        other => {
            return Err(Error::InvalidConfig(format!(
                "geometry must be \"super-rigid\" or \"surface-type\", got {other:?}"
            )))
        }
    };
    let weight = match file.weight.as_deref() {
        None | Some("behrend") => WeightKind::Behrend,
        Some("euler") => WeightKind::Euler,
        Some(other) => {
            return Err(Error::InvalidConfig(format!(
                "weight must be \"behrend\" or \"euler\", got {other:?}"
            )))
        }
    };

    let mut user = UserTableProvider::default();
    for entry in &file.base_table {
        if entry.gamma.is_empty() || entry.gamma.iter().any(|&a| a == 0) {
            return Err(Error::InvalidConfig(
                "base table multidegrees must be positive".into(),
            ));
        }
        user.entries.push(UserBaseEntry {
            multidegrees: entry.gamma.clone(),
            n: entry.n,
            value: parse_rat(&entry.value)?,
        });
    }

    Ok(LoadedConfig {
        graph,
        geometry,
        weight,
        provider: LayeredProvider { user },
    })
}

/// Parse a comma-separated multidegree, matched positionally to the config's
/// vertex order.
pub fn parse_gamma(graph: &DualGraph, text: &str) -> Result<CurveClass> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() > graph.num_vertices() {
        return Err(Error::InvalidConfig(format!(
            "multidegree has {} entries but the graph has {} vertices",
            parts.len(),
            graph.num_vertices()
        )));
    }
    let mut coeffs = Vec::new();
    for (i, p) in parts.iter().enumerate() {
        let a: u64 = p
            .parse()
            .map_err(|_| Error::InvalidConfig(format!("bad multidegree entry {p:?}")))?;
        coeffs.push((graph.vertices[i].id, a));
    }
    Ok(CurveClass::from_coeffs(coeffs))
}
