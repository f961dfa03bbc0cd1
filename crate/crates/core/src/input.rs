//! JSON input files for networks, diagrams and transfer systems.

use std::path::Path;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::bratteli::{build_diagram, subdivide_multi_edges, BratteliDiagram, ConductanceRule, Incidence, MultiEdge};
use crate::error::{Error, Result};
use crate::models::{BinaryTree, Lattice, LineNetwork};
use crate::network::{ExplicitNetwork, Network, VertexId};
use crate::transfer::{TransferSpec, TransferSystem};

fn spec_err(location: &str, message: impl Into<String>) -> Error {
    Error::Spec { location: location.to_string(), message: message.into() }
}

/// `{ "model": ..., "params": {...} }`
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub model: String,
    #[serde(default)]
    pub params: NetworkParams,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkParams {
    pub lambda: Option<f64>,
    #[serde(alias = "dim")]
    pub d: Option<usize>,
    pub depth: Option<usize>,
    /// Stationary incidence A.
    pub incidence: Option<Vec<Vec<f64>>>,
    /// Explicit edge list `[x, y, c]`.
    pub edges: Option<Vec<(VertexId, VertexId, f64)>>,
    pub origin: Option<VertexId>,
}

/// A network read from a file; diagram-backed models keep their diagram.
#[derive(Clone)]
pub struct LoadedNetwork {
    pub name: String,
    pub network: Arc<dyn Network>,
    pub diagram: Option<Arc<BratteliDiagram>>,
}

impl std::fmt::Debug for LoadedNetwork {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LoadedNetwork").field("name", &self.name).finish()
    }
}

pub const DEFAULT_DEPTH: usize = 32;

fn lambda_above(p: &NetworkParams, min: f64, model: &str) -> Result<f64> {
    let l = p.lambda.ok_or_else(|| spec_err("params.lambda", format!("model {model} needs lambda")))?;
    if !(l > min) || !l.is_finite() {
        return Err(spec_err("params.lambda", format!("model {model} needs lambda > {min}, got {l}")));
    }
    Ok(l)
}

impl NetworkSpec {
    pub fn load(&self) -> Result<LoadedNetwork> {
        let p = &self.params;
        let model = self.model.as_str();
        let plain = |net: Arc<dyn Network>| LoadedNetwork { name: model.to_string(), network: net, diagram: None };
        let with_diagram = |d: BratteliDiagram| {
            let d = Arc::new(d);
            LoadedNetwork { name: model.to_string(), network: Arc::new(d.network()), diagram: Some(d) }
        };
        let depth = p.depth.unwrap_or(DEFAULT_DEPTH);
        match model {
            "line_n0_linear" => Ok(plain(Arc::new(LineNetwork::n0_linear()))),
            "line_z_unit" => Ok(plain(Arc::new(LineNetwork::z_unit()))),
            "line_z_geometric" | "line_z_summable" => Ok(plain(Arc::new(LineNetwork::z_geometric(lambda_above(p, 0.0, model)?)))),
            "line_n0_geometric" => Ok(plain(Arc::new(LineNetwork::n0_geometric(lambda_above(p, 0.0, model)?)))),
            "line_n0_summable" => Ok(plain(Arc::new(LineNetwork::n0_summable(lambda_above(p, 0.0, model)?)))),
            "binary_tree" => Ok(plain(Arc::new(BinaryTree::new(lambda_above(p, 0.0, model)?)?))),
            "lattice_zd" | "lattice" => {
                let d = p.d.ok_or_else(|| spec_err("params.d", "lattice needs d"))?;
                Ok(plain(Arc::new(Lattice::new(d).map_err(|e| spec_err("params.d", e.to_string()))?)))
            }
            "pascal" => {
                let rule = match p.lambda {
                    Some(l) => ConductanceRule::LambdaPowN { lambda: l },
                    None => ConductanceRule::Unit,
                };
                Ok(with_diagram(BratteliDiagram::pascal(depth, &rule)?))
            }
            "stationary_bratteli" | "stationary" => {
                let rows = p.incidence.as_ref().ok_or_else(|| spec_err("params.incidence", "stationary diagram needs an incidence matrix"))?;
                let a = square_matrix(rows, "params.incidence")?;
                let lambda = p.lambda.unwrap_or(1.0);
                Ok(with_diagram(BratteliDiagram::stationary(&a, lambda, depth)?))
            }
            "explicit" => {
                let edges = p.edges.as_ref().ok_or_else(|| spec_err("params.edges", "explicit model needs an edge list"))?;
                let net = ExplicitNetwork::from_vertex_edges(edges, p.origin).map_err(|e| spec_err("params.edges", e.to_string()))?;
                Ok(plain(Arc::new(net)))
            }
            other => Err(spec_err("model", format!("unknown model {other:?}"))),
        }
    }
}

fn square_matrix(rows: &[Vec<f64>], location: &str) -> Result<DMatrix<f64>> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(spec_err(location, "expected a nonempty square matrix"));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Levels {
    Count(usize),
    Named(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IncidenceSpec {
    PerLevel(Vec<Incidence>),
    Single(Incidence),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MultiEdgeSpec {
    #[default]
    Reject,
    MergeParallel,
    /// Insert a midpoint on every edge so the diagram becomes 0-1.
    Subdivide,
}

/// `{ "levels": K | "stationary", "incidence": ..., "conductance": {...} }`
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiagramSpec {
    pub levels: Levels,
    pub incidence: IncidenceSpec,
    #[serde(default = "unit_rule")]
    pub conductance: ConductanceRule,
    /// Depth of a stationary diagram.
    pub depth: Option<usize>,
    #[serde(default)]
    pub multi_edges: MultiEdgeSpec,
    pub name: Option<String>,
}

fn unit_rule() -> ConductanceRule {
    ConductanceRule::Unit
}

impl DiagramSpec {
    pub fn build(&self) -> Result<BratteliDiagram> {
        let incidence: Vec<Incidence> = match (&self.levels, &self.incidence) {
            (Levels::Named(s), IncidenceSpec::Single(a)) if s == "stationary" => {
                vec![a.clone(); self.depth.unwrap_or(DEFAULT_DEPTH)]
            }
            (Levels::Named(s), IncidenceSpec::PerLevel(v)) if s == "stationary" && v.len() == 1 => {
                vec![v[0].clone(); self.depth.unwrap_or(DEFAULT_DEPTH)]
            }
            (Levels::Named(s), _) if s == "stationary" => return Err(spec_err("incidence", "a stationary diagram takes a single matrix")),
            (Levels::Named(s), _) => return Err(spec_err("levels", format!("expected a level count or \"stationary\", got {s:?}"))),
            (Levels::Count(k), IncidenceSpec::PerLevel(v)) => {
                if v.len() != *k {
                    return Err(spec_err("incidence", format!("{} matrices given for {k} levels", v.len())));
                }
                v.clone()
            }
            (Levels::Count(k), IncidenceSpec::Single(a)) => vec![a.clone(); *k],
        };
        let d = match self.multi_edges {
            MultiEdgeSpec::Reject => build_diagram(&incidence, &self.conductance, MultiEdge::Reject)?,
            MultiEdgeSpec::MergeParallel => build_diagram(&incidence, &self.conductance, MultiEdge::MergeParallel)?,
            MultiEdgeSpec::Subdivide => {
                if matches!(self.conductance, ConductanceRule::Explicit { .. }) {
                    return Err(spec_err("multi_edges", "subdivision cannot carry explicit conductances"));
                }
                build_diagram(&subdivide_multi_edges(&incidence)?, &self.conductance, MultiEdge::Reject)?
            }
        };
        Ok(match &self.name {
            Some(n) => d.with_name(n),
            None => d,
        })
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let loc = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| spec_err(&loc, e.to_string()))?;
    serde_json::from_str(&text).map_err(|e| spec_err(&format!("{loc}:{}:{}", e.line(), e.column()), e.to_string()))
}

pub fn read_network_spec(path: &Path) -> Result<LoadedNetwork> {
    read_json::<NetworkSpec>(path)?.load()
}

pub fn read_diagram_spec(path: &Path) -> Result<BratteliDiagram> {
    read_json::<DiagramSpec>(path)?.build()
}

pub fn read_transfer_spec(path: &Path) -> Result<TransferSystem> {
    TransferSystem::from_spec(&read_json::<TransferSpec>(path)?)
}
