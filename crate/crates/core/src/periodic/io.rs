//! Voltage-graph JSON:
//! `{"group": {"type": "Zd", "d": 2} | {"type": "free", "rank": 2},
//!   "vertices": m, "edges": [{"from": f, "to": g, "label": [..] | "word"}],
//!   "stabilizers": [..]}`.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{Free, Group, VoltageGraph, Zd};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum GroupJson {
    #[serde(rename = "Zd")]
    Zd { d: usize },
    #[serde(rename = "free")]
    Free { rank: usize },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EdgeJson {
    pub from: usize,
    pub to: usize,
    pub label: Value,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VoltageJson {
    pub group: GroupJson,
    pub vertices: usize,
    pub edges: Vec<EdgeJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stabilizers: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree_bound: Option<usize>,
}

/// A voltage graph over one of the built-in carriers.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyVoltageGraph {
    Zd(VoltageGraph<Zd>),
    Free(VoltageGraph<Free>),
}

impl From<VoltageGraph<Zd>> for AnyVoltageGraph {
    fn from(vg: VoltageGraph<Zd>) -> Self {
        AnyVoltageGraph::Zd(vg)
    }
}

impl From<VoltageGraph<Free>> for AnyVoltageGraph {
    fn from(vg: VoltageGraph<Free>) -> Self {
        AnyVoltageGraph::Free(vg)
    }
}

fn zd_label(v: &Value, d: usize) -> Result<Vec<i64>> {
    let bad = || Error::Parse(format!("Z^{d} label must be an integer array, got {v}"));
    let items = v.as_array().ok_or_else(bad)?;
    let label = items
        .iter()
        .map(|x| x.as_i64().ok_or_else(bad))
        .collect::<Result<Vec<_>>>()?;
    Zd { dim: d }.validate(&label)?;
    Ok(label)
}

impl VoltageJson {
    pub fn into_voltage_graph(self) -> Result<AnyVoltageGraph> {
        match self.group {
            GroupJson::Zd { d } => {
                let group = Zd { dim: d };
                let edges = self
                    .edges
                    .iter()
                    .map(|e| Ok((e.from, e.to, zd_label(&e.label, d)?)))
                    .collect::<Result<Vec<_>>>()?;
                Ok(VoltageGraph::new(
                    group,
                    self.vertices,
                    &edges,
                    self.stabilizers,
                    self.degree_bound,
                )?
                .into())
            }
            GroupJson::Free { rank } => {
                if rank > Free::MAX_RANK {
                    return Err(Error::Voltage(format!(
                        "free-group rank {rank} exceeds {}",
                        Free::MAX_RANK
                    )));
                }
                let group = Free { rank };
                let edges = self
                    .edges
                    .iter()
                    .map(|e| {
                        let word = e.label.as_str().ok_or_else(|| {
                            Error::Parse(format!(
                                "free-group label must be a string, got {}",
                                e.label
                            ))
                        })?;
                        Ok((e.from, e.to, group.parse(word)?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(VoltageGraph::new(
                    group,
                    self.vertices,
                    &edges,
                    self.stabilizers,
                    self.degree_bound,
                )?
                .into())
            }
        }
    }

    pub fn from_voltage_graph(vg: &AnyVoltageGraph) -> Self {
        fn build<G: Group>(
            vg: &VoltageGraph<G>,
            group: GroupJson,
            label: impl Fn(&G::Element) -> Value,
        ) -> VoltageJson {
            let stabilizers = (!vg.is_free()).then(|| vg.stabilizers().to_vec());
            VoltageJson {
                group,
                vertices: vg.vertex_count(),
                edges: vg
                    .undirected_edges()
                    .iter()
                    .map(|(f, g, l)| EdgeJson {
                        from: *f,
                        to: *g,
                        label: label(l),
                    })
                    .collect(),
                stabilizers,
                degree_bound: vg.declared_degree_bound(),
            }
        }
        match vg {
            AnyVoltageGraph::Zd(v) => build(v, GroupJson::Zd { d: v.group().dim }, |l| {
                Value::from(l.clone())
            }),
            AnyVoltageGraph::Free(v) => build(
                v,
                GroupJson::Free {
                    rank: v.group().rank,
                },
                |l| Value::from(v.group().format(l)),
            ),
        }
    }
}

pub fn parse_voltage_json(text: &str) -> Result<AnyVoltageGraph> {
    let raw: VoltageJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    raw.into_voltage_graph()
}
