//! Provider specs, permutation tables, and the end-to-end construction over
//! the built-in group carriers.
//!
//! Provider JSON: `{"provider": "quotient", "n": 16}`,
//! `{"provider": "random", "N": 2000, "seed": 42}` or
//! `{"provider": "table", "file": "perms.txt"}`.
//!
//! Permutation tables hold one line per group element: the element in its
//! text form followed by the images of `0 .. N-1`. `#` starts a comment.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::{
    build_t, build_ttilde, defects, delta_report, good_index_fraction, make_quotient_hom_zd,
    make_random_almost_hom, sofic_graph, AlmostHom, DefectReport, DeltaReport, Permutation,
    Provenance,
};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::periodic::{AnyVoltageGraph, Group, VoltageGraph};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "provider", rename_all = "lowercase")]
pub enum ProviderSpec {
    Quotient {
        n: usize,
    },
    Random {
        #[serde(rename = "N")]
        n: usize,
        seed: u64,
    },
    Table {
        file: PathBuf,
    },
}

pub fn parse_permutation_table<G: Group>(group: &G, text: &str) -> Result<AlmostHom<G>> {
    let mut table = BTreeMap::new();
    let mut degree = None;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let element = group.parse(fields.next().expect("non-empty line"))?;
        let images = fields
            .map(|s| {
                s.parse::<u32>()
                    .map_err(|_| Error::Parse(format!("line {}: bad image {s:?}", lineno + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        let perm = Permutation::from_images(images)?;
        if *degree.get_or_insert(perm.degree()) != perm.degree() {
            return Err(Error::Parse(format!(
                "line {}: permutation degree changes",
                lineno + 1
            )));
        }
        if table.insert(element, perm).is_some() {
            return Err(Error::Parse(format!(
                "line {}: element listed twice",
                lineno + 1
            )));
        }
    }
    AlmostHom::new(group.clone(), degree.unwrap_or(0), table, Provenance::User)
}

pub fn to_permutation_table<G: Group>(h: &AlmostHom<G>) -> String {
    h.table
        .iter()
        .map(|(g, p)| {
            let images: Vec<String> = p.images().iter().map(u32::to_string).collect();
            format!("{} {}\n", h.group.format(g), images.join(" "))
        })
        .collect()
}

/// Everything measured for one sofic construction.
#[derive(Clone, Debug)]
pub struct SoficOutcome {
    pub graph: Graph,
    pub loops_discarded: usize,
    pub multi_edges_collapsed: usize,
    pub degree_bound: usize,
    pub degree_violations: usize,
    pub t_size: usize,
    pub ttilde_size: usize,
    pub defects: DefectReport,
    pub good_index_fraction: f64,
    pub claim_lower_bound: f64,
    pub delta: DeltaReport,
}

fn run<G: Group>(
    vg: &VoltageGraph<G>,
    r: usize,
    h: &AlmostHom<G>,
    delta: f64,
) -> Result<SoficOutcome> {
    let t = build_t(vg, r)?;
    let ttilde = build_ttilde(vg.group(), &t);
    let d = defects(h, &ttilde)?;
    let built = sofic_graph(vg, r, h)?;
    let good = good_index_fraction(vg, r, h, &built.graph)?;
    let delta = delta_report(vg, r, &built.graph, &d, ttilde.len(), delta)?;
    Ok(SoficOutcome {
        loops_discarded: built.loops_discarded,
        multi_edges_collapsed: built.multi_edges_collapsed,
        degree_bound: built.degree_bound,
        degree_violations: built.degree_violations.len(),
        graph: built.graph,
        t_size: t.len(),
        ttilde_size: ttilde.len(),
        claim_lower_bound: d.claim_lower_bound(ttilde.len()),
        defects: d,
        good_index_fraction: good,
        delta,
    })
}

/// Builds the provider for `vg`, constructs `G_r` and measures it.
///
/// Quotient providers need a `Z^d` carrier and random providers a free one.
pub fn sofic_outcome(
    vg: &AnyVoltageGraph,
    r: usize,
    provider: &ProviderSpec,
    delta: f64,
) -> Result<SoficOutcome> {
    let table_text = |file: &PathBuf| std::fs::read_to_string(file).map_err(Error::from);
    match (vg, provider) {
        (AnyVoltageGraph::Zd(v), ProviderSpec::Quotient { n }) => {
            let tt = build_ttilde(v.group(), &build_t(v, r)?);
            run(v, r, &make_quotient_hom_zd(*n, v.group().dim, &tt)?, delta)
        }
        (AnyVoltageGraph::Free(v), ProviderSpec::Random { n, seed }) => {
            let tt = build_ttilde(v.group(), &build_t(v, r)?);
            run(
                v,
                r,
                &make_random_almost_hom(v.group().rank, *n, *seed, &tt)?,
                delta,
            )
        }
        (AnyVoltageGraph::Zd(v), ProviderSpec::Table { file }) => run(
            v,
            r,
            &parse_permutation_table(v.group(), &table_text(file)?)?,
            delta,
        ),
        (AnyVoltageGraph::Free(v), ProviderSpec::Table { file }) => run(
            v,
            r,
            &parse_permutation_table(v.group(), &table_text(file)?)?,
            delta,
        ),
        (AnyVoltageGraph::Zd(_), ProviderSpec::Random { .. }) => Err(Error::AlmostHom(
            "the random provider needs a free-group voltage graph".into(),
        )),
        (AnyVoltageGraph::Free(_), ProviderSpec::Quotient { .. }) => Err(Error::AlmostHom(
            "the quotient provider needs a Z^d voltage graph".into(),
        )),
    }
}

/// How the members of a [`SoficFamily`] obtain their permutations; the
/// member size is the modulus or the permutation degree.
#[derive(Clone, Debug, PartialEq)]
pub enum FamilyProvider {
    Quotient,
    Random { seed: u64 },
}

/// `G_r` for a range of provider sizes.
#[derive(Clone, Debug)]
pub struct SoficFamily {
    pub voltage: AnyVoltageGraph,
    pub radius: usize,
    pub provider: FamilyProvider,
    pub sizes: Vec<usize>,
}

impl SoficFamily {
    pub fn members(&self) -> Result<Vec<(usize, Graph)>> {
        self.sizes
            .iter()
            .map(|&n| {
                let spec = match self.provider {
                    FamilyProvider::Quotient => ProviderSpec::Quotient { n },
                    FamilyProvider::Random { seed } => ProviderSpec::Random { n, seed },
                };
                let graph = match (&self.voltage, &spec) {
                    (AnyVoltageGraph::Zd(v), ProviderSpec::Quotient { n }) => {
                        let tt = build_ttilde(v.group(), &build_t(v, self.radius)?);
                        sofic_graph(
                            v,
                            self.radius,
                            &make_quotient_hom_zd(*n, v.group().dim, &tt)?,
                        )?
                        .graph
                    }
                    (AnyVoltageGraph::Free(v), ProviderSpec::Random { n, seed }) => {
                        let tt = build_ttilde(v.group(), &build_t(v, self.radius)?);
                        sofic_graph(
                            v,
                            self.radius,
                            &make_random_almost_hom(v.group().rank, *n, *seed, &tt)?,
                        )?
                        .graph
                    }
                    _ => {
                        return Err(Error::AlmostHom(
                            "provider does not fit the voltage graph's group".into(),
                        ))
                    }
                };
                Ok((n, graph))
            })
            .collect()
    }
}
