//! Finite graphs approximating a periodic graph through an almost
//! homomorphism of its group into a symmetric group.
//!
//! Vertices of the finite graph are pairs `(f, i)` with `f` in the
//! fundamental domain and `0 <= i < N`, stored as `f * N + i`. Composition
//! follows `(s t)(i) = s(t(i))`.

mod perm;
mod provider;

pub use perm::Permutation;
pub use provider::{
    parse_permutation_table, sofic_outcome, to_permutation_table, FamilyProvider, ProviderSpec,
    SoficFamily, SoficOutcome,
};

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{BallClassKey, Graph};
use crate::limits::{ball_distribution, periodic_ball_distribution};
use crate::periodic::{Free, FreeWord, Group, VoltageGraph, Zd};

/// Where an [`AlmostHom`] came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    Quotient { n: usize },
    Random { seed: u64 },
    User,
}

/// A map from a finite subset of the group into `Sym(N)`.
#[derive(Clone, Debug)]
pub struct AlmostHom<G: Group> {
    pub group: G,
    pub degree: usize,
    pub table: BTreeMap<G::Element, Permutation>,
    pub provenance: Provenance,
}

impl<G: Group> AlmostHom<G> {
    pub fn new(
        group: G,
        degree: usize,
        table: BTreeMap<G::Element, Permutation>,
        provenance: Provenance,
    ) -> Result<Self> {
        if let Some((g, p)) = table.iter().find(|(_, p)| p.degree() != degree) {
            return Err(Error::AlmostHom(format!(
                "permutation for {} has degree {} instead of {degree}",
                group.format(g),
                p.degree()
            )));
        }
        Ok(AlmostHom {
            group,
            degree,
            table,
            provenance,
        })
    }

    pub fn get(&self, g: &G::Element) -> Result<&Permutation> {
        self.table
            .get(g)
            .ok_or_else(|| Error::AlmostHom(format!("no permutation for {}", self.group.format(g))))
    }

    fn require(&self, domain: &BTreeSet<G::Element>) -> Result<()> {
        domain.iter().try_for_each(|g| self.get(g).map(|_| ()))
    }
}

/// `T = {gamma_x : x in B_r(F)}`.
pub fn build_t<G: Group>(vg: &VoltageGraph<G>, r: usize) -> Result<BTreeSet<G::Element>> {
    if !vg.is_free() {
        return Err(Error::Voltage(
            "the sofic construction needs a free action".into(),
        ));
    }
    let mut t = BTreeSet::new();
    for f in 0..vg.vertex_count() {
        for (_, gamma) in vg.unfold(f, r)?.labels {
            t.insert(gamma);
        }
    }
    Ok(t)
}

/// `TT u (TT)^{-1} u T^{-1}T u TT^{-1}`.
pub fn build_ttilde<G: Group>(group: &G, t: &BTreeSet<G::Element>) -> BTreeSet<G::Element> {
    let mut out = BTreeSet::new();
    for s in t {
        let s_inv = group.inverse(s);
        for u in t {
            let su = group.compose(s, u);
            out.insert(group.inverse(&su));
            out.insert(su);
            out.insert(group.compose(&s_inv, u));
            out.insert(group.compose(s, &group.inverse(u)));
        }
    }
    out
}

/// Translations of the discrete torus `(Z/n)^d`, points numbered row-major.
pub fn make_quotient_hom_zd(
    n: usize,
    d: usize,
    ttilde: &BTreeSet<Vec<i64>>,
) -> Result<AlmostHom<Zd>> {
    if n == 0 {
        return Err(Error::Domain("quotient modulus must be positive".into()));
    }
    let size = n
        .checked_pow(d as u32)
        .filter(|&s| s <= u32::MAX as usize)
        .ok_or_else(|| Error::Domain(format!("{n}^{d} points is too many")))?;
    let group = Zd { dim: d };
    let mut table = BTreeMap::new();
    for gamma in ttilde {
        group.validate(gamma)?;
        let images = (0..size)
            .map(|i| {
                let mut rest = i;
                let mut out = 0usize;
                let mut scale = 1usize;
                for k in (0..d).rev() {
                    let c = rest % n;
                    rest /= n;
                    let shifted = (c as i64 + gamma[k]).rem_euclid(n as i64) as usize;
                    out += shifted * scale;
                    scale *= n;
                }
                out as u32
            })
            .collect();
        table.insert(gamma.clone(), Permutation::from_images(images)?);
    }
    AlmostHom::new(group, size, table, Provenance::Quotient { n })
}

/// Uniform random permutations for the generators, seeded, extended to
/// words by composition.
pub fn make_random_almost_hom(
    rank: usize,
    degree: usize,
    seed: u64,
    ttilde: &BTreeSet<FreeWord>,
) -> Result<AlmostHom<Free>> {
    if degree == 0 || degree > u32::MAX as usize {
        return Err(Error::Domain(
            "permutation degree must be in 1..=2^32-1".into(),
        ));
    }
    let group = Free { rank };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let generators: Vec<Permutation> = (0..rank)
        .map(|_| {
            let mut images: Vec<u32> = (0..degree as u32).collect();
            images.shuffle(&mut rng);
            Permutation::from_images(images).expect("shuffle is a bijection")
        })
        .collect();
    let inverses: Vec<Permutation> = generators.iter().map(Permutation::inverse).collect();
    let mut table = BTreeMap::new();
    for word in ttilde {
        group.validate(word)?;
        let sigma = word
            .0
            .iter()
            .fold(Permutation::identity(degree), |acc, &l| {
                let k = l.unsigned_abs() as usize - 1;
                acc.compose(if l > 0 { &generators[k] } else { &inverses[k] })
            });
        table.insert(word.clone(), sigma);
    }
    AlmostHom::new(group, degree, table, Provenance::Random { seed })
}

/// Conditions (i)-(iii) measured on a domain.
#[derive(Clone, Debug, PartialEq)]
pub struct DefectReport {
    /// `max d_H(sigma_s sigma_t, sigma_st)` over `s, t, st` in the domain.
    pub defect_i: f64,
    /// `d_H(sigma_e, Id)`.
    pub defect_ii: f64,
    /// `min d_H(sigma_s, sigma_t)` over `s != t`; 1 when there is no pair.
    pub defect_iii: f64,
    pub worst_product: Option<(String, String)>,
    pub closest_pair: Option<(String, String)>,
    /// Pairs `s != t` with `sigma_s = sigma_t`.
    pub collisions: Vec<(String, String)>,
}

impl DefectReport {
    /// Whether `h` is an almost homomorphism for `(domain, eps)` with
    /// separation, i.e. all three conditions hold.
    pub fn meets(&self, eps: f64) -> bool {
        self.defect_i < eps && self.defect_ii < eps && self.defect_iii >= 1.0 - eps
    }

    /// Lower bound on the good-index fraction from the measured defects.
    pub fn claim_lower_bound(&self, ttilde_size: usize) -> f64 {
        let m = (ttilde_size * ttilde_size) as f64;
        (1.0 - 2.0 * m * self.defect_i - 2.0 * m * (1.0 - self.defect_iii)).max(0.0)
    }
}

pub fn defects<G: Group>(h: &AlmostHom<G>, domain: &BTreeSet<G::Element>) -> Result<DefectReport> {
    h.require(domain)?;
    let n = h.degree.max(1) as f64;
    let g = &h.group;
    let mut defect_i = 0.0;
    let mut worst_product = None;
    for s in domain {
        for t in domain {
            let st = g.compose(s, t);
            if let Some(sigma_st) = h.table.get(&st).filter(|_| domain.contains(&st)) {
                let d = sigma_st.product_disagreements(&h.table[s], &h.table[t]) as f64 / n;
                if d > defect_i {
                    defect_i = d;
                    worst_product = Some((g.format(s), g.format(t)));
                }
            }
        }
    }
    let e = g.identity();
    let defect_ii = match h.table.get(&e) {
        Some(p) => p.hamming(&Permutation::identity(h.degree)),
        None => 0.0,
    };
    let mut defect_iii: f64 = 1.0;
    let mut closest_pair = None;
    let mut collisions = Vec::new();
    let elems: Vec<&G::Element> = domain.iter().collect();
    for (a, s) in elems.iter().enumerate() {
        for t in &elems[a + 1..] {
            let d = h.table[*s].hamming(&h.table[*t]);
            if d == 0.0 {
                collisions.push((g.format(s), g.format(t)));
            }
            if d < defect_iii || closest_pair.is_none() {
                defect_iii = defect_iii.min(d);
                closest_pair = Some((g.format(s), g.format(t)));
            }
        }
    }
    Ok(DefectReport {
        defect_i,
        defect_ii,
        defect_iii,
        worst_product,
        closest_pair,
        collisions,
    })
}

/// The finite graph `G_r` together with what had to be cleaned up.
#[derive(Clone, Debug)]
pub struct SoficGraph {
    pub graph: Graph,
    /// Number of `(f, i) ~ (f, i)` pairings dropped.
    pub loops_discarded: usize,
    /// Number of repeated pairings merged into existing edges.
    pub multi_edges_collapsed: usize,
    pub degree_bound: usize,
    /// Vertices whose degree exceeds `degree_bound`.
    pub degree_violations: Vec<usize>,
}

/// Connects `(f, i)` and `(g, j)` whenever `gamma f ~ gamma' g` in the cover
/// for some `gamma, gamma'` in `T` with `sigma_gamma(i) = sigma_gamma'(j)`.
///
/// The cover edges are `(f, gamma) ~ (g, gamma lambda)`, so for each
/// `gamma` and labeled edge the partner index is
/// `j = sigma_{gamma lambda}^{-1}(sigma_gamma(i))`.
pub fn sofic_graph<G: Group>(
    vg: &VoltageGraph<G>,
    r: usize,
    h: &AlmostHom<G>,
) -> Result<SoficGraph> {
    let t = build_t(vg, r)?;
    h.require(&t)?;
    let group = vg.group();
    let n = h.degree;
    let inverses: HashMap<&G::Element, Permutation> =
        t.iter().map(|g| (g, h.table[g].inverse())).collect();
    let mut edges: HashSet<(usize, usize)> = HashSet::new();
    let mut loops_discarded = 0;
    let mut multi_edges_collapsed = 0;
    for gamma in &t {
        let sigma = &h.table[gamma];
        for f in 0..vg.vertex_count() {
            for (g, lambda) in vg.labeled_edges(f) {
                let target = group.compose(gamma, lambda);
                let Some(inv) = inverses.get(&target) else {
                    continue;
                };
                for i in 0..n {
                    let j = inv.apply(sigma.apply(i));
                    let (a, b) = (f * n + i, g * n + j);
                    if a == b {
                        loops_discarded += 1;
                        continue;
                    }
                    // each undirected pairing is met from both endpoints
                    if a < b && !edges.insert((a, b)) {
                        multi_edges_collapsed += 1;
                    } else if a > b {
                        edges.insert((b, a));
                    }
                }
            }
        }
    }
    let mut edge_list: Vec<(usize, usize)> = edges.into_iter().collect();
    edge_list.sort_unstable();
    let graph = Graph::from_edges(vg.vertex_count() * n, &edge_list)?;
    let degree_bound = vg
        .declared_degree_bound()
        .unwrap_or_else(|| vg.max_cover_degree());
    let degree_violations = (0..graph.vertex_count())
        .filter(|&v| graph.degree(v) > degree_bound)
        .collect();
    Ok(SoficGraph {
        graph,
        loops_discarded,
        multi_edges_collapsed,
        degree_bound,
        degree_violations,
    })
}

/// Cover vertices `(f, gamma)` of a window and the edges between them.
type Window<E> = (Vec<(usize, E)>, Vec<(usize, usize)>);

/// `B_r(F)` with adjacency: labels and cover edges between them.
fn cover_window<G: Group>(vg: &VoltageGraph<G>, r: usize) -> Result<Window<G::Element>> {
    let mut index: HashMap<(usize, G::Element), usize> = HashMap::new();
    let mut labels = Vec::new();
    for f in 0..vg.vertex_count() {
        for label in vg.unfold(f, r)?.labels {
            if !index.contains_key(&label) {
                index.insert(label.clone(), labels.len());
                labels.push(label);
            }
        }
    }
    let mut edges = Vec::new();
    for (a, (f, gamma)) in labels.iter().enumerate() {
        for (g, lambda) in vg.labeled_edges(*f) {
            if let Some(&b) = index.get(&(*g, vg.group().compose(gamma, lambda))) {
                if a < b {
                    edges.push((a, b));
                }
            }
        }
    }
    Ok((labels, edges))
}

/// Fraction of `i` for which `phi_i(x) = (pi(x), sigma_{gamma_x^{-1}}(i))`
/// is an isomorphism from `B_r(F)` onto its image in `graph`.
pub fn good_index_fraction<G: Group>(
    vg: &VoltageGraph<G>,
    r: usize,
    h: &AlmostHom<G>,
    graph: &Graph,
) -> Result<f64> {
    let (labels, cover_edges) = cover_window(vg, r)?;
    let group = vg.group();
    let perms = labels
        .iter()
        .map(|(_, gamma)| h.get(&group.inverse(gamma)))
        .collect::<Result<Vec<_>>>()?;
    let n = h.degree;
    let m = labels.len();
    let adjacent: HashSet<(usize, usize)> = cover_edges.into_iter().collect();
    let mut good = 0usize;
    let mut image = vec![0usize; m];
    let mut seen = HashSet::with_capacity(m);
    'index: for i in 0..n {
        seen.clear();
        for (x, (f, _)) in labels.iter().enumerate() {
            image[x] = f * n + perms[x].apply(i);
            if !seen.insert(image[x]) {
                continue 'index;
            }
        }
        for x in 0..m {
            for y in x + 1..m {
                if adjacent.contains(&(x, y)) != graph.has_edge(image[x], image[y]) {
                    continue 'index;
                }
            }
        }
        good += 1;
    }
    Ok(good as f64 / n.max(1) as f64)
}

/// One ball class in a [`DeltaReport`].
#[derive(Clone, Debug, PartialEq)]
pub struct DeltaRow {
    pub key: BallClassKey,
    /// `p(G_r, alpha)`.
    pub graph_frequency: BigRational,
    /// `|F_alpha| / |F|`.
    pub cover_frequency: BigRational,
    pub deviation: BigRational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeltaReport {
    pub delta: f64,
    /// `delta / (2 |T~|^2)`.
    pub epsilon: f64,
    /// Whether the measured defects meet `epsilon`; when they do not the
    /// inequality is still measured but carries no guarantee.
    pub precondition_met: bool,
    pub rows: Vec<DeltaRow>,
    pub max_deviation: BigRational,
}

impl DeltaReport {
    pub fn holds(&self) -> bool {
        self.max_deviation.to_f64().is_some_and(|d| d < self.delta)
    }
}

pub(crate) fn delta_report<G: Group>(
    vg: &VoltageGraph<G>,
    r: usize,
    graph: &Graph,
    defects: &DefectReport,
    ttilde_size: usize,
    delta: f64,
) -> Result<DeltaReport> {
    let epsilon = delta / (2.0 * (ttilde_size * ttilde_size) as f64);
    let finite = ball_distribution(graph, r)?;
    let cover = periodic_ball_distribution(vg, r)?;
    let keys: BTreeSet<&BallClassKey> = finite.entries.keys().chain(cover.entries.keys()).collect();
    let rows: Vec<DeltaRow> = keys
        .into_iter()
        .map(|k| {
            let p = finite.frequency(k);
            let q = cover.frequency(k);
            let deviation = if p > q { &p - &q } else { &q - &p };
            DeltaRow {
                key: k.clone(),
                graph_frequency: p,
                cover_frequency: q,
                deviation,
            }
        })
        .collect();
    let max_deviation = rows
        .iter()
        .map(|r| r.deviation.clone())
        .max()
        .unwrap_or_else(BigRational::zero);
    Ok(DeltaReport {
        delta,
        epsilon,
        precondition_met: defects.meets(epsilon),
        rows,
        max_deviation,
    })
}

/// Measures `|p(G_r, alpha) - |F_alpha|/|F|| < delta` over every class seen
/// on either side.
pub fn check_delta_guarantee<G: Group>(
    vg: &VoltageGraph<G>,
    r: usize,
    h: &AlmostHom<G>,
    delta: f64,
) -> Result<DeltaReport> {
    let t = build_t(vg, r)?;
    let ttilde = build_ttilde(vg.group(), &t);
    let d = defects(h, &ttilde)?;
    let graph = sofic_graph(vg, r, h)?;
    delta_report(vg, r, &graph.graph, &d, ttilde.len(), delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generators;
    use crate::limits::distribution_distance;
    use crate::periodic::{free_cayley, lattice};
    use crate::series::int;

    fn zset(v: &[i64]) -> BTreeSet<Vec<i64>> {
        v.iter().map(|&x| vec![x]).collect()
    }

    #[test]
    fn line_sets() {
        let line = lattice(1);
        assert_eq!(build_t(&line, 1).unwrap(), zset(&[-1, 0, 1]));
        assert_eq!(build_t(&line, 2).unwrap(), zset(&[-2, -1, 0, 1, 2]));
        assert_eq!(build_t(&line, 0).unwrap(), zset(&[0]));
        let t = build_t(&line, 1).unwrap();
        assert_eq!(build_ttilde(line.group(), &t), zset(&[-2, -1, 0, 1, 2]));
        assert_eq!(build_ttilde(line.group(), &zset(&[0])), zset(&[0]));
    }

    #[test]
    fn quotient_defects() {
        let tt = zset(&[-2, -1, 0, 1, 2]);
        let h = make_quotient_hom_zd(12, 1, &tt).unwrap();
        let d = defects(&h, &tt).unwrap();
        assert_eq!((d.defect_i, d.defect_ii, d.defect_iii), (0.0, 0.0, 1.0));
        assert_eq!(h.get(&vec![0]).unwrap(), &Permutation::identity(12));
        let small = make_quotient_hom_zd(2, 1, &tt).unwrap();
        let d = defects(&small, &tt).unwrap();
        assert_eq!(d.defect_iii, 0.0);
        assert!(d.collisions.contains(&("-2".into(), "0".into())));
        assert!(d.collisions.contains(&("0".into(), "2".into())));
    }

    #[test]
    fn transposition_error() {
        let group = Zd { dim: 1 };
        let mut table = BTreeMap::new();
        let mut images: Vec<u32> = (0..10).collect();
        images.swap(0, 1);
        table.insert(vec![0], Permutation::identity(10));
        table.insert(vec![1], Permutation::identity(10));
        table.insert(vec![2], Permutation::from_images(images).unwrap());
        let h = AlmostHom::new(group, 10, table, Provenance::User).unwrap();
        let d = defects(&h, &zset(&[0, 1, 2])).unwrap();
        assert_eq!(d.defect_i, 0.2);
        assert_eq!(d.defect_ii, 0.0);
        assert!(defects(&h, &zset(&[0, 3])).is_err());
    }

    #[test]
    fn line_quotient_gives_cycle() {
        let line = lattice(1);
        let tt = build_ttilde(line.group(), &build_t(&line, 1).unwrap());
        let h = make_quotient_hom_zd(12, 1, &tt).unwrap();
        let g = sofic_graph(&line, 1, &h).unwrap();
        assert_eq!(g.graph.edge_count(), 12);
        assert_eq!(g.graph.regular_degree(), Some(2));
        assert!(g.graph.is_connected());
        assert!(g.degree_violations.is_empty());
        assert_eq!(good_index_fraction(&line, 1, &h, &g.graph).unwrap(), 1.0);
        let d = check_delta_guarantee(&line, 1, &h, 0.01).unwrap();
        assert_eq!(d.max_deviation, int(0));
    }

    #[test]
    fn tiny_quotient_wraps() {
        let line = lattice(1);
        let tt = build_ttilde(line.group(), &build_t(&line, 1).unwrap());
        let h = make_quotient_hom_zd(2, 1, &tt).unwrap();
        let g = sofic_graph(&line, 1, &h).unwrap();
        assert!(good_index_fraction(&line, 1, &h, &g.graph).unwrap() < 1.0);
    }

    #[test]
    fn identity_table_is_degenerate() {
        let line = lattice(1);
        let tt = build_ttilde(line.group(), &build_t(&line, 1).unwrap());
        let table = tt
            .iter()
            .map(|g| (g.clone(), Permutation::identity(6)))
            .collect();
        let h = AlmostHom::new(*line.group(), 6, table, Provenance::User).unwrap();
        let g = sofic_graph(&line, 1, &h).unwrap();
        assert!(g.loops_discarded > 0);
        assert_eq!(g.graph.edge_count(), 0);
    }

    #[test]
    fn grid_quotient_is_torus() {
        let grid = lattice(2);
        let tt = build_ttilde(grid.group(), &build_t(&grid, 1).unwrap());
        let h = make_quotient_hom_zd(8, 2, &tt).unwrap();
        let g = sofic_graph(&grid, 1, &h).unwrap().graph;
        let torus = generators::torus(8, 2).unwrap();
        assert_eq!(g.edge_count(), torus.edge_count());
        let a = ball_distribution(&g, 2).unwrap();
        let b = ball_distribution(&torus, 2).unwrap();
        assert_eq!(distribution_distance(&a, &b).unwrap(), int(0));
    }

    #[test]
    fn random_provider_is_a_homomorphism() {
        let tree = free_cayley(2);
        let tt = build_ttilde(tree.group(), &build_t(&tree, 1).unwrap());
        let h = make_random_almost_hom(2, 300, 7, &tt).unwrap();
        let d = defects(&h, &tt).unwrap();
        assert_eq!(d.defect_i, 0.0);
        assert_eq!(d.defect_ii, 0.0);
        assert!(d.defect_iii > 0.9);
        let again = make_random_almost_hom(2, 300, 7, &tt).unwrap();
        assert_eq!(again.table, h.table);
    }
}
