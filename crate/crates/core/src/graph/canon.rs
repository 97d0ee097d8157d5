//! Canonical byte keys for rooted (optionally edge-colored) balls.
//!
//! Three encodings share one key space, distinguished by a leading tag byte:
//!
//! * uncolored trees use the nested-parenthesis encoding with sorted children,
//! * other uncolored graphs use the lexicographically smallest upper-triangle
//!   adjacency string over an individualization-refinement search tree,
//! * colored graphs use the breadth-first traversal that expands neighbors in
//!   color order. A proper coloring makes every color-walk deterministic, so
//!   this traversal is already a complete invariant.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Graph, RootedBall};
use crate::error::{Error, Result};

const TAG_TREE: u8 = 0;
const TAG_GRAPH: u8 = 1;
const TAG_COLORED: u8 = 2;
const OPEN: u8 = b'(';
const CLOSE: u8 = b')';

/// Canonical encoding of a rooted graph up to root-preserving isomorphism.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BallClassKey(Vec<u8>);

impl BallClassKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        self.0.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn from_hex(s: &str) -> Result<Self> {
        if !s.len().is_multiple_of(2) {
            return Err(Error::Parse(format!("odd-length key {s:?}")));
        }
        (0..s.len())
            .step_by(2)
            .map(|i| {
                u8::from_str_radix(&s[i..i + 2], 16)
                    .map_err(|e| Error::Parse(format!("bad key {s:?}: {e}")))
            })
            .collect::<Result<Vec<u8>>>()
            .map(BallClassKey)
    }

    pub fn is_colored(&self) -> bool {
        self.0.first() == Some(&TAG_COLORED)
    }

    /// Reconstructs a representative rooted graph (root = vertex 0).
    pub fn decode(&self) -> Result<DecodedBall> {
        let bad = || Error::Parse(format!("malformed ball key {}", self.to_hex()));
        let (&tag, rest) = self.0.split_first().ok_or_else(bad)?;
        let mut reader = Reader {
            bytes: rest,
            pos: 0,
        };
        let (graph, colors) = match tag {
            TAG_TREE => {
                let len = reader.u32().ok_or_else(bad)? as usize;
                let body = reader.take(len).ok_or_else(bad)?;
                (decode_tree(body).ok_or_else(bad)?, None)
            }
            TAG_GRAPH => {
                let n = reader.u32().ok_or_else(bad)? as usize;
                let bits = reader
                    .take((n * n.saturating_sub(1) / 2).div_ceil(8))
                    .ok_or_else(bad)?;
                let mut edges = Vec::new();
                let mut k = 0;
                for i in 0..n {
                    for j in i + 1..n {
                        if bits[k / 8] >> (k % 8) & 1 == 1 {
                            edges.push((i, j));
                        }
                        k += 1;
                    }
                }
                (Graph::from_edges(n, &edges)?, None)
            }
            TAG_COLORED => {
                let n = reader.u32().ok_or_else(bad)? as usize;
                let m = reader.u32().ok_or_else(bad)? as usize;
                let mut triples = Vec::with_capacity(m);
                for _ in 0..m {
                    let i = reader.u32().ok_or_else(bad)? as usize;
                    let j = reader.u32().ok_or_else(bad)? as usize;
                    let c = reader.u32().ok_or_else(bad)?;
                    triples.push((i, j, c));
                }
                let edges: Vec<_> = triples.iter().map(|&(i, j, _)| (i, j)).collect();
                let graph = Graph::from_edges(n, &edges)?;
                let mut colors: Vec<Vec<u32>> = (0..n).map(|v| vec![0; graph.degree(v)]).collect();
                for &(i, j, c) in &triples {
                    let a = graph.neighbors(i).binary_search(&j).map_err(|_| bad())?;
                    let b = graph.neighbors(j).binary_search(&i).map_err(|_| bad())?;
                    colors[i][a] = c;
                    colors[j][b] = c;
                }
                (graph, Some(colors))
            }
            _ => return Err(bad()),
        };
        if reader.pos != reader.bytes.len() || !graph.is_connected() {
            return Err(bad());
        }
        let mut ball = RootedBall {
            graph,
            root: 0,
            radius: 0,
        };
        ball.radius = ball.eccentricity();
        Ok(DecodedBall { ball, colors })
    }
}

impl fmt::Debug for BallClassKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BallClassKey({})", self.to_hex())
    }
}

impl fmt::Display for BallClassKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl Serialize for BallClassKey {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for BallClassKey {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        BallClassKey::from_hex(&s).map_err(serde::de::Error::custom)
    }
}

/// A rooted graph recovered from a [`BallClassKey`].
#[derive(Clone, Debug)]
pub struct DecodedBall {
    pub ball: RootedBall,
    /// Edge colors parallel to the adjacency lists, for colored keys.
    pub colors: Option<Vec<Vec<u32>>>,
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize) -> Option<&'a [u8]> {
        let out = self.bytes.get(self.pos..self.pos + len)?;
        self.pos += len;
        Some(out)
    }

    fn u32(&mut self) -> Option<u32> {
        self.take(4)
            .map(|b| u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }
}

/// Canonical key of a rooted ball. With `colors` (parallel to the adjacency
/// lists of `ball.graph`) the key respects edge colors; the coloring must be
/// proper.
pub fn canonical_key(ball: &RootedBall, colors: Option<&[Vec<u32>]>) -> Result<BallClassKey> {
    match colors {
        Some(colors) => {
            validate_coloring(&ball.graph, colors)?;
            Ok(colored_key(&ball.graph, ball.root, colors))
        }
        None if ball.is_tree() => Ok(tree_key(&ball.graph, ball.root)),
        None => Ok(Canonizer::new(&ball.graph, ball.root).run()),
    }
}

pub(crate) fn validate_coloring(g: &Graph, colors: &[Vec<u32>]) -> Result<()> {
    if colors.len() != g.vertex_count() {
        return Err(Error::ImproperColoring(
            "color table does not match vertex count".into(),
        ));
    }
    for v in 0..g.vertex_count() {
        let row = &colors[v];
        if row.len() != g.degree(v) {
            return Err(Error::ImproperColoring(format!(
                "vertex {v} has wrong number of colors"
            )));
        }
        let mut seen = row.clone();
        seen.sort_unstable();
        if let Some(w) = seen.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::ImproperColoring(format!(
                "color {} repeated at vertex {v}",
                w[0]
            )));
        }
        for (k, &w) in g.neighbors(v).iter().enumerate() {
            let back = g
                .neighbors(w)
                .binary_search(&v)
                .expect("symmetric adjacency");
            if colors[w][back] != row[k] {
                return Err(Error::ImproperColoring(format!(
                    "edge {v}-{w} colored asymmetrically"
                )));
            }
        }
    }
    Ok(())
}

fn colored_key(g: &Graph, root: usize, colors: &[Vec<u32>]) -> BallClassKey {
    let n = g.vertex_count();
    let mut label = vec![u32::MAX; n];
    label[root] = 0;
    let mut next = 1;
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        let mut by_color: Vec<(u32, usize)> = colors[v]
            .iter()
            .copied()
            .zip(g.neighbors(v).iter().copied())
            .collect();
        by_color.sort_unstable();
        for (_, w) in by_color {
            if label[w] == u32::MAX {
                label[w] = next;
                next += 1;
                queue.push_back(w);
            }
        }
    }
    let mut triples: Vec<(u32, u32, u32)> = Vec::with_capacity(g.edge_count());
    for (u, v) in g.edges() {
        let c = colors[u][g.neighbors(u).binary_search(&v).expect("edge")];
        let (a, b) = (label[u].min(label[v]), label[u].max(label[v]));
        triples.push((a, b, c));
    }
    triples.sort_unstable();
    let mut bytes = vec![TAG_COLORED];
    bytes.extend_from_slice(&(n as u32).to_le_bytes());
    bytes.extend_from_slice(&(triples.len() as u32).to_le_bytes());
    for (a, b, c) in triples {
        for x in [a, b, c] {
            bytes.extend_from_slice(&x.to_le_bytes());
        }
    }
    BallClassKey(bytes)
}

fn tree_key(g: &Graph, root: usize) -> BallClassKey {
    fn encode(g: &Graph, v: usize, parent: usize, out: &mut Vec<u8>) {
        let mut children: Vec<Vec<u8>> = g
            .neighbors(v)
            .iter()
            .filter(|&&w| w != parent)
            .map(|&w| {
                let mut s = Vec::new();
                encode(g, w, v, &mut s);
                s
            })
            .collect();
        children.sort_unstable();
        out.push(OPEN);
        for c in children {
            out.extend(c);
        }
        out.push(CLOSE);
    }
    let mut body = Vec::with_capacity(2 * g.vertex_count());
    encode(g, root, usize::MAX, &mut body);
    let mut bytes = vec![TAG_TREE];
    bytes.extend_from_slice(&(body.len() as u32).to_le_bytes());
    bytes.extend(body);
    BallClassKey(bytes)
}

fn decode_tree(body: &[u8]) -> Option<Graph> {
    let mut edges = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    let mut count = 0;
    for (i, &b) in body.iter().enumerate() {
        match b {
            OPEN => {
                if let Some(&p) = stack.last() {
                    edges.push((p, count));
                } else if i != 0 {
                    return None;
                }
                stack.push(count);
                count += 1;
            }
            CLOSE => {
                stack.pop()?;
            }
            _ => return None,
        }
    }
    if !stack.is_empty() || count == 0 {
        return None;
    }
    Graph::from_edges(count, &edges).ok()
}

/// Individualization-refinement canonical labeling with the root fixed in
/// the first cell. Automorphisms found at equal leaves prune sibling branches
/// lying in a common orbit of the pointwise stabilizer of the current prefix.
struct Canonizer<'a> {
    g: &'a Graph,
    root: usize,
    first: Option<(Vec<u8>, Vec<usize>)>,
    best: Option<(Vec<u8>, Vec<usize>)>,
    automorphisms: Vec<Vec<usize>>,
}

impl<'a> Canonizer<'a> {
    fn new(g: &'a Graph, root: usize) -> Self {
        Canonizer {
            g,
            root,
            first: None,
            best: None,
            automorphisms: Vec::new(),
        }
    }

    fn run(mut self) -> BallClassKey {
        let n = self.g.vertex_count();
        let root = self.root;
        let rest: Vec<usize> = (0..n).filter(|&v| v != root).collect();
        let mut cells = vec![vec![root]];
        if !rest.is_empty() {
            cells.push(rest);
        }
        self.search(cells, &mut Vec::new());
        let (bits, _) = self.best.expect("search reaches a leaf");
        let mut bytes = vec![TAG_GRAPH];
        bytes.extend_from_slice(&(n as u32).to_le_bytes());
        bytes.extend(bits);
        BallClassKey(bytes)
    }

    fn refine(&self, cells: &mut Vec<Vec<usize>>) {
        let n = self.g.vertex_count();
        let mut cell_of = vec![0u32; n];
        loop {
            for (i, cell) in cells.iter().enumerate() {
                for &v in cell {
                    cell_of[v] = i as u32;
                }
            }
            let before = cells.len();
            let mut next = Vec::with_capacity(before);
            for cell in cells.drain(..) {
                if cell.len() == 1 {
                    next.push(cell);
                    continue;
                }
                let mut keyed: Vec<(Vec<(u32, u32)>, usize)> = cell
                    .iter()
                    .map(|&v| {
                        let mut sig: Vec<u32> =
                            self.g.neighbors(v).iter().map(|&w| cell_of[w]).collect();
                        sig.sort_unstable();
                        let mut counts: Vec<(u32, u32)> = Vec::new();
                        for c in sig {
                            match counts.last_mut() {
                                Some((last, k)) if *last == c => *k += 1,
                                _ => counts.push((c, 1)),
                            }
                        }
                        (counts, v)
                    })
                    .collect();
                keyed.sort();
                let mut start = 0;
                for i in 1..=keyed.len() {
                    if i == keyed.len() || keyed[i].0 != keyed[start].0 {
                        next.push(keyed[start..i].iter().map(|(_, v)| *v).collect());
                        start = i;
                    }
                }
            }
            *cells = next;
            if cells.len() == before {
                return;
            }
        }
    }

    fn search(&mut self, mut cells: Vec<Vec<usize>>, prefix: &mut Vec<usize>) {
        self.refine(&mut cells);
        let target = cells
            .iter()
            .enumerate()
            .filter(|(_, c)| c.len() > 1)
            .min_by_key(|(i, c)| (c.len(), *i))
            .map(|(i, _)| i);
        let Some(target) = target else {
            let order: Vec<usize> = cells.into_iter().map(|c| c[0]).collect();
            self.leaf(order);
            return;
        };
        let cell = cells[target].clone();
        let mut explored: Vec<usize> = Vec::new();
        for &v in &cell {
            if !explored.is_empty() && self.same_orbit(v, &explored, prefix) {
                continue;
            }
            explored.push(v);
            let mut child = cells.clone();
            child[target] = vec![v];
            child.insert(
                target + 1,
                cell.iter().copied().filter(|&w| w != v).collect(),
            );
            prefix.push(v);
            self.search(child, prefix);
            prefix.pop();
        }
    }

    fn same_orbit(&self, v: usize, explored: &[usize], prefix: &[usize]) -> bool {
        let n = self.g.vertex_count();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut any = false;
        for perm in &self.automorphisms {
            if prefix.iter().any(|&p| perm[p] != p) {
                continue;
            }
            any = true;
            for (x, &y) in perm.iter().enumerate() {
                let (a, b) = (find(&mut parent, x), find(&mut parent, y));
                if a != b {
                    parent[a] = b;
                }
            }
        }
        if !any {
            return false;
        }
        let rv = find(&mut parent, v);
        explored.iter().any(|&u| find(&mut parent, u) == rv)
    }

    fn leaf(&mut self, order: Vec<usize>) {
        let n = order.len();
        let mut bits = vec![0u8; (n * n.saturating_sub(1) / 2).div_ceil(8)];
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                if self.g.has_edge(order[i], order[j]) {
                    bits[k / 8] |= 1 << (k % 8);
                }
                k += 1;
            }
        }
        let Some((first_bits, first_order)) = &self.first else {
            self.first = Some((bits.clone(), order.clone()));
            self.best = Some((bits, order));
            return;
        };
        if *first_bits == bits {
            self.automorphisms.push(mapping(first_order, &order));
            return;
        }
        let (best_bits, best_order) = self.best.as_ref().expect("set with first");
        match bits.cmp(best_bits) {
            std::cmp::Ordering::Equal => {
                let auto = mapping(best_order, &order);
                self.automorphisms.push(auto);
            }
            std::cmp::Ordering::Less => self.best = Some((bits, order)),
            std::cmp::Ordering::Greater => {}
        }
    }
}

fn mapping(from: &[usize], to: &[usize]) -> Vec<usize> {
    let mut perm = vec![0; from.len()];
    for (&a, &b) in from.iter().zip(to) {
        perm[a] = b;
    }
    perm
}
