//! Node/edge model shared by every algorithm, Euclidean minimum spanning
//! trees and bottleneck queries.
//!
//! Edges are totally ordered by `(length, min id, max id)`. Under that order
//! the minimum spanning tree is unique, so Prim, Kruskal and incremental
//! insertion all return the same edge set.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{dist, Point};

/// Stable node handle, unique within a tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Terminal,
    Steiner,
    /// Steiner point of degree two lying on the segment between its neighbours.
    Bead,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub id: NodeId,
    pub kind: NodeKind,
    pub pos: Point,
}

impl Node {
    pub fn new(id: u32, kind: NodeKind, pos: Point) -> Self {
        Self {
            id: NodeId(id),
            kind,
            pos,
        }
    }

    pub fn terminal(id: u32, pos: Point) -> Self {
        Self::new(id, NodeKind::Terminal, pos)
    }

    pub fn is_terminal(&self) -> bool {
        self.kind == NodeKind::Terminal
    }
}

/// Terminal nodes with ids `0..n` in input order.
pub fn terminal_nodes(points: &[Point]) -> Vec<Node> {
    points
        .iter()
        .enumerate()
        .map(|(i, p)| Node::terminal(i as u32, *p))
        .collect()
}

/// Undirected edge with endpoints stored as `a < b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub a: NodeId,
    pub b: NodeId,
    pub length: f64,
}

impl Edge {
    pub fn new(u: NodeId, v: NodeId, length: f64) -> Self {
        let (a, b) = if u <= v { (u, v) } else { (v, u) };
        Self { a, b, length }
    }

    pub fn ids(&self) -> (NodeId, NodeId) {
        (self.a, self.b)
    }

    pub fn touches(&self, id: NodeId) -> bool {
        self.a == id || self.b == id
    }

    pub fn other(&self, id: NodeId) -> NodeId {
        if self.a == id {
            self.b
        } else {
            self.a
        }
    }
}

/// The total edge order used for tie-breaking everywhere.
pub fn edge_order(x: &Edge, y: &Edge) -> Ordering {
    x.length
        .total_cmp(&y.length)
        .then(x.a.cmp(&y.a))
        .then(x.b.cmp(&y.b))
}

/// Longest edge of a tree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BottleneckInfo {
    pub length: f64,
    /// `None` only for a single-node tree.
    pub edge: Option<(NodeId, NodeId)>,
}

/// Spanning tree over a node set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "TreeJson", try_from = "TreeJson")]
pub struct Tree {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    next_id: u32,
}

impl Tree {
    /// Builds a tree from nodes and id pairs; edge lengths are recomputed.
    pub fn from_parts(mut nodes: Vec<Node>, pairs: &[(NodeId, NodeId)]) -> Result<Tree> {
        if nodes.is_empty() {
            return Err(Error::EmptyInput("tree with no nodes"));
        }
        nodes.sort_by_key(|n| n.id);
        if nodes.windows(2).any(|w| w[0].id == w[1].id) {
            return Err(Error::Malformed("duplicate node id".into()));
        }
        if let Some(n) = nodes.iter().find(|n| !n.pos.is_finite()) {
            return Err(Error::Malformed(format!(
                "node {} has non-finite position",
                n.id.0
            )));
        }
        let next_id = nodes.last().map_or(0, |n| n.id.0 + 1);
        let mut tree = Tree {
            nodes,
            edges: Vec::with_capacity(pairs.len()),
            next_id,
        };
        for &(u, v) in pairs {
            let (pu, pv) = match (tree.node(u), tree.node(v)) {
                (Some(a), Some(b)) => (a.pos, b.pos),
                (None, _) => return Err(Error::UnknownNode(u)),
                (_, None) => return Err(Error::UnknownNode(v)),
            };
            tree.edges.push(Edge::new(u, v, dist(&pu, &pv)));
        }
        tree.check_spanning()?;
        Ok(tree)
    }

    /// Internal constructor; `nodes` must be sorted by id.
    pub(crate) fn from_sorted(nodes: Vec<Node>, edges: Vec<Edge>, next_id: u32) -> Tree {
        debug_assert!(nodes.windows(2).all(|w| w[0].id < w[1].id));
        let next_id = next_id.max(nodes.last().map_or(0, |n| n.id.0 + 1));
        Tree {
            nodes,
            edges,
            next_id,
        }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Smallest id never used by this tree or its ancestors in a run.
    pub fn next_id(&self) -> u32 {
        self.next_id
    }

    pub(crate) fn alloc_id(&mut self) -> NodeId {
        let id = NodeId(self.next_id);
        self.next_id += 1;
        id
    }

    pub(crate) fn reserve_ids_to(&mut self, next: u32) {
        self.next_id = self.next_id.max(next);
    }

    pub fn index_of(&self, id: NodeId) -> Option<usize> {
        self.nodes.binary_search_by_key(&id, |n| n.id).ok()
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.index_of(id).map(|i| &self.nodes[i])
    }

    pub fn pos(&self, id: NodeId) -> Point {
        self.node(id).expect("node id present").pos
    }

    pub(crate) fn nodes_mut(&mut self) -> &mut [Node] {
        &mut self.nodes
    }

    /// Neighbour indices per node index.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            let ia = self.index_of(e.a).expect("edge endpoint present");
            let ib = self.index_of(e.b).expect("edge endpoint present");
            adj[ia].push(ib);
            adj[ib].push(ia);
        }
        adj
    }

    pub fn neighbours(&self, id: NodeId) -> Vec<NodeId> {
        self.edges
            .iter()
            .filter(|e| e.touches(id))
            .map(|e| e.other(id))
            .collect()
    }

    pub fn degree(&self, id: NodeId) -> usize {
        self.edges.iter().filter(|e| e.touches(id)).count()
    }

    pub fn bottleneck(&self) -> BottleneckInfo {
        bottleneck(self)
    }

    pub fn max_degree(&self) -> usize {
        max_degree(self)
    }

    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).sum()
    }

    pub fn terminal_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_terminal()).count()
    }

    /// Number of non-terminal nodes (Steiner points and beads).
    pub fn steiner_count(&self) -> usize {
        self.nodes.len() - self.terminal_count()
    }

    pub fn bead_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| n.kind == NodeKind::Bead)
            .count()
    }

    pub fn nonbead_steiner_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| n.kind == NodeKind::Steiner)
            .count()
    }

    /// Connected, acyclic, `|E| = |V| - 1`, no dangling endpoints.
    pub fn check_spanning(&self) -> Result<()> {
        if self.edges.len() + 1 != self.nodes.len() {
            return Err(Error::Malformed(format!(
                "{} edges for {} nodes",
                self.edges.len(),
                self.nodes.len()
            )));
        }
        let mut dsu = Dsu::new(self.nodes.len());
        for e in &self.edges {
            let ia = self.index_of(e.a).ok_or(Error::UnknownNode(e.a))?;
            let ib = self.index_of(e.b).ok_or(Error::UnknownNode(e.b))?;
            if !dsu.union(ia, ib) {
                return Err(Error::Malformed("edge set contains a cycle".into()));
            }
        }
        Ok(())
    }
}

/// Longest edge; ties go to the smallest `(min id, max id)`.
pub fn bottleneck(tree: &Tree) -> BottleneckInfo {
    let mut best: Option<&Edge> = None;
    for e in &tree.edges {
        best = match best {
            None => Some(e),
            Some(b) => match e.length.total_cmp(&b.length) {
                Ordering::Greater => Some(e),
                Ordering::Equal if e.ids() < b.ids() => Some(e),
                _ => Some(b),
            },
        };
    }
    BottleneckInfo {
        length: best.map_or(0.0, |e| e.length),
        edge: best.map(Edge::ids),
    }
}

pub fn max_degree(tree: &Tree) -> usize {
    tree.adjacency().iter().map(Vec::len).max().unwrap_or(0)
}

/// Euclidean MST by Prim with a full O(n^2) scan.
pub fn euclidean_mst(nodes: &[Node]) -> Tree {
    let mut nodes = nodes.to_vec();
    nodes.sort_by_key(|n| n.id);
    assert!(
        nodes.windows(2).all(|w| w[0].id < w[1].id),
        "node ids must be distinct"
    );
    let points: Vec<Point> = nodes.iter().map(|n| n.pos).collect();
    let ids: Vec<NodeId> = nodes.iter().map(|n| n.id).collect();
    let edges = prim_edges(&points, &ids);
    let next = nodes.last().map_or(0, |n| n.id.0 + 1);
    Tree::from_sorted(nodes, edges, next)
}

/// MST edges over points (ids parallel to points, strictly increasing).
pub(crate) fn prim_edges(points: &[Point], ids: &[NodeId]) -> Vec<Edge> {
    let n = points.len();
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    if n < 2 {
        return edges;
    }
    let mut in_tree = vec![false; n];
    let mut best: Vec<Option<Edge>> = vec![None; n];
    let mut current = 0usize;
    in_tree[0] = true;
    for _ in 1..n {
        let pc = points[current];
        let mut pick: Option<usize> = None;
        for v in 0..n {
            if in_tree[v] {
                continue;
            }
            let cand = Edge::new(ids[current], ids[v], dist(&pc, &points[v]));
            let slot = &mut best[v];
            if slot.is_none_or(|b| edge_order(&cand, &b) == Ordering::Less) {
                *slot = Some(cand);
            }
            let bv = slot.unwrap();
            if pick.is_none_or(|p| edge_order(&bv, &best[p].unwrap()) == Ordering::Less) {
                pick = Some(v);
            }
        }
        let v = pick.expect("a vertex outside the tree remains");
        in_tree[v] = true;
        edges.push(best[v].unwrap());
        current = v;
    }
    edges
}

/// MST over the tree's nodes plus `s`.
///
/// Uses the fact that the new MST is contained in the old MST edges plus the
/// edges incident to `s`; when `tree` is itself the MST of its nodes the
/// result equals a full rebuild.
pub fn insert_and_rebuild(tree: &Tree, s: Node) -> Result<Tree> {
    if tree.node(s.id).is_some() {
        return Err(Error::InvalidParameter(format!(
            "node id {} already in tree",
            s.id.0
        )));
    }
    let mut nodes = tree.nodes.clone();
    let at = nodes.partition_point(|n| n.id < s.id);
    nodes.insert(at, s);
    let mut candidates: Vec<Edge> = tree.edges.clone();
    candidates.extend(
        tree.nodes
            .iter()
            .map(|n| Edge::new(n.id, s.id, dist(&n.pos, &s.pos))),
    );
    candidates.sort_by(edge_order);
    let mut dsu = Dsu::new(nodes.len());
    let index = |id: NodeId| nodes.binary_search_by_key(&id, |n| n.id).unwrap();
    let mut edges = Vec::with_capacity(nodes.len() - 1);
    for e in candidates {
        if dsu.union(index(e.a), index(e.b)) {
            edges.push(e);
            if edges.len() + 1 == nodes.len() {
                break;
            }
        }
    }
    let next = tree.next_id.max(s.id.0 + 1);
    Ok(Tree::from_sorted(nodes, edges, next))
}

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
pub(crate) struct Dsu {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl Dsu {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }
}

#[derive(Serialize, Deserialize)]
struct NodeJson {
    id: u32,
    kind: NodeKind,
    x: f64,
    y: f64,
}

#[derive(Serialize, Deserialize)]
struct TreeJson {
    nodes: Vec<NodeJson>,
    edges: Vec<[u32; 2]>,
}

impl From<Tree> for TreeJson {
    fn from(tree: Tree) -> Self {
        TreeJson {
            nodes: tree
                .nodes
                .iter()
                .map(|n| NodeJson {
                    id: n.id.0,
                    kind: n.kind,
                    x: n.pos.x,
                    y: n.pos.y,
                })
                .collect(),
            edges: tree.edges.iter().map(|e| [e.a.0, e.b.0]).collect(),
        }
    }
}

impl TryFrom<TreeJson> for Tree {
    type Error = Error;

    fn try_from(json: TreeJson) -> Result<Tree> {
        let nodes = json
            .nodes
            .into_iter()
            .map(|n| Node::new(n.id, n.kind, Point::new(n.x, n.y)))
            .collect();
        let pairs: Vec<(NodeId, NodeId)> = json
            .edges
            .iter()
            .map(|[a, b]| (NodeId(*a), NodeId(*b)))
            .collect();
        Tree::from_parts(nodes, &pairs)
    }
}
