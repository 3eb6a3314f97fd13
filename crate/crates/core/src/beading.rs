//! Greedy placement of degree-2 relay points ("beads") on tree edges.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::heuristics::{Algorithm, Solution};
use crate::spanning::{euclidean_mst, terminal_nodes, Edge, Node, NodeId, NodeKind, Tree};

/// A host edge subdivided by `beads` equally spaced beads.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeadedEdge {
    pub host: (NodeId, NodeId),
    pub length: f64,
    pub beads: usize,
}

impl BeadedEdge {
    pub fn segment_length(&self) -> f64 {
        self.length / (self.beads + 1) as f64
    }
}

/// Result of [`bead`].
#[derive(Debug, Clone)]
pub struct Beading {
    pub tree: Tree,
    /// Host edges of the bead-free tree with their allotted bead counts.
    pub edges: Vec<BeadedEdge>,
    /// Set when beads were requested but the tree has no edge to host them.
    pub skipped: bool,
}

/// Removes every bead, joining the two ends of each bead chain directly.
///
/// A node marked as a bead but without degree two is kept and re-marked as a
/// Steiner point.
pub fn clear_beads(tree: &Tree) -> Tree {
    let adj = tree.adjacency();
    let nodes = tree.nodes();
    let is_bead = |i: usize| nodes[i].kind == NodeKind::Bead && adj[i].len() == 2;
    if !(0..nodes.len()).any(is_bead) {
        return tree.clone();
    }
    let mut edges = Vec::with_capacity(tree.edges().len());
    for u in (0..nodes.len()).filter(|&u| !is_bead(u)) {
        for &first in &adj[u] {
            let (mut prev, mut cur) = (u, first);
            while is_bead(cur) {
                let next = if adj[cur][0] == prev {
                    adj[cur][1]
                } else {
                    adj[cur][0]
                };
                prev = cur;
                cur = next;
            }
            if nodes[u].id < nodes[cur].id {
                edges.push(Edge::new(
                    nodes[u].id,
                    nodes[cur].id,
                    crate::geometry::dist(&nodes[u].pos, &nodes[cur].pos),
                ));
            }
        }
    }
    let kept: Vec<Node> = (0..nodes.len())
        .filter(|&i| !is_bead(i))
        .map(|i| {
            let mut n = nodes[i];
            if n.kind == NodeKind::Bead {
                n.kind = NodeKind::Steiner;
            }
            n
        })
        .collect();
    Tree::from_sorted(kept, edges, tree.next_id())
}

#[derive(PartialEq)]
struct Slot {
    segment: f64,
    host: (NodeId, NodeId),
    index: usize,
}

impl Eq for Slot {}

impl Ord for Slot {
    fn cmp(&self, other: &Self) -> Ordering {
        self.segment
            .total_cmp(&other.segment)
            .then_with(|| other.host.cmp(&self.host))
    }
}

impl PartialOrd for Slot {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Greedy bead counts: each of the `j` beads goes to the edge with the
/// longest current segment, ties to the smaller id pair.
pub fn bead_counts(edges: &[Edge], j: usize) -> Vec<usize> {
    let mut counts = vec![0usize; edges.len()];
    if edges.is_empty() {
        return counts;
    }
    let mut heap: BinaryHeap<Slot> = edges
        .iter()
        .enumerate()
        .map(|(index, e)| Slot {
            segment: e.length,
            host: e.ids(),
            index,
        })
        .collect();
    for _ in 0..j {
        let mut top = heap.pop().expect("heap holds one slot per edge");
        counts[top.index] += 1;
        top.segment = edges[top.index].length / (counts[top.index] + 1) as f64;
        heap.push(top);
    }
    counts
}

/// Bottleneck reached by greedily beading `edges` with `j` beads.
pub fn beaded_bottleneck(edges: &[Edge], j: usize) -> f64 {
    bead_counts(edges, j)
        .iter()
        .zip(edges)
        .map(|(&n, e)| e.length / (n + 1) as f64)
        .fold(0.0, f64::max)
}

/// Clears existing beads, then distributes exactly `j` new ones greedily.
pub fn bead(tree: &Tree, j: usize) -> Beading {
    let base = clear_beads(tree);
    let mut host_edges: Vec<Edge> = base.edges().to_vec();
    host_edges.sort_by_key(|e| e.ids());
    let counts = bead_counts(&host_edges, j);
    let edges: Vec<BeadedEdge> = host_edges
        .iter()
        .zip(&counts)
        .map(|(e, &beads)| BeadedEdge {
            host: e.ids(),
            length: e.length,
            beads,
        })
        .collect();
    let skipped = j > 0 && host_edges.is_empty();
    if j == 0 || skipped {
        return Beading {
            tree: base,
            edges,
            skipped,
        };
    }

    let mut scratch = base.clone();
    let mut nodes = base.nodes().to_vec();
    let mut out_edges = Vec::with_capacity(base.edges().len() + j);
    for (e, &count) in host_edges.iter().zip(&counts) {
        if count == 0 {
            out_edges.push(*e);
            continue;
        }
        let (pa, pb) = (base.pos(e.a), base.pos(e.b));
        let segment = e.length / (count + 1) as f64;
        let mut prev = e.a;
        for i in 1..=count {
            let id = scratch.alloc_id();
            let pos: Point = pa.lerp(&pb, i as f64 / (count + 1) as f64);
            nodes.push(Node {
                id,
                kind: NodeKind::Bead,
                pos,
            });
            out_edges.push(Edge::new(prev, id, segment));
            prev = id;
        }
        out_edges.push(Edge::new(prev, e.b, segment));
    }
    Beading {
        tree: Tree::from_sorted(nodes, out_edges, scratch.next_id()),
        edges,
        skipped: false,
    }
}

/// Minimum spanning tree of the terminals followed by [`bead`] with `k` beads.
pub fn msth(terminals: &[Point], k: usize) -> Result<Solution> {
    if terminals.len() < 2 {
        return Err(Error::TooFewNodes {
            needed: 2,
            got: terminals.len(),
        });
    }
    let start = Instant::now();
    let mst = euclidean_mst(&terminal_nodes(terminals));
    let beaded = bead(&mst, k);
    Ok(Solution::new(
        beaded.tree,
        Algorithm::Msth,
        k,
        terminals.len(),
        0,
        start.elapsed().as_secs_f64(),
    ))
}
