//! Iterative single-relay heuristics for the k-relay bottleneck problem.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::beading::{bead, clear_beads, msth};
use crate::error::{Error, Result};
use crate::geometry::{bbox_diagonal, dist, smallest_enclosing_circle, tolerance, Point};
use crate::one_bst::{
    components_without, edges_longest_first, place_and_settle, solve_1bst_fast_with_id,
    solve_1bst_on_mst, CoverIndex, MAX_GROUPS,
};
use crate::spanning::{euclidean_mst, terminal_nodes, Edge, Node, NodeId, NodeKind, Tree};

/// Largest deviation from a straight angle at which a degree-2 relay still
/// counts as a bead.
pub const ANGLE_EPS: f64 = 1e-6;

/// Longest edges considered when enumerating cut sets in the look-ahead.
pub const LOOKAHEAD_EDGES: usize = 8;

const CONVERT_ROUNDS: usize = 32;
const IMPROVEMENT_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Msth,
    Naive,
    Postbeaded,
    Prebeaded,
    Meta,
    Exact1,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Msth,
        Algorithm::Naive,
        Algorithm::Postbeaded,
        Algorithm::Prebeaded,
        Algorithm::Meta,
        Algorithm::Exact1,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::Msth => "msth",
            Algorithm::Naive => "naive",
            Algorithm::Postbeaded => "postbeaded",
            Algorithm::Prebeaded => "prebeaded",
            Algorithm::Meta => "meta",
            Algorithm::Exact1 => "exact1",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .iter()
            .copied()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown algorithm `{s}`")))
    }
}

/// Output of a heuristic run.
#[derive(Debug, Clone, Serialize)]
pub struct Solution {
    #[serde(flatten)]
    pub tree: Tree,
    pub bottleneck: f64,
    #[serde(skip)]
    pub steiner_points: Vec<Node>,
    pub algorithm: Algorithm,
    #[serde(rename = "wall_time_s")]
    pub wall_time: f64,
    pub iterations: usize,
    pub nonbead_count: usize,
    pub k: usize,
    pub n: usize,
}

impl Solution {
    pub fn new(
        tree: Tree,
        algorithm: Algorithm,
        k: usize,
        n: usize,
        iterations: usize,
        wall_time: f64,
    ) -> Self {
        Self {
            bottleneck: tree.bottleneck().length,
            steiner_points: tree
                .nodes()
                .iter()
                .filter(|n| !n.is_terminal())
                .copied()
                .collect(),
            nonbead_count: tree.nonbead_steiner_count(),
            tree,
            algorithm,
            wall_time,
            iterations,
            k,
            n,
        }
    }

    pub fn steiner_count(&self) -> usize {
        self.steiner_points.len()
    }
}

/// Runs `algorithm` on the terminals with a budget of `k` relays.
pub fn solve(algorithm: Algorithm, terminals: &[Point], k: usize) -> Result<Solution> {
    match algorithm {
        Algorithm::Msth => msth(terminals, k),
        Algorithm::Naive => naive_i1bsth(terminals, k),
        Algorithm::Postbeaded => postbeaded_i1bsth(terminals, k),
        Algorithm::Prebeaded => prebeaded_i1bsth(terminals, k),
        Algorithm::Meta => meta_naive_msth(terminals, k),
        Algorithm::Exact1 => exact_1bst(terminals, k),
    }
}

fn check_terminals(terminals: &[Point]) -> Result<()> {
    if terminals.len() < 2 {
        return Err(Error::TooFewNodes {
            needed: 2,
            got: terminals.len(),
        });
    }
    if terminals.iter().any(|p| !p.is_finite()) {
        return Err(Error::Malformed("non-finite terminal coordinate".into()));
    }
    Ok(())
}

/// Mutable index-based view of a tree used by [`convert`].
#[derive(Clone)]
struct Workspace {
    nodes: Vec<Node>,
    adj: Vec<Vec<usize>>,
    alive: Vec<bool>,
}

impl Workspace {
    fn new(tree: &Tree) -> Self {
        Self {
            nodes: tree.nodes().to_vec(),
            adj: tree.adjacency(),
            alive: vec![true; tree.len()],
        }
    }

    fn movable(&self, i: usize) -> bool {
        !self.nodes[i].is_terminal()
    }

    fn prune_leaves(&mut self) {
        let mut remaining = self.alive.iter().filter(|&&a| a).count();
        let mut stack: Vec<usize> = (0..self.nodes.len())
            .filter(|&i| self.alive[i] && self.movable(i) && self.adj[i].len() <= 1)
            .collect();
        while let Some(v) = stack.pop() {
            if !self.alive[v] || self.adj[v].len() > 1 || remaining <= 1 {
                continue;
            }
            self.alive[v] = false;
            remaining -= 1;
            if let Some(u) = self.adj[v].pop() {
                self.adj[u].retain(|&x| x != v);
                if self.movable(u) && self.adj[u].len() <= 1 {
                    stack.push(u);
                }
            }
        }
    }

    fn in_chain(&self, i: usize) -> bool {
        self.alive[i] && self.movable(i) && self.adj[i].len() == 2
    }

    /// Walks from `from` through `start` until reaching an anchor.
    fn walk(&self, from: usize, start: usize, path: &mut Vec<usize>) -> usize {
        let (mut prev, mut cur) = (from, start);
        while self.in_chain(cur) {
            path.push(cur);
            let next = if self.adj[cur][0] == prev {
                self.adj[cur][1]
            } else {
                self.adj[cur][0]
            };
            prev = cur;
            cur = next;
        }
        cur
    }

    /// Puts every maximal chain of degree-2 relays on the segment between
    /// its anchors, equally spaced.
    fn straighten(&mut self) {
        let mut done = vec![false; self.nodes.len()];
        for v in 0..self.nodes.len() {
            if done[v] || !self.in_chain(v) {
                continue;
            }
            let mut left = Vec::new();
            let a = self.walk(v, self.adj[v][0], &mut left);
            let mut right = Vec::new();
            let b = self.walk(v, self.adj[v][1], &mut right);
            let mut chain: Vec<usize> = left.into_iter().rev().collect();
            chain.push(v);
            chain.extend(right);
            let (pa, pb) = (self.nodes[a].pos, self.nodes[b].pos);
            let steps = (chain.len() + 1) as f64;
            for (i, &u) in chain.iter().enumerate() {
                self.nodes[u].pos = pa.lerp(&pb, (i + 1) as f64 / steps);
                done[u] = true;
            }
        }
    }

    fn bottleneck(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, list) in self.adj.iter().enumerate() {
            if !self.alive[i] {
                continue;
            }
            for &j in list {
                worst = worst.max(dist(&self.nodes[i].pos, &self.nodes[j].pos));
            }
        }
        worst
    }

    fn into_tree(self, next_id: u32) -> Tree {
        let mut edges = Vec::new();
        for (i, list) in self.adj.iter().enumerate() {
            if !self.alive[i] {
                continue;
            }
            for &j in list {
                if i < j {
                    let (a, b) = (&self.nodes[i], &self.nodes[j]);
                    edges.push(Edge::new(a.id, b.id, dist(&a.pos, &b.pos)));
                }
            }
        }
        let nodes = self
            .nodes
            .into_iter()
            .zip(self.alive)
            .filter_map(|(n, alive)| alive.then_some(n))
            .collect();
        Tree::from_sorted(nodes, edges, next_id)
    }
}

/// Cleans up a tree after inserting relay `s`: drops relay leaves,
/// straightens and re-spaces relay chains, and moves `s` to the centre of
/// its neighbours' enclosing circle. The move is undone if it would raise
/// the bottleneck. Relay kinds are reassigned with [`classify`].
pub fn convert(tree: &Tree, s: NodeId) -> Result<Tree> {
    let si = tree.index_of(s).ok_or(Error::UnknownNode(s))?;
    let pts: Vec<Point> = tree.nodes().iter().map(|n| n.pos).collect();
    let tol = tolerance(bbox_diagonal(&pts));
    let mut work = Workspace::new(tree);
    work.prune_leaves();
    work.straighten();
    if work.alive[si] && work.movable(si) && work.adj[si].len() >= 3 {
        let straight = work.clone();
        for _ in 0..CONVERT_ROUNDS {
            let around: Vec<Point> = work.adj[si].iter().map(|&j| work.nodes[j].pos).collect();
            let centre = smallest_enclosing_circle(&around)?.center;
            let moved = dist(&centre, &work.nodes[si].pos) > tol;
            work.nodes[si].pos = centre;
            work.straighten();
            if !moved {
                break;
            }
        }
        if work.bottleneck() > straight.bottleneck() + tol {
            work = straight;
        }
    }
    Ok(classify(&work.into_tree(tree.next_id())))
}

/// Marks each relay as a bead when it has degree two and its edges form a
/// straight angle, and as a Steiner point otherwise.
pub fn classify(tree: &Tree) -> Tree {
    let adj = tree.adjacency();
    let mut out = tree.clone();
    let nodes = tree.nodes();
    for (i, node) in out.nodes_mut().iter_mut().enumerate() {
        if node.is_terminal() {
            continue;
        }
        let straight = adj[i].len() == 2 && {
            let v = nodes[i].pos;
            let (a, b) = (nodes[adj[i][0]].pos, nodes[adj[i][1]].pos);
            let (ux, uy) = (a.x - v.x, a.y - v.y);
            let (wx, wy) = (b.x - v.x, b.y - v.y);
            let angle = (ux * wy - uy * wx).atan2(ux * wx + uy * wy);
            (angle.abs() - std::f64::consts::PI).abs() < ANGLE_EPS
        };
        node.kind = if straight {
            NodeKind::Bead
        } else {
            NodeKind::Steiner
        };
    }
    out
}

/// `k` rounds of exact single-relay insertion over all current nodes,
/// each followed by [`convert`].
pub fn naive_i1bsth(terminals: &[Point], k: usize) -> Result<Solution> {
    check_terminals(terminals)?;
    let start = Instant::now();
    let mut tree = euclidean_mst(&terminal_nodes(terminals));
    for _ in 0..k {
        let next = tree.next_id();
        let id = NodeId(next);
        let placed = solve_1bst_fast_with_id(tree.nodes(), id)?;
        tree = convert(&placed.tree, id)?;
        tree.reserve_ids_to(next + 1);
    }
    Ok(Solution::new(
        tree,
        Algorithm::Naive,
        k,
        terminals.len(),
        k,
        start.elapsed().as_secs_f64(),
    ))
}

/// Look-ahead heuristic that pre-beads all but one budget slot before each
/// relay insertion.
pub fn prebeaded_i1bsth(terminals: &[Point], k: usize) -> Result<Solution> {
    look_ahead(terminals, k, true)
}

/// Look-ahead heuristic that inserts relays into the bead-free tree.
pub fn postbeaded_i1bsth(terminals: &[Point], k: usize) -> Result<Solution> {
    look_ahead(terminals, k, false)
}

struct Candidate {
    tree: Tree,
    length: f64,
    nonbead: usize,
}

impl Candidate {
    fn new(tree: Tree) -> Self {
        Self {
            length: tree.bottleneck().length,
            nonbead: tree.nonbead_steiner_count(),
            tree,
        }
    }

    fn beats(&self, other: &Candidate) -> bool {
        self.length < other.length - IMPROVEMENT_EPS
            || (self.length <= other.length + IMPROVEMENT_EPS && self.nonbead < other.nonbead)
    }
}

/// Appends the minimax cover centres of the components left by cutting
/// each set of one to four of the longest edges of `tree`, keeping those
/// that undercut every cut edge.
fn cut_centres(tree: &Tree, index: &CoverIndex, centres: &mut Vec<Point>) {
    let tol = index.tolerance();
    let order = edges_longest_first(tree);
    let top = &order[..order.len().min(LOOKAHEAD_EDGES)];
    for size in 1..MAX_GROUPS.min(top.len() + 1) {
        let mut pick: Vec<usize> = (0..size).collect();
        loop {
            let cut: Vec<usize> = pick.iter().map(|&i| top[i]).collect();
            let shortest = cut
                .iter()
                .map(|&e| tree.edges()[e].length)
                .fold(f64::INFINITY, f64::min);
            let (labels, groups) = components_without(tree, &cut);
            if let Some(c) = index.min_cover(&labels, groups, shortest) {
                if c.radius < shortest - tol && centres.iter().all(|p| dist(p, &c.center) > tol) {
                    centres.push(c.center);
                }
            }
            if !advance(&mut pick, top.len()) {
                break;
            }
        }
    }
}

fn advance(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn look_ahead(terminals: &[Point], k: usize, prebead: bool) -> Result<Solution> {
    check_terminals(terminals)?;
    let start = Instant::now();
    let algorithm = if prebead {
        Algorithm::Prebeaded
    } else {
        Algorithm::Postbeaded
    };
    let mut current = euclidean_mst(&terminal_nodes(terminals));
    let mut best: Option<Candidate> = None;
    let mut p = 0usize;
    let mut c = 0usize;
    while c < k && p < k {
        let mut bare = euclidean_mst(clear_beads(&current).nodes());
        bare.reserve_ids_to(current.next_id());
        let bare_index = CoverIndex::for_tree(&bare);
        let beaded = prebead.then(|| {
            let free = bead(&current, k - 1 - p).tree;
            let mut base = euclidean_mst(free.nodes());
            base.reserve_ids_to(free.next_id());
            let index = CoverIndex::for_tree(&base);
            (base, index)
        });
        let (base, index) = match &beaded {
            Some((base, index)) => (base, index),
            None => (&bare, &bare_index),
        };
        let id = NodeId(base.next_id());

        // Candidate relay positions: the exact single-relay optimum on the
        // node set, then cut covers of that tree and of the bead-free tree.
        let exact = solve_1bst_on_mst(base, index, id);
        let mut centres = vec![exact.steiner.pos];
        cut_centres(base, index, &mut centres);
        if prebead {
            let bare_exact = solve_1bst_on_mst(&bare, &bare_index, id);
            if centres
                .iter()
                .all(|q| dist(q, &bare_exact.steiner.pos) > index.tolerance())
            {
                centres.push(bare_exact.steiner.pos);
            }
            cut_centres(&bare, &bare_index, &mut centres);
        }
        let exact_tree = exact.tree;

        let mut round: Option<Candidate> = None;
        let mut offer = |cand: Candidate| {
            if round.as_ref().is_none_or(|r| cand.beats(r)) {
                round = Some(cand);
            }
        };
        let bases: Vec<&Tree> = if prebead {
            vec![base, &bare]
        } else {
            vec![base]
        };
        for (i, centre) in centres.iter().enumerate() {
            for (b, host) in bases.iter().enumerate() {
                let placed = if i == 0 && b == 0 {
                    exact_tree.clone()
                } else {
                    place_and_settle(host, id, *centre)
                };
                let converted = convert(&placed, id)?;
                let nonbead = converted.nonbead_steiner_count();
                let mut with_beads = bead(&converted, k.saturating_sub(nonbead)).tree;
                with_beads.reserve_ids_to(id.0 + 1);
                offer(Candidate::new(with_beads));
            }
        }
        offer(Candidate::new(bead(&current, k - p).tree));

        let round = round.expect("at least one candidate per round");
        c += 1;
        let improved = best.as_ref().is_none_or(|b| round.beats(b));
        if improved {
            current = round.tree.clone();
            p = round.nonbead;
            best = Some(round);
        } else {
            // The state is unchanged, so every later round would repeat this one.
            break;
        }
    }
    let tree = best.map_or(current, |b| b.tree);
    Ok(Solution::new(
        tree,
        algorithm,
        k,
        terminals.len(),
        c,
        start.elapsed().as_secs_f64(),
    ))
}

/// The better of [`naive_i1bsth`] and [`msth`]; ties go to the latter.
pub fn meta_naive_msth(terminals: &[Point], k: usize) -> Result<Solution> {
    let start = Instant::now();
    let beaded = msth(terminals, k)?;
    let naive = naive_i1bsth(terminals, k)?;
    let tol = tolerance(bbox_diagonal(terminals));
    let winner = if naive.bottleneck < beaded.bottleneck - tol {
        naive
    } else {
        beaded
    };
    Ok(Solution {
        algorithm: Algorithm::Meta,
        wall_time: start.elapsed().as_secs_f64(),
        ..winner
    })
}

/// Exact optimum for a single relay.
pub fn exact_1bst(terminals: &[Point], k: usize) -> Result<Solution> {
    if k != 1 {
        return Err(Error::InvalidParameter(format!(
            "exact1 requires k = 1, got {k}"
        )));
    }
    check_terminals(terminals)?;
    let start = Instant::now();
    let nodes = terminal_nodes(terminals);
    let result = solve_1bst_fast_with_id(&nodes, NodeId(terminals.len() as u32))?;
    Ok(Solution::new(
        result.tree,
        Algorithm::Exact1,
        1,
        terminals.len(),
        1,
        start.elapsed().as_secs_f64(),
    ))
}
