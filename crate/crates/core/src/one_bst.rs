//! Exact solvers for placing a single relay point.
//!
//! With the MST edges sorted as `l1 >= l2 >= ...`, every threshold
//! `lambda` in `[l(m+1), l(m))` splits the nodes into the `m + 1` components
//! left after cutting the `m` longest edges. A relay reconnects them at
//! `lambda` exactly when it lies within `lambda` of every component, so the
//! best threshold in that interval is `max(l(m+1), r)` where `r` is the
//! minimax cover radius of the components. Six or more components cannot be
//! covered (two of the six representatives would subtend at most 60 degrees
//! and so be closer than `lambda`), hence `m <= 4`.

use crate::error::{Error, Result};
use crate::geometry::{
    bbox_diagonal, circumcircle, cover_point, dist, is_non_obtuse, smallest_enclosing_circle,
    tolerance, Circle, Point,
};
use crate::spanning::{
    edge_order, euclidean_mst, insert_and_rebuild, BottleneckInfo, Dsu, Node, NodeId, NodeKind,
    Tree,
};

/// Largest number of components a single relay can reconnect.
pub const MAX_GROUPS: usize = 5;

const SETTLE_ROUNDS: usize = 10;

#[derive(Debug, Clone)]
pub struct OneBstResult {
    /// The added relay point.
    pub steiner: Node,
    pub neighbours: Vec<NodeId>,
    /// MST over the input nodes plus the relay.
    pub tree: Tree,
    pub bottleneck: BottleneckInfo,
    /// Whether the relay lowers the bottleneck of the bare MST.
    pub improved: bool,
}

fn check_input(nodes: &[Node]) -> Result<()> {
    if nodes.len() < 2 {
        return Err(Error::TooFewNodes {
            needed: 2,
            got: nodes.len(),
        });
    }
    Ok(())
}

fn fresh_id(nodes: &[Node]) -> NodeId {
    NodeId(nodes.iter().map(|n| n.id.0 + 1).max().unwrap_or(0))
}

fn instance_tolerance(tree: &Tree) -> f64 {
    let pts: Vec<Point> = tree.nodes().iter().map(|n| n.pos).collect();
    tolerance(bbox_diagonal(&pts))
}

/// Inserts a relay at `pos` into `base` (an MST of its nodes), then moves it
/// to the centre of its neighbours' enclosing circle until that is stable.
/// A move is kept only if it does not raise the bottleneck.
pub fn place_and_settle(base: &Tree, id: NodeId, pos: Point) -> Tree {
    let tol = instance_tolerance(base);
    let mut s = Node {
        id,
        kind: NodeKind::Steiner,
        pos,
    };
    let mut tree = insert_and_rebuild(base, s).expect("relay id is fresh");
    for _ in 0..SETTLE_ROUNDS {
        let around: Vec<Point> = tree.neighbours(id).iter().map(|&n| tree.pos(n)).collect();
        let centre = smallest_enclosing_circle(&around)
            .expect("a relay in a tree of two or more nodes has a neighbour")
            .center;
        if dist(&centre, &s.pos) <= tol {
            break;
        }
        s.pos = centre;
        let next = insert_and_rebuild(base, s).expect("relay id is fresh");
        if next.bottleneck().length > tree.bottleneck().length + tol {
            break;
        }
        tree = next;
    }
    tree
}

fn finish(base: &Tree, tree: Tree, id: NodeId) -> OneBstResult {
    let tol = instance_tolerance(base);
    let bottleneck = tree.bottleneck();
    OneBstResult {
        steiner: *tree.node(id).expect("relay present"),
        neighbours: tree.neighbours(id),
        improved: bottleneck.length < base.bottleneck().length - tol,
        bottleneck,
        tree,
    }
}

/// Relay at the midpoint of the (tie-broken) bottleneck edge.
fn bead_fallback(base: &Tree, id: NodeId) -> OneBstResult {
    let (a, b) = base.bottleneck().edge.expect("two or more nodes");
    let pos = base.pos(a).midpoint(&base.pos(b));
    finish(base, place_and_settle(base, id, pos), id)
}

/// Tries every subset of one to five nodes as the relay's neighbourhood.
///
/// Subsets go by size, then lexicographically by id; a later subset replaces
/// the incumbent only on strict improvement.
pub fn solve_1bst_bruteforce(nodes: &[Node]) -> Result<OneBstResult> {
    check_input(nodes)?;
    solve_1bst_bruteforce_with_id(nodes, fresh_id(nodes))
}

pub fn solve_1bst_bruteforce_with_id(nodes: &[Node], id: NodeId) -> Result<OneBstResult> {
    check_input(nodes)?;
    let base = euclidean_mst(nodes);
    let tol = instance_tolerance(&base);
    let pts: Vec<Point> = base.nodes().iter().map(|n| n.pos).collect();
    let mut best_len = base.bottleneck().length;
    let mut best: Option<Tree> = None;
    let n = pts.len();
    for size in 1..=MAX_GROUPS.min(n) {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            let subset: Vec<Point> = idx.iter().map(|&i| pts[i]).collect();
            let centre = smallest_enclosing_circle(&subset)?.center;
            let s = Node {
                id,
                kind: NodeKind::Steiner,
                pos: centre,
            };
            let tree = insert_and_rebuild(&base, s)?;
            let len = tree.bottleneck().length;
            if len < best_len - tol {
                best_len = len;
                best = Some(tree);
            }
            if !next_combination(&mut idx, n) {
                break;
            }
        }
    }
    Ok(match best {
        Some(tree) => {
            let pos = tree.pos(id);
            finish(&base, place_and_settle(&base, id, pos), id)
        }
        None => bead_fallback(&base, id),
    })
}

fn next_combination(idx: &mut [usize], n: usize) -> bool {
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

/// Neighbour lists sorted by distance, used to answer minimax cover
/// queries over a fixed point set.
#[derive(Debug, Clone)]
pub struct CoverIndex {
    points: Vec<Point>,
    near: Vec<Vec<(u32, f64)>>,
    radius: f64,
    tol: f64,
}

impl CoverIndex {
    /// Keeps, for every point, all others within `radius`.
    pub fn new(points: &[Point], radius: f64) -> Self {
        let tol = tolerance(bbox_diagonal(points));
        let reach = radius + tol;
        let mut near: Vec<Vec<(u32, f64)>> = vec![Vec::new(); points.len()];
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                let d = dist(&points[i], &points[j]);
                if d <= reach {
                    near[i].push((j as u32, d));
                    near[j].push((i as u32, d));
                }
            }
        }
        for list in &mut near {
            list.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        }
        Self {
            points: points.to_vec(),
            near,
            radius,
            tol,
        }
    }

    /// Index over the nodes of `tree`, large enough for any cover bounded by
    /// the tree's bottleneck.
    pub fn for_tree(tree: &Tree) -> Self {
        let pts: Vec<Point> = tree.nodes().iter().map(|n| n.pos).collect();
        Self::new(&pts, 2.0 * tree.bottleneck().length)
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    /// Smallest radius `r <= upper` such that some centre lies within `r` of
    /// a point of every group, with `labels[i]` the group of point `i`.
    pub fn min_cover(&self, labels: &[usize], groups: usize, upper: f64) -> Option<Circle> {
        debug_assert_eq!(labels.len(), self.points.len());
        if groups == 0 || self.points.is_empty() {
            return None;
        }
        if groups == 1 {
            return Some(Circle {
                center: self.points[0],
                radius: 0.0,
            });
        }
        let upper = upper.min(0.5 * self.radius);
        let tol = self.tol;
        let relevant = self.relevant(labels, groups, upper);
        let mut reach = vec![f64::INFINITY; groups];
        let mut best: Option<Circle> = None;
        let mut bound = upper;

        let mut consider = |i: usize, centre: Point, bound: &mut f64, best: &mut Option<Circle>| {
            reach.iter_mut().for_each(|r| *r = f64::INFINITY);
            reach[labels[i]] = dist(&centre, &self.points[i]);
            let limit = 2.0 * *bound + tol;
            for &(j, d) in &self.near[i] {
                if d > limit {
                    break;
                }
                let j = j as usize;
                let dj = dist(&centre, &self.points[j]);
                if dj < reach[labels[j]] {
                    reach[labels[j]] = dj;
                }
            }
            let r = reach.iter().copied().fold(0.0, f64::max);
            let improves = match best {
                None => r <= *bound + tol,
                Some(b) => r < b.radius - tol,
            };
            if improves {
                *best = Some(Circle {
                    center: centre,
                    radius: r,
                });
                *bound = bound.min(r);
            }
        };

        let pts = &self.points;
        for i in (0..pts.len()).filter(|&i| relevant[i]) {
            let li = labels[i];
            for (a, &(j, dij)) in self.near[i].iter().enumerate() {
                if dij > 2.0 * bound + tol {
                    break;
                }
                let j = j as usize;
                if j <= i || !relevant[j] || labels[j] == li {
                    continue;
                }
                let lj = labels[j];
                consider(i, pts[i].midpoint(&pts[j]), &mut bound, &mut best);
                if groups < 3 {
                    continue;
                }
                for &(l, dil) in &self.near[i][a + 1..] {
                    if dil > 2.0 * bound + tol {
                        break;
                    }
                    let l = l as usize;
                    if l <= i || !relevant[l] || labels[l] == li || labels[l] == lj {
                        continue;
                    }
                    if dist(&pts[j], &pts[l]) > 2.0 * bound + tol
                        || !is_non_obtuse(&pts[i], &pts[j], &pts[l])
                    {
                        continue;
                    }
                    if let Some(c) = circumcircle(&pts[i], &pts[j], &pts[l]) {
                        if c.radius <= bound + tol {
                            consider(i, c.center, &mut bound, &mut best);
                        }
                    }
                }
            }
        }
        best
    }

    /// Points within `2 * upper` of some point of every other group.
    fn relevant(&self, labels: &[usize], groups: usize, upper: f64) -> Vec<bool> {
        let limit = 2.0 * upper + self.tol;
        let mut seen = vec![usize::MAX; groups];
        (0..self.points.len())
            .map(|i| {
                seen[labels[i]] = i;
                let mut count = 1;
                for &(j, d) in &self.near[i] {
                    if d > limit {
                        break;
                    }
                    let g = labels[j as usize];
                    if seen[g] != i {
                        seen[g] = i;
                        count += 1;
                        if count == groups {
                            break;
                        }
                    }
                }
                count == groups
            })
            .collect()
    }
}

/// MST edge indices, longest first; equal lengths go smaller ids first.
pub fn edges_longest_first(tree: &Tree) -> Vec<usize> {
    let edges = tree.edges();
    let mut order: Vec<usize> = (0..edges.len()).collect();
    order.sort_by(|&x, &y| {
        edges[y]
            .length
            .total_cmp(&edges[x].length)
            .then(edges[x].ids().cmp(&edges[y].ids()))
    });
    order
}

/// Component label per node index after deleting the given edges.
pub fn components_without(tree: &Tree, removed: &[usize]) -> (Vec<usize>, usize) {
    let mut dsu = Dsu::new(tree.len());
    for (ei, e) in tree.edges().iter().enumerate() {
        if removed.contains(&ei) {
            continue;
        }
        dsu.union(
            tree.index_of(e.a).expect("endpoint present"),
            tree.index_of(e.b).expect("endpoint present"),
        );
    }
    let mut label_of_root = vec![usize::MAX; tree.len()];
    let mut labels = vec![0; tree.len()];
    let mut count = 0;
    for (i, label) in labels.iter_mut().enumerate() {
        let root = dsu.find(i);
        if label_of_root[root] == usize::MAX {
            label_of_root[root] = count;
            count += 1;
        }
        *label = label_of_root[root];
    }
    (labels, count)
}

/// Best threshold over all cut sizes, as `(lambda, cover radius, centre)`.
fn best_threshold(base: &Tree, index: &CoverIndex) -> Option<(f64, f64, Point)> {
    let tol = index.tolerance();
    let order = edges_longest_first(base);
    let lengths: Vec<f64> = order.iter().map(|&e| base.edges()[e].length).collect();
    let top = *lengths.first()?;
    let mut best: Option<(f64, f64, Point)> = None;
    let mut best_lambda = top;
    for m in 1..MAX_GROUPS.min(lengths.len() + 1) {
        let cut = lengths[m - 1];
        let below = lengths.get(m).copied().unwrap_or(0.0);
        if cut - below <= tol || below > best_lambda + tol {
            continue;
        }
        let (labels, groups) = components_without(base, &order[..m]);
        let upper = best_lambda.min(cut);
        let Some(cover) = index.min_cover(&labels, groups, upper) else {
            continue;
        };
        if cover.radius >= cut - tol {
            continue;
        }
        let lambda = below.max(cover.radius);
        let better = match best {
            None => lambda < top - tol,
            Some((bl, br, _)) => {
                lambda < bl - tol || (lambda <= bl + tol && cover.radius < br - tol)
            }
        };
        if better {
            best = Some((lambda, cover.radius, cover.center));
            best_lambda = best_lambda.min(lambda);
        }
    }
    best
}

/// Exact single-relay placement via the threshold decomposition above.
pub fn solve_1bst_fast(nodes: &[Node]) -> Result<OneBstResult> {
    check_input(nodes)?;
    solve_1bst_fast_with_id(nodes, fresh_id(nodes))
}

pub fn solve_1bst_fast_with_id(nodes: &[Node], id: NodeId) -> Result<OneBstResult> {
    check_input(nodes)?;
    let base = euclidean_mst(nodes);
    let index = CoverIndex::for_tree(&base);
    Ok(solve_1bst_on_mst(&base, &index, id))
}

/// As [`solve_1bst_fast`] for a tree that is already the MST of its nodes
/// and an index built over the same nodes in id order.
pub fn solve_1bst_on_mst(base: &Tree, index: &CoverIndex, id: NodeId) -> OneBstResult {
    match best_threshold(base, index) {
        Some((_, _, centre)) => finish(base, place_and_settle(base, id, centre), id),
        None => bead_fallback(base, id),
    }
}

/// Whether one relay can bring the bottleneck down to `lambda`.
pub fn is_feasible(nodes: &[Node], lambda: f64) -> bool {
    let base = euclidean_mst(nodes);
    let cut: Vec<usize> = (0..base.edges().len())
        .filter(|&e| base.edges()[e].length > lambda)
        .collect();
    let (labels, count) = components_without(&base, &cut);
    let mut groups = vec![Vec::new(); count];
    for (n, &l) in base.nodes().iter().zip(&labels) {
        groups[l].push(n.pos);
    }
    cover_point(&groups, lambda).is_some()
}

/// Every value the optimal single-relay bottleneck can take: pairwise
/// distances, half distances and circumradii of non-obtuse triples.
pub fn candidate_values(nodes: &[Node]) -> Vec<f64> {
    let pts: Vec<Point> = nodes.iter().map(|n| n.pos).collect();
    let mut out = Vec::new();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let d = dist(&pts[i], &pts[j]);
            out.push(d);
            out.push(0.5 * d);
            for l in j + 1..pts.len() {
                if is_non_obtuse(&pts[i], &pts[j], &pts[l]) {
                    if let Some(c) = circumcircle(&pts[i], &pts[j], &pts[l]) {
                        out.push(c.radius);
                    }
                }
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// Smallest feasible candidate value, by binary search over
/// [`candidate_values`].
pub fn min_feasible_value(nodes: &[Node]) -> Result<f64> {
    check_input(nodes)?;
    let values = candidate_values(nodes);
    let (mut lo, mut hi) = (0usize, values.len() - 1);
    debug_assert!(is_feasible(nodes, values[hi]));
    while lo < hi {
        let mid = (lo + hi) / 2;
        if is_feasible(nodes, values[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(values[lo])
}

/// Longest-first edge lengths of the MST of `nodes`, with the edge order
/// applied to ties.
pub fn mst_lengths_desc(nodes: &[Node]) -> Vec<f64> {
    let mst = euclidean_mst(nodes);
    let mut edges = mst.edges().to_vec();
    edges.sort_by(|a, b| edge_order(b, a));
    edges.iter().map(|e| e.length).collect()
}
