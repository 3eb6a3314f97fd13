mod common;

use common::*;
use kbst::geometry::{smallest_enclosing_circle, Point};
use kbst::spanning::{
    euclidean_mst, insert_and_rebuild, max_degree, terminal_nodes, Node, NodeId, NodeKind, Tree,
};
use proptest::prelude::*;

fn pair_set(tree: &Tree) -> Vec<(u32, u32)> {
    let mut v: Vec<(u32, u32)> = tree.edges().iter().map(|e| (e.a.0, e.b.0)).collect();
    v.sort();
    v
}

#[test]
fn four_terminal_mst() {
    let t = pts(&FOUR_TERMINALS);
    let tree = euclidean_mst(&terminal_nodes(&t));
    assert_eq!(pair_set(&tree), vec![(0, 1), (1, 2), (1, 3)]);
    let (total, longest) = spanning_optima(&t);
    assert!(close(tree.total_length(), total, 1e-12));
    assert!(close(tree.bottleneck().length, longest, 1e-12));
    assert!(close(longest, d(&t[1], &t[2]), 1e-12));
    assert_eq!(all_trees(4).len(), 16);
}

#[test]
fn two_nodes_give_one_edge() {
    let tree = euclidean_mst(&terminal_nodes(&pts(&[(0.0, 0.0), (3.0, 4.0)])));
    assert_eq!(tree.edges().len(), 1);
    assert_eq!(tree.bottleneck().length, 5.0);
}

#[test]
fn eight_node_totals_match_enumeration() {
    let mut r = rng(21);
    for _ in 0..100 {
        let p = random_points(&mut r, 8, 100.0);
        let tree = euclidean_mst(&terminal_nodes(&p));
        let (total, longest) = spanning_optima(&p);
        assert!(close(tree.total_length(), total, 1e-9));
        assert!(close(tree.bottleneck().length, longest, 1e-9));
    }
}

#[test]
fn bottleneck_of_a_path() {
    let nodes = terminal_nodes(&pts(&[(0.0, 0.0), (1.0, 0.0), (3.0, 0.0)]));
    let tree = Tree::from_parts(nodes, &[(NodeId(0), NodeId(1)), (NodeId(1), NodeId(2))]).unwrap();
    let b = tree.bottleneck();
    assert_eq!(b.length, 2.0);
    assert_eq!(b.edge, Some((NodeId(1), NodeId(2))));
    assert_eq!(max_degree(&tree), 2);
}

#[test]
fn star_degree() {
    let nodes = terminal_nodes(&pts(&[
        (0.0, 0.0),
        (1.0, 0.0),
        (-1.0, 0.0),
        (0.0, 1.0),
        (0.0, -1.0),
    ]));
    let pairs: Vec<_> = (1..5).map(|i| (NodeId(0), NodeId(i))).collect();
    assert_eq!(max_degree(&Tree::from_parts(nodes, &pairs).unwrap()), 4);
}

#[test]
fn six_terminal_mst_has_distinct_longest_edges() {
    let tree = euclidean_mst(&terminal_nodes(&pts(&SIX_TERMINALS)));
    let mut lens: Vec<f64> = tree.edges().iter().map(|e| e.length).collect();
    lens.sort_by(|a, b| b.total_cmp(a));
    assert!(lens[0] > lens[1] && lens[1] > lens[2]);
    assert_eq!(tree.bottleneck().length, lens[0]);
}

#[test]
fn inserting_a_midpoint_halves_the_edge() {
    let tree = euclidean_mst(&terminal_nodes(&pts(&[(0.0, 0.0), (6.0, 0.0)])));
    let s = Node::new(2, NodeKind::Steiner, Point::new(3.0, 0.0));
    let grown = insert_and_rebuild(&tree, s).unwrap();
    assert_eq!(grown.len(), 3);
    assert_eq!(grown.edges().len(), 2);
    assert_eq!(grown.bottleneck().length, 3.0);
    assert!(insert_and_rebuild(&grown, s).is_err());
}

#[test]
fn inserting_a_circle_centre_replaces_the_far_edge() {
    let t = pts(&FOUR_TERMINALS);
    let tree = euclidean_mst(&terminal_nodes(&t));
    let c = smallest_enclosing_circle(&[t[0], t[1], t[3]]).unwrap();
    let grown = insert_and_rebuild(&tree, Node::new(4, NodeKind::Steiner, c.center)).unwrap();
    let mut all = t.clone();
    all.push(c.center);
    assert!(close(
        grown.bottleneck().length,
        mst_bottleneck(&all),
        1e-12
    ));
    // The far edge t2t4 is replaced through the centre; t2t3 stays longest.
    assert!(!pair_set(&grown).contains(&(1, 3)));
    assert!(grown
        .edges()
        .iter()
        .filter(|e| !e.touches(NodeId(2)))
        .all(|e| e.length < d(&t[1], &t[3])));
    assert_eq!(grown.bottleneck().length, tree.bottleneck().length);
}

#[test]
fn degree_at_most_six_on_random_sets() {
    let mut r = rng(22);
    for _ in 0..1000 {
        let p = random_points(&mut r, 30, 1000.0);
        let tree = euclidean_mst(&terminal_nodes(&p));
        assert!(max_degree(&tree) <= 6);
    }
}

fn cloud(max: usize) -> impl Strategy<Value = Vec<Point>> {
    prop::collection::vec((0.0..1000.0f64, 0.0..1000.0f64), 2..max)
        .prop_map(|v| v.into_iter().map(|(x, y)| Point::new(x, y)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mst_is_optimal_in_both_senses(p in cloud(8)) {
        let tree = euclidean_mst(&terminal_nodes(&p));
        tree.check_spanning().unwrap();
        let (total, longest) = spanning_optima(&p);
        prop_assert!(close(tree.total_length(), total, 1e-9));
        prop_assert!(close(tree.bottleneck().length, longest, 1e-9));
    }

    #[test]
    fn insert_equals_rebuild(p in cloud(12), s in (0.0..1000.0f64, 0.0..1000.0f64)) {
        let nodes = terminal_nodes(&p);
        let tree = euclidean_mst(&nodes);
        let extra = Node::new(p.len() as u32, NodeKind::Steiner, Point::new(s.0, s.1));
        let grown = insert_and_rebuild(&tree, extra).unwrap();
        let mut all = nodes.clone();
        all.push(extra);
        let rebuilt = euclidean_mst(&all);
        prop_assert_eq!(pair_set(&grown), pair_set(&rebuilt));
        prop_assert!(close(grown.total_length(), rebuilt.total_length(), 1e-9));
    }

    #[test]
    fn mst_is_deterministic_and_shuffle_invariant(p in cloud(15)) {
        let a = euclidean_mst(&terminal_nodes(&p));
        let b = euclidean_mst(&terminal_nodes(&p));
        prop_assert_eq!(&a, &b);
        let mut rev = terminal_nodes(&p);
        rev.reverse();
        prop_assert_eq!(pair_set(&euclidean_mst(&rev)), pair_set(&a));
    }

    #[test]
    fn every_tree_edge_is_a_lightest_cut_edge(p in cloud(14)) {
        let tree = euclidean_mst(&terminal_nodes(&p));
        let n = p.len();
        for (skip, e) in tree.edges().iter().enumerate() {
            // Component of `a` after dropping edge `skip`.
            let mut side = vec![false; n];
            side[e.a.0 as usize] = true;
            let mut changed = true;
            while changed {
                changed = false;
                for (i, f) in tree.edges().iter().enumerate() {
                    let (u, v) = (f.a.0 as usize, f.b.0 as usize);
                    if i != skip && side[u] != side[v] {
                        side[u] = true;
                        side[v] = true;
                        changed = true;
                    }
                }
            }
            for u in 0..n {
                for v in 0..n {
                    if side[u] && !side[v] {
                        prop_assert!(d(&p[u], &p[v]) >= e.length - 1e-9);
                    }
                }
            }
        }
    }
}
