mod common;

use common::*;
use kbst::geometry::Point;
use kbst::heuristics::{
    convert, exact_1bst, meta_naive_msth, naive_i1bsth, postbeaded_i1bsth, prebeaded_i1bsth, solve,
    Algorithm,
};
use kbst::one_bst::solve_1bst_fast_with_id;
use kbst::spanning::{euclidean_mst, max_degree, terminal_nodes, Node, NodeId, NodeKind, Tree};
use proptest::prelude::*;

#[test]
fn six_terminals_naive_and_prebeaded() {
    let t = pts(&SIX_TERMINALS);
    let naive = naive_i1bsth(&t, 2).unwrap();
    let pre = prebeaded_i1bsth(&t, 2).unwrap();
    assert!(
        close(naive.bottleneck, 389.87, 0.01),
        "{}",
        naive.bottleneck
    );
    assert!(close(pre.bottleneck, 374.46, 0.01), "{}", pre.bottleneck);
}

#[test]
fn single_round_naive_is_one_exact_insertion() {
    let t = pts(&SIX_TERMINALS);
    let nodes = terminal_nodes(&t);
    let id = NodeId(t.len() as u32);
    let once = solve_1bst_fast_with_id(&nodes, id).unwrap();
    let expect = convert(&once.tree, id).unwrap();
    let naive = naive_i1bsth(&t, 1).unwrap();
    assert!(close(naive.bottleneck, expect.bottleneck().length, 1e-12));
    assert_eq!(naive.tree.len(), expect.len());
}

#[test]
fn unit_budget_look_ahead_is_exact() {
    let mut r = rng(51);
    for _ in 0..20 {
        let p = random_points(&mut r, 12, 1000.0);
        let exact = exact_1bst(&p, 1).unwrap().bottleneck;
        let pre = prebeaded_i1bsth(&p, 1).unwrap().bottleneck;
        let post = postbeaded_i1bsth(&p, 1).unwrap().bottleneck;
        assert!(close(pre, exact, 1e-9), "{pre} vs {exact}");
        assert!(close(post, pre, 1e-9));
    }
    assert!(exact_1bst(&pts(&SIX_TERMINALS), 2).is_err());
}

#[test]
fn meta_picks_beading_on_four_terminals() {
    let t = pts(&FOUR_TERMINALS);
    let meta = meta_naive_msth(&t, 2).unwrap();
    let plain = solve(Algorithm::Msth, &t, 2).unwrap();
    assert!(naive_i1bsth(&t, 2).unwrap().bottleneck > plain.bottleneck);
    assert_eq!(meta.bottleneck, plain.bottleneck);
    assert_eq!(meta.algorithm, Algorithm::Meta);
}

#[test]
fn meta_picks_naive_when_it_wins() {
    let t = pts(&FROZEN_8);
    let naive = naive_i1bsth(&t, 2).unwrap().bottleneck;
    let plain = solve(Algorithm::Msth, &t, 2).unwrap().bottleneck;
    assert!(naive < plain - 1e-6);
    assert_eq!(meta_naive_msth(&t, 2).unwrap().bottleneck, naive);
}

#[test]
fn zero_budget_is_the_mst_everywhere() {
    let t = pts(&SIX_TERMINALS);
    let mst = mst_bottleneck(&t);
    for alg in [
        Algorithm::Msth,
        Algorithm::Naive,
        Algorithm::Postbeaded,
        Algorithm::Prebeaded,
        Algorithm::Meta,
    ] {
        let s = solve(alg, &t, 0).unwrap();
        assert!(close(s.bottleneck, mst, 1e-12), "{alg}");
        assert_eq!(s.steiner_count(), 0);
    }
}

#[test]
fn prebeading_can_beat_postbeading() {
    let t = pts(&FROZEN_8);
    let pre = prebeaded_i1bsth(&t, 4).unwrap().bottleneck;
    let post = postbeaded_i1bsth(&t, 4).unwrap().bottleneck;
    assert!(pre < post - 1e-6, "{pre} vs {post}");
}

#[test]
fn convert_drops_relay_leaves() {
    let mut nodes = terminal_nodes(&pts(&[(0.0, 0.0), (4.0, 0.0)]));
    nodes.push(Node::new(2, NodeKind::Steiner, Point::new(-1.0, 1.0)));
    let tree = Tree::from_parts(nodes, &[(NodeId(0), NodeId(1)), (NodeId(0), NodeId(2))]).unwrap();
    let out = convert(&tree, NodeId(2)).unwrap();
    assert_eq!(out.edges().len(), tree.edges().len() - 1);
    assert_eq!(out.steiner_count(), 0);
}

#[test]
fn convert_straightens_a_bent_chain() {
    let mut nodes = terminal_nodes(&pts(&[(0.0, 0.0), (4.0, 0.0)]));
    nodes.push(Node::new(2, NodeKind::Steiner, Point::new(2.5, 1.5)));
    let tree = Tree::from_parts(nodes, &[(NodeId(0), NodeId(2)), (NodeId(2), NodeId(1))]).unwrap();
    let out = convert(&tree, NodeId(2)).unwrap();
    let b = out.node(NodeId(2)).unwrap();
    assert!(close(b.pos.x, 2.0, 1e-9) && close(b.pos.y, 0.0, 1e-9));
    assert_eq!(b.kind, NodeKind::Bead);
    assert!(close(out.bottleneck().length, 2.0, 1e-9));
}

#[test]
fn solution_serialises_tree_and_metrics() {
    let s = solve(Algorithm::Prebeaded, &pts(&FOUR_TERMINALS), 2).unwrap();
    let v: serde_json::Value = serde_json::to_value(&s).unwrap();
    assert_eq!(v["nodes"].as_array().unwrap().len(), 6);
    assert_eq!(v["edges"].as_array().unwrap().len(), 5);
    assert_eq!(v["algorithm"], "prebeaded");
    assert!(v["wall_time_s"].is_number());
    let back: Tree = serde_json::from_value(v.clone()).unwrap();
    assert_eq!(back.bottleneck().length, s.bottleneck);
}

fn cloud(lo: usize, hi: usize) -> impl Strategy<Value = Vec<Point>> {
    prop::collection::vec((0.0..1000.0f64, 0.0..1000.0f64), lo..hi)
        .prop_map(|v| v.into_iter().map(|(x, y)| Point::new(x, y)).collect())
}

fn check_tree(tree: &Tree, n: usize) -> Result<(), TestCaseError> {
    tree.check_spanning()
        .map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(tree.terminal_count(), n);
    prop_assert!(max_degree(tree) <= 6);
    for node in tree.nodes().iter().filter(|n| !n.is_terminal()) {
        prop_assert!(tree.degree(node.id) >= 2);
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn look_ahead_never_loses_to_beading(p in cloud(3, 25), k in 0usize..10) {
        let plain = solve(Algorithm::Msth, &p, k).unwrap();
        let pre = prebeaded_i1bsth(&p, k).unwrap();
        let post = postbeaded_i1bsth(&p, k).unwrap();
        prop_assert!(pre.bottleneck <= plain.bottleneck + 1e-9);
        for s in [&plain, &pre, &post] {
            prop_assert_eq!(s.steiner_count(), k);
            check_tree(&s.tree, p.len())?;
            prop_assert!(close(s.bottleneck, s.tree.bottleneck().length, 0.0));
        }
    }

    #[test]
    fn naive_stays_within_budget(p in cloud(3, 15), k in 0usize..6) {
        let s = naive_i1bsth(&p, k).unwrap();
        prop_assert!(s.steiner_count() <= k);
        check_tree(&s.tree, p.len())?;
        prop_assert!(s.bottleneck <= mst_bottleneck(&p) + 1e-9);
    }

    #[test]
    fn beading_ratio_at_unit_budget(p in cloud(3, 15)) {
        let plain = solve(Algorithm::Msth, &p, 1).unwrap().bottleneck;
        let exact = exact_1bst(&p, 1).unwrap().bottleneck;
        prop_assert!(plain <= 2.0 * exact + 1e-9);
        prop_assert!(exact <= plain + 1e-9);
    }

    #[test]
    fn convert_is_idempotent(p in cloud(3, 15)) {
        let nodes = terminal_nodes(&p);
        let id = NodeId(p.len() as u32);
        let placed = solve_1bst_fast_with_id(&nodes, id).unwrap();
        let once = convert(&placed.tree, id).unwrap();
        if once.node(id).is_some() {
            let twice = convert(&once, id).unwrap();
            prop_assert_eq!(twice.len(), once.len());
            prop_assert!(close(twice.bottleneck().length, once.bottleneck().length, 1e-7));
        }
        prop_assert!(once.bottleneck().length <= euclidean_mst(&nodes).bottleneck().length + 1e-9);
    }
}
