//! Brute-force cross-checks behind the `oracle` command. Each suite compares
//! a library routine against an exhaustive computation written separately.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::beading::bead;
use crate::geometry::{smallest_enclosing_circle, Point};
use crate::one_bst::{solve_1bst_bruteforce, solve_1bst_fast};
use crate::spanning::{euclidean_mst, terminal_nodes};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Bead,
    OneBst,
    Sec,
    Mst,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Bead, Suite::OneBst, Suite::Sec, Suite::Mst];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Bead => "bead",
            Suite::OneBst => "onebst",
            Suite::Sec => "sec",
            Suite::Mst => "mst",
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub cases: usize,
    pub failures: Vec<String>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn check(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures.push(detail());
        }
    }
}

pub fn run_suite(suite: Suite, seed: u64) -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (suite as u64) << 32);
    match suite {
        Suite::Bead => bead_suite(&mut rng),
        Suite::OneBst => onebst_suite(&mut rng),
        Suite::Sec => sec_suite(&mut rng),
        Suite::Mst => mst_suite(&mut rng),
    }
}

fn random_points(rng: &mut ChaCha8Rng, n: usize, side: f64) -> Vec<Point> {
    (0..n)
        .map(|_| Point::new(rng.gen_range(0.0..side), rng.gen_range(0.0..side)))
        .collect()
}

fn euclid(a: &Point, b: &Point) -> f64 {
    ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt()
}

/// Minimum over all ways of splitting `j` beads among the edges of the
/// largest per-edge segment.
fn best_composition(lengths: &[f64], j: usize) -> f64 {
    fn go(lengths: &[f64], left: usize, worst: f64, best: &mut f64) {
        let Some((&first, rest)) = lengths.split_first() else {
            if worst < *best {
                *best = worst;
            }
            return;
        };
        let take_range = if rest.is_empty() {
            left..=left
        } else {
            0..=left
        };
        for take in take_range {
            let seg = first / (take + 1) as f64;
            go(rest, left - take, worst.max(seg), best);
        }
    }
    let mut best = f64::INFINITY;
    go(lengths, j, 0.0, &mut best);
    best
}

fn bead_suite(rng: &mut ChaCha8Rng) -> Report {
    let mut report = Report::default();
    for case in 0..100 {
        let n = rng.gen_range(2..=7);
        let tree = euclidean_mst(&terminal_nodes(&random_points(rng, n, 100.0)));
        let lengths: Vec<f64> = tree.edges().iter().map(|e| e.length).collect();
        for j in 0..=6 {
            let got = bead(&tree, j).tree.bottleneck().length;
            let want = best_composition(&lengths, j);
            report.check((got - want).abs() <= 1e-9 * want.max(1.0), || {
                format!("bead case={case} n={n} j={j} greedy={got} exhaustive={want}")
            });
        }
    }
    report
}

fn onebst_suite(rng: &mut ChaCha8Rng) -> Report {
    let mut report = Report::default();
    for case in 0..100 {
        let n = rng.gen_range(5..=9);
        let nodes = terminal_nodes(&random_points(rng, n, 100.0));
        let fast = solve_1bst_fast(&nodes).map(|r| r.bottleneck.length);
        let brute = solve_1bst_bruteforce(&nodes).map(|r| r.bottleneck.length);
        match (fast, brute) {
            (Ok(f), Ok(b)) => report.check((f - b).abs() <= 1e-9, || {
                format!("onebst case={case} n={n} fast={f} brute={b}")
            }),
            (f, b) => report.check(false, || format!("onebst case={case} errors {f:?} {b:?}")),
        }
    }
    report
}

fn circle_through(a: &Point, b: &Point, c: &Point) -> Option<(Point, f64)> {
    let d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
    if d.abs() < 1e-12 {
        return None;
    }
    let sq = |p: &Point| p.x * p.x + p.y * p.y;
    let ux = (sq(a) * (b.y - c.y) + sq(b) * (c.y - a.y) + sq(c) * (a.y - b.y)) / d;
    let uy = (sq(a) * (c.x - b.x) + sq(b) * (a.x - c.x) + sq(c) * (b.x - a.x)) / d;
    let centre = Point::new(ux, uy);
    Some((centre, euclid(&centre, a)))
}

/// Smallest circle among all pair diameters and triple circumcircles that
/// enclose every point.
pub fn exhaustive_sec_radius(points: &[Point]) -> f64 {
    let encloses = |c: &Point, r: f64| points.iter().all(|p| euclid(c, p) <= r + 1e-9);
    let mut best = if points.iter().all(|p| euclid(p, &points[0]) == 0.0) {
        0.0
    } else {
        f64::INFINITY
    };
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let c = Point::new(
                0.5 * (points[i].x + points[j].x),
                0.5 * (points[i].y + points[j].y),
            );
            let r = 0.5 * euclid(&points[i], &points[j]);
            if r < best && encloses(&c, r) {
                best = r;
            }
            for l in j + 1..points.len() {
                if let Some((c, r)) = circle_through(&points[i], &points[j], &points[l]) {
                    if r < best && encloses(&c, r) {
                        best = r;
                    }
                }
            }
        }
    }
    best
}

fn sec_suite(rng: &mut ChaCha8Rng) -> Report {
    let mut report = Report::default();
    for case in 0..1000 {
        let n = rng.gen_range(1..=8);
        let pts = random_points(rng, n, 100.0);
        let c = smallest_enclosing_circle(&pts).expect("nonempty");
        let inside = pts.iter().all(|p| euclid(&c.center, p) <= c.radius + 1e-9);
        let want = exhaustive_sec_radius(&pts);
        report.check(inside && (c.radius - want).abs() <= 1e-9, || {
            format!(
                "sec case={case} n={n} radius={} exhaustive={want} contains={inside}",
                c.radius
            )
        });
    }
    report
}

/// Decodes a Prüfer sequence into the edge list of a labelled tree.
pub fn prufer_edges(seq: &[usize], n: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; n];
    for &v in seq {
        degree[v] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &v in seq {
        let leaf = (0..n).find(|&u| degree[u] == 1).expect("a leaf exists");
        edges.push((leaf, v));
        degree[leaf] -= 1;
        degree[v] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&u| degree[u] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

/// Minimum total length and minimum bottleneck over all labelled spanning
/// trees of the points.
pub fn exhaustive_spanning(points: &[Point]) -> (f64, f64) {
    let n = points.len();
    if n < 2 {
        return (0.0, 0.0);
    }
    if n == 2 {
        let d = euclid(&points[0], &points[1]);
        return (d, d);
    }
    let mut seq = vec![0usize; n - 2];
    let (mut best_total, mut best_max) = (f64::INFINITY, f64::INFINITY);
    loop {
        let edges = prufer_edges(&seq, n);
        let lens = edges.iter().map(|&(a, b)| euclid(&points[a], &points[b]));
        let (total, worst) = lens.fold((0.0, 0.0f64), |(t, w), l| (t + l, w.max(l)));
        best_total = best_total.min(total);
        best_max = best_max.min(worst);
        let mut i = 0;
        while i < seq.len() {
            seq[i] += 1;
            if seq[i] < n {
                break;
            }
            seq[i] = 0;
            i += 1;
        }
        if i == seq.len() {
            break;
        }
    }
    (best_total, best_max)
}

fn mst_suite(rng: &mut ChaCha8Rng) -> Report {
    let mut report = Report::default();
    for case in 0..100 {
        let n = rng.gen_range(2..=7);
        let pts = random_points(rng, n, 100.0);
        let tree = euclidean_mst(&terminal_nodes(&pts));
        let (total, bottleneck) = exhaustive_spanning(&pts);
        let got_total = tree.total_length();
        let got_max = tree.bottleneck().length;
        report.check(
            (got_total - total).abs() <= 1e-9 && (got_max - bottleneck).abs() <= 1e-9,
            || {
                format!(
                    "mst case={case} n={n} total={got_total} vs {total} bottleneck={got_max} vs {bottleneck}"
                )
            },
        );
    }
    report
}
