//! Oracles shared by the integration suites. Everything here is written from
//! first principles and deliberately avoids the library's own algorithms.
#![allow(dead_code)]

use kbst::geometry::Point;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const FOUR_TERMINALS: [(f64, f64); 4] = [(2.0, 9.1), (3.0, 8.6), (4.6, 3.1), (8.6, 9.2)];

pub const SIX_TERMINALS: [(f64, f64); 6] = [
    (968.4, 506.4),
    (3.9, 86.8),
    (188.8, 7.5),
    (779.2, 675.9),
    (238.1, 644.4),
    (620.6, 2.4),
];

/// Eight points where pre-beading at k=4 beats post-beading and naive
/// iteration at k=2 beats plain beading.
pub const FROZEN_8: [(f64, f64); 8] = [
    (70.90754154265618, 46.59217222896102),
    (69.91432426747318, 6.017116563417169),
    (87.91107179586186, 54.953126878944644),
    (82.89844760239993, 93.5426502913129),
    (80.37816422279636, 15.42912742358562),
    (88.07117723618907, 77.05537646353311),
    (52.40550121500691, 35.078588375068385),
    (76.45431566171183, 64.26508889016374),
];

pub fn pts(raw: &[(f64, f64)]) -> Vec<Point> {
    raw.iter().map(|&(x, y)| Point::new(x, y)).collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_points(rng: &mut ChaCha8Rng, n: usize, side: f64) -> Vec<Point> {
    (0..n)
        .map(|_| Point::new(rng.gen_range(0.0..side), rng.gen_range(0.0..side)))
        .collect()
}

pub fn d(a: &Point, b: &Point) -> f64 {
    (a.x - b.x).hypot(a.y - b.y)
}

/// Plain O(n^2) Prim; returns the edge lengths of a minimum spanning tree.
pub fn prim_lengths(points: &[Point]) -> Vec<f64> {
    let n = points.len();
    if n < 2 {
        return Vec::new();
    }
    let mut done = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    best[0] = 0.0;
    let mut out = Vec::with_capacity(n - 1);
    for step in 0..n {
        let u = (0..n)
            .filter(|&i| !done[i])
            .min_by(|&a, &b| best[a].total_cmp(&best[b]))
            .unwrap();
        done[u] = true;
        if step > 0 {
            out.push(best[u]);
        }
        for v in 0..n {
            if !done[v] {
                best[v] = best[v].min(d(&points[u], &points[v]));
            }
        }
    }
    out
}

pub fn mst_bottleneck(points: &[Point]) -> f64 {
    prim_lengths(points).into_iter().fold(0.0, f64::max)
}

/// Every labelled tree on `n` vertices, via Prüfer sequences.
pub fn all_trees(n: usize) -> Vec<Vec<(usize, usize)>> {
    if n < 2 {
        return vec![Vec::new()];
    }
    if n == 2 {
        return vec![vec![(0, 1)]];
    }
    let mut out = Vec::new();
    let mut seq = vec![0usize; n - 2];
    loop {
        let mut deg = vec![1usize; n];
        seq.iter().for_each(|&v| deg[v] += 1);
        let mut edges = Vec::with_capacity(n - 1);
        for &v in &seq {
            let leaf = (0..n).find(|&u| deg[u] == 1).unwrap();
            edges.push((leaf, v));
            deg[leaf] = 0;
            deg[v] -= 1;
        }
        let last: Vec<usize> = (0..n).filter(|&u| deg[u] == 1).collect();
        edges.push((last[0], last[1]));
        out.push(edges);
        let mut i = 0;
        loop {
            if i == seq.len() {
                return out;
            }
            seq[i] += 1;
            if seq[i] < n {
                break;
            }
            seq[i] = 0;
            i += 1;
        }
    }
}

/// (minimum total length, minimum longest edge) over all spanning trees.
pub fn spanning_optima(points: &[Point]) -> (f64, f64) {
    let mut total = f64::INFINITY;
    let mut longest = f64::INFINITY;
    for tree in all_trees(points.len()) {
        let lens = tree.iter().map(|&(a, b)| d(&points[a], &points[b]));
        let (t, m) = lens.fold((0.0, 0.0f64), |(t, m), l| (t + l, m.max(l)));
        total = total.min(t);
        longest = longest.min(m);
    }
    (total, longest)
}

/// Minimum over all distributions of `j` beads of the largest segment.
pub fn composition_optimum(lengths: &[f64], j: usize) -> f64 {
    match lengths.split_first() {
        None => 0.0,
        Some((&l, [])) => l / (j + 1) as f64,
        Some((&l, rest)) => (0..=j)
            .map(|t| (l / (t + 1) as f64).max(composition_optimum(rest, j - t)))
            .fold(f64::INFINITY, f64::min),
    }
}

fn circle3(a: &Point, b: &Point, c: &Point) -> Option<(Point, f64)> {
    let den = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
    if den.abs() < 1e-12 {
        return None;
    }
    let q = |p: &Point| p.x * p.x + p.y * p.y;
    let x = (q(a) * (b.y - c.y) + q(b) * (c.y - a.y) + q(c) * (a.y - b.y)) / den;
    let y = (q(a) * (c.x - b.x) + q(b) * (a.x - c.x) + q(c) * (b.x - a.x)) / den;
    let o = Point::new(x, y);
    Some((o, d(&o, a)))
}

fn acute_or_right(a: &Point, b: &Point, c: &Point) -> bool {
    let dot =
        |o: &Point, p: &Point, q: &Point| (p.x - o.x) * (q.x - o.x) + (p.y - o.y) * (q.y - o.y);
    dot(a, b, c) >= -1e-12 && dot(b, a, c) >= -1e-12 && dot(c, a, b) >= -1e-12
}

/// Smallest enclosing radius over pair diameters and non-obtuse triple
/// circumcircles.
pub fn sec_oracle(points: &[Point]) -> f64 {
    if points.len() == 1 {
        return 0.0;
    }
    let covers = |o: &Point, r: f64| points.iter().all(|p| d(o, p) <= r * (1.0 + 1e-12) + 1e-9);
    let mut best = f64::INFINITY;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let o = Point::new(
                0.5 * (points[i].x + points[j].x),
                0.5 * (points[i].y + points[j].y),
            );
            let r = 0.5 * d(&points[i], &points[j]);
            if covers(&o, r) {
                best = best.min(r);
            }
            for k in j + 1..points.len() {
                if !acute_or_right(&points[i], &points[j], &points[k]) {
                    continue;
                }
                if let Some((o, r)) = circle3(&points[i], &points[j], &points[k]) {
                    if covers(&o, r) {
                        best = best.min(r);
                    }
                }
            }
        }
    }
    best
}

/// Grid search for the best single extra node; `cells` per side over the
/// bounding box, followed by a local refinement around the best cells.
pub fn grid_one_relay(points: &[Point], cells: usize) -> f64 {
    let (mut lo, mut hi) = (points[0], points[0]);
    for p in points {
        lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let eval = |s: Point| {
        let mut all = points.to_vec();
        all.push(s);
        mst_bottleneck(&all)
    };
    let step = ((hi.x - lo.x).max(hi.y - lo.y) / cells as f64).max(1e-9);
    let mut scored = Vec::new();
    for i in 0..=cells {
        for j in 0..=cells {
            let s = Point::new(lo.x + i as f64 * step, lo.y + j as f64 * step);
            scored.push((eval(s), s));
        }
    }
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best = scored[0].0;
    for &(_, centre) in scored.iter().take(12) {
        let fine = step / 20.0;
        for i in -20..=20 {
            for j in -20..=20 {
                let s = Point::new(centre.x + i as f64 * fine, centre.y + j as f64 * fine);
                best = best.min(eval(s));
            }
        }
    }
    best
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}
