//! Planar primitives: distances, circumcircles, smallest enclosing circles and
//! the disk-cover queries behind the 1-bottleneck Steiner solvers.
//!
//! All comparisons share one absolute tolerance, [`EPS_GEOM`], scaled by the
//! size of the point set involved (see [`tolerance`]).

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Base geometric tolerance, relative to the instance diameter.
pub const EPS_GEOM: f64 = 1e-9;

/// A point in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn midpoint(&self, other: &Point) -> Point {
        Point::new(0.5 * (self.x + other.x), 0.5 * (self.y + other.y))
    }

    /// Point at parameter `t` along the segment from `self` to `other`.
    pub fn lerp(&self, other: &Point, t: f64) -> Point {
        Point::new(
            self.x + (other.x - self.x) * t,
            self.y + (other.y - self.y) * t,
        )
    }
}

impl From<(f64, f64)> for Point {
    fn from((x, y): (f64, f64)) -> Self {
        Point::new(x, y)
    }
}

/// Circle given by center and radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: Point,
    pub radius: f64,
}

impl Circle {
    pub fn contains(&self, p: &Point, tol: f64) -> bool {
        dist(&self.center, p) <= self.radius + tol
    }

    fn from_pair(a: &Point, b: &Point) -> Circle {
        Circle {
            center: a.midpoint(b),
            radius: 0.5 * dist(a, b),
        }
    }
}

/// Euclidean distance.
#[inline]
pub fn dist(p: &Point, q: &Point) -> f64 {
    (p.x - q.x).hypot(p.y - q.y)
}

#[inline]
fn dist2(p: &Point, q: &Point) -> f64 {
    let dx = p.x - q.x;
    let dy = p.y - q.y;
    dx * dx + dy * dy
}

/// Absolute tolerance for a configuration whose extent is `scale`.
#[inline]
pub fn tolerance(scale: f64) -> f64 {
    EPS_GEOM * scale.max(1.0)
}

/// Length of the bounding-box diagonal of `points` (0 for fewer than two).
pub fn bbox_diagonal(points: &[Point]) -> f64 {
    let mut it = points.iter();
    let Some(first) = it.next() else {
        return 0.0;
    };
    let (mut lo, mut hi) = (*first, *first);
    for p in it {
        lo.x = lo.x.min(p.x);
        lo.y = lo.y.min(p.y);
        hi.x = hi.x.max(p.x);
        hi.y = hi.y.max(p.y);
    }
    dist(&lo, &hi)
}

/// Circle through `a`, `b`, `c`; `None` when the three points are collinear
/// (signed area within tolerance of zero).
pub fn circumcircle(a: &Point, b: &Point, c: &Point) -> Option<Circle> {
    let bx = b.x - a.x;
    let by = b.y - a.y;
    let cx = c.x - a.x;
    let cy = c.y - a.y;
    let cross = bx * cy - by * cx;
    let side2 = dist2(a, b).max(dist2(a, c)).max(dist2(b, c));
    if cross.abs() <= EPS_GEOM * side2 || side2 == 0.0 {
        return None;
    }
    let d = 2.0 * cross;
    let b2 = bx * bx + by * by;
    let c2 = cx * cx + cy * cy;
    let ux = (cy * b2 - by * c2) / d;
    let uy = (bx * c2 - cx * b2) / d;
    let center = Point::new(a.x + ux, a.y + uy);
    Some(Circle {
        center,
        radius: ux.hypot(uy),
    })
}

/// True when the triangle has no obtuse angle (within tolerance), i.e. its
/// smallest enclosing circle is the circumcircle.
pub fn is_non_obtuse(a: &Point, b: &Point, c: &Point) -> bool {
    let ab = dist2(a, b);
    let bc = dist2(b, c);
    let ca = dist2(c, a);
    let longest = ab.max(bc).max(ca);
    let slack = EPS_GEOM * longest;
    ab + bc + ca - longest >= longest - slack
}

fn circle_of_three(a: &Point, b: &Point, c: &Point) -> Circle {
    match circumcircle(a, b, c) {
        Some(circle) => circle,
        None => {
            // collinear: the widest pair spans the other point
            let ab = Circle::from_pair(a, b);
            let bc = Circle::from_pair(b, c);
            let ca = Circle::from_pair(c, a);
            [ab, bc, ca]
                .into_iter()
                .max_by(|x, y| x.radius.total_cmp(&y.radius))
                .unwrap()
        }
    }
}

/// Smallest circle containing every point.
///
/// Iterative Welzl with move-to-front order over a shuffled copy of the
/// deduplicated input. The shuffle is seeded, so the result is a pure
/// function of the input. If the containment check fails (near-degenerate
/// input) the search is repeated with a fresh shuffle and finally falls back
/// to exhaustive pair/triple enumeration.
pub fn smallest_enclosing_circle(points: &[Point]) -> Result<Circle> {
    if points.is_empty() {
        return Err(Error::EmptyInput("smallest enclosing circle of no points"));
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() == 1 {
        return Ok(Circle {
            center: pts[0],
            radius: 0.0,
        });
    }
    if pts.len() == 2 {
        return Ok(Circle::from_pair(&pts[0], &pts[1]));
    }
    let tol = tolerance(bbox_diagonal(&pts));
    for attempt in 0..4u64 {
        let mut order = pts.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5ec0_u64 + attempt);
        order.shuffle(&mut rng);
        let circle = welzl_iterative(&order, tol);
        if pts.iter().all(|p| circle.contains(p, tol)) {
            return Ok(circle);
        }
    }
    Ok(exhaustive_enclosing_circle(&pts, tol))
}

fn welzl_iterative(pts: &[Point], tol: f64) -> Circle {
    let mut c = Circle {
        center: pts[0],
        radius: 0.0,
    };
    for i in 1..pts.len() {
        if c.contains(&pts[i], tol) {
            continue;
        }
        c = Circle {
            center: pts[i],
            radius: 0.0,
        };
        for j in 0..i {
            if c.contains(&pts[j], tol) {
                continue;
            }
            c = Circle::from_pair(&pts[i], &pts[j]);
            for l in 0..j {
                if !c.contains(&pts[l], tol) {
                    c = circle_of_three(&pts[i], &pts[j], &pts[l]);
                }
            }
        }
    }
    c
}

fn exhaustive_enclosing_circle(pts: &[Point], tol: f64) -> Circle {
    let mut best: Option<Circle> = None;
    let mut consider = |c: Circle| {
        if pts.iter().all(|p| c.contains(p, tol))
            && best.is_none_or(|b: Circle| c.radius < b.radius)
        {
            best = Some(c);
        }
    };
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            consider(Circle::from_pair(&pts[i], &pts[j]));
            for l in j + 1..pts.len() {
                if let Some(c) = circumcircle(&pts[i], &pts[j], &pts[l]) {
                    consider(c);
                }
            }
        }
    }
    best.expect("an enclosing circle is determined by a pair or a triple")
}

/// Largest over groups of the distance from `center` to the group's nearest point.
pub fn group_reach(groups: &[Vec<Point>], center: &Point) -> f64 {
    groups
        .iter()
        .map(|g| {
            g.iter()
                .map(|p| dist(center, p))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// Boundary intersections of the radius-`r` circles around `a` and `b`;
/// circles that miss each other by at most `tol` meet at the midpoint.
fn circle_intersections(a: &Point, b: &Point, r: f64, tol: f64) -> Option<[Point; 2]> {
    let d = dist(a, b);
    if d == 0.0 || d > 2.0 * r + tol {
        return None;
    }
    let mid = a.midpoint(b);
    let h = (r * r - 0.25 * d * d).max(0.0).sqrt();
    let ux = (b.x - a.x) / d;
    let uy = (b.y - a.y) / d;
    Some([
        Point::new(mid.x - uy * h, mid.y + ux * h),
        Point::new(mid.x + uy * h, mid.y - ux * h),
    ])
}

/// A point within `lambda` of at least one point of every group, if any exists.
///
/// Searches disk centers and pairwise boundary intersections of the
/// radius-`lambda` disks around every input point; a nonempty feasible region
/// always contains one of them.
pub fn cover_point(groups: &[Vec<Point>], lambda: f64) -> Option<Point> {
    let all: Vec<Point> = groups.iter().flatten().copied().collect();
    let tol = tolerance(bbox_diagonal(&all).max(lambda));
    let feasible = |c: &Point| {
        groups
            .iter()
            .all(|g| g.iter().any(|p| dist(c, p) <= lambda + tol))
    };
    if let Some(p) = all.iter().find(|p| feasible(p)) {
        return Some(*p);
    }
    for i in 0..all.len() {
        for j in i + 1..all.len() {
            if let Some(xs) = circle_intersections(&all[i], &all[j], lambda, tol) {
                if let Some(p) = xs.iter().find(|p| feasible(p)) {
                    return Some(*p);
                }
            }
        }
    }
    None
}

/// The point minimising the largest distance to the nearest point of each
/// group, together with that distance, provided it does not exceed `upper`.
///
/// The optimum is the enclosing circle of one representative per group, so
/// it is attained at a midpoint of a cross-group pair or at the circumcenter
/// of a non-obtuse cross-group triple. Only candidates whose supporting points
/// lie within `2 * upper` of each other are generated.
pub fn minimax_cover(groups: &[Vec<Point>], upper: f64) -> Option<Circle> {
    if groups.is_empty() || groups.iter().any(|g| g.is_empty()) {
        return None;
    }
    if groups.len() == 1 {
        return Some(Circle {
            center: groups[0][0],
            radius: 0.0,
        });
    }
    let all: Vec<Point> = groups.iter().flatten().copied().collect();
    let tol = tolerance(bbox_diagonal(&all));
    let reach2 = (2.0 * upper + tol).powi(2);
    let tagged: Vec<(usize, Point)> = groups
        .iter()
        .enumerate()
        .flat_map(|(g, pts)| pts.iter().map(move |p| (g, *p)))
        .collect();

    let mut best: Option<Circle> = None;
    let mut consider = |center: Point| {
        let r = group_reach(groups, &center);
        if r <= upper + tol && best.is_none_or(|b: Circle| r < b.radius - tol) {
            best = Some(Circle { center, radius: r });
        }
    };
    for i in 0..tagged.len() {
        let (gi, pi) = tagged[i];
        for j in i + 1..tagged.len() {
            let (gj, pj) = tagged[j];
            if gj == gi || dist2(&pi, &pj) > reach2 {
                continue;
            }
            consider(pi.midpoint(&pj));
            if groups.len() < 3 {
                continue;
            }
            for &(gl, pl) in &tagged[j + 1..] {
                if gl == gi || gl == gj || dist2(&pi, &pl) > reach2 || dist2(&pj, &pl) > reach2 {
                    continue;
                }
                if !is_non_obtuse(&pi, &pj, &pl) {
                    continue;
                }
                if let Some(c) = circumcircle(&pi, &pj, &pl) {
                    consider(c.center);
                }
            }
        }
    }
    best
}
