//! Convex compact bodies in R^d: membership, Euclidean distance, chords
//! through the origin, the 1-fattened body K*, and sampling grids.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{dist, dot, norm, solve};
use crate::lp::LinearProgram;

/// Bisection tolerance used for chords unless a caller asks otherwise.
pub const CHORD_TOL: f64 = 1e-10;

const POLYTOPE_DISTANCE_TOL: f64 = 1e-10;

/// Axis-aligned box `[lo_1, hi_1] x ... x [lo_d, hi_d]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Aabb {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        let b = Self { lo, hi };
        b.validate()?;
        Ok(b)
    }

    /// The cube `[lo, hi]^d`.
    pub fn cube(d: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo; d], vec![hi; d])
    }

    fn validate(&self) -> Result<()> {
        if self.lo.is_empty() {
            return Err(Error::InvalidBody("box has dimension zero".into()));
        }
        check_dim(self.lo.len(), self.hi.len())?;
        for (l, h) in self.lo.iter().zip(&self.hi) {
            if !(l.is_finite() && h.is_finite() && l <= h) {
                return Err(Error::InvalidBody(format!("empty interval [{l}, {h}]")));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn intervals(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.lo.iter().copied().zip(self.hi.iter().copied())
    }

    /// Grid of `per_axis` evenly spaced points per coordinate, endpoints
    /// included (the midpoint when `per_axis == 1`). Row-major order.
    pub fn lattice(&self, per_axis: usize) -> Vec<Vec<f64>> {
        let per_axis = per_axis.max(1);
        let axes: Vec<Vec<f64>> = self
            .intervals()
            .map(|(l, h)| {
                if per_axis == 1 {
                    vec![0.5 * (l + h)]
                } else {
                    (0..per_axis)
                        .map(|i| l + (h - l) * i as f64 / (per_axis - 1) as f64)
                        .collect()
                }
            })
            .collect();
        let mut out = vec![Vec::with_capacity(self.dim())];
        for axis in &axes {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    axis.iter().map(move |&v| {
                        let mut p = prefix.clone();
                        p.push(v);
                        p
                    })
                })
                .collect();
        }
        out
    }

    fn project(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.intervals())
            .map(|(&v, (l, h))| v.clamp(l, h))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

/// The halfspace `normal · x <= offset`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

/// Bounded intersection of halfspaces. Per-axis bounds are computed once
/// at construction by linear programming.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Polytope {
    pub halfspaces: Vec<Halfspace>,
    #[serde(skip)]
    bounds: Option<Aabb>,
}

impl Polytope {
    pub fn new(halfspaces: Vec<Halfspace>) -> Result<Self> {
        let d = halfspaces
            .first()
            .map(|h| h.normal.len())
            .ok_or_else(|| Error::InvalidBody("polytope without halfspaces".into()))?;
        if d == 0 {
            return Err(Error::InvalidBody("polytope has dimension zero".into()));
        }
        for h in &halfspaces {
            check_dim(d, h.normal.len())?;
            if norm(&h.normal) == 0.0 || !h.offset.is_finite() {
                return Err(Error::InvalidBody("degenerate halfspace".into()));
            }
        }
        let mut lo = vec![0.0; d];
        let mut hi = vec![0.0; d];
        for j in 0..d {
            for sign in [1.0, -1.0] {
                let mut objective = vec![0.0; d];
                objective[j] = sign;
                let mut lp = LinearProgram::new(d).maximize(objective).all_free();
                for h in &halfspaces {
                    lp.add_le(h.normal.clone(), h.offset);
                }
                let sol = lp.solve().map_err(|e| match e {
                    Error::Unbounded => Error::InvalidBody("polytope is unbounded".into()),
                    Error::Infeasible(_) => Error::InvalidBody("polytope is empty".into()),
                    other => other,
                })?;
                if sign > 0.0 {
                    hi[j] = sol.x[j];
                } else {
                    lo[j] = sol.x[j];
                }
            }
        }
        Ok(Self {
            halfspaces,
            bounds: Some(Aabb { lo, hi }),
        })
    }

    fn dim(&self) -> usize {
        self.halfspaces[0].normal.len()
    }

    fn bounds(&self) -> &Aabb {
        self.bounds.as_ref().expect("polytope built through Polytope::new")
    }

    fn max_violation(&self, x: &[f64]) -> f64 {
        self.halfspaces
            .iter()
            .map(|h| (dot(&h.normal, x) - h.offset) / norm(&h.normal))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Euclidean projection by Hildreth's dual coordinate ascent, polished
    /// by an exact solve on the detected active set.
    fn project(&self, x: &[f64]) -> Vec<f64> {
        let hs = &self.halfspaces;
        let sq: Vec<f64> = hs.iter().map(|h| dot(&h.normal, &h.normal)).collect();
        let mut lambda = vec![0.0; hs.len()];
        let mut z = x.to_vec();
        for _sweep in 0..200_000 {
            let mut change = 0.0f64;
            for (i, h) in hs.iter().enumerate() {
                let r = (dot(&h.normal, &z) - h.offset) / sq[i];
                let new = (lambda[i] + r).max(0.0);
                let step = new - lambda[i];
                if step != 0.0 {
                    for (zk, ak) in z.iter_mut().zip(&h.normal) {
                        *zk -= step * ak;
                    }
                    lambda[i] = new;
                    change = change.max(step.abs() * sq[i].sqrt());
                }
            }
            if change < 1e-15 {
                break;
            }
        }
        let active: Vec<usize> = (0..hs.len()).filter(|&i| lambda[i] > 1e-13).collect();
        if !active.is_empty() && active.len() <= x.len() {
            let gram: Vec<Vec<f64>> = active
                .iter()
                .map(|&i| active.iter().map(|&k| dot(&hs[i].normal, &hs[k].normal)).collect())
                .collect();
            let rhs: Vec<f64> = active.iter().map(|&i| dot(&hs[i].normal, x) - hs[i].offset).collect();
            if let Some(mu) = solve(gram, rhs) {
                let mut exact = x.to_vec();
                for (&i, m) in active.iter().zip(&mu) {
                    for (zk, ak) in exact.iter_mut().zip(&hs[i].normal) {
                        *zk -= m * ak;
                    }
                }
                if mu.iter().all(|&m| m >= -1e-12) && self.max_violation(&exact) <= POLYTOPE_DISTANCE_TOL {
                    return exact;
                }
            }
        }
        z
    }
}

/// A nonempty convex compact subset of R^d.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", try_from = "RawBody")]
pub enum ConvexBody {
    Box(Aabb),
    Ball(Ball),
    Polytope(Polytope),
}

#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum RawBody {
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
    Polytope { halfspaces: Vec<Halfspace> },
}

impl TryFrom<RawBody> for ConvexBody {
    type Error = Error;

    fn try_from(raw: RawBody) -> Result<Self> {
        match raw {
            RawBody::Box { lo, hi } => Ok(ConvexBody::Box(Aabb::new(lo, hi)?)),
            RawBody::Ball { center, radius } => ConvexBody::ball(center, radius),
            RawBody::Polytope { halfspaces } => ConvexBody::polytope(halfspaces),
        }
    }
}

/// Parameter interval `[t_min, t_max]` of the chord `{t y : t y in K}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Chord {
    pub direction: Vec<f64>,
    pub t_min: f64,
    pub t_max: f64,
}

impl Chord {
    pub fn width(&self) -> f64 {
        self.t_max - self.t_min
    }

    pub fn point(&self, t: f64) -> Vec<f64> {
        self.direction.iter().map(|y| t * y).collect()
    }

    /// `n` evenly spaced parameters, endpoints included.
    pub fn samples(&self, n: usize) -> Vec<f64> {
        let n = n.max(2);
        (0..n)
            .map(|i| self.t_min + self.width() * i as f64 / (n - 1) as f64)
            .collect()
    }
}

/// Finite point set inside a body, used by all sampled certificates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub points: Vec<Vec<f64>>,
    pub per_axis: usize,
    pub seed: u64,
}

impl Grid {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

impl ConvexBody {
    pub fn cube(d: usize, lo: f64, hi: f64) -> Result<Self> {
        Ok(ConvexBody::Box(Aabb::cube(d, lo, hi)?))
    }

    pub fn boxed(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        Ok(ConvexBody::Box(Aabb::new(lo, hi)?))
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.is_empty() {
            return Err(Error::InvalidBody("ball has dimension zero".into()));
        }
        if !(radius.is_finite() && radius > 0.0) || center.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidBody(format!("bad ball radius {radius}")));
        }
        Ok(ConvexBody::Ball(Ball { center, radius }))
    }

    pub fn unit_ball(d: usize) -> Self {
        ConvexBody::Ball(Ball {
            center: vec![0.0; d.max(1)],
            radius: 1.0,
        })
    }

    pub fn polytope(halfspaces: Vec<Halfspace>) -> Result<Self> {
        Ok(ConvexBody::Polytope(Polytope::new(halfspaces)?))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidBody(e.to_string()))
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexBody::Box(b) => b.dim(),
            ConvexBody::Ball(b) => b.center.len(),
            ConvexBody::Polytope(p) => p.dim(),
        }
    }

    /// Whether `x` lies within `tol` of the body. Polytopes use normalized
    /// halfspace slack, which never exceeds the true distance.
    pub fn contains(&self, x: &[f64], tol: f64) -> Result<bool> {
        check_dim(self.dim(), x.len())?;
        Ok(self.contains_unchecked(x, tol))
    }

    fn contains_unchecked(&self, x: &[f64], tol: f64) -> bool {
        match self {
            ConvexBody::Box(b) => x
                .iter()
                .zip(b.intervals())
                .all(|(&v, (l, h))| v >= l - tol && v <= h + tol),
            ConvexBody::Ball(b) => dist(x, &b.center) <= b.radius + tol,
            ConvexBody::Polytope(p) => p.max_violation(x) <= tol,
        }
    }

    /// Nearest point of the body.
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), x.len())?;
        Ok(match self {
            ConvexBody::Box(b) => b.project(x),
            ConvexBody::Ball(b) => {
                let r = dist(x, &b.center);
                if r <= b.radius {
                    x.to_vec()
                } else {
                    b.center
                        .iter()
                        .zip(x)
                        .map(|(c, v)| c + (v - c) * b.radius / r)
                        .collect()
                }
            }
            ConvexBody::Polytope(p) => {
                if p.max_violation(x) <= 0.0 {
                    x.to_vec()
                } else {
                    p.project(x)
                }
            }
        })
    }

    /// Euclidean distance from `x` to the body; zero exactly on the body.
    pub fn distance(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        Ok(match self {
            ConvexBody::Box(b) => dist(x, &b.project(x)),
            ConvexBody::Ball(b) => (dist(x, &b.center) - b.radius).max(0.0),
            ConvexBody::Polytope(p) => {
                if p.max_violation(x) <= 0.0 {
                    0.0
                } else {
                    dist(x, &p.project(x))
                }
            }
        })
    }

    /// Membership in K* = { x : dist(x, K) <= 1 }.
    pub fn fattened_contains(&self, x: &[f64]) -> Result<bool> {
        Ok(self.distance(x)? <= 1.0)
    }

    /// Interval hull of the body widened by `fatten` on every side.
    pub fn bounding_box(&self, fatten: f64) -> Aabb {
        let (lo, hi) = match self {
            ConvexBody::Box(b) => (b.lo.clone(), b.hi.clone()),
            ConvexBody::Ball(b) => (
                b.center.iter().map(|c| c - b.radius).collect(),
                b.center.iter().map(|c| c + b.radius).collect(),
            ),
            ConvexBody::Polytope(p) => (p.bounds().lo.clone(), p.bounds().hi.clone()),
        };
        Aabb {
            lo: lo.into_iter().map(|v| v - fatten).collect(),
            hi: hi.into_iter().map(|v| v + fatten).collect(),
        }
    }

    /// Whether a ball of radius `radius` around the origin, probed along the
    /// 2d coordinate directions, stays inside the body.
    pub fn origin_is_interior(&self, radius: f64) -> bool {
        let d = self.dim();
        (0..d).all(|j| {
            [radius, -radius].iter().all(|&r| {
                let mut p = vec![0.0; d];
                p[j] = r;
                self.contains_unchecked(&p, 0.0)
            })
        })
    }

    /// The chord through the origin along `y` (normalized here), located by
    /// bisection on membership to absolute tolerance `tol`. Both returned
    /// endpoints are members of the body.
    pub fn chord(&self, y: &[f64], tol: f64) -> Result<Chord> {
        check_dim(self.dim(), y.len())?;
        let ny = norm(y);
        if !(ny.is_finite() && ny > 0.0) {
            return Err(Error::InvalidArgument("chord direction must be nonzero".into()));
        }
        if !(tol > 0.0) {
            return Err(Error::InvalidArgument("chord tolerance must be positive".into()));
        }
        if !self.origin_is_interior(tol) {
            return Err(Error::OriginNotInterior);
        }
        let dir: Vec<f64> = y.iter().map(|v| v / ny).collect();
        let bb = self.bounding_box(0.0);
        let reach = bb
            .intervals()
            .map(|(l, h)| l.abs().max(h.abs()).powi(2))
            .sum::<f64>()
            .sqrt()
            * 1.001
            + 1.0;
        let inside = |t: f64| {
            let p: Vec<f64> = dir.iter().map(|v| t * v).collect();
            self.contains_unchecked(&p, 0.0)
        };
        let edge = |sign: f64| {
            let (mut lo, mut hi) = (0.0f64, reach);
            while hi - lo > tol {
                let mid = 0.5 * (lo + hi);
                if inside(sign * mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            sign * lo
        };
        Ok(Chord {
            t_min: edge(-1.0),
            t_max: edge(1.0),
            direction: dir,
        })
    }

    /// A uniformly distributed point of the body, by rejection from the
    /// bounding box. Falls back to projecting the last candidate.
    pub fn sample_point<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        let bb = self.bounding_box(0.0);
        let mut candidate = Vec::new();
        for _ in 0..10_000 {
            candidate = bb
                .intervals()
                .map(|(l, h)| if h > l { rng.gen_range(l..=h) } else { l })
                .collect();
            if self.contains_unchecked(&candidate, 0.0) {
                return candidate;
            }
        }
        self.project(&candidate).expect("dimension matches")
    }

    /// Lattice points of the bounding box that belong to the body.
    pub fn lattice(&self, per_axis: usize) -> Vec<Vec<f64>> {
        self.bounding_box(0.0)
            .lattice(per_axis)
            .into_iter()
            .filter(|p| self.contains_unchecked(p, 1e-12))
            .collect()
    }
}

/// Seeded generator used by every randomized routine in the crate.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Lattice of the bounding box filtered by membership, plus `per_axis`
/// seeded uniform samples from the body.
pub fn make_grid(body: &ConvexBody, per_axis: usize, seed: u64) -> Result<Grid> {
    let mut points = body.lattice(per_axis);
    let mut rng = seeded_rng(seed);
    for _ in 0..per_axis {
        let p = body.sample_point(&mut rng);
        if body.contains_unchecked(&p, 1e-12) {
            points.push(p);
        }
    }
    if points.is_empty() {
        return Err(Error::EmptyGrid);
    }
    Ok(Grid { points, per_axis, seed })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> ConvexBody {
        ConvexBody::cube(2, 0.0, 1.0).unwrap()
    }

    fn simplex() -> ConvexBody {
        ConvexBody::polytope(vec![
            Halfspace {
                normal: vec![-1.0, 0.0],
                offset: 0.0,
            },
            Halfspace {
                normal: vec![0.0, -1.0],
                offset: 0.0,
            },
            Halfspace {
                normal: vec![1.0, 1.0],
                offset: 1.0,
            },
        ])
        .unwrap()
    }

    #[test]
    fn membership_examples() {
        let sq = unit_square();
        assert!(sq.contains(&[0.5, 0.5], 0.0).unwrap());
        assert!(!sq.contains(&[1.5, 0.0], 0.0).unwrap());
        assert!(ConvexBody::unit_ball(2).contains(&[0.0, 1.0], 0.0).unwrap());
        assert_eq!(
            sq.contains(&[0.5], 0.0),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        );
    }

    #[test]
    fn distance_examples() {
        let sq = unit_square();
        assert_eq!(sq.distance(&[2.0, 0.5]).unwrap(), 1.0);
        assert!((sq.distance(&[2.0, 2.0]).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(ConvexBody::unit_ball(2).distance(&[0.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn polytope_distance_matches_closed_forms() {
        let s = simplex();
        // nearest point on the hypotenuse x + y = 1
        let d = s.distance(&[1.0, 1.0]).unwrap();
        assert!((d - 1.0 / 2f64.sqrt()).abs() < 1e-10);
        // nearest point is the vertex (1, 0)
        let d = s.distance(&[2.0, -1.0]).unwrap();
        assert!((d - 2f64.sqrt()).abs() < 1e-10);
        assert_eq!(s.distance(&[0.2, 0.2]).unwrap(), 0.0);
        // the unit square as a polytope agrees with the box formula
        let sqp = ConvexBody::polytope(vec![
            Halfspace {
                normal: vec![1.0, 0.0],
                offset: 1.0,
            },
            Halfspace {
                normal: vec![-1.0, 0.0],
                offset: 0.0,
            },
            Halfspace {
                normal: vec![0.0, 1.0],
                offset: 1.0,
            },
            Halfspace {
                normal: vec![0.0, -1.0],
                offset: 0.0,
            },
        ])
        .unwrap();
        for p in [[2.0, 2.0], [-0.5, 0.3], [3.0, -4.0], [0.5, 1.7]] {
            let a = sqp.distance(&p).unwrap();
            let b = unit_square().distance(&p).unwrap();
            assert!((a - b).abs() < 1e-10, "{p:?}: {a} vs {b}");
        }
    }

    #[test]
    fn fattened_membership() {
        assert!(unit_square().fattened_contains(&[1.9, 0.5]).unwrap());
        assert!(!ConvexBody::unit_ball(2).fattened_contains(&[2.1, 0.0]).unwrap());
        assert!(unit_square().fattened_contains(&[0.3, 0.3]).unwrap());
    }

    #[test]
    fn bounding_boxes() {
        assert_eq!(
            unit_square().bounding_box(1.0),
            Aabb {
                lo: vec![-1.0, -1.0],
                hi: vec![2.0, 2.0]
            }
        );
        assert_eq!(
            ConvexBody::unit_ball(2).bounding_box(0.0),
            Aabb {
                lo: vec![-1.0, -1.0],
                hi: vec![1.0, 1.0]
            }
        );
    }

    #[test]
    fn simplex_bounding_box_matches_bisection_oracle() {
        // oracle: bisect membership along each positive axis from the vertex
        // at the origin; the simplex is contained in the positive quadrant
        let s = simplex();
        let mut extent = [0.0; 2];
        for (j, e) in extent.iter_mut().enumerate() {
            let (mut lo, mut hi) = (0.0, 10.0);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                let mut p = [0.0; 2];
                p[j] = mid;
                if s.contains(&p, 0.0).unwrap() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            *e = lo;
        }
        let bb = s.bounding_box(1.0);
        for j in 0..2 {
            assert!((bb.lo[j] + 1.0).abs() < 1e-9);
            assert!((bb.hi[j] - (extent[j] + 1.0)).abs() < 1e-9);
            assert!((bb.hi[j] - 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn chord_examples() {
        let c = ConvexBody::unit_ball(2).chord(&[0.6, 0.8], CHORD_TOL).unwrap();
        assert!((c.t_min + 1.0).abs() < 1e-9 && (c.t_max - 1.0).abs() < 1e-9);

        let sq = ConvexBody::cube(2, -1.0, 1.0).unwrap();
        let c = sq.chord(&[1.0, 1.0], CHORD_TOL).unwrap();
        assert!((c.t_max - 2f64.sqrt()).abs() < 1e-9);
        assert!((c.t_min + 2f64.sqrt()).abs() < 1e-9);

        let b = ConvexBody::boxed(vec![-1.0, -1.0], vec![2.0, 1.0]).unwrap();
        let c = b.chord(&[1.0, 0.0], CHORD_TOL).unwrap();
        assert!((c.t_min + 1.0).abs() < 1e-9 && (c.t_max - 2.0).abs() < 1e-9);
    }

    #[test]
    fn chord_requires_interior_origin() {
        assert_eq!(
            unit_square().chord(&[1.0, 0.0], CHORD_TOL),
            Err(Error::OriginNotInterior)
        );
    }

    #[test]
    fn grid_examples() {
        let line = ConvexBody::cube(1, 0.0, 1.0).unwrap();
        let g = make_grid(&line, 3, 1).unwrap();
        assert_eq!(&g.points[..3], &[vec![0.0], vec![0.5], vec![1.0]]);
        assert_eq!(g.len(), 6);

        let g = make_grid(&ConvexBody::unit_ball(2), 2, 1).unwrap();
        assert!(g.points.iter().all(|p| p[0].abs() + p[1].abs() < 2.0));
        assert_eq!(g.len(), 2);

        let g = make_grid(&simplex(), 2, 1).unwrap();
        let lattice: Vec<_> = g.points.iter().take(3).cloned().collect();
        assert_eq!(lattice, vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0]]);
    }

    #[test]
    fn json_round_trip_and_validation() {
        let s = simplex();
        let json = serde_json::to_string(&s).unwrap();
        assert!(json.starts_with(r#"{"type":"polytope""#));
        assert_eq!(ConvexBody::from_json(&json).unwrap(), s);

        let b = ConvexBody::from_json(r#"{"type":"ball","center":[0,0],"radius":2}"#).unwrap();
        assert_eq!(b.dim(), 2);
        assert!(ConvexBody::from_json(r#"{"type":"ball","center":[0],"radius":-1}"#).is_err());
        assert!(ConvexBody::from_json(r#"{"type":"box","lo":[1],"hi":[0]}"#).is_err());
        let unbounded = r#"{"type":"polytope","halfspaces":[{"normal":[1,0],"offset":1}]}"#;
        assert!(ConvexBody::from_json(unbounded).is_err());
        assert!(ConvexBody::from_json(r#"{"type":"box","lo":[0],"hi":[1],"x":1}"#).is_err());
    }
}
