//! Concrete p-uniformly convex model spaces.
//!
//! Four families are implemented: Euclidean n-space, the Poincaré disk,
//! a spherical cap (curvature bounded above by `kappa`) and a metric star
//! tree. Each space exposes its distance, exact geodesic interpolation,
//! deterministic sampling and a sampled certification of the convexity
//! inequality
//!
//! ```text
//! d(z, (1-t)x (+) t y)^p <= (1-t) d(z,x)^p + t d(z,y)^p - (c/2) t (1-t) d(x,y)^p
//! ```
//!
//! with the declared exponent `p` and constant `c`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Tolerance for exact geometric identities (distance splits, membership).
pub const GEOM_TOL: f64 = 1e-10;
/// Tolerance for sampled inequality slacks: a slack above this is a pass.
pub const SLACK_TOL: f64 = -1e-9;

/// Convexity parameters of a space: exponent `p` and constant `c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceParams {
    pub p: f64,
    pub c: f64,
}

impl SpaceParams {
    pub fn new(p: f64, c: f64) -> Result<Self> {
        if !(p > 1.0) {
            return Err(Error::InvalidParameter(format!("p must exceed 1, got {p}")));
        }
        if !(c > 0.0 && c <= 2.0) {
            return Err(Error::InvalidParameter(format!("c must lie in (0,2], got {c}")));
        }
        // Kuwae's bound: c = 2 forces p = 2.
        if c == 2.0 && p != 2.0 {
            return Err(Error::InvalidParameter(format!(
                "c = 2 requires p = 2, got p = {p}"
            )));
        }
        Ok(SpaceParams { p, c })
    }
}

/// A point of one of the model spaces.
///
/// The variant must match the space the point is used with; every
/// operation checks membership and reports a domain error otherwise.
#[derive(Debug, Clone, PartialEq)]
pub enum Point {
    /// Coordinates in Euclidean n-space.
    Euclidean(Vec<f64>),
    /// Coordinates in the open unit disk, |x| < 1.
    Disk([f64; 2]),
    /// Unit 3-vector on the sphere of curvature kappa (scaled by 1/sqrt(kappa)).
    Sphere([f64; 3]),
    /// Edge index and offset from the hub, offset >= 0.
    Tree { edge: usize, offset: f64 },
}

impl Point {
    pub fn euclidean(coords: &[f64]) -> Self {
        Point::Euclidean(coords.to_vec())
    }

    pub fn disk(x: f64, y: f64) -> Self {
        Point::Disk([x, y])
    }

    pub fn tree(edge: usize, offset: f64) -> Self {
        Point::Tree { edge, offset }
    }

    /// Flat coordinate vector, used for CSV serialization.
    pub fn coords(&self) -> Vec<f64> {
        match self {
            Point::Euclidean(v) => v.clone(),
            Point::Disk(v) => v.to_vec(),
            Point::Sphere(v) => v.to_vec(),
            Point::Tree { edge, offset } => vec![*edge as f64, *offset],
        }
    }
}

/// A geodesic segment given by its endpoints.
#[derive(Debug, Clone)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

/// Sampling region descriptor for [`ModelSpace::sample`].
#[derive(Debug, Clone)]
pub enum Region {
    /// The space's natural bounded sampling region.
    Default,
    /// Metric ball around a center.
    Ball { center: Point, radius: f64 },
    /// Euclidean-coordinate norm bound (Poincaré disk only).
    NormBall { radius: f64 },
}

/// One of the concrete model spaces together with its certified (p, c).
#[derive(Debug, Clone)]
pub enum ModelSpace {
    Euclidean { dim: usize },
    PoincareDisk,
    /// Geodesic ball on the sphere of curvature `kappa`, centered at the
    /// north pole, of angular radius (pi/2 - eps*sqrt(kappa))/2. The cap
    /// diameter then stays within pi/(2 sqrt(kappa)) - eps, which is the
    /// regime where the Ohta constant below is valid.
    SphericalCap { kappa: f64, eps: f64 },
    StarTree { edge_lengths: Vec<f64> },
}

impl ModelSpace {
    pub fn euclidean(dim: usize) -> Self {
        ModelSpace::Euclidean { dim }
    }

    pub fn poincare_disk() -> Self {
        ModelSpace::PoincareDisk
    }

    pub fn spherical_cap(kappa: f64, eps: f64) -> Result<Self> {
        if !(kappa > 0.0) {
            return Err(Error::InvalidParameter("kappa must be positive".into()));
        }
        let limit = std::f64::consts::FRAC_PI_2 / kappa.sqrt();
        if !(eps > 0.0 && eps < limit) {
            return Err(Error::InvalidParameter(format!(
                "eps must lie in (0, pi/(2 sqrt(kappa))) = (0, {limit})"
            )));
        }
        Ok(ModelSpace::SphericalCap { kappa, eps })
    }

    pub fn star_tree(edge_lengths: &[f64]) -> Result<Self> {
        if edge_lengths.is_empty() || edge_lengths.iter().any(|&l| l <= 0.0) {
            return Err(Error::InvalidParameter(
                "star tree needs at least one edge of positive length".into(),
            ));
        }
        Ok(ModelSpace::StarTree {
            edge_lengths: edge_lengths.to_vec(),
        })
    }

    /// The certified convexity parameters of this space.
    pub fn params(&self) -> SpaceParams {
        match self {
            ModelSpace::Euclidean { .. } | ModelSpace::PoincareDisk | ModelSpace::StarTree { .. } => {
                SpaceParams { p: 2.0, c: 2.0 }
            }
            ModelSpace::SphericalCap { kappa, eps } => SpaceParams {
                p: 2.0,
                c: ohta_constant(*kappa, *eps),
            },
        }
    }

    /// Angular radius of the spherical cap (on the unit sphere).
    pub fn cap_angular_radius(&self) -> Option<f64> {
        match self {
            ModelSpace::SphericalCap { kappa, eps } => {
                Some((std::f64::consts::FRAC_PI_2 - eps * kappa.sqrt()) / 2.0)
            }
            _ => None,
        }
    }

    pub fn name(&self) -> String {
        match self {
            ModelSpace::Euclidean { dim } => format!("euclidean({dim})"),
            ModelSpace::PoincareDisk => "poincare_disk".into(),
            ModelSpace::SphericalCap { kappa, eps } => format!("spherical_cap({kappa},{eps})"),
            ModelSpace::StarTree { edge_lengths } => format!("star_tree({})", edge_lengths.len()),
        }
    }

    /// Membership check; all operations call this on their inputs.
    pub fn contains(&self, x: &Point) -> bool {
        match (self, x) {
            (ModelSpace::Euclidean { dim }, Point::Euclidean(v)) => {
                v.len() == *dim && v.iter().all(|c| c.is_finite())
            }
            (ModelSpace::PoincareDisk, Point::Disk(v)) => {
                let n2 = v[0] * v[0] + v[1] * v[1];
                n2.is_finite() && n2 < 1.0
            }
            (ModelSpace::SphericalCap { .. }, Point::Sphere(u)) => {
                let n = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
                if !((n - 1.0).abs() <= 1e-9) {
                    return false;
                }
                let angle = u[2].clamp(-1.0, 1.0).acos();
                angle <= self.cap_angular_radius().unwrap() + GEOM_TOL
            }
            (ModelSpace::StarTree { edge_lengths }, Point::Tree { edge, offset }) => {
                *edge < edge_lengths.len() && *offset >= 0.0 && *offset <= edge_lengths[*edge]
            }
            _ => false,
        }
    }

    fn check_member(&self, x: &Point) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "point {x:?} is not in {}",
                self.name()
            )))
        }
    }

    /// Geodesic distance between two member points.
    pub fn distance(&self, x: &Point, y: &Point) -> Result<f64> {
        self.check_member(x)?;
        self.check_member(y)?;
        Ok(self.distance_unchecked(x, y))
    }

    pub(crate) fn distance_unchecked(&self, x: &Point, y: &Point) -> f64 {
        match (self, x, y) {
            (ModelSpace::Euclidean { .. }, Point::Euclidean(a), Point::Euclidean(b)) => a
                .iter()
                .zip(b.iter())
                .map(|(u, v)| (u - v) * (u - v))
                .sum::<f64>()
                .sqrt(),
            (ModelSpace::PoincareDisk, Point::Disk(a), Point::Disk(b)) => {
                let w = mobius_add(&neg2(a), b);
                2.0 * atanh(norm2(&w).min(1.0 - 1e-16))
            }
            (ModelSpace::SphericalCap { kappa, .. }, Point::Sphere(u), Point::Sphere(v)) => {
                // atan2 of the cross/dot pair stays accurate for nearby
                // points, where arccos of the dot product loses half the
                // mantissa.
                let dot = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
                let cx = u[1] * v[2] - u[2] * v[1];
                let cy = u[2] * v[0] - u[0] * v[2];
                let cz = u[0] * v[1] - u[1] * v[0];
                let cross = (cx * cx + cy * cy + cz * cz).sqrt();
                cross.atan2(dot) / kappa.sqrt()
            }
            (ModelSpace::StarTree { .. }, Point::Tree { edge: e1, offset: o1 }, Point::Tree { edge: e2, offset: o2 }) => {
                if e1 == e2 || *o1 == 0.0 || *o2 == 0.0 {
                    if e1 == e2 {
                        (o1 - o2).abs()
                    } else {
                        o1 + o2
                    }
                } else {
                    o1 + o2
                }
            }
            _ => f64::NAN,
        }
    }

    /// The point z = (1-t) x (+) t y on the geodesic from x to y, with
    /// d(x, z) = t d(x, y) and d(z, y) = (1-t) d(x, y).
    pub fn geodesic_point(&self, x: &Point, y: &Point, t: f64) -> Result<Point> {
        self.check_member(x)?;
        self.check_member(y)?;
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidParameter(format!(
                "geodesic parameter t = {t} outside [0,1]"
            )));
        }
        Ok(self.geodesic_unchecked(x, y, t))
    }

    pub(crate) fn geodesic_unchecked(&self, x: &Point, y: &Point, t: f64) -> Point {
        if t == 0.0 {
            return x.clone();
        }
        if t == 1.0 {
            return y.clone();
        }
        match (self, x, y) {
            (ModelSpace::Euclidean { .. }, Point::Euclidean(a), Point::Euclidean(b)) => {
                Point::Euclidean(
                    a.iter()
                        .zip(b.iter())
                        .map(|(u, v)| (1.0 - t) * u + t * v)
                        .collect(),
                )
            }
            (ModelSpace::PoincareDisk, Point::Disk(a), Point::Disk(b)) => {
                // Möbius-translate x to the origin, interpolate along the
                // straight ray, translate back. Exact geodesics, no ODE.
                let w = mobius_add(&neg2(a), b);
                let r = norm2(&w);
                if r < 1e-300 {
                    return x.clone();
                }
                let m = atanh(r.min(1.0 - 1e-16));
                let rt = (t * m).tanh();
                let wt = [w[0] / r * rt, w[1] / r * rt];
                Point::Disk(mobius_add(a, &wt))
            }
            (ModelSpace::SphericalCap { .. }, Point::Sphere(u), Point::Sphere(v)) => {
                let dot = (u[0] * v[0] + u[1] * v[1] + u[2] * v[2]).clamp(-1.0, 1.0);
                let omega = dot.acos();
                if omega < 1e-300 {
                    return x.clone();
                }
                let s = omega.sin();
                let (cu, cv) = (((1.0 - t) * omega).sin() / s, (t * omega).sin() / s);
                let mut w = [
                    cu * u[0] + cv * v[0],
                    cu * u[1] + cv * v[1],
                    cu * u[2] + cv * v[2],
                ];
                let n = (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt();
                for c in &mut w {
                    *c /= n;
                }
                Point::Sphere(w)
            }
            (ModelSpace::StarTree { .. }, Point::Tree { edge: e1, offset: o1 }, Point::Tree { edge: e2, offset: o2 }) => {
                if e1 == e2 || *o1 == 0.0 || *o2 == 0.0 {
                    if e1 == e2 {
                        return Point::Tree {
                            edge: *e1,
                            offset: (1.0 - t) * o1 + t * o2,
                        };
                    }
                    // One endpoint is the hub: stay on the other edge.
                    if *o1 == 0.0 {
                        return Point::Tree {
                            edge: *e2,
                            offset: t * o2,
                        };
                    }
                    return Point::Tree {
                        edge: *e1,
                        offset: (1.0 - t) * o1,
                    };
                }
                // Path through the hub.
                let total = o1 + o2;
                let s = t * total;
                if s <= *o1 {
                    Point::Tree {
                        edge: *e1,
                        offset: o1 - s,
                    }
                } else {
                    Point::Tree {
                        edge: *e2,
                        offset: s - o1,
                    }
                }
            }
            _ => x.clone(),
        }
    }

    /// Worst signed slack (RHS - LHS) of the convexity inequality over
    /// `n_samples` random (x, y, z, t). Nonnegative up to `SLACK_TOL` for a
    /// correctly configured space.
    pub fn verify_p_convexity(&self, n_samples: usize, rng_seed: u64) -> Result<f64> {
        if n_samples == 0 {
            return Err(Error::InvalidParameter("n_samples must be >= 1".into()));
        }
        let SpaceParams { p, c } = self.params();
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        let mut worst = f64::INFINITY;
        for _ in 0..n_samples {
            let x = self.sample_rng(&Region::Default, &mut rng)?;
            let y = self.sample_rng(&Region::Default, &mut rng)?;
            let z = self.sample_rng(&Region::Default, &mut rng)?;
            let t: f64 = rng.gen();
            let m = self.geodesic_unchecked(&x, &y, t);
            let lhs = self.distance_unchecked(&z, &m).powf(p);
            let rhs = (1.0 - t) * self.distance_unchecked(&z, &x).powf(p)
                + t * self.distance_unchecked(&z, &y).powf(p)
                - (c / 2.0) * t * (1.0 - t) * self.distance_unchecked(&x, &y).powf(p);
            worst = worst.min(rhs - lhs);
        }
        Ok(worst)
    }

    /// True iff gamma is perpendicular to eta at p0: d(x, p0) <= d(x, y)
    /// for all sampled x on gamma and y on eta.
    ///
    /// Both segments must pass through p0.
    pub fn check_perpendicular(
        &self,
        gamma: &Segment,
        eta: &Segment,
        p0: &Point,
        grid: usize,
    ) -> Result<bool> {
        let through = |seg: &Segment| -> Result<bool> {
            let n = grid.max(64);
            let mut best = f64::INFINITY;
            for i in 0..=n {
                let t = i as f64 / n as f64;
                let q = self.geodesic_point(&seg.a, &seg.b, t)?;
                best = best.min(self.distance_unchecked(&q, p0));
            }
            Ok(best <= 1e-7)
        };
        if !through(gamma)? || !through(eta)? {
            return Err(Error::InvalidParameter(
                "segment does not pass through the claimed common point".into(),
            ));
        }
        let n = grid.max(2);
        for i in 0..=n {
            let tx = i as f64 / n as f64;
            let x = self.geodesic_point(&gamma.a, &gamma.b, tx)?;
            let dxp = self.distance_unchecked(&x, p0);
            for j in 0..=n {
                let ty = j as f64 / n as f64;
                let y = self.geodesic_point(&eta.a, &eta.b, ty)?;
                if dxp > self.distance_unchecked(&x, &y) + GEOM_TOL {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Deterministic sampling: same seed, same point.
    pub fn sample(&self, region: &Region, rng_seed: u64) -> Result<Point> {
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        self.sample_rng(region, &mut rng)
    }

    /// Sample using a caller-owned generator (for sweeps).
    pub fn sample_rng<R: Rng>(&self, region: &Region, rng: &mut R) -> Result<Point> {
        match region {
            Region::Default => self.sample_default(rng),
            Region::Ball { center, radius } => {
                self.check_member(center)?;
                if *radius < 0.0 {
                    return Err(Error::InvalidParameter("negative sampling radius".into()));
                }
                // Pull a default sample toward the center until inside.
                for _ in 0..256 {
                    let q = self.sample_default(rng)?;
                    let d = self.distance_unchecked(center, &q);
                    if d <= *radius {
                        return Ok(q);
                    }
                    let t = radius / d * rng.gen::<f64>();
                    let z = self.geodesic_unchecked(center, &q, t);
                    if self.distance_unchecked(center, &z) <= *radius {
                        return Ok(z);
                    }
                }
                Err(Error::InvalidParameter("empty sampling region".into()))
            }
            Region::NormBall { radius } => match self {
                ModelSpace::PoincareDisk => {
                    if !(*radius > 0.0 && *radius < 1.0) {
                        return Err(Error::InvalidParameter(
                            "disk norm bound must lie in (0,1)".into(),
                        ));
                    }
                    let r = radius * rng.gen::<f64>().sqrt();
                    let phi = rng.gen::<f64>() * std::f64::consts::TAU;
                    Ok(Point::Disk([r * phi.cos(), r * phi.sin()]))
                }
                _ => Err(Error::InvalidParameter(
                    "norm-ball sampling is only defined on the disk".into(),
                )),
            },
        }
    }

    fn sample_default<R: Rng>(&self, rng: &mut R) -> Result<Point> {
        match self {
            ModelSpace::Euclidean { dim } => {
                // Ball of radius 2 around the origin.
                let v: Vec<f64> = (0..*dim).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
                let n = v.iter().map(|c| c * c).sum::<f64>().sqrt();
                if n < 1e-12 {
                    return Ok(Point::Euclidean(vec![0.0; *dim]));
                }
                let r = 2.0 * rng.gen::<f64>().powf(1.0 / *dim as f64);
                Ok(Point::Euclidean(v.into_iter().map(|c| c / n * r).collect()))
            }
            ModelSpace::PoincareDisk => self.sample_rng(&Region::NormBall { radius: 0.9 }, rng),
            ModelSpace::SphericalCap { .. } => {
                let rmax = self.cap_angular_radius().unwrap();
                let phi = rng.gen::<f64>() * rmax;
                let psi = rng.gen::<f64>() * std::f64::consts::TAU;
                Ok(Point::Sphere([
                    phi.sin() * psi.cos(),
                    phi.sin() * psi.sin(),
                    phi.cos(),
                ]))
            }
            ModelSpace::StarTree { edge_lengths } => {
                let edge = rng.gen_range(0..edge_lengths.len());
                let offset = rng.gen::<f64>() * edge_lengths[edge];
                Ok(Point::Tree { edge, offset })
            }
        }
    }

    /// A canonical interior base point.
    pub fn base_point(&self) -> Point {
        match self {
            ModelSpace::Euclidean { dim } => Point::Euclidean(vec![0.0; *dim]),
            ModelSpace::PoincareDisk => Point::Disk([0.0, 0.0]),
            ModelSpace::SphericalCap { .. } => Point::Sphere([0.0, 0.0, 1.0]),
            ModelSpace::StarTree { .. } => Point::Tree { edge: 0, offset: 0.0 },
        }
    }

    /// True for the CAT(0) members of the family (p = 2, c = 2).
    pub fn is_cat0(&self) -> bool {
        !matches!(self, ModelSpace::SphericalCap { .. })
    }

    /// Points equal up to the geometry tolerance (handles the star-tree
    /// hub, where every (edge, 0) is the same point).
    pub fn points_equal(&self, x: &Point, y: &Point) -> bool {
        self.distance_unchecked(x, y) <= GEOM_TOL
    }
}

/// 2-uniform convexity constant of a CAT(kappa) space of diameter at most
/// pi/(2 sqrt(kappa)) - eps.
pub fn ohta_constant(kappa: f64, eps: f64) -> f64 {
    let s = kappa.sqrt();
    (std::f64::consts::PI - 2.0 * s * eps) * (eps * s).tan()
}

fn atanh(x: f64) -> f64 {
    0.5 * ((1.0 + x) / (1.0 - x)).ln()
}

fn norm2(v: &[f64; 2]) -> f64 {
    (v[0] * v[0] + v[1] * v[1]).sqrt()
}

fn neg2(v: &[f64; 2]) -> [f64; 2] {
    [-v[0], -v[1]]
}

/// Möbius addition on the unit disk.
pub(crate) fn mobius_add(a: &[f64; 2], b: &[f64; 2]) -> [f64; 2] {
    let ab = a[0] * b[0] + a[1] * b[1];
    let a2 = a[0] * a[0] + a[1] * a[1];
    let b2 = b[0] * b[0] + b[1] * b[1];
    let den = 1.0 + 2.0 * ab + a2 * b2;
    let ca = (1.0 + 2.0 * ab + b2) / den;
    let cb = (1.0 - a2) / den;
    [ca * a[0] + cb * b[0], ca * a[1] + cb * b[1]]
}
