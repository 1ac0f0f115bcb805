//! Constructible operator library: metric projectors, p-proximal mappings
//! with Moreau–Yosida envelopes, Krasnoselskii–Mann relaxations,
//! compositions, and p-convex combinations through barycenters.

use crate::error::{Error, Result};
use crate::quantities::Mapping;
use crate::spaces::{ModelSpace, Point, GEOM_TOL};

/// Membership tolerance for convex-set indicator evaluation.
const SET_TOL: f64 = 1e-9;

/// A geodesically convex subset of a model space.
#[derive(Debug, Clone)]
pub enum ConvexSet {
    /// Metric ball. On the spherical cap the radius must stay within the
    /// convexity radius of the cap.
    Ball { center: Point, radius: f64 },
    /// Euclidean halfspace { x : <normal, x> <= offset }, unit normal.
    Halfspace { normal: Vec<f64>, offset: f64 },
    /// Geodesic segment between two points.
    Segment { a: Point, b: Point },
    /// Star-tree subtree: edge i is kept up to offset `max_offsets[i]`.
    Subtree { max_offsets: Vec<f64> },
}

impl ConvexSet {
    pub fn ball(center: Point, radius: f64) -> Result<Self> {
        if !(radius >= 0.0) {
            return Err(Error::InvalidParameter("ball radius must be >= 0".into()));
        }
        Ok(ConvexSet::Ball { center, radius })
    }

    pub fn halfspace(normal: &[f64], offset: f64) -> Result<Self> {
        let n = normal.iter().map(|c| c * c).sum::<f64>().sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidParameter("halfspace normal must be nonzero".into()));
        }
        Ok(ConvexSet::Halfspace {
            normal: normal.iter().map(|c| c / n).collect(),
            offset: offset / n,
        })
    }

    pub fn segment(a: Point, b: Point) -> Self {
        ConvexSet::Segment { a, b }
    }

    pub fn subtree(max_offsets: &[f64]) -> Result<Self> {
        if max_offsets.iter().any(|&o| o < 0.0) {
            return Err(Error::InvalidParameter("subtree offsets must be >= 0".into()));
        }
        Ok(ConvexSet::Subtree {
            max_offsets: max_offsets.to_vec(),
        })
    }

    /// Check the descriptor against a space (membership of the pieces and
    /// convexity preconditions).
    pub fn validate(&self, s: &ModelSpace) -> Result<()> {
        match self {
            ConvexSet::Ball { center, radius } => {
                if !s.contains(center) {
                    return Err(Error::Domain("ball center is not in the space".into()));
                }
                if let ModelSpace::SphericalCap { kappa, eps } = s {
                    let bound = std::f64::consts::FRAC_PI_2 / kappa.sqrt() - eps;
                    if *radius >= bound {
                        return Err(Error::InvalidParameter(format!(
                            "cap ball radius {radius} exceeds convexity bound {bound}"
                        )));
                    }
                }
                Ok(())
            }
            ConvexSet::Halfspace { normal, .. } => match s {
                ModelSpace::Euclidean { dim } if normal.len() == *dim => Ok(()),
                _ => Err(Error::Unsupported(
                    "halfspaces are only defined on Euclidean spaces".into(),
                )),
            },
            ConvexSet::Segment { a, b } => {
                if s.contains(a) && s.contains(b) {
                    Ok(())
                } else {
                    Err(Error::Domain("segment endpoint outside the space".into()))
                }
            }
            ConvexSet::Subtree { max_offsets } => match s {
                ModelSpace::StarTree { edge_lengths } if max_offsets.len() == edge_lengths.len() => {
                    if max_offsets.iter().zip(edge_lengths).all(|(m, l)| m <= l) {
                        Ok(())
                    } else {
                        Err(Error::InvalidParameter(
                            "subtree offset exceeds its edge length".into(),
                        ))
                    }
                }
                _ => Err(Error::Unsupported(
                    "subtrees are only defined on star trees".into(),
                )),
            },
        }
    }

    /// Membership up to the set tolerance.
    pub fn contains(&self, s: &ModelSpace, x: &Point) -> Result<bool> {
        match self {
            ConvexSet::Ball { center, radius } => Ok(s.distance(center, x)? <= radius + SET_TOL),
            ConvexSet::Halfspace { normal, offset } => match x {
                Point::Euclidean(v) => {
                    let dot: f64 = normal.iter().zip(v).map(|(n, c)| n * c).sum();
                    Ok(dot <= offset + SET_TOL)
                }
                _ => Err(Error::Domain("halfspace membership needs a Euclidean point".into())),
            },
            ConvexSet::Segment { .. } => {
                let pr = project(s, self, x)?;
                Ok(s.distance(&pr, x)? <= SET_TOL)
            }
            ConvexSet::Subtree { max_offsets } => match x {
                Point::Tree { edge, offset } => {
                    Ok(*offset <= max_offsets.get(*edge).copied().unwrap_or(0.0) + SET_TOL)
                }
                _ => Err(Error::Domain("subtree membership needs a tree point".into())),
            },
        }
    }

    /// Interior pull points used by the generic solvers.
    fn anchor_points(&self, s: &ModelSpace, at: &Point) -> Result<Vec<Point>> {
        Ok(match self {
            ConvexSet::Ball { center, .. } => vec![center.clone()],
            ConvexSet::Segment { a, b } => vec![a.clone(), b.clone()],
            ConvexSet::Subtree { .. } => vec![s.base_point()],
            ConvexSet::Halfspace { .. } => vec![project(s, self, at)?],
        })
    }
}

/// Metric projection onto a convex set.
pub fn project(s: &ModelSpace, set: &ConvexSet, x: &Point) -> Result<Point> {
    set.validate(s)?;
    if !s.contains(x) {
        return Err(Error::Domain("projection argument outside the space".into()));
    }
    match set {
        ConvexSet::Ball { center, radius } => {
            let d = s.distance(center, x)?;
            if d <= *radius {
                Ok(x.clone())
            } else {
                s.geodesic_point(center, x, radius / d)
            }
        }
        ConvexSet::Halfspace { normal, offset } => match x {
            Point::Euclidean(v) => {
                let dot: f64 = normal.iter().zip(v).map(|(n, c)| n * c).sum();
                let excess = dot - offset;
                if excess <= 0.0 {
                    Ok(x.clone())
                } else {
                    Ok(Point::Euclidean(
                        v.iter().zip(normal).map(|(c, n)| c - excess * n).collect(),
                    ))
                }
            }
            _ => Err(Error::Domain("halfspace projection needs a Euclidean point".into())),
        },
        ConvexSet::Segment { a, b } => {
            if let (ModelSpace::Euclidean { .. }, Point::Euclidean(va), Point::Euclidean(vb), Point::Euclidean(vx)) =
                (s, a, b, x)
            {
                // Closed form, cross-checked against the generic line search
                // in the tests.
                let mut num = 0.0;
                let mut den = 0.0;
                for i in 0..vx.len() {
                    num += (vx[i] - va[i]) * (vb[i] - va[i]);
                    den += (vb[i] - va[i]) * (vb[i] - va[i]);
                }
                let t = if den == 0.0 { 0.0 } else { (num / den).clamp(0.0, 1.0) };
                return s.geodesic_point(a, b, t);
            }
            let obj = |t: f64| s.distance_unchecked(x, &s.geodesic_unchecked(a, b, t));
            let (t, _) = solver::line_min(&obj, 0.0, 1.0);
            s.geodesic_point(a, b, t)
        }
        ConvexSet::Subtree { max_offsets } => match x {
            Point::Tree { edge, offset } => {
                let cap = max_offsets[*edge];
                if *offset <= cap {
                    Ok(x.clone())
                } else if cap > 0.0 {
                    Ok(Point::Tree { edge: *edge, offset: cap })
                } else {
                    // Nearest admissible point on any other edge is the hub.
                    Ok(s.base_point())
                }
            }
            _ => Err(Error::Domain("subtree projection needs a tree point".into())),
        },
    }
}

/// A proper, convex, lower semicontinuous function on a model space.
#[derive(Debug, Clone)]
pub enum ProperFunction {
    /// Indicator of a convex set: 0 on the set, +infinity outside.
    Indicator(ConvexSet),
    /// d(x, C)^power for power >= 1.
    DistPower { set: ConvexSet, power: f64 },
    /// (1/2) d(x, z)^2.
    SquaredDistanceTo(Point),
    /// Nonnegative combination of children. An empty list is the zero
    /// function.
    WeightedSum(Vec<(f64, ProperFunction)>),
}

impl ProperFunction {
    pub fn eval(&self, s: &ModelSpace, x: &Point) -> Result<f64> {
        match self {
            ProperFunction::Indicator(set) => {
                Ok(if set.contains(s, x)? { 0.0 } else { f64::INFINITY })
            }
            ProperFunction::DistPower { set, power } => {
                let pr = project(s, set, x)?;
                Ok(s.distance(&pr, x)?.powf(*power))
            }
            ProperFunction::SquaredDistanceTo(z) => Ok(0.5 * s.distance(x, z)?.powi(2)),
            ProperFunction::WeightedSum(children) => {
                let mut total = 0.0;
                for (w, f) in children {
                    total += w * f.eval(s, x)?;
                }
                Ok(total)
            }
        }
    }

    /// Points in whose direction the generic solver performs line searches.
    fn anchor_points(&self, s: &ModelSpace, at: &Point) -> Result<Vec<Point>> {
        Ok(match self {
            ProperFunction::Indicator(set) | ProperFunction::DistPower { set, .. } => {
                set.anchor_points(s, at)?
            }
            ProperFunction::SquaredDistanceTo(z) => vec![z.clone()],
            ProperFunction::WeightedSum(children) => {
                let mut out = Vec::new();
                for (_, f) in children {
                    out.extend(f.anchor_points(s, at)?);
                }
                out
            }
        })
    }

    fn contains_indicator(&self) -> bool {
        match self {
            ProperFunction::Indicator(_) => true,
            ProperFunction::WeightedSum(children) => {
                children.iter().any(|(_, f)| f.contains_indicator())
            }
            _ => false,
        }
    }
}

/// The p-proximal mapping: argmin_y f(y) + d(x,y)^p / (p lambda^(p-1)).
///
/// The minimizer exists and is unique for proper lsc convex f on the
/// complete model spaces; non-convergence of the numeric search is
/// reported, never silent.
pub fn prox_p(s: &ModelSpace, f: &ProperFunction, lambda: f64, x: &Point) -> Result<Point> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidParameter("prox parameter lambda must be > 0".into()));
    }
    if !s.contains(x) {
        return Err(Error::Domain("prox argument outside the space".into()));
    }
    let p = s.params().p;
    let scale = 1.0 / (p * lambda.powf(p - 1.0));
    match f {
        ProperFunction::Indicator(set) => prox_indicator(s, set, p, x),
        ProperFunction::SquaredDistanceTo(z) => prox_quadratic_segment(s, z, 1.0, lambda, p, x),
        ProperFunction::WeightedSum(children) if children.len() == 1 => {
            if let (w, ProperFunction::SquaredDistanceTo(z)) = (&children[0].0, &children[0].1) {
                return prox_quadratic_segment(s, z, *w, lambda, p, x);
            }
            prox_generic(s, f, scale, p, x)
        }
        ProperFunction::DistPower { set, power } => {
            set.validate(s)?;
            let foot = project(s, set, x)?;
            let big_d = s.distance(&foot, x)?;
            if big_d <= GEOM_TOL {
                return Ok(x.clone());
            }
            // Along the geodesic from x to its foot the projection foot is
            // shared, so the objective is one-dimensional.
            let obj = |t: f64| ((1.0 - t) * big_d).powf(*power) + scale * (t * big_d).powf(p);
            let (t, _) = solver::line_min(&obj, 0.0, 1.0);
            s.geodesic_point(x, &foot, t)
        }
        _ => prox_generic(s, f, scale, p, x),
    }
}

/// Constrained nearest-point search for indicator prox. Runs a genuine
/// one-dimensional numeric search so that agreement with [`project`] is a
/// meaningful consistency check.
fn prox_indicator(s: &ModelSpace, set: &ConvexSet, p: f64, x: &Point) -> Result<Point> {
    set.validate(s)?;
    if set.contains(s, x)? {
        return Ok(x.clone());
    }
    match set {
        ConvexSet::Ball { center, radius } => {
            let obj = |t: f64| {
                let z = s.geodesic_unchecked(center, x, t);
                if s.distance_unchecked(center, &z) <= radius + SET_TOL {
                    s.distance_unchecked(x, &z).powf(p)
                } else {
                    f64::INFINITY
                }
            };
            let (t, _) = solver::line_min(&obj, 0.0, 1.0);
            s.geodesic_point(center, x, t)
        }
        ConvexSet::Halfspace { normal, offset } => match x {
            Point::Euclidean(v) => {
                let dot: f64 = normal.iter().zip(v).map(|(n, c)| n * c).sum();
                let reach = 2.0 * (dot - offset).max(0.0) + 1.0;
                let obj = |t: f64| {
                    let d: f64 = dot - t;
                    if d <= offset + SET_TOL {
                        t.powf(p)
                    } else {
                        f64::INFINITY
                    }
                };
                let (t, _) = solver::line_min(&obj, 0.0, reach);
                Ok(Point::Euclidean(
                    v.iter().zip(normal).map(|(c, n)| c - t * n).collect(),
                ))
            }
            _ => Err(Error::Domain("halfspace prox needs a Euclidean point".into())),
        },
        ConvexSet::Segment { a, b } => {
            let obj = |t: f64| s.distance_unchecked(x, &s.geodesic_unchecked(a, b, t)).powf(p);
            let (t, _) = solver::line_min(&obj, 0.0, 1.0);
            s.geodesic_point(a, b, t)
        }
        ConvexSet::Subtree { .. } => project(s, set, x),
    }
}

/// Prox of w * (1/2) d(., z)^2. For p = 2 the minimizer is the geodesic
/// point at t = w lambda / (1 + w lambda); other exponents fall back to a
/// one-dimensional search along the segment [x, z].
fn prox_quadratic_segment(
    s: &ModelSpace,
    z: &Point,
    w: f64,
    lambda: f64,
    p: f64,
    x: &Point,
) -> Result<Point> {
    if !s.contains(z) {
        return Err(Error::Domain("quadratic center outside the space".into()));
    }
    if p == 2.0 {
        let t = w * lambda / (1.0 + w * lambda);
        return s.geodesic_point(x, z, t);
    }
    let big_d = s.distance(x, z)?;
    let scale = 1.0 / (p * lambda.powf(p - 1.0));
    let obj = |t: f64| 0.5 * w * ((1.0 - t) * big_d).powi(2) + scale * (t * big_d).powf(p);
    let (t, _) = solver::line_min(&obj, 0.0, 1.0);
    s.geodesic_point(x, z, t)
}

fn prox_generic(s: &ModelSpace, f: &ProperFunction, scale: f64, p: f64, x: &Point) -> Result<Point> {
    let mut anchors = vec![x.clone()];
    anchors.extend(f.anchor_points(s, x)?);
    let objective = |y: &Point| {
        f.eval(s, y).unwrap_or(f64::INFINITY) + scale * s.distance_unchecked(x, y).powf(p)
    };
    let start = if f.contains_indicator() && f.eval(s, x)?.is_infinite() {
        anchors
            .iter()
            .min_by(|a, b| objective(a).total_cmp(&objective(b)))
            .cloned()
            .unwrap()
    } else {
        x.clone()
    };
    solver::geodesic_argmin(s, &objective, &anchors, start, "prox")
}

/// Moreau–Yosida envelope f(prox(x)) + d(x, prox(x))^p / (p lambda^(p-1)).
pub fn moreau_envelope(s: &ModelSpace, f: &ProperFunction, lambda: f64, x: &Point) -> Result<f64> {
    let y = prox_p(s, f, lambda, x)?;
    let p = s.params().p;
    let mut fy = f.eval(s, &y)?;
    if fy.is_infinite() {
        // The prox result sits on an indicator boundary to solver accuracy.
        fy = 0.0;
    }
    Ok(fy + s.distance(x, &y)?.powf(p) / (p * lambda.powf(p - 1.0)))
}

/// Normalized convex-combination weights.
#[derive(Debug, Clone)]
pub struct Weights(Vec<f64>);

impl Weights {
    pub fn new(w: &[f64]) -> Result<Self> {
        if w.is_empty() {
            return Err(Error::InvalidParameter("weights must be nonempty".into()));
        }
        if w.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
            return Err(Error::InvalidParameter("weights must lie in [0,1]".into()));
        }
        let sum: f64 = w.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "weights must sum to 1, got {sum}"
            )));
        }
        Ok(Weights(w.to_vec()))
    }

    pub fn uniform(n: usize) -> Self {
        Weights(vec![1.0 / n as f64; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// p-barycenter: argmin_y sum_i w_i d(y, x_i)^p, solved by geodesic
/// coordinate descent with golden-section line searches.
pub fn barycenter(s: &ModelSpace, points: &[Point], weights: &Weights, p: f64) -> Result<Point> {
    let start = barycenter_start(s, points, weights, p)?;
    barycenter_from(s, points, weights, p, start)
}

/// Same as [`barycenter`] but from an explicit starting point; used to
/// confirm uniqueness by restart agreement.
pub fn barycenter_from(
    s: &ModelSpace,
    points: &[Point],
    weights: &Weights,
    p: f64,
    start: Point,
) -> Result<Point> {
    if points.len() != weights.0.len() {
        return Err(Error::InvalidParameter(
            "barycenter needs one weight per point".into(),
        ));
    }
    if !(p > 1.0) {
        return Err(Error::InvalidParameter("barycenter exponent must exceed 1".into()));
    }
    for q in points {
        if !s.contains(q) {
            return Err(Error::Domain("barycenter anchor outside the space".into()));
        }
    }
    // Zero-weight anchors are dropped before solving.
    let active: Vec<(f64, &Point)> = weights
        .0
        .iter()
        .zip(points)
        .filter(|(w, _)| **w > 0.0)
        .map(|(w, q)| (*w, q))
        .collect();
    if active.is_empty() {
        return Err(Error::InvalidParameter("all barycenter weights are zero".into()));
    }
    if active.len() == 1 {
        return Ok(active[0].1.clone());
    }
    let objective = |y: &Point| {
        active
            .iter()
            .map(|(w, q)| w * s.distance_unchecked(y, q).powf(p))
            .sum::<f64>()
    };
    let mut anchors: Vec<Point> = active.iter().map(|(_, q)| (*q).clone()).collect();
    // In flat space the inductive weighted mean is the exact minimizer, so
    // pulling toward it finishes in one sweep; the wide parabola fit keeps
    // line searches along short segments reliable there. On curved spaces
    // a pull point that close to the minimizer makes the line searches
    // noise-bound, so it only serves as a starting candidate in
    // [`barycenter`].
    if matches!(s, ModelSpace::Euclidean { .. }) {
        anchors.push(inductive_mean(s, &active));
    }
    solver::geodesic_argmin(s, &objective, &anchors, start, "barycenter")
}

fn barycenter_start(s: &ModelSpace, points: &[Point], weights: &Weights, p: f64) -> Result<Point> {
    if points.is_empty() {
        return Err(Error::InvalidParameter("barycenter needs at least one point".into()));
    }
    let objective = |y: &Point| {
        weights
            .0
            .iter()
            .zip(points)
            .map(|(w, q)| w * s.distance_unchecked(y, q).powf(p))
            .sum::<f64>()
    };
    let active: Vec<(f64, &Point)> = weights
        .0
        .iter()
        .zip(points)
        .filter(|(w, _)| **w > 0.0)
        .map(|(w, q)| (*w, q))
        .collect();
    let mut candidates: Vec<Point> = points.to_vec();
    // In flat space the inductive mean is the exact optimum; elsewhere the
    // default start stays on the anchors so that it approaches the
    // minimizer the same way restarted runs do.
    if !active.is_empty() && matches!(s, ModelSpace::Euclidean { .. }) {
        candidates.push(inductive_mean(s, &active));
    }
    Ok(candidates
        .into_iter()
        .min_by(|a, b| objective(a).total_cmp(&objective(b)))
        .unwrap())
}

/// Fold the anchors through successive geodesic averaging with running
/// weights; exact for the flat space, close elsewhere.
fn inductive_mean(s: &ModelSpace, active: &[(f64, &Point)]) -> Point {
    let mut mean = active[0].1.clone();
    let mut accum = active[0].0;
    for (w, q) in &active[1..] {
        mean = s.geodesic_unchecked(&mean, q, w / (accum + w));
        accum += w;
    }
    mean
}

/// Constant of the Krasnoselskii–Mann relaxation lambda T (+) (1-lambda) Id:
/// alpha = lambda^(p-1) / (1 - lambda + lambda^(p-1)).
pub fn km_alpha(lambda: f64, p: f64) -> f64 {
    let lp = lambda.powf(p - 1.0);
    lp / (1.0 - lambda + lp)
}

/// Composition constant of pointwise alpha-firm factors: with
/// k_i = (1 - a_i)/a_i, two factors carry
/// (k1 + k2) / ((c/2) k1 k2 + k1 + k2), iterated pairwise for longer lists.
pub fn composition_alpha(alphas: &[f64], c: f64) -> Result<f64> {
    if alphas.is_empty() {
        return Err(Error::InvalidParameter("composition of zero factors".into()));
    }
    for &a in alphas {
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "composition constants must lie in (0,1), got {a}"
            )));
        }
    }
    let kappa = |a: f64| (1.0 - a) / a;
    let mut bar_kappa = kappa(alphas[0]);
    let mut bar_alpha = alphas[0];
    for &a in &alphas[1..] {
        let k = kappa(a);
        bar_alpha = (bar_kappa + k) / (c / 2.0 * bar_kappa * k + bar_kappa + k);
        bar_kappa = kappa(bar_alpha);
    }
    Ok(bar_alpha)
}

/// An evaluable operator tree over a model space.
#[derive(Debug, Clone)]
pub enum Operator {
    Identity,
    Projector(ConvexSet),
    Prox { f: ProperFunction, lambda: f64 },
    /// lambda T (+) (1-lambda) Id, evaluated as the geodesic point from x
    /// toward Tx at parameter lambda.
    Km { inner: Box<Operator>, lambda: f64 },
    /// Factors applied in list order (the first entry acts first).
    Composition(Vec<Operator>),
    PCombination { ops: Vec<Operator>, weights: Weights },
}

impl Operator {
    pub fn projector(set: ConvexSet) -> Self {
        Operator::Projector(set)
    }

    pub fn prox(f: ProperFunction, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(Error::InvalidParameter("prox lambda must be > 0".into()));
        }
        Ok(Operator::Prox { f, lambda })
    }

    /// Krasnoselskii–Mann relaxation; lambda must lie strictly in (0,1).
    pub fn km(inner: Operator, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "relaxation parameter must lie in (0,1), got {lambda}"
            )));
        }
        Ok(Operator::Km {
            inner: Box::new(inner),
            lambda,
        })
    }

    /// Composition applying the factors in list order.
    pub fn compose(ops: Vec<Operator>) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::InvalidParameter("composition of an empty list".into()));
        }
        Ok(Operator::Composition(ops))
    }

    pub fn p_combination(ops: Vec<Operator>, weights: Weights) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::InvalidParameter("combination of an empty list".into()));
        }
        if ops.len() != weights.as_slice().len() {
            return Err(Error::InvalidParameter(
                "combination needs one weight per operator".into(),
            ));
        }
        Ok(Operator::PCombination { ops, weights })
    }
}

impl Mapping for Operator {
    fn apply(&self, s: &ModelSpace, x: &Point) -> Result<Point> {
        match self {
            Operator::Identity => Ok(x.clone()),
            Operator::Projector(set) => project(s, set, x),
            Operator::Prox { f, lambda } => prox_p(s, f, *lambda, x),
            Operator::Km { inner, lambda } => {
                let tx = inner.apply(s, x)?;
                s.geodesic_point(x, &tx, *lambda)
            }
            Operator::Composition(ops) => {
                let mut y = x.clone();
                for op in ops {
                    y = op.apply(s, &y)?;
                }
                Ok(y)
            }
            Operator::PCombination { ops, weights } => {
                let mut images = Vec::with_capacity(ops.len());
                for op in ops {
                    images.push(op.apply(s, x)?);
                }
                // All-but-one zero weight returns the surviving image exactly.
                let active: Vec<usize> = weights
                    .as_slice()
                    .iter()
                    .enumerate()
                    .filter(|(_, w)| **w > 0.0)
                    .map(|(i, _)| i)
                    .collect();
                if active.len() == 1 {
                    return Ok(images[active[0]].clone());
                }
                // Two-point combinations with p = 2 sit exactly on the
                // geodesic; this keeps operator evaluation at machine
                // precision.
                if active.len() == 2 && s.params().p == 2.0 {
                    let (i, j) = (active[0], active[1]);
                    let (wi, wj) = (weights.as_slice()[i], weights.as_slice()[j]);
                    return s.geodesic_point(&images[i], &images[j], wj / (wi + wj));
                }
                barycenter(s, &images, weights, s.params().p)
            }
        }
    }
}

pub(crate) mod solver {
    //! Golden-section line search with parabolic polish, and geodesic
    //! coordinate descent over a set of pull points.

    use super::*;

    const INVPHI: f64 = 0.618_033_988_749_894_9;
    /// Line searches allowed per argmin call.
    const BUDGET: usize = 10_000;

    /// Minimize a unimodal (convex, possibly +infinity) function on [a, b].
    /// The left endpoint must be finite. Returns (argmin, min).
    pub fn line_min<F: Fn(f64) -> f64>(f: &F, a0: f64, b0: f64) -> (f64, f64) {
        line_min_inner(f, a0, b0, false)
    }

    /// Line minimization for objectives known to be exactly quadratic
    /// along the segment (Euclidean geodesics): a wide-spacing parabola
    /// fit cuts the evaluation-noise floor by two orders of magnitude.
    pub fn line_min_quadratic<F: Fn(f64) -> f64>(f: &F, a0: f64, b0: f64) -> (f64, f64) {
        line_min_inner(f, a0, b0, true)
    }

    fn line_min_inner<F: Fn(f64) -> f64>(f: &F, a0: f64, b0: f64, quadratic: bool) -> (f64, f64) {
        let (mut a, mut b) = (a0, b0);
        let mut x1 = b - INVPHI * (b - a);
        let mut x2 = a + INVPHI * (b - a);
        let mut f1 = f(x1);
        let mut f2 = f(x2);
        for _ in 0..64 {
            if f1 <= f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - INVPHI * (b - a);
                f1 = f(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + INVPHI * (b - a);
                f2 = f(x2);
            }
        }
        let (mut tb, mut fb) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
        let fa0 = f(a0);
        if fa0 <= fb {
            tb = a0;
            fb = fa0;
        }
        // Parabolic polish: golden-section comparisons stall inside the
        // flat floor of a smooth minimum, so refit with a spacing that
        // stays clear of it. The triplet is clamped into the interval so
        // minima at or near the endpoints are refined too.
        let vertex = |h: f64| -> Option<f64> {
            let tc = tb.clamp(a0 + h, b0 - h);
            if !(h > 0.0) || tc - h < a0 || tc + h > b0 {
                return None;
            }
            let (fl, fm, fr) = (f(tc - h), f(tc), f(tc + h));
            let den = fl - 2.0 * fm + fr;
            if fl.is_finite() && fm.is_finite() && fr.is_finite() && den > 0.0 {
                Some((tc + 0.5 * h * (fl - fr) / den).clamp(a0, b0))
            } else {
                None
            }
        };
        // Wide spacings suffer less evaluation noise but pick up an h^2
        // curvature bias on non-quadratic objectives; Richardson
        // extrapolation over two spacings cancels it. Exactly quadratic
        // objectives (flat space) take the single wide fit. Rejected
        // vertices (kinked or constrained objectives) fall back to the
        // narrow fit and finally to the golden point.
        let base = b0 - a0;
        let mut candidates: Vec<f64> = Vec::new();
        if quadratic {
            candidates.extend(vertex(1e-2 * base));
        } else {
            let v1 = vertex(1e-3 * base);
            let v2 = vertex(2e-3 * base);
            if let (Some(a), Some(b)) = (v1, v2) {
                let richardson = (4.0 * a - b) / 3.0;
                if richardson.is_finite() {
                    candidates.push(richardson.clamp(a0, b0));
                }
            }
            candidates.extend(v1);
        }
        candidates.extend(vertex(1e-5 * base));
        for v in candidates {
            let fv = f(v);
            // The vertex is the analytically refined choice; accept it
            // whenever the measured value does not contradict that beyond
            // rounding noise.
            if fv.is_finite() && fv <= fb + 1e-12 * (1.0 + fb.abs()) {
                return (v, fv);
            }
        }
        (tb, fb)
    }

    /// Geodesic coordinate descent: repeatedly minimize the objective
    /// along the geodesics from the current point toward each anchor.
    /// After the per-sweep movement first drops below 1e-8, sweeps
    /// continue until it either falls below 1e-12, stops improving for
    /// several sweeps (the line-search noise floor), or a tail budget
    /// runs out. Exhausting the line-search budget is an error.
    pub fn geodesic_argmin(
        s: &ModelSpace,
        objective: &dyn Fn(&Point) -> f64,
        anchors: &[Point],
        start: Point,
        what: &str,
    ) -> Result<Point> {
        let mut y = start;
        let mut searches = 0usize;
        let mut history: Vec<f64> = Vec::new();
        // Straight-line sections of the solved objectives are exact
        // parabolas in flat space.
        let flat = matches!(s, ModelSpace::Euclidean { .. });
        loop {
            let mut moved = 0.0;
            for a in anchors {
                if s.distance_unchecked(&y, a) <= 1e-14 {
                    continue;
                }
                let obj = |t: f64| objective(&s.geodesic_unchecked(&y, a, t));
                let (t, _) = if flat {
                    line_min_quadratic(&obj, 0.0, 1.0)
                } else {
                    line_min(&obj, 0.0, 1.0)
                };
                searches += 1;
                if t > 0.0 {
                    let z = s.geodesic_unchecked(&y, a, t);
                    moved += s.distance_unchecked(&y, &z);
                    y = z;
                }
            }
            if moved < 1e-12 {
                return Ok(y);
            }
            // Stop once the per-sweep movement is small and has stopped
            // trending down across two blocks of sweeps (the line-search
            // noise floor); a contracting iteration keeps improving block
            // over block until it gets there.
            history.push(moved);
            let n = history.len();
            if n >= 12 && history[n - 12..].iter().all(|m| *m < 1e-7) {
                let block_min = |sl: &[f64]| sl.iter().cloned().fold(f64::INFINITY, f64::min);
                let recent = block_min(&history[n - 6..]);
                let older = block_min(&history[n - 12..n - 6]);
                if recent >= 0.85 * older {
                    return Ok(y);
                }
            }
            if searches >= BUDGET {
                return Err(Error::SolverFailure {
                    what: what.into(),
                    iterations: searches,
                });
            }
        }
    }
}
