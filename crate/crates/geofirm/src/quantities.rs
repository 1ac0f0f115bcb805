//! Regularity functionals and pointwise firmness certificates.
//!
//! The central objects are the transport discrepancy `psi`, the four-point
//! quantity `Delta`, and the pointwise almost alpha-firm inequality
//!
//! ```text
//! d(Tx, Ty)^p <= (1 + eps) d(x, y)^p - ((1 - alpha)/alpha) psi_T(x, y)
//! ```
//!
//! checked over explicit sample sets and reported as certificates.

use crate::error::{Error, Result};
use crate::spaces::{ModelSpace, Point, SLACK_TOL};

/// Membership threshold for "y is a fixed point of T".
pub const FIXED_POINT_TOL: f64 = 1e-10;

/// A single-valued self-map of a model space.
pub trait Mapping {
    fn apply(&self, space: &ModelSpace, x: &Point) -> Result<Point>;
}

/// Wrap a closure as a [`Mapping`].
pub struct FnMap<F>(pub F);

impl<F> Mapping for FnMap<F>
where
    F: Fn(&ModelSpace, &Point) -> Result<Point>,
{
    fn apply(&self, space: &ModelSpace, x: &Point) -> Result<Point> {
        (self.0)(space, x)
    }
}

impl<M: Mapping + ?Sized> Mapping for &M {
    fn apply(&self, space: &ModelSpace, x: &Point) -> Result<Point> {
        (**self).apply(space, x)
    }
}

/// Outcome of checking the firmness inequality at an anchor point over a
/// sample set: the (alpha, eps) pair together with the evidence.
#[derive(Debug, Clone)]
pub struct FirmnessCertificate {
    pub alpha: f64,
    pub epsilon: f64,
    pub anchor: Point,
    pub sample_count: usize,
    pub worst_slack: f64,
}

impl FirmnessCertificate {
    /// Valid iff the worst sampled slack stays above the slack tolerance.
    pub fn valid(&self) -> bool {
        self.worst_slack >= SLACK_TOL
    }

    /// CSV row: alpha, epsilon, worst_slack, n_samples.
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{}",
            self.alpha, self.epsilon, self.worst_slack, self.sample_count
        )
    }
}

fn check_alpha_eps(alpha: f64, epsilon: f64) -> Result<()> {
    // alpha = 1 is admitted and read as plain nonexpansiveness.
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must lie in (0,1], got {alpha}"
        )));
    }
    if !(epsilon >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be nonnegative, got {epsilon}"
        )));
    }
    Ok(())
}

/// Transport discrepancy of T at the pair (x, y):
///
/// (c/2) (d(Tx,x)^p + d(Ty,y)^p + d(Tx,Ty)^p + d(x,y)^p - d(Tx,y)^p - d(x,Ty)^p).
pub fn psi<T: Mapping + ?Sized>(s: &ModelSpace, t: &T, x: &Point, y: &Point) -> Result<f64> {
    let params = s.params();
    let (p, c) = (params.p, params.c);
    let tx = t.apply(s, x)?;
    let ty = t.apply(s, y)?;
    let sum = s.distance(&tx, x)?.powf(p) + s.distance(&ty, y)?.powf(p)
        + s.distance(&tx, &ty)?.powf(p)
        + s.distance(x, y)?.powf(p)
        - s.distance(&tx, y)?.powf(p)
        - s.distance(x, &ty)?.powf(p);
    Ok(c / 2.0 * sum)
}

/// Four-point quantity (c/4)(d(x,v)^p + d(y,u)^p - d(x,u)^p - d(y,v)^p).
///
/// For p = c = 2 in a Euclidean space this equals the inner product
/// of x - y with u - v.
pub fn delta(s: &ModelSpace, x: &Point, y: &Point, u: &Point, v: &Point) -> Result<f64> {
    let params = s.params();
    let (p, c) = (params.p, params.c);
    Ok(c / 4.0
        * (s.distance(x, v)?.powf(p) + s.distance(y, u)?.powf(p)
            - s.distance(x, u)?.powf(p)
            - s.distance(y, v)?.powf(p)))
}

/// Delta specialized to u = Tx, v = Ty.
pub fn delta_t<T: Mapping + ?Sized>(s: &ModelSpace, t: &T, x: &Point, y: &Point) -> Result<f64> {
    let tx = t.apply(s, x)?;
    let ty = t.apply(s, y)?;
    delta(s, x, y, &tx, &ty)
}

/// Absolute defect of the algebraic identity
/// psi = (c/2)(d(Tx,Ty)^p + d(x,y)^p) - 2 Delta_T. Should stay below 1e-9.
pub fn psi_delta_identity_slack<T: Mapping + ?Sized>(
    s: &ModelSpace,
    t: &T,
    x: &Point,
    y: &Point,
) -> Result<f64> {
    let params = s.params();
    let (p, c) = (params.p, params.c);
    let tx = t.apply(s, x)?;
    let ty = t.apply(s, y)?;
    let lhs = psi(s, t, x, y)?;
    let rhs = c / 2.0 * (s.distance(&tx, &ty)?.powf(p) + s.distance(x, y)?.powf(p))
        - 2.0 * delta(s, x, y, &tx, &ty)?;
    Ok((lhs - rhs).abs())
}

/// Check the firmness inequality at anchor `y` over the samples.
///
/// The slack of a sample x is RHS - LHS of the inequality; the
/// certificate's `worst_slack` is the minimum over all samples.
pub fn check_pafne<T: Mapping + ?Sized>(
    s: &ModelSpace,
    t: &T,
    y: &Point,
    alpha: f64,
    epsilon: f64,
    samples: &[Point],
) -> Result<FirmnessCertificate> {
    check_alpha_eps(alpha, epsilon)?;
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    let p = s.params().p;
    let kappa = (1.0 - alpha) / alpha;
    let ty = t.apply(s, y)?;
    let mut worst = f64::INFINITY;
    for x in samples {
        let tx = t.apply(s, x)?;
        let lhs = s.distance(&tx, &ty)?.powf(p);
        let rhs = (1.0 + epsilon) * s.distance(x, y)?.powf(p) - kappa * psi(s, t, x, y)?;
        worst = worst.min(rhs - lhs);
    }
    Ok(FirmnessCertificate {
        alpha,
        epsilon,
        anchor: y.clone(),
        sample_count: samples.len(),
        worst_slack: worst,
    })
}

/// Equivalent characterization through the four-point quantity:
///
/// (alpha + (1-alpha) c/2) d(Tx,Ty)^p + ((1-alpha) c/2 - alpha (1+eps)) d(x,y)^p
///   <= 2 (1-alpha) Delta_T(x,y).
///
/// The per-sample slack equals alpha times the slack of [`check_pafne`],
/// so the two verdicts agree on identical inputs.
pub fn check_pafne_delta_form<T: Mapping + ?Sized>(
    s: &ModelSpace,
    t: &T,
    y: &Point,
    alpha: f64,
    epsilon: f64,
    samples: &[Point],
) -> Result<FirmnessCertificate> {
    check_alpha_eps(alpha, epsilon)?;
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    let params = s.params();
    let (p, c) = (params.p, params.c);
    let ty = t.apply(s, y)?;
    let mut worst = f64::INFINITY;
    for x in samples {
        let tx = t.apply(s, x)?;
        let dtt = s.distance(&tx, &ty)?.powf(p);
        let dxy = s.distance(x, y)?.powf(p);
        let dt = delta(s, x, y, &tx, &ty)?;
        let lhs = (alpha + (1.0 - alpha) * c / 2.0) * dtt
            + ((1.0 - alpha) * c / 2.0 - alpha * (1.0 + epsilon)) * dxy;
        let rhs = 2.0 * (1.0 - alpha) * dt;
        // Normalize by alpha so the slack scale matches check_pafne.
        worst = worst.min((rhs - lhs) / alpha);
    }
    Ok(FirmnessCertificate {
        alpha,
        epsilon,
        anchor: y.clone(),
        sample_count: samples.len(),
        worst_slack: worst,
    })
}

/// Smallest alpha in (0,1) for which the inequality holds with eps = 0
/// over the samples, found by bisection to absolute tolerance 1e-6.
/// Returns `None` when even alpha -> 1 fails (the map is not pointwise
/// nonexpansive at y over the samples).
pub fn estimate_alpha<T: Mapping + ?Sized>(
    s: &ModelSpace,
    t: &T,
    y: &Point,
    samples: &[Point],
) -> Result<Option<f64>> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    let valid = |alpha: f64| -> Result<bool> {
        Ok(check_pafne(s, t, y, alpha, 0.0, samples)?.valid())
    };
    if !valid(1.0)? {
        return Ok(None);
    }
    let mut lo = 0.0_f64; // conventionally invalid
    let mut hi = 1.0_f64;
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        if valid(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

/// Property (P1) at a fixed point y:
/// d(Tx,y)^p <= d(x,y)^p - ((1-alpha)/alpha)(c/2) d(Tx,x)^p.
///
/// Errors unless d(Ty, y) <= 1e-10.
pub fn check_p1<T: Mapping + ?Sized>(
    s: &ModelSpace,
    t: &T,
    y: &Point,
    alpha: f64,
    samples: &[Point],
) -> Result<bool> {
    check_alpha_eps(alpha, 0.0)?;
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    let ty = t.apply(s, y)?;
    let residual = s.distance(&ty, y)?;
    if residual > FIXED_POINT_TOL {
        return Err(Error::NotFixed { residual });
    }
    let params = s.params();
    let (p, c) = (params.p, params.c);
    let kappa = (1.0 - alpha) / alpha;
    for x in samples {
        let tx = t.apply(s, x)?;
        let lhs = s.distance(&tx, y)?.powf(p);
        let rhs = s.distance(x, y)?.powf(p) - kappa * c / 2.0 * s.distance(&tx, x)?.powf(p);
        if rhs - lhs < SLACK_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

/// True iff t -> d((1-t)x (+) t Tx, (1-t)y (+) t Ty) is nonincreasing on a
/// uniform grid over [0, 1]. Only defined on the CAT(0) members.
pub fn check_phi_monotone<T: Mapping + ?Sized>(
    s: &ModelSpace,
    t: &T,
    x: &Point,
    y: &Point,
    lambda_grid: usize,
) -> Result<bool> {
    if !s.is_cat0() {
        return Err(Error::Unsupported(
            "phi monotonicity is only checked on CAT(0) model spaces".into(),
        ));
    }
    if lambda_grid < 2 {
        return Err(Error::InvalidParameter("grid needs at least 2 nodes".into()));
    }
    let tx = t.apply(s, x)?;
    let ty = t.apply(s, y)?;
    let phi = |lam: f64| -> Result<f64> {
        let a = s.geodesic_point(x, &tx, lam)?;
        let b = s.geodesic_point(y, &ty, lam)?;
        s.distance(&a, &b)
    };
    let mut prev = phi(0.0)?;
    for i in 1..=lambda_grid {
        let lam = i as f64 / lambda_grid as f64;
        let cur = phi(lam)?;
        if cur > prev + 1e-9 {
            return Ok(false);
        }
        prev = cur;
    }
    Ok(true)
}

/// The surrogate residual ((2/c) inf_{y in S} psi_T(x, y))^{1/p}.
///
/// Infinite when S is empty; equals d(Tx, x) whenever S consists of
/// fixed points of T.
pub fn surrogate<T: Mapping + ?Sized>(
    s: &ModelSpace,
    t: &T,
    fixed_set: &[Point],
    x: &Point,
) -> Result<f64> {
    if fixed_set.is_empty() {
        return Ok(f64::INFINITY);
    }
    let params = s.params();
    let mut inf = f64::INFINITY;
    for y in fixed_set {
        inf = inf.min(psi(s, t, x, y)?);
    }
    Ok((2.0 / params.c * inf).max(0.0).powf(1.0 / params.p))
}
