//! Fixed-point iteration drivers with full trace capture.
//!
//! All three splitting schemes reduce to [`iterate`] on a composed
//! operator: cyclic projections composes projectors, proximal splitting
//! composes p-proximal mappings, and metric projected gradients composes a
//! relaxed prox step with a projection.

use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::operators::{ConvexSet, Operator, ProperFunction};
use crate::quantities::Mapping;
use crate::spaces::{ModelSpace, Point};

/// Why an iteration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    ResidualTol,
    TargetReached,
    MaxIters,
}

impl StopReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            StopReason::ResidualTol => "residual_tol",
            StopReason::TargetReached => "target_reached",
            StopReason::MaxIters => "max_iters",
        }
    }
}

/// Stopping rule; at least one bound must be finite.
#[derive(Debug, Clone)]
pub struct StopRule {
    pub residual_tol: Option<f64>,
    pub max_iters: Option<usize>,
    /// Stop once the distance to this finite target set drops below the
    /// tolerance.
    pub target: Option<(Vec<Point>, f64)>,
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule {
            residual_tol: Some(1e-10),
            max_iters: Some(100_000),
            target: None,
        }
    }
}

impl StopRule {
    pub fn residual(tol: f64, max_iters: usize) -> Self {
        StopRule {
            residual_tol: Some(tol),
            max_iters: Some(max_iters),
            target: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.residual_tol.is_none() && self.max_iters.is_none() && self.target.is_none() {
            return Err(Error::InvalidParameter(
                "stop rule needs at least one finite bound".into(),
            ));
        }
        Ok(())
    }
}

/// Full iterate history of a fixed-point run.
#[derive(Debug, Clone)]
pub struct Trace {
    pub iterates: Vec<Point>,
    /// residuals[k] = d(x_k, x_{k+1}); one shorter than `iterates`.
    pub residuals: Vec<f64>,
    /// Distances d(x_k, S) to a finite approximation of the fixed set,
    /// aligned with `iterates` when present.
    pub dist_to_fix: Option<Vec<f64>>,
    pub wall_clock: Duration,
    pub stop_reason: StopReason,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.iterates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.iterates.is_empty()
    }

    pub fn final_point(&self) -> &Point {
        self.iterates.last().expect("trace holds at least x0")
    }

    pub fn final_residual(&self) -> f64 {
        self.residuals.last().copied().unwrap_or(0.0)
    }

    /// Fill `dist_to_fix` against a finite fixed-set approximation.
    pub fn compute_dist_to_fix(&mut self, s: &ModelSpace, targets: &[Point]) -> Result<()> {
        let mut out = Vec::with_capacity(self.iterates.len());
        for x in &self.iterates {
            let mut best = f64::INFINITY;
            for t in targets {
                best = best.min(s.distance(x, t)?);
            }
            out.push(best);
        }
        self.dist_to_fix = Some(out);
        Ok(())
    }

    /// CSV serialization: iter, residual, dist_to_fix, coordinates.
    /// Floats print in Rust's shortest round-trip form (at most 17
    /// significant digits), so identical runs are byte-identical.
    pub fn to_csv(&self) -> String {
        let width = self
            .iterates
            .first()
            .map(|p| p.coords().len())
            .unwrap_or(0);
        let mut out = String::from("iter,residual,dist_to_fix");
        for i in 0..width {
            out.push_str(&format!(",c{i}"));
        }
        out.push('\n');
        for (k, x) in self.iterates.iter().enumerate() {
            let residual = self
                .residuals
                .get(k)
                .map(|r| format!("{r}"))
                .unwrap_or_default();
            let dist = self
                .dist_to_fix
                .as_ref()
                .and_then(|d| d.get(k))
                .map(|v| format!("{v}"))
                .unwrap_or_default();
            out.push_str(&format!("{k},{residual},{dist}"));
            for c in x.coords() {
                out.push_str(&format!(",{c}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Drive x_{k+1} = T x_k from x0 until the stop rule fires.
pub fn iterate<T: Mapping + ?Sized>(
    s: &ModelSpace,
    op: &T,
    x0: &Point,
    rule: &StopRule,
) -> Result<Trace> {
    rule.validate()?;
    if !s.contains(x0) {
        return Err(Error::Domain("starting point outside the space".into()));
    }
    let started = Instant::now();
    let mut iterates = vec![x0.clone()];
    let mut residuals = Vec::new();
    let stop_reason;
    let mut k = 0usize;
    loop {
        let x = iterates.last().unwrap();
        let next = op.apply(s, x).map_err(|e| Error::SolverFailure {
            what: format!("operator evaluation at iteration {k}: {e}"),
            iterations: k,
        })?;
        let r = s.distance(x, &next)?;
        residuals.push(r);
        iterates.push(next);
        k += 1;
        if let Some(tol) = rule.residual_tol {
            if r <= tol {
                stop_reason = StopReason::ResidualTol;
                break;
            }
        }
        if let Some((targets, tol)) = &rule.target {
            let x = iterates.last().unwrap();
            let mut best = f64::INFINITY;
            for t in targets {
                best = best.min(s.distance(x, t)?);
            }
            if best <= *tol {
                stop_reason = StopReason::TargetReached;
                break;
            }
        }
        if let Some(max) = rule.max_iters {
            if k >= max {
                stop_reason = StopReason::MaxIters;
                break;
            }
        }
    }
    Ok(Trace {
        iterates,
        residuals,
        dist_to_fix: None,
        wall_clock: started.elapsed(),
        stop_reason,
    })
}

/// The composed cyclic-projections operator P_{C_N} ... P_{C_1}.
pub fn cyclic_projections_operator(sets: &[ConvexSet]) -> Result<Operator> {
    if sets.is_empty() {
        return Err(Error::InvalidParameter("cyclic projections needs sets".into()));
    }
    Operator::compose(sets.iter().cloned().map(Operator::projector).collect())
}

/// Cyclic projections: one iteration applies every projector in order.
pub fn cyclic_projections(
    s: &ModelSpace,
    sets: &[ConvexSet],
    x0: &Point,
    rule: &StopRule,
) -> Result<Trace> {
    iterate(s, &cyclic_projections_operator(sets)?, x0, rule)
}

/// The composed splitting operator prox_{f_N} ... prox_{f_1}.
pub fn proximal_splitting_operator(fs: &[ProperFunction], lambdas: &[f64]) -> Result<Operator> {
    if fs.is_empty() || fs.len() != lambdas.len() {
        return Err(Error::InvalidParameter(
            "proximal splitting needs one lambda per function".into(),
        ));
    }
    let mut ops = Vec::with_capacity(fs.len());
    for (f, lam) in fs.iter().zip(lambdas) {
        ops.push(Operator::prox(f.clone(), *lam)?);
    }
    Operator::compose(ops)
}

/// Proximal splitting: one iteration applies prox_{f_i, lambda_i} in order.
pub fn proximal_splitting(
    s: &ModelSpace,
    fs: &[ProperFunction],
    lambdas: &[f64],
    x0: &Point,
    rule: &StopRule,
) -> Result<Trace> {
    iterate(s, &proximal_splitting_operator(fs, lambdas)?, x0, rule)
}

/// The projected-gradient operator P_C((1-tau) Id (+) tau prox_{f,lambda}).
/// Stated for the CAT(0) members only.
pub fn projected_gradient_operator(
    s: &ModelSpace,
    f: &ProperFunction,
    set: &ConvexSet,
    lambda: f64,
    tau: f64,
) -> Result<Operator> {
    if !s.is_cat0() {
        return Err(Error::Unsupported(
            "projected gradients is stated for CAT(0) model spaces".into(),
        ));
    }
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::InvalidParameter("step tau must lie in (0,1)".into()));
    }
    let relaxed = Operator::km(Operator::prox(f.clone(), lambda)?, tau)?;
    Operator::compose(vec![relaxed, Operator::projector(set.clone())])
}

/// Metric projected gradients: x_{k+1} = P_C((1-tau) x (+) tau prox_{f,lambda}(x)).
pub fn projected_gradient(
    s: &ModelSpace,
    f: &ProperFunction,
    set: &ConvexSet,
    lambda: f64,
    tau: f64,
    x0: &Point,
    rule: &StopRule,
) -> Result<Trace> {
    iterate(s, &projected_gradient_operator(s, f, set, lambda, tau)?, x0, rule)
}

/// Summary of the residual sequence of a trace.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularityProfile {
    /// Largest iteration index whose residual still exceeds the tolerance.
    pub last_above_tol: Option<usize>,
    pub nonincreasing: bool,
    pub first_nondecrease: Option<usize>,
}

/// Asymptotic-regularity diagnostics: where residuals last exceeded `tol`
/// and whether they decrease monotonically.
pub fn asymptotic_regularity_profile(trace: &Trace, tol: f64) -> RegularityProfile {
    let rs = &trace.residuals;
    let last_above_tol = rs.iter().rposition(|&r| r > tol);
    let first_nondecrease = rs.windows(2).position(|w| w[1] > w[0]);
    RegularityProfile {
        last_above_tol,
        nonincreasing: first_nondecrease.is_none(),
        first_nondecrease,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::Weights;
    use crate::spaces::Region;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    struct Scale(f64);
    impl Mapping for Scale {
        fn apply(&self, _s: &ModelSpace, x: &Point) -> Result<Point> {
            match x {
                Point::Euclidean(v) => Ok(Point::Euclidean(v.iter().map(|c| self.0 * c).collect())),
                _ => Err(Error::Domain("scale map is Euclidean-only".into())),
            }
        }
    }

    fn e2() -> ModelSpace {
        ModelSpace::euclidean(2)
    }

    #[test]
    fn identity_stops_immediately() {
        let s = e2();
        let x0 = Point::euclidean(&[0.4, -0.1]);
        let tr = iterate(&s, &Operator::Identity, &x0, &StopRule::default()).unwrap();
        assert_eq!(tr.len(), 2);
        assert_eq!(tr.residuals, vec![0.0]);
        assert_eq!(tr.stop_reason, StopReason::ResidualTol);
    }

    #[test]
    fn halving_map_residuals_geometric() {
        let s = ModelSpace::euclidean(1);
        let x0 = Point::euclidean(&[1.0]);
        let tr = iterate(&s, &Scale(0.5), &x0, &StopRule::residual(1e-6, 1000)).unwrap();
        assert!((tr.residuals[0] - 0.5).abs() < 1e-15);
        assert!((tr.residuals[1] - 0.25).abs() < 1e-15);
        let profile = asymptotic_regularity_profile(&tr, 1e-6);
        assert!(profile.nonincreasing);
        assert_eq!(tr.stop_reason, StopReason::ResidualTol);
    }

    #[test]
    fn trace_invariants_and_dist_to_fix() {
        let s = ModelSpace::euclidean(1);
        let x0 = Point::euclidean(&[1.0]);
        let mut tr = iterate(&s, &Scale(0.5), &x0, &StopRule::residual(1e-8, 100)).unwrap();
        assert_eq!(tr.residuals.len(), tr.iterates.len() - 1);
        tr.compute_dist_to_fix(&s, &[Point::euclidean(&[0.0])]).unwrap();
        let d = tr.dist_to_fix.as_ref().unwrap();
        assert_eq!(d.len(), tr.iterates.len());
        assert!((d[0] - 1.0).abs() < 1e-15);
        assert!((d[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn cyclic_projections_two_disk_balls() {
        let s = ModelSpace::poincare_disk();
        let b1 = ConvexSet::ball(Point::disk(-0.2, 0.0), 0.6).unwrap();
        let b2 = ConvexSet::ball(Point::disk(0.2, 0.0), 0.6).unwrap();
        let x0 = Point::disk(0.1, 0.7);
        let tr = cyclic_projections(
            &s,
            &[b1.clone(), b2.clone()],
            &x0,
            &StopRule::residual(1e-10, 100_000),
        )
        .unwrap();
        assert!(tr.final_residual() < 1e-8);
        let limit = tr.final_point();
        let p1 = crate::operators::project(&s, &b1, limit).unwrap();
        let p2 = crate::operators::project(&s, &b2, limit).unwrap();
        assert!(s.distance(&p1, limit).unwrap() < 1e-6);
        assert!(s.distance(&p2, limit).unwrap() < 1e-6);
    }

    #[test]
    fn cyclic_projections_fixed_at_intersection() {
        let s = e2();
        let h1 = ConvexSet::halfspace(&[1.0, 0.0], 0.0).unwrap();
        let h2 = ConvexSet::halfspace(&[0.0, 1.0], 0.0).unwrap();
        let x0 = Point::euclidean(&[-0.5, -0.5]);
        let tr = cyclic_projections(&s, &[h1, h2], &x0, &StopRule::default()).unwrap();
        assert_eq!(tr.len(), 2);
        assert!(tr.final_residual() == 0.0);
    }

    #[test]
    fn cyclic_projections_halfplanes_limit_in_both() {
        // Two halfplanes whose boundary normals meet at an acute wedge force
        // an infinite linear tail into the corner.
        let s = e2();
        let ang: f64 = 0.4;
        let h1 = ConvexSet::halfspace(&[0.0, 1.0], 0.0).unwrap();
        let h2 = ConvexSet::halfspace(&[-ang.sin(), ang.cos()], 0.0).unwrap();
        let x0 = Point::euclidean(&[1.0, 1.0]);
        let tr = cyclic_projections(
            &s,
            &[h1.clone(), h2.clone()],
            &x0,
            &StopRule::residual(1e-10, 100_000),
        )
        .unwrap();
        let limit = tr.final_point();
        for set in [&h1, &h2] {
            let pr = crate::operators::project(&s, set, limit).unwrap();
            assert!(s.distance(&pr, limit).unwrap() < 1e-6);
        }
        // Fejér monotonicity toward a point of the intersection.
        let y = Point::euclidean(&[-1.0, -1.0]);
        for w in tr.iterates.windows(2) {
            let d0 = s.distance(&w[0], &y).unwrap();
            let d1 = s.distance(&w[1], &y).unwrap();
            assert!(d1 <= d0 + 1e-9);
        }
    }

    #[test]
    fn proximal_splitting_two_quadratics_closed_form() {
        // T(x) = ((x + a)/2 + b)/2 has the unique fixed point (a + 2 b)/3.
        let s = e2();
        let a = Point::euclidean(&[1.0, 0.0]);
        let b = Point::euclidean(&[-1.0, 2.0]);
        let fs = vec![
            ProperFunction::SquaredDistanceTo(a.clone()),
            ProperFunction::SquaredDistanceTo(b.clone()),
        ];
        let x0 = Point::euclidean(&[3.0, 3.0]);
        let tr = proximal_splitting(&s, &fs, &[1.0, 1.0], &x0, &StopRule::residual(1e-12, 10_000))
            .unwrap();
        let expect = Point::euclidean(&[-1.0 / 3.0, 4.0 / 3.0]);
        assert!(s.distance(tr.final_point(), &expect).unwrap() < 1e-8);
    }

    #[test]
    fn proximal_splitting_stationary_at_common_argmin() {
        let s = e2();
        let a = Point::euclidean(&[0.7, -0.3]);
        let fs = vec![
            ProperFunction::SquaredDistanceTo(a.clone()),
            ProperFunction::SquaredDistanceTo(a.clone()),
        ];
        let tr = proximal_splitting(&s, &fs, &[0.5, 2.0], &a, &StopRule::default()).unwrap();
        assert_eq!(tr.len(), 2);
        assert!(tr.final_residual() < 1e-12);
    }

    #[test]
    fn proximal_splitting_of_indicators_matches_cyclic_projections() {
        let s = ModelSpace::poincare_disk();
        let b1 = ConvexSet::ball(Point::disk(-0.2, 0.1), 0.5).unwrap();
        let b2 = ConvexSet::ball(Point::disk(0.25, 0.0), 0.5).unwrap();
        let x0 = Point::disk(0.0, 0.6);
        let rule = StopRule::residual(1e-9, 200);
        let tr_cp = cyclic_projections(&s, &[b1.clone(), b2.clone()], &x0, &rule).unwrap();
        let fs = vec![
            ProperFunction::Indicator(b1),
            ProperFunction::Indicator(b2),
        ];
        let tr_ps = proximal_splitting(&s, &fs, &[1.0, 1.0], &x0, &rule).unwrap();
        assert_eq!(tr_cp.len(), tr_ps.len());
        for (a, b) in tr_cp.iterates.iter().zip(&tr_ps.iterates) {
            assert!(s.distance(a, b).unwrap() < 1e-7);
        }
    }

    #[test]
    fn projected_gradient_constrained_quadratic() {
        // min (1/2)|x - z|^2 over the halfplane y <= 0 with z outside:
        // the limit is the KKT point P_C(z).
        let s = e2();
        let z = Point::euclidean(&[0.8, 1.5]);
        let f = ProperFunction::SquaredDistanceTo(z.clone());
        let set = ConvexSet::halfspace(&[0.0, 1.0], 0.0).unwrap();
        let x0 = Point::euclidean(&[-2.0, -1.0]);
        let tr =
            projected_gradient(&s, &f, &set, 1.0, 0.5, &x0, &StopRule::residual(1e-12, 50_000))
                .unwrap();
        let expect = Point::euclidean(&[0.8, 0.0]);
        assert!(s.distance(tr.final_point(), &expect).unwrap() < 1e-6);
        // Stationarity at the solution.
        let tr2 = projected_gradient(&s, &f, &set, 1.0, 0.5, &expect, &StopRule::default()).unwrap();
        assert_eq!(tr2.len(), 2);
        assert!(tr2.final_residual() < 1e-10);
    }

    #[test]
    fn projected_gradient_zero_function_reduces_to_projection() {
        let s = e2();
        let f = ProperFunction::WeightedSum(vec![]);
        let set = ConvexSet::ball(Point::euclidean(&[0.0, 0.0]), 1.0).unwrap();
        let x0 = Point::euclidean(&[3.0, 0.0]);
        let tr = projected_gradient(&s, &f, &set, 1.0, 0.3, &x0, &StopRule::default()).unwrap();
        // After the first step the iterate is inside C and stays put.
        assert!(tr.len() <= 3);
        let pr = crate::operators::project(&s, &set, tr.final_point()).unwrap();
        assert!(s.distance(&pr, tr.final_point()).unwrap() < 1e-10);
    }

    #[test]
    fn projected_gradient_rejects_positive_curvature() {
        let cap = ModelSpace::spherical_cap(1.0, 0.3).unwrap();
        let f = ProperFunction::WeightedSum(vec![]);
        let set = ConvexSet::ball(cap.base_point(), 0.2).unwrap();
        let err = projected_gradient(&cap, &f, &set, 1.0, 0.5, &cap.base_point(), &StopRule::default());
        assert!(matches!(err, Err(Error::Unsupported(_))));
    }

    #[test]
    fn profile_flags_stall() {
        let tr = Trace {
            iterates: vec![
                Point::euclidean(&[0.0]),
                Point::euclidean(&[1.0]),
                Point::euclidean(&[1.5]),
                Point::euclidean(&[2.5]),
            ],
            residuals: vec![1.0, 0.5, 1.0],
            dist_to_fix: None,
            wall_clock: Duration::default(),
            stop_reason: StopReason::MaxIters,
        };
        let p = asymptotic_regularity_profile(&tr, 1e-6);
        assert!(!p.nonincreasing);
        assert_eq!(p.first_nondecrease, Some(1));
        assert_eq!(p.last_above_tol, Some(2));
    }

    #[test]
    fn stop_rule_must_bound_something() {
        let rule = StopRule {
            residual_tol: None,
            max_iters: None,
            target: None,
        };
        let s = e2();
        assert!(iterate(&s, &Operator::Identity, &Point::euclidean(&[0.0, 0.0]), &rule).is_err());
    }

    #[test]
    fn target_stop_fires() {
        let s = ModelSpace::euclidean(1);
        let rule = StopRule {
            residual_tol: None,
            max_iters: Some(1000),
            target: Some((vec![Point::euclidean(&[0.0])], 0.1)),
        };
        let tr = iterate(&s, &Scale(0.5), &Point::euclidean(&[1.0]), &rule).unwrap();
        assert_eq!(tr.stop_reason, StopReason::TargetReached);
        assert!(s.distance(tr.final_point(), &Point::euclidean(&[0.0])).unwrap() <= 0.1);
    }

    #[test]
    fn fejer_monotone_toward_sampled_fixed_points() {
        // Compositions and combinations of projectors are nonexpansive at
        // common fixed points, so distances to the intersection never grow.
        let s = ModelSpace::poincare_disk();
        let b1 = ConvexSet::ball(Point::disk(-0.15, 0.0), 0.55).unwrap();
        let b2 = ConvexSet::ball(Point::disk(0.15, 0.0), 0.55).unwrap();
        let comb = Operator::p_combination(
            vec![
                Operator::projector(b1.clone()),
                Operator::projector(b2.clone()),
            ],
            Weights::uniform(2),
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        let mut anchors = Vec::new();
        while anchors.len() < 5 {
            let q = s.sample_rng(&Region::Default, &mut rng).unwrap();
            if b1.contains(&s, &q).unwrap() && b2.contains(&s, &q).unwrap() {
                anchors.push(q);
            }
        }
        let x0 = Point::disk(0.0, 0.8);
        let tr = iterate(&s, &comb, &x0, &StopRule::residual(1e-9, 500)).unwrap();
        for y in &anchors {
            for w in tr.iterates.windows(2) {
                let d0 = s.distance(&w[0], y).unwrap();
                let d1 = s.distance(&w[1], y).unwrap();
                assert!(d1 <= d0 + 1e-9);
            }
        }
    }
}
