//! Gauge machinery: metric-subregularity fitting from traces, the
//! rho <-> theta transform, rate envelopes, gauge-monotonicity checking
//! and convergence certification.
//!
//! A gauge rho certifies the error bound d(x, S) <= rho(d(Tx, x)). For a
//! quasi alpha-firm iteration it induces the contraction gauge
//!
//! ```text
//! theta(t) = (t^p - tau (rho^{-1}(t))^p)^(1/p),   tau = c (1-alpha) / (2 alpha),
//! ```
//!
//! under which distances to the fixed set contract step by step and the
//! iterates obey d(x_k, x*) <= a s_k(t0) with a = tau^(-1/p) and
//! s_k(t) the tail sums of iterated gauges.

use crate::algorithms::Trace;
use crate::error::{Error, Result};
use crate::spaces::{ModelSpace, Point, SLACK_TOL};

/// Which parametric family to fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaugeFamily {
    Linear,
    Power,
}

/// A fitted gauge rho on [0, t_max]: linear kappa*t or power kappa*t^q.
#[derive(Debug, Clone)]
pub struct Gauge {
    pub family: GaugeFamily,
    pub kappa: f64,
    /// Exponent; 1 for the linear family.
    pub q: f64,
    pub t_max: f64,
}

impl Gauge {
    pub fn linear(kappa: f64, t_max: f64) -> Self {
        Gauge {
            family: GaugeFamily::Linear,
            kappa,
            q: 1.0,
            t_max,
        }
    }

    pub fn power(kappa: f64, q: f64, t_max: f64) -> Self {
        Gauge {
            family: GaugeFamily::Power,
            kappa,
            q,
            t_max,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self.family {
            GaugeFamily::Linear => self.kappa * t,
            GaugeFamily::Power => self.kappa * t.powf(self.q),
        }
    }

    pub fn inverse(&self, v: f64) -> f64 {
        match self.family {
            GaugeFamily::Linear => v / self.kappa,
            GaugeFamily::Power => (v / self.kappa).powf(1.0 / self.q),
        }
    }
}

/// Result of fitting a gauge to (residual, distance) pairs.
#[derive(Debug, Clone)]
pub struct SubregularityReport {
    pub gauge: Gauge,
    /// min over pairs of rho(r_k) - e_k; valid when >= -1e-9.
    pub worst_violation: f64,
    pub n_pairs: usize,
    /// All sampled distances were zero (kappa = 0 edge case).
    pub degenerate: bool,
}

impl SubregularityReport {
    pub fn valid(&self) -> bool {
        self.worst_violation >= SLACK_TOL
    }
}

/// Fit the smallest member of the family with e_k <= rho(r_k) for all
/// pairs (r_k = d(Tx_k, x_k), e_k = d(x_k, S)).
///
/// For the power family the exponent comes from log-log least squares and
/// kappa from the max ratio. Requires at least 3 pairs with r_k > 0.
pub fn fit_gauge(pairs: &[(f64, f64)], family: GaugeFamily) -> Result<SubregularityReport> {
    let positive: Vec<(f64, f64)> = pairs.iter().copied().filter(|(r, _)| *r > 0.0).collect();
    if positive.is_empty() {
        return Err(Error::InvalidParameter(
            "cannot fit a gauge: all residuals are zero".into(),
        ));
    }
    if positive.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "gauge fitting needs at least 3 pairs with positive residual, got {}",
            positive.len()
        )));
    }
    let degenerate = pairs.iter().all(|(_, e)| *e <= 1e-12);
    let t_max = positive.iter().map(|(r, _)| *r).fold(0.0, f64::max);
    let gauge = match family {
        GaugeFamily::Linear => {
            let kappa = if degenerate {
                0.0
            } else {
                positive.iter().map(|(r, e)| e / r).fold(0.0, f64::max)
            };
            Gauge::linear(kappa, t_max)
        }
        GaugeFamily::Power => {
            let loglog: Vec<(f64, f64)> = positive
                .iter()
                .filter(|(_, e)| *e > 0.0)
                .map(|(r, e)| (r.ln(), e.ln()))
                .collect();
            let q = if degenerate || loglog.len() < 2 {
                1.0
            } else {
                let n = loglog.len() as f64;
                let mx = loglog.iter().map(|(x, _)| x).sum::<f64>() / n;
                let my = loglog.iter().map(|(_, y)| y).sum::<f64>() / n;
                let var = loglog.iter().map(|(x, _)| (x - mx) * (x - mx)).sum::<f64>();
                let cov = loglog
                    .iter()
                    .map(|(x, y)| (x - mx) * (y - my))
                    .sum::<f64>();
                if var <= 1e-300 {
                    1.0
                } else {
                    (cov / var).max(1e-6)
                }
            };
            let kappa = if degenerate {
                0.0
            } else {
                positive
                    .iter()
                    .map(|(r, e)| e / r.powf(q))
                    .fold(0.0, f64::max)
            };
            Gauge::power(kappa, q, t_max)
        }
    };
    let mut worst = f64::INFINITY;
    for (r, e) in pairs {
        worst = worst.min(gauge.eval(*r) - e);
    }
    Ok(SubregularityReport {
        gauge,
        worst_violation: worst,
        n_pairs: pairs.len(),
        degenerate,
    })
}

/// Grid verification of the three contraction-gauge conditions.
#[derive(Debug, Clone)]
pub struct ThetaConditions {
    /// theta(t) > 0 for grid t > 0 (fails for the one-step gauge theta = 0).
    pub positive: bool,
    /// theta(t) < t for grid t > 0.
    pub below_identity: bool,
    /// sup theta(t)/t over the grid; summability is certified by a ratio
    /// strictly below 1.
    pub contraction_ratio: f64,
    pub summable: bool,
}

/// The contraction gauge induced by rho and tau.
#[derive(Debug, Clone)]
pub struct Theta {
    pub rho: Gauge,
    pub tau: f64,
    pub p: f64,
    /// kappa was raised to make the radicand nonnegative.
    pub kappa_enlarged: bool,
    /// For a linear rho the gauge is exactly ratio * t; within rounding
    /// noise of the threshold kappa = tau^(1/p) the ratio snaps to zero
    /// (the one-step bound).
    linear_ratio: Option<f64>,
    pub conditions: ThetaConditions,
}

impl Theta {
    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if let Some(ratio) = self.linear_ratio {
            return ratio * t;
        }
        let inv = self.rho.inverse(t);
        let radicand = t.powf(self.p) - self.tau * inv.powf(self.p);
        radicand.max(0.0).powf(1.0 / self.p)
    }
}

/// Build theta(t) = (t^p - tau (rho^{-1}(t))^p)^(1/p).
///
/// A kappa too small relative to tau makes the radicand negative; the
/// condition is spurious (subregularity with kappa implies it with any
/// larger kappa), so kappa is enlarged to the threshold and flagged.
/// Power gauges with q > 1 are incompatible with any positive tau.
pub fn theta_from_rho(rho: &Gauge, tau: f64, p: f64) -> Result<Theta> {
    if !(tau > 0.0) {
        return Err(Error::InvalidParameter("tau must be positive".into()));
    }
    if !(p > 1.0) {
        return Err(Error::InvalidParameter("exponent p must exceed 1".into()));
    }
    let mut rho = rho.clone();
    let t_max = if rho.t_max > 0.0 { rho.t_max } else { 1.0 };
    rho.t_max = t_max;
    let kappa_min = match rho.family {
        GaugeFamily::Linear => tau.powf(1.0 / p),
        GaugeFamily::Power => {
            if rho.q > 1.0 {
                return Err(Error::GaugeIncompatible(format!(
                    "power gauge with q = {} leaves the radicand negative near 0",
                    rho.q
                )));
            }
            tau.powf(rho.q / p) * t_max.powf(1.0 - rho.q)
        }
    };
    let kappa_enlarged = rho.kappa < kappa_min;
    if kappa_enlarged {
        rho.kappa = kappa_min;
    }
    let is_linear = rho.family == GaugeFamily::Linear || rho.q == 1.0;
    let linear_ratio = if is_linear {
        let g = 1.0 - tau / rho.kappa.powf(p);
        Some(if g < 1e-12 { 0.0 } else { g.powf(1.0 / p) })
    } else {
        None
    };
    let mut theta = Theta {
        rho,
        tau,
        p,
        kappa_enlarged,
        linear_ratio,
        conditions: ThetaConditions {
            positive: true,
            below_identity: true,
            contraction_ratio: 0.0,
            summable: true,
        },
    };
    theta.conditions = if let Some(ratio) = linear_ratio {
        ThetaConditions {
            positive: ratio > 0.0,
            below_identity: ratio < 1.0,
            contraction_ratio: ratio,
            summable: ratio < 1.0,
        }
    } else {
        // Grid check of positivity and the identity bound on the open
        // interval (0, t_max). For a power gauge with q < 1 the ratio
        // theta(t)/t climbs to 1 as t -> 0, so no uniform contraction
        // certificate exists.
        let n = 1000;
        let mut positive = true;
        let mut below = true;
        for i in 1..=n {
            let t = t_max * i as f64 / (n + 1) as f64;
            let v = theta.eval(t);
            if v <= 0.0 {
                positive = false;
            }
            if v >= t {
                below = false;
            }
        }
        ThetaConditions {
            positive,
            below_identity: below,
            contraction_ratio: 1.0,
            summable: false,
        }
    };
    Ok(theta)
}

/// Numeric inverse of t -> t - theta(t), the gauge under which metric
/// subregularity is necessary for gauge-monotone convergence.
pub struct InducedGauge {
    residual_map: Box<dyn Fn(f64) -> f64>,
    t_max: f64,
}

impl InducedGauge {
    /// Solve t - theta(t) = s by monotone bisection to 1e-12.
    pub fn eval(&self, s: f64) -> Result<f64> {
        if s < 0.0 {
            return Err(Error::InvalidParameter("gauge argument must be >= 0".into()));
        }
        if s == 0.0 {
            return Ok(0.0);
        }
        let g = &self.residual_map;
        let mut hi = self.t_max.max(1e-12);
        let mut grow = 0;
        while g(hi) < s {
            hi *= 2.0;
            grow += 1;
            if grow > 128 {
                return Err(Error::GaugeIncompatible(
                    "t - theta(t) never reaches the requested value".into(),
                ));
            }
        }
        let mut lo = 0.0;
        while hi - lo > 1e-12 {
            let mid = 0.5 * (lo + hi);
            if g(mid) < s {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// Construct the inverse of (Id - theta) after verifying the theorem's
/// hypotheses on a grid: the map must be strictly increasing, continuous,
/// and vanish at zero.
pub fn rho_from_theta<F>(theta: F, t_max: f64) -> Result<InducedGauge>
where
    F: Fn(f64) -> f64 + 'static,
{
    if !(t_max > 0.0) {
        return Err(Error::InvalidParameter("t_max must be positive".into()));
    }
    let g = move |t: f64| t - theta(t);
    if g(0.0).abs() > 1e-12 {
        return Err(Error::GaugeIncompatible("(Id - theta)(0) != 0".into()));
    }
    let n = 1000;
    let mut prev = 0.0;
    for i in 1..=n {
        let t = t_max * i as f64 / n as f64;
        let v = g(t);
        if v <= prev {
            return Err(Error::GaugeIncompatible(format!(
                "t - theta(t) is not strictly increasing near t = {t}"
            )));
        }
        prev = v;
    }
    Ok(InducedGauge {
        residual_map: Box::new(g),
        t_max,
    })
}

/// Tail sums s_k(t0) = sum_{j >= k} theta^(j)(t0) for k = 0..=k_max, where
/// theta^(0) is the identity. The truncation error of every entry is
/// below 1e-12; a tail that does not contract within budget is an error.
pub fn rate_envelope<F>(theta: F, t0: f64, k_max: usize) -> Result<Vec<f64>>
where
    F: Fn(f64) -> f64,
{
    if t0 < 0.0 {
        return Err(Error::InvalidParameter("t0 must be >= 0".into()));
    }
    const BUDGET: usize = 1_000_000;
    let mut iterates = vec![t0];
    let mut t = t0;
    let mut tail = 0.0;
    let mut converged = false;
    for _ in 0..BUDGET {
        let next = theta(t);
        // The gauge must stay nonnegative and below the identity.
        if !(next >= 0.0) || next > t {
            return Err(Error::NotSummable);
        }
        t = next;
        if t <= 1e-300 {
            converged = true;
            break;
        }
        iterates.push(t);
        let ratio = t / iterates[iterates.len() - 2];
        if ratio < 1.0 {
            let bound = t * ratio / (1.0 - ratio);
            if bound < 1e-12 && iterates.len() > k_max {
                tail = bound;
                converged = true;
                break;
            }
        }
    }
    if !converged {
        return Err(Error::NotSummable);
    }
    // Suffix sums over the computed iterates, plus the tail bound.
    let mut sums = vec![0.0; iterates.len() + 1];
    for j in (0..iterates.len()).rev() {
        sums[j] = sums[j + 1] + iterates[j];
    }
    let mut out = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let s = sums.get(k).copied().unwrap_or(0.0) + tail;
        out.push(s);
    }
    Ok(out)
}

/// Check e_{k+1} <= theta(e_k) + 1e-9 along a distance sequence.
/// Returns the verdict and the first violating index.
pub fn check_gauge_monotone<F>(dists: &[f64], theta: F) -> (bool, Option<usize>)
where
    F: Fn(f64) -> f64,
{
    for k in 0..dists.len().saturating_sub(1) {
        if dists[k + 1] > theta(dists[k]) + 1e-9 {
            return (false, Some(k));
        }
    }
    (true, None)
}

/// Full certification outcome for one trace.
#[derive(Debug)]
pub struct CertificationRecord {
    pub family: GaugeFamily,
    pub report: Option<SubregularityReport>,
    pub tau: f64,
    pub theta: Option<Theta>,
    pub gauge_monotone: bool,
    pub first_violation: Option<usize>,
    /// a s_k(t0) - d(x_k, x*) per iterate.
    pub envelope_margins: Vec<f64>,
    pub envelope_ok: bool,
    pub certified: bool,
    pub reason: Option<String>,
}

impl CertificationRecord {
    fn failed(family: GaugeFamily, tau: f64, reason: String) -> Self {
        CertificationRecord {
            family,
            report: None,
            tau,
            theta: None,
            gauge_monotone: false,
            first_violation: None,
            envelope_margins: Vec::new(),
            envelope_ok: false,
            certified: false,
            reason: Some(reason),
        }
    }

    /// Key-value text followed by a per-iterate margin table.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "family={}\n",
            match self.family {
                GaugeFamily::Linear => "linear",
                GaugeFamily::Power => "power",
            }
        ));
        if let Some(rep) = &self.report {
            out.push_str(&format!("kappa={}\n", rep.gauge.kappa));
            out.push_str(&format!("q={}\n", rep.gauge.q));
            out.push_str(&format!("worst_violation={}\n", rep.worst_violation));
        }
        out.push_str(&format!("tau={}\n", self.tau));
        if let Some(theta) = &self.theta {
            out.push_str(&format!("kappa_enlarged={}\n", theta.kappa_enlarged));
            out.push_str(&format!(
                "contraction_ratio={}\n",
                theta.conditions.contraction_ratio
            ));
        }
        out.push_str(&format!("gauge_monotone={}\n", self.gauge_monotone));
        out.push_str(&format!("envelope_ok={}\n", self.envelope_ok));
        out.push_str(&format!("certified={}\n", self.certified));
        if let Some(reason) = &self.reason {
            out.push_str(&format!("reason={reason}\n"));
        }
        out.push_str("k,envelope_margin\n");
        for (k, m) in self.envelope_margins.iter().enumerate() {
            out.push_str(&format!("{k},{m}\n"));
        }
        out
    }
}

/// Certify a trace: fit rho from (residual, distance) pairs, build theta
/// with tau = c (1-alpha)/(2 alpha), check gauge monotonicity, and compare
/// the observed distances to the limit against the rate envelope
/// a s_k(t0) with a = tau^(-1/p).
///
/// An invalid fit, a monotonicity violation or a broken envelope produce a
/// "not certified" record; structural problems (no usable pairs) are
/// errors.
pub fn certify(
    s: &ModelSpace,
    trace: &Trace,
    s_approx: &[Point],
    alpha: f64,
    family: GaugeFamily,
) -> Result<CertificationRecord> {
    if s_approx.is_empty() {
        return Err(Error::EmptySamples);
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter("alpha must lie in (0,1)".into()));
    }
    if trace.len() < 2 {
        return Err(Error::InvalidParameter("trace too short to certify".into()));
    }
    let params = s.params();

    // Distances to the fixed-set approximation; the surrogate residual at
    // fixed points is exactly the step length already stored in the trace.
    let dists = match &trace.dist_to_fix {
        Some(d) if d.len() == trace.len() => d.clone(),
        _ => {
            let mut d = Vec::with_capacity(trace.len());
            for x in &trace.iterates {
                let mut best = f64::INFINITY;
                for t in s_approx {
                    best = best.min(s.distance(x, t)?);
                }
                d.push(best);
            }
            d
        }
    };

    // Reference limit: the point of the approximation closest to the final
    // iterate.
    let last = trace.final_point();
    let mut x_star = &s_approx[0];
    let mut best = f64::INFINITY;
    for t in s_approx {
        let d = s.distance(last, t)?;
        if d < best {
            best = d;
            x_star = t;
        }
    }
    let mut to_limit = Vec::with_capacity(trace.len());
    for x in &trace.iterates {
        to_limit.push(s.distance(x, x_star)?);
    }

    certify_series(
        &trace.residuals,
        &dists,
        &to_limit,
        alpha,
        params.p,
        params.c,
        family,
    )
}

/// Series-level certification core: residuals r_k = d(x_k, x_{k+1}),
/// distances e_k = d(x_k, S) and d(x_k, x*) to the reference limit.
pub fn certify_series(
    residuals: &[f64],
    dists: &[f64],
    dist_to_limit: &[f64],
    alpha: f64,
    p: f64,
    c: f64,
    family: GaugeFamily,
) -> Result<CertificationRecord> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter("alpha must lie in (0,1)".into()));
    }
    if dists.len() != residuals.len() + 1 || dist_to_limit.len() != dists.len() {
        return Err(Error::InvalidParameter(
            "certification series lengths are inconsistent".into(),
        ));
    }
    let tau = c * (1.0 - alpha) / (2.0 * alpha);
    let a = tau.powf(-1.0 / p);
    let pairs: Vec<(f64, f64)> = residuals.iter().zip(dists).map(|(r, e)| (*r, *e)).collect();

    let report = fit_gauge(&pairs, family)?;
    if !report.valid() {
        let mut rec = CertificationRecord::failed(
            family,
            tau,
            format!("gauge fit violated by {}", -report.worst_violation),
        );
        rec.report = Some(report);
        return Ok(rec);
    }
    let theta = match theta_from_rho(&report.gauge, tau, p) {
        Ok(t) => t,
        Err(e) => {
            let mut rec = CertificationRecord::failed(family, tau, format!("{e}"));
            rec.report = Some(report);
            return Ok(rec);
        }
    };
    let (gauge_monotone, first_violation) = check_gauge_monotone(dists, |t| theta.eval(t));

    let t0 = dists[0];
    let (envelope_margins, envelope_ok) = if gauge_monotone {
        match rate_envelope(|t| theta.eval(t), t0, dists.len() - 1) {
            Ok(sk) => {
                let mut margins = Vec::with_capacity(dists.len());
                let mut ok = true;
                for (k, d) in dist_to_limit.iter().enumerate() {
                    let m = a * sk[k] - d;
                    if m < SLACK_TOL {
                        ok = false;
                    }
                    margins.push(m);
                }
                (margins, ok)
            }
            Err(_) => (Vec::new(), false),
        }
    } else {
        (Vec::new(), false)
    };

    let certified = gauge_monotone && envelope_ok;
    let reason = if certified {
        None
    } else if !gauge_monotone {
        Some(format!(
            "gauge monotonicity violated at iteration {}",
            first_violation.unwrap_or(0)
        ))
    } else {
        Some("rate envelope violated".into())
    };
    Ok(CertificationRecord {
        family,
        report: Some(report),
        tau,
        theta: Some(theta),
        gauge_monotone,
        first_violation,
        envelope_margins,
        envelope_ok,
        certified,
        reason,
    })
}
