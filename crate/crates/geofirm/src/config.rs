//! Batch experiment harness: parse a flat key-value config, construct the
//! space, operators and algorithm, run, optionally certify, and emit CSV
//! traces. Backs the `geofirm` binary.
//!
//! Config format: one `key=value` per line, `#` comments, nested dotted
//! keys. Indexed keys (`sets.0`, `funcs.1`, ...) must be consecutive from
//! zero. Example:
//!
//! ```text
//! seed=1
//! space.kind=poincare_disk
//! algorithm=cyclic_projections
//! sets.0=ball:-0.2,0;0.6
//! sets.1=ball:0.2,0;0.6
//! x0=0.1,0.7
//! output=trace.csv
//! ```

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algorithms::{
    cyclic_projections_operator, iterate, projected_gradient_operator,
    proximal_splitting_operator, StopRule, Trace,
};
use crate::analysis::{certify_series, CertificationRecord, GaugeFamily};
use crate::error::{Error, Result};
use crate::operators::{project, ConvexSet, Operator, ProperFunction};
use crate::quantities::{check_pafne, psi, Mapping};
use crate::spaces::{ModelSpace, Point, Region, SLACK_TOL};

/// Environment variable that overrides the config seed.
pub const SEED_ENV: &str = "GEOFIRM_SEED";

#[derive(Debug, Clone)]
pub enum AlgorithmSpec {
    CyclicProjections(Vec<ConvexSet>),
    ProximalSplitting {
        fs: Vec<ProperFunction>,
        lambdas: Vec<f64>,
    },
    ProjectedGradient {
        f: ProperFunction,
        set: ConvexSet,
        lambda: f64,
        tau: f64,
    },
    Iterate(Operator),
}

#[derive(Debug, Clone)]
pub struct CertifySpec {
    pub alpha: f64,
    pub family: GaugeFamily,
    /// Explicit fixed-set reference points; by default the final iterate
    /// pushed through one extra application of the operator.
    pub reference: Option<Vec<Point>>,
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub space: ModelSpace,
    pub algorithm: AlgorithmSpec,
    pub x0: Point,
    pub rule: StopRule,
    pub certify: Option<CertifySpec>,
    pub output: PathBuf,
}

struct Entry {
    line: usize,
    key: String,
    value: String,
    used: bool,
}

struct Entries(Vec<Entry>);

fn cfg_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Config {
        line,
        msg: msg.into(),
    }
}

impl Entries {
    fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let stripped = raw.trim();
            if stripped.is_empty() || stripped.starts_with('#') {
                continue;
            }
            let (key, value) = stripped
                .split_once('=')
                .ok_or_else(|| cfg_err(line, "expected key=value"))?;
            entries.push(Entry {
                line,
                key: key.trim().to_string(),
                value: value.trim().to_string(),
                used: false,
            });
        }
        Ok(Entries(entries))
    }

    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        for e in &mut self.0 {
            if !e.used && e.key == key {
                e.used = true;
                return Some((e.line, e.value.clone()));
            }
        }
        None
    }

    fn take_required(&mut self, key: &str) -> Result<(usize, String)> {
        self.take(key)
            .ok_or_else(|| cfg_err(0, format!("missing required key `{key}`")))
    }

    /// Consecutive indexed keys `prefix.0`, `prefix.1`, ...
    fn take_indexed(&mut self, prefix: &str) -> Vec<(usize, String)> {
        let mut out = Vec::new();
        loop {
            match self.take(&format!("{prefix}.{}", out.len())) {
                Some(v) => out.push(v),
                None => break,
            }
        }
        out
    }

    fn finish(self) -> Result<()> {
        for e in &self.0 {
            if !e.used {
                return Err(cfg_err(e.line, format!("unknown key `{}`", e.key)));
            }
        }
        Ok(())
    }
}

fn parse_f64(line: usize, text: &str) -> Result<f64> {
    text.trim()
        .parse::<f64>()
        .map_err(|_| cfg_err(line, format!("expected a number, got `{text}`")))
}

fn parse_floats(line: usize, text: &str) -> Result<Vec<f64>> {
    text.split(',').map(|t| parse_f64(line, t)).collect()
}

fn parse_point(s: &ModelSpace, line: usize, text: &str) -> Result<Point> {
    let point = match s {
        ModelSpace::Euclidean { .. } => Point::Euclidean(parse_floats(line, text)?),
        ModelSpace::PoincareDisk => {
            let v = parse_floats(line, text)?;
            if v.len() != 2 {
                return Err(cfg_err(line, "disk points take 2 coordinates"));
            }
            Point::Disk([v[0], v[1]])
        }
        ModelSpace::SphericalCap { .. } => {
            let v = parse_floats(line, text)?;
            if v.len() != 3 {
                return Err(cfg_err(line, "cap points take 3 coordinates"));
            }
            let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            if n == 0.0 {
                return Err(cfg_err(line, "cap point cannot be the zero vector"));
            }
            Point::Sphere([v[0] / n, v[1] / n, v[2] / n])
        }
        ModelSpace::StarTree { .. } => {
            let (e, o) = text
                .split_once(':')
                .ok_or_else(|| cfg_err(line, "tree points use edge:offset"))?;
            Point::Tree {
                edge: e
                    .trim()
                    .parse()
                    .map_err(|_| cfg_err(line, "bad edge index"))?,
                offset: parse_f64(line, o)?,
            }
        }
    };
    if !s.contains(&point) {
        return Err(cfg_err(line, format!("point `{text}` is not in {}", s.name())));
    }
    Ok(point)
}

fn parse_set(s: &ModelSpace, line: usize, text: &str) -> Result<ConvexSet> {
    let (kind, rest) = text
        .split_once(':')
        .ok_or_else(|| cfg_err(line, "set descriptors use kind:args"))?;
    let set = match kind {
        "ball" => {
            let (center, radius) = rest
                .split_once(';')
                .ok_or_else(|| cfg_err(line, "ball uses ball:center;radius"))?;
            ConvexSet::ball(parse_point(s, line, center)?, parse_f64(line, radius)?)
        }
        "halfspace" => {
            let (normal, offset) = rest
                .split_once(';')
                .ok_or_else(|| cfg_err(line, "halfspace uses halfspace:normal;offset"))?;
            ConvexSet::halfspace(&parse_floats(line, normal)?, parse_f64(line, offset)?)
        }
        "segment" => {
            let (a, b) = rest
                .split_once('|')
                .ok_or_else(|| cfg_err(line, "segment uses segment:a|b"))?;
            Ok(ConvexSet::segment(
                parse_point(s, line, a)?,
                parse_point(s, line, b)?,
            ))
        }
        "subtree" => ConvexSet::subtree(&parse_floats(line, rest)?),
        other => return Err(cfg_err(line, format!("unknown set kind `{other}`"))),
    }
    .map_err(|e| cfg_err(line, format!("{e}")))?;
    set.validate(s).map_err(|e| cfg_err(line, format!("{e}")))?;
    Ok(set)
}

fn parse_func(s: &ModelSpace, line: usize, text: &str) -> Result<ProperFunction> {
    let (kind, rest) = text
        .split_once(':')
        .ok_or_else(|| cfg_err(line, "functions use kind:args"))?;
    Ok(match kind {
        "indicator" => ProperFunction::Indicator(parse_set(s, line, rest)?),
        "sqdist" => ProperFunction::SquaredDistanceTo(parse_point(s, line, rest)?),
        "distp" => {
            let (power, set) = rest
                .split_once(';')
                .ok_or_else(|| cfg_err(line, "distp uses distp:power;set"))?;
            ProperFunction::DistPower {
                set: parse_set(s, line, set)?,
                power: parse_f64(line, power)?,
            }
        }
        other => return Err(cfg_err(line, format!("unknown function kind `{other}`"))),
    })
}

fn parse_op(s: &ModelSpace, line: usize, text: &str) -> Result<Operator> {
    if text == "identity" {
        return Ok(Operator::Identity);
    }
    let (kind, rest) = text
        .split_once(':')
        .ok_or_else(|| cfg_err(line, "operators use kind:args"))?;
    match kind {
        "projector" => Ok(Operator::projector(parse_set(s, line, rest)?)),
        "km" => {
            let (lambda, inner) = rest
                .split_once(';')
                .ok_or_else(|| cfg_err(line, "km uses km:lambda;op"))?;
            Operator::km(parse_op(s, line, inner)?, parse_f64(line, lambda)?)
                .map_err(|e| cfg_err(line, format!("{e}")))
        }
        other => Err(cfg_err(line, format!("unknown operator kind `{other}`"))),
    }
}

fn parse_space(entries: &mut Entries) -> Result<ModelSpace> {
    let (line, kind) = entries.take_required("space.kind")?;
    match kind.as_str() {
        "euclidean" => {
            let (l, dim) = entries.take_required("space.dim")?;
            Ok(ModelSpace::euclidean(
                dim.parse().map_err(|_| cfg_err(l, "bad dimension"))?,
            ))
        }
        "poincare_disk" => Ok(ModelSpace::poincare_disk()),
        "spherical_cap" => {
            let (lk, kappa) = entries.take_required("space.kappa")?;
            let (le, eps) = entries.take_required("space.eps")?;
            ModelSpace::spherical_cap(parse_f64(lk, &kappa)?, parse_f64(le, &eps)?)
                .map_err(|e| cfg_err(line, format!("{e}")))
        }
        "star_tree" => {
            let (l, edges) = entries.take_required("space.edges")?;
            ModelSpace::star_tree(&parse_floats(l, &edges)?)
                .map_err(|e| cfg_err(l, format!("{e}")))
        }
        other => Err(cfg_err(line, format!("unknown space kind `{other}`"))),
    }
}

/// Parse a config document.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut entries = Entries::parse(text)?;
    let (seed_line, seed) = entries.take_required("seed")?;
    let seed: u64 = seed
        .parse()
        .map_err(|_| cfg_err(seed_line, "seed must be an unsigned integer"))?;
    let space = parse_space(&mut entries)?;

    let (alg_line, alg) = entries.take_required("algorithm")?;
    let algorithm = match alg.as_str() {
        "cyclic_projections" => {
            let raw = entries.take_indexed("sets");
            if raw.is_empty() {
                return Err(cfg_err(alg_line, "cyclic_projections needs sets.0, sets.1, ..."));
            }
            let mut sets = Vec::new();
            for (l, v) in raw {
                sets.push(parse_set(&space, l, &v)?);
            }
            AlgorithmSpec::CyclicProjections(sets)
        }
        "proximal_splitting" => {
            let raw = entries.take_indexed("funcs");
            if raw.is_empty() {
                return Err(cfg_err(alg_line, "proximal_splitting needs funcs.0, funcs.1, ..."));
            }
            let mut fs = Vec::new();
            for (l, v) in &raw {
                fs.push(parse_func(&space, *l, v)?);
            }
            let (ll, lam) = entries.take_required("lambdas")?;
            let lambdas = parse_floats(ll, &lam)?;
            if lambdas.len() != fs.len() {
                return Err(cfg_err(ll, "lambdas must match funcs in length"));
            }
            AlgorithmSpec::ProximalSplitting { fs, lambdas }
        }
        "projected_gradient" => {
            let (lf, f) = entries.take_required("pg.func")?;
            let (ls, set) = entries.take_required("pg.set")?;
            let (ll, lambda) = entries.take_required("pg.lambda")?;
            let (lt, tau) = entries.take_required("pg.tau")?;
            AlgorithmSpec::ProjectedGradient {
                f: parse_func(&space, lf, &f)?,
                set: parse_set(&space, ls, &set)?,
                lambda: parse_f64(ll, &lambda)?,
                tau: parse_f64(lt, &tau)?,
            }
        }
        "iterate" => {
            let (lo, op) = entries.take_required("op")?;
            AlgorithmSpec::Iterate(parse_op(&space, lo, &op)?)
        }
        other => return Err(cfg_err(alg_line, format!("unknown algorithm `{other}`"))),
    };

    let (xl, x0) = entries.take_required("x0")?;
    let x0 = parse_point(&space, xl, &x0)?;

    let mut rule = StopRule::default();
    if let Some((l, v)) = entries.take("stop.residual_tol") {
        rule.residual_tol = Some(parse_f64(l, &v)?);
    }
    if let Some((l, v)) = entries.take("stop.max_iters") {
        rule.max_iters = Some(v.parse().map_err(|_| cfg_err(l, "bad max_iters"))?);
    }

    let certify = match entries.take("certify") {
        Some((_, v)) if v == "true" => {
            let (la, alpha) = entries.take_required("certify.alpha")?;
            let family = match entries.take("certify.family") {
                Some((lf, fam)) => match fam.as_str() {
                    "linear" => GaugeFamily::Linear,
                    "power" => GaugeFamily::Power,
                    other => return Err(cfg_err(lf, format!("unknown gauge family `{other}`"))),
                },
                None => GaugeFamily::Linear,
            };
            let reference = match entries.take("certify.sref") {
                Some((lr, pts)) => {
                    let mut out = Vec::new();
                    for part in pts.split('|') {
                        out.push(parse_point(&space, lr, part)?);
                    }
                    Some(out)
                }
                None => None,
            };
            let output = entries.take("certify.output").map(|(_, v)| PathBuf::from(v));
            Some(CertifySpec {
                alpha: parse_f64(la, &alpha)?,
                family,
                reference,
                output,
            })
        }
        Some((_, v)) if v == "false" => None,
        Some((l, v)) => return Err(cfg_err(l, format!("certify must be true or false, got `{v}`"))),
        None => None,
    };

    let output = PathBuf::from(entries.take_required("output")?.1);
    entries.finish()?;
    Ok(ExperimentConfig {
        seed,
        space,
        algorithm,
        x0,
        rule,
        certify,
        output,
    })
}

/// Outcome of one experiment run.
#[derive(Debug)]
pub struct RunOutcome {
    pub trace: Trace,
    pub trace_path: PathBuf,
    pub certification: Option<CertificationRecord>,
    pub cert_path: Option<PathBuf>,
}

fn build_operator(s: &ModelSpace, spec: &AlgorithmSpec) -> Result<Operator> {
    match spec {
        AlgorithmSpec::CyclicProjections(sets) => cyclic_projections_operator(sets),
        AlgorithmSpec::ProximalSplitting { fs, lambdas } => {
            proximal_splitting_operator(fs, lambdas)
        }
        AlgorithmSpec::ProjectedGradient { f, set, lambda, tau } => {
            projected_gradient_operator(s, f, set, *lambda, *tau)
        }
        AlgorithmSpec::Iterate(op) => Ok(op.clone()),
    }
}

/// Run an experiment: iterate, write the trace CSV, optionally certify.
/// Output paths resolve relative to `out_dir`. Fixed seed means
/// byte-identical outputs.
pub fn run_experiment(config: &ExperimentConfig, out_dir: &Path) -> Result<RunOutcome> {
    let _seed = std::env::var(SEED_ENV)
        .ok()
        .and_then(|v| v.parse::<u64>().ok())
        .unwrap_or(config.seed);
    let op = build_operator(&config.space, &config.algorithm)?;
    let mut trace = iterate(&config.space, &op, &config.x0, &config.rule)?;

    let mut certification = None;
    let mut cert_path = None;
    if let Some(spec) = &config.certify {
        // Default fixed-set stand-in: the final iterate pushed through one
        // more application of the operator.
        let reference = match &spec.reference {
            Some(pts) => pts.clone(),
            None => vec![op.apply(&config.space, trace.final_point())?],
        };
        trace.compute_dist_to_fix(&config.space, &reference)?;
        let record = crate::analysis::certify(
            &config.space,
            &trace,
            &reference,
            spec.alpha,
            spec.family,
        )?;
        let path = out_dir.join(
            spec.output
                .clone()
                .unwrap_or_else(|| config.output.with_extension("cert.txt")),
        );
        std::fs::write(&path, record.to_text())?;
        cert_path = Some(path);
        certification = Some(record);
    }

    let trace_path = out_dir.join(&config.output);
    std::fs::write(&trace_path, trace.to_csv())?;
    Ok(RunOutcome {
        trace,
        trace_path,
        certification,
        cert_path,
    })
}

/// Parameters of the standalone `certify` subcommand.
pub struct CertifyParams {
    pub alpha: f64,
    pub p: f64,
    pub c: f64,
    pub family: GaugeFamily,
}

pub fn parse_certify_params(text: &str) -> Result<CertifyParams> {
    let mut entries = Entries::parse(text)?;
    let (la, alpha) = entries.take_required("alpha")?;
    let (lp, p) = entries.take_required("p")?;
    let (lc, c) = entries.take_required("c")?;
    let family = match entries.take("family") {
        Some((lf, fam)) => match fam.as_str() {
            "linear" => GaugeFamily::Linear,
            "power" => GaugeFamily::Power,
            other => return Err(cfg_err(lf, format!("unknown gauge family `{other}`"))),
        },
        None => GaugeFamily::Linear,
    };
    let params = CertifyParams {
        alpha: parse_f64(la, &alpha)?,
        p: parse_f64(lp, &p)?,
        c: parse_f64(lc, &c)?,
        family,
    };
    entries.finish()?;
    Ok(params)
}

/// Certify a previously written trace CSV. The file must carry the
/// dist_to_fix column (a run with `certify=true` writes it).
pub fn certify_trace_file(csv: &str, params: &CertifyParams) -> Result<CertificationRecord> {
    let mut residuals = Vec::new();
    let mut dists = Vec::new();
    for (i, line) in csv.lines().enumerate() {
        if i == 0 {
            if !line.starts_with("iter,residual,dist_to_fix") {
                return Err(cfg_err(1, "not a trace CSV (bad header)"));
            }
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() < 3 {
            return Err(cfg_err(i + 1, "trace row needs at least 3 columns"));
        }
        if !cols[1].is_empty() {
            residuals.push(parse_f64(i + 1, cols[1])?);
        }
        if cols[2].is_empty() {
            return Err(cfg_err(
                i + 1,
                "dist_to_fix column is empty; rerun the experiment with certify=true",
            ));
        }
        dists.push(parse_f64(i + 1, cols[2])?);
    }
    if dists.len() != residuals.len() + 1 {
        return Err(cfg_err(0, "trace CSV has inconsistent residual column"));
    }
    certify_series(
        &residuals,
        &dists,
        &dists,
        params.alpha,
        params.p,
        params.c,
        params.family,
    )
}

/// One invariant sweep result.
#[derive(Debug, Clone)]
pub struct VerifyRow {
    pub check: String,
    pub space: String,
    pub samples: usize,
    pub worst_slack: f64,
    pub pass: bool,
}

pub fn verify_rows_to_csv(rows: &[VerifyRow]) -> String {
    let mut out = String::from("check,space,samples,worst_slack,pass\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.check, r.space, r.samples, r.worst_slack, r.pass
        );
    }
    out
}

fn stock_ball(s: &ModelSpace) -> ConvexSet {
    let radius = match s {
        ModelSpace::Euclidean { .. } => 0.8,
        ModelSpace::PoincareDisk => 0.7,
        ModelSpace::SphericalCap { .. } => 0.25,
        ModelSpace::StarTree { .. } => 0.5,
    };
    ConvexSet::Ball {
        center: s.base_point(),
        radius,
    }
}

/// The default space roster for the verification suite.
pub fn default_spaces() -> Vec<ModelSpace> {
    vec![
        ModelSpace::euclidean(2),
        ModelSpace::euclidean(3),
        ModelSpace::poincare_disk(),
        ModelSpace::spherical_cap(1.0, 0.3).expect("valid cap"),
        ModelSpace::star_tree(&[1.0, 1.0, 1.0]).expect("valid tree"),
    ]
}

/// Run the invariant sweeps: convexity slack, geodesic splits, psi
/// nonnegativity and the four-point bound on the CAT(0) members, and
/// projector firmness certificates. Zero samples produce an empty report;
/// verdicts depend only on the seed.
pub fn verify_suite(spaces: &[ModelSpace], n_samples: usize, seed: u64) -> Result<Vec<VerifyRow>> {
    let mut rows = Vec::new();
    if n_samples == 0 {
        return Ok(rows);
    }
    for (si, s) in spaces.iter().enumerate() {
        let base_seed = seed.wrapping_add(1000 * si as u64);

        let slack = s.verify_p_convexity(n_samples, base_seed)?;
        rows.push(VerifyRow {
            check: "p_convexity".into(),
            space: s.name(),
            samples: n_samples,
            worst_slack: slack,
            pass: slack >= SLACK_TOL,
        });

        let mut rng = ChaCha8Rng::seed_from_u64(base_seed.wrapping_add(1));
        let mut worst_split = 0.0_f64;
        for _ in 0..n_samples {
            let x = s.sample_rng(&Region::Default, &mut rng)?;
            let y = s.sample_rng(&Region::Default, &mut rng)?;
            let t: f64 = rand::Rng::gen(&mut rng);
            let z = s.geodesic_point(&x, &y, t)?;
            let dxy = s.distance(&x, &y)?;
            let err = (s.distance(&x, &z)? - t * dxy)
                .abs()
                .max((s.distance(&z, &y)? - (1.0 - t) * dxy).abs());
            worst_split = worst_split.max(err);
        }
        rows.push(VerifyRow {
            check: "geodesic_split".into(),
            space: s.name(),
            samples: n_samples,
            worst_slack: 1e-10 - worst_split,
            pass: worst_split <= 1e-10,
        });

        let ball = stock_ball(s);
        let proj = Operator::projector(ball.clone());
        if s.is_cat0() {
            let mut rng = ChaCha8Rng::seed_from_u64(base_seed.wrapping_add(2));
            let mut worst_psi = f64::INFINITY;
            let mut worst_fourpoint = f64::INFINITY;
            for _ in 0..n_samples {
                let x = s.sample_rng(&Region::Default, &mut rng)?;
                let y = s.sample_rng(&Region::Default, &mut rng)?;
                worst_psi = worst_psi.min(psi(s, &proj, &x, &y)?);
                let u = s.sample_rng(&Region::Default, &mut rng)?;
                let v = s.sample_rng(&Region::Default, &mut rng)?;
                let bound = s.distance(&x, &y)? * s.distance(&u, &v)?;
                worst_fourpoint = worst_fourpoint.min(bound - crate::quantities::delta(s, &x, &y, &u, &v)?);
            }
            rows.push(VerifyRow {
                check: "psi_nonneg".into(),
                space: s.name(),
                samples: n_samples,
                worst_slack: worst_psi,
                pass: worst_psi >= SLACK_TOL,
            });
            rows.push(VerifyRow {
                check: "four_point".into(),
                space: s.name(),
                samples: n_samples,
                worst_slack: worst_fourpoint,
                pass: worst_fourpoint >= SLACK_TOL,
            });
        }

        // Projector firmness at an anchor inside the set.
        let mut rng = ChaCha8Rng::seed_from_u64(base_seed.wrapping_add(3));
        let raw = s.sample_rng(&Region::Default, &mut rng)?;
        let anchor = project(s, &ball, &raw)?;
        let mut xs = Vec::with_capacity(n_samples);
        for _ in 0..n_samples {
            xs.push(s.sample_rng(&Region::Default, &mut rng)?);
        }
        let cert = check_pafne(s, &proj, &anchor, 0.5, 0.0, &xs)?;
        rows.push(VerifyRow {
            check: "projector_firmness".into(),
            space: s.name(),
            samples: n_samples,
            worst_slack: cert.worst_slack,
            pass: cert.valid(),
        });
    }
    Ok(rows)
}

/// Built-in presets: (name, description, config text).
pub fn presets() -> Vec<(&'static str, &'static str, &'static str)> {
    vec![
        (
            "cp-hyperbolic-2balls",
            "cyclic projections onto two intersecting hyperbolic balls",
            "seed=1\n\
             space.kind=poincare_disk\n\
             algorithm=cyclic_projections\n\
             sets.0=ball:-0.35,0;0.75\n\
             sets.1=ball:0.35,0;0.75\n\
             x0=0.05,0.85\n\
             stop.residual_tol=1e-10\n\
             stop.max_iters=100000\n\
             output=cp-hyperbolic-2balls.csv\n",
        ),
        (
            "prox-split-euclidean-quadratics",
            "proximal splitting of two quadratics with a closed-form limit",
            "seed=1\n\
             space.kind=euclidean\n\
             space.dim=2\n\
             algorithm=proximal_splitting\n\
             funcs.0=sqdist:1,0\n\
             funcs.1=sqdist:-1,2\n\
             lambdas=1,1\n\
             x0=3,3\n\
             stop.residual_tol=1e-12\n\
             stop.max_iters=10000\n\
             output=prox-split-euclidean-quadratics.csv\n",
        ),
        (
            "cp-euclidean-halfplanes",
            "alternating projections into an acute wedge, with rate certification",
            "seed=1\n\
             space.kind=euclidean\n\
             space.dim=2\n\
             algorithm=cyclic_projections\n\
             sets.0=halfspace:0,1;0\n\
             sets.1=halfspace:-0.3894183423086505,-0.9210609940028851;0\n\
             x0=-1,2\n\
             stop.residual_tol=1e-12\n\
             stop.max_iters=100000\n\
             certify=true\n\
             certify.alpha=0.6666666666666666\n\
             certify.family=linear\n\
             output=cp-euclidean-halfplanes.csv\n",
        ),
        (
            "pg-euclidean-quadratic",
            "metric projected gradients for a halfplane-constrained quadratic",
            "seed=1\n\
             space.kind=euclidean\n\
             space.dim=2\n\
             algorithm=projected_gradient\n\
             pg.func=sqdist:0.8,1.5\n\
             pg.set=halfspace:0,1;0\n\
             pg.lambda=1\n\
             pg.tau=0.5\n\
             x0=-2,-1\n\
             stop.residual_tol=1e-12\n\
             stop.max_iters=50000\n\
             output=pg-euclidean-quadratic.csv\n",
        ),
    ]
}

pub fn preset_config(name: &str) -> Option<&'static str> {
    presets().into_iter().find(|(n, _, _)| *n == name).map(|(_, _, c)| c)
}
