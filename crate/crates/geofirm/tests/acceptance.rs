//! Acceptance suite: one test per criterion, each printing a pass line.
//! All constants and tolerances are pinned here; the whole suite runs at
//! desk scale.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use geofirm::algorithms::{cyclic_projections, iterate, StopRule};
use geofirm::analysis::{certify, rho_from_theta, GaugeFamily};
use geofirm::config::{parse_config, preset_config, run_experiment};
use geofirm::error::{Error, Result};
use geofirm::operators::{
    barycenter, barycenter_from, composition_alpha, km_alpha, project, prox_p, ConvexSet,
    Operator, ProperFunction, Weights,
};
use geofirm::quantities::{check_pafne, delta, psi, Mapping};
use geofirm::spaces::{ModelSpace, Point, Region};

const SLACK_TOL: f64 = -1e-9;

fn sample_many(s: &ModelSpace, n: usize, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| s.sample_rng(&Region::Default, &mut rng).unwrap())
        .collect()
}

/// Worst per-pair firmness slack over n (anchor, probe) samples, anchors
/// drawn by projecting samples into the anchor set.
fn worst_pafne_slack<T: Mapping>(
    s: &ModelSpace,
    op: &T,
    anchor_set: &ConvexSet,
    alpha: f64,
    epsilon: f64,
    n: usize,
    seed: u64,
) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::INFINITY;
    for _ in 0..n {
        let raw = s.sample_rng(&Region::Default, &mut rng).unwrap();
        let y = project(s, anchor_set, &raw).unwrap();
        let x = s.sample_rng(&Region::Default, &mut rng).unwrap();
        let cert = check_pafne(s, op, &y, alpha, epsilon, std::slice::from_ref(&x)).unwrap();
        worst = worst.min(cert.worst_slack);
    }
    worst
}

struct Rotation(f64);
impl Mapping for Rotation {
    fn apply(&self, _s: &ModelSpace, x: &Point) -> Result<Point> {
        match x {
            Point::Euclidean(v) if v.len() == 2 => {
                let (c, s) = (self.0.cos(), self.0.sin());
                Ok(Point::euclidean(&[c * v[0] - s * v[1], s * v[0] + c * v[1]]))
            }
            _ => Err(Error::Domain("rotation needs the Euclidean plane".into())),
        }
    }
}

#[test]
fn criterion_01_space_certification() {
    let cap = ModelSpace::spherical_cap(1.0, 0.3).unwrap();
    // The cap carries the curvature-derived constant, not the CAT(0) one.
    let expect_c = (std::f64::consts::PI - 2.0 * 0.3) * 0.3_f64.tan();
    assert!((cap.params().c - expect_c).abs() < 1e-15);
    let spaces = [
        ModelSpace::euclidean(2),
        ModelSpace::euclidean(3),
        ModelSpace::euclidean(4),
        ModelSpace::euclidean(5),
        ModelSpace::poincare_disk(),
        ModelSpace::star_tree(&[1.0, 1.0, 1.0]).unwrap(),
        cap,
    ];
    for s in &spaces {
        assert!(s.params().p == 2.0);
        let slack = s.verify_p_convexity(10_000, 2024).unwrap();
        assert!(
            slack >= SLACK_TOL,
            "{}: convexity slack {slack}",
            s.name()
        );
    }
    println!("criterion 01 space certification: PASS");
}

#[test]
fn criterion_02_psi_nonnegativity_and_four_point() {
    let spaces = [
        ModelSpace::euclidean(2),
        ModelSpace::poincare_disk(),
        ModelSpace::star_tree(&[1.0, 1.0, 1.0]).unwrap(),
    ];
    for s in &spaces {
        let ball = ConvexSet::Ball {
            center: s.base_point(),
            radius: 0.5,
        };
        let quad = ProperFunction::SquaredDistanceTo(s.base_point());
        let ops: Vec<Operator> = vec![
            Operator::Identity,
            Operator::projector(ball.clone()),
            Operator::prox(quad, 1.0).unwrap(),
            Operator::km(Operator::projector(ball.clone()), 0.5).unwrap(),
            Operator::compose(vec![
                Operator::projector(ball.clone()),
                Operator::projector(ConvexSet::Ball {
                    center: s.base_point(),
                    radius: 0.9,
                }),
            ])
            .unwrap(),
            Operator::p_combination(
                vec![Operator::projector(ball.clone()), Operator::Identity],
                Weights::uniform(2),
            )
            .unwrap(),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let per_op = 10_000 / ops.len() + 1;
        let mut worst_psi = f64::INFINITY;
        for op in &ops {
            for _ in 0..per_op {
                let x = s.sample_rng(&Region::Default, &mut rng).unwrap();
                let y = s.sample_rng(&Region::Default, &mut rng).unwrap();
                worst_psi = worst_psi.min(psi(s, op, &x, &y).unwrap());
            }
        }
        assert!(worst_psi >= SLACK_TOL, "{}: psi slack {worst_psi}", s.name());

        let mut worst_cs = f64::INFINITY;
        for _ in 0..10_000 {
            let x = s.sample_rng(&Region::Default, &mut rng).unwrap();
            let y = s.sample_rng(&Region::Default, &mut rng).unwrap();
            let u = s.sample_rng(&Region::Default, &mut rng).unwrap();
            let v = s.sample_rng(&Region::Default, &mut rng).unwrap();
            let bound = s.distance(&x, &y).unwrap() * s.distance(&u, &v).unwrap();
            worst_cs = worst_cs.min(bound - delta(s, &x, &y, &u, &v).unwrap());
        }
        assert!(worst_cs >= SLACK_TOL, "{}: four-point slack {worst_cs}", s.name());
    }
    println!("criterion 02 psi nonnegativity and four-point bound: PASS");
}

#[test]
fn criterion_03_projector_firmness() {
    let e2 = ModelSpace::euclidean(2);
    let disk = ModelSpace::poincare_disk();
    let cap = ModelSpace::spherical_cap(1.0, 0.3).unwrap();
    let tree = ModelSpace::star_tree(&[1.0, 1.0, 1.0]).unwrap();
    let cases: Vec<(&ModelSpace, ConvexSet)> = vec![
        (&e2, ConvexSet::ball(Point::euclidean(&[0.2, -0.1]), 0.7).unwrap()),
        (&e2, ConvexSet::halfspace(&[1.0, 1.0], 0.3).unwrap()),
        (
            &e2,
            ConvexSet::segment(Point::euclidean(&[-1.0, 0.4]), Point::euclidean(&[0.9, -0.6])),
        ),
        (&disk, ConvexSet::ball(Point::disk(0.1, 0.0), 0.6).unwrap()),
        (
            &disk,
            ConvexSet::segment(Point::disk(-0.4, 0.1), Point::disk(0.5, -0.2)),
        ),
        (&cap, ConvexSet::ball(cap.base_point(), 0.3).unwrap()),
        (&tree, ConvexSet::subtree(&[0.6, 0.4, 0.0]).unwrap()),
    ];
    for (i, (s, set)) in cases.iter().enumerate() {
        let proj = Operator::projector(set.clone());
        let worst = worst_pafne_slack(*s, &proj, set, 0.5, 0.0, 1000, 100 + i as u64);
        assert!(
            worst >= SLACK_TOL,
            "{} descriptor {i}: firmness slack {worst}",
            s.name()
        );
    }
    println!("criterion 03 projector firmness: PASS");
}

#[test]
fn criterion_04_composition_constants() {
    // The recursion reproduces the known constants exactly.
    assert!((composition_alpha(&[0.5, 0.5], 2.0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
    assert!((composition_alpha(&[0.5; 3], 2.0).unwrap() - 0.75).abs() < 1e-15);
    assert!((composition_alpha(&[0.5; 4], 2.0).unwrap() - 0.8).abs() < 1e-15);

    let e2 = ModelSpace::euclidean(2);
    let disk = ModelSpace::poincare_disk();
    let tree = ModelSpace::star_tree(&[1.0, 1.0, 1.0, 1.0]).unwrap();

    let euclid_sets = |n: usize| -> Vec<ConvexSet> {
        (0..n)
            .map(|i| {
                let phi = std::f64::consts::PI * i as f64 / n as f64;
                ConvexSet::halfspace(&[phi.cos(), phi.sin()], 0.3).unwrap()
            })
            .collect()
    };
    let disk_sets = |n: usize| -> Vec<ConvexSet> {
        (0..n)
            .map(|i| {
                let phi = std::f64::consts::TAU * i as f64 / n as f64;
                ConvexSet::ball(Point::disk(0.2 * phi.cos(), 0.2 * phi.sin()), 0.55).unwrap()
            })
            .collect()
    };
    let tree_sets = |n: usize| -> Vec<ConvexSet> {
        (0..n)
            .map(|i| {
                let mut offs = vec![0.0; 4];
                offs[0] = 0.8 - 0.05 * i as f64;
                offs[1 + (i % 3)] = 0.5;
                ConvexSet::subtree(&offs).unwrap()
            })
            .collect()
    };
    // Anchor region inside every intersection.
    let anchor_region: Vec<(&ModelSpace, ConvexSet)> = vec![
        (&e2, ConvexSet::ball(Point::euclidean(&[0.0, 0.0]), 0.25).unwrap()),
        (&disk, ConvexSet::ball(Point::disk(0.0, 0.0), 0.12).unwrap()),
        (&tree, ConvexSet::subtree(&[0.5, 0.0, 0.0, 0.0]).unwrap()),
    ];
    // m firmly nonexpansive factors compose to m/(m+1); the values 2/3 and
    // 3/4 are the certified constants for the two- and three-fold cyclic
    // projection operators.
    for n in [2usize, 3, 4] {
        let alpha_bar = composition_alpha(&vec![0.5; n], 2.0).unwrap();
        assert!((alpha_bar - n as f64 / (n as f64 + 1.0)).abs() < 1e-15);
        for (which, (s, anchors)) in anchor_region.iter().enumerate() {
            let sets = match which {
                0 => euclid_sets(n),
                1 => disk_sets(n),
                _ => tree_sets(n),
            };
            // Anchors must really be common fixed points.
            let composed =
                Operator::compose(sets.iter().cloned().map(Operator::projector).collect())
                    .unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(300 + n as u64);
            for _ in 0..20 {
                let raw = s.sample_rng(&Region::Default, &mut rng).unwrap();
                let y = project(s, anchors, &raw).unwrap();
                for set in &sets {
                    assert!(set.contains(s, &y).unwrap(), "anchor region outside a set");
                }
            }
            let worst =
                worst_pafne_slack(*s, &composed, anchors, alpha_bar, 0.0, 1000, 400 + n as u64);
            assert!(
                worst >= SLACK_TOL,
                "{} N={n}: composition slack {worst}",
                s.name()
            );
        }
    }
    println!("criterion 04 composition constants: PASS");
}

#[test]
fn criterion_05_km_constants() {
    let e2 = ModelSpace::euclidean(2);
    let disk = ModelSpace::poincare_disk();
    let cases: Vec<(&ModelSpace, ConvexSet)> = vec![
        (&e2, ConvexSet::ball(Point::euclidean(&[0.1, 0.2]), 0.6).unwrap()),
        (&disk, ConvexSet::ball(Point::disk(-0.1, 0.1), 0.5).unwrap()),
    ];
    for lambda in [0.25, 0.5, 0.75] {
        let alpha = km_alpha(lambda, 2.0);
        assert!((alpha - lambda).abs() < 1e-15); // p = 2 closed form
        for (i, (s, set)) in cases.iter().enumerate() {
            let relaxed = Operator::km(Operator::projector(set.clone()), lambda).unwrap();
            let worst = worst_pafne_slack(
                *s,
                &relaxed,
                set,
                alpha,
                0.0,
                500,
                500 + i as u64 + (lambda * 100.0) as u64,
            );
            assert!(
                worst >= SLACK_TOL,
                "{} lambda={lambda}: km slack {worst}",
                s.name()
            );
        }
    }
    println!("criterion 05 km relaxation constants: PASS");
}

#[test]
fn criterion_06_prox_consistency() {
    // (a) prox of an indicator agrees with the projector.
    let e2 = ModelSpace::euclidean(2);
    let disk = ModelSpace::poincare_disk();
    let cap = ModelSpace::spherical_cap(1.0, 0.3).unwrap();
    let tree = ModelSpace::star_tree(&[1.0, 1.0, 1.0]).unwrap();
    let cases: Vec<(&ModelSpace, ConvexSet)> = vec![
        (&e2, ConvexSet::ball(Point::euclidean(&[0.1, 0.2]), 0.6).unwrap()),
        (&e2, ConvexSet::halfspace(&[2.0, -1.0], 0.2).unwrap()),
        (&disk, ConvexSet::ball(Point::disk(0.0, 0.1), 0.5).unwrap()),
        (&cap, ConvexSet::ball(cap.base_point(), 0.25).unwrap()),
        (&tree, ConvexSet::subtree(&[0.4, 0.0, 0.7]).unwrap()),
    ];
    for (i, (s, set)) in cases.iter().enumerate() {
        let f = ProperFunction::Indicator(set.clone());
        for x in sample_many(s, 100, 600 + i as u64) {
            let a = prox_p(s, &f, 0.9, &x).unwrap();
            let b = project(s, set, &x).unwrap();
            assert!(
                s.distance(&a, &b).unwrap() < 1e-8,
                "{}: prox/projector gap",
                s.name()
            );
        }
    }

    // (b) Almost-firm certificate on a positively curved cap whose
    // convexity constant exceeds 1: alpha = (c-1)/c with violation
    // (2-c)/(c-1) at minimizers of f.
    let cap2 = ModelSpace::spherical_cap(1.0, 0.5).unwrap();
    let c = cap2.params().c;
    assert!(c > 1.0 && c <= 2.0, "cap constant {c} outside (1,2]");
    let alpha_c = (c - 1.0) / c;
    let eps_c = (2.0 - c) / (c - 1.0);
    let z = cap2
        .sample(&Region::Default, 80)
        .unwrap();
    let quad = ProperFunction::SquaredDistanceTo(z.clone());
    let prox_op = Operator::prox(quad, 1.0).unwrap();
    let xs = sample_many(&cap2, 1000, 81);
    let cert = check_pafne(&cap2, &prox_op, &z, alpha_c, eps_c, &xs).unwrap();
    assert!(cert.valid(), "cap prox certificate slack {}", cert.worst_slack);
    // Same certificate for the indicator prox at points of its set.
    let ball = ConvexSet::ball(cap2.base_point(), 0.2).unwrap();
    let ind_prox = Operator::prox(ProperFunction::Indicator(ball.clone()), 1.0).unwrap();
    let worst = worst_pafne_slack(&cap2, &ind_prox, &ball, alpha_c, eps_c, 300, 82);
    assert!(worst >= SLACK_TOL, "cap indicator prox slack {worst}");

    // (c) No violation on the CAT(0) members: alpha = 1/2, eps = 0.
    for lambda in [0.5, 1.0, 2.0] {
        let z = Point::disk(0.15, -0.2);
        let prox_op =
            Operator::prox(ProperFunction::SquaredDistanceTo(z.clone()), lambda).unwrap();
        let xs = sample_many(&disk, 1000, 83);
        let cert = check_pafne(&disk, &prox_op, &z, 0.5, 0.0, &xs).unwrap();
        assert!(cert.valid(), "disk prox slack {}", cert.worst_slack);
    }
    let dist_f = ProperFunction::DistPower {
        set: ConvexSet::ball(Point::disk(0.0, 0.0), 0.4).unwrap(),
        power: 2.0,
    };
    let dp_prox = Operator::prox(dist_f, 0.7).unwrap();
    let dp_ball = ConvexSet::ball(Point::disk(0.0, 0.0), 0.4).unwrap();
    let worst = worst_pafne_slack(&disk, &dp_prox, &dp_ball, 0.5, 0.0, 300, 84);
    assert!(worst >= SLACK_TOL, "disk distance-power prox slack {worst}");

    println!("criterion 06 prox consistency and violation bounds: PASS");
}

#[test]
fn criterion_07_barycenter() {
    // Euclidean weighted mean to 1e-10.
    let mut rng = ChaCha8Rng::seed_from_u64(700);
    for dim in [2usize, 3] {
        let s = ModelSpace::euclidean(dim);
        for _ in 0..20 {
            let pts = sample_many(&s, 4, rng.gen());
            let raw: Vec<f64> = (0..4).map(|_| rng.gen::<f64>() + 0.1).collect();
            let total: f64 = raw.iter().sum();
            let w: Vec<f64> = raw.iter().map(|v| v / total).collect();
            let bc = barycenter(&s, &pts, &Weights::new(&w).unwrap(), 2.0).unwrap();
            let mut mean = vec![0.0; dim];
            for (wi, p) in w.iter().zip(&pts) {
                for (mc, pc) in mean.iter_mut().zip(p.coords()) {
                    *mc += wi * pc;
                }
            }
            let gap = s.distance(&bc, &Point::Euclidean(mean)).unwrap();
            assert!(gap < 1e-10, "weighted mean gap {gap}");
        }
    }

    let spaces = [
        ModelSpace::euclidean(2),
        ModelSpace::poincare_disk(),
        ModelSpace::spherical_cap(1.0, 0.3).unwrap(),
        ModelSpace::star_tree(&[1.0, 1.0, 1.0]).unwrap(),
    ];
    for s in &spaces {
        // Five restarts agree to 1e-8 (uniqueness).
        let pts = sample_many(s, 4, 701);
        let w = Weights::new(&[0.4, 0.3, 0.2, 0.1]).unwrap();
        let reference = barycenter(s, &pts, &w, 2.0).unwrap();
        for start in sample_many(s, 5, 702) {
            let again = barycenter_from(s, &pts, &w, 2.0, start).unwrap();
            let gap = s.distance(&reference, &again).unwrap();
            assert!(gap < 1e-8, "{}: restart gap {gap}", s.name());
        }
        // Two-point barycenters are geodesic points to 1e-8.
        for seed in 0..10u64 {
            let two = sample_many(s, 2, 703 + seed);
            let t = 0.1 + 0.8 * (seed as f64 / 10.0);
            let bc = barycenter(s, &two, &Weights::new(&[1.0 - t, t]).unwrap(), 2.0).unwrap();
            let geo = s.geodesic_point(&two[0], &two[1], t).unwrap();
            let gap = s.distance(&bc, &geo).unwrap();
            assert!(gap < 1e-8, "{}: two-point gap {gap}", s.name());
        }
    }
    println!("criterion 07 barycenter: PASS");
}

#[test]
fn criterion_08_p_combination_constant() {
    let e2 = ModelSpace::euclidean(2);
    let disk = ModelSpace::poincare_disk();
    let cases: Vec<(&ModelSpace, ConvexSet, ConvexSet, ConvexSet)> = vec![
        (
            &e2,
            ConvexSet::halfspace(&[1.0, 0.0], 0.4).unwrap(),
            ConvexSet::halfspace(&[0.0, 1.0], 0.4).unwrap(),
            ConvexSet::ball(Point::euclidean(&[0.0, 0.0]), 0.35).unwrap(),
        ),
        (
            &disk,
            ConvexSet::ball(Point::disk(0.15, 0.0), 0.55).unwrap(),
            ConvexSet::ball(Point::disk(-0.15, 0.0), 0.55).unwrap(),
            ConvexSet::ball(Point::disk(0.0, 0.0), 0.15).unwrap(),
        ),
    ];
    for (s, c1, c2, anchors) in &cases {
        let comb = Operator::p_combination(
            vec![
                Operator::projector(c1.clone()),
                Operator::projector(c2.clone()),
            ],
            Weights::uniform(2),
        )
        .unwrap();
        // max over the factor constants: both projectors carry 1/2.
        let worst = worst_pafne_slack(*s, &comb, anchors, 0.5, 0.0, 1000, 800);
        assert!(worst >= SLACK_TOL, "{}: combination slack {worst}", s.name());
        // Common fixed points stay fixed.
        let mut rng = ChaCha8Rng::seed_from_u64(801);
        for _ in 0..50 {
            let raw = s.sample_rng(&Region::Default, &mut rng).unwrap();
            let y = project(s, anchors, &raw).unwrap();
            let ty = comb.apply(s, &y).unwrap();
            assert!(s.distance(&ty, &y).unwrap() < 1e-8);
        }
    }
    println!("criterion 08 combination constant: PASS");
}

#[test]
fn criterion_09_asymptotic_regularity_and_limits() {
    // Two intersecting hyperbolic balls.
    let disk = ModelSpace::poincare_disk();
    let b1 = ConvexSet::ball(Point::disk(-0.35, 0.0), 0.75).unwrap();
    let b2 = ConvexSet::ball(Point::disk(0.35, 0.0), 0.75).unwrap();
    let rule = StopRule::residual(1e-10, 100_000);
    let tr = cyclic_projections(&disk, &[b1.clone(), b2.clone()], &Point::disk(0.05, 0.85), &rule)
        .unwrap();
    assert!(tr.final_residual() < 1e-8, "disk residual {}", tr.final_residual());
    assert!(tr.len() - 1 <= 100_000);
    for set in [&b1, &b2] {
        let pr = project(&disk, set, tr.final_point()).unwrap();
        assert!(disk.distance(&pr, tr.final_point()).unwrap() < 1e-6);
    }

    // Two Euclidean halfplanes meeting at an acute wedge.
    let e2 = ModelSpace::euclidean(2);
    let beta = 0.4_f64;
    let h1 = ConvexSet::halfspace(&[0.0, 1.0], 0.0).unwrap();
    let h2 = ConvexSet::halfspace(&[-beta.sin(), -beta.cos()], 0.0).unwrap();
    let tr = cyclic_projections(&e2, &[h1.clone(), h2.clone()], &Point::euclidean(&[-1.0, 2.0]), &rule)
        .unwrap();
    assert!(tr.final_residual() < 1e-8, "wedge residual {}", tr.final_residual());
    for set in [&h1, &h2] {
        let pr = project(&e2, set, tr.final_point()).unwrap();
        assert!(e2.distance(&pr, tr.final_point()).unwrap() < 1e-6);
    }
    // Fejér monotonicity toward sampled points of the wedge.
    let mut rng = ChaCha8Rng::seed_from_u64(900);
    for _ in 0..10 {
        let raw = e2.sample_rng(&Region::Default, &mut rng).unwrap();
        let y = project(&e2, &h2, &project(&e2, &h1, &raw).unwrap()).unwrap();
        if !(h1.contains(&e2, &y).unwrap() && h2.contains(&e2, &y).unwrap()) {
            continue;
        }
        for w in tr.iterates.windows(2) {
            let d0 = e2.distance(&w[0], &y).unwrap();
            let d1 = e2.distance(&w[1], &y).unwrap();
            assert!(d1 <= d0 + 1e-9);
        }
    }
    println!("criterion 09 asymptotic regularity and limit membership: PASS");
}

/// The halfplane-wedge trace used by the rate-certification criteria.
fn wedge_trace() -> (ModelSpace, geofirm::algorithms::Trace, Vec<Point>) {
    let e2 = ModelSpace::euclidean(2);
    let beta = 0.4_f64;
    let h1 = ConvexSet::halfspace(&[0.0, 1.0], 0.0).unwrap();
    let h2 = ConvexSet::halfspace(&[-beta.sin(), -beta.cos()], 0.0).unwrap();
    let op = Operator::compose(vec![
        Operator::projector(h1),
        Operator::projector(h2),
    ])
    .unwrap();
    let mut tr = iterate(
        &e2,
        &op,
        &Point::euclidean(&[-1.0, 2.0]),
        &StopRule::residual(1e-12, 100_000),
    )
    .unwrap();
    // Fixed-set stand-in: the final iterate pushed through one more step.
    let reference = vec![op.apply(&e2, tr.final_point()).unwrap()];
    tr.compute_dist_to_fix(&e2, &reference).unwrap();
    (e2, tr, reference)
}

#[test]
fn criterion_10_rate_certification_round_trip() {
    let (e2, tr, reference) = wedge_trace();
    let alpha_bar = 2.0 / 3.0;
    let rec = certify(&e2, &tr, &reference, alpha_bar, GaugeFamily::Linear).unwrap();
    // tau = c (1 - alpha)/(2 alpha) with c = 2 and alpha = 2/3.
    assert!((rec.tau - 0.5).abs() < 1e-12);
    let report = rec.report.as_ref().unwrap();
    assert!(report.valid(), "fit violation {}", report.worst_violation);
    assert!(report.gauge.kappa.is_finite() && report.gauge.kappa > 0.0);
    assert!(rec.gauge_monotone && rec.first_violation.is_none());
    assert!(rec.envelope_ok, "envelope margins broken");
    assert!(rec
        .envelope_margins
        .iter()
        .all(|m| *m >= SLACK_TOL));
    assert!(rec.certified);
    println!("criterion 10 rate certification round trip: PASS");
}

#[test]
fn criterion_11_necessity() {
    let (_e2, tr, _reference) = wedge_trace();
    let alpha_bar = 2.0 / 3.0;
    let rec = certify(&_e2, &tr, &_reference, alpha_bar, GaugeFamily::Linear).unwrap();
    let theta = rec.theta.as_ref().unwrap().clone();
    let dists = tr.dist_to_fix.as_ref().unwrap();
    let t_hi = dists[0] * 4.0;
    let induced = rho_from_theta(move |t| theta.eval(t), t_hi).unwrap();
    for (r, e) in tr.residuals.iter().zip(dists) {
        let bound = induced.eval(*r).unwrap();
        assert!(bound - e >= SLACK_TOL, "necessity slack {}", bound - e);
    }
    println!("criterion 11 necessity of metric subregularity: PASS");
}

#[test]
fn criterion_12_negative_control() {
    // Rotation by one radian: nonexpansive with fixed point 0, but the
    // distance to the fixed set never contracts.
    let e2 = ModelSpace::euclidean(2);
    let tr = iterate(
        &e2,
        &Rotation(1.0),
        &Point::euclidean(&[1.0, 0.0]),
        &StopRule::residual(1e-9, 150),
    )
    .unwrap();
    let rec = certify(
        &e2,
        &tr,
        &[Point::euclidean(&[0.0, 0.0])],
        2.0 / 3.0,
        GaugeFamily::Linear,
    )
    .unwrap();
    assert!(!rec.certified);
    assert!(rec.reason.is_some());
    println!("criterion 12 negative control (rotation not certified): PASS");
}

#[test]
fn criterion_13_determinism() {
    let cfg = parse_config(preset_config("cp-euclidean-halfplanes").unwrap()).unwrap();
    let dir1 = std::env::temp_dir().join(format!("geofirm-acc-det1-{}", std::process::id()));
    let dir2 = std::env::temp_dir().join(format!("geofirm-acc-det2-{}", std::process::id()));
    std::fs::create_dir_all(&dir1).unwrap();
    std::fs::create_dir_all(&dir2).unwrap();
    let o1 = run_experiment(&cfg, &dir1).unwrap();
    let o2 = run_experiment(&cfg, &dir2).unwrap();
    let t1 = std::fs::read(&o1.trace_path).unwrap();
    let t2 = std::fs::read(&o2.trace_path).unwrap();
    assert_eq!(t1, t2, "trace CSVs differ between identical runs");
    let c1 = std::fs::read(o1.cert_path.as_ref().unwrap()).unwrap();
    let c2 = std::fs::read(o2.cert_path.as_ref().unwrap()).unwrap();
    assert_eq!(c1, c2, "certification files differ between identical runs");
    std::fs::remove_dir_all(&dir1).ok();
    std::fs::remove_dir_all(&dir2).ok();
    println!("criterion 13 determinism: PASS");
}
