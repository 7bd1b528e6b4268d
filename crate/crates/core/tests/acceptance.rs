//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Criteria 1-8 run once on a single worker; criterion 9 reruns each of them
//! on 4 and 8 workers and compares the serialized artifacts byte for byte.
//! All randomness derives from `MASTER_SEED`, fixed before the suite was
//! first run.

use std::f64::consts::SQRT_2;
use std::time::Instant;

use hullwalk::asymptotics::{drift_geometry, sigma_d2, sigma_l2};
use hullwalk::geometry::{
    cauchy_perimeter, convex_hull, diameter, diameter_brute_force, perimeter, AngleGrid, Point2,
};
use hullwalk::io::{grid_csv_string, samples_csv_string, to_json_string};
use hullwalk::montecarlo::{
    l2_error_curve, resampling_bound_check, run_experiment, slln_curve, standardize,
    variance_ratio, with_workers, ExperimentConfig, Functional,
};
use hullwalk::oracle::{mds_check, DiscreteEnsembleSpec};
use hullwalk::rng::{derive_seed, RngStream};
use hullwalk::stats::{normality_pvalue, pvalue_grid, GridSpec, NEGLOG_THRESHOLD};
use hullwalk::walks::{resample_at, Ensemble, StepDistribution};

const MASTER_SEED: u64 = 0x5EED_2026;

struct Outcome {
    pass: bool,
    detail: String,
    /// Serialized outputs compared across worker counts.
    artifacts: Vec<String>,
}

fn p(x: f64, y: f64) -> Point2 {
    Point2::new(x, y)
}

fn seed(criterion: u64) -> u64 {
    derive_seed(MASTER_SEED, criterion)
}

fn geometry_exactness() -> Outcome {
    let mut rng = RngStream::new(seed(1), 0);
    let grid = AngleGrid::new(1 << 14).unwrap();
    let (mut worst_diam, mut worst_per, mut max_vertices) = (0.0f64, 0.0f64, 0usize);
    let mut rows = String::new();
    for case in 0..1000 {
        // jittered points on a random ellipse, so most of them are hull vertices
        let k = 3 + (rng.next_u64() % 198) as usize;
        let (a, b) = (0.1 + 10.0 * rng.uniform(), 0.1 + 10.0 * rng.uniform());
        let tilt = 6.0 * rng.uniform();
        let center = p(100.0 * rng.uniform() - 50.0, 100.0 * rng.uniform() - 50.0);
        let pts: Vec<Point2> = (0..k)
            .map(|_| {
                let t = std::f64::consts::TAU * rng.uniform();
                let r = 1.0 - 1e-4 * rng.uniform();
                center + p(a * r * t.cos(), b * r * t.sin()).rotated(tilt)
            })
            .collect();
        let hull = convex_hull(&pts).unwrap();
        max_vertices = max_vertices.max(hull.len());
        let (d, db) = (diameter(&hull), diameter_brute_force(&hull));
        let (l, lc) = (perimeter(&hull), cauchy_perimeter(&hull, &grid));
        worst_diam = worst_diam.max((d - db).abs() / db);
        worst_per = worst_per.max((l - lc).abs() / l);
        rows.push_str(&format!("{case},{},{d:?},{l:?},{lc:?}\n", hull.len()));
    }
    Outcome {
        pass: worst_diam <= 1e-12 && worst_per <= 1e-6 && max_vertices <= 200,
        detail: format!(
            "1000 hulls (<= {max_vertices} vertices): max rel diam err {worst_diam:.2e} (tol 1e-12), \
             max rel Cauchy perimeter err {worst_per:.2e} (tol 1e-6)"
        ),
        artifacts: vec![rows],
    }
}

fn oracle_identities() -> Outcome {
    let mut rng = RngStream::new(seed(2), 0);
    let mut point = || p(4.0 * rng.uniform() - 2.0, 4.0 * rng.uniform() - 2.0);
    let mut reports = Vec::new();
    for _ in 0..8 {
        let walks: Vec<StepDistribution> = (0..2)
            .map(|_| {
                let q = 0.1 + 0.8 * (point().x + 2.0) / 4.0;
                StepDistribution::discrete(vec![(point(), q), (point(), 1.0 - q)]).unwrap()
            })
            .collect();
        for n in 1..=3 {
            let spec = DiscreteEnsembleSpec::new(n, walks.clone()).unwrap();
            reports.push(mds_check(&spec).unwrap());
        }
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    let worst = reports.iter().fold(0.0f64, |m, r| {
        m.max(r.perimeter.variance_residual / r.perimeter.variance.max(f64::MIN_POSITIVE))
            .max(r.diameter.variance_residual / r.diameter.variance.max(f64::MIN_POSITIVE))
    });
    Outcome {
        pass: failed == 0,
        detail: format!(
            "{} two-point-support ensembles (n = 1..3): {failed} failed; max rel variance residual {worst:.2e} (tol 1e-10)",
            reports.len()
        ),
        artifacts: vec![to_json_string(&reports).unwrap()],
    }
}

fn slln() -> Outcome {
    let cfg = ExperimentConfig::two_walk_isotropic(p(1.0, 0.0), p(0.0, 1.0), 1.0, 1.0, 1, 20, seed(3))
        .unwrap()
        .with_n_grid(vec![1_000, 10_000, 100_000]);
    let curve = slln_curve(&cfg).unwrap();
    let pts = &curve.points;
    let decreasing = |f: fn(&hullwalk::montecarlo::SllnPoint) -> f64| {
        pts.windows(2).all(|w| f(&w[1]) < f(&w[0]))
    };
    let last = pts.last().unwrap();
    let pass = decreasing(|q| q.hausdorff)
        && decreasing(|q| q.perimeter_error)
        && decreasing(|q| q.diameter_error)
        && last.hausdorff < 0.02
        && last.perimeter_error < 0.02
        && last.diameter_error < 0.02;
    let fmt = |f: fn(&hullwalk::montecarlo::SllnPoint) -> f64| {
        pts.iter().map(|q| format!("{:.2e}", f(q))).collect::<Vec<_>>().join(" > ")
    };
    Outcome {
        pass,
        detail: format!(
            "medians over 20 seeds at n = 1e3, 1e4, 1e5: hausdorff {}; |L/n - (2+sqrt2)| {}; |D/n - sqrt2| {}",
            fmt(|q| q.hausdorff),
            fmt(|q| q.perimeter_error),
            fmt(|q| q.diameter_error)
        ),
        artifacts: vec![to_json_string(&curve).unwrap()],
    }
}

fn variance_asymptotics() -> Outcome {
    let cfg = ExperimentConfig::two_walk_isotropic(p(1.0, 0.0), p(0.0, 1.0), 1.0, 1.0, 10_000, 2000, seed(4))
        .unwrap();
    let set_l = run_experiment(&cfg).unwrap();
    let ratio_l = variance_ratio(&set_l).unwrap().var_l_over_n;
    let target_l = 4.0 + 2.0 * SQRT_2;

    // walk-1-dominant diameter: |mu1| = 2 > |mu1 - mu2| = 1.80 > |mu2| = 1.12
    let sigma = 2.0;
    let cfg_d = ExperimentConfig::two_walk_isotropic(p(2.0, 0.0), p(0.5, 1.0), sigma, 1.0, 10_000, 2000, seed(40))
        .unwrap();
    let set_d = run_experiment(&cfg_d).unwrap();
    let ratio_d = variance_ratio(&set_d).unwrap().var_d_over_n;

    let in_band = |x: f64, t: f64| x >= 0.85 * t && x <= 1.15 * t;
    Outcome {
        pass: in_band(ratio_l, target_l) && in_band(ratio_d, sigma),
        detail: format!(
            "Var[L]/n = {ratio_l:.4} vs {target_l:.4} (ratio {:.3}); Var[D]/n = {ratio_d:.4} vs {sigma} (ratio {:.3}); band [0.85, 1.15]",
            ratio_l / target_l,
            ratio_d / sigma
        ),
        artifacts: vec![samples_csv_string(&set_l).unwrap(), samples_csv_string(&set_d).unwrap()],
    }
}

fn clt() -> Outcome {
    let (m1, m2) = (p(2.0, 1.0), p(-1.0, 1.0));
    let g = drift_geometry(m1, m2).unwrap();
    let d1 = StepDistribution::isotropic(m1, 1.0).unwrap();
    let d2 = StepDistribution::isotropic(m2, 1.0).unwrap();
    let (sl, sd) = (sigma_l2(&d1, &d2, &g).unwrap(), sigma_d2(&d1, &d2, &g).unwrap());
    let (mut ok_l, mut ok_d) = (0, 0);
    let mut ps = Vec::new();
    let mut artifacts = Vec::new();
    for repeat in 0..5 {
        let cfg = ExperimentConfig::new(vec![d1.clone(), d2.clone()], 10_000, 1000, derive_seed(seed(5), repeat));
        let set = run_experiment(&cfg).unwrap();
        let pl = normality_pvalue(&standardize(&set, Functional::Perimeter, sl).unwrap()).unwrap();
        let pd = normality_pvalue(&standardize(&set, Functional::Diameter, sd).unwrap()).unwrap();
        ok_l += usize::from(pl > 0.01);
        ok_d += usize::from(pd > 0.01);
        ps.push(format!("({pl:.3}, {pd:.3})"));
        artifacts.push(samples_csv_string(&set).unwrap());
    }
    Outcome {
        pass: ok_l >= 4 && ok_d >= 4,
        detail: format!(
            "AD p > 0.01 in {ok_l}/5 (L) and {ok_d}/5 (D) repeats, need >= 4; (p_L, p_D) = {}",
            ps.join(" ")
        ),
        artifacts,
    }
}

fn l2_decay() -> Outcome {
    let grid = vec![100, 1_000, 10_000];
    let cfg_l = ExperimentConfig::two_walk_isotropic(p(1.0, 0.0), p(0.0, 1.0), 1.0, 1.0, 1, 500, seed(6))
        .unwrap()
        .with_n_grid(grid.clone());
    let cfg_d = ExperimentConfig::two_walk_isotropic(p(2.0, 0.0), p(0.5, 1.0), 2.0, 1.0, 1, 500, seed(60))
        .unwrap()
        .with_n_grid(grid);
    let cl = l2_error_curve(&cfg_l, Functional::Perimeter).unwrap();
    let cd = l2_error_curve(&cfg_d, Functional::Diameter).unwrap();
    let dec = |c: &[hullwalk::montecarlo::L2Point]| c.windows(2).all(|w| w[1].second_moment < w[0].second_moment);
    let fmt = |c: &[hullwalk::montecarlo::L2Point]| {
        c.iter().map(|q| format!("{:.3e}", q.second_moment)).collect::<Vec<_>>().join(" > ")
    };
    Outcome {
        pass: dec(&cl) && dec(&cd),
        detail: format!(
            "residual second moment at n = 1e2, 1e3, 1e4: perimeter {}; diameter {}",
            fmt(&cl),
            fmt(&cd)
        ),
        artifacts: vec![to_json_string(&(cl, cd)).unwrap()],
    }
}

fn resampling_bound() -> Outcome {
    let d = vec![
        StepDistribution::isotropic(p(1.0, 0.0), 1.0).unwrap(),
        StepDistribution::isotropic(p(0.0, 1.0), 1.0).unwrap(),
    ];
    let mut rng = RngStream::new(seed(7), 1);
    let (mut violations, mut worst) = (0, 0.0f64);
    let mut rows = String::new();
    for rep in 0..1000u64 {
        let ens = Ensemble::generate(&d, 100, seed(7), rep).unwrap();
        let i = 1 + (rng.next_u64() % 100) as usize;
        let res = resample_at(&ens, i, &mut rng).unwrap();
        let r = resampling_bound_check(&ens, i, &res).unwrap();
        violations += usize::from(!r.holds);
        worst = worst.max(r.sup_delta / r.bound);
        rows.push_str(&format!("{rep},{i},{:?},{:?},{:?}\n", r.sup_delta, r.bound, r.perimeter_delta));
    }
    Outcome {
        pass: violations == 0,
        detail: format!(
            "1000 resampling pairs at n = 100, 4096 angles: {violations} violations; max sup|dR| / bound = {worst:.3}"
        ),
        artifacts: vec![rows],
    }
}

fn heatmap_geography() -> Outcome {
    let sigmas = vec![0.5, 5.0, 50.0, 500.0];
    let spec = |mu1, mu2, s| GridSpec {
        sigma_values: sigmas.clone(),
        n: 2000,
        reps: 200,
        repeats: 3,
        master_seed: s,
        ..GridSpec::new(mu1, mu2)
    };
    let a = pvalue_grid(&spec(p(100.0, 0.0), p(0.0, 0.0), seed(8))).unwrap();
    let b = pvalue_grid(&spec(p(100.0, 0.0), p(100.0, 0.0), seed(80))).unwrap();

    let mut reject_ok = true;
    let mut accept_ok = true;
    let mut misses = Vec::new();
    for c in a.cells.iter().flatten() {
        let v = c.neglog_l.unwrap_or(f64::NAN);
        if c.sigma2 >= 50.0 && c.sigma1 < 50.0 && !(v > NEGLOG_THRESHOLD) {
            reject_ok = false;
            misses.push(format!("({}, {}) = {v:.2} should exceed 2", c.sigma1, c.sigma2));
        }
        if c.sigma1 >= c.sigma2 && !(v <= NEGLOG_THRESHOLD) {
            accept_ok = false;
            misses.push(format!("({}, {}) = {v:.2} should be <= 2", c.sigma1, c.sigma2));
        }
    }
    let equal_drift_max = b
        .cells
        .iter()
        .flatten()
        .filter(|c| c.sigma2 >= 50.0)
        .filter_map(|c| c.neglog_l)
        .fold(f64::NEG_INFINITY, f64::max);
    let equal_ok = equal_drift_max > NEGLOG_THRESHOLD;

    let table = |g: &hullwalk::stats::PValueGrid| {
        g.cells
            .iter()
            .map(|row| {
                row.iter()
                    .map(|c| c.neglog_l.map_or("  nan".into(), |v| format!("{v:5.1}")))
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect::<Vec<_>>()
            .join(" | ")
    };
    Outcome {
        pass: reject_ok && accept_ok && equal_ok,
        detail: format!(
            "-ln(avg p_L), rows sigma1 = 0.5..500, cols sigma2 = 0.5..500: mu2 = 0 [{}]; mu1 = mu2 [{}]; \
             equal-drift max over sigma2 >= 50 = {equal_drift_max:.2}{}",
            table(&a),
            table(&b),
            if misses.is_empty() { String::new() } else { format!("; misses: {}", misses.join(", ")) }
        ),
        artifacts: vec![grid_csv_string(&a).unwrap(), grid_csv_string(&b).unwrap()],
    }
}

type Suite = (u32, &'static str, fn() -> Outcome);

fn main() {
    let suites: [Suite; 8] = [
        (1, "geometry exactness", geometry_exactness),
        (2, "oracle identities", oracle_identities),
        (3, "strong law", slln),
        (4, "variance asymptotics", variance_asymptotics),
        (5, "central limit", clt),
        (6, "L2 approximation decay", l2_decay),
        (7, "resampling bound", resampling_bound),
        (8, "normality heatmap geography", heatmap_geography),
    ];

    let mut all_pass = true;
    let mut baseline = Vec::new();
    for (id, name, run) in suites {
        let t = Instant::now();
        let out = with_workers(1, run).unwrap();
        println!(
            "{} [{id}] {name}: {} ({:.1}s)",
            if out.pass { "PASS" } else { "FAIL" },
            out.detail,
            t.elapsed().as_secs_f64()
        );
        all_pass &= out.pass;
        baseline.push(out.artifacts);
    }

    let t = Instant::now();
    let mut mismatches = Vec::new();
    for workers in [4, 8] {
        for ((id, _, run), base) in suites.iter().zip(&baseline) {
            let out = with_workers(workers, run).unwrap();
            if &out.artifacts != base {
                mismatches.push(format!("criterion {id} at {workers} workers"));
            }
        }
    }
    let det_pass = mismatches.is_empty();
    println!(
        "{} [9] determinism: artifacts of criteria 1-8 at 1, 4 and 8 workers are {} ({:.1}s)",
        if det_pass { "PASS" } else { "FAIL" },
        if det_pass { "byte-identical".to_string() } else { format!("different: {}", mismatches.join(", ")) },
        t.elapsed().as_secs_f64()
    );
    all_pass &= det_pass;

    if !all_pass {
        std::process::exit(1);
    }
}
