mod common;

use std::sync::OnceLock;

use common::{barenblatt_state, random_state, report};
use pme_particles::diagnostics::{metric_dh, metric_dh_all, tv_halfpower, z_min, MetricOrder};
use pme_particles::difference::{discrete_laplacian, forward_diff};
use pme_particles::prelude::*;
use pme_particles::reference::n1_gap_closed_form;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::beta::beta;

const MS: [f64; 3] = [1.5, 2.0, 3.0];
const NS: [usize; 3] = [25, 100, 400];

struct Run {
    m: f64,
    n: usize,
    traj: Trajectory,
}

/// The nine Barenblatt runs shared by criteria 2-5 and 10.
fn barenblatt_runs() -> &'static [Run] {
    static RUNS: OnceLock<Vec<Run>> = OnceLock::new();
    RUNS.get_or_init(|| {
        let cases: Vec<(f64, usize)> = MS.iter().flat_map(|&m| NS.iter().map(move |&n| (m, n))).collect();
        std::thread::scope(|s| {
            let handles: Vec<_> = cases
                .iter()
                .map(|&(m, n)| {
                    s.spawn(move || {
                        let initial = barenblatt_state(m, n, 1.0);
                        let cfg = IntegratorConfig::default()
                            .with_tolerances(1e-10, 1e-12)
                            .with_uniform_times(10.0, 50);
                        Run { m, n, traj: integrate(&initial, &cfg).unwrap() }
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        })
    })
}

fn ell(m: f64) -> f64 {
    let a = 1.0 - 1.0 / m;
    beta(a, a)
}

fn support_constant(m: f64) -> f64 {
    4f64.powf(-(1.0 / m - 0.5) / (m + 1.0)) * (m + 1.0).powf(1.0 / (m + 1.0)) * ell(m)
}

fn sci(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v:.3e}")).collect::<Vec<_>>().join(", ")
}

fn length(s: &ParticleState) -> f64 {
    let x = s.positions();
    x[x.len() - 1] - x[0]
}

#[test]
fn criterion_01_two_particle_closed_form() {
    let mut worst: f64 = 0.0;
    for &m in &MS {
        for &d0 in &[0.5, 1.0, 4.0] {
            let initial = ParticleState::new(vec![0.0, d0], m).unwrap();
            let cfg = IntegratorConfig::default()
                .with_tolerances(1e-11, 1e-13)
                .with_output_times(vec![0.1, 1.0, 10.0]);
            let traj = integrate(&initial, &cfg).unwrap();
            for state in &traj.states()[1..] {
                let t = state.t();
                let exact = (d0.powf(m + 1.0) + 2.0 * (m + 1.0) * t).powf(1.0 / (m + 1.0));
                assert!((n1_gap_closed_form(d0, m, t) - exact).abs() <= 1e-14 * exact);
                let gap = state.positions()[1] - state.positions()[0];
                worst = worst.max((gap - exact).abs() / exact);
            }
        }
    }
    let ok = worst <= 1e-8;
    report(1, "two-particle closed form", ok, &format!("max relative error {worst:.3e} (tol 1e-8)"));
    assert!(ok);
}

#[test]
fn criterion_02_aronson_benilan() {
    let mut ok = true;
    let mut worst = f64::INFINITY;
    for run in barenblatt_runs() {
        let zbar = z_min(run.traj.initial());
        assert!(zbar < 0.0);
        for s in run.traj.states() {
            let bound = -1.0 / (1.0 / zbar.abs() + (run.m + 1.0) * s.t());
            let scaled = (z_min(s) - bound) / zbar.abs();
            worst = worst.min(scaled);
            if scaled < -1e-6 {
                ok = false;
                println!("  AB violated: m={} N={} t={} margin/|Zbar|={scaled:.3e}", run.m, run.n, s.t());
            }
        }
    }
    report(2, "discrete Aronson-Benilan", ok, &format!("worst margin/|Zbar| {worst:.3e} (tol -1e-6)"));
    assert!(ok);
}

#[test]
fn criterion_03_minimum_principle() {
    let mut ok = true;
    let mut worst = f64::INFINITY;
    for run in barenblatt_runs() {
        let d0 = run.traj.initial().gaps().min();
        for s in run.traj.states() {
            let ratio = s.gaps().min() / d0;
            worst = worst.min(ratio);
            ok &= ratio >= 1.0 - 1e-6;
        }
    }
    report(3, "minimum principle", ok, &format!("worst min_gap(t)/min_gap(0) {worst:.9}"));
    assert!(ok);
}

#[test]
fn criterion_04_support_bounds() {
    let b2 = support_constant(2.0);
    let b2_ok = (b2 - 3f64.cbrt() * std::f64::consts::PI).abs() < 1e-12;
    let mut ok = b2_ok;
    let (mut worst_prop3, mut worst_thm2) = (f64::INFINITY, f64::INFINITY);
    for run in barenblatt_runs() {
        let init = run.traj.initial();
        let l0 = length(init);
        let zbar = z_min(init).abs();
        let b = support_constant(run.m);
        for s in run.traj.states() {
            let t = s.t();
            let l = length(s);
            let prop3 = l0 * (1.0 + zbar * (run.m + 1.0) * t).powf(1.0 / (run.m + 1.0));
            let thm2 = l0 + b * t.powf(1.0 / (run.m + 1.0));
            worst_prop3 = worst_prop3.min(prop3 * (1.0 + 1e-6) - l);
            worst_thm2 = worst_thm2.min(thm2 + 1e-6 - l);
        }
    }
    ok &= worst_prop3 >= 0.0 && worst_thm2 >= 0.0;
    report(
        4,
        "support bounds",
        ok,
        &format!("B(2) = {b2:.6}, slack prop3 {worst_prop3:.3e}, slack thm2 {worst_thm2:.3e}"),
    );
    assert!(ok);
}

#[test]
fn criterion_05_linf_decay() {
    let bound_m2 = (3.0f64 / 32.0).cbrt();
    let mut ok = (bound_m2 - 0.45428).abs() < 1e-5;
    let mut worst: f64 = 0.0;
    for run in barenblatt_runs() {
        for s in run.traj.states().iter().filter(|s| s.t() >= 0.01) {
            let bound = ((run.m + 1.0) / (16.0 * run.m * s.t())).powf(1.0 / (run.m + 1.0));
            let ratio = s.densities().max() / bound;
            worst = worst.max(ratio);
            ok &= ratio <= 1.0 + 1e-8;
        }
    }
    report(5, "sup-norm decay", ok, &format!("max R/bound {worst:.6}"));
    assert!(ok);
}

/// Worst `d(t_{k+1}) - d(t_k)` over consecutive stored times, per order.
fn contraction_growth(
    ta: &Trajectory,
    tb: &Trajectory,
    orders: &[MetricOrder],
    metric: fn(&ParticleState, &ParticleState, MetricOrder) -> pme_particles::Result<f64>,
) -> Vec<f64> {
    orders
        .iter()
        .map(|&order| {
            let d: Vec<f64> = ta.states().iter().zip(tb.states()).map(|(x, y)| metric(x, y, order).unwrap()).collect();
            d.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max)
        })
        .collect()
}

#[test]
fn criterion_06_contraction() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let orders = [MetricOrder::Infinity, MetricOrder::Finite(1), MetricOrder::Finite(2), MetricOrder::Finite(4)];
    let cfg = IntegratorConfig::default().with_tolerances(1e-11, 1e-13).with_uniform_times(1.0, 20);
    let mut growth_all = vec![f64::NEG_INFINITY; orders.len()];
    let mut growth_left = vec![f64::NEG_INFINITY; orders.len()];
    for _ in 0..20 {
        let a = random_state(&mut rng, 32, 2.0, 0.5, 1.5);
        let b = random_state(&mut rng, 32, 2.0, 0.5, 1.5);
        let ta = integrate(&a, &cfg).unwrap();
        let tb = integrate(&b, &cfg).unwrap();
        for (w, g) in growth_all.iter_mut().zip(contraction_growth(&ta, &tb, &orders, metric_dh_all)) {
            *w = w.max(g);
        }
        for (w, g) in growth_left.iter_mut().zip(contraction_growth(&ta, &tb, &orders, metric_dh)) {
            *w = w.max(g);
        }
    }
    let ok = growth_all.iter().all(|&g| g <= 1e-9);
    report(
        6,
        "contraction",
        ok,
        &format!(
            "max growth over particles 0..=N for [d_inf, d_1, d_2, d_4] [{}] (slack 1e-9); \
             dropping particle N gives [{}]",
            sci(&growth_all),
            sci(&growth_left)
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_07_convergence() {
    let m = 2.0;
    let profile = BarenblattProfile::unit(m).unwrap();
    let times = [0.5, 1.0, 2.0];
    let cfg = IntegratorConfig::default().with_tolerances(1e-10, 1e-12).with_output_times(times.to_vec());
    let ns = [25, 50, 100, 200];
    let errors: Vec<f64> = std::thread::scope(|s| {
        let handles: Vec<_> = ns
            .iter()
            .map(|&n| {
                let cfg = cfg.clone();
                s.spawn(move || {
                    let traj = integrate(&barenblatt_state(m, n, 1.0), &cfg).unwrap();
                    traj.states()[1..]
                        .iter()
                        .map(|st| {
                            let t = 1.0 + st.t();
                            l1_error(&st.reconstruct(), |x| profile.eval(t, x), profile.support(t))
                        })
                        .fold(0.0, f64::max)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let ratios: Vec<f64> = errors.windows(2).map(|w| w[0] / w[1]).collect();
    let ok = ratios.iter().all(|&r| r >= 1.5);
    let orders: Vec<String> = ratios.iter().map(|r| format!("{:.3}", r.log2())).collect();
    report(
        7,
        "convergence to Barenblatt",
        ok,
        &format!(
            "L1 errors [{}], ratios {ratios:.3?}, orders [{}]",
            sci(&errors),
            orders.join(", ")
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_08_consistency_order() {
    let m = 2.0;
    let horizon = 2.0;
    let initial = barenblatt_state(m, 60, 1.0);
    let phis = [
        BumpTestFunction { horizon, center: 0.0, width: 1.5 },
        BumpTestFunction { horizon, center: 1.0, width: 1.0 },
        BumpTestFunction { horizon, center: -1.2, width: 2.0 },
    ];
    let grids = [50, 100, 200];
    let trajs: Vec<Trajectory> = grids
        .iter()
        .map(|&k| {
            let cfg = IntegratorConfig::default().with_tolerances(1e-12, 1e-14).with_uniform_times(horizon, k);
            integrate(&initial, &cfg).unwrap()
        })
        .collect();
    let mut ok = true;
    let mut measured = Vec::new();
    for phi in &phis {
        let r: Vec<f64> = trajs.iter().map(|t| consistency_triple(t, phi).unwrap().residual().abs()).collect();
        for w in r.windows(2) {
            let order = (w[0] / w[1]).log2();
            ok &= order >= 1.8;
            measured.push(order);
        }
    }
    report(8, "consistency identity", ok, &format!("orders {measured:.3?}"));
    assert!(ok);
}

#[test]
fn criterion_09_algebraic_suites() {
    const COUNT: usize = 100_000;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut violations = [0usize; 4];

    for _ in 0..COUNT {
        let n = rng.gen_range(1..=40);
        let f: Vec<f64> = (0..n)
            .map(|_| if rng.gen_bool(0.2) { 0.0 } else { rng.gen_range(0.0..10.0) })
            .collect();
        let max_f = f.iter().cloned().fold(0.0, f64::max);
        let lap = discrete_laplacian(&f);
        let n2 = (n * n) as f64;
        let sum: f64 = lap.iter().sum();
        let sum_ok = sum.abs() <= 1e-12 * n2 * max_f;
        let neg_ok = max_f == 0.0 || lap[1..=n].iter().any(|&v| v < 0.0);
        if !(sum_ok && neg_ok) {
            violations[0] += 1;
        }
    }

    for _ in 0..COUNT {
        let n = rng.gen_range(1..=40);
        let f: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let g: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let lap = discrete_laplacian(&f);
        let lhs: f64 = -(1..=n).map(|k| g[k - 1] * lap[k]).sum::<f64>();
        let rhs: f64 = forward_diff(&f).iter().zip(forward_diff(&g)).map(|(a, b)| a * b).sum();
        let max_f = f.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let max_g = g.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if (lhs - rhs).abs() > 1e-10 * (n * n) as f64 * max_f * max_g {
            violations[1] += 1;
        }
    }

    for _ in 0..COUNT {
        let y: f64 = rng.gen_range(0.0..10.0);
        let z: f64 = rng.gen_range(0.0..10.0);
        let p: f64 = 5.0 * (1.0 - rng.gen::<f64>());
        let lhs = (z - y) * (z.powf(p) - y.powf(p));
        let q = 0.5 * (p + 1.0);
        let rhs = 4.0 * p / (p + 1.0).powi(2) * (z.powf(q) - y.powf(q)).powi(2);
        if lhs < rhs - 1e-12 * lhs.abs().max(rhs.abs()) {
            violations[2] += 1;
        }
    }

    for _ in 0..COUNT {
        let a: f64 = 10f64.powf(rng.gen_range(-8.0..8.0));
        let m: f64 = 10f64.powf(rng.gen_range(-3.0..3.0));
        let e = 1.0 / (m + 1.0);
        let lhs = (1.0 + a).powf(e);
        let rhs = 1.0 + a.powf(e);
        if lhs > rhs * (1.0 + 4.0 * f64::EPSILON) {
            violations[3] += 1;
        }
    }

    let ok = violations.iter().all(|&v| v == 0);
    report(
        9,
        "algebraic suites",
        ok,
        &format!(
            "violations in {COUNT} instances each: laplacian {}, by-parts {}, monotone-power {}, root-subadditivity {}",
            violations[0], violations[1], violations[2], violations[3]
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_10_total_variation() {
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for run in barenblatt_runs() {
        for s in run.traj.states().iter().filter(|s| s.t() >= 0.01) {
            let bound = ((run.m + 1.0) / (4.0 * run.m * s.t())).sqrt();
            let ratio = tv_halfpower(s) / bound;
            worst = worst.max(ratio);
            ok &= ratio <= 1.0 + 1e-6;
        }
    }
    report(10, "total variation of R^((m+1)/2)", ok, &format!("max tv/bound {worst:.6}"));
    assert!(ok);
}
