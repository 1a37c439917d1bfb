use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use pme_particles::diagnostics::{check_contraction, consistency_triple, ConstantTestFunction, MetricOrder};
use pme_particles::prelude::*;
use pme_particles::report::{diagnostics_csv, trajectory_csv};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{ExperimentConfig, TimeGrid, UsageError};
use crate::svg::{Plot, Series};

pub const CONVERGENCE_SCHEMA: &str = "pme-convergence/1";
pub const CONSISTENCY_SCHEMA: &str = "pme-consistency/1";
pub const BARRIER_SCHEMA: &str = "pme-barrier/1";

fn write_out(dir: &Path, name: &str, contents: &str) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn integrator(cfg: &ExperimentConfig) -> IntegratorConfig {
    IntegratorConfig::default()
        .with_tolerances(cfg.rtol, cfg.atol)
        .with_output_times(cfg.output_times())
}

fn initial_state(cfg: &ExperimentConfig) -> Result<ParticleState> {
    let Some(spec) = &cfg.density else {
        bail!(UsageError("missing density spec: pass --density or set `density` in the config file".into()));
    };
    let rho = DensitySpec::parse(spec).map_err(|e| UsageError(format!("--density: {e}")))?;
    Ok(sample_support_preserving(&rho, cfg.single_n()?, cfg.m)?)
}

fn simulate_trajectory(cfg: &ExperimentConfig) -> Result<Trajectory> {
    let initial = initial_state(cfg)?;
    Ok(integrate(&initial, &integrator(cfg))?)
}

fn trajectory_plot(traj: &Trajectory) -> Plot {
    let n = traj.n();
    let stride = n.div_ceil(40).max(1);
    let series = (0..=n)
        .filter(|i| i % stride == 0 || *i == n)
        .map(|i| Series {
            label: String::new(),
            points: traj.states().iter().map(|s| (s.t(), s.positions()[i])).collect(),
        })
        .collect();
    Plot {
        title: format!("particle paths, N = {n}, m = {}", traj.m()),
        x_label: "t".into(),
        y_label: "x".into(),
        log_log: false,
        series,
    }
}

pub fn simulate(cfg: &ExperimentConfig) -> Result<()> {
    let traj = simulate_trajectory(cfg)?;
    write_out(&cfg.out, "trajectory.csv", &trajectory_csv(&traj))?;
    write_out(&cfg.out, "diagnostics.csv", &diagnostics_csv(&diagnostics_series(&traj)))?;
    if cfg.plot {
        write_out(&cfg.out, "trajectory.svg", &trajectory_plot(&traj).render())?;
    }
    let stats = traj.stats();
    println!(
        "N = {}, m = {}, {} output times, {} accepted / {} rejected steps",
        traj.n(),
        traj.m(),
        traj.len() - 1,
        stats.accepted,
        stats.rejected
    );
    Ok(())
}

/// Scales every gap of every stored state after the first by an independent
/// factor in `[1 - amount, 1 + amount]`.
fn corrupt(traj: &Trajectory, amount: f64, seed: u64) -> Result<Trajectory> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut states = vec![traj.initial().clone()];
    for s in &traj.states()[1..] {
        let x = s.positions();
        let mut y = vec![x[0]];
        for w in x.windows(2) {
            let factor = 1.0 + amount * rng.gen_range(-1.0..=1.0);
            y.push(y.last().unwrap() + (w[1] - w[0]) * factor);
        }
        states.push(ParticleState::at_time(y, s.m(), s.t())?);
    }
    Ok(Trajectory::from_states(states)?)
}

/// Runs the bound suite; returns whether every check passed.
pub fn verify(cfg: &ExperimentConfig) -> Result<bool> {
    let mut traj = simulate_trajectory(cfg)?;
    if cfg.perturb > 0.0 {
        traj = corrupt(&traj, cfg.perturb, cfg.seed)?;
        println!("positions perturbed by up to {}% (seed {})", 100.0 * cfg.perturb, cfg.seed);
    }
    let mut checks = verify_trajectory(&traj).checks;

    let n = traj.n();
    if n >= 4 {
        let barrier = BarrierConfig::new(n, cfg.m, cfg.beta, cfg.alpha)?;
        let companion = integrate(&barrier_configuration(&barrier), &integrator(cfg))?;
        let orders = [MetricOrder::Infinity, MetricOrder::Finite(1), MetricOrder::Finite(2), MetricOrder::Finite(4)];
        checks.push(check_contraction(&traj, &companion, &orders, true)?);
    } else {
        println!("contraction: skipped (the barrier companion needs N >= 4)");
    }

    println!("{:<20} {:<6} {:>14} {:>12} {:>10}", "bound", "status", "worst margin", "allowed", "at t");
    for c in &checks {
        println!(
            "{:<20} {:<6} {:>14.6e} {:>12.3e} {:>10.4}",
            c.bound.name(),
            if c.passed { "pass" } else { "FAIL" },
            c.worst_margin,
            c.allowed,
            c.worst_time
        );
    }
    write_out(&cfg.out, "diagnostics.csv", &diagnostics_csv(&diagnostics_series(&traj)))?;
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.bound.name()).collect();
    if failed.is_empty() {
        println!("all bounds hold");
        Ok(true)
    } else {
        println!("violated: {}", failed.join(", "));
        Ok(false)
    }
}

pub struct ConvergenceRow {
    pub n: usize,
    pub l1: f64,
    pub lm: f64,
    pub order: Option<f64>,
}

/// `m` and `t0` for the convergence study: the Barenblatt profile of the
/// configured exponent started at `t0 = 1`, unless the density names another.
fn barenblatt_setup(cfg: &ExperimentConfig) -> Result<(f64, f64)> {
    let Some(spec) = &cfg.density else {
        return Ok((cfg.m, 1.0));
    };
    let words: Vec<&str> = spec.split_whitespace().collect();
    if words.first() != Some(&"barenblatt") {
        bail!(UsageError(format!("convergence needs an exact solution; `{spec}` is not a barenblatt spec")));
    }
    DensitySpec::parse(spec).map_err(|e| UsageError(format!("--density: {e}")))?;
    Ok((words[1].parse()?, words[2].parse()?))
}

pub fn convergence_table(cfg: &ExperimentConfig) -> Result<Vec<ConvergenceRow>> {
    let (m, t0) = barenblatt_setup(cfg)?;
    let profile = BarenblattProfile::unit(m)?;
    let rho = DensitySpec::barenblatt(profile, t0)?;
    let icfg = integrator(cfg);
    let mut ns = cfg.n.clone();
    ns.sort_unstable();
    ns.dedup();
    let errors = ns
        .par_iter()
        .map(|&n| -> Result<(usize, f64, f64)> {
            let traj = integrate(&sample_support_preserving(&rho, n, m)?, &icfg)?;
            let (mut l1, mut lm) = (0.0f64, 0.0f64);
            for s in &traj.states()[1..] {
                let t = t0 + s.t();
                let approx = s.reconstruct();
                let exact = |x| profile.eval(t, x);
                l1 = l1.max(l1_error(&approx, exact, profile.support(t)));
                lm = lm.max(lm_error(&approx, exact, profile.support(t), m));
            }
            Ok((n, l1, lm))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(errors.len());
    for (i, &(n, l1, lm)) in errors.iter().enumerate() {
        let order = (i > 0).then(|| {
            let (n0, e0, _) = errors[i - 1];
            (e0 / l1).ln() / (n as f64 / n0 as f64).ln()
        });
        rows.push(ConvergenceRow { n, l1, lm, order });
    }
    Ok(rows)
}

pub fn convergence_csv(rows: &[ConvergenceRow]) -> String {
    let mut out = format!("# schema: {CONVERGENCE_SCHEMA}\nN,l1_error,lm_error,order\n");
    for r in rows {
        let order = r.order.map(|o| o.to_string()).unwrap_or_default();
        writeln!(out, "{},{},{},{}", r.n, r.l1, r.lm, order).unwrap();
    }
    out
}

pub fn convergence(cfg: &ExperimentConfig) -> Result<()> {
    let rows = convergence_table(cfg)?;
    println!("{:>6} {:>14} {:>14} {:>8}", "N", "L1 error", "Lm error", "order");
    for r in &rows {
        let order = r.order.map(|o| format!("{o:.3}")).unwrap_or_default();
        println!("{:>6} {:>14.6e} {:>14.6e} {:>8}", r.n, r.l1, r.lm, order);
    }
    write_out(&cfg.out, "convergence.csv", &convergence_csv(&rows))?;
    if cfg.plot {
        let plot = Plot {
            title: format!("error against the Barenblatt solution, m = {}", cfg.m),
            x_label: "N".into(),
            y_label: "sup-in-time error".into(),
            log_log: true,
            series: vec![
                Series { label: "L1".into(), points: rows.iter().map(|r| (r.n as f64, r.l1)).collect() },
                Series { label: "Lm".into(), points: rows.iter().map(|r| (r.n as f64, r.lm)).collect() },
            ],
        };
        write_out(&cfg.out, "convergence.svg", &plot.render())?;
    }
    Ok(())
}

pub fn consistency(cfg: &ExperimentConfig) -> Result<()> {
    let TimeGrid::Count(base) = cfg.times else {
        bail!(UsageError("consistency refines a uniform grid: give --times as an interval count".into()));
    };
    let initial = initial_state(cfg)?;
    let (a, b) = (initial.positions()[0], initial.positions()[initial.n()]);
    let (mid, len) = (0.5 * (a + b), b - a);
    let horizon = cfg.horizon;
    let phis = [
        BumpTestFunction { horizon, center: mid, width: 0.5 * len },
        BumpTestFunction { horizon, center: mid + 0.25 * len, width: 0.35 * len },
        BumpTestFunction { horizon, center: mid - 0.3 * len, width: 0.6 * len },
    ];
    let grids = [base, 2 * base, 4 * base];
    let trajs = grids
        .par_iter()
        .map(|&k| {
            let icfg = IntegratorConfig::default().with_tolerances(cfg.rtol, cfg.atol).with_uniform_times(horizon, k);
            integrate(&initial, &icfg)
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;

    let mut csv = format!("# schema: {CONSISTENCY_SCHEMA}\nphi,intervals,I,J,K,residual,order\n");
    println!("{:>4} {:>9} {:>14} {:>8}", "phi", "intervals", "|I+J+K|", "order");
    for (p, phi) in phis.iter().enumerate() {
        let mut previous: Option<f64> = None;
        for (traj, &k) in trajs.iter().zip(&grids) {
            let triple = consistency_triple(traj, phi)?;
            let r = triple.residual();
            let order = previous.map(|r0| (r0 / r.abs()).log2());
            previous = Some(r.abs());
            let shown = order.map(|o| format!("{o:.3}")).unwrap_or_default();
            println!("{:>4} {:>9} {:>14.6e} {:>8}", p + 1, k, r.abs(), shown);
            writeln!(
                csv,
                "{},{k},{},{},{},{r},{}",
                p + 1,
                triple.i,
                triple.j,
                triple.k,
                order.map(|o| o.to_string()).unwrap_or_default()
            )
            .unwrap();
        }
    }
    match consistency_triple(&trajs[0], &ConstantTestFunction(1.0)) {
        Err(e) => println!("constant test function rejected: {e}"),
        Ok(t) => println!("constant test function: residual {}", t.residual()),
    }
    write_out(&cfg.out, "consistency.csv", &csv)
}

pub fn barrier_csv(cfg: &BarrierConfig) -> String {
    let y = barrier_configuration(cfg);
    let s = cfg.densities();
    let mut out = format!("# schema: {BARRIER_SCHEMA}\nj,y,S\n");
    for (j, x) in y.positions().iter().enumerate() {
        let density = if j == 0 { String::new() } else { s[j - 1].to_string() };
        writeln!(out, "{j},{x},{density}").unwrap();
    }
    out
}

pub fn barrier(cfg: &ExperimentConfig) -> Result<()> {
    let n = cfg.single_n()?;
    let bc = BarrierConfig::new(n, cfg.m, cfg.beta, cfg.alpha).map_err(|e| UsageError(e.to_string()))?;
    let y = barrier_configuration(&bc);
    println!("N = {n}, m = {}, beta = {}, alpha = {}", cfg.m, cfg.beta, cfg.alpha);
    println!("ell = {:.12}", bc.ell);
    println!("Lambda = {:.12}", bc.lambda());
    println!("support length = {:.12} (beta * ell = {:.12})", support_length(&y), bc.beta * bc.ell);
    write_out(&cfg.out, "barrier.csv", &barrier_csv(&bc))
}
