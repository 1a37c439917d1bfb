//! CSV serialisation of trajectories and diagnostics.
//!
//! Every file starts with a `# schema: <name>/<version>` line followed by the
//! column header. Numbers use Rust's shortest round-trip formatting, so a
//! value read back parses to the identical `f64`.

use std::fmt::Write;

use crate::diagnostics::DiagnosticsRecord;
use crate::dynamics::Trajectory;

pub const TRAJECTORY_SCHEMA: &str = "pme-trajectory/1";
pub const DIAGNOSTICS_SCHEMA: &str = "pme-diagnostics/1";

pub const DIAGNOSTICS_COLUMNS: [&str; 10] = [
    "t",
    "Zmin",
    "ab_bound",
    "margin",
    "L",
    "prop3_bound",
    "thm2_bound",
    "max_R",
    "linf_bound",
    "tv",
];

fn num(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:?}")
    }
}

/// Header lines of the trajectory file for `n` intervals.
pub fn trajectory_header(n: usize) -> String {
    let mut out = format!("# schema: {TRAJECTORY_SCHEMA}\nt,min_gap");
    for i in 0..=n {
        write!(out, ",x{i}").unwrap();
    }
    out.push('\n');
    out
}

/// One row per stored time: `t, min_gap, x0, ..., xN`.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = trajectory_header(traj.n());
    for state in traj.states() {
        out.push_str(&num(state.t()));
        out.push(',');
        out.push_str(&num(state.gaps().min()));
        for &x in state.positions() {
            out.push(',');
            out.push_str(&num(x));
        }
        out.push('\n');
    }
    out
}

pub fn diagnostics_header() -> String {
    format!("# schema: {DIAGNOSTICS_SCHEMA}\n{}\n", DIAGNOSTICS_COLUMNS.join(","))
}

pub fn diagnostics_row(rec: &DiagnosticsRecord) -> String {
    [
        rec.t,
        rec.z_min,
        rec.ab_bound,
        rec.margin(),
        rec.support_length,
        rec.support_bound_prop3,
        rec.support_bound_thm2,
        rec.max_density,
        rec.linf_bound,
        rec.tv_halfpower,
    ]
    .iter()
    .map(|&x| num(x))
    .collect::<Vec<_>>()
    .join(",")
}

pub fn diagnostics_csv(records: &[DiagnosticsRecord]) -> String {
    let mut out = diagnostics_header();
    for rec in records {
        out.push_str(&diagnostics_row(rec));
        out.push('\n');
    }
    out
}
