//! CSV emission and run fingerprinting.
//!
//! Every number is written with 17 significant digits so that files are
//! byte-reproducible and lossless for f64. The fingerprint is the SHA-256 of
//! the canonical scenario serialization, so it ignores comments and
//! formatting but moves with any value change.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::Context;
use seirs_control::{Scenario, Solution};
use sha2::{Digest, Sha256};

/// 17 significant digits, scientific; lossless for f64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Hex SHA-256 of the canonical form of a resolved scenario.
pub fn fingerprint(scenario: &Scenario) -> String {
    let digest = Sha256::digest(scenario.to_toml().as_bytes());
    let mut out = String::with_capacity(64);
    for byte in digest {
        let _ = write!(out, "{byte:02x}");
    }
    out
}

pub const TRAJECTORY_HEADER: &str = "t,S,E,I,R,p1,p2,p3,p4,T,V";
pub const COMPARE_HEADER: &str = "t,S_c,E_c,I_c,R_c,S_u,E_u,I_u,R_u,T,V";
pub const MEMBER_HEADER: &str = "t,I,T,V";
pub const INDEX_HEADER: &str = "param_value,J,iterations,converged";

/// `t,S,E,I,R,p1,p2,p3,p4,T,V` with one row per grid node.
pub fn write_trajectory_csv(path: &Path, solution: &Solution) -> anyhow::Result<()> {
    let trajectory = &solution.trajectory;
    let mut text = String::new();
    text.push_str(TRAJECTORY_HEADER);
    text.push('\n');
    for (i, t) in trajectory.grid.times().enumerate() {
        let x = trajectory.states[i];
        let p = trajectory.adjoints[i];
        let u = trajectory.controls[i];
        let mut row = vec![fmt_f64(t)];
        row.extend(x.as_array().map(fmt_f64));
        row.extend(p.as_array().map(fmt_f64));
        row.push(fmt_f64(u.treatment));
        row.push(fmt_f64(u.vaccination));
        text.push_str(&row.join(","));
        text.push('\n');
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Controlled and uncontrolled states side by side, with the controls of the
/// controlled run.
pub fn write_compare_csv(
    path: &Path,
    controlled: &Solution,
    uncontrolled: &Solution,
) -> anyhow::Result<()> {
    let mut text = String::new();
    text.push_str(COMPARE_HEADER);
    text.push('\n');
    for (i, t) in controlled.trajectory.grid.times().enumerate() {
        let mut row = vec![fmt_f64(t)];
        row.extend(controlled.trajectory.states[i].as_array().map(fmt_f64));
        row.extend(uncontrolled.trajectory.states[i].as_array().map(fmt_f64));
        row.push(fmt_f64(controlled.trajectory.controls[i].treatment));
        row.push(fmt_f64(controlled.trajectory.controls[i].vaccination));
        text.push_str(&row.join(","));
        text.push('\n');
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// `t,I,T,V` for one sweep member.
pub fn write_member_csv(path: &Path, solution: &Solution) -> anyhow::Result<()> {
    let trajectory = &solution.trajectory;
    let mut text = String::new();
    text.push_str(MEMBER_HEADER);
    text.push('\n');
    for (i, t) in trajectory.grid.times().enumerate() {
        let row = [
            fmt_f64(t),
            fmt_f64(trajectory.states[i].infective),
            fmt_f64(trajectory.controls[i].treatment),
            fmt_f64(trajectory.controls[i].vaccination),
        ];
        text.push_str(&row.join(","));
        text.push('\n');
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// One row per sweep member: `param_value,J,iterations,converged`.
pub fn write_index_csv(path: &Path, rows: &[(f64, f64, usize, bool)]) -> anyhow::Result<()> {
    let mut text = String::new();
    text.push_str(INDEX_HEADER);
    text.push('\n');
    for (value, cost, iterations, converged) in rows {
        let _ = writeln!(
            text,
            "{},{},{iterations},{converged}",
            fmt_f64(*value),
            fmt_f64(*cost)
        );
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(fmt_f64(0.0), "0.0000000000000000e0");
        assert_eq!(fmt_f64(25.0), "2.5000000000000000e1");
        assert_eq!(fmt_f64(0.98), "9.7999999999999998e-1");
        let v = std::f64::consts::FRAC_1_PI;
        let parsed: f64 = fmt_f64(v).parse().unwrap();
        assert_eq!(parsed.to_bits(), v.to_bits());
    }

    #[test]
    fn fingerprint_moves_with_values_only() {
        let a = Scenario::table1_default();
        let mut b = a;
        assert_eq!(fingerprint(&a), fingerprint(&b));
        b.per = 0.8;
        assert_ne!(fingerprint(&a), fingerprint(&b));
    }
}
