//! Byte-stable CSV and JSON writers.
//!
//! Floats are written with 17 significant digits in scientific notation;
//! absent values are empty cells.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::oracle::OracleResult;
use crate::series::SeriesSolution;
use crate::spectrum::EnergyLevel;
use crate::sweep::SweepRow;

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

/// Rows `(i, c_i)`.
pub fn write_coefficients<W: Write>(w: W, sol: &SeriesSolution) -> Result<()> {
    let mut out = writer(w);
    out.write_record(["i", "c_i"])?;
    for (i, c) in sol.coeffs.iter().enumerate() {
        out.write_record([i.to_string(), fmt_f64(*c)])?;
    }
    out.flush()?;
    Ok(())
}

/// Rows `(mode, index, lambda, residual_norm, n_points, r_min, r_max)`.
pub fn write_oracle<W: Write>(w: W, res: &OracleResult) -> Result<()> {
    let mut out = writer(w);
    out.write_record(["mode", "index", "lambda", "residual_norm", "n_points", "r_min", "r_max"])?;
    for (k, (lam, resid)) in res.eigenvalues.iter().zip(&res.residual_norms).enumerate() {
        out.write_record([
            res.grid.mode.name().to_string(),
            k.to_string(),
            fmt_f64(*lam),
            fmt_f64(*resid),
            res.grid.n_points.to_string(),
            fmt_f64(res.grid.r_min),
            fmt_f64(res.grid.r_max),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Rows `(param_value, ell, branch, energy, spectral, discriminant, termination_defect)`.
pub fn write_sweep<W: Write>(w: W, rows: &[SweepRow]) -> Result<()> {
    let mut out = writer(w);
    out.write_record([
        "param_value",
        "ell",
        "branch",
        "energy",
        "spectral",
        "discriminant",
        "termination_defect",
    ])?;
    for r in rows {
        out.write_record([
            fmt_f64(r.param_value),
            r.ell.to_string(),
            r.branch.to_string(),
            fmt_opt(r.energy),
            fmt_opt(r.spectral),
            fmt_opt(r.discriminant),
            fmt_opt(r.termination_defect),
        ])?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WaveSample {
    pub x: f64,
    pub r: f64,
    pub psi: f64,
    pub dpsi_dx: f64,
}

/// `samples` points uniform on (0, x_max], with r = beta sqrt(x).
pub fn wavefunction_samples(sol: &SeriesSolution, x_max: f64, samples: usize) -> Result<Vec<WaveSample>> {
    if samples == 0 || !(x_max > 0.0) || !x_max.is_finite() {
        return Err(Error::InvalidParameter {
            name: "xmax",
            reason: "need x_max > 0 and at least one sample".into(),
        });
    }
    if !sol.terminating && x_max >= 1.0 {
        return Err(Error::OutsideConvergence { x: x_max });
    }
    let beta = sol.derived.beta;
    (1..=samples)
        .map(|i| {
            let x = if i == samples { x_max } else { x_max * i as f64 / samples as f64 };
            let jet = sol.eval(x)?;
            Ok(WaveSample {
                x,
                r: beta * x.sqrt(),
                psi: jet.value,
                dpsi_dx: jet.d1,
            })
        })
        .collect()
}

/// Rows `(x, r, psi, dpsi_dx)`.
pub fn write_wavefunction<W: Write>(w: W, rows: &[WaveSample]) -> Result<()> {
    let mut out = writer(w);
    out.write_record(["x", "r", "psi", "dpsi_dx"])?;
    for s in rows {
        out.write_record([fmt_f64(s.x), fmt_f64(s.r), fmt_f64(s.psi), fmt_f64(s.dpsi_dx)])?;
    }
    out.flush()?;
    Ok(())
}

/// JSON array of levels with the fixed field set.
pub fn levels_json(levels: &[EnergyLevel]) -> String {
    serde_json::to_string_pretty(levels).expect("levels serialize")
}

/// Minimal gnuplot script plotting column `y` against column `x` of a CSV file.
pub fn gnuplot_stub(csv_path: &str, x: usize, y: usize, title: &str) -> String {
    format!(
        "set datafile separator ','\nset key autotitle columnhead\nset title '{title}'\nplot '{csv_path}' using {x}:{y} with linespoints\n"
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PhysicalParams;
    use crate::spectrum::{ground_state_wavefunction, Branch};

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(-2.0), "-2.0000000000000000e0");
        let s = fmt_f64(std::f64::consts::PI);
        assert_eq!(s.parse::<f64>().unwrap(), std::f64::consts::PI);
    }

    #[test]
    fn wavefunction_rows() {
        let p = PhysicalParams::inverse_square(1.0, 0.0, 0.5, 1.0, 2).with_flux(2.0 - 0.5 - 1.8);
        let w = ground_state_wavefunction(&p, Branch::Minus).unwrap();
        let rows = wavefunction_samples(&w.solution, 4.0, 8).unwrap();
        assert_eq!(rows.len(), 8);
        assert_eq!(rows[7].x, 4.0);
        assert!((rows[3].r - 0.5 * 2.0f64.sqrt()).abs() < 1e-15);
        let mut buf = Vec::new();
        write_wavefunction(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("x,r,psi,dpsi_dx\n"));
        assert_eq!(text.lines().count(), 9);

        let mut open = w.solution.clone();
        open.terminating = false;
        assert!(matches!(wavefunction_samples(&open, 1.5, 8), Err(Error::OutsideConvergence { .. })));
    }

    #[test]
    fn level_json_fields() {
        let p = PhysicalParams::oscillator(1.0, 2.0, 0.0, 0.5, 1.0, 1).with_flux(0.25);
        let l = crate::spectrum::ground_state_pair(&p).unwrap();
        let v: serde_json::Value = serde_json::from_str(&levels_json(&l)).unwrap();
        let obj = v[0].as_object().unwrap();
        let mut keys: Vec<&str> = obj.keys().map(|k| k.as_str()).collect();
        keys.sort();
        assert_eq!(
            keys,
            ["branch", "c1_over_c0", "discriminant", "ell", "energy", "n", "spectral", "termination_defect"]
        );
        assert_eq!(obj["branch"], "minus");
    }
}
