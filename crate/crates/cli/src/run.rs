use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use dirac_core::fdtd::discrete_energy_fdtd;
use dirac_core::grid::{Grid, Grid1D, Grid2D};
use dirac_core::harness::{
    fmt_num, resolve_tau, run_convergence, run_honeycomb_2d_capped, stability_scan_with, write_snapshot, Preset,
    Stability, TauSpec,
};
use dirac_core::observables::{energy_continuous, mass};
use dirac_core::scheme::{build_stepper_with, run_to_end};
use dirac_core::{Error, SpinorField};
use serde_json::{json, Value};

use crate::config::{Command, RunFile};

pub struct Options {
    pub out: PathBuf,
    pub threads: Option<usize>,
    pub timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Done,
    BlowUp { step: usize },
}

fn manifest(command: Command, spec: &RunFile, opts: &Options, extra: Value) -> Result<Value> {
    let mut m = json!({
        "command": command.name(),
        "version": env!("CARGO_PKG_VERSION"),
        "threads": opts.threads,
        "config": serde_json::to_value(spec)?,
    });
    if let (Some(obj), Value::Object(e)) = (m.as_object_mut(), extra) {
        obj.extend(e);
    }
    Ok(m)
}

fn write_json(path: &Path, v: &Value) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(v)? + "\n").with_context(|| format!("writing {}", path.display()))
}

pub fn execute(command: Command, spec: &RunFile, opts: &Options) -> Result<Outcome> {
    fs::create_dir_all(&opts.out).with_context(|| format!("creating {}", opts.out.display()))?;
    let manifest_path = opts.out.join("manifest.json");
    write_json(&manifest_path, &manifest(command, spec, opts, json!({}))?)?;

    let started = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let clock = Instant::now();
    let (outcome, summary) = match command {
        Command::Solve => solve(spec, &opts.out)?,
        Command::Converge => converge(spec, opts)?,
        Command::Stability => stability(spec, &opts.out)?,
        Command::Honeycomb => honeycomb(spec, &opts.out)?,
    };
    let timing = json!({ "started_unix": started, "seconds": clock.elapsed().as_secs_f64() });
    write_json(&manifest_path, &manifest(command, spec, opts, json!({ "timing": timing, "summary": summary }))?)?;
    Ok(outcome)
}

fn field_snapshot(dir: &Path, name: &str, f: &SpinorField, t: f64) -> Result<()> {
    let dims = match f.grid() {
        Grid::D1(g) => vec![g.m()],
        Grid::D2(g) => vec![g.x.m(), g.y.m()],
    };
    let flat: Vec<f64> = f.data().iter().flat_map(|z| [z.re, z.im]).collect();
    let meta = json!({
        "t": t,
        "dims": dims,
        "components": f.ncomp(),
        "layout": "component-major, (re, im) pairs",
    });
    write_snapshot(dir, name, &flat, meta)?;
    for c in 0..f.ncomp() {
        let rho: Vec<f64> = f.component(c).iter().map(|z| z.norm_sqr()).collect();
        write_snapshot(dir, &format!("{name}_rho{}", c + 1), &rho, json!({ "t": t, "dims": dims, "component": c + 1 }))?;
    }
    Ok(())
}

fn solve(spec: &RunFile, out: &Path) -> Result<(Outcome, Value)> {
    let e = &spec.experiment;
    let cells = e.cells();
    if cells.len() != 1 {
        bail!("solve runs one cell; schemes x eps x h x tau gives {}", cells.len());
    }
    let (scheme, eps, h, t) = cells[0];
    let tau = resolve_tau(e, scheme, eps, h, t)?;
    let params = e.problem.params(eps, h, tau, e.t_final)?;
    let potentials = params.potentials.clone();
    let steps = params.steps();
    let every = match spec.solve.every {
        0 => (steps / 1000).max(1),
        n => n,
    };
    let energy = |f: &SpinorField| -> Result<Option<f64>, Error> {
        if !potentials.is_time_independent() {
            return Ok(None);
        }
        if scheme.is_fdtd() {
            discrete_energy_fdtd(f, &potentials, eps).map(Some)
        } else {
            energy_continuous(f, &potentials, eps).map(Some)
        }
    };

    let mut stepper = build_stepper_with(scheme, params, e.exec)?;
    let mut csv = String::from("t,mass,energy\n");
    let run = run_to_end(stepper.as_mut(), e.blowup_factor, |s| {
        let n = s.steps_taken();
        if n % every == 0 || n == steps {
            let f = s.current();
            let en = energy(f)?.map(fmt_num).unwrap_or_default();
            let _ = writeln!(csv, "{},{},{}", fmt_num(s.time()), fmt_num(mass(f)), en);
        }
        Ok(())
    });
    let outcome = match run {
        Ok(()) => Outcome::Done,
        Err(Error::BlowUp { step }) => Outcome::BlowUp { step },
        Err(err) => return Err(err.into()),
    };
    fs::write(out.join("results.csv"), csv)?;
    field_snapshot(&out.join("snapshots"), "final", stepper.current(), stepper.time())?;
    let summary = json!({
        "scheme": scheme.name(),
        "eps": eps,
        "h": h,
        "tau": tau,
        "steps": stepper.steps_taken(),
        "blow_up_step": match outcome { Outcome::BlowUp { step } => Some(step), Outcome::Done => None },
    });
    Ok((outcome, summary))
}

fn converge(spec: &RunFile, opts: &Options) -> Result<(Outcome, Value)> {
    let table = run_convergence(&spec.experiment)?;
    fs::write(opts.out.join("results.csv"), table.to_csv(opts.timing))?;
    let unstable = table.records.iter().filter(|r| r.error.is_none()).count();
    let refs: Vec<Value> =
        table.reference_estimates.iter().map(|(e, est)| json!({ "eps": e, "self_check": est })).collect();
    Ok((Outcome::Done, json!({ "cells": table.records.len(), "unstable": unstable, "references": refs })))
}

fn stability(spec: &RunFile, out: &Path) -> Result<(Outcome, Value)> {
    let e = &spec.experiment;
    let mut csv = String::from("scheme,eps,h,factor,tau,steps,status\n");
    let mut unstable = 0;
    for &s in &e.schemes {
        for &eps in &e.eps {
            for &h in &e.h {
                let pts = stability_scan_with(&spec.stability.setup, s, eps, h, &spec.stability.factors, e.exec)?;
                for p in pts {
                    let status = match p.status {
                        Stability::Stable => "stable",
                        Stability::Unstable => {
                            unstable += 1;
                            "unstable"
                        }
                    };
                    let _ = writeln!(
                        csv,
                        "{s},{},{},{},{},{},{status}",
                        fmt_num(eps),
                        fmt_num(h),
                        fmt_num(p.factor),
                        fmt_num(p.tau),
                        p.steps
                    );
                }
            }
        }
    }
    fs::write(out.join("results.csv"), csv)?;
    Ok((Outcome::Done, json!({ "unstable_points": unstable })))
}

fn honeycomb(spec: &RunFile, out: &Path) -> Result<(Outcome, Value)> {
    let e = &spec.experiment;
    if e.problem.preset != Preset::Honeycomb2d {
        bail!("honeycomb needs preset honeycomb-2d, got {}", e.problem.preset.name());
    }
    let (&[h], &[TauSpec::Value(tau)]) = (e.h.as_slice(), e.tau.as_slice()) else {
        bail!("honeycomb takes a single h and a single numeric tau");
    };
    let g = Grid1D::with_h(e.problem.domain[0], e.problem.domain[1], h)?;
    let grid = Grid2D::new(g, g);
    let opts = &spec.honeycomb;
    let dir = out.join("snapshots");
    let mut csv = String::from("eps,t,mass,energy\n");
    let mut drift = vec![];
    for (i, &eps) in e.eps.iter().enumerate() {
        let run = run_honeycomb_2d_capped(grid, eps, tau, e.t_final, &opts.snapshot_times, opts.node_cap, e.exec)?;
        for (rep, snap) in run.reports.iter().zip(&run.snapshots) {
            let en = rep.energy.map(fmt_num).unwrap_or_default();
            let _ = writeln!(csv, "{},{},{},{}", fmt_num(eps), fmt_num(rep.t), fmt_num(rep.mass), en);
            let step = (snap.t / tau).round() as usize;
            for (c, rho) in snap.rho.iter().enumerate() {
                let meta = json!({
                    "eps": eps,
                    "t": snap.t,
                    "dims": snap.dims,
                    "component": c + 1,
                    "h": h,
                    "domain": e.problem.domain,
                });
                write_snapshot(&dir, &format!("eps{i}_step{step:06}_rho{}", c + 1), rho, meta)?;
            }
        }
        drift.push(json!({ "eps": eps, "mass_drift": run.mass_drift }));
    }
    fs::write(out.join("results.csv"), csv)?;
    Ok((Outcome::Done, json!({ "runs": drift })))
}
