//! Command dispatch and deterministic reports.

use std::fmt::Write as _;

use num_rational::BigRational;
use serde::Serialize;

use crate::bv::{delta0, delta_sharp, delta_vol};
use crate::darboux::{darboux_pipeline, residual_report};
use crate::error::{Error, Result};
use crate::flows::{exp_flow, hamiltonian_from_adjusted, FlowTime, TIME};
use crate::forms::{one_form_shift, star, tau_sharp, tau_sharp_inverse};
use crate::superalgebra::SuperExpr;
use crate::surfaces::{densities_p, dual_density, pullback_k, surface_relation_residual};
use crate::symplectic::{berezinian, bracket, bracket_with, SuperMap, Structure};

use super::manifest::{Manifest, Resolved};
use super::suites::{self, Context, SuiteReport};

pub const COMMANDS: &[&str] = &[
    "bracket",
    "delta0",
    "delta-vol",
    "delta-sharp",
    "berezinian",
    "darboux",
    "flow",
    "hamiltonian-from-map",
    "tau-sharp",
    "tau-sharp-inv",
    "shift",
    "star",
    "pullback-surface",
    "dual-density",
    "densities-p",
    "verify",
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Named {
    pub name: String,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub command: String,
    pub chart: String,
    pub values: Vec<Named>,
    /// Every residual that the command evaluates, zero or not.
    pub residuals: Vec<Named>,
    pub suites: Vec<SuiteReport>,
    pub ok: bool,
}

impl Report {
    fn new(command: &str, r: &Resolved) -> Report {
        let t = &r.table;
        Report {
            command: command.into(),
            chart: format!("{} (n={}, aux={})", t.chart, t.n(), t.n_aux()),
            values: Vec::new(),
            residuals: Vec::new(),
            suites: Vec::new(),
            ok: true,
        }
    }

    fn value(&mut self, name: impl Into<String>, e: &SuperExpr) {
        self.text(name, e.render());
    }

    fn text(&mut self, name: impl Into<String>, value: String) {
        self.values.push(Named { name: name.into(), value });
    }

    fn residual(&mut self, name: impl Into<String>, e: &SuperExpr) {
        self.ok &= e.is_zero();
        self.residuals.push(Named { name: name.into(), value: e.render() });
    }

    pub fn exit_code(&self) -> i32 {
        if self.ok {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command: {}", self.command);
        let _ = writeln!(out, "chart: {}", self.chart);
        for v in &self.values {
            let _ = writeln!(out, "{} = {}", v.name, v.value);
        }
        let bad: Vec<&Named> = self.residuals.iter().filter(|r| r.value != "0").collect();
        if !self.residuals.is_empty() {
            if bad.is_empty() {
                let _ = writeln!(out, "residuals: {} checked, all zero", self.residuals.len());
            } else {
                let _ = writeln!(out, "residuals: {} of {} nonzero", bad.len(), self.residuals.len());
                for r in bad {
                    let _ = writeln!(out, "  {} = {}", r.name, r.value);
                }
            }
        }
        for s in &self.suites {
            let status = if s.passed() { "pass" } else { "FAIL" };
            let _ = writeln!(
                out,
                "suite {}: {status} ({} samples, {} checks) {}",
                s.suite, s.samples, s.checks, s.identity
            );
            for f in &s.failures {
                let _ = writeln!(out, "  violated: {}; sample {} {} = {}", s.identity, f.sample, f.label, f.value);
            }
        }
        let _ = writeln!(out, "status: {}", if self.ok { "ok" } else { "residual failure" });
        out
    }
}

fn map_values(rep: &mut Report, prefix: &str, m: &SuperMap) {
    let t = &m.table;
    let n = t.n();
    for (a, e) in m.targets.iter().enumerate() {
        let name = if a < n { t.coords()[a].clone() } else { t.thetas()[a - n].clone() };
        rep.value(format!("{prefix}.{name}"), e);
    }
}

fn canonical_residuals(rep: &mut Report, prefix: &str, m: &SuperMap, s: &Structure) -> Result<()> {
    let n2 = 2 * m.n();
    let mut nonzero = std::collections::BTreeMap::new();
    for (a, b, e) in residual_report(m, s)? {
        nonzero.insert((a, b), e);
    }
    for a in 0..n2 {
        for b in 0..n2 {
            let e = nonzero.remove(&(a, b)).unwrap_or_else(|| SuperExpr::zero(&m.table));
            rep.residual(format!("{prefix}[{a},{b}]"), &e);
        }
    }
    Ok(())
}

fn parse_time(text: &str) -> Result<FlowTime> {
    if text == TIME {
        return Ok(FlowTime::Formal);
    }
    let (p, q) = match text.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (text.trim(), "1"),
    };
    let p: num_bigint::BigInt = p.parse().map_err(|_| Error::Input(format!("bad time `{text}`")))?;
    let q: num_bigint::BigInt = q.parse().map_err(|_| Error::Input(format!("bad time `{text}`")))?;
    if q == 0.into() {
        return Err(Error::Input(format!("bad time `{text}`")));
    }
    Ok(FlowTime::Value(BigRational::new(p, q)))
}

/// Runs `command` (or the manifest's own command) and returns the report.
pub fn run(manifest: Manifest, command: Option<&str>, suite: Option<&str>) -> Result<Report> {
    let command = command
        .map(str::to_string)
        .or_else(|| manifest.command.clone())
        .ok_or_else(|| Error::Input("no command given".into()))?;
    let r = Resolved::new(manifest)?;
    let t = r.table.clone();
    let mut rep = Report::new(&command, &r);
    match command.as_str() {
        "bracket" => {
            let (f, g) = (r.expr("f")?, r.expr("g")?);
            let v = match &r.manifest.structure {
                Some(_) => bracket_with(&f, &g, &r.structure()?)?,
                None => bracket(&f, &g)?,
            };
            rep.value("{f,g}", &v);
        }
        "delta0" => rep.value("delta0(f)", &delta0(&r.expr("f")?)),
        "delta-vol" => rep.value("delta_vol(f)", &delta_vol(&r.expr("f")?, &r.volume()?)?),
        "delta-sharp" => rep.value("delta_sharp(s)", &delta_sharp(&r.expr("s")?)),
        "berezinian" => rep.value("ber", &berezinian(&r.map()?)?),
        "darboux" => {
            let s = r.structure()?;
            let res = darboux_pipeline(&s)?;
            for (i, st) in res.steps.iter().enumerate() {
                let (p, q) = st.before;
                let (p2, q2) = st.after;
                rep.text(format!("step {}", i + 1), format!("{} ({p},{q}) -> ({p2},{q2})", st.kind));
            }
            map_values(&mut rep, "darboux", &res.map);
            canonical_residuals(&mut rep, "bracket", &res.map, &s)?;
        }
        "flow" => {
            let q = r.expr("Q")?;
            let time = parse_time(r.manifest.options.time.as_deref().unwrap_or("1"))?;
            let f = exp_flow(&q, &time)?;
            map_values(&mut rep, "flow", &f);
            canonical_residuals(&mut rep, "bracket", &f, &Structure::canonical(&f.table))?;
        }
        "hamiltonian-from-map" => {
            let m = r.map()?;
            let q = hamiltonian_from_adjusted(&m)?;
            rep.value("Q", &q);
            let back = exp_flow(&q, &FlowTime::Value(BigRational::from_integer(1.into())))?;
            for (a, (x, y)) in back.targets.iter().zip(m.targets.iter()).enumerate() {
                rep.residual(format!("flow[{a}]"), &(x - y));
            }
        }
        "tau-sharp" => rep.value("tau_sharp(w)", &tau_sharp(&r.form("w")?)?),
        "tau-sharp-inv" => rep.text("tau_sharp_inv(s)", tau_sharp_inverse(&r.expr("s")?)?.render()),
        "shift" => rep.value("shift(s)", &one_form_shift(&r.one_form()?, &r.expr("s")?)?),
        "star" => {
            let (w, w2) = (r.form("w")?, r.form("w2")?);
            let v = star(&w, &w2)?;
            rep.text("w*w2", v.render());
            let ts = tau_sharp(&v)?;
            rep.residual("square", &(&(&ts * &ts) - &(&tau_sharp(&w)? * &tau_sharp(&w2)?)));
        }
        "pullback-surface" => {
            let (s, c) = (r.expr("s")?, r.surface()?);
            rep.value("K(s)", &pullback_k(&s, &c)?);
            rep.value("K(delta_sharp(s))", &pullback_k(&delta_sharp(&s), &c)?);
            rep.residual("relation", &surface_relation_residual(&s, &c)?);
        }
        "dual-density" => {
            let (f, phi) = r.surface_pair()?;
            rep.value("dual", &dual_density(&f, &phi, &r.volume()?, &r.surface()?)?);
        }
        "densities-p" => {
            let (p0, p1) = densities_p(&r.volume()?, &r.surface()?)?;
            rep.value("P0", &p0);
            rep.value("P1", &p1);
        }
        "verify" => {
            let name = suite
                .map(str::to_string)
                .or_else(|| r.manifest.options.suite.clone())
                .ok_or_else(|| Error::Input("verify needs a suite".into()))?;
            let chosen: Vec<&'static suites::Suite> = if name == "all" {
                suites::SUITES.iter().collect()
            } else {
                vec![suites::find(&name).ok_or_else(|| Error::Input(format!("unknown suite `{name}`")))?]
            };
            let ctx = Context {
                table: t.clone(),
                structure: r.manifest.structure.as_ref().map(|_| r.structure()).transpose()?,
            };
            let samples = r.manifest.options.samples.unwrap_or(20);
            let seed = r.manifest.options.seed.unwrap_or(0);
            rep.suites = suites::run_suites(&chosen, &ctx, samples, seed);
            rep.ok = rep.suites.iter().all(SuiteReport::passed);
        }
        other => return Err(Error::Input(format!("unknown command `{other}`"))),
    }
    Ok(rep)
}

/// Exit code for a failed run: input and precondition errors alike.
pub const INPUT_ERROR: i32 = 2;
