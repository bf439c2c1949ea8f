//! JSON manifests: a chart, the objects living on it and the command to run.

use std::collections::BTreeMap;

use serde::Deserialize;

use crate::bv::VolumeForm;
use crate::error::{Error, Result};
use crate::forms::DifferentialForm;
use crate::superalgebra::{ChartSpec, SMatrix, SuperExpr, SymbolTable, Table};
use crate::surfaces::AdjustedSurface;
use crate::symplectic::{Structure, SuperMap};

use super::parse_expr;

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartDoc {
    #[serde(default)]
    pub name: Option<String>,
    /// Dimension for the standard names `x1.., th1..` when `even`/`odd` are omitted.
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub even: Vec<String>,
    #[serde(default)]
    pub odd: Vec<String>,
    #[serde(default)]
    pub frame: Vec<String>,
    /// Aux odd constants, or a count for the standard names `b1..`.
    #[serde(default)]
    pub aux: AuxDoc,
    #[serde(default)]
    pub functions: Vec<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum AuxDoc {
    Count(usize),
    Names(Vec<String>),
}

impl Default for AuxDoc {
    fn default() -> AuxDoc {
        AuxDoc::Names(Vec::new())
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureDoc {
    /// `2n × 2n` matrix `{z^A, z^B}`, rows ordered `x¹..xⁿ, θ₁..θₙ`.
    pub bracket: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDoc {
    /// New coordinates `x̃¹..x̃ⁿ, θ̃₁..θ̃ₙ` as functions of the chart.
    pub targets: Vec<String>,
    #[serde(default)]
    pub body_inverse: Option<Vec<String>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VolumeDoc {
    pub rho: String,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceDoc {
    pub x0: String,
    pub theta0: String,
    /// Defining pair for the dual density; defaults to `(x0, theta0)`.
    #[serde(default)]
    pub f: Option<String>,
    #[serde(default)]
    pub phi: Option<String>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    #[serde(default)]
    pub suite: Option<String>,
    #[serde(default)]
    pub samples: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Flow time: a rational literal or `"t"` for the formal parameter.
    #[serde(default)]
    pub time: Option<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub chart: ChartDoc,
    #[serde(default)]
    pub command: Option<String>,
    #[serde(default)]
    pub options: Options,
    #[serde(default)]
    pub structure: Option<StructureDoc>,
    #[serde(default)]
    pub map: Option<MapDoc>,
    #[serde(default)]
    pub volume: Option<VolumeDoc>,
    /// Functions and semidensities by name: `f`, `g`, `s`, `r`, `Q`, ...
    #[serde(default)]
    pub exprs: BTreeMap<String, String>,
    /// Forms by name: `w`, `w2`.
    #[serde(default)]
    pub forms: BTreeMap<String, String>,
    /// Odd-valued one-form components `a_i`.
    #[serde(default)]
    pub one_form: Option<Vec<String>>,
    #[serde(default)]
    pub surface: Option<SurfaceDoc>,
}

impl Manifest {
    pub fn from_json(text: &str) -> Result<Manifest> {
        serde_json::from_str(text).map_err(|e| Error::Input(format!("manifest: {e}")))
    }

    pub fn table(&self) -> Result<Table> {
        let c = &self.chart;
        let (even, odd) = match (c.even.is_empty(), c.odd.is_empty(), c.n) {
            (true, true, Some(n)) => ((1..=n).map(|i| format!("x{i}")).collect(), (1..=n).map(|i| format!("th{i}")).collect()),
            (false, false, None) => (c.even.clone(), c.odd.clone()),
            (false, false, Some(n)) if c.even.len() == n => (c.even.clone(), c.odd.clone()),
            _ => return Err(Error::Input("chart needs either `n` or both `even` and `odd`".into())),
        };
        let aux = match &c.aux {
            AuxDoc::Count(k) => (1..=*k).map(|i| format!("b{i}")).collect(),
            AuxDoc::Names(v) => v.clone(),
        };
        SymbolTable::new(ChartSpec {
            chart: c.name.clone().unwrap_or_else(|| "U".into()),
            even,
            odd,
            frame: c.frame.clone(),
            aux,
            params: vec![],
            functions: c.functions.clone(),
        })
    }
}

/// A manifest with its expressions parsed against the chart.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub manifest: Manifest,
    pub table: Table,
}

fn field(what: &str, e: Error) -> Error {
    match e {
        Error::Parse { line, column, message } => Error::Parse { line, column, message: format!("{what}: {message}") },
        other => Error::Input(format!("{what}: {other}")),
    }
}

impl Resolved {
    pub fn new(manifest: Manifest) -> Result<Resolved> {
        let table = manifest.table()?;
        let r = Resolved { manifest, table };
        r.check_names()?;
        Ok(r)
    }

    pub fn parse(&self, what: &str, text: &str) -> Result<SuperExpr> {
        parse_expr(text, &self.table).map_err(|e| field(what, e))
    }

    /// Parses every embedded expression once so that schema errors surface before dispatch.
    fn check_names(&self) -> Result<()> {
        let m = &self.manifest;
        for (k, v) in &m.exprs {
            self.parse(&format!("exprs.{k}"), v)?;
        }
        for k in m.forms.keys() {
            self.form(k)?;
        }
        if m.structure.is_some() {
            self.structure()?;
        }
        if m.map.is_some() {
            self.map()?;
        }
        if m.volume.is_some() {
            self.volume()?;
        }
        if m.one_form.is_some() {
            self.one_form()?;
        }
        if m.surface.is_some() {
            self.surface()?;
        }
        Ok(())
    }

    pub fn expr(&self, name: &str) -> Result<SuperExpr> {
        let text = self
            .manifest
            .exprs
            .get(name)
            .ok_or_else(|| Error::Input(format!("manifest has no expression `{name}`")))?;
        self.parse(&format!("exprs.{name}"), text)
    }

    pub fn form(&self, name: &str) -> Result<DifferentialForm> {
        let text = self
            .manifest
            .forms
            .get(name)
            .ok_or_else(|| Error::Input(format!("manifest has no form `{name}`")))?;
        DifferentialForm::new(self.parse(&format!("forms.{name}"), text)?)
    }

    pub fn structure(&self) -> Result<Structure> {
        let doc = self.manifest.structure.as_ref().ok_or_else(|| Error::Input("manifest has no structure".into()))?;
        let n2 = 2 * self.table.n();
        if doc.bracket.len() != n2 || doc.bracket.iter().any(|r| r.len() != n2) {
            return Err(Error::Input(format!("structure.bracket must be {n2}×{n2}")));
        }
        let m = SMatrix::try_from_fn(&self.table, n2, n2, |a, b| self.parse(&format!("structure.bracket[{a}][{b}]"), &doc.bracket[a][b]))?;
        Ok(Structure { omega: m })
    }

    /// The manifest structure, or the canonical one when none is given.
    pub fn structure_or_canonical(&self) -> Result<Structure> {
        if self.manifest.structure.is_some() {
            self.structure()
        } else {
            Ok(Structure::canonical(&self.table))
        }
    }

    pub fn map(&self) -> Result<SuperMap> {
        let doc = self.manifest.map.as_ref().ok_or_else(|| Error::Input("manifest has no map".into()))?;
        let targets = doc
            .targets
            .iter()
            .enumerate()
            .map(|(i, s)| self.parse(&format!("map.targets[{i}]"), s))
            .collect::<Result<Vec<_>>>()?;
        let inverse = match &doc.body_inverse {
            Some(v) => Some(
                v.iter()
                    .enumerate()
                    .map(|(i, s)| self.parse(&format!("map.body_inverse[{i}]"), s))
                    .collect::<Result<Vec<_>>>()?,
            ),
            None => None,
        };
        SuperMap::new(&self.table, targets, inverse)
    }

    pub fn volume(&self) -> Result<VolumeForm> {
        let doc = self.manifest.volume.as_ref().ok_or_else(|| Error::Input("manifest has no volume".into()))?;
        VolumeForm::new(self.parse("volume.rho", &doc.rho)?)
    }

    pub fn one_form(&self) -> Result<Vec<SuperExpr>> {
        let v = self.manifest.one_form.as_ref().ok_or_else(|| Error::Input("manifest has no one_form".into()))?;
        if v.len() != self.table.n() {
            return Err(Error::Input(format!("one_form needs {} components", self.table.n())));
        }
        v.iter().enumerate().map(|(i, s)| self.parse(&format!("one_form[{i}]"), s)).collect()
    }

    pub fn surface(&self) -> Result<AdjustedSurface> {
        let doc = self.manifest.surface.as_ref().ok_or_else(|| Error::Input("manifest has no surface".into()))?;
        AdjustedSurface::from_names(&self.table, &doc.x0, &doc.theta0)
    }

    /// Defining pair `(f, φ)` of the surface.
    pub fn surface_pair(&self) -> Result<(SuperExpr, SuperExpr)> {
        let doc = self.manifest.surface.as_ref().ok_or_else(|| Error::Input("manifest has no surface".into()))?;
        let f = self.parse("surface.f", doc.f.as_deref().unwrap_or(&doc.x0))?;
        let phi = self.parse("surface.phi", doc.phi.as_deref().unwrap_or(&doc.theta0))?;
        Ok((f, phi))
    }
}
