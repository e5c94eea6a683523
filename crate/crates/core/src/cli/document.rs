//! The JSON curve document read by every command.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::balance::{construct_global, GlobalKDifferential};
use crate::curvegraph::{DualGraph, DualGraphBuilder, EdgeSpec};
use crate::diffcalc::{KDifferential, Location};
use crate::error::{Error, Result};
use crate::exactnum::{parse_rational_function, Poly, Rational};
use crate::localsing::{Branch, BranchSystem};

pub const FORMAT_VERSION: &str = "1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveDocument {
    pub format_version: String,
    pub components: Vec<ComponentDecl>,
    #[serde(default)]
    pub edges: Vec<EdgeDecl>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub singularities: Vec<SingularityDecl>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub differentials: Vec<DifferentialDecl>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentDecl {
    pub id: String,
    #[serde(default)]
    pub genus: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EndDecl {
    pub component: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub at: Option<Location>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDecl {
    pub id: String,
    pub plus: EndDecl,
    pub minus: EndDecl,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<u32>,
}

/// Coefficients of `x(t)` and `y(t)`, lowest degree first starting at `t^0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchDecl {
    pub x: Vec<Rational>,
    pub y: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomDecl {
    pub branches: Vec<BranchDecl>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SingularityDecl {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub catalog: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub custom: Option<CustomDecl>,
}

/// Either explicit per-component rational functions or edge parameters for
/// the standard construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DifferentialDecl {
    pub k: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pieces: Option<BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge_params: Option<BTreeMap<String, Rational>>,
}

impl CurveDocument {
    pub fn parse(text: &str) -> Result<CurveDocument> {
        let doc: CurveDocument = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        if doc.format_version != FORMAT_VERSION {
            return Err(Error::Input(format!(
                "unsupported format_version {:?}, expected {FORMAT_VERSION:?}",
                doc.format_version
            )));
        }
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("document serializes");
        s.push('\n');
        s
    }

    pub fn graph(&self) -> Result<DualGraph> {
        let mut b = DualGraphBuilder::new();
        for c in &self.components {
            b.component(&c.id, c.genus);
        }
        for e in &self.edges {
            b.edge_spec(EdgeSpec {
                id: e.id.clone(),
                plus: e.plus.component.clone(),
                plus_at: e.plus.at.clone(),
                minus: e.minus.component.clone(),
                minus_at: e.minus.at.clone(),
                length: e.length,
            });
        }
        b.build()
    }

    /// Copy of the document whose edges carry the resolved node coordinates.
    pub fn with_resolved_slots(&self, g: &DualGraph) -> CurveDocument {
        let mut out = self.clone();
        for e in &mut out.edges {
            if let Ok(ge) = g.edge(&e.id) {
                e.plus.at = Some(ge.plus.at.clone());
                e.minus.at = Some(ge.minus.at.clone());
            }
        }
        out
    }

    pub fn differential(&self, k: u32) -> Result<&DifferentialDecl> {
        self.differentials
            .iter()
            .find(|d| d.k == k)
            .ok_or(Error::MissingDifferential(k))
    }

    pub fn singularity(&self, id: &str) -> Result<&SingularityDecl> {
        self.singularities
            .iter()
            .find(|s| s.id == id)
            .ok_or_else(|| Error::Input(format!("no singularity {id} in the document")))
    }
}

impl SingularityDecl {
    pub fn branch_system(&self, truncation: usize) -> Result<BranchSystem> {
        match (&self.catalog, &self.custom) {
            (Some(name), None) => BranchSystem::catalog(name, truncation),
            (None, Some(custom)) => {
                let branches = custom
                    .branches
                    .iter()
                    .map(|b| Branch::new(Poly::new(b.x.clone()), Poly::new(b.y.clone())))
                    .collect();
                BranchSystem::new("custom", branches, truncation)
            }
            _ => Err(Error::Input(format!(
                "singularity {} needs exactly one of catalog or custom",
                self.id
            ))),
        }
    }
}

impl DifferentialDecl {
    /// Resolves the entry against the graph; `params` overrides `edge_params`.
    pub fn resolve(&self, g: &DualGraph) -> Result<GlobalKDifferential> {
        match (&self.pieces, &self.edge_params) {
            (Some(pieces), None) => resolve_pieces(g, self.k, pieces),
            (None, Some(params)) => construct_global(g, self.k, params),
            _ => Err(Error::Input(format!(
                "differential for k = {} needs exactly one of pieces or edge_params",
                self.k
            ))),
        }
    }
}

fn resolve_pieces(
    g: &DualGraph,
    k: u32,
    pieces: &BTreeMap<String, String>,
) -> Result<GlobalKDifferential> {
    for id in pieces.keys() {
        g.component(id)?;
    }
    let mut out = BTreeMap::new();
    for c in g.components() {
        if !c.rational_chart() {
            continue;
        }
        let text = pieces.get(&c.id).ok_or_else(|| {
            Error::Input(format!(
                "differential for k = {k} has no piece on component {}",
                c.id
            ))
        })?;
        let f = parse_rational_function(text).map_err(|e| match e {
            Error::Parse {
                line,
                column,
                message,
            } => Error::Parse {
                line,
                column,
                message: format!("in piece for {}: {message}", c.id),
            },
            other => other,
        })?;
        out.insert(c.id.clone(), KDifferential::new(k, f)?);
    }
    Ok(GlobalKDifferential { k, pieces: out })
}

/// Parses `e1=1/2,e2=-3`.
pub fn parse_params(text: &str) -> Result<BTreeMap<String, Rational>> {
    let mut out = BTreeMap::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| Error::Input(format!("parameter {item:?} is not key=value")))?;
        let v: Rational = value
            .trim()
            .parse()
            .map_err(|_| Error::Input(format!("parameter {key}: {value:?} is not a rational")))?;
        if out.insert(key.trim().to_string(), v).is_some() {
            return Err(Error::DuplicateId(key.trim().to_string()));
        }
    }
    Ok(out)
}
