//! Command implementations. Each returns a [`Report`]; I/O stays in `main`.

use std::collections::BTreeMap;

use crate::balance::{
    check_balancing, construct_global, dimension_report, dualizing_section_space,
    equisingular_kernel, residue_matrix, span_report, EdgeResidueReport,
};
use crate::curvegraph::{arithmetic_genus, betti1, tropical_jacobian_dim, DualGraph};
use crate::diffcalc::Location;
use crate::error::{Error, Result};
use crate::exactnum::{default_truncation, parse_rational_function, LaurentSeries, Rational};
use crate::localsing::{
    conductor_annihilation_check, conductor_exponents, descends, descends_k, descent_constraints,
    dualizing_generator, polar_labels, weighted_residue_check, BranchSystem, ConductorData,
    LocalDifferential, PrincipalPartSystem, CATALOG,
};

use super::document::{CurveDocument, DifferentialDecl};
use super::report::{digest, Report, Status};

/// Largest truncation tried when none is given.
const MAX_AUTO_TRUNCATION: usize = 96;

fn residues_text(r: &BTreeMap<Location, Rational>) -> String {
    if r.is_empty() {
        return "none".into();
    }
    r.iter()
        .map(|(l, v)| format!("{l}: {v}"))
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn cmd_graph_invariants(text: &str) -> Result<Report> {
    let doc = CurveDocument::parse(text)?;
    let g = doc.graph()?;
    let mut r = Report::new(
        "graph-invariants",
        digest(&[b"graph-invariants", text.as_bytes()]),
    );
    r.push(
        "graph",
        Status::Info,
        [
            ("vertices", g.vertex_count()),
            ("edges", g.edge_count()),
            ("b1", betti1(&g)),
            ("genus_sum", g.total_genus() as usize),
            ("arithmetic_genus", arithmetic_genus(&g)),
            ("tropical_jacobian_dim", tropical_jacobian_dim(&g)),
        ],
    );
    Ok(r)
}

fn residue_verdicts(r: &mut Report, report: &EdgeResidueReport) {
    for e in &report.edges {
        r.push(
            format!("edge {}", e.edge),
            Status::from_bool(e.sum.is_zero()),
            [
                ("res_plus", e.res_plus.to_string()),
                ("res_minus", e.res_minus.to_string()),
                ("sum", e.sum.to_string()),
            ],
        );
    }
    let even = report.k.is_multiple_of(2);
    for c in &report.components {
        let status = if even {
            Status::Info
        } else {
            Status::from_bool(c.sum.is_zero())
        };
        r.push(
            format!("component {}", c.component),
            status,
            [
                ("residues", residues_text(&c.residues)),
                ("sum", c.sum.to_string()),
            ],
        );
    }
    r.push(
        "balancing",
        Status::Info,
        [
            ("local_ok", report.local_ok()),
            ("global_ok", report.global_ok()),
        ],
    );
    if even {
        r.warn(
            "W-EVEN-K-RESIDUE",
            format!(
                "k = {} is even: k-residues on one component need not sum to zero, \
                 component sums are informational",
                report.k
            ),
        );
    }
}

pub fn cmd_check_balance(text: &str, k: u32) -> Result<Report> {
    let doc = CurveDocument::parse(text)?;
    let g = doc.graph()?;
    let eta = doc.differential(k)?.resolve(&g)?;
    let report = check_balancing(&g, &eta)?;
    let mut r = Report::new(
        "check-balance",
        digest(&[b"check-balance", text.as_bytes(), k.to_string().as_bytes()]),
    );
    residue_verdicts(&mut r, &report);
    Ok(r)
}

/// Builds the standard differential and emits it as a document with explicit
/// pieces, which `check-balance` accepts unchanged.
pub fn cmd_construct(
    text: &str,
    k: u32,
    params: Option<&BTreeMap<String, Rational>>,
) -> Result<Report> {
    let doc = CurveDocument::parse(text)?;
    let g = doc.graph()?;
    let params = match params {
        Some(p) => p.clone(),
        None => match doc.differential(k)? {
            DifferentialDecl {
                edge_params: Some(p),
                ..
            } => p.clone(),
            _ => {
                return Err(Error::Input(format!(
                    "no edge parameters for k = {k}; pass --params"
                )))
            }
        },
    };
    let eta = construct_global(&g, k, &params)?;
    let report = check_balancing(&g, &eta)?;

    let params_text: Vec<String> = params.iter().map(|(e, v)| format!("{e}={v}")).collect();
    let mut r = Report::new(
        "construct",
        digest(&[
            b"construct",
            text.as_bytes(),
            k.to_string().as_bytes(),
            params_text.join(",").as_bytes(),
        ]),
    );
    let mut pieces = BTreeMap::new();
    for (id, piece) in &eta.pieces {
        let f = piece.coefficient_function().render("z");
        r.push(
            format!("piece {id}"),
            Status::Info,
            [("eta", piece.render("z"))],
        );
        pieces.insert(id.clone(), f);
    }
    residue_verdicts(&mut r, &report);

    let mut emitted = doc.with_resolved_slots(&g);
    emitted.differentials = vec![DifferentialDecl {
        k,
        pieces: Some(pieces),
        edge_params: None,
    }];
    r.emitted = Some(serde_json::to_value(&emitted).expect("document serializes"));
    Ok(r)
}

pub fn cmd_span(text: &str) -> Result<Report> {
    let doc = CurveDocument::parse(text)?;
    let g = doc.graph()?;
    g.require_all_rational()?;
    span_for_graph(&g, digest(&[b"span", text.as_bytes()]))
}

pub(crate) fn span_for_graph(g: &DualGraph, input_digest: String) -> Result<Report> {
    let w = dualizing_section_space(g, 1)?;
    let m = residue_matrix(g, &w)?;
    let genus = g.total_genus();
    let delta = g.edge_count();
    let s = span_report(&m, genus, delta);
    let kernel = equisingular_kernel(&m);
    let dims = dimension_report(g)?;

    let mut r = Report::new("span", input_digest);
    r.push(
        "dualizing sections",
        Status::from_bool(w.len() == betti1(g)),
        [("dim_w", w.len()), ("b1", betti1(g))],
    );
    r.push(
        "residue span",
        Status::from_bool(s.injective && s.spans_dual),
        [
            ("rank", s.rank.to_string()),
            ("columns", s.columns.to_string()),
            ("injective", s.injective.to_string()),
            ("spans_dual", s.spans_dual.to_string()),
            ("delta", delta.to_string()),
            ("genus", genus.to_string()),
            ("delta_ge_genus", s.delta_ge_genus.to_string()),
        ],
    );
    r.push("equisingular kernel", Status::Info, [("dim", kernel.len())]);

    let values = [
        ("h_simple_pole", dims.h_vd.to_string()),
        ("h_w", dims.h_w.to_string()),
        (
            "constraints_independent",
            dims.n_constraints_independent.to_string(),
        ),
        ("im_res_dim", dims.im_res_dim.to_string()),
        ("delta_minus_1", (delta as i64 - 1).to_string()),
        ("sum_delta_x", dims.sum_delta_x.to_string()),
    ];
    if delta == 0 {
        r.push("residue rank", Status::Info, values);
    } else {
        let ok = dims.im_res_dim == delta - 1 && dims.n_constraints_independent == delta - 1;
        r.push("residue rank", Status::from_bool(ok), values);
    }
    if dims.constraint_count_discrepancy() {
        r.warn(
            "W-CONSTRAINT-COUNT",
            format!(
                "independent node constraints: {}, sum of local delta invariants: {}",
                dims.n_constraints_independent, dims.sum_delta_x
            ),
        );
    }
    let predicted = genus as i64 - (delta as i64 - 1);
    if delta > 0 && predicted != dims.h_w as i64 {
        r.warn(
            "W-RES-KERNEL",
            format!(
                "dim H0(omega) = {} but g - (delta - 1) = {predicted}; the residue sequence \
                 is exact on the simple-pole space (dim {}), not on H0 of the normalization",
                dims.h_w, dims.h_vd
            ),
        );
    }
    Ok(r)
}

/// Input for `conductor`: a singularity (catalog name or document id) and an
/// optional per-branch differential, branches separated by `;`.
#[derive(Clone, Debug, Default)]
pub struct ConductorRequest<'a> {
    pub document: Option<&'a str>,
    pub singularity: &'a str,
    pub differential: Option<&'a str>,
    pub k: u32,
    pub truncation: Option<usize>,
}

fn branch_functions(text: &str) -> Result<Vec<crate::exactnum::RationalFunction>> {
    text.split(';')
        .map(|s| parse_rational_function(s.trim()))
        .collect()
}

fn pole_order_at_zero(f: &crate::exactnum::RationalFunction) -> u32 {
    let s = LaurentSeries::expand(f, &Rational::zero(), 1);
    (-s.valuation()).max(0) as u32
}

fn resolve_system(
    req: &ConductorRequest<'_>,
    max_pole: u32,
) -> Result<(BranchSystem, ConductorData)> {
    let make = |n: usize| -> Result<BranchSystem> {
        match req.document {
            Some(text) => CurveDocument::parse(text)?
                .singularity(req.singularity)?
                .branch_system(n),
            None if CATALOG.contains(&req.singularity) => BranchSystem::catalog(req.singularity, n),
            None => Err(Error::Input(format!(
                "unknown singularity {}; catalog entries: {}",
                req.singularity,
                CATALOG.join(", ")
            ))),
        }
    };
    if let Some(n) = req.truncation {
        let b = make(n)?;
        let cd = conductor_exponents(&b)?;
        let need = default_truncation(cd.max_exponent(), req.k, max_pole);
        if n < need {
            return Err(Error::TruncationTooSmall {
                truncation: n,
                reason: format!("need at least {need} for this differential"),
            });
        }
        return Ok((b, cd));
    }
    let mut guess = 1;
    loop {
        let n = default_truncation(guess, req.k, max_pole);
        if n > MAX_AUTO_TRUNCATION {
            return Err(Error::TruncationTooSmall {
                truncation: n,
                reason: "conductor did not stabilize".into(),
            });
        }
        match conductor_exponents(&make(n)?) {
            Ok(cd) if cd.max_exponent() <= guess => return Ok((make(n)?, cd)),
            Ok(cd) => guess = cd.max_exponent(),
            Err(Error::TruncationTooSmall { .. }) => guess += 1,
            Err(e) => return Err(e),
        }
    }
}

pub fn cmd_conductor(req: &ConductorRequest<'_>) -> Result<Report> {
    if req.k == 0 {
        return Err(Error::UnsupportedK(0));
    }
    let functions = match req.differential {
        Some(text) => Some(branch_functions(text)?),
        None => None,
    };
    let max_pole = functions
        .iter()
        .flatten()
        .map(pole_order_at_zero)
        .max()
        .unwrap_or(0);
    let (b, cd) = resolve_system(req, max_pole)?;
    let n = b.truncation();

    let mut r = Report::new(
        "conductor",
        digest(&[
            b"conductor",
            req.document.unwrap_or("").as_bytes(),
            req.singularity.as_bytes(),
            req.differential.unwrap_or("").as_bytes(),
            req.k.to_string().as_bytes(),
            n.to_string().as_bytes(),
        ]),
    );
    let exps: Vec<String> = cd.exponents.iter().map(u32::to_string).collect();
    r.push(
        format!("singularity {}", req.singularity),
        Status::Info,
        [
            ("branches", b.branch_count().to_string()),
            ("truncation", n.to_string()),
            ("conductor_exponents", format!("({})", exps.join(", "))),
            ("delta", cd.delta.to_string()),
        ],
    );
    let cs = descent_constraints(&b, &cd.exponents)?;
    r.push(
        "constraint rank",
        Status::from_bool(cs.rank() == cd.delta as usize),
        [
            ("rank", cs.rank().to_string()),
            ("delta", cd.delta.to_string()),
            ("equations", cs.render_equations().join("; ")),
        ],
    );
    let tau = dualizing_generator(&b)?;
    r.push(
        "dualizing generator",
        Status::Info,
        [("tau", tau.to_string())],
    );
    if b.label() == "tacnode" {
        r.warn(
            "W-TACNODE-CONDUCTOR",
            format!(
                "conductor exponents ({}) for the primitive branches (t, t^2), (s, -s^2); \
                 the 2:1 parametrization x = t^2 = s^2, y = t^4 = -s^4 gives (4, 4)",
                exps.join(", ")
            ),
        );
    }

    let Some(functions) = functions else {
        return Ok(r);
    };
    if functions.len() != b.branch_count() {
        return Err(Error::Input(format!(
            "differential has {} branch parts, singularity has {} branches",
            functions.len(),
            b.branch_count()
        )));
    }
    let eta = LocalDifferential {
        k: req.k,
        branches: functions
            .iter()
            .map(|f| LaurentSeries::expand(f, &Rational::zero(), n as i64))
            .collect(),
    };
    if req.k == 1 {
        let pps = PrincipalPartSystem::from_differential(&eta)?;
        let orders = pps.orders();
        let ok = descends(&b, &pps)?;
        let coords: Vec<String> = polar_labels(&orders)
            .iter()
            .zip(pps.coordinates(&orders))
            .map(|(l, v)| format!("{l}={v}"))
            .collect();
        r.push(
            "descent",
            Status::from_bool(ok),
            [
                ("eta", eta.to_string()),
                ("polar_coefficients", coords.join(" ")),
            ],
        );
        let ann = conductor_annihilation_check(&cd, &pps);
        r.push(
            "conductor annihilation",
            Status::from_bool(ann),
            [("pole_orders", format!("{orders:?}"))],
        );
        let weighted = weighted_residue_check(&cd, &pps);
        r.push(
            "weighted residue",
            Status::Info,
            [("value", weighted.to_string())],
        );
        if ann && !ok {
            r.warn(
                "W-ANNIHILATION-NOT-SUFFICIENT",
                "principal parts are annihilated by the conductor but fail the residue pairing",
            );
        }
        if b.label() == "cusp" {
            // The informal rule: the order-2 coefficient vanishes, dt/t is allowed.
            let rule = pps.order(0) <= 2 && pps.coeff(0, 2).is_zero();
            if rule != ok {
                r.warn(
                    "W-CUSP-EX2-CONFLICT",
                    format!(
                        "the rule 'order-2 coefficient vanishes, t^-1 dt allowed' says {}, \
                         the residue pairing says {}; the generator is dt/t^2",
                        verdict_word(rule),
                        verdict_word(ok)
                    ),
                );
            }
        }
    } else {
        let ok = descends_k(&b, &eta)?;
        r.push(
            "descent",
            Status::from_bool(ok),
            [
                ("eta", eta.to_string()),
                ("criterion", format!("eta / tau^{} in local ring", req.k)),
            ],
        );
    }
    Ok(r)
}

fn verdict_word(ok: bool) -> &'static str {
    if ok {
        "descends"
    } else {
        "does not descend"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn conductor(sing: &str, diff: Option<&str>, k: u32) -> Report {
        cmd_conductor(&ConductorRequest {
            document: None,
            singularity: sing,
            differential: diff,
            k,
            truncation: None,
        })
        .unwrap()
    }

    #[test]
    fn conductor_examples() {
        let r = conductor("node", Some("2/u; -2/v"), 1);
        assert!(r.passed());
        let r = conductor("cusp", Some("1/t"), 1);
        assert!(!r.passed());
        assert_eq!(r.verdict("descent").unwrap().status, Status::Fail);
        assert_eq!(
            r.verdict("conductor annihilation").unwrap().status,
            Status::Pass
        );
        assert_eq!(r.value("weighted residue", "value"), Some("2"));
        assert!(r.has_warning("W-CUSP-EX2-CONFLICT"));
        assert!(r.has_warning("W-ANNIHILATION-NOT-SUFFICIENT"));
        assert!(conductor("cusp", Some("1/t^2"), 1).passed());
        assert!(conductor("cusp", Some("1/t^6"), 3).passed());
        assert!(!conductor("cusp", Some("1/t^7"), 3).passed());
        let r = conductor("tacnode", None, 1);
        assert!(r.has_warning("W-TACNODE-CONDUCTOR"));
        assert_eq!(
            r.value("singularity tacnode", "conductor_exponents"),
            Some("(2, 2)")
        );
    }

    #[test]
    fn explicit_small_truncation() {
        let err = cmd_conductor(&ConductorRequest {
            document: None,
            singularity: "tacnode",
            differential: None,
            k: 1,
            truncation: Some(5),
        })
        .unwrap_err();
        assert!(matches!(err, Error::TruncationTooSmall { .. }));
    }
}
