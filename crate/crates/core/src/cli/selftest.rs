//! Built-in acceptance suite, deterministic for a fixed seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::balance::{
    dimension_report, dualizing_section_space, equivalence_probe, residue_matrix, small_rational,
    span_report,
};
use crate::curvegraph::catalog::{chain, loops, pair, random_connected, theta, triangle};
use crate::curvegraph::{
    arithmetic_genus, betti1, harmonic_space, tropical_jacobian_dim, DualGraph,
};
use crate::diffcalc::{k_residue, residue_sum, KDifferential, Location};
use crate::error::Result;
use crate::exactnum::{q, LaurentSeries, Poly, Rational, RationalFunction};
use crate::localsing::{
    conductor_annihilation_check, conductor_exponents, constraint_count_equals_delta, descends,
    descends_k, pullback_dx_over, BiPoly, BranchSystem, LocalDifferential, PrincipalPartSystem,
};

use super::commands::{cmd_conductor, ConductorRequest};
use super::report::{digest, Report, Status};

pub const SEED: u64 = 0x5eed_0001;

type Outcome = Result<(bool, String)>;

/// Random rational function whose denominator splits over ℚ.
pub fn random_split_function<R: Rng>(rng: &mut R) -> RationalFunction {
    let mut den = Poly::one();
    for _ in 0..rng.gen_range(1..=3) {
        let root = Rational::new(rng.gen_range(-4..=4), rng.gen_range(1..=3));
        den = &den * &Poly::linear_root(&root).pow(rng.gen_range(1..=3));
    }
    let deg = rng.gen_range(0..=4);
    let num = Poly::new((0..=deg).map(|_| small_rational(rng)).collect());
    RationalFunction::new(num, den).expect("nonzero denominator")
}

fn c1_residue_examples() -> Outcome {
    let eta = KDifferential::new(3, RationalFunction::monomial(q(1, 1), -3))?;
    let at0 = k_residue(&eta, &Location::finite(q(0, 1)));
    let at_inf = k_residue(&eta, &Location::Infinity);
    let cusp = KDifferential::new(3, RationalFunction::monomial(q(1, 1), -6))?;
    let cusp0 = k_residue(&cusp, &Location::finite(q(0, 1)));
    let ok = at0 == q(1, 1) && at_inf == q(-1, 1) && cusp0.is_zero();
    Ok((ok, format!("res0={at0} res_inf={at_inf} cusp_res0={cusp0}")))
}

fn c2_chart_change() -> Outcome {
    let mut bad = Vec::new();
    for k in 1..=6u32 {
        let eta = KDifferential::new(k, RationalFunction::monomial(q(1, 1), -(k as i64)))?;
        let expected = RationalFunction::monomial(Rational::sign_power(k as i64), -(k as i64));
        if eta.to_infinity_chart().coefficient_function() != &expected {
            bad.push(k);
        }
    }
    Ok((bad.is_empty(), format!("k=1..6 mismatches={bad:?}")))
}

fn c3_residue_theorem(rng: &mut ChaCha8Rng) -> Outcome {
    let mut failures = 0;
    for _ in 0..500 {
        let eta = KDifferential::new(1, random_split_function(rng))?;
        if !residue_sum(&eta)?.is_zero() {
            failures += 1;
        }
    }
    Ok((failures == 0, format!("trials=500 failures={failures}")))
}

fn c4_balancing(rng: &mut ChaCha8Rng) -> Outcome {
    let graphs = [
        ("triangle", triangle()),
        ("chain3", chain(3)),
        ("theta", theta()),
        ("random6", random_connected(rng, 6, 3)),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (i, (name, g)) in graphs.iter().enumerate() {
        let out = equivalence_probe(g, 1, 100, SEED + i as u64)?;
        ok &= out.holds();
        parts.push(format!("{name}:{}/{} agree", out.agreements, out.trials));
    }
    Ok((ok, parts.join(" ")))
}

fn random_family(rng: &mut ChaCha8Rng, count: usize) -> Vec<DualGraph> {
    (0..count)
        .map(|_| {
            let v = rng.gen_range(1..=6);
            let extra = rng.gen_range(0..=3);
            random_connected(rng, v, extra)
        })
        .collect()
}

fn c5_dimensions(rng: &mut ChaCha8Rng) -> Outcome {
    let mut bad = 0;
    for g in random_family(rng, 20) {
        if dualizing_section_space(&g, 1)?.len() != betti1(&g) {
            bad += 1;
        }
    }
    let t = triangle();
    let tri = dualizing_section_space(&t, 1)?.len();
    let ok = bad == 0 && tri == 1 && arithmetic_genus(&t) == 1;
    Ok((ok, format!("family=20 mismatches={bad} triangle_dim={tri}")))
}

fn test_graphs(rng: &mut ChaCha8Rng) -> Vec<DualGraph> {
    let mut gs = vec![
        triangle(),
        chain(3),
        theta(),
        pair(),
        loops(1),
        loops(2),
        loops(3),
    ];
    gs.extend(random_family(rng, 5));
    gs
}

fn c6_span(rng: &mut ChaCha8Rng) -> Outcome {
    let mut bad = 0;
    let graphs = test_graphs(rng);
    for g in &graphs {
        let w = dualizing_section_space(g, 1)?;
        let s = span_report(&residue_matrix(g, &w)?, g.total_genus(), g.edge_count());
        if !(s.injective && s.spans_dual && s.delta_ge_genus) {
            bad += 1;
        }
    }
    let mut ranks = Vec::new();
    for d in 1..=3 {
        let g = loops(d);
        let w = dualizing_section_space(&g, 1)?;
        ranks.push(residue_matrix(&g, &w)?.matrix.rank());
    }
    let ok = bad == 0 && ranks == [1, 2, 3];
    Ok((
        ok,
        format!(
            "graphs={} failures={bad} loop_ranks={ranks:?}",
            graphs.len()
        ),
    ))
}

fn c7_rank() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, g) in [
        ("triangle", triangle()),
        ("loops1", loops(1)),
        ("loops2", loops(2)),
        ("loops3", loops(3)),
    ] {
        let d = dimension_report(&g)?;
        let target = g.edge_count() - 1;
        let span = super::commands::span_for_graph(&g, String::new())?;
        ok &= d.im_res_dim == target
            && d.h_vd - d.h_w == target
            && d.constraint_count_discrepancy()
            && span.has_warning("W-CONSTRAINT-COUNT");
        parts.push(format!("{name}:{}={}", d.im_res_dim, target));
    }
    Ok((ok, parts.join(" ")))
}

fn c8_conductors() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, exps, delta) in [
        ("node", vec![1, 1], 1),
        ("cusp", vec![2], 1),
        ("tacnode", vec![2, 2], 2),
    ] {
        let b = BranchSystem::catalog(name, 12)?;
        let cd = conductor_exponents(&b)?;
        let count = constraint_count_equals_delta(&b)?;
        ok &= cd.exponents == exps && cd.delta == delta && count.holds();
        parts.push(format!(
            "{name}:{:?}/{}/rank{}",
            cd.exponents, cd.delta, count.rank
        ));
    }
    Ok((ok, parts.join(" ")))
}

fn c9_descent() -> Outcome {
    let node = BranchSystem::catalog("node", 12)?;
    let mut node_ok = true;
    for a in -2..=2 {
        for b in -2..=2 {
            let eta = PrincipalPartSystem::new(1, vec![vec![q(a, 1)], vec![q(b, 1)]]);
            node_ok &= descends(&node, &eta)? == (a + b == 0);
        }
    }
    let cusp = BranchSystem::catalog("cusp", 12)?;
    let gen_ok = descends(
        &cusp,
        &PrincipalPartSystem::new(1, vec![vec![q(1, 1), q(0, 1)]]),
    )?;
    let two_y = BiPoly::from_ints(&[(2, 0, 1)]);
    let pulled = pullback_dx_over(&two_y, &cusp, 0)?;
    let pull_ok =
        pulled.agrees_with(&LaurentSeries::monomial(q(1, 1), -2, 8)) && pulled.valuation() == -2;
    let simple = PrincipalPartSystem::new(1, vec![vec![q(1, 1)]]);
    let cd = conductor_exponents(&cusp)?;
    let simple_ok = !descends(&cusp, &simple)? && conductor_annihilation_check(&cd, &simple);
    let report = cmd_conductor(&ConductorRequest {
        document: None,
        singularity: "cusp",
        differential: Some("1/t"),
        k: 1,
        truncation: None,
    })?;
    let warn_ok = report.has_warning("W-CUSP-EX2-CONFLICT");
    let ok = node_ok && gen_ok && pull_ok && simple_ok && warn_ok;
    Ok((
        ok,
        format!("node={node_ok} generator={gen_ok} pullback={pull_ok} dt/t={simple_ok} warning={warn_ok}"),
    ))
}

fn c10_k3() -> Outcome {
    let cusp = BranchSystem::catalog("cusp", 16)?;
    let n = cusp.truncation() as i64;
    let eta = |e: i64| LocalDifferential {
        k: 3,
        branches: vec![LaurentSeries::monomial(q(1, 1), e, n)],
    };
    let (a, b, c) = (
        descends_k(&cusp, &eta(-6))?,
        descends_k(&cusp, &eta(-3))?,
        descends_k(&cusp, &eta(-7))?,
    );
    Ok((a && b && !c, format!("t^-6={a} t^-3={b} t^-7={c}")))
}

fn c11_tropical(rng: &mut ChaCha8Rng) -> Outcome {
    let mut bad = 0;
    let graphs = test_graphs(rng);
    for g in &graphs {
        if harmonic_space(g).len() != betti1(g) {
            bad += 1;
        }
    }
    let tj = tropical_jacobian_dim(&triangle());
    Ok((
        bad == 0 && tj == 1,
        format!("graphs={} mismatches={bad} triangle_jac={tj}", graphs.len()),
    ))
}

/// Criteria 1 to 11 as `(number, outcome)`.
pub fn run_criteria() -> Vec<(u32, Outcome)> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    vec![
        (1, c1_residue_examples()),
        (2, c2_chart_change()),
        (3, c3_residue_theorem(&mut rng)),
        (4, c4_balancing(&mut rng)),
        (5, c5_dimensions(&mut rng)),
        (6, c6_span(&mut rng)),
        (7, c7_rank()),
        (8, c8_conductors()),
        (9, c9_descent()),
        (10, c10_k3()),
        (11, c11_tropical(&mut rng)),
    ]
}

fn suite_report() -> Report {
    let mut r = Report::new("selftest", digest(&[b"selftest", &SEED.to_le_bytes()]));
    for (n, outcome) in run_criteria() {
        let subject = format!("criterion {n}");
        match outcome {
            Ok((ok, detail)) => r.push(subject, Status::from_bool(ok), [("detail", detail)]),
            Err(e) => r.push(subject, Status::Fail, [("error", e.to_string())]),
        }
    }
    r
}

pub fn cmd_selftest() -> Report {
    let first = suite_report();
    let second = suite_report();
    let same = first.to_json() == second.to_json();
    let mut r = first;
    r.push(
        "criterion 12",
        Status::from_bool(same),
        [("detail", format!("repeat_identical={same}"))],
    );
    r
}
