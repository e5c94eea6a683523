//! Global differentials on nodal curves with rational components: the
//! edge-parameter construction, balancing verdicts, dualizing sections and
//! residue-span diagnostics.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curvegraph::{betti1, DualGraph, End};
use crate::diffcalc::{self, k_residue, polar_space, KDifferential, Location, PrincipalPart};
use crate::error::{Error, Result};
use crate::exactnum::{Matrix, Rational};

/// One k-differential per rational component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlobalKDifferential {
    pub k: u32,
    pub pieces: BTreeMap<String, KDifferential>,
}

impl GlobalKDifferential {
    pub fn zero(g: &DualGraph, k: u32) -> GlobalKDifferential {
        GlobalKDifferential {
            k,
            pieces: g
                .components()
                .iter()
                .filter(|c| c.rational_chart())
                .map(|c| (c.id.clone(), KDifferential::zero(k)))
                .collect(),
        }
    }

    pub fn piece(&self, component: &str) -> Result<&KDifferential> {
        self.pieces
            .get(component)
            .ok_or_else(|| Error::Input(format!("no differential on component {component}")))
    }

    /// Linear combination `Σ c_i η_i` of differentials with the same k.
    pub fn combination(k: u32, terms: &[(Rational, &GlobalKDifferential)]) -> GlobalKDifferential {
        let mut pieces: BTreeMap<String, KDifferential> = BTreeMap::new();
        for (c, eta) in terms {
            for (id, piece) in &eta.pieces {
                let scaled = piece.scale(c);
                pieces
                    .entry(id.clone())
                    .and_modify(|p| *p = p.add(&scaled))
                    .or_insert(scaled);
            }
        }
        GlobalKDifferential { k, pieces }
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.values().all(KDifferential::is_zero)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeResidue {
    pub edge: String,
    pub res_plus: Rational,
    pub res_minus: Rational,
    pub sum: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentResidue {
    pub component: String,
    /// k-residue at every pole of the piece, infinity included.
    pub residues: BTreeMap<Location, Rational>,
    pub sum: Rational,
}

/// Local (per-edge) and global (per-component) residue data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeResidueReport {
    pub k: u32,
    pub edges: Vec<EdgeResidue>,
    pub components: Vec<ComponentResidue>,
}

impl EdgeResidueReport {
    /// Residues at the two branches of every node cancel.
    pub fn local_ok(&self) -> bool {
        self.edges.iter().all(|e| e.sum.is_zero())
    }

    /// The residues on every component sum to zero.
    pub fn global_ok(&self) -> bool {
        self.components.iter().all(|c| c.sum.is_zero())
    }
}

/// On each component, a pure order-k part `±a_e / (z - z_e)^k` at every node
/// slot: `+a_e` on the `+` end of `e`, `-a_e` on the `-` end.
pub fn construct_global(
    g: &DualGraph,
    k: u32,
    params: &BTreeMap<String, Rational>,
) -> Result<GlobalKDifferential> {
    g.require_all_rational()?;
    for id in params.keys() {
        g.edge(id)?;
    }
    let mut parts: BTreeMap<&str, Vec<PrincipalPart>> = BTreeMap::new();
    for e in g.edges() {
        let a = params
            .get(&e.id)
            .ok_or_else(|| Error::Input(format!("no parameter for edge {}", e.id)))?;
        for (end, sign) in [(End::Plus, a.clone()), (End::Minus, -a)] {
            let ee = e.end(end);
            let Location::Finite(at) = &ee.at else {
                return Err(Error::InfiniteLocation);
            };
            parts
                .entry(ee.component.as_str())
                .or_default()
                .push(PrincipalPart::pure(at.clone(), k, sign));
        }
    }
    let mut pieces = BTreeMap::new();
    for c in g.components() {
        let ps = parts.remove(c.id.as_str()).unwrap_or_default();
        pieces.insert(c.id.clone(), diffcalc::from_principal_parts(k, &ps)?);
    }
    Ok(GlobalKDifferential { k, pieces })
}

pub fn check_balancing(g: &DualGraph, eta: &GlobalKDifferential) -> Result<EdgeResidueReport> {
    let mut edges = Vec::new();
    for e in g.edges() {
        let res_plus = k_residue(eta.piece(&e.plus.component)?, &e.plus.at);
        let res_minus = k_residue(eta.piece(&e.minus.component)?, &e.minus.at);
        let sum = &res_plus + &res_minus;
        edges.push(EdgeResidue {
            edge: e.id.clone(),
            res_plus,
            res_minus,
            sum,
        });
    }
    let mut components = Vec::new();
    for c in g.components().iter().filter(|c| c.rational_chart()) {
        let residues = diffcalc::all_residues(eta.piece(&c.id)?)?;
        let sum = residues.values().sum();
        components.push(ComponentResidue {
            component: c.id.clone(),
            residues,
            sum,
        });
    }
    Ok(EdgeResidueReport {
        k: eta.k,
        edges,
        components,
    })
}

/// Per-component differentials with at most simple poles at the node slots
/// and no other poles, flattened into one list of columns.
struct SimplePoleSpace {
    columns: Vec<(String, KDifferential)>,
}

impl SimplePoleSpace {
    fn new(g: &DualGraph) -> Result<SimplePoleSpace> {
        g.require_all_rational()?;
        let mut columns = Vec::new();
        for c in g.components() {
            let mut finite = Vec::new();
            let mut at_infinity = 0;
            for loc in c.node_slots.values() {
                match loc {
                    Location::Finite(p) => finite.push((p.clone(), 1)),
                    Location::Infinity => at_infinity = 1,
                }
            }
            for eta in polar_space(1, &finite, at_infinity)? {
                columns.push((c.id.clone(), eta));
            }
        }
        Ok(SimplePoleSpace { columns })
    }

    fn dim(&self) -> usize {
        self.columns.len()
    }

    /// Residue of column `j` at one end of an edge (zero off its component).
    fn residue_at(&self, g: &DualGraph, j: usize, edge: usize, end: End) -> Rational {
        let e = &g.edges()[edge];
        let ee = e.end(end);
        let (comp, eta) = &self.columns[j];
        if *comp == ee.component {
            k_residue(eta, &ee.at)
        } else {
            Rational::zero()
        }
    }

    /// Rows: edges; entries `res_+ + res_-` of each column.
    fn edge_sum_matrix(&self, g: &DualGraph) -> Matrix {
        let rows = (0..g.edge_count())
            .map(|i| {
                (0..self.dim())
                    .map(|j| {
                        self.residue_at(g, j, i, End::Plus) + self.residue_at(g, j, i, End::Minus)
                    })
                    .collect()
            })
            .collect();
        Matrix::from_rows(self.dim(), rows)
    }

    fn assemble(&self, g: &DualGraph, coeffs: &[Rational]) -> GlobalKDifferential {
        let mut eta = GlobalKDifferential::zero(g, 1);
        for ((comp, piece), c) in self.columns.iter().zip(coeffs) {
            if c.is_zero() {
                continue;
            }
            let p = eta.pieces.get_mut(comp).unwrap();
            *p = p.add(&piece.scale(c));
        }
        eta
    }
}

/// Basis of the global sections of the dualizing sheaf: differentials with at
/// most simple poles at node slots, regular elsewhere (infinity included),
/// with balanced residues at every node.
pub fn dualizing_section_space(g: &DualGraph, k: u32) -> Result<Vec<GlobalKDifferential>> {
    if k != 1 {
        return Err(Error::UnsupportedK(k));
    }
    let vd = SimplePoleSpace::new(g)?;
    let m = vd.edge_sum_matrix(g);
    Ok(m.kernel().iter().map(|v| vd.assemble(g, v)).collect())
}

/// Node residue functionals `r_e = Res_{q_e^+}` evaluated on a basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueMatrix {
    pub matrix: Matrix,
    pub edges: Vec<String>,
}

pub fn residue_matrix(g: &DualGraph, basis: &[GlobalKDifferential]) -> Result<ResidueMatrix> {
    let mut rows = Vec::new();
    for e in g.edges() {
        let row = basis
            .iter()
            .map(|eta| Ok(k_residue(eta.piece(&e.plus.component)?, &e.plus.at)))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok(ResidueMatrix {
        matrix: Matrix::from_rows(basis.len(), rows),
        edges: g.edges().iter().map(|e| e.id.clone()).collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanReport {
    pub rank: usize,
    pub columns: usize,
    pub injective: bool,
    /// The functionals span the dual space exactly when `Res` is injective.
    pub spans_dual: bool,
    pub delta_ge_genus: bool,
}

pub fn span_report(m: &ResidueMatrix, genus: u32, delta: usize) -> SpanReport {
    let rank = m.matrix.rank();
    let columns = m.matrix.ncols();
    SpanReport {
        rank,
        columns,
        injective: rank == columns,
        spans_dual: rank == columns,
        delta_ge_genus: delta >= genus as usize,
    }
}

/// Kernel of the combined residue map, in coordinates of the basis.
pub fn equisingular_kernel(m: &ResidueMatrix) -> Vec<Vec<Rational>> {
    m.matrix.kernel()
}

/// Dimension counts for a connected curve with rational components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimensionReport {
    /// Differentials with at most simple poles at all node slots.
    pub h_vd: usize,
    /// Balanced ones among them (global dualizing sections).
    pub h_w: usize,
    pub n_constraints_independent: usize,
    /// Rank of the node-sum residue map on the simple-pole space.
    pub im_res_dim: usize,
    pub delta: usize,
    pub sum_delta_x: usize,
    /// Kernel of the node-sum residue map on the simple-pole space (= `h_w`).
    pub res_kernel_on_vd: usize,
    /// Kernel of the branch residue functionals restricted to `W`.
    pub res_kernel_on_w: usize,
    pub betti1: usize,
}

impl DimensionReport {
    /// The independent constraint count differs from `Σ δ_x`.
    pub fn constraint_count_discrepancy(&self) -> bool {
        self.n_constraints_independent != self.sum_delta_x
    }
}

pub fn dimension_report(g: &DualGraph) -> Result<DimensionReport> {
    let vd = SimplePoleSpace::new(g)?;
    let sums = vd.edge_sum_matrix(g);
    let im_res_dim = sums.rank();
    let w = dualizing_section_space(g, 1)?;
    let rm = residue_matrix(g, &w)?;
    let delta = g.edge_count();
    Ok(DimensionReport {
        h_vd: vd.dim(),
        h_w: w.len(),
        n_constraints_independent: vd.dim() - w.len(),
        im_res_dim,
        delta,
        sum_delta_x: delta,
        res_kernel_on_vd: vd.dim() - im_res_dim,
        res_kernel_on_w: equisingular_kernel(&rm).len(),
        betti1: betti1(g),
    })
}

/// A random small rational with numerator and denominator in `[-9, 9] \ {0}`.
pub fn small_rational<R: Rng>(rng: &mut R) -> Rational {
    let pick = |rng: &mut R| {
        let v = rng.gen_range(1..=9);
        if rng.gen_bool(0.5) {
            v
        } else {
            -v
        }
    };
    Rational::new(pick(rng), pick(rng))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub trial: usize,
    pub local_ok: bool,
    pub global_ok: bool,
    pub differential: GlobalKDifferential,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeOutcome {
    pub trials: usize,
    pub agreements: usize,
    /// Trials with balanced nodes but a nonzero component sum.
    pub local_without_global: usize,
    /// Trials with vanishing component sums but an unbalanced node.
    pub global_without_local: usize,
    pub first_counterexample: Option<Counterexample>,
}

impl ProbeOutcome {
    pub fn holds(&self) -> bool {
        self.first_counterexample.is_none()
    }
}

/// Tests `local_ok ⇔ global_ok` on random differentials with at most simple
/// poles at node slots. Half of the trials are drawn from the whole
/// simple-pole space, half from the balanced subspace.
pub fn equivalence_probe(g: &DualGraph, k: u32, trials: usize, seed: u64) -> Result<ProbeOutcome> {
    if k != 1 {
        return Err(Error::UnsupportedK(k));
    }
    let vd = SimplePoleSpace::new(g)?;
    let w = dualizing_section_space(g, 1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = ProbeOutcome {
        trials,
        agreements: 0,
        local_without_global: 0,
        global_without_local: 0,
        first_counterexample: None,
    };
    for trial in 0..trials {
        let eta = if trial % 2 == 0 {
            let coeffs: Vec<Rational> = (0..vd.dim()).map(|_| small_rational(&mut rng)).collect();
            vd.assemble(g, &coeffs)
        } else {
            let coeffs: Vec<Rational> = (0..w.len()).map(|_| small_rational(&mut rng)).collect();
            let terms: Vec<(Rational, &GlobalKDifferential)> = coeffs.into_iter().zip(&w).collect();
            if terms.is_empty() {
                GlobalKDifferential::zero(g, 1)
            } else {
                GlobalKDifferential::combination(1, &terms)
            }
        };
        let report = check_balancing(g, &eta)?;
        let (l, gl) = (report.local_ok(), report.global_ok());
        if l == gl {
            out.agreements += 1;
            continue;
        }
        if l {
            out.local_without_global += 1;
        } else {
            out.global_without_local += 1;
        }
        if out.first_counterexample.is_none() {
            out.first_counterexample = Some(Counterexample {
                trial,
                local_ok: l,
                global_ok: gl,
                differential: eta,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvegraph::catalog::*;
    use crate::exactnum::{parse_rational_function, q};

    fn params(pairs: &[(&str, Rational)]) -> BTreeMap<String, Rational> {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), v.clone()))
            .collect()
    }

    #[test]
    fn construct_triangle_residue_table() {
        let g = triangle();
        let (a12, a23, a31) = (q(1, 1), q(2, 1), q(3, 1));
        let eta = construct_global(
            &g,
            1,
            &params(&[
                ("q12", a12.clone()),
                ("q23", a23.clone()),
                ("q31", a31.clone()),
            ]),
        )
        .unwrap();
        let r = check_balancing(&g, &eta).unwrap();
        let by_edge: BTreeMap<_, _> = r.edges.iter().map(|e| (e.edge.as_str(), e)).collect();
        assert_eq!(by_edge["q12"].res_plus, a12);
        assert_eq!(by_edge["q12"].res_minus, -&a12);
        assert_eq!(by_edge["q23"].res_plus, a23);
        assert_eq!(by_edge["q23"].res_minus, -&a23);
        // q31: eta_3 carries -a31, eta_1 carries +a31
        assert_eq!(by_edge["q31"].res_minus, -&a31);
        assert_eq!(by_edge["q31"].res_plus, a31);
        assert!(r.local_ok());
        assert!(r.global_ok());
    }

    #[test]
    fn construct_pair_k3() {
        let g = pair();
        let eta = construct_global(&g, 3, &params(&[("q", q(1, 1))])).unwrap();
        let expected1 = parse_rational_function("1/z^3").unwrap();
        let expected2 = parse_rational_function("-1/u^3").unwrap();
        assert_eq!(eta.pieces["C1"].coefficient_function(), &expected1);
        assert_eq!(eta.pieces["C2"].coefficient_function(), &expected2);
        let r = check_balancing(&g, &eta).unwrap();
        assert!(r.local_ok() && r.global_ok());
    }

    #[test]
    fn zero_params_give_zero_pieces() {
        let g = theta();
        let eta = construct_global(
            &g,
            2,
            &params(&[("e1", q(0, 1)), ("e2", q(0, 1)), ("e3", q(0, 1))]),
        )
        .unwrap();
        assert!(eta.is_zero());
    }

    #[test]
    fn unbalanced_pieces() {
        let g = pair();
        let mut eta = GlobalKDifferential::zero(&g, 1);
        eta.pieces.insert(
            "C1".into(),
            KDifferential::new(1, parse_rational_function("1/z").unwrap()).unwrap(),
        );
        let r = check_balancing(&g, &eta).unwrap();
        assert_eq!(r.edges[0].sum, q(1, 1));
        assert!(!r.local_ok());
        // dz/z has residue -1 at infinity
        assert!(r.global_ok());
    }

    #[test]
    fn even_k_pair_reports_infinity_residues() {
        let g = pair();
        let eta = construct_global(&g, 4, &params(&[("q", q(1, 1))])).unwrap();
        let r = check_balancing(&g, &eta).unwrap();
        assert!(r.local_ok());
        assert_eq!(r.components[0].residues[&Location::Infinity], q(1, 1));
        assert_eq!(r.components[1].residues[&Location::Infinity], q(-1, 1));
        assert_eq!(r.components[0].sum, q(2, 1));
        assert!(!r.global_ok());
    }

    #[test]
    fn dualizing_dimensions() {
        let w = dualizing_section_space(&triangle(), 1).unwrap();
        assert_eq!(w.len(), 1);
        let m = residue_matrix(&triangle(), &w).unwrap();
        let col = m.matrix.column(0);
        // proportional to (1, 1, -1) in edge order q12, q23, q31
        assert_eq!(col[1], col[0]);
        assert_eq!(col[2], -&col[0]);
        assert!(!col[0].is_zero());

        assert!(dualizing_section_space(&pair(), 1).unwrap().is_empty());
        for d in 1..=3 {
            assert_eq!(dualizing_section_space(&loops(d), 1).unwrap().len(), d);
        }
        assert!(matches!(
            dualizing_section_space(&pair(), 2),
            Err(Error::UnsupportedK(2))
        ));
    }

    #[test]
    fn span_and_kernel() {
        let g = loops(2);
        let w = dualizing_section_space(&g, 1).unwrap();
        let m = residue_matrix(&g, &w).unwrap();
        let s = span_report(&m, 0, 2);
        assert_eq!(s.rank, 2);
        assert!(s.injective && s.spans_dual && s.delta_ge_genus);

        let tree = chain(3);
        let m = residue_matrix(&tree, &dualizing_section_space(&tree, 1).unwrap()).unwrap();
        assert_eq!(m.matrix.ncols(), 0);
        let s = span_report(&m, 0, 2);
        assert!(s.injective && s.spans_dual);
        assert!(equisingular_kernel(&m).is_empty());

        let tri = triangle();
        let m = residue_matrix(&tri, &dualizing_section_space(&tri, 1).unwrap()).unwrap();
        assert!(equisingular_kernel(&m).is_empty());

        let artificial = ResidueMatrix {
            matrix: Matrix::from_rows(2, vec![vec![q(1, 1), q(1, 1)], vec![q(1, 1), q(1, 1)]]),
            edges: vec!["a".into(), "b".into()],
        };
        assert_eq!(
            equisingular_kernel(&artificial),
            vec![vec![q(-1, 1), q(1, 1)]]
        );
    }

    #[test]
    fn dimension_examples() {
        let r = dimension_report(&loops(3)).unwrap();
        assert_eq!(
            (r.h_vd, r.h_w, r.n_constraints_independent, r.im_res_dim),
            (5, 3, 2, 2)
        );
        let r = dimension_report(&triangle()).unwrap();
        assert_eq!((r.h_vd, r.h_w, r.n_constraints_independent), (3, 1, 2));
        assert!(r.constraint_count_discrepancy());
        let r = dimension_report(&pair()).unwrap();
        assert_eq!((r.h_vd, r.h_w, r.n_constraints_independent), (0, 0, 0));
    }

    #[test]
    fn probe_on_small_graphs() {
        // Single loop: the residue theorem forces balance, both sides agree.
        assert!(equivalence_probe(&loops(1), 1, 50, 7).unwrap().holds());
        // Two components, one node: every simple-pole differential is zero.
        assert!(equivalence_probe(&pair(), 1, 50, 7).unwrap().holds());
        // On a chain of three, component sums always vanish while the middle
        // component's residues need not balance against the ends.
        let out = equivalence_probe(&chain(3), 1, 50, 7).unwrap();
        assert!(!out.holds());
        assert_eq!(out.local_without_global, 0);
        assert!(out.global_without_local > 0);
        assert!(matches!(
            equivalence_probe(&pair(), 2, 1, 0),
            Err(Error::UnsupportedK(2))
        ));
    }

    #[test]
    fn construct_rejects_genus() {
        let g = crate::curvegraph::DualGraphBuilder::new()
            .component("E", 1)
            .component("P", 0)
            .edge("q", "E", "P")
            .build()
            .unwrap();
        assert!(matches!(
            construct_global(&g, 1, &params(&[("q", q(1, 1))])),
            Err(Error::NonRationalComponent(_))
        ));
        assert!(matches!(
            dimension_report(&g),
            Err(Error::NonRationalComponent(_))
        ));
    }
}
