//! Dual graphs of nodal curves.
//!
//! Vertices are irreducible components with a genus label; edges are nodes,
//! each with an oriented pair of branch points (`+` end and `-` end) placed at
//! chart coordinates on their components.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::Rng;

use crate::diffcalc::Location;
use crate::error::{Error, Result};
use crate::exactnum::{ConstraintSystem, Matrix, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum End {
    Plus,
    Minus,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeEnd {
    pub component: String,
    pub at: Location,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    pub plus: EdgeEnd,
    pub minus: EdgeEnd,
    /// Degeneration exponent `m` of the local model `xy = t^m`.
    pub length: u32,
}

impl Edge {
    pub fn end(&self, end: End) -> &EdgeEnd {
        match end {
            End::Plus => &self.plus,
            End::Minus => &self.minus,
        }
    }

    pub fn is_loop(&self) -> bool {
        self.plus.component == self.minus.component
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub id: String,
    pub genus: u32,
    /// Chart coordinate of every edge end lying on this component.
    pub node_slots: BTreeMap<(String, End), Location>,
}

impl Component {
    /// Explicit differentials are only supported on rational components.
    pub fn rational_chart(&self) -> bool {
        self.genus == 0
    }
}

/// Edge declaration for [`DualGraphBuilder`]; unset coordinates are filled
/// with the smallest unused non-negative integer on that component.
#[derive(Clone, Debug, Default)]
pub struct EdgeSpec {
    pub id: String,
    pub plus: String,
    pub plus_at: Option<Location>,
    pub minus: String,
    pub minus_at: Option<Location>,
    pub length: Option<u32>,
}

#[derive(Clone, Debug, Default)]
pub struct DualGraphBuilder {
    components: Vec<(String, u32)>,
    edges: Vec<EdgeSpec>,
}

impl DualGraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn component(&mut self, id: &str, genus: u32) -> &mut Self {
        self.components.push((id.to_string(), genus));
        self
    }

    pub fn edge(&mut self, id: &str, plus: &str, minus: &str) -> &mut Self {
        self.edges.push(EdgeSpec {
            id: id.into(),
            plus: plus.into(),
            minus: minus.into(),
            ..EdgeSpec::default()
        });
        self
    }

    /// Edge with explicit coordinates for both ends.
    pub fn edge_at(&mut self, id: &str, plus: (&str, i64), minus: (&str, i64)) -> &mut Self {
        self.edges.push(EdgeSpec {
            id: id.into(),
            plus: plus.0.into(),
            plus_at: Some(Location::Finite(Rational::integer(plus.1))),
            minus: minus.0.into(),
            minus_at: Some(Location::Finite(Rational::integer(minus.1))),
            length: None,
        });
        self
    }

    pub fn edge_spec(&mut self, spec: EdgeSpec) -> &mut Self {
        self.edges.push(spec);
        self
    }

    pub fn build(&self) -> Result<DualGraph> {
        if self.components.is_empty() {
            return Err(Error::InvalidGraph("no components".into()));
        }
        let mut comps: BTreeMap<String, Component> = BTreeMap::new();
        for (id, genus) in &self.components {
            let c = Component {
                id: id.clone(),
                genus: *genus,
                node_slots: BTreeMap::new(),
            };
            if comps.insert(id.clone(), c).is_some() {
                return Err(Error::DuplicateId(id.clone()));
            }
        }

        // Explicit coordinates claim their slots first.
        let mut taken: BTreeMap<String, BTreeSet<Location>> = BTreeMap::new();
        for spec in &self.edges {
            for (comp, at) in [(&spec.plus, &spec.plus_at), (&spec.minus, &spec.minus_at)] {
                if !comps.contains_key(comp) {
                    return Err(Error::UnknownComponent(comp.clone()));
                }
                if let Some(at) = at {
                    if !taken.entry(comp.clone()).or_default().insert(at.clone()) {
                        return Err(Error::DuplicateSlot {
                            component: comp.clone(),
                            coord: at.to_string(),
                        });
                    }
                }
            }
        }

        let mut next_free: BTreeMap<String, i64> = BTreeMap::new();
        let mut edges: BTreeMap<String, Edge> = BTreeMap::new();
        for spec in &self.edges {
            let mut place = |comp: &str, at: &Option<Location>| -> Location {
                if let Some(at) = at {
                    return at.clone();
                }
                let used = taken.entry(comp.to_string()).or_default();
                let n = next_free.entry(comp.to_string()).or_insert(0);
                loop {
                    let cand = Location::Finite(Rational::integer(*n));
                    *n += 1;
                    if used.insert(cand.clone()) {
                        return cand;
                    }
                }
            };
            let plus_at = place(&spec.plus, &spec.plus_at);
            let minus_at = place(&spec.minus, &spec.minus_at);
            let length = spec.length.unwrap_or(1);
            if length == 0 {
                return Err(Error::InvalidGraph(format!(
                    "edge {} has length 0",
                    spec.id
                )));
            }
            let edge = Edge {
                id: spec.id.clone(),
                plus: EdgeEnd {
                    component: spec.plus.clone(),
                    at: plus_at,
                },
                minus: EdgeEnd {
                    component: spec.minus.clone(),
                    at: minus_at,
                },
                length,
            };
            if edges.insert(spec.id.clone(), edge).is_some() {
                return Err(Error::DuplicateId(spec.id.clone()));
            }
        }

        for e in edges.values() {
            for end in [End::Plus, End::Minus] {
                let ee = e.end(end);
                comps
                    .get_mut(&ee.component)
                    .unwrap()
                    .node_slots
                    .insert((e.id.clone(), end), ee.at.clone());
            }
        }

        let graph = DualGraph {
            components: comps.into_values().collect(),
            edges: edges.into_values().collect(),
        };
        if !graph.is_connected() {
            return Err(Error::DisconnectedGraph);
        }
        Ok(graph)
    }
}

/// A connected dual graph; components and edges are kept sorted by id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualGraph {
    components: Vec<Component>,
    edges: Vec<Edge>,
}

impl DualGraph {
    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn component(&self, id: &str) -> Result<&Component> {
        self.component_index(id)
            .map(|i| &self.components[i])
            .ok_or_else(|| Error::UnknownComponent(id.to_string()))
    }

    pub fn component_index(&self, id: &str) -> Option<usize> {
        self.components
            .binary_search_by(|c| c.id.as_str().cmp(id))
            .ok()
    }

    pub fn edge(&self, id: &str) -> Result<&Edge> {
        self.edges
            .binary_search_by(|e| e.id.as_str().cmp(id))
            .map(|i| &self.edges[i])
            .map_err(|_| Error::UnknownEdge(id.to_string()))
    }

    pub fn vertex_count(&self) -> usize {
        self.components.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn total_genus(&self) -> u32 {
        self.components.iter().map(|c| c.genus).sum()
    }

    pub fn is_all_rational(&self) -> bool {
        self.components.iter().all(Component::rational_chart)
    }

    /// First component with positive genus, as an error.
    pub fn require_all_rational(&self) -> Result<()> {
        match self.components.iter().find(|c| !c.rational_chart()) {
            Some(c) => Err(Error::NonRationalComponent(c.id.clone())),
            None => Ok(()),
        }
    }

    /// The same graph with one edge's orientation swapped.
    pub fn reversed(&self, edge_id: &str) -> Result<DualGraph> {
        let mut g = self.clone();
        let e = g
            .edges
            .iter_mut()
            .find(|e| e.id == edge_id)
            .ok_or_else(|| Error::UnknownEdge(edge_id.to_string()))?;
        std::mem::swap(&mut e.plus, &mut e.minus);
        for c in &mut g.components {
            let p = c.node_slots.remove(&(edge_id.to_string(), End::Plus));
            let m = c.node_slots.remove(&(edge_id.to_string(), End::Minus));
            if let Some(p) = p {
                c.node_slots.insert((edge_id.to_string(), End::Minus), p);
            }
            if let Some(m) = m {
                c.node_slots.insert((edge_id.to_string(), End::Plus), m);
            }
        }
        Ok(g)
    }

    fn is_connected(&self) -> bool {
        let n = self.components.len();
        let mut adj = vec![Vec::new(); n];
        for e in &self.edges {
            let a = self.component_index(&e.plus.component).unwrap();
            let b = self.component_index(&e.minus.component).unwrap();
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// An assignment `r_e` of a rational number to every edge.
pub type Flow = BTreeMap<String, Rational>;

/// `|E| - |V| + 1`
pub fn betti1(g: &DualGraph) -> usize {
    g.edge_count() + 1 - g.vertex_count()
}

/// `Σ g_v + b₁(Γ)`
pub fn arithmetic_genus(g: &DualGraph) -> usize {
    g.total_genus() as usize + betti1(g)
}

/// `g + Σ δ_p`
pub fn arithmetic_genus_from_delta(genus: u32, deltas: &[u32]) -> u32 {
    genus + deltas.iter().sum::<u32>()
}

/// Signed incidence: one row per vertex, one column per edge, `+1` where the
/// edge leaves the vertex and `-1` where it arrives. Loops cancel.
pub fn vertex_balance_matrix(g: &DualGraph) -> ConstraintSystem {
    let mut m = Matrix::zeros(g.vertex_count(), g.edge_count());
    for (j, e) in g.edges.iter().enumerate() {
        let a = g.component_index(&e.plus.component).unwrap();
        let b = g.component_index(&e.minus.component).unwrap();
        m[(a, j)] += Rational::one();
        m[(b, j)] -= &Rational::one();
    }
    ConstraintSystem::new(
        m,
        g.components.iter().map(|c| c.id.clone()).collect(),
        g.edges.iter().map(|e| e.id.clone()).collect(),
    )
}

/// Basis of the harmonic 1-forms (balanced flows) on the graph.
pub fn harmonic_space(g: &DualGraph) -> Vec<Flow> {
    let cs = vertex_balance_matrix(g);
    cs.solution_basis()
        .into_iter()
        .map(|v| cs.column_labels.iter().cloned().zip(v).collect())
        .collect()
}

pub fn tropical_jacobian_dim(g: &DualGraph) -> usize {
    betti1(g)
}

/// Ready-made graphs used throughout tests and the self-test.
pub mod catalog {
    use super::*;

    /// Three rational components in a cycle, with node coordinates
    /// `q12: (C1, 0)-(C2, 0)`, `q23: (C2, 1)-(C3, 0)` and `q31` with its `+`
    /// end at `(C1, 1)` and `-` end at `(C3, 1)`.
    pub fn triangle() -> DualGraph {
        DualGraphBuilder::new()
            .component("C1", 0)
            .component("C2", 0)
            .component("C3", 0)
            .edge_at("q12", ("C1", 0), ("C2", 0))
            .edge_at("q23", ("C2", 1), ("C3", 0))
            .edge_at("q31", ("C1", 1), ("C3", 1))
            .build()
            .unwrap()
    }

    /// Two rational components meeting in one node at `z = 0` on both.
    pub fn pair() -> DualGraph {
        DualGraphBuilder::new()
            .component("C1", 0)
            .component("C2", 0)
            .edge_at("q", ("C1", 0), ("C2", 0))
            .build()
            .unwrap()
    }

    /// A path of `n` rational components.
    pub fn chain(n: usize) -> DualGraph {
        let mut b = DualGraphBuilder::new();
        for i in 0..n {
            b.component(&format!("C{i}"), 0);
        }
        for i in 1..n {
            b.edge(&format!("e{i}"), &format!("C{}", i - 1), &format!("C{i}"));
        }
        b.build().unwrap()
    }

    /// Two rational components joined by three nodes.
    pub fn theta() -> DualGraph {
        DualGraphBuilder::new()
            .component("A", 0)
            .component("B", 0)
            .edge("e1", "A", "B")
            .edge("e2", "A", "B")
            .edge("e3", "A", "B")
            .build()
            .unwrap()
    }

    /// One rational component with `delta` self-nodes.
    pub fn loops(delta: usize) -> DualGraph {
        let mut b = DualGraphBuilder::new();
        b.component("C", 0);
        for i in 0..delta {
            b.edge(&format!("l{i}"), "C", "C");
        }
        b.build().unwrap()
    }

    /// Random connected graph: a random spanning tree plus `extra` random
    /// edges (loops and multi-edges allowed).
    pub fn random_connected<R: Rng>(rng: &mut R, vertices: usize, extra: usize) -> DualGraph {
        assert!(vertices >= 1);
        let mut b = DualGraphBuilder::new();
        for i in 0..vertices {
            b.component(&format!("v{i:02}"), 0);
        }
        let mut n_edges = 0;
        for i in 1..vertices {
            let j = rng.gen_range(0..i);
            let (p, m) = if rng.gen_bool(0.5) { (i, j) } else { (j, i) };
            b.edge(
                &format!("e{n_edges:02}"),
                &format!("v{p:02}"),
                &format!("v{m:02}"),
            );
            n_edges += 1;
        }
        for _ in 0..extra {
            let p = rng.gen_range(0..vertices);
            let m = rng.gen_range(0..vertices);
            b.edge(
                &format!("e{n_edges:02}"),
                &format!("v{p:02}"),
                &format!("v{m:02}"),
            );
            n_edges += 1;
        }
        b.build().unwrap()
    }
}
