//! Local analysis at plane-curve singularities given by branch
//! parametrizations: the local ring inside `⊕ k[[t_i]]`, conductor exponents,
//! δ-invariants and descent of differentials.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::exactnum::{ConstraintSystem, LaurentSeries, Matrix, Poly, Rational};

/// A branch `t ↦ (x(t), y(t))` with polynomial coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Branch {
    pub x: Poly,
    pub y: Poly,
}

impl Branch {
    pub fn new(x: Poly, y: Poly) -> Branch {
        Branch { x, y }
    }

    pub fn x_series(&self, truncation: usize) -> LaurentSeries {
        LaurentSeries::from_poly(&self.x, truncation as i64)
    }

    pub fn y_series(&self, truncation: usize) -> LaurentSeries {
        LaurentSeries::from_poly(&self.y, truncation as i64)
    }

    fn support_gcd(&self) -> usize {
        let mut g = 0usize;
        for p in [&self.x, &self.y] {
            for (i, c) in p.coeffs().iter().enumerate() {
                if !c.is_zero() {
                    g = g.gcd(&i);
                }
            }
        }
        g
    }

    fn reflected(&self) -> Branch {
        let flip = |p: &Poly| {
            Poly::new(
                p.coeffs()
                    .iter()
                    .enumerate()
                    .map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() })
                    .collect(),
            )
        };
        Branch::new(flip(&self.x), flip(&self.y))
    }
}

/// The branches of a singularity together with the shared truncation `N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchSystem {
    label: String,
    branches: Vec<Branch>,
    truncation: usize,
}

pub const CATALOG: [&str; 3] = ["node", "cusp", "tacnode"];

impl BranchSystem {
    pub fn new(label: &str, branches: Vec<Branch>, truncation: usize) -> Result<BranchSystem> {
        if branches.is_empty() {
            return Err(Error::InvalidBranch("no branches".into()));
        }
        for (i, b) in branches.iter().enumerate() {
            if b.x.is_zero() && b.y.is_zero() {
                return Err(Error::InvalidBranch(format!("branch {i} is constant")));
            }
            if !b.x.coeff(0).is_zero() || !b.y.coeff(0).is_zero() {
                return Err(Error::InvalidBranch(format!(
                    "branch {i} does not pass through the origin"
                )));
            }
            if b.support_gcd() != 1 {
                return Err(Error::NonPrimitiveBranch(i));
            }
        }
        for i in 0..branches.len() {
            for j in i + 1..branches.len() {
                let (a, b) = (&branches[i], &branches[j]);
                if a == b || a.reflected() == *b {
                    return Err(Error::DuplicateBranch(i, j));
                }
            }
        }
        if truncation == 0 {
            return Err(Error::TruncationTooSmall {
                truncation,
                reason: "truncation must be positive".into(),
            });
        }
        Ok(BranchSystem {
            label: label.to_string(),
            branches,
            truncation,
        })
    }

    /// `node`: `(t, 0), (0, s)`; `cusp`: `(t², t³)`; `tacnode`: `(t, t²), (s, -s²)`.
    pub fn catalog(name: &str, truncation: usize) -> Result<BranchSystem> {
        let p = |c: &[i64]| Poly::new(c.iter().map(|&v| Rational::integer(v)).collect());
        let branches = match name {
            "node" => vec![
                Branch::new(p(&[0, 1]), Poly::zero()),
                Branch::new(Poly::zero(), p(&[0, 1])),
            ],
            "cusp" => vec![Branch::new(p(&[0, 0, 1]), p(&[0, 0, 0, 1]))],
            "tacnode" => vec![
                Branch::new(p(&[0, 1]), p(&[0, 0, 1])),
                Branch::new(p(&[0, 1]), p(&[0, 0, -1])),
            ],
            other => {
                return Err(Error::InvalidBranch(format!(
                    "unknown catalog entry {other}"
                )))
            }
        };
        BranchSystem::new(name, branches, truncation)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn branch_count(&self) -> usize {
        self.branches.len()
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn with_truncation(&self, truncation: usize) -> BranchSystem {
        BranchSystem {
            truncation,
            ..self.clone()
        }
    }
}

/// Image of the local ring in `⊕ k[t_i]/(t_i^N)`, row-reduced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalRingModel {
    pub branch_count: usize,
    pub truncation: usize,
    pub basis: Matrix,
    pivots: Vec<usize>,
    pub generating_monomials: Vec<(u32, u32)>,
}

impl LocalRingModel {
    pub fn basis_vectors(&self) -> Vec<Vec<Rational>> {
        self.basis.rows_iter().map(<[Rational]>::to_vec).collect()
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    /// `δ` as the codimension inside `⊕ k[t_i]/(t_i^N)`.
    pub fn codimension(&self) -> usize {
        self.branch_count * self.truncation - self.dim()
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        let mut w = v.to_vec();
        for (i, &p) in self.pivots.iter().enumerate() {
            if w[p].is_zero() {
                continue;
            }
            let c = w[p].clone();
            for (wj, bj) in w.iter_mut().zip(self.basis.row(i)) {
                if !bj.is_zero() {
                    *wj -= &(&c * bj);
                }
            }
        }
        w.iter().all(Rational::is_zero)
    }

    /// The vector `t_i^n e_i`.
    pub fn unit_vector(&self, branch: usize, n: usize) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.branch_count * self.truncation];
        v[branch * self.truncation + n] = Rational::one();
        v
    }

    fn conductor_at(&self, branch: usize) -> usize {
        (0..self.truncation)
            .rev()
            .find(|&n| !self.contains(&self.unit_vector(branch, n)))
            .map_or(0, |n| n + 1)
    }
}

/// Monomials `x^a y^b` with `a + b < N`; every other monomial vanishes mod `t^N`
/// since both coordinates have positive valuation.
#[allow(clippy::needless_range_loop)]
pub fn local_ring_model(b: &BranchSystem) -> LocalRingModel {
    let n = b.truncation;
    let r = b.branch_count();
    let powers = |s: LaurentSeries| {
        let mut out = vec![LaurentSeries::one(n as i64)];
        for e in 1..n {
            let next = out[e - 1].mul(&s).truncate(n as i64);
            out.push(next);
        }
        out
    };
    let xp: Vec<Vec<LaurentSeries>> = b.branches.iter().map(|br| powers(br.x_series(n))).collect();
    let yp: Vec<Vec<LaurentSeries>> = b.branches.iter().map(|br| powers(br.y_series(n))).collect();
    let mut rows = Vec::new();
    let mut monomials = Vec::new();
    for a in 0..n {
        for bb in 0..n - a {
            let mut row = vec![Rational::zero(); r * n];
            for i in 0..r {
                let img = xp[i][a].mul(&yp[i][bb]).truncate(n as i64);
                for d in 0..n {
                    row[i * n + d] = img.coeff(d as i64).unwrap_or_else(|_| Rational::zero());
                }
            }
            rows.push(row);
            monomials.push((a as u32, bb as u32));
        }
    }
    let (red, pivots) = Matrix::from_rows(r * n, rows).rref();
    let basis = Matrix::from_rows(
        r * n,
        (0..pivots.len()).map(|i| red.row(i).to_vec()).collect(),
    );
    LocalRingModel {
        branch_count: r,
        truncation: n,
        basis,
        pivots,
        generating_monomials: monomials,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConductorData {
    pub exponents: Vec<u32>,
    pub delta: u32,
}

impl ConductorData {
    pub fn max_exponent(&self) -> u32 {
        self.exponents.iter().copied().max().unwrap_or(0)
    }
}

fn conductor_raw(model: &LocalRingModel) -> ConductorData {
    ConductorData {
        exponents: (0..model.branch_count)
            .map(|i| model.conductor_at(i) as u32)
            .collect(),
        delta: model.codimension() as u32,
    }
}

/// Conductor exponents and δ, checked for stability against `N + 4`.
pub fn conductor_exponents(b: &BranchSystem) -> Result<ConductorData> {
    let here = conductor_raw(&local_ring_model(b));
    let need = 2 * here.max_exponent() as usize + 2;
    if b.truncation < need {
        return Err(Error::TruncationTooSmall {
            truncation: b.truncation,
            reason: format!(
                "need at least {need} for conductor exponent {}",
                here.max_exponent()
            ),
        });
    }
    let wider = conductor_raw(&local_ring_model(&b.with_truncation(b.truncation + 4)));
    if wider != here {
        return Err(Error::TruncationTooSmall {
            truncation: b.truncation,
            reason: "conductor changes when the truncation grows".into(),
        });
    }
    Ok(here)
}

fn branch_letter(i: usize) -> String {
    let letters = "abcdefghijklmnopqrstuvwxyz";
    match letters.chars().nth(i) {
        Some(c) => c.to_string(),
        None => format!("br{i}_"),
    }
}

/// Unknown labels: branch `i`, order `j` gives `a2`, `a1`, `b1`, ...
pub fn polar_labels(max_orders: &[u32]) -> Vec<String> {
    let mut out = Vec::new();
    for (i, &m) in max_orders.iter().enumerate() {
        for j in (1..=m).rev() {
            out.push(format!("{}{j}", branch_letter(i)));
        }
    }
    out
}

/// Linear conditions `Σ_i Res_{t_i}(f·η) = 0` for all `f` in the local ring,
/// on the polar coefficients of `η = Σ_j a_ij t_i^{-j} dt_i`, `j ≤ max_orders[i]`.
pub fn descent_constraints(b: &BranchSystem, max_orders: &[u32]) -> Result<ConstraintSystem> {
    if max_orders.len() != b.branch_count() {
        return Err(Error::Input(format!(
            "{} pole bounds for {} branches",
            max_orders.len(),
            b.branch_count()
        )));
    }
    let n = b.truncation;
    let top = max_orders.iter().copied().max().unwrap_or(0) as usize;
    if n < top {
        return Err(Error::TruncationTooSmall {
            truncation: n,
            reason: format!("pole order {top} exceeds the truncation"),
        });
    }
    let model = local_ring_model(b);
    let cols = polar_labels(max_orders);
    let mut rows = Vec::new();
    for f in model.basis.rows_iter() {
        let mut row = Vec::with_capacity(cols.len());
        for (i, &m) in max_orders.iter().enumerate() {
            for j in (1..=m as usize).rev() {
                row.push(f[i * n + j - 1].clone());
            }
        }
        if row.iter().any(|c| !c.is_zero()) {
            rows.push(row);
        }
    }
    let labels = (0..rows.len()).map(|i| format!("f{i}")).collect();
    Ok(ConstraintSystem::new(Matrix::from_rows(cols.len(), rows), labels, cols).reduced())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountVerdict {
    pub rank: usize,
    pub delta: u32,
}

impl CountVerdict {
    pub fn holds(&self) -> bool {
        self.rank == self.delta as usize
    }
}

/// Rank of the descent constraints at the conductor pole bounds against `δ`.
pub fn constraint_count_equals_delta(b: &BranchSystem) -> Result<CountVerdict> {
    let cd = conductor_exponents(b)?;
    let cs = descent_constraints(b, &cd.exponents)?;
    Ok(CountVerdict {
        rank: cs.rank(),
        delta: cd.delta,
    })
}

/// Polar tails `[a_{i,m}, ..., a_{i,1}]` (coefficients of `t_i^{-j} (dt_i)^k`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrincipalPartSystem {
    pub k: u32,
    pub tails: Vec<Vec<Rational>>,
}

impl PrincipalPartSystem {
    pub fn new(k: u32, tails: Vec<Vec<Rational>>) -> PrincipalPartSystem {
        PrincipalPartSystem { k, tails }
    }

    /// Coefficient of `t_i^{-j}`.
    pub fn coeff(&self, branch: usize, j: u32) -> Rational {
        let tail = &self.tails[branch];
        let m = tail.len();
        if j == 0 || j as usize > m {
            Rational::zero()
        } else {
            tail[m - j as usize].clone()
        }
    }

    pub fn order(&self, branch: usize) -> u32 {
        let tail = &self.tails[branch];
        tail.iter()
            .position(|c| !c.is_zero())
            .map_or(0, |p| (tail.len() - p) as u32)
    }

    pub fn orders(&self) -> Vec<u32> {
        (0..self.tails.len()).map(|i| self.order(i)).collect()
    }

    pub fn residue(&self, branch: usize) -> Rational {
        self.coeff(branch, 1)
    }

    /// Coordinates matching [`polar_labels`] for the given bounds.
    pub fn coordinates(&self, max_orders: &[u32]) -> Vec<Rational> {
        let mut out = Vec::new();
        for (i, &m) in max_orders.iter().enumerate() {
            for j in (1..=m).rev() {
                out.push(self.coeff(i, j));
            }
        }
        out
    }

    pub fn from_differential(eta: &LocalDifferential) -> Result<PrincipalPartSystem> {
        let mut tails = Vec::new();
        for s in &eta.branches {
            let m = (-s.valuation()).max(0) as u32;
            tails.push(s.principal_part(m)?);
        }
        Ok(PrincipalPartSystem::new(eta.k, tails))
    }

    /// The principal parts as series with zero regular part.
    pub fn to_differential(&self, truncation: usize) -> LocalDifferential {
        let branches = self
            .tails
            .iter()
            .map(|tail| {
                let m = tail.len() as i64;
                LaurentSeries::new(-m, tail.clone(), truncation as i64)
            })
            .collect();
        LocalDifferential {
            k: self.k,
            branches,
        }
    }
}

/// Descent of a k = 1 principal-part system via the residue pairing.
pub fn descends(b: &BranchSystem, eta: &PrincipalPartSystem) -> Result<bool> {
    let orders = eta.orders();
    let cs = descent_constraints(b, &orders)?;
    Ok(cs.is_satisfied_by(&eta.coordinates(&orders)))
}

/// True iff `t_i^{c_i} η_i` is regular on every branch.
pub fn conductor_annihilation_check(cd: &ConductorData, eta: &PrincipalPartSystem) -> bool {
    (0..eta.tails.len()).all(|i| eta.order(i) <= cd.exponents[i])
}

/// `Σ_i c_i Res_{t_i}(η)`.
pub fn weighted_residue_check(cd: &ConductorData, eta: &PrincipalPartSystem) -> Rational {
    (0..eta.tails.len())
        .map(|i| Rational::integer(cd.exponents[i] as i64) * eta.residue(i))
        .sum()
}

/// Per-branch `f_i(t_i) (dt_i)^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalDifferential {
    pub k: u32,
    pub branches: Vec<LaurentSeries>,
}

impl fmt::Display for LocalDifferential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dt = if self.k == 1 {
            "dt".to_string()
        } else {
            format!("(dt)^{}", self.k)
        };
        let parts: Vec<String> = self
            .branches
            .iter()
            .map(|s| format!("({}) {dt}", s.render("t")))
            .collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// Top-order element of the descent space at the conductor pole bounds,
/// normalized so that its first nonzero top coefficient is 1.
pub fn dualizing_generator(b: &BranchSystem) -> Result<LocalDifferential> {
    let cd = conductor_exponents(b)?;
    let orders = &cd.exponents;
    let cs = descent_constraints(b, orders)?;
    let sols = cs.solution_basis();
    let ncols = cs.unknowns();

    // Column offsets of each branch's top coefficient.
    let mut top_cols = Vec::new();
    let mut offset = 0;
    for &m in orders {
        if m > 0 {
            top_cols.push(offset);
        }
        offset += m as usize;
    }
    let rest: Vec<usize> = (0..ncols).filter(|c| !top_cols.contains(c)).collect();
    let order: Vec<usize> = top_cols.iter().chain(&rest).copied().collect();

    let s = Matrix::from_rows(ncols, sols).select_columns(&order);
    let top_dim = s
        .select_columns(&(0..top_cols.len()).collect::<Vec<_>>())
        .rank();
    if top_dim != 1 {
        return Err(Error::NotGorensteinDetected(top_dim));
    }
    let (r, pivots) = s.rref();
    let row = pivots
        .iter()
        .position(|&p| p < top_cols.len())
        .expect("top projection is nonzero");
    let mut coords = vec![Rational::zero(); ncols];
    for (pos, &col) in order.iter().enumerate() {
        coords[col] = r[(row, pos)].clone();
    }

    let mut tails = Vec::new();
    let mut offset = 0;
    for &m in orders {
        tails.push(coords[offset..offset + m as usize].to_vec());
        offset += m as usize;
    }
    Ok(PrincipalPartSystem::new(1, tails).to_differential(b.truncation))
}

/// Whether `η = h τ^k` with `h` in the local ring, `τ` the dualizing generator.
pub fn descends_k(b: &BranchSystem, eta: &LocalDifferential) -> Result<bool> {
    if eta.k == 0 {
        return Err(Error::UnsupportedK(0));
    }
    if eta.branches.len() != b.branch_count() {
        return Err(Error::Input(format!(
            "{} branch differentials for {} branches",
            eta.branches.len(),
            b.branch_count()
        )));
    }
    let cd = conductor_exponents(b)?;
    let tau = dualizing_generator(b)?;
    let model = local_ring_model(b);
    let n = b.truncation;
    let mut v = vec![Rational::zero(); b.branch_count() * n];
    for (i, (e, t)) in eta.branches.iter().zip(&tau.branches).enumerate() {
        let h = e.div(&t.pow(eta.k))?;
        if h.is_zero() {
            continue;
        }
        let c = cd.exponents[i] as i64;
        if h.valuation() < 0 {
            return Ok(false);
        }
        if h.truncation() < c {
            return Err(Error::TruncationTooSmall {
                truncation: n,
                reason: format!(
                    "quotient on branch {i} known only below t^{}",
                    h.truncation()
                ),
            });
        }
        // t^n e_i lies in the ring for n >= c_i, so only lower terms matter.
        for d in 0..c {
            v[i * n + d as usize] = h.coeff(d)?;
        }
    }
    Ok(model.contains(&v))
}

/// Bivariate polynomial `Σ c_ab x^a y^b`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BiPoly {
    terms: BTreeMap<(u32, u32), Rational>,
}

impl BiPoly {
    pub fn new(terms: &[((u32, u32), Rational)]) -> BiPoly {
        let mut p = BiPoly::default();
        for (e, c) in terms {
            p.add_term(*e, c.clone());
        }
        p
    }

    pub fn from_ints(terms: &[(i64, u32, u32)]) -> BiPoly {
        let mut p = BiPoly::default();
        for &(c, a, b) in terms {
            p.add_term((a, b), Rational::integer(c));
        }
        p
    }

    fn add_term(&mut self, e: (u32, u32), c: Rational) {
        let slot = self.terms.entry(e).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn partial_x(&self) -> BiPoly {
        let mut p = BiPoly::default();
        for (&(a, b), c) in &self.terms {
            if a > 0 {
                p.add_term((a - 1, b), c * Rational::integer(a as i64));
            }
        }
        p
    }

    pub fn partial_y(&self) -> BiPoly {
        let mut p = BiPoly::default();
        for (&(a, b), c) in &self.terms {
            if b > 0 {
                p.add_term((a, b - 1), c * Rational::integer(b as i64));
            }
        }
        p
    }

    /// `p(x(t), y(t))` mod `t^truncation`.
    pub fn substitute(
        &self,
        x: &LaurentSeries,
        y: &LaurentSeries,
        truncation: i64,
    ) -> LaurentSeries {
        let mut acc = LaurentSeries::zero(truncation);
        for (&(a, b), c) in &self.terms {
            let term = x.pow(a).mul(&y.pow(b)).scale(c).truncate(truncation);
            acc = acc.add(&term);
        }
        acc.truncate(truncation)
    }
}

/// Pullback of `dx / g(x, y)` along one branch.
pub fn pullback_dx_over(g: &BiPoly, b: &BranchSystem, branch: usize) -> Result<LaurentSeries> {
    let br = b
        .branches
        .get(branch)
        .ok_or_else(|| Error::Input(format!("no branch {branch}")))?;
    // One extra order to absorb the valuation of the divisor.
    let n = b.truncation as i64;
    let xs = br.x_series(b.truncation + 1);
    let ys = br.y_series(b.truncation + 1);
    let dx = LaurentSeries::from_poly(&br.x.derivative(), n + 1);
    let den = g.substitute(&xs, &ys, n + 1);
    if den.is_zero() {
        return Err(Error::ZeroDivision(format!(
            "denominator vanishes along branch {branch} up to t^{}",
            n + 1
        )));
    }
    dx.div(&den)
}

/// `ν^*(dx / (∂f/∂y))` on one branch.
pub fn pullback_plane_differential(
    f: &BiPoly,
    b: &BranchSystem,
    branch: usize,
) -> Result<LaurentSeries> {
    pullback_dx_over(&f.partial_y(), b, branch)
}
