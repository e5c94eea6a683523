//! k-differentials `f(z) (dz)^k` on the projective line.
//!
//! The line is covered by the affine chart `z` and the chart `w = 1/z` at
//! infinity. A differential is stored in one chart; the other is always
//! derived. Residues at finite points use `u = z - p`, at infinity `u = w`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactnum::{LaurentSeries, Matrix, Poly, Rational, RationalFunction};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Chart {
    /// Affine coordinate `z`.
    Affine,
    /// Coordinate `w = 1/z` near `z = ∞`.
    Infinity,
}

impl Chart {
    fn flipped(self) -> Chart {
        match self {
            Chart::Affine => Chart::Infinity,
            Chart::Infinity => Chart::Affine,
        }
    }
}

/// A point of the projective line as seen from the stored chart.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Location {
    Finite(Rational),
    Infinity,
}

impl Location {
    pub fn finite(r: Rational) -> Location {
        Location::Finite(r)
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Finite(r) => write!(f, "{r}"),
            Location::Infinity => write!(f, "inf"),
        }
    }
}

impl fmt::Debug for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Location {
    type Err = crate::exactnum::ParseRationalError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(Location::Infinity),
            other => other.parse().map(Location::Finite),
        }
    }
}

impl Serialize for Location {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Location {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolePoint {
    pub location: Location,
    pub order: u32,
}

/// Principal part `Σ_j c_j (z - p)^(-j) (dz)^k`, coefficients listed from the
/// highest order down to `j = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrincipalPart {
    pub location: Location,
    coefficients: Vec<Rational>,
}

impl PrincipalPart {
    /// Leading zero coefficients are dropped, so the order is exact.
    pub fn new(location: Location, coefficients: Vec<Rational>) -> PrincipalPart {
        let lead = coefficients
            .iter()
            .position(|c| !c.is_zero())
            .unwrap_or(coefficients.len());
        PrincipalPart {
            location,
            coefficients: coefficients[lead..].to_vec(),
        }
    }

    /// A single term `a (z - p)^(-order)`.
    pub fn pure(at: Rational, order: u32, a: Rational) -> PrincipalPart {
        let mut cs = vec![Rational::zero(); order as usize];
        if order > 0 {
            cs[0] = a;
        }
        PrincipalPart::new(Location::Finite(at), cs)
    }

    pub fn order(&self) -> u32 {
        self.coefficients.len() as u32
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coefficients
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct KDifferential {
    k: u32,
    chart: Chart,
    f: RationalFunction,
}

impl KDifferential {
    /// `f(z) (dz)^k` in the affine chart.
    pub fn new(k: u32, f: RationalFunction) -> Result<KDifferential> {
        KDifferential::in_chart(k, Chart::Affine, f)
    }

    pub fn in_chart(k: u32, chart: Chart, f: RationalFunction) -> Result<KDifferential> {
        if k == 0 {
            return Err(Error::UnsupportedK(0));
        }
        Ok(KDifferential { k, chart, f })
    }

    pub fn zero(k: u32) -> KDifferential {
        KDifferential::new(k, RationalFunction::zero()).expect("k >= 1")
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn coefficient_function(&self) -> &RationalFunction {
        &self.f
    }

    pub fn is_zero(&self) -> bool {
        self.f.is_zero()
    }

    pub fn add(&self, other: &KDifferential) -> KDifferential {
        assert_eq!(self.k, other.k, "adding differentials of different k");
        let other = if other.chart == self.chart {
            other.clone()
        } else {
            other.to_infinity_chart()
        };
        KDifferential {
            k: self.k,
            chart: self.chart,
            f: &self.f + &other.f,
        }
    }

    pub fn scale(&self, c: &Rational) -> KDifferential {
        KDifferential {
            k: self.k,
            chart: self.chart,
            f: self.f.scale(c),
        }
    }

    /// The same differential written in the other chart:
    /// `g(w) = f(1/w) (-1)^k w^(-2k)`.
    pub fn to_infinity_chart(&self) -> KDifferential {
        let k = self.k as i64;
        KDifferential {
            k: self.k,
            chart: self.chart.flipped(),
            f: self
                .f
                .invert_variable()
                .mul_monomial(&Rational::sign_power(k), -2 * k),
        }
    }

    /// Expansion of the coefficient function in the local coordinate at `at`,
    /// exact below `u^truncation`.
    pub fn local_expansion(&self, at: &Location, truncation: i64) -> LaurentSeries {
        match at {
            Location::Finite(p) => LaurentSeries::expand(&self.f, p, truncation),
            Location::Infinity => {
                LaurentSeries::expand(&self.to_infinity_chart().f, &Rational::zero(), truncation)
            }
        }
    }

    /// Poles in both charts, finite ones sorted by coordinate, then infinity.
    pub fn poles(&self) -> Result<Vec<PolePoint>> {
        if self.f.is_zero() {
            return Ok(Vec::new());
        }
        let (roots, rest) = self.f.denominator().rational_roots()?;
        if let Some(d) = rest.degree().filter(|&d| d > 0) {
            return Err(Error::NonSplitDenominator { degree: d });
        }
        let mut poles: Vec<PolePoint> = roots
            .into_iter()
            .map(|(r, m)| PolePoint {
                location: Location::Finite(r),
                order: m as u32,
            })
            .collect();
        let g = self.to_infinity_chart().f;
        let ord = g.numerator().lowest_degree().unwrap() as i64
            - g.denominator().lowest_degree().unwrap() as i64;
        if ord < 0 {
            poles.push(PolePoint {
                location: Location::Infinity,
                order: (-ord) as u32,
            });
        }
        Ok(poles)
    }

    /// Renders as `(f) (dz)^k` in the given variable.
    pub fn render(&self, var: &str) -> String {
        let d = if self.k == 1 {
            format!("d{var}")
        } else {
            format!("(d{var})^{}", self.k)
        };
        format!("({}) {d}", self.f.render(var))
    }
}

impl fmt::Debug for KDifferential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let var = match self.chart {
            Chart::Affine => "z",
            Chart::Infinity => "w",
        };
        write!(f, "{}", self.render(var))
    }
}

/// Coefficient of `u^(-k) (du)^k` at `at`.
pub fn k_residue(eta: &KDifferential, at: &Location) -> Rational {
    let k = eta.k as i64;
    eta.local_expansion(at, -k + 1)
        .coeff(-k)
        .expect("expansion computed past u^(-k)")
}

/// Residues at every pole, including infinity.
pub fn all_residues(eta: &KDifferential) -> Result<BTreeMap<Location, Rational>> {
    Ok(eta
        .poles()?
        .into_iter()
        .map(|p| {
            let r = k_residue(eta, &p.location);
            (p.location, r)
        })
        .collect())
}

pub fn residue_sum(eta: &KDifferential) -> Result<Rational> {
    Ok(all_residues(eta)?.into_values().sum())
}

/// The bare partial-fraction sum with the prescribed principal parts.
pub fn from_principal_parts(k: u32, parts: &[PrincipalPart]) -> Result<KDifferential> {
    let mut seen = Vec::new();
    let mut f = RationalFunction::zero();
    for part in parts {
        let Location::Finite(p) = &part.location else {
            return Err(Error::InfiniteLocation);
        };
        if seen.contains(&p) {
            return Err(Error::DuplicateLocation(p.to_string()));
        }
        seen.push(p);
        let order = part.order();
        for (i, c) in part.coefficients.iter().enumerate() {
            let j = order - i as u32;
            if !c.is_zero() {
                f = &f + &RationalFunction::pole_term(c, p, j);
            }
        }
    }
    KDifferential::new(k, f)
}

/// Compares `(-1)^k Σ a_i` with the computed k-residue at infinity of
/// `Σ a_i / (z - p_i)^k (dz)^k`. Returns `(predicted, actual)`.
pub fn infinity_residue_formula_check(
    k: u32,
    parts: &[(Rational, Rational)],
) -> Result<(Rational, Rational)> {
    let predicted = Rational::sign_power(k as i64) * parts.iter().map(|(_, a)| a).sum::<Rational>();
    let pps: Vec<PrincipalPart> = parts
        .iter()
        .map(|(p, a)| PrincipalPart::pure(p.clone(), k, a.clone()))
        .collect();
    let eta = from_principal_parts(k, &pps)?;
    Ok((predicted, k_residue(&eta, &Location::Infinity)))
}

/// Basis of the k-differentials with poles of order at most `m` at each
/// listed finite point, at most `infinity_order` at infinity, and regular
/// elsewhere. Computed by solving the infinity conditions on a
/// partial-fraction ansatz.
pub fn polar_space(
    k: u32,
    finite: &[(Rational, u32)],
    infinity_order: u32,
) -> Result<Vec<KDifferential>> {
    let k64 = k as i64;
    let mut terms: Vec<RationalFunction> = Vec::new();
    for (p, m) in finite {
        for j in 1..=*m {
            terms.push(RationalFunction::pole_term(&Rational::one(), p, j));
        }
    }
    let max_poly_degree = infinity_order as i64 - 2 * k64;
    for d in 0..=max_poly_degree.max(-1) {
        terms.push(RationalFunction::from_poly(Poly::monomial(
            Rational::one(),
            d as usize,
        )));
    }
    if terms.is_empty() {
        return Ok(Vec::new());
    }
    // Any ansatz term has pole order at infinity at most this.
    let worst = (2 * k64 - 1).max(infinity_order as i64);
    let lowest = -worst;
    let allowed = -(infinity_order as i64);
    let expansions: Vec<LaurentSeries> = terms
        .iter()
        .map(|f| {
            KDifferential::new(k, f.clone())
                .unwrap()
                .local_expansion(&Location::Infinity, allowed)
        })
        .collect();
    let rows: Vec<Vec<Rational>> = (lowest..allowed)
        .map(|n| expansions.iter().map(|e| e.coeff(n).unwrap()).collect())
        .collect();
    let m = Matrix::from_rows(terms.len(), rows);
    m.kernel()
        .into_iter()
        .map(|v| {
            let f = terms
                .iter()
                .zip(&v)
                .filter(|(_, c)| !c.is_zero())
                .fold(RationalFunction::zero(), |acc, (t, c)| &acc + &t.scale(c));
            KDifferential::new(k, f)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{parse_rational_function, q};

    fn diff(k: u32, text: &str) -> KDifferential {
        KDifferential::new(k, parse_rational_function(text).unwrap()).unwrap()
    }

    #[test]
    fn k_residue_examples() {
        assert_eq!(
            k_residue(&diff(3, "1/z^3"), &Location::Finite(q(0, 1))),
            q(1, 1)
        );
        assert_eq!(
            k_residue(&diff(3, "1/z^6"), &Location::Finite(q(0, 1))),
            q(0, 1)
        );
        assert_eq!(
            k_residue(&diff(1, "1/z^2"), &Location::Finite(q(0, 1))),
            q(0, 1)
        );
        assert_eq!(k_residue(&diff(3, "1/z^3"), &Location::Infinity), q(-1, 1));
    }

    #[test]
    fn chart_change_examples() {
        let w = diff(3, "1/z^3").to_infinity_chart();
        assert_eq!(w.chart(), Chart::Infinity);
        assert_eq!(
            w.coefficient_function(),
            &parse_rational_function("-1/w^3").unwrap()
        );
        for k in 1..=6u32 {
            let eta = diff(k, &format!("1/z^{k}"));
            let expected = RationalFunction::monomial(Rational::sign_power(k as i64), -(k as i64));
            assert_eq!(eta.to_infinity_chart().coefficient_function(), &expected);
        }
        let dz = diff(1, "1");
        assert_eq!(
            dz.to_infinity_chart().coefficient_function(),
            &RationalFunction::monomial(q(-1, 1), -2)
        );
    }

    #[test]
    fn all_residues_examples() {
        let r = all_residues(&diff(3, "1/z^3")).unwrap();
        assert_eq!(
            r.into_iter().collect::<Vec<_>>(),
            vec![
                (Location::Finite(q(0, 1)), q(1, 1)),
                (Location::Infinity, q(-1, 1))
            ]
        );
        // dz/(z(z-1)): no pole at infinity for k = 1 here since deg den = 2
        let r = all_residues(&diff(1, "1/(z*(z-1))")).unwrap();
        assert_eq!(r[&Location::Finite(q(0, 1))], q(-1, 1));
        assert_eq!(r[&Location::Finite(q(1, 1))], q(1, 1));
        assert!(!r.contains_key(&Location::Infinity));

        let eta = diff(2, "1");
        let poles = eta.poles().unwrap();
        assert_eq!(
            poles,
            vec![PolePoint {
                location: Location::Infinity,
                order: 4
            }]
        );
        let r = all_residues(&eta).unwrap();
        assert_eq!(r[&Location::Infinity], q(0, 1));
    }

    #[test]
    fn residue_sum_examples() {
        assert_eq!(residue_sum(&diff(1, "1/z - 1/(z-1)")).unwrap(), q(0, 1));
        assert_eq!(residue_sum(&diff(3, "1/z^3")).unwrap(), q(0, 1));
        // even k: (1 + (-1)^2)(a + b)
        let (a, b) = (q(2, 3), q(5, 7));
        let eta = from_principal_parts(
            2,
            &[
                PrincipalPart::pure(q(0, 1), 2, a.clone()),
                PrincipalPart::pure(q(1, 1), 2, b.clone()),
            ],
        )
        .unwrap();
        assert_eq!(residue_sum(&eta).unwrap(), q(2, 1) * (a + b));
    }

    #[test]
    fn from_principal_parts_examples() {
        let eta = from_principal_parts(3, &[PrincipalPart::pure(q(0, 1), 3, q(1, 1))]).unwrap();
        assert_eq!(eta, diff(3, "1/z^3"));
        let eta = from_principal_parts(
            1,
            &[
                PrincipalPart::pure(q(0, 1), 1, q(2, 1)),
                PrincipalPart::pure(q(1, 1), 1, q(-5, 1)),
            ],
        )
        .unwrap();
        assert_eq!(eta, diff(1, "2/z - 5/(z-1)"));
        assert!(from_principal_parts(1, &[]).unwrap().is_zero());
        assert!(matches!(
            from_principal_parts(
                1,
                &[
                    PrincipalPart::pure(q(0, 1), 1, q(1, 1)),
                    PrincipalPart::pure(q(0, 1), 2, q(1, 1))
                ]
            ),
            Err(Error::DuplicateLocation(_))
        ));
        assert!(matches!(
            from_principal_parts(1, &[PrincipalPart::new(Location::Infinity, vec![q(1, 1)])]),
            Err(Error::InfiniteLocation)
        ));
    }

    #[test]
    fn infinity_formula_examples() {
        let (p, a) =
            infinity_residue_formula_check(1, &[(q(0, 1), q(2, 1)), (q(1, 1), q(-2, 1))]).unwrap();
        assert_eq!((p, a), (q(0, 1), q(0, 1)));
        let (p, a) = infinity_residue_formula_check(3, &[(q(0, 1), q(1, 1))]).unwrap();
        assert_eq!((p, a), (q(-1, 1), q(-1, 1)));
        let (p, a) =
            infinity_residue_formula_check(2, &[(q(0, 1), q(1, 1)), (q(1, 1), q(1, 1))]).unwrap();
        assert_eq!((p, a), (q(2, 1), q(2, 1)));
    }

    #[test]
    fn irrational_poles_are_reported() {
        assert!(matches!(
            all_residues(&diff(1, "1/(z^2 - 2)")),
            Err(Error::NonSplitDenominator { degree: 2 })
        ));
    }

    #[test]
    fn polar_space_dimensions() {
        // simple poles at d points, regular at infinity: dimension d - 1
        for d in 1..5 {
            let pts: Vec<_> = (0..d).map(|i| (q(i, 1), 1)).collect();
            assert_eq!(polar_space(1, &pts, 0).unwrap().len(), (d - 1) as usize);
        }
        // no poles at all: no holomorphic differentials on the line
        assert!(polar_space(1, &[], 0).unwrap().is_empty());
        // quadratic differentials with double poles at 4 points: 4*2 - 4 + 1 = 5
        let pts: Vec<_> = (0..4).map(|i| (q(i, 1), 2)).collect();
        assert_eq!(polar_space(2, &pts, 0).unwrap().len(), 5);
        // allowing a pole of order 3 at infinity adds polynomial dz
        assert_eq!(polar_space(1, &[], 3).unwrap().len(), 2);
    }
}
