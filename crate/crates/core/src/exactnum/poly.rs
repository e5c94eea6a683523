//! Dense univariate polynomials over the rationals.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Rational;
use crate::error::{Error, Result};

/// Coefficients are stored lowest degree first with no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Poly {
        while coeffs.last().is_some_and(Rational::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Poly {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Poly {
        Poly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Poly {
        Poly::new(vec![c])
    }

    /// The identity polynomial `z`.
    pub fn x() -> Poly {
        Poly::monomial(Rational::one(), 1)
    }

    pub fn monomial(c: Rational, degree: usize) -> Poly {
        let mut coeffs = vec![Rational::zero(); degree + 1];
        coeffs[degree] = c;
        Poly::new(coeffs)
    }

    /// `z - root`
    pub fn linear_root(root: &Rational) -> Poly {
        Poly::new(vec![-root, Rational::one()])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        Poly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn monic(&self) -> Poly {
        match self.coeffs.last() {
            None => Poly::zero(),
            Some(lc) => self.scale(&lc.recip().unwrap()),
        }
    }

    pub fn eval(&self, z: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * z + c)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rational::integer(i as i64))
                .collect(),
        )
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut out = Poly::one();
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Taylor shift: returns `p(u + c)` as a polynomial in `u`.
    pub fn shift(&self, c: &Rational) -> Poly {
        // Horner in the shifted variable.
        let lin = Poly::new(vec![c.clone(), Rational::one()]);
        self.coeffs.iter().rev().fold(Poly::zero(), |acc, a| {
            &(&acc * &lin) + &Poly::constant(a.clone())
        })
    }

    /// Coefficient reversal `z^deg p(1/z)`.
    pub fn reversed(&self) -> Poly {
        Poly::new(self.coeffs.iter().rev().cloned().collect())
    }

    /// Lowest index with a nonzero coefficient.
    pub fn lowest_degree(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Euclidean division, `self = q * d + r` with `deg r < deg d`.
    pub fn div_rem(&self, d: &Poly) -> Result<(Poly, Poly)> {
        let dd = d
            .degree()
            .ok_or_else(|| Error::ZeroDivision("polynomial division by zero".into()))?;
        let lc_inv = d.leading().recip().unwrap();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Poly::zero(), self.clone()));
        }
        let mut quot = vec![Rational::zero(); rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = &rem[i + dd] * &lc_inv;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                let delta = &c * dc;
                rem[i + j] -= &delta;
            }
            quot[i] = c;
        }
        rem.truncate(dd);
        Ok((Poly::new(quot), Poly::new(rem)))
    }

    /// Monic greatest common divisor; zero only when both inputs are zero.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Distinct rational roots together with their multiplicities, plus the
    /// cofactor left over after removing all rational linear factors.
    pub fn rational_roots(&self) -> Result<(Vec<(Rational, usize)>, Poly)> {
        if self.is_zero() {
            return Err(Error::ZeroDivision("roots of the zero polynomial".into()));
        }
        let mut rest = self.monic();
        let mut roots = Vec::new();

        let zero_mult = rest.lowest_degree().unwrap_or(0);
        if zero_mult > 0 {
            rest = Poly::new(rest.coeffs[zero_mult..].to_vec());
            roots.push((Rational::zero(), zero_mult));
        }
        if rest.degree().unwrap_or(0) == 0 {
            return Ok((roots, rest));
        }

        // Candidates come from the square-free part, which has the same roots
        // and smaller coefficients.
        let sqf = rest.div_rem(&rest.gcd(&rest.derivative()))?.0;
        let ints = integer_coefficients(&sqf);
        let a0 = ints[0].abs();
        let an = ints.last().unwrap().abs();
        let f_one: BigInt = ints.iter().sum();
        let f_minus_one: BigInt = ints
            .iter()
            .enumerate()
            .map(|(i, c)| if i % 2 == 0 { c.clone() } else { -c })
            .sum();
        let num_divs = divisors(&a0)?;
        let den_divs = divisors(&an)?;
        let mut found = Vec::new();
        for p in &num_divs {
            for qd in &den_divs {
                if !p.gcd(qd).is_one() {
                    continue;
                }
                for p in [p.clone(), -p] {
                    // q*r - p divides f(1) and q*r + p divides f(-1) at r = 1, -1
                    let d1 = qd - &p;
                    let d2 = qd + &p;
                    if (!d1.is_zero() && !(&f_one % &d1).is_zero())
                        || (!d2.is_zero() && !(&f_minus_one % &d2).is_zero())
                    {
                        continue;
                    }
                    if integer_eval_is_zero(&ints, &p, qd) {
                        found.push(Rational::from_bigints(p, qd.clone()));
                    }
                }
            }
        }
        for r in found {
            let mut mult = 0;
            let lin = Poly::linear_root(&r);
            while rest.degree().unwrap_or(0) > 0 {
                let (quo, rem) = rest.div_rem(&lin)?;
                if !rem.is_zero() {
                    break;
                }
                rest = quo;
                mult += 1;
            }
            roots.push((r, mult));
        }
        roots.sort_by(|a, b| a.0.cmp(&b.0));
        Ok((roots, rest))
    }
}

/// Whether `q^n f(p/q) = Σ a_i p^i q^(n-i)` vanishes.
fn integer_eval_is_zero(ints: &[BigInt], p: &BigInt, q: &BigInt) -> bool {
    let mut acc = ints.last().unwrap().clone();
    let mut qpow = BigInt::one();
    for a in ints.iter().rev().skip(1) {
        qpow *= q;
        acc = acc * p + a * &qpow;
    }
    acc.is_zero()
}

/// Primitive integer coefficient vector proportional to `p`.
fn integer_coefficients(p: &Poly) -> Vec<BigInt> {
    let lcm = p
        .coeffs
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = p
        .coeffs
        .iter()
        .map(|c| c.numer() * (&lcm / c.denom()))
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    ints.into_iter().map(|c| c / &g).collect()
}

const FACTOR_LIMIT: u64 = 2_000_000;

/// Positive divisors of `n > 0` by trial division.
fn divisors(n: &BigInt) -> Result<Vec<BigInt>> {
    let mut primes: Vec<(BigInt, u32)> = Vec::new();
    let mut m = n.clone();
    let mut f: u64 = 2;
    while BigInt::from(f) * BigInt::from(f) <= m {
        if f > FACTOR_LIMIT {
            return Err(Error::RootSearchLimit);
        }
        let fb = BigInt::from(f);
        let mut e = 0;
        while (&m % &fb).is_zero() {
            m /= &fb;
            e += 1;
        }
        if e > 0 {
            primes.push((fb, e));
        }
        f += if f == 2 { 1 } else { 2 };
    }
    if m > BigInt::one() {
        primes.push((m, 1));
    }
    let mut divs = vec![BigInt::one()];
    for (p, e) in primes {
        let mut next = Vec::with_capacity(divs.len() * (e as usize + 1));
        for d in &divs {
            let mut pk = BigInt::one();
            for _ in 0..=e {
                next.push(d * &pk);
                pk *= &p;
            }
        }
        divs = next;
    }
    divs.sort();
    Ok(divs)
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Poly {
    /// Renders with the given variable name, highest degree first.
    pub fn render(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            if mono.is_empty() {
                out.push_str(&mag.to_string());
            } else if mag.is_one() {
                out.push_str(&mono);
            } else if mag.is_integer() {
                out.push_str(&format!("{mag}*{mono}"));
            } else {
                out.push_str(&format!("({mag})*{mono}"));
            }
        }
        out
    }

    pub fn as_small_degree(&self) -> Option<i64> {
        self.degree().and_then(|d| d.to_i64())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render("z"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::q;

    fn p(cs: &[i64]) -> Poly {
        Poly::new(cs.iter().map(|&c| Rational::integer(c)).collect())
    }

    #[test]
    fn div_rem_and_gcd() {
        // (z^2 - 1) / (z - 1) = z + 1
        let (quo, rem) = p(&[-1, 0, 1]).div_rem(&p(&[-1, 1])).unwrap();
        assert_eq!(quo, p(&[1, 1]));
        assert!(rem.is_zero());
        let g = p(&[-1, 0, 1]).gcd(&p(&[2, 2]));
        assert_eq!(g, p(&[1, 1]));
    }

    #[test]
    fn shift_matches_evaluation() {
        let f = p(&[3, -2, 0, 5]);
        let c = q(2, 3);
        let s = f.shift(&c);
        for u in [q(0, 1), q(1, 2), q(-7, 5)] {
            assert_eq!(s.eval(&u), f.eval(&(&u + &c)));
        }
    }

    #[test]
    fn roots_with_multiplicity() {
        // z^2 (z - 1/2)^3 (z + 3) (z^2 + 1)
        let f = &(&(&Poly::monomial(Rational::one(), 2) * &Poly::linear_root(&q(1, 2)).pow(3))
            * &Poly::linear_root(&q(-3, 1)))
            * &p(&[1, 0, 1]);
        let (roots, rest) = f.rational_roots().unwrap();
        assert_eq!(roots, vec![(q(-3, 1), 1), (q(0, 1), 2), (q(1, 2), 3)]);
        assert_eq!(rest, p(&[1, 0, 1]));
    }

    #[test]
    fn render() {
        assert_eq!(p(&[1, -2, 0, 3]).render("z"), "3*z^3 - 2*z + 1");
        assert_eq!(
            Poly::new(vec![q(-1, 2), Rational::one()]).render("t"),
            "t - 1/2"
        );
    }
}
