//! Truncated Laurent series with exact coefficients.
//!
//! A series knows every coefficient of `t^n` for `n < truncation` and nothing
//! beyond. Operations propagate the truncation order pessimistically so that
//! a reported coefficient is always exact.

use std::fmt;

use super::{Poly, Rational, RationalFunction};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LaurentSeries {
    valuation: i64,
    /// Coefficient of `t^(valuation + j)` at index `j`; length is
    /// `truncation - valuation`.
    coeffs: Vec<Rational>,
    truncation: i64,
}

impl LaurentSeries {
    /// Builds a series from coefficients starting at `t^start`. Coefficients
    /// at or beyond `truncation` are dropped; missing ones below it are zero.
    pub fn new(start: i64, coeffs: Vec<Rational>, truncation: i64) -> LaurentSeries {
        let mut s = LaurentSeries {
            valuation: start,
            coeffs,
            truncation,
        };
        s.normalize();
        s
    }

    /// The series that is zero below `t^truncation`.
    pub fn zero(truncation: i64) -> LaurentSeries {
        LaurentSeries {
            valuation: truncation,
            coeffs: Vec::new(),
            truncation,
        }
    }

    pub fn one(truncation: i64) -> LaurentSeries {
        LaurentSeries::monomial(Rational::one(), 0, truncation)
    }

    /// `c * t^n`
    pub fn monomial(c: Rational, n: i64, truncation: i64) -> LaurentSeries {
        LaurentSeries::new(n, vec![c], truncation)
    }

    pub fn from_poly(p: &Poly, truncation: i64) -> LaurentSeries {
        LaurentSeries::new(0, p.coeffs().to_vec(), truncation)
    }

    fn normalize(&mut self) {
        if self.valuation >= self.truncation {
            *self = LaurentSeries::zero(self.truncation);
            return;
        }
        let len = (self.truncation - self.valuation) as usize;
        self.coeffs.resize(len, Rational::zero());
        let lead = self.coeffs.iter().position(|c| !c.is_zero());
        match lead {
            None => *self = LaurentSeries::zero(self.truncation),
            Some(0) => {}
            Some(k) => {
                self.coeffs.drain(..k);
                self.valuation += k as i64;
            }
        }
    }

    /// Index of the lowest nonzero coefficient; equals the truncation order
    /// for a series that is zero up to truncation.
    pub fn valuation(&self) -> i64 {
        self.valuation
    }

    pub fn truncation(&self) -> i64 {
        self.truncation
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Stored coefficients, starting at `t^valuation`.
    pub fn coefficients(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn leading_coefficient(&self) -> Option<&Rational> {
        self.coeffs.first()
    }

    /// Coefficient of `t^n`; fails for `n` at or beyond the truncation order.
    pub fn coeff(&self, n: i64) -> Result<Rational> {
        if n >= self.truncation {
            return Err(Error::QueryBeyondTruncation {
                requested: n,
                truncation: self.truncation,
            });
        }
        if n < self.valuation {
            return Ok(Rational::zero());
        }
        Ok(self.coeffs[(n - self.valuation) as usize].clone())
    }

    fn coeff_unchecked(&self, n: i64) -> Rational {
        if n < self.valuation || n >= self.truncation {
            Rational::zero()
        } else {
            self.coeffs[(n - self.valuation) as usize].clone()
        }
    }

    /// Lowers the truncation order (never raises it).
    pub fn truncate(&self, truncation: i64) -> LaurentSeries {
        let t = truncation.min(self.truncation);
        LaurentSeries::new(self.valuation, self.coeffs.clone(), t)
    }

    pub fn add(&self, other: &LaurentSeries) -> LaurentSeries {
        let trunc = self.truncation.min(other.truncation);
        let start = self.valuation.min(other.valuation);
        let coeffs = (start..trunc)
            .map(|n| self.coeff_unchecked(n) + other.coeff_unchecked(n))
            .collect();
        LaurentSeries::new(start, coeffs, trunc)
    }

    pub fn neg(&self) -> LaurentSeries {
        LaurentSeries {
            valuation: self.valuation,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            truncation: self.truncation,
        }
    }

    pub fn sub(&self, other: &LaurentSeries) -> LaurentSeries {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rational) -> LaurentSeries {
        LaurentSeries::new(
            self.valuation,
            self.coeffs.iter().map(|a| a * c).collect(),
            self.truncation,
        )
    }

    /// Multiplication by `t^n`.
    pub fn shift(&self, n: i64) -> LaurentSeries {
        LaurentSeries {
            valuation: self.valuation + n,
            coeffs: self.coeffs.clone(),
            truncation: self.truncation + n,
        }
    }

    /// Cauchy product. The result is exact below
    /// `min(val(a) + trunc(b), val(b) + trunc(a))`.
    pub fn mul(&self, other: &LaurentSeries) -> LaurentSeries {
        let trunc = (self.valuation + other.truncation).min(other.valuation + self.truncation);
        let start = self.valuation + other.valuation;
        if start >= trunc {
            return LaurentSeries::zero(trunc);
        }
        let len = (trunc - start) as usize;
        let mut out = vec![Rational::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() || i >= len {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(len - i) {
                out[i + j] += a * b;
            }
        }
        LaurentSeries::new(start, out, trunc)
    }

    /// `self^e` for `e >= 0`.
    pub fn pow(&self, e: u32) -> LaurentSeries {
        if e == 0 {
            // exact 1, known to the relative precision of self
            return LaurentSeries::one((self.truncation - self.valuation).max(1));
        }
        let mut out = self.clone();
        for _ in 1..e {
            out = out.mul(self);
        }
        out
    }

    /// Multiplicative inverse up to the computable truncation.
    pub fn invert(&self) -> Result<LaurentSeries> {
        let Some(c0) = self.coeffs.first() else {
            return Err(Error::ZeroDivision(
                "inverse of a series that is zero up to truncation".into(),
            ));
        };
        let c0_inv = c0.recip().unwrap();
        let prec = self.coeffs.len();
        let mut b = vec![Rational::zero(); prec];
        b[0] = c0_inv.clone();
        for n in 1..prec {
            let mut acc = Rational::zero();
            for k in 1..=n {
                acc += &self.coeffs[k] * &b[n - k];
            }
            b[n] = -(acc * &c0_inv);
        }
        let v = -self.valuation;
        Ok(LaurentSeries::new(v, b, v + prec as i64))
    }

    pub fn div(&self, other: &LaurentSeries) -> Result<LaurentSeries> {
        Ok(self.mul(&other.invert()?))
    }

    /// Substitution `t -> t^e`.
    pub fn compose_power(&self, e: u32) -> LaurentSeries {
        assert!(e >= 1, "exponent must be positive");
        let e = e as i64;
        if self.is_zero() {
            return LaurentSeries::zero(self.truncation * e);
        }
        let len = ((self.truncation - self.valuation) * e) as usize;
        let mut out = vec![Rational::zero(); len];
        for (j, c) in self.coeffs.iter().enumerate() {
            out[j * e as usize] = c.clone();
        }
        LaurentSeries::new(self.valuation * e, out, self.truncation * e)
    }

    /// Formal derivative `d/dt`.
    pub fn derivative(&self) -> LaurentSeries {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| c * Rational::integer(self.valuation + j as i64))
            .collect();
        LaurentSeries::new(self.valuation - 1, coeffs, self.truncation - 1)
    }

    /// Laurent expansion of `f(z)` in `u = z - center`, exact below `u^truncation`.
    pub fn expand(f: &RationalFunction, center: &Rational, truncation: i64) -> LaurentSeries {
        if f.is_zero() {
            return LaurentSeries::zero(truncation);
        }
        let num = f.numerator().shift(center);
        let den = f.denominator().shift(center);
        let m = den.lowest_degree().unwrap() as i64;
        let den_unit = Poly::new(den.coeffs()[m as usize..].to_vec());
        // f = u^(-m) * num / den_unit with den_unit(0) != 0.
        let prec = truncation + m;
        if prec <= 0 {
            return LaurentSeries::zero(truncation);
        }
        let n = LaurentSeries::from_poly(&num, prec);
        let d = LaurentSeries::from_poly(&den_unit, prec);
        let q = n.mul(&d.invert().expect("unit denominator"));
        q.shift(-m)
    }

    /// Evaluates the known part at a rational point (a polynomial in t, 1/t).
    pub fn eval_truncated(&self, t: &Rational) -> Result<Rational> {
        let mut acc = Rational::zero();
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let n = self.valuation + j as i64;
            if n < 0 && t.is_zero() {
                return Err(Error::ZeroDivision("evaluation of a pole at 0".into()));
            }
            acc += c * t.pow(n as i32);
        }
        Ok(acc)
    }

    /// Equality of all coefficients both series know.
    pub fn agrees_with(&self, other: &LaurentSeries) -> bool {
        let trunc = self.truncation.min(other.truncation);
        let start = self.valuation.min(other.valuation);
        (start..trunc).all(|n| self.coeff_unchecked(n) == other.coeff_unchecked(n))
    }

    /// Principal part coefficients `[c_{-m}, ..., c_{-1}]` for `m = order`.
    pub fn principal_part(&self, order: u32) -> Result<Vec<Rational>> {
        (1..=order as i64).rev().map(|j| self.coeff(-j)).collect()
    }

    pub fn render(&self, var: &str) -> String {
        let mut body = String::new();
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let n = self.valuation + j as i64;
            let mono = match n {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{n}"),
            };
            let mag = c.abs();
            let term = if mono.is_empty() {
                mag.to_string()
            } else if mag.is_one() {
                mono
            } else {
                format!("{mag}*{mono}")
            };
            match (body.is_empty(), c.is_negative()) {
                (true, false) => body.push_str(&term),
                (true, true) => body.push_str(&format!("-{term}")),
                (false, false) => body.push_str(&format!(" + {term}")),
                (false, true) => body.push_str(&format!(" - {term}")),
            }
        }
        if body.is_empty() {
            body.push('0');
        }
        format!("{body} + O({var}^{})", self.truncation)
    }
}

impl fmt::Debug for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render("t"))
    }
}
