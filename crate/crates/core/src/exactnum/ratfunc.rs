use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::{Poly, Rational};
use crate::error::{Error, Result};

/// A univariate rational function `numerator / denominator` in lowest terms
/// with monic denominator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: Poly,
    den: Poly,
}

impl RationalFunction {
    pub fn new(num: Poly, den: Poly) -> Result<RationalFunction> {
        if den.is_zero() {
            return Err(Error::ZeroDivision(
                "rational function with zero denominator".into(),
            ));
        }
        if num.is_zero() {
            return Ok(RationalFunction::zero());
        }
        let g = num.gcd(&den);
        let (num, _) = num.div_rem(&g)?;
        let (den, _) = den.div_rem(&g)?;
        let lc = den.leading().recip().unwrap();
        Ok(RationalFunction {
            num: num.scale(&lc),
            den: den.scale(&lc),
        })
    }

    pub fn zero() -> RationalFunction {
        RationalFunction {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn constant(c: Rational) -> RationalFunction {
        RationalFunction::from_poly(Poly::constant(c))
    }

    pub fn from_poly(p: Poly) -> RationalFunction {
        RationalFunction {
            num: p,
            den: Poly::one(),
        }
    }

    /// `c / (z - p)^j`
    pub fn pole_term(c: &Rational, p: &Rational, j: u32) -> RationalFunction {
        RationalFunction::new(Poly::constant(c.clone()), Poly::linear_root(p).pow(j)).unwrap()
    }

    /// `c * z^e` for any integer `e`.
    pub fn monomial(c: Rational, e: i64) -> RationalFunction {
        if e >= 0 {
            RationalFunction::from_poly(Poly::monomial(c, e as usize))
        } else {
            RationalFunction::new(
                Poly::constant(c),
                Poly::monomial(Rational::one(), (-e) as usize),
            )
            .unwrap()
        }
    }

    /// `c * z^e * self`, cancelling only powers of `z`.
    pub fn mul_monomial(&self, c: &Rational, e: i64) -> RationalFunction {
        if self.is_zero() || c.is_zero() {
            return RationalFunction::zero();
        }
        let drop = |p: &Poly, n: usize| Poly::new(p.coeffs()[n..].to_vec());
        let lift = |p: &Poly, n: usize| {
            let mut v = vec![Rational::zero(); n];
            v.extend_from_slice(p.coeffs());
            Poly::new(v)
        };
        let (num, den) = if e >= 0 {
            let cancel = (self.den.lowest_degree().unwrap()).min(e as usize);
            (
                lift(&self.num, e as usize - cancel),
                drop(&self.den, cancel),
            )
        } else {
            let e = (-e) as usize;
            let cancel = self.num.lowest_degree().unwrap().min(e);
            (drop(&self.num, cancel), lift(&self.den, e - cancel))
        };
        let lc = den.leading().recip().unwrap();
        RationalFunction {
            num: num.scale(&(c * &lc)),
            den: den.scale(&lc),
        }
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn scale(&self, c: &Rational) -> RationalFunction {
        if c.is_zero() {
            return RationalFunction::zero();
        }
        RationalFunction {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn checked_div(&self, rhs: &RationalFunction) -> Result<RationalFunction> {
        if rhs.is_zero() {
            return Err(Error::ZeroDivision(
                "division by the zero rational function".into(),
            ));
        }
        RationalFunction::new(&self.num * &rhs.den, &self.den * &rhs.num)
    }

    pub fn pow(&self, e: u32) -> RationalFunction {
        RationalFunction {
            num: self.num.pow(e),
            den: self.den.pow(e),
        }
    }

    /// Substitutes `z = 1/w`, returning a rational function of `w`.
    pub fn invert_variable(&self) -> RationalFunction {
        if self.is_zero() {
            return RationalFunction::zero();
        }
        let dn = self.num.degree().unwrap() as i64;
        let dd = self.den.degree().unwrap() as i64;
        // f(1/w) = w^(dd - dn) * rev(num) / rev(den)
        // Reversal keeps num and den coprime and makes both nonzero at 0.
        let den = self.den.reversed();
        let lc = den.leading().recip().unwrap();
        let base = RationalFunction {
            num: self.num.reversed().scale(&lc),
            den: den.scale(&lc),
        };
        base.mul_monomial(&Rational::one(), dd - dn)
    }

    /// Value at a point that is not a pole.
    pub fn eval(&self, z: &Rational) -> Result<Rational> {
        let d = self.den.eval(z);
        if d.is_zero() {
            return Err(Error::ZeroDivision(format!("evaluation at the pole {z}")));
        }
        Ok(self.num.eval(z) / d)
    }

    /// Renders as exact text in the given variable, readable back by the
    /// parser in this module's sibling.
    pub fn render(&self, var: &str) -> String {
        if self.den.degree() == Some(0) {
            return self.num.render(var);
        }
        let num = self.num.render(var);
        let den = render_factored(&self.den, var);
        let num = if self.num.coeffs().iter().filter(|c| !c.is_zero()).count() > 1 {
            format!("({num})")
        } else {
            num
        };
        format!("{num}/{den}")
    }
}

/// Denominator text, factored over rational roots where possible.
fn render_factored(den: &Poly, var: &str) -> String {
    let Ok((roots, rest)) = den.rational_roots() else {
        return format!("({})", den.render(var));
    };
    let mut parts = Vec::new();
    for (r, m) in roots {
        let base = if r.is_zero() {
            var.to_string()
        } else {
            format!("({})", Poly::linear_root(&r).render(var))
        };
        parts.push(if m == 1 { base } else { format!("{base}^{m}") });
    }
    if rest.degree().unwrap_or(0) > 0 {
        parts.push(format!("({})", rest.render(var)));
    }
    if parts.len() == 1 {
        parts.pop().unwrap()
    } else {
        format!("({})", parts.join("*"))
    }
}

impl Add for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        if self.den == rhs.den {
            return RationalFunction::new(&self.num + &rhs.num, self.den.clone()).unwrap();
        }
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        RationalFunction::new(num, &self.den * &rhs.den).unwrap()
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        self + &(-rhs)
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        RationalFunction::new(&self.num * &rhs.num, &self.den * &rhs.den).unwrap()
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render("z"))
    }
}
