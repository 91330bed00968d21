//! Coefficients: Laurent polynomials in named formal parameters over ℚ.
//!
//! Parameters are things like the trace-form scale `c`, the pencil
//! parameter `z` or user constants. Negative exponents are allowed so that
//! dividing by a parameter monomial (the dual basis of a scaled trace form
//! carries `1/c`) stays inside the representation. Division by anything that
//! is not a monomial is refused.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

/// Interned-by-value name of a parameter, generator or function symbol.
pub type Symbol = Arc<str>;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Product of parameter powers, sorted by name, no zero exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParamMonomial(SmallVec<[(Symbol, i32); 2]>);

impl ParamMonomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn var(name: Symbol) -> Self {
        ParamMonomial(smallvec::smallvec![(name, 1)])
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> impl Iterator<Item = (&Symbol, i32)> {
        self.0.iter().map(|(s, e)| (s, *e))
    }

    pub fn exponent(&self, name: &str) -> i32 {
        self.0
            .iter()
            .find(|(s, _)| &**s == name)
            .map_or(0, |(_, e)| *e)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = SmallVec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (a, b) = (&self.0[i], &other.0[j]);
            match a.0.cmp(&b.0) {
                core::cmp::Ordering::Less => {
                    out.push(a.clone());
                    i += 1;
                }
                core::cmp::Ordering::Greater => {
                    out.push(b.clone());
                    j += 1;
                }
                core::cmp::Ordering::Equal => {
                    let e = a.1 + b.1;
                    if e != 0 {
                        out.push((a.0.clone(), e));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(self.0[i..].iter().cloned());
        out.extend(other.0[j..].iter().cloned());
        ParamMonomial(out)
    }

    pub fn inverse(&self) -> Self {
        ParamMonomial(self.0.iter().map(|(s, e)| (s.clone(), -e)).collect())
    }

    /// Drops the factor `name`, returning its exponent and the rest.
    pub fn split_off(&self, name: &str) -> (i32, Self) {
        let mut rest = SmallVec::new();
        let mut exp = 0;
        for (s, e) in &self.0 {
            if &**s == name {
                exp = *e;
            } else {
                rest.push((s.clone(), *e));
            }
        }
        (exp, ParamMonomial(rest))
    }
}

/// Exact Laurent polynomial in named parameters with rational coefficients.
///
/// Terms are kept sorted by [`ParamMonomial`] and never carry a zero
/// coefficient, so the zero scalar is the empty term list and equality is
/// structural.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Scalar {
    terms: Vec<(ParamMonomial, Rational)>,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(int(n))
    }

    pub fn from_rational(q: Rational) -> Self {
        if q.is_zero() {
            Self::zero()
        } else {
            Scalar {
                terms: alloc::vec![(ParamMonomial::one(), q)],
            }
        }
    }

    pub fn param(name: &str) -> Self {
        Self::monomial(Rational::one(), ParamMonomial::var(Arc::from(name)))
    }

    pub fn monomial(coeff: Rational, mono: ParamMonomial) -> Self {
        if coeff.is_zero() {
            Self::zero()
        } else {
            Scalar {
                terms: alloc::vec![(mono, coeff)],
            }
        }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (ParamMonomial, Rational)>) -> Self {
        let mut acc: BTreeMap<ParamMonomial, Rational> = BTreeMap::new();
        for (m, c) in terms {
            *acc.entry(m).or_insert_with(Rational::zero) += c;
        }
        Scalar {
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    pub fn terms(&self) -> &[(ParamMonomial, Rational)] {
        &self.terms
    }

    /// The value when the scalar carries no parameters.
    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.as_slice() {
            [] => Some(Rational::zero()),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    /// The coefficient of the parameter-free monomial.
    pub fn constant_term(&self) -> Rational {
        self.terms
            .iter()
            .find(|(m, _)| m.is_one())
            .map_or_else(Rational::zero, |(_, c)| c.clone())
    }

    pub fn as_monomial(&self) -> Option<(&Rational, &ParamMonomial)> {
        match self.terms.as_slice() {
            [(m, c)] => Some((c, m)),
            _ => None,
        }
    }

    pub fn scale(&self, q: &Rational) -> Self {
        if q.is_zero() {
            return Self::zero();
        }
        Scalar {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * q)).collect(),
        }
    }

    /// Inverse of a nonzero monomial; anything else is an error.
    pub fn inverse(&self) -> Result<Self> {
        match self.as_monomial() {
            Some((c, m)) if !c.is_zero() => Ok(Scalar::monomial(c.recip(), m.inverse())),
            _ => Err(Error::NonMonomialDivision),
        }
    }

    pub fn div(&self, other: &Scalar) -> Result<Self> {
        Ok(self * &other.inverse()?)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Scalar::one();
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Highest power of `name` occurring (`None` for zero).
    pub fn degree_in(&self, name: &str) -> Option<i32> {
        self.terms.iter().map(|(m, _)| m.exponent(name)).max()
    }

    /// Collects the scalar by powers of `name`.
    pub fn collect_in(&self, name: &str) -> BTreeMap<i32, Scalar> {
        let mut out: BTreeMap<i32, Vec<(ParamMonomial, Rational)>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (e, rest) = m.split_off(name);
            out.entry(e).or_default().push((rest, c.clone()));
        }
        out.into_iter()
            .map(|(e, t)| (e, Scalar::from_terms(t)))
            .collect()
    }

    /// Substitutes `name ↦ value`; negative powers need an invertible value.
    pub fn substitute(&self, name: &str, value: &Scalar) -> Result<Scalar> {
        let mut out = Scalar::zero();
        for (e, rest) in self.collect_in(name) {
            let power = if e >= 0 {
                value.pow(e as u32)
            } else {
                value.inverse()?.pow((-e) as u32)
            };
            out += &(&rest * &power);
        }
        Ok(out)
    }

    pub fn params(&self) -> impl Iterator<Item = &Symbol> {
        self.terms
            .iter()
            .flat_map(|(m, _)| m.0.iter().map(|(s, _)| s))
    }

    fn merge(&self, other: &Scalar, negate: bool) -> Scalar {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let sign = |c: &Rational| if negate { -c.clone() } else { c.clone() };
        while i < self.terms.len() && j < other.terms.len() {
            let (a, b) = (&self.terms[i], &other.terms[j]);
            match a.0.cmp(&b.0) {
                core::cmp::Ordering::Less => {
                    out.push(a.clone());
                    i += 1;
                }
                core::cmp::Ordering::Greater => {
                    out.push((b.0.clone(), sign(&b.1)));
                    j += 1;
                }
                core::cmp::Ordering::Equal => {
                    let c = if negate { &a.1 - &b.1 } else { &a.1 + &b.1 };
                    if !c.is_zero() {
                        out.push((a.0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(self.terms[i..].iter().cloned());
        out.extend(other.terms[j..].iter().map(|(m, c)| (m.clone(), sign(c))));
        Scalar { terms: out }
    }
}

impl From<Rational> for Scalar {
    fn from(q: Rational) -> Self {
        Scalar::from_rational(q)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.merge(rhs, false)
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self.merge(rhs, true)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        if self.is_zero() || rhs.is_zero() {
            return Scalar::zero();
        }
        // Pure rationals are by far the common case.
        if let [(m, c)] = self.terms.as_slice() {
            if m.is_one() {
                return rhs.scale(c);
            }
        }
        if let [(m, c)] = rhs.terms.as_slice() {
            if m.is_one() {
                return self.scale(c);
            }
        }
        Scalar::from_terms(
            self.terms
                .iter()
                .flat_map(|(ma, ca)| rhs.terms.iter().map(move |(mb, cb)| (ma.mul(mb), ca * cb))),
        )
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        &self + &rhs
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        &self - &rhs
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

pub(crate) fn fmt_rational(q: &Rational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if q.denom().is_one() {
        write!(f, "{}", q.numer())
    } else {
        write!(f, "{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for ParamMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (s, e)) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            if *e == 1 {
                write!(f, "{s}")?;
            } else if *e < 0 {
                write!(f, "{s}^({e})")?;
            } else {
                write!(f, "{s}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Writes `c·m` with an explicit leading sign handled by the caller.
pub(crate) fn fmt_coeff_times(
    c: &Rational,
    rest: &dyn fmt::Display,
    rest_is_one: bool,
    f: &mut fmt::Formatter<'_>,
) -> fmt::Result {
    let a = c.abs();
    if rest_is_one {
        fmt_rational(&a, f)
    } else if a.is_one() {
        write!(f, "{rest}")
    } else {
        fmt_rational(&a, f)?;
        write!(f, "*{rest}")
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if c.is_negative() {
                f.write_str(if k == 0 { "-" } else { " - " })?;
            } else if k > 0 {
                f.write_str(" + ")?;
            }
            fmt_coeff_times(c, m, m.is_one(), f)?;
        }
        Ok(())
    }
}

impl Scalar {
    /// Number of terms; a scalar with more than one term needs parentheses
    /// when printed as a factor.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn to_text(&self) -> String {
        alloc::format!("{self}")
    }
}
