//! Matrix realizations of simple Lie algebras, sl₂-triples and the graded
//! bases of `𝔤^f` and `𝔤^e` attached to a nilpotent element.
//!
//! Indices of matrix units are zero-based throughout the API: `E(0,1)` is
//! the matrix unit usually written `E₁₂`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};
use core::str::FromStr;

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::{self, Span, Vector};
use crate::scalar::{int, rat, Rational, Scalar};

/// An element of `½ℤ`, stored as twice its value.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInt(i64);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);
    pub const HALF: HalfInt = HalfInt(1);
    pub const ONE: HalfInt = HalfInt(2);

    pub fn from_twice(t: i64) -> Self {
        HalfInt(t)
    }

    pub fn int(n: i64) -> Self {
        HalfInt(2 * n)
    }

    pub fn twice(self) -> i64 {
        self.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn abs(self) -> Self {
        HalfInt(self.0.abs())
    }

    pub fn to_rational(self) -> Rational {
        rat(self.0, 2)
    }

    pub fn from_rational(q: &Rational) -> Option<Self> {
        let t = q * int(2);
        t.is_integer()
            .then(|| t.to_integer().to_i64())
            .flatten()
            .map(HalfInt)
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, o: HalfInt) -> HalfInt {
        HalfInt(self.0 + o.0)
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, o: HalfInt) -> HalfInt {
        HalfInt(self.0 - o.0)
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt(-self.0)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl FromStr for HalfInt {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::MalformedTable(format!("`{s}` is not a half-integer"));
        let s = s.trim();
        match s.split_once('/') {
            Some((n, "2")) => n.trim().parse::<i64>().map(HalfInt).map_err(|_| bad()),
            Some(_) => Err(bad()),
            None => s.parse::<i64>().map(HalfInt::int).map_err(|_| bad()),
        }
    }
}

/// Square matrix with [`Scalar`] entries.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MatElem {
    n: usize,
    data: Vec<Scalar>,
}

impl MatElem {
    pub fn zero(n: usize) -> Self {
        MatElem {
            n,
            data: vec![Scalar::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.data[i * n + i] = Scalar::one();
        }
        m
    }

    /// The matrix unit `E_{ij}` (zero-based).
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zero(n);
        m.data[i * n + j] = Scalar::one();
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "matrix row of length {} in a {n}×{n} matrix",
                    r.len()
                )));
            }
            data.extend(r);
        }
        Ok(MatElem { n, data })
    }

    /// Builds from `(row, col, value)` triples, zero-based.
    pub fn from_sparse(n: usize, entries: &[(usize, usize, Scalar)]) -> Result<Self> {
        let mut m = Self::zero(n);
        for (i, j, v) in entries {
            if *i >= n || *j >= n {
                return Err(Error::DimensionMismatch(format!(
                    "entry ({}, {}) outside a {n}×{n} matrix",
                    i + 1,
                    j + 1
                )));
            }
            m.data[i * n + j] += v;
        }
        Ok(m)
    }

    pub(crate) fn from_vector(n: usize, v: &[Rational]) -> Self {
        MatElem {
            n,
            data: v.iter().map(|q| Scalar::from_rational(q.clone())).collect(),
        }
    }

    /// Row-major rational coordinates, if every entry is a plain number.
    pub fn to_vector(&self) -> Option<Vec<Rational>> {
        self.data.iter().map(Scalar::as_rational).collect()
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.n + j] = v;
    }

    /// Nonzero entries as `(row, col, value)`, zero-based, row-major.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Scalar)> {
        let n = self.n;
        self.data
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(move |(k, v)| (k / n, k % n, v))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn is_diagonal(&self) -> bool {
        self.entries().all(|(i, j, _)| i == j)
    }

    pub fn is_strictly_lower(&self) -> bool {
        self.entries().all(|(i, j, _)| i > j)
    }

    pub fn is_strictly_upper(&self) -> bool {
        self.entries().all(|(i, j, _)| i < j)
    }

    pub fn scale(&self, c: &Scalar) -> MatElem {
        MatElem {
            n: self.n,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    pub fn trace(&self) -> Scalar {
        let mut t = Scalar::zero();
        for i in 0..self.n {
            t += &self.data[i * self.n + i];
        }
        t
    }

    /// `[self, other] = self·other − other·self`.
    pub fn comm(&self, other: &MatElem) -> MatElem {
        &(self * other) - &(other * self)
    }

    /// Transpose with respect to the antidiagonal.
    pub fn anti_transpose(&self) -> MatElem {
        let n = self.n;
        let mut m = Self::zero(n);
        for (i, j, v) in self.entries() {
            m.data[(n - 1 - j) * n + (n - 1 - i)] = v.clone();
        }
        m
    }

    /// `tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &MatElem) -> Scalar {
        let n = self.n;
        let mut t = Scalar::zero();
        for (i, j, v) in self.entries() {
            let w = &other.data[j * n + i];
            if !w.is_zero() {
                t += &(v * w);
            }
        }
        t
    }

    pub fn map(&self, f: impl Fn(&Scalar) -> Scalar) -> MatElem {
        MatElem {
            n: self.n,
            data: self.data.iter().map(f).collect(),
        }
    }
}

impl Add for &MatElem {
    type Output = MatElem;
    fn add(self, o: &MatElem) -> MatElem {
        MatElem {
            n: self.n,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &MatElem {
    type Output = MatElem;
    fn sub(self, o: &MatElem) -> MatElem {
        MatElem {
            n: self.n,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &MatElem {
    type Output = MatElem;
    fn neg(self) -> MatElem {
        self.map(|v| -v)
    }
}

impl Mul for &MatElem {
    type Output = MatElem;
    fn mul(self, o: &MatElem) -> MatElem {
        let n = self.n;
        let mut m = MatElem::zero(n);
        for (i, k, a) in self.entries() {
            for j in 0..n {
                let b = &o.data[k * n + j];
                if !b.is_zero() {
                    m.data[i * n + j] += &(a * b);
                }
            }
        }
        m
    }
}

impl fmt::Display for MatElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, j, v) in self.entries() {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            if v.is_one() {
                write!(f, "E{}{}", i + 1, j + 1)?;
            } else {
                write!(f, "({v})*E{}{}", i + 1, j + 1)?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// Cartan type.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum LieType {
    A,
    B,
    C,
    D,
    G,
}

impl FromStr for LieType {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A" | "a" => Ok(LieType::A),
            "B" | "b" => Ok(LieType::B),
            "C" | "c" => Ok(LieType::C),
            "D" | "d" => Ok(LieType::D),
            "G" | "g" => Ok(LieType::G),
            other => Err(Error::UnsupportedType(other.into())),
        }
    }
}

impl fmt::Display for LieType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LieType::A => "A",
            LieType::B => "B",
            LieType::C => "C",
            LieType::D => "D",
            LieType::G => "G",
        };
        f.write_str(s)
    }
}

/// A simple Lie algebra realized inside `𝔤𝔩_N`, with the invariant form
/// `(a|b) = c·tr(ab)`.
#[derive(Clone, Debug)]
pub struct LieAlgebra {
    ty: LieType,
    rank: usize,
    n: usize,
    s: Option<Vec<i64>>,
    scale: Scalar,
    basis: Vec<MatElem>,
    constraints: Vec<Vector>,
}

fn s_diagonal(ty: LieType, rank: usize) -> Option<Vec<i64>> {
    let sign = |k: usize| if k % 2 == 1 { 1 } else { -1 };
    match ty {
        LieType::A => None,
        LieType::B => Some((1..=2 * rank + 1).map(sign).collect()),
        LieType::C => Some((1..=2 * rank).map(sign).collect()),
        LieType::D | LieType::G => {
            let r = if ty == LieType::G { 4 } else { rank };
            let mut s = vec![0; 2 * r];
            for k in 1..=r {
                s[k - 1] = sign(k);
                s[2 * r - k] = sign(k);
            }
            Some(s)
        }
    }
}

fn sigma_with(s: &[i64], a: &MatElem) -> MatElem {
    let at = a.anti_transpose();
    let mut m = MatElem::zero(a.n);
    for (i, j, v) in at.entries() {
        m.set(i, j, v.scale(&int(-s[i] * s[j])));
    }
    m
}

/// Matrix entries of `E_{ij}` sums given one-based, as in `(1,2)` for `E₁₂`.
fn units(n: usize, terms: &[(usize, usize, i64, i64)]) -> MatElem {
    let mut m = MatElem::zero(n);
    for &(i, j, p, q) in terms {
        m.set(i - 1, j - 1, Scalar::from_rational(rat(p, q)));
    }
    m
}

/// The Chevalley generators `(e₁, e₂, h₁, h₂, f₁, f₂)` of `G₂ ⊂ 𝔬₈`, with
/// `h_i = [e_i, f_i]`. The often-quoted `h₁ = E₂₂−E₃₃+E₅₅−E₆₆` is not in `𝔬₈`
/// (its antidiagonal mirror `E₇₇` is missing); the commutator is used instead.
pub fn g2_generators() -> [MatElem; 6] {
    [
        units(8, &[(2, 3, 1, 1), (6, 7, 1, 1)]),
        units(
            8,
            &[
                (1, 2, 1, 1),
                (3, 4, 1, 1),
                (5, 6, 1, 1),
                (7, 8, 1, 1),
                (3, 5, 1, 2),
                (4, 6, 1, 2),
            ],
        ),
        units(
            8,
            &[(2, 2, 1, 1), (3, 3, -1, 1), (6, 6, 1, 1), (7, 7, -1, 1)],
        ),
        units(
            8,
            &[
                (1, 1, 1, 1),
                (2, 2, -1, 1),
                (3, 3, 2, 1),
                (6, 6, -2, 1),
                (7, 7, 1, 1),
                (8, 8, -1, 1),
            ],
        ),
        units(8, &[(3, 2, 1, 1), (7, 6, 1, 1)]),
        units(
            8,
            &[
                (2, 1, 1, 1),
                (4, 3, 1, 1),
                (6, 5, 1, 1),
                (8, 7, 1, 1),
                (5, 3, 2, 1),
                (6, 4, 2, 1),
            ],
        ),
    ]
}

fn span_basis(n: usize, spanning: impl IntoIterator<Item = MatElem>) -> Vec<MatElem> {
    let mut span = Span::new(n * n);
    let mut basis = Vec::new();
    for m in spanning {
        if span.insert(&m.to_vector().expect("rational generator")) {
            basis.push(m);
        }
    }
    basis
}

impl LieAlgebra {
    /// Realizes the algebra of the given type and rank with form scale `c`.
    pub fn new(ty: LieType, rank: usize) -> Result<Self> {
        Self::with_scale(ty, rank, Scalar::param("c"))
    }

    pub fn with_scale(ty: LieType, rank: usize, scale: Scalar) -> Result<Self> {
        let ok = match ty {
            LieType::A | LieType::B | LieType::C => rank >= 1,
            LieType::D => rank >= 2,
            LieType::G => rank == 2,
        };
        if !ok {
            return Err(Error::InvalidConfig(format!(
                "type {ty} has no rank {rank}"
            )));
        }
        if scale.is_zero() {
            return Err(Error::InvalidConfig(
                "the form scale must be nonzero".into(),
            ));
        }
        let n = match ty {
            LieType::A => rank + 1,
            LieType::B => 2 * rank + 1,
            LieType::C | LieType::D => 2 * rank,
            LieType::G => 8,
        };
        let s = s_diagonal(ty, rank);
        let basis = match ty {
            LieType::A => {
                let mut spanning = Vec::new();
                for i in 0..n {
                    for j in 0..n {
                        if i != j {
                            spanning.push(MatElem::unit(n, i, j));
                        }
                    }
                }
                for i in 0..n - 1 {
                    spanning.push(&MatElem::unit(n, i, i) - &MatElem::unit(n, i + 1, i + 1));
                }
                span_basis(n, spanning)
            }
            LieType::B | LieType::C | LieType::D => {
                let s = s.as_ref().unwrap();
                let mut spanning = Vec::new();
                for i in 0..n {
                    for j in 0..n {
                        let e = MatElem::unit(n, i, j);
                        let m = &e + &sigma_with(s, &e);
                        if !m.is_zero() {
                            spanning.push(m);
                        }
                    }
                }
                span_basis(n, spanning)
            }
            LieType::G => {
                // the printed h₁ is not in 𝔬₈; the Cartan part comes from [e_i, f_i]
                let all = g2_generators();
                let gens = [
                    all[0].clone(),
                    all[1].clone(),
                    all[4].clone(),
                    all[5].clone(),
                ];
                let mut span = Span::new(n * n);
                let mut basis: Vec<MatElem> = Vec::new();
                for g in &gens {
                    if span.insert(&g.to_vector().unwrap()) {
                        basis.push(g.clone());
                    }
                }
                let mut i = 0;
                while i < basis.len() {
                    for g in &gens {
                        let c = g.comm(&basis[i]);
                        if span.insert(&c.to_vector().unwrap()) {
                            basis.push(c);
                        }
                    }
                    i += 1;
                }
                basis
            }
        };
        let rows: Vec<Vector> = basis.iter().map(|b| b.to_vector().unwrap()).collect();
        let constraints = linalg::nullspace(rows, n * n);
        let alg = LieAlgebra {
            ty,
            rank,
            n,
            s,
            scale,
            basis,
            constraints,
        };
        let expected = alg.expected_dim();
        if alg.basis.len() != expected {
            return Err(Error::InvalidConfig(format!(
                "realization of {ty}{rank} has dimension {}, expected {expected}",
                alg.basis.len()
            )));
        }
        Ok(alg)
    }

    fn expected_dim(&self) -> usize {
        let r = self.rank;
        match self.ty {
            LieType::A => r * (r + 2),
            LieType::B | LieType::C => r * (2 * r + 1),
            LieType::D => r * (2 * r - 1),
            LieType::G => 14,
        }
    }

    pub fn lie_type(&self) -> LieType {
        self.ty
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Size `N` of the matrices.
    pub fn rep_dim(&self) -> usize {
        self.n
    }

    /// Dimension of the Lie algebra.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn scale(&self) -> &Scalar {
        &self.scale
    }

    pub fn basis(&self) -> &[MatElem] {
        &self.basis
    }

    /// Diagonal of `S` for types B, C, D (and D₄ for G₂).
    pub fn s_matrix(&self) -> Option<&[i64]> {
        self.s.as_deref()
    }

    fn check_dim(&self, a: &MatElem) -> Result<()> {
        if a.n == self.n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!(
                "{}×{} matrix in a {}×{} realization",
                a.n, a.n, self.n, self.n
            )))
        }
    }

    /// `σ(a) = −S aᵃᵗ S` for the classical types B, C, D.
    pub fn sigma(&self, a: &MatElem) -> Result<MatElem> {
        self.check_dim(a)?;
        match (self.ty, &self.s) {
            (LieType::B | LieType::C | LieType::D, Some(s)) => Ok(sigma_with(s, a)),
            _ => Err(Error::Unsupported(format!(
                "σ is defined for types B, C, D, not {}",
                self.ty
            ))),
        }
    }

    pub fn comm(&self, a: &MatElem, b: &MatElem) -> Result<MatElem> {
        self.check_dim(a)?;
        self.check_dim(b)?;
        Ok(a.comm(b))
    }

    /// `(a|b) = c·tr(ab)`.
    pub fn trace_form(&self, a: &MatElem, b: &MatElem) -> Result<Scalar> {
        self.check_dim(a)?;
        self.check_dim(b)?;
        Ok(self.form(a, b))
    }

    pub(crate) fn form(&self, a: &MatElem, b: &MatElem) -> Scalar {
        &self.scale * &a.trace_product(b)
    }

    /// Membership in `𝔤`; entries may involve parameters.
    pub fn check_alg(&self, a: &MatElem) -> bool {
        if a.n != self.n {
            return false;
        }
        self.constraints.iter().all(|w| {
            let mut t = Scalar::zero();
            for (k, c) in w.iter().enumerate() {
                if !c.is_zero() && !a.data[k].is_zero() {
                    t += &a.data[k].scale(c);
                }
            }
            t.is_zero()
        })
    }

    /// A principal nilpotent element, strictly lower triangular.
    pub fn principal_nilpotent(&self) -> MatElem {
        let n = self.n;
        match self.ty {
            LieType::A => {
                let mut f = MatElem::zero(n);
                for i in 0..n - 1 {
                    f.set(i + 1, i, Scalar::one());
                }
                f
            }
            LieType::B | LieType::C => {
                let mut f = MatElem::zero(n);
                for i in 0..n - 1 {
                    f.set(i + 1, i, Scalar::one());
                }
                let sf = sigma_with(self.s.as_ref().unwrap(), &f);
                (&f + &sf).scale(&Scalar::from_rational(rat(1, 2)))
            }
            LieType::D => {
                let s = self.s.as_ref().unwrap();
                let r = self.rank;
                let mut f = MatElem::zero(n);
                for i in 0..r - 1 {
                    f.set(i + 1, i, Scalar::one());
                }
                f.set(r, r - 2, Scalar::one());
                &f + &sigma_with(s, &f)
            }
            LieType::G => {
                let g = g2_generators();
                &g[4] + &g[5]
            }
        }
    }

    /// Completes a strictly lower triangular nilpotent `f ∈ 𝔤` to an
    /// sl₂-triple with `x` diagonal and `e` strictly upper triangular.
    pub fn complete_sl2(&self, f: &MatElem) -> Result<Sl2Triple> {
        self.check_dim(f)?;
        let fv = f
            .to_vector()
            .ok_or_else(|| Error::NoTriple("f must have numeric entries".into()))?;
        if f.is_zero() {
            return Err(Error::NoTriple("f is zero".into()));
        }
        if !self.check_alg(f) {
            return Err(Error::NotInAlgebra("f".into()));
        }
        if !f.is_strictly_lower() {
            return Err(Error::NoTriple(
                "f must be strictly lower triangular".into(),
            ));
        }
        let n = self.n;
        let dim = self.basis.len();

        // unknowns: diagonal h (n), then coordinates of y ∈ 𝔤 (dim)
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let fij = &fv[i * n + j];
                if fij.is_zero() {
                    continue;
                }
                let mut r = vec![Rational::zero(); n + dim];
                r[i] += fij;
                r[j] -= fij;
                rows.push(r);
                rhs.push(-fij * int(2));
            }
        }
        let fb: Vec<Vector> = self
            .basis
            .iter()
            .map(|b| f.comm(b).to_vector().unwrap())
            .collect();
        for i in 0..n {
            for j in 0..n {
                let mut r = vec![Rational::zero(); n + dim];
                if i == j {
                    r[i] = Rational::one();
                }
                for (k, v) in fb.iter().enumerate() {
                    r[n + k] = -v[i * n + j].clone();
                }
                if r.iter().any(|v| !v.is_zero()) {
                    rows.push(r);
                    rhs.push(Rational::zero());
                }
            }
        }
        let sol = linalg::solve(&rows, &rhs, n + dim).ok_or_else(|| {
            Error::NoTriple("no semisimple partner h = [f, y]; f is not nilpotent".into())
        })?;
        let hdiag: Vec<Rational> = sol[..n].to_vec();
        let mut h = MatElem::zero(n);
        for (i, v) in hdiag.iter().enumerate() {
            h.set(i, i, Scalar::from_rational(v.clone()));
        }

        // e ∈ 𝔤 with [e, f] = h and [h, e] = 2e
        let hv = h.to_vector().unwrap();
        let ef: Vec<Vector> = self
            .basis
            .iter()
            .map(|b| b.comm(f).to_vector().unwrap())
            .collect();
        let he: Vec<Vector> = self
            .basis
            .iter()
            .map(|b| {
                (&h.comm(b) - &b.scale(&Scalar::from_int(2)))
                    .to_vector()
                    .unwrap()
            })
            .collect();
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for idx in 0..n * n {
            rows.push(ef.iter().map(|v| v[idx].clone()).collect::<Vector>());
            rhs.push(hv[idx].clone());
            rows.push(he.iter().map(|v| v[idx].clone()).collect::<Vector>());
            rhs.push(Rational::zero());
        }
        let coords = linalg::solve(&rows, &rhs, dim)
            .ok_or_else(|| Error::NoTriple("no nilpositive partner e".into()))?;
        let mut e = MatElem::zero(n);
        for (c, b) in coords.iter().zip(&self.basis) {
            if !c.is_zero() {
                e = &e + &b.scale(&Scalar::from_rational(c.clone()));
            }
        }
        if !e.is_strictly_upper() {
            return Err(Error::NoTriple(
                "the partner e is not strictly upper triangular".into(),
            ));
        }
        let x = h.scale(&Scalar::from_rational(rat(1, 2)));
        let xdiag = hdiag
            .iter()
            .map(|v| HalfInt::from_rational(&(v / int(2))))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::NoTriple("x has eigenvalues outside ½ℤ".into()))?;
        Ok(Sl2Triple {
            f: f.clone(),
            x,
            e,
            xdiag,
        })
    }

    /// Basis of `{a ∈ 𝔤_k : [m, a] = 0}` (or of `𝔤_k` when `m` is `None`),
    /// normalized by setting free coordinates to 1 in row-major entry order.
    fn graded_kernel(&self, xdiag: &[HalfInt], k: HalfInt, m: Option<&MatElem>) -> Vec<MatElem> {
        let n = self.n;
        let support: Vec<usize> = (0..n * n)
            .filter(|&idx| xdiag[idx / n] - xdiag[idx % n] == k)
            .collect();
        if support.is_empty() {
            return Vec::new();
        }
        let mut rows: Vec<Vector> = self
            .constraints
            .iter()
            .map(|w| support.iter().map(|&idx| w[idx].clone()).collect())
            .collect();
        if let Some(m) = m {
            let images: Vec<Vector> = support
                .iter()
                .map(|&idx| {
                    m.comm(&MatElem::unit(n, idx / n, idx % n))
                        .to_vector()
                        .unwrap()
                })
                .collect();
            for entry in 0..n * n {
                let r: Vector = images.iter().map(|v| v[entry].clone()).collect();
                if r.iter().any(|v| !v.is_zero()) {
                    rows.push(r);
                }
            }
        }
        linalg::nullspace(rows, support.len())
            .into_iter()
            .map(|v| {
                let mut full = vec![Rational::zero(); n * n];
                for (c, &idx) in v.into_iter().zip(&support) {
                    full[idx] = c;
                }
                MatElem::from_vector(n, &full)
            })
            .collect()
    }
}

/// An sl₂-triple `{f, 2x, e}`: `[x, e] = e`, `[x, f] = −f`, `[e, f] = 2x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sl2Triple {
    pub f: MatElem,
    pub x: MatElem,
    pub e: MatElem,
    xdiag: Vec<HalfInt>,
}

impl Sl2Triple {
    /// Diagonal entries of `x`.
    pub fn x_diagonal(&self) -> &[HalfInt] {
        &self.xdiag
    }
}

/// Jordan block sizes of a nilpotent matrix, in decreasing order.
pub fn jordan_type(f: &MatElem) -> Option<Vec<usize>> {
    let n = f.dim();
    let mut ranks = vec![n];
    let mut p = MatElem::identity(n);
    for _ in 0..n {
        p = &p * f;
        let rows: Vec<Vector> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| p.get(i, j).as_rational())
                    .collect::<Option<Vector>>()
            })
            .collect::<Option<_>>()?;
        ranks.push(linalg::rref(rows, n).1.len());
    }
    if *ranks.last()? != 0 {
        return None;
    }
    // blocks of size ≥ k: r_{k−1} − r_k
    let at_least: Vec<usize> = (1..=n).map(|k| ranks[k - 1] - ranks[k]).collect();
    let mut blocks = Vec::new();
    for k in (1..=n).rev() {
        let exact = at_least[k - 1] - at_least.get(k).copied().unwrap_or(0);
        blocks.extend(core::iter::repeat_n(k, exact));
    }
    Some(blocks)
}

fn binomial(n: i64, k: i64) -> Rational {
    let mut r = Rational::one();
    for i in 0..k {
        r = r * int(n - i) / int(i + 1);
    }
    r
}

fn factorial(n: i64) -> Rational {
    (1..=n).fold(Rational::one(), |acc, i| acc * int(i))
}

/// The bases of `𝔤^f`, `𝔤^e` and their `ad f` / `ad e` strings.
#[derive(Clone, Debug)]
pub struct GradedBasis {
    /// Basis `q_j` of `𝔤^f`, ordered by increasing `δ(j)`.
    pub q: Vec<MatElem>,
    /// `[x, q_j] = −δ(j) q_j`.
    pub delta: Vec<HalfInt>,
    /// Dual basis `q^j` of `𝔤^e` for the form `(·|·)`.
    pub qdual: Vec<MatElem>,
    /// `up[j][n] = q^j_n = (ad f)^n q^j`, `0 ≤ n ≤ 2δ(j)`.
    pub up: Vec<Vec<MatElem>>,
    /// `down[j][n] = q_j^n = (−1)^n / ((n!)² C(2δ(j), n)) · (ad e)^n q_j`.
    pub down: Vec<Vec<MatElem>>,
}

/// The four projections of an element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Projections {
    pub g_f: MatElem,
    pub e_g: MatElem,
    pub g_e: MatElem,
    pub f_g: MatElem,
}

impl GradedBasis {
    pub fn build(alg: &LieAlgebra, triple: &Sl2Triple) -> Result<Self> {
        let xd = triple.x_diagonal();
        let mut weights: Vec<HalfInt> = Vec::new();
        for &a in xd {
            for &b in xd {
                let k = a - b;
                if k >= HalfInt::ZERO && !weights.contains(&k) {
                    weights.push(k);
                }
            }
        }
        weights.sort();
        let mut q = Vec::new();
        let mut delta = Vec::new();
        let mut qdual = Vec::new();
        let inv_scale = alg.scale.inverse()?;
        for &k in &weights {
            let qs = alg.graded_kernel(xd, -k, Some(&triple.f));
            if qs.is_empty() {
                continue;
            }
            let ps = alg.graded_kernel(xd, k, Some(&triple.e));
            if ps.len() != qs.len() {
                return Err(Error::DegeneratePairing);
            }
            // pairing P_{ab} = tr(q_a p_b); dual q^j = Σ_b (P^{-T})_{jb} p_b
            let p: Vec<Vector> = qs
                .iter()
                .map(|qa| {
                    ps.iter()
                        .map(|pb| qa.trace_product(pb).as_rational().unwrap())
                        .collect()
                })
                .collect();
            let inv = linalg::inverse(&p).ok_or(Error::DegeneratePairing)?;
            for j in 0..qs.len() {
                let mut d = MatElem::zero(alg.n);
                for (b, pb) in ps.iter().enumerate() {
                    let coeff = &inv[b][j];
                    if !coeff.is_zero() {
                        d = &d + &pb.scale(&Scalar::from_rational(coeff.clone()));
                    }
                }
                qdual.push(d.scale(&inv_scale));
            }
            delta.extend(core::iter::repeat_n(k, qs.len()));
            q.extend(qs);
        }
        let mut up = Vec::new();
        let mut down = Vec::new();
        for j in 0..q.len() {
            let top = delta[j].twice();
            let mut u = vec![qdual[j].clone()];
            let mut raw = vec![q[j].clone()];
            for _ in 0..top {
                let next_u = triple.f.comm(u.last().unwrap());
                u.push(next_u);
                let next_d = triple.e.comm(raw.last().unwrap());
                raw.push(next_d);
            }
            let dn = raw
                .into_iter()
                .enumerate()
                .map(|(m, a)| {
                    let m = m as i64;
                    let sign = if m % 2 == 0 { int(1) } else { int(-1) };
                    let fac = factorial(m);
                    let coeff = sign / (&fac * &fac * binomial(top, m));
                    a.scale(&Scalar::from_rational(coeff))
                })
                .collect();
            up.push(u);
            down.push(dn);
        }
        Ok(GradedBasis {
            q,
            delta,
            qdual,
            up,
            down,
        })
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    /// `J_{−k}`: pairs `(j, n)` with `q^j_n ∈ 𝔤_k`.
    pub fn index_set(&self, k: HalfInt) -> Vec<(usize, usize)> {
        self.delta
            .iter()
            .enumerate()
            .filter(|(_, &d)| d - k.abs() >= HalfInt::ZERO && (d - k).is_integer())
            .map(|(j, &d)| (j, ((d - k).twice() / 2) as usize))
            .collect()
    }

    pub fn project(&self, alg: &LieAlgebra, a: &MatElem) -> Projections {
        let n = a.dim();
        let mut g_f = MatElem::zero(n);
        let mut e_g = MatElem::zero(n);
        let mut g_e = MatElem::zero(n);
        let mut f_g = MatElem::zero(n);
        for j in 0..self.len() {
            g_f = &g_f + &self.q[j].scale(&alg.form(a, &self.qdual[j]));
            g_e = &g_e + &self.qdual[j].scale(&alg.form(a, &self.q[j]));
            for m in 1..self.up[j].len() {
                e_g = &e_g + &self.down[j][m].scale(&alg.form(a, &self.up[j][m]));
                f_g = &f_g + &self.up[j][m].scale(&alg.form(a, &self.down[j][m]));
            }
        }
        Projections { g_f, e_g, g_e, f_g }
    }
}

/// A Lie algebra together with an sl₂-triple and its graded bases.
#[derive(Clone, Debug)]
pub struct LieContext {
    pub alg: LieAlgebra,
    pub triple: Sl2Triple,
    pub depth: HalfInt,
    pub basis: GradedBasis,
    eigen: BTreeMap<HalfInt, usize>,
}

impl LieContext {
    pub fn new(alg: LieAlgebra, f: &MatElem) -> Result<Self> {
        let triple = alg.complete_sl2(f)?;
        let basis = GradedBasis::build(&alg, &triple)?;
        let xd = triple.x_diagonal().to_vec();
        let mut eigen = BTreeMap::new();
        let mut diffs: Vec<HalfInt> = Vec::new();
        for &a in &xd {
            for &b in &xd {
                if !diffs.contains(&(a - b)) {
                    diffs.push(a - b);
                }
            }
        }
        for k in diffs {
            let dim = alg.graded_kernel(&xd, k, None).len();
            if dim > 0 {
                eigen.insert(k, dim);
            }
        }
        let depth = *eigen.keys().next_back().unwrap_or(&HalfInt::ZERO);
        Ok(LieContext {
            alg,
            triple,
            depth,
            basis,
            eigen,
        })
    }

    /// `dim 𝔤_k` for every `k` with `𝔤_k ≠ 0`.
    pub fn eigen_table(&self) -> &BTreeMap<HalfInt, usize> {
        &self.eigen
    }

    /// Basis of the graded piece `𝔤_k`.
    pub fn graded_piece(&self, k: HalfInt) -> Vec<MatElem> {
        self.alg.graded_kernel(self.triple.x_diagonal(), k, None)
    }

    /// `[x, a] = k·a`.
    pub fn is_eigenvector(&self, a: &MatElem, k: HalfInt) -> bool {
        let lhs = self.triple.x.comm(a);
        let rhs = a.scale(&Scalar::from_rational(k.to_rational()));
        lhs == rhs
    }
}

impl Zero for HalfInt {
    fn zero() -> Self {
        HalfInt::ZERO
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl HalfInt {
    pub fn is_negative(self) -> bool {
        self.0 < 0
    }
}

/// Parses `p` or `p/q` into a rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: num_bigint::BigInt = n.parse().ok()?;
    let d: num_bigint::BigInt = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Rational::new(n, d))
}

/// Fraction text for a rational, `p` or `p/q`.
pub fn rational_text(q: &Rational) -> String {
    if q.is_integer() {
        format!("{}", q.numer())
    } else {
        format!("{}/{}", q.numer(), q.denom().abs())
    }
}
