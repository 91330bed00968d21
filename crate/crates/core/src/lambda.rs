//! λ-polynomials with differential-polynomial coefficients and the
//! λ-bracket machinery built on them.
//!
//! A [`LambdaExpr`] is a polynomial in formal variables `x_0, x_1, …` with
//! [`DiffPoly`] coefficients. In an algebra with `D` derivations the
//! variables come in families of `D`: family `k` owns slots
//! `k·D .. k·D + D`, so family 0 is `λ₁..λ_D`, family 1 is `μ₁..μ_D`, and so
//! on. [`Formal`] attaches names to families for printing and parsing.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use smallvec::SmallVec;

use crate::diffpoly::{Algebra, DerivKey, DiffPoly, Monomial, Order};
use crate::error::{Error, Result};
use crate::scalar::{Scalar, Symbol};

/// Exponent vector indexed by slot, with trailing zeros trimmed.
pub type Exps = SmallVec<[u32; 4]>;

fn exp_at(e: &[u32], s: usize) -> u32 {
    e.get(s).copied().unwrap_or(0)
}

fn trimmed(mut e: Exps) -> Exps {
    while e.last() == Some(&0) {
        e.pop();
    }
    e
}

fn exp_sum(a: &[u32], b: &[u32]) -> Exps {
    let n = a.len().max(b.len());
    (0..n).map(|s| exp_at(a, s) + exp_at(b, s)).collect()
}

fn unit(s: usize) -> Exps {
    let mut e: Exps = smallvec::smallvec![0; s + 1];
    e[s] = 1;
    e
}

/// Polynomial in formal variables with [`DiffPoly`] coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LambdaExpr {
    terms: BTreeMap<Exps, DiffPoly>,
}

impl LambdaExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(p: DiffPoly) -> Self {
        Self::monomial(&[], p)
    }

    /// The formal variable in slot `s`.
    pub fn var(s: usize) -> Self {
        Self::monomial(&unit(s), DiffPoly::one())
    }

    pub fn monomial(exps: &[u32], p: DiffPoly) -> Self {
        let mut e = LambdaExpr::zero();
        e.add_term(exps, &p);
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exps, &DiffPoly)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exps: &[u32]) -> DiffPoly {
        let key = trimmed(exps.iter().copied().collect());
        self.terms.get(&key).cloned().unwrap_or_default()
    }

    pub fn constant_term(&self) -> DiffPoly {
        self.coefficient(&[])
    }

    pub fn add_term(&mut self, exps: &[u32], p: &DiffPoly) {
        if p.is_zero() {
            return;
        }
        let key = trimmed(exps.iter().copied().collect());
        match self.terms.entry(key) {
            alloc::collections::btree_map::Entry::Vacant(v) => {
                v.insert(p.clone());
            }
            alloc::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += p;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Number of slots spanned (one past the highest slot used).
    pub fn slot_span(&self) -> usize {
        self.terms.keys().map(|e| e.len()).max().unwrap_or(0)
    }

    pub fn uses_slot(&self, s: usize) -> bool {
        self.terms.keys().any(|e| exp_at(e, s) > 0)
    }

    pub fn degree(&self, s: usize) -> u32 {
        self.terms.keys().map(|e| exp_at(e, s)).max().unwrap_or(0)
    }

    /// Left multiplication by a differential polynomial.
    pub fn mul_poly(&self, p: &DiffPoly) -> LambdaExpr {
        let mut out = LambdaExpr::zero();
        if p.is_zero() {
            return out;
        }
        for (e, c) in &self.terms {
            out.add_term(e, &(p * c));
        }
        out
    }

    /// Multiplication by the monomial `x^exps`.
    pub fn mul_exps(&self, exps: &[u32]) -> LambdaExpr {
        if exps.iter().all(|&a| a == 0) {
            return self.clone();
        }
        LambdaExpr {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (exp_sum(e, exps), c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> LambdaExpr {
        let mut out = LambdaExpr::zero();
        for (e, p) in &self.terms {
            out.add_term(e, &p.scale(c));
        }
        out
    }

    pub fn map_coefficients(&self, mut f: impl FnMut(&DiffPoly) -> DiffPoly) -> LambdaExpr {
        let mut out = LambdaExpr::zero();
        for (e, p) in &self.terms {
            out.add_term(e, &f(p));
        }
        out
    }

    pub fn try_map_coefficients(
        &self,
        mut f: impl FnMut(&DiffPoly) -> Result<DiffPoly>,
    ) -> Result<LambdaExpr> {
        let mut out = LambdaExpr::zero();
        for (e, p) in &self.terms {
            out.add_term(e, &f(p)?);
        }
        Ok(out)
    }

    /// Moves every slot `s` to `f(s)`.
    pub fn remap_slots(&self, f: impl Fn(usize) -> usize) -> LambdaExpr {
        let mut out = LambdaExpr::zero();
        for (e, p) in &self.terms {
            let mut ne = Exps::new();
            for (s, &a) in e.iter().enumerate() {
                if a > 0 {
                    let t = f(s);
                    if ne.len() <= t {
                        ne.resize(t + 1, 0);
                    }
                    ne[t] += a;
                }
            }
            out.add_term(&ne, p);
        }
        out
    }

    pub fn pow(&self, n: u32) -> LambdaExpr {
        let mut out = LambdaExpr::constant(DiffPoly::one());
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    /// Replaces `x_slot` by the linear form `Σ c_t x_t` (no derivatives).
    pub fn substitute_linear(&self, slot: usize, form: &[(usize, Scalar)]) -> LambdaExpr {
        let mut lin = LambdaExpr::zero();
        for (t, c) in form {
            lin.add_term(&unit(*t), &DiffPoly::constant(c.clone()));
        }
        let mut powers: Vec<LambdaExpr> = alloc::vec![LambdaExpr::constant(DiffPoly::one())];
        let mut out = LambdaExpr::zero();
        for (e, p) in &self.terms {
            let a = exp_at(e, slot) as usize;
            while powers.len() <= a {
                let next = powers.last().unwrap() * &lin;
                powers.push(next);
            }
            let mut rest = e.clone();
            if slot < rest.len() {
                rest[slot] = 0;
            }
            out += &powers[a].mul_exps(&rest).mul_poly(p);
        }
        out
    }

    /// Sets every slot in `slots` to zero.
    pub fn at_zero(&self, slots: &[usize]) -> LambdaExpr {
        LambdaExpr {
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| slots.iter().all(|&s| exp_at(e, s) == 0))
                .map(|(e, p)| (e.clone(), p.clone()))
                .collect(),
        }
    }

    /// One equation per (λ-monomial, variable monomial) pair: the residual
    /// vanishes iff every returned coefficient does.
    pub fn conditions(&self) -> Vec<Condition> {
        let mut out = Vec::new();
        for (e, p) in &self.terms {
            let mut split: BTreeMap<Monomial, DiffPoly> = BTreeMap::new();
            for (m, c) in p.terms() {
                split
                    .entry(m.var_part())
                    .or_default()
                    .add_term(m.func_part(), c);
            }
            for (m, coefficient) in split {
                if !coefficient.is_zero() {
                    out.push(Condition {
                        lambda: e.clone(),
                        monomial: m,
                        coefficient,
                    });
                }
            }
        }
        out
    }
}

/// One scalar equation `coefficient = 0` extracted from a residual: the
/// coefficient of `x^lambda · monomial`, where `monomial` involves derivative
/// variables only and `coefficient` involves parameters and function symbols.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Condition {
    pub lambda: Exps,
    pub monomial: Monomial,
    pub coefficient: DiffPoly,
}

impl AddAssign<&LambdaExpr> for LambdaExpr {
    fn add_assign(&mut self, rhs: &LambdaExpr) {
        for (e, p) in &rhs.terms {
            self.add_term(e, p);
        }
    }
}

impl SubAssign<&LambdaExpr> for LambdaExpr {
    fn sub_assign(&mut self, rhs: &LambdaExpr) {
        for (e, p) in &rhs.terms {
            self.add_term(e, &-p);
        }
    }
}

impl Add for &LambdaExpr {
    type Output = LambdaExpr;
    fn add(self, rhs: &LambdaExpr) -> LambdaExpr {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &LambdaExpr {
    type Output = LambdaExpr;
    fn sub(self, rhs: &LambdaExpr) -> LambdaExpr {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Add for LambdaExpr {
    type Output = LambdaExpr;
    fn add(mut self, rhs: LambdaExpr) -> LambdaExpr {
        self += &rhs;
        self
    }
}

impl Sub for LambdaExpr {
    type Output = LambdaExpr;
    fn sub(mut self, rhs: LambdaExpr) -> LambdaExpr {
        self -= &rhs;
        self
    }
}

impl Mul for &LambdaExpr {
    type Output = LambdaExpr;
    fn mul(self, rhs: &LambdaExpr) -> LambdaExpr {
        let mut out = LambdaExpr::zero();
        for (ea, pa) in &self.terms {
            for (eb, pb) in &rhs.terms {
                out.add_term(&exp_sum(ea, eb), &(pa * pb));
            }
        }
        out
    }
}

impl Neg for &LambdaExpr {
    type Output = LambdaExpr;
    fn neg(self) -> LambdaExpr {
        LambdaExpr {
            terms: self.terms.iter().map(|(e, p)| (e.clone(), -p)).collect(),
        }
    }
}

impl Neg for LambdaExpr {
    type Output = LambdaExpr;
    fn neg(self) -> LambdaExpr {
        -&self
    }
}

impl From<DiffPoly> for LambdaExpr {
    fn from(p: DiffPoly) -> Self {
        LambdaExpr::constant(p)
    }
}

/// Names for families of formal variables. With one derivation a family is a
/// single variable named after the family; with `D > 1` its members are
/// `name1 .. nameD`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Formal {
    names: Vec<Symbol>,
    dims: usize,
}

impl Formal {
    pub fn new(names: &[&str], dims: usize) -> Self {
        Formal {
            names: names.iter().map(|n| Symbol::from(*n)).collect(),
            dims,
        }
    }

    /// `lambda` and `mu`.
    pub fn standard(dims: usize) -> Self {
        Self::new(&["lambda", "mu"], dims)
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn families(&self) -> &[Symbol] {
        &self.names
    }

    pub fn family_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| &**n == name)
    }

    pub fn slot(&self, family: usize, alpha: usize) -> usize {
        family * self.dims + alpha
    }

    pub fn var_name(&self, slot: usize) -> String {
        let fam = slot / self.dims;
        let base = self
            .names
            .get(fam)
            .map(|s| String::from(&**s))
            .unwrap_or_else(|| format!("x{fam}_"));
        if self.dims == 1 {
            base
        } else {
            format!("{base}{}", slot % self.dims + 1)
        }
    }

    /// The slot a printed variable name refers to.
    pub fn parse_var(&self, name: &str) -> Option<usize> {
        if self.dims == 1 {
            return self.family_index(name);
        }
        self.names.iter().enumerate().find_map(|(fam, n)| {
            let idx: usize = name.strip_prefix(&**n)?.parse().ok()?;
            (1..=self.dims)
                .contains(&idx)
                .then(|| self.slot(fam, idx - 1))
        })
    }
}

/// `N × N` matrix of λ-polynomials; entry `(i, j)` is `{u_i λ u_j}`.
/// Entries may only involve the first family of formal variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BracketMatrix {
    n: usize,
    entries: Vec<LambdaExpr>,
}

impl BracketMatrix {
    pub fn zero(n: usize) -> Self {
        BracketMatrix {
            n,
            entries: alloc::vec![LambdaExpr::zero(); n * n],
        }
    }

    /// Builds from rows: `rows[i][j] = {u_i λ u_j}`.
    pub fn from_rows(rows: Vec<Vec<LambdaExpr>>) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "bracket matrix row of length {} in a {n}×{n} matrix",
                    r.len()
                )));
            }
            entries.extend(r);
        }
        Ok(BracketMatrix { n, entries })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> &LambdaExpr {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, e: LambdaExpr) {
        self.entries[i * self.n + j] = e;
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &LambdaExpr)> {
        self.entries
            .iter()
            .enumerate()
            .map(move |(k, e)| (k / self.n, k % self.n, e))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(LambdaExpr::is_zero)
    }

    pub fn map(&self, f: impl Fn(&LambdaExpr) -> LambdaExpr) -> BracketMatrix {
        BracketMatrix {
            n: self.n,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn try_map(&self, f: impl Fn(&LambdaExpr) -> Result<LambdaExpr>) -> Result<BracketMatrix> {
        Ok(BracketMatrix {
            n: self.n,
            entries: self.entries.iter().map(f).collect::<Result<_>>()?,
        })
    }

    /// Entrywise `self + z · other`.
    pub fn add_scaled(&self, other: &BracketMatrix, z: &Scalar) -> Result<BracketMatrix> {
        if other.n != self.n {
            return Err(Error::DimensionMismatch(format!(
                "adding {}×{} and {}×{} matrices",
                self.n, self.n, other.n, other.n
            )));
        }
        Ok(BracketMatrix {
            n: self.n,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + &b.scale(z))
                .collect(),
        })
    }

    /// Checks the shape against the algebra.
    pub fn check(&self, alg: &Algebra) -> Result<()> {
        if self.n != alg.gen_count() {
            return Err(Error::DimensionMismatch(format!(
                "bracket matrix is {}×{} but the algebra has {} generators",
                self.n,
                self.n,
                alg.gen_count()
            )));
        }
        if let Some((i, j, _)) = self.entries().find(|(_, _, e)| e.slot_span() > alg.dims()) {
            return Err(Error::DimensionMismatch(format!(
                "entry ({}, {}) uses formal variables beyond the first family",
                i + 1,
                j + 1
            )));
        }
        Ok(())
    }
}

/// Lazily computed `X^n E` where `X_α = Σ_{s ∈ slots[α]} x_s + ∂_α`, with `∂`
/// acting on the coefficients of `E`.
struct ShiftCache<'a> {
    alg: &'a Algebra,
    slots: &'a [Vec<usize>],
    memo: BTreeMap<Order, LambdaExpr>,
}

impl<'a> ShiftCache<'a> {
    fn new(alg: &'a Algebra, slots: &'a [Vec<usize>], base: LambdaExpr) -> Self {
        let mut memo = BTreeMap::new();
        memo.insert(alg.zero_order(), base);
        ShiftCache { alg, slots, memo }
    }

    fn get(&mut self, n: &Order) -> &LambdaExpr {
        if !self.memo.contains_key(n) {
            let alpha = n.iter().position(|&a| a > 0).unwrap();
            let mut prev = n.clone();
            prev[alpha] -= 1;
            self.get(&prev);
            let next = shift_once(self.alg, &self.memo[&prev], alpha, &self.slots[alpha]);
            self.memo.insert(n.clone(), next);
        }
        &self.memo[n]
    }
}

fn shift_once(alg: &Algebra, e: &LambdaExpr, alpha: usize, slots: &[usize]) -> LambdaExpr {
    let mut out = LambdaExpr::zero();
    for (ex, c) in &e.terms {
        for &s in slots {
            out.add_term(&exp_sum(ex, &unit(s)), c);
        }
        out.add_term(ex, &alg.derivative_unchecked(c, alpha));
    }
    out
}

fn family_slots(dims: usize, families: &[usize]) -> Vec<Vec<usize>> {
    (0..dims)
        .map(|alpha| families.iter().map(|f| f * dims + alpha).collect())
        .collect()
}

fn order_of(dims: usize, ex: &[u32]) -> Order {
    (0..dims).map(|a| exp_at(ex, a)).collect()
}

fn is_odd(n: &Order) -> bool {
    n.iter().sum::<u32>() % 2 == 1
}

/// Master Formula for differential polynomials `f, g`; `slots[α]` holds the
/// slot standing for `λ_α`.
fn master_core(
    alg: &Algebra,
    f: &DiffPoly,
    g: &DiffPoly,
    h: &BracketMatrix,
    slots: &[Vec<usize>],
) -> Result<LambdaExpr> {
    let n = alg.gen_count();
    let dims = alg.dims();
    let mut out = LambdaExpr::zero();
    if f.is_zero() || g.is_zero() {
        return Ok(out);
    }

    let mut g_parts: Vec<Vec<(Order, DiffPoly)>> = alloc::vec![Vec::new(); n];
    for key in alg.support_keys(g) {
        let p = alg.partial_derivative(g, &key)?;
        if !p.is_zero() {
            g_parts[key.gen].push((key.order, p));
        }
    }
    if g_parts.iter().all(Vec::is_empty) {
        return Ok(out);
    }

    // Y_i = Σ_m (−λ−∂)^m ∂f/∂u_i^{(m)}
    let mut ys: Vec<LambdaExpr> = alloc::vec![LambdaExpr::zero(); n];
    for key in alg.support_keys(f) {
        let p = alg.partial_derivative(f, &key)?;
        if p.is_zero() {
            continue;
        }
        let mut cache = ShiftCache::new(alg, slots, LambdaExpr::constant(p));
        let t = cache.get(&key.order);
        if is_odd(&key.order) {
            ys[key.gen] -= t;
        } else {
            ys[key.gen] += t;
        }
    }

    for (j, parts) in g_parts.iter().enumerate() {
        if parts.is_empty() {
            continue;
        }
        // Z_j = Σ_i H_{ji}(λ+∂) Y_i, coefficients of H to the left
        let mut z = LambdaExpr::zero();
        for (i, y) in ys.iter().enumerate() {
            let hji = h.entry(i, j);
            if y.is_zero() || hji.is_zero() {
                continue;
            }
            let mut cache = ShiftCache::new(alg, slots, y.clone());
            for (ex, c) in hji.terms() {
                let shifted = cache.get(&order_of(dims, ex));
                z += &shifted.mul_poly(c);
            }
        }
        if z.is_zero() {
            continue;
        }
        let mut cache = ShiftCache::new(alg, slots, z);
        for (order, p) in parts {
            out += &cache.get(order).mul_poly(p);
        }
    }
    Ok(out)
}

fn check_family_free(e: &LambdaExpr, dims: usize, family: usize, what: &str) -> Result<()> {
    if (0..dims).any(|a| e.uses_slot(family * dims + a)) {
        return Err(Error::DimensionMismatch(format!(
            "{what} already involves the bracket variable family {family}"
        )));
    }
    Ok(())
}

/// `{f_λ g}` by the Master Formula, in the first variable family.
pub fn master_bracket(
    alg: &Algebra,
    f: &DiffPoly,
    g: &DiffPoly,
    h: &BracketMatrix,
) -> Result<LambdaExpr> {
    h.check(alg)?;
    master_core(alg, f, g, h, &family_slots(alg.dims(), &[0]))
}

/// `{f_λ g}` with `λ` the variable family `family`; other formal variables
/// occurring in `f` or `g` are treated as constants.
pub fn bracket(
    alg: &Algebra,
    f: &LambdaExpr,
    g: &LambdaExpr,
    h: &BracketMatrix,
    family: usize,
) -> Result<LambdaExpr> {
    h.check(alg)?;
    let dims = alg.dims();
    check_family_free(f, dims, family, "left argument")?;
    check_family_free(g, dims, family, "right argument")?;
    let slots = family_slots(dims, &[family]);
    let mut out = LambdaExpr::zero();
    for (ea, fa) in f.terms() {
        for (eb, gb) in g.terms() {
            let r = master_core(alg, fa, gb, h, &slots)?;
            out += &r.mul_exps(&exp_sum(ea, eb));
        }
    }
    Ok(out)
}

/// Replaces the last listed family `ω` by `−(Σ others) − ∂`, with `∂`
/// acting on the coefficients.
pub fn shift_substitute(alg: &Algebra, e: &LambdaExpr, families: &[usize]) -> Result<LambdaExpr> {
    let (&elim, others) = families
        .split_last()
        .ok_or_else(|| Error::InvalidConfig("no formal parameter to eliminate".into()))?;
    let dims = alg.dims();
    let slots = family_slots(dims, others);
    let mut out = LambdaExpr::zero();
    for (ex, c) in e.terms() {
        let a: Order = (0..dims).map(|al| exp_at(ex, elim * dims + al)).collect();
        let mut rest = ex.clone();
        for al in 0..dims {
            if let Some(v) = rest.get_mut(elim * dims + al) {
                *v = 0;
            }
        }
        let mut cache = ShiftCache::new(alg, &slots, LambdaExpr::constant(c.clone()));
        let t = cache.get(&a).mul_exps(&rest);
        if is_odd(&a) {
            out -= &t;
        } else {
            out += &t;
        }
    }
    Ok(out)
}

/// Entry `(i, j)` is `{u_i λ u_j} + {u_j −λ−∂ u_i}`.
pub fn skew_residual(alg: &Algebra, h: &BracketMatrix) -> Result<BracketMatrix> {
    h.check(alg)?;
    let dims = alg.dims();
    let n = h.size();
    let mut out = BracketMatrix::zero(n);
    for i in 0..n {
        for j in 0..n {
            let moved = h.entry(j, i).remap_slots(|s| s + dims);
            let r = h.entry(i, j) + &shift_substitute(alg, &moved, &[0, 1])?;
            out.set(i, j, r);
        }
    }
    Ok(out)
}

/// Jacobi residuals indexed by generator triples; values are polynomials in
/// the first two variable families.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JacobiResidual {
    n: usize,
    entries: Vec<LambdaExpr>,
}

impl JacobiResidual {
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &LambdaExpr {
        &self.entries[(i * self.n + j) * self.n + k]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(LambdaExpr::is_zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize, usize), &LambdaExpr)> {
        let n = self.n;
        self.entries
            .iter()
            .enumerate()
            .map(move |(t, e)| ((t / (n * n), (t / n) % n, t % n), e))
    }
}

/// `{a_λ {b_μ c}} − {b_μ {a_λ c}} − {{a_λ b}_{λ+μ} c}` for arbitrary
/// elements, the last bracket taken in a scratch family and then shifted.
pub fn jacobi_expr(
    alg: &Algebra,
    a: &DiffPoly,
    b: &DiffPoly,
    c: &DiffPoly,
    h: &BracketMatrix,
) -> Result<LambdaExpr> {
    let dims = alg.dims();
    let a = LambdaExpr::constant(a.clone());
    let b = LambdaExpr::constant(b.clone());
    let c = LambdaExpr::constant(c.clone());
    let t1 = bracket(alg, &a, &bracket(alg, &b, &c, h, 1)?, h, 0)?;
    let t2 = bracket(alg, &b, &bracket(alg, &a, &c, h, 0)?, h, 1)?;
    let ab = bracket(alg, &a, &b, h, 0)?;
    let mut t3 = bracket(alg, &ab, &c, h, 2)?;
    for al in 0..dims {
        t3 = t3.substitute_linear(
            2 * dims + al,
            &[(al, Scalar::one()), (dims + al, Scalar::one())],
        );
    }
    Ok(t1 - t2 - t3)
}

fn jacobi_entry(
    alg: &Algebra,
    h: &BracketMatrix,
    i: usize,
    j: usize,
    k: usize,
) -> Result<LambdaExpr> {
    let dims = alg.dims();
    let ui = LambdaExpr::constant(alg.gen(i));
    let uj = LambdaExpr::constant(alg.gen(j));
    let uk = LambdaExpr::constant(alg.gen(k));
    let in_mu = |e: &LambdaExpr| e.remap_slots(|s| s + dims);
    let t1 = bracket(alg, &ui, &in_mu(h.entry(j, k)), h, 0)?;
    let t2 = bracket(alg, &uj, h.entry(i, k), h, 1)?;
    let mut t3 = bracket(alg, h.entry(i, j), &uk, h, 2)?;
    for al in 0..dims {
        t3 = t3.substitute_linear(
            2 * dims + al,
            &[(al, Scalar::one()), (dims + al, Scalar::one())],
        );
    }
    Ok(t1 - t2 - t3)
}

/// The Jacobi identity on generators, for every triple `(i, j, k)`.
pub fn jacobi_residual(alg: &Algebra, h: &BracketMatrix) -> Result<JacobiResidual> {
    h.check(alg)?;
    let n = h.size();
    let triples: Vec<(usize, usize, usize)> = (0..n)
        .flat_map(|i| (0..n).flat_map(move |j| (0..n).map(move |k| (i, j, k))))
        .collect();
    #[cfg(feature = "parallel")]
    let entries = {
        use rayon::prelude::*;
        triples
            .par_iter()
            .map(|&(i, j, k)| jacobi_entry(alg, h, i, j, k))
            .collect::<Result<Vec<_>>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let entries = triples
        .iter()
        .map(|&(i, j, k)| jacobi_entry(alg, h, i, j, k))
        .collect::<Result<Vec<_>>>()?;
    Ok(JacobiResidual { n, entries })
}

/// `Σ_a c_a ∂^a F` for `op = Σ_a c_a λ^a` (first family only).
pub fn apply_operator(alg: &Algebra, op: &LambdaExpr, f: &DiffPoly) -> Result<DiffPoly> {
    let dims = alg.dims();
    if op.slot_span() > dims {
        return Err(Error::DimensionMismatch(
            "operator uses formal variables beyond the first family".into(),
        ));
    }
    let mut out = DiffPoly::zero();
    for (ex, c) in op.terms() {
        let d = alg.derivative_multi(f, &order_of(dims, ex))?;
        out += &(c * &d);
    }
    Ok(out)
}

fn require_one_dim(alg: &Algebra, what: &str) -> Result<()> {
    if alg.dims() != 1 {
        return Err(Error::Unsupported(format!(
            "{what} needs a single derivation, the algebra has {}",
            alg.dims()
        )));
    }
    Ok(())
}

/// `du_i/dt = Σ_j H_{ij}(∂) δh/δu_j` with `H_{ij}(λ) = {u_j λ u_i}`.
pub fn hamiltonian_flow(alg: &Algebra, h: &DiffPoly, m: &BracketMatrix) -> Result<Vec<DiffPoly>> {
    require_one_dim(alg, "a Hamiltonian flow")?;
    m.check(alg)?;
    let n = alg.gen_count();
    let var = (0..n)
        .map(|j| alg.variational_derivative(h, j))
        .collect::<Result<Vec<_>>>()?;
    (0..n)
        .map(|i| {
            let mut out = DiffPoly::zero();
            for (j, dj) in var.iter().enumerate() {
                out += &apply_operator(alg, m.entry(j, i), dj)?;
            }
            Ok(out)
        })
        .collect()
}

/// Density `Σ_{i,j} δg/δu_j · H_{ji}(∂) δf/δu_i` of the bracket of local
/// functionals `∫f` and `∫g`.
pub fn functional_bracket(
    alg: &Algebra,
    f: &DiffPoly,
    g: &DiffPoly,
    m: &BracketMatrix,
) -> Result<DiffPoly> {
    require_one_dim(alg, "the functional bracket")?;
    m.check(alg)?;
    let n = alg.gen_count();
    let mut out = DiffPoly::zero();
    for i in 0..n {
        let df = alg.variational_derivative(f, i)?;
        if df.is_zero() {
            continue;
        }
        for j in 0..n {
            let dg = alg.variational_derivative(g, j)?;
            if dg.is_zero() {
                continue;
            }
            out += &(&dg * &apply_operator(alg, m.entry(i, j), &df)?);
        }
    }
    Ok(out)
}

/// The evolutionary vector field with characteristic `x` applied to `f`:
/// `Σ_{i,n} ∂^n(x_i) ∂f/∂u_i^{(n)}`.
pub fn ev_vfield(alg: &Algebra, x: &[DiffPoly], f: &DiffPoly) -> Result<DiffPoly> {
    if x.len() != alg.gen_count() {
        return Err(Error::DimensionMismatch(format!(
            "characteristic has {} components, the algebra has {} generators",
            x.len(),
            alg.gen_count()
        )));
    }
    let mut out = DiffPoly::zero();
    for key in alg.support_keys(f) {
        let p = alg.partial_derivative(f, &key)?;
        if p.is_zero() {
            continue;
        }
        let DerivKey { gen, order } = key;
        out += &(&alg.derivative_multi(&x[gen], &order)? * &p);
    }
    Ok(out)
}
