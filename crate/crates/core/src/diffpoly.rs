//! Differential polynomials in `N` generators and `D` commuting derivations.
//!
//! A [`DiffPoly`] is a finite sum of monomials, each a product of powers of
//! derivative variables `∂^n u_i` ([`DerivKey`]) and of abstract function
//! symbols `f(u_{i₁},…,u_{i_k})` ([`FuncSym`]) depending on undifferentiated
//! generators only. Coefficients are [`Scalar`]s. The representation is
//! canonical: equal polynomials compare equal structurally.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::ToString;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::scalar::{int, Rational, Scalar, Symbol};

/// Derivative multi-index, one entry per derivation.
pub type Order = SmallVec<[u32; 3]>;

/// The variable `∂^order u_gen`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DerivKey {
    pub gen: usize,
    pub order: Order,
}

impl DerivKey {
    pub fn new(gen: usize, order: &[u32]) -> Self {
        DerivKey {
            gen,
            order: order.iter().copied().collect(),
        }
    }

    pub fn total_order(&self) -> u32 {
        self.order.iter().sum()
    }

    pub fn is_underived(&self) -> bool {
        self.order.iter().all(|&n| n == 0)
    }

    fn raised(&self, alpha: usize) -> DerivKey {
        let mut k = self.clone();
        k.order[alpha] += 1;
        k
    }
}

impl Ord for DerivKey {
    // gen-major, then graded-lex on the order multi-index
    fn cmp(&self, other: &Self) -> Ordering {
        self.gen
            .cmp(&other.gen)
            .then_with(|| self.total_order().cmp(&other.total_order()))
            .then_with(|| self.order.cmp(&other.order))
    }
}

impl PartialOrd for DerivKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// An abstract function of undifferentiated generators, possibly with formal
/// partial derivatives applied. `partials[k]` counts `∂/∂u_{args[k]}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FuncSym {
    pub name: Symbol,
    pub args: Arc<[usize]>,
    pub partials: SmallVec<[u32; 4]>,
}

impl FuncSym {
    fn with_partial(&self, pos: usize) -> FuncSym {
        let mut f = self.clone();
        f.partials[pos] += 1;
        f
    }
}

impl Ord for FuncSym {
    fn cmp(&self, other: &Self) -> Ordering {
        self.name
            .cmp(&other.name)
            .then_with(|| self.partials.cmp(&other.partials))
            .then_with(|| self.args.cmp(&other.args))
    }
}

impl PartialOrd for FuncSym {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Product of variable powers and function-symbol powers, both sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    vars: SmallVec<[(DerivKey, u32); 4]>,
    funcs: SmallVec<[(FuncSym, u32); 2]>,
}

fn merge_powers<T: Ord + Clone, const N: usize>(
    a: &[(T, u32)],
    b: &[(T, u32)],
) -> SmallVec<[(T, u32); N]>
where
    [(T, u32); N]: smallvec::Array<Item = (T, u32)>,
{
    let mut out = SmallVec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            Ordering::Greater => {
                out.push(b[j].clone());
                j += 1;
            }
            Ordering::Equal => {
                out.push((a[i].0.clone(), a[i].1 + b[j].1));
                i += 1;
                j += 1;
            }
        }
    }
    out.extend(a[i..].iter().cloned());
    out.extend(b[j..].iter().cloned());
    out
}

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn var(key: DerivKey) -> Self {
        Monomial {
            vars: smallvec::smallvec![(key, 1)],
            funcs: SmallVec::new(),
        }
    }

    pub fn func(f: FuncSym) -> Self {
        Monomial {
            vars: SmallVec::new(),
            funcs: smallvec::smallvec![(f, 1)],
        }
    }

    pub fn is_one(&self) -> bool {
        self.vars.is_empty() && self.funcs.is_empty()
    }

    pub fn vars(&self) -> &[(DerivKey, u32)] {
        &self.vars
    }

    pub fn funcs(&self) -> &[(FuncSym, u32)] {
        &self.funcs
    }

    /// Polynomial degree in the derivative variables.
    pub fn degree(&self) -> u32 {
        self.vars.iter().map(|(_, e)| e).sum()
    }

    /// Total number of derivatives, counted with multiplicity.
    pub fn derivative_count(&self) -> u32 {
        self.vars.iter().map(|(k, e)| k.total_order() * e).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        if self.is_one() {
            return other.clone();
        }
        if other.is_one() {
            return self.clone();
        }
        Monomial {
            vars: merge_powers(&self.vars, &other.vars),
            funcs: merge_powers(&self.funcs, &other.funcs),
        }
    }

    /// The product of the derivative-variable factors only.
    pub fn var_part(&self) -> Monomial {
        Monomial {
            vars: self.vars.clone(),
            funcs: SmallVec::new(),
        }
    }

    /// The product of the function-symbol factors only.
    pub fn func_part(&self) -> Monomial {
        Monomial {
            vars: SmallVec::new(),
            funcs: self.funcs.clone(),
        }
    }

    fn without_var(&self, idx: usize) -> Monomial {
        let mut m = self.clone();
        if m.vars[idx].1 == 1 {
            m.vars.remove(idx);
        } else {
            m.vars[idx].1 -= 1;
        }
        m
    }

    fn without_func(&self, idx: usize) -> Monomial {
        let mut m = self.clone();
        if m.funcs[idx].1 == 1 {
            m.funcs.remove(idx);
        } else {
            m.funcs[idx].1 -= 1;
        }
        m
    }
}

/// Element of a differential polynomial algebra.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct DiffPoly {
    terms: BTreeMap<Monomial, Scalar>,
}

impl DiffPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Scalar::one())
    }

    pub fn constant(c: Scalar) -> Self {
        Self::term(c, Monomial::one())
    }

    pub fn term(c: Scalar, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        DiffPoly { terms }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Scalar)>) -> Self {
        let mut p = DiffPoly::zero();
        for (m, c) in terms {
            p.add_term(m, &c);
        }
        p
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

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn constant_term(&self) -> Scalar {
        self.coefficient(&Monomial::one())
    }

    /// The scalar value if the polynomial is constant.
    pub fn as_constant(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(Scalar::zero()),
            1 if self.terms.keys().next().is_some_and(Monomial::is_one) => {
                Some(self.constant_term())
            }
            _ => None,
        }
    }

    pub fn has_funcs(&self) -> bool {
        self.terms.keys().any(|m| !m.funcs.is_empty())
    }

    pub fn add_term(&mut self, m: Monomial, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            alloc::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            alloc::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn scale(&self, c: &Scalar) -> DiffPoly {
        if c.is_zero() {
            return DiffPoly::zero();
        }
        if c.is_one() {
            return self.clone();
        }
        DiffPoly {
            terms: self
                .terms
                .iter()
                .filter_map(|(m, k)| {
                    let v = k * c;
                    (!v.is_zero()).then(|| (m.clone(), v))
                })
                .collect(),
        }
    }

    pub fn scale_rational(&self, q: &Rational) -> DiffPoly {
        self.scale(&Scalar::from_rational(q.clone()))
    }

    pub fn pow(&self, e: u32) -> DiffPoly {
        let mut out = DiffPoly::one();
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Applies `f` to every coefficient.
    pub fn map_coefficients(&self, mut f: impl FnMut(&Scalar) -> Scalar) -> DiffPoly {
        DiffPoly::from_terms(self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }

    /// Every derivative variable occurring, sorted.
    pub fn keys(&self) -> BTreeSet<DerivKey> {
        self.terms
            .keys()
            .flat_map(|m| m.vars.iter().map(|(k, _)| k.clone()))
            .collect()
    }

    /// Every function symbol occurring, sorted.
    pub fn funcs(&self) -> BTreeSet<FuncSym> {
        self.terms
            .keys()
            .flat_map(|m| m.funcs.iter().map(|(f, _)| f.clone()))
            .collect()
    }

    /// Substitutes a parameter by a scalar in every coefficient.
    pub fn substitute_param(&self, name: &str, value: &Scalar) -> Result<DiffPoly> {
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), &c.substitute(name, value)?);
        }
        Ok(out)
    }
}

impl Add for &DiffPoly {
    type Output = DiffPoly;
    fn add(self, rhs: &DiffPoly) -> DiffPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &DiffPoly {
    type Output = DiffPoly;
    fn sub(self, rhs: &DiffPoly) -> DiffPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl AddAssign<&DiffPoly> for DiffPoly {
    fn add_assign(&mut self, rhs: &DiffPoly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c);
        }
    }
}

impl SubAssign<&DiffPoly> for DiffPoly {
    fn sub_assign(&mut self, rhs: &DiffPoly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), &-c);
        }
    }
}

impl Add for DiffPoly {
    type Output = DiffPoly;
    fn add(mut self, rhs: DiffPoly) -> DiffPoly {
        self += &rhs;
        self
    }
}

impl Sub for DiffPoly {
    type Output = DiffPoly;
    fn sub(mut self, rhs: DiffPoly) -> DiffPoly {
        self -= &rhs;
        self
    }
}

impl Mul for &DiffPoly {
    type Output = DiffPoly;
    fn mul(self, rhs: &DiffPoly) -> DiffPoly {
        let mut out = DiffPoly::zero();
        if self.is_zero() || rhs.is_zero() {
            return out;
        }
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), &(ca * cb));
            }
        }
        out
    }
}

impl Mul for DiffPoly {
    type Output = DiffPoly;
    fn mul(self, rhs: DiffPoly) -> DiffPoly {
        &self * &rhs
    }
}

impl Neg for &DiffPoly {
    type Output = DiffPoly;
    fn neg(self) -> DiffPoly {
        DiffPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for DiffPoly {
    type Output = DiffPoly;
    fn neg(self) -> DiffPoly {
        -&self
    }
}

impl From<Scalar> for DiffPoly {
    fn from(c: Scalar) -> Self {
        DiffPoly::constant(c)
    }
}

/// Declared signature of a function symbol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuncDecl {
    pub name: Symbol,
    pub args: Arc<[usize]>,
}

/// Outcome of [`Algebra::is_total_derivative`] with its witnesses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TotalDerivativeCheck {
    pub is_total: bool,
    /// `δp/δu_i` for every generator.
    pub variational: Vec<DiffPoly>,
    pub constant_term: Scalar,
}

/// The algebra a [`DiffPoly`] lives in: generator names, number of
/// derivations, declared parameters and function-symbol signatures.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Algebra {
    gens: Vec<Symbol>,
    dims: usize,
    params: Vec<Symbol>,
    funcs: Vec<FuncDecl>,
}

fn check_name(name: &str) -> Result<()> {
    let mut chars = name.chars();
    let ok = chars.next().is_some_and(|c| c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_');
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidConfig(alloc::format!("bad name `{name}`")))
    }
}

impl Algebra {
    pub fn new(gens: &[&str], dims: usize, params: &[&str]) -> Result<Self> {
        if gens.is_empty() {
            return Err(Error::InvalidConfig("need at least one generator".into()));
        }
        if dims == 0 {
            return Err(Error::InvalidConfig("need at least one derivation".into()));
        }
        let alg = Algebra {
            gens: gens.iter().map(|s| Symbol::from(*s)).collect(),
            dims,
            params: params.iter().map(|s| Symbol::from(*s)).collect(),
            funcs: Vec::new(),
        };
        alg.check_distinct()?;
        Ok(alg)
    }

    /// Generators named `u1..uN` (or `u` when `N = 1`).
    pub fn standard(count: usize, dims: usize, params: &[&str]) -> Result<Self> {
        let names: Vec<alloc::string::String> = if count == 1 {
            alloc::vec!["u".to_string()]
        } else {
            (1..=count).map(|i| alloc::format!("u{i}")).collect()
        };
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        Self::new(&refs, dims, params)
    }

    fn check_distinct(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        let all = self
            .gens
            .iter()
            .chain(self.params.iter())
            .chain(self.funcs.iter().map(|f| &f.name));
        for name in all {
            check_name(name)?;
            if !seen.insert(name.clone()) {
                return Err(Error::InvalidConfig(alloc::format!(
                    "name `{name}` declared twice"
                )));
            }
        }
        Ok(())
    }

    pub fn with_param(mut self, name: &str) -> Result<Self> {
        self.params.push(Symbol::from(name));
        self.check_distinct()?;
        Ok(self)
    }

    /// Declares a function symbol of the named generators.
    pub fn with_function(mut self, name: &str, args: &[&str]) -> Result<Self> {
        let args = args
            .iter()
            .map(|a| {
                self.gen_index(a).ok_or_else(|| {
                    Error::InvalidConfig(alloc::format!(
                        "function `{name}` depends on unknown generator `{a}`"
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if args.iter().collect::<BTreeSet<_>>().len() != args.len() {
            return Err(Error::InvalidConfig(alloc::format!(
                "function `{name}` repeats an argument"
            )));
        }
        self.funcs.push(FuncDecl {
            name: Symbol::from(name),
            args: args.into(),
        });
        self.check_distinct()?;
        Ok(self)
    }

    pub fn gen_count(&self) -> usize {
        self.gens.len()
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn gen_names(&self) -> &[Symbol] {
        &self.gens
    }

    pub fn gen_name(&self, i: usize) -> &str {
        &self.gens[i]
    }

    pub fn gen_index(&self, name: &str) -> Option<usize> {
        self.gens.iter().position(|g| &**g == name)
    }

    pub fn params(&self) -> &[Symbol] {
        &self.params
    }

    pub fn has_param(&self, name: &str) -> bool {
        self.params.iter().any(|p| &**p == name)
    }

    pub fn functions(&self) -> &[FuncDecl] {
        &self.funcs
    }

    pub fn function(&self, name: &str) -> Option<&FuncDecl> {
        self.funcs.iter().find(|f| &*f.name == name)
    }

    fn check_gen(&self, i: usize) -> Result<()> {
        if i < self.gens.len() {
            Ok(())
        } else {
            Err(Error::GeneratorOutOfRange {
                index: i,
                count: self.gens.len(),
            })
        }
    }

    fn check_alpha(&self, alpha: usize) -> Result<()> {
        if alpha < self.dims {
            Ok(())
        } else {
            Err(Error::DerivationOutOfRange {
                index: alpha,
                dims: self.dims,
            })
        }
    }

    pub fn zero_order(&self) -> Order {
        smallvec::smallvec![0; self.dims]
    }

    pub fn key(&self, gen: usize, order: &[u32]) -> Result<DerivKey> {
        self.check_gen(gen)?;
        if order.len() != self.dims {
            return Err(Error::DimensionMismatch(alloc::format!(
                "order multi-index has length {}, expected {}",
                order.len(),
                self.dims
            )));
        }
        Ok(DerivKey::new(gen, order))
    }

    /// The generator `u_i` as a polynomial.
    pub fn gen(&self, i: usize) -> DiffPoly {
        DiffPoly::term(
            Scalar::one(),
            Monomial::var(DerivKey {
                gen: i,
                order: self.zero_order(),
            }),
        )
    }

    /// `∂^order u_i`.
    pub fn var(&self, i: usize, order: &[u32]) -> Result<DiffPoly> {
        Ok(DiffPoly::term(
            Scalar::one(),
            Monomial::var(self.key(i, order)?),
        ))
    }

    /// `u_i^{(n)}` in a one-dimensional algebra.
    pub fn var1(&self, i: usize, n: u32) -> DiffPoly {
        let mut order = self.zero_order();
        order[0] = n;
        DiffPoly::term(Scalar::one(), Monomial::var(DerivKey { gen: i, order }))
    }

    pub fn param(&self, name: &str) -> Scalar {
        Scalar::param(name)
    }

    /// A declared function symbol with the given formal partials (listed as
    /// generator names, repetitions allowed).
    pub fn func(&self, name: &str, partials: &[&str]) -> Result<DiffPoly> {
        let decl = self
            .function(name)
            .ok_or_else(|| Error::InvalidConfig(alloc::format!("unknown function `{name}`")))?;
        let mut counts: SmallVec<[u32; 4]> = smallvec::smallvec![0; decl.args.len()];
        for p in partials {
            let g = self
                .gen_index(p)
                .ok_or_else(|| Error::InvalidConfig(alloc::format!("unknown generator `{p}`")))?;
            match decl.args.iter().position(|&a| a == g) {
                Some(pos) => counts[pos] += 1,
                None => return Ok(DiffPoly::zero()),
            }
        }
        Ok(DiffPoly::term(
            Scalar::one(),
            Monomial::func(FuncSym {
                name: decl.name.clone(),
                args: decl.args.clone(),
                partials: counts,
            }),
        ))
    }

    fn mono_derivative(&self, m: &Monomial, alpha: usize, out: &mut DiffPoly) {
        for (idx, (key, e)) in m.vars.iter().enumerate() {
            let rest = m.without_var(idx).mul(&Monomial::var(key.raised(alpha)));
            out.add_term(rest, &Scalar::from_int(*e as i64));
        }
        for (idx, (f, e)) in m.funcs.iter().enumerate() {
            let base = m.without_func(idx);
            for (pos, &arg) in f.args.iter().enumerate() {
                let mut order = self.zero_order();
                order[alpha] = 1;
                let factor = Monomial::func(f.with_partial(pos))
                    .mul(&Monomial::var(DerivKey { gen: arg, order }));
                out.add_term(base.mul(&factor), &Scalar::from_int(*e as i64));
            }
        }
    }

    pub(crate) fn derivative_unchecked(&self, p: &DiffPoly, alpha: usize) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m, c) in &p.terms {
            let mut dm = DiffPoly::zero();
            self.mono_derivative(m, alpha, &mut dm);
            for (mm, cc) in dm.terms {
                out.add_term(mm, &(&cc * c));
            }
        }
        out
    }

    /// The total derivative `∂_α p` (α is zero-based).
    pub fn total_derivative(&self, p: &DiffPoly, alpha: usize) -> Result<DiffPoly> {
        self.check_alpha(alpha)?;
        Ok(self.derivative_unchecked(p, alpha))
    }

    /// `∂^order p` for a multi-index.
    pub fn derivative_multi(&self, p: &DiffPoly, order: &[u32]) -> Result<DiffPoly> {
        if order.len() != self.dims {
            return Err(Error::DimensionMismatch(alloc::format!(
                "order multi-index has length {}, expected {}",
                order.len(),
                self.dims
            )));
        }
        let mut out = p.clone();
        for (alpha, &n) in order.iter().enumerate() {
            for _ in 0..n {
                if out.is_zero() {
                    return Ok(out);
                }
                out = self.derivative_unchecked(&out, alpha);
            }
        }
        Ok(out)
    }

    /// `∂p/∂(∂^n u_i)`, treating every derivative variable as independent.
    /// Function symbols respond only to order-zero keys of their arguments.
    pub fn partial_derivative(&self, p: &DiffPoly, key: &DerivKey) -> Result<DiffPoly> {
        self.key(key.gen, &key.order)?;
        let mut out = DiffPoly::zero();
        let underived = key.is_underived();
        for (m, c) in &p.terms {
            if let Some(idx) = m.vars.iter().position(|(k, _)| k == key) {
                let e = m.vars[idx].1;
                out.add_term(m.without_var(idx), &c.scale(&int(e as i64)));
            }
            if underived {
                for (idx, (f, e)) in m.funcs.iter().enumerate() {
                    if let Some(pos) = f.args.iter().position(|&a| a == key.gen) {
                        let mm = m
                            .without_func(idx)
                            .mul(&Monomial::func(f.with_partial(pos)));
                        out.add_term(mm, &c.scale(&int(*e as i64)));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Every key `p` can have a nonzero partial derivative in: the derivative
    /// variables present plus the order-zero keys of function arguments.
    pub fn support_keys(&self, p: &DiffPoly) -> BTreeSet<DerivKey> {
        let mut keys = p.keys();
        for f in p.funcs() {
            for &a in f.args.iter() {
                keys.insert(DerivKey {
                    gen: a,
                    order: self.zero_order(),
                });
            }
        }
        keys
    }

    /// Derivative orders of `u_i` that `p` can respond to (always including 0).
    fn orders_of(&self, p: &DiffPoly, gen: usize) -> BTreeSet<Order> {
        let mut orders: BTreeSet<Order> = p
            .keys()
            .into_iter()
            .filter(|k| k.gen == gen)
            .map(|k| k.order)
            .collect();
        orders.insert(self.zero_order());
        orders
    }

    /// `δp/δu_i = Σ_n (−∂)^n ∂p/∂u_i^{(n)}`; the sum is over the finite
    /// support of `p`, so no truncation order is involved.
    pub fn variational_derivative(&self, p: &DiffPoly, gen: usize) -> Result<DiffPoly> {
        self.check_gen(gen)?;
        let mut out = DiffPoly::zero();
        for order in self.orders_of(p, gen) {
            let key = DerivKey { gen, order };
            let part = self.partial_derivative(p, &key)?;
            if part.is_zero() {
                continue;
            }
            let mut d = self.derivative_multi(&part, &key.order)?;
            if key.total_order() % 2 == 1 {
                d = -d;
            }
            out += &d;
        }
        Ok(out)
    }

    /// Decides whether `p ∈ ∂V` for a one-dimensional algebra without
    /// function symbols: the kernel of the variational derivative on the
    /// polynomial ring is `constants ⊕ ∂V`.
    pub fn is_total_derivative(&self, p: &DiffPoly) -> Result<TotalDerivativeCheck> {
        if self.dims != 1 {
            return Err(Error::Unsupported(
                "total-derivative test needs a single derivation".into(),
            ));
        }
        if p.has_funcs() {
            return Err(Error::Unsupported(
                "total-derivative test is undecidable with function symbols".into(),
            ));
        }
        let variational = (0..self.gen_count())
            .map(|i| self.variational_derivative(p, i))
            .collect::<Result<Vec<_>>>()?;
        let constant_term = p.constant_term();
        Ok(TotalDerivativeCheck {
            is_total: constant_term.is_zero() && variational.iter().all(DiffPoly::is_zero),
            variational,
            constant_term,
        })
    }
}
