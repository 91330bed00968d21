//! Generators and λ-brackets of classical affine W-algebras `W(𝔤, f)`.
//!
//! The generators `w_j = w(q_j)` are the generators of a differential
//! polynomial algebra with one derivation. Their brackets are computed from
//! the closed formula expressing `{w(a)_λ w(b)}` as a leading affine term
//! minus a sum over chains `−h+1 ≤ k_t ≺ ⋯ ≺ k_1 ≤ k` (with `h ≺ k` meaning
//! `h ≤ k − 1`) of products of factors
//! `w([X, Y]♯) − (X|Y)(λ+∂) + z(s|[X, Y])`, where each `(λ+∂)` acts on
//! everything to its right. The chains are read from an [`IndexTable`].

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use smallvec::SmallVec;

use crate::diffpoly::{Algebra, DiffPoly};
use crate::error::{Error, Result};
use crate::lambda::{BracketMatrix, LambdaExpr};
use crate::liealg::{HalfInt, LieContext, MatElem};
use crate::scalar::{Scalar, Symbol};

/// Which half-integers a chain may visit.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Grid {
    /// All of `½ℤ`.
    Half,
    /// Only values congruent to `k` modulo 1.
    Aligned,
}

/// All `(k_1, …, k_t)` with `−h+1 ≤ k_t ≺ ⋯ ≺ k_1 ≤ k` on the grid.
pub fn index_sequences(h: HalfInt, k: HalfInt, t: usize, grid: Grid) -> Vec<Vec<HalfInt>> {
    let step = match grid {
        Grid::Half => HalfInt::HALF,
        Grid::Aligned => HalfInt::ONE,
    };
    let lo = HalfInt::ONE - h;
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(t);
    fn rec(
        cur: &mut Vec<HalfInt>,
        top: HalfInt,
        lo: HalfInt,
        step: HalfInt,
        t: usize,
        out: &mut Vec<Vec<HalfInt>>,
    ) {
        if cur.len() == t {
            out.push(cur.clone());
            return;
        }
        // room for the remaining entries, each at least 1 below the previous
        let remaining = (t - cur.len() - 1) as i64;
        let mut v = top;
        while v - HalfInt::int(remaining) >= lo {
            cur.push(v);
            rec(cur, v - HalfInt::ONE, lo, step, t, out);
            cur.pop();
            v = v - step;
        }
    }
    if t > 0 {
        rec(&mut cur, k, lo, step, t, &mut out);
    }
    out
}

/// Every chain for `(h, k)`, over all lengths, on the grid.
fn all_sequences(h: HalfInt, k: HalfInt, grid: Grid) -> Vec<Vec<HalfInt>> {
    let mut out = Vec::new();
    for t in 1.. {
        let s = index_sequences(h, k, t, grid);
        if s.is_empty() {
            break;
        }
        out.extend(s);
    }
    out
}

/// Checks the chain condition for one sequence.
pub fn is_chain(h: HalfInt, k: HalfInt, seq: &[HalfInt]) -> bool {
    !seq.is_empty()
        && seq[0] <= k
        && *seq.last().unwrap() >= HalfInt::ONE - h
        && seq.windows(2).all(|w| w[1] <= w[0] - HalfInt::ONE)
}

/// Precomputed chains for every pair `(h, k)` of weights in
/// `{0, ½, …, depth}` on the half-integer grid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexTable {
    depth: u32,
    seqs: BTreeMap<(HalfInt, HalfInt), Vec<Vec<HalfInt>>>,
}

fn weights_up_to(depth: u32) -> impl Iterator<Item = HalfInt> + Clone {
    (0..=2 * depth as i64).map(HalfInt::from_twice)
}

impl IndexTable {
    pub fn generate(depth: u32) -> Self {
        let pairs: Vec<(HalfInt, HalfInt)> = weights_up_to(depth)
            .flat_map(|h| weights_up_to(depth).map(move |k| (h, k)))
            .collect();
        #[cfg(feature = "parallel")]
        let seqs = {
            use rayon::prelude::*;
            pairs
                .par_iter()
                .map(|&(h, k)| ((h, k), all_sequences(h, k, Grid::Half)))
                .collect::<Vec<_>>()
        };
        #[cfg(not(feature = "parallel"))]
        let seqs = pairs
            .iter()
            .map(|&(h, k)| ((h, k), all_sequences(h, k, Grid::Half)))
            .collect::<Vec<_>>();
        IndexTable {
            depth,
            seqs: seqs.into_iter().collect(),
        }
    }

    /// Rebuilds a table from stored rows, validating every sequence and
    /// completeness against a fresh enumeration.
    pub fn from_rows(
        depth: u32,
        rows: impl IntoIterator<Item = (HalfInt, HalfInt, Vec<HalfInt>)>,
    ) -> Result<Self> {
        let max = HalfInt::int(depth as i64);
        let mut seqs: BTreeMap<(HalfInt, HalfInt), Vec<Vec<HalfInt>>> = weights_up_to(depth)
            .flat_map(|h| weights_up_to(depth).map(move |k| ((h, k), Vec::new())))
            .collect();
        for (h, k, seq) in rows {
            if h < HalfInt::ZERO || k < HalfInt::ZERO || h > max || k > max {
                return Err(Error::MalformedTable(format!(
                    "weights ({h}, {k}) outside 0..{depth}"
                )));
            }
            if !is_chain(h, k, &seq) {
                let text: Vec<String> = seq.iter().map(|v| v.to_string()).collect();
                return Err(Error::MalformedTable(format!(
                    "({h}, {k}): `{}` violates the chain condition",
                    text.join(" ")
                )));
            }
            seqs.get_mut(&(h, k)).unwrap().push(seq);
        }
        for ((h, k), list) in seqs.iter_mut() {
            list.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| b.cmp(a)));
            let expected = all_sequences(*h, *k, Grid::Half);
            if *list != expected {
                return Err(Error::MalformedTable(format!(
                    "({h}, {k}): {} sequences stored, {} expected",
                    list.len(),
                    expected.len()
                )));
            }
        }
        Ok(IndexTable { depth, seqs })
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn sequences(&self, h: HalfInt, k: HalfInt) -> Option<&[Vec<HalfInt>]> {
        self.seqs.get(&(h, k)).map(Vec::as_slice)
    }

    /// Every stored row `(h, k, sequence)`, in a fixed order.
    pub fn rows(&self) -> impl Iterator<Item = (HalfInt, HalfInt, &[HalfInt])> {
        self.seqs
            .iter()
            .flat_map(|(&(h, k), v)| v.iter().map(move |s| (h, k, s.as_slice())))
    }

    pub fn len(&self) -> usize {
        self.seqs.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Whether every chain of `other` appears here.
    pub fn contains(&self, other: &IndexTable) -> bool {
        other.seqs.iter().all(|(key, list)| {
            self.seqs
                .get(key)
                .is_some_and(|mine| list.iter().all(|s| mine.contains(s)))
        })
    }

    pub fn check_depth(&self, need: HalfInt) -> Result<()> {
        if HalfInt::int(self.depth as i64) >= need {
            Ok(())
        } else {
            Err(Error::TableTooShallow {
                have: self.depth.to_string(),
                need: need.to_string(),
            })
        }
    }
}

/// `w([X, Y]♯)`, `(X|Y)` and `(s|[X, Y])` for one factor of the formula.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct Factor {
    w: DiffPoly,
    pairing: Scalar,
    s_term: Scalar,
}

type Idx = (usize, usize);

/// Options for [`WContext::new`].
#[derive(Clone, Debug)]
pub struct WOptions {
    /// Name of the pencil parameter.
    pub z: String,
    /// Name of the dispersive parameter, if any.
    pub dispersive: Option<String>,
    /// Generator names; defaults to `w1..wℓ`.
    pub gen_names: Option<Vec<String>>,
}

impl Default for WOptions {
    fn default() -> Self {
        WOptions {
            z: "z".into(),
            dispersive: None,
            gen_names: None,
        }
    }
}

/// A W-algebra `W(𝔤, f)` with its element `s ∈ 𝔤_d`.
#[derive(Clone, Debug)]
pub struct WContext {
    lie: LieContext,
    s: MatElem,
    z: Scalar,
    eps: Option<Symbol>,
    alg: Algebra,
    /// `J_{−k}` for every level `k` where it is nonempty.
    levels: BTreeMap<HalfInt, Vec<Idx>>,
    /// Middle factors keyed by `((j, n), (j', n'))`.
    mid: BTreeMap<(Idx, Idx), Factor>,
}

fn scalar_params(s: &Scalar, out: &mut Vec<String>) {
    for p in s.params() {
        if !out.iter().any(|q| **q == **p) {
            out.push(p.to_string());
        }
    }
}

impl WContext {
    /// Builds the context with the default generic `s`.
    pub fn new(lie: LieContext, opts: WOptions) -> Result<Self> {
        let ell = lie.basis.len();
        let names: Vec<String> = match opts.gen_names {
            Some(n) if n.len() == ell => n,
            Some(n) => {
                return Err(Error::InvalidConfig(format!(
                    "{} generator names given, W has {ell} generators",
                    n.len()
                )))
            }
            None => (1..=ell).map(|i| format!("w{i}")).collect(),
        };
        let mut levels: BTreeMap<HalfInt, Vec<Idx>> = BTreeMap::new();
        for (j, &d) in lie.basis.delta.iter().enumerate() {
            for n in 0..=d.twice() {
                levels
                    .entry(d - HalfInt::int(n))
                    .or_default()
                    .push((j, n as usize));
            }
        }
        let z = Scalar::param(&opts.z);
        let mut ctx = WContext {
            s: MatElem::zero(lie.alg.rep_dim()),
            lie,
            z,
            eps: opts.dispersive.as_deref().map(Symbol::from),
            alg: Algebra::new(&["w"], 1, &[])?,
            levels,
            mid: BTreeMap::new(),
        };
        let name_refs: Vec<&str> = names.iter().map(String::as_str).collect();
        ctx.alg = Algebra::new(&name_refs, 1, &[])?;
        ctx.set_s(None)?;
        Ok(ctx)
    }

    fn rebuild_algebra(&mut self) -> Result<()> {
        let mut params: Vec<String> = Vec::new();
        scalar_params(self.lie.alg.scale(), &mut params);
        scalar_params(&self.z, &mut params);
        for (_, _, v) in self.s.entries() {
            scalar_params(v, &mut params);
        }
        if let Some(e) = &self.eps {
            if !params.iter().any(|p| **p == **e) {
                params.push(e.to_string());
            }
        }
        let names: Vec<String> = self.alg.gen_names().iter().map(|s| s.to_string()).collect();
        let gens: Vec<&str> = names.iter().map(String::as_str).collect();
        let ps: Vec<&str> = params.iter().map(String::as_str).collect();
        self.alg = Algebra::new(&gens, 1, &ps)?;
        Ok(())
    }

    /// Sets `s ∈ 𝔤_d`; `None` picks `Σ s_k b_k` over a basis `b_k` of `𝔤_d`
    /// with fresh parameters `s1, s2, …`.
    pub fn set_s(&mut self, s: Option<MatElem>) -> Result<()> {
        let d = self.lie.depth;
        let s = match s {
            Some(s) => {
                if s.dim() != self.lie.alg.rep_dim() {
                    return Err(Error::BadS("wrong matrix size".into()));
                }
                if !self.lie.alg.check_alg(&s) {
                    return Err(Error::BadS("s is not in g".into()));
                }
                if !self.lie.is_eigenvector(&s, d) {
                    return Err(Error::BadS(format!("[x, s] ≠ {d}·s")));
                }
                s
            }
            None => {
                let piece = self.lie.graded_piece(d);
                let mut s = MatElem::zero(self.lie.alg.rep_dim());
                let single = piece.len() == 1;
                for (k, b) in piece.iter().enumerate() {
                    let name = if single {
                        "s".to_string()
                    } else {
                        format!("s{}", k + 1)
                    };
                    s = &s + &b.scale(&Scalar::param(&name));
                }
                s
            }
        };
        self.s = s;
        self.rebuild_algebra()?;
        self.mid = self.middle_factors();
        Ok(())
    }

    pub fn s(&self) -> &MatElem {
        &self.s
    }

    pub fn lie(&self) -> &LieContext {
        &self.lie
    }

    /// The differential algebra generated by the `w_j`.
    pub fn algebra(&self) -> &Algebra {
        &self.alg
    }

    pub fn generator_count(&self) -> usize {
        self.lie.basis.len()
    }

    /// Conformal weights `Δ_j = 1 + δ(j)`.
    pub fn weights(&self) -> Vec<HalfInt> {
        self.lie
            .basis
            .delta
            .iter()
            .map(|&d| HalfInt::ONE + d)
            .collect()
    }

    pub fn z(&self) -> &Scalar {
        &self.z
    }

    /// `w(a) = Σ_j (a|q^j) w_j`, the image of `π_{𝔤^f}(a)`.
    pub fn w_map(&self, a: &MatElem) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (j, qd) in self.lie.basis.qdual.iter().enumerate() {
            let c = self.lie.alg.form(a, qd);
            if !c.is_zero() {
                out += &self.alg.gen(j).scale(&c);
            }
        }
        out
    }

    fn factor(&self, x: &MatElem, y: &MatElem) -> Factor {
        let c = x.comm(y);
        Factor {
            w: self.w_map(&c),
            pairing: self.lie.alg.form(x, y),
            s_term: self.lie.alg.form(&self.s, &c),
        }
    }

    /// `q_j^{n+1}`, zero past the top of the string.
    fn down_next(&self, (j, n): Idx) -> Option<&MatElem> {
        self.lie.basis.down[j].get(n + 1)
    }

    fn up(&self, (j, n): Idx) -> &MatElem {
        &self.lie.basis.up[j][n]
    }

    fn middle_factors(&self) -> BTreeMap<(Idx, Idx), Factor> {
        let mut out = BTreeMap::new();
        for (&k1, l1) in &self.levels {
            for (&k2, l2) in &self.levels {
                if k2 > k1 - HalfInt::ONE {
                    continue;
                }
                for &e1 in l1 {
                    let Some(x) = self.down_next(e1) else {
                        continue;
                    };
                    for &e2 in l2 {
                        out.insert((e1, e2), self.factor(x, self.up(e2)));
                    }
                }
            }
        }
        out
    }

    fn constant_part(&self, f: &Factor) -> DiffPoly {
        &f.w + &DiffPoly::constant(&self.z * &f.s_term)
    }

    /// `(A − β(λ+∂)) R` with `A = w + z·s_term` and `β` the pairing.
    fn compose(&self, f: &Factor, r: &LambdaExpr) -> LambdaExpr {
        let mut out = r.mul_poly(&self.constant_part(f));
        if !f.pairing.is_zero() {
            let mut shifted = r.mul_exps(&[1]);
            shifted += &r.map_coefficients(|p| self.alg.derivative_unchecked(p, 0));
            out -= &shifted.scale(&f.pairing);
        }
        out
    }

    /// The last factor `w([X, a]♯) − (X|a)λ + z(s|[X, a])`.
    fn last(&self, e: Idx, a: &MatElem) -> LambdaExpr {
        let Some(x) = self.down_next(e) else {
            return LambdaExpr::zero();
        };
        let f = self.factor(x, a);
        let mut out = LambdaExpr::constant(self.constant_part(&f));
        out -= &LambdaExpr::var(0).scale(&f.pairing);
        out
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i < self.generator_count() {
            Ok(())
        } else {
            Err(Error::GeneratorOutOfRange {
                index: i,
                count: self.generator_count(),
            })
        }
    }

    /// `w([a,b]) + (a|b)λ + z(s|[a,b])`.
    fn leading(&self, a: &MatElem, b: &MatElem) -> LambdaExpr {
        let f = self.factor(a, b);
        LambdaExpr::constant(self.constant_part(&f)) + LambdaExpr::var(0).scale(&f.pairing)
    }

    /// `{w_i λ w_j}`.
    pub fn bracket_generators(&self, i: usize, j: usize, table: &IndexTable) -> Result<LambdaExpr> {
        self.check_index(i)?;
        self.check_index(j)?;
        table.check_depth(self.lie.depth)?;
        let basis = &self.lie.basis;
        let (a, b) = (&basis.q[i], &basis.q[j]);
        let (h, k) = (basis.delta[i], basis.delta[j]);
        let chains = table
            .sequences(h, k)
            .ok_or_else(|| Error::TableTooShallow {
                have: table.depth().to_string(),
                need: h.max(k).to_string(),
            })?;
        let mut memo: BTreeMap<(Idx, SmallVec<[HalfInt; 8]>), LambdaExpr> = BTreeMap::new();
        let mut correction = LambdaExpr::zero();
        for chain in chains {
            if chain.iter().any(|k| !self.levels.contains_key(k)) {
                continue;
            }
            for &e1 in &self.levels[&chain[0]] {
                let first = self.factor(b, self.up(e1));
                let rest = self.suffix_value(e1, &chain[1..], a, &mut memo);
                correction += &self.compose(&first, &rest);
            }
        }
        let out = self.leading(a, b) - correction;
        Ok(self.disperse(out))
    }

    /// `V(e, K)`: the product of the remaining factors after choosing `e`,
    /// with the remaining levels `K`.
    fn suffix_value(
        &self,
        e: Idx,
        rest: &[HalfInt],
        a: &MatElem,
        memo: &mut BTreeMap<(Idx, SmallVec<[HalfInt; 8]>), LambdaExpr>,
    ) -> LambdaExpr {
        let key = (e, SmallVec::from_slice(rest));
        if let Some(v) = memo.get(&key) {
            return v.clone();
        }
        let value = match rest.split_first() {
            None => self.last(e, a),
            Some((&k, tail)) => {
                let mut acc = LambdaExpr::zero();
                for &e2 in &self.levels[&k] {
                    let Some(f) = self.mid.get(&(e, e2)) else {
                        continue;
                    };
                    if f.w.is_zero() && f.pairing.is_zero() && f.s_term.is_zero() {
                        continue;
                    }
                    let v = self.suffix_value(e2, tail, a, memo);
                    acc += &self.compose(f, &v);
                }
                acc
            }
        };
        memo.insert(key, value.clone());
        value
    }

    /// Reference evaluation by the recursion over levels, without a table.
    pub fn bracket_generators_recursive(&self, i: usize, j: usize) -> Result<LambdaExpr> {
        self.check_index(i)?;
        self.check_index(j)?;
        let basis = &self.lie.basis;
        let (a, b) = (&basis.q[i], &basis.q[j]);
        let (h, k) = (basis.delta[i], basis.delta[j]);
        let lo = HalfInt::ONE - h;
        let mut memo: BTreeMap<Idx, LambdaExpr> = BTreeMap::new();
        let mut correction = LambdaExpr::zero();
        let levels = if lo <= k {
            Some(self.levels.range(lo..=k))
        } else {
            None
        };
        for (&k1, l1) in levels.into_iter().flatten() {
            for &e1 in l1 {
                let first = self.factor(b, self.up(e1));
                let rest = self.tail_sum(e1, k1, lo, a, &mut memo);
                correction += &self.compose(&first, &rest);
            }
        }
        Ok(self.disperse(self.leading(a, b) - correction))
    }

    /// `S(e) = Last(e) + Σ_{e' below} Mid(e, e') ∘ S(e')`.
    fn tail_sum(
        &self,
        e: Idx,
        level: HalfInt,
        lo: HalfInt,
        a: &MatElem,
        memo: &mut BTreeMap<Idx, LambdaExpr>,
    ) -> LambdaExpr {
        if let Some(v) = memo.get(&e) {
            return v.clone();
        }
        let mut acc = self.last(e, a);
        let top = level - HalfInt::ONE;
        if top >= lo {
            for (&k2, l2) in self.levels.range(lo..=top) {
                for &e2 in l2 {
                    if let Some(f) = self.mid.get(&(e, e2)) {
                        let v = self.tail_sum(e2, k2, lo, a, memo);
                        acc += &self.compose(f, &v);
                    }
                }
            }
        }
        memo.insert(e, acc.clone());
        acc
    }

    /// The full Poisson structure: entry `(i, j)` is `{w_i λ w_j}`.
    pub fn generate_h(&self, table: &IndexTable) -> Result<BracketMatrix> {
        let ell = self.generator_count();
        let pairs: Vec<(usize, usize)> = (0..ell)
            .flat_map(|i| (0..ell).map(move |j| (i, j)))
            .collect();
        #[cfg(feature = "parallel")]
        let entries = {
            use rayon::prelude::*;
            pairs
                .par_iter()
                .map(|&(i, j)| self.bracket_generators(i, j, table))
                .collect::<Result<Vec<_>>>()?
        };
        #[cfg(not(feature = "parallel"))]
        let entries = pairs
            .iter()
            .map(|&(i, j)| self.bracket_generators(i, j, table))
            .collect::<Result<Vec<_>>>()?;
        let mut rows = Vec::with_capacity(ell);
        let mut it = entries.into_iter();
        for _ in 0..ell {
            rows.push(it.by_ref().take(ell).collect());
        }
        BracketMatrix::from_rows(rows)
    }

    /// `L = w(f) + ½ Σ_{j ∈ J^f_0} w(q_j) w(q^j)`.
    pub fn virasoro(&self) -> DiffPoly {
        let basis = &self.lie.basis;
        let mut l0 = DiffPoly::zero();
        for (j, d) in basis.delta.iter().enumerate() {
            if *d == HalfInt::ZERO {
                l0 += &(&self.alg.gen(j) * &self.w_map(&basis.qdual[j]));
            }
        }
        let half = Scalar::from_rational(crate::scalar::rat(1, 2));
        &self.w_map(&self.lie.triple.f) + &l0.scale(&half)
    }

    /// Multiplies each term by `ε^(λ-degree + number of derivatives)`.
    fn disperse(&self, e: LambdaExpr) -> LambdaExpr {
        let Some(eps) = &self.eps else { return e };
        let eps = Scalar::param(eps);
        let mut out = LambdaExpr::zero();
        for (ex, p) in e.terms() {
            let lam: u32 = ex.iter().sum();
            let mut q = DiffPoly::zero();
            for (m, c) in p.terms() {
                let w = lam + m.derivative_count();
                q.add_term(m.clone(), &(c * &eps.pow(w)));
            }
            out.add_term(ex, &q);
        }
        out
    }
}
