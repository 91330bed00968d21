//! Randomized checks of the λ-bracket axioms, the graded bases and the
//! generated W-algebra brackets, shared by the property suites.

#![allow(dead_code)]

use std::sync::OnceLock;

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use pva_core::lambda::{bracket, jacobi_expr, shift_substitute, BracketMatrix};
use pva_core::liealg::{HalfInt, LieAlgebra, LieContext, LieType, MatElem};
use pva_core::scalar::rat;
use pva_core::walg::{IndexTable, WContext, WOptions};
use pva_core::{Algebra, DiffPoly, LambdaExpr, Monomial, Scalar};

pub type Outcome = Result<(), TestCaseError>;

pub fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 100,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

// ---- λ-bracket structures ----

pub struct Structure {
    alg: Algebra,
    h: BracketMatrix,
}

/// GFZ + z·Virasoro–Magri on one generator.
fn kdv() -> &'static Structure {
    static S: OnceLock<Structure> = OnceLock::new();
    S.get_or_init(|| {
        let alg = Algebra::new(&["u"], 1, &["c", "z"]).unwrap();
        let u = alg.gen(0);
        let lam = LambdaExpr::var(0);
        let vm = LambdaExpr::constant(alg.var1(0, 1))
            + lam.mul_poly(&u.scale(&Scalar::from_int(2)))
            + lam.pow(3).scale(&Scalar::param("c"));
        let h = BracketMatrix::from_rows(vec![vec![lam + vm.scale(&Scalar::param("z"))]]).unwrap();
        Structure { alg, h }
    })
}

/// The W-algebra of 𝔰𝔩₃ with principal nilpotent.
fn boussinesq() -> &'static Structure {
    static S: OnceLock<Structure> = OnceLock::new();
    S.get_or_init(|| {
        let g = LieAlgebra::new(LieType::A, 2).unwrap();
        let f = g.principal_nilpotent();
        let w = WContext::new(LieContext::new(g, &f).unwrap(), WOptions::default()).unwrap();
        let h = w.generate_h(&IndexTable::generate(2)).unwrap();
        Structure {
            alg: w.algebra().clone(),
            h,
        }
    })
}

fn structure(which: bool) -> &'static Structure {
    if which {
        boussinesq()
    } else {
        kdv()
    }
}

pub type PolySpec = Vec<(i64, Vec<(usize, u32)>)>;

/// Up to three terms, each a small integer times at most two derivative
/// variables of order ≤ 2.
pub fn poly_strategy() -> impl Strategy<Value = PolySpec> {
    prop::collection::vec(
        (-3i64..=3, prop::collection::vec((0usize..2, 0u32..3), 0..3)),
        1..4,
    )
}

fn build(alg: &Algebra, terms: &[(i64, Vec<(usize, u32)>)]) -> DiffPoly {
    let mut p = DiffPoly::zero();
    for (c, factors) in terms {
        let mut m = Monomial::one();
        for &(g, n) in factors {
            m = m.mul(&Monomial::var(alg.key(g % alg.gen_count(), &[n]).unwrap()));
        }
        p.add_term(m, &Scalar::from_int(*c));
    }
    p
}

fn lam_of(p: &DiffPoly) -> LambdaExpr {
    LambdaExpr::constant(p.clone())
}

fn br(s: &Structure, a: &DiffPoly, b: &DiffPoly) -> LambdaExpr {
    bracket(&s.alg, &lam_of(a), &lam_of(b), &s.h, 0).unwrap()
}

fn d(alg: &Algebra, p: &DiffPoly) -> DiffPoly {
    alg.total_derivative(p, 0).unwrap()
}

/// `(λ+∂)E`.
fn lambda_plus_d(alg: &Algebra, e: &LambdaExpr) -> LambdaExpr {
    e.mul_exps(&[1]) + e.map_coefficients(|p| d(alg, p))
}

/// `E_{λ+∂} c` with `∂` acting on `c`: `Σ p_n (λ+∂)^n c`.
fn act_right(alg: &Algebra, e: &LambdaExpr, c: &DiffPoly) -> LambdaExpr {
    let mut out = LambdaExpr::zero();
    for (exps, p) in e.terms() {
        let n = exps.first().copied().unwrap_or(0);
        let mut binom = Scalar::one();
        let mut dk = c.clone();
        for k in 0..=n {
            out += &LambdaExpr::monomial(&[n - k], (p * &dk).scale(&binom));
            dk = d(alg, &dk);
            binom = binom.scale(&rat(i64::from(n - k), i64::from(k + 1)));
        }
    }
    out
}

pub fn sesquilinearity(which: bool, a: &PolySpec, b: &PolySpec) -> Outcome {
    let s = structure(which);
    let (a, b) = (build(&s.alg, a), build(&s.alg, b));
    let ab = br(s, &a, &b);
    prop_assert_eq!(br(s, &d(&s.alg, &a), &b), -ab.mul_exps(&[1]));
    prop_assert_eq!(br(s, &a, &d(&s.alg, &b)), lambda_plus_d(&s.alg, &ab));
    Ok(())
}

pub fn leibniz_rules(which: bool, a: &PolySpec, b: &PolySpec, c: &PolySpec) -> Outcome {
    let s = structure(which);
    let alg = &s.alg;
    let (a, b, c) = (build(alg, a), build(alg, b), build(alg, c));
    let left = br(s, &a, &b).mul_poly(&c) + br(s, &a, &c).mul_poly(&b);
    prop_assert_eq!(br(s, &a, &(&b * &c)), left);
    let right = act_right(alg, &br(s, &a, &c), &b) + act_right(alg, &br(s, &b, &c), &a);
    prop_assert_eq!(br(s, &(&a * &b), &c), right);
    Ok(())
}

pub fn skew_on_generators_extends(which: bool, a: &PolySpec, b: &PolySpec) -> Outcome {
    let s = structure(which);
    let (a, b) = (build(&s.alg, a), build(&s.alg, b));
    let moved = br(s, &b, &a).remap_slots(|x| x + 1);
    let r = br(s, &a, &b) + shift_substitute(&s.alg, &moved, &[0, 1]).unwrap();
    prop_assert!(r.is_zero());
    Ok(())
}

pub fn jacobi_on_generators_extends(a: &PolySpec, b: &PolySpec, c: &PolySpec) -> Outcome {
    let s = kdv();
    let (a, b, c) = (build(&s.alg, a), build(&s.alg, b), build(&s.alg, c));
    prop_assert!(jacobi_expr(&s.alg, &a, &b, &c, &s.h).unwrap().is_zero());
    Ok(())
}

// ---- Lie contexts ----

/// A₂ principal, A₂ minimal, A₃ subregular, B₂ principal, C₂ minimal and
/// G₂ principal.
pub fn contexts() -> &'static [WContext] {
    static C: OnceLock<Vec<WContext>> = OnceLock::new();
    C.get_or_init(|| {
        let one = Scalar::one();
        type Case = (LieType, usize, Option<&'static [(usize, usize)]>);
        let cases: [Case; 6] = [
            (LieType::A, 2, None),
            (LieType::A, 2, Some(&[(2, 0)])),
            (LieType::A, 3, Some(&[(1, 0), (2, 1)])),
            (LieType::B, 2, None),
            (LieType::C, 2, Some(&[(3, 0)])),
            (LieType::G, 2, None),
        ];
        cases
            .into_iter()
            .map(|(ty, rank, f)| {
                let g = LieAlgebra::new(ty, rank).unwrap();
                let f = match f {
                    None => g.principal_nilpotent(),
                    Some(e) => {
                        let e: Vec<_> = e.iter().map(|&(i, j)| (i, j, one.clone())).collect();
                        MatElem::from_sparse(g.rep_dim(), &e).unwrap()
                    }
                };
                WContext::new(LieContext::new(g, &f).unwrap(), WOptions::default()).unwrap()
            })
            .collect()
    })
}

fn random_element(g: &LieAlgebra, coeffs: &[i64]) -> MatElem {
    let mut a = MatElem::zero(g.rep_dim());
    for (b, &c) in g.basis().iter().zip(coeffs.iter().cycle()) {
        a = &a + &b.scale(&Scalar::from_int(c));
    }
    a
}

pub fn projector_identities(ctx: usize, coeffs: &[i64]) -> Outcome {
    let lie = contexts()[ctx].lie();
    let g = &lie.alg;
    let a = random_element(g, coeffs);
    let p = lie.basis.project(g, &a);
    prop_assert_eq!(&p.g_f + &p.e_g, a.clone());
    prop_assert_eq!(&p.g_e + &p.f_g, a);
    prop_assert!(lie.triple.f.comm(&p.g_f).is_zero());
    prop_assert!(lie.triple.e.comm(&p.g_e).is_zero());
    prop_assert_eq!(lie.basis.project(g, &p.g_f).g_f, p.g_f.clone());
    prop_assert!(lie.basis.project(g, &p.e_g).g_f.is_zero());
    Ok(())
}

pub fn basis_duality(ctx: usize, picks: &[usize]) -> Outcome {
    let lie = contexts()[ctx].lie();
    let b = &lie.basis;
    let i = picks[0] % b.len();
    let j = picks[1] % b.len();
    let n = picks[2] % b.up[i].len();
    let m = picks[3] % b.down[j].len();
    let pairing = lie.alg.trace_form(&b.up[i][n], &b.down[j][m]).unwrap();
    let want = if (i, n) == (j, m) {
        Scalar::one()
    } else {
        Scalar::zero()
    };
    prop_assert_eq!(pairing, want);
    let k = b.delta[i] - HalfInt::int(n as i64);
    prop_assert!(lie.is_eigenvector(&b.up[i][n], k));
    Ok(())
}

fn table() -> &'static IndexTable {
    static T: OnceLock<IndexTable> = OnceLock::new();
    T.get_or_init(|| IndexTable::generate(3))
}

/// A random element of `𝔤_d` with small rational coefficients.
fn random_s(w: &WContext, coeffs: &[(i64, i64)]) -> MatElem {
    let lie = w.lie();
    let mut s = MatElem::zero(lie.alg.rep_dim());
    for (b, &(p, q)) in lie
        .graded_piece(lie.depth)
        .iter()
        .zip(coeffs.iter().cycle())
    {
        s = &s + &b.scale(&Scalar::from_rational(rat(p, q)));
    }
    s
}

pub fn generated_brackets_are_linear_in_z(ctx: usize, coeffs: &[(i64, i64)]) -> Outcome {
    let mut w = contexts()[ctx].clone();
    w.set_s(Some(random_s(&w, coeffs))).unwrap();
    let h = w.generate_h(table()).unwrap();
    for (_, _, e) in h.entries() {
        for (_, p) in e.terms() {
            for (_, c) in p.terms() {
                prop_assert!(c.degree_in("z").unwrap_or(0) <= 1);
            }
        }
    }
    Ok(())
}

pub fn table_and_recursion_agree(ctx: usize, picks: &[usize]) -> Outcome {
    let w = &contexts()[ctx];
    let n = w.generator_count();
    let (i, j) = (picks[0] % n, picks[1] % n);
    prop_assert_eq!(
        w.bracket_generators(i, j, table()).unwrap(),
        w.bracket_generators_recursive(i, j).unwrap()
    );
    Ok(())
}
