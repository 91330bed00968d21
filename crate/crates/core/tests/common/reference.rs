//! Closed forms of the rank-two principal W-algebra brackets, and helpers to
//! compare generated structures with them.

#![allow(dead_code)]

use pva_core::lambda::BracketMatrix;
use pva_core::liealg::{LieAlgebra, LieContext, LieType, MatElem};
use pva_core::text::{lambda_to_text, parse_lambda, parse_poly};
use pva_core::walg::{IndexTable, WContext, WOptions};
use pva_core::{Algebra, DiffPoly, Formal, LambdaExpr, Scalar};

/// Principal W-algebra of `(ty, 2)` with `s = Σ scale·E_{ij}` over `s`.
pub fn principal(ty: LieType, s: &[(usize, usize)], scale: Scalar) -> WContext {
    let alg = LieAlgebra::new(ty, 2).unwrap();
    let f = alg.principal_nilpotent();
    let lie = LieContext::new(alg, &f).unwrap();
    let n = lie.alg.rep_dim();
    let mut w = WContext::new(lie, WOptions::default()).unwrap();
    let entries: Vec<_> = s.iter().map(|&(i, j)| (i, j, scale.clone())).collect();
    w.set_s(Some(MatElem::from_sparse(n, &entries).unwrap()))
        .unwrap();
    w
}

pub fn generate(w: &WContext) -> BracketMatrix {
    let depth = ((w.lie().depth.twice() + 1) / 2) as u32;
    w.generate_h(&IndexTable::generate(depth)).unwrap()
}

pub fn lam(alg: &Algebra, s: &str) -> LambdaExpr {
    parse_lambda(alg, &Formal::standard(1), s).unwrap()
}

pub fn text(alg: &Algebra, e: &LambdaExpr) -> String {
    lambda_to_text(alg, &Formal::standard(1), e)
}

/// `Σ_k (2λ+∂)^k P_k`.
pub fn odd_ops(alg: &Algebra, parts: &[(u32, &str)]) -> LambdaExpr {
    let mut out = LambdaExpr::zero();
    for &(k, t) in parts {
        let mut e = LambdaExpr::constant(parse_poly(alg, t).unwrap());
        for _ in 0..k {
            let d = e.map_coefficients(|p| alg.total_derivative(p, 0).unwrap());
            e = &e.mul_exps(&[1]).scale(&Scalar::from_int(2)) + &d;
        }
        out += &e;
    }
    out
}

/// `{w_j λ w_i}` from `{w_i λ w_j}` by skew-symmetry.
pub fn skew_partner(alg: &Algebra, e: &LambdaExpr) -> LambdaExpr {
    let m = BracketMatrix::from_rows(vec![
        vec![LambdaExpr::zero(), e.clone()],
        vec![LambdaExpr::zero(), LambdaExpr::zero()],
    ])
    .unwrap();
    // the skew residual of [[0, e], [0, 0]] has (1, 0) entry equal to the
    // partner of e
    let r = pva_core::lambda::skew_residual(alg, &m).unwrap();
    -r.entry(1, 0).clone()
}

pub fn matrix2(alg: &Algebra, e11: LambdaExpr, e12: LambdaExpr, e22: LambdaExpr) -> BracketMatrix {
    let e21 = skew_partner(alg, &e12);
    BracketMatrix::from_rows(vec![vec![e11, e12], vec![e21, e22]]).unwrap()
}

/// Replaces the generator `gen` by `k·gen` everywhere.
pub fn rescale_generator(p: &DiffPoly, gen: usize, k: &Scalar) -> DiffPoly {
    let mut out = DiffPoly::zero();
    for (m, c) in p.terms() {
        let deg: u32 = m
            .vars()
            .iter()
            .filter(|(key, _)| key.gen == gen)
            .map(|(_, e)| e)
            .sum();
        out.add_term(m.clone(), &(c * &k.pow(deg)));
    }
    out
}

/// The structure in the variables `W_gen = k·w_gen`: entries involving
/// `W_gen` are multiplied by `k` per occurrence and `w_gen` is replaced by
/// `W_gen / k`.
pub fn change_scale(h: &BracketMatrix, gen: usize, k: &Scalar) -> BracketMatrix {
    let inv = k.inverse().unwrap();
    let mut out = h.clone();
    for (i, j, e) in h.entries() {
        let outer = [i, j].iter().filter(|&&x| x == gen).count() as u32;
        let f = k.pow(outer);
        let v = e.map_coefficients(|p| rescale_generator(p, gen, &inv).scale(&f));
        out.set(i, j, v);
    }
    out
}

pub fn substitute_c(h: &BracketMatrix, value: &Scalar) -> BracketMatrix {
    h.try_map(|e| e.try_map_coefficients(|p| p.substitute_param("c", value)))
        .unwrap()
}

/// The printed sl₃ brackets; `fixed` uses `λ⁵` for the constant term of
/// `{w2 λ w2}` in place of the printed `λ³`.
pub fn a2(alg: &Algebra, fixed: bool) -> BracketMatrix {
    let mut e22 = odd_ops(alg, &[(1, "w1^2/(3*c) - 1/16*w1''"), (3, "-5/(2^4*3)*w1")]);
    e22 += &lam(
        alg,
        if fixed {
            "c/6*lambda^5"
        } else {
            "c/6*lambda^3"
        },
    );
    matrix2(
        alg,
        lam(alg, "2*lambda*w1 + w1' - 2*c*lambda^3"),
        lam(alg, "3*lambda*w2 + w2' + 3*c*z*lambda"),
        e22,
    )
}

pub fn b2(alg: &Algebra) -> BracketMatrix {
    let mut e22 = odd_ops(
        alg,
        &[
            (
                1,
                "2^2*3^2/(5^4*c^2)*w1^3 + 7/(5^2*c)*w1*w2 - 1/(2^2*5^3*c)*w1'^2 \
                 - 29/(2*5^3*c)*w1*w1'' - 1/(2^2*5)*w2'' + 3/(2^3*5^2)*d[4]w1",
            ),
            (3, "-7^2/(2^2*5^3*c)*w1^2 - 3/(2^2*5)*w2 + 7/(2^2*5^2)*w1''"),
            (5, "7/(2^3*5^2)*w1"),
            (1, "z*2*7/5^2*w1"),
        ],
    );
    e22 += &lam(alg, "-2*c/5*lambda^7 - z*2^2*3*c/5*lambda^3");
    matrix2(
        alg,
        lam(alg, "2*lambda*w1 + w1' - 10*c*lambda^3"),
        lam(alg, "4*lambda*w2 + w2' + 8*c*z*lambda"),
        e22,
    )
}

/// Which misprints of the printed G₂ brackets to correct.
#[derive(Clone, Copy, Debug)]
pub struct G2Fixes {
    /// `(6λ+∂)w2` in `{w1 λ w2}` in place of the printed `(6λ+∂)w1`.
    pub mixed_generator: bool,
    /// `3·5·67` in `P₁` in place of the printed `3·5·6·7`.
    pub p1_sixty_seven: bool,
    /// `3³·11·43` for `(w1'')²` in `P₃` in place of the printed `3³·11·49`.
    pub p3_forty_three: bool,
    /// `2⁵7⁵` for the `w1⁴` denominator in `P₃` in place of the printed `2⁸7⁴`.
    pub p3_quartic: bool,
    /// The `z`-part of `{w2 λ w2}` multiplied by 24, matching the `144cz`
    /// of `{w1 λ w2}`.
    pub z_block: bool,
}

impl G2Fixes {
    pub const ALL: G2Fixes = G2Fixes {
        mixed_generator: true,
        p1_sixty_seven: true,
        p3_forty_three: true,
        p3_quartic: true,
        z_block: true,
    };
    pub const NONE: G2Fixes = G2Fixes {
        mixed_generator: false,
        p1_sixty_seven: false,
        p3_forty_three: false,
        p3_quartic: false,
        z_block: false,
    };
}

/// The printed G₂ brackets in the generators `w1, W` (named `w2`).
pub fn g2(alg: &Algebra, fix: G2Fixes) -> BracketMatrix {
    let sixty_seven = if fix.p1_sixty_seven {
        "3*5*67"
    } else {
        "3*5*6*7"
    };
    let p1 = format!(
        "3^3*5^2/(7^6*c^4)*w1^5 - 11*13/(2*7^3*c^2)*w1^2*w2 \
        - 3*61/(2^5*7^4*c^3)*w1^2*w1'^2 + 5/(2^3*7^2*c)*w1'*w2' \
        - 3*769/(2*7^5*c^3)*w1^3*w1'' + 3*29/(2^3*7^2*c)*w2*w1'' \
        + 3^2*11*19/(2^8*7^4*c^2)*w1'^2*w1'' + 3^2*23*97/(2^6*7^4*c^2)*w1*w1''^2 \
        + 5/(2^3*7*c)*w1*w2'' + 3*347/(2^7*7^4*c^2)*w1*w1'*w1''' \
        - 3^2/(2^8*7^2*c)*w1'''^2 + 3*9551/(2^8*7^4*c^2)*w1^2*d[4]w1 \
        - 3^2*607/(2^8*7^3*c)*w1''*d[4]w1 - 1/(2^4*7)*d[4]w2 \
        - 3^2*5/(2^8*7^3*c)*w1'*d[5]w1 - {sixty_seven}/(2^8*7^3*c)*w1*d[6]w1 \
        + 3^2*5/(2^10*7^2)*d[8]w1"
    );
    let quartic = if fix.p3_quartic { "2^5*7^5" } else { "2^8*7^4" };
    let forty_three = if fix.p3_forty_three { "43" } else { "49" };
    let p3 = format!(
        "-3*11*479/({quartic}*c^3)*w1^4 + 5*31/(2^3*7^2*c)*w1*w2 \
        + 3*5*11*19/(2^8*7^4*c^2)*w1*w1'^2 + 3*11*23*89/(2^7*7^4*c^2)*w1^2*w1'' \
        - 3^3*11*{forty_three}/(2^8*7^3*c)*w1''^2 - 5/(2^3*7)*w2'' \
        - 3*5*11/(2^7*7^3*c)*w1'*w1''' - 3*5^2*11^2/(2^8*7^3*c)*w1*d[4]w1 \
        + 3*5*11/(2^8*7^2)*d[6]w1"
    );
    let p5 = "3*5*11*139/(2^8*7^4*c^2)*w1^3 - 13/(2^4*7)*w2 - 3^3*11/(2^9*7^3*c)*w1'^2 \
        - 3^3*11*43/(2^8*7^3*c)*w1*w1'' + 3^4*11/(2^9*7^2)*d[4]w1";
    let p7 = "-3^2*11*31/(2^9*7^3*c)*w1^2 + 3^3*11/(2^8*7^2)*w1''";
    let p9 = "3*5*11/(2^10*7^2)*w1";
    let q1 = "-11*13/(2*7^3*c)*w1^2 + 3*29/(2^3*7^2)*w1''";
    let q3 = "5*31/(2^3*7^2)*w1";
    let mut e22 = odd_ops(alg, &[(1, &p1), (3, &p3), (5, p5), (7, p7), (9, p9)]);
    e22 += &lam(alg, "-3*c/7*lambda^11");
    let mut zpart = odd_ops(alg, &[(1, q1), (3, q3)]);
    zpart += &lam(alg, "-26*c/7*lambda^5");
    let z = Scalar::param("z");
    let z = if fix.z_block {
        z.scale(&pva_core::scalar::int(24))
    } else {
        z
    };
    e22 += &zpart.scale(&z);
    let mixed = if fix.mixed_generator {
        "6*lambda*w2 + w2' + 144*c*z*lambda"
    } else {
        "6*lambda*w1 + w1' + 144*c*z*lambda"
    };
    matrix2(
        alg,
        lam(alg, "2*lambda*w1 + w1' - 28*c*lambda^3"),
        lam(alg, mixed),
        e22,
    )
}

/// Entrywise difference, printed; empty when equal.
pub fn differences(alg: &Algebra, got: &BracketMatrix, want: &BracketMatrix) -> Vec<String> {
    let mut out = Vec::new();
    for (i, j, e) in got.entries() {
        let d = e - want.entry(i, j);
        if !d.is_zero() {
            out.push(format!("({}, {}): {}", i + 1, j + 1, text(alg, &d)));
        }
    }
    out
}
