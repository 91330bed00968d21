//! Brackets of hydrodynamic type with generic coefficient functions.

#![allow(dead_code)]

use pva_core::diffpoly::Monomial;
use pva_core::lambda::{BracketMatrix, Condition};
use pva_core::{Algebra, DiffPoly, LambdaExpr, Scalar};

fn gen_name(i: usize) -> String {
    format!("u{}", i + 1)
}

fn g_name(i: usize, j: usize) -> String {
    format!("g{}{}", i + 1, j + 1)
}

fn b_name(k: usize, i: usize, j: usize) -> String {
    format!("b{}_{}{}", k + 1, i + 1, j + 1)
}

/// `N = 2`, `D = 1`, with function symbols `gIJ` and `bK_IJ` of `u1, u2`
/// for all indices.
pub fn hydro_algebra() -> Algebra {
    let mut a = Algebra::new(&["u1", "u2"], 1, &[]).unwrap();
    let mut names = Vec::new();
    for i in 0..2 {
        for j in 0..2 {
            names.push(g_name(i, j));
            for k in 0..2 {
                names.push(b_name(k, i, j));
            }
        }
    }
    for n in names {
        a = a.with_function(&n, &["u1", "u2"]).unwrap();
    }
    a
}

fn f(a: &Algebra, name: &str) -> DiffPoly {
    a.func(name, &[]).unwrap()
}

/// `∂g/∂u_k` of a function symbol.
fn df(a: &Algebra, name: &str, k: usize) -> DiffPoly {
    a.func(name, &[&gen_name(k)]).unwrap()
}

/// Coefficients `(g, b)` with `g[i][j]` and `b[k][i][j]`.
pub struct Hydro {
    pub g: Vec<Vec<DiffPoly>>,
    pub b: Vec<Vec<Vec<DiffPoly>>>,
}

impl Hydro {
    pub fn generic(a: &Algebra) -> Hydro {
        Hydro {
            g: (0..2)
                .map(|i| (0..2).map(|j| f(a, &g_name(i, j))).collect())
                .collect(),
            b: (0..2)
                .map(|k| {
                    (0..2)
                        .map(|i| (0..2).map(|j| f(a, &b_name(k, i, j))).collect())
                        .collect()
                })
                .collect(),
        }
    }

    /// `g` symmetric and `b^k_ij + b^k_ji = ∂g_ij/∂u_k`, keeping `g11, g12,
    /// g22` and `b^k_12` free.
    pub fn skew(a: &Algebra) -> Hydro {
        let half = Scalar::from_rational(pva_core::scalar::rat(1, 2));
        let g = |i: usize, j: usize| f(a, &g_name(i.min(j), i.max(j)));
        let b = |k: usize, i: usize, j: usize| {
            let gname = g_name(i.min(j), i.max(j));
            if i == j {
                df(a, &gname, k).scale(&half)
            } else if i < j {
                f(a, &b_name(k, i, j))
            } else {
                df(a, &gname, k) - f(a, &b_name(k, j, i))
            }
        };
        Hydro {
            g: (0..2).map(|i| (0..2).map(|j| g(i, j)).collect()).collect(),
            b: (0..2)
                .map(|k| {
                    (0..2)
                        .map(|i| (0..2).map(|j| b(k, i, j)).collect())
                        .collect()
                })
                .collect(),
        }
    }

    /// `{u_i λ u_j} = g_ji λ + b^k_ji u_k'`.
    pub fn matrix(&self, a: &Algebra) -> BracketMatrix {
        let rows = (0..2)
            .map(|i| {
                (0..2)
                    .map(|j| {
                        let mut e = LambdaExpr::monomial(&[1], self.g[j][i].clone());
                        for k in 0..2 {
                            e += &LambdaExpr::constant(&self.b[k][j][i] * &a.var1(k, 1));
                        }
                        e
                    })
                    .collect()
            })
            .collect();
        BracketMatrix::from_rows(rows).unwrap()
    }

    /// `g_ia β^a_kj − g_ja β^a_ki`, where `β^a_kj = b^a_jk` is the
    /// coefficient of `u_a'` in `{u_k λ u_j}`.
    pub fn torsion(&self, i: usize, j: usize, k: usize) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for a in 0..2 {
            out = out + &self.g[i][a] * &self.b[a][j][k] - &self.g[j][a] * &self.b[a][i][k];
        }
        out
    }
}

/// `N = 1`, `D = 3`, with function symbols `a1..a3`, `b1..b3` of `u` and
/// parameters `c1..c3`.
pub fn mokhov_algebra() -> Algebra {
    let mut a = Algebra::new(&["u"], 3, &["c1", "c2", "c3"]).unwrap();
    for n in ["a1", "a2", "a3", "b1", "b2", "b3", "g"] {
        a = a.with_function(n, &["u"]).unwrap();
    }
    a
}

/// `Σ_α a_α λ_α + b_α u_α`.
pub fn mokhov_bracket(a: &Algebra, coef_a: &[DiffPoly], coef_b: &[DiffPoly]) -> BracketMatrix {
    let mut e = LambdaExpr::zero();
    for al in 0..3 {
        let mut exps = [0u32; 3];
        exps[al] = 1;
        e += &LambdaExpr::monomial(&exps, coef_a[al].clone());
        let mut order = [0u32; 3];
        order[al] = 1;
        e += &LambdaExpr::constant(&coef_b[al] * &a.var(0, &order).unwrap());
    }
    BracketMatrix::from_rows(vec![vec![e]]).unwrap()
}

pub fn mokhov_functions(a: &Algebra, prefix: &str) -> Vec<DiffPoly> {
    (1..=3).map(|al| f(a, &format!("{prefix}{al}"))).collect()
}

pub fn derivative_in_u(a: &Algebra, p: &DiffPoly) -> DiffPoly {
    a.partial_derivative(p, &a.key(0, &[0, 0, 0]).unwrap())
        .unwrap()
}

pub fn condition(lambda: &[u32], monomial: Monomial, coefficient: DiffPoly) -> Condition {
    Condition {
        lambda: lambda.into(),
        monomial,
        coefficient,
    }
}

pub fn sorted(mut v: Vec<Condition>) -> Vec<Condition> {
    v.sort_by(|a, b| (&a.lambda, &a.monomial).cmp(&(&b.lambda, &b.monomial)));
    v
}

/// Skew conditions of entry `(i, j)`: `g_ij = g_ji` and
/// `b^k_ij + b^k_ji = ∂g_ij/∂u_k`.
pub fn hydro_skew_conditions(a: &Algebra, h: &Hydro, i: usize, j: usize) -> Vec<Condition> {
    let mut want = Vec::new();
    let sym = &h.g[j][i] - &h.g[i][j];
    if !sym.is_zero() {
        want.push(condition(&[1], Monomial::one(), sym));
    }
    for k in 0..2 {
        let dg = a
            .partial_derivative(&h.g[i][j], &a.key(k, &[0]).unwrap())
            .unwrap();
        let key = a.key(k, &[1]).unwrap();
        want.push(condition(
            &[],
            Monomial::var(key),
            &h.b[k][i][j] + &h.b[k][j][i] - dg,
        ));
    }
    sorted(want)
}

/// `2b_α − ∂a_α/∂u` as the coefficient of `u_α`.
pub fn mokhov_skew_conditions(a: &Algebra, ca: &[DiffPoly], cb: &[DiffPoly]) -> Vec<Condition> {
    let mut want = Vec::new();
    for al in 0..3 {
        let mut order = [0u32; 3];
        order[al] = 1;
        let m = Monomial::var(a.key(0, &order).unwrap());
        want.push(condition(
            &[],
            m,
            cb[al].scale(&Scalar::from_int(2)) - derivative_in_u(a, &ca[al]),
        ));
    }
    sorted(want)
}

/// `b_α = ½∂a_α/∂u`.
pub fn mokhov_skew_b(a: &Algebra, ca: &[DiffPoly]) -> Vec<DiffPoly> {
    let half = Scalar::from_rational(pva_core::scalar::rat(1, 2));
    ca.iter()
        .map(|p| derivative_in_u(a, p).scale(&half))
        .collect()
}

/// `a_α = c_α g`.
pub fn mokhov_solution(a: &Algebra) -> Vec<DiffPoly> {
    let g = a.func("g", &[]).unwrap();
    (1..=3)
        .map(|al| g.scale(&Scalar::param(&format!("c{al}"))))
        .collect()
}
