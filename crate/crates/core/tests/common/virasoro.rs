//! The brackets of the Virasoro element `L = w(f) + L₀`.

#![allow(dead_code)]

use pva_core::lambda::{bracket, BracketMatrix};
use pva_core::liealg::HalfInt;
use pva_core::scalar::rat;
use pva_core::text::lambda_to_text;
use pva_core::walg::WContext;
use pva_core::{DiffPoly, Formal, LambdaExpr, Scalar};

fn lambda_part(w: &DiffPoly, weight: &Scalar) -> LambdaExpr {
    // the Δλ·w part of (∂ + Δλ)w
    LambdaExpr::monomial(&[1], w.scale(weight))
}

/// Compares `{L λ L}` and `{L λ w_j}` for every generator with their closed
/// forms; the error names the first mismatch.
pub fn check_virasoro(w: &WContext, h: &BracketMatrix) -> Result<(), String> {
    let a = w.algebra();
    let lie = w.lie();
    let g = &lie.alg;
    let l = w.virasoro();
    let le = LambdaExpr::constant(l.clone());
    let z = w.z().clone();
    let lam3 = LambdaExpr::var(0).pow(3);
    let show = |e: &LambdaExpr| lambda_to_text(a, &Formal::standard(1), e);

    let x = &lie.triple.x;
    let got = bracket(a, &le, &le, h, 0).unwrap();
    let dl = a.total_derivative(&l, 0).unwrap();
    let mut want = LambdaExpr::constant(dl) + lambda_part(&l, &Scalar::from_int(2));
    want -= &lam3.scale(&g.trace_form(x, x).unwrap());
    let sf = g.trace_form(w.s(), &lie.triple.f).unwrap();
    want += &LambdaExpr::var(0).scale(&(&z * &sf).scale(&rat(2, 1)));
    if got != want {
        return Err(format!(
            "{{L lambda L}} = {}, expected {}",
            show(&got),
            show(&want)
        ));
    }

    for (j, q) in lie.basis.q.iter().enumerate() {
        let delta = Scalar::from_rational((HalfInt::ONE + lie.basis.delta[j]).to_rational());
        let wj = a.gen(j);
        let got = bracket(a, &le, &LambdaExpr::constant(wj.clone()), h, 0).unwrap();
        let mut want =
            LambdaExpr::constant(a.total_derivative(&wj, 0).unwrap()) + lambda_part(&wj, &delta);
        want -= &lam3.scale(&g.trace_form(&lie.triple.e, q).unwrap().scale(&rat(1, 2)));
        let sa = g.trace_form(w.s(), q).unwrap();
        want += &LambdaExpr::var(0).scale(&(&(&z * &delta) * &sa));
        if got != want {
            return Err(format!(
                "{{L lambda w{}}} = {}, expected {}",
                j + 1,
                show(&got),
                show(&want)
            ));
        }
    }
    Ok(())
}
