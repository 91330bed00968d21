//! Representatives of the nilpotent orbits of 𝔬₈.

#![allow(dead_code)]

use std::collections::BTreeMap;

use pva_core::liealg::{jordan_type, LieAlgebra, LieContext, MatElem};

/// Conjugation by the transposition of the two middle basis vectors, which
/// preserves the form and has determinant −1.
pub fn swap_middle(f: &MatElem) -> MatElem {
    let p = |i: usize| match i {
        3 => 4,
        4 => 3,
        i => i,
    };
    let mut out = MatElem::zero(8);
    for (i, j, v) in f.entries() {
        out.set(p(i), p(j), v.clone());
    }
    out
}

/// Orbit representatives keyed by Jordan type, among sums of at most five
/// strictly lower basis elements that complete to a triangular triple.
pub fn representatives(g: &LieAlgebra) -> BTreeMap<Vec<usize>, MatElem> {
    let lower: Vec<&MatElem> = g.basis().iter().filter(|b| b.is_strictly_lower()).collect();
    let mut found = BTreeMap::new();
    for mask in 1u32..(1 << lower.len()) {
        if mask.count_ones() > 5 {
            continue;
        }
        let mut f = MatElem::zero(8);
        for (i, b) in lower.iter().enumerate() {
            if mask >> i & 1 == 1 {
                f = &f + *b;
            }
        }
        let jt = jordan_type(&f).unwrap();
        if !found.contains_key(&jt) && LieContext::new(g.clone(), &f).is_ok() {
            found.insert(jt, f);
        }
    }
    found
}

pub const VERY_EVEN: [&[usize]; 2] = [&[2, 2, 2, 2], &[4, 4]];

/// One element per nonzero nilpotent orbit: the nine Jordan types, plus the
/// second orbit of each very even type.
pub fn all_orbits(g: &LieAlgebra) -> Vec<(Vec<usize>, MatElem)> {
    let reps = representatives(g);
    let mut out: Vec<(Vec<usize>, MatElem)> =
        reps.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
    for jt in VERY_EVEN {
        if let Some(f) = reps.get(jt) {
            out.push((jt.to_vec(), swap_middle(f)));
        }
    }
    out
}
