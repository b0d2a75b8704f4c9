//! Numerical root numbers against the closed formula across a whole family.

use ecm_core::arith::is_squarefree;
use ecm_core::curves::root_number_formula;
use ecm_core::families::{enumerate_par, FamilySpec};
use ecm_core::lvalues::{conductor, root_number_numeric};
use rayon::prelude::*;
use std::collections::BTreeMap;

/// w·formula(ε₂ = 1) depends only on (a, b) mod 8, so it recovers ε₂.
#[test]
fn sign_ratio_is_constant_mod_8() {
    let spec = FamilySpec::all(1, 1, 1, 1e4).unwrap();
    let members = enumerate_par(&spec).unwrap();
    let rows: Vec<((i64, i64), i8, i8)> = members
        .par_iter()
        .filter(|m| is_squarefree(m.curve.disc_core().unsigned_abs() as u64))
        .map(|m| {
            let c = m.curve;
            let w = root_number_numeric(&c).unwrap();
            let f = root_number_formula(c.a, c.b, 1).unwrap();
            ((c.a.rem_euclid(8), c.b.rem_euclid(8)), w, f)
        })
        .collect();
    assert!(rows.len() > 150, "{}", rows.len());
    let mut classes: BTreeMap<(i64, i64), i8> = BTreeMap::new();
    for (k, w, f) in &rows {
        let e = *classes.entry(*k).or_insert(w * f);
        assert_eq!(e, w * f, "class {k:?} is not constant");
    }
    assert_eq!(classes.len(), 16);
    let plus = rows.iter().filter(|r| r.1 == 1).count() as f64 / rows.len() as f64;
    assert!((0.35..0.65).contains(&plus), "{plus}");
}

#[test]
fn conductors_of_small_family_members() {
    let spec = FamilySpec::all(1, 1, 1, 2e3).unwrap();
    for m in enumerate_par(&spec).unwrap() {
        let r = conductor(&m.curve).unwrap();
        // b odd forces additive reduction at 2
        assert!(r.exp2 >= 2, "{:?} {r:?}", m.curve);
        assert!(r.defect < 1e-10 && r.defect_other_sign > 10.0 * r.defect);
    }
}
