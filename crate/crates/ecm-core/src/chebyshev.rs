//! Chebyshev polynomials of the second kind and the Sato–Tate measure.

use crate::error::{EcmError, Result};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::OnceLock;

/// U_n(x) by the three-term recurrence.
pub fn u_eval(n: u32, x: f64) -> f64 {
    let (mut u0, mut u1) = (1.0, 2.0 * x);
    if n == 0 {
        return u0;
    }
    for _ in 1..n {
        (u0, u1) = (u1, 2.0 * x * u1 - u0);
    }
    u1
}

/// U_0(x), …, U_n(x) in one pass.
pub fn u_table(n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    if n >= 1 {
        out.push(2.0 * x);
    }
    for i in 2..=n {
        out.push(2.0 * x * out[i - 1] - out[i - 2]);
    }
    out
}

/// Coefficients c_l with U_{e_1}⋯U_{e_k} = Σ_l c_l U_l.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearizationTable {
    pub exps: Vec<u32>,
    pub coeffs: BTreeMap<u32, u64>,
    pub total: u32,
}

impl LinearizationTable {
    pub fn get(&self, l: u32) -> u64 {
        self.coeffs.get(&l).copied().unwrap_or(0)
    }
}

/// Exact linearization via U_a·U_b = Σ_{j=0}^{min(a,b)} U_{a+b−2j}.
pub fn linearize(exps: &[u32]) -> LinearizationTable {
    let mut acc: BTreeMap<u32, u64> = BTreeMap::from([(0, 1)]);
    for &e in exps {
        let mut next = BTreeMap::new();
        for (&l, &c) in &acc {
            for j in 0..=l.min(e) {
                *next.entry(l + e - 2 * j).or_insert(0) += c;
            }
        }
        acc = next;
    }
    LinearizationTable { exps: exps.to_vec(), coeffs: acc, total: exps.iter().sum() }
}

/// Gauss–Legendre nodes and weights on [−1, 1].
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let k = k as f64;
                (p0, p1) = (p1, ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k);
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((x, w));
        if 2 * i + 1 != n {
            out.push((-x, w));
        }
    }
    out
}

const MIN_NODES: usize = 64;
const MAX_NODES: usize = 4096;

/// Nodes θ_i ∈ (0, π) with weights already including (2/π)·sin²θ.
fn st_rule(n: usize) -> &'static [(f64, f64)] {
    static RULES: OnceLock<Vec<Vec<(f64, f64)>>> = OnceLock::new();
    let rules = RULES.get_or_init(|| {
        let mut v = Vec::new();
        let mut m = MIN_NODES;
        while m <= MAX_NODES {
            let r = gauss_legendre(m)
                .into_iter()
                .map(|(x, w)| {
                    let th = (x + 1.0) * PI / 2.0;
                    (th, w * PI / 2.0 * (2.0 / PI) * th.sin().powi(2))
                })
                .collect();
            v.push(r);
            m *= 2;
        }
        v
    });
    let idx = (n / MIN_NODES).trailing_zeros() as usize;
    &rules[idx]
}

/// Sato–Tate nodes at a fixed order, for callers that integrate many
/// related functions over the same grid.
pub fn sato_tate_rule(n: usize) -> &'static [(f64, f64)] {
    assert!(n.is_power_of_two() && (MIN_NODES..=MAX_NODES).contains(&n));
    st_rule(n)
}

/// ∫ f dμ_ST = (2/π)∫₀^π f(θ) sin²θ dθ, doubling the Gauss–Legendre order
/// until successive estimates agree to `tol`.
pub fn sato_tate_integral<F: Fn(f64) -> f64>(f: F, tol: f64) -> Result<f64> {
    let eval = |n: usize| st_rule(n).iter().map(|&(th, w)| w * f(th)).sum::<f64>();
    let mut n = MIN_NODES;
    let mut prev = eval(n);
    while n < MAX_NODES {
        n *= 2;
        let cur = eval(n);
        if (cur - prev).abs() <= tol * cur.abs().max(1.0) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(EcmError::ToleranceNotMet { tol, estimate: prev })
}

/// Σ_n U_{2n}(x) t^{2n} = (1+t²)/(1+2t²(1−2x²)+t⁴).
pub fn even_index_sum(x: f64, t: f64) -> Result<f64> {
    if t.abs() >= 1.0 {
        return Err(EcmError::DivergentRegion);
    }
    let t2 = t * t;
    Ok((1.0 + t2) / (1.0 + 2.0 * t2 * (1.0 - 2.0 * x * x) + t2 * t2))
}

/// Σ_n U_n(x) tⁿ = 1/(1 − 2xt + t²).
pub fn generating_sum(x: f64, t: f64) -> Result<f64> {
    if t.abs() >= 1.0 {
        return Err(EcmError::DivergentRegion);
    }
    Ok(1.0 / (1.0 - 2.0 * x * t + t * t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn u_examples() {
        assert_eq!(u_eval(1, 0.7), 1.4);
        assert_eq!(u_eval(2, 0.5), 0.0);
        let th: f64 = 0.3;
        assert!((u_eval(5, th.cos()) - (6.0 * th).sin() / th.sin()).abs() < 1e-12);
    }

    #[test]
    fn linearize_examples() {
        assert_eq!(linearize(&[1, 1]).coeffs, BTreeMap::from([(0, 1), (2, 1)]));
        assert_eq!(linearize(&[7]).coeffs, BTreeMap::from([(7, 1)]));
        assert_eq!(linearize(&[1, 1, 1]).coeffs, BTreeMap::from([(1, 2), (3, 1)]));
    }

    #[test]
    fn st_examples() {
        let one = sato_tate_integral(|_| 1.0, 1e-13).unwrap();
        assert!((one - 1.0).abs() < 1e-13);
        let u2 = sato_tate_integral(|th| u_eval(2, th.cos()), 1e-13).unwrap();
        assert!(u2.abs() < 1e-10);
        for m in 0..6 {
            for n in 0..6 {
                let v = sato_tate_integral(|th| u_eval(m, th.cos()) * u_eval(n, th.cos()), 1e-13)
                    .unwrap();
                let want = if m == n { 1.0 } else { 0.0 };
                assert!((v - want).abs() < 1e-12, "{m} {n} {v}");
            }
        }
    }

    #[test]
    fn stalled_quadrature_reports() {
        // A discontinuity defeats geometric convergence.
        let r = sato_tate_integral(|th| if th < 1.0 { 1.0 } else { 0.0 }, 1e-15);
        assert!(matches!(r, Err(EcmError::ToleranceNotMet { .. })));
    }

    #[test]
    fn even_sum_examples() {
        assert_eq!(even_index_sum(0.4, 0.0).unwrap(), 1.0);
        let series: f64 = (0..200).map(|n| (2 * n + 1) as f64 * 0.25f64.powi(n)).sum();
        assert!((even_index_sum(1.0, 0.5).unwrap() - series).abs() < 1e-12);
        let partial: f64 = (0..50).map(|n| u_eval(2 * n, 0.0) * (1.0f64 / 3.0).powi(2 * n as i32)).sum();
        assert!((even_index_sum(0.0, 1.0 / 3.0).unwrap() - partial).abs() < 1e-12);
        assert_eq!(even_index_sum(0.0, 1.0), Err(EcmError::DivergentRegion));
    }

    #[test]
    fn generating_identity_at_twenty_points() {
        for i in 0..20 {
            let x = -1.0 + 2.0 * i as f64 / 19.0;
            for t in [-0.5, -0.2, 0.1, 0.5] {
                let series: f64 = (0..120).map(|n| u_eval(n, x) * f64::powi(t, n as i32)).sum();
                assert!((generating_sum(x, t).unwrap() - series).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn quadrature_reproduces_every_coefficient() {
        let mut tuples: Vec<Vec<u32>> = Vec::new();
        for a in 0..=6 {
            for b in a..=6 {
                tuples.push(vec![a, b]);
                for c in b..=6 {
                    if a + b + c <= 12 {
                        tuples.push(vec![a, b, c]);
                    }
                }
            }
        }
        for exps in tuples {
            let t = linearize(&exps);
            for l in 0..=t.total {
                let q = sato_tate_integral(
                    |th| {
                        let x = th.cos();
                        u_eval(l, x) * exps.iter().map(|&e| u_eval(e, x)).product::<f64>()
                    },
                    1e-13,
                )
                .unwrap();
                assert!((q - t.get(l) as f64).abs() < 1e-9, "{exps:?} l={l}");
            }
        }
    }

    proptest! {
        #[test]
        fn linearization_invariants(exps in proptest::collection::vec(0u32..7, 1..4)) {
            let t = linearize(&exps);
            let f = t.total;
            for (&l, _) in &t.coeffs {
                prop_assert!(l <= f && (f - l) % 2 == 0);
            }
            let lhs: u64 = t.coeffs.iter().map(|(&l, &c)| c * (l as u64 + 1)).sum();
            let rhs: u64 = exps.iter().map(|&e| e as u64 + 1).product();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
