//! Arithmetical factors as truncated Euler products.
//!
//! For the family of all curves the local factor at p ∤ 6q is
//!
//! (1 − 1/p)^{k(k−1)/2} {1 + (1 − 1/p)(1 − p^{−10})^{−1}[T₁ − T₂ − T₃ + T₄]}
//!
//! with V = (1 − 2cosθ/√p + 1/p)^{−1} and
//! * T₁ = −1 + ∫V^k dμ_ST,
//! * T₂ = p^{−1/2} Σ_l Tr*_{l+2}(p) ∫U_l V^k dμ_ST,
//! * T₃ = (1/p) ∫(−1 + (1 + 1/p)K)V^k dμ_ST, K = (1 − 2cos2θ/p + 1/p²)^{−1},
//! * T₄ = (1/p)(−1 + ½((1 − 1/p)^{−k} + (1 + 1/p)^{−k})).
//!
//! T₃ is Σ_{m≥1} p^{−1−m}∫U_{2m}V^k summed in closed form. Writing it as
//! (p+1)/p²·∫(−1 + K)V^k instead is off by (1/p²)∫V^k, which is visible at
//! the third digit for p = 5; the form above agrees with the exact average
//! E[L_p(½)^k] over all (a, b) mod p to rounding.
//!
//! That exact average is also available directly: good pairs with a_p = t
//! number (p − 1)H(4p − t²)/2, the p − 1 nodal pairs split evenly between
//! a_p = ±1, and (0, 0) has a_p = 0. This is what the shifted local factors
//! used by `predict` are built from.

use crate::arith::{pow_mod, primes_up_to, QrTable};
use crate::chebyshev::{even_index_sum, sato_tate_integral, u_eval};
use crate::curves::ap_legendre;
use crate::error::{EcmError, Result};
use crate::families::{FamilySpec, Variant};
use crate::hecke::{cusp_dim, trace_table, HurwitzTable};
use rayon::prelude::*;
use std::collections::BTreeMap;

const QUAD_TOL: f64 = 1e-14;
/// Traces are dropped once p^{−l/2}·2dim S_{l+2} falls below this.
const TRACE_CUTOFF: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq)]
pub struct EulerProductResult {
    pub k: f64,
    pub pmax: u64,
    pub value: f64,
    pub tail_estimate: f64,
    pub per_prime_log: Option<Vec<(u64, f64)>>,
}

/// Weighted classes (a_p, good, number of pairs) at one prime.
pub type Classes = Vec<(i64, bool, u64)>;

/// Normalized local L-factor L_p(½ + z) = (1 − a_p p^{−1−z} + 𝟙_good p^{−1−2z})^{−1}.
pub(crate) fn local_l(p: f64, ap: i64, good: bool, z: f64) -> f64 {
    let y = p.powf(-1.0 - z);
    let quad = if good { p.powf(-1.0 - 2.0 * z) } else { 0.0 };
    1.0 / (1.0 - ap as f64 * y + quad)
}

/// (a_p, good) classes over all (a, b) mod p, from Hurwitz class numbers.
pub fn all_curve_classes(p: u64) -> Classes {
    assert!(p > 3);
    let owned;
    let table = if 4 * p as usize <= HurwitzTable::global().max() {
        HurwitzTable::global()
    } else {
        owned = HurwitzTable::new(4 * p as usize);
        &owned
    };
    let mut out = Vec::new();
    let tmax = crate::arith::iroot(4 * p as u128, 2) as i64;
    for t in -tmax..=tmax {
        if t * t < 4 * p as i64 {
            let h6 = table.sixths((4 * p as i64 - t * t) as usize) as u64;
            out.push((t, true, (p - 1) * h6 / 12));
        }
    }
    out.push((0, false, 1));
    out.push((1, false, (p - 1) / 2));
    out.push((-1, false, (p - 1) / 2));
    out
}

/// Smallest element of each coset of the subgroup of g-th powers in F_p*,
/// for g | p − 1, drawn from `candidates`.
fn coset_reps(p: u64, g: u64, candidates: impl Iterator<Item = u64>) -> Vec<u64> {
    let mut seen = BTreeMap::new();
    for c in candidates {
        let key = pow_mod(c, (p - 1) / g, p);
        seen.entry(key).or_insert(c);
        if seen.len() as u64 == g {
            break;
        }
    }
    seen.into_values().collect()
}

/// (a_p, good) classes over all (a, b²) mod p, using the scaling
/// (a, c) ↦ (u⁴a, u⁶c), which preserves a_p.
pub fn square_classes(p: u64) -> Classes {
    assert!(p > 3);
    let qr = QrTable::new(p);
    let good = |a: u64, c: u64| {
        let (a, c) = (a as u128, c as u128);
        (4 * a * a * a + 27 * c * c) % p as u128 != 0
    };
    let mut h: BTreeMap<(i64, bool), u64> = BTreeMap::new();
    // b = 0: orbits of a under fourth powers
    *h.entry((qr.trace(0, 0), false)).or_insert(0) += 1;
    let g4 = crate::arith::gcd(4, (p - 1) as u128) as u64;
    for a in coset_reps(p, g4, 1..p) {
        *h.entry((qr.trace(a, 0), good(a, 0))).or_insert(0) += (p - 1) / g4;
    }
    // b ≠ 0: c = b² runs over squares, each hit twice; orbits under sixth powers
    let g6 = crate::arith::gcd(6, (p - 1) as u128) as u64;
    let ncos = g6 / 2;
    let reps = coset_reps(p, g6, (1..p).map(|x| x * x % p));
    debug_assert_eq!(reps.len() as u64, ncos);
    for c in reps {
        for (a, ap) in qr.traces_over_a(c).into_iter().enumerate() {
            *h.entry((ap, good(a as u64, c))).or_insert(0) += (p - 1) / ncos;
        }
    }
    h.into_iter().map(|((ap, g), n)| (ap, g, n)).collect()
}

/// E[Π_j L_p(½ + z_j)] over the weighted classes.
pub fn class_expectation(p: u64, classes: &Classes, zs: &[f64]) -> f64 {
    let pf = p as f64;
    let total: u64 = classes.iter().map(|c| c.2).sum();
    let s: f64 = classes
        .iter()
        .map(|&(ap, good, n)| n as f64 * zs.iter().map(|&z| local_l(pf, ap, good, z)).product::<f64>())
        .sum();
    s / total as f64
}

/// Local factor of H at shifts z, p ∤ 6q: 1 + (1 − p^{−10})^{−1}(E[Π L] − 1).
pub fn h_local(p: u64, zs: &[f64]) -> f64 {
    let d = 1.0 / (1.0 - (p as f64).powi(-10));
    1.0 + d * (class_expectation(p, &all_curve_classes(p), zs) - 1.0)
}

/// The a_k local factor computed from the exact class distribution.
pub fn ak_local_classes(p: u64, k: f64) -> f64 {
    let pf = p as f64;
    let classes = all_curve_classes(p);
    let pf_total: u64 = classes.iter().map(|c| c.2).sum();
    let e = classes
        .iter()
        .map(|&(ap, good, n)| n as f64 * local_l(pf, ap, good, 0.0).powf(k))
        .sum::<f64>()
        / pf_total as f64;
    let d = 1.0 / (1.0 - pf.powi(-10));
    (1.0 - 1.0 / pf).powf(k * (k - 1.0) / 2.0) * (1.0 + d * (e - 1.0))
}

/// Nonzero scaled traces Tr*_{l+2}(p) needed before the cutoff.
fn needed_traces(p: u64) -> Result<Vec<(u32, f64)>> {
    let pf = p as f64;
    let mut lmax = 0;
    let mut l = 10;
    loop {
        let dim = cusp_dim(l + 2).max(1) as f64;
        if pf.powf(-(l as f64) / 2.0) * 2.0 * dim < TRACE_CUTOFF {
            break;
        }
        lmax = l;
        l += 2;
    }
    if lmax == 0 {
        return Ok(Vec::new());
    }
    let owned;
    let table = if 4 * p as usize <= HurwitzTable::global().max() {
        HurwitzTable::global()
    } else {
        owned = HurwitzTable::new(4 * p as usize);
        &owned
    };
    Ok(trace_table(p, lmax + 2, table)?
        .into_iter()
        .filter(|t| t.trace != 0)
        .map(|t| (t.weight - 2, t.scaled))
        .collect())
}

fn check_k(k: f64) -> Result<()> {
    if !(k > -0.5) || !k.is_finite() {
        return Err(EcmError::UnsupportedK(k));
    }
    Ok(())
}

/// The four bracketed terms T₁, T₂, T₃, T₄ at p ∤ 6q.
pub fn ak_local_terms(p: u64, k: f64) -> Result<[f64; 4]> {
    check_k(k)?;
    let pf = p as f64;
    let sp = pf.sqrt();
    let v = move |th: f64| (1.0 / (1.0 - 2.0 * th.cos() / sp + 1.0 / pf)).powf(k);
    let t1 = -1.0 + sato_tate_integral(v, QUAD_TOL)?;
    let mut t2 = 0.0;
    for (l, tr) in needed_traces(p)? {
        t2 += tr * sato_tate_integral(|th| u_eval(l, th.cos()) * v(th), QUAD_TOL)?;
    }
    t2 /= sp;
    let t3 = sato_tate_integral(
        |th| (-1.0 + even_index_sum(th.cos(), 1.0 / sp).expect("|t| < 1")) * v(th),
        QUAD_TOL,
    )? / pf;
    let t4 = (-1.0 + 0.5 * ((1.0 - 1.0 / pf).powf(-k) + (1.0 + 1.0 / pf).powf(-k))) / pf;
    Ok([t1, t2, t3, t4])
}

/// Local factor of a_k at p.
pub fn ak_local(p: u64, k: f64, spec: &FamilySpec) -> Result<f64> {
    check_k(k)?;
    let m = 6 * spec.q;
    if p == 2 {
        return Ok(1.0);
    }
    if m % p == 0 {
        let ap = ap_legendre(spec.r, spec.t, p).ap as f64;
        let pf = p as f64;
        return Ok((1.0 - ap / pf + 1.0 / pf).powf(-k));
    }
    let pf = p as f64;
    let [t1, t2, t3, t4] = ak_local_terms(p, k)?;
    let d = 1.0 / (1.0 - pf.powi(-10));
    Ok((1.0 - 1.0 / pf).powf(k * (k - 1.0) / 2.0) * (1.0 + (1.0 - 1.0 / pf) * d * (t1 - t2 - t3 + t4)))
}

/// Σ_{p > P} C·p^{−s} ≈ C·P^{1−s}/((s − 1)·ln P), with C the largest
/// |ln local|·p^s over the last decade of primes.
fn tail_estimate(logs: &[(u64, f64)], pmax: u64, s: f64) -> f64 {
    let c = logs
        .iter()
        .filter(|(p, _)| *p * 10 > pmax)
        .map(|&(p, l)| l.abs() * (p as f64).powf(s))
        .fold(0.0, f64::max);
    let pf = pmax as f64;
    c * pf.powf(1.0 - s) / ((s - 1.0) * pf.ln())
}

/// Neumaier-compensated sum of the logs in ascending p.
fn compensated_sum(logs: &[(u64, f64)]) -> f64 {
    let (mut s, mut c) = (0.0f64, 0.0f64);
    for &(_, x) in logs {
        let t = s + x;
        c += if s.abs() >= x.abs() { (s - t) + x } else { (x - t) + s };
        s = t;
    }
    s + c
}

fn check_pmax(pmax: u64, min: u64) -> Result<()> {
    if pmax < min {
        return Err(EcmError::OutOfRange(pmax));
    }
    Ok(())
}

/// a_k = (φ(6q)/6q)^{k(k−1)/2}·Π_{p ≤ pmax} ak_local.
pub fn ak(k: f64, spec: &FamilySpec, pmax: u64) -> Result<EulerProductResult> {
    check_k(k)?;
    spec.validate()?;
    if spec.variant != Variant::All {
        return Err(EcmError::InvalidSpec("a_k is defined for the family of all curves".into()));
    }
    check_pmax(pmax, 11)?;
    let primes = primes_up_to(pmax);
    let logs: Vec<(u64, f64)> = primes
        .par_iter()
        .map(|&p| ak_local(p, k, spec).map(|v| (p, v.ln())))
        .collect::<Result<_>>()?;
    let m = 6 * spec.q;
    let phi = crate::arith::euler_phi(m) as f64 / m as f64;
    let value = phi.powf(k * (k - 1.0) / 2.0) * compensated_sum(&logs).exp();
    let tail_estimate = value.abs() * tail_estimate(&logs, pmax, 2.0);
    Ok(EulerProductResult { k, pmax, value, tail_estimate, per_prime_log: Some(logs) })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AprimeLocal {
    pub value: f64,
    /// Contribution of the Σe = emax shell.
    pub last_shell: f64,
    /// The last shell exceeded 1e−12, so `emax` is too small.
    pub truncation_warning: bool,
}

/// Coefficients of (Σ_e c_e x^e)^k up to degree n.
fn series_power(c: &[f64], k: u32, n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    out[0] = 1.0;
    for _ in 0..k {
        let mut next = vec![0.0; n + 1];
        for (i, &a) in out.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in c.iter().enumerate().take(n + 1 - i) {
                next[i + j] += a * b;
            }
        }
        out = next;
    }
    out
}

/// Local factor of A'_k at p > 3 from the truncated Dirichlet series of Q'.
pub fn aprime_local(p: u64, k: u32, emax: u32) -> Result<AprimeLocal> {
    if p <= 3 {
        return Err(EcmError::Unsupported(format!("aprime_local needs p > 3, got {p}")));
    }
    if emax < 6 {
        return Err(EcmError::InvalidSpec("emax must be at least 6".into()));
    }
    let pf = p as f64;
    let n = emax as usize;
    let classes = square_classes(p);
    let total = (p * p) as f64;
    let mut shells = vec![0.0; n + 1];
    for &(ap, good, count) in &classes {
        // λ(p^e)·p^{−e/2} = Ĝ_e / p^e
        let mut c = vec![0.0; n + 1];
        c[0] = 1.0;
        if n >= 1 {
            c[1] = ap as f64 / pf;
        }
        for e in 2..=n {
            c[e] = if good { ap as f64 / pf * c[e - 1] - c[e - 2] / pf } else { ap as f64 / pf * c[e - 1] };
        }
        for (s, v) in shells.iter_mut().zip(series_power(&c, k, n)) {
            *s += count as f64 * v / total;
        }
    }
    let d = 1.0 / (1.0 - pf.powi(-7));
    let h = 1.0 + d * shells[1..].iter().sum::<f64>();
    let kf = k as f64;
    let value = h * (1.0 - 1.0 / pf).powf(kf * (kf - 1.0) / 2.0 - kf);
    let last_shell = d * shells[n];
    Ok(AprimeLocal { value, last_shell, truncation_warning: last_shell.abs() > 1e-12 })
}

/// The square-family class tables for every prime 5 ≤ p ≤ pmax, built once
/// and reused across shifts.
#[derive(Debug, Clone)]
pub struct SquareClassTable {
    pub pmax: u64,
    pub primes: Vec<(u64, Classes)>,
}

impl SquareClassTable {
    pub fn new(pmax: u64) -> Self {
        let primes = primes_up_to(pmax)
            .into_par_iter()
            .filter(|&p| p > 3)
            .map(|p| (p, square_classes(p)))
            .collect();
        Self { pmax, primes }
    }

    /// The k = 1 local factor of A'_1 at p > 3.
    pub fn local(p: u64, classes: &Classes, alpha: f64) -> f64 {
        let pf = p as f64;
        let d = 1.0 / (1.0 - pf.powi(-7));
        let h = 1.0 + d * (class_expectation(p, classes, &[alpha]) - 1.0);
        h / (1.0 - pf.powf(-1.0 - alpha))
    }

    /// A'_1(α) for the positive-rank family with congruence data `spec`.
    pub fn a1prime(&self, alpha: f64, spec: &FamilySpec) -> Result<EulerProductResult> {
        if !(alpha > -1.0 / 6.0) || !alpha.is_finite() {
            return Err(EcmError::OutsideRegion(alpha));
        }
        spec.validate()?;
        if spec.variant != Variant::PositiveRank {
            return Err(EcmError::InvalidSpec("A'_1 is defined for the positive-rank family".into()));
        }
        let mut logs = Vec::with_capacity(self.primes.len() + 2);
        // p = 2: every λ(2^e) vanishes
        logs.push((2, -(1.0 - 2f64.powf(-1.0 - alpha)).ln()));
        // p = 3: λ is fixed by the class of (r, t²) mod 3
        let t3 = ap_legendre(spec.r, spec.t * spec.t, 3);
        let l3 = local_l(3.0, t3.ap, t3.good, alpha);
        logs.push((3, (l3 / (1.0 - 3f64.powf(-1.0 - alpha))).ln()));
        for (p, classes) in &self.primes {
            logs.push((*p, Self::local(*p, classes, alpha).ln()));
        }
        let value = compensated_sum(&logs).exp();
        let s = (2.0 + alpha).min(1.5 + 3.0 * alpha);
        let tail_estimate = value.abs() * tail_estimate(&logs, self.pmax, s);
        Ok(EulerProductResult { k: 1.0, pmax: self.pmax, value, tail_estimate, per_prime_log: Some(logs) })
    }
}

/// A'_1(α) truncated at pmax.
pub fn a1prime(alpha: f64, spec: &FamilySpec, pmax: u64) -> Result<EulerProductResult> {
    if !(alpha > -1.0 / 6.0) || !alpha.is_finite() {
        return Err(EcmError::OutsideRegion(alpha));
    }
    check_pmax(pmax, 11)?;
    SquareClassTable::new(pmax).a1prime(alpha, spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orthogonality::{class_histogram, qstar_brute_capped};

    fn all_spec() -> FamilySpec {
        FamilySpec::all(1, 1, 1, 1e6).unwrap()
    }

    fn pr_spec() -> FamilySpec {
        FamilySpec::positive_rank(1, 1, 1e6).unwrap()
    }

    fn sorted(c: Classes) -> Vec<(i64, bool, u64)> {
        let mut m: BTreeMap<(i64, bool), u64> = BTreeMap::new();
        for (a, g, n) in c {
            if n > 0 {
                *m.entry((a, g)).or_insert(0) += n;
            }
        }
        m.into_iter().map(|((a, g), n)| (a, g, n)).collect()
    }

    fn brute_classes(p: u64, square: bool) -> Vec<(i64, bool, u64)> {
        class_histogram(p, square).into_iter().map(|((a, g), n)| (a, g, n)).collect()
    }

    #[test]
    fn class_tables_match_enumeration() {
        for p in crate::arith::primes_up_to(80).into_iter().filter(|&p| p > 3) {
            assert_eq!(sorted(all_curve_classes(p)), brute_classes(p, false), "p={p}");
            assert_eq!(sorted(square_classes(p)), brute_classes(p, true), "p={p}");
        }
    }

    #[test]
    fn corrected_third_term_matches_exact_average() {
        // Frozen from the exact class-number average.
        let frozen = [
            (5, 1.0, 0.999920634912508),
            (5, 2.0, 0.9550172746291232),
            (5, 3.0, 0.8816912119156569),
            (5, 0.5, 1.0073233226303984),
            (7, 1.0, 1.0000067392924774),
            (7, 2.0, 0.9785554028222749),
            (11, 1.0, 0.9999982934474914),
            (11, 2.0, 0.9915278832408915),
        ];
        for (p, k, want) in frozen {
            let got = ak_local(p, k, &all_spec()).unwrap();
            assert!((got - want).abs() < 1e-12, "p={p} k={k}: {got} vs {want}");
            assert!((ak_local_classes(p, k) - want).abs() < 1e-13);
        }
    }

    #[test]
    fn closed_form_tracks_classes_over_primes() {
        for p in [13u64, 17, 101, 997, 1201, 1301, 4999] {
            for k in [-0.25, 0.5, 1.0, 2.0, 3.0] {
                let a = ak_local(p, k, &all_spec()).unwrap();
                let b = ak_local_classes(p, k);
                assert!((a - b).abs() < 1e-12, "p={p} k={k}: {a} {b}");
            }
        }
    }

    #[test]
    fn k_zero_is_neutral() {
        for p in [5u64, 7, 11, 101, 1009] {
            assert!((ak_local(p, 0.0, &all_spec()).unwrap() - 1.0).abs() < 1e-12);
        }
        let a0 = ak(0.0, &all_spec(), 2000).unwrap();
        assert!((a0.value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn unsupported_k() {
        assert_eq!(ak_local(5, -0.5, &all_spec()), Err(EcmError::UnsupportedK(-0.5)));
    }

    /// The raw local Dirichlet series Σ δ·Q*(p^{e_1}, …)p^{−f/2}, exact terms.
    fn raw_local_series(p: u64, k: usize, fmax: u32) -> f64 {
        let mut total = 1.0;
        let d = 1.0 / (1.0 - (p as f64).powi(-10));
        let mut exps = vec![0u32; k];
        loop {
            let f: u32 = exps.iter().sum();
            if f > 0 && f <= fmax {
                let q = qstar_brute_capped(p, &exps, fmax).unwrap().value.to_f64();
                total += d * q * (p as f64).powf(-(f as f64) / 2.0);
            }
            // odometer over exps with each e ≤ fmax
            let mut i = 0;
            loop {
                if i == k {
                    return total;
                }
                exps[i] += 1;
                if exps[i] <= fmax {
                    break;
                }
                exps[i] = 0;
                i += 1;
            }
        }
    }

    #[test]
    fn dual_path_against_raw_series() {
        for p in [5u64, 7, 11] {
            let raw1 = raw_local_series(p, 1, 40);
            assert!((ak_local(p, 1.0, &all_spec()).unwrap() - raw1).abs() < 1e-9, "p={p}");
            let raw2 = raw_local_series(p, 2, 40) * (1.0 - 1.0 / p as f64);
            assert!((ak_local(p, 2.0, &all_spec()).unwrap() - raw2).abs() < 1e-9, "p={p}");
        }
    }

    #[test]
    fn local_factors_are_one_plus_order_p_minus_two() {
        for k in [1.0, 2.0] {
            let mut worst: f64 = 0.0;
            for p in primes_up_to(10_000).into_iter().filter(|&p| p >= 11).step_by(25) {
                let v = ak_local(p, k, &all_spec()).unwrap();
                worst = worst.max((v - 1.0).abs() * (p * p) as f64);
            }
            assert!(worst < 10.0, "k={k}: {worst}");
        }
    }

    #[test]
    fn ak_self_consistency() {
        for k in [1.0, 2.0, -0.25] {
            let a = ak(k, &all_spec(), 1000).unwrap();
            let b = ak(k, &all_spec(), 2000).unwrap();
            assert!(a.value.is_finite() && a.value > 0.0);
            assert!((a.value - b.value).abs() <= a.tail_estimate, "k={k}: {} {} {}", a.value, b.value, a.tail_estimate);
        }
    }

    #[test]
    fn three_q_factor() {
        let s = FamilySpec::all(1, 1, 5, 1e6).unwrap();
        // a_5(1,1) = −3 from N_5 = 9
        let v = ak_local(5, 1.0, &s).unwrap();
        assert!((v - 1.0 / (1.0 + 3.0 / 5.0 + 1.0 / 5.0)).abs() < 1e-15);
    }

    #[test]
    fn pole_cancellation_is_continuous() {
        // Π_p h_local(ε, ε)(1 − p^{−1−2ε}) stays finite and continuous as ε → 0.
        let primes: Vec<u64> = primes_up_to(3000).into_iter().filter(|&p| p > 3).collect();
        let a = |eps: f64| -> f64 {
            primes
                .iter()
                .map(|&p| (h_local(p, &[eps, eps]) * (1.0 - (p as f64).powf(-1.0 - 2.0 * eps))).ln())
                .sum::<f64>()
                .exp()
        };
        let a0 = a(0.0);
        let mut last = f64::INFINITY;
        for eps in [1e-1, 1e-2, 1e-3, 1e-4] {
            let d = (a(eps) - a0).abs();
            assert!(d < last);
            last = d;
        }
        assert!(last < 1e-3);
        let direct: f64 = primes.iter().map(|&p| ak_local_classes(p, 2.0).ln()).sum::<f64>().exp();
        assert!((a0 - direct).abs() < 1e-12);
    }

    #[test]
    fn aprime_examples() {
        assert!((aprime_local(5, 0, 8).unwrap().value - 1.0).abs() < 1e-15);
        let r5 = aprime_local(5, 1, 60).unwrap();
        assert!(!r5.truncation_warning);
        assert!((r5.value - 1.0).abs() < 5.0 / 25.0);
        let r7 = aprime_local(7, 1, 60).unwrap();
        let r11 = aprime_local(11, 1, 60).unwrap();
        assert!((r11.value - 1.0).abs() < (r7.value - 1.0).abs());
        assert!(aprime_local(5, 1, 7).unwrap().truncation_warning);
        // the table path agrees with the truncated series
        for p in [5u64, 7, 11, 13] {
            let t = SquareClassTable::local(p, &square_classes(p), 0.0);
            assert!((t - aprime_local(p, 1, 80).unwrap().value).abs() < 1e-13, "p={p}");
        }
    }

    #[test]
    fn aprime_region_and_stability() {
        assert!(matches!(a1prime(-0.2, &pr_spec(), 100), Err(EcmError::OutsideRegion(_))));
        let t1 = SquareClassTable::new(1000);
        let t3 = SquareClassTable::new(3000);
        let a = t1.a1prime(0.3, &pr_spec()).unwrap();
        let b = t3.a1prime(0.3, &pr_spec()).unwrap();
        assert!((a.value - b.value).abs() / b.value.abs() < 1e-4, "{} {}", a.value, b.value);
        assert!((a.value - b.value).abs() <= a.tail_estimate);
        let slow = t1.a1prime(-0.15, &pr_spec()).unwrap();
        assert!(slow.tail_estimate > a.tail_estimate);
        assert!(slow.value.is_finite());
    }
}
