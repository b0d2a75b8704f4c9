//! Complete averages of products of λ over (a, b) mod n*, exactly.
//!
//! A brute-force sum at p reduces to a histogram of (a_p, good) over the p²
//! pairs, after which Σ Π Ĝ_{e_i} is an integer and the average is that
//! integer times p^{−2−f/2}. The closed form expands Π U_{e_i} in U_l and
//! replaces each U_l average by a Hecke trace.
//!
//! At f = 0 the bare average is 1, while the closed form evaluates to
//! 1 − p^{−2}; `LocalSum::convention` records which one a value is.

use crate::arith::{factor, QrTable};
use crate::chebyshev::linearize;
use crate::curves::{ap_legendre, FrobeniusTrace};
use crate::error::{EcmError, Result};
use crate::families::{FamilySpec, Variant};
use crate::hecke::{trace_table, HurwitzTable};
use crate::surd::{ratio, Surd};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use std::collections::BTreeMap;

/// Largest total exponent accepted by default; keeps traces at weight ≤ 26.
pub const F_MAX: u32 = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    BruteForce,
    ClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convention {
    /// (1/p²)Σ Π λ, equal to 1 at f = 0.
    Average,
    /// The closed-form right-hand side, equal to 1 − p^{−2} at f = 0.
    ClosedFormRhs,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalSum {
    pub p: u64,
    pub exps: Vec<u32>,
    pub value: Surd,
    pub source: Source,
    pub convention: Convention,
}

impl LocalSum {
    pub fn total(&self) -> u32 {
        self.exps.iter().sum()
    }
}

/// How many of the p² pairs share each (a_p, good) class.
pub type Histogram = BTreeMap<(i64, bool), u64>;

pub fn class_histogram(p: u64, square_b: bool) -> Histogram {
    let mut h = Histogram::new();
    if p == 2 {
        for a in 0..2 {
            for b in 0..2 {
                let bb = if square_b { b * b } else { b };
                let t = ap_legendre(a, bb, 2);
                *h.entry((t.ap, t.good)).or_insert(0) += 1;
            }
        }
        return h;
    }
    let qr = QrTable::new(p);
    let parts: Vec<Histogram> = (0..p)
        .into_par_iter()
        .map(|b| {
            let bb = if square_b { b * b % p } else { b };
            let mut local = Histogram::new();
            for (a, ap) in qr.traces_over_a(bb).into_iter().enumerate() {
                let a = a as u128;
                let core = (4 * a * a * a + 27 * (bb as u128) * (bb as u128)) % p as u128;
                *local.entry((ap, core != 0)).or_insert(0) += 1;
            }
            local
        })
        .collect();
    for part in parts {
        for (k, v) in part {
            *h.entry(k).or_insert(0) += v;
        }
    }
    h
}

fn check(p: u64, exps: &[u32], f_max: u32) -> Result<u32> {
    if exps.is_empty() {
        return Err(EcmError::InvalidSpec("empty exponent tuple".into()));
    }
    if !crate::arith::is_prime(p) {
        return Err(EcmError::InvalidSpec(format!("{p} is not prime")));
    }
    let f: u32 = exps.iter().sum();
    if f > f_max {
        return Err(EcmError::InvalidSpec(format!("total exponent {f} exceeds {f_max}")));
    }
    Ok(f)
}

/// Σ over the histogram of count·Π Ĝ_{e_i}.
fn weighted_sum(p: u64, h: &Histogram, exps: &[u32]) -> BigInt {
    h.iter()
        .map(|(&(ap, good), &n)| {
            let t = FrobeniusTrace { p, ap, good };
            exps.iter().fold(BigInt::from(n), |acc, &e| acc * t.ghat_big(e))
        })
        .sum()
}

fn brute(p: u64, exps: &[u32], square_b: bool, f_max: u32) -> Result<LocalSum> {
    let f = check(p, exps, f_max)?;
    let s = weighted_sum(p, &class_histogram(p, square_b), exps);
    let value = Surd::prime_power(s, p, -(f as i64) - 4);
    Ok(LocalSum { p, exps: exps.to_vec(), value, source: Source::BruteForce, convention: Convention::Average })
}

/// Q*(p^{e_1}, …, p^{e_k}) = (1/p²)Σ_{a,b mod p} Π λ_{a,b}(p^{e_i}).
pub fn qstar_brute(p: u64, exps: &[u32]) -> Result<LocalSum> {
    brute(p, exps, false, F_MAX)
}

pub fn qstar_brute_capped(p: u64, exps: &[u32], f_max: u32) -> Result<LocalSum> {
    brute(p, exps, false, f_max)
}

/// Q*□: the same average over the curves E_{a,b²}.
pub fn qsquare_brute(p: u64, exps: &[u32]) -> Result<LocalSum> {
    brute(p, exps, true, F_MAX)
}

pub fn qsquare_brute_capped(p: u64, exps: &[u32], f_max: u32) -> Result<LocalSum> {
    brute(p, exps, true, f_max)
}

/// Q'(p^{e_1}, …) = Q*□·(1 − p^{−7})^{−1} when f > 0.
pub fn qprime(p: u64, exps: &[u32]) -> Result<LocalSum> {
    let mut s = qsquare_brute(p, exps)?;
    if s.total() > 0 {
        s.value = s.value.scale(&sieve_factor(p, 7));
    }
    Ok(s)
}

/// (1 − p^{−e})^{−1} = pᵉ/(pᵉ − 1).
pub fn sieve_factor(p: u64, e: u32) -> BigRational {
    let pe = BigInt::from(p).pow(e);
    BigRational::new(pe.clone(), pe - 1)
}

/// Q(p^j) = Σ_{a,b mod p} Ĝ_j, an integer.
pub fn q_sum(p: u64, j: u32) -> Result<BigInt> {
    if p <= 3 || j == 0 {
        return Err(EcmError::Unsupported(format!("q_sum needs p > 3 and j ≥ 1 (p={p}, j={j})")));
    }
    check(p, &[j], u32::MAX)?;
    Ok(weighted_sum(p, &class_histogram(p, false), &[j]))
}

/// The closed form in Hecke traces; zero for odd f.
pub fn qstar_closed(p: u64, exps: &[u32]) -> Result<LocalSum> {
    let f = check(p, exps, F_MAX)?;
    if p <= 3 {
        return Err(EcmError::Unsupported(format!("closed form needs p > 3, got {p}")));
    }
    let done = |value| LocalSum {
        p,
        exps: exps.to_vec(),
        value,
        source: Source::ClosedForm,
        convention: Convention::ClosedFormRhs,
    };
    if f % 2 == 1 {
        return Ok(done(Surd::zero()));
    }
    let lin = linearize(exps);
    let owned;
    let table = if 4 * p as usize <= HurwitzTable::global().max() {
        HurwitzTable::global()
    } else {
        owned = HurwitzTable::new(4 * p as usize);
        &owned
    };
    let traces = trace_table(p, f + 2, table)?;
    let pm1 = BigInt::from(p - 1);
    let pw = |e: u32| BigInt::from(p).pow(e);
    let frac = |n: BigInt, d: BigInt| BigRational::new(n, d);
    // Every l with c_l ≠ 0 is even, so all powers of p are integral.
    let mut v = frac(BigInt::from(lin.get(0)) * &pm1, pw(1));
    for (&l, &c) in lin.coeffs.iter().filter(|(&l, _)| l >= 1) {
        let tr = BigInt::from(traces[(l / 2) as usize].trace);
        let term = frac(&pm1 * tr, pw((l + 4) / 2)) + frac(pm1.clone(), pw(2 + l / 2));
        v -= term * BigInt::from(c);
    }
    v += frac(pm1, pw(2 + f / 2));
    Ok(done(Surd::rational(v)))
}

fn radical_parts(ns: &[u64]) -> Result<Vec<(u64, Vec<u32>)>> {
    let mut by_prime: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
    for (i, &n) in ns.iter().enumerate() {
        if n == 0 {
            return Err(EcmError::ZeroIndex);
        }
        for (p, e) in factor(n).ok_or(EcmError::FactorizationTimeout(n as u128))? {
            by_prime.entry(p).or_insert_with(|| vec![0; ns.len()])[i] = e;
        }
    }
    Ok(by_prime.into_iter().collect())
}

/// Q* or Q*□ at arbitrary indices, summed directly over (a, b) mod n*.
/// Independent of the local factorization; used to test multiplicativity.
pub fn composite_brute(ns: &[u64], square_b: bool) -> Result<Surd> {
    let parts = radical_parts(ns)?;
    let nstar: u64 = parts.iter().map(|(p, _)| p).product();
    // a_p of every residue pair at every p | n*
    let tables: Vec<Vec<FrobeniusTrace>> = parts
        .iter()
        .map(|&(p, _)| {
            let mut t = Vec::with_capacity((p * p) as usize);
            for a in 0..p {
                for b in 0..p {
                    let bb = if square_b { b * b } else { b };
                    t.push(ap_legendre(a as i64, bb as i64, p));
                }
            }
            t
        })
        .collect();
    let mut s = BigInt::zero();
    for a in 0..nstar {
        for b in 0..nstar {
            let mut term = BigInt::one();
            for ((p, exps), table) in parts.iter().zip(&tables) {
                let tr = table[((a % p) * p + b % p) as usize];
                for &e in exps {
                    term *= tr.ghat_big(e);
                }
            }
            s += term;
        }
    }
    let mut v = Surd::rational(BigRational::new(s, BigInt::from(nstar).pow(2)));
    for (p, exps) in &parts {
        let f: u32 = exps.iter().sum();
        v = v.mul(&Surd::prime_power(BigInt::one(), *p, -(f as i64)));
    }
    Ok(v)
}

/// The limiting family average R_{r,t}(n_1, …, n_k) assembled from local
/// pieces: λ_{r,t} at p | 6q, and the sieved complete average elsewhere.
pub fn assemble_qstar_rt(ns: &[u64], spec: &FamilySpec) -> Result<Surd> {
    spec.validate()?;
    let square_b = spec.variant == Variant::PositiveRank;
    let (b0, sieve_exp) = if square_b { (spec.t * spec.t, 7) } else { (spec.t, 10) };
    let m = 6 * spec.q;
    let mut v = Surd::one();
    for (p, exps) in radical_parts(ns)? {
        let f: u32 = exps.iter().sum();
        let local = if m % p == 0 {
            let tr = ap_legendre(spec.r, b0, p);
            let g: BigInt = exps.iter().map(|&e| tr.ghat_big(e)).product();
            Surd::prime_power(g, p, -(f as i64))
        } else {
            let s = brute(p, &exps, square_b, u32::MAX)?;
            s.value.scale(&sieve_factor(p, sieve_exp))
        };
        v = v.mul(&local);
    }
    Ok(v)
}

/// The pairs (a, b) mod p with p | 4a³ + 27b².
pub fn singular_locus(p: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for a in 0..p {
        for b in 0..p {
            let (a2, b2) = (a as u128, b as u128);
            if (4 * a2 * a2 * a2 + 27 * b2 * b2) % p as u128 == 0 {
                out.push((a, b));
            }
        }
    }
    out
}

/// Q*□(p) = −p^{−1/2} + p^{−3/2}, i.e. (1 − p)/p²·√p.
pub fn qsquare_p_closed(p: u64) -> Surd {
    Surd { coeff: ratio(1 - p as i64, (p * p) as i64), radicand: p }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tuples(fmax: u32, kmax: usize) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        fn rec(prefix: &mut Vec<u32>, min: u32, left: u32, kmax: usize, out: &mut Vec<Vec<u32>>) {
            if !prefix.is_empty() {
                out.push(prefix.clone());
            }
            if prefix.len() == kmax {
                return;
            }
            for e in min.max(1)..=left {
                prefix.push(e);
                rec(prefix, e, left - e, kmax, out);
                prefix.pop();
            }
        }
        rec(&mut Vec::new(), 1, fmax, kmax, &mut out);
        out
    }

    #[test]
    fn corollary_values() {
        for p in [2, 3, 5, 7, 11] {
            assert!(qstar_brute(p, &[1]).unwrap().value.is_zero());
            assert!(qstar_brute(p, &[1, 0, 0]).unwrap().value.is_zero());
        }
        for p in [5u64, 7, 11, 13] {
            let want = Surd::ratio(p as i64 - 1, p as i64);
            assert_eq!(qstar_brute(p, &[1, 1]).unwrap().value, want);
            assert_eq!(qstar_closed(p, &[1, 1]).unwrap().value, want);
        }
    }

    #[test]
    fn zero_total_conventions() {
        let b = qstar_brute(7, &[0]).unwrap();
        assert_eq!((b.value, b.convention), (Surd::one(), Convention::Average));
        let c = qstar_closed(7, &[0, 0]).unwrap();
        assert_eq!((c.value, c.convention), (Surd::ratio(48, 49), Convention::ClosedFormRhs));
    }

    #[test]
    fn q_sum_examples() {
        assert_eq!(q_sum(5, 10).unwrap(), BigInt::from(-19320));
        assert_eq!(q_sum(7, 8).unwrap(), BigInt::zero());
        assert_eq!(q_sum(5, 3).unwrap(), BigInt::zero());
        assert!(q_sum(3, 2).is_err());
    }

    #[test]
    fn q_sum_is_minus_trace() {
        for p in [5u64, 7, 11, 13, 17] {
            for w in (4..=26).step_by(2) {
                let tr = crate::hecke::trace_eichler_selberg(w, p).unwrap().trace;
                assert_eq!(q_sum(p, w - 2).unwrap(), BigInt::from(-(p as i128 - 1) * tr), "p={p} w={w}");
            }
        }
    }

    #[test]
    fn weight_twelve_example() {
        // Q*(5^10) = −(p−1)τ(5)/(p²·p^5)
        let v = qstar_brute(5, &[10]).unwrap().value;
        assert_eq!(v, Surd::rational(ratio(-4 * 4830, 25 * 3125)));
    }

    #[test]
    fn closed_form_matches_brute_force() {
        for p in [5u64, 7, 11, 13] {
            for exps in tuples(12, 3) {
                let f: u32 = exps.iter().sum();
                let b = qstar_brute(p, &exps).unwrap();
                let c = qstar_closed(p, &exps).unwrap();
                assert_eq!(b.value, c.value, "p={p} {exps:?}");
                if f % 2 == 0 {
                    assert_eq!(qsquare_brute(p, &exps).unwrap().value, b.value, "p={p} {exps:?}");
                }
            }
        }
    }

    #[test]
    fn parity() {
        for p in [2u64, 3, 5, 7, 11, 13] {
            for exps in tuples(9, 3).into_iter().filter(|e| e.iter().sum::<u32>() % 2 == 1) {
                assert!(qstar_brute(p, &exps).unwrap().value.is_zero(), "p={p} {exps:?}");
            }
        }
    }

    #[test]
    fn square_family_first_moment() {
        for p in [5u64, 7, 11, 13, 17] {
            assert_eq!(qsquare_brute(p, &[1]).unwrap().value, qsquare_p_closed(p));
        }
        let v = qsquare_brute(5, &[1]).unwrap().value.to_f64();
        assert!((v - (-(5f64).powf(-0.5) + 5f64.powf(-1.5))).abs() < 1e-15);
        assert_eq!(qsquare_brute(7, &[1, 1]).unwrap().value, Surd::ratio(6, 7));
    }

    #[test]
    fn square_family_cubes_are_order_inverse_root() {
        // Raw sums over (a, b²) of Ĝ₃, frozen from the brute force.
        for (p, s) in [(5u64, 100i64), (7, 294), (11, -1210), (13, 2028), (17, -4624), (19, -6498), (23, 11638)] {
            let v = qsquare_brute(p, &[3]).unwrap().value;
            assert_eq!(v, Surd::prime_power(BigInt::from(s), p, -7));
            assert!(v.to_f64().abs() <= (p - 1) as f64 / (p as f64).powf(1.5) + 1e-15);
        }
    }

    #[test]
    fn singular_locus_is_the_cusp_curve() {
        for p in [5u64, 7, 11, 13, 17] {
            let mut want: Vec<(u64, u64)> =
                (0..p).map(|c| ((3 * (p - 1) * c % p * c) % p, 2 * c * c % p * c % p)).collect();
            want.sort();
            want.dedup();
            assert_eq!(singular_locus(p), want);
            assert_eq!(want.len() as u64, p);
        }
    }

    #[test]
    fn crt_multiplicativity() {
        for (m, n) in [(3u64, 5u64), (3, 7), (5, 7)] {
            for em in 0..=2u32 {
                for en in 0..=2u32 {
                    for k2 in [false, true] {
                        let (a, b) = (m.pow(em) * n.pow(en), if k2 { m * n } else { 1 });
                        let direct = composite_brute(&[a, b], false).unwrap();
                        let mut local = Surd::one();
                        for p in [m, n] {
                            let e = |x: u64| crate::arith::valuation(x as i128, p);
                            if e(a) + e(b) > 0 {
                                local = local.mul(&qstar_brute(p, &[e(a), e(b)]).unwrap().value);
                            }
                        }
                        assert_eq!(direct, local, "({a}, {b})");
                    }
                }
            }
        }
    }

    #[test]
    fn assemble_examples() {
        let s = FamilySpec::all(1, 1, 1, 1e6).unwrap();
        assert_eq!(assemble_qstar_rt(&[1, 1, 1], &s).unwrap(), Surd::one());
        assert!(assemble_qstar_rt(&[7], &s).unwrap().is_zero());
        assert!(assemble_qstar_rt(&[2, 3], &s).unwrap().is_zero());
        // (15, 15): the 3-part is λ_{1,1}(3)², the 5-part a sieved average.
        let got = assemble_qstar_rt(&[15, 15], &s).unwrap();
        let mut sum = BigInt::zero();
        let mut count = 0u64;
        for a in 0..15i64 {
            for b in 0..15i64 {
                if (a - 1) % 3 != 0 || (b - 1) % 3 != 0 {
                    continue;
                }
                let g = ap_legendre(a, b, 3).ghat_big(1) * ap_legendre(a, b, 5).ghat_big(1);
                sum += &g * &g;
                count += 1;
            }
        }
        let direct = Surd::rational(BigRational::new(sum, BigInt::from(count * 15)))
            .scale(&sieve_factor(5, 10));
        assert_eq!(got, direct);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn multiplicativity_random(e3 in 0u32..3, e5 in 0u32..3, f3 in 0u32..3, f5 in 0u32..3, sq in any::<bool>()) {
            let (a, b) = (3u64.pow(e3) * 5u64.pow(e5), 3u64.pow(f3) * 5u64.pow(f5));
            let direct = composite_brute(&[a, b], sq).unwrap();
            let mut local = Surd::one();
            for (p, x, y) in [(3u64, e3, f3), (5, e5, f5)] {
                if x + y > 0 {
                    local = local.mul(&brute(p, &[x, y], sq, F_MAX).unwrap().value);
                }
            }
            prop_assert_eq!(direct, local);
        }
    }
}
