//! Hurwitz class numbers and traces of Hecke operators on level-one cusp
//! forms.
//!
//! The trace formula used here is
//!
//! ```text
//! Tr_w(p) = −1 − ½ Σ_{t² < 4p} Ĝ_{w−2}(t, p) · H(4p − t²)
//! ```
//!
//! where Ĝ_j(t, p) = p^{j/2} U_j(t / 2√p) is the integer Gegenbauer value and
//! H is the Hurwitz class number (all forms, weight ½ on multiples of x²+y²
//! and ⅓ on multiples of x²+xy+y²). With U_j un-normalized the identity is
//! off by p^{j/2}; the normalization above is the one that matches both the
//! brute-force orthogonality sums and the q-expansion oracle exactly.

use crate::curves::ghat_good;
use crate::error::{EcmError, Result};
use num_bigint::BigInt;
use num_rational::Ratio;
use std::sync::OnceLock;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassNumberValue {
    pub d: i64,
    pub value: Ratio<i64>,
}

/// Hurwitz class number of the negative discriminant `d`.
pub fn class_number_vw(d: i64) -> Result<ClassNumberValue> {
    if d >= 0 || !matches!(d.rem_euclid(4), 0 | 1) {
        return Err(EcmError::BadDiscriminant(d));
    }
    Ok(ClassNumberValue { d, value: Ratio::new(hurwitz_sixths(-d), 6) })
}

/// 6·H(n) for a single n = −D > 0, by enumerating reduced forms.
fn hurwitz_sixths(n: i64) -> i64 {
    let mut total = 0;
    let mut a = 1i64;
    while 3 * a * a <= n {
        for b in (-a + 1)..=a {
            let num = b * b + n;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (a == c && b < 0) {
                continue;
            }
            total += form_weight_sixths(a, b, c);
        }
        a += 1;
    }
    total
}

/// Weight of a reduced form in sixths.
fn form_weight_sixths(a: i64, b: i64, c: i64) -> i64 {
    if a == c && b == 0 {
        3
    } else if a == b && b == c {
        2
    } else {
        6
    }
}

/// 6·H(n) for every n ≤ `max`, built in one sweep over reduced forms.
#[derive(Debug, Clone)]
pub struct HurwitzTable {
    sixths: Vec<i64>,
}

impl HurwitzTable {
    pub fn new(max: usize) -> Self {
        let mut sixths = vec![0i64; max + 1];
        let max = max as i64;
        let mut a = 1i64;
        while 3 * a * a <= max {
            for b in (-a + 1)..=a {
                let mut c = a;
                loop {
                    let n = 4 * a * c - b * b;
                    if n > max {
                        break;
                    }
                    if !(a == c && b < 0) {
                        sixths[n as usize] += form_weight_sixths(a, b, c);
                    }
                    c += 1;
                }
            }
            a += 1;
        }
        Self { sixths }
    }

    /// Shared table covering every n ≤ 4·20000.
    pub fn global() -> &'static Self {
        static T: OnceLock<HurwitzTable> = OnceLock::new();
        T.get_or_init(|| HurwitzTable::new(80_000))
    }

    pub fn max(&self) -> usize {
        self.sixths.len() - 1
    }

    pub fn sixths(&self, n: usize) -> i64 {
        self.sixths[n]
    }
}

/// dim S_k(SL₂(Z)) for even k ≥ 0.
pub fn cusp_dim(k: u32) -> u32 {
    if k % 2 == 1 || k < 12 {
        return 0;
    }
    if k % 12 == 2 {
        k / 12 - 1
    } else {
        k / 12
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceValue {
    pub weight: u32,
    pub p: u64,
    pub trace: i128,
    /// Tr / p^{(weight−1)/2}
    pub scaled: f64,
}

/// Tr_w(p) by the class-number formula.
pub fn trace_eichler_selberg(weight: u32, p: u64) -> Result<TraceValue> {
    if p <= 3 {
        return Err(EcmError::Unsupported(format!("trace formula needs p > 3, got {p}")));
    }
    if weight < 4 || weight % 2 == 1 {
        return Err(EcmError::Unsupported(format!("weight {weight}")));
    }
    let table = if 4 * p as usize <= HurwitzTable::global().max() {
        None
    } else {
        Some(HurwitzTable::new(4 * p as usize))
    };
    let table = table.as_ref().unwrap_or_else(|| HurwitzTable::global());
    Ok(trace_table(p, weight, table)?.pop().expect("nonempty"))
}

/// Tr_w(p) for w = 2, 4, …, wmax (entries for w = 2 and small w are 0).
pub fn trace_table(p: u64, wmax: u32, table: &HurwitzTable) -> Result<Vec<TraceValue>> {
    assert!(4 * p as usize <= table.max(), "class-number table too small");
    let jmax = wmax - 2;
    // Σ_t Ĝ_j(t) · 6H(4p − t²) for every j
    let mut sums = vec![0i128; jmax as usize + 1];
    let mut t: i64 = 0;
    while (t * t) < 4 * p as i64 {
        let h6 = table.sixths((4 * p as i64 - t * t) as usize) as i128;
        let mult = if t == 0 { 1 } else { 2 };
        // Ĝ_j(−t) = (−1)^j Ĝ_j(t): odd j cancel between ±t.
        let (mut prev, mut cur) = (0i128, 1i128);
        for j in 0..=jmax as usize {
            if j % 2 == 0 {
                let term = cur.checked_mul(h6).and_then(|v| v.checked_mul(mult)).ok_or(EcmError::Overflow)?;
                sums[j] = sums[j].checked_add(term).ok_or(EcmError::Overflow)?;
            }
            if j < jmax as usize {
                let next = (t as i128)
                    .checked_mul(cur)
                    .and_then(|v| v.checked_sub((p as i128).checked_mul(prev)?))
                    .ok_or(EcmError::Overflow)?;
                (prev, cur) = (cur, next);
            }
        }
        t += 1;
    }
    let mut out = Vec::new();
    for w in (2..=wmax).step_by(2) {
        let j = (w - 2) as usize;
        let trace = if w < 4 {
            0
        } else {
            debug_assert_eq!(sums[j] % 12, 0, "non-integral trace");
            -1 - sums[j] / 12
        };
        let scaled = trace as f64 / (p as f64).powf((w as f64 - 1.0) / 2.0);
        out.push(TraceValue { weight: w, p, trace, scaled });
    }
    Ok(out)
}

/// Ĝ_j(t,p) is the value the formula weights each class number by.
pub fn gegenbauer(j: u32, t: i64, p: u64) -> Option<i128> {
    ghat_good(t as i128, p as i128, j)
}

const TAU_BOUND: usize = 10_000;

/// Coefficients of q·Π(1−q^m)^24 up to `n`, via (Σ(−1)^k(2k+1)q^{k(k+1)/2})^8.
fn delta_series(n: usize) -> Vec<i128> {
    let len = n; // exponents 0..n−1 of Π(1−q^m)^24
    let mut cube = vec![0i128; len];
    let mut k = 0usize;
    while k * (k + 1) / 2 < len {
        cube[k * (k + 1) / 2] = if k % 2 == 0 { 1 } else { -1 } * (2 * k as i128 + 1);
        k += 1;
    }
    let square = |s: &[i128]| {
        let mut out = vec![0i128; len];
        for (i, &a) in s.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in s[..len - i].iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        out
    };
    let p24 = square(&square(&square(&cube)));
    let mut out = vec![0i128; n + 1];
    out[1..].copy_from_slice(&p24);
    out
}

/// τ(n) from the Δ q-expansion.
pub fn tau_oracle(n: u64) -> Result<i128> {
    static SERIES: OnceLock<Vec<i128>> = OnceLock::new();
    if n == 0 || n as usize > TAU_BOUND {
        return Err(EcmError::OutOfRange(n));
    }
    if n <= 200 {
        return Ok(delta_series(n as usize)[n as usize]);
    }
    Ok(SERIES.get_or_init(|| delta_series(TAU_BOUND))[n as usize])
}

fn divisor_power_sum(n: usize, k: u32) -> BigInt {
    (1..=n).filter(|d| n % d == 0).map(|d| BigInt::from(d).pow(k)).sum()
}

fn eisenstein(k: u32, n: usize) -> Vec<BigInt> {
    let c: i64 = match k {
        4 => 240,
        6 => -504,
        _ => unreachable!("only E4 and E6 are needed"),
    };
    let mut out = vec![BigInt::from(1)];
    out.extend((1..=n).map(|m| c * divisor_power_sum(m, k - 1)));
    out
}

fn series_mul(a: &[BigInt], b: &[BigInt], n: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::from(0); n + 1];
    for (i, x) in a.iter().enumerate().take(n + 1) {
        for (j, y) in b.iter().enumerate().take(n + 1 - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// q-expansion to order `n` of the unique normalized cusp eigenform of
/// weight 12, 16, 18, 20, 22 or 26 (each of these spaces is one-dimensional).
pub fn level_one_eigenform(weight: u32, n: usize) -> Result<Vec<BigInt>> {
    let delta: Vec<BigInt> = delta_series(n).into_iter().map(BigInt::from).collect();
    let (e4, e6) = (eisenstein(4, n), eisenstein(6, n));
    let f = match weight {
        12 => delta,
        16 => series_mul(&delta, &e4, n),
        18 => series_mul(&delta, &e6, n),
        20 => series_mul(&series_mul(&delta, &e4, n), &e4, n),
        22 => series_mul(&series_mul(&delta, &e4, n), &e6, n),
        26 => series_mul(&series_mul(&series_mul(&delta, &e4, n), &e4, n), &e6, n),
        _ => return Err(EcmError::Unsupported(format!("no oracle for weight {weight}"))),
    };
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_number_examples() {
        assert_eq!(class_number_vw(-3).unwrap().value, Ratio::new(1, 3));
        assert_eq!(class_number_vw(-4).unwrap().value, Ratio::new(1, 2));
        assert_eq!(class_number_vw(-23).unwrap().value, Ratio::from_integer(3));
        // imprimitive forms count: H(12) = 1 + 1/3
        assert_eq!(class_number_vw(-12).unwrap().value, Ratio::new(4, 3));
        assert_eq!(class_number_vw(-5), Err(EcmError::BadDiscriminant(-5)));
        assert_eq!(class_number_vw(7), Err(EcmError::BadDiscriminant(7)));
    }

    #[test]
    fn table_matches_pointwise() {
        let t = HurwitzTable::new(2000);
        for n in 1..=2000usize {
            let want = if n % 4 == 0 || n % 4 == 3 { hurwitz_sixths(n as i64) } else { 0 };
            assert_eq!(t.sixths(n), want, "n={n}");
        }
    }

    #[test]
    fn class_numbers_positive_with_small_denominators() {
        for n in 3..3000i64 {
            if n % 4 == 0 || n % 4 == 3 {
                let v = class_number_vw(-n).unwrap().value;
                assert!(v > Ratio::from_integer(0));
                assert_eq!(6 % v.denom(), 0);
            }
        }
    }

    #[test]
    fn trace_examples() {
        assert_eq!(trace_eichler_selberg(12, 5).unwrap().trace, 4830);
        assert_eq!(trace_eichler_selberg(10, 7).unwrap().trace, 0);
        assert_eq!(trace_eichler_selberg(12, 11).unwrap().trace, 534_612);
        assert!(trace_eichler_selberg(12, 3).is_err());
    }

    #[test]
    fn tau_examples() {
        assert_eq!(tau_oracle(1).unwrap(), 1);
        assert_eq!(tau_oracle(2).unwrap(), -24);
        assert_eq!(tau_oracle(6).unwrap(), tau_oracle(2).unwrap() * tau_oracle(3).unwrap());
        assert_eq!(tau_oracle(5).unwrap(), 4830);
        assert!(tau_oracle(0).is_err());
        assert!(tau_oracle(10_001).is_err());
    }

    #[test]
    fn tau_multiplicative_large() {
        // τ(p²) = τ(p)² − p¹¹ and coprime multiplicativity deep in the table
        let t = |n| tau_oracle(n).unwrap();
        assert_eq!(t(9409), t(97) * t(97) - 97i128.pow(11));
        assert_eq!(t(9991), t(97) * t(103));
    }

    #[test]
    fn traces_vanish_without_cusp_forms() {
        for p in [5u64, 7, 11, 13, 101] {
            for w in [4u32, 6, 8, 10, 14] {
                assert_eq!(trace_eichler_selberg(w, p).unwrap().trace, 0, "w={w} p={p}");
            }
        }
    }

    #[test]
    fn trace_formula_matches_eigenforms() {
        for w in [12u32, 16, 18, 20, 22, 26] {
            let f = level_one_eigenform(w, 40).unwrap();
            for p in [5u64, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
                let tr = trace_eichler_selberg(w, p).unwrap();
                assert_eq!(BigInt::from(tr.trace), f[p as usize], "w={w} p={p}");
            }
        }
    }

    #[test]
    fn deligne_cap() {
        let table = HurwitzTable::new(4 * 400);
        for p in crate::arith::primes_up_to(400).into_iter().filter(|&p| p > 3) {
            for tv in trace_table(p, 26, &table).unwrap() {
                assert!(tv.scaled.abs() <= 2.0 * cusp_dim(tv.weight) as f64 + 1e-9, "{tv:?}");
            }
        }
    }
}
