//! Real special functions: log-gamma, digamma, Barnes G, ζ and its
//! Laurent coefficients at s = 1, and the random-matrix constants g_k.

use crate::error::{EcmError, Result};
use std::f64::consts::PI;
use std::sync::OnceLock;

/// B_2, B_4, …, B_20.
const BERNOULLI: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// ζ'(−1)
const ZETA_PRIME_M1: f64 = -0.165_421_143_700_450_93;

const SHIFT: f64 = 20.0;

/// Euler's constant γ.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    assert!(x > 0.0, "ln_gamma needs a positive argument");
    let mut x = x;
    let mut prod = 1.0;
    while x < SHIFT {
        prod *= x;
        x += 1.0;
    }
    let acc = -prod.ln();
    let mut s = (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln();
    let x2 = x * x;
    let mut xp = x;
    for (k, b) in BERNOULLI.iter().enumerate().take(8) {
        let k = (k + 1) as f64;
        s += b / (2.0 * k * (2.0 * k - 1.0) * xp);
        xp *= x2;
    }
    acc + s
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Γ(x) for 0 < x ≤ 170 (Lanczos, g = 7). Relative error near 1e-15,
/// tighter than exp(ln_gamma) for small arguments.
pub fn gamma(x: f64) -> f64 {
    assert!(x > 0.0, "gamma needs a positive argument");
    if x < 0.5 {
        return gamma(x + 1.0) / x;
    }
    let y = x - 1.0;
    let t = y + LANCZOS_G + 0.5;
    let series = LANCZOS
        .iter()
        .enumerate()
        .skip(1)
        .fold(LANCZOS[0], |acc, (i, c)| acc + c / (y + i as f64));
    (2.0 * PI).sqrt() * t.powf(y + 0.5) * (-t).exp() * series
}

/// ψ(x) = Γ'(x)/Γ(x) for x > 0.
pub fn digamma(x: f64) -> f64 {
    assert!(x > 0.0, "digamma needs a positive argument");
    let mut x = x;
    let mut acc = 0.0;
    while x < SHIFT {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let mut s = x.ln() - 0.5 / x;
    let x2 = x * x;
    let mut xp = x2;
    for (k, b) in BERNOULLI.iter().enumerate().take(8) {
        s -= b / (2.0 * (k + 1) as f64 * xp);
        xp *= x2;
    }
    acc + s
}

/// ln G(1+z) for z > −1, from the large-argument expansion after shifting
/// with G(s+1) = Γ(s)G(s).
pub fn ln_barnes_g1p(z: f64) -> f64 {
    assert!(z > -1.0, "ln_barnes_g1p needs z > -1");
    let mut w = z;
    let mut acc = 0.0;
    while w < SHIFT {
        // ln G(1+w) = ln G(2+w) − ln Γ(1+w)
        acc -= ln_gamma(1.0 + w);
        w += 1.0;
    }
    let lw = w.ln();
    let mut s = 0.5 * w * w * lw - 0.75 * w * w + 0.5 * w * (2.0 * PI).ln() - lw / 12.0
        + ZETA_PRIME_M1;
    let w2 = w * w;
    let mut wp = w2;
    for k in 1..9 {
        let kf = k as f64;
        s += BERNOULLI[k] / (4.0 * kf * (kf + 1.0) * wp);
        wp *= w2;
    }
    acc + s
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GkValue {
    pub k: f64,
    pub value: f64,
    /// ln g_k; `value` underflows past k ≈ 25 but this stays finite.
    pub ln_value: f64,
}

/// g_k = 2^{k/2} G(1+k) √Γ(1+2k) / √(G(1+2k) Γ(1+k)).
pub fn g_k(k: f64) -> Result<GkValue> {
    if k <= -0.5 {
        return Err(EcmError::PoleRegion(k));
    }
    let ln = 0.5 * k * std::f64::consts::LN_2 + ln_barnes_g1p(k) + 0.5 * ln_gamma(1.0 + 2.0 * k)
        - 0.5 * (ln_barnes_g1p(2.0 * k) + ln_gamma(1.0 + k));
    Ok(GkValue { k, value: ln.exp(), ln_value: ln })
}

/// 2^k·Π_{j=1}^{k−1} j!/(2j)! for integer k ≥ 0.
pub fn g_k_factorial(k: u32) -> f64 {
    ln_g_k_factorial(k).exp()
}

pub fn ln_g_k_factorial(k: u32) -> f64 {
    let mut v = k as f64 * std::f64::consts::LN_2;
    for j in 1..k {
        // j!/(2j)! = 1/((j+1)(j+2)⋯(2j))
        for m in (j + 1)..=(2 * j) {
            v -= (m as f64).ln();
        }
    }
    v
}

/// ζ(s) for real s ≠ 1 by Euler–Maclaurin.
pub fn zeta(s: f64) -> f64 {
    assert!(s != 1.0, "zeta has a pole at 1");
    const N: usize = 30;
    let n = N as f64;
    let mut sum: f64 = (1..N).map(|k| (k as f64).powf(-s)).sum();
    sum += n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s);
    // B_{2j}/(2j)! · s(s+1)⋯(s+2j−2) · N^{−s−2j+1}
    let mut rising = s;
    let mut fact = 2.0;
    for (j, b) in BERNOULLI.iter().enumerate() {
        let j = j + 1;
        sum += b / fact * rising * n.powf(-s - 2.0 * j as f64 + 1.0);
        let a = s + 2.0 * j as f64 - 1.0;
        rising *= a * (a + 1.0);
        fact *= ((2 * j + 1) * (2 * j + 2)) as f64;
    }
    sum
}

/// ζ(s)·Π_{p ∈ excluded}(1 − p^{−s}).
pub fn zeta_partial(s: f64, excluded: &[u64]) -> f64 {
    assert!(s > 1.0);
    excluded.iter().fold(zeta(s), |acc, &p| acc * (1.0 - (p as f64).powf(-s)))
}

/// Stieltjes constant γ_n by Euler–Maclaurin applied to (ln x)^n / x.
pub fn stieltjes(n: u32) -> f64 {
    const N: usize = 30;
    let big = N as f64;
    let l = big.ln();
    let f = |x: f64| x.ln().powi(n as i32) / x;
    let mut s: f64 = (1..N).map(|k| f(k as f64)).sum();
    s += 0.5 * f(big) - l.powi(n as i32 + 1) / (n as f64 + 1.0);
    // f^{(m)}(x) = x^{−1−m} Σ_i c_i (ln x)^i; start from m = 0.
    let mut c = vec![0.0; n as usize + 1];
    c[n as usize] = 1.0;
    let mut fact = 1.0;
    for m in 0..16 {
        // differentiate once: coefficient of L^i gets (−1−m)c_i + (i+1)c_{i+1}
        let mut d = vec![0.0; c.len()];
        for i in 0..c.len() {
            d[i] = (-1.0 - m as f64) * c[i] + if i + 1 < c.len() { (i + 1) as f64 * c[i + 1] } else { 0.0 };
        }
        c = d;
        let order = m + 1;
        fact *= order as f64;
        if order % 2 == 1 {
            let j = (order + 1) / 2;
            if j > BERNOULLI.len() {
                break;
            }
            let poly: f64 = c.iter().enumerate().map(|(i, ci)| ci * l.powi(i as i32)).sum();
            let deriv = big.powf(-1.0 - order as f64) * poly;
            s -= BERNOULLI[j - 1] / (fact * (order + 1) as f64) * deriv;
        }
    }
    s
}

/// γ_0, …, γ_order with ζ(1+z) = 1/z + Σ (−1)ⁿ γ_n zⁿ / n!.
pub fn zeta_laurent(order: usize) -> Result<Vec<f64>> {
    static CACHE: OnceLock<Vec<f64>> = OnceLock::new();
    if order > 6 {
        return Err(EcmError::OutOfRange(order as u64));
    }
    let all = CACHE.get_or_init(|| (0..=6).map(stieltjes).collect());
    Ok(all[..=order].to_vec())
}

/// Taylor coefficients of z·ζ(1+z) = 1 + Σ_{n≥0} (−1)ⁿ γ_n z^{n+1}/n!.
pub fn zeta_regular_series(order: usize) -> Result<Vec<f64>> {
    let g = zeta_laurent(order.saturating_sub(1).min(6))?;
    let mut out = vec![0.0; order + 1];
    out[0] = 1.0;
    let mut fact = 1.0;
    for n in 0..order {
        if n > 0 {
            fact *= n as f64;
        }
        out[n + 1] = if n % 2 == 0 { 1.0 } else { -1.0 } * g[n] / fact;
    }
    Ok(out)
}

/// 1/ζ(1+z), regular through z = 0.
pub fn zeta_recip_1p(z: f64) -> f64 {
    if z.abs() > 1e-3 {
        return 1.0 / zeta(1.0 + z);
    }
    let c = zeta_regular_series(6).expect("order within range");
    let reg: f64 = c.iter().rev().fold(0.0, |acc, ci| acc * z + ci);
    z / reg
}

/// Upper incomplete gamma Γ(a, x) for a > 0, x > 0.
///
/// Power series for γ(a, x) below x = a + 1, modified Lentz continued
/// fraction above.
pub fn gamma_upper(a: f64, x: f64) -> f64 {
    assert!(a > 0.0 && x > 0.0, "gamma_upper needs a > 0 and x > 0");
    let log_pref = a * x.ln() - x;
    if x < a + 1.0 {
        let (mut term, mut sum, mut n) = (1.0 / a, 1.0 / a, a);
        while term.abs() > sum.abs() * 1e-17 {
            n += 1.0;
            term *= x / n;
            sum += term;
        }
        gamma(a) - sum * log_pref.exp()
    } else {
        log_pref.exp() * lentz(|k| (k * (a - k), x + 2.0 * k + 1.0 - a), x + 1.0 - a)
    }
}

/// E₁(x) = ∫_x^∞ e^{−t}/t dt for x > 0.
pub fn exp_e1(x: f64) -> f64 {
    assert!(x > 0.0, "exp_e1 needs a positive argument");
    if x < 1.0 {
        let (mut term, mut sum, mut k) = (1.0, 0.0, 0.0);
        loop {
            k += 1.0;
            term *= -x / k;
            let add = -term / k;
            sum += add;
            if add.abs() < 1e-17 {
                break;
            }
        }
        -EULER_GAMMA - x.ln() + sum
    } else {
        (-x).exp() * lentz(|k| (-k * k, x + 2.0 * k + 1.0), x + 1.0)
    }
}

/// 1/(b0 + a1/(b1 + a2/(b2 + …))) with (a_k, b_k) = terms(k).
fn lentz(terms: impl Fn(f64) -> (f64, f64), b0: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = if b0 == 0.0 { TINY } else { b0 };
    let (mut c, mut d) = (f, 0.0);
    for k in 1..10_000 {
        let (ak, bk) = terms(k as f64);
        d = bk + ak * d;
        if d == 0.0 {
            d = TINY;
        }
        c = bk + ak / c;
        if c == 0.0 {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    1.0 / f
}
