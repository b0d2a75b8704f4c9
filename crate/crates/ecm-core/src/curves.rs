//! Per-curve arithmetic for short Weierstrass models y² = x³ + ax + b.
//!
//! Conventions:
//! * a prime p is *bad* when p | 16(4a³ + 27b²), so 2 is always bad and
//!   λ(2^k) = 0 for k ≥ 1;
//! * at good p the normalized coefficients follow the Hecke recurrence, so
//!   λ(p^j) = U_j(λ(p)/2); at bad p they are powers of λ(p);
//! * `ghat` is the integer p^{j/2}·λ(p^j), which is what every exact sum uses.

use crate::arith::{self, factor, jacobi, legendre, mobius, rem, valuation};
use crate::error::{EcmError, Result};
use num_bigint::BigInt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CurvePair {
    pub a: i64,
    pub b: i64,
    /// Δ = −16(4a³ + 27b²)
    pub disc: i128,
    pub c4: i128,
    pub c6: i128,
}

impl CurvePair {
    pub fn new(a: i64, b: i64) -> Result<Self> {
        let core = disc_core(a, b);
        if core == 0 {
            return Err(EcmError::Singular);
        }
        Ok(Self { a, b, disc: -16 * core, c4: -48 * a as i128, c6: -864 * b as i128 })
    }

    /// 4a³ + 27b²
    pub fn disc_core(&self) -> i128 {
        disc_core(self.a, self.b)
    }

    pub fn is_bad(&self, p: u64) -> bool {
        p == 2 || rem(self.disc_core(), p) == 0
    }

    /// Minimality test at p: fails only if p¹² | Δ, p⁴ | c4 and p⁶ | c6 together.
    pub fn is_minimal_at(&self, p: u64) -> bool {
        let divides = |n: i128, e: u32| n == 0 || valuation(n, p) >= e;
        !(divides(self.disc, 12) && divides(self.c4, 4) && divides(self.c6, 6))
    }

    pub fn trace(&self, p: u64) -> FrobeniusTrace {
        ap_legendre(self.a, self.b, p)
    }

    /// λ(p^j), normalized so that |λ(p)| ≤ 2 at good p.
    pub fn lambda_prime_power(&self, p: u64, j: u32) -> f64 {
        self.trace(p).lambda_power(j)
    }
}

fn disc_core(a: i64, b: i64) -> i128 {
    let (a, b) = (a as i128, b as i128);
    4 * a * a * a + 27 * b * b
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrobeniusTrace {
    pub p: u64,
    pub ap: i64,
    pub good: bool,
}

impl FrobeniusTrace {
    pub fn lambda(&self) -> f64 {
        self.ap as f64 / (self.p as f64).sqrt()
    }

    pub fn lambda_power(&self, j: u32) -> f64 {
        if self.good {
            crate::chebyshev::u_eval(j, self.lambda() / 2.0)
        } else {
            self.lambda().powi(j as i32)
        }
    }

    /// p^{j/2}·λ(p^j) as an exact integer, `None` on i128 overflow.
    pub fn ghat(&self, j: u32) -> Option<i128> {
        if self.good {
            ghat_good(self.ap as i128, self.p as i128, j)
        } else {
            (self.ap as i128).checked_pow(j)
        }
    }

    pub fn ghat_big(&self, j: u32) -> BigInt {
        if self.good {
            ghat_good_big(self.ap, self.p, j)
        } else {
            BigInt::from(self.ap).pow(j)
        }
    }
}

/// Ĝ_0 = 1, Ĝ_1 = t, Ĝ_{j+1} = t·Ĝ_j − p·Ĝ_{j−1}.
pub fn ghat_good(t: i128, p: i128, j: u32) -> Option<i128> {
    let (mut g0, mut g1) = (1i128, t);
    if j == 0 {
        return Some(1);
    }
    for _ in 1..j {
        let next = t.checked_mul(g1)?.checked_sub(p.checked_mul(g0)?)?;
        (g0, g1) = (g1, next);
    }
    Some(g1)
}

pub fn ghat_good_big(t: i64, p: u64, j: u32) -> BigInt {
    let (t, p) = (BigInt::from(t), BigInt::from(p));
    let (mut g0, mut g1) = (BigInt::from(1), t.clone());
    if j == 0 {
        return g0;
    }
    for _ in 1..j {
        let next = &t * &g1 - &p * &g0;
        g0 = std::mem::replace(&mut g1, next);
    }
    g1
}

/// a_p = −Σ_x ((x³+ax+b)/p) for odd p, and 0 at p = 2.
pub fn ap_legendre(a: i64, b: i64, p: u64) -> FrobeniusTrace {
    let good = p != 2 && rem(disc_core(a, b), p) != 0;
    if p == 2 {
        return FrobeniusTrace { p, ap: 0, good };
    }
    let (a, b) = (a as i128, b as i128);
    let s: i64 = (0..p as i128).map(|x| legendre(x * x * x + a * x + b, p) as i64).sum();
    FrobeniusTrace { p, ap: -s, good }
}

/// #E(F_p) including the point at infinity, by counting square roots.
pub fn count_points(a: i64, b: i64, p: u64) -> u64 {
    let mut roots = vec![0u64; p as usize];
    for y in 0..p {
        roots[(y * y % p) as usize] += 1;
    }
    let (a, b) = (rem(a as i128, p), rem(b as i128, p));
    1 + (0..p)
        .map(|x| roots[((x * x % p * x + a * x + b) % p) as usize])
        .sum::<u64>()
}

/// λ(n) by multiplicativity.
pub fn lambda_n(c: &CurvePair, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(EcmError::ZeroIndex);
    }
    let f = factor(n).ok_or(EcmError::FactorizationTimeout(n as u128))?;
    Ok(f.iter().map(|&(p, j)| c.lambda_prime_power(p, j)).product())
}

fn chi4(b: i64) -> i8 {
    match b.rem_euclid(4) {
        1 => 1,
        3 => -1,
        _ => 0,
    }
}

/// w = μ(4a³+27b²)·(a/3b)·χ₄(b)·(−1)^{a+1}·ε₂ on squarefree 4a³+27b².
///
/// μ is applied to |4a³+27b²| and the Jacobi symbol to the modulus 3|b|.
/// With those absolute values the real Hilbert symbol (b, 4a³+27b²)_∞ has
/// to be restored: it is −1 exactly when both are negative.
pub fn root_number_formula(a: i64, b: i64, eps2: i8) -> Result<i8> {
    assert!(eps2 == 1 || eps2 == -1, "eps2 must be a sign");
    if b == 0 {
        return Err(EcmError::UndefinedSymbol);
    }
    let d = disc_core(a, b);
    let m = if d.unsigned_abs() <= u64::MAX as u128 {
        mobius(d.unsigned_abs() as u64)
    } else {
        return Err(EcmError::Unsupported("4a^3 + 27b^2 exceeds 64 bits".into()));
    };
    if m == 0 {
        return Err(EcmError::NotSquarefree(d));
    }
    let j = jacobi(a as i128, 3 * b.unsigned_abs());
    if j == 0 {
        return Err(EcmError::UndefinedSymbol);
    }
    let parity = if (a + 1).rem_euclid(2) == 0 { 1 } else { -1 };
    let hilbert = if b < 0 && d < 0 { -1 } else { 1 };
    Ok(m * j * chi4(b) * parity * hilbert * eps2)
}

/// Lutz-Nagell screen for the point (0, b) on E_{a,b²}: true iff b² | 4a³.
pub fn is_torsion_candidate(a: i64, b: i64) -> bool {
    let (a, b) = (a as i128, b as i128);
    let b2 = b * b;
    let rhs = 4 * a * a * a;
    if b2 == 0 {
        return rhs == 0;
    }
    rhs % b2 == 0
}

/// Odd primes dividing 4a³ + 27b², with multiplicity.
pub fn bad_primes(c: &CurvePair) -> Option<Vec<(u64, u32)>> {
    let d = c.disc_core().unsigned_abs();
    if d > u64::MAX as u128 {
        return None;
    }
    arith::factor(d as u64)
}

type Point = Option<(u64, u64)>;

fn inv_mod(a: u64, p: u64) -> u64 {
    let (mut r0, mut r1) = (p as i64, a as i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    t0.rem_euclid(p as i64) as u64
}

/// Affine group law on y² = x³ + ax + b over F_p (p < 2³¹).
fn pt_add(u: Point, v: Point, a: u64, p: u64) -> Point {
    let ((x1, y1), (x2, y2)) = match (u, v) {
        (None, _) => return v,
        (_, None) => return u,
        (Some(u), Some(v)) => (u, v),
    };
    let lam = if x1 == x2 {
        if (y1 + y2) % p == 0 {
            return None;
        }
        (3 * x1 % p * x1 % p + a) % p * inv_mod(2 * y1 % p, p) % p
    } else {
        (y2 + p - y1) % p * inv_mod((x2 + p - x1) % p, p) % p
    };
    let x3 = (lam * lam % p + 2 * p - x1 - x2) % p;
    let y3 = (lam * ((x1 + p - x3) % p) % p + p - y1) % p;
    Some((x3, y3))
}

fn pt_neg(u: Point, p: u64) -> Point {
    u.map(|(x, y)| (x, (p - y) % p))
}

fn pt_mul(mut u: Point, mut k: u64, a: u64, p: u64) -> Point {
    let mut acc = None;
    while k > 0 {
        if k & 1 == 1 {
            acc = pt_add(acc, u, a, p);
        }
        u = pt_add(u, u, a, p);
        k >>= 1;
    }
    acc
}

/// Every t in [−2√p, 2√p] with (p + 1 − t)·P = O, by baby-step giant-step.
fn bsgs_candidates(pt: Point, a: u64, p: u64) -> Vec<i64> {
    let bound = (2.0 * (p as f64).sqrt()).floor() as i64;
    let width = (2 * bound + 1) as u64;
    let m = ((width as f64).sqrt().ceil() as u64).max(1);
    let mut baby: Vec<(Point, u64)> = Vec::with_capacity(m as usize);
    let mut cur = None;
    for j in 0..m {
        baby.push((cur, j));
        cur = pt_add(cur, pt, a, p);
    }
    baby.sort_unstable();
    // t·P = (p+1)·P with t = −bound + i·m + j  ⇔  j·P = (p+1+bound)·P − i·(m·P)
    let mut r = pt_mul(pt, p + 1 + bound as u64, a, p);
    let step = pt_neg(cur, p);
    let mut out = Vec::new();
    for i in 0..=width / m {
        let lo = baby.partition_point(|e| e.0 < r);
        for e in &baby[lo..] {
            if e.0 != r {
                break;
            }
            let t = -bound + (i * m + e.1) as i64;
            if t <= bound {
                out.push(t);
            }
        }
        r = pt_add(r, step, a, p);
    }
    out
}

/// a_p at a good prime p ≥ 5 by baby-step giant-step on points of E and
/// its quadratic twist; `None` if a few points do not pin it down.
pub fn ap_bsgs(a: i64, b: i64, p: u64) -> Option<i64> {
    if p < 5 || p >= 1 << 31 {
        return None;
    }
    let (am, bm) = (rem(a as i128, p), rem(b as i128, p));
    if (4 * am % p * am % p * am + 27 * bm % p * bm) % p == 0 {
        return None;
    }
    let mut live: Option<Vec<i64>> = None;
    let mut tries = 0;
    for x0 in 0..p {
        let d = (x0 * x0 % p * x0 + am * x0 + bm) % p;
        if d == 0 {
            continue;
        }
        // (d·x0, d²) lies on y² = x³ + a d² x + b d³, which is E when d is a
        // square and its twist otherwise.
        let d2 = d * d % p;
        let ad = am * d2 % p;
        let sign = jacobi(d as i128, p) as i64;
        let cands: Vec<i64> =
            bsgs_candidates(Some((d * x0 % p, d2)), ad, p).into_iter().map(|t| sign * t).collect();
        let next: Vec<i64> = match live {
            None => cands,
            Some(prev) => prev.into_iter().filter(|t| cands.contains(t)).collect(),
        };
        if next.len() == 1 {
            return Some(next[0]);
        }
        live = Some(next);
        tries += 1;
        if tries == 8 {
            return None;
        }
    }
    None
}
