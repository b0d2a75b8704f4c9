//! Numerical L-values through the smoothed approximate functional equation.
//!
//! With A = 2π/√N and S = s + 1/2 the completed function is
//!
//!   Λ(s) = Σ λ(n)·[A^{−S} n^{−s} Γ(S, A n t) + w A^{S−2} n^{s−1} Γ(2−S, A n / t)]
//!
//! for every t > 0. Evaluating at t = 1 and t = 1.2 and comparing gives a
//! self-consistency defect, which drives the conductor search at 2 (and 3),
//! the choice of root number, and the error reported with every value.

use crate::arith::{factor, primes_up_to};
use crate::curves::{ap_bsgs, CurvePair};
use crate::error::{EcmError, Result};
use crate::special::{exp_e1, gamma, gamma_upper, EULER_GAMMA};
use rayon::prelude::*;
use std::f64::consts::PI;

/// Smoothing cutoffs: the primary kernel and the one used for cross-checks.
pub const T_PRIMARY: f64 = 1.0;
pub const T_ALT: f64 = 1.2;

const SEARCH_EPS: f64 = 1e-13;
const TIE_TOL: f64 = 1e-8;
const SIGN_GAP: f64 = 10.0;
const MAX_TERMS: usize = 40_000_000;
/// Above this, a_p comes from baby-step giant-step instead of a full sum.
const BSGS_FROM: u64 = 400;
/// Real test points (values of s) for the self-consistency defect.
const PROBES: [f64; 2] = [0.67, 0.83];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConductorMethod {
    /// Every exponent came from factoring the discriminant.
    ExactOddPart,
    /// The exponent at 2 (and at 3 when 3 | Δ) came from the defect search.
    SearchAt2,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConductorResult {
    pub n: u64,
    pub exp2: u32,
    pub exp3: u32,
    pub method: ConductorMethod,
    /// Self-consistency defect at the chosen (N, w).
    pub defect: f64,
    /// Root number that achieved `defect`.
    pub w: i8,
    /// Defect of the same N with the opposite sign.
    pub defect_other_sign: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CentralValue {
    pub value: f64,
    pub w: i8,
    pub terms_used: usize,
    pub defect: f64,
}

/// λ(n) for 1 ≤ n ≤ m (index 0 unused).
pub fn lambda_table(c: &CurvePair, m: usize) -> Vec<f64> {
    let mut lam = vec![0.0; m + 1];
    if m == 0 {
        return lam;
    }
    lam[1] = 1.0;
    let mut spf = vec![0u32; m + 1];
    let mut chi = Vec::new();
    for p in primes_up_to(m as u64) {
        let pu = p as usize;
        let mut q = pu;
        while q <= m {
            if spf[q] == 0 {
                spf[q] = p as u32;
            }
            q += pu;
        }
        let (lp, good) = match p {
            2 | 3 => {
                let t = c.trace(p);
                (t.lambda(), t.good)
            }
            _ => {
                let good = !c.is_bad(p);
                let ap = match good && p >= BSGS_FROM {
                    true => ap_bsgs(c.a, c.b, p).unwrap_or_else(|| fast_ap(c.a, c.b, p, &mut chi)),
                    false => fast_ap(c.a, c.b, p, &mut chi),
                };
                (ap as f64 / (p as f64).sqrt(), good)
            }
        };
        let (mut prev, mut cur, mut q) = (1.0, lp, pu);
        loop {
            lam[q] = cur;
            match q.checked_mul(pu) {
                Some(next) if next <= m => q = next,
                _ => break,
            }
            let nxt = if good { lp * cur - prev } else { lp * cur };
            (prev, cur) = (cur, nxt);
        }
    }
    for n in 2..=m {
        let p = spf[n] as usize;
        let (mut r, mut pk) = (n / p, p);
        while r % p == 0 {
            r /= p;
            pk *= p;
        }
        if r > 1 {
            lam[n] = lam[pk] * lam[r];
        }
    }
    lam
}

/// a_p = −Σ_x χ(x³ + ax + b) for p ≥ 5 using finite differences, so the
/// inner loop has no multiplications.
fn fast_ap(a: i64, b: i64, p: u64, chi: &mut Vec<i8>) -> i64 {
    let pu = p as usize;
    chi.clear();
    chi.resize(pu, -1);
    chi[0] = 0;
    // squares via (x+1)² = x² + 2x + 1
    let (mut sq, mut step) = (0usize, 1usize);
    for _ in 1..=pu / 2 {
        sq += step;
        if sq >= pu {
            sq -= pu;
        }
        chi[sq] = 1;
        step += 2;
        if step >= pu {
            step -= pu;
        }
    }
    let am = a.rem_euclid(p as i64) as usize;
    let bm = b.rem_euclid(p as i64) as usize;
    // v(x) = x³+ax+b, d1 = v(x+1)−v(x) = 3x²+3x+1+a, d2 = 6x+6
    let (mut v, mut d1, mut d2) = (bm, (1 + am) % pu, 6 % pu);
    let mut s = 0i64;
    for _ in 0..pu {
        s += chi[v] as i64;
        v += d1;
        if v >= pu {
            v -= pu;
        }
        d1 += d2;
        if d1 >= pu {
            d1 -= pu;
        }
        d2 += 6;
        if d2 >= pu {
            d2 -= pu;
        }
        if d2 >= pu {
            d2 -= pu;
        }
    }
    -s
}

fn scale_a(n: u64) -> f64 {
    2.0 * PI / (n as f64).sqrt()
}

/// Number of terms after which both smoothed sums are below `eps` relative.
fn terms_for(n: u64, eps: f64) -> usize {
    let a = scale_a(n);
    let m = T_ALT * ((1.0 / eps).ln() + (1.0 + 1.0 / a).ln() + 5.0) / a;
    (m.ceil() as usize).max(16)
}

/// The two halves of Λ(s) at cutoff t: Λ = f1 + w·f2.
fn completed_parts(lam: &[f64], n: u64, s: f64, t: f64, m: usize) -> (f64, f64) {
    let a = scale_a(n);
    let big_s = s + 0.5;
    let (mut f1, mut f2) = (0.0, 0.0);
    for (k, &l) in lam.iter().enumerate().take(m + 1).skip(1) {
        if l == 0.0 {
            continue;
        }
        let x = a * k as f64;
        let kf = k as f64;
        f1 += l * kf.powf(-s) * gamma_upper(big_s, x * t);
        f2 += l * kf.powf(s - 1.0) * gamma_upper(2.0 - big_s, x / t);
    }
    (a.powf(-big_s) * f1, a.powf(big_s - 2.0) * f2)
}

/// Relative self-consistency defect for both signs: (w = +1, w = −1).
fn sign_defects(lam: &[f64], n: u64, m: usize) -> (f64, f64) {
    let (mut plus, mut minus) = (0.0f64, 0.0f64);
    for &s in &PROBES {
        let (a1, a2) = completed_parts(lam, n, s, T_PRIMARY, m);
        let (b1, b2) = completed_parts(lam, n, s, T_ALT, m);
        let scale = a1.abs() + a2.abs();
        plus = plus.max(((a1 + a2) - (b1 + b2)).abs() / scale);
        minus = minus.max(((a1 - a2) - (b1 - b2)).abs() / scale);
    }
    (plus, minus)
}

fn odd_part(c: &CurvePair) -> Result<(u64, bool)> {
    let d = c.disc_core().unsigned_abs();
    if d > u64::MAX as u128 {
        return Err(EcmError::Unsupported("4a^3 + 27b^2 exceeds 64 bits".into()));
    }
    let f = factor(d as u64).ok_or(EcmError::FactorizationTimeout(d))?;
    let mut n = 1u64;
    let mut three = false;
    for (p, _) in f {
        if p == 2 {
            continue;
        }
        if !c.is_minimal_at(p) {
            return Err(EcmError::NonMinimal(p));
        }
        if p == 3 {
            three = true;
            continue;
        }
        let e = if c.a.rem_euclid(p as i64) == 0 { 2 } else { 1 };
        n = n.checked_mul(p.pow(e)).ok_or(EcmError::Overflow)?;
    }
    Ok((n, three))
}

/// Conductor: odd part from the discriminant, exp2 ∈ 0..=8 (and exp3 ∈ 2..=5
/// when 3 | Δ) by minimizing the functional-equation defect jointly with w.
pub fn conductor(c: &CurvePair) -> Result<ConductorResult> {
    let (odd, three) = odd_part(c)?;
    let e3s: Vec<u32> = if three { (2..=5).collect() } else { vec![0] };
    let mut cands = Vec::new();
    for &e3 in &e3s {
        for e2 in 0..=8u32 {
            let n = odd
                .checked_mul(3u64.pow(e3))
                .and_then(|v| v.checked_mul(1 << e2))
                .ok_or(EcmError::Overflow)?;
            cands.push((n, e2, e3));
        }
    }
    let nmax = cands.iter().map(|c| c.0).max().expect("nonempty");
    let m = terms_for(nmax, SEARCH_EPS);
    if m > MAX_TERMS {
        return Err(EcmError::Unsupported(format!("conductor search needs {m} terms")));
    }
    let lam = lambda_table(c, m);
    let mut scored: Vec<(f64, f64, i8, u64, u32, u32)> = cands
        .par_iter()
        .map(|&(n, e2, e3)| {
            let (p, q) = sign_defects(&lam, n, terms_for(n, SEARCH_EPS));
            let (best, other, w) = if p <= q { (p, q, 1) } else { (q, p, -1) };
            (best, other, w, n, e2, e3)
        })
        .collect();
    scored.sort_by(|x, y| x.0.total_cmp(&y.0));
    let best = scored[0];
    if scored.len() > 1 && scored[1].0 - best.0 <= TIE_TOL {
        return Err(EcmError::AmbiguousConductor(best.3, scored[1].3));
    }
    Ok(ConductorResult {
        n: best.3,
        exp2: best.4,
        exp3: best.5,
        method: ConductorMethod::SearchAt2,
        defect: best.0,
        w: best.2,
        defect_other_sign: best.1,
    })
}

/// Conductor with a caller-supplied exponent at 2 (3 ∤ Δ required); w is
/// still chosen numerically.
pub fn conductor_with_exp2(c: &CurvePair, exp2: u32) -> Result<ConductorResult> {
    let (odd, three) = odd_part(c)?;
    if three {
        return Err(EcmError::Unsupported("3 | discriminant needs the search".into()));
    }
    let n = odd.checked_mul(1u64 << exp2).ok_or(EcmError::Overflow)?;
    let m = terms_for(n, SEARCH_EPS);
    let lam = lambda_table(c, m);
    let (p, q) = sign_defects(&lam, n, m);
    let (defect, other, w) = if p <= q { (p, q, 1) } else { (q, p, -1) };
    Ok(ConductorResult {
        n,
        exp2,
        exp3: 0,
        method: ConductorMethod::ExactOddPart,
        defect,
        w,
        defect_other_sign: other,
    })
}

/// Sign of the functional equation, with the 10× gap requirement.
pub fn root_number_numeric(c: &CurvePair) -> Result<i8> {
    let r = conductor(c)?;
    sign_with_gap(&r)
}

fn sign_with_gap(r: &ConductorResult) -> Result<i8> {
    if r.defect_other_sign < SIGN_GAP * r.defect {
        let (plus, minus) = if r.w == 1 {
            (r.defect, r.defect_other_sign)
        } else {
            (r.defect_other_sign, r.defect)
        };
        return Err(EcmError::IndeterminateSign { plus, minus });
    }
    Ok(r.w)
}

/// An L-function with its conductor and sign fixed, ready for evaluation.
#[derive(Debug, Clone)]
pub struct LFunction {
    pub curve: CurvePair,
    pub n: u64,
    pub w: i8,
    lam: Vec<f64>,
}

impl LFunction {
    /// Runs the conductor search and the sign gap check.
    pub fn new(c: &CurvePair) -> Result<Self> {
        let r = conductor(c)?;
        let w = sign_with_gap(&r)?;
        Ok(Self::with_data(c, r.n, w))
    }

    pub fn with_data(c: &CurvePair, n: u64, w: i8) -> Self {
        Self { curve: *c, n, w, lam: vec![0.0, 1.0] }
    }

    fn ensure(&mut self, m: usize) {
        if self.lam.len() <= m {
            self.lam = lambda_table(&self.curve, m);
        }
    }

    pub fn scale(&self) -> f64 {
        scale_a(self.n)
    }

    /// X(s) = A^{2s−1}Γ(3/2−s)/Γ(s+1/2); L(s) = w X(s) L(1−s).
    pub fn x_factor(&self, s: f64) -> f64 {
        self.scale().powf(2.0 * s - 1.0) * gamma(1.5 - s) / gamma(s + 0.5)
    }

    /// L(s) from `m` terms with cutoff t.
    pub fn l_value(&mut self, s: f64, t: f64, m: usize) -> f64 {
        self.ensure(m);
        let (f1, f2) = completed_parts(&self.lam, self.n, s, t, m);
        (f1 + self.w as f64 * f2) * self.scale().powf(s + 0.5) / gamma(s + 0.5)
    }

    /// L′(1/2) from `m` terms with cutoff t, by differentiating each term.
    pub fn l_prime_half(&mut self, t: f64, m: usize) -> f64 {
        self.ensure(m);
        let a = self.scale();
        let w = self.w as f64;
        let lt = t.ln();
        let (mut lam0, mut dlam) = (0.0, 0.0);
        for (k, &l) in self.lam.iter().enumerate().take(m + 1).skip(1) {
            if l == 0.0 {
                continue;
            }
            let x = a * k as f64;
            let coef = l * (k as f64).sqrt() / x;
            let (e1, e2) = ((-x * t).exp(), (-x / t).exp());
            lam0 += coef * (e1 + w * e2);
            dlam += coef * ((e1 * lt + exp_e1(x * t)) - w * (exp_e1(x / t) - e2 * lt));
        }
        a * (dlam + lam0 * (a.ln() + EULER_GAMMA))
    }

    /// Rigorous-in-shape bound on the dropped tail of the L(s) sums under
    /// |λ(n)| ≤ d(n) ≤ 2√n.
    pub fn tail_bound(&self, s: f64, t: f64, m: usize) -> f64 {
        let a = self.scale();
        let big_s = s + 0.5;
        let g = gamma(big_s);
        let one = |pref: f64, sigma: f64, ga: f64, beta: f64| -> f64 {
            // term_n ≤ pref·2√n·n^{−σ}·2(βn)^{ga−1}e^{−βn} when βn ≥ 2·max(ga,1)
            let mf = m as f64;
            if beta * mf < 2.0 * ga.max(1.0) {
                return f64::INFINITY;
            }
            let c = 0.5 - sigma + ga - 1.0;
            let k = 4.0 * pref * beta.powf(ga - 1.0);
            let gm = k * mf.powf(c) * (-beta * mf).exp();
            let denom = if c > 0.0 { beta - c / mf } else { beta };
            if denom <= 0.0 {
                return f64::INFINITY;
            }
            gm + gm / denom
        };
        one(1.0 / g, s, big_s, a * t) + one(a.powf(2.0 * big_s - 2.0) / g, 1.0 - s, 2.0 - big_s, a / t)
    }

    /// L(1/2 + α) to the requested defect.
    pub fn central(&mut self, alpha: f64, target: f64) -> Result<CentralValue> {
        if alpha.abs() > 0.25 {
            return Err(EcmError::OutsideRegion(alpha));
        }
        let s = 0.5 + alpha;
        let mut m = terms_for(self.n, target.min(1e-6) * 1e-2);
        loop {
            let v1 = self.l_value(s, T_PRIMARY, m);
            let v2 = self.l_value(s, T_ALT, m);
            let defect = (v1 - v2).abs().max(self.tail_bound(s, T_PRIMARY, m));
            if defect <= target {
                return Ok(CentralValue { value: v1, w: self.w, terms_used: m, defect });
            }
            if m >= MAX_TERMS {
                return Err(EcmError::NeedsMoreTerms { defect, target });
            }
            m = (m * 3 / 2).min(MAX_TERMS);
        }
    }

    /// L′(1/2) to the requested defect.
    pub fn derivative(&mut self, target: f64) -> Result<CentralValue> {
        let mut m = terms_for(self.n, target.min(1e-6) * 1e-2);
        loop {
            let v1 = self.l_prime_half(T_PRIMARY, m);
            let v2 = self.l_prime_half(T_ALT, m);
            let a = self.scale();
            let tail = self.tail_bound(0.5, T_PRIMARY, m) * (2.0 + a.ln().abs() + 1.0 / a);
            let defect = (v1 - v2).abs().max(tail);
            if defect <= target {
                return Ok(CentralValue { value: v1, w: self.w, terms_used: m, defect });
            }
            if m >= MAX_TERMS {
                return Err(EcmError::NeedsMoreTerms { defect, target });
            }
            m = (m * 3 / 2).min(MAX_TERMS);
        }
    }
}

/// L(1/2 + α, E) with conductor and sign found numerically.
pub fn l_shifted(c: &CurvePair, alpha: f64, target_defect: f64) -> Result<CentralValue> {
    if alpha.abs() > 0.25 {
        return Err(EcmError::OutsideRegion(alpha));
    }
    LFunction::new(c)?.central(alpha, target_defect)
}

/// L′(1/2, E).
pub fn l_prime_central(c: &CurvePair) -> Result<CentralValue> {
    LFunction::new(c)?.derivative(1e-8)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::lambda_n;

    #[test]
    fn lambda_table_matches_direct() {
        let c = CurvePair::new(1, 1).unwrap();
        let t = lambda_table(&c, 400);
        for n in 1..=400u64 {
            let d = lambda_n(&c, n).unwrap();
            assert!((t[n as usize] - d).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn fast_ap_matches_legendre() {
        let mut chi = Vec::new();
        for p in [5u64, 7, 11, 101, 997] {
            for (a, b) in [(1, 1), (-7, 3), (2, -5), (0, 4)] {
                assert_eq!(fast_ap(a, b, p, &mut chi), CurvePair::new(a, b).unwrap().trace(p).ap);
            }
        }
    }

    #[test]
    fn conductor_of_e11() {
        let r = conductor(&CurvePair::new(1, 1).unwrap()).unwrap();
        assert_eq!((r.n, r.exp2, r.exp3), (496, 4, 0));
        assert!(r.defect < 1e-10);
        assert!(r.defect_other_sign > 1e3 * r.defect);
    }

    #[test]
    fn singular_is_rejected_upstream() {
        assert!(CurvePair::new(-3, 2).is_err());
    }

    #[test]
    fn functional_equation_ratio() {
        let mut f = LFunction::new(&CurvePair::new(-1, 3).unwrap()).unwrap();
        let hi = f.central(0.1, 1e-11).unwrap().value;
        let lo = f.central(-0.1, 1e-11).unwrap().value;
        assert!((hi - f.w as f64 * f.x_factor(0.6) * lo).abs() < 1e-8);
    }

    #[test]
    fn odd_sign_vanishes_and_derivative_matches_difference() {
        let mut f = LFunction::new(&CurvePair::new(2, 1).unwrap()).unwrap();
        assert_eq!(f.w, -1);
        let v = f.central(0.0, 1e-10).unwrap();
        assert!(v.value.abs() < 1e-8);
        let d = f.derivative(1e-9).unwrap();
        let h = 1e-4;
        let fd = (f.central(h, 1e-12).unwrap().value - f.central(-h, 1e-12).unwrap().value) / (2.0 * h);
        assert!((d.value - fd).abs() < 1e-5, "{} vs {}", d.value, fd);
        assert!(d.value.abs() > 1e-3);
    }
}
