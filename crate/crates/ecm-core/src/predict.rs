//! Conjectural predictions: the polynomials P_k and Q_k from their contour
//! integrals, leading-order moments, rank-two ratios, and the first-moment
//! identity behind the zero-free region for ζ.
//!
//! The contour integrals are evaluated as residues. With
//! R(s) = s·ζ(1 + s) and Y(z) = X^{−1/2}(1/2 + z) = e^{zL}·Γ(1+z)^{1/2}Γ(1−z)^{−1/2},
//! L = log(√N/2π), the P_k integrand is
//!
//!   A_k(z)·Π Y(z_i)·Π_{i<j} (z_j − z_i)²(z_i + z_j) R(z_i + z_j) / Π z_i^{2k−2} · Π z_i^{−1},
//!
//! so P_k is (−1)^{k(k−1)/2} 2^k/k! times the coefficient of Π z_i^{2k−2} in the
//! numerator. Q_k carries the extra Π z_i^{−1} and Π 1/ζ(1 + z_i) = Π z_i/R(z_i),
//! which cancel in the pole count.

use crate::arith::{is_squarefree, mobius};
use crate::curves::{ap_legendre, count_points, lambda_n};
use crate::error::{EcmError, Result};
use crate::euler::{
    a1prime, ak, all_curve_classes, aprime_local, class_expectation, local_l, Classes,
    SquareClassTable,
};
use crate::families::{enumerate, FamilySpec, Variant};
use crate::orthogonality::qsquare_p_closed;
use crate::series::{exp_univariate, inv_univariate, TruncatedSeries};
use crate::special::{g_k, zeta, zeta_recip_1p, zeta_regular_series, EULER_GAMMA};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use std::f64::consts::PI;

/// Central step for the finite differences of A_k.
const FD_STEP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Form {
    LeadingOrder,
    FullPolynomialK1,
    FullPolynomialK2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentKind {
    /// Moments of L(1/2, E).
    Value,
    /// Moments of L′(1/2, E).
    Derivative,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentPrediction {
    pub k: f64,
    pub family: FamilySpec,
    pub form: Form,
    /// Polynomial in log N, constant term first.
    pub coefficients: Vec<f64>,
    /// Whether `coefficients` already include the global 1/2.
    pub half_factor_applied: bool,
}

impl MomentPrediction {
    pub fn eval(&self, log_n: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, c| acc * log_n + c)
    }

    /// The conjectured family mean at conductor N, with the 1/2 applied once.
    pub fn mean_at(&self, log_n: f64) -> f64 {
        let v = self.eval(log_n);
        if self.half_factor_applied {
            v
        } else {
            0.5 * v
        }
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }
}

/// Y's Γ part, exp(½(lnΓ(1+z) − lnΓ(1−z))) = exp(−γz − Σ_{odd n≥3} ζ(n)zⁿ/n).
fn y_gamma_series(n: usize) -> Vec<f64> {
    let mut g = vec![0.0; n + 1];
    if n >= 1 {
        g[1] = -EULER_GAMMA;
    }
    for m in (3..=n).step_by(2) {
        g[m] = -zeta(m as f64) / m as f64;
    }
    exp_univariate(&g, n)
}

/// R(s) = s·ζ(1 + s) to degree n (n ≤ 7).
fn r_series(n: usize) -> Vec<f64> {
    zeta_regular_series(n.min(7)).expect("order within range")
}

fn unit_vec(k: usize, idx: &[usize]) -> Vec<f64> {
    let mut w = vec![0.0; k];
    for &i in idx {
        w[i] += 1.0;
    }
    w
}

/// Coefficients (constant first) of the polynomial in L = log(√N/2π) given
/// by the P_k (or, with `derivative`, Q_k) residue, for arithmetic factor
/// `arith`. With `unit` the Γ and ζ factors are replaced by 1, leaving
/// pure integer arithmetic.
pub fn contour_poly(k: usize, arith: &TruncatedSeries, derivative: bool, unit: bool) -> Vec<f64> {
    assert!(k >= 1 && arith.nvars() == k);
    let d = 2 * k - 2;
    assert_eq!(arith.deg(), d, "arith series must use the box degree 2k − 2");
    let lin = |idx: &[usize], w: f64| TruncatedSeries::linear(k, d, &unit_vec(k, idx)).scale(w);
    let mut rest = arith.clone();
    let order = k * d;
    if !unit {
        let yg = y_gamma_series(order);
        for i in 0..k {
            rest = rest.mul(&lin(&[i], 1.0).compose(&yg));
        }
    }
    for i in 0..k {
        for j in i + 1..k {
            let diff = lin(&[j], 1.0).add(&lin(&[i], -1.0));
            let sum = lin(&[i, j], 1.0);
            rest = rest.mul(&diff.mul(&diff)).mul(&sum);
            if !unit {
                rest = rest.mul(&sum.compose(&r_series(order)));
            }
        }
    }
    if derivative && !unit {
        let rinv = inv_univariate(&r_series(order), order);
        for i in 0..k {
            rest = rest.mul(&lin(&[i], 1.0).compose(&rinv));
        }
    }
    let kf = k as f64;
    let sign = if (k * (k - 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
    let pref = sign * 2f64.powi(k as i32) / (1..=k).map(|i| i as f64).product::<f64>();
    let target = vec![d; k];
    let total = lin(&(0..k).collect::<Vec<_>>(), 1.0);
    let mut out = Vec::with_capacity(order + 1);
    let mut power = TruncatedSeries::constant(k, d, 1.0);
    let mut fact = 1.0;
    for m in 0..=order {
        if m > 0 {
            power = power.mul(&total);
            fact *= m as f64;
        }
        out.push(pref * power.mul(&rest).coeff(&target) / fact);
    }
    let _ = kf;
    while out.len() > 1 && *out.last().expect("nonempty") == 0.0 {
        out.pop();
    }
    out
}

/// Σ c_m L^m with L = ½ℓ − ln 2π, rewritten in ℓ = log N.
fn to_log_n(c: &[f64]) -> Vec<f64> {
    let shift = -(2.0 * PI).ln();
    let mut out = vec![0.0; c.len()];
    for (m, &cm) in c.iter().enumerate() {
        // (½ℓ + shift)^m
        let mut binom = 1.0;
        for j in 0..=m {
            out[j] += cm * binom * 0.5f64.powi(j as i32) * shift.powi((m - j) as i32);
            binom = binom * (m - j) as f64 / (j + 1) as f64;
        }
    }
    out
}

/// A_k(z_1, …, z_k) for the family of all curves, as a product over p ≤ pmax.
#[derive(Debug, Clone)]
pub struct ArithmeticFactor {
    pub spec: FamilySpec,
    pub pmax: u64,
    primes: Vec<(u64, Classes)>,
}

impl ArithmeticFactor {
    /// Largest pmax the shared class-number table supports.
    pub const PMAX_LIMIT: u64 = 20_000;

    pub fn new(spec: &FamilySpec, pmax: u64) -> Result<Self> {
        spec.validate()?;
        if spec.variant != Variant::All {
            return Err(EcmError::InvalidSpec("A_k belongs to the family of all curves".into()));
        }
        if !(11..=Self::PMAX_LIMIT).contains(&pmax) {
            return Err(EcmError::OutOfRange(pmax));
        }
        let m = 6 * spec.q;
        let primes = crate::arith::primes_up_to(pmax)
            .into_par_iter()
            .filter(|&p| m % p != 0)
            .map(|p| (p, all_curve_classes(p)))
            .collect();
        Ok(Self { spec: *spec, pmax, primes })
    }

    pub fn value(&self, zs: &[f64]) -> f64 {
        let pairs = |p: f64| -> f64 {
            let mut s = 0.0;
            for i in 0..zs.len() {
                for j in i + 1..zs.len() {
                    s += (1.0 - p.powf(-1.0 - zs[i] - zs[j])).ln();
                }
            }
            s
        };
        let mut logs = vec![pairs(2.0)];
        for p in crate::arith::primes_up_to(6 * self.spec.q) {
            if p == 2 || (6 * self.spec.q) % p != 0 {
                continue;
            }
            let t = ap_legendre(self.spec.r, self.spec.t, p);
            let pf = p as f64;
            let l: f64 = zs.iter().map(|&z| local_l(pf, t.ap, t.good, z).ln()).sum();
            logs.push(l + pairs(pf));
        }
        for (p, classes) in &self.primes {
            let pf = *p as f64;
            let d = 1.0 / (1.0 - pf.powi(-10));
            let h = 1.0 + d * (class_expectation(*p, classes, zs) - 1.0);
            logs.push(h.ln() + pairs(pf));
        }
        // ascending-p summation keeps the result independent of thread count
        logs.iter().sum::<f64>().exp()
    }

    /// A_1(z) at complex z, for contour checks.
    pub fn value_k1_complex(&self, z: Complex64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        let mut log = Complex64::new(0.0, 0.0);
        for p in crate::arith::primes_up_to(6 * self.spec.q) {
            if p == 2 || (6 * self.spec.q) % p != 0 {
                continue;
            }
            let t = ap_legendre(self.spec.r, self.spec.t, p);
            log += local_l_complex(p as f64, t.ap, t.good, z).ln();
        }
        for (p, classes) in &self.primes {
            let d = 1.0 / (1.0 - (*p as f64).powi(-10));
            log += (one + (class_mean_complex(*p, classes, z) - one) * d).ln();
        }
        log.exp()
    }

    /// (A_2(0,0), ∂A_2/∂z_1(0,0)) by central differences with one Richardson step.
    pub fn taylor_k2(&self) -> (f64, f64) {
        let d = |h: f64| (self.value(&[h, 0.0]) - self.value(&[-h, 0.0])) / (2.0 * h);
        let a0 = self.value(&[0.0, 0.0]);
        let (d1, d2) = (d(FD_STEP), d(FD_STEP / 2.0));
        (a0, (4.0 * d2 - d1) / 3.0)
    }
}

/// A'_k(z_1, …, z_k) for the positive-rank family, as a product over p ≤ pmax.
#[derive(Debug, Clone)]
pub struct PositiveRankFactor {
    pub spec: FamilySpec,
    pub table: SquareClassTable,
}

impl PositiveRankFactor {
    pub fn new(spec: &FamilySpec, pmax: u64) -> Result<Self> {
        spec.validate()?;
        if spec.variant != Variant::PositiveRank {
            return Err(EcmError::InvalidSpec("A'_k belongs to the positive-rank family".into()));
        }
        if pmax < 11 {
            return Err(EcmError::OutOfRange(pmax));
        }
        Ok(Self { spec: *spec, table: SquareClassTable::new(pmax) })
    }

    fn zeta_ratio_log(p: f64, zs: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..zs.len() {
            s -= (1.0 - p.powf(-1.0 - zs[i])).ln();
            for j in i + 1..zs.len() {
                s += (1.0 - p.powf(-1.0 - zs[i] - zs[j])).ln();
            }
        }
        s
    }

    pub fn value(&self, zs: &[f64]) -> f64 {
        let mut logs = vec![Self::zeta_ratio_log(2.0, zs)];
        let t3 = ap_legendre(self.spec.r, self.spec.t * self.spec.t, 3);
        let l3: f64 = zs.iter().map(|&z| local_l(3.0, t3.ap, t3.good, z).ln()).sum();
        logs.push(l3 + Self::zeta_ratio_log(3.0, zs));
        for (p, classes) in &self.table.primes {
            let pf = *p as f64;
            let d = 1.0 / (1.0 - pf.powi(-7));
            let h = 1.0 + d * (class_expectation(*p, classes, zs) - 1.0);
            logs.push(h.ln() + Self::zeta_ratio_log(pf, zs));
        }
        logs.iter().sum::<f64>().exp()
    }

    pub fn taylor_k2(&self) -> (f64, f64) {
        let d = |h: f64| (self.value(&[h, 0.0]) - self.value(&[-h, 0.0])) / (2.0 * h);
        let a0 = self.value(&[0.0, 0.0]);
        let (d1, d2) = (d(FD_STEP), d(FD_STEP / 2.0));
        (a0, (4.0 * d2 - d1) / 3.0)
    }

    /// A'_1(z) at complex z, for contour checks.
    pub fn value_k1_complex(&self, z: Complex64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        let pz = |p: f64, e: Complex64| Complex64::new(p, 0.0).powc(e);
        let zeta_local = |p: f64| one / (one - pz(p, -one - z));
        let mut log = zeta_local(2.0).ln();
        let t3 = ap_legendre(self.spec.r, self.spec.t * self.spec.t, 3);
        log += local_l_complex(3.0, t3.ap, t3.good, z).ln() + zeta_local(3.0).ln();
        for (p, classes) in &self.table.primes {
            let pf = *p as f64;
            let d = 1.0 / (1.0 - pf.powi(-7));
            log += (one + (class_mean_complex(*p, classes, z) - one) * d).ln() + zeta_local(pf).ln();
        }
        log.exp()
    }
}

/// E[L_p(1/2 + z)] over a class table, complex z.
fn class_mean_complex(p: u64, classes: &Classes, z: Complex64) -> Complex64 {
    let total: u64 = classes.iter().map(|c| c.2).sum();
    let s: Complex64 = classes
        .iter()
        .map(|&(ap, good, n)| local_l_complex(p as f64, ap, good, z) * n as f64)
        .sum();
    s / total as f64
}

fn local_l_complex(p: f64, ap: i64, good: bool, z: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let pc = Complex64::new(p, 0.0);
    let y = pc.powc(-one - z);
    let quad = if good { pc.powc(-one - z * 2.0) } else { Complex64::new(0.0, 0.0) };
    one / (one - y * ap as f64 + quad)
}

fn box_series_k2(a0: f64, a1: f64) -> TruncatedSeries {
    TruncatedSeries::constant(2, 2, a0).add(&TruncatedSeries::linear(2, 2, &[a1, a1]))
}

/// P_k(N) as a polynomial in log N (k ∈ {1, 2}), without the global 1/2.
pub fn pk_polynomial(k: u32, spec: &FamilySpec, pmax: u64) -> Result<MomentPrediction> {
    let af = ArithmeticFactor::new(spec, pmax)?;
    let (form, arith) = match k {
        1 => (Form::FullPolynomialK1, TruncatedSeries::constant(1, 0, af.value(&[0.0]))),
        2 => {
            let (a0, a1) = af.taylor_k2();
            (Form::FullPolynomialK2, box_series_k2(a0, a1))
        }
        _ => return Err(EcmError::UnsupportedK(k as f64)),
    };
    let c = contour_poly(k as usize, &arith, false, false);
    Ok(MomentPrediction {
        k: k as f64,
        family: *spec,
        form,
        coefficients: to_log_n(&c),
        half_factor_applied: false,
    })
}

/// P_k(N) at a given conductor.
pub fn pk_eval(k: u32, n: u64, spec: &FamilySpec, pmax: u64) -> Result<f64> {
    Ok(pk_polynomial(k, spec, pmax)?.eval((n as f64).ln()))
}

/// Q_k(N) as a polynomial in log N (k ∈ {1, 2}), without the global 1/2.
pub fn qk_polynomial(k: u32, spec: &FamilySpec, pmax: u64) -> Result<MomentPrediction> {
    let pf = PositiveRankFactor::new(spec, pmax)?;
    let (form, arith) = match k {
        1 => (Form::FullPolynomialK1, TruncatedSeries::constant(1, 0, pf.value(&[0.0]))),
        2 => {
            let (a0, a1) = pf.taylor_k2();
            (Form::FullPolynomialK2, box_series_k2(a0, a1))
        }
        _ => return Err(EcmError::UnsupportedK(k as f64)),
    };
    let c = contour_poly(k as usize, &arith, true, false);
    Ok(MomentPrediction {
        k: k as f64,
        family: *spec,
        form,
        coefficients: to_log_n(&c),
        half_factor_applied: false,
    })
}

/// a'_k = A'_k(0, …, 0) for integer k ≥ 1.
pub fn aprime_k(k: u32, spec: &FamilySpec, pmax: u64) -> Result<f64> {
    if k == 0 {
        return Ok(1.0);
    }
    if k == 1 {
        return Ok(a1prime(0.0, spec, pmax)?.value);
    }
    spec.validate()?;
    if spec.variant != Variant::PositiveRank {
        return Err(EcmError::InvalidSpec("a'_k belongs to the positive-rank family".into()));
    }
    let kf = k as f64;
    let expo = kf * (kf - 1.0) / 2.0 - kf;
    let mut log = expo * (0.5f64).ln();
    let t3 = ap_legendre(spec.r, spec.t * spec.t, 3);
    log += kf * local_l(3.0, t3.ap, t3.good, 0.0).ln() + expo * (2.0f64 / 3.0).ln();
    let rest: Vec<f64> = crate::arith::primes_up_to(pmax)
        .into_par_iter()
        .filter(|&p| p > 3)
        .map(|p| {
            // shells decay like p^{−e/2}; stop below 1e−15 with room for the binomial growth
            let emax = ((2.0 * 36.0 + 4.0 * kf) / (p as f64).ln()).ceil().max(8.0) as u32;
            aprime_local(p, k, emax).map(|l| l.value.ln())
        })
        .collect::<Result<_>>()?;
    Ok((log + rest.iter().sum::<f64>()).exp())
}

/// ½·a_k·g_k·(log N)^{k(k−1)/2}, or the derivative analogue with a'_k.
pub fn leading_term(k: f64, log_n: f64, spec: &FamilySpec, kind: MomentKind, pmax: u64) -> Result<f64> {
    if !(k > -0.5) {
        return Err(EcmError::PoleRegion(k));
    }
    let g = g_k(k)?.value;
    let a = match kind {
        MomentKind::Value => ak(k, spec, pmax)?.value,
        MomentKind::Derivative => {
            if k.fract() != 0.0 || k < 0.0 {
                return Err(EcmError::UnsupportedK(k));
            }
            aprime_k(k as u32, spec, pmax)?
        }
    };
    let power = k * (k - 1.0) / 2.0;
    let lg = if power == 0.0 { 1.0 } else { log_n.powf(power) };
    Ok(0.5 * a * g * lg)
}

/// Leading-order prediction wrapped as a one-term polynomial.
pub fn leading_prediction(k: f64, spec: &FamilySpec, kind: MomentKind, pmax: u64) -> Result<MomentPrediction> {
    let c = leading_term(k, 1.0, spec, kind, pmax)?;
    let deg = k * (k - 1.0) / 2.0;
    let coefficients = if deg.fract() == 0.0 && deg >= 0.0 {
        let mut v = vec![0.0; deg as usize + 1];
        v[deg as usize] = c;
        v
    } else {
        vec![c]
    };
    Ok(MomentPrediction { k, family: *spec, form: Form::LeadingOrder, coefficients, half_factor_applied: true })
}

#[derive(Debug, Clone, PartialEq)]
pub struct StructureReport {
    pub k: usize,
    pub p_pole_order: usize,
    pub q_pole_order: usize,
    pub p_degree: usize,
    pub q_degree: usize,
    pub expected_degree: usize,
}

impl StructureReport {
    pub fn consistent(&self) -> bool {
        self.p_pole_order == self.q_pole_order
            && self.p_degree == self.q_degree
            && self.p_degree == self.expected_degree
    }
}

/// Pole orders at the origin and degrees in log N of the P_k and Q_k
/// integrands, computed with unit arithmetic factors (exact in f64).
pub fn qk_structure_check(k: usize) -> Result<StructureReport> {
    if !(1..=3).contains(&k) {
        return Err(EcmError::UnsupportedK(k as f64));
    }
    let big = 3 * k;
    let lin = |idx: &[usize]| TruncatedSeries::linear(k, big, &unit_vec(k, idx));
    let mut vandermonde = TruncatedSeries::constant(k, big, 1.0);
    for i in 0..k {
        for j in i + 1..k {
            let diff = lin(&[j]).add(&lin(&[i]).scale(-1.0));
            // Δ(z²)²·ζ(1 + z_i + z_j) ~ (z_j − z_i)²(z_i + z_j)
            vandermonde = vandermonde.mul(&diff.mul(&diff)).mul(&lin(&[i, j]));
        }
    }
    let mut with_zeros = vandermonde.clone();
    for i in 0..k {
        // 1/ζ(1 + z_i) ~ z_i
        with_zeros = with_zeros.mul(&lin(&[i]));
    }
    let p_num = vandermonde.min_degree().expect("nonzero numerator");
    let q_num = with_zeros.min_degree().expect("nonzero numerator");
    let p_pole = k * (2 * k - 1) - p_num;
    let q_pole = k * 2 * k - q_num;
    let unit = TruncatedSeries::constant(k, 2 * k - 2, 1.0);
    let p_deg = contour_poly(k, &unit, false, true).len() - 1;
    let q_deg = contour_poly(k, &unit, true, true).len() - 1;
    Ok(StructureReport {
        k,
        p_pole_order: p_pole,
        q_pole_order: q_pole,
        p_degree: p_deg,
        q_degree: q_deg,
        expected_degree: k * (k - 1) / 2,
    })
}

/// Y(z) = X^{−1/2}(1/2 + z) at complex z (|z| < 1).
fn y_complex(z: Complex64, log_scale: f64) -> Complex64 {
    let mut g = z * (log_scale - EULER_GAMMA);
    let z2 = z * z;
    let mut zp = z * z2;
    for n in (3..=31).step_by(2) {
        g -= zp * (zeta(n as f64) / n as f64);
        zp *= z2;
    }
    g.exp()
}

/// 1/ζ(1 + z) at complex z near 0, as z/R(z).
fn zeta_recip_complex(z: Complex64) -> Complex64 {
    let r = r_series(7);
    let rz = r.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c);
    z / rz
}

fn log_scale(n: u64) -> f64 {
    ((n as f64).sqrt() / (2.0 * PI)).ln()
}

/// M(α) = A'_1(α)/ζ(1+α)·X^{−1/2}(1/2+α) for the positive-rank family, k = 1.
pub fn rank_one_m(alpha: f64, n: u64, factor: &PositiveRankFactor) -> f64 {
    let y = (alpha * log_scale(n)).exp() * y_gamma_real(alpha);
    factor.value(&[alpha]) * zeta_recip_1p(alpha) * y
}

fn y_gamma_real(z: f64) -> f64 {
    (0.5 * (crate::special::ln_gamma(1.0 + z) - crate::special::ln_gamma(1.0 - z))).exp()
}

/// M(α) from the k = 1 contour integral (1/2πi)∮ H'(z)Y(z)/(z − α) dz on
/// |z| = radius, by the trapezoid rule. Needs |α| < radius < 1/6.
pub fn rank_one_m_contour(alpha: f64, n: u64, factor: &PositiveRankFactor, radius: f64, points: usize) -> Result<f64> {
    if !(alpha.abs() < radius && radius < 1.0 / 6.0) {
        return Err(EcmError::OutsideRegion(radius));
    }
    let ls = log_scale(n);
    let samples: Vec<Complex64> = (0..points)
        .into_par_iter()
        .map(|j| {
            let th = 2.0 * PI * j as f64 / points as f64;
            let z = Complex64::from_polar(radius, th);
            let h = factor.value_k1_complex(z) * zeta_recip_complex(z);
            h * y_complex(z, ls) * z / (z - alpha)
        })
        .collect();
    let s: Complex64 = samples.iter().sum();
    Ok(s.re / points as f64)
}

/// A'_1(α)/ζ(1 + α), the curve-independent part of the first moment.
pub fn rh_first_moment(alpha: f64, spec: &FamilySpec, pmax: u64) -> Result<f64> {
    if !(alpha.abs() < 1.0 / 6.0 - 0.01) {
        return Err(EcmError::OutsideRegion(alpha));
    }
    Ok(a1prime(alpha, spec, pmax)?.value * zeta_recip_1p(alpha))
}

/// K(α) = A_1(α)·X^{−1/2}(1/2 + α) for the family of all curves.
fn all_family_k(alpha: f64, n: u64, af: &ArithmeticFactor) -> f64 {
    af.value(&[alpha]) * (alpha * log_scale(n)).exp() * y_gamma_real(alpha)
}

/// All-family k = 1: M(α) = K(α) + K(−α), the sum over both signs of the
/// approximate functional equation, normalized by X^{−1/2}(1/2 + α).
/// M(0) = P_1.
pub fn all_family_m_k1(alpha: f64, n: u64, af: &ArithmeticFactor) -> f64 {
    all_family_k(alpha, n, af) + all_family_k(-alpha, n, af)
}

/// The same M(α) as (1/2πi)∮ K(z)·2z/(z² − α²) dz on |z| = radius.
pub fn all_family_m_k1_contour(alpha: f64, n: u64, af: &ArithmeticFactor, radius: f64, points: usize) -> Result<f64> {
    if !(alpha.abs() < radius && radius < 0.25) {
        return Err(EcmError::OutsideRegion(radius));
    }
    let ls = log_scale(n);
    let samples: Vec<Complex64> = (0..points)
        .into_par_iter()
        .map(|j| {
            let z = Complex64::from_polar(radius, 2.0 * PI * j as f64 / points as f64);
            af.value_k1_complex(z) * y_complex(z, ls) * z * z * 2.0 / (z * z - alpha * alpha)
        })
        .collect();
    Ok(samples.iter().sum::<Complex64>().re / points as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MobiusRow {
    pub n: u64,
    pub empirical: f64,
    /// μ(n)/√n.
    pub heuristic: f64,
    /// Exact limiting family average from the local densities.
    pub local_limit: f64,
    pub sample: usize,
}

/// Family averages of λ_E(n) over F'(X) against μ(n)/√n, squarefree n.
pub fn mobius_average(spec: &FamilySpec, ns: &[u64]) -> Result<Vec<MobiusRow>> {
    if spec.variant != Variant::PositiveRank {
        return Err(EcmError::InvalidSpec("the Möbius heuristic uses the positive-rank family".into()));
    }
    for &n in ns {
        if !is_squarefree(n) {
            return Err(EcmError::InvalidSpec(format!("{n} is not squarefree")));
        }
    }
    let members: Vec<_> = enumerate(spec)?.collect();
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let vals: Vec<f64> = members
            .par_iter()
            .map(|m| lambda_n(&m.curve, n))
            .collect::<Result<_>>()?;
        let empirical = vals.iter().sum::<f64>() / vals.len().max(1) as f64;
        rows.push(MobiusRow {
            n,
            empirical,
            heuristic: mobius(n) as f64 / (n as f64).sqrt(),
            local_limit: mobius_limit(n, spec)?,
            sample: vals.len(),
        });
    }
    Ok(rows)
}

/// Π_{p | n} of the limiting average of λ(p) over F': 0 at p = 2, the fixed
/// class value at p = 3, and Q*□(p)(1 − p^{−7})^{−1} at p > 3.
pub fn mobius_limit(n: u64, spec: &FamilySpec) -> Result<f64> {
    let f = crate::arith::factor(n).ok_or(EcmError::FactorizationTimeout(n as u128))?;
    let mut v = 1.0;
    for (p, e) in f {
        if e > 1 {
            return Err(EcmError::InvalidSpec(format!("{n} is not squarefree")));
        }
        v *= match p {
            2 => 0.0,
            3 => ap_legendre(spec.r, spec.t * spec.t, 3).lambda(),
            _ => qsquare_p_closed(p).to_f64() / (1.0 - (p as f64).powi(-7)),
        };
    }
    Ok(v)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioPrediction {
    pub q: u64,
    pub classes: ((i64, i64), (i64, i64)),
    pub k: f64,
    pub value: f64,
    /// Π N_p(r,t)/N_p(r′,t′) from point counts (exact).
    pub point_count_ratio: BigRational,
    /// The same product from the Euler-factor form (p + 1 − a_p)/p (exact).
    pub euler_factor_ratio: BigRational,
}

impl RatioPrediction {
    pub fn paths_agree(&self) -> bool {
        self.point_count_ratio == self.euler_factor_ratio
    }
}

fn check_class(r: i64, t: i64, q: u64) -> Result<()> {
    let d = 4 * (r as i128).pow(3) + 27 * (t as i128).pow(2);
    if crate::arith::gcd(d.unsigned_abs(), 6 * q as u128) != 1 {
        return Err(EcmError::BadClass(r, t));
    }
    Ok(())
}

/// R_{q,k} = Π_{p|q} [(1 − λ_{r,t}(p)/√p + 1/p)/(1 − λ_{r′,t′}(p)/√p + 1/p)]^{−k}.
pub fn ratio_rq(q: u64, class: (i64, i64), class2: (i64, i64), k: f64) -> Result<RatioPrediction> {
    if q < 5 || !is_squarefree(q) || q % 2 == 0 || q % 3 == 0 {
        return Err(EcmError::InvalidSpec(format!("q = {q} must be squarefree, coprime to 6 and > 1")));
    }
    check_class(class.0, class.1, q)?;
    check_class(class2.0, class2.1, q)?;
    let f = crate::arith::factor(q).ok_or(EcmError::FactorizationTimeout(q as u128))?;
    let mut value = 1.0;
    let mut counts = BigRational::one();
    let mut euler = BigRational::one();
    for (p, _) in f {
        let pf = p as f64;
        let t1 = ap_legendre(class.0, class.1, p);
        let t2 = ap_legendre(class2.0, class2.1, p);
        let f1 = 1.0 - t1.lambda() / pf.sqrt() + 1.0 / pf;
        let f2 = 1.0 - t2.lambda() / pf.sqrt() + 1.0 / pf;
        value *= (f1 / f2).powf(-k);
        counts *= BigRational::new(
            BigInt::from(count_points(class.0, class.1, p)),
            BigInt::from(count_points(class2.0, class2.1, p)),
        );
        let e1 = BigRational::new(BigInt::from(p as i64 + 1 - t1.ap), BigInt::from(p));
        let e2 = BigRational::new(BigInt::from(p as i64 + 1 - t2.ap), BigInt::from(p));
        euler *= e1 / e2;
    }
    Ok(RatioPrediction {
        q,
        classes: (class, class2),
        k,
        value,
        point_count_ratio: counts,
        euler_factor_ratio: euler,
    })
}

/// √(point-count ratio) as a float, for comparison with `value` at k = −1/2.
pub fn ratio_from_counts(r: &RatioPrediction) -> f64 {
    let n = r.point_count_ratio.numer().to_f64().unwrap_or(f64::NAN);
    let d = r.point_count_ratio.denom().to_f64().unwrap_or(f64::NAN);
    (n / d).sqrt()
}
