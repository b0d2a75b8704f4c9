//! The boxed families F_{r,t}(X) (all curves) and F'(X) (curves E_{a,b²}
//! carrying the point (0, b)).
//!
//! The power condition "p⁴ | a ⇒ p⁶ ∤ b" (resp. "p³ ∤ b") can only fail at
//! primes p ≤ X^{1/12} coprime to 6q: the congruences already keep 2 and 3
//! (and primes of q) away from common divisors of a and b. Enumeration tests
//! exactly those primes, and the independent count runs the Möbius sum over
//! the same range.

use crate::arith::{is_squarefree, iroot, mobius, primes_up_to};
use crate::curves::{is_torsion_candidate, CurvePair};
use crate::error::{EcmError, Result};
use crate::special::zeta_partial;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    All,
    PositiveRank,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilySpec {
    pub variant: Variant,
    pub r: i64,
    pub t: i64,
    pub q: u64,
    pub x: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FamilyMember {
    pub curve: CurvePair,
    /// b for E_{a,b²}; the point (0, b) lies on the curve.
    pub generator: Option<i64>,
    /// b² | 4a³, so (0, b) may be torsion (Lutz–Nagell).
    pub torsion_flag: bool,
}

impl FamilySpec {
    pub fn all(r: i64, t: i64, q: u64, x: f64) -> Result<Self> {
        let s = Self { variant: Variant::All, r, t, q, x };
        s.validate()?;
        Ok(s)
    }

    pub fn positive_rank(r: i64, t: i64, x: f64) -> Result<Self> {
        let s = Self { variant: Variant::PositiveRank, r, t, q: 1, x };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(EcmError::InvalidSpec(m.to_string()));
        if !(self.x.is_finite() && self.x > 0.0) {
            return bad("X must be a positive real");
        }
        if self.x >= 2f64.powi(62) {
            return bad("X too large");
        }
        if self.q == 0 || !is_squarefree(self.q) || self.q % 2 == 0 || self.q % 3 == 0 {
            return bad("q must be squarefree and coprime to 6");
        }
        if self.variant == Variant::PositiveRank && self.q != 1 {
            return bad("the positive-rank family takes q = 1");
        }
        let (r, t) = (self.r as i128, self.t as i128);
        let core = 4 * r * r * r + 27 * t * t;
        if crate::arith::gcd(core.unsigned_abs(), 6 * self.q as u128) != 1 {
            return bad("gcd(4r^3 + 27t^2, 6q) must be 1");
        }
        Ok(())
    }

    /// The congruence modulus: 6q, or 6 for F'.
    pub fn modulus(&self) -> i64 {
        6 * self.q as i64
    }

    fn floor_x(&self) -> u128 {
        self.x.floor() as u128
    }

    pub fn a_bound(&self) -> i64 {
        iroot(self.floor_x(), 3) as i64
    }

    pub fn b_bound(&self) -> i64 {
        match self.variant {
            Variant::All => iroot(self.floor_x(), 2) as i64,
            Variant::PositiveRank => iroot(self.floor_x(), 4) as i64,
        }
    }

    /// Exponent e in the condition p⁴ | a ⇒ pᵉ ∤ b.
    fn b_power(&self) -> u32 {
        match self.variant {
            Variant::All => 6,
            Variant::PositiveRank => 3,
        }
    }

    /// Primes at which the power condition can fail.
    pub fn sieve_primes(&self) -> Vec<u64> {
        let top = iroot(self.floor_x(), 12) as u64;
        primes_up_to(top).into_iter().filter(|&p| (6 * self.q) % p != 0).collect()
    }
}

/// Members of the residue class c mod m in [lo, hi], ascending.
fn class_members(lo: i64, hi: i64, c: i64, m: i64) -> impl Iterator<Item = i64> + Clone {
    let first = lo + (c - lo).rem_euclid(m);
    (first..=hi).step_by(m as usize)
}

fn passes(a: i64, b: i64, primes: &[u64], e: u32) -> bool {
    primes.iter().all(|&p| {
        let p = p as i64;
        !(a % p.pow(4) == 0 && b % p.pow(e) == 0)
    })
}

fn member(spec: &FamilySpec, a: i64, b: i64) -> FamilyMember {
    match spec.variant {
        Variant::All => FamilyMember {
            curve: CurvePair::new(a, b).expect("congruence keeps the discriminant odd"),
            generator: None,
            torsion_flag: false,
        },
        Variant::PositiveRank => FamilyMember {
            curve: CurvePair::new(a, b * b).expect("congruence keeps the discriminant odd"),
            generator: Some(b),
            torsion_flag: is_torsion_candidate(a, b),
        },
    }
}

/// Members with `a` in [a_lo, a_hi], in (a, b) ascending order. Disjoint
/// a-ranges enumerate disjoint parts of the family.
pub fn enumerate_range(
    spec: &FamilySpec,
    a_lo: i64,
    a_hi: i64,
) -> Result<impl Iterator<Item = FamilyMember>> {
    spec.validate()?;
    let spec = *spec;
    let (abound, bbound, m) = (spec.a_bound(), spec.b_bound(), spec.modulus());
    let primes = spec.sieve_primes();
    let e = spec.b_power();
    let bs = class_members(-bbound, bbound, spec.t, m);
    Ok(class_members(a_lo.max(-abound), a_hi.min(abound), spec.r, m).flat_map(move |a| {
        let primes = primes.clone();
        bs.clone().filter(move |&b| passes(a, b, &primes, e)).map(move |b| member(&spec, a, b))
    }))
}

/// The whole family, a ascending then b ascending.
pub fn enumerate(spec: &FamilySpec) -> Result<impl Iterator<Item = FamilyMember>> {
    enumerate_range(spec, i64::MIN / 2, i64::MAX / 2)
}

/// The whole family collected in parallel over a; same order as `enumerate`.
pub fn enumerate_par(spec: &FamilySpec) -> Result<Vec<FamilyMember>> {
    spec.validate()?;
    let a = spec.a_bound();
    let avals: Vec<i64> = class_members(-a, a, spec.r, spec.modulus()).collect();
    let chunks: Vec<Vec<FamilyMember>> = avals
        .par_iter()
        .map(|&a| enumerate_range(spec, a, a).map(|it| it.collect()))
        .collect::<Result<_>>()?;
    Ok(chunks.into_iter().flatten().collect())
}

/// |F(X)| by the Möbius sum Σ_d μ(d)·#{a : d⁴ | a}·#{b : dᵉ | b}.
pub fn count_mobius(spec: &FamilySpec) -> Result<u64> {
    spec.validate()?;
    let (abound, bbound, m) = (spec.a_bound(), spec.b_bound(), spec.modulus());
    let top = iroot(spec.floor_x(), 12) as u64;
    let mut total: i128 = 0;
    for d in 1..=top.max(1) {
        let mu = mobius(d);
        if mu == 0 || crate::arith::gcd(d as u128, m as u128) != 1 {
            continue;
        }
        let d = d as i128;
        let na = count_class(abound, spec.r, m, d.pow(4));
        let nb = count_class(bbound, spec.t, m, d.pow(spec.b_power()));
        total += mu as i128 * na * nb;
    }
    Ok(total as u64)
}

/// #{x ∈ [−bound, bound] : x ≡ c mod m, k | x} for gcd(k, m) = 1.
fn count_class(bound: i64, c: i64, m: i64, k: i128) -> i128 {
    let (m, c, bound) = (m as i128, c as i128, bound as i128);
    // x = k·y with k·y ≡ c mod m
    let y0 = (c * mod_inverse(k.rem_euclid(m), m)).rem_euclid(m);
    let ylim = bound / k;
    (ylim - y0).div_euclid(m) - (-ylim - 1 - y0).div_euclid(m)
}

fn mod_inverse(a: i128, m: i128) -> i128 {
    if m == 1 {
        return 0;
    }
    let (mut r0, mut r1, mut s0, mut s1) = (a, m, 1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    debug_assert_eq!(r0, 1);
    s0.rem_euclid(m)
}

/// X^{5/6}/(9q²ζ_{6q}(10)) for F, X^{7/12}/(9ζ₆(7)) for F'.
pub fn count_asymptotic(spec: &FamilySpec) -> f64 {
    match spec.variant {
        Variant::All => {
            let excluded: Vec<u64> = primes_dividing(6 * spec.q);
            let q = spec.q as f64;
            spec.x.powf(5.0 / 6.0) / (9.0 * q * q * zeta_partial(10.0, &excluded))
        }
        Variant::PositiveRank => spec.x.powf(7.0 / 12.0) / (9.0 * zeta_partial(7.0, &[2, 3])),
    }
}

fn primes_dividing(n: u64) -> Vec<u64> {
    primes_up_to(n).into_iter().filter(|p| n % p == 0).collect()
}
