//! One function per subcommand; each returns the result rows in a fixed order.

use crate::report::{Row, Severity};
use ecm_core::arith::primes_up_to;
use ecm_core::curves::CurvePair;
use ecm_core::euler::{a1prime, ak};
use ecm_core::families::{enumerate_par, FamilySpec, Variant};
use ecm_core::hecke::{level_one_eigenform, trace_eichler_selberg};
use ecm_core::lvalues::LFunction;
use ecm_core::orthogonality::{q_sum, qsquare_brute, qsquare_p_closed, qstar_brute, qstar_closed};
use ecm_core::predict::{
    aprime_k, leading_term, mobius_average, pk_polynomial, qk_polynomial, rank_one_m, rank_one_m_contour,
    ratio_rq, rh_first_moment, MomentKind, PositiveRankFactor,
};
use ecm_core::special::g_k;
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

type Rows = Result<Vec<Row>, String>;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Weights with a one-dimensional cusp space, where the q-expansion is an oracle.
const ORACLE_WEIGHTS: [u32; 6] = [12, 16, 18, 20, 22, 26];

pub fn verify_traces(pmax: u64, wmax: u32) -> Rows {
    if !(4..=26).contains(&wmax) {
        return Err("--wmax must lie in 4..=26".into());
    }
    let mut rows = Vec::new();
    for p in primes_up_to(pmax).into_iter().filter(|&p| p >= 5) {
        for w in (4..=wmax).step_by(2) {
            let q = q_sum(p, w - 2).map_err(err)?;
            let tr = trace_eichler_selberg(w, p).map_err(err)?.trace;
            let from_q = -q.clone() / BigInt::from(p - 1);
            let ok = q == BigInt::from(-(p as i128 - 1) * tr);
            rows.push(Row::exact(format!("trace p={p} w={w}"), from_q.to_f64().unwrap_or(f64::NAN), tr as f64, ok));
            if ORACLE_WEIGHTS.contains(&w) {
                let f = level_one_eigenform(w, p as usize + 1).map_err(err)?;
                let a = &f[p as usize];
                rows.push(Row::exact(
                    format!("q-expansion p={p} w={w}"),
                    a.to_f64().unwrap_or(f64::NAN),
                    tr as f64,
                    *a == BigInt::from(tr),
                ));
            }
        }
    }
    Ok(rows)
}

/// Nondecreasing exponent tuples of length ≤ kmax with Σe ≤ fmax.
fn tuples(fmax: u32, kmax: usize) -> Vec<Vec<u32>> {
    fn rec(prefix: &mut Vec<u32>, min: u32, left: u32, kmax: usize, out: &mut Vec<Vec<u32>>) {
        if !prefix.is_empty() {
            out.push(prefix.clone());
        }
        if prefix.len() == kmax {
            return;
        }
        for e in min..=left {
            prefix.push(e);
            rec(prefix, e, left - e, kmax, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), 1, fmax, kmax, &mut out);
    out
}

pub fn verify_qstar(pmax: u64, fmax: u32, kmax: usize) -> Rows {
    let mut rows = Vec::new();
    for p in primes_up_to(pmax).into_iter().filter(|&p| p >= 5) {
        let sq = qsquare_brute(p, &[1]).map_err(err)?.value;
        let closed = qsquare_p_closed(p);
        rows.push(Row::exact(format!("Qsquare p={p} (1)"), sq.to_f64(), closed.to_f64(), sq == closed));
        for exps in tuples(fmax, kmax) {
            let f: u32 = exps.iter().sum();
            let b = qstar_brute(p, &exps).map_err(err)?.value;
            let name = format!("Qstar p={p} {exps:?}");
            if f % 2 == 1 {
                rows.push(Row::exact(name, b.to_f64(), 0.0, b.is_zero()));
            } else {
                let c = qstar_closed(p, &exps).map_err(err)?.value;
                rows.push(Row::exact(name, b.to_f64(), c.to_f64(), b == c));
            }
        }
    }
    Ok(rows)
}

pub fn afactor(spec: &FamilySpec, ks: &[f64], pmax: u64) -> Rows {
    let mut rows = Vec::new();
    for &k in ks {
        let g = g_k(k).map_err(err)?;
        rows.push(Row::info(format!("g_k k={k}"), g.value));
        match spec.variant {
            Variant::All => {
                let a = ak(k, spec, pmax).map_err(err)?;
                let name = format!("a_k k={k}");
                rows.push(if k == 0.0 {
                    Row::within(name, a.value, 1.0, a.tail_estimate.max(1e-6), Severity::Hard)
                } else {
                    Row { tolerance: Some(a.tail_estimate), ..Row::info(name, a.value) }
                });
            }
            Variant::PositiveRank => {
                if k < 0.0 || k.fract() != 0.0 {
                    return Err(format!("a'_k needs a nonnegative integer k, got {k}"));
                }
                let v = aprime_k(k as u32, spec, pmax).map_err(err)?;
                let tail = if k == 1.0 { a1prime(0.0, spec, pmax).map_err(err)?.tail_estimate } else { f64::NAN };
                rows.push(Row { tolerance: tail.is_finite().then_some(tail), ..Row::info(format!("a'_k k={k}"), v) });
            }
        }
    }
    Ok(rows)
}

fn members(spec: &FamilySpec, sample_size: usize, seed: u64) -> Result<Vec<CurvePair>, String> {
    let all: Vec<CurvePair> = enumerate_par(spec).map_err(err)?.into_iter().map(|m| m.curve).collect();
    if sample_size == 0 || sample_size >= all.len() {
        return Ok(all);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx = sample(&mut rng, all.len(), sample_size).into_vec();
    idx.sort_unstable();
    Ok(idx.into_iter().map(|i| all[i]).collect())
}

/// |L(1/2)| below c/(√N·log N) counts as vanishing.
fn zero_threshold(c: f64, n: u64) -> f64 {
    let nf = n as f64;
    c / (nf.sqrt() * nf.ln())
}

const ZERO_C: f64 = 1e-3;

pub fn moments(spec: &FamilySpec, k: f64, pmax: u64, sample_size: usize, seed: u64) -> Rows {
    let kind = match spec.variant {
        Variant::All => MomentKind::Value,
        Variant::PositiveRank => MomentKind::Derivative,
    };
    let curves = members(spec, sample_size, seed)?;
    // (log N, value) or None when the conductor or sign is undetermined
    let vals: Vec<Option<(f64, f64)>> = curves
        .par_iter()
        .map(|c| {
            let mut l = LFunction::new(c).ok()?;
            let v = match kind {
                MomentKind::Value => l.central(0.0, zero_threshold(ZERO_C, l.n) * 0.1).ok()?.value,
                MomentKind::Derivative => l.derivative(1e-8).ok()?.value,
            };
            let v = if v.abs() < zero_threshold(ZERO_C, l.n) { 0.0 } else { v };
            Some(((l.n as f64).ln(), v))
        })
        .collect();
    let used: Vec<(f64, f64)> = vals.iter().flatten().copied().collect();
    if used.is_empty() {
        return Err("no family member had a determined L-function".into());
    }
    let n = used.len() as f64;
    let pow = |v: f64| if v == 0.0 { 0.0 } else { v.abs().powf(k) * if v < 0.0 && k.fract() == 0.0 && (k as i64) % 2 == 1 { -1.0 } else { 1.0 } };
    let terms: Vec<f64> = used.iter().map(|&(_, v)| pow(v)).collect();
    let mean = terms.iter().sum::<f64>() / n;
    let var = terms.iter().map(|t| (t - mean) * (t - mean)).sum::<f64>() / (n - 1.0).max(1.0);
    let stderr = (var / n).sqrt();
    let log_deg = k * (k - 1.0) / 2.0;
    let base = leading_term(k, 1.0, spec, kind, pmax).map_err(err)?;
    let lead = |ln: f64| if log_deg == 0.0 { base } else { base * ln.powf(log_deg) };
    let mean_log_n = used.iter().map(|u| u.0).sum::<f64>() / n;
    let pred_lead = used.iter().map(|&(ln, _)| lead(ln)).sum::<f64>() / n;
    let pred_log_x = lead(spec.x.ln());
    let rel = |pred: f64| 3.0 * stderr / pred.abs();

    let mut rows = vec![
        Row::info("sample size", n),
        Row::info("skipped (conductor or sign undetermined)", (curves.len() - used.len()) as f64),
        Row::info("mean log N", mean_log_n),
        Row::info("empirical mean", mean),
        Row::info("standard error", stderr),
        Row::info("predicted leading (log N per curve)", pred_lead),
        Row::within("ratio to leading (log N)", mean / pred_lead, 1.0, rel(pred_lead), Severity::Soft),
        Row::info("predicted leading (log X)", pred_log_x),
        Row::within("ratio to leading (log X)", mean / pred_log_x, 1.0, rel(pred_log_x), Severity::Soft),
    ];
    if k == 1.0 || k == 2.0 {
        let poly = match kind {
            MomentKind::Value => pk_polynomial(k as u32, spec, pmax.min(20_000)),
            MomentKind::Derivative => qk_polynomial(k as u32, spec, pmax),
        }
        .map_err(err)?;
        let pred = used.iter().map(|&(ln, _)| poly.mean_at(ln)).sum::<f64>() / n;
        rows.push(Row::info("predicted full polynomial", pred));
        rows.push(Row::within("ratio to full polynomial", mean / pred, 1.0, rel(pred), Severity::Soft));
    }
    Ok(rows)
}

pub fn ratio(q: u64, c1: (i64, i64), c2: (i64, i64), x: f64, k: f64, zero_c: f64) -> Rows {
    let pred = ratio_rq(q, c1, c2, k).map_err(err)?;
    let mut rows = vec![Row::exact(
        "point-count form equals Euler-factor form",
        pred.point_count_ratio.to_f64().unwrap_or(f64::NAN),
        pred.euler_factor_ratio.to_f64().unwrap_or(f64::NAN),
        pred.paths_agree(),
    )];
    let count = |class: (i64, i64)| -> Result<(usize, usize, usize), String> {
        let spec = FamilySpec::all(class.0, class.1, q, x).map_err(err)?;
        let curves = members(&spec, 0, 0)?;
        let flags: Vec<Option<bool>> = curves
            .par_iter()
            .map(|c| {
                let mut l = LFunction::new(c).ok()?;
                if l.w != 1 {
                    return Some(false);
                }
                let thr = zero_threshold(zero_c, l.n);
                Some(l.central(0.0, thr * 0.1).ok()?.value.abs() < thr)
            })
            .collect();
        let zeros = flags.iter().filter(|f| **f == Some(true)).count();
        let skipped = flags.iter().filter(|f| f.is_none()).count();
        Ok((curves.len(), zeros, skipped))
    };
    let (n1, z1, s1) = count(c1)?;
    let (n2, z2, s2) = count(c2)?;
    rows.push(Row::info("class 1 family size", n1 as f64));
    rows.push(Row::info("class 1 vanishing count", z1 as f64));
    rows.push(Row::info("class 1 skipped", s1 as f64));
    rows.push(Row::info("class 2 family size", n2 as f64));
    rows.push(Row::info("class 2 vanishing count", z2 as f64));
    rows.push(Row::info("class 2 skipped", s2 as f64));
    let empirical = z1 as f64 / z2 as f64;
    let tol = 2.0 * empirical * (1.0 / z1 as f64 + 1.0 / z2 as f64).sqrt();
    rows.push(Row::within("R_q(X)", empirical, pred.value, tol, Severity::Soft));
    Ok(rows)
}

/// Conductor at which the contour and residue forms of M(α) are compared.
const RH_REFERENCE_N: u64 = 1_000_000;

pub fn rh(spec: &FamilySpec, ns: &[u64], alphas: &[f64], pmax: u64) -> Rows {
    let mut rows = Vec::new();
    for r in mobius_average(spec, ns).map_err(err)? {
        // |λ(n)| ≤ d(n), so the sampling error is at most d(n)/√sample
        let d = (1..=r.n).filter(|m| r.n % m == 0).count() as f64;
        let noise = 3.0 * d / (r.sample as f64).sqrt();
        rows.push(Row::within(format!("lambda average n={} vs mu(n)/sqrt(n)", r.n), r.empirical, r.heuristic, 0.05, Severity::Soft));
        rows.push(Row::within(format!("lambda average n={} vs local limit", r.n), r.empirical, r.local_limit, noise, Severity::Soft));
    }
    let factor = PositiveRankFactor::new(spec, pmax).map_err(err)?;
    for &a in alphas {
        rows.push(Row::info(format!("A'(alpha)/zeta(1+alpha) alpha={a}"), rh_first_moment(a, spec, pmax).map_err(err)?));
        let radius = (2.0 * a.abs()).clamp(0.05, 0.16);
        let direct = rank_one_m(a, RH_REFERENCE_N, &factor);
        let contour = rank_one_m_contour(a, RH_REFERENCE_N, &factor, radius, 128).map_err(err)?;
        rows.push(Row::within(format!("M(alpha) contour vs residue alpha={a}"), contour, direct, 1e-9, Severity::Hard));
    }
    Ok(rows)
}
