//! Multivariate power series truncated to a box: every exponent is at most
//! `deg` in each variable. Products are exact inside the box, which is all
//! the residue computations need.

/// Σ c_e z^e over e ∈ {0..=deg}^nvars, stored in mixed radix (deg + 1).
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries {
    nvars: usize,
    deg: usize,
    coef: Vec<f64>,
}

impl TruncatedSeries {
    pub fn zero(nvars: usize, deg: usize) -> Self {
        Self { nvars, deg, coef: vec![0.0; (deg + 1).pow(nvars as u32)] }
    }

    pub fn constant(nvars: usize, deg: usize, c: f64) -> Self {
        let mut s = Self::zero(nvars, deg);
        s.coef[0] = c;
        s
    }

    /// Σ_i w_i z_i.
    pub fn linear(nvars: usize, deg: usize, weights: &[f64]) -> Self {
        assert_eq!(weights.len(), nvars);
        let mut s = Self::zero(nvars, deg);
        if deg > 0 {
            for (i, &w) in weights.iter().enumerate() {
                s.coef[(deg + 1).pow(i as u32)] += w;
            }
        }
        s
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn deg(&self) -> usize {
        self.deg
    }

    fn index(&self, exps: &[usize]) -> Option<usize> {
        let mut idx = 0;
        for &e in exps.iter().rev() {
            if e > self.deg {
                return None;
            }
            idx = idx * (self.deg + 1) + e;
        }
        Some(idx)
    }

    fn exps(&self, mut idx: usize) -> Vec<usize> {
        (0..self.nvars)
            .map(|_| {
                let e = idx % (self.deg + 1);
                idx /= self.deg + 1;
                e
            })
            .collect()
    }

    pub fn coeff(&self, exps: &[usize]) -> f64 {
        assert_eq!(exps.len(), self.nvars);
        self.index(exps).map_or(0.0, |i| self.coef[i])
    }

    pub fn set_coeff(&mut self, exps: &[usize], v: f64) {
        let i = self.index(exps).expect("exponent inside the box");
        self.coef[i] = v;
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check(other);
        let coef = self.coef.iter().zip(&other.coef).map(|(a, b)| a + b).collect();
        Self { coef, ..*self }
    }

    pub fn scale(&self, c: f64) -> Self {
        Self { coef: self.coef.iter().map(|a| a * c).collect(), ..*self }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check(other);
        let mut out = Self::zero(self.nvars, self.deg);
        let ex: Vec<Vec<usize>> = (0..self.coef.len()).map(|i| self.exps(i)).collect();
        for (i, &a) in self.coef.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in other.coef.iter().enumerate() {
                if b == 0.0 {
                    continue;
                }
                let e: Vec<usize> = ex[i].iter().zip(&ex[j]).map(|(x, y)| x + y).collect();
                if let Some(k) = out.index(&e) {
                    out.coef[k] += a * b;
                }
            }
        }
        out
    }

    pub fn powi(&self, n: u32) -> Self {
        (0..n).fold(Self::constant(self.nvars, self.deg, 1.0), |acc, _| acc.mul(self))
    }

    /// f(self) for a univariate Taylor series f; requires a zero constant term.
    pub fn compose(&self, f: &[f64]) -> Self {
        assert!(self.coef[0] == 0.0, "inner series must vanish at the origin");
        let top = (self.nvars * self.deg).min(f.len().saturating_sub(1));
        let mut acc = Self::constant(self.nvars, self.deg, f.get(top).copied().unwrap_or(0.0));
        for n in (0..top).rev() {
            acc = acc.mul(self);
            acc.coef[0] += f[n];
        }
        acc
    }

    /// Smallest total degree carrying a nonzero coefficient.
    pub fn min_degree(&self) -> Option<usize> {
        self.coef
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(i, _)| self.exps(i).iter().sum())
            .min()
    }

    fn check(&self, other: &Self) {
        assert!(self.nvars == other.nvars && self.deg == other.deg, "series shapes differ");
    }
}

/// Product of univariate Taylor series, truncated at degree n.
pub fn mul_univariate(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    for (i, &x) in a.iter().enumerate().take(n + 1) {
        for (j, &y) in b.iter().enumerate().take(n + 1 - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// 1/f as a Taylor series to degree n; f(0) ≠ 0.
pub fn inv_univariate(f: &[f64], n: usize) -> Vec<f64> {
    assert!(f[0] != 0.0);
    let mut g = vec![0.0; n + 1];
    g[0] = 1.0 / f[0];
    for m in 1..=n {
        let s: f64 = (1..=m.min(f.len() - 1)).map(|j| f[j] * g[m - j]).sum();
        g[m] = -s / f[0];
    }
    g
}

/// exp(f) to degree n; f(0) = 0.
pub fn exp_univariate(f: &[f64], n: usize) -> Vec<f64> {
    assert!(f.first().map_or(true, |c| *c == 0.0));
    // g' = f' g
    let mut g = vec![0.0; n + 1];
    g[0] = 1.0;
    for m in 1..=n {
        let s: f64 = (1..=m.min(f.len() - 1)).map(|j| j as f64 * f[j] * g[m - j]).sum();
        g[m] = s / m as f64;
    }
    g
}
