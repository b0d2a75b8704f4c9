//! Elementary integer arithmetic shared by the sweeps.

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Least nonnegative residue of a signed value.
#[inline]
pub fn rem(a: i128, m: u64) -> u64 {
    a.rem_euclid(m as i128) as u64
}

/// Legendre symbol by Euler's criterion. `p` must be an odd prime.
pub fn legendre(a: i128, p: u64) -> i8 {
    let r = rem(a, p);
    if r == 0 {
        return 0;
    }
    if pow_mod(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Jacobi symbol (a/n) for odd positive n.
pub fn jacobi(a: i128, n: u64) -> i8 {
    assert!(n % 2 == 1, "jacobi needs an odd modulus");
    let mut a = rem(a, n);
    let mut n = n;
    let mut s = 1i8;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                s = -s;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            s = -s;
        }
        a %= n;
    }
    if n == 1 {
        s
    } else {
        0
    }
}

pub fn gcd(a: u128, b: u128) -> u128 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Deterministic Miller-Rabin for all of u64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primes up to and including `n` (sieve of Eratosthenes).
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

fn pollard_brent(n: u64) -> u64 {
    // Deterministic sequence of constants keeps factorizations reproducible.
    for c in 1..200u64 {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut y, m) = (2u64, 128usize);
        let (mut g, mut r, mut q) = (1u64, 1usize, 1u64);
        let (mut x, mut ys) = (0u64, 0u64);
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..m.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q as u128, n as u128) as u64;
                k += m;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys) as u128, n as u128) as u64;
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
    n
}

/// Prime factorization as ascending (prime, exponent) pairs.
/// Returns `None` only if Pollard-Brent exhausts its constants.
pub fn factor(n: u64) -> Option<Vec<(u64, u32)>> {
    let mut out: Vec<(u64, u32)> = Vec::new();
    let mut n = n;
    let push = |p: u64, out: &mut Vec<(u64, u32)>| match out.iter_mut().find(|e| e.0 == p) {
        Some(e) => e.1 += 1,
        None => out.push((p, 1)),
    };
    let mut d = 2u64;
    while d < 1000 && d * d <= n {
        while n % d == 0 {
            push(d, &mut out);
            n /= d;
        }
        d += if d == 2 { 1 } else { 2 };
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime(m) {
            push(m, &mut out);
            continue;
        }
        let g = pollard_brent(m);
        if g == m || g == 1 {
            return None;
        }
        stack.push(g);
        stack.push(m / g);
    }
    out.sort_unstable();
    Some(out)
}

pub fn mobius(n: u64) -> i8 {
    assert!(n > 0);
    let f = factor(n).expect("u64 factorization");
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn is_squarefree(n: u64) -> bool {
    n != 0 && factor(n).expect("u64 factorization").iter().all(|&(_, e)| e == 1)
}

pub fn euler_phi(n: u64) -> u64 {
    factor(n)
        .expect("u64 factorization")
        .iter()
        .fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

/// Exact floor of the k-th root.
pub fn iroot(n: u128, k: u32) -> u128 {
    if n < 2 || k == 1 {
        return n;
    }
    let mut r = (n as f64).powf(1.0 / k as f64).round() as u128;
    let pow_le = |r: u128| -> bool {
        let mut acc: u128 = 1;
        for _ in 0..k {
            match acc.checked_mul(r) {
                Some(v) if v <= n => acc = v,
                _ => return false,
            }
        }
        true
    };
    while r > 0 && !pow_le(r) {
        r -= 1;
    }
    while pow_le(r + 1) {
        r += 1;
    }
    r
}

/// Largest e with p^e | n (n != 0).
pub fn valuation(n: i128, p: u64) -> u32 {
    assert!(n != 0);
    let (mut n, p) = (n.unsigned_abs(), p as u128);
    let mut e = 0;
    while n % p == 0 {
        n /= p;
        e += 1;
    }
    e
}

/// Quadratic character table for an odd prime: `chi[x]` in {-1, 0, 1}.
#[derive(Debug, Clone)]
pub struct QrTable {
    pub p: u64,
    chi: Vec<i8>,
}

impl QrTable {
    pub fn new(p: u64) -> Self {
        assert!(p > 2);
        let mut chi = vec![-1i8; p as usize];
        chi[0] = 0;
        for y in 1..=(p - 1) / 2 {
            chi[(y * y % p) as usize] = 1;
        }
        Self { p, chi }
    }

    #[inline]
    pub fn chi(&self, x: u64) -> i8 {
        self.chi[x as usize]
    }

    /// a_p of y^2 = x^3 + ax + b with a, b already reduced.
    pub fn trace(&self, a: u64, b: u64) -> i64 {
        let p = self.p;
        let mut s = 0i64;
        // x^3 + ax + b built incrementally to avoid per-step multiplications
        let mut ax = 0u64;
        for x in 0..p {
            let x3 = x * x % p * x % p;
            let mut v = x3 + ax + b;
            while v >= p {
                v -= p;
            }
            s += self.chi[v as usize] as i64;
            ax += a;
            if ax >= p {
                ax -= p;
            }
        }
        -s
    }

    /// a_p for every a mod p at fixed b; one pass per x.
    pub fn traces_over_a(&self, b: u64) -> Vec<i64> {
        let p = self.p as usize;
        let mut out = vec![0i64; p];
        for x in 0..p {
            let base = (x * x % p * x + b as usize) % p;
            let mut v = base;
            for slot in out.iter_mut() {
                *slot -= self.chi[v] as i64;
                v += x;
                if v >= p {
                    v -= p;
                }
            }
        }
        out
    }
}
