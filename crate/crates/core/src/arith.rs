//! Exact classical number theory: multiplicative functions, divisor
//! machinery, the Chinese remainder theorem and the three scalar
//! convolution products. This module is the ground-truth oracle for the
//! operator layers.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_complex::Complex64;

use crate::{Error, Result};

/// A scalar arithmetic function on the positive integers, with a shared
/// memo table and an optional multiplicativity claim.
///
/// Values are cheap to clone; the memo is shared between clones and safe
/// for concurrent readers/writers.
#[derive(Clone)]
pub struct ArithmeticFn {
    name: String,
    eval: Arc<dyn Fn(u64) -> Complex64 + Send + Sync>,
    memo: Arc<RwLock<HashMap<u64, Complex64>>>,
    multiplicative: bool,
}

impl std::fmt::Debug for ArithmeticFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ArithmeticFn")
            .field("name", &self.name)
            .field("multiplicative", &self.multiplicative)
            .finish()
    }
}

impl ArithmeticFn {
    /// Wrap a callback. If `multiplicative` is claimed, `f(1) = 1` is
    /// required.
    pub fn new<F>(name: &str, multiplicative: bool, f: F) -> Self
    where
        F: Fn(u64) -> Complex64 + Send + Sync + 'static,
    {
        if multiplicative {
            let one = f(1);
            assert!(
                (one - Complex64::new(1.0, 0.0)).norm() < 1e-12,
                "multiplicative function {name} must satisfy f(1) = 1, got {one}"
            );
        }
        ArithmeticFn {
            name: name.to_string(),
            eval: Arc::new(f),
            memo: Arc::new(RwLock::new(HashMap::new())),
            multiplicative,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn claims_multiplicative(&self) -> bool {
        self.multiplicative
    }

    pub fn eval(&self, n: u64) -> Complex64 {
        assert!(n >= 1, "arithmetic functions are defined on n >= 1");
        if let Some(v) = self.memo.read().unwrap().get(&n) {
            return *v;
        }
        let v = (self.eval)(n);
        self.memo.write().unwrap().insert(n, v);
        v
    }

    /// The constant-one function nu_0.
    pub fn nu0() -> Self {
        Self::new("nu0", true, |_| Complex64::new(1.0, 0.0))
    }

    /// The identity function nu_1(n) = n.
    pub fn nu1() -> Self {
        Self::new("nu1", true, |n| Complex64::new(n as f64, 0.0))
    }

    /// The Dirichlet unit: 1 at n = 1, 0 elsewhere.
    pub fn eps() -> Self {
        Self::new("eps", true, |n| {
            Complex64::new(if n == 1 { 1.0 } else { 0.0 }, 0.0)
        })
    }

    pub fn mobius() -> Self {
        Self::new("mobius", true, |n| {
            Complex64::new(mobius(n).unwrap() as f64, 0.0)
        })
    }

    pub fn euler_phi() -> Self {
        Self::new("phi", true, |n| {
            Complex64::new(euler_phi(n).unwrap() as f64, 0.0)
        })
    }

    /// n -> sigma_s(n).
    pub fn sigma(s: Complex64) -> Self {
        Self::new(&format!("sigma:{}", s.re), true, move |n| {
            sigma(s, n).unwrap()
        })
    }

    /// n -> n^{-s}, the weight of the generalized zeta operator.
    pub fn inv_power(s: Complex64) -> Self {
        Self::new(&format!("invpow:{}", s.re), true, move |n| {
            Complex64::new(n as f64, 0.0).powc(-s)
        })
    }
}

/// A system of congruences x = r_i (mod m_i) with reduced residues.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CongruenceSystem {
    entries: Vec<(u64, u64)>,
}

impl CongruenceSystem {
    pub fn new(entries: Vec<(u64, u64)>) -> Result<Self> {
        for &(residue, modulus) in &entries {
            if modulus < 1 {
                return Err(Error::ZeroModulus);
            }
            if residue >= modulus {
                return Err(Error::UnreducedResidue { residue, modulus });
            }
        }
        Ok(CongruenceSystem { entries })
    }

    pub fn entries(&self) -> &[(u64, u64)] {
        &self.entries
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd(a, b) * b
}

/// Prime factorization by trial division with a 2-3-5 wheel.
pub fn factorize(n: u64) -> Result<Vec<(u64, u32)>> {
    if n < 1 {
        return Err(Error::NonPositive);
    }
    let mut n = n;
    let mut out = Vec::new();
    for p in [2u64, 3, 5] {
        if n % p == 0 {
            let mut a = 0;
            while n % p == 0 {
                n /= p;
                a += 1;
            }
            out.push((p, a));
        }
    }
    const WHEEL: [u64; 8] = [4, 2, 4, 2, 4, 6, 2, 6];
    let mut p = 7u64;
    let mut i = 0;
    while p.saturating_mul(p) <= n {
        if n % p == 0 {
            let mut a = 0;
            while n % p == 0 {
                n /= p;
                a += 1;
            }
            out.push((p, a));
        }
        p += WHEEL[i];
        i = (i + 1) % WHEEL.len();
    }
    if n > 1 {
        out.push((n, 1));
    }
    Ok(out)
}

/// All positive divisors of n, sorted ascending.
pub fn divisors(n: u64) -> Result<Vec<u64>> {
    let factors = factorize(n)?;
    let mut divs = vec![1u64];
    for (p, a) in factors {
        let base = divs.clone();
        let mut pk = 1u64;
        for _ in 0..a {
            pk *= p;
            divs.extend(base.iter().map(|d| d * pk));
        }
    }
    divs.sort_unstable();
    Ok(divs)
}

/// Mobius function: (-1)^omega(n) on squarefree n, 0 otherwise.
pub fn mobius(n: u64) -> Result<i64> {
    let factors = factorize(n)?;
    if factors.iter().any(|&(_, a)| a > 1) {
        return Ok(0);
    }
    Ok(if factors.len() % 2 == 0 { 1 } else { -1 })
}

/// Euler totient.
pub fn euler_phi(n: u64) -> Result<u64> {
    let factors = factorize(n)?;
    let mut phi = n;
    for (p, _) in factors {
        phi = phi / p * (p - 1);
    }
    Ok(phi)
}

/// Number of distinct prime factors; omega(1) = 0.
pub fn omega(n: u64) -> Result<u32> {
    Ok(factorize(n)?.len() as u32)
}

/// Divisor power sum sigma_s(n) = sum_{d | n} d^s.
pub fn sigma(s: Complex64, n: u64) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for d in divisors(n)? {
        acc += Complex64::new(d as f64, 0.0).powc(s);
    }
    Ok(acc)
}

/// M_s(n) = prod_k ((a_k + 1)^s - a_k^s) over n = prod p_k^{a_k};
/// M_s(1) = 1. Counts ordered s-tuples of divisors with lcm n.
pub fn m_count(s: u32, n: u64) -> Result<u64> {
    if s < 1 {
        return Err(Error::NonPositive);
    }
    let mut acc: u64 = 1;
    for (_, a) in factorize(n)? {
        let a = a as u64;
        let hi = (a + 1)
            .checked_pow(s)
            .ok_or(Error::Overflow("m_count"))?;
        let lo = a.checked_pow(s).ok_or(Error::Overflow("m_count"))?;
        acc = acc
            .checked_mul(hi - lo)
            .ok_or(Error::Overflow("m_count"))?;
    }
    Ok(acc)
}

/// Dirichlet convolution (a * b)(n) = sum_{kl = n} a(k) b(l).
pub fn dirichlet_conv(a: &ArithmeticFn, b: &ArithmeticFn, n: u64) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for d in divisors(n)? {
        acc += a.eval(d) * b.eval(n / d);
    }
    Ok(acc)
}

/// lcm convolution (a [] b)(n) = sum over ordered divisor pairs with
/// lcm(k, l) = n of a(k) b(l).
pub fn lcm_conv(a: &ArithmeticFn, b: &ArithmeticFn, n: u64) -> Result<Complex64> {
    let divs = divisors(n)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for &k in &divs {
        for &l in &divs {
            if lcm(k, l) == n {
                acc += a.eval(k) * b.eval(l);
            }
        }
    }
    Ok(acc)
}

/// Unitary convolution: sum over kl = n with gcd(k, l) = 1.
pub fn unitary_conv(a: &ArithmeticFn, b: &ArithmeticFn, n: u64) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for d in divisors(n)? {
        if gcd(d, n / d) == 1 {
            acc += a.eval(d) * b.eval(n / d);
        }
    }
    Ok(acc)
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

/// Solve the congruence system. Returns the unique `(j, L)` with
/// `0 <= j < L = lcm(moduli)` if solvable, `None` otherwise.
pub fn crt_solve(sys: &CongruenceSystem) -> Result<Option<(u64, u64)>> {
    if sys.entries().is_empty() {
        return Err(Error::EmptySystem);
    }
    let mut r: i128 = 0;
    let mut m: i128 = 1;
    for &(residue, modulus) in sys.entries() {
        let r2 = residue as i128;
        let m2 = modulus as i128;
        let (g, p, _) = ext_gcd(m, m2);
        if (r2 - r) % g != 0 {
            return Ok(None);
        }
        let l = m
            .checked_mul(m2 / g)
            .ok_or(Error::Overflow("crt_solve"))?;
        // r + m * t = r2 (mod m2)  =>  t = (r2 - r)/g * p (mod m2/g)
        let t = ((r2 - r) / g % (m2 / g) * (p % (m2 / g))) % (m2 / g);
        r = (r + m * t).rem_euclid(l);
        m = l;
    }
    if m > u64::MAX as i128 {
        return Err(Error::Overflow("crt_solve"));
    }
    Ok(Some((r as u64, m as u64)))
}

/// Coprime pairs (n, m) with nm <= n_max where a(nm) != a(n) a(m)
/// beyond 1e-12 (exact when the values are exact in f64).
pub fn check_multiplicative(a: &ArithmeticFn, n_max: u64) -> Vec<(u64, u64)> {
    let mut violations = Vec::new();
    for n in 1..=n_max {
        for m in n..=n_max / n {
            if gcd(n, m) != 1 {
                continue;
            }
            let lhs = a.eval(n * m);
            let rhs = a.eval(n) * a.eval(m);
            if (lhs - rhs).norm() > 1e-12 {
                violations.push((n, m));
            }
        }
    }
    violations
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    // brute-force oracles, independent of the implementation path

    fn phi_brute(n: u64) -> u64 {
        (1..=n).filter(|&k| gcd(k, n) == 1).count() as u64
    }

    fn lcm_tuple_count(s: u32, n: u64) -> u64 {
        // ordered s-tuples of divisors of n with lcm equal to n
        let divs = divisors(n).unwrap();
        let mut tuples: Vec<u64> = vec![1];
        for _ in 0..s {
            let mut next = Vec::new();
            for &l in &tuples {
                for &d in &divs {
                    next.push(lcm(l, d));
                }
            }
            tuples = next;
        }
        tuples.into_iter().filter(|&l| l == n).count() as u64
    }

    #[test]
    fn mobius_examples() {
        assert_eq!(mobius(1).unwrap(), 1);
        assert_eq!(mobius(12).unwrap(), 0);
        assert_eq!(mobius(30).unwrap(), -1);
        assert!(mobius(0).is_err());
    }

    #[test]
    fn phi_matches_gcd_count() {
        assert_eq!(euler_phi(1).unwrap(), 1);
        assert_eq!(euler_phi(12).unwrap(), 4);
        for p in [2u64, 3, 5, 7, 11, 13] {
            assert_eq!(euler_phi(p).unwrap(), p - 1);
        }
        for n in 1..=200 {
            assert_eq!(euler_phi(n).unwrap(), phi_brute(n), "phi({n})");
        }
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma(c(1.0), 6).unwrap(), c(12.0));
        assert_eq!(sigma(c(2.0), 4).unwrap(), c(21.0));
        for n in 1..=50 {
            let d = divisors(n).unwrap().len() as f64;
            assert!((sigma(c(0.0), n).unwrap() - c(d)).norm() < 1e-12);
        }
    }

    #[test]
    fn omega_examples() {
        assert_eq!(omega(1).unwrap(), 0);
        assert_eq!(omega(12).unwrap(), 2);
        assert_eq!(omega(30).unwrap(), 3);
    }

    #[test]
    fn dirichlet_identities() {
        let nu0 = ArithmeticFn::nu0();
        let phi = ArithmeticFn::euler_phi();
        let mu = ArithmeticFn::mobius();
        assert_eq!(dirichlet_conv(&nu0, &phi, 12).unwrap(), c(12.0));
        for n in 1..=10_000u64 {
            let v = dirichlet_conv(&nu0, &phi, n).unwrap();
            assert_eq!(v, c(n as f64), "nu0 * phi at {n}");
            let e = dirichlet_conv(&mu, &nu0, n).unwrap();
            assert_eq!(e, c(if n == 1 { 1.0 } else { 0.0 }), "mu * nu0 at {n}");
        }
        assert_eq!(
            dirichlet_conv(&phi, &mu, 1).unwrap(),
            phi.eval(1) * mu.eval(1)
        );
    }

    #[test]
    fn lcm_conv_matches_m_count() {
        let nu0 = ArithmeticFn::nu0();
        assert_eq!(lcm_conv(&nu0, &nu0, 12).unwrap(), c(15.0));
        assert_eq!(m_count(2, 12).unwrap(), 15);
        assert_eq!(lcm_conv(&nu0, &nu0, 7).unwrap(), c(3.0));
        for n in 1..=10_000u64 {
            let v = lcm_conv(&nu0, &nu0, n).unwrap();
            assert_eq!(v, c(m_count(2, n).unwrap() as f64), "M_2 at {n}");
        }
    }

    #[test]
    fn m_count_matches_tuple_oracle() {
        assert_eq!(m_count(3, 4).unwrap(), 19);
        assert_eq!(m_count(5, 1).unwrap(), 1);
        for n in 1..=500u64 {
            assert_eq!(m_count(2, n).unwrap(), lcm_tuple_count(2, n), "s=2 n={n}");
            assert_eq!(m_count(3, n).unwrap(), lcm_tuple_count(3, n), "s=3 n={n}");
        }
        assert!(m_count(0, 5).is_err());
    }

    #[test]
    fn unitary_conv_matches_two_omega() {
        let nu0 = ArithmeticFn::nu0();
        assert_eq!(unitary_conv(&nu0, &nu0, 12).unwrap(), c(4.0));
        assert_eq!(unitary_conv(&nu0, &nu0, 8).unwrap(), c(2.0));
        for n in 1..=10_000u64 {
            let v = unitary_conv(&nu0, &nu0, n).unwrap();
            let expected = (1u64 << omega(n).unwrap()) as f64;
            assert_eq!(v, c(expected), "2^omega at {n}");
        }
    }

    #[test]
    fn crt_examples() {
        let sys = CongruenceSystem::new(vec![(1, 2), (2, 3)]).unwrap();
        assert_eq!(crt_solve(&sys).unwrap(), Some((5, 6)));
        let sys = CongruenceSystem::new(vec![(0, 2), (1, 2)]).unwrap();
        assert_eq!(crt_solve(&sys).unwrap(), None);
        let sys = CongruenceSystem::new(vec![(0, 1)]).unwrap();
        assert_eq!(crt_solve(&sys).unwrap(), Some((0, 1)));
        assert!(crt_solve(&CongruenceSystem::new(vec![]).unwrap()).is_err());
        assert!(CongruenceSystem::new(vec![(3, 2)]).is_err());
    }

    #[test]
    fn crt_agrees_with_exhaustive_scan() {
        for n in 1..=30u64 {
            for m in 1..=30u64 {
                let l = lcm(n, m);
                for a in 0..n {
                    for b in 0..m {
                        let sys = CongruenceSystem::new(vec![(a, n), (b, m)]).unwrap();
                        let got = crt_solve(&sys).unwrap();
                        let scan = (0..l).find(|&x| x % n == a && x % m == b);
                        assert_eq!(got, scan.map(|j| (j, l)), "n={n} m={m} a={a} b={b}");
                    }
                }
            }
        }
    }

    #[test]
    fn multiplicativity_checker() {
        assert!(check_multiplicative(&ArithmeticFn::mobius(), 100).is_empty());
        assert!(check_multiplicative(&ArithmeticFn::sigma(c(1.0)), 100).is_empty());
        let shifted = ArithmeticFn::new("n+1", false, |n| c(n as f64 + 1.0));
        assert!(check_multiplicative(&shifted, 10).contains(&(2, 3)));
    }

    #[test]
    fn scalar_convolutions_commute_and_associate() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let fns = [
            ArithmeticFn::mobius(),
            ArithmeticFn::euler_phi(),
            ArithmeticFn::nu1(),
            ArithmeticFn::new("rand", false, |n| c(((n * 2654435761) % 17) as f64 - 8.0)),
        ];
        for _ in 0..40 {
            let n = rng.gen_range(1..=200u64);
            let a = &fns[rng.gen_range(0..fns.len())];
            let b = &fns[rng.gen_range(0..fns.len())];
            let g = &fns[rng.gen_range(0..fns.len())];
            for conv in [dirichlet_conv, lcm_conv, unitary_conv] {
                let ab = conv(a, b, n).unwrap();
                let ba = conv(b, a, n).unwrap();
                assert!((ab - ba).norm() < 1e-9, "commutativity at {n}");
                // associativity via partially applied sequences
                let ab_fn = {
                    let (a, b) = (a.clone(), b.clone());
                    ArithmeticFn::new("ab", false, move |k| conv(&a, &b, k).unwrap())
                };
                let bg_fn = {
                    let (b, g) = (b.clone(), g.clone());
                    ArithmeticFn::new("bg", false, move |k| conv(&b, &g, k).unwrap())
                };
                let left = conv(&ab_fn, g, n).unwrap();
                let right = conv(a, &bg_fn, n).unwrap();
                assert!((left - right).norm() < 1e-8, "associativity at {n}");
            }
        }
    }
}
