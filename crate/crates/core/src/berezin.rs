//! Hardy-space representation: reproducing-kernel (phase) states,
//! Berezin symbols of truncated operators, closed forms for the
//! projector / Ramanujan / zeta families, and radial-limit schedules
//! that recover the classical arithmetic quantities at the boundary.

use num_complex::Complex64;

use crate::arith::{self, ArithmeticFn};
use crate::fock::{self, FockOperator};
use crate::report::IdentityCheck;
use crate::{Error, Result};

const DISC_MARGIN: f64 = 1e-12;

/// A point strictly inside the open unit disc (|lambda| <= 1 - 1e-12).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiscPoint {
    lambda: Complex64,
}

impl DiscPoint {
    pub fn new(lambda: Complex64) -> Result<Self> {
        let modulus = lambda.norm();
        if modulus > 1.0 - DISC_MARGIN {
            return Err(Error::OutsideDisc { modulus });
        }
        Ok(DiscPoint { lambda })
    }

    pub fn value(&self) -> Complex64 {
        self.lambda
    }

    /// |lambda|^2, the variable every diagonal symbol depends on.
    pub fn abs_sq(&self) -> f64 {
        self.lambda.norm_sqr()
    }
}

/// Normalized truncated phase state at a disc point: coefficient m is
/// sqrt(1 - |lambda|^2) lambda^m, with the exact mass beyond the
/// truncation as `tail_bound`.
#[derive(Clone, Debug)]
pub struct KernelState {
    pub point: DiscPoint,
    pub dim: usize,
    pub coeffs: Vec<Complex64>,
    pub tail_bound: f64,
}

/// Smallest truncation with |lambda|^{2D} <= tol.
pub fn min_dim(point: &DiscPoint, tol: f64) -> usize {
    let x = point.abs_sq();
    if x == 0.0 || tol >= 1.0 {
        return 1;
    }
    (tol.ln() / x.ln()).ceil().max(1.0) as usize
}

pub fn kernel_state(point: &DiscPoint, dim: usize) -> KernelState {
    let lambda = point.value();
    let scale = (1.0 - point.abs_sq()).sqrt();
    let mut coeffs = Vec::with_capacity(dim);
    let mut pow = Complex64::new(1.0, 0.0);
    for _ in 0..dim {
        coeffs.push(scale * pow);
        pow *= lambda;
    }
    KernelState {
        point: *point,
        dim,
        coeffs,
        tail_bound: point.abs_sq().powi(dim as i32),
    }
}

/// As [`kernel_state`], but errors when the tail mass exceeds `tol`,
/// reporting the minimal sufficient dimension.
pub fn kernel_state_checked(point: &DiscPoint, dim: usize, tol: f64) -> Result<KernelState> {
    let state = kernel_state(point, dim);
    if state.tail_bound > tol {
        return Err(Error::DimTooSmall {
            dim,
            required: min_dim(point, tol),
        });
    }
    Ok(state)
}

/// Truncated overlap <z|w> together with the tail bound on its distance
/// from the closed form sqrt(1-|z|^2) sqrt(1-|w|^2) / (1 - conj(z) w).
pub fn overlap(z: &DiscPoint, w: &DiscPoint, dim: usize) -> (Complex64, f64) {
    let kz = kernel_state(z, dim);
    let kw = kernel_state(w, dim);
    let value: Complex64 = kz
        .coeffs
        .iter()
        .zip(&kw.coeffs)
        .map(|(a, b)| a.conj() * b)
        .sum();
    let r = (z.value().conj() * w.value()).norm();
    let scale = ((1.0 - z.abs_sq()) * (1.0 - w.abs_sq())).sqrt();
    let bound = scale * r.powi(dim as i32) / (1.0 - r);
    (value, bound)
}

/// Closed form for the overlap of two phase states.
pub fn overlap_closed(z: &DiscPoint, w: &DiscPoint) -> Complex64 {
    let scale = ((1.0 - z.abs_sq()) * (1.0 - w.abs_sq())).sqrt();
    scale / (Complex64::new(1.0, 0.0) - z.value().conj() * w.value())
}

/// A Berezin symbol value with its truncation-error estimate.
#[derive(Clone, Copy, Debug)]
pub struct BerezinValue {
    pub value: Complex64,
    pub error_bound: f64,
}

/// Berezin symbol of a truncated operator: the quadratic form against
/// the kernel state normalized on the truncation.
pub fn berezin(op: &FockOperator, point: &DiscPoint) -> Result<BerezinValue> {
    let dim = op.dim();
    let state = kernel_state(point, dim);
    let applied = op.apply(&state.coeffs)?;
    let numerator: Complex64 = state
        .coeffs
        .iter()
        .zip(&applied)
        .map(|(k, a)| k.conj() * a)
        .sum();
    let norm_sq: f64 = state.coeffs.iter().map(|k| k.norm_sqr()).sum();
    let x_d = state.tail_bound;
    Ok(BerezinValue {
        value: numerator / norm_sq,
        error_bound: op.max_abs_entry() * x_d / (1.0 - x_d).max(f64::MIN_POSITIVE),
    })
}

/// Closed form of the projector symbol:
/// (1 - |lambda|^2) |lambda|^{2j} / (1 - |lambda|^{2n}).
pub fn berezin_pi_closed(j: u64, n: u64, point: &DiscPoint) -> f64 {
    let x = point.abs_sq();
    if x == 0.0 {
        return if j == 0 { 1.0 } else { 0.0 };
    }
    (1.0 - x) * x.powi(j as i32) / (1.0 - x.powi(n as i32))
}

/// Closed form of the C_j(n) symbol as the paper's divisor sum
/// sum_{d | n} mu(d) (n/d) (1 - x) x^j / (1 - x^{n/d}), x = |lambda|^2.
/// Matches the operator symbol exactly at j = 0 (the verified domain of
/// C_j = mu * nu1 Pi_j with literal projectors).
pub fn berezin_c_closed(j: u64, n: u64, point: &DiscPoint) -> Result<f64> {
    let x = point.abs_sq();
    let mut acc = 0.0;
    for d in arith::divisors(n)? {
        let q = (n / d) as i32;
        let mu = arith::mobius(d)? as f64;
        let term = if x == 0.0 {
            if j == 0 { 1.0 } else { 0.0 }
        } else {
            (1.0 - x) * x.powi(j as i32) / (1.0 - x.powi(q))
        };
        acc += mu * (n / d) as f64 * term;
    }
    Ok(acc)
}

/// Closed form of the T_j(n) symbol as the divisor sum
/// sum_{d | n} mu(d) (1 - x) x^j / (1 - x^d). Matches the operator
/// symbol at j = 0 for n >= 2; at n = 1 the operator is the identity
/// minus the vacuum projector while the divisor sum gives the identity.
pub fn berezin_t_closed(j: u64, n: u64, point: &DiscPoint) -> Result<f64> {
    let x = point.abs_sq();
    let mut acc = 0.0;
    for d in arith::divisors(n)? {
        let mu = arith::mobius(d)? as f64;
        let term = if x == 0.0 {
            if j == 0 { 1.0 } else { 0.0 }
        } else {
            (1.0 - x) * x.powi(j as i32) / (1.0 - x.powi(d as i32))
        };
        acc += mu * term;
    }
    Ok(acc)
}

fn require_zeta_domain(s: Complex64) -> Result<()> {
    if s.re <= 1.0 {
        return Err(Error::ZetaDomain(s.re));
    }
    Ok(())
}

/// Riemann zeta for Re(s) > 1 by direct summation with an
/// Euler-Maclaurin tail correction.
pub fn zeta(s: Complex64) -> Result<Complex64> {
    require_zeta_domain(s)?;
    let cutoff = 20_000u64;
    let mut acc = Complex64::new(0.0, 0.0);
    for n in 1..cutoff {
        acc += Complex64::new(n as f64, 0.0).powc(-s);
    }
    let nf = Complex64::new(cutoff as f64, 0.0);
    acc += nf.powc(Complex64::new(1.0, 0.0) - s) / (s - 1.0);
    acc += nf.powc(-s) * 0.5;
    acc += s * nf.powc(-s - 1.0) / 12.0;
    Ok(acc)
}

/// Lambert-type Berezin symbol of the generalized zeta operator:
/// sum_n n^{-s} (1 - x) x^n / (1 - x^n), x = |lambda|^2. Terms are
/// summed until they drop below 1e-15 and the 1/n^{Re(s)+1} tail bound
/// is negligible.
pub fn berezin_zeta(s: Complex64, point: &DiscPoint) -> Result<Complex64> {
    require_zeta_domain(s)?;
    let x = point.abs_sq();
    if x == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    let mut xn = 1.0f64;
    let mut n = 0u64;
    loop {
        n += 1;
        xn *= x;
        if xn == 0.0 {
            break;
        }
        let term = Complex64::new(n as f64, 0.0).powc(-s) * ((1.0 - x) * xn / (1.0 - xn));
        acc += term;
        let tail_bound = (n as f64).powf(-s.re) / s.re;
        if term.norm() < 1e-15 && tail_bound < 1e-12 {
            break;
        }
        if n > 20_000_000 {
            break;
        }
    }
    Ok(acc)
}

/// An increasing sequence of radii approaching the boundary along a
/// fixed direction.
#[derive(Clone, Debug)]
pub struct RadialSchedule {
    radii: Vec<f64>,
    direction: Complex64,
}

impl RadialSchedule {
    pub fn new(radii: Vec<f64>, angle: f64) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::BadSchedule);
        }
        for w in radii.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::BadSchedule);
            }
        }
        if radii[0] <= 0.0 || *radii.last().unwrap() >= 1.0 {
            return Err(Error::BadSchedule);
        }
        Ok(RadialSchedule {
            radii,
            direction: Complex64::from_polar(1.0, angle),
        })
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn direction(&self) -> Complex64 {
        self.direction
    }

    pub fn points(&self) -> Result<Vec<DiscPoint>> {
        self.radii
            .iter()
            .map(|&r| DiscPoint::new(self.direction * r))
            .collect()
    }
}

/// Values of a disc function along a schedule. The last value is the
/// limit estimate; `defects_vs_estimate` and `monotone` are advisory
/// trend information, no extrapolation is applied.
#[derive(Clone, Debug)]
pub struct RadialReport {
    pub values: Vec<Complex64>,
    pub estimate: Complex64,
    pub defects_vs_estimate: Vec<f64>,
    pub monotone: bool,
}

pub fn radial_limit<F>(f: F, schedule: &RadialSchedule) -> Result<RadialReport>
where
    F: Fn(&DiscPoint) -> Result<Complex64>,
{
    let mut values = Vec::new();
    for p in schedule.points()? {
        values.push(f(&p)?);
    }
    let estimate = *values.last().unwrap();
    let defects: Vec<f64> = values[..values.len() - 1]
        .iter()
        .map(|v| (v - estimate).norm())
        .collect();
    let monotone = defects.windows(2).all(|w| w[1] <= w[0]);
    Ok(RadialReport {
        values,
        estimate,
        defects_vs_estimate: defects,
        monotone,
    })
}

/// Check the two Berezin-symbol identities tying the Ramanujan-type
/// divisor sums to the coprime exponential sums, with the conventions
/// fixed by the brute-force oracle:
///
/// * ref1 compares the divisor route in the residue-class (normalized)
///   convention, i.e. with exponent `j mod (n/d)`, against the
///   exponential sum sum_{gcd(k,n)=1} eps^{-kj} / (1 - eps^k x). The
///   printed literal exponent x^j only matches when j = 0 or mu-terms
///   vanish; the normalized reading holds for every j and n.
/// * ref2 compares the divisor sum against the progression sum
///   (1 - x^n)^{-1} sum_{gcd(k,n)=1} x^{k+j} with unit weights. The
///   printed phase eps^{kj} only matches when j = 0 mod n; the
///   phase-free reading holds for every j and n >= 2. n = 1 is skipped:
///   the single k = n term shifts the progression by a full period
///   (T_0(1) = 1 - |0><0| while nu0 * mu Pi_0 (1) = 1).
pub fn check_ref_identities(n: u64, j: u64, point: &DiscPoint) -> Result<Vec<IdentityCheck>> {
    if n < 1 {
        return Err(Error::NonPositive);
    }
    let tol = 1e-10;
    let x = point.abs_sq();
    let mut out = Vec::new();

    // ref1
    let mut lhs1 = Complex64::new(0.0, 0.0);
    for d in arith::divisors(n)? {
        let q = n / d;
        let mu = arith::mobius(d)? as f64;
        lhs1 += Complex64::new(
            mu * q as f64 * x.powi((j % q) as i32) / (1.0 - x.powi(q as i32)),
            0.0,
        );
    }
    let mut rhs1 = Complex64::new(0.0, 0.0);
    for k in 1..=n {
        if arith::gcd(k, n) != 1 {
            continue;
        }
        let num = fock::root_of_unity(n, -((k * j) as i64));
        let den = Complex64::new(1.0, 0.0) - fock::root_of_unity(n, k as i64) * x;
        rhs1 += num / den;
    }
    out.push(
        IdentityCheck::new("ref1", (lhs1 - rhs1).norm(), tol)
            .at_n(n)
            .with_note(&format!(
                "j={j}; divisor route in residue-class convention (exponent j mod n/d)"
            )),
    );

    // ref2
    if n == 1 {
        out.push(
            IdentityCheck::skip(
                "ref2",
                "n=1 excluded: the k=n term shifts the progression by a full \
                 period (T_0(1) = 1 - |0><0| while nu0*mu Pi_0(1) = 1)",
            )
            .at_n(1),
        );
    } else {
        let mut lhs2 = 0.0;
        for d in arith::divisors(n)? {
            let mu = arith::mobius(d)? as f64;
            lhs2 += mu * x.powi(j as i32) / (1.0 - x.powi(d as i32));
        }
        let mut rhs2 = 0.0;
        for k in 1..=n {
            if arith::gcd(k, n) == 1 {
                rhs2 += x.powi((k + j) as i32);
            }
        }
        rhs2 /= 1.0 - x.powi(n as i32);
        out.push(
            IdentityCheck::new("ref2", (lhs2 - rhs2).abs(), tol)
                .at_n(n)
                .with_note(&format!("j={j}; progression sum with unit weights")),
        );
    }
    Ok(out)
}

/// Defect of multiplicativity of Berezin symbols along a schedule for a
/// coprime pair.
#[derive(Clone, Debug)]
pub struct AsympCheck {
    pub pair: (u64, u64),
    pub defects: Vec<f64>,
    pub final_defect: f64,
    pub decreasing: bool,
    pub pass: bool,
}

/// Track |sym(nm) - sym(n) sym(m)| along the schedule for each coprime
/// pair; passes when the final defect is below `tol` and the trend is
/// nonincreasing.
pub fn check_asymptotic_multiplicative(
    phi: &fock::OperatorSeq,
    pairs: &[(u64, u64)],
    schedule: &RadialSchedule,
    tol: f64,
) -> Result<Vec<AsympCheck>> {
    let mut out = Vec::new();
    for &(n, m) in pairs {
        assert_eq!(arith::gcd(n, m), 1, "pairs must be coprime");
        let mut defects = Vec::new();
        for p in schedule.points()? {
            let v_nm = berezin(&phi.get(n * m), &p)?.value;
            let v_n = berezin(&phi.get(n), &p)?.value;
            let v_m = berezin(&phi.get(m), &p)?.value;
            defects.push((v_nm - v_n * v_m).norm());
        }
        let final_defect = *defects.last().unwrap();
        let decreasing = defects.windows(2).all(|w| w[1] <= w[0]);
        out.push(AsympCheck {
            pair: (n, m),
            defects,
            final_defect,
            decreasing,
            pass: final_defect <= tol && decreasing,
        });
    }
    Ok(out)
}

// small-prime bitmask machinery for the zeta-weighted series

fn small_primes(limit: u64) -> Vec<u64> {
    let mut sieve = vec![true; limit as usize];
    let mut primes = Vec::new();
    for p in 2..limit {
        if sieve[p as usize] {
            primes.push(p);
            let mut q = p * p;
            while q < limit {
                sieve[q as usize] = false;
                q += p;
            }
        }
    }
    primes
}

fn prime_mask(mut n: u64, primes: &[u64]) -> u64 {
    let mut mask = 0u64;
    for (i, &p) in primes.iter().enumerate() {
        if p * p > n {
            break;
        }
        if n % p == 0 {
            mask |= 1 << i;
            while n % p == 0 {
                n /= p;
            }
        }
    }
    if n > 1 {
        if let Ok(i) = primes.binary_search(&n) {
            mask |= 1 << i;
        }
        // a remaining prime factor >= dim cannot collide with any index
    }
    mask
}

/// Verify the two zeta-weighted operator series on the diagonal of the
/// truncation, with the vacuum-subtracted C_0 / T_0 operators:
///
/// * sum_n n^{-(s+1)} C_0(n) = N_{alpha,0} / zeta(s+1), alpha(n) = n^{-s}
/// * sum_n n^{-s} T_0(n) = zeta(s) N_{mu alpha, 0}
///
/// The second weight carries the Mobius factor; the oracle shows the
/// mu-free weight only matches at diagonal index 1. Series cutoffs come
/// from the 1/n^{Re(s)} tail bounds at tolerance 1e-6. Both sides are
/// also compared as Berezin symbols at `point`.
pub fn zeta_weighted_series_check(
    s: Complex64,
    point: &DiscPoint,
    dim: usize,
) -> Result<Vec<IdentityCheck>> {
    require_zeta_domain(s)?;
    let tol = 1e-6;
    let sr = s.re;

    // --- C series: entries at m >= 1 are sum_{n <= Nc} n^{-(s+1)} c_n(m).
    // Rearranged over n = d e with d | m: entry = sum_{d | m} d * S(d),
    // S(d) = d^{-(s+1)} sum_{e <= Nc/d} mu(e) e^{-(s+1)}; this covers the
    // finite double sum exactly. Tail bound |c_n(m)| <= sigma_1(m).
    let sigma_max: f64 = (1..dim as u64)
        .map(|m| arith::sigma(Complex64::new(1.0, 0.0), m).unwrap().re)
        .fold(1.0, f64::max);
    let n_c = ((sigma_max / (sr * tol * 0.5)).powf(1.0 / sr)).ceil() as u64;
    let mut mu_partial = vec![Complex64::new(0.0, 0.0); dim];
    for (d, slot) in mu_partial.iter_mut().enumerate().skip(1) {
        let mut acc = Complex64::new(0.0, 0.0);
        for e in 1..=n_c / d as u64 {
            let mu = arith::mobius(e)? as f64;
            if mu != 0.0 {
                acc += Complex64::new(e as f64, 0.0).powc(-(s + 1.0)) * mu;
            }
        }
        *slot = acc;
    }
    let mut c_series = vec![Complex64::new(0.0, 0.0); dim];
    for d in 1..dim {
        let coef = Complex64::new(d as f64, 0.0).powc(-s) * mu_partial[d];
        let mut m = d;
        while m < dim {
            c_series[m] += coef;
            m += d;
        }
    }
    let alpha = ArithmeticFn::inv_power(s);
    let n_op = fock::number_op(&alpha, 0, dim)?;
    let zeta_s1 = zeta(s + 1.0)?;
    let mut dev_c = 0.0f64;
    for m in 0..dim {
        let rhs = n_op.entry(m, m) / zeta_s1;
        dev_c = dev_c.max((c_series[m] - rhs).norm());
    }
    // both sides vanish at the vacuum
    assert_eq!(c_series[0], Complex64::new(0.0, 0.0));

    // --- T series: entries at m >= 1 are sum_{n <= Nt, gcd(n,m)=1} n^{-s};
    // the target is zeta(s) (nu0 * mu alpha)(m). Tail bound sum n^{-s}.
    let n_t = ((1.0 / ((sr - 1.0) * tol * 0.5)).powf(1.0 / (sr - 1.0))).ceil() as u64;
    let primes = small_primes(dim.max(2) as u64);
    assert!(primes.len() <= 64, "prime bitmask limited to dim <= 313");
    let index_masks: Vec<u64> = (0..dim as u64)
        .map(|m| if m == 0 { u64::MAX } else { prime_mask(m, &primes) })
        .collect();
    let mut t_series = vec![Complex64::new(0.0, 0.0); dim];
    for n in 1..=n_t {
        let w = Complex64::new(n as f64, 0.0).powc(-s);
        let mask = prime_mask(n, &primes);
        for m in 1..dim {
            if mask & index_masks[m] == 0 {
                t_series[m] += w;
            }
        }
    }
    let zeta_s = zeta(s)?;
    let mut dev_t = 0.0f64;
    for (m, lhs) in t_series.iter().enumerate() {
        let rhs = if m == 0 {
            Complex64::new(0.0, 0.0)
        } else {
            let mut acc = Complex64::new(0.0, 0.0);
            for d in arith::divisors(m as u64)? {
                let mu = arith::mobius(d)? as f64;
                if mu != 0.0 {
                    acc += Complex64::new(d as f64, 0.0).powc(-s) * mu;
                }
            }
            zeta_s * acc
        };
        dev_t = dev_t.max((lhs - rhs).norm());
    }

    // Berezin symbols of both accumulated diagonals agree as well.
    let c_op = FockOperator::diagonal(c_series);
    let rhs_c = n_op.scale(1.0 / zeta_s1);
    let b_dev_c = (berezin(&c_op, point)?.value - berezin(&rhs_c, point)?.value).norm();

    Ok(vec![
        IdentityCheck::new("zeta_series_c", dev_c, tol)
            .with_note(&format!("cutoff {n_c}, vacuum-subtracted C_0")),
        IdentityCheck::new("zeta_series_t", dev_t, tol).with_note(&format!(
            "cutoff {n_t}, weight mu(n) n^-s on the number-operator side"
        )),
        IdentityCheck::new("zeta_series_c_berezin", b_dev_c, tol),
    ])
}
