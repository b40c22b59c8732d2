//! Operators on the truncated number basis `{|0>, ..., |D-1>}`:
//! congruence projectors, rotated operators, phase shifts, Ramanujan-type
//! operators and generalized number operators.
//!
//! Truncation dimension is a property of each operator; mixing dimensions
//! is an error, never an implicit resize. Shift truncation artifacts
//! (last row/column) are part of the contract and asserted explicitly in
//! tests rather than hidden.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, RwLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith::{self, ArithmeticFn, CongruenceSystem};
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Which index set a congruence projector covers.
///
/// `Normalized` projects onto the full residue class `m = j (mod n)`;
/// `Literal` onto the arithmetic progression `{j, j+n, j+2n, ...}`, which
/// starts at `j` even when `j >= n`. The two coincide for `0 <= j < n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProjectorMode {
    Normalized,
    Literal,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Repr {
    Diagonal(Vec<Complex64>),
    /// |m> -> |m+1>, top state dropped.
    UpShift,
    /// |m+1> -> |m>, |0> -> 0.
    DownShift,
    GeneralSparse(Vec<(usize, usize, Complex64)>),
}

/// A complex operator on the D-dimensional truncated Fock space.
#[derive(Clone, Debug, PartialEq)]
pub struct FockOperator {
    dim: usize,
    repr: Repr,
}

impl FockOperator {
    pub fn new(dim: usize, repr: Repr) -> Result<Self> {
        if dim < 1 {
            return Err(Error::NonPositive);
        }
        if let Repr::Diagonal(d) = &repr {
            if d.len() != dim {
                return Err(Error::DimMismatch {
                    left: dim,
                    right: d.len(),
                });
            }
        }
        if let Repr::GeneralSparse(entries) = &repr {
            for &(r, c, _) in entries {
                if r >= dim || c >= dim {
                    return Err(Error::DimMismatch { left: dim, right: r.max(c) + 1 });
                }
            }
        }
        Ok(FockOperator { dim, repr })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn repr(&self) -> &Repr {
        &self.repr
    }

    pub fn identity(dim: usize) -> Self {
        FockOperator {
            dim,
            repr: Repr::Diagonal(vec![ONE; dim]),
        }
    }

    pub fn zero(dim: usize) -> Self {
        FockOperator {
            dim,
            repr: Repr::Diagonal(vec![ZERO; dim]),
        }
    }

    pub fn diagonal(entries: Vec<Complex64>) -> Self {
        FockOperator {
            dim: entries.len(),
            repr: Repr::Diagonal(entries),
        }
    }

    /// The rank-one operator |i><j|.
    pub fn ket_bra(i: usize, j: usize, dim: usize) -> Result<Self> {
        FockOperator::new(dim, Repr::GeneralSparse(vec![(i, j, ONE)]))
    }

    fn triplets(&self) -> Vec<(usize, usize, Complex64)> {
        match &self.repr {
            Repr::Diagonal(d) => d
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != ZERO)
                .map(|(i, v)| (i, i, *v))
                .collect(),
            Repr::UpShift => (0..self.dim.saturating_sub(1))
                .map(|m| (m + 1, m, ONE))
                .collect(),
            Repr::DownShift => (0..self.dim.saturating_sub(1))
                .map(|m| (m, m + 1, ONE))
                .collect(),
            Repr::GeneralSparse(e) => e.clone(),
        }
    }

    /// Diagonal entries, if this operator is stored in diagonal form.
    pub fn diagonal_entries(&self) -> Option<&[Complex64]> {
        match &self.repr {
            Repr::Diagonal(d) => Some(d),
            _ => None,
        }
    }

    /// Entry at (row, col), whatever the representation.
    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        match &self.repr {
            Repr::Diagonal(d) => {
                if row == col {
                    d[row]
                } else {
                    ZERO
                }
            }
            Repr::UpShift => {
                if row == col + 1 {
                    ONE
                } else {
                    ZERO
                }
            }
            Repr::DownShift => {
                if col == row + 1 {
                    ONE
                } else {
                    ZERO
                }
            }
            Repr::GeneralSparse(e) => e
                .iter()
                .filter(|&&(r, c, _)| r == row && c == col)
                .map(|&(_, _, v)| v)
                .sum(),
        }
    }

    pub fn mul(&self, other: &FockOperator) -> Result<FockOperator> {
        if self.dim != other.dim {
            return Err(Error::DimMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        // diagonal times diagonal stays diagonal (pointwise product)
        if let (Repr::Diagonal(a), Repr::Diagonal(b)) = (&self.repr, &other.repr) {
            let prod = a.iter().zip(b).map(|(x, y)| x * y).collect();
            return Ok(FockOperator::diagonal(prod));
        }
        let mut by_row: HashMap<usize, Vec<(usize, Complex64)>> = HashMap::new();
        for (r, c, v) in other.triplets() {
            by_row.entry(r).or_default().push((c, v));
        }
        let mut acc: HashMap<(usize, usize), Complex64> = HashMap::new();
        for (i, k, a) in self.triplets() {
            if let Some(row) = by_row.get(&k) {
                for &(j, b) in row {
                    *acc.entry((i, j)).or_insert(ZERO) += a * b;
                }
            }
        }
        let mut entries: Vec<(usize, usize, Complex64)> = acc
            .into_iter()
            .filter(|(_, v)| *v != ZERO)
            .map(|((r, c), v)| (r, c, v))
            .collect();
        entries.sort_unstable_by_key(|&(r, c, _)| (r, c));
        FockOperator::new(self.dim, Repr::GeneralSparse(entries))
    }

    pub fn add(&self, other: &FockOperator) -> Result<FockOperator> {
        if self.dim != other.dim {
            return Err(Error::DimMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        if let (Repr::Diagonal(a), Repr::Diagonal(b)) = (&self.repr, &other.repr) {
            let sum = a.iter().zip(b).map(|(x, y)| x + y).collect();
            return Ok(FockOperator::diagonal(sum));
        }
        let mut acc: HashMap<(usize, usize), Complex64> = HashMap::new();
        for (r, c, v) in self.triplets().into_iter().chain(other.triplets()) {
            *acc.entry((r, c)).or_insert(ZERO) += v;
        }
        let mut entries: Vec<(usize, usize, Complex64)> = acc
            .into_iter()
            .filter(|(_, v)| *v != ZERO)
            .map(|((r, c), v)| (r, c, v))
            .collect();
        entries.sort_unstable_by_key(|&(r, c, _)| (r, c));
        FockOperator::new(self.dim, Repr::GeneralSparse(entries))
    }

    pub fn sub(&self, other: &FockOperator) -> Result<FockOperator> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, factor: Complex64) -> FockOperator {
        let repr = match &self.repr {
            Repr::Diagonal(d) => Repr::Diagonal(d.iter().map(|v| v * factor).collect()),
            _ => Repr::GeneralSparse(
                self.triplets()
                    .into_iter()
                    .map(|(r, c, v)| (r, c, v * factor))
                    .collect(),
            ),
        };
        FockOperator {
            dim: self.dim,
            repr,
        }
    }

    pub fn adjoint(&self) -> FockOperator {
        let repr = match &self.repr {
            Repr::Diagonal(d) => Repr::Diagonal(d.iter().map(|v| v.conj()).collect()),
            Repr::UpShift => Repr::DownShift,
            Repr::DownShift => Repr::UpShift,
            Repr::GeneralSparse(e) => {
                let mut t: Vec<_> = e.iter().map(|&(r, c, v)| (c, r, v.conj())).collect();
                t.sort_unstable_by_key(|&(r, c, _)| (r, c));
                Repr::GeneralSparse(t)
            }
        };
        FockOperator {
            dim: self.dim,
            repr,
        }
    }

    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.dim {
            return Err(Error::DimMismatch {
                left: self.dim,
                right: v.len(),
            });
        }
        let mut out = vec![ZERO; self.dim];
        for (r, c, a) in self.triplets() {
            out[r] += a * v[c];
        }
        Ok(out)
    }

    /// Largest entry magnitude.
    pub fn max_abs_entry(&self) -> f64 {
        self.triplets()
            .iter()
            .map(|&(_, _, v)| v.norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise |self - other|; errors on dimension mismatch.
    pub fn max_deviation(&self, other: &FockOperator) -> Result<f64> {
        let diff = self.sub(other)?;
        Ok(diff.max_abs_entry())
    }

    pub fn approx_eq(&self, other: &FockOperator, tol: f64) -> bool {
        matches!(self.max_deviation(other), Ok(d) if d <= tol)
    }
}

/// Congruence projector Pi_j(n) on the truncation.
pub fn projector(j: u64, n: u64, dim: usize, mode: ProjectorMode) -> Result<FockOperator> {
    if n < 1 || dim < 1 {
        return Err(Error::NonPositive);
    }
    let mut d = vec![ZERO; dim];
    for (m, slot) in d.iter_mut().enumerate() {
        let m = m as u64;
        let hit = match mode {
            ProjectorMode::Normalized => m % n == j % n,
            ProjectorMode::Literal => m >= j && (m - j) % n == 0,
        };
        if hit {
            *slot = ONE;
        }
    }
    Ok(FockOperator::diagonal(d))
}

/// Vacuum-subtracted projector: literal Pi_j(k) minus |j><j|, i.e. ones
/// at {j+k, j+2k, ...}.
pub fn projector_bar(j: u64, k: u64, dim: usize) -> Result<FockOperator> {
    if k < 1 || dim < 1 {
        return Err(Error::NonPositive);
    }
    let mut d = vec![ZERO; dim];
    for (m, slot) in d.iter_mut().enumerate() {
        let m = m as u64;
        if m > j && (m - j) % k == 0 {
            *slot = ONE;
        }
    }
    Ok(FockOperator::diagonal(d))
}

/// n-th root of unity e^{2 pi i k / n}.
pub fn root_of_unity(n: u64, k: i64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64)
}

/// Rotated operator S_n: diagonal entry eps_n^{m mod n} at index m.
pub fn rotated(n: u64, dim: usize) -> Result<FockOperator> {
    if n < 1 || dim < 1 {
        return Err(Error::NonPositive);
    }
    let d = (0..dim)
        .map(|m| root_of_unity(n, (m as u64 % n) as i64))
        .collect();
    Ok(FockOperator::diagonal(d))
}

/// Inversion Pi_j(n) = (1/n) sum_k eps_n^{-kj} S_n^k, evaluated as the
/// explicit sum. Agrees with `projector(j, n, dim, Normalized)` within
/// 1e-12 entrywise.
pub fn projector_from_rotated(j: u64, n: u64, dim: usize) -> Result<FockOperator> {
    if n < 1 || dim < 1 {
        return Err(Error::NonPositive);
    }
    if j >= n {
        return Err(Error::ResidueOutOfRange { j, n });
    }
    let d = (0..dim)
        .map(|m| {
            let mut acc = ZERO;
            for k in 0..n {
                // eps^{-kj} * (S_n^k entry at m) = eps^{k (m - j)}
                acc += root_of_unity(n, k as i64 * (m as u64 % n) as i64 - (k * j) as i64);
            }
            acc / n as f64
        })
        .collect();
    Ok(FockOperator::diagonal(d))
}

/// Outcome of the projector product law Pi_k(n) Pi_l(m).
#[derive(Clone, Debug)]
pub struct Theorem1Report {
    pub product: FockOperator,
    pub predicted: FockOperator,
    /// `Some((j, lcm))` when the congruence system is solvable.
    pub crt: Option<(u64, u64)>,
    pub matches: bool,
}

/// Multiply two normalized projectors and compare against the CRT
/// prediction: zero when gcd(n,m) does not divide l-k, otherwise
/// Pi_j(lcm(n,m)) with j the unique solution of the congruence system.
pub fn theorem1_product(
    k: u64,
    n: u64,
    l: u64,
    m: u64,
    dim: usize,
) -> Result<Theorem1Report> {
    if k >= n {
        return Err(Error::ResidueOutOfRange { j: k, n });
    }
    if l >= m {
        return Err(Error::ResidueOutOfRange { j: l, n: m });
    }
    let product = projector(k, n, dim, ProjectorMode::Normalized)?
        .mul(&projector(l, m, dim, ProjectorMode::Normalized)?)?;
    let sys = CongruenceSystem::new(vec![(k, n), (l, m)])?;
    let crt = arith::crt_solve(&sys)?;
    let predicted = match crt {
        Some((j, lcm)) => projector(j, lcm, dim, ProjectorMode::Normalized)?,
        None => FockOperator::zero(dim),
    };
    let matches = product.max_deviation(&predicted)? == 0.0;
    Ok(Theorem1Report {
        product,
        predicted,
        crt,
        matches,
    })
}

/// Outcome of an operator equality check.
#[derive(Clone, Debug)]
pub struct EqualityReport {
    pub lhs: FockOperator,
    pub rhs: FockOperator,
    pub max_deviation: f64,
    pub exact: bool,
}

/// Split a residue class into r subclasses:
/// Pi_j(n) = sum over a full period of Pi_{j+kn mod nr}(nr).
pub fn progression_split(j: u64, n: u64, r: u64, dim: usize) -> Result<EqualityReport> {
    if j >= n {
        return Err(Error::ResidueOutOfRange { j, n });
    }
    if r < 1 {
        return Err(Error::NonPositive);
    }
    let lhs = projector(j, n, dim, ProjectorMode::Normalized)?;
    let mut rhs = FockOperator::zero(dim);
    for k in 0..r {
        let off = (j + k * n) % (n * r);
        rhs = rhs.add(&projector(off, n * r, dim, ProjectorMode::Normalized)?)?;
    }
    let max_deviation = lhs.max_deviation(&rhs)?;
    Ok(EqualityReport {
        lhs,
        rhs,
        max_deviation,
        exact: max_deviation == 0.0,
    })
}

/// E_+: |m> -> |m+1>, top row dropped by the truncation.
pub fn phase_up(dim: usize) -> FockOperator {
    FockOperator {
        dim,
        repr: Repr::UpShift,
    }
}

/// E_- = adjoint of E_+.
pub fn phase_down(dim: usize) -> FockOperator {
    FockOperator {
        dim,
        repr: Repr::DownShift,
    }
}

/// Ramanujan-type operator C_j(n) = sum over 1 <= k <= n coprime to n of
/// eps_n^{-kj} S_n^k. Diagonal entry at m is the classical Ramanujan sum
/// c_n(m - j).
pub fn ramanujan_c(j: u64, n: u64, dim: usize) -> Result<FockOperator> {
    if n < 1 || dim < 1 {
        return Err(Error::NonPositive);
    }
    let mut d = vec![ZERO; dim];
    for k in 1..=n {
        if arith::gcd(k, n) != 1 {
            continue;
        }
        for (m, slot) in d.iter_mut().enumerate() {
            let m = m as u64 % n;
            *slot += root_of_unity(n, (k * m) as i64 - (k * j % n) as i64);
        }
    }
    Ok(FockOperator::diagonal(d))
}

/// Ramanujan-type operator T_j(n) = sum over 1 <= k <= n coprime to n of
/// eps_n^{kj} Pi_{j+k}(n), with literal projectors.
pub fn ramanujan_t(j: u64, n: u64, dim: usize) -> Result<FockOperator> {
    if n < 1 || dim < 1 {
        return Err(Error::NonPositive);
    }
    let mut acc = FockOperator::zero(dim);
    for k in 1..=n {
        if arith::gcd(k, n) != 1 {
            continue;
        }
        let term = projector(j + k, n, dim, ProjectorMode::Literal)?
            .scale(root_of_unity(n, (k * j) as i64));
        acc = acc.add(&term)?;
    }
    Ok(acc)
}

/// Truncated operator N_{alpha,j}: diagonal with entry 0 at m <= j and
/// (nu_0 * alpha)(m - j) at m > j.
pub fn number_op(alpha: &ArithmeticFn, j: u64, dim: usize) -> Result<FockOperator> {
    let d = (0..dim)
        .map(|m| {
            let m = m as u64;
            if m <= j {
                Ok(ZERO)
            } else {
                let q = m - j;
                let mut acc = ZERO;
                for k in arith::divisors(q)? {
                    acc += alpha.eval(k);
                }
                Ok(acc)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FockOperator::diagonal(d))
}

/// A lazily evaluated, memoized map n -> operator at fixed truncation:
/// an extended arithmetic function on the truncated Fock space.
#[derive(Clone)]
pub struct OperatorSeq {
    dim: usize,
    gen: Arc<dyn Fn(u64) -> FockOperator + Send + Sync>,
    memo: Arc<RwLock<HashMap<u64, FockOperator>>>,
}

impl OperatorSeq {
    pub fn new<F>(dim: usize, f: F) -> Self
    where
        F: Fn(u64) -> FockOperator + Send + Sync + 'static,
    {
        OperatorSeq {
            dim,
            gen: Arc::new(f),
            memo: Arc::new(RwLock::new(HashMap::new())),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, n: u64) -> FockOperator {
        assert!(n >= 1);
        if let Some(op) = self.memo.read().unwrap().get(&n) {
            return op.clone();
        }
        let op = (self.gen)(n);
        assert_eq!(
            op.dim(),
            self.dim,
            "operator sequence generated a wrong-dimension operator at n = {n}"
        );
        self.memo.write().unwrap().insert(n, op.clone());
        op
    }

    /// n -> Pi_j(n) at fixed j.
    pub fn projectors(j: u64, dim: usize, mode: ProjectorMode) -> Self {
        OperatorSeq::new(dim, move |n| projector(j, n, dim, mode).unwrap())
    }

    /// n -> vacuum-subtracted Pi-bar_j(n) at fixed j.
    pub fn projectors_bar(j: u64, dim: usize) -> Self {
        OperatorSeq::new(dim, move |n| projector_bar(j, n, dim).unwrap())
    }

    /// n -> alpha(n) I, the scalar function embedded as operators.
    pub fn scalar(alpha: &ArithmeticFn, dim: usize) -> Self {
        let alpha = alpha.clone();
        OperatorSeq::new(dim, move |n| {
            FockOperator::identity(dim).scale(alpha.eval(n))
        })
    }
}

// --- serialization -------------------------------------------------------

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct SparseEntry {
    pub row: usize,
    pub col: usize,
    pub value: [f64; 2],
}

/// Self-describing operator record with a stable JSON encoding; complex
/// numbers are `[re, im]` pairs.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReprRecord {
    Diagonal { entries: Vec<[f64; 2]> },
    UpShift,
    DownShift,
    GeneralSparse { entries: Vec<SparseEntry> },
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct OperatorRecord {
    pub dim: usize,
    #[serde(flatten)]
    pub repr: ReprRecord,
}

impl FockOperator {
    pub fn to_record(&self) -> OperatorRecord {
        let repr = match &self.repr {
            Repr::Diagonal(d) => ReprRecord::Diagonal {
                entries: d.iter().map(|v| [v.re, v.im]).collect(),
            },
            Repr::UpShift => ReprRecord::UpShift,
            Repr::DownShift => ReprRecord::DownShift,
            Repr::GeneralSparse(e) => ReprRecord::GeneralSparse {
                entries: e
                    .iter()
                    .map(|&(row, col, v)| SparseEntry {
                        row,
                        col,
                        value: [v.re, v.im],
                    })
                    .collect(),
            },
        };
        OperatorRecord {
            dim: self.dim,
            repr,
        }
    }

    pub fn from_record(record: &OperatorRecord) -> Result<Self> {
        let repr = match &record.repr {
            ReprRecord::Diagonal { entries } => Repr::Diagonal(
                entries
                    .iter()
                    .map(|&[re, im]| Complex64::new(re, im))
                    .collect(),
            ),
            ReprRecord::UpShift => Repr::UpShift,
            ReprRecord::DownShift => Repr::DownShift,
            ReprRecord::GeneralSparse { entries } => Repr::GeneralSparse(
                entries
                    .iter()
                    .map(|e| (e.row, e.col, Complex64::new(e.value[0], e.value[1])))
                    .collect(),
            ),
        };
        FockOperator::new(record.dim, repr)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_re(vals: &[f64]) -> FockOperator {
        FockOperator::diagonal(vals.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    #[test]
    fn projector_examples() {
        let id = projector(0, 1, 6, ProjectorMode::Normalized).unwrap();
        assert_eq!(id, FockOperator::identity(6));
        let p = projector(2, 3, 8, ProjectorMode::Normalized).unwrap();
        assert_eq!(p, diag_re(&[0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0]));
        // normalized vs literal differ when j >= n
        let norm = projector(5, 3, 8, ProjectorMode::Normalized).unwrap();
        let lit = projector(5, 3, 8, ProjectorMode::Literal).unwrap();
        assert_eq!(norm, diag_re(&[0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0]));
        assert_eq!(lit, diag_re(&[0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0]));
        assert!(projector(0, 0, 8, ProjectorMode::Literal).is_err());
    }

    #[test]
    fn projector_bar_examples() {
        assert_eq!(
            projector_bar(0, 2, 6).unwrap(),
            diag_re(&[0.0, 0.0, 1.0, 0.0, 1.0, 0.0])
        );
        assert_eq!(projector_bar(10, 3, 6).unwrap(), FockOperator::zero(6));
        assert_eq!(
            projector_bar(1, 3, 9).unwrap(),
            diag_re(&[0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0])
        );
    }

    #[test]
    fn rotated_examples() {
        assert!(rotated(1, 5).unwrap().approx_eq(&FockOperator::identity(5), 0.0));
        let s2 = rotated(2, 4).unwrap();
        assert!(s2.approx_eq(&diag_re(&[1.0, -1.0, 1.0, -1.0]), 1e-15));
        for n in 1..=64u64 {
            let s = rotated(n, 80).unwrap();
            let mut p = FockOperator::identity(80);
            for _ in 0..n {
                p = p.mul(&s).unwrap();
            }
            assert!(p.approx_eq(&FockOperator::identity(80), 1e-12), "S^n at {n}");
            let unitary = s.mul(&s.adjoint()).unwrap();
            assert!(unitary.approx_eq(&FockOperator::identity(80), 1e-12));
        }
    }

    #[test]
    fn projector_inversion_from_rotated() {
        assert!(projector_from_rotated(0, 1, 6)
            .unwrap()
            .approx_eq(&FockOperator::identity(6), 1e-12));
        assert!(projector_from_rotated(1, 2, 4)
            .unwrap()
            .approx_eq(&diag_re(&[0.0, 1.0, 0.0, 1.0]), 1e-12));
        for n in 1..=24u64 {
            for j in 0..n {
                let inv = projector_from_rotated(j, n, 100).unwrap();
                let direct = projector(j, n, 100, ProjectorMode::Normalized).unwrap();
                assert!(inv.approx_eq(&direct, 1e-12), "inversion n={n} j={j}");
            }
        }
        assert!(projector_from_rotated(3, 3, 6).is_err());
    }

    #[test]
    fn spectral_completeness() {
        for dim in [1usize, 7, 64, 512] {
            for n in 1..=64u64 {
                let mut sum = FockOperator::zero(dim);
                for j in 0..n {
                    sum = sum
                        .add(&projector(j, n, dim, ProjectorMode::Normalized).unwrap())
                        .unwrap();
                }
                assert_eq!(
                    sum.max_deviation(&FockOperator::identity(dim)).unwrap(),
                    0.0,
                    "completeness n={n} dim={dim}"
                );
            }
        }
    }

    #[test]
    fn idempotence_and_orthogonality() {
        let dim = 96;
        for n in 1..=32u64 {
            for i in 0..n {
                for j in 0..n {
                    let pi = projector(i, n, dim, ProjectorMode::Normalized).unwrap();
                    let pj = projector(j, n, dim, ProjectorMode::Normalized).unwrap();
                    let prod = pi.mul(&pj).unwrap();
                    let expected = if i == j { pj } else { FockOperator::zero(dim) };
                    assert_eq!(prod.max_deviation(&expected).unwrap(), 0.0);
                }
            }
        }
    }

    #[test]
    fn theorem1_examples() {
        let r = theorem1_product(1, 2, 2, 3, 12).unwrap();
        assert!(r.matches);
        assert_eq!(r.crt, Some((5, 6)));
        let r = theorem1_product(0, 2, 1, 2, 8).unwrap();
        assert!(r.matches);
        assert_eq!(r.crt, None);
        assert_eq!(r.product, FockOperator::zero(8));
        let r = theorem1_product(1, 4, 1, 4, 16).unwrap();
        assert!(r.matches);
        assert_eq!(
            r.product,
            projector(1, 4, 16, ProjectorMode::Normalized).unwrap()
        );
        assert!(theorem1_product(2, 2, 0, 3, 8).is_err());
    }

    #[test]
    fn prime_factorization_splitting() {
        // Pi_j(n) = product over prime powers p^a || n of Pi_{j mod p^a}(p^a)
        for n in 2..=360u64 {
            let dim = (2 * n) as usize;
            for j in [0u64, 1, 5] {
                let j = j % n;
                let direct = projector(j, n, dim, ProjectorMode::Normalized).unwrap();
                let mut prod = FockOperator::identity(dim);
                for (p, a) in arith::factorize(n).unwrap() {
                    let q = p.pow(a);
                    prod = prod
                        .mul(&projector(j % q, q, dim, ProjectorMode::Normalized).unwrap())
                        .unwrap();
                }
                assert_eq!(prod.max_deviation(&direct).unwrap(), 0.0, "split n={n} j={j}");
            }
        }
    }

    #[test]
    fn progression_split_examples() {
        assert!(progression_split(0, 2, 2, 8).unwrap().exact);
        assert!(progression_split(1, 2, 3, 12).unwrap().exact);
        assert!(progression_split(1, 3, 1, 9).unwrap().exact);
        for n in 1..=12u64 {
            for j in 0..n {
                for r in 1..=6u64 {
                    let rep = progression_split(j, n, r, (4 * n * r) as usize).unwrap();
                    assert!(rep.exact, "split j={j} n={n} r={r}");
                }
            }
        }
    }

    #[test]
    fn phase_operator_truncation_contract() {
        let d = 5;
        let up = phase_up(d);
        let down = phase_down(d);
        assert_eq!(up.adjoint(), down);
        // E_- E_+ = 1 except at the cutoff index
        let mut almost_id = FockOperator::identity(d);
        almost_id = almost_id
            .sub(&FockOperator::ket_bra(d - 1, d - 1, d).unwrap())
            .unwrap();
        assert_eq!(down.mul(&up).unwrap().max_deviation(&almost_id).unwrap(), 0.0);
        // E_+ E_- = 1 - |0><0| exactly
        let id_minus_vac = FockOperator::identity(d)
            .sub(&FockOperator::ket_bra(0, 0, d).unwrap())
            .unwrap();
        assert_eq!(
            up.mul(&down).unwrap().max_deviation(&id_minus_vac).unwrap(),
            0.0
        );
        // E_+ |2> = |3>
        let mut basis2 = vec![ZERO; d];
        basis2[2] = ONE;
        let shifted = up.apply(&basis2).unwrap();
        let mut basis3 = vec![ZERO; d];
        basis3[3] = ONE;
        assert_eq!(shifted, basis3);
    }

    // independent exponential-sum oracle for Ramanujan sums
    fn ramanujan_sum_oracle(n: u64, m: i64) -> Complex64 {
        let mut acc = ZERO;
        for k in 1..=n {
            if arith::gcd(k, n) == 1 {
                acc += root_of_unity(n, k as i64 * m);
            }
        }
        acc
    }

    #[test]
    fn ramanujan_c_matches_exponential_sums() {
        assert!(ramanujan_c(0, 1, 6)
            .unwrap()
            .approx_eq(&FockOperator::identity(6), 1e-12));
        let c4 = ramanujan_c(0, 4, 8).unwrap();
        assert!((c4.entry(0, 0) - Complex64::new(2.0, 0.0)).norm() < 1e-12);
        let c6 = ramanujan_c(0, 6, 8).unwrap();
        assert!((c6.entry(1, 1) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        for n in 1..=12u64 {
            for j in 0..=3u64 {
                let op = ramanujan_c(j, n, 40).unwrap();
                for m in 0..40usize {
                    let oracle = ramanujan_sum_oracle(n, m as i64 - j as i64);
                    assert!(
                        (op.entry(m, m) - oracle).norm() < 1e-10,
                        "c_{n}({m}-{j})"
                    );
                }
            }
        }
    }

    #[test]
    fn ramanujan_t_examples() {
        let t = ramanujan_t(0, 2, 6).unwrap();
        assert!(t.approx_eq(&diag_re(&[0.0, 1.0, 0.0, 1.0, 0.0, 1.0]), 1e-12));
        // n = 1: single term k = 1 gives the literal Pi_1(1), which is
        // zero at the vacuum -- the offset that excludes n = 1 from the
        // T_j = nu0 * mu Pi_j identity.
        let t1 = ramanujan_t(0, 1, 4).unwrap();
        assert!(t1.approx_eq(&diag_re(&[0.0, 1.0, 1.0, 1.0]), 1e-12));
        let t12 = ramanujan_t(1, 2, 6).unwrap();
        assert!(t12.approx_eq(&diag_re(&[0.0, 0.0, -1.0, 0.0, -1.0, 0.0]), 1e-12));
    }

    #[test]
    fn number_op_examples() {
        let phi = ArithmeticFn::euler_phi();
        let n_op = number_op(&phi, 0, 64).unwrap();
        let expected = diag_re(&(0..64).map(|m| m as f64).collect::<Vec<_>>());
        assert_eq!(n_op.max_deviation(&expected).unwrap(), 0.0);

        let alpha = ArithmeticFn::inv_power(Complex64::new(1.0, 0.0));
        let z = number_op(&alpha, 0, 8).unwrap();
        assert!((z.entry(6, 6) - Complex64::new(2.0, 0.0)).norm() < 1e-12);

        let zero = number_op(&phi, 99, 8).unwrap();
        assert_eq!(zero, FockOperator::zero(8));
    }

    #[test]
    fn number_op_equals_projector_bar_series() {
        let dim = 96;
        let fns = [
            ArithmeticFn::euler_phi(),
            ArithmeticFn::mobius(),
            ArithmeticFn::nu1(),
        ];
        for alpha in &fns {
            for j in [0u64, 1, 3] {
                let closed = number_op(alpha, j, dim).unwrap();
                let mut series = FockOperator::zero(dim);
                for k in 1..=dim as u64 {
                    series = series
                        .add(&projector_bar(j, k, dim).unwrap().scale(alpha.eval(k)))
                        .unwrap();
                }
                assert_eq!(
                    closed.max_deviation(&series).unwrap(),
                    0.0,
                    "number_op series {} j={j}",
                    alpha.name()
                );
            }
        }
    }

    #[test]
    fn op_plumbing() {
        let a = diag_re(&[1.0, 2.0, 3.0]);
        assert_eq!(FockOperator::identity(3).mul(&a).unwrap(), a);
        assert_eq!(phase_up(4).adjoint(), phase_down(4));
        let p = projector(1, 2, 4, ProjectorMode::Normalized).unwrap();
        let v = vec![ONE; 4];
        let out = p.apply(&v).unwrap();
        assert_eq!(out, vec![ZERO, ONE, ZERO, ONE]);
        assert!(a.mul(&FockOperator::identity(4)).is_err());
    }

    #[test]
    fn serialization_round_trip() {
        let ops = [
            projector(1, 2, 4, ProjectorMode::Normalized).unwrap(),
            rotated(3, 5).unwrap(),
            phase_up(4),
            phase_up(4).mul(&phase_down(4)).unwrap(),
        ];
        for op in &ops {
            let json = serde_json::to_string(&op.to_record()).unwrap();
            let back: OperatorRecord = serde_json::from_str(&json).unwrap();
            let restored = FockOperator::from_record(&back).unwrap();
            assert_eq!(&restored, op);
        }
    }
}
