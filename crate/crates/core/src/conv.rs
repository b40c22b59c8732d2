//! Convolution products lifted to operator sequences, and the
//! multiplicativity machinery for extended arithmetic functions.

use serde::{Deserialize, Serialize};

use crate::arith::{self, ArithmeticFn};
use crate::fock::{FockOperator, OperatorSeq};
use crate::report::IdentityCheck;
use crate::{Error, Result};

/// Which convolution to take: over factorizations kl = n, over ordered
/// pairs with lcm(k, l) = n, or over coprime factorizations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvKind {
    Dirichlet,
    Lcm,
    Unitary,
}

/// Evaluate (A kind B)(n). Operand order is preserved; operator products
/// need not commute.
pub fn op_conv(kind: ConvKind, a: &OperatorSeq, b: &OperatorSeq, n: u64) -> Result<FockOperator> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    if n < 1 {
        return Err(Error::NonPositive);
    }
    let divs = arith::divisors(n)?;
    let mut acc = FockOperator::zero(a.dim());
    match kind {
        ConvKind::Dirichlet => {
            for &k in &divs {
                acc = acc.add(&a.get(k).mul(&b.get(n / k))?)?;
            }
        }
        ConvKind::Lcm => {
            for &k in &divs {
                for &l in &divs {
                    if arith::lcm(k, l) == n {
                        acc = acc.add(&a.get(k).mul(&b.get(l))?)?;
                    }
                }
            }
        }
        ConvKind::Unitary => {
            for &k in &divs {
                if arith::gcd(k, n / k) == 1 {
                    acc = acc.add(&a.get(k).mul(&b.get(n / k))?)?;
                }
            }
        }
    }
    Ok(acc)
}

/// n -> alpha(n) P(n).
pub fn scalar_weighted_seq(alpha: &ArithmeticFn, p: &OperatorSeq) -> OperatorSeq {
    let alpha = alpha.clone();
    let p = p.clone();
    OperatorSeq::new(p.dim(), move |n| p.get(n).scale(alpha.eval(n)))
}

/// Coprime pairs (n, m) with nm <= n_max where Phi(nm) differs from
/// Phi(n) Phi(m) beyond 1e-12, with the max-entry deviation.
pub fn check_extended_multiplicative(phi: &OperatorSeq, n_max: u64) -> Vec<(u64, u64, f64)> {
    let mut violations = Vec::new();
    for n in 1..=n_max {
        for m in n..=n_max / n {
            if arith::gcd(n, m) != 1 {
                continue;
            }
            let lhs = phi.get(n * m);
            let rhs = phi.get(n).mul(&phi.get(m)).unwrap();
            let dev = lhs.max_deviation(&rhs).unwrap();
            if dev > 1e-12 {
                violations.push((n, m, dev));
            }
        }
    }
    violations
}

/// Check the three projector-weighting identities for each n <= n_max:
///
/// * b1: (alpha Pi_j) lcm-conv (beta Pi_j) = (alpha lcm-conv beta) Pi_j
/// * b2: (alpha Pi_j) unitary-conv (beta Pi_j) = (alpha unitary-conv beta) Pi_j
/// * b3: nu0 * ((alpha lcm-conv beta) Pibar_j)
///       = (nu0 * alpha Pibar_j) (nu0 * beta Pibar_j)
///
/// b1/b2 use literal projectors, b3 the vacuum-subtracted ones.
pub fn verify_b_identities(
    alpha: &ArithmeticFn,
    beta: &ArithmeticFn,
    j: u64,
    n_max: u64,
    dim: usize,
) -> Result<Vec<IdentityCheck>> {
    let required = (j + 2 * n_max) as usize;
    if dim < required {
        return Err(Error::DimTooSmall { dim, required });
    }
    let tol = 1e-10;
    let pj = OperatorSeq::projectors(j, dim, crate::fock::ProjectorMode::Literal);
    let pbar = OperatorSeq::projectors_bar(j, dim);
    let a_pj = scalar_weighted_seq(alpha, &pj);
    let b_pj = scalar_weighted_seq(beta, &pj);
    let a_pbar = scalar_weighted_seq(alpha, &pbar);
    let b_pbar = scalar_weighted_seq(beta, &pbar);
    let nu0_id = OperatorSeq::scalar(&ArithmeticFn::nu0(), dim);

    // scalar convolutions reused as weights on the right-hand sides
    let lcm_ab = {
        let (a, b) = (alpha.clone(), beta.clone());
        ArithmeticFn::new("lcm(a,b)", false, move |n| arith::lcm_conv(&a, &b, n).unwrap())
    };
    let uni_ab = {
        let (a, b) = (alpha.clone(), beta.clone());
        ArithmeticFn::new("uni(a,b)", false, move |n| {
            arith::unitary_conv(&a, &b, n).unwrap()
        })
    };
    let lcm_ab_pbar = scalar_weighted_seq(&lcm_ab, &pbar);

    let mut out = Vec::new();
    for n in 1..=n_max {
        let b1_lhs = op_conv(ConvKind::Lcm, &a_pj, &b_pj, n)?;
        let b1_rhs = pj.get(n).scale(lcm_ab.eval(n));
        out.push(
            IdentityCheck::new("b1", b1_lhs.max_deviation(&b1_rhs)?, tol).at_n(n),
        );

        let b2_lhs = op_conv(ConvKind::Unitary, &a_pj, &b_pj, n)?;
        let b2_rhs = pj.get(n).scale(uni_ab.eval(n));
        out.push(
            IdentityCheck::new("b2", b2_lhs.max_deviation(&b2_rhs)?, tol).at_n(n),
        );

        let b3_lhs = op_conv(ConvKind::Dirichlet, &nu0_id, &lcm_ab_pbar, n)?;
        let b3_rhs = op_conv(ConvKind::Dirichlet, &nu0_id, &a_pbar, n)?
            .mul(&op_conv(ConvKind::Dirichlet, &nu0_id, &b_pbar, n)?)?;
        out.push(
            IdentityCheck::new("b3", b3_lhs.max_deviation(&b3_rhs)?, tol).at_n(n),
        );
    }
    Ok(out)
}

/// Check both halves of the generalized-number-operator product law on
/// the truncation:
///
/// * part 1: N_{alpha,j} N_{beta,j} = N_{alpha lcm-conv beta, j}
/// * part 2: N_{mu*alpha,j} N_{mu*beta,j} = N_{mu*(alpha beta), j}
pub fn proposition1_check(
    alpha: &ArithmeticFn,
    beta: &ArithmeticFn,
    j: u64,
    dim: usize,
) -> Result<Vec<IdentityCheck>> {
    let lcm_ab = {
        let (a, b) = (alpha.clone(), beta.clone());
        ArithmeticFn::new("lcm(a,b)", false, move |n| arith::lcm_conv(&a, &b, n).unwrap())
    };
    let n_a = crate::fock::number_op(alpha, j, dim)?;
    let n_b = crate::fock::number_op(beta, j, dim)?;
    let part1_lhs = n_a.mul(&n_b)?;
    let part1_rhs = crate::fock::number_op(&lcm_ab, j, dim)?;
    let dev1 = part1_lhs.max_deviation(&part1_rhs)?;

    let mu = ArithmeticFn::mobius();
    let mu_a = {
        let (mu, a) = (mu.clone(), alpha.clone());
        ArithmeticFn::new("mu*a", false, move |n| {
            arith::dirichlet_conv(&mu, &a, n).unwrap()
        })
    };
    let mu_b = {
        let (mu, b) = (mu.clone(), beta.clone());
        ArithmeticFn::new("mu*b", false, move |n| {
            arith::dirichlet_conv(&mu, &b, n).unwrap()
        })
    };
    let mu_ab = {
        let (mu, a, b) = (mu.clone(), alpha.clone(), beta.clone());
        ArithmeticFn::new("mu*(ab)", false, move |n| {
            let ab = ArithmeticFn::new("ab", false, {
                let (a, b) = (a.clone(), b.clone());
                move |k| a.eval(k) * b.eval(k)
            });
            arith::dirichlet_conv(&mu, &ab, n).unwrap()
        })
    };
    let part2_lhs = crate::fock::number_op(&mu_a, j, dim)?
        .mul(&crate::fock::number_op(&mu_b, j, dim)?)?;
    let part2_rhs = crate::fock::number_op(&mu_ab, j, dim)?;
    let dev2 = part2_lhs.max_deviation(&part2_rhs)?;

    Ok(vec![
        IdentityCheck::new("prop1.1", dev1, 0.0).at_n(j),
        IdentityCheck::new("prop1.2", dev2, 1e-10).at_n(j),
    ])
}
