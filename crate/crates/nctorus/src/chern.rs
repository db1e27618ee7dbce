//! Generalized trace and the even/odd Chern characters.
//!
//! Chains over the matrix algebra `M_N(A)` are routed through the generalized
//! trace `T` down to chains over `A`; `b` and `B` are only ever applied on the
//! scalar side.

use num_complex::Complex64 as C64;

use crate::chain::{Chain, Parity, PeriodicChain};
use crate::error::{Error, Result};
use crate::matrix::{mat_mul, MatrixElement};
use crate::torus::DeformationPoint;

/// Generalized trace `T`: expands each matrix factor into matrix-unit atoms,
/// traces the matrix-unit word, and emits the chain of torus factors.
///
/// `tr(E_{i_0 j_0} ... E_{i_m j_m})` is `1` exactly on closed index paths
/// (`j_r = i_{r+1}` cyclically), so `T` sums the entry products
/// `M^0_{i_0 i_1} (x) M^1_{i_1 i_2} (x) ... (x) M^m_{i_m i_0}`.
pub fn generalized_trace(factors: &[MatrixElement]) -> Result<Chain> {
    let first = factors
        .first()
        .ok_or_else(|| Error::Format("generalized trace needs at least one factor".into()))?;
    let size = first.size();
    let n = first.dim();
    for f in factors {
        if f.size() != size {
            return Err(Error::SizeMismatch {
                expected: size,
                got: f.size(),
            });
        }
        if f.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: f.dim(),
            });
        }
    }
    let degree = factors.len() - 1;
    let mut out = Chain::zero(n, degree);
    // enumerate closed paths i_0 -> i_1 -> ... -> i_m -> i_0
    let mut path = vec![0usize; factors.len()];
    loop {
        let elements: Vec<_> = (0..factors.len())
            .map(|r| {
                let from = path[r];
                let to = path[(r + 1) % factors.len()];
                factors[r].get(from, to).clone()
            })
            .collect();
        if elements.iter().all(|e| !e.is_zero()) {
            let expanded = crate::chain::embed(&elements)?;
            out = out.add(&expanded);
        }
        // odometer over {0..size}^(m+1)
        let mut pos = 0;
        loop {
            if pos == path.len() {
                return Ok(out);
            }
            path[pos] += 1;
            if path[pos] < size {
                break;
            }
            path[pos] = 0;
            pos += 1;
        }
    }
}

/// `(2n)! / n!` as a float; exact for the desk-scale caps used here.
fn even_coefficient(n: usize) -> f64 {
    let mut v = 1.0;
    for k in (n + 1)..=(2 * n) {
        v *= k as f64;
    }
    v
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Even Chern character of an idempotent, truncated at `cap`.
///
/// Component `0` is `T(P)`; component `2n` is
/// `(-1)^n (2n)!/n! T(P^{(x)(2n+1)} - 1/2 (x) P^{(x)2n})`.
/// The idempotent defect `|P^2 - P|` must not exceed `tol`.
pub fn ch_idempotent(
    p_mat: &MatrixElement,
    cap: usize,
    point: &DeformationPoint,
    tol: f64,
) -> Result<PeriodicChain> {
    let defect = mat_mul(p_mat, p_mat, point)?.sub(p_mat).norm_inf();
    if defect > tol {
        return Err(Error::IdempotentDefect { defect, tol });
    }
    let mut out = PeriodicChain::new(p_mat.dim(), Parity::Even, cap);
    out.set_component(generalized_trace(std::slice::from_ref(p_mat))?)?;
    let identity = MatrixElement::identity(p_mat.dim(), p_mat.size());
    let mut n = 1;
    while 2 * n <= cap {
        let copies = vec![p_mat.clone(); 2 * n + 1];
        let main = generalized_trace(&copies)?;
        let mut with_unit = vec![identity.clone()];
        with_unit.extend(std::iter::repeat_n(p_mat.clone(), 2 * n));
        let correction = generalized_trace(&with_unit)?;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let coeff = C64::new(sign * even_coefficient(n), 0.0);
        let component = main
            .sub(&correction.scale(C64::new(0.5, 0.0)))
            .scale(coeff);
        out.set_component(component)?;
        n += 1;
    }
    Ok(out)
}

/// Odd Chern character of an invertible with a supplied exact inverse,
/// truncated at `cap`.
///
/// Component `2n+1` is `(-1)^n n! T(U^{-1} (x) U (x) ... (x) U^{-1} (x) U)`.
/// The inverse is verified by multiplication on both sides.
pub fn ch_invertible(
    u: &MatrixElement,
    u_inv: &MatrixElement,
    cap: usize,
    point: &DeformationPoint,
) -> Result<PeriodicChain> {
    let id = MatrixElement::identity(u.dim(), u.size());
    let scale = 1.0 + u.norm_inf().max(u_inv.norm_inf());
    let left = mat_mul(u_inv, u, point)?.sub(&id).norm_inf();
    let right = mat_mul(u, u_inv, point)?.sub(&id).norm_inf();
    let defect = left.max(right);
    if defect > 1e-10 * scale {
        return Err(Error::InverseDefect { defect });
    }
    let mut out = PeriodicChain::new(u.dim(), Parity::Odd, cap);
    let mut n = 0;
    while 2 * n < cap {
        let mut factors = Vec::with_capacity(2 * n + 2);
        for _ in 0..=n {
            factors.push(u_inv.clone());
            factors.push(u.clone());
        }
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let coeff = C64::new(sign * factorial(n), 0.0);
        out.set_component(generalized_trace(&factors)?.scale(coeff))?;
        n += 1;
    }
    Ok(out)
}
