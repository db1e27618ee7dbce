//! Scalar cochains: evaluator-backed multilinear functionals, the dual
//! differentials, the characteristic map built from a trace and commuting
//! derivations, and the canonical pairing with periodic chains.

use std::sync::Arc;

use itertools::Itertools;
use num_complex::Complex64 as C64;

use crate::chain::{Chain, GradedChain, PeriodicChain};
use crate::cochain::MultiDiff;
use crate::error::{Error, Result};
use crate::matrix::{mat_mul, mat_trace, MatrixElement};
use crate::torus::{mul, trace, DeformationPoint, MultiIndex, TorusElement};

type ScalarEvaluator =
    dyn Fn(&[TorusElement], &DeformationPoint) -> Result<C64> + Send + Sync;

/// Degree-`m` multilinear scalar functional on `(m+1)`-tuples.
///
/// Normalized: vanishes when the unit occupies any slot except the first.
/// `is_cyclic` marks lambda-cyclicity, asserted by constructors and
/// spot-tested rather than enforced structurally.
#[derive(Clone)]
pub struct Functional {
    degree: usize,
    label: String,
    is_cyclic: bool,
    eval: Arc<ScalarEvaluator>,
}

impl std::fmt::Debug for Functional {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Functional({}, degree {})", self.label, self.degree)
    }
}

impl Functional {
    pub fn from_fn<F>(
        degree: usize,
        label: impl Into<String>,
        is_cyclic: bool,
        eval: F,
    ) -> Self
    where
        F: Fn(&[TorusElement], &DeformationPoint) -> Result<C64> + Send + Sync + 'static,
    {
        Functional {
            degree,
            label: label.into(),
            is_cyclic,
            eval: Arc::new(eval),
        }
    }

    /// The canonical trace as a degree-0 cyclic functional.
    pub fn tau() -> Self {
        Functional {
            degree: 0,
            label: "tau".into(),
            is_cyclic: true,
            eval: Arc::new(|args, _p| Ok(trace(&args[0]))),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_cyclic(&self) -> bool {
        self.is_cyclic
    }

    pub fn evaluate(&self, args: &[TorusElement], p: &DeformationPoint) -> Result<C64> {
        debug_assert_eq!(args.len(), self.degree + 1);
        (self.eval)(args, p)
    }

    pub fn scale(&self, c: C64) -> Functional {
        let inner = self.eval.clone();
        Functional {
            degree: self.degree,
            label: format!("({:+.3}{:+.3}i)*{}", c.re, c.im, self.label),
            is_cyclic: self.is_cyclic,
            eval: Arc::new(move |args, p| Ok(inner(args, p)? * c)),
        }
    }

    pub fn add(&self, other: &Functional) -> Functional {
        assert_eq!(self.degree, other.degree);
        let a = self.eval.clone();
        let b = other.eval.clone();
        Functional {
            degree: self.degree,
            label: format!("{}+{}", self.label, other.label),
            is_cyclic: self.is_cyclic && other.is_cyclic,
            eval: Arc::new(move |args, p| Ok(a(args, p)? + b(args, p)?)),
        }
    }
}

/// Dual Hochschild differential: degree `m -> m + 1`.
pub fn dual_b(phi: &Functional) -> Functional {
    let inner = phi.eval.clone();
    let n = phi.degree + 1;
    Functional {
        degree: n,
        label: format!("b({})", phi.label),
        is_cyclic: false,
        eval: Arc::new(move |args, p| {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..n {
                let merged = mul(&args[j], &args[j + 1], p)?;
                let mut inner_args: Vec<TorusElement> = Vec::with_capacity(n);
                inner_args.extend_from_slice(&args[..j]);
                inner_args.push(merged);
                inner_args.extend_from_slice(&args[j + 2..]);
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                acc += inner(&inner_args, p)? * sign;
            }
            let wrap = mul(&args[n], &args[0], p)?;
            let mut inner_args: Vec<TorusElement> = Vec::with_capacity(n);
            inner_args.push(wrap);
            inner_args.extend_from_slice(&args[1..n]);
            let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
            acc += inner(&inner_args, p)? * sign;
            Ok(acc)
        }),
    }
}

/// Dual of the degree-raising differential: degree `m -> m - 1`.
pub fn dual_big_b(phi: &Functional) -> Result<Functional> {
    if phi.degree == 0 {
        return Err(Error::DegreeTooLow {
            required: 1,
            got: 0,
        });
    }
    let inner = phi.eval.clone();
    let n = phi.degree;
    Ok(Functional {
        degree: n - 1,
        label: format!("B({})", phi.label),
        is_cyclic: false,
        eval: Arc::new(move |args, p| {
            let one = TorusElement::one(p.dim());
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..n {
                let mut inner_args: Vec<TorusElement> = Vec::with_capacity(n + 1);
                inner_args.push(one.clone());
                inner_args.extend_from_slice(&args[j..]);
                inner_args.extend_from_slice(&args[..j]);
                let sign = if (j * (n - 1)).is_multiple_of(2) { 1.0 } else { -1.0 };
                acc += inner(&inner_args, p)? * sign;
            }
            Ok(acc)
        }),
    })
}

fn permutation_sign(perm: &[usize]) -> f64 {
    let mut inv = 0usize;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                inv += 1;
            }
        }
    }
    if inv.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Characteristic map: the antisymmetrized trace of derivatives
///
/// ```text
/// gamma(X_1 ^ ... ^ X_k)(a_0..a_k)
///   = 1/k! sum_sigma sgn(sigma) tau(a_0 X_sigma(1)(a_1) ... X_sigma(k)(a_k)).
/// ```
///
/// Inputs must be pairwise-commuting derivations; the output is a cyclic
/// cocycle invariant under the derivation action (both spot-tested).
pub fn gamma(derivations: &[MultiDiff]) -> Result<Functional> {
    for d in derivations {
        d.require_derivation()?;
    }
    let k = derivations.len();
    if k == 0 {
        return Ok(Functional::tau());
    }
    let xs: Vec<MultiDiff> = derivations.to_vec();
    let label = format!(
        "gamma({})",
        xs.iter().map(|d| d.label().to_string()).join("^")
    );
    let norm = 1.0 / (1..=k).map(|v| v as f64).product::<f64>();
    Ok(Functional {
        degree: k,
        label,
        is_cyclic: true,
        eval: Arc::new(move |args, p| {
            let mut acc = C64::new(0.0, 0.0);
            for perm in (0..k).permutations(k) {
                let sign = permutation_sign(&perm);
                let mut prod = args[0].clone();
                for (slot, &which) in perm.iter().enumerate() {
                    let derived = xs[which].evaluate(&[args[slot + 1].clone()], p)?;
                    prod = mul(&prod, &derived, p)?;
                }
                acc += trace(&prod) * sign;
            }
            Ok(acc * norm)
        }),
    })
}

/// The degree-1 cocycle `gamma(delta_j)` measuring winding about axis `j`.
pub fn tau1(j: usize) -> Functional {
    gamma(&[MultiDiff::derivation(j)]).expect("derivation input")
}

/// The canonical 2-cocycle at `n = 2`:
/// `tau_2(a_0,a_1,a_2) = 2 pi i tau(a_0 d1(a_1) d2(a_2) - a_0 d2(a_1) d1(a_2))`.
pub fn tau2() -> Functional {
    gamma(&[MultiDiff::derivation(1), MultiDiff::derivation(2)])
        .expect("derivation input")
        .scale(C64::new(0.0, 4.0 * std::f64::consts::PI))
}

/// The correction functional realizing the cyclic-rotation decomposition of
/// `tau(a_0 X_1(a_1) ... X_n(a_n))`:
///
/// ```text
/// psi(a_0..a_{n-1}) = 1/n sum_{j=1}^{n-1} (-1)^{(j-1)(n+1)} (n-j)
///                       tau(X_j(a_0) X_{j+1}(a_1) ... X_{j-1}(a_{n-1}))
/// ```
///
/// with derivation subscripts cycling through `1..n`.  Satisfies `B psi = 0`.
pub fn psi_correction(derivations: &[MultiDiff]) -> Result<Functional> {
    for d in derivations {
        d.require_derivation()?;
    }
    let n = derivations.len();
    if n == 0 {
        return Err(Error::Format("psi needs at least one derivation".into()));
    }
    let xs: Vec<MultiDiff> = derivations.to_vec();
    Ok(Functional {
        degree: n - 1,
        label: format!("psi[{}]", xs.iter().map(|d| d.label().to_string()).join(",")),
        is_cyclic: false,
        eval: Arc::new(move |args, p| {
            let mut acc = C64::new(0.0, 0.0);
            for j in 1..n {
                let mut prod: Option<TorusElement> = None;
                for slot in 0..n {
                    let which = (j - 1 + slot) % n;
                    let derived = xs[which].evaluate(&[args[slot].clone()], p)?;
                    prod = Some(match prod {
                        None => derived,
                        Some(acc_prod) => mul(&acc_prod, &derived, p)?,
                    });
                }
                let sign = if ((j - 1) * (n + 1)).is_multiple_of(2) { 1.0 } else { -1.0 };
                acc += trace(&prod.expect("n >= 1")) * sign * (n - j) as f64;
            }
            Ok(acc / n as f64)
        }),
    })
}

/// The transpose of the cyclic contraction `I_Z` on a homogeneous functional,
/// split by output degree: `I_Z = iota_Z + S_Z` raises the functional degree
/// through `iota` and lowers it through `S`.
pub struct DualContraction {
    /// `phi . iota_Z`, degree `m + 1`.
    pub raised: Functional,
    /// `phi . S_Z`, degree `m - 1`; `None` in degree zero.  Vanishes
    /// identically on cyclic normalized functionals.
    pub lowered: Option<Functional>,
}

/// Transpose of `I_Z` for a derivation `Z`.
pub fn contract_dual(z: &MultiDiff, phi: &Functional) -> Result<DualContraction> {
    z.require_derivation()?;
    let m = phi.degree;
    let raised = {
        let inner = phi.eval.clone();
        let z = z.clone();
        Functional {
            degree: m + 1,
            label: format!("iota_{}^*({})", z.label(), phi.label),
            is_cyclic: false,
            eval: Arc::new(move |args, p| {
                let derived = z.evaluate(&[args[1].clone()], p)?;
                let head = mul(&args[0], &derived, p)?;
                let mut inner_args: Vec<TorusElement> = Vec::with_capacity(m + 1);
                inner_args.push(head);
                inner_args.extend_from_slice(&args[2..]);
                inner(&inner_args, p)
            }),
        }
    };
    let lowered = if m == 0 {
        None
    } else {
        let inner = phi.eval.clone();
        let z = z.clone();
        // (S_Z^* phi)(a_0..a_{m-1}) = phi(S_Z(a_0 (x) ... (x) a_{m-1})):
        // the S sum for arity 1 on a degree-(m-1) tuple.
        let n = m - 1;
        Some(Functional {
            degree: n,
            label: format!("S_{}^*({})", z.label(), phi.label),
            is_cyclic: false,
            eval: Arc::new(move |args, p| {
                let one = TorusElement::one(p.dim());
                let mut acc = C64::new(0.0, 0.0);
                for j in 1..=n {
                    let derived = z.evaluate(&[args[j].clone()], p)?;
                    for i in 0..=(n - j) {
                        let sign = if (n as i64 * i as i64) % 2 == 0 { 1.0 } else { -1.0 };
                        let mut inner_args: Vec<TorusElement> = Vec::with_capacity(n + 2);
                        inner_args.push(one.clone());
                        inner_args.extend_from_slice(&args[n - i + 1..]);
                        inner_args.extend_from_slice(&args[..j]);
                        inner_args.push(derived.clone());
                        inner_args.extend_from_slice(&args[j + 1..=n - i]);
                        acc += inner(&inner_args, p)? * sign;
                    }
                }
                Ok(acc)
            }),
        })
    };
    Ok(DualContraction { raised, lowered })
}

fn element_tuple(factors: &[MultiIndex]) -> Vec<TorusElement> {
    factors
        .iter()
        .map(|a| TorusElement::monomial(a.clone(), C64::new(1.0, 0.0)))
        .collect()
}

/// Evaluate a functional on one homogeneous chain (degrees must match).
pub fn pair_chain(phi: &Functional, c: &Chain, p: &DeformationPoint) -> Result<C64> {
    if phi.degree() != c.degree() {
        return Err(Error::Format(format!(
            "functional degree {} vs chain degree {}",
            phi.degree(),
            c.degree()
        )));
    }
    let mut acc = C64::new(0.0, 0.0);
    for (factors, coeff) in c.terms() {
        acc += coeff * phi.evaluate(&element_tuple(factors), p)?;
    }
    Ok(acc)
}

/// Canonical pairing of a homogeneous functional with a periodic chain: the
/// functional sees the degree-matching component.
pub fn pairing(phi: &Functional, omega: &PeriodicChain, p: &DeformationPoint) -> Result<C64> {
    if !omega.parity().matches(phi.degree()) {
        return Err(Error::ParityMismatch {
            degree: phi.degree(),
            parity: format!("{:?}", omega.parity()),
        });
    }
    if phi.degree() > omega.cap() {
        return Err(Error::DegreeAboveCap {
            degree: phi.degree(),
            cap: omega.cap(),
        });
    }
    match omega.component(phi.degree()) {
        None => Ok(C64::new(0.0, 0.0)),
        Some(c) => pair_chain(phi, c, p),
    }
}

/// Pairing against the degree-matching component of a graded chain.
pub fn pair_graded(phi: &Functional, g: &GradedChain, p: &DeformationPoint) -> Result<C64> {
    match g.component(phi.degree()) {
        None => Ok(C64::new(0.0, 0.0)),
        Some(c) => pair_chain(phi, c, p),
    }
}

/// `gamma` evaluated over the matrix algebra: the trace is `tr (x) tau` and the
/// derivations act entrywise.
pub fn eval_gamma_on_matrices(
    axes: &[usize],
    args: &[MatrixElement],
    p: &DeformationPoint,
) -> Result<C64> {
    let k = axes.len();
    if args.len() != k + 1 {
        return Err(Error::Format(format!(
            "gamma over {k} axes needs {} arguments, got {}",
            k + 1,
            args.len()
        )));
    }
    if k == 0 {
        return Ok(mat_trace(&args[0]));
    }
    let norm = 1.0 / (1..=k).map(|v| v as f64).product::<f64>();
    let mut acc = C64::new(0.0, 0.0);
    for perm in (0..k).permutations(k) {
        let sign = permutation_sign(&perm);
        let mut prod = args[0].clone();
        for (slot, &which) in perm.iter().enumerate() {
            let derived = args[slot + 1].delta(axes[which])?;
            prod = mat_mul(&prod, &derived, p)?;
        }
        acc += mat_trace(&prod) * sign;
    }
    Ok(acc * norm)
}

/// `tau_2` over the matrix algebra (`n = 2`).
pub fn eval_tau2_on_matrices(args: &[MatrixElement], p: &DeformationPoint) -> Result<C64> {
    Ok(eval_gamma_on_matrices(&[1, 2], args, p)? * C64::new(0.0, 4.0 * std::f64::consts::PI))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chern::ch_invertible;
    use crate::matrix::try_invert;
    use crate::torus::{invert_monomial_unit, SkewMatrix};

    fn p2(theta: f64, t: f64) -> DeformationPoint {
        DeformationPoint::new(SkewMatrix::two_dim(theta), t)
    }

    fn u(j: usize) -> TorusElement {
        TorusElement::generator(2, j).unwrap()
    }

    fn um(v: &[i64]) -> TorusElement {
        TorusElement::monomial(MultiIndex::new(v.to_vec()), C64::new(1.0, 0.0))
    }

    #[test]
    fn dual_b_of_trace_vanishes() {
        let p = p2(0.618, 0.8);
        let b_tau = dual_b(&Functional::tau());
        let pairs = [
            (u(1), u(2)),
            (um(&[2, -1]), um(&[-2, 1])),
            (u(1).add(&u(2)), um(&[1, 1]).scale(C64::new(0.5, 0.5))),
        ];
        for (x, y) in pairs {
            let v = b_tau.evaluate(&[x, y], &p).unwrap();
            assert!(v.norm() < 1e-14);
        }
    }

    #[test]
    fn dual_big_b_of_cyclic_vanishes() {
        let p = p2(0.618, 0.8);
        let t1 = tau1(1);
        let b = dual_big_b(&t1).unwrap();
        for x in [u(1), u(2), um(&[3, -2]), TorusElement::one(2)] {
            assert!(b.evaluate(&[x], &p).unwrap().norm() < 1e-14);
        }
        assert!(dual_big_b(&Functional::tau()).is_err());
    }

    #[test]
    fn gamma_winding_values() {
        let p = p2(0.618, 0.35);
        let u1_inv = invert_monomial_unit(&u(1), &p).unwrap();
        let g1 = tau1(1);
        let v = g1.evaluate(&[u1_inv.clone(), u(1)], &p).unwrap();
        assert!((v - C64::new(1.0, 0.0)).norm() < 1e-14);
        let g2 = tau1(2);
        let v2 = g2.evaluate(&[u1_inv, u(1)], &p).unwrap();
        assert!(v2.norm() < 1e-14);
    }

    #[test]
    fn gamma_two_wedge_value() {
        let theta = 0.618;
        let t = 0.9;
        let p = p2(theta, t);
        let g12 = gamma(&[MultiDiff::derivation(1), MultiDiff::derivation(2)]).unwrap();
        let v = g12
            .evaluate(&[um(&[-1, -1]), u(1), u(2)], &p)
            .unwrap();
        let expect = crate::torus::unit_phase(-theta * t) * 0.5;
        assert!((v - expect).norm() < 1e-13);
        // antisymmetry: repeated derivation kills the functional
        let g11 = gamma(&[MultiDiff::derivation(1), MultiDiff::derivation(1)]).unwrap();
        let z = g11.evaluate(&[um(&[-2, 0]), u(1), u(1)], &p).unwrap();
        assert!(z.norm() < 1e-14);
    }

    #[test]
    fn tau2_vanishes_on_unit_leading_slot() {
        let p = p2(0.618, 0.4);
        let t2 = tau2();
        let v = t2
            .evaluate(&[TorusElement::one(2), u(1), u(2)], &p)
            .unwrap();
        assert!(v.norm() < 1e-14);
    }

    #[test]
    fn functionals_vanish_on_interior_units() {
        let p = p2(0.618, 0.55);
        let one = TorusElement::one(2);
        let g1 = tau1(1);
        assert!(g1.evaluate(&[u(1), one.clone()], &p).unwrap().norm() < 1e-14);
        let g12 = gamma(&[MultiDiff::derivation(1), MultiDiff::derivation(2)]).unwrap();
        assert!(
            g12.evaluate(&[u(1), one.clone(), u(2)], &p).unwrap().norm() < 1e-14
        );
        assert!(
            g12.evaluate(&[u(1), u(2), one.clone()], &p).unwrap().norm() < 1e-14
        );
        // the first slot is unconstrained for non-cyclic functionals
        let probe = Functional::from_fn(1, "probe", false, |args, p| {
            let d = crate::torus::delta(1, &args[1])?;
            let w = TorusElement::generator(2, 1)?;
            Ok(trace(&mul(&mul(&args[0], &d, p)?, &w, p)?))
        });
        let v = probe.evaluate(&[one, um(&[-1, 0])], &p).unwrap();
        assert!(v.norm() > 0.5);
    }

    #[test]
    fn gamma_is_lambda_cyclic() {
        let p = p2(0.618, 0.55);
        let g12 = gamma(&[MultiDiff::derivation(1), MultiDiff::derivation(2)]).unwrap();
        let tuples = [
            [um(&[-1, -1]), u(1), u(2)],
            [um(&[1, -2]), um(&[-2, 1]), um(&[1, 1])],
        ];
        for tuple in tuples {
            let direct = g12.evaluate(&tuple, &p).unwrap();
            let rotated = g12
                .evaluate(&[tuple[2].clone(), tuple[0].clone(), tuple[1].clone()], &p)
                .unwrap();
            // degree 2: rotation sign +1
            assert!((direct - rotated).norm() < 1e-13);
        }
    }

    #[test]
    fn psi_lemma_decomposition() {
        // tau(a0 X1(a1) X2(a2)) = 1/2 sum of rotations + b(psi)
        let p = p2(0.618, 0.45);
        let xs = [MultiDiff::derivation(1), MultiDiff::derivation(2)];
        let psi = psi_correction(&xs).unwrap();
        let b_psi = dual_b(&psi);
        let tuples = [
            [um(&[-1, -1]), u(1), u(2)],
            [um(&[0, 1]), um(&[2, -1]), um(&[-2, 0])],
            [um(&[1, 1]), um(&[-1, 0]), um(&[0, -1])],
        ];
        for args in tuples {
            let lhs = {
                let d1 = xs[0].evaluate(&[args[1].clone()], &p).unwrap();
                let d2 = xs[1].evaluate(&[args[2].clone()], &p).unwrap();
                let prod = mul(&mul(&args[0], &d1, &p).unwrap(), &d2, &p).unwrap();
                trace(&prod)
            };
            // rotation j=1: tau(a0 X1(a1) X2(a2)); j=2 with sign (-1)^{(2-1)(2+1)} = -1:
            // tau(a0 X2(a1) X1(a2))
            let rot1 = lhs;
            let rot2 = {
                let d2 = xs[1].evaluate(&[args[1].clone()], &p).unwrap();
                let d1 = xs[0].evaluate(&[args[2].clone()], &p).unwrap();
                let prod = mul(&mul(&args[0], &d2, &p).unwrap(), &d1, &p).unwrap();
                trace(&prod)
            };
            let avg = (rot1 - rot2) / 2.0;
            let correction = b_psi.evaluate(&args, &p).unwrap();
            assert!((lhs - avg - correction).norm() < 1e-12);
        }
    }

    #[test]
    fn dual_b_squares_to_zero() {
        let p = p2(0.618, 0.8);
        // a non-cyclic evaluator functional
        let probe = Functional::from_fn(1, "probe", false, |args, p| {
            let d = crate::torus::delta(1, &args[1])?;
            Ok(trace(&mul(&args[0], &d, p)?))
        });
        let bb = dual_b(&dual_b(&probe));
        let tuples = [
            [u(1), u(2), um(&[1, 1]), um(&[-1, 2])],
            [um(&[2, -1]), um(&[-1, 0]), um(&[0, 1]), u(2)],
        ];
        for args in tuples {
            assert!(bb.evaluate(&args, &p).unwrap().norm() < 1e-12);
        }
    }

    #[test]
    fn psi_of_single_derivation_is_zero() {
        let p = p2(0.618, 0.45);
        let psi = psi_correction(&[MultiDiff::derivation(1)]).unwrap();
        assert_eq!(psi.degree(), 0);
        for x in [u(1), um(&[3, -1]), TorusElement::one(2)] {
            assert_eq!(psi.evaluate(&[x], &p).unwrap(), C64::new(0.0, 0.0));
        }
    }

    #[test]
    fn psi_is_big_b_closed() {
        let p = p2(0.618, 0.45);
        let xs = [MultiDiff::derivation(1), MultiDiff::derivation(2)];
        let psi = psi_correction(&xs).unwrap();
        let b_psi = dual_big_b(&psi).unwrap();
        for x in [u(1), um(&[2, -3]), um(&[-1, 1])] {
            assert!(b_psi.evaluate(&[x], &p).unwrap().norm() < 1e-13);
        }
    }

    #[test]
    fn dual_contraction_on_trace() {
        let p = p2(0.618, 0.8);
        let z = MultiDiff::derivation(2);
        let dc = contract_dual(&z, &Functional::tau()).unwrap();
        assert!(dc.lowered.is_none());
        let alpha = MultiIndex::new(vec![3, -2]);
        let x = TorusElement::monomial(alpha.clone(), C64::new(1.0, 0.0));
        let x_neg = TorusElement::monomial(alpha.neg(), C64::new(1.0, 0.0));
        let got = dc.raised.evaluate(&[x_neg.clone(), x.clone()], &p).unwrap();
        let expect = trace(&mul(&x_neg, &x, &p).unwrap()) * (-2.0);
        assert!((got - expect).norm() < 1e-13);
    }

    #[test]
    fn dual_s_part_vanishes_on_cyclic() {
        let p = p2(0.618, 0.8);
        let z = MultiDiff::derivation(1);
        let g12 = gamma(&[MultiDiff::derivation(1), MultiDiff::derivation(2)]).unwrap();
        let dc = contract_dual(&z, &g12).unwrap();
        let lowered = dc.lowered.unwrap();
        for (x, y) in [
            (u(1), u(2)),
            (um(&[2, -1]), um(&[-1, 2])),
            (um(&[0, 3]), um(&[1, -1])),
        ] {
            assert!(lowered.evaluate(&[x, y], &p).unwrap().norm() < 1e-13);
        }
    }

    #[test]
    fn pairing_examples() {
        let p = p2(0.618, 0.5);
        // <tau1^1, ch u1> = 1
        let u1 = MatrixElement::scalar(u(1));
        let u1_inv = try_invert(&u1, &p).unwrap();
        let ch = ch_invertible(&u1, &u1_inv, 3, &p).unwrap();
        let v = pairing(&tau1(1), &ch, &p).unwrap();
        assert!((v - C64::new(1.0, 0.0)).norm() < 1e-13);
        // parity mismatch is rejected
        assert!(pairing(&Functional::tau(), &ch, &p).is_err());
        // winding of a scaled monomial unit: alpha_j exactly
        let alpha = MultiIndex::new(vec![-2, 5]);
        let um = MatrixElement::scalar(TorusElement::monomial(
            alpha,
            C64::new(0.4, -1.1),
        ));
        let um_inv = try_invert(&um, &p).unwrap();
        let ch_m = ch_invertible(&um, &um_inv, 1, &p).unwrap();
        let w1 = pairing(&tau1(1), &ch_m, &p).unwrap();
        let w2 = pairing(&tau1(2), &ch_m, &p).unwrap();
        assert!((w1 - C64::new(-2.0, 0.0)).norm() < 1e-12);
        assert!((w2 - C64::new(5.0, 0.0)).norm() < 1e-12);
    }
}
