//! The algebraic noncommutative torus: finitely supported Fourier series over
//! `Z^n` with the twisted convolution product at deformation parameter `t`.
//!
//! An element is a finite sum `x = sum_alpha x_alpha u^alpha` over multi-indices
//! `alpha` in `Z^n`.  The product at parameter `t` is
//!
//! ```text
//! m_t(x, y)_alpha = sum_beta exp(2 pi i B(alpha - beta, beta) t) x_{alpha-beta} y_beta,
//! B(a, b) = sum_{j > k} a_j b_k theta_{jk}.
//! ```
//!
//! All values are immutable; every operation is a pure function and reduces its
//! terms in lexicographic index order, so results are bit-reproducible.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = Complex64;

/// `exp(2 pi i phase)` on the unit circle.
///
/// Returns exactly `1` when `phase == 0.0`, which keeps unit laws and
/// zero-phase products exact.
pub fn unit_phase(phase: f64) -> C64 {
    let arg = 2.0 * std::f64::consts::PI * phase;
    C64::new(arg.cos(), arg.sin())
}

/// A point of `Z^n`, ordered lexicographically.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(pub Vec<i64>);

impl MultiIndex {
    pub fn new(components: Vec<i64>) -> Self {
        MultiIndex(components)
    }

    /// The zero index of dimension `n` (the unit monomial exponent).
    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    /// The standard basis index `e_j` for a 1-based axis `j`.
    pub fn unit(n: usize, j: usize) -> Result<Self> {
        if j == 0 || j > n {
            return Err(Error::AxisOutOfRange { axis: j, n });
        }
        let mut v = vec![0; n];
        v[j - 1] = 1;
        Ok(MultiIndex(v))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// Component along a 1-based axis.
    pub fn component(&self, j: usize) -> i64 {
        self.0[j - 1]
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn neg(&self) -> MultiIndex {
        MultiIndex(self.0.iter().map(|a| -a).collect())
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Skew-symmetric real matrix `Theta` defining the torus.
#[derive(Clone, Debug, PartialEq)]
pub struct SkewMatrix {
    n: usize,
    theta: Vec<f64>,
}

impl SkewMatrix {
    /// Validates exact skew symmetry (`theta_jk == -theta_kj`, zero diagonal).
    pub fn new(n: usize, theta: Vec<Vec<f64>>) -> Result<Self> {
        if theta.len() != n || theta.iter().any(|row| row.len() != n) {
            return Err(Error::Format(format!("theta must be {n} x {n}")));
        }
        for j in 0..n {
            if theta[j][j] != 0.0 {
                return Err(Error::NotSkewSymmetric { row: j, col: j });
            }
            for k in 0..j {
                if theta[j][k] != -theta[k][j] {
                    return Err(Error::NotSkewSymmetric { row: j, col: k });
                }
            }
        }
        let flat = theta.into_iter().flatten().collect();
        Ok(SkewMatrix { n, theta: flat })
    }

    pub fn zero(n: usize) -> Self {
        SkewMatrix {
            n,
            theta: vec![0.0; n * n],
        }
    }

    /// The 2-dimensional matrix with `theta_21 = theta`.
    pub fn two_dim(theta: f64) -> Self {
        SkewMatrix {
            n: 2,
            theta: vec![0.0, -theta, theta, 0.0],
        }
    }

    /// Entry `theta_jk` for 1-based axes.
    pub fn entry(&self, j: usize, k: usize) -> f64 {
        self.theta[(j - 1) * self.n + (k - 1)]
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|j| self.theta[j * self.n..(j + 1) * self.n].to_vec())
            .collect()
    }

    /// The bicharacter exponent `B(a, b) = sum_{j > k} a_j b_k theta_jk`.
    ///
    /// Exactly `0.0` when either index is zero.
    pub fn phase(&self, a: &MultiIndex, b: &MultiIndex) -> Result<f64> {
        if a.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: a.dim(),
            });
        }
        if b.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: b.dim(),
            });
        }
        let mut sum = 0.0;
        for j in 2..=self.n {
            let aj = a.component(j) as f64;
            if aj == 0.0 {
                continue;
            }
            for k in 1..j {
                let bk = b.component(k) as f64;
                if bk == 0.0 {
                    continue;
                }
                sum += aj * bk * self.entry(j, k);
            }
        }
        Ok(sum)
    }
}

/// A deformation point: the matrix `Theta` scaled by the parameter `t`.
#[derive(Clone, Debug)]
pub struct DeformationPoint {
    pub theta: SkewMatrix,
    pub t: f64,
}

impl DeformationPoint {
    pub fn new(theta: SkewMatrix, t: f64) -> Self {
        DeformationPoint { theta, t }
    }

    pub fn dim(&self) -> usize {
        self.theta.dim()
    }

    pub fn at(&self, t: f64) -> DeformationPoint {
        DeformationPoint {
            theta: self.theta.clone(),
            t,
        }
    }
}

/// Finitely supported element of the torus algebra.
///
/// Invariants: no stored coefficient is exactly zero; terms are kept in
/// lexicographic index order (the map is ordered).
#[derive(Clone, PartialEq)]
pub struct TorusElement {
    n: usize,
    terms: BTreeMap<MultiIndex, C64>,
}

impl TorusElement {
    pub fn zero(n: usize) -> Self {
        TorusElement {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(n: usize) -> Self {
        Self::monomial(MultiIndex::zero(n), C64::new(1.0, 0.0))
    }

    /// The generator `u_j` for a 1-based axis.
    pub fn generator(n: usize, j: usize) -> Result<Self> {
        Ok(Self::monomial(MultiIndex::unit(n, j)?, C64::new(1.0, 0.0)))
    }

    /// `c * u^alpha`.
    pub fn monomial(alpha: MultiIndex, c: C64) -> Self {
        let n = alpha.dim();
        let mut terms = BTreeMap::new();
        if c != C64::new(0.0, 0.0) {
            terms.insert(alpha, c);
        }
        TorusElement { n, terms }
    }

    pub fn from_terms(n: usize, entries: impl IntoIterator<Item = (MultiIndex, C64)>) -> Result<Self> {
        let mut out = TorusElement::zero(n);
        for (alpha, c) in entries {
            if alpha.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: alpha.dim(),
                });
            }
            out.add_term(alpha, c);
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &C64)> {
        self.terms.iter()
    }

    pub fn support_size(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, alpha: &MultiIndex) -> C64 {
        self.terms
            .get(alpha)
            .copied()
            .unwrap_or(C64::new(0.0, 0.0))
    }

    /// Accumulate a term, pruning exact zeros.
    pub fn add_term(&mut self, alpha: MultiIndex, c: C64) {
        if c == C64::new(0.0, 0.0) {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(alpha) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let v = *e.get() + c;
                if v == C64::new(0.0, 0.0) {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    pub fn scale(&self, c: C64) -> TorusElement {
        if c == C64::new(0.0, 0.0) {
            return TorusElement::zero(self.n);
        }
        TorusElement {
            n: self.n,
            terms: self.terms.iter().map(|(a, v)| (a.clone(), v * c)).collect(),
        }
    }

    pub fn add(&self, other: &TorusElement) -> TorusElement {
        let mut out = self.clone();
        for (a, c) in &other.terms {
            out.add_term(a.clone(), *c);
        }
        out
    }

    pub fn sub(&self, other: &TorusElement) -> TorusElement {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// Largest coefficient magnitude.
    pub fn norm_inf(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Drop terms with `|c| < eps`.  Off by default in every pipeline; available
    /// for bounding support growth in long products.
    pub fn prune_eps(&self, eps: f64) -> TorusElement {
        TorusElement {
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter(|(_, c)| c.norm() >= eps)
                .map(|(a, c)| (a.clone(), *c))
                .collect(),
        }
    }

    /// Coefficient at the zero index: the canonical trace.
    pub fn trace(&self) -> C64 {
        self.coefficient(&MultiIndex::zero(self.n))
    }
}

impl fmt::Debug for TorusElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(a, c)| format!("({:+.6}{:+.6}i) u^{:?}", c.re, c.im, a.0))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

fn check_dims(x: &TorusElement, y: &TorusElement, p: &DeformationPoint) -> Result<usize> {
    let n = p.dim();
    if x.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x.dim(),
        });
    }
    if y.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: y.dim(),
        });
    }
    Ok(n)
}

/// Twisted convolution product `m_t(x, y)` at the deformation point.
pub fn mul(x: &TorusElement, y: &TorusElement, p: &DeformationPoint) -> Result<TorusElement> {
    let n = check_dims(x, y, p)?;
    let mut out = TorusElement::zero(n);
    for (ax, cx) in x.terms() {
        for (ay, cy) in y.terms() {
            let phase = p.theta.phase(ax, ay)?;
            out.add_term(ax.add(ay), cx * cy * unit_phase(phase * p.t));
        }
    }
    Ok(out)
}

/// `d/dt m_t(x, y) = 2 pi i sum_{j > k} theta_jk m_t(delta_j x, delta_k y)`.
pub fn mul_derivative(
    x: &TorusElement,
    y: &TorusElement,
    p: &DeformationPoint,
) -> Result<TorusElement> {
    let n = check_dims(x, y, p)?;
    let two_pi_i = C64::new(0.0, 2.0 * std::f64::consts::PI);
    let mut out = TorusElement::zero(n);
    for j in 2..=n {
        for k in 1..j {
            let theta_jk = p.theta.entry(j, k);
            if theta_jk == 0.0 {
                continue;
            }
            let term = mul(&delta(j, x)?, &delta(k, y)?, p)?;
            out = out.add(&term.scale(two_pi_i * theta_jk));
        }
    }
    Ok(out)
}

/// Canonical derivation `delta_j` (1-based axis): scales each coefficient by
/// `alpha_j`.
pub fn delta(j: usize, x: &TorusElement) -> Result<TorusElement> {
    if j == 0 || j > x.dim() {
        return Err(Error::AxisOutOfRange { axis: j, n: x.dim() });
    }
    let mut out = TorusElement::zero(x.dim());
    for (alpha, c) in x.terms() {
        let factor = alpha.component(j) as f64;
        out.add_term(alpha.clone(), c * factor);
    }
    Ok(out)
}

/// Canonical trace `tau(x) = x_0`.
pub fn trace(x: &TorusElement) -> C64 {
    x.trace()
}

/// Exact inverse of a monomial unit `c * u^alpha` at `p`.
pub fn invert_monomial_unit(x: &TorusElement, p: &DeformationPoint) -> Result<TorusElement> {
    if x.support_size() != 1 {
        return Err(Error::NotMonomialUnit);
    }
    let (alpha, c) = x.terms().next().map(|(a, c)| (a.clone(), *c)).unwrap();
    if c == C64::new(0.0, 0.0) {
        return Err(Error::NotMonomialUnit);
    }
    let neg = alpha.neg();
    // m_t(d u^{-alpha}, c u^alpha) = d c exp(2 pi i B(-alpha, alpha) t) u^0
    let phase = p.theta.phase(&neg, &alpha)?;
    let d = (c * unit_phase(phase * p.t)).finv();
    Ok(TorusElement::monomial(neg, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2(theta: f64, t: f64) -> DeformationPoint {
        DeformationPoint::new(SkewMatrix::two_dim(theta), t)
    }

    fn u(n: usize, j: usize) -> TorusElement {
        TorusElement::generator(n, j).unwrap()
    }

    fn um(v: &[i64]) -> TorusElement {
        TorusElement::monomial(MultiIndex::new(v.to_vec()), C64::new(1.0, 0.0))
    }

    #[test]
    fn phase_examples() {
        let th = SkewMatrix::two_dim(0.3);
        let a = MultiIndex::new(vec![1, 0]);
        let b = MultiIndex::new(vec![0, 1]);
        assert_eq!(th.phase(&a, &b).unwrap(), 0.0);
        assert_eq!(th.phase(&b, &a).unwrap(), 0.3);
        let zero = MultiIndex::zero(2);
        assert_eq!(th.phase(&zero, &b).unwrap(), 0.0);
        assert_eq!(th.phase(&a, &zero).unwrap(), 0.0);
    }

    #[test]
    fn phase_dimension_mismatch() {
        let th = SkewMatrix::two_dim(0.3);
        let a = MultiIndex::new(vec![1, 0, 0]);
        assert!(th.phase(&a, &MultiIndex::zero(2)).is_err());
    }

    #[test]
    fn skew_validation() {
        assert!(SkewMatrix::new(2, vec![vec![0.0, 0.5], vec![0.5, 0.0]]).is_err());
        assert!(SkewMatrix::new(2, vec![vec![0.1, -0.5], vec![0.5, 0.0]]).is_err());
        assert!(SkewMatrix::new(2, vec![vec![0.0, -0.5], vec![0.5, 0.0]]).is_ok());
    }

    #[test]
    fn mul_monomials() {
        let p = p2(0.375, 1.0);
        // u1 * u2 has zero phase
        let xy = mul(&u(2, 1), &u(2, 2), &p).unwrap();
        assert_eq!(xy, um(&[1, 1]));
        // u2 * u1 picks up exp(2 pi i theta_21 t)
        let yx = mul(&u(2, 2), &u(2, 1), &p).unwrap();
        let expected = unit_phase(0.375);
        assert_eq!(yx.support_size(), 1);
        let c = yx.coefficient(&MultiIndex::new(vec![1, 1]));
        assert!((c - expected).norm() < 1e-15);
    }

    #[test]
    fn mul_unit_is_exact() {
        let p = p2(0.618, 0.7);
        let x = um(&[2, -1])
            .scale(C64::new(1.25, -0.5))
            .add(&um(&[0, 3]).scale(C64::new(-0.75, 0.25)));
        assert_eq!(mul(&TorusElement::one(2), &x, &p).unwrap(), x);
        assert_eq!(mul(&x, &TorusElement::one(2), &p).unwrap(), x);
    }

    #[test]
    fn commutation_relation() {
        // u_j u_k = exp(2 pi i theta_jk) u_k u_j at t = 1
        let theta = 0.618;
        let p = p2(theta, 1.0);
        let jk = mul(&u(2, 1), &u(2, 2), &p).unwrap();
        let kj = mul(&u(2, 2), &u(2, 1), &p).unwrap();
        // theta_{12} = -theta
        let lhs = jk;
        let rhs = kj.scale(unit_phase(-theta));
        assert!(lhs.sub(&rhs).norm_inf() < 1e-12);
    }

    #[test]
    fn delta_examples() {
        let x = um(&[2, -1]);
        assert_eq!(delta(1, &x).unwrap(), x.scale(C64::new(2.0, 0.0)));
        assert_eq!(delta(2, &x).unwrap(), x.scale(C64::new(-1.0, 0.0)));
        assert!(delta(1, &TorusElement::one(2)).unwrap().is_zero());
        assert!(delta(3, &x).is_err());
    }

    #[test]
    fn trace_examples() {
        let p = p2(0.618, 1.0);
        assert_eq!(trace(&TorusElement::one(2)), C64::new(1.0, 0.0));
        assert_eq!(trace(&u(2, 1)), C64::new(0.0, 0.0));
        // tau(u^{-alpha} u^alpha) = exp(2 pi i B(-alpha, alpha) t)
        let alpha = MultiIndex::new(vec![2, 1]);
        let prod = mul(&um(&[-2, -1]), &um(&[2, 1]), &p).unwrap();
        let expect = unit_phase(p.theta.phase(&alpha.neg(), &alpha).unwrap() * p.t);
        assert!((trace(&prod) - expect).norm() < 1e-15);
    }

    #[test]
    fn trace_of_delta_vanishes_exactly() {
        let x = um(&[2, -1]).add(&TorusElement::one(2).scale(C64::new(3.0, 1.0)));
        assert_eq!(trace(&delta(1, &x).unwrap()), C64::new(0.0, 0.0));
    }

    #[test]
    fn mul_derivative_examples() {
        let theta = 0.618;
        let t = 0.4;
        let p = p2(theta, t);
        // d/dt m_t(u2, u1) = 2 pi i theta exp(2 pi i theta t) u^{(1,1)}
        let d = mul_derivative(&u(2, 2), &u(2, 1), &p).unwrap();
        let expect = C64::new(0.0, 2.0 * std::f64::consts::PI * theta) * unit_phase(theta * t);
        assert!((d.coefficient(&MultiIndex::new(vec![1, 1])) - expect).norm() < 1e-12);
        // unit argument kills it
        assert!(mul_derivative(&TorusElement::one(2), &u(2, 1), &p)
            .unwrap()
            .is_zero());
        // delta_2(u1) = 0 kills the only contribution
        assert!(mul_derivative(&u(2, 1), &u(2, 2), &p).unwrap().is_zero());
    }

    #[test]
    fn mul_derivative_matches_finite_difference() {
        let theta = 0.618;
        let t = 0.3;
        let x = um(&[1, 1]).scale(C64::new(0.5, 0.25)).add(&um(&[-1, 0]));
        let y = um(&[1, -1]).add(&um(&[0, 1]).scale(C64::new(0.0, 1.5)));
        let h = 1e-4;
        let plus = mul(&x, &y, &p2(theta, t + h)).unwrap();
        let minus = mul(&x, &y, &p2(theta, t - h)).unwrap();
        let fd = plus.sub(&minus).scale(C64::new(0.5 / h, 0.0));
        let closed = mul_derivative(&x, &y, &p2(theta, t)).unwrap();
        assert!(fd.sub(&closed).norm_inf() < 1e-6);
    }

    #[test]
    fn epsilon_prune_bounds_support() {
        let tiny = um(&[1, 0]).scale(C64::new(1e-16, 0.0));
        let x = um(&[0, 1]).add(&tiny);
        assert_eq!(x.support_size(), 2);
        let pruned = x.prune_eps(1e-14);
        assert_eq!(pruned.support_size(), 1);
        assert_eq!(pruned.coefficient(&MultiIndex::new(vec![0, 1])), C64::new(1.0, 0.0));
    }

    #[test]
    fn invert_monomials() {
        let p = p2(0.618, 0.9);
        let x = u(2, 1);
        let inv = invert_monomial_unit(&x, &p).unwrap();
        assert_eq!(inv, um(&[-1, 0]));
        let prod = mul(&inv, &x, &p).unwrap();
        assert!(prod.sub(&TorusElement::one(2)).norm_inf() < 1e-15);
        let prod2 = mul(&x, &inv, &p).unwrap();
        assert!(prod2.sub(&TorusElement::one(2)).norm_inf() < 1e-15);

        assert_eq!(
            invert_monomial_unit(&TorusElement::one(2), &p).unwrap(),
            TorusElement::one(2)
        );

        let c = C64::new(0.3, -1.2);
        let xm = TorusElement::monomial(MultiIndex::new(vec![2, -3]), c);
        let invm = invert_monomial_unit(&xm, &p).unwrap();
        let prod = mul(&invm, &xm, &p).unwrap();
        assert!(prod.sub(&TorusElement::one(2)).norm_inf() < 1e-14);
        let not_unit = x.add(&TorusElement::one(2));
        assert!(invert_monomial_unit(&not_unit, &p).is_err());
    }
}
