//! The invariant complex under the canonical derivations, its chain
//! equivalence with the full complex, exact parallel transport across the
//! deformation parameter, and the finite wedge model of the connection with
//! its nilpotent correction.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;

use crate::calculus::{cyclic_into, lie_pair_invariant_into};
use crate::chain::{Chain, FactorTuple, GradedChain, Parity};
use crate::cochain::MultiDiff;
use crate::error::{Error, Result};
use crate::ode::CMatrix;
use crate::torus::{unit_phase, DeformationPoint, MultiIndex, SkewMatrix};

/// Total Fourier degree of a factor tuple along a 1-based axis.
pub fn deg(j: usize, factors: &[MultiIndex]) -> i64 {
    factors.iter().map(|a| a.component(j)).sum()
}

/// Per-axis degree profile of a factor tuple.
pub fn deg_profile(factors: &[MultiIndex]) -> Vec<i64> {
    let n = factors.first().map(|a| a.dim()).unwrap_or(0);
    (1..=n).map(|j| deg(j, factors)).collect()
}

/// First axis with nonzero total degree, if any.
fn invariance_defect(factors: &[MultiIndex]) -> Option<(usize, i64)> {
    let n = factors.first().map(|a| a.dim()).unwrap_or(0);
    for j in 1..=n {
        let d = deg(j, factors);
        if d != 0 {
            return Some((j, d));
        }
    }
    None
}

/// Axis projection `p_j = 1 - N_j L_{delta_j}`: keeps exactly the terms with
/// `deg_j = 0`.
pub fn project_axis(j: usize, c: &Chain) -> Chain {
    let mut out = Chain::zero(c.dim(), c.degree());
    for (factors, coeff) in c.terms() {
        if deg(j, factors) == 0 {
            out.add_term(factors.clone(), *coeff);
        }
    }
    out
}

/// Projection onto the joint kernel of all `L_{delta_j}`.
pub fn project_invariant(c: &Chain) -> Chain {
    let mut out = Chain::zero(c.dim(), c.degree());
    for (factors, coeff) in c.terms() {
        if invariance_defect(factors).is_none() {
            out.add_term(factors.clone(), *coeff);
        }
    }
    out
}

/// Partial inverse `N_j` of `L_{delta_j}`: scales each term by `1/deg_j`,
/// killing the `deg_j = 0` part.
pub fn smoothing_n(j: usize, c: &Chain) -> Chain {
    let mut out = Chain::zero(c.dim(), c.degree());
    for (factors, coeff) in c.terms() {
        let d = deg(j, factors);
        if d != 0 {
            out.add_term(factors.clone(), coeff / d as f64);
        }
    }
    out
}

fn smoothing_n_graded(j: usize, g: &GradedChain) -> GradedChain {
    let mut out = GradedChain::zero(g.dim());
    for (_, c) in g.components() {
        out.accumulate(smoothing_n(j, c));
    }
    out
}

/// The chain homotopy `h_j = N_j I_{delta_j}` realizing the equivalence with
/// the invariant complex: `[b + B, h_j] = 1 - i_j p_j` on the joint kernel of
/// the previous axes.
pub fn homotopy_h(j: usize, c: &Chain, p: &DeformationPoint) -> Result<GradedChain> {
    let d = MultiDiff::derivation(j);
    let mut contracted = GradedChain::zero(c.dim());
    cyclic_into(&d, c, p, &mut contracted)?;
    Ok(smoothing_n_graded(j, &contracted))
}

/// A chain whose every term has zero degree along every axis.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantChain(Chain);

impl InvariantChain {
    pub fn new(c: Chain) -> Result<Self> {
        for (factors, _) in c.terms() {
            if let Some((axis, d)) = invariance_defect(factors) {
                return Err(Error::NotInvariant { axis, deg: d });
            }
        }
        Ok(InvariantChain(c))
    }

    /// Project an arbitrary chain onto its invariant part.
    pub fn project(c: &Chain) -> Self {
        InvariantChain(project_invariant(c))
    }

    pub fn chain(&self) -> &Chain {
        &self.0
    }

    pub fn into_chain(self) -> Chain {
        self.0
    }
}

/// The transport exponent polynomial:
///
/// ```text
/// R(albar) = sum_{p > q} theta_pq sum_{0 <= i < j <= m} (alpha^i)_p (alpha^j)_q,
/// ```
///
/// the eigenvalue of `sum_{p>q} theta_pq L{delta_p, delta_q}` on an invariant
/// basis tensor.  Rejects non-invariant tuples.
pub fn r_poly(factors: &[MultiIndex], theta: &SkewMatrix) -> Result<f64> {
    if let Some((axis, d)) = invariance_defect(factors) {
        return Err(Error::NotInvariant { axis, deg: d });
    }
    Ok(r_poly_unchecked(factors, theta))
}

fn r_poly_unchecked(factors: &[MultiIndex], theta: &SkewMatrix) -> f64 {
    let n = theta.dim();
    let mut sum = 0.0;
    for p in 2..=n {
        for q in 1..p {
            let theta_pq = theta.entry(p, q);
            if theta_pq == 0.0 {
                continue;
            }
            let mut pairs = 0.0;
            for i in 0..factors.len() {
                let ai = factors[i].component(p) as f64;
                if ai == 0.0 {
                    continue;
                }
                for j in i + 1..factors.len() {
                    pairs += ai * factors[j].component(q) as f64;
                }
            }
            sum += theta_pq * pairs;
        }
    }
    sum
}

fn transport_chain_terms(c: &Chain, dt: f64, theta: &SkewMatrix, sign: f64) -> Result<Chain> {
    let mut out = Chain::zero(c.dim(), c.degree());
    for (factors, coeff) in c.terms() {
        let r = r_poly(factors, theta)?;
        out.add_term(factors.clone(), coeff * unit_phase(sign * r * dt));
    }
    Ok(out)
}

/// Parallel transport of an invariant chain from `t0` to `t1`: each basis term
/// is scaled by `exp(-2 pi i R(albar) (t1 - t0))`.  The sign is dual to the
/// functional transport so that pairings are preserved.
pub fn transport_chain(
    c: &InvariantChain,
    t0: f64,
    t1: f64,
    theta: &SkewMatrix,
) -> Result<InvariantChain> {
    Ok(InvariantChain(transport_chain_terms(
        c.chain(),
        t1 - t0,
        theta,
        -1.0,
    )?))
}

/// Termwise transport of a graded invariant chain.
pub fn transport_graded(
    g: &GradedChain,
    t0: f64,
    t1: f64,
    theta: &SkewMatrix,
) -> Result<GradedChain> {
    let mut out = GradedChain::zero(g.dim());
    for (_, c) in g.components() {
        out.accumulate(transport_chain_terms(c, t1 - t0, theta, -1.0)?);
    }
    Ok(out)
}

/// A functional known by its values on finitely many invariant basis tuples.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionalTable {
    n: usize,
    degree: usize,
    entries: BTreeMap<FactorTuple, C64>,
}

impl FunctionalTable {
    pub fn new(n: usize, degree: usize) -> Self {
        FunctionalTable {
            n,
            degree,
            entries: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn entries(&self) -> impl Iterator<Item = (&FactorTuple, &C64)> {
        self.entries.iter()
    }

    pub fn insert(&mut self, factors: FactorTuple, value: C64) -> Result<()> {
        if let Some((axis, d)) = invariance_defect(&factors) {
            return Err(Error::NotInvariant { axis, deg: d });
        }
        if factors.len() != self.degree + 1 {
            return Err(Error::Format(format!(
                "tuple length {} in degree-{} table",
                factors.len(),
                self.degree
            )));
        }
        self.entries.insert(factors, value);
        Ok(())
    }

    pub fn value(&self, factors: &FactorTuple) -> C64 {
        self.entries
            .get(factors)
            .copied()
            .unwrap_or(C64::new(0.0, 0.0))
    }

    /// Record a functional's values on the support of an invariant chain.
    pub fn tabulate(
        phi: &crate::functional::Functional,
        support: &InvariantChain,
        p: &DeformationPoint,
    ) -> Result<Self> {
        let c = support.chain();
        let mut table = FunctionalTable::new(c.dim(), c.degree());
        for (factors, _) in c.terms() {
            let args: Vec<_> = factors
                .iter()
                .map(|a| crate::torus::TorusElement::monomial(a.clone(), C64::new(1.0, 0.0)))
                .collect();
            table.insert(factors.clone(), phi.evaluate(&args, p)?)?;
        }
        Ok(table)
    }

    /// Pairing against an invariant chain: the sum of `coeff * value` over the
    /// chain's support.
    pub fn pair(&self, c: &InvariantChain) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (factors, coeff) in c.chain().terms() {
            acc += coeff * self.value(factors);
        }
        acc
    }
}

/// Parallel transport of a tabulated functional from `t0` to `t1`: values are
/// scaled by `exp(+2 pi i R(albar) (t1 - t0))`, the coefficientwise solution of
/// the diagonal connection's parallel-section equation.
pub fn transport_table(
    table: &FunctionalTable,
    t0: f64,
    t1: f64,
    theta: &SkewMatrix,
) -> Result<FunctionalTable> {
    let dt = t1 - t0;
    let mut out = FunctionalTable::new(table.dim(), table.degree());
    for (factors, value) in table.entries() {
        let r = r_poly(factors, theta)?;
        out.insert(factors.clone(), value * unit_phase(r * dt))?;
    }
    Ok(out)
}

/// The exterior-algebra action by composed cyclic contractions: for a strictly
/// increasing axis set `{j_1 < ... < j_k}` applies
/// `I_{delta_{j_1}} I_{delta_{j_2}} ... I_{delta_{j_k}}` (rightmost first).
pub fn chi_apply(
    axes: &[usize],
    c: &InvariantChain,
    p: &DeformationPoint,
) -> Result<GradedChain> {
    let mut g = GradedChain::from_chain(c.chain().clone());
    for &j in axes.iter().rev() {
        let d = MultiDiff::derivation(j);
        g = crate::calculus::apply_cyclic(&d, &g, p)?;
    }
    Ok(g)
}

/// The degree-0 invariant cycle representing the class of the unit.
pub fn unit_cycle(n: usize) -> InvariantChain {
    let mut c = Chain::zero(n, 0);
    c.add_term(vec![MultiIndex::zero(n)], C64::new(1.0, 0.0));
    InvariantChain(c)
}

/// The explicit invariant 2-cycle over the 2-torus pairing nontrivially with
/// the 2-wedge cocycle:
///
/// ```text
/// v(t) = (u^{(-1,-1)}, u_1, u_2) - exp(-2 pi i theta_21 t) (u^{(-1,-1)}, u_2, u_1)
/// ```
///
/// is killed by `b` at the deformation point (checked in tests).
pub fn volume_cycle(p: &DeformationPoint) -> Result<InvariantChain> {
    if p.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: p.dim(),
        });
    }
    let theta21 = p.theta.entry(2, 1);
    let mut c = Chain::zero(2, 2);
    let head = MultiIndex::new(vec![-1, -1]);
    let e1 = MultiIndex::new(vec![1, 0]);
    let e2 = MultiIndex::new(vec![0, 1]);
    c.add_term(vec![head.clone(), e1.clone(), e2.clone()], C64::new(1.0, 0.0));
    c.add_term(
        vec![head, e2, e1],
        -unit_phase(-theta21 * p.t),
    );
    InvariantChain::new(c)
}

/// Weighted sum of the pair Lie operators,
/// `sum_{p>q} theta_pq L{delta_p, delta_q}`, in the invariant form (leading
/// slot included).  Acts diagonally on invariant basis tensors with eigenvalue
/// `R(albar)`.
pub fn weighted_lie_pair_invariant(
    c: &Chain,
    p: &DeformationPoint,
) -> Result<GradedChain> {
    let n = p.dim();
    let mut out = GradedChain::zero(c.dim());
    for jj in 2..=n {
        for kk in 1..jj {
            let theta = p.theta.entry(jj, kk);
            if theta == 0.0 {
                continue;
            }
            let mut part = GradedChain::zero(c.dim());
            lie_pair_invariant_into(
                &MultiDiff::derivation(jj),
                &MultiDiff::derivation(kk),
                c,
                p,
                &mut part,
            )?;
            out = out.add(&part.scale(C64::new(theta, 0.0)));
        }
    }
    Ok(out)
}

/// Weighted sum of the full pair Lie operators over the deformation matrix.
pub fn weighted_lie_pair_full(c: &Chain, p: &DeformationPoint) -> Result<GradedChain> {
    let n = p.dim();
    let mut out = GradedChain::zero(c.dim());
    for jj in 2..=n {
        for kk in 1..jj {
            let theta = p.theta.entry(jj, kk);
            if theta == 0.0 {
                continue;
            }
            let mut part = GradedChain::zero(c.dim());
            crate::calculus::lie_pair_into(
                &MultiDiff::derivation(jj),
                &MultiDiff::derivation(kk),
                c,
                p,
                &mut part,
            )?;
            out = out.add(&part.scale(C64::new(theta, 0.0)));
        }
    }
    Ok(out)
}

/// Coefficients on the wedge classes of the characteristic cocycles: a
/// finitely supported map from strictly increasing axis subsets to scalars.
///
/// Orientation convention: the generator pair attached to `theta_jk` (with
/// `j > k`) acts as the positively oriented insertion of `{k, j}`; the sign of
/// an insertion counts only crossings with the existing axes.
#[derive(Clone, Debug, PartialEq)]
pub struct WedgeClass {
    n: usize,
    parity: Parity,
    coefficients: BTreeMap<Vec<usize>, C64>,
}

impl WedgeClass {
    pub fn new(n: usize, parity: Parity) -> Self {
        WedgeClass {
            n,
            parity,
            coefficients: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn coefficients(&self) -> impl Iterator<Item = (&Vec<usize>, &C64)> {
        self.coefficients.iter()
    }

    pub fn coefficient(&self, axes: &[usize]) -> C64 {
        self.coefficients
            .get(axes)
            .copied()
            .unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn set(&mut self, axes: Vec<usize>, value: C64) -> Result<()> {
        if axes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Format("axis subsets must be strictly increasing".into()));
        }
        if axes.iter().any(|&j| j == 0 || j > self.n) {
            return Err(Error::Format(format!("axis out of range in {axes:?}")));
        }
        if axes.len() % 2 != if self.parity == Parity::Even { 0 } else { 1 } {
            return Err(Error::Format(format!(
                "subset {axes:?} does not match wedge parity"
            )));
        }
        if value == C64::new(0.0, 0.0) {
            self.coefficients.remove(&axes);
        } else {
            self.coefficients.insert(axes, value);
        }
        Ok(())
    }

    pub fn add_to(&mut self, axes: Vec<usize>, value: C64) -> Result<()> {
        let current = self.coefficient(&axes);
        self.set(axes, current + value)
    }

    pub fn norm_inf(&self) -> f64 {
        self.coefficients
            .values()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    pub fn sub(&self, other: &WedgeClass) -> WedgeClass {
        let mut out = self.clone();
        for (axes, v) in other.coefficients() {
            out.add_to(axes.clone(), -v).expect("same shape");
        }
        out
    }
}

/// Insert the ordered pair `(k, j)` (for `theta_jk`, `j > k`) into a sorted
/// axis subset; `None` when an axis is already present.
fn insert_pair(j: usize, k: usize, axes: &[usize]) -> Option<(Vec<usize>, f64)> {
    if axes.contains(&j) || axes.contains(&k) {
        return None;
    }
    let crossings = axes.iter().filter(|&&s| s < j).count()
        + axes.iter().filter(|&&s| s < k).count();
    let mut merged: Vec<usize> = axes.to_vec();
    merged.push(k);
    merged.push(j);
    merged.sort_unstable();
    let sign = if crossings % 2 == 0 { 1.0 } else { -1.0 };
    Some((merged, sign))
}

/// One application of the generator `2 pi i sum_{j>k} theta_jk (pair_jk ^ .)`.
fn wedge_generator_apply(w: &WedgeClass, theta: &SkewMatrix) -> WedgeClass {
    let n = w.dim();
    let mut out = WedgeClass::new(n, w.parity());
    let two_pi_i = C64::new(0.0, 2.0 * std::f64::consts::PI);
    for (axes, value) in w.coefficients() {
        for j in 2..=n {
            for k in 1..j {
                let theta_jk = theta.entry(j, k);
                if theta_jk == 0.0 {
                    continue;
                }
                if let Some((merged, sign)) = insert_pair(j, k, axes) {
                    out.add_to(merged, value * two_pi_i * theta_jk * sign)
                        .expect("valid subset");
                }
            }
        }
    }
    out
}

/// Parallel transport of a wedge class from `t0` to `t1`: applies
/// `exp(-(t1-t0) * 2 pi i sum_{j>k} theta_jk (pair_jk ^ .))`, a finite sum
/// because wedging is nilpotent.
pub fn gm_transport_wedge(
    w: &WedgeClass,
    t0: f64,
    t1: f64,
    theta: &SkewMatrix,
) -> WedgeClass {
    let dt = t1 - t0;
    let mut out = w.clone();
    let mut term = w.clone();
    let max_steps = theta.dim() / 2 + 1;
    for m in 1..=max_steps {
        term = wedge_generator_apply(&term, theta);
        if term.coefficients().next().is_none() {
            break;
        }
        let coeff = C64::new(
            (-dt).powi(m as i32) / (1..=m).map(|v| v as f64).product::<f64>(),
            0.0,
        );
        let mut scaled = out;
        for (axes, v) in term.coefficients() {
            scaled.add_to(axes.clone(), coeff * v).expect("valid subset");
        }
        out = scaled;
    }
    out
}

/// Subsets of `{1..n}` with the given parity, in lexicographic order: the
/// basis underlying the wedge matrix model.
pub fn wedge_basis(n: usize, parity: Parity) -> Vec<Vec<usize>> {
    let mut subsets: Vec<Vec<usize>> = Vec::new();
    for mask in 0u32..(1 << n) {
        let subset: Vec<usize> = (1..=n).filter(|j| mask & (1 << (j - 1)) != 0).collect();
        let even = subset.len().is_multiple_of(2);
        if even == (parity == Parity::Even) {
            subsets.push(subset);
        }
    }
    subsets.sort();
    subsets
}

/// Matrix of the wedge generator on the parity-`parity` basis, for
/// cross-checking the closed-form transport against the generic nilpotent
/// integrator.
pub fn wedge_generator_matrix(theta: &SkewMatrix, parity: Parity) -> (Vec<Vec<usize>>, CMatrix) {
    let basis = wedge_basis(theta.dim(), parity);
    let index: BTreeMap<Vec<usize>, usize> = basis
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, s)| (s, i))
        .collect();
    let mut m = CMatrix::zero(basis.len());
    let two_pi_i = C64::new(0.0, 2.0 * std::f64::consts::PI);
    for (col, subset) in basis.iter().enumerate() {
        for j in 2..=theta.dim() {
            for k in 1..j {
                let theta_jk = theta.entry(j, k);
                if theta_jk == 0.0 {
                    continue;
                }
                if let Some((merged, sign)) = insert_pair(j, k, subset) {
                    let row = index[&merged];
                    let current = m.get(row, col);
                    m.set(row, col, current + two_pi_i * theta_jk * sign);
                }
            }
        }
    }
    (basis, m)
}

/// A wedge class as a coefficient vector on `wedge_basis`.
pub fn wedge_to_vector(w: &WedgeClass, basis: &[Vec<usize>]) -> Vec<C64> {
    basis.iter().map(|s| w.coefficient(s)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{b_plus_big_b, boundary_b, embed};
    use crate::functional::{gamma, Functional};
    use crate::ode::{nilpotent_transport, vec_norm_inf, vec_sub};
    use crate::torus::TorusElement;

    fn p2(theta: f64, t: f64) -> DeformationPoint {
        DeformationPoint::new(SkewMatrix::two_dim(theta), t)
    }

    fn mi(v: &[i64]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    fn u(j: usize) -> TorusElement {
        TorusElement::generator(2, j).unwrap()
    }

    #[test]
    fn deg_and_projection() {
        let c = embed(&[u(1), u(2)]).unwrap();
        let term = c.terms().next().unwrap().0.clone();
        assert_eq!(deg(1, &term), 1);
        assert!(project_invariant(&c).is_zero());

        let inv = embed(&[TorusElement::monomial(mi(&[1, 0]), C64::new(1.0, 0.0)),
                          TorusElement::monomial(mi(&[-1, 0]), C64::new(1.0, 0.0))])
            .unwrap();
        let term = inv.terms().next().unwrap().0.clone();
        assert_eq!(deg_profile(&term), vec![0, 0]);
        let proj = project_invariant(&inv);
        assert_eq!(proj, inv);
        assert_eq!(project_invariant(&proj), proj);
    }

    #[test]
    fn smoothing_examples() {
        let c = embed(&[u(1), u(1)]).unwrap();
        let n1 = smoothing_n(1, &c);
        assert!(n1.sub(&c.scale(C64::new(0.5, 0.0))).norm_inf() < 1e-15);
        let inv = embed(&[
            TorusElement::monomial(mi(&[1, 0]), C64::new(1.0, 0.0)),
            TorusElement::monomial(mi(&[-1, 0]), C64::new(1.0, 0.0)),
        ])
        .unwrap();
        assert!(smoothing_n(1, &inv).is_zero());
    }

    #[test]
    fn r_poly_examples() {
        let theta = SkewMatrix::two_dim(0.618);
        let factors = vec![mi(&[0, 1]), mi(&[1, 0]), mi(&[0, -1]), mi(&[-1, 0])];
        let r = r_poly(&factors, &theta).unwrap();
        assert!((r - 0.618).abs() < 1e-14);
        let zeros = vec![mi(&[0, 0]); 3];
        assert_eq!(r_poly(&zeros, &theta).unwrap(), 0.0);
        assert_eq!(
            r_poly(&factors, &SkewMatrix::zero(2)).unwrap(),
            0.0
        );
        let bad = vec![mi(&[1, 0]), mi(&[1, 0])];
        assert!(r_poly(&bad, &theta).is_err());
    }

    #[test]
    fn eigenvalue_property() {
        let theta = 0.618;
        let p = p2(theta, 0.3);
        let factors = vec![mi(&[0, 1]), mi(&[1, 0]), mi(&[0, -1]), mi(&[-1, 0])];
        let mut c = Chain::zero(2, 3);
        c.add_term(factors.clone(), C64::new(1.0, 0.0));
        let r = r_poly(&factors, &p.theta).unwrap();
        // invariant form
        let inv_form = weighted_lie_pair_invariant(&c, &p).unwrap();
        let expected = GradedChain::from_chain(c.scale(C64::new(r, 0.0)));
        assert!(inv_form.sub(&expected).norm_inf() < 1e-12);
        // full operator agrees on invariant basis tensors
        let full = weighted_lie_pair_full(&c, &p).unwrap();
        assert!(full.sub(&expected).norm_inf() < 1e-12);
    }

    #[test]
    fn volume_cycle_is_closed_and_invariant() {
        for t in [0.0, 0.35, 1.0] {
            let p = p2(0.618, t);
            let v = volume_cycle(&p).unwrap();
            let b = boundary_b(v.chain(), &p).unwrap();
            assert!(b.norm_inf() < 1e-15, "t = {t}");
        }
    }

    #[test]
    fn transport_identities() {
        let theta = SkewMatrix::two_dim(0.618);
        let p0 = DeformationPoint::new(theta.clone(), 0.2);
        let v = volume_cycle(&p0).unwrap();
        // zero step and zero matrix are the identity
        let same = transport_chain(&v, 0.2, 0.2, &theta).unwrap();
        assert_eq!(same, v);
        let frozen = transport_chain(&v, 0.2, 0.9, &SkewMatrix::zero(2)).unwrap();
        assert_eq!(frozen, v);
        // round trip
        let there = transport_chain(&v, 0.2, 0.9, &theta).unwrap();
        let back = transport_chain(&there, 0.9, 0.2, &theta).unwrap();
        assert!(back.chain().sub(v.chain()).norm_inf() < 1e-12);
    }

    #[test]
    fn transport_is_chain_map() {
        // moving-endpoint form: transport . (b+B at t0) = (b+B at t1) . transport
        let theta = SkewMatrix::two_dim(0.618);
        let (t0, t1) = (0.15, 0.85);
        let p0 = DeformationPoint::new(theta.clone(), t0);
        let p1 = DeformationPoint::new(theta.clone(), t1);
        let v = volume_cycle(&p0).unwrap();
        let g = GradedChain::from_chain(v.chain().clone());
        let lhs = transport_graded(&b_plus_big_b(&g, &p0), t0, t1, &theta).unwrap();
        let rhs = b_plus_big_b(&transport_graded(&g, t0, t1, &theta).unwrap(), &p1);
        let scale = 1.0 + lhs.norm_inf().max(rhs.norm_inf());
        assert!(lhs.sub(&rhs).norm_inf() < 1e-12 * scale);
        // and the transported volume cycle is killed by b at t1
        let moved = transport_chain(&v, t0, t1, &theta).unwrap();
        assert!(boundary_b(moved.chain(), &p1).unwrap().norm_inf() < 1e-13);
    }

    #[test]
    fn pairing_is_transport_invariant() {
        let theta = SkewMatrix::two_dim(0.618);
        let (t0, t1) = (0.1, 0.75);
        let p0 = DeformationPoint::new(theta.clone(), t0);
        let v = volume_cycle(&p0).unwrap();
        let g12 = gamma(&[MultiDiff::derivation(1), MultiDiff::derivation(2)]).unwrap();
        let table0 = FunctionalTable::tabulate(&g12, &v, &p0).unwrap();
        let before = table0.pair(&v);
        let moved_chain = transport_chain(&v, t0, t1, &theta).unwrap();
        let moved_table = transport_table(&table0, t0, t1, &theta).unwrap();
        let after = moved_table.pair(&moved_chain);
        assert!((before - after).norm() < 1e-13);
    }

    #[test]
    fn gamma_tables_are_transport_parallel() {
        // the transported table of gamma at t0 equals the table of gamma at t1
        let theta = SkewMatrix::two_dim(0.618);
        let (t0, t1) = (0.1, 0.65);
        let p0 = DeformationPoint::new(theta.clone(), t0);
        let p1 = DeformationPoint::new(theta.clone(), t1);
        let v = volume_cycle(&p0).unwrap();
        let g12 = gamma(&[MultiDiff::derivation(1), MultiDiff::derivation(2)]).unwrap();
        let moved = transport_table(
            &FunctionalTable::tabulate(&g12, &v, &p0).unwrap(),
            t0,
            t1,
            &theta,
        )
        .unwrap();
        let fresh = FunctionalTable::tabulate(&g12, &v, &p1).unwrap();
        for (factors, value) in moved.entries() {
            assert!((value - fresh.value(factors)).norm() < 1e-13);
        }
        // tau itself is parallel with unit multiplier on the unit cycle
        let tau_table =
            FunctionalTable::tabulate(&Functional::tau(), &unit_cycle(2), &p0).unwrap();
        let moved_tau = transport_table(&tau_table, t0, t1, &theta).unwrap();
        assert_eq!(moved_tau, tau_table);
    }

    #[test]
    fn chi_identity_on_empty_set() {
        let p = p2(0.618, 0.4);
        let v = volume_cycle(&p).unwrap();
        let out = chi_apply(&[], &v, &p).unwrap();
        assert_eq!(out, GradedChain::from_chain(v.chain().clone()));
    }

    #[test]
    fn chi_matches_composed_contractions() {
        let p = p2(0.618, 0.4);
        let v = volume_cycle(&p).unwrap();
        let via_chi = chi_apply(&[1, 2], &v, &p).unwrap();
        let d1 = MultiDiff::derivation(1);
        let d2 = MultiDiff::derivation(2);
        let composed = crate::calculus::apply_cyclic(
            &d1,
            &crate::calculus::apply_cyclic(&d2, &GradedChain::from_chain(v.chain().clone()), &p)
                .unwrap(),
            &p,
        )
        .unwrap();
        assert!(via_chi.sub(&composed).norm_inf() < 1e-14);
        assert!(!via_chi.is_zero());
    }

    #[test]
    fn wedge_transport_examples() {
        let theta_val = 0.618;
        let theta = SkewMatrix::two_dim(theta_val);
        let s = 0.7;
        // [tau] picks up the -2 pi i theta_21 s correction on the pair class
        let mut w = WedgeClass::new(2, Parity::Even);
        w.set(vec![], C64::new(1.0, 0.0)).unwrap();
        let moved = gm_transport_wedge(&w, 0.1, 0.1 + s, &theta);
        assert!((moved.coefficient(&[]) - C64::new(1.0, 0.0)).norm() < 1e-15);
        let expect = C64::new(0.0, -2.0 * std::f64::consts::PI * theta_val * s);
        assert!((moved.coefficient(&[1, 2]) - expect).norm() < 1e-13);
        // zero matrix: identity
        let frozen = gm_transport_wedge(&w, 0.1, 0.9, &SkewMatrix::zero(2));
        assert_eq!(frozen, w);
        // top class is unchanged
        let mut top = WedgeClass::new(2, Parity::Even);
        top.set(vec![1, 2], C64::new(1.0, 0.0)).unwrap();
        let moved_top = gm_transport_wedge(&top, 0.0, 1.0, &theta);
        assert_eq!(moved_top, top);
    }

    #[test]
    fn wedge_transport_matches_nilpotent_matrix_model() {
        let theta = SkewMatrix::new(
            3,
            vec![
                vec![0.0, -0.3, 0.5],
                vec![0.3, 0.0, -0.7],
                vec![-0.5, 0.7, 0.0],
            ],
        )
        .unwrap();
        let (t0, t1) = (0.2, 1.1);
        let mut w = WedgeClass::new(3, Parity::Odd);
        w.set(vec![1], C64::new(1.0, 0.0)).unwrap();
        w.set(vec![3], C64::new(0.0, -2.0)).unwrap();
        let moved = gm_transport_wedge(&w, t0, t1, &theta);
        let (basis, generator) = wedge_generator_matrix(&theta, Parity::Odd);
        let x0 = wedge_to_vector(&w, &basis);
        let expect = nilpotent_transport(
            &generator.scale(C64::new(-1.0, 0.0)),
            &x0,
            t0,
            t1,
        )
        .unwrap();
        let got = wedge_to_vector(&moved, &basis);
        assert!(vec_norm_inf(&vec_sub(&got, &expect)) < 1e-13);
    }
}
