//! Normalized Hochschild chains over the torus algebra as sparse combinations
//! of monomial tensors, with the boundary `b` and the degree-raising
//! differential `B`.
//!
//! A degree-`m` basis tensor is a tuple `(alpha^0, ..., alpha^m)` of
//! multi-indices standing for `u^{alpha^0} (x) ... (x) u^{alpha^m}`.  Tensors
//! with an interior factor equal to `1` (index zero in a slot >= 1) are
//! degenerate and identified with zero; construction drops them eagerly.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::torus::{unit_phase, DeformationPoint, MultiIndex, TorusElement};

/// Factor tuple of a basis tensor.
pub type FactorTuple = Vec<MultiIndex>;

/// Even/odd grading of the periodic complex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of_degree(m: usize) -> Parity {
        if m.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn matches(self, m: usize) -> bool {
        Parity::of_degree(m) == self
    }
}

/// Degree-homogeneous chain: finitely supported map from factor tuples to
/// coefficients, all tuples sharing the degree and dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct Chain {
    n: usize,
    degree: usize,
    terms: BTreeMap<FactorTuple, C64>,
}

impl Chain {
    pub fn zero(n: usize, degree: usize) -> Self {
        Chain {
            n,
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FactorTuple, &C64)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, factors: &FactorTuple) -> C64 {
        self.terms
            .get(factors)
            .copied()
            .unwrap_or(C64::new(0.0, 0.0))
    }

    /// Accumulate a term; degenerate tuples (interior zero index) are dropped,
    /// exact-zero coefficients pruned.
    pub fn add_term(&mut self, factors: FactorTuple, c: C64) {
        debug_assert_eq!(factors.len(), self.degree + 1);
        debug_assert!(factors.iter().all(|a| a.dim() == self.n));
        if c == C64::new(0.0, 0.0) {
            return;
        }
        if factors.iter().skip(1).any(|a| a.is_zero()) {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(factors) {
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

    pub fn from_terms(
        n: usize,
        degree: usize,
        entries: impl IntoIterator<Item = (FactorTuple, C64)>,
    ) -> Result<Self> {
        let mut out = Chain::zero(n, degree);
        for (factors, c) in entries {
            if factors.len() != degree + 1 {
                return Err(Error::Format(format!(
                    "factor tuple of length {} in degree-{degree} chain",
                    factors.len()
                )));
            }
            for a in &factors {
                if a.dim() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        got: a.dim(),
                    });
                }
            }
            out.add_term(factors, c);
        }
        Ok(out)
    }

    pub fn scale(&self, c: C64) -> Chain {
        if c == C64::new(0.0, 0.0) {
            return Chain::zero(self.n, self.degree);
        }
        Chain {
            n: self.n,
            degree: self.degree,
            terms: self.terms.iter().map(|(f, v)| (f.clone(), v * c)).collect(),
        }
    }

    pub fn add(&self, other: &Chain) -> Chain {
        let mut out = self.clone();
        for (f, c) in &other.terms {
            out.add_term(f.clone(), *c);
        }
        out
    }

    pub fn sub(&self, other: &Chain) -> Chain {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn norm_inf(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn prune_eps(&self, eps: f64) -> Chain {
        Chain {
            n: self.n,
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .filter(|(_, c)| c.norm() >= eps)
                .map(|(f, c)| (f.clone(), *c))
                .collect(),
        }
    }
}

/// Finitely supported sum of chains of mixed degrees.  This is the natural
/// codomain of the operator calculus: `b + B` and the cyclic contractions move
/// degree by mixed amounts.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedChain {
    n: usize,
    components: BTreeMap<usize, Chain>,
}

impl GradedChain {
    pub fn zero(n: usize) -> Self {
        GradedChain {
            n,
            components: BTreeMap::new(),
        }
    }

    pub fn from_chain(c: Chain) -> Self {
        let mut g = GradedChain::zero(c.dim());
        g.accumulate(c);
        g
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn components(&self) -> impl Iterator<Item = (&usize, &Chain)> {
        self.components.iter()
    }

    pub fn component(&self, degree: usize) -> Option<&Chain> {
        self.components.get(&degree)
    }

    pub fn accumulate(&mut self, c: Chain) {
        if c.is_zero() {
            return;
        }
        let degree = c.degree();
        match self.components.remove(&degree) {
            None => {
                self.components.insert(degree, c);
            }
            Some(existing) => {
                let sum = existing.add(&c);
                if !sum.is_zero() {
                    self.components.insert(degree, sum);
                }
            }
        }
    }

    pub fn add(&self, other: &GradedChain) -> GradedChain {
        let mut out = self.clone();
        for (_, c) in other.components() {
            out.accumulate(c.clone());
        }
        out
    }

    pub fn sub(&self, other: &GradedChain) -> GradedChain {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: C64) -> GradedChain {
        let mut out = GradedChain::zero(self.n);
        for (_, chain) in self.components() {
            out.accumulate(chain.scale(c));
        }
        out
    }

    pub fn norm_inf(&self) -> f64 {
        self.components
            .values()
            .map(|c| c.norm_inf())
            .fold(0.0, f64::max)
    }

    pub fn num_terms(&self) -> usize {
        self.components.values().map(|c| c.num_terms()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }
}

/// Truncation of the periodic complex: components of one parity up to a cap.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicChain {
    n: usize,
    parity: Parity,
    cap: usize,
    components: BTreeMap<usize, Chain>,
}

impl PeriodicChain {
    pub fn new(n: usize, parity: Parity, cap: usize) -> Self {
        PeriodicChain {
            n,
            parity,
            cap,
            components: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn components(&self) -> impl Iterator<Item = (&usize, &Chain)> {
        self.components.iter()
    }

    pub fn component(&self, degree: usize) -> Option<&Chain> {
        self.components.get(&degree)
    }

    pub fn set_component(&mut self, c: Chain) -> Result<()> {
        if !self.parity.matches(c.degree()) || c.degree() > self.cap {
            return Err(Error::Format(format!(
                "component degree {} violates parity/cap of periodic chain",
                c.degree()
            )));
        }
        if c.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: c.dim(),
            });
        }
        if c.is_zero() {
            self.components.remove(&c.degree());
        } else {
            self.components.insert(c.degree(), c);
        }
        Ok(())
    }
}

/// Multilinear expansion of a tuple of elements into the monomial basis.
/// Tuples whose interior slot holds the unit collapse to zero termwise.
pub fn embed(elements: &[TorusElement]) -> Result<Chain> {
    let n = elements
        .first()
        .map(|e| e.dim())
        .ok_or_else(|| Error::Format("embed requires at least one factor".into()))?;
    for e in elements {
        if e.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: e.dim(),
            });
        }
    }
    let degree = elements.len() - 1;
    let mut out = Chain::zero(n, degree);
    let mut stack: Vec<(FactorTuple, C64)> = vec![(Vec::new(), C64::new(1.0, 0.0))];
    for e in elements {
        let mut next = Vec::with_capacity(stack.len() * e.support_size().max(1));
        for (prefix, coeff) in &stack {
            for (alpha, c) in e.terms() {
                let mut f = prefix.clone();
                f.push(alpha.clone());
                next.push((f, coeff * c));
            }
        }
        stack = next;
    }
    for (factors, c) in stack {
        out.add_term(factors, c);
    }
    Ok(out)
}

/// Merge two adjacent monomial factors with the product phase at `p`.
fn merge(a: &MultiIndex, b: &MultiIndex, p: &DeformationPoint) -> (MultiIndex, C64) {
    let phase = p
        .theta
        .phase(a, b)
        .expect("factors share the ambient dimension");
    (a.add(b), unit_phase(phase * p.t))
}

/// Hochschild boundary `b` at the deformation point `p`.
pub fn boundary_b(c: &Chain, p: &DeformationPoint) -> Result<Chain> {
    if c.degree() == 0 {
        return Err(Error::DegreeTooLow {
            required: 1,
            got: 0,
        });
    }
    let m = c.degree();
    let mut out = Chain::zero(c.dim(), m - 1);
    for (factors, coeff) in c.terms() {
        for j in 0..m {
            let (idx, phase) = merge(&factors[j], &factors[j + 1], p);
            let mut f: FactorTuple = Vec::with_capacity(m);
            f.extend_from_slice(&factors[..j]);
            f.push(idx);
            f.extend_from_slice(&factors[j + 2..]);
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            out.add_term(f, coeff * phase * sign);
        }
        // wrap-around term: a_m a_0 in front
        let (idx, phase) = merge(&factors[m], &factors[0], p);
        let mut f: FactorTuple = Vec::with_capacity(m);
        f.push(idx);
        f.extend_from_slice(&factors[1..m]);
        let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
        out.add_term(f, coeff * phase * sign);
    }
    Ok(out)
}

/// Degree-raising differential `B`.
pub fn connes_b(c: &Chain) -> Chain {
    let m = c.degree();
    let mut out = Chain::zero(c.dim(), m + 1);
    for (factors, coeff) in c.terms() {
        for j in 0..=m {
            // (1, a_j, ..., a_m, a_0, ..., a_{j-1}) with sign (-1)^{j m}
            let mut f: FactorTuple = Vec::with_capacity(m + 2);
            f.push(MultiIndex::zero(c.dim()));
            f.extend_from_slice(&factors[j..]);
            f.extend_from_slice(&factors[..j]);
            let sign = if (j * m).is_multiple_of(2) { 1.0 } else { -1.0 };
            out.add_term(f, coeff * sign);
        }
    }
    out
}

/// `b` extended degreewise over a graded chain.
pub fn graded_boundary_b(g: &GradedChain, p: &DeformationPoint) -> GradedChain {
    let mut out = GradedChain::zero(g.dim());
    for (&degree, c) in g.components() {
        if degree >= 1 {
            out.accumulate(boundary_b(c, p).expect("degree checked"));
        }
    }
    out
}

/// `B` extended degreewise over a graded chain.
pub fn graded_connes_b(g: &GradedChain) -> GradedChain {
    let mut out = GradedChain::zero(g.dim());
    for (_, c) in g.components() {
        out.accumulate(connes_b(c));
    }
    out
}

/// The total differential `b + B` of the periodic complex.
pub fn b_plus_big_b(g: &GradedChain, p: &DeformationPoint) -> GradedChain {
    graded_boundary_b(g, p).add(&graded_connes_b(g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::SkewMatrix;

    fn p2(theta: f64, t: f64) -> DeformationPoint {
        DeformationPoint::new(SkewMatrix::two_dim(theta), t)
    }

    fn u(j: usize) -> TorusElement {
        TorusElement::generator(2, j).unwrap()
    }

    fn mi(v: &[i64]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    #[test]
    fn embed_examples() {
        let c = embed(&[u(1), u(2)]).unwrap();
        assert_eq!(c.num_terms(), 1);
        assert_eq!(
            c.coefficient(&vec![mi(&[1, 0]), mi(&[0, 1])]),
            C64::new(1.0, 0.0)
        );

        // x (x) 1 is degenerate for any x
        let d = embed(&[u(1).add(&u(2)), TorusElement::one(2)]).unwrap();
        assert!(d.is_zero());

        // bilinear expansion keeps the leading unit factor
        let e = embed(&[u(1).add(&TorusElement::one(2)), u(2)]).unwrap();
        assert_eq!(e.num_terms(), 2);
        assert_eq!(
            e.coefficient(&vec![mi(&[0, 0]), mi(&[0, 1])]),
            C64::new(1.0, 0.0)
        );
        assert_eq!(
            e.coefficient(&vec![mi(&[1, 0]), mi(&[0, 1])]),
            C64::new(1.0, 0.0)
        );
    }

    #[test]
    fn boundary_examples() {
        let theta = 0.618;
        let t = 1.0;
        let p = p2(theta, t);
        // b(u1 (x) u2) = (1 - exp(2 pi i theta t)) u^{(1,1)}
        let c = embed(&[u(1), u(2)]).unwrap();
        let b = boundary_b(&c, &p).unwrap();
        assert_eq!(b.degree(), 0);
        let got = b.coefficient(&vec![mi(&[1, 1])]);
        let expect = C64::new(1.0, 0.0) - unit_phase(theta * t);
        assert!((got - expect).norm() < 1e-15);

        // b(1 (x) u1) = u1 - u1 = 0
        let c = embed(&[TorusElement::one(2), u(1)]).unwrap();
        assert!(boundary_b(&c, &p).unwrap().is_zero());

        // degree-0 input is rejected
        let c0 = embed(&[u(1)]).unwrap();
        assert!(boundary_b(&c0, &p).is_err());
    }

    #[test]
    fn connes_b_examples() {
        // B(u^alpha) = 1 (x) u^alpha for alpha != 0
        let c = embed(&[u(1)]).unwrap();
        let b = connes_b(&c);
        assert_eq!(b.num_terms(), 1);
        assert_eq!(
            b.coefficient(&vec![mi(&[0, 0]), mi(&[1, 0])]),
            C64::new(1.0, 0.0)
        );

        // B(1) = 0 (degenerate output)
        let one = embed(&[TorusElement::one(2)]).unwrap();
        assert!(connes_b(&one).is_zero());
    }

    #[test]
    fn differentials_square_to_zero_small() {
        let p = p2(0.618, 0.7);
        let c = embed(&[
            u(1).add(&u(2).scale(C64::new(0.5, -1.0))),
            u(2),
            u(1).add(&TorusElement::one(2)),
            TorusElement::monomial(mi(&[-1, 2]), C64::new(0.0, 1.0)),
        ])
        .unwrap();
        let bb = boundary_b(&boundary_b(&c, &p).unwrap(), &p).unwrap();
        assert!(bb.norm_inf() < 1e-12);
        let big_bb = connes_b(&connes_b(&c));
        assert!(big_bb.norm_inf() < 1e-12);
        let anti = boundary_b(&connes_b(&c), &p)
            .unwrap()
            .add(&connes_b(&boundary_b(&c, &p).unwrap()));
        assert!(anti.norm_inf() < 1e-12);
    }
}
