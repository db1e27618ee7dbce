//! Hochschild cochains as evaluator-backed multilinear operators, with the
//! cup product, Gerstenhaber bracket, and coboundary.
//!
//! A `MultiDiff` of arity `k` sends `k`-tuples of algebra elements (at a
//! deformation point) to an algebra element.  Equality of cochains is
//! extensional: the tests compare values on sample tuples, never structure.

use std::sync::Arc;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::torus::{delta, mul, mul_derivative, DeformationPoint, SkewMatrix, TorusElement};

type Evaluator =
    dyn Fn(&[TorusElement], &DeformationPoint) -> Result<TorusElement> + Send + Sync;

/// Arity-`k` multilinear operator `A^k -> A`.
#[derive(Clone)]
pub struct MultiDiff {
    arity: usize,
    label: String,
    is_derivation: bool,
    /// Normalized cochains vanish whenever an argument is the unit.  The
    /// multiplication map is the one sanctioned non-normalized cochain.
    normalized: bool,
    eval: Arc<Evaluator>,
}

impl std::fmt::Debug for MultiDiff {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "MultiDiff({}, arity {})", self.label, self.arity)
    }
}

impl MultiDiff {
    pub fn from_fn<F>(arity: usize, label: impl Into<String>, normalized: bool, eval: F) -> Self
    where
        F: Fn(&[TorusElement], &DeformationPoint) -> Result<TorusElement> + Send + Sync + 'static,
    {
        MultiDiff {
            arity,
            label: label.into(),
            is_derivation: false,
            normalized,
            eval: Arc::new(eval),
        }
    }

    /// The canonical derivation `delta_j` (1-based axis).
    pub fn derivation(j: usize) -> Self {
        MultiDiff {
            arity: 1,
            label: format!("delta_{j}"),
            is_derivation: true,
            normalized: true,
            eval: Arc::new(move |args, _p| delta(j, &args[0])),
        }
    }

    /// The multiplication map `m`.  Not normalized: `m(1, x) = x`.  Accepted by
    /// the Lie derivative and the bracket, rejected by the cyclic contractions.
    pub fn multiplication() -> Self {
        MultiDiff {
            arity: 2,
            label: "m".into(),
            is_derivation: false,
            normalized: false,
            eval: Arc::new(|args, p| mul(&args[0], &args[1], p)),
        }
    }

    /// The deformation 2-cocycle `E = 2 pi i sum_{j>k} theta_jk delta_j cup delta_k`,
    /// equal to the `t`-derivative of the product.
    pub fn deformation_cocycle(_theta: &SkewMatrix) -> Self {
        MultiDiff {
            arity: 2,
            label: "E".into(),
            is_derivation: false,
            normalized: true,
            eval: Arc::new(move |args, p| mul_derivative(&args[0], &args[1], p)),
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Shift degree `|D| = k - 1`.
    pub fn shift_degree(&self) -> i64 {
        self.arity as i64 - 1
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_derivation(&self) -> bool {
        self.is_derivation
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn evaluate(&self, args: &[TorusElement], p: &DeformationPoint) -> Result<TorusElement> {
        debug_assert_eq!(args.len(), self.arity);
        (self.eval)(args, p)
    }

    pub fn scale(&self, c: C64) -> MultiDiff {
        let inner = self.eval.clone();
        MultiDiff {
            arity: self.arity,
            label: format!("({:+.3}{:+.3}i)*{}", c.re, c.im, self.label),
            is_derivation: self.is_derivation,
            normalized: self.normalized,
            eval: Arc::new(move |args, p| Ok(inner(args, p)?.scale(c))),
        }
    }

    pub fn add(&self, other: &MultiDiff) -> MultiDiff {
        assert_eq!(self.arity, other.arity, "cochain sum needs equal arities");
        let a = self.eval.clone();
        let b = other.eval.clone();
        MultiDiff {
            arity: self.arity,
            label: format!("{}+{}", self.label, other.label),
            is_derivation: self.is_derivation && other.is_derivation,
            normalized: self.normalized && other.normalized,
            eval: Arc::new(move |args, p| Ok(a(args, p)?.add(&b(args, p)?))),
        }
    }

    /// Composition of 1-cochains: `(D . E)(a) = D(E(a))`.
    pub fn compose_linear(&self, other: &MultiDiff) -> MultiDiff {
        assert_eq!(self.arity, 1);
        assert_eq!(other.arity, 1);
        let outer = self.eval.clone();
        let inner = other.eval.clone();
        MultiDiff {
            arity: 1,
            label: format!("{}.{}", self.label, other.label),
            is_derivation: false,
            normalized: other.normalized,
            eval: Arc::new(move |args, p| outer(&[inner(args, p)?], p)),
        }
    }

    pub fn require_derivation(&self) -> Result<()> {
        if self.is_derivation {
            Ok(())
        } else {
            Err(Error::DerivationRequired {
                label: self.label.clone(),
            })
        }
    }

    pub fn require_normalized(&self) -> Result<()> {
        if self.normalized {
            Ok(())
        } else {
            Err(Error::NormalizationRequired {
                label: self.label.clone(),
            })
        }
    }
}

/// Cup product `(D cup E)(a_1..a_{k+l}) = D(a_1..a_k) E(a_{k+1}..a_{k+l})`.
pub fn cup(d: &MultiDiff, e: &MultiDiff) -> MultiDiff {
    let k = d.arity();
    let l = e.arity();
    let dv = d.eval.clone();
    let ev = e.eval.clone();
    MultiDiff {
        arity: k + l,
        label: format!("({} cup {})", d.label, e.label),
        is_derivation: false,
        normalized: d.normalized && e.normalized,
        eval: Arc::new(move |args, p| {
            let left = dv(&args[..k], p)?;
            let right = ev(&args[k..], p)?;
            mul(&left, &right, p)
        }),
    }
}

/// Gerstenhaber circle product.
pub fn circ(d: &MultiDiff, e: &MultiDiff) -> MultiDiff {
    assert!(
        d.arity() >= 1 && e.arity() >= 1,
        "circle product needs arity >= 1"
    );
    let d_shift = d.shift_degree();
    let e_shift = e.shift_degree();
    let arity = (d_shift + e_shift + 1) as usize;
    let e_arity = e.arity();
    let dv = d.eval.clone();
    let ev = e.eval.clone();
    MultiDiff {
        arity,
        label: format!("({} o {})", d.label, e.label),
        is_derivation: false,
        normalized: d.normalized && e.normalized,
        eval: Arc::new(move |args, p| {
            let n = args.len();
            let mut acc = TorusElement::zero(p.dim());
            for i in 0..=d_shift as usize {
                let inner = ev(&args[i..i + e_arity], p)?;
                let mut outer_args: Vec<TorusElement> = Vec::with_capacity(n - e_arity + 1);
                outer_args.extend_from_slice(&args[..i]);
                outer_args.push(inner);
                outer_args.extend_from_slice(&args[i + e_arity..]);
                let sign = if (i as i64 * e_shift) % 2 == 0 { 1.0 } else { -1.0 };
                acc = acc.add(&dv(&outer_args, p)?.scale(C64::new(sign, 0.0)));
            }
            Ok(acc)
        }),
    }
}

/// Gerstenhaber bracket `[D, E] = D o E - (-1)^{|D||E|} E o D`.
pub fn bracket(d: &MultiDiff, e: &MultiDiff) -> MultiDiff {
    let de = circ(d, e);
    let ed = circ(e, d);
    let sign = if (d.shift_degree() * e.shift_degree()) % 2 == 0 {
        -1.0
    } else {
        1.0
    };
    let mut out = de.add(&ed.scale(C64::new(sign, 0.0)));
    out.label = format!("[{}, {}]", d.label, e.label);
    out
}

/// Hochschild coboundary.  Coincides with `[m, D]` (checked in tests).
pub fn hochschild_delta(d: &MultiDiff) -> MultiDiff {
    let k = d.arity();
    let dv = d.eval.clone();
    MultiDiff {
        arity: k + 1,
        label: format!("delta({})", d.label),
        is_derivation: false,
        normalized: d.normalized,
        eval: Arc::new(move |args, p| {
            // delta D(a_1..a_{k+1}) = D(a_1..a_k) a_{k+1}
            //   + (-1)^{k+1} a_1 D(a_2..a_{k+1})
            //   + sum_{j=1}^{k} (-1)^{k-j+1} D(a_1,..,a_j a_{j+1},..,a_{k+1})
            let mut acc = mul(&dv(&args[..k], p)?, &args[k], p)?;
            let tail = dv(&args[1..], p)?;
            let sign = if (k + 1).is_multiple_of(2) { 1.0 } else { -1.0 };
            acc = acc.add(&mul(&args[0], &tail, p)?.scale(C64::new(sign, 0.0)));
            for j in 1..=k {
                let merged = mul(&args[j - 1], &args[j], p)?;
                let mut inner: Vec<TorusElement> = Vec::with_capacity(k);
                inner.extend_from_slice(&args[..j - 1]);
                inner.push(merged);
                inner.extend_from_slice(&args[j + 1..]);
                let sign = if (k - j + 1).is_multiple_of(2) { 1.0 } else { -1.0 };
                acc = acc.add(&dv(&inner, p)?.scale(C64::new(sign, 0.0)));
            }
            Ok(acc)
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::MultiIndex;

    fn p2(theta: f64, t: f64) -> DeformationPoint {
        DeformationPoint::new(SkewMatrix::two_dim(theta), t)
    }

    fn u(j: usize) -> TorusElement {
        TorusElement::generator(2, j).unwrap()
    }

    fn um(v: &[i64]) -> TorusElement {
        TorusElement::monomial(MultiIndex::new(v.to_vec()), C64::new(1.0, 0.0))
    }

    fn sample_elements(seed: u64, count: usize) -> Vec<TorusElement> {
        // tiny deterministic generator for extensional checks
        let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        (0..count)
            .map(|_| {
                let mut e = TorusElement::zero(2);
                for _ in 0..3 {
                    let a = (next() % 7) as i64 - 3;
                    let b = (next() % 7) as i64 - 3;
                    let re = ((next() % 1000) as f64) / 500.0 - 1.0;
                    let im = ((next() % 1000) as f64) / 500.0 - 1.0;
                    e.add_term(MultiIndex::new(vec![a, b]), C64::new(re, im));
                }
                e
            })
            .collect()
    }

    #[test]
    fn cup_examples() {
        let p = p2(0.618, 0.5);
        let d = cup(&MultiDiff::derivation(1), &MultiDiff::derivation(2));
        let v = d.evaluate(&[u(1), u(2)], &p).unwrap();
        assert_eq!(v, um(&[1, 1]));
        assert!(d
            .evaluate(&[TorusElement::one(2), u(1)], &p)
            .unwrap()
            .is_zero());
        assert!(d.evaluate(&[u(2), u(1)], &p).unwrap().is_zero());
    }

    #[test]
    fn cochains_are_multilinear() {
        let p = p2(0.618, 0.5);
        let family = [
            cup(&MultiDiff::derivation(1), &MultiDiff::derivation(2)),
            MultiDiff::deformation_cocycle(&p.theta),
        ];
        let lambda = C64::new(0.7, -1.3);
        let samples = sample_elements(17, 12);
        for d in &family {
            for chunk in samples.chunks(3) {
                if chunk.len() < 3 {
                    continue;
                }
                let (x, y, z) = (&chunk[0], &chunk[1], &chunk[2]);
                let combined = d
                    .evaluate(&[x.scale(lambda).add(y), z.clone()], &p)
                    .unwrap();
                let split = d
                    .evaluate(&[x.clone(), z.clone()], &p)
                    .unwrap()
                    .scale(lambda)
                    .add(&d.evaluate(&[y.clone(), z.clone()], &p).unwrap());
                let scale = 1.0 + combined.norm_inf();
                assert!(combined.sub(&split).norm_inf() < 1e-12 * scale);
            }
        }
    }

    #[test]
    fn bracket_of_commuting_derivations_vanishes() {
        let p = p2(0.618, 0.5);
        let b = bracket(&MultiDiff::derivation(1), &MultiDiff::derivation(2));
        for e in sample_elements(7, 20) {
            assert!(b.evaluate(&[e], &p).unwrap().norm_inf() < 1e-12);
        }
    }

    #[test]
    fn bracket_antisymmetry() {
        let p = p2(0.618, 0.5);
        let d = cup(&MultiDiff::derivation(1), &MultiDiff::derivation(2));
        let e = MultiDiff::derivation(2);
        let de = bracket(&d, &e);
        let ed = bracket(&e, &d);
        // [D, E] = -(-1)^{|D||E|}[E, D]; |D| = 1, |E| = 0
        let samples = sample_elements(11, 8);
        for chunk in samples.chunks(2) {
            if chunk.len() < 2 {
                continue;
            }
            let lhs = de.evaluate(chunk, &p).unwrap();
            let rhs = ed.evaluate(chunk, &p).unwrap();
            assert!(lhs.add(&rhs.scale(C64::new(1.0, 0.0))).norm_inf() < 1e-12);
        }
    }

    #[test]
    fn derivation_bracket_with_cup_vanishes() {
        // [delta_1, delta_1 cup delta_2] = 0: both cup factors are invariant
        let p = p2(0.618, 0.5);
        let b = bracket(
            &MultiDiff::derivation(1),
            &cup(&MultiDiff::derivation(1), &MultiDiff::derivation(2)),
        );
        for chunk in sample_elements(21, 20).chunks(2) {
            if chunk.len() < 2 {
                continue;
            }
            assert!(b.evaluate(chunk, &p).unwrap().norm_inf() < 1e-12);
        }
    }

    #[test]
    fn delta_of_derivation_vanishes() {
        let p = p2(0.618, 0.5);
        let dd = hochschild_delta(&MultiDiff::derivation(1));
        for chunk in sample_elements(3, 10).chunks(2) {
            if chunk.len() < 2 {
                continue;
            }
            assert!(dd.evaluate(chunk, &p).unwrap().norm_inf() < 1e-12);
        }
    }

    #[test]
    fn delta_matches_bracket_with_m() {
        let p = p2(0.618, 0.5);
        let d = cup(&MultiDiff::derivation(1), &MultiDiff::derivation(2));
        let delta_d = hochschild_delta(&d);
        let m_bracket = bracket(&MultiDiff::multiplication(), &d);
        for chunk in sample_elements(5, 30).chunks(3) {
            if chunk.len() < 3 {
                continue;
            }
            let lhs = delta_d.evaluate(chunk, &p).unwrap();
            let rhs = m_bracket.evaluate(chunk, &p).unwrap();
            let scale = 1.0 + lhs.norm_inf().max(rhs.norm_inf());
            assert!(lhs.sub(&rhs).norm_inf() < 1e-10 * scale);
        }
    }

    #[test]
    fn delta_squared_vanishes() {
        let p = p2(0.618, 0.5);
        let d = cup(&MultiDiff::derivation(1), &MultiDiff::derivation(2));
        let dd = hochschild_delta(&hochschild_delta(&d));
        for chunk in sample_elements(9, 16).chunks(4) {
            if chunk.len() < 4 {
                continue;
            }
            let v = dd.evaluate(chunk, &p).unwrap();
            assert!(v.norm_inf() < 1e-10);
        }
    }

    #[test]
    fn deformation_cocycle_examples() {
        let theta = 0.618;
        let t = 0.3;
        let p = p2(theta, t);
        let e = MultiDiff::deformation_cocycle(&p.theta);
        // E(u2, u1) = 2 pi i theta m_t(u2, u1)
        let got = e.evaluate(&[u(2), u(1)], &p).unwrap();
        let expect = mul(&u(2), &u(1), &p)
            .unwrap()
            .scale(C64::new(0.0, 2.0 * std::f64::consts::PI * theta));
        assert!(got.sub(&expect).norm_inf() < 1e-12);
        // normalization and the vanishing slot
        assert!(e
            .evaluate(&[TorusElement::one(2), u(1)], &p)
            .unwrap()
            .is_zero());
        assert!(e
            .evaluate(&[u(1), TorusElement::one(2)], &p)
            .unwrap()
            .is_zero());
        assert!(e.evaluate(&[u(1), u(2)], &p).unwrap().is_zero());
        // E is a cocycle: delta E = 0 on samples
        let de = hochschild_delta(&e);
        for chunk in sample_elements(13, 12).chunks(3) {
            if chunk.len() < 3 {
                continue;
            }
            let v = de.evaluate(chunk, &p).unwrap();
            assert!(v.norm_inf() < 1e-10 * (1.0 + v.norm_inf()));
        }
    }

    #[test]
    fn multiplication_is_rejected_where_normalization_matters() {
        let m = MultiDiff::multiplication();
        assert!(m.require_normalized().is_err());
        assert!(MultiDiff::derivation(1).require_normalized().is_ok());
    }
}
