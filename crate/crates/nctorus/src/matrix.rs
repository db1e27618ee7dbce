//! Square matrices over the torus algebra and exact inverses for the
//! invertibles used by the odd Chern character.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::torus::{mul, DeformationPoint, MultiIndex, TorusElement};

/// An `N x N` matrix of torus elements, all sharing the ambient dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixElement {
    n: usize,
    size: usize,
    entries: Vec<TorusElement>,
}

impl MatrixElement {
    pub fn zero(n: usize, size: usize) -> Self {
        MatrixElement {
            n,
            size,
            entries: vec![TorusElement::zero(n); size * size],
        }
    }

    pub fn identity(n: usize, size: usize) -> Self {
        let mut m = Self::zero(n, size);
        for i in 0..size {
            m.set(i, i, TorusElement::one(n));
        }
        m
    }

    /// A 1x1 matrix wrapping a scalar element.
    pub fn scalar(x: TorusElement) -> Self {
        let n = x.dim();
        MatrixElement {
            n,
            size: 1,
            entries: vec![x],
        }
    }

    pub fn from_rows(rows: Vec<Vec<TorusElement>>) -> Result<Self> {
        let size = rows.len();
        let n = rows
            .first()
            .and_then(|r| r.first())
            .map(|e| e.dim())
            .unwrap_or(0);
        let mut entries = Vec::with_capacity(size * size);
        for row in rows {
            if row.len() != size {
                return Err(Error::SizeMismatch {
                    expected: size,
                    got: row.len(),
                });
            }
            for e in row {
                if e.dim() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        got: e.dim(),
                    });
                }
                entries.push(e);
            }
        }
        Ok(MatrixElement { n, size, entries })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> &TorusElement {
        &self.entries[i * self.size + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: TorusElement) {
        self.entries[i * self.size + j] = x;
    }

    pub fn scale(&self, c: C64) -> MatrixElement {
        MatrixElement {
            n: self.n,
            size: self.size,
            entries: self.entries.iter().map(|e| e.scale(c)).collect(),
        }
    }

    pub fn add(&self, other: &MatrixElement) -> MatrixElement {
        MatrixElement {
            n: self.n,
            size: self.size,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &MatrixElement) -> MatrixElement {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn norm_inf(&self) -> f64 {
        self.entries.iter().map(|e| e.norm_inf()).fold(0.0, f64::max)
    }

    /// Entrywise application of `delta_j`.
    pub fn delta(&self, j: usize) -> Result<MatrixElement> {
        let entries = self
            .entries
            .iter()
            .map(|e| crate::torus::delta(j, e))
            .collect::<Result<Vec<_>>>()?;
        Ok(MatrixElement {
            n: self.n,
            size: self.size,
            entries,
        })
    }
}

/// Matrix product over the fiber algebra at `p`.
pub fn mat_mul(
    x: &MatrixElement,
    y: &MatrixElement,
    p: &DeformationPoint,
) -> Result<MatrixElement> {
    if x.size() != y.size() {
        return Err(Error::SizeMismatch {
            expected: x.size(),
            got: y.size(),
        });
    }
    let size = x.size();
    let mut out = MatrixElement::zero(p.dim(), size);
    for i in 0..size {
        for j in 0..size {
            let mut acc = TorusElement::zero(p.dim());
            for k in 0..size {
                acc = acc.add(&mul(x.get(i, k), y.get(k, j), p)?);
            }
            out.set(i, j, acc);
        }
    }
    Ok(out)
}

/// `(tr (x) tau)(X) = sum_i tau(X_ii)`.
pub fn mat_trace(x: &MatrixElement) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..x.size() {
        acc += x.get(i, i).trace();
    }
    acc
}

fn is_monomial_unit(e: &TorusElement) -> bool {
    e.support_size() == 1
}

fn is_exact_one(e: &TorusElement) -> bool {
    e.support_size() == 1
        && e.coefficient(&MultiIndex::zero(e.dim())) == C64::new(1.0, 0.0)
}

/// Exact inverse of a triangular matrix whose diagonal entries are monomial
/// units.  Works for upper and lower triangular shapes; verified by
/// multiplication on both sides.
pub fn invert_unitriangular(
    v: &MatrixElement,
    p: &DeformationPoint,
) -> Result<MatrixElement> {
    let size = v.size();
    let upper = (0..size).all(|i| (0..i).all(|j| v.get(i, j).is_zero()));
    let lower = (0..size).all(|i| (i + 1..size).all(|j| v.get(i, j).is_zero()));
    if !upper && !lower {
        return Err(Error::NotUnitriangular);
    }
    if !(0..size).all(|i| is_monomial_unit(v.get(i, i))) {
        return Err(Error::NotUnitriangular);
    }

    // v = d (1 + r) with r = d^{-1} (v - d) strictly triangular, so
    // v^{-1} = (sum_k (-r)^k) d^{-1}, a finite sum.
    let mut d_inv = MatrixElement::zero(v.dim(), size);
    for i in 0..size {
        d_inv.set(i, i, crate::torus::invert_monomial_unit(v.get(i, i), p)?);
    }
    let mut off = v.clone();
    for i in 0..size {
        off.set(i, i, TorusElement::zero(v.dim()));
    }
    let r = mat_mul(&d_inv, &off, p)?;
    let mut neumann = MatrixElement::identity(v.dim(), size);
    let mut power = MatrixElement::identity(v.dim(), size);
    for k in 1..size {
        power = mat_mul(&power, &r, p)?;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        neumann = neumann.add(&power.scale(C64::new(sign, 0.0)));
    }
    let inv = mat_mul(&neumann, &d_inv, p)?;

    let id = MatrixElement::identity(v.dim(), size);
    let left = mat_mul(&inv, v, p)?.sub(&id).norm_inf();
    let right = mat_mul(v, &inv, p)?.sub(&id).norm_inf();
    let defect = left.max(right);
    let scale = 1.0 + v.norm_inf();
    if defect > 1e-12 * scale {
        return Err(Error::InverseDefect { defect });
    }
    Ok(inv)
}

/// Inverse for the shapes the library can invert exactly: 1x1 monomial units
/// and triangular matrices with monomial-unit diagonals.
pub fn try_invert(v: &MatrixElement, p: &DeformationPoint) -> Result<MatrixElement> {
    if v.size() == 1 && is_monomial_unit(v.get(0, 0)) {
        return Ok(MatrixElement::scalar(crate::torus::invert_monomial_unit(
            v.get(0, 0),
            p,
        )?));
    }
    invert_unitriangular(v, p)
}

/// True when every diagonal entry is exactly `1` and the matrix is triangular:
/// the conjugators used by idempotent sections.
pub fn is_strictly_unitriangular(v: &MatrixElement) -> bool {
    let size = v.size();
    let upper = (0..size).all(|i| (0..i).all(|j| v.get(i, j).is_zero()));
    let lower = (0..size).all(|i| (i + 1..size).all(|j| v.get(i, j).is_zero()));
    (upper || lower) && (0..size).all(|i| is_exact_one(v.get(i, i)))
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

    #[test]
    fn identity_and_trace() {
        let p = p2(0.618, 1.0);
        let id = MatrixElement::identity(2, 3);
        let x = {
            let mut m = MatrixElement::zero(2, 3);
            m.set(0, 1, u(1));
            m.set(2, 0, u(2).scale(C64::new(0.0, 2.0)));
            m.set(1, 1, TorusElement::one(2));
            m
        };
        assert_eq!(mat_mul(&id, &x, &p).unwrap(), x);
        assert_eq!(mat_mul(&x, &id, &p).unwrap(), x);
        assert_eq!(mat_trace(&id), C64::new(3.0, 0.0));
    }

    #[test]
    fn single_entry_product() {
        let p = p2(0.618, 1.0);
        let mut x = MatrixElement::zero(2, 2);
        x.set(0, 1, u(1));
        let mut y = MatrixElement::zero(2, 2);
        y.set(1, 0, u(2));
        let xy = mat_mul(&x, &y, &p).unwrap();
        assert_eq!(*xy.get(0, 0), mul(&u(1), &u(2), &p).unwrap());
        assert!(xy.get(0, 1).is_zero());
        assert!(xy.get(1, 0).is_zero());
        assert!(xy.get(1, 1).is_zero());
    }

    #[test]
    fn unitriangular_inverse() {
        let p = p2(0.618, 0.8);
        let mut v = MatrixElement::identity(2, 2);
        v.set(0, 1, u(1));
        let inv = invert_unitriangular(&v, &p).unwrap();
        assert_eq!(*inv.get(0, 1), u(1).scale(C64::new(-1.0, 0.0)));

        // 3x3 with monomial diagonal and two off-diagonal entries
        let mut w = MatrixElement::zero(2, 3);
        w.set(0, 0, TorusElement::one(2));
        w.set(1, 1, u(1));
        w.set(2, 2, TorusElement::monomial(
            MultiIndex::new(vec![1, -2]),
            C64::new(0.5, 0.5),
        ));
        w.set(0, 1, u(2));
        w.set(1, 2, u(1).scale(C64::new(0.0, -1.0)));
        let winv = invert_unitriangular(&w, &p).unwrap();
        let id = MatrixElement::identity(2, 3);
        assert!(mat_mul(&winv, &w, &p).unwrap().sub(&id).norm_inf() < 1e-13);
        assert!(mat_mul(&w, &winv, &p).unwrap().sub(&id).norm_inf() < 1e-13);

        let mut bad = MatrixElement::identity(2, 2);
        bad.set(0, 1, u(1));
        bad.set(1, 0, u(2));
        assert!(invert_unitriangular(&bad, &p).is_err());
    }
}
