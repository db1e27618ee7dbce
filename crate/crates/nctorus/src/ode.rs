//! Parallel-transport utilities on finite-dimensional fibers: the truncated
//! iterated-integral (Dyson) solution of a linear ODE and the finite
//! exponential for nilpotent generators.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Dense complex matrix, row-major.  Just enough linear algebra for transport.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zero(dim: usize) -> Self {
        CMatrix {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zero(dim);
        for i in 0..dim {
            m.data[i * dim + i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Format("matrix rows must be square".into()));
        }
        Ok(CMatrix {
            dim,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.dim];
        for i in 0..self.dim {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..self.dim {
                acc += self.data[i * self.dim + j] * x[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        let dim = self.dim;
        let mut out = CMatrix::zero(dim);
        for i in 0..dim {
            for k in 0..dim {
                let a = self.data[i * dim + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..dim {
                    out.data[i * dim + j] += a * other.data[k * dim + j];
                }
            }
        }
        out
    }

    pub fn scale(&self, c: C64) -> CMatrix {
        CMatrix {
            dim: self.dim,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        CMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn norm_inf(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

pub fn vec_norm_inf(x: &[C64]) -> f64 {
    x.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

pub fn vec_sub(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// A smooth family of linear maps `t -> F_t` on a `dim`-dimensional fiber.
pub struct LinearFamily {
    dim: usize,
    eval: Box<dyn Fn(f64) -> CMatrix + Send + Sync>,
}

impl LinearFamily {
    pub fn new<F>(dim: usize, eval: F) -> Self
    where
        F: Fn(f64) -> CMatrix + Send + Sync + 'static,
    {
        LinearFamily {
            dim,
            eval: Box::new(eval),
        }
    }

    pub fn constant(f: CMatrix) -> Self {
        let dim = f.dim();
        LinearFamily {
            dim,
            eval: Box::new(move |_| f.clone()),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn at(&self, t: f64) -> CMatrix {
        (self.eval)(t)
    }
}

/// Cumulative integral of grid samples with fourth-order accuracy: composite
/// Simpson at even nodes, a three-point Newton-Cotes correction on the last
/// interval at odd nodes.
fn cumulative_integral(values: &[Vec<C64>], h: f64) -> Vec<Vec<C64>> {
    let dim = values[0].len();
    let len = values.len();
    let mut out = vec![vec![C64::new(0.0, 0.0); dim]; len];
    for i in 1..len {
        if i == 1 {
            // quadratic through the first three nodes, integrated on [0, h]
            for d in 0..dim {
                out[1][d] = (values[0][d] * 5.0 + values[1][d] * 8.0 - values[2][d])
                    * (h / 12.0);
            }
        } else if i % 2 == 0 {
            for d in 0..dim {
                out[i][d] = out[i - 2][d]
                    + (values[i - 2][d] + values[i - 1][d] * 4.0 + values[i][d]) * (h / 3.0);
            }
        } else {
            for d in 0..dim {
                out[i][d] = out[i - 1][d]
                    + (-values[i - 2][d] + values[i - 1][d] * 8.0 + values[i][d] * 5.0)
                        * (h / 12.0);
            }
        }
    }
    out
}

/// Truncated iterated-integral solution of `x' = F_t x`, `x(t0) = x0`:
///
/// ```text
/// x(t1) ~ x0 + sum_{m=1}^{K} int_{t0}^{t1} int_{t0}^{s_1} ... F_{s_1}...F_{s_m}(x0) ds
/// ```
///
/// evaluated by iterated one-dimensional quadrature on a shared grid with
/// `quad_steps` intervals (rounded up to even).  Returns the order-`K` value
/// together with the norm of the last term, a residual estimate.
pub fn dyson_transport(
    family: &LinearFamily,
    x0: &[C64],
    t0: f64,
    t1: f64,
    order: usize,
    quad_steps: usize,
) -> Result<(Vec<C64>, f64)> {
    if order < 1 {
        return Err(Error::Format("dyson transport needs order >= 1".into()));
    }
    if quad_steps < 2 {
        return Err(Error::Format("dyson transport needs quad_steps >= 2".into()));
    }
    if x0.len() != family.dim() {
        return Err(Error::SizeMismatch {
            expected: family.dim(),
            got: x0.len(),
        });
    }
    if t1 == t0 {
        return Ok((x0.to_vec(), 0.0));
    }
    let steps = quad_steps + quad_steps % 2;
    let h = (t1 - t0) / steps as f64;
    let grid: Vec<f64> = (0..=steps).map(|i| t0 + h * i as f64).collect();
    let mats: Vec<CMatrix> = grid.iter().map(|&s| family.at(s)).collect();

    // g_0(s) = x0;  g_m(s) = int_{t0}^{s} F_{s'} g_{m-1}(s') ds';  the order-m
    // Dyson term is g_m(t1).
    let mut level: Vec<Vec<C64>> = vec![x0.to_vec(); steps + 1];
    let mut acc = x0.to_vec();
    let mut last_term_norm = 0.0;
    for _m in 1..=order {
        let integrand: Vec<Vec<C64>> = (0..=steps).map(|i| mats[i].matvec(&level[i])).collect();
        level = cumulative_integral(&integrand, h);
        let term = &level[steps];
        last_term_norm = vec_norm_inf(term);
        for (a, v) in acc.iter_mut().zip(term) {
            *a += v;
        }
    }
    Ok((acc, last_term_norm))
}

/// Smallest `k <= dim` with `|F^k| <= tol`, if any.
pub fn nilpotency_index(f: &CMatrix, tol: f64) -> Option<usize> {
    let mut power = f.clone();
    for k in 1..=f.dim() {
        if power.norm_inf() <= tol {
            return Some(k);
        }
        power = power.matmul(f);
    }
    None
}

/// Exact transport `exp((t1 - t0) F) x0` for nilpotent `F`: the exponential is
/// the finite sum `sum_{m=0}^{k-1} (t1-t0)^m / m! F^m`.
pub fn nilpotent_transport(
    f: &CMatrix,
    x0: &[C64],
    t0: f64,
    t1: f64,
) -> Result<Vec<C64>> {
    if x0.len() != f.dim() {
        return Err(Error::SizeMismatch {
            expected: f.dim(),
            got: x0.len(),
        });
    }
    let k = nilpotency_index(f, 1e-12).ok_or_else(|| {
        let mut power = f.clone();
        for _ in 1..f.dim() {
            power = power.matmul(f);
        }
        Error::NotNilpotent {
            power: f.dim(),
            norm: power.norm_inf(),
        }
    })?;
    let dt = t1 - t0;
    let mut acc = x0.to_vec();
    let mut term = x0.to_vec();
    for m in 1..k {
        term = f.matvec(&term);
        let coeff = C64::new(dt.powi(m as i32) / (1..=m).map(|v| v as f64).product::<f64>(), 0.0);
        for (a, v) in acc.iter_mut().zip(&term) {
            *a += coeff * v;
        }
    }
    Ok(acc)
}

/// Matrix exponential by scaling-and-squaring Taylor summation.  Serves as the
/// reference value for the Dyson integrator; shares no code with it.
pub fn matrix_exponential(f: &CMatrix) -> CMatrix {
    let norm = f.norm_inf();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = f.scale(C64::new(1.0 / 2f64.powi(squarings as i32), 0.0));
    let mut acc = CMatrix::identity(f.dim());
    let mut term = CMatrix::identity(f.dim());
    for m in 1..=24 {
        term = term.matmul(&scaled).scale(C64::new(1.0 / m as f64, 0.0));
        acc = acc.add(&term);
    }
    for _ in 0..squarings {
        acc = acc.matmul(&acc);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_family_matches_exponential() {
        let f = CMatrix::from_rows(vec![
            vec![C64::new(0.1, 0.3), C64::new(-0.4, 0.0), C64::new(0.0, 0.2), C64::new(0.5, -0.1)],
            vec![C64::new(0.2, 0.0), C64::new(0.0, -0.3), C64::new(0.3, 0.1), C64::new(0.0, 0.0)],
            vec![C64::new(-0.1, 0.1), C64::new(0.2, 0.2), C64::new(0.1, 0.0), C64::new(-0.3, 0.0)],
            vec![C64::new(0.0, -0.2), C64::new(0.1, 0.0), C64::new(0.0, 0.4), C64::new(-0.2, 0.1)],
        ])
        .unwrap();
        let x0 = vec![
            C64::new(1.0, 0.0),
            C64::new(0.0, -1.0),
            C64::new(0.5, 0.5),
            C64::new(-0.25, 0.0),
        ];
        let (t0, t1) = (0.0, 1.5);
        let family = LinearFamily::constant(f.clone());
        let (got, residual) = dyson_transport(&family, &x0, t0, t1, 20, 64).unwrap();
        let expect = matrix_exponential(&f.scale(C64::new(t1 - t0, 0.0))).matvec(&x0);
        assert!(vec_norm_inf(&vec_sub(&got, &expect)) < 1e-9);
        assert!(residual < 1e-12);
    }

    #[test]
    fn time_dependent_nilpotent_family() {
        // F_t = t N with N^2 = 0: x(t1) = (1 + (t1^2 - t0^2)/2 N) x0
        let mut n = CMatrix::zero(2);
        n.set(0, 1, C64::new(1.0, 0.0));
        let n_clone = n.clone();
        let family = LinearFamily::new(2, move |t| n_clone.scale(C64::new(t, 0.0)));
        let x0 = vec![C64::new(0.3, -0.2), C64::new(1.0, 0.5)];
        let (t0, t1) = (0.25, 1.25);
        let (got, _) = dyson_transport(&family, &x0, t0, t1, 8, 64).unwrap();
        let coeff = C64::new((t1 * t1 - t0 * t0) / 2.0, 0.0);
        let expect = vec![x0[0] + coeff * x0[1], x0[1]];
        assert!(vec_norm_inf(&vec_sub(&got, &expect)) < 1e-10);
    }

    #[test]
    fn zero_interval_is_identity() {
        let family = LinearFamily::constant(CMatrix::identity(3));
        let x0 = vec![C64::new(1.0, 2.0); 3];
        let (got, residual) = dyson_transport(&family, &x0, 0.7, 0.7, 5, 16).unwrap();
        assert_eq!(got, x0);
        assert_eq!(residual, 0.0);
    }

    #[test]
    fn nilpotent_examples() {
        let zero = CMatrix::zero(3);
        let x0 = vec![C64::new(1.0, 0.0), C64::new(2.0, 0.0), C64::new(3.0, 0.0)];
        assert_eq!(nilpotent_transport(&zero, &x0, 0.0, 2.0).unwrap(), x0);

        let mut f = CMatrix::zero(2);
        f.set(0, 1, C64::new(1.0, 0.0));
        let s = 0.8;
        let got = nilpotent_transport(&f, &x0[..2], 0.0, s).unwrap();
        let expect = vec![x0[0] + C64::new(s, 0.0) * x0[1], x0[1]];
        assert!(vec_norm_inf(&vec_sub(&got, &expect)) < 1e-15);

        assert!(nilpotent_transport(&CMatrix::identity(2), &x0[..2], 0.0, 1.0).is_err());
    }

    #[test]
    fn nilpotent_agrees_with_dyson() {
        let mut f = CMatrix::zero(3);
        f.set(0, 1, C64::new(0.7, -0.1));
        f.set(1, 2, C64::new(-0.3, 0.4));
        let x0 = vec![C64::new(1.0, 1.0), C64::new(0.0, -2.0), C64::new(0.5, 0.0)];
        let exact = nilpotent_transport(&f, &x0, 0.1, 1.4).unwrap();
        let family = LinearFamily::constant(f);
        let (dyson, _) = dyson_transport(&family, &x0, 0.1, 1.4, 12, 64).unwrap();
        assert!(vec_norm_inf(&vec_sub(&exact, &dyson)) < 1e-10);
    }

    #[test]
    fn residual_decreases_with_order() {
        let f = CMatrix::from_rows(vec![
            vec![C64::new(0.0, 0.9), C64::new(0.4, 0.0)],
            vec![C64::new(-0.4, 0.0), C64::new(0.0, -0.9)],
        ])
        .unwrap();
        let family = LinearFamily::constant(f);
        let x0 = vec![C64::new(1.0, 0.0), C64::new(0.0, 1.0)];
        let mut last = f64::INFINITY;
        for order in [2, 4, 6, 8, 10, 14] {
            let (_, residual) = dyson_transport(&family, &x0, 0.0, 1.0, order, 64).unwrap();
            assert!(residual <= last + 1e-15, "residual grew at order {order}");
            last = residual;
        }
        assert!(last < 1e-10);
    }
}
