//! Polynomial reconstruction of scalar- and matrix-valued functions.
//!
//! Interpolation runs in a centered/scaled variable so that Chebyshev
//! node sets on O(1) intervals stay well conditioned up to the degrees
//! the transfer matrices require, then coefficients are mapped back to
//! plain monomials for reporting and asymptotics.

use ndarray::prelude::*;
use ndarray_linalg::{Inverse, Solve};

use crate::{Error, Result, C64};

/// Chebyshev points of the first kind mapped to `[a, b]`, ascending.
pub fn chebyshev_nodes(a: f64, b: f64, count: usize) -> Vec<f64> {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut nodes: Vec<f64> = (0..count)
        .map(|k| mid + half * ((2 * k + 1) as f64 * std::f64::consts::PI / (2 * count) as f64).cos())
        .collect();
    nodes.sort_by(|x, y| x.partial_cmp(y).unwrap());
    nodes
}

/// Interpolating polynomial with a held-out residual.
#[derive(Debug, Clone)]
pub struct PolynomialFit {
    pub degree: usize,
    /// Monomial coefficients, ascending in power; length `degree + 1`.
    pub coefficients: Vec<C64>,
    /// Max held-out mismatch relative to the sample scale.
    pub residual: f64,
    /// Set when the node set looked ill-conditioned.
    pub condition_warning: bool,
}

impl PolynomialFit {
    pub fn eval(&self, u: C64) -> C64 {
        poly_eval(&self.coefficients, u)
    }

    /// Leading (degree-top) coefficient, reported separately for
    /// asymptotic checks.
    pub fn leading(&self) -> C64 {
        *self.coefficients.last().expect("non-empty coefficients")
    }

    pub fn derivative(&self) -> PolynomialFit {
        PolynomialFit {
            degree: self.degree.saturating_sub(1),
            coefficients: poly_derivative(&self.coefficients),
            residual: self.residual,
            condition_warning: self.condition_warning,
        }
    }
}

pub fn poly_eval(coeffs: &[C64], u: C64) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        acc = acc * u + c;
    }
    acc
}

pub fn poly_derivative(coeffs: &[C64]) -> Vec<C64> {
    if coeffs.len() <= 1 {
        return vec![C64::new(0.0, 0.0)];
    }
    coeffs[1..]
        .iter()
        .enumerate()
        .map(|(k, &c)| c * ((k + 1) as f64))
        .collect()
}

struct CenteredNodes {
    center: C64,
    scale: f64,
    s: Vec<C64>,
    warning: bool,
}

fn center_nodes(nodes: &[C64], degree: usize) -> CenteredNodes {
    let n = nodes.len() as f64;
    let center = nodes.iter().sum::<C64>() / n;
    let scale = nodes.iter().map(|u| (u - center).norm()).fold(0.0, f64::max).max(1e-12);
    let s: Vec<C64> = nodes.iter().map(|u| (u - center) / scale).collect();
    let mut min_sep = f64::INFINITY;
    for i in 0..s.len() {
        for j in i + 1..s.len() {
            min_sep = min_sep.min((s[i] - s[j]).norm());
        }
    }
    let warning = min_sep < 1e-6 || degree > 40;
    CenteredNodes { center, scale, s, warning }
}

/// Map coefficients in the centered variable `s = (u - c)/h` back to
/// plain monomials in `u`: Horner in polynomial space.
fn uncenter_coeffs(cs: &[C64], center: C64, scale: f64) -> Vec<C64> {
    let mut out: Vec<C64> = vec![C64::new(0.0, 0.0); cs.len()];
    for &a in cs.iter().rev() {
        // out = out * (u - c)/h + a
        let mut next = vec![C64::new(0.0, 0.0); cs.len()];
        for k in (0..cs.len()).rev() {
            let mut v = -center * out[k];
            if k > 0 {
                v += out[k - 1];
            }
            next[k] = v / scale;
        }
        next[0] += a;
        out = next;
    }
    out
}

/// Interpolate the first `degree + 1` samples exactly; any further samples
/// are held out and determine the reported residual.
pub fn fit_polynomial(samples: &[(C64, C64)], degree: usize) -> Result<PolynomialFit> {
    if samples.len() < degree + 1 {
        return Err(Error::ShapeMismatch(format!(
            "fit needs {} samples, got {}",
            degree + 1,
            samples.len()
        )));
    }
    let nodes: Vec<C64> = samples[..degree + 1].iter().map(|p| p.0).collect();
    let cn = center_nodes(&nodes, degree);
    let v = vandermonde(&cn.s, degree);
    let rhs: Array1<C64> = samples[..degree + 1].iter().map(|p| p.1).collect();
    let sol = v.solve(&rhs)?;
    let coeffs = uncenter_coeffs(sol.as_slice().unwrap(), cn.center, cn.scale);
    let scale = samples.iter().map(|p| p.1.norm()).fold(0.0, f64::max).max(1e-300);
    let mut residual = 0.0f64;
    for &(u, y) in &samples[degree + 1..] {
        residual = residual.max((poly_eval(&coeffs, u) - y).norm() / scale);
    }
    Ok(PolynomialFit { degree, coefficients: coeffs, residual, condition_warning: cn.warning })
}

fn vandermonde(s: &[C64], degree: usize) -> Array2<C64> {
    let mut v = Array2::<C64>::zeros((s.len(), degree + 1));
    for (i, &x) in s.iter().enumerate() {
        let mut p = C64::new(1.0, 0.0);
        for j in 0..=degree {
            v[[i, j]] = p;
            p *= x;
        }
    }
    v
}

/// Matrix-valued polynomial in one complex variable.
#[derive(Debug, Clone)]
pub struct MatPoly {
    /// Ascending coefficients; all the same shape.
    pub coeffs: Vec<Array2<C64>>,
}

impl MatPoly {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.coeffs[0].nrows()
    }

    pub fn eval(&self, u: C64) -> Array2<C64> {
        let mut acc = Array2::<C64>::zeros(self.coeffs[0].raw_dim());
        for c in self.coeffs.iter().rev() {
            acc = acc.mapv(|z| z * u) + c;
        }
        acc
    }

    pub fn derivative(&self) -> MatPoly {
        if self.coeffs.len() <= 1 {
            return MatPoly { coeffs: vec![Array2::zeros(self.coeffs[0].raw_dim())] };
        }
        MatPoly {
            coeffs: self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(k, c)| c.mapv(|z| z * ((k + 1) as f64)))
                .collect(),
        }
    }

    pub fn leading(&self) -> &Array2<C64> {
        self.coeffs.last().expect("non-empty")
    }

    /// Drop trailing coefficients that are negligible against the largest.
    pub fn trimmed(mut self, rel_tol: f64) -> MatPoly {
        let scale = self
            .coeffs
            .iter()
            .map(super::fro_norm)
            .fold(0.0, f64::max)
            .max(1e-300);
        while self.coeffs.len() > 1 && super::fro_norm(self.coeffs.last().unwrap()) < rel_tol * scale {
            self.coeffs.pop();
        }
        self
    }
}

/// Exact-degree interpolation of a matrix-valued polynomial from
/// `degree + 1` (or more; extras are checked) sample matrices.
pub fn fit_matrix_polynomial(samples: &[(C64, Array2<C64>)], degree: usize) -> Result<(MatPoly, f64)> {
    if samples.len() < degree + 1 {
        return Err(Error::ShapeMismatch(format!(
            "matrix fit needs {} samples, got {}",
            degree + 1,
            samples.len()
        )));
    }
    let nodes: Vec<C64> = samples[..degree + 1].iter().map(|p| p.0).collect();
    let cn = center_nodes(&nodes, degree);
    let vinv = vandermonde(&cn.s, degree).inv()?;
    let shape = samples[0].1.raw_dim();
    // centered coefficients: c_j = sum_i Vinv[j,i] M_i
    let mut cs: Vec<Array2<C64>> = (0..=degree).map(|_| Array2::zeros(shape)).collect();
    for (j, cj) in cs.iter_mut().enumerate() {
        for i in 0..=degree {
            cj.scaled_add(vinv[[j, i]], &samples[i].1);
        }
    }
    // map back to monomials with the scalar recurrence, lifted to matrices
    let mut out: Vec<Array2<C64>> = (0..=degree).map(|_| Array2::zeros(shape)).collect();
    for a in cs.iter().rev() {
        let mut next: Vec<Array2<C64>> = Vec::with_capacity(degree + 1);
        for k in 0..=degree {
            let mut v = out[k].mapv(|z| z * (-cn.center));
            if k > 0 {
                let prev = out[k - 1].clone();
                v += &prev;
            }
            next.push(v.mapv(|z| z / cn.scale));
        }
        next[0] += a;
        out = next;
    }
    let poly = MatPoly { coeffs: out };
    let scale = samples
        .iter()
        .map(|p| super::fro_norm(&p.1))
        .fold(0.0, f64::max)
        .max(1e-300);
    let mut residual = 0.0f64;
    for (u, m) in &samples[degree + 1..] {
        residual = residual.max(super::fro_norm(&(&poly.eval(*u) - m)) / scale);
    }
    Ok((poly, residual))
}
