//! Uniform radial grids and the quadrature rule used for every integral over
//! ℝⁿ in this crate.
//!
//! All fields of interest are radial, so an integral over ℝⁿ reduces to
//! `n·ω_n ∫₀^{r_max} f(r) r^{n−1} dr` with `ω_n` the volume of the unit ball.
//! Integrals are evaluated with the composite trapezoid rule on the nodes
//! `r_i = i·dr`; sums are compensated so that conservation diagnostics are
//! not polluted by accumulation error.

use crate::{Error, Result};

/// Volume of the unit ball in `dim` dimensions (dim ∈ {1,2,3}).
pub fn unit_ball_volume(dim: usize) -> f64 {
    match dim {
        1 => 2.0,
        2 => std::f64::consts::PI,
        3 => 4.0 * std::f64::consts::PI / 3.0,
        _ => panic!("unsupported dimension {dim}"),
    }
}

/// Surface area of the unit sphere in `dim` dimensions, i.e. `n·ω_n`.
pub fn unit_sphere_area(dim: usize) -> f64 {
    dim as f64 * unit_ball_volume(dim)
}

/// Compensated (Kahan) summation.
pub fn kahan_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut carry = 0.0;
    for v in values {
        let y = v - carry;
        let t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    sum
}

/// A scalar field sampled on the uniform radial grid `r_i = i·dr`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGridFunction {
    dim: usize,
    dr: f64,
    values: Vec<f64>,
}

impl RadialGridFunction {
    pub fn new(dim: usize, dr: f64, values: Vec<f64>) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::param("dim", format!("must be 1, 2 or 3, got {dim}")));
        }
        if !(dr > 0.0) || !dr.is_finite() {
            return Err(Error::param("dr", format!("must be positive, got {dr}")));
        }
        if values.len() < 2 {
            return Err(Error::param(
                "values",
                format!("need at least 2 nodes, got {}", values.len()),
            ));
        }
        Ok(Self { dim, dr, values })
    }

    /// Sample `f(r)` on `ceil(r_max/dr)+1` nodes covering `[0, r_max]`.
    pub fn from_fn(dim: usize, dr: f64, r_max: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        if !(r_max > 0.0) {
            return Err(Error::param("r_max", format!("must be positive, got {r_max}")));
        }
        let len = (r_max / dr).ceil() as usize + 1;
        let values = (0..len).map(|i| f(i as f64 * dr)).collect();
        Self::new(dim, dr, values)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn dr(&self) -> f64 {
        self.dr
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn r_max(&self) -> f64 {
        (self.values.len() - 1) as f64 * self.dr
    }

    pub fn radius(&self, i: usize) -> f64 {
        i as f64 * self.dr
    }

    pub fn same_layout(&self, other: &Self) -> bool {
        self.dim == other.dim && self.dr == other.dr && self.values.len() == other.values.len()
    }

    /// `∫_{ℝⁿ} g(u(x)) dx` over the radial grid, for a pointwise map `g`.
    pub fn integrate_map(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.integrate_nodes(|_, v| g(v))
    }

    /// `∫_{ℝⁿ} u(x) dx`.
    pub fn integrate(&self) -> f64 {
        self.integrate_map(|v| v)
    }

    /// Trapezoid quadrature of `h(r, u(r))·r^{n−1}` times the sphere factor.
    pub fn integrate_nodes(&self, h: impl Fn(f64, f64) -> f64) -> f64 {
        let n = self.dim;
        let last = self.values.len() - 1;
        let sum = kahan_sum(self.values.iter().enumerate().map(|(i, &v)| {
            let r = self.radius(i);
            let w = if i == 0 || i == last { 0.5 } else { 1.0 };
            w * h(r, v) * r.powi(n as i32 - 1)
        }));
        unit_sphere_area(n) * self.dr * sum
    }

    /// `∫_{ℝⁿ} u v dx` for two fields on the same layout.
    pub fn inner_product(&self, other: &Self) -> Result<f64> {
        if !self.same_layout(other) {
            return Err(Error::GridMismatch(format!(
                "dim {} dr {} len {} vs dim {} dr {} len {}",
                self.dim,
                self.dr,
                self.values.len(),
                other.dim,
                other.dr,
                other.values.len()
            )));
        }
        let n = self.dim;
        let last = self.values.len() - 1;
        let sum = kahan_sum(self.values.iter().zip(&other.values).enumerate().map(
            |(i, (&a, &b))| {
                let r = self.radius(i);
                let w = if i == 0 || i == last { 0.5 } else { 1.0 };
                w * a * b * r.powi(n as i32 - 1)
            },
        ));
        Ok(unit_sphere_area(n) * self.dr * sum)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            dim: self.dim,
            dr: self.dr,
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if !self.same_layout(other) {
            return Err(Error::GridMismatch("add requires identical layouts".into()));
        }
        Ok(Self {
            dim: self.dim,
            dr: self.dr,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_volumes() {
        assert_eq!(unit_ball_volume(1), 2.0);
        assert!((unit_ball_volume(2) - std::f64::consts::PI).abs() < 1e-15);
        assert!((unit_sphere_area(3) - 4.0 * std::f64::consts::PI).abs() < 1e-14);
    }

    #[test]
    fn rejects_degenerate_grids() {
        assert!(RadialGridFunction::new(1, 0.1, vec![1.0]).is_err());
        assert!(RadialGridFunction::new(4, 0.1, vec![1.0, 1.0]).is_err());
        assert!(RadialGridFunction::new(1, -0.1, vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn constant_integral_matches_ball_volume() {
        // ∫_{|x|≤R} 1 dx = ω_n Rⁿ; the trapezoid rule is exact for r^{n−1}
        // only in 1D, so allow the quadrature error elsewhere.
        for dim in 1..=3 {
            let r = 2.0;
            let g = RadialGridFunction::from_fn(dim, 1e-4, r, |_| 1.0).unwrap();
            let exact = unit_ball_volume(dim) * r.powi(dim as i32);
            let got = g.integrate();
            assert!(
                (got - exact).abs() <= 1e-7 * exact,
                "dim {dim}: {got} vs {exact}"
            );
        }
    }

    #[test]
    fn gaussian_moment_1d() {
        // ∫_ℝ e^{-x²} dx = √π with the symmetric-measure convention.
        let g = RadialGridFunction::from_fn(1, 1e-4, 10.0, |r| (-r * r).exp()).unwrap();
        assert!((g.integrate() - std::f64::consts::PI.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn r_max_is_consistent() {
        let g = RadialGridFunction::new(2, 0.5, vec![0.0; 11]).unwrap();
        assert_eq!(g.r_max(), 5.0);
    }
}
