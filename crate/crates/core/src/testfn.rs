//! The exponential test functions underlying the blow-up functionals.
//!
//! φ is the positive radial solution of Δφ = φ with φ(0) = 1, obtained as the
//! spherical average of e^{x·σ}. It has closed forms in every dimension we
//! support:
//!
//! ```text
//! n = 1:  cosh r
//! n = 2:  I₀(r)          (modified Bessel function of the first kind)
//! n = 3:  sinh(r)/r
//! ```
//!
//! ψ(t, x) = e^{−t} φ(x) then satisfies ψ_t = −ψ and Δψ = ψ. Since φ grows
//! like e^r, every evaluator is also provided in the scaled form e^{−r}φ(r),
//! which stays O(1); bounds like φ(r) ≈ ⟨r⟩^{−(n−1)/2} e^r are checked through
//! the scaled form so that nothing overflows at large radii.

pub mod bessel;

use crate::grid::unit_sphere_area;
use crate::{Error, Result};

/// Japanese bracket ⟨x⟩ = (1 + x²)^{1/2}.
pub fn jbracket(x: f64) -> f64 {
    x.hypot(1.0)
}

/// Evaluation context: the spatial dimension n ∈ {1, 2, 3}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TestFunctionContext {
    dim: usize,
}

impl TestFunctionContext {
    pub fn new(dim: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::param("dim", format!("must be 1, 2 or 3, got {dim}")));
        }
        Ok(Self { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn check_radius(r: f64) -> Result<()> {
        if r < 0.0 || !r.is_finite() {
            return Err(Error::param("r", format!("radius must be ≥ 0, got {r}")));
        }
        Ok(())
    }

    /// φ(r); grows like e^r, prefer [`phi_scaled`](Self::phi_scaled) at large r.
    pub fn phi(&self, r: f64) -> Result<f64> {
        Self::check_radius(r)?;
        Ok(match self.dim {
            1 => r.cosh(),
            2 => bessel::i0(r),
            _ => {
                if r < 1e-4 {
                    1.0 + r * r / 6.0 + r.powi(4) / 120.0
                } else {
                    r.sinh() / r
                }
            }
        })
    }

    /// e^{−r} φ(r), bounded by 1; stable for arbitrarily large r.
    pub fn phi_scaled(&self, r: f64) -> Result<f64> {
        Self::check_radius(r)?;
        Ok(match self.dim {
            1 => 0.5 * (1.0 + (-2.0 * r).exp()),
            2 => bessel::i0_scaled(r),
            _ => {
                if r == 0.0 {
                    1.0
                } else {
                    -(-2.0 * r).exp_m1() / (2.0 * r)
                }
            }
        })
    }

    /// dφ/dr; vanishes at r = 0 and is nonnegative.
    pub fn phi_prime(&self, r: f64) -> Result<f64> {
        Self::check_radius(r)?;
        Ok(match self.dim {
            1 => r.sinh(),
            2 => bessel::i1(r),
            _ => {
                if r < 1e-4 {
                    r / 3.0 + r.powi(3) / 30.0
                } else {
                    (r * r.cosh() - r.sinh()) / (r * r)
                }
            }
        })
    }

    /// e^{−r} dφ/dr.
    pub fn phi_prime_scaled(&self, r: f64) -> Result<f64> {
        Self::check_radius(r)?;
        Ok(match self.dim {
            1 => 0.5 * (1.0 - (-2.0 * r).exp()),
            2 => bessel::i1_scaled(r),
            _ => {
                if r < 0.01 {
                    (r / 3.0 + r.powi(3) / 30.0 + r.powi(5) / 840.0) * (-r).exp()
                } else {
                    ((r - 1.0) + (r + 1.0) * (-2.0 * r).exp()) / (2.0 * r * r)
                }
            }
        })
    }

    /// d²φ/dr² = φ − (n−1)φ'/r, with the limit 1/n at the origin.
    pub fn phi_second(&self, r: f64) -> Result<f64> {
        Self::check_radius(r)?;
        let n = self.dim;
        if r < 1e-4 {
            // Series of φ − (n−1)φ'/r around 0.
            return Ok(match n {
                1 => r.cosh(),
                2 => 0.5 + 3.0 * r * r / 16.0,
                _ => 1.0 / 3.0 + r * r / 10.0,
            });
        }
        Ok(self.phi(r)? - (n as f64 - 1.0) * self.phi_prime(r)? / r)
    }

    /// e^{−r} d²φ/dr².
    pub fn phi_second_scaled(&self, r: f64) -> Result<f64> {
        Self::check_radius(r)?;
        let n = self.dim;
        if r < 1e-4 {
            return Ok(self.phi_second(r)? * (-r).exp());
        }
        Ok(self.phi_scaled(r)? - (n as f64 - 1.0) * self.phi_prime_scaled(r)? / r)
    }

    /// ψ(t, r) = e^{−t} φ(r), evaluated as e^{r−t}·(e^{−r}φ) so that large t
    /// and r never overflow separately.
    pub fn psi(&self, t: f64, r: f64) -> Result<f64> {
        if t < 0.0 {
            return Err(Error::param("t", format!("time must be ≥ 0, got {t}")));
        }
        Ok((r - t).exp() * self.phi_scaled(r)?)
    }

    /// Spherical-average definition of φ evaluated by quadrature; the
    /// independent oracle for the closed forms (n ∈ {2, 3}).
    pub fn sphere_average_oracle(&self, r: f64, points: usize) -> Result<f64> {
        Self::check_radius(r)?;
        let m = points.max(8);
        Ok(match self.dim {
            1 => 0.5 * (r.exp() + (-r).exp()),
            2 => {
                // (1/2π) ∫₀^{2π} e^{r cos θ} dθ, trapezoid on a periodic integrand.
                let h = std::f64::consts::TAU / m as f64;
                let sum: f64 = (0..m).map(|i| (r * (i as f64 * h).cos()).exp()).sum();
                sum / m as f64
            }
            _ => {
                // (1/2) ∫_{−1}^{1} e^{rs} ds by composite Simpson.
                let m = if m % 2 == 0 { m } else { m + 1 };
                let h = 2.0 / m as f64;
                let f = |s: f64| (r * s).exp();
                let mut sum = f(-1.0) + f(1.0);
                for i in 1..m {
                    let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                    sum += w * f(-1.0 + i as f64 * h);
                }
                0.5 * sum * h / 3.0
            }
        })
    }
}

/// Max over `[dr, r_max]` of the relative residual |Δφ − φ|/φ with the radial
/// Laplacian φ'' + (n−1)φ'/r by central differences; O(dr²) for the true φ.
pub fn check_laplacian_identity(
    ctx: &TestFunctionContext,
    r_max: f64,
    dr: f64,
) -> Result<f64> {
    if !(dr > 0.0) || !(r_max > 0.0) || r_max / dr < 100.0 {
        return Err(Error::param(
            "dr",
            format!("degenerate grid: r_max/dr = {}", r_max / dr),
        ));
    }
    let n = ctx.dim() as f64;
    let len = (r_max / dr).floor() as usize;
    let mut worst = 0.0_f64;
    // Work on scaled values; the common e^{-r} factor cancels in the ratio
    // only approximately, so shift each stencil by its own center instead.
    for i in 1..len {
        let r = i as f64 * dr;
        let fm = ctx.phi_scaled(r - dr)? * (-dr).exp();
        let f0 = ctx.phi_scaled(r)?;
        let fp = ctx.phi_scaled(r + dr)? * dr.exp();
        let second = (fp - 2.0 * f0 + fm) / (dr * dr);
        let first = (fp - fm) / (2.0 * dr);
        let residual = ((second + (n - 1.0) / r * first - f0) / f0).abs();
        worst = worst.max(residual);
    }
    Ok(worst)
}

/// ∫_{|x| ≤ 1+t} ψ(t, x)^b dx by radial trapezoid with ~(1+t)/dr cells.
pub fn psi_power_integral(
    t: f64,
    b: f64,
    ctx: &TestFunctionContext,
    dr: f64,
) -> Result<f64> {
    if !(0.0..=2.0).contains(&b) {
        return Err(Error::param("b", format!("exponent must lie in [0,2], got {b}")));
    }
    if t < 0.0 {
        return Err(Error::param("t", format!("time must be ≥ 0, got {t}")));
    }
    let radius = 1.0 + t;
    let cells = ((radius / dr).ceil() as usize).max(2);
    let h = radius / cells as f64;
    let n = ctx.dim();
    let mut sum = 0.0;
    for i in 0..=cells {
        let r = i as f64 * h;
        let w = if i == 0 || i == cells { 0.5 } else { 1.0 };
        // ψ^b = e^{b(r−t)} (e^{−r}φ)^b.
        let v = (b * (r - t)).exp() * ctx.phi_scaled(r)?.powf(b);
        sum += w * v * r.powi(n as i32 - 1);
    }
    Ok(unit_sphere_area(n) * h * sum)
}

/// The integral above divided by ⟨t⟩^{(n−1)(2−b)/2}; lies in a fixed positive
/// band for t ∈ [0, 100].
pub fn psi_power_ratio(t: f64, b: f64, ctx: &TestFunctionContext, dr: f64) -> Result<f64> {
    let integral = psi_power_integral(t, b, ctx, dr)?;
    let exponent = (ctx.dim() as f64 - 1.0) / 2.0 * (2.0 - b);
    Ok(integral / jbracket(t).powf(exponent))
}

/// max_{r ≤ 1+t} ψ(t, r) · ⟨t⟩^{(n−1)/2}, by grid scan; uniformly bounded in t.
pub fn check_psi_sup(t: f64, ctx: &TestFunctionContext) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::param("t", format!("time must be ≥ 0, got {t}")));
    }
    let samples = 4000;
    let radius = 1.0 + t;
    let mut max = 0.0_f64;
    for i in 0..=samples {
        let r = radius * i as f64 / samples as f64;
        max = max.max(ctx.psi(t, r)?);
    }
    Ok(max * jbracket(t).powf((ctx.dim() as f64 - 1.0) / 2.0))
}

/// Min/max of φ(r)·⟨r⟩^{(n−1)/2}·e^{−r} over a sample grid on [0, r_max];
/// the two-sided growth bound says this band is positive and bounded.
pub fn testpro_band(ctx: &TestFunctionContext, r_max: f64, samples: usize) -> Result<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = 0.0_f64;
    for i in 0..=samples {
        let r = r_max * i as f64 / samples as f64;
        let v = ctx.phi_scaled(r)? * jbracket(r).powf((ctx.dim() as f64 - 1.0) / 2.0);
        lo = lo.min(v);
        hi = hi.max(v);
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimension_validation() {
        assert!(TestFunctionContext::new(0).is_err());
        assert!(TestFunctionContext::new(4).is_err());
        assert!(TestFunctionContext::new(2).is_ok());
    }

    #[test]
    fn phi_at_origin_is_one() {
        for n in 1..=3 {
            let ctx = TestFunctionContext::new(n).unwrap();
            assert_eq!(ctx.phi(0.0).unwrap(), 1.0, "n = {n}");
        }
    }

    #[test]
    fn phi_closed_form_values() {
        let c1 = TestFunctionContext::new(1).unwrap();
        assert!((c1.phi(1.0).unwrap() - 1.5430806348152437).abs() < 1e-15);
        let c3 = TestFunctionContext::new(3).unwrap();
        assert!((c3.phi(2.0).unwrap() - 2.0_f64.sinh() / 2.0).abs() < 1e-15);
        assert!((c3.phi(2.0).unwrap() - 1.8134302039).abs() < 1e-9);
    }

    #[test]
    fn phi_rejects_negative_radius() {
        let ctx = TestFunctionContext::new(2).unwrap();
        assert!(ctx.phi(-0.1).is_err());
        assert!(ctx.phi_prime(-1.0).is_err());
    }

    #[test]
    fn phi_prime_zero_at_origin_and_positive() {
        for n in 1..=3 {
            let ctx = TestFunctionContext::new(n).unwrap();
            assert_eq!(ctx.phi_prime(0.0).unwrap(), 0.0);
            assert!(ctx.phi_prime(0.5).unwrap() > 0.0);
        }
        let c1 = TestFunctionContext::new(1).unwrap();
        assert!((c1.phi_prime(1.0).unwrap() - 1.0_f64.sinh()).abs() < 1e-15);
    }

    #[test]
    fn phi_prime_matches_central_difference() {
        let h = 1e-6;
        for n in 1..=3 {
            let ctx = TestFunctionContext::new(n).unwrap();
            for &r in &[0.3, 1.3, 4.0, 9.0] {
                let fd = (ctx.phi(r + h).unwrap() - ctx.phi(r - h).unwrap()) / (2.0 * h);
                let exact = ctx.phi_prime(r).unwrap();
                assert!(
                    (fd - exact).abs() <= 1e-6 * (1.0 + exact.abs()),
                    "n={n} r={r}: fd {fd} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn phi_second_matches_central_difference() {
        let h = 1e-5;
        for n in 1..=3 {
            let ctx = TestFunctionContext::new(n).unwrap();
            for &r in &[0.2, 1.0, 5.0] {
                let fd = (ctx.phi(r + h).unwrap() - 2.0 * ctx.phi(r).unwrap()
                    + ctx.phi(r - h).unwrap())
                    / (h * h);
                let exact = ctx.phi_second(r).unwrap();
                assert!(
                    (fd - exact).abs() <= 1e-4 * (1.0 + exact.abs()),
                    "n={n} r={r}: fd {fd} vs {exact}"
                );
            }
            assert!((ctx.phi_second(0.0).unwrap() - 1.0 / n as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn scaled_forms_are_consistent() {
        for n in 1..=3 {
            let ctx = TestFunctionContext::new(n).unwrap();
            for &r in &[0.0, 1e-5, 0.4, 3.0, 8.5, 20.0] {
                let direct = ctx.phi(r).unwrap() * (-r).exp();
                let scaled = ctx.phi_scaled(r).unwrap();
                assert!(
                    (direct - scaled).abs() <= 1e-13 * scaled,
                    "n={n} r={r}: {direct} vs {scaled}"
                );
                let dp = ctx.phi_prime(r).unwrap() * (-r).exp();
                let sp = ctx.phi_prime_scaled(r).unwrap();
                assert!((dp - sp).abs() <= 1e-12 * (1.0 + sp.abs()), "n={n} r={r}");
            }
        }
    }

    #[test]
    fn psi_values_and_decay() {
        let c3 = TestFunctionContext::new(3).unwrap();
        assert_eq!(c3.psi(0.0, 0.0).unwrap(), 1.0);
        let c1 = TestFunctionContext::new(1).unwrap();
        assert!((c1.psi(1.0, 0.0).unwrap() - (-1.0f64).exp()).abs() < 1e-16);
        let expected = (-2.0f64).exp() * 2.0_f64.sinh() / 2.0;
        assert!((c3.psi(2.0, 2.0).unwrap() - expected).abs() < 1e-15);
        // ψ_t = −ψ: exact by construction, check by finite difference.
        let h = 1e-6;
        let dpsi = (c3.psi(1.0 + h, 2.0).unwrap() - c3.psi(1.0 - h, 2.0).unwrap()) / (2.0 * h);
        assert!((dpsi + c3.psi(1.0, 2.0).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn laplacian_identity_residual_small_and_second_order() {
        for n in 1..=3 {
            let ctx = TestFunctionContext::new(n).unwrap();
            let coarse = check_laplacian_identity(&ctx, 10.0, 2e-3).unwrap();
            let fine = check_laplacian_identity(&ctx, 10.0, 1e-3).unwrap();
            assert!(fine <= 1e-5, "n={n}: residual {fine}");
            let order = (coarse / fine).log2();
            assert!((1.7..=2.3).contains(&order), "n={n}: observed order {order}");
        }
        let ctx = TestFunctionContext::new(1).unwrap();
        assert!(check_laplacian_identity(&ctx, 1.0, 0.5).is_err());
    }

    #[test]
    fn closed_forms_match_sphere_average() {
        for n in 2..=3 {
            let ctx = TestFunctionContext::new(n).unwrap();
            for i in 0..=20 {
                let r = 10.0 * i as f64 / 20.0;
                let oracle = ctx.sphere_average_oracle(r, 4000).unwrap();
                let closed = ctx.phi(r).unwrap();
                assert!(
                    (oracle - closed).abs() <= 1e-8 * closed,
                    "n={n} r={r}: {oracle} vs {closed}"
                );
            }
        }
    }

    #[test]
    fn psi_power_integral_ball_volume_case() {
        let c1 = TestFunctionContext::new(1).unwrap();
        for &t in &[0.0, 1.0, 10.0] {
            let v = psi_power_integral(t, 0.0, &c1, 1e-3).unwrap();
            assert!((v - 2.0 * (1.0 + t)).abs() < 1e-10 * (1.0 + t));
        }
        assert!(psi_power_integral(1.0, 2.5, &c1, 1e-3).is_err());
    }

    #[test]
    fn psi_power_ratio_bands_are_stable() {
        for n in 1..=3 {
            let ctx = TestFunctionContext::new(n).unwrap();
            for &b in &[1.0, 2.0] {
                for &t in &[0.0, 1.0, 10.0, 100.0] {
                    let coarse = psi_power_ratio(t, b, &ctx, 2e-3).unwrap();
                    let fine = psi_power_ratio(t, b, &ctx, 1e-3).unwrap();
                    assert!(coarse > 0.0 && fine > 0.0);
                    assert!(
                        ((coarse - fine) / fine).abs() < 0.1,
                        "n={n} b={b} t={t}: {coarse} vs {fine}"
                    );
                }
            }
        }
    }

    #[test]
    fn psi_sup_bounded_and_uniform() {
        let c1 = TestFunctionContext::new(1).unwrap();
        assert!((check_psi_sup(0.0, &c1).unwrap() - 1.0_f64.cosh()).abs() < 1e-6);
        for n in 1..=3 {
            let ctx = TestFunctionContext::new(n).unwrap();
            let at50 = check_psi_sup(50.0, &ctx).unwrap();
            let at100 = check_psi_sup(100.0, &ctx).unwrap();
            assert!(((at100 - at50) / at50).abs() < 0.1, "n={n}: {at50} vs {at100}");
        }
    }

    #[test]
    fn phi_strictly_increasing() {
        for n in 1..=3 {
            let ctx = TestFunctionContext::new(n).unwrap();
            let mut prev = ctx.phi(0.0).unwrap();
            for i in 1..=500 {
                let v = ctx.phi(i as f64 * 0.02).unwrap();
                assert!(v > prev, "n={n} at r={}", i as f64 * 0.02);
                prev = v;
            }
        }
    }

    #[test]
    fn testpro_band_positive_and_refinement_stable() {
        for n in 1..=3 {
            let ctx = TestFunctionContext::new(n).unwrap();
            let (lo1, hi1) = testpro_band(&ctx, 50.0, 2000).unwrap();
            let (lo2, hi2) = testpro_band(&ctx, 50.0, 4000).unwrap();
            assert!(lo1 > 0.0 && hi1.is_finite());
            assert!((lo1 - lo2).abs() <= 0.05 * lo2 && (hi1 - hi2).abs() <= 0.05 * hi2);
        }
    }
}
