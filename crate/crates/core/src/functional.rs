//! Blow-up functionals and multipliers along solver trajectories.
//!
//! The driving quantity is F(t) = ∫(ρ−1)ψ dx with ψ = e^{−t}φ. Along a
//! classical solution it satisfies
//!
//! ```text
//! F'' + 2F' + μ(1+t)^{−λ}(F' + F) = ∫ tr[(ρu⊗u)∇²ψ] dx + ∫ R(ρ−1)ψ dx
//! ```
//!
//! with the pressure remainder R(p) = ((p+1)^γ − 1)/γ − p, and the nonlinear
//! term dominates ⟨t⟩^{−(n−1)/2}Υ(F). The multipliers m, l, ϖ absorb the
//! damping: m solves m'/m = μ(1+t)^{−λ}; at λ = 1 the functional
//! G = (1+t)^{μ/2}F satisfies the analogous inequality with exponent
//! (n+μ−1)/2. This module records these quantities along a run at a uniform
//! output cadence and checks the identity and the inequalities by finite
//! differences; the inequality checks report minimum ratios rather than
//! asserting constants, since the theory only fixes the constants up to
//! γ- and n-dependent factors.

use crate::grid::unit_sphere_area;
use crate::orlicz::{power_remainder, NFunctionFamily};
use crate::solver::FluidState;
use crate::testfn::{jbracket, TestFunctionContext};
use crate::{Error, Result};

/// R(p) = ((p+1)^γ − 1)/γ − p on [−1, ∞); coincides with Υ on [0, ∞).
pub fn compute_r(p: f64, gamma: f64) -> Result<f64> {
    if p < -1.0 {
        return Err(Error::param("p", format!("R is defined on [−1, ∞), got {p}")));
    }
    Ok(power_remainder(gamma, p))
}

/// Min/max of R(p)/Υ(p) over p ∈ [−0.999, 10] \ {0}; positive and finite.
pub fn r_upsilon_band(fam: &NFunctionFamily, samples: usize) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = 0.0_f64;
    let n = samples.max(16);
    for i in 0..=n {
        let p = -0.999 + 10.999 * i as f64 / n as f64;
        if p.abs() < 1e-9 {
            continue;
        }
        let ratio = power_remainder(fam.gamma(), p) / fam.upsilon(p);
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    (lo, hi)
}

/// m(t): exp(μ(1+t)^{1−λ}/(1−λ)) for λ > 1, and (1+t)^μ in the
/// scale-invariant case λ = 1.
pub fn multiplier_m(t: f64, mu: f64, lambda: f64) -> Result<f64> {
    if lambda > 1.0 {
        Ok((mu * (1.0 + t).powf(1.0 - lambda) / (1.0 - lambda)).exp())
    } else if lambda == 1.0 {
        Ok((1.0 + t).powf(mu))
    } else {
        Err(Error::param("lambda", format!("multiplier needs λ ≥ 1, got {lambda}")))
    }
}

/// l(t) = exp(−μ(2−μ)/(8(1+t))).
pub fn multiplier_l(t: f64, mu: f64) -> f64 {
    (-(mu * (2.0 - mu) / 8.0) / (1.0 + t)).exp()
}

/// ϖ(t) = (1+t)·exp(μ(2−μ)/(16(1+t))).
pub fn multiplier_varpi(t: f64, mu: f64) -> f64 {
    (1.0 + t) * ((mu * (2.0 - mu) / 16.0) / (1.0 + t)).exp()
}

/// The multiplier family for one damping configuration, with finite-difference
/// checks of the ODEs each closed form solves.
#[derive(Debug, Clone, Copy)]
pub struct MultiplierSet {
    pub mu: f64,
    pub lambda: f64,
}

impl MultiplierSet {
    pub fn new(mu: f64, lambda: f64) -> Result<Self> {
        if !(mu >= 0.0) {
            return Err(Error::param("mu", format!("must be ≥ 0, got {mu}")));
        }
        if !(lambda >= 1.0) {
            return Err(Error::param("lambda", format!("must be ≥ 1, got {lambda}")));
        }
        Ok(Self { mu, lambda })
    }

    pub fn m(&self, t: f64) -> f64 {
        multiplier_m(t, self.mu, self.lambda).expect("λ validated ≥ 1")
    }

    pub fn l(&self, t: f64) -> f64 {
        multiplier_l(t, self.mu)
    }

    pub fn varpi(&self, t: f64) -> f64 {
        multiplier_varpi(t, self.mu)
    }

    /// Worst |(log m)'(t) − μ(1+t)^{−λ}| over samples, (log m)' by central
    /// differences.
    pub fn m_ode_residual(&self, times: &[f64]) -> f64 {
        let mut worst = 0.0_f64;
        for &t in times {
            let h = 3e-6 * (1.0 + t);
            let fd = ((self.m(t + h)).ln() - (self.m(t - h).max(f64::MIN_POSITIVE)).ln())
                / (2.0 * h);
            let target = self.mu * (1.0 + t).powf(-self.lambda);
            worst = worst.max((fd - target).abs());
        }
        worst
    }

    /// Worst |(log l)'(t) − μ(2−μ)/8/(1+t)²| over samples.
    pub fn l_ode_residual(&self, times: &[f64]) -> f64 {
        let q = self.mu * (2.0 - self.mu) / 8.0;
        let mut worst = 0.0_f64;
        for &t in times {
            let h = 3e-6 * (1.0 + t);
            let fd = (self.l(t + h).ln() - self.l(t - h).ln()) / (2.0 * h);
            let target = q / ((1.0 + t) * (1.0 + t));
            worst = worst.max((fd - target).abs());
        }
        worst
    }

    /// Worst |(log ϖ)'(t) + ½·l''(t)/l'(t)| over samples, with (log ϖ)' by
    /// central differences and l''/l' in closed form.
    pub fn varpi_ode_residual(&self, times: &[f64]) -> f64 {
        let q = self.mu * (2.0 - self.mu) / 8.0;
        let mut worst = 0.0_f64;
        for &t in times {
            let h = 3e-6 * (1.0 + t);
            let fd = (self.varpi(t + h).ln() - self.varpi(t - h).ln()) / (2.0 * h);
            // l''/l' = q/(1+t)² − 2/(1+t) from the closed form of l.
            let target = -0.5 * (q / ((1.0 + t) * (1.0 + t)) - 2.0 / (1.0 + t));
            worst = worst.max((fd - target).abs());
        }
        worst
    }
}

/// F(t) = ∫(ρ−1)ψ dx over the radial grid, truncated at the causal support
/// radius 1 + t + 5dr (the integrand vanishes beyond it).
pub fn compute_f(state: &FluidState) -> Result<f64> {
    let ctx = TestFunctionContext::new(state.dim)?;
    let rho = state.rho_values();
    let n = state.dim as i32;
    let cut = support_cut(state);
    let mut sum = 0.0;
    for i in 0..=cut {
        let r = i as f64 * state.dr;
        let w = if i == 0 || i == cut { 0.5 } else { 1.0 };
        let psi = (r - state.t).exp() * ctx.phi_scaled(r)?;
        sum += w * (rho[i] - 1.0) * psi * r.powi(n - 1);
    }
    Ok(unit_sphere_area(state.dim) * state.dr * sum)
}

fn support_cut(state: &FluidState) -> usize {
    let idx = ((1.0 + state.t + 5.0 * state.dr) / state.dr).ceil() as usize;
    idx.min(state.len() - 1)
}

/// Scalar diagnostics recorded at one output time.
#[derive(Debug, Clone, Copy)]
pub struct TraceSample {
    pub t: f64,
    /// ∫(ρ−1)ψ dx.
    pub f: f64,
    /// ∫Υ(ρ−1)ψ dx.
    pub rhs_upsilon: f64,
    /// ∫R(ρ−1)ψ dx.
    pub rhs_r: f64,
    /// ∫tr[(ρu⊗u)∇²ψ] dx = ∫ρu²ψ'' dx for radial fields.
    pub flux_quadratic: f64,
    pub mass: f64,
    pub max_gradient: f64,
}

/// Time series of diagnostics along one run, on a uniform cadence.
#[derive(Debug, Clone)]
pub struct FunctionalTrace {
    pub dim: usize,
    pub gamma: f64,
    pub mu: f64,
    pub lambda: f64,
    pub samples: Vec<TraceSample>,
}

impl FunctionalTrace {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    fn ensure_uniform(&self) -> Result<f64> {
        if self.len() < 5 {
            return Err(Error::InsufficientData(format!(
                "trace needs ≥ 5 samples, got {}",
                self.len()
            )));
        }
        let h = self.samples[1].t - self.samples[0].t;
        for w in self.samples.windows(2) {
            let step = w[1].t - w[0].t;
            if ((step - h) / h).abs() > 1e-6 {
                return Err(Error::Precondition(format!(
                    "trace cadence is not uniform: {step} vs {h}"
                )));
            }
        }
        Ok(h)
    }

    /// G(t) = (1+t)^{μ/2} F(t).
    pub fn g(&self, i: usize) -> f64 {
        (1.0 + self.samples[i].t).powf(0.5 * self.mu) * self.samples[i].f
    }

    /// Central-difference first and second derivatives of F on the cadence;
    /// endpoints hold one-sided copies of their neighbors.
    pub fn f_derivatives(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let h = self.ensure_uniform()?;
        let f: Vec<f64> = self.samples.iter().map(|s| s.f).collect();
        Ok(central_derivatives(&f, h))
    }

    /// Max relative residual of the F-identity over interior samples with
    /// t ≤ t_cut: F'' + 2F' + μ(1+t)^{−λ}(F'+F) − flux_quadratic − ∫R(ρ−1)ψ,
    /// normalized by 1 + the largest participating term.
    pub fn check_identity_f(&self, t_cut: f64) -> Result<f64> {
        let h = self.ensure_uniform()?;
        let f: Vec<f64> = self.samples.iter().map(|s| s.f).collect();
        let (df, ddf) = central_derivatives(&f, h);
        let mut worst = 0.0_f64;
        let mut scale = 0.0_f64;
        for i in 1..self.len() - 1 {
            let s = &self.samples[i];
            if s.t > t_cut {
                break;
            }
            let damping = self.mu * (1.0 + s.t).powf(-self.lambda) * (df[i] + s.f);
            let residual = ddf[i] + 2.0 * df[i] + damping - s.flux_quadratic - s.rhs_r;
            worst = worst.max(residual.abs());
            scale = scale
                .max(ddf[i].abs())
                .max((2.0 * df[i]).abs())
                .max(damping.abs())
                .max(s.flux_quadratic.abs())
                .max(s.rhs_r.abs());
        }
        Ok(worst / (1.0 + scale))
    }

    /// Min over t ≤ t_cut of ∫Υ(ρ−1)ψ dx / (⟨t⟩^{−(n−1)/2}·Υ(F)); errors on
    /// nonpositive F.
    pub fn check_nonlinear_lower_bound(
        &self,
        fam: &NFunctionFamily,
        t_cut: f64,
    ) -> Result<f64> {
        if self.is_empty() {
            return Err(Error::InsufficientData("empty trace".into()));
        }
        let decay = -(self.dim as f64 - 1.0) / 2.0;
        let mut min = f64::INFINITY;
        for s in &self.samples {
            if s.t > t_cut {
                break;
            }
            if !(s.f > 0.0) {
                return Err(Error::Precondition(format!(
                    "F(t) must stay positive, got {} at t = {}",
                    s.f, s.t
                )));
            }
            let ratio = s.rhs_upsilon / (jbracket(s.t).powf(decay) * fam.upsilon(s.f));
            min = min.min(ratio);
        }
        Ok(min)
    }

    /// Min over interior t ≤ t_cut of
    /// (G'' + 2G' + μ(2−μ)/4·(1+t)^{−2}G) / (⟨t⟩^{−(n+μ−1)/2}·Υ(G));
    /// requires a λ = 1 trace and positive F.
    pub fn check_g_inequality(&self, fam: &NFunctionFamily, t_cut: f64) -> Result<f64> {
        if self.lambda != 1.0 {
            return Err(Error::Precondition(format!(
                "the G-inequality is for λ = 1 runs, got λ = {}",
                self.lambda
            )));
        }
        let h = self.ensure_uniform()?;
        let g: Vec<f64> = (0..self.len()).map(|i| self.g(i)).collect();
        let (dg, ddg) = central_derivatives(&g, h);
        let massive = self.mu * (2.0 - self.mu) / 4.0;
        let decay = -(self.dim as f64 + self.mu - 1.0) / 2.0;
        let mut min = f64::INFINITY;
        for i in 1..self.len() - 1 {
            let s = &self.samples[i];
            if s.t > t_cut {
                break;
            }
            if !(s.f > 0.0) {
                return Err(Error::Precondition(format!(
                    "F(t) must stay positive, got {} at t = {}",
                    s.f, s.t
                )));
            }
            let lhs = ddg[i] + 2.0 * dg[i] + massive / ((1.0 + s.t) * (1.0 + s.t)) * g[i];
            let rhs = jbracket(s.t).powf(decay) * fam.upsilon(g[i]);
            min = min.min(lhs / rhs);
        }
        Ok(min)
    }
}

fn central_derivatives(f: &[f64], h: f64) -> (Vec<f64>, Vec<f64>) {
    let n = f.len();
    let mut df = vec![0.0; n];
    let mut ddf = vec![0.0; n];
    for i in 1..n - 1 {
        df[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
        ddf[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / (h * h);
    }
    if n >= 3 {
        df[0] = df[1];
        df[n - 1] = df[n - 2];
        ddf[0] = ddf[1];
        ddf[n - 1] = ddf[n - 2];
    }
    (df, ddf)
}

/// Observer that evaluates the functional quadratures at each output time;
/// the φ arrays are cached on the first state it sees.
pub struct TraceRecorder {
    fam: NFunctionFamily,
    mu: f64,
    lambda: f64,
    dim: usize,
    phi_scaled: Vec<f64>,
    phi_second_scaled: Vec<f64>,
    samples: Vec<TraceSample>,
}

impl TraceRecorder {
    pub fn new(dim: usize, gamma: f64, mu: f64, lambda: f64) -> Result<Self> {
        TestFunctionContext::new(dim)?;
        Ok(Self {
            fam: NFunctionFamily::new(gamma)?,
            mu,
            lambda,
            dim,
            phi_scaled: Vec::new(),
            phi_second_scaled: Vec::new(),
            samples: Vec::new(),
        })
    }

    fn ensure_cache(&mut self, state: &FluidState) {
        if self.phi_scaled.len() == state.len() {
            return;
        }
        let ctx = TestFunctionContext::new(self.dim).expect("dim validated");
        self.phi_scaled = (0..state.len())
            .map(|i| ctx.phi_scaled(i as f64 * state.dr).expect("r ≥ 0"))
            .collect();
        self.phi_second_scaled = (0..state.len())
            .map(|i| ctx.phi_second_scaled(i as f64 * state.dr).expect("r ≥ 0"))
            .collect();
    }

    pub fn observe(&mut self, state: &FluidState) {
        self.ensure_cache(state);
        let n = state.dim as i32;
        let cut = support_cut(state);
        let rho = state.rho_values();
        let (mut f, mut up, mut rr, mut flux) = (0.0, 0.0, 0.0, 0.0);
        for i in 0..=cut {
            let r = i as f64 * state.dr;
            let w = if i == 0 || i == cut { 0.5 } else { 1.0 };
            let geom = w * r.powi(n - 1);
            let expfac = (r - state.t).exp();
            let psi = expfac * self.phi_scaled[i];
            let psi_second = expfac * self.phi_second_scaled[i];
            let dev = rho[i] - 1.0;
            f += geom * dev * psi;
            up += geom * self.fam.upsilon(dev) * psi;
            rr += geom * power_remainder(self.fam.gamma(), dev) * psi;
            flux += geom * rho[i] * state.u[i] * state.u[i] * psi_second;
        }
        let area = unit_sphere_area(state.dim) * state.dr;
        self.samples.push(TraceSample {
            t: state.t,
            f: area * f,
            rhs_upsilon: area * up,
            rhs_r: area * rr,
            flux_quadratic: area * flux,
            mass: state.mass(),
            max_gradient: state.max_gradient(),
        });
    }

    pub fn into_trace(self) -> FunctionalTrace {
        FunctionalTrace {
            dim: self.dim,
            gamma: self.fam.gamma(),
            mu: self.mu,
            lambda: self.lambda,
            samples: self.samples,
        }
    }
}
