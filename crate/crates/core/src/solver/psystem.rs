//! Independent 1D cross-check backend in Lagrangian coordinates.
//!
//! The p-system
//!
//! ```text
//! v_t − u_x = 0
//! u_t + p(v)_x + μ(1+t)^{−λ} u = 0,    p(v) = v^{−γ}/γ
//! ```
//!
//! is the mass-coordinate form of the 1D isentropic system, with specific
//! volume v = 1/ρ and Lagrangian sound speed v^{−(γ+1)/2}. The scheme family
//! matches the Eulerian backend (MUSCL/minmod, local Lax–Friedrichs, Heun,
//! exact damping factor in Strang order) but shares no state with it, so the
//! two lifespans cross-validate each other. Around the background v = 1 the
//! mass coordinate coincides with the Eulerian radius to O(ε), well inside
//! the 15% agreement budget of the cross-check.

use super::{DampingParams, InitialDataFamily, LifespanRecord, RunConfig, TerminationReason};
use crate::grid::kahan_sum;
use crate::{Error, Result};

const NGHOST: usize = 2;
const FRONT_BUFFER: usize = 4;
const DT_MIN_FACTOR: f64 = 1e-12;

/// Lagrangian state and workspaces; v even, u odd across x = 0.
pub struct PSystemSolver {
    gamma: f64,
    damping: DampingParams,
    cfl: f64,
    dx: f64,
    len: usize,
    t: f64,
    v: Vec<f64>,
    u: Vec<f64>,
    v_stage: Vec<f64>,
    u_stage: Vec<f64>,
    slope_v: Vec<f64>,
    slope_u: Vec<f64>,
    flux_v: Vec<f64>,
    flux_u: Vec<f64>,
    dv: Vec<f64>,
    du: Vec<f64>,
}

/// What one p-system step did.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PStepEvent {
    Advanced { dt: f64 },
    DtCollapse,
    /// Specific volume left (0, ∞): vacuum or collapse.
    VolumeFloor,
}

impl PSystemSolver {
    pub fn new(
        fam: &InitialDataFamily,
        gamma: f64,
        damping: DampingParams,
        dx: f64,
        x_max: f64,
        cfl: f64,
    ) -> Result<Self> {
        if !(gamma > 1.0) {
            return Err(Error::param("gamma", format!("must exceed 1, got {gamma}")));
        }
        if !(cfl > 0.0 && cfl < 1.0) {
            return Err(Error::param("cfl", format!("must lie in (0,1), got {cfl}")));
        }
        if dx > 1.0 / 200.0 {
            return Err(Error::param("dx", "unit interval needs ≥ 200 cells"));
        }
        let len = (x_max / dx).round() as usize + 1;
        if len < 16 {
            return Err(Error::param("x_max", "grid too short"));
        }
        let padded = len + NGHOST;
        let mut v = vec![1.0; padded];
        let mut u = vec![0.0; padded];
        for i in 0..len {
            let x = i as f64 * dx;
            let rho0 = fam.rho_profile(x);
            if rho0 != 0.0 {
                let rho = 1.0 + fam.epsilon * rho0;
                if rho <= 0.0 {
                    return Err(Error::Precondition("nonpositive initial density".into()));
                }
                v[NGHOST + i] = 1.0 / rho;
            }
            let u0 = fam.u_profile(x);
            if u0 != 0.0 {
                u[NGHOST + i] = fam.epsilon * u0;
            }
        }
        let zeros = vec![0.0; padded];
        Ok(Self {
            gamma,
            damping,
            cfl,
            dx,
            len,
            t: 0.0,
            v,
            u,
            v_stage: zeros.clone(),
            u_stage: zeros.clone(),
            slope_v: zeros.clone(),
            slope_u: zeros.clone(),
            flux_v: zeros.clone(),
            flux_u: zeros.clone(),
            dv: zeros.clone(),
            du: zeros,
        })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    fn active_window(&self) -> usize {
        let front = ((1.0 + self.t) / self.dx).ceil() as usize + FRONT_BUFFER;
        front.min(self.len - 3)
    }

    /// p(v) = v^{−γ}/γ.
    #[inline]
    fn pressure(&self, v: f64) -> f64 {
        self.pow_neg_gamma(v) / self.gamma
    }

    #[inline]
    fn pow_neg_gamma(&self, v: f64) -> f64 {
        if self.gamma == 2.0 {
            1.0 / (v * v)
        } else if self.gamma == 3.0 {
            1.0 / (v * v * v)
        } else if self.gamma == 1.5 {
            1.0 / (v * v.sqrt())
        } else {
            v.powf(-self.gamma)
        }
    }

    /// Lagrangian characteristic speed √(−p'(v)) = v^{−(γ+1)/2}.
    #[inline]
    fn char_speed(&self, v: f64) -> f64 {
        if self.gamma == 2.0 {
            // v^{-3/2}
            1.0 / (v * v.sqrt())
        } else if self.gamma == 3.0 {
            1.0 / (v * v)
        } else {
            v.powf(-0.5 * (self.gamma + 1.0))
        }
    }

    /// ∫ v dx over the (symmetric, doubled) line by compensated trapezoid.
    pub fn volume_integral(&self) -> f64 {
        let last = self.len - 1;
        let sum = kahan_sum((0..self.len).map(|i| {
            let w = if i == 0 || i == last { 0.5 } else { 1.0 };
            w * self.v[NGHOST + i]
        }));
        2.0 * self.dx * sum
    }

    pub fn max_gradient(&self) -> f64 {
        self.diagnostics().max_gradient
    }

    /// Same diagnostics sweep as the Eulerian backend, on (v − 1, u).
    pub fn diagnostics(&self) -> super::StateDiagnostics {
        let w = self.active_window();
        let mut grad = 0.0_f64;
        let mut jump = 0.0_f64;
        let mut amp = 0.0_f64;
        for i in 1..w {
            let a = NGHOST + i;
            grad = grad
                .max((self.v[a + 1] - self.v[a - 1]).abs() + (self.u[a + 1] - self.u[a - 1]).abs());
            jump = jump.max((self.v[a] - self.v[a - 1]).abs() + (self.u[a] - self.u[a - 1]).abs());
            amp = amp.max((self.v[a] - 1.0).abs() + self.u[a].abs());
        }
        super::StateDiagnostics {
            max_gradient: grad / (2.0 * self.dx),
            max_cell_jump: jump,
            amplitude: amp,
        }
    }

    pub fn step(&mut self, dt_cap: f64) -> Result<PStepEvent> {
        let w = self.active_window();
        let mut speed = 1.0_f64;
        for a in NGHOST..NGHOST + w {
            speed = speed.max(self.char_speed(self.v[a]));
        }
        let mut dt = self.cfl * self.dx / speed;
        if dt < DT_MIN_FACTOR * self.dx {
            return Ok(PStepEvent::DtCollapse);
        }
        if dt_cap > 0.0 {
            dt = dt.min(dt_cap);
        }
        let t0 = self.t;
        let t_mid = t0 + 0.5 * dt;
        let t1 = t0 + dt;

        let decay = self.damping.decay_factor(t0, t_mid);
        if decay != 1.0 {
            for a in NGHOST..NGHOST + w {
                self.u[a] *= decay;
            }
        }

        self.compute_rhs(false, w)?;
        for a in NGHOST..NGHOST + w {
            self.v_stage[a] = self.v[a] + dt * self.dv[a];
            self.u_stage[a] = self.u[a] + dt * self.du[a];
            if self.v_stage[a] <= 0.0 {
                return Ok(PStepEvent::VolumeFloor);
            }
        }
        self.compute_rhs(true, w)?;
        for a in NGHOST..NGHOST + w {
            self.v[a] = 0.5 * (self.v[a] + self.v_stage[a] + dt * self.dv[a]);
            self.u[a] = 0.5 * (self.u[a] + self.u_stage[a] + dt * self.du[a]);
            if self.v[a] <= 0.0 {
                return Ok(PStepEvent::VolumeFloor);
            }
        }

        let decay = self.damping.decay_factor(t_mid, t1);
        if decay != 1.0 {
            for a in NGHOST..NGHOST + w {
                self.u[a] *= decay;
            }
        }
        self.t = t1;
        Ok(PStepEvent::Advanced { dt })
    }

    fn compute_rhs(&mut self, stage: bool, w: usize) -> Result<()> {
        if stage {
            for a in 0..NGHOST {
                self.v_stage[a] = self.v[a];
                self.u_stage[a] = self.u[a];
            }
            for a in NGHOST + w..self.v.len() {
                self.v_stage[a] = self.v[a];
                self.u_stage[a] = self.u[a];
            }
        }
        let hi = (NGHOST + w + 3).min(self.v.len());
        {
            let (v, u): (&mut [f64], &mut [f64]) = if stage {
                (&mut self.v_stage, &mut self.u_stage)
            } else {
                (&mut self.v, &mut self.u)
            };
            // Mirror ghosts: v even, u odd.
            for g in 0..NGHOST {
                let src = NGHOST + (NGHOST - g);
                v[g] = v[src];
                u[g] = -u[src];
            }
            for a in 1..hi - 1 {
                self.slope_v[a] = super::minmod(v[a] - v[a - 1], v[a + 1] - v[a]);
                self.slope_u[a] = super::minmod(u[a] - u[a - 1], u[a + 1] - u[a]);
            }
        }
        let (v, u): (&[f64], &[f64]) = if stage {
            (&self.v_stage, &self.u_stage)
        } else {
            (&self.v, &self.u)
        };
        for k in NGHOST - 1..NGHOST + w {
            let v_l = v[k] + 0.5 * self.slope_v[k];
            let u_l = u[k] + 0.5 * self.slope_u[k];
            let v_r = v[k + 1] - 0.5 * self.slope_v[k + 1];
            let u_r = u[k + 1] - 0.5 * self.slope_u[k + 1];
            if v_l <= 0.0 || v_r <= 0.0 {
                return Err(Error::Precondition("reconstructed volume nonpositive".into()));
            }
            let s = self.char_speed(v_l).max(self.char_speed(v_r));
            // Fluxes (−u, p(v)) with LLF dissipation.
            self.flux_v[k] = 0.5 * (-u_l - u_r) - 0.5 * s * (v_r - v_l);
            self.flux_u[k] =
                0.5 * (self.pressure(v_l) + self.pressure(v_r)) - 0.5 * s * (u_r - u_l);
        }
        let inv_dx = 1.0 / self.dx;
        for a in NGHOST..NGHOST + w {
            self.dv[a] = -(self.flux_v[a] - self.flux_v[a - 1]) * inv_dx;
            self.du[a] = -(self.flux_u[a] - self.flux_u[a - 1]) * inv_dx;
        }
        Ok(())
    }
}

/// Lifespan measurement with the Lagrangian backend; mirrors
/// [`run_lifespan`](super::run_lifespan) for n = 1.
pub fn run_psystem_1d(cfg: &RunConfig, fam: &InitialDataFamily) -> Result<LifespanRecord> {
    cfg.validate()?;
    if cfg.dim != 1 {
        return Err(Error::param("dim", "the p-system backend is 1D only"));
    }
    let x_max = 1.0 + cfg.horizon + 10.0 * cfg.dr;
    let mut solver = PSystemSolver::new(fam, cfg.gamma, cfg.damping, cfg.dr, x_max, cfg.cfl)?;
    let g0 = solver.max_gradient().max(1e-300);
    let mut peak = g0;
    let mut steps = 0u64;
    let (reason, t_blow) = loop {
        let diag = solver.diagnostics();
        peak = peak.max(diag.max_gradient);
        if diag.triggered(&cfg.detection, g0) {
            break (TerminationReason::GradientThreshold, solver.t());
        }
        if solver.t() >= cfg.horizon {
            break (TerminationReason::HorizonReached, solver.t());
        }
        match solver.step(cfg.horizon - solver.t())? {
            PStepEvent::Advanced { .. } => steps += 1,
            PStepEvent::DtCollapse => break (TerminationReason::DtCollapse, solver.t()),
            PStepEvent::VolumeFloor => break (TerminationReason::DensityFloor, solver.t()),
        }
    };
    Ok(LifespanRecord {
        epsilon: fam.epsilon,
        t_blow,
        reason,
        dr: cfg.dr,
        cfl: cfg.cfl,
        steps,
        gradient_initial: g0,
        gradient_peak: peak,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::DetectionMode;

    fn cfg(horizon: f64) -> RunConfig {
        RunConfig {
            dim: 1,
            gamma: 2.0,
            damping: DampingParams::new(1.0, 1.0).unwrap(),
            dr: 2e-3,
            cfl: 0.4,
            horizon,
            detection: DetectionMode::default(),
        }
    }

    #[test]
    fn constant_state_never_blows_up() {
        let fam = InitialDataFamily::standard(0.0);
        let record = run_psystem_1d(&cfg(1.0), &fam).unwrap();
        assert_eq!(record.reason, TerminationReason::HorizonReached);
    }

    #[test]
    fn volume_integral_conserved_per_step() {
        let fam = InitialDataFamily::standard(0.05);
        let mut solver = PSystemSolver::new(
            &fam,
            2.0,
            DampingParams::new(1.0, 1.0).unwrap(),
            2e-3,
            4.0,
            0.4,
        )
        .unwrap();
        let mut prev = solver.volume_integral();
        for _ in 0..200 {
            solver.step(f64::INFINITY).unwrap();
            let m = solver.volume_integral();
            assert!(((m - prev) / prev).abs() < 1e-10, "drift {}", (m - prev) / prev);
            prev = m;
        }
    }

    #[test]
    fn rejects_non_1d_use() {
        let mut c = cfg(1.0);
        c.dim = 2;
        assert!(run_psystem_1d(&c, &InitialDataFamily::standard(0.05)).is_err());
    }
}
