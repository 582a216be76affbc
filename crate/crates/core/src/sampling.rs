//! Seeded random test fields for the inequality suites.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::grid::RadialGridFunction;

/// RNG used everywhere a suite says "seeded"; one stream per seed.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A smooth compactly-contained random bump: a few Gaussians with random
/// centers, widths, amplitudes and signs, tapered to zero at `r_max`.
pub fn random_bump(
    rng: &mut impl Rng,
    dim: usize,
    dr: f64,
    r_max: f64,
) -> RadialGridFunction {
    let humps: usize = rng.gen_range(1..=3);
    let params: Vec<(f64, f64, f64)> = (0..humps)
        .map(|_| {
            let center = rng.gen_range(0.0..0.6 * r_max);
            let width = rng.gen_range(0.05..0.25) * r_max;
            let amp_log = rng.gen_range(-1.0..1.0);
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            (center, width, sign * 10f64.powf(amp_log))
        })
        .collect();
    RadialGridFunction::from_fn(dim, dr, r_max, |r| {
        let taper = (1.0 - r / r_max).max(0.0);
        params
            .iter()
            .map(|&(c, w, a)| a * (-0.5 * ((r - c) / w).powi(2)).exp())
            .sum::<f64>()
            * taper
    })
    .expect("bump grid parameters are valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bumps_are_reproducible() {
        let a = random_bump(&mut rng(7), 1, 0.01, 3.0);
        let b = random_bump(&mut rng(7), 1, 0.01, 3.0);
        assert_eq!(a, b);
    }

    #[test]
    fn bumps_vanish_at_outer_radius() {
        let g = random_bump(&mut rng(3), 2, 0.01, 3.0);
        assert_eq!(*g.values().last().unwrap(), 0.0);
    }
}
