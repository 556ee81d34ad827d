//! Particle swarm search over symbol-point locations, minimizing the
//! analytical BER bound under the average-energy constraint.
//!
//! RNG use is split into one counter-based stream per (iteration, particle),
//! so fitness evaluations can run concurrently without changing results.

use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bound::evaluate_bound;
use crate::channel::{ChannelContext, Fading};
use crate::codec::{Constellation, SuperTrellis};
use crate::error::{Error, Result};

/// Whether a particle keeps a candidate position only when it does not fall
/// behind its personal best (greedy), or always moves and lets the personal
/// best do the bookkeeping (standard PSO).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AcceptanceRule {
    Greedy,
    Standard,
}

/// Swarm configuration. Defaults: 50 particles, 500 iterations,
/// c1 = c2 = 1.49, inertia decayed linearly from 0.9 to 0.4, greedy
/// acceptance, unit energy budget.
#[derive(Debug, Clone, PartialEq)]
pub struct PsoConfig {
    pub swarm_size: usize,
    pub iterations: usize,
    pub cognitive: f64,
    pub social: f64,
    pub inertia_start: f64,
    pub inertia_end: f64,
    pub energy_budget: f64,
    pub acceptance: AcceptanceRule,
    pub seed: u64,
}

impl Default for PsoConfig {
    fn default() -> Self {
        Self {
            swarm_size: 50,
            iterations: 500,
            cognitive: 1.49,
            social: 1.49,
            inertia_start: 0.9,
            inertia_end: 0.4,
            energy_budget: 1.0,
            acceptance: AcceptanceRule::Greedy,
            seed: 0,
        }
    }
}

impl PsoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.swarm_size < 2 {
            return Err(Error::InvalidConfig("swarm size must be >= 2".into()));
        }
        if self.iterations < 1 {
            return Err(Error::InvalidConfig("iterations must be >= 1".into()));
        }
        if self.cognitive <= 0.0 || self.social <= 0.0 {
            return Err(Error::InvalidConfig("c1 and c2 must be positive".into()));
        }
        if !(self.inertia_end > 0.0 && self.inertia_end <= self.inertia_start) {
            return Err(Error::InvalidConfig(
                "inertia must satisfy 0 < w_end <= w_start".into(),
            ));
        }
        if self.energy_budget <= 0.0 {
            return Err(Error::InvalidConfig("energy budget must be positive".into()));
        }
        Ok(())
    }
}

/// One swarm member in the 2M-dimensional search space (interleaved
/// re/im of the M symbol points).
#[derive(Debug, Clone)]
pub struct Particle {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub personal_best_position: Vec<f64>,
    pub personal_best_fitness: f64,
}

/// Search outcome: the energy-projected best constellation, its bound value,
/// the context it was designed for, and the best-fitness trace (one entry
/// for the initial swarm plus one per iteration).
#[derive(Debug, Clone)]
pub struct OptimizedConstellation {
    pub constellation: Constellation,
    pub fitness: f64,
    pub fading: Fading,
    pub avg_snr_db: f64,
    pub modulation_order: usize,
    pub best_fitness_trace: Vec<f64>,
}

/// Uniform rescale onto the average-energy budget: identity when the mean
/// symbol energy is already within `e_s`, otherwise scale every point by
/// `sqrt(e_s / mean)` so ratios and angles are preserved.
pub fn project_energy(points: &[Complex64], e_s: f64) -> Vec<Complex64> {
    let mean = points.iter().map(|p| p.norm_sqr()).sum::<f64>() / points.len() as f64;
    if mean <= e_s || mean == 0.0 {
        return points.to_vec();
    }
    let scale = (e_s / mean).sqrt();
    points.iter().map(|&p| p * scale).collect()
}

fn decode_position(position: &[f64]) -> Vec<Complex64> {
    position
        .chunks(2)
        .map(|c| Complex64::new(c[0], c[1]))
        .collect()
}

/// Bound-based fitness of a position: decode, project onto the energy
/// budget, and evaluate the BER bound. Divergent or numerically failed
/// bounds map to +infinity, so the function is total.
pub fn fitness(position: &[f64], ctx: &ChannelContext, trellis: &SuperTrellis) -> f64 {
    let points = project_energy(&decode_position(position), ctx.e_s);
    let constellation = match Constellation::new(points) {
        Ok(c) => c,
        Err(_) => return f64::INFINITY,
    };
    match evaluate_bound(trellis, &constellation, ctx) {
        Ok(r) if !r.divergent => r.p_b_bound,
        _ => f64::INFINITY,
    }
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Initialize the swarm: particle 0 warm-starts at the conventional square
/// QAM (scaled to the energy budget); the rest are uniform in
/// `[-sqrt(3 E_s), +sqrt(3 E_s)]` per coordinate and then energy-projected.
/// Velocities are uniform in `[-0.1, 0.1] * sqrt(E_s)`.
pub fn init_swarm(cfg: &PsoConfig, modulation_order: usize) -> Result<Vec<Particle>> {
    cfg.validate()?;
    let conventional = Constellation::conventional(modulation_order)?;
    let dim = 2 * modulation_order;
    let amp = cfg.energy_budget.sqrt();
    let pos_span = 3f64.sqrt() * amp;
    let vel_span = 0.1 * amp;
    let mut swarm = Vec::with_capacity(cfg.swarm_size);
    for i in 0..cfg.swarm_size {
        let mut rng = stream_rng(cfg.seed, i as u64);
        let position = if i == 0 {
            let scaled: Vec<Complex64> =
                conventional.points().iter().map(|&p| p * amp).collect();
            project_energy(&scaled, cfg.energy_budget)
                .iter()
                .flat_map(|p| [p.re, p.im])
                .collect()
        } else {
            // Unit draws scaled by hand so the whole swarm scales exactly
            // with sqrt(E_s).
            let mut sym = || (2.0 * rng.gen::<f64>() - 1.0) * pos_span;
            let raw: Vec<Complex64> = (0..modulation_order)
                .map(|_| Complex64::new(sym(), sym()))
                .collect();
            project_energy(&raw, cfg.energy_budget)
                .iter()
                .flat_map(|p| [p.re, p.im])
                .collect()
        };
        let velocity: Vec<f64> = (0..dim)
            .map(|_| (2.0 * rng.gen::<f64>() - 1.0) * vel_span)
            .collect();
        swarm.push(Particle {
            personal_best_position: position.clone(),
            position,
            velocity,
            personal_best_fitness: f64::INFINITY,
        });
    }
    Ok(swarm)
}

/// Run the swarm and return the best constellation found.
///
/// Per iteration, each particle updates
/// `v <- w v + r1 c1 (g_i - x) + r2 c2 (g_p - x)` and `x <- x + v` against
/// the previous iteration's global best (synchronous update); under the
/// greedy rule the move is kept only if it does not worsen the particle's
/// personal best. Fully deterministic for a given seed.
pub fn pso_optimize(
    cfg: &PsoConfig,
    ctx: &ChannelContext,
    trellis: &SuperTrellis,
    modulation_order: usize,
) -> Result<OptimizedConstellation> {
    cfg.validate()?;
    if trellis.modulation_order() != modulation_order {
        return Err(Error::InvalidConfig(format!(
            "trellis symbol alphabet {} does not match modulation order {}",
            trellis.modulation_order(),
            modulation_order
        )));
    }
    if (cfg.energy_budget - ctx.e_s).abs() > 1e-12 * ctx.e_s {
        return Err(Error::InvalidConfig(format!(
            "energy budget {} does not match channel e_s {}",
            cfg.energy_budget, ctx.e_s
        )));
    }

    let mut swarm = init_swarm(cfg, modulation_order)?;
    let initial: Vec<f64> = swarm
        .par_iter()
        .map(|p| fitness(&p.position, ctx, trellis))
        .collect();
    for (p, &f) in swarm.iter_mut().zip(&initial) {
        p.personal_best_fitness = f;
    }

    let mut best_fitness = f64::INFINITY;
    let mut best_position = swarm[0].personal_best_position.clone();
    for p in &swarm {
        if p.personal_best_fitness < best_fitness {
            best_fitness = p.personal_best_fitness;
            best_position = p.personal_best_position.clone();
        }
    }
    let mut trace = Vec::with_capacity(cfg.iterations + 1);
    trace.push(best_fitness);

    let p_count = cfg.swarm_size as u64;
    for iter in 1..=cfg.iterations {
        let inertia = if cfg.iterations > 1 {
            cfg.inertia_start
                + (cfg.inertia_end - cfg.inertia_start) * (iter - 1) as f64
                    / (cfg.iterations - 1) as f64
        } else {
            cfg.inertia_start
        };
        let global = best_position.clone();
        swarm.par_iter_mut().enumerate().for_each(|(i, p)| {
            let mut rng = stream_rng(cfg.seed, iter as u64 * p_count + i as u64);
            let r1: f64 = rng.gen();
            let r2: f64 = rng.gen();
            let mut candidate = vec![0.0; p.position.len()];
            for d in 0..p.position.len() {
                p.velocity[d] = inertia * p.velocity[d]
                    + r1 * cfg.cognitive * (p.personal_best_position[d] - p.position[d])
                    + r2 * cfg.social * (global[d] - p.position[d]);
                candidate[d] = p.position[d] + p.velocity[d];
            }
            let f = fitness(&candidate, ctx, trellis);
            match cfg.acceptance {
                AcceptanceRule::Greedy => {
                    if f <= p.personal_best_fitness {
                        p.position = candidate.clone();
                        p.personal_best_position = candidate;
                        p.personal_best_fitness = f;
                    }
                }
                AcceptanceRule::Standard => {
                    p.position = candidate.clone();
                    if f < p.personal_best_fitness {
                        p.personal_best_position = candidate;
                        p.personal_best_fitness = f;
                    }
                }
            }
        });
        for p in &swarm {
            if p.personal_best_fitness < best_fitness {
                best_fitness = p.personal_best_fitness;
                best_position = p.personal_best_position.clone();
            }
        }
        trace.push(best_fitness);
    }

    let points = project_energy(&decode_position(&best_position), ctx.e_s);
    Ok(OptimizedConstellation {
        constellation: Constellation::new(points)?,
        fitness: best_fitness,
        fading: ctx.fading,
        avg_snr_db: ctx.avg_snr_db(),
        modulation_order,
        best_fitness_trace: trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::Encoder;

    fn mcs1_trellis() -> SuperTrellis {
        let enc = Encoder::new(&[0o5, 0o7]).unwrap();
        SuperTrellis::build(&enc, None, 16).unwrap()
    }

    fn small_cfg(seed: u64) -> PsoConfig {
        PsoConfig {
            swarm_size: 8,
            iterations: 12,
            seed,
            ..PsoConfig::default()
        }
    }

    #[test]
    fn projection_examples() {
        let conv = Constellation::conventional(16).unwrap();
        let projected = project_energy(conv.points(), 1.0);
        assert_eq!(projected, conv.points());

        let two = [Complex64::new(2.0, 0.0), Complex64::new(-2.0, 0.0)];
        let scaled = project_energy(&two, 1.0);
        assert_eq!(scaled, vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)]);
    }

    #[test]
    fn projection_is_idempotent() {
        let pts = [
            Complex64::new(1.3, -0.2),
            Complex64::new(-0.4, 2.0),
            Complex64::new(0.1, 0.1),
            Complex64::new(-1.0, -1.0),
        ];
        let once = project_energy(&pts, 0.7);
        let twice = project_energy(&once, 0.7);
        assert_eq!(once, twice);
        let mean = once.iter().map(|p| p.norm_sqr()).sum::<f64>() / once.len() as f64;
        assert!(mean <= 0.7 * (1.0 + 1e-9));
    }

    #[test]
    fn swarm_size_one_is_rejected() {
        let cfg = PsoConfig {
            swarm_size: 1,
            ..PsoConfig::default()
        };
        assert!(init_swarm(&cfg, 16).is_err());
    }

    #[test]
    fn particle_zero_is_conventional_qam() {
        let cfg = small_cfg(5);
        let swarm = init_swarm(&cfg, 16).unwrap();
        let conv = Constellation::conventional(16).unwrap();
        for (d, p) in conv.points().iter().enumerate() {
            assert!((swarm[0].position[2 * d] - p.re).abs() < 1e-12);
            assert!((swarm[0].position[2 * d + 1] - p.im).abs() < 1e-12);
        }
    }

    #[test]
    fn swarm_is_seed_deterministic_and_feasible() {
        let cfg = small_cfg(77);
        let a = init_swarm(&cfg, 16).unwrap();
        let b = init_swarm(&cfg, 16).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.position, y.position);
            assert_eq!(x.velocity, y.velocity);
        }
        for p in &a {
            let pts = decode_position(&p.position);
            let mean = pts.iter().map(|s| s.norm_sqr()).sum::<f64>() / pts.len() as f64;
            assert!(mean <= cfg.energy_budget * (1.0 + 1e-9));
        }
    }

    #[test]
    fn degenerate_constellation_has_infinite_fitness() {
        let trellis = mcs1_trellis();
        let ctx = ChannelContext::from_avg_snr_db(Fading::Nakagami(2), 12.0, 1.0, 1.0).unwrap();
        let origin = vec![0.0; 32];
        let f = fitness(&origin, &ctx, &trellis);
        assert!(f.is_infinite());
        let conv: Vec<f64> = Constellation::conventional(16)
            .unwrap()
            .points()
            .iter()
            .flat_map(|p| [p.re, p.im])
            .collect();
        assert!(fitness(&conv, &ctx, &trellis) < f);
    }

    #[test]
    fn divergent_context_maps_to_infinity() {
        let trellis = mcs1_trellis();
        let ctx = ChannelContext::from_avg_snr_db(Fading::Nakagami(1), -15.0, 1.0, 1.0).unwrap();
        let conv: Vec<f64> = Constellation::conventional(16)
            .unwrap()
            .points()
            .iter()
            .flat_map(|p| [p.re, p.im])
            .collect();
        assert!(fitness(&conv, &ctx, &trellis).is_infinite());
    }

    #[test]
    fn warm_start_dominates_conventional() {
        let trellis = mcs1_trellis();
        let ctx = ChannelContext::from_avg_snr_db(Fading::Nakagami(2), 12.0, 1.0, 1.0).unwrap();
        let cfg = small_cfg(42);
        let result = pso_optimize(&cfg, &ctx, &trellis, 16).unwrap();
        let conv: Vec<f64> = Constellation::conventional(16)
            .unwrap()
            .points()
            .iter()
            .flat_map(|p| [p.re, p.im])
            .collect();
        let conv_fitness = fitness(&conv, &ctx, &trellis);
        assert!(result.fitness <= conv_fitness);
        for w in result.best_fitness_trace.windows(2) {
            assert!(w[1] <= w[0]);
        }
    }

    #[test]
    fn optimization_is_bit_deterministic() {
        let trellis = mcs1_trellis();
        let ctx = ChannelContext::from_avg_snr_db(Fading::Nakagami(2), 12.0, 1.0, 1.0).unwrap();
        let cfg = small_cfg(9);
        let a = pso_optimize(&cfg, &ctx, &trellis, 16).unwrap();
        let b = pso_optimize(&cfg, &ctx, &trellis, 16).unwrap();
        assert_eq!(a.constellation.points(), b.constellation.points());
        assert_eq!(a.fitness, b.fitness);
        assert_eq!(a.best_fitness_trace, b.best_fitness_trace);
    }

    #[test]
    fn fitness_depends_only_on_snr_ratio() {
        let trellis = mcs1_trellis();
        let snr_db = 12.0;
        let ctx1 = ChannelContext::from_avg_snr_db(Fading::Nakagami(2), snr_db, 1.0, 1.0).unwrap();
        let ctx4 = ChannelContext::from_avg_snr_db(Fading::Nakagami(2), snr_db, 1.0, 4.0).unwrap();
        let cfg1 = PsoConfig {
            energy_budget: 1.0,
            ..small_cfg(31)
        };
        let cfg4 = PsoConfig {
            energy_budget: 4.0,
            ..small_cfg(31)
        };
        let a = pso_optimize(&cfg1, &ctx1, &trellis, 16).unwrap();
        let b = pso_optimize(&cfg4, &ctx4, &trellis, 16).unwrap();
        let rel = (a.fitness - b.fitness).abs() / a.fitness.max(f64::MIN_POSITIVE);
        assert!(rel <= 1e-6, "fitness {} vs {}", a.fitness, b.fitness);
    }
}
