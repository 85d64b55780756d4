//! Continuous-time TASEP with site disorder on a ring.
//!
//! A particle at site `i` jumps to `i + 1 (mod L)` at rate `alpha(i)` when the
//! target is empty. Events are drawn with the Gillespie direct method; the
//! rates of the currently active bonds live in a [`RateTree`] so that picking
//! and updating a bond costs `O(log L)`.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::env::{DisorderLaw, Environment};
use crate::error::{Error, Result};
use crate::fenwick::RateTree;
use crate::seed::derive_seed;
use crate::shape::{FluxEstimate, FluxSource};
use crate::stats::{batch_means, mean_sem};

const REBUILD_EVERY: u64 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Event {
    pub bond: usize,
    pub time: f64,
}

#[derive(Debug, Clone)]
pub struct RingState {
    occupancy: Vec<bool>,
    rates: Vec<f64>,
    tree: RateTree,
    particles: usize,
    clock: f64,
    crossings: Vec<u64>,
    events: u64,
    since_rebuild: u64,
}

impl RingState {
    /// `round(rho L)` particles at uniformly random distinct sites.
    pub fn init(env: &Environment, sites: usize, rho: f64, placement_seed: u64) -> Result<Self> {
        if sites < 4 {
            return Err(Error::param("L", format!("ring needs at least 4 sites, got {sites}")));
        }
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::param("rho", format!("density must lie in (0, 1), got {rho}")));
        }
        let particles = (rho * sites as f64).round() as usize;
        if particles == 0 || particles == sites {
            return Err(Error::DegenerateDensity { particles, sites });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(placement_seed);
        let mut occupancy = vec![false; sites];
        for s in index::sample(&mut rng, sites, particles) {
            occupancy[s] = true;
        }
        Self::from_occupancy(env, occupancy)
    }

    /// A ring with explicit occupancy; site `i` uses `alpha(i)` from `env`.
    pub fn from_occupancy(env: &Environment, occupancy: Vec<bool>) -> Result<Self> {
        let sites = occupancy.len();
        if sites < 2 {
            return Err(Error::param("L", "ring needs at least 2 sites"));
        }
        let rates: Vec<f64> = (0..sites as i64)
            .map(|i| {
                env.alpha(i)
                    .ok_or_else(|| Error::Domain(format!("environment does not cover site {i}")))
            })
            .collect::<Result<_>>()?;
        let particles = occupancy.iter().filter(|&&o| o).count();
        if particles == 0 || particles == sites {
            return Err(Error::DegenerateDensity { particles, sites });
        }
        let mut state = RingState {
            tree: RateTree::new(vec![0.0; sites]),
            occupancy,
            rates,
            particles,
            clock: 0.0,
            crossings: vec![0; sites],
            events: 0,
            since_rebuild: 0,
        };
        state.tree = RateTree::new(state.fresh_bond_rates());
        Ok(state)
    }

    pub fn sites(&self) -> usize {
        self.occupancy.len()
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn occupancy(&self) -> &[bool] {
        &self.occupancy
    }

    pub fn clock(&self) -> f64 {
        self.clock
    }

    pub fn events(&self) -> u64 {
        self.events
    }

    /// Crossings of bond `i -> i + 1` since the counters were last reset.
    pub fn crossings(&self) -> &[u64] {
        &self.crossings
    }

    pub fn reset_counters(&mut self) {
        self.crossings.iter_mut().for_each(|c| *c = 0);
    }

    #[inline]
    fn bond_rate(&self, i: usize) -> f64 {
        let next = if i + 1 == self.sites() { 0 } else { i + 1 };
        if self.occupancy[i] && !self.occupancy[next] {
            self.rates[i]
        } else {
            0.0
        }
    }

    fn fresh_bond_rates(&self) -> Vec<f64> {
        (0..self.sites()).map(|i| self.bond_rate(i)).collect()
    }

    pub fn is_active(&self, bond: usize) -> bool {
        self.tree.get(bond) > 0.0
    }

    pub fn active_bonds(&self) -> usize {
        self.tree.values().iter().filter(|&&v| v > 0.0).count()
    }

    pub fn total_rate(&self) -> f64 {
        self.tree.total()
    }

    /// Whether the incrementally maintained active set matches a rebuild from occupancy.
    pub fn active_set_consistent(&self) -> bool {
        self.fresh_bond_rates() == self.tree.values()
    }

    /// Executes one Gillespie event.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<Event> {
        let total = self.tree.total();
        if !(total > 0.0) {
            return Err(Error::Invariant("no active bond on the ring".into()));
        }
        let dt = -(1.0 - rng.random::<f64>()).ln() / total;
        let bond = self.select(rng.random::<f64>() * total)?;
        self.clock += dt;
        self.fire(bond);
        Ok(Event { bond, time: self.clock })
    }

    /// Runs events until the clock reaches `t_end`; the pending event past
    /// `t_end` is discarded, which is exact by memorylessness.
    pub fn advance_until<R: Rng + ?Sized>(&mut self, t_end: f64, rng: &mut R) -> Result<u64> {
        let mut fired = 0;
        loop {
            let total = self.tree.total();
            if !(total > 0.0) {
                return Err(Error::Invariant("no active bond on the ring".into()));
            }
            let dt = -(1.0 - rng.random::<f64>()).ln() / total;
            if self.clock + dt > t_end {
                self.clock = t_end;
                return Ok(fired);
            }
            let bond = self.select(rng.random::<f64>() * total)?;
            self.clock += dt;
            self.fire(bond);
            fired += 1;
        }
    }

    fn select(&mut self, target: f64) -> Result<usize> {
        let bond = self.tree.search(target);
        if self.tree.get(bond) > 0.0 {
            return Ok(bond);
        }
        // Accumulated rounding put the target on an empty slot; rebuild and retry once.
        self.tree.rebuild();
        let bond = self.tree.search(target.min(self.tree.total() * (1.0 - 1e-15)));
        if self.tree.get(bond) > 0.0 {
            Ok(bond)
        } else {
            Err(Error::Invariant(format!("selected inactive bond {bond}")))
        }
    }

    fn fire(&mut self, bond: usize) {
        let l = self.sites();
        let next = if bond + 1 == l { 0 } else { bond + 1 };
        debug_assert!(self.occupancy[bond] && !self.occupancy[next]);
        self.occupancy[bond] = false;
        self.occupancy[next] = true;
        self.crossings[bond] += 1;
        self.events += 1;
        let prev = if bond == 0 { l - 1 } else { bond - 1 };
        for b in [prev, bond, next] {
            let rate = self.bond_rate(b);
            self.tree.set(b, rate);
        }
        self.since_rebuild += 1;
        if self.since_rebuild >= REBUILD_EVERY {
            self.tree.rebuild();
            self.since_rebuild = 0;
        }
    }
}

/// Burn-in, window and batching of a flux measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasureParams {
    pub burn_in: f64,
    pub window: f64,
    pub batches: usize,
}

impl MeasureParams {
    /// Diffusive heuristic `10 L^2 / r` for the burn-in.
    pub fn default_burn_in(sites: usize, r: f64) -> f64 {
        10.0 * (sites as f64).powi(2) / r
    }

    fn validate(&self) -> Result<()> {
        if !(self.burn_in >= 0.0 && self.burn_in.is_finite()) {
            return Err(Error::param("burn_in", "must be a non-negative time"));
        }
        if !(self.window > 0.0 && self.window.is_finite()) {
            return Err(Error::param("window", "must be a positive time"));
        }
        if self.batches < 8 {
            return Err(Error::param("batches", "at least 8 batches are needed for batch means"));
        }
        Ok(())
    }
}

/// Stationary flux per bond and unit time, with a batch-means standard error.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FluxMeasurement {
    pub rho: f64,
    pub sites: usize,
    pub particles: usize,
    pub params: MeasureParams,
    pub placement_seed: u64,
    pub dynamics_seed: u64,
    pub batch_values: Vec<f64>,
    pub estimate: f64,
    pub sem: f64,
    /// Estimates from the first and second half of the window (burn-in monitor).
    pub first_half: f64,
    pub second_half: f64,
    #[serde(skip)]
    pub bond_crossings: Vec<u64>,
    pub events: u64,
}

impl FluxMeasurement {
    pub fn as_estimate(&self) -> FluxEstimate {
        FluxEstimate {
            rho: self.rho,
            value: self.estimate,
            sem: self.sem,
            source: FluxSource::Simulation,
        }
    }
}

/// Runs the burn-in, then counts crossings on every bond over the window.
pub fn measure_flux(
    env: &Environment,
    sites: usize,
    rho: f64,
    params: MeasureParams,
    placement_seed: u64,
    dynamics_seed: u64,
) -> Result<FluxMeasurement> {
    params.validate()?;
    let mut state = RingState::init(env, sites, rho, placement_seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(dynamics_seed);
    state.advance_until(params.burn_in, &mut rng)?;
    state.reset_counters();
    let batch_len = params.window / params.batches as f64;
    let norm = batch_len * sites as f64;
    let mut batch_values = Vec::with_capacity(params.batches);
    let mut counted = 0u64;
    for k in 1..=params.batches {
        let end = params.burn_in + batch_len * k as f64;
        let fired = state.advance_until(end, &mut rng)?;
        counted += fired;
        batch_values.push(fired as f64 / norm);
    }
    let total: u64 = state.crossings().iter().sum();
    debug_assert_eq!(total, counted);
    let half = params.batches / 2;
    let first_half = batch_values[..half].iter().sum::<f64>() / half as f64;
    let second_half = batch_values[half..].iter().sum::<f64>() / (params.batches - half) as f64;
    let bm = batch_means(&batch_values);
    Ok(FluxMeasurement {
        rho,
        sites,
        particles: state.particles(),
        params,
        placement_seed,
        dynamics_seed,
        estimate: total as f64 / (params.window * sites as f64),
        sem: bm.sem,
        batch_values,
        first_half,
        second_half,
        bond_crossings: state.crossings().to_vec(),
        events: state.events(),
    })
}

/// How disorder realisations are assigned across a density grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Realizations {
    /// One environment shared by every density.
    Fixed,
    /// `k` environments, shared across densities; per-density values are
    /// averaged over them and the standard error is taken across realisations.
    Across(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub estimate: FluxEstimate,
    pub measurements: Vec<FluxMeasurement>,
}

/// Seeds of realisation `k` at grid index `g` of a flux curve:
/// (environment, placement, dynamics).
pub fn curve_seeds(seed: u64, grid_index: usize, realization: usize) -> (u64, u64, u64) {
    let task = (grid_index as u64) << 32 | realization as u64;
    (
        derive_seed(seed, "flux-curve", realization as u64, "env"),
        derive_seed(seed, "flux-curve", task, "placement"),
        derive_seed(seed, "flux-curve", task, "dynamics"),
    )
}

/// One flux measurement per density on a ring of `sites` sites.
pub fn flux_curve(
    law: &DisorderLaw,
    sites: usize,
    rho_grid: &[f64],
    params: MeasureParams,
    seed: u64,
    realizations: Realizations,
) -> Result<Vec<CurvePoint>> {
    law.validate()?;
    params.validate()?;
    if let Some(bad) = rho_grid.iter().find(|r| !(**r > 0.0 && **r < 1.0)) {
        return Err(Error::param("rho", format!("grid value {bad} is outside (0, 1)")));
    }
    let k = match realizations {
        Realizations::Fixed => 1,
        Realizations::Across(k) if k >= 2 => k,
        Realizations::Across(_) => {
            return Err(Error::param("realizations", "need at least two realisations"));
        }
    };
    let tasks: Vec<(usize, usize)> = (0..rho_grid.len()).flat_map(|g| (0..k).map(move |q| (g, q))).collect();
    let results: Vec<FluxMeasurement> = tasks
        .par_iter()
        .map(|&(g, q)| {
            let (env_seed, placement, dynamics) = curve_seeds(seed, g, q);
            let env = Environment::sample(law, env_seed, 0, sites as i64 - 1)?;
            measure_flux(&env, sites, rho_grid[g], params, placement, dynamics)
        })
        .collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(rho_grid.len());
    for (g, chunk) in results.chunks(k).enumerate() {
        let estimate = if k == 1 {
            chunk[0].as_estimate()
        } else {
            let vals: Vec<f64> = chunk.iter().map(|m| m.estimate).collect();
            let m = mean_sem(&vals);
            FluxEstimate {
                rho: rho_grid[g],
                value: m.mean,
                sem: m.sem,
                source: FluxSource::Simulation,
            }
        };
        out.push(CurvePoint {
            estimate,
            measurements: chunk.to_vec(),
        });
    }
    Ok(out)
}
