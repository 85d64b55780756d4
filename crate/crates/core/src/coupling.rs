//! Coupling of the disordered weights with a homogeneous rate-`r` system.
//!
//! With `U_ij = B_ij * E_ij`, `B_ij ~ Ber(1 - r / alpha(i))` and
//! `E_ij ~ Exp(r)` independent of `Y_ij ~ Exp(alpha(i))`, the sum
//! `Z_ij = Y_ij + U_ij` is exactly `Exp(r)`. Along a maximal path of the
//! disordered system the conditional means `E[U | environment, Y]` add up to at
//! least `mu x` per unit of `n`, which is what pushes the disordered limit
//! shape below the homogeneous one.

use rayon::prelude::*;
use serde::Serialize;

use crate::env::{DisorderLaw, Environment};
use crate::error::{Error, Result};
use crate::lpp::{
    backtrack_path, column_coverage, passage_table, sample_weight, scaled_point, ExpWeights, WedgePoint,
    DEFAULT_CELL_BUDGET,
};
use crate::rng::{cell_key, exponential, open_unit, substream, Stream};
use crate::seed::derive_seed;
use crate::stats::{ks_one_sample, mean_sem, KsResult};

/// Significance level of the distributional audit.
pub const KS_SIGNIFICANCE: f64 = 0.01;

/// Seed of the pinned distributional audit.
pub const AUDIT_SEED: u64 = 0x5EED_2016_0C0F_FEE5;

/// One coupled draw at a lattice cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CouplingSample {
    pub i: i64,
    pub j: i64,
    pub alpha: f64,
    pub y: f64,
    pub u: f64,
    pub z: f64,
}

fn check_rate(alpha: f64, r: f64) -> Result<()> {
    if alpha.is_nan() || r.is_nan() || r <= 0.0 {
        return Err(Error::param("r", format!("rate {r} must be positive")));
    }
    if alpha < r {
        return Err(Error::Invariant(format!("site rate {alpha} is below the infimum {r}")));
    }
    Ok(())
}

/// `U_ij = B * E` with the Bernoulli and exponential factors drawn from disjoint
/// substreams of the counter cell `(u_seed, i, j)`.
pub fn sample_u(env: &Environment, u_seed: u64, i: i64, j: i64) -> Result<f64> {
    if !WedgePoint::in_wedge(i, j) {
        return Err(Error::Domain(format!("({i}, {j}) is outside the wedge")));
    }
    let alpha = env
        .alpha(i)
        .ok_or_else(|| Error::Domain(format!("column {i} is outside the environment")))?;
    let r = env.law().essential_infimum()?;
    check_rate(alpha, r)?;
    let key = cell_key(u_seed, Stream::Coupling, i, j);
    let switched_on = open_unit(substream(key, 0)) < 1.0 - r / alpha;
    Ok(if switched_on {
        exponential(substream(key, 1), r)
    } else {
        0.0
    })
}

/// `(Y, U, Z)` at one cell.
pub fn coupled_sample(env: &Environment, y_seed: u64, u_seed: u64, i: i64, j: i64) -> Result<CouplingSample> {
    let y = sample_weight(env, y_seed, i, j)?;
    let u = sample_u(env, u_seed, i, j)?;
    Ok(CouplingSample {
        i,
        j,
        alpha: env.alpha(i).unwrap(),
        y,
        u,
        z: y + u,
    })
}

fn ulp(x: f64) -> f64 {
    let x = x.abs();
    if x == 0.0 {
        f64::from_bits(1)
    } else {
        f64::from_bits(x.to_bits() + 1) - x
    }
}

/// `E[U_ij | environment] = (1 - r/alpha) / r = 1/r - 1/alpha`.
pub fn conditional_mean_u(alpha: f64, r: f64) -> Result<f64> {
    if alpha < r {
        return Err(Error::Domain(format!("alpha = {alpha} is below r = {r}")));
    }
    check_rate(alpha, r)?;
    Ok(1.0 / r - 1.0 / alpha)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZAudit {
    pub law: DisorderLaw,
    pub r: f64,
    pub samples: usize,
    pub seed: u64,
    pub mean_z: f64,
    pub sem_z: f64,
    /// Empirical `P[Z > 2/r]`; `exp(-2)` under the target law.
    pub tail_fraction: f64,
    /// Largest `|z - y - u|` measured in units in the last place of `z`.
    pub max_reconstruction_ulps: f64,
    pub ks: KsResult,
    pub significance: f64,
    pub pass: bool,
}

/// Draws `Z = Y + U` over freshly sampled rates and tests it against `Exp(r)`.
pub fn audit_z_distribution(law: &DisorderLaw, samples: usize, seed: u64) -> Result<ZAudit> {
    if samples < 1000 {
        return Err(Error::param("samples", "the distributional audit needs at least 1000 samples"));
    }
    let r = law.essential_infimum()?;
    let env = Environment::sample(law, derive_seed(seed, "coupling-audit", 0, "env"), 0, samples as i64 - 1)?;
    let y_seed = derive_seed(seed, "coupling-audit", 0, "Y");
    let u_seed = derive_seed(seed, "coupling-audit", 0, "U");
    let draws: Vec<CouplingSample> = (0..samples as i64)
        .map(|k| coupled_sample(&env, y_seed, u_seed, k, 0))
        .collect::<Result<_>>()?;
    let z: Vec<f64> = draws.iter().map(|d| d.z).collect();
    let max_reconstruction_ulps = draws
        .iter()
        .map(|d| (d.z - d.y - d.u).abs() / ulp(d.z))
        .fold(0.0, f64::max);
    let m = mean_sem(&z);
    let tail_fraction = z.iter().filter(|&&v| v > 2.0 / r).count() as f64 / samples as f64;
    let ks = ks_one_sample(&z, |t| if t <= 0.0 { 0.0 } else { -(-r * t).exp_m1() });
    Ok(ZAudit {
        law: law.clone(),
        r,
        samples,
        seed,
        mean_z: m.mean,
        sem_z: m.sem,
        tail_fraction,
        max_reconstruction_ulps,
        pass: ks.p_value >= KS_SIGNIFICANCE,
        ks,
        significance: KS_SIGNIFICANCE,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicaPathSum {
    pub replica: u64,
    /// `sum over the maximal path of E[U | F]`, divided by `n`.
    pub conditional_sum: f64,
    /// `sum_{i=0}^{floor(xn)} E[U_i0 | F] / n`, the column-coverage lower bound.
    pub coverage_bound: f64,
    /// `(sum Z - sum Y) / n` along the same path with `U` actually sampled.
    pub sampled_sum: f64,
    pub columns_covered: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathAudit {
    pub law: DisorderLaw,
    pub r: f64,
    pub mu: f64,
    pub x: f64,
    pub y: f64,
    pub n: u64,
    pub replicas: Vec<ReplicaPathSum>,
    pub mean: f64,
    pub sem: f64,
    pub sampled_mean: f64,
    pub sampled_sem: f64,
    /// `mean >= mu x - 3 sem`.
    pub bound_holds: bool,
    /// Every replica dominates its coverage bound and covers all of `0..=floor(xn)`.
    pub per_replica_coverage: bool,
    /// Sampled and conditional path sums agree within three combined standard errors.
    pub tower_consistent: bool,
    /// Envelope `1/r - 1/sup(alpha)` on every per-column conditional mean.
    pub column_mean_envelope: f64,
}

/// Audits the path lower bound: the maximal path is computed from the
/// environment and `Y` alone, then the conditional means of `U` are summed
/// along it.
pub fn audit_path_bound(law: &DisorderLaw, x: f64, y: f64, n: u64, replicas: usize, seed: u64) -> Result<PathAudit> {
    if x < 0.0 {
        return Err(Error::Domain("the path audit supports x >= 0 only".into()));
    }
    if !crate::lpp::in_continuum_wedge(x, y) {
        return Err(Error::Domain(format!("({x}, {y}) is outside the continuum wedge")));
    }
    if replicas < 2 || n == 0 {
        return Err(Error::param("replicas", "need n > 0 and at least two replicas"));
    }
    let r = law.essential_infimum()?;
    let mu = law.mu()?;
    let target = scaled_point(x, y, n);
    let nf = n as f64;

    let rows: Vec<ReplicaPathSum> = (0..replicas as u64)
        .into_par_iter()
        .map(|k| {
            let env = Environment::sample(
                law,
                derive_seed(seed, "coupling-path", k, "env"),
                -target.j,
                target.i + target.j,
            )?;
            let y_seed = derive_seed(seed, "coupling-path", k, "Y");
            let u_seed = derive_seed(seed, "coupling-path", k, "U");
            let weights = ExpWeights::new(&env, y_seed);
            let table = passage_table(&weights, target, DEFAULT_CELL_BUDGET)?;
            let path = backtrack_path(&table, target)?;
            let mut conditional = 0.0;
            let mut sampled = 0.0;
            for v in path.vertices() {
                conditional += conditional_mean_u(env.alpha(v.i).unwrap(), r)?;
                let s = coupled_sample(&env, y_seed, u_seed, v.i, v.j)?;
                sampled += s.z - s.y;
            }
            let mut coverage = 0.0;
            for i in 0..=target.i {
                coverage += conditional_mean_u(env.alpha(i).unwrap(), r)?;
            }
            let cols = column_coverage(&path)?;
            Ok(ReplicaPathSum {
                replica: k,
                conditional_sum: conditional / nf,
                coverage_bound: coverage / nf,
                sampled_sum: sampled / nf,
                columns_covered: (0..=target.i).all(|c| cols.contains(&c)),
            })
        })
        .collect::<Result<_>>()?;

    let cond: Vec<f64> = rows.iter().map(|r| r.conditional_sum).collect();
    let samp: Vec<f64> = rows.iter().map(|r| r.sampled_sum).collect();
    let c = mean_sem(&cond);
    let s = mean_sem(&samp);
    let per_replica_coverage = rows
        .iter()
        .all(|r| r.columns_covered && r.conditional_sum >= r.coverage_bound - 1e-12 * (1.0 + r.coverage_bound));
    let column_mean_envelope = 1.0 / r - 1.0 / law.support_max()?;
    Ok(PathAudit {
        law: law.clone(),
        r,
        mu,
        x,
        y,
        n,
        mean: c.mean,
        sem: c.sem,
        sampled_mean: s.mean,
        sampled_sem: s.sem,
        bound_holds: c.mean >= mu * x - 3.0 * c.sem,
        per_replica_coverage,
        tower_consistent: (c.mean - s.mean).abs() <= 3.0 * (c.sem.powi(2) + s.sem.powi(2)).sqrt(),
        column_mean_envelope,
        replicas: rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_point() -> DisorderLaw {
        DisorderLaw::TwoPoint {
            slow: 0.5,
            fast: 1.0,
            p_slow: 0.5,
        }
    }

    /// An environment with alpha = 1 everywhere on `0..n` but infimum 0.5.
    fn fast_sites(n: i64) -> Environment {
        Environment::from_rates(two_point(), 0, vec![1.0; n as usize])
    }

    #[test]
    fn u_vanishes_at_the_infimum() {
        let env = Environment::from_rates(two_point(), 0, vec![0.5; 100]);
        for i in 0..100 {
            assert_eq!(sample_u(&env, 1, i, 3).unwrap(), 0.0);
        }
    }

    #[test]
    fn u_mean_and_zero_fraction() {
        let n = 100_000;
        let env = fast_sites(1);
        let us: Vec<f64> = (0..n).map(|j| sample_u(&env, 8, 0, j).unwrap()).collect();
        let m = mean_sem(&us);
        assert!((m.mean - 1.0).abs() < 3.0 * m.sem, "{m:?}");
        let zeros = us.iter().filter(|&&u| u == 0.0).count() as f64 / n as f64;
        assert!((zeros - 0.5).abs() < 3.0 * (0.25 / n as f64).sqrt());
    }

    #[test]
    fn corrupt_environment_detected() {
        let env = Environment::from_rates(two_point(), 0, vec![0.25]);
        assert!(matches!(sample_u(&env, 0, 0, 0), Err(Error::Invariant(_))));
        assert!(conditional_mean_u(0.25, 0.5).is_err());
    }

    #[test]
    fn conditional_mean_values() {
        assert_eq!(conditional_mean_u(0.5, 0.5).unwrap(), 0.0);
        assert_eq!(conditional_mean_u(1.0, 0.5).unwrap(), 1.0);
        assert!(conditional_mean_u(0.7, 0.5).unwrap() > 0.0);
    }

    #[test]
    fn conditional_means_average_to_mu() {
        let law = DisorderLaw::Uniform { lo: 0.5, hi: 1.0 };
        let n = 100_000;
        let env = Environment::sample(&law, 12, 0, n - 1).unwrap();
        let vals: Vec<f64> = env.rates().iter().map(|&a| conditional_mean_u(a, 0.5).unwrap()).collect();
        let m = mean_sem(&vals);
        assert!((m.mean - law.mu().unwrap()).abs() < 3.0 * m.sem);
    }

    #[test]
    fn z_is_exactly_the_sum() {
        let env = Environment::sample(&two_point(), 3, -5, 50).unwrap();
        for i in -5..50 {
            for j in 5..10 {
                let s = coupled_sample(&env, 1, 2, i, j).unwrap();
                assert_eq!(s.z, s.y + s.u);
            }
        }
    }

    #[test]
    fn z_audit_point_mass_is_degenerate() {
        let audit = audit_z_distribution(&DisorderLaw::PointMass { rate: 0.5 }, 20_000, AUDIT_SEED).unwrap();
        assert!(audit.pass);
        assert!(audit.ks.statistic < 0.02);
    }

    #[test]
    fn z_audit_two_point_moments() {
        let n = 100_000;
        let audit = audit_z_distribution(&two_point(), n, AUDIT_SEED).unwrap();
        assert!(audit.pass, "{:?}", audit.ks);
        assert!((audit.mean_z - 2.0).abs() < 3.0 * 2.0 / (n as f64).sqrt());
        let e2 = (-2.0f64).exp();
        assert!((audit.tail_fraction - e2).abs() < 3.0 * (e2 * (1.0 - e2) / n as f64).sqrt());
        assert!(audit.max_reconstruction_ulps <= 1.0);
        assert!(audit_z_distribution(&two_point(), 999, 0).is_err());
    }

    #[test]
    fn path_audit_point_mass_is_zero() {
        let audit = audit_path_bound(&DisorderLaw::PointMass { rate: 0.5 }, 1.0, 1.0, 40, 4, 0).unwrap();
        assert!(audit.replicas.iter().all(|r| r.conditional_sum == 0.0 && r.sampled_sum == 0.0));
        assert_eq!(audit.mu, 0.0);
        assert!(audit.bound_holds);
    }

    #[test]
    fn path_audit_small_two_point() {
        let audit = audit_path_bound(&two_point(), 1.0, 0.5, 80, 24, 5).unwrap();
        assert!(audit.per_replica_coverage);
        assert!(audit.bound_holds);
        assert!(audit.tower_consistent);
        // Per-column conditional means never exceed 1/r - 1/sup = 1.
        assert_eq!(audit.column_mean_envelope, 1.0);
    }

    #[test]
    fn path_audit_rejects_negative_x() {
        assert!(matches!(
            audit_path_bound(&two_point(), -0.5, 1.0, 10, 4, 0),
            Err(Error::Domain(_))
        ));
    }
}
