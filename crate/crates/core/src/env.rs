//! Disorder laws and quenched rate environments.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{cell_key, open_unit, substream, Stream};

/// Law of the i.i.d. site rates `alpha(i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "lowercase")]
pub enum DisorderLaw {
    /// `alpha = rate` almost surely.
    PointMass { rate: f64 },
    /// `alpha = slow` with probability `p_slow`, otherwise `fast`.
    TwoPoint { slow: f64, fast: f64, p_slow: f64 },
    /// `alpha` uniform on `[lo, hi]`.
    Uniform { lo: f64, hi: f64 },
    /// `alpha = base`, except that an `epsilon` fraction of sites draw from `slow`.
    Mixture {
        base: f64,
        epsilon: f64,
        slow: Box<DisorderLaw>,
    },
}

fn positive(field: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::param(field, format!("must be a positive finite rate, got {v}")))
    }
}

fn probability(field: &'static str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::param(field, format!("must lie in [0, 1], got {v}")))
    }
}

impl DisorderLaw {
    pub fn validate(&self) -> Result<()> {
        match self {
            DisorderLaw::PointMass { rate } => positive("r", *rate),
            DisorderLaw::TwoPoint { slow, fast, p_slow } => {
                positive("r", *slow)?;
                positive("b", *fast)?;
                probability("p", *p_slow)?;
                if fast < slow {
                    return Err(Error::param("b", format!("fast rate {fast} is below slow rate {slow}")));
                }
                Ok(())
            }
            DisorderLaw::Uniform { lo, hi } => {
                positive("r", *lo)?;
                positive("b", *hi)?;
                if hi < lo {
                    return Err(Error::param("b", format!("upper end {hi} is below lower end {lo}")));
                }
                Ok(())
            }
            DisorderLaw::Mixture { base, epsilon, slow } => {
                positive("base", *base)?;
                probability("epsilon", *epsilon)?;
                slow.validate()
            }
        }
    }

    /// Essential infimum `r = inf{s : P[alpha >= s] < 1}`.
    pub fn essential_infimum(&self) -> Result<f64> {
        self.validate()?;
        Ok(self.infimum_unchecked())
    }

    fn infimum_unchecked(&self) -> f64 {
        match self {
            DisorderLaw::PointMass { rate } => *rate,
            DisorderLaw::TwoPoint { slow, fast, p_slow } => {
                if *p_slow > 0.0 {
                    *slow
                } else {
                    *fast
                }
            }
            DisorderLaw::Uniform { lo, .. } => *lo,
            DisorderLaw::Mixture { base, epsilon, slow } => {
                if *epsilon == 0.0 {
                    *base
                } else if *epsilon == 1.0 {
                    slow.infimum_unchecked()
                } else {
                    base.min(slow.infimum_unchecked())
                }
            }
        }
    }

    /// Supremum of the support.
    pub fn support_max(&self) -> Result<f64> {
        self.validate()?;
        Ok(self.sup_unchecked())
    }

    fn sup_unchecked(&self) -> f64 {
        match self {
            DisorderLaw::PointMass { rate } => *rate,
            DisorderLaw::TwoPoint { slow, fast, p_slow } => {
                if *p_slow < 1.0 {
                    *fast
                } else {
                    *slow
                }
            }
            DisorderLaw::Uniform { hi, .. } => *hi,
            DisorderLaw::Mixture { base, epsilon, slow } => {
                if *epsilon == 0.0 {
                    *base
                } else if *epsilon == 1.0 {
                    slow.sup_unchecked()
                } else {
                    base.max(slow.sup_unchecked())
                }
            }
        }
    }

    /// `E[1 / alpha]`, in closed form for every variant.
    pub fn mean_inverse_rate(&self) -> Result<f64> {
        self.validate()?;
        Ok(self.mean_inverse_unchecked())
    }

    fn mean_inverse_unchecked(&self) -> f64 {
        match self {
            DisorderLaw::PointMass { rate } => 1.0 / rate,
            DisorderLaw::TwoPoint { slow, fast, p_slow } => p_slow / slow + (1.0 - p_slow) / fast,
            DisorderLaw::Uniform { lo, hi } => {
                if hi == lo {
                    1.0 / lo
                } else {
                    (hi.ln() - lo.ln()) / (hi - lo)
                }
            }
            DisorderLaw::Mixture { base, epsilon, slow } => {
                (1.0 - epsilon) / base + epsilon * slow.mean_inverse_unchecked()
            }
        }
    }

    /// `mu = 1/r - E[1/alpha]`, clamped at zero against rounding.
    pub fn mu(&self) -> Result<f64> {
        self.validate()?;
        let r = self.infimum_unchecked();
        Ok((1.0 / r - self.mean_inverse_unchecked()).max(0.0))
    }

    /// Whether the law is almost surely constant.
    pub fn is_degenerate(&self) -> bool {
        self.infimum_unchecked() == self.sup_unchecked()
    }

    /// Draw one rate from the substreams of a counter cell, starting at word `offset`.
    fn draw(&self, key: u64, offset: u64) -> f64 {
        match self {
            DisorderLaw::PointMass { rate } => *rate,
            DisorderLaw::TwoPoint { slow, fast, p_slow } => {
                if open_unit(substream(key, offset)) < *p_slow {
                    *slow
                } else {
                    *fast
                }
            }
            DisorderLaw::Uniform { lo, hi } => {
                let u = open_unit(substream(key, offset));
                (lo + (hi - lo) * u).clamp(*lo, *hi)
            }
            DisorderLaw::Mixture { base, epsilon, slow } => {
                if open_unit(substream(key, offset)) < *epsilon {
                    slow.draw(key, offset + 1)
                } else {
                    *base
                }
            }
        }
    }

    /// The rate at site `i` of the environment with seed `seed`.
    pub fn rate_at(&self, seed: u64, i: i64) -> f64 {
        self.draw(cell_key(seed, Stream::SiteRate, i, 0), 0)
    }
}

/// A quenched realisation of the site rates over `[i_min, i_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Environment {
    law: DisorderLaw,
    seed: u64,
    i_min: i64,
    rates: Vec<f64>,
}

impl Environment {
    /// Samples `alpha(i)` for every `i` in `i_min..=i_max`.
    ///
    /// Each rate depends only on `(seed, i)`, so overlapping ranges agree.
    pub fn sample(law: &DisorderLaw, seed: u64, i_min: i64, i_max: i64) -> Result<Self> {
        law.validate()?;
        if i_max < i_min {
            return Err(Error::Domain(format!("empty site range [{i_min}, {i_max}]")));
        }
        let rates = (i_min..=i_max).map(|i| law.rate_at(seed, i)).collect();
        Ok(Environment {
            law: law.clone(),
            seed,
            i_min,
            rates,
        })
    }

    /// Wraps explicit rates. No check is made that they belong to the law's support.
    pub fn from_rates(law: DisorderLaw, i_min: i64, rates: Vec<f64>) -> Self {
        Environment {
            law,
            seed: 0,
            i_min,
            rates,
        }
    }

    pub fn law(&self) -> &DisorderLaw {
        &self.law
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn i_min(&self) -> i64 {
        self.i_min
    }

    pub fn i_max(&self) -> i64 {
        self.i_min + self.rates.len() as i64 - 1
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn len(&self) -> usize {
        self.rates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rates.is_empty()
    }

    pub fn alpha(&self, i: i64) -> Option<f64> {
        let k = i.checked_sub(self.i_min)?;
        usize::try_from(k).ok().and_then(|k| self.rates.get(k).copied())
    }

    pub fn contains(&self, i: i64) -> bool {
        i >= self.i_min && i <= self.i_max()
    }
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

    #[test]
    fn infimum_per_variant() {
        assert_eq!(DisorderLaw::PointMass { rate: 0.5 }.essential_infimum().unwrap(), 0.5);
        assert_eq!(two_point().essential_infimum().unwrap(), 0.5);
        assert_eq!(DisorderLaw::Uniform { lo: 0.5, hi: 1.0 }.essential_infimum().unwrap(), 0.5);
        let no_slow = DisorderLaw::TwoPoint {
            slow: 0.5,
            fast: 1.0,
            p_slow: 0.0,
        };
        assert_eq!(no_slow.essential_infimum().unwrap(), 1.0);
        let mix = DisorderLaw::Mixture {
            base: 1.0,
            epsilon: 0.1,
            slow: Box::new(DisorderLaw::Uniform { lo: 0.3, hi: 1.0 }),
        };
        assert_eq!(mix.essential_infimum().unwrap(), 0.3);
    }

    #[test]
    fn mu_closed_forms() {
        assert_eq!(DisorderLaw::PointMass { rate: 0.5 }.mu().unwrap(), 0.0);
        assert!((two_point().mu().unwrap() - 0.5).abs() < 1e-15);
        let uni = DisorderLaw::Uniform { lo: 0.5, hi: 1.0 }.mu().unwrap();
        assert!((uni - (2.0 - 2.0 * 2f64.ln())).abs() < 1e-14);
        assert!((uni - 0.61371).abs() < 1e-5);
        // epsilon = 0.2 of the sites slowed to 0.5 from base 1: 2 - (0.8 + 0.4) = 0.8
        let mix = DisorderLaw::Mixture {
            base: 1.0,
            epsilon: 0.2,
            slow: Box::new(DisorderLaw::PointMass { rate: 0.5 }),
        };
        assert!((mix.mu().unwrap() - 0.8).abs() < 1e-14);
    }

    #[test]
    fn invalid_parameters_rejected() {
        let bad = [
            DisorderLaw::PointMass { rate: 0.0 },
            DisorderLaw::PointMass { rate: -1.0 },
            DisorderLaw::TwoPoint {
                slow: 0.5,
                fast: 1.0,
                p_slow: 1.5,
            },
            DisorderLaw::TwoPoint {
                slow: 1.0,
                fast: 0.5,
                p_slow: 0.5,
            },
            DisorderLaw::Uniform { lo: 1.0, hi: 0.5 },
            DisorderLaw::Mixture {
                base: 1.0,
                epsilon: -0.1,
                slow: Box::new(DisorderLaw::PointMass { rate: 0.5 }),
            },
        ];
        for law in bad {
            assert!(matches!(law.mu(), Err(Error::Parameter { .. })), "{law:?}");
            assert!(law.essential_infimum().is_err());
        }
    }

    #[test]
    fn point_mass_environment_is_constant() {
        let env = Environment::sample(&DisorderLaw::PointMass { rate: 0.5 }, 99, 0, 9).unwrap();
        assert_eq!(env.rates(), &[0.5; 10]);
    }

    #[test]
    fn two_point_fraction_concentrates() {
        let n = 100_001;
        let env = Environment::sample(&two_point(), 7, 0, n - 1).unwrap();
        let slow = env.rates().iter().filter(|&&a| a == 0.5).count() as f64 / n as f64;
        assert!((slow - 0.5).abs() < 3.0 * (0.25 / n as f64).sqrt());
        assert!(env.rates().iter().all(|&a| a == 0.5 || a == 1.0));
    }

    #[test]
    fn rates_do_not_depend_on_range() {
        let law = DisorderLaw::Uniform { lo: 0.5, hi: 1.0 };
        let wide = Environment::sample(&law, 3, -100, 100).unwrap();
        let narrow = Environment::sample(&law, 3, 40, 60).unwrap();
        for i in 40..=60 {
            assert_eq!(wide.alpha(i).unwrap().to_bits(), narrow.alpha(i).unwrap().to_bits());
        }
        assert_eq!(narrow.alpha(39), None);
        assert_eq!(narrow.alpha(61), None);
    }

    #[test]
    fn inverse_rate_mean_converges() {
        let n = 100_000;
        for law in [
            two_point(),
            DisorderLaw::Uniform { lo: 0.5, hi: 1.0 },
            DisorderLaw::Mixture {
                base: 1.0,
                epsilon: 0.3,
                slow: Box::new(DisorderLaw::Uniform { lo: 0.4, hi: 0.9 }),
            },
        ] {
            let env = Environment::sample(&law, 5, 0, n - 1).unwrap();
            let r = law.essential_infimum().unwrap();
            let emp = env.rates().iter().map(|a| 1.0 / a).sum::<f64>() / n as f64;
            assert!((emp - (1.0 / r - law.mu().unwrap())).abs() < 4.0 / (n as f64).sqrt());
            assert!(env.rates().iter().all(|&a| a >= r && a <= law.support_max().unwrap()));
        }
    }

    #[test]
    fn empty_range_is_rejected() {
        assert!(Environment::sample(&two_point(), 0, 5, 4).is_err());
    }
}
