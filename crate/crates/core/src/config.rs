//! Run configuration shared by the search, construction and verification stages.

use serde::{Deserialize, Serialize};

use crate::exact::rational::{rat, serde_rational, Rational};
use crate::exact::spectral::Precision;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    /// Word radius searched for a loxodromic element.
    pub loxodromic_radius: usize,
    /// Attempts allowed to the generic tuple search.
    pub tuple_retries: usize,
    /// Maximal length of the random conjugating words s_i.
    pub tuple_word_len: usize,
    /// Largest power tried when certifying contraction.
    pub n_max: u32,
    pub precision: Precision,
    /// Sampled verification in dimension ≥ 3: grid points and boundary points.
    pub grid_samples: usize,
    pub adversarial_samples: usize,
    /// Relative margin demanded by sampled containment checks.
    #[serde(with = "serde_rational")]
    pub sample_margin: Rational,
    /// Θ estimation threshold, as a multiple of ln 2.
    #[serde(with = "serde_rational")]
    pub theta_threshold_ln2: Rational,
    /// Neighbourhood radius as a fraction of separation / 3.
    #[serde(with = "serde_rational")]
    pub safety: Rational,
    pub gp_max_subset: usize,
    pub gp_trials: usize,
    /// Entry bound B for random integer flags.
    pub flag_entry_bound: i64,
    /// Largest n the sampled (d ≥ 3) pipeline will attempt.
    pub sampled_n_limit: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            loxodromic_radius: 8,
            tuple_retries: 200,
            tuple_word_len: 6,
            n_max: 64,
            precision: Precision::default(),
            grid_samples: 10_000,
            adversarial_samples: 1_000,
            sample_margin: rat(1, 100),
            theta_threshold_ln2: rat(1, 1),
            safety: rat(1, 2),
            gp_max_subset: 2,
            gp_trials: 200,
            flag_entry_bound: 10,
            sampled_n_limit: 64,
        }
    }
}

impl RunConfig {
    pub fn with_seed(seed: u64) -> Self {
        RunConfig { seed, ..Self::default() }
    }
}
