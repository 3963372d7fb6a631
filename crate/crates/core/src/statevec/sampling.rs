use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::math::abs;

/// Per-run generator. Every shot-sampling call builds its own from a seed.
pub type SimRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Multinomial draw of `shots` outcomes from `probabilities`, seeded.
pub fn sample_counts(probabilities: &[f64], shots: u64, seed: u64) -> Result<Vec<u64>> {
    sample_counts_with(probabilities, shots, &mut rng_from_seed(seed))
}

/// Multinomial draw as a chain of conditional binomials.
pub fn sample_counts_with<R: rand::Rng + ?Sized>(
    probabilities: &[f64],
    shots: u64,
    rng: &mut R,
) -> Result<Vec<u64>> {
    if shots < 1 {
        return Err(Error::InvalidDistribution("shot count must be at least 1"));
    }
    if probabilities.is_empty() {
        return Err(Error::InvalidDistribution("empty distribution"));
    }
    if probabilities.iter().any(|p| !p.is_finite() || *p < -1e-12) {
        return Err(Error::InvalidDistribution(
            "negative or non-finite probability",
        ));
    }
    let total: f64 = probabilities.iter().sum();
    if abs(total - 1.0) > 1e-9 {
        return Err(Error::InvalidDistribution("probabilities do not sum to 1"));
    }
    let mut counts = vec![0u64; probabilities.len()];
    let mut remaining_shots = shots;
    let mut remaining_mass = 1.0_f64;
    let last = probabilities.len() - 1;
    for (i, p) in probabilities.iter().enumerate() {
        if remaining_shots == 0 {
            break;
        }
        if i == last {
            counts[i] = remaining_shots;
            break;
        }
        let p = p.max(0.0);
        let conditional = if remaining_mass > 0.0 {
            (p / remaining_mass).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let draw = Binomial::new(remaining_shots, conditional)
            .expect("conditional probability clamped to [0, 1]")
            .sample(rng);
        counts[i] = draw;
        remaining_shots -= draw;
        remaining_mass -= p;
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_distribution() {
        assert_eq!(sample_counts(&[1.0, 0.0], 8000, 7).unwrap(), vec![8000, 0]);
        assert_eq!(sample_counts(&[0.0, 1.0], 8000, 7).unwrap(), vec![0, 8000]);
    }

    #[test]
    fn same_seed_same_counts() {
        let p = [0.1, 0.2, 0.3, 0.4];
        assert_eq!(
            sample_counts(&p, 10_000, 42).unwrap(),
            sample_counts(&p, 10_000, 42).unwrap()
        );
    }

    #[test]
    fn counts_sum_to_shots() {
        let p = [0.25, 0.25, 0.0, 0.5];
        let c = sample_counts(&p, 12_345, 1).unwrap();
        assert_eq!(c.iter().sum::<u64>(), 12_345);
        assert_eq!(c[2], 0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(sample_counts(&[0.5, 0.5], 0, 1).is_err());
        assert!(sample_counts(&[1.1, -0.1], 10, 1).is_err());
        assert!(sample_counts(&[0.5, 0.4], 10, 1).is_err());
        // Float noise just below zero is tolerated.
        assert!(sample_counts(&[1.0 + 1e-13, -1e-13], 10, 1).is_ok());
    }

    #[test]
    fn fair_coin_within_band_for_most_seeds() {
        let inside = (0..200u64)
            .filter(|&seed| {
                let c = sample_counts(&[0.5, 0.5], 8000, seed).unwrap();
                (c[0] as f64 / 8000.0 - 0.5).abs() <= 0.02
            })
            .count();
        assert!(inside >= 198, "{inside} of 200 seeds inside 0.5 +- 0.02");
    }
}
