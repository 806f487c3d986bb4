use rand::Rng;

use super::SimError;

/// Two distinct indices from `0..population`, uniform over all pairs.
#[inline]
pub fn uniform_pair<R: Rng + ?Sized>(rng: &mut R, population: u32) -> [u32; 2] {
    debug_assert!(population >= 2);
    let a = rng.gen_range(0..population);
    loop {
        let b = rng.gen_range(0..population);
        if b != a {
            return [a, b];
        }
    }
}

/// Three distinct indices from `0..population`, uniform over all triples.
#[inline]
pub fn uniform_triple<R: Rng + ?Sized>(rng: &mut R, population: u32) -> [u32; 3] {
    debug_assert!(population >= 3);
    let [a, b] = uniform_pair(rng, population);
    loop {
        let c = rng.gen_range(0..population);
        if c != a && c != b {
            return [a, b, c];
        }
    }
}

/// `count` distinct indices (2 or 3) from `0..population`, sorted ascending.
///
/// Rejection over independent uniform draws; every subset of size `count`
/// is equally likely.
pub fn sample_uniform_distinct<R: Rng + ?Sized>(
    rng: &mut R,
    count: usize,
    population: u32,
) -> Result<Vec<u32>, SimError> {
    if !(2..=3).contains(&count) {
        return Err(SimError::InvalidArgument(format!(
            "count must be 2 or 3, got {count}"
        )));
    }
    if (population as usize) < count {
        return Err(SimError::InvalidArgument(format!(
            "cannot draw {count} distinct vertices from {population}"
        )));
    }
    let mut out = if count == 2 {
        uniform_pair(rng, population).to_vec()
    } else {
        uniform_triple(rng, population).to_vec()
    };
    out.sort_unstable();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use std::collections::HashMap;

    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn check_uniform(count: usize, population: u32, expected_subsets: usize, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let draws = 100_000;
        let mut hits: HashMap<Vec<u32>, usize> = HashMap::new();
        for _ in 0..draws {
            *hits.entry(sample_uniform_distinct(&mut rng, count, population).unwrap()).or_default() += 1;
        }
        assert_eq!(hits.len(), expected_subsets);
        let p = 1.0 / expected_subsets as f64;
        let sd = (draws as f64 * p * (1.0 - p)).sqrt();
        for (k, h) in hits {
            let z = (h as f64 - draws as f64 * p) / sd;
            assert!(z.abs() < 3.0, "{k:?}: z = {z}");
        }
    }

    #[test]
    fn full_set_when_population_equals_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            assert_eq!(sample_uniform_distinct(&mut rng, 3, 3).unwrap(), vec![0, 1, 2]);
        }
    }

    #[test]
    fn pairs_of_three() {
        check_uniform(2, 3, 3, 10);
    }

    #[test]
    fn triples_of_five() {
        check_uniform(3, 5, 10, 11);
    }

    #[test]
    fn errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(sample_uniform_distinct(&mut rng, 3, 2).is_err());
        assert!(sample_uniform_distinct(&mut rng, 4, 10).is_err());
    }
}
