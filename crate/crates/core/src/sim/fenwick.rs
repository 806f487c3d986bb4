//! Prefix-sum tree over integer weights supporting append, point increment
//! and proportional sampling, all in `O(log n)`.
//!
//! Elements are never removed and weights only grow, which is all the edge
//! and triangle indices of the simulator need.

use rand::Rng;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CumulativeIndex {
    // 1-based Fenwick array; tree[0] unused
    tree: Vec<u64>,
    values: Vec<u64>,
    total: u64,
}

#[inline]
fn lsb(i: usize) -> usize {
    i & i.wrapping_neg()
}

impl CumulativeIndex {
    pub fn new() -> Self {
        Self {
            tree: vec![0],
            values: Vec::new(),
            total: 0,
        }
    }

    pub fn with_capacity(n: usize) -> Self {
        let mut tree = Vec::with_capacity(n + 1);
        tree.push(0);
        Self {
            tree,
            values: Vec::with_capacity(n),
            total: 0,
        }
    }

    pub fn from_weights(weights: &[u64]) -> Self {
        let mut tree = Vec::with_capacity(weights.len() + 1);
        tree.push(0);
        tree.extend_from_slice(weights);
        for i in 1..tree.len() {
            let parent = i + lsb(i);
            if parent < tree.len() {
                tree[parent] += tree[i];
            }
        }
        Self {
            tree,
            values: weights.to_vec(),
            total: weights.iter().sum(),
        }
    }

    pub fn reserve(&mut self, additional: usize) {
        self.tree.reserve(additional);
        self.values.reserve(additional);
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn weight(&self, i: usize) -> u64 {
        self.values[i]
    }

    pub fn weights(&self) -> &[u64] {
        &self.values
    }

    /// Appends an element and returns its position.
    pub fn push(&mut self, weight: u64) -> usize {
        let i = self.tree.len();
        // node i covers (i - lsb(i), i]; gather the already-built children
        let mut node = weight;
        let stop = i - lsb(i);
        let mut j = i - 1;
        while j > stop {
            node += self.tree[j];
            j -= lsb(j);
        }
        self.tree.push(node);
        self.values.push(weight);
        self.total += weight;
        i - 1
    }

    pub fn add(&mut self, i: usize, delta: u64) {
        self.values[i] += delta;
        self.total += delta;
        let mut k = i + 1;
        while k < self.tree.len() {
            self.tree[k] += delta;
            k += lsb(k);
        }
    }

    /// Sum of weights at positions `0..=i`.
    pub fn prefix(&self, i: usize) -> u64 {
        let mut k = i + 1;
        let mut s = 0;
        while k > 0 {
            s += self.tree[k];
            k -= lsb(k);
        }
        s
    }

    /// Smallest position whose inclusive prefix sum exceeds `target`.
    ///
    /// `target` must be below [`Self::total`].
    pub fn find(&self, mut target: u64) -> usize {
        debug_assert!(target < self.total);
        let n = self.tree.len() - 1;
        let mut pos = 0;
        let mut step = if n == 0 { 0 } else { 1 << (usize::BITS - 1 - n.leading_zeros()) };
        while step > 0 {
            let next = pos + step;
            if next <= n && self.tree[next] <= target {
                pos = next;
                target -= self.tree[next];
            }
            step >>= 1;
        }
        pos
    }

    /// Draws a position with probability `weight / total`; `None` when the
    /// total weight is zero.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<usize> {
        if self.total == 0 {
            return None;
        }
        Some(self.find(rng.gen_range(0..self.total)))
    }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    const COUNTS: [u64; 12] = [2, 1, 1, 3, 2, 3, 4, 5, 6, 7, 8, 9];

    fn prefix_sums(v: &[u64]) -> Vec<u64> {
        v.iter()
            .scan(0, |s, x| {
                *s += x;
                Some(*s)
            })
            .collect()
    }

    #[test]
    fn push_matches_bulk_build() {
        let mut a = CumulativeIndex::new();
        for c in COUNTS {
            a.push(c);
        }
        let b = CumulativeIndex::from_weights(&COUNTS);
        assert_eq!(a, b);
        for (i, s) in prefix_sums(&COUNTS).into_iter().enumerate() {
            assert_eq!(a.prefix(i), s);
        }
        assert_eq!(a.total(), COUNTS.iter().sum::<u64>());
    }

    #[test]
    fn find_inverts_prefix() {
        let mut idx = CumulativeIndex::from_weights(&COUNTS);
        idx.add(3, 6);
        idx.push(0);
        idx.push(4);
        let w = idx.weights().to_vec();
        let mut expected = Vec::new();
        for (i, &x) in w.iter().enumerate() {
            expected.extend(std::iter::repeat(i).take(x as usize));
        }
        for (t, &e) in expected.iter().enumerate() {
            assert_eq!(idx.find(t as u64), e, "target {t}");
        }
    }

    #[test]
    fn empty_has_no_sample() {
        let idx = CumulativeIndex::new();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(idx.is_empty());
        assert_eq!(idx.sample(&mut rng), None);
    }

    #[test]
    fn single_element_always_drawn() {
        let mut idx = CumulativeIndex::new();
        idx.push(5);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            assert_eq!(idx.sample(&mut rng), Some(0));
        }
    }

    fn assert_frequencies(weights: &[u64], draws: usize, seed: u64) {
        let idx = CumulativeIndex::from_weights(weights);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut hits = vec![0usize; weights.len()];
        for _ in 0..draws {
            hits[idx.sample(&mut rng).unwrap()] += 1;
        }
        let total = idx.total() as f64;
        for (i, &h) in hits.iter().enumerate() {
            let p = weights[i] as f64 / total;
            let sd = (draws as f64 * p * (1.0 - p)).sqrt();
            let z = (h as f64 - draws as f64 * p) / sd;
            assert!(z.abs() < 3.0, "element {i}: z = {z}");
        }
    }

    #[test]
    fn uniform_weights_sample_uniformly() {
        assert_frequencies(&[1, 1, 1], 100_000, 3);
    }

    #[test]
    fn weights_one_two_three() {
        assert_frequencies(&[1, 2, 3], 100_000, 4);
    }

    proptest::proptest! {
        #[test]
        fn prefix_invariant_under_random_updates(
            init in proptest::collection::vec(0u64..50, 1..40),
            ops in proptest::collection::vec((0usize..64, 0u64..10, proptest::bool::ANY), 0..80),
        ) {
            let mut idx = CumulativeIndex::new();
            let mut shadow = Vec::new();
            for w in init {
                idx.push(w);
                shadow.push(w);
            }
            for (i, d, append) in ops {
                if append {
                    idx.push(d);
                    shadow.push(d);
                } else {
                    let i = i % shadow.len();
                    idx.add(i, d);
                    shadow[i] += d;
                }
            }
            let sums = prefix_sums(&shadow);
            for (i, s) in sums.iter().enumerate() {
                proptest::prop_assert_eq!(idx.prefix(i), *s);
            }
            proptest::prop_assert_eq!(idx, CumulativeIndex::from_weights(&shadow));
        }
    }
}
