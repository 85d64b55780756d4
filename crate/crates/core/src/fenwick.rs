//! Binary indexed tree over non-negative event rates with prefix-sum search.

#[derive(Debug, Clone)]
pub struct RateTree {
    tree: Vec<f64>,
    values: Vec<f64>,
    top_bit: usize,
}

impl RateTree {
    pub fn new(values: Vec<f64>) -> Self {
        let n = values.len();
        let mut tree = vec![0.0; n + 1];
        for (k, &v) in values.iter().enumerate() {
            tree[k + 1] += v;
            let parent = (k + 1) + ((k + 1) & (k + 1).wrapping_neg());
            if parent <= n {
                tree[parent] += tree[k + 1];
            }
        }
        let top_bit = if n == 0 { 0 } else { 1 << (usize::BITS - 1 - n.leading_zeros()) };
        RateTree { tree, values, top_bit }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, k: usize) -> f64 {
        self.values[k]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn set(&mut self, k: usize, value: f64) {
        let delta = value - self.values[k];
        if delta == 0.0 {
            return;
        }
        self.values[k] = value;
        let mut idx = k + 1;
        while idx < self.tree.len() {
            self.tree[idx] += delta;
            idx += idx & idx.wrapping_neg();
        }
    }

    /// Sum of `values[..k]`.
    pub fn prefix_sum(&self, k: usize) -> f64 {
        let mut idx = k;
        let mut s = 0.0;
        while idx > 0 {
            s += self.tree[idx];
            idx &= idx - 1;
        }
        s
    }

    pub fn total(&self) -> f64 {
        self.prefix_sum(self.len())
    }

    /// Index `k` with `prefix_sum(k) <= target < prefix_sum(k + 1)`, clamped to the last
    /// index. Callers must check that the returned slot carries positive rate.
    pub fn search(&self, mut target: f64) -> usize {
        let mut pos = 0;
        let mut step = self.top_bit;
        while step > 0 {
            let next = pos + step;
            if next < self.tree.len() && self.tree[next] <= target {
                target -= self.tree[next];
                pos = next;
            }
            step >>= 1;
        }
        pos.min(self.len().saturating_sub(1))
    }

    /// Recomputes the tree from the stored values, discarding accumulated rounding.
    pub fn rebuild(&mut self) {
        let values = std::mem::take(&mut self.values);
        *self = RateTree::new(values);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prefix_sums_match_naive() {
        let vals: Vec<f64> = (0..37).map(|k| (k % 5) as f64 * 0.5).collect();
        let t = RateTree::new(vals.clone());
        for k in 0..=vals.len() {
            assert!((t.prefix_sum(k) - vals[..k].iter().sum::<f64>()).abs() < 1e-12);
        }
    }

    #[test]
    fn search_skips_zero_slots() {
        let mut t = RateTree::new(vec![0.0, 1.0, 0.0, 3.0, 0.0]);
        assert_eq!(t.search(0.0), 1);
        assert_eq!(t.search(0.999), 1);
        assert_eq!(t.search(1.0), 3);
        assert_eq!(t.search(3.999), 3);
        t.set(3, 0.0);
        t.set(4, 2.0);
        assert_eq!(t.search(1.5), 4);
        assert!((t.total() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn search_inverts_prefix_sum() {
        let vals: Vec<f64> = (0..100).map(|k| ((k * 7) % 11) as f64).collect();
        let t = RateTree::new(vals);
        for s in 0..50 {
            let target = t.total() * (s as f64 + 0.5) / 50.0;
            let k = t.search(target);
            assert!(t.get(k) > 0.0);
            assert!(t.prefix_sum(k) <= target && target < t.prefix_sum(k + 1));
        }
    }
}
