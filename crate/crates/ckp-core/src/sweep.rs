//! Pareto filtering shared by the two dynamic programs: within each group
//! (equal t), a state is dropped when some surviving state of the same group
//! has d ≤, q ≤, and f ≥ it. Runs in O(k log k) per group via a sort plus a
//! prefix-maximum Fenwick tree over compressed q ranks.

use alloc::vec;
use alloc::vec::Vec;

/// Prefix-maximum Fenwick tree over i64 values.
struct MaxFenwick {
    tree: Vec<i64>,
}

impl MaxFenwick {
    fn new(len: usize) -> Self {
        MaxFenwick { tree: vec![i64::MIN; len + 1] }
    }

    fn update(&mut self, mut i: usize, v: i64) {
        i += 1;
        while i < self.tree.len() {
            if v > self.tree[i] {
                self.tree[i] = v;
            }
            i += i & i.wrapping_neg();
        }
    }

    /// max over positions 0..=i.
    fn prefix_max(&self, mut i: usize) -> i64 {
        i += 1;
        let mut best = i64::MIN;
        while i > 0 {
            if self.tree[i] > best {
                best = self.tree[i];
            }
            i -= i & i.wrapping_neg();
        }
        best
    }
}

/// States given as (group, d, q, f). Returns a keep mask: `mask[j]` is false
/// iff some kept state i of the same group has d_i ≤ d_j, q_i ≤ q_j,
/// f_i ≥ f_j (exact duplicates keep the earliest occurrence). Dominators are
/// always themselves kept: candidates are visited in (d, q, -f) order and a
/// state enters the tree only if it survives.
pub(crate) fn dominance_keep_mask(states: &[(u32, u32, i64, i64)]) -> Vec<bool> {
    let k = states.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_unstable_by(|&x, &y| {
        let (gx, dx, qx, fx) = states[x];
        let (gy, dy, qy, fy) = states[y];
        (gx, dx, qx, fy, x).cmp(&(gy, dy, qy, fx, y))
    });
    let mut keep = vec![true; k];
    let mut i = 0;
    while i < k {
        let group = states[order[i]].0;
        let mut j = i;
        while j < k && states[order[j]].0 == group {
            j += 1;
        }
        let chunk = &order[i..j];
        // Compress q within the group.
        let mut qs: Vec<i64> = chunk.iter().map(|&s| states[s].2).collect();
        qs.sort_unstable();
        qs.dedup();
        let mut fw = MaxFenwick::new(qs.len());
        for &s in chunk {
            let (_, _, q, f) = states[s];
            let r = qs.binary_search(&q).expect("q was inserted during compression");
            // Any state already in the tree has d ≤ (visit order) and, over
            // ranks 0..=r, q ≤; it dominates when its f is ≥ ours.
            if fw.prefix_max(r) >= f {
                keep[s] = false;
            } else {
                fw.update(r, f);
            }
        }
        i = j;
    }
    keep
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(states: &[(u32, u32, i64, i64)]) -> Vec<bool> {
        // Reference: greedy in the same visit order, O(k²), keeping a state
        // iff no earlier-kept state dominates it.
        let k = states.len();
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_unstable_by(|&x, &y| {
            let (gx, dx, qx, fx) = states[x];
            let (gy, dy, qy, fy) = states[y];
            (gx, dx, qx, fy, x).cmp(&(gy, dy, qy, fx, y))
        });
        let mut keep = vec![true; k];
        for (pos, &s) in order.iter().enumerate() {
            let (g, d, q, f) = states[s];
            for &t in &order[..pos] {
                let (g2, d2, q2, f2) = states[t];
                if keep[t] && g2 == g && d2 <= d && q2 <= q && f2 >= f {
                    keep[s] = false;
                    break;
                }
            }
        }
        keep
    }

    #[test]
    fn matches_quadratic_reference() {
        // Deterministic pseudo-random state lists.
        let mut x = 0x2545f4914f6cdd1du64;
        let mut next = move || {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            x
        };
        for len in [0usize, 1, 2, 7, 40, 200] {
            let states: Vec<(u32, u32, i64, i64)> = (0..len)
                .map(|_| {
                    (
                        (next() % 3) as u32,
                        (next() % 4) as u32,
                        (next() % 6) as i64,
                        (next() % 5) as i64,
                    )
                })
                .collect();
            assert_eq!(dominance_keep_mask(&states), brute(&states), "len {len}");
        }
    }

    #[test]
    fn duplicate_states_keep_first() {
        let states = [(0, 1, 5, 7), (0, 1, 5, 7)];
        assert_eq!(dominance_keep_mask(&states), vec![true, false]);
    }

    #[test]
    fn incomparable_states_survive() {
        let states = [(0, 0, 9, 3), (0, 1, 2, 5), (1, 0, 0, 0)];
        assert_eq!(dominance_keep_mask(&states), vec![true, true, true]);
    }
}
