//! Plain 0/1 knapsack by dense dynamic programming, shared by the solvers'
//! presolve step and by trivial-instance detection. Deterministic witness:
//! ties prefer not packing, so backtracking yields the optimal set with the
//! smallest item indices under that rule.

use alloc::vec;
use alloc::vec::Vec;

use crate::model::Item;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KpSolution {
    pub value: i64,
    /// 0-based positions into the item slice, ascending.
    pub selected: Vec<usize>,
}

/// Maximum-profit subset with total weight ≤ capacity, colors ignored.
/// Items with non-positive profit are never packed (skipping is always
/// allowed), so the value is ≥ 0. Requires capacity ≥ 0 and weights ≥ 1.
pub fn solve_plain_kp(items: &[Item], capacity: i64) -> KpSolution {
    assert!(capacity >= 0, "capacity must be nonnegative");
    let cap = capacity as usize;
    let n = items.len();
    // rows[i][q] = best profit using items[..i] within capacity q.
    let mut rows: Vec<Vec<i64>> = Vec::with_capacity(n + 1);
    rows.push(vec![0i64; cap + 1]);
    for it in items {
        let prev = rows.last().expect("rows is nonempty");
        let mut row = prev.clone();
        let w = it.weight as usize;
        if it.profit > 0 && w <= cap {
            for q in w..=cap {
                let packed = prev[q - w] + it.profit;
                if packed > row[q] {
                    row[q] = packed;
                }
            }
        }
        rows.push(row);
    }
    let mut q = cap;
    let mut selected = Vec::new();
    for i in (0..n).rev() {
        if rows[i + 1][q] != rows[i][q] {
            selected.push(i);
            q -= items[i].weight as usize;
        }
    }
    selected.reverse();
    KpSolution { value: rows[n][cap], selected }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn it(weight: i64, profit: i64) -> Item {
        Item { weight, profit, color: 1 }
    }

    #[test]
    fn four_item_example() {
        let items = vec![it(6, 15), it(4, 8), it(2, 3), it(1, 1)];
        let s = solve_plain_kp(&items, 10);
        assert_eq!(s.value, 23);
        assert_eq!(s.selected, vec![0, 1]);
    }

    #[test]
    fn prefers_earliest_witness_on_ties() {
        // Two identical items; only one fits. Skip-preference drops the later.
        let items = vec![it(5, 9), it(5, 9)];
        let s = solve_plain_kp(&items, 5);
        assert_eq!(s.value, 9);
        assert_eq!(s.selected, vec![0]);
    }

    #[test]
    fn ignores_nonpositive_profits() {
        let items = vec![it(1, -4), it(1, 0), it(2, 7)];
        let s = solve_plain_kp(&items, 3);
        assert_eq!(s.value, 7);
        assert_eq!(s.selected, vec![2]);
    }

    #[test]
    fn empty_and_zero_capacity() {
        assert_eq!(solve_plain_kp(&[], 5), KpSolution { value: 0, selected: vec![] });
        let items = vec![it(1, 3)];
        assert_eq!(solve_plain_kp(&items, 0), KpSolution { value: 0, selected: vec![] });
    }
}
