//! Color-by-color dynamic program. For each color an inner knapsack with a
//! cardinality dimension produces the packings S_c = {(k, Δq, f_c)}: best
//! profit over subsets of that color with exactly k items and weight exactly
//! Δq. The outer program walks colors 1..m over states (t, d, q) with
//! d = max per-color count so far; transitions pick one packing per color
//! (the null packing (0,0) always included); final states are feasible iff
//! 2d ≤ t + 1.
//!
//! Improvements, individually toggleable: Pareto dominance within equal-t
//! states, d-reset for feasible prefixes (past colors are fixed, so a prefix
//! with 2d ≤ t+1 can never be violated by them again), fathoming against
//! color-indexed residual bounds, and inner-entry pruning against cross-color
//! bounds and the initial primal bound.

use alloc::collections::btree_map::Entry;
use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::dp1::SolveStats;
use crate::kp::solve_plain_kp;
use crate::model::{construct_ordering, validate, Instance, Solution};
use crate::sweep::dominance_keep_mask;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColorEntry {
    /// Number of items packed.
    pub k: u32,
    /// Exact total weight.
    pub weight: i64,
    /// Maximum profit over exact-(k, weight) subsets of the color.
    pub profit: i64,
    /// A representative optimal subset, 1-based instance indices ascending
    /// (first optimum found scanning the color's items in index order).
    pub items: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColorPacking {
    pub color: u32,
    /// Sorted by (k, weight); (0, 0, 0, []) always first.
    pub entries: Vec<ColorEntry>,
}

/// Context for pruning inner entries: an entry is dropped when it cannot be
/// part of any feasible solution (more items than the other colors plus one
/// can separate) or any improving one (even the best cross-color completion
/// stays at or below the primal bound). The null entry is never dropped.
pub struct InnerPruning<'a> {
    pub lb: i64,
    /// other_best[q]: best plain-knapsack profit over items of all other
    /// colors within capacity q, for q in 0..=b.
    pub other_best: &'a [i64],
    /// Total item count of all other colors.
    pub other_count: usize,
}

/// Exact-(k, weight) knapsack over the items of one color (Dp2 inner step).
pub fn inner_dp(instance: &Instance, color: u32, pruning: Option<&InnerPruning>) -> ColorPacking {
    debug_assert!(validate(instance).is_ok());
    assert!(color >= 1 && color <= instance.m, "color out of range");
    let b = instance.b as usize;
    let members: Vec<usize> = (0..instance.n)
        .filter(|&i| instance.items[i].color == color)
        .collect();
    let kmax = members.len();
    const NONE: u32 = u32::MAX;
    // Exact-weight table: f[k][q] over the first j members; arena-backed
    // representatives (append-only, so an updated cell never corrupts the
    // subsets other cells point at).
    let mut f = vec![vec![i64::MIN; b + 1]; kmax + 1];
    let mut rep = vec![vec![NONE; b + 1]; kmax + 1];
    let mut arena: Vec<(u32, u32)> = vec![(NONE, NONE)];
    f[0][0] = 0;
    rep[0][0] = 0;
    for (j, &i) in members.iter().enumerate() {
        let w = instance.items[i].weight as usize;
        let p = instance.items[i].profit;
        if w > b {
            continue;
        }
        for k in (0..=j.min(kmax - 1)).rev() {
            for q in (w..=b).rev() {
                if f[k][q - w] == i64::MIN {
                    continue;
                }
                let cand = f[k][q - w] + p;
                if cand > f[k + 1][q] {
                    f[k + 1][q] = cand;
                    arena.push((i as u32, rep[k][q - w]));
                    rep[k + 1][q] = (arena.len() - 1) as u32;
                }
            }
        }
    }
    let mut entries = Vec::new();
    for k in 0..=kmax {
        for q in 0..=b {
            if f[k][q] == i64::MIN {
                continue;
            }
            if let Some(pr) = pruning {
                if k > 0
                    && (k > pr.other_count + 1
                        || f[k][q] + pr.other_best[b - q] <= pr.lb)
                {
                    continue;
                }
            }
            let mut items = Vec::with_capacity(k);
            let mut at = rep[k][q];
            while arena[at as usize].0 != NONE {
                items.push(arena[at as usize].0 as usize + 1);
                at = arena[at as usize].1;
            }
            items.reverse();
            entries.push(ColorEntry { k: k as u32, weight: q as i64, profit: f[k][q], items });
        }
    }
    ColorPacking { color, entries }
}

/// Residual bounds indexed by color: row c covers the items of colors c..m,
/// row m+1 is the empty tail. Same monotonicity-in-q shape as dp1's tables.
pub struct ColorBounds {
    b: i64,
    m: u32,
    pbar: Vec<Vec<i64>>,
    nbar: Vec<Vec<i64>>,
}

impl ColorBounds {
    fn check(&self, c: u32, q: i64) {
        assert!(c >= 1 && c <= self.m + 1, "color row {c} out of range");
        assert!(q >= 0 && q <= self.b, "capacity {q} out of range");
    }

    /// Best profit over items of colors c..m within capacity q.
    pub fn pbar(&self, c: u32, q: i64) -> i64 {
        self.check(c, q);
        self.pbar[c as usize][q as usize]
    }

    /// Maximum item count over colors c..m within capacity q.
    pub fn nbar(&self, c: u32, q: i64) -> i64 {
        self.check(c, q);
        self.nbar[c as usize][q as usize]
    }
}

pub fn precompute_color_bounds(instance: &Instance) -> ColorBounds {
    debug_assert!(validate(instance).is_ok());
    let b = instance.b as usize;
    let m = instance.m as usize;
    let mut pbar = vec![vec![0i64; b + 1]; m + 2];
    let mut nbar = vec![vec![0i64; b + 1]; m + 2];
    for c in (1..=m).rev() {
        let mut prow = pbar[c + 1].clone();
        let mut nrow = nbar[c + 1].clone();
        for it in instance.items.iter().filter(|it| it.color == c as u32) {
            let w = it.weight as usize;
            if w > b {
                continue;
            }
            for q in (w..=b).rev() {
                if it.profit > 0 && prow[q - w] + it.profit > prow[q] {
                    prow[q] = prow[q - w] + it.profit;
                }
                if nrow[q - w] + 1 > nrow[q] {
                    nrow[q] = nrow[q - w] + 1;
                }
            }
        }
        pbar[c] = prow;
        nbar[c] = nrow;
    }
    ColorBounds { b: instance.b, m: instance.m, pbar, nbar }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dp2Key {
    pub t: u32,
    pub d: u32,
    pub q: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Dp2State {
    pub key: Dp2Key,
    pub f: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Dp2Options {
    pub dominance: bool,
    pub d_reset: bool,
    pub fathoming: bool,
    pub inner_pruning: bool,
    /// Same policy as dp1: `None` presolves the plain knapsack (immediate
    /// return when its witness is color-feasible, floor 0 otherwise);
    /// `Some(v)` skips the presolve and prunes against max(v, 0).
    pub initial_lb: Option<i64>,
    /// Keep the post-phase outer layers (diagnostics; used by tests).
    pub keep_layers: bool,
}

impl Default for Dp2Options {
    fn default() -> Self {
        Dp2Options {
            dominance: true,
            d_reset: true,
            fathoming: true,
            inner_pruning: true,
            initial_lb: None,
            keep_layers: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Dp2Result {
    pub solution: Solution,
    pub stats: SolveStats,
    /// Post-phase layers 0..=m, each sorted by key, when requested (empty
    /// for the presolve shortcut).
    pub layers: Option<Vec<Vec<Dp2State>>>,
}

// Backtracking node: which packing was taken at which color. Null packings
// reuse the predecessor node, like dp1's skip transitions.
#[derive(Clone, Copy)]
struct Node {
    f: i64,
    pred: u32,
    color: u32,
    entry: u32,
}

const NONE: u32 = u32::MAX;

/// Exact solver; value equals solve_dp1's and the oracle's under every
/// toggle combination.
pub fn solve_dp2(instance: &Instance, options: &Dp2Options) -> Dp2Result {
    debug_assert!(validate(instance).is_ok());

    if options.initial_lb.is_none() {
        let kp = solve_plain_kp(&instance.items, instance.b);
        let sol = Solution::from_selected(instance, kp.selected.iter().map(|&i| i + 1));
        if sol.is_color_feasible() {
            let ordering = construct_ordering(&sol, instance).expect("feasible selection");
            return Dp2Result {
                solution: Solution { ordering: Some(ordering), ..sol },
                stats: SolveStats::default(),
                layers: options.keep_layers.then(Vec::new),
            };
        }
    }
    let mut lb = options.initial_lb.unwrap_or(0).max(0);

    let b = instance.b as usize;
    let packings: Vec<ColorPacking> = (1..=instance.m)
        .map(|c| {
            if !options.inner_pruning {
                return inner_dp(instance, c, None);
            }
            let mut other_best = vec![0i64; b + 1];
            let mut other_count = 0usize;
            for it in instance.items.iter().filter(|it| it.color != c) {
                other_count += 1;
                let w = it.weight as usize;
                if it.profit <= 0 || w > b {
                    continue;
                }
                for q in (w..=b).rev() {
                    if other_best[q - w] + it.profit > other_best[q] {
                        other_best[q] = other_best[q - w] + it.profit;
                    }
                }
            }
            inner_dp(instance, c, Some(&InnerPruning { lb, other_best: &other_best, other_count }))
        })
        .collect();
    let bounds = options.fathoming.then(|| precompute_color_bounds(instance));

    let mut arena: Vec<Node> = vec![Node { f: 0, pred: NONE, color: NONE, entry: NONE }];
    let mut stats = SolveStats { states_created: 1, peak_live_states: 1, ..SolveStats::default() };
    let mut layer: BTreeMap<Dp2Key, u32> = BTreeMap::new();
    layer.insert(Dp2Key { t: 0, d: 0, q: 0 }, 0);
    let mut incumbent: u32 = 0;
    let mut incumbent_f = 0i64;
    let mut layers: Option<Vec<Vec<Dp2State>>> = options.keep_layers.then(Vec::new);
    let snapshot = |layer: &BTreeMap<Dp2Key, u32>, arena: &[Node]| -> Vec<Dp2State> {
        layer
            .iter()
            .map(|(&key, &node)| Dp2State { key, f: arena[node as usize].f })
            .collect()
    };
    if let Some(ls) = layers.as_mut() {
        ls.push(snapshot(&layer, &arena));
    }

    for c in 1..=instance.m {
        let entries = &packings[(c - 1) as usize].entries;
        let mut next: BTreeMap<Dp2Key, u32> = BTreeMap::new();
        for (&key, &node) in &layer {
            let base_f = arena[node as usize].f;
            for (ei, e) in entries.iter().enumerate() {
                if key.q + e.weight > instance.b {
                    continue;
                }
                let t = key.t + e.k;
                let mut d = key.d.max(e.k);
                if options.d_reset && 2 * d as i64 <= t as i64 + 1 {
                    d = 0;
                }
                let child = Dp2Key { t, d, q: key.q + e.weight };
                let f = base_f + e.profit;
                stats.states_created += 1;
                let make = |arena: &mut Vec<Node>| {
                    if e.k == 0 {
                        node
                    } else {
                        arena.push(Node { f, pred: node, color: c, entry: ei as u32 });
                        (arena.len() - 1) as u32
                    }
                };
                match next.entry(child) {
                    Entry::Vacant(en) => {
                        let nd = make(&mut arena);
                        en.insert(nd);
                    }
                    Entry::Occupied(mut en) => {
                        stats.states_merged += 1;
                        if f > arena[*en.get() as usize].f {
                            let nd = make(&mut arena);
                            en.insert(nd);
                        }
                    }
                }
            }
        }
        layer = next;

        if options.dominance {
            let states: Vec<(Dp2Key, u32)> = layer.into_iter().collect();
            let tuples: Vec<(u32, u32, i64, i64)> = states
                .iter()
                .map(|&(k, node)| (k.t, k.d, k.q, arena[node as usize].f))
                .collect();
            let mask = dominance_keep_mask(&tuples);
            layer = states
                .into_iter()
                .zip(mask)
                .filter(|(_, keep)| *keep)
                .map(|(kv, _)| kv)
                .collect();
        }

        for (&key, &node) in &layer {
            let f = arena[node as usize].f;
            if 2 * key.d as i64 <= key.t as i64 + 1 && f > incumbent_f {
                incumbent_f = f;
                incumbent = node;
            }
        }
        if incumbent_f > lb {
            lb = incumbent_f;
        }

        if let Some(bounds) = &bounds {
            let mut remove: Vec<Dp2Key> = Vec::new();
            for (&key, &node) in &layer {
                let f = arena[node as usize].f;
                let rq = instance.b - key.q;
                if f + bounds.pbar(c + 1, rq) <= lb {
                    stats.fathomed_bound += 1;
                    remove.push(key);
                } else if 2 * key.d as i64 > key.t as i64 + 1 + bounds.nbar(c + 1, rq) {
                    stats.fathomed_infeasible += 1;
                    remove.push(key);
                }
            }
            for key in remove {
                layer.remove(&key);
            }
        }

        stats.peak_live_states = stats.peak_live_states.max(layer.len() as u64);
        if let Some(ls) = layers.as_mut() {
            ls.push(snapshot(&layer, &arena));
        }
    }

    let mut selected: Vec<usize> = Vec::new();
    let mut at = incumbent;
    while arena[at as usize].entry != NONE {
        let node = arena[at as usize];
        selected.extend(&packings[(node.color - 1) as usize].entries[node.entry as usize].items);
        at = node.pred;
    }
    let solution = Solution::from_selected(instance, selected);
    assert_eq!(solution.profit, incumbent_f, "backtracked profit must match the incumbent");
    assert!(solution.weight <= instance.b);
    let ordering = construct_ordering(&solution, instance).expect("incumbent is color-feasible");
    Dp2Result {
        solution: Solution { ordering: Some(ordering), ..solution },
        stats,
        layers,
    }
}
