//! Item-by-item dynamic program over sparse states (t, d, a, q): t items
//! packed, d of them in the dominant color, a in the run of the current
//! color, q capacity used. Items are processed in color-sorted order; a
//! resets at color switches. A final state is feasible iff 2d ≤ t + 1.
//!
//! Improvements, each individually toggleable:
//! dominance 1 (Pareto filtering at color boundaries), dominance 2
//! (d/a resets that merge equivalent states), fathoming 1 (profit bound),
//! fathoming 2 (feasibility bound via residual item counts), fathoming 3
//! (exact color-feasibility of the state's partial solution unioned with
//! the residual bound solution, raising the primal bound on success).

use alloc::collections::btree_map::Entry;
use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::kp::solve_plain_kp;
use crate::model::{construct_ordering, is_color_feasible, validate, Instance, Solution};
use crate::sweep::dominance_keep_mask;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dp1Key {
    pub t: u32,
    pub d: u32,
    pub a: u32,
    pub q: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Dp1State {
    pub key: Dp1Key,
    pub f: i64,
}

/// Residual knapsack bounds over the color-sorted items. Row `from`
/// (0 ..= n) covers the items at positions from..n; `from = n` is the empty
/// tail. p̄ is the best residual profit (≥ 0: skipping is always allowed),
/// n̄ the maximum residual cardinality. Both are nondecreasing in q.
pub struct BoundTables {
    n: usize,
    b: i64,
    m: u32,
    colors: Vec<u32>,
    weights: Vec<i64>,
    pbar: Vec<Vec<i64>>,
    nbar: Vec<Vec<i64>>,
}

/// Statistics of the deterministic residual bound solution behind p̄(from, q):
/// its size t, its dominant-color count d, and its count a of items colored
/// like item `from` (0 when `from` is past the end).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundStats {
    pub t: u32,
    pub d: u32,
    pub a: u32,
}

impl BoundTables {
    fn check(&self, from: usize, q: i64) {
        assert!(from <= self.n, "row {from} out of range");
        assert!(q >= 0 && q <= self.b, "capacity {q} out of range");
    }

    /// Best profit over subsets of items from..n with weight ≤ q.
    pub fn pbar(&self, from: usize, q: i64) -> i64 {
        self.check(from, q);
        self.pbar[from][q as usize]
    }

    /// Maximum number of items from..n with total weight ≤ q.
    pub fn nbar(&self, from: usize, q: i64) -> i64 {
        self.check(from, q);
        self.nbar[from][q as usize]
    }

    /// The deterministic optimal residual solution behind p̄(from, q):
    /// walking rows forward, an item is packed iff packing strictly improves
    /// (ties prefer not packing). Positions are 0-based, ascending.
    pub fn witness(&self, from: usize, q: i64) -> Vec<usize> {
        self.check(from, q);
        let mut items = Vec::new();
        let mut q = q as usize;
        for j in from..self.n {
            if self.pbar[j][q] != self.pbar[j + 1][q] {
                items.push(j);
                q -= self.weights[j] as usize;
            }
        }
        items
    }

    pub fn bound_stats(&self, from: usize, q: i64) -> BoundStats {
        let items = self.witness(from, q);
        let mut counts = vec![0u32; self.m as usize];
        for &j in &items {
            counts[(self.colors[j] - 1) as usize] += 1;
        }
        let a = if from < self.n { counts[(self.colors[from] - 1) as usize] } else { 0 };
        BoundStats {
            t: items.len() as u32,
            d: counts.iter().copied().max().unwrap_or(0),
            a,
        }
    }

    /// First position ≥ `stage` holding a color different from the one at
    /// stage − 1 (n when no such item exists; 0 for stage 0).
    fn next_color_start(&self, stage: usize) -> usize {
        if stage == 0 {
            return 0;
        }
        let col = self.colors[stage - 1];
        (stage..self.n).find(|&j| self.colors[j] != col).unwrap_or(self.n)
    }
}

/// Builds the residual bound tables in O(n·b) by one reverse knapsack sweep.
/// The instance must already be color-sorted.
pub fn precompute_bounds(instance: &Instance) -> BoundTables {
    debug_assert!(validate(instance).is_ok());
    debug_assert!(instance.items.windows(2).all(|w| w[0].color <= w[1].color));
    let n = instance.n;
    let b = instance.b as usize;
    let mut pbar = vec![vec![0i64; b + 1]; n + 1];
    let mut nbar = vec![vec![0i64; b + 1]; n + 1];
    for from in (0..n).rev() {
        let it = &instance.items[from];
        let w = it.weight as usize;
        for q in 0..=b {
            let (mut bp, mut bn) = (pbar[from + 1][q], nbar[from + 1][q]);
            if w <= q {
                let pp = pbar[from + 1][q - w] + it.profit;
                if pp > bp {
                    bp = pp;
                }
                let pn = nbar[from + 1][q - w] + 1;
                if pn > bn {
                    bn = pn;
                }
            }
            pbar[from][q] = bp;
            nbar[from][q] = bn;
        }
    }
    BoundTables {
        n,
        b: instance.b,
        m: instance.m,
        colors: instance.items.iter().map(|it| it.color).collect(),
        weights: instance.items.iter().map(|it| it.weight).collect(),
        pbar,
        nbar,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Dp1Options {
    pub dominance1: bool,
    pub dominance2: bool,
    pub fathoming1: bool,
    pub fathoming2: bool,
    pub fathoming3: bool,
    /// Fathoming floor. `None`: presolve the plain knapsack and return its
    /// witness immediately when color-feasible, else start from floor 0.
    /// `Some(v)`: skip the presolve and prune against max(v, 0); the search
    /// returns the best solution it finds itself, so a floor equal to the
    /// optimum can leave only the empty fallback.
    pub initial_lb: Option<i64>,
    /// Record fathoming events.
    pub trace: bool,
    /// Keep the post-stage state layers (diagnostics; used by tests).
    pub keep_layers: bool,
}

impl Default for Dp1Options {
    fn default() -> Self {
        Dp1Options {
            dominance1: true,
            dominance2: true,
            fathoming1: true,
            fathoming2: true,
            fathoming3: true,
            initial_lb: None,
            trace: false,
            keep_layers: false,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolveStats {
    /// Child states handed to the layer map (merges included), plus the root.
    pub states_created: u64,
    /// Inserts that collided with an existing key (kept the better f).
    pub states_merged: u64,
    pub fathomed_bound: u64,
    pub fathomed_infeasible: u64,
    /// Largest post-phase layer size, the root layer included.
    pub peak_live_states: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceKind {
    FathomBound,
    FathomInfeasible,
    /// Fathoming 3: union with the bound solution was color-feasible.
    FathomUnion,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TraceEvent {
    /// Number of items considered when the event fired (1-based).
    pub stage: usize,
    pub kind: TraceKind,
    /// Stored key at fathoming time (after any dominance remaps).
    pub key: Dp1Key,
    pub f: i64,
    /// Primal bound after the event.
    pub lb: i64,
}

#[derive(Clone, Debug)]
pub struct Dp1Result {
    pub solution: Solution,
    pub stats: SolveStats,
    pub trace: Vec<TraceEvent>,
    /// Post-phase layers 0..=n, each sorted by key, when requested (the
    /// presolve shortcut leaves this empty).
    pub layers: Option<Vec<Vec<Dp1State>>>,
    /// Key of the state the answer was read from, with the stage it was
    /// reached at. `None` when the answer came from the presolve shortcut or
    /// a fathoming witness (those carry items, not a state).
    pub winner: Option<(usize, Dp1Key)>,
}

/// Full-condition pairwise dominance within one layer: s₂ is removed when
/// some surviving s₁ has t₁ ≥ t₂, d₁ ≤ d₂, a₁ ≤ a₂, q₁ ≤ q₂, f₁ ≥ f₂, and is
/// not an identical duplicate keeping itself (of exact duplicates the first
/// survives). Quadratic; the solver instead uses the sweep-based special
/// case at color boundaries (t equal, a uniformly 0).
pub fn apply_dominance1(states: &mut Vec<Dp1State>) {
    let k = states.len();
    let mut order: Vec<usize> = (0..k).collect();
    // Potential dominators first: t desc, then d/a/q asc, f desc.
    order.sort_unstable_by(|&x, &y| {
        let (a, b) = (&states[x], &states[y]);
        (b.key.t, a.key.d, a.key.a, a.key.q, b.f, x).cmp(&(a.key.t, b.key.d, b.key.a, b.key.q, a.f, y))
    });
    let mut keep = vec![true; k];
    for (pos, &s) in order.iter().enumerate() {
        let (ks, fs) = (states[s].key, states[s].f);
        for &r in &order[..pos] {
            let (kr, fr) = (states[r].key, states[r].f);
            if keep[r] && kr.t >= ks.t && kr.d <= ks.d && kr.a <= ks.a && kr.q <= ks.q && fr >= fs {
                keep[s] = false;
                break;
            }
        }
    }
    let mut idx = 0;
    states.retain(|_| {
        idx += 1;
        keep[idx - 1]
    });
}

/// State remap of dominance 2. At a color boundary (rule a): a feasible
/// prefix (2d ≤ t+1) can forget its dominant count, d ← 0. Within a color
/// with `remaining_in_color` same-colored items still to come (a pure count):
/// (rule b) if 2d ≤ t+1 and 2(a + remaining) ≤ t+1 the current color can
/// never dominate infeasibly, d ← 0 and a ← 0; (rule c) if a + remaining ≤ d
/// the current color can never overtake the dominant one, a ← 0. Remapped
/// keys merge by maximum f in the layer map.
pub fn apply_dominance2(key: Dp1Key, at_color_boundary: bool, remaining_in_color: u32) -> Dp1Key {
    let mut k = key;
    let (t, rem) = (k.t as i64, remaining_in_color as i64);
    if at_color_boundary {
        if 2 * k.d as i64 <= t + 1 {
            k.d = 0;
        }
    } else {
        if 2 * k.d as i64 <= t + 1 && 2 * (k.a as i64 + rem) <= t + 1 {
            k.d = 0;
            k.a = 0;
        }
        if k.a as i64 + rem <= k.d as i64 {
            k.a = 0;
        }
    }
    k
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FathomDecision {
    Keep,
    /// Fathoming 1: f + p̄(stage, b−q) ≤ LB.
    Bound,
    /// Fathoming 2: too many dominant-color items to ever reach 2d ≤ t+1.
    Infeasible,
    /// Fathoming 3: partial ∪ bound solution is color-feasible; fathom and
    /// raise the primal bound to `value` with witness `items` (0-based
    /// positions in the color-sorted instance).
    Union { value: i64, items: Vec<usize> },
}

/// Applies fathoming 1, 2, 3 in that order to a state whose packed items are
/// `partial` (0-based positions in the color-sorted instance the tables were
/// built from) after `stage` items have been considered.
pub fn apply_fathoming(
    state: &Dp1State,
    partial: &[usize],
    stage: usize,
    lb: i64,
    tables: &BoundTables,
) -> FathomDecision {
    fathom_with(state, partial, stage, lb, tables, true, true, true)
}

fn fathom_with(
    state: &Dp1State,
    partial: &[usize],
    stage: usize,
    lb: i64,
    tables: &BoundTables,
    f1: bool,
    f2: bool,
    f3: bool,
) -> FathomDecision {
    let Dp1Key { t, d, a, q } = state.key;
    let rq = tables.b - q;
    if f1 && state.f + tables.pbar(stage, rq) <= lb {
        return FathomDecision::Bound;
    }
    if f2 {
        // With a < d the dominant color is a finished one, so every residual
        // item separates; with a = d only items from the next color on do.
        let from = if a < d { stage } else { tables.next_color_start(stage) };
        if 2 * d as i64 > t as i64 + 1 + tables.nbar(from, rq) {
            return FathomDecision::Infeasible;
        }
    }
    if f3 {
        let witness = tables.witness(stage, rq);
        let mut counts = vec![0usize; tables.m as usize];
        for &j in partial.iter().chain(&witness) {
            counts[(tables.colors[j] - 1) as usize] += 1;
        }
        if is_color_feasible(&counts, partial.len() + witness.len()) {
            let mut items = partial.to_vec();
            items.extend(witness);
            items.sort_unstable();
            return FathomDecision::Union { value: state.f + tables.pbar(stage, rq), items };
        }
    }
    FathomDecision::Keep
}

// Backtracking arena node: a state's packed-item chain. The root has both
// links at the sentinel.
#[derive(Clone, Copy)]
struct Node {
    f: i64,
    pred: u32,
    item: u32,
}

const NONE: u32 = u32::MAX;

fn backtrack(arena: &[Node], mut at: u32) -> Vec<usize> {
    let mut items = Vec::new();
    while arena[at as usize].item != NONE {
        items.push(arena[at as usize].item as usize);
        at = arena[at as usize].pred;
    }
    items.reverse();
    items
}

enum Incumbent {
    Node(u32),
    Items(Vec<usize>),
}

struct Search {
    arena: Vec<Node>,
    stats: SolveStats,
}

impl Search {
    fn store_skip(&mut self, layer: &mut BTreeMap<Dp1Key, u32>, key: Dp1Key, node: u32) {
        self.stats.states_created += 1;
        match layer.entry(key) {
            Entry::Vacant(e) => {
                e.insert(node);
            }
            Entry::Occupied(mut e) => {
                self.stats.states_merged += 1;
                if self.arena[node as usize].f > self.arena[*e.get() as usize].f {
                    e.insert(node);
                }
            }
        }
    }

    fn store_pack(&mut self, layer: &mut BTreeMap<Dp1Key, u32>, key: Dp1Key, f: i64, pred: u32, item: u32) {
        self.stats.states_created += 1;
        let push = |arena: &mut Vec<Node>| {
            arena.push(Node { f, pred, item });
            (arena.len() - 1) as u32
        };
        match layer.entry(key) {
            Entry::Vacant(e) => {
                e.insert(push(&mut self.arena));
            }
            Entry::Occupied(mut e) => {
                self.stats.states_merged += 1;
                if f > self.arena[*e.get() as usize].f {
                    e.insert(push(&mut self.arena));
                }
            }
        }
    }

    // Key relabeling (dominance 2 / boundary a-reset); collisions merge by
    // max f and count as merges, not creations.
    fn remap(&mut self, layer: BTreeMap<Dp1Key, u32>, f: impl Fn(Dp1Key) -> Dp1Key) -> BTreeMap<Dp1Key, u32> {
        let mut out = BTreeMap::new();
        for (key, node) in layer {
            match out.entry(f(key)) {
                Entry::Vacant(e) => {
                    e.insert(node);
                }
                Entry::Occupied(mut e) => {
                    self.stats.states_merged += 1;
                    if self.arena[node as usize].f > self.arena[*e.get() as usize].f {
                        e.insert(node);
                    }
                }
            }
        }
        out
    }
}

/// Exact solver. The optimal value is invariant under every combination of
/// the five improvement toggles; stats and trace depend on them.
pub fn solve_dp1(instance: &Instance, options: &Dp1Options) -> Dp1Result {
    debug_assert!(validate(instance).is_ok());

    if options.initial_lb.is_none() {
        // Trivial path: a color-feasible plain-knapsack optimum is optimal.
        let kp = solve_plain_kp(&instance.items, instance.b);
        let sol = Solution::from_selected(instance, kp.selected.iter().map(|&i| i + 1));
        if sol.is_color_feasible() {
            let ordering = construct_ordering(&sol, instance).expect("feasible selection");
            return Dp1Result {
                solution: Solution { ordering: Some(ordering), ..sol },
                stats: SolveStats::default(),
                trace: Vec::new(),
                layers: options.keep_layers.then(Vec::new),
                winner: None,
            };
        }
    }

    // Internal order: stable sort by color; perm maps positions back.
    let mut perm: Vec<usize> = (0..instance.n).collect();
    perm.sort_by_key(|&i| (instance.items[i].color, i));
    let sorted = Instance::new(
        instance.m,
        instance.b,
        perm.iter().map(|&i| instance.items[i]).collect(),
    );
    let tables = precompute_bounds(&sorted);
    let colors: Vec<u32> = sorted.items.iter().map(|it| it.color).collect();
    // rem_same[i]: items after i sharing its color.
    let rem_same: Vec<u32> = (0..sorted.n)
        .map(|i| colors[i + 1..].iter().take_while(|&&c| c == colors[i]).count() as u32)
        .collect();

    let mut search = Search {
        arena: vec![Node { f: 0, pred: NONE, item: NONE }],
        stats: SolveStats { states_created: 1, ..SolveStats::default() },
    };
    let mut layer: BTreeMap<Dp1Key, u32> = BTreeMap::new();
    layer.insert(Dp1Key { t: 0, d: 0, a: 0, q: 0 }, 0);
    let mut incumbent = Incumbent::Node(0);
    let mut incumbent_f = 0i64;
    let mut winner = Some((0, Dp1Key { t: 0, d: 0, a: 0, q: 0 }));
    let mut lb = options.initial_lb.unwrap_or(0).max(0);
    let mut trace = Vec::new();
    let mut layers: Option<Vec<Vec<Dp1State>>> = options.keep_layers.then(Vec::new);

    let snapshot = |layer: &BTreeMap<Dp1Key, u32>, arena: &[Node]| -> Vec<Dp1State> {
        layer
            .iter()
            .map(|(&key, &node)| Dp1State { key, f: arena[node as usize].f })
            .collect()
    };
    search.stats.peak_live_states = 1;
    if let Some(ls) = layers.as_mut() {
        ls.push(snapshot(&layer, &search.arena));
    }

    for i in 0..sorted.n {
        let stage = i + 1;
        let switching = i > 0 && colors[i] != colors[i - 1];
        if switching {
            // The current-color counter restarts for every state.
            layer = search.remap(layer, |k| Dp1Key { a: 0, ..k });
            if options.dominance2 {
                layer = search.remap(layer, |k| apply_dominance2(k, true, 0));
            }
            if options.dominance1 {
                let states: Vec<(Dp1Key, u32)> = layer.into_iter().collect();
                debug_assert!(states.iter().all(|(k, _)| k.a == 0));
                let tuples: Vec<(u32, u32, i64, i64)> = states
                    .iter()
                    .map(|&(k, node)| (k.t, k.d, k.q, search.arena[node as usize].f))
                    .collect();
                let mask = dominance_keep_mask(&tuples);
                layer = states
                    .into_iter()
                    .zip(mask)
                    .filter(|(_, keep)| *keep)
                    .map(|(kv, _)| kv)
                    .collect();
            }
        }

        let item = &sorted.items[i];
        let mut next: BTreeMap<Dp1Key, u32> = BTreeMap::new();
        let d2 = |k: Dp1Key| {
            if options.dominance2 {
                apply_dominance2(k, false, rem_same[i])
            } else {
                k
            }
        };
        let parents: Vec<(Dp1Key, u32)> = layer.iter().map(|(&k, &n)| (k, n)).collect();
        for (key, node) in parents {
            search.store_skip(&mut next, d2(key), node);
            if key.q + item.weight <= sorted.b {
                let d = key.d + (key.a == key.d) as u32;
                let pack = Dp1Key { t: key.t + 1, d, a: key.a + 1, q: key.q + item.weight };
                debug_assert!(pack.a <= pack.d && pack.d <= pack.t);
                let f = search.arena[node as usize].f + item.profit;
                search.store_pack(&mut next, d2(pack), f, node, i as u32);
            }
        }
        layer = next;

        // Primal bound phase: states marked feasible update the incumbent
        // before any fathoming (d-resets only fire when the tracked colors
        // can no longer violate, so a stored 2d ≤ t+1 is genuine).
        for (&key, &node) in &layer {
            let f = search.arena[node as usize].f;
            if 2 * key.d as i64 <= key.t as i64 + 1 && f > incumbent_f {
                incumbent_f = f;
                incumbent = Incumbent::Node(node);
                winner = Some((stage, key));
            }
        }
        if incumbent_f > lb {
            lb = incumbent_f;
        }

        if options.fathoming1 || options.fathoming2 || options.fathoming3 {
            let mut remove: Vec<Dp1Key> = Vec::new();
            for (&key, &node) in &layer {
                let f = search.arena[node as usize].f;
                let state = Dp1State { key, f };
                let partial;
                let partial_ref: &[usize] = if options.fathoming3 {
                    partial = backtrack(&search.arena, node);
                    &partial
                } else {
                    &[]
                };
                let decision = fathom_with(
                    &state,
                    partial_ref,
                    stage,
                    lb,
                    &tables,
                    options.fathoming1,
                    options.fathoming2,
                    options.fathoming3,
                );
                let kind = match decision {
                    FathomDecision::Keep => continue,
                    FathomDecision::Bound => {
                        search.stats.fathomed_bound += 1;
                        TraceKind::FathomBound
                    }
                    FathomDecision::Infeasible => {
                        search.stats.fathomed_infeasible += 1;
                        TraceKind::FathomInfeasible
                    }
                    FathomDecision::Union { value, items } => {
                        search.stats.fathomed_bound += 1;
                        if value > incumbent_f {
                            incumbent_f = value;
                            incumbent = Incumbent::Items(items);
                            winner = None;
                            lb = lb.max(value);
                        }
                        TraceKind::FathomUnion
                    }
                };
                remove.push(key);
                if options.trace {
                    trace.push(TraceEvent { stage, kind, key, f, lb });
                }
            }
            for key in remove {
                layer.remove(&key);
            }
        }

        search.stats.peak_live_states = search.stats.peak_live_states.max(layer.len() as u64);
        if let Some(ls) = layers.as_mut() {
            ls.push(snapshot(&layer, &search.arena));
        }
    }

    let internal_items = match incumbent {
        Incumbent::Node(node) => backtrack(&search.arena, node),
        Incumbent::Items(items) => items,
    };
    let solution = Solution::from_selected(instance, internal_items.iter().map(|&i| perm[i] + 1));
    assert_eq!(solution.profit, incumbent_f, "backtracked profit must match the incumbent");
    assert!(solution.weight <= instance.b);
    let ordering = construct_ordering(&solution, instance).expect("incumbent is color-feasible");
    Dp1Result {
        solution: Solution { ordering: Some(ordering), ..solution },
        stats: search.stats,
        trace,
        layers,
        winner,
    }
}
