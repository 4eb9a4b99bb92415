//! Randomized cross-checks between the solvers, the relaxations, and the
//! brute-force oracles. Sizes are kept small enough for exhaustive reference
//! computations; every property here is exact, so any failure is a bug, not
//! noise.

use std::collections::BTreeMap;

use ckp_core::dp1::{solve_dp1, Dp1Key, Dp1Options, TraceKind};
use ckp_core::dp2::{inner_dp, solve_dp2, Dp2Key, Dp2Options};
use ckp_core::lp::{find_violated_color, solve_ckp_lp, solve_kp_lp};
use ckp_core::model::{
    construct_ordering, is_color_feasible, ordering_is_valid, parse_instance, write_instance,
    Instance, Item, Solution,
};
use ckp_core::oracle::{brute_force_ckp, lp_vertex_oracle};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn rat(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

fn instances(
    nmax: usize,
    mmax: u32,
    bmax: i64,
    profits: std::ops::RangeInclusive<i64>,
) -> impl Strategy<Value = Instance> {
    (1..=nmax, 1..=mmax, 1..=bmax).prop_flat_map(move |(n, m, b)| {
        let item = (1..=b, profits.clone(), 1..=m)
            .prop_map(|(weight, profit, color)| Item { weight, profit, color });
        proptest::collection::vec(item, n).prop_map(move |items| Instance::new(m, b, items))
    })
}

/// Stable color sort used internally by solve_dp1; tests that reason about
/// stages and layer keys must see items in the same order.
fn color_sorted(instance: &Instance) -> Instance {
    let mut perm: Vec<usize> = (0..instance.n).collect();
    perm.sort_by_key(|&i| (instance.items[i].color, i));
    Instance::new(instance.m, instance.b, perm.iter().map(|&i| instance.items[i]).collect())
}

fn counts_of(instance: &Instance, members: &[usize]) -> Vec<usize> {
    let mut counts = vec![0usize; instance.m as usize + 1];
    for &i in members {
        counts[instance.items[i].color as usize] += 1;
    }
    counts
}

/// Literal check over every permutation of the selected items: is there an
/// arrangement with no equal-colored neighbors?
fn orderable_by_permutations(colors: &mut Vec<u32>) -> bool {
    fn rec(colors: &mut Vec<u32>, tail: usize, last: u32) -> bool {
        if tail == colors.len() {
            return true;
        }
        for i in tail..colors.len() {
            if colors[i] == last {
                continue;
            }
            colors.swap(tail, i);
            let c = colors[tail];
            if rec(colors, tail + 1, c) {
                return true;
            }
            colors.swap(tail, i);
        }
        false
    }
    rec(colors, 0, 0)
}

/// Same question over color multisets (items of one color are
/// interchangeable in any arrangement, so this equals the permutation
/// search); memoized so large subsets stay cheap.
fn orderable_by_counts(counts: &[usize]) -> bool {
    fn rec(
        counts: &mut Vec<usize>,
        left: usize,
        last: usize,
        memo: &mut std::collections::HashMap<(Vec<usize>, usize), bool>,
    ) -> bool {
        if left == 0 {
            return true;
        }
        let key = (counts.clone(), last);
        if let Some(&hit) = memo.get(&key) {
            return hit;
        }
        let mut ok = false;
        for c in 0..counts.len() {
            if c == last || counts[c] == 0 {
                continue;
            }
            counts[c] -= 1;
            ok = rec(counts, left - 1, c, memo);
            counts[c] += 1;
            if ok {
                break;
            }
        }
        memo.insert(key, ok);
        ok
    }
    let left = counts.iter().sum();
    rec(&mut counts.to_vec(), left, usize::MAX, &mut Default::default())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// The counting condition, the greedy constructor, and brute-force
    /// ordering search agree on every subset; at most one color is ever
    /// critical.
    #[test]
    fn feasibility_condition_matches_ordering_search(inst in instances(12, 4, 10, 1..=5i64)) {
        for mask in 0u32..(1 << inst.n) {
            let members: Vec<usize> = (0..inst.n).filter(|i| mask >> i & 1 == 1).collect();
            let counts = counts_of(&inst, &members);
            let total = members.len();
            let condition = is_color_feasible(&counts, total);

            let solution = Solution::from_selected(&inst, members.iter().map(|&i| i + 1));
            let greedy = construct_ordering(&solution, &inst);
            prop_assert_eq!(condition, greedy.is_ok());
            if let Ok(ordering) = &greedy {
                prop_assert!(ordering_is_valid(&inst, &solution.selected, ordering));
            }

            prop_assert_eq!(condition, orderable_by_counts(&counts));
            if total <= 5 {
                let mut colors: Vec<u32> =
                    members.iter().map(|&i| inst.items[i].color).collect();
                prop_assert_eq!(condition, orderable_by_permutations(&mut colors));
            }

            let critical = counts.iter().filter(|&&k| 2 * k == total + 1).count();
            prop_assert!(critical <= 1, "two critical colors in one subset");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parse_write_roundtrip(inst in instances(20, 5, 30, -9..=9i64)) {
        let text = write_instance(&inst);
        let back = parse_instance(&text).expect("written instances parse");
        prop_assert_eq!(back, inst);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Relaxation sandwich, exact constraint satisfaction, support size, and
    /// (small n) agreement with the rational vertex oracle.
    #[test]
    fn lp_relaxation_properties(inst in instances(10, 3, 15, -3..=12i64)) {
        let kp = solve_kp_lp(&inst);
        let lp = solve_ckp_lp(&inst);
        let ilp = brute_force_ckp(&inst).unwrap();

        prop_assert!(rat(ilp.value) <= lp.value);
        prop_assert!(lp.value <= kp.value);

        // Exact feasibility of the returned point.
        let total: BigRational = lp.x.iter().sum();
        let mut weight = BigRational::from_integer(BigInt::from(0));
        for (it, v) in inst.items.iter().zip(&lp.x) {
            prop_assert!(*v >= rat(0) && *v <= rat(1));
            weight += rat(it.weight) * v;
        }
        prop_assert!(weight <= rat(inst.b));
        for c in 1..=inst.m {
            let mass: BigRational = inst
                .items
                .iter()
                .zip(&lp.x)
                .filter(|(it, _)| it.color == c)
                .map(|(_, v)| v.clone())
                .sum();
            prop_assert!(rat(2) * &mass <= &total + rat(1), "color {} row violated", c);
            if lp.tight_color == Some(c) {
                prop_assert_eq!(rat(2) * &mass, &total + rat(1));
            }
        }
        prop_assert!(lp.fractional_support.len() <= 2);

        // The reduced program is only entered when the plain relaxation
        // breaks a color row; otherwise the outputs must coincide.
        let violated = find_violated_color(&kp, &inst);
        prop_assert_eq!(lp.tight_color, violated);
        if violated.is_none() {
            prop_assert_eq!(&lp.value, &kp.value);
            prop_assert_eq!(&lp.x, &kp.x);
        }

        if inst.n <= 6 {
            let oracle = lp_vertex_oracle(&inst).unwrap();
            prop_assert_eq!(&lp.value, &oracle.value);
        }
    }
}

/// Realization of a selection at a stage boundary: t selected, d the largest
/// per-color count, a the count of the stage item's color, q the weight.
/// Valid only on color-sorted instances, matching the solver's internal
/// order.
fn realized_key(inst: &Instance, stage: usize, members: &[usize]) -> Dp1Key {
    let counts = counts_of(inst, members);
    let t = members.len() as u32;
    let d = *counts.iter().max().unwrap() as u32;
    let a = if stage == 0 {
        0
    } else {
        counts[inst.items[stage - 1].color as usize] as u32
    };
    let q: i64 = members.iter().map(|&i| inst.items[i].weight).sum();
    Dp1Key { t, d, a, q }
}

fn subsets_of_prefix(stage: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u32..(1 << stage)).map(move |mask| (0..stage).filter(|i| mask >> i & 1 == 1).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    /// With every improvement disabled the stored layers are exactly the
    /// profit-maxima over subset realizations, stage by stage.
    #[test]
    fn dp1_layers_match_subset_enumeration(inst in instances(8, 3, 12, -4..=9i64)) {
        let opts = Dp1Options {
            dominance1: false,
            dominance2: false,
            fathoming1: false,
            fathoming2: false,
            fathoming3: false,
            initial_lb: Some(0),
            keep_layers: true,
            ..Dp1Options::default()
        };
        let sorted = color_sorted(&inst);
        let layers = solve_dp1(&inst, &opts).layers.unwrap();
        prop_assert_eq!(layers.len(), inst.n + 1);
        for (stage, layer) in layers.iter().enumerate() {
            let mut expected: BTreeMap<Dp1Key, i64> = BTreeMap::new();
            for members in subsets_of_prefix(stage) {
                let key = realized_key(&sorted, stage, &members);
                if key.q > sorted.b {
                    continue;
                }
                let f: i64 = members.iter().map(|&i| sorted.items[i].profit).sum();
                let slot = expected.entry(key).or_insert(i64::MIN);
                *slot = (*slot).max(f);
            }
            let got: BTreeMap<Dp1Key, i64> =
                layer.iter().map(|s| (s.key, s.f)).collect();
            prop_assert_eq!(got, expected, "stage {}", stage);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    /// The optimal value is invariant under all 2⁵ improvement subsets.
    #[test]
    fn dp1_value_invariant_under_toggles(inst in instances(20, 5, 15, -5..=12i64)) {
        let reference = solve_dp1(&inst, &Dp1Options::default()).solution.profit;
        for bits in 0u32..32 {
            let opts = Dp1Options {
                dominance1: bits & 1 != 0,
                dominance2: bits & 2 != 0,
                fathoming1: bits & 4 != 0,
                fathoming2: bits & 8 != 0,
                fathoming3: bits & 16 != 0,
                ..Dp1Options::default()
            };
            let r = solve_dp1(&inst, &opts);
            prop_assert_eq!(r.solution.profit, reference, "toggle bits {:05b}", bits);
            prop_assert!(r.solution.weight <= inst.b);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// Every state fathomed as infeasible truly has no color-feasible
    /// completion, checked by enumerating realizations and completions.
    #[test]
    fn dp1_fathomed_infeasible_is_sound(inst in instances(8, 3, 12, 1..=9i64)) {
        let opts = Dp1Options {
            dominance1: false,
            dominance2: false,
            fathoming1: false,
            fathoming2: true,
            fathoming3: false,
            initial_lb: Some(0),
            trace: true,
            ..Dp1Options::default()
        };
        let sorted = color_sorted(&inst);
        let trace = solve_dp1(&inst, &opts).trace;
        for event in trace.iter().filter(|e| e.kind == TraceKind::FathomInfeasible) {
            let rest: Vec<usize> = (event.stage..sorted.n).collect();
            for members in subsets_of_prefix(event.stage) {
                if realized_key(&sorted, event.stage, &members) != event.key {
                    continue;
                }
                for cmask in 0u32..(1 << rest.len()) {
                    let mut full = members.clone();
                    full.extend(rest.iter().enumerate().filter(|(j, _)| cmask >> j & 1 == 1).map(|(_, &i)| i));
                    let weight: i64 = full.iter().map(|&i| sorted.items[i].weight).sum();
                    if weight > sorted.b {
                        continue;
                    }
                    let counts = counts_of(&sorted, &full);
                    prop_assert!(
                        !is_color_feasible(&counts, full.len()),
                        "completion of a fathomed-infeasible state is feasible at stage {}",
                        event.stage
                    );
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The reported solution is consistent with the key of the state the
    /// answer was read from.
    #[test]
    fn dp1_winner_key_matches_solution(inst in instances(12, 4, 15, -5..=12i64)) {
        // Exact run: no d-resets, no union shortcut, so all of (t, d, q)
        // must match the recomputed realization.
        let opts = Dp1Options {
            dominance2: false,
            fathoming3: false,
            initial_lb: Some(0),
            ..Dp1Options::default()
        };
        let r = solve_dp1(&inst, &opts);
        let (_, key) = r.winner.expect("no union fathoming, no presolve shortcut");
        let sol = &r.solution;
        let members: Vec<usize> = sol.selected.iter().map(|&i| i - 1).collect();
        let counts = counts_of(&inst, &members);
        prop_assert_eq!(key.t as usize, members.len());
        prop_assert_eq!(key.q, sol.weight);
        prop_assert_eq!(key.d as usize, counts.iter().copied().max().unwrap());

        // Default run: d may have been reset, never raised.
        let r = solve_dp1(&inst, &Dp1Options { initial_lb: Some(0), ..Dp1Options::default() });
        if let Some((_, key)) = r.winner {
            let members: Vec<usize> = r.solution.selected.iter().map(|&i| i - 1).collect();
            let counts = counts_of(&inst, &members);
            prop_assert_eq!(key.t as usize, members.len());
            prop_assert_eq!(key.q, r.solution.weight);
            prop_assert!(key.d as usize <= counts.iter().copied().max().unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// Enabling any fathoming rule never increases the number of states
    /// created, whatever the other toggles.
    #[test]
    fn dp1_fathoming_never_creates_more_states(inst in instances(12, 4, 15, -3..=9i64)) {
        let mut created = [0u64; 32];
        for bits in 0u32..32 {
            let opts = Dp1Options {
                dominance1: bits & 1 != 0,
                dominance2: bits & 2 != 0,
                fathoming1: bits & 4 != 0,
                fathoming2: bits & 8 != 0,
                fathoming3: bits & 16 != 0,
                initial_lb: Some(0),
                ..Dp1Options::default()
            };
            created[bits as usize] = solve_dp1(&inst, &opts).stats.states_created;
        }
        for bits in 0u32..32 {
            for rule in [4u32, 8, 16] {
                if bits & rule == 0 {
                    prop_assert!(
                        created[(bits | rule) as usize] <= created[bits as usize],
                        "enabling rule bit {} on config {:05b} created more states",
                        rule,
                        bits
                    );
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Both dynamic programs agree with the subset oracle, and with each
    /// other, on instances with negative and positive profits.
    #[test]
    fn dp1_dp2_match_oracle(inst in instances(14, 4, 18, -6..=12i64)) {
        let oracle = brute_force_ckp(&inst).unwrap();
        let d1 = solve_dp1(&inst, &Dp1Options::default());
        let d2 = solve_dp2(&inst, &Dp2Options::default());
        prop_assert_eq!(d1.solution.profit, oracle.value);
        prop_assert_eq!(d2.solution.profit, oracle.value);
        for sol in [&d1.solution, &d2.solution] {
            prop_assert!(sol.weight <= inst.b);
            prop_assert!(sol.is_color_feasible());
            let ordering = sol.ordering.as_ref().expect("solvers attach an ordering");
            prop_assert!(ordering_is_valid(&inst, &sol.selected, ordering));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// Inner tables are exactly the optima over same-color subsets with the
    /// given cardinality and weight: nothing missing, nothing extra, and
    /// every representative attains its entry.
    #[test]
    fn dp2_inner_matches_subset_enumeration(inst in instances(10, 3, 12, -4..=9i64)) {
        for c in 1..=inst.m {
            let members: Vec<usize> =
                (0..inst.n).filter(|&i| inst.items[i].color == c).collect();
            let mut expected: BTreeMap<(u32, i64), i64> = BTreeMap::new();
            for mask in 0u32..(1 << members.len()) {
                let chosen: Vec<usize> = members
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| mask >> j & 1 == 1)
                    .map(|(_, &i)| i)
                    .collect();
                let q: i64 = chosen.iter().map(|&i| inst.items[i].weight).sum();
                if q > inst.b {
                    continue;
                }
                let f: i64 = chosen.iter().map(|&i| inst.items[i].profit).sum();
                let slot = expected.entry((chosen.len() as u32, q)).or_insert(i64::MIN);
                *slot = (*slot).max(f);
            }
            let packing = inner_dp(&inst, c, None);
            let got: BTreeMap<(u32, i64), i64> =
                packing.entries.iter().map(|e| ((e.k, e.weight), e.profit)).collect();
            prop_assert_eq!(got, expected, "color {}", c);
            for e in &packing.entries {
                prop_assert_eq!(e.items.len() as u32, e.k);
                let w: i64 = e.items.iter().map(|&i| inst.items[i - 1].weight).sum();
                let p: i64 = e.items.iter().map(|&i| inst.items[i - 1].profit).sum();
                prop_assert_eq!(w, e.weight);
                prop_assert_eq!(p, e.profit);
                prop_assert!(e.items.iter().all(|&i| inst.items[i - 1].color == c));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// With improvements off, outer layers equal enumeration over one
    /// packing per processed color.
    #[test]
    fn dp2_outer_matches_packing_enumeration(inst in instances(12, 3, 12, -4..=9i64)) {
        let opts = Dp2Options {
            dominance: false,
            d_reset: false,
            fathoming: false,
            inner_pruning: false,
            initial_lb: Some(0),
            keep_layers: true,
        };
        let layers = solve_dp2(&inst, &opts).layers.unwrap();
        prop_assert_eq!(layers.len(), inst.m as usize + 1);

        let packings: Vec<_> = (1..=inst.m).map(|c| inner_dp(&inst, c, None)).collect();
        let mut expected: BTreeMap<Dp2Key, i64> = BTreeMap::new();
        expected.insert(Dp2Key { t: 0, d: 0, q: 0 }, 0);
        for (done, packing) in packings.iter().enumerate() {
            let got: BTreeMap<Dp2Key, i64> =
                layers[done].iter().map(|s| (s.key, s.f)).collect();
            prop_assert_eq!(&got, &expected, "after {} colors", done);

            let mut next: BTreeMap<Dp2Key, i64> = BTreeMap::new();
            for (key, f) in &expected {
                for e in &packing.entries {
                    if key.q + e.weight > inst.b {
                        continue;
                    }
                    let child = Dp2Key {
                        t: key.t + e.k,
                        d: key.d.max(e.k),
                        q: key.q + e.weight,
                    };
                    let slot = next.entry(child).or_insert(i64::MIN);
                    *slot = (*slot).max(f + e.profit);
                }
            }
            expected = next;
        }
        let got: BTreeMap<Dp2Key, i64> =
            layers[inst.m as usize].iter().map(|s| (s.key, s.f)).collect();
        prop_assert_eq!(&got, &expected, "final layer");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Every state missing from a dominance-enabled run has a surviving
    /// dominator: equal t, no more weight, no larger dominant count, at
    /// least the profit.
    #[test]
    fn dp2_dominance_discards_are_certified(inst in instances(12, 3, 12, -4..=9i64)) {
        let base = Dp2Options {
            dominance: false,
            d_reset: false,
            fathoming: false,
            inner_pruning: false,
            initial_lb: Some(0),
            keep_layers: true,
        };
        let full = solve_dp2(&inst, &base).layers.unwrap();
        let kept = solve_dp2(&inst, &Dp2Options { dominance: true, ..base }).layers.unwrap();
        for (layer_full, layer_kept) in full.iter().zip(&kept) {
            for s2 in layer_full {
                if layer_kept.contains(s2) {
                    continue;
                }
                let dominated = layer_kept.iter().any(|s1| {
                    s1.key.t == s2.key.t
                        && s1.key.q <= s2.key.q
                        && s1.key.d <= s2.key.d
                        && s1.f >= s2.f
                });
                prop_assert!(dominated, "discarded state {:?} has no surviving dominator", s2);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Color labels only fix the processing order; relabeling never changes
    /// the optimum of either program.
    #[test]
    fn color_relabeling_preserves_value(
        inst in instances(14, 4, 15, -5..=12i64),
        salt in any::<u64>(),
    ) {
        // Deterministic permutation of 1..=m from the salt.
        let m = inst.m as usize;
        let mut relabel: Vec<u32> = (1..=inst.m).collect();
        let mut s = salt | 1;
        for i in (1..m).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            relabel.swap(i, (s >> 33) as usize % (i + 1));
        }
        let permuted = Instance::new(
            inst.m,
            inst.b,
            inst.items
                .iter()
                .map(|it| Item { color: relabel[(it.color - 1) as usize], ..*it })
                .collect(),
        );
        let v1 = solve_dp2(&inst, &Dp2Options::default()).solution.profit;
        let v2 = solve_dp2(&permuted, &Dp2Options::default()).solution.profit;
        prop_assert_eq!(v1, v2);
        let d1 = solve_dp1(&permuted, &Dp1Options::default()).solution.profit;
        prop_assert_eq!(d1, v1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// All 16 dp2 toggle subsets agree with the default configuration.
    #[test]
    fn dp2_value_invariant_under_toggles(inst in instances(14, 4, 15, -5..=12i64)) {
        let reference = solve_dp2(&inst, &Dp2Options::default()).solution.profit;
        for bits in 0u32..16 {
            let opts = Dp2Options {
                dominance: bits & 1 != 0,
                d_reset: bits & 2 != 0,
                fathoming: bits & 4 != 0,
                inner_pruning: bits & 8 != 0,
                ..Dp2Options::default()
            };
            let r = solve_dp2(&inst, &opts);
            prop_assert_eq!(r.solution.profit, reference, "toggle bits {:04b}", bits);
        }
    }
}
