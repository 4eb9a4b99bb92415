//! LP relaxation pipeline. The relaxation of the colored problem is
//!
//!   max Σ p_i x_i   s.t.  Σ w_i x_i ≤ b,                     (capacity)
//!                         Σ_{κ_i=c} x_i − Σ_{κ_i≠c} x_i ≤ 1  (color c),
//!                         0 ≤ x_i ≤ 1.
//!
//! Solved in three steps, all in exact rational arithmetic:
//! [`solve_kp_lp`] ignores colors (greedy split solution);
//! [`find_violated_color`] checks the color rows at that point (at most one
//! can be violated); if one is, [`solve_reduced_lp`] solves the program with
//! the violated row tightened to an equality, which meets every other color
//! row automatically and attains the relaxation optimum. [`solve_ckp_lp`]
//! chains the three.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::model::Instance;

fn rat(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

fn rat128(x: i128) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

#[derive(Clone, Debug, PartialEq)]
pub struct KpLpResult {
    /// One coordinate per item; at most one is fractional.
    pub x: Vec<BigRational>,
    pub value: BigRational,
    /// 1-based index of the fractionally packed item, if any.
    pub split_item: Option<usize>,
}

/// Plain knapsack relaxation by the classic greedy: items with p ≤ 0 stay at
/// 0; the rest are packed to 1 in order of decreasing p/w (ties: larger p
/// first, then smaller index) until an item no longer fits, which is packed
/// fractionally to fill the capacity exactly.
pub fn solve_kp_lp(instance: &Instance) -> KpLpResult {
    let mut order: Vec<usize> =
        (0..instance.n).filter(|&i| instance.items[i].profit > 0).collect();
    order.sort_unstable_by(|&i, &j| {
        let (a, b) = (&instance.items[i], &instance.items[j]);
        let lhs = a.profit as i128 * b.weight as i128;
        let rhs = b.profit as i128 * a.weight as i128;
        rhs.cmp(&lhs).then(b.profit.cmp(&a.profit)).then(i.cmp(&j))
    });
    let mut x = vec![BigRational::zero(); instance.n];
    let mut value = BigRational::zero();
    let mut remaining = instance.b;
    let mut split_item = None;
    for &i in &order {
        if remaining == 0 {
            break;
        }
        let it = &instance.items[i];
        if it.weight <= remaining {
            x[i] = BigRational::one();
            value += rat(it.profit);
            remaining -= it.weight;
        } else {
            let frac = BigRational::new(BigInt::from(remaining), BigInt::from(it.weight));
            value += rat(it.profit) * &frac;
            x[i] = frac;
            split_item = Some(i + 1);
            break;
        }
    }
    KpLpResult { x, value, split_item }
}

/// Color whose row is violated at the given point, if any. A point that is
/// feasible for capacity and bounds can violate at most one color row
/// (two violated rows c₁ ≠ c₂ would force the mass outside both below 0),
/// which is asserted.
pub fn find_violated_color(kp_lp: &KpLpResult, instance: &Instance) -> Option<u32> {
    let total: BigRational = kp_lp.x.iter().sum();
    let mut found = None;
    for c in 1..=instance.m {
        let mass: BigRational = instance
            .items
            .iter()
            .zip(&kp_lp.x)
            .filter(|(it, _)| it.color == c)
            .map(|(_, v)| v.clone())
            .sum();
        // Row c reads mass − (total − mass) ≤ 1, i.e. 2·mass ≤ total + 1.
        if rat(2) * mass > &total + rat(1) {
            assert!(found.is_none(), "two violated color rows at one feasible point");
            found = Some(c);
        }
    }
    found
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    /// One coordinate per item; at most two are fractional.
    pub x: Vec<BigRational>,
    pub value: BigRational,
    /// 1-based indices of the fractional coordinates, ascending.
    pub fractional_support: Vec<usize>,
    /// The color whose row was tightened to equality, when the reduced
    /// program was needed.
    pub tight_color: Option<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReducedLpInfeasible {
    pub color: u32,
}

impl fmt::Display for ReducedLpInfeasible {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "color {} has no item that fits the capacity alone", self.color)
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ReducedLpInfeasible {}

fn fractional_support(x: &[BigRational]) -> Vec<usize> {
    x.iter()
        .enumerate()
        .filter(|(_, v)| !v.is_integer())
        .map(|(i, _)| i + 1)
        .collect()
}

/// Solves the reduced program: capacity and bounds as in the relaxation, but
/// the critical color's row forced to equality,
///
///   Σ g_i x_i = 1   with g_i = +1 if κ_i = critical_color, else −1.
///
/// Requires the critical color to own at least one item with w_i ≤ b
/// (otherwise the equality cannot be met within capacity and the program is
/// infeasible, reported as an error).
///
/// Method: minimize the exact dual D(u,v) = b·u + v + Σ max(0, r_i(u,v)),
/// r_i = p_i − u·w_i − v·g_i, over u ≥ 0. D is convex piecewise linear with
/// kinks on the lines r_i = 0; a minimizer exists at a candidate point
/// (pairwise line intersections plus each line's u = 0 intercept): any
/// minimizing face of the candidate arrangement either contains such a point
/// or is unbounded in a direction along which D cannot stay minimal (D → ∞
/// as u → ∞ since b > 0, and as v → ±∞ since some g_i is +1 and, with n ≥ 1
/// items, the +v and Σ max(0, …) terms dominate). The primal optimum is then
/// recovered by complementary slackness: coordinates with r_i > 0 are 1,
/// with r_i < 0 are 0, and the ambiguous coordinates (r_i = 0) are filled by
/// an exact interval argument, followed by purification to at most two
/// fractional coordinates along null directions of the two constraint rows.
/// The result is verified against the dual value before being returned.
pub fn solve_reduced_lp(
    instance: &Instance,
    critical_color: u32,
) -> Result<LpSolution, ReducedLpInfeasible> {
    assert!(
        critical_color >= 1 && critical_color <= instance.m,
        "critical color out of range"
    );
    if !instance
        .items
        .iter()
        .any(|it| it.color == critical_color && it.weight <= instance.b)
    {
        return Err(ReducedLpInfeasible { color: critical_color });
    }
    let n = instance.n;
    let w: Vec<i64> = instance.items.iter().map(|it| it.weight).collect();
    let p: Vec<i64> = instance.items.iter().map(|it| it.profit).collect();
    let g: Vec<i64> = instance
        .items
        .iter()
        .map(|it| if it.color == critical_color { 1 } else { -1 })
        .collect();

    // Candidate dual points, in a fixed order: intersections of line pairs
    // (i, j) for i < j lex, then each line's u = 0 intercept.
    let mut candidates: Vec<(BigRational, BigRational)> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let det = w[i] as i128 * g[j] as i128 - w[j] as i128 * g[i] as i128;
            if det == 0 {
                continue;
            }
            let u = rat128(p[i] as i128 * g[j] as i128 - p[j] as i128 * g[i] as i128) / rat128(det);
            if u.is_negative() {
                continue;
            }
            let v = rat128(w[i] as i128 * p[j] as i128 - w[j] as i128 * p[i] as i128) / rat128(det);
            candidates.push((u, v));
        }
    }
    for i in 0..n {
        // r_i(0, v) = 0 at v = p_i / g_i = g_i · p_i.
        candidates.push((BigRational::zero(), rat(g[i] * p[i])));
    }

    let dual = |u: &BigRational, v: &BigRational| -> BigRational {
        let mut d = rat(instance.b) * u + v;
        for i in 0..n {
            let r = rat(p[i]) - u * rat(w[i]) - v * rat(g[i]);
            if r.is_positive() {
                d += r;
            }
        }
        d
    };

    let values: Vec<BigRational> = candidates.iter().map(|(u, v)| dual(u, v)).collect();
    let dstar = values.iter().min().expect("critical color has an item, so n >= 1").clone();

    for (cand, val) in candidates.iter().zip(&values) {
        if *val != dstar {
            continue;
        }
        let (u, v) = cand;
        if let Some(x) = recover_primal(instance, &w, &p, &g, u, v, &dstar) {
            return Ok(LpSolution {
                fractional_support: fractional_support(&x),
                value: dstar,
                x,
                tight_color: Some(critical_color),
            });
        }
    }
    unreachable!("strong duality: recovery succeeds at some dual minimizer")
}

/// Primal recovery at a dual point (u, v) with value `target`. Returns a
/// feasible x of the reduced program with objective exactly `target`, or
/// None if (u, v) admits none (possible only at non-minimizers).
fn recover_primal(
    instance: &Instance,
    w: &[i64],
    p: &[i64],
    g: &[i64],
    u: &BigRational,
    v: &BigRational,
    target: &BigRational,
) -> Option<Vec<BigRational>> {
    let n = instance.n;
    let mut x = vec![BigRational::zero(); n];
    let mut ambiguous: Vec<usize> = Vec::new();
    let mut det_weight = 0i64; // weight of coordinates forced to 1
    let mut det_gsum = 0i64;
    for i in 0..n {
        let r = rat(p[i]) - u * rat(w[i]) - v * rat(g[i]);
        if r.is_positive() {
            x[i] = BigRational::one();
            det_weight += w[i];
            det_gsum += g[i];
        } else if r.is_zero() {
            ambiguous.push(i);
        }
    }
    // On the ambiguous set the Lagrangian is flat, so any fill keeps the
    // objective at the dual value; it must restore Σ g x = 1 exactly and
    // Σ w x = b exactly when u > 0 (≤ b when u = 0).
    let gamma = 1 - det_gsum;
    let beta = instance.b - det_weight;
    if beta < 0 {
        return None;
    }
    let mut pos: Vec<usize> = ambiguous.iter().copied().filter(|&i| g[i] == 1).collect();
    let mut neg: Vec<usize> = ambiguous.iter().copied().filter(|&i| g[i] == -1).collect();
    pos.sort_unstable_by_key(|&i| (w[i], i));
    neg.sort_unstable_by_key(|&i| (w[i], i));
    // A 0/1 fill with a ones in pos and a − γ in neg has g-sum γ; the
    // feasible counts a form an integer interval.
    let alo = 0i64.max(gamma);
    let ahi = (pos.len() as i64).min(neg.len() as i64 + gamma);
    if alo > ahi {
        return None;
    }
    let prefix = |v: &[usize], light: bool| -> Vec<i64> {
        let mut sums = Vec::with_capacity(v.len() + 1);
        sums.push(0i64);
        let mut acc = 0i64;
        for k in 0..v.len() {
            let i = if light { v[k] } else { v[v.len() - 1 - k] };
            acc += w[i];
            sums.push(acc);
        }
        sums
    };
    let (pl, ph, nl, nh) = (prefix(&pos, true), prefix(&pos, false), prefix(&neg, true), prefix(&neg, false));
    let wmin = |a: i64| pl[a as usize] + nl[(a - gamma) as usize];
    let wmax = |a: i64| ph[a as usize] + nh[(a - gamma) as usize];
    let a_min = (alo..=ahi).min_by_key(|&a| (wmin(a), a)).expect("alo <= ahi");
    let a_max = (alo..=ahi).max_by(|&a, &b| wmax(a).cmp(&wmax(b)).then(b.cmp(&a))).expect("alo <= ahi");
    let (w0, w1) = (wmin(a_min), wmax(a_max));
    // Any weight in [w0, w1] is achievable on the ambiguous set at g-sum γ
    // (the extreme fills below, and their convex combinations in between).
    let fill = |a: i64, light: bool| -> Vec<usize> {
        let take = |v: &[usize], k: i64| -> Vec<usize> {
            if light {
                v[..k as usize].to_vec()
            } else {
                v[v.len() - k as usize..].to_vec()
            }
        };
        let mut ones = take(&pos, a);
        ones.extend(take(&neg, a - gamma));
        ones
    };
    let low = fill(a_min, true);
    let high = fill(a_max, false);
    let s = if u.is_positive() {
        if beta < w0 || beta > w1 {
            return None;
        }
        if w1 == w0 {
            BigRational::zero()
        } else {
            rat(beta - w0) / rat(w1 - w0)
        }
    } else {
        // Capacity may stay slack: the lightest fill suffices.
        if w0 > beta {
            return None;
        }
        BigRational::zero()
    };
    let one_minus_s = BigRational::one() - &s;
    for &i in &low {
        x[i] += &one_minus_s;
    }
    for &i in &high {
        x[i] += &s;
    }
    purify(&mut x, w, g);

    // Exact verification: bounds, capacity, tightened row, objective.
    let zero = BigRational::zero();
    let one = BigRational::one();
    if x.iter().any(|xi| *xi < zero || *xi > one) {
        return None;
    }
    let weight: BigRational = x.iter().zip(w).map(|(xi, &wi)| xi * rat(wi)).sum();
    if weight > rat(instance.b) {
        return None;
    }
    if u.is_positive() && weight != rat(instance.b) {
        return None;
    }
    let gsum: BigRational = x.iter().zip(g).map(|(xi, &gi)| xi * rat(gi)).sum();
    if gsum != BigRational::one() {
        return None;
    }
    let objective: BigRational = x.iter().zip(p).map(|(xi, &pi)| xi * rat(pi)).sum();
    if objective != *target {
        return None;
    }
    Some(x)
}

/// Reduces the fractional coordinates of x to at most two by moving along
/// null directions of the 2×n matrix with rows w and g, which leaves weight,
/// g-sum, and (on the flat ambiguous set) the objective unchanged. Any three
/// columns of a 2×n matrix are linearly dependent; the cofactor vector
/// (det(c_j,c_k), −det(c_i,c_k), det(c_i,c_j)) is a null combination, with a
/// two-column fallback when all three pairwise determinants vanish. Stepping
/// to the first bound removes at least one fractional coordinate per round.
fn purify(x: &mut [BigRational], w: &[i64], g: &[i64]) {
    let zero = BigRational::zero();
    let one = BigRational::one();
    loop {
        let frac: Vec<usize> = x
            .iter()
            .enumerate()
            .filter(|(_, v)| **v > zero && **v < one)
            .map(|(i, _)| i)
            .collect();
        if frac.len() <= 2 {
            return;
        }
        let (i, j, k) = (frac[0], frac[1], frac[2]);
        let det = |a: usize, b: usize| w[a] as i128 * g[b] as i128 - w[b] as i128 * g[a] as i128;
        let cof = [det(j, k), -det(i, k), det(i, j)];
        let dir: [(usize, i128); 3] = if cof.iter().all(|&c| c == 0) {
            // All three columns pairwise parallel; trade i against j.
            [(i, w[j] as i128), (j, -(w[i] as i128)), (k, 0)]
        } else {
            [(i, cof[0]), (j, cof[1]), (k, cof[2])]
        };
        // Largest step along +dir keeping all coordinates in [0, 1]. A 2×n
        // matrix with nonzero columns has no null vector supported on one
        // coordinate, so at least two components move and the step is finite.
        let mut step: Option<BigRational> = None;
        for &(idx, a) in &dir {
            let room = if a > 0 {
                (&one - &x[idx]) / rat128(a)
            } else if a < 0 {
                &x[idx] / rat128(-a)
            } else {
                continue;
            };
            if step.as_ref().is_none_or(|s| room < *s) {
                step = Some(room);
            }
        }
        let step = step.expect("null direction has a nonzero component");
        for &(idx, a) in &dir {
            if a != 0 {
                x[idx] += &step * rat128(a);
            }
        }
    }
}

/// Full relaxation optimum: greedy plain relaxation, then the reduced
/// program when a color row is violated. At the reduced optimum every other
/// color row holds automatically (the tight row gives the critical color
/// exactly (X+1)/2 of the total mass X, leaving (X−1)/2 for the rest, so no
/// other color can exceed (X+1)/2); this and the sandwich value ≤ plain
/// relaxation value are asserted.
pub fn solve_ckp_lp(instance: &Instance) -> LpSolution {
    let kp = solve_kp_lp(instance);
    let sol = match find_violated_color(&kp, instance) {
        None => LpSolution {
            fractional_support: fractional_support(&kp.x),
            x: kp.x,
            value: kp.value,
            tight_color: None,
        },
        Some(c) => {
            let reduced = solve_reduced_lp(instance, c)
                .expect("violated row needs positive mass on the color, so some item fits");
            assert!(reduced.value <= kp.value, "equality row can only cut the relaxation");
            reduced
        }
    };
    debug_assert!(sol.fractional_support.len() <= 2);
    debug_assert!({
        let total: BigRational = sol.x.iter().sum();
        (1..=instance.m).all(|c| {
            let mass: BigRational = instance
                .items
                .iter()
                .zip(&sol.x)
                .filter(|(it, _)| it.color == c)
                .map(|(_, v)| v.clone())
                .sum();
            rat(2) * mass <= &total + rat(1)
        })
    });
    sol
}
