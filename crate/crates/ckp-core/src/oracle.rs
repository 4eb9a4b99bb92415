//! Brute-force references for testing the real solvers: exhaustive subset
//! enumeration for the integer problem and exact rational vertex enumeration
//! for the LP relaxation. Every routine is deliberately simple and
//! independent of the dynamic programs and of the LP pipeline.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::model::{is_color_feasible, Instance};

/// Subset enumeration is capped at this many items (2^24 subsets).
pub const MAX_BRUTE_FORCE_N: usize = 24;
/// Vertex enumeration is capped at this many variables.
pub const MAX_LP_ORACLE_N: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InstanceTooLarge {
    pub n: usize,
    pub limit: usize,
}

impl fmt::Display for InstanceTooLarge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "instance has {} items, oracle limit is {}", self.n, self.limit)
    }
}

#[cfg(feature = "std")]
impl std::error::Error for InstanceTooLarge {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult {
    pub value: i64,
    /// Optimal subset as ascending 1-based indices; among optimal subsets,
    /// the lexicographically smallest index sequence.
    pub witness: Vec<usize>,
    /// Number of subsets examined (2^n).
    pub enumerated: u64,
}

fn brute_force(instance: &Instance, check_colors: bool) -> Result<OracleResult, InstanceTooLarge> {
    let n = instance.n;
    if n > MAX_BRUTE_FORCE_N {
        return Err(InstanceTooLarge { n, limit: MAX_BRUTE_FORCE_N });
    }
    let mut best_value = 0i64;
    let mut best: Vec<usize> = Vec::new();
    let mut counts = vec![0usize; instance.m as usize];
    for mask in 1u64..(1u64 << n) {
        let mut weight = 0i64;
        let mut profit = 0i64;
        let mut total = 0usize;
        counts.iter_mut().for_each(|c| *c = 0);
        for (i, it) in instance.items.iter().enumerate() {
            if mask & (1 << i) != 0 {
                weight += it.weight;
                profit += it.profit;
                counts[(it.color - 1) as usize] += 1;
                total += 1;
            }
        }
        if weight > instance.b || (check_colors && !is_color_feasible(&counts, total)) {
            continue;
        }
        if profit > best_value || (profit == best_value && {
            let subset: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| i + 1).collect();
            subset < best
        }) {
            best_value = profit;
            best = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| i + 1).collect();
        }
    }
    Ok(OracleResult { value: best_value, witness: best, enumerated: 1u64 << n })
}

/// Exhaustive optimum of the colored problem: max profit over subsets with
/// weight ≤ b that satisfy the adjacency condition 2·k_c ≤ |S|+1 for every
/// color. The empty set (value 0) is always feasible, so the value is ≥ 0.
pub fn brute_force_ckp(instance: &Instance) -> Result<OracleResult, InstanceTooLarge> {
    brute_force(instance, true)
}

/// Exhaustive optimum of the plain knapsack (colors ignored).
pub fn brute_force_kp(instance: &Instance) -> Result<OracleResult, InstanceTooLarge> {
    brute_force(instance, false)
}

fn rat(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpVertexResult {
    pub value: BigRational,
    /// Maximizing vertex, one coordinate per item. First one found under the
    /// documented enumeration order; ties never replace it.
    pub x: Vec<BigRational>,
    /// Number of candidate equation systems enumerated.
    pub enumerated: u64,
}

/// Solves the k×k system a·x = rhs by exact Gaussian elimination.
/// Returns None when the matrix is singular.
fn solve_square(mut a: Vec<Vec<BigRational>>, mut rhs: Vec<BigRational>) -> Option<Vec<BigRational>> {
    let k = a.len();
    for col in 0..k {
        let pivot = (col..k).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        rhs.swap(col, pivot);
        for r in 0..k {
            if r != col && !a[r][col].is_zero() {
                let factor = &a[r][col] / &a[col][col];
                for c in col..k {
                    let t = &factor * &a[col][c];
                    a[r][c] -= t;
                }
                let t = &factor * &rhs[col];
                rhs[r] -= t;
            }
        }
    }
    Some((0..k).map(|i| &rhs[i] / &a[i][i]).collect())
}

/// Visits all k-subsets of {0..n-1} in lexicographic order.
fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        // Advance to the next combination.
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
        }
        if idx[i] == i + n - k {
            return;
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Exact optimum of the LP relaxation
///
///   max Σ p_i x_i   s.t.   Σ w_i x_i ≤ b,
///                          Σ_{κ_i = c} x_i − Σ_{κ_i ≠ c} x_i ≤ 1  (c = 1..m),
///                          0 ≤ x_i ≤ 1,
///
/// by enumerating basic points: an optimum lies at a vertex, where n
/// constraints are active. A consistent active set never contains both bounds
/// of one variable, so every candidate decomposes as k active structural rows
/// (from the capacity row and the m color rows) plus a 0/1 fixing of the n−k
/// remaining variables; the k free variables are solved for exactly. Each
/// candidate is kept only if it satisfies every constraint; the maximizer is
/// the first one found under (k ascending, structural subsets lex, free-var
/// subsets lex, fixings in binary counting order with the lowest bit on the
/// smallest fixed index).
pub fn lp_vertex_oracle(instance: &Instance) -> Result<LpVertexResult, InstanceTooLarge> {
    let n = instance.n;
    if n > MAX_LP_ORACLE_N {
        return Err(InstanceTooLarge { n, limit: MAX_LP_ORACLE_N });
    }
    let m = instance.m as usize;
    // Structural rows: row 0 = capacity; row c = color c. coeff[r][i], rhs[r].
    let mut coeff: Vec<Vec<i64>> = Vec::with_capacity(m + 1);
    let mut rhs: Vec<i64> = Vec::with_capacity(m + 1);
    coeff.push(instance.items.iter().map(|it| it.weight).collect());
    rhs.push(instance.b);
    for c in 1..=instance.m {
        coeff.push(
            instance
                .items
                .iter()
                .map(|it| if it.color == c { 1 } else { -1 })
                .collect(),
        );
        rhs.push(1);
    }

    let mut enumerated = 0u64;
    let mut best: Option<(BigRational, Vec<BigRational>)> = None;

    for k in 0..=n.min(m + 1) {
        for_each_combination(m + 1, k, |rows| {
            let rows = rows.to_vec();
            for_each_combination(n, k, |free| {
                let fixed: Vec<usize> = (0..n).filter(|i| !free.contains(i)).collect();
                for assign in 0u64..(1u64 << fixed.len()) {
                    enumerated += 1;
                    let mut x: Vec<BigRational> = vec![BigRational::zero(); n];
                    for (bit, &i) in fixed.iter().enumerate() {
                        if assign & (1 << bit) != 0 {
                            x[i] = BigRational::one();
                        }
                    }
                    if k > 0 {
                        let a: Vec<Vec<BigRational>> = rows
                            .iter()
                            .map(|&r| free.iter().map(|&i| rat(coeff[r][i])).collect())
                            .collect();
                        let b: Vec<BigRational> = rows
                            .iter()
                            .map(|&r| {
                                rat(rhs[r])
                                    - fixed
                                        .iter()
                                        .map(|&i| rat(coeff[r][i]) * &x[i])
                                        .sum::<BigRational>()
                            })
                            .collect();
                        let Some(sol) = solve_square(a, b) else { continue };
                        for (&i, v) in free.iter().zip(sol) {
                            x[i] = v;
                        }
                        if free.iter().any(|&i| x[i].is_negative() || x[i] > BigRational::one()) {
                            continue;
                        }
                    }
                    let feasible = coeff.iter().zip(&rhs).all(|(row, &r)| {
                        row.iter()
                            .zip(&x)
                            .map(|(&c, xi)| rat(c) * xi)
                            .sum::<BigRational>()
                            <= rat(r)
                    });
                    if !feasible {
                        continue;
                    }
                    let value: BigRational = instance
                        .items
                        .iter()
                        .zip(&x)
                        .map(|(it, xi)| rat(it.profit) * xi)
                        .sum();
                    if best.as_ref().is_none_or(|(bv, _)| value > *bv) {
                        best = Some((value, x));
                    }
                }
            });
        });
    }
    let (value, x) = best.expect("x = 0 is always enumerated and feasible");
    Ok(LpVertexResult { value, x, enumerated })
}
