//! Problem and solution types, the color-feasibility test, ordering
//! construction, and the plain-text instance format.
//!
//! Items carry 1-based external indices everywhere in the public API; colors
//! run 1..=m. A selection is color-feasible iff it can be arranged with no two
//! adjacent items of the same color, which holds iff every color c satisfies
//! 2·k_c ≤ |S| + 1 (k_c = number of selected items of color c).

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Item {
    pub weight: i64,
    pub profit: i64,
    /// Color in 1..=m.
    pub color: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub n: usize,
    /// Number of colors; every item color lies in 1..=m.
    pub m: u32,
    /// Knapsack capacity, > 0.
    pub b: i64,
    pub items: Vec<Item>,
}

impl Instance {
    pub fn new(m: u32, b: i64, items: Vec<Item>) -> Self {
        Instance { n: items.len(), m, b, items }
    }

    /// Item of external (1-based) index `idx`.
    pub fn item(&self, idx: usize) -> &Item {
        &self.items[idx - 1]
    }

    /// 1-based indices of the items of color `c`, ascending.
    pub fn color_class(&self, c: u32) -> Vec<usize> {
        self.items
            .iter()
            .enumerate()
            .filter(|(_, it)| it.color == c)
            .map(|(i, _)| i + 1)
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValidationError {
    ItemCountMismatch { declared: usize, actual: usize },
    NonPositiveCapacity { b: i64 },
    ZeroColors,
    NonPositiveWeight { item: usize, weight: i64 },
    ColorOutOfRange { item: usize, color: u32, m: u32 },
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ValidationError::ItemCountMismatch { declared, actual } => {
                write!(f, "declared n = {declared} but instance has {actual} items")
            }
            ValidationError::NonPositiveCapacity { b } => {
                write!(f, "capacity must be positive, got b = {b}")
            }
            ValidationError::ZeroColors => write!(f, "number of colors must be positive"),
            ValidationError::NonPositiveWeight { item, weight } => {
                write!(f, "item {item}: weight must be positive, got {weight}")
            }
            ValidationError::ColorOutOfRange { item, color, m } => {
                write!(f, "item {item}: color {color} outside 1..={m}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ValidationError {}

/// Checks structural well-formedness: item count matches `n`, b > 0, m ≥ 1,
/// all weights ≥ 1, all colors in 1..=m. Profits may be any integer,
/// negatives included. Reports the first violation in that field order.
pub fn validate(instance: &Instance) -> Result<(), ValidationError> {
    if instance.n != instance.items.len() {
        return Err(ValidationError::ItemCountMismatch {
            declared: instance.n,
            actual: instance.items.len(),
        });
    }
    if instance.b <= 0 {
        return Err(ValidationError::NonPositiveCapacity { b: instance.b });
    }
    if instance.m == 0 {
        return Err(ValidationError::ZeroColors);
    }
    for (i, it) in instance.items.iter().enumerate() {
        if it.weight <= 0 {
            return Err(ValidationError::NonPositiveWeight { item: i + 1, weight: it.weight });
        }
        if it.color == 0 || it.color > instance.m {
            return Err(ValidationError::ColorOutOfRange { item: i + 1, color: it.color, m: instance.m });
        }
    }
    Ok(())
}

/// Counting form of the adjacency condition: a multiset with per-color counts
/// `counts` and `total` items in all admits an ordering with no two adjacent
/// items of the same color iff every count k satisfies 2k ≤ total + 1.
pub fn is_color_feasible(counts: &[usize], total: usize) -> bool {
    debug_assert_eq!(counts.iter().sum::<usize>(), total);
    counts.iter().all(|&k| 2 * k <= total + 1)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    /// Selected items as 1-based indices, strictly ascending.
    pub selected: Vec<usize>,
    pub profit: i64,
    pub weight: i64,
    /// color_counts[c-1] = number of selected items of color c.
    pub color_counts: Vec<usize>,
    /// A witness arrangement with no two adjacent equal colors, if one has
    /// been constructed. Permutation of `selected`.
    pub ordering: Option<Vec<usize>>,
}

impl Solution {
    /// Builds a solution record from a set of 1-based indices (any order,
    /// duplicates rejected). No ordering is constructed.
    pub fn from_selected(instance: &Instance, selected: impl IntoIterator<Item = usize>) -> Self {
        let mut sel: Vec<usize> = selected.into_iter().collect();
        sel.sort_unstable();
        if let Some(w) = sel.windows(2).find(|w| w[0] == w[1]) {
            panic!("duplicate selected index {}", w[0]);
        }
        let mut profit = 0i64;
        let mut weight = 0i64;
        let mut color_counts = alloc::vec![0usize; instance.m as usize];
        for &i in &sel {
            let it = instance.item(i);
            profit += it.profit;
            weight += it.weight;
            color_counts[(it.color - 1) as usize] += 1;
        }
        Solution { selected: sel, profit, weight, color_counts, ordering: None }
    }

    pub fn empty(instance: &Instance) -> Self {
        Solution {
            selected: Vec::new(),
            profit: 0,
            weight: 0,
            color_counts: alloc::vec![0usize; instance.m as usize],
            ordering: Some(Vec::new()),
        }
    }

    pub fn is_color_feasible(&self) -> bool {
        is_color_feasible(&self.color_counts, self.selected.len())
    }
}

/// True iff `ordering` is a permutation of `selected` with no two adjacent
/// items of equal color.
pub fn ordering_is_valid(instance: &Instance, selected: &[usize], ordering: &[usize]) -> bool {
    let mut a = selected.to_vec();
    let mut o = ordering.to_vec();
    a.sort_unstable();
    o.sort_unstable();
    if a != o {
        return false;
    }
    ordering
        .windows(2)
        .all(|w| instance.item(w[0]).color != instance.item(w[1]).color)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Infeasible;

impl fmt::Display for Infeasible {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "selection admits no ordering without adjacent equal colors")
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Infeasible {}

/// Builds a witness ordering for a color-feasible selection, or reports
/// infeasibility.
///
/// Greedy: repeatedly emit an item whose color has the largest remaining
/// count among colors different from the previously emitted one; ties go to
/// the smallest color index, then the smallest item index. The greedy choice
/// keeps every remaining count k at 2k ≤ r + 1 (r = items still to place),
/// so it never gets stuck on a feasible selection.
pub fn construct_ordering(solution: &Solution, instance: &Instance) -> Result<Vec<usize>, Infeasible> {
    if !solution.is_color_feasible() {
        return Err(Infeasible);
    }
    // queues[c-1]: unplaced items of color c, ascending; emitted from front.
    let mut queues: Vec<Vec<usize>> = alloc::vec![Vec::new(); instance.m as usize];
    for &i in solution.selected.iter().rev() {
        queues[(instance.item(i).color - 1) as usize].push(i);
    }
    let mut out = Vec::with_capacity(solution.selected.len());
    let mut prev_color = 0u32;
    for _ in 0..solution.selected.len() {
        let (ci, _) = queues
            .iter()
            .enumerate()
            .filter(|&(ci, q)| ci as u32 + 1 != prev_color && !q.is_empty())
            .max_by(|a, b| a.1.len().cmp(&b.1.len()).then(b.0.cmp(&a.0)))
            .expect("feasible selection always has an emittable color");
        out.push(queues[ci].pop().expect("chosen queue is nonempty"));
        prev_color = ci as u32 + 1;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseError {
    /// No header line `n m b` found.
    MissingHeader,
    /// A data line does not consist of the expected integer fields.
    Malformed { line: usize },
    /// A field is integer-shaped but does not fit the target type.
    IntegerOverflow { line: usize },
    /// Header declared `declared` items but `found` item lines are present.
    InconsistentCount { declared: usize, found: usize },
    /// Parsed shape is structurally invalid (e.g. color out of range).
    Validation(ValidationError),
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::MissingHeader => write!(f, "missing header line `n m b`"),
            ParseError::Malformed { line } => write!(f, "line {line}: malformed"),
            ParseError::IntegerOverflow { line } => write!(f, "line {line}: integer out of range"),
            ParseError::InconsistentCount { declared, found } => {
                write!(f, "header declares {declared} items but file has {found} item lines")
            }
            ParseError::Validation(e) => write!(f, "invalid instance: {e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ParseError {}

fn parse_int<T: core::str::FromStr>(tok: &str, line: usize) -> Result<T, ParseError> {
    tok.parse::<T>().map_err(|_| {
        let body = tok.strip_prefix('-').unwrap_or(tok);
        if !body.is_empty() && body.bytes().all(|b| b.is_ascii_digit()) {
            ParseError::IntegerOverflow { line }
        } else {
            ParseError::Malformed { line }
        }
    })
}

/// Parses the plain-text format: first data line `n m b`, then n lines
/// `w p κ` (whitespace-separated integers). Blank lines and lines whose
/// first non-space character is `#` are ignored. The parsed instance is
/// validated before being returned.
pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut data = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = data.next().ok_or(ParseError::MissingHeader)?;
    let mut toks = header.split_whitespace();
    let mut next_tok = |line: usize| toks.next().ok_or(ParseError::Malformed { line });
    let n: usize = parse_int(next_tok(hline)?, hline)?;
    let m: u32 = parse_int(next_tok(hline)?, hline)?;
    let b: i64 = parse_int(next_tok(hline)?, hline)?;
    if toks.next().is_some() {
        return Err(ParseError::Malformed { line: hline });
    }

    let mut items = Vec::with_capacity(n);
    for (line, l) in &mut data {
        if items.len() == n {
            // Count the extra data lines for the error report.
            let extra = 1 + data.count();
            return Err(ParseError::InconsistentCount { declared: n, found: n + extra });
        }
        let mut toks = l.split_whitespace();
        let mut next_tok = || toks.next().ok_or(ParseError::Malformed { line });
        let weight: i64 = parse_int(next_tok()?, line)?;
        let profit: i64 = parse_int(next_tok()?, line)?;
        let color: u32 = parse_int(next_tok()?, line)?;
        if toks.next().is_some() {
            return Err(ParseError::Malformed { line });
        }
        items.push(Item { weight, profit, color });
    }
    if items.len() != n {
        return Err(ParseError::InconsistentCount { declared: n, found: items.len() });
    }

    let instance = Instance { n, m, b, items };
    validate(&instance).map_err(ParseError::Validation)?;
    Ok(instance)
}

/// Renders the instance in the same plain-text format `parse_instance`
/// accepts, with a trailing newline. `parse_instance(&write_instance(x))`
/// reproduces `x` for every valid instance.
pub fn write_instance(instance: &Instance) -> String {
    use core::fmt::Write;
    let mut s = String::new();
    let _ = writeln!(s, "{} {} {}", instance.n, instance.m, instance.b);
    for it in &instance.items {
        let _ = writeln!(s, "{} {} {}", it.weight, it.profit, it.color);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    pub(crate) fn fig1() -> Instance {
        Instance::new(
            2,
            10,
            vec![
                Item { weight: 6, profit: 15, color: 1 },
                Item { weight: 4, profit: 8, color: 1 },
                Item { weight: 2, profit: 3, color: 2 },
                Item { weight: 1, profit: 1, color: 2 },
            ],
        )
    }

    #[test]
    fn validate_accepts_well_formed() {
        assert_eq!(validate(&fig1()), Ok(()));
        // Zero items is fine as long as the scalars are positive.
        assert_eq!(validate(&Instance::new(1, 1, vec![])), Ok(()));
    }

    #[test]
    fn validate_reports_first_violation() {
        let mut bad = fig1();
        bad.items[2].color = 3;
        assert_eq!(
            validate(&bad),
            Err(ValidationError::ColorOutOfRange { item: 3, color: 3, m: 2 })
        );
        let mut bad = fig1();
        bad.b = 0;
        assert_eq!(validate(&bad), Err(ValidationError::NonPositiveCapacity { b: 0 }));
        let mut bad = fig1();
        bad.items[1].weight = -4;
        assert_eq!(
            validate(&bad),
            Err(ValidationError::NonPositiveWeight { item: 2, weight: -4 })
        );
        let mut bad = fig1();
        bad.n = 7;
        assert_eq!(
            validate(&bad),
            Err(ValidationError::ItemCountMismatch { declared: 7, actual: 4 })
        );
        assert_eq!(validate(&Instance::new(0, 5, vec![])), Err(ValidationError::ZeroColors));
    }

    #[test]
    fn negative_profit_is_legal() {
        let mut inst = fig1();
        inst.items[0].profit = -3;
        assert_eq!(validate(&inst), Ok(()));
    }

    #[test]
    fn feasibility_counting_condition() {
        assert!(is_color_feasible(&[], 0));
        assert!(is_color_feasible(&[0, 0], 0));
        assert!(is_color_feasible(&[1, 0], 1));
        // Two items of one color and nothing else: no valid arrangement.
        assert!(!is_color_feasible(&[2, 0], 2));
        // {1,2} in the four-item example: both color 1.
        assert!(!is_color_feasible(&[2, 0], 2));
        // {1,3,4}: one of color 1, two of color 2.
        assert!(is_color_feasible(&[1, 2], 3));
        // 3 of one color among 5 works, 4 among 6 does not.
        assert!(is_color_feasible(&[3, 2], 5));
        assert!(!is_color_feasible(&[4, 2], 6));
    }

    #[test]
    fn solution_from_selected_sums() {
        let inst = fig1();
        let s = Solution::from_selected(&inst, [4, 1, 3]);
        assert_eq!(s.selected, vec![1, 3, 4]);
        assert_eq!(s.profit, 19);
        assert_eq!(s.weight, 9);
        assert_eq!(s.color_counts, vec![1, 2]);
        assert!(s.is_color_feasible());
    }

    #[test]
    fn ordering_greedy_witness() {
        let inst = fig1();
        let s = Solution::from_selected(&inst, [1, 3, 4]);
        let ord = construct_ordering(&s, &inst).unwrap();
        // Color 2 has the larger remaining count, so item 3 leads.
        assert_eq!(ord, vec![3, 1, 4]);
        assert!(ordering_is_valid(&inst, &s.selected, &ord));
    }

    #[test]
    fn ordering_rejects_infeasible() {
        let inst = fig1();
        let s = Solution::from_selected(&inst, [1, 2]);
        assert_eq!(construct_ordering(&s, &inst), Err(Infeasible));
    }

    #[test]
    fn ordering_singleton_and_empty() {
        let inst = fig1();
        let s = Solution::from_selected(&inst, [2]);
        assert_eq!(construct_ordering(&s, &inst).unwrap(), vec![2]);
        let e = Solution::empty(&inst);
        assert_eq!(construct_ordering(&e, &inst).unwrap(), Vec::<usize>::new());
    }

    #[test]
    fn parse_basic_and_roundtrip() {
        let text = "4 2 10\n6 15 1\n4 8 1\n2 3 2\n1 1 2\n";
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst, fig1());
        assert_eq!(write_instance(&inst), text);
        assert_eq!(parse_instance(&write_instance(&inst)).unwrap(), inst);
    }

    #[test]
    fn parse_skips_comments_and_blanks() {
        let text = "# colored knapsack\n\n  4 2 10\n6 15 1\n# middle note\n4 8 1\n2 3 2\n\n1 1 2\n";
        assert_eq!(parse_instance(text).unwrap(), fig1());
    }

    #[test]
    fn parse_zero_item_instance() {
        let inst = parse_instance("0 1 1\n").unwrap();
        assert_eq!(inst, Instance::new(1, 1, vec![]));
    }

    #[test]
    fn parse_error_cases() {
        assert_eq!(parse_instance("# only comments\n"), Err(ParseError::MissingHeader));
        assert_eq!(parse_instance("1 2\n"), Err(ParseError::Malformed { line: 1 }));
        assert_eq!(parse_instance("1 2 10\n3 x 1\n"), Err(ParseError::Malformed { line: 2 }));
        assert_eq!(parse_instance("1 2 10\n3 4 1 9\n"), Err(ParseError::Malformed { line: 2 }));
        assert_eq!(
            parse_instance("2 2 10\n3 4 1\n"),
            Err(ParseError::InconsistentCount { declared: 2, found: 1 })
        );
        assert_eq!(
            parse_instance("1 2 10\n3 4 1\n5 6 2\n7 8 1\n"),
            Err(ParseError::InconsistentCount { declared: 1, found: 3 })
        );
        assert_eq!(
            parse_instance("1 2 10\n99999999999999999999 4 1\n"),
            Err(ParseError::IntegerOverflow { line: 2 })
        );
        assert_eq!(
            parse_instance("1 2 10\n3 4 3\n"),
            Err(ParseError::Validation(ValidationError::ColorOutOfRange {
                item: 1,
                color: 3,
                m: 2
            }))
        );
    }

    #[test]
    fn write_negative_profit_roundtrip() {
        let inst = Instance::new(3, 7, vec![Item { weight: 2, profit: -5, color: 3 }]);
        assert_eq!(write_instance(&inst), "1 3 7\n2 -5 3\n");
        assert_eq!(parse_instance(&write_instance(&inst)).unwrap(), inst);
    }
}
