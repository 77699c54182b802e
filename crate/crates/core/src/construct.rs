//! Generator-matrix constructions for binary batch and PIR codes.
//!
//! Four families are built here, each systematic (`G = [I_k | ...]`) and each
//! certified post-construction against its structural contract:
//!
//! * [`construct_t2`] — `t = 2`, any `r ≥ 2`: block identities plus one
//!   all-one parity column per block. Length-optimal.
//! * [`construct_r2`] — `r = 2`, `2 ≤ t ≤ max{⌈k/2⌉, 2} + 2`: the
//!   non-systematic part is the incidence matrix of a `(t-1)`-regular simple
//!   graph on `k` vertices (one deficient vertex plus a weight-1 column when
//!   parity demands it). Batch for `t ≤ 4`, PIR beyond.
//! * [`construct_divisible`] — `r ≥ 3`, `r | k`, `2 < t ≤ max{k/r, r} + 2`:
//!   `[I_k | A | B]` with block-indicator columns `A` and a filling `B` that
//!   keeps `[A | B]` free of 2×2 all-ones submatrices.
//! * [`construct_t3_remainder`] — `t = 3`, `r ≥ 3`, `r ∤ k`:
//!   `[I_k | A | B | C]` handling the short block of size `s = k mod r`.
//!
//! [`construct_simplex`] provides binary simplex codes as a reference family,
//! and [`construct`] dispatches to whichever family covers the parameters.

use crate::gf2::BitMatrix;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConstructError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("construction search exhausted without a valid matrix: {0}")]
    ConstructionInfeasible(String),
    #[error("no construction family covers k={k}, r={r}, t={t}")]
    NoConstructionKnown { k: usize, r: usize, t: usize },
    #[error("simplex dimension {m} exceeds the cap of {max}")]
    DimensionTooLarge { m: usize, max: usize },
}

type Result<T> = std::result::Result<T, ConstructError>;

fn invalid(msg: impl Into<String>) -> ConstructError {
    ConstructError::InvalidParams(msg.into())
}

fn infeasible(msg: impl Into<String>) -> ConstructError {
    ConstructError::ConstructionInfeasible(msg.into())
}

/// The parameter tuple of a constructed code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeParams {
    pub n: usize,
    pub k: usize,
    pub r: usize,
    pub t: usize,
    /// Minimum distance when known; computed lazily elsewhere.
    pub d: Option<usize>,
    pub q: usize,
    pub systematic: bool,
}

impl CodeParams {
    pub fn new(n: usize, k: usize, r: usize, t: usize) -> Result<Self> {
        if k < 1 || k > n {
            return Err(invalid(format!("need 1 <= k <= n, got k={k}, n={n}")));
        }
        if r < 1 || t < 1 {
            return Err(invalid(format!("need r >= 1 and t >= 1, got r={r}, t={t}")));
        }
        Ok(CodeParams {
            n,
            k,
            r,
            t,
            d: None,
            q: 2,
            systematic: false,
        })
    }

    pub fn with_distance(mut self, d: usize) -> Result<Self> {
        if d < 1 || d > self.n - self.k + 1 {
            return Err(invalid(format!(
                "need 1 <= d <= n-k+1, got d={d}, n={}, k={}",
                self.n, self.k
            )));
        }
        self.d = Some(d);
        Ok(self)
    }

    /// The rate `k/n` as a reduced fraction.
    pub fn rate_reduced(&self) -> (usize, usize) {
        fn gcd(a: usize, b: usize) -> usize {
            if b == 0 {
                a
            } else {
                gcd(b, a % b)
            }
        }
        let g = gcd(self.k, self.n);
        (self.k / g, self.n / g)
    }
}

/// Derived quantities for the `r ∤ k` constructions and bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RemainderParams {
    /// `k mod r`.
    pub s: usize,
    /// `min{r - s, ⌊k/r⌋}` — ones in the first column of the `B1` block.
    pub tau: usize,
    /// `min{r - 1, ⌊k/r⌋}` — ones in each later `B1` column.
    pub eta: usize,
    /// `min{r, ⌊k/r⌋}` — ones per column of `C`.
    pub gamma: usize,
    /// `max{⌈k/r⌉, r}`.
    pub zeta: usize,
}

impl RemainderParams {
    pub fn derive(k: usize, r: usize) -> Self {
        let s = k % r;
        let f = k / r;
        RemainderParams {
            s,
            tau: (r - s).min(f),
            eta: (r - 1).min(f),
            gamma: r.min(f),
            zeta: k.div_ceil(r).max(r),
        }
    }
}

/// Which construction family produced a matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Block identities with per-block all-one parity columns (`t = 2`).
    T2Block,
    /// Graph-incidence construction with column weight at most 2 (`r = 2`).
    R2Graph,
    /// `[I | A | B]` for `r | k`.
    Divisible,
    /// `[I | A | B | C]` for `t = 3`, `r ∤ k`.
    T3Remainder,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::T2Block => "t2-block",
            Family::R2Graph => "r2-graph",
            Family::Divisible => "divisible",
            Family::T3Remainder => "t3-remainder",
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A dispatched construction result.
#[derive(Debug, Clone)]
pub struct Construction {
    pub family: Family,
    pub params: CodeParams,
    pub matrix: BitMatrix,
}

/// Upper limit on `t` for the `r = 2` family: `max{⌈k/2⌉, 2} + 2`.
pub fn r2_max_t(k: usize) -> usize {
    k.div_ceil(2).max(2) + 2
}

/// Maximum `t` for the `r | k` family: `max{k/r, r} + 2`.
pub fn divisible_max_t(k: usize, r: usize) -> usize {
    (k / r).max(r) + 2
}

// ---------------------------------------------------------------------------
// t = 2, r >= 2
// ---------------------------------------------------------------------------

/// Systematic batch code for `t = 2`: `n = k + ⌈k/r⌉`.
///
/// Rows split into `⌈k/r⌉` blocks of size `r` (the last of size `k mod r`
/// when `r ∤ k`); each block gets one all-one parity column.
pub fn construct_t2(k: usize, r: usize) -> Result<BitMatrix> {
    if k < 1 {
        return Err(invalid("construct_t2 needs k >= 1"));
    }
    if r < 2 {
        return Err(invalid("construct_t2 needs r >= 2"));
    }
    let blocks = k.div_ceil(r);
    let n = k + blocks;
    let mut g = BitMatrix::zeros(k, n);
    for i in 0..k {
        g.set(i, i, true);
    }
    for b in 0..blocks {
        let lo = b * r;
        let hi = ((b + 1) * r).min(k);
        for i in lo..hi {
            g.set(i, k + b, true);
        }
    }
    Ok(g)
}

// ---------------------------------------------------------------------------
// r = 2, t >= 2
// ---------------------------------------------------------------------------

/// Systematic code with `r = 2` and `n = k + ⌈(t-1)·k/2⌉`.
///
/// The parity part is the edge-incidence matrix of a `(t-1)`-regular simple
/// graph on the `k` rows; when `k` and `t-1` are both odd one vertex stays at
/// degree `t-2` and receives a weight-1 column instead. `k ∈ {2, 3}` with
/// `t ∈ {3, 4}` use fixed matrices of lengths 5/7 and 6/9: three or fewer
/// rows cannot carry enough distinct edges.
pub fn construct_r2(k: usize, t: usize) -> Result<BitMatrix> {
    if k < 2 {
        return Err(invalid("construct_r2 needs k >= 2"));
    }
    if t < 2 || t > r2_max_t(k) {
        return Err(invalid(format!(
            "construct_r2 needs 2 <= t <= {}, got t={t}",
            r2_max_t(k)
        )));
    }
    if k <= 3 && t >= 3 {
        return Ok(r2_small_case(k, t));
    }
    let delta = t - 1;
    if delta > k - 1 {
        return Err(invalid(format!(
            "row weight t-1={delta} exceeds the simple-graph degree limit k-1={}",
            k - 1
        )));
    }
    let (edges, deficient) = near_regular_graph(k, delta)?;
    let parity_cols = edges.len() + usize::from(deficient.is_some());
    let mut g = BitMatrix::zeros(k, k + parity_cols);
    for i in 0..k {
        g.set(i, i, true);
    }
    for (j, &(a, b)) in edges.iter().enumerate() {
        g.set(a, k + j, true);
        g.set(b, k + j, true);
    }
    if let Some(v) = deficient {
        g.set(v, k + edges.len(), true);
    }
    validate_r2(&g, k, t)?;
    Ok(g)
}

fn r2_small_case(k: usize, t: usize) -> BitMatrix {
    // Fixed instances for the degenerate row counts. Lengths 5/7 for k=2 and
    // 6/9 for k=3; all four pass exhaustive batch verification at r=2.
    let cols: Vec<Vec<usize>> = match (k, t) {
        (2, 3) => vec![vec![0, 1], vec![0], vec![1]],
        (2, 4) => vec![vec![0, 1], vec![0], vec![1], vec![0], vec![1]],
        (3, 3) => vec![vec![0, 1], vec![0, 2], vec![1, 2]],
        (3, 4) => vec![
            vec![0, 1],
            vec![0, 2],
            vec![1, 2],
            vec![0],
            vec![1],
            vec![2],
        ],
        _ => unreachable!("r2_small_case called outside k<=3, t in {{3,4}}"),
    };
    let mut g = BitMatrix::zeros(k, k + cols.len());
    for i in 0..k {
        g.set(i, i, true);
    }
    for (j, rows) in cols.iter().enumerate() {
        for &row in rows {
            g.set(row, k + j, true);
        }
    }
    g
}

/// Edge list of a `delta`-regular simple graph on `k` vertices, or a
/// near-regular one (single vertex of degree `delta - 1`, reported) when
/// `delta·k` is odd.
///
/// Base pattern: circulant offsets `1..=⌊delta/2⌋`, plus the antipodal
/// matching when `delta` is odd and `k` even. The odd/odd case completes the
/// circulant with a near-perfect matching found by lowest-index-first
/// backtracking over the non-circulant pairs.
fn near_regular_graph(k: usize, delta: usize) -> Result<(Vec<(usize, usize)>, Option<usize>)> {
    let m = delta / 2;
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for off in 1..=m {
        for i in 0..k {
            let j = (i + off) % k;
            edges.push((i.min(j), i.max(j)));
        }
    }
    let mut deficient = None;
    if delta % 2 == 1 {
        if k % 2 == 0 {
            for i in 0..k / 2 {
                edges.push((i, i + k / 2));
            }
        } else {
            let circ_dist = |a: usize, b: usize| {
                let d = a.abs_diff(b);
                d.min(k - d)
            };
            let banned = |a: usize, b: usize| circ_dist(a, b) <= m;
            let (matching, skipped) = near_perfect_matching(k, &banned).ok_or_else(|| {
                infeasible(format!("no completion matching for k={k}, delta={delta}"))
            })?;
            edges.extend(matching);
            deficient = Some(skipped);
        }
    }
    edges.sort_unstable();
    let distinct = edges.windows(2).all(|w| w[0] != w[1]);
    if !distinct {
        return Err(infeasible(format!(
            "duplicate edge for k={k}, delta={delta}"
        )));
    }
    Ok((edges, deficient))
}

/// Matching on `k` (odd) vertices that leaves exactly one vertex unmatched,
/// avoiding banned pairs. Deterministic: lowest unmatched vertex first,
/// lowest partner first, skipping tried last.
fn near_perfect_matching(
    k: usize,
    banned: &dyn Fn(usize, usize) -> bool,
) -> Option<(Vec<(usize, usize)>, usize)> {
    fn rec(
        k: usize,
        banned: &dyn Fn(usize, usize) -> bool,
        matched: &mut [bool],
        skipped: &mut Option<usize>,
        pairs: &mut Vec<(usize, usize)>,
    ) -> bool {
        let Some(v) = (0..k).find(|&v| !matched[v]) else {
            return skipped.is_some();
        };
        matched[v] = true;
        for u in v + 1..k {
            if matched[u] || banned(v, u) {
                continue;
            }
            matched[u] = true;
            pairs.push((v, u));
            if rec(k, banned, matched, skipped, pairs) {
                return true;
            }
            pairs.pop();
            matched[u] = false;
        }
        if skipped.is_none() {
            *skipped = Some(v);
            if rec(k, banned, matched, skipped, pairs) {
                return true;
            }
            *skipped = None;
        }
        matched[v] = false;
        false
    }

    let mut matched = vec![false; k];
    let mut skipped = None;
    let mut pairs = Vec::new();
    rec(k, banned, &mut matched, &mut skipped, &mut pairs)
        .then(|| (pairs, skipped.expect("odd k forces one skip")))
}

fn validate_r2(g: &BitMatrix, k: usize, t: usize) -> Result<()> {
    let n = k + ((t - 1) * k).div_ceil(2);
    if g.cols() != n {
        return Err(infeasible(format!("r2 length {} != {n}", g.cols())));
    }
    if !g.has_identity_prefix() {
        return Err(infeasible("r2 matrix is not systematic".to_string()));
    }
    let odd_case = k % 2 == 1 && (t - 1) % 2 == 1;
    for c in k..g.cols() {
        let w = g.column_weight(c);
        let last = c == g.cols() - 1;
        if !(w == 2 || (odd_case && last && w == 1)) {
            return Err(infeasible(format!("r2 column {c} has weight {w}")));
        }
    }
    for row in 0..k {
        let w = g.row_weight(row) - 1;
        if w != t - 1 {
            return Err(infeasible(format!("r2 row {row} has parity weight {w}")));
        }
    }
    let parity = g
        .submatrix_columns(&crate::gf2::ColumnSet::new((k..g.cols()).collect(), g.cols()).unwrap());
    if parity.has_one_square() {
        return Err(infeasible(
            "r2 parity block contains a 1-square".to_string(),
        ));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// r | k, t > 2
// ---------------------------------------------------------------------------

/// Systematic PIR code (batch for `t ≤ 4`) for `r ≥ 3`, `r | k`:
/// `G = [I_k | A | B]` with `n = (r+1)·k/r + (t-2)·max{k/r, r}`.
///
/// `A` holds one indicator column per row block. `B` has `(t-2)·max{k/r, r}`
/// columns of weight `min{r, k/r}`, at most one entry per block, every row of
/// weight `t-2`, and no 2×2 all-ones submatrix anywhere in `[A | B]`.
pub fn construct_divisible(k: usize, r: usize, t: usize) -> Result<BitMatrix> {
    if r < 3 {
        return Err(invalid(
            "construct_divisible needs r >= 3 (use construct_r2 for r = 2)",
        ));
    }
    if k < 1 || k % r != 0 {
        return Err(invalid(format!(
            "construct_divisible needs r | k, got k={k}, r={r}"
        )));
    }
    let zeta = (k / r).max(r);
    if t <= 2 || t > zeta + 2 {
        return Err(invalid(format!(
            "construct_divisible needs 2 < t <= {}, got t={t}",
            zeta + 2
        )));
    }
    let g_blocks = k / r;
    let w = r.min(g_blocks);
    let groups = t - 2;

    // Strategy ladder, cheapest first, all deterministic: the shift
    // pattern outright; the group-structured search seeded with whatever
    // pattern groups fit, on a short leash since hard instances often
    // yield faster to a different shape; the ungrouped filler; and the
    // group-structured search from scratch with the largest budget.
    let a = block_indicator_matrix(k, r, g_blocks);
    let seeds = linear_group_prefix(r, g_blocks, zeta, groups);
    let columns = (seeds.len() == groups)
        .then(|| seeds.concat())
        .filter(|cols| b_columns_valid(&a, k, r, w, groups, cols))
        .or_else(|| {
            b_fill_grouped(k, r, w, zeta, groups, &seeds, 2_000_000)
                .filter(|cols| b_columns_valid(&a, k, r, w, groups, cols))
        })
        .or_else(|| {
            b_fill_dfs(k, r, g_blocks, w, groups * zeta, groups, 20_000_000)
                .filter(|cols| b_columns_valid(&a, k, r, w, groups, cols))
        })
        .or_else(|| {
            b_fill_grouped(k, r, w, zeta, groups, &[], 50_000_000)
                .filter(|cols| b_columns_valid(&a, k, r, w, groups, cols))
        })
        .ok_or_else(|| infeasible(format!("no B block for k={k}, r={r}, t={t}")))?;

    let mut b = BitMatrix::zeros(k, columns.len());
    for (j, rows) in columns.iter().enumerate() {
        for &row in rows {
            b.set(row, j, true);
        }
    }
    let g = BitMatrix::hstack(&[&BitMatrix::identity(k), &a, &b]);
    debug_assert_eq!(g.cols(), (r + 1) * g_blocks + groups * zeta);
    Ok(g)
}

fn block_indicator_matrix(k: usize, r: usize, g_blocks: usize) -> BitMatrix {
    let mut a = BitMatrix::zeros(k, g_blocks);
    for j in 0..g_blocks {
        for i in j * r..(j + 1) * r {
            a.set(i, j, true);
        }
    }
    a
}

/// Columns of one shift-pattern group: column `c` places its ones one per
/// row block at intra-block offset `(c + s·j) mod r` for block `j` when
/// columns span every block (`k/r ≤ r`); in the tall case (`k/r > r`) the
/// transposed analogue walks blocks `(c + s·o) mod (k/r)` at offset `o`.
/// `None` when the slope folds two rows of one block into a column.
fn linear_group(r: usize, g_blocks: usize, zeta: usize, slope: usize) -> Option<Vec<Vec<usize>>> {
    let mut cols = Vec::with_capacity(zeta);
    for c in 0..zeta {
        let rows: Vec<usize> = if g_blocks <= r {
            (0..g_blocks).map(|j| j * r + (c + slope * j) % r).collect()
        } else {
            (0..r)
                .map(|o| ((c + slope * o) % g_blocks) * r + o)
                .collect()
        };
        let mut blocks = 0u64;
        for &row in &rows {
            let b = row / r;
            if blocks >> b & 1 == 1 {
                return None;
            }
            blocks |= 1 << b;
        }
        let mut rows = rows;
        rows.sort_unstable();
        cols.push(rows);
    }
    Some(cols)
}

/// The longest run of mutually compatible shift-pattern groups (skipping
/// slopes that collide), slope 0 first, which keeps the stacked-identity
/// shape for small `k/r`. Groups that the pattern cannot supply are left to
/// the backtracking fillers.
fn linear_group_prefix(
    r: usize,
    g_blocks: usize,
    zeta: usize,
    groups: usize,
) -> Vec<Vec<Vec<usize>>> {
    let overlap_ok = |a: &[Vec<usize>], b: &[Vec<usize>]| {
        a.iter().all(|ca| {
            b.iter()
                .all(|cb| ca.iter().filter(|row| cb.contains(row)).count() <= 1)
        })
    };
    let mut accepted: Vec<Vec<Vec<usize>>> = Vec::new();
    for slope in 0..g_blocks.max(r) {
        if accepted.len() == groups {
            break;
        }
        let Some(group) = linear_group(r, g_blocks, zeta, slope) else {
            continue;
        };
        if accepted.iter().all(|g| overlap_ok(g, &group)) {
            accepted.push(group);
        }
    }
    accepted
}

/// Group-structured backtracking filler for `B`.
///
/// Builds `t-2` groups, each an exact partition of the `k` rows into `zeta`
/// columns of weight `w` with at most one row per block; columns of the same
/// group are disjoint by construction and columns of different groups are
/// constrained to overlap in at most one row. A decomposable `B` always has
/// every row exactly once per group, which is how the shift pattern lays
/// rows out too, so this search is a drop-in generalization of it; the
/// ungrouped filler below stays as the completeness backstop.
///
/// `seeds` pre-fills leading groups (from the shift pattern), which cuts the
/// search to the groups the pattern could not supply.
fn b_fill_grouped(
    k: usize,
    r: usize,
    w: usize,
    zeta: usize,
    groups: usize,
    seeds: &[Vec<Vec<usize>>],
    node_cap: u64,
) -> Option<Vec<Vec<usize>>> {
    struct State {
        k: usize,
        r: usize,
        w: usize,
        groups: usize,
        cols: Vec<Vec<usize>>,
        col_masks: Vec<u64>,
        nodes: u64,
        node_cap: u64,
    }

    impl State {
        fn solve_group(&mut self, group: usize) -> bool {
            if group == self.groups {
                return true;
            }
            self.cover(group, 0)
        }

        /// Partition the rows not yet covered within this group, lowest
        /// uncovered row first.
        fn cover(&mut self, group: usize, covered: u64) -> bool {
            let Some(anchor) = (0..self.k).find(|&row| covered >> row & 1 == 0) else {
                return self.solve_group(group + 1);
            };
            self.extend(
                group,
                covered,
                vec![anchor],
                1u64 << anchor,
                1 << (anchor / self.r),
            )
        }

        fn extend(
            &mut self,
            group: usize,
            covered: u64,
            partial: Vec<usize>,
            mask: u64,
            blocks_used: u64,
        ) -> bool {
            self.nodes += 1;
            if self.nodes > self.node_cap {
                return false;
            }
            if partial.len() == self.w {
                self.cols.push(partial.clone());
                self.col_masks.push(mask);
                if self.cover(group, covered | mask) {
                    return true;
                }
                self.col_masks.pop();
                self.cols.pop();
                return false;
            }
            let start = partial.last().map_or(0, |&p| p + 1);
            for row in start..self.k {
                if covered >> row & 1 == 1 || blocks_used >> (row / self.r) & 1 == 1 {
                    continue;
                }
                let next = mask | 1 << row;
                if self
                    .col_masks
                    .iter()
                    .any(|&pm| (pm & next).count_ones() >= 2)
                {
                    continue;
                }
                let mut p = partial.clone();
                p.push(row);
                if self.extend(group, covered, p, next, blocks_used | 1 << (row / self.r)) {
                    return true;
                }
            }
            false
        }
    }

    if k > 64 || zeta * w != k || seeds.len() > groups {
        return None;
    }
    let mut st = State {
        k,
        r,
        w,
        groups,
        cols: Vec::new(),
        col_masks: Vec::new(),
        nodes: 0,
        node_cap,
    };
    for group in seeds {
        for col in group {
            st.col_masks
                .push(col.iter().fold(0u64, |m, &row| m | 1 << row));
            st.cols.push(col.clone());
        }
    }
    st.solve_group(seeds.len()).then_some(st.cols)
}

/// Exhaustive backtracking filler for `B`.
///
/// Columns are built in canonical order: each new column must contain the
/// lowest row that still needs weight (columns are interchangeable, so this
/// loses no solutions), remaining rows are chosen in ascending order subject
/// to one-per-block, per-row remaining weight, and pairwise overlap at most
/// one with every earlier column.
fn b_fill_dfs(
    k: usize,
    r: usize,
    g_blocks: usize,
    w: usize,
    num_cols: usize,
    row_weight: usize,
    node_cap: u64,
) -> Option<Vec<Vec<usize>>> {
    struct State {
        k: usize,
        r: usize,
        g_blocks: usize,
        w: usize,
        num_cols: usize,
        caps: Vec<usize>,
        col_masks: Vec<u64>,
        cols: Vec<Vec<usize>>,
        nodes: u64,
        node_cap: u64,
    }

    impl State {
        fn feasible(&self) -> bool {
            let left = self.num_cols - self.cols.len();
            for b in 0..self.g_blocks {
                let block_cap: usize = self.caps[b * self.r..(b + 1) * self.r].iter().sum();
                if block_cap > left {
                    return false;
                }
            }
            self.caps.iter().all(|&c| c <= left)
        }

        fn solve(&mut self) -> bool {
            if self.cols.len() == self.num_cols {
                return self.caps.iter().all(|&c| c == 0);
            }
            let Some(anchor) = (0..self.k).find(|&row| self.caps[row] > 0) else {
                return false;
            };
            self.extend(vec![anchor], 1u64 << anchor, 1 << (anchor / self.r))
        }

        fn extend(&mut self, partial: Vec<usize>, mask: u64, blocks_used: u64) -> bool {
            self.nodes += 1;
            if self.nodes > self.node_cap {
                return false;
            }
            if partial.len() == self.w {
                for &row in &partial {
                    self.caps[row] -= 1;
                }
                self.col_masks.push(mask);
                self.cols.push(partial.clone());
                if self.feasible() && self.solve() {
                    return true;
                }
                self.cols.pop();
                self.col_masks.pop();
                for &row in &partial {
                    self.caps[row] += 1;
                }
                return false;
            }
            let start = partial.last().map_or(0, |&p| p + 1);
            for row in start..self.k {
                if self.caps[row] == 0 || blocks_used >> (row / self.r) & 1 == 1 {
                    continue;
                }
                let bit = 1u64 << row;
                let next = mask | bit;
                // overlap with every earlier column stays <= 1
                if self
                    .col_masks
                    .iter()
                    .any(|&pm| (pm & next).count_ones() >= 2)
                {
                    continue;
                }
                let mut p = partial.clone();
                p.push(row);
                if self.extend(p, next, blocks_used | 1 << (row / self.r)) {
                    return true;
                }
            }
            false
        }
    }

    if k > 64 {
        return None;
    }
    let mut st = State {
        k,
        r,
        g_blocks,
        w,
        num_cols,
        caps: vec![row_weight; k],
        col_masks: Vec::new(),
        cols: Vec::new(),
        nodes: 0,
        node_cap,
    };
    st.solve().then_some(st.cols)
}

fn b_columns_valid(
    a: &BitMatrix,
    k: usize,
    r: usize,
    w: usize,
    groups: usize,
    columns: &[Vec<usize>],
) -> bool {
    let mut row_weight = vec![0usize; k];
    for rows in columns {
        if rows.len() != w {
            return false;
        }
        let mut blocks = std::collections::HashSet::new();
        for &row in rows {
            if row >= k || !blocks.insert(row / r) {
                return false;
            }
            row_weight[row] += 1;
        }
    }
    if row_weight.iter().any(|&wt| wt != groups) {
        return false;
    }
    let mut b = BitMatrix::zeros(k, columns.len());
    for (j, rows) in columns.iter().enumerate() {
        for &row in rows {
            b.set(row, j, true);
        }
    }
    !BitMatrix::hstack(&[a, &b]).has_one_square()
}

// ---------------------------------------------------------------------------
// t = 3, r ∤ k
// ---------------------------------------------------------------------------

/// Systematic batch code for `t = 3`, `r ≥ 3`, `r ∤ k`:
/// `G = [I_k | A | B | C]` with
/// `n = (r+1)·⌊k/r⌋ + 2s + 1 + ⌈(k - s - τ - η·s)/γ⌉`.
///
/// `A` indicates the `⌊k/r⌋` full blocks. `B = [B1; B2]` has `s + 1` columns:
/// `B2 = [1 | I_s]` on the short block, `B1` spreads `τ` ones (first column)
/// and `η` ones (each later column) over distinct full blocks with at most
/// one entry per row. `C` covers every remaining full-block row once, at most
/// one per block and `γ` per column, so that each row of `[A | B | C]` has
/// weight exactly 2.
pub fn construct_t3_remainder(k: usize, r: usize) -> Result<BitMatrix> {
    if r < 3 {
        return Err(invalid("construct_t3_remainder needs r >= 3"));
    }
    let s = k % r;
    let f = k / r;
    if s == 0 {
        return Err(invalid("construct_t3_remainder needs r to not divide k"));
    }
    if f < 1 {
        return Err(invalid(format!(
            "construct_t3_remainder needs floor(k/r) >= 1, got k={k}, r={r}"
        )));
    }
    let rp = RemainderParams::derive(k, r);
    let (tau, eta, gamma) = (rp.tau, rp.eta, rp.gamma);

    let a = block_indicator_matrix(k, r, f);

    // B1 placement: walk the full blocks round-robin so coverage stays
    // balanced, taking the lowest free row of each chosen block.
    let mut used_in_block = vec![0usize; f];
    let mut b = BitMatrix::zeros(k, s + 1);
    let mut block_ptr = 0usize;
    let place =
        |col: usize, count: usize, used: &mut [usize], ptr: &mut usize, b: &mut BitMatrix| {
            for step in 0..count {
                let block = (*ptr + step) % f;
                let row = block * r + used[block];
                used[block] += 1;
                b.set(row, col, true);
            }
            *ptr = (*ptr + count) % f;
        };
    place(0, tau, &mut used_in_block, &mut block_ptr, &mut b);
    for c in 1..=s {
        place(c, eta, &mut used_in_block, &mut block_ptr, &mut b);
    }
    // B2 = [1 | I_s] on the short block.
    for i in 0..s {
        b.set(k - s + i, 0, true);
        b.set(k - s + i, 1 + i, true);
    }

    // C: repeatedly take one row from each of the gamma fullest blocks.
    let remaining_total: usize = (0..f).map(|bk| r - used_in_block[bk]).sum();
    let c_cols_expected = if remaining_total == 0 {
        0
    } else {
        remaining_total.div_ceil(gamma)
    };
    let mut c_columns: Vec<Vec<usize>> = Vec::new();
    let mut left = remaining_total;
    while left > 0 {
        let mut order: Vec<usize> = (0..f).filter(|&bk| used_in_block[bk] < r).collect();
        order.sort_by_key(|&bk| (used_in_block[bk], bk));
        let mut col = Vec::new();
        for &bk in order.iter().take(gamma) {
            let row = bk * r + used_in_block[bk];
            used_in_block[bk] += 1;
            col.push(row);
            left -= 1;
        }
        col.sort_unstable();
        c_columns.push(col);
    }
    let mut c = BitMatrix::zeros(k, c_columns.len());
    for (j, rows) in c_columns.iter().enumerate() {
        for &row in rows {
            c.set(row, j, true);
        }
    }

    let g = BitMatrix::hstack(&[&BitMatrix::identity(k), &a, &b, &c]);
    validate_t3_remainder(&g, &a, &b, &c, k, r, rp, c_cols_expected)?;
    Ok(g)
}

#[allow(clippy::too_many_arguments)]
fn validate_t3_remainder(
    g: &BitMatrix,
    a: &BitMatrix,
    b: &BitMatrix,
    c: &BitMatrix,
    k: usize,
    r: usize,
    rp: RemainderParams,
    c_cols_expected: usize,
) -> Result<()> {
    let f = k / r;
    let s = rp.s;
    let n = (r + 1) * f + 2 * s + 1 + c_cols_expected;
    let fail = |msg: String| Err(infeasible(format!("t3-remainder: {msg}")));
    if g.cols() != n || c.cols() != c_cols_expected {
        return fail(format!("length {} != {n}", g.cols()));
    }
    // every row of [A|B|C] carries exactly two ones
    for row in 0..k {
        let w = a.row_weight(row) + b.row_weight(row) + c.row_weight(row);
        if w != 2 {
            return fail(format!("row {row} of [A|B|C] has weight {w}"));
        }
    }
    // B1 shape
    let b1_weight = |col: usize| (0..k - s).filter(|&row| b.get(row, col)).count();
    if b1_weight(0) != rp.tau {
        return fail(format!("B1 first column weight {} != tau", b1_weight(0)));
    }
    for col in 1..=s {
        if b1_weight(col) != rp.eta {
            return fail(format!("B1 column {col} weight {} != eta", b1_weight(col)));
        }
    }
    for col in 0..=s {
        let mut blocks = std::collections::HashSet::new();
        for row in 0..k - s {
            if b.get(row, col) && !blocks.insert(row / r) {
                return fail(format!("B1 column {col} repeats a block"));
            }
        }
    }
    for row in 0..k - s {
        if (0..=s).filter(|&col| b.get(row, col)).count() > 1 {
            return fail(format!("B1 row {row} has more than one entry"));
        }
    }
    // C shape
    for col in 0..c.cols() {
        let w = c.column_weight(col);
        if w != rp.gamma && col + 1 != c.cols() {
            return fail(format!("C column {col} weight {w} != gamma"));
        }
        for row in k - s..k {
            if c.get(row, col) {
                return fail(format!("C touches short-block row {row}"));
            }
        }
    }
    if BitMatrix::hstack(&[b, c]).has_one_square() {
        return fail("[B|C] contains a 1-square".to_string());
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// simplex
// ---------------------------------------------------------------------------

/// Cap on the simplex dimension (`n = 2^m - 1` grows fast).
pub const SIMPLEX_MAX_M: usize = 10;

/// Binary simplex code: `m × (2^m - 1)`, columns are all distinct nonzero
/// `m`-bit vectors, ordered as `[I_m | remaining values ascending]` so the
/// output is systematic like every other constructor here.
pub fn construct_simplex(m: usize) -> Result<BitMatrix> {
    if m < 2 {
        return Err(invalid("construct_simplex needs m >= 2"));
    }
    if m > SIMPLEX_MAX_M {
        return Err(ConstructError::DimensionTooLarge {
            m,
            max: SIMPLEX_MAX_M,
        });
    }
    let n = (1usize << m) - 1;
    let mut g = BitMatrix::zeros(m, n);
    let mut col = 0;
    let put = |g: &mut BitMatrix, col: usize, v: usize| {
        for row in 0..m {
            if (v >> row) & 1 == 1 {
                g.set(row, col, true);
            }
        }
    };
    for row in 0..m {
        put(&mut g, col, 1 << row);
        col += 1;
    }
    for v in 1..=n {
        if v.count_ones() >= 2 {
            put(&mut g, col, v);
            col += 1;
        }
    }
    debug_assert_eq!(col, n);
    Ok(g)
}

// ---------------------------------------------------------------------------
// dispatcher
// ---------------------------------------------------------------------------

/// Route `(k, r, t)` to the family that covers it.
///
/// Precedence: `t = 2` (any `r ≥ 2`), then `r = 2`, then `r | k`, then the
/// `t = 3` remainder family. Parameters outside every family yield
/// [`ConstructError::NoConstructionKnown`].
pub fn construct(k: usize, r: usize, t: usize) -> Result<Construction> {
    let build = |family: Family, matrix: BitMatrix| -> Result<Construction> {
        let n = matrix.cols();
        let mut params = CodeParams::new(n, k, r, t)?;
        params.systematic = true;
        Ok(Construction {
            family,
            params,
            matrix,
        })
    };
    if k >= 1 && r >= 2 && t == 2 {
        return build(Family::T2Block, construct_t2(k, r)?);
    }
    if r == 2 && k >= 2 && t >= 2 && t <= r2_max_t(k) {
        return build(Family::R2Graph, construct_r2(k, t)?);
    }
    if r >= 3 && k >= 1 && k % r == 0 && t > 2 && t <= divisible_max_t(k, r) {
        return build(Family::Divisible, construct_divisible(k, r, t)?);
    }
    if r >= 3 && t == 3 && k % r != 0 && k / r >= 1 {
        return build(Family::T3Remainder, construct_t3_remainder(k, r)?);
    }
    Err(ConstructError::NoConstructionKnown { k, r, t })
}
