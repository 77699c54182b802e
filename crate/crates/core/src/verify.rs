//! Exact batch/PIR verification by exhaustive recovery-set search.
//!
//! A recovery set for information symbol `i` of a systematic-or-not generator
//! matrix `G` is a set of columns XOR-summing to the unit vector `e_i`. The
//! verifier enumerates the inclusion-minimal such sets of size at most `r`
//! per index (restricting to minimal sets loses nothing: shrinking a set
//! preserves disjointness), then searches for a pairwise-disjoint assignment
//! covering a query multiset. Search is exact: `false` means proven absence.
//!
//! Resource use is controlled by [`VerifyOptions::budget`], counted in search
//! node expansions per query. Exceeding it surfaces as
//! [`VerifyError::SearchBudgetExceeded`], which is distinct from a negative
//! verdict.

use crate::gf2::{BitMatrix, BitVector, ColumnSet};
use std::collections::HashMap;
use std::rc::Rc;
use thiserror::Error;

/// Default search budget: node expansions per query.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// Widest matrix the bitmask search machinery accepts.
pub const MAX_COLS: usize = 128;
/// Tallest matrix the bitmask search machinery accepts.
pub const MAX_ROWS: usize = 64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VerifyError {
    #[error("search budget exhausted{}", query_suffix(.query))]
    SearchBudgetExceeded { query: Option<QueryMultiset> },
    #[error(
        "matrix of {rows}x{cols} exceeds the verifier limits ({MAX_ROWS} rows, {MAX_COLS} cols)"
    )]
    MatrixTooLarge { rows: usize, cols: usize },
    #[error("invalid query: {0}")]
    InvalidQuery(String),
}

fn query_suffix(q: &Option<QueryMultiset>) -> String {
    match q {
        Some(q) => format!(" while checking query {q:?}"),
        None => String::new(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Batch,
    Pir,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Batch => "batch",
            Mode::Pir => "pir",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    /// Node-expansion budget per query.
    pub budget: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            budget: DEFAULT_BUDGET,
        }
    }
}

/// A size-`t` multiset of information indices, stored sorted.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QueryMultiset {
    indices: Vec<usize>,
}

impl std::fmt::Debug for QueryMultiset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "query{:?}", self.indices)
    }
}

impl QueryMultiset {
    pub fn new(mut indices: Vec<usize>, k: usize) -> Result<Self, VerifyError> {
        if indices.is_empty() {
            return Err(VerifyError::InvalidQuery("query must be nonempty".into()));
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= k) {
            return Err(VerifyError::InvalidQuery(format!(
                "index {bad} out of range for k={k}"
            )));
        }
        indices.sort_unstable();
        Ok(QueryMultiset { indices })
    }

    /// The repeated query `(x_i, ..., x_i)` of size `t`.
    pub fn repeated(i: usize, t: usize, k: usize) -> Result<Self, VerifyError> {
        QueryMultiset::new(vec![i; t], k)
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn t(&self) -> usize {
        self.indices.len()
    }
}

/// `t` pairwise-disjoint recovery sets serving a query, in query order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecoveryCertificate {
    pub query: QueryMultiset,
    pub sets: Vec<ColumnSet>,
}

impl RecoveryCertificate {
    /// Re-check every invariant against `g`, independently of the search
    /// that produced the certificate: sizes, disjointness, and that each
    /// set XOR-sums to the right unit vector.
    pub fn check(&self, g: &BitMatrix, r: usize) -> bool {
        if self.sets.len() != self.query.t() {
            return false;
        }
        for (a, set_a) in self.sets.iter().enumerate() {
            if set_a.len() > r || !set_a.is_valid_for(g.cols()) {
                return false;
            }
            for set_b in &self.sets[a + 1..] {
                if !set_a.is_disjoint(set_b) {
                    return false;
                }
            }
        }
        self.query
            .indices()
            .iter()
            .zip(&self.sets)
            .all(|(&i, set)| g.column_sum(set) == BitVector::unit(g.rows(), i))
    }
}

/// Result of [`max_t`]: the verdict and whether the search completed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MaxT {
    /// Largest `t` confirmed to satisfy the mode predicate (0 if none).
    pub t: usize,
    /// False when the budget ran out and larger `t` remained undecided.
    pub exact: bool,
}

// ---------------------------------------------------------------------------
// search internals
// ---------------------------------------------------------------------------

/// Per-matrix search context: column masks plus memoized candidate lists.
struct SearchCtx {
    n: usize,
    /// Row-support mask of each column.
    col_masks: Vec<u64>,
    /// index -> minimal recovery sets, each with its column bitmask.
    candidates: HashMap<usize, Rc<Vec<(ColumnSet, u128)>>>,
    budget: u64,
    used: u64,
}

impl SearchCtx {
    fn new(g: &BitMatrix, opts: VerifyOptions) -> Result<Self, VerifyError> {
        if g.rows() > MAX_ROWS || g.cols() > MAX_COLS {
            return Err(VerifyError::MatrixTooLarge {
                rows: g.rows(),
                cols: g.cols(),
            });
        }
        let col_masks = (0..g.cols())
            .map(|c| {
                g.column_support(c)
                    .into_iter()
                    .fold(0u64, |m, row| m | 1 << row)
            })
            .collect();
        Ok(SearchCtx {
            n: g.cols(),
            col_masks,
            candidates: HashMap::new(),
            budget: opts.budget,
            used: 0,
        })
    }

    fn reset_budget(&mut self) {
        self.used = 0;
    }

    fn charge(&mut self) -> Result<(), VerifyError> {
        self.used += 1;
        if self.used > self.budget {
            Err(VerifyError::SearchBudgetExceeded { query: None })
        } else {
            Ok(())
        }
    }

    /// All inclusion-minimal column sets of size <= r XOR-summing to `e_i`,
    /// sorted by (size, lexicographic).
    fn minimal_sets(
        &mut self,
        i: usize,
        r: usize,
    ) -> Result<Rc<Vec<(ColumnSet, u128)>>, VerifyError> {
        if let Some(c) = self.candidates.get(&i) {
            return Ok(Rc::clone(c));
        }
        let target = 1u64 << i;
        let mut found: Vec<(Vec<usize>, u128)> = Vec::new();
        let mut stack: Vec<usize> = Vec::new();
        self.dfs_enumerate(r, target, 0, 0, &mut stack, &mut found)?;
        // keep only inclusion-minimal sets: drop any set containing a
        // smaller found set (found is produced in DFS order; check pairwise
        // via masks which is cheap at these sizes)
        let mut minimal: Vec<(ColumnSet, u128)> = Vec::new();
        found.sort_by(|a, b| (a.0.len(), &a.0).cmp(&(b.0.len(), &b.0)));
        for (indices, mask) in found {
            if minimal.iter().all(|&(_, m)| m & mask != m) {
                minimal.push((ColumnSet::from_sorted_unchecked(indices), mask));
            }
        }
        let rc = Rc::new(minimal);
        self.candidates.insert(i, Rc::clone(&rc));
        Ok(rc)
    }

    fn dfs_enumerate(
        &mut self,
        r: usize,
        target: u64,
        start: usize,
        acc: u64,
        stack: &mut Vec<usize>,
        found: &mut Vec<(Vec<usize>, u128)>,
    ) -> Result<(), VerifyError> {
        if !stack.is_empty() && acc == target {
            let mask = stack.iter().fold(0u128, |m, &c| m | 1 << c);
            found.push((stack.clone(), mask));
            // supersets of a hit are never minimal; no need to extend
            return Ok(());
        }
        if stack.len() == r {
            return Ok(());
        }
        for c in start..self.n {
            self.charge()?;
            stack.push(c);
            self.dfs_enumerate(r, target, c + 1, acc ^ self.col_masks[c], stack, found)?;
            stack.pop();
        }
        Ok(())
    }

    /// Depth-first disjoint assignment over the query's entries, hardest
    /// (fewest candidates) first.
    fn assign(
        &mut self,
        query: &QueryMultiset,
        r: usize,
    ) -> Result<Option<RecoveryCertificate>, VerifyError> {
        let t = query.t();
        let mut per_entry: Vec<(usize, Rc<Vec<(ColumnSet, u128)>>)> = Vec::with_capacity(t);
        for (pos, &i) in query.indices().iter().enumerate() {
            let sets = self.minimal_sets(i, r)?;
            per_entry.push((pos, sets));
        }
        per_entry.sort_by_key(|(pos, sets)| (sets.len(), *pos));

        let mut chosen: Vec<Option<usize>> = vec![None; t]; // entry pos -> set idx
        if self.assign_rec(&per_entry, 0, 0, &mut chosen)? {
            let sets = query
                .indices()
                .iter()
                .enumerate()
                .map(|(pos, &i)| {
                    let set_idx = chosen[pos].expect("assignment complete");
                    let list = &self.candidates[&i];
                    list[set_idx].0.clone()
                })
                .collect();
            Ok(Some(RecoveryCertificate {
                query: query.clone(),
                sets,
            }))
        } else {
            Ok(None)
        }
    }

    fn assign_rec(
        &mut self,
        per_entry: &[(usize, Rc<Vec<(ColumnSet, u128)>>)],
        depth: usize,
        used_mask: u128,
        chosen: &mut Vec<Option<usize>>,
    ) -> Result<bool, VerifyError> {
        if depth == per_entry.len() {
            return Ok(true);
        }
        let (pos, ref sets) = per_entry[depth];
        for (idx, &(_, mask)) in sets.iter().enumerate() {
            self.charge()?;
            if mask & used_mask != 0 {
                continue;
            }
            chosen[pos] = Some(idx);
            if self.assign_rec(per_entry, depth + 1, used_mask | mask, chosen)? {
                return Ok(true);
            }
            chosen[pos] = None;
        }
        Ok(false)
    }
}

fn attach(err: VerifyError, query: &QueryMultiset) -> VerifyError {
    match err {
        VerifyError::SearchBudgetExceeded { .. } => VerifyError::SearchBudgetExceeded {
            query: Some(query.clone()),
        },
        other => other,
    }
}

// ---------------------------------------------------------------------------
// public operations
// ---------------------------------------------------------------------------

/// All inclusion-minimal recovery sets for index `i` with size at most `r`,
/// sorted by (size, lexicographic).
pub fn enumerate_recovery_sets(
    g: &BitMatrix,
    i: usize,
    r: usize,
    opts: VerifyOptions,
) -> Result<Vec<ColumnSet>, VerifyError> {
    if i >= g.rows() {
        return Err(VerifyError::InvalidQuery(format!(
            "index {i} out of range for k={}",
            g.rows()
        )));
    }
    if r < 1 {
        return Err(VerifyError::InvalidQuery("need r >= 1".into()));
    }
    let mut ctx = SearchCtx::new(g, opts)?;
    let sets = ctx.minimal_sets(i, r)?;
    Ok(sets.iter().map(|(s, _)| s.clone()).collect())
}

/// Find `t` pairwise-disjoint recovery sets serving `query`, if any exist.
/// `None` is a proof of absence; budget exhaustion is an error instead.
pub fn supports_query(
    g: &BitMatrix,
    query: &QueryMultiset,
    r: usize,
    opts: VerifyOptions,
) -> Result<Option<RecoveryCertificate>, VerifyError> {
    if query.indices().iter().any(|&i| i >= g.rows()) {
        return Err(VerifyError::InvalidQuery(format!(
            "query index out of range for k={}",
            g.rows()
        )));
    }
    let mut ctx = SearchCtx::new(g, opts)?;
    ctx.assign(query, r).map_err(|e| attach(e, query))
}

/// Iterate all size-`t` multisets over `0..k` in lexicographic order.
pub(crate) fn multisets(k: usize, t: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut current: Option<Vec<usize>> = (k > 0 && t > 0).then(|| vec![0; t]);
    std::iter::from_fn(move || {
        let out = current.clone()?;
        // advance: find rightmost slot that can grow, reset the tail to it
        let next = {
            let mut v = out.clone();
            let mut pos = None;
            for idx in (0..t).rev() {
                if v[idx] + 1 < k {
                    pos = Some(idx);
                    break;
                }
            }
            pos.map(|idx| {
                let grown = v[idx] + 1;
                for slot in v.iter_mut().skip(idx) {
                    *slot = grown;
                }
                v
            })
        };
        current = next;
        Some(out)
    })
}

/// The queries a mode must serve: every size-`t` multiset for batch, the
/// `k` repeated queries for PIR.
pub fn mode_queries(k: usize, t: usize, mode: Mode) -> Vec<QueryMultiset> {
    match mode {
        Mode::Batch => multisets(k, t)
            .map(|indices| QueryMultiset::new(indices, k).expect("in range"))
            .collect(),
        Mode::Pir => (0..k)
            .map(|i| QueryMultiset::repeated(i, t, k).expect("in range"))
            .collect(),
    }
}

/// Outcome of serving every query of a mode.
#[derive(Debug, Clone)]
pub enum Verdict {
    /// All queries served; one certificate per query, in query order.
    Served(Vec<RecoveryCertificate>),
    /// The first query proven unservable.
    Unserved(QueryMultiset),
}

/// Serve every query of the mode, collecting certificates.
pub fn certify(
    g: &BitMatrix,
    r: usize,
    t: usize,
    mode: Mode,
    opts: VerifyOptions,
) -> Result<Verdict, VerifyError> {
    if t < 1 {
        return Err(VerifyError::InvalidQuery("need t >= 1".into()));
    }
    let mut ctx = SearchCtx::new(g, opts)?;
    let mut certs = Vec::new();
    for query in mode_queries(g.rows(), t, mode) {
        ctx.reset_budget();
        match ctx.assign(&query, r) {
            Ok(Some(cert)) => certs.push(cert),
            Ok(None) => return Ok(Verdict::Unserved(query)),
            Err(e) => return Err(attach(e, &query)),
        }
    }
    Ok(Verdict::Served(certs))
}

/// True iff every size-`t` multiset of information indices is served with
/// disjoint recovery sets of size at most `r`.
pub fn is_batch(
    g: &BitMatrix,
    r: usize,
    t: usize,
    opts: VerifyOptions,
) -> Result<bool, VerifyError> {
    if t < 1 {
        return Err(VerifyError::InvalidQuery("need t >= 1".into()));
    }
    let mut ctx = SearchCtx::new(g, opts)?;
    for indices in multisets(g.rows(), t) {
        let query = QueryMultiset::new(indices, g.rows())?;
        ctx.reset_budget();
        match ctx.assign(&query, r) {
            Ok(Some(_)) => {}
            Ok(None) => return Ok(false),
            Err(e) => return Err(attach(e, &query)),
        }
    }
    Ok(true)
}

/// True iff every repeated query `(x_i, ..., x_i)` of size `t` is served.
pub fn is_pir(g: &BitMatrix, r: usize, t: usize, opts: VerifyOptions) -> Result<bool, VerifyError> {
    if t < 1 {
        return Err(VerifyError::InvalidQuery("need t >= 1".into()));
    }
    let mut ctx = SearchCtx::new(g, opts)?;
    for i in 0..g.rows() {
        let query = QueryMultiset::repeated(i, t, g.rows())?;
        ctx.reset_budget();
        match ctx.assign(&query, r) {
            Ok(Some(_)) => {}
            Ok(None) => return Ok(false),
            Err(e) => return Err(attach(e, &query)),
        }
    }
    Ok(true)
}

/// Largest `t` for which the mode predicate holds (0 if even `t = 1` fails).
///
/// The predicate is monotone in `t` (dropping one request from a served
/// multiset keeps it served), so the search doubles up from 1 and then
/// bisects. Every recovery set for `x_i` uses at least one column supported
/// on row `i`, and repeated queries belong to both modes, so the minimum
/// row weight caps any feasible `t`. A budget exhaustion stops the
/// refinement and reports the largest confirmed `t` flagged as inexact.
pub fn max_t(g: &BitMatrix, r: usize, mode: Mode, opts: VerifyOptions) -> MaxT {
    let holds = |t: usize| -> Result<bool, VerifyError> {
        match mode {
            Mode::Batch => is_batch(g, r, t, opts),
            Mode::Pir => is_pir(g, r, t, opts),
        }
    };
    let cap = (0..g.rows()).map(|i| g.row_weight(i)).min().unwrap_or(0);
    if cap == 0 {
        // some symbol has no supported column at all; even t = 1 fails
        return MaxT { t: 0, exact: true };
    }
    let mut confirmed = 0usize;
    let mut probe = 1usize;
    let first_false = loop {
        if probe > cap {
            break cap + 1;
        }
        match holds(probe) {
            Ok(true) => {
                confirmed = probe;
                probe *= 2;
            }
            Ok(false) => break probe,
            Err(_) => {
                return MaxT {
                    t: confirmed,
                    exact: false,
                }
            }
        }
    };
    let mut lo = confirmed; // known true (or 0)
    let mut hi = first_false; // known false (or cap+1)
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        match holds(mid) {
            Ok(true) => lo = mid,
            Ok(false) => hi = mid,
            Err(_) => {
                return MaxT {
                    t: lo,
                    exact: false,
                }
            }
        }
    }
    MaxT { t: lo, exact: true }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{construct_simplex, construct_t2};

    fn opts() -> VerifyOptions {
        VerifyOptions::default()
    }

    fn tiny() -> BitMatrix {
        // [I_2 | (1,1)^T]
        BitMatrix::from_text("2 3\n101\n011\n").unwrap()
    }

    fn example1() -> BitMatrix {
        BitMatrix::from_text("5 10\n1000010010\n0100001001\n0010000110\n0001000101\n0000111000\n")
            .unwrap()
    }

    #[test]
    fn enumerate_tiny() {
        let sets = enumerate_recovery_sets(&tiny(), 0, 2, opts()).unwrap();
        let got: Vec<Vec<usize>> = sets.iter().map(|s| s.indices().to_vec()).collect();
        assert_eq!(got, vec![vec![0], vec![1, 2]]);
    }

    #[test]
    fn enumerate_identity_r1() {
        let id = BitMatrix::identity(4);
        for i in 0..4 {
            let sets = enumerate_recovery_sets(&id, i, 1, opts()).unwrap();
            assert_eq!(sets.len(), 1);
            assert_eq!(sets[0].indices(), &[i]);
        }
    }

    #[test]
    fn enumerate_example1_index0() {
        // {0} plus exactly two pair sets; all three are pairwise disjoint,
        // so the query (x_1, x_1, x_1) is served at r = 2.
        let sets = enumerate_recovery_sets(&example1(), 0, 2, opts()).unwrap();
        assert_eq!(sets.len(), 3);
        assert_eq!(sets[0].indices(), &[0]);
        assert!(sets[1..].iter().all(|s| s.len() == 2));
        let q = QueryMultiset::repeated(0, 3, 5).unwrap();
        assert!(supports_query(&example1(), &q, 2, opts())
            .unwrap()
            .is_some());
    }

    #[test]
    fn supports_repeated_tiny() {
        let q = QueryMultiset::repeated(0, 2, 2).unwrap();
        let cert = supports_query(&tiny(), &q, 2, opts()).unwrap().unwrap();
        assert!(cert.check(&tiny(), 2));
        let got: Vec<Vec<usize>> = cert.sets.iter().map(|s| s.indices().to_vec()).collect();
        assert_eq!(got, vec![vec![0], vec![1, 2]]);
    }

    #[test]
    fn identity_cannot_repeat() {
        let id = BitMatrix::identity(3);
        let q = QueryMultiset::repeated(0, 2, 3).unwrap();
        assert!(supports_query(&id, &q, 3, opts()).unwrap().is_none());
        assert!(!is_batch(&id, 3, 2, opts()).unwrap());
    }

    #[test]
    fn t2_code_is_batch() {
        let g = construct_t2(4, 2).unwrap();
        assert!(is_batch(&g, 2, 2, opts()).unwrap());
    }

    #[test]
    fn batch_implies_pir() {
        let g = construct_t2(4, 2).unwrap();
        assert!(is_pir(&g, 2, 2, opts()).unwrap());
        let simplex = construct_simplex(3).unwrap();
        assert!(is_pir(&simplex, 2, 2, opts()).unwrap());
    }

    #[test]
    fn max_t_identity() {
        let id = BitMatrix::identity(4);
        assert_eq!(
            max_t(&id, 1, Mode::Batch, opts()),
            MaxT { t: 1, exact: true }
        );
    }

    #[test]
    fn max_t_t2_code() {
        // n = 8 < 10 = length bound for t=3, so the search must settle at 2.
        let g = construct_t2(6, 3).unwrap();
        assert_eq!(
            max_t(&g, 3, Mode::Batch, opts()),
            MaxT { t: 2, exact: true }
        );
    }

    #[test]
    fn budget_error_attaches_query() {
        let g = example1();
        let err = is_batch(&g, 2, 3, VerifyOptions { budget: 3 }).unwrap_err();
        match err {
            VerifyError::SearchBudgetExceeded { query } => assert!(query.is_some()),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn budget_exhaustion_makes_max_t_inexact() {
        let g = example1();
        let res = max_t(&g, 2, Mode::Batch, VerifyOptions { budget: 2 });
        assert!(!res.exact);
    }

    #[test]
    fn multisets_count() {
        // C(k + t - 1, t) combinations with repetition
        assert_eq!(multisets(12, 3).count(), 364);
        assert_eq!(multisets(3, 2).count(), 6);
    }

    #[test]
    fn certificates_recheck() {
        let g = example1();
        for indices in multisets(5, 3) {
            let q = QueryMultiset::new(indices, 5).unwrap();
            let cert = supports_query(&g, &q, 2, opts()).unwrap().unwrap();
            assert!(cert.check(&g, 2));
        }
    }
}
