//! Length and dimension bounds for batch and PIR codes.
//!
//! Lower bounds on the length `n` come in three flavors: the Singleton-style
//! bound for general codes, its tightening for systematic codes, and the
//! locality/availability bound for systematic codes. Closed forms of the
//! latter at `d = t` back the summary tables ([`table_lower_bound`]), while
//! [`table_upper_bound`] mirrors the constructions' lengths.
//!
//! Upper bounds on the dimension `k` ([`cm_dimension_bound`],
//! [`cm_dimension_bound_recursive`]) reduce to `k_opt(n', d)`, the largest
//! dimension of any binary linear code of length `n'` and minimum distance
//! `d`. For `q = 2, n ≤ 14` that quantity is served exactly from an embedded
//! table produced by the exhaustive oracle in this module
//! ([`kopt_bruteforce`]); beyond the table a Griesmer-derived upper bound is
//! used and flagged, which keeps the dimension bounds valid.
//!
//! All integer arithmetic is exact; only the asymptotic rate comparisons use
//! floating point.
//!
//! Everything here assumes a restricted recovery-set size `r`. For the
//! unrestricted setting (`r = n`) the shortest systematic batch and PIR
//! lengths are known to coincide for `t ≤ 4`, and for `5 ≤ t ≤ 7` the
//! optimal batch redundancy exceeds the optimal PIR redundancy by at most
//! `2⌈log₂ k⌉` times the PIR redundancy at `(k/2, t-2)`; those
//! unrestricted-`r` quantities are not modeled by this crate.

use std::collections::HashMap;
use std::sync::OnceLock;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum BoundsError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("bound precondition violated: {0}")]
    ConditionViolated(String),
    #[error("no tabulated upper bound covers k={k}, r={r}, t={t}")]
    NotCovered { k: u64, r: u64, t: u64 },
    #[error("domain error: {0}")]
    DomainError(String),
}

type Result<T> = std::result::Result<T, BoundsError>;

/// A lower bound on `n` together with the maximizing query size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NBound {
    pub value: u64,
    pub beta_star: u64,
}

/// A dimension upper bound, its minimizing query size, and whether the
/// underlying `k_opt` lookups were exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KBound {
    pub value: u64,
    pub beta_star: u64,
    pub kopt_exact: bool,
}

/// `k_opt` value plus its provenance (embedded table vs Griesmer cap).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KOpt {
    pub k: u64,
    pub exact: bool,
}

// ---------------------------------------------------------------------------
// lower bounds on n
// ---------------------------------------------------------------------------

/// Singleton-style lower bound for general (not necessarily systematic)
/// linear batch/PIR codes:
/// `n ≥ k + d + max_{1≤β≤t} (β-1)·(⌈k/(rβ-β+1)⌉ - 1) - 1`.
pub fn lower_bound_nonsystematic(k: u64, r: u64, t: u64, d: u64) -> NBound {
    let mut best = 0u64;
    let mut beta_star = 1u64;
    for beta in 1..=t {
        let denom = r * beta - beta + 1;
        let term = (beta - 1) * (k.div_ceil(denom) - 1);
        if term > best {
            best = term;
            beta_star = beta;
        }
    }
    NBound {
        value: k + d + best - 1,
        beta_star,
    }
}

/// The tightened variant for systematic codes:
/// `n ≥ k + d + max_{2≤β≤t} (β-1)·(⌈k/(rβ-β-r+2)⌉ - 1) - 1`.
pub fn lower_bound_systematic(k: u64, r: u64, t: u64, d: u64) -> Result<NBound> {
    if t < 2 {
        return Err(BoundsError::InvalidParams(
            "systematic bound needs t >= 2".into(),
        ));
    }
    let mut best = 0u64;
    let mut beta_star = 2u64;
    for beta in 2..=t {
        let denom = (r - 1) * (beta - 1) + 1;
        let term = (beta - 1) * (k.div_ceil(denom) - 1);
        if term > best {
            best = term;
            beta_star = beta;
        }
    }
    Ok(NBound {
        value: k + d + best - 1,
        beta_star,
    })
}

/// Availability-style lower bound for systematic codes:
/// `n ≥ d + k + ⌈((t-1)(k-1)+1)/((t-1)(r-1)+1)⌉ - 2`.
pub fn lower_bound_rpdv(k: u64, r: u64, t: u64, d: u64) -> u64 {
    let num = (t - 1) * (k - 1) + 1;
    let den = (t - 1) * (r - 1) + 1;
    d + k + num.div_ceil(den) - 2
}

/// Closed forms of [`lower_bound_rpdv`] at `d = t` for `t ∈ {2, 3, 4}`.
pub fn table_lower_bound(k: u64, r: u64, t: u64) -> Result<u64> {
    if r < 2 {
        return Err(BoundsError::InvalidParams(
            "table bounds need r >= 2".into(),
        ));
    }
    match t {
        2 => Ok(k + k.div_ceil(r)),
        3 => Ok(k + 1 + (2 * k - 1).div_ceil(2 * r - 1)),
        4 => Ok(k + 2 + (3 * k - 2).div_ceil(3 * r - 2)),
        _ => Err(BoundsError::InvalidParams(format!(
            "table bounds cover t in {{2,3,4}}, got t={t}"
        ))),
    }
}

/// Length of the `t = 3`, `r ∤ k` construction. Degenerates gracefully to
/// `2k + 1` when `k < r` (no full blocks: `[I_k | 1 | I_k]`).
fn t3_remainder_length(k: u64, r: u64) -> u64 {
    let f = k / r;
    let s = k % r;
    let tau = (r - s).min(f);
    let eta = (r - 1).min(f);
    let gamma = r.min(f);
    let covered = s + tau + eta * s;
    let rest = if k > covered {
        (k - covered).div_ceil(gamma)
    } else {
        0
    };
    (r + 1) * f + 2 * s + 1 + rest
}

/// Construction-backed upper bounds on the optimal length, for
/// `t ∈ {2, 3, 4}`. `(r ≥ 3, t = 4, r ∤ k)` has no covering family.
pub fn table_upper_bound(k: u64, r: u64, t: u64) -> Result<u64> {
    if r < 2 || k < 1 {
        return Err(BoundsError::InvalidParams(
            "table bounds need r >= 2 and k >= 1".into(),
        ));
    }
    if !(2..=4).contains(&t) {
        return Err(BoundsError::InvalidParams(format!(
            "table bounds cover t in {{2,3,4}}, got t={t}"
        )));
    }
    if k == 1 {
        // t-fold repetition serves any query pattern on a single symbol
        return Ok(t);
    }
    if t == 2 {
        return Ok(k + k.div_ceil(r));
    }
    let zeta = (k / r).max(r);
    match (r, t) {
        (2, 3) => Ok(match k {
            2 => 5,
            3 => 6,
            _ => 2 * k,
        }),
        (2, 4) => Ok(match k {
            2 => 7,
            3 => 9,
            _ => k + (3 * k).div_ceil(2),
        }),
        (_, 3) => {
            if k % r == 0 {
                Ok((r + 1) * (k / r) + zeta)
            } else {
                Ok(t3_remainder_length(k, r))
            }
        }
        (_, 4) => {
            if k % r == 0 {
                Ok((r + 1) * (k / r) + 2 * zeta)
            } else {
                Err(BoundsError::NotCovered { k, r, t })
            }
        }
        _ => unreachable!(),
    }
}

// ---------------------------------------------------------------------------
// k_opt oracle
// ---------------------------------------------------------------------------

/// Hard cap for the exhaustive `k_opt` oracle.
pub const KOPT_MAX_N: usize = 14;

fn kopt_map() -> &'static HashMap<(u64, u64), u64> {
    static TABLE: OnceLock<HashMap<(u64, u64), u64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        embedded_kopt_entries()
            .iter()
            .filter(|&&(q, _, _, _)| q == 2)
            .map(|&(_, n, d, k)| ((n, d), k))
            .collect()
    })
}

/// The entries of the checked-in `k_opt` table as `(q, n, d, k)` rows.
pub fn embedded_kopt_entries() -> &'static [(u64, u64, u64, u64)] {
    static ENTRIES: OnceLock<Vec<(u64, u64, u64, u64)>> = OnceLock::new();
    ENTRIES.get_or_init(|| {
        let csv = include_str!("../data/kopt_q2.csv");
        csv.lines()
            .skip(1)
            .filter(|l| !l.trim().is_empty())
            .map(|line| {
                let cols: Vec<u64> = line.split(',').map(|c| c.trim().parse().unwrap()).collect();
                assert_eq!(cols.len(), 4, "kopt table row {line:?}");
                (cols[0], cols[1], cols[2], cols[3])
            })
            .collect()
    })
}

/// Largest dimension of a `q`-ary linear code of length `n` and minimum
/// distance (at least) `d`. Exact (from the embedded exhaustive table) for
/// `q = 2, n ≤ 14`; otherwise the Griesmer-derived upper bound on `k`,
/// flagged inexact.
pub fn k_opt(q: u64, n: u64, d: u64) -> KOpt {
    assert!(n >= 1 && d >= 1 && d <= n, "k_opt needs 1 <= d <= n");
    if q == 2 && n <= KOPT_MAX_N as u64 {
        if let Some(&k) = kopt_map().get(&(n, d)) {
            return KOpt { k, exact: true };
        }
    }
    let mut k = 0;
    while griesmer_min_length(q, k + 1, d) <= n {
        k += 1;
    }
    KOpt { k, exact: false }
}

/// Griesmer lower bound on the length of a `[n, k, d]_q` linear code:
/// `n ≥ Σ_{i=0}^{k-1} ⌈d / q^i⌉`.
pub fn griesmer_min_length(q: u64, k: u64, d: u64) -> u64 {
    let mut total = 0u64;
    let mut power = 1u64;
    for i in 0..k {
        if power >= d {
            // every remaining term is 1
            total += k - i;
            break;
        }
        total += d.div_ceil(power);
        power = power.saturating_mul(q);
    }
    total
}

/// Exact `k_opt` for binary codes by exhaustive search, `n ≤ 14`.
///
/// Walks lengths upward: `k_opt(n, d)` exceeds `k_opt(n-1, d)` by at most
/// one (shortening), and appending a zero coordinate shows it never
/// decreases, so one existence test per length suffices.
pub fn kopt_bruteforce(n: usize, d: usize) -> usize {
    assert!(
        (1..=KOPT_MAX_N).contains(&n),
        "oracle capped at n <= {KOPT_MAX_N}"
    );
    assert!(d >= 1 && d <= n);
    if d == 1 {
        return n; // the whole space
    }
    if d == 2 {
        return n - 1; // single parity check; k = n fails on weight-1 rows
    }
    let mut k = 0;
    for len in d..=n {
        if exists_binary_code(len, k + 1, d) {
            k += 1;
        }
    }
    k
}

/// Does a binary `[n, k, ≥d]` linear code exist? Exhaustive DFS over
/// systematic generators `[I_k | P]` (every linear code is column-permutation
/// equivalent to one, and column permutations preserve distance).
///
/// Rows of `P` are enumerated strictly decreasing as integers; row order is
/// irrelevant to the row space, and `d ≥ 3` forbids equal rows. Only subsets
/// of at most `d-2` previously chosen rows are tracked: any codeword built
/// from `s+1 ≥ d` rows already carries weight `≥ d` on the identity part.
fn exists_binary_code(n: usize, k: usize, d: usize) -> bool {
    debug_assert!(d >= 3);
    let m = n - k;
    if d > m + 1 {
        return false; // a single row cannot reach weight d
    }
    if k == 1 {
        return true;
    }
    let cands: Vec<u16> = (1..(1u32 << m))
        .rev()
        .filter(|v| v.count_ones() as usize >= d - 1)
        .map(|v| v as u16)
        .collect();

    fn rec(
        cands: &[u16],
        start: usize,
        depth: usize,
        k: usize,
        d: usize,
        tracked: &[(usize, u16)],
    ) -> bool {
        if depth == k {
            return true;
        }
        for (idx, &row) in cands.iter().enumerate().skip(start) {
            let ok = tracked
                .iter()
                .all(|&(sz, x)| sz + 1 + (x ^ row).count_ones() as usize >= d);
            if !ok {
                continue;
            }
            let mut next: Vec<(usize, u16)> = tracked.to_vec();
            for &(sz, x) in tracked {
                if sz + 1 <= d - 2 {
                    next.push((sz + 1, x ^ row));
                }
            }
            if rec(cands, idx + 1, depth + 1, k, d, &next) {
                return true;
            }
        }
        false
    }

    rec(&cands, 0, 0, k, d, &[(0, 0)])
}

/// CSV table of exact binary `k_opt` values, rows `q,n,d,k`.
pub fn kopt_table_csv(n_max: usize, d_max: usize) -> String {
    assert!(n_max <= KOPT_MAX_N);
    let mut out = String::from("q,n,d,k\n");
    for n in 1..=n_max {
        for d in 1..=n.min(d_max) {
            out.push_str(&format!("2,{n},{d},{}\n", kopt_bruteforce(n, d)));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// dimension bounds
// ---------------------------------------------------------------------------

/// Dimension bound at the full query size:
/// `k ≤ tr - (t-1) + k_opt(n - tr, d)`, requiring `n - tr ≥ d`.
pub fn cm_dimension_bound(n: u64, r: u64, t: u64, d: u64, q: u64) -> Result<KBound> {
    if n < t * r + d {
        return Err(BoundsError::ConditionViolated(format!(
            "need n - t*r >= d (n={n}, t={t}, r={r}, d={d}); use cm_dimension_bound_recursive"
        )));
    }
    let kopt = k_opt(q, n - t * r, d);
    Ok(KBound {
        value: t * r - (t - 1) + kopt.k,
        beta_star: t,
        kopt_exact: kopt.exact,
    })
}

/// Recursive variant minimizing over the query sizes `β ≤ t` that satisfy
/// the length condition: `k ≤ min_β { βr - (β-1) + k_opt(n - βr, d) }`.
pub fn cm_dimension_bound_recursive(n: u64, r: u64, t: u64, d: u64, q: u64) -> Result<KBound> {
    let mut best: Option<KBound> = None;
    for beta in 1..=t {
        if n < beta * r + d {
            continue;
        }
        let kopt = k_opt(q, n - beta * r, d);
        let value = beta * r - (beta - 1) + kopt.k;
        if best.is_none_or(|b| value < b.value) {
            best = Some(KBound {
                value,
                beta_star: beta,
                kopt_exact: kopt.exact,
            });
        }
    }
    best.ok_or_else(|| {
        BoundsError::ConditionViolated(format!(
            "even beta=1 violates n - r >= d (n={n}, r={r}, d={d})"
        ))
    })
}

// ---------------------------------------------------------------------------
// asymptotics
// ---------------------------------------------------------------------------

/// The `q`-ary entropy function `h_q(x)`, with `0·log 0 = 0`.
pub fn entropy_q(q: u64, x: f64) -> Result<f64> {
    if q < 2 {
        return Err(BoundsError::DomainError(format!(
            "entropy needs q >= 2, got {q}"
        )));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(BoundsError::DomainError(format!(
            "entropy needs 0 <= x <= 1, got {x}"
        )));
    }
    let lq = (q as f64).ln();
    let xlog = |y: f64| if y == 0.0 { 0.0 } else { y * y.ln() / lq };
    Ok(x * ((q - 1) as f64).ln() / lq - xlog(x) - xlog(1.0 - x))
}

/// Asymptotic rate upper bounds (the `o(1)` terms dropped) for a fixed `β`:
///
/// * `R ≤ 1 - δ - ((β-1)/n)·(⌈k/(βr-β+1)⌉ - 1)`
/// * `R ≤ β(r-1)/n + 1 - h_q(δ/2)` — the reduction bound with the
///   sphere-packing form substituted for the optimal rate.
///
/// Returned as `(singleton_form, reduction_form)`; the caller compares.
pub fn asymptotic_rate_bounds(
    n: u64,
    k: u64,
    d: u64,
    r: u64,
    beta: u64,
    q: u64,
) -> Result<(f64, f64)> {
    if beta < 1 {
        return Err(BoundsError::DomainError("need beta >= 1".into()));
    }
    if n <= beta * r {
        return Err(BoundsError::DomainError(format!(
            "need n - beta*r >= 1 (n={n}, beta={beta}, r={r})"
        )));
    }
    if d > n {
        return Err(BoundsError::DomainError("need d <= n".into()));
    }
    let nf = n as f64;
    let delta = d as f64 / nf;
    let ceil_term = (k.div_ceil(beta * r - beta + 1) - 1) as f64;
    let first = 1.0 - delta - (beta - 1) as f64 / nf * ceil_term;
    let second = (beta * (r - 1)) as f64 / nf + 1.0 - entropy_q(q, delta / 2.0)?;
    Ok((first, second))
}

// ---------------------------------------------------------------------------
// reporting
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    LowerOnN,
    UpperOnN,
    UpperOnK,
    UpperOnRate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundValue {
    Count(u64),
    Rate(f64),
}

impl std::fmt::Display for BoundValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BoundValue::Count(v) => write!(f, "{v}"),
            BoundValue::Rate(v) => write!(f, "{v:.6}"),
        }
    }
}

/// One named bound evaluation for table/CLI output.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub name: &'static str,
    pub kind: BoundKind,
    pub value: BoundValue,
    pub beta_star: Option<u64>,
    pub assumptions: Vec<String>,
}

/// Evaluate every applicable length bound at `(k, r, t)`. When `d` is absent
/// it defaults to `t` (every batch code satisfies `d ≥ t`), recorded in the
/// assumptions.
pub fn standard_report(k: u64, r: u64, t: u64, d: Option<u64>) -> Result<Vec<BoundReport>> {
    if k < 1 || r < 1 || t < 1 {
        return Err(BoundsError::InvalidParams("need k, r, t >= 1".into()));
    }
    let d_used = d.unwrap_or(t);
    let mut base_assumptions = Vec::new();
    if d.is_none() {
        base_assumptions.push(format!("d defaulted to t={t}"));
    }
    let mut out = Vec::new();
    let nb = lower_bound_nonsystematic(k, r, t, d_used);
    out.push(BoundReport {
        name: "singleton-general",
        kind: BoundKind::LowerOnN,
        value: BoundValue::Count(nb.value),
        beta_star: Some(nb.beta_star),
        assumptions: base_assumptions.clone(),
    });
    if t >= 2 {
        let sb = lower_bound_systematic(k, r, t, d_used)?;
        let mut assumptions = base_assumptions.clone();
        assumptions.push("systematic".into());
        out.push(BoundReport {
            name: "singleton-systematic",
            kind: BoundKind::LowerOnN,
            value: BoundValue::Count(sb.value),
            beta_star: Some(sb.beta_star),
            assumptions,
        });
    }
    let mut assumptions = base_assumptions.clone();
    assumptions.push("systematic".into());
    out.push(BoundReport {
        name: "availability-systematic",
        kind: BoundKind::LowerOnN,
        value: BoundValue::Count(lower_bound_rpdv(k, r, t, d_used)),
        beta_star: None,
        assumptions,
    });
    if (2..=4).contains(&t) && r >= 2 {
        out.push(BoundReport {
            name: "table-lower",
            kind: BoundKind::LowerOnN,
            value: BoundValue::Count(table_lower_bound(k, r, t)?),
            beta_star: None,
            assumptions: vec!["systematic".into(), format!("d = t = {t}")],
        });
        if let Ok(upper) = table_upper_bound(k, r, t) {
            out.push(BoundReport {
                name: "table-upper-construction",
                kind: BoundKind::UpperOnN,
                value: BoundValue::Count(upper),
                beta_star: None,
                assumptions: vec!["systematic".into()],
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nonsystematic_examples() {
        // k=5, r=2, t=2, d=2: beta=2 gives ceil(5/3)-1 = 1, so 5+2+1-1 = 7
        let b = lower_bound_nonsystematic(5, 2, 2, 2);
        assert_eq!((b.value, b.beta_star), (7, 2));
        // k=1 collapses every term
        assert_eq!(lower_bound_nonsystematic(1, 3, 4, 6).value, 6);
        // k=12, r=3, t=5, d=5: terms over beta are 0,2,2,3,4 -> 20
        let b = lower_bound_nonsystematic(12, 3, 5, 5);
        assert_eq!((b.value, b.beta_star), (20, 5));
    }

    #[test]
    fn systematic_examples() {
        let b = lower_bound_systematic(5, 2, 2, 2).unwrap();
        assert_eq!(b.value, 8); // equals k + ceil(k/r)
        assert_eq!(lower_bound_systematic(1, 2, 5, 3).unwrap().value, 3);
        // k=8, r=4, t=3, d=3: max{1, 2} over beta in {2,3} -> 8+3+2-1 = 12
        let b = lower_bound_systematic(8, 4, 3, 3).unwrap();
        assert_eq!((b.value, b.beta_star), (12, 3));
        assert!(lower_bound_systematic(4, 2, 1, 1).is_err());
    }

    #[test]
    fn rpdv_examples() {
        assert_eq!(lower_bound_rpdv(5, 2, 3, 3), 9);
        assert_eq!(lower_bound_rpdv(5, 2, 4, 4), 11);
        assert_eq!(lower_bound_rpdv(1, 1, 1, 1), 1);
    }

    #[test]
    fn table_lower_examples() {
        assert_eq!(table_lower_bound(5, 2, 3).unwrap(), 9);
        assert_eq!(table_lower_bound(5, 2, 4).unwrap(), 11);
        assert_eq!(table_lower_bound(6, 3, 2).unwrap(), 8);
        assert!(table_lower_bound(5, 2, 5).is_err());
    }

    #[test]
    fn table_lower_matches_rpdv_closed_forms() {
        for k in 1..=20 {
            for r in 2..=6 {
                for t in 2..=4 {
                    assert_eq!(
                        table_lower_bound(k, r, t).unwrap(),
                        lower_bound_rpdv(k, r, t, t),
                        "k={k}, r={r}, t={t}"
                    );
                }
            }
        }
    }

    #[test]
    fn table_upper_examples() {
        assert_eq!(table_upper_bound(5, 2, 3).unwrap(), 10);
        assert_eq!(table_upper_bound(11, 3, 3).unwrap(), 19);
        assert_eq!(table_upper_bound(8, 4, 4).unwrap(), 18);
        assert_eq!(table_upper_bound(12, 3, 3).unwrap(), 20);
        // k=7, r=3: tau=2, eta=2, gamma=2 -> 8 + 3 + ceil(2/2) = 12
        assert_eq!(table_upper_bound(7, 3, 3).unwrap(), 12);
        assert!(matches!(
            table_upper_bound(7, 3, 4),
            Err(BoundsError::NotCovered { .. })
        ));
        // below one full block the t=3 remainder shape degenerates to [I|1|I]
        assert_eq!(table_upper_bound(4, 5, 3).unwrap(), 9);
    }

    #[test]
    fn prop2_equality_of_table_bounds() {
        for k in 2..=20 {
            for r in 2..=6 {
                assert_eq!(
                    table_lower_bound(k, r, 2).unwrap(),
                    table_upper_bound(k, r, 2).unwrap(),
                    "k={k}, r={r}"
                );
            }
        }
    }

    #[test]
    fn griesmer_examples() {
        assert_eq!(griesmer_min_length(2, 4, 3), 7); // 3+2+1+1
        assert_eq!(griesmer_min_length(2, 1, 9), 9);
        assert_eq!(griesmer_min_length(2, 7, 1), 7);
    }

    #[test]
    fn kopt_oracle_small_values() {
        assert_eq!(kopt_bruteforce(3, 3), 1); // only the repetition code
        assert_eq!(kopt_bruteforce(7, 3), 4); // Hamming parameters
        assert_eq!(kopt_bruteforce(8, 4), 4); // extended Hamming
        assert_eq!(kopt_bruteforce(6, 3), 3);
        assert_eq!(kopt_bruteforce(5, 1), 5);
        assert_eq!(kopt_bruteforce(5, 2), 4);
        assert_eq!(kopt_bruteforce(4, 4), 1);
    }

    #[test]
    fn kopt_lookup_uses_table_exactly() {
        let v = k_opt(2, 7, 3);
        assert_eq!((v.k, v.exact), (4, true));
        let v = k_opt(2, 3, 3);
        assert_eq!((v.k, v.exact), (1, true));
        let v = k_opt(2, 9, 1);
        assert_eq!((v.k, v.exact), (9, true));
        // beyond the table: Griesmer cap, flagged. griesmer(k, 3) = k + 3
        // for k >= 2, so n = 20 caps k at 17.
        let v = k_opt(2, 20, 3);
        assert!(!v.exact);
        assert_eq!(v.k, 17);
        assert!(griesmer_min_length(2, 17, 3) <= 20);
        assert!(griesmer_min_length(2, 18, 3) > 20);
    }

    #[test]
    fn cm_bound_examples() {
        // construct_t2(4,2): (n,r,t,d) = (6,2,2,2): 3 + k_opt(2,2) = 4, tight
        let b = cm_dimension_bound(6, 2, 2, 2, 2).unwrap();
        assert_eq!(b.value, 4);
        // d=1 frees the tail completely
        let b = cm_dimension_bound(7, 2, 2, 1, 2).unwrap();
        assert_eq!(b.value, 6);
        // Example-1 parameters: 6-2+k_opt(4,3) = 5
        let b = cm_dimension_bound(10, 2, 3, 3, 2).unwrap();
        assert_eq!(b.value, 5);
        assert!(cm_dimension_bound(6, 2, 3, 3, 2).is_err());
    }

    #[test]
    fn cm_recursive_examples() {
        let b = cm_dimension_bound_recursive(6, 2, 2, 2, 2).unwrap();
        assert_eq!((b.value, b.beta_star), (4, 2));
        // t=1 reduces to the single beta=1 term
        let b = cm_dimension_bound_recursive(6, 2, 1, 2, 2).unwrap();
        assert_eq!(b.beta_star, 1);
        assert!(cm_dimension_bound_recursive(4, 3, 2, 2, 2).is_err());
    }

    #[test]
    fn entropy_values() {
        assert!((entropy_q(2, 0.5).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(entropy_q(2, 0.0).unwrap(), 0.0);
        assert!((entropy_q(4, 0.75).unwrap() - 1.0).abs() < 1e-12);
        assert!(entropy_q(2, 1.5).is_err());
        assert!(entropy_q(1, 0.5).is_err());
    }

    #[test]
    fn asymptotic_trivial_case() {
        let (first, _) = asymptotic_rate_bounds(100, 50, 0, 4, 1, 2).unwrap();
        assert_eq!(first, 1.0);
        assert!(asymptotic_rate_bounds(10, 5, 1, 4, 3, 2).is_err());
    }

    #[test]
    fn asymptotic_finite_pair() {
        let (a, b) = asymptotic_rate_bounds(1000, 500, 100, 4, 2, 2).unwrap();
        assert!(a.is_finite() && b.is_finite());
    }

    #[test]
    fn report_contains_sandwich_values() {
        let report = standard_report(5, 2, 3, None).unwrap();
        let max_lower = report
            .iter()
            .filter(|b| b.kind == BoundKind::LowerOnN)
            .map(|b| match b.value {
                BoundValue::Count(v) => v,
                _ => 0,
            })
            .max()
            .unwrap();
        let upper = report
            .iter()
            .find(|b| b.kind == BoundKind::UpperOnN)
            .map(|b| match b.value {
                BoundValue::Count(v) => v,
                _ => 0,
            })
            .unwrap();
        assert_eq!((max_lower, upper), (9, 10));
    }

    /// Regenerates the embedded table; run explicitly after changing the
    /// oracle: `cargo test -p batch-codes --release regenerate_embedded -- --ignored`
    #[test]
    #[ignore]
    fn regenerate_embedded_kopt_table() {
        let csv = kopt_table_csv(14, 14);
        std::fs::write(
            concat!(env!("CARGO_MANIFEST_DIR"), "/data/kopt_q2.csv"),
            csv,
        )
        .unwrap();
    }
}
