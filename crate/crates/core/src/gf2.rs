//! Dense linear algebra over GF(2).
//!
//! [`BitMatrix`] packs each row into `u64` words. Values are immutable in
//! spirit: every operation here is a pure function of its inputs, so shared
//! references can be used freely across threads.
//!
//! The module also defines the matrix text format used across the repo:
//! a header line `"k n"` followed by `k` lines of exactly `n` characters
//! from `{0, 1}` with no separators. Lines starting with `#` are comments
//! and are skipped by the parser.

use std::fmt;
use thiserror::Error;

/// Cap on the number of rows accepted by [`BitMatrix::min_distance`].
///
/// `2^24 - 1` codewords enumerate in well under a second when bit-packed;
/// everything this crate constructs has far fewer rows.
pub const MIN_DISTANCE_MAX_ROWS: usize = 24;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Gf2Error {
    #[error("matrix has {rows} rows, minimum-distance enumeration is capped at {max}")]
    DimensionTooLarge { rows: usize, max: usize },
    #[error("generator matrix is not of full row rank")]
    RankDeficient,
}

/// Errors produced while reading the matrix text format.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatrixParseError {
    #[error("missing header line \"k n\"")]
    MissingHeader,
    #[error("malformed header line {0:?}, expected \"k n\"")]
    BadHeader(String),
    #[error("header declares {expected} rows, found {found}")]
    RowCount { expected: usize, found: usize },
    #[error("row {row} has {found} characters, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("row {row} contains a character other than '0' or '1'")]
    BadDigit { row: usize },
    #[error("matrix must have at least one row")]
    EmptyMatrix,
}

const WORD_BITS: usize = 64;

fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

/// A dense binary matrix, rows packed into `u64` words (row-major).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    /// All-zero matrix. `rows` must be at least 1; `cols` may be 0.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1, "BitMatrix requires at least one row");
        let words_per_row = words_for(cols).max(1);
        BitMatrix {
            rows,
            cols,
            words_per_row,
            bits: vec![0; rows * words_per_row],
        }
    }

    /// The `n × n` identity.
    pub fn identity(n: usize) -> Self {
        let mut m = BitMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols);
        let w = self.bits[r * self.words_per_row + c / WORD_BITS];
        (w >> (c % WORD_BITS)) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        assert!(r < self.rows && c < self.cols);
        let word = &mut self.bits[r * self.words_per_row + c / WORD_BITS];
        let mask = 1u64 << (c % WORD_BITS);
        if value {
            *word |= mask;
        } else {
            *word &= !mask;
        }
    }

    fn row_words(&self, r: usize) -> &[u64] {
        &self.bits[r * self.words_per_row..(r + 1) * self.words_per_row]
    }

    /// Concatenate matrices with equal row counts side by side.
    pub fn hstack(blocks: &[&BitMatrix]) -> Self {
        assert!(!blocks.is_empty());
        let rows = blocks[0].rows;
        assert!(blocks.iter().all(|b| b.rows == rows));
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = BitMatrix::zeros(rows, cols);
        let mut offset = 0;
        for block in blocks {
            for r in 0..rows {
                for c in 0..block.cols {
                    if block.get(r, c) {
                        out.set(r, offset + c, true);
                    }
                }
            }
            offset += block.cols;
        }
        out
    }

    /// The submatrix formed by the columns in `set`, in ascending order.
    pub fn submatrix_columns(&self, set: &ColumnSet) -> BitMatrix {
        assert!(set.is_valid_for(self.cols));
        let mut out = BitMatrix::zeros(self.rows, set.len());
        for (j, &c) in set.indices().iter().enumerate() {
            for r in 0..self.rows {
                if self.get(r, c) {
                    out.set(r, j, true);
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut out = BitMatrix::zeros(self.cols.max(1), self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) {
                    out.set(c, r, true);
                }
            }
        }
        out
    }

    /// Row indices carrying a 1 in column `c`.
    pub fn column_support(&self, c: usize) -> Vec<usize> {
        (0..self.rows).filter(|&r| self.get(r, c)).collect()
    }

    pub fn column_weight(&self, c: usize) -> usize {
        (0..self.rows).filter(|&r| self.get(r, c)).count()
    }

    pub fn row_weight(&self, r: usize) -> usize {
        self.row_words(r)
            .iter()
            .map(|w| w.count_ones() as usize)
            .sum()
    }

    /// Whether the first `rows` columns form the identity matrix.
    pub fn has_identity_prefix(&self) -> bool {
        if self.cols < self.rows {
            return false;
        }
        for r in 0..self.rows {
            for c in 0..self.rows {
                if self.get(r, c) != (r == c) {
                    return false;
                }
            }
        }
        true
    }

    /// Rank over GF(2) by Gaussian elimination on a working copy.
    pub fn rank(&self) -> usize {
        let mut work: Vec<Vec<u64>> = (0..self.rows).map(|r| self.row_words(r).to_vec()).collect();
        let mut rank = 0;
        for c in 0..self.cols {
            let word = c / WORD_BITS;
            let mask = 1u64 << (c % WORD_BITS);
            let Some(pivot) = (rank..self.rows).find(|&r| work[r][word] & mask != 0) else {
                continue;
            };
            work.swap(rank, pivot);
            for r in 0..self.rows {
                if r != rank && work[r][word] & mask != 0 {
                    let (a, b) = if r < rank {
                        let (lo, hi) = work.split_at_mut(rank);
                        (&mut lo[r], &hi[0])
                    } else {
                        let (lo, hi) = work.split_at_mut(r);
                        (&mut hi[0], &lo[rank])
                    };
                    for (x, y) in a.iter_mut().zip(b.iter()) {
                        *x ^= *y;
                    }
                }
            }
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        rank
    }

    /// XOR of the columns indexed by `set`; the empty set yields zero.
    pub fn column_sum(&self, set: &ColumnSet) -> BitVector {
        assert!(set.is_valid_for(self.cols));
        let mut v = BitVector::zero(self.rows);
        for &c in set.indices() {
            for r in 0..self.rows {
                if self.get(r, c) {
                    v.flip(r);
                }
            }
        }
        v
    }

    /// Minimum Hamming weight over all `2^rows - 1` nonzero codewords of the
    /// code generated by the rows.
    ///
    /// Requires a full-row-rank generator (otherwise distinct messages
    /// collide and the minimum would degenerate to 0) and at most
    /// [`MIN_DISTANCE_MAX_ROWS`] rows.
    pub fn min_distance(&self) -> Result<usize, Gf2Error> {
        if self.rows > MIN_DISTANCE_MAX_ROWS {
            return Err(Gf2Error::DimensionTooLarge {
                rows: self.rows,
                max: MIN_DISTANCE_MAX_ROWS,
            });
        }
        if self.rank() != self.rows {
            return Err(Gf2Error::RankDeficient);
        }
        // Gray-code walk: consecutive messages differ in one row.
        let mut word = vec![0u64; self.words_per_row];
        let mut best = usize::MAX;
        let total: u64 = 1 << self.rows;
        for m in 1..total {
            let flip = m.trailing_zeros() as usize;
            for (w, r) in word.iter_mut().zip(self.row_words(flip)) {
                *w ^= *r;
            }
            let weight: usize = word.iter().map(|w| w.count_ones() as usize).sum();
            best = best.min(weight);
        }
        Ok(best)
    }

    /// True iff some 2×2 all-ones submatrix exists, i.e. two distinct columns
    /// share at least two support rows.
    pub fn has_one_square(&self) -> bool {
        // Column-major masks over the rows make each pair test a word AND.
        let row_words = words_for(self.rows).max(1);
        let mut col_masks = vec![0u64; self.cols * row_words];
        for c in 0..self.cols {
            for r in 0..self.rows {
                if self.get(r, c) {
                    col_masks[c * row_words + r / WORD_BITS] |= 1 << (r % WORD_BITS);
                }
            }
        }
        for c1 in 0..self.cols {
            for c2 in c1 + 1..self.cols {
                let shared: u32 = (0..row_words)
                    .map(|w| {
                        (col_masks[c1 * row_words + w] & col_masks[c2 * row_words + w]).count_ones()
                    })
                    .sum();
                if shared >= 2 {
                    return true;
                }
            }
        }
        false
    }

    /// Rank of the column submatrix indexed by `set`.
    ///
    /// For a linear code this equals the number of independent symbols seen
    /// when the code is projected onto those coordinates.
    pub fn projection_dimension(&self, set: &ColumnSet) -> usize {
        if set.is_empty() {
            return 0;
        }
        self.submatrix_columns(set).rank()
    }

    /// Parse the shared matrix text format. Lines starting with `#` are
    /// ignored wherever they appear.
    pub fn from_text(text: &str) -> Result<Self, MatrixParseError> {
        let mut lines = text
            .lines()
            .map(str::trim_end)
            .filter(|l| !l.starts_with('#'))
            .filter(|l| !l.is_empty());
        let header = lines.next().ok_or(MatrixParseError::MissingHeader)?;
        let mut parts = header.split_whitespace();
        let (k, n) = match (parts.next(), parts.next(), parts.next()) {
            (Some(k), Some(n), None) => {
                let k = k
                    .parse::<usize>()
                    .map_err(|_| MatrixParseError::BadHeader(header.into()))?;
                let n = n
                    .parse::<usize>()
                    .map_err(|_| MatrixParseError::BadHeader(header.into()))?;
                (k, n)
            }
            _ => return Err(MatrixParseError::BadHeader(header.into())),
        };
        if k == 0 {
            return Err(MatrixParseError::EmptyMatrix);
        }
        if n == 0 {
            // zero-width rows are all empty lines; nothing to read
            return Ok(BitMatrix::zeros(k, 0));
        }
        let mut m = BitMatrix::zeros(k, n);
        let mut row = 0;
        for line in lines {
            if row == k {
                return Err(MatrixParseError::RowCount {
                    expected: k,
                    found: k + 1,
                });
            }
            if line.chars().count() != n {
                return Err(MatrixParseError::RaggedRow {
                    row,
                    expected: n,
                    found: line.chars().count(),
                });
            }
            for (c, ch) in line.chars().enumerate() {
                match ch {
                    '0' => {}
                    '1' => m.set(row, c, true),
                    _ => return Err(MatrixParseError::BadDigit { row }),
                }
            }
            row += 1;
        }
        if row != k {
            return Err(MatrixParseError::RowCount {
                expected: k,
                found: row,
            });
        }
        Ok(m)
    }

    /// Render in the matrix text format (no comment header).
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.rows, self.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.push(if self.get(r, c) { '1' } else { '0' });
            }
            out.push('\n');
        }
        out
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            for c in 0..self.cols {
                write!(f, "{}", if self.get(r, c) { '1' } else { '0' })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// A sorted, duplicate-free set of column indices of a matrix.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct ColumnSet {
    indices: Vec<usize>,
}

impl ColumnSet {
    /// Build from arbitrary indices; sorts and rejects duplicates or
    /// out-of-range entries against a matrix of width `cols`.
    pub fn new(mut indices: Vec<usize>, cols: usize) -> Option<Self> {
        indices.sort_unstable();
        let in_range = indices.iter().all(|&i| i < cols);
        let distinct = indices.windows(2).all(|w| w[0] != w[1]);
        (in_range && distinct).then_some(ColumnSet { indices })
    }

    pub fn empty() -> Self {
        ColumnSet::default()
    }

    /// From indices already known to be sorted, distinct and in range.
    pub(crate) fn from_sorted_unchecked(indices: Vec<usize>) -> Self {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        ColumnSet { indices }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, c: usize) -> bool {
        self.indices.binary_search(&c).is_ok()
    }

    pub fn is_valid_for(&self, cols: usize) -> bool {
        self.indices.last().is_none_or(|&i| i < cols)
    }

    pub fn is_disjoint(&self, other: &ColumnSet) -> bool {
        self.indices.iter().all(|&i| !other.contains(i))
    }

    /// Symmetric difference, useful for linearity checks.
    pub fn symmetric_difference(&self, other: &ColumnSet) -> ColumnSet {
        let mut out: Vec<usize> = self
            .indices
            .iter()
            .filter(|&&i| !other.contains(i))
            .chain(other.indices.iter().filter(|&&i| !self.contains(i)))
            .copied()
            .collect();
        out.sort_unstable();
        ColumnSet { indices: out }
    }

    /// Union of several sets (duplicates collapse).
    pub fn union_of(sets: &[&ColumnSet]) -> ColumnSet {
        let mut out: Vec<usize> = sets
            .iter()
            .flat_map(|s| s.indices.iter().copied())
            .collect();
        out.sort_unstable();
        out.dedup();
        ColumnSet { indices: out }
    }
}

/// A packed binary vector, used for column sums and unit-vector tests.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zero(len: usize) -> Self {
        BitVector {
            len,
            words: vec![0; words_for(len).max(1)],
        }
    }

    /// The standard unit vector `e_i`.
    pub fn unit(len: usize, i: usize) -> Self {
        assert!(i < len);
        let mut v = BitVector::zero(len);
        v.flip(i);
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len);
        self.words[i / WORD_BITS] ^= 1 << (i % WORD_BITS);
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn xor_assign(&mut self, other: &BitVector) {
        assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_rows(rows: &[&str]) -> BitMatrix {
        let text = format!("{} {}\n{}\n", rows.len(), rows[0].len(), rows.join("\n"));
        BitMatrix::from_text(&text).unwrap()
    }

    /// The 5×10 generator used throughout the r=2, t=3 tests.
    fn example1() -> BitMatrix {
        from_rows(&[
            "1000010010",
            "0100001001",
            "0010000110",
            "0001000101",
            "0000111000",
        ])
    }

    #[test]
    fn rank_identity() {
        assert_eq!(BitMatrix::identity(3).rank(), 3);
    }

    #[test]
    fn rank_zero_matrix() {
        assert_eq!(BitMatrix::zeros(4, 5).rank(), 0);
    }

    #[test]
    fn rank_example1_is_full() {
        // Systematic prefix forces full row rank; confirmed by independent
        // row reduction by hand.
        assert_eq!(example1().rank(), 5);
    }

    #[test]
    fn rank_equals_transpose_rank() {
        let m = from_rows(&["1101", "0110", "1011"]);
        assert_eq!(m.rank(), m.transpose().rank());
    }

    #[test]
    fn column_sum_identity_pair() {
        let id = BitMatrix::identity(3);
        let s = ColumnSet::new(vec![0, 1], 3).unwrap();
        let v = id.column_sum(&s);
        assert!(v.get(0) && v.get(1) && !v.get(2));
    }

    #[test]
    fn column_sum_empty_is_zero() {
        let v = example1().column_sum(&ColumnSet::empty());
        assert!(v.is_zero());
    }

    #[test]
    fn column_sum_example1_pair() {
        // Columns 5 and 9 (0-based) read off the matrix above are
        // (1,0,0,0,1) and (0,1,0,1,0); their XOR is (1,1,0,1,1).
        let g = example1();
        let s = ColumnSet::new(vec![5, 9], 10).unwrap();
        let v = g.column_sum(&s);
        let expect = [true, true, false, true, true];
        for (i, &e) in expect.iter().enumerate() {
            assert_eq!(v.get(i), e, "component {i}");
        }
    }

    #[test]
    fn min_distance_repetition() {
        let g = from_rows(&["111"]);
        assert_eq!(g.min_distance().unwrap(), 3);
    }

    #[test]
    fn min_distance_rejects_rank_deficient() {
        let g = from_rows(&["101", "101"]);
        assert_eq!(g.min_distance(), Err(Gf2Error::RankDeficient));
    }

    #[test]
    fn min_distance_rejects_too_many_rows() {
        let g = BitMatrix::identity(25);
        assert!(matches!(
            g.min_distance(),
            Err(Gf2Error::DimensionTooLarge { rows: 25, .. })
        ));
    }

    /// Naive re-encoder over plain vectors, independent of the bit-packed path.
    fn naive_min_distance(g: &BitMatrix) -> usize {
        let k = g.rows();
        let n = g.cols();
        let mut best = usize::MAX;
        for msg in 1u32..(1 << k) {
            let mut cw = vec![false; n];
            for r in 0..k {
                if (msg >> r) & 1 == 1 {
                    for (c, slot) in cw.iter_mut().enumerate() {
                        *slot ^= g.get(r, c);
                    }
                }
            }
            best = best.min(cw.iter().filter(|&&b| b).count());
        }
        best
    }

    #[test]
    fn min_distance_matches_naive_enumeration() {
        let g = example1();
        assert_eq!(g.min_distance().unwrap(), naive_min_distance(&g));
    }

    #[test]
    fn min_distance_t2_code() {
        // brute force over the 15 nonzero messages gives 2
        let g = crate::construct::construct_t2(4, 2).unwrap();
        assert_eq!(naive_min_distance(&g), 2);
        assert_eq!(g.min_distance().unwrap(), 2);
    }

    #[test]
    fn one_square_all_ones() {
        let m = from_rows(&["11", "11"]);
        assert!(m.has_one_square());
    }

    #[test]
    fn one_square_identity_is_clean() {
        assert!(!BitMatrix::identity(5).has_one_square());
    }

    #[test]
    fn projection_full_and_empty() {
        let g = example1();
        let all = ColumnSet::new((0..10).collect(), 10).unwrap();
        assert_eq!(g.projection_dimension(&all), 5);
        assert_eq!(g.projection_dimension(&ColumnSet::empty()), 0);
    }

    #[test]
    fn parse_rejects_ragged_rows() {
        let err = BitMatrix::from_text("2 3\n101\n10\n").unwrap_err();
        assert!(matches!(err, MatrixParseError::RaggedRow { row: 1, .. }));
    }

    #[test]
    fn parse_rejects_bad_digit() {
        let err = BitMatrix::from_text("1 3\n1x1\n").unwrap_err();
        assert!(matches!(err, MatrixParseError::BadDigit { row: 0 }));
    }

    #[test]
    fn parse_skips_comment_lines() {
        let m = BitMatrix::from_text("# family=t2 k=2 r=2 t=2\n2 3\n101\n011\n").unwrap();
        assert_eq!((m.rows(), m.cols()), (2, 3));
        assert!(m.get(0, 2) && m.get(1, 2));
    }

    #[test]
    fn text_round_trip() {
        let g = example1();
        let back = BitMatrix::from_text(&g.to_text()).unwrap();
        assert_eq!(g, back);
        let degenerate = BitMatrix::zeros(2, 0);
        assert_eq!(
            BitMatrix::from_text(&degenerate.to_text()).unwrap(),
            degenerate
        );
    }

    #[test]
    fn column_set_rejects_duplicates_and_range() {
        assert!(ColumnSet::new(vec![1, 1], 4).is_none());
        assert!(ColumnSet::new(vec![4], 4).is_none());
        assert!(ColumnSet::new(vec![3, 0], 4).is_some());
    }
}
