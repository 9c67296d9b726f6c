//! Exact sparse linear algebra over the integers, the rationals, and
//! prime fields.
//!
//! The spectral-sequence differentials arrive as sparse integer
//! matrices with small entries.  Ranks over the rationals are computed
//! by fraction-free elimination (integer row combinations with content
//! stripping, so no rational arithmetic ever appears), pivoting for
//! sparsity Markowitz-style with deterministic tie-breaks.  Torsion
//! data comes from Smith normal form.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("entry ({row}, {col}) outside a {rows}x{cols} matrix")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    #[error("dimension mismatch: left is {lrows}x{lcols}, right is {rrows}x{rcols}")]
    DimensionMismatch {
        lrows: usize,
        lcols: usize,
        rrows: usize,
        rcols: usize,
    },
    #[error("modulus {0} is not prime")]
    CompositeModulus(u64),
    #[error("matrix with {cols} columns exceeds the Smith normal form cap of {cap}")]
    SmithSizeCap { cols: usize, cap: usize },
    #[error("malformed coordinate text: {0}")]
    Parse(String),
}

/// Sparse integer matrix with arbitrary-precision entries.
///
/// Entries are kept in canonical row-major sorted order with no
/// duplicates and no explicit zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseIntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, BigInt)>,
}

impl SparseIntMatrix {
    /// An all-zero matrix of the given shape.
    pub fn zero(rows: usize, cols: usize) -> Self {
        SparseIntMatrix {
            rows,
            cols,
            entries: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        SparseIntMatrix {
            rows: n,
            cols: n,
            entries: (0..n).map(|i| (i, i, BigInt::one())).collect(),
        }
    }

    /// Builds a matrix from raw entries, summing duplicates and
    /// dropping zeros.
    pub fn from_entries(
        rows: usize,
        cols: usize,
        raw: impl IntoIterator<Item = (usize, usize, BigInt)>,
    ) -> Result<Self, LinalgError> {
        let mut merged: BTreeMap<(usize, usize), BigInt> = BTreeMap::new();
        for (r, c, v) in raw {
            if r >= rows || c >= cols {
                return Err(LinalgError::IndexOutOfRange {
                    row: r,
                    col: c,
                    rows,
                    cols,
                });
            }
            *merged.entry((r, c)).or_insert_with(BigInt::zero) += v;
        }
        let entries = merged
            .into_iter()
            .filter(|(_, v)| !v.is_zero())
            .map(|((r, c), v)| (r, c, v))
            .collect();
        Ok(SparseIntMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn from_dense(data: &[Vec<i64>]) -> Self {
        let rows = data.len();
        let cols = data.first().map_or(0, |r| r.len());
        let entries = data
            .iter()
            .enumerate()
            .flat_map(|(r, row)| {
                row.iter()
                    .enumerate()
                    .filter(|(_, v)| **v != 0)
                    .map(move |(c, v)| (r, c, BigInt::from(*v)))
            })
            .collect();
        SparseIntMatrix {
            rows,
            cols,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(usize, usize, BigInt)] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn transpose(&self) -> Self {
        let mut entries: Vec<(usize, usize, BigInt)> = self
            .entries
            .iter()
            .map(|(r, c, v)| (*c, *r, v.clone()))
            .collect();
        entries.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        SparseIntMatrix {
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }

    /// Applies row and column permutations: entry (r, c) moves to
    /// (row_perm[r], col_perm[c]).
    pub fn permute(&self, row_perm: &[usize], col_perm: &[usize]) -> Result<Self, LinalgError> {
        if row_perm.len() != self.rows || col_perm.len() != self.cols {
            return Err(LinalgError::DimensionMismatch {
                lrows: row_perm.len(),
                lcols: col_perm.len(),
                rrows: self.rows,
                rcols: self.cols,
            });
        }
        Self::from_entries(
            self.rows,
            self.cols,
            self.entries
                .iter()
                .map(|(r, c, v)| (row_perm[*r], col_perm[*c], v.clone())),
        )
    }

    /// Sparse matrix product `self * rhs`.
    pub fn multiply(&self, rhs: &SparseIntMatrix) -> Result<Self, LinalgError> {
        if self.cols != rhs.rows {
            return Err(LinalgError::DimensionMismatch {
                lrows: self.rows,
                lcols: self.cols,
                rrows: rhs.rows,
                rcols: rhs.cols,
            });
        }
        // rows of self indexed by column-to-hit
        let mut left_by_col: HashMap<usize, Vec<(usize, &BigInt)>> = HashMap::new();
        for (r, c, v) in &self.entries {
            left_by_col.entry(*c).or_default().push((*r, v));
        }
        let mut acc: BTreeMap<(usize, usize), BigInt> = BTreeMap::new();
        for (r, c, v) in &rhs.entries {
            if let Some(hits) = left_by_col.get(r) {
                for (lr, lv) in hits {
                    let e = acc.entry((*lr, *c)).or_insert_with(BigInt::zero);
                    *e += *lv * v;
                }
            }
        }
        let entries = acc
            .into_iter()
            .filter(|(_, v)| !v.is_zero())
            .map(|((r, c), v)| (r, c, v))
            .collect();
        Ok(SparseIntMatrix {
            rows: self.rows,
            cols: rhs.cols,
            entries,
        })
    }

    pub fn to_dense(&self) -> Vec<Vec<BigInt>> {
        let mut out = vec![vec![BigInt::zero(); self.cols]; self.rows];
        for (r, c, v) in &self.entries {
            out[*r][*c] = v.clone();
        }
        out
    }

    /// Coordinate text form: a `rows cols nnz` header followed by one
    /// 1-indexed `row col value` line per entry.
    pub fn to_coordinate_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} {} {}", self.rows, self.cols, self.entries.len());
        for (r, c, v) in &self.entries {
            let _ = writeln!(s, "{} {} {}", r + 1, c + 1, v);
        }
        s
    }

    pub fn from_coordinate_text(text: &str) -> Result<Self, LinalgError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| LinalgError::Parse("missing header".into()))?;
        let head: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|e| LinalgError::Parse(format!("bad header: {e}")))?;
        if head.len() != 3 {
            return Err(LinalgError::Parse("header must be `rows cols nnz`".into()));
        }
        let (rows, cols, nnz) = (head[0], head[1], head[2]);
        let mut raw = Vec::with_capacity(nnz);
        for line in lines {
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 3 {
                return Err(LinalgError::Parse(format!("bad entry line: {line:?}")));
            }
            let r: usize = toks[0]
                .parse()
                .map_err(|e| LinalgError::Parse(format!("bad row index: {e}")))?;
            let c: usize = toks[1]
                .parse()
                .map_err(|e| LinalgError::Parse(format!("bad col index: {e}")))?;
            let v: BigInt = toks[2]
                .parse()
                .map_err(|e| LinalgError::Parse(format!("bad value: {e}")))?;
            if r == 0 || c == 0 {
                return Err(LinalgError::Parse("indices are 1-based".into()));
            }
            raw.push((r - 1, c - 1, v));
        }
        if raw.len() != nnz {
            return Err(LinalgError::Parse(format!(
                "header promised {nnz} entries, found {}",
                raw.len()
            )));
        }
        Self::from_entries(rows, cols, raw)
    }
}

/// Smith normal form data: the elementary divisors, each positive and
/// dividing the next.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm {
    divisors: Vec<BigInt>,
}

impl SmithForm {
    pub fn divisors(&self) -> &[BigInt] {
        &self.divisors
    }

    pub fn rank(&self) -> usize {
        self.divisors.len()
    }

    /// Divisors strictly greater than one, i.e. the torsion
    /// coefficients of the cokernel.
    pub fn nontrivial_divisors(&self) -> Vec<BigInt> {
        self.divisors
            .iter()
            .filter(|d| !d.is_one())
            .cloned()
            .collect()
    }
}

/// Sparse elimination workspace shared by the rational and modular
/// rank routines.  Rows live in ordered maps keyed by column; a
/// column-to-rows index drives Markowitz-style pivot selection.
struct Elimination {
    rows: Vec<Option<BTreeMap<u32, BigInt>>>,
    col_rows: Vec<HashSet<u32>>,
}

impl Elimination {
    fn new(m: &SparseIntMatrix) -> Self {
        // eliminate along the smaller side
        let work = if m.rows <= m.cols {
            m.clone()
        } else {
            m.transpose()
        };
        let mut rows: Vec<Option<BTreeMap<u32, BigInt>>> = vec![None; work.rows];
        let mut col_rows: Vec<HashSet<u32>> = vec![HashSet::new(); work.cols];
        for (r, c, v) in work.entries {
            rows[r]
                .get_or_insert_with(BTreeMap::new)
                .insert(c as u32, v);
            col_rows[c].insert(r as u32);
        }
        Elimination { rows, col_rows }
    }

    /// Picks a pivot: unit entries first, then minimal Markowitz cost
    /// (row count - 1) * (col count - 1), ties broken by lowest row
    /// then lowest column.
    fn choose_pivot(&self, live_cols: &BTreeSet<(u32, u32)>) -> Option<(u32, u32)> {
        // examine a few of the sparsest live columns
        let mut best: Option<((bool, u64, u32, u32), (u32, u32))> = None;
        for (scanned, &(cnt, col)) in live_cols.iter().enumerate() {
            if scanned >= 8 && best.is_some() {
                break;
            }
            for &r in &self.col_rows[col as usize] {
                let row = self.rows[r as usize].as_ref().expect("live row");
                let v = &row[&col];
                let key = (
                    !v.magnitude().is_one(),
                    (row.len() as u64 - 1) * (cnt as u64 - 1),
                    r,
                    col,
                );
                if best.as_ref().map_or(true, |(bk, _)| key < *bk) {
                    best = Some((key, (r, col)));
                }
            }
        }
        best.map(|(_, rc)| rc)
    }

    fn remove_row(&mut self, r: u32, live_cols: &mut BTreeSet<(u32, u32)>) {
        if let Some(row) = self.rows[r as usize].take() {
            for c in row.keys() {
                let cnt = self.col_rows[*c as usize].len() as u32;
                live_cols.remove(&(cnt, *c));
                self.col_rows[*c as usize].remove(&r);
                let new = self.col_rows[*c as usize].len() as u32;
                if new > 0 {
                    live_cols.insert((new, *c));
                }
            }
        }
    }

    /// Replaces row r with `a * row_r + b * other`, restoring the
    /// column index, then strips integer content.
    fn combine_row(
        &mut self,
        r: u32,
        a: &BigInt,
        b: &BigInt,
        other: &BTreeMap<u32, BigInt>,
        live_cols: &mut BTreeSet<(u32, u32)>,
    ) {
        let row = self.rows[r as usize].take().expect("live row");
        let mut merged: BTreeMap<u32, BigInt> = BTreeMap::new();
        for (c, v) in &row {
            merged.insert(*c, a * v);
        }
        for (c, v) in other {
            let e = merged.entry(*c).or_insert_with(BigInt::zero);
            *e += b * v;
        }
        merged.retain(|_, v| !v.is_zero());
        // content strip keeps entries small without rational arithmetic
        let mut content = BigInt::zero();
        for v in merged.values() {
            content = content.gcd(v);
            if content.is_one() {
                break;
            }
        }
        if !content.is_zero() && !content.is_one() {
            for v in merged.values_mut() {
                *v = &*v / &content;
            }
        }
        // update column index for changed support
        for c in row.keys() {
            if !merged.contains_key(c) {
                let cnt = self.col_rows[*c as usize].len() as u32;
                live_cols.remove(&(cnt, *c));
                self.col_rows[*c as usize].remove(&r);
                let new = self.col_rows[*c as usize].len() as u32;
                if new > 0 {
                    live_cols.insert((new, *c));
                }
            }
        }
        for c in merged.keys() {
            if !row.contains_key(c) {
                let cnt = self.col_rows[*c as usize].len() as u32;
                if cnt > 0 {
                    live_cols.remove(&(cnt, *c));
                }
                self.col_rows[*c as usize].insert(r);
                live_cols.insert((cnt + 1, *c));
            }
        }
        if !merged.is_empty() {
            self.rows[r as usize] = Some(merged);
        }
    }

    fn run(mut self) -> usize {
        let mut live_cols: BTreeSet<(u32, u32)> = self
            .col_rows
            .iter()
            .enumerate()
            .filter(|(_, s)| !s.is_empty())
            .map(|(c, s)| (s.len() as u32, c as u32))
            .collect();
        let mut rank = 0;
        while let Some((pr, pc)) = self.choose_pivot(&live_cols) {
            rank += 1;
            let pivot_row = self.rows[pr as usize].clone().expect("pivot row");
            let pivot_val = pivot_row[&pc].clone();
            self.remove_row(pr, &mut live_cols);
            let targets: Vec<u32> = self.col_rows[pc as usize].iter().copied().collect();
            for r in targets {
                let coeff = self.rows[r as usize]
                    .as_ref()
                    .and_then(|row| row.get(&pc))
                    .cloned()
                    .expect("indexed entry");
                // pivot_val * row - coeff * pivot_row clears column pc
                self.combine_row(r, &pivot_val, &(-coeff), &pivot_row, &mut live_cols);
            }
        }
        rank
    }
}

/// Exact rank over the rationals by fraction-free sparse elimination.
pub fn rank_over_rationals(m: &SparseIntMatrix) -> usize {
    if m.is_zero() {
        return 0;
    }
    Elimination::new(m).run()
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Rank of the matrix reduced modulo a prime.
pub fn rank_mod_prime(m: &SparseIntMatrix, ell: u64) -> Result<usize, LinalgError> {
    if !is_prime(ell) {
        return Err(LinalgError::CompositeModulus(ell));
    }
    let ell_big = BigInt::from(ell);
    // reduce entries first; zero rows/cols disappear on their own
    let reduced = SparseIntMatrix::from_entries(
        m.rows,
        m.cols,
        m.entries
            .iter()
            .map(|(r, c, v)| (*r, *c, v.mod_floor(&ell_big))),
    )?;
    if reduced.is_zero() {
        return Ok(0);
    }
    Ok(ModElimination::new(&reduced, ell).run())
}

/// Modular variant of the sparse elimination (field arithmetic, so no
/// entry growth and every nonzero is a unit).
struct ModElimination {
    ell: u64,
    rows: Vec<Option<BTreeMap<u32, u64>>>,
    col_rows: Vec<HashSet<u32>>,
}

impl ModElimination {
    fn new(m: &SparseIntMatrix, ell: u64) -> Self {
        let work = if m.rows <= m.cols {
            m.clone()
        } else {
            m.transpose()
        };
        let ell_big = BigInt::from(ell);
        let mut rows: Vec<Option<BTreeMap<u32, u64>>> = vec![None; work.rows];
        let mut col_rows: Vec<HashSet<u32>> = vec![HashSet::new(); work.cols];
        for (r, c, v) in &work.entries {
            let vm = v.mod_floor(&ell_big);
            let vm: u64 = vm.try_into().expect("reduced value fits u64");
            if vm != 0 {
                rows[*r].get_or_insert_with(BTreeMap::new).insert(*c as u32, vm);
                col_rows[*c].insert(*r as u32);
            }
        }
        ModElimination {
            ell,
            rows,
            col_rows,
        }
    }

    fn inv(&self, a: u64) -> u64 {
        // extended Euclid; ell is prime and a nonzero mod ell
        let (mut t, mut new_t): (i128, i128) = (0, 1);
        let (mut r, mut new_r): (i128, i128) = (self.ell as i128, a as i128);
        while new_r != 0 {
            let q = r / new_r;
            (t, new_t) = (new_t, t - q * new_t);
            (r, new_r) = (new_r, r - q * new_r);
        }
        debug_assert_eq!(r, 1);
        t.rem_euclid(self.ell as i128) as u64
    }

    fn run(mut self) -> usize {
        let mut live_cols: BTreeSet<(u32, u32)> = self
            .col_rows
            .iter()
            .enumerate()
            .filter(|(_, s)| !s.is_empty())
            .map(|(c, s)| (s.len() as u32, c as u32))
            .collect();
        let mut rank = 0usize;
        loop {
            // sparsest column, lowest row id
            let Some(&(_, pc)) = live_cols.iter().next() else {
                break;
            };
            let pr = *self.col_rows[pc as usize]
                .iter()
                .min()
                .expect("live column has rows");
            rank += 1;
            let pivot_row = self.rows[pr as usize].take().expect("pivot row");
            for c in pivot_row.keys() {
                let cnt = self.col_rows[*c as usize].len() as u32;
                live_cols.remove(&(cnt, *c));
                self.col_rows[*c as usize].remove(&pr);
                let new = self.col_rows[*c as usize].len() as u32;
                if new > 0 {
                    live_cols.insert((new, *c));
                }
            }
            let pivot_inv = self.inv(pivot_row[&pc]);
            let targets: Vec<u32> = self.col_rows[pc as usize].iter().copied().collect();
            for r in targets {
                let row = self.rows[r as usize].take().expect("live row");
                let coeff = row[&pc];
                let factor = ((coeff as u128 * pivot_inv as u128) % self.ell as u128) as u64;
                let mut merged = row.clone();
                for (c, v) in &pivot_row {
                    let sub = (factor as u128 * *v as u128 % self.ell as u128) as u64;
                    let e = merged.entry(*c).or_insert(0);
                    *e = ((*e as u128 + self.ell as u128 - sub as u128) % self.ell as u128) as u64;
                }
                merged.retain(|_, v| *v != 0);
                for c in row.keys() {
                    if !merged.contains_key(c) {
                        let cnt = self.col_rows[*c as usize].len() as u32;
                        live_cols.remove(&(cnt, *c));
                        self.col_rows[*c as usize].remove(&r);
                        let new = self.col_rows[*c as usize].len() as u32;
                        if new > 0 {
                            live_cols.insert((new, *c));
                        }
                    }
                }
                for c in merged.keys() {
                    if !row.contains_key(c) {
                        let cnt = self.col_rows[*c as usize].len() as u32;
                        if cnt > 0 {
                            live_cols.remove(&(cnt, *c));
                        }
                        self.col_rows[*c as usize].insert(r);
                        live_cols.insert((cnt + 1, *c));
                    }
                }
                if !merged.is_empty() {
                    self.rows[r as usize] = Some(merged);
                }
            }
        }
        rank
    }
}

/// Smith normal form with the default column cap.
pub fn smith_normal_form(m: &SparseIntMatrix) -> Result<SmithForm, LinalgError> {
    smith_normal_form_with_cap(m, crate::Limits::default().snf_max_cols)
}

/// Smith normal form, refusing matrices wider than `max_cols`.
pub fn smith_normal_form_with_cap(
    m: &SparseIntMatrix,
    max_cols: usize,
) -> Result<SmithForm, LinalgError> {
    if m.cols > max_cols && m.rows > max_cols {
        return Err(LinalgError::SmithSizeCap {
            cols: m.cols.min(m.rows),
            cap: max_cols,
        });
    }
    let work = if m.rows <= m.cols {
        m.clone()
    } else {
        m.transpose()
    };
    let mut rows: Vec<BTreeMap<u32, BigInt>> = vec![BTreeMap::new(); work.rows];
    for (r, c, v) in work.entries {
        rows[r].insert(c as u32, v);
    }
    let mut divisors: Vec<BigInt> = Vec::new();
    let mut active: Vec<usize> = (0..rows.len()).collect();
    loop {
        active.retain(|r| !rows[*r].is_empty());
        if active.is_empty() {
            break;
        }
        // entry of least magnitude, lowest (row, col) on ties
        let (mut pr, mut pc) = (usize::MAX, u32::MAX);
        let mut best: Option<BigInt> = None;
        for &r in &active {
            for (c, v) in &rows[r] {
                let mag = v.abs();
                if best
                    .as_ref()
                    .map_or(true, |b| mag < *b || (mag == *b && (r, *c) < (pr, pc)))
                {
                    best = Some(mag);
                    pr = r;
                    pc = *c;
                }
            }
        }
        'reduce: loop {
            // clear the pivot column by row operations and the pivot
            // row by column operations; whenever a remainder survives
            // the pivot moves onto it, strictly shrinking magnitude
            loop {
                let pivot = rows[pr][&pc].clone();
                let mut dirty = false;
                let others: Vec<usize> = active.iter().copied().filter(|r| *r != pr).collect();
                for r in others {
                    if let Some(v) = rows[r].get(&pc).cloned() {
                        let q = div_nearest(&v, &pivot);
                        if !q.is_zero() {
                            let pivot_row = rows[pr].clone();
                            let target = &mut rows[r];
                            for (c, pv) in &pivot_row {
                                let e = target.entry(*c).or_insert_with(BigInt::zero);
                                *e -= &q * pv;
                            }
                            target.retain(|_, v| !v.is_zero());
                        }
                        if rows[r].contains_key(&pc) {
                            // remainder smaller than pivot becomes the pivot
                            pr = r;
                            dirty = true;
                            break;
                        }
                    }
                }
                if dirty {
                    continue;
                }
                // the pivot column is clear elsewhere, so clearing the
                // pivot row by column operations only changes that row
                let pivot = rows[pr][&pc].clone();
                let row_cols: Vec<(u32, BigInt)> = rows[pr]
                    .iter()
                    .filter(|(c, _)| **c != pc)
                    .map(|(c, v)| (*c, v.clone()))
                    .collect();
                let mut col_dirty = false;
                for (c, v) in row_cols {
                    let q = div_nearest(&v, &pivot);
                    if !q.is_zero() {
                        let sub = &q * &pivot;
                        let e = rows[pr].entry(c).or_insert_with(BigInt::zero);
                        *e -= sub;
                        if e.is_zero() {
                            rows[pr].remove(&c);
                        }
                    }
                    if rows[pr].contains_key(&c) {
                        // remainder survives; move pivot to that column
                        pc = c;
                        col_dirty = true;
                        break;
                    }
                }
                if !col_dirty {
                    break;
                }
            }
            // pivot row and column are clear except at (pr, pc); the
            // pivot must divide every remaining entry before extraction
            let pivot = rows[pr][&pc].clone();
            let mut offender: Option<usize> = None;
            'scan: for &r in &active {
                if r == pr {
                    continue;
                }
                for v in rows[r].values() {
                    if !(v % &pivot).is_zero() {
                        offender = Some(r);
                        break 'scan;
                    }
                }
            }
            let Some(r) = offender else { break 'reduce };
            // fold the offending row into the pivot row; the next
            // column-clearing pass shrinks the pivot toward the gcd
            let addend = rows[r].clone();
            for (c, v) in addend {
                let e = rows[pr].entry(c).or_insert_with(BigInt::zero);
                *e += v;
                if e.is_zero() {
                    rows[pr].remove(&c);
                }
            }
        }
        divisors.push(rows[pr][&pc].abs());
        rows[pr].clear();
        active.retain(|r| *r != pr);
    }
    // pivots were extracted smallest-first with full divisibility
    // enforcement, so they already chain; assert rather than fix
    for i in 0..divisors.len().saturating_sub(1) {
        debug_assert!((&divisors[i + 1] % &divisors[i]).is_zero());
    }
    Ok(SmithForm { divisors })
}

/// Division with the quotient chosen to minimize remainder magnitude.
fn div_nearest(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_rem(b);
    if r.abs() * 2 > b.abs() {
        if r.sign() == b.sign() {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn rank_of_zero_matrix_is_zero() {
        assert_eq!(rank_over_rationals(&SparseIntMatrix::zero(4, 7)), 0);
    }

    #[test]
    fn rank_of_identity_is_full() {
        assert_eq!(rank_over_rationals(&SparseIntMatrix::identity(5)), 5);
    }

    #[test]
    fn rank_of_rectangular_example() {
        // rows are multiples of each other plus one independent row
        let m = SparseIntMatrix::from_dense(&[
            vec![2, 4, 6],
            vec![1, 2, 3],
            vec![0, 1, 1],
        ]);
        assert_eq!(rank_over_rationals(&m), 2);
    }

    #[test]
    fn smith_of_diagonal_in_form_already() {
        let m = SparseIntMatrix::from_dense(&[vec![2, 0], vec![0, 4]]);
        let s = smith_normal_form(&m).unwrap();
        assert_eq!(s.divisors(), &[big(2), big(4)]);
    }

    #[test]
    fn smith_of_coprime_diagonal_folds_to_chain() {
        let m = SparseIntMatrix::from_dense(&[vec![2, 0], vec![0, 3]]);
        let s = smith_normal_form(&m).unwrap();
        assert_eq!(s.divisors(), &[big(1), big(6)]);
    }

    #[test]
    fn smith_of_empty_matrix_has_no_divisors() {
        let m = SparseIntMatrix::zero(0, 0);
        let s = smith_normal_form(&m).unwrap();
        assert!(s.divisors().is_empty());
        let m = SparseIntMatrix::zero(3, 2);
        assert!(smith_normal_form(&m).unwrap().divisors().is_empty());
    }

    #[test]
    fn mod_rank_examples() {
        let id = SparseIntMatrix::identity(4);
        assert_eq!(rank_mod_prime(&id, 7).unwrap(), 4);
        let m = SparseIntMatrix::from_dense(&[vec![2, 0], vec![0, 4]]);
        assert_eq!(rank_mod_prime(&m, 2).unwrap(), 0);
        assert!(matches!(
            rank_mod_prime(&id, 6),
            Err(LinalgError::CompositeModulus(6))
        ));
    }

    #[test]
    fn coordinate_text_round_trips() {
        let m = SparseIntMatrix::from_dense(&[vec![0, -3, 0], vec![12, 0, 1]]);
        let text = m.to_coordinate_text();
        assert!(text.starts_with("2 3 3\n"));
        let back = SparseIntMatrix::from_coordinate_text(&text).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn multiply_matches_dense() {
        let a = SparseIntMatrix::from_dense(&[vec![1, 2], vec![0, -1]]);
        let b = SparseIntMatrix::from_dense(&[vec![3, 0, 1], vec![1, 1, 0]]);
        let p = a.multiply(&b).unwrap();
        assert_eq!(
            p,
            SparseIntMatrix::from_dense(&[vec![5, 2, 1], vec![-1, -1, 0]])
        );
    }

    #[test]
    fn smith_rank_agrees_with_rational_rank_on_fixed_cases() {
        let cases = vec![
            vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, 4, 16]],
            vec![vec![1, 0], vec![0, 0]],
            vec![vec![0, 0], vec![0, 0]],
            vec![vec![6, 10, 15], vec![10, 15, 6], vec![15, 6, 10]],
        ];
        for case in cases {
            let m = SparseIntMatrix::from_dense(&case);
            let s = smith_normal_form(&m).unwrap();
            assert_eq!(s.rank(), rank_over_rationals(&m), "case {case:?}");
        }
    }

    #[test]
    fn known_smith_form_with_torsion() {
        // classic example: divisors 2, 6
        let m = SparseIntMatrix::from_dense(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        let s = smith_normal_form(&m).unwrap();
        let d = s.divisors();
        assert_eq!(d.len(), 3);
        for i in 0..d.len() - 1 {
            assert!((&d[i + 1] % &d[i]).is_zero(), "chain broken: {d:?}");
        }
    }
}
