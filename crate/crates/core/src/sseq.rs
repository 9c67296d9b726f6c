//! The E1 page, the d1 differential, the E2 computation, and the
//! vanishing-line predicates.
//!
//! Cells are indexed by `(p, m)` where `p` is the number of graph
//! vertices and `m` the number of edges; on output the cohomological
//! degree is `q = m * N`.  The E1 cell at `(p, m)` is the normalized
//! basis: admissible monomials on `p` vertices with `m` edges in which
//! every vertex is attached to an edge.  The differential is the
//! alternating sum of the interior vertex identifications
//! `d1 = sum over ell in 1..p of (-1)^ell c_ell`, mapping `(p, m)` to
//! `(p - 1, m)`.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::graphs::{self, GraphError, GraphMonomial, GraphVector, Parity};
use crate::limits::Limits;
use crate::linalg::{self, LinalgError, SparseIntMatrix};

#[derive(Debug, Error)]
pub enum SseqError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("page has no data for cell ({0}, {1})")]
    MissingCell(u32, u32),
    #[error("page must extend to p >= 1")]
    EmptyPage,
    #[error("mathematical invariant violated: {0}")]
    Invariant(String),
}

/// The normalized E1 page up to a vertex bound: one ordered basis per
/// cell `(p, m)` in the nonvanishing band `p/2 <= m <= 2p - 1`.
#[derive(Debug, Clone)]
pub struct E1Page {
    parity: Parity,
    max_p: u32,
    cells: BTreeMap<(u32, u32), Vec<GraphMonomial>>,
}

impl E1Page {
    /// Edge counts at which the cell `(p, m)` can be nonzero: each
    /// edge covers at most two vertices and each vertex carries at
    /// most one loop plus one chord-with-larger-endpoint.
    pub fn m_range(p: u32) -> std::ops::RangeInclusive<u32> {
        (p + 1) / 2..=(2 * p).saturating_sub(1)
    }

    pub fn build(max_p: u32, parity: Parity, limits: &Limits) -> Result<Self, SseqError> {
        if max_p < 1 {
            return Err(SseqError::EmptyPage);
        }
        let coords: Vec<(u32, u32)> = (1..=max_p)
            .flat_map(|p| Self::m_range(p).map(move |m| (p, m)))
            .collect();
        let cells: BTreeMap<(u32, u32), Vec<GraphMonomial>> = coords
            .into_par_iter()
            .map(|(p, m)| Ok(((p, m), graphs::basis(p, m, true, limits)?)))
            .collect::<Result<_, SseqError>>()?;
        Ok(E1Page {
            parity,
            max_p,
            cells,
        })
    }

    /// Assembles a page from explicit cells.  Bases may be in any
    /// order; this is how basis-order invariance gets exercised.
    pub fn from_cells(
        parity: Parity,
        max_p: u32,
        cells: BTreeMap<(u32, u32), Vec<GraphMonomial>>,
    ) -> Result<Self, SseqError> {
        for ((p, m), basis) in &cells {
            for mono in basis {
                if mono.vertex_count() != *p || mono.edge_count() != *m {
                    return Err(SseqError::Invariant(format!(
                        "monomial {mono} filed under cell ({p}, {m})"
                    )));
                }
            }
        }
        Ok(E1Page {
            parity,
            max_p,
            cells,
        })
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn max_p(&self) -> u32 {
        self.max_p
    }

    pub fn cell(&self, p: u32, m: u32) -> &[GraphMonomial] {
        self.cells.get(&(p, m)).map_or(&[], |v| v.as_slice())
    }

    pub fn dim(&self, p: u32, m: u32) -> usize {
        self.cell(p, m).len()
    }

    /// Cells actually stored, in deterministic order.
    pub fn coords(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.cells.keys().copied()
    }
}

/// The matrix of d1 from cell `(p, m)` to cell `(p - 1, m)` in the
/// page's ordered bases: columns index the source basis.
#[derive(Debug, Clone)]
pub struct DifferentialMatrix {
    source: (u32, u32),
    target: (u32, u32),
    matrix: SparseIntMatrix,
}

impl DifferentialMatrix {
    pub fn source(&self) -> (u32, u32) {
        self.source
    }

    pub fn target(&self) -> (u32, u32) {
        self.target
    }

    pub fn matrix(&self) -> &SparseIntMatrix {
        &self.matrix
    }
}

/// Applies `d1 = sum over ell of (-1)^ell c_ell` to a single basis
/// monomial.  `flip_ell` negates one chosen term; it exists only so
/// the verification tooling can prove it would catch a sign error.
fn d1_of_monomial(
    mono: &GraphMonomial,
    parity: Parity,
    flip_ell: Option<u32>,
) -> Result<GraphVector, SseqError> {
    let p = mono.vertex_count();
    let m = mono.edge_count();
    let mut acc = GraphVector::zero(p - 1, m, parity);
    let v = GraphVector::from_monomial(mono.with_coeff(1), parity);
    for ell in 1..p {
        let mut sign: i64 = if ell % 2 == 0 { 1 } else { -1 };
        if flip_ell == Some(ell) {
            sign = -sign;
        }
        let piece = graphs::coface_pullback(ell, &v)?;
        acc = acc.add(&piece.scale(&BigInt::from(sign)))?;
    }
    Ok(acc)
}

/// Builds the d1 matrix out of cell `(p, m)`.
pub fn build_d1(page: &E1Page, p: u32, m: u32) -> Result<DifferentialMatrix, SseqError> {
    build_d1_with_fault(page, p, m, None)
}

/// Test fixture: as [`build_d1`] but with the sign of one coface term
/// flipped, so verification suites can demonstrate failure detection.
pub fn build_d1_with_fault(
    page: &E1Page,
    p: u32,
    m: u32,
    flip_ell: Option<u32>,
) -> Result<DifferentialMatrix, SseqError> {
    if p < 1 {
        return Err(SseqError::MissingCell(p, m));
    }
    let source = page.cell(p, m);
    let target = page.cell(p.saturating_sub(1), m);
    let index: HashMap<&[(u32, u32)], usize> = target
        .iter()
        .enumerate()
        .map(|(i, t)| (t.edges(), i))
        .collect();
    let mut entries: Vec<(usize, usize, BigInt)> = Vec::new();
    for (col, mono) in source.iter().enumerate() {
        if p == 1 {
            break; // empty coface sum
        }
        let image = d1_of_monomial(mono, page.parity(), flip_ell)?;
        for term in image.terms() {
            let row = *index.get(term.edges()).ok_or_else(|| {
                SseqError::Invariant(format!(
                    "d1 image term {term} of {mono} escapes the normalized cell ({}, {m})",
                    p - 1
                ))
            })?;
            entries.push((row, col, term.coeff().clone()));
        }
    }
    let matrix = SparseIntMatrix::from_entries(target.len(), source.len(), entries)?;
    Ok(DifferentialMatrix {
        source: (p, m),
        target: (p - 1, m),
        matrix,
    })
}

/// Coefficient system for the E2 computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coefficients {
    Rationals,
    Integers,
    PrimeField(u64),
}

impl Coefficients {
    pub fn label(&self) -> String {
        match self {
            Coefficients::Rationals => "Q".into(),
            Coefficients::Integers => "Z".into(),
            Coefficients::PrimeField(ell) => format!("F:{ell}"),
        }
    }
}

impl std::str::FromStr for Coefficients {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "Q" => Ok(Coefficients::Rationals),
            "Z" => Ok(Coefficients::Integers),
            other => {
                let ell = other
                    .strip_prefix("F:")
                    .ok_or_else(|| format!("coefficients must be Q, Z, or F:<prime>, got {other:?}"))?
                    .parse::<u64>()
                    .map_err(|e| format!("bad prime: {e}"))?;
                Ok(Coefficients::PrimeField(ell))
            }
        }
    }
}

/// One cell of the E2 report.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct E2Cell {
    pub p: u32,
    pub m: u32,
    #[serde(rename = "dimE1")]
    pub dim_e1: usize,
    #[serde(rename = "rankE2")]
    pub rank_e2: usize,
    /// Torsion coefficients of the incoming differential (integer
    /// coefficients only; empty over fields).
    pub divisors: Vec<String>,
    /// True on the boundary column `p = maxP`, where the incoming
    /// differential from `p + 1` lies outside the computed range and
    /// is treated as zero.
    pub truncated: bool,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct EulerRow {
    pub m: u32,
    #[serde(rename = "chiE1")]
    pub chi_e1: i64,
    #[serde(rename = "chiE2")]
    pub chi_e2: i64,
}

/// Bigraded summary of the E2 computation.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct E2Report {
    pub parity: Parity,
    pub coeff: String,
    #[serde(rename = "maxP")]
    pub max_p: u32,
    pub cells: Vec<E2Cell>,
    pub euler: Vec<EulerRow>,
}

impl E2Report {
    pub fn cell(&self, p: u32, m: u32) -> Option<&E2Cell> {
        self.cells.iter().find(|c| c.p == p && c.m == m)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn rank_for(matrix: &SparseIntMatrix, coeff: Coefficients) -> Result<usize, SseqError> {
    Ok(match coeff {
        Coefficients::Rationals | Coefficients::Integers => linalg::rank_over_rationals(matrix),
        Coefficients::PrimeField(ell) => linalg::rank_mod_prime(matrix, ell)?,
    })
}

/// Computes the E2 page as the homology of the d1 complex restricted
/// to `1 <= p <= max_p`.  Ranks come from exact elimination in the
/// requested coefficients; over the integers the torsion of each cell
/// (the elementary divisors of the incoming differential) is reported
/// as well.  The column `p = max_p` has its incoming differential
/// truncated away and is flagged accordingly.
pub fn compute_e2(
    max_p: u32,
    parity: Parity,
    coeff: Coefficients,
    limits: &Limits,
) -> Result<E2Report, SseqError> {
    if let Coefficients::PrimeField(ell) = coeff {
        // reject composite moduli before doing any work
        linalg::rank_mod_prime(&SparseIntMatrix::identity(1), ell)?;
    }
    let page = E1Page::build(max_p, parity, limits)?;
    let m_values: Vec<u32> = (1..=2 * max_p - 1).collect();
    let per_m: Vec<(u32, Vec<E2Cell>, EulerRow)> = m_values
        .into_par_iter()
        .map(|m| compute_e2_row(&page, m, coeff, limits))
        .collect::<Result<_, SseqError>>()?;
    let mut cells: Vec<E2Cell> = Vec::new();
    let mut euler: Vec<EulerRow> = Vec::new();
    for (_, mut row_cells, row_euler) in per_m {
        cells.append(&mut row_cells);
        euler.push(row_euler);
    }
    cells.sort_by_key(|c| (c.p, c.m));
    euler.sort_by_key(|e| e.m);
    Ok(E2Report {
        parity,
        coeff: coeff.label(),
        max_p,
        cells,
        euler,
    })
}

fn compute_e2_row(
    page: &E1Page,
    m: u32,
    coeff: Coefficients,
    limits: &Limits,
) -> Result<(u32, Vec<E2Cell>, EulerRow), SseqError> {
    let max_p = page.max_p();
    // d_p maps (p, m) -> (p - 1, m); build every differential in the row
    let mut mats: BTreeMap<u32, DifferentialMatrix> = BTreeMap::new();
    for p in 2..=max_p {
        if page.dim(p, m) > 0 {
            mats.insert(p, build_d1(page, p, m)?);
        }
    }
    // the complex must square to zero, exactly
    for p in 3..=max_p {
        if let (Some(outer), Some(inner)) = (mats.get(&(p - 1)), mats.get(&p)) {
            let product = outer.matrix().multiply(inner.matrix())?;
            if !product.is_zero() {
                return Err(SseqError::Invariant(format!(
                    "d1 o d1 is nonzero from cell ({p}, {m})"
                )));
            }
        }
    }
    let mut ranks: BTreeMap<u32, usize> = BTreeMap::new();
    let mut divisors: BTreeMap<u32, Vec<String>> = BTreeMap::new();
    for (p, d) in &mats {
        ranks.insert(*p, rank_for(d.matrix(), coeff)?);
        if coeff == Coefficients::Integers {
            let snf = linalg::smith_normal_form_with_cap(d.matrix(), limits.snf_max_cols)?;
            divisors.insert(
                *p,
                snf.nontrivial_divisors()
                    .iter()
                    .map(|d| d.to_string())
                    .collect(),
            );
        }
    }
    let mut cells = Vec::new();
    let mut chi_e1 = 0i64;
    let mut chi_e2 = 0i64;
    for p in 1..=max_p {
        let dim = page.dim(p, m);
        if !E1Page::m_range(p).contains(&m) {
            continue;
        }
        let r_out = ranks.get(&p).copied().unwrap_or(0);
        let r_in = ranks.get(&(p + 1)).copied().unwrap_or(0);
        let rank_e2 = dim - r_out - r_in;
        let sign = if p % 2 == 0 { 1 } else { -1 };
        chi_e1 += sign * dim as i64;
        chi_e2 += sign * rank_e2 as i64;
        cells.push(E2Cell {
            p,
            m,
            dim_e1: dim,
            rank_e2,
            divisors: divisors.get(&(p + 1)).cloned().unwrap_or_default(),
            truncated: p == max_p,
        });
    }
    if chi_e1 != chi_e2 {
        return Err(SseqError::Invariant(format!(
            "Euler characteristic not preserved in row m = {m}: {chi_e1} vs {chi_e2}"
        )));
    }
    Ok((m, cells, EulerRow { m, chi_e1, chi_e2 }))
}

/// Whether the two vanishing lines of the Euclidean cohomology page
/// force the cell at `(-p, q)` to be zero for ambient dimension
/// `N + 1`: below `q < (N/2) p` or above `q > N (2p - 1)`.  A `false`
/// answer does not assert nonvanishing (cells with `q` not a multiple
/// of `N` vanish for degree reasons regardless).
pub fn vanishing_cohomology_euclidean(n_dim: u32, p: u32, q: u32) -> bool {
    let (n_dim, p, q) = (n_dim as i64, p as i64, q as i64);
    2 * q < n_dim * p || q > n_dim * (2 * p - 1)
}

/// Vanishing line for the cohomology page over a general ambient
/// manifold of dimension `m_dim` and connectivity `k_conn`:
/// `q < min((m_dim - 1)/2 * p, (k_conn + 1) * p)`.
pub fn vanishing_cohomology_general(m_dim: u32, k_conn: u32, p: u32, q: u32) -> bool {
    let (m_dim, k_conn, p, q) = (m_dim as i64, k_conn as i64, p as i64, q as i64);
    2 * q < (m_dim - 1) * p && q < (k_conn + 1) * p
}

/// Vanishing line for the homotopy page: `q <= (p - 1)(m_dim - 2)`.
pub fn vanishing_homotopy(m_dim: u32, p: u32, q: u32) -> bool {
    let (m_dim, p, q) = (m_dim as i64, p as i64, q as i64);
    q <= (p - 1) * (m_dim - 2)
}
