//! The graph presentation of configuration-space cohomology.
//!
//! A monomial is a graph on vertices `1..=p` whose edges are the
//! chord generators `a(i,j)` (one oriented edge between distinct
//! vertices) and the tangential generators `b(i)` (a loop).  All
//! generators sit in the same cohomological degree, so the sign rules
//! depend only on the parity of the ambient sphere dimension:
//! reversing an edge multiplies by `(-1)^(N+1)` and transposing two
//! adjacent factors multiplies by `(-1)^N`.
//!
//! Relations: squares of generators vanish, and any two chords sharing
//! a larger endpoint reduce through
//! `a(i,j) a(i',j) = a(i,i') a(i',j) - a(i,i') a(i,j)` for
//! `i < i' < j`, which follows from the three-term chord relation in
//! either parity once all words are written with edges in canonical
//! order.  Rewriting strictly decreases the multiset of larger
//! endpoints, so normal forms terminate; admissible monomials (larger
//! endpoints pairwise distinct, at most one loop per vertex) form a
//! basis, which the dimension oracles confirm independently.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::limits::Limits;
use crate::trees::IndexMap;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("vertex {vertex} outside 1..={p}")]
    VertexOutOfRange { vertex: u32, p: u32 },
    #[error("edge word is not admissible: {0}")]
    NotAdmissible(String),
    #[error("bidegree mismatch: expected (p, m) = ({expected_p}, {expected_m}), got ({p}, {m})")]
    BidegreeMismatch {
        expected_p: u32,
        expected_m: u32,
        p: u32,
        m: u32,
    },
    #[error("parity mismatch")]
    ParityMismatch,
    #[error("cell (p, m) = ({p}, {m}) holds {count} monomials, over the cap of {cap}")]
    CellCap {
        p: u32,
        m: u32,
        count: usize,
        cap: usize,
    },
    #[error("pullback position {pos} outside 1..={max}")]
    PullbackOutOfRange { pos: u32, max: u32 },
    #[error("index map is not order-preserving")]
    NotMonotone,
    #[error("index map source size {got} does not match vertex count {expected}")]
    SourceMismatch { got: usize, expected: usize },
    #[error("cannot parse monomial from {0:?}: {1}")]
    Parse(String, String),
}

/// Parity of the ambient sphere dimension N.  Every sign in the graph
/// algebra, and hence every matrix of the spectral sequence, depends
/// on N only through this bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn from_dimension(n: u32) -> Parity {
        if n % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// Sign picked up by reversing one edge orientation: `(-1)^(N+1)`.
    pub fn edge_reversal_sign(self) -> i64 {
        match self {
            Parity::Even => -1,
            Parity::Odd => 1,
        }
    }

    /// Sign picked up by transposing two adjacent generators: `(-1)^N`.
    pub fn transposition_sign(self) -> i64 {
        match self {
            Parity::Even => 1,
            Parity::Odd => -1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }
}

impl std::str::FromStr for Parity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "even" => Ok(Parity::Even),
            "odd" => Ok(Parity::Odd),
            other => Err(format!("parity must be `even` or `odd`, got {other:?}")),
        }
    }
}

/// An admissible graph monomial: `p` vertices, a canonical edge word
/// (chords sorted by (smaller, larger) endpoint with pairwise distinct
/// larger endpoints, then loops sorted by vertex, at most one per
/// vertex), and an integer coefficient.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GraphMonomial {
    p: u32,
    edges: Vec<(u32, u32)>,
    coeff: BigInt,
}

impl GraphMonomial {
    /// Builds an admissible monomial, validating the canonical form.
    pub fn new(
        p: u32,
        edges: Vec<(u32, u32)>,
        coeff: impl Into<BigInt>,
    ) -> Result<Self, GraphError> {
        for &(i, j) in &edges {
            for v in [i, j] {
                if v < 1 || v > p {
                    return Err(GraphError::VertexOutOfRange { vertex: v, p });
                }
            }
        }
        let chords: Vec<(u32, u32)> = edges.iter().copied().filter(|(i, j)| i != j).collect();
        let loops: Vec<u32> = edges
            .iter()
            .copied()
            .filter(|(i, j)| i == j)
            .map(|(i, _)| i)
            .collect();
        if edges.len() != chords.len() + loops.len()
            || edges[..chords.len()].iter().any(|(i, j)| i == j)
        {
            return Err(GraphError::NotAdmissible(
                "loops must follow all chords".into(),
            ));
        }
        if chords.iter().any(|(i, j)| i >= j) {
            return Err(GraphError::NotAdmissible(
                "chords must be oriented small-to-large".into(),
            ));
        }
        if !chords.windows(2).all(|w| w[0] < w[1]) {
            return Err(GraphError::NotAdmissible("chords must be sorted".into()));
        }
        let mut larger: Vec<u32> = chords.iter().map(|(_, j)| *j).collect();
        larger.sort_unstable();
        if larger.windows(2).any(|w| w[0] == w[1]) {
            return Err(GraphError::NotAdmissible(
                "two chords share a larger endpoint".into(),
            ));
        }
        if !loops.windows(2).all(|w| w[0] < w[1]) {
            return Err(GraphError::NotAdmissible(
                "loops must be sorted with at most one per vertex".into(),
            ));
        }
        Ok(GraphMonomial {
            p,
            edges,
            coeff: coeff.into(),
        })
    }

    pub fn vertex_count(&self) -> u32 {
        self.p
    }

    pub fn edge_count(&self) -> u32 {
        self.edges.len() as u32
    }

    /// The full edge word, loops encoded as `(v, v)`.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn chords(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.edges.iter().copied().filter(|(i, j)| i != j)
    }

    pub fn loops(&self) -> impl Iterator<Item = u32> + '_ {
        self.edges
            .iter()
            .copied()
            .filter(|(i, j)| i == j)
            .map(|(i, _)| i)
    }

    pub fn coeff(&self) -> &BigInt {
        &self.coeff
    }

    pub fn with_coeff(&self, coeff: impl Into<BigInt>) -> GraphMonomial {
        GraphMonomial {
            p: self.p,
            edges: self.edges.clone(),
            coeff: coeff.into(),
        }
    }

    /// True when every vertex meets a chord or carries a loop.
    pub fn covers_all_vertices(&self) -> bool {
        let mut covered = vec![false; self.p as usize];
        for &(i, j) in &self.edges {
            covered[i as usize - 1] = true;
            covered[j as usize - 1] = true;
        }
        covered.into_iter().all(|c| c)
    }

    /// True when some vertex meets no edge at all.
    pub fn has_isolated_vertex(&self) -> bool {
        !self.covers_all_vertices()
    }
}

impl std::fmt::Display for GraphMonomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} ", self.coeff)?;
        if self.edges.is_empty() {
            return write!(f, "1");
        }
        for &(i, j) in &self.edges {
            if i == j {
                write!(f, "b({i})")?;
            } else {
                write!(f, "a({i},{j})")?;
            }
        }
        Ok(())
    }
}

impl std::str::FromStr for GraphMonomial {
    type Err = GraphError;

    /// Parses the text form `-3 a(1,2)a(1,3)b(2)`; `1` stands for the
    /// empty product.  The vertex count is inferred as the largest
    /// vertex mentioned.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |msg: &str| GraphError::Parse(s.into(), msg.into());
        let trimmed = s.trim();
        let (coeff_str, rest) = trimmed
            .split_once(' ')
            .ok_or_else(|| err("expected `<coefficient> <factors>`"))?;
        let coeff: BigInt = coeff_str
            .parse()
            .map_err(|e| GraphError::Parse(s.into(), format!("bad coefficient: {e}")))?;
        let mut edges = Vec::new();
        let rest = rest.trim();
        if rest != "1" {
            let mut chars = rest.chars().peekable();
            while let Some(kind) = chars.next() {
                let open = chars.next();
                if open != Some('(') {
                    return Err(err("expected `(` after factor name"));
                }
                let body: String = chars.by_ref().take_while(|c| *c != ')').collect();
                match kind {
                    'a' => {
                        let (i, j) = body
                            .split_once(',')
                            .ok_or_else(|| err("chord needs two vertices"))?;
                        let i: u32 = i.trim().parse().map_err(|_| err("bad vertex"))?;
                        let j: u32 = j.trim().parse().map_err(|_| err("bad vertex"))?;
                        edges.push((i, j));
                    }
                    'b' => {
                        let v: u32 = body.trim().parse().map_err(|_| err("bad vertex"))?;
                        edges.push((v, v));
                    }
                    other => {
                        return Err(GraphError::Parse(
                            s.into(),
                            format!("unknown factor kind {other:?}"),
                        ))
                    }
                }
            }
        }
        let p = edges
            .iter()
            .map(|&(i, j)| i.max(j))
            .max()
            .unwrap_or(0);
        GraphMonomial::new(p, edges, coeff)
    }
}

/// An integer linear combination of admissible monomials in one fixed
/// bidegree `(p, m)` and parity, sorted with no duplicates and no zero
/// coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphVector {
    p: u32,
    m: u32,
    parity: Parity,
    terms: Vec<GraphMonomial>,
}

impl GraphVector {
    pub fn zero(p: u32, m: u32, parity: Parity) -> Self {
        GraphVector {
            p,
            m,
            parity,
            terms: Vec::new(),
        }
    }

    pub fn from_terms(
        p: u32,
        m: u32,
        parity: Parity,
        terms: impl IntoIterator<Item = GraphMonomial>,
    ) -> Result<Self, GraphError> {
        let mut merged: BTreeMap<Vec<(u32, u32)>, BigInt> = BTreeMap::new();
        for t in terms {
            if t.p != p || t.edge_count() != m {
                return Err(GraphError::BidegreeMismatch {
                    expected_p: p,
                    expected_m: m,
                    p: t.p,
                    m: t.edge_count(),
                });
            }
            *merged.entry(t.edges).or_insert_with(BigInt::zero) += t.coeff;
        }
        let terms = merged
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(edges, coeff)| GraphMonomial { p, edges, coeff })
            .collect();
        Ok(GraphVector {
            p,
            m,
            parity,
            terms,
        })
    }

    pub fn from_monomial(m: GraphMonomial, parity: Parity) -> Self {
        let (p, deg) = (m.p, m.edge_count());
        let terms = if m.coeff.is_zero() { vec![] } else { vec![m] };
        GraphVector {
            p,
            m: deg,
            parity,
            terms,
        }
    }

    pub fn vertex_count(&self) -> u32 {
        self.p
    }

    pub fn edge_count(&self) -> u32 {
        self.m
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn terms(&self) -> &[GraphMonomial] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff_of(&self, edges: &[(u32, u32)]) -> BigInt {
        self.terms
            .iter()
            .find(|t| t.edges == edges)
            .map(|t| t.coeff.clone())
            .unwrap_or_else(BigInt::zero)
    }

    pub fn add(&self, other: &GraphVector) -> Result<GraphVector, GraphError> {
        if self.p != other.p || self.m != other.m {
            return Err(GraphError::BidegreeMismatch {
                expected_p: self.p,
                expected_m: self.m,
                p: other.p,
                m: other.m,
            });
        }
        if self.parity != other.parity {
            return Err(GraphError::ParityMismatch);
        }
        GraphVector::from_terms(
            self.p,
            self.m,
            self.parity,
            self.terms.iter().chain(other.terms.iter()).cloned(),
        )
    }

    pub fn scale(&self, factor: &BigInt) -> GraphVector {
        if factor.is_zero() {
            return GraphVector::zero(self.p, self.m, self.parity);
        }
        GraphVector {
            p: self.p,
            m: self.m,
            parity: self.parity,
            terms: self
                .terms
                .iter()
                .map(|t| t.with_coeff(&t.coeff * factor))
                .collect(),
        }
    }

    pub fn neg(&self) -> GraphVector {
        self.scale(&BigInt::from(-1))
    }
}

impl std::fmt::Display for GraphVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct VectorRepr {
    p: u32,
    m: u32,
    parity: Parity,
    terms: Vec<TermRepr>,
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    coeff: String,
    edges: Vec<[u32; 2]>,
    loops: Vec<u32>,
}

impl Serialize for GraphVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        VectorRepr {
            p: self.p,
            m: self.m,
            parity: self.parity,
            terms: self
                .terms
                .iter()
                .map(|t| TermRepr {
                    coeff: t.coeff.to_string(),
                    edges: t.chords().map(|(i, j)| [i, j]).collect(),
                    loops: t.loops().collect(),
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GraphVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = VectorRepr::deserialize(deserializer)?;
        let terms: Vec<GraphMonomial> = repr
            .terms
            .into_iter()
            .map(|t| {
                let coeff: BigInt = t.coeff.parse().map_err(D::Error::custom)?;
                let edges: Vec<(u32, u32)> = t
                    .edges
                    .iter()
                    .map(|[i, j]| (*i, *j))
                    .chain(t.loops.iter().map(|v| (*v, *v)))
                    .collect();
                GraphMonomial::new(repr.p, edges, coeff).map_err(D::Error::custom)
            })
            .collect::<Result<_, _>>()?;
        GraphVector::from_terms(repr.p, repr.m, repr.parity, terms).map_err(D::Error::custom)
    }
}

fn edge_sort_key(e: &(u32, u32)) -> (bool, u32, u32) {
    (e.0 == e.1, e.0, e.1)
}

/// Rewrites an arbitrary word of generators into the admissible basis.
///
/// Orientation folding, sorting with parity signs, square killing, and
/// chord rewriting at repeated larger endpoints (smallest repeated
/// endpoint first) are applied until every surviving word is
/// admissible.
pub fn normalize(
    p: u32,
    word: &[(u32, u32)],
    coeff: impl Into<BigInt>,
    parity: Parity,
) -> Result<GraphVector, GraphError> {
    for &(i, j) in word {
        for v in [i, j] {
            if v < 1 || v > p {
                return Err(GraphError::VertexOutOfRange { vertex: v, p });
            }
        }
    }
    let m = word.len() as u32;
    let mut acc: BTreeMap<Vec<(u32, u32)>, BigInt> = BTreeMap::new();
    let mut stack: Vec<(Vec<(u32, u32)>, BigInt)> = vec![(word.to_vec(), coeff.into())];
    while let Some((mut w, mut c)) = stack.pop() {
        if c.is_zero() {
            continue;
        }
        // orient every chord small-to-large
        for e in w.iter_mut() {
            if e.0 > e.1 {
                *e = (e.1, e.0);
                if parity.edge_reversal_sign() < 0 {
                    c = -c;
                }
            }
        }
        // sort by canonical key, tracking the transposition sign
        let mut inversions = 0usize;
        for i in 1..w.len() {
            let mut j = i;
            while j > 0 && edge_sort_key(&w[j - 1]) > edge_sort_key(&w[j]) {
                w.swap(j - 1, j);
                inversions += 1;
                j -= 1;
            }
        }
        if parity.transposition_sign() < 0 && inversions % 2 == 1 {
            c = -c;
        }
        // squares of generators vanish
        if w.windows(2).any(|pair| pair[0] == pair[1]) {
            continue;
        }
        // find the smallest larger endpoint shared by two chords
        let mut clash: Option<(usize, usize)> = None;
        {
            let mut seen: BTreeMap<u32, usize> = BTreeMap::new();
            let mut best: Option<(u32, usize, usize)> = None;
            for (idx, &(i, j)) in w.iter().enumerate() {
                if i == j {
                    continue;
                }
                if let Some(&first) = seen.get(&j) {
                    if best.map_or(true, |(bj, _, _)| j < bj) {
                        best = Some((j, first, idx));
                    }
                } else {
                    seen.insert(j, idx);
                }
            }
            if let Some((_, s, t)) = best {
                clash = Some((s, t));
            }
        }
        let Some((s, t)) = clash else {
            *acc.entry(w).or_insert_with(BigInt::zero) += c;
            continue;
        };
        // bring the clashing chords adjacent: move position t to s + 1
        let moved = w.remove(t);
        w.insert(s + 1, moved);
        if parity.transposition_sign() < 0 && (t - s - 1) % 2 == 1 {
            c = -c;
        }
        let (i, j) = w[s];
        let (i2, _) = w[s + 1];
        debug_assert!(i < i2 && i2 < j);
        // a(i,j) a(i2,j) = a(i,i2) a(i2,j) - a(i,i2) a(i,j)
        let mut w1 = w.clone();
        w1[s] = (i, i2);
        w1[s + 1] = (i2, j);
        let mut w2 = w;
        w2[s] = (i, i2);
        w2[s + 1] = (i, j);
        stack.push((w1, c.clone()));
        stack.push((w2, -c));
    }
    let terms = acc
        .into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(edges, coeff)| GraphMonomial { p, edges, coeff })
        .collect();
    Ok(GraphVector {
        p,
        m,
        parity,
        terms,
    })
}

/// Number of admissible monomials with `m` edges on `p` vertices (the
/// coefficient of `t^m` in `prod (1 + i t) * (1 + t)^p`), used as a
/// cheap cap check before enumerating.
fn full_cell_count(p: u32, m: u32) -> u128 {
    let mut poly: Vec<u128> = vec![1];
    for i in 1..p as u128 {
        let mut next = vec![0u128; poly.len() + 1];
        for (k, v) in poly.iter().enumerate() {
            next[k] += v;
            next[k + 1] += i * v;
        }
        poly = next;
    }
    let mut total = 0u128;
    for (k, v) in poly.iter().enumerate() {
        let rest = m as i64 - k as i64;
        if rest >= 0 && rest <= p as i64 {
            total += v * binomial(p as u128, rest as u128);
        }
    }
    total
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let mut out = 1u128;
    for i in 0..k {
        out = out * (n - i) / (i + 1);
    }
    out
}

/// Deterministic list of admissible monomials in bidegree `(p, m)`,
/// sorted by edge word.  With `normalized` only graphs in which every
/// vertex is attached to an edge are kept.  The list does not depend
/// on parity.
pub fn basis(
    p: u32,
    m: u32,
    normalized: bool,
    limits: &Limits,
) -> Result<Vec<GraphMonomial>, GraphError> {
    let count = full_cell_count(p, m);
    if count > limits.max_cell_monomials as u128 {
        return Err(GraphError::CellCap {
            p,
            m,
            count: count.min(usize::MAX as u128) as usize,
            cap: limits.max_cell_monomials,
        });
    }
    let mut out = Vec::new();
    // choose chords: a set of larger endpoints with one smaller each
    let mut chords: Vec<(u32, u32)> = Vec::new();
    fn chord_rec(
        p: u32,
        m: u32,
        next_larger: u32,
        chords: &mut Vec<(u32, u32)>,
        normalized: bool,
        out: &mut Vec<GraphMonomial>,
    ) {
        if chords.len() as u32 <= m {
            loops_rec(p, m, chords, normalized, out);
        }
        if chords.len() as u32 == m {
            return;
        }
        for j in next_larger..=p {
            for i in 1..j {
                chords.push((i, j));
                chord_rec(p, m, j + 1, chords, normalized, out);
                chords.pop();
            }
        }
    }
    // then distribute the remaining degree as loops
    fn loops_rec(
        p: u32,
        m: u32,
        chords: &[(u32, u32)],
        normalized: bool,
        out: &mut Vec<GraphMonomial>,
    ) {
        let need = (m - chords.len() as u32) as usize;
        let verts: Vec<u32> = (1..=p).collect();
        let mut pick: Vec<u32> = Vec::new();
        fn go(
            verts: &[u32],
            start: usize,
            need: usize,
            pick: &mut Vec<u32>,
            chords: &[(u32, u32)],
            p: u32,
            normalized: bool,
            out: &mut Vec<GraphMonomial>,
        ) {
            if pick.len() == need {
                // chord_rec builds chords by larger endpoint; canonical
                // order is by (smaller, larger)
                let mut edges: Vec<(u32, u32)> = chords.to_vec();
                edges.sort_unstable();
                edges.extend(pick.iter().map(|&v| (v, v)));
                let mono = GraphMonomial {
                    p,
                    edges,
                    coeff: BigInt::one(),
                };
                if !normalized || mono.covers_all_vertices() {
                    out.push(mono);
                }
                return;
            }
            for idx in start..verts.len() {
                if verts.len() - idx < need - pick.len() {
                    break;
                }
                pick.push(verts[idx]);
                go(verts, idx + 1, need, pick, chords, p, normalized, out);
                pick.pop();
            }
        }
        go(&verts, 0, need, &mut pick, chords, p, normalized, out);
    }
    if m == 0 {
        let empty = GraphMonomial {
            p,
            edges: vec![],
            coeff: BigInt::one(),
        };
        if !normalized || empty.covers_all_vertices() {
            out.push(empty);
        }
        return Ok(out);
    }
    chord_rec(p, m, 2, &mut chords, normalized, &mut out);
    out.sort();
    Ok(out)
}

/// Pullback of the map forgetting configuration point `ell`: relabels
/// a graph on `p - 1` vertices along the order-preserving injection
/// missing `ell` and inserts `ell` as an isolated vertex.  The image
/// always has an isolated vertex, so it lies in the submodule spanned
/// by graphs with one.
pub fn codegeneracy_pullback(ell: u32, v: &GraphVector) -> Result<GraphVector, GraphError> {
    let p_new = v.vertex_count() + 1;
    if ell < 1 || ell > p_new {
        return Err(GraphError::PullbackOutOfRange { pos: ell, max: p_new });
    }
    let relabel = |x: u32| if x >= ell { x + 1 } else { x };
    let terms: Vec<GraphMonomial> = v
        .terms
        .iter()
        .map(|t| GraphMonomial {
            p: p_new,
            edges: t
                .edges
                .iter()
                .map(|&(i, j)| (relabel(i), relabel(j)))
                .collect(),
            coeff: t.coeff.clone(),
        })
        .collect();
    GraphVector::from_terms(p_new, v.m, v.parity, terms)
}

/// Pullback of the map doubling configuration point `ell`: identifies
/// vertices `ell` and `ell + 1`, sending the chord between them to the
/// loop at `ell`, and renormalizes.
pub fn coface_pullback(ell: u32, v: &GraphVector) -> Result<GraphVector, GraphError> {
    let p = v.vertex_count();
    if p < 2 || ell < 1 || ell > p - 1 {
        return Err(GraphError::PullbackOutOfRange {
            pos: ell,
            max: p.saturating_sub(1),
        });
    }
    let relabel = |x: u32| if x > ell { x - 1 } else { x };
    let mut out = GraphVector::zero(p - 1, v.m, v.parity);
    for t in &v.terms {
        let word: Vec<(u32, u32)> = t
            .edges
            .iter()
            .map(|&(i, j)| (relabel(i), relabel(j)))
            .collect();
        let piece = normalize(p - 1, &word, t.coeff.clone(), v.parity)?;
        out = out.add(&piece)?;
    }
    Ok(out)
}

/// Pullback along an arbitrary order-preserving map of vertex sets,
/// pushing every edge endpoint through the map (collisions become
/// loops) and renormalizing.  Equals the composite of coface and
/// codegeneracy pullbacks given by the epi-mono factorization.
pub fn induced_pullback(map: &IndexMap, v: &GraphVector) -> Result<GraphVector, GraphError> {
    if !map.is_order_preserving() {
        return Err(GraphError::NotMonotone);
    }
    if map.source_size() != v.vertex_count() as usize {
        return Err(GraphError::SourceMismatch {
            got: map.source_size(),
            expected: v.vertex_count() as usize,
        });
    }
    let p_new = map.target_size() as u32;
    let push = |x: u32| map.get(x as usize - 1) as u32 + 1;
    let mut out = GraphVector::zero(p_new, v.m, v.parity);
    for t in &v.terms {
        let word: Vec<(u32, u32)> = t.edges.iter().map(|&(i, j)| (push(i), push(j))).collect();
        let piece = normalize(p_new, &word, t.coeff.clone(), v.parity)?;
        out = out.add(&piece)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mono(p: u32, edges: &[(u32, u32)]) -> GraphMonomial {
        GraphMonomial::new(p, edges.to_vec(), 1).unwrap()
    }

    fn single(p: u32, edges: &[(u32, u32)], parity: Parity) -> GraphVector {
        GraphVector::from_monomial(mono(p, edges), parity)
    }

    #[test]
    fn orientation_folding_sign_depends_on_parity() {
        for (parity, sign) in [(Parity::Even, -1), (Parity::Odd, 1)] {
            let v = normalize(2, &[(2, 1)], 1, parity).unwrap();
            assert_eq!(v.terms().len(), 1);
            assert_eq!(v.coeff_of(&[(1, 2)]), BigInt::from(sign));
        }
    }

    #[test]
    fn squares_vanish() {
        for parity in [Parity::Even, Parity::Odd] {
            assert!(normalize(2, &[(1, 2), (1, 2)], 1, parity).unwrap().is_zero());
            assert!(normalize(2, &[(1, 2), (2, 1)], 1, parity).unwrap().is_zero());
            assert!(normalize(1, &[(1, 1), (1, 1)], 1, parity).unwrap().is_zero());
        }
    }

    #[test]
    fn arnold_rewrite_of_shared_larger_endpoint() {
        // a(1,3) a(2,3) = a(1,2) a(2,3) - a(1,2) a(1,3), both parities
        for parity in [Parity::Even, Parity::Odd] {
            let v = normalize(3, &[(1, 3), (2, 3)], 1, parity).unwrap();
            assert_eq!(v.terms().len(), 2);
            assert_eq!(v.coeff_of(&[(1, 2), (2, 3)]), BigInt::from(1));
            assert_eq!(v.coeff_of(&[(1, 2), (1, 3)]), BigInt::from(-1));
        }
    }

    #[test]
    fn transposition_sign_only_in_odd_parity() {
        let even = normalize(3, &[(2, 3), (1, 2)], 1, Parity::Even).unwrap();
        assert_eq!(even.coeff_of(&[(1, 2), (2, 3)]), BigInt::from(1));
        let odd = normalize(3, &[(2, 3), (1, 2)], 1, Parity::Odd).unwrap();
        assert_eq!(odd.coeff_of(&[(1, 2), (2, 3)]), BigInt::from(-1));
    }

    #[test]
    fn normalize_is_idempotent_on_admissible_words() {
        for parity in [Parity::Even, Parity::Odd] {
            let first = normalize(4, &[(3, 4), (1, 3), (2, 4), (2, 2)], 5, parity).unwrap();
            for term in first.terms() {
                let again = normalize(4, term.edges(), term.coeff().clone(), parity).unwrap();
                assert_eq!(again.terms().len(), 1);
                assert_eq!(again.terms()[0], *term);
            }
        }
    }

    #[test]
    fn basis_small_cells() {
        let limits = Limits::default();
        let b = basis(2, 1, true, &limits).unwrap();
        assert_eq!(b, vec![mono(2, &[(1, 2)])]);
        let b = basis(2, 2, true, &limits).unwrap();
        assert_eq!(
            b,
            vec![
                mono(2, &[(1, 1), (2, 2)]),
                mono(2, &[(1, 2), (1, 1)]),
                mono(2, &[(1, 2), (2, 2)]),
            ]
        );
        for p in 1..=4 {
            assert!(basis(p, 0, true, &limits).unwrap().is_empty());
        }
        assert_eq!(basis(0, 0, true, &limits).unwrap().len(), 1);
    }

    #[test]
    fn basis_full_counts_match_product_formula() {
        let limits = Limits::default();
        for p in 0..=5u32 {
            for m in 0..=6u32 {
                let b = basis(p, m, false, &limits).unwrap();
                assert_eq!(b.len() as u128, full_cell_count(p, m), "({p}, {m})");
            }
        }
    }

    #[test]
    fn basis_cap_is_enforced() {
        let tight = Limits {
            max_cell_monomials: 10,
            ..Limits::default()
        };
        assert!(matches!(
            basis(5, 3, false, &tight),
            Err(GraphError::CellCap { .. })
        ));
    }

    #[test]
    fn codegeneracy_relabels_and_isolates() {
        for parity in [Parity::Even, Parity::Odd] {
            let v = single(2, &[(1, 2)], parity);
            let out = codegeneracy_pullback(2, &v).unwrap();
            assert_eq!(out.terms().len(), 1);
            assert_eq!(out.coeff_of(&[(1, 3)]), BigInt::from(1));
            assert!(out.terms()[0].has_isolated_vertex());

            let v = single(1, &[(1, 1)], parity);
            let out = codegeneracy_pullback(1, &v).unwrap();
            assert_eq!(out.coeff_of(&[(2, 2)]), BigInt::from(1));

            let z = GraphVector::zero(3, 1, parity);
            assert!(codegeneracy_pullback(1, &z).unwrap().is_zero());
        }
    }

    #[test]
    fn coface_turns_adjacent_chord_into_loop() {
        for parity in [Parity::Even, Parity::Odd] {
            let v = single(2, &[(1, 2)], parity);
            let out = coface_pullback(1, &v).unwrap();
            assert_eq!(out.coeff_of(&[(1, 1)]), BigInt::from(1));
        }
    }

    #[test]
    fn coface_kills_colliding_chords_and_loops() {
        for parity in [Parity::Even, Parity::Odd] {
            let v = single(3, &[(1, 3), (2, 3)], parity);
            assert!(coface_pullback(1, &v).unwrap().is_zero());
            let v = single(2, &[(1, 1), (2, 2)], parity);
            assert!(coface_pullback(1, &v).unwrap().is_zero());
        }
    }

    #[test]
    fn induced_pullback_matches_generators() {
        for parity in [Parity::Even, Parity::Odd] {
            let v = single(3, &[(1, 2), (2, 3)], parity);
            // identity
            let id = IndexMap::identity(3);
            assert_eq!(induced_pullback(&id, &v).unwrap(), v);
            // single collapse equals the coface pullback
            let tau = IndexMap::collapse_pair(2, 0);
            assert_eq!(
                induced_pullback(&tau, &v).unwrap(),
                coface_pullback(1, &v).unwrap()
            );
            // single skip equals the codegeneracy pullback
            let sigma = IndexMap::skip(4, 1);
            assert_eq!(
                induced_pullback(&sigma, &v).unwrap(),
                codegeneracy_pullback(2, &v).unwrap()
            );
        }
    }

    #[test]
    fn text_form_round_trips() {
        let m: GraphMonomial = "-3 a(1,2)b(2)".parse().unwrap();
        assert_eq!(m.to_string(), "-3 a(1,2)b(2)");
        assert_eq!(m.vertex_count(), 2);
        let m: GraphMonomial = "7 1".parse().unwrap();
        assert_eq!(m.edge_count(), 0);
    }

    #[test]
    fn json_form_round_trips() {
        let v = normalize(3, &[(1, 3), (2, 3), (2, 2)], -3, Parity::Odd).unwrap();
        let json = serde_json::to_string(&v).unwrap();
        assert!(json.contains("\"parity\":\"odd\""));
        let back: GraphVector = serde_json::from_str(&json).unwrap();
        assert_eq!(v, back);
    }

    #[test]
    fn admissibility_validation_rejects_bad_words() {
        assert!(GraphMonomial::new(3, vec![(2, 1)], 1).is_err());
        assert!(GraphMonomial::new(3, vec![(1, 3), (2, 3)], 1).is_err());
        assert!(GraphMonomial::new(3, vec![(1, 1), (1, 2)], 1).is_err());
        assert!(GraphMonomial::new(2, vec![(1, 3)], 1).is_err());
        assert!(GraphMonomial::new(3, vec![(1, 2), (2, 3)], 1).is_ok());
    }
}
