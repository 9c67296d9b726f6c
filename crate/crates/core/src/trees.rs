//! Rooted leaf-labeled trees, their contraction poset, associahedron
//! face data, subset-poset functors, and the simplicial complexes that
//! certify cofinality.
//!
//! Trees here are "f-trees": rooted, connected, leaves labeled
//! bijectively by `1..=n`, and no bivalent internal vertex (the root
//! alone may have any valence).  Half-planar trees additionally fix
//! the child order, which must list leaves in label order with the
//! leaf set over every vertex a consecutive block.
//!
//! Canonical form sorts children by the minimum leaf label beneath
//! them, so isomorphism of labeled trees is plain structural equality.
//! A non-leaf edge is identified by the leaf set under its lower
//! endpoint; that key is stable under contraction of other edges and
//! under canonical relabeling, which keeps edge bookkeeping honest.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::limits::Limits;

#[derive(Debug, Error)]
pub enum TreeError {
    #[error("leaf labels must be exactly 1..=n, each once")]
    BadLabels,
    #[error("internal vertex below the root has fewer than two children")]
    BivalentVertex,
    #[error("tree must have at least one leaf")]
    Empty,
    #[error("not a valid half-planar tree: {0}")]
    NotPlanar(String),
    #[error("operation requires a half-planar tree")]
    PlanarRequired,
    #[error("operation requires root valence greater than one")]
    UnivalentRoot,
    #[error("edge key {0:?} is a leaf edge")]
    LeafEdge(BTreeSet<u32>),
    #[error("edge key {0:?} does not name an edge of the tree")]
    NotAnEdge(BTreeSet<u32>),
    #[error("enumeration of trees with {n} leaves exceeds the cap of {cap}")]
    EnumerationCap { n: u32, cap: u32 },
    #[error("subset must be nonempty")]
    EmptySubset,
    #[error("expected {smaller:?} to be a subset of {larger:?}")]
    NotASubset {
        smaller: BTreeSet<u32>,
        larger: BTreeSet<u32>,
    },
    #[error("element {value} outside the ground set 1..={max}")]
    OutOfRange { value: u32, max: u32 },
    #[error("index map is not order-preserving")]
    NotMonotone,
    #[error("index map value {value} outside target of size {target}")]
    MapValueOutOfRange { value: usize, target: usize },
    #[error("index maps do not compose: target size {0} vs source size {1}")]
    NotComposable(usize, usize),
    #[error("complex dimension {d} exceeds {n}")]
    BadComplexDimension { n: u32, d: u32 },
    #[error("facet is empty")]
    EmptyFacet,
    #[error("facet vertex {0} out of range")]
    FacetVertexOutOfRange(usize),
    #[error("facet {inner:?} is contained in facet {outer:?}")]
    ContainedFacet {
        inner: BTreeSet<usize>,
        outer: BTreeSet<usize>,
    },
    #[error("terminal-object certification failed: {0}")]
    TerminalityFailure(String),
    #[error("cannot parse tree from {0:?}: {1}")]
    Parse(String, String),
}

/// A subtree: either a labeled leaf or an internal vertex with its
/// ordered children.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TreeNode {
    Leaf(u32),
    Internal(Vec<TreeNode>),
}

impl TreeNode {
    fn min_leaf(&self) -> u32 {
        match self {
            TreeNode::Leaf(l) => *l,
            TreeNode::Internal(ch) => ch.iter().map(|c| c.min_leaf()).min().unwrap_or(u32::MAX),
        }
    }

    fn collect_leaves(&self, out: &mut Vec<u32>) {
        match self {
            TreeNode::Leaf(l) => out.push(*l),
            TreeNode::Internal(ch) => ch.iter().for_each(|c| c.collect_leaves(out)),
        }
    }

    fn leafset(&self) -> BTreeSet<u32> {
        let mut v = Vec::new();
        self.collect_leaves(&mut v);
        v.into_iter().collect()
    }

    fn sort_canonical(&mut self) {
        if let TreeNode::Internal(ch) = self {
            ch.iter_mut().for_each(|c| c.sort_canonical());
            ch.sort_by_key(|c| c.min_leaf());
        }
    }

    /// Depth below this node: a leaf has depth 0.
    fn depth(&self) -> u32 {
        match self {
            TreeNode::Leaf(_) => 0,
            TreeNode::Internal(ch) => 1 + ch.iter().map(|c| c.depth()).max().unwrap_or(0),
        }
    }
}

/// A rooted leaf-labeled tree in canonical form.  The root vertex is
/// implicit; `root_children` are the subtrees hanging from it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FTree {
    planar: bool,
    n: u32,
    root_children: Vec<TreeNode>,
}

impl FTree {
    pub fn new(root_children: Vec<TreeNode>, planar: bool) -> Result<Self, TreeError> {
        if root_children.is_empty() {
            return Err(TreeError::Empty);
        }
        let mut leaves = Vec::new();
        for c in &root_children {
            validate_node(c)?;
            c.collect_leaves(&mut leaves);
        }
        let n = leaves.len() as u32;
        let mut sorted = leaves.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != leaves.len() || sorted.first() != Some(&1) || sorted.last() != Some(&n) {
            return Err(TreeError::BadLabels);
        }
        if planar {
            // in-order leaves must be ascending, with the leaf set over
            // every vertex a consecutive block of labels
            if !leaves.windows(2).all(|w| w[0] < w[1]) {
                return Err(TreeError::NotPlanar(format!(
                    "in-order leaf sequence {leaves:?} is not ascending"
                )));
            }
            // ascending in-order traversal makes every subtree's leaf
            // set an interval automatically
        }
        let mut root_children = root_children;
        root_children.iter_mut().for_each(|c| c.sort_canonical());
        root_children.sort_by_key(|c| c.min_leaf());
        Ok(FTree {
            planar,
            n,
            root_children,
        })
    }

    pub fn n_leaves(&self) -> u32 {
        self.n
    }

    pub fn is_planar(&self) -> bool {
        self.planar
    }

    pub fn root_valence(&self) -> usize {
        self.root_children.len()
    }

    pub fn root_children(&self) -> &[TreeNode] {
        &self.root_children
    }

    /// The corolla: every leaf attached directly to the root.
    pub fn corolla(n: u32, planar: bool) -> Result<Self, TreeError> {
        if n == 0 {
            return Err(TreeError::Empty);
        }
        FTree::new((1..=n).map(TreeNode::Leaf).collect(), planar)
    }

    /// Max edge count from any leaf to the root.
    pub fn depth(&self) -> u32 {
        1 + self
            .root_children
            .iter()
            .map(|c| c.depth())
            .max()
            .unwrap_or(0)
    }

    /// Wraps the root in an extra edge: the companion tree with a
    /// univalent root.  Requires root valence at least two, otherwise
    /// the new vertex would be bivalent.
    pub fn with_root_edge(&self) -> Result<FTree, TreeError> {
        if self.root_valence() < 2 {
            return Err(TreeError::UnivalentRoot);
        }
        FTree::new(
            vec![TreeNode::Internal(self.root_children.clone())],
            self.planar,
        )
    }

    /// Non-leaf edges, each identified by the leaf set under its lower
    /// endpoint.
    pub fn internal_edges(&self) -> Vec<BTreeSet<u32>> {
        let mut out = Vec::new();
        fn walk(node: &TreeNode, out: &mut Vec<BTreeSet<u32>>) {
            if let TreeNode::Internal(ch) = node {
                out.push(node.leafset());
                ch.iter().for_each(|c| walk(c, out));
            }
        }
        self.root_children.iter().for_each(|c| walk(c, &mut out));
        out.sort();
        out
    }

    /// Contracts the named non-leaf edges and returns the canonical
    /// form of the result.  Contracting the empty set is the identity.
    pub fn contract(&self, edges: &BTreeSet<BTreeSet<u32>>) -> Result<FTree, TreeError> {
        let valid: BTreeSet<BTreeSet<u32>> = self.internal_edges().into_iter().collect();
        for key in edges {
            if !valid.contains(key) {
                if key.len() == 1 && key.iter().all(|l| *l >= 1 && *l <= self.n) {
                    return Err(TreeError::LeafEdge(key.clone()));
                }
                return Err(TreeError::NotAnEdge(key.clone()));
            }
        }
        fn rebuild(node: &TreeNode, edges: &BTreeSet<BTreeSet<u32>>, out: &mut Vec<TreeNode>) {
            match node {
                TreeNode::Leaf(l) => out.push(TreeNode::Leaf(*l)),
                TreeNode::Internal(ch) => {
                    let mut rebuilt = Vec::new();
                    ch.iter().for_each(|c| rebuild(c, edges, &mut rebuilt));
                    if edges.contains(&node.leafset()) {
                        out.extend(rebuilt);
                    } else {
                        out.push(TreeNode::Internal(rebuilt));
                    }
                }
            }
        }
        let mut root_children = Vec::new();
        self.root_children
            .iter()
            .for_each(|c| rebuild(c, edges, &mut root_children));
        FTree::new(root_children, self.planar)
    }

    /// All ordered triples (i, j, k) such that some vertex has both i
    /// and j over it but not k.
    pub fn ex_triples(&self) -> BTreeSet<(u32, u32, u32)> {
        let all: BTreeSet<u32> = (1..=self.n).collect();
        let mut out = BTreeSet::new();
        fn walk(node: &TreeNode, all: &BTreeSet<u32>, out: &mut BTreeSet<(u32, u32, u32)>) {
            if let TreeNode::Internal(ch) = node {
                let over = node.leafset();
                for &i in &over {
                    for &j in &over {
                        if i == j {
                            continue;
                        }
                        for &k in all.difference(&over) {
                            out.insert((i, j, k));
                        }
                    }
                }
                ch.iter().for_each(|c| walk(c, all, out));
            }
        }
        self.root_children
            .iter()
            .for_each(|c| walk(c, &all, &mut out));
        out
    }

    /// For a half-planar tree with n+1 leaves and root valence at
    /// least two, the set of positions i such that leaves i and i+1
    /// are root-joined (their root paths meet only at the root).
    pub fn adjacent_root_joined(&self) -> Result<BTreeSet<u32>, TreeError> {
        if !self.planar {
            return Err(TreeError::PlanarRequired);
        }
        if self.root_valence() < 2 {
            return Err(TreeError::UnivalentRoot);
        }
        // adjacent leaves are root-joined exactly when they sit in
        // different root blocks, i.e. at a cut between blocks
        let mut cuts = BTreeSet::new();
        let mut last_of_block = 0u32;
        for child in &self.root_children {
            let leaves = child.leafset();
            let hi = *leaves.iter().next_back().expect("nonempty block");
            if last_of_block > 0 {
                cuts.insert(last_of_block);
            }
            last_of_block = hi;
        }
        Ok(cuts)
    }

    /// Nested-parenthesis text form, e.g. `(1 (2 3) 4)`.
    pub fn to_paren_string(&self) -> String {
        fn node(n: &TreeNode, s: &mut String) {
            match n {
                TreeNode::Leaf(l) => s.push_str(&l.to_string()),
                TreeNode::Internal(ch) => {
                    s.push('(');
                    for (i, c) in ch.iter().enumerate() {
                        if i > 0 {
                            s.push(' ');
                        }
                        node(c, s);
                    }
                    s.push(')');
                }
            }
        }
        let mut s = String::from("(");
        for (i, c) in self.root_children.iter().enumerate() {
            if i > 0 {
                s.push(' ');
            }
            node(c, &mut s);
        }
        s.push(')');
        s
    }

    pub fn from_paren_str(text: &str, planar: bool) -> Result<Self, TreeError> {
        let toks = tokenize(text).map_err(|e| TreeError::Parse(text.into(), e))?;
        let mut pos = 0usize;
        let node = parse_node(&toks, &mut pos).map_err(|e| TreeError::Parse(text.into(), e))?;
        if pos != toks.len() {
            return Err(TreeError::Parse(text.into(), "trailing tokens".into()));
        }
        match node {
            TreeNode::Internal(children) => FTree::new(children, planar),
            TreeNode::Leaf(_) => Err(TreeError::Parse(
                text.into(),
                "top level must be parenthesized".into(),
            )),
        }
    }
}

impl std::fmt::Display for FTree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.to_paren_string())
    }
}

fn validate_node(node: &TreeNode) -> Result<(), TreeError> {
    match node {
        TreeNode::Leaf(_) => Ok(()),
        TreeNode::Internal(ch) => {
            if ch.len() < 2 {
                return Err(TreeError::BivalentVertex);
            }
            ch.iter().try_for_each(validate_node)
        }
    }
}

#[derive(Debug, PartialEq)]
enum Tok {
    Open,
    Close,
    Label(u32),
}

fn tokenize(text: &str) -> Result<Vec<Tok>, String> {
    let mut toks = Vec::new();
    let mut digits = String::new();
    for ch in text.chars() {
        if ch.is_ascii_digit() {
            digits.push(ch);
            continue;
        }
        if !digits.is_empty() {
            toks.push(Tok::Label(digits.parse().map_err(|e| format!("{e}"))?));
            digits.clear();
        }
        match ch {
            '(' => toks.push(Tok::Open),
            ')' => toks.push(Tok::Close),
            c if c.is_whitespace() => {}
            c => return Err(format!("unexpected character {c:?}")),
        }
    }
    if !digits.is_empty() {
        toks.push(Tok::Label(digits.parse().map_err(|e| format!("{e}"))?));
    }
    Ok(toks)
}

fn parse_node(toks: &[Tok], pos: &mut usize) -> Result<TreeNode, String> {
    match toks.get(*pos) {
        Some(Tok::Label(l)) => {
            *pos += 1;
            Ok(TreeNode::Leaf(*l))
        }
        Some(Tok::Open) => {
            *pos += 1;
            let mut children = Vec::new();
            loop {
                match toks.get(*pos) {
                    Some(Tok::Close) => {
                        *pos += 1;
                        return Ok(TreeNode::Internal(children));
                    }
                    Some(_) => children.push(parse_node(toks, pos)?),
                    None => return Err("unbalanced parentheses".into()),
                }
            }
        }
        Some(Tok::Close) => Err("unexpected ')'".into()),
        None => Err("empty input".into()),
    }
}

/// A finite poset of canonical trees with its full order relation
/// (reflexive, antisymmetric, transitive) as index pairs into
/// `objects`.  `(i, j)` present means there is a morphism from
/// `objects[i]` to `objects[j]`, i.e. `objects[j]` is a contraction
/// of `objects[i]`.
#[derive(Debug, Clone)]
pub struct PosetView {
    objects: Vec<FTree>,
    relation: BTreeSet<(usize, usize)>,
}

impl PosetView {
    pub fn objects(&self) -> &[FTree] {
        &self.objects
    }

    pub fn relation(&self) -> &BTreeSet<(usize, usize)> {
        &self.relation
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.relation.contains(&(i, j))
    }

    pub fn index_of(&self, t: &FTree) -> Option<usize> {
        self.objects.binary_search_by(|o| o.cmp(t)).ok()
    }

    /// JSON form: `{"objects": [...], "relation": [[i, j], ...]}` with
    /// trees in their parenthesis text form.
    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Repr {
            objects: Vec<String>,
            relation: Vec<[usize; 2]>,
            planar: bool,
            #[serde(rename = "nLeaves")]
            n_leaves: u32,
        }
        let planar = self.objects.first().map_or(false, |t| t.is_planar());
        let n_leaves = self.objects.first().map_or(0, |t| t.n_leaves());
        serde_json::to_value(Repr {
            objects: self.objects.iter().map(|t| t.to_paren_string()).collect(),
            relation: self.relation.iter().map(|(i, j)| [*i, *j]).collect(),
            planar,
            n_leaves,
        })
        .expect("poset serializes")
    }
}

/// Enumerates every tree shape on the given leaf interval that can
/// hang from an edge (so: a single leaf, or an internal vertex with
/// at least two children).
fn subtree_shapes(leaves: &[u32], planar: bool) -> Vec<TreeNode> {
    if leaves.len() == 1 {
        return vec![TreeNode::Leaf(leaves[0])];
    }
    let mut out = Vec::new();
    for blocks in partitions(leaves, planar) {
        let per_block: Vec<Vec<TreeNode>> = blocks
            .iter()
            .map(|b| subtree_shapes(b, planar))
            .collect();
        cartesian(&per_block, &mut |children| {
            out.push(TreeNode::Internal(children.to_vec()));
        });
    }
    out
}

/// Partitions of a leaf list into at least two blocks.  Planar
/// partitions are compositions into consecutive runs; unrestricted
/// partitions are set partitions with blocks ordered by minimum.
fn partitions(leaves: &[u32], planar: bool) -> Vec<Vec<Vec<u32>>> {
    if planar {
        let n = leaves.len();
        let mut out = Vec::new();
        // choose cut positions: nonempty proper subsets of gaps
        for mask in 1..(1u64 << (n - 1)) {
            let mut blocks = vec![Vec::new()];
            for (i, &l) in leaves.iter().enumerate() {
                blocks.last_mut().expect("nonempty").push(l);
                if i + 1 < n && mask >> i & 1 == 1 {
                    blocks.push(Vec::new());
                }
            }
            out.push(blocks);
        }
        out
    } else {
        let mut out = Vec::new();
        let mut blocks: Vec<Vec<u32>> = Vec::new();
        fn go(rest: &[u32], blocks: &mut Vec<Vec<u32>>, out: &mut Vec<Vec<Vec<u32>>>) {
            match rest.split_first() {
                None => {
                    if blocks.len() >= 2 {
                        out.push(blocks.clone());
                    }
                }
                Some((x, tail)) => {
                    for i in 0..blocks.len() {
                        blocks[i].push(*x);
                        go(tail, blocks, out);
                        blocks[i].pop();
                    }
                    blocks.push(vec![*x]);
                    go(tail, blocks, out);
                    blocks.pop();
                }
            }
        }
        go(leaves, &mut blocks, &mut out);
        out
    }
}

fn cartesian<T: Clone>(choices: &[Vec<T>], emit: &mut impl FnMut(&[T])) {
    let mut current: Vec<T> = Vec::with_capacity(choices.len());
    fn go<T: Clone>(choices: &[Vec<T>], current: &mut Vec<T>, emit: &mut impl FnMut(&[T])) {
        if current.len() == choices.len() {
            emit(current);
            return;
        }
        for item in &choices[current.len()] {
            current.push(item.clone());
            go(choices, current, emit);
            current.pop();
        }
    }
    go(choices, &mut current, emit);
}

/// All trees with leaves 1..=n, canonical, sorted by text form.  For
/// `planar` the root must have valence greater than one; otherwise
/// univalent-root trees are included.
pub fn enumerate_trees(n: u32, planar: bool, limits: &Limits) -> Result<Vec<FTree>, TreeError> {
    let cap = if planar {
        limits.max_psi_planar
    } else {
        limits.max_psi_nonplanar
    };
    if n == 0 {
        return Err(TreeError::Empty);
    }
    if n > cap {
        return Err(TreeError::EnumerationCap { n, cap });
    }
    let leaves: Vec<u32> = (1..=n).collect();
    let mut trees: BTreeSet<FTree> = BTreeSet::new();
    // root with valence >= 2
    if n >= 2 {
        for blocks in partitions(&leaves, planar) {
            let per_block: Vec<Vec<TreeNode>> = blocks
                .iter()
                .map(|b| subtree_shapes(b, planar))
                .collect();
            cartesian(&per_block, &mut |children| {
                trees.insert(
                    FTree::new(children.to_vec(), planar).expect("generated trees are valid"),
                );
            });
        }
    }
    if !planar {
        // univalent root: a single child carrying all leaves
        for child in subtree_shapes(&leaves, planar) {
            trees.insert(FTree::new(vec![child], planar).expect("generated trees are valid"));
        }
    }
    Ok(trees.into_iter().collect())
}

/// The contraction poset on trees with n leaves: objects one per
/// isomorphism class, relation generated by edge contraction.
pub fn enumerate_psi(n: u32, planar: bool, limits: &Limits) -> Result<PosetView, TreeError> {
    let objects = enumerate_trees(n, planar, limits)?;
    let index: HashMap<&FTree, usize> = objects.iter().enumerate().map(|(i, t)| (t, i)).collect();
    // covering relation from single-edge contractions, then closure
    let mut covers: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); objects.len()];
    for (i, tree) in objects.iter().enumerate() {
        for edge in tree.internal_edges() {
            let contracted = tree
                .contract(&BTreeSet::from([edge]))
                .expect("edge keys come from the tree");
            let j = *index
                .get(&contracted)
                .expect("contraction stays in the enumeration");
            covers[i].insert(j);
        }
    }
    let mut relation: BTreeSet<(usize, usize)> = BTreeSet::new();
    for start in 0..objects.len() {
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for &w in &covers[v] {
                if seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        relation.extend(seen.into_iter().map(|j| (start, j)));
    }
    Ok(PosetView { objects, relation })
}

/// Face counts of the n-dimensional associahedron, indexed by face
/// dimension.  A half-planar tree with n+2 leaves spans a face of
/// dimension `sum over internal vertices of (children - 2)`, the root
/// included.
pub fn associahedron_f_vector(n: u32, limits: &Limits) -> Result<Vec<usize>, TreeError> {
    let trees = enumerate_trees(n + 2, true, limits)?;
    let mut counts = vec![0usize; n as usize + 1];
    for t in &trees {
        let mut dim = t.root_valence() as u32 - 2;
        fn walk(node: &TreeNode, dim: &mut u32) {
            if let TreeNode::Internal(ch) = node {
                *dim += ch.len() as u32 - 2;
                ch.iter().for_each(|c| walk(c, dim));
            }
        }
        t.root_children.iter().for_each(|c| walk(c, &mut dim));
        counts[dim as usize] += 1;
    }
    Ok(counts)
}

/// The half-planar tree with at most two edges between any leaf and
/// the root whose root-joined set is exactly `subset`, certified by
/// exhaustive enumeration to be the unique such tree and terminal
/// among all trees whose root-joined set is contained in `subset`.
pub fn check_f_terminal(
    n: u32,
    subset: &BTreeSet<u32>,
    limits: &Limits,
) -> Result<FTree, TreeError> {
    if subset.is_empty() {
        return Err(TreeError::EmptySubset);
    }
    for &v in subset {
        if v < 1 || v > n {
            return Err(TreeError::OutOfRange { value: v, max: n });
        }
    }
    // blocks of 1..=n+1 cut after each element of the subset
    let mut children: Vec<TreeNode> = Vec::new();
    let mut block: Vec<u32> = Vec::new();
    for leaf in 1..=n + 1 {
        block.push(leaf);
        if leaf == n + 1 || subset.contains(&leaf) {
            children.push(if block.len() == 1 {
                TreeNode::Leaf(block[0])
            } else {
                TreeNode::Internal(block.iter().map(|l| TreeNode::Leaf(*l)).collect())
            });
            block = Vec::new();
        }
    }
    let candidate = FTree::new(children, true)?;
    // certify against the whole poset
    let poset = enumerate_psi(n + 1, true, limits)?;
    let candidate_idx = poset
        .index_of(&candidate)
        .ok_or_else(|| TreeError::TerminalityFailure("candidate not in enumeration".into()))?;
    let mut shallow_matches = 0usize;
    for (i, t) in poset.objects().iter().enumerate() {
        let image = t.adjacent_root_joined()?;
        if t.depth() <= 2 && image == *subset {
            shallow_matches += 1;
            if i != candidate_idx {
                return Err(TreeError::TerminalityFailure(format!(
                    "two depth-2 trees map onto {subset:?}: {} and {}",
                    candidate, t
                )));
            }
        }
        if image.is_subset(subset) && !poset.leq(i, candidate_idx) {
            return Err(TreeError::TerminalityFailure(format!(
                "{} maps into {subset:?} but admits no morphism to {}",
                t, candidate
            )));
        }
    }
    if shallow_matches != 1 {
        return Err(TreeError::TerminalityFailure(format!(
            "expected exactly one depth-2 tree over {subset:?}, found {shallow_matches}"
        )));
    }
    Ok(candidate)
}

/// A map of finite index sets `{0, .., source-1} -> {0, .., target-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IndexMap {
    values: Vec<usize>,
    target_size: usize,
}

impl IndexMap {
    pub fn new(values: Vec<usize>, target_size: usize) -> Result<Self, TreeError> {
        if let Some(&v) = values.iter().find(|v| **v >= target_size) {
            return Err(TreeError::MapValueOutOfRange {
                value: v,
                target: target_size,
            });
        }
        Ok(IndexMap {
            values,
            target_size,
        })
    }

    pub fn identity(n: usize) -> Self {
        IndexMap {
            values: (0..n).collect(),
            target_size: n,
        }
    }

    /// The order-preserving surjection that sends both `i` and `i + 1`
    /// to `i`, from a set of size `n + 1` onto one of size `n`.
    pub fn collapse_pair(n: usize, i: usize) -> Self {
        assert!(n >= 1 && i + 1 < n + 1, "collapse index in range");
        IndexMap {
            values: (0..n + 1).map(|x| if x > i { x - 1 } else { x }).collect(),
            target_size: n,
        }
    }

    /// The order-preserving injection from a set of size `n - 1` into
    /// one of size `n` that misses `i`.
    pub fn skip(n: usize, i: usize) -> Self {
        assert!(n >= 1 && i < n, "skipped index in range");
        IndexMap {
            values: (0..n - 1).map(|x| if x >= i { x + 1 } else { x }).collect(),
            target_size: n,
        }
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn source_size(&self) -> usize {
        self.values.len()
    }

    pub fn target_size(&self) -> usize {
        self.target_size
    }

    pub fn get(&self, i: usize) -> usize {
        self.values[i]
    }

    pub fn is_order_preserving(&self) -> bool {
        self.values.windows(2).all(|w| w[0] <= w[1])
    }

    pub fn is_boundary_preserving(&self) -> bool {
        !self.values.is_empty()
            && self.values[0] == 0
            && *self.values.last().expect("nonempty") == self.target_size - 1
    }

    /// `self` after `first`.
    pub fn compose(&self, first: &IndexMap) -> Result<IndexMap, TreeError> {
        if first.target_size != self.source_size() {
            return Err(TreeError::NotComposable(
                first.target_size,
                self.source_size(),
            ));
        }
        Ok(IndexMap {
            values: first.values.iter().map(|&v| self.values[v]).collect(),
            target_size: self.target_size,
        })
    }
}

/// The boundary-preserving dual of an order-preserving simplex map.
/// For sigma from `[n]` to `[m]` (sizes n+1 and m+1), the dual from
/// `[m+1]` to `[n+1]` sends j to the count of i with sigma(i) > m - j.
pub fn sigma_star(sigma: &IndexMap) -> Result<IndexMap, TreeError> {
    if !sigma.is_order_preserving() {
        return Err(TreeError::NotMonotone);
    }
    let n_plus_1 = sigma.source_size();
    let m = sigma.target_size - 1;
    let values: Vec<usize> = (0..=m + 1)
        .map(|j| sigma.values.iter().filter(|&&v| v + j > m).count())
        .collect();
    IndexMap::new(values, n_plus_1 + 1)
}

/// The order-preserving injection `[#S - 1] = S ⊆ S' = [#S' - 1]`
/// induced by an inclusion of nonempty subsets of `{1..=n+1}`.
pub fn functor_g(
    n: u32,
    s: &BTreeSet<u32>,
    s_prime: &BTreeSet<u32>,
) -> Result<IndexMap, TreeError> {
    if s.is_empty() {
        return Err(TreeError::EmptySubset);
    }
    for &v in s_prime {
        if v < 1 || v > n + 1 {
            return Err(TreeError::OutOfRange {
                value: v,
                max: n + 1,
            });
        }
    }
    if !s.is_subset(s_prime) {
        return Err(TreeError::NotASubset {
            smaller: s.clone(),
            larger: s_prime.clone(),
        });
    }
    let prime: Vec<u32> = s_prime.iter().copied().collect();
    let values = s
        .iter()
        .map(|x| prime.binary_search(x).expect("subset element"))
        .collect();
    IndexMap::new(values, prime.len())
}

/// The complementary functor: for nonempty `S ⊆ S' ⊆ {1..=n}` the
/// order-preserving surjection `[n - #S] -> [n - #S']` obtained by
/// sending each element of `[n] - S` to the largest element of
/// `[n] - S'` less than or equal to it.
pub fn functor_g_shriek(
    n: u32,
    s: &BTreeSet<u32>,
    s_prime: &BTreeSet<u32>,
) -> Result<IndexMap, TreeError> {
    if s.is_empty() {
        return Err(TreeError::EmptySubset);
    }
    for &v in s_prime {
        if v < 1 || v > n {
            return Err(TreeError::OutOfRange { value: v, max: n });
        }
    }
    if !s.is_subset(s_prime) {
        return Err(TreeError::NotASubset {
            smaller: s.clone(),
            larger: s_prime.clone(),
        });
    }
    let source: Vec<u32> = (0..=n).filter(|x| !s.contains(x)).collect();
    let target: Vec<u32> = (0..=n).filter(|x| !s_prime.contains(x)).collect();
    // 0 is never excluded, so the floor below always exists
    let values = source
        .iter()
        .map(|&x| match target.binary_search(&x) {
            Ok(i) => i,
            Err(i) => i - 1,
        })
        .collect();
    IndexMap::new(values, target.len())
}

/// Abstract simplicial complex presented by its facets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialComplex {
    vertex_count: usize,
    facets: Vec<BTreeSet<usize>>,
}

impl SimplicialComplex {
    pub fn new(
        vertex_count: usize,
        facets: impl IntoIterator<Item = BTreeSet<usize>>,
    ) -> Result<Self, TreeError> {
        let mut facets: Vec<BTreeSet<usize>> = facets.into_iter().collect();
        facets.sort();
        facets.dedup();
        for f in &facets {
            if f.is_empty() {
                return Err(TreeError::EmptyFacet);
            }
            for &v in f {
                if v >= vertex_count {
                    return Err(TreeError::FacetVertexOutOfRange(v));
                }
            }
        }
        for a in &facets {
            for b in &facets {
                if a != b && a.is_subset(b) {
                    return Err(TreeError::ContainedFacet {
                        inner: a.clone(),
                        outer: b.clone(),
                    });
                }
            }
        }
        Ok(SimplicialComplex {
            vertex_count,
            facets,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn facets(&self) -> &[BTreeSet<usize>] {
        &self.facets
    }

    pub fn dim(&self) -> usize {
        self.facets
            .iter()
            .map(|f| f.len() - 1)
            .max()
            .unwrap_or(0)
    }

    /// All faces grouped by dimension, each dimension sorted.  Facets
    /// are stored alone; faces are generated here on demand.
    pub fn faces_by_dim(&self) -> Vec<Vec<Vec<usize>>> {
        let mut by_dim: Vec<BTreeSet<Vec<usize>>> = vec![BTreeSet::new(); self.dim() + 1];
        for facet in &self.facets {
            let verts: Vec<usize> = facet.iter().copied().collect();
            let k = verts.len();
            for mask in 1u64..(1 << k) {
                let face: Vec<usize> = (0..k)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| verts[i])
                    .collect();
                by_dim[face.len() - 1].insert(face);
            }
        }
        by_dim
            .into_iter()
            .map(|s| s.into_iter().collect())
            .collect()
    }

    pub fn f_vector(&self) -> Vec<usize> {
        self.faces_by_dim().iter().map(|f| f.len()).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.f_vector()
            .iter()
            .enumerate()
            .map(|(d, count)| if d % 2 == 0 { *count as i64 } else { -(*count as i64) })
            .sum()
    }

    /// JSON form: `{"vertices": k, "facets": [[...], ...]}`.
    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Repr {
            vertices: usize,
            facets: Vec<Vec<usize>>,
        }
        serde_json::to_value(Repr {
            vertices: self.vertex_count,
            facets: self
                .facets
                .iter()
                .map(|f| f.iter().copied().collect())
                .collect(),
        })
        .expect("complex serializes")
    }
}

/// The n-dimensional complex whose i-simplices are pairs (S, f) with
/// S a subset of {0..=n} of size i+1 and f an order-preserving map
/// from S to {0..=d}; every simplex extends to one with S = {0..=n},
/// so only those maximal simplices are materialized.  Vertex (i, j)
/// gets id `i * (d + 1) + j`.
pub fn build_y(n: u32, d: u32) -> Result<SimplicialComplex, TreeError> {
    if d > n {
        return Err(TreeError::BadComplexDimension { n, d });
    }
    let (n, d) = (n as usize, d as usize);
    let mut facets: Vec<BTreeSet<usize>> = Vec::new();
    let mut f = vec![0usize; n + 1];
    loop {
        facets.push((0..=n).map(|i| i * (d + 1) + f[i]).collect());
        // advance to the next weakly increasing map
        let mut advanced = false;
        for i in (0..=n).rev() {
            if f[i] < d {
                f[i] += 1;
                let v = f[i];
                f[i + 1..].iter_mut().for_each(|x| *x = v);
                advanced = true;
                break;
            }
        }
        if !advanced {
            break;
        }
    }
    SimplicialComplex::new((n + 1) * (d + 1), facets)
}

/// Order complex (nerve) of a poset: simplices are chains.  Facets are
/// the maximal chains, found by walking the covering relation.
pub fn order_complex(poset: &PosetView) -> Result<SimplicialComplex, TreeError> {
    let n = poset.len();
    let strict = |i: usize, j: usize| i != j && poset.leq(i, j);
    // covering relation
    let mut covers: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        'next: for j in 0..n {
            if !strict(i, j) {
                continue;
            }
            for k in 0..n {
                if strict(i, k) && strict(k, j) {
                    continue 'next;
                }
            }
            covers[i].push(j);
        }
    }
    let minimal: Vec<usize> = (0..n)
        .filter(|&j| (0..n).all(|i| !strict(i, j)))
        .collect();
    let mut facets: Vec<BTreeSet<usize>> = Vec::new();
    let mut chain: Vec<usize> = Vec::new();
    fn extend(
        v: usize,
        covers: &[Vec<usize>],
        chain: &mut Vec<usize>,
        facets: &mut Vec<BTreeSet<usize>>,
    ) {
        chain.push(v);
        if covers[v].is_empty() {
            facets.push(chain.iter().copied().collect());
        } else {
            for &w in &covers[v] {
                extend(w, covers, chain, facets);
            }
        }
        chain.pop();
    }
    for &v in &minimal {
        extend(v, &covers, &mut chain, &mut facets);
    }
    SimplicialComplex::new(n, facets)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn limits() -> Limits {
        Limits::default()
    }

    fn set(vals: &[u32]) -> BTreeSet<u32> {
        vals.iter().copied().collect()
    }

    #[test]
    fn corolla_round_trips_through_text() {
        let t = FTree::corolla(3, false).unwrap();
        assert_eq!(t.to_paren_string(), "(1 2 3)");
        assert_eq!(FTree::from_paren_str("(1 2 3)", false).unwrap(), t);
        let nested = FTree::from_paren_str("(1 (2 3) 4)", false).unwrap();
        assert_eq!(nested.to_paren_string(), "(1 (2 3) 4)");
    }

    #[test]
    fn canonical_form_sorts_children_by_min_leaf() {
        let a = FTree::from_paren_str("((3 4) 1 2)", false).unwrap();
        let b = FTree::from_paren_str("(1 2 (4 3))", false).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_paren_string(), "(1 2 (3 4))");
    }

    #[test]
    fn bivalent_internal_vertices_are_rejected() {
        assert!(matches!(
            FTree::from_paren_str("(1 (2))", false),
            Err(TreeError::BivalentVertex)
        ));
        // a univalent root is fine
        assert!(FTree::from_paren_str("((1 2))", false).is_ok());
    }

    #[test]
    fn planar_trees_must_list_leaves_in_order() {
        assert!(FTree::from_paren_str("((1 2) 3)", true).is_ok());
        assert!(matches!(
            FTree::from_paren_str("((1 3) 2)", true),
            Err(TreeError::NotPlanar(_))
        ));
        assert!(matches!(
            FTree::from_paren_str("(2 (1 3))", true),
            Err(TreeError::NotPlanar(_))
        ));
    }

    #[test]
    fn contract_empty_set_is_identity() {
        let t = FTree::from_paren_str("(1 (2 3) 4)", false).unwrap();
        assert_eq!(t.contract(&BTreeSet::new()).unwrap(), t);
    }

    #[test]
    fn contract_single_internal_edge_of_three_leaf_tree() {
        let t = FTree::from_paren_str("((1 2) 3)", false).unwrap();
        let edges: BTreeSet<_> = BTreeSet::from([set(&[1, 2])]);
        assert_eq!(
            t.contract(&edges).unwrap(),
            FTree::corolla(3, false).unwrap()
        );
    }

    #[test]
    fn contract_all_edges_gives_corolla() {
        let t = FTree::from_paren_str("((1 (2 3)) (4 5))", false).unwrap();
        let all: BTreeSet<_> = t.internal_edges().into_iter().collect();
        assert_eq!(t.contract(&all).unwrap(), FTree::corolla(5, false).unwrap());
    }

    #[test]
    fn contract_rejects_leaf_edges_and_non_edges() {
        let t = FTree::from_paren_str("((1 2) 3)", false).unwrap();
        assert!(matches!(
            t.contract(&BTreeSet::from([set(&[1])])),
            Err(TreeError::LeafEdge(_))
        ));
        assert!(matches!(
            t.contract(&BTreeSet::from([set(&[2, 3])])),
            Err(TreeError::NotAnEdge(_))
        ));
    }

    #[test]
    fn psi_two_has_two_objects() {
        let poset = enumerate_psi(2, false, &limits()).unwrap();
        assert_eq!(poset.len(), 2);
        let texts: Vec<String> = poset
            .objects()
            .iter()
            .map(|t| t.to_paren_string())
            .collect();
        assert_eq!(texts, vec!["((1 2))", "(1 2)"]);
        // the univalent-root tree contracts onto the corolla
        let i = texts.iter().position(|t| t == "((1 2))").unwrap();
        let j = texts.iter().position(|t| t == "(1 2)").unwrap();
        assert!(poset.leq(i, j));
        assert!(!poset.leq(j, i));
    }

    #[test]
    fn planar_poset_counts_match_associahedron_faces() {
        assert_eq!(enumerate_psi(4, true, &limits()).unwrap().len(), 11);
        assert_eq!(enumerate_psi(5, true, &limits()).unwrap().len(), 45);
    }

    #[test]
    fn enumeration_cap_is_enforced() {
        let tight = Limits {
            max_psi_nonplanar: 3,
            ..Limits::default()
        };
        assert!(matches!(
            enumerate_psi(4, false, &tight),
            Err(TreeError::EnumerationCap { .. })
        ));
    }

    #[test]
    fn ex_triples_of_corolla_is_empty() {
        assert!(FTree::corolla(4, false).unwrap().ex_triples().is_empty());
    }

    #[test]
    fn ex_triples_of_grouped_pair() {
        let t = FTree::from_paren_str("((1 2) 3)", false).unwrap();
        assert_eq!(
            t.ex_triples(),
            BTreeSet::from([(1, 2, 3), (2, 1, 3)])
        );
    }

    #[test]
    fn ex_invariant_under_root_edge() {
        for n in 2..=4 {
            for t in enumerate_trees(n, false, &limits()).unwrap() {
                if t.root_valence() >= 2 {
                    let wrapped = t.with_root_edge().unwrap();
                    assert_eq!(t.ex_triples(), wrapped.ex_triples());
                }
            }
        }
    }

    #[test]
    fn ex_determines_tree_up_to_root_edge() {
        for n in 2..=4 {
            let trees = enumerate_trees(n, false, &limits()).unwrap();
            for a in &trees {
                for b in &trees {
                    if a.ex_triples() == b.ex_triples() && a != b {
                        let related = a
                            .with_root_edge()
                            .map(|w| w == *b)
                            .unwrap_or(false)
                            || b.with_root_edge().map(|w| w == *a).unwrap_or(false);
                        assert!(related, "{a} and {b} share exclusions but are unrelated");
                    }
                }
            }
        }
    }

    #[test]
    fn contraction_is_functorial_for_small_trees() {
        for n in 2..=4 {
            for t in enumerate_trees(n, false, &limits()).unwrap() {
                let edges = t.internal_edges();
                let k = edges.len();
                for mask in 0u32..(1 << k) {
                    let e_all: BTreeSet<_> = (0..k)
                        .filter(|i| mask >> i & 1 == 1)
                        .map(|i| edges[i].clone())
                        .collect();
                    for split in 0u32..(1 << k) {
                        if split & mask != split {
                            continue;
                        }
                        let e1: BTreeSet<_> = (0..k)
                            .filter(|i| split >> i & 1 == 1)
                            .map(|i| edges[i].clone())
                            .collect();
                        let e2: BTreeSet<_> = e_all.difference(&e1).cloned().collect();
                        let two_step = t.contract(&e1).unwrap().contract(&e2).unwrap();
                        assert_eq!(two_step, t.contract(&e_all).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn root_joined_set_of_corolla_is_everything() {
        let t = FTree::corolla(4, true).unwrap();
        assert_eq!(t.adjacent_root_joined().unwrap(), set(&[1, 2, 3]));
    }

    #[test]
    fn root_joined_set_of_grouped_pair() {
        let t = FTree::from_paren_str("((1 2) 3)", true).unwrap();
        assert_eq!(t.adjacent_root_joined().unwrap(), set(&[2]));
    }

    #[test]
    fn root_joined_rejects_non_planar() {
        let t = FTree::corolla(3, false).unwrap();
        assert!(matches!(
            t.adjacent_root_joined(),
            Err(TreeError::PlanarRequired)
        ));
    }

    #[test]
    fn functor_is_monotone_on_small_posets() {
        for n in 2..=4u32 {
            let poset = enumerate_psi(n + 1, true, &limits()).unwrap();
            let images: Vec<BTreeSet<u32>> = poset
                .objects()
                .iter()
                .map(|t| t.adjacent_root_joined().unwrap())
                .collect();
            for &(i, j) in poset.relation() {
                assert!(
                    images[i].is_subset(&images[j]),
                    "morphism {} -> {} breaks monotonicity",
                    poset.objects()[i],
                    poset.objects()[j]
                );
            }
        }
    }

    #[test]
    fn terminal_tree_for_full_subset_is_corolla() {
        let n = 4;
        let t = check_f_terminal(n, &set(&[1, 2, 3, 4]), &limits()).unwrap();
        assert_eq!(t, FTree::corolla(n + 1, true).unwrap());
    }

    #[test]
    fn terminal_tree_for_singleton() {
        let t = check_f_terminal(2, &set(&[2]), &limits()).unwrap();
        assert_eq!(t, FTree::from_paren_str("((1 2) 3)", true).unwrap());
    }

    #[test]
    fn terminality_certified_up_to_n_five() {
        for n in 1..=5u32 {
            for mask in 1u32..(1 << n) {
                let subset: BTreeSet<u32> =
                    (1..=n).filter(|i| mask >> (i - 1) & 1 == 1).collect();
                check_f_terminal(n, &subset, &limits()).unwrap();
            }
        }
    }

    #[test]
    fn functor_g_examples() {
        let id = functor_g(2, &set(&[1, 3]), &set(&[1, 3])).unwrap();
        assert_eq!(id.values(), &[0, 1]);
        let incl = functor_g(2, &set(&[1, 3]), &set(&[1, 2, 3])).unwrap();
        assert_eq!(incl.values(), &[0, 2]);
        assert_eq!(incl.target_size(), 3);
        // functoriality instance
        let f1 = functor_g(2, &set(&[1]), &set(&[1, 2])).unwrap();
        let f2 = functor_g(2, &set(&[1, 2]), &set(&[1, 2, 3])).unwrap();
        let whole = functor_g(2, &set(&[1]), &set(&[1, 2, 3])).unwrap();
        assert_eq!(f2.compose(&f1).unwrap(), whole);
        assert!(matches!(
            functor_g(2, &BTreeSet::new(), &set(&[1])),
            Err(TreeError::EmptySubset)
        ));
    }

    #[test]
    fn functor_g_shriek_examples() {
        let id = functor_g_shriek(3, &set(&[2]), &set(&[2])).unwrap();
        assert_eq!(id, IndexMap::identity(3));
        let m = functor_g_shriek(2, &set(&[1]), &set(&[1, 2])).unwrap();
        assert_eq!(m.values(), &[0, 0]);
        let m = functor_g_shriek(3, &set(&[2]), &set(&[2, 3])).unwrap();
        assert_eq!(m.values(), &[0, 1, 1]);
        // functoriality
        let f1 = functor_g_shriek(3, &set(&[2]), &set(&[2, 3])).unwrap();
        let f2 = functor_g_shriek(3, &set(&[2, 3]), &set(&[1, 2, 3])).unwrap();
        let whole = functor_g_shriek(3, &set(&[2]), &set(&[1, 2, 3])).unwrap();
        assert_eq!(f2.compose(&f1).unwrap(), whole);
    }

    #[test]
    fn sigma_star_of_identity_is_identity() {
        for n in 0..4 {
            let id = IndexMap::identity(n + 1);
            assert_eq!(sigma_star(&id).unwrap(), IndexMap::identity(n + 2));
        }
    }

    #[test]
    fn sigma_star_counting_example() {
        // sigma: [1] -> [0]
        let sigma = IndexMap::new(vec![0, 0], 1).unwrap();
        let dual = sigma_star(&sigma).unwrap();
        assert_eq!(dual.values(), &[0, 2]);
        assert_eq!(dual.target_size(), 3);
        assert!(dual.is_boundary_preserving());
    }

    #[test]
    fn sigma_star_rejects_non_monotone() {
        let m = IndexMap::new(vec![1, 0], 2).unwrap();
        assert!(matches!(sigma_star(&m), Err(TreeError::NotMonotone)));
    }

    /// All order-preserving maps between sets of the given sizes.
    fn monotone_maps(source: usize, target: usize) -> Vec<IndexMap> {
        let mut out = Vec::new();
        let mut values = vec![0usize; source];
        loop {
            out.push(IndexMap::new(values.clone(), target).unwrap());
            let mut i = source;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if values[i] + 1 < target {
                    values[i] += 1;
                    let v = values[i];
                    values[i + 1..].iter_mut().for_each(|x| *x = v);
                    break;
                }
                if i == 0 {
                    return out;
                }
            }
        }
    }

    #[test]
    fn sigma_star_is_contravariantly_functorial() {
        for a in 1..=4usize {
            for b in 1..=4usize {
                for c in 1..=4usize {
                    for tau in monotone_maps(a, b) {
                        for sigma in monotone_maps(b, c) {
                            let composite = sigma.compose(&tau).unwrap();
                            let lhs = sigma_star(&composite).unwrap();
                            let rhs = sigma_star(&tau)
                                .unwrap()
                                .compose(&sigma_star(&sigma).unwrap())
                                .unwrap();
                            assert_eq!(lhs, rhs);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn y_two_one_has_expected_f_vector() {
        let y = build_y(2, 1).unwrap();
        assert_eq!(y.f_vector(), vec![6, 9, 4]);
        assert_eq!(y.euler_characteristic(), 1);
    }

    #[test]
    fn y_one_one_is_a_path() {
        let y = build_y(1, 1).unwrap();
        assert_eq!(y.f_vector(), vec![4, 3]);
    }

    #[test]
    fn y_n_zero_is_a_simplex() {
        for n in 0..=4 {
            let y = build_y(n, 0).unwrap();
            assert_eq!(y.facets().len(), 1);
            assert_eq!(y.dim(), n as usize);
        }
    }

    #[test]
    fn y_rejects_d_above_n() {
        assert!(matches!(
            build_y(2, 3),
            Err(TreeError::BadComplexDimension { .. })
        ));
    }

    #[test]
    fn y_f_vector_matches_binomial_count() {
        // i-simplices: subsets of size i+1 times weakly increasing maps
        fn binom(n: usize, k: usize) -> usize {
            if k > n {
                return 0;
            }
            let mut out = 1usize;
            for i in 0..k {
                out = out * (n - i) / (i + 1);
            }
            out
        }
        for n in 1..=4u32 {
            for d in 0..=n {
                let y = build_y(n, d).unwrap();
                let fv = y.f_vector();
                for (i, count) in fv.iter().enumerate() {
                    let expected =
                        binom(n as usize + 1, i + 1) * binom(d as usize + i + 1, i + 1);
                    assert_eq!(*count, expected, "Y({n},{d}) dimension {i}");
                }
            }
        }
    }

    #[test]
    fn order_complex_of_point_and_chain() {
        let one = enumerate_psi(1, false, &limits()).unwrap();
        assert_eq!(one.len(), 1);
        let k = order_complex(&one).unwrap();
        assert_eq!(k.f_vector(), vec![1]);

        let two = enumerate_psi(2, false, &limits()).unwrap();
        let k = order_complex(&two).unwrap();
        assert_eq!(k.f_vector(), vec![2, 1]);
    }

    #[test]
    fn order_complex_of_pentagon_poset_is_a_disk() {
        let poset = enumerate_psi(4, true, &limits()).unwrap();
        let k = order_complex(&poset).unwrap();
        assert_eq!(k.euler_characteristic(), 1);
    }

    #[test]
    fn associahedron_f_vectors() {
        assert_eq!(associahedron_f_vector(0, &limits()).unwrap(), vec![1]);
        assert_eq!(associahedron_f_vector(2, &limits()).unwrap(), vec![5, 5, 1]);
        assert_eq!(
            associahedron_f_vector(3, &limits()).unwrap(),
            vec![14, 21, 9, 1]
        );
    }

    #[test]
    fn associahedron_vertices_are_catalan_numbers() {
        fn catalan(k: u64) -> u64 {
            let mut c = 1u64;
            for i in 0..k {
                c = c * 2 * (2 * i + 1) / (i + 2);
            }
            c
        }
        for n in 0..=7u32 {
            let fv = associahedron_f_vector(n, &limits()).unwrap();
            assert_eq!(fv[0] as u64, catalan(n as u64 + 1), "n = {n}");
            assert_eq!(*fv.last().unwrap(), 1, "top cell is the corolla");
        }
    }

    #[test]
    fn poset_relation_is_a_partial_order() {
        for (n, planar) in [(3u32, false), (4, true)] {
            let poset = enumerate_psi(n, planar, &limits()).unwrap();
            let k = poset.len();
            for i in 0..k {
                assert!(poset.leq(i, i));
                for j in 0..k {
                    if i != j && poset.leq(i, j) {
                        assert!(!poset.leq(j, i), "antisymmetry");
                    }
                    for l in 0..k {
                        if poset.leq(i, j) && poset.leq(j, l) {
                            assert!(poset.leq(i, l), "transitivity");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn nonplanar_counts_pair_rooted_and_unrooted() {
        // trees with univalent roots biject with the rest
        for n in 2..=5u32 {
            let trees = enumerate_trees(n, false, &limits()).unwrap();
            let univalent = trees.iter().filter(|t| t.root_valence() == 1).count();
            assert_eq!(univalent * 2, trees.len());
        }
        assert_eq!(enumerate_trees(3, false, &limits()).unwrap().len(), 8);
        assert_eq!(enumerate_trees(4, false, &limits()).unwrap().len(), 52);
    }
}
