//! Graph structures `(V, E, O)` anchored at an independent set `A`, and the
//! calculus of idealized counts, tracking times, building sequences, weights
//! and derived families.

mod calculus;
mod embed;
mod families;
mod parse;

pub use calculus::*;
pub use embed::{count_embeddings, is_faithful, tracking_report, TrackingReport};
pub use families::{derived_families, Family, FamilyMember};
pub use parse::{parse_structure, ParseError};

use thiserror::Error;

/// Most vertices a structure may have (vertex sets are 64-bit masks).
pub const MAX_VERTICES: usize = 64;
/// Most non-anchor vertices accepted by subset enumeration.
pub const ENUMERATION_GUARD: usize = 16;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StructureError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("structure has {0} vertices, more than {MAX_VERTICES}")]
    TooManyVertices(usize),
    #[error("{0} non-anchor vertices exceed the enumeration guard of {ENUMERATION_GUARD}")]
    GuardExceeded(usize),
    #[error("pair {0}-{1} is both an edge and an open edge")]
    EdgeAndOpen(String, String),
    #[error("invalid pair {0}-{1}")]
    BadPair(usize, usize),
    #[error("anchor map is not injective")]
    NotInjective,
    #[error("anchor map has {got} images for {want} anchor vertices")]
    AnchorArity { got: usize, want: usize },
    #[error("vertex {0} is outside the graph")]
    VertexOutOfRange(usize),
    #[error("tracking time is zero, so c(F,A) and g_{{F,A}} are undefined")]
    ZeroTrackingTime,
}

#[inline]
fn bit(v: usize) -> u64 {
    1u64 << v
}

#[inline]
fn ones(x: u64) -> usize {
    x.count_ones() as usize
}

/// Iterates the set bits of a mask in ascending order.
fn mask_iter(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(v)
        }
    })
}

/// All sub-masks of `m`, including `0` and `m` itself.
fn submasks(m: u64) -> impl Iterator<Item = u64> {
    let mut s = Some(m);
    std::iter::from_fn(move || {
        let cur = s?;
        s = if cur == 0 { None } else { Some((cur - 1) & m) };
        Some(cur)
    })
}

/// A labelled structure with edges `E` and open edges `O`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GraphStructure {
    names: Vec<String>,
    e_adj: Vec<u64>,
    o_adj: Vec<u64>,
}

impl GraphStructure {
    pub fn new(names: Vec<String>) -> Result<Self, StructureError> {
        if names.len() > MAX_VERTICES {
            return Err(StructureError::TooManyVertices(names.len()));
        }
        let k = names.len();
        Ok(GraphStructure {
            names,
            e_adj: vec![0; k],
            o_adj: vec![0; k],
        })
    }

    /// Builds a structure on vertices `0..k` named by their indices.
    pub fn from_pairs(
        k: usize,
        edges: &[(usize, usize)],
        open: &[(usize, usize)],
    ) -> Result<Self, StructureError> {
        let mut s = Self::new((0..k).map(|i| i.to_string()).collect())?;
        for &(a, b) in edges {
            s.add_edge(a, b)?;
        }
        for &(a, b) in open {
            s.add_open(a, b)?;
        }
        Ok(s)
    }

    fn check(&self, a: usize, b: usize) -> Result<(), StructureError> {
        if a == b || a >= self.len() || b >= self.len() {
            return Err(StructureError::BadPair(a, b));
        }
        Ok(())
    }

    pub fn add_edge(&mut self, a: usize, b: usize) -> Result<(), StructureError> {
        self.check(a, b)?;
        if self.is_open(a, b) {
            return Err(StructureError::EdgeAndOpen(self.names[a].clone(), self.names[b].clone()));
        }
        self.e_adj[a] |= bit(b);
        self.e_adj[b] |= bit(a);
        Ok(())
    }

    pub fn add_open(&mut self, a: usize, b: usize) -> Result<(), StructureError> {
        self.check(a, b)?;
        if self.is_edge(a, b) {
            return Err(StructureError::EdgeAndOpen(self.names[a].clone(), self.names[b].clone()));
        }
        self.o_adj[a] |= bit(b);
        self.o_adj[b] |= bit(a);
        Ok(())
    }

    /// Adds a vertex and returns its index.
    pub fn add_vertex(&mut self, name: String) -> Result<usize, StructureError> {
        if self.len() == MAX_VERTICES {
            return Err(StructureError::TooManyVertices(MAX_VERTICES + 1));
        }
        self.names.push(name);
        self.e_adj.push(0);
        self.o_adj.push(0);
        Ok(self.len() - 1)
    }

    /// Turns an edge into an open edge.
    fn edge_to_open(&mut self, a: usize, b: usize) {
        self.e_adj[a] &= !bit(b);
        self.e_adj[b] &= !bit(a);
        self.o_adj[a] |= bit(b);
        self.o_adj[b] |= bit(a);
    }

    /// Adds `{a, b}` as an edge, removing it from the open edges if present.
    fn force_edge(&mut self, a: usize, b: usize) {
        self.o_adj[a] &= !bit(b);
        self.o_adj[b] &= !bit(a);
        self.e_adj[a] |= bit(b);
        self.e_adj[b] |= bit(a);
    }

    /// Deletes every edge and open edge with both ends in `mask`.
    fn clear_inside(&mut self, mask: u64) {
        for v in mask_iter(mask) {
            self.e_adj[v] &= !mask;
            self.o_adj[v] &= !mask;
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn is_edge(&self, a: usize, b: usize) -> bool {
        self.e_adj[a] & bit(b) != 0
    }

    pub fn is_open(&self, a: usize, b: usize) -> bool {
        self.o_adj[a] & bit(b) != 0
    }

    pub fn full_mask(&self) -> u64 {
        if self.len() == 64 {
            u64::MAX
        } else {
            bit(self.len()) - 1
        }
    }

    /// Edges with both ends in `mask`.
    pub fn edges_in(&self, mask: u64) -> usize {
        mask_iter(mask).map(|v| ones(self.e_adj[v] & mask)).sum::<usize>() / 2
    }

    /// Open edges with both ends in `mask`.
    pub fn open_in(&self, mask: u64) -> usize {
        mask_iter(mask).map(|v| ones(self.o_adj[v] & mask)).sum::<usize>() / 2
    }

    pub fn edge_count(&self) -> usize {
        self.edges_in(self.full_mask())
    }

    pub fn open_count(&self) -> usize {
        self.open_in(self.full_mask())
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.pairs(&self.e_adj)
    }

    pub fn open_edges(&self) -> Vec<(usize, usize)> {
        self.pairs(&self.o_adj)
    }

    fn pairs(&self, adj: &[u64]) -> Vec<(usize, usize)> {
        (0..self.len())
            .flat_map(|a| mask_iter(adj[a]).filter(move |&b| b > a).map(move |b| (a, b)))
            .collect()
    }

    pub(crate) fn e_row(&self, v: usize) -> u64 {
        self.e_adj[v]
    }

    pub(crate) fn o_row(&self, v: usize) -> u64 {
        self.o_adj[v]
    }

    /// Every triangle of `E ∪ O` contains at least two open edges.
    pub fn is_permissible(&self) -> bool {
        let k = self.len();
        for a in 0..k {
            let na = self.e_adj[a] | self.o_adj[a];
            for b in mask_iter(na).filter(|&b| b > a) {
                let common = na & (self.e_adj[b] | self.o_adj[b]);
                for c in mask_iter(common).filter(|&c| c > b) {
                    let open = [(a, b), (a, c), (b, c)]
                        .iter()
                        .filter(|&&(x, y)| self.is_open(x, y))
                        .count();
                    if open < 2 {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn pair_list(&self, pairs: &[(usize, usize)]) -> String {
        pairs
            .iter()
            .map(|&(a, b)| format!("{}-{}", self.names[a], self.names[b]))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// A structure together with an anchor set `A`, stored hat-restricted: no
/// edge or open edge lies inside `A`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AnchoredPair {
    structure: GraphStructure,
    anchor: u64,
}

/// `(v, e, o)` of a structure relative to a sub-structure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Counts {
    pub v: i64,
    pub e: i64,
    pub o: i64,
}

impl Counts {
    pub fn minus(self, other: Counts) -> Counts {
        Counts {
            v: self.v - other.v,
            e: self.e - other.e,
            o: self.o - other.o,
        }
    }

    /// `2v − e`.
    pub fn excess(self) -> i64 {
        2 * self.v - self.e
    }
}

impl AnchoredPair {
    /// Applies the hat-restriction: edges and open edges inside `A` are removed.
    pub fn new(mut structure: GraphStructure, anchor: u64) -> Self {
        let anchor = anchor & structure.full_mask();
        structure.clear_inside(anchor);
        AnchoredPair { structure, anchor }
    }

    pub fn from_names(structure: GraphStructure, anchor: &[usize]) -> Self {
        let mask = anchor.iter().fold(0u64, |m, &v| m | bit(v));
        Self::new(structure, mask)
    }

    pub fn structure(&self) -> &GraphStructure {
        &self.structure
    }

    pub fn anchor_mask(&self) -> u64 {
        self.anchor
    }

    pub fn anchor(&self) -> Vec<usize> {
        mask_iter(self.anchor).collect()
    }

    pub fn full_mask(&self) -> u64 {
        self.structure.full_mask()
    }

    /// `v_A(F)`.
    pub fn v_a(&self) -> usize {
        self.structure.len() - ones(self.anchor)
    }

    pub fn e(&self) -> usize {
        self.structure.edge_count()
    }

    pub fn o(&self) -> usize {
        self.structure.open_count()
    }

    /// Counts of the induced sub-structure on `mask` (which contains `A`).
    pub fn counts(&self, mask: u64) -> Counts {
        Counts {
            v: ones(mask & !self.anchor) as i64,
            e: self.structure.edges_in(mask) as i64,
            o: self.structure.open_in(mask) as i64,
        }
    }

    pub fn total(&self) -> Counts {
        self.counts(self.full_mask())
    }

    /// The pair `(F[outer], inner)`, hat-restricted at `inner`.
    pub fn sub_pair(&self, inner: u64, outer: u64) -> AnchoredPair {
        let keep: Vec<usize> = mask_iter(outer).collect();
        let names = keep.iter().map(|&v| self.structure.names[v].clone()).collect();
        let mut s = GraphStructure::new(names).expect("subset of a valid structure");
        let mut new_anchor = 0;
        for (i, &a) in keep.iter().enumerate() {
            if inner & bit(a) != 0 {
                new_anchor |= bit(i);
            }
            for (j, &b) in keep.iter().enumerate().skip(i + 1) {
                if self.structure.is_edge(a, b) {
                    s.force_edge(i, j);
                } else if self.structure.is_open(a, b) {
                    s.o_adj[i] |= bit(j);
                    s.o_adj[j] |= bit(i);
                }
            }
        }
        AnchoredPair::new(s, new_anchor)
    }

    fn guard(&self) -> Result<(), StructureError> {
        if self.v_a() > ENUMERATION_GUARD {
            return Err(StructureError::GuardExceeded(self.v_a()));
        }
        Ok(())
    }

    /// All vertex masks `H` with `base ⊆ H ⊆ V(F)`.
    pub(crate) fn supersets(&self, base: u64) -> impl Iterator<Item = u64> {
        let free = self.full_mask() & !base;
        submasks(free).map(move |s| s | base)
    }

    /// Canonical text form.
    pub fn to_text(&self) -> String {
        let s = &self.structure;
        let anchor: Vec<&str> = mask_iter(self.anchor).map(|v| s.names[v].as_str()).collect();
        format!(
            "v: {}\nA: {}\nE: {}\nO: {}\n",
            s.names.join(" "),
            anchor.join(" "),
            s.pair_list(&s.edges()),
            s.pair_list(&s.open_edges())
        )
    }

    /// Names of the vertices in a mask.
    pub fn mask_names(&self, mask: u64) -> Vec<String> {
        mask_iter(mask).map(|v| self.structure.names[v].clone()).collect()
    }
}

/// A random permissible anchored pair with `anchor_size` anchor vertices
/// (named `a0, a1, …`) and `free` other vertices (`x0, x1, …`). Pairs are
/// offered as edges or open edges at random and downgraded when they would
/// break permissibility.
pub fn random_permissible_pair<R: rand::Rng>(rng: &mut R, anchor_size: usize, free: usize) -> AnchoredPair {
    let names = (0..anchor_size)
        .map(|i| format!("a{i}"))
        .chain((0..free).map(|i| format!("x{i}")))
        .collect();
    let mut s = GraphStructure::new(names).expect("small structure");
    let k = anchor_size + free;
    for i in 0..k {
        for j in (i + 1).max(anchor_size)..k {
            let roll: f64 = rng.random();
            let want_edge = roll < 0.3;
            if roll >= 0.7 {
                continue;
            }
            if want_edge {
                s.force_edge(i, j);
                if s.is_permissible() {
                    continue;
                }
                s.e_adj[i] &= !bit(j);
                s.e_adj[j] &= !bit(i);
            }
            s.o_adj[i] |= bit(j);
            s.o_adj[j] |= bit(i);
            if !s.is_permissible() {
                s.o_adj[i] &= !bit(j);
                s.o_adj[j] &= !bit(i);
            }
        }
    }
    AnchoredPair::new(s, (1u64 << anchor_size) - 1)
}
