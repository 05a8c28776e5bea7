//! Closed index paths `i_0 … i_{2mp-1}` behind `Tr (X^m X^{*m})^p`.
//!
//! Position `j` carries the factor `X_{i_j i_{j+1}}` when its spin is `+`
//! and `X_{i_{j+1} i_j}` (from `X^*`) when it is `-`. Two positions carry
//! the same random variable iff their [`edge_class_key`]s agree.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

/// Largest `2mp` the enumerator accepts unless told otherwise.
pub const DEFAULT_SEARCH_BUDGET: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Spin {
    Plus,
    Minus,
}

/// `+` on the first `m` positions of every block of `2m`, `-` on the rest.
pub fn spin(j: usize, m: usize) -> Spin {
    if j % (2 * m) < m {
        Spin::Plus
    } else {
        Spin::Minus
    }
}

/// Distance (in `0..=m`) of position `j` from the nearest multiple of `2m`.
pub fn vertex_type(j: usize, m: usize) -> usize {
    let r = j % (2 * m);
    if r < m {
        r
    } else {
        2 * m - r
    }
}

/// A closed path of `2mp` positive indices; position `2mp` wraps to 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexPath {
    m: usize,
    p: usize,
    indices: Vec<u32>,
    canonical: bool,
}

impl IndexPath {
    pub fn new(m: usize, p: usize, indices: Vec<u32>) -> Result<Self> {
        if m == 0 {
            return Err(Error::MalformedPath("m must be positive".into()));
        }
        if indices.len() != 2 * m * p {
            return Err(Error::MalformedPath(format!(
                "expected {} indices for (m, p) = ({m}, {p}), got {}",
                2 * m * p,
                indices.len()
            )));
        }
        if indices.contains(&0) {
            return Err(Error::MalformedPath("indices are positive".into()));
        }
        let canonical = is_restricted_growth(&indices);
        Ok(Self {
            m,
            p,
            indices,
            canonical,
        })
    }

    /// The empty `(m, 0)` path.
    pub fn empty(m: usize) -> Self {
        Self {
            m,
            p: 0,
            indices: Vec::new(),
            canonical: true,
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical
    }

    /// Index at position `j`, reading position `2mp` as position 0.
    pub fn at(&self, j: usize) -> u32 {
        self.indices[j % self.indices.len()]
    }

    /// Relabels indices by order of first appearance: 1, 2, 3, …
    pub fn canonicalize(&self) -> Self {
        Self {
            m: self.m,
            p: self.p,
            indices: relabel(&self.indices),
            canonical: true,
        }
    }

    /// Number of distinct indices.
    pub fn distinct(&self) -> usize {
        let mut seen: Vec<u32> = self.indices.clone();
        seen.sort_unstable();
        seen.dedup();
        seen.len()
    }
}

impl fmt::Display for IndexPath {
    /// Interchange line: `m p i_0 … i_{2mp-1}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.m, self.p)?;
        for i in &self.indices {
            write!(f, " {i}")?;
        }
        Ok(())
    }
}

impl core::str::FromStr for IndexPath {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self> {
        let mut fields = line.split_whitespace().map(|t| {
            t.parse::<u64>()
                .map_err(|_| Error::MalformedPath(format!("not a decimal integer: `{t}`")))
        });
        let m = fields
            .next()
            .ok_or_else(|| Error::MalformedPath("missing m".into()))??;
        let p = fields
            .next()
            .ok_or_else(|| Error::MalformedPath("missing p".into()))??;
        let indices = fields
            .map(|r| r.and_then(|v| u32::try_from(v).map_err(|_| Error::MalformedPath("index too large".into()))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(m as usize, p as usize, indices)
    }
}

fn is_restricted_growth(indices: &[u32]) -> bool {
    let mut next = 1;
    for &i in indices {
        if i > next {
            return false;
        }
        if i == next {
            next += 1;
        }
    }
    true
}

pub(crate) fn relabel(indices: &[u32]) -> Vec<u32> {
    let mut map: BTreeMap<u32, u32> = BTreeMap::new();
    indices
        .iter()
        .map(|&i| {
            let fresh = map.len() as u32 + 1;
            *map.entry(i).or_insert(fresh)
        })
        .collect()
}

/// The matrix entry `(row, column)` that position `j` reads.
pub fn edge_class_key(j: usize, path: &IndexPath) -> Result<(u32, u32)> {
    if j >= path.len() {
        return Err(Error::PositionOutOfRange {
            position: j,
            len: path.len(),
        });
    }
    let (a, b) = (path.at(j), path.at(j + 1));
    Ok(match spin(j, path.m) {
        Spin::Plus => (a, b),
        Spin::Minus => (b, a),
    })
}

/// Vertices are index values, edges are equivalence classes of positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathGraph {
    /// Positions sharing label `v + 1`, ascending.
    vertex_classes: Vec<Vec<usize>>,
    /// Multiplicity `k_r` of each edge class, keyed by matrix entry.
    edge_classes: BTreeMap<(u32, u32), usize>,
}

impl PathGraph {
    pub fn build(path: &IndexPath) -> Result<Self> {
        if !path.is_canonical() {
            return Err(Error::NonCanonicalPath);
        }
        let labels = path.indices.iter().copied().max().unwrap_or(0) as usize;
        let mut vertex_classes = alloc::vec![Vec::new(); labels];
        for (j, &i) in path.indices.iter().enumerate() {
            vertex_classes[i as usize - 1].push(j);
        }
        let mut edge_classes = BTreeMap::new();
        for j in 0..path.len() {
            *edge_classes.entry(edge_class_key(j, path)?).or_insert(0) += 1;
        }
        Ok(Self {
            vertex_classes,
            edge_classes,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_classes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_classes.len()
    }

    pub fn vertex_classes(&self) -> &[Vec<usize>] {
        &self.vertex_classes
    }

    pub fn edge_classes(&self) -> &BTreeMap<(u32, u32), usize> {
        &self.edge_classes
    }

    pub fn multiplicities(&self) -> impl Iterator<Item = usize> + '_ {
        self.edge_classes.values().copied()
    }

    /// True when the undirected multigraph on the edge classes has no cycle.
    /// Self-loops and antiparallel classes count as cycles.
    pub fn is_acyclic(&self) -> bool {
        let mut parent: Vec<usize> = (0..self.vertex_count()).collect();
        fn find(parent: &mut [usize], mut v: usize) -> usize {
            while parent[v] != v {
                parent[v] = parent[parent[v]];
                v = parent[v];
            }
            v
        }
        for &(a, b) in self.edge_classes.keys() {
            let ra = find(&mut parent, a as usize - 1);
            let rb = find(&mut parent, b as usize - 1);
            if ra == rb {
                return false;
            }
            parent[ra] = rb;
        }
        true
    }
}

/// Named outcomes of the regularity checks for one path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularCertificate {
    pub path: IndexPath,
    pub vertices: usize,
    pub edges: usize,
    /// `V = mp + 1`.
    pub vertex_count_ok: bool,
    /// Every `k_r = 2`.
    pub class_sizes_ok: bool,
    /// `E = mp`.
    pub edge_count_ok: bool,
    pub acyclic: bool,
    /// Equal indices have equal [`vertex_type`].
    pub type_consistent: bool,
}

impl RegularCertificate {
    /// Regular iff `V = mp + 1` and all classes have size two.
    pub fn is_regular(&self) -> bool {
        self.vertex_count_ok && self.class_sizes_ok
    }

    /// Everything a regular path must also satisfy.
    pub fn is_fully_consistent(&self) -> bool {
        self.is_regular() && self.edge_count_ok && self.acyclic && self.type_consistent
    }
}

pub fn is_regular(path: &IndexPath, graph: &PathGraph) -> RegularCertificate {
    let (m, p) = (path.m, path.p);
    if p == 0 {
        return RegularCertificate {
            path: path.clone(),
            vertices: 0,
            edges: 0,
            vertex_count_ok: true,
            class_sizes_ok: true,
            edge_count_ok: true,
            acyclic: true,
            type_consistent: true,
        };
    }
    let type_consistent = graph.vertex_classes.iter().all(|class| {
        let t = vertex_type(class[0], m);
        class.iter().all(|&j| vertex_type(j, m) == t)
    });
    RegularCertificate {
        path: path.clone(),
        vertices: graph.vertex_count(),
        edges: graph.edge_count(),
        vertex_count_ok: graph.vertex_count() == m * p + 1,
        class_sizes_ok: graph.multiplicities().all(|k| k == 2),
        edge_count_ok: graph.edge_count() == m * p,
        acyclic: graph.is_acyclic(),
        type_consistent,
    }
}

/// Builds the graph and certifies a canonical path in one go.
pub fn certify(path: &IndexPath) -> Result<RegularCertificate> {
    let graph = PathGraph::build(path)?;
    Ok(is_regular(path, &graph))
}

/// The unique `(m, 1)`-regular path `1, 2, …, m+1, m, …, 2`.
pub fn unique_single_block(m: usize) -> IndexPath {
    let up = 1..=(m as u32 + 1);
    let down = (2..=m as u32).rev();
    IndexPath::new(m, 1, up.chain(down).collect()).expect("well-formed")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enumeration {
    pub m: usize,
    pub p: usize,
    /// Canonical regular paths in lexicographic order.
    pub paths: Vec<IndexPath>,
}

impl Enumeration {
    pub fn count(&self) -> usize {
        self.paths.len()
    }
}

/// Every canonical `(m, p)`-regular path, by pruned depth-first search
/// over restricted-growth strings.
pub fn enumerate_regular(m: usize, p: usize, budget: usize) -> Result<Enumeration> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be positive".into()));
    }
    let len = 2 * m * p;
    if len > budget {
        return Err(Error::BudgetExceeded {
            needed: len,
            budget,
        });
    }
    if p == 0 {
        return Ok(Enumeration {
            m,
            p,
            paths: alloc::vec![IndexPath::empty(m)],
        });
    }
    let mut search = Search::new(m, p);
    search.indices.push(1);
    search.run();
    let paths = search
        .found
        .into_iter()
        .map(|indices| IndexPath::new(m, p, indices).expect("search emits well-formed paths"))
        .collect();
    Ok(Enumeration { m, p, paths })
}

struct Search {
    m: usize,
    len: usize,
    max_labels: u32,
    indices: Vec<u32>,
    /// counts[a * stride + b] = multiplicity of class (a, b) so far.
    counts: Vec<u8>,
    stride: usize,
    open: usize,
    found: Vec<Vec<u32>>,
}

impl Search {
    fn new(m: usize, p: usize) -> Self {
        let max_labels = (m * p + 1) as u32;
        let stride = max_labels as usize + 1;
        Self {
            m,
            len: 2 * m * p,
            max_labels,
            indices: Vec::with_capacity(2 * m * p),
            counts: alloc::vec![0; stride * stride],
            stride,
            open: 0,
            found: Vec::new(),
        }
    }

    fn key(&self, j: usize, a: u32, b: u32) -> usize {
        let (r, c) = match spin(j, self.m) {
            Spin::Plus => (a, b),
            Spin::Minus => (b, a),
        };
        r as usize * self.stride + c as usize
    }

    /// Adds the edge at position `j` from `a` to `b`; false if a class
    /// would exceed multiplicity two.
    fn push_edge(&mut self, j: usize, a: u32, b: u32) -> bool {
        let k = self.key(j, a, b);
        self.counts[k] += 1;
        match self.counts[k] {
            1 => self.open += 1,
            2 => self.open -= 1,
            _ => {}
        }
        self.counts[k] <= 2
    }

    fn pop_edge(&mut self, j: usize, a: u32, b: u32) {
        let k = self.key(j, a, b);
        match self.counts[k] {
            1 => self.open -= 1,
            2 => self.open += 1,
            _ => {}
        }
        self.counts[k] -= 1;
    }

    fn run(&mut self) {
        let placed = self.indices.len();
        let labels = *self.indices.iter().max().expect("starts with label 1");
        if placed == self.len {
            let (last, first) = (self.indices[placed - 1], self.indices[0]);
            if self.push_edge(placed - 1, last, first) && self.open == 0 && labels == self.max_labels {
                self.found.push(self.indices.clone());
            }
            self.pop_edge(placed - 1, last, first);
            return;
        }
        let prev = self.indices[placed - 1];
        let top = (labels + 1).min(self.max_labels);
        for next in 1..=top {
            let fits = self.push_edge(placed - 1, prev, next);
            let labels_now = labels.max(next);
            // Edges still to come: positions placed..len-1 inclusive of the
            // closing one.
            let edges_left = self.len - placed;
            let positions_left = self.len - placed - 1;
            let feasible = fits
                && self.open <= edges_left
                && (labels_now as usize) + positions_left >= self.max_labels as usize;
            if feasible {
                self.indices.push(next);
                self.run();
                self.indices.pop();
            }
            self.pop_edge(placed - 1, prev, next);
        }
    }
}
