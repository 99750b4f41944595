//! Transvection groups built from a graph.
//!
//! A graph on `V` vertices gives `F2^V` the alternating form
//! `<e_u, e_v> = 1` iff `u ~ v`, and the quadratic function `q` with value one
//! on every vertex. A subset `B` of vertices generates the group of
//! transvections `T_b(x) = x + <x, b> b`, `b` in `B`.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::f2la::{BilinearForm, Echelon, F2Vector, QuadraticSpace};
use crate::orbits::{
    Bitmap, Enumerable, MaskAction, OrbitCensus, OrbitRecord, OrbitType, SpecDescriptor,
};
use crate::tri;

/// Largest dimension for which the closure of `B` is searched.
pub const CLOSURE_MAX_DIM: usize = 30;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    vertex_count: usize,
    edges: BTreeSet<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    labels: Option<Vec<String>>,
}

impl Graph {
    /// Edges are unordered; duplicates are merged.
    pub fn new(vertex_count: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut set = BTreeSet::new();
        for &(u, v) in edges {
            if u >= vertex_count || v >= vertex_count {
                return Err(Error::InvalidGraph(format!(
                    "edge {u}-{v} is out of range for {vertex_count} vertices"
                )));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {u}")));
            }
            set.insert((u.min(v), u.max(v)));
        }
        let mut adjacency = vec![Vec::new(); vertex_count];
        for &(u, v) in &set {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for ns in &mut adjacency {
            ns.sort_unstable();
        }
        Ok(Graph {
            vertex_count,
            edges: set,
            adjacency,
            labels: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.vertex_count {
            return Err(Error::DimensionMismatch {
                expected: self.vertex_count,
                found: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// The triangular lattice graph on the entries of `T^{n-1}`, labelled by
    /// 1-based `(i,j)`.
    pub fn hex(n: usize) -> Result<Self> {
        let h = tri::hex_graph(n)?;
        let labels = h
            .shape()
            .entries()
            .map(|(i, j)| format!("({i},{j})"))
            .collect();
        Graph::new(h.vertex_count(), &h.edges())?.with_labels(labels)
    }

    /// Path of five vertices with a pendant vertex at the middle one.
    pub fn e6() -> Self {
        Graph::new(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (2, 5)]).expect("valid")
    }

    pub fn path(len: usize) -> Self {
        let edges: Vec<_> = (1..len).map(|v| (v - 1, v)).collect();
        Graph::new(len, &edges).expect("valid")
    }

    pub fn complete(len: usize) -> Self {
        let edges: Vec<_> = (0..len)
            .flat_map(|u| (u + 1..len).map(move |v| (u, v)))
            .collect();
        Graph::new(len, &edges).expect("valid")
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    pub fn label(&self, v: usize) -> String {
        match &self.labels {
            Some(ls) => ls[v].clone(),
            None => format!("{v}"),
        }
    }

    pub fn is_connected(&self) -> bool {
        if self.vertex_count == 0 {
            return true;
        }
        let mut seen = vec![false; self.vertex_count];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &v in &self.adjacency[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// The subgraph induced on `vertices`, renumbered in the given order.
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let edges: Vec<_> = (0..vertices.len())
            .flat_map(|a| (a + 1..vertices.len()).map(move |b| (a, b)))
            .filter(|&(a, b)| self.adjacent(vertices[a], vertices[b]))
            .collect();
        Graph::new(vertices.len(), &edges).expect("valid")
    }

    pub fn form(&self) -> BilinearForm {
        let edges: Vec<_> = self.edges().collect();
        BilinearForm::from_edges(self.vertex_count, &edges).expect("graph has no loops")
    }

    /// Some induced subgraph isomorphic to the E6 tree, as
    /// `[centre, a1, a2, b1, b2, c1]` (arms `a`, `b` of length two, `c` of one).
    pub fn find_e6(&self) -> Option<[usize; 6]> {
        for c in 0..self.vertex_count {
            let ns = &self.adjacency[c];
            if ns.len() < 3 {
                continue;
            }
            for (ia, &a1) in ns.iter().enumerate() {
                for &b1 in &ns[ia + 1..] {
                    if self.adjacent(a1, b1) {
                        continue;
                    }
                    for &c1 in ns {
                        if c1 == a1 || c1 == b1 || self.adjacent(c1, a1) || self.adjacent(c1, b1)
                        {
                            continue;
                        }
                        let core = [c, a1, b1, c1];
                        for &a2 in &self.adjacency[a1] {
                            if core.contains(&a2) || !self.only_adjacent_to(a2, &core, a1) {
                                continue;
                            }
                            for &b2 in &self.adjacency[b1] {
                                if core.contains(&b2)
                                    || b2 == a2
                                    || self.adjacent(a2, b2)
                                    || !self.only_adjacent_to(b2, &core, b1)
                                {
                                    continue;
                                }
                                return Some([c, a1, a2, b1, b2, c1]);
                            }
                        }
                    }
                }
            }
        }
        None
    }

    /// `v` is adjacent to `keep` and to no other vertex of `set`.
    fn only_adjacent_to(&self, v: usize, set: &[usize], keep: usize) -> bool {
        set.iter().all(|&u| (u == keep) == self.adjacent(u, v))
    }
}

/// Whether some induced subgraph is isomorphic to the E6 tree.
pub fn contains_e6(graph: &Graph) -> bool {
    graph.find_e6().is_some()
}

/// A graph, a generating subset of its vertices, and the derived form and
/// quadratic function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeSpec {
    graph: Graph,
    basis_subset: Vec<usize>,
    form: BilinearForm,
    qspace: QuadraticSpace,
}

impl LatticeSpec {
    /// `basis_subset` is sorted and deduplicated.
    pub fn build(graph: Graph, basis_subset: &[usize]) -> Result<Self> {
        if basis_subset.is_empty() {
            return Err(Error::InvalidGraph(String::from("basis subset is empty")));
        }
        if let Some(&v) = basis_subset.iter().find(|&&v| v >= graph.vertex_count()) {
            return Err(Error::InvalidGraph(format!(
                "basis vertex {v} is out of range for {} vertices",
                graph.vertex_count()
            )));
        }
        let subset: BTreeSet<usize> = basis_subset.iter().copied().collect();
        let form = graph.form();
        let qspace = QuadraticSpace::with_unit_values(form.clone());
        Ok(LatticeSpec {
            graph,
            basis_subset: subset.into_iter().collect(),
            form,
            qspace,
        })
    }

    /// `B` = all vertices.
    pub fn build_full(graph: Graph) -> Result<Self> {
        let all: Vec<usize> = (0..graph.vertex_count()).collect();
        Self::build(graph, &all)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn basis_subset(&self) -> &[usize] {
        &self.basis_subset
    }

    pub fn form(&self) -> &BilinearForm {
        &self.form
    }

    pub fn qspace(&self) -> &QuadraticSpace {
        &self.qspace
    }

    pub fn dim(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn is_full(&self) -> bool {
        self.basis_subset.len() == self.dim()
    }

    /// The graph induced on `B`.
    pub fn basis_graph(&self) -> Graph {
        self.graph.induced(&self.basis_subset)
    }

    pub fn descriptor(&self) -> SpecDescriptor {
        SpecDescriptor::Lattice {
            vertices: self.dim(),
            edges: self.graph.edge_count(),
            basis: self.basis_subset.len(),
        }
    }

    pub fn transvect(&self, b: usize, x: &F2Vector) -> Result<F2Vector> {
        crate::f2la::transvect(&self.form, &F2Vector::unit(self.dim(), b), x)
    }

    fn packed_generators(&self) -> Result<Vec<(u64, u64)>> {
        if self.dim() > 64 {
            return Err(Error::OrderTooLarge {
                n: self.dim(),
                max: 64,
            });
        }
        Ok(self
            .basis_subset
            .iter()
            .map(|&b| {
                let row = self.form.row(b).as_u64().expect("dim <= 64");
                (row, 1u64 << b)
            })
            .collect())
    }
}

impl Enumerable for LatticeSpec {
    fn mask_action(&self) -> Result<MaskAction> {
        crate::orbits::check_guard(self.dim())?;
        MaskAction::new(self.descriptor(), self.dim(), self.packed_generators()?, None)
    }
}

/// The union of the orbits of the vertices of `B`.
#[derive(Clone, Debug)]
pub struct DeltaClosure {
    dim: usize,
    members: Bitmap,
    size: u64,
    single_orbit: bool,
}

impl DeltaClosure {
    pub fn len(&self) -> u64 {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    /// True iff every vertex of `B` lies in one orbit.
    pub fn single_orbit(&self) -> bool {
        self.single_orbit
    }

    pub fn contains(&self, x: &F2Vector) -> bool {
        x.dim() == self.dim && x.as_u64().is_some_and(|v| self.members.get(v))
    }

    pub fn iter(&self) -> impl Iterator<Item = F2Vector> + '_ {
        let dim = self.dim;
        self.members
            .words()
            .iter()
            .enumerate()
            .flat_map(|(w, &word)| {
                let mut bits = word;
                core::iter::from_fn(move || {
                    (bits != 0).then(|| {
                        let i = bits.trailing_zeros() as u64;
                        bits &= bits - 1;
                        ((w as u64) << 6) | i
                    })
                })
            })
            .map(move |v| F2Vector::from_u64(dim, v).expect("fits"))
    }
}

/// Orbits of the vertices of `B` under the group generated by `B`.
pub fn delta_closure(spec: &LatticeSpec) -> Result<DeltaClosure> {
    let dim = spec.dim();
    if dim > CLOSURE_MAX_DIM {
        return Err(Error::StateSpaceTooLarge {
            dim,
            limit: CLOSURE_MAX_DIM,
            bytes: 1u128 << dim.saturating_sub(3),
        });
    }
    let gens = spec.packed_generators()?;
    let mut members = Bitmap::new(1u64 << dim);
    let mut size = 0u64;
    let mut orbits = 0usize;
    let mut stack = Vec::new();
    for &b in spec.basis_subset() {
        let seed = 1u64 << b;
        if !members.insert(seed) {
            continue;
        }
        orbits += 1;
        size += 1;
        stack.push(seed);
        while let Some(x) = stack.pop() {
            for &(c, v) in &gens {
                if (c & x).count_ones() % 2 == 1 {
                    let y = x ^ v;
                    if members.insert(y) {
                        size += 1;
                        stack.push(y);
                    }
                }
            }
        }
    }
    Ok(DeltaClosure {
        dim,
        members,
        size,
        single_orbit: orbits == 1,
    })
}

/// The three defining conditions of a vanishing lattice, checked separately.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VanishingReport {
    /// The closure of `B` is a single orbit.
    pub orbit_ok: bool,
    /// The closure spans the whole space.
    pub generates_ok: bool,
    /// Two closure elements pair to one.
    pub pair_ok: bool,
}

impl VanishingReport {
    pub fn all(&self) -> bool {
        self.orbit_ok && self.generates_ok && self.pair_ok
    }
}

pub fn check_vanishing(spec: &LatticeSpec) -> Result<VanishingReport> {
    let closure = delta_closure(spec)?;
    let dim = spec.dim();
    let mut span = Echelon::new(dim);
    for v in closure.iter() {
        span.insert(v);
        if span.rank() == dim {
            break;
        }
    }
    // The closure spans the same space as B, and a form vanishing on a
    // spanning set vanishes on its span, so an edge inside B is equivalent.
    let b = spec.basis_subset();
    let pair_ok = b
        .iter()
        .any(|&u| b.iter().any(|&v| spec.graph().adjacent(u, v)));
    Ok(VanishingReport {
        orbit_ok: closure.single_orbit(),
        generates_ok: span.rank() == dim,
        pair_ok,
    })
}

/// Largest kernel dimension for which kernel points are listed one by one.
pub const PREDICTION_MAX_KAPPA: usize = 24;

/// The census forced on a nonspecial lattice: one singleton per kernel point
/// and the nonkernel zeros and ones of `q` as two further orbits.
///
/// Licensed only when `B` is every vertex, the graph is connected and it
/// contains an induced E6; anything else is refused rather than guessed.
pub fn predict_census_nonspecial(spec: &LatticeSpec) -> Result<OrbitCensus> {
    if !spec.is_full() {
        return Err(Error::NotLicensed(String::from(
            "the basis subset must contain every vertex",
        )));
    }
    if !spec.graph().is_connected() {
        return Err(Error::NotLicensed(String::from("the graph is not connected")));
    }
    if !contains_e6(&spec.basis_graph()) {
        return Err(Error::NotLicensed(String::from(
            "the basis graph has no induced E6 subgraph",
        )));
    }
    let dim = spec.dim();
    if dim > 63 {
        return Err(Error::OrderTooLarge { n: dim, max: 63 });
    }
    let q = spec.qspace();
    let kappa = q.kappa();
    if kappa > PREDICTION_MAX_KAPPA {
        return Err(Error::OrderTooLarge {
            n: kappa,
            max: PREDICTION_MAX_KAPPA,
        });
    }
    let kernel_basis: Vec<u64> = q
        .kernel_basis()
        .iter()
        .map(|v| v.as_u64().expect("dim <= 63"))
        .collect();
    let kernel: Vec<u64> = (0u64..1 << kappa)
        .map(|s| {
            kernel_basis
                .iter()
                .enumerate()
                .filter(|(t, _)| s >> t & 1 == 1)
                .fold(0, |acc, (_, &k)| acc ^ k)
        })
        .collect();
    let kernel_set: BTreeSet<u64> = kernel.iter().copied().collect();
    let qv = |x: u64| q.q_eval(&F2Vector::from_u64(dim, x).expect("fits")).expect("dim");
    let kernel_ones = kernel.iter().filter(|&&k| qv(k)).count() as u64;
    let kernel_zeros = kernel.len() as u64 - kernel_ones;
    let (zeros, ones) = q.value_counts_closed()?;

    let mut records: Vec<OrbitRecord> = kernel
        .iter()
        .map(|&k| OrbitRecord {
            representative: F2Vector::from_u64(dim, k).expect("fits"),
            cardinality: 1,
            height: None,
            label: Some(OrbitType::Kernel),
        })
        .collect();
    for (value, count, label) in [
        (false, zeros as u64 - kernel_zeros, OrbitType::Zeros),
        (true, ones as u64 - kernel_ones, OrbitType::Ones),
    ] {
        if count == 0 {
            continue;
        }
        let rep = (1u64..)
            .find(|&x| !kernel_set.contains(&x) && qv(x) == value)
            .expect("a nonkernel vector with this value exists");
        records.push(OrbitRecord {
            representative: F2Vector::from_u64(dim, rep).expect("fits"),
            cardinality: count,
            height: None,
            label: Some(label),
        });
    }
    Ok(OrbitCensus::new(spec.descriptor(), dim, 1u64 << dim, records))
}
