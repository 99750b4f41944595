//! Exhaustive orbit enumeration.
//!
//! Every action handled here is generated by involutions of the form
//! `x -> x + (c . x) v`. Such a generator moves `x` only inside `x + W`, where
//! `W` is spanned by the flip vectors `v`, so the state space splits into
//! `2^(d-r)` cosets of `W` (`r = dim W`) that are searched independently.
//!
//! Inside a coset `C + W` a state is written `x = C + sum_t a_t w_t`, where
//! `w_t` is a reduced echelon basis of `W` with highest-bit pivots and `C` is
//! zero on the pivots. The local coordinate `a` is an `r`-bit integer, and the
//! map `a -> x` is order-preserving, so a coset needs a `2^r`-bit visited map
//! and the smallest local coordinate in an orbit gives its smallest state. In
//! local coordinates a generator becomes `a -> a + (c' . a + b) v'` with
//! `c'_t = c . w_t`, `v'` the coordinates of `v` and `b = c . C`.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::actions::{ActionKind, ActionSpec, Height};
use crate::error::{Error, Result};
use crate::f2la::F2Vector;

/// Largest state dimension the enumerator accepts (a 32 MiB visited bitmap).
pub const ENUMERATION_MAX_DIM: usize = 28;

/// Above this frontier size a search switches from a queue to bitmap sweeps.
const QUEUE_LIMIT: usize = 1 << 22;

/// Checks `dim` against [`ENUMERATION_MAX_DIM`].
pub fn check_guard(dim: usize) -> Result<()> {
    if dim <= ENUMERATION_MAX_DIM {
        return Ok(());
    }
    let bytes = 1u128
        .checked_shl(dim.saturating_sub(3) as u32)
        .filter(|_| dim < 131)
        .unwrap_or(u128::MAX);
    Err(Error::StateSpaceTooLarge {
        dim,
        limit: ENUMERATION_MAX_DIM,
        bytes,
    })
}

/// Names the action a census belongs to.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SpecDescriptor {
    Action { n: usize, kind: ActionKind },
    Lattice { vertices: usize, edges: usize, basis: usize },
}

impl SpecDescriptor {
    pub fn n(&self) -> Option<usize> {
        match self {
            SpecDescriptor::Action { n, .. } => Some(*n),
            SpecDescriptor::Lattice { .. } => None,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            SpecDescriptor::Action { kind, .. } => kind.name(),
            SpecDescriptor::Lattice { .. } => "lattice",
        }
    }
}

impl fmt::Display for SpecDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpecDescriptor::Action { n, kind } => write!(f, "{kind} n={n}"),
            SpecDescriptor::Lattice {
                vertices,
                edges,
                basis,
            } => write!(f, "lattice V={vertices} E={edges} B={basis}"),
        }
    }
}

/// Orbit type names used by the closed-form censuses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OrbitType {
    Trivial,
    Standard,
    Type1,
    Type2,
    Type3,
    Type4,
    Type5,
    /// A point of the kernel of a lattice form.
    Kernel,
    /// The nonkernel zeros of the quadratic function.
    Zeros,
    /// The nonkernel ones of the quadratic function.
    Ones,
}

impl OrbitType {
    pub fn name(self) -> &'static str {
        match self {
            OrbitType::Trivial => "trivial",
            OrbitType::Standard => "standard",
            OrbitType::Type1 => "type1",
            OrbitType::Type2 => "type2",
            OrbitType::Type3 => "type3",
            OrbitType::Type4 => "type4",
            OrbitType::Type5 => "type5",
            OrbitType::Kernel => "kernel",
            OrbitType::Zeros => "q0",
            OrbitType::Ones => "q1",
        }
    }
}

impl fmt::Display for OrbitType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitRecord {
    /// Numerically smallest member (low index = low bit).
    pub representative: F2Vector,
    pub cardinality: u64,
    pub height: Option<Height>,
    pub label: Option<OrbitType>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitCensus {
    pub descriptor: SpecDescriptor,
    pub dim: usize,
    /// Size of the enumerated region (the whole space or one stratum).
    pub total_states: u64,
    /// Sorted by `(height, representative)`.
    pub records: Vec<OrbitRecord>,
}

impl OrbitCensus {
    /// Sorts the records into canonical order.
    pub fn new(
        descriptor: SpecDescriptor,
        dim: usize,
        total_states: u64,
        mut records: Vec<OrbitRecord>,
    ) -> Self {
        records.sort_by(|a, b| {
            (&a.height, &a.representative).cmp(&(&b.height, &b.representative))
        });
        OrbitCensus {
            descriptor,
            dim,
            total_states,
            records,
        }
    }

    pub fn orbit_count(&self) -> usize {
        self.records.len()
    }

    pub fn cardinality_sum(&self) -> u64 {
        self.records.iter().map(|r| r.cardinality).sum()
    }

    /// Cardinality -> number of orbits of that size.
    pub fn cardinality_multiset(&self) -> BTreeMap<u64, usize> {
        let mut out = BTreeMap::new();
        for r in &self.records {
            *out.entry(r.cardinality).or_insert(0) += 1;
        }
        out
    }

    /// Records grouped by height (records without a height are skipped).
    pub fn by_height(&self) -> BTreeMap<Height, Vec<&OrbitRecord>> {
        let mut out: BTreeMap<Height, Vec<&OrbitRecord>> = BTreeMap::new();
        for r in &self.records {
            if let Some(h) = &r.height {
                out.entry(h.clone()).or_default().push(r);
            }
        }
        out
    }

    /// Record whose representative is `state`.
    pub fn find(&self, representative: &F2Vector) -> Option<&OrbitRecord> {
        self.records
            .iter()
            .find(|r| &r.representative == representative)
    }
}

/// Anything that can be turned into a mask action.
pub trait Enumerable {
    fn mask_action(&self) -> Result<MaskAction>;
}

impl Enumerable for ActionSpec {
    fn mask_action(&self) -> Result<MaskAction> {
        MaskAction::from_action(self)
    }
}

impl Enumerable for MaskAction {
    fn mask_action(&self) -> Result<MaskAction> {
        Ok(self.clone())
    }
}

/// Generators and height functionals packed into `u64` words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaskAction {
    descriptor: SpecDescriptor,
    dim: usize,
    gens: Vec<(u64, u64)>,
    heights: Option<Vec<u64>>,
}

fn pack(v: &F2Vector) -> u64 {
    v.as_u64().expect("dimension checked by caller")
}

impl MaskAction {
    /// `gens` are `(condition, flip)` pairs with `condition . flip = 0`.
    pub fn new(
        descriptor: SpecDescriptor,
        dim: usize,
        gens: Vec<(u64, u64)>,
        heights: Option<Vec<u64>>,
    ) -> Result<Self> {
        check_guard(dim)?;
        let full = if dim == 64 { u64::MAX } else { (1u64 << dim) - 1 };
        for &(c, v) in &gens {
            if (c | v) & !full != 0 {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: 64 - (c | v).leading_zeros() as usize,
                });
            }
            if (c & v).count_ones() % 2 == 1 {
                return Err(Error::InvalidGraph(String::from(
                    "generator is not an involution",
                )));
            }
        }
        Ok(MaskAction {
            descriptor,
            dim,
            gens,
            heights,
        })
    }

    pub fn from_action(spec: &ActionSpec) -> Result<Self> {
        check_guard(spec.state_dim())?;
        let gens = spec
            .masks()
            .iter()
            .map(|m| (pack(&m.condition), pack(&m.flip)))
            .collect();
        let heights = spec
            .height_functionals()
            .map(|fs| fs.iter().map(pack).collect());
        MaskAction::new(
            SpecDescriptor::Action {
                n: spec.n(),
                kind: spec.kind(),
            },
            spec.state_dim(),
            gens,
            heights,
        )
    }

    pub fn descriptor(&self) -> &SpecDescriptor {
        &self.descriptor
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[(u64, u64)] {
        &self.gens
    }

    pub fn height_len(&self) -> Option<usize> {
        self.heights.as_ref().map(Vec::len)
    }

    #[inline]
    pub fn apply(&self, g: usize, x: u64) -> u64 {
        let (c, v) = self.gens[g];
        x ^ (v & parity_mask(x & c))
    }

    pub fn height(&self, x: u64) -> Option<Height> {
        self.heights.as_ref().map(|hs| {
            Height::from_bits(&hs.iter().map(|h| (h & x).count_ones() % 2 == 1).collect::<Vec<_>>())
        })
    }

    fn height_bits(&self, x: u64) -> Option<u64> {
        self.heights.as_ref().map(|hs| {
            hs.iter()
                .enumerate()
                .fold(0u64, |acc, (i, h)| acc | ((((h & x).count_ones() & 1) as u64) << i))
        })
    }

    fn record(&self, rep: u64, cardinality: u64) -> OrbitRecord {
        OrbitRecord {
            representative: F2Vector::from_u64(self.dim, rep).expect("state fits"),
            cardinality,
            height: self.height(rep),
            label: None,
        }
    }

    fn total_states(&self) -> u64 {
        1u64 << self.dim
    }
}

/// All ones if `x` has odd weight, else zero.
#[inline(always)]
fn parity_mask(x: u64) -> u64 {
    ((x.count_ones() & 1) as u64).wrapping_neg()
}

/// A generator in the local coordinates of one coset.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct LocalGen {
    pub cond: u64,
    pub flip: u64,
    /// All ones or all zeros.
    pub bias: u64,
}

impl LocalGen {
    #[inline(always)]
    pub fn apply(&self, a: u64) -> u64 {
        a ^ (self.flip & (parity_mask(a & self.cond) ^ self.bias))
    }
}

/// The coset decomposition of a mask action.
#[derive(Clone, Debug)]
pub struct CosetPlan {
    action: MaskAction,
    basis: Vec<u64>,
    pivots: Vec<u32>,
    free_mask: u64,
    expand_tables: Vec<[u64; 256]>,
}

impl CosetPlan {
    pub fn new(action: MaskAction) -> Self {
        // Reduced echelon form with highest-bit pivots.
        let mut rows: Vec<u64> = Vec::new();
        for &(c, v) in &action.gens {
            if c == 0 {
                continue;
            }
            let mut v = v;
            for &r in &rows {
                let p = 63 - r.leading_zeros();
                if v >> p & 1 == 1 {
                    v ^= r;
                }
            }
            if v == 0 {
                continue;
            }
            let p = 63 - v.leading_zeros();
            for r in rows.iter_mut() {
                if *r >> p & 1 == 1 {
                    *r ^= v;
                }
            }
            rows.push(v);
        }
        rows.sort_by_key(|r| 63 - r.leading_zeros());
        let pivots: Vec<u32> = rows.iter().map(|r| 63 - r.leading_zeros()).collect();
        let pivot_mask = pivots.iter().fold(0u64, |m, &p| m | 1 << p);
        let full = if action.dim == 64 {
            u64::MAX
        } else {
            (1u64 << action.dim) - 1
        };
        let expand_tables = rows
            .chunks(8)
            .map(|chunk| {
                let mut table = [0u64; 256];
                for (byte, slot) in table.iter_mut().enumerate() {
                    *slot = chunk
                        .iter()
                        .enumerate()
                        .filter(|(t, _)| byte >> t & 1 == 1)
                        .fold(0, |acc, (_, &w)| acc ^ w);
                }
                table
            })
            .collect();
        if let Some(hs) = &action.heights {
            for h in hs {
                assert!(
                    rows.iter().all(|w| (h & w).count_ones() % 2 == 0),
                    "height functional is not constant on cosets"
                );
            }
        }
        CosetPlan {
            action,
            basis: rows,
            pivots,
            free_mask: full & !pivot_mask,
            expand_tables,
        }
    }

    pub fn action(&self) -> &MaskAction {
        &self.action
    }

    /// `dim W`.
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn coset_size(&self) -> u64 {
        1u64 << self.rank()
    }

    pub fn coset_count(&self) -> u64 {
        1u64 << (self.action.dim - self.rank())
    }

    /// Label of coset number `u`: the bits of `u` spread over the non-pivots.
    pub fn coset_label(&self, u: u64) -> u64 {
        let mut out = 0;
        let mut free = self.free_mask;
        let mut u = u;
        while free != 0 && u != 0 {
            let bit = free & free.wrapping_neg();
            if u & 1 == 1 {
                out |= bit;
            }
            u >>= 1;
            free ^= bit;
        }
        out
    }

    /// `(label, local coordinate)` of a state.
    pub fn split(&self, x: u64) -> (u64, u64) {
        let a = self
            .pivots
            .iter()
            .enumerate()
            .fold(0u64, |acc, (t, &p)| acc | (x >> p & 1) << t);
        (x ^ self.expand(a), a)
    }

    #[inline]
    pub fn expand(&self, a: u64) -> u64 {
        self.expand_tables
            .iter()
            .enumerate()
            .fold(0, |acc, (k, table)| acc ^ table[(a >> (8 * k)) as usize & 0xff])
    }

    #[inline]
    pub fn to_state(&self, label: u64, a: u64) -> u64 {
        label ^ self.expand(a)
    }

    /// Height bits of a coset (all states of a coset share a height).
    pub fn coset_height(&self, label: u64) -> Option<Height> {
        self.action.height(label)
    }

    /// The generators acting on coset `label`, with identities and duplicates
    /// removed.
    pub fn local_generators(&self, label: u64) -> Vec<LocalGen> {
        let mut out: Vec<LocalGen> = self
            .action
            .gens
            .iter()
            .filter(|(c, _)| *c != 0)
            .map(|&(c, v)| {
                let cond = self
                    .basis
                    .iter()
                    .enumerate()
                    .fold(0u64, |acc, (t, &w)| acc | (((c & w).count_ones() & 1) as u64) << t);
                let (rest, flip) = self.split(v);
                debug_assert_eq!(rest, 0);
                LocalGen {
                    cond,
                    flip,
                    bias: parity_mask(c & label),
                }
            })
            .filter(|g| g.cond != 0 || g.bias != 0)
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// Orbits of one coset, as `(smallest state, cardinality)`.
    pub fn enumerate_coset(&self, u: u64) -> Vec<(u64, u64)> {
        let label = self.coset_label(u);
        let gens = self.local_generators(label);
        let size = self.coset_size();
        let mut visited = Bitmap::new(size);
        let mut search = Search::default();
        let mut out = Vec::new();
        let mut seed = 0u64;
        while let Some(s) = visited.next_clear(seed) {
            let (min, count) = search.orbit(&gens, &mut visited, s);
            out.push((self.to_state(label, min), count));
            seed = s + 1;
        }
        out
    }

    /// Orbit of a single state, as `(smallest state, cardinality)`.
    pub fn orbit_of(&self, x: u64) -> (u64, u64) {
        let (label, a) = self.split(x);
        let gens = self.local_generators(label);
        let mut visited = Bitmap::new(self.coset_size());
        let (min, count) = Search::default().orbit(&gens, &mut visited, a);
        (self.to_state(label, min), count)
    }
}

/// Dense bitmap over `0..len`.
#[derive(Clone, Debug)]
pub struct Bitmap {
    words: Vec<u64>,
    len: u64,
}

impl Bitmap {
    pub fn new(len: u64) -> Self {
        Bitmap {
            words: vec![0; len.div_ceil(64) as usize],
            len,
        }
    }

    #[inline(always)]
    pub fn get(&self, i: u64) -> bool {
        self.words[(i >> 6) as usize] >> (i & 63) & 1 == 1
    }

    /// Sets bit `i`, returning whether it was clear before.
    #[inline(always)]
    pub fn insert(&mut self, i: u64) -> bool {
        let w = &mut self.words[(i >> 6) as usize];
        let bit = 1u64 << (i & 63);
        let fresh = *w & bit == 0;
        *w |= bit;
        fresh
    }

    #[inline(always)]
    pub fn remove(&mut self, i: u64) {
        self.words[(i >> 6) as usize] &= !(1u64 << (i & 63));
    }

    /// Smallest clear index `>= from`.
    pub fn next_clear(&self, from: u64) -> Option<u64> {
        if from >= self.len {
            return None;
        }
        let mut w = (from >> 6) as usize;
        let mut word = !self.words[w] & (u64::MAX << (from & 63));
        loop {
            if word != 0 {
                let i = ((w as u64) << 6) | word.trailing_zeros() as u64;
                return (i < self.len).then_some(i);
            }
            w += 1;
            if w == self.words.len() {
                return None;
            }
            word = !self.words[w];
        }
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }
}

/// Reusable search state for one worker.
#[derive(Default)]
struct Search {
    queue: Vec<u64>,
    pending: Option<Bitmap>,
}

impl Search {
    /// Marks the orbit of `seed` in `visited`; returns its smallest local
    /// coordinate and its size.
    fn orbit(&mut self, gens: &[LocalGen], visited: &mut Bitmap, seed: u64) -> (u64, u64) {
        visited.insert(seed);
        self.queue.clear();
        self.queue.push(seed);
        let mut head = 0;
        let mut min = seed;
        let mut count = 1u64;
        while head < self.queue.len() {
            if self.queue.len() - head > QUEUE_LIMIT {
                return self.sweep(gens, visited, head, min, count);
            }
            let a = self.queue[head];
            head += 1;
            for g in gens {
                let b = g.apply(a);
                if visited.insert(b) {
                    count += 1;
                    min = min.min(b);
                    self.queue.push(b);
                }
            }
            if head >= 1 << 16 && head * 2 >= self.queue.len() {
                self.queue.drain(..head);
                head = 0;
            }
        }
        (min, count)
    }

    /// Finishes a search whose frontier outgrew the queue by repeated passes
    /// over a bitmap of pending states.
    fn sweep(
        &mut self,
        gens: &[LocalGen],
        visited: &mut Bitmap,
        head: usize,
        mut min: u64,
        mut count: u64,
    ) -> (u64, u64) {
        let len = visited.len;
        let pending = self.pending.get_or_insert_with(|| Bitmap::new(len));
        if pending.len != len {
            *pending = Bitmap::new(len);
        }
        for &a in &self.queue[head..] {
            pending.insert(a);
        }
        self.queue.clear();
        let mut active = true;
        while active {
            active = false;
            for w in 0..pending.words.len() {
                while pending.words[w] != 0 {
                    let bits = core::mem::take(&mut pending.words[w]);
                    active = true;
                    let mut bits = bits;
                    while bits != 0 {
                        let a = ((w as u64) << 6) | bits.trailing_zeros() as u64;
                        bits &= bits - 1;
                        for g in gens {
                            let b = g.apply(a);
                            if visited.insert(b) {
                                count += 1;
                                min = min.min(b);
                                pending.insert(b);
                            }
                        }
                    }
                }
            }
        }
        (min, count)
    }
}

fn census_from_cosets(
    plan: &CosetPlan,
    cosets: impl Iterator<Item = u64>,
    total_states: u64,
) -> OrbitCensus {
    let action = plan.action();
    let records = cosets
        .flat_map(|u| plan.enumerate_coset(u))
        .map(|(rep, card)| action.record(rep, card))
        .collect();
    OrbitCensus::new(action.descriptor.clone(), action.dim, total_states, records)
}

/// Full orbit census of `spec`.
pub fn enumerate<S: Enumerable + ?Sized>(spec: &S) -> Result<OrbitCensus> {
    let plan = CosetPlan::new(spec.mask_action()?);
    let total = plan.action().total_states();
    Ok(census_from_cosets(&plan, 0..plan.coset_count(), total))
}

/// Coset numbers whose height equals `height`.
pub fn stratum_cosets(plan: &CosetPlan, height: &Height) -> Result<Vec<u64>> {
    let action = plan.action();
    let expected = action.height_len().ok_or(Error::NoHeights(
        match action.descriptor {
            SpecDescriptor::Action { kind, .. } => kind.name(),
            SpecDescriptor::Lattice { .. } => "lattice",
        },
    ))?;
    if height.len() != expected {
        return Err(Error::HeightLength {
            expected,
            found: height.len(),
        });
    }
    let target = (0..expected).fold(0u64, |acc, i| acc | (height.get(i + 1) as u64) << i);
    Ok((0..plan.coset_count())
        .filter(|&u| action.height_bits(plan.coset_label(u)) == Some(target))
        .collect())
}

/// Census of the states of the given height.
pub fn enumerate_stratum<S: Enumerable + ?Sized>(spec: &S, height: &Height) -> Result<OrbitCensus> {
    let plan = CosetPlan::new(spec.mask_action()?);
    let cosets = stratum_cosets(&plan, height)?;
    let total = cosets.len() as u64 * plan.coset_size();
    Ok(census_from_cosets(&plan, cosets.into_iter(), total))
}

/// The orbit containing `state`.
pub fn orbit_of<S: Enumerable + ?Sized>(spec: &S, state: &F2Vector) -> Result<OrbitRecord> {
    let action = spec.mask_action()?;
    action_orbit_of(&CosetPlan::new(action), state)
}

pub fn action_orbit_of(plan: &CosetPlan, state: &F2Vector) -> Result<OrbitRecord> {
    let action = plan.action();
    state.check_dim(action.dim)?;
    let (rep, card) = plan.orbit_of(pack(state));
    Ok(action.record(rep, card))
}

/// Builds a census from per-coset results produced elsewhere (for example by
/// a parallel driver); `cosets` lists the coset numbers covered.
pub fn assemble(plan: &CosetPlan, cosets: usize, orbits: Vec<(u64, u64)>) -> OrbitCensus {
    let action = plan.action();
    let records = orbits
        .into_iter()
        .map(|(rep, card)| action.record(rep, card))
        .collect();
    OrbitCensus::new(
        action.descriptor.clone(),
        action.dim,
        cosets as u64 * plan.coset_size(),
        records,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actions::ActionKind::*;

    fn census(n: usize, kind: ActionKind) -> OrbitCensus {
        enumerate(&ActionSpec::new(n, kind).unwrap()).unwrap()
    }

    #[test]
    fn small_first_action_counts() {
        let c = census(2, First);
        assert_eq!(c.orbit_count(), 6);
        assert_eq!(
            c.cardinality_multiset().into_iter().collect::<Vec<_>>(),
            [(1, 4), (2, 2)]
        );
        assert_eq!(census(1, First).orbit_count(), 2);
        assert_eq!(census(3, First).orbit_count(), 20);
        assert_eq!(census(4, First).orbit_count(), 52);
    }

    #[test]
    fn second_action_n5() {
        let c = census(5, Second);
        let mut sizes: Vec<u64> = c.records.iter().map(|r| r.cardinality).collect();
        sizes.sort();
        assert_eq!(sizes, [1, 120, 135, 256, 256, 256]);
    }

    #[test]
    fn representatives_are_orbit_minima() {
        let spec = ActionSpec::new(4, First).unwrap();
        let action = spec.mask_action().unwrap();
        let c = enumerate(&spec).unwrap();
        // brute-force orbit labels by repeated relaxation to the minimum
        let d = action.dim();
        let mut best: Vec<u64> = (0..1u64 << d).collect();
        loop {
            let mut changed = false;
            for x in 0..1u64 << d {
                for g in 0..action.generators().len() {
                    let y = action.apply(g, x) as usize;
                    let m = best[x as usize].min(best[y]);
                    if best[x as usize] != m || best[y] != m {
                        best[x as usize] = m;
                        best[y] = m;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let mut expected: BTreeMap<u64, u64> = BTreeMap::new();
        for &b in &best {
            *expected.entry(b).or_insert(0) += 1;
        }
        let got: BTreeMap<u64, u64> = c
            .records
            .iter()
            .map(|r| (r.representative.as_u64().unwrap(), r.cardinality))
            .collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn stratum_examples_n5() {
        let spec = ActionSpec::new(5, First).unwrap();
        let zero = enumerate_stratum(&spec, &Height::zeros(5)).unwrap();
        let mut sizes: Vec<u64> = zero.records.iter().map(|r| r.cardinality).collect();
        sizes.sort();
        assert_eq!(sizes, [1, 1, 1, 1, 480, 540]);
        let h = Height::from_bits(&[true, false, false, false, false]);
        let c = enumerate_stratum(&spec, &h).unwrap();
        assert_eq!(c.records.iter().map(|r| r.cardinality).collect::<Vec<_>>(), [512, 512]);
        assert!(matches!(
            enumerate_stratum(&spec, &Height::zeros(4)),
            Err(Error::HeightLength { .. })
        ));
        let conj = ActionSpec::new(5, FirstConjugate).unwrap();
        assert!(matches!(
            enumerate_stratum(&conj, &Height::zeros(5)),
            Err(Error::NoHeights(_))
        ));
    }

    #[test]
    fn orbit_of_examples() {
        let spec = ActionSpec::new(5, First).unwrap();
        let zero = orbit_of(&spec, &F2Vector::zeros(15)).unwrap();
        assert_eq!(zero.cardinality, 1);
        let e1 = crate::tri::pattern_e(5, 1).unwrap();
        assert_eq!(orbit_of(&spec, e1.data()).unwrap().cardinality, 1);
        let second = ActionSpec::new(5, Second).unwrap();
        let x = F2Vector::unit(10, 0);
        let rec = orbit_of(&second, &x).unwrap();
        assert!(rec.height.as_ref().is_some_and(|h| !h.0.is_zero()));
        assert_eq!(rec.cardinality, 256);
    }

    #[test]
    fn guard_refuses_large_spaces() {
        let spec = ActionSpec::new(9, First).unwrap();
        match enumerate(&spec) {
            Err(Error::StateSpaceTooLarge { dim, limit, bytes }) => {
                assert_eq!((dim, limit), (45, 28));
                assert_eq!(bytes, 1u128 << 42);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bitmap_next_clear() {
        let mut b = Bitmap::new(130);
        for i in 0..70 {
            b.insert(i);
        }
        assert_eq!(b.next_clear(0), Some(70));
        b.remove(3);
        assert_eq!(b.next_clear(0), Some(3));
        for i in 70..130 {
            b.insert(i);
        }
        assert_eq!(b.next_clear(4), None);
    }
}
