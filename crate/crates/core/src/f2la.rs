//! Linear and quadratic algebra over F2.
//!
//! Vectors are bit-packed into `u64` words with bit `i` of the vector stored
//! at bit `i % 64` of word `i / 64`. Padding bits above `dim` are always zero,
//! so word-wise equality and ordering agree with the mathematical ones.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::error::{Error, Result};

const WORD_BITS: usize = 64;

fn words_for(dim: usize) -> usize {
    dim.div_ceil(WORD_BITS)
}

/// A fixed-dimension vector over F2.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct F2Vector {
    dim: usize,
    words: Vec<u64>,
}

impl F2Vector {
    pub fn zeros(dim: usize) -> Self {
        F2Vector {
            dim,
            words: vec![0; words_for(dim)],
        }
    }

    /// The `i`-th standard basis vector (0-based).
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.set(i, true);
        v
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(dim: usize, ones: I) -> Self {
        let mut v = Self::zeros(dim);
        for i in ones {
            v.flip(i);
        }
        v
    }

    /// Low bit of `value` becomes entry 0. Bits at or above `dim` must be clear.
    pub fn from_u64(dim: usize, value: u64) -> Result<Self> {
        if dim < 64 && value >> dim != 0 {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: 64 - value.leading_zeros() as usize,
            });
        }
        let mut v = Self::zeros(dim);
        if dim > 0 {
            v.words[0] = value;
        }
        Ok(v)
    }

    /// Parses a string of `0`/`1` characters, entry 0 first.
    pub fn from_bit_str(s: &str) -> Option<Self> {
        let mut v = Self::zeros(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => v.set(i, true),
                _ => return None,
            }
        }
        Some(v)
    }

    /// Parses the lowercase-hex encoding produced by [`F2Vector::to_hex`].
    pub fn from_hex(dim: usize, s: &str) -> Option<Self> {
        let mut v = Self::zeros(dim);
        for (pos, c) in s.chars().rev().enumerate() {
            let nibble = c.to_digit(16)? as u64;
            for b in 0..4 {
                if nibble >> b & 1 == 1 {
                    let i = pos * 4 + b;
                    if i >= dim {
                        return None;
                    }
                    v.set(i, true);
                }
            }
        }
        Some(v)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// The vector as an integer, if it fits in one word.
    pub fn as_u64(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.dim, "bit {i} out of range for dimension {}", self.dim);
        self.words[i / WORD_BITS] >> (i % WORD_BITS) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.dim, "bit {i} out of range for dimension {}", self.dim);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.dim, "bit {i} out of range for dimension {}", self.dim);
        self.words[i / WORD_BITS] ^= 1u64 << (i % WORD_BITS);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn lowest_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(k, w)| k * WORD_BITS + w.trailing_zeros() as usize)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut rest = w;
            core::iter::from_fn(move || {
                if rest == 0 {
                    None
                } else {
                    let b = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    Some(k * WORD_BITS + b)
                }
            })
        })
    }

    /// In-place addition. Panics if the dimensions differ.
    pub fn add_assign(&mut self, other: &F2Vector) {
        assert_eq!(self.dim, other.dim, "F2Vector dimension mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn checked_add(&self, other: &F2Vector) -> Result<F2Vector> {
        self.check_dim(other.dim)?;
        let mut out = self.clone();
        out.add_assign(other);
        Ok(out)
    }

    /// Standard coupling: parity of the common support. Panics on mismatch.
    pub fn dot(&self, other: &F2Vector) -> bool {
        assert_eq!(self.dim, other.dim, "F2Vector dimension mismatch");
        self.words
            .iter()
            .zip(&other.words)
            .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
            & 1
            == 1
    }

    pub fn check_dim(&self, expected: usize) -> Result<()> {
        if self.dim == expected {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected,
                found: self.dim,
            })
        }
    }

    /// Lowercase hex of the vector read as an integer (entry 0 is the least
    /// significant bit), zero-padded to `ceil(dim / 4)` digits.
    pub fn to_hex(&self) -> String {
        let ndigits = self.dim.div_ceil(4).max(1);
        let mut s = String::with_capacity(ndigits);
        for d in (0..ndigits).rev() {
            let mut nibble = 0u32;
            for b in 0..4 {
                let i = d * 4 + b;
                if i < self.dim && self.get(i) {
                    nibble |= 1 << b;
                }
            }
            s.push(core::char::from_digit(nibble, 16).unwrap());
        }
        s
    }

    /// Entries as `0`/`1` characters, entry 0 first.
    pub fn to_bit_string(&self) -> String {
        (0..self.dim)
            .map(|i| if self.get(i) { '1' } else { '0' })
            .collect()
    }
}

impl Ord for F2Vector {
    /// Numeric order of the vectors read as integers; shorter vectors first.
    fn cmp(&self, other: &Self) -> Ordering {
        self.dim
            .cmp(&other.dim)
            .then_with(|| self.words.iter().rev().cmp(other.words.iter().rev()))
    }
}

impl PartialOrd for F2Vector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for F2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F2Vector({})", self.to_bit_string())
    }
}

impl fmt::Display for F2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bit_string())
    }
}

/// Incrementally maintained reduced row echelon basis.
///
/// The pivot of a row is its lowest set index; every pivot column is clear in
/// all other rows. Rows are kept sorted by pivot.
#[derive(Clone, Debug)]
pub struct Echelon {
    dim: usize,
    rows: Vec<F2Vector>,
    pivots: Vec<usize>,
}

impl Echelon {
    pub fn new(dim: usize) -> Self {
        Echelon {
            dim,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn from_vectors<'a, I: IntoIterator<Item = &'a F2Vector>>(dim: usize, vs: I) -> Self {
        let mut e = Echelon::new(dim);
        for v in vs {
            e.insert(v.clone());
        }
        e
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[F2Vector] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn into_rows(self) -> Vec<F2Vector> {
        self.rows
    }

    /// `v` with every pivot coordinate cleared by subtracting basis rows.
    pub fn reduce(&self, v: &F2Vector) -> F2Vector {
        let mut out = v.clone();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if out.get(p) {
                out.add_assign(row);
            }
        }
        out
    }

    pub fn contains(&self, v: &F2Vector) -> bool {
        self.reduce(v).is_zero()
    }

    /// Adds `v` to the span. Returns `false` if it was already in it.
    pub fn insert(&mut self, v: F2Vector) -> bool {
        assert_eq!(v.dim(), self.dim, "Echelon dimension mismatch");
        let r = self.reduce(&v);
        let Some(p) = r.lowest_one() else {
            return false;
        };
        for row in &mut self.rows {
            if row.get(p) {
                row.add_assign(&r);
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(at, p);
        self.rows.insert(at, r);
        true
    }

    /// Coordinates of `v` in the row basis, if `v` lies in the span.
    pub fn coordinates(&self, v: &F2Vector) -> Option<Vec<bool>> {
        let mut rest = v.clone();
        let mut coords = vec![false; self.rows.len()];
        for (t, (row, &p)) in self.rows.iter().zip(&self.pivots).enumerate() {
            if rest.get(p) {
                coords[t] = true;
                rest.add_assign(row);
            }
        }
        rest.is_zero().then_some(coords)
    }
}

pub fn rank(vs: &[F2Vector]) -> usize {
    match vs.first() {
        None => 0,
        Some(v) => Echelon::from_vectors(v.dim(), vs).rank(),
    }
}

/// Alternating bilinear form over F2, stored by rows: row `i` is `<e_i, .>`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BilinearForm {
    dim: usize,
    rows: Vec<F2Vector>,
}

impl BilinearForm {
    pub fn zero(dim: usize) -> Self {
        BilinearForm {
            dim,
            rows: (0..dim).map(|_| F2Vector::zeros(dim)).collect(),
        }
    }

    /// Validates that the rows form a symmetric matrix with zero diagonal.
    pub fn from_rows(rows: Vec<F2Vector>) -> Result<Self> {
        let dim = rows.len();
        for (i, row) in rows.iter().enumerate() {
            row.check_dim(dim)?;
            if row.get(i) {
                return Err(Error::NotAlternating { row: i, col: i });
            }
            for j in row.iter_ones() {
                if !rows[j].get(i) {
                    return Err(Error::NotAlternating { row: i, col: j });
                }
            }
        }
        Ok(BilinearForm { dim, rows })
    }

    /// The form whose Gram matrix is the adjacency matrix of the given edges.
    pub fn from_edges(dim: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut form = Self::zero(dim);
        for &(u, v) in edges {
            if u >= dim || v >= dim {
                return Err(Error::IndexOutOfRange {
                    index: u.max(v) + 1,
                    max: dim,
                });
            }
            if u == v {
                return Err(Error::NotAlternating { row: u, col: v });
            }
            form.rows[u].set(v, true);
            form.rows[v].set(u, true);
        }
        Ok(form)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &F2Vector {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[F2Vector] {
        &self.rows
    }

    /// `L(x) = <x, .>` as a vector.
    pub fn apply(&self, x: &F2Vector) -> Result<F2Vector> {
        x.check_dim(self.dim)?;
        let mut out = F2Vector::zeros(self.dim);
        for i in x.iter_ones() {
            out.add_assign(&self.rows[i]);
        }
        Ok(out)
    }

    pub fn eval(&self, x: &F2Vector, y: &F2Vector) -> Result<bool> {
        y.check_dim(self.dim)?;
        Ok(self.apply(x)?.dot(y))
    }

    pub fn rank(&self) -> usize {
        rank(&self.rows)
    }

    /// Basis of the radical `{x : <x, y> = 0 for all y}`, in reduced echelon form.
    pub fn kernel_basis(&self) -> Vec<F2Vector> {
        let ech = Echelon::from_vectors(self.dim, &self.rows);
        let pivots = ech.pivots();
        let mut is_pivot = vec![false; self.dim];
        for &p in pivots {
            is_pivot[p] = true;
        }
        // The Gram matrix is symmetric, so its null space is the radical.
        let mut out = Echelon::new(self.dim);
        for f in (0..self.dim).filter(|&f| !is_pivot[f]) {
            let mut x = F2Vector::unit(self.dim, f);
            for (row, &p) in ech.rows().iter().zip(pivots) {
                if row.get(f) {
                    x.set(p, true);
                }
            }
            out.insert(x);
        }
        out.into_rows()
    }
}

/// Order in which [`QuadraticSpace::symplectic_reduce_with`] scans candidates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PivotOrder {
    LowestFirst,
    HighestFirst,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymplecticBasis {
    /// Hyperbolic pairs `(e_i, f_i)` with `<e_i, f_i> = 1`.
    pub pairs: Vec<(F2Vector, F2Vector)>,
    /// A basis of the radical.
    pub kernel: Vec<F2Vector>,
}

impl SymplecticBasis {
    /// Checks the pairing table and that the members form a basis.
    pub fn is_valid_for(&self, form: &BilinearForm) -> bool {
        let mut members: Vec<&F2Vector> = Vec::new();
        for (e, f) in &self.pairs {
            members.push(e);
            members.push(f);
        }
        members.extend(self.kernel.iter());
        if members.len() != form.dim() || members.iter().any(|v| v.dim() != form.dim()) {
            return false;
        }
        if Echelon::from_vectors(form.dim(), members.iter().copied()).rank() != form.dim() {
            return false;
        }
        let partner = |a: usize| -> Option<usize> {
            if a < 2 * self.pairs.len() {
                Some(a ^ 1)
            } else {
                None
            }
        };
        for a in 0..members.len() {
            let la = form.apply(members[a]).expect("dimension checked");
            for (b, mb) in members.iter().enumerate() {
                let expected = partner(a) == Some(b);
                if la.dot(mb) != expected {
                    return false;
                }
            }
        }
        true
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ArfClass {
    Arf0,
    Arf1,
    /// `q` takes both values on the radical; no Arf invariant.
    KernelNonzero,
}

impl ArfClass {
    pub fn name(self) -> &'static str {
        match self {
            ArfClass::Arf0 => "Arf0",
            ArfClass::Arf1 => "Arf1",
            ArfClass::KernelNonzero => "KernelNonzero",
        }
    }
}

impl fmt::Display for ArfClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Largest dimension accepted by [`QuadraticSpace::value_counts_brute`].
pub const BRUTE_FORCE_MAX_DIM: usize = 30;

/// Largest dimension for which value counts fit the `u128` results.
pub const CLOSED_FORM_MAX_DIM: usize = 126;

/// A quadratic function refining an alternating form, given by its values on
/// the standard basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticSpace {
    form: BilinearForm,
    basis_values: F2Vector,
    upper: Vec<F2Vector>,
    kernel: Vec<F2Vector>,
    m: usize,
}

impl QuadraticSpace {
    pub fn new(form: BilinearForm, basis_values: F2Vector) -> Result<Self> {
        basis_values.check_dim(form.dim())?;
        let dim = form.dim();
        let upper = form
            .rows()
            .iter()
            .enumerate()
            .map(|(i, row)| F2Vector::from_indices(dim, row.iter_ones().filter(|&j| j > i)))
            .collect();
        let kernel = form.kernel_basis();
        let m = (dim - kernel.len()) / 2;
        Ok(QuadraticSpace {
            form,
            basis_values,
            upper,
            kernel,
            m,
        })
    }

    /// The space with `q = 1` on every standard basis vector.
    pub fn with_unit_values(form: BilinearForm) -> Self {
        let dim = form.dim();
        let ones = F2Vector::from_indices(dim, 0..dim);
        Self::new(form, ones).expect("dimensions agree")
    }

    pub fn dim(&self) -> usize {
        self.form.dim()
    }

    pub fn form(&self) -> &BilinearForm {
        &self.form
    }

    pub fn basis_values(&self) -> &F2Vector {
        &self.basis_values
    }

    pub fn kernel_basis(&self) -> &[F2Vector] {
        &self.kernel
    }

    pub fn kappa(&self) -> usize {
        self.kernel.len()
    }

    /// Half the rank of the form.
    pub fn m(&self) -> usize {
        self.m
    }

    /// `q(x) = sum_i x_i q(e_i) + sum_{i<j} x_i x_j <e_i, e_j>`.
    pub fn q_eval(&self, x: &F2Vector) -> Result<bool> {
        x.check_dim(self.dim())?;
        let mut acc = self.basis_values.dot(x);
        for i in x.iter_ones() {
            acc ^= self.upper[i].dot(x);
        }
        Ok(acc)
    }

    pub fn symplectic_reduce(&self) -> SymplecticBasis {
        self.symplectic_reduce_with(PivotOrder::LowestFirst)
    }

    /// Gram-Schmidt style extraction of hyperbolic pairs from the standard
    /// basis, scanning candidates in the given order.
    pub fn symplectic_reduce_with(&self, order: PivotOrder) -> SymplecticBasis {
        let dim = self.dim();
        let mut pool: Vec<F2Vector> = match order {
            PivotOrder::LowestFirst => (0..dim).map(|i| F2Vector::unit(dim, i)).collect(),
            PivotOrder::HighestFirst => (0..dim).rev().map(|i| F2Vector::unit(dim, i)).collect(),
        };
        let mut pairs = Vec::new();
        loop {
            let images: Vec<F2Vector> = pool
                .iter()
                .map(|v| self.form.apply(v).expect("pool vectors have the form's dimension"))
                .collect();
            let found = (0..pool.len()).find_map(|a| {
                (0..pool.len())
                    .find(|&b| images[a].dot(&pool[b]))
                    .map(|b| (a, b))
            });
            let Some((a, b)) = found else { break };
            let (lu, lv) = (images[a].clone(), images[b].clone());
            let (u, v) = (pool[a].clone(), pool[b].clone());
            let mut rest = Vec::with_capacity(pool.len() - 2);
            for (t, mut w) in pool.into_iter().enumerate() {
                if t == a || t == b {
                    continue;
                }
                let wu = lu.dot(&w);
                let wv = lv.dot(&w);
                if wv {
                    w.add_assign(&u);
                }
                if wu {
                    w.add_assign(&v);
                }
                rest.push(w);
            }
            pool = rest;
            pairs.push((u, v));
        }
        SymplecticBasis {
            pairs,
            kernel: pool,
        }
    }

    pub fn arf(&self) -> ArfClass {
        self.arf_in(&self.symplectic_reduce())
    }

    /// Arf class computed from a caller-supplied symplectic basis.
    pub fn arf_in(&self, basis: &SymplecticBasis) -> ArfClass {
        let q = |v: &F2Vector| self.q_eval(v).expect("basis vectors have the space's dimension");
        // q is additive on the radical, so checking a basis suffices.
        if basis.kernel.iter().any(&q) {
            return ArfClass::KernelNonzero;
        }
        let arf = basis
            .pairs
            .iter()
            .fold(false, |acc, (e, f)| acc ^ (q(e) & q(f)));
        if arf {
            ArfClass::Arf1
        } else {
            ArfClass::Arf0
        }
    }

    /// `(|q^-1(0)|, |q^-1(1)|)` from `m`, `kappa` and the Arf class.
    pub fn value_counts_closed(&self) -> Result<(u128, u128)> {
        if self.dim() > CLOSED_FORM_MAX_DIM {
            return Err(Error::OrderTooLarge {
                n: self.dim(),
                max: CLOSED_FORM_MAX_DIM,
            });
        }
        Ok(closed_value_counts(self.m, self.kappa(), self.arf()))
    }

    /// Exact value counts by evaluating `q` on every vector (Gray-code walk).
    pub fn value_counts_brute(&self) -> Result<(u128, u128)> {
        let dim = self.dim();
        if dim > BRUTE_FORCE_MAX_DIM {
            return Err(Error::StateSpaceTooLarge {
                dim,
                limit: BRUTE_FORCE_MAX_DIM,
                bytes: 0,
            });
        }
        let rows: Vec<u64> = self
            .form
            .rows()
            .iter()
            .map(|r| r.as_u64().expect("dim <= 30"))
            .collect();
        let values = self.basis_values.as_u64().expect("dim <= 30");
        let mut x = 0u64;
        let mut q = false;
        let mut ones: u128 = 0;
        for step in 1..(1u64 << dim) {
            let i = step.trailing_zeros() as usize;
            // q(x + e_i) = q(x) + q(e_i) + <x, e_i>
            q ^= (values >> i & 1 == 1) ^ ((rows[i] & x).count_ones() & 1 == 1);
            x ^= 1 << i;
            ones += q as u128;
        }
        let total = 1u128 << dim;
        Ok((total - ones, ones))
    }
}

/// Value counts of a quadratic function with the given invariants.
pub fn closed_value_counts(m: usize, kappa: usize, class: ArfClass) -> (u128, u128) {
    // Doubled to keep the exponents 2m+kappa-1 and m+kappa-1 integral at m = kappa = 0.
    let big2 = 1u128 << (2 * m + kappa);
    let small2 = 1u128 << (m + kappa);
    match class {
        ArfClass::Arf1 => ((big2 - small2) / 2, (big2 + small2) / 2),
        ArfClass::Arf0 => ((big2 + small2) / 2, (big2 - small2) / 2),
        ArfClass::KernelNonzero => (big2 / 2, big2 / 2),
    }
}

/// Symplectic transvection `x -> x + <x, delta> delta`.
pub fn transvect(form: &BilinearForm, delta: &F2Vector, x: &F2Vector) -> Result<F2Vector> {
    delta.check_dim(form.dim())?;
    let mut out = x.clone();
    if form.eval(x, delta)? {
        out.add_assign(delta);
    }
    Ok(out)
}
