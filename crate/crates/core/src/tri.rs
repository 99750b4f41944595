//! Upper-triangular F2 matrices, the pattern families that span the
//! invariants and dual invariants of the two actions, the triangular-lattice
//! graph on matrix entries, and the linear maps between orders `n` and `n-1`.
//!
//! All `(i, j)` coordinates are 1-based with `i <= j`. Entries are flattened
//! row by row: `(1,1), (1,2), .., (1,n), (2,2), .., (n,n)`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::f2la::{BilinearForm, Echelon, F2Vector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TriShape {
    n: usize,
}

impl TriShape {
    pub fn new(n: usize) -> Self {
        TriShape { n }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.n * (self.n + 1) / 2
    }

    pub fn contains(&self, i: isize, j: isize) -> bool {
        1 <= i && i <= j && j <= self.n as isize
    }

    /// Flat position of entry `(i, j)`. Panics outside the shape.
    pub fn index(&self, i: usize, j: usize) -> usize {
        assert!(
            1 <= i && i <= j && j <= self.n,
            "entry ({i},{j}) outside T^{}",
            self.n
        );
        (i - 1) * self.n - (i - 1) * (i.saturating_sub(2)) / 2 + (j - i)
    }

    pub fn checked_index(&self, i: isize, j: isize) -> Option<usize> {
        self.contains(i, j).then(|| self.index(i as usize, j as usize))
    }

    /// Inverse of [`TriShape::index`].
    pub fn coords(&self, index: usize) -> (usize, usize) {
        assert!(index < self.dim(), "index {index} outside T^{}", self.n);
        let mut rest = index;
        let mut i = 1;
        while rest >= self.n + 1 - i {
            rest -= self.n + 1 - i;
            i += 1;
        }
        (i, i + rest)
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize)> {
        let n = self.n;
        (1..=n).flat_map(move |i| (i..=n).map(move |j| (i, j)))
    }

    /// Flat indices of the in-shape neighbours of `(i, j)` in the triangular
    /// lattice: `(i-1,j-1), (i-1,j), (i,j-1), (i,j+1), (i+1,j), (i+1,j+1)`.
    pub fn neighbors(&self, i: usize, j: usize) -> impl Iterator<Item = usize> + '_ {
        const OFFSETS: [(isize, isize); 6] = [(-1, -1), (-1, 0), (0, -1), (0, 1), (1, 0), (1, 1)];
        let (i, j) = (i as isize, j as isize);
        OFFSETS
            .iter()
            .filter_map(move |&(di, dj)| self.checked_index(i + di, j + dj))
    }
}

/// An element of `T^n(F2)` or of its dual; both use the same flattening.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TriMatrix {
    shape: TriShape,
    data: F2Vector,
}

impl TriMatrix {
    pub fn zeros(n: usize) -> Self {
        let shape = TriShape::new(n);
        TriMatrix {
            shape,
            data: F2Vector::zeros(shape.dim()),
        }
    }

    pub fn from_data(n: usize, data: F2Vector) -> Result<Self> {
        let shape = TriShape::new(n);
        data.check_dim(shape.dim())?;
        Ok(TriMatrix { shape, data })
    }

    pub fn from_entries<I: IntoIterator<Item = (usize, usize)>>(n: usize, ones: I) -> Self {
        let mut m = Self::zeros(n);
        for (i, j) in ones {
            m.set(i, j, true);
        }
        m
    }

    pub fn shape(&self) -> TriShape {
        self.shape
    }

    pub fn order(&self) -> usize {
        self.shape.order()
    }

    pub fn data(&self) -> &F2Vector {
        &self.data
    }

    pub fn into_data(self) -> F2Vector {
        self.data
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data.get(self.shape.index(i, j))
    }

    /// Reads `(i, j)`, treating entries outside the shape as zero.
    pub fn get_or_zero(&self, i: isize, j: isize) -> bool {
        self.shape
            .checked_index(i, j)
            .is_some_and(|k| self.data.get(k))
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        let k = self.shape.index(i, j);
        self.data.set(k, value);
    }

    pub fn ones(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.data.iter_ones().map(|k| self.shape.coords(k))
    }

    /// Standard coupling `(M, M') = sum m_ij m'_ij`.
    pub fn couple(&self, other: &TriMatrix) -> Result<bool> {
        other.data.check_dim(self.data.dim())?;
        Ok(self.data.dot(&other.data))
    }

    pub fn add(&self, other: &TriMatrix) -> Result<TriMatrix> {
        Ok(TriMatrix {
            shape: self.shape,
            data: self.data.checked_add(&other.data)?,
        })
    }

    /// Text grid, one matrix row per line, lower triangle indented.
    pub fn grid(&self) -> String {
        let n = self.order();
        let mut out = String::new();
        for i in 1..=n {
            for j in 1..=n {
                if j > 1 {
                    out.push(' ');
                }
                out.push(if j < i {
                    ' '
                } else if self.get(i, j) {
                    '1'
                } else {
                    '0'
                });
            }
            out.truncate(out.trim_end().len());
            out.push('\n');
        }
        out
    }
}

impl fmt::Debug for TriMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TriMatrix(n={}, {})", self.order(), self.data)
    }
}

fn check_pattern_index(i: usize, max: usize) -> Result<()> {
    if (1..=max).contains(&i) {
        Ok(())
    } else {
        Err(Error::IndexOutOfRange { index: i, max })
    }
}

/// `E_i`: ones on the `i`-th diagonal (`i = 1` is the main diagonal).
pub fn pattern_e(n: usize, i: usize) -> Result<TriMatrix> {
    check_pattern_index(i, n)?;
    Ok(TriMatrix::from_entries(n, (1..=n + 1 - i).map(|j| (j, j + i - 1))))
}

/// `R_i`: the rectangle formed by rows `1..=i` and the last `n + 1 - i`
/// columns, i.e. columns `i..=n`.
pub fn pattern_r(n: usize, i: usize) -> Result<TriMatrix> {
    check_pattern_index(i, n)?;
    Ok(TriMatrix::from_entries(
        n,
        (1..=i).flat_map(|a| (i..=n).map(move |b| (a, b))),
    ))
}

/// `k = floor(n / 2)`, the number of dual invariants of the second action.
pub fn second_rank(n: usize) -> usize {
    n / 2
}

/// `P_i` over `T^{n-1}`, built from corner triangles and alternating
/// hexagonal layers.
///
/// For `N = n - 1` each entry has lattice distances `d1 = a - 1` (to the first
/// row), `d2 = N - b` (to the last column) and `d3 = b - a` (to the diagonal),
/// with `d1 + d2 + d3 = N - 1`. The `i x i` corner triangles are the entries
/// with some distance `>= N - i`; the hexagon `chi^t` keeps every distance in
/// `[t - 1, N - i - t]`, and exists only for `t <= min(i + 1, n - 2i - 1)`.
pub fn pattern_p(n: usize, i: usize) -> Result<TriMatrix> {
    if n < 2 {
        return Err(Error::OrderTooSmall { n, min: 2 });
    }
    let k = second_rank(n);
    check_pattern_index(i, k)?;
    let big_n = n - 1;
    let shape = TriShape::new(big_n);
    if i == k {
        return Ok(TriMatrix::from_entries(big_n, shape.entries()));
    }
    let depth = (i + 1).min(n - 2 * i - 1);
    let in_chi = |t: usize, d: [usize; 3]| -> bool {
        t <= depth && d.iter().all(|&x| x + 1 >= t && x + i + t <= big_n)
    };
    let ones = shape.entries().filter(|&(a, b)| {
        let d = [a - 1, big_n - b, b - a];
        if d.iter().any(|&x| x + i >= big_n) {
            return true;
        }
        (1..=depth / 2).any(|j| in_chi(2 * j, d) && !in_chi(2 * j + 1, d))
    });
    Ok(TriMatrix::from_entries(big_n, ones))
}

/// `~P_i = P_i + P_{i-1}` with `P_0 = 0`.
pub fn pattern_ptilde(n: usize, i: usize) -> Result<TriMatrix> {
    let p = pattern_p(n, i)?;
    if i == 1 {
        Ok(p)
    } else {
        p.add(&pattern_p(n, i - 1)?)
    }
}

/// All `P_1..P_k`, certified to be a basis of the radical of the neighbour
/// form on `T^{n-1}` and to agree with [`ptilde_from_heights`].
pub fn p_patterns(n: usize) -> Result<Vec<TriMatrix>> {
    let k = second_rank(n);
    let ps = (1..=k)
        .map(|i| pattern_p(n, i))
        .collect::<Result<Vec<_>>>()?;
    let graph = hex_graph(n)?;
    let form = graph.form();
    for (idx, p) in ps.iter().enumerate() {
        if !form.apply(p.data())?.is_zero() {
            return Err(Error::PatternDiscrepancy(format!(
                "P_{} is not in the radical for n = {n}",
                idx + 1
            )));
        }
    }
    let datas: Vec<F2Vector> = ps.iter().map(|p| p.data().clone()).collect();
    let independent = Echelon::from_vectors(graph.vertex_count(), &datas).rank();
    let kappa = form.kernel_basis().len();
    if independent != k || kappa != k {
        return Err(Error::PatternDiscrepancy(format!(
            "n = {n}: {independent} independent patterns, radical dimension {kappa}, expected {k}"
        )));
    }
    let expected = ptilde_from_heights(n)?;
    let mut prev: Option<&TriMatrix> = None;
    for (idx, p) in ps.iter().enumerate() {
        let tilde = match prev {
            None => p.clone(),
            Some(q) => p.add(q)?,
        };
        if tilde != expected[idx] {
            return Err(Error::PatternDiscrepancy(format!(
                "~P_{} disagrees with the height relation for n = {n}",
                idx + 1
            )));
        }
        prev = Some(p);
    }
    Ok(ps)
}

/// Reconstructs `~P_1..~P_k` as the unique dual vectors on `T^{n-1}` whose
/// pull-back along `Psi_n` is the stated combination of `R`-patterns:
/// `R_i + R_{i+1} + R_{n-i} + R_{n-i+1}` for `i < k` and `R_k + R_{n-k+1}`.
///
/// Independent of the geometric construction in [`pattern_p`].
pub fn ptilde_from_heights(n: usize) -> Result<Vec<TriMatrix>> {
    if n < 2 {
        return Err(Error::OrderTooSmall { n, min: 2 });
    }
    let k = second_rank(n);
    let mut out = Vec::with_capacity(k);
    for i in 1..=k {
        let idxs: &[usize] = if i < k {
            &[i, i + 1, n - i, n - i + 1]
        } else {
            &[k, n - k + 1]
        };
        let mut target = TriMatrix::zeros(n);
        for &r in idxs {
            target = target.add(&pattern_r(n, r)?)?;
        }
        out.push(solve_psi_transpose(&target).ok_or_else(|| {
            Error::PatternDiscrepancy(format!("no dual vector pulls back to the target for i = {i}"))
        })?);
    }
    Ok(out)
}

/// Solves `Psi_n^T X = Y`, where `(Psi^T X)_{ab} = X_{ab} + X_{a-1,b-1}`.
fn solve_psi_transpose(y: &TriMatrix) -> Option<TriMatrix> {
    let n = y.order();
    let mut x = TriMatrix::zeros(n - 1);
    for a in 1..=n {
        for b in a..=n {
            let carried = x.get_or_zero(a as isize - 1, b as isize - 1);
            let value = y.get(a, b) ^ carried;
            if b < n {
                x.set(a, b, value);
            } else if value {
                return None;
            }
        }
    }
    Some(x)
}

/// The triangular-lattice graph on the entries of `T^{n-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HexGraph {
    shape: TriShape,
    adjacency: Vec<Vec<usize>>,
}

impl HexGraph {
    pub fn order(&self) -> usize {
        self.shape.order()
    }

    pub fn shape(&self) -> TriShape {
        self.shape
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (u, ns) in self.adjacency.iter().enumerate() {
            out.extend(ns.iter().filter(|&&v| v > u).map(|&v| (u, v)));
        }
        out
    }

    /// `<e_u, e_v> = 1` iff `u` and `v` are adjacent.
    pub fn form(&self) -> BilinearForm {
        BilinearForm::from_edges(self.vertex_count(), &self.edges())
            .expect("lattice graph has no loops")
    }
}

/// The graph on entries of `T^{n-1}` joining each entry to its neighbours.
pub fn hex_graph(n: usize) -> Result<HexGraph> {
    if n < 2 {
        return Err(Error::OrderTooSmall { n, min: 2 });
    }
    let shape = TriShape::new(n - 1);
    let adjacency = shape
        .entries()
        .map(|(i, j)| {
            let mut ns: Vec<usize> = shape.neighbors(i, j).collect();
            ns.sort_unstable();
            ns
        })
        .collect();
    Ok(HexGraph { shape, adjacency })
}

/// `Psi_n : T^n -> T^{n-1}`, `(i,j) <- m_ij + m_{i+1,j+1}`.
pub fn psi(m: &TriMatrix) -> Result<TriMatrix> {
    let n = m.order();
    if n < 2 {
        return Err(Error::OrderTooSmall { n, min: 2 });
    }
    let ones = TriShape::new(n - 1)
        .entries()
        .filter(|&(i, j)| m.get(i, j) ^ m.get(i + 1, j + 1));
    Ok(TriMatrix::from_entries(n - 1, ones))
}

/// `Phi_n : (T^n)* -> T^{n-1}`, summing the 2x2 block at `(i,j)` with
/// out-of-shape entries read as zero.
pub fn phi(m: &TriMatrix) -> Result<TriMatrix> {
    let n = m.order();
    if n < 2 {
        return Err(Error::OrderTooSmall { n, min: 2 });
    }
    let ones = TriShape::new(n - 1).entries().filter(|&(i, j)| {
        let (i, j) = (i as isize, j as isize);
        m.get_or_zero(i, j) ^ m.get_or_zero(i, j + 1) ^ m.get_or_zero(i + 1, j) ^ m.get_or_zero(i + 1, j + 1)
    });
    Ok(TriMatrix::from_entries(n - 1, ones))
}

/// Transpose of [`phi`] under the standard couplings: `(T^{n-1})* -> T^n`.
/// The argument is an element of order `n - 1`.
pub fn phi_star(x: &TriMatrix) -> Result<TriMatrix> {
    let n = x.order() + 1;
    if n < 2 {
        return Err(Error::OrderTooSmall { n, min: 2 });
    }
    let shape = TriShape::new(n);
    let mut out = TriMatrix::zeros(n);
    for (i, j) in x.ones() {
        for (di, dj) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            if let Some(k) = shape.checked_index((i + di) as isize, (j + dj) as isize) {
                out.data.flip(k);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn index_is_a_bijection() {
        for n in 1..=9 {
            let s = TriShape::new(n);
            let flat: Vec<usize> = s.entries().map(|(i, j)| s.index(i, j)).collect();
            assert_eq!(flat, (0..s.dim()).collect::<Vec<_>>());
            for k in 0..s.dim() {
                let (i, j) = s.coords(k);
                assert_eq!(s.index(i, j), k);
            }
        }
    }

    #[test]
    fn e_and_r_small_cases() {
        assert_eq!(pattern_e(2, 1).unwrap().ones().collect::<Vec<_>>(), [(1, 1), (2, 2)]);
        assert_eq!(pattern_e(2, 2).unwrap().ones().collect::<Vec<_>>(), [(1, 2)]);
        assert_eq!(pattern_r(2, 1).unwrap().ones().collect::<Vec<_>>(), [(1, 1), (1, 2)]);
        assert_eq!(pattern_r(2, 2).unwrap().ones().collect::<Vec<_>>(), [(1, 2), (2, 2)]);
        assert!(pattern_e(3, 0).is_err());
        assert!(pattern_r(3, 4).is_err());
    }

    #[test]
    fn r_patterns_satisfy_the_block_equations() {
        for n in 2..=9 {
            let rs: Vec<TriMatrix> = (1..=n).map(|i| pattern_r(n, i).unwrap()).collect();
            for r in &rs {
                // Every 2x2 block (clipped) sums to zero.
                assert!(phi(r).unwrap().data().is_zero(), "n={n}");
            }
            let datas: Vec<F2Vector> = rs.iter().map(|r| r.data().clone()).collect();
            assert_eq!(crate::f2la::rank(&datas), n);
            let es: Vec<F2Vector> = (1..=n).map(|i| pattern_e(n, i).unwrap().into_data()).collect();
            assert_eq!(crate::f2la::rank(&es), n);
        }
    }

    #[test]
    fn p_small_cases() {
        assert_eq!(pattern_p(3, 1).unwrap().data().count_ones(), 3);
        let p1 = pattern_p(4, 1).unwrap();
        assert_eq!(p1.ones().collect::<Vec<_>>(), [(1, 1), (1, 3), (3, 3)]);
        assert_eq!(pattern_p(4, 2).unwrap().data().count_ones(), 6);
        assert!(pattern_p(4, 3).is_err());
        assert!(pattern_p(1, 1).is_err());
        assert_eq!(pattern_ptilde(5, 1).unwrap(), pattern_p(5, 1).unwrap());
    }

    #[test]
    fn p_patterns_certify_for_many_orders() {
        for n in 2..=16 {
            let ps = p_patterns(n).unwrap_or_else(|e| panic!("n={n}: {e}"));
            assert_eq!(ps.len(), n / 2);
        }
    }

    #[test]
    fn hex_graph_shape() {
        let g = hex_graph(3).unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edges(), vec![(0, 1), (0, 2), (1, 2)]);
        let g = hex_graph(2).unwrap();
        assert_eq!(g.vertex_count(), 1);
        assert!(g.edges().is_empty());
        for n in 4..=9 {
            let g = hex_graph(n).unwrap();
            let big_n = n - 1;
            let mut degrees: Vec<usize> = (0..g.vertex_count()).map(|v| g.neighbors(v).len()).collect();
            degrees.sort_unstable();
            let corners = degrees.iter().filter(|&&d| d == 2).count();
            let sides = degrees.iter().filter(|&&d| d == 4).count();
            let inner = degrees.iter().filter(|&&d| d == 6).count();
            assert_eq!(corners, 3);
            assert_eq!(sides, 3 * (big_n - 2));
            assert_eq!(corners + sides + inner, g.vertex_count());
        }
    }

    #[test]
    fn psi_and_phi_small_cases() {
        for i in 1..=4 {
            assert!(psi(&pattern_e(4, i).unwrap()).unwrap().data().is_zero());
            assert!(phi(&pattern_r(4, i).unwrap()).unwrap().data().is_zero());
        }
        let m = TriMatrix::from_entries(3, [(1, 1)]);
        assert_eq!(psi(&m).unwrap().ones().collect::<Vec<_>>(), [(1, 1)]);
        assert_eq!(phi(&m).unwrap().ones().collect::<Vec<_>>(), [(1, 1)]);
        assert!(psi(&TriMatrix::zeros(1)).is_err());
        assert!(phi_star(&TriMatrix::zeros(2)).unwrap().data().is_zero());
    }

    #[test]
    fn psi_kernel_and_surjectivity() {
        for n in 2..=8 {
            let shape = TriShape::new(n);
            let images: Vec<F2Vector> = (0..shape.dim())
                .map(|k| {
                    let m = TriMatrix::from_data(n, F2Vector::unit(shape.dim(), k)).unwrap();
                    psi(&m).unwrap().into_data()
                })
                .collect();
            // rank = dim T^{n-1}, so the kernel has dimension n = span{E_i}.
            assert_eq!(crate::f2la::rank(&images), TriShape::new(n - 1).dim());
            let phis: Vec<F2Vector> = (0..shape.dim())
                .map(|k| {
                    let m = TriMatrix::from_data(n, F2Vector::unit(shape.dim(), k)).unwrap();
                    phi(&m).unwrap().into_data()
                })
                .collect();
            assert_eq!(crate::f2la::rank(&phis), TriShape::new(n - 1).dim());
        }
    }

    #[test]
    fn phi_star_is_the_transpose_and_injective() {
        for n in 2..=5 {
            let small = TriShape::new(n - 1);
            let big = TriShape::new(n);
            let mut seen = alloc::collections::BTreeSet::new();
            for bits in 0u64..(1 << small.dim()) {
                let x = TriMatrix::from_data(n - 1, F2Vector::from_u64(small.dim(), bits).unwrap()).unwrap();
                let image = phi_star(&x).unwrap();
                for k in 0..big.dim() {
                    let m = TriMatrix::from_data(n, F2Vector::unit(big.dim(), k)).unwrap();
                    assert_eq!(image.couple(&m).unwrap(), phi(&m).unwrap().couple(&x).unwrap());
                }
                for i in 1..=n {
                    assert!(!image.couple(&pattern_r(n, i).unwrap()).unwrap());
                }
                assert!(seen.insert(image.into_data()));
            }
        }
    }

    #[test]
    fn grid_rendering() {
        let r = pattern_r(3, 2).unwrap();
        assert_eq!(r.grid(), "0 1 1\n  1 1\n    0\n");
    }
}
