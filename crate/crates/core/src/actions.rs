//! The four concrete actions generated by `g_ij`, `1 <= i <= j <= n-1`.
//!
//! Every generator of every kind is a map `x -> x + (c . x) v` for a
//! condition mask `c` and a flip mask `v` with `c . v = 0`, so each is an
//! involution and applying it costs one parity test and one XOR:
//!
//! | kind              | space          | condition `c`            | flip `v`                 |
//! |-------------------|----------------|--------------------------|--------------------------|
//! | `First`           | `T^n`          | `(i,j), (i+1,j+1)`       | the 2x2 block at `(i,j)` |
//! | `FirstConjugate`  | `(T^n)*`       | the 2x2 block at `(i,j)` | `(i,j), (i+1,j+1)`       |
//! | `Second`          | `T^{n-1}`      | `(i,j)`                  | neighbours of `(i,j)`    |
//! | `SecondConjugate` | `(T^{n-1})*`   | neighbours of `(i,j)`    | `(i,j)`                  |
//!
//! Blocks are clipped to the triangle (for `i = j` the block is the upper
//! triangle `(i,i), (i,i+1), (i+1,i+1)`).

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::f2la::F2Vector;
use crate::tri::{self, TriMatrix, TriShape};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ActionKind {
    First,
    FirstConjugate,
    Second,
    SecondConjugate,
}

impl ActionKind {
    pub const ALL: [ActionKind; 4] = [
        ActionKind::First,
        ActionKind::FirstConjugate,
        ActionKind::Second,
        ActionKind::SecondConjugate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ActionKind::First => "first",
            ActionKind::FirstConjugate => "first-conj",
            ActionKind::Second => "second",
            ActionKind::SecondConjugate => "second-conj",
        }
    }

    /// The kind acting on the dual space.
    pub fn conjugate(self) -> ActionKind {
        match self {
            ActionKind::First => ActionKind::FirstConjugate,
            ActionKind::FirstConjugate => ActionKind::First,
            ActionKind::Second => ActionKind::SecondConjugate,
            ActionKind::SecondConjugate => ActionKind::Second,
        }
    }

    pub fn is_second(self) -> bool {
        matches!(self, ActionKind::Second | ActionKind::SecondConjugate)
    }

    /// Only the first and second actions carry stratum heights.
    pub fn has_heights(self) -> bool {
        matches!(self, ActionKind::First | ActionKind::Second)
    }

    /// Order of the triangular matrices acted on.
    pub fn state_order(self, n: usize) -> usize {
        if self.is_second() {
            n - 1
        } else {
            n
        }
    }

    pub fn min_order(self) -> usize {
        if self.is_second() {
            2
        } else {
            1
        }
    }
}

impl fmt::Display for ActionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ActionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ActionKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Parse(alloc::format!("action kind {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Generator {
    pub i: usize,
    pub j: usize,
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g({},{})", self.i, self.j)
    }
}

/// All `g_ij` with `1 <= i <= j <= n-1`, row-major. Empty for `n < 2`.
pub fn generators(n: usize) -> Vec<Generator> {
    TriShape::new(n.saturating_sub(1))
        .entries()
        .map(|(i, j)| Generator { i, j })
        .collect()
}

/// `x -> x + (condition . x) flip`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorMask {
    pub generator: Generator,
    pub condition: F2Vector,
    pub flip: F2Vector,
}

impl GeneratorMask {
    pub fn apply(&self, x: &F2Vector) -> F2Vector {
        let mut out = x.clone();
        if self.condition.dot(x) {
            out.add_assign(&self.flip);
        }
        out
    }
}

/// Vector of dual-invariant values attached to a stratum.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Height(pub F2Vector);

impl Height {
    pub fn from_bits(bits: &[bool]) -> Self {
        Height(F2Vector::from_indices(
            bits.len(),
            bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i),
        ))
    }

    pub fn zeros(len: usize) -> Self {
        Height(F2Vector::zeros(len))
    }

    pub fn len(&self) -> usize {
        self.0.dim()
    }

    pub fn is_empty(&self) -> bool {
        self.0.dim() == 0
    }

    /// Entry `i`, 1-based.
    pub fn get(&self, i: usize) -> bool {
        self.0.get(i - 1)
    }

    /// Palindromic: `h_i = h_{len-i+1}`.
    pub fn is_symmetric(&self) -> bool {
        let n = self.len();
        (1..=n).all(|i| self.get(i) == self.get(n + 1 - i))
    }

    /// All heights of the given length, in increasing numeric order.
    pub fn all(len: usize) -> impl Iterator<Item = Height> {
        assert!(len < 64, "height length {len} too large to enumerate");
        (0u64..1 << len).map(move |v| Height(F2Vector::from_u64(len, v).expect("fits")))
    }
}

impl fmt::Debug for Height {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Height({})", self.0)
    }
}

impl fmt::Display for Height {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// One of the four actions for a fixed `n`, with precomputed generator masks
/// and (for the first and second actions) the height functionals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionSpec {
    n: usize,
    kind: ActionKind,
    masks: Vec<GeneratorMask>,
    height_functionals: Option<Vec<F2Vector>>,
}

impl ActionSpec {
    pub fn new(n: usize, kind: ActionKind) -> Result<Self> {
        if n < kind.min_order() {
            return Err(Error::OrderTooSmall {
                n,
                min: kind.min_order(),
            });
        }
        let shape = TriShape::new(kind.state_order(n));
        let dim = shape.dim();
        let block = |i: usize, j: usize| {
            let (i, j) = (i as isize, j as isize);
            [(i, j), (i, j + 1), (i + 1, j), (i + 1, j + 1)]
                .into_iter()
                .filter_map(|(a, b)| shape.checked_index(a, b))
        };
        let masks = generators(n)
            .into_iter()
            .map(|g| {
                let (i, j) = (g.i, g.j);
                let (condition, flip) = match kind {
                    ActionKind::First | ActionKind::FirstConjugate => {
                        let diag = F2Vector::from_indices(
                            dim,
                            [shape.index(i, j), shape.index(i + 1, j + 1)],
                        );
                        let blk = F2Vector::from_indices(dim, block(i, j));
                        if kind == ActionKind::First {
                            (diag, blk)
                        } else {
                            (blk, diag)
                        }
                    }
                    ActionKind::Second | ActionKind::SecondConjugate => {
                        let centre = F2Vector::unit(dim, shape.index(i, j));
                        let nbrs = F2Vector::from_indices(dim, shape.neighbors(i, j));
                        if kind == ActionKind::Second {
                            (centre, nbrs)
                        } else {
                            (nbrs, centre)
                        }
                    }
                };
                GeneratorMask {
                    generator: g,
                    condition,
                    flip,
                }
            })
            .collect();
        let height_functionals = match kind {
            ActionKind::First => Some(
                (1..=n)
                    .map(|i| tri::pattern_r(n, i).map(TriMatrix::into_data))
                    .collect::<Result<Vec<_>>>()?,
            ),
            ActionKind::Second => Some(ptilde_functionals(n)?),
            _ => None,
        };
        Ok(ActionSpec {
            n,
            kind,
            masks,
            height_functionals,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> ActionKind {
        self.kind
    }

    /// Order of the triangular matrices the action is on.
    pub fn state_order(&self) -> usize {
        self.kind.state_order(self.n)
    }

    pub fn state_dim(&self) -> usize {
        TriShape::new(self.state_order()).dim()
    }

    pub fn generators(&self) -> impl Iterator<Item = Generator> + '_ {
        self.masks.iter().map(|m| m.generator)
    }

    pub fn masks(&self) -> &[GeneratorMask] {
        &self.masks
    }

    pub fn generator_count(&self) -> usize {
        self.masks.len()
    }

    fn mask_for(&self, g: Generator) -> Result<&GeneratorMask> {
        let invalid = Error::InvalidGenerator {
            i: g.i,
            j: g.j,
            n: self.n,
        };
        let shape = TriShape::new(self.n - 1);
        let k = shape
            .checked_index(g.i as isize, g.j as isize)
            .ok_or(invalid)?;
        Ok(&self.masks[k])
    }

    pub fn apply(&self, g: Generator, m: &TriMatrix) -> Result<TriMatrix> {
        if m.order() != self.state_order() {
            return Err(Error::DimensionMismatch {
                expected: self.state_dim(),
                found: m.data().dim(),
            });
        }
        let mask = self.mask_for(g)?;
        TriMatrix::from_data(m.order(), mask.apply(m.data()))
    }

    /// Length of the height vector: `n` for the first action, `floor(n/2)` for
    /// the second, `None` for the conjugate kinds.
    pub fn height_len(&self) -> Option<usize> {
        self.height_functionals.as_ref().map(Vec::len)
    }

    pub fn height_functionals(&self) -> Option<&[F2Vector]> {
        self.height_functionals.as_deref()
    }

    /// Height of the stratum containing `state`.
    pub fn height(&self, state: &F2Vector) -> Option<Height> {
        self.height_functionals
            .as_ref()
            .map(|fs| Height::from_bits(&fs.iter().map(|f| f.dot(state)).collect::<Vec<_>>()))
    }

    pub fn describe(&self) -> alloc::string::String {
        alloc::format!("{} n={}", self.kind, self.n)
    }
}

fn ptilde_functionals(n: usize) -> Result<Vec<F2Vector>> {
    let ps = tri::p_patterns(n)?;
    let mut out = Vec::with_capacity(ps.len());
    let mut prev: Option<&TriMatrix> = None;
    for p in &ps {
        let tilde = match prev {
            None => p.clone(),
            Some(q) => p.add(q)?,
        };
        out.push(tilde.into_data());
        prev = Some(p);
    }
    Ok(out)
}

/// `h_i = (M, R_i)`, `i = 1..=n`, for `M` in `T^n`.
pub fn height_first(m: &TriMatrix) -> Result<Height> {
    let n = m.order();
    let bits = (1..=n)
        .map(|i| m.couple(&tri::pattern_r(n, i)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(Height::from_bits(&bits))
}

/// `eta_i = (M, ~P_i)`, `i = 1..=floor(n/2)`, for `M` in `T^{n-1}`.
pub fn height_second(m: &TriMatrix) -> Result<Height> {
    let n = m.order() + 1;
    let bits = ptilde_functionals(n)?
        .iter()
        .map(|f| f.dot(m.data()))
        .collect::<Vec<_>>();
    Ok(Height::from_bits(&bits))
}

/// Image of a first-action height under `Psi_n`:
/// `eta_i = h_i + h_{i+1} + h_{n-i} + h_{n-i+1}` for `i < k`,
/// `eta_k = h_k + h_{n-k+1}`.
pub fn psi_height(h: &Height) -> Height {
    let n = h.len();
    let k = n / 2;
    let bits: Vec<bool> = (1..=k)
        .map(|i| {
            if i < k {
                h.get(i) ^ h.get(i + 1) ^ h.get(n - i) ^ h.get(n - i + 1)
            } else {
                h.get(k) ^ h.get(n - k + 1)
            }
        })
        .collect();
    Height::from_bits(&bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn state(n: usize, bits: &str) -> TriMatrix {
        TriMatrix::from_data(n, F2Vector::from_bit_str(bits).unwrap()).unwrap()
    }

    #[test]
    fn generator_counts() {
        assert_eq!(generators(2), vec![Generator { i: 1, j: 1 }]);
        assert_eq!(generators(4).len(), 6);
        assert_eq!(generators(5).len(), 10);
        assert!(generators(1).is_empty());
    }

    #[test]
    fn first_action_block_rule() {
        let spec = ActionSpec::new(3, ActionKind::First).unwrap();
        // M^{12} = [[m12, m13], [m22, m23]] = [[1,0],[0,0]]
        let m = TriMatrix::from_entries(3, [(1, 2)]);
        let out = spec.apply(Generator { i: 1, j: 2 }, &m).unwrap();
        assert_eq!(out.ones().collect::<Vec<_>>(), [(1, 3), (2, 2), (2, 3)]);
        // zero trace: unchanged
        let m = TriMatrix::from_entries(3, [(1, 2), (2, 3), (1, 3)]);
        assert_eq!(spec.apply(Generator { i: 1, j: 2 }, &m).unwrap(), m);
        // i = j acts on the upper triangle only
        let m = TriMatrix::from_entries(3, [(1, 1)]);
        let out = spec.apply(Generator { i: 1, j: 1 }, &m).unwrap();
        assert_eq!(out.ones().collect::<Vec<_>>(), [(1, 2), (2, 2)]);
    }

    #[test]
    fn first_conjugate_matches_the_transposed_block_matrix() {
        let spec = ActionSpec::new(3, ActionKind::FirstConjugate).unwrap();
        let g = Generator { i: 1, j: 2 };
        for bits in 0u64..64 {
            let m = TriMatrix::from_data(3, F2Vector::from_u64(6, bits).unwrap()).unwrap();
            let out = spec.apply(g, &m).unwrap();
            let (a, b, c, d) = (m.get(1, 2), m.get(1, 3), m.get(2, 2), m.get(2, 3));
            assert_eq!(out.get(1, 2), c ^ b ^ d);
            assert_eq!(out.get(2, 3), c ^ b ^ a);
            assert_eq!((out.get(1, 3), out.get(2, 2)), (b, c));
            assert_eq!((out.get(1, 1), out.get(3, 3)), (m.get(1, 1), m.get(3, 3)));
        }
    }

    #[test]
    fn second_action_examples() {
        let second = ActionSpec::new(3, ActionKind::Second).unwrap();
        let g = Generator { i: 1, j: 1 };
        assert_eq!(second.apply(g, &state(2, "100")).unwrap(), state(2, "111"));
        let conj = ActionSpec::new(3, ActionKind::SecondConjugate).unwrap();
        assert_eq!(conj.apply(g, &state(2, "011")).unwrap(), state(2, "011"));
        assert_eq!(conj.apply(g, &state(2, "010")).unwrap(), state(2, "110"));
    }

    #[test]
    fn apply_rejects_bad_inputs() {
        let spec = ActionSpec::new(3, ActionKind::First).unwrap();
        assert!(spec.apply(Generator { i: 3, j: 3 }, &TriMatrix::zeros(3)).is_err());
        assert!(spec.apply(Generator { i: 2, j: 1 }, &TriMatrix::zeros(3)).is_err());
        assert!(spec.apply(Generator { i: 1, j: 1 }, &TriMatrix::zeros(2)).is_err());
        assert!(ActionSpec::new(1, ActionKind::Second).is_err());
    }

    #[test]
    fn every_generator_is_an_involution() {
        for kind in ActionKind::ALL {
            for n in kind.min_order()..=6 {
                let spec = ActionSpec::new(n, kind).unwrap();
                for mask in spec.masks() {
                    assert!(!mask.condition.dot(&mask.flip), "{kind} n={n} {}", mask.generator);
                }
            }
        }
    }

    #[test]
    fn heights_of_simple_states() {
        assert!(height_first(&TriMatrix::zeros(5)).unwrap().0.is_zero());
        let e1 = tri::pattern_e(5, 1).unwrap();
        assert_eq!(height_first(&e1).unwrap().to_string(), "11111");
        assert!(height_second(&TriMatrix::zeros(4)).unwrap().0.is_zero());
        // (1,1) lies in the corner of P_1 and in P_2 = everything: ~P_2 = P_2 + P_1 misses it.
        let single = TriMatrix::from_entries(4, [(1, 1)]);
        assert_eq!(height_second(&single).unwrap().to_string(), "10");
    }

    #[test]
    fn psi_height_examples() {
        let h = Height::from_bits(&[true; 5]);
        assert_eq!(psi_height(&h).to_string(), "00");
        assert_eq!(psi_height(&Height::zeros(6)).to_string(), "000");
    }

    #[test]
    fn symmetric_heights() {
        assert!(Height::from_bits(&[true, false, true]).is_symmetric());
        assert!(!Height::from_bits(&[true, false, false]).is_symmetric());
        assert_eq!(Height::all(3).count(), 8);
    }
}
