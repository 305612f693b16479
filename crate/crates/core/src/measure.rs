//! Atomic measure spaces, partitions (atomic sub-σ-algebras), measurable
//! functions and truncation ladders.
//!
//! An atomic space is a finite list of atoms with strictly positive masses.
//! Every sub-σ-algebra of such a space is generated by a partition of the
//! atoms, so a [`Partition`] is all we need to describe `A ⊆ Σ`.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};
use crate::sum::{sum_complex, sum_real};
use crate::C64;

/// Absolute tolerance for comparing function values.
pub const DEFAULT_FN_TOL: f64 = 1e-9;
/// Tolerance for algebraic identities on well-conditioned inputs.
pub const DEFAULT_IDENTITY_TOL: f64 = 1e-12;

/// The discretized `(Ω, Σ, μ)`: atoms with strictly positive weights.
#[derive(Clone, Debug, PartialEq)]
pub struct AtomicMeasureSpace {
    ids: Vec<usize>,
    weights: Vec<f64>,
}

impl AtomicMeasureSpace {
    /// Space with atoms `0..n` carrying the given weights.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        let ids = (0..weights.len()).collect();
        Self::with_ids(ids, weights)
    }

    /// Space whose atoms carry explicit (unique) ids, e.g. `1..=N` for the
    /// geometric space on ℕ.
    pub fn with_ids(ids: Vec<usize>, weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptySpace);
        }
        if ids.len() != weights.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} ids for {} weights",
                ids.len(),
                weights.len()
            )));
        }
        for (atom, &weight) in weights.iter().enumerate() {
            // NaN fails this test too
            if !(weight > 0.0 && weight.is_finite()) {
                return Err(Error::NonPositiveWeight { atom, weight });
            }
        }
        let mut seen = BTreeSet::new();
        for &id in &ids {
            if !seen.insert(id) {
                return Err(Error::DuplicateAtom(id));
            }
        }
        Ok(Self { ids, weights })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, atom: usize) -> f64 {
        self.weights[atom]
    }

    pub fn total_mass(&self) -> f64 {
        sum_real(self.weights.iter().copied())
    }

    /// μ of a set of atom positions.
    pub fn mass_of(&self, atoms: &[usize]) -> f64 {
        sum_real(atoms.iter().map(|&a| self.weights[a]))
    }

    pub(crate) fn check_fn(&self, f: &MeasFn) -> Result<()> {
        if f.len() != self.len() {
            return Err(Error::SpaceMismatch {
                expected: self.len(),
                found: f.len(),
            });
        }
        Ok(())
    }
}

/// Builds a space with atoms `0..n−1` and the given weights.
pub fn build_space(weights: &[f64]) -> Result<AtomicMeasureSpace> {
    AtomicMeasureSpace::new(weights.to_vec())
}

/// A partition of the atoms; the atomic sub-σ-algebra `A`.
///
/// Stored both ways (atom → block and block → atoms). Blocks are listed
/// with their atoms in increasing order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    block_of: Vec<usize>,
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    /// Validates `blocks` against a space of `n_atoms` atoms.
    pub fn new(n_atoms: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::NotAPartition("no blocks given".into()));
        }
        let mut block_of = vec![usize::MAX; n_atoms];
        let mut normalized = Vec::with_capacity(blocks.len());
        for (b, block) in blocks.into_iter().enumerate() {
            if block.is_empty() {
                return Err(Error::NotAPartition(format!("block {b} is empty")));
            }
            let mut block = block;
            block.sort_unstable();
            for &a in &block {
                if a >= n_atoms {
                    return Err(Error::NotAPartition(format!(
                        "block {b} names atom {a}, space has {n_atoms} atoms"
                    )));
                }
                if block_of[a] != usize::MAX {
                    return Err(Error::NotAPartition(format!(
                        "atom {a} appears in blocks {} and {b}",
                        block_of[a]
                    )));
                }
                block_of[a] = b;
            }
            normalized.push(block);
        }
        if let Some(a) = block_of.iter().position(|&b| b == usize::MAX) {
            return Err(Error::NotAPartition(format!("atom {a} is not covered")));
        }
        Ok(Self {
            block_of,
            blocks: normalized,
        })
    }

    /// `A = Σ`: one singleton block per atom.
    pub fn discrete(n_atoms: usize) -> Self {
        Self {
            block_of: (0..n_atoms).collect(),
            blocks: (0..n_atoms).map(|a| vec![a]).collect(),
        }
    }

    /// The trivial σ-algebra `{∅, Ω}`.
    pub fn trivial(n_atoms: usize) -> Self {
        Self {
            block_of: vec![0; n_atoms],
            blocks: vec![(0..n_atoms).collect()],
        }
    }

    /// Builds the partition from an atom → label map; blocks are numbered in
    /// order of first appearance.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut index = BTreeMap::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut block_of = Vec::with_capacity(labels.len());
        for (a, label) in labels.iter().enumerate() {
            let b = *index.entry(*label).or_insert_with(|| {
                blocks.push(Vec::new());
                blocks.len() - 1
            });
            blocks[b].push(a);
            block_of.push(b);
        }
        Self { block_of, blocks }
    }

    pub fn n_atoms(&self) -> usize {
        self.block_of.len()
    }

    pub fn n_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_of(&self, atom: usize) -> usize {
        self.block_of[atom]
    }

    pub fn block_labels(&self) -> &[usize] {
        &self.block_of
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block(&self, b: usize) -> &[usize] {
        &self.blocks[b]
    }

    /// True when every block is a singleton, i.e. `A = Σ` and `E = I`.
    pub fn is_discrete(&self) -> bool {
        self.blocks.iter().all(|b| b.len() == 1)
    }

    pub fn block_masses(&self, space: &AtomicMeasureSpace) -> Vec<f64> {
        self.blocks.iter().map(|b| space.mass_of(b)).collect()
    }

    pub(crate) fn check_space(&self, space: &AtomicMeasureSpace) -> Result<()> {
        if self.n_atoms() != space.len() {
            return Err(Error::SpaceMismatch {
                expected: space.len(),
                found: self.n_atoms(),
            });
        }
        Ok(())
    }
}

/// Validates caller-proposed blocks against `space`.
pub fn build_partition(space: &AtomicMeasureSpace, blocks: Vec<Vec<usize>>) -> Result<Partition> {
    let partition = Partition::new(space.len(), blocks)?;
    for (b, mass) in partition.block_masses(space).into_iter().enumerate() {
        if !(mass > 0.0) {
            return Err(Error::ZeroMeasureBlock(b));
        }
    }
    Ok(partition)
}

/// A complex-valued function on the atoms of a space, an element of `L⁰(Σ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasFn(Vec<C64>);

impl MeasFn {
    pub fn new(values: Vec<C64>) -> Self {
        Self(values)
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self(values.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize) -> C64) -> Self {
        Self((0..n).map(f).collect())
    }

    pub fn constant(n: usize, c: C64) -> Self {
        Self(vec![c; n])
    }

    pub fn ones(n: usize) -> Self {
        Self::constant(n, C64::new(1.0, 0.0))
    }

    pub fn zeros(n: usize) -> Self {
        Self::constant(n, C64::new(0.0, 0.0))
    }

    /// `χ_S` for a set of atom positions.
    pub fn indicator(n: usize, atoms: &[usize]) -> Self {
        let mut v = vec![C64::new(0.0, 0.0); n];
        for &a in atoms {
            v[a] = C64::new(1.0, 0.0);
        }
        Self(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[C64] {
        &self.0
    }

    pub fn into_values(self) -> Vec<C64> {
        self.0
    }

    pub fn get(&self, atom: usize) -> C64 {
        self.0[atom]
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self(self.0.iter().map(|&z| f(z)).collect())
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    /// `|f|^p` as a (real) function.
    pub fn abs_pow(&self, p: f64) -> Self {
        self.map(|z| C64::new(z.norm().powf(p), 0.0))
    }

    pub fn scale(&self, c: C64) -> Self {
        self.map(|z| z * c)
    }

    /// Max absolute imaginary part.
    pub fn max_imag(&self) -> f64 {
        self.0.iter().fold(0.0, |m, z| m.max(z.im.abs()))
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.max_imag() <= tol
    }

    pub fn sup_norm(&self) -> f64 {
        self.0.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// Real parts, for data known to be real.
    pub fn re(&self) -> Vec<f64> {
        self.0.iter().map(|z| z.re).collect()
    }

    fn zip_with(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Self {
        assert_eq!(self.len(), other.len(), "functions live on different spaces");
        Self(self.0.iter().zip(&other.0).map(|(&a, &b)| f(a, b)).collect())
    }
}

impl Add for &MeasFn {
    type Output = MeasFn;
    fn add(self, rhs: &MeasFn) -> MeasFn {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &MeasFn {
    type Output = MeasFn;
    fn sub(self, rhs: &MeasFn) -> MeasFn {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul for &MeasFn {
    type Output = MeasFn;
    fn mul(self, rhs: &MeasFn) -> MeasFn {
        self.zip_with(rhs, |a, b| a * b)
    }
}

/// `(Σ_a |f(a)|^p μ(a))^{1/p}`.
pub fn lp_norm(f: &MeasFn, p: f64, space: &AtomicMeasureSpace) -> Result<f64> {
    Ok(lp_norm_pow(f, p, space)?.powf(1.0 / p))
}

/// `‖f‖_p^p`, skipping the final root.
pub fn lp_norm_pow(f: &MeasFn, p: f64, space: &AtomicMeasureSpace) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidExponent(format!("p = {p}, need 1 <= p < inf")));
    }
    space.check_fn(f)?;
    Ok(sum_real(
        f.values()
            .iter()
            .zip(space.weights())
            .map(|(z, &m)| z.norm().powf(p) * m),
    ))
}

/// The `L²(μ)` pairing `⟨f, g⟩ = Σ f(a)·conj(g(a))·μ(a)`.
pub fn inner_product(f: &MeasFn, g: &MeasFn, space: &AtomicMeasureSpace) -> Result<C64> {
    space.check_fn(f)?;
    space.check_fn(g)?;
    Ok(sum_complex(
        f.values()
            .iter()
            .zip(g.values())
            .zip(space.weights())
            .map(|((&a, &b), &m)| a * b.conj() * m),
    ))
}

/// Atoms where `|f(a)| > tol`.
pub fn support(f: &MeasFn, tol: f64) -> BTreeSet<usize> {
    f.values()
        .iter()
        .enumerate()
        .filter(|(_, z)| z.norm() > tol)
        .map(|(a, _)| a)
        .collect()
}

/// True iff `f` is constant on every block, up to absolute deviation `tol`.
pub fn is_a_measurable(f: &MeasFn, partition: &Partition, tol: f64) -> bool {
    f.len() == partition.n_atoms()
        && partition.blocks().iter().all(|block| {
            let first = f.get(block[0]);
            block.iter().all(|&a| (f.get(a) - first).norm() <= tol)
        })
}

/// One finite snapshot of a countable space.
#[derive(Clone, Debug, PartialEq)]
pub struct LadderLevel {
    pub space: AtomicMeasureSpace,
    pub partition: Partition,
    pub functions: BTreeMap<String, MeasFn>,
}

/// Nested finite truncations `Ω_1 ⊆ Ω_2 ⊆ …` of a countable atomic space.
///
/// Level `m` is a prefix of level `n > m`: atom positions, weights, block
/// ids and function values agree exactly on the shared atoms.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncationLadder {
    levels: Vec<LadderLevel>,
}

impl TruncationLadder {
    pub fn new(levels: Vec<LadderLevel>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidLadder("no levels".into()));
        }
        for (i, level) in levels.iter().enumerate() {
            level
                .partition
                .check_space(&level.space)
                .map_err(|e| Error::InvalidLadder(format!("level {}: {e}", i + 1)))?;
            for (name, f) in &level.functions {
                if f.len() != level.space.len() {
                    return Err(Error::InvalidLadder(format!(
                        "level {}: function {name} has {} values for {} atoms",
                        i + 1,
                        f.len(),
                        level.space.len()
                    )));
                }
            }
        }
        for (i, pair) in levels.windows(2).enumerate() {
            let (lo, hi) = (&pair[0], &pair[1]);
            let n = lo.space.len();
            let fail = |what: &str| {
                Err(Error::InvalidLadder(format!(
                    "level {} does not embed in level {}: {what}",
                    i + 1,
                    i + 2
                )))
            };
            if hi.space.len() < n {
                return fail("atom count shrinks");
            }
            if hi.space.ids()[..n] != *lo.space.ids() || hi.space.weights()[..n] != *lo.space.weights() {
                return fail("atoms or weights differ");
            }
            if hi.partition.block_labels()[..n] != *lo.partition.block_labels() {
                return fail("block assignments differ");
            }
            for (name, f) in &lo.functions {
                match hi.functions.get(name) {
                    Some(g) if g.values()[..n] == *f.values() => {}
                    _ => return fail(&format!("function {name} differs")),
                }
            }
        }
        Ok(Self { levels })
    }

    /// Builds `sizes.len()` levels from a generator mapping an atom count to
    /// a level. The nesting invariants are checked.
    pub fn from_sizes(sizes: &[usize], make: impl Fn(usize) -> Result<LadderLevel>) -> Result<Self> {
        Self::new(sizes.iter().map(|&n| make(n)).collect::<Result<Vec<_>>>()?)
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn levels(&self) -> &[LadderLevel] {
        &self.levels
    }
}

/// The level-`level` snapshot (1-based).
pub fn truncate(ladder: &TruncationLadder, level: usize) -> Result<&LadderLevel> {
    if level == 0 || level > ladder.len() {
        return Err(Error::LevelOutOfRange {
            level,
            levels: ladder.len(),
        });
    }
    Ok(&ladder.levels[level - 1])
}
