//! Seeded random instances for property sweeps, benchmarks and witness
//! search.

use rand::Rng;

use crate::error::Result;
use crate::measure::{AtomicMeasureSpace, MeasFn, Partition};
use crate::operator::WctOperator;
use crate::C64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InstanceShape {
    pub min_atoms: usize,
    pub max_atoms: usize,
    /// Complex `u`, `w` when true, real otherwise.
    pub complex: bool,
}

impl Default for InstanceShape {
    fn default() -> Self {
        Self {
            min_atoms: 1,
            max_atoms: 12,
            complex: true,
        }
    }
}

/// A random space, partition and pair of weights.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub space: AtomicMeasureSpace,
    pub partition: Partition,
    pub u: MeasFn,
    pub w: MeasFn,
}

impl Instance {
    pub fn operator(&self, p: f64) -> Result<WctOperator> {
        WctOperator::new(self.u.clone(), self.w.clone(), self.partition.clone(), self.space.clone(), p)
    }
}

pub fn random_space<R: Rng + ?Sized>(rng: &mut R, n: usize) -> AtomicMeasureSpace {
    let weights = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    AtomicMeasureSpace::new(weights).expect("weights are positive")
}

/// Random partition into between one and `n` blocks.
pub fn random_partition<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Partition {
    let k = rng.random_range(1..=n);
    let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
    Partition::from_labels(&labels)
}

/// Entries uniform in the square `[−1, 1] × [−1, 1]`.
pub fn random_fn<R: Rng + ?Sized>(rng: &mut R, n: usize) -> MeasFn {
    MeasFn::from_fn(n, |_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

pub fn random_real_fn<R: Rng + ?Sized>(rng: &mut R, n: usize) -> MeasFn {
    MeasFn::from_fn(n, |_| C64::new(rng.random_range(-1.0..1.0), 0.0))
}

/// Random function constant on the blocks of `partition`.
pub fn random_block_constant<R: Rng + ?Sized>(rng: &mut R, partition: &Partition) -> MeasFn {
    let values = random_fn(rng, partition.n_blocks());
    MeasFn::from_fn(partition.n_atoms(), |a| values.get(partition.block_of(a)))
}

pub fn random_instance<R: Rng + ?Sized>(rng: &mut R, shape: InstanceShape) -> Instance {
    let n = rng.random_range(shape.min_atoms..=shape.max_atoms);
    let space = random_space(rng, n);
    let partition = random_partition(rng, n);
    let (u, w) = if shape.complex {
        (random_fn(rng, n), random_fn(rng, n))
    } else {
        (random_real_fn(rng, n), random_real_fn(rng, n))
    };
    Instance { space, partition, u, w }
}
