//! Worked example families: the symmetric grid on `[−1, 1]`, the geometric
//! measure on ℕ with the partition `{3ℕ, ℕ∖3ℕ}`, product spaces, and kernel
//! operators realised as `EM_v` on a product.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::expansivity::{classify, poly_a, ClassifyOptions, PolyVariant};
use crate::measure::{AtomicMeasureSpace, LadderLevel, MeasFn, Partition, TruncationLadder};
use crate::operator::WctOperator;
use crate::sum::sum_complex;
use crate::C64;

pub const SYMMETRIC_LABEL: &str = "example-3.9";
pub const GEOMETRIC_LABEL: &str = "example-3.10";
pub const PRODUCT_LABEL: &str = "example-3.11";

/// Midpoint grid of `[−1, 1]` with `dμ = dx/2` and the σ-algebra of even
/// sets: atoms at `±t_k`, `t_k = (k − ½)/n`, paired into blocks.
///
/// Atoms are stored in increasing coordinate order, so atom `i` pairs with
/// atom `2n − 1 − i`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricGallery {
    pub n_pairs: usize,
    pub space: AtomicMeasureSpace,
    pub partition: Partition,
    /// Coordinate of every atom.
    pub coords: Vec<f64>,
    /// `t_1 < … < t_n`.
    pub grid: Vec<f64>,
}

/// `μ({t}) = p q^{t−1}` on `{1, …, N}`; block 0 is `3ℕ ∩ [1, N]`, block 1
/// the rest. Atom position `a` carries the id `t = a + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeometricGallery {
    pub p: f64,
    pub n: usize,
    pub space: AtomicMeasureSpace,
    pub partition: Partition,
}

/// `Ω₁ × Ω₂` with the product measure and blocks `{a₁} × Ω₂`. The atom
/// `(a₁, a₂)` sits at position `a₁·|Ω₂| + a₂`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductGallery {
    pub first: AtomicMeasureSpace,
    pub second: AtomicMeasureSpace,
    pub space: AtomicMeasureSpace,
    pub partition: Partition,
}

impl ProductGallery {
    pub fn position(&self, a1: usize, a2: usize) -> usize {
        a1 * self.second.len() + a2
    }

    /// `f'(t, s) = f(s)` for `f` on the second factor.
    pub fn lift_second(&self, f: &MeasFn) -> MeasFn {
        let n2 = self.second.len();
        MeasFn::from_fn(self.space.len(), |a| f.get(a % n2))
    }

    /// `g'(t, s) = g(t)` for `g` on the first factor.
    pub fn lift_first(&self, g: &MeasFn) -> MeasFn {
        let n2 = self.second.len();
        MeasFn::from_fn(self.space.len(), |a| g.get(a / n2))
    }

    /// Reads an `A`-measurable function as a function of `t` alone.
    pub fn marginal(&self, h: &MeasFn) -> MeasFn {
        let n2 = self.second.len();
        MeasFn::from_fn(self.first.len(), |a1| h.get(a1 * n2))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Gallery {
    Symmetric(SymmetricGallery),
    Geometric(GeometricGallery),
    Product(ProductGallery),
}

impl Gallery {
    pub fn family(&self) -> &'static str {
        match self {
            Gallery::Symmetric(_) => "symmetric",
            Gallery::Geometric(_) => "geometric",
            Gallery::Product(_) => "product",
        }
    }

    pub fn provenance(&self) -> &'static str {
        match self {
            Gallery::Symmetric(_) => SYMMETRIC_LABEL,
            Gallery::Geometric(_) => GEOMETRIC_LABEL,
            Gallery::Product(_) => PRODUCT_LABEL,
        }
    }

    pub fn symmetric(&self) -> Option<&SymmetricGallery> {
        match self {
            Gallery::Symmetric(g) => Some(g),
            _ => None,
        }
    }

    pub fn geometric(&self) -> Option<&GeometricGallery> {
        match self {
            Gallery::Geometric(g) => Some(g),
            _ => None,
        }
    }

    pub fn product(&self) -> Option<&ProductGallery> {
        match self {
            Gallery::Product(g) => Some(g),
            _ => None,
        }
    }

    pub fn space(&self) -> &AtomicMeasureSpace {
        match self {
            Gallery::Symmetric(g) => &g.space,
            Gallery::Geometric(g) => &g.space,
            Gallery::Product(g) => &g.space,
        }
    }

    pub fn partition(&self) -> &Partition {
        match self {
            Gallery::Symmetric(g) => &g.partition,
            Gallery::Geometric(g) => &g.partition,
            Gallery::Product(g) => &g.partition,
        }
    }

    /// Per-atom coordinates where the family has them (`t` for the
    /// symmetric grid, the integer `t` for the geometric space).
    pub fn coords(&self) -> Option<Vec<f64>> {
        match self {
            Gallery::Symmetric(g) => Some(g.coords.clone()),
            Gallery::Geometric(g) => Some((1..=g.n).map(|t| t as f64).collect()),
            Gallery::Product(_) => None,
        }
    }

    /// The functions shipped with a gallery spec:
    ///
    /// - symmetric: `u = e^t`, `w = 1`, `f = t`;
    /// - geometric: `u = 1 + 1/t`, `w = cos t`, `f = 1/t`;
    /// - product: `u(t, s) = t²` on the first factor's grid, `w = 1`,
    ///   `f(t, s) = s`.
    pub fn default_functions(&self) -> BTreeMap<String, MeasFn> {
        let mut out = BTreeMap::new();
        let n = self.space().len();
        match self {
            Gallery::Symmetric(g) => {
                out.insert("u".into(), MeasFn::from_fn(n, |a| C64::new(g.coords[a].exp(), 0.0)));
                out.insert("w".into(), MeasFn::ones(n));
                out.insert("f".into(), MeasFn::from_fn(n, |a| C64::new(g.coords[a], 0.0)));
            }
            Gallery::Geometric(_) => {
                let t = |a: usize| (a + 1) as f64;
                out.insert("u".into(), MeasFn::from_fn(n, |a| C64::new(1.0 + 1.0 / t(a), 0.0)));
                out.insert("w".into(), MeasFn::from_fn(n, |a| C64::new(t(a).cos(), 0.0)));
                out.insert("f".into(), MeasFn::from_fn(n, |a| C64::new(1.0 / t(a), 0.0)));
            }
            Gallery::Product(g) => {
                let (n1, n2) = (g.first.len() as f64, g.second.len());
                let x = |i: usize| (i + 1) as f64 / n1;
                out.insert("u".into(), MeasFn::from_fn(n, |a| C64::new(x(a / n2).powi(2), 0.0)));
                out.insert("w".into(), MeasFn::ones(n));
                out.insert("f".into(), MeasFn::from_fn(n, |a| C64::new((a % n2 + 1) as f64 / n2 as f64, 0.0)));
            }
        }
        out
    }
}

pub fn symmetric_space(n_pairs: usize) -> Result<Gallery> {
    if n_pairs == 0 {
        return Err(Error::InvalidArgument("n_pairs must be at least 1".into()));
    }
    let n = n_pairs;
    let grid: Vec<f64> = (1..=n).map(|k| (k as f64 - 0.5) / n as f64).collect();
    let coords: Vec<f64> = (0..2 * n)
        .map(|i| if i < n { -grid[n - 1 - i] } else { grid[i - n] })
        .collect();
    let space = AtomicMeasureSpace::new(vec![0.5 / n as f64; 2 * n])?;
    let blocks = (0..n).map(|i| vec![i, 2 * n - 1 - i]).collect();
    let partition = Partition::new(2 * n, blocks)?;
    Ok(Gallery::Symmetric(SymmetricGallery {
        n_pairs,
        space,
        partition,
        coords,
        grid,
    }))
}

pub fn geometric_nat_space(p: f64, n: usize) -> Result<Gallery> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidArgument(format!("p = {p} must lie in (0, 1)")));
    }
    if n < 3 {
        return Err(Error::InvalidArgument(format!("truncation N = {n} must be at least 3")));
    }
    let q = 1.0 - p;
    let weights = (1..=n).map(|t| p * q.powi(t as i32 - 1)).collect();
    let space = AtomicMeasureSpace::with_ids((1..=n).collect(), weights)?;
    let labels: Vec<usize> = (1..=n).map(|t| usize::from(t % 3 != 0)).collect();
    let mut blocks = vec![Vec::new(), Vec::new()];
    for (a, &l) in labels.iter().enumerate() {
        blocks[l].push(a);
    }
    let partition = Partition::new(n, blocks)?;
    Ok(Gallery::Geometric(GeometricGallery { p, n, space, partition }))
}

pub fn product_space(first: &AtomicMeasureSpace, second: &AtomicMeasureSpace) -> Result<Gallery> {
    let (n1, n2) = (first.len(), second.len());
    let weights = (0..n1 * n2)
        .map(|a| first.weight(a / n2) * second.weight(a % n2))
        .collect();
    let space = AtomicMeasureSpace::new(weights)?;
    let blocks = (0..n1).map(|a1| (a1 * n2..(a1 + 1) * n2).collect()).collect();
    let partition = Partition::new(n1 * n2, blocks)?;
    Ok(Gallery::Product(ProductGallery {
        first: first.clone(),
        second: second.clone(),
        space,
        partition,
    }))
}

/// A kernel operator `Tf(t) = Σ_s k(t, s) f(s) μ(s)` written as `EM_v` on
/// `Ω × Ω`.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelBridge {
    pub product: ProductGallery,
    pub operator: WctOperator,
    kernel: Vec<Vec<C64>>,
}

impl KernelBridge {
    /// Lift `f` to `f(s)`, apply `EM_v`, read off the `t` marginal.
    pub fn apply(&self, f: &MeasFn) -> Result<MeasFn> {
        self.product.first.check_fn(f)?;
        let lifted = self.product.lift_second(f);
        let image = crate::operator::apply_wct(&self.operator, &lifted)?;
        Ok(self.product.marginal(&image))
    }

    /// The kernel sum evaluated directly.
    pub fn apply_direct(&self, f: &MeasFn) -> Result<MeasFn> {
        let base = &self.product.first;
        base.check_fn(f)?;
        Ok(MeasFn::from_fn(base.len(), |t| {
            sum_complex((0..base.len()).map(|s| self.kernel[t][s] * f.get(s) * base.weight(s)))
        }))
    }
}

/// `v(t, s) = k(t, s)·μ(Ω)`; the factor `μ(Ω)` cancels the normalisation of
/// the block average and is 1 on a probability space.
pub fn kernel_operator_bridge(kernel: &[Vec<C64>], space: &AtomicMeasureSpace) -> Result<KernelBridge> {
    let n = space.len();
    if kernel.len() != n || kernel.iter().any(|row| row.len() != n) {
        return Err(Error::DimensionMismatch(format!(
            "kernel must be {n}×{n} to match the space"
        )));
    }
    let Gallery::Product(product) = product_space(space, space)? else {
        unreachable!("product_space builds a product gallery")
    };
    let total = space.total_mass();
    let v = MeasFn::from_fn(n * n, |a| kernel[a / n][a % n] * total);
    let operator = WctOperator::emv(v, product.partition.clone(), product.space.clone())?;
    Ok(KernelBridge {
        product,
        operator,
        kernel: kernel.to_vec(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct NoncontractiveReport {
    pub grid: Vec<f64>,
    /// `1 − 2cosh²(t_k) + cosh⁴(t_k)` per pair.
    pub values: Vec<f64>,
    /// `(cosh²(t_k) − 1)²` per pair.
    pub closed_form: Vec<f64>,
    pub all_nonnegative: bool,
    pub some_positive: bool,
    pub two_expansive: bool,
    pub holds: bool,
}

/// Evaluates `A⁰_2(cosh² t_k)` on the symmetric grid and classifies
/// `EM_{e^t}` at level 2.
pub fn example_noncontractive_check(n_pairs: usize) -> Result<NoncontractiveReport> {
    let g = symmetric_space(n_pairs)?;
    let sym = g.symmetric().expect("symmetric gallery");
    let values: Vec<f64> = sym
        .grid
        .iter()
        .map(|t| poly_a(2, t.cosh().powi(2), PolyVariant::Zero))
        .collect();
    let closed_form: Vec<f64> = sym.grid.iter().map(|t| (t.cosh().powi(2) - 1.0).powi(2)).collect();
    let v = MeasFn::from_fn(sym.space.len(), |a| C64::new(sym.coords[a].exp(), 0.0));
    let opts = ClassifyOptions {
        k_max: 2,
        horizon: 2,
        ..ClassifyOptions::default()
    };
    let two_expansive = classify(&v, &sym.partition, &sym.space, opts)?.is_k_expansive(2);
    let all_nonnegative = values.iter().all(|&x| x >= 0.0);
    let some_positive = values.iter().any(|&x| x > 0.0);
    Ok(NoncontractiveReport {
        grid: sym.grid.clone(),
        values,
        closed_form,
        all_nonnegative,
        some_positive,
        two_expansive,
        holds: all_nonnegative && some_positive && !two_expansive,
    })
}

/// Nested truncations of the geometric space at the given sizes, carrying
/// `u(t)` and `w(t)` evaluated at the integer ids.
pub fn geometric_ladder(
    p: f64,
    sizes: &[usize],
    u: impl Fn(usize) -> C64,
    w: impl Fn(usize) -> C64,
) -> Result<TruncationLadder> {
    TruncationLadder::from_sizes(sizes, |n| {
        let g = geometric_nat_space(p, n)?;
        let Gallery::Geometric(geo) = g else { unreachable!() };
        let mut functions = BTreeMap::new();
        functions.insert("u".to_string(), MeasFn::from_fn(n, |a| u(a + 1)));
        functions.insert("w".to_string(), MeasFn::from_fn(n, |a| w(a + 1)));
        Ok(LadderLevel {
            space: geo.space,
            partition: geo.partition,
            functions,
        })
    })
}
