//! The conditional expectation `E^A` on atomic spaces.
//!
//! On a block `B` of the partition, `E(f)` is the constant
//! `Σ_{a∈B} f(a)μ(a) / μ(B)`. Block sums are compensated.

use crate::error::{Error, Result};
use crate::gallery::Gallery;
use crate::measure::{AtomicMeasureSpace, MeasFn, Partition};
use crate::sum::{sum_complex, sum_real};
use crate::C64;

/// Per-block values of `E(f)`, indexed by block id. Singleton blocks return
/// `f` itself, so `E = I` exactly when `A = Σ`.
pub fn block_averages(f: &MeasFn, partition: &Partition, space: &AtomicMeasureSpace) -> Result<Vec<C64>> {
    space.check_fn(f)?;
    partition.check_space(space)?;
    Ok(partition
        .blocks()
        .iter()
        .map(|block| match block[..] {
            [a] => f.get(a),
            _ => sum_complex(block.iter().map(|&a| f.get(a) * space.weight(a))) / space.mass_of(block),
        })
        .collect())
}

/// Spreads per-block values back onto the atoms.
pub fn from_blocks(values: &[C64], partition: &Partition) -> MeasFn {
    MeasFn::from_fn(partition.n_atoms(), |a| values[partition.block_of(a)])
}

/// `E^A(f)`.
pub fn cond_expect(f: &MeasFn, partition: &Partition, space: &AtomicMeasureSpace) -> Result<MeasFn> {
    Ok(from_blocks(&block_averages(f, partition, space)?, partition))
}

/// Real block averages of a nonnegative function such as `|u|^q`.
pub(crate) fn block_averages_real(values: &[f64], partition: &Partition, space: &AtomicMeasureSpace) -> Vec<f64> {
    partition
        .blocks()
        .iter()
        .map(|block| match block[..] {
            [a] => values[a],
            _ => sum_real(block.iter().map(|&a| values[a] * space.weight(a))) / space.mass_of(block),
        })
        .collect()
}

/// The two block averages `(α₁(f), α₂(f))` on the geometric space over ℕ
/// with the partition `{3ℕ, ℕ∖3ℕ}`, evaluated with the explicit series
///
/// ```text
/// α₁ = Σ f(3n) p q^{3n−1} / Σ p q^{3n−1}
/// α₂ = (Σ f(n) p q^{n−1} − Σ f(3n) p q^{3n−1}) / (Σ p q^{n−1} − Σ p q^{3n−1})
/// ```
///
/// truncated at the gallery's `N`.
pub fn alpha_coefficients(f: &MeasFn, gallery: &Gallery) -> Result<(C64, C64)> {
    let Gallery::Geometric(geo) = gallery else {
        return Err(Error::WrongGalleryFamily {
            expected: "geometric",
            found: gallery.family(),
        });
    };
    geo.space.check_fn(f)?;
    let (p, q) = (geo.p, 1.0 - geo.p);
    let mass = |t: usize| p * q.powi(t as i32 - 1);
    // atom position a holds t = a + 1
    let value = |t: usize| f.get(t - 1);
    let triples = (1..=geo.n / 3).map(|n| 3 * n);
    let num_3n = sum_complex(triples.clone().map(|t| value(t) * mass(t)));
    let den_3n = sum_real(triples.map(mass));
    let num_all = sum_complex((1..=geo.n).map(|t| value(t) * mass(t)));
    let den_all = sum_real((1..=geo.n).map(mass));
    Ok((num_3n / den_3n, (num_all - num_3n) / (den_all - den_3n)))
}

/// Pointwise slack `E(|f|^p)^{1/p} E(|g|^q)^{1/q} − |E(fg)|` of the
/// conditional Hölder inequality. Nonnegative up to rounding.
pub fn conditional_holder_slack(
    f: &MeasFn,
    g: &MeasFn,
    p: f64,
    q: f64,
    partition: &Partition,
    space: &AtomicMeasureSpace,
) -> Result<Vec<f64>> {
    if !(p > 1.0 && q > 1.0) || (1.0 / p + 1.0 / q - 1.0).abs() > 1e-12 {
        return Err(Error::ExponentMismatch { p, q });
    }
    space.check_fn(f)?;
    space.check_fn(g)?;
    let fp = block_averages_real(&f.abs_pow(p).re(), partition, space);
    let gq = block_averages_real(&g.abs_pow(q).re(), partition, space);
    let fg = block_averages(&(f * g), partition, space)?;
    Ok((0..space.len())
        .map(|a| {
            let b = partition.block_of(a);
            fp[b].powf(1.0 / p) * gq[b].powf(1.0 / q) - fg[b].norm()
        })
        .collect())
}

/// A measure with density with respect to `μ`, together with the positions
/// (in the parent space) of the atoms it keeps.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMeasure {
    pub space: AtomicMeasureSpace,
    pub kept: Vec<usize>,
}

/// `μ_f(S) = ∫_S f dμ` for real `f ≥ 0`. Atoms where `f` vanishes are
/// dropped; kept atoms retain their ids.
pub fn measure_with_density(space: &AtomicMeasureSpace, f: &MeasFn) -> Result<DensityMeasure> {
    space.check_fn(f)?;
    let mut ids = Vec::new();
    let mut weights = Vec::new();
    let mut kept = Vec::new();
    for (a, z) in f.values().iter().enumerate() {
        if z.im != 0.0 || z.re < 0.0 || z.re.is_nan() {
            return Err(Error::NegativeDensity {
                atom: a,
                value: format!("{z}"),
            });
        }
        if z.re > 0.0 {
            ids.push(space.ids()[a]);
            weights.push(z.re * space.weight(a));
            kept.push(a);
        }
    }
    Ok(DensityMeasure {
        space: AtomicMeasureSpace::with_ids(ids, weights)?,
        kept,
    })
}
