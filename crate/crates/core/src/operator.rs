//! Weighted conditional type operators `T = M_w E M_u`, `f ↦ w·E(u·f)`.
//!
//! On one finite space every such operator is bounded and everywhere
//! defined; questions about dense domains only become interesting along a
//! [`TruncationLadder`], where block aggregates either settle or blow up.

use std::collections::BTreeMap;

use crate::dense::{self, CMatrix};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::expect::{block_averages, block_averages_real, cond_expect, from_blocks};
use crate::measure::{lp_norm, lp_norm_pow, AtomicMeasureSpace, MeasFn, Partition, TruncationLadder};
use crate::sum::sum_real;
use crate::C64;

/// `M_w E M_u` acting on `L^p(μ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct WctOperator {
    u: MeasFn,
    w: MeasFn,
    partition: Partition,
    space: AtomicMeasureSpace,
    p: f64,
}

impl WctOperator {
    pub fn new(u: MeasFn, w: MeasFn, partition: Partition, space: AtomicMeasureSpace, p: f64) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::InvalidExponent(format!("p = {p}, need 1 <= p < inf")));
        }
        space.check_fn(&u)?;
        space.check_fn(&w)?;
        partition.check_space(&space)?;
        Ok(Self {
            u,
            w,
            partition,
            space,
            p,
        })
    }

    /// The conditional expectation itself (`u = w ≡ 1`).
    pub fn expectation(partition: Partition, space: AtomicMeasureSpace, p: f64) -> Result<Self> {
        let n = space.len();
        Self::new(MeasFn::ones(n), MeasFn::ones(n), partition, space, p)
    }

    /// `EM_v` (`w ≡ 1`) on `L²`.
    pub fn emv(v: MeasFn, partition: Partition, space: AtomicMeasureSpace) -> Result<Self> {
        let n = space.len();
        Self::new(v, MeasFn::ones(n), partition, space, 2.0)
    }

    pub fn u(&self) -> &MeasFn {
        &self.u
    }

    pub fn w(&self) -> &MeasFn {
        &self.w
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn space(&self) -> &AtomicMeasureSpace {
        &self.space
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Conjugate exponent; infinite for `p = 1`.
    pub fn q(&self) -> f64 {
        conjugate_exponent(self.p)
    }

    pub fn dim(&self) -> usize {
        self.space.len()
    }

    pub(crate) fn require_hilbert(&self) -> Result<()> {
        if self.p != 2.0 {
            return Err(Error::InvalidExponent(format!("p = {}, this operation needs p = 2", self.p)));
        }
        Ok(())
    }

    fn require_reflexive(&self) -> Result<()> {
        if self.p <= 1.0 {
            return Err(Error::InvalidExponent(format!(
                "p = {}, q = inf is outside the supported range",
                self.p
            )));
        }
        Ok(())
    }

    /// `E(g)` for this operator's partition and space.
    pub fn expect(&self, g: &MeasFn) -> Result<MeasFn> {
        cond_expect(g, &self.partition, &self.space)
    }

    /// Per-block `E(|w|^p)` and the `u`-factor `E(|u|^q)^{p/q}`; for `p = 1`
    /// the latter is the block supremum of `|u|` (conditional `L^∞` norm).
    pub fn block_factors(&self) -> (Vec<f64>, Vec<f64>) {
        block_factors(&self.u, &self.w, self.p, &self.partition, &self.space)
    }

    /// `J − 1 = E(|w|^p)·E(|u|^q)^{p/q}` per block.
    pub fn j_minus_1_blocks(&self) -> Vec<f64> {
        let (wp, uq) = self.block_factors();
        wp.iter().zip(&uq).map(|(a, b)| a * b).collect()
    }

    /// `J − 1` as an `A`-measurable function.
    pub fn j_minus_1(&self) -> MeasFn {
        let blocks = self.j_minus_1_blocks();
        MeasFn::from_fn(self.dim(), |a| C64::new(blocks[self.partition.block_of(a)], 0.0))
    }
}

pub fn conjugate_exponent(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else {
        p / (p - 1.0)
    }
}

fn block_factors(u: &MeasFn, w: &MeasFn, p: f64, partition: &Partition, space: &AtomicMeasureSpace) -> (Vec<f64>, Vec<f64>) {
    let wp = block_averages_real(&w.abs_pow(p).re(), partition, space);
    let uq = if p == 1.0 {
        partition
            .blocks()
            .iter()
            .map(|b| b.iter().fold(0.0, |m: f64, &a| m.max(u.get(a).norm())))
            .collect()
    } else {
        let q = conjugate_exponent(p);
        block_averages_real(&u.abs_pow(q).re(), partition, space)
            .into_iter()
            .map(|x| x.powf(p / q))
            .collect()
    };
    (wp, uq)
}

/// `w · E(u·f)`.
pub fn apply_wct(t: &WctOperator, f: &MeasFn) -> Result<MeasFn> {
    t.space.check_fn(f)?;
    let inner = t.expect(&(&t.u * f))?;
    Ok(&t.w * &inner)
}

/// `T* = M_{conj u} E M_{conj w}`, acting on `L^q`.
pub fn adjoint(t: &WctOperator) -> Result<WctOperator> {
    t.require_reflexive()?;
    WctOperator::new(t.w.conj(), t.u.conj(), t.partition.clone(), t.space.clone(), t.q())
}

/// `sup_B E(|w|^p)^{1/p}·E(|u|^q)^{1/q}`, an upper bound for `‖T‖` (and
/// equal to it for `p = 2`).
pub fn norm_bound(t: &WctOperator) -> Result<f64> {
    t.require_reflexive()?;
    let (wp, uq) = t.block_factors();
    // uq already carries the power p/q
    Ok(wp
        .iter()
        .zip(&uq)
        .map(|(a, b)| (a * b).powf(1.0 / t.p))
        .fold(0.0, f64::max))
}

/// Matrix of an operator on `L²(μ)` in the atom basis, with the weights
/// needed for the weighted pairing `⟨x, y⟩ = Σ x_a conj(y_a) μ_a`.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    pub entries: CMatrix,
    pub weights: Vec<f64>,
}

impl OperatorMatrix {
    pub fn apply(&self, f: &MeasFn) -> MeasFn {
        let x = nalgebra::DVector::from_column_slice(f.values());
        MeasFn::new((&self.entries * x).iter().copied().collect())
    }

    /// `D^{1/2} M D^{−1/2}`: unitarily equivalent matrix in the orthonormal
    /// basis `χ_a/√μ_a`, where the weighted adjoint is the plain conjugate
    /// transpose.
    pub fn symmetrized(&self) -> CMatrix {
        let s: Vec<f64> = self.weights.iter().map(|m| m.sqrt()).collect();
        CMatrix::from_fn(self.entries.nrows(), self.entries.ncols(), |i, j| {
            self.entries[(i, j)] * (s[i] / s[j])
        })
    }

    pub fn from_symmetrized(sym: &CMatrix, weights: &[f64]) -> Self {
        let s: Vec<f64> = weights.iter().map(|m| m.sqrt()).collect();
        Self {
            entries: CMatrix::from_fn(sym.nrows(), sym.ncols(), |i, j| sym[(i, j)] * (s[j] / s[i])),
            weights: weights.to_vec(),
        }
    }

    /// Adjoint under the weighted pairing: `D^{−1} M^H D`.
    pub fn weighted_adjoint(&self) -> Self {
        let n = self.entries.nrows();
        Self {
            entries: CMatrix::from_fn(n, n, |i, j| {
                self.entries[(j, i)].conj() * (self.weights[j] / self.weights[i])
            }),
            weights: self.weights.clone(),
        }
    }

    pub fn compose(&self, rhs: &Self) -> Self {
        Self {
            entries: &self.entries * &rhs.entries,
            weights: self.weights.clone(),
        }
    }

    pub fn minus(&self, rhs: &Self) -> Self {
        Self {
            entries: &self.entries - &rhs.entries,
            weights: self.weights.clone(),
        }
    }

    /// Hilbert–Schmidt norm on `L²(μ)` (Frobenius norm of the symmetrized
    /// matrix).
    pub fn hs_norm(&self) -> f64 {
        dense::frobenius(&self.symmetrized())
    }

    /// Operator norm on `L²(μ)`.
    pub fn op_norm(&self) -> f64 {
        dense::spectral_norm(&self.symmetrized())
    }
}

/// Column `j` is `T(χ_{a_j})`. Requires `p = 2`.
pub fn to_matrix(t: &WctOperator) -> Result<OperatorMatrix> {
    to_matrix_with(t, Execution::default())
}

pub fn to_matrix_with(t: &WctOperator, exec: Execution) -> Result<OperatorMatrix> {
    t.require_hilbert()?;
    let n = t.dim();
    let columns = exec.map_range(n, |j| apply_wct(t, &MeasFn::indicator(n, &[j])));
    let columns = columns.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(OperatorMatrix {
        entries: CMatrix::from_fn(n, n, |i, j| columns[j].get(i)),
        weights: t.space.weights().to_vec(),
    })
}

/// Witness for the dense-domain construction `g = f·χ_{C_N}` with
/// `C_N = {J − 1 < N − 1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Approximant {
    pub g: MeasFn,
    /// Integer-valued; a float so that `J − 1` beyond `u64` range still
    /// yields a cut. May round for huge cuts; use `cut` for membership.
    pub n: f64,
    /// `N − 1`, exact: `C_N = {J − 1 < cut}`.
    pub cut: f64,
    /// `‖g − f‖_p^p`.
    pub distance_pow: f64,
    pub certificate: ApproximantCertificate,
}

/// `∫|wE(ug)|^p dμ ≤ (N − 1)·∫_{C_N}|f|^p dμ`, both sides by direct summation.
#[derive(Clone, Debug, PartialEq)]
pub struct ApproximantCertificate {
    pub image_norm_pow: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Smallest integer `N ≥ 1` with `‖f·χ_{C_N} − f‖_p^p < eps`, and the
/// corresponding truncation of `f`. Works for `p = 1` as well.
pub fn domain_approximant(t: &WctOperator, f: &MeasFn, eps: f64) -> Result<Approximant> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("eps = {eps}, need eps > 0")));
    }
    t.space.check_fn(f)?;
    let p = t.p;
    let j = t.j_minus_1_blocks();
    let jm1 = |a: usize| j[t.partition.block_of(a)];
    let mass: Vec<f64> = (0..t.dim()).map(|a| f.get(a).norm().powf(p) * t.space.weight(a)).collect();

    // C_N changes only when the cut N − 1 passes a value of J − 1. Cuts are
    // the smallest integer-valued floats a few ulps above each finite J − 1,
    // so rounding differences in J cannot move an atom across the cut.
    let above = |x: f64| {
        let x = x.next_up().next_up().next_up().next_up();
        let m = x.floor() + 1.0;
        if m > x { m } else { x }
    };
    let mut cuts: Vec<f64> = vec![0.0];
    cuts.extend(j.iter().filter(|x| x.is_finite()).map(|&x| above(x)));
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let tail = |m: f64| sum_real((0..t.dim()).filter(|&a| !(jm1(a) < m)).map(|a| mass[a]));
    let cut = cuts
        .into_iter()
        .find(|&m| tail(m) < eps)
        .ok_or(Error::NoSuchN { eps })?;
    let n = cut + 1.0;

    let inside = |a: usize| jm1(a) < cut;
    let g = MeasFn::from_fn(t.dim(), |a| if inside(a) { f.get(a) } else { C64::new(0.0, 0.0) });
    let distance_pow = lp_norm_pow(&(&g - f), p, &t.space)?;
    let image_norm_pow = lp_norm_pow(&apply_wct(t, &g)?, p, &t.space)?;
    let bound = cut * sum_real((0..t.dim()).filter(|&a| inside(a)).map(|a| mass[a]));
    let holds = image_norm_pow <= bound * (1.0 + 1e-12) + f64::MIN_POSITIVE;
    Ok(Approximant {
        g,
        n,
        cut,
        distance_pow,
        certificate: ApproximantCertificate {
            image_norm_pow,
            bound,
            holds,
        },
    })
}

/// Graph-limit check for a convergent sequence `f_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosednessReport {
    pub limit: MeasFn,
    pub image_limit: MeasFn,
    /// `‖T f − g‖_p` with `g` accumulated from the telescoping image increments.
    pub graph_residual: f64,
    pub holds: bool,
}

/// Takes the last term of `seq` as the limit `f`, requires the last steps of
/// both `f_n` and `T f_n` to be Cauchy within `cauchy_tol`, accumulates the
/// image limit `g = T f_1 + Σ T(f_{k+1} − f_k)` and checks `T f = g` within
/// `1e-9`.
pub fn closedness_witness(t: &WctOperator, seq: &[MeasFn], cauchy_tol: f64) -> Result<ClosednessReport> {
    let (first, last) = match (seq.first(), seq.last()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::NotConvergent("empty sequence".into())),
    };
    let images = seq.iter().map(|f| apply_wct(t, f)).collect::<Result<Vec<_>>>()?;
    if seq.len() >= 2 {
        let k = seq.len() - 1;
        let step = lp_norm(&(&seq[k] - &seq[k - 1]), t.p, &t.space)?;
        let image_step = lp_norm(&(&images[k] - &images[k - 1]), t.p, &t.space)?;
        if step > cauchy_tol || image_step > cauchy_tol {
            return Err(Error::NotConvergent(format!(
                "last steps {step:.3e} (domain) and {image_step:.3e} (graph) exceed {cauchy_tol:.3e}"
            )));
        }
    }
    let mut image_limit = apply_wct(t, first)?;
    for pair in seq.windows(2) {
        image_limit = &image_limit + &apply_wct(t, &(&pair[1] - &pair[0]))?;
    }
    let graph_residual = lp_norm(&(&apply_wct(t, last)? - &image_limit), t.p, &t.space)?;
    Ok(ClosednessReport {
        limit: last.clone(),
        image_limit,
        graph_residual,
        holds: graph_residual <= 1e-9,
    })
}

/// Thresholds for judging a truncation ladder.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DivergenceSettings {
    /// Number of trailing level-to-level steps that must be stable.
    pub window: usize,
    /// Relative change below which an aggregate counts as settled.
    pub rel_tol: f64,
    /// A still-growing aggregate above this value is declared divergent.
    pub growth_cap: f64,
}

impl Default for DivergenceSettings {
    fn default() -> Self {
        Self {
            window: 5,
            rel_tol: 1e-8,
            growth_cap: 1e12,
        }
    }
}

/// Raw per-block aggregates at one ladder level, keyed by block id.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelAggregates {
    pub n_atoms: usize,
    /// `∫_B |u|^q dμ` (for `p = 1`: `sup_B |u|`).
    pub u_integral: BTreeMap<usize, f64>,
    /// `∫_B |w|^p dμ`.
    pub w_integral: BTreeMap<usize, f64>,
    /// `E(|u|^q)` on `B`.
    pub u_average: BTreeMap<usize, f64>,
    /// `E(|w|^p)` on `B`.
    pub w_average: BTreeMap<usize, f64>,
    /// `J − 1` on `B`.
    pub j_minus_1: BTreeMap<usize, f64>,
    /// `μ_{J−1}(B) = (J − 1)·μ(B)`.
    pub j_mass: BTreeMap<usize, f64>,
}

/// Outcome of the dense-domain test.
#[derive(Clone, Debug, PartialEq)]
pub struct DomainVerdict {
    /// `J − 1` at the finest level.
    pub j_minus_1: MeasFn,
    /// Per-block `E(|u|^q)` and `E(|w|^p)` settled on every judged block
    /// and nothing diverges.
    pub finite_ae: bool,
    /// `μ_{J−1}(B)` settled to a finite value on every judged block.
    pub sigma_finite_restriction: bool,
    /// Both of the above.
    pub stabilized: bool,
    /// Blocks whose aggregates exceed the growth cap while still growing.
    pub diverging_blocks: Vec<usize>,
    /// Blocks that appeared too recently to be judged.
    pub unjudged_blocks: Vec<usize>,
    pub levels: Vec<LevelAggregates>,
}

impl DomainVerdict {
    pub fn densely_defined(&self) -> bool {
        self.stabilized && self.diverging_blocks.is_empty()
    }

    /// Verdict for a single finite space: everything is in the domain as
    /// long as `J − 1` is finite.
    pub fn single(t: &WctOperator) -> Self {
        let level = aggregates(t.u(), t.w(), t.p, &t.partition, &t.space);
        let finite = level.j_minus_1.values().all(|x| x.is_finite());
        Self {
            j_minus_1: t.j_minus_1(),
            finite_ae: finite,
            sigma_finite_restriction: finite,
            stabilized: true,
            diverging_blocks: Vec::new(),
            unjudged_blocks: Vec::new(),
            levels: vec![level],
        }
    }
}

fn aggregates(u: &MeasFn, w: &MeasFn, p: f64, partition: &Partition, space: &AtomicMeasureSpace) -> LevelAggregates {
    let q = conjugate_exponent(p);
    let masses = partition.block_masses(space);
    let (wp, uq_pow) = block_factors(u, w, p, partition, space);
    let mut agg = LevelAggregates {
        n_atoms: space.len(),
        u_integral: BTreeMap::new(),
        w_integral: BTreeMap::new(),
        u_average: BTreeMap::new(),
        w_average: BTreeMap::new(),
        j_minus_1: BTreeMap::new(),
        j_mass: BTreeMap::new(),
    };
    for b in 0..partition.n_blocks() {
        let u_avg = if p == 1.0 { uq_pow[b] } else { uq_pow[b].powf(q / p) };
        let u_int = if p == 1.0 { u_avg } else { u_avg * masses[b] };
        agg.u_integral.insert(b, u_int);
        agg.w_integral.insert(b, wp[b] * masses[b]);
        agg.u_average.insert(b, u_avg);
        agg.w_average.insert(b, wp[b]);
        agg.j_minus_1.insert(b, wp[b] * uq_pow[b]);
        agg.j_mass.insert(b, wp[b] * uq_pow[b] * masses[b]);
    }
    agg
}

/// Judges whether `M_wEM_u` is densely defined on the countable space the
/// ladder truncates, from functions named `"u"` and `"w"` on every level.
///
/// A block is judged when it exists on the last `window + 1` levels. Its
/// averages `E(|u|^q)`, `E(|w|^p)` and its mass `μ_{J−1}(B)` must change by
/// less than `rel_tol` (relative) at each of the last `window` steps. A
/// block whose aggregates exceed `growth_cap` while still increasing is
/// reported as divergent.
pub fn densely_defined_check(ladder: &TruncationLadder, p: f64, settings: DivergenceSettings) -> Result<DomainVerdict> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::InvalidExponent(format!(
            "p = {p}, the density criterion needs 1 < p < inf"
        )));
    }
    let needed = settings.window + 1;
    if ladder.len() < needed {
        return Err(Error::LadderTooShort {
            levels: ladder.len(),
            needed,
        });
    }
    let levels = ladder
        .levels()
        .iter()
        .map(|level| {
            let (u, w) = match (level.functions.get("u"), level.functions.get("w")) {
                (Some(u), Some(w)) => (u, w),
                _ => return Err(Error::InvalidLadder("every level needs functions u and w".into())),
            };
            Ok(aggregates(u, w, p, &level.partition, &level.space))
        })
        .collect::<Result<Vec<_>>>()?;

    let last = levels.last().expect("ladder is non-empty");
    let window = &levels[levels.len() - needed..];
    let settled = |key: fn(&LevelAggregates) -> &BTreeMap<usize, f64>, b: usize| {
        window.windows(2).all(|pair| {
            let (x, y) = (key(&pair[0])[&b], key(&pair[1])[&b]);
            x.is_finite() && y.is_finite() && (y - x).abs() <= settings.rel_tol * x.abs().max(y.abs())
        })
    };

    let mut finite_ae = true;
    let mut sigma_finite = true;
    let mut diverging = Vec::new();
    let mut unjudged = Vec::new();
    for &b in last.j_minus_1.keys() {
        let prev = &levels[levels.len() - 2];
        let growing = |key: fn(&LevelAggregates) -> &BTreeMap<usize, f64>| {
            let now = key(last)[&b];
            let before = prev.u_average.get(&b).map(|_| key(prev)[&b]);
            !now.is_finite() || (now > settings.growth_cap && before.is_some_and(|x| now > x))
        };
        if growing(|l| &l.u_average) || growing(|l| &l.w_average) || growing(|l| &l.j_mass) {
            diverging.push(b);
            finite_ae = false;
            sigma_finite = false;
            continue;
        }
        if !window.iter().all(|l| l.j_minus_1.contains_key(&b)) {
            unjudged.push(b);
            continue;
        }
        if !(settled(|l| &l.u_average, b) && settled(|l| &l.w_average, b)) {
            finite_ae = false;
        }
        if !settled(|l| &l.j_mass, b) {
            sigma_finite = false;
        }
    }
    let finest = ladder.levels().last().expect("ladder is non-empty");
    let j = &last.j_minus_1;
    Ok(DomainVerdict {
        j_minus_1: MeasFn::from_fn(finest.space.len(), |a| C64::new(j[&finest.partition.block_of(a)], 0.0)),
        finite_ae,
        sigma_finite_restriction: sigma_finite,
        stabilized: finite_ae && sigma_finite,
        diverging_blocks: diverging,
        unjudged_blocks: unjudged,
        levels,
    })
}

/// `J = 1 + E(|w|^p)·E(|u|^q)^{p/q}`, the density of the measure `ν` whose
/// `L^p(ν)` is a core for `T`.
pub fn core_density(t: &WctOperator) -> MeasFn {
    t.j_minus_1().map(|z| z + 1.0)
}

/// Per-block `E(uw)`.
pub fn symbol_blocks(t: &WctOperator) -> Result<Vec<C64>> {
    block_averages(&(t.u() * t.w()), t.partition(), t.space())
}

/// `E(uw)` as a function on the atoms.
pub fn symbol(t: &WctOperator) -> Result<MeasFn> {
    Ok(from_blocks(&symbol_blocks(t)?, t.partition()))
}
