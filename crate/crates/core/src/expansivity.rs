//! Expansivity of `EM_v` (and, through `v = u·E(|w|²)^{1/2}`, of
//! `M_w E M_u`): the forms `Θ_{T,n}(f) = Σ (−1)^i C(n,i) ‖T^i f‖²`, the
//! block polynomials `A⁰_k`, `A¹_k`, `Δ_{v,n}`, and the classification into
//! k-isometries, k-expansive and k-hyperexpansive operators.
//!
//! `Θ_{T,n}` is the quadratic form of the Hermitian matrix
//! `H_n = Σ (−1)^i C(n,i) (T*)^i T^i`, so every predicate is decided from
//! the eigenvalues of `H_n`. Random vectors only serve as witnesses.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dense::{self, CMatrix};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::expect::{block_averages, block_averages_real};
use crate::measure::{inner_product, support, AtomicMeasureSpace, MeasFn, Partition};
use crate::operator::{to_matrix, WctOperator};
use crate::sum::sum_real;
use crate::C64;

/// `C(n, i)` as a float; exact for the sizes used here.
pub fn binomial(n: usize, i: usize) -> f64 {
    if i > n {
        return 0.0;
    }
    let i = i.min(n - i);
    (0..i).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64).round()
}

/// `v = u·E(|w|²)^{1/2}`, so that `‖M_wEM_u f‖₂ = ‖EM_v f‖₂`.
pub fn reduce_to_emv(t: &WctOperator) -> Result<MeasFn> {
    t.require_hilbert()?;
    let ew = block_averages_real(&t.w().abs_pow(2.0).re(), t.partition(), t.space());
    Ok(MeasFn::from_fn(t.dim(), |a| t.u().get(a) * ew[t.partition().block_of(a)].sqrt()))
}

fn sq_norm(f: &MeasFn, space: &AtomicMeasureSpace) -> Result<f64> {
    Ok(inner_product(f, f, space)?.re)
}

/// `Θ_{EM_v, n}(f)` from repeated applications of the matrix of `EM_v`.
pub fn theta(v: &MeasFn, partition: &Partition, space: &AtomicMeasureSpace, n: usize, f: &MeasFn) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let m = to_matrix(&WctOperator::emv(v.clone(), partition.clone(), space.clone())?)?;
    space.check_fn(f)?;
    let mut power = f.clone();
    let mut terms = vec![sq_norm(f, space)?];
    for i in 1..=n {
        power = m.apply(&power);
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        terms.push(sign * binomial(n, i) * sq_norm(&power, space)?);
    }
    Ok(sum_real(terms))
}

/// `‖f‖² + Σ_{i=1..n} (−1)^i C(n,i) ∫ |E(v)|^{2(i−1)} |E(vf)|² dμ`, using
/// `(EM_v)^i f = E(v)^{i−1} E(vf)`.
pub fn theta_integral_form(
    v: &MeasFn,
    partition: &Partition,
    space: &AtomicMeasureSpace,
    n: usize,
    f: &MeasFn,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let ev = block_averages(v, partition, space)?;
    let evf = block_averages(&(v * f), partition, space)?;
    let masses = partition.block_masses(space);
    let mut terms = vec![sq_norm(f, space)?];
    for i in 1..=n {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        let integral = sum_real(
            (0..partition.n_blocks()).map(|b| ev[b].norm_sqr().powi(i as i32 - 1) * evf[b].norm_sqr() * masses[b]),
        );
        terms.push(sign * binomial(n, i) * integral);
    }
    Ok(sum_real(terms))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolyVariant {
    /// `A⁰_k(x) = Σ_{i=0..k} (−1)^i C(k,i) x^i`.
    Zero,
    /// `A¹_k(x) = Σ_{i=1..k} (−1)^i C(k,i) x^{i−1}`.
    One,
}

/// Evaluates `A⁰_k(x)` or `A¹_k(x)` by the binomial sum.
pub fn poly_a(k: usize, x: f64, variant: PolyVariant) -> f64 {
    let start = match variant {
        PolyVariant::Zero => 0,
        PolyVariant::One => 1,
    };
    sum_real((start..=k).map(|i| {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        let power = match variant {
            PolyVariant::Zero => i,
            PolyVariant::One => i - 1,
        };
        sign * binomial(k, i) * x.powi(power as i32)
    }))
}

/// `Δ_{v,n} = A⁰_n(|v|²)` atomwise.
pub fn delta_poly(v: &MeasFn, n: usize) -> MeasFn {
    v.map(|z| C64::new(poly_a(n, z.norm_sqr(), PolyVariant::Zero), 0.0))
}

/// `A⁰_k(|E(v)|²)` per block.
pub fn necessary_a0_check(v: &MeasFn, partition: &Partition, space: &AtomicMeasureSpace, k: usize) -> Result<Vec<f64>> {
    Ok(block_averages(v, partition, space)?
        .iter()
        .map(|z| poly_a(k, z.norm_sqr(), PolyVariant::Zero))
        .collect())
}

/// Whether conditional Cauchy–Schwarz is an equality for every `f`, i.e.
/// `|E(vf)|² = E(|v|²)E(|f|²)`. On an atomic space this happens exactly
/// when every block meeting `S(v)` is a singleton.
pub fn cauchy_schwarz_equality(v: &MeasFn, partition: &Partition, tol: f64) -> bool {
    let s = support(v, tol);
    partition
        .blocks()
        .iter()
        .all(|block| block.len() == 1 || block.iter().all(|a| !s.contains(a)))
}

/// `1 + E(|v|²)·A¹_k(|E(v)|²)` per block.
pub fn sufficient_margin(v: &MeasFn, partition: &Partition, space: &AtomicMeasureSpace, k: usize) -> Result<Vec<f64>> {
    let ev = block_averages(v, partition, space)?;
    let ev2 = block_averages_real(&v.abs_pow(2.0).re(), partition, space);
    Ok(ev
        .iter()
        .zip(&ev2)
        .map(|(e, m)| 1.0 + m * poly_a(k, e.norm_sqr(), PolyVariant::One))
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassifyOptions {
    pub k_max: usize,
    pub horizon: usize,
    /// Random vectors tried when looking for a witness.
    pub trials: usize,
    pub tol: f64,
    pub seed: u64,
    pub exec: Execution,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            k_max: 4,
            horizon: 20,
            trials: 64,
            tol: 1e-9,
            seed: 0,
            exec: Execution::default(),
        }
    }
}

/// A vector showing why a predicate fails.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub f: MeasFn,
    /// `Θ_{T,n}(f)` by the direct matrix-power route.
    pub theta: f64,
    /// `"random"` or `"eigenvector"`.
    pub source: &'static str,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevelVerdict {
    pub n: usize,
    pub is_isometry: bool,
    pub is_expansive: bool,
    pub is_hyperexpansive: bool,
    pub max_eigenvalue: f64,
    pub min_eigenvalue: f64,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NecessaryFlags {
    pub k: usize,
    /// `A⁰_k(|E(v)|²)` per block.
    pub block_values: Vec<f64>,
    pub all_zero: bool,
    pub all_nonpositive: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassificationReport {
    /// Levels `1..=k_max`.
    pub levels: Vec<LevelVerdict>,
    /// `Θ_{T,n} ≤ 0` for every `n ≤ horizon`.
    pub completely_hyperexpansive_up_to_horizon: bool,
    pub horizon: usize,
    /// Largest eigenvalue of `H_n` for `n = 1..=horizon`.
    pub horizon_max_eigenvalues: Vec<f64>,
    pub necessary: Vec<NecessaryFlags>,
    pub tol: f64,
}

impl ClassificationReport {
    pub fn level(&self, k: usize) -> &LevelVerdict {
        &self.levels[k - 1]
    }

    pub fn is_k_isometry(&self, k: usize) -> bool {
        self.level(k).is_isometry
    }

    pub fn is_k_expansive(&self, k: usize) -> bool {
        self.level(k).is_expansive
    }

    pub fn is_k_hyperexpansive(&self, k: usize) -> bool {
        self.level(k).is_hyperexpansive
    }
}

/// `H_1, …, H_horizon` in the orthonormal basis, via the recursion
/// `H_n = H_{n−1} − T* H_{n−1} T`, which expands to the binomial sum
/// without forming large alternating terms.
pub fn theta_forms(s: &CMatrix, horizon: usize) -> Vec<CMatrix> {
    let n = s.nrows();
    let mut h = CMatrix::identity(n, n);
    let mut out = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        h = dense::hermitize(&(&h - s.adjoint() * &h * s));
        out.push(h.clone());
    }
    out
}

pub fn classify(v: &MeasFn, partition: &Partition, space: &AtomicMeasureSpace, opts: ClassifyOptions) -> Result<ClassificationReport> {
    if opts.k_max == 0 {
        return Err(Error::InvalidArgument("k_max must be at least 1".into()));
    }
    if opts.horizon < opts.k_max {
        return Err(Error::HorizonTooSmall {
            horizon: opts.horizon,
            k_max: opts.k_max,
        });
    }
    let t = WctOperator::emv(v.clone(), partition.clone(), space.clone())?;
    let s = to_matrix(&t)?.symmetrized();
    let forms = theta_forms(&s, opts.horizon);
    let spectra = opts.exec.map_slice(&forms[..opts.k_max], dense::hermitian_eigen);
    let tol = opts.tol;

    let sqrt_w: Vec<f64> = space.weights().iter().map(|m| m.sqrt()).collect();
    let quad = |h: &CMatrix, f: &MeasFn| {
        let y = nalgebra::DVector::from_iterator(f.len(), (0..f.len()).map(|a| f.get(a) * sqrt_w[a]));
        (y.adjoint() * h * &y)[(0, 0)].re
    };

    let mut levels = Vec::with_capacity(opts.k_max);
    let mut hyper = true;
    for n in 1..=opts.k_max {
        let (values, vectors) = &spectra[n - 1];
        let max_eigenvalue = *values.last().expect("non-empty space");
        let min_eigenvalue = values[0];
        let is_expansive = max_eigenvalue <= tol;
        let is_isometry = max_eigenvalue.abs().max(min_eigenvalue.abs()) <= tol;
        hyper &= is_expansive;

        // a failing predicate gets a witness: Θ > tol if not expansive,
        // Θ < −tol if expansive but not an isometry
        let witness = if is_isometry {
            None
        } else {
            let sign = if is_expansive { -1.0 } else { 1.0 };
            let h = &forms[n - 1];
            let candidates = opts.exec.map_range(opts.trials, |i| {
                let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add((n as u64) << 32).wrapping_add(i as u64));
                let f = MeasFn::from_fn(space.len(), |_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
                let score = sign * quad(h, &f);
                (score, f)
            });
            let best = candidates
                .into_iter()
                .filter(|(score, _)| *score > tol)
                .max_by(|a, b| a.0.total_cmp(&b.0));
            let (f, source) = match best {
                Some((_, f)) => (f, "random"),
                None => {
                    let col = if is_expansive { 0 } else { values.len() - 1 };
                    let f = MeasFn::from_fn(space.len(), |a| vectors[(a, col)] / sqrt_w[a]);
                    (f, "eigenvector")
                }
            };
            Some(Witness {
                theta: theta(v, partition, space, n, &f)?,
                f,
                source,
            })
        };
        levels.push(LevelVerdict {
            n,
            is_isometry,
            is_expansive,
            is_hyperexpansive: hyper,
            max_eigenvalue,
            min_eigenvalue,
            witness,
        });
    }

    // levels past k_max only need their top eigenvalue
    let tail = opts.exec.map_slice(&forms[opts.k_max..], dense::max_eigenvalue_hermitian);
    let horizon_max_eigenvalues: Vec<f64> = spectra
        .iter()
        .map(|(values, _)| *values.last().expect("non-empty"))
        .chain(tail)
        .collect();
    let necessary = (1..=opts.k_max)
        .map(|k| {
            let block_values = necessary_a0_check(v, partition, space, k)?;
            Ok(NecessaryFlags {
                k,
                all_zero: block_values.iter().all(|x| x.abs() <= tol),
                all_nonpositive: block_values.iter().all(|&x| x <= tol),
                block_values,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ClassificationReport {
        levels,
        completely_hyperexpansive_up_to_horizon: horizon_max_eigenvalues.iter().all(|&x| x <= tol),
        horizon: opts.horizon,
        horizon_max_eigenvalues,
        necessary,
        tol,
    })
}

/// Outcome of the completely-alternating test for `φ(n) = x^n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlternatingSeqVerdict {
    pub x: f64,
    pub horizon: usize,
    /// `min(−Σ_i (−1)^i C(n,i) x^{m+i})` over the admissible `(m, n)`.
    pub min_slack: f64,
    pub holds: bool,
}

/// Checks `Σ_{i=0..n} (−1)^i C(n,i) x^{m+i} ≤ 1e-12` for all `m ≥ 0`,
/// `1 ≤ n`, `m + n ≤ horizon`.
pub fn completely_alternating_check(x: f64, horizon: usize) -> Result<AlternatingSeqVerdict> {
    if horizon < 2 {
        return Err(Error::InvalidArgument(format!("horizon {horizon} < 2")));
    }
    if !(x >= 0.0) {
        return Err(Error::InvalidArgument(format!("x = {x} must be nonnegative")));
    }
    let mut worst = f64::NEG_INFINITY;
    for n in 1..=horizon {
        for m in 0..=(horizon - n) {
            let sum = sum_real((0..=n).map(|i| {
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                sign * binomial(n, i) * x.powi((m + i) as i32)
            }));
            worst = worst.max(sum);
        }
    }
    Ok(AlternatingSeqVerdict {
        x,
        horizon,
        min_slack: -worst,
        holds: worst <= 1e-12,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TwoExpansiveReport {
    /// Automatic on a finite space.
    pub domain_invariant: bool,
    /// `|E(v)|²` per block.
    pub block_moduli: Vec<f64>,
    /// `|E(v)|^{2k} ≥ |E(v)|^{2(k−1)} − tol` for `k = 1..=k_max`.
    pub chain_holds: bool,
    pub min_chain_slack: f64,
}

/// Consequences of 2-expansivity for `EM_v`: the block moduli satisfy
/// `|E(v)|^{2k} ≥ |E(v)|^{2(k−1)}` for every `k`.
pub fn two_expansive_consequences(
    v: &MeasFn,
    partition: &Partition,
    space: &AtomicMeasureSpace,
    k_max: usize,
    tol: f64,
) -> Result<TwoExpansiveReport> {
    let opts = ClassifyOptions {
        k_max: 2,
        horizon: 2,
        trials: 0,
        tol,
        ..ClassifyOptions::default()
    };
    if !classify(v, partition, space, opts)?.is_k_expansive(2) {
        return Err(Error::PreconditionNot2Expansive);
    }
    let block_moduli: Vec<f64> = block_averages(v, partition, space)?.iter().map(|z| z.norm_sqr()).collect();
    let mut min_chain_slack = f64::INFINITY;
    for &x in &block_moduli {
        for k in 1..=k_max.max(1) {
            min_chain_slack = min_chain_slack.min(x.powi(k as i32) - x.powi(k as i32 - 1));
        }
    }
    Ok(TwoExpansiveReport {
        domain_invariant: true,
        block_moduli,
        chain_holds: min_chain_slack >= -tol,
        min_chain_slack,
    })
}
