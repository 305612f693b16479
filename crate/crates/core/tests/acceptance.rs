//! Acceptance suite: nine property sweeps, each printed as one PASS/FAIL
//! line with its measured runtime. Exits non-zero if any criterion fails.
//!
//! Golden CLI files live in `tests/golden`; run with `UPDATE_GOLDEN=1` to
//! regenerate them.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wct_core::cli;
use wct_core::expansivity::{
    classify, delta_poly, necessary_a0_check, theta, theta_integral_form, two_expansive_consequences, ClassifyOptions,
};
use wct_core::expect::{alpha_coefficients, cond_expect, conditional_holder_slack};
use wct_core::gallery::{example_noncontractive_check, geometric_ladder, geometric_nat_space, symmetric_space};
use wct_core::measure::{lp_norm, support, AtomicMeasureSpace, MeasFn, Partition};
use wct_core::operator::{
    adjoint, apply_wct, densely_defined_check, domain_approximant, DivergenceSettings, WctOperator,
};
use wct_core::sample::{random_block_constant, random_fn, random_instance, random_real_fn, Instance, InstanceShape};
use wct_core::structure::{hyponormality_test, normality_test, polar_decompose, polar_residuals, spectral_radius, spectrum};
use wct_core::C64;

struct Outcome {
    ok: bool,
    detail: String,
}

fn check(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// `Σ f conj(g) μ` by a plain loop.
fn pairing(f: &MeasFn, g: &MeasFn, space: &AtomicMeasureSpace) -> C64 {
    (0..space.len()).map(|a| f.get(a) * g.get(a).conj() * space.weight(a)).sum()
}

/// `E(f)` recomputed from scratch: block sums over the atom list.
fn naive_expect(f: &MeasFn, part: &Partition, space: &AtomicMeasureSpace) -> MeasFn {
    MeasFn::from_fn(space.len(), |a| {
        let b = part.block_of(a);
        let (mut num, mut den) = (c(0.0), 0.0);
        for x in 0..space.len() {
            if part.block_of(x) == b {
                num += f.get(x) * space.weight(x);
                den += space.weight(x);
            }
        }
        num / den
    })
}

fn dist(f: &MeasFn, g: &MeasFn) -> f64 {
    (f - g).sup_norm()
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for i in 0..300 {
        let inst = random_instance(&mut rng, InstanceShape::default());
        let (space, part) = (&inst.space, &inst.partition);
        let n = space.len();
        let f = random_fn(&mut rng, n);
        let g = random_fn(&mut rng, n);
        let ef = cond_expect(&f, part, space).unwrap();
        let eg = cond_expect(&g, part, space).unwrap();
        let scale = 1.0 + f.sup_norm() * g.sup_norm();

        let idem = dist(&cond_expect(&ef, part, space).unwrap(), &ef);
        let naive = dist(&ef, &naive_expect(&f, part, space));
        let h = random_block_constant(&mut rng, part);
        let averaging = dist(&cond_expect(&(&h * &f), part, space).unwrap(), &(&h * &ef));
        let pos_f = f.map(|z| c(z.norm()));
        let positivity = cond_expect(&pos_f, part, space)
            .unwrap()
            .values()
            .iter()
            .fold(0.0f64, |m, z| m.max(-z.re).max(z.im.abs()));
        let selfadj = (pairing(&ef, &g, space) - pairing(&f, &eg, space)).norm();
        let mut contraction = f64::NEG_INFINITY;
        for p in [1.0, 1.5, 2.0, 3.0] {
            contraction = contraction.max(lp_norm(&ef, p, space).unwrap() - lp_norm(&f, p, space).unwrap());
        }
        // S(f) ⊆ S(E|f|)
        let support_ok = support(&f, 0.0).is_subset(&support(&cond_expect(&pos_f, part, space).unwrap(), 0.0));
        let holder = [(2.0, 2.0), (1.5, 3.0), (3.0, 1.5), (4.0, 4.0 / 3.0)]
            .iter()
            .flat_map(|&(p, q)| conditional_holder_slack(&f, &g, p, q, part, space).unwrap())
            .fold(f64::INFINITY, f64::min);

        let err = [idem, naive, averaging, positivity, selfadj / scale, contraction.max(0.0)]
            .into_iter()
            .fold(0.0f64, f64::max);
        worst = worst.max(err);
        if err > 1e-12 || !support_ok || holder < -1e-10 {
            failures.push(format!("#{i}: err {err:.2e} support {support_ok} holder {holder:.2e}"));
        }
    }
    check(
        failures.is_empty(),
        format!("300 instances, worst identity error {worst:.1e}; {}", failures.join("; ")),
    )
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let t = random_instance(&mut rng, InstanceShape::default()).operator(2.0).unwrap();
        let ts = adjoint(&t).unwrap();
        let n = t.dim();
        for i in 0..n {
            let ei = MeasFn::indicator(n, &[i]);
            let tei = apply_wct(&t, &ei).unwrap();
            for j in 0..n {
                let ej = MeasFn::indicator(n, &[j]);
                let lhs = pairing(&tei, &ej, t.space());
                let rhs = pairing(&ei, &apply_wct(&ts, &ej).unwrap(), t.space());
                worst = worst.max((lhs - rhs).norm());
            }
        }
    }
    let mut worst_lp = 0.0f64;
    for p in [1.5, 3.0] {
        for _ in 0..100 {
            let inst = random_instance(&mut rng, InstanceShape::default());
            let t = inst.operator(p).unwrap();
            let ts = adjoint(&t).unwrap();
            let f = random_fn(&mut rng, t.dim());
            let g = random_fn(&mut rng, t.dim());
            // T* written out by hand: conj(u)·E(conj(w)·g)
            let by_hand = &inst.u.conj() * &naive_expect(&(&inst.w.conj() * &g), &inst.partition, &inst.space);
            let lhs = pairing(&apply_wct(&t, &f).unwrap(), &g, t.space());
            let rhs = pairing(&f, &apply_wct(&ts, &g).unwrap(), t.space());
            worst_lp = worst_lp
                .max((lhs - rhs).norm())
                .max(dist(&by_hand, &apply_wct(&ts, &g).unwrap()));
        }
    }
    check(
        worst < 1e-10 && worst_lp < 1e-10,
        format!("basis pairs max {worst:.1e}; L^p/L^q pairing max {worst_lp:.1e}"),
    )
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut fails = 0;
    let mut worst_oracle = 0.0f64;
    for _ in 0..200 {
        let t = random_instance(&mut rng, InstanceShape::default()).operator(2.0).unwrap();
        let pair = polar_decompose(&t).unwrap();
        let r = polar_residuals(&t, &pair).unwrap();
        worst_oracle = worst_oracle.max(r.modulus_oracle);
        let ok = r.factorization <= 1e-9 * (1.0 + r.t_norm)
            && r.square <= 1e-9 * (1.0 + r.tt_norm)
            && r.partial_isometry <= 1e-9
            && r.modulus_oracle <= 1e-8;
        if !ok {
            fails += 1;
        }
    }
    check(
        fails == 0,
        format!("200 instances, {fails} failures, worst |T| vs sqrt(T*T) {worst_oracle:.1e}"),
    )
}

fn set_match(a: &[C64], b: &[C64], tol: f64) -> bool {
    a.iter().all(|x| b.iter().any(|y| (x - y).norm() <= tol)) && b.iter().all(|y| a.iter().any(|x| (x - y).norm() <= tol))
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut fails = Vec::new();
    for i in 0..200 {
        let t = random_instance(&mut rng, InstanceShape::default()).operator(2.0).unwrap();
        let rep = spectrum(&t, 1e-8).unwrap();
        let radius_gap = (spectral_radius(&t).unwrap() - rep.radius).abs();
        if !rep.nonzero_sets_match(1e-8) || radius_gap > 1e-9 {
            fails.push(format!("random #{i}"));
        }
    }

    let g = symmetric_space(8).unwrap();
    let sym = g.symmetric().unwrap();
    let v = MeasFn::from_fn(sym.space.len(), |a| c(sym.coords[a].exp()));
    let t = WctOperator::emv(v, sym.partition.clone(), sym.space.clone()).unwrap();
    let rep = spectrum(&t, 1e-8).unwrap();
    let cosh: Vec<C64> = sym.grid.iter().map(|t| c(t.cosh())).collect();
    if !(rep.nonzero_sets_match(1e-8)
        && set_match(&rep.nonzero_predicted(1e-8), &cosh, 1e-12)
        && (spectral_radius(&t).unwrap() - rep.radius).abs() <= 1e-9)
    {
        fails.push("symmetric gallery".into());
    }

    let g = geometric_nat_space(0.5, 60).unwrap();
    let geo = g.geometric().unwrap();
    let u = MeasFn::from_fn(60, |a| c(1.0 + 1.0 / (a + 1) as f64));
    let w = MeasFn::from_fn(60, |a| C64::new(((a + 1) as f64).cos(), 0.25));
    let t = WctOperator::new(u.clone(), w.clone(), geo.partition.clone(), geo.space.clone(), 2.0).unwrap();
    let rep = spectrum(&t, 1e-8).unwrap();
    let (a1, a2) = alpha_coefficients(&(&u * &w), &g).unwrap();
    if !(rep.nonzero_sets_match(1e-8)
        && set_match(&rep.nonzero_predicted(1e-8), &[a1, a2], 1e-12)
        && (spectral_radius(&t).unwrap() - rep.radius).abs() <= 1e-9)
    {
        fails.push("geometric gallery".into());
    }
    check(fails.is_empty(), format!("200 random + 2 gallery cases; failures: {fails:?}"))
}

/// Random instances biased toward the premises of the normality chain.
fn normality_instance(rng: &mut ChaCha8Rng, i: usize) -> Instance {
    let mut inst = random_instance(rng, InstanceShape::default());
    let n = inst.space.len();
    match i % 4 {
        // w = λ·conj(u) with λ > 0 block constant
        1 => {
            let lambda = random_block_constant(rng, &inst.partition).map(|z| c(z.norm() + 0.1));
            inst.w = &lambda * &inst.u.conj();
        }
        2 => inst.partition = Partition::discrete(n),
        // real pair with w a block-constant multiple of u
        3 => {
            inst.u = random_real_fn(rng, n);
            let lambda = random_block_constant(rng, &inst.partition).map(|z| c(z.re));
            inst.w = &lambda * &inst.u;
        }
        _ => {}
    }
    inst
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let tol = 1e-8;
    let mut counterexamples = 0;
    let (mut suff, mut normal, mut nonneg) = (0, 0, 0);
    for i in 0..300 {
        let t = normality_instance(&mut rng, i).operator(2.0).unwrap();
        let r = normality_test(&t, tol).unwrap();
        let h = hyponormality_test(&t, tol).unwrap();
        suff += usize::from(r.sufficient_holds);
        normal += usize::from(r.matrix_normal);
        nonneg += usize::from(h.form_nonneg);
        if (r.sufficient_holds && !r.matrix_normal)
            || (r.matrix_normal && !r.necessary_identity_holds)
            || (h.form_nonneg && !h.necessary_inequality_holds)
        {
            counterexamples += 1;
        }
    }
    check(
        counterexamples == 0 && suff > 0 && normal > 0 && nonneg > 0,
        format!(
            "300 instances, {counterexamples} counterexamples (premises held: sufficient {suff}, normal {normal}, form ≥ 0 {nonneg})"
        ),
    )
}

/// `v` on singleton blocks with moduli drawn to hit every sign pattern of
/// `(1 − |v|²)^k`.
fn multiplier(rng: &mut ChaCha8Rng, n: usize) -> MeasFn {
    let mode = rng.random_range(0..4);
    MeasFn::from_fn(n, |_| {
        let r: f64 = match mode {
            0 => 1.0,
            1 => rng.random_range(1.0..2.0),
            2 => rng.random_range(0.3..1.0),
            _ => {
                if rng.random_bool(0.5) {
                    1.0
                } else {
                    rng.random_range(0.3..2.0)
                }
            }
        };
        C64::from_polar(r, rng.random_range(0.0..std::f64::consts::TAU))
    })
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut notes = Vec::new();
    let mut ok = true;

    let mut worst = 0.0f64;
    for _ in 0..500 {
        let inst = random_instance(&mut rng, InstanceShape::default());
        let f = random_fn(&mut rng, inst.space.len());
        let n = rng.random_range(1..=6);
        let a = theta(&inst.u, &inst.partition, &inst.space, n, &f).unwrap();
        let b = theta_integral_form(&inst.u, &inst.partition, &inst.space, n, &f).unwrap();
        worst = worst.max((a - b).abs());
    }
    ok &= worst <= 1e-9;
    notes.push(format!("Θ routes {worst:.1e}"));

    let tol = 1e-9;
    let opts = ClassifyOptions {
        k_max: 4,
        horizon: 4,
        trials: 8,
        tol,
        ..ClassifyOptions::default()
    };
    let mut mismatches = 0;
    let mut expansive_seen = 0;
    for _ in 0..200 {
        let n = rng.random_range(1..=10);
        let space = wct_core::sample::random_space(&mut rng, n);
        let v = multiplier(&mut rng, n);
        let r = classify(&v, &Partition::discrete(n), &space, opts).unwrap();
        let mut hyper = true;
        for k in 1..=4 {
            let d = delta_poly(&v, k);
            let max = d.values().iter().fold(f64::NEG_INFINITY, |m, z| m.max(z.re));
            let max_abs = d.sup_norm();
            hyper &= max <= tol;
            expansive_seen += usize::from(r.is_k_expansive(k));
            if r.is_k_expansive(k) != (max <= tol)
                || r.is_k_isometry(k) != (max_abs <= tol)
                || r.is_k_hyperexpansive(k) != hyper
            {
                mismatches += 1;
            }
        }
    }
    ok &= mismatches == 0 && expansive_seen > 0;
    notes.push(format!("M_v biconditional mismatches {mismatches} ({expansive_seen} expansive verdicts)"));

    let mut violations = 0;
    let mut chain_checked = 0;
    for i in 0..200 {
        let (v, part, space) = if i % 2 == 0 {
            let n = rng.random_range(1..=10);
            let space = wct_core::sample::random_space(&mut rng, n);
            (multiplier(&mut rng, n), Partition::discrete(n), space)
        } else {
            let inst = random_instance(&mut rng, InstanceShape::default());
            (inst.u, inst.partition, inst.space)
        };
        let r = classify(&v, &part, &space, opts).unwrap();
        for k in 1..=4 {
            let a0 = necessary_a0_check(&v, &part, &space, k).unwrap();
            if r.is_k_expansive(k) && a0.iter().any(|&x| x > tol) {
                violations += 1;
            }
            if r.is_k_isometry(k) && a0.iter().any(|&x| x.abs() > tol) {
                violations += 1;
            }
        }
        if r.is_k_expansive(2) {
            chain_checked += 1;
            let rep = two_expansive_consequences(&v, &part, &space, 8, tol).unwrap();
            if !rep.chain_holds {
                violations += 1;
            }
        }
    }
    ok &= violations == 0 && chain_checked > 0;
    notes.push(format!("necessary-condition violations {violations} ({chain_checked} 2-expansive chains)"));

    let ex = example_noncontractive_check(8).unwrap();
    ok &= ex.holds;
    notes.push(format!("symmetric EM_(e^t) 2-expansive = {}", ex.two_expansive));
    check(ok, notes.join("; "))
}

/// `J − 1` per atom by direct loops.
fn naive_j(inst: &Instance, p: f64) -> Vec<f64> {
    let q = p / (p - 1.0);
    let avg = |vals: &dyn Fn(usize) -> f64, a: usize| {
        let b = inst.partition.block_of(a);
        let (mut num, mut den) = (0.0, 0.0);
        for x in 0..inst.space.len() {
            if inst.partition.block_of(x) == b {
                num += vals(x) * inst.space.weight(x);
                den += inst.space.weight(x);
            }
        }
        num / den
    };
    (0..inst.space.len())
        .map(|a| avg(&|x| inst.w.get(x).norm().powf(p), a) * avg(&|x| inst.u.get(x).norm().powf(q), a).powf(p / q))
        .collect()
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let mut fails = 0;
    let mut nontrivial = 0;
    for _ in 0..100 {
        let mut inst = random_instance(&mut rng, InstanceShape { min_atoms: 3, ..Default::default() });
        // heavy tail: scale each block of u by 10^s, s up to 8
        let scale = random_block_constant(&mut rng, &inst.partition).map(|z| c(10f64.powf(8.0 * z.re.abs())));
        inst.u = &scale * &inst.u;
        let p = [1.5, 2.0, 3.0][rng.random_range(0..3)];
        let t = inst.operator(p).unwrap();
        // f's block masses spread over decades so that cuts can exclude blocks
        let damp = random_block_constant(&mut rng, &inst.partition).map(|z| c(10f64.powf(-4.0 * z.re.abs())));
        let f = &damp * &random_fn(&mut rng, t.dim());
        let eps = 10f64.powf(rng.random_range(-4.0..-1.0));
        let approx = domain_approximant(&t, &f, eps).unwrap();
        let j = naive_j(&inst, p);
        let cut = approx.cut;
        let inside: Vec<bool> = j.iter().map(|&x| x < cut).collect();
        let g: MeasFn = MeasFn::from_fn(t.dim(), |a| if inside[a] { f.get(a) } else { c(0.0) });
        let dist_pow: f64 = (0..t.dim()).map(|a| (g.get(a) - f.get(a)).norm().powf(p) * inst.space.weight(a)).sum();
        let image = &inst.w * &naive_expect(&(&inst.u * &g), &inst.partition, &inst.space);
        let lhs: f64 = (0..t.dim()).map(|a| image.get(a).norm().powf(p) * inst.space.weight(a)).sum();
        let rhs: f64 = cut
            * (0..t.dim())
                .filter(|&a| inside[a])
                .map(|a| f.get(a).norm().powf(p) * inst.space.weight(a))
                .sum::<f64>();
        nontrivial += usize::from(inside.iter().any(|&x| !x));
        if !(dist_pow < eps && lhs <= rhs * (1.0 + 1e-12) + f64::MIN_POSITIVE && approx.certificate.holds && dist(&g, &approx.g) == 0.0) {
            fails += 1;
        }
    }
    check(fails == 0 && nontrivial >= 20, format!("100 instances, {fails} failures, {nontrivial} with a non-empty cut"))
}

fn criterion_8() -> Outcome {
    let sizes: Vec<usize> = (3..=80).collect();
    let settings = DivergenceSettings::default();
    let divergent = geometric_ladder(0.5, &sizes, |t| c(2f64.powi(t as i32)), |_| c(1.0)).unwrap();
    let bounded = geometric_ladder(0.5, &sizes, |t| c(1.0 + 1.0 / t as f64), |t| c((t as f64).cos())).unwrap();
    let d = densely_defined_check(&divergent, 2.0, settings).unwrap();
    let b = densely_defined_check(&bounded, 2.0, settings).unwrap();
    check(
        !d.densely_defined() && b.densely_defined(),
        format!(
            "u = 2^t: densely defined = {} (diverging blocks {:?}); u = 1 + 1/t: densely defined = {}",
            d.densely_defined(),
            d.diverging_blocks,
            b.densely_defined()
        ),
    )
}

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}

fn run_cli(args: &[&str], input: &str) -> cli::Outcome {
    let argv = std::iter::once("wct").chain(args.iter().copied());
    cli::run(argv, &mut input.as_bytes())
}

fn criterion_9() -> Outcome {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    let dir = golden_dir();
    let mut cases: BTreeMap<String, (Vec<&str>, String)> = BTreeMap::new();
    let families: [(&str, Vec<&str>); 2] = [
        ("symmetric", vec!["gallery", "symmetric", "8"]),
        ("geometric", vec!["gallery", "geometric", "0.5", "60"]),
    ];
    let mut fails = Vec::new();
    for (name, args) in &families {
        let spec = run_cli(args, "");
        if spec.code != 0 {
            fails.push(format!("{name}: gallery exit {}", spec.code));
            continue;
        }
        cases.insert(format!("{name}_gallery.json"), (args.clone(), String::new()));
        for (cmd, extra) in [
            ("report", vec![]),
            ("expect", vec![]),
            ("spectrum", vec![]),
            ("polar", vec![]),
            ("classify", vec!["--kmax", "2", "--seed", "7"]),
        ] {
            let mut a = vec![cmd];
            a.extend(extra);
            cases.insert(format!("{name}_{cmd}.json"), (a, spec.stdout.clone()));
        }
        cases.insert(format!("{name}_spectrum.csv"), (vec!["spectrum", "--format", "csv"], spec.stdout.clone()));
        cases.insert(
            format!("{name}_classify.csv"),
            (vec!["classify", "--format", "csv", "--seed", "7"], spec.stdout.clone()),
        );
    }
    if update {
        std::fs::create_dir_all(&dir).unwrap();
    }
    for (file, (args, input)) in &cases {
        let first = run_cli(args, input);
        let second = run_cli(args, input);
        if first != second {
            fails.push(format!("{file}: reruns differ"));
        }
        if first.code != 0 {
            fails.push(format!("{file}: exit {}", first.code));
        }
        if file.ends_with(".json") {
            let parsed: serde_json::Value = serde_json::from_str(&first.stdout).unwrap();
            if !all_finite(&parsed) {
                fails.push(format!("{file}: non-numeric leaf"));
            }
        }
        let path = dir.join(file);
        if update {
            std::fs::write(&path, &first.stdout).unwrap();
        } else {
            match std::fs::read_to_string(&path) {
                Ok(want) if want == first.stdout => {}
                Ok(_) => fails.push(format!("{file}: differs from golden")),
                Err(_) => fails.push(format!("{file}: golden missing")),
            }
        }
    }
    let sym: serde_json::Value =
        serde_json::from_str(&run_cli(&["classify", "--kmax", "2"], &run_cli(&["gallery", "symmetric", "8"], "").stdout).stdout)
            .unwrap();
    if sym["is_2_expansive"] != serde_json::Value::Bool(false) {
        fails.push("symmetric classify: is_2_expansive not false".into());
    }
    check(fails.is_empty(), format!("{} golden outputs; {fails:?}", cases.len()))
}

/// No structured non-finite markers anywhere in the document.
fn all_finite(v: &serde_json::Value) -> bool {
    match v {
        serde_json::Value::Object(m) => !m.contains_key("error") && m.values().all(all_finite),
        serde_json::Value::Array(a) => a.iter().all(all_finite),
        serde_json::Value::Number(n) => n.as_f64().is_some_and(f64::is_finite),
        _ => true,
    }
}

/// Name, check, time budget in seconds.
type Criterion = (&'static str, fn() -> Outcome, u64);

fn main() {
    let criteria: [Criterion; 9] = [
        ("conditional expectation axioms", criterion_1, 5),
        ("adjoint formula", criterion_2, 5),
        ("polar decomposition", criterion_3, 10),
        ("spectrum and radius", criterion_4, 10),
        ("normality / hyponormality chains", criterion_5, 10),
        ("expansivity", criterion_6, 30),
        ("dense-domain approximant", criterion_7, 5),
        ("ladder divergence detection", criterion_8, 5),
        ("CLI determinism and golden files", criterion_9, 5),
    ];
    let mut all_ok = true;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(*budget);
        let ok = out.ok && in_time;
        all_ok &= ok;
        println!(
            "criterion {}: {} - {name} [{:.2}s / {budget}s] {}",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            out.detail
        );
    }
    if !all_ok {
        std::process::exit(1);
    }
}
