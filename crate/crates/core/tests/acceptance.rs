//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any failed.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::Instant;

use hom_negativity::cli::sweep;
use hom_negativity::generators::{
    bell, haar_unitary_2, random_local_unitary, random_mixed, random_pure, random_separable_with,
    rng_from_seed, werner, BellKind,
};
use hom_negativity::interferometer::{
    bootstrap, outcome_distribution, run_pipeline, sample_batched, table1, ConfigId, Configuration,
    Pattern, PipelineOptions,
};
use hom_negativity::invariants::{invariants_from_decomposition, invariants_from_g};
use hom_negativity::multicopy::{
    cyclically_equivalent, g_closure_14365872, g_from_tensor, g_table, GTable,
};
use hom_negativity::negativity::{coeffs_from_g, solve_negativity, witness, WitnessObservables};
use hom_negativity::qstate::{
    correlation_tensor, kron2, negativity_oracle, pauli, pauli_decompose, pt_determinant,
    DensityMatrix,
};
use hom_negativity::{Observable, Pairing};
use rayon::ThreadPoolBuilder;

const SAME_PARTY: [Observable; 7] = [
    Observable::G13,
    Observable::G24,
    Observable::G13_24,
    Observable::G13_46,
    Observable::G13_46_57,
    Observable::G24_35_68,
    Observable::G13_46_57_28,
];

/// 1000 random mixed and 1000 random pure states.
fn random_states() -> Vec<DensityMatrix> {
    (0..1000)
        .map(random_mixed)
        .chain((0..1000).map(random_pure))
        .collect()
}

/// Every pairing, of any size, on `k` copies.
fn all_pairings(k: usize) -> Vec<Pairing> {
    fn extend(free: &[usize], acc: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        out.push(acc.clone());
        for (i, &a) in free.iter().enumerate() {
            if acc.last().is_some_and(|&(l, _)| a < l) {
                continue;
            }
            for (j, &b) in free.iter().enumerate().skip(i + 1) {
                let rest: Vec<usize> = free
                    .iter()
                    .enumerate()
                    .filter(|&(x, _)| x != i && x != j)
                    .map(|(_, &q)| q)
                    .collect();
                acc.push((a, b));
                extend(&rest, acc, out);
                acc.pop();
            }
        }
    }
    let qubits: Vec<usize> = (1..=2 * k).collect();
    let mut out = Vec::new();
    extend(&qubits, &mut Vec::new(), &mut out);
    out.into_iter()
        .map(|p| Pairing::new(k, &p).unwrap())
        .collect()
}

fn max_g_diff(a: &GTable, b: &GTable, only: Option<&[Observable]>) -> f64 {
    Observable::CANONICAL
        .iter()
        .filter(|o| only.is_none_or(|s| s.contains(o)))
        .map(|&o| (a.get(o).unwrap() - b.get(o).unwrap()).abs())
        .fold(0.0, f64::max)
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for rho in random_states() {
        let a = invariants_from_decomposition(&pauli_decompose(&rho));
        let b = invariants_from_g(&g_table(&rho));
        worst = worst.max(a.max_abs_diff(&b));
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        worst < 1e-9 && secs < 60.0,
        format!("2000 states, max |I(g) - I(beta,s,p)| = {worst:.2e} (tol 1e-9), {secs:.2} s (target < 60 s)"),
    )
}

fn criterion_2() -> Outcome {
    let mut worst = 0.0f64;
    let mut errors = 0;
    for rho in random_states() {
        match solve_negativity(&coeffs_from_g(&g_table(&rho))) {
            Ok(n) => worst = worst.max((n - negativity_oracle(&rho)).abs()),
            Err(_) => errors += 1,
        }
    }
    let mut rng = rng_from_seed(2024);
    let mut nonzero = 0;
    for i in 0..1000 {
        let rho = random_separable_with(&mut rng, 1 + i % 5);
        if !matches!(solve_negativity(&coeffs_from_g(&g_table(&rho))), Ok(n) if n == 0.0) {
            nonzero += 1;
        }
    }
    check(
        worst < 1e-8 && errors == 0 && nonzero == 0,
        format!(
            "max |N - oracle| = {worst:.2e} over 2000 states (tol 1e-8), {errors} solver errors; \
             {nonzero}/1000 separable mixtures with N != 0"
        ),
    )
}

fn criterion_3() -> Outcome {
    let mut states = random_states();
    let mut rng = rng_from_seed(77);
    states.extend((0..1000).map(|i| random_separable_with(&mut rng, 1 + i % 4)));
    let mut worst = 0.0f64;
    let mut checked = 0;
    let mut mismatched = 0;
    for rho in &states {
        let w = witness(&WitnessObservables::from(&g_table(rho)));
        let det = pt_determinant(rho);
        worst = worst.max((w.det_pt - det).abs());
        if det.abs() > 1e-10 {
            checked += 1;
            if w.entangled != (negativity_oracle(rho) > 0.0) {
                mismatched += 1;
            }
        }
    }
    let boundary = witness(&WitnessObservables::from(&g_table(
        &werner(1.0 / 3.0).unwrap(),
    )))
    .det_pt;
    check(
        worst < 1e-9 && mismatched == 0 && boundary.abs() < 1e-10,
        format!(
            "max |det(g) - det| = {worst:.2e} (tol 1e-9); verdict mismatches {mismatched}/{checked}; \
             Werner p = 1/3 det = {boundary:.1e}"
        ),
    )
}

fn criterion_4() -> Outcome {
    let mut worst = 0.0f64;
    let mut worst_closure = 0.0f64;
    let mut cells = 0;
    for seed in 0..50 {
        let rho = random_mixed(10_000 + seed);
        let t = correlation_tensor(&rho);
        let g = g_table(&rho);
        let det_beta = invariants_from_g(&g).i1;
        for cfg in Configuration::all() {
            let dist = outcome_distribution(&rho, &cfg);
            for (pattern, factors) in table1(cfg.id) {
                let pattern: Pattern = pattern.parse().unwrap();
                let marginal = dist.marginal(pattern);
                let named: f64 = factors
                    .iter()
                    .map(|o| g_from_tensor(&t, &o.pairing()))
                    .product();
                worst = worst.max((marginal - named).abs());
                cells += 1;
                if cfg.id == ConfigId::B && pattern == Pattern(0b1111) {
                    worst_closure =
                        worst_closure.max((marginal - g_closure_14365872(&g, det_beta)).abs());
                }
            }
        }
    }
    check(
        cells == 64 * 50 && worst < 1e-10 && worst_closure < 1e-9,
        format!(
            "{} cells x 50 states, max |marginal - table| = {worst:.2e} (tol 1e-10); \
             config b aaaa vs closure {worst_closure:.2e} (tol 1e-9)",
            cells / 50
        ),
    )
}

fn criterion_5() -> Outcome {
    let singlet = bell(BellKind::PsiMinus);
    let c = coeffs_from_g(&g_table(&singlet));
    let n = solve_negativity(&c).unwrap();
    let det = witness(&WitnessObservables::from(&g_table(&singlet))).det_pt;
    let coeff_err = (c.a0 + 3.0).abs().max((c.a1 + 6.0).abs()).max(c.a2.abs());
    let singlet_ok = (n - 1.0).abs() < 1e-9
        && (det + 1.0 / 16.0).abs() < 1e-12
        && coeff_err < 1e-12
        && c.eval(1.0).abs() < 1e-12;

    let mixed = werner(0.0).unwrap();
    let t = correlation_tensor(&mixed);
    let mut pairing_err = 0.0f64;
    let mut pairings = 0;
    for k in 1..=4 {
        for p in all_pairings(k) {
            pairing_err =
                pairing_err.max((g_from_tensor(&t, &p) - 0.25f64.powi(p.len() as i32)).abs());
            pairings += 1;
        }
    }
    let inv = invariants_from_g(&g_table(&mixed));
    let inv_max = inv.values().iter().map(|v| v.abs()).fold(0.0, f64::max);
    let mixed_n = solve_negativity(&coeffs_from_g(&g_table(&mixed))).unwrap();
    let mixed_ok = pairing_err < 1e-15 && inv_max < 1e-14 && mixed_n == 0.0;

    let rows = sweep(0.0, 1.0, 101, None).map_err(|e| e.to_string())?;
    let sweep_err = rows
        .iter()
        .map(|r| (r.negativity_exact - (0.0f64).max((3.0 * r.p - 1.0) / 2.0)).abs())
        .fold(0.0, f64::max);
    let sweep_ok = rows.len() == 101 && sweep_err < 1e-9;

    check(
        singlet_ok && mixed_ok && sweep_ok,
        format!(
            "singlet N = {n:.12}, det = {det:.3e}, (a0,a1,a2) = ({:.3},{:.3},{:.3}); \
             I/4: {pairings} pairings within {pairing_err:.1e} of 4^-m, max |I| = {inv_max:.1e}, N = {mixed_n}; \
             Werner sweep (101 points) max error {sweep_err:.1e}",
            c.a0, c.a1, c.a2
        ),
    )
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let singlet = bell(BellKind::PsiMinus);
    let mut negs = Vec::new();
    let mut sigmas = Vec::new();
    for seed in 0..20 {
        let opts = PipelineOptions {
            z: 1_000_000,
            seed,
            ..Default::default()
        };
        let r = run_pipeline(&singlet, &opts).map_err(|e| e.to_string())?;
        negs.push(r.negativity());
        sigmas.push(r.uncertainty.negativity_std);
    }
    let (mean, spread) = mean_std(&negs);
    let sigma_hat = sigmas.iter().sum::<f64>() / sigmas.len() as f64;
    let ratio = spread / sigma_hat;

    let mut correct = [0; 2];
    for (i, (p, entangled)) in [(0.2, false), (0.5, true)].into_iter().enumerate() {
        let rho = werner(p).unwrap();
        for seed in 0..20 {
            let opts = PipelineOptions {
                z: 1_000_000,
                seed: 1000 + seed,
                bootstrap: 0,
                ..Default::default()
            };
            let r = run_pipeline(&rho, &opts).map_err(|e| e.to_string())?;
            if r.analysis.witness.entangled == entangled {
                correct[i] += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        (mean - 1.0).abs() < 0.01
            && (1.0 / 3.0..=3.0).contains(&ratio)
            && correct.iter().all(|&c| c >= 19)
            && secs < 300.0,
        format!(
            "singlet mean N = {mean:.5}, seed spread {spread:.2e} vs mean bootstrap sigma {sigma_hat:.2e} \
             (ratio {ratio:.2}, need [1/3, 3]); Werner 0.2 separable {}/20, 0.5 entangled {}/20; {secs:.1} s",
            correct[0], correct[1]
        ),
    )
}

fn criterion_7() -> Outcome {
    let mut rng = rng_from_seed(7);
    let mut lu_inv = 0.0f64;
    let mut lu_same_party = 0.0f64;
    let mut sym_all = 0.0f64;
    for trial in 0..200 {
        let rho = if trial % 2 == 0 {
            random_mixed(500 + trial)
        } else {
            random_pure(500 + trial)
        };
        let g = g_table(&rho);
        let inv = invariants_from_decomposition(&pauli_decompose(&rho));

        let rotated = rho.conjugate_by(&random_local_unitary(&mut rng));
        let g_rot = g_table(&rotated);
        lu_same_party = lu_same_party.max(max_g_diff(&g, &g_rot, Some(&SAME_PARTY)));
        lu_inv = lu_inv
            .max(inv.max_abs_diff(&invariants_from_decomposition(&pauli_decompose(&rotated))))
            .max(inv.max_abs_diff(&invariants_from_g(&g_rot)));

        let v = haar_unitary_2(&mut rng);
        sym_all = sym_all.max(max_g_diff(
            &g,
            &g_table(&rho.conjugate_by(&kron2(&v, &v))),
            None,
        ));
    }

    // the cross-party observables are not invariant under independent unitaries
    let flipped = bell(BellKind::PsiMinus).conjugate_by(&kron2(&pauli(1), &pauli(0)));
    let counterexample = g_table(&flipped).g12;

    let mut shift_err = 0.0f64;
    let mut perm_err = 0.0f64;
    let perms: [&[usize]; 3] = [&[2, 1, 3, 4], &[4, 3, 2, 1], &[2, 3, 4, 1]];
    for seed in 0..5 {
        let t = correlation_tensor(&random_mixed(900 + seed));
        for p in all_pairings(4) {
            let g = g_from_tensor(&t, &p);
            for k in 1..=4 {
                let s = p.shifted(2 * k);
                assert!(cyclically_equivalent(&p, &s));
                shift_err = shift_err.max((g_from_tensor(&t, &s) - g).abs());
            }
            for perm in perms {
                perm_err =
                    perm_err.max((g_from_tensor(&t, &p.permute_copies(perm).unwrap()) - g).abs());
            }
        }
    }
    check(
        lu_inv < 1e-10 && lu_same_party < 1e-10 && sym_all < 1e-10 && counterexample.abs() < 1e-12
            && shift_err < 1e-12 && perm_err < 1e-12,
        format!(
            "U_A x U_B (200 trials): invariants {lu_inv:.1e}, same-party g's {lu_same_party:.1e}; \
             U x U (200 trials): all 13 g's {sym_all:.1e}; cross-party g12 of flipped singlet = {counterexample} \
             (amended, see README); shifts {shift_err:.1e}, copy permutations {perm_err:.1e}"
        ),
    )
}

fn criterion_8() -> Outcome {
    let rho = random_mixed(31);
    let dist = outcome_distribution(&rho, &Configuration::canonical(ConfigId::D));
    let opts = PipelineOptions {
        z: 200_000,
        seed: 99,
        bootstrap: 20,
        batch_size: 4096,
    };
    let mut counts = Vec::new();
    let mut pipelines = Vec::new();
    for threads in [1, 2, 3, 8] {
        let pool = ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| {
            counts.push(sample_batched(&dist, 1_000_003, 5, 10_000).unwrap().counts);
            let r = run_pipeline(&rho, &opts).unwrap();
            let boot = bootstrap(&r.records, 20, 99).unwrap();
            pipelines.push((
                r.records.iter().map(|x| x.counts).collect::<Vec<_>>(),
                r.negativity().to_bits(),
                boot.negativity_std.to_bits(),
            ));
        });
    }
    let library_ok =
        counts.windows(2).all(|w| w[0] == w[1]) && pipelines.windows(2).all(|w| w[0] == w[1]);

    let exe = env!("CARGO_BIN_EXE_hom-negativity");
    let run = |threads: &str| {
        Command::new(exe)
            .args([
                "simulate",
                "--gen",
                "random-mixed:4",
                "--z",
                "100000",
                "--seed",
                "8",
                "--bootstrap",
                "10",
            ])
            .env("RAYON_NUM_THREADS", threads)
            .output()
            .unwrap()
    };
    let (one, many) = (run("1"), run("8"));
    let cli_ok = one.status.success() && one.stdout == many.stdout;
    check(
        library_ok && cli_ok,
        format!(
            "sampling, pipeline and bootstrap bit-identical on 1/2/3/8 threads: {library_ok}; \
             CLI simulate output identical on 1 vs 8 threads: {cli_ok}"
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("dual-path invariant identity", criterion_1),
        ("negativity end-to-end", criterion_2),
        ("witness exactness", criterion_3),
        ("detection-event table completeness", criterion_4),
        ("analytic endpoints", criterion_5),
        ("sampled pipeline statistics", criterion_6),
        ("invariance suites", criterion_7),
        ("determinism", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default())
        });
        match outcome {
            Ok(detail) => println!("criterion {} [{name}]: PASS  {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} [{name}]: FAIL  {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {}/8 passed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
