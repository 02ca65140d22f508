//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! (run with --nocapture to see them; the test verdicts mirror the lines).
//!
//! Criterion 3a asserts strict emptiness of strata whose generic
//! codimension exceeds the ambient dimension. Random sections over small
//! fields do occasionally carry points on such strata (the locus of
//! sections with one has codimension ~1 in coefficient space, so a q^-1
//! fraction of samples hits it). The assertion is kept strict rather than
//! loosened; its failure message reports the measured rate.

use std::sync::OnceLock;
use std::time::Instant;

use fqsing::criteria::{
    check_ci, codim_tb, corollary_sweep, CodimQuery, ExceptionSets,
};
use fqsing::ffield::Field;
use fqsing::localalg::{self, Mu, QfTag, QuadraticForm};
use fqsing::poly::{Poly, VarTable};
use fqsing::powerseries::{LocalAutomorphism, TruncatedSeries};
use fqsing::strata::{self, max_extension_within, tb_symbol_at, Section, StrataReport};

const BUDGET: u64 = 10_000_000;

fn line(criterion: &str, pass: bool, detail: &str) {
    println!("acceptance {criterion}: {} - {detail}", if pass { "PASS" } else { "FAIL" });
}

// ---------------------------------------------------------------------------
// 1. criterion tables
// ---------------------------------------------------------------------------

#[test]
fn criterion_1_exact_tables() {
    let t0 = Instant::now();
    let quartic = check_ci(4, &[4], 2);
    let sextic = check_ci(5, &[6], 2);
    let octic = check_ci(9, &[8], 2);
    let elapsed = t0.elapsed();

    let quartic_ok = !quartic.verdict
        && quartic.h1_exception_hit
        && quartic.h1_pair == (1, 3)
        && quartic.h1_half
        && quartic.h1_third
        && quartic.h2
        && quartic.h3;
    let pass = quartic_ok && sextic.verdict && octic.verdict && elapsed.as_millis() < 3;
    line(
        "1 (criterion tables)",
        pass,
        &format!(
            "quartic fails exactly on (1,3); N=5 d=6 verdict {}; N=9 d=8 verdict {}; {:?} for all three",
            sextic.verdict, octic.verdict, elapsed
        ),
    );
    assert!(quartic_ok, "quartic threefold must fail exactly on the (1,3) exception");
    assert!(sextic.verdict && octic.verdict);
    assert!(elapsed.as_millis() < 3, "three checks took {elapsed:?}, budget 1 ms each");
}

// ---------------------------------------------------------------------------
// 2. corollary sweep + mutation
// ---------------------------------------------------------------------------

#[test]
fn criterion_2_corollary_sweep() {
    let t0 = Instant::now();
    let clean = corollary_sweep(40, &ExceptionSets::standard());
    let corrupted = corollary_sweep(40, &ExceptionSets::standard().without_prime_pair((1, 2)));
    let elapsed = t0.elapsed();

    let pass = clean.ok
        && !corrupted.ok
        && !corrupted.table_mismatches.is_empty()
        && elapsed.as_secs() < 60;
    line(
        "2 (corollary sweep)",
        pass,
        &format!(
            "{} cases, {} counterexamples, mutation produced {} mismatches, {:?}",
            clean.cases_checked,
            clean.counterexamples.len(),
            corrupted.table_mismatches.len(),
            elapsed
        ),
    );
    assert!(clean.ok, "sweep counterexamples: {:?}", clean.counterexamples);
    assert!(clean.cases_checked > 0);
    assert!(!corrupted.ok && corrupted.table_mismatches.iter().any(|m| m.pair == (1, 2)));
    assert!(elapsed.as_secs() < 60, "sweep took {elapsed:?}");
}

// ---------------------------------------------------------------------------
// 3. codimension oracle vs brute-force scans (shared scan cache)
// ---------------------------------------------------------------------------

struct Cfg {
    n: u32,
    e: u32,
    d: u32,
    p: u64,
}

const CONFIGS: [Cfg; 3] = [
    Cfg { n: 3, e: 1, d: 3, p: 5 },
    Cfg { n: 4, e: 2, d: 3, p: 5 },
    Cfg { n: 4, e: 1, d: 3, p: 7 },
];
const SAMPLES: u64 = 200;

fn scans() -> &'static Vec<Vec<StrataReport>> {
    static CACHE: OnceLock<Vec<Vec<StrataReport>>> = OnceLock::new();
    CACHE.get_or_init(|| {
        CONFIGS
            .iter()
            .map(|cfg| {
                let field = Field::new(cfg.p, 1).unwrap();
                let m_max = max_extension_within(cfg.p, cfg.n, BUDGET);
                (0..SAMPLES)
                    .map(|seed| {
                        let s = Section::sample(&field, cfg.n, cfg.e, cfg.d, seed, true).unwrap();
                        strata::strata_scan_seeded(&s, m_max, BUDGET, Some(seed)).unwrap()
                    })
                    .collect()
            })
            .collect()
    })
}

#[test]
fn criterion_3a_deep_strata_empty() {
    let reports = scans();
    let mut violations = 0u64;
    let mut scanned = 0u64;
    let mut examples = Vec::new();
    for (cfg, runs) in CONFIGS.iter().zip(reports) {
        for rep in runs {
            scanned += 1;
            for est in &rep.estimates {
                if est.codim_formula > cfg.n as i64 && est.counts.iter().any(|&c| c > 0) {
                    violations += 1;
                    if examples.len() < 5 {
                        examples.push(format!(
                            "n={} e={} q={} seed={:?} symbol=({},{}) codim={} counts={:?}",
                            cfg.n, cfg.e, cfg.p, rep.seed, est.i, est.j, est.codim_formula, est.counts
                        ));
                    }
                    break;
                }
            }
        }
    }
    let pass = violations == 0;
    line(
        "3a (strata beyond codim n empty)",
        pass,
        &format!("{violations}/{scanned} scans carry a point on a stratum with codim > n; e.g. {examples:?}"),
    );
    assert_eq!(
        violations, 0,
        "strata of codimension > n were non-empty in {violations}/{scanned} scans \
         (a ~1/q fraction of random sections carries such a point; first cases: {examples:?})"
    );
}

#[test]
fn criterion_3b_dimension_estimates() {
    let reports = scans();
    let mut all_pass = true;
    let mut detail = String::new();
    for (cfg, runs) in CONFIGS.iter().zip(reports) {
        let mut good = 0u64;
        for rep in runs {
            let ok = rep.estimates.iter().all(|est| {
                if est.codim_formula > cfg.n as i64 {
                    return true; // measured by 3a
                }
                match est.estimate {
                    // no points on the top extension: nothing to estimate
                    None => true,
                    Some(dim) => (dim - est.expected_dim).abs() <= 1,
                }
            });
            good += ok as u64;
        }
        let frac = good as f64 / SAMPLES as f64;
        detail.push_str(&format!(
            "(n={},e={},q={}): {}/{} within +-1; ",
            cfg.n, cfg.e, cfg.p, good, SAMPLES
        ));
        if frac < 0.9 {
            all_pass = false;
        }
    }
    line("3b (dimension estimates within +-1)", all_pass, &detail);
    assert!(all_pass, "{detail}");
}

// ---------------------------------------------------------------------------
// 4. characteristic-2 dichotomy
// ---------------------------------------------------------------------------

#[test]
fn criterion_4_char2_dichotomy() {
    // exact parity of the second differential at every scanned critical
    // point with one-dimensional cokernel, over F_2 and F_4
    let mut critical_points = 0u64;
    let mut parity_failures = 0u64;
    let parity_cases: [(u64, u32, u32, u32, u32, u64); 3] = [
        // p, k, n, e, m_max, seeds
        (2, 1, 4, 2, 2, 100),
        (2, 2, 3, 2, 1, 100),
        (2, 2, 4, 2, 1, 30),
    ];
    for (p, k, n, e, m_max, seeds) in parity_cases {
        let field = Field::new(p, k).unwrap();
        for seed in 0..seeds {
            let s = Section::sample(&field, n, e, 3, seed, true).unwrap();
            for m in 1..=m_max {
                let emb = fqsing::ffield::Embedding::new(&field, m).unwrap();
                let big = s.embed(&emb);
                let target = emb.target().clone();
                let q = target.order();
                let total = (q as u128).pow(n);
                let mut point = vec![target.zero(); n as usize];
                for idx in 0..total {
                    let mut rest = idx;
                    for c in point.iter_mut().rev() {
                        *c = target.from_index((rest % q as u128) as u64);
                        rest /= q as u128;
                    }
                    let sym = tb_symbol_at(&big, &point);
                    if sym.i == 1 {
                        critical_points += 1;
                        if sym.second_rank % 2 != 0 {
                            parity_failures += 1;
                        }
                    }
                }
            }
        }
    }

    // over F_5 with (n, e) = (4, 2) the open second-order stratum fills up;
    // over F_2 the even-rank constraint (rank <= 2 < 3) forces it empty
    let f5 = Field::new(5, 1).unwrap();
    let mut f5_nonempty = 0u64;
    for seed in 0..100u64 {
        let s = Section::sample(&f5, 4, 2, 3, seed, true).unwrap();
        let rep = strata::strata_scan(&s, 2, BUDGET).unwrap();
        if rep.counts_for(1, 0).iter().any(|&c| c > 0) {
            f5_nonempty += 1;
        }
    }
    let f2 = Field::new(2, 1).unwrap();
    let mut f2_nonempty = 0u64;
    for seed in 0..100u64 {
        let s = Section::sample(&f2, 4, 2, 3, seed, true).unwrap();
        let rep = strata::strata_scan(&s, 5, BUDGET).unwrap();
        if rep.counts_for(1, 0).iter().any(|&c| c > 0) {
            f2_nonempty += 1;
        }
    }

    let pass = parity_failures == 0 && f5_nonempty >= 90 && f2_nonempty == 0;
    line(
        "4 (char-2 dichotomy)",
        pass,
        &format!(
            "{critical_points} critical points all even-rank ({parity_failures} failures); \
             Sigma^(1,0) nonempty {f5_nonempty}/100 over F_5, {f2_nonempty}/100 over F_2"
        ),
    );
    assert_eq!(parity_failures, 0);
    assert!(critical_points > 0);
    assert!(f5_nonempty >= 90, "only {f5_nonempty}/100 seeds nonempty over F_5");
    assert_eq!(f2_nonempty, 0, "{f2_nonempty} seeds nonempty over F_2");
}

// ---------------------------------------------------------------------------
// 5. Morse lemma round trip
// ---------------------------------------------------------------------------

#[test]
fn criterion_5_morse_round_trip() {
    use rand::{Rng, SeedableRng};
    let t0 = Instant::now();
    let mut checked = 0u64;
    for (p, k) in [(5u64, 1u32), (7, 1), (2, 1), (2, 2)] {
        let field = Field::new(p, k).unwrap();
        let n: u32 = if p == 2 { 4 } else { 3 };
        let trunc = 6u32;
        let vars = VarTable::xs(n);
        let (tag, rank) = if p == 2 { (QfTag::Symplectic, n) } else { (QfTag::DiagonalSquares, n) };
        let q0 = localalg::normal_form_poly(&field, n, rank, tag);
        for seed in 0..100u64 {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            // nondegenerate quadric: invertible change applied to q0
            let lin = loop {
                let m: Vec<Vec<_>> = (0..n as usize)
                    .map(|_| {
                        (0..n as usize)
                            .map(|_| field.from_index(rng.gen_range(0..field.order())))
                            .collect()
                    })
                    .collect();
                if let Ok(aut) = LocalAutomorphism::from_linear(&field, &m, trunc) {
                    break aut;
                }
            };
            let quadric = lin.apply(&TruncatedSeries::from_poly(q0.clone(), trunc));
            // random order-3 noise
            let noise = Poly::from_terms(
                &field,
                n,
                fqsing::poly::monomials_up_to(n, trunc)
                    .into_iter()
                    .filter(|m| m.total_degree() >= 3)
                    .map(|m| (m, field.from_index(rng.gen_range(0..field.order())))),
            );
            let f = quadric.add(&TruncatedSeries::from_poly(noise, trunc));
            let res = localalg::split(&f, 0, true).unwrap();
            assert_eq!(res.rank, n, "full-rank quadric must split completely");
            assert_eq!(res.extension_degree, 1, "base-field quadric needs no extension");
            // residual must be free of every active variable
            for (m, _) in res.residual.poly().terms() {
                assert_eq!(m.total_degree(), 0, "active monomial survived in the residual");
            }
            // exact certificate at order 6
            let lhs = res.phi.apply(&f);
            let rhs = res.quadratic.add(&res.residual);
            assert!(lhs.sub(&rhs).is_zero(), "round trip failed at order {trunc}");
            checked += 1;
        }
        let _ = &vars;
    }
    let elapsed = t0.elapsed();
    let pass = checked == 400 && elapsed.as_secs() < 30;
    line(
        "5 (Morse round trip)",
        pass,
        &format!("{checked} instances split exactly at order 6 in {elapsed:?}"),
    );
    assert_eq!(checked, 400);
    assert!(elapsed.as_secs() < 30, "took {elapsed:?}, budget 30 s");
}

// ---------------------------------------------------------------------------
// 6. Milnor / determinacy oracles
// ---------------------------------------------------------------------------

#[test]
fn criterion_6_milnor_oracles() {
    use rand::{Rng, SeedableRng};
    // mu(sum of squares) = 1 for every odd p and n <= 4
    for p in [3u64, 5, 7] {
        let field = Field::new(p, 1).unwrap();
        for n in 1..=4u32 {
            let vars = VarTable::xs(n);
            let text = (1..=n).map(|i| format!("x{i}^2")).collect::<Vec<_>>().join(" + ");
            let f = TruncatedSeries::parse(&text, &vars, 7, &field).unwrap();
            let res = localalg::milnor_number(&f, 6).unwrap();
            assert_eq!(res.mu, Mu::Finite(1), "mu = 1 for the quadric, p={p}, n={n}");
            assert_eq!(localalg::determinacy_bound(&f, 6).unwrap(), Some(2));
        }
    }
    // mu(x^3 + y^3) = 4 over F_7
    let f7 = Field::new(7, 1).unwrap();
    let vars = VarTable::xs(2);
    let cubic = TruncatedSeries::parse("x1^3 + x2^3", &vars, 8, &f7).unwrap();
    assert_eq!(localalg::milnor_number(&cubic, 7).unwrap().mu, Mu::Finite(4));

    // invariance under 50 random automorphisms per instance
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
    let mut tested = 0;
    for (field, text, expect) in [
        (f7.clone(), "x1^3 + x2^3", 4u64),
        (f7.clone(), "x1^2 + x2^2", 1),
        (Field::new(5, 1).unwrap(), "x1^2 + x2^3", 2),
    ] {
        let trunc = 7u32;
        let f = TruncatedSeries::parse(text, &vars, trunc, &field).unwrap();
        for _ in 0..50 {
            let phi = loop {
                let images: Vec<TruncatedSeries> = (0..2)
                    .map(|_| {
                        let p = Poly::from_terms(
                            &field,
                            2,
                            fqsing::poly::monomials_up_to(2, 2)
                                .into_iter()
                                .filter(|m| m.total_degree() >= 1)
                                .map(|m| {
                                    (m, field.from_index(rng.gen_range(0..field.order())))
                                }),
                        );
                        TruncatedSeries::from_poly(p, trunc)
                    })
                    .collect();
                if let Ok(aut) = LocalAutomorphism::new(images) {
                    break aut;
                }
            };
            let moved = localalg::milnor_number(&phi.apply(&f), trunc - 1).unwrap();
            assert_eq!(moved.mu, Mu::Finite(expect), "mu drifted under {text}");
            tested += 1;
        }
    }
    line("6 (Milnor/determinacy oracles)", true, &format!("exact values and {tested} invariance checks"));
}

// ---------------------------------------------------------------------------
// 7. quadratic-form classification
// ---------------------------------------------------------------------------

#[test]
fn criterion_7_qf_classification() {
    use rand::{Rng, SeedableRng};
    let fields: Vec<Field> = vec![
        Field::new(2, 1).unwrap(),
        Field::new(3, 1).unwrap(),
        Field::new(2, 2).unwrap(),
        Field::new(5, 1).unwrap(),
        Field::new(7, 1).unwrap(),
        Field::new(2, 3).unwrap(),
    ];
    let mut classified = 0u64;
    for field in &fields {
        let q = field.order();
        for n in 1..=4u32 {
            let ncoef = (n * (n + 1) / 2) as u32;
            let space: u128 = (q as u128).pow(ncoef);
            let keys: Vec<(u16, u16)> =
                (0..n as u16).flat_map(|a| (a..n as u16).map(move |b| (a, b))).collect();
            let mut handle = |indices: &[u64]| {
                let mut qf = QuadraticForm::new(field, n);
                for (key, &ci) in keys.iter().zip(indices) {
                    qf.set(key.0, key.1, field.from_index(ci));
                }
                // classify certifies the transform by substitution internally
                let nf = qf.classify(true).unwrap();
                if field.characteristic() == 2 {
                    assert_eq!(nf.rank % 2, 0, "odd symplectic rank");
                }
                assert_eq!(nf.rank, qf.polar_rank());
                classified += 1;
            };
            if space <= 1_000_000 {
                // exhaustive
                for raw in 0..space {
                    let mut rest = raw;
                    let mut indices = vec![0u64; keys.len()];
                    for slot in indices.iter_mut() {
                        *slot = (rest % q as u128) as u64;
                        rest /= q as u128;
                    }
                    handle(&indices);
                }
            } else {
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
                for _ in 0..10_000 {
                    let indices: Vec<u64> =
                        (0..keys.len()).map(|_| rng.gen_range(0..q)).collect();
                    handle(&indices);
                }
            }
        }
    }
    line(
        "7 (quadratic forms)",
        true,
        &format!("{classified} forms classified with certified transforms; orbit oracle in the library tests"),
    );
    assert!(classified > 100_000);
}

// ---------------------------------------------------------------------------
// 8. cover properties
// ---------------------------------------------------------------------------

#[test]
fn criterion_8_cover_properties() {
    use fqsing::covers;
    let mut checked_counts = 0u64;
    let cases: Vec<(u64, u32, Vec<&str>, u32)> = vec![
        (2, 1, vec!["x1^3"], 11),
        (2, 2, vec!["x1^2 + x1*x2"], 3),
        (3, 2, vec!["x1^2 + x2^2"], 2),
        (3, 3, vec!["x1*x2", "x2 + x3^2"], 1),
        (5, 2, vec!["x1^2 + x2^2"], 2),
        (2, 3, vec!["x1*x2 + x3^2", "x2"], 2),
    ];
    for (p, n, polys, m_max) in cases {
        let field = Field::new(p, 1).unwrap();
        let vars = VarTable::xs(n);
        let ps: Vec<Poly> =
            polys.iter().map(|t| fqsing::poly::parse_poly(t, &vars, &field).unwrap()).collect();
        let d = ps.iter().filter_map(|q| q.total_degree()).max().unwrap_or(0);
        let s = Section::new(&field, n, ps, d).unwrap();
        let chart = covers::build_cover(&s, None).unwrap();
        for m in 1..=m_max {
            let expected = (p as u128).pow(m * n) as u64;
            if expected as u128 > 200_000 {
                continue;
            }
            let count = covers::cover_point_count(&chart, m, BUDGET).unwrap();
            assert_eq!(count, expected, "|Y(F_{{{p}^{m}}})| for {polys:?}");
            let sing = covers::cover_singular_points(&chart, m, BUDGET).unwrap();
            let lifted = covers::lifted_critical_points(&chart, m, BUDGET).unwrap();
            assert_eq!(sing, lifted, "singular locus vs lifted Sigma^1 for {polys:?}, m={m}");
            checked_counts += 1;
        }
    }

    // t^2 - x^3 over F_2: integral, not normal
    let f2 = Field::new(2, 1).unwrap();
    let vars = VarTable::xs(1);
    let s = Section::new(
        &f2,
        1,
        vec![fqsing::poly::parse_poly("x1^3", &vars, &f2).unwrap()],
        3,
    )
    .unwrap();
    let rep = strata::strata_scan(&s, 4, BUDGET).unwrap();
    let verdict = covers::cover_classify(&s, &rep);
    let cusp_ok = verdict.integral && !verdict.normal;
    line(
        "8 (cover properties)",
        cusp_ok,
        &format!("{checked_counts} point-count and singular-locus checks; cusp cover integral={} normal={}",
            verdict.integral, verdict.normal),
    );
    assert!(checked_counts >= 10);
    assert!(cusp_ok, "t^2 - x^3 must classify integral and not normal");
}

// ---------------------------------------------------------------------------
// 9. determinism across runs and thread counts
// ---------------------------------------------------------------------------

#[test]
fn criterion_9_determinism() {
    use std::process::Command;
    let bin = env!("CARGO_BIN_EXE_fqsing");
    let dir = std::env::temp_dir().join("fqsing-acceptance");
    std::fs::create_dir_all(&dir).unwrap();
    let section_path = dir.join("cusp.txt");
    std::fs::write(&section_path, "x1^3\n").unwrap();
    let section = section_path.to_str().unwrap();

    let golden: Vec<Vec<String>> = vec![
        svec(&["check-ci", "--N", "4", "--degrees", "4", "--p", "2"]),
        svec(&["check-ci", "--N", "12", "--degrees", "5,6", "--auto"]),
        svec(&["codim", "--n", "4", "--e", "2", "--i", "1", "--j", "1", "--char2"]),
        svec(&["check-bundle", "--n", "4", "--e", "1", "--p", "2"]),
        svec(&["milnor", "--field", "7", "--n", "2", "--f", "x1^3+x2^3"]),
        svec(&["determinacy", "--field", "5", "--n", "2", "--f", "x1^2+x2^2"]),
        svec(&["versal", "--field", "7", "--n", "1", "--f", "x1^3"]),
        svec(&["classify-qf", "--field", "2", "--n", "3", "--q", "x1^2+x1*x2+x3^2"]),
        svec(&["split", "--field", "5", "--n", "2", "--f", "x1^2+x1*x2^2", "--trunc", "4"]),
        svec(&["strata-scan", "--field", "5", "--n", "3", "--e", "1", "--deg", "3", "--seed", "42", "--ext-max", "2"]),
        svec(&["cover", "--field", "2", "--n", "1", "--section", section, "--p", "2", "--ext-max", "3"]),
        svec(&["mori", "--N", "3", "--degrees", "2", "--p", "2", "--seed", "42"]),
        svec(&["sweep", "--max", "15"]),
        svec(&["corollary", "--N", "12", "--degrees", "5,6"]),
    ];

    let mut checked = 0;
    for args in &golden {
        let run = |threads: &str| -> (Vec<u8>, bool) {
            let out = Command::new(bin)
                .arg("--threads")
                .arg(threads)
                .args(args)
                .output()
                .expect("binary runs");
            (out.stdout, out.status.success())
        };
        let (a, ok_a) = run("1");
        let (b, _) = run("1");
        let (c, _) = run("4");
        assert!(ok_a || args[0] == "check-ci", "command failed: {args:?}");
        assert_eq!(a, b, "two identical runs differ for {args:?}");
        assert_eq!(a, c, "thread counts 1 and 4 differ for {args:?}");
        checked += 1;
    }
    line("9 (determinism)", true, &format!("{checked} golden commands byte-identical across runs and threads"));
}

fn svec(parts: &[&str]) -> Vec<String> {
    parts.iter().map(|s| s.to_string()).collect()
}

// ---------------------------------------------------------------------------
// cross-module invariant: observed strata never beat the oracle by more
// than the sampling slack (kept with the suite because it reuses the scans)
// ---------------------------------------------------------------------------

#[test]
fn cross_module_codim_consistency() {
    let reports = scans();
    for (cfg, runs) in CONFIGS.iter().zip(reports) {
        for rep in runs.iter().take(20) {
            for est in &rep.estimates {
                // every observed symbol is a valid query for the oracle
                let q = CodimQuery {
                    n: cfg.n,
                    e: cfg.e,
                    i: est.i,
                    j: Some(est.j),
                    char2: false,
                };
                let c = codim_tb(&q).unwrap();
                assert_eq!(c, est.codim_formula);
                if let Some(dim) = est.estimate {
                    assert!(
                        dim <= cfg.n as i64 - c + 1,
                        "empirical dimension exceeds the oracle bound by more than 1"
                    );
                }
            }
        }
    }
}
