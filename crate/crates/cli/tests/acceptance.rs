//! Acceptance run. Prints one PASS/FAIL line per criterion and exits non-zero
//! when any criterion fails.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use ctxrf::dataset::{generate, generate_example1, generate_problem1, generate_problem2};
use ctxrf::dataset::{CategoricalColumn, Column, Dataset};
use ctxrf::importance::{forest_scores, node_terms, per_context_baseline};
use ctxrf::impurity::ImpurityKind;
use ctxrf::oracle::{
    asymptotic_scores, cond_mi, is_context_dependent, joint_information, random_distribution,
    random_with_zeros, verify_theorems, Condition, JointDistribution,
};
use ctxrf::permtest::{permutation_pvalues, PermutationConfig};
use ctxrf::rng::{Purpose, RngSpec};
use ctxrf::{build_forest, Forest};
use rand::Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Verdict {
            pass,
            detail: detail.into(),
        }
    }
}

fn ctxrf(args: &[&str]) -> (i32, Duration) {
    let t = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_ctxrf"))
        .args(args)
        .output()
        .expect("binary runs");
    if !out.status.success() {
        eprintln!("{}", String::from_utf8_lossy(&out.stderr));
    }
    (out.status.code().unwrap_or(-1), t.elapsed())
}

/// Header and rows of the first table in a TSV report.
fn read_tsv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap_or_default();
    let mut lines = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .take_while(|l| !l.is_empty());
    let split = |l: &str| l.split('\t').map(String::from).collect::<Vec<_>>();
    let header = lines.next().map(split).unwrap_or_default();
    (header, lines.map(split).collect())
}

fn column(header: &[String], rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let i = header.iter().position(|h| h == name).unwrap_or(usize::MAX);
    rows.iter()
        .map(|r| r.get(i).and_then(|v| v.parse().ok()).unwrap_or(f64::NAN))
        .collect()
}

fn units(x: f64, d: i32) -> i64 {
    (x * 10f64.powi(d) + 0.5).floor() as i64
}

fn dir(root: &Path, name: &str) -> PathBuf {
    root.join(name)
}

fn c1_problem1_exact(root: &Path) -> Verdict {
    let out = dir(root, "c1");
    let (code, took) = ctxrf(&["oracle", "--generate", "problem1", "--out-dir", out.to_str().unwrap()]);
    let (header, rows) = read_tsv(&out.join("oracle.tsv"));
    let expected: [(&str, [f64; 3]); 8] = [
        ("imp", [1.0, 0.125, 0.125]),
        ("imp_given_0", [1.0, 0.5, 0.0]),
        ("imp_given_1", [1.0, 0.0, 0.5]),
        ("abs_0", [0.0, 0.375, 0.125]),
        ("signed_0", [0.0, -0.375, 0.125]),
        ("abs_1", [0.0, 0.125, 0.375]),
        ("signed_1", [0.0, 0.125, -0.375]),
        ("global_context", [0.0, -0.125, -0.125]),
    ];
    let mut ok = 0;
    let mut worst: f64 = 0.0;
    for (name, want) in expected {
        let got = column(&header, &rows, name);
        for (g, w) in got.iter().zip(want) {
            let e = (g - w).abs();
            worst = worst.max(if e.is_nan() { f64::INFINITY } else { e });
            ok += (e <= 1e-9) as usize;
        }
    }
    Verdict::new(
        code == 0 && ok == 24 && took < Duration::from_secs(1),
        format!("{ok}/24 cells within 1e-9 (max error {worst:.1e}), {:.3} s", took.as_secs_f64()),
    )
}

const PROBLEM2_SCORES: [(&str, [f64; 8]); 7] = [
    ("imp", [0.5727, 0.7514, 0.5528, 0.687, 0.1746, 0.0753, 0.1073, 0.0]),
    ("imp_given_0", [0.4127, 0.5815, 0.5312, 0.5421, 0.6566, 0.2258, 0.372, 0.0]),
    ("imp_given_1", [0.6243, 0.8057, 0.5577, 0.7343, 0.0, 0.0, 0.0, 0.0]),
    ("abs_0", [0.2263, 0.2431, 0.1181, 0.2241, 0.4139, 0.1961, 0.2861, 0.0]),
    ("abs_1", [0.0987, 0.0611, 0.021, 0.0736, 0.1746, 0.0753, 0.1073, 0.0]),
    ("signed_0", [0.2179, 0.2422, 0.1111, 0.2190, -0.3839, -0.1389, -0.2346, 0.0]),
    ("signed_1", [-0.0516, -0.0543, -0.0049, -0.0473, 0.1746, 0.0753, 0.1073, 0.0]),
];

fn c2_problem2_exact(root: &Path) -> Verdict {
    let out = dir(root, "c2");
    let (code, took) = ctxrf(&["oracle", "--generate", "problem2", "--out-dir", out.to_str().unwrap()]);
    let (header, rows) = read_tsv(&out.join("oracle.tsv"));
    let mut off = Vec::new();
    let mut matched = 0;
    let mut values = BTreeMap::new();
    for (name, want) in PROBLEM2_SCORES {
        let got = column(&header, &rows, name);
        for (m, w) in want.iter().enumerate() {
            let g = got.get(m).copied().unwrap_or(f64::NAN);
            values.insert((name, m), g);
            if units(g, 4) == units(*w, 4) {
                matched += 1;
            } else {
                off.push(format!("{name}[X{}]={g:.6} vs {w}", m + 1));
            }
        }
    }
    let x8_zero = PROBLEM2_SCORES.iter().all(|(n, _)| values[&(*n, 7)].abs() < 1e-12);
    let base_zero = (4..7).all(|m| values[&("imp_given_1", m)].abs() < 1e-12);
    let signs = PROBLEM2_SCORES[5..]
        .iter()
        .all(|(n, w)| (0..7).all(|m| (values[&(*n, m)] > 0.0) == (w[m] > 0.0)));
    let mut detail = format!(
        "{matched}/56 cells equal after half-up rounding to 4 decimals, {:.2} s; X8 zero: {x8_zero}, X5-X7 baseline zero at x_c=1: {base_zero}, signed signs: {signs}",
        took.as_secs_f64()
    );
    if !off.is_empty() {
        detail.push_str(&format!("; deviating: {}", off.join(", ")));
    }
    Verdict::new(
        code == 0 && off.is_empty() && took < Duration::from_secs(30),
        detail,
    )
}

fn c3_example1() -> Verdict {
    let d = JointDistribution::from_dataset(&generate_example1()).unwrap();
    // layout: X1, X2, Y, Xc
    let mi = |b: &[(usize, u32)], c: Option<u32>| cond_mi(&d, 0, b, c).unwrap().unwrap();
    let averaged_over_x2 = |c: Option<u32>| -> f64 {
        let ctx: Vec<(usize, u32)> = c.map(|v| (3, v)).into_iter().collect();
        let pc = if ctx.is_empty() { 1.0 } else { d.probability(&ctx) };
        (0..2)
            .map(|x2| {
                let mut ev = ctx.clone();
                ev.push((1, x2));
                d.probability(&ev) / pc * mi(&[(1, x2)], c)
            })
            .sum()
    };
    let mut checks = vec![
        ("I(Y;X1|X2=0,Xc=0)", mi(&[(1, 0)], Some(0)), 1.0),
        ("I(Y;X1|X2=0)", mi(&[(1, 0)], None), 0.5),
        ("I(Y;X1)", mi(&[], None), 0.5),
        ("I(Y;X1|X2)", averaged_over_x2(None), 0.5),
    ];
    for c in 0..2 {
        checks.push(("I(Y;X1|Xc=c)", mi(&[], Some(c)), 0.5));
        checks.push(("I(Y;X1|X2,Xc=c)", averaged_over_x2(Some(c)), 0.5));
    }
    let bad: Vec<String> = checks
        .iter()
        .filter(|(_, g, w)| (g - w).abs() > 1e-12)
        .map(|(n, g, w)| format!("{n}={g} (want {w})"))
        .collect();
    let def1 = is_context_dependent(&d, 0, Condition::Definition).unwrap();
    let cond4 = is_context_dependent(&d, 0, Condition::ContextValue).unwrap();
    Verdict::new(
        bad.is_empty() && def1 && !cond4,
        format!(
            "{}/{} information values within 1e-12; X1 condition 1: {def1}, condition 4: {cond4}{}",
            checks.len() - bad.len(),
            checks.len(),
            if bad.is_empty() { String::new() } else { format!("; off: {}", bad.join(", ")) }
        ),
    )
}

/// Largest deviation from the oracle over every score family.
fn forest_error(ds: &Dataset, dist: &JointDistribution, trees: usize, seed: u64) -> f64 {
    let inputs = ds.input_columns();
    let rng = RngSpec::new(seed);
    let forest: Forest = build_forest(ds, &inputs, trees, rng, ImpurityKind::Entropy).unwrap();
    let s = forest_scores(&forest, ds).unwrap();
    let base: Vec<Vec<f64>> = (0..2)
        .map(|c| per_context_baseline(ds, &inputs, c, trees, rng, ImpurityKind::Entropy).unwrap())
        .collect();
    let mut worst: f64 = 0.0;
    for m in 0..inputs.len() {
        let a = asymptotic_scores(dist, m).unwrap();
        worst = worst.max((a.imp - s.mdi[m]).abs());
        worst = worst.max((a.global_context.unwrap() - s.global_context[m]).abs());
        for c in 0..2 {
            let o = a.contexts[c].unwrap();
            worst = worst.max((o.abs - s.abs[c][m]).abs());
            worst = worst.max((o.signed - s.signed[c][m]).abs());
            worst = worst.max((o.baseline - base[c][m]).abs());
        }
    }
    worst
}

fn c4_consistency() -> Verdict {
    let t = Instant::now();
    let ds = generate_problem1();
    let dist = JointDistribution::from_dataset(&ds).unwrap();
    let sizes = [100, 1000, 10_000];
    let seeds = [0u64, 1, 2];
    let errors: Vec<Vec<f64>> = seeds
        .iter()
        .map(|&s| sizes.iter().map(|&n| forest_error(&ds, &dist, n, s)).collect())
        .collect();
    let mean: Vec<f64> = (0..3)
        .map(|i| errors.iter().map(|e| e[i]).sum::<f64>() / seeds.len() as f64)
        .collect();
    let final_ok = errors.iter().all(|e| e[2] <= 0.02);
    let monotone = mean[0] >= mean[1] && mean[1] >= mean[2];
    let took = t.elapsed();
    let per_seed: Vec<String> = errors
        .iter()
        .map(|e| format!("[{:.4} {:.4} {:.4}]", e[0], e[1], e[2]))
        .collect();
    Verdict::new(
        final_ok && monotone && took < Duration::from_secs(60),
        format!(
            "max error per seed at 100/1000/10000 trees {}; mean {:.4} >= {:.4} >= {:.4}: {monotone}; {:.1} s",
            per_seed.join(" "),
            mean[0],
            mean[1],
            mean[2],
            took.as_secs_f64()
        ),
    )
}

fn random_dist(i: u64) -> JointDistribution {
    let mut rng = RngSpec::new(20_240).stream(Purpose::Sampling, i, 0);
    let p = rng.gen_range(1..=3);
    let arities: Vec<usize> = (0..p).map(|_| rng.gen_range(2..=3)).collect();
    let y = rng.gen_range(2..=3);
    let c = rng.gen_range(2..=3);
    random_distribution(&arities, y, Some(c), &mut rng).unwrap()
}

fn sparse_dist(i: u64) -> JointDistribution {
    let mut rng = RngSpec::new(20_241).stream(Purpose::Sampling, i, 0);
    let p = rng.gen_range(1..=3);
    let arities: Vec<usize> = (0..p).map(|_| rng.gen_range(2..=3)).collect();
    random_with_zeros(&arities, rng.gen_range(2..=3), Some(2), 0.4, &mut rng).unwrap()
}

fn named_distributions() -> Vec<(&'static str, JointDistribution)> {
    ["example1", "problem1", "problem2"]
        .into_iter()
        .map(|n| (n, JointDistribution::from_dataset(&generate(n).unwrap()).unwrap()))
        .collect()
}

fn c5_theorems() -> Verdict {
    let t = Instant::now();
    let mut failures = Vec::new();
    let mut checked = 0;
    let mut dependent = 0;
    let mut cases: Vec<(String, JointDistribution)> =
        (0..500).map(|i| (format!("random #{i}"), random_dist(i))).collect();
    cases.extend(named_distributions().into_iter().map(|(n, d)| (n.to_string(), d)));
    for (name, d) in &cases {
        let r = verify_theorems(d).unwrap();
        for (label, check) in [
            ("T1", &r.irrelevant_context),
            ("T2", &r.zero_abs_score),
            ("T3", &r.sign_characterization),
        ] {
            checked += 1;
            if !check.holds {
                failures.push(format!("{name} {label}: {}", check.witness.clone().unwrap_or_default()));
            }
        }
        dependent += (0..d.n_inputs())
            .filter(|&m| is_context_dependent(d, m, Condition::Definition).unwrap())
            .count();
    }
    let took = t.elapsed();
    Verdict::new(
        failures.is_empty() && took < Duration::from_secs(300),
        format!(
            "{} distributions, {checked} theorem checks, {} failures, {dependent} context-dependent inputs seen; {:.1} s{}",
            cases.len(),
            failures.len(),
            took.as_secs_f64(),
            failures.first().map(|f| format!("; first: {f}")).unwrap_or_default()
        ),
    )
}

/// Node-level decomposition checked on a small forest.
fn node_identity(ds: &Dataset) -> bool {
    let forest = build_forest(ds, &ds.input_columns(), 40, RngSpec::new(3), ImpurityKind::Entropy)
        .unwrap();
    let s = forest_scores(&forest, ds).unwrap();
    let n_ctx = ds.context_arity().unwrap();
    let inputs = ds.input_columns();
    let mut global = vec![0.0; inputs.len()];
    for t in node_terms(&forest, ds).unwrap() {
        let avg: f64 = (0..n_ctx).map(|c| t.per_context[c].0 * t.signed(c)).sum();
        if (t.global_context() - avg).abs() > 1e-12 {
            return false;
        }
        global[inputs.iter().position(|&c| c == t.variable).unwrap()] += t.global_context();
    }
    let k = forest.n_trees() as f64;
    let signed_ok = s
        .signed
        .iter()
        .zip(&s.abs)
        .all(|(sr, ar)| sr.iter().zip(ar).all(|(a, b)| a.abs() <= b + 1e-12));
    signed_ok && global.iter().zip(&s.global_context).all(|(g, x)| (g / k - x).abs() <= 1e-12)
}

fn c6_invariants() -> Verdict {
    let mut cases: Vec<(String, JointDistribution)> = named_distributions()
        .into_iter()
        .map(|(n, d)| (n.to_string(), d))
        .collect();
    cases.extend((0..100).map(|i| (format!("random #{i}"), random_dist(i))));
    cases.extend((0..50).map(|i| (format!("sparse #{i}"), sparse_dist(i))));
    let (mut triangle, mut sum) = (Vec::new(), Vec::new());
    let mut identity: BTreeMap<String, (usize, f64)> = BTreeMap::new();
    let mut identity_cells = 0;
    for (name, d) in &cases {
        let scores: Vec<_> = (0..d.n_inputs()).map(|m| asymptotic_scores(d, m).unwrap()).collect();
        let total: f64 = scores.iter().map(|s| s.imp).sum();
        if (total - joint_information(d)).abs() > 1e-10 {
            sum.push(name.clone());
        }
        for s in &scores {
            for c in s.contexts.iter().flatten() {
                identity_cells += 1;
                if c.signed.abs() > c.abs + 1e-12 {
                    triangle.push(name.clone());
                }
                let dev = (c.signed - c.two_forest_difference(s.imp)).abs();
                if dev > 1e-12 {
                    let e = identity.entry(name.clone()).or_insert((0, 0.0));
                    e.0 += 1;
                    e.1 = e.1.max(dev);
                }
            }
        }
    }
    let node_ok: Vec<bool> = [generate_example1(), generate_problem1(), generate_problem2()]
        .iter()
        .map(node_identity)
        .collect();
    let broken: usize = identity.values().map(|v| v.0).sum();
    let named_breaks: Vec<String> = identity
        .iter()
        .filter(|(n, _)| !n.contains('#'))
        .map(|(n, (k, dev))| format!("{n} ({k} cells, max {dev:.4})"))
        .collect();
    let random_breaks = identity.keys().filter(|n| n.contains('#')).count();
    Verdict::new(
        triangle.is_empty() && sum.is_empty() && identity.is_empty() && node_ok.iter().all(|&b| b),
        format!(
            "{} distributions; |signed| <= abs violations: {}; sum of MDI != I(Y;V): {}; node decomposition exact on example1/problem1/problem2: {node_ok:?}; signed = Imp - baseline fails in {broken}/{identity_cells} cells: {}; random distributions affected: {random_breaks}/150",
            cases.len(),
            triangle.len(),
            sum.len(),
            if named_breaks.is_empty() { "none of the named datasets".into() } else { named_breaks.join(", ") },
        ),
    )
}

fn null_dataset(seed: u64) -> Dataset {
    let mut rng = RngSpec::new(seed).stream(Purpose::Sampling, 0, 0);
    let n = 100;
    let cols: Vec<Vec<u32>> = (0..4)
        .map(|_| (0..n).map(|_| rng.gen_range(0..3)).collect())
        .collect();
    let y: Vec<u32> = (0..n)
        .map(|i| (cols[0][i] + cols[1][i] * rng.gen_range(0..2)) % 3)
        .collect();
    let xc: Vec<u32> = (0..n).map(|_| rng.gen_range(0..2)).collect();
    let cat = |v: Vec<u32>, a| Column::Categorical(CategoricalColumn::from_codes(v, a).unwrap());
    let mut columns = vec![cat(xc, 2)];
    columns.extend(cols.into_iter().map(|c| cat(c, 3)));
    columns.push(cat(y, 3));
    let names = ["Xc", "A", "B", "C", "D", "Y"].map(String::from).to_vec();
    Dataset::from_columns(names, columns, "Y", Some("Xc")).unwrap()
}

/// Exact permutation p-value of X2's abs score at x_c=0 over every balanced
/// relabelling of the 16 rows, scored with the oracle.
fn exact_problem1_pvalue() -> (usize, usize) {
    let ds = generate_problem1();
    let (mut hit, mut total) = (0, 0);
    for mask in 0u32..1 << 16 {
        if mask.count_ones() != 8 {
            continue;
        }
        let codes: Vec<u32> = (0..16).map(|i| mask >> i & 1).collect();
        let d = JointDistribution::from_dataset(&ds.with_context_codes(codes).unwrap()).unwrap();
        let a = asymptotic_scores(&d, 1).unwrap().contexts[0].unwrap().abs;
        total += 1;
        hit += (a >= 0.375 - 1e-12) as usize;
    }
    (hit, total)
}

fn c7_calibration() -> Verdict {
    let t = Instant::now();
    let (mut below, mut cells) = (0, 0);
    for run in 0..10u64 {
        let ds = null_dataset(100 + run);
        let mut cfg = PermutationConfig::new(99, 100, RngSpec::new(run), ImpurityKind::Entropy);
        cfg.replicate_trees = 100;
        let r = permutation_pvalues(&ds, &ds.input_columns(), &cfg).unwrap();
        for p in r.pvalue_abs.iter().flatten() {
            cells += 1;
            below += (*p < 0.05) as usize;
        }
    }
    let frac = below as f64 / cells as f64;
    let calibrated = (0.01..=0.12).contains(&frac);

    let ds = generate_problem1();
    let mut cfg = PermutationConfig::new(200, 500, RngSpec::new(0), ImpurityKind::Entropy);
    cfg.replicate_trees = 100;
    let r = permutation_pvalues(&ds, &ds.input_columns(), &cfg).unwrap();
    let (p2, p3) = (r.pvalue_abs[0][1], r.pvalue_abs[1][2]);
    let strong = p2 <= 0.01 && p3 <= 0.01;
    let (hit, total) = exact_problem1_pvalue();
    let took = t.elapsed();
    Verdict::new(
        calibrated && strong && took < Duration::from_secs(600),
        format!(
            "null: {below}/{cells} = {frac:.3} below 0.05 (in [0.01, 0.12]: {calibrated}); problem1 with 200 permutations: p(X2, x_c=0) = {p2:.4}, p(X3, x_c=1) = {p3:.4} (<= 0.01: {strong}); exact permutation p over all balanced relabellings = {hit}/{total} = {:.4}; {:.1} s",
            hit as f64 / total as f64,
            took.as_secs_f64()
        ),
    )
}

fn files(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).into_iter().flatten().flatten() {
            let p = entry.path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.insert(p.strip_prefix(dir).unwrap().to_path_buf(), fs::read(&p).unwrap());
            }
        }
    }
    out
}

fn c8_determinism(root: &Path) -> Verdict {
    let csv = root.join("c8_problem2.csv");
    let (code, _) = ctxrf(&["generate", "problem2", "--output", csv.to_str().unwrap()]);
    assert_eq!(code, 0);
    let csv = csv.to_str().unwrap().to_string();
    let invocations: Vec<Vec<&str>> = vec![
        vec!["importance", "--generate", "problem2", "--trees", "300", "--baselines"],
        vec!["importance", "--input", &csv, "--target", "Y", "--context", "Xc", "--trees", "100", "--format", "text"],
        vec!["oracle", "--generate", "example1", "--check-definitions"],
        vec!["permtest", "--generate", "problem1", "--trees", "200", "--permutations", "99", "--replicate-trees", "50"],
        vec!["permtest", "--generate", "problem2", "--trees", "100", "--permutations", "49", "--null", "reuse"],
        vec!["pairwise", "--generate", "network", "--samples", "200", "--trees", "30", "--permutations", "19", "--replicate-trees", "10"],
        vec!["pairwise", "--generate", "network", "--samples", "200", "--trees", "30", "--permutations", "19", "--replicate-trees", "10", "--score", "two-forest"],
    ];
    let mut differing = Vec::new();
    let mut compared = 0;
    for (k, args) in invocations.iter().enumerate() {
        let mut outputs = Vec::new();
        for (run, jobs) in ["1", "1", "4"].iter().enumerate() {
            let out = root.join(format!("c8_{k}_{run}"));
            let mut full = vec!["--jobs", jobs];
            full.extend(args.iter().copied());
            full.extend(["--out-dir", out.to_str().unwrap()]);
            let (code, _) = ctxrf(&full);
            if code != 0 {
                differing.push(format!("{} exited with {code}", args[0]));
            }
            outputs.push(files(&out));
        }
        compared += outputs[0].len();
        if outputs[0].is_empty() || outputs[0] != outputs[1] || outputs[0] != outputs[2] {
            differing.push(args.join(" "));
        }
    }
    Verdict::new(
        differing.is_empty(),
        format!(
            "{} invocations x 3 runs (--jobs 1, 1, 4), {compared} files per run byte-identical{}",
            invocations.len(),
            if differing.is_empty() { String::new() } else { format!("; differing: {}", differing.join("; ")) }
        ),
    )
}

const ATTRIBUTES: [&str; 16] = [
    "age",
    "histologic-type",
    "degree-of-diffe",
    "bone",
    "bone-marrow",
    "lung",
    "pleura",
    "peritoneum",
    "liver",
    "brain",
    "skin",
    "neck",
    "supraclavicular",
    "axillar",
    "mediastinum",
    "abdominal",
];

fn c9_out_of_scope(root: &Path) -> Verdict {
    // a schema-only stand-in for the external file: 132 rows, binary sex
    let mut rng = RngSpec::new(9).stream(Purpose::Sampling, 0, 0);
    let mut text = String::from("sex,");
    text.push_str(&ATTRIBUTES.join(","));
    text.push_str(",class\n");
    for _ in 0..132 {
        let mut row = vec![rng.gen_range(0..2).to_string()];
        row.extend((0..16).map(|_| rng.gen_range(0..3).to_string()));
        row.push(rng.gen_range(0..22).to_string());
        text.push_str(&row.join(","));
        text.push('\n');
    }
    let csv = root.join("c9_problem3_mock.csv");
    fs::write(&csv, text).unwrap();
    let out = root.join("c9");
    let (code, _) = ctxrf(&[
        "permtest", "--input", csv.to_str().unwrap(), "--target", "class", "--context", "sex",
        "--baselines", "--trees", "200", "--permutations", "99", "--replicate-trees", "50",
        "--out-dir", out.to_str().unwrap(),
    ]);
    let (header, rows) = read_tsv(&out.join("permtest.tsv"));
    let required = [
        "imp", "imp_given_0", "imp_given_1", "abs_0", "pvalue_abs_0", "abs_1", "pvalue_abs_1",
        "signed_0", "pvalue_signed_0", "signed_1", "pvalue_signed_1",
    ];
    let missing: Vec<&str> = required
        .iter()
        .copied()
        .filter(|r| !header.iter().any(|h| h == r))
        .collect();
    let names: Vec<&str> = rows.iter().map(|r| r[0].as_str()).collect();
    let schema_ok = code == 0 && missing.is_empty() && names == ATTRIBUTES;

    let net = root.join("c9_network");
    let (code2, _) = ctxrf(&[
        "pairwise", "--generate", "network", "--samples", "400", "--trees", "100",
        "--permutations", "99", "--replicate-trees", "50", "--out-dir", net.to_str().unwrap(),
    ]);
    let (h, r) = read_tsv(&net.join("xc_0/matrix_significant.tsv"));
    let v0 = r.iter().find(|row| row[0] == "v0").cloned().unwrap_or_default();
    let flag = |name: &str| {
        h.iter()
            .position(|x| x == name)
            .and_then(|i| v0.get(i))
            .map_or(false, |v| v == "1")
    };
    let fixture_ok = code2 == 0 && flag("v4") && flag("v5") && !flag("v2") && !flag("v3");
    Verdict::new(
        schema_ok && fixture_ok,
        format!(
            "external-data scores and expression matrices are out of scope; tumor schema stand-in (132 rows, 16 attributes) report has every required column: {} and rows in attribute order: {}; network fixture flags (v0,v4) and (v0,v5) at x_c=0 and not (v0,v2), (v0,v3): {fixture_ok}",
            missing.is_empty(),
            names == ATTRIBUTES
        ),
    )
}

fn main() {
    let root = tempfile::tempdir().expect("temporary directory");
    let root = root.path();
    let criteria: Vec<(u8, &str, Box<dyn Fn() -> Verdict + '_>)> = vec![
        (1, "problem1 exact scores", Box::new(|| c1_problem1_exact(root))),
        (2, "problem2 exact scores", Box::new(|| c2_problem2_exact(root))),
        (3, "example1 information values", Box::new(c3_example1)),
        (4, "finite-forest consistency", Box::new(c4_consistency)),
        (5, "theorem property sweep", Box::new(c5_theorems)),
        (6, "triangle and identity invariants", Box::new(c6_invariants)),
        (7, "permutation calibration", Box::new(c7_calibration)),
        (8, "determinism", Box::new(|| c8_determinism(root))),
        (9, "out-of-scope declared", Box::new(|| c9_out_of_scope(root))),
    ];
    let mut failed = 0;
    for (id, title, run) in criteria {
        let v = run();
        failed += !v.pass as usize;
        println!(
            "{} criterion {id} ({title}): {}",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
