//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use liberata::citation_weighting::{
    apply_acsm, base_weighted_matrix, estimate_field_rates, imwc_iterates, Base, Modifier, RateSource,
    WeightingPipeline,
};
use liberata::corpus::{fixture, Corpus};
use liberata::graph_spectral::{connected_components, log_spanning_trees, zero_eigenvalue_count};
use liberata::market::{transaction_feasible, Feasibility};
use liberata::portfolio::{
    build_portfolio, concentration, diversification_ratio, diversification_ratio_of, PortfolioSelector,
};
use liberata::references_graph::{betweenness_centrality, PathLength};
use liberata::shares_graph::{build_full, laplacian, square};
use liberata::sparse::{self, Sparse};
use liberata::synth::{generate, SynthParams};
use liberata::Analysis;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::*;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn synthetic(seed: u64, manuscripts: usize) -> Corpus {
    generate(&SynthParams {
        manuscripts,
        contributors: (manuscripts / 3).max(3),
        seed,
        ..Default::default()
    })
    .expect("valid parameters")
    .corpus
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn max_diff(x: &Sparse, y: &Sparse) -> f64 {
    let mut d: f64 = 0.0;
    for (r, c, v) in sparse::entries(x) {
        d = d.max((v - sparse::get(y, r, c)).abs());
    }
    for (r, c, v) in sparse::entries(y) {
        d = d.max((v - sparse::get(x, r, c)).abs());
    }
    d
}

fn conservation() -> Check {
    let start = Instant::now();
    for seed in 1..=100u64 {
        let n = 50 + (seed as usize * 37) % 451;
        let c = synthetic(seed, n);
        let citing = (0..c.n_manuscripts()).filter(|&m| !c.references_of(m).is_empty()).count() as f64;
        let a = Analysis::base(c).map_err(|e| e.to_string())?;
        let total: f64 = a.raw_capital().iter().sum();
        ensure(close(total, citing, 1e-9 * citing.max(1.0)), || {
            format!("seed {seed}: total {total} vs {citing}")
        })?;
    }
    let t = start.elapsed();
    ensure(t < Duration::from_secs(10), || format!("took {t:?}"))?;
    Ok(format!("100 corpora in {:.2}s", t.as_secs_f64()))
}

fn fixture_values() -> Check {
    let a = Analysis::base(fixture::corpus()).map_err(|e| e.to_string())?;
    let ac = a.capital();
    ensure(ac.len() == 3, || format!("{} manuscripts", ac.len()))?;
    for (got, want) in ac.iter().zip([1.5, 0.5, 0.0]) {
        ensure(close(*got, want, 1e-9), || format!("AC {ac:?}"))?;
    }
    let people = a.capital_graph().person_totals();
    for (got, want) in people.iter().zip([1.05, 0.75, 0.2]) {
        ensure(close(*got, want, 1e-9), || format!("contributor AC {people:?}"))?;
    }
    let shares: Vec<f64> = a.corpus().shares_of(0).map(|s| s.2).collect();
    let k = concentration(&shares);
    ensure(close(k.hhi, 0.58, 1e-9), || format!("HHI {}", k.hhi))?;
    ensure(close(k.gini, 0.2, 1e-9), || format!("Gini {}", k.gini))?;
    ensure(close(k.entropy, 0.8813, 1e-4), || format!("entropy {}", k.entropy))?;
    let c = a.corpus();
    let w = apply_acsm(&base_weighted_matrix(c), c).map_err(|e| e.to_string())?;
    let edge = sparse::get(&w, 0, 1);
    ensure(close(edge, 0.82, 1e-9), || format!("ACSM edge {edge}"))?;
    Ok("AC, contributor AC, m1 concentration, ACSM edge".into())
}

fn matrix_tree() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut checked = 0;
    while checked < 50 {
        let n = rng.random_range(2..=8);
        let edges = random_edges(&mut rng, n, 0.5, checked % 2 == 1);
        if component_count(n, &edges) != 1 {
            continue;
        }
        let brute = enumerate_spanning_trees(n, &edges);
        let fast = log_spanning_trees(&symmetric(n, &edges)).map_err(|e| e.to_string())?.exp();
        ensure(close(fast, brute, 1e-9 * brute), || format!("graph {checked}: {fast} vs {brute}"))?;
        checked += 1;
    }
    let k3 = log_spanning_trees(&symmetric(3, &complete(3))).map_err(|e| e.to_string())?.exp().round();
    let k8 = log_spanning_trees(&symmetric(8, &complete(8))).map_err(|e| e.to_string())?.exp().round();
    ensure(k3 == 3.0 && k8 == 262144.0, || format!("K3 {k3}, K8 {k8}"))?;
    Ok("50 connected graphs, K3 = 3, K8 = 262144".into())
}

fn spectral_components() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for case in 0..200 {
        let n = rng.random_range(1..=50);
        let p = rng.random_range(0.0..3.0) / n as f64;
        let edges = random_edges(&mut rng, n, p, case % 3 == 0);
        let l = laplacian(&symmetric(n, &edges));
        let expected = component_count(n, &edges);
        let zeros = zero_eigenvalue_count(&l, expected).map_err(|e| e.to_string())?;
        let comps = connected_components(&l).map_err(|e| e.to_string())?;
        ensure(zeros == expected && comps.count == expected && comps.agrees(), || {
            format!("case {case}: {zeros} zero eigenvalues, {expected} components")
        })?;
    }
    Ok("200 graphs agree".into())
}

fn column_stochastic() -> Check {
    let mut columns = 0;
    for seed in 1..=100u64 {
        let c = synthetic(seed, 50 + (seed as usize * 37) % 451);
        let w = base_weighted_matrix(&c);
        for (y, s) in sparse::col_sums(&w).iter().enumerate() {
            if c.references_of(y).is_empty() {
                ensure(*s == 0.0, || format!("seed {seed}: empty column {y} sums to {s}"))?;
            } else {
                ensure(close(*s, 1.0, 1e-12), || format!("seed {seed}: column {y} sums to {s}"))?;
                columns += 1;
            }
        }
    }
    Ok(format!("{columns} columns over 100 corpora"))
}

fn two_step() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut graphs: Vec<Sparse> = (0..60)
        .map(|_| {
            let n = rng.random_range(1..=6);
            symmetric(n, &random_edges(&mut rng, n, 0.6, true))
        })
        .collect();
    graphs.push(build_full(&fixture::corpus()).matrix().clone());
    for (g, a) in graphs.iter().enumerate() {
        let fast = square(a);
        for (i, row) in two_hop(a).iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let got = sparse::get(&fast, i, j);
                ensure(close(got, *v, 1e-12), || format!("graph {g} ({i},{j}): {got} vs {v}"))?;
            }
        }
    }
    Ok(format!("{} graphs", graphs.len()))
}

fn imwc_truncation() -> Check {
    let step = |c: &Corpus| {
        let it = imwc_iterates(&base_weighted_matrix(c), 4);
        max_diff(&it[3], &it[2])
    };
    let on_fixture = step(&fixture::corpus());
    let mut worst = (0.0, 0);
    let mut over = 0;
    for seed in 1..=20u64 {
        let d = step(&synthetic(seed, 20 + (seed as usize * 53) % 181));
        over += usize::from(d >= 1e-3);
        if d > worst.0 {
            worst = (d, seed);
        }
    }
    ensure(on_fixture < 1e-3 && over == 0, || {
        format!(
            "iteration 4 vs 3 differs by {on_fixture:.4} on the fixture; {over} of 20 corpora at or above 1e-3, worst {:.4} (seed {})",
            worst.0, worst.1
        )
    })?;
    Ok(format!("fixture {on_fixture:.2e}, worst corpus {:.2e}", worst.0))
}

fn commutativity() -> Check {
    for seed in 1..=20u64 {
        let c = synthetic(seed, 20 + (seed as usize * 29) % 131);
        let rates = estimate_field_rates(&c);
        let rate = Modifier::PublicationRate(RateSource::Estimated);
        let run = |mods: Vec<Modifier>| {
            WeightingPipeline::new(Base::InverseReferenceCount, mods)
                .and_then(|p| p.run_with_rates(&c, &rates))
                .map(|r| r.matrix)
                .map_err(|e| e.to_string())
        };
        let x = run(vec![Modifier::Acsm, rate])?;
        let y = run(vec![rate, Modifier::Acsm])?;
        let d = max_diff(&x, &y);
        ensure(d <= 1e-12, || format!("seed {seed}: differ by {d}"))?;
    }
    Ok("20 corpora".into())
}

fn concentration_bounds() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for case in 0..1000 {
        let n = rng.random_range(1..=80);
        let raw: Vec<f64> = (0..n).map(|_| rng.random_range(1e-6..1.0)).collect();
        let t: f64 = raw.iter().sum();
        let w: Vec<f64> = raw.iter().map(|x| x / t).collect();
        let k = concentration(&w);
        ensure(k.hhi > 0.0 && k.hhi <= 1.0 + 1e-12, || format!("case {case}: HHI {}", k.hhi))?;
        ensure(k.gini >= 0.0 && k.gini < 1.0, || format!("case {case}: Gini {}", k.gini))?;
        ensure(k.entropy >= -1e-12 && k.entropy <= 1.0 + 1e-12, || format!("case {case}: H {}", k.entropy))?;
    }
    for n in 1..=200usize {
        let k = concentration(&vec![1.0 / n as f64; n]);
        let h = if n == 1 { 0.0 } else { 1.0 };
        ensure(close(k.hhi, 1.0 / n as f64, 1e-12) && k.gini == 0.0 && close(k.entropy, h, 1e-12), || {
            format!("uniform n={n}: {k:?}")
        })?;
    }
    Ok("1000 random vectors, uniform n = 1..200".into())
}

fn dr_floor() -> Check {
    let mut portfolios = 0;
    for seed in 1..=10u64 {
        let a = Analysis::base(synthetic(seed, 120)).map_err(|e| e.to_string())?;
        let c = a.corpus();
        let mut sels: Vec<PortfolioSelector> =
            c.contributors().iter().map(|p| PortfolioSelector::contributor(p.id.clone())).collect();
        sels.extend(c.taxonomy().level_tags(4).into_iter().map(PortfolioSelector::tag));
        sels.push(PortfolioSelector::default());
        for sel in &sels {
            let pf = build_portfolio(c, sel);
            if let Some(dr) = diversification_ratio(&a, &pf, 12).map_err(|e| e.to_string())?.value() {
                ensure(dr >= 1.0 - 1e-9, || format!("seed {seed} {sel}: DR {dr}"))?;
                portfolios += 1;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for case in 0..200 {
        let r: Vec<f64> = (0..rng.random_range(4..12)).map(|_| rng.random_range(-5.0..5.0)).collect();
        let (k, b, w) = (rng.random_range(0.1..4.0), rng.random_range(-2.0..2.0), rng.random_range(0.05..0.95));
        let shifted: Vec<f64> = r.iter().map(|x| k * x + b).collect();
        for dr in [
            diversification_ratio_of(&[1.0], &[r.clone()]),
            diversification_ratio_of(&[w, 1.0 - w], &[r.clone(), shifted]),
        ] {
            if let Some(dr) = dr.map_err(|e| e.to_string())?.value() {
                ensure(close(dr, 1.0, 1e-9), || format!("case {case}: DR {dr}"))?;
            }
        }
    }
    Ok(format!("{portfolios} synthetic portfolios, 200 single and correlated pairs"))
}

fn feasibility() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..10_000 {
        let (ew, e, s) = (rng.random_range(0.0..10.0), rng.random_range(0.0..10.0), rng.random_range(0.01..1.0));
        let sw = s * (1.0 - rng.random_range(0.0..1.0));
        let lift = rng.random_range(0.0..10.0);
        let before = Feasibility::Author { expected_with: ew, expected_without: e, share_with: sw, share_without: s };
        let after =
            Feasibility::Author { expected_with: ew + lift, expected_without: e, share_with: sw, share_without: s };
        ensure(!transaction_feasible(&before) || transaction_feasible(&after), || format!("case {case} flipped"))?;
        let ta = rng.random_range(0.01..10.0);
        let edge = Feasibility::Provider { t_provider: ta * s, t_author: ta, share: s };
        ensure(!transaction_feasible(&edge), || format!("case {case}: boundary feasible"))?;
    }
    Ok("10000 inputs".into())
}

fn betweenness() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for case in 0..30 {
        let n = rng.random_range(2..=8);
        let w = random_dag(&mut rng, n, 0.45);
        let fast = betweenness_centrality(&w, PathLength::Hops);
        let brute = enumerate_betweenness(&w);
        for y in 0..n {
            ensure(close(fast[y], brute[y], 1e-12), || format!("dag {case} node {y}: {} vs {}", fast[y], brute[y]))?;
        }
    }
    Ok("30 DAGs".into())
}

const SWEEP: &[&str] = &[
    "validate",
    "refs --op capital",
    "refs --op centrality",
    "refs --op cocite",
    "refs --op power:3",
    "shares rows",
    "shares degrees",
    "shares trees",
    "shares export --matrix two-step",
    "capital --who contributor",
    "capital --who institution",
    "capital --who region --by field --level 2",
    "capital --who tag --level 3",
    "capital --collusion",
    "capital --series 12 --manuscript m0010",
    "cluster --op partition --graph refs --k 4",
    "cluster --op partition --graph shares --k 3 --support",
    "cluster --op components --graph capital --support",
    "cluster --op trees --graph shares",
    "similar --to m0020 --by tags --top 5",
    "similar --to m0020 --by cocite --top 5",
    "similar --to m0020 --infer",
    "portfolio --each contributor --select role=author",
    "portfolio --each region --metrics capital,hhi,gini,entropy,efficiency,funding_efficiency,relative",
    "portfolio --select tag=D1-0 --report mix --mix field:4",
    "portfolio --select tag=D2-1 --report weights",
    "portfolio --select contributor=c0003 --report returns",
    "portfolio --hist log-ac --bins 6 --select role=author",
    "market --fmp --depth 3",
    "market --capm --manuscript m0015",
    "market --relative --select region=R1 --risk-adjusted",
    "distribution --hhi field:T-0 --hhi field:T-1",
    "distribution --hhid field:T-0 field:T-2",
    "distribution --stats",
    "distribution --hist log-ac --bins 8",
    "health --metric growth-series --months 12",
    "health --metric fmp-history --n 4 --months 12",
    "health --metric geo",
    "health --metric geo-gini",
    "health --metric global-efficiency",
    "health --metric volume",
    "health --metric qc-time --tag T-0",
    "health --metric csr --collection reviewed",
];

fn liberata(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_liberata"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        format!("`{}` exited {}: {}", args.join(" "), out.status, String::from_utf8_lossy(&out.stderr).trim())
    })
}

fn sweep(corpus: &Path, into: &Path) -> Result<(), String> {
    std::fs::create_dir_all(into).map_err(|e| e.to_string())?;
    for (i, cmd) in SWEEP.iter().enumerate() {
        let out = into.join(format!("{i:02}.csv"));
        let mut args = vec!["--corpus", corpus.to_str().unwrap(), "--out", out.to_str().unwrap()];
        args.extend(cmd.split_whitespace());
        liberata(&args)?;
    }
    Ok(())
}

fn determinism() -> Check {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let data = tmp.path().join("data");
    liberata(&["synth", "--seed", "7", "--out", data.to_str().unwrap()])?;
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    sweep(&data, &a)?;
    sweep(&data, &b)?;
    let mut bytes = 0;
    for i in 0..SWEEP.len() {
        let name = format!("{i:02}.csv");
        let x = std::fs::read(a.join(&name)).map_err(|e| e.to_string())?;
        let y = std::fs::read(b.join(&name)).map_err(|e| e.to_string())?;
        ensure(!x.is_empty(), || format!("`{}` wrote nothing", SWEEP[i]))?;
        ensure(x == y, || format!("`{}` differs between runs", SWEEP[i]))?;
        bytes += x.len();
    }
    Ok(format!("{} commands, {bytes} bytes identical", SWEEP.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 13] = [
        ("conservation", conservation),
        ("fixture exactness", fixture_values),
        ("matrix-tree oracle", matrix_tree),
        ("spectral components oracle", spectral_components),
        ("column stochasticity", column_stochastic),
        ("two-step equivalence", two_step),
        ("imwc truncation", imwc_truncation),
        ("modifier commutativity", commutativity),
        ("concentration bounds", concentration_bounds),
        ("diversification floor", dr_floor),
        ("feasibility monotonicity", feasibility),
        ("betweenness oracle", betweenness),
        ("end-to-end determinism", determinism),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail} ({secs:.2}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {why} ({secs:.2}s)", i + 1);
            }
        }
    }
    let total = start.elapsed();
    println!("{} of {} criteria passed in {:.2}s", criteria.len() - failed, criteria.len(), total.as_secs_f64());
    if total > Duration::from_secs(120) {
        println!("suite exceeded two minutes");
        failed += 1;
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
