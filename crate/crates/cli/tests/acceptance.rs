//! Acceptance run: one line per criterion, nonzero exit when any fails.

use std::time::{Duration, Instant};

use ffdyn_cli::config::parse_config;
use ffdyn_cli::table::{Num, ResultRow};
use ffdyn_cli::run_experiment;

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    title: &'static str,
    limit: Option<Duration>,
    check: fn() -> Outcome,
}

fn run(name: &str, text: &str) -> Result<Vec<ResultRow>, String> {
    let cfg = parse_config(text).map_err(|e| format!("{} [{}]: {}", name, text, e))?;
    run_experiment(name, &cfg).map_err(|e| format!("{} [{}]: {}", name, text, e))
}

fn all_pass(rows: &[ResultRow]) -> Result<usize, String> {
    match rows.iter().find(|r| !r.pass) {
        None => Ok(rows.len()),
        Some(r) => Err(format!("{} {} measured={} reference={} {}", r.experiment, r.params, r.measured,
            r.reference.as_ref().map_or(String::new(), |x| x.to_string()), r.note)),
    }
}

fn count(r: &ResultRow) -> u128 {
    match &r.measured {
        Num::Exact(x) if x.is_integer() => *x.numer() as u128,
        other => panic!("expected an integer count, got {}", other),
    }
}

fn c1() -> Outcome {
    let mut rows = 0;
    for q in [2, 3] {
        rows += all_pass(&run("euler", &format!("q={};degrees=0..6", q))?)?;
    }
    Ok(format!("{} degree classes agree", rows))
}

fn c2() -> Outcome {
    for q in [2i128, 3, 4] {
        let rows = run("counting", &format!("q={};degrees=0..10", q))?;
        all_pass(&rows)?;
        let want = Num::Exact(num_rational::Ratio::new(-1, q - 1));
        if rows.len() != 11 || rows.iter().any(|r| r.measured != want) {
            return Err(format!("q={}: residual differs from {}", q, want));
        }
    }
    Ok("residual -1/(q-1) for q = 2, 3, 4 and t = q^0..q^10".into())
}

fn c3() -> Outcome {
    let rows = run("coprime", "q=2;degrees=1..8;eps=1,2,3,4")?;
    all_pass(&rows)?;
    let windows: Vec<&ResultRow> = rows.iter().filter(|r| r.params.starts_with("window=")).collect();
    if windows.len() != 2 || windows[0].params != "window=1..4" || windows[1].params != "window=5..8" {
        return Err("unexpected degree windows".into());
    }
    Ok(format!("C = {} on [1,4], {} on [5,8]", windows[0].measured, windows[1].measured))
}

fn c4() -> Outcome {
    let mut total = 0;
    for n in [2, 3] {
        for q in [2, 3] {
            let rows = run("systole-oracle", &format!("n={};q={};samples=250;degrees=4", n, q))?;
            all_pass(&rows)?;
            total += count(&rows[0]);
        }
    }
    if total < 1000 {
        return Err(format!("only {} lattices", total));
    }
    Ok(format!("{} lattices agree", total))
}

fn c5() -> Outcome {
    let mut points = 0;
    let mut fams = 0;
    for n in [2, 3] {
        for q in [2, 3] {
            let rows = run("orbit-invariants", &format!("n={};q={};degrees=2,4,6", n, q))?;
            all_pass(&rows)?;
            fams += rows.len();
            points += rows.iter().map(count).sum::<u128>();
        }
    }
    Ok(format!("{} families, {} orbit points", fams, points))
}

fn c6() -> Outcome {
    for q in [2, 3, 5] {
        let rows = run("treecase", &format!("q={};samples=500;degrees=1..12", q))?;
        all_pass(&rows)?;
        if count(&rows[0]) != 500 {
            return Err(format!("q={}: fewer than 500 pairs", q));
        }
    }
    Ok("500 pairs per q agree".into())
}

fn c7() -> Outcome {
    let rows = run("diamond-census", "n=3;degrees=1..60")?;
    all_pass(&rows)?;
    Ok(format!("{} rows within tolerance", rows.len()))
}

fn c8() -> Outcome {
    for n in [2, 3] {
        let rows = run("ball-props", &format!("n={};samples=10000", n))?;
        all_pass(&rows)?;
    }
    Ok("10^4 samples per property, n = 2, 3".into())
}

fn c9() -> Outcome {
    let mut points = 0;
    for n in [2, 3] {
        let rows = run("latpoint-bound", &format!("n={};q=2;degrees=2,4,6", n))?;
        all_pass(&rows)?;
        points += rows.len();
    }
    Ok(format!("{} grid points, zero violations", points))
}

fn c10() -> Outcome {
    let mut failures = Vec::new();
    for n in [2usize, 3] {
        let degrees: Vec<String> = (1..=6).map(|i| (i * n).to_string()).collect();
        let rows = run("mass-decay", &format!("n={};q=2;degrees={};eps=1,2,3,4", n, degrees.join(",")))?;
        if let Err(e) = all_pass(&rows) {
            failures.push(format!("n={}: {}", n, e));
        }
    }
    if failures.is_empty() {
        Ok("slopes within [n-0.5, n+0.5], masses monotone".into())
    } else {
        Err(failures.join("; "))
    }
}

fn c11() -> Outcome {
    let mut failures = Vec::new();
    for n in [2usize, 3] {
        let degrees: Vec<String> = (1..).map(|i| i * n).take_while(|&d| d <= 24).map(|d| d.to_string()).collect();
        let rows = run("a-invariance", &format!("n={};degrees={}", n, degrees.join(",")))?;
        if let Err(e) = all_pass(&rows) {
            failures.push(format!("n={}: {}", n, e));
        }
    }
    if failures.is_empty() {
        Ok("ratio <= 2n/d for d <= 24".into())
    } else {
        Err(failures.join("; "))
    }
}

fn c12() -> Outcome {
    let rows = run("equidist-cauchy", "n=2;q=2;degrees=8,12")?;
    all_pass(&rows)?;
    Ok(format!("sup distance {}", rows[0].measured))
}

fn c13() -> Outcome {
    let rows = run("entropy-trend", "n=2;q=2;samples=1000;degrees=12")?;
    all_pass(&rows)?;
    Ok("inequalities hold, (1/M)H nondecreasing below n(n-1)".into())
}

const CRITERIA: &[Criterion] = &[
    Criterion { id: 1, title: "Euler function oracle", limit: Some(Duration::from_secs(10)), check: c1 },
    Criterion { id: 2, title: "ideal counting residual", limit: None, check: c2 },
    Criterion { id: 3, title: "coprime counting constant", limit: None, check: c3 },
    Criterion { id: 4, title: "systole oracle", limit: Some(Duration::from_secs(60)), check: c4 },
    Criterion { id: 5, title: "orbit invariants", limit: None, check: c5 },
    Criterion { id: 6, title: "three-way identity", limit: None, check: c6 },
    Criterion { id: 7, title: "census asymptotics", limit: None, check: c7 },
    Criterion { id: 8, title: "dynamical-ball properties", limit: None, check: c8 },
    Criterion { id: 9, title: "lattice-point bound", limit: None, check: c9 },
    Criterion { id: 10, title: "non-escape shape", limit: Some(Duration::from_secs(300)), check: c10 },
    Criterion { id: 11, title: "a-invariance defect", limit: None, check: c11 },
    Criterion { id: 12, title: "equidistribution proxy", limit: None, check: c12 },
    Criterion { id: 13, title: "entropy machinery", limit: None, check: c13 },
];

fn main() {
    let mut failed = Vec::new();
    for c in CRITERIA {
        let start = Instant::now();
        let mut outcome = (c.check)();
        let took = start.elapsed();
        if let (Ok(_), Some(limit)) = (&outcome, c.limit) {
            if took > limit {
                outcome = Err(format!("took {:.1}s, limit {}s", took.as_secs_f64(), limit.as_secs()));
            }
        }
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        println!("criterion {:>2}: {} {} ({:.1}s) {}", c.id, tag, c.title, took.as_secs_f64(), detail);
        if outcome.is_err() {
            failed.push(c.id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria pass", CRITERIA.len());
    } else {
        println!("acceptance: {} of {} criteria fail: {:?}", failed.len(), CRITERIA.len(), failed);
        std::process::exit(1);
    }
}
