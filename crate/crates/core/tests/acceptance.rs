//! Acceptance criteria, one line each. Run with `cargo test --test acceptance`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use putlab::checks::{self, Check};
use putlab::put::{corollary_ratio_limits, curve_sweep, eps_grid, SweepOptions};

struct Outcome {
    passed: bool,
    detail: String,
}

fn from_checks(checks: Vec<Check>) -> Outcome {
    let failed: Vec<_> = checks.iter().filter(|c| !c.passed).collect();
    let margin = checks.iter().map(|c| c.margin).fold(f64::INFINITY, f64::min);
    let detail = match failed.first() {
        None => format!("{} checks, min margin {margin:.3e}", checks.len()),
        Some(c) => format!("{} of {} failed, first: {c}", failed.len(), checks.len()),
    };
    Outcome { passed: failed.is_empty(), detail }
}

fn filtered(checks: putlab::Result<Vec<Check>>, prefix: &str) -> Outcome {
    match checks {
        Ok(c) => from_checks(c.into_iter().filter(|c| c.name.starts_with(prefix)).collect()),
        Err(e) => Outcome { passed: false, detail: format!("error: {e}") },
    }
}

fn advantage() -> putlab::Result<Outcome> {
    let grid = eps_grid(1e-4, 1.0, 200, true)?;
    let opts = SweepOptions::default();
    let mut problems = Vec::new();
    let mut worst_s = f64::INFINITY;
    for v in 3..=9 {
        for p in curve_sweep(v, 1.0, &grid, opts)? {
            let r = p.ratio_s.unwrap_or(f64::NAN);
            worst_s = worst_s.min(r);
            if !(r > 1.0) {
                problems.push(format!("ratio_s = {r} at v={v} eps={}", p.eps));
            }
            if v == 4 || v == 9 {
                let ra = p.ratio_a.unwrap_or(f64::NAN);
                if !(ra > 1.0) {
                    problems.push(format!("ratio_a = {ra} at v={v} eps={}", p.eps));
                }
            }
        }
    }
    let mut worst_gap = 0.0f64;
    for v in [4, 9] {
        let lim = corollary_ratio_limits(v)?;
        let p = &curve_sweep(v, 1.0, &[1e-3], opts)?[0];
        for (num, analytic) in [(p.ratio_s, Some(lim.s)), (p.ratio_a, lim.a)] {
            let (num, analytic) = (num.unwrap_or(f64::NAN), analytic.unwrap_or(f64::NAN));
            let gap = (num / analytic - 1.0).abs();
            worst_gap = worst_gap.max(gap);
            if !(gap <= 0.02) {
                problems.push(format!("v={v}: small-eps ratio {num} vs {analytic}"));
            }
        }
    }
    Ok(Outcome {
        passed: problems.is_empty(),
        detail: if problems.is_empty() {
            format!("min ratio_s {worst_s:.4}, worst corollary gap {worst_gap:.2e}")
        } else {
            problems.join("; ")
        },
    })
}

fn no_advantage() -> putlab::Result<Outcome> {
    let grid = eps_grid(1e-4, 4.0, 200, true)?;
    let worst = curve_sweep(2, 1.0, &grid, SweepOptions::default())?
        .iter()
        .map(|p| p.ratio_s.unwrap_or(f64::NAN))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(Outcome { passed: worst <= 1.0 + 1e-9, detail: format!("max ratio_s {worst:.12}") })
}

fn lift(r: putlab::Result<Outcome>) -> Outcome {
    r.unwrap_or_else(|e| Outcome { passed: false, detail: format!("error: {e}") })
}

fn main() -> ExitCode {
    let seed = putlab::oracle::DEFAULT_SEED;
    let criteria: Vec<(&str, u64, Box<dyn Fn() -> Outcome>)> = vec![
        ("1 SIC validity", 1, Box::new(|| filtered(checks::sic(), "sic"))),
        ("2 QLDP boundary tightness", 5, Box::new(|| filtered(checks::qldp(), "qldp"))),
        ("3 quantum closed forms vs numeric", 10, Box::new(|| filtered(checks::achievability(), "quantum closed forms"))),
        ("4 block-design achievability", 30, Box::new(|| filtered(checks::achievability(), "block design"))),
        ("5 converse on random mechanisms", 60, Box::new(move || filtered(checks::converse(seed), "converse"))),
        ("6 extremal decomposition round trip", 30, Box::new(move || filtered(checks::decompose(seed), "decompose"))),
        ("7 small-eps coefficients", 5, Box::new(|| filtered(checks::taylor(), "taylor"))),
        ("8 quantum advantage", 30, Box::new(|| lift(advantage()))),
        ("9 no advantage for v=2", 5, Box::new(|| lift(no_advantage()))),
    ];
    let mut all = true;
    for (name, budget, run) in criteria {
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let in_time = took <= Duration::from_secs(budget);
        let ok = out.passed && in_time;
        all &= ok;
        let tag = if ok { "PASS" } else { "FAIL" };
        let late = if in_time { String::new() } else { format!(", over the {budget} s budget") };
        println!("{tag} criterion {name}: {} [{:.2} s{late}]", out.detail, took.as_secs_f64());
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
