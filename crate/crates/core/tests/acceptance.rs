//! One line per acceptance criterion; exits non-zero if any fails.

#[path = "support/properties.rs"]
mod properties;

use std::cell::OnceCell;
use std::process::ExitCode;
use std::time::Instant;

use projective_energy::report::{run_experiment, Check, ExperimentConfig, ExperimentReport};

struct Outcome {
    pass: bool,
    notes: Vec<String>,
}

/// Name, runtime budget in seconds, and the check.
type Criterion<'a> = (&'static str, f64, Box<dyn Fn() -> Outcome + 'a>);

fn experiment(name: &str) -> ExperimentReport {
    match run_experiment(name, &ExperimentConfig::default()) {
        Ok(r) => r,
        Err(e) => panic!("{name}: {e}"),
    }
}

fn from_checks<'a>(checks: impl IntoIterator<Item = &'a Check>, error: Option<&String>) -> Outcome {
    let mut pass = error.is_none();
    let mut notes: Vec<String> = error.map(|e| format!("error: {e}")).into_iter().collect();
    let mut n = 0;
    for c in checks {
        n += 1;
        if !c.pass {
            pass = false;
            notes.push(format!("{}: {:.6e} vs {:.6e}", c.label, c.estimate, c.reference));
        }
    }
    if n == 0 {
        pass = false;
        notes.push("no checks ran".into());
    }
    Outcome { pass, notes }
}

fn report(r: &ExperimentReport) -> Outcome {
    from_checks(&r.checks, r.error.as_ref())
}

fn filtered(r: &ExperimentReport, keep: impl Fn(&str) -> bool) -> Outcome {
    from_checks(r.checks.iter().filter(|c| keep(&c.label)), r.error.as_ref())
}

fn main() -> ExitCode {
    // criteria 2 and 3 share one run; its time is charged to criterion 2
    let bounds = OnceCell::new();
    let bounds_report = || bounds.get_or_init(|| experiment("bounds-identity"));
    let criteria: Vec<Criterion<'_>> = vec![
        ("unit-sphere averaging identity", 60.0, Box::new(|| report(&experiment("croke")))),
        (
            "complex bound saturation",
            120.0,
            Box::new(|| {
                filtered(bounds_report(), |l| {
                    l.contains("CP") || l.contains("complex bound at p = 2")
                })
            }),
        ),
        (
            "real bound saturation",
            60.0,
            Box::new(|| filtered(bounds_report(), |l| l.contains("RP") || l.contains("real bound"))),
        ),
        (
            "line-average formula",
            300.0,
            Box::new(|| report(&experiment("line-formula"))),
        ),
        (
            "RP2 family average",
            180.0,
            Box::new(|| report(&experiment("rp2-family"))),
        ),
        (
            "squeeze construction",
            300.0,
            Box::new(|| report(&experiment("squeeze"))),
        ),
        (
            "holomorphic corpus",
            120.0,
            Box::new(|| report(&experiment("holomorphic-corpus"))),
        ),
        (
            "variational identities",
            300.0,
            Box::new(|| report(&experiment("jacobi"))),
        ),
        (
            "theta and capped theta constructions",
            300.0,
            Box::new(|| {
                let a = experiment("theta");
                let b = experiment("capped-theta");
                let mut o = report(&a);
                let p = report(&b);
                o.pass &= p.pass;
                o.notes.extend(p.notes);
                o
            }),
        ),
        ("isosystolic inequality", 180.0, Box::new(|| report(&experiment("pu")))),
        ("harmonic map flow", 300.0, Box::new(|| report(&experiment("flow")))),
        (
            "property suites",
            300.0,
            Box::new(|| {
                let cases = [1000, 200, 300, 200, 100];
                let mut o = Outcome {
                    pass: true,
                    notes: Vec::new(),
                };
                for ((name, prop), n) in properties::ALL.iter().zip(cases) {
                    if let Err(e) = prop(n) {
                        o.pass = false;
                        o.notes.push(format!("{name}: {e}"));
                    }
                }
                o
            }),
        ),
    ];
    let mut failures = 0;
    for (i, (name, budget, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let mut o = run();
        let t = start.elapsed().as_secs_f64();
        if t > budget {
            o.pass = false;
            o.notes.push(format!("runtime {t:.1}s over the {budget:.0}s budget"));
        }
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} [PRIMARY] {name:<38} {status} ({t:.1}s)", i + 1);
        for n in &o.notes {
            println!("    {n}");
        }
        if !o.pass {
            failures += 1;
        }
    }
    println!("{} of 12 criteria passed", 12 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
