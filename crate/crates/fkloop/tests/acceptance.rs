//! Acceptance criteria, one PASS/FAIL line each. Runs as a plain binary so
//! the lines always reach the terminal; exits nonzero if any criterion fails.

use std::time::Instant;

use fkloop::cli::suites::{self, Check};
use fkloop::enumeration::enumerate_balanced_words;
use fkloop::maps::{loop_count, map_to_word, word_to_map};
use fkloop::walks::Caps;
use fkloop::words::Word;

const SEED: u64 = 7;

fn all(checks: Vec<Check>) -> (bool, Vec<String>) {
    let mut lines = Vec::new();
    for c in &checks {
        lines.push(c.line());
        lines.extend(c.detail.iter().map(|d| format!("    {d}")));
    }
    (checks.iter().all(|c| c.passed), lines)
}

fn golden_pair() -> (bool, String) {
    let word: Word = "hhhhhccHCHHcHHFF".parse().unwrap();
    let Ok((m, open)) = word_to_map(&word) else {
        return (false, "golden word rejected".into());
    };
    let ok = m.edges() == 8 && open.count_open() == 7 && loop_count(&m, &open) == 3 && map_to_word(&m, &open) == word;
    (ok, format!("golden pair: 8 edges, 7 open, 3 loops, word reproduced: {ok}"))
}

fn main() {
    let grid = [0.25, 1.0, 2.0, 3.0, 3.9];
    let trio = [1.0, 2.0, 3.0];
    let caps = Caps::default();
    let criteria: Vec<(&str, Box<dyn Fn() -> (bool, Vec<String>)>)> = vec![
        ("1 parameter algebra", Box::new(move || all(vec![suites::parameter_identities(&grid)]))),
        ("2 normalisation", Box::new(move || all(vec![suites::normalisation(&grid)]))),
        ("3 resolvent equation", Box::new(move || all(trio.iter().map(|&q| suites::resolvent(q, 50)).collect()))),
        ("4 kernel closed form", Box::new(move || all(trio.iter().map(|&q| suites::kernel(q, 20)).collect()))),
        ("5 Wiener-Hopf factorisation", Box::new(move || all(trio.iter().map(|&q| suites::wiener_hopf_identity(q, 100)).collect()))),
        ("6 inverse transform and Beta identity", Box::new(move || all(trio.iter().map(|&q| suites::appendix(q, 20)).collect()))),
        ("7 F_l asymptotics", Box::new(move || all(trio.iter().map(|&q| suites::asymptotics(q)).collect()))),
        (
            "8 bijection",
            Box::new(|| {
                let (mut ok, mut lines) = all(vec![suites::roundtrip(4)]);
                let k1 = enumerate_balanced_words(1, 4).map(|w| w.len()).unwrap_or(0);
                ok &= k1 == 4;
                lines.push(format!("    words with one burger: {k1}"));
                let (g, line) = golden_pair();
                ok &= g;
                lines.push(format!("    {line}"));
                (ok, lines)
            }),
        ),
        ("9 hitting-time dictionary", Box::new(move || all(vec![suites::dictionary(2.0, 1_100_000, SEED, caps, 10, 1_000_000)]))),
        (
            "10 perimeter exponents",
            Box::new(move || all([1.0, 2.0].iter().map(|&q| suites::perimeter_slopes(q, 10_000_000, SEED, caps, 10, 500, 0.15)).collect())),
        ),
        (
            "11 centred steps",
            Box::new(move || all(vec![suites::xi_centred(2.0, 10_000_000, SEED, caps.letters, &[100, 1000, 10_000], 0.05)])),
        ),
        ("12 W(gamma_plus) = 2/gamma_plus", Box::new(move || all(grid.iter().map(|&q| suites::edge_resolvent(q)).collect()))),
    ];
    let mut failed = 0;
    for (name, f) in &criteria {
        let t = Instant::now();
        let (ok, lines) = f();
        println!("{} criterion {name} ({:.1} s)", if ok { "PASS" } else { "FAIL" }, t.elapsed().as_secs_f64());
        for l in lines {
            println!("    {l}");
        }
        failed += usize::from(!ok);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
