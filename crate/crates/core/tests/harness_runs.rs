use std::time::{Duration, Instant};

use qbracket::{run_all, HarnessConfig, SuiteReport};

fn failures(reports: &[SuiteReport]) -> Vec<String> {
    reports
        .iter()
        .flat_map(|r| {
            r.assertions
                .iter()
                .filter(|a| !a.pass)
                .map(move |a| format!("{}: {} observed {}", r.suite, a.name, a.observed))
        })
        .collect()
}

#[test]
fn default_and_halved_runs() {
    let start = Instant::now();
    let reports = run_all(&HarnessConfig::default()).unwrap();
    let elapsed = start.elapsed();
    assert_eq!(reports.len(), 13);
    assert_eq!(failures(&reports), Vec::<String>::new());
    assert!(elapsed < Duration::from_secs(60), "{elapsed:?}");

    // timed alone above; the halved runs follow sequentially
    let config = HarnessConfig {
        precision_divisor: 2,
        seed: 11,
        ..HarnessConfig::default()
    };
    let a = run_all(&config).unwrap();
    let b = run_all(&config).unwrap();
    assert_eq!(failures(&a), Vec::<String>::new());
    let json = |r: &[SuiteReport]| r.iter().map(|s| s.to_json()).collect::<Vec<_>>();
    assert_eq!(json(&a), json(&b));
}
