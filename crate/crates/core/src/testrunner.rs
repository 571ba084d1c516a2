//! Parallel testbench runner.
//!
//! Each testbench executes in a fresh isolated flow: its own interpreter
//! (the registry is re-sourced per flow, so the global `hbs::` state of one
//! flow is unobservable in another), its own run context and build
//! directory, with stdout+stderr captured to a log file. A coordinator
//! dispatches FIFO over a bounded worker pool and is the only writer of
//! the summary.

use std::path::{Path, PathBuf};
use std::sync::mpsc;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use crate::error::{err, Error};
use crate::flow::{self, RunOptions};
use crate::registry::{self, DiscoveryList};
use crate::tclish::OutputSink;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestStatus {
    Pass,
    Fail,
    Error,
}

#[derive(Debug, Clone)]
pub struct TestResult {
    pub target: String,
    pub status: TestStatus,
    pub duration: Duration,
    pub output_file: PathBuf,
}

#[derive(Debug)]
pub struct TestRun {
    /// Results sorted by target path.
    pub results: Vec<TestResult>,
    /// Targets in dispatch (pickup) order; with one worker this equals the
    /// sorted target order.
    pub exec_order: Vec<String>,
    pub workers: usize,
}

impl TestRun {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.status == TestStatus::Pass)
    }
}

fn sanitize(target: &str) -> String {
    target
        .replace("::", "__")
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.') {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn run_one(list: &DiscoveryList, target: &str, opts: &RunOptions, log_path: &Path) -> TestResult {
    let started = Instant::now();
    let status = (|| -> Result<TestStatus, Error> {
        let log = std::fs::File::create(log_path)?;
        let mut interp = crate::new_interp();
        interp.set_output(OutputSink::File(log));
        registry::source_all(&mut interp, list)?;
        match flow::run_target(&mut interp, target, &[], opts) {
            Ok(()) => Ok(TestStatus::Pass),
            Err(e) => {
                interp.writeln_out(&format!("{e}"));
                Ok(TestStatus::Fail)
            }
        }
    })()
    .unwrap_or(TestStatus::Error);
    TestResult {
        target: target.to_string(),
        status,
        duration: started.elapsed(),
        output_file: log_path.to_path_buf(),
    }
}

/// Run every testbench target matching `pattern`, at most `workers` flows
/// in flight at once. Results are collected in completion order and the
/// summary is sorted by target path.
pub fn run_tests(
    list: &DiscoveryList,
    pattern: Option<&str>,
    workers: usize,
    opts: &RunOptions,
) -> Result<TestRun, Error> {
    assert!(workers >= 1, "workers must be positive");

    let targets = {
        let mut interp = crate::new_interp();
        registry::source_all(&mut interp, list)?;
        registry::list_tb(&interp, pattern)
    };
    if targets.is_empty() {
        let what = pattern
            .map(|p| format!(" matching pattern \"{p}\""))
            .unwrap_or_default();
        return Err(err!(UnknownTarget, "no testbench targets{what}"));
    }

    let log_dir = opts.build_root.join("build").join("test-logs");
    std::fs::create_dir_all(&log_dir)?;

    let nworkers = workers.min(targets.len());
    let (job_tx, job_rx) = mpsc::channel::<String>();
    for t in &targets {
        job_tx.send(t.clone()).expect("queue open");
    }
    drop(job_tx);
    let job_rx = Arc::new(Mutex::new(job_rx));
    let exec_order = Arc::new(Mutex::new(Vec::<String>::new()));
    let (res_tx, res_rx) = mpsc::channel::<TestResult>();

    std::thread::scope(|scope| {
        for _ in 0..nworkers {
            let job_rx = Arc::clone(&job_rx);
            let exec_order = Arc::clone(&exec_order);
            let res_tx = res_tx.clone();
            let log_dir = log_dir.clone();
            scope.spawn(move || loop {
                let target = match job_rx.lock().unwrap().recv() {
                    Ok(t) => t,
                    Err(_) => break,
                };
                exec_order.lock().unwrap().push(target.clone());
                let log_path = log_dir.join(format!("{}.log", sanitize(&target)));
                let result = run_one(list, &target, opts, &log_path);
                if res_tx.send(result).is_err() {
                    break;
                }
            });
        }
    });
    drop(res_tx);

    let mut results: Vec<TestResult> = res_rx.into_iter().collect();
    results.sort_by(|a, b| a.target.cmp(&b.target));
    let exec_order = Arc::try_unwrap(exec_order)
        .expect("workers joined")
        .into_inner()
        .unwrap();
    Ok(TestRun {
        results,
        exec_order,
        workers: nworkers,
    })
}

/// One line per test plus totals; deterministic given the result set.
pub fn render_report(run: &TestRun) -> String {
    let mut out = String::new();
    let mut passed = 0usize;
    for r in &run.results {
        let (tag, extra) = match r.status {
            TestStatus::Pass => {
                passed += 1;
                ("PASS", String::new())
            }
            TestStatus::Fail => ("FAIL", format!("  (output: {})", r.output_file.display())),
            TestStatus::Error => ("ERROR", format!("  (output: {})", r.output_file.display())),
        };
        out.push_str(&format!(
            "{tag}  {}  {:.2}s{extra}\n",
            r.target,
            r.duration.as_secs_f64()
        ));
    }
    let failed = run.results.len() - passed;
    out.push_str(&format!(
        "total {}, {passed} passed, {failed} failed\n",
        run.results.len()
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry::discover;
    use std::fs;

    fn tb_fixture(dir: &Path, body_pass: &str, body_fail: &str) {
        fs::write(
            dir.join("tbs.hbs"),
            format!(
                "namespace eval c {{
  proc tb-pass {{}} {{
    hbs::SetTool mock-sim
    set hbs::mock::simulation \"{body_pass}\"
    hbs::Run
  }}
  proc tb-fail {{}} {{
    hbs::SetTool mock-sim
    set hbs::mock::simulation \"{body_fail}\"
    hbs::Run
  }}
  hbs::Register
}}
"
            ),
        )
        .unwrap();
    }

    #[test]
    fn mixed_outcome_summary_and_logs() {
        let dir = tempfile::tempdir().unwrap();
        tb_fixture(dir.path(), "true", "false");
        let list = discover(dir.path()).unwrap();
        let run = run_tests(
            &list,
            None,
            2,
            &RunOptions::new(dir.path(), dir.path()),
        )
        .unwrap();
        assert_eq!(run.results.len(), 2);
        assert!(!run.all_passed());
        let report = render_report(&run);
        assert!(report.contains("1 passed, 1 failed"), "{report}");
        assert!(report.contains("PASS  c::tb-pass"), "{report}");
        assert!(report.contains("FAIL  c::tb-fail"), "{report}");
        for r in &run.results {
            assert!(r.output_file.exists());
        }
        let fail = run
            .results
            .iter()
            .find(|r| r.status == TestStatus::Fail)
            .unwrap();
        let log = fs::read_to_string(&fail.output_file).unwrap();
        assert!(log.contains("mock stage"), "{log}");
    }

    #[test]
    fn no_tests_matched_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        tb_fixture(dir.path(), "true", "true");
        let list = discover(dir.path()).unwrap();
        let err = run_tests(
            &list,
            Some("nomatch*"),
            1,
            &RunOptions::new(dir.path(), dir.path()),
        )
        .unwrap_err();
        assert!(err.msg.contains("no testbench targets"));
    }

    #[test]
    fn single_worker_runs_in_sorted_order() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(
            dir.path().join("many.hbs"),
            "namespace eval c {
  proc tb-c {} { hbs::SetTool mock-sim; hbs::Run }
  proc tb-a {} { hbs::SetTool mock-sim; hbs::Run }
  proc tb-b {} { hbs::SetTool mock-sim; hbs::Run }
  hbs::Register
}
",
        )
        .unwrap();
        let list = discover(dir.path()).unwrap();
        let run = run_tests(&list, None, 1, &RunOptions::new(dir.path(), dir.path())).unwrap();
        assert_eq!(
            run.exec_order,
            vec!["c::tb-a", "c::tb-b", "c::tb-c"]
        );
        assert!(run.all_passed());
    }

    #[test]
    fn flows_are_isolated() {
        let dir = tempfile::tempdir().unwrap();
        // Each flow sets a global and later checks nobody else changed it.
        fs::write(
            dir.path().join("iso.hbs"),
            "namespace eval g { set flag unset }
namespace eval c {
  proc _body {} {
    set g::flag $hbs::ThisTargetPath
    exec sleep 0.3
    if {$g::flag ne $hbs::ThisTargetPath} { error \"state leaked: $g::flag\" }
  }
  proc tb-one {} { _body }
  proc tb-two {} { _body }
  hbs::Register
}
",
        )
        .unwrap();
        let list = discover(dir.path()).unwrap();
        let run = run_tests(&list, None, 2, &RunOptions::new(dir.path(), dir.path())).unwrap();
        assert!(run.all_passed(), "{}", render_report(&run));
    }

    #[test]
    fn report_all_pass_counts() {
        let run = TestRun {
            results: vec![
                TestResult {
                    target: "a::tb".into(),
                    status: TestStatus::Pass,
                    duration: Duration::from_millis(10),
                    output_file: PathBuf::from("x.log"),
                },
                TestResult {
                    target: "b::tb".into(),
                    status: TestStatus::Pass,
                    duration: Duration::from_millis(10),
                    output_file: PathBuf::from("y.log"),
                },
                TestResult {
                    target: "c::tb".into(),
                    status: TestStatus::Pass,
                    duration: Duration::from_millis(10),
                    output_file: PathBuf::from("z.log"),
                },
            ],
            exec_order: vec![],
            workers: 1,
        };
        let report = render_report(&run);
        assert!(report.contains("3 passed, 0 failed"));
    }

    #[test]
    fn sanitize_produces_safe_names() {
        assert_eq!(sanitize("a::b::tb-x"), "a__b__tb-x");
        assert_eq!(sanitize("weird core::tb"), "weird_core__tb");
    }
}
