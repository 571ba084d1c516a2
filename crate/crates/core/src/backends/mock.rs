//! Fully scriptable mock backends for tests.
//!
//! Per-stage command templates come from namespace variables: set
//! `hbs::mock::<stage>` to a command line and the mock-sim backend runs it
//! through the exec wrapper, recording (stage, command, exit) to
//! `<buildDir>/trace.jsonl`. mock-prj records its stage entries into the
//! emitted script instead.

use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::{bail, Error, EvalResult};
use crate::flow::{ctx, CallbackSpec, Phase};
use crate::tclish::Interp;

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct TraceEntry {
    pub stage: String,
    pub phase: String,
    pub command: String,
    pub exit: i32,
}

fn trace_append(interp: &Interp, entry: &TraceEntry) -> Result<(), Error> {
    use std::io::Write;
    let path = ctx(interp).build_dir.join("trace.jsonl");
    let mut f = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)?;
    writeln!(f, "{}", serde_json::to_string(entry).expect("trace serializes"))?;
    Ok(())
}

/// Parse a trace file back into entries (test helper).
pub fn read_trace(path: &Path) -> Result<Vec<TraceEntry>, Error> {
    let text = std::fs::read_to_string(path)?;
    let mut out = Vec::new();
    for line in text.lines() {
        out.push(
            serde_json::from_str(line)
                .map_err(|e| crate::error::err!(Io, "bad trace line: {e}"))?,
        );
    }
    Ok(out)
}

pub(crate) fn run_stage(interp: &mut Interp, stage: &str) -> EvalResult {
    let cmd = interp
        .get_var(&format!("hbs::mock::{stage}"))
        .unwrap_or_default();
    if cmd.is_empty() {
        if !interp.dry_run {
            trace_append(
                interp,
                &TraceEntry {
                    stage: stage.to_string(),
                    phase: "stage".to_string(),
                    command: String::new(),
                    exit: 0,
                },
            )?;
        }
        return Ok(String::new());
    }
    let build_dir = ctx(interp).build_dir.clone();
    let code: i32 = crate::flow::exec_line(interp, &cmd, Some(&build_dir))?
        .parse()
        .unwrap_or(1);
    if !interp.dry_run {
        trace_append(
            interp,
            &TraceEntry {
                stage: stage.to_string(),
                phase: "stage".to_string(),
                command: cmd.clone(),
                exit: code,
            },
        )?;
    }
    if code != 0 {
        bail!(
            MockStageFailure,
            "mock stage \"{stage}\" failed with exit status {code}"
        );
    }
    Ok(String::new())
}

/// Record a callback invocation in the trace. Only active for live
/// mock-sim flows; everything else is a no-op.
pub(crate) fn trace_callback(
    interp: &mut Interp,
    stage: &str,
    phase: Phase,
    cb: &CallbackSpec,
) -> EvalResult {
    if interp.dry_run || ctx(interp).tool.as_deref() != Some("mock-sim") {
        return Ok(String::new());
    }
    let mut command = cb.name.clone();
    if !cb.argv.is_empty() {
        command.push(' ');
        command.push_str(&cb.argv.join(" "));
    }
    trace_append(
        interp,
        &TraceEntry {
            stage: stage.to_string(),
            phase: phase.as_str().to_string(),
            command,
            exit: 0,
        },
    )?;
    Ok(String::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::{run_target, RunOptions};
    use crate::new_interp;
    use crate::registry::{discover, source_all};

    fn load(dir: &Path, hbs: &str) -> Interp {
        std::fs::write(dir.join("t.hbs"), hbs).unwrap();
        let list = discover(dir).unwrap();
        let mut interp = new_interp();
        source_all(&mut interp, &list).unwrap();
        interp
    }

    #[test]
    fn trace_has_one_line_per_stage_in_order() {
        let dir = tempfile::tempdir().unwrap();
        let mut interp = load(
            dir.path(),
            "namespace eval c {\n  proc tb {} {\n    hbs::SetTool mock-sim\n    set hbs::mock::simulation \"true\"\n    hbs::Run\n  }\n  hbs::Register\n}\n",
        );
        run_target(
            &mut interp,
            "c::tb",
            &[],
            &RunOptions::new(dir.path(), dir.path()),
        )
        .unwrap();
        let trace = read_trace(&dir.path().join("build/c/tb/trace.jsonl")).unwrap();
        let stages: Vec<&str> = trace.iter().map(|t| t.stage.as_str()).collect();
        assert_eq!(stages, vec!["analysis", "elaboration", "simulation"]);
        assert_eq!(trace[2].command, "true");
        assert_eq!(trace[2].exit, 0);
    }

    #[test]
    fn failing_stage_aborts_flow() {
        let dir = tempfile::tempdir().unwrap();
        let mut interp = load(
            dir.path(),
            "namespace eval c {\n  proc tb {} {\n    hbs::SetTool mock-sim\n    set hbs::mock::elaboration \"false\"\n    hbs::Run\n  }\n  hbs::Register\n}\n",
        );
        let err = run_target(
            &mut interp,
            "c::tb",
            &[],
            &RunOptions::new(dir.path(), dir.path()),
        )
        .unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("mock stage \"elaboration\" failed"), "{msg}");
        let trace = read_trace(&dir.path().join("build/c/tb/trace.jsonl")).unwrap();
        let stages: Vec<&str> = trace.iter().map(|t| t.stage.as_str()).collect();
        // simulation never ran
        assert_eq!(stages, vec!["analysis", "elaboration"]);
        assert_eq!(trace[1].exit, 1);
    }

    #[test]
    fn callbacks_interleave_pre_stage_post() {
        let dir = tempfile::tempdir().unwrap();
        let mut interp = load(
            dir.path(),
            "proc tok {t} { }
namespace eval c {
  proc tb {} {
    hbs::SetTool mock-sim
    set hbs::mock::simulation \"true\"
    hbs::AddPreSimCb tok before
    hbs::AddPostSimCb tok after
    hbs::Run
  }
  hbs::Register
}
",
        );
        run_target(
            &mut interp,
            "c::tb",
            &[],
            &RunOptions::new(dir.path(), dir.path()),
        )
        .unwrap();
        let trace = read_trace(&dir.path().join("build/c/tb/trace.jsonl")).unwrap();
        let sim: Vec<(&str, &str)> = trace
            .iter()
            .filter(|t| t.stage == "simulation")
            .map(|t| (t.phase.as_str(), t.command.as_str()))
            .collect();
        assert_eq!(
            sim,
            vec![
                ("pre", "tok before"),
                ("stage", "true"),
                ("post", "tok after")
            ]
        );
    }

    #[test]
    fn backend_symmetry_info_stages_equal_executed_stages() {
        let dir = tempfile::tempdir().unwrap();
        let mut interp = load(
            dir.path(),
            "namespace eval c {\n  proc tb {} {\n    hbs::SetTool mock-sim\n    hbs::Run\n  }\n  hbs::Register\n}\n",
        );
        run_target(
            &mut interp,
            "c::tb",
            &[],
            &RunOptions::new(dir.path(), dir.path()),
        )
        .unwrap();
        let trace = read_trace(&dir.path().join("build/c/tb/trace.jsonl")).unwrap();
        let executed: Vec<&str> = trace
            .iter()
            .filter(|t| t.phase == "stage")
            .map(|t| t.stage.as_str())
            .collect();
        let spec = crate::backends::backend_for("mock-sim").unwrap();
        assert_eq!(executed, spec.stages);
    }
}
