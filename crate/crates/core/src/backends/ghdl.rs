//! GHDL-style direct-exec simulator backend.
//!
//! Commands are assembled as plain strings and executed from the run's
//! build directory. Empty fields collapse so no command ever carries
//! double spaces.

use crate::error::{bail, err, Error, EvalResult, Exception};
use crate::flow::{ctx, FileKind, RunContext};
use crate::tclish::Interp;

/// GHDL `--std=` token for the context, defaulting to VHDL-2008.
pub fn std_token(c: &RunContext) -> &str {
    if c.std_rev.is_empty() {
        "08"
    } else {
        &c.std_rev
    }
}

/// `-P<lib>` search flags for every non-default library, first-use order.
fn lib_flags(c: &RunContext) -> Vec<String> {
    let mut libs: Vec<&str> = Vec::new();
    for f in &c.files {
        if !f.lib.is_empty() && !libs.contains(&f.lib.as_str()) {
            libs.push(&f.lib);
        }
    }
    libs.into_iter().map(|l| format!("-P{l}")).collect()
}

fn join_words<I, S>(parts: I) -> String
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    parts
        .into_iter()
        .map(|s| s.as_ref().to_string())
        .filter(|s| !s.is_empty())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Command lines for one stage, in execution order.
pub fn stage_commands(c: &RunContext, stage: &str) -> Result<Vec<String>, Error> {
    let std = format!("--std={}", std_token(c));
    let libs = join_words(lib_flags(c));
    match stage {
        "analysis" => {
            let mut cmds = Vec::new();
            for f in &c.files {
                match f.kind {
                    FileKind::Vhdl => {}
                    // constraints and tool scripts mean nothing to a simulator
                    FileKind::ConstraintXdc | FileKind::ConstraintSdc | FileKind::Tcl => continue,
                    _ => {
                        return Err(err!(
                            UnsupportedFile,
                            "ghdl cannot analyze non-VHDL file \"{}\"",
                            f.path.display()
                        ))
                    }
                }
                let work = if f.lib.is_empty() {
                    String::new()
                } else {
                    format!("--work={}", f.lib)
                };
                cmds.push(join_words([
                    "ghdl",
                    "-a",
                    &c.arg_prefix,
                    &std,
                    "--workdir=work",
                    &libs,
                    &c.arg_suffix,
                    &work,
                    &f.path.display().to_string(),
                ]));
            }
            Ok(cmds)
        }
        "elaboration" => {
            if c.top.is_empty() {
                return Err(err!(TopNotSet, "no top set: call hbs::SetTop before elaboration"));
            }
            Ok(vec![join_words([
                "ghdl",
                "-e",
                &c.arg_prefix,
                &std,
                "--workdir=work",
                &libs,
                &c.arg_suffix,
                &c.top,
            ])])
        }
        "simulation" => {
            if c.top.is_empty() {
                return Err(err!(TopNotSet, "no top set: call hbs::SetTop before simulation"));
            }
            let generics = join_words(
                c.generics
                    .iter()
                    .map(|(n, v)| format!("-g{n}={v}"))
                    .collect::<Vec<_>>(),
            );
            let severity = c
                .exit_severity
                .map(|s| format!("--assert-level={}", s.as_str()))
                .unwrap_or_default();
            Ok(vec![join_words([
                "ghdl",
                "-r",
                &c.arg_prefix,
                &std,
                "--workdir=work",
                &libs,
                &c.arg_suffix,
                &c.top,
                &generics,
                &severity,
            ])])
        }
        other => Err(err!(UnknownStage, "unknown ghdl stage \"{other}\"")),
    }
}

pub(crate) fn run_stage(interp: &mut Interp, stage: &str) -> EvalResult {
    let cmds = stage_commands(ctx(interp), stage).map_err(Exception::Error)?;
    let build_dir = ctx(interp).build_dir.clone();
    if !interp.dry_run && stage == "analysis" {
        std::fs::create_dir_all(build_dir.join("work")).map_err(Error::from)?;
    }
    let top = ctx(interp).top.clone();
    for cmd in cmds {
        let code: i32 = crate::flow::exec_line(interp, &cmd, Some(&build_dir))?
            .parse()
            .unwrap_or(1);
        if code != 0 {
            bail!(Script, "{top} {stage} failed with exit status {code}");
        }
    }
    Ok(String::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::{FileEntry, Severity};
    use std::path::PathBuf;

    fn base_ctx() -> RunContext {
        RunContext {
            top: "tb_x".to_string(),
            std_rev: "08".to_string(),
            ..RunContext::default()
        }
    }

    #[test]
    fn elaboration_matches_template() {
        let c = base_ctx();
        let cmds = stage_commands(&c, "elaboration").unwrap();
        assert_eq!(cmds, vec!["ghdl -e --std=08 --workdir=work tb_x"]);
    }

    #[test]
    fn no_double_spaces_for_any_field_combination() {
        for prefix in ["", "-v"] {
            for suffix in ["", "--dump-arrays"] {
                for lib in ["", "simple"] {
                    let mut c = base_ctx();
                    c.arg_prefix = prefix.to_string();
                    c.arg_suffix = suffix.to_string();
                    c.files.push(FileEntry {
                        path: PathBuf::from("/tmp/a.vhd"),
                        kind: FileKind::Vhdl,
                        lib: lib.to_string(),
                        std: String::new(),
                    });
                    for stage in ["analysis", "elaboration", "simulation"] {
                        for cmd in stage_commands(&c, stage).unwrap() {
                            assert!(!cmd.contains("  "), "double space in {cmd:?}");
                            assert_eq!(cmd, cmd.trim(), "outer spaces in {cmd:?}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn suffix_appears_before_top() {
        let mut c = base_ctx();
        c.arg_suffix = "--dump-arrays".to_string();
        let sim = &stage_commands(&c, "simulation").unwrap()[0];
        let suffix_at = sim.find("--dump-arrays").unwrap();
        let top_at = sim.find("tb_x").unwrap();
        assert!(suffix_at < top_at, "suffix must precede top in {sim:?}");
    }

    #[test]
    fn generics_and_severity_render_in_simulation() {
        let mut c = base_ctx();
        c.generics.push(("G".to_string(), "4".to_string()));
        c.exit_severity = Some(Severity::Error);
        let sim = &stage_commands(&c, "simulation").unwrap()[0];
        assert!(sim.contains("-gG=4"));
        assert!(sim.contains("--assert-level=error"));
        let elab = &stage_commands(&c, "elaboration").unwrap()[0];
        assert!(!elab.contains("-gG=4"));
    }

    #[test]
    fn severity_absent_unless_set() {
        let c = base_ctx();
        let sim = &stage_commands(&c, "simulation").unwrap()[0];
        assert!(!sim.contains("--assert-level"));
    }

    #[test]
    fn analysis_per_vhdl_file_with_lib_flags() {
        let mut c = base_ctx();
        c.files.push(FileEntry {
            path: PathBuf::from("/x/edge.vhd"),
            kind: FileKind::Vhdl,
            lib: "simple".to_string(),
            std: String::new(),
        });
        c.files.push(FileEntry {
            path: PathBuf::from("/x/tb.vhd"),
            kind: FileKind::Vhdl,
            lib: String::new(),
            std: String::new(),
        });
        c.files.push(FileEntry {
            path: PathBuf::from("/x/c.xdc"),
            kind: FileKind::ConstraintXdc,
            lib: String::new(),
            std: String::new(),
        });
        let cmds = stage_commands(&c, "analysis").unwrap();
        assert_eq!(cmds.len(), 2);
        assert_eq!(
            cmds[0],
            "ghdl -a --std=08 --workdir=work -Psimple --work=simple /x/edge.vhd"
        );
        assert_eq!(cmds[1], "ghdl -a --std=08 --workdir=work -Psimple /x/tb.vhd");
    }

    #[test]
    fn verilog_files_are_rejected() {
        let mut c = base_ctx();
        c.files.push(FileEntry {
            path: PathBuf::from("/x/m.v"),
            kind: FileKind::Verilog,
            lib: String::new(),
            std: String::new(),
        });
        let e = stage_commands(&c, "analysis").unwrap_err();
        assert_eq!(e.kind, crate::error::ErrorKind::UnsupportedFile);
    }

    #[test]
    fn missing_top_is_an_error() {
        let mut c = base_ctx();
        c.top = String::new();
        assert!(stage_commands(&c, "elaboration").is_err());
        assert!(stage_commands(&c, "simulation").is_err());
    }
}
