//! Script-generating backend: collects the whole flow and emits a Tcl
//! script (`<buildDir>/run.tcl`, stdout in dry-run) for the tool to run
//! later. Unknown commands evaluated while a script-gen tool is active are
//! captured verbatim and replayed at their original position relative to
//! file additions.

use crate::error::{bail, Error, EvalResult, Exception};
use crate::flow::{self, ctx, CallbackSpec, FileEntry, FileKind, Phase, ScriptEvent};
use crate::tclish::{parse, Interp, ScriptNode};

use super::BackendSpec;

/// Unknown-command hook installed while a script-gen backend is active.
pub(crate) fn record_unknown(interp: &mut Interp, node: &ScriptNode) -> EvalResult {
    let line = interp.render_node_verbatim(node)?;
    flow::ctx_mut(interp).events.push(ScriptEvent::Raw(line));
    Ok(String::new())
}

fn render_callback(cb: &CallbackSpec) -> String {
    if cb.argv.is_empty() {
        cb.name.clone()
    } else {
        format!("{} {}", cb.name, parse::format_list(cb.argv.iter()))
    }
}

fn callback_lines(interp: &Interp, stage: &str, phase: Phase, out: &mut Vec<String>) {
    if let Some(cbs) = ctx(interp).callbacks.get(&(stage.to_string(), phase)) {
        for cb in cbs {
            out.push(render_callback(cb));
        }
    }
}

fn file_lines(f: &FileEntry, out: &mut Vec<String>) {
    let path = f.path.display().to_string();
    let read = match f.kind {
        FileKind::Vhdl => format!("read_vhdl {path}"),
        FileKind::Verilog => format!("read_verilog {path}"),
        FileKind::SystemVerilog => format!("read_verilog -sv {path}"),
        FileKind::ConstraintXdc => format!("read_xdc {path}"),
        FileKind::Tcl => format!("source {path}"),
        FileKind::ConstraintSdc | FileKind::Other => format!("add_files {path}"),
    };
    out.push(read);
    if !f.lib.is_empty() {
        out.push(format!("set_property LIBRARY {} [get_files {path}]", f.lib));
    }
}

/// Deterministic script text for the flow collected so far, through stage
/// `through` inclusive. Two calls on the same context yield identical
/// bytes.
pub fn emit(interp: &Interp, spec: &BackendSpec, through: &str) -> Result<String, Exception> {
    let c = ctx(interp);
    let mut lines: Vec<String> = Vec::new();
    lines.push(format!("# {} flow script generated by hbs", spec.name));

    for stage in spec.stages {
        lines.push(String::new());
        lines.push(format!("# stage: {stage}"));
        callback_lines(interp, stage, Phase::Pre, &mut lines);
        if *stage == "project" {
            match spec.name {
                "vivado-prj" => {
                    lines.push("create_project -force hbs ./prj".to_string());
                    if !c.device.is_empty() {
                        lines.push(format!("set_property part {} [current_project]", c.device));
                    }
                }
                _ => {
                    if let Ok(cmd) = interp.get_var(&format!("hbs::mock::{stage}")) {
                        if !cmd.is_empty() {
                            lines.push(cmd);
                        }
                    }
                }
            }
            for ev in &c.events {
                match ev {
                    ScriptEvent::File(idx) => file_lines(&c.files[*idx], &mut lines),
                    ScriptEvent::Raw(text) => lines.push(text.clone()),
                }
            }
            if !c.top.is_empty() {
                lines.push(format!("set_property top {} [current_fileset]", c.top));
            }
        } else {
            match (spec.name, *stage) {
                ("vivado-prj", "synthesis") => {
                    lines.push("launch_runs synth_1".to_string());
                    lines.push("wait_on_run synth_1".to_string());
                }
                ("vivado-prj", "implementation") => {
                    lines.push("launch_runs impl_1".to_string());
                    lines.push("wait_on_run impl_1".to_string());
                }
                ("vivado-prj", "bitstream") => {
                    lines.push("launch_runs impl_1 -to_step write_bitstream".to_string());
                    lines.push("wait_on_run impl_1".to_string());
                }
                _ => {
                    if let Ok(cmd) = interp.get_var(&format!("hbs::mock::{stage}")) {
                        if !cmd.is_empty() {
                            lines.push(cmd);
                        }
                    }
                }
            }
        }
        callback_lines(interp, stage, Phase::Post, &mut lines);
        if *stage == through {
            break;
        }
    }

    let mut script = lines.join("\n");
    script.push('\n');
    Ok(script)
}

/// Write the script to `<buildDir>/run.tcl` (print it in dry-run) and hand
/// it to an external program when `--tool-cmd` was given.
pub(crate) fn deliver(interp: &mut Interp, script: &str) -> EvalResult {
    if interp.dry_run {
        interp.write_out(script);
        return Ok(String::new());
    }
    let build_dir = ctx(interp).build_dir.clone();
    let path = build_dir.join("run.tcl");
    std::fs::write(&path, script).map_err(Error::from)?;
    if let Some(prog) = ctx(interp).tool_cmd.clone() {
        let argv = vec![prog.clone(), "run.tcl".to_string()];
        let code = crate::tclish::spawn_line(interp, &argv, Some(&build_dir))?;
        if code != 0 {
            bail!(Script, "tool command \"{prog}\" failed with exit status {code}");
        }
    }
    Ok(String::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backends::backend_for;
    use crate::flow::{run_target, RunOptions};
    use crate::new_interp;

    #[test]
    fn passthrough_preserves_order_and_bytes() {
        let dir = tempfile::tempdir().unwrap();
        for f in ["synchronizer.vhd", "vivado-constr.xdc"] {
            std::fs::write(dir.path().join(f), "").unwrap();
        }
        std::fs::write(
            dir.path().join("sync.hbs"),
            r#"namespace eval vendor::library::synchronizer {
  proc src {} {
    hbs::AddFile synchronizer.vhd

    if {$hbs::Tool == "vivado-prj"} {
      hbs::AddFile vivado-constr.xdc
      set_property SCOPED_TO_REF Synchronizer [get_files vivado-constr.xdc]
    } else {
      error "Synchronizer entity misses constraint file for $hbs::Tool"
    }
  }

  hbs::Register
}
namespace eval driver {
  proc script {} {
    hbs::SetTool "vivado-prj"
    hbs::AddDep vendor::library::synchronizer::src
    hbs::Run project
  }
  hbs::Register
}
"#,
        )
        .unwrap();
        let list = crate::registry::discover(dir.path()).unwrap();
        let mut interp = new_interp();
        crate::registry::source_all(&mut interp, &list).unwrap();
        run_target(
            &mut interp,
            "driver::script",
            &[],
            &RunOptions::new(dir.path(), dir.path()),
        )
        .unwrap();

        let script =
            std::fs::read_to_string(dir.path().join("build/driver/script/run.tcl")).unwrap();
        let lines: Vec<&str> = script.lines().collect();
        let read_idx = lines
            .iter()
            .position(|l| l.starts_with("read_xdc") && l.ends_with("vivado-constr.xdc"))
            .expect("read_xdc line present");
        assert_eq!(
            lines[read_idx + 1],
            "set_property SCOPED_TO_REF Synchronizer [get_files vivado-constr.xdc]"
        );

        let spec = backend_for("vivado-prj").unwrap();
        let again = emit(&interp, spec, "project").unwrap();
        let again2 = emit(&interp, spec, "project").unwrap();
        assert_eq!(again, again2);
    }

    #[test]
    fn empty_flow_emits_preamble_and_project_only() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(
            dir.path().join("c.hbs"),
            "namespace eval c {\n  proc t {} { hbs::SetTool vivado-prj; hbs::Run project }\n  hbs::Register\n}\n",
        )
        .unwrap();
        let list = crate::registry::discover(dir.path()).unwrap();
        let mut interp = new_interp();
        crate::registry::source_all(&mut interp, &list).unwrap();
        run_target(
            &mut interp,
            "c::t",
            &[],
            &RunOptions::new(dir.path(), dir.path()),
        )
        .unwrap();
        let script = std::fs::read_to_string(dir.path().join("build/c/t/run.tcl")).unwrap();
        assert!(script.contains("create_project"));
        assert!(script.contains("# stage: project"));
        assert!(!script.contains("launch_runs"));
    }

    #[test]
    fn stages_render_up_to_requested() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(
            dir.path().join("c.hbs"),
            "namespace eval c {\n  proc t {} { hbs::SetTool vivado-prj; hbs::SetDevice xc7a35t; hbs::SetTop Top; hbs::Run synthesis }\n  hbs::Register\n}\n",
        )
        .unwrap();
        let list = crate::registry::discover(dir.path()).unwrap();
        let mut interp = new_interp();
        crate::registry::source_all(&mut interp, &list).unwrap();
        run_target(
            &mut interp,
            "c::t",
            &[],
            &RunOptions::new(dir.path(), dir.path()),
        )
        .unwrap();
        let script = std::fs::read_to_string(dir.path().join("build/c/t/run.tcl")).unwrap();
        assert!(script.contains("set_property part xc7a35t [current_project]"));
        assert!(script.contains("set_property top Top [current_fileset]"));
        assert!(script.contains("launch_runs synth_1"));
        assert!(!script.contains("impl_1"));
    }
}
