//! Tool backends: the backend contract plus the shipped implementations.
//!
//! Two kinds exist. Direct-exec backends drive shell-interface tools by
//! spawning processes stage by stage (ghdl, mock-sim). Script-generating
//! backends collect the whole flow and emit a Tcl script for the tool to
//! run later (vivado-prj, mock-prj); while one is active, unknown commands
//! are captured verbatim into the script instead of failing.

pub mod ghdl;
pub mod mock;
pub mod scriptgen;

use crate::error::{err, Error, EvalResult};
use crate::flow::{self, Phase};
use crate::tclish::Interp;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackendKind {
    DirectExec,
    ScriptGen,
}

impl BackendKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            BackendKind::DirectExec => "direct-exec",
            BackendKind::ScriptGen => "script-gen",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BackendSpec {
    pub name: &'static str,
    pub kind: BackendKind,
    pub stages: &'static [&'static str],
    pub requires_top: bool,
}

impl BackendSpec {
    pub fn final_stage(&self) -> &'static str {
        self.stages.last().expect("stages non-empty")
    }

    /// Stage-callback builtin names for this backend, in stage order.
    pub fn callback_names(&self) -> Vec<String> {
        let mut out = Vec::new();
        for stage in self.stages {
            let short = short_for_stage(stage).expect("shipped stages have short names");
            out.push(format!("hbs::AddPre{short}Cb"));
            out.push(format!("hbs::AddPost{short}Cb"));
        }
        out
    }
}

pub const SIM_STAGES: &[&str] = &["analysis", "elaboration", "simulation"];
pub const PRJ_STAGES: &[&str] = &["project", "synthesis", "implementation", "bitstream"];

const BACKENDS: &[BackendSpec] = &[
    BackendSpec {
        name: "ghdl",
        kind: BackendKind::DirectExec,
        stages: SIM_STAGES,
        requires_top: true,
    },
    BackendSpec {
        name: "vivado-prj",
        kind: BackendKind::ScriptGen,
        stages: PRJ_STAGES,
        requires_top: false,
    },
    BackendSpec {
        name: "mock-sim",
        kind: BackendKind::DirectExec,
        stages: SIM_STAGES,
        requires_top: false,
    },
    BackendSpec {
        name: "mock-prj",
        kind: BackendKind::ScriptGen,
        stages: PRJ_STAGES,
        requires_top: false,
    },
];

pub fn all_backends() -> &'static [BackendSpec] {
    BACKENDS
}

pub fn backend_for(name: &str) -> Result<&'static BackendSpec, Error> {
    BACKENDS.iter().find(|b| b.name == name).ok_or_else(|| {
        let known: Vec<&str> = BACKENDS.iter().map(|b| b.name).collect();
        err!(
            UnknownTool,
            "unknown tool \"{name}\": known tools are {}",
            known.join(", ")
        )
    })
}

/// (stage name, short name used in callback builtins)
const STAGE_SHORTS: &[(&str, &str)] = &[
    ("project", "Prj"),
    ("synthesis", "Synth"),
    ("implementation", "Impl"),
    ("bitstream", "Bit"),
    ("analysis", "Analysis"),
    ("elaboration", "Elab"),
    ("simulation", "Sim"),
];

pub const STAGE_SHORT_NAMES: [&str; 7] =
    ["Prj", "Synth", "Impl", "Bit", "Analysis", "Elab", "Sim"];

pub fn stage_for_short(short: &str) -> Option<&'static str> {
    STAGE_SHORTS
        .iter()
        .find(|(_, s)| *s == short)
        .map(|(stage, _)| *stage)
}

pub fn short_for_stage(stage: &str) -> Option<&'static str> {
    STAGE_SHORTS
        .iter()
        .find(|(s, _)| *s == stage)
        .map(|(_, short)| *short)
}

/// True if any backend defines this stage name.
pub fn known_stage(stage: &str) -> bool {
    STAGE_SHORTS.iter().any(|(s, _)| *s == stage)
}

/// Run the flow for `spec` through `through` (inclusive): pre-callbacks,
/// stage body, post-callbacks per stage for direct-exec backends; a single
/// script emission for script-gen backends.
pub(crate) fn execute_flow(
    interp: &mut Interp,
    spec: &BackendSpec,
    through: &str,
) -> EvalResult {
    match spec.kind {
        BackendKind::DirectExec => {
            for stage in spec.stages {
                flow::run_callbacks(interp, stage, Phase::Pre)?;
                match spec.name {
                    "ghdl" => ghdl::run_stage(interp, stage)?,
                    "mock-sim" => mock::run_stage(interp, stage)?,
                    other => unreachable!("no direct-exec backend named {other}"),
                };
                flow::run_callbacks(interp, stage, Phase::Post)?;
                if *stage == through {
                    break;
                }
            }
            Ok(String::new())
        }
        BackendKind::ScriptGen => {
            let script = scriptgen::emit(interp, spec, through)?;
            scriptgen::deliver(interp, &script)?;
            Ok(String::new())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::ErrorKind;

    #[test]
    fn backend_lookup() {
        let g = backend_for("ghdl").unwrap();
        assert_eq!(g.kind, BackendKind::DirectExec);
        assert_eq!(g.stages, &["analysis", "elaboration", "simulation"]);

        let v = backend_for("vivado-prj").unwrap();
        assert_eq!(v.kind, BackendKind::ScriptGen);
        assert_eq!(
            v.stages,
            &["project", "synthesis", "implementation", "bitstream"]
        );
        assert_eq!(v.final_stage(), "bitstream");

        let e = backend_for("notool").unwrap_err();
        assert_eq!(e.kind, ErrorKind::UnknownTool);
    }

    #[test]
    fn stage_short_names_round_trip() {
        for (stage, short) in STAGE_SHORTS {
            assert_eq!(stage_for_short(short), Some(*stage));
            assert_eq!(short_for_stage(stage), Some(*short));
        }
        assert!(known_stage("synthesis"));
        assert!(!known_stage("nostage"));
    }

    #[test]
    fn callback_names_follow_convention() {
        let v = backend_for("vivado-prj").unwrap();
        assert!(v
            .callback_names()
            .contains(&"hbs::AddPostSynthCb".to_string()));
        let g = backend_for("ghdl").unwrap();
        assert!(g.callback_names().contains(&"hbs::AddPreSimCb".to_string()));
    }
}
