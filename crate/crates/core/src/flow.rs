//! Target execution: per-run context, the `hbs::*` state API, the
//! argument-memoized dependency engine with graph capture, and dry-run
//! semantics.

use std::collections::{HashMap, HashSet};
use std::path::{Path, PathBuf};

use crate::backends::{self, BackendKind};
use crate::error::{bail, err, Error, EvalResult, Exception};
use crate::graph::{DepGraph, NodeId};
use crate::registry;
use crate::tclish::{parse, Interp, WordVal};

/// Exit-severity levels a testbench may stop on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Note,
    Warning,
    Error,
    Failure,
}

impl Severity {
    pub fn as_str(&self) -> &'static str {
        match self {
            Severity::Note => "note",
            Severity::Warning => "warning",
            Severity::Error => "error",
            Severity::Failure => "failure",
        }
    }

    fn parse(s: &str) -> Result<Self, Error> {
        match s {
            "note" => Ok(Severity::Note),
            "warning" => Ok(Severity::Warning),
            "error" => Ok(Severity::Error),
            "failure" => Ok(Severity::Failure),
            _ => Err(err!(
                InvalidSeverity,
                "invalid severity \"{s}\": must be note, warning, error or failure"
            )),
        }
    }
}

/// File classification by extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileKind {
    Vhdl,
    Verilog,
    SystemVerilog,
    ConstraintXdc,
    ConstraintSdc,
    Tcl,
    Other,
}

impl FileKind {
    pub fn from_path(path: &Path) -> Self {
        let ext = path
            .extension()
            .map(|e| e.to_string_lossy().to_ascii_lowercase())
            .unwrap_or_default();
        match ext.as_str() {
            "vhd" | "vhdl" => FileKind::Vhdl,
            "v" => FileKind::Verilog,
            "sv" | "svh" => FileKind::SystemVerilog,
            "xdc" => FileKind::ConstraintXdc,
            "sdc" => FileKind::ConstraintSdc,
            "tcl" => FileKind::Tcl,
            _ => FileKind::Other,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FileEntry {
    /// Absolute resolved path.
    pub path: PathBuf,
    pub kind: FileKind,
    /// Library at addition time; empty means the default library.
    pub lib: String,
    /// HDL standard token at addition time; empty means backend default.
    pub std: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    Pre,
    Post,
}

impl Phase {
    pub fn as_str(&self) -> &'static str {
        match self {
            Phase::Pre => "pre",
            Phase::Post => "post",
        }
    }
}

#[derive(Debug, Clone)]
pub struct CallbackSpec {
    pub name: String,
    pub argv: Vec<String>,
}

/// Order-preserving record of file additions and unknown-command
/// passthroughs, consumed by script-generating backends.
#[derive(Debug, Clone)]
pub enum ScriptEvent {
    /// Index into [`RunContext::files`].
    File(usize),
    /// Verbatim command text.
    Raw(String),
}

/// Mutable state of one flow.
#[derive(Debug, Default)]
pub struct RunContext {
    pub tool: Option<String>,
    pub top: String,
    pub device: String,
    pub lib: String,
    pub std_rev: String,
    pub files: Vec<FileEntry>,
    pub generics: Vec<(String, String)>,
    pub arg_prefix: String,
    pub arg_suffix: String,
    pub exit_severity: Option<Severity>,
    pub callbacks: HashMap<(String, Phase), Vec<CallbackSpec>>,
    pub build_dir: PathBuf,
    pub memo: HashSet<(String, Vec<String>)>,
    pub graph: DepGraph,
    /// Active AddDep call chain, innermost last. Used for cycle detection
    /// and for tracking the innermost executing target.
    pub active: Vec<NodeId>,
    pub dry_run: bool,
    pub this_core: String,
    pub this_target: String,
    pub events: Vec<ScriptEvent>,
    pub run_invoked: bool,
    /// Root the `.hbs` tree was discovered under; AddFile paths resolve
    /// against it.
    pub discovery_root: PathBuf,
    /// Program to hand the emitted script to, when explicitly requested.
    pub tool_cmd: Option<String>,
}

impl RunContext {
    /// Raw unknown-command texts in record order.
    pub fn unknown_log(&self) -> Vec<&str> {
        self.events
            .iter()
            .filter_map(|e| match e {
                ScriptEvent::Raw(s) => Some(s.as_str()),
                ScriptEvent::File(_) => None,
            })
            .collect()
    }
}

/// Options for one `run`/`dry-run`/`graph`/`test` flow.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub dry_run: bool,
    /// Directory `build/` is created under (normally the working dir).
    pub build_root: PathBuf,
    /// Absolute discovery root.
    pub discovery_root: PathBuf,
    pub tool_cmd: Option<String>,
}

impl RunOptions {
    pub fn new(build_root: impl Into<PathBuf>, discovery_root: impl Into<PathBuf>) -> Self {
        RunOptions {
            dry_run: false,
            build_root: build_root.into(),
            discovery_root: discovery_root.into(),
            tool_cmd: None,
        }
    }

    pub fn dry(mut self) -> Self {
        self.dry_run = true;
        self
    }
}

/// Error split the CLI maps onto exit codes: usage errors exit 2, DSL and
/// stage errors exit 1.
#[derive(Debug)]
pub enum FlowError {
    Usage(Error),
    Dsl(Error),
}

impl std::fmt::Display for FlowError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FlowError::Usage(e) | FlowError::Dsl(e) => write!(f, "{e}"),
        }
    }
}

pub(crate) fn ctx(interp: &Interp) -> &RunContext {
    interp.context::<RunContext>().expect("flow installed")
}

pub(crate) fn ctx_mut(interp: &mut Interp) -> &mut RunContext {
    interp.context_mut::<RunContext>().expect("flow installed")
}

/// Install the `hbs::*` command surface and flow state into an interpreter.
pub fn install(interp: &mut Interp) {
    interp.ensure_namespace("hbs");
    interp.ensure_namespace("hbs::mock");
    for var in [
        "Tool",
        "Top",
        "Device",
        "ThisCorePath",
        "ThisCore",
        "ThisTargetPath",
        "ArgPrefix",
        "ArgSuffix",
        "RunTargetBuildDir",
    ] {
        interp.set_var(&format!("hbs::{var}"), "").expect("hbs ns exists");
    }
    interp.set_context(registry::Registry::default());
    interp.set_context(RunContext::default());

    let table: &[(&str, crate::tclish::BuiltinFn)] = &[
        ("hbs::Register", registry::cmd_register),
        ("hbs::AddDep", cmd_add_dep),
        ("hbs::AddFile", cmd_add_file),
        ("hbs::SetTool", cmd_set_tool),
        ("hbs::SetTop", cmd_set_top),
        ("hbs::SetDevice", cmd_set_device),
        ("hbs::SetLib", cmd_set_lib),
        ("hbs::SetStd", cmd_set_std),
        ("hbs::SetGeneric", cmd_set_generic),
        ("hbs::SetArgPrefix", cmd_set_arg_prefix),
        ("hbs::SetArgSuffix", cmd_set_arg_suffix),
        ("hbs::SetExitSeverity", cmd_set_exit_severity),
        ("hbs::Run", cmd_run),
        ("hbs::Exec", cmd_exec),
        ("hbs::panic", cmd_panic),
        ("hbs::AddPreCb", cmd_add_generic_cb),
        ("hbs::AddPostCb", cmd_add_generic_cb),
    ];
    for (name, f) in table {
        interp.register_builtin(name, *f).expect("hbs builtins once");
    }
    for short in backends::STAGE_SHORT_NAMES {
        for phase in ["Pre", "Post"] {
            let name = format!("hbs::Add{phase}{short}Cb");
            interp
                .register_builtin(&name, cmd_add_stage_cb)
                .expect("stage callback builtins once");
        }
    }
}

fn set_hbs_var(interp: &mut Interp, name: &str, value: &str) {
    interp
        .set_var(&format!("hbs::{name}"), value)
        .expect("hbs namespace exists");
}

/// FNV-1a over the argv list, for stable build-dir suffixes.
fn argv_hash(argv: &[String]) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for a in argv {
        for b in a.bytes().chain(std::iter::once(0x1f)) {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    format!("{h:016x}")
}

fn build_dir_for(build_root: &Path, target_path: &str, argv: &[String]) -> PathBuf {
    let mut dir = build_root.join("build");
    for seg in target_path.split("::") {
        dir.push(seg);
    }
    if !argv.is_empty() {
        dir.push(argv_hash(argv));
    }
    dir
}

/// Run a registered target in a fresh flow context. Status mapping is the
/// caller's job: `Usage` errors exit 2, `Dsl` errors exit 1.
pub fn run_target(
    interp: &mut Interp,
    target_path: &str,
    argv: &[String],
    opts: &RunOptions,
) -> Result<(), FlowError> {
    let def = registry::resolve_target(interp, target_path).map_err(FlowError::Usage)?;
    let core_path = def.namespace().to_string();

    interp.dry_run = opts.dry_run;
    interp.set_unknown_handler(None);

    let build_dir = build_dir_for(&opts.build_root, target_path, argv);
    if !opts.dry_run {
        std::fs::create_dir_all(&build_dir)
            .map_err(|e| FlowError::Dsl(err!(Io, "cannot create {}: {e}", build_dir.display())))?;
    }

    let mut ctx = RunContext {
        dry_run: opts.dry_run,
        build_dir: build_dir.clone(),
        discovery_root: opts.discovery_root.clone(),
        tool_cmd: opts.tool_cmd.clone(),
        this_core: core_path.clone(),
        this_target: target_path.to_string(),
        ..RunContext::default()
    };
    let root = ctx.graph.add_node(target_path, argv);
    ctx.graph.set_root(root);
    ctx.memo.insert((target_path.to_string(), argv.to_vec()));
    ctx.active.push(root);
    interp.set_context(ctx);

    for var in ["Tool", "Top", "Device", "ArgPrefix", "ArgSuffix"] {
        set_hbs_var(interp, var, "");
    }
    set_hbs_var(interp, "ThisCorePath", &core_path);
    set_hbs_var(interp, "ThisCore", &core_path);
    set_hbs_var(interp, "ThisTargetPath", target_path);
    set_hbs_var(interp, "RunTargetBuildDir", &build_dir.display().to_string());

    match interp.call_proc(target_path, argv) {
        Ok(_) | Err(Exception::Return(_)) => Ok(()),
        Err(Exception::Error(e)) => Err(FlowError::Dsl(e)),
    }
}

/// Execute the flow in dry-run mode and return the captured dependency
/// graph. No external commands run and nothing is written.
pub fn capture_graph(
    interp: &mut Interp,
    target_path: &str,
    argv: &[String],
    opts: &RunOptions,
) -> Result<DepGraph, FlowError> {
    let opts = opts.clone().dry();
    run_target(interp, target_path, argv, &opts)?;
    Ok(ctx(interp).graph.clone())
}

// ---- hbs::AddDep -------------------------------------------------------------

fn cmd_add_dep(interp: &mut Interp, words: &[WordVal]) -> EvalResult {
    if words.len() < 2 {
        bail!(Arity, "wrong # args: should be \"hbs::AddDep path ?args...?\"");
    }
    let dep_path = words[1].text.clone();
    let argv: Vec<String> = words[2..].iter().map(|w| w.text.clone()).collect();

    let def = registry::resolve_target(interp, &dep_path).map_err(Exception::Error)?;
    let dep_core = def.namespace().to_string();

    let run_needed = {
        let c = ctx_mut(interp);
        let Some(&current) = c.active.last() else {
            bail!(
                UnknownTarget,
                "hbs::AddDep called outside of a running target"
            );
        };
        let dep_id = c.graph.add_node(&dep_path, &argv);
        c.graph.add_edge(current, dep_id);
        if c.active.contains(&dep_id) {
            let start = c.active.iter().position(|&n| n == dep_id).unwrap();
            let mut chain: Vec<String> = c.active[start..]
                .iter()
                .map(|&n| c.graph.node(n).label())
                .collect();
            chain.push(c.graph.node(dep_id).label());
            bail!(DependencyCycle, "dependency cycle: {}", chain.join(" -> "));
        }
        let key = (dep_path.clone(), argv.clone());
        if c.memo.contains(&key) {
            false
        } else {
            c.memo.insert(key);
            c.active.push(dep_id);
            true
        }
    };

    if !run_needed {
        return Ok(String::new());
    }

    let (prev_core, prev_target) = {
        let c = ctx_mut(interp);
        let prev = (c.this_core.clone(), c.this_target.clone());
        c.this_core = dep_core.clone();
        c.this_target = dep_path.clone();
        prev
    };
    set_hbs_var(interp, "ThisCorePath", &dep_core);
    set_hbs_var(interp, "ThisCore", &dep_core);
    set_hbs_var(interp, "ThisTargetPath", &dep_path);

    let result = interp.call_proc(&dep_path, &argv);

    {
        let c = ctx_mut(interp);
        c.active.pop();
        c.this_core = prev_core.clone();
        c.this_target = prev_target.clone();
    }
    set_hbs_var(interp, "ThisCorePath", &prev_core);
    set_hbs_var(interp, "ThisCore", &prev_core);
    set_hbs_var(interp, "ThisTargetPath", &prev_target);

    result?;
    Ok(String::new())
}

// ---- hbs::AddFile -------------------------------------------------------------

/// Remove `.` and `..` components without touching the filesystem, so
/// dry runs can resolve paths for files that do not exist yet.
fn normalize(path: &Path) -> PathBuf {
    let mut out = PathBuf::new();
    for comp in path.components() {
        match comp {
            std::path::Component::CurDir => {}
            std::path::Component::ParentDir => {
                if !out.pop() {
                    out.push("..");
                }
            }
            other => out.push(other.as_os_str()),
        }
    }
    out
}

fn cmd_add_file(interp: &mut Interp, words: &[WordVal]) -> EvalResult {
    if words.len() < 2 {
        bail!(Arity, "wrong # args: should be \"hbs::AddFile path ?path ...?\"");
    }
    let base_dir = {
        let rel = interp.effective_file().map(Path::to_path_buf);
        let c = ctx(interp);
        match rel {
            Some(f) => {
                let full = c.discovery_root.join(&f);
                full.parent().map(Path::to_path_buf).unwrap_or_else(|| {
                    c.discovery_root.clone()
                })
            }
            None => c.discovery_root.clone(),
        }
    };
    for w in &words[1..] {
        let given = Path::new(&w.text);
        let resolved = if given.is_absolute() {
            normalize(given)
        } else {
            normalize(&base_dir.join(given))
        };
        let dry = ctx(interp).dry_run;
        if !dry && !resolved.exists() {
            bail!(Io, "file not found: {}", resolved.display());
        }
        let kind = FileKind::from_path(&resolved);
        let c = ctx_mut(interp);
        if c.files
            .iter()
            .any(|f| f.path == resolved && f.lib == c.lib)
        {
            log::debug!("ignoring duplicate file {}", resolved.display());
            continue;
        }
        c.files.push(FileEntry {
            path: resolved,
            kind,
            lib: c.lib.clone(),
            std: c.std_rev.clone(),
        });
        let idx = c.files.len() - 1;
        c.events.push(ScriptEvent::File(idx));
    }
    Ok(String::new())
}

// ---- state setters --------------------------------------------------------------

fn one_arg<'a>(words: &'a [WordVal], usage: &str) -> Result<&'a str, Exception> {
    if words.len() != 2 {
        return Err(err!(Arity, "wrong # args: should be \"{usage}\"").into());
    }
    Ok(&words[1].text)
}

fn cmd_set_tool(interp: &mut Interp, words: &[WordVal]) -> EvalResult {
    let name = one_arg(words, "hbs::SetTool tool")?.to_string();
    let spec = backends::backend_for(&name).map_err(Exception::Error)?;
    {
        let c = ctx_mut(interp);
        match &c.tool {
            Some(t) if *t == name => return Ok(String::new()),
            Some(t) => bail!(
                ToolAlreadySet,
                "tool already set to \"{t}\": cannot switch to \"{name}\""
            ),
            None => {}
        }
        if !c.files.is_empty() || c.run_invoked {
            bail!(
                ToolAlreadySet,
                "hbs::SetTool must be called before any file addition or hbs::Run"
            );
        }
        c.tool = Some(name.clone());
    }
    set_hbs_var(interp, "Tool", &name);
    match spec.kind {
        BackendKind::ScriptGen => {
            interp.set_unknown_handler(Some(backends::scriptgen::record_unknown))
        }
        BackendKind::DirectExec => interp.set_unknown_handler(None),
    }
    Ok(String::new())
}

fn cmd_set_top(interp: &mut Interp, words: &[WordVal]) -> EvalResult {
    let top = one_arg(words, "hbs::SetTop top")?.to_string();
    ctx_mut(interp).top = top.clone();
    set_hbs_var(interp, "Top", &top);
    Ok(String::new())
}

fn cmd_set_device(interp: &mut Interp, words: &[WordVal]) -> EvalResult {
    let device = one_arg(words, "hbs::SetDevice device")?.to_string();
    ctx_mut(interp).device = device.clone();
    set_hbs_var(interp, "Device", &device);
    Ok(String::new())
}

fn cmd_set_lib(interp: &mut Interp, words: &[WordVal]) -> EvalResult {
    let lib = one_arg(words, "hbs::SetLib lib")?.to_string();
    ctx_mut(interp).lib = lib;
    Ok(String::new())
}

fn cmd_set_std(interp: &mut Interp, words: &[WordVal]) -> EvalResult {
    let std_rev = one_arg(words, "hbs::SetStd std")?;
    let token = match std_rev {
        "1993" | "93" => "93",
        "2008" | "08" => "08",
        "2019" | "19" => "19",
        other => bail!(
            Script,
            "invalid HDL standard \"{other}\": must be 1993, 2008 or 2019"
        ),
    };
    ctx_mut(interp).std_rev = token.to_string();
    Ok(String::new())
}

fn cmd_set_generic(interp: &mut Interp, words: &[WordVal]) -> EvalResult {
    if words.len() != 3 {
        bail!(Arity, "wrong # args: should be \"hbs::SetGeneric name value\"");
    }
    let (name, value) = (words[1].text.clone(), words[2].text.clone());
    let c = ctx_mut(interp);
    if let Some(slot) = c.generics.iter_mut().find(|(n, _)| *n == name) {
        slot.1 = value;
    } else {
        c.generics.push((name, value));
    }
    Ok(String::new())
}

fn cmd_set_arg_prefix(interp: &mut Interp, words: &[WordVal]) -> EvalResult {
    let v = one_arg(words, "hbs::SetArgPrefix prefix")?.to_string();
    ctx_mut(interp).arg_prefix = v.clone();
    set_hbs_var(interp, "ArgPrefix", &v);
    Ok(String::new())
}

fn cmd_set_arg_suffix(interp: &mut Interp, words: &[WordVal]) -> EvalResult {
    let v = one_arg(words, "hbs::SetArgSuffix suffix")?.to_string();
    ctx_mut(interp).arg_suffix = v.clone();
    set_hbs_var(interp, "ArgSuffix", &v);
    Ok(String::new())
}

fn cmd_set_exit_severity(interp: &mut Interp, words: &[WordVal]) -> EvalResult {
    let v = one_arg(words, "hbs::SetExitSeverity severity")?;
    let sev = Severity::parse(v).map_err(Exception::Error)?;
    ctx_mut(interp).exit_severity = Some(sev);
    Ok(String::new())
}

// ---- callbacks ---------------------------------------------------------------

fn add_callback(
    interp: &mut Interp,
    stage: &str,
    phase: Phase,
    name: &str,
    argv: Vec<String>,
) -> EvalResult {
    let valid = match &ctx(interp).tool {
        Some(tool) => {
            let spec = backends::backend_for(tool).map_err(Exception::Error)?;
            spec.stages.contains(&stage)
        }
        // No tool yet: accept anything some backend defines; the active
        // backend simply never fires callbacks for foreign stages.
        None => backends::known_stage(stage),
    };
    if !valid {
        let tool = ctx(interp).tool.clone().unwrap_or_else(|| "<unset>".into());
        bail!(UnknownStage, "unknown stage \"{stage}\" for tool \"{tool}\"");
    }
    ctx_mut(interp)
        .callbacks
        .entry((stage.to_string(), phase))
        .or_default()
        .push(CallbackSpec {
            name: name.to_string(),
            argv,
        });
    Ok(String::new())
}

/// `hbs::AddPreCb stage proc ?args...?` / `hbs::AddPostCb stage proc ?args...?`
fn cmd_add_generic_cb(interp: &mut Interp, words: &[WordVal]) -> EvalResult {
    if words.len() < 3 {
        bail!(
            Arity,
            "wrong # args: should be \"{} stage proc ?args...?\"",
            words[0].text
        );
    }
    let phase = if words[0].text.contains("Pre") {
        Phase::Pre
    } else {
        Phase::Post
    };
    let argv = words[3..].iter().map(|w| w.text.clone()).collect();
    add_callback(interp, &words[1].text.clone(), phase, &words[2].text.clone(), argv)
}

/// `hbs::AddPre<Stage>Cb proc ?args...?` and the Post variant; the stage is
/// encoded in the command name.
fn cmd_add_stage_cb(interp: &mut Interp, words: &[WordVal]) -> EvalResult {
    let cmd = words[0].text.clone();
    let short = cmd
        .strip_prefix("hbs::AddPre")
        .or_else(|| cmd.strip_prefix("hbs::AddPost"))
        .and_then(|s| s.strip_suffix("Cb"))
        .expect("registered under hbs::Add{Pre,Post}<Stage>Cb");
    let phase = if cmd.starts_with("hbs::AddPre") {
        Phase::Pre
    } else {
        Phase::Post
    };
    let stage = backends::stage_for_short(short).expect("registered stages only");
    if words.len() < 2 {
        bail!(Arity, "wrong # args: should be \"{cmd} proc ?args...?\"");
    }
    let argv = words[2..].iter().map(|w| w.text.clone()).collect();
    add_callback(interp, stage, phase, &words[1].text.clone(), argv)
}

/// Invoke the stored callbacks for (stage, phase), in registration order.
pub(crate) fn run_callbacks(interp: &mut Interp, stage: &str, phase: Phase) -> EvalResult {
    let cbs = ctx(interp)
        .callbacks
        .get(&(stage.to_string(), phase))
        .cloned()
        .unwrap_or_default();
    for cb in cbs {
        backends::mock::trace_callback(interp, stage, phase, &cb)?;
        let mut words = Vec::with_capacity(cb.argv.len() + 1);
        words.push(cb.name.clone());
        words.extend(cb.argv.iter().cloned());
        interp.invoke_words(&words)?;
    }
    Ok(String::new())
}

// ---- hbs::Run / hbs::Exec / hbs::panic ------------------------------------------

fn cmd_run(interp: &mut Interp, words: &[WordVal]) -> EvalResult {
    if words.len() > 2 {
        bail!(Arity, "wrong # args: should be \"hbs::Run ?stage?\"");
    }
    let tool = match &ctx(interp).tool {
        Some(t) => t.clone(),
        None => bail!(ToolNotSet, "no tool set: call hbs::SetTool before hbs::Run"),
    };
    let spec = backends::backend_for(&tool).map_err(Exception::Error)?;
    let through = match words.get(1) {
        Some(w) => {
            let stage = w.text.as_str();
            if !spec.stages.contains(&stage) {
                bail!(
                    UnknownStage,
                    "unknown stage \"{stage}\" for tool \"{tool}\": valid stages are {}",
                    spec.stages.join(", ")
                );
            }
            stage.to_string()
        }
        None => spec.final_stage().to_string(),
    };
    ctx_mut(interp).run_invoked = true;
    backends::execute_flow(interp, &spec, &through)?;
    Ok(String::new())
}

/// `hbs::Exec commandLine`: wrapper around exec that prints the command in
/// dry-run mode and returns the child's exit code instead of erroring.
fn cmd_exec(interp: &mut Interp, words: &[WordVal]) -> EvalResult {
    if words.len() != 2 {
        bail!(Arity, "wrong # args: should be \"hbs::Exec commandLine\"");
    }
    let line = words[1].text.clone();
    if line.trim().is_empty() {
        bail!(Script, "hbs::Exec: empty command line");
    }
    exec_line(interp, &line, None)
}

/// Shared by hbs::Exec and the direct-exec backend stages.
pub(crate) fn exec_line(interp: &mut Interp, line: &str, cwd: Option<&Path>) -> EvalResult {
    if interp.dry_run {
        interp.writeln_out(line);
        return Ok("0".to_string());
    }
    let argv = parse::parse_list(line).map_err(Exception::Error)?;
    if argv.is_empty() {
        bail!(Script, "hbs::Exec: empty command line");
    }
    let out = crate::tclish::spawn_line(interp, &argv, cwd)?;
    Ok(out.to_string())
}

fn cmd_panic(interp: &mut Interp, words: &[WordVal]) -> EvalResult {
    let msg = words
        .get(1)
        .map(|w| w.text.clone())
        .unwrap_or_else(|| "hbs::panic".to_string());
    let _ = interp;
    bail!(Script, "{msg}");
}
