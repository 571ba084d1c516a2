//! Interpreter for the Tcl-subset DSL that `.hbs` files are written in.
//!
//! One [`Interp`] owns everything a running build description touches:
//! the namespace tree with its variables, proc definitions, the builtin
//! command registry, an optional unknown-command hook, an output sink and
//! a typed context cache where the registry and flow state live. An
//! `Interp` is confined to one thread of execution but may be moved
//! between threads before use; independent interps run in parallel.

pub mod builtins;
pub mod expr;
pub mod parse;
pub(crate) mod spawn;

use std::any::{Any, TypeId};
use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::error::{bail, err, Error, ErrorKind, EvalResult, Exception};

pub use parse::{parse_script, Part, ScriptNode, Word};

// Deep enough for any real build description, shallow enough to diagnose
// runaway recursion before the host stack runs out.
const MAX_NESTING: u32 = 200;

/// A substituted command word handed to builtins and the unknown handler.
#[derive(Debug, Clone)]
pub struct WordVal {
    pub text: String,
    /// Line the word's braced content starts on, when the word was a pure
    /// braced block. Used to keep line numbers absolute when bodies are
    /// re-parsed.
    pub brace_line: Option<u32>,
}

impl WordVal {
    pub fn as_str(&self) -> &str {
        &self.text
    }
}

/// Native command implementation.
pub type BuiltinFn = fn(&mut Interp, &[WordVal]) -> EvalResult;

/// Hook consulted when no proc or builtin matches a command name. Receives
/// the unsubstituted parse node: command substitutions inside an unknown
/// command are deferred build code and must not be evaluated here, so the
/// hook renders the node itself (substituting variables only).
pub type UnknownFn = fn(&mut Interp, &ScriptNode) -> EvalResult;

/// A procedure defined with `proc`.
#[derive(Debug, Clone)]
pub struct ProcDef {
    pub fq_name: String,
    pub params: Vec<Param>,
    pub has_rest: bool,
    pub body: String,
    pub body_line: u32,
    /// File the proc was defined in; relative paths in `hbs::AddFile`
    /// resolve against this file's directory.
    pub file: Option<PathBuf>,
    /// Contiguous `#` comment block right above the definition.
    pub doc: String,
}

impl ProcDef {
    /// Namespace the proc was defined in (everything before the last `::`).
    pub fn namespace(&self) -> &str {
        match self.fq_name.rfind("::") {
            Some(idx) => &self.fq_name[..idx],
            None => "",
        }
    }

    /// Bare name without the namespace path.
    pub fn short_name(&self) -> &str {
        match self.fq_name.rfind("::") {
            Some(idx) => &self.fq_name[idx + 2..],
            None => &self.fq_name,
        }
    }

    /// Tcl-style parameter summary, e.g. `a ?b? ?arg ...?`.
    pub fn param_summary(&self) -> String {
        let mut parts: Vec<String> = self
            .params
            .iter()
            .map(|p| {
                if p.default.is_some() {
                    format!("?{}?", p.name)
                } else {
                    p.name.clone()
                }
            })
            .collect();
        if self.has_rest {
            parts.push("?arg ...?".to_string());
        }
        parts.join(" ")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub name: String,
    pub default: Option<String>,
}

/// Where `puts`, dry-run command echoes and child process output go.
pub enum OutputSink {
    /// Parent process stdout.
    Inherit,
    /// Parent process stderr (keeps stdout clean for payloads like DOT).
    Stderr,
    /// A file, e.g. a per-testbench log.
    File(std::fs::File),
    /// In-memory capture for tests.
    Buffer(BufSink),
}

/// Shared in-memory output buffer.
#[derive(Debug, Clone, Default)]
pub struct BufSink(Arc<std::sync::Mutex<Vec<u8>>>);

impl BufSink {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn contents(&self) -> String {
        String::from_utf8_lossy(&self.0.lock().unwrap()).into_owned()
    }

    pub(crate) fn append(&self, bytes: &[u8]) {
        self.0.lock().unwrap().extend_from_slice(bytes);
    }
}

impl OutputSink {
    pub fn write_str(&mut self, s: &str) {
        use std::io::Write;
        match self {
            OutputSink::Inherit => {
                let mut out = std::io::stdout().lock();
                let _ = out.write_all(s.as_bytes());
                let _ = out.flush();
            }
            OutputSink::Stderr => {
                let mut out = std::io::stderr().lock();
                let _ = out.write_all(s.as_bytes());
            }
            OutputSink::File(f) => {
                let _ = f.write_all(s.as_bytes());
            }
            OutputSink::Buffer(b) => b.append(s.as_bytes()),
        }
    }
}

struct NsFrame {
    path: String,
    doc: String,
}

struct Frame {
    locals: HashMap<String, String>,
    ns: String,
    file: Option<PathBuf>,
}

/// The interpreter. See the module docs.
pub struct Interp {
    namespaces: HashMap<String, HashMap<String, String>>,
    ns_stack: Vec<NsFrame>,
    frames: Vec<Frame>,
    procs: HashMap<String, Arc<ProcDef>>,
    builtins: HashMap<String, BuiltinFn>,
    unknown: Option<UnknownFn>,
    context: HashMap<TypeId, Box<dyn Any + Send>>,
    out: OutputSink,
    /// Suppress external effects: exec and hbs::Exec print instead of
    /// spawning, file existence checks are deferred.
    pub dry_run: bool,
    current_file: Option<PathBuf>,
    current_source: Option<Arc<str>>,
    pub(crate) current_line: u32,
    depth: u32,
}

impl Default for Interp {
    fn default() -> Self {
        Self::new()
    }
}

impl Interp {
    /// Interpreter with the frozen builtin command set installed.
    pub fn new() -> Self {
        let mut interp = Interp {
            namespaces: HashMap::from([(String::new(), HashMap::new())]),
            ns_stack: Vec::new(),
            frames: Vec::new(),
            procs: HashMap::new(),
            builtins: HashMap::new(),
            unknown: None,
            context: HashMap::new(),
            out: OutputSink::Inherit,
            dry_run: false,
            current_file: None,
            current_source: None,
            current_line: 1,
            depth: 0,
        };
        builtins::install(&mut interp);
        interp
    }

    // ---- builtin registry ------------------------------------------------

    /// Register a native command. Fails on name collision.
    pub fn register_builtin(&mut self, name: &str, f: BuiltinFn) -> Result<(), Error> {
        if self.builtins.contains_key(name) {
            return Err(err!(DuplicateBuiltin, "builtin \"{name}\" already registered"));
        }
        self.builtins.insert(name.to_string(), f);
        Ok(())
    }

    pub fn set_unknown_handler(&mut self, f: Option<UnknownFn>) {
        self.unknown = f;
    }

    // ---- typed context cache ---------------------------------------------

    pub fn set_context<T: Any + Send>(&mut self, value: T) {
        self.context.insert(TypeId::of::<T>(), Box::new(value));
    }

    pub fn context<T: Any + Send>(&self) -> Option<&T> {
        self.context
            .get(&TypeId::of::<T>())
            .and_then(|b| b.downcast_ref())
    }

    pub fn context_mut<T: Any + Send>(&mut self) -> Option<&mut T> {
        self.context
            .get_mut(&TypeId::of::<T>())
            .and_then(|b| b.downcast_mut())
    }

    // ---- output ------------------------------------------------------------

    pub fn set_output(&mut self, sink: OutputSink) {
        self.out = sink;
    }

    pub fn output(&self) -> &OutputSink {
        &self.out
    }

    pub fn write_out(&mut self, s: &str) {
        self.out.write_str(s);
    }

    pub fn writeln_out(&mut self, s: &str) {
        self.out.write_str(s);
        self.out.write_str("\n");
    }

    // ---- file / source tracking -------------------------------------------

    /// Install the file currently being sourced, for doc harvesting,
    /// relative path resolution and error context.
    pub fn set_source_context(&mut self, file: Option<PathBuf>, source: Option<Arc<str>>) {
        self.current_file = file;
        self.current_source = source;
    }

    pub fn current_file(&self) -> Option<&Path> {
        self.current_file.as_deref()
    }

    /// File of the innermost executing proc, falling back to the file being
    /// sourced. This is the base for `hbs::AddFile` relative paths.
    pub fn effective_file(&self) -> Option<&Path> {
        self.frames
            .iter()
            .rev()
            .find_map(|f| f.file.as_deref())
            .or(self.current_file.as_deref())
    }

    /// Contiguous `#` comment block immediately above `line` (1-based) in
    /// the current source, leading `# ` stripped.
    pub fn doc_comment_above(&self, line: u32) -> String {
        let Some(src) = &self.current_source else {
            return String::new();
        };
        let lines: Vec<&str> = src.lines().collect();
        let mut idx = line as usize;
        if idx < 2 || idx > lines.len() + 1 {
            return String::new();
        }
        idx -= 2; // index of the line above `line`
        let mut collected = Vec::new();
        loop {
            let t = lines[idx].trim_start();
            if let Some(rest) = t.strip_prefix('#') {
                collected.push(rest.strip_prefix(' ').unwrap_or(rest));
            } else {
                break;
            }
            if idx == 0 {
                break;
            }
            idx -= 1;
        }
        collected.reverse();
        collected.join("\n")
    }

    // ---- namespaces & variables ---------------------------------------------

    /// Create a namespace and all intermediate levels.
    pub fn ensure_namespace(&mut self, path: &str) {
        let mut so_far = String::new();
        for seg in path.split("::").filter(|s| !s.is_empty()) {
            if !so_far.is_empty() {
                so_far.push_str("::");
            }
            so_far.push_str(seg);
            self.namespaces.entry(so_far.clone()).or_default();
        }
    }

    pub fn namespace_exists(&self, path: &str) -> bool {
        self.namespaces.contains_key(path)
    }

    /// Innermost `namespace eval` frame, if any: (path, doc comment).
    pub fn current_namespace_frame(&self) -> Option<(&str, &str)> {
        self.ns_stack
            .last()
            .map(|f| (f.path.as_str(), f.doc.as_str()))
    }

    /// Namespace commands and variables resolve against: the defining
    /// namespace of the executing proc, else the innermost `namespace eval`.
    pub fn current_ns(&self) -> &str {
        if let Some(f) = self.frames.last() {
            return &f.ns;
        }
        self.ns_stack.last().map(|f| f.path.as_str()).unwrap_or("")
    }

    fn in_proc(&self) -> bool {
        !self.frames.is_empty()
    }

    /// Resolve a possibly relative namespace path against the current one.
    pub fn resolve_ns_path(&self, path: &str) -> String {
        if let Some(abs) = path.strip_prefix("::") {
            return abs.to_string();
        }
        let cur = self.current_ns();
        if cur.is_empty() {
            path.to_string()
        } else {
            format!("{cur}::{path}")
        }
    }

    fn split_qualified(name: &str) -> (&str, &str) {
        match name.rfind("::") {
            Some(idx) => (&name[..idx], &name[idx + 2..]),
            None => ("", name),
        }
    }

    fn ns_var_get(&self, qualified: &str, orig: &str) -> Result<String, Error> {
        let (ns, var) = Self::split_qualified(qualified);
        self.namespaces
            .get(ns)
            .and_then(|vars| vars.get(var))
            .cloned()
            .ok_or_else(|| err!(UndefinedVariable, "can't read \"{orig}\": no such variable"))
    }

    /// Read a variable. Qualified names resolve in the namespace tree
    /// (relative to the current namespace first); unqualified names resolve
    /// in the local frame inside a proc, else in the current namespace.
    pub fn get_var(&self, name: &str) -> Result<String, Error> {
        if let Some(abs) = name.strip_prefix("::") {
            return self.ns_var_get(abs, name);
        }
        if name.contains("::") {
            let cur = self.current_ns();
            if !cur.is_empty() {
                if let Ok(v) = self.ns_var_get(&format!("{cur}::{name}"), name) {
                    return Ok(v);
                }
            }
            return self.ns_var_get(name, name);
        }
        if let Some(f) = self.frames.last() {
            return f
                .locals
                .get(name)
                .cloned()
                .ok_or_else(|| err!(UndefinedVariable, "can't read \"{name}\": no such variable"));
        }
        let ns = self.current_ns();
        self.namespaces
            .get(ns)
            .and_then(|vars| vars.get(name))
            .cloned()
            .ok_or_else(|| err!(UndefinedVariable, "can't read \"{name}\": no such variable"))
    }

    /// Write a variable, using the same resolution rules as [`get_var`].
    ///
    /// [`get_var`]: Interp::get_var
    pub fn set_var(&mut self, name: &str, value: &str) -> Result<(), Error> {
        if let Some(abs) = name.strip_prefix("::") {
            return self.ns_var_set(abs, name, value);
        }
        if name.contains("::") {
            let cur = self.current_ns().to_string();
            if !cur.is_empty() {
                let candidate = format!("{cur}::{name}");
                let (ns, _) = Self::split_qualified(&candidate);
                if self.namespaces.contains_key(ns) {
                    return self.ns_var_set(&candidate, name, value);
                }
            }
            return self.ns_var_set(name, name, value);
        }
        if self.in_proc() {
            let f = self.frames.last_mut().expect("in_proc");
            f.locals.insert(name.to_string(), value.to_string());
            return Ok(());
        }
        let ns = self.current_ns().to_string();
        self.namespaces
            .get_mut(&ns)
            .expect("current namespace exists")
            .insert(name.to_string(), value.to_string());
        Ok(())
    }

    fn ns_var_set(&mut self, qualified: &str, orig: &str, value: &str) -> Result<(), Error> {
        let (ns, var) = Self::split_qualified(qualified);
        match self.namespaces.get_mut(ns) {
            Some(vars) => {
                vars.insert(var.to_string(), value.to_string());
                Ok(())
            }
            None => Err(err!(
                UndefinedVariable,
                "can't set \"{orig}\": parent namespace doesn't exist"
            )),
        }
    }

    /// Sorted snapshot of the namespace tree, for determinism checks.
    pub fn namespaces_snapshot(&self) -> BTreeMap<String, BTreeMap<String, String>> {
        self.namespaces
            .iter()
            .map(|(k, v)| {
                (
                    k.clone(),
                    v.iter().map(|(a, b)| (a.clone(), b.clone())).collect(),
                )
            })
            .collect()
    }

    // ---- procs ---------------------------------------------------------------

    pub fn define_proc(&mut self, def: ProcDef) {
        self.procs.insert(def.fq_name.clone(), Arc::new(def));
    }

    pub fn proc_def(&self, fq: &str) -> Option<Arc<ProcDef>> {
        self.procs.get(fq).cloned()
    }

    pub fn proc_names(&self) -> impl Iterator<Item = &str> {
        self.procs.keys().map(|s| s.as_str())
    }

    /// Resolve a command name to a proc: absolute `::`-prefixed names go
    /// straight to the table; otherwise the current namespace is tried
    /// first, then the global one.
    pub fn resolve_proc(&self, name: &str) -> Option<String> {
        if let Some(abs) = name.strip_prefix("::") {
            return self.procs.contains_key(abs).then(|| abs.to_string());
        }
        let cur = self.current_ns();
        if !cur.is_empty() {
            let fq = format!("{cur}::{name}");
            if self.procs.contains_key(&fq) {
                return Some(fq);
            }
        }
        self.procs.contains_key(name).then(|| name.to_string())
    }

    /// Call a proc by fully qualified name. Binds parameters (applying
    /// defaults and collecting a trailing `args` rest list), pushes a local
    /// frame, evaluates the body, pops the frame. `return` unwinds here.
    pub fn call_proc(&mut self, fq: &str, argv: &[String]) -> EvalResult {
        let def = self
            .proc_def(fq)
            .ok_or_else(|| err!(UnknownCommand, "invalid command name \"{fq}\""))?;
        if self.depth >= MAX_NESTING {
            bail!(Script, "too many nested evaluations (infinite loop?)");
        }

        let mut locals = HashMap::new();
        for (i, p) in def.params.iter().enumerate() {
            let value = match (argv.get(i), &p.default) {
                (Some(v), _) => v.clone(),
                (None, Some(d)) => d.clone(),
                (None, None) => return Err(arity_error(&def).into()),
            };
            locals.insert(p.name.clone(), value);
        }
        if def.has_rest {
            let rest = argv.get(def.params.len()..).unwrap_or(&[]);
            locals.insert("args".to_string(), parse::format_list(rest.iter()));
        } else if argv.len() > def.params.len() {
            return Err(arity_error(&def).into());
        }

        self.frames.push(Frame {
            locals,
            ns: def.namespace().to_string(),
            file: def.file.clone(),
        });
        self.depth += 1;
        let result = self.eval_script_at(&def.body, def.body_line);
        self.depth -= 1;
        self.frames.pop();

        match result {
            Ok(v) => Ok(v),
            Err(Exception::Return(v)) => Ok(v),
            Err(Exception::Error(mut e)) => {
                e.trace.push(def.fq_name.clone());
                Err(Exception::Error(e))
            }
        }
    }

    // ---- namespace eval support (used by the `namespace` builtin) ----------

    pub(crate) fn push_ns_frame(&mut self, path: String, doc: String) {
        self.ensure_namespace(&path);
        self.ns_stack.push(NsFrame { path, doc });
    }

    pub(crate) fn pop_ns_frame(&mut self) {
        self.ns_stack.pop();
    }

    // ---- evaluation -----------------------------------------------------------

    /// Evaluate a script from its first line.
    pub fn eval_script(&mut self, src: &str) -> EvalResult {
        self.eval_script_at(src, 1)
    }

    /// Evaluate a script whose first line is absolute line `base_line` of
    /// the current file.
    pub fn eval_script_at(&mut self, src: &str, base_line: u32) -> EvalResult {
        let nodes = parse_script(src, base_line).map_err(Exception::Error)?;
        self.eval_nodes(&nodes)
    }

    /// Evaluate parsed nodes in order; the result is the last command's.
    pub fn eval_nodes(&mut self, nodes: &[ScriptNode]) -> EvalResult {
        let mut last = String::new();
        for node in nodes {
            last = self.eval_node(node)?;
        }
        Ok(last)
    }

    fn eval_node(&mut self, node: &ScriptNode) -> EvalResult {
        self.current_line = node.line;
        let name_val = self.substitute_word(&node.words[0])?;
        self.current_line = node.line;
        let name = name_val.text.clone();

        enum Dispatch {
            Proc(String),
            Builtin(BuiltinFn),
            NotFound,
        }
        let target = if let Some(fq) = self.resolve_proc(&name) {
            Dispatch::Proc(fq)
        } else {
            let key = name.strip_prefix("::").unwrap_or(&name);
            match self.builtins.get(key).copied() {
                Some(f) => Dispatch::Builtin(f),
                None if self.unknown.is_some() => {
                    // The command belongs to the tool the flow targets;
                    // hand over the raw node without evaluating its
                    // bracketed parts.
                    let h = self.unknown.expect("checked above");
                    return h(self, node).map_err(|e| attach_line(e, node.line));
                }
                None => Dispatch::NotFound,
            }
        };

        let mut words = Vec::with_capacity(node.words.len());
        words.push(name_val);
        for w in &node.words[1..] {
            let wv = self.substitute_word(w)?;
            self.current_line = node.line;
            words.push(wv);
        }
        let result = match target {
            Dispatch::Proc(fq) => {
                let argv: Vec<String> = words[1..].iter().map(|w| w.text.clone()).collect();
                self.call_proc(&fq, &argv)
            }
            Dispatch::Builtin(f) => f(self, &words),
            Dispatch::NotFound => Err(err!(UnknownCommand, "invalid command name \"{name}\"").into()),
        };
        result.map_err(|e| attach_line(e, node.line))
    }

    /// Invoke a single command given plain words: procs first, then
    /// builtins. Used for stored callbacks.
    pub fn invoke_words(&mut self, words: &[String]) -> EvalResult {
        assert!(!words.is_empty());
        let name = &words[0];
        if let Some(fq) = self.resolve_proc(name) {
            return self.call_proc(&fq, &words[1..]);
        }
        let key = name.strip_prefix("::").unwrap_or(name);
        if let Some(f) = self.builtins.get(key).copied() {
            let word_vals: Vec<WordVal> = words
                .iter()
                .map(|t| WordVal {
                    text: t.clone(),
                    brace_line: None,
                })
                .collect();
            return f(self, &word_vals);
        }
        bail!(UnknownCommand, "invalid command name \"{name}\"");
    }

    /// Render a parse node back to text, substituting variable references
    /// but keeping command substitutions as literal `[...]` text. Words
    /// without substitutions reproduce their source span verbatim.
    pub fn render_node_verbatim(&mut self, node: &ScriptNode) -> Result<String, Exception> {
        let mut words = Vec::with_capacity(node.words.len());
        for w in &node.words {
            words.push(self.render_word_verbatim(w)?);
        }
        Ok(words.join(" "))
    }

    fn render_word_verbatim(&mut self, w: &Word) -> Result<String, Exception> {
        if !w.has_substitutions() {
            return Ok(w.raw.clone());
        }
        let mut text = String::new();
        for part in &w.parts {
            match part {
                Part::Literal(t) => text.push_str(t),
                Part::Braced(t) => {
                    text.push('{');
                    text.push_str(t);
                    text.push('}');
                }
                Part::VarRef(name) => {
                    let v = self
                        .get_var(name)
                        .map_err(|e| Exception::Error(e.or_line(w.line)))?;
                    text.push_str(&v);
                }
                Part::CmdSub(nodes) => {
                    let mut inner = Vec::with_capacity(nodes.len());
                    for n in nodes {
                        inner.push(self.render_node_verbatim(n)?);
                    }
                    text.push('[');
                    text.push_str(&inner.join("; "));
                    text.push(']');
                }
            }
        }
        Ok(text)
    }

    /// Substitute one word into its final text: literal parts are copied,
    /// `$refs` replaced by values, `[...]` by their evaluation result,
    /// braced parts returned raw.
    pub fn substitute_word(&mut self, w: &Word) -> Result<WordVal, Exception> {
        let mut text = String::new();
        for part in &w.parts {
            match part {
                Part::Literal(t) => text.push_str(t),
                Part::Braced(t) => text.push_str(t),
                Part::VarRef(name) => {
                    let v = self
                        .get_var(name)
                        .map_err(|e| Exception::Error(e.or_line(w.line)))?;
                    text.push_str(&v);
                }
                Part::CmdSub(nodes) => {
                    let v = self.eval_nodes(nodes)?;
                    text.push_str(&v);
                }
            }
        }
        Ok(WordVal {
            text,
            brace_line: w.brace_line,
        })
    }
}

/// Spawn a command line with output inherited through the interpreter's
/// sink, returning the child's exit code. Used by `hbs::Exec` and the
/// direct-exec backend stages (live mode only).
pub(crate) fn spawn_line(
    interp: &mut Interp,
    argv: &[String],
    cwd: Option<&Path>,
) -> Result<i32, Exception> {
    let out = spawn::run(interp, argv, cwd, true).map_err(Exception::Error)?;
    Ok(out.status)
}

fn attach_line(e: Exception, line: u32) -> Exception {
    match e {
        Exception::Error(err) => Exception::Error(err.or_line(line)),
        other => other,
    }
}

fn arity_error(def: &ProcDef) -> Error {
    let summary = def.param_summary();
    let usage = if summary.is_empty() {
        def.fq_name.clone()
    } else {
        format!("{} {summary}", def.fq_name)
    };
    Error::new(
        ErrorKind::Arity,
        format!("wrong # args: should be \"{usage}\""),
    )
}
