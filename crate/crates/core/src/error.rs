//! Error type shared by the interpreter, registry, flow engine and backends.
//!
//! A single structured error flows through the whole stack: parse errors,
//! script-level `error` calls, flow errors (unknown target, dependency
//! cycle, ...) and I/O failures all unwind through the interpreter the same
//! way, so `catch` can intercept any of them, exactly like in a Tcl shell.

use std::fmt;

/// What went wrong, machine-readably. The human-readable text lives in
/// [`Error::msg`] and follows Tcl's wording where Tcl defines one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Unclosed `{`, `[` or `"` in a script.
    UnbalancedDelimiter,
    /// `$name` lookup failed.
    UndefinedVariable,
    /// No proc, builtin or unknown-handler matched a command name.
    UnknownCommand,
    /// Wrong number of arguments for a proc or builtin.
    Arity,
    /// Malformed expression text.
    ExprSyntax,
    /// Arithmetic attempted on a non-numeric value.
    Type,
    /// `register_builtin` name collision.
    DuplicateBuiltin,
    /// Raised by the `error` command or by `hbs::panic`.
    Script,
    /// Filesystem problem (unreadable directory, missing file, ...).
    Io,
    /// A subprocess could not be started.
    Spawn,
    /// A subprocess exited with a non-zero status (plain `exec` only).
    ChildFailed,
    /// `hbs::Register` called at global scope.
    RegisterOutsideNamespace,
    /// Two cores registered under the same path.
    DuplicateCore,
    /// Core path not present in the registry.
    UnknownCore,
    /// Target path does not name a registered target.
    UnknownTarget,
    /// AddDep closed a loop in the active call chain.
    DependencyCycle,
    /// Tool name not known to any backend.
    UnknownTool,
    /// SetTool after files were added, after Run, or with a different tool.
    ToolAlreadySet,
    /// Stage name not valid for the active backend.
    UnknownStage,
    /// hbs::Run (or a stage-dependent builtin) before hbs::SetTool.
    ToolNotSet,
    /// Backend needs a top unit and none was set.
    TopNotSet,
    /// A file kind the active backend cannot consume.
    UnsupportedFile,
    /// SetExitSeverity outside {note, warning, error, failure}.
    InvalidSeverity,
    /// A mock backend stage command exited non-zero.
    MockStageFailure,
}

/// Error carried through script evaluation and the flow engine.
#[derive(Debug, Clone)]
pub struct Error {
    pub kind: ErrorKind,
    pub msg: String,
    /// Line of the command that raised the error, when known.
    pub line: Option<u32>,
    /// Procedure call chain the error unwound through, innermost first.
    pub trace: Vec<String>,
}

impl Error {
    pub fn new(kind: ErrorKind, msg: impl Into<String>) -> Self {
        Error {
            kind,
            msg: msg.into(),
            line: None,
            trace: Vec::new(),
        }
    }

    pub fn at_line(mut self, line: u32) -> Self {
        self.line = Some(line);
        self
    }

    /// Fill in the line unless an inner frame already recorded one.
    pub fn or_line(mut self, line: u32) -> Self {
        self.line.get_or_insert(line);
        self
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.msg)
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::new(ErrorKind::Io, e.to_string())
    }
}

/// Non-error control flow escaping a script, plus real errors.
#[derive(Debug, Clone)]
pub enum Exception {
    /// `return` unwinding to the nearest proc call.
    Return(String),
    Error(Error),
}

impl From<Error> for Exception {
    fn from(e: Error) -> Self {
        Exception::Error(e)
    }
}

/// Result of evaluating a command or script.
pub type EvalResult = Result<String, Exception>;

macro_rules! err {
    ($kind:ident, $($arg:tt)*) => {
        $crate::error::Error::new($crate::error::ErrorKind::$kind, format!($($arg)*))
    };
}
pub(crate) use err;

macro_rules! bail {
    ($kind:ident, $($arg:tt)*) => {
        return Err($crate::error::err!($kind, $($arg)*).into())
    };
}
pub(crate) use bail;
