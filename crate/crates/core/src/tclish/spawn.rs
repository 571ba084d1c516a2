//! Subprocess spawning shared by the `exec` builtin, `hbs::Exec` and the
//! direct-exec backend stages. Live mode only; dry-run callers print the
//! command instead of calling in here.

use std::path::Path;
use std::process::{Command, Stdio};

use super::{Interp, OutputSink};
use crate::error::{err, Error};

pub(crate) struct SpawnOutcome {
    pub status: i32,
    /// Child stdout when not inherited.
    pub captured: String,
}

/// Run `argv` to completion. With `inherit_stdout` the child's stdout goes
/// to the interpreter's output sink; otherwise it is captured and returned.
/// The child's stderr always follows the sink.
pub(crate) fn run(
    interp: &mut Interp,
    argv: &[String],
    cwd: Option<&Path>,
    inherit_stdout: bool,
) -> Result<SpawnOutcome, Error> {
    assert!(!argv.is_empty());
    let mut cmd = Command::new(&argv[0]);
    cmd.args(&argv[1..]);
    if let Some(dir) = cwd {
        cmd.current_dir(dir);
    }
    cmd.stdin(Stdio::null());

    let buffer_sink = matches!(interp.output(), OutputSink::Buffer(_));
    if inherit_stdout && !buffer_sink {
        cmd.stdout(sink_stdio(interp.output())?);
    }
    if !buffer_sink {
        cmd.stderr(sink_stdio(interp.output())?);
    }

    let out = cmd.output().map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            err!(
                Spawn,
                "couldn't execute \"{}\": no such file or directory",
                argv[0]
            )
        } else {
            err!(Spawn, "couldn't execute \"{}\": {e}", argv[0])
        }
    })?;

    let mut captured = String::new();
    if inherit_stdout {
        if !out.stdout.is_empty() {
            interp.write_out(&String::from_utf8_lossy(&out.stdout));
        }
    } else {
        captured = String::from_utf8_lossy(&out.stdout).into_owned();
    }
    if !out.stderr.is_empty() {
        // only reachable with a Buffer sink; route it there
        interp.write_out(&String::from_utf8_lossy(&out.stderr));
    }

    Ok(SpawnOutcome {
        status: out.status.code().unwrap_or(1),
        captured,
    })
}

fn sink_stdio(sink: &OutputSink) -> Result<Stdio, Error> {
    match sink {
        OutputSink::Inherit => Ok(Stdio::inherit()),
        OutputSink::Stderr => {
            let fd = std::io::stderr()
                .lock()
                .as_fd()
                .try_clone_to_owned()
                .map_err(Error::from)?;
            Ok(Stdio::from(fd))
        }
        OutputSink::File(f) => {
            let clone = f.try_clone().map_err(Error::from)?;
            Ok(Stdio::from(clone))
        }
        OutputSink::Buffer(_) => unreachable!("buffer sinks capture via pipes"),
    }
}

use std::os::fd::AsFd;
