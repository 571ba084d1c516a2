//! The frozen builtin command set: exactly the commands the build
//! description fixtures use. `hbs::*` commands are installed separately by
//! the flow module.

use super::expr::{eval_expr, truthy};
use super::parse::{format_list, parse_list};
use super::{spawn, Interp, ProcDef, WordVal};
use crate::error::{bail, err, EvalResult, Exception};
use crate::glob;

pub(super) fn install(interp: &mut Interp) {
    let table: &[(&str, super::BuiltinFn)] = &[
        ("namespace", cmd_namespace),
        ("proc", cmd_proc),
        ("set", cmd_set),
        ("if", cmd_if),
        ("expr", cmd_expr),
        ("return", cmd_return),
        ("error", cmd_error),
        ("catch", cmd_catch),
        ("puts", cmd_puts),
        ("exec", cmd_exec),
        ("eval", cmd_eval),
        ("foreach", cmd_foreach),
        ("list", cmd_list),
        ("llength", cmd_llength),
        ("lindex", cmd_lindex),
        ("string", cmd_string),
    ];
    for (name, f) in table {
        interp
            .register_builtin(name, *f)
            .expect("core builtins installed once");
    }
}

fn body_line(w: &WordVal, interp: &Interp) -> u32 {
    w.brace_line.unwrap_or(interp.current_line)
}

fn cmd_namespace(interp: &mut Interp, words: &[WordVal]) -> EvalResult {
    if words.len() != 4 || words[1].text != "eval" {
        bail!(
            Arity,
            "wrong # args: should be \"namespace eval path script\""
        );
    }
    let path = interp.resolve_ns_path(&words[2].text);
    let doc = interp.doc_comment_above(interp.current_line);
    let line = body_line(&words[3], interp);
    interp.push_ns_frame(path, doc);
    let result = interp.eval_script_at(&words[3].text, line);
    interp.pop_ns_frame();
    result?;
    Ok(String::new())
}

fn cmd_proc(interp: &mut Interp, words: &[WordVal]) -> EvalResult {
    if words.len() != 4 {
        bail!(Arity, "wrong # args: should be \"proc name args body\"");
    }
    let fq_name = interp.resolve_ns_path(&words[1].text);
    let mut params = Vec::new();
    let mut has_rest = false;
    let specs = parse_list(&words[2].text).map_err(Exception::Error)?;
    let count = specs.len();
    for (i, spec) in specs.iter().enumerate() {
        let fields = parse_list(spec).map_err(Exception::Error)?;
        match fields.len() {
            1 if fields[0] == "args" && i == count - 1 => has_rest = true,
            1 => params.push(super::Param {
                name: fields[0].clone(),
                default: None,
            }),
            2 => params.push(super::Param {
                name: fields[0].clone(),
                default: Some(fields[1].clone()),
            }),
            0 => bail!(Script, "argument with no name"),
            _ => bail!(Script, "too many fields in argument specifier \"{spec}\""),
        }
    }
    let mut seen_default = false;
    for p in &params {
        if p.default.is_some() {
            seen_default = true;
        } else if seen_default {
            bail!(
                Script,
                "required parameter follows optional parameter in \"{fq_name}\""
            );
        }
    }
    let doc = interp.doc_comment_above(interp.current_line);
    let def = ProcDef {
        fq_name,
        params,
        has_rest,
        body: words[3].text.clone(),
        body_line: body_line(&words[3], interp),
        file: interp.effective_file().map(|p| p.to_path_buf()),
        doc,
    };
    interp.define_proc(def);
    Ok(String::new())
}

fn cmd_set(interp: &mut Interp, words: &[WordVal]) -> EvalResult {
    match words.len() {
        2 => interp.get_var(&words[1].text).map_err(Exception::Error),
        3 => {
            interp
                .set_var(&words[1].text, &words[2].text)
                .map_err(Exception::Error)?;
            Ok(words[2].text.clone())
        }
        _ => bail!(Arity, "wrong # args: should be \"set varName ?newValue?\""),
    }
}

fn cmd_if(interp: &mut Interp, words: &[WordVal]) -> EvalResult {
    let mut i = 1usize;
    loop {
        let Some(cond) = words.get(i) else {
            bail!(Arity, "wrong # args: no expression after \"if\" argument");
        };
        let Some(body) = words.get(i + 1) else {
            bail!(
                Arity,
                "wrong # args: no script following \"{}\" argument",
                cond.text
            );
        };
        let val = eval_expr(interp, &cond.text)?;
        let taken = truthy(&val).map_err(Exception::Error)?;
        if taken {
            return interp.eval_script_at(&body.text, body_line(body, interp));
        }
        i += 2;
        match words.get(i).map(|w| w.text.as_str()) {
            Some("elseif") => i += 1,
            Some("else") => {
                let Some(body) = words.get(i + 1) else {
                    bail!(Arity, "wrong # args: no script following \"else\" argument");
                };
                if words.len() > i + 2 {
                    bail!(Arity, "wrong # args: extra words after \"else\" clause");
                }
                return interp.eval_script_at(&body.text, body_line(body, interp));
            }
            Some(other) => bail!(
                Arity,
                "invalid command name \"{other}\" (expected elseif or else)"
            ),
            None => return Ok(String::new()),
        }
    }
}

fn cmd_expr(interp: &mut Interp, words: &[WordVal]) -> EvalResult {
    if words.len() < 2 {
        bail!(Arity, "wrong # args: should be \"expr arg ?arg ...?\"");
    }
    let text = words[1..]
        .iter()
        .map(|w| w.text.as_str())
        .collect::<Vec<_>>()
        .join(" ");
    eval_expr(interp, &text)
}

fn cmd_return(_interp: &mut Interp, words: &[WordVal]) -> EvalResult {
    match words.len() {
        1 => Err(Exception::Return(String::new())),
        2 => Err(Exception::Return(words[1].text.clone())),
        _ => bail!(Arity, "wrong # args: should be \"return ?value?\""),
    }
}

fn cmd_error(_interp: &mut Interp, words: &[WordVal]) -> EvalResult {
    if words.len() != 2 {
        bail!(Arity, "wrong # args: should be \"error message\"");
    }
    bail!(Script, "{}", words[1].text);
}

fn cmd_catch(interp: &mut Interp, words: &[WordVal]) -> EvalResult {
    if !(words.len() == 2 || words.len() == 3) {
        bail!(Arity, "wrong # args: should be \"catch script ?varName?\"");
    }
    let line = body_line(&words[1], interp);
    let (code, payload) = match interp.eval_script_at(&words[1].text, line) {
        Ok(v) => (0, v),
        Err(Exception::Error(e)) => (1, e.msg),
        Err(Exception::Return(v)) => (2, v),
    };
    if let Some(var) = words.get(2) {
        interp
            .set_var(&var.text, &payload)
            .map_err(Exception::Error)?;
    }
    Ok(code.to_string())
}

fn cmd_puts(interp: &mut Interp, words: &[WordVal]) -> EvalResult {
    match words.len() {
        2 => {
            interp.writeln_out(&words[1].text);
            Ok(String::new())
        }
        3 if words[1].text == "-nonewline" => {
            interp.write_out(&words[2].text);
            Ok(String::new())
        }
        _ => bail!(Arity, "wrong # args: should be \"puts ?-nonewline? string\""),
    }
}

fn cmd_exec(interp: &mut Interp, words: &[WordVal]) -> EvalResult {
    let mut argv: Vec<String> = Vec::new();
    let mut inherit_stdout = false;
    let mut i = 1usize;
    while i < words.len() {
        let w = words[i].text.as_str();
        if w == ">@" {
            match words.get(i + 1).map(|w| w.text.as_str()) {
                Some("stdout") => {
                    inherit_stdout = true;
                    i += 2;
                    continue;
                }
                _ => bail!(Script, "can only redirect to stdout (>@ stdout)"),
            }
        }
        if w == ">@stdout" {
            inherit_stdout = true;
            i += 1;
            continue;
        }
        if w == "&" || w.starts_with('>') || w.starts_with('<') || w.starts_with('|')
            || w.starts_with("2>")
        {
            bail!(
                Script,
                "unsupported redirection \"{w}\": only >@ stdout is supported"
            );
        }
        argv.push(w.to_string());
        i += 1;
    }
    if argv.is_empty() {
        bail!(Arity, "wrong # args: should be \"exec arg ?arg ...?\"");
    }
    if interp.dry_run {
        let line = argv.join(" ");
        interp.writeln_out(&line);
        return Ok(String::new());
    }
    let out = spawn::run(interp, &argv, None, inherit_stdout).map_err(Exception::Error)?;
    if out.status != 0 {
        return Err(err!(ChildFailed, "child process exited abnormally").into());
    }
    let mut captured = out.captured;
    if captured.ends_with('\n') {
        captured.pop();
        if captured.ends_with('\r') {
            captured.pop();
        }
    }
    Ok(captured)
}

fn cmd_eval(interp: &mut Interp, words: &[WordVal]) -> EvalResult {
    if words.len() < 2 {
        bail!(Arity, "wrong # args: should be \"eval arg ?arg ...?\"");
    }
    let script = words[1..]
        .iter()
        .map(|w| w.text.as_str())
        .collect::<Vec<_>>()
        .join(" ");
    interp.eval_script_at(&script, interp.current_line)
}

fn cmd_foreach(interp: &mut Interp, words: &[WordVal]) -> EvalResult {
    if words.len() != 4 {
        bail!(
            Arity,
            "wrong # args: should be \"foreach varName list body\""
        );
    }
    let var = words[1].text.clone();
    let elems = parse_list(&words[2].text).map_err(Exception::Error)?;
    let line = body_line(&words[3], interp);
    for e in elems {
        interp.set_var(&var, &e).map_err(Exception::Error)?;
        interp.eval_script_at(&words[3].text, line)?;
    }
    Ok(String::new())
}

fn cmd_list(_interp: &mut Interp, words: &[WordVal]) -> EvalResult {
    Ok(format_list(words[1..].iter().map(|w| w.text.as_str())))
}

fn cmd_llength(_interp: &mut Interp, words: &[WordVal]) -> EvalResult {
    if words.len() != 2 {
        bail!(Arity, "wrong # args: should be \"llength list\"");
    }
    let elems = parse_list(&words[1].text).map_err(Exception::Error)?;
    Ok(elems.len().to_string())
}

fn cmd_lindex(_interp: &mut Interp, words: &[WordVal]) -> EvalResult {
    if words.len() != 3 {
        bail!(Arity, "wrong # args: should be \"lindex list index\"");
    }
    let elems = parse_list(&words[1].text).map_err(Exception::Error)?;
    let idx_text = words[2].text.as_str();
    let idx: i64 = if idx_text == "end" {
        elems.len() as i64 - 1
    } else if let Some(off) = idx_text.strip_prefix("end-") {
        let off: i64 = off
            .parse()
            .map_err(|_| err!(Script, "bad index \"{idx_text}\": must be integer or end?-integer?"))?;
        elems.len() as i64 - 1 - off
    } else {
        idx_text
            .parse()
            .map_err(|_| err!(Script, "bad index \"{idx_text}\": must be integer or end?-integer?"))?
    };
    if idx < 0 || idx as usize >= elems.len() {
        return Ok(String::new());
    }
    Ok(elems[idx as usize].clone())
}

fn cmd_string(_interp: &mut Interp, words: &[WordVal]) -> EvalResult {
    let sub = words
        .get(1)
        .map(|w| w.text.as_str())
        .ok_or_else(|| err!(Arity, "wrong # args: should be \"string subcommand ?arg ...?\""))?;
    match sub {
        "match" => {
            if words.len() != 4 {
                bail!(Arity, "wrong # args: should be \"string match pattern string\"");
            }
            Ok(bool_text(glob::glob_match(&words[2].text, &words[3].text)))
        }
        "equal" => {
            if words.len() != 4 {
                bail!(Arity, "wrong # args: should be \"string equal string1 string2\"");
            }
            Ok(bool_text(words[2].text == words[3].text))
        }
        other => Err(err!(
            Script,
            "unknown or unsupported string subcommand \"{other}\": must be equal or match"
        )
        .into()),
    }
}

fn bool_text(b: bool) -> String {
    if b { "1" } else { "0" }.to_string()
}

#[cfg(test)]
mod tests {
    use crate::error::{ErrorKind, Exception};
    use crate::tclish::{BufSink, Interp, OutputSink};

    fn run(script: &str) -> (Result<String, Exception>, String) {
        let mut i = Interp::new();
        let buf = BufSink::new();
        i.set_output(OutputSink::Buffer(buf.clone()));
        let r = i.eval_script(script);
        (r, buf.contents())
    }

    #[test]
    fn if_elseif_else_chain() {
        let (_, out) = run("if {1 == 2} { puts a } else { puts b }");
        assert_eq!(out, "b\n");
        let (_, out) = run("set n 2\nif {$n == 1} { puts one } elseif {$n == 2} { puts two } else { puts other }");
        assert_eq!(out, "two\n");
    }

    #[test]
    fn catch_codes_and_message() {
        let (r, _) = run("catch { error boom } msg");
        assert_eq!(r.unwrap(), "1");
        let (r, out) = run("catch { error boom } msg\nputs $msg");
        assert_eq!(r.unwrap(), "");
        assert_eq!(out, "boom\n");
        let (r, _) = run("catch { set x ok } msg");
        assert_eq!(r.unwrap(), "0");
        let (r, _) = run("proc p {} { catch { return rv } m; set m }\np");
        assert_eq!(r.unwrap(), "rv");
    }

    #[test]
    fn foreach_iterates_lists() {
        let (_, out) = run("foreach v {a {b c} d} { puts $v }");
        assert_eq!(out, "a\nb c\nd\n");
    }

    #[test]
    fn list_ops() {
        let (r, _) = run("llength {a b {c d}}");
        assert_eq!(r.unwrap(), "3");
        let (r, _) = run("lindex {a b c} 1");
        assert_eq!(r.unwrap(), "b");
        let (r, _) = run("lindex {a b c} end");
        assert_eq!(r.unwrap(), "c");
        let (r, _) = run("lindex {a b c} 7");
        assert_eq!(r.unwrap(), "");
        let (r, _) = run("list a {b c} {}");
        assert_eq!(r.unwrap(), "a {b c} {}");
    }

    #[test]
    fn string_match_and_equal() {
        let (r, _) = run("string match \"Vivado*\" \"Vivado v2024.2\"");
        assert_eq!(r.unwrap(), "1");
        let (r, _) = run("string match *sync* tb-sync");
        assert_eq!(r.unwrap(), "1");
        let (r, _) = run("string equal abc abd");
        assert_eq!(r.unwrap(), "0");
    }

    #[test]
    fn exec_captures_stdout_and_strips_newline() {
        let (r, out) = run("exec echo hi");
        assert_eq!(r.unwrap(), "hi");
        assert_eq!(out, "");
    }

    #[test]
    fn exec_redirect_to_stdout_inherits_sink() {
        let (r, out) = run("exec echo hi >@ stdout");
        assert_eq!(r.unwrap(), "");
        assert_eq!(out, "hi\n");
    }

    #[test]
    fn exec_failure_is_an_error_catch_sees_it() {
        let (r, _) = run("exec false");
        match r {
            Err(Exception::Error(e)) => {
                assert_eq!(e.kind, ErrorKind::ChildFailed);
                assert_eq!(e.msg, "child process exited abnormally");
            }
            other => panic!("expected child failure, got {other:?}"),
        }
        let (r, out) = run("catch { exec false } msg\nputs $msg");
        assert_eq!(r.unwrap(), "");
        assert_eq!(out, "child process exited abnormally\n");
    }

    #[test]
    fn exec_rejects_other_redirections() {
        for bad in ["exec echo hi > f", "exec echo hi 2>err", "exec a | b"] {
            let (r, _) = run(bad);
            assert!(r.is_err(), "{bad} should be rejected");
        }
    }

    #[test]
    fn exec_dry_run_prints_instead_of_spawning() {
        let mut i = Interp::new();
        let buf = BufSink::new();
        i.set_output(OutputSink::Buffer(buf.clone()));
        i.dry_run = true;
        let r = i.eval_script("exec touch /nonexistent-dir-zzz/file >@ stdout");
        assert_eq!(r.unwrap(), "");
        assert_eq!(buf.contents(), "touch /nonexistent-dir-zzz/file\n");
    }

    #[test]
    fn eval_concats_and_reparses() {
        let (r, out) = run("set cmd \"puts hi\"\neval $cmd");
        r.unwrap();
        assert_eq!(out, "hi\n");
        let (r, _) = run("eval exec \"echo one two\"");
        assert_eq!(r.unwrap(), "one two");
    }

    #[test]
    fn namespace_eval_creates_intermediate_levels() {
        let mut i = Interp::new();
        i.eval_script("namespace eval a::b::c { set x 1 }").unwrap();
        assert!(i.namespace_exists("a"));
        assert!(i.namespace_exists("a::b"));
        assert!(i.namespace_exists("a::b::c"));
        assert_eq!(i.get_var("a::b::c::x").unwrap(), "1");
    }

    #[test]
    fn set_on_missing_namespace_fails() {
        let mut i = Interp::new();
        let e = match i.eval_script("set nosuchns::v 1") {
            Err(Exception::Error(e)) => e,
            other => panic!("expected error, got {other:?}"),
        };
        assert!(e.msg.contains("parent namespace doesn't exist"));
    }
}
