//! `.hbs` file discovery, sourcing, and the core/target model.
//!
//! Cores are namespaces that call `hbs::Register`; targets are the procs
//! defined directly in a core's namespace. Target enumeration is deferred
//! to query time, so procs defined after the `hbs::Register` call still
//! count.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{bail, err, Error, EvalResult, Exception};
use crate::glob::glob_match;
use crate::tclish::{parse, Interp, ProcDef, WordVal};

/// Ordered list of `.hbs` files to source: shallower paths first, equal
/// depths in lexicographic order of the full relative path.
#[derive(Debug, Clone)]
pub struct DiscoveryList {
    pub root: PathBuf,
    /// Paths relative to `root`.
    pub files: Vec<PathBuf>,
}

/// Sort paths by (depth, full path). Depth is the number of separators.
pub fn sort_paths(files: &mut [PathBuf]) {
    files.sort_by(|a, b| {
        let da = a.components().count();
        let db = b.components().count();
        da.cmp(&db).then_with(|| a.as_os_str().cmp(b.as_os_str()))
    });
}

/// Recursively scan `root` for `.hbs` files, following directory symlinks.
/// Hidden directories are skipped; symlink cycles are skipped with a
/// warning.
pub fn discover(root: &Path) -> Result<DiscoveryList, Error> {
    let mut files = Vec::new();
    let walker = walkdir::WalkDir::new(root)
        .follow_links(true)
        .into_iter()
        .filter_entry(|e| {
            e.depth() == 0
                || !(e.file_type().is_dir()
                    && e.file_name().to_string_lossy().starts_with('.'))
        });
    for entry in walker {
        let entry = match entry {
            Ok(e) => e,
            Err(e) => {
                if e.loop_ancestor().is_some() {
                    log::warn!("skipping symlink cycle at {:?}", e.path());
                    continue;
                }
                let path = e
                    .path()
                    .map(|p| p.display().to_string())
                    .unwrap_or_else(|| root.display().to_string());
                return Err(err!(Io, "cannot read \"{path}\": {e}"));
            }
        };
        if !entry.file_type().is_file() {
            continue;
        }
        let name = entry.file_name().to_string_lossy();
        if !name.ends_with(".hbs") {
            continue;
        }
        let rel = entry
            .path()
            .strip_prefix(root)
            .unwrap_or(entry.path())
            .to_path_buf();
        if !files.contains(&rel) {
            files.push(rel);
        }
    }
    sort_paths(&mut files);
    Ok(DiscoveryList {
        root: root.to_path_buf(),
        files,
    })
}

/// A registered core.
#[derive(Debug, Clone)]
pub struct CoreReg {
    pub path: String,
    /// Defining file, relative to the discovery root.
    pub file: PathBuf,
    pub doc: String,
}

/// Registration side effects accumulated while sourcing.
#[derive(Debug, Clone, Default)]
pub struct Registry {
    pub cores: BTreeMap<String, CoreReg>,
}

fn registry(interp: &Interp) -> &Registry {
    interp.context::<Registry>().expect("registry installed")
}

fn registry_mut(interp: &mut Interp) -> &mut Registry {
    interp.context_mut::<Registry>().expect("registry installed")
}

/// The `hbs::Register` builtin: records the innermost enclosing namespace
/// as a core.
pub(crate) fn cmd_register(interp: &mut Interp, words: &[WordVal]) -> EvalResult {
    if words.len() != 1 {
        bail!(Arity, "wrong # args: should be \"hbs::Register\"");
    }
    let Some((path, doc)) = interp.current_namespace_frame() else {
        bail!(
            RegisterOutsideNamespace,
            "hbs::Register must be called inside a namespace eval block"
        );
    };
    let (path, doc) = (path.to_string(), doc.to_string());
    let file = interp
        .effective_file()
        .map(Path::to_path_buf)
        .unwrap_or_default();
    let reg = registry_mut(interp);
    if let Some(prev) = reg.cores.get(&path) {
        bail!(
            DuplicateCore,
            "core \"{path}\" already registered (in {})",
            prev.file.display()
        );
    }
    reg.cores.insert(
        path.clone(),
        CoreReg {
            path,
            file,
            doc,
        },
    );
    Ok(String::new())
}

/// Source every file of `list` in order into the shared interpreter.
/// Evaluation errors abort with file and line context.
pub fn source_all(interp: &mut Interp, list: &DiscoveryList) -> Result<(), Error> {
    for rel in &list.files {
        let full = list.root.join(rel);
        let text = std::fs::read_to_string(&full)
            .map_err(|e| err!(Io, "cannot read \"{}\": {e}", full.display()))?;
        interp.set_source_context(Some(rel.clone()), Some(Arc::from(text.as_str())));
        let result = interp.eval_script(&text);
        interp.set_source_context(None, None);
        match result {
            Ok(_) => {}
            // file-level `return` stops sourcing that file, like Tcl's source
            Err(Exception::Return(_)) => {}
            Err(Exception::Error(e)) => {
                let line = e.line.unwrap_or(0);
                let mut wrapped = Error::new(
                    e.kind,
                    format!("{}:{line}: {}", rel.display(), e.msg),
                );
                wrapped.line = e.line;
                wrapped.trace = e.trace;
                return Err(wrapped);
            }
        }
    }
    Ok(())
}

/// True iff `name` follows the testbench naming rules: `tb-`/`tb_` prefix,
/// `-tb`/`_tb` suffix, or exactly `tb`. Case-sensitive.
pub fn is_testbench_name(name: &str) -> bool {
    name == "tb"
        || name.starts_with("tb-")
        || name.starts_with("tb_")
        || name.ends_with("-tb")
        || name.ends_with("_tb")
}

/// Core paths, sorted, optionally filtered by a glob over the full path.
pub fn list_cores(interp: &Interp, pattern: Option<&str>) -> Vec<String> {
    registry(interp)
        .cores
        .keys()
        .filter(|p| pattern.is_none_or(|pat| glob_match(pat, p)))
        .cloned()
        .collect()
}

/// Target names of a core: procs defined directly in the core namespace,
/// except `_`-prefixed utility procs. Sorted.
pub fn list_targets(interp: &Interp, core_path: &str) -> Result<Vec<String>, Error> {
    if !registry(interp).cores.contains_key(core_path) {
        return Err(err!(UnknownCore, "unknown core \"{core_path}\""));
    }
    let prefix = format!("{core_path}::");
    let mut names: Vec<String> = interp
        .proc_names()
        .filter_map(|fq| fq.strip_prefix(&prefix))
        .filter(|rest| !rest.contains("::") && !rest.starts_with('_'))
        .map(str::to_string)
        .collect();
    names.sort();
    Ok(names)
}

/// Utility procs (`_`-prefixed) of a core. Sorted.
pub fn list_utility_procs(interp: &Interp, core_path: &str) -> Vec<String> {
    let prefix = format!("{core_path}::");
    let mut names: Vec<String> = interp
        .proc_names()
        .filter_map(|fq| fq.strip_prefix(&prefix))
        .filter(|rest| !rest.contains("::") && rest.starts_with('_'))
        .map(str::to_string)
        .collect();
    names.sort();
    names
}

/// All testbench target paths, sorted, optionally filtered by a glob.
pub fn list_tb(interp: &Interp, pattern: Option<&str>) -> Vec<String> {
    let mut out = Vec::new();
    for core in registry(interp).cores.keys() {
        if let Ok(targets) = list_targets(interp, core) {
            for t in targets {
                if is_testbench_name(&t) {
                    let path = format!("{core}::{t}");
                    if pattern.is_none_or(|pat| glob_match(pat, &path)) {
                        out.push(path);
                    }
                }
            }
        }
    }
    out.sort();
    out
}

/// Matching cores with their defining files, sorted by core path.
pub fn where_defined(interp: &Interp, pattern: &str) -> Vec<(String, PathBuf)> {
    registry(interp)
        .cores
        .values()
        .filter(|c| glob_match(pattern, &c.path))
        .map(|c| (c.path.clone(), c.file.clone()))
        .collect()
}

/// Resolve `corePath::name` to the target's proc definition.
pub fn resolve_target(interp: &Interp, target_path: &str) -> Result<Arc<ProcDef>, Error> {
    let Some(idx) = target_path.rfind("::") else {
        return Err(err!(
            UnknownTarget,
            "unknown target \"{target_path}\": expected corePath::targetName"
        ));
    };
    let (core, name) = (&target_path[..idx], &target_path[idx + 2..]);
    if !registry(interp).cores.contains_key(core) {
        return Err(err!(
            UnknownTarget,
            "unknown target \"{target_path}\": core \"{core}\" is not registered"
        ));
    }
    if name.starts_with('_') || name.is_empty() {
        return Err(err!(
            UnknownTarget,
            "unknown target \"{target_path}\": \"{name}\" is not a target name"
        ));
    }
    interp.proc_def(target_path).ok_or_else(|| {
        err!(
            UnknownTarget,
            "unknown target \"{target_path}\": no such target in core \"{core}\""
        )
    })
}

/// Everything known about one core, assembled at query time.
#[derive(Debug, Clone)]
pub struct Core {
    pub path: String,
    pub file: PathBuf,
    pub doc: String,
    pub targets: Vec<Arc<ProcDef>>,
    pub utility_procs: Vec<Arc<ProcDef>>,
}

pub fn core_view(interp: &Interp, core_path: &str) -> Result<Core, Error> {
    let reg = registry(interp)
        .cores
        .get(core_path)
        .ok_or_else(|| err!(UnknownCore, "unknown core \"{core_path}\""))?
        .clone();
    let targets = list_targets(interp, core_path)?
        .into_iter()
        .filter_map(|n| interp.proc_def(&format!("{core_path}::{n}")))
        .collect();
    let utility_procs = list_utility_procs(interp, core_path)
        .into_iter()
        .filter_map(|n| interp.proc_def(&format!("{core_path}::{n}")))
        .collect();
    Ok(Core {
        path: reg.path,
        file: reg.file,
        doc: reg.doc,
        targets,
        utility_procs,
    })
}

pub fn all_cores(interp: &Interp) -> Vec<Core> {
    registry(interp)
        .cores
        .keys()
        .filter_map(|p| core_view(interp, p).ok())
        .collect()
}

// ---- dumps -----------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct CoreDump {
    pub cores: Vec<CoreDumpEntry>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct CoreDumpEntry {
    pub path: String,
    pub file: String,
    pub doc: String,
    pub targets: Vec<TargetDump>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct TargetDump {
    pub name: String,
    pub params: Vec<ParamDump>,
    pub testbench: bool,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct ParamDump {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub default: Option<String>,
}

pub fn core_dump(interp: &Interp) -> CoreDump {
    let cores = all_cores(interp)
        .into_iter()
        .map(|c| CoreDumpEntry {
            path: c.path.clone(),
            file: c.file.display().to_string(),
            doc: c.doc.clone(),
            targets: c
                .targets
                .iter()
                .map(|t| TargetDump {
                    name: t.short_name().to_string(),
                    params: dump_params(t),
                    testbench: is_testbench_name(t.short_name()),
                })
                .collect(),
        })
        .collect();
    CoreDump { cores }
}

fn dump_params(def: &ProcDef) -> Vec<ParamDump> {
    let mut out: Vec<ParamDump> = def
        .params
        .iter()
        .map(|p| ParamDump {
            name: p.name.clone(),
            default: p.default.clone(),
        })
        .collect();
    if def.has_rest {
        out.push(ParamDump {
            name: "args".to_string(),
            default: None,
        });
    }
    out
}

/// JSON rendering of the registry (stable key order).
pub fn dump_json(interp: &Interp) -> String {
    serde_json::to_string_pretty(&core_dump(interp)).expect("dump serializes")
}

/// Same data as a Tcl dictionary literal, one core per line.
pub fn dump_tcl(interp: &Interp) -> String {
    let dump = core_dump(interp);
    let mut out = String::new();
    for core in &dump.cores {
        let mut target_pairs = Vec::new();
        for t in &core.targets {
            let params = parse::format_list(t.params.iter().map(|p| match &p.default {
                Some(d) => parse::format_list([p.name.as_str(), d.as_str()]),
                None => p.name.clone(),
            }));
            let body = parse::format_list([
                "params",
                params.as_str(),
                "testbench",
                if t.testbench { "1" } else { "0" },
            ]);
            target_pairs.push(t.name.clone());
            target_pairs.push(body);
        }
        let targets = parse::format_list(target_pairs.iter().map(String::as_str));
        let body = parse::format_list([
            "file",
            core.file.as_str(),
            "doc",
            core.doc.as_str(),
            "targets",
            targets.as_str(),
        ]);
        out.push_str(&parse::format_list([core.path.as_str(), body.as_str()]));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::ErrorKind;
    use crate::new_interp;
    use std::fs;

    const THREE_FLIP_FLOPS: &str = r#"
namespace eval lib {
  namespace eval pkg1 {
    namespace eval d-flip-flop {
      proc src {} {
        hbs::AddFile d-flip-flop.vhd
      }
      hbs::Register
    }
    namespace eval t-flip-flop {
      proc src {} {
        hbs::AddFile t-flip-flop.vhd
      }
      hbs::Register
    }
  }
  namespace eval pkg2 {
    namespace eval jk-flip-flop {
      proc src {} {
        hbs::AddFile jk-flip-flop.vhd
      }
      hbs::Register
    }
  }
}
"#;

    #[test]
    fn discovery_order_depth_then_lexicographic() {
        let dir = tempfile::tempdir().unwrap();
        for p in ["a/b/c/foo.hbs", "d/bar.hbs", "e/f/zaz.hbs"] {
            let full = dir.path().join(p);
            fs::create_dir_all(full.parent().unwrap()).unwrap();
            fs::write(full, "").unwrap();
        }
        let list = discover(dir.path()).unwrap();
        let got: Vec<String> = list
            .files
            .iter()
            .map(|p| p.display().to_string())
            .collect();
        assert_eq!(got, vec!["d/bar.hbs", "e/f/zaz.hbs", "a/b/c/foo.hbs"]);
    }

    #[test]
    fn discovery_equal_depth_tie_break() {
        let dir = tempfile::tempdir().unwrap();
        for p in ["x/b.hbs", "x/a.hbs"] {
            let full = dir.path().join(p);
            fs::create_dir_all(full.parent().unwrap()).unwrap();
            fs::write(full, "").unwrap();
        }
        let list = discover(dir.path()).unwrap();
        let got: Vec<String> = list
            .files
            .iter()
            .map(|p| p.display().to_string())
            .collect();
        assert_eq!(got, vec!["x/a.hbs", "x/b.hbs"]);
    }

    #[test]
    fn discovery_skips_hidden_dirs_and_empty_tree() {
        let dir = tempfile::tempdir().unwrap();
        fs::create_dir_all(dir.path().join(".git")).unwrap();
        fs::write(dir.path().join(".git/x.hbs"), "").unwrap();
        let list = discover(dir.path()).unwrap();
        assert!(list.files.is_empty());
    }

    #[test]
    fn three_cores_registered_and_listed() {
        let mut interp = new_interp();
        interp.eval_script(THREE_FLIP_FLOPS).unwrap();
        assert_eq!(
            list_cores(&interp, None),
            vec![
                "lib::pkg1::d-flip-flop",
                "lib::pkg1::t-flip-flop",
                "lib::pkg2::jk-flip-flop"
            ]
        );
        assert_eq!(
            list_cores(&interp, Some("lib::pkg1::*")),
            vec!["lib::pkg1::d-flip-flop", "lib::pkg1::t-flip-flop"]
        );
        assert!(list_cores(&interp, Some("nothing*")).is_empty());
    }

    #[test]
    fn register_outside_namespace_fails() {
        let mut interp = new_interp();
        let err = interp.eval_script("hbs::Register").unwrap_err();
        match err {
            Exception::Error(e) => assert_eq!(e.kind, ErrorKind::RegisterOutsideNamespace),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_core_is_a_hard_error() {
        let mut interp = new_interp();
        interp
            .eval_script("namespace eval c { hbs::Register }")
            .unwrap();
        let err = interp
            .eval_script("namespace eval c { hbs::Register }")
            .unwrap_err();
        match err {
            Exception::Error(e) => assert_eq!(e.kind, ErrorKind::DuplicateCore),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn vlnv_and_deep_paths() {
        let mut interp = new_interp();
        interp
            .eval_script(
                "namespace eval vendor::library::flip-flop::1.0 {\n  proc src {} {}\n  hbs::Register\n}",
            )
            .unwrap();
        interp
            .eval_script(
                "namespace eval a::b::c::d::e::f::flip-flop {\n  proc src {} {}\n  hbs::Register\n}",
            )
            .unwrap();
        let cores = list_cores(&interp, None);
        assert!(cores.contains(&"vendor::library::flip-flop::1.0".to_string()));
        assert!(cores.contains(&"a::b::c::d::e::f::flip-flop".to_string()));
        assert_eq!(
            "a::b::c::d::e::f::flip-flop".split("::").count(),
            7
        );
    }

    #[test]
    fn targets_exclude_underscore_and_child_namespaces() {
        let mut interp = new_interp();
        interp
            .eval_script(
                "namespace eval vhdl::simple::edge-detector {
                   proc src {} {}
                   proc _tb {top} {}
                   proc tb-sync {} {}
                   proc tb-comb {} {}
                   hbs::Register
                 }",
            )
            .unwrap();
        assert_eq!(
            list_targets(&interp, "vhdl::simple::edge-detector").unwrap(),
            vec!["src", "tb-comb", "tb-sync"]
        );
        assert_eq!(
            list_utility_procs(&interp, "vhdl::simple::edge-detector"),
            vec!["_tb"]
        );
        assert!(list_targets(&interp, "nosuch").is_err());
    }

    #[test]
    fn only_underscore_procs_means_no_targets() {
        let mut interp = new_interp();
        interp
            .eval_script("namespace eval c { proc _helper {} {} \n hbs::Register }")
            .unwrap();
        assert!(list_targets(&interp, "c").unwrap().is_empty());
    }

    #[test]
    fn tb_classification() {
        for name in ["tb-comb", "tb-sync", "tb_x", "x-tb", "x_tb", "tb"] {
            assert!(is_testbench_name(name), "{name} should be a testbench");
        }
        for name in ["stb", "table", "tbx", "src", "TB", "comb-tb2"] {
            assert!(!is_testbench_name(name), "{name} should not be a testbench");
        }
    }

    #[test]
    fn tb_classification_matches_brute_force_oracle() {
        // Independent oracle: enumerate the rule set over a small alphabet.
        fn oracle(name: &str) -> bool {
            let starts = name.len() >= 3 && (&name[..3] == "tb-" || &name[..3] == "tb_");
            let ends = name.len() >= 3
                && (&name[name.len() - 3..] == "-tb" || &name[name.len() - 3..] == "_tb");
            starts || ends || name == "tb"
        }
        let alphabet = ['t', 'b', '-', '_', 's'];
        let mut stack = vec![String::new()];
        while let Some(s) = stack.pop() {
            if !s.is_empty() {
                assert_eq!(is_testbench_name(&s), oracle(&s), "name {s:?}");
            }
            if s.len() < 4 {
                for c in alphabet {
                    stack.push(format!("{s}{c}"));
                }
            }
        }
    }

    #[test]
    fn list_tb_paths_and_pattern() {
        let mut interp = new_interp();
        interp
            .eval_script(
                "namespace eval vhdl::simple::edge-detector {
                   proc src {} {}
                   proc tb-sync {} {}
                   proc tb-comb {} {}
                   hbs::Register
                 }",
            )
            .unwrap();
        assert_eq!(
            list_tb(&interp, None),
            vec![
                "vhdl::simple::edge-detector::tb-comb",
                "vhdl::simple::edge-detector::tb-sync"
            ]
        );
        assert_eq!(
            list_tb(&interp, Some("*sync*")),
            vec!["vhdl::simple::edge-detector::tb-sync"]
        );
        assert!(list_tb(&interp, Some("zzz*")).is_empty());
    }

    #[test]
    fn source_order_and_cross_file_procs() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(
            dir.path().join("utils.hbs"),
            "proc shout {msg} { return $msg }\n",
        )
        .unwrap();
        let deep = dir.path().join("ip/core");
        fs::create_dir_all(&deep).unwrap();
        fs::write(
            deep.join("core.hbs"),
            "namespace eval c {\n  proc t {} { shout hi }\n  hbs::Register\n}\n",
        )
        .unwrap();
        let list = discover(dir.path()).unwrap();
        let mut interp = new_interp();
        source_all(&mut interp, &list).unwrap();
        assert_eq!(list_cores(&interp, None), vec!["c"]);
        assert_eq!(interp.call_proc("c::t", &[]).unwrap(), "hi");
        let reg = interp.context::<Registry>().unwrap();
        assert_eq!(
            reg.cores["c"].file.display().to_string(),
            "ip/core/core.hbs"
        );
    }

    #[test]
    fn sourcing_error_has_file_and_line_context() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("bad.hbs"), "set x 1\nnosuchcmd\n").unwrap();
        let list = discover(dir.path()).unwrap();
        let mut interp = new_interp();
        let e = source_all(&mut interp, &list).unwrap_err();
        assert_eq!(e.kind, ErrorKind::UnknownCommand);
        assert!(e.msg.starts_with("bad.hbs:2:"), "msg = {}", e.msg);
    }

    #[test]
    fn doc_comments_harvested() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(
            dir.path().join("doc.hbs"),
            "# D-type flip-flop.\n# Second line.\nnamespace eval d-ff {\n  # Source files.\n  proc src {} {}\n  hbs::Register\n}\n",
        )
        .unwrap();
        let list = discover(dir.path()).unwrap();
        let mut interp = new_interp();
        source_all(&mut interp, &list).unwrap();
        let core = core_view(&interp, "d-ff").unwrap();
        assert_eq!(core.doc, "D-type flip-flop.\nSecond line.");
        assert_eq!(core.targets[0].doc, "Source files.");
    }

    #[test]
    fn where_defined_reports_files() {
        let dir = tempfile::tempdir().unwrap();
        let lib = dir.path().join("lib");
        fs::create_dir_all(&lib).unwrap();
        fs::write(lib.join("flip-flops.hbs"), THREE_FLIP_FLOPS).unwrap();
        let list = discover(dir.path()).unwrap();
        let mut interp = new_interp();
        source_all(&mut interp, &list).unwrap();
        let hits = where_defined(&interp, "lib::pkg2::*");
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].0, "lib::pkg2::jk-flip-flop");
        assert_eq!(hits[0].1.display().to_string(), "lib/flip-flops.hbs");
        assert_eq!(where_defined(&interp, "*").len(), 3);
        assert!(where_defined(&interp, "zzz").is_empty());
    }

    #[test]
    fn dumps_have_stable_shape() {
        let mut interp = new_interp();
        interp
            .eval_script(
                "namespace eval core {\n  proc target {{stage \"bitstream\"}} {}\n  proc tb-x {args} {}\n  hbs::Register\n}",
            )
            .unwrap();
        let json = dump_json(&interp);
        let parsed: CoreDump = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed, core_dump(&interp));
        assert_eq!(parsed.cores.len(), 1);
        let core = &parsed.cores[0];
        assert_eq!(core.targets[0].name, "target");
        assert_eq!(core.targets[0].params[0].default.as_deref(), Some("bitstream"));
        assert!(!core.targets[0].testbench);
        assert!(core.targets[1].testbench);

        let tcl = dump_tcl(&interp);
        let pairs = parse::parse_list(&tcl).unwrap();
        assert_eq!(pairs.len(), 2);
        assert_eq!(pairs[0], "core");
        let body = parse::parse_list(&pairs[1]).unwrap();
        assert_eq!(body[0], "file");
        assert_eq!(body[2], "doc");
        assert_eq!(body[4], "targets");
        let targets = parse::parse_list(&body[5]).unwrap();
        assert_eq!(targets[0], "target");
        let tbody = parse::parse_list(&targets[1]).unwrap();
        assert_eq!(tbody, vec!["params", "{stage bitstream}", "testbench", "0"]);
    }

    #[test]
    fn empty_registry_dumps() {
        let interp = new_interp();
        let json = dump_json(&interp);
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["cores"].as_array().unwrap().len(), 0);
        assert_eq!(dump_tcl(&interp), "");
    }
}
