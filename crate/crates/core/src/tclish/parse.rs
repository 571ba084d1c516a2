//! Parser for the Tcl-subset DSL.
//!
//! A script is a sequence of commands separated by newlines or semicolons
//! (outside braces, brackets and quotes). Each command is a sequence of
//! words; each word is a sequence of parts. Braced words are captured raw
//! and never substituted at parse time; their contents are only parsed if
//! the word is later evaluated as a script or expression.

use crate::error::{err, Error};

/// One substitution unit inside a word.
#[derive(Debug, Clone, PartialEq)]
pub enum Part {
    /// Plain text, backslash escapes already applied.
    Literal(String),
    /// `$name` or `${name}`; qualified names keep their `::`.
    VarRef(String),
    /// `[...]` command substitution, parsed eagerly.
    CmdSub(Vec<ScriptNode>),
    /// `{...}` raw text, no inner parse.
    Braced(String),
}

/// One word of a command.
#[derive(Debug, Clone, PartialEq)]
pub struct Word {
    pub parts: Vec<Part>,
    /// Source span of the word, used for verbatim passthrough logging.
    pub raw: String,
    /// Line the word starts on.
    pub line: u32,
    /// For a pure braced word: line its content starts on. Lets `proc`
    /// bodies and `namespace eval` blocks report absolute file lines.
    pub brace_line: Option<u32>,
}

impl Word {
    /// True if substitution could change this word (it has a `$` or `[...]`
    /// part anywhere, including inside nested command substitutions).
    pub fn has_substitutions(&self) -> bool {
        fn part_subst(p: &Part) -> bool {
            match p {
                Part::Literal(_) | Part::Braced(_) => false,
                Part::VarRef(_) => true,
                Part::CmdSub(nodes) => nodes
                    .iter()
                    .any(|n| n.words.iter().any(Word::has_substitutions_ref)),
            }
        }
        self.parts.iter().any(part_subst)
    }

    fn has_substitutions_ref(w: &Word) -> bool {
        w.has_substitutions()
    }
}

/// One parsed command.
#[derive(Debug, Clone, PartialEq)]
pub struct ScriptNode {
    pub words: Vec<Word>,
    pub line: u32,
}

/// Parse a script into command nodes. `base_line` is the absolute line of
/// the first line of `src` (1 for a whole file; the brace-content line when
/// re-parsing a stored proc body).
pub fn parse_script(src: &str, base_line: u32) -> Result<Vec<ScriptNode>, Error> {
    let mut s = Scanner::new(src, base_line);
    let nodes = s.script(false)?;
    debug_assert!(s.at_end());
    Ok(nodes)
}

struct Scanner<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    line: u32,
}

impl<'a> Scanner<'a> {
    fn new(src: &'a str, base_line: u32) -> Self {
        Scanner {
            src,
            bytes: src.as_bytes(),
            pos: 0,
            line: base_line,
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.bytes.len()
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn peek_at(&self, off: usize) -> Option<u8> {
        self.bytes.get(self.pos + off).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.peek()?;
        self.pos += 1;
        if b == b'\n' {
            self.line += 1;
        }
        Some(b)
    }

    /// Spaces, tabs and backslash-newline continuations between words.
    fn skip_inline_ws(&mut self) {
        loop {
            match self.peek() {
                Some(b' ') | Some(b'\t') | Some(b'\r') => {
                    self.bump();
                }
                Some(b'\\') if self.peek_at(1) == Some(b'\n') => {
                    self.bump();
                    self.bump();
                    while matches!(self.peek(), Some(b' ') | Some(b'\t')) {
                        self.bump();
                    }
                }
                _ => break,
            }
        }
    }

    /// Whitespace, command separators and comments before a command.
    fn skip_to_command(&mut self) {
        loop {
            self.skip_inline_ws();
            match self.peek() {
                Some(b'\n') | Some(b';') => {
                    self.bump();
                }
                Some(b'#') => {
                    // Comment runs to an unescaped end of line.
                    loop {
                        match self.bump() {
                            None | Some(b'\n') => break,
                            Some(b'\\') => {
                                self.bump();
                            }
                            _ => {}
                        }
                    }
                }
                _ => break,
            }
        }
    }

    fn script(&mut self, in_bracket: bool) -> Result<Vec<ScriptNode>, Error> {
        let open_line = self.line;
        let mut nodes = Vec::new();
        loop {
            self.skip_to_command();
            match self.peek() {
                None => {
                    if in_bracket {
                        return Err(err!(UnbalancedDelimiter, "missing close-bracket")
                            .at_line(open_line));
                    }
                    return Ok(nodes);
                }
                Some(b']') if in_bracket => {
                    self.bump();
                    return Ok(nodes);
                }
                _ => {
                    let node = self.command(in_bracket)?;
                    if !node.words.is_empty() {
                        nodes.push(node);
                    }
                }
            }
        }
    }

    fn command(&mut self, in_bracket: bool) -> Result<ScriptNode, Error> {
        let line = self.line;
        let mut words = Vec::new();
        loop {
            self.skip_inline_ws();
            match self.peek() {
                None | Some(b'\n') | Some(b';') => break,
                Some(b']') if in_bracket => break,
                _ => words.push(self.word(in_bracket)?),
            }
        }
        Ok(ScriptNode { words, line })
    }

    fn word(&mut self, in_bracket: bool) -> Result<Word, Error> {
        let start = self.pos;
        let line = self.line;
        match self.peek() {
            Some(b'{') => {
                let open_line = self.line;
                self.bump();
                let content_line = self.line;
                let content = self.braced_content(open_line)?;
                self.expect_word_end(in_bracket, "extra characters after close-brace")?;
                Ok(Word {
                    parts: vec![Part::Braced(content)],
                    raw: self.src[start..self.pos].to_string(),
                    line,
                    brace_line: Some(content_line),
                })
            }
            Some(b'"') => {
                let open_line = self.line;
                self.bump();
                let mut parts = Vec::new();
                self.parts_until(&mut parts, Mode::Quoted, open_line)?;
                self.expect_word_end(in_bracket, "extra characters after close-quote")?;
                if parts.is_empty() {
                    parts.push(Part::Literal(String::new()));
                }
                Ok(Word {
                    parts,
                    raw: self.src[start..self.pos].to_string(),
                    line,
                    brace_line: None,
                })
            }
            _ => {
                let mut parts = Vec::new();
                self.parts_until(&mut parts, Mode::Bare { in_bracket }, line)?;
                Ok(Word {
                    parts,
                    raw: self.src[start..self.pos].to_string(),
                    line,
                    brace_line: None,
                })
            }
        }
    }

    /// Raw text between the already-consumed `{` and its matching `}`.
    fn braced_content(&mut self, open_line: u32) -> Result<String, Error> {
        let start = self.pos;
        let mut depth = 1usize;
        loop {
            match self.peek() {
                None => {
                    return Err(
                        err!(UnbalancedDelimiter, "missing close-brace").at_line(open_line)
                    )
                }
                Some(b'\\') => {
                    self.bump();
                    self.bump();
                }
                Some(b'{') => {
                    depth += 1;
                    self.bump();
                }
                Some(b'}') => {
                    depth -= 1;
                    if depth == 0 {
                        let content = self.src[start..self.pos].to_string();
                        self.bump();
                        return Ok(content);
                    }
                    self.bump();
                }
                _ => {
                    self.bump();
                }
            }
        }
    }

    fn expect_word_end(&mut self, in_bracket: bool, msg: &str) -> Result<(), Error> {
        match self.peek() {
            None | Some(b' ') | Some(b'\t') | Some(b'\r') | Some(b'\n') | Some(b';') => Ok(()),
            Some(b']') if in_bracket => Ok(()),
            Some(b'\\') if self.peek_at(1) == Some(b'\n') => Ok(()),
            _ => Err(err!(UnbalancedDelimiter, "{msg}").at_line(self.line)),
        }
    }

    fn parts_until(
        &mut self,
        parts: &mut Vec<Part>,
        mode: Mode,
        open_line: u32,
    ) -> Result<(), Error> {
        let mut lit = Vec::<u8>::new();
        macro_rules! flush {
            () => {
                if !lit.is_empty() {
                    parts.push(Part::Literal(take_utf8(&mut lit)));
                }
            };
        }
        loop {
            let b = match self.peek() {
                Some(b) => b,
                None => match mode {
                    Mode::Quoted => {
                        return Err(
                            err!(UnbalancedDelimiter, "missing close-quote").at_line(open_line)
                        )
                    }
                    Mode::Bare { .. } => break,
                },
            };
            match mode {
                Mode::Quoted if b == b'"' => {
                    self.bump();
                    break;
                }
                Mode::Bare { in_bracket } => match b {
                    b' ' | b'\t' | b'\r' | b'\n' | b';' => break,
                    b']' if in_bracket => break,
                    b'\\' if self.peek_at(1) == Some(b'\n') => break,
                    _ => {}
                },
                _ => {}
            }
            match b {
                b'$' => {
                    self.bump();
                    match self.var_name()? {
                        Some(name) => {
                            flush!();
                            parts.push(Part::VarRef(name));
                        }
                        None => lit.push(b'$'),
                    }
                }
                b'[' => {
                    self.bump();
                    flush!();
                    let nodes = self.script(true)?;
                    parts.push(Part::CmdSub(nodes));
                }
                b'\\' => {
                    self.bump();
                    match self.peek() {
                        None => lit.push(b'\\'),
                        Some(b'\n') => {
                            self.bump();
                            while matches!(self.peek(), Some(b' ') | Some(b'\t')) {
                                self.bump();
                            }
                            lit.push(b' ');
                        }
                        Some(c) => {
                            self.bump();
                            lit.push(match c {
                                b'n' => b'\n',
                                b't' => b'\t',
                                b'r' => b'\r',
                                b'a' => 0x07,
                                b'b' => 0x08,
                                b'f' => 0x0C,
                                b'v' => 0x0B,
                                other => other,
                            });
                        }
                    }
                }
                _ => {
                    self.bump();
                    lit.push(b);
                }
            }
        }
        flush!();
        Ok(())
    }

    /// Variable name after an already-consumed `$`. Returns None when no
    /// name follows (a lone `$` is literal text).
    fn var_name(&mut self) -> Result<Option<String>, Error> {
        if self.peek() == Some(b'{') {
            let open_line = self.line;
            self.bump();
            let start = self.pos;
            loop {
                match self.peek() {
                    None => {
                        return Err(err!(
                            UnbalancedDelimiter,
                            "missing close-brace for variable name"
                        )
                        .at_line(open_line))
                    }
                    Some(b'}') => {
                        let name = self.src[start..self.pos].to_string();
                        self.bump();
                        return Ok(Some(name));
                    }
                    _ => {
                        self.bump();
                    }
                }
            }
        }
        let start = self.pos;
        loop {
            match self.peek() {
                Some(b) if b.is_ascii_alphanumeric() || b == b'_' => {
                    self.bump();
                }
                // Namespace separators are runs of two or more colons; a
                // single colon ends the name.
                Some(b':') if self.peek_at(1) == Some(b':') => {
                    while self.peek() == Some(b':') {
                        self.bump();
                    }
                }
                _ => break,
            }
        }
        if self.pos == start {
            return Ok(None);
        }
        Ok(Some(self.src[start..self.pos].to_string()))
    }
}

#[derive(Clone, Copy)]
enum Mode {
    Quoted,
    Bare { in_bracket: bool },
}

fn take_utf8(buf: &mut Vec<u8>) -> String {
    let bytes = std::mem::take(buf);
    String::from_utf8(bytes).expect("word split at non-ASCII boundary")
}

/// Split a string into Tcl list elements: whitespace-separated, with brace
/// and quote grouping and backslash escapes.
pub fn parse_list(text: &str) -> Result<Vec<String>, Error> {
    let bytes = text.as_bytes();
    let mut elems = Vec::new();
    let mut i = 0usize;
    while i < bytes.len() {
        while i < bytes.len() && bytes[i].is_ascii_whitespace() {
            i += 1;
        }
        if i >= bytes.len() {
            break;
        }
        match bytes[i] {
            b'{' => {
                let mut depth = 1usize;
                let start = i + 1;
                let mut j = start;
                while j < bytes.len() {
                    match bytes[j] {
                        b'\\' => j += 1,
                        b'{' => depth += 1,
                        b'}' => {
                            depth -= 1;
                            if depth == 0 {
                                break;
                            }
                        }
                        _ => {}
                    }
                    j += 1;
                }
                if depth != 0 {
                    return Err(err!(UnbalancedDelimiter, "unmatched open brace in list"));
                }
                elems.push(text[start..j].to_string());
                i = j + 1;
            }
            b'"' => {
                let start = i + 1;
                let mut j = start;
                let mut out = Vec::new();
                while j < bytes.len() && bytes[j] != b'"' {
                    if bytes[j] == b'\\' && j + 1 < bytes.len() {
                        out.push(unescape_byte(bytes[j + 1]));
                        j += 2;
                    } else {
                        out.push(bytes[j]);
                        j += 1;
                    }
                }
                if j >= bytes.len() {
                    return Err(err!(UnbalancedDelimiter, "unmatched open quote in list"));
                }
                elems.push(String::from_utf8(out).expect("list split at non-ASCII boundary"));
                i = j + 1;
            }
            _ => {
                let mut out = Vec::new();
                while i < bytes.len() && !bytes[i].is_ascii_whitespace() {
                    if bytes[i] == b'\\' && i + 1 < bytes.len() {
                        out.push(unescape_byte(bytes[i + 1]));
                        i += 2;
                    } else {
                        out.push(bytes[i]);
                        i += 1;
                    }
                }
                elems.push(String::from_utf8(out).expect("list split at non-ASCII boundary"));
            }
        }
    }
    Ok(elems)
}

fn unescape_byte(b: u8) -> u8 {
    match b {
        b'n' => b'\n',
        b't' => b'\t',
        b'r' => b'\r',
        other => other,
    }
}

/// Quote one string as a Tcl list element.
pub fn quote_elem(s: &str) -> String {
    if s.is_empty() {
        return "{}".to_string();
    }
    let plain = s.bytes().all(|b| {
        !b.is_ascii_whitespace() && !matches!(b, b'{' | b'}' | b'"' | b'[' | b']' | b'$' | b'\\')
    });
    if plain {
        return s.to_string();
    }
    if braces_balanced(s) && !s.ends_with('\\') {
        return format!("{{{s}}}");
    }
    let mut out = String::with_capacity(s.len() + 8);
    for c in s.chars() {
        match c {
            ' ' | '\t' | '{' | '}' | '"' | '[' | ']' | '$' | '\\' | ';' => {
                out.push('\\');
                out.push(c);
            }
            '\n' => out.push_str("\\n"),
            _ => out.push(c),
        }
    }
    out
}

/// Join strings into a Tcl list.
pub fn format_list<I, S>(items: I) -> String
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    items
        .into_iter()
        .map(|s| quote_elem(s.as_ref()))
        .collect::<Vec<_>>()
        .join(" ")
}

fn braces_balanced(s: &str) -> bool {
    let mut depth = 0i64;
    let mut bytes = s.bytes();
    while let Some(b) = bytes.next() {
        match b {
            b'\\' => {
                bytes.next();
            }
            b'{' => depth += 1,
            b'}' => {
                depth -= 1;
                if depth < 0 {
                    return false;
                }
            }
            _ => {}
        }
    }
    depth == 0
}
