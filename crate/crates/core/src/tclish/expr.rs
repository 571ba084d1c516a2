//! Expression evaluator for `expr` and `if`/`elseif` guards.
//!
//! Supports integer/float arithmetic, numeric and string comparison,
//! `eq`/`ne`, logical operators, parentheses, and `$var`/`[cmd]`
//! substitution inside the expression text. Everything-is-a-string: values
//! come in as text and are coerced on demand.

use super::Interp;
use crate::error::{bail, err, Error, EvalResult, Exception};

pub fn eval_expr(interp: &mut Interp, text: &str) -> EvalResult {
    let tokens = tokenize(interp, text)?;
    let mut p = ExprParser { tokens, pos: 0 };
    let v = p.or_expr()?;
    if p.pos != p.tokens.len() {
        bail!(ExprSyntax, "syntax error in expression \"{text}\"");
    }
    Ok(v.render())
}

/// Tcl boolean coercion: numbers are tested against zero, plus the literal
/// boolean words.
pub fn truthy(s: &str) -> Result<bool, Error> {
    let t = s.trim();
    if let Some(n) = Value::numeric(t) {
        return Ok(match n {
            Num::Int(i) => i != 0,
            Num::Dbl(d) => d != 0.0,
        });
    }
    match t.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" => Ok(true),
        "false" | "no" | "off" => Ok(false),
        _ => Err(err!(Type, "expected boolean value but got \"{s}\"")),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Operand(String),
    Or,
    And,
    Eq,
    Ne,
    StrEq,
    StrNe,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    Not,
    LParen,
    RParen,
}

fn tokenize(interp: &mut Interp, text: &str) -> Result<Vec<Tok>, Exception> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0usize;
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b' ' | b'\t' | b'\r' | b'\n' => i += 1,
            b'(' => {
                toks.push(Tok::LParen);
                i += 1;
            }
            b')' => {
                toks.push(Tok::RParen);
                i += 1;
            }
            b'+' => {
                toks.push(Tok::Plus);
                i += 1;
            }
            b'-' => {
                toks.push(Tok::Minus);
                i += 1;
            }
            b'*' => {
                toks.push(Tok::Star);
                i += 1;
            }
            b'/' => {
                toks.push(Tok::Slash);
                i += 1;
            }
            b'%' => {
                toks.push(Tok::Percent);
                i += 1;
            }
            b'&' if bytes.get(i + 1) == Some(&b'&') => {
                toks.push(Tok::And);
                i += 2;
            }
            b'|' if bytes.get(i + 1) == Some(&b'|') => {
                toks.push(Tok::Or);
                i += 2;
            }
            b'=' if bytes.get(i + 1) == Some(&b'=') => {
                toks.push(Tok::Eq);
                i += 2;
            }
            b'!' if bytes.get(i + 1) == Some(&b'=') => {
                toks.push(Tok::Ne);
                i += 2;
            }
            b'!' => {
                toks.push(Tok::Not);
                i += 1;
            }
            b'<' if bytes.get(i + 1) == Some(&b'=') => {
                toks.push(Tok::Le);
                i += 2;
            }
            b'<' => {
                toks.push(Tok::Lt);
                i += 1;
            }
            b'>' if bytes.get(i + 1) == Some(&b'=') => {
                toks.push(Tok::Ge);
                i += 2;
            }
            b'>' => {
                toks.push(Tok::Gt);
                i += 1;
            }
            b'"' => {
                let (s, next) = scan_quoted(text, i)?;
                toks.push(Tok::Operand(s));
                i = next;
            }
            b'{' => {
                let (s, next) = scan_braced(text, i)?;
                toks.push(Tok::Operand(s));
                i = next;
            }
            b'$' => {
                let (name, next) = scan_var_name(text, i + 1)?;
                let v = interp.get_var(&name).map_err(Exception::Error)?;
                toks.push(Tok::Operand(v));
                i = next;
            }
            b'[' => {
                let (inner, next) = scan_bracket(text, i)?;
                let v = interp.eval_script(&inner)?;
                toks.push(Tok::Operand(v));
                i = next;
            }
            _ if b.is_ascii_digit() || b == b'.' => {
                let (s, next) = scan_number(text, i);
                toks.push(Tok::Operand(s));
                i = next;
            }
            _ if b.is_ascii_alphabetic() || b == b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                match &text[start..i] {
                    "eq" => toks.push(Tok::StrEq),
                    "ne" => toks.push(Tok::StrNe),
                    w if matches!(
                        w.to_ascii_lowercase().as_str(),
                        "true" | "false" | "yes" | "no" | "on" | "off"
                    ) =>
                    {
                        toks.push(Tok::Operand(w.to_string()))
                    }
                    w => {
                        return Err(err!(
                            ExprSyntax,
                            "invalid bareword \"{w}\" in expression \"{text}\""
                        )
                        .into())
                    }
                }
            }
            _ => {
                return Err(err!(
                    ExprSyntax,
                    "unexpected character '{}' in expression \"{text}\"",
                    b as char
                )
                .into())
            }
        }
    }
    Ok(toks)
}

fn scan_quoted(text: &str, start: usize) -> Result<(String, usize), Error> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = start + 1;
    while i < bytes.len() {
        match bytes[i] {
            b'"' => {
                return Ok((
                    String::from_utf8(out).expect("expr split at non-ASCII boundary"),
                    i + 1,
                ))
            }
            b'\\' if i + 1 < bytes.len() => {
                out.push(match bytes[i + 1] {
                    b'n' => b'\n',
                    b't' => b'\t',
                    other => other,
                });
                i += 2;
            }
            b => {
                out.push(b);
                i += 1;
            }
        }
    }
    Err(err!(UnbalancedDelimiter, "missing close-quote in expression"))
}

fn scan_braced(text: &str, start: usize) -> Result<(String, usize), Error> {
    let bytes = text.as_bytes();
    let mut depth = 1usize;
    let mut i = start + 1;
    while i < bytes.len() {
        match bytes[i] {
            b'\\' => i += 2,
            b'{' => {
                depth += 1;
                i += 1;
            }
            b'}' => {
                depth -= 1;
                if depth == 0 {
                    return Ok((text[start + 1..i].to_string(), i + 1));
                }
                i += 1;
            }
            _ => i += 1,
        }
    }
    Err(err!(UnbalancedDelimiter, "missing close-brace in expression"))
}

fn scan_bracket(text: &str, start: usize) -> Result<(String, usize), Error> {
    let bytes = text.as_bytes();
    let mut depth = 1usize;
    let mut i = start + 1;
    while i < bytes.len() {
        match bytes[i] {
            b'\\' => i += 2,
            b'[' => {
                depth += 1;
                i += 1;
            }
            b']' => {
                depth -= 1;
                if depth == 0 {
                    return Ok((text[start + 1..i].to_string(), i + 1));
                }
                i += 1;
            }
            _ => i += 1,
        }
    }
    Err(err!(UnbalancedDelimiter, "missing close-bracket in expression"))
}

fn scan_var_name(text: &str, start: usize) -> Result<(String, usize), Error> {
    let bytes = text.as_bytes();
    if bytes.get(start) == Some(&b'{') {
        let mut i = start + 1;
        while i < bytes.len() && bytes[i] != b'}' {
            i += 1;
        }
        if i >= bytes.len() {
            return Err(err!(
                UnbalancedDelimiter,
                "missing close-brace for variable name"
            ));
        }
        return Ok((text[start + 1..i].to_string(), i + 1));
    }
    let mut i = start;
    while i < bytes.len() {
        let b = bytes[i];
        if b.is_ascii_alphanumeric() || b == b'_' {
            i += 1;
        } else if b == b':' && bytes.get(i + 1) == Some(&b':') {
            while i < bytes.len() && bytes[i] == b':' {
                i += 1;
            }
        } else {
            break;
        }
    }
    if i == start {
        return Err(err!(ExprSyntax, "lone \"$\" in expression"));
    }
    Ok((text[start..i].to_string(), i))
}

fn scan_number(text: &str, start: usize) -> (String, usize) {
    let bytes = text.as_bytes();
    let mut i = start;
    if bytes.get(i) == Some(&b'0') && matches!(bytes.get(i + 1), Some(b'x') | Some(b'X')) {
        i += 2;
        while i < bytes.len() && bytes[i].is_ascii_hexdigit() {
            i += 1;
        }
        return (text[start..i].to_string(), i);
    }
    while i < bytes.len() && bytes[i].is_ascii_digit() {
        i += 1;
    }
    if bytes.get(i) == Some(&b'.') {
        i += 1;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
    }
    if matches!(bytes.get(i), Some(b'e') | Some(b'E')) {
        let mut j = i + 1;
        if matches!(bytes.get(j), Some(b'+') | Some(b'-')) {
            j += 1;
        }
        if bytes.get(j).is_some_and(|b| b.is_ascii_digit()) {
            i = j;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
        }
    }
    (text[start..i].to_string(), i)
}

#[derive(Debug, Clone, Copy)]
enum Num {
    Int(i64),
    Dbl(f64),
}

#[derive(Debug, Clone)]
struct Value {
    text: String,
    num: Option<Num>,
}

impl Value {
    fn from_text(text: String) -> Self {
        let num = Value::numeric(&text);
        Value { text, num }
    }

    fn from_int(i: i64) -> Self {
        Value {
            text: i.to_string(),
            num: Some(Num::Int(i)),
        }
    }

    fn from_dbl(d: f64) -> Self {
        Value {
            text: format_double(d),
            num: Some(Num::Dbl(d)),
        }
    }

    fn from_bool(b: bool) -> Self {
        Value::from_int(b as i64)
    }

    fn numeric(s: &str) -> Option<Num> {
        let t = s.trim();
        if t.is_empty() {
            return None;
        }
        if let Some(hex) = t
            .strip_prefix("0x")
            .or_else(|| t.strip_prefix("0X"))
            .or_else(|| t.strip_prefix("-0x").map(|_| &t[3..]))
        {
            let neg = t.starts_with('-');
            if let Ok(v) = i64::from_str_radix(hex, 16) {
                return Some(Num::Int(if neg { -v } else { v }));
            }
        }
        if let Ok(i) = t.parse::<i64>() {
            return Some(Num::Int(i));
        }
        if let Ok(d) = t.parse::<f64>() {
            // reject forms Rust accepts but Tcl does not treat as numbers
            if t.chars()
                .all(|c| c.is_ascii_digit() || "+-.eE".contains(c))
            {
                return Some(Num::Dbl(d));
            }
        }
        None
    }

    fn render(&self) -> String {
        self.text.clone()
    }
}

fn format_double(d: f64) -> String {
    if d.is_nan() {
        return "NaN".to_string();
    }
    if d.is_infinite() {
        return if d < 0.0 { "-Inf" } else { "Inf" }.to_string();
    }
    let s = format!("{d}");
    if s.contains('.') || s.contains('e') || s.contains('E') {
        s
    } else {
        format!("{s}.0")
    }
}

struct ExprParser {
    tokens: Vec<Tok>,
    pos: usize,
}

type VResult = Result<Value, Exception>;

impl ExprParser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn or_expr(&mut self) -> VResult {
        let mut v = self.and_expr()?;
        while self.eat(&Tok::Or) {
            let r = self.and_expr()?;
            v = Value::from_bool(truthy(&v.text)? || truthy(&r.text)?);
        }
        Ok(v)
    }

    fn and_expr(&mut self) -> VResult {
        let mut v = self.streq_expr()?;
        while self.eat(&Tok::And) {
            let r = self.streq_expr()?;
            v = Value::from_bool(truthy(&v.text)? && truthy(&r.text)?);
        }
        Ok(v)
    }

    fn streq_expr(&mut self) -> VResult {
        let mut v = self.eq_expr()?;
        loop {
            if self.eat(&Tok::StrEq) {
                let r = self.eq_expr()?;
                v = Value::from_bool(v.text == r.text);
            } else if self.eat(&Tok::StrNe) {
                let r = self.eq_expr()?;
                v = Value::from_bool(v.text != r.text);
            } else {
                return Ok(v);
            }
        }
    }

    fn eq_expr(&mut self) -> VResult {
        let mut v = self.rel_expr()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Eq) => Tok::Eq,
                Some(Tok::Ne) => Tok::Ne,
                _ => return Ok(v),
            };
            self.pos += 1;
            let r = self.rel_expr()?;
            let equal = match (v.num, r.num) {
                (Some(a), Some(b)) => num_cmp(a, b) == std::cmp::Ordering::Equal,
                _ => v.text == r.text,
            };
            v = Value::from_bool(if op == Tok::Eq { equal } else { !equal });
        }
    }

    fn rel_expr(&mut self) -> VResult {
        let mut v = self.add_expr()?;
        loop {
            let op = match self.peek() {
                Some(t @ (Tok::Lt | Tok::Le | Tok::Gt | Tok::Ge)) => t.clone(),
                _ => return Ok(v),
            };
            self.pos += 1;
            let r = self.add_expr()?;
            let ord = match (v.num, r.num) {
                (Some(a), Some(b)) => num_cmp(a, b),
                _ => v.text.cmp(&r.text),
            };
            use std::cmp::Ordering::*;
            let res = match op {
                Tok::Lt => ord == Less,
                Tok::Le => ord != Greater,
                Tok::Gt => ord == Greater,
                Tok::Ge => ord != Less,
                _ => unreachable!(),
            };
            v = Value::from_bool(res);
        }
    }

    fn add_expr(&mut self) -> VResult {
        let mut v = self.mul_expr()?;
        loop {
            let plus = match self.peek() {
                Some(Tok::Plus) => true,
                Some(Tok::Minus) => false,
                _ => return Ok(v),
            };
            self.pos += 1;
            let r = self.mul_expr()?;
            v = arith(&v, &r, if plus { "+" } else { "-" })?;
        }
    }

    fn mul_expr(&mut self) -> VResult {
        let mut v = self.unary_expr()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Star) => "*",
                Some(Tok::Slash) => "/",
                Some(Tok::Percent) => "%",
                _ => return Ok(v),
            };
            self.pos += 1;
            let r = self.unary_expr()?;
            v = arith(&v, &r, op)?;
        }
    }

    fn unary_expr(&mut self) -> VResult {
        if self.eat(&Tok::Not) {
            let v = self.unary_expr()?;
            return Ok(Value::from_bool(!truthy(&v.text)?));
        }
        if self.eat(&Tok::Minus) {
            let v = self.unary_expr()?;
            return match v.num {
                Some(Num::Int(i)) => Ok(Value::from_int(i.wrapping_neg())),
                Some(Num::Dbl(d)) => Ok(Value::from_dbl(-d)),
                None => Err(err!(
                    Type,
                    "can't use non-numeric string \"{}\" as operand of \"-\"",
                    v.text
                )
                .into()),
            };
        }
        if self.eat(&Tok::Plus) {
            let v = self.unary_expr()?;
            if v.num.is_none() {
                return Err(err!(
                    Type,
                    "can't use non-numeric string \"{}\" as operand of \"+\"",
                    v.text
                )
                .into());
            }
            return Ok(v);
        }
        self.primary()
    }

    fn primary(&mut self) -> VResult {
        match self.tokens.get(self.pos).cloned() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let v = self.or_expr()?;
                if !self.eat(&Tok::RParen) {
                    return Err(err!(ExprSyntax, "missing close parenthesis").into());
                }
                Ok(v)
            }
            Some(Tok::Operand(s)) => {
                self.pos += 1;
                Ok(Value::from_text(s))
            }
            _ => Err(err!(ExprSyntax, "syntax error in expression").into()),
        }
    }
}

fn num_cmp(a: Num, b: Num) -> std::cmp::Ordering {
    match (a, b) {
        (Num::Int(x), Num::Int(y)) => x.cmp(&y),
        (x, y) => {
            let (x, y) = (to_f64(x), to_f64(y));
            x.partial_cmp(&y).unwrap_or(std::cmp::Ordering::Equal)
        }
    }
}

fn to_f64(n: Num) -> f64 {
    match n {
        Num::Int(i) => i as f64,
        Num::Dbl(d) => d,
    }
}

fn arith(l: &Value, r: &Value, op: &str) -> VResult {
    let (a, b) = match (l.num, r.num) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            let bad = if l.num.is_none() { &l.text } else { &r.text };
            return Err(err!(
                Type,
                "can't use non-numeric string \"{bad}\" as operand of \"{op}\""
            )
            .into());
        }
    };
    match (a, b) {
        (Num::Int(x), Num::Int(y)) => {
            let v = match op {
                "+" => x.wrapping_add(y),
                "-" => x.wrapping_sub(y),
                "*" => x.wrapping_mul(y),
                "/" | "%" => {
                    if y == 0 {
                        return Err(err!(Type, "divide by zero").into());
                    }
                    // Tcl semantics: quotient floors, remainder follows the
                    // divisor's sign.
                    let mut q = x.wrapping_div(y);
                    let rem = x.wrapping_rem(y);
                    if rem != 0 && ((x < 0) != (y < 0)) {
                        q -= 1;
                    }
                    if op == "/" {
                        q
                    } else {
                        x.wrapping_sub(q.wrapping_mul(y))
                    }
                }
                _ => unreachable!(),
            };
            Ok(Value::from_int(v))
        }
        (a, b) => {
            let (x, y) = (to_f64(a), to_f64(b));
            let v = match op {
                "+" => x + y,
                "-" => x - y,
                "*" => x * y,
                "/" => {
                    if y == 0.0 {
                        return Err(err!(Type, "divide by zero").into());
                    }
                    x / y
                }
                "%" => {
                    return Err(err!(
                        Type,
                        "can't use floating-point value as operand of \"%\""
                    )
                    .into())
                }
                _ => unreachable!(),
            };
            Ok(Value::from_dbl(v))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::ErrorKind;
    use crate::tclish::Interp;

    fn ev(interp: &mut Interp, s: &str) -> String {
        eval_expr(interp, s).unwrap()
    }

    #[test]
    fn arithmetic_and_comparison() {
        let mut i = Interp::new();
        assert_eq!(ev(&mut i, "1 + 2"), "3");
        assert_eq!(ev(&mut i, "2 * (3 + 4)"), "14");
        assert_eq!(ev(&mut i, "1 == 2"), "0");
        assert_eq!(ev(&mut i, "7 / 2"), "3");
        assert_eq!(ev(&mut i, "-7 / 2"), "-4");
        assert_eq!(ev(&mut i, "-7 % 2"), "1");
        assert_eq!(ev(&mut i, "7 % -2"), "-1");
        assert_eq!(ev(&mut i, "1.5 + 1.5"), "3.0");
        assert_eq!(ev(&mut i, "10 > 9"), "1");
    }

    #[test]
    fn string_operators() {
        let mut i = Interp::new();
        i.set_var("tool", "nvc").unwrap();
        assert_eq!(ev(&mut i, "$tool eq \"nvc\""), "1");
        assert_eq!(ev(&mut i, "$tool ne \"ghdl\""), "1");
        assert_eq!(ev(&mut i, "\"abc\" == \"abc\""), "1");
        assert_eq!(ev(&mut i, "\"abc\" < \"abd\""), "1");
    }

    #[test]
    fn var_and_cmd_substitution() {
        let mut i = Interp::new();
        i.set_var("argCount", "2").unwrap();
        assert_eq!(ev(&mut i, "$argCount > 1"), "1");
        assert_eq!(ev(&mut i, "[expr 2 + 2] == 4"), "1");
    }

    #[test]
    fn logical_and_bool_words() {
        let mut i = Interp::new();
        assert_eq!(ev(&mut i, "1 && 0"), "0");
        assert_eq!(ev(&mut i, "!0"), "1");
        assert_eq!(ev(&mut i, "true && on"), "1");
        assert_eq!(ev(&mut i, "0 || 2"), "1");
    }

    #[test]
    fn type_error_on_non_numeric_arithmetic() {
        let mut i = Interp::new();
        let e = match eval_expr(&mut i, "\"abc\" + 1") {
            Err(Exception::Error(e)) => e,
            other => panic!("expected error, got {other:?}"),
        };
        assert_eq!(e.kind, ErrorKind::Type);
    }

    #[test]
    fn divide_by_zero() {
        let mut i = Interp::new();
        let e = match eval_expr(&mut i, "1 / 0") {
            Err(Exception::Error(e)) => e,
            other => panic!("expected error, got {other:?}"),
        };
        assert_eq!(e.msg, "divide by zero");
    }

    #[test]
    fn float_formatting() {
        assert_eq!(format_double(7.0), "7.0");
        assert_eq!(format_double(0.1 + 0.2), "0.30000000000000004");
    }
}
