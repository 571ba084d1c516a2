//! Minimal glob matching over `*` and `?`, used for core/target filtering
//! and the `string match` builtin.

/// Match `text` against `pattern`. `*` matches any run of characters
/// (including `::` separators), `?` matches exactly one character.
pub fn glob_match(pattern: &str, text: &str) -> bool {
    let p: Vec<char> = pattern.chars().collect();
    let t: Vec<char> = text.chars().collect();
    let (mut pi, mut ti) = (0usize, 0usize);
    let mut star: Option<(usize, usize)> = None;

    while ti < t.len() {
        if pi < p.len() && (p[pi] == '?' || p[pi] == t[ti]) {
            pi += 1;
            ti += 1;
        } else if pi < p.len() && p[pi] == '*' {
            star = Some((pi, ti));
            pi += 1;
        } else if let Some((sp, st)) = star {
            pi = sp + 1;
            ti = st + 1;
            star = Some((sp, st + 1));
        } else {
            return false;
        }
    }
    while pi < p.len() && p[pi] == '*' {
        pi += 1;
    }
    pi == p.len()
}

#[cfg(test)]
mod tests {
    use super::glob_match;

    #[test]
    fn literal_and_wildcards() {
        assert!(glob_match("abc", "abc"));
        assert!(!glob_match("abc", "abd"));
        assert!(glob_match("a*c", "abbbc"));
        assert!(glob_match("*", ""));
        assert!(glob_match("a?c", "abc"));
        assert!(!glob_match("a?c", "ac"));
    }

    #[test]
    fn star_crosses_path_separators() {
        assert!(glob_match("lib::pkg1::*", "lib::pkg1::d-flip-flop"));
        assert!(!glob_match("lib::pkg1::*", "lib::pkg2::jk-flip-flop"));
        assert!(glob_match("*sync*", "vhdl::simple::edge-detector::tb-sync"));
    }

    #[test]
    fn backtracking() {
        assert!(glob_match("*a*b", "xaxaxb"));
        assert!(!glob_match("*a*b", "xaxax"));
        assert!(glob_match("**x", "x"));
    }
}
