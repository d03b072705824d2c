//! Lexical identifier scanner used when a file does not parse cleanly.
//!
//! It skips comments, string/char literals and numbers per language and
//! returns identifier-shaped words that are not language keywords. On
//! well-formed files it yields the same identifier multiset as the grammar
//! path.

use crate::language::Language;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Token {
    Word(String),
    Punct(char),
}

const JAVA_KEYWORDS: &[&str] = &[
    "abstract", "assert", "boolean", "break", "byte", "case", "catch", "char", "class", "const",
    "continue", "default", "do", "double", "else", "enum", "extends", "final", "finally", "float",
    "for", "goto", "if", "implements", "import", "instanceof", "int", "interface", "long",
    "native", "new", "package", "private", "protected", "public", "return", "short", "static",
    "strictfp", "super", "switch", "synchronized", "this", "throw", "throws", "transient", "try",
    "void", "volatile", "while", "true", "false", "null",
];

const PYTHON_KEYWORDS: &[&str] = &[
    "False", "None", "True", "and", "as", "assert", "async", "await", "break", "class", "continue",
    "def", "del", "elif", "else", "except", "finally", "for", "from", "global", "if", "import",
    "in", "is", "lambda", "nonlocal", "not", "or", "pass", "raise", "return", "try", "while",
    "with", "yield",
];

const C_KEYWORDS: &[&str] = &[
    "auto", "break", "case", "char", "const", "continue", "default", "do", "double", "else",
    "enum", "extern", "float", "for", "goto", "if", "inline", "int", "long", "register",
    "restrict", "return", "short", "signed", "sizeof", "static", "struct", "switch", "typedef",
    "union", "unsigned", "void", "volatile", "while", "_Bool", "_Complex", "_Atomic", "_Alignas",
    "_Alignof", "_Noreturn", "_Static_assert", "_Thread_local", "bool", "true", "false", "NULL",
    "nullptr", "defined", "size_t", "ssize_t", "ptrdiff_t", "intptr_t", "uintptr_t", "charptr_t",
    "int8_t", "int16_t", "int32_t", "int64_t", "uint8_t", "uint16_t", "uint32_t", "uint64_t",
    "char8_t", "char16_t", "char32_t", "wchar_t",
];

const CPP_EXTRA_KEYWORDS: &[&str] = &[
    "alignas", "alignof", "and", "and_eq", "asm", "bitand", "bitor", "catch", "class", "compl",
    "concept", "consteval", "constexpr", "constinit", "const_cast", "co_await", "co_return",
    "co_yield", "decltype", "delete", "dynamic_cast", "explicit", "export", "final", "friend",
    "mutable", "namespace", "new", "noexcept", "not", "not_eq", "operator", "or", "or_eq",
    "override", "private", "protected", "public", "reinterpret_cast", "requires", "static_assert",
    "static_cast", "template", "this", "thread_local", "throw", "try", "typeid", "typename",
    "using", "virtual", "xor", "xor_eq",
];

const CSHARP_KEYWORDS: &[&str] = &[
    "abstract", "as", "base", "bool", "break", "byte", "case", "catch", "char", "checked", "class",
    "const", "continue", "decimal", "default", "delegate", "do", "double", "else", "enum", "event",
    "explicit", "extern", "false", "finally", "fixed", "float", "for", "foreach", "goto", "if",
    "implicit", "in", "int", "interface", "internal", "is", "lock", "long", "namespace", "new",
    "null", "object", "operator", "out", "override", "params", "private", "protected", "public",
    "readonly", "ref", "return", "sbyte", "sealed", "short", "sizeof", "stackalloc", "static",
    "string", "struct", "switch", "this", "throw", "true", "try", "typeof", "uint", "ulong",
    "unchecked", "unsafe", "ushort", "using", "virtual", "void", "volatile", "while", "var", "get",
    "set", "init", "add", "remove", "async", "await", "yield", "partial", "where", "record",
];

pub(crate) fn is_keyword(word: &str, language: Language) -> bool {
    match language {
        Language::Java => JAVA_KEYWORDS.contains(&word),
        Language::Python => PYTHON_KEYWORDS.contains(&word),
        Language::C => C_KEYWORDS.contains(&word),
        Language::Cpp => C_KEYWORDS.contains(&word) || CPP_EXTRA_KEYWORDS.contains(&word),
        Language::Csharp => CSHARP_KEYWORDS.contains(&word),
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

fn is_python_string_prefix(word: &str) -> bool {
    word.len() <= 2 && word.chars().all(|c| matches!(c.to_ascii_lowercase(), 'r' | 'b' | 'u' | 'f'))
}

fn is_c_string_prefix(word: &str) -> bool {
    matches!(word, "L" | "u" | "U" | "u8")
}

fn is_cpp_raw_prefix(word: &str) -> bool {
    matches!(word, "R" | "LR" | "uR" | "UR" | "u8R")
}

struct Scanner {
    chars: Vec<char>,
    pos: usize,
    language: Language,
}

impl Scanner {
    fn new(src: &str, language: Language) -> Self {
        Scanner {
            chars: src.chars().collect(),
            pos: 0,
            language,
        }
    }

    fn peek(&self, off: usize) -> Option<char> {
        self.chars.get(self.pos + off).copied()
    }

    fn skip_line(&mut self) {
        while let Some(c) = self.peek(0) {
            if c == '\n' {
                break;
            }
            self.pos += 1;
        }
    }

    fn skip_block_comment(&mut self) {
        self.pos += 2;
        while self.pos < self.chars.len() {
            if self.peek(0) == Some('*') && self.peek(1) == Some('/') {
                self.pos += 2;
                return;
            }
            self.pos += 1;
        }
    }

    fn count_run(&self, q: char) -> usize {
        let mut n = 0;
        while self.peek(n) == Some(q) {
            n += 1;
        }
        n
    }

    /// Skips a quoted literal starting at the current quote character.
    /// `verbatim` disables backslash escapes and treats a doubled quote as
    /// an escaped quote (C# `@"..."`).
    fn skip_quoted(&mut self, verbatim: bool) {
        let q = self.peek(0).expect("at quote");
        let run = self.count_run(q);
        let triple_ok = matches!(self.language, Language::Python | Language::Java | Language::Csharp)
            && q == '"'
            || (self.language == Language::Python && q == '\'');
        if run >= 3 && triple_ok {
            self.pos += run;
            while self.pos < self.chars.len() {
                if self.peek(0) == Some('\\') && !verbatim && self.language != Language::Csharp {
                    self.pos += 2;
                    continue;
                }
                if self.count_run(q) >= run {
                    self.pos += run;
                    return;
                }
                self.pos += 1;
            }
            return;
        }
        self.pos += 1;
        while let Some(c) = self.peek(0) {
            if verbatim {
                if c == q {
                    if self.peek(1) == Some(q) {
                        self.pos += 2;
                        continue;
                    }
                    self.pos += 1;
                    return;
                }
            } else if c == '\\' {
                self.pos += 2;
                continue;
            } else if c == q {
                self.pos += 1;
                return;
            } else if c == '\n' {
                // unterminated literal: stop at end of line
                return;
            }
            self.pos += 1;
        }
    }

    fn skip_cpp_raw_string(&mut self) {
        // at the opening quote of R"delim( ... )delim"
        self.pos += 1;
        let mut delim = String::new();
        while let Some(c) = self.peek(0) {
            self.pos += 1;
            if c == '(' {
                break;
            }
            delim.push(c);
        }
        let close: Vec<char> = format!("){delim}\"").chars().collect();
        while self.pos < self.chars.len() {
            if self.chars[self.pos..].starts_with(&close) {
                self.pos += close.len();
                return;
            }
            self.pos += 1;
        }
    }

    fn skip_csharp_interpolated(&mut self, verbatim: bool) {
        // at the opening quote; braces may nest quoted expressions, which we skip wholesale
        let q = '"';
        let run = self.count_run(q);
        if run >= 3 {
            self.skip_quoted(true);
            return;
        }
        self.pos += 1;
        let mut depth = 0usize;
        while let Some(c) = self.peek(0) {
            match c {
                '\\' if !verbatim && depth == 0 => {
                    self.pos += 2;
                    continue;
                }
                '{' if self.peek(1) == Some('{') && depth == 0 => self.pos += 1,
                '{' => depth += 1,
                '}' if depth > 0 => depth -= 1,
                '"' if depth > 0 => {
                    self.skip_quoted(false);
                    continue;
                }
                '"' if verbatim && self.peek(1) == Some('"') => self.pos += 1,
                '"' => {
                    self.pos += 1;
                    return;
                }
                _ => {}
            }
            self.pos += 1;
        }
    }

    fn at_line_start(&self) -> bool {
        let mut i = self.pos;
        while i > 0 {
            i -= 1;
            match self.chars[i] {
                '\n' => return true,
                ' ' | '\t' | '\r' => continue,
                _ => return false,
            }
        }
        true
    }

    fn read_word(&mut self) -> String {
        let start = self.pos;
        while self.peek(0).is_some_and(is_ident_continue) {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn handle_directive(&mut self) {
        // at '#'
        self.pos += 1;
        while matches!(self.peek(0), Some(' ') | Some('\t')) {
            self.pos += 1;
        }
        let directive = self.read_word();
        let skip_rest = match self.language {
            Language::C | Language::Cpp => directive == "include",
            Language::Csharp => matches!(
                directive.as_str(),
                "region" | "endregion" | "pragma" | "warning" | "error" | "line" | "nullable"
            ),
            _ => false,
        };
        if skip_rest {
            self.skip_line();
        }
    }

    fn tokens(mut self) -> Vec<Token> {
        let mut tokens = Vec::new();
        let c_family = self.language != Language::Python;
        while let Some(c) = self.peek(0) {
            if c_family && c == '/' && self.peek(1) == Some('/') {
                self.skip_line();
            } else if c_family && c == '/' && self.peek(1) == Some('*') {
                self.skip_block_comment();
            } else if self.language == Language::Python && c == '#' {
                self.skip_line();
            } else if c == '#'
                && matches!(self.language, Language::C | Language::Cpp | Language::Csharp)
                && self.at_line_start()
            {
                self.handle_directive();
            } else if c == '"' || c == '\'' {
                self.skip_quoted(false);
            } else if self.language == Language::Csharp && (c == '@' || c == '$') {
                let mut verbatim = false;
                let mut interpolated = false;
                let mut n = 0;
                while let Some(p) = self.peek(n) {
                    match p {
                        '@' => verbatim = true,
                        '$' => interpolated = true,
                        _ => break,
                    }
                    n += 1;
                }
                if self.peek(n) == Some('"') {
                    self.pos += n;
                    if interpolated {
                        self.skip_csharp_interpolated(verbatim);
                    } else {
                        self.skip_quoted(verbatim);
                    }
                } else {
                    self.pos += 1;
                }
            } else if c.is_ascii_digit() {
                while self
                    .peek(0)
                    .is_some_and(|d| is_ident_continue(d) || d == '.' || (d == '\'' && self.language == Language::Cpp))
                {
                    self.pos += 1;
                }
            } else if is_ident_start(c) {
                let word = self.read_word();
                let next = self.peek(0);
                let prefixed_string = match self.language {
                    Language::Python => is_python_string_prefix(&word) && matches!(next, Some('"') | Some('\'')),
                    Language::C | Language::Cpp => {
                        is_c_string_prefix(&word) && matches!(next, Some('"') | Some('\''))
                    }
                    _ => false,
                };
                if prefixed_string {
                    self.skip_quoted(false);
                } else if self.language == Language::Cpp && is_cpp_raw_prefix(&word) && next == Some('"') {
                    self.skip_cpp_raw_string();
                } else {
                    tokens.push(Token::Word(word));
                }
            } else if c.is_whitespace() {
                self.pos += 1;
            } else {
                tokens.push(Token::Punct(c));
                self.pos += 1;
            }
        }
        tokens
    }
}

pub(crate) fn scan_tokens(src: &str, language: Language) -> Vec<Token> {
    Scanner::new(src, language).tokens()
}

/// Identifier-shaped words in source order, minus language keywords.
pub fn scan_identifiers(src: &str, language: Language) -> Vec<String> {
    let tokens = scan_tokens(src, language);
    let mut out = Vec::new();
    for (i, t) in tokens.iter().enumerate() {
        let Token::Word(w) = t else { continue };
        // `std::size_t` names a type even though bare `size_t` is builtin
        let qualified = language == Language::Cpp
            && i >= 2
            && tokens[i - 1] == Token::Punct(':')
            && tokens[i - 2] == Token::Punct(':');
        if qualified || !is_keyword(w, language) {
            out.push(w.clone());
        }
    }
    out
}

/// Best-effort package/namespace declaration from the token stream.
pub fn scan_declared_package(src: &str, language: Language) -> Option<String> {
    let introducer = match language {
        Language::Java => "package",
        Language::Csharp => "namespace",
        _ => return None,
    };
    let tokens = scan_tokens(src, language);
    let start = tokens
        .iter()
        .position(|t| matches!(t, Token::Word(w) if w == introducer))?;
    let mut parts = Vec::new();
    for t in &tokens[start + 1..] {
        match t {
            Token::Word(w) => parts.push(w.as_str()),
            Token::Punct('.') => {}
            _ => break,
        }
    }
    if parts.is_empty() {
        None
    } else {
        Some(parts.join("."))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn java_comments_strings_keywords() {
        let src = r#"
            package com.x.ui; // trailing
            /* block ImageIcon */
            class ImageButton { int pixelCount; String s = "not_this \" nor this"; char c = '"'; long n = 0x1FL; }
        "#;
        assert_eq!(
            scan_identifiers(src, Language::Java),
            ["com", "x", "ui", "ImageButton", "pixelCount", "String", "s", "c", "n"]
        );
        assert_eq!(scan_declared_package(src, Language::Java).as_deref(), Some("com.x.ui"));
    }

    #[test]
    fn python_prefixed_and_triple_strings() {
        let src = "def run(self):\n    \"\"\"doc words\"\"\"\n    x = f\"{hidden}\" + rb'raw' + r\"\\\"q\"\n    return x # tail\n";
        assert_eq!(scan_identifiers(src, Language::Python), ["run", "self", "x", "x"]);
    }

    #[test]
    fn c_preprocessor_include_is_skipped() {
        let src = "#include <stdio.h>\n#define MAX_SIZE limit\nsize_t draw(const char *name) { return L'x'; }\n";
        assert_eq!(
            scan_identifiers(src, Language::C),
            ["MAX_SIZE", "limit", "draw", "name"]
        );
    }

    #[test]
    fn cpp_raw_string() {
        let src = "auto s = R\"xy(hidden \" )\" words)xy\"; int visible;";
        assert_eq!(scan_identifiers(src, Language::Cpp), ["s", "visible"]);
    }

    #[test]
    fn csharp_verbatim_and_interpolated() {
        let src = "namespace Foo.Bar { class A { string p = @\"c:\\x\"\"y\"; string q = $\"{Hidden(\"z\")} text\"; } }";
        assert_eq!(scan_identifiers(src, Language::Csharp), ["Foo", "Bar", "A", "p", "q"]);
        assert_eq!(scan_declared_package(src, Language::Csharp).as_deref(), Some("Foo.Bar"));
    }
}
