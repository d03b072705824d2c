//! Grammar-aware identifier extraction with tree-sitter.

use std::cell::RefCell;
use std::collections::HashMap;

use tree_sitter::{Node, Parser, Tree};

use super::lexer;
use crate::language::Language;

const IDENTIFIER_KINDS: &[&str] = &[
    "identifier",
    "type_identifier",
    "field_identifier",
    "namespace_identifier",
    "statement_identifier",
    // C# lambda parameter without a declared type
    "implicit_parameter",
];

/// C# directives whose argument is free text, not code.
const TEXT_DIRECTIVES: &[&str] = &[
    "preproc_region",
    "preproc_endregion",
    "preproc_pragma",
    "preproc_warning",
    "preproc_error",
    "preproc_line",
    "preproc_nullable",
];

fn ts_language(language: Language) -> tree_sitter::Language {
    match language {
        Language::Java => tree_sitter_java::LANGUAGE.into(),
        Language::Python => tree_sitter_python::LANGUAGE.into(),
        Language::C => tree_sitter_c::LANGUAGE.into(),
        Language::Cpp => tree_sitter_cpp::LANGUAGE.into(),
        Language::Csharp => tree_sitter_c_sharp::LANGUAGE.into(),
    }
}

thread_local! {
    static PARSERS: RefCell<HashMap<Language, Parser>> = RefCell::new(HashMap::new());
}

fn parse(src: &str, language: Language) -> Option<Tree> {
    PARSERS.with(|cell| {
        let mut parsers = cell.borrow_mut();
        let parser = parsers.entry(language).or_insert_with(|| {
            let mut p = Parser::new();
            p.set_language(&ts_language(language))
                .expect("bundled grammar matches the tree-sitter ABI");
            p
        });
        parser.parse(src, None)
    })
}

fn is_opaque(kind: &str) -> bool {
    kind.contains("comment")
        || kind.contains("string")
        || kind.ends_with("literal")
        || kind == "char_literal"
        || TEXT_DIRECTIVES.contains(&kind)
}

/// Identifiers from a clean parse, or `None` if the file has syntax errors.
pub(crate) struct GrammarExtraction {
    pub identifiers: Vec<String>,
    pub declared_package: Option<String>,
}

pub(crate) fn extract(src: &str, language: Language) -> Option<GrammarExtraction> {
    let tree = parse(src, language)?;
    let root = tree.root_node();
    if root.has_error() {
        return None;
    }
    let bytes = src.as_bytes();
    let mut identifiers = Vec::new();
    let mut declared_package = None;
    let mut stack: Vec<Node> = vec![root];
    // depth-first, children pushed in reverse so output follows source order
    while let Some(node) = stack.pop() {
        let kind = node.kind();
        if is_opaque(kind) {
            continue;
        }
        if declared_package.is_none() {
            declared_package = package_of(node, language, bytes);
        }
        if kind == "preproc_arg" {
            let text = node.utf8_text(bytes).unwrap_or_default();
            identifiers.extend(lexer::scan_identifiers(text, language));
            continue;
        }
        if node.is_named() && IDENTIFIER_KINDS.contains(&kind) {
            if let Ok(text) = node.utf8_text(bytes) {
                identifiers.push(text.to_string());
            }
            continue;
        }
        let mut cursor = node.walk();
        let children: Vec<Node> = node.children(&mut cursor).collect();
        stack.extend(children.into_iter().rev());
    }
    Some(GrammarExtraction {
        identifiers,
        declared_package,
    })
}

fn package_of(node: Node, language: Language, bytes: &[u8]) -> Option<String> {
    let name = match (language, node.kind()) {
        (Language::Java, "package_declaration") => {
            let mut cursor = node.walk();
            let found = node
                .named_children(&mut cursor)
                .find(|c| matches!(c.kind(), "scoped_identifier" | "identifier"));
            found?
        }
        (Language::Csharp, "namespace_declaration" | "file_scoped_namespace_declaration") => {
            node.child_by_field_name("name")?
        }
        _ => return None,
    };
    let text = name.utf8_text(bytes).ok()?;
    Some(text.chars().filter(|c| !c.is_whitespace()).collect())
}
