use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Source languages the extractor has grammars for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Language {
    Java,
    Python,
    C,
    Cpp,
    Csharp,
}

impl Language {
    pub const ALL: [Language; 5] = [
        Language::Java,
        Language::Python,
        Language::C,
        Language::Cpp,
        Language::Csharp,
    ];

    /// File extensions (without the dot) that belong to this language.
    pub fn extensions(self) -> &'static [&'static str] {
        match self {
            Language::Java => &["java"],
            Language::Python => &["py"],
            Language::C => &["c", "h"],
            Language::Cpp => &["cc", "cpp", "hpp", "h"],
            Language::Csharp => &["cs"],
        }
    }

    pub fn matches_extension(self, ext: &str) -> bool {
        self.extensions().contains(&ext)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Language::Java => "java",
            Language::Python => "python",
            Language::C => "c",
            Language::Cpp => "cpp",
            Language::Csharp => "csharp",
        }
    }

    /// Whether the language has a package declaration that overrides the
    /// directory-derived package.
    pub fn declares_packages(self) -> bool {
        matches!(self, Language::Java | Language::Csharp)
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unsupported language `{0}` (expected one of java, python, c, cpp, csharp)")]
pub struct UnknownLanguage(pub String);

impl FromStr for Language {
    type Err = UnknownLanguage;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "java" => Ok(Language::Java),
            "python" | "py" => Ok(Language::Python),
            "c" => Ok(Language::C),
            "cpp" | "c++" | "cxx" => Ok(Language::Cpp),
            "csharp" | "c#" | "cs" => Ok(Language::Csharp),
            other => Err(UnknownLanguage(other.to_string())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_aliases() {
        assert_eq!("C++".parse::<Language>().unwrap(), Language::Cpp);
        assert_eq!("c#".parse::<Language>().unwrap(), Language::Csharp);
        assert!("rust".parse::<Language>().is_err());
    }

    #[test]
    fn header_extension_is_shared_by_c_and_cpp() {
        assert!(Language::C.matches_extension("h"));
        assert!(Language::Cpp.matches_extension("h"));
        assert!(!Language::Java.matches_extension("h"));
    }
}
