//! Bundled definition documents.

use crate::document::{BuiltDefinition, FieldDefinitionDocument};
use crate::error::{Error, Result};

const SOURCES: [(&str, &str); 7] = [
    ("z32", include_str!("../data/z32.toml")),
    ("cp2", include_str!("../data/cp2.toml")),
    ("quadratic-q2", include_str!("../data/quadratic-q2.toml")),
    ("equal-char", include_str!("../data/equal-char.toml")),
    ("equal-char-f3", include_str!("../data/equal-char-f3.toml")),
    ("q3-zeta9", include_str!("../data/q3-zeta9.toml")),
    ("q2-zeta12", include_str!("../data/q2-zeta12.toml")),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    SOURCES.iter().map(|s| s.0)
}

pub fn source(name: &str) -> Option<&'static str> {
    SOURCES.iter().find(|s| s.0 == name).map(|s| s.1)
}

pub fn document(name: &str) -> Result<FieldDefinitionDocument> {
    let src = source(name).ok_or_else(|| Error::Invalid(format!("no bundled document `{name}`")))?;
    FieldDefinitionDocument::from_toml(src)
}

pub fn load(name: &str) -> Result<BuiltDefinition> {
    document(name)?.build()
}
