//! Shared fixtures for the benchmarks in `benches/`.

use normval_core::corpus;
use normval_core::document::BuiltDefinition;
use normval_core::galois::GaloisExtension;
use normval_core::linalg::Vector;

/// A bundled definition with one of its extensions and a parsed element.
pub struct Fixture {
    pub def: BuiltDefinition,
    pub ext: GaloisExtension,
    pub x: Vector,
}

pub fn fixture(name: &str, top: &str, bottom: &str, element: &str) -> Fixture {
    let def = corpus::load(name).expect("bundled definition");
    let ext = def.extension(top, bottom).expect("declared pair");
    let x = def.parse_element(element).expect("element parses");
    Fixture { def, ext, x }
}

/// The element of the z32 example, in `Q2(ζ32)` over `Q2(√-2)`.
pub fn z32() -> Fixture {
    fixture("z32", "top", "K", "z^9 - (z^4 + z^12)*z^3 - z")
}
