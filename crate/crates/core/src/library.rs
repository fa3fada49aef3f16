//! Built-in polynomial systems.

use crate::poly::{parse_system, SystemTemplate};

const SOURCES: &[(&str, &str, &str)] = &[
    ("linear", "a x + b", include_str!("../systems/linear.sys")),
    ("univariate", "a x^2 + b x + c", include_str!("../systems/univariate.sys")),
    ("two_conics", "two conics with 4 roots", include_str!("../systems/two_conics.sys")),
    ("three_quadrics", "three dense quadrics in 3 unknowns, 8 roots", include_str!("../systems/three_quadrics.sys")),
    ("example1", "bivariate system with a sextic and a conic", include_str!("../systems/example1.sys")),
    ("zero_root", "two equations with a root at x = 0", include_str!("../systems/zero_root.sys")),
];

/// Names of the built-in systems.
pub fn names() -> Vec<&'static str> {
    SOURCES.iter().map(|s| s.0).collect()
}

/// (name, summary) pairs.
pub fn entries() -> Vec<(&'static str, &'static str)> {
    SOURCES.iter().map(|s| (s.0, s.1)).collect()
}

pub fn source(name: &str) -> Option<&'static str> {
    SOURCES.iter().find(|s| s.0 == name).map(|s| s.2)
}

pub fn get(name: &str) -> Option<SystemTemplate> {
    source(name).map(|text| parse_system(text).expect("built-in systems parse"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_parse() {
        for n in names() {
            let s = get(n).unwrap();
            s.validate().unwrap();
        }
        assert_eq!(get("three_quadrics").unwrap().slots().len(), 30);
        assert!(get("nope").is_none());
    }
}
