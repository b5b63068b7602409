//! Bundled scenarios and fixture-path resolution.
//!
//! A name is resolved as an existing path, then the path with `.toml`
//! appended, then a file in the directory named by [`FIXTURE_DIR_VAR`], then a
//! bundled fixture. A leading `fixtures/` is ignored for the last two.

use std::path::{Path, PathBuf};

use super::{Result, Scenario, ScenarioError};

/// Environment variable naming an extra fixture directory.
pub const FIXTURE_DIR_VAR: &str = "INFLUENCE_FIXTURES";

pub const NAMES: [&str; 5] = [
    "three_agent",
    "three_agent_violated",
    "fig6_caseA",
    "fig6_caseB",
    "strong_three",
];

/// TOML text of a bundled fixture.
pub fn source(name: &str) -> Option<&'static str> {
    Some(match name {
        "three_agent" => include_str!("../../fixtures/three_agent.toml"),
        "three_agent_violated" => include_str!("../../fixtures/three_agent_violated.toml"),
        "fig6_caseA" => include_str!("../../fixtures/fig6_caseA.toml"),
        "fig6_caseB" => include_str!("../../fixtures/fig6_caseB.toml"),
        "strong_three" => include_str!("../../fixtures/strong_three.toml"),
        _ => return None,
    })
}

/// Loads a bundled fixture by name.
pub fn load(name: &str) -> Result<Scenario> {
    let text = source(name).ok_or_else(|| ScenarioError::UnknownFixture(name.to_string()))?;
    Scenario::from_toml_str(text)
}

/// Loads a scenario from a path or fixture name.
pub fn resolve(name: &str) -> Result<Scenario> {
    let path = Path::new(name);
    if path.is_file() {
        return super::load(path);
    }
    let with_ext = PathBuf::from(format!("{name}.toml"));
    if with_ext.is_file() {
        return super::load(with_ext);
    }
    let bare = name.strip_prefix("fixtures/").unwrap_or(name);
    let bare = bare.strip_suffix(".toml").unwrap_or(bare);
    if let Some(dir) = std::env::var_os(FIXTURE_DIR_VAR) {
        let candidate = Path::new(&dir).join(format!("{bare}.toml"));
        if candidate.is_file() {
            return super::load(candidate);
        }
    }
    match source(bare) {
        Some(_) => load(bare),
        None => Err(ScenarioError::Io {
            path: name.to_string(),
            source: std::io::Error::new(
                std::io::ErrorKind::NotFound,
                "no such scenario file or fixture",
            ),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_fixture_loads() {
        for name in NAMES {
            let s = load(name).unwrap();
            assert_eq!(s.name, name);
        }
    }

    #[test]
    fn resolution() {
        assert_eq!(resolve("fixtures/three_agent").unwrap().name, "three_agent");
        assert_eq!(resolve("fig6_caseB.toml").unwrap().name, "fig6_caseB");
        assert!(matches!(
            load("nope"),
            Err(ScenarioError::UnknownFixture(_))
        ));
        assert!(matches!(resolve("nope"), Err(ScenarioError::Io { .. })));
    }
}
