//! The six worked examples, embedded as scenario files.

use crate::io::{ScenarioError, ScenarioFile};
use crate::thresholds::Classification;

/// Steps written out for plotting.
pub const TRAJECTORY_STEPS: usize = 2000;
/// Steps simulated for the attractivity check.
pub const ATTRACTIVITY_STEPS: usize = 5000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Preset {
    pub name: &'static str,
    pub expected: Classification,
    toml: &'static str,
}

pub const PRESETS: [Preset; 6] = [
    Preset {
        name: "np-extinction",
        expected: Classification::Extinction,
        toml: include_str!("../presets/np-extinction.toml"),
    },
    Preset {
        name: "np-persistence",
        expected: Classification::StrongPersistence,
        toml: include_str!("../presets/np-persistence.toml"),
    },
    Preset {
        name: "periodic-extinction",
        expected: Classification::Extinction,
        toml: include_str!("../presets/periodic-extinction.toml"),
    },
    Preset {
        name: "periodic-persistence",
        expected: Classification::StrongPersistence,
        toml: include_str!("../presets/periodic-persistence.toml"),
    },
    Preset {
        name: "autonomous-extinction",
        expected: Classification::Extinction,
        toml: include_str!("../presets/autonomous-extinction.toml"),
    },
    Preset {
        name: "autonomous-persistence",
        expected: Classification::StrongPersistence,
        toml: include_str!("../presets/autonomous-persistence.toml"),
    },
];

pub fn preset(name: &str) -> Option<Preset> {
    PRESETS.iter().copied().find(|p| p.name == name)
}

pub fn preset_names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|p| p.name)
}

impl Preset {
    pub fn toml(&self) -> &'static str {
        self.toml
    }

    pub fn file(&self) -> Result<ScenarioFile, ScenarioError> {
        ScenarioFile::parse(self.toml)
    }

    /// No predation on susceptible prey.
    pub fn is_no_predation(&self) -> bool {
        self.name.starts_with("np-")
    }
}
