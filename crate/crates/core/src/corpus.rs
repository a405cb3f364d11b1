//! Bundled problem documents: the worked examples and a few companions.

use crate::document::{DocumentError, ParsedProblem, ProblemDocument};

/// `(name, problem JSON)`.
pub const PROBLEMS: &[(&str, &str)] = &[
    ("negative_frequency", include_str!("../corpus/negative_frequency.json")),
    ("resonant", include_str!("../corpus/resonant.json")),
    ("resonant_half", include_str!("../corpus/resonant_half.json")),
    ("gaussian_roots", include_str!("../corpus/gaussian_roots.json")),
    ("triple_root", include_str!("../corpus/triple_root.json")),
    ("no_solutions", include_str!("../corpus/no_solutions.json")),
    ("mixed_signs", include_str!("../corpus/mixed_signs.json")),
];

/// `(name, solution-document JSON)` candidates used by the verify examples.
pub const CANDIDATES: &[(&str, &str)] = &[
    ("resonant", include_str!("../corpus/resonant.candidate.json")),
    ("triple_root_z2", include_str!("../corpus/triple_root_z2.candidate.json")),
    ("mixed_signs", include_str!("../corpus/mixed_signs.candidate.json")),
];

pub fn problem_json(name: &str) -> Option<&'static str> {
    PROBLEMS.iter().find(|(n, _)| *n == name).map(|(_, j)| *j)
}

pub fn problem(name: &str) -> Result<ParsedProblem, DocumentError> {
    let text = problem_json(name).unwrap_or_else(|| panic!("no bundled problem {name}"));
    ProblemDocument::from_json(text)?.parse(64)
}
