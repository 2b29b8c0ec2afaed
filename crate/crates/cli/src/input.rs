//! Speed-set ingestion from flags and files.

use std::path::Path;

use lonely_core::exact::{parse_rat, Rat};
use lonely_core::SpeedSet;

use crate::{CliError, Result, SpeedInput};

pub fn load_single(input: &SpeedInput) -> Result<SpeedSet> {
    if let Some(list) = &input.speeds {
        return SpeedSet::parse(list).map_err(CliError::Math);
    }
    let path = input.speeds_file.as_ref().expect("clap enforces one source");
    let sets = load_corpus(path)?;
    match <[SpeedSet; 1]>::try_from(sets) {
        Ok([single]) => Ok(single),
        Err(sets) => Err(CliError::Input(format!(
            "{} holds {} speed sets, expected exactly one",
            path.display(),
            sets.len()
        ))),
    }
}

pub fn load_corpus(path: &Path) -> Result<Vec<SpeedSet>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    parse_corpus(&text)
}

/// Newline-separated comma lists, or a JSON array of integer arrays. Blank
/// lines are skipped; anything else must parse.
pub fn parse_corpus(text: &str) -> Result<Vec<SpeedSet>> {
    if text.trim_start().starts_with('[') {
        let rows: Vec<Vec<u64>> = serde_json::from_str(text)
            .map_err(|e| CliError::Input(format!("corpus JSON: {e}")))?;
        return rows
            .into_iter()
            .enumerate()
            .map(|(i, row)| {
                SpeedSet::new(row)
                    .map_err(|e| CliError::Input(format!("corpus entry {}: {e}", i + 1)))
            })
            .collect();
    }
    text.lines()
        .enumerate()
        .filter(|(_, line)| !line.trim().is_empty())
        .map(|(i, line)| {
            SpeedSet::parse(line).map_err(|e| CliError::Input(format!("line {}: {e}", i + 1)))
        })
        .collect()
}

pub fn rat_flag(name: &str, raw: &str) -> Result<Rat> {
    parse_rat(raw).map_err(|e| CliError::Input(format!("--{name}: {e}")))
}

pub fn rat_flag_opt(name: &str, raw: &Option<String>) -> Result<Option<Rat>> {
    raw.as_deref().map(|r| rat_flag(name, r)).transpose()
}
