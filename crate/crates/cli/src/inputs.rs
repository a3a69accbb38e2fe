use std::fs;

use fock_radial::seqspace::{parse_generator, target_from_json};
use fock_radial::symbols::symbol_from_json;
use fock_radial::{SeqWindow, Symbol};

use crate::error::{CliError, CliResult};

fn text_of(arg: &str) -> CliResult<String> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') {
        return Ok(arg.to_string());
    }
    fs::read_to_string(arg).map_err(|e| CliError::Validation(format!("cannot read '{arg}': {e}")))
}

/// A symbol from a JSON file path or inline JSON.
pub fn load_symbol(arg: &str) -> CliResult<Symbol> {
    Ok(symbol_from_json(&text_of(arg)?)?)
}

/// A target from a JSON file path, inline JSON, or a `generator:` spec.
pub fn load_target(arg: &str) -> CliResult<SeqWindow> {
    if arg.starts_with("generator:") {
        return Ok(parse_generator(arg)?);
    }
    Ok(target_from_json(&text_of(arg)?)?)
}
