use std::path::Path;

use serde::de::DeserializeOwned;
use serde_json::Value;

use crate::CliError;

/// Reads a JSON file; syntax errors name the path and byte offset.
pub fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        CliError::Usage(format!(
            "malformed JSON in {} at byte offset {}: {e}",
            path.display(),
            byte_offset(&text, e.line(), e.column())
        ))
    })
}

/// Converts a parsed document into a typed input; shape problems are domain
/// errors.
pub fn typed<T: DeserializeOwned>(value: &Value, what: &str, origin: &str) -> Result<T, CliError> {
    serde_json::from_value(value.clone()).map_err(|e| CliError::Domain(format!("{origin}: not a valid {what}: {e}")))
}

/// serde_json reports 1-based lines and columns counted in bytes.
fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    let start: usize = text.split_inclusive('\n').take(line.saturating_sub(1)).map(str::len).sum();
    (start + column.saturating_sub(1)).min(text.len())
}

#[cfg(test)]
mod tests {
    use super::byte_offset;

    #[test]
    fn offsets_count_bytes_across_lines() {
        let text = "{\n  \"a\": ?\n}";
        let err = serde_json::from_str::<serde_json::Value>(text).unwrap_err();
        assert_eq!(&text[byte_offset(text, err.line(), err.column())..][..1], "?");
    }
}
