//! Group sources and element words given on the command line.

use std::path::Path;

use cayley_core::groups::{builtin, FiniteGroup};
use cayley_core::tree::{AutomatonGroup, Letter};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// On-disk group description: element labels and the multiplication table
/// `table[a][b] = a·b` by label index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupFile {
    pub labels: Vec<String>,
    pub table: Vec<Vec<usize>>,
}

impl GroupFile {
    pub fn from_group(g: &FiniteGroup) -> Self {
        GroupFile { labels: g.labels().to_vec(), table: g.table_rows() }
    }

    pub fn into_group(self) -> CliResult<FiniteGroup> {
        Ok(FiniteGroup::from_table(self.labels, self.table)?)
    }
}

/// A path to a group file if one exists, otherwise a built-in name.
pub fn load_group(source: &str) -> CliResult<FiniteGroup> {
    let path = Path::new(source);
    if path.is_file() {
        let text = std::fs::read_to_string(path)
            .map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
        let file: GroupFile = serde_json::from_str(&text)
            .map_err(|source| CliError::GroupFile { path: path.display().to_string(), source })?;
        return file.into_group();
    }
    builtin(source).map_err(|_| {
        CliError::Usage(format!("--group: `{source}` is neither a file nor a built-in group (Z<n>, D<m>, S3, Q8, products with x)"))
    })
}

/// Parses a word of the Cayley machine group.
///
/// Tokens are separated by whitespace or `*`. A token is a state label,
/// `x` (the state of the identity), `[label]` (the embedded group element)
/// or `#i` (state by index), each optionally followed by `^-1`.
pub fn parse_word(group: &AutomatonGroup, g: &FiniteGroup, text: &str) -> CliResult<Vec<Letter>> {
    let mut word = Vec::new();
    for token in text.split(|c: char| c.is_whitespace() || c == '*').filter(|t| !t.is_empty()) {
        let (body, inverse) = match token.strip_suffix("^-1") {
            Some(b) => (b, true),
            None => (token, false),
        };
        let letters = if let Some(label) = body.strip_prefix('[').and_then(|b| b.strip_suffix(']')) {
            group.embedded_word(lookup(g, label)?)?
        } else if let Some(index) = body.strip_prefix('#') {
            let i: usize = index
                .parse()
                .map_err(|_| CliError::Usage(format!("--word: bad state index `{token}`")))?;
            g.check_index(i)?;
            vec![Letter::pos(i)]
        } else if body == "x" && g.index_of("x").is_none() {
            group.x_word()?
        } else {
            vec![Letter::pos(lookup(g, body)?)]
        };
        if inverse {
            word.extend(letters.iter().rev().map(|l| l.inv()));
        } else {
            word.extend(letters);
        }
    }
    Ok(word)
}

fn lookup(g: &FiniteGroup, label: &str) -> CliResult<usize> {
    g.index_of(label)
        .ok_or_else(|| CliError::Usage(format!("--word: no element labelled `{label}`")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use cayley_core::groups::cyclic;

    #[test]
    fn words() {
        let g = cyclic(3).unwrap();
        let group = AutomatonGroup::cayley(&g);
        assert_eq!(parse_word(&group, &g, "1 2^-1").unwrap(), vec![Letter::pos(1), Letter::neg(2)]);
        assert_eq!(parse_word(&group, &g, "x*#2").unwrap(), vec![Letter::pos(0), Letter::pos(2)]);
        assert_eq!(
            parse_word(&group, &g, "[1]^-1").unwrap(),
            vec![Letter::pos(1), Letter::neg(0)]
        );
        assert!(parse_word(&group, &g, "").unwrap().is_empty());
        assert!(matches!(parse_word(&group, &g, "7"), Err(CliError::Usage(_))));
    }

    #[test]
    fn group_file_round_trip() {
        let g = builtin("S3").unwrap();
        let text = serde_json::to_string(&GroupFile::from_group(&g)).unwrap();
        let back: GroupFile = serde_json::from_str(&text).unwrap();
        let h = back.into_group().unwrap();
        assert_eq!(h.labels(), g.labels());
        assert_eq!(h.table_rows(), g.table_rows());
    }

    #[test]
    fn unknown_source_is_a_usage_error() {
        assert!(matches!(load_group("nope"), Err(CliError::Usage(_))));
    }
}
