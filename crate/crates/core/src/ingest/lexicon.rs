use std::collections::BTreeSet;
use std::path::Path;

use crate::error::{Error, Result};

/// One lemma per line; `#` starts a comment; blank lines are ignored.
/// Entries are lowercased.
pub fn parse_lexicon(text: &str) -> BTreeSet<String> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(str::to_lowercase)
        .collect()
}

pub fn read_lexicon(path: &Path) -> Result<BTreeSet<String>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_lexicon(&text))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_and_case() {
        let lex = parse_lexicon("# directional\nNorth\n  south # trailing\n\nleft\n");
        assert_eq!(lex.into_iter().collect::<Vec<_>>(), ["left", "north", "south"]);
    }
}
