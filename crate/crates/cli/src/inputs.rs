//! Pattern inputs shared by the subcommands.

use std::fmt;
use std::path::PathBuf;

use anyhow::Context;
use clap::Args;
use treewilf_core::{Alphabet, PatternSet, Tree};

/// Bad user input that is not a core error.
#[derive(Debug)]
pub struct ValidationError(String);

impl ValidationError {
    pub fn new(msg: impl Into<String>) -> Self {
        ValidationError(msg.into())
    }
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ValidationError {}

#[derive(Args, Debug)]
pub struct PatternArgs {
    /// Comma-separated Polish words; an empty string is the empty set.
    #[arg(long, visible_alias = "pattern", conflicts_with = "patterns_file")]
    pub patterns: Option<String>,
    /// One Polish word per line; `#` starts a comment.
    #[arg(long)]
    pub patterns_file: Option<PathBuf>,
    /// Labels as `symbol:arity` pairs; exactly one must have arity 0.
    #[arg(long, default_value = "m:2,x:0")]
    pub alphabet: String,
}

impl PatternArgs {
    pub fn load(&self) -> anyhow::Result<PatternSet> {
        let alphabet = Alphabet::parse(&self.alphabet).context("--alphabet")?;
        let words: Vec<String> = match (&self.patterns, &self.patterns_file) {
            (Some(inline), None) => inline.split(',').map(|w| w.trim().to_string()).filter(|w| !w.is_empty()).collect(),
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                text.lines()
                    .map(|l| l.split('#').next().unwrap_or("").trim().to_string())
                    .filter(|w| !w.is_empty())
                    .collect()
            }
            _ => return Err(ValidationError::new("give the patterns with --patterns or --patterns-file").into()),
        };
        let trees = words.iter().map(|w| parse_word(w, &alphabet)).collect::<anyhow::Result<Vec<_>>>()?;
        Ok(PatternSet::new(alphabet, trees)?)
    }
}

/// Parses one word, pointing at the offending symbol on failure.
pub fn parse_word(word: &str, alphabet: &Alphabet) -> anyhow::Result<Tree> {
    Tree::parse(word, alphabet).map_err(|e| {
        let caret = " ".repeat(e.position.min(word.chars().count()));
        ValidationError::new(format!("pattern {word:?}: {e}\n    {word}\n    {caret}^")).into()
    })
}
