//! Plain-text experiment configs: `[block]` headers followed by `key = value`
//! lines. Lines starting with `#` are comments.

use std::collections::BTreeMap;
use std::str::FromStr;

pub type Block = BTreeMap<String, String>;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    blocks: BTreeMap<String, Block>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut blocks: BTreeMap<String, Block> = BTreeMap::new();
        let mut current: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .map(str::trim)
                    .filter(|n| !n.is_empty())
                    .ok_or_else(|| format!("line {}: malformed block header `{line}`", i + 1))?;
                if blocks.insert(name.to_string(), Block::new()).is_some() {
                    return Err(format!("line {}: duplicate block [{name}]", i + 1));
                }
                current = Some(name.to_string());
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected `key = value`", i + 1))?;
            let block = current
                .as_ref()
                .ok_or_else(|| format!("line {}: `{}` appears before any block", i + 1, key.trim()))?;
            let key = key.trim();
            if key.is_empty() {
                return Err(format!("line {}: empty key", i + 1));
            }
            let entries = blocks.get_mut(block).expect("current block exists");
            if entries.insert(key.to_string(), value.trim().to_string()).is_some() {
                return Err(format!("line {}: duplicate key `{key}` in [{block}]", i + 1));
            }
        }
        Ok(Self { blocks })
    }

    pub fn block(&self, name: &str) -> Result<&Block, String> {
        self.blocks
            .get(name)
            .ok_or_else(|| format!("missing block [{name}]"))
    }

    pub fn optional(&self, name: &str) -> Option<&Block> {
        self.blocks.get(name)
    }
}

/// Value of `key` in `block`, or `default` when absent.
pub fn get<T: FromStr>(block: Option<&Block>, name: &str, key: &str, default: T) -> Result<T, String> {
    match block.and_then(|b| b.get(key)) {
        Some(v) => v
            .parse()
            .map_err(|_| format!("invalid value `{v}` for `{key}` in [{name}]")),
        None => Ok(default),
    }
}

/// Value of a key that must be present.
pub fn require<T: FromStr>(block: &Block, name: &str, key: &str) -> Result<T, String> {
    let v = block
        .get(key)
        .ok_or_else(|| format!("missing key `{key}` in [{name}]"))?;
    v.parse()
        .map_err(|_| format!("invalid value `{v}` for `{key}` in [{name}]"))
}

/// Groups of numbers separated by `;`, numbers separated by commas or spaces.
pub fn number_groups(s: &str) -> Result<Vec<Vec<f64>>, String> {
    s.split(';')
        .filter(|g| !g.trim().is_empty())
        .map(|g| {
            g.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<f64>().map_err(|_| format!("invalid number `{t}`")))
                .collect()
        })
        .collect()
}
