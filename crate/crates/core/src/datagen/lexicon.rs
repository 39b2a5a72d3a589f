use crate::chemgraph::{parse_smiles, MolecularGraph};

use super::DatagenError;

pub const DEFAULT_LEXICON: &str = include_str!("../../data/lexicon.txt");

/// Free-text substituent with the number of bonds it makes to its site.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Substituent {
    pub text: String,
    pub valence: u8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Abbreviation {
    pub name: String,
    pub smiles: String,
    pub valence: u8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexiconAtom {
    pub symbol: String,
    pub name: String,
    pub valence: u8,
}

/// Functional group attached through its first atom.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalGroup {
    pub smiles: String,
    pub graph: MolecularGraph,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lexicon {
    pub substituents: Vec<Substituent>,
    pub abbreviations: Vec<Abbreviation>,
    pub functional_groups: Vec<FunctionalGroup>,
    pub atoms: Vec<LexiconAtom>,
    /// Inclusive bounds of frequency-label integers.
    pub integer_range: (u32, u32),
    /// Variable-group label stems, numbered on use (`R` -> `R1`, `R2`, ...).
    pub label_stems: Vec<String>,
}

impl Default for Lexicon {
    fn default() -> Self {
        Lexicon::parse(DEFAULT_LEXICON).expect("built-in lexicon is valid")
    }
}

fn bad(line: usize, msg: impl Into<String>) -> DatagenError {
    DatagenError::Lexicon {
        line,
        message: msg.into(),
    }
}

fn parse_valence(line: usize, s: &str) -> Result<u8, DatagenError> {
    match s.parse::<u8>() {
        Ok(v @ 1..=4) => Ok(v),
        _ => Err(bad(line, format!("valence '{s}' must be 1 to 4"))),
    }
}

impl Lexicon {
    /// Parses the sectioned lexicon format: `[section]` headers, one entry
    /// per line, `#` comments.
    pub fn parse(text: &str) -> Result<Lexicon, DatagenError> {
        let mut lex = Lexicon {
            substituents: Vec::new(),
            abbreviations: Vec::new(),
            functional_groups: Vec::new(),
            atoms: Vec::new(),
            integer_range: (1, 5),
            label_stems: Vec::new(),
        };
        let mut section = String::new();
        for (k, raw) in text.lines().enumerate() {
            let n = k + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = name.trim().to_string();
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            match section.as_str() {
                "substituents" => {
                    let (v, rest) = line.split_once(char::is_whitespace).ok_or_else(|| bad(n, "expected: valence text"))?;
                    lex.substituents.push(Substituent {
                        valence: parse_valence(n, v)?,
                        text: rest.split_whitespace().collect::<Vec<_>>().join(" "),
                    });
                }
                "abbreviations" => {
                    let [v, name, smiles] = fields.as_slice() else {
                        return Err(bad(n, "expected: valence name smiles"));
                    };
                    parse_smiles(smiles).map_err(|e| bad(n, e.to_string()))?;
                    lex.abbreviations.push(Abbreviation {
                        valence: parse_valence(n, v)?,
                        name: name.to_string(),
                        smiles: smiles.to_string(),
                    });
                }
                "functional_groups" => {
                    let [smiles] = fields.as_slice() else {
                        return Err(bad(n, "expected one SMILES"));
                    };
                    let graph = parse_smiles(smiles).map_err(|e| bad(n, e.to_string()))?;
                    if crate::chemgraph::open_valences(&graph)[0] == 0 {
                        return Err(bad(n, "first atom has no free valence"));
                    }
                    lex.functional_groups.push(FunctionalGroup {
                        smiles: smiles.to_string(),
                        graph,
                    });
                }
                "atoms" => {
                    let [symbol, name, v] = fields.as_slice() else {
                        return Err(bad(n, "expected: symbol name valence"));
                    };
                    lex.atoms.push(LexiconAtom {
                        symbol: symbol.to_string(),
                        name: name.to_string(),
                        valence: parse_valence(n, v)?,
                    });
                }
                "integers" => {
                    let [lo, hi] = fields.as_slice() else {
                        return Err(bad(n, "expected: min max"));
                    };
                    let (lo, hi) = (lo.parse::<u32>(), hi.parse::<u32>());
                    match (lo, hi) {
                        (Ok(lo), Ok(hi)) if lo < hi => lex.integer_range = (lo, hi),
                        _ => return Err(bad(n, "integer range must be min < max")),
                    }
                }
                "labels" => lex.label_stems.extend(fields.iter().map(|s| s.to_string())),
                "" => return Err(bad(n, "entry before any [section]")),
                other => return Err(bad(n, format!("unknown section [{other}]"))),
            }
        }
        if lex.label_stems.is_empty() {
            return Err(bad(0, "no [labels]"));
        }
        if lex.label_stems.iter().any(|s| s.chars().any(|c| c.is_ascii_digit() || c.is_whitespace())) {
            return Err(bad(0, "label stems must not contain digits"));
        }
        for v in 1..=2 {
            if lex.candidates(v).is_empty() {
                return Err(bad(0, format!("no substituents of valence {v}")));
            }
        }
        Ok(lex)
    }

    /// Every text form usable for a site of the given valence: substituent
    /// texts, abbreviation names and SMILES, atom symbols and names.
    pub fn candidates(&self, valence: u8) -> Vec<String> {
        let mut out = Vec::new();
        out.extend(self.substituents.iter().filter(|s| s.valence == valence).map(|s| s.text.clone()));
        for a in self.abbreviations.iter().filter(|a| a.valence == valence) {
            out.push(a.name.clone());
            out.push(a.smiles.clone());
        }
        for a in self.atoms.iter().filter(|a| a.valence == valence) {
            out.push(a.symbol.clone());
            out.push(a.name.clone());
        }
        out.sort();
        out.dedup();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_lexicon_loads() {
        let lex = Lexicon::default();
        assert!(!lex.functional_groups.is_empty());
        assert!(lex.candidates(1).len() > 20);
        assert!(lex.candidates(1).contains(&"methyl".to_string()));
        assert!(!lex.candidates(2).is_empty());
        assert!(lex.label_stems.contains(&"R".to_string()));
    }

    #[test]
    fn parse_errors_carry_lines() {
        let err = Lexicon::parse("[atoms]\nO oxygen 9\n").unwrap_err();
        assert!(matches!(err, DatagenError::Lexicon { line: 2, .. }));
        assert!(Lexicon::parse("[weird]\nx\n").is_err());
    }

    #[test]
    fn candidates_filter_by_valence() {
        let lex = Lexicon::parse(
            "[substituents]\n1 lower alkyl\n2 carbonyl\n[atoms]\nO oxygen 2\nCl chlorine 1\n[labels]\nR\n",
        )
        .unwrap();
        assert_eq!(lex.candidates(1), vec!["Cl", "chlorine", "lower alkyl"]);
        assert_eq!(lex.candidates(2), vec!["O", "carbonyl", "oxygen"]);
    }
}
