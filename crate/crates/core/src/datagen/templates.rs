use std::path::Path;

use super::DatagenError;

/// Kinds of template files. Each kind allows a fixed set of placeholders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TemplateKind {
    /// Defines variable groups: `{labels}` and `{substituents}`.
    Sentence,
    /// Defines frequency labels: `{labels}` and `{integers}`.
    Frequency,
    /// Wraps a rendered substituent list: `{substituents}`.
    List,
    Prefix,
    Suffix,
    /// Defines a label absent from the structure: `{labels}`, `{substituents}`.
    Noise,
}

impl TemplateKind {
    pub const ALL: [TemplateKind; 6] = [
        TemplateKind::Sentence,
        TemplateKind::Frequency,
        TemplateKind::List,
        TemplateKind::Prefix,
        TemplateKind::Suffix,
        TemplateKind::Noise,
    ];

    pub fn file_name(self) -> &'static str {
        match self {
            TemplateKind::Sentence => "sentences.txt",
            TemplateKind::Frequency => "frequency.txt",
            TemplateKind::List => "lists.txt",
            TemplateKind::Prefix => "prefixes.txt",
            TemplateKind::Suffix => "suffixes.txt",
            TemplateKind::Noise => "noise.txt",
        }
    }

    fn required(self) -> &'static [&'static str] {
        match self {
            TemplateKind::Sentence | TemplateKind::Noise => &["labels", "substituents"],
            TemplateKind::Frequency => &["labels", "integers"],
            TemplateKind::List => &["substituents"],
            TemplateKind::Prefix | TemplateKind::Suffix => &[],
        }
    }

    fn builtin(self) -> &'static str {
        match self {
            TemplateKind::Sentence => include_str!("../../data/templates/sentences.txt"),
            TemplateKind::Frequency => include_str!("../../data/templates/frequency.txt"),
            TemplateKind::List => include_str!("../../data/templates/lists.txt"),
            TemplateKind::Prefix => include_str!("../../data/templates/prefixes.txt"),
            TemplateKind::Suffix => include_str!("../../data/templates/suffixes.txt"),
            TemplateKind::Noise => include_str!("../../data/templates/noise.txt"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TemplateSet {
    pub sentences: Vec<String>,
    pub frequency: Vec<String>,
    pub lists: Vec<String>,
    pub prefixes: Vec<String>,
    pub suffixes: Vec<String>,
    pub noise: Vec<String>,
}

fn placeholders(template: &str) -> Result<Vec<&str>, String> {
    let mut out = Vec::new();
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        let after = &rest[open + 1..];
        let close = after.find('}').ok_or_else(|| format!("unclosed '{{' in '{template}'"))?;
        out.push(&after[..close]);
        rest = &after[close + 1..];
    }
    if rest.contains('}') {
        return Err(format!("stray '}}' in '{template}'"));
    }
    Ok(out)
}

impl TemplateSet {
    pub fn get(&self, kind: TemplateKind) -> &[String] {
        match kind {
            TemplateKind::Sentence => &self.sentences,
            TemplateKind::Frequency => &self.frequency,
            TemplateKind::List => &self.lists,
            TemplateKind::Prefix => &self.prefixes,
            TemplateKind::Suffix => &self.suffixes,
            TemplateKind::Noise => &self.noise,
        }
    }

    fn get_mut(&mut self, kind: TemplateKind) -> &mut Vec<String> {
        match kind {
            TemplateKind::Sentence => &mut self.sentences,
            TemplateKind::Frequency => &mut self.frequency,
            TemplateKind::List => &mut self.lists,
            TemplateKind::Prefix => &mut self.prefixes,
            TemplateKind::Suffix => &mut self.suffixes,
            TemplateKind::Noise => &mut self.noise,
        }
    }

    /// Adds the non-blank, non-comment lines of `text` as templates of `kind`.
    pub fn add(&mut self, kind: TemplateKind, text: &str) -> Result<(), DatagenError> {
        for line in text.lines() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let found = placeholders(line).map_err(DatagenError::InvalidTemplate)?;
            if let Some(p) = found.iter().find(|p| !kind.required().contains(p)) {
                return Err(DatagenError::InvalidTemplate(format!(
                    "placeholder {{{p}}} not allowed in {}",
                    kind.file_name()
                )));
            }
            if let Some(p) = kind.required().iter().find(|r| !found.contains(r)) {
                return Err(DatagenError::InvalidTemplate(format!(
                    "'{line}' in {} lacks {{{p}}}",
                    kind.file_name()
                )));
            }
            self.get_mut(kind).push(line.to_string());
        }
        Ok(())
    }

    /// Reads every kind's file from `dir`; missing files leave the kind empty.
    pub fn load_dir(dir: &Path) -> Result<TemplateSet, DatagenError> {
        let mut set = TemplateSet::default();
        for kind in TemplateKind::ALL {
            let path = dir.join(kind.file_name());
            match std::fs::read_to_string(&path) {
                Ok(text) => set.add(kind, &text)?,
                Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
                Err(e) => return Err(DatagenError::Io(path.display().to_string(), e)),
            }
        }
        Ok(set)
    }

    pub fn builtin() -> TemplateSet {
        let mut set = TemplateSet::default();
        for kind in TemplateKind::ALL {
            set.add(kind, kind.builtin()).expect("built-in templates are valid");
        }
        set
    }

    pub(crate) fn require(&self, kind: TemplateKind) -> Result<&[String], DatagenError> {
        let list = self.get(kind);
        if list.is_empty() {
            Err(DatagenError::MissingTemplateKind(kind.file_name().to_string()))
        } else {
            Ok(list)
        }
    }
}

/// Replaces `{name}` placeholders.
pub fn fill(template: &str, values: &[(&str, &str)]) -> String {
    let mut out = template.to_string();
    for (name, value) in values {
        out = out.replace(&format!("{{{name}}}"), value);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_set_is_complete() {
        let set = TemplateSet::builtin();
        for kind in TemplateKind::ALL {
            assert!(!set.get(kind).is_empty(), "{kind:?}");
        }
    }

    #[test]
    fn placeholder_checks() {
        let mut set = TemplateSet::default();
        assert!(set.add(TemplateKind::Sentence, "{labels} is {substituents}").is_ok());
        assert!(set.add(TemplateKind::Sentence, "{labels} is {integers}").is_err());
        assert!(set.add(TemplateKind::Frequency, "{labels} is {substituents}").is_err());
        assert!(set.add(TemplateKind::List, "one of {substituents").is_err());
        assert!(set.add(TemplateKind::Prefix, "wherein {labels}").is_err());
        assert!(matches!(
            TemplateSet::default().require(TemplateKind::List),
            Err(DatagenError::MissingTemplateKind(_))
        ));
    }

    #[test]
    fn fills() {
        assert_eq!(fill("{labels} is {substituents}", &[("labels", "R1"), ("substituents", "H")]), "R1 is H");
    }
}
