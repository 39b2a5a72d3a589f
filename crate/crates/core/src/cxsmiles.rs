//! CXSMILES subset: a SMILES followed by an optional `|...|` extension block
//! holding variable-group labels (`$...$`), position variation (`m:`) and
//! frequency variation (`Sg:n:`) sections.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::chemgraph::smiles::{layout, render_items};
use crate::chemgraph::{
    canonical_search, inverse_permutation, parse_smiles, CanonicalLeaf, GraphError, MolecularGraph, SmilesError,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CxsmilesError {
    #[error(transparent)]
    Smiles(#[from] SmilesError),
    #[error("malformed extension: {0}")]
    MalformedExtension(String),
    #[error("{labels} labels for {atoms} atoms")]
    LabelCountMismatch { labels: usize, atoms: usize },
    #[error("atom index {index} out of range for {n_atoms} atoms")]
    IndexOutOfRange { index: usize, n_atoms: usize },
    #[error("unknown extension field '{0}'")]
    UnknownField(String),
}

/// A labeled wildcard atom.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VariableGroup {
    pub atom_index: usize,
    pub label: String,
}

/// A bond from `endpoint_atom` that may attach to any of `candidate_atoms`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PositionVariation {
    pub endpoint_atom: usize,
    pub candidate_atoms: Vec<usize>,
}

impl PositionVariation {
    pub fn new(endpoint_atom: usize, mut candidate_atoms: Vec<usize>) -> Self {
        candidate_atoms.sort_unstable();
        candidate_atoms.dedup();
        PositionVariation {
            endpoint_atom,
            candidate_atoms,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum Connectivity {
    #[default]
    HeadToTail,
    HeadToHead,
    Unspecified,
}

impl Connectivity {
    pub fn as_str(self) -> &'static str {
        match self {
            Connectivity::HeadToTail => "ht",
            Connectivity::HeadToHead => "hh",
            Connectivity::Unspecified => "eu",
        }
    }
}

impl fmt::Display for Connectivity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Connectivity {
    type Err = CxsmilesError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ht" => Ok(Connectivity::HeadToTail),
            "hh" => Ok(Connectivity::HeadToHead),
            "eu" | "" => Ok(Connectivity::Unspecified),
            other => Err(CxsmilesError::MalformedExtension(format!("unknown connectivity '{other}'"))),
        }
    }
}

/// A repeat unit over `atoms`. An empty label is the blank label.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FrequencyVariation {
    pub atoms: Vec<usize>,
    pub label: String,
    pub connectivity: Connectivity,
}

impl FrequencyVariation {
    pub fn new(mut atoms: Vec<usize>, label: impl Into<String>, connectivity: Connectivity) -> Self {
        atoms.sort_unstable();
        atoms.dedup();
        FrequencyVariation {
            atoms,
            label: label.into().trim().to_string(),
            connectivity,
        }
    }
}

/// A backbone graph plus its Markush features. Variable-group labels live on
/// the graph atoms.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MarkushStructure {
    pub graph: MolecularGraph,
    pub position_variations: Vec<PositionVariation>,
    pub frequency_variations: Vec<FrequencyVariation>,
}

impl MarkushStructure {
    pub fn new(graph: MolecularGraph) -> Self {
        MarkushStructure {
            graph,
            ..Default::default()
        }
    }

    /// Labeled atoms in index order.
    pub fn variable_groups(&self) -> Vec<VariableGroup> {
        self.graph
            .atoms()
            .iter()
            .enumerate()
            .filter_map(|(i, a)| {
                a.variable_label.as_ref().map(|l| VariableGroup {
                    atom_index: i,
                    label: l.clone(),
                })
            })
            .collect()
    }

    /// Distinct variable-group and non-blank frequency labels, first
    /// appearance order.
    pub fn labels(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        let vg = self.variable_groups().into_iter().map(|v| v.label);
        let sg = self.frequency_variations.iter().map(|f| f.label.clone());
        for label in vg.chain(sg) {
            if !label.is_empty() && !out.contains(&label) {
                out.push(label);
            }
        }
        out
    }

    pub fn has_features(&self) -> bool {
        !self.position_variations.is_empty()
            || !self.frequency_variations.is_empty()
            || self.graph.atoms().iter().any(|a| a.is_variable_group())
    }

    /// Checks index ranges and the label/candidate invariants.
    pub fn validate(&self) -> Result<(), CxsmilesError> {
        let n_atoms = self.graph.n_atoms();
        let check = |index: usize| {
            if index < n_atoms {
                Ok(())
            } else {
                Err(CxsmilesError::IndexOutOfRange { index, n_atoms })
            }
        };
        for (i, atom) in self.graph.atoms().iter().enumerate() {
            if let Some(label) = &atom.variable_label {
                if !atom.is_wildcard() || atom.formal_charge != 0 || label.trim().is_empty() {
                    return Err(CxsmilesError::MalformedExtension(format!(
                        "label '{label}' on atom {i} requires an uncharged wildcard"
                    )));
                }
            }
        }
        for pv in &self.position_variations {
            check(pv.endpoint_atom)?;
            for &c in &pv.candidate_atoms {
                check(c)?;
            }
            if pv.candidate_atoms.is_empty() || pv.candidate_atoms.contains(&pv.endpoint_atom) {
                return Err(CxsmilesError::MalformedExtension(format!(
                    "bad candidate set for endpoint {}",
                    pv.endpoint_atom
                )));
            }
            if pv.candidate_atoms.windows(2).any(|w| w[0] >= w[1]) {
                return Err(CxsmilesError::MalformedExtension("candidates not ascending".into()));
            }
        }
        for fv in &self.frequency_variations {
            if fv.atoms.is_empty() {
                return Err(CxsmilesError::MalformedExtension("empty repeat unit".into()));
            }
            for &a in &fv.atoms {
                check(a)?;
            }
            if fv.atoms.windows(2).any(|w| w[0] >= w[1]) {
                return Err(CxsmilesError::MalformedExtension("repeat atoms not ascending".into()));
            }
        }
        Ok(())
    }

    /// Reorders atoms (new position `k` holds old atom `order[k]`) and remaps
    /// every feature index.
    pub fn permuted(&self, order: &[usize]) -> Result<MarkushStructure, GraphError> {
        let graph = self.graph.permuted(order)?;
        let inverse = inverse_permutation(order, self.graph.n_atoms())?;
        Ok(self.remapped(graph, &inverse))
    }

    fn remapped(&self, graph: MolecularGraph, new_index: &[usize]) -> MarkushStructure {
        let position_variations = self
            .position_variations
            .iter()
            .map(|pv| {
                PositionVariation::new(
                    new_index[pv.endpoint_atom],
                    pv.candidate_atoms.iter().map(|&c| new_index[c]).collect(),
                )
            })
            .collect();
        let frequency_variations = self
            .frequency_variations
            .iter()
            .map(|fv| {
                FrequencyVariation::new(
                    fv.atoms.iter().map(|&a| new_index[a]).collect(),
                    fv.label.clone(),
                    fv.connectivity,
                )
            })
            .collect();
        MarkushStructure {
            graph,
            position_variations,
            frequency_variations,
        }
    }

    fn sort_features(&mut self) {
        self.position_variations.sort();
        self.position_variations.dedup();
        self.frequency_variations.sort();
        self.frequency_variations.dedup();
    }
}

impl fmt::Display for MarkushStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&write_cxsmiles(self))
    }
}

const ESCAPED: [char; 7] = ['&', ';', '$', '|', ',', ':', ' '];

pub(crate) fn escape_label(label: &str) -> String {
    let mut s = String::with_capacity(label.len());
    for c in label.chars() {
        if ESCAPED.contains(&c) {
            s.push_str(&format!("&#{};", c as u32));
        } else {
            s.push(c);
        }
    }
    s
}

pub(crate) fn unescape_label(text: &str) -> Result<String, CxsmilesError> {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(start) = rest.find("&#") {
        out.push_str(&rest[..start]);
        let tail = &rest[start + 2..];
        let end = tail
            .find(';')
            .ok_or_else(|| CxsmilesError::MalformedExtension(format!("unterminated escape in '{text}'")))?;
        let c = tail[..end]
            .parse::<u32>()
            .ok()
            .and_then(char::from_u32)
            .ok_or_else(|| CxsmilesError::MalformedExtension(format!("bad escape in '{text}'")))?;
        out.push(c);
        rest = &tail[end + 1..];
    }
    out.push_str(rest);
    Ok(out)
}

/// Splits the `$...$` body on `;`, keeping `&#NN;` escapes intact.
fn split_label_slots(body: &str) -> Vec<&str> {
    let bytes = body.as_bytes();
    let mut slots = Vec::new();
    let mut start = 0;
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'&' && bytes.get(i + 1) == Some(&b'#') {
            let digits = bytes[i + 2..].iter().take_while(|b| b.is_ascii_digit()).count();
            if digits > 0 && bytes.get(i + 2 + digits) == Some(&b';') {
                i += 3 + digits;
                continue;
            }
        }
        if bytes[i] == b';' {
            slots.push(&body[start..i]);
            start = i + 1;
        }
        i += 1;
    }
    slots.push(&body[start..]);
    slots
}

fn parse_index(s: &str) -> Result<usize, CxsmilesError> {
    s.parse::<usize>()
        .map_err(|_| CxsmilesError::MalformedExtension(format!("bad atom index '{s}'")))
}

fn parse_index_list(s: &str, separators: &[char]) -> Result<Vec<usize>, CxsmilesError> {
    if s.is_empty() {
        return Err(CxsmilesError::MalformedExtension("empty index list".into()));
    }
    s.split(separators).map(parse_index).collect()
}

/// Splits text into the SMILES part and the optional extension body.
fn split_extension(text: &str) -> Result<(&str, Option<&str>), CxsmilesError> {
    let text = text.trim();
    let Some(open) = text.find('|') else {
        return Ok((text, None));
    };
    let smiles = text[..open].trim_end();
    let rest = &text[open + 1..];
    let close = rest
        .rfind('|')
        .ok_or_else(|| CxsmilesError::MalformedExtension("unterminated extension block".into()))?;
    if !rest[close + 1..].trim().is_empty() {
        return Err(CxsmilesError::MalformedExtension("text after extension block".into()));
    }
    Ok((smiles, Some(&rest[..close])))
}

#[derive(Default)]
struct Extension {
    labels: Option<Vec<String>>,
    position: Vec<PositionVariation>,
    frequency: Vec<FrequencyVariation>,
}

fn parse_extension(body: &str) -> Result<Extension, CxsmilesError> {
    let mut ext = Extension::default();
    let mut rest = body;
    while !rest.is_empty() {
        let consumed;
        if let Some(after) = rest.strip_prefix('$') {
            let end = after
                .find('$')
                .ok_or_else(|| CxsmilesError::MalformedExtension("unterminated label field".into()))?;
            if ext.labels.is_some() {
                return Err(CxsmilesError::MalformedExtension("repeated label field".into()));
            }
            let labels = split_label_slots(&after[..end])
                .into_iter()
                .map(|l| unescape_label(l).map(|l| l.trim().to_string()))
                .collect::<Result<Vec<_>, _>>()?;
            ext.labels = Some(labels);
            consumed = end + 2;
        } else if let Some(after) = rest.strip_prefix("m:") {
            let end = after.find(',').unwrap_or(after.len());
            let field = &after[..end];
            let (endpoint, candidates) = field
                .split_once(':')
                .ok_or_else(|| CxsmilesError::MalformedExtension(format!("bad m section 'm:{field}'")))?;
            ext.position.push(PositionVariation::new(
                parse_index(endpoint)?,
                parse_index_list(candidates, &['.'])?,
            ));
            consumed = 2 + end;
        } else if let Some(after) = rest.strip_prefix("Sg:") {
            let (kind, tail) = after
                .split_once(':')
                .ok_or_else(|| CxsmilesError::MalformedExtension("bad Sg section".into()))?;
            if kind != "n" {
                return Err(CxsmilesError::UnknownField(format!("Sg:{kind}")));
            }
            // atom list may use ',' or '.' between indices
            let atoms_end = tail
                .find(':')
                .ok_or_else(|| CxsmilesError::MalformedExtension("truncated Sg section".into()))?;
            let atoms = parse_index_list(&tail[..atoms_end], &[',', '.'])?;
            let tail2 = &tail[atoms_end + 1..];
            let label_end = tail2
                .find(':')
                .ok_or_else(|| CxsmilesError::MalformedExtension("truncated Sg section".into()))?;
            let label = unescape_label(&tail2[..label_end])?;
            let tail3 = &tail2[label_end + 1..];
            let conn_end = tail3.find(',').unwrap_or(tail3.len());
            let connectivity: Connectivity = tail3[..conn_end].trim().parse()?;
            ext.frequency.push(FrequencyVariation::new(atoms, label, connectivity));
            consumed = 3 + kind.len() + 1 + atoms_end + 1 + label_end + 1 + conn_end;
        } else {
            let end = rest.find([':', ',']).unwrap_or(rest.len());
            return Err(CxsmilesError::UnknownField(rest[..end].to_string()));
        }
        rest = &rest[consumed..];
        if let Some(after) = rest.strip_prefix(',') {
            if after.is_empty() {
                return Err(CxsmilesError::MalformedExtension("trailing comma".into()));
            }
            rest = after;
        } else if !rest.is_empty() {
            return Err(CxsmilesError::MalformedExtension(format!("unexpected '{rest}'")));
        }
    }
    Ok(ext)
}

pub fn parse_cxsmiles(text: &str) -> Result<MarkushStructure, CxsmilesError> {
    let (smiles, body) = split_extension(text)?;
    let mut graph = parse_smiles(smiles)?;
    let ext = match body {
        Some(body) => parse_extension(body)?,
        None => Extension::default(),
    };
    if let Some(labels) = ext.labels {
        if labels.len() > graph.n_atoms() {
            return Err(CxsmilesError::LabelCountMismatch {
                labels: labels.len(),
                atoms: graph.n_atoms(),
            });
        }
        for (i, label) in labels.into_iter().enumerate() {
            if !label.is_empty() {
                graph.atom_mut(i).variable_label = Some(label);
            }
        }
    }
    let ms = MarkushStructure {
        graph,
        position_variations: ext.position,
        frequency_variations: ext.frequency,
    };
    ms.validate()?;
    Ok(ms)
}

/// Writes `ms` with atoms visited by `rank`. Returns the text and the emitted
/// atom order.
fn render(ms: &MarkushStructure, rank: &[usize]) -> (String, Vec<usize>) {
    let (items, order) = layout(&ms.graph, rank);
    let mut text = render_items(&ms.graph, &items);
    let n = ms.graph.n_atoms();
    let mut position = vec![0usize; n];
    for (p, &a) in order.iter().enumerate() {
        position[a] = p;
    }

    let mut fields: Vec<String> = Vec::new();
    let labels: Vec<String> = order
        .iter()
        .map(|&a| ms.graph.atom(a).variable_label.as_deref().map(escape_label).unwrap_or_default())
        .collect();
    if let Some(last) = labels.iter().rposition(|l| !l.is_empty()) {
        fields.push(format!("${}$", labels[..=last].join(";")));
    }

    let (m, sg) = feature_sections(ms, &position);
    for (e, c) in m {
        fields.push(format!("m:{e}:{}", join_indices(&c, ".")));
    }
    for (atoms, label, conn) in sg {
        fields.push(format!("Sg:n:{}:{}:{conn}", join_indices(&atoms, ","), escape_label(&label)));
    }

    if !fields.is_empty() {
        text.push_str(" |");
        text.push_str(&fields.join(","));
        text.push('|');
    }
    (text, order)
}

pub(crate) type MSection = (usize, Vec<usize>);
pub(crate) type SgSection = (Vec<usize>, String, Connectivity);

/// Feature sections with indices mapped through `position`, sorted and
/// deduplicated in written order.
pub(crate) fn feature_sections(ms: &MarkushStructure, position: &[usize]) -> (Vec<MSection>, Vec<SgSection>) {
    let mut m: Vec<MSection> = ms
        .position_variations
        .iter()
        .map(|pv| {
            let mut c: Vec<usize> = pv.candidate_atoms.iter().map(|&a| position[a]).collect();
            c.sort_unstable();
            (position[pv.endpoint_atom], c)
        })
        .collect();
    m.sort();
    m.dedup();
    let mut sg: Vec<SgSection> = ms
        .frequency_variations
        .iter()
        .map(|fv| {
            let mut a: Vec<usize> = fv.atoms.iter().map(|&x| position[x]).collect();
            a.sort_unstable();
            (a, fv.label.clone(), fv.connectivity)
        })
        .collect();
    sg.sort();
    sg.dedup();
    (m, sg)
}

pub(crate) fn join_indices(indices: &[usize], sep: &str) -> String {
    indices.iter().map(usize::to_string).collect::<Vec<_>>().join(sep)
}

/// Writes CXSMILES. Atom indices in the extension refer to the written
/// SMILES order, which may differ from the graph order.
pub fn write_cxsmiles(ms: &MarkushStructure) -> String {
    let rank: Vec<usize> = (0..ms.graph.n_atoms()).collect();
    render(ms, &rank).0
}

/// The emitted atom order of [`write_cxsmiles`]: position -> atom index.
pub fn written_order(ms: &MarkushStructure) -> Vec<usize> {
    let rank: Vec<usize> = (0..ms.graph.n_atoms()).collect();
    layout(&ms.graph, &rank).1
}

fn feature_colors(ms: &MarkushStructure) -> Vec<String> {
    let mut tags: Vec<Vec<String>> = vec![Vec::new(); ms.graph.n_atoms()];
    for pv in &ms.position_variations {
        tags[pv.endpoint_atom].push(format!("E{}", pv.candidate_atoms.len()));
        for &c in &pv.candidate_atoms {
            tags[c].push("C".into());
        }
    }
    for fv in &ms.frequency_variations {
        for &a in &fv.atoms {
            tags[a].push(format!("S{}:{}:{}", fv.atoms.len(), fv.label, fv.connectivity));
        }
    }
    tags.into_iter()
        .map(|mut t| {
            t.sort();
            t.join("|")
        })
        .collect()
}

/// Canonical atom order of a Markush structure: position -> atom index.
pub fn markush_canonical_order(ms: &MarkushStructure) -> Vec<usize> {
    let colors = feature_colors(ms);
    let leaf = canonical_search(&ms.graph, &colors, |rank| {
        let (certificate, order) = render(ms, rank);
        CanonicalLeaf { certificate, order }
    });
    leaf.order
}

/// Reorders atoms canonically, remaps and sorts every feature list.
pub fn canonicalize_markush(ms: &MarkushStructure) -> MarkushStructure {
    let order = markush_canonical_order(ms);
    let mut out = ms.permuted(&order).expect("canonical order is a permutation");
    out.graph.normalize_bonds();
    out.sort_features();
    out
}

/// CXSMILES of the canonical form.
pub fn canonical_cxsmiles(ms: &MarkushStructure) -> String {
    write_cxsmiles(&canonicalize_markush(ms))
}

/// Equality of canonical forms.
pub fn markush_equal(a: &MarkushStructure, b: &MarkushStructure) -> bool {
    a.graph.n_atoms() == b.graph.n_atoms()
        && a.graph.bonds().len() == b.graph.bonds().len()
        && canonicalize_markush(a) == canonicalize_markush(b)
}

/// Removes Markush features: variable-group atoms and wildcard endpoints of
/// position variations are deleted, `m` and `Sg` sections dropped.
pub fn strip_markush(ms: &MarkushStructure) -> MolecularGraph {
    let mut remove: Vec<bool> = ms.graph.atoms().iter().map(|a| a.is_variable_group()).collect();
    for pv in &ms.position_variations {
        if ms.graph.atom(pv.endpoint_atom).is_wildcard() {
            remove[pv.endpoint_atom] = true;
        }
    }
    ms.graph.without_atoms(&remove).0
}
