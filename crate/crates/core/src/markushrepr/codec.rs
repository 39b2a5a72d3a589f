use std::collections::HashMap;
use std::fmt;

use crate::chemgraph::smiles::{atom_from_lexeme, atom_lexeme, layout, lex, ring_label, GraphBuilder, Lexeme, WriteItem};
use crate::chemgraph::{Atom, BondOrder, SmilesError};
use crate::cxsmiles::{
    feature_sections, unescape_label, Connectivity, FrequencyVariation, MarkushStructure, PositionVariation,
};

use super::table::{compress_table, expand_table, GroupedTable, SubstituentTable, TableGroup};
use super::tokens::{
    escape_label, escape_text, unescape_text, Token, TokenKind, TokenSequence, GROUP_START, SEPARATOR, TABLE_START,
    VALUES_START,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EncodeWarning {
    LabelNotInStructure(String),
}

impl fmt::Display for EncodeWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EncodeWarning::LabelNotInStructure(l) => write!(f, "table label '{l}' not used in the structure"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DiagnosticKind {
    BadIndex,
    DuplicateIndex,
    UnknownToken,
    TruncatedSection,
    TableSyntax,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub message: String,
}

impl Diagnostic {
    fn new(kind: DiagnosticKind, message: impl Into<String>) -> Self {
        Diagnostic {
            kind,
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}: {}", self.kind, self.message)
    }
}

/// Decoder output. `diagnostics` is empty iff the input was well formed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Decoded {
    pub structure: MarkushStructure,
    pub table: SubstituentTable,
    pub diagnostics: Vec<Diagnostic>,
}

impl Decoded {
    pub fn is_clean(&self) -> bool {
        self.diagnostics.is_empty()
    }
}

fn push_index(tokens: &mut Vec<Token>, index: usize) {
    tokens.push(Token::new(TokenKind::IndexOpen, super::tokens::INDEX_OPEN));
    for d in index.to_string().chars() {
        tokens.push(Token::new(TokenKind::Digit, d));
    }
    tokens.push(Token::new(TokenKind::IndexClose, super::tokens::INDEX_CLOSE));
}

fn push_number(tokens: &mut Vec<Token>, n: usize) {
    for d in n.to_string().chars() {
        tokens.push(Token::new(TokenKind::Digit, d));
    }
}

fn push_list(tokens: &mut Vec<Token>, list: &[usize]) {
    for (k, &i) in list.iter().enumerate() {
        if k > 0 {
            tokens.push(Token::new(TokenKind::Structural, "."));
        }
        push_number(tokens, i);
    }
}

fn structural(text: &str) -> Token {
    Token::new(TokenKind::Structural, text)
}

/// Text label inside an extension section. Labels starting with digits or
/// holding digits split into several tokens exactly as the tokenizer does.
fn push_label(tokens: &mut Vec<Token>, label: &str) {
    let text = escape_label(label);
    tokens.extend(TokenSequence::from_text(&format!("|Sg:n:0:{text}")).backbone.into_iter().skip(7));
}

/// Encodes a structure and its table into the compact token form: labeled
/// wildcards inline as `{label}` atoms, `<i>n</i>` after every atom,
/// `|`-prefixed `m`/`Sg` sections, then the grouped table.
pub fn encode_optimized(ms: &MarkushStructure, table: &SubstituentTable) -> (TokenSequence, Vec<EncodeWarning>) {
    let graph = &ms.graph;
    let rank: Vec<usize> = (0..graph.n_atoms()).collect();
    let (items, order) = layout(graph, &rank);
    let mut position = vec![0usize; graph.n_atoms()];
    for (p, &a) in order.iter().enumerate() {
        position[a] = p;
    }

    let mut backbone = Vec::new();
    for item in items {
        match item {
            WriteItem::Atom(i) => {
                let text = match &graph.atom(i).variable_label {
                    Some(label) => format!("{{{}}}", escape_label(label)),
                    None => atom_lexeme(graph, i),
                };
                backbone.push(Token::new(TokenKind::ChemAtom, text));
                push_index(&mut backbone, position[i]);
            }
            WriteItem::Bond(o) => backbone.push(Token::new(TokenKind::ChemBond, o.symbol())),
            WriteItem::Open => backbone.push(structural("(")),
            WriteItem::Close => backbone.push(structural(")")),
            WriteItem::Ring(d) => backbone.push(structural(&ring_label(d))),
            WriteItem::Dot => backbone.push(structural(".")),
        }
    }

    let (m, sg) = feature_sections(ms, &position);
    let mut first = true;
    let mut section_start = |tokens: &mut Vec<Token>| {
        tokens.push(structural(if first { "|" } else { "," }));
        first = false;
    };
    for (endpoint, candidates) in m {
        section_start(&mut backbone);
        backbone.push(structural("m"));
        backbone.push(structural(":"));
        push_number(&mut backbone, endpoint);
        backbone.push(structural(":"));
        push_list(&mut backbone, &candidates);
    }
    for (atoms, label, conn) in sg {
        section_start(&mut backbone);
        for t in ["Sg", ":", "n", ":"] {
            backbone.push(structural(t));
        }
        push_list(&mut backbone, &atoms);
        backbone.push(structural(":"));
        push_label(&mut backbone, &label);
        backbone.push(structural(":"));
        backbone.push(Token::new(TokenKind::Text, conn.as_str()));
    }

    let mut table_tokens = Vec::new();
    let grouped = compress_table(table);
    if !grouped.groups.is_empty() {
        table_tokens.push(Token::new(TokenKind::Table, TABLE_START));
    }
    for group in &grouped.groups {
        table_tokens.push(Token::new(TokenKind::Table, GROUP_START));
        push_items(&mut table_tokens, &group.labels);
        table_tokens.push(Token::new(TokenKind::Table, VALUES_START));
        push_items(&mut table_tokens, &group.substituents);
    }

    let used = ms.labels();
    let warnings = table
        .labels()
        .filter(|l| !used.iter().any(|u| u == l))
        .map(|l| EncodeWarning::LabelNotInStructure(l.to_string()))
        .collect();
    (
        TokenSequence {
            backbone,
            table: table_tokens,
        },
        warnings,
    )
}

fn push_items(tokens: &mut Vec<Token>, items: &[String]) {
    for (k, item) in items.iter().enumerate() {
        if k > 0 {
            tokens.push(Token::new(TokenKind::Table, SEPARATOR));
        }
        let text = escape_text(item);
        if !text.is_empty() {
            tokens.push(Token::new(TokenKind::Text, text));
        }
    }
}

/// Convenience: encode straight to serialized text.
pub fn encode_text(ms: &MarkushStructure, table: &SubstituentTable) -> String {
    encode_optimized(ms, table).0.to_text()
}

pub fn decode_text(text: &str) -> Decoded {
    decode_optimized(&TokenSequence::from_text(text))
}

fn digits_value(tokens: &[Token]) -> Option<usize> {
    if tokens.is_empty() || tokens.len() > 9 || tokens.iter().any(|t| t.kind != TokenKind::Digit) {
        return None;
    }
    tokens.iter().map(|t| t.text.as_str()).collect::<String>().parse().ok()
}

fn smiles_diagnostic(err: &SmilesError) -> Diagnostic {
    let kind = match err {
        SmilesError::UnbalancedRing(_) | SmilesError::UnbalancedBranch(_) | SmilesError::EmptyInput => {
            DiagnosticKind::TruncatedSection
        }
        _ => DiagnosticKind::UnknownToken,
    };
    Diagnostic::new(kind, err.to_string())
}

fn atom_from_token(text: &str) -> Result<Atom, String> {
    if let Some(inner) = text.strip_prefix('{').and_then(|t| t.strip_suffix('}')) {
        let label = unescape_label(inner).map_err(|e| e.to_string())?;
        if label.trim().is_empty() {
            return Err("empty variable-group label".into());
        }
        return Ok(Atom::variable(label.trim()));
    }
    if text.starts_with('[') {
        return atom_from_lexeme(text).map_err(|e| e.to_string());
    }
    match lex(text).map_err(|e| e.to_string())?.as_slice() {
        [(_, Lexeme::Atom(atom))] => Ok(atom.clone()),
        _ => Err(format!("'{text}' is not an atom")),
    }
}

struct BackboneDecoder<'a> {
    tokens: &'a [Token],
    pos: usize,
    builder: GraphBuilder,
    /// written index -> dense atom index
    index_map: HashMap<usize, usize>,
    diagnostics: Vec<Diagnostic>,
}

impl BackboneDecoder<'_> {
    fn diag(&mut self, kind: DiagnosticKind, message: impl Into<String>) {
        self.diagnostics.push(Diagnostic::new(kind, message));
    }

    /// Reads `<i>digits</i>` after an atom, if present.
    fn read_index(&mut self, dense: usize) {
        let Some(open) = self.tokens.get(self.pos) else {
            self.diag(DiagnosticKind::BadIndex, format!("atom {dense} has no index"));
            return;
        };
        if open.kind != TokenKind::IndexOpen {
            self.diag(DiagnosticKind::BadIndex, format!("atom {dense} has no index"));
            return;
        }
        let start = self.pos + 1;
        let mut end = start;
        while self.tokens.get(end).is_some_and(|t| t.kind == TokenKind::Digit) {
            end += 1;
        }
        let closed = self.tokens.get(end).is_some_and(|t| t.kind == TokenKind::IndexClose);
        let value = digits_value(&self.tokens[start..end]);
        self.pos = if closed { end + 1 } else { end };
        match (closed, value) {
            (true, Some(written)) => {
                if self.index_map.contains_key(&written) {
                    self.diag(DiagnosticKind::DuplicateIndex, format!("index {written} repeated"));
                    return;
                }
                if written != dense {
                    self.diag(DiagnosticKind::BadIndex, format!("index {written} at atom {dense}"));
                }
                self.index_map.insert(written, dense);
            }
            _ => self.diag(DiagnosticKind::TruncatedSection, format!("unterminated index at atom {dense}")),
        }
    }

    fn run(&mut self) {
        while let Some(token) = self.tokens.get(self.pos) {
            let token = token.clone();
            self.pos += 1;
            let lexeme = match token.kind {
                TokenKind::ChemAtom => match atom_from_token(&token.text) {
                    Ok(atom) => Lexeme::Atom(atom),
                    Err(msg) => {
                        self.diag(DiagnosticKind::UnknownToken, msg);
                        // skip its index too
                        while self.tokens.get(self.pos).is_some_and(|t| {
                            matches!(t.kind, TokenKind::IndexOpen | TokenKind::Digit | TokenKind::IndexClose)
                        }) {
                            self.pos += 1;
                        }
                        continue;
                    }
                },
                TokenKind::ChemBond => match token.text.as_str() {
                    "-" => Lexeme::Bond(Some(BondOrder::Single)),
                    "=" => Lexeme::Bond(Some(BondOrder::Double)),
                    "#" => Lexeme::Bond(Some(BondOrder::Triple)),
                    ":" => Lexeme::Bond(Some(BondOrder::Aromatic)),
                    _ => Lexeme::Bond(None),
                },
                TokenKind::Structural => match token.text.as_str() {
                    "(" => Lexeme::Open,
                    ")" => Lexeme::Close,
                    "." => Lexeme::Dot,
                    "|" => return,
                    t => match t.trim_start_matches('%').parse::<u16>() {
                        Ok(n) => Lexeme::Ring(n),
                        Err(_) => {
                            self.diag(DiagnosticKind::UnknownToken, format!("unexpected '{t}'"));
                            continue;
                        }
                    },
                },
                _ => {
                    self.diag(DiagnosticKind::UnknownToken, format!("unexpected '{}'", token.text));
                    continue;
                }
            };
            let is_atom = matches!(lexeme, Lexeme::Atom(_));
            let before = self.builder.n_atoms();
            let _ = self.builder.push(lexeme, self.pos);
            if is_atom {
                self.read_index(before);
            }
        }
    }
}

fn split_on<'a>(tokens: &'a [Token], sep: &str) -> Vec<&'a [Token]> {
    tokens.split(|t| t.is(TokenKind::Structural, sep)).collect()
}

fn text_of(tokens: &[Token]) -> String {
    tokens.iter().map(|t| t.text.as_str()).collect()
}

enum Section {
    Position(PositionVariation),
    Frequency(FrequencyVariation),
}

fn parse_section(tokens: &[Token], map: &HashMap<usize, usize>) -> Result<Section, Diagnostic> {
    let fields = split_on(tokens, ":");
    let truncated = || Diagnostic::new(DiagnosticKind::TruncatedSection, format!("incomplete section '{}'", text_of(tokens)));
    let bad = |what: &str| Diagnostic::new(DiagnosticKind::BadIndex, format!("{what} in '{}'", text_of(tokens)));
    let index_list = |field: &[Token]| -> Result<Vec<usize>, Diagnostic> {
        split_on(field, ".")
            .into_iter()
            .map(|part| {
                let written = digits_value(part).ok_or_else(|| bad("malformed index"))?;
                map.get(&written).copied().ok_or_else(|| bad("unknown index"))
            })
            .collect()
    };
    match text_of(fields[0]).as_str() {
        "m" => {
            let [_, endpoint, candidates] = fields.as_slice() else {
                return Err(truncated());
            };
            let endpoint = index_list(endpoint)?;
            let candidates = index_list(candidates)?;
            let [endpoint] = endpoint.as_slice() else {
                return Err(bad("several endpoints"));
            };
            let pv = PositionVariation::new(*endpoint, candidates);
            if pv.candidate_atoms.contains(endpoint) {
                return Err(bad("endpoint among candidates"));
            }
            Ok(Section::Position(pv))
        }
        "Sg" => {
            let [_, kind, atoms, label, conn] = fields.as_slice() else {
                return Err(truncated());
            };
            if text_of(kind) != "n" {
                return Err(Diagnostic::new(DiagnosticKind::UnknownToken, format!("Sg type '{}'", text_of(kind))));
            }
            let atoms = index_list(atoms)?;
            let label = unescape_label(&text_of(label))
                .map_err(|e| Diagnostic::new(DiagnosticKind::UnknownToken, e.to_string()))?;
            let conn: Connectivity = text_of(conn)
                .parse()
                .map_err(|_| Diagnostic::new(DiagnosticKind::UnknownToken, format!("connectivity '{}'", text_of(conn))))?;
            Ok(Section::Frequency(FrequencyVariation::new(atoms, label, conn)))
        }
        "" if tokens.is_empty() => Err(truncated()),
        other => Err(Diagnostic::new(DiagnosticKind::UnknownToken, format!("section '{other}'"))),
    }
}

fn decode_table(tokens: &[Token], diagnostics: &mut Vec<Diagnostic>) -> SubstituentTable {
    let syntax = |msg: String| Diagnostic::new(DiagnosticKind::TableSyntax, msg);
    let mut rest = tokens;
    match rest.first() {
        None => return SubstituentTable::new(),
        Some(t) if t.is(TokenKind::Table, TABLE_START) => rest = &rest[1..],
        Some(t) => {
            diagnostics.push(syntax(format!("table starts with '{}'", t.text)));
        }
    }
    let mut grouped = GroupedTable::default();
    let groups = rest.split(|t| t.is(TokenKind::Table, GROUP_START));
    for (k, group) in groups.enumerate() {
        if k == 0 {
            if !group.is_empty() {
                diagnostics.push(syntax(format!("stray table text '{}'", text_of(group))));
            }
            continue;
        }
        let parts: Vec<&[Token]> = group.split(|t| t.is(TokenKind::Table, VALUES_START)).collect();
        let [labels, values] = parts.as_slice() else {
            diagnostics.push(syntax(format!("group '{}' needs one <v>", text_of(group))));
            continue;
        };
        let items = |part: &[Token]| -> Option<Vec<String>> {
            part.split(|t| t.is(TokenKind::Table, SEPARATOR))
                .map(|item| {
                    let ok = !item.is_empty() && item.iter().all(|t| t.kind == TokenKind::Text);
                    ok.then(|| unescape_text(&text_of(item)))
                })
                .collect()
        };
        match (items(labels), items(values)) {
            (Some(labels), Some(substituents)) => grouped.groups.push(TableGroup {
                labels: labels.into_iter().map(|l| l.trim().to_string()).collect(),
                substituents,
            }),
            _ => diagnostics.push(syntax(format!("malformed group '{}'", text_of(group)))),
        }
    }
    // drop labels already defined by an earlier group
    let mut seen: Vec<String> = Vec::new();
    for group in &mut grouped.groups {
        group.labels.retain(|l| {
            if seen.contains(l) {
                diagnostics.push(syntax(format!("label '{l}' defined twice")));
                false
            } else {
                seen.push(l.clone());
                true
            }
        });
    }
    grouped.groups.retain(|g| !g.labels.is_empty());
    expand_table(&grouped).expect("label sets made disjoint")
}

/// Decodes a token sequence. Total over arbitrary input: malformed sections
/// are skipped whole and reported, atoms are renumbered densely.
pub fn decode_optimized(ts: &TokenSequence) -> Decoded {
    let mut decoder = BackboneDecoder {
        tokens: &ts.backbone,
        pos: 0,
        builder: GraphBuilder::lenient(),
        index_map: HashMap::new(),
        diagnostics: Vec::new(),
    };
    decoder.run();
    let extension = &ts.backbone[decoder.pos..];
    let (graph, smiles_errors) = decoder.builder.finish_lenient();
    let mut diagnostics = decoder.diagnostics;
    diagnostics.extend(smiles_errors.iter().map(smiles_diagnostic));
    if graph.is_empty() {
        diagnostics.push(Diagnostic::new(DiagnosticKind::TruncatedSection, "no atoms"));
    }

    let mut structure = MarkushStructure::new(graph);
    if decoder.pos > 0 && ts.backbone.get(decoder.pos - 1).is_some_and(|t| t.is(TokenKind::Structural, "|")) {
        for section in split_on(extension, ",") {
            match parse_section(section, &decoder.index_map) {
                Ok(Section::Position(pv)) => structure.position_variations.push(pv),
                Ok(Section::Frequency(fv)) => structure.frequency_variations.push(fv),
                Err(d) => diagnostics.push(d),
            }
        }
    }
    let table = decode_table(&ts.table, &mut diagnostics);
    Decoded {
        structure,
        table,
        diagnostics,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cxsmiles::{canonicalize_markush, markush_equal, parse_cxsmiles};

    const WORKED: &str = "[H]C1=C([*])C([*])=C([*])C=C1N(C)C(=O)C1=CC=CC(=C1)S(=O)(=O)NC1CCCC1.CCO.*[*].*[*] \
|$;;;X;;X;;G1;;;;;;;;;;;;;;;;;;;;;;;;;;G2;;G4$,m:29:24.25.26.27.28,m:32:14.19.15.18.17.16,m:34:24.25.26.27.28,Sg:n:28:w:ht,Sg:n:30: :ht|";

    fn table(entries: &[(&str, &[&str])]) -> SubstituentTable {
        entries.iter().map(|(l, s)| (*l, s.to_vec())).collect()
    }

    #[test]
    fn ethanol_backbone() {
        let ms = parse_cxsmiles("CCO").unwrap();
        let (ts, warnings) = encode_optimized(&ms, &SubstituentTable::new());
        assert!(warnings.is_empty());
        assert_eq!(ts.to_text(), "C<i>0</i>C<i>1</i>O<i>2</i>");
        assert!(ts.table.is_empty());
        assert_eq!(ts.backbone.len(), 12);
    }

    #[test]
    fn inline_variable_group() {
        let ms = parse_cxsmiles("C* |$;R1$|").unwrap();
        let text = encode_text(&ms, &table(&[("R1", &["Me"])]));
        assert_eq!(text, "C<i>0</i>{R1}<i>1</i><t><g>R1<v>Me");
        assert!(!text.contains('$'));
    }

    #[test]
    fn worked_example_round_trip() {
        let ms = parse_cxsmiles(WORKED).unwrap();
        let t = table(&[
            ("X", &["H", "Cl"]),
            ("G1", &["H", "Cl"]),
            ("G2", &["methyl"]),
            ("G4", &["OH"]),
            ("w", &["1", "2", "3", "4"]),
        ]);
        let (ts, warnings) = encode_optimized(&ms, &t);
        assert!(warnings.is_empty());
        let text = ts.to_text();
        assert!(!text.contains(' ') || text.find(' ') > text.find("<t>"));
        assert!(text.contains("|m:"));
        assert!(text.contains("<g>X<sep>G1<v>H<sep>Cl"));
        assert!(text.contains("<v>1-4"));
        assert_eq!(TokenSequence::from_text(&text), ts);
        let decoded = decode_optimized(&ts);
        assert!(decoded.is_clean(), "{:?}", decoded.diagnostics);
        assert!(markush_equal(&decoded.structure, &ms));
        assert_eq!(canonicalize_markush(&decoded.structure), canonicalize_markush(&ms));
        assert_eq!(decoded.table, t);
    }

    #[test]
    fn unused_table_label_warns() {
        let ms = parse_cxsmiles("C* |$;R1$|").unwrap();
        let (_, warnings) = encode_optimized(&ms, &table(&[("R1", &["H"]), ("R9", &["H"])]));
        assert_eq!(warnings, vec![EncodeWarning::LabelNotInStructure("R9".into())]);
    }

    #[test]
    fn empty_sequence() {
        let d = decode_optimized(&TokenSequence::default());
        assert_eq!(d.structure.graph.n_atoms(), 0);
        assert!(d.diagnostics.iter().any(|d| d.kind == DiagnosticKind::TruncatedSection));
    }

    #[test]
    fn index_gap_renumbers_densely() {
        let d = decode_text("C<i>0</i>C<i>1</i>O<i>3</i>|m:3:0.1");
        assert!(d.diagnostics.iter().any(|d| d.kind == DiagnosticKind::BadIndex));
        assert_eq!(d.structure.graph.n_atoms(), 3);
        assert_eq!(d.structure.position_variations, vec![PositionVariation::new(2, vec![0, 1])]);
    }

    #[test]
    fn duplicate_index_reported() {
        let d = decode_text("C<i>0</i>C<i>0</i>");
        assert!(d.diagnostics.iter().any(|d| d.kind == DiagnosticKind::DuplicateIndex));
        assert_eq!(d.structure.graph.n_atoms(), 2);
    }

    #[test]
    fn broken_sections_dropped_whole() {
        let d = decode_text("*<i>0</i>.c<i>1</i>1ccccc1|m:0:1.9,m:0,Sg:n:1::ht,q:1");
        let kinds: Vec<DiagnosticKind> = d.diagnostics.iter().map(|d| d.kind).collect();
        assert!(kinds.contains(&DiagnosticKind::BadIndex));
        assert!(kinds.contains(&DiagnosticKind::TruncatedSection));
        assert!(kinds.contains(&DiagnosticKind::UnknownToken));
        assert!(d.structure.position_variations.is_empty());
        assert_eq!(d.structure.frequency_variations.len(), 1);
    }

    #[test]
    fn malformed_backbone_and_table() {
        let d = decode_text("C<i>0</i>(C<i>1</i>?<t><g>R1<g><v>x<g>R2<v>a<sep>b");
        let kinds: Vec<DiagnosticKind> = d.diagnostics.iter().map(|d| d.kind).collect();
        assert!(kinds.contains(&DiagnosticKind::UnknownToken));
        assert!(kinds.contains(&DiagnosticKind::TruncatedSection));
        assert!(kinds.contains(&DiagnosticKind::TableSyntax));
        assert_eq!(d.table, table(&[("R2", &["a", "b"])]));
    }

    #[test]
    fn table_text_escaping() {
        let ms = parse_cxsmiles("C* |$;R 1$|").unwrap();
        let t = table(&[("R 1", &["a<b", "c&d", "<sep>"])]);
        let text = encode_text(&ms, &t);
        let d = decode_text(&text);
        assert!(d.is_clean(), "{:?}", d.diagnostics);
        assert_eq!(d.table, t);
        assert_eq!(d.structure.variable_groups()[0].label, "R 1");
    }
}
