//! SMILES reader and writer over the supported subset: organic and bracket
//! atoms, wildcards, branches, ring closures (`1`..`9`, `%nn`), bond symbols
//! and dot-separated components. Stereo markers are accepted and dropped.

use std::collections::BTreeMap;

use thiserror::Error;

use super::elements::{is_element, is_organic, AROMATIC_CAPABLE};
use super::{inverse_permutation, valence, Atom, BondOrder, GraphError, MolecularGraph};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SmilesError {
    #[error("empty input")]
    EmptyInput,
    #[error("unclosed ring-closure {0}")]
    UnbalancedRing(u16),
    #[error("unbalanced branch at position {0}")]
    UnbalancedBranch(usize),
    #[error("unknown symbol '{symbol}' at position {pos}")]
    UnknownSymbol { pos: usize, symbol: String },
    #[error("misplaced {what} at position {pos}")]
    Misplaced { pos: usize, what: &'static str },
    #[error("invalid bond at position {pos}: {source}")]
    InvalidBond { pos: usize, source: GraphError },
    #[error("conflicting ring-closure bond orders for ring {0}")]
    RingBondConflict(u16),
    #[error("order is not a permutation of the atom indices")]
    InvalidPermutation,
}

/// One lexical unit of a SMILES string.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Lexeme {
    Atom(Atom),
    /// Explicit bond symbol; `None` for the directional `/` and `\` markers.
    Bond(Option<BondOrder>),
    Open,
    Close,
    Ring(u16),
    Dot,
}

pub fn parse_smiles(text: &str) -> Result<MolecularGraph, SmilesError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(SmilesError::EmptyInput);
    }
    let mut builder = GraphBuilder::strict();
    for (pos, lexeme) in lex(text)? {
        builder.push(lexeme, pos)?;
    }
    builder.finish()
}

/// Splits SMILES text into lexemes with their byte offsets.
pub(crate) fn lex(text: &str) -> Result<Vec<(usize, Lexeme)>, SmilesError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        let lexeme = match c {
            '(' => {
                i += 1;
                Lexeme::Open
            }
            ')' => {
                i += 1;
                Lexeme::Close
            }
            '.' => {
                i += 1;
                Lexeme::Dot
            }
            '-' | '=' | '#' | ':' | '/' | '\\' => {
                i += 1;
                Lexeme::Bond(match c {
                    '-' => Some(BondOrder::Single),
                    '=' => Some(BondOrder::Double),
                    '#' => Some(BondOrder::Triple),
                    ':' => Some(BondOrder::Aromatic),
                    _ => None,
                })
            }
            '0'..='9' => {
                i += 1;
                Lexeme::Ring(c as u16 - '0' as u16)
            }
            '%' => {
                let digits = text.get(i + 1..i + 3).filter(|d| d.bytes().all(|b| b.is_ascii_digit()));
                match digits {
                    Some(d) => {
                        i += 3;
                        Lexeme::Ring(d.parse().expect("two ascii digits"))
                    }
                    None => {
                        return Err(SmilesError::UnknownSymbol {
                            pos: start,
                            symbol: "%".into(),
                        })
                    }
                }
            }
            '[' => {
                let end = text[i..].find(']').ok_or(SmilesError::UnknownSymbol {
                    pos: start,
                    symbol: "[".into(),
                })?;
                let lexeme = &text[i..=i + end];
                i += end + 1;
                Lexeme::Atom(atom_from_lexeme(lexeme).map_err(|e| match e {
                    SmilesError::UnknownSymbol { symbol, .. } => SmilesError::UnknownSymbol { pos: start, symbol },
                    other => other,
                })?)
            }
            _ => {
                let (atom, len) = organic_atom(&text[i..]).ok_or_else(|| SmilesError::UnknownSymbol {
                    pos: start,
                    symbol: text[i..].chars().next().map(String::from).unwrap_or_default(),
                })?;
                i += len;
                Lexeme::Atom(atom)
            }
        };
        out.push((start, lexeme));
    }
    Ok(out)
}

fn organic_atom(rest: &str) -> Option<(Atom, usize)> {
    if rest.starts_with('*') {
        return Some((Atom::wildcard(), 1));
    }
    for two in ["Cl", "Br"] {
        if rest.starts_with(two) {
            return Some((Atom::new(two), 2));
        }
    }
    let c = rest.chars().next()?;
    match c {
        'B' | 'C' | 'N' | 'O' | 'P' | 'S' | 'F' | 'I' => Some((Atom::new(c.to_string()), 1)),
        'b' | 'c' | 'n' | 'o' | 'p' | 's' => Some((Atom::aromatic(c.to_ascii_uppercase().to_string()), 1)),
        _ => None,
    }
}

/// Parses a single atom lexeme: an organic-subset symbol, `*`, or a full
/// bracket atom such as `[NH3+]`.
pub(crate) fn atom_from_lexeme(lexeme: &str) -> Result<Atom, SmilesError> {
    let unknown = || SmilesError::UnknownSymbol {
        pos: 0,
        symbol: lexeme.to_string(),
    };
    let Some(inner) = lexeme.strip_prefix('[').and_then(|s| s.strip_suffix(']')) else {
        return match organic_atom(lexeme) {
            Some((atom, len)) if len == lexeme.len() => Ok(atom),
            _ => Err(unknown()),
        };
    };
    let b = inner.as_bytes();
    let mut i = 0;
    let digits = |i: &mut usize| -> Option<u32> {
        let start = *i;
        while *i < b.len() && b[*i].is_ascii_digit() {
            *i += 1;
        }
        (*i > start).then(|| inner[start..*i].parse().ok()).flatten()
    };
    let isotope = digits(&mut i).map(|v| v as u16);

    let rest = &inner[i..];
    let (element, aromatic, len) = if rest.starts_with('*') {
        ("*".to_string(), false, 1)
    } else if let Some(sym) = ["se", "as", "te"].iter().find(|s| rest.starts_with(**s)) {
        (capitalize(sym), true, 2)
    } else if let Some(c) = rest.chars().next().filter(|c| matches!(c, 'b' | 'c' | 'n' | 'o' | 'p' | 's')) {
        (c.to_ascii_uppercase().to_string(), true, 1)
    } else {
        let two = rest.get(..2).filter(|s| {
            let mut cs = s.chars();
            cs.next().is_some_and(|c| c.is_ascii_uppercase())
                && cs.next().is_some_and(|c| c.is_ascii_lowercase())
                && is_element(s)
        });
        match two {
            Some(s) => (s.to_string(), false, 2),
            None => {
                let one = rest.get(..1).filter(|s| is_element(s)).ok_or_else(unknown)?;
                (one.to_string(), false, 1)
            }
        }
    };
    if aromatic && !AROMATIC_CAPABLE.contains(&element.as_str()) {
        return Err(unknown());
    }
    i += len;

    // chirality, discarded
    if i < b.len() && b[i] == b'@' {
        while i < b.len() && b[i] == b'@' {
            i += 1;
        }
        if let Some(tag) = inner.get(i..i + 2).filter(|t| ["TH", "AL", "SP", "TB", "OH"].contains(t)) {
            i += tag.len();
            digits(&mut i);
        }
    }

    let mut h = 0u8;
    if i < b.len() && b[i] == b'H' {
        i += 1;
        h = digits(&mut i).unwrap_or(1) as u8;
    }

    let mut charge = 0i32;
    if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
        let sign = if b[i] == b'+' { 1 } else { -1 };
        let sym = b[i];
        i += 1;
        if let Some(n) = digits(&mut i) {
            charge = sign * n as i32;
        } else {
            charge = sign;
            while i < b.len() && b[i] == sym {
                charge += sign;
                i += 1;
            }
        }
    }

    // atom class, discarded
    if i < b.len() && b[i] == b':' {
        i += 1;
        digits(&mut i).ok_or_else(unknown)?;
    }
    if i != b.len() {
        return Err(unknown());
    }

    let mut atom = Atom::new(element);
    atom.is_aromatic = aromatic;
    atom.isotope = isotope;
    atom.formal_charge = charge.clamp(i8::MIN as i32, i8::MAX as i32) as i8;
    atom.explicit_h_count = Some(h);
    if atom.is_wildcard() && atom.formal_charge == 0 && atom.isotope.is_none() && h == 0 {
        atom.explicit_h_count = None;
    }
    Ok(atom)
}

fn capitalize(s: &str) -> String {
    let mut cs = s.chars();
    match cs.next() {
        Some(c) => c.to_ascii_uppercase().to_string() + cs.as_str(),
        None => String::new(),
    }
}

/// Incremental graph construction from a lexeme stream. In lenient mode
/// malformed lexemes are recorded and skipped instead of aborting.
pub(crate) struct GraphBuilder {
    graph: MolecularGraph,
    prev: Option<usize>,
    pending: Option<(usize, Option<BondOrder>)>,
    branches: Vec<Option<usize>>,
    rings: BTreeMap<u16, (usize, Option<BondOrder>)>,
    lenient: bool,
    diagnostics: Vec<SmilesError>,
}

impl GraphBuilder {
    pub(crate) fn strict() -> Self {
        Self::new(false)
    }

    pub(crate) fn lenient() -> Self {
        Self::new(true)
    }

    fn new(lenient: bool) -> Self {
        GraphBuilder {
            graph: MolecularGraph::new(),
            prev: None,
            pending: None,
            branches: Vec::new(),
            rings: BTreeMap::new(),
            lenient,
            diagnostics: Vec::new(),
        }
    }

    pub(crate) fn n_atoms(&self) -> usize {
        self.graph.n_atoms()
    }

    fn fail(&mut self, err: SmilesError) -> Result<(), SmilesError> {
        if self.lenient {
            self.diagnostics.push(err);
            Ok(())
        } else {
            Err(err)
        }
    }

    fn implicit_order(&self, a: usize, b: usize) -> BondOrder {
        if self.graph.atom(a).is_aromatic && self.graph.atom(b).is_aromatic {
            BondOrder::Aromatic
        } else {
            BondOrder::Single
        }
    }

    fn connect(&mut self, a: usize, b: usize, order: Option<BondOrder>, pos: usize) -> Result<(), SmilesError> {
        let order = order.unwrap_or_else(|| self.implicit_order(a, b));
        if let Err(source) = self.graph.add_bond(a, b, order) {
            self.fail(SmilesError::InvalidBond { pos, source })?;
        }
        Ok(())
    }

    pub(crate) fn push(&mut self, lexeme: Lexeme, pos: usize) -> Result<(), SmilesError> {
        match lexeme {
            Lexeme::Atom(atom) => {
                self.atom(atom, pos)?;
            }
            Lexeme::Bond(order) => {
                if self.pending.is_some() || self.prev.is_none() {
                    self.fail(SmilesError::Misplaced { pos, what: "bond" })?;
                } else {
                    self.pending = Some((pos, order));
                }
            }
            Lexeme::Open => {
                if self.prev.is_none() || self.pending.is_some() {
                    self.fail(SmilesError::UnbalancedBranch(pos))?;
                } else {
                    self.branches.push(self.prev);
                }
            }
            Lexeme::Close => match self.branches.pop() {
                Some(prev) if self.pending.is_none() => self.prev = prev,
                Some(prev) => {
                    self.pending = None;
                    self.prev = prev;
                    self.fail(SmilesError::Misplaced { pos, what: "bond" })?;
                }
                None => self.fail(SmilesError::UnbalancedBranch(pos))?,
            },
            Lexeme::Ring(n) => {
                let Some(prev) = self.prev else {
                    return self.fail(SmilesError::Misplaced { pos, what: "ring closure" });
                };
                let order = self.pending.take().and_then(|(_, o)| o);
                match self.rings.remove(&n) {
                    Some((other, first)) => {
                        let order = match (first, order) {
                            (Some(x), Some(y)) if x != y => {
                                return self.fail(SmilesError::RingBondConflict(n));
                            }
                            (x, y) => x.or(y),
                        };
                        self.connect(other, prev, order, pos)?;
                    }
                    None => {
                        self.rings.insert(n, (prev, order));
                    }
                }
            }
            Lexeme::Dot => {
                if self.pending.is_some() {
                    self.pending = None;
                    self.fail(SmilesError::Misplaced { pos, what: "bond" })?;
                }
                self.prev = None;
            }
        }
        Ok(())
    }

    pub(crate) fn atom(&mut self, atom: Atom, pos: usize) -> Result<usize, SmilesError> {
        let idx = self.graph.add_atom(atom);
        if let Some(prev) = self.prev {
            let order = self.pending.take().and_then(|(_, o)| o);
            self.connect(prev, idx, order, pos)?;
        }
        self.pending = None;
        self.prev = Some(idx);
        Ok(idx)
    }

    pub(crate) fn finish(mut self) -> Result<MolecularGraph, SmilesError> {
        if let Some((pos, _)) = self.pending.take() {
            self.fail(SmilesError::Misplaced { pos, what: "bond" })?;
        }
        if let Some((&n, _)) = self.rings.iter().next() {
            self.fail(SmilesError::UnbalancedRing(n))?;
        }
        if !self.branches.is_empty() {
            self.fail(SmilesError::UnbalancedBranch(usize::MAX))?;
        }
        if self.graph.is_empty() && !self.lenient {
            return Err(SmilesError::EmptyInput);
        }
        Ok(self.graph)
    }

    /// Lenient completion: returns the graph together with every recorded
    /// problem.
    pub(crate) fn finish_lenient(mut self) -> (MolecularGraph, Vec<SmilesError>) {
        self.lenient = true;
        let mut diagnostics = std::mem::take(&mut self.diagnostics);
        let rings: Vec<u16> = self.rings.keys().copied().collect();
        let pending = self.pending.take();
        let unclosed = !self.branches.is_empty();
        let graph = self.graph;
        if let Some((pos, _)) = pending {
            diagnostics.push(SmilesError::Misplaced { pos, what: "bond" });
        }
        diagnostics.extend(rings.into_iter().map(SmilesError::UnbalancedRing));
        if unclosed {
            diagnostics.push(SmilesError::UnbalancedBranch(usize::MAX));
        }
        (graph, diagnostics)
    }
}

/// Writer output unit; atoms refer to graph indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum WriteItem {
    Atom(usize),
    Bond(BondOrder),
    Open,
    Close,
    Ring(u16),
    Dot,
}

/// Lays out a depth-first SMILES walk. `rank[i]` is the priority of atom `i`
/// (lower is visited first). Returns the items and the emitted atom order.
pub(crate) fn layout(graph: &MolecularGraph, rank: &[usize]) -> (Vec<WriteItem>, Vec<usize>) {
    let n = graph.n_atoms();
    let mut adj = graph.adjacency();
    for list in &mut adj {
        list.sort_unstable_by_key(|nb| rank[nb.0]);
    }
    let mut by_rank: Vec<usize> = (0..n).collect();
    by_rank.sort_unstable_by_key(|&i| rank[i]);

    let mut visited = vec![false; n];
    let mut bond_used = vec![false; graph.bonds().len()];
    let mut children: Vec<Vec<(usize, BondOrder)>> = vec![Vec::new(); n];
    // ring bonds per atom: (partner, order, bond index)
    let mut ring_bonds: Vec<Vec<(usize, BondOrder, usize)>> = vec![Vec::new(); n];
    let mut preorder = Vec::with_capacity(n);
    let mut roots = Vec::new();

    for &root in &by_rank {
        if visited[root] {
            continue;
        }
        roots.push(root);
        // iterative DFS keeping per-frame neighbor cursors
        let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
        visited[root] = true;
        preorder.push(root);
        while let Some(frame) = stack.last_mut() {
            let (v, cursor) = *frame;
            if cursor >= adj[v].len() {
                stack.pop();
                continue;
            }
            frame.1 += 1;
            let (nb, order, bond) = adj[v][cursor];
            if bond_used[bond] {
                continue;
            }
            bond_used[bond] = true;
            if visited[nb] {
                ring_bonds[v].push((nb, order, bond));
                ring_bonds[nb].push((v, order, bond));
            } else {
                visited[nb] = true;
                preorder.push(nb);
                children[v].push((nb, order));
                stack.push((nb, 0));
            }
        }
    }

    let mut position = vec![0usize; n];
    for (p, &a) in preorder.iter().enumerate() {
        position[a] = p;
    }

    let implicit = |a: usize, b: usize| {
        if graph.atom(a).is_aromatic && graph.atom(b).is_aromatic {
            BondOrder::Aromatic
        } else {
            BondOrder::Single
        }
    };

    let mut items = Vec::with_capacity(3 * n);
    let mut digit_of_bond: BTreeMap<usize, u16> = BTreeMap::new();
    let mut free_digits: Vec<bool> = vec![true; 100];
    enum Step {
        Enter(usize, Option<BondOrder>, usize),
        Open,
        Close,
    }
    for (ci, &root) in roots.iter().enumerate() {
        if ci > 0 {
            items.push(WriteItem::Dot);
        }
        let mut stack = vec![Step::Enter(root, None, usize::MAX)];
        while let Some(step) = stack.pop() {
            let (v, incoming, parent) = match step {
                Step::Open => {
                    items.push(WriteItem::Open);
                    continue;
                }
                Step::Close => {
                    items.push(WriteItem::Close);
                    continue;
                }
                Step::Enter(v, incoming, parent) => (v, incoming, parent),
            };
            if let Some(order) = incoming {
                if order != implicit(parent, v) {
                    items.push(WriteItem::Bond(order));
                }
            }
            items.push(WriteItem::Atom(v));
            let mut rings = ring_bonds[v].clone();
            rings.sort_unstable_by_key(|&(partner, _, _)| position[partner]);
            // closings first, then openings
            for &(_, _, bond) in rings.iter().filter(|r| position[r.0] < position[v]) {
                let digit = digit_of_bond.remove(&bond).expect("ring opened earlier");
                free_digits[digit as usize] = true;
                items.push(WriteItem::Ring(digit));
            }
            for &(partner, order, bond) in rings.iter().filter(|r| position[r.0] > position[v]) {
                let digit = (1..100).find(|&d| free_digits[d]).expect("fewer than 100 open rings") as u16;
                free_digits[digit as usize] = false;
                digit_of_bond.insert(bond, digit);
                if order != implicit(v, partner) {
                    items.push(WriteItem::Bond(order));
                }
                items.push(WriteItem::Ring(digit));
            }
            // all children but the last are branches; pushed in reverse
            let kids = &children[v];
            if let Some((&(last, last_order), rest)) = kids.split_last() {
                stack.push(Step::Enter(last, Some(last_order), v));
                for &(child, order) in rest.iter().rev() {
                    stack.push(Step::Close);
                    stack.push(Step::Enter(child, Some(order), v));
                    stack.push(Step::Open);
                }
            }
        }
    }
    (items, preorder)
}

/// SMILES text for an atom, without any variable label.
pub(crate) fn atom_lexeme(graph: &MolecularGraph, index: usize) -> String {
    atom_lexeme_with(graph, index, &mut || valence::hydrogen_counts(graph))
}

/// As [`atom_lexeme`], taking hydrogen counts from a lazily evaluated
/// per-graph table.
pub(crate) fn atom_lexeme_with(
    graph: &MolecularGraph,
    index: usize,
    hydrogens: &mut dyn FnMut() -> Vec<u8>,
) -> String {
    let atom = graph.atom(index);
    let symbol = if atom.is_aromatic {
        atom.element.to_ascii_lowercase()
    } else {
        atom.element.clone()
    };
    if atom.is_wildcard()
        && atom.formal_charge == 0
        && atom.isotope.is_none()
        && atom.explicit_h_count.unwrap_or(0) == 0
    {
        return "*".into();
    }
    if atom.explicit_h_count.is_none() && atom.formal_charge == 0 && atom.isotope.is_none() && is_organic(&atom.element) {
        return symbol;
    }
    let h = atom.explicit_h_count.unwrap_or_else(|| hydrogens()[index]);
    let mut s = String::from("[");
    if let Some(iso) = atom.isotope {
        s.push_str(&iso.to_string());
    }
    s.push_str(&symbol);
    match h {
        0 => {}
        1 => s.push('H'),
        n => {
            s.push('H');
            s.push_str(&n.to_string());
        }
    }
    match atom.formal_charge {
        0 => {}
        1 => s.push('+'),
        -1 => s.push('-'),
        c if c > 0 => s.push_str(&format!("+{c}")),
        c => s.push_str(&format!("-{}", -c)),
    }
    s.push(']');
    s
}

pub(crate) fn ring_label(digit: u16) -> String {
    if digit < 10 {
        digit.to_string()
    } else {
        format!("%{digit:02}")
    }
}

pub(crate) fn render_items(graph: &MolecularGraph, items: &[WriteItem]) -> String {
    let mut cache: Option<Vec<u8>> = None;
    let mut hydrogens = || cache.get_or_insert_with(|| valence::hydrogen_counts(graph)).clone();
    let mut s = String::new();
    for item in items {
        match *item {
            WriteItem::Atom(i) => s.push_str(&atom_lexeme_with(graph, i, &mut hydrogens)),
            WriteItem::Bond(o) => s.push(o.symbol()),
            WriteItem::Open => s.push('('),
            WriteItem::Close => s.push(')'),
            WriteItem::Ring(d) => s.push_str(&ring_label(d)),
            WriteItem::Dot => s.push('.'),
        }
    }
    s
}

/// Writes SMILES. With `order` (position -> atom index) atoms are visited
/// with that priority; without it the graph's own order is used.
pub fn write_smiles(graph: &MolecularGraph, order: Option<&[usize]>) -> Result<String, SmilesError> {
    let rank = match order {
        Some(order) => inverse_permutation(order, graph.n_atoms()).map_err(|_| SmilesError::InvalidPermutation)?,
        None => (0..graph.n_atoms()).collect(),
    };
    let (items, _) = layout(graph, &rank);
    Ok(render_items(graph, &items))
}

#[cfg(test)]
mod tests {
    use super::*;

    const WORKED_SMILES: &str =
        "[H]C1=C([*])C([*])=C([*])C=C1N(C)C(=O)C1=CC=CC(=C1)S(=O)(=O)NC1CCCC1.CCO.*[*].*[*]";

    #[test]
    fn parses_minimal_chain() {
        let g = parse_smiles("CCO").unwrap();
        assert_eq!(g.n_atoms(), 3);
        assert_eq!(g.bonds().len(), 2);
        assert!(g.bonds().iter().all(|b| b.order == BondOrder::Single));
        assert_eq!(g.atom(2).element, "O");
    }

    #[test]
    fn parses_worked_markush_backbone() {
        let g = parse_smiles(WORKED_SMILES).unwrap();
        assert_eq!(g.components().len(), 4);
        assert_eq!(g.atoms().iter().filter(|a| a.is_wildcard()).count(), 7);
        assert_eq!(g.n_atoms(), 36);
        assert!(g.atoms().iter().all(|a| !a.is_variable_group()));
    }

    #[test]
    fn malformed_inputs() {
        assert_eq!(parse_smiles("C1CC"), Err(SmilesError::UnbalancedRing(1)));
        assert!(matches!(parse_smiles("CC(C"), Err(SmilesError::UnbalancedBranch(_))));
        assert!(matches!(parse_smiles("CC)C"), Err(SmilesError::UnbalancedBranch(_))));
        assert!(matches!(parse_smiles("CQ"), Err(SmilesError::UnknownSymbol { pos: 1, .. })));
        assert_eq!(parse_smiles("  "), Err(SmilesError::EmptyInput));
        assert!(matches!(parse_smiles("C11"), Err(SmilesError::InvalidBond { .. })));
    }

    #[test]
    fn bracket_atoms() {
        let g = parse_smiles("[13CH3][NH3+].[O-]C(=O)c1cc[nH]c1").unwrap();
        assert_eq!(g.atom(0).isotope, Some(13));
        assert_eq!(g.atom(0).explicit_h_count, Some(3));
        assert_eq!(g.atom(1).formal_charge, 1);
        assert_eq!(g.atom(2).formal_charge, -1);
        let nh = g.atoms().iter().find(|a| a.element == "N" && a.is_aromatic).unwrap();
        assert_eq!(nh.explicit_h_count, Some(1));
        assert_eq!(parse_smiles("[Fe++]").unwrap().atom(0).formal_charge, 2);
        assert_eq!(parse_smiles("[Cl-]").unwrap().atom(0).element, "Cl");
    }

    #[test]
    fn stereo_markers_are_dropped() {
        let a = parse_smiles("F/C=C/F").unwrap();
        let b = parse_smiles("FC=CF").unwrap();
        assert_eq!(a, b);
        let c = parse_smiles("N[C@@H](C)C(=O)O").unwrap();
        assert_eq!(c.atom(1).explicit_h_count, Some(1));
    }

    #[test]
    fn ring_bonds_and_percent_closures() {
        let g = parse_smiles("C%12CCC%12").unwrap();
        assert_eq!(g.bonds().len(), 4);
        let g = parse_smiles("C=1CCC1").unwrap();
        assert!(g.bonds().iter().any(|b| b.order == BondOrder::Double));
        assert_eq!(parse_smiles("C=1CCC#1"), Err(SmilesError::RingBondConflict(1)));
    }

    #[test]
    fn aromatic_implicit_bonds() {
        let g = parse_smiles("c1ccccc1-c1ccccc1").unwrap();
        let single = g.bonds().iter().filter(|b| b.order == BondOrder::Single).count();
        assert_eq!(single, 1);
        assert_eq!(write_smiles(&g, None).unwrap(), "c1ccccc1-c1ccccc1");
    }

    #[test]
    fn writes_in_given_order() {
        let g = parse_smiles("CCO").unwrap();
        assert_eq!(write_smiles(&g, None).unwrap(), "CCO");
        assert_eq!(write_smiles(&g, Some(&[2, 1, 0])).unwrap(), "OCC");
        assert_eq!(write_smiles(&g, Some(&[0, 0, 1])), Err(SmilesError::InvalidPermutation));
    }

    #[test]
    fn writer_preserves_parse_order() {
        for s in [
            WORKED_SMILES,
            "CC(O)N",
            "C1CC(C)C1",
            "C1CCCC2CCCCC12",
            "O=C(O)c1ccccc1OC(C)=O",
            "[H]C([H])([H])[H]",
            "C12C3C4C1C5C2C3C45",
        ] {
            let g = parse_smiles(s).unwrap();
            let out = write_smiles(&g, None).unwrap();
            let back = parse_smiles(&out).unwrap();
            assert_eq!(back, g, "{s} -> {out}");
        }
    }

    #[test]
    fn writes_bracket_forms() {
        let g = parse_smiles("[nH]1cccc1.[NH4+].[2H]O[*]").unwrap();
        assert_eq!(write_smiles(&g, None).unwrap(), "[nH]1cccc1.[NH4+].[2H]O*");
    }
}
