//! Molecular graphs: atoms, bonds, SMILES I/O, canonical ranking, valence
//! accounting and path fingerprints.

mod canon;
pub mod elements;
mod fingerprint;
mod rings;
pub(crate) mod smiles;
mod valence;

use std::fmt;

use thiserror::Error;

pub use canon::{canonical_order, canonical_ranks, canonical_smiles};
pub(crate) use canon::{canonical_leaf, canonical_search, CanonicalLeaf};
pub use fingerprint::{path_bit, path_fingerprint, tanimoto, BitFingerprint, DEFAULT_FP_BITS, DEFAULT_MAX_PATH};
pub use smiles::{parse_smiles, write_smiles, SmilesError};
pub use valence::{hydrogen_counts, implicit_hydrogens, kekulize, open_valences, valence_errors, ValenceIssue};

/// Element symbol used for wildcard (`*`) atoms.
pub const WILDCARD: &str = "*";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BondOrder {
    Single,
    Double,
    Triple,
    Aromatic,
}

impl BondOrder {
    /// Valence contribution in half-bond units (aromatic = 3 halves).
    pub fn half_units(self) -> u32 {
        match self {
            BondOrder::Single => 2,
            BondOrder::Double => 4,
            BondOrder::Triple => 6,
            BondOrder::Aromatic => 3,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            BondOrder::Single => '-',
            BondOrder::Double => '=',
            BondOrder::Triple => '#',
            BondOrder::Aromatic => ':',
        }
    }

    pub(crate) fn code(self) -> u8 {
        match self {
            BondOrder::Single => 1,
            BondOrder::Double => 2,
            BondOrder::Triple => 3,
            BondOrder::Aromatic => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Atom {
    pub element: String,
    pub is_aromatic: bool,
    pub formal_charge: i8,
    /// `Some` for bracket atoms (hydrogen count is exact), `None` when
    /// hydrogens are implicit.
    pub explicit_h_count: Option<u8>,
    pub isotope: Option<u16>,
    /// Present iff the atom is a variable group (R-group) placeholder.
    pub variable_label: Option<String>,
}

impl Atom {
    pub fn new(element: impl Into<String>) -> Self {
        Atom {
            element: element.into(),
            is_aromatic: false,
            formal_charge: 0,
            explicit_h_count: None,
            isotope: None,
            variable_label: None,
        }
    }

    pub fn aromatic(element: impl Into<String>) -> Self {
        Atom {
            is_aromatic: true,
            ..Atom::new(element)
        }
    }

    pub fn wildcard() -> Self {
        Atom::new(WILDCARD)
    }

    /// A wildcard atom carrying a variable-group label.
    pub fn variable(label: impl Into<String>) -> Self {
        Atom {
            variable_label: Some(label.into()),
            ..Atom::wildcard()
        }
    }

    pub fn is_wildcard(&self) -> bool {
        self.element == WILDCARD
    }

    pub fn is_variable_group(&self) -> bool {
        self.variable_label.is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Bond {
    pub a: usize,
    pub b: usize,
    pub order: BondOrder,
}

impl Bond {
    pub fn other(&self, atom: usize) -> usize {
        if self.a == atom {
            self.b
        } else {
            self.a
        }
    }

    pub fn contains(&self, atom: usize) -> bool {
        self.a == atom || self.b == atom
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("bond endpoint {index} out of range for {n_atoms} atoms")]
    AtomOutOfRange { index: usize, n_atoms: usize },
    #[error("self bond on atom {0}")]
    SelfBond(usize),
    #[error("duplicate bond between atoms {0} and {1}")]
    DuplicateBond(usize, usize),
    #[error("not a permutation of {0} atom indices")]
    InvalidPermutation(usize),
}

/// Atoms and bonds of a (possibly disconnected) structure. Atom order is the
/// SMILES reading order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MolecularGraph {
    atoms: Vec<Atom>,
    bonds: Vec<Bond>,
}

/// Adjacency list entry: neighbor atom, bond order, bond index.
pub type Neighbor = (usize, BondOrder, usize);

impl MolecularGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn atom(&self, index: usize) -> &Atom {
        &self.atoms[index]
    }

    pub fn atom_mut(&mut self, index: usize) -> &mut Atom {
        &mut self.atoms[index]
    }

    pub fn n_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn add_atom(&mut self, atom: Atom) -> usize {
        self.atoms.push(atom);
        self.atoms.len() - 1
    }

    pub fn add_bond(&mut self, a: usize, b: usize, order: BondOrder) -> Result<usize, GraphError> {
        let n_atoms = self.atoms.len();
        for index in [a, b] {
            if index >= n_atoms {
                return Err(GraphError::AtomOutOfRange { index, n_atoms });
            }
        }
        if a == b {
            return Err(GraphError::SelfBond(a));
        }
        if self.bond_between(a, b).is_some() {
            return Err(GraphError::DuplicateBond(a.min(b), a.max(b)));
        }
        self.bonds.push(Bond { a, b, order });
        Ok(self.bonds.len() - 1)
    }

    pub fn bond_between(&self, a: usize, b: usize) -> Option<usize> {
        self.bonds
            .iter()
            .position(|bond| (bond.a == a && bond.b == b) || (bond.a == b && bond.b == a))
    }

    pub fn set_bond_order(&mut self, bond: usize, order: BondOrder) {
        self.bonds[bond].order = order;
    }

    /// Adjacency lists with neighbors in ascending atom index order.
    pub fn adjacency(&self) -> Vec<Vec<Neighbor>> {
        let mut adj = vec![Vec::new(); self.atoms.len()];
        for (i, bond) in self.bonds.iter().enumerate() {
            adj[bond.a].push((bond.b, bond.order, i));
            adj[bond.b].push((bond.a, bond.order, i));
        }
        for list in &mut adj {
            list.sort_unstable_by_key(|n| n.0);
        }
        adj
    }

    pub fn degree(&self, atom: usize) -> usize {
        self.bonds.iter().filter(|b| b.contains(atom)).count()
    }

    /// Connected components, each sorted ascending, ordered by smallest atom.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let adj = self.adjacency();
        let mut seen = vec![false; self.atoms.len()];
        let mut out = Vec::new();
        for start in 0..self.atoms.len() {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut stack = vec![start];
            let mut comp = Vec::new();
            while let Some(v) = stack.pop() {
                comp.push(v);
                for &(n, _, _) in &adj[v] {
                    if !seen[n] {
                        seen[n] = true;
                        stack.push(n);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Smallest-cycle ring set; each ring lists atoms in cycle order.
    pub fn rings(&self) -> Vec<Vec<usize>> {
        rings::ring_set(self)
    }

    /// Reorders atoms so that new position `k` holds old atom `order[k]`.
    pub fn permuted(&self, order: &[usize]) -> Result<MolecularGraph, GraphError> {
        let n = self.atoms.len();
        let inverse = inverse_permutation(order, n)?;
        let atoms = order.iter().map(|&old| self.atoms[old].clone()).collect();
        let bonds = self
            .bonds
            .iter()
            .map(|b| Bond {
                a: inverse[b.a],
                b: inverse[b.b],
                order: b.order,
            })
            .collect();
        Ok(MolecularGraph { atoms, bonds })
    }

    /// Orients every bond low index first and sorts the bond list, so that
    /// equal graphs in the same atom order compare equal.
    pub fn normalize_bonds(&mut self) {
        for bond in &mut self.bonds {
            if bond.a > bond.b {
                std::mem::swap(&mut bond.a, &mut bond.b);
            }
        }
        self.bonds.sort_unstable_by_key(|b| (b.a, b.b));
    }

    /// Deletes the given atoms and their bonds. Returns the new graph and a
    /// map from old atom index to new index.
    pub fn without_atoms(&self, remove: &[bool]) -> (MolecularGraph, Vec<Option<usize>>) {
        let mut map = vec![None; self.atoms.len()];
        let mut atoms = Vec::new();
        for (i, atom) in self.atoms.iter().enumerate() {
            if !remove.get(i).copied().unwrap_or(false) {
                map[i] = Some(atoms.len());
                atoms.push(atom.clone());
            }
        }
        let bonds = self
            .bonds
            .iter()
            .filter_map(|b| {
                Some(Bond {
                    a: map[b.a]?,
                    b: map[b.b]?,
                    order: b.order,
                })
            })
            .collect();
        (MolecularGraph { atoms, bonds }, map)
    }
}

impl fmt::Display for MolecularGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&write_smiles(self, None).map_err(|_| fmt::Error)?)
    }
}

/// Inverts `order` (position -> atom) into atom -> position, validating it.
pub(crate) fn inverse_permutation(order: &[usize], n: usize) -> Result<Vec<usize>, GraphError> {
    if order.len() != n {
        return Err(GraphError::InvalidPermutation(n));
    }
    let mut inverse = vec![usize::MAX; n];
    for (pos, &atom) in order.iter().enumerate() {
        if atom >= n || inverse[atom] != usize::MAX {
            return Err(GraphError::InvalidPermutation(n));
        }
        inverse[atom] = pos;
    }
    Ok(inverse)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_bond_rejects_self_and_duplicates() {
        let mut g = MolecularGraph::new();
        let a = g.add_atom(Atom::new("C"));
        let b = g.add_atom(Atom::new("O"));
        assert_eq!(g.add_bond(a, a, BondOrder::Single), Err(GraphError::SelfBond(0)));
        g.add_bond(a, b, BondOrder::Single).unwrap();
        assert_eq!(g.add_bond(b, a, BondOrder::Double), Err(GraphError::DuplicateBond(0, 1)));
        assert!(matches!(
            g.add_bond(a, 7, BondOrder::Single),
            Err(GraphError::AtomOutOfRange { index: 7, .. })
        ));
    }

    #[test]
    fn permuted_rejects_non_permutations() {
        let g = parse_smiles("CCO").unwrap();
        assert!(g.permuted(&[0, 0, 1]).is_err());
        assert!(g.permuted(&[0, 1]).is_err());
        let p = g.permuted(&[2, 1, 0]).unwrap();
        assert_eq!(p.atom(0).element, "O");
    }

    #[test]
    fn without_atoms_remaps_bonds() {
        let g = parse_smiles("CC(O)N").unwrap();
        let (h, map) = g.without_atoms(&[false, false, true, false]);
        assert_eq!(h.n_atoms(), 3);
        assert_eq!(map, vec![Some(0), Some(1), None, Some(2)]);
        assert_eq!(h.bonds().len(), 2);
    }
}
