//! Daylight-style linear path fingerprint.
//!
//! Every simple path of 0..=`max_path_len` bonds is read as its
//! (element, aromaticity, bond order) sequence, oriented to the
//! lexicographically smaller of its two readings, hashed with seeded FNV-1a
//! and folded onto one bit.

use std::hash::Hasher;

use fnv::FnvHasher;

use super::{Atom, BondOrder, MolecularGraph};

pub const DEFAULT_MAX_PATH: usize = 7;
pub const DEFAULT_FP_BITS: usize = 2048;

const HASH_SEED: u64 = 0x6d61_726b_7573_6821;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitFingerprint {
    words: Vec<u64>,
    n_bits: usize,
}

impl BitFingerprint {
    pub fn new(n_bits: usize) -> Self {
        BitFingerprint {
            words: vec![0; n_bits.div_ceil(64)],
            n_bits,
        }
    }

    pub fn len(&self) -> usize {
        self.n_bits
    }

    pub fn is_empty(&self) -> bool {
        self.n_bits == 0
    }

    pub fn set(&mut self, bit: usize) {
        self.words[bit / 64] |= 1 << (bit % 64);
    }

    pub fn get(&self, bit: usize) -> bool {
        self.words[bit / 64] >> (bit % 64) & 1 == 1
    }

    /// Population count.
    pub fn n_set(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn set_bits(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n_bits).filter(|&b| self.get(b))
    }

    pub fn intersection_count(&self, other: &Self) -> usize {
        self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones() as usize).sum()
    }

    pub fn union_count(&self, other: &Self) -> usize {
        self.words.iter().zip(&other.words).map(|(a, b)| (a | b).count_ones() as usize).sum()
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }
}

/// Tanimoto coefficient in [0, 1]; two empty fingerprints score 1.
pub fn tanimoto(a: &BitFingerprint, b: &BitFingerprint) -> f64 {
    let union = a.union_count(b);
    if union == 0 {
        return 1.0;
    }
    a.intersection_count(b) as f64 / union as f64
}

fn atom_token(atom: &Atom) -> String {
    if atom.is_aromatic {
        atom.element.to_ascii_lowercase()
    } else {
        atom.element.clone()
    }
}

fn bond_token(order: BondOrder) -> String {
    order.symbol().to_string()
}

/// Bit index for one path given as its atoms and the bonds between them.
pub fn path_bit(atoms: &[&Atom], bonds: &[BondOrder], n_bits: usize) -> usize {
    debug_assert_eq!(atoms.len(), bonds.len() + 1);
    let mut forward = Vec::with_capacity(atoms.len() + bonds.len());
    for (k, atom) in atoms.iter().enumerate() {
        forward.push(atom_token(atom));
        if let Some(&bond) = bonds.get(k) {
            forward.push(bond_token(bond));
        }
    }
    let reverse: Vec<String> = forward.iter().rev().cloned().collect();
    let key = if reverse < forward { reverse } else { forward };
    let mut hasher = FnvHasher::with_key(HASH_SEED);
    for token in &key {
        hasher.write(token.as_bytes());
        hasher.write_u8(0x1f);
    }
    (hasher.finish() % n_bits as u64) as usize
}

pub fn path_fingerprint(graph: &MolecularGraph, max_path_len: usize, n_bits: usize) -> BitFingerprint {
    let mut fp = BitFingerprint::new(n_bits);
    if n_bits == 0 {
        return fp;
    }
    let adj = graph.adjacency();
    let atoms = graph.atoms();
    let mut on_path = vec![false; atoms.len()];
    let mut path: Vec<usize> = Vec::with_capacity(max_path_len + 1);
    let mut orders: Vec<BondOrder> = Vec::with_capacity(max_path_len);

    #[allow(clippy::too_many_arguments)]
    fn extend(
        adj: &[Vec<super::Neighbor>],
        atoms: &[Atom],
        max_len: usize,
        n_bits: usize,
        on_path: &mut [bool],
        path: &mut Vec<usize>,
        orders: &mut Vec<BondOrder>,
        fp: &mut BitFingerprint,
    ) {
        let first = path[0];
        let last = *path.last().expect("non-empty path");
        // each undirected path is reached from both ends; keep one
        if path.len() == 1 || first < last {
            let refs: Vec<&Atom> = path.iter().map(|&i| &atoms[i]).collect();
            fp.set(path_bit(&refs, orders, n_bits));
        }
        if orders.len() == max_len {
            return;
        }
        for &(next, order, _) in &adj[last] {
            if on_path[next] {
                continue;
            }
            on_path[next] = true;
            path.push(next);
            orders.push(order);
            extend(adj, atoms, max_len, n_bits, on_path, path, orders, fp);
            orders.pop();
            path.pop();
            on_path[next] = false;
        }
    }

    for start in 0..atoms.len() {
        on_path[start] = true;
        path.push(start);
        extend(&adj, atoms, max_path_len, n_bits, &mut on_path, &mut path, &mut orders, &mut fp);
        path.pop();
        on_path[start] = false;
    }
    fp
}
