//! Valence accounting with deterministic Kekulé assignment of aromatic bonds.

use super::elements::charged_valences;
use super::{BondOrder, MolecularGraph};

/// One atom whose bonds exceed every allowed valence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValenceIssue {
    pub atom: usize,
    pub reason: String,
}

const MATCHING_STEP_LIMIT: usize = 200_000;

/// Assigns single/double orders to aromatic bonds. Returns per-bond orders
/// (non-aromatic bonds unchanged), or `None` when no Kekulé structure exists.
pub fn kekulize(graph: &MolecularGraph) -> Option<Vec<BondOrder>> {
    let mut orders: Vec<BondOrder> = graph.bonds().iter().map(|b| b.order).collect();
    if !orders.contains(&BondOrder::Aromatic) {
        return Some(orders);
    }
    let n = graph.n_atoms();
    let mut aromatic_bonds = vec![0u32; n];
    let mut other_units = vec![0u32; n];
    for bond in graph.bonds() {
        for end in [bond.a, bond.b] {
            match bond.order {
                BondOrder::Aromatic => aromatic_bonds[end] += 1,
                o => other_units[end] += o.half_units() / 2,
            }
        }
    }
    let needs: Vec<bool> = (0..n)
        .map(|i| aromatic_bonds[i] > 0 && needs_pi_bond(graph, i, aromatic_bonds[i] + other_units[i]))
        .collect();

    // candidate aromatic bonds between two atoms that both need a double bond
    let mut options: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (bi, bond) in graph.bonds().iter().enumerate() {
        if bond.order == BondOrder::Aromatic && needs[bond.a] && needs[bond.b] {
            options[bond.a].push((bond.b, bi));
            options[bond.b].push((bond.a, bi));
        }
    }
    let mut mate: Vec<Option<usize>> = vec![None; n];
    let mut steps = 0usize;
    if !match_all(&needs, &options, &mut mate, &mut steps) {
        return None;
    }
    for (bi, bond) in graph.bonds().iter().enumerate() {
        if bond.order == BondOrder::Aromatic {
            orders[bi] = if mate[bond.a] == Some(bi) {
                BondOrder::Double
            } else {
                BondOrder::Single
            };
        }
    }
    Some(orders)
}

fn needs_pi_bond(graph: &MolecularGraph, index: usize, used: u32) -> bool {
    let atom = graph.atom(index);
    if atom.is_wildcard() {
        return false;
    }
    let Some(allowed) = charged_valences(&atom.element, atom.formal_charge) else {
        return false;
    };
    match atom.explicit_h_count {
        Some(h) => {
            let used = used + h as u32;
            !allowed.contains(&(used as u8)) && allowed.contains(&(used as u8 + 1))
        }
        None => !allowed.contains(&(used as u8)) && allowed.iter().any(|&v| v as u32 > used),
    }
}

fn match_all(
    needs: &[bool],
    options: &[Vec<(usize, usize)>],
    mate: &mut Vec<Option<usize>>,
    steps: &mut usize,
) -> bool {
    *steps += 1;
    if *steps > MATCHING_STEP_LIMIT {
        return false;
    }
    // the unmatched atom with the fewest free options goes first
    let mut best: Option<(usize, usize)> = None;
    for v in 0..needs.len() {
        if !needs[v] || mate[v].is_some() {
            continue;
        }
        let free = options[v].iter().filter(|(u, _)| mate[*u].is_none()).count();
        if best.is_none_or(|(_, f)| free < f) {
            best = Some((v, free));
        }
    }
    let Some((v, free)) = best else {
        return true;
    };
    if free == 0 {
        return false;
    }
    for &(u, bond) in &options[v] {
        if mate[u].is_some() {
            continue;
        }
        mate[v] = Some(bond);
        mate[u] = Some(bond);
        if match_all(needs, options, mate, steps) {
            return true;
        }
        mate[v] = None;
        mate[u] = None;
    }
    false
}

/// Bond-order sum per atom: Kekulé orders when available, otherwise aromatic
/// bonds count 1.5 and half-integer sums are rounded up.
fn bond_sums(graph: &MolecularGraph) -> Vec<u32> {
    let mut halves = vec![0u32; graph.n_atoms()];
    match kekulize(graph) {
        Some(orders) => {
            for (bond, order) in graph.bonds().iter().zip(orders) {
                halves[bond.a] += order.half_units();
                halves[bond.b] += order.half_units();
            }
        }
        None => {
            for bond in graph.bonds() {
                halves[bond.a] += bond.order.half_units();
                halves[bond.b] += bond.order.half_units();
            }
        }
    }
    halves.into_iter().map(|h| h.div_ceil(2)).collect()
}

/// Total hydrogen count per atom: the bracket count when explicit, otherwise
/// the implicit count that fills the lowest allowed valence.
pub fn hydrogen_counts(graph: &MolecularGraph) -> Vec<u8> {
    let sums = bond_sums(graph);
    graph
        .atoms()
        .iter()
        .zip(sums)
        .map(|(atom, sum)| match atom.explicit_h_count {
            Some(h) => h,
            None if atom.is_wildcard() => 0,
            None => charged_valences(&atom.element, atom.formal_charge)
                .and_then(|allowed| allowed.into_iter().find(|&v| v as u32 >= sum))
                .map(|v| (v as u32 - sum) as u8)
                .unwrap_or(0),
        })
        .collect()
}

/// Implicit hydrogens of one atom (zero for bracket and wildcard atoms).
pub fn implicit_hydrogens(graph: &MolecularGraph, index: usize) -> u8 {
    if graph.atom(index).explicit_h_count.is_some() {
        return 0;
    }
    hydrogen_counts(graph)[index]
}

/// Remaining bonding capacity of each atom at its lowest allowed valence that
/// fits the current bonds (implicit hydrogens count as replaceable).
pub fn open_valences(graph: &MolecularGraph) -> Vec<u8> {
    let hs = hydrogen_counts(graph);
    graph
        .atoms()
        .iter()
        .zip(hs)
        .map(|(atom, h)| if atom.explicit_h_count.is_some() { 0 } else { h })
        .collect()
}

pub fn valence_errors(graph: &MolecularGraph) -> Vec<ValenceIssue> {
    let sums = bond_sums(graph);
    let mut issues = Vec::new();
    for (i, atom) in graph.atoms().iter().enumerate() {
        if atom.is_wildcard() || atom.is_variable_group() {
            continue;
        }
        let Some(allowed) = charged_valences(&atom.element, atom.formal_charge) else {
            continue;
        };
        let total = sums[i] + atom.explicit_h_count.unwrap_or(0) as u32;
        let max = allowed.iter().copied().max().unwrap_or(0) as u32;
        if total > max {
            issues.push(ValenceIssue {
                atom: i,
                reason: format!(
                    "{}{} has valence {total}, maximum is {max}",
                    atom.element,
                    match atom.formal_charge {
                        0 => String::new(),
                        c => format!("({c:+})"),
                    }
                ),
            });
        }
    }
    issues
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chemgraph::{parse_smiles, Atom};

    #[test]
    fn neopentane_is_valid() {
        assert!(valence_errors(&parse_smiles("C(C)(C)(C)C").unwrap()).is_empty());
    }

    #[test]
    fn pentavalent_carbon_flagged() {
        let issues = valence_errors(&parse_smiles("C(C)(C)(C)(C)C").unwrap());
        assert_eq!(issues.len(), 1);
        assert_eq!(issues[0].atom, 0);
    }

    #[test]
    fn wildcards_exempt() {
        assert!(valence_errors(&parse_smiles("*C(*)(*)*").unwrap()).is_empty());
        let mut g = parse_smiles("C(C)(C)(C)C").unwrap();
        // the wildcard is exempt but its bond still counts for the carbon
        let r = g.add_atom(Atom::variable("R1"));
        g.add_bond(0, r, BondOrder::Single).unwrap();
        assert_eq!(valence_errors(&g).len(), 1);
    }

    #[test]
    fn aromatic_systems_kekulize() {
        for s in ["c1ccccc1", "c1ccncc1", "c1cc[nH]c1", "c1ccoc1", "c1ccsc1", "c1ccc2ccccc2c1", "O=c1cccc[nH]1", "Cn1cnc2c1c(=O)n(C)c(=O)n2C"] {
            let g = parse_smiles(s).unwrap();
            let k = kekulize(&g).unwrap_or_else(|| panic!("{s} failed"));
            assert!(!k.contains(&BondOrder::Aromatic));
            assert!(valence_errors(&g).is_empty(), "{s}");
        }
        assert!(kekulize(&parse_smiles("c1cccc1").unwrap()).is_none());
    }

    #[test]
    fn hydrogen_counts_follow_valence() {
        let g = parse_smiles("CC(=O)N.c1ccccc1O.[NH4+].OS(=O)(=O)O").unwrap();
        let h = hydrogen_counts(&g);
        assert_eq!(&h[..4], &[3, 0, 0, 2]);
        assert_eq!(h[4], 1); // aromatic CH
        assert_eq!(h[9], 0); // substituted aromatic C
        assert_eq!(h[10], 1); // phenol OH
        assert_eq!(h[11], 4);
        assert_eq!(h[13], 0); // S(VI)
    }
}
