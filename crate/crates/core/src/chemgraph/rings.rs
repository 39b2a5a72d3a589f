use std::collections::VecDeque;

use super::MolecularGraph;

/// Smallest set of smallest rings, approximated by the shortest cycle
/// through every bond followed by a greedy GF(2)-independent selection.
pub(super) fn ring_set(graph: &MolecularGraph) -> Vec<Vec<usize>> {
    let n_bonds = graph.bonds().len();
    let n_atoms = graph.n_atoms();
    let cyclomatic = n_bonds + graph.components().len();
    let cyclomatic = cyclomatic.saturating_sub(n_atoms);
    if cyclomatic == 0 {
        return Vec::new();
    }
    let adj = graph.adjacency();

    let mut candidates: Vec<Vec<usize>> = Vec::new();
    for (skip, bond) in graph.bonds().iter().enumerate() {
        if let Some(path) = shortest_path(&adj, bond.a, bond.b, skip) {
            candidates.push(path);
        }
    }
    candidates.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| sorted(x).cmp(&sorted(y))));
    candidates.dedup_by(|x, y| sorted(x) == sorted(y));

    let words = n_bonds.div_ceil(64);
    let mut basis: Vec<(usize, Vec<u64>)> = Vec::new(); // (pivot, row)
    let mut rings = Vec::new();
    for cycle in candidates {
        let mut row = vec![0u64; words];
        for k in 0..cycle.len() {
            let (a, b) = (cycle[k], cycle[(k + 1) % cycle.len()]);
            let bond = graph.bond_between(a, b).expect("cycle follows bonds");
            row[bond / 64] ^= 1 << (bond % 64);
        }
        for (pivot, base) in &basis {
            if row[pivot / 64] >> (pivot % 64) & 1 == 1 {
                for (w, b) in row.iter_mut().zip(base) {
                    *w ^= b;
                }
            }
        }
        let Some(pivot) = (0..n_bonds).find(|&i| row[i / 64] >> (i % 64) & 1 == 1) else {
            continue;
        };
        basis.push((pivot, row));
        rings.push(cycle);
        if rings.len() == cyclomatic {
            break;
        }
    }
    rings
}

fn sorted(v: &[usize]) -> Vec<usize> {
    let mut s = v.to_vec();
    s.sort_unstable();
    s
}

/// BFS path from `from` to `to` avoiding bond `skip`; atoms in path order.
fn shortest_path(adj: &[Vec<super::Neighbor>], from: usize, to: usize, skip: usize) -> Option<Vec<usize>> {
    let mut parent = vec![usize::MAX; adj.len()];
    parent[from] = from;
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        if v == to {
            let mut path = vec![to];
            let mut cur = to;
            while cur != from {
                cur = parent[cur];
                path.push(cur);
            }
            path.reverse();
            return Some(path);
        }
        for &(n, _, bond) in &adj[v] {
            if bond != skip && parent[n] == usize::MAX {
                parent[n] = v;
                queue.push_back(n);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use crate::chemgraph::parse_smiles;

    fn ring_sizes(smiles: &str) -> Vec<usize> {
        let mut sizes: Vec<usize> = parse_smiles(smiles).unwrap().rings().iter().map(Vec::len).collect();
        sizes.sort_unstable();
        sizes
    }

    #[test]
    fn common_ring_systems() {
        assert_eq!(ring_sizes("CCO"), Vec::<usize>::new());
        assert_eq!(ring_sizes("c1ccccc1"), vec![6]);
        assert_eq!(ring_sizes("c1ccc2ccccc2c1"), vec![6, 6]);
        assert_eq!(ring_sizes("C1CC2CC1C2"), vec![4, 5]);
        assert_eq!(ring_sizes("C1CCC2(CC1)CC2"), vec![3, 6]);
        assert_eq!(ring_sizes("c1ccccc1.C1CC1"), vec![3, 6]);
    }

    #[test]
    fn rings_are_cycles_in_order() {
        let g = parse_smiles("c1ccc2ccccc2c1").unwrap();
        for ring in g.rings() {
            for k in 0..ring.len() {
                assert!(g.bond_between(ring[k], ring[(k + 1) % ring.len()]).is_some());
            }
        }
    }
}
