//! Canonical atom ranking.
//!
//! Atoms start from an invariant (element, aromaticity, charge, degree,
//! hydrogens, isotope, variable label, caller-supplied color) and are refined
//! by iterated neighborhood ranking until the partition is stable. Remaining
//! ties are broken by individualizing each member of the first non-singleton
//! cell in turn; every discrete leaf is written out and the lexicographically
//! smallest certificate wins. Leaves with identical certificates expose
//! automorphisms, which prune symmetric branches.

use super::smiles::{layout, render_items};
use super::MolecularGraph;

const MAX_LEAVES: usize = 4096;

/// Written form of one discrete ordering.
#[derive(Debug, Clone)]
pub(crate) struct CanonicalLeaf {
    pub certificate: String,
    /// Emitted atom order: position -> atom index.
    pub order: Vec<usize>,
}

type Partition = Vec<u32>;

fn rank_keys<K: Ord>(keys: &[K]) -> (Partition, usize) {
    let mut idx: Vec<usize> = (0..keys.len()).collect();
    idx.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
    let mut classes = vec![0u32; keys.len()];
    let mut distinct = 0usize;
    for (pos, &i) in idx.iter().enumerate() {
        if pos > 0 && keys[idx[pos - 1]] != keys[i] {
            distinct = pos;
        }
        classes[i] = distinct as u32;
    }
    let count = {
        let mut v = classes.clone();
        v.sort_unstable();
        v.dedup();
        v.len()
    };
    (classes, count)
}

fn count_classes(p: &Partition) -> usize {
    let mut v = p.clone();
    v.sort_unstable();
    v.dedup();
    v.len()
}

struct Search<'a, F> {
    adj: Vec<Vec<(usize, u8)>>,
    leaf: F,
    best: Option<CanonicalLeaf>,
    automorphisms: Vec<Vec<usize>>,
    leaves: usize,
    _graph: &'a MolecularGraph,
}

impl<F: FnMut(&[usize]) -> CanonicalLeaf> Search<'_, F> {
    fn refine(&self, mut classes: Partition) -> Partition {
        let mut count = count_classes(&classes);
        loop {
            let keys: Vec<(u32, Vec<(u32, u8)>)> = (0..classes.len())
                .map(|i| {
                    let mut nb: Vec<(u32, u8)> = self.adj[i].iter().map(|&(n, o)| (classes[n], o)).collect();
                    nb.sort_unstable();
                    (classes[i], nb)
                })
                .collect();
            let (next, next_count) = rank_keys(&keys);
            classes = next;
            if next_count == count {
                return classes;
            }
            count = next_count;
        }
    }

    fn explore(&mut self, partition: Partition, prefix: &mut Vec<usize>) {
        let partition = self.refine(partition);
        let n = partition.len();
        if count_classes(&partition) == n {
            self.visit_leaf(&partition);
            return;
        }
        // first non-singleton cell by class value
        let mut sizes = vec![0usize; n];
        for &c in &partition {
            sizes[c as usize] += 1;
        }
        let target = (0..n).find(|&c| sizes[c] > 1).expect("non-discrete partition") as u32;
        let cell: Vec<usize> = (0..n).filter(|&i| partition[i] == target).collect();

        let mut explored: Vec<usize> = Vec::new();
        for &v in &cell {
            if !explored.is_empty() && self.leaves >= MAX_LEAVES {
                break;
            }
            if !explored.is_empty() && self.same_orbit(v, &explored, prefix, n) {
                continue;
            }
            let keys: Vec<(u32, bool)> = (0..n).map(|i| (partition[i], i != v)).collect();
            let (child, _) = rank_keys(&keys);
            prefix.push(v);
            self.explore(child, prefix);
            prefix.pop();
            explored.push(v);
        }
    }

    /// Whether `v` shares an orbit with an explored atom under the known
    /// automorphisms that fix `prefix` pointwise.
    fn same_orbit(&self, v: usize, explored: &[usize], prefix: &[usize], n: usize) -> bool {
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut any = false;
        for gamma in &self.automorphisms {
            if prefix.iter().all(|&p| gamma[p] == p) {
                any = true;
                for (x, &y) in gamma.iter().enumerate() {
                    let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
                    if rx != ry {
                        parent[rx] = ry;
                    }
                }
            }
        }
        if !any {
            return false;
        }
        let rv = find(&mut parent, v);
        explored.iter().any(|&u| find(&mut parent, u) == rv)
    }

    fn visit_leaf(&mut self, ranks: &Partition) {
        self.leaves += 1;
        let ranks: Vec<usize> = ranks.iter().map(|&r| r as usize).collect();
        let leaf = (self.leaf)(&ranks);
        match &self.best {
            None => self.best = Some(leaf),
            Some(best) => match leaf.certificate.cmp(&best.certificate) {
                std::cmp::Ordering::Less => self.best = Some(leaf),
                std::cmp::Ordering::Equal => {
                    let mut gamma = vec![0usize; ranks.len()];
                    for (k, &atom) in best.order.iter().enumerate() {
                        gamma[atom] = leaf.order[k];
                    }
                    if gamma.iter().enumerate().any(|(i, &g)| i != g) {
                        self.automorphisms.push(gamma);
                    }
                }
                std::cmp::Ordering::Greater => {}
            },
        }
    }
}

/// Runs the canonical search with extra per-atom colors and a caller-defined
/// leaf writer. Returns the leaf with the smallest certificate.
pub(crate) fn canonical_search<F>(graph: &MolecularGraph, colors: &[String], leaf: F) -> CanonicalLeaf
where
    F: FnMut(&[usize]) -> CanonicalLeaf,
{
    let n = graph.n_atoms();
    let adjacency = graph.adjacency();
    let adj: Vec<Vec<(usize, u8)>> = adjacency
        .iter()
        .map(|list| list.iter().map(|&(nb, o, _)| (nb, o.code())).collect())
        .collect();
    let keys: Vec<_> = graph
        .atoms()
        .iter()
        .enumerate()
        .map(|(i, a)| {
            (
                a.element.clone(),
                a.is_aromatic,
                a.formal_charge,
                adj[i].len(),
                a.explicit_h_count,
                a.isotope,
                a.variable_label.clone().unwrap_or_default(),
                colors.get(i).cloned().unwrap_or_default(),
            )
        })
        .collect();
    let (initial, _) = rank_keys(&keys);
    let mut search = Search {
        adj,
        leaf,
        best: None,
        automorphisms: Vec::new(),
        leaves: 0,
        _graph: graph,
    };
    if n == 0 {
        return (search.leaf)(&[]);
    }
    search.explore(initial, &mut Vec::new());
    search.best.expect("at least one leaf")
}

fn smiles_leaf(graph: &MolecularGraph) -> impl FnMut(&[usize]) -> CanonicalLeaf + '_ {
    move |ranks| {
        let (items, order) = layout(graph, ranks);
        CanonicalLeaf {
            certificate: render_items(graph, &items),
            order,
        }
    }
}

/// Canonical SMILES together with its emitted atom order.
pub(crate) fn canonical_leaf(graph: &MolecularGraph) -> CanonicalLeaf {
    canonical_search(graph, &[], smiles_leaf(graph))
}

/// Canonical atom order: position -> atom index.
pub fn canonical_order(graph: &MolecularGraph) -> Vec<usize> {
    canonical_search(graph, &[], smiles_leaf(graph)).order
}

/// Canonical rank of every atom (atom index -> position).
pub fn canonical_ranks(graph: &MolecularGraph) -> Vec<usize> {
    let order = canonical_order(graph);
    let mut ranks = vec![0; order.len()];
    for (pos, &atom) in order.iter().enumerate() {
        ranks[atom] = pos;
    }
    ranks
}

/// SMILES in canonical atom order; "" for the empty graph.
pub fn canonical_smiles(graph: &MolecularGraph) -> String {
    if graph.is_empty() {
        return String::new();
    }
    canonical_search(graph, &[], smiles_leaf(graph)).certificate
}
