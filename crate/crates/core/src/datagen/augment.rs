use std::collections::BTreeSet;

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::chemgraph::{open_valences, Atom, BondOrder, MolecularGraph};
use crate::cxsmiles::{Connectivity, FrequencyVariation, MarkushStructure, PositionVariation};

use super::config::{AugmentConfig, FeatureTargets};
use super::lexicon::Lexicon;

/// Which features a sample must (`Some(true)`) or must not (`Some(false)`)
/// carry. `None` leaves the feature to the operation probabilities.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FeatureWants {
    pub r: Option<bool>,
    pub m: Option<bool>,
    pub sg: Option<bool>,
}

impl FeatureWants {
    /// Draws per-sample wants so that the realized proportions match the
    /// targets. Every `m` section brings an R-group, so R is drawn
    /// conditionally on the `m` draw.
    pub fn draw<R: Rng>(targets: &FeatureTargets, rng: &mut R) -> FeatureWants {
        let m = rng.random_bool(targets.m_section);
        let p_r_alone = if targets.m_section < 1.0 {
            ((targets.r_group - targets.m_section) / (1.0 - targets.m_section)).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let r = m || rng.random_bool(p_r_alone);
        let sg = rng.random_bool(targets.sg_section);
        FeatureWants {
            r: Some(r),
            m: Some(m),
            sg: Some(sg),
        }
    }

    /// Whether a structure carries exactly the wanted features.
    pub fn satisfied_by(&self, ms: &MarkushStructure) -> bool {
        let has = [
            !ms.variable_groups().is_empty(),
            !ms.position_variations.is_empty(),
            !ms.frequency_variations.is_empty(),
        ];
        [self.r, self.m, self.sg]
            .iter()
            .zip(has)
            .all(|(want, has)| want.is_none_or(|w| w == has))
    }
}

pub const FREQUENCY_LABELS: [&str; 5] = ["n", "m", "p", "w", ""];

struct Augmenter<'a, R> {
    cfg: &'a AugmentConfig,
    lex: &'a Lexicon,
    rng: &'a mut R,
    ms: MarkushStructure,
    in_ring: Vec<bool>,
    rings: Vec<Vec<usize>>,
    used_labels: BTreeSet<String>,
}

impl<R: Rng> Augmenter<'_, R> {
    fn n_variable(&self) -> usize {
        self.ms.graph.atoms().iter().filter(|a| a.is_variable_group()).count()
    }

    fn can_add_variable(&self) -> bool {
        self.n_variable() < self.cfg.max_variable_groups
    }

    fn fresh_label(&mut self) -> String {
        loop {
            let stem = self.lex.label_stems.choose(self.rng).expect("stems non-empty").clone();
            let label = if self.rng.random_bool(0.25) {
                stem
            } else {
                format!("{stem}{}", self.rng.random_range(1..=40))
            };
            if self.used_labels.insert(label.clone()) {
                return label;
            }
        }
    }

    fn frequency_label(&mut self) -> String {
        let w = &self.cfg.frequency_label_weights;
        let total: f64 = w.iter().sum();
        let mut x = self.rng.random_range(0.0..total);
        for (k, &weight) in w.iter().enumerate() {
            if x < weight {
                return FREQUENCY_LABELS[k].to_string();
            }
            x -= weight;
        }
        FREQUENCY_LABELS[0].to_string()
    }

    fn bond_sum(&self, atom: usize) -> u32 {
        self.ms
            .graph
            .bonds()
            .iter()
            .filter(|b| b.contains(atom))
            .map(|b| b.order.half_units())
            .sum::<u32>()
            / 2
    }

    fn replaceable(&self) -> Vec<usize> {
        let g = &self.ms.graph;
        (0..g.n_atoms())
            .filter(|&i| {
                let a = g.atom(i);
                !a.is_aromatic
                    && a.formal_charge == 0
                    && !a.is_wildcard()
                    && a.element != "H"
                    && g.degree(i) > 0
                    && (1..=4).contains(&self.bond_sum(i))
                    && !self.in_sg(i)
            })
            .collect()
    }

    fn in_sg(&self, atom: usize) -> bool {
        self.ms.frequency_variations.iter().any(|f| f.atoms.contains(&atom))
    }

    fn replace_atom(&mut self, i: usize) {
        let label = self.fresh_label();
        *self.ms.graph.atom_mut(i) = Atom::variable(label);
    }

    fn bracket_sites(&self) -> Vec<(usize, usize)> {
        let g = &self.ms.graph;
        let plain = |i: usize| {
            let a = g.atom(i);
            !self.in_ring[i] && !a.is_wildcard() && a.element != "H" && !self.in_sg(i)
        };
        g.bonds()
            .iter()
            .filter(|b| plain(b.a) && plain(b.b))
            .map(|b| (b.a.min(b.b), b.a.max(b.b)))
            .collect()
    }

    fn add_bracket(&mut self, (a, b): (usize, usize)) {
        let label = self.frequency_label();
        let conn = if self.rng.random_bool(0.9) {
            Connectivity::HeadToTail
        } else {
            Connectivity::HeadToHead
        };
        self.ms.frequency_variations.push(FrequencyVariation::new(vec![a, b], label, conn));
    }

    fn plain_ring_atom(&self, i: usize) -> bool {
        self.in_ring[i] && !self.ms.graph.atom(i).is_wildcard()
    }

    fn ring_atom_sites(&self) -> Vec<usize> {
        let open = open_valences(&self.ms.graph);
        (0..self.ms.graph.n_atoms())
            .filter(|&i| self.plain_ring_atom(i) && open[i] > 0)
            .collect()
    }

    fn attach_variable(&mut self, ring_atom: usize) {
        let label = self.fresh_label();
        let r = self.ms.graph.add_atom(Atom::variable(label));
        self.ms.graph.add_bond(ring_atom, r, BondOrder::Single).expect("new atom");
    }

    fn ring_sites(&self) -> Vec<usize> {
        let taken: BTreeSet<Vec<usize>> = self
            .ms
            .position_variations
            .iter()
            .map(|p| p.candidate_atoms.clone())
            .collect();
        (0..self.rings.len())
            .filter(|&k| {
                let ring = &self.rings[k];
                let mut sorted = ring.clone();
                sorted.sort_unstable();
                ring.iter().all(|&i| self.plain_ring_atom(i)) && !taken.contains(&sorted)
            })
            .collect()
    }

    fn add_position_variation(&mut self, ring: usize) {
        let candidates = self.rings[ring].clone();
        let label = self.fresh_label();
        let endpoint = self.ms.graph.add_atom(Atom::wildcard());
        let r = self.ms.graph.add_atom(Atom::variable(label));
        self.ms.graph.add_bond(endpoint, r, BondOrder::Single).expect("new atoms");
        self.ms.position_variations.push(PositionVariation::new(endpoint, candidates));
    }

    fn attach_functional_group(&mut self, ring: usize) {
        let open = open_valences(&self.ms.graph);
        let sites: Vec<usize> = self.rings[ring].iter().copied().filter(|&i| open[i] > 0).collect();
        let (Some(&site), Some(group)) = (sites.choose(self.rng), self.lex.functional_groups.choose(self.rng)) else {
            return;
        };
        let offset = self.ms.graph.n_atoms();
        for atom in group.graph.atoms() {
            self.ms.graph.add_atom(atom.clone());
            self.in_ring.push(false);
        }
        for b in group.graph.bonds() {
            self.ms.graph.add_bond(b.a + offset, b.b + offset, b.order).expect("group bonds");
        }
        self.ms.graph.add_bond(site, offset, BondOrder::Single).expect("attachment bond");
    }

    fn pad_ring_flags(&mut self) {
        self.in_ring.resize(self.ms.graph.n_atoms(), false);
    }

    /// Applies an operation at each site with probability `p`, up to `cap`
    /// applications; forces one application when `force` and none happened.
    fn apply<S: Clone>(
        &mut self,
        sites: Vec<S>,
        p: f64,
        force: bool,
        mut budget: impl FnMut(&Self) -> bool,
        mut op: impl FnMut(&mut Self, S),
    ) -> usize {
        let mut applied = 0;
        for site in sites.iter().cloned() {
            if !budget(self) {
                break;
            }
            if self.rng.random_bool(p) {
                op(self, site);
                applied += 1;
            }
        }
        if force && applied == 0 && budget(self) {
            if let Some(site) = sites.choose(self.rng).cloned() {
                op(self, site);
                applied += 1;
            }
        }
        applied
    }
}

/// Turns a plain molecule into a Markush structure with the six
/// augmentations applied at their configured rates.
pub fn augment_to_markush<R: Rng>(g: &MolecularGraph, cfg: &AugmentConfig, lex: &Lexicon, rng: &mut R) -> MarkushStructure {
    augment_with_wants(g, cfg, lex, FeatureWants::default(), rng)
}

pub fn augment_with_wants<R: Rng>(
    g: &MolecularGraph,
    cfg: &AugmentConfig,
    lex: &Lexicon,
    wants: FeatureWants,
    rng: &mut R,
) -> MarkushStructure {
    let rings = g.rings();
    let mut in_ring = vec![false; g.n_atoms()];
    for ring in &rings {
        for &i in ring {
            in_ring[i] = true;
        }
    }
    let used_labels = g.atoms().iter().filter_map(|a| a.variable_label.clone()).collect();
    let mut aug = Augmenter {
        cfg,
        lex,
        rng,
        ms: MarkushStructure::new(g.clone()),
        in_ring,
        rings,
        used_labels,
    };
    let allow_r = wants.r != Some(false);
    let allow_m = allow_r && wants.m != Some(false);
    let allow_sg = wants.sg != Some(false);
    let force_m = wants.m == Some(true);
    let force_sg = wants.sg == Some(true);

    // position variations first when wanted so the variable-group cap
    // cannot starve them
    let m_cap = cfg.max_position_variations;
    let add_m = |aug: &mut Augmenter<'_, R>| {
        if allow_m {
            let sites = aug.ring_sites();
            aug.apply(
                sites,
                cfg.p_rfrag_ring,
                force_m,
                |a| a.ms.position_variations.len() < m_cap && a.can_add_variable(),
                |a, ring| {
                    a.add_position_variation(ring);
                    a.pad_ring_flags();
                },
            );
        }
    };
    if force_m {
        add_m(&mut aug);
    }

    if allow_r {
        let sites = aug.replaceable();
        aug.apply(sites, cfg.p_variable_group, false, |a| a.can_add_variable(), |a, i| a.replace_atom(i));
    }
    if allow_sg {
        let sites = aug.bracket_sites();
        let cap = cfg.max_frequency_variations;
        aug.apply(
            sites,
            cfg.p_bracket_pair,
            force_sg,
            |a| a.ms.frequency_variations.len() < cap,
            |a, pair| {
                if !a.in_sg(pair.0) && !a.in_sg(pair.1) {
                    a.add_bracket(pair)
                }
            },
        );
    }
    if allow_r {
        let sites = aug.ring_atom_sites();
        aug.apply(sites, cfg.p_rfrag_ring_atom, false, |a| a.can_add_variable(), |a, i| {
            if open_valences(&a.ms.graph)[i] > 0 {
                a.attach_variable(i);
                a.pad_ring_flags();
            }
        });
    }
    if !force_m {
        add_m(&mut aug);
    }
    let n_rings = aug.rings.len();
    aug.apply((0..n_rings).collect(), cfg.p_funcgroup_ring, false, |_| true, |a, ring| a.attach_functional_group(ring));

    if wants.r == Some(true) && aug.ms.variable_groups().is_empty() {
        let replace = aug.replaceable();
        let attach = aug.ring_atom_sites();
        let total = replace.len() + attach.len();
        if total > 0 && cfg.max_variable_groups > 0 {
            let k = aug.rng.random_range(0..total);
            if k < replace.len() {
                aug.replace_atom(replace[k]);
            } else {
                aug.attach_variable(attach[k - replace.len()]);
                aug.pad_ring_flags();
            }
        }
    }
    aug.ms
}

/// Atoms whose drawn label gets parentheses; a pure drawing choice.
pub fn choose_parenthesized<R: Rng>(ms: &MarkushStructure, cfg: &AugmentConfig, rng: &mut R) -> Vec<usize> {
    (0..ms.graph.n_atoms())
        .filter(|&i| {
            let a = ms.graph.atom(i);
            a.is_variable_group() || (!a.is_wildcard() && a.element != "C")
        })
        .filter(|_| rng.random_bool(cfg.p_parentheses))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chemgraph::{parse_smiles, valence_errors};
    use crate::cxsmiles::{parse_cxsmiles, write_cxsmiles};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn zero() -> AugmentConfig {
        AugmentConfig {
            p_variable_group: 0.0,
            p_parentheses: 0.0,
            p_bracket_pair: 0.0,
            p_rfrag_ring_atom: 0.0,
            p_rfrag_ring: 0.0,
            p_funcgroup_ring: 0.0,
            ..Default::default()
        }
    }

    #[test]
    fn zero_probabilities_are_identity() {
        let g = parse_smiles("CCOC(=O)c1ccccc1").unwrap();
        let ms = augment_to_markush(&g, &zero(), &Lexicon::default(), &mut ChaCha8Rng::seed_from_u64(3));
        assert!(!ms.has_features());
        assert_eq!(ms.graph, g);
    }

    #[test]
    fn neopentane_all_replaced_up_to_cap() {
        let g = parse_smiles("C(C)(C)(C)C").unwrap();
        let cfg = AugmentConfig {
            p_variable_group: 1.0,
            max_variable_groups: 3,
            ..zero()
        };
        let ms = augment_to_markush(&g, &cfg, &Lexicon::default(), &mut ChaCha8Rng::seed_from_u64(1));
        let vgs = ms.variable_groups();
        assert_eq!(vgs.len(), 3);
        for vg in vgs {
            let a = ms.graph.atom(vg.atom_index);
            assert!(a.is_wildcard() && a.formal_charge == 0);
        }
    }

    #[test]
    fn charged_atoms_are_never_replaced() {
        let g = parse_smiles("C[N+](C)(C)C").unwrap();
        let cfg = AugmentConfig {
            p_variable_group: 1.0,
            max_variable_groups: 10,
            ..zero()
        };
        let ms = augment_to_markush(&g, &cfg, &Lexicon::default(), &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(ms.graph.atom(1).formal_charge, 1);
        assert_eq!(ms.variable_groups().len(), 4);
    }

    #[test]
    fn ring_fragments_become_position_variations() {
        let g = parse_smiles("CCc1ccccc1").unwrap();
        let cfg = AugmentConfig {
            p_rfrag_ring: 1.0,
            ..zero()
        };
        let ms = augment_to_markush(&g, &cfg, &Lexicon::default(), &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(ms.position_variations.len(), 1);
        let pv = &ms.position_variations[0];
        assert_eq!(pv.candidate_atoms, vec![2, 3, 4, 5, 6, 7]);
        assert!(ms.graph.atom(pv.endpoint_atom).is_wildcard());
        assert_eq!(ms.variable_groups().len(), 1);
    }

    #[test]
    fn brackets_avoid_rings() {
        let g = parse_smiles("CCCc1ccccc1").unwrap();
        let cfg = AugmentConfig {
            p_bracket_pair: 1.0,
            max_frequency_variations: 5,
            ..zero()
        };
        let ms = augment_to_markush(&g, &cfg, &Lexicon::default(), &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(ms.frequency_variations.len(), 1);
        assert_eq!(ms.frequency_variations[0].atoms, vec![0, 1]);
    }

    #[test]
    fn wants_are_enforced() {
        let g = parse_smiles("CCOC(=O)c1ccc(N)cc1").unwrap();
        let wants = FeatureWants {
            r: Some(true),
            m: Some(true),
            sg: Some(true),
        };
        for seed in 0..20 {
            let ms = augment_with_wants(&g, &zero(), &Lexicon::default(), wants, &mut ChaCha8Rng::seed_from_u64(seed));
            assert!(wants.satisfied_by(&ms));
        }
        let none = FeatureWants {
            r: Some(false),
            m: Some(false),
            sg: Some(false),
        };
        let cfg = AugmentConfig {
            p_variable_group: 1.0,
            p_rfrag_ring: 1.0,
            p_bracket_pair: 1.0,
            ..Default::default()
        };
        let ms = augment_with_wants(&g, &cfg, &Lexicon::default(), none, &mut ChaCha8Rng::seed_from_u64(0));
        assert!(!ms.has_features());
    }

    #[test]
    fn results_are_valid_and_round_trip() {
        let lex = Lexicon::default();
        let cfg = AugmentConfig {
            p_variable_group: 0.3,
            p_bracket_pair: 0.5,
            p_rfrag_ring_atom: 0.3,
            p_rfrag_ring: 0.5,
            p_funcgroup_ring: 0.5,
            ..Default::default()
        };
        for (k, smi) in ["CC(=O)Oc1ccccc1C(=O)O", "CN1C=NC2=C1C(=O)N(C)C(=O)N2C", "OCC1OC(O)C(O)C(O)C1O"]
            .iter()
            .enumerate()
        {
            let g = parse_smiles(smi).unwrap();
            for seed in 0..30 {
                let ms = augment_to_markush(&g, &cfg, &lex, &mut ChaCha8Rng::seed_from_u64(seed * 7 + k as u64));
                assert!(valence_errors(&ms.graph).is_empty());
                ms.validate().unwrap();
                let back = parse_cxsmiles(&write_cxsmiles(&ms)).unwrap();
                assert!(crate::cxsmiles::markush_equal(&back, &ms));
            }
        }
    }
}
