use std::collections::BTreeSet;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

use crate::cxsmiles::MarkushStructure;
use crate::markushrepr::SubstituentTable;

use super::config::DescriptionConfig;
use super::lexicon::Lexicon;
use super::templates::{fill, TemplateKind, TemplateSet};
use super::DatagenError;

enum ItemKind {
    Variable(u8),
    Frequency,
    Noise,
}

struct Item {
    labels: Vec<String>,
    kind: ItemKind,
}

/// Bond-order sum of the first atom carrying each variable-group label.
pub fn label_valences(ms: &MarkushStructure) -> Vec<(String, u8)> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for vg in ms.variable_groups() {
        if !seen.insert(vg.label.clone()) {
            continue;
        }
        let half: u32 = ms
            .graph
            .bonds()
            .iter()
            .filter(|b| b.contains(vg.atom_index))
            .map(|b| b.order.half_units())
            .sum();
        out.push((vg.label, (half / 2).clamp(1, 4) as u8));
    }
    out
}

fn join_list<R: Rng>(items: &[String], rng: &mut R) -> String {
    let conj = if rng.random_bool(0.7) { "or" } else { "and" };
    match items {
        [] => String::new(),
        [one] => one.clone(),
        [init @ .., last] => format!("{} {conj} {last}", init.join(", ")),
    }
}

fn label_list(labels: &[String]) -> String {
    match labels {
        [one] => one.clone(),
        [init @ .., last] => format!("{} and {last}", init.join(", ")),
        [] => String::new(),
    }
}

fn pick_substituents<R: Rng>(
    lex: &Lexicon,
    valence: u8,
    cfg: &DescriptionConfig,
    rng: &mut R,
) -> Result<Vec<String>, DatagenError> {
    let pool = lex.candidates(valence);
    if pool.is_empty() {
        return Err(DatagenError::NoSubstituent(valence));
    }
    let k = rng.random_range(cfg.min_substituents..=cfg.max_substituents).min(pool.len());
    Ok(pool.choose_multiple(rng, k).cloned().collect())
}

fn pick_integers<R: Rng>(lex: &Lexicon, rng: &mut R) -> (Vec<String>, String) {
    let (lo, hi) = lex.integer_range;
    let a = rng.random_range(lo..hi);
    let b = rng.random_range(a + 1..=hi.min(a + 5));
    let values: Vec<String> = (a..=b).map(|v| v.to_string()).collect();
    let text = if values.len() >= 3 && rng.random_bool(0.5) {
        format!("from {a} to {b}")
    } else {
        join_list(&values, rng)
    };
    (values, text)
}

fn noise_label<R: Rng>(lex: &Lexicon, used: &BTreeSet<String>, rng: &mut R) -> String {
    loop {
        let stem = lex.label_stems.choose(rng).expect("stems non-empty");
        let label = format!("{stem}{}", rng.random_range(41..=99));
        if !used.contains(&label) {
            return label;
        }
    }
}

/// Builds a textual definition of every label in the structure and the
/// substituent table it realizes. Substituents match the site valence.
pub fn generate_description<R: Rng>(
    ms: &MarkushStructure,
    templates: &TemplateSet,
    lex: &Lexicon,
    cfg: &DescriptionConfig,
    rng: &mut R,
) -> Result<(String, SubstituentTable), DatagenError> {
    let valences = label_valences(ms);
    let mut frequency: Vec<String> = Vec::new();
    for fv in &ms.frequency_variations {
        if !fv.label.is_empty() && !frequency.contains(&fv.label) && !valences.iter().any(|(l, _)| *l == fv.label) {
            frequency.push(fv.label.clone());
        }
    }
    if valences.is_empty() && frequency.is_empty() {
        return Ok((String::new(), SubstituentTable::new()));
    }
    let sentences = templates.require(TemplateKind::Sentence)?;
    let lists = templates.require(TemplateKind::List)?;

    let mut items: Vec<Item> = Vec::new();
    let mut k = 0;
    while k < valences.len() {
        let (label, v) = &valences[k];
        let mut labels = vec![label.clone()];
        if k + 1 < valences.len() && valences[k + 1].1 == *v && rng.random_bool(cfg.p_group_labels) {
            labels.push(valences[k + 1].0.clone());
            k += 1;
        }
        items.push(Item {
            labels,
            kind: ItemKind::Variable(*v),
        });
        k += 1;
    }
    for label in frequency {
        items.push(Item {
            labels: vec![label],
            kind: ItemKind::Frequency,
        });
    }
    items.shuffle(rng);
    if rng.random_bool(cfg.p_noise) {
        let used: BTreeSet<String> = ms.labels().into_iter().collect();
        let label = noise_label(lex, &used, rng);
        items.push(Item {
            labels: vec![label],
            kind: ItemKind::Noise,
        });
    }

    let mut table = SubstituentTable::new();
    let mut parts = Vec::new();
    for item in &items {
        let labels = label_list(&item.labels);
        let sentence = match item.kind {
            ItemKind::Variable(v) => {
                let subs = pick_substituents(lex, v, cfg, rng)?;
                let list = fill(lists.choose(rng).expect("non-empty"), &[("substituents", &join_list(&subs, rng))]);
                for l in &item.labels {
                    table.insert(l.clone(), subs.clone());
                }
                fill(sentences.choose(rng).expect("non-empty"), &[("labels", &labels), ("substituents", &list)])
            }
            ItemKind::Frequency => {
                let freq = templates.require(TemplateKind::Frequency)?;
                let (values, text) = pick_integers(lex, rng);
                table.insert(item.labels[0].clone(), values);
                fill(freq.choose(rng).expect("non-empty"), &[("labels", &labels), ("integers", &text)])
            }
            ItemKind::Noise => {
                let noise = templates.require(TemplateKind::Noise)?;
                let subs = pick_substituents(lex, 1, cfg, rng)?;
                table.insert(item.labels[0].clone(), subs.clone());
                fill(noise.choose(rng).expect("non-empty"), &[("labels", &labels), ("substituents", &join_list(&subs, rng))])
            }
        };
        parts.push(sentence);
    }

    let sep = *["; ", ", and ", ". ", ", "].choose(rng).expect("non-empty");
    let mut text = parts.join(sep);
    if rng.random_bool(cfg.p_prefix) {
        if let Some(p) = templates.get(TemplateKind::Prefix).choose(rng) {
            text = format!("{p} {text}");
        }
    }
    if rng.random_bool(cfg.p_suffix) {
        if let Some(s) = templates.get(TemplateKind::Suffix).choose(rng) {
            text = format!("{text}, {s}");
        }
    }
    text.push('.');
    Ok((text.split_whitespace().collect::<Vec<_>>().join(" "), table))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cxsmiles::parse_cxsmiles;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn run(cx: &str, seed: u64) -> (String, SubstituentTable) {
        let ms = parse_cxsmiles(cx).unwrap();
        let cfg = DescriptionConfig::default();
        generate_description(&ms, &TemplateSet::builtin(), &Lexicon::default(), &cfg, &mut ChaCha8Rng::seed_from_u64(seed))
            .unwrap()
    }

    #[test]
    fn plain_molecule_has_no_description() {
        assert_eq!(run("CCO", 1), (String::new(), SubstituentTable::new()));
    }

    #[test]
    fn monovalent_site_gets_monovalent_substituents() {
        let lex = Lexicon::default();
        let monovalent = lex.candidates(1);
        for seed in 0..20 {
            let (text, table) = run("c1ccccc1* |$;;;;;;R1$|", seed);
            let subs = table.get("R1").unwrap();
            assert!(!subs.is_empty());
            assert!(subs.iter().all(|s| monovalent.contains(s)));
            assert!(text.contains("R1"));
            for s in subs {
                assert!(text.contains(s.as_str()), "{s} missing from {text}");
            }
        }
    }

    #[test]
    fn every_label_is_defined() {
        let cx = "C*C(C)C*.c1ccccc1*.*[*] |$;X;;;;Y;;;;;;;G1;;G2$,m:13:6.7.8.9.10.11,Sg:n:2.3:n:ht|";
        for seed in 0..20 {
            let (_, table) = run(cx, seed);
            for label in ["X", "Y", "G1", "G2", "n"] {
                assert!(table.get(label).is_some(), "{label} in seed {seed}");
            }
            let n = table.get("n").unwrap();
            assert!(n.iter().all(|v| v.parse::<u32>().is_ok()));
        }
    }

    #[test]
    fn deterministic() {
        let cx = "C*C(C)C* |$;X;;;;Y$|";
        assert_eq!(run(cx, 9), run(cx, 9));
    }

    #[test]
    fn valence_two_site() {
        let ms = parse_cxsmiles("C*C |$;Y$|").unwrap();
        assert_eq!(label_valences(&ms), vec![("Y".to_string(), 2)]);
    }

    #[test]
    fn missing_templates() {
        let ms = parse_cxsmiles("C* |$;R1$|").unwrap();
        let err = generate_description(
            &ms,
            &TemplateSet::default(),
            &Lexicon::default(),
            &DescriptionConfig::default(),
            &mut ChaCha8Rng::seed_from_u64(0),
        )
        .unwrap_err();
        assert!(matches!(err, DatagenError::MissingTemplateKind(_)));
    }
}
