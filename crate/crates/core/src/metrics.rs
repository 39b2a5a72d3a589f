//! Evaluation metrics for predicted Markush structures and substituent tables.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chemgraph::{canonical_leaf, path_fingerprint, tanimoto, MolecularGraph, DEFAULT_FP_BITS, DEFAULT_MAX_PATH};
use crate::cxsmiles::{canonicalize_markush, strip_markush, CxsmilesError, MarkushStructure};
use crate::markushrepr::SubstituentTable;
use crate::records::{DatasetRecord, PredictionRecord};

/// Trims and collapses internal whitespace.
pub fn normalize_text(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

pub fn normalize_table(table: &SubstituentTable) -> SubstituentTable {
    let mut out = SubstituentTable::new();
    for (label, subs) in &table.entries {
        let entry = out.entries.entry(normalize_text(label)).or_default();
        entry.extend(subs.iter().map(|s| normalize_text(s)));
    }
    out
}

fn stripped_key(ms: &MarkushStructure) -> String {
    let g = strip_markush(ms);
    if g.is_empty() {
        String::new()
    } else {
        canonical_leaf(&g).certificate
    }
}

/// Stripped backbones agree and the canonical Markush forms are equal.
pub fn cxsmiles_exact_match(pred: &MarkushStructure, gt: &MarkushStructure) -> bool {
    pred.graph.n_atoms() == gt.graph.n_atoms()
        && stripped_key(pred) == stripped_key(gt)
        && canonicalize_markush(pred) == canonicalize_markush(gt)
}

/// Tanimoto similarity of stripped path fingerprints, in percent.
pub fn tanimoto_score(pred: &MarkushStructure, gt: &MarkushStructure) -> f64 {
    let a = path_fingerprint(&strip_markush(pred), DEFAULT_MAX_PATH, DEFAULT_FP_BITS);
    let b = path_fingerprint(&strip_markush(gt), DEFAULT_MAX_PATH, DEFAULT_FP_BITS);
    100.0 * tanimoto(&a, &b)
}

fn sorted(list: &[String]) -> Vec<String> {
    let mut v = list.to_vec();
    v.sort();
    v
}

pub fn table_exact_match(pred: &SubstituentTable, gt: &SubstituentTable) -> bool {
    let (p, g) = (normalize_table(pred), normalize_table(gt));
    p.len() == g.len()
        && g
            .entries
            .iter()
            .all(|(label, subs)| p.get(label).is_some_and(|ps| sorted(ps) == sorted(subs)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrecisionRecall {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn multiset_intersection(a: &[String], b: &[String]) -> usize {
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for s in b {
        *counts.entry(s).or_default() += 1;
    }
    a.iter()
        .filter(|s| match counts.get_mut(s.as_str()) {
            Some(c) if *c > 0 => {
                *c -= 1;
                true
            }
            _ => false,
        })
        .count()
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// Per-label precision and recall averaged over labels, in percent.
/// Two empty tables score 100; exactly one empty table scores 0.
pub fn table_f1(pred: &SubstituentTable, gt: &SubstituentTable) -> PrecisionRecall {
    let (p, g) = (normalize_table(pred), normalize_table(gt));
    if p.is_empty() && g.is_empty() {
        return PrecisionRecall {
            precision: 100.0,
            recall: 100.0,
            f1: 100.0,
        };
    }
    let ratio = |hit: usize, total: usize| if total == 0 { 1.0 } else { hit as f64 / total as f64 };
    let recall = mean(g.entries.iter().map(|(label, gs)| {
        p.get(label).map_or(0.0, |ps| ratio(multiset_intersection(ps, gs), gs.len()))
    }))
    .unwrap_or(0.0);
    let precision = mean(p.entries.iter().map(|(label, ps)| {
        g.get(label).map_or(0.0, |gs| ratio(multiset_intersection(ps, gs), ps.len()))
    }))
    .unwrap_or(0.0);
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    PrecisionRecall {
        precision: 100.0 * precision,
        recall: 100.0 * recall,
        f1: 100.0 * f1,
    }
}

pub fn markush_exact_match(
    pred_ms: &MarkushStructure,
    pred_table: &SubstituentTable,
    gt_ms: &MarkushStructure,
    gt_table: &SubstituentTable,
) -> bool {
    table_exact_match(pred_table, gt_table) && cxsmiles_exact_match(pred_ms, gt_ms)
}

/// Correct and total counts of one feature kind.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub correct: usize,
    pub total: usize,
}

impl Tally {
    /// 1.0 when there is nothing to get right.
    pub fn fraction(&self) -> f64 {
        if self.total == 0 {
            1.0
        } else {
            self.correct as f64 / self.total as f64
        }
    }

    fn add(&mut self, other: Tally) {
        self.correct += other.correct;
        self.total += other.total;
    }
}

/// Recognized ground-truth R-groups, `m` sections and `Sg` sections.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureScores {
    pub r: Tally,
    pub m: Tally,
    pub sg: Tally,
}

impl FeatureScores {
    pub fn fractions(&self) -> (f64, f64, f64) {
        (self.r.fraction(), self.m.fraction(), self.sg.fraction())
    }
}

fn skeleton(ms: &MarkushStructure) -> MolecularGraph {
    let mut g = ms.graph.clone();
    for i in 0..g.n_atoms() {
        g.atom_mut(i).variable_label = None;
    }
    g
}

/// gt atom -> pred atom when the label-free skeletons are isomorphic.
fn skeleton_mapping(pred: &MarkushStructure, gt: &MarkushStructure) -> Option<Vec<usize>> {
    if pred.graph.n_atoms() != gt.graph.n_atoms() || pred.graph.bonds().len() != gt.graph.bonds().len() {
        return None;
    }
    if gt.graph.is_empty() {
        return Some(Vec::new());
    }
    let lp = canonical_leaf(&skeleton(pred));
    let lg = canonical_leaf(&skeleton(gt));
    if lp.certificate != lg.certificate {
        return None;
    }
    let mut map = vec![0; gt.graph.n_atoms()];
    for (k, &a) in lg.order.iter().enumerate() {
        map[a] = lp.order[k];
    }
    Some(map)
}

fn mapped_scores(pred: &MarkushStructure, gt: &MarkushStructure, map: &[usize]) -> FeatureScores {
    let mut scores = FeatureScores::default();
    for vg in gt.variable_groups() {
        scores.r.total += 1;
        if pred.graph.atom(map[vg.atom_index]).variable_label.as_deref() == Some(vg.label.as_str()) {
            scores.r.correct += 1;
        }
    }
    let map_set = |atoms: &[usize]| {
        let mut v: Vec<usize> = atoms.iter().map(|&a| map[a]).collect();
        v.sort_unstable();
        v
    };
    for pv in &gt.position_variations {
        scores.m.total += 1;
        let endpoint = map[pv.endpoint_atom];
        let candidates = map_set(&pv.candidate_atoms);
        if pred
            .position_variations
            .iter()
            .any(|p| p.endpoint_atom == endpoint && p.candidate_atoms == candidates)
        {
            scores.m.correct += 1;
        }
    }
    for fv in &gt.frequency_variations {
        scores.sg.total += 1;
        let atoms = map_set(&fv.atoms);
        if pred
            .frequency_variations
            .iter()
            .any(|p| p.atoms == atoms && p.label == fv.label && p.connectivity == fv.connectivity)
        {
            scores.sg.correct += 1;
        }
    }
    scores
}

fn atom_token(g: &MolecularGraph, a: usize) -> String {
    let atom = g.atom(a);
    match &atom.variable_label {
        Some(l) => format!("{{{l}}}"),
        None if atom.is_aromatic => atom.element.to_ascii_lowercase(),
        None => atom.element.clone(),
    }
}

fn tokens_of(g: &MolecularGraph, atoms: &[usize]) -> Vec<String> {
    let mut v: Vec<String> = atoms.iter().map(|&a| atom_token(g, a)).collect();
    v.sort();
    v
}

/// Token of an atom plus the sorted tokens of its neighbors.
fn environment(g: &MolecularGraph, a: usize) -> (String, Vec<String>) {
    let neighbors: Vec<usize> = g
        .bonds()
        .iter()
        .filter(|b| b.contains(a))
        .map(|b| b.other(a))
        .collect();
    (atom_token(g, a), tokens_of(g, &neighbors))
}

fn jaccard(a: &[String], b: &[String]) -> f64 {
    let inter = multiset_intersection(a, b);
    let union = a.len() + b.len() - inter;
    if union == 0 {
        1.0
    } else {
        inter as f64 / union as f64
    }
}

/// Greedy injective assignment in gt order. Each gt item takes the unused
/// pred item with the best score (first on ties); it counts as correct when
/// the signatures agree.
fn greedy(gt: &[(String, Vec<String>)], pred: &[(String, Vec<String>)]) -> Tally {
    let mut used = vec![false; pred.len()];
    let mut tally = Tally {
        correct: 0,
        total: gt.len(),
    };
    for (gs, gt_tokens) in gt {
        let best = pred
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, (ps, p_tokens))| (j, (gs == ps, jaccard(gt_tokens, p_tokens))))
            .fold(None::<(usize, (bool, f64))>, |best, cur| match best {
                Some(b) if b.1 >= cur.1 => Some(b),
                _ => Some(cur),
            });
        if let Some((j, _)) = best {
            used[j] = true;
            if pred[j].0 == *gs && pred[j].1 == *gt_tokens {
                tally.correct += 1;
            }
        }
    }
    tally
}

fn fallback_scores(pred: &MarkushStructure, gt: &MarkushStructure) -> FeatureScores {
    let r_items = |ms: &MarkushStructure| -> Vec<(String, Vec<String>)> {
        ms.variable_groups()
            .into_iter()
            .map(|vg| (vg.label, environment(&ms.graph, vg.atom_index).1))
            .collect()
    };
    let m_items = |ms: &MarkushStructure| -> Vec<(String, Vec<String>)> {
        ms.position_variations
            .iter()
            .map(|pv| {
                let (token, nb) = environment(&ms.graph, pv.endpoint_atom);
                let env: Vec<String> = std::iter::once(token).chain(nb).collect();
                (env.join(","), tokens_of(&ms.graph, &pv.candidate_atoms))
            })
            .collect()
    };
    let sg_items = |ms: &MarkushStructure| -> Vec<(String, Vec<String>)> {
        ms.frequency_variations
            .iter()
            .map(|fv| (format!("{}:{}", fv.label, fv.connectivity), tokens_of(&ms.graph, &fv.atoms)))
            .collect()
    };
    FeatureScores {
        r: greedy(&r_items(gt), &r_items(pred)),
        m: greedy(&m_items(gt), &m_items(pred)),
        sg: greedy(&sg_items(gt), &sg_items(pred)),
    }
}

/// Per-feature recognition counts. Uses the atom mapping between
/// label-free skeletons when they are isomorphic, otherwise a greedy
/// matching on labels and local environments.
pub fn feature_scores(pred: &MarkushStructure, gt: &MarkushStructure) -> FeatureScores {
    if pred.graph.n_atoms() == gt.graph.n_atoms() && canonicalize_markush(pred) == canonicalize_markush(gt) {
        return FeatureScores {
            r: Tally {
                correct: gt.variable_groups().len(),
                total: gt.variable_groups().len(),
            },
            m: Tally {
                correct: gt.position_variations.len(),
                total: gt.position_variations.len(),
            },
            sg: Tally {
                correct: gt.frequency_variations.len(),
                total: gt.frequency_variations.len(),
            },
        };
    }
    match skeleton_mapping(pred, gt) {
        Some(map) => mapped_scores(pred, gt, &map),
        None => fallback_scores(pred, gt),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleEval {
    pub id: String,
    pub cxsmiles_em: bool,
    pub tanimoto: f64,
    pub table_em: bool,
    pub table_precision: f64,
    pub table_recall: f64,
    pub table_f1: f64,
    pub markush_em: bool,
    pub features: FeatureScores,
    pub diagnostics: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub n_samples: usize,
    pub cxsmiles_em: f64,
    pub tanimoto_mean: f64,
    pub table_em: f64,
    pub table_f1: f64,
    pub markush_em: f64,
    pub feature_r: f64,
    pub feature_m: f64,
    pub feature_sg: f64,
    pub per_sample: Vec<SampleEval>,
}

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("ground truth '{id}': {source}")]
    GroundTruth { id: String, source: CxsmilesError },
}

pub fn evaluate_sample(
    id: &str,
    pred_ms: &MarkushStructure,
    pred_table: &SubstituentTable,
    gt_ms: &MarkushStructure,
    gt_table: &SubstituentTable,
    diagnostics: Vec<String>,
) -> SampleEval {
    let cx = cxsmiles_exact_match(pred_ms, gt_ms);
    let tem = table_exact_match(pred_table, gt_table);
    let prf = table_f1(pred_table, gt_table);
    SampleEval {
        id: id.to_string(),
        cxsmiles_em: cx,
        tanimoto: tanimoto_score(pred_ms, gt_ms),
        table_em: tem,
        table_precision: prf.precision,
        table_recall: prf.recall,
        table_f1: prf.f1,
        markush_em: cx && tem,
        features: feature_scores(pred_ms, gt_ms),
        diagnostics,
    }
}

fn percent(hits: usize, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        100.0 * hits as f64 / n as f64
    }
}

impl EvalReport {
    /// Headline numbers from per-sample records. EMs, Tanimoto and F1 are
    /// sample means; feature scores pool counts over the dataset.
    pub fn aggregate(per_sample: Vec<SampleEval>) -> EvalReport {
        let n = per_sample.len();
        let count = |f: fn(&SampleEval) -> bool| per_sample.iter().filter(|s| f(s)).count();
        let avg = |f: fn(&SampleEval) -> f64| mean(per_sample.iter().map(f)).unwrap_or(0.0);
        let mut pooled = FeatureScores::default();
        for s in &per_sample {
            pooled.r.add(s.features.r);
            pooled.m.add(s.features.m);
            pooled.sg.add(s.features.sg);
        }
        EvalReport {
            n_samples: n,
            cxsmiles_em: percent(count(|s| s.cxsmiles_em), n),
            tanimoto_mean: avg(|s| s.tanimoto),
            table_em: percent(count(|s| s.table_em), n),
            table_f1: avg(|s| s.table_f1),
            markush_em: percent(count(|s| s.markush_em), n),
            feature_r: 100.0 * pooled.r.fraction(),
            feature_m: 100.0 * pooled.m.fraction(),
            feature_sg: 100.0 * pooled.sg.fraction(),
            per_sample,
        }
    }

    /// Integer-rounded summary in two blocks: exact match / similarity, then
    /// per-feature recognition.
    pub fn summary(&self) -> String {
        format!(
            "samples {}\n\
             {:>12} {:>12} {:>10} {:>10} {:>11}\n\
             {:>12.0} {:>12.0} {:>10.0} {:>10.0} {:>11.0}\n\
             {:>6} {:>6} {:>6}\n\
             {:>6.0} {:>6.0} {:>6.0}\n",
            self.n_samples,
            "CXSMILES EM",
            "CXSMILES T",
            "Table EM",
            "Table F1",
            "Markush EM",
            self.cxsmiles_em,
            self.tanimoto_mean,
            self.table_em,
            self.table_f1,
            self.markush_em,
            "R",
            "m",
            "Sg",
            self.feature_r,
            self.feature_m,
            self.feature_sg,
        )
    }
}

/// Evaluates (prediction, ground truth) pairs. Samples run in parallel; the
/// report keeps input order.
pub fn evaluate_dataset(pairs: &[(PredictionRecord, DatasetRecord)]) -> Result<EvalReport, MetricsError> {
    let per_sample = pairs
        .par_iter()
        .map(|(pred, gt)| {
            let gt_ms = gt.structure().map_err(|source| MetricsError::GroundTruth {
                id: gt.id.clone(),
                source,
            })?;
            let resolved = pred.resolve();
            Ok(evaluate_sample(
                &gt.id,
                &resolved.structure,
                &resolved.table,
                &gt_ms,
                &gt.table,
                resolved.diagnostics,
            ))
        })
        .collect::<Result<Vec<_>, MetricsError>>()?;
    Ok(EvalReport::aggregate(per_sample))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cxsmiles::parse_cxsmiles;

    fn ms(s: &str) -> MarkushStructure {
        parse_cxsmiles(s).unwrap()
    }

    fn table(entries: &[(&str, &[&str])]) -> SubstituentTable {
        entries.iter().map(|(l, s)| (*l, s.to_vec())).collect()
    }

    const SAMPLE: &str = "*c1ccc(C*)cc1.*[*] |$R1;;;;;;Y;;;;$,m:9:1.2.3.4.7.8,Sg:n:5:n:ht|";

    #[test]
    fn exact_match_cases() {
        let gt = ms(SAMPLE);
        assert!(cxsmiles_exact_match(&gt, &gt));
        let relabeled = ms("*c1ccc(C*)cc1.*[*] |$R2;;;;;;Y;;;;$,m:9:1.2.3.4.7.8,Sg:n:5:n:ht|");
        assert!(!cxsmiles_exact_match(&relabeled, &gt));
        assert_eq!(stripped_key(&relabeled), stripped_key(&gt));
        let order = [10, 3, 2, 9, 8, 7, 6, 5, 4, 1, 0];
        assert!(cxsmiles_exact_match(&gt.permuted(&order).unwrap(), &gt));
    }

    #[test]
    fn tanimoto_bounds() {
        let a = ms("CCO");
        assert_eq!(tanimoto_score(&a, &a), 100.0);
        assert_eq!(tanimoto_score(&ms("C"), &ms("N")), 0.0);
        let empty = MarkushStructure::default();
        assert_eq!(tanimoto_score(&empty, &empty), 100.0);
        assert_eq!(tanimoto_score(&empty, &a), 0.0);
        let b = ms("CCCO");
        assert_eq!(tanimoto_score(&a, &b), tanimoto_score(&b, &a));
    }

    #[test]
    fn table_exact_match_normalizes() {
        let t = table(&[("R1", &["methyl", "ethyl group"]), ("R2", &["H"])]);
        assert!(table_exact_match(&t, &t));
        let spaced = table(&[("R1", &[" ethyl  group", "methyl"]), ("R2", &["H"])]);
        assert!(table_exact_match(&spaced, &t));
        assert!(!table_exact_match(&table(&[("R1", &["methyl", "ethyl group"])]), &t));
        assert!(!table_exact_match(&table(&[("R1", &["Methyl", "ethyl group"]), ("R2", &["H"])]), &t));
    }

    #[test]
    fn f1_worked_case() {
        let gt = table(&[("R1", &["a", "b"]), ("R2", &["c"])]);
        let pred = table(&[("R1", &["a"]), ("R2", &["c", "d"])]);
        let prf = table_f1(&pred, &gt);
        assert_eq!((prf.precision, prf.recall, prf.f1), (75.0, 75.0, 75.0));
        let same = table_f1(&gt, &gt);
        assert_eq!((same.precision, same.recall, same.f1), (100.0, 100.0, 100.0));
        let none = table_f1(&SubstituentTable::new(), &gt);
        assert_eq!((none.precision, none.recall, none.f1), (0.0, 0.0, 0.0));
    }

    #[test]
    fn f1_uses_multisets() {
        let gt = table(&[("R1", &["a", "a", "b"])]);
        let pred = table(&[("R1", &["a", "a", "a"])]);
        let prf = table_f1(&pred, &gt);
        assert!((prf.precision - 200.0 / 3.0).abs() < 1e-9);
        assert!((prf.recall - 200.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn markush_match_is_conjunction() {
        let gt = ms(SAMPLE);
        let t = table(&[("R1", &["H"]), ("Y", &["O"]), ("n", &["1", "2"])]);
        assert!(markush_exact_match(&gt, &t, &gt, &t));
        let off = table(&[("R1", &["H"]), ("Y", &["O"]), ("n", &["1"])]);
        assert!(!markush_exact_match(&gt, &off, &gt, &t));
    }

    #[test]
    fn feature_scores_identity_and_permutation() {
        let gt = ms(SAMPLE);
        assert_eq!(feature_scores(&gt, &gt).fractions(), (1.0, 1.0, 1.0));
        let order = [5, 3, 2, 9, 8, 7, 6, 10, 4, 1, 0];
        assert_eq!(feature_scores(&gt.permuted(&order).unwrap(), &gt).fractions(), (1.0, 1.0, 1.0));
    }

    #[test]
    fn feature_scores_partial() {
        let gt = ms(SAMPLE);
        let no_sg = ms("*c1ccc(C*)cc1.*[*] |$R1;;;;;;Y;;;;$,m:9:1.2.3.4.7.8|");
        let s = feature_scores(&no_sg, &gt);
        assert_eq!(s.sg, Tally { correct: 0, total: 1 });
        assert_eq!(s.r.fraction(), 1.0);
        assert_eq!(s.m.fraction(), 1.0);
        let wrong_label = ms("*c1ccc(C*)cc1.*[*] |$R7;;;;;;Y;;;;$,m:9:1.2.3.4.7.8,Sg:n:5:n:ht|");
        assert_eq!(feature_scores(&wrong_label, &gt).r, Tally { correct: 1, total: 2 });
        // different backbone: fallback matching on labels and environments
        let other = ms("*c1cccc(C*)c1.*[*] |$R1;;;;;;;Y;;$,m:9:1.2.3.4.5.8,Sg:n:6:n:ht|");
        let s = feature_scores(&other, &gt);
        assert_eq!(s.r, Tally { correct: 2, total: 2 });
        assert_eq!(s.sg, Tally { correct: 1, total: 1 });
        assert_eq!(s.m, Tally { correct: 1, total: 1 });
        let plain = ms("CCO");
        assert_eq!(feature_scores(&plain, &plain).fractions(), (1.0, 1.0, 1.0));
    }

    fn record(id: &str, cx: &str, t: SubstituentTable) -> DatasetRecord {
        DatasetRecord {
            id: id.into(),
            cxsmiles: cx.into(),
            table: t,
            ..Default::default()
        }
    }

    #[test]
    fn dataset_report() {
        let t = table(&[("R1", &["H"]), ("Y", &["O"]), ("n", &["1", "2"])]);
        let gt = [record("a", SAMPLE, t.clone()), record("b", "CCO", SubstituentTable::new())];
        let pairs: Vec<_> = gt
            .iter()
            .map(|g| {
                let p = PredictionRecord {
                    id: g.id.clone(),
                    cxsmiles: Some(g.cxsmiles.clone()),
                    table: Some(g.table.clone()),
                    ..Default::default()
                };
                (p, g.clone())
            })
            .collect();
        let report = evaluate_dataset(&pairs).unwrap();
        for v in [
            report.cxsmiles_em,
            report.tanimoto_mean,
            report.table_em,
            report.table_f1,
            report.markush_em,
            report.feature_r,
            report.feature_m,
            report.feature_sg,
        ] {
            assert_eq!(v, 100.0);
        }
        let mut half = pairs.clone();
        half[1].0 = PredictionRecord {
            id: "b".into(),
            optimized: Some(String::new()),
            ..Default::default()
        };
        let report = evaluate_dataset(&half).unwrap();
        assert_eq!(report.cxsmiles_em, 50.0);
        assert!(!report.per_sample[1].diagnostics.is_empty());
        assert_eq!(EvalReport::aggregate(report.per_sample.clone()), report);
        assert!(report.summary().contains("Markush EM"));
    }

    #[test]
    fn bad_ground_truth_is_an_error() {
        let g = record("x", "C1CC", SubstituentTable::new());
        let p = PredictionRecord {
            id: "x".into(),
            ..Default::default()
        };
        assert!(evaluate_dataset(&[(p, g)]).is_err());
    }
}
