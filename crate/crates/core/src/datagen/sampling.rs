use rand::Rng;

use crate::chemgraph::{parse_smiles, path_fingerprint, tanimoto, valence_errors, MolecularGraph, DEFAULT_FP_BITS, DEFAULT_MAX_PATH};

use super::DatagenError;

pub const DEFAULT_CORPUS: &str = include_str!("../../data/corpus.smi");

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusEntry {
    pub id: String,
    pub smiles: String,
    pub graph: MolecularGraph,
}

/// Reads a SMILES file: one molecule per line, optional name after
/// whitespace, `#` comments. Unnamed entries are called `mol<line>`.
pub fn parse_corpus(text: &str) -> Result<Vec<CorpusEntry>, DatagenError> {
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (smiles, name) = match line.split_once(char::is_whitespace) {
            Some((s, n)) => (s, n.trim().to_string()),
            None => (line, format!("mol{}", k + 1)),
        };
        let graph = parse_smiles(smiles).map_err(|e| DatagenError::Corpus {
            line: k + 1,
            message: e.to_string(),
        })?;
        if let Some(issue) = valence_errors(&graph).first() {
            return Err(DatagenError::Corpus {
                line: k + 1,
                message: issue.reason.clone(),
            });
        }
        out.push(CorpusEntry {
            id: name,
            smiles: smiles.to_string(),
            graph,
        });
    }
    Ok(out)
}

/// Greedy max-min diversity selection of `n` molecules. The first pick is
/// random; each later pick maximizes its smallest fingerprint distance
/// (1 - Tanimoto) to the picks so far, lowest index on ties. Returns indices.
pub fn sample_base_molecules<R: Rng>(
    corpus: &[MolecularGraph],
    n: usize,
    rng: &mut R,
) -> Result<Vec<usize>, DatagenError> {
    if corpus.is_empty() {
        return Err(DatagenError::EmptyCorpus);
    }
    let n = n.min(corpus.len());
    let fps: Vec<_> = corpus
        .iter()
        .map(|g| path_fingerprint(g, DEFAULT_MAX_PATH, DEFAULT_FP_BITS))
        .collect();
    let first = rng.random_range(0..corpus.len());
    let mut chosen = vec![first];
    let mut min_dist: Vec<f64> = fps.iter().map(|f| 1.0 - tanimoto(f, &fps[first])).collect();
    let mut taken = vec![false; corpus.len()];
    taken[first] = true;
    while chosen.len() < n {
        let mut best: Option<usize> = None;
        for i in 0..corpus.len() {
            if !taken[i] && best.is_none_or(|b| min_dist[i] > min_dist[b]) {
                best = Some(i);
            }
        }
        let pick = best.expect("n does not exceed corpus size");
        taken[pick] = true;
        chosen.push(pick);
        for i in 0..corpus.len() {
            min_dist[i] = min_dist[i].min(1.0 - tanimoto(&fps[i], &fps[pick]));
        }
    }
    Ok(chosen)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn graphs(smiles: &[&str]) -> Vec<MolecularGraph> {
        smiles.iter().map(|s| parse_smiles(s).unwrap()).collect()
    }

    #[test]
    fn single_molecule() {
        let corpus = graphs(&["CCO"]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(sample_base_molecules(&corpus, 1, &mut rng).unwrap(), vec![0]);
    }

    #[test]
    fn empty_corpus() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(matches!(sample_base_molecules(&[], 1, &mut rng), Err(DatagenError::EmptyCorpus)));
    }

    #[test]
    fn diverse_pair_contains_benzene() {
        let corpus = graphs(&["CCO", "OCC", "c1ccccc1"]);
        // brute force: the 2-subsets maximizing the pair distance
        let fps: Vec<_> = corpus.iter().map(|g| path_fingerprint(g, 7, 2048)).collect();
        let d = |a: usize, b: usize| 1.0 - tanimoto(&fps[a], &fps[b]);
        let pairs = [(0, 1), (0, 2), (1, 2)];
        let best = pairs.iter().map(|&(a, b)| d(a, b)).fold(0.0, f64::max);
        let optimal: Vec<_> = pairs.iter().filter(|&&(a, b)| d(a, b) == best).collect();
        assert!(optimal.iter().all(|&&(a, b)| a == 2 || b == 2));
        for seed in 0..10 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pick = sample_base_molecules(&corpus, 2, &mut rng).unwrap();
            assert!(pick.contains(&2), "{pick:?}");
        }
    }

    #[test]
    fn deterministic() {
        let corpus: Vec<_> = parse_corpus(DEFAULT_CORPUS).unwrap().into_iter().map(|e| e.graph).collect();
        let run = |seed| sample_base_molecules(&corpus, 20, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        assert_eq!(run(5), run(5));
        let mut picks = run(5);
        picks.sort_unstable();
        picks.dedup();
        assert_eq!(picks.len(), 20);
    }

    #[test]
    fn builtin_corpus_is_valid() {
        let corpus = parse_corpus(DEFAULT_CORPUS).unwrap();
        assert!(corpus.len() >= 100);
        assert!(corpus.iter().all(|e| !e.graph.rings().is_empty()));
        assert!(parse_corpus("C1CC\n").is_err());
    }
}
