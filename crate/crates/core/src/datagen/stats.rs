use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cxsmiles::{CxsmilesError, MarkushStructure};
use crate::markushrepr::SubstituentTable;
use crate::records::DatasetRecord;

/// Dataset statistics: feature proportions and per-sample means. Every value
/// is `None` for an empty dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub n: usize,
    pub prop_r: Option<f64>,
    pub prop_m: Option<f64>,
    pub prop_sg: Option<f64>,
    pub mean_atoms: Option<f64>,
    /// Distinct variable-group plus frequency labels.
    pub mean_labels: Option<f64>,
    pub mean_substituents: Option<f64>,
}

pub fn dataset_stats<'a>(samples: impl IntoIterator<Item = (&'a MarkushStructure, &'a SubstituentTable)>) -> DatasetStats {
    let mut n = 0usize;
    let mut sums = [0f64; 6];
    for (ms, table) in samples {
        n += 1;
        let row = [
            !ms.variable_groups().is_empty(),
            !ms.position_variations.is_empty(),
            !ms.frequency_variations.is_empty(),
        ];
        for (s, b) in sums.iter_mut().zip(row) {
            *s += b as u8 as f64;
        }
        sums[3] += ms.graph.n_atoms() as f64;
        sums[4] += ms.labels().len() as f64;
        sums[5] += table.n_substituents() as f64;
    }
    let mean = |k: usize| (n > 0).then(|| sums[k] / n as f64);
    DatasetStats {
        n,
        prop_r: mean(0),
        prop_m: mean(1),
        prop_sg: mean(2),
        mean_atoms: mean(3),
        mean_labels: mean(4),
        mean_substituents: mean(5),
    }
}

/// Statistics of dataset records; fails on the first unparseable CXSMILES.
pub fn record_stats(records: &[DatasetRecord]) -> Result<DatasetStats, (String, CxsmilesError)> {
    let parsed = records
        .iter()
        .map(|r| r.structure().map(|ms| (ms, &r.table)).map_err(|e| (r.id.clone(), e)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(dataset_stats(parsed.iter().map(|(ms, t)| (ms, *t))))
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.2}"))
}

impl fmt::Display for DatasetStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:>8} {:>6} {:>6} {:>6} {:>7} {:>7} {:>7}", "samples", "R", "m", "Sg", "atoms", "labels", "subst")?;
        writeln!(
            f,
            "{:>8} {:>6} {:>6} {:>6} {:>7} {:>7} {:>7}",
            self.n,
            cell(self.prop_r),
            cell(self.prop_m),
            cell(self.prop_sg),
            cell(self.mean_atoms),
            cell(self.mean_labels),
            cell(self.mean_substituents)
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cxsmiles::parse_cxsmiles;

    fn table(entries: &[(&str, usize)]) -> SubstituentTable {
        let mut t = SubstituentTable::new();
        for (l, n) in entries {
            t.insert(*l, (0..*n).map(|k| format!("s{k}")).collect());
        }
        t
    }

    #[test]
    fn plain_molecule() {
        let ms = parse_cxsmiles("CCO").unwrap();
        let t = SubstituentTable::new();
        let s = dataset_stats([(&ms, &t)]);
        assert_eq!((s.prop_r, s.prop_m, s.prop_sg), (Some(0.0), Some(0.0), Some(0.0)));
        assert_eq!(s.mean_atoms, Some(3.0));
    }

    #[test]
    fn empty() {
        let s = dataset_stats(std::iter::empty());
        assert_eq!(s.n, 0);
        assert!(s.prop_r.is_none() && s.mean_substituents.is_none());
    }

    #[test]
    fn hand_fixture() {
        let rows = [
            ("CCO", table(&[])),
            ("C*C |$;R1$|", table(&[("R1", 3)])),
            ("c1ccccc1.*[*] |$;;;;;;;R2$,m:6:0.1.2.3.4.5|", table(&[("R2", 2)])),
            ("C*CC* |$;X;;;Y$,Sg:n:2.3:n:ht|", table(&[("X", 1), ("Y", 1), ("n", 4)])),
        ];
        let parsed: Vec<_> = rows.iter().map(|(c, t)| (parse_cxsmiles(c).unwrap(), t)).collect();
        let s = dataset_stats(parsed.iter().map(|(m, t)| (m, *t)));
        // atoms 3 + 3 + 8 + 5, labels 0 + 1 + 1 + 3, substituents 0 + 3 + 2 + 6
        assert_eq!(s.n, 4);
        assert_eq!(s.prop_r, Some(0.75));
        assert_eq!(s.prop_m, Some(0.25));
        assert_eq!(s.prop_sg, Some(0.25));
        assert_eq!(s.mean_atoms, Some(19.0 / 4.0));
        assert_eq!(s.mean_labels, Some(5.0 / 4.0));
        assert_eq!(s.mean_substituents, Some(11.0 / 4.0));
    }
}
