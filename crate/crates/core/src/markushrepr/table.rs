use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Label -> substituent list, in insertion order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SubstituentTable {
    pub entries: IndexMap<String, Vec<String>>,
}

impl SubstituentTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn insert(&mut self, label: impl Into<String>, substituents: Vec<String>) {
        self.entries.insert(label.into(), substituents);
    }

    pub fn get(&self, label: &str) -> Option<&[String]> {
        self.entries.get(label).map(Vec::as_slice)
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Total number of substituents over all labels.
    pub fn n_substituents(&self) -> usize {
        self.entries.values().map(Vec::len).sum()
    }

    /// Same labels and, per label, the same substituent multiset.
    pub fn equivalent(&self, other: &SubstituentTable) -> bool {
        self.len() == other.len()
            && self.entries.iter().all(|(label, subs)| {
                other.entries.get(label).is_some_and(|theirs| {
                    let mut a = subs.clone();
                    let mut b = theirs.clone();
                    a.sort();
                    b.sort();
                    a == b
                })
            })
    }
}

impl<L: Into<String>, S: Into<String>> FromIterator<(L, Vec<S>)> for SubstituentTable {
    fn from_iter<T: IntoIterator<Item = (L, Vec<S>)>>(iter: T) -> Self {
        SubstituentTable {
            entries: iter
                .into_iter()
                .map(|(l, s)| (l.into(), s.into_iter().map(Into::into).collect()))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableGroup {
    pub labels: Vec<String>,
    pub substituents: Vec<String>,
}

/// Labels sharing one substituent list. Integer lists may hold "a-b" ranges.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroupedTable {
    pub groups: Vec<TableGroup>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TableError {
    #[error("label '{0}' appears in more than one group")]
    OverlappingLabelSets(String),
}

pub const MIN_RANGE_RUN: usize = 3;

fn as_integer(s: &str) -> Option<u64> {
    let canonical = s == "0" || (!s.starts_with('0') && !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()));
    if canonical {
        s.parse().ok()
    } else {
        None
    }
}

fn as_range(s: &str) -> Option<(u64, u64)> {
    let (a, b) = s.split_once('-')?;
    let (a, b) = (as_integer(a)?, as_integer(b)?);
    (a <= b).then_some((a, b))
}

/// Sorts an all-integer list and folds runs of at least three consecutive
/// values into "a-b". Other lists are returned unchanged.
pub fn compress_integers(list: &[String]) -> Vec<String> {
    let Some(mut values) = list.iter().map(|s| as_integer(s)).collect::<Option<Vec<u64>>>() else {
        return list.to_vec();
    };
    values.sort_unstable();
    if values.windows(2).any(|w| w[0] == w[1]) {
        return list.to_vec();
    }
    let mut out = Vec::new();
    let mut i = 0;
    while i < values.len() {
        let mut j = i;
        while j + 1 < values.len() && values[j + 1] == values[j] + 1 {
            j += 1;
        }
        if j + 1 - i >= MIN_RANGE_RUN {
            out.push(format!("{}-{}", values[i], values[j]));
        } else {
            out.extend(values[i..=j].iter().map(u64::to_string));
        }
        i = j + 1;
    }
    out
}

/// Expands "a-b" ranges in lists made only of integers and ranges.
pub fn expand_integers(list: &[String]) -> Vec<String> {
    let numeric = list.iter().all(|s| as_integer(s).is_some() || as_range(s).is_some());
    if !numeric || !list.iter().any(|s| as_range(s).is_some()) {
        return list.to_vec();
    }
    let mut out = Vec::new();
    for s in list {
        match as_range(s) {
            Some((a, b)) => out.extend((a..=b).map(|v| v.to_string())),
            None => out.push(s.clone()),
        }
    }
    out
}

pub fn compress_table(table: &SubstituentTable) -> GroupedTable {
    let mut groups: Vec<(Vec<String>, TableGroup)> = Vec::new();
    for (label, subs) in &table.entries {
        let mut key = subs.clone();
        key.sort();
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, group)) => group.labels.push(label.clone()),
            None => groups.push((
                key,
                TableGroup {
                    labels: vec![label.clone()],
                    substituents: subs.clone(),
                },
            )),
        }
    }
    GroupedTable {
        groups: groups
            .into_iter()
            .map(|(_, g)| TableGroup {
                substituents: compress_integers(&g.substituents),
                labels: g.labels,
            })
            .collect(),
    }
}

pub fn expand_table(grouped: &GroupedTable) -> Result<SubstituentTable, TableError> {
    let mut table = SubstituentTable::new();
    for group in &grouped.groups {
        let subs = expand_integers(&group.substituents);
        for label in &group.labels {
            if table.entries.contains_key(label) {
                return Err(TableError::OverlappingLabelSets(label.clone()));
            }
            table.insert(label.clone(), subs.clone());
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(entries: &[(&str, &[&str])]) -> SubstituentTable {
        entries.iter().map(|(l, s)| (*l, s.to_vec())).collect()
    }

    fn strings(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn groups_equal_lists() {
        let g = compress_table(&t(&[("R1", &["Me", "Et"]), ("R2", &["Et", "Me"]), ("R3", &["H"])]));
        assert_eq!(g.groups.len(), 2);
        assert_eq!(g.groups[0].labels, strings(&["R1", "R2"]));
        assert_eq!(g.groups[0].substituents, strings(&["Me", "Et"]));
        assert_eq!(g.groups[1].labels, strings(&["R3"]));
    }

    #[test]
    fn integer_runs() {
        assert_eq!(compress_integers(&strings(&["1", "2", "3", "4", "5"])), strings(&["1-5"]));
        assert_eq!(compress_integers(&strings(&["1", "2", "4"])), strings(&["1", "2", "4"]));
        assert_eq!(compress_integers(&strings(&["7", "0", "1", "2", "9"])), strings(&["0-2", "7", "9"]));
        assert_eq!(compress_integers(&strings(&["1", "2", "x"])), strings(&["1", "2", "x"]));
        assert_eq!(compress_integers(&strings(&["01", "2", "3"])), strings(&["01", "2", "3"]));
    }

    #[test]
    fn expansion() {
        let grouped = GroupedTable {
            groups: vec![
                TableGroup {
                    labels: strings(&["R1", "R2"]),
                    substituents: strings(&["H"]),
                },
                TableGroup {
                    labels: strings(&["n"]),
                    substituents: strings(&["1-5"]),
                },
            ],
        };
        let table = expand_table(&grouped).unwrap();
        assert_eq!(table, t(&[("R1", &["H"]), ("R2", &["H"]), ("n", &["1", "2", "3", "4", "5"])]));
        // hyphenated names in text lists are left alone
        assert_eq!(expand_integers(&strings(&["1-3", "methyl"])), strings(&["1-3", "methyl"]));
    }

    #[test]
    fn overlapping_labels_rejected() {
        let grouped = GroupedTable {
            groups: vec![
                TableGroup {
                    labels: strings(&["R1"]),
                    substituents: strings(&["H"]),
                },
                TableGroup {
                    labels: strings(&["R1"]),
                    substituents: strings(&["Me"]),
                },
            ],
        };
        assert_eq!(expand_table(&grouped), Err(TableError::OverlappingLabelSets("R1".into())));
    }

    #[test]
    fn equivalence_ignores_list_order() {
        let a = t(&[("R1", &["a", "b"])]);
        let b = t(&[("R1", &["b", "a"])]);
        assert!(a.equivalent(&b));
        assert!(!a.equivalent(&t(&[("R1", &["a"])])));
    }
}
