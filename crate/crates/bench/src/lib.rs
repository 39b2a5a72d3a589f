//! Shared inputs for the benchmarks.

use markushkit::cxsmiles::MarkushStructure;
use markushkit::datagen::{GenConfig, Generator};
use markushkit::markushrepr::SubstituentTable;

pub const WORKED: &str = "[H]C1=C([*])C([*])=C([*])C=C1N(C)C(=O)C1=CC=CC(=C1)S(=O)(=O)NC1CCCC1.CCO.*[*].*[*] \
|$;;;X;;X;;G1;;;;;;;;;;;;;;;;;;;;;;;;;;G2;;G4$,m:29:24.25.26.27.28,m:32:14.19.15.18.17.16,m:34:24.25.26.27.28,Sg:n:28:w:ht,Sg:n:30: :ht|";

pub fn generator(seed: u64) -> Generator {
    Generator::with_builtins(GenConfig {
        seed,
        ..GenConfig::default()
    })
    .expect("builtin generator")
}

/// `n` generated structures with their tables.
pub fn corpus(n: usize) -> Vec<(MarkushStructure, SubstituentTable)> {
    generator(11)
        .generate(n)
        .samples
        .into_iter()
        .map(|s| (s.structure, s.table))
        .collect()
}
