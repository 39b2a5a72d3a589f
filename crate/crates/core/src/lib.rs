//! Markush structure toolkit.

pub mod chemgraph;
pub mod cxsmiles;
pub mod datagen;
pub mod markushrepr;
pub mod metrics;
pub mod records;
