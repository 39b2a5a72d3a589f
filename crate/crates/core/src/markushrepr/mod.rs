//! Compact token representation of a Markush structure plus its substituent
//! table, tuned for sequence models.

mod codec;
mod table;
mod tokens;

pub use codec::{
    decode_optimized, decode_text, encode_optimized, encode_text, Decoded, Diagnostic, DiagnosticKind, EncodeWarning,
};
pub use table::{
    compress_integers, compress_table, expand_integers, expand_table, GroupedTable, SubstituentTable, TableError,
    TableGroup, MIN_RANGE_RUN,
};
pub use tokens::{
    Token, TokenKind, TokenSequence, GROUP_START, INDEX_CLOSE, INDEX_OPEN, SEPARATOR, TABLE_START, VALUES_START,
};
