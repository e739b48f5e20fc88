//! The `.catt` script language.

pub mod parse;
pub mod print;
pub mod run;

pub use parse::{parse_file, Builtin, Command, ParseError, Pos, TermExpr, TypeExpr};
pub use print::{print_shared, term_stats, TermStats};
pub use run::{
    check_paths, generate, run_files, run_source, size_report, Artifact, ArtifactSize, FileOutcome, Options, Report,
    SizeCell, SizeReport, SIZE_COLUMNS,
};
