//! Context-dependent variable importance with totally randomized trees.

pub mod dataset;
pub mod error;
pub mod forest;
pub mod importance;
pub mod impurity;
pub mod oracle;
pub mod pairwise;
pub mod permtest;
pub mod report;
pub mod rng;

pub use dataset::{Column, ColumnKind, ColumnSchema, Dataset, Table, TargetKind};
pub use error::{Error, Result};
pub use forest::{build_forest, build_tree, Forest, Tree};
pub use importance::{
    analyze, characterize, AnalysisConfig, ContextCell, ContextLabel, ForestScores,
    ImportanceReport, ReportMeta, VariableReport,
};
pub use impurity::{ImpurityKind, SampleSubset};
pub use oracle::JointDistribution;
pub use rng::{Purpose, RngSpec};
