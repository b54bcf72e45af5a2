//! Dimensionality reduction for heterogeneous tables with missing values.
//!
//! The pipeline imputes missing cells with an iterative random-forest
//! procedure, encodes quantitative columns as z-scores and categorical
//! columns as weighted indicator blocks, then runs PCA and keeps the
//! smallest number of components reaching a cumulative-variance threshold.
//!
//! ```no_run
//! use mixreduce_core::{ingest, pca, encode::WeightingScheme, impute::ImputeParams};
//!
//! let table = ingest::read_csv("data.csv", &ingest::CsvOptions::default(), None)?;
//! let reduction = pca::reduce(&table, &ImputeParams::default(), WeightingScheme::Famd, 0.9, true)?;
//! println!("{} components", reduction.report.selected_components);
//! # Ok::<(), mixreduce_core::Error>(())
//! ```

pub mod data_model;
pub mod encode;
pub mod error;
pub mod forest;
pub mod impute;
pub mod ingest;
pub mod pca;
pub mod rng;
pub mod synthetic;

pub use data_model::{Cell, Column, ColumnData, ColumnKind, ColumnSpec, Mask, MixedTable};
pub use encode::{EncodedMatrix, WeightingScheme};
pub use error::{Error, Result};
pub use forest::{ForestKind, ForestModel, ForestParams, Response};
pub use impute::{ImputationResult, ImputeParams, StopReason};
pub use pca::{PcaModel, Reduction, ReductionReport};

/// Dense column-major matrix used across the pipeline.
pub type Matrix = nalgebra::DMatrix<f64>;
