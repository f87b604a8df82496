//! Cross-validated risk assessment of baseline and graph-aware classifiers.

pub mod folds;
pub mod harness;
pub mod kernels;
pub mod krr;
pub mod models;

pub use folds::{stratified_holdout, stratified_kfold, FoldPlan};
pub use harness::{
    compute_auc, mean_std, measure_gaps, run_risk_assessment, EvalConfig, EvalDataset, GapMeasurement, HyperGrid,
    HyperPoint, ModelKind, ModelResult,
};
pub use kernels::{normalize_kernel, sp_kernel, wl_kernel};
pub use krr::KernelRidge;
pub use models::{LogisticRegression, Mlp, Standardizer};
