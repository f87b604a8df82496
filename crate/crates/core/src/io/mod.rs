//! Dataset persistence: TU flat files, manifests and result records.

pub mod manifest;
pub mod results;
pub mod tu;

pub use manifest::{DatasetManifest, DatasetSource};
pub use results::{read_results, write_results, InfoType, MethodRole, MetricKind, ResultRecord};
pub use tu::{read_tu, write_dataset, write_tu, TuDataset};
