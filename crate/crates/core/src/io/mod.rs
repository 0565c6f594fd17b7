//! Deserialization of quaternion matrices and vectors, result persistence,
//! and run logging.

pub mod matrix_market;
pub mod runlog;
pub mod signal_csv;

pub use matrix_market::{read_qmatrix, read_qvector, write_extended, MatrixMarketBundle};
pub use runlog::{read_runlog, write_runlog, ConfigEcho, MetricBlock, RunLog, RUNLOG_VERSION};
pub use signal_csv::read_signal_csv;
