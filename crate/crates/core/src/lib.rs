pub mod cli;
pub mod dist;
pub mod embeddability;
pub mod error;
pub mod io;
pub mod isoperimetry;
pub mod local_graph;
pub mod metric_graph;
pub mod report;
pub mod space;
pub mod zoo;
pub mod zoom;

pub use dist::Dist;
pub use error::{Error, ParseError, Result};
pub use space::{MetricSpace, PointSet};
