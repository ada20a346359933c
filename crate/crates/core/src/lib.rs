//! Path tracking for polynomial homotopies with truncated power series.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop, clippy::type_complexity)]

pub mod blocksolve;
pub mod evaldiff;
pub mod linalg;
pub mod newton;
pub mod pade;
pub mod polysys;
pub mod ring;
pub mod series;
pub mod stepsize;
pub mod tracker;
pub mod xprec;

pub use blocksolve::{BlockToeplitzSystem, PipelineSchedule};
pub use evaldiff::WorkCrew;
pub use linalg::ComplexMatrix;
pub use newton::{NewtonConfig, NewtonReport};
pub use pade::PadeApproximant;
pub use polysys::{Monomial, SparseSystem};
pub use series::{FabryEstimate, SeriesError, TruncatedSeries};
pub use stepsize::{Binding, StepDecision, StepPolicy};
pub use tracker::{track_path, StepRecord, TrackError, TrackerConfig, TrackerState};
pub use xprec::{Complex, DoubleDouble, Precision, QuadDouble, Real};
