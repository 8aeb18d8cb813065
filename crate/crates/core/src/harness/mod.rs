//! h-sweeps comparing disk spectra with the semiclassical coefficients,
//! their tables and extrapolation, the variational property check and the
//! plain-text report.

pub mod extrapolate;
pub mod report;
pub mod sweeps;
pub mod table;
pub mod variational;

pub use extrapolate::{extrapolate, ExtrapolationResult, FIT_WINDOW};
pub use report::render_report;
pub use sweeps::{
    counting_verdict, disk_bulk_term, ground_state_sweep, ground_state_verdict, theorem1_verdict, theorem2_verdict,
    verify_counting, verify_theorem1, verify_theorem2, Theorem2Tables, Verdict, DEFAULT_H_LIST,
};
pub use table::{fmt_sci, Certificate, ConvergenceRow, ConvergenceTable, TableMetadata, CSV_HEADER};
pub use variational::{variational_check, Counterexample, VariationalOutcome};
