//! Multilevel performance calculus for parallel algorithms.
//!
//! A computational problem is split into a [`Decomposition`] of smaller
//! subproblems whose dependency order is laid out as a
//! [`DependencyMatrix`]. Binding each subproblem to a machine [`Operator`]
//! gives an [`Algorithm`]; scheduling it on `P` processors gives an
//! [`ExecutionMatrix`], from which [`metrics`] derives execution time,
//! speed-up, cost, overhead and efficiency as exact rationals.
//!
//! ```
//! use parcalc::{metrics, reduction_algorithm, schedule, RefinementLevel, SchedulerKind};
//!
//! let a = reduction_algorithm(16, RefinementLevel::Full).unwrap();
//! let m = schedule(&a, SchedulerKind::Level, Some(8)).unwrap();
//! let r = metrics::report(&m).unwrap();
//! assert_eq!(r.speed_up.to_string(), "15/4");
//! ```

pub mod algorithm;
pub mod dag;
pub mod decomposition;
pub mod metrics;
pub mod problem_spec;
pub mod rational;
pub mod scheduler;
pub mod sweep;
pub mod verify;

pub use algorithm::{Algorithm, AlgorithmError, Operator, OperatorSet};
pub use dag::{
    levelize, validate_dependency_matrix, DagError, DependencyDag, DependencyMatrix, ElementId,
    MatrixViolation, ValidationReport,
};
pub use decomposition::{
    concat_similar, generate_reduction, ComputationalProblem, ConcatDescriptor, Decomposition,
    DecompositionError, PolynomialComplexity, Subproblem,
};
pub use metrics::{MetricsError, MetricsReport};
pub use problem_spec::{reduction_algorithm, LoadedSpec, ProblemSpec, RefinementLevel, SpecError};
pub use rational::{parse_rational, to_decimal, Rational};
pub use scheduler::{
    build_perfectly_parallel, classify, row_profile, schedule, schedule_greedy_list,
    schedule_level_chunked, validate_execution_matrix, Classification, ExecutionMatrix,
    ExecutionViolation, RowProfile, ScheduleError, ScheduledOp, SchedulerKind,
};
pub use sweep::{sweep_mu, sweep_processors, MuRow, SweepError, SweepRow};
pub use verify::{verify_algorithm, verify_spec, CheckResult, VerificationReport};
