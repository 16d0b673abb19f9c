//! Fiber counts, word measures and the statistics built on them.

pub mod carrier;
pub mod diagnostics;
pub mod engine;
pub mod fourier;
pub mod lie_stats;
pub mod measure;
pub mod points;

pub use carrier::{Carrier as FiniteCarrier, GroupCarrier, ModuleCarrier};
pub use diagnostics::{epsilon_flat_estimate, flatness_scan, hx_sequence, DiagnosticSeries, Row};
pub use engine::{CountMethod, CountOptions, Histogram, SampledHistogram, Space, WordMap, DEFAULT_BUDGET};
pub use fourier::{additive_fourier, additive_fourier_float, fourier_inverse, fourier_inverse_float};
pub use lie_stats::{
    centralizer_census, centralizer_size, commutator_fourier_check, upsilon_count, CentralizerCensus, CommutatorCheck, UpsilonReport,
};
pub use measure::{distance_table, mixing_time, Distance, Measure, MixingReport, Norm};
pub use points::{count_points, count_points_brute, h_x, hensel_count, jet_point_counts, lct_estimate_via_jets, HxValue, LctReport};
