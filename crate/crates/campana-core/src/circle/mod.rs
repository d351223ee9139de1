//! Analytic layer: exponential sums, arc dissection, singular series,
//! singular integral, and the predicted main term with its leading
//! constant.

pub mod arcs;
pub mod integral;
pub mod predict;
pub mod series;

pub use arcs::{minor_arc_scan, minor_arcs, weyl_sum, ArcDissection, ScanRow};
pub use integral::{cross_check, singular_integral, IntegralMethod, IntegralValue, LadderPoint};
pub use predict::{
    compare, integral_cross_checked, leading_constant, leading_constant_full, predict_m,
    series_cross_checked, CompareInstance, CompareRow, ComparisonTable, ConstantEstimate,
    FullConstant, IntegralChoice, PartialRow, Prediction, Truncation,
};
pub use series::{
    complete_sum, euler_factor_fft, euler_factor_from_complete_sums, local_density, qsum_term,
    singular_series, LocalDensity, SeriesMode, SeriesValue,
};
