//! Mean values of multiplicative functions on the symmetric group under the
//! Ewens measure, Cesàro summability with a real parameter, and numerical
//! checks of the accompanying bounds against an exact combinatorial oracle.

pub mod cesaro;
pub mod error;
pub mod ewens;
pub mod exact;
pub mod kernel;
pub mod oracle;
pub mod quad;
pub mod series;
pub mod theta_binom;
pub mod thresholds;

pub use error::{Error, Result};
pub use ewens::{Family, MultiplicativeSpec};
pub use series::TruncatedSeries;
pub use theta_binom::ThetaWeights;
