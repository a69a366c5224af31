//! Statistical estimation of the rival-bid law `F` and the value law `G`.
//!
//! Full feedback uses plain empirical CDFs ([`EmpiricalCdf`]) whose uniform
//! error is controlled by [`dkw_radius`]. Censored feedback goes through the
//! survival-analysis pipeline: [`cox_fit`] on both the event and the censoring
//! side, then the kernel-smoothed product-limit average of [`zeng_estimate`].

mod cox;
mod ecdf;
mod linalg;
mod zeng;

pub use cox::{
    cox_fit, partial_gradient, partial_hessian, partial_log_likelihood, CoxFit, CoxTarget,
};
pub use ecdf::{dkw_radius, EmpiricalCdf};
pub use zeng::{
    bandwidth, censored_cdf_eval, gaussian_kernel, zeng_estimate, CensoredCdfEstimate,
    CensoredSample, KernelKind, KernelSpec, ESTIMATE_GRID_POINTS, ESTIMATE_GRID_STEP, FEATURE_DIM,
};
