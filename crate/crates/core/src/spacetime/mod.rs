//! 4-dimensional Lorentzian metrics and the curvature suite: Levi-Civita
//! pipeline, Newman-Penrose spinors, Petrov types, Cotton/Bach tensors,
//! and the reduced Einstein system over twist-only structures.

pub mod curvature;
pub mod einstein;
pub mod metric;
pub mod np;

pub use curvature::{bach, bach_in_coframe, curvature, BachResult, CurvatureBundle};
pub use einstein::{
    c_from_cr, einstein_residual, m_from_xi, null_geodesic_residual, reduced_einstein_residuals,
    solp_residual, CrDerivedC, CrDerivedM, EinsteinResidual,
};
pub use metric::{
    eta_null_pair, metric_g_t_beta, metric_g_t_general, metric_kerr, metric_minkowski, metric_pp,
    metric_pp_hat, metric_reduced, Metric4, ReducedAnsatz,
};
pub use np::{petrov, weyl_spinors, weyl_spinors_boosted, PetrovReport, PetrovType, WeylSpinors};
