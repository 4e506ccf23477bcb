//! First variations, Euler–Lagrange coefficient fields, discrete gradients,
//! the mean curvature residual of graphs and the `W^{2,p}_f` norms.

mod coeffs;
mod gradient;
mod norm;
mod residual;

pub use coeffs::{
    el_coeff_derivative_norms, el_coeffs_e, el_coeffs_w, ellipticity_contraction, growth_ratios, sample_graph_jet,
    verify_ellipticity, verify_growth, CoefficientDerivativeNorms, ELCoefficientsE, ELCoefficientsW, EllipticityReport,
    GraphJet, GrowthReport, GROWTH_RATIOS, MAX_GRAPH, STABILITY_DECADES,
};
pub use gradient::{discrete_gradient, first_variation, gradient_check, GradCheckRow, VariationField};
pub(crate) use norm::surrogate_with_gradient;
pub use norm::{ps_norm_surrogate, w2p_norm, w2p_norm_parts, PSNormReport, W2pParts};
pub use residual::mean_curvature_residual;
