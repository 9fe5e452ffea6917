#pragma once

#include <Eigen/Core>

#include "dynprobit/model.hpp"
#include "dynprobit/pfm_vb.hpp"
#include "dynprobit/sun_smoother.hpp"

namespace dynprobit {

// Fully factorized (mean-field) baseline q(theta) q(z). The optimal q(theta) is N(V X' z_bar, V)
// with the same V as the PFM fit; q(z_i) is TN(m_i, 1) with m_i = X_[i] V X' z_bar, so the
// coordinate updates iterate z_bar_i = m_i + sign_i * zeta(sign_i * m_i). See docs/mf_vb.md for
// the derivation of the update system.
struct MfSolution {
  Eigen::MatrixXd V;      // pn x pn, shared with the PFM fit
  Eigen::VectorXd m;      // n location parameters of q(z_i)
  Eigen::VectorXd z_bar;  // n truncated-normal means at the fixed point
  long iterations = 0;
  bool converged = false;
  double residual = 0.0;
  double elapsed_seconds = 0.0;
};

MfSolution mf_fit(const PriorCovariance& prior, const DesignMatrices& design,
                  const CaviConfig& config = {});

// Mean V X' z_bar and sd's sqrt(diag(V)); the mean-field covariance has no z-uncertainty term.
MomentSummary mf_moments(const MfSolution& sol, const DesignMatrices& design);

}  // namespace dynprobit
