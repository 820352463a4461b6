#pragma once

#include <Eigen/Core>
#include <vector>

#include "opgrowth/ruc.hpp"

namespace opgrowth {

/// Ordinary least-squares line y = intercept + slope * x.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double intercept_stderr = 0.0;
  double r_squared = 1.0;
};

LineFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

enum class FitModel {
  linear_ballistic,  // S = p0 + p1 t; v_B = p1 / (3/2)
  sqrt_width,        // dS = p0 sqrt(t); c = p0 / sqrt(v_B)
  exponential,       // log S = p0 + p1 t; lambda = p1
  plateau,           // p0 = mean S over the window
  rel_width,         // p0 = mean dS/S over the window (b)
};

struct GrowthFit {
  Eigen::VectorXd params;
  Eigen::MatrixXd covariance;
  double window_lo = 0.0, window_hi = 0.0;
  /// Model-specific headline constant: v_B, the sqrt-width slope, lambda,
  /// the plateau value, or b.
  double constant = 0.0;
};

/// Least-squares extraction of the gate-model growth constants from a
/// measured curve, over the explicitly reported time window [t_lo, t_hi].
GrowthFit fit_growth_constants(const GrowthCurve& curve, FitModel model,
                               double t_lo, double t_hi);

}  // namespace opgrowth
