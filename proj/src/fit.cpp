#include "opgrowth/fit.hpp"

#include <cmath>
#include <stdexcept>

namespace opgrowth {

LineFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("linear_fit: need >= 2 points");
  const size_t m = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < m; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
    syy += y[i] * y[i];
  }
  double denom = m * sxx - sx * sx;
  if (std::abs(denom) < 1e-300 * (1.0 + sxx))
    throw std::runtime_error("linear_fit: ill-conditioned (degenerate x)");
  LineFit fit;
  fit.slope = (m * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / m;
  double ss_res = 0, ss_tot = 0, mean_y = sy / m;
  for (size_t i = 0; i < m; ++i) {
    double r = y[i] - fit.intercept - fit.slope * x[i];
    ss_res += r * r;
    ss_tot += (y[i] - mean_y) * (y[i] - mean_y);
  }
  fit.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  double sigma2 = m > 2 ? ss_res / (m - 2) : 0.0;
  fit.slope_stderr = std::sqrt(sigma2 * m / denom);
  fit.intercept_stderr = std::sqrt(sigma2 * sxx / denom);
  return fit;
}

GrowthFit fit_growth_constants(const GrowthCurve& curve, FitModel model,
                               double t_lo, double t_hi) {
  std::vector<double> t, mean, width;
  for (size_t i = 0; i < curve.time.size(); ++i) {
    if (curve.time[i] < t_lo || curve.time[i] > t_hi) continue;
    t.push_back(curve.time[i]);
    mean.push_back(curve.mean_size[i]);
    width.push_back(std::sqrt(std::max(0.0, curve.variance[i])));
  }
  if (t.size() < 2)
    throw std::invalid_argument("fit_growth_constants: window too short");

  GrowthFit out;
  out.window_lo = t_lo;
  out.window_hi = t_hi;

  auto from_line = [&](const LineFit& f) {
    out.params = Eigen::Vector2d(f.intercept, f.slope);
    out.covariance = Eigen::Matrix2d::Zero();
    out.covariance(0, 0) = f.intercept_stderr * f.intercept_stderr;
    out.covariance(1, 1) = f.slope_stderr * f.slope_stderr;
  };
  auto from_mean = [&](const std::vector<double>& v) {
    double s = 0, s2 = 0;
    for (double x : v) {
      s += x;
      s2 += x * x;
    }
    double m = static_cast<double>(v.size());
    double avg = s / m;
    double var = std::max(0.0, s2 / m - avg * avg);
    out.params = Eigen::VectorXd::Constant(1, avg);
    out.covariance = Eigen::MatrixXd::Constant(1, 1, var / std::max(1.0, m - 1));
    out.constant = avg;
  };

  switch (model) {
    case FitModel::linear_ballistic: {
      LineFit f = linear_fit(t, mean);
      from_line(f);
      out.constant = f.slope / 1.5;
      break;
    }
    case FitModel::sqrt_width: {
      // dS = k sqrt(t), fit through the origin.
      double num = 0, den = 0, ss = 0;
      for (size_t i = 0; i < t.size(); ++i) {
        double rt = std::sqrt(t[i]);
        num += rt * width[i];
        den += t[i];
      }
      if (den <= 0)
        throw std::runtime_error("fit_growth_constants: degenerate sqrt fit");
      double k = num / den;
      for (size_t i = 0; i < t.size(); ++i) {
        double r = width[i] - k * std::sqrt(t[i]);
        ss += r * r;
      }
      double var_k = t.size() > 1 ? ss / (t.size() - 1) / den : 0.0;
      out.params = Eigen::VectorXd::Constant(1, k);
      out.covariance = Eigen::MatrixXd::Constant(1, 1, var_k);
      out.constant = k;
      break;
    }
    case FitModel::exponential: {
      std::vector<double> log_mean;
      log_mean.reserve(mean.size());
      for (double s : mean) {
        if (s <= 0)
          throw std::invalid_argument(
              "fit_growth_constants: non-positive size in exponential window");
        log_mean.push_back(std::log(s));
      }
      LineFit f = linear_fit(t, log_mean);
      from_line(f);
      out.constant = f.slope;
      break;
    }
    case FitModel::plateau:
      from_mean(mean);
      break;
    case FitModel::rel_width: {
      std::vector<double> ratio(t.size());
      for (size_t i = 0; i < t.size(); ++i) {
        if (mean[i] <= 0)
          throw std::invalid_argument(
              "fit_growth_constants: non-positive size in rel_width window");
        ratio[i] = width[i] / mean[i];
      }
      from_mean(ratio);
      break;
    }
  }
  return out;
}

}  // namespace opgrowth
