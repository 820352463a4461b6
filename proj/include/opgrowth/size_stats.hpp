#pragma once

#include <Eigen/Core>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "opgrowth/pauli.hpp"

namespace opgrowth {

/// Unnormalized operator size histogram P(S), S = 0..n. Mass is |c_R|^2
/// summed per size; the normalization N = sum_S P(S) equals the Loschmidt
/// echo of the operator the histogram came from.
struct SizeDistribution {
  int n = 0;
  Eigen::ArrayXd mass;  // length n + 1

  SizeDistribution() = default;
  SizeDistribution(int n_, Eigen::ArrayXd mass_);
};

/// Monte-Carlo representation of a decohering Heisenberg operator: a set of
/// Pauli-string trajectories with per-trajectory log mass weights. Weight
/// w = exp(log_weight); the ensemble estimate of N is the mean weight.
struct WeightedEnsemble {
  int n = 0;
  std::vector<std::pair<PauliString, double>> entries;
};

SizeDistribution from_ensemble(const WeightedEnsemble& e);

double normalization(const SizeDistribution& d);
double mean_size(const SizeDistribution& d);
double variance(const SizeDistribution& d);

/// Normalized generating function sum_S [P(S)/N] e^{-mu S}, in (0, 1].
double generating_function(const SizeDistribution& d, double mu);

struct SitePauli {
  int site;
  Pauli pauli;
  auto operator<=>(const SitePauli&) const = default;
};

/// Mean operator size from the 3n single-site normalized OTOC values,
/// (1/4) sum_{P_i} (1 - otoc). The map must cover every non-identity
/// single-site Pauli of an n-site system.
double mean_size_from_otocs(int n, const std::map<SitePauli, double>& otoc_values);

/// CSV with header "S,mass", one row per size.
std::string size_distribution_csv(const SizeDistribution& d);
SizeDistribution parse_size_distribution_csv(const std::string& csv);

}  // namespace opgrowth
