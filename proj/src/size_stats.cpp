#include "opgrowth/size_stats.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace opgrowth {

namespace {

// Kahan-compensated accumulator; size distributions can span thousands of
// bins with mass ratios of 1e-12.
struct Kahan {
  double sum = 0.0, comp = 0.0;
  void add(double v) {
    double y = v - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
};

}  // namespace

SizeDistribution::SizeDistribution(int n_, Eigen::ArrayXd mass_)
    : n(n_), mass(std::move(mass_)) {
  if (mass.size() != n + 1)
    throw std::invalid_argument("SizeDistribution: mass must have n+1 entries");
  if ((mass < 0).any())
    throw std::invalid_argument("SizeDistribution: negative mass");
}

SizeDistribution from_ensemble(const WeightedEnsemble& e) {
  if (e.entries.empty())
    throw std::invalid_argument("from_ensemble: empty ensemble");
  Eigen::ArrayXd mass = Eigen::ArrayXd::Zero(e.n + 1);
  for (const auto& [str, log_w] : e.entries) {
    if (str.n() != e.n)
      throw std::invalid_argument("from_ensemble: string length mismatch");
    mass[str.size()] += std::exp(log_w);
  }
  mass /= static_cast<double>(e.entries.size());
  return SizeDistribution(e.n, std::move(mass));
}

double normalization(const SizeDistribution& d) {
  Kahan k;
  for (int s = 0; s <= d.n; ++s) k.add(d.mass[s]);
  return k.sum;
}

double mean_size(const SizeDistribution& d) {
  double norm = normalization(d);
  if (norm <= 0.0) throw std::domain_error("mean_size: zero normalization");
  Kahan k;
  for (int s = 0; s <= d.n; ++s) k.add(s * d.mass[s]);
  return k.sum / norm;
}

double variance(const SizeDistribution& d) {
  double norm = normalization(d);
  if (norm <= 0.0) throw std::domain_error("variance: zero normalization");
  double mean = mean_size(d);
  Kahan k;
  for (int s = 0; s <= d.n; ++s) k.add((s - mean) * (s - mean) * d.mass[s]);
  return k.sum / norm;
}

double generating_function(const SizeDistribution& d, double mu) {
  if (mu < 0) throw std::invalid_argument("generating_function: mu must be >= 0");
  double norm = normalization(d);
  if (norm <= 0.0)
    throw std::domain_error("generating_function: zero normalization");
  Kahan k;
  for (int s = 0; s <= d.n; ++s) k.add(d.mass[s] * std::exp(-mu * s));
  return k.sum / norm;
}

double mean_size_from_otocs(int n, const std::map<SitePauli, double>& otoc_values) {
  Kahan k;
  for (int i = 0; i < n; ++i) {
    for (Pauli p : {Pauli::X, Pauli::Y, Pauli::Z}) {
      auto it = otoc_values.find({i, p});
      if (it == otoc_values.end())
        throw std::invalid_argument("mean_size_from_otocs: missing OTOC for site " +
                                    std::to_string(i));
      k.add(1.0 - it->second);
    }
  }
  return k.sum / 4.0;
}

std::string size_distribution_csv(const SizeDistribution& d) {
  std::ostringstream out;
  out.precision(17);
  out << "S,mass\n";
  for (int s = 0; s <= d.n; ++s) out << s << "," << d.mass[s] << "\n";
  return out.str();
}

SizeDistribution parse_size_distribution_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) || line != "S,mass")
    throw std::invalid_argument("size distribution CSV: bad header");
  std::vector<double> mass;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::invalid_argument("size distribution CSV: bad row");
    int s = std::stoi(line.substr(0, comma));
    if (s != static_cast<int>(mass.size()))
      throw std::invalid_argument("size distribution CSV: sizes not contiguous");
    mass.push_back(std::stod(line.substr(comma + 1)));
  }
  if (mass.empty()) throw std::invalid_argument("size distribution CSV: no rows");
  Eigen::ArrayXd m = Eigen::Map<Eigen::ArrayXd>(mass.data(), mass.size());
  return SizeDistribution(static_cast<int>(mass.size()) - 1, std::move(m));
}

}  // namespace opgrowth
