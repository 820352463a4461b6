#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

#include "opgrowth/exact.hpp"
#include "opgrowth/protocol.hpp"
#include "opgrowth/ruc.hpp"

namespace opgrowth {

void write_file(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

/// Growth-curve CSV, header "t,mean_size,var_size,echo,stderr".
std::string growth_curve_csv(const GrowthCurve& curve);
GrowthCurve parse_growth_curve_csv(const std::string& csv);

/// OTOC profile CSV, header "site,t,otoc".
std::string otoc_csv(const std::vector<int>& sites,
                     const std::vector<double>& times,
                     const Eigen::MatrixXd& otoc);

/// Config (de)serialization; keys match the struct fields.
CircuitConfig circuit_config_from_json(const nlohmann::json& j);
nlohmann::json circuit_config_to_json(const CircuitConfig& c);
HamiltonianSpec hamiltonian_from_json(const nlohmann::json& j);
ProtocolConfig protocol_config_from_json(const nlohmann::json& j);

/// Minimal native SVG line plot: one polyline per series over shared axes.
struct PlotSeries {
  std::string label;
  std::vector<double> x, y;
  std::string color = "#1f77b4";
  bool dashed = false;
};
std::string render_svg_plot(const std::string& title,
                            const std::vector<PlotSeries>& series,
                            bool log_y = false);

}  // namespace opgrowth
