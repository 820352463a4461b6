#include "opgrowth/io.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace opgrowth {

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << contents;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string growth_curve_csv(const GrowthCurve& curve) {
  std::ostringstream out;
  out.precision(17);
  out << "t,mean_size,var_size,echo,stderr\n";
  for (size_t i = 0; i < curve.time.size(); ++i) {
    out << curve.time[i] << "," << curve.mean_size[i] << ","
        << curve.variance[i] << "," << curve.echo[i] << ","
        << curve.stderr_mean_size[i] << "\n";
  }
  return out.str();
}

GrowthCurve parse_growth_curve_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) || line != "t,mean_size,var_size,echo,stderr")
    throw std::invalid_argument("growth curve CSV: bad header");
  GrowthCurve c;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(row, cell, ',')) vals.push_back(std::stod(cell));
    if (vals.size() != 5)
      throw std::invalid_argument("growth curve CSV: bad row");
    c.time.push_back(vals[0]);
    c.mean_size.push_back(vals[1]);
    c.variance.push_back(vals[2]);
    c.echo.push_back(vals[3]);
    c.stderr_mean_size.push_back(vals[4]);
  }
  return c;
}

std::string otoc_csv(const std::vector<int>& sites,
                     const std::vector<double>& times,
                     const Eigen::MatrixXd& otoc) {
  std::ostringstream out;
  out.precision(17);
  out << "site,t,otoc\n";
  for (size_t s = 0; s < sites.size(); ++s)
    for (size_t t = 0; t < times.size(); ++t)
      out << sites[s] << "," << times[t] << ","
          << otoc(static_cast<int64_t>(s), static_cast<int64_t>(t)) << "\n";
  return out.str();
}

CircuitConfig circuit_config_from_json(const nlohmann::json& j) {
  CircuitConfig c;
  c.n = j.at("n").get<int>();
  std::string geom = j.value("geometry", "brickwork_1d");
  if (geom == "brickwork_1d")
    c.geometry = Geometry::brickwork_1d;
  else if (geom == "all_to_all")
    c.geometry = Geometry::all_to_all;
  else
    throw std::invalid_argument("unknown geometry: " + geom);
  c.epsilon = j.value("epsilon", 0.0);
  c.layers = j.at("layers").get<int>();
  c.trajectories = j.value("trajectories", 1);
  c.seed = j.value("seed", uint64_t(0));
  if (j.contains("initial_operator"))
    c.initial_operator = PauliString::parse(j.at("initial_operator"));
  c.gates_per_unit_time = j.value("gates_per_unit_time", 0);
  c.resample = j.value("resample", false);
  c.validate();
  return c;
}

nlohmann::json circuit_config_to_json(const CircuitConfig& c) {
  nlohmann::json j;
  j["n"] = c.n;
  j["geometry"] =
      c.geometry == Geometry::brickwork_1d ? "brickwork_1d" : "all_to_all";
  j["epsilon"] = c.epsilon;
  j["layers"] = c.layers;
  j["trajectories"] = c.trajectories;
  j["seed"] = c.seed;
  j["initial_operator"] = c.resolved_initial().to_string();
  if (c.geometry == Geometry::all_to_all)
    j["gates_per_unit_time"] = c.resolved_gates_per_unit_time();
  j["resample"] = c.resample;
  return j;
}

HamiltonianSpec hamiltonian_from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    throw std::invalid_argument("hamiltonian preset requires an object with n");
  }
  int n = j.at("n").get<int>();
  if (j.contains("preset")) {
    std::string preset = j.at("preset");
    if (preset == "mixed_field_ising")
      return HamiltonianSpec::mixed_field_ising(n, j.value("J", 1.0),
                                                j.value("hx", 1.05),
                                                j.value("hz", 0.5));
    if (preset == "uniform_x") return HamiltonianSpec::uniform_x(n);
    throw std::invalid_argument("unknown hamiltonian preset: " + preset);
  }
  HamiltonianSpec h;
  h.n = n;
  for (const auto& term : j.at("terms")) {
    PauliString p = PauliString::parse(term.at(0).get<std::string>());
    if (p.n() != n)
      throw std::invalid_argument("hamiltonian term length mismatch");
    h.terms.emplace_back(p, term.at(1).get<double>());
  }
  return h;
}

ProtocolConfig protocol_config_from_json(const nlohmann::json& j) {
  ProtocolConfig c;
  c.n = j.at("n").get<int>();
  c.mu = j.at("mu").get<double>();
  c.shots = j.value("shots", 1);
  c.seed = j.value("seed", uint64_t(0));
  c.t = j.value("t", 0.0);
  if (j.contains("hamiltonian"))
    c.hamiltonian = hamiltonian_from_json(j.at("hamiltonian"));
  else
    c.hamiltonian = HamiltonianSpec::mixed_field_ising(c.n);
  if (j.contains("initial_operator"))
    c.initial_operator = PauliString::parse(j.at("initial_operator"));
  c.validate();
  return c;
}

namespace {

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

}  // namespace

std::string render_svg_plot(const std::string& title,
                            const std::vector<PlotSeries>& series,
                            bool log_y) {
  const double w = 720, h = 480, ml = 70, mr = 20, mt = 40, mb = 50;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series) {
    for (size_t i = 0; i < s.x.size(); ++i) {
      double y = s.y[i];
      if (log_y) {
        if (y <= 0) continue;
        y = std::log10(y);
      }
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (xmin > xmax) {
    xmin = 0;
    xmax = 1;
    ymin = 0;
    ymax = 1;
  }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;

  auto px = [&](double x) {
    return ml + (x - xmin) / (xmax - xmin) * (w - ml - mr);
  };
  auto py = [&](double y) {
    if (log_y) y = std::log10(std::max(y, 1e-300));
    return h - mb - (y - ymin) / (ymax - ymin) * (h - mt - mb);
  };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
      << "\" height=\"" << h << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << w / 2 << "\" y=\"24\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"16\">" << title
      << "</text>\n";
  // axes
  out << "<line x1=\"" << ml << "\" y1=\"" << h - mb << "\" x2=\"" << w - mr
      << "\" y2=\"" << h - mb << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
      << "\" y2=\"" << h - mb << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    double fx = xmin + (xmax - xmin) * k / 4.0;
    double fy = ymin + (ymax - ymin) * k / 4.0;
    out << "<text x=\"" << px(fx) << "\" y=\"" << h - mb + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"11\">" << fmt(fx) << "</text>\n";
    out << "<text x=\"" << ml - 8 << "\" y=\"" << h - mb -
               (h - mt - mb) * k / 4.0 + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
        << "font-size=\"11\">" << fmt(log_y ? std::pow(10.0, fy) : fy)
        << "</text>\n";
  }

  int legend_row = 0;
  for (const auto& s : series) {
    out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" "
        << (s.dashed ? "stroke-dasharray=\"6,4\" " : "") << "points=\"";
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (log_y && s.y[i] <= 0) continue;
      out << px(s.x[i]) << "," << py(s.y[i]) << " ";
    }
    out << "\"/>\n";
    out << "<text x=\"" << w - mr - 180 << "\" y=\"" << mt + 16 * legend_row
        << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << s.color
        << "\">" << s.label << "</text>\n";
    ++legend_row;
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace opgrowth
