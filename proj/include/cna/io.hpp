#pragma once

// JSON documents for states, chains, optimizer results, LHV certificates,
// estimates and compatibility graphs. Keys are emitted in a fixed order.

#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "cna/errors.hpp"
#include "cna/experiment.hpp"
#include "cna/fixtures.hpp"
#include "cna/lhv.hpp"
#include "cna/optimizer.hpp"
#include "cna/scenario.hpp"

namespace cna::io {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

inline Json to_json(const Scenario& s) { return Json{{"k", s.k}, {"d", s.d}, {"J", s.J}}; }

inline Json matrix_json(const ComplexMatrix& m) {
  Json re = Json::array(), im = Json::array();
  bool any_imag = false;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json rr = Json::array(), ri = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      rr.push_back(m(r, c).real());
      ri.push_back(m(r, c).imag());
      any_imag = any_imag || m(r, c).imag() != 0.0;
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ri));
  }
  Json out{{"real", std::move(re)}};
  if (any_imag) out["imag"] = std::move(im);
  return out;
}

namespace detail {

inline ComplexMatrix parse_rows(const Json& re, const Json* im) {
  if (!re.is_array() || re.empty()) throw InvalidArgument("matrix must be a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(re.size());
  const auto cols = static_cast<Eigen::Index>(re.at(0).size());
  ComplexMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = re.at(static_cast<std::size_t>(r));
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw InvalidArgument("matrix rows must all have " + std::to_string(cols) + " entries");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      double x = row.at(static_cast<std::size_t>(c)).get<double>();
      double y = im ? im->at(static_cast<std::size_t>(r)).at(static_cast<std::size_t>(c)).get<double>()
                    : 0.0;
      m(r, c) = Complex(x, y);
    }
  }
  return m;
}

}  // namespace detail

/// Accepts either a bare array of rows or {"real": rows, "imag": rows?,
/// "layout": "canonical"|"reflected"}. The state is renormalized.
inline StateMatrix state_from_json(const Json& j) {
  try {
    if (j.is_array()) return StateMatrix::normalized(detail::parse_rows(j, nullptr));
    const Json* im = j.contains("imag") ? &j.at("imag") : nullptr;
    const std::string layout = j.value("layout", std::string{"canonical"});
    StateLayout l;
    if (layout == "canonical") {
      l = StateLayout::Canonical;
    } else if (layout == "reflected") {
      l = StateLayout::Reflected;
    } else {
      throw InvalidArgument("unknown state layout '" + layout + "'");
    }
    return StateMatrix::normalized(detail::parse_rows(j.at("real"), im), l);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed state document: ") + e.what());
  }
}

inline Json to_json(const StateMatrix& s) {
  Json j = matrix_json(s.h());
  j["layout"] = "canonical";
  return j;
}

inline Json to_json(const MeasurementBasis& b) {
  return Json{{"index", b.index},
              {"party", b.party() == Party::Alice ? "alice" : "bob"},
              {"rows", matrix_json(b.rows)}};
}

inline Json edges_json(const EdgeMap& edges) {
  Json out = Json::array();
  for (const auto& [e, p] : edges) {
    out.push_back(Json{{"from", e.first}, {"to", e.second}, {"probability", p}});
  }
  return out;
}

inline Json to_json(const FractionReport& r) {
  return Json{{"p1", r.p1},
              {"p2", r.p2},
              {"fraction", r.fraction},
              {"s_ideal", r.s_ideal},
              {"edge_probabilities", edges_json(r.edge_probabilities)}};
}

inline Json to_json(const SchmidtFrameChain& f) {
  Json bases = Json::array();
  for (const auto& b : f.bases) bases.push_back(to_json(b));
  return Json{{"lambdas", f.lambdas}, {"oam_labels", f.oam_labels}, {"bases", std::move(bases)}};
}

inline Json chain_json(const MeasurementChain& chain, const FractionReport& report,
                       const SchmidtFrameChain* frame) {
  Json bases = Json::array();
  for (const auto& b : chain.bases) bases.push_back(to_json(b));
  Json j{{"schema_version", kSchemaVersion},
         {"scenario", to_json(chain.scenario)},
         {"state", to_json(chain.state)},
         {"bases", std::move(bases)},
         {"max_residual", chain.max_residual()},
         {"report", to_json(report)}};
  if (frame) j["schmidt_frame"] = to_json(*frame);
  return j;
}

inline Json to_json(const OptimizerConfig& c) {
  return Json{{"restarts", c.restarts},     {"max_iterations", c.max_iterations},
              {"tolerance", c.tolerance},   {"seed", c.seed},
              {"allow_complex", c.allow_complex}, {"warm_start", c.warm_start}};
}

inline Json nan_to_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

inline Json optimization_json(const OptimizationResult& r, const OptimizerConfig& cfg,
                              const std::string& objective, bool with_meta) {
  Json per = Json::array();
  for (double v : r.per_restart_values) per.push_back(nan_to_null(v));
  Json j{{"schema_version", kSchemaVersion},
         {"objective", objective},
         {"scenario", to_json(r.scenario)},
         {"config", to_json(cfg)},
         {"best_fraction", r.best_fraction},
         {"best_state", to_json(r.best_state)},
         {"per_restart_values", std::move(per)},
         {"iterations_used", r.iterations_used},
         {"failed_restarts", r.failed_restarts}};
  if (with_meta) j["meta"] = Json{{"wall_time_seconds", r.wall_time}};
  return j;
}

inline Json to_json(const LhvCertificate& c) {
  return Json{{"schema_version", kSchemaVersion},
              {"scenario", to_json(c.scenario)},
              {"joint_event_impossible", c.joint_event_impossible},
              {"classical_fraction_bound", c.classical_fraction_bound},
              {"logical_bell_classical_max", c.logical_bell_classical_max},
              {"assignments_checked", c.assignments_checked}};
}

inline Json to_json(const fixtures::ReferenceValue& v) {
  return Json{{"value", v.value}, {"error", v.error}, {"anchor", v.anchor}};
}

inline Json to_json(const EstimateReport& r) {
  Json edges = Json::array();
  for (const auto& e : r.edges) {
    edges.push_back(Json{{"setting_i", e.setting_i},
                         {"setting_j", e.setting_j},
                         {"p_greater", e.p_greater},
                         {"std_error", e.std_error},
                         {"total", e.total}});
  }
  return Json{{"schema_version", kSchemaVersion},
              {"scenario", to_json(r.scenario)},
              {"edges", std::move(edges)},
              {"p1", Json{{"value", r.p1}, {"std_error", r.p1_err}}},
              {"p2", Json{{"value", r.p2}, {"std_error", r.p2_err}}},
              {"fraction", Json{{"value", r.fraction}, {"std_error", r.fraction_err}}},
              {"bell_expression", Json{{"value", r.bell}, {"std_error", r.bell_err}}},
              {"error_method", EstimateReport::error_method}};
}

/// {"vertices": [labels], "edges": [[a, b], …], "ordered_pairs": [[from, to], …]}
/// with endpoints given as labels.
inline CompatibilityGraph graph_from_json(const Json& j) {
  try {
    CompatibilityGraph g;
    for (const auto& v : j.at("vertices")) g.add_vertex(v.get<std::string>());
    auto vertex = [&](const Json& label) {
      const auto id = g.find(label.get<std::string>());
      if (!id) throw InvalidArgument("unknown vertex '" + label.get<std::string>() + "'");
      return *id;
    };
    for (const auto& e : j.value("edges", Json::array())) g.add_edge(vertex(e.at(0)), vertex(e.at(1)));
    for (const auto& e : j.value("ordered_pairs", Json::array())) {
      g.add_ordered_pair(vertex(e.at(0)), vertex(e.at(1)));
    }
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed graph document: ") + e.what());
  }
}

inline Json to_json(const CompatibilityGraph& g) {
  Json edges = Json::array(), pairs = Json::array();
  for (auto [u, v] : g.edges()) {
    edges.push_back({g.labels()[static_cast<std::size_t>(u)], g.labels()[static_cast<std::size_t>(v)]});
  }
  for (auto [u, v] : g.ordered_pairs()) {
    pairs.push_back({g.labels()[static_cast<std::size_t>(u)], g.labels()[static_cast<std::size_t>(v)]});
  }
  return Json{{"vertices", g.labels()}, {"edges", std::move(edges)}, {"ordered_pairs", std::move(pairs)}};
}

}  // namespace cna::io
