#pragma once

// Digital twin of the photon-pair experiment: Schmidt-frame conversion, OAM
// labels, Procrustean concentration, shot-noise sampling, and estimators.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "cna/errors.hpp"
#include "cna/numeric.hpp"
#include "cna/scenario.hpp"

namespace cna {

/// OAM label ℓ_g per Schmidt mode: (+1, -1) for d = 2, then 0, +1, -1, +2, -2, …
inline std::vector<int> default_oam_labels(int d) {
  if (d < 1) throw InvalidArgument("dimension must be positive");
  if (d == 2) return {+1, -1};
  std::vector<int> labels{0};
  for (int m = 1; static_cast<int>(labels.size()) < d; ++m) {
    labels.push_back(m);
    if (static_cast<int>(labels.size()) < d) labels.push_back(-m);
  }
  return labels;
}

/// The chain rewritten so the state is diag(λ): Alice rows map through
/// conj(U), Bob rows through V, where h = U diag(λ) V†.
struct SchmidtFrameChain {
  Scenario scenario;
  std::vector<double> lambdas;
  std::vector<MeasurementBasis> bases;  // bases[i-1] is M_i in the Schmidt frame
  std::vector<int> oam_labels;

  StateMatrix state() const { return StateMatrix::diagonal(lambdas); }
  const MeasurementBasis& at(int i) const { return bases.at(static_cast<std::size_t>(i - 1)); }

  /// P(M_i = s, M_j = t) for a compatible (opposite-party) pair.
  Eigen::MatrixXd joint(int i, int j) const { return joint_distribution(state(), at(i), at(j)); }
};

inline SchmidtFrameChain to_schmidt_frame(const MeasurementChain& chain) {
  const SchmidtForm form = schmidt_decompose(chain.state.h());
  SchmidtFrameChain out;
  out.scenario = chain.scenario;
  out.lambdas = form.lambdas;
  out.oam_labels = default_oam_labels(chain.scenario.d);
  out.bases.reserve(chain.bases.size());
  for (const auto& b : chain.bases) {
    MeasurementBasis t{b.index, {}};
    t.rows = b.party() == Party::Alice ? ComplexMatrix(b.rows * form.left.conjugate())
                                       : ComplexMatrix(b.rows * form.right);
    out.bases.push_back(std::move(t));
  }
  return out;
}

/// Source amplitudes C_ℓ of Σ_ℓ C_ℓ |ℓ>|-ℓ>.
struct SourceSpectrum {
  std::map<int, double> amplitudes;

  /// C_ℓ ∝ q^|ℓ| over ℓ in [-window, window], normalized.
  static SourceSpectrum geometric(double q = 0.8, int window = 3) {
    if (!(q > 0.0) || window < 0) throw InvalidArgument("spectrum needs q > 0 and window >= 0");
    SourceSpectrum s;
    double norm2 = 0.0;
    for (int l = -window; l <= window; ++l) {
      const double c = std::pow(q, std::abs(l));
      s.amplitudes[l] = c;
      norm2 += c * c;
    }
    for (auto& [l, c] : s.amplitudes) c /= std::sqrt(norm2);
    return s;
  }

  double at(int l) const {
    const auto it = amplitudes.find(l);
    return it == amplitudes.end() ? 0.0 : it->second;
  }
};

/// Per-mode amplitude efficiencies η_g in (0, 1], max η = 1.
struct AttenuationMask {
  std::vector<double> eta;
};

/// η_g ∝ λ_g / C_{ℓ_g}, rescaled so the largest efficiency is 1.
inline AttenuationMask procrustean_mask(const SourceSpectrum& source,
                                        const std::vector<double>& target_lambdas,
                                        const std::vector<int>& mode_labels) {
  if (target_lambdas.size() != mode_labels.size() || target_lambdas.empty()) {
    throw DimensionError("one OAM label is needed per target Schmidt coefficient");
  }
  AttenuationMask mask;
  for (std::size_t g = 0; g < target_lambdas.size(); ++g) {
    const double c = source.at(mode_labels[g]);
    if (!(c > 0.0)) {
      throw InfeasibleConcentrationError("source has no amplitude in OAM mode l = " +
                                         std::to_string(mode_labels[g]));
    }
    if (!(target_lambdas[g] > 0.0)) {
      throw InfeasibleConcentrationError("target coefficient for mode " + std::to_string(g + 1) +
                                         " must be positive");
    }
    mask.eta.push_back(target_lambdas[g] / c);
  }
  const double top = *std::max_element(mask.eta.begin(), mask.eta.end());
  for (double& e : mask.eta) e /= top;
  return mask;
}

/// Normalized amplitudes C_{ℓ_g} η_g after the mask.
inline std::vector<double> apply_mask(const SourceSpectrum& source, const AttenuationMask& mask,
                                      const std::vector<int>& mode_labels) {
  std::vector<double> out;
  double norm2 = 0.0;
  for (std::size_t g = 0; g < mask.eta.size(); ++g) {
    out.push_back(source.at(mode_labels.at(g)) * mask.eta[g]);
    norm2 += out.back() * out.back();
  }
  for (double& x : out) x /= std::sqrt(norm2);
  return out;
}

/// Key of one coincidence cell: settings (i, j), outcomes (s, t), all 1-based.
struct CellKey {
  int setting_i;
  int setting_j;
  int outcome_s;
  int outcome_t;

  friend auto operator<=>(const CellKey&, const CellKey&) = default;
};

struct CoincidenceDataset {
  std::map<CellKey, std::uint64_t> counts;
  std::uint64_t pairs_per_setting = 0;
  std::uint64_t seed = 0;

  /// d×d count table for a setting pair; zero where no cell was recorded.
  Eigen::MatrixXd table(int i, int j, int d) const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
    for (auto it = counts.lower_bound({i, j, 1, 1});
         it != counts.end() && it->first.setting_i == i && it->first.setting_j == j; ++it) {
      m(it->first.outcome_s - 1, it->first.outcome_t - 1) += static_cast<double>(it->second);
    }
    return m;
  }

  bool has_setting(int i, int j) const {
    const auto it = counts.lower_bound({i, j, 1, 1});
    return it != counts.end() && it->first.setting_i == i && it->first.setting_j == j;
  }
};

/// Measured setting pairs: every chain edge (i, i+1) and the closing pair (1, 2k).
inline std::vector<std::pair<int, int>> measured_settings(const Scenario& s) {
  std::vector<std::pair<int, int>> out;
  for (int i = 1; i < s.chain_length(); ++i) out.emplace_back(i, i + 1);
  out.emplace_back(1, s.chain_length());
  return out;
}

namespace detail {

inline std::mt19937_64 pair_stream(std::uint64_t seed, std::size_t pair_index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(pair_index), 0x636e61u};
  return std::mt19937_64(seq);
}

}  // namespace detail

/// Poisson total with mean `pairs_per_setting` per setting pair, split
/// multinomially over the d² outcome cells (sequential binomials).
inline CoincidenceDataset simulate_coincidences(const SchmidtFrameChain& frame,
                                                std::uint64_t pairs_per_setting,
                                                std::uint64_t seed) {
  if (pairs_per_setting < 1) throw InvalidArgument("pairs_per_setting must be >= 1");
  CoincidenceDataset data;
  data.pairs_per_setting = pairs_per_setting;
  data.seed = seed;
  const int d = frame.scenario.d;
  const auto settings = measured_settings(frame.scenario);
  for (std::size_t p = 0; p < settings.size(); ++p) {
    const auto [i, j] = settings[p];
    auto rng = detail::pair_stream(seed, p);
    const Eigen::MatrixXd prob = frame.joint(i, j);
    std::poisson_distribution<std::uint64_t> total_dist(static_cast<double>(pairs_per_setting));
    std::uint64_t remaining = total_dist(rng);
    double mass_left = 1.0;
    for (int s = 1; s <= d; ++s) {
      for (int t = 1; t <= d; ++t) {
        const bool last = s == d && t == d;
        const double pc = std::clamp(prob(s - 1, t - 1), 0.0, 1.0);
        std::uint64_t n = 0;
        if (last) {
          n = remaining;
        } else if (remaining > 0 && mass_left > 0.0) {
          const double q = std::clamp(pc / mass_left, 0.0, 1.0);
          std::binomial_distribution<std::uint64_t> bin(remaining, q);
          n = bin(rng);
        }
        data.counts[{i, j, s, t}] = n;
        remaining -= n;
        mass_left -= pc;
      }
    }
  }
  return data;
}

struct EdgeEstimate {
  int setting_i;
  int setting_j;
  double p_greater;  // P(M_i > M_j) estimate
  double std_error;
  std::uint64_t total;
};

struct EstimateReport {
  Scenario scenario;
  std::vector<EdgeEstimate> edges;  // chain edges first, then the closing pair (1, 2k)
  double p1 = 0.0, p1_err = 0.0;
  double p2 = 0.0, p2_err = 0.0;
  double fraction = 0.0, fraction_err = 0.0;
  double bell = 0.0, bell_err = 0.0;
  static constexpr const char* error_method =
      "binomial sqrt(p(1-p)/N) per setting pair, combined in quadrature";
};

/// Cell-count ratios with binomial errors per setting pair.
inline EstimateReport estimate(const CoincidenceDataset& data, const Scenario& scenario) {
  scenario.validate();
  EstimateReport r;
  r.scenario = scenario;
  const int n = scenario.chain_length();
  for (auto [i, j] : measured_settings(scenario)) {
    if (!data.has_setting(i, j)) {
      throw InsufficientDataError("no cells recorded for setting pair (" + std::to_string(i) +
                                  ", " + std::to_string(j) + ")");
    }
    const Eigen::MatrixXd c = data.table(i, j, scenario.d);
    const double total = c.sum();
    if (total <= 0.0) {
      throw InsufficientDataError("setting pair (" + std::to_string(i) + ", " + std::to_string(j) +
                                  ") recorded zero coincidences");
    }
    double greater = 0.0;
    for (int s = 0; s < scenario.d; ++s)
      for (int t = 0; t < s; ++t) greater += c(s, t);
    const double p = greater / total;
    r.edges.push_back({i, j, p, std::sqrt(p * (1.0 - p) / total),
                       static_cast<std::uint64_t>(total)});
  }

  const auto& closing = r.edges.back();
  const auto& jedge = r.edges[static_cast<std::size_t>(scenario.J - 1)];
  r.p1 = closing.p_greater;
  r.p1_err = closing.std_error;
  r.p2 = jedge.p_greater;
  r.p2_err = jedge.std_error;
  r.fraction = r.p1 - r.p2;
  r.fraction_err = std::hypot(r.p1_err, r.p2_err);

  EdgeMap edges;
  double var = r.p1_err * r.p1_err;
  for (int i = 1; i < n; ++i) {
    const auto& e = r.edges[static_cast<std::size_t>(i - 1)];
    edges[{i, i + 1}] = e.p_greater;
    var += e.std_error * e.std_error;
  }
  edges[{n, 1}] = r.p1;
  r.bell = bell_expression(edges, scenario.k);
  r.bell_err = std::sqrt(var);
  return r;
}

inline constexpr const char* kCsvHeader = "setting_i,setting_j,outcome_s,outcome_t,count";

inline void write_csv(std::ostream& os, const CoincidenceDataset& data) {
  os << kCsvHeader << '\n';
  for (const auto& [key, n] : data.counts) {
    os << key.setting_i << ',' << key.setting_j << ',' << key.outcome_s << ',' << key.outcome_t
       << ',' << n << '\n';
  }
}

inline CoincidenceDataset read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw InsufficientDataError("empty coincidence CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw InvalidArgument("unexpected CSV header: " + line);
  CoincidenceDataset data;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field;
    std::vector<long long> v;
    while (std::getline(row, field, ',')) {
      try {
        std::size_t used = 0;
        v.push_back(std::stoll(field, &used));
        if (used != field.size()) throw std::invalid_argument(field);
      } catch (const std::exception&) {
        throw InvalidArgument("CSV line " + std::to_string(lineno) + ": bad field '" + field + "'");
      }
    }
    if (v.size() != 5 || v[0] < 1 || v[1] < 1 || v[2] < 1 || v[3] < 1 || v[4] < 0) {
      throw InvalidArgument("CSV line " + std::to_string(lineno) + ": expected 5 nonnegative fields");
    }
    data.counts[{static_cast<int>(v[0]), static_cast<int>(v[1]), static_cast<int>(v[2]),
                 static_cast<int>(v[3])}] += static_cast<std::uint64_t>(v[4]);
  }
  return data;
}

}  // namespace cna
