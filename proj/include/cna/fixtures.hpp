#pragma once

// Published reference data: optimal states, Schmidt diagonals, measurement
// vectors in the Schmidt/OAM frame, theoretical fraction tables, and the
// laboratory values. Everything here is read-only.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cna/scenario.hpp"

namespace cna::fixtures {

struct StateFixture {
  std::string name;  // H_k_d_J
  Scenario scenario;
  std::vector<std::vector<double>> raw;  // as published, StateLayout::Reflected
  std::vector<double> schmidt_diagonal;  // published λ list
  double published_fraction;

  StateMatrix state() const {
    const auto d = static_cast<Eigen::Index>(raw.size());
    ComplexMatrix m(d, d);
    for (Eigen::Index a = 0; a < d; ++a)
      for (Eigen::Index b = 0; b < d; ++b)
        m(a, b) = raw[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
    // Published entries carry six decimals; renormalize the rounding away.
    return StateMatrix::normalized(m, StateLayout::Reflected);
  }
};

inline const std::vector<StateFixture>& states() {
  static const std::vector<StateFixture> all = {
      {"H_2_2_1",
       {2, 2, 1},
       {{0.750000, 0.433013}, {-0.250000, 0.433013}},
       {0.866025, 0.500000},
       0.125000},
      {"H_3_2_1",
       {3, 2, 1},
       {{-0.776887, 0.321797}, {-0.207107, -0.500000}},
       {0.840896, 0.541196},
       0.207107},
      {"H_4_2_1",
       {4, 2, 1},
       {{-0.779580, 0.259917}, {-0.180229, -0.540570}},
       {0.821767, 0.569823},
       0.259733},
      {"H_5_2_1",
       {5, 2, 1},
       {{-0.776705, 0.221028}, {-0.161434, -0.567288}},
       {0.807542, 0.589811},
       0.295755},
      {"H_6_2_1",
       {6, 2, 1},
       {{-0.772609, 0.194250}, {-0.147381, -0.586192}},
       {0.796654, 0.604435},
       0.321900},
      {"H_2_3_1",
       {2, 3, 1},
       {{-0.633325, 0.359393, 0.309398},
        {-0.173969, -0.372389, -0.134408},
        {-0.186571, 0.159324, -0.356106}},
       {0.802376, 0.456065, 0.384963},
       0.193093},
      {"H_2_4_1",
       {2, 4, 1},
       {{0.562093, 0.316214, -0.266562, 0.249385},
        {-0.137751, 0.328611, -0.131867, 0.080517},
        {-0.132708, -0.123247, -0.322726, 0.110432},
        {0.156836, 0.118696, -0.125494, -0.310479}},
       {0.762167, 0.432447, 0.357871, 0.322521},
       0.238389},
  };
  return all;
}

inline const StateFixture* find_state(std::string_view name) {
  for (const auto& f : states())
    if (f.name == name) return &f;
  return nullptr;
}

inline const StateFixture* find_state(const Scenario& s) {
  for (const auto& f : states())
    if (f.scenario == s) return &f;
  return nullptr;
}

/// Measurement vectors in the Schmidt (OAM) frame. alice[i] / bob[i] are the
/// bases A_{i+1} / B_{i+1}; chain order is A_1, B_1, A_2, B_2, …
struct FrameBases {
  std::string name;
  std::vector<std::vector<std::vector<double>>> alice;
  std::vector<std::vector<std::vector<double>>> bob;

  /// Rows of M_i (chain index, 1-based) as a real matrix.
  ComplexMatrix chain_basis(int i) const {
    const auto& src = (i % 2 == 1) ? alice : bob;
    const auto& rows = src.at(static_cast<std::size_t>((i - 1) / 2));
    const auto d = static_cast<Eigen::Index>(rows.size());
    ComplexMatrix m(d, d);
    for (Eigen::Index s = 0; s < d; ++s)
      for (Eigen::Index g = 0; g < d; ++g)
        m(s, g) = rows[static_cast<std::size_t>(s)][static_cast<std::size_t>(g)];
    return m;
  }
};

inline const std::vector<FrameBases>& frame_bases() {
  static const std::vector<FrameBases> all = {
      {"H_2_2_1",
       {{{1, 0}, {0, 1}}, {{-0.707107, 0.707107}, {-0.707107, -0.707107}}},
       {{{0.866025, -0.500000}, {0.500000, 0.866025}},
        {{-0.500000, 0.866025}, {-0.866025, -0.500000}}}},
      {"H_3_2_1",
       {{{-1, 0}, {0, 1}},
        {{-0.840896, 0.541196}, {-0.541196, -0.840896}},
        {{-0.541196, 0.840896}, {-0.840896, -0.541196}}},
       {{{0.923880, -0.382683}, {-0.382683, -0.923880}},
        {{-0.707107, 0.707107}, {-0.707107, -0.707107}},
        {{-0.382683, 0.923880}, {-0.923880, -0.382683}}}},
      {"H_4_2_1",
       {{{-1, 0}, {0, 1}},
        {{-0.901235, 0.433331}, {-0.433331, -0.901235}},
        {{-0.707107, 0.707107}, {-0.707107, -0.707107}},
        {{-0.433331, 0.901235}, {-0.901235, -0.433331}}},
       {{{0.948663, -0.316290}, {-0.316290, -0.948663}},
        {{-0.821767, 0.569823}, {-0.569823, -0.821767}},
        {{-0.569823, 0.821767}, {-0.821767, -0.569823}},
        {{-0.316290, 0.948663}, {-0.948663, -0.316290}}}},
      {"H_5_2_1",
       {{{-1, 0}, {0, 1}},
        {{-0.931774, 0.363039}, {-0.363039, -0.931774}},
        {{-0.807542, 0.589811}, {-0.589811, -0.807542}},
        {{-0.589811, 0.807542}, {-0.807542, -0.589811}},
        {{-0.363039, 0.931774}, {-0.931774, -0.363039}}},
       {{{0.961814, -0.273705}, {-0.273705, -0.961814}},
        {{-0.882309, 0.470670}, {-0.470670, -0.882309}},
        {{-0.707107, 0.707107}, {-0.707107, -0.707107}},
        {{-0.470670, 0.882309}, {-0.882309, -0.470670}},
        {{-0.273705, 0.961814}, {-0.961814, -0.273705}}}},
      {"H_6_2_1",
       {{{-1, 0}, {0, 1}},
        {{-0.949239, 0.314555}, {-0.314555, -0.949239}},
        {{-0.866662, 0.498896}, {-0.498896, -0.866662}},
        {{-0.707107, 0.707107}, {-0.707107, -0.707107}},
        {{-0.498896, 0.866662}, {-0.866662, -0.498896}},
        {{-0.314555, 0.949239}, {-0.949239, -0.314555}}},
       {{{0.969818, -0.243832}, {-0.243832, -0.969818}},
        {{-0.916407, 0.400248}, {-0.400248, -0.916407}},
        {{-0.796654, 0.604435}, {-0.604435, -0.796654}},
        {{-0.604435, 0.796654}, {-0.796654, -0.604435}},
        {{-0.400248, 0.916407}, {-0.916407, -0.400248}},
        {{-0.243832, 0.969818}, {-0.969818, -0.243832}}}},
      {"H_2_3_1",
       {{{-0.981861, 0, -0.189603}, {0.134070, 0.707107, -0.694280}, {-0.134070, 0.707107, 0.694280}},
        {{0.558726, -0.707107, 0.433389}, {0.612904, 0, -0.790157}, {0.558726, 0.707107, 0.433389}}},
       {{{0.777099, -0.559000, 0.289199},
         {-0.528631, -0.330348, 0.781933},
         {-0.341564, -0.760519, -0.552217}},
        {{0.341564, -0.760519, 0.552217},
         {0.528631, -0.330348, -0.781933},
         {-0.777099, -0.559000, -0.289199}}}},
      {"H_2_4_1",
       {{{0.964350, 0, 0.264629, 0},
         {0.187121, 0.477609, -0.681899, 0.521431},
         {0, 0.737414, 0, -0.675441},
         {0.187121, -0.477609, -0.681899, -0.521431}},
        {{0.469000, -0.636951, 0.529187, -0.307072},
         {-0.529187, 0.307072, 0.469000, -0.636951},
         {0.529187, 0.307072, -0.469000, -0.636951},
         {0.469000, 0.636951, 0.529187, 0.307072}}},
       {{{0.715887, -0.551646, 0.379278, -0.198344},
         {0.509916, 0.021673, -0.618488, 0.597485},
         {-0.400459, -0.557354, 0.293274, 0.665567},
         {0.259083, 0.620139, 0.622585, 0.400864}},
        {{0.259083, -0.620139, 0.622585, -0.400864},
         {-0.400459, 0.557354, 0.293274, -0.665567},
         {-0.509916, 0.021673, 0.618488, 0.597485},
         {-0.715887, -0.551646, -0.379278, -0.198344}}}},
  };
  return all;
}

inline const FrameBases* find_frame_bases(std::string_view name) {
  for (const auto& f : frame_bases())
    if (f.name == name) return &f;
  return nullptr;
}

/// A published number with its uncertainty (0 when none is quoted) and an anchor key.
struct ReferenceValue {
  double value;
  double error = 0.0;
  std::string anchor;
};

struct ReferenceRow {
  Scenario scenario;
  std::optional<ReferenceValue> cabello;
  std::optional<ReferenceValue> hardy;
  std::optional<ReferenceValue> gap;
  std::optional<ReferenceValue> lab_fraction;
  std::optional<ReferenceValue> lab_bell;
};

/// Published numbers keyed by scenario. Laboratory values are for side-by-side
/// display only; they include apparatus noise the simulator does not model.
class ReferenceTable {
 public:
  static const ReferenceTable& instance() {
    static const ReferenceTable table;
    return table;
  }

  const std::vector<ReferenceRow>& rows() const noexcept { return rows_; }

  const ReferenceRow* find(const Scenario& s) const {
    for (const auto& r : rows_)
      if (r.scenario == s) return &r;
    return nullptr;
  }

  std::optional<double> cabello(const Scenario& s) const {
    if (const auto* r = find(s); r && r->cabello) return r->cabello->value;
    return std::nullopt;
  }

  std::optional<double> hardy(int k, int d) const {
    if (const auto* r = find({k, d, 1}); r && r->hardy) return r->hardy->value;
    return std::nullopt;
  }

  /// Maximal Cabello fraction for J = 1..k in the (5, 2) scenario family.
  static const std::vector<double>& j_scan_5_2() {
    static const std::vector<double> v = {0.295755, 0.284323, 0.278595, 0.276103, 0.275415};
    return v;
  }

  /// Maximal fraction of the original two-setting argument, (2, 2, 2).
  static constexpr double original_argument_fraction = 0.1078;

 private:
  ReferenceTable() {
    const std::string k_table = "published.theory.settings_scan";
    const std::string d_table = "published.theory.dimension_scan";
    const std::string lab = "published.lab.fraction";
    const std::string bell = "published.lab.bell_expression";
    auto row = [&](int k, int d, double c, double h, double gap, double lf, double lfe,
                   double s, double se, const std::string& table) {
      ReferenceRow r;
      r.scenario = {k, d, 1};
      r.cabello = ReferenceValue{c, 0.0, table};
      r.hardy = ReferenceValue{h, 0.0, table};
      r.gap = ReferenceValue{gap, 0.0, table};
      r.lab_fraction = ReferenceValue{lf, lfe, lab};
      r.lab_bell = ReferenceValue{s, se, bell};
      rows_.push_back(std::move(r));
    };
    row(3, 2, 0.207107, 0.174550, 0.032557, 0.2014, 0.0121, 0.1754, 0.0122, k_table);
    row(4, 2, 0.259733, 0.231263, 0.028470, 0.2356, 0.0081, 0.1959, 0.0152, k_table);
    row(5, 2, 0.295755, 0.270880, 0.024875, 0.2840, 0.0078, 0.2285, 0.0108, k_table);
    row(6, 2, 0.321900, 0.299953, 0.021947, 0.2872, 0.0029, 0.2176, 0.0085, k_table);
    row(2, 2, 0.125000, 0.090170, 0.034830, 0.1196, 0.0081, 0.0702, 0.0107, d_table);
    row(2, 3, 0.193093, 0.141327, 0.051766, 0.1769, 0.0128, 0.1099, 0.0118, d_table);
    row(2, 4, 0.238389, 0.176512, 0.061877, 0.2029, 0.0127, 0.0506, 0.0209, d_table);
  }

  std::vector<ReferenceRow> rows_;
};

}  // namespace cna::fixtures
