#pragma once

// (k, d, J) scenarios, the measurement ladder, and chain probabilities.
//
// Chain indices and outcomes are 1-based in the public surface: M_1 … M_{2k},
// outcomes 1 … d. Odd chain indices belong to Alice, even ones to Bob.

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cna/errors.hpp"
#include "cna/numeric.hpp"

namespace cna {

struct Scenario {
  int k = 2;  // settings per party
  int d = 2;  // outcomes per measurement
  int J = 1;  // position of the nonzero edge P(M_J > M_{J+1})

  int chain_length() const noexcept { return 2 * k; }

  void validate() const {
    if (k < 2) throw InvalidArgument("k must be >= 2, got " + std::to_string(k));
    if (d < 2) throw InvalidArgument("d must be >= 2, got " + std::to_string(d));
    if (J < 1 || J > 2 * k - 1) {
      throw InvalidArgument("J must lie in 1.." + std::to_string(2 * k - 1) + ", got " +
                            std::to_string(J));
    }
  }

  static Scenario make(int k, int d, int J = 1) {
    Scenario s{k, d, J};
    s.validate();
    return s;
  }

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

enum class Party { Alice, Bob };

constexpr Party party_of(int chain_index) noexcept {
  return chain_index % 2 == 1 ? Party::Alice : Party::Bob;
}

constexpr Party other(Party p) noexcept { return p == Party::Alice ? Party::Bob : Party::Alice; }

/// How the rows/columns of a raw amplitude table map onto (Alice, Bob) indices.
///
/// Canonical: entry (a, b) is h_ab with a indexing Alice.
/// Reflected: Alice index a (0-based) reads raw row (-a mod d) and Bob index b
///   reads raw column d-1-b. This is the layout of the published optimal-state
///   tables; it is the only row/column relabeling under which those tables
///   reproduce their published fractions with the gauge M_1 = M_{2k} = 1.
enum class StateLayout { Canonical, Reflected };

/// Normalized bipartite pure state stored as its canonical amplitude matrix h_ab.
class StateMatrix {
 public:
  StateMatrix() = default;

  /// Takes a raw table in the given layout; throws unless it has unit norm.
  explicit StateMatrix(const ComplexMatrix& raw, StateLayout layout = StateLayout::Canonical)
      : h_(to_canonical(raw, layout)) {
    if (!all_finite(h_)) throw NormalizationError("state has non-finite amplitudes");
    const double n = h_.norm();
    if (std::abs(n - 1.0) > kNormTolerance) {
      throw NormalizationError("state Frobenius norm is " + std::to_string(n) + ", expected 1");
    }
  }

  /// Rescales raw to unit Frobenius norm first.
  static StateMatrix normalized(const ComplexMatrix& raw,
                                StateLayout layout = StateLayout::Canonical) {
    const double n = raw.norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw NormalizationError("cannot normalize a zero state");
    return StateMatrix(raw / n, layout);
  }

  static StateMatrix diagonal(const std::vector<double>& lambdas) {
    const auto d = static_cast<Eigen::Index>(lambdas.size());
    ComplexMatrix h = ComplexMatrix::Zero(d, d);
    for (Eigen::Index g = 0; g < d; ++g) h(g, g) = lambdas[static_cast<std::size_t>(g)];
    return StateMatrix(h);
  }

  const ComplexMatrix& h() const noexcept { return h_; }
  int dim() const noexcept { return static_cast<int>(h_.rows()); }

  /// The raw table that would load back to this state under `layout`.
  ComplexMatrix raw(StateLayout layout) const {
    if (layout == StateLayout::Canonical) return h_;
    const Eigen::Index d = h_.rows();
    ComplexMatrix out(d, d);
    for (Eigen::Index a = 0; a < d; ++a)
      for (Eigen::Index b = 0; b < d; ++b) out((d - a) % d, d - 1 - b) = h_(a, b);
    return out;
  }

 private:
  static ComplexMatrix to_canonical(const ComplexMatrix& raw, StateLayout layout) {
    if (raw.rows() != raw.cols() || raw.rows() < 1) {
      throw DimensionError("state matrix must be square and non-empty");
    }
    if (layout == StateLayout::Canonical) return raw;
    const Eigen::Index d = raw.rows();
    ComplexMatrix h(d, d);
    for (Eigen::Index a = 0; a < d; ++a)
      for (Eigen::Index b = 0; b < d; ++b) h(a, b) = raw((d - a) % d, d - 1 - b);
    return h;
  }

  ComplexMatrix h_;
};

/// One von Neumann measurement: row s-1 holds the basis vector of outcome s.
struct MeasurementBasis {
  int index = 1;  // chain index i
  ComplexMatrix rows;

  Party party() const noexcept { return party_of(index); }
  int dim() const noexcept { return static_cast<int>(rows.rows()); }

  static MeasurementBasis identity(int index, int d) {
    return {index, ComplexMatrix::Identity(d, d)};
  }
};

/// Contracts one party's basis vector with the state; the result lives in the
/// other party's space. Alice row m: u_b = Σ_a conj(m_a) h_ab. Bob row m:
/// u_a = Σ_b conj(m_b) h_ab.
inline ComplexVector contract(const StateMatrix& state, const ComplexVector& m, Party party) {
  if (party == Party::Alice) return state.h().transpose() * m.conjugate();
  return state.h() * m.conjugate();
}

namespace detail {

inline void check_pair(const StateMatrix& state, const MeasurementBasis& mi,
                       const MeasurementBasis& mj) {
  if (mi.party() == mj.party()) {
    throw ParityError("measurements M_" + std::to_string(mi.index) + " and M_" +
                      std::to_string(mj.index) + " belong to the same party");
  }
  if (mi.rows.rows() != state.dim() || mi.rows.cols() != state.dim() ||
      mj.rows.rows() != state.dim() || mj.rows.cols() != state.dim()) {
    throw DimensionError("measurement dimension does not match the state");
  }
}

}  // namespace detail

/// P(M_i = s, M_j = t) as a d×d matrix indexed [s-1][t-1].
inline Eigen::MatrixXd joint_distribution(const StateMatrix& state, const MeasurementBasis& mi,
                                          const MeasurementBasis& mj) {
  detail::check_pair(state, mi, mj);
  const auto& alice = mi.party() == Party::Alice ? mi.rows : mj.rows;
  const auto& bob = mi.party() == Party::Alice ? mj.rows : mi.rows;
  const ComplexMatrix amp = alice.conjugate() * state.h() * bob.adjoint();
  Eigen::MatrixXd p = amp.cwiseAbs2();
  if (mi.party() == Party::Bob) p.transposeInPlace();
  return p;
}

/// P(M_i > M_j) = Σ_{s>t} |<φ|M_{i,s}>|M_{j,t}>|².
inline double probability_gt(const StateMatrix& state, const MeasurementBasis& mi,
                             const MeasurementBasis& mj) {
  const Eigen::MatrixXd p = joint_distribution(state, mi, mj);
  double total = 0.0;
  for (Eigen::Index s = 0; s < p.rows(); ++s)
    for (Eigen::Index t = 0; t < s; ++t) total += p(s, t);
  return total;
}

namespace detail {

template <class Build>
ComplexVector ladder_row(Build&& constraints, Eigen::Index dim, int position, int outcome) {
  try {
    return orthonormal_complement_vector(constraints, dim);
  } catch (const DegenerateConstraintError& e) {
    throw LadderDegeneracyError(position, outcome, e.rank());
  }
}

}  // namespace detail

/// Basis M_{i+1} forced by P(M_i > M_{i+1}) = 0, built outcome by outcome.
inline MeasurementBasis derive_next_basis(const StateMatrix& state, const MeasurementBasis& mi) {
  const int d = state.dim();
  if (mi.dim() != d || mi.rows.cols() != d) {
    throw DimensionError("measurement dimension does not match the state");
  }
  std::vector<ComplexVector> images;
  images.reserve(static_cast<std::size_t>(d));
  for (int s = 0; s < d; ++s) images.push_back(contract(state, mi.rows.row(s).transpose(), mi.party()));

  MeasurementBasis next{mi.index + 1, ComplexMatrix(d, d)};
  std::vector<ComplexVector> constraints;
  for (int t = 0; t < d; ++t) {
    constraints.clear();
    for (int s = t + 1; s < d; ++s) constraints.push_back(images[static_cast<std::size_t>(s)]);
    for (int r = 0; r < t; ++r) constraints.push_back(next.rows.row(r).transpose());
    next.rows.row(t) = detail::ladder_row(constraints, d, next.index, t + 1).transpose();
  }
  return next;
}

/// Basis M_i forced by P(M_i > M_{i+1}) = 0 given M_{i+1}; rows built from s = d down to 1.
inline MeasurementBasis derive_prev_basis(const StateMatrix& state,
                                          const MeasurementBasis& mi_plus_1) {
  const int d = state.dim();
  if (mi_plus_1.dim() != d || mi_plus_1.rows.cols() != d) {
    throw DimensionError("measurement dimension does not match the state");
  }
  std::vector<ComplexVector> images;
  images.reserve(static_cast<std::size_t>(d));
  for (int t = 0; t < d; ++t) {
    images.push_back(contract(state, mi_plus_1.rows.row(t).transpose(), mi_plus_1.party()));
  }

  MeasurementBasis prev{mi_plus_1.index - 1, ComplexMatrix(d, d)};
  std::vector<ComplexVector> constraints;
  for (int s = d - 1; s >= 0; --s) {
    constraints.clear();
    for (int t = 0; t < s; ++t) constraints.push_back(images[static_cast<std::size_t>(t)]);
    for (int r = s + 1; r < d; ++r) constraints.push_back(prev.rows.row(r).transpose());
    prev.rows.row(s) = detail::ladder_row(constraints, d, prev.index, s + 1).transpose();
  }
  return prev;
}

struct MeasurementChain {
  Scenario scenario;
  StateMatrix state;
  std::vector<MeasurementBasis> bases;  // bases[i-1] is M_i

  const MeasurementBasis& at(int i) const { return bases.at(static_cast<std::size_t>(i - 1)); }

  /// P(M_i > M_{i+1}) for i in 1..2k-1.
  double edge_gt(int i) const { return probability_gt(state, at(i), at(i + 1)); }

  /// Largest P(M_i > M_{i+1}) over the zero-constrained edges.
  double max_residual() const {
    double worst = 0.0;
    for (int i = 1; i < scenario.chain_length(); ++i) {
      if (i != scenario.J) worst = std::max(worst, edge_gt(i));
    }
    return worst;
  }
};

/// Gauge M_1 = M_{2k} = 1; forward ladder up to M_J, backward ladder down to M_{J+1}.
inline MeasurementChain build_chain(const Scenario& scenario, const StateMatrix& state) {
  scenario.validate();
  if (state.dim() != scenario.d) {
    throw DimensionError("state dimension " + std::to_string(state.dim()) +
                         " does not match scenario d = " + std::to_string(scenario.d));
  }
  const int n = scenario.chain_length();
  std::vector<std::optional<MeasurementBasis>> slots(static_cast<std::size_t>(n));
  slots.front() = MeasurementBasis::identity(1, scenario.d);
  slots.back() = MeasurementBasis::identity(n, scenario.d);
  for (int i = 1; i < scenario.J; ++i) {
    slots[static_cast<std::size_t>(i)] = derive_next_basis(state, *slots[static_cast<std::size_t>(i - 1)]);
  }
  for (int i = n; i > scenario.J + 1; --i) {
    slots[static_cast<std::size_t>(i - 2)] =
        derive_prev_basis(state, *slots[static_cast<std::size_t>(i - 1)]);
  }

  MeasurementChain chain{scenario, state, {}};
  chain.bases.reserve(static_cast<std::size_t>(n));
  for (auto& b : slots) chain.bases.push_back(std::move(*b));
  return chain;
}

/// All 2k-1 chain edges forced to zero: M_2 … M_{2k} follow from M_1 = 1.
inline std::vector<MeasurementBasis> build_hardy_chain(int k, const StateMatrix& state) {
  if (k < 2) throw InvalidArgument("k must be >= 2, got " + std::to_string(k));
  std::vector<MeasurementBasis> bases;
  bases.reserve(static_cast<std::size_t>(2 * k));
  bases.push_back(MeasurementBasis::identity(1, state.dim()));
  for (int i = 1; i < 2 * k; ++i) bases.push_back(derive_next_basis(state, bases.back()));
  return bases;
}

/// Hardy success probability P(M_1 > M_{2k}) on the all-zero chain.
inline double hardy_probability(int k, const StateMatrix& state) {
  const auto bases = build_hardy_chain(k, state);
  return probability_gt(state, bases.front(), bases.back());
}

/// Edge keys: (i, i+1) for i = 1..2k-1 carry P(M_i > M_{i+1}); the closing key
/// (2k, 1) carries P(M_{2k} < M_1), i.e. P(M_1 > M_{2k}).
using Edge = std::pair<int, int>;
using EdgeMap = std::map<Edge, double>;

/// Logical Bell expression
///   S = P(M_{2k} < M_1) + Σ_{i<2k} P(M_i ≤ M_{i+1}) - (2k - 1),
/// with P(M_i ≤ M_{i+1}) taken as 1 - P(M_i > M_{i+1}). Classically S ≤ 0.
inline double bell_expression(const EdgeMap& probabilities, int k) {
  if (k < 1) throw InvalidArgument("k must be positive");
  const int n = 2 * k;
  auto lookup = [&](Edge e) {
    const auto it = probabilities.find(e);
    if (it == probabilities.end()) {
      throw IncompleteDataError("missing edge (" + std::to_string(e.first) + ", " +
                                std::to_string(e.second) + ")");
    }
    return it->second;
  };
  double s = lookup({n, 1});
  for (int i = 1; i < n; ++i) s += 1.0 - lookup({i, i + 1});
  return s - static_cast<double>(n - 1);
}

struct FractionReport {
  double p1 = 0.0;
  double p2 = 0.0;
  double fraction = 0.0;
  double s_ideal = 0.0;
  EdgeMap edge_probabilities;
};

inline FractionReport cabello_fraction(const MeasurementChain& chain) {
  const int n = chain.scenario.chain_length();
  FractionReport r;
  for (int i = 1; i < n; ++i) r.edge_probabilities[{i, i + 1}] = chain.edge_gt(i);
  r.p1 = probability_gt(chain.state, chain.at(1), chain.at(n));
  r.edge_probabilities[{n, 1}] = r.p1;
  r.p2 = r.edge_probabilities.at({chain.scenario.J, chain.scenario.J + 1});
  r.fraction = r.p1 - r.p2;
  r.s_ideal = bell_expression(r.edge_probabilities, chain.scenario.k);
  return r;
}

/// Cheap path for the optimizer: P1 - P2 without the full report.
inline double fraction_only(const Scenario& scenario, const StateMatrix& state) {
  const auto chain = build_chain(scenario, state);
  const int n = scenario.chain_length();
  return probability_gt(state, chain.at(1), chain.at(n)) - chain.edge_gt(scenario.J);
}

}  // namespace cna
