#pragma once

// Shared generators and comparison helpers for the test binaries.

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/QR>

#include "cna/numeric.hpp"
#include "cna/scenario.hpp"

namespace cna::test {

inline std::mt19937_64 rng_for(std::uint64_t case_index, std::uint64_t salt = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(case_index), static_cast<std::uint32_t>(salt),
                    0xc0ffeeu};
  return std::mt19937_64(seq);
}

inline ComplexMatrix gaussian_matrix(std::mt19937_64& rng, int rows, int cols, bool complex_entries = true) {
  std::normal_distribution<double> n;
  ComplexMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const double re = n(rng);
    m(i) = Complex(re, complex_entries ? n(rng) : 0.0);
  }
  return m;
}

/// Haar-ish unitary: QR of a complex Gaussian matrix.
inline ComplexMatrix random_unitary(std::mt19937_64& rng, int d) {
  Eigen::HouseholderQR<ComplexMatrix> qr(gaussian_matrix(rng, d, d));
  return qr.householderQ() * ComplexMatrix::Identity(d, d);
}

inline StateMatrix random_state(std::mt19937_64& rng, int d, bool complex_entries = true) {
  return StateMatrix::normalized(gaussian_matrix(rng, d, d, complex_entries));
}

/// max_s min_φ ‖got_s − e^{iφ} want_s‖_∞
inline double row_phase_distance(const ComplexMatrix& got, const ComplexMatrix& want) {
  double worst = 0.0;
  for (Eigen::Index s = 0; s < got.rows(); ++s) {
    Complex overlap = 0.0;
    for (Eigen::Index g = 0; g < got.cols(); ++g) overlap += std::conj(want(s, g)) * got(s, g);
    const Complex phase = std::abs(overlap) > 0 ? overlap / std::abs(overlap) : Complex(1, 0);
    worst = std::max(worst, (got.row(s) - phase * want.row(s)).cwiseAbs().maxCoeff());
  }
  return worst;
}

/// Independent oracle for P(M_i > M_j): explicit sum over |⟨φ|M_i,s⟩|M_j,t⟩|²
/// built from the full d²-dimensional state vector.
inline double brute_probability_gt(const StateMatrix& state, const MeasurementBasis& mi,
                                   const MeasurementBasis& mj) {
  const int d = state.dim();
  const auto& A = mi.party() == Party::Alice ? mi.rows : mj.rows;
  const auto& B = mi.party() == Party::Alice ? mj.rows : mi.rows;
  double total = 0.0;
  for (int s = 0; s < d; ++s) {
    for (int t = 0; t < s; ++t) {
      // outcome s on mi, t on mj
      const int sa = mi.party() == Party::Alice ? s : t;
      const int sb = mi.party() == Party::Alice ? t : s;
      Complex amp = 0.0;
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) amp += std::conj(A(sa, a) * B(sb, b)) * state.h()(a, b);
      total += std::norm(amp);
    }
  }
  return total;
}

}  // namespace cna::test
