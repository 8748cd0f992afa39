#pragma once

// Complex linear-algebra primitives shared by the rest of the library.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "cna/errors.hpp"

namespace cna {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Components below this modulus are treated as zero when fixing phases.
inline constexpr double kPhaseCutoff = 1e-9;
/// Relative singular-value threshold used for numeric rank.
inline constexpr double kRankTolerance = 1e-9;

inline bool all_finite(const ComplexMatrix& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const Complex z = m.data()[i];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

/// Largest entrywise deviation of m·m† from the identity.
inline double unitarity_defect(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) {
    throw DimensionError("unitarity check needs a square matrix, got " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
  const ComplexMatrix diff = m * m.adjoint() - ComplexMatrix::Identity(m.rows(), m.cols());
  return diff.cwiseAbs().maxCoeff();
}

inline bool is_unitary(const ComplexMatrix& m, double tol) {
  return unitarity_defect(m) <= tol;
}

/// Index of the first component whose modulus exceeds the phase cutoff, or -1.
template <class Vec>
Eigen::Index first_significant(const Vec& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > kPhaseCutoff) return i;
  }
  return -1;
}

/// Phase that makes the first significant component of v real and positive.
template <class Vec>
Complex canonical_phase(const Vec& v) {
  const Eigen::Index i = first_significant(v);
  if (i < 0) return {1.0, 0.0};
  return v(i) / std::abs(v(i));
}

/// Numeric rank of a matrix, relative to its largest singular value.
inline int numeric_rank(const ComplexMatrix& m) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > kRankTolerance * s(0)) ++rank;
  }
  return rank;
}

/// Unit vector v with <c, v> = 0 for every constraint c (Hermitian product).
///
/// The constraints must span a (dim-1)-dimensional subspace. The returned
/// vector has its first component of modulus > 1e-9 real and positive.
/// Throws DegenerateConstraintError carrying the numeric rank otherwise.
inline ComplexVector orthonormal_complement_vector(std::span<const ComplexVector> constraints,
                                                   Eigen::Index dim) {
  if (dim < 1) throw DimensionError("complement dimension must be positive");
  ComplexMatrix system(static_cast<Eigen::Index>(constraints.size()), dim);
  for (std::size_t r = 0; r < constraints.size(); ++r) {
    if (constraints[r].size() != dim) {
      throw DimensionError("constraint " + std::to_string(r) + " has length " +
                           std::to_string(constraints[r].size()) + ", expected " +
                           std::to_string(dim));
    }
    system.row(static_cast<Eigen::Index>(r)) = constraints[r].adjoint();
  }

  ComplexVector v;
  int rank = 0;
  if (constraints.empty()) {
    if (dim != 1) throw DegenerateConstraintError(0, static_cast<int>(dim));
    v = ComplexVector::Ones(1);
  } else {
    // Pad to a square system so a full V is always available.
    ComplexMatrix padded = ComplexMatrix::Zero(std::max(system.rows(), dim), dim);
    padded.topRows(system.rows()) = system;
    Eigen::JacobiSVD<ComplexMatrix> svd(padded, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double largest = s(0);
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      if (largest > 0.0 && s(i) > kRankTolerance * largest) ++rank;
    }
    if (rank != dim - 1) throw DegenerateConstraintError(rank, static_cast<int>(dim));
    v = svd.matrixV().col(dim - 1);
  }

  v.normalize();
  v /= canonical_phase(v);
  return v;
}

inline ComplexVector orthonormal_complement_vector(const std::vector<ComplexVector>& constraints,
                                                   Eigen::Index dim) {
  return orthonormal_complement_vector(std::span<const ComplexVector>(constraints), dim);
}

/// h = U · diag(lambdas) · V†, lambdas descending.
struct SchmidtForm {
  std::vector<double> lambdas;
  ComplexMatrix left;   // U
  ComplexMatrix right;  // V

  ComplexMatrix reconstruct() const {
    Eigen::VectorXd s = Eigen::Map<const Eigen::VectorXd>(lambdas.data(),
                                                         static_cast<Eigen::Index>(lambdas.size()));
    return left * s.cast<Complex>().asDiagonal() * right.adjoint();
  }
};

inline constexpr double kNormTolerance = 1e-9;
inline constexpr double kDegenerateSingularGap = 1e-10;

/// Schmidt decomposition of a normalized square amplitude matrix.
///
/// Column phases of U are fixed so each column's first significant entry is
/// real positive (V follows). Within a block of equal singular values the
/// columns are ordered by (real, imag) of that first significant entry.
inline SchmidtForm schmidt_decompose(const ComplexMatrix& h) {
  if (h.rows() != h.cols()) {
    throw DimensionError("Schmidt decomposition needs a square matrix");
  }
  if (!all_finite(h)) throw NormalizationError("state matrix has non-finite entries");
  const double norm = h.norm();
  if (std::abs(norm - 1.0) > kNormTolerance) {
    throw NormalizationError("state matrix Frobenius norm is " + std::to_string(norm) +
                             ", expected 1");
  }

  const Eigen::Index d = h.rows();
  Eigen::JacobiSVD<ComplexMatrix> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  ComplexMatrix u = svd.matrixU();
  ComplexMatrix v = svd.matrixV();
  const Eigen::VectorXd s = svd.singularValues();

  for (Eigen::Index g = 0; g < d; ++g) {
    const Complex phase = canonical_phase(u.col(g));
    u.col(g) /= phase;
    v.col(g) /= phase;
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  auto key = [&](Eigen::Index g) {
    const Eigen::Index i = first_significant(u.col(g));
    const Complex z = i < 0 ? Complex{} : u(i, g);
    return std::pair{z.real(), z.imag()};
  };
  for (Eigen::Index begin = 0; begin < d;) {
    Eigen::Index end = begin + 1;
    while (end < d && std::abs(s(begin) - s(end)) <= kDegenerateSingularGap) ++end;
    std::stable_sort(order.begin() + begin, order.begin() + end,
                     [&](Eigen::Index a, Eigen::Index b) { return key(a) < key(b); });
    begin = end;
  }

  SchmidtForm form;
  form.lambdas.resize(static_cast<std::size_t>(d));
  form.left.resize(d, d);
  form.right.resize(d, d);
  for (Eigen::Index g = 0; g < d; ++g) {
    const Eigen::Index src = order[static_cast<std::size_t>(g)];
    form.lambdas[static_cast<std::size_t>(g)] = s(src);
    form.left.col(g) = u.col(src);
    form.right.col(g) = v.col(src);
  }
  return form;
}

}  // namespace cna
