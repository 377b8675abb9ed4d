#pragma once

// Block embeddings into a stacked (primary + control) operator.

#include <Eigen/Sparse>
#include <vector>

namespace igals::detail {

template <typename Scalar, typename Source>
Eigen::SparseMatrix<Scalar> embed_diag(const Source& m, int offset, int size) {
  std::vector<Eigen::Triplet<Scalar>> trips;
  trips.reserve(static_cast<size_t>(m.nonZeros()));
  for (int k = 0; k < m.outerSize(); ++k) {
    for (typename Source::InnerIterator it(m, k); it; ++it) {
      trips.emplace_back(offset + static_cast<int>(it.row()), offset + static_cast<int>(it.col()),
                         static_cast<Scalar>(it.value()));
    }
  }
  Eigen::SparseMatrix<Scalar> out(size, size);
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

// [[0, C], [C^T, 0]] in the stacked operator.
template <typename Scalar, typename Source>
Eigen::SparseMatrix<Scalar> embed_coupling(const Source& c, int nu, int size) {
  std::vector<Eigen::Triplet<Scalar>> trips;
  trips.reserve(static_cast<size_t>(2 * c.nonZeros()));
  for (int k = 0; k < c.outerSize(); ++k) {
    for (typename Source::InnerIterator it(c, k); it; ++it) {
      trips.emplace_back(static_cast<int>(it.row()), nu + static_cast<int>(it.col()),
                         static_cast<Scalar>(it.value()));
      trips.emplace_back(nu + static_cast<int>(it.col()), static_cast<int>(it.row()),
                         static_cast<Scalar>(it.value()));
    }
  }
  Eigen::SparseMatrix<Scalar> out(size, size);
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

}  // namespace igals::detail
