#pragma once

// Extended-precision twins of the operator assemblies. The factorizations
// stay in double; these matrices only feed the refinement residuals, where
// the gamma^2-amplified cancellation (Delta u + f) would otherwise be limited
// by the double rounding of the stored entries.

#include <Eigen/Sparse>

#include "igals/assembly.hpp"

namespace igals::detail {

using SpMatLd = Eigen::SparseMatrix<long double>;
using VecLd = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

SpMatLd laplace_gramian_2d_ld(const TensorSpace& test, const TensorSpace& trial);
SpMatLd cross_laplace_gramian_ld(const TensorSpace& test, const TensorSpace& trial);
SpMatLd subdomain_mass_ld(const TensorSpace& test, const TensorSpace& trial, const Rect& gamma);
SpMatLd mass_2d_ld(const TensorSpace& test, const TensorSpace& trial);
SpMatLd boundary_mass_ld(const TensorSpace& test, const TensorSpace& trial);

/// Extended-precision load assembly (data functions still evaluate in double).
VecLd load_vector_ld(const TensorSpace& test, const Func2& phi, LoadAction action,
                     std::optional<Rect> gamma = std::nullopt);

}  // namespace igals::detail
