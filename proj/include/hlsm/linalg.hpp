#pragma once

#include "hlsm/tensor.hpp"

namespace hlsm {

/// Flips column signs so each column's largest-magnitude entry is positive
/// (ties go to the lowest row index).
void canonicalize_signs(Matrix& m);

struct LeftSingular {
  Matrix vectors;  // rows × r, column-orthonormal, canonical signs
  Vector values;   // leading r singular values, descending
};

/// Top-r left singular pairs. Wide inputs go through the Gram matrix m·mᵀ,
/// everything else through a dense SVD.
LeftSingular top_left_singular(const Matrix& m, std::size_t r);

/// All singular values of m, descending.
Vector singular_values(const Matrix& m);

/// ‖FᵀF − I‖_F.
double orthonormality_error(const Matrix& f);

/// Orthogonal projector F·Fᵀ.
Matrix projector(const Matrix& f);

}  // namespace hlsm
