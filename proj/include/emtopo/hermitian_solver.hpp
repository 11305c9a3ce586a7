#pragma once

#include "emtopo/types.hpp"

namespace emtopo {

/// Dense Hermitian eigensolve (LAPACK zheevd), lower triangle of a is read.
/// Eigenvalues ascending; with vectors, a is overwritten by them.
void hermitian_eig(CMat& a, RVec& w, bool vectors);

}  // namespace emtopo
