#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "emtopo/errors.hpp"
#include "emtopo/hermitian_solver.hpp"

namespace emtopo {

void hermitian_eig(CMat& a, RVec& w, bool vectors) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  if (a.cols() != n) throw DimensionMismatch("hermitian_eig needs a square matrix");
  w.resize(n);
  if (n == 0) return;
  // Eigen stores column-major.
  lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, vectors ? 'V' : 'N', 'L', n, a.data(), n,
                                   w.data());
  if (info != 0) throw SolverFailure("zheevd info = " + std::to_string(info));
}

}  // namespace emtopo
