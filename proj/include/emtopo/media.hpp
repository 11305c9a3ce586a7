#pragma once

#include <cstdint>

#include "emtopo/weights.hpp"

namespace emtopo::media {

/// Bounds set from the exact spectrum of a constant matrix.
MaterialWeights homogeneous(const Lattice& l, const Mat6cd& w);
MaterialWeights vacuum(const Lattice& l);
MaterialWeights homogeneous_eps_mu(const Lattice& l, double eps, double mu);

/// Chain with eps(x) = 7 - 6 cos(2 pi x) id, mu = id; eps ranges over [1, 13].
MaterialWeights two_phase_chain();

/// Constant gyrotropic eps = (2, 0.8i, 0; -0.8i, 2, 0; 0, 0, 2), mu = id.
MaterialWeights gyrotropic_homogeneous(const Lattice& l);
/// Constant eps = mu = 2 id, chi = 0.3 id.
MaterialWeights magneto_electric_homogeneous(const Lattice& l);

struct RodParams {
  double aniso = 1.0;   // weight of the y harmonic in the profile
  double kappa = 12.4;  // imaginary off-diagonal in-plane eps and mu
  double contrast = 13.0;
  double zz_contrast = 14.0;
  double detune = 1.01;  // mu_zz / eps_zz
};

/// Square-lattice rod crystal W = A0 + g(x) A1 with
/// g = (1 + cos 2pi x)(1 + a cos 2pi y) / (2(1 + a)) in [0, 1].
MaterialWeights rod_crystal(const RodParams& p = {});
/// Gyrotropic rod crystal with default parameters.
MaterialWeights gyrotropic_rods();
/// Real square-lattice crystal, mu = id and
/// eps(x) = eps0 + 4 f(x) id with eps0 = 7.5 id + 3 (e_x e_z^T + e_z e_x^T),
/// f = 0.5 cos 2pi x + 0.3 cos 2pi y + 0.3 sin 2pi(x + y).
/// No inversion centre, TE and TM coupled through eps_xz.
MaterialWeights real_crystal();

/// One fixture per media type on the square lattice.
MaterialWeights golden_dual_symmetric();
MaterialWeights golden_non_gyrotropic();
MaterialWeights golden_magneto_electric();
MaterialWeights golden_gyrotropic();

/// Random Hermitian field over the shell |n_i| <= shell; coefficients drawn
/// so that the declared bounds are rigorous. real_field forces W(x) real.
MaterialWeights random_weights(const Lattice& l, std::uint64_t seed, bool real_field,
                               int shell = 1, double modulation = 0.3);

/// eps_xx(x) = 1 + cos(2 pi x), zero at x = 1/2. Declared bounds [0.01, 2].
MaterialWeights singular_chain();

}  // namespace emtopo::media
