#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "emtopo/errors.hpp"
#include "emtopo/maxwell_operator.hpp"
#include "emtopo/media.hpp"

using namespace emtopo;

namespace {

CVec random_vec(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  CVec v(n);
  for (int i = 0; i < n; ++i) v(i) = cd(nd(rng), nd(rng));
  return v;
}

CMat random_hpd(int n, std::mt19937_64& rng) {
  CMat a(n, n);
  for (int c = 0; c < n; ++c) a.col(c) = random_vec(n, rng);
  return a * a.adjoint() + n * CMat::Identity(n, n);
}

// Index of -G in the plane-wave set for every entry.
std::vector<int> negation_map(const PlaneWaveSet& p) {
  std::vector<int> m(p.size());
  for (int i = 0; i < p.size(); ++i) m[i] = p.find(negate(p[i]));
  return m;
}

}  // namespace

TEST_CASE("vacuum fiber with a single plane wave") {
  const double kappa = 0.7;
  PlaneWaveSet pws = plane_wave_set(Lattice::cubic(), 0.5 * kTwoPi);
  REQUIRE(pws.size() == 1);
  FiberOperator f = assemble_fiber(media::vacuum(Lattice::cubic()), pws, Vec3(kappa / kTwoPi, 0, 0));
  REQUIRE(f.dim() == 6);
  // -sigma_2 (x) (i K x), built as a Kronecker product.
  const cd i(0, 1);
  Eigen::Matrix2cd s2;
  s2 << 0, -i, i, 0;
  Eigen::Matrix3cd ikx = i * cross_matrix(Vec3(kappa, 0, 0)).cast<cd>();
  CMat expect(6, 6);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) expect.block(3 * r, 3 * c, 3, 3) = -s2(r, c) * ikx;
  CHECK((f.rot - expect).norm() < 1e-15);
  CHECK((f.rot - f.rot.adjoint()).norm() == 0);
  CHECK(f.weight_matrix() == CMat::Identity(6, 6));
  FiberSpectrum s = eigensolve(f);
  std::vector<double> w(s.omegas.data(), s.omegas.data() + 6);
  std::vector<double> ref{-kappa, -kappa, 0, 0, kappa, kappa};
  for (int j = 0; j < 6; ++j) CHECK(w[j] == doctest::Approx(ref[j]).epsilon(1e-14).scale(1.0));
  CHECK(s.kernel_dim == 2);
}

TEST_CASE("cross matrix") {
  Vec3 a(0.3, -1.2, 2.0), b(1.1, 0.4, -0.7);
  CHECK((cross_matrix(a) * b - a.cross(b)).norm() < 1e-15);
}

TEST_CASE("weight matrix structure") {
  SUBCASE("vacuum is the identity") {
    PlaneWaveSet pws = plane_wave_set(Lattice::cubic(), 1.5 * kTwoPi);
    FiberOperator f = assemble_fiber(media::vacuum(Lattice::cubic()), pws, Vec3(0.1, 0.2, 0.3));
    CHECK(f.weight_matrix() == CMat::Identity(f.dim(), f.dim()));
  }
  SUBCASE("two coefficients give three block diagonals") {
    MaterialWeights w = media::two_phase_chain();
    PlaneWaveSet pws = plane_wave_set(w.lattice, 4 * kTwoPi);
    FiberOperator f = assemble_fiber(w, pws, Vec3(0.1, 0, 0));
    const CMat& m = f.weight_matrix();
    std::set<int> diagonals;
    for (int p = 0; p < pws.size(); ++p)
      for (int q = 0; q < pws.size(); ++q)
        if (m.block<6, 6>(6 * p, 6 * q).norm() > 0) diagonals.insert(pws[p][0] - pws[q][0]);
    CHECK(diagonals == std::set<int>{-1, 0, 1});
    for (int p = 0; p < pws.size(); ++p)
      for (int q = 0; q < pws.size(); ++q)
        CHECK(m.block<6, 6>(6 * p, 6 * q) == w.coeff(pws[p] - pws[q]));
  }
}

TEST_CASE("weighted inner product") {
  std::mt19937_64 rng(1);
  CVec a = random_vec(12, rng), b = random_vec(12, rng);
  CMat id = CMat::Identity(12, 12);
  CHECK(std::abs(weighted_inner(a, b, id) - a.dot(b)) < 1e-13);
  CVec u = a / a.norm();
  CHECK(weighted_inner(u, u, 2.0 * id).real() == doctest::Approx(2.0));
  CMat w = random_hpd(12, rng);
  CHECK(std::abs(weighted_inner(a, b, w) - std::conj(weighted_inner(b, a, w))) < 1e-10);
  CHECK(weighted_inner(a, a, w).real() > 0);
  CHECK(std::abs(weighted_inner(a, a, w).imag()) < 1e-10);
  CHECK_THROWS_AS(weighted_inner(a, CVec(b.head(6)), w), DimensionMismatch);
}

TEST_CASE("vacuum and homogeneous dispersion") {
  Lattice l = Lattice::cubic();
  PlaneWaveSet pws = plane_wave_set(l, kTwoPi);
  SUBCASE("vacuum") {
    FiberSpectrum s = eigensolve(assemble_fiber(media::vacuum(l), pws, Vec3(0.1, 0, 0)));
    CHECK(s.band(1) == doctest::Approx(0.1 * kTwoPi).epsilon(1e-12));
    CHECK(s.band(2) == doctest::Approx(0.1 * kTwoPi).epsilon(1e-12));
    CHECK(s.band(3) > s.band(2) + 0.1);
  }
  SUBCASE("eps = 4") {
    const Vec3 k(0.13, 0.21, -0.05);
    FiberSpectrum s = eigensolve(assemble_fiber(media::homogeneous_eps_mu(l, 4, 1), pws, k));
    std::vector<double> ref;
    for (const auto& n : pws.indices()) {
      const double w = (l.cartesian_k(k) + l.cartesian_G(n)).norm() / 2;
      ref.insert(ref.end(), {w, w});
    }
    std::sort(ref.begin(), ref.end());
    for (int n = 1; n <= s.n_positive(); ++n) CHECK(s.band(n) == doctest::Approx(ref[n - 1]).epsilon(1e-12));
  }
}

TEST_CASE("kernel dimension equals 2N and matches the rank of rot") {
  MaterialWeights w = media::random_weights(Lattice::cubic(), 4, false);
  PlaneWaveSet pws = plane_wave_set(w.lattice, 1.5 * kTwoPi);
  FiberOperator f = assemble_fiber(w, pws, Vec3(0.17, -0.31, 0.08));
  FiberSpectrum s = eigensolve(f);
  CHECK(s.kernel_dim == 2 * pws.size());
  Eigen::SelfAdjointEigenSolver<CMat> es(f.rot);
  int zeros = 0;
  for (int i = 0; i < f.dim(); ++i) zeros += std::abs(es.eigenvalues()(i)) < 1e-9;
  CHECK(zeros == s.kernel_dim);
  // At Gamma the G = 0 block adds four more zero modes.
  FiberSpectrum g = eigensolve(assemble_fiber(w, pws, Vec3::Zero()));
  CHECK(g.kernel_dim == 2 * pws.size() + 4);
}

TEST_CASE("eigen residuals and W-orthonormality") {
  for (const MaterialWeights& w : {media::gyrotropic_rods(), media::real_crystal(), media::two_phase_chain()}) {
    PlaneWaveSet pws = plane_wave_set(w.lattice, 2 * kTwoPi);
    FiberOperator f = assemble_fiber(w, pws, Vec3(0.11, 0.27, 0));
    FiberSpectrum s = eigensolve(f);
    SpectrumResiduals r = spectrum_residuals(f, s);
    CHECK(r.eigen < 1e-12);
    CHECK(r.orthonormality < 1e-12);
  }
}

TEST_CASE("W-selfadjointness of the Maxwell operator") {
  std::mt19937_64 rng(3);
  MaterialWeights w = media::random_weights(Lattice::cubic(), 8, false);
  PlaneWaveSet pws = plane_wave_set(w.lattice, 1.5 * kTwoPi);
  FiberOperator f = assemble_fiber(w, pws, Vec3(0.2, 0.1, -0.3));
  Eigen::LLT<CMat> llt(f.weight_matrix());
  for (int t = 0; t < 5; ++t) {
    CVec a = random_vec(f.dim(), rng), b = random_vec(f.dim(), rng);
    CVec ma = llt.solve(f.rot * a), mb = llt.solve(f.rot * b);
    cd lhs = weighted_inner(a, mb, f.weight_matrix()), rhs = weighted_inner(ma, b, f.weight_matrix());
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::abs(lhs));
  }
}

TEST_CASE("spectral mirror") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  auto mirror = [](const FiberSpectrum& a, const FiberSpectrum& b) {
    const int n = a.size();
    double worst = 0;
    for (int i = 0; i < n; ++i) worst = std::max(worst, std::abs(a.omegas(i) + b.omegas(n - 1 - i)));
    return worst / a.omegas.cwiseAbs().maxCoeff();
  };
  SolveOptions opt;
  opt.vectors = false;
  SUBCASE("real field, same medium") {
    MaterialWeights w = media::random_weights(Lattice::cubic(), 9, true);
    PlaneWaveSet pws = plane_wave_set(w.lattice, 1.5 * kTwoPi);
    for (int t = 0; t < 3; ++t) {
      Vec3 k(u(rng), u(rng), u(rng));
      CHECK(mirror(eigensolve(assemble_fiber(w, pws, k), -1, opt), eigensolve(assemble_fiber(w, pws, Vec3(-k)), -1, opt)) <= 1e-9);
    }
  }
  SUBCASE("complex field pairs with its conjugate medium") {
    MaterialWeights w = media::gyrotropic_rods();
    PlaneWaveSet pws = plane_wave_set(w.lattice, 2 * kTwoPi);
    MaterialWeights c = conjugate_medium(w);
    Vec3 k(0.13, 0.31, 0);
    CHECK(mirror(eigensolve(assemble_fiber(w, pws, k), -1, opt), eigensolve(assemble_fiber(c, pws, Vec3(-k)), -1, opt)) <= 1e-9);
    // Without inversion symmetry the same complex medium at -k is not a mirror.
    MaterialWeights r = media::random_weights(Lattice::cubic(), 9, false);
    PlaneWaveSet pr = plane_wave_set(r.lattice, 1.5 * kTwoPi);
    Vec3 q(0.13, 0.31, -0.2);
    CHECK(mirror(eigensolve(assemble_fiber(r, pr, q), -1, opt), eigensolve(assemble_fiber(conjugate_medium(r), pr, Vec3(-q)), -1, opt)) <= 1e-9);
    CHECK(mirror(eigensolve(assemble_fiber(r, pr, q), -1, opt), eigensolve(assemble_fiber(r, pr, Vec3(-q)), -1, opt)) > 1e-6);
  }
}

TEST_CASE("gauge covariance under translation") {
  MaterialWeights w = media::gyrotropic_rods();
  MaterialWeights t = translate(w, Vec3(0.37, 0.61, 0));
  PlaneWaveSet pws = plane_wave_set(w.lattice, 2 * kTwoPi);
  SolveOptions opt;
  opt.vectors = false;
  Vec3 k(0.2, -0.1, 0);
  RVec a = eigensolve(assemble_fiber(w, pws, k), -1, opt).omegas;
  RVec b = eigensolve(assemble_fiber(t, pws, k), -1, opt).omegas;
  CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("cutoff convergence of the two-phase chain") {
  MaterialWeights w = media::two_phase_chain();
  auto band1 = [&](double cutoff) {
    return eigensolve(assemble_fiber(w, plane_wave_set(w.lattice, cutoff * kTwoPi), Vec3(0.25, 0, 0))).band(1);
  };
  CHECK(std::abs(band1(8) - band1(16)) < 1e-6);
}

TEST_CASE("solver errors") {
  PlaneWaveSet pws = plane_wave_set(Lattice::cubic(), kTwoPi);
  FiberOperator bad = assemble_fiber(media::homogeneous_eps_mu(Lattice::cubic(), -1, 1), pws, Vec3(0.1, 0, 0));
  CHECK_THROWS_AS(eigensolve(bad), IndefiniteWeight);
  FiberOperator f = assemble_fiber(media::vacuum(Lattice::cubic()), pws, Vec3(0.1, 0, 0));
  CHECK_THROWS_AS(eigensolve(f, 2 * pws.size() + 1), DimensionMismatch);
  CHECK(eigensolve(f, 2 * pws.size()).n_positive() == 2 * pws.size());
}

TEST_CASE("phase fixing") {
  CVec v(3);
  v << cd(0.1, 0.2), cd(0, -2), cd(0.5, 0);
  fix_phase(v);
  CHECK(v(1).real() == doctest::Approx(2.0));
  CHECK(v(1).imag() == 0.0);
  CHECK(std::abs(v(0)) == doctest::Approx(std::abs(cd(0.1, 0.2))));
}

TEST_CASE("Helmholtz splitting") {
  std::mt19937_64 rng(11);
  SUBCASE("gradient mode is longitudinal") {
    MaterialWeights w = media::real_crystal();
    PlaneWaveSet pws = plane_wave_set(w.lattice, 1.5 * kTwoPi);
    FiberOperator f = assemble_fiber(w, pws, Vec3(0.1, 0.3, 0));
    CMat g = longitudinal_basis(f.kvecs);
    CVec psi = g * random_vec(static_cast<int>(g.cols()), rng);
    HelmholtzSplit h = helmholtz_split(psi, f);
    CHECK(h.transversal.norm() <= 1e-12 * psi.norm());
    CHECK((f.rot * psi).norm() <= 1e-12 * psi.norm() * f.rot.norm());
  }
  SUBCASE("W^-1 of a divergence-free field is transversal") {
    MaterialWeights w = media::gyrotropic_rods();
    PlaneWaveSet pws = plane_wave_set(w.lattice, 1.5 * kTwoPi);
    FiberOperator f = assemble_fiber(w, pws, Vec3(0.1, 0.3, 0));
    CVec d = random_vec(f.dim(), rng);
    for (int p = 0; p < f.n_pw(); ++p) {
      const Vec3 k = f.kvecs[p].normalized();
      for (int b = 0; b < 2; ++b) {
        auto seg = d.segment<3>(6 * p + 3 * b);
        seg -= k.cast<cd>() * k.cast<cd>().dot(seg);
      }
    }
    CVec psi = f.weight_matrix().llt().solve(d);
    HelmholtzSplit h = helmholtz_split(psi, f);
    CHECK(h.longitudinal.norm() <= 1e-12 * psi.norm());
  }
  SUBCASE("random split is W-orthogonal and divergence free") {
    MaterialWeights w = media::random_weights(Lattice::cubic(), 13, false);
    PlaneWaveSet pws = plane_wave_set(w.lattice, 1.5 * kTwoPi);
    FiberOperator f = assemble_fiber(w, pws, Vec3(0.2, -0.1, 0.3));
    CVec psi = random_vec(f.dim(), rng);
    HelmholtzSplit h = helmholtz_split(psi, f);
    CHECK((h.transversal + h.longitudinal - psi).norm() <= 1e-12 * psi.norm());
    CHECK(std::abs(weighted_inner(h.transversal, h.longitudinal, f.weight_matrix())) <= 1e-10 * psi.squaredNorm());
    CHECK(divergence_residual(h.transversal, f.kvecs, f.weight_matrix()) <= 1e-12);
  }
  SUBCASE("vacuum matches the explicit transverse projector") {
    PlaneWaveSet pws = plane_wave_set(Lattice::cubic(), 1.5 * kTwoPi);
    FiberOperator f = assemble_fiber(media::vacuum(Lattice::cubic()), pws, Vec3(0.2, -0.1, 0.3));
    CVec psi = random_vec(f.dim(), rng);
    HelmholtzSplit h = helmholtz_split(psi, f);
    CVec expect = psi;
    for (int p = 0; p < f.n_pw(); ++p) {
      const Vec3 k = f.kvecs[p];
      const Eigen::Matrix3cd proj = (Mat3::Identity() - k * k.transpose() / k.squaredNorm()).cast<cd>();
      for (int b = 0; b < 2; ++b) expect.segment<3>(6 * p + 3 * b) = proj * psi.segment<3>(6 * p + 3 * b);
    }
    CHECK((h.transversal - expect).norm() <= 1e-12 * psi.norm());
  }
}

TEST_CASE("frequency projectors") {
  SUBCASE("single plane wave: eigenvalues 0, 1/2, 1") {
    PlaneWaveSet pws = plane_wave_set(Lattice::cubic(), 0.5 * kTwoPi);
    FiberSpectrum s = eigensolve(assemble_fiber(media::vacuum(Lattice::cubic()), pws, Vec3(0.1, 0, 0)));
    CMat q = positive_frequency_projector(s);
    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (q + q.adjoint()));
    RVec ev = es.eigenvalues();
    const double ref[6] = {0, 0, 0.5, 0.5, 1, 1};
    for (int i = 0; i < 6; ++i) CHECK(ev(i) == doctest::Approx(ref[i]).scale(1.0).epsilon(1e-13));
  }
  MaterialWeights w = media::real_crystal();
  PlaneWaveSet pws = plane_wave_set(w.lattice, 1.5 * kTwoPi);
  const Vec3 k(0.13, 0.29, 0);
  FiberSpectrum s = eigensolve(assemble_fiber(w, pws, k));
  CMat qp = positive_frequency_projector(s), qm = negative_frequency_projector(s);
  const int n = s.size();
  SUBCASE("Q+ + Q- = id") { CHECK((qp + qm - CMat::Identity(n, n)).norm() <= 1e-11); }
  SUBCASE("rank away from the kernel") {
    RVec q = projector_weights(s);
    CMat kernel = CMat::Zero(n, n);
    for (int i = 0; i < n; ++i)
      if (q(i) == 0.5) kernel += s.vector(i) * (s.vector(i).adjoint() * s.weight->w);
    CMat reduced = qp - 0.5 * kernel;
    Eigen::JacobiSVD<CMat> svd(reduced);
    int rank = 0;
    for (int i = 0; i < n; ++i) rank += svd.singularValues()(i) > 1e-8;
    CHECK(rank == s.n_positive());
    // Idempotent on the kernel-free part.
    CHECK((reduced * reduced - reduced).norm() <= 1e-10);
  }
  SUBCASE("conjugation maps Q+ at k to Q- at -k") {
    FiberSpectrum sm = eigensolve(assemble_fiber(w, pws, Vec3(-k)));
    CMat qm_minus = negative_frequency_projector(sm);
    auto neg = negation_map(pws);
    CMat perm = CMat::Zero(n, n);
    for (int p = 0; p < pws.size(); ++p)
      for (int c = 0; c < 6; ++c) perm(6 * neg[p] + c, 6 * p + c) = 1.0;
    CMat transported = perm * qp.conjugate() * perm.transpose();
    CHECK((transported - qm_minus).norm() <= 1e-9 * qp.norm());
  }
  SUBCASE("ambiguous kernel membership") {
    FiberSpectrum bad = s;
    bad.omegas(0) = 5 * bad.zero_tol;
    CHECK_THROWS_AS(projector_weights(bad), DegenerateGap);
  }
}

TEST_CASE("Maxwell-type contract") {
  std::mt19937_64 rng(17);
  SUBCASE("electromagnetic canonical form") {
    MaterialWeights w = media::two_phase_chain();
    PlaneWaveSet pws = plane_wave_set(w.lattice, 2 * kTwoPi);
    FiberOperator f = assemble_fiber(w, pws, Vec3(0.1, 0, 0));
    MaxwellTypeContract c{f.rot, f.weight_matrix().inverse(), CMat::Identity(f.dim(), f.dim())};
    ContractReport r = validate_contract(c, 1e-8);
    CHECK(r.commutator == 0);
    CHECK(r.pass);
    Eigen::SelfAdjointEigenSolver<CMat> es(f.weight_matrix());
    CHECK(r.c == doctest::Approx(es.eigenvalues()(0)).epsilon(1e-10));
    CHECK(r.c >= w.c_lower - 1e-10);
    CanonicalForm cf = to_canonical(c);
    CHECK((cf.w_prime - f.weight_matrix()).norm() <= 1e-10 * f.weight_matrix().norm());
  }
  SUBCASE("identity weights") {
    CMat d = random_hpd(8, rng);
    ContractReport r = validate_contract({d, CMat::Identity(8, 8), CMat::Identity(8, 8)});
    CHECK(r.pass);
    CHECK(r.c == doctest::Approx(1.0));
  }
  SUBCASE("non-commuting weights are reported") {
    CMat d = random_hpd(8, rng);
    ContractReport r = validate_contract({d, random_hpd(8, rng), random_hpd(8, rng)});
    CHECK(r.commutator > 1e-3);
    CHECK_FALSE(r.pass);
  }
}

TEST_CASE("triplet dump") {
  CMat m = CMat::Zero(2, 3);
  m(1, 2) = cd(0.5, -1);
  std::ostringstream os;
  dump_triplets(m, os);
  CHECK(os.str() == "# rows 2 cols 3\n1 2 0.5 -1\n");
}
