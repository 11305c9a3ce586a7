#include <doctest.h>

#include <random>

#include "emtopo/errors.hpp"
#include "emtopo/media.hpp"
#include "emtopo/topology.hpp"

using namespace emtopo;

namespace {

// Trace of the unit-cell transfer matrix of E'' + omega^2 eps(x) E = 0, RK4.
double transfer_trace(double omega, int steps = 4000) {
  auto eps = [](double x) { return 7.0 - 6.0 * std::cos(kTwoPi * x); };
  auto run = [&](double e0, double d0) {
    double e = e0, d = d0, h = 1.0 / steps;
    auto f = [&](double x, double y, double z) { return std::array<double, 2>{z, -omega * omega * eps(x) * y}; };
    for (int s = 0; s < steps; ++s) {
      const double x = s * h;
      auto k1 = f(x, e, d);
      auto k2 = f(x + h / 2, e + h / 2 * k1[0], d + h / 2 * k1[1]);
      auto k3 = f(x + h / 2, e + h / 2 * k2[0], d + h / 2 * k2[1]);
      auto k4 = f(x + h, e + h * k3[0], d + h * k3[1]);
      e += h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
      d += h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);
    }
    return std::array<double, 2>{e, d};
  };
  return run(1, 0)[0] + run(0, 1)[1];
}

// Roots of Tr T = -2 (zone-boundary band edges) below omega_max.
std::vector<double> zone_edge_frequencies(double omega_max) {
  std::vector<double> roots;
  auto g = [](double w) { return transfer_trace(w, 2000) + 2.0; };
  const double step = 0.01;
  double a = step, ga = g(a);
  for (double b = a + step; b < omega_max; b += step) {
    double gb = g(b);
    if ((ga > 0) != (gb > 0)) {
      double lo = b - step, hi = b;
      for (int i = 0; i < 60; ++i) {
        const double m = 0.5 * (lo + hi);
        ((g(m) > 0) == (g(lo) > 0) ? lo : hi) = m;
      }
      roots.push_back(0.5 * (lo + hi));
    }
    ga = gb;
  }
  return roots;
}

KPlane plane(int n, bool half_step = false) {
  KPlane p;
  p.n1 = p.n2 = n;
  if (half_step) p.origin = Vec3(0.5 / n, 0.5 / n, 0);
  return p;
}

}  // namespace

TEST_CASE("gap detection on synthetic bands") {
  Eigen::MatrixXd b(3, 3);
  b << 0.1, 0.5, 0.9,
       0.2, 0.6, 1.0,
       0.45, 0.4, 1.1;
  GapReport r = detect_gaps(b);
  REQUIRE(r.gaps.size() == 1);
  CHECK(r.gaps[0].below == 2);
  CHECK(r.gaps[0].above == 3);
  CHECK(r.gaps[0].size == doctest::Approx(0.3));
  REQUIRE(r.margins.size() == 3);
  CHECK(r.margins[0].below == doctest::Approx(0.1));
  CHECK(r.margins[1].above == doctest::Approx(0.4));
  CHECK(std::isinf(r.margins[2].above));
}

TEST_CASE("vacuum has no gaps") {
  MaterialWeights w = media::vacuum(Lattice::square());
  PlaneWaveSet pws = plane_wave_set(w.lattice, 2 * kTwoPi);
  PlaneSpectra ps = solve_plane(w, pws, plane(8), 1, 6);
  Eigen::MatrixXd b(ps.spectra.size(), 6);
  for (size_t k = 0; k < ps.spectra.size(); ++k)
    for (int n = 1; n <= 6; ++n) b(k, n - 1) = ps.spectra[k].band(n);
  CHECK(detect_gaps(b).gaps.empty());
  CHECK_THROWS_AS(make_selection(ps, 1, 2), GapClosed);
  CHECK_THROWS_AS(make_selection(ps, 3, 3), GapClosed);
}

TEST_CASE("first gap of the two-phase chain against a transfer-matrix oracle") {
  MaterialWeights w = media::two_phase_chain();
  PlaneWaveSet pws = plane_wave_set(w.lattice, 8 * kTwoPi);
  std::vector<double> edges = zone_edge_frequencies(4.5);
  REQUIRE(edges.size() >= 2);
  FiberSpectrum x = eigensolve(assemble_fiber(w, pws, Vec3(0.5, 0, 0)));
  // Two polarizations per band: positive bands 1, 2 are the first band.
  CHECK(x.band(1) == doctest::Approx(edges[0]).epsilon(1e-8));
  CHECK(x.band(2) == doctest::Approx(edges[0]).epsilon(1e-8));
  CHECK(x.band(3) == doctest::Approx(edges[1]).epsilon(1e-8));

  const int nk = 11;
  Eigen::MatrixXd b(nk, 6);
  for (int i = 0; i < nk; ++i) {
    FiberSpectrum s = eigensolve(assemble_fiber(w, pws, Vec3(0.5 * i / (nk - 1), 0, 0)));
    for (int n = 1; n <= 6; ++n) b(i, n - 1) = s.band(n);
  }
  GapReport r = detect_gaps(b);
  REQUIRE_FALSE(r.gaps.empty());
  CHECK(r.gaps[0].below == 2);
  CHECK(r.gaps[0].above == 3);
  CHECK(r.gaps[0].size == doctest::Approx(edges[1] - edges[0]).epsilon(1e-6));
}

TEST_CASE("plane geometry") {
  KPlane p = plane(6, true);
  for (int m1 = 0; m1 < p.n1; ++m1)
    for (int m2 = 0; m2 < p.n2; ++m2) {
      Vec3 k = p.point(m1, m2);
      CHECK(k.cwiseAbs().maxCoeff() <= 0.5);
      for (int dir = 0; dir < 2; ++dir) {
        const int mu = dir ? p.mu2 : p.mu1;
        Vec3 next = dir ? p.point(m1, (m2 + 1) % p.n2) : p.point((m1 + 1) % p.n1, m2);
        Vec3 step = k;
        step[mu] += 1.0 / (dir ? p.n2 : p.n1);
        Vec3 expect = next;
        expect[mu] += p.link_shift(m1, m2, dir);
        CHECK((step - expect).norm() < 1e-14);
      }
    }
  auto planes = coordinate_planes(8, Vec3(0.1, 0.2, 0.3));
  REQUIRE(planes.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(planes[i].mu1 != i);
    CHECK(planes[i].mu2 != i);
    CHECK(planes[i].mu1 != planes[i].mu2);
    CHECK(planes[i].point(3, 5)[i] == doctest::Approx(0.1 * (i + 1)));
  }
}

TEST_CASE("Chern numbers of the gyrotropic crystal") {
  MaterialWeights w = media::gyrotropic_rods();
  PlaneWaveSet pws = plane_wave_set(w.lattice, 2.5 * kTwoPi);
  PlaneSpectra ps = solve_plane(w, pws, plane(24), 3, 6);
  ChernResult c34 = chern_number(make_selection(ps, 3, 4), ps);
  ChernResult c56 = chern_number(make_selection(ps, 5, 6), ps);
  ChernResult c36 = chern_number(make_selection(ps, 3, 6), ps);

  SUBCASE("values and additivity") {
    CHECK(c34.rounded == 4);
    CHECK(c56.rounded == -2);
    CHECK(c36.rounded == c34.rounded + c56.rounded);
    CHECK(c36.total == doctest::Approx(c34.total + c56.total).epsilon(1e-8));
  }
  SUBCASE("plaquette fluxes sum to a multiple of 2 pi") {
    for (const ChernResult* r : {&c34, &c56, &c36}) {
      double sum = 0;
      for (double f : r->curvature) {
        CHECK(std::abs(f) <= kPi);
        sum += f;
      }
      CHECK(std::abs(sum / kTwoPi - std::round(sum / kTwoPi)) <= 1e-9);
      CHECK(r->converged);
      CHECK(r->min_link > 1e-6);
    }
  }
  SUBCASE("gauge invariance") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, kTwoPi);
    std::normal_distribution<double> nd;
    Redecoration phases = [&](int, CMat& v) {
      for (Eigen::Index c = 0; c < v.cols(); ++c) v.col(c) *= std::polar(1.0, u(rng));
    };
    // Random unitary mixing inside the selected pair.
    Redecoration mixing = [&](int, CMat& v) {
      CMat g(v.cols(), v.cols());
      for (Eigen::Index i = 0; i < g.size(); ++i) g(i) = cd(nd(rng), nd(rng));
      CMat q = Eigen::HouseholderQR<CMat>(g).householderQ();
      v = (v * q).eval();
    };
    for (const Redecoration& r : {phases, mixing}) {
      ChernResult g = chern_number(make_selection(ps, 3, 4), ps, {}, r);
      CHECK(g.rounded == c34.rounded);
      double worst = 0;
      for (size_t p = 0; p < g.curvature.size(); ++p)
        worst = std::max(worst, std::abs(g.curvature[p] - c34.curvature[p]));
      CHECK(worst <= 1e-12);
    }
  }
  SUBCASE("consistent with class A") {
    ConsistencyReport r = classification_consistency(w, {c34, c56});
    CHECK(r.consistent);
    REQUIRE(r.classification.has_value());
    CHECK(r.classification->caz_class == CazClass::A);
  }
  SUBCASE("failure paths") {
    Redecoration kill = [](int point, CMat& v) {
      if (point == 5) v.col(0).setZero();
    };
    CHECK_THROWS_AS(chern_number(make_selection(ps, 3, 4), ps, {}, kill), SingularLink);
    TopologyOptions strict;
    strict.accept_residual = 0.0;
    CHECK_THROWS_AS(chern_number(make_selection(ps, 3, 4), ps, strict), NotConverged);
    TopologyOptions wide;
    wide.gap_tol = 10.0;
    CHECK_NOTHROW(make_selection(ps, 3, 4));
    CHECK_THROWS_AS(make_selection(ps, 3, 4, wide.gap_tol), GapClosed);
  }
}

TEST_CASE("real weights give vanishing Chern numbers") {
  MaterialWeights w = media::real_crystal();
  REQUIRE(detect_symmetries(w).t3);
  PlaneWaveSet pws = plane_wave_set(w.lattice, 2.5 * kTwoPi);
  PlaneSpectra ps = solve_plane(w, pws, plane(24, true), 3, 8);
  std::vector<ChernResult> results;
  for (int b = 3; b <= 8; ++b) {
    BandSelection sel;
    try {
      sel = make_selection(ps, b, b);
    } catch (const GapClosed&) {
      continue;
    }
    results.push_back(chern_number(sel, ps));
    CHECK(results.back().rounded == 0);
    CHECK(std::abs(results.back().total) <= 1e-3);
  }
  CHECK_FALSE(results.empty());
  CHECK(classification_consistency(w, results).consistent);

  SUBCASE("a stable nonzero value in class AI is flagged") {
    REQUIRE_FALSE(results.empty());
    ChernResult fake = results.front();
    fake.rounded = 1;
    fake.total = 1.0;
    fake.residual = 0.0;
    ConsistencyReport r = classification_consistency(w, {fake});
    CHECK_FALSE(r.consistent);
    CHECK(r.contradictions.size() == 1);
  }
}

TEST_CASE("consistency with an unclassifiable medium") {
  Mat3cd eps;
  eps << 2, cd(0, 0.5), 0, cd(0, -0.5), 2, 0, 0, 0, 2;
  Mat6cd m = Mat6cd::Zero();
  m.topLeftCorner<3, 3>() = eps;
  m.bottomRightCorner<3, 3>() = eps;
  ConsistencyReport r = classification_consistency(media::homogeneous(Lattice::square(), m), {});
  CHECK_FALSE(r.classification.has_value());
  CHECK_FALSE(r.classification_error.empty());
}

TEST_CASE("ground-state dispersion") {
  SUBCASE("averaged-medium slopes") {
    auto s = averaged_medium_slopes(media::homogeneous_eps_mu(Lattice::cubic(), 4, 2.25).coeff({0, 0, 0}), Vec3(1, 2, 3));
    CHECK(s[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(s[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  }
  SUBCASE("vacuum") {
    MaterialWeights w = media::vacuum(Lattice::square());
    GroundStateReport r = ground_state_dispersion_check(w, plane_wave_set(w.lattice, kTwoPi), 0.05 * kTwoPi);
    REQUIRE(r.directions.size() == 2);
    for (const auto& d : r.directions) {
      CHECK(d.fitted[0] == doctest::Approx(1.0).epsilon(1e-8));
      CHECK(d.fitted[1] == doctest::Approx(1.0).epsilon(1e-8));
    }
    CHECK(r.deviation <= 1e-8);
  }
  SUBCASE("uniform dielectric") {
    MaterialWeights w = media::homogeneous_eps_mu(Lattice::cubic(), 4, 1);
    GroundStateReport r = ground_state_dispersion_check(w, plane_wave_set(w.lattice, kTwoPi), 0.05 * kTwoPi);
    REQUIRE(r.directions.size() == 3);
    for (const auto& d : r.directions) CHECK(d.fitted[0] == doctest::Approx(0.5).epsilon(1e-8));
  }
  SUBCASE("two-phase chain approaches the averaged medium") {
    MaterialWeights w = media::two_phase_chain();
    PlaneWaveSet pws = plane_wave_set(w.lattice, 8 * kTwoPi);
    double prev = 1e9;
    for (double r : {0.08, 0.04, 0.02}) {
      GroundStateReport g = ground_state_dispersion_check(w, pws, r * kTwoPi);
      CHECK(g.deviation < prev);
      prev = g.deviation;
      // Transverse fields along the layering see the mean permittivity 7.
      CHECK(g.directions[0].predicted[0] == doctest::Approx(1.0 / std::sqrt(7.0)).epsilon(1e-12));
    }
    CHECK(prev < 0.1);
  }
}
