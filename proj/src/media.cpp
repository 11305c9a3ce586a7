#include "emtopo/media.hpp"

#include <cmath>
#include <random>

namespace emtopo::media {

namespace {

Mat6cd diag6(double e, double m) {
  Mat6cd w = Mat6cd::Zero();
  for (int i = 0; i < 3; ++i) {
    w(i, i) = e;
    w(i + 3, i + 3) = m;
  }
  return w;
}

double min_eig(const Mat6cd& m) {
  Eigen::SelfAdjointEigenSolver<Mat6cd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}
double max_eig(const Mat6cd& m) {
  Eigen::SelfAdjointEigenSolver<Mat6cd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(5);
}

// Adds c at G and c^dag at -G.
void put(MaterialWeights& w, const IVec3& g, const Mat6cd& c) {
  w.coeffs[g] = c;
  w.coeffs[negate(g)] = c.adjoint();
}

}  // namespace

MaterialWeights homogeneous(const Lattice& l, const Mat6cd& m) {
  MaterialWeights w;
  w.lattice = l;
  w.coeffs[{0, 0, 0}] = m;
  w.c_lower = min_eig(m);
  w.c_upper = max_eig(m);
  return w;
}

MaterialWeights vacuum(const Lattice& l) { return homogeneous(l, Mat6cd::Identity()); }

MaterialWeights homogeneous_eps_mu(const Lattice& l, double eps, double mu) {
  return homogeneous(l, diag6(eps, mu));
}

MaterialWeights two_phase_chain() {
  MaterialWeights w;
  w.lattice = Lattice::chain();
  w.coeffs[{0, 0, 0}] = diag6(7.0, 1.0);
  Mat6cd c = Mat6cd::Zero();
  for (int i = 0; i < 3; ++i) c(i, i) = -3.0;
  put(w, {1, 0, 0}, c);
  w.c_lower = 1.0;
  w.c_upper = 13.0;
  return w;
}

MaterialWeights gyrotropic_homogeneous(const Lattice& l) {
  Mat6cd m = diag6(2.0, 1.0);
  m(0, 1) = cd(0, 0.8);
  m(1, 0) = cd(0, -0.8);
  return homogeneous(l, m);
}

MaterialWeights magneto_electric_homogeneous(const Lattice& l) {
  Mat6cd m = diag6(2.0, 2.0);
  for (int i = 0; i < 3; ++i) {
    m(i, i + 3) = 0.3;
    m(i + 3, i) = 0.3;
  }
  return homogeneous(l, m);
}

MaterialWeights rod_crystal(const RodParams& p) {
  const cd i(0, 1);
  Mat6cd a0 = diag6(1.0, 1.0);
  a0(5, 5) = p.detune;
  Mat6cd a1 = Mat6cd::Zero();
  for (int b = 0; b < 2; ++b) {
    int o = 3 * b;
    a1(o, o) = p.contrast;
    a1(o + 1, o + 1) = p.contrast;
    a1(o, o + 1) = i * p.kappa;
    a1(o + 1, o) = -i * p.kappa;
  }
  a1(2, 2) = p.zz_contrast;
  a1(5, 5) = p.detune * p.zz_contrast;

  MaterialWeights w;
  w.lattice = Lattice::square();
  const double a = p.aniso;
  const double norm = 1.0 / (2.0 * (1.0 + a));
  // g = norm (1 + cx)(1 + a cy) with cx = (e^{ix} + e^{-ix})/2.
  w.coeffs[{0, 0, 0}] = a0 + norm * a1;
  put(w, {1, 0, 0}, 0.5 * norm * a1);
  if (a != 0) {
    put(w, {0, 1, 0}, 0.5 * a * norm * a1);
    put(w, {1, 1, 0}, 0.25 * a * norm * a1);
    put(w, {1, -1, 0}, 0.25 * a * norm * a1);
  }
  // g spans [0, 1]; W is affine in g so the extremes bound the spectrum.
  double lo = 1e300, hi = -1e300;
  for (int s = 0; s <= 64; ++s) {
    Mat6cd m = a0 + (s / 64.0) * a1;
    lo = std::min(lo, min_eig(m));
    hi = std::max(hi, max_eig(m));
  }
  w.c_lower = lo;
  w.c_upper = hi;
  return w;
}

MaterialWeights gyrotropic_rods() { return rod_crystal({}); }

MaterialWeights real_crystal() {
  MaterialWeights w;
  w.lattice = Lattice::square();
  Mat6cd base = diag6(7.5, 1.0);
  base(0, 2) = base(2, 0) = 3.0;
  Mat6cd amp = diag6(4.0, 0.0);
  w.coeffs[{0, 0, 0}] = base;
  put(w, {1, 0, 0}, 0.25 * amp);
  put(w, {0, 1, 0}, 0.15 * amp);
  put(w, {1, 1, 0}, cd(0, -0.15) * amp);  // 0.3 sin = 0.3 (e^{i} - e^{-i}) / 2i
  // |f| <= 1.1 and eps0 has spectrum {4.5, 7.5, 10.5}.
  w.c_lower = 4.5 - 4.4;
  w.c_upper = 10.5 + 4.4;
  return w;
}

namespace {

// f = cos 2pi x + 0.5 cos 2pi y, coefficients at (+-1,0) and (0,+-1).
void modulate(MaterialWeights& w, const Mat6cd& base, const Mat6cd& amp) {
  w.lattice = Lattice::square();
  w.coeffs[{0, 0, 0}] = base;
  put(w, {1, 0, 0}, 0.5 * amp);
  put(w, {0, 1, 0}, 0.25 * amp);
  double lo = 1e300, hi = -1e300;
  for (int s = 0; s <= 60; ++s) {
    double f = -1.5 + 3.0 * s / 60.0;
    Mat6cd m = base + f * amp;
    lo = std::min(lo, min_eig(m));
    hi = std::max(hi, max_eig(m));
  }
  w.c_lower = lo;
  w.c_upper = hi;
}

}  // namespace

MaterialWeights golden_dual_symmetric() {
  const cd i(0, 1);
  Mat6cd base = diag6(3.0, 3.0);
  for (int k = 0; k < 3; ++k) {
    base(k, k + 3) = -0.3 * i;  // chi = w1 - i w2 with w2 = 0.3
    base(k + 3, k) = 0.3 * i;
  }
  MaterialWeights w;
  modulate(w, base, diag6(1.0, 1.0));
  return w;
}

MaterialWeights golden_non_gyrotropic() {
  MaterialWeights w;
  modulate(w, diag6(3.0, 1.0), diag6(1.0, 0.0));
  return w;
}

MaterialWeights golden_magneto_electric() {
  Mat6cd base = diag6(2.0, 2.0);
  Mat6cd amp = diag6(0.5, 0.5);
  for (int k = 0; k < 3; ++k) {
    base(k, k + 3) = base(k + 3, k) = 0.3;
    amp(k, k + 3) = amp(k + 3, k) = 0.15;
  }
  MaterialWeights w;
  modulate(w, base, amp);
  return w;
}

MaterialWeights golden_gyrotropic() { return gyrotropic_rods(); }

MaterialWeights random_weights(const Lattice& l, std::uint64_t seed, bool real_field, int shell,
                               double modulation) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  auto rmat = [&]() {
    Mat6cd m;
    for (int r = 0; r < 6; ++r)
      for (int c = 0; c < 6; ++c) m(r, c) = cd(nd(rng), nd(rng));
    return m;
  };
  MaterialWeights w;
  w.lattice = l;
  Mat6cd h = rmat();
  if (real_field) h = h.real().cast<cd>();
  h = (0.5 * (h + h.adjoint())).eval();
  // Shift to a well-conditioned positive base.
  Mat6cd base = 0.2 * h + 2.0 * Mat6cd::Identity();
  w.coeffs[{0, 0, 0}] = base;
  const int d = l.dimension();
  std::array<int, 3> lim{0, 0, 0};
  for (int i = 0; i < d; ++i) lim[i] = shell;
  double budget = 0;
  std::vector<IVec3> pos;
  for (int a = -lim[0]; a <= lim[0]; ++a)
    for (int b = -lim[1]; b <= lim[1]; ++b)
      for (int c = -lim[2]; c <= lim[2]; ++c) {
        IVec3 g{a, b, c};
        if (g > IVec3{0, 0, 0}) pos.push_back(g);
      }
  const double lam0 = min_eig(base);
  for (const auto& g : pos) {
    Mat6cd m = rmat();
    if (real_field) m = 0.5 * (m + m.transpose().eval());
    // Scale so the total perturbation stays below modulation * lam0.
    double s2 = m.operatorNorm();
    m *= modulation * lam0 / (s2 * pos.size() * 2.0);
    put(w, g, m);
    budget += 2.0 * m.operatorNorm();
  }
  w.c_lower = lam0 - budget;
  w.c_upper = max_eig(base) + budget;
  return w;
}

MaterialWeights singular_chain() {
  MaterialWeights w;
  w.lattice = Lattice::chain();
  w.coeffs[{0, 0, 0}] = Mat6cd::Identity();
  Mat6cd c = Mat6cd::Zero();
  c(0, 0) = 0.5;
  put(w, {1, 0, 0}, c);
  w.c_lower = 0.01;
  w.c_upper = 2.0;
  return w;
}

}  // namespace emtopo::media
