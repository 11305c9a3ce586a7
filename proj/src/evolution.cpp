#include "emtopo/evolution.hpp"

#include <cmath>
#include <sstream>

#include "emtopo/errors.hpp"

namespace emtopo {

namespace {

void require_full_basis(const FiberSpectrum& s) {
  if (s.first_vector != 0 || s.vectors.cols() != s.size())
    throw DimensionMismatch("state basis needs every eigenvector");
}

// (J, 0) in fiber layout.
CVec embed_current(const CVec& j, int n_pw) {
  if (j.size() != 3 * n_pw) throw DimensionMismatch("current must have 3 entries per plane wave");
  CVec v = CVec::Zero(6 * n_pw);
  for (int p = 0; p < n_pw; ++p) v.segment<3>(6 * p) = j.segment<3>(3 * p);
  return v;
}

CVec current_divergence(const CVec& j, const std::vector<Vec3>& kvecs) {
  const cd i(0, 1);
  CVec out(kvecs.size());
  for (size_t p = 0; p < kvecs.size(); ++p) {
    cd s = 0;
    for (int c = 0; c < 3; ++c) s += kvecs[p][c] * j(3 * p + c);
    out(p) = i * s;
  }
  return out;
}

struct Integrated {
  CVec integral;  // int exp(-i w (t1 - s)) d(s) ds per mode
  CVec charge_change;  // -int i K.J ds per plane wave
  double continuity = 0.0;
};

Integrated integrate(const FiberSpectrum& b, const SourceTerm& src, double t0, double t1,
                     int nodes_per_unit, int order) {
  const double span = t1 - t0;
  const int panels = std::max(1, static_cast<int>(std::ceil(std::abs(span) * nodes_per_unit / order)));
  std::vector<double> x, w;
  gauss_legendre(order, x, w);
  Integrated r;
  r.integral = CVec::Zero(b.size());
  r.charge_change = CVec::Zero(b.n_pw);
  const double h = span / panels;
  const cd mi(0, -1);
  for (int p = 0; p < panels; ++p) {
    const double a = t0 + p * h;
    for (int q = 0; q < order; ++q) {
      const double s = a + 0.5 * h * (x[q] + 1.0);
      const double wt = 0.5 * h * w[q];
      CVec j = src.current(s);
      CVec d = b.vectors.adjoint() * embed_current(j, b.n_pw);
      for (int n = 0; n < b.size(); ++n) r.integral(n) += wt * std::exp(mi * b.omegas(n) * (t1 - s)) * d(n);
      CVec divj = current_divergence(j, b.kvecs);
      r.charge_change -= wt * divj;
      if (src.charge) {
        const double e = 1e-5 * std::max(1.0, std::abs(s));
        CVec drho = (src.charge(s + e) - src.charge(s - e)) / (2 * e);
        r.continuity = std::max(r.continuity, (drho + divj).cwiseAbs().maxCoeff());
      }
    }
  }
  return r;
}

}  // namespace

FiberState make_state(std::shared_ptr<const FiberSpectrum> basis, const CVec& psi, double t) {
  require_full_basis(*basis);
  if (psi.size() != basis->size()) throw DimensionMismatch("state size does not match the spectrum");
  FiberState s;
  s.coeffs = basis->vectors.adjoint() * (basis->weight->w * psi);
  s.basis = std::move(basis);
  s.t = t;
  return s;
}

FiberState evolve(const FiberState& s, double dt) {
  FiberState out = s;
  const cd mi(0, -1);
  for (Eigen::Index n = 0; n < out.coeffs.size(); ++n)
    out.coeffs(n) *= std::exp(mi * s.basis->omegas(n) * dt);
  out.t = s.t + dt;
  return out;
}

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      const double p = std::legendre(n, z);
      const double pm = n > 0 ? std::legendre(n - 1, z) : 0.0;
      dp = n * (z * p - pm) / (z * z - 1.0);
      const double dz = p / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    const double p = std::legendre(n, z);
    const double pm = std::legendre(n - 1, z);
    dp = n * (z * p - pm) / (z * z - 1.0);
    x[n - 1 - i] = z;
    w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

DuhamelResult evolve_with_source(const FiberState& s, const SourceTerm& src, double t0, double t1,
                                 const QuadratureOptions& opt) {
  const FiberSpectrum& b = *s.basis;
  require_full_basis(b);
  if (opt.order < 1 || opt.nodes_per_unit < 1) throw DimensionMismatch("quadrature needs positive sizes");
  DuhamelResult res;
  FiberState free = evolve(s, t1 - t0);
  if (!src.current) {
    res.state = free;
  } else {
    Integrated fine = integrate(b, src, t0, t1, opt.check ? 2 * opt.nodes_per_unit : opt.nodes_per_unit,
                                opt.order);
    res.state = free;
    res.state.coeffs -= fine.integral;
    res.continuity_residual = fine.continuity;
    if (opt.check) {
      Integrated coarse = integrate(b, src, t0, t1, opt.nodes_per_unit, opt.order);
      CVec ca = free.coeffs - coarse.integral;
      const double den = std::max(res.state.coeffs.norm(), 1e-300);
      res.quadrature_change = (ca - res.state.coeffs).norm() / den;
      if (res.quadrature_change > opt.tol) {
        std::ostringstream os;
        os << "doubling the nodes changed the state by " << res.quadrature_change << " > " << opt.tol;
        throw QuadratureUnderResolved(os.str());
      }
    }
    CVec rho = src.charge ? src.charge(t1)
                          : CVec(field_charge(s.field(), b.kvecs, b.weight->w) + fine.charge_change);
    res.constraint_residual = constraint_residual(res.state.field(), b.kvecs, b.weight->w, rho);
    return res;
  }
  CVec rho = field_charge(s.field(), b.kvecs, b.weight->w);
  res.constraint_residual = constraint_residual(res.state.field(), b.kvecs, b.weight->w, rho);
  return res;
}

CVec field_charge(const CVec& psi, const std::vector<Vec3>& kvecs, const CMat& weight) {
  const cd i(0, 1);
  CVec d = weight * psi;
  CVec rho(kvecs.size());
  for (size_t p = 0; p < kvecs.size(); ++p) {
    cd s = 0;
    for (int c = 0; c < 3; ++c) s += kvecs[p][c] * d(6 * p + c);
    rho(p) = i * s;
  }
  return rho;
}

double constraint_residual(const CVec& psi, const std::vector<Vec3>& kvecs, const CMat& weight,
                           const CVec& rho) {
  const cd i(0, 1);
  CVec d = weight * psi;
  double worst = 0, kmax = 0;
  for (size_t p = 0; p < kvecs.size(); ++p) {
    cd e = 0, h = 0;
    for (int c = 0; c < 3; ++c) {
      e += kvecs[p][c] * d(6 * p + c);
      h += kvecs[p][c] * d(6 * p + 3 + c);
    }
    worst = std::max(worst, std::abs(i * e - rho(p)) + std::abs(h));
    kmax = std::max(kmax, kvecs[p].norm());
  }
  const double scale = kmax * d.norm();
  return scale > 0 ? worst / scale : worst;
}

double longitudinal_leakage(const CVec& psi, const std::vector<Vec3>& kvecs, const CMat& weight) {
  HelmholtzSplit h = helmholtz_split(psi, kvecs, weight);
  const double n = weighted_norm(psi, weight);
  return n > 0 ? weighted_norm(h.longitudinal, weight) / n : 0.0;
}

std::vector<Vec3> FiberPair::kvecs() const {
  std::vector<Vec3> k = plus.kvecs;
  k.insert(k.end(), minus.kvecs.begin(), minus.kvecs.end());
  return k;
}

CMat FiberPair::weight() const {
  const int n = plus.dim();
  CMat w = CMat::Zero(2 * n, 2 * n);
  w.topLeftCorner(n, n) = plus.weight_matrix();
  w.bottomRightCorner(n, n) = minus.weight_matrix();
  return w;
}

CVec FiberPair::conjugate(const CVec& u) const {
  if (u.size() != dim()) throw DimensionMismatch("pair state size");
  const int n = plus.dim();
  CVec out(u.size());
  for (int p = 0; p < n_pw(); ++p)
    for (int c = 0; c < 6; ++c) {
      out(6 * p + c) = std::conj(u(n + 6 * neg[p] + c));
      out(n + 6 * p + c) = std::conj(u(6 * neg[p] + c));
    }
  return out;
}

double FiberPair::norm(const CVec& u) const {
  const int n = plus.dim();
  double a = weighted_inner(u.head(n), u.head(n), plus.weight_matrix()).real();
  double b = weighted_inner(u.tail(n), u.tail(n), minus.weight_matrix()).real();
  return std::sqrt(std::max(0.0, a + b));
}

namespace {

CVec spectral_apply(const FiberSpectrum& s, const CVec& u, const CVec& factor) {
  CVec c = s.vectors.adjoint() * (s.weight->w * u);
  return s.vectors * factor.cwiseProduct(c);
}

}  // namespace

CVec FiberPair::project(const CVec& u, bool positive) const {
  const int n = plus.dim();
  CVec out(u.size());
  out.head(n) = spectral_apply(*spec_plus, u.head(n), projector_weights(*spec_plus, positive).cast<cd>());
  out.tail(n) = spectral_apply(*spec_minus, u.tail(n), projector_weights(*spec_minus, positive).cast<cd>());
  return out;
}

CVec FiberPair::evolve(const CVec& u, double t) const {
  const int n = plus.dim();
  const cd mi(0, -1);
  auto phases = [&](const FiberSpectrum& s) {
    CVec f(s.size());
    for (int i = 0; i < s.size(); ++i) f(i) = std::exp(mi * s.omegas(i) * t);
    return f;
  };
  CVec out(u.size());
  out.head(n) = spectral_apply(*spec_plus, u.head(n), phases(*spec_plus));
  out.tail(n) = spectral_apply(*spec_minus, u.tail(n), phases(*spec_minus));
  return out;
}

Eigen::Matrix<cd, 6, 1> FiberPair::sample(const CVec& u, const Vec3& x_reduced) const {
  const Vec3 x = lattice.cartesian_r(x_reduced);
  const std::vector<Vec3> ks = kvecs();
  Eigen::Matrix<cd, 6, 1> f = Eigen::Matrix<cd, 6, 1>::Zero();
  for (size_t p = 0; p < ks.size(); ++p) f += u.segment<6>(6 * p) * std::polar(1.0, ks[p].dot(x));
  return f;
}

FiberPair make_fiber_pair(const MaterialWeights& w, const PlaneWaveSet& pws, const Vec3& k) {
  FiberPair p;
  p.lattice = w.lattice;
  auto wm = weight_matrix(w, pws);
  p.plus = assemble_fiber(wm, w.lattice, pws, k);
  p.minus = assemble_fiber(wm, w.lattice, pws, Vec3(-k));
  p.spec_plus = std::make_shared<FiberSpectrum>(eigensolve(p.plus));
  p.spec_minus = std::make_shared<FiberSpectrum>(eigensolve(p.minus));
  p.neg.resize(pws.size());
  for (int i = 0; i < pws.size(); ++i) {
    p.neg[i] = pws.find(negate(pws[i]));
    if (p.neg[i] < 0) throw DimensionMismatch("plane-wave set not closed under negation");
  }
  return p;
}

CVec random_real_field(const FiberPair& p, std::mt19937_64& rng, bool transversal) {
  std::normal_distribution<double> nd(0.0, 1.0);
  const int n = p.plus.dim();
  CVec a(n);
  for (int i = 0; i < n; ++i) a(i) = cd(nd(rng), nd(rng));
  if (transversal) a = helmholtz_split(a, p.plus).transversal;
  CVec u = CVec::Zero(2 * n);
  u.head(n) = a;
  // Lower block is the conjugate partner, so C u = u by construction.
  for (int q = 0; q < p.n_pw(); ++q)
    for (int c = 0; c < 6; ++c) u(n + 6 * p.neg[q] + c) = std::conj(a(6 * q + c));
  return u;
}

RoundtripReport real_roundtrip(const FiberPair& p, const CVec& u, double real_tol) {
  RoundtripReport r;
  const double nu = p.norm(u);
  if (nu == 0) return r;
  r.reality_defect = (p.conjugate(u) - u).norm() / u.norm();
  r.not_real_field = r.reality_defect > real_tol;
  CVec back = 2.0 * p.real_part(p.project(u, true));
  r.residual = p.norm(back - u) / nu;
  return r;
}

double phase_locking_check(const FiberPair& p, const CVec& u) {
  const double nu = p.norm(u);
  if (nu == 0) return 0.0;
  CVec qm = p.project(u, false);
  CVec cqp = p.conjugate(p.project(u, true));
  return p.norm(qm - cqp) / nu;
}

EquivalenceReport equivalence_harness(const FiberPair& p, const CVec& u0, double t, int samples) {
  EquivalenceReport r;
  CVec full = p.real_part(p.evolve(u0, t));
  CVec proj = 2.0 * p.real_part(p.evolve(p.project(u0, true), t));
  const int d = p.lattice.dimension();
  std::array<int, 3> lim{1, 1, 1};
  for (int i = 0; i < d; ++i) lim[i] = samples;
  for (int a = 0; a < lim[0]; ++a)
    for (int b = 0; b < lim[1]; ++b)
      for (int c = 0; c < lim[2]; ++c) {
        Vec3 x(double(a) / lim[0], double(b) / lim[1], double(c) / lim[2]);
        r.discrepancy = std::max(r.discrepancy, (p.sample(full, x) - p.sample(proj, x)).cwiseAbs().maxCoeff());
      }
  const double e0 = p.norm(u0);
  auto drift = [&](const CVec& v) { return e0 > 0 ? std::abs(p.norm(v) * p.norm(v) - e0 * e0) / (e0 * e0) : 0.0; };
  r.energy_drift_full = drift(full);
  r.energy_drift_projected = drift(proj);
  const std::vector<Vec3> ks = p.kvecs();
  const CMat w = p.weight();
  const CVec zero = CVec::Zero(ks.size());
  const double c0 = constraint_residual(u0, ks, w, zero);
  r.constraint_drift_full = std::abs(constraint_residual(full, ks, w, zero) - c0);
  r.constraint_drift_projected = std::abs(constraint_residual(proj, ks, w, zero) - c0);
  return r;
}

EquivalenceReport equivalence_harness(const MaterialWeights& w, const PlaneWaveSet& pws,
                                      const Vec3& k, const CVec& u0, double t) {
  return equivalence_harness(make_fiber_pair(w, pws, k), u0, t);
}

}  // namespace emtopo
