#include "emtopo/cli/commands.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "emtopo/csv.hpp"
#include "emtopo/errors.hpp"
#include "emtopo/evolution.hpp"
#include "emtopo/maxwell_operator.hpp"
#include "emtopo/topology.hpp"
#include "emtopo/weights_io.hpp"

namespace emtopo::cli {

namespace fs = std::filesystem;

namespace {

std::ofstream open_output(const JobConfig& c, const std::string& name) {
  fs::create_directories(c.out_dir);
  std::string path = (fs::path(c.out_dir) / name).string();
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write '" + path + "'");
  return os;
}

std::string vec_str(const Vec3& v, int d) {
  std::string s = "(";
  for (int i = 0; i < d; ++i) s += (i ? ", " : "") + format_double(v[i]);
  return s + ")";
}

// Validation gate shared by all commands: failure is an error.
MaterialWeights load_validated(const JobConfig& c, std::ostream& out) {
  MaterialWeights w = load_medium(c);
  ValidationReport v = validate_weights(w, static_cast<int>(c.tol.validate_samples), c.tol.symmetry);
  if (!v.pass) throw ConfigError("weight validation failed: " + v.message);
  (void)out;
  return w;
}

std::string caz_display(CazClass k) { return k == CazClass::TwoTimesAI ? "2×AI" : to_string(k); }

int guarded(std::ostream& out, const std::function<int()>& body) {
  try {
    return body();
  } catch (const AmbiguousClass& e) {
    out << "flagged: " << e.what() << "\n";
    return kExitFlagged;
  } catch (const GapClosed& e) {
    out << "flagged: gap closed: " << e.what() << "\n";
    return kExitFlagged;
  } catch (const SingularLink& e) {
    out << "flagged: gap closed or grid too coarse: " << e.what() << "\n";
    return kExitFlagged;
  } catch (const NotConverged& e) {
    out << "flagged: " << e.what() << "\n";
    return kExitFlagged;
  } catch (const QuadratureUnderResolved& e) {
    out << "error: " << e.what() << " (raise evolution.nodes_per_unit)\n";
    return kExitError;
  } catch (const std::exception& e) {
    out << "error: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace

int cmd_classify(const JobConfig& c, std::ostream& out) {
  return guarded(out, [&] {
    MaterialWeights w = load_validated(c, out);
    SymmetryReport r = classify(w, c.tol.symmetry);
    out << to_string(r.media_type) << " / " << caz_display(r.caz_class) << "\n";
    out << "surviving symmetries: " << r.surviving.str() << "\n";
    out << "defects: T1 " << r.defects.t1 << ", U2 " << r.defects.u2 << ", T3 " << r.defects.t3
        << " (tol " << c.tol.symmetry << ")\n";
    for (const auto& inv : r.invariants_by_dim) out << "d = " << inv.dim << ": " << inv.describe() << "\n";
    for (const auto& a : r.assumptions) out << "assumption: " << a << "\n";
    return kExitOk;
  });
}

int cmd_bands(const JobConfig& c, std::ostream& out) {
  return guarded(out, [&] {
    MaterialWeights w = load_validated(c, out);
    const Lattice& l = w.lattice;
    PlaneWaveSet pws = plane_wave_set(l, c.cutoff * kTwoPi);
    if (c.n_bands > 2 * pws.size()) {
      std::ostringstream os;
      os << "n_bands = " << c.n_bands << " exceeds the " << 2 * pws.size()
         << " positive bands available at cutoff " << c.cutoff;
      throw ConfigError(os.str());
    }
    KPath path = bz_path(l, resolve_path(c, l), c.n_per_segment);
    auto wm = weight_matrix(w, pws);
    SolveOptions opt;
    opt.vectors = false;
    opt.zero_tol_rel = c.tol.zero;
    std::ofstream csv = open_output(c, "bands.csv");
    CsvWriter cw(csv);
    cw.comment("band structure, lattice " + l.name() + ", cutoff " + format_double(c.cutoff) +
               " (2pi/a), plane waves " + std::to_string(pws.size()));
    cw.comment("k1..k3 reduced coordinates; s path length in units of 2pi/a; omega in units of 2pi c/a");
    std::vector<std::string> cols{"k_index", "k1", "k2", "k3", "s"};
    for (int n = 1; n <= c.n_bands; ++n) cols.push_back("omega_" + std::to_string(n));
    cw.header(cols);
    for (size_t i = 0; i < path.points.size(); ++i) {
      const Vec3& k = path.points[i];
      FiberSpectrum s = eigensolve(assemble_fiber(wm, l, pws, k), c.n_bands, opt);
      std::vector<double> row{k[0], k[1], k[2], path.arclength[i] / kTwoPi};
      for (int n = 1; n <= c.n_bands; ++n) {
        double om = s.band(n);
        row.push_back(std::abs(om) < s.zero_tol ? 0.0 : om / kTwoPi);
      }
      cw.row(static_cast<long>(i), row);
    }
    std::ofstream gp = open_output(c, "bands.gp");
    gp << "set datafile separator ','\nset xlabel 'k path'\nset ylabel 'omega a / 2 pi c'\nset key off\n";
    const auto labels = path_labels_for(c, l);
    gp << "set xtics (";
    for (size_t i = 0; i < path.waypoint_index.size(); ++i) {
      std::string lab = i < labels.size() ? (labels[i] == "G" ? "{/Symbol G}" : labels[i]) : "";
      gp << (i ? ", " : "") << "'" << lab << "' " << format_double(path.arclength[path.waypoint_index[i]] / kTwoPi);
    }
    gp << ")\nplot for [i=6:" << 5 + c.n_bands << "] 'bands.csv' using 5:i with lines lw 2\n";
    out << "wrote " << path.points.size() << " k-points x " << c.n_bands << " bands to "
        << (fs::path(c.out_dir) / "bands.csv").string() << "\n";
    return kExitOk;
  });
}

int cmd_chern(const JobConfig& c, std::ostream& out) {
  return guarded(out, [&] {
    MaterialWeights w = load_validated(c, out);
    const int d = w.dimension();
    if (d < 2) throw ConfigError("Chern numbers need a 2D or 3D lattice");
    if (c.band_lo < 1) throw ConfigError("no band selection (use --bands a..b)");
    PlaneWaveSet pws = plane_wave_set(w.lattice, c.cutoff * kTwoPi);
    std::vector<KPlane> planes;
    if (d == 2) {
      KPlane p;
      p.n1 = c.grid[0];
      p.n2 = c.grid[1];
      planes.push_back(p);
    } else {
      planes = coordinate_planes(c.grid[0], c.plane_offsets);
      for (auto& p : planes) {
        p.n1 = c.grid[p.mu1];
        p.n2 = c.grid[p.mu2];
      }
    }
    TopologyOptions opt;
    opt.link_tol = c.tol.link;
    opt.accept_residual = c.tol.accept;
    opt.gap_tol = c.tol.gap;
    std::vector<ChernResult> results;
    std::ofstream rep = open_output(c, "chern_report.txt");
    rep << "selection: bands " << c.band_lo << ".." << c.band_hi << "\n";
    rep << "cutoff: " << format_double(c.cutoff) << " (2pi/a), plane waves " << pws.size() << "\n";
    for (size_t i = 0; i < planes.size(); ++i) {
      const KPlane& pl = planes[i];
      PlaneSpectra ps = solve_plane(w, pws, pl, c.band_lo, c.band_hi, c.tol.zero);
      BandSelection sel = make_selection(ps, c.band_lo, c.band_hi, opt.gap_tol);
      ChernResult r = chern_number(sel, ps, opt);
      std::string name = d == 2 ? "curvature.csv" : "curvature_plane" + std::to_string(i) + ".csv";
      std::ofstream csv = open_output(c, name);
      CsvWriter cw(csv);
      cw.comment("plaquette Berry curvature F in (-pi, pi], plane axes " + std::to_string(pl.mu1) + "," +
                 std::to_string(pl.mu2) + ", grid " + std::to_string(pl.n1) + "x" + std::to_string(pl.n2));
      cw.comment("k1, k2: reduced coordinates of the plaquette corner");
      cw.header({"k1", "k2", "F"});
      for (int a = 0; a < pl.n1; ++a)
        for (int b = 0; b < pl.n2; ++b) {
          Vec3 k = pl.point(a, b);
          cw.row({k[pl.mu1], k[pl.mu2], r.curvature[pl.index(a, b)]});
        }
      std::ostringstream line;
      line << "plane " << pl.mu1 << "," << pl.mu2 << " grid " << pl.n1 << "x" << pl.n2 << ": C = " << r.rounded
           << " (sum " << format_double(r.total) << ", residual " << r.residual << ", min |det S| " << r.min_link
           << ", margins " << sel.margin_below << " / " << sel.margin_above << ")";
      rep << line.str() << "\n";
      out << line.str() << "\n";
      results.push_back(std::move(r));
    }
    ConsistencyReport cr = classification_consistency(w, results, c.tol.accept, c.tol.symmetry);
    std::string cls = cr.classification
                          ? to_string(cr.classification->media_type) + " / " + caz_display(cr.classification->caz_class)
                          : "unclassified (" + cr.classification_error + ")";
    rep << "classification: " << cls << "\n";
    out << "classification: " << cls << "\n";
    for (const auto& m : cr.contradictions) {
      rep << "contradiction: " << m << "\n";
      out << "contradiction: " << m << "\n";
    }
    rep << "consistent: " << (cr.consistent ? "yes" : "no") << "\n";
    return cr.consistent ? kExitOk : kExitFlagged;
  });
}

int cmd_evolve(const JobConfig& c, std::ostream& out) {
  return guarded(out, [&] {
    MaterialWeights w = load_validated(c, out);
    const EvolutionConfig& ev = c.evolution;
    PlaneWaveSet pws = plane_wave_set(w.lattice, c.cutoff * kTwoPi);
    FiberOperator f = assemble_fiber(w, pws, ev.k);
    SolveOptions so;
    so.zero_tol_rel = c.tol.zero;
    auto spec = std::make_shared<const FiberSpectrum>(eigensolve(f, -1, so));
    for (int a : ev.amplitudes)
      if (a > spec->n_positive()) throw ConfigError("amplitude band " + std::to_string(a) + " beyond the spectrum");
    CVec psi;
    if (ev.initial == "mode") {
      if (ev.mode > spec->n_positive()) throw ConfigError("initial mode beyond the spectrum");
      psi = spec->vector(spec->band_index(ev.mode));
    } else {
      std::mt19937_64 rng(ev.seed);
      std::normal_distribution<double> nd(0.0, 1.0);
      psi.resize(f.dim());
      for (Eigen::Index i = 0; i < psi.size(); ++i) psi(i) = cd(nd(rng), nd(rng));
      psi = helmholtz_split(psi, f).transversal;
      psi /= weighted_norm(psi, f.weight_matrix());
    }
    FiberState s0 = make_state(spec, psi);
    SourceTerm src;
    if (ev.source) {
      const int p = pws.find(ev.source->g);
      if (p < 0) throw ConfigError("source G is outside the plane-wave set");
      const SourceConfig sc = *ev.source;
      const int npw = pws.size();
      src.current = [sc, p, npw](double t) {
        CVec j = CVec::Zero(3 * npw);
        j.segment<3>(3 * p) = sc.current * std::exp(cd(0, -sc.frequency * t));
        return j;
      };
    }
    QuadratureOptions qo;
    qo.nodes_per_unit = ev.nodes_per_unit;
    qo.order = ev.order;
    qo.tol = c.tol.quadrature;
    std::ofstream csv = open_output(c, "trajectory.csv");
    CsvWriter cw(csv);
    cw.comment("fiber k = " + vec_str(ev.k, 3) + " (reduced), plane waves " + std::to_string(pws.size()) +
               ", t in units of a/c");
    cw.comment(ev.source ? "with source, Duhamel quadrature" : "source-free spectral evolution");
    std::vector<std::string> cols{"step", "t", "energy", "constraint_residual", "longitudinal"};
    if (ev.source) cols.push_back("quadrature_change");
    for (int a : ev.amplitudes) cols.push_back("abs_c" + std::to_string(a));
    cw.header(cols);
    const int steps = ev.t_end == 0 ? 0 : ev.steps;
    const CVec rho0 = field_charge(s0.field(), spec->kvecs, spec->weight->w);
    FiberState cur = s0;
    for (int j = 0; j <= steps; ++j) {
      const double t = steps ? ev.t_end * j / steps : 0.0;
      double qchange = 0.0;
      double cres = -1.0;
      if (j > 0) {
        if (ev.source) {
          DuhamelResult r = evolve_with_source(cur, src, cur.t, t, qo);
          cur = r.state;
          qchange = r.quadrature_change;
          cres = r.constraint_residual;
        } else {
          cur = evolve(s0, t);
        }
      }
      CVec field = cur.field();
      if (cres < 0) cres = constraint_residual(field, spec->kvecs, spec->weight->w, rho0);
      std::vector<double> row{t, cur.energy(), cres, longitudinal_leakage(field, spec->kvecs, spec->weight->w)};
      if (ev.source) row.push_back(qchange);
      for (int a : ev.amplitudes) row.push_back(std::abs(cur.coeffs(spec->band_index(a))));
      cw.row(static_cast<long>(j), row);
    }
    out << "wrote " << steps + 1 << " rows to " << (fs::path(c.out_dir) / "trajectory.csv").string() << "\n";
    return kExitOk;
  });
}

namespace {

struct CheckRow {
  std::string name;
  double value = 0.0;
  std::string limit;
  bool pass = false;
  std::string note;
};

}  // namespace

int cmd_check(const JobConfig& c, std::ostream& out) {
  std::vector<CheckRow> rows;
  auto run = [&](const std::string& name, const std::function<CheckRow()>& fn) {
    try {
      CheckRow r = fn();
      r.name = name;
      rows.push_back(r);
    } catch (const std::exception& e) {
      rows.push_back({name, 0.0, "-", false, e.what()});
    }
  };
  MaterialWeights w;
  try {
    w = load_medium(c);
  } catch (const std::exception& e) {
    out << "error: " << e.what() << "\n";
    return kExitError;
  }
  const int d = w.dimension();
  PlaneWaveSet pws = plane_wave_set(w.lattice, c.cutoff * kTwoPi);
  Vec3 kg(0.13, 0.07, 0.05);
  for (int i = d; i < 3; ++i) kg[i] = 0;
  std::shared_ptr<const WeightMatrix> wm;
  std::optional<FiberOperator> fib;
  std::optional<FiberSpectrum> spec;

  run("weights within bounds", [&] {
    ValidationReport v = validate_weights(w, static_cast<int>(c.tol.validate_samples), c.tol.symmetry);
    return CheckRow{"", v.min_eig, "eig in [c, C]", v.positive && v.within_bounds, v.message};
  });
  run("hermitian field", [&] {
    double h = hermiticity_residual(w);
    return CheckRow{"", h, "<= " + format_double(c.tol.symmetry), h <= c.tol.symmetry, ""};
  });
  run("classification", [&] {
    SymmetryReport r = classify(w, c.tol.symmetry);
    return CheckRow{"", 0.0, "table row", true, to_string(r.media_type) + " / " + caz_display(r.caz_class)};
  });
  run("eigen residual", [&] {
    wm = weight_matrix(w, pws);
    fib = assemble_fiber(wm, w.lattice, pws, kg);
    spec = eigensolve(*fib);
    SpectrumResiduals r = spectrum_residuals(*fib, *spec);
    double v = std::max(r.eigen, r.orthonormality);
    return CheckRow{"", v, "<= 1e-10", v <= 1e-10, ""};
  });
  run("kernel dimension", [&] {
    if (!spec) throw SolverFailure("no spectrum");
    return CheckRow{"", double(spec->kernel_dim), "= 2N = " + std::to_string(2 * pws.size()),
                    spec->kernel_dim == 2 * pws.size(), ""};
  });
  run("contract (W_L = W^-1, W_R = id)", [&] {
    if (!fib) throw SolverFailure("no fiber");
    MaxwellTypeContract mc{fib->rot, fib->weight_matrix().inverse(), CMat::Identity(fib->dim(), fib->dim())};
    ContractReport r = validate_contract(mc, 1e-8);
    return CheckRow{"", r.c, "c > 0, commuting", r.pass, "commutator " + format_double(r.commutator)};
  });
  run("W-selfadjointness", [&] {
    if (!fib) throw SolverFailure("no fiber");
    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd;
    CVec a(fib->dim()), b(fib->dim());
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      a(i) = cd(nd(rng), nd(rng));
      b(i) = cd(nd(rng), nd(rng));
    }
    Eigen::LLT<CMat> llt(fib->weight_matrix());
    CVec ma = llt.solve(fib->rot * a), mb = llt.solve(fib->rot * b);
    const CMat& W = fib->weight_matrix();
    cd lhs = weighted_inner(a, mb, W), rhs = weighted_inner(ma, b, W);
    double v = std::abs(lhs - rhs) / std::max(std::abs(lhs), 1e-300);
    return CheckRow{"", v, "<= 1e-10", v <= 1e-10, ""};
  });
  const bool real_w = [&] {
    MaterialWeights cw = conjugate_medium(w);
    for (const auto& [g, m] : w.coeffs)
      if ((cw.coeff(g) - m).norm() > 1e-14 * std::max(1.0, m.norm())) return false;
    return true;
  }();
  run("spectral mirror", [&] {
    if (!spec) throw SolverFailure("no spectrum");
    MaterialWeights partner = real_w ? w : conjugate_medium(w);
    FiberSpectrum m = eigensolve(assemble_fiber(partner, pws, Vec3(-kg)), -1, {1e-8, false});
    const int n = spec->size();
    double worst = 0, scale = spec->omegas.cwiseAbs().maxCoeff();
    for (int i = 0; i < n; ++i) worst = std::max(worst, std::abs(spec->omegas(i) + m.omegas(n - 1 - i)));
    return CheckRow{"", worst / scale, "<= 1e-9", worst / scale <= 1e-9,
                    real_w ? "same medium" : "conjugate medium"};
  });
  run("real-field roundtrip", [&] {
    if (!real_w) return CheckRow{"", 0.0, "-", true, "skipped: complex weights"};
    FiberPair p = make_fiber_pair(w, pws, kg);
    std::mt19937_64 rng(11);
    double worst = 0;
    for (int i = 0; i < 3; ++i) {
      CVec u = random_real_field(p, rng);
      worst = std::max({worst, real_roundtrip(p, u).residual, phase_locking_check(p, u)});
    }
    return CheckRow{"", worst, "<= 1e-10", worst <= 1e-10, "2 Re Q+ u = u and phase locking"};
  });
  run("unitarity t = 1000", [&] {
    if (!spec || !fib) throw SolverFailure("no spectrum");
    auto sp = std::make_shared<const FiberSpectrum>(*spec);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> nd;
    CVec psi(fib->dim());
    for (Eigen::Index i = 0; i < psi.size(); ++i) psi(i) = cd(nd(rng), nd(rng));
    psi = helmholtz_split(psi, *fib).transversal;
    FiberState s0 = make_state(sp, psi);
    FiberState s1 = evolve(s0, 1000.0);
    const CMat& W = fib->weight_matrix();
    CVec f1 = s1.field();
    double e0 = 0.5 * weighted_inner(psi, psi, W).real();
    double e1 = 0.5 * weighted_inner(f1, f1, W).real();
    double drift = std::abs(e1 - e0) / e0;
    double leak = longitudinal_leakage(f1, fib->kvecs, W);
    return CheckRow{"", std::max(drift, leak), "<= 1e-10", drift <= 1e-11 && leak <= 1e-10,
                    "energy drift " + format_double(drift) + ", leakage " + format_double(leak)};
  });
  run("ground-state asymptotics", [&] {
    const double b1 = w.lattice.full_reciprocal().col(0).norm();
    double prev = std::numeric_limits<double>::infinity();
    bool mono = true;
    std::string note;
    double last = 0;
    for (double r : {0.08, 0.04, 0.02}) {
      GroundStateReport g = ground_state_dispersion_check(w, pws, r * b1);
      if (g.deviation > prev + 1e-12) mono = false;
      prev = g.deviation;
      last = g.deviation;
      note += (note.empty() ? "" : ", ") + format_double(g.deviation);
    }
    // Only leading order is claimed; in d >= 2 the homogenized medium differs from W_avg.
    return CheckRow{"", last, "< 0.1 at 0.02|b1|", last < 0.1,
                    "deviations at 0.08, 0.04, 0.02 |b1|: " + note + (mono ? " (decreasing)" : " (not decreasing)")};
  });
  bool all = true;
  out << std::left << std::setw(34) << "check" << std::setw(26) << "value" << std::setw(22) << "limit"
      << "result\n";
  for (const auto& r : rows) {
    all = all && r.pass;
    out << std::left << std::setw(34) << r.name << std::setw(26) << format_double(r.value) << std::setw(22) << r.limit
        << (r.pass ? "PASS" : "FAIL");
    if (!r.note.empty()) out << "  " << r.note;
    out << "\n";
  }
  out << (all ? "all checks passed" : "some checks failed") << "\n";
  return all ? kExitOk : kExitFlagged;
}

int cmd_fixture(const std::string& name, const std::string& path, std::ostream& out) {
  return guarded(out, [&] {
    MaterialWeights w = make_fixture(name);
    fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    save_weights(w, path);
    out << "wrote fixture '" << name << "' to " << path << "\n";
    return kExitOk;
  });
}

}  // namespace emtopo::cli
