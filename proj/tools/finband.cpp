// Command-line front end: every pipeline as a subcommand with JSON/CSV
// output.  All randomness flows from --seed so reruns are byte-identical.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "finband/finband.hpp"

namespace {

using namespace finband;

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open input file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("malformed JSON: ") + e.what());
  }
  return j;
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open output file: " + path);
  out << j.dump(2) << "\n";
}

struct GridSpec {
  double lo = 0.0, hi = 1.0;
  int n = 0;
};

GridSpec parse_axis(const std::string& text) {
  GridSpec g;
  if (std::sscanf(text.c_str(), "%lf:%lf:%d", &g.lo, &g.hi, &g.n) != 3 || g.n < 2 || !(g.hi > g.lo))
    throw ValidationError("grid axis must be lo:hi:n with n >= 2 and hi > lo");
  return g;
}

// ---- bands ----------------------------------------------------------------

void run_bands(const std::string& input, const std::string& out, const std::string& csv,
               const std::string& grid) {
  const json j = read_json_file(input);
  BandSet bands;
  std::vector<std::string> csv_rows;

  if (j.is_object() && j.contains("a") && j.contains("b")) {
    const PeriodicJacobi j0 = jacobi_from_json(j);
    const Poly delta = discriminant(j0);
    bands = bands_from_discriminant(delta);
    GridSpec g{-3.0, 3.0, 1201};
    if (!bands.intervals.empty()) {
      const double span = bands.intervals.back().second - bands.intervals.front().first;
      g.lo = bands.intervals.front().first - 0.25 * span;
      g.hi = bands.intervals.back().second + 0.25 * span;
    }
    if (!grid.empty()) g = parse_axis(grid);
    for (int i = 0; i < g.n; ++i) {
      const double z = g.lo + (g.hi - g.lo) * double(i) / double(g.n - 1);
      const double dv = delta.eval(z).real();
      csv_rows.push_back(csv_double(z) + "," + csv_double(dv) + "," +
                         (dv >= -2.0 && dv <= 2.0 ? "1" : "0"));
    }
  } else {
    const ErgodicSystem sys = ergodic_system_from_json(j);
    double bound = 0.0;
    for (int k = -sys.half_bandwidth(); k <= sys.half_bandwidth(); ++k) {
      double mx = 0.0;
      for (int w = 0; w < sys.period(); ++w) mx = std::max(mx, std::abs(sys.q(k, w)));
      bound += mx;
    }
    GridSpec g{-bound - 0.5, bound + 0.5, 2001};
    if (!grid.empty()) g = parse_axis(grid);
    std::vector<bool> flags(static_cast<std::size_t>(g.n));
    std::vector<double> zs(static_cast<std::size_t>(g.n));
    for (int i = 0; i < g.n; ++i) {
      const double z = g.lo + (g.hi - g.lo) * double(i) / double(g.n - 1);
      double mindist = std::numeric_limits<double>::infinity();
      for (const cdouble& m : floquet_multipliers(sys, z))
        mindist = std::min(mindist, std::abs(std::abs(m) - 1.0));
      zs[static_cast<std::size_t>(i)] = z;
      flags[static_cast<std::size_t>(i)] = mindist <= 1e-6;
      csv_rows.push_back(csv_double(z) + "," + csv_double(mindist) + "," +
                         (flags[static_cast<std::size_t>(i)] ? "1" : "0"));
    }
    for (int i = 0; i < g.n; ++i) {
      if (!flags[static_cast<std::size_t>(i)]) continue;
      const double l = zs[static_cast<std::size_t>(i)];
      while (i + 1 < g.n && flags[static_cast<std::size_t>(i + 1)]) ++i;
      bands.intervals.emplace_back(l, zs[static_cast<std::size_t>(i)]);
    }
  }

  write_json_file(out, to_json(bands));
  if (!csv.empty()) {
    std::ofstream os(csv);
    os << "z,delta,in_band\n";
    for (const auto& row : csv_rows) os << row << "\n";
  }
}

// ---- discriminant ---------------------------------------------------------

void run_discriminant(const std::string& input, const std::string& out, const std::string& csv,
                      const std::string& grid) {
  const PeriodicJacobi j0 = jacobi_from_json(read_json_file(input));
  const Poly delta = discriminant(j0);
  write_json_file(out, to_json(delta));
  if (!csv.empty()) {
    GridSpec g = grid.empty() ? GridSpec{-3.0, 3.0, 1201} : parse_axis(grid);
    std::ofstream os(csv);
    os << "z,delta,in_band\n";
    for (int i = 0; i < g.n; ++i) {
      const double z = g.lo + (g.hi - g.lo) * double(i) / double(g.n - 1);
      const double dv = delta.eval(z).real();
      os << csv_double(z) << "," << csv_double(dv) << ","
         << (dv >= -2.0 && dv <= 2.0 ? "1" : "0") << "\n";
    }
  }
}

// ---- fit ------------------------------------------------------------------

void run_fit(const std::string& target_path, const std::string& out, const std::string& report_path,
             std::uint64_t seed, double tol) {
  const Poly target = poly_from_json(read_json_file(target_path));
  const FitProblem problem = validate_target(target);
  std::mt19937_64 rng(seed);
  const FitResult fit = fit_discriminant(problem, rng, tol);
  write_json_file(out, to_json(fit.jacobi));

  const int d = target.degree();
  const int margin = d * d;
  const int n = std::max(300, 2 * margin + 10);
  const MagicCheck magic = magic_formula_check(fit.jacobi, target, n, margin);
  const BandSet bands = bands_from_discriminant(target);
  json gaps = json::array();
  for (const auto& [l, r] : open_gaps(bands)) gaps.push_back(json::array({l, r}));
  const json report{{"residual", fit.residual},
                    {"starts_used", fit.starts_used},
                    {"bands", to_json(bands)},
                    {"open_gaps", gaps},
                    {"magic", {{"deviation", magic.deviation}, {"row", magic.row}, {"col", magic.col},
                               {"N", n}, {"margin", margin}}}};
  if (!report_path.empty()) write_json_file(report_path, report);
  std::cout << report.dump(2) << "\n";
}

// ---- monodromy ------------------------------------------------------------

RationalMap map_from_json(const json& j) {
  if (j.is_array()) return RationalMap::polynomial(poly_from_json(j));
  if (j.is_object() && j.contains("numerator") && j.contains("denominator"))
    return RationalMap(poly_from_json(j.at("numerator")), poly_from_json(j.at("denominator")));
  throw ValidationError("rational map: expected coefficient array or {\"numerator\", \"denominator\"}");
}

void run_monodromy(const std::string& input, const std::string& out, const std::string& paths_csv,
                   std::uint64_t seed) {
  const RationalMap f = map_from_json(read_json_file(input));
  std::mt19937_64 rng(seed);
  const HurwitzData h = monodromy(f, rng);
  write_json_file(out, to_json(h));
  if (!paths_csv.empty()) {
    std::ofstream os(paths_csv);
    os << "loop,node,re,im\n";
    for (std::size_t li = 0; li < h.loops.size(); ++li)
      for (std::size_t ni = 0; ni < h.loops[li].size(); ++ni)
        os << li << "," << ni << "," << csv_double(h.loops[li][ni].real()) << ","
           << csv_double(h.loops[li][ni].imag()) << "\n";
  }
}

// ---- model-check ----------------------------------------------------------

void run_model_check(int d, int window, const std::string& out) {
  if (d < 1) throw ValidationError("model-check: d must be >= 1");
  if (window < 2 * d + 1) throw ValidationError("model-check: window must be >= 2d+1");
  const long long n0 = -(window / 2);
  const long long n1 = n0 + window;
  const Eigen::MatrixXcd quad = trivial_basis_matrix(d, n0, n1);
  const Eigen::MatrixXcd sec = build_section(ErgodicSystem::shift_pair(d), 0, n0, n1).entries;
  const double dev = (quad - sec).cwiseAbs().maxCoeff();
  const json report{{"d", d}, {"window", json::array({n0, n1})}, {"max_deviation", dev}};
  if (!out.empty()) write_json_file(out, report);
  std::cout << report.dump(2) << "\n";
}

// ---- green ----------------------------------------------------------------

void run_green(const std::string& input, const std::string& grid, const std::string& out,
               const std::string& report_path, const std::string& eval_point) {
  const Poly t = poly_from_json(read_json_file(input));
  const SlitDomainGreen green(t);

  if (!eval_point.empty()) {
    double re = 0.0, im = 0.0;
    if (std::sscanf(eval_point.c_str(), "%lf,%lf", &re, &im) != 2)
      throw ValidationError("green: --eval must be re,im");
    const cdouble u(re, im);
    json branches = json::array();
    for (int l = 0; l < t.degree(); ++l) {
      const GreenPoint g = tmodel_eval(t, l, u);
      branches.push_back(json{{"branch", l},
                              {"z", to_json(g.z)},
                              {"b", to_json(g.b)},
                              {"w", to_json(g.w)},
                              {"lambda", to_json(g.lambda)}});
    }
    const json report{{"u", to_json(u)}, {"G", green(u)}, {"branches", branches}};
    if (!out.empty()) write_json_file(out, report);
    std::cout << report.dump(2) << "\n";
    return;
  }

  const auto comma = grid.find(',');
  if (comma == std::string::npos) throw ValidationError("green: --grid must be x0:x1:nx,y0:y1:ny");
  const GridSpec gx = parse_axis(grid.substr(0, comma));
  const GridSpec gy = parse_axis(grid.substr(comma + 1));

  std::ofstream os(out);
  if (!os) throw ValidationError("cannot open output file: " + out);
  os << "re,im,G\n";
  double gmin = std::numeric_limits<double>::infinity(), gmax = 0.0;
  long long count = 0;
  for (int iy = 0; iy < gy.n; ++iy)
    for (int ix = 0; ix < gx.n; ++ix) {
      const cdouble u(gx.lo + (gx.hi - gx.lo) * double(ix) / double(gx.n - 1),
                      gy.lo + (gy.hi - gy.lo) * double(iy) / double(gy.n - 1));
      os << csv_double(u.real()) << "," << csv_double(u.imag()) << ",";
      if (green.in_domain(u, 1e-9)) {
        const double g = green(u);
        os << csv_double(g) << "\n";
        gmin = std::min(gmin, g);
        gmax = std::max(gmax, g);
        ++count;
      } else {
        os << "nan\n";
      }
    }
  const json report{{"points_off_spectrum", count}, {"min_G", gmin}, {"max_G", gmax}};
  if (!report_path.empty()) write_json_file(report_path, report);
  std::cout << report.dump(2) << "\n";
}

// ---- symbol-check ---------------------------------------------------------

void run_symbol_check(const std::string& input, int samples, std::uint64_t seed, double tol,
                      const std::string& out) {
  const ErgodicSystem sys = ergodic_system_from_json(read_json_file(input));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> radius(0.3, 0.9);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const cdouble b = std::polar(radius(rng), angle(rng));
    const Eigen::MatrixXcd m = symbol_matrix(sys, b);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m, false);
    for (int i = 0; i < m.rows(); ++i) {
      const cdouble z = std::conj(solver.eigenvalues()(i));
      worst = std::max(worst, symbol_curve_residual(sys, b, z));
    }
  }
  const json report{{"samples", samples}, {"max_residual", worst}, {"tol", tol}};
  if (!out.empty()) write_json_file(out, report);
  std::cout << report.dump(2) << "\n";
  if (worst > tol) throw NumericalError("symbol-check: residual above tolerance");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finband: finite-band multi-diagonal ergodic operator laboratory"};
  app.require_subcommand(1);

  std::string input, out, csv, grid, target, report;
  std::uint64_t seed = 0;
  double tol = 1e-11;
  int d = 1, window = 21, samples = 100;

  auto* bands = app.add_subcommand("bands", "band set of a periodic Jacobi or ergodic system");
  bands->add_option("--input", input)->required();
  bands->add_option("--out", out)->required();
  bands->add_option("--csv", csv);
  bands->add_option("--grid", grid);
  bands->add_option("--seed", seed);

  auto* disc = app.add_subcommand("discriminant", "discriminant polynomial of a periodic Jacobi matrix");
  disc->add_option("--input", input)->required();
  disc->add_option("--out", out)->required();
  disc->add_option("--csv", csv);
  disc->add_option("--grid", grid);

  auto* fit = app.add_subcommand("fit", "fit a periodic Jacobi matrix to a target discriminant");
  fit->add_option("--target", target)->required();
  fit->add_option("--out", out)->required();
  fit->add_option("--report", report);
  fit->add_option("--seed", seed);
  fit->add_option("--tol", tol);

  auto* mono = app.add_subcommand("monodromy", "Hurwitz data of a rational covering");
  mono->add_option("--input", input)->required();
  mono->add_option("--out", out)->required();
  mono->add_option("--paths", csv);
  mono->add_option("--seed", seed);

  auto* model = app.add_subcommand("model-check", "circle-basis multiplication matrix vs operator section");
  model->add_option("--d", d)->required();
  model->add_option("--window", window);
  model->add_option("--out", out);

  std::string eval_point;
  auto* green = app.add_subcommand("green", "Green's function grid for the complement of T^{-1}[-2,2]");
  green->add_option("--input", input)->required();
  green->add_option("--grid", grid);
  green->add_option("--out", out);
  green->add_option("--report", report);
  green->add_option("--eval", eval_point, "single point re,im; emits all branch values as JSON");

  auto* symc = app.add_subcommand("symbol-check", "symbol eigencondition residual at random points");
  symc->add_option("--input", input)->required();
  symc->add_option("--samples", samples);
  symc->add_option("--seed", seed);
  symc->add_option("--tol", tol);
  symc->add_option("--out", out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (bands->parsed()) run_bands(input, out, csv, grid);
    else if (disc->parsed()) run_discriminant(input, out, csv, grid);
    else if (fit->parsed()) run_fit(target, out, report, seed, tol);
    else if (mono->parsed()) run_monodromy(input, out, csv, seed);
    else if (model->parsed()) run_model_check(d, window, out);
    else if (green->parsed()) {
      if (eval_point.empty() && (grid.empty() || out.empty()))
        throw ValidationError("green: need either --eval or both --grid and --out");
      run_green(input, grid, out, report, eval_point);
    }
    else if (symc->parsed()) run_symbol_check(input, samples, seed, tol, out);
  } catch (const finband::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const finband::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
