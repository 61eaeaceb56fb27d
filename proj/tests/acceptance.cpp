// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "lowtrot/bounds.hpp"
#include "lowtrot/error_lab.hpp"
#include "lowtrot/lattice.hpp"
#include "lowtrot/product_formula.hpp"
#include "lowtrot/sweep.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

using namespace lowtrot;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

Outcome ac1_order() {
  const auto grid = log_grid(1e-3, 1e-2, 6);
  bool ok = true;
  std::string detail;
  for (const auto& spec : {build_aklt(4), build_mg(6)}) {
    const TrotterLab lab(spec);
    for (int p : {1, 2}) {
      const auto fit = order_check(suzuki_plan(p, lab.gamma_count()), lab.spectrum(),
                                   lab.part_spectra(), grid);
      const double slope = fit.slope.value_or(0.0);
      ok = ok && fit.slope && std::abs(slope - (p + 1)) <= 0.2;
      detail += spec.model_tag() + std::to_string(spec.num_sites()) + " p=" + std::to_string(p) +
                " slope=" + fmt(slope) + "; ";
    }
  }
  return {ok, detail};
}

Outcome commutator_sums(bool projected) {
  int violations = 0, points = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  for (const auto& spec : {build_aklt(3), build_aklt(4), build_mg(4), build_mg(5)}) {
    const TrotterLab lab(spec);
    const int k = lab.locality_k();
    const double g = lab.extensiveness();
    for (int q : {1, 2}) {
      for (double delta : {0.5, 1.0}) {
        double value, bound;
        if (projected) {
          value = lab.nested_commutator_sum(q, lab.spectrum().basis_at_most(delta));
          bound = thm_s1_rhs(q, k, g, delta);
        } else {
          value = lab.nested_commutator_sum(q);
          bound = unprojected_commutator_rhs(q, k, g, spec.num_sites());
        }
        ++points;
        if (!(value <= bound)) ++violations;
        min_margin = std::min(min_margin, bound - value);
      }
    }
  }
  return {violations == 0, std::to_string(points) + " points, " + std::to_string(violations) +
                               " violations, min margin " + fmt(min_margin)};
}

Outcome ac4_excitation() {
  const TrotterLab lab(build_aklt(5));
  const double g = lab.extensiveness();
  const int k = lab.locality_k();
  const auto terms = lab.embedded_terms();
  int violations = 0, points = 0;
  double worst_ratio = 0.0;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const int s = static_cast<int>(lab.spec().terms()[i].support().size());
    const double norm = spectral_norm(terms[i]);
    for (double delta : {0.25, 0.5, 0.75, 1.0}) {
      for (int j = 0; j <= 5; ++j) {
        const double dp = delta + 3.0 * g * s + 8.0 * k * g * j / 5.0;
        const double value = lab.leakage_norm(terms[i], delta, dp);
        const double bound = excitation_bound_rhs(norm, delta, dp, g, s, k);
        ++points;
        if (!(value <= bound)) ++violations;
        worst_ratio = std::max(worst_ratio, value / bound);
      }
    }
  }
  return {violations == 0 && points >= 20 * static_cast<int>(terms.size()),
          std::to_string(terms.size()) + " terms x " + std::to_string(points / static_cast<int>(terms.size())) +
              " grid points, " + std::to_string(violations) + " violations, max value/bound " +
              fmt(worst_ratio)};
}

Outcome ac5_soundness() {
  int grid_applicable = 0, ladder_applicable = 0, violations = 0, evaluated = 0;
  const double eps_small = 1e-6;
  std::vector<HamiltonianSpec> specs;
  for (int n = 3; n <= 6; ++n) specs.push_back(build_aklt(n));
  for (int n = 4; n <= 8; ++n) specs.push_back(build_mg(n));
  for (const auto& spec : specs) {
    const TrotterLab lab(spec);
    for (int p : {1, 2}) {
      const auto plan = suzuki_plan(p, lab.gamma_count());
      for (double delta : {0.5, 1.0}) {
        const auto probe = inputs_for(lab, plan, 0.0, delta, eps_small);
        const double limit = std::min(cor_s4_bound(probe).time_limit, thm_s3_bound(probe).time_limit);
        const std::vector<double> times{0.1, limit, 0.5 * limit, 0.25 * limit};
        for (std::size_t ti = 0; ti < times.size(); ++ti) {
          const double t = times[ti];
          const auto in = inputs_for(lab, plan, t, delta, eps_small);
          const double measured = lab.projected_error(plan, t, delta);
          for (const auto& report : {cor_s4_bound(in), thm_s3_bound(in)}) {
            ++evaluated;
            if (!report.time_condition_ok) continue;
            (ti == 0 ? grid_applicable : ladder_applicable)++;
            if (!(report.bound_value >= measured)) ++violations;
          }
        }
      }
    }
  }
  const int applicable = grid_applicable + ladder_applicable;
  return {violations == 0 && applicable > 0,
          std::to_string(evaluated) + " bound evaluations; time condition held at " +
              std::to_string(grid_applicable) + " t=0.1 points and " +
              std::to_string(ladder_applicable) + " points of the in-condition time ladder; " +
              std::to_string(violations) + " violations"};
}

Outcome ac6_size_shape() {
  std::vector<double> full, projected;
  bool below = true;
  for (int n = 4; n <= 6; ++n) {
    const TrotterLab lab(build_aklt(n));
    const auto plan = suzuki_plan(1, 2);
    full.push_back(lab.full_error(plan, 0.1));
    projected.push_back(lab.projected_error(plan, 0.1, 0.5));
    below = below && projected.back() < full.back();
  }
  const double full_ratio = full.back() / full.front();
  const double proj_ratio = projected.back() / projected.front();
  return {below && full_ratio >= 1.3 && proj_ratio < full_ratio,
          "full ratio N6/N4 " + fmt(full_ratio) + ", projected ratio " + fmt(proj_ratio) +
              ", projected<full at every N: " + (below ? "yes" : "no")};
}

Outcome ac7_delta_shape() {
  const TrotterLab lab(build_aklt(5));
  const auto plan = suzuki_plan(1, 2);
  const double lmax = lab.spectrum().max_eigenvalue();
  // nested windows give equal norms in exact arithmetic; allow rounding-level drops only
  double previous = 0.0, largest_drop = 0.0;
  for (int i = 0; i <= 50; ++i) {
    const double e = lab.projected_error(plan, 0.1, lmax * i / 50.0);
    largest_drop = std::max(largest_drop, previous - e);
    previous = e;
  }
  const bool monotone = largest_drop <= 1e-13;
  const double gap = std::abs(lab.projected_error(plan, 0.1, lmax) - lab.full_error(plan, 0.1));
  return {monotone && gap <= 1e-10,
          std::string("nondecreasing on 51 points: ") + (monotone ? "yes" : "no") + " (largest drop " +
              fmt(largest_drop) + "), |projected(lambda_max) - full| " + fmt(gap)};
}

Outcome ac8_certified() {
  const TrotterLab lab(build_aklt(4));
  bool verified = true, within = true;
  std::string detail;
  for (int p : {1, 2}) {
    const auto plan = suzuki_plan(p, lab.gamma_count());
    const auto c = trotter_number_certified(lab, plan, 1.0, 1.0, 1e-3);
    const auto in = inputs_for(lab, plan, 1.0, 1.0, 0.01, 1e-3);
    const auto est = prop_s5_number(in, TrotterRegime::const_gamma);
    const double factor = std::max(est.raw / c.r, c.r / est.raw);
    verified = verified && c.verified;
    within = within && factor <= 8.0;
    detail += "p=" + std::to_string(p) + " certified r=" + std::to_string(c.r) +
              " direct error " + fmt(c.direct_error) + " formula r=" + std::to_string(est.r) +
              " factor " + fmt(factor) + "; ";
  }
  detail += std::string("direct verification ") + (verified ? "holds" : "fails") +
            ", factor-8 agreement " + (within ? "holds" : "fails");
  return {verified && within, detail};
}

Outcome ac9_degenerate() {
  double worst = 0.0;
  const Matrix zz = Matrix(Vector((Vector(4) << 2, 0, 0, 2).finished()).asDiagonal());
  HamiltonianSpec commuting(LatticeSpec(3, 2), {LocalTerm({0, 1}, zz), LocalTerm({1, 2}, zz)},
                            {1, 2}, 2, "zz");
  const TrotterLab clab(commuting);
  for (int p : {1, 2}) worst = std::max(worst, clab.full_error(suzuki_plan(p, 2), 0.8));
  for (const auto& spec : {build_aklt(4), build_mg(5)}) {
    const TrotterLab lab(spec);
    for (int p : {1, 2}) {
      const auto plan = suzuki_plan(p, lab.gamma_count());
      worst = std::max(worst, lab.full_error(plan, 0.0));
      worst = std::max(worst, lab.projected_error(plan, 0.3, lab.spectrum().min_eigenvalue() - 0.1));
      worst = std::max(worst, std::abs(lab.projected_error(plan, 0.3, std::numeric_limits<double>::infinity()) -
                                       lab.full_error(plan, 0.3)));
    }
  }
  return {worst <= 1e-12, "largest deviation from the exact identity " + fmt(worst)};
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run(const std::string& args) {
  const std::string cmd = std::string(LOWTROT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome ac10_determinism() {
  const fs::path dir = fs::temp_directory_path() / "lowtrot_acceptance";
  fs::create_directories(dir);
  const fs::path cfg = dir / "sweep.cfg";
  {
    std::ofstream out(cfg);
    out << "model = aklt\nn_list = 3..5\np_list = 1,2\nt_list = 0.1\ndelta_list = 0.5,1.0,inf\n"
           "bounds = true\n";
  }
  const int v1 = run("verify --out " + (dir / "verify1.csv").string());
  const int v2 = run("verify --workers 2 --out " + (dir / "verify2.csv").string());
  const int s1 = run("sweep " + cfg.string() + " --out " + (dir / "sweep1.csv").string());
  const int s2 = run("sweep " + cfg.string() + " --workers 2 --out " + (dir / "sweep2.csv").string());
  const bool verify_same = read_file(dir / "verify1.csv") == read_file(dir / "verify2.csv") &&
                           !read_file(dir / "verify1.csv").empty();
  const bool sweep_same = read_file(dir / "sweep1.csv") == read_file(dir / "sweep2.csv") &&
                          !read_file(dir / "sweep1.csv").empty();
  return {v1 == 0 && v2 == 0 && s1 == 0 && s2 == 0 && verify_same && sweep_same,
          "verify exit " + std::to_string(v1) + "/" + std::to_string(v2) + " identical: " +
              (verify_same ? "yes" : "no") + "; sweep exit " + std::to_string(s1) + "/" +
              std::to_string(s2) + " identical: " + (sweep_same ? "yes" : "no")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"AC1 order of accuracy", ac1_order},
      {"AC2 low-energy nested commutator sums", [] { return commutator_sums(true); }},
      {"AC3 unrestricted nested commutator sums", [] { return commutator_sums(false); }},
      {"AC4 excitation bound", ac4_excitation},
      {"AC5 error-bound soundness", ac5_soundness},
      {"AC6 system-size shape", ac6_size_shape},
      {"AC7 energy-cutoff shape", ac7_delta_shape},
      {"AC8 certified Trotter number", ac8_certified},
      {"AC9 degenerate equivalences", ac9_degenerate},
      {"AC10 determinism", ac10_determinism},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.passed) ++failures;
    std::cout << (o.passed ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
