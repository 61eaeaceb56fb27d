#pragma once

// Sweep configuration and the (model, N, p, t, Δ) error sweep.
//
// Config grammar: one `key = value` per line, `#` starts a comment, blank
// lines are ignored. Lists are comma separated; integer lists also accept
// inclusive ranges `a..b`. delta_list accepts the token `inf` (unrestricted).
//
//   model       aklt | mg | lr_heisenberg            (required)
//   n_list      e.g. 3..6                             (required)
//   p_list      e.g. 1,2                              (required)
//   t_list      e.g. 0.1                              (required)
//   delta_list  e.g. 0.5,1.0,inf                      (required)
//   bounds      true | false                          (default false)
//   seed        unsigned integer                      (default 0)
//   output_path path                                  (default sweep.csv)
//   eps_small   slack inside Δ′, in (0,1)              (default 0.01)
//   nu, j0      long-range exponent and coupling      (default 2, 1)
//   cap         Hilbert dimension cap                 (default 20000)
//   workers     worker threads                        (default 1)

#include "lowtrot/bounds.hpp"
#include "lowtrot/csv.hpp"
#include "lowtrot/error_lab.hpp"
#include "lowtrot/lattice.hpp"
#include "lowtrot/product_formula.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace lowtrot {

class ConfigError : public Error {
 public:
  using Error::Error;
};

struct SweepConfig {
  std::string model;
  std::vector<int> n_list;
  std::vector<int> p_list;
  std::vector<double> t_list;
  std::vector<std::optional<double>> delta_list;  // nullopt: unrestricted
  bool bounds = false;
  std::uint64_t seed = 0;
  std::string output_path = "sweep.csv";
  double eps_small = 0.01;
  double nu = 2.0;
  double j0 = 1.0;
  std::size_t dim_cap = kDefaultDimensionCap;
  int workers = 1;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline double parse_double(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("trailing characters");
  return v;
}

inline long long parse_integer(const std::string& s) {
  std::size_t used = 0;
  const long long v = std::stoll(s, &used);
  if (used != s.size()) throw std::invalid_argument("trailing characters");
  return v;
}

inline std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  for (const auto& item : split_list(s)) {
    const auto dots = item.find("..");
    if (dots != std::string::npos) {
      const auto lo = parse_integer(trim(item.substr(0, dots)));
      const auto hi = parse_integer(trim(item.substr(dots + 2)));
      if (hi < lo) throw std::invalid_argument("empty range " + item);
      for (auto v = lo; v <= hi; ++v) out.push_back(static_cast<int>(v));
    } else {
      out.push_back(static_cast<int>(parse_integer(item)));
    }
  }
  return out;
}

inline int model_local_dim(const std::string& model) {
  if (model == "aklt") return 3;
  if (model == "mg" || model == "lr_heisenberg") return 2;
  return 0;
}

template <typename T>
std::vector<T> sorted_unique(std::vector<T> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

/// Runs fn(i) for i in [0, count) on up to `workers` threads.
template <typename Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn) {
  const auto n_threads =
      static_cast<std::size_t>(std::max(1, std::min<int>(workers, static_cast<int>(count))));
  if (n_threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < n_threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace detail

/// Checks list contents and dimension caps; throws ConfigError.
inline void validate_config(const SweepConfig& c) {
  auto fail = [](const std::string& key, const std::string& msg) {
    throw ConfigError("key '" + key + "': " + msg);
  };
  const int d = detail::model_local_dim(c.model);
  if (d == 0) fail("model", "unknown model '" + c.model + "' (expected aklt, mg, lr_heisenberg)");
  if (c.n_list.empty()) fail("n_list", "list is empty");
  if (c.p_list.empty()) fail("p_list", "list is empty");
  if (c.t_list.empty()) fail("t_list", "list is empty");
  if (c.delta_list.empty()) fail("delta_list", "list is empty");
  const int n_min = c.model == "mg" ? 3 : 2;
  for (int n : c.n_list) {
    if (n < n_min) fail("n_list", "N = " + std::to_string(n) + " is below the model minimum");
    if (!checked_power(static_cast<std::size_t>(d), static_cast<std::size_t>(n), c.dim_cap)) {
      fail("n_list", "N = " + std::to_string(n) + " exceeds the dimension cap " +
                         std::to_string(c.dim_cap));
    }
  }
  for (int p : c.p_list) {
    if (p < 1 || p > 6 || (p > 1 && p % 2 != 0)) {
      fail("p_list", "order " + std::to_string(p) + " must be 1, 2, 4 or 6");
    }
  }
  for (double t : c.t_list) {
    if (!std::isfinite(t)) fail("t_list", "times must be finite");
  }
  for (const auto& delta : c.delta_list) {
    if (delta && std::isnan(*delta)) fail("delta_list", "nan is not allowed");
  }
  if (!(c.eps_small > 0.0 && c.eps_small < 1.0)) fail("eps_small", "must lie in (0,1)");
  if (c.model == "lr_heisenberg" && !(c.j0 > 0.0 && c.nu >= 0.0)) {
    fail("nu/j0", "requires nu >= 0 and j0 > 0");
  }
  if (c.workers < 1) fail("workers", "must be >= 1");
}

inline SweepConfig parse_sweep_config(const std::string& text) {
  SweepConfig c;
  std::set<std::string> seen;
  std::set<std::string> required{"model", "n_list", "p_list", "t_list", "delta_list"};
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    auto where = [&](const std::string& key) {
      return "line " + std::to_string(line_no) + (key.empty() ? "" : ", key '" + key + "'") + ": ";
    };
    if (eq == std::string::npos) throw ConfigError(where("") + "expected 'key = value'");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (!seen.insert(key).second) throw ConfigError(where(key) + "duplicate key");
    try {
      if (key == "model") {
        c.model = value;
      } else if (key == "n_list") {
        c.n_list = detail::parse_int_list(value);
      } else if (key == "p_list") {
        c.p_list = detail::parse_int_list(value);
      } else if (key == "t_list") {
        c.t_list.clear();
        for (const auto& item : detail::split_list(value)) c.t_list.push_back(detail::parse_double(item));
      } else if (key == "delta_list") {
        c.delta_list.clear();
        for (const auto& item : detail::split_list(value)) {
          if (item == "inf") c.delta_list.push_back(std::nullopt);
          else c.delta_list.push_back(detail::parse_double(item));
        }
      } else if (key == "bounds") {
        if (value == "true") c.bounds = true;
        else if (value == "false") c.bounds = false;
        else throw std::invalid_argument("expected true or false");
      } else if (key == "seed") {
        const auto v = detail::parse_integer(value);
        if (v < 0) throw std::invalid_argument("seed must be non-negative");
        c.seed = static_cast<std::uint64_t>(v);
      } else if (key == "output_path") {
        c.output_path = value;
      } else if (key == "eps_small") {
        c.eps_small = detail::parse_double(value);
      } else if (key == "nu") {
        c.nu = detail::parse_double(value);
      } else if (key == "j0") {
        c.j0 = detail::parse_double(value);
      } else if (key == "cap") {
        const auto v = detail::parse_integer(value);
        if (v < 1) throw std::invalid_argument("cap must be positive");
        c.dim_cap = static_cast<std::size_t>(v);
      } else if (key == "workers") {
        c.workers = static_cast<int>(detail::parse_integer(value));
      } else {
        throw ConfigError(where(key) + "unknown key");
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(where(key) + "invalid value '" + value + "' (" + e.what() + ")");
    }
  }
  for (const auto& key : required) {
    if (!seen.count(key)) throw ConfigError("missing required key '" + key + "'");
  }
  return c;
}

inline HamiltonianSpec build_model(const std::string& model, int n, double nu, double j0,
                                   std::size_t dim_cap) {
  if (model == "aklt") return build_aklt(n, dim_cap);
  if (model == "mg") return build_mg(n, dim_cap);
  if (model == "lr_heisenberg") return build_long_range_heisenberg(n, nu, j0, dim_cap);
  throw Error("unknown model '" + model + "'");
}

/// One row per (N, p, t, Δ), sorted by (N, p, t, Δ) with unrestricted last.
inline std::vector<CsvRecord> run_sweep(const SweepConfig& config) {
  validate_config(config);
  const auto ns = detail::sorted_unique(config.n_list);
  const auto ps = detail::sorted_unique(config.p_list);
  const auto ts = detail::sorted_unique(config.t_list);
  std::vector<double> finite;
  bool unrestricted = false;
  for (const auto& d : config.delta_list) {
    if (d) finite.push_back(*d); else unrestricted = true;
  }
  finite = detail::sorted_unique(finite);
  std::vector<std::optional<double>> deltas(finite.begin(), finite.end());
  if (unrestricted) deltas.push_back(std::nullopt);

  std::vector<std::vector<CsvRecord>> per_n(ns.size());
  detail::parallel_for(ns.size(), config.workers, [&](std::size_t idx) {
    const TrotterLab lab(build_model(config.model, ns[idx], config.nu, config.j0, config.dim_cap));
    auto& rows = per_n[idx];
    for (int p : ps) {
      const auto plan = suzuki_plan(p, lab.gamma_count());
      for (double t : ts) {
        for (const auto& delta : deltas) {
          CsvRecord r;
          r.model = config.model;
          r.num_sites = ns[idx];
          r.p = p;
          r.gamma = lab.gamma_count();
          r.t = t;
          if (delta) {
            r.delta = format_double(*delta);
            r.error_kind = to_string(ErrorKind::projected);
            r.error_value = lab.projected_error(plan, t, *delta);
            if (config.bounds) {
              const auto in = inputs_for(lab, plan, t, *delta, config.eps_small);
              const auto cor = cor_s4_bound(in);
              const auto thm = thm_s3_bound(in);
              r.bound_cor_s4 = cor.bound_value;
              r.bound_thm_s3 = thm.bound_value;
              r.delta_prime = cor.delta_prime;
              r.p0 = thm.p0;
              r.time_condition_ok = cor.time_condition_ok;
              r.formula_id = to_string(FormulaId::cor_s4);
            }
          } else {
            r.delta = "inf";
            r.error_kind = to_string(ErrorKind::full);
            r.error_value = lab.full_error(plan, t);
          }
          rows.push_back(std::move(r));
        }
      }
    }
  });
  std::vector<CsvRecord> out;
  for (auto& rows : per_n) out.insert(out.end(), rows.begin(), rows.end());
  return out;
}

/// Writes `content` to `path` via a temporary file; nothing is left behind on failure.
inline void write_file_atomically(const std::string& path, const std::string& content) {
  const std::filesystem::path target(path);
  const std::filesystem::path tmp = target.string() + ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) {
      out.close();
      std::filesystem::remove(tmp);
      throw Error("failed writing '" + tmp.string() + "'");
    }
  }
  std::filesystem::rename(tmp, target);
}

}  // namespace lowtrot
