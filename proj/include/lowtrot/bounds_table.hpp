#pragma once

// Batch evaluation of the closed-form bounds from an inputs CSV.
//
// Input: a header row naming columns, then one row per input tuple.
//   required: N,k,g,Gamma,p,delta,t,eps_total,eps_small
//   optional: c_p (default from p), c_conc (default 1), energy_expect, q (default 1)
// Output: rows in the sweep schema with model "bounds". For each input row,
// in order: thm_s3, cor_s4, thm_s1, prop_s5_const, prop_s5_general and, when
// energy_expect is given, weakly_corr. error_kind is "bound"; error_value is
// the bound value, or the Trotter number r for the Trotter-number formulas.

#include "lowtrot/bounds.hpp"
#include "lowtrot/csv.hpp"

#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace lowtrot {

struct BoundsTableResult {
  std::vector<CsvRecord> rows;
  std::vector<std::string> diagnostics;  // one per rejected input row
};

inline std::vector<CsvRecord> bound_rows(const BoundInputs& in) {
  auto base = [&](FormulaId id) {
    CsvRecord r;
    r.model = "bounds";
    r.num_sites = in.num_sites;
    r.p = in.p;
    r.gamma = in.gamma;
    r.t = in.t;
    r.delta = format_double(in.delta);
    r.error_kind = "bound";
    r.formula_id = to_string(id);
    return r;
  };
  std::vector<CsvRecord> out;
  const auto thm = thm_s3_bound(in);
  const auto cor = cor_s4_bound(in);
  {
    auto r = base(FormulaId::thm_s3);
    r.error_value = thm.bound_value;
    r.bound_thm_s3 = thm.bound_value;
    r.delta_prime = thm.delta_prime;
    r.p0 = thm.p0;
    r.time_condition_ok = thm.time_condition_ok;
    out.push_back(std::move(r));
  }
  {
    auto r = base(FormulaId::cor_s4);
    r.error_value = cor.bound_value;
    r.bound_cor_s4 = cor.bound_value;
    r.delta_prime = cor.delta_prime;
    r.time_condition_ok = cor.time_condition_ok;
    out.push_back(std::move(r));
  }
  {
    auto r = base(FormulaId::thm_s1);
    r.error_value = thm_s1_rhs(in.q, in.k, in.g, in.delta);
    out.push_back(std::move(r));
  }
  for (auto regime : {TrotterRegime::const_gamma, TrotterRegime::general}) {
    const auto est = prop_s5_number(in, regime);
    auto r = base(est.formula);
    r.error_value = static_cast<double>(est.r);
    out.push_back(std::move(r));
  }
  if (in.energy_expect) {
    const auto wc = weakly_correlated_number(in);
    auto r = base(FormulaId::weakly_corr);
    r.error_value = static_cast<double>(wc.estimate.r);
    r.delta_prime = wc.effective_delta;
    out.push_back(std::move(r));
  }
  return out;
}

inline BoundsTableResult run_bounds(const std::string& text) {
  BoundsTableResult result;
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> header;
  int line_no = 0;
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      const auto b = cell.find_first_not_of(" \t\r");
      const auto e = cell.find_last_not_of(" \t\r");
      cells.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
    }
    if (!s.empty() && s.back() == ',') cells.emplace_back();
    return cells;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos || line[0] == '#') continue;
    if (header.empty()) {
      header = split(line);
      for (const char* required :
           {"N", "k", "g", "Gamma", "p", "delta", "t", "eps_total", "eps_small"}) {
        if (std::find(header.begin(), header.end(), required) == header.end()) {
          throw Error("bounds input: header lacks required column '" + std::string(required) + "'");
        }
      }
      continue;
    }
    const auto cells = split(line);
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (cells.size() != header.size()) {
      result.diagnostics.push_back(where + "expected " + std::to_string(header.size()) +
                                   " cells, got " + std::to_string(cells.size()));
      continue;
    }
    std::map<std::string, std::string> row;
    for (std::size_t i = 0; i < header.size(); ++i) row[header[i]] = cells[i];
    try {
      auto num = [&](const std::string& key) {
        const std::string& s = row.at(key);
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument("column " + key + ": '" + s + "'");
        return v;
      };
      auto integer = [&](const std::string& key) {
        const double v = num(key);
        if (v != std::floor(v)) throw std::invalid_argument("column " + key + " must be an integer");
        return static_cast<long long>(v);
      };
      auto present = [&](const std::string& key) { return row.count(key) && !row[key].empty(); };
      BoundInputs b;
      b.num_sites = integer("N");
      b.k = static_cast<int>(integer("k"));
      b.g = num("g");
      b.gamma = static_cast<int>(integer("Gamma"));
      b.p = static_cast<int>(integer("p"));
      b.delta = num("delta");
      b.t = num("t");
      b.eps_total = num("eps_total");
      b.eps_small = num("eps_small");
      if (present("c_p")) {
        b.c_p = static_cast<int>(integer("c_p"));
      } else {
        if (b.p < 1 || (b.p > 1 && b.p % 2 != 0) || b.p > 6) {
          throw std::invalid_argument("p must be 1, 2, 4 or 6 unless c_p is given");
        }
        b.c_p = suzuki_stage_multiplier(b.p);
      }
      if (present("c_conc")) b.c_conc = num("c_conc");
      if (present("energy_expect")) b.energy_expect = num("energy_expect");
      if (present("q")) b.q = static_cast<int>(integer("q"));
      const auto issues = input_issues(b);
      if (!issues.empty()) {
        std::string msg = where;
        for (std::size_t i = 0; i < issues.size(); ++i) msg += (i ? "; " : "") + issues[i];
        result.diagnostics.push_back(msg);
        continue;
      }
      auto rows = bound_rows(b);
      result.rows.insert(result.rows.end(), rows.begin(), rows.end());
    } catch (const std::exception& e) {
      result.diagnostics.push_back(where + e.what());
    }
  }
  if (header.empty()) throw Error("bounds input: no header row");
  return result;
}

}  // namespace lowtrot
