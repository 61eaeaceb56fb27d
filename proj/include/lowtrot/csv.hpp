#pragma once

// Result rows shared by the sweep and bounds commands.

#include <array>
#include <charconv>
#include <cmath>
#include <optional>
#include <string>
#include <system_error>
#include <vector>

namespace lowtrot {

inline constexpr const char* kCsvHeader =
    "model,N,p,Gamma,t,delta,error_kind,error_value,bound_cor_s4,bound_thm_s3,delta_prime,p0,"
    "time_condition_ok,formula_id";

/// Shortest decimal that round-trips to the same double; "inf"/"-inf"/"nan".
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) return "nan";
  return std::string(buf.data(), ptr);
}

struct CsvRecord {
  std::string model;
  std::optional<long long> num_sites;
  std::optional<int> p;
  std::optional<int> gamma;
  std::optional<double> t;
  std::string delta;  // number, or "inf" for unrestricted
  std::string error_kind;
  std::optional<double> error_value;
  std::optional<double> bound_cor_s4;
  std::optional<double> bound_thm_s3;
  std::optional<double> delta_prime;
  std::optional<int> p0;
  std::optional<bool> time_condition_ok;
  std::string formula_id;

  std::string to_line() const {
    std::string out;
    auto cell = [&out](const std::string& s) {
      out += s;
      out += ',';
    };
    auto num = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
    cell(model);
    cell(num_sites ? std::to_string(*num_sites) : "");
    cell(p ? std::to_string(*p) : "");
    cell(gamma ? std::to_string(*gamma) : "");
    cell(num(t));
    cell(delta);
    cell(error_kind);
    cell(num(error_value));
    cell(num(bound_cor_s4));
    cell(num(bound_thm_s3));
    cell(num(delta_prime));
    cell(p0 ? std::to_string(*p0) : "");
    cell(time_condition_ok ? (*time_condition_ok ? "true" : "false") : "");
    out += formula_id;
    return out;
  }
};

inline std::string to_csv(const std::vector<CsvRecord>& rows) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& r : rows) {
    out += r.to_line();
    out += '\n';
  }
  return out;
}

}  // namespace lowtrot
