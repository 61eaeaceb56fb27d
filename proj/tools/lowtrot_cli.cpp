// lowtrot: sweep / verify / bounds / dump-model front end.
// Exit codes: 0 success, 1 check failure or runtime error, 2 usage error.

#include "lowtrot/bounds_table.hpp"
#include "lowtrot/model_io.hpp"
#include "lowtrot/sweep.hpp"
#include "lowtrot/verify.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

constexpr int kUsageError = 2;

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw lowtrot::ConfigError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& content, const std::optional<std::string>& out) {
  if (out) {
    lowtrot::write_file_atomically(*out, content);
  } else {
    std::cout << content;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-energy Trotter error laboratory"};
  app.require_subcommand(1);

  std::optional<std::string> out;
  std::optional<int> workers;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> cap;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", out, "Output path (stdout when omitted)");
    sub->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "Random seed");
    sub->add_option("--cap", cap, "Hilbert dimension cap")->check(CLI::PositiveNumber);
  };

  auto* sweep = app.add_subcommand("sweep", "Run an error sweep from a config file");
  std::string config_path;
  sweep->add_option("config", config_path, "Sweep config file")->required();
  add_common(sweep);

  auto* verify = app.add_subcommand("verify", "Run the invariant battery");
  bool inject_fault = false;
  verify->add_flag("--inject-fault", inject_fault,
                   "Flip one product-formula coefficient sign in the order checks");
  add_common(verify);

  auto* bounds = app.add_subcommand("bounds", "Evaluate closed-form bounds for an inputs CSV");
  std::string inputs_path;
  bounds->add_option("inputs", inputs_path, "Inputs CSV")->required();
  add_common(bounds);

  auto* dump = app.add_subcommand("dump-model", "Write a model as JSON");
  std::string model;
  int n = 0;
  double nu = 2.0;
  double j0 = 1.0;
  std::optional<std::string> operator_out;
  dump->add_option("--model", model, "aklt | mg | lr_heisenberg")
      ->required()
      ->check(CLI::IsMember({"aklt", "mg", "lr_heisenberg"}));
  dump->add_option("--n", n, "Number of sites")->required();
  dump->add_option("--nu", nu, "Long-range decay exponent");
  dump->add_option("--j0", j0, "Long-range base coupling");
  dump->add_option("--operator-out", operator_out, "Also write the assembled H in binary form");
  add_common(dump);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (sweep->parsed()) {
      auto config = lowtrot::parse_sweep_config(read_text(config_path));
      if (out) config.output_path = *out;
      if (workers) config.workers = *workers;
      if (seed) config.seed = *seed;
      if (cap) config.dim_cap = *cap;
      lowtrot::validate_config(config);
      const auto rows = lowtrot::run_sweep(config);
      lowtrot::write_file_atomically(config.output_path, lowtrot::to_csv(rows));
      std::cerr << "wrote " << rows.size() << " rows to " << config.output_path << "\n";
      return 0;
    }
    if (verify->parsed()) {
      lowtrot::VerifyOptions options;
      options.inject_fault = inject_fault;
      if (workers) options.workers = *workers;
      if (seed) options.seed = *seed;
      if (cap) options.dim_cap = *cap;
      const auto rows = lowtrot::run_verify(options);
      emit(lowtrot::verify_csv(rows), out);
      for (const auto& r : rows) {
        if (!r.passed) std::cerr << "FAIL " << r.id << ": " << r.detail << "\n";
      }
      return lowtrot::all_passed(rows) ? 0 : 1;
    }
    if (bounds->parsed()) {
      const auto result = lowtrot::run_bounds(read_text(inputs_path));
      emit(lowtrot::to_csv(result.rows), out);
      for (const auto& d : result.diagnostics) std::cerr << "rejected " << d << "\n";
      return result.diagnostics.empty() ? 0 : 1;
    }
    if (dump->parsed()) {
      const auto spec =
          lowtrot::build_model(model, n, nu, j0, cap.value_or(lowtrot::kDefaultDimensionCap));
      emit(lowtrot::dump_model(spec), out);
      if (operator_out) {
        std::ofstream bin(*operator_out, std::ios::binary | std::ios::trunc);
        if (!bin) throw lowtrot::Error("cannot open '" + *operator_out + "'");
        lowtrot::write_operator_binary(bin, lowtrot::assemble(spec).hamiltonian);
      }
      return 0;
    }
  } catch (const lowtrot::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const lowtrot::DimensionCapError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kUsageError;
}
