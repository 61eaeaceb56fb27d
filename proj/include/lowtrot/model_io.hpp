#pragma once

// JSON model dump:
//   {"model_tag": str, "N": int, "local_dim": int,
//    "terms": [{"support": [int...], "block_real": [[...]...], "block_imag": [[...]...]}...],
//    "partition": [int...]}
// Blocks are row-major nested arrays. Numbers are written as the shortest
// decimal that round-trips to the same double, so dump(parse(dump(x))) is
// byte-identical to dump(x).

#include "lowtrot/lattice.hpp"

#include "json.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace lowtrot {

inline nlohmann::json model_to_json(const HamiltonianSpec& spec) {
  nlohmann::json j;
  j["model_tag"] = spec.model_tag();
  j["N"] = spec.num_sites();
  j["local_dim"] = spec.lattice().local_dim();
  auto terms = nlohmann::json::array();
  for (const auto& term : spec.terms()) {
    nlohmann::json t;
    t["support"] = term.support();
    auto re = nlohmann::json::array();
    auto im = nlohmann::json::array();
    for (Eigen::Index r = 0; r < term.block().rows(); ++r) {
      std::vector<double> row_re, row_im;
      for (Eigen::Index c = 0; c < term.block().cols(); ++c) {
        row_re.push_back(term.block()(r, c).real());
        row_im.push_back(term.block()(r, c).imag());
      }
      re.push_back(row_re);
      im.push_back(row_im);
    }
    t["block_real"] = std::move(re);
    t["block_imag"] = std::move(im);
    terms.push_back(std::move(t));
  }
  j["terms"] = std::move(terms);
  j["partition"] = spec.partition();
  return j;
}

inline std::string dump_model(const HamiltonianSpec& spec) {
  return model_to_json(spec).dump(1) + "\n";
}

inline HamiltonianSpec model_from_json(const nlohmann::json& j,
                                       std::size_t dim_cap = kDefaultDimensionCap) {
  try {
    const int n = j.at("N").get<int>();
    const int d = j.at("local_dim").get<int>();
    LatticeSpec lattice(n, d, dim_cap);
    std::vector<LocalTerm> terms;
    int locality = 1;
    for (const auto& t : j.at("terms")) {
      auto support = t.at("support").get<std::vector<int>>();
      const auto re = t.at("block_real").get<std::vector<std::vector<double>>>();
      const auto im = t.at("block_imag").get<std::vector<std::vector<double>>>();
      const auto rows = static_cast<Eigen::Index>(re.size());
      if (im.size() != re.size()) throw Error("model json: block_real/block_imag shape mismatch");
      Matrix block(rows, rows);
      for (Eigen::Index r = 0; r < rows; ++r) {
        const auto& rr = re[static_cast<std::size_t>(r)];
        const auto& ri = im[static_cast<std::size_t>(r)];
        if (static_cast<Eigen::Index>(rr.size()) != rows || ri.size() != rr.size()) {
          throw Error("model json: block is not square");
        }
        for (Eigen::Index c = 0; c < rows; ++c) {
          block(r, c) = cplx(rr[static_cast<std::size_t>(c)], ri[static_cast<std::size_t>(c)]);
        }
      }
      locality = std::max(locality, static_cast<int>(support.size()));
      terms.emplace_back(std::move(support), std::move(block));
    }
    auto partition = j.at("partition").get<std::vector<int>>();
    return HamiltonianSpec(lattice, std::move(terms), std::move(partition), locality,
                           j.at("model_tag").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("model json: ") + e.what());
  }
}

inline HamiltonianSpec parse_model(const std::string& text,
                                   std::size_t dim_cap = kDefaultDimensionCap) {
  try {
    return model_from_json(nlohmann::json::parse(text), dim_cap);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("model json: ") + e.what());
  }
}

}  // namespace lowtrot
