#pragma once

// Tensor-product embedding of a local block into a larger register.
//
// Site ordering is big-endian: the first site of the register is the most
// significant tensor factor, so basis index = sum_i digit_i * d^(n-1-i).

#include "lowtrot/core.hpp"

#include <algorithm>
#include <span>
#include <vector>

namespace lowtrot {

namespace detail {

inline std::size_t ipow(std::size_t base, std::size_t exp) {
  std::size_t r = 1;
  while (exp-- > 0) r *= base;
  return r;
}

}  // namespace detail

/// Embeds `block` (acting on `support`, in the order given) into the register
/// `sites`, acting as identity on every register site outside `support`.
/// Every support site must appear in `sites`.
inline Matrix embed_block(const Matrix& block, std::span<const int> support,
                          std::span<const int> sites, int local_dim) {
  const auto d = static_cast<std::size_t>(local_dim);
  const std::size_t n = sites.size();
  const std::size_t s = support.size();
  const std::size_t local = detail::ipow(d, s);
  if (static_cast<std::size_t>(block.rows()) != local ||
      static_cast<std::size_t>(block.cols()) != local) {
    throw Error("embed_block: block dimension does not match support size");
  }
  const std::size_t full = detail::ipow(d, n);

  // stride of each support site inside the register
  std::vector<std::size_t> stride(s);
  for (std::size_t j = 0; j < s; ++j) {
    auto it = std::find(sites.begin(), sites.end(), support[j]);
    if (it == sites.end()) throw Error("embed_block: support site outside register");
    const auto pos = static_cast<std::size_t>(it - sites.begin());
    stride[j] = detail::ipow(d, n - 1 - pos);
  }
  // register offset contributed by each local basis state
  std::vector<std::size_t> offset(local, 0);
  for (std::size_t l = 0; l < local; ++l) {
    std::size_t rem = l;
    for (std::size_t j = s; j-- > 0;) {
      offset[l] += (rem % d) * stride[j];
      rem /= d;
    }
  }

  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(full), static_cast<Eigen::Index>(full));
  for (std::size_t col = 0; col < full; ++col) {
    std::size_t lc = 0;
    std::size_t base = col;
    for (std::size_t j = 0; j < s; ++j) {
      const std::size_t digit = (col / stride[j]) % d;
      lc = lc * d + digit;
      base -= digit * stride[j];
    }
    for (std::size_t lr = 0; lr < local; ++lr) {
      const cplx v = block(static_cast<Eigen::Index>(lr), static_cast<Eigen::Index>(lc));
      if (v != cplx(0.0, 0.0)) {
        out(static_cast<Eigen::Index>(base + offset[lr]), static_cast<Eigen::Index>(col)) = v;
      }
    }
  }
  return out;
}

/// Sorted union of two sorted site lists.
inline std::vector<int> site_union(std::span<const int> a, std::span<const int> b) {
  std::vector<int> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline bool sites_intersect(std::span<const int> a, std::span<const int> b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i == *j) return true;
    if (*i < *j) ++i; else ++j;
  }
  return false;
}

}  // namespace lowtrot
