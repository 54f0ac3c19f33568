// Copyright 2026 The schur-stream Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Young labels and Young's lattice.
//
// A Partition is always stored padded to exactly d rows, so every row index
// j in [0, d) can be addressed by add_box. Dimensions of the symmetric-group
// and unitary-group irreps are computed in exact integer arithmetic.

#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "schur/common.hpp"

namespace schur {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

namespace detail {

inline std::vector<int> parse_int_list(std::string_view text) {
  std::vector<int> out;
  std::string item;
  std::stringstream ss{std::string(text)};
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    int value = 0;
    try {
      value = std::stoi(item, &pos);
    } catch (const std::exception&) {
      throw ValidationError("not an integer: '" + item + "'");
    }
    while (pos < item.size() && item[pos] == ' ') ++pos;
    if (pos != item.size()) {
      throw ValidationError("not an integer: '" + item + "'");
    }
    out.push_back(value);
  }
  return out;
}

inline std::string join_ints(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out;
}

}  // namespace detail

/// Young label with exactly d rows (trailing zeros explicit).
class Partition {
 public:
  Partition() = default;

  explicit Partition(std::vector<int> parts) : parts_(std::move(parts)) {
    if (parts_.size() < 2) {
      throw ValidationError("a partition needs d >= 2 rows");
    }
    for (std::size_t i = 0; i < parts_.size(); ++i) {
      if (parts_[i] < 0) throw ValidationError("negative row length");
      if (i > 0 && parts_[i] > parts_[i - 1]) {
        throw ValidationError("rows must be non-increasing: " + to_string());
      }
      n_ += parts_[i];
    }
  }

  /// Parses "3,1" and pads with zeros up to d rows.
  static Partition parse(std::string_view text, int d) {
    auto parts = detail::parse_int_list(text);
    if (static_cast<int>(parts.size()) > d) {
      // Trailing zeros beyond d are tolerated.
      for (std::size_t i = d; i < parts.size(); ++i) {
        if (parts[i] != 0) {
          throw ValidationError("partition '" + std::string(text) +
                                "' has more than d=" + std::to_string(d) +
                                " rows");
        }
      }
      parts.resize(d);
    }
    parts.resize(d, 0);
    return Partition(std::move(parts));
  }

  /// The single-box partition (1, 0, ..., 0).
  static Partition unit(int d) {
    std::vector<int> parts(d, 0);
    parts[0] = 1;
    return Partition(std::move(parts));
  }

  static Partition empty(int d) { return Partition(std::vector<int>(d, 0)); }

  int d() const { return static_cast<int>(parts_.size()); }
  int n() const { return n_; }
  int operator[](std::size_t i) const { return parts_[i]; }
  const std::vector<int>& parts() const { return parts_; }

  std::string to_string() const { return detail::join_ints(parts_); }

  auto operator<=>(const Partition&) const = default;
  bool operator==(const Partition&) const = default;

 private:
  std::vector<int> parts_;
  int n_ = 0;
};

inline bool can_add_box(const Partition& lambda, int j) {
  if (j < 0 || j >= lambda.d()) return false;
  return j == 0 || lambda[j - 1] > lambda[j];
}

/// lambda + e_j, or nullopt when the result would not be non-increasing.
inline std::optional<Partition> add_box(const Partition& lambda, int j) {
  if (j < 0 || j >= lambda.d()) {
    throw ValidationError("row index " + std::to_string(j) +
                          " out of range for d=" + std::to_string(lambda.d()));
  }
  if (!can_add_box(lambda, j)) return std::nullopt;
  auto parts = lambda.parts();
  ++parts[j];
  return Partition(std::move(parts));
}

/// All partitions of n with at most d rows, in descending lexicographic
/// order: (n,0,...) first.
inline std::vector<Partition> partitions_of(int n, int d) {
  std::vector<Partition> out;
  std::vector<int> parts(d, 0);
  auto rec = [&](auto&& self, int row, int remaining, int cap) -> void {
    if (row == d) {
      if (remaining == 0) out.emplace_back(parts);
      return;
    }
    for (int v = std::min(cap, remaining); v >= 0; --v) {
      // Remaining rows can hold at most v each.
      if (static_cast<long>(v) * (d - row) < remaining) break;
      parts[row] = v;
      self(self, row + 1, remaining - v, v);
    }
    parts[row] = 0;
  };
  rec(rec, 0, n, n);
  return out;
}

/// Number of standard Young tableaux of shape lambda (hook-length formula).
inline BigInt dim_symmetric(const Partition& lambda) {
  if (lambda.n() < 1) throw ValidationError("dim_symmetric needs n >= 1");
  BigInt numerator = 1;
  for (int k = 2; k <= lambda.n(); ++k) numerator *= k;
  BigInt hooks = 1;
  for (int i = 0; i < lambda.d(); ++i) {
    for (int c = 0; c < lambda[i]; ++c) {
      int below = 0;
      for (int r = i + 1; r < lambda.d() && lambda[r] > c; ++r) ++below;
      hooks *= (lambda[i] - c - 1) + below + 1;
    }
  }
  return numerator / hooks;
}

/// Dimension of the U(d) irrep with highest weight lambda (Weyl dimension
/// formula: prod_{i<j} (l_i - l_j + j - i) / (j - i)).
inline BigInt dim_unitary(const Partition& lambda) {
  BigInt num = 1;
  BigInt den = 1;
  const int d = lambda.d();
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      num *= lambda[i] - lambda[j] + j - i;
      den *= j - i;
    }
  }
  return num / den;
}

/// Narrowing helper; throws LimitError beyond 64 bits.
inline std::uint64_t to_u64(const BigInt& v) {
  if (v < 0 || v > std::numeric_limits<std::uint64_t>::max()) {
    throw LimitError("integer " + v.str() + " does not fit in 64 bits");
  }
  return v.convert_to<std::uint64_t>();
}

inline std::size_t dim_unitary_size(const Partition& lambda) {
  return static_cast<std::size_t>(to_u64(dim_unitary(lambda)));
}

/// Weight of lambda under the maximally mixed state:
/// dim P_lambda * dim Q_lambda / d^n.
inline Rational schur_weyl_weight(const Partition& lambda) {
  BigInt total = 1;
  for (int k = 0; k < lambda.n(); ++k) total *= lambda.d();
  BigInt count = lambda.n() == 0 ? BigInt(1) : dim_symmetric(lambda);
  return Rational(count * dim_unitary(lambda), total);
}

/// A walk in Young's lattice from (1,0,...) adding one box per step.
class LatticePath {
 public:
  LatticePath() = default;
  LatticePath(int d, std::vector<int> steps) : d_(d), steps_(std::move(steps)) {
    // Validates by replaying.
    end_ = Partition::unit(d_);
    for (int j : steps_) {
      auto next = add_box(end_, j);
      if (!next) {
        throw ValidationError("invalid lattice path step " +
                              std::to_string(j) + " at " + end_.to_string());
      }
      end_ = *next;
    }
  }

  static LatticePath parse(std::string_view text, int d) {
    if (text.empty()) return LatticePath(d, {});
    return LatticePath(d, detail::parse_int_list(text));
  }

  int d() const { return d_; }
  const std::vector<int>& steps() const { return steps_; }
  const Partition& end() const { return end_; }

  /// lambda^1, lambda^2, ..., lambda^n.
  std::vector<Partition> partitions() const {
    std::vector<Partition> out{Partition::unit(d_)};
    for (int j : steps_) out.push_back(*add_box(out.back(), j));
    return out;
  }

  LatticePath extended(int j) const {
    LatticePath out = *this;
    auto next = add_box(end_, j);
    if (!next) throw ValidationError("invalid lattice path extension");
    out.steps_.push_back(j);
    out.end_ = *next;
    return out;
  }

  std::string to_string() const { return detail::join_ints(steps_); }

  auto operator<=>(const LatticePath& o) const { return steps_ <=> o.steps_; }
  bool operator==(const LatticePath& o) const { return steps_ == o.steps_; }

 private:
  int d_ = 2;
  std::vector<int> steps_;
  Partition end_ = Partition::unit(2);
};

inline bool contains(const Partition& outer, const Partition& inner) {
  for (int i = 0; i < outer.d(); ++i) {
    if (inner[i] > outer[i]) return false;
  }
  return true;
}

/// All lattice paths from (1,0,...) to lambda, steps ascending per level.
/// The list has dim_symmetric(lambda) entries; memory grows accordingly.
inline std::vector<LatticePath> enumerate_paths(const Partition& lambda) {
  if (lambda.n() < 1) throw ValidationError("enumerate_paths needs n >= 1");
  std::vector<LatticePath> out;
  std::vector<int> steps;
  const int d = lambda.d();
  auto rec = [&](auto&& self, const Partition& mu) -> void {
    if (mu.n() == lambda.n()) {
      out.emplace_back(d, steps);
      return;
    }
    for (int j = 0; j < d; ++j) {
      if (!can_add_box(mu, j) || mu[j] >= lambda[j]) continue;
      steps.push_back(j);
      self(self, *add_box(mu, j));
      steps.pop_back();
    }
  };
  rec(rec, Partition::unit(d));
  return out;
}

/// Number of lattice paths from mu up to lambda (skew standard tableaux).
inline BigInt count_paths_between(const Partition& mu, const Partition& lambda) {
  if (!contains(lambda, mu)) return 0;
  std::map<Partition, BigInt> memo;
  auto rec = [&](auto&& self, const Partition& cur) -> BigInt {
    if (cur.n() == lambda.n()) return cur == lambda ? 1 : 0;
    auto it = memo.find(cur);
    if (it != memo.end()) return it->second;
    BigInt total = 0;
    for (int j = 0; j < cur.d(); ++j) {
      if (!can_add_box(cur, j) || cur[j] >= lambda[j]) continue;
      total += self(self, *add_box(cur, j));
    }
    memo.emplace(cur, total);
    return total;
  };
  return rec(rec, mu);
}

/// Position of a path in the enumerate_paths order of its end partition;
/// this is the multiplicity label p_lambda.
inline BigInt path_index(const LatticePath& path) {
  const Partition& target = path.end();
  BigInt rank = 0;
  Partition cur = Partition::unit(path.d());
  for (int j : path.steps()) {
    for (int smaller = 0; smaller < j; ++smaller) {
      if (!can_add_box(cur, smaller)) continue;
      rank += count_paths_between(*add_box(cur, smaller), target);
    }
    cur = *add_box(cur, j);
  }
  return rank;
}

}  // namespace schur
