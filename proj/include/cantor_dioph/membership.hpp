#pragma once

// Exact membership in the attractor through the finite preimage graph on a
// fixed-denominator fiber: x -> q_i x - p_i, kept while inside the hull.

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "cantor_dioph/budget.hpp"
#include "cantor_dioph/codings.hpp"
#include "cantor_dioph/ifs.hpp"

namespace cantor_dioph {

/// Nodes are the integers P with P/q in the hull, indexed from first().
class FiberGraph {
 public:
  /// Throws BudgetExceeded when q exceeds budget.max_fiber_denominator.
  FiberGraph(const RationalIFS& ifs, std::int64_t q, const Budget& budget = {});

  std::int64_t denominator() const { return q_; }
  std::int64_t first() const { return first_; }
  std::size_t size() const { return n_; }
  std::size_t branches() const { return m_; }

  bool in_range(std::int64_t numerator) const {
    return numerator >= first_ && numerator < first_ + static_cast<std::int64_t>(n_);
  }
  std::size_t index(std::int64_t numerator) const { return static_cast<std::size_t>(numerator - first_); }
  std::int64_t numerator(std::size_t node) const { return first_ + static_cast<std::int64_t>(node); }

  /// Node reached by the preimage under branch i, or -1.
  std::int32_t target(std::size_t node, std::size_t branch) const { return edges_[node * m_ + branch]; }

  bool alive(std::size_t node) const { return alive_[scc_[node]] != 0; }
  /// True when the node lies on a directed cycle.
  bool cyclic(std::size_t node) const { return cyclic_[scc_[node]] != 0; }
  std::int32_t scc(std::size_t node) const { return scc_[node]; }

 private:
  std::int64_t q_;
  std::int64_t first_ = 0;
  std::size_t n_ = 0;
  std::size_t m_;
  std::vector<std::int32_t> edges_;
  std::vector<std::int32_t> scc_;
  std::vector<std::uint8_t> cyclic_;
  std::vector<std::uint8_t> alive_;
};

/// Thread-safe memo of fiber graphs keyed by (ifs, q). Cleared wholesale once
/// the stored node total passes `max_nodes`.
class FiberCache {
 public:
  explicit FiberCache(std::size_t max_nodes = std::size_t{1} << 24) : max_nodes_(max_nodes) {}
  std::shared_ptr<const FiberGraph> get(const RationalIFS& ifs, std::int64_t q, const Budget& budget = {});
  static FiberCache& global();

 private:
  std::mutex mu_;
  std::map<std::pair<std::string, std::int64_t>, std::shared_ptr<const FiberGraph>> graphs_;
  std::size_t nodes_ = 0;
  std::size_t max_nodes_;
};

struct MembershipResult {
  bool member = false;
  /// Canonical coding with project(witness) = r when member.
  std::optional<Coding> witness;
};

MembershipResult is_member(const RationalIFS& ifs, const ExactRational& r, const Budget& budget = {});

/// Non-torus: every p with gcd(p,q)=1 and p/q in the attractor. Torus: every
/// 0 <= p < q with gcd(p,q)=1 such that p/q + t is in the attractor for some
/// integer t. Sorted ascending.
std::vector<std::int64_t> members_for_denominator(const RationalIFS& ifs, std::int64_t q, bool torus,
                                                  const Budget& budget = {});
/// Same, reading an already built graph.
std::vector<std::int64_t> members_for_denominator(const FiberGraph& g, bool torus);

struct Representation {
  std::size_t preperiod_len = 0;
  std::size_t period_len = 0;
  /// Exact h_int.
  BigInt value;
  Coding coding;
};

/// Exact minimizer of the raw intrinsic height over all codings of r, or
/// nothing when r is not in the attractor.
std::optional<Representation> minimal_representation(const RationalIFS& ifs, const ExactRational& r,
                                                     const Budget& budget = {});

}  // namespace cantor_dioph
