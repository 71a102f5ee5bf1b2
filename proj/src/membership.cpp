#include "cantor_dioph/membership.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <queue>
#include <stdexcept>

namespace cantor_dioph {

namespace {

std::int64_t floor_mul(const ExactRational& x, std::int64_t q) { return big_to_i64((x * ExactRational(q)).floor()); }
std::int64_t ceil_mul(const ExactRational& x, std::int64_t q) { return big_to_i64((x * ExactRational(q)).ceil()); }

}  // namespace

FiberGraph::FiberGraph(const RationalIFS& ifs, std::int64_t q, const Budget& budget) : q_(q), m_(ifs.size()) {
  if (q < 1) throw std::invalid_argument("fiber denominator must be >= 1");
  if (static_cast<std::uint64_t>(q) > budget.max_fiber_denominator) {
    throw BudgetExceeded("fiber denominator " + std::to_string(q) + " exceeds max_fiber_denominator=" +
                         std::to_string(budget.max_fiber_denominator));
  }
  const Interval h = hull(ifs);
  first_ = ceil_mul(h.lo, q);
  const std::int64_t last = floor_mul(h.hi, q);
  n_ = last >= first_ ? static_cast<std::size_t>(last - first_ + 1) : 0;
  if (n_ > static_cast<std::size_t>(std::numeric_limits<std::int32_t>::max())) {
    throw BudgetExceeded("fiber graph too large");
  }

  edges_.assign(n_ * m_, -1);
  for (std::size_t i = 0; i < m_; ++i) {
    const auto& br = ifs.branch(i);
    const __int128 shift = static_cast<__int128>(br.p) * q;
    for (std::size_t v = 0; v < n_; ++v) {
      // Same denominator q on both sides, so the target never has a larger height.
      const __int128 t = static_cast<__int128>(br.q) * numerator(v) - shift;
      if (t >= first_ && t <= last) edges_[v * m_ + i] = static_cast<std::int32_t>(t - first_);
    }
  }

  // Iterative Tarjan; components are completed sinks first, so every
  // successor component is already classified when a component closes.
  scc_.assign(n_, -1);
  std::vector<std::int32_t> low(n_), order(n_, -1);
  std::vector<std::uint8_t> on_stack(n_, 0);
  std::vector<std::int32_t> stack;
  std::vector<std::pair<std::int32_t, std::size_t>> call;
  std::int32_t counter = 0, comps = 0;
  for (std::size_t root = 0; root < n_; ++root) {
    if (order[root] >= 0) continue;
    call.push_back({static_cast<std::int32_t>(root), 0});
    order[root] = low[root] = counter++;
    stack.push_back(static_cast<std::int32_t>(root));
    on_stack[root] = 1;
    while (!call.empty()) {
      auto& [v, next] = call.back();
      if (next < m_) {
        const std::int32_t w = edges_[static_cast<std::size_t>(v) * m_ + next++];
        if (w < 0) continue;
        if (order[w] < 0) {
          order[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], order[w]);
        }
        continue;
      }
      const std::int32_t done = v;
      call.pop_back();
      if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
      if (low[done] != order[done]) continue;
      const std::int32_t id = comps++;
      std::vector<std::int32_t> members;
      for (;;) {
        const std::int32_t w = stack.back();
        stack.pop_back();
        on_stack[w] = 0;
        scc_[w] = id;
        members.push_back(w);
        if (w == done) break;
      }
      bool cyc = members.size() > 1;
      bool live = false;
      for (auto w : members) {
        for (std::size_t i = 0; i < m_; ++i) {
          const std::int32_t t = edges_[static_cast<std::size_t>(w) * m_ + i];
          if (t < 0) continue;
          if (scc_[t] == id) {
            cyc = true;
          } else if (alive_[scc_[t]]) {
            live = true;
          }
        }
      }
      cyclic_.push_back(cyc ? 1 : 0);
      alive_.push_back(cyc || live ? 1 : 0);
    }
  }
}

FiberCache& FiberCache::global() {
  static FiberCache cache;
  return cache;
}

std::shared_ptr<const FiberGraph> FiberCache::get(const RationalIFS& ifs, std::int64_t q, const Budget& budget) {
  auto key = std::make_pair(ifs.key(), q);
  {
    std::lock_guard lock(mu_);
    if (auto it = graphs_.find(key); it != graphs_.end()) return it->second;
  }
  auto g = std::make_shared<const FiberGraph>(ifs, q, budget);
  std::lock_guard lock(mu_);
  if (auto it = graphs_.find(key); it != graphs_.end()) return it->second;
  if (nodes_ + g->size() > max_nodes_) {
    graphs_.clear();
    nodes_ = 0;
  }
  nodes_ += g->size();
  graphs_.emplace(std::move(key), g);
  return g;
}

MembershipResult is_member(const RationalIFS& ifs, const ExactRational& r, const Budget& budget) {
  const Interval h = hull(ifs);
  if (!h.contains(r)) return {};
  const std::int64_t q = big_to_i64(r.denominator());
  const auto g = FiberCache::global().get(ifs, q, budget);
  const std::int64_t numer = big_to_i64(r.numerator());
  std::size_t v = g->index(numer);
  if (!g->alive(v)) return {};

  // Walk alive successors until a node repeats; the repeat closes the period.
  std::vector<std::int64_t> seen_at(g->size(), -1);
  std::vector<int> labels;
  while (seen_at[v] < 0) {
    seen_at[v] = static_cast<std::int64_t>(labels.size());
    for (std::size_t i = 0; i < g->branches(); ++i) {
      const std::int32_t t = g->target(v, i);
      if (t >= 0 && g->alive(static_cast<std::size_t>(t))) {
        labels.push_back(static_cast<int>(i));
        v = static_cast<std::size_t>(t);
        break;
      }
    }
  }
  const auto split = static_cast<std::ptrdiff_t>(seen_at[v]);
  Coding c{Word(labels.begin(), labels.begin() + split), Word(labels.begin() + split, labels.end())};
  c = canonicalize(c);
  if (project(ifs, c) != r) throw std::logic_error("membership witness does not project back");
  return {true, std::move(c)};
}

std::vector<std::int64_t> members_for_denominator(const FiberGraph& g, bool torus) {
  const std::int64_t q = g.denominator();
  std::vector<std::int64_t> out;
  for (std::size_t v = 0; v < g.size(); ++v) {
    if (!g.alive(v)) continue;
    const std::int64_t p = g.numerator(v);
    if (std::gcd(p < 0 ? -p : p, q) != 1) continue;
    out.push_back(torus ? ((p % q) + q) % q : p);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::int64_t> members_for_denominator(const RationalIFS& ifs, std::int64_t q, bool torus,
                                                  const Budget& budget) {
  const FiberGraph g(ifs, q, budget);
  return members_for_denominator(g, torus);
}

namespace {

constexpr std::int32_t kNone = -1;

struct ShortestTree {
  // Product of q along the best path, stored as BigInt.
  std::vector<BigInt> dist;
  std::vector<std::uint8_t> reached;
  std::vector<std::int32_t> parent;
  std::vector<std::int32_t> label;
};

// Minimal q-products from src over alive nodes, optionally within one SCC.
// Homogeneous systems reduce to BFS; otherwise Dijkstra on exact products.
ShortestTree shortest_products(const RationalIFS& ifs, const FiberGraph& g, std::size_t src, std::int32_t only_scc) {
  const std::size_t n = g.size(), m = g.branches();
  ShortestTree t;
  t.dist.assign(n, BigInt(0));
  t.reached.assign(n, 0);
  t.parent.assign(n, kNone);
  t.label.assign(n, kNone);
  auto allowed = [&](std::int32_t w) {
    return w >= 0 && g.alive(static_cast<std::size_t>(w)) && (only_scc < 0 || g.scc(static_cast<std::size_t>(w)) == only_scc);
  };
  t.reached[src] = 1;
  t.dist[src] = 1;
  if (ifs.is_homogeneous()) {
    const BigInt b = big_from_i64(ifs.base());
    std::deque<std::size_t> queue{src};
    while (!queue.empty()) {
      const std::size_t v = queue.front();
      queue.pop_front();
      for (std::size_t i = 0; i < m; ++i) {
        const std::int32_t w = g.target(v, i);
        if (!allowed(w) || t.reached[w]) continue;
        t.reached[w] = 1;
        t.dist[w] = t.dist[v] * b;
        t.parent[w] = static_cast<std::int32_t>(v);
        t.label[w] = static_cast<std::int32_t>(i);
        queue.push_back(static_cast<std::size_t>(w));
      }
    }
    return t;
  }
  using Item = std::pair<BigInt, std::size_t>;
  auto cmp = [](const Item& a, const Item& b) { return a.first != b.first ? a.first > b.first : a.second > b.second; };
  std::priority_queue<Item, std::vector<Item>, decltype(cmp)> heap(cmp);
  std::vector<std::uint8_t> settled(n, 0);
  heap.push({BigInt(1), src});
  while (!heap.empty()) {
    auto [d, v] = heap.top();
    heap.pop();
    if (settled[v]) continue;
    settled[v] = 1;
    for (std::size_t i = 0; i < m; ++i) {
      const std::int32_t w = g.target(v, i);
      if (!allowed(w) || settled[w]) continue;
      BigInt nd = d * big_from_i64(ifs.branch(i).q);
      if (!t.reached[w] || nd < t.dist[w]) {
        t.reached[w] = 1;
        t.dist[w] = nd;
        t.parent[w] = static_cast<std::int32_t>(v);
        t.label[w] = static_cast<std::int32_t>(i);
        heap.push({std::move(nd), static_cast<std::size_t>(w)});
      }
    }
  }
  return t;
}

Word labels_to(const ShortestTree& t, std::size_t src, std::size_t dst) {
  Word w;
  for (std::size_t v = dst; v != src; v = static_cast<std::size_t>(t.parent[v])) w.push_back(t.label[v]);
  std::reverse(w.begin(), w.end());
  return w;
}

}  // namespace

std::optional<Representation> minimal_representation(const RationalIFS& ifs, const ExactRational& r,
                                                     const Budget& budget) {
  if (!hull(ifs).contains(r)) return std::nullopt;
  const auto g = FiberCache::global().get(ifs, big_to_i64(r.denominator()), budget);
  const std::size_t src = g->index(big_to_i64(r.numerator()));
  if (!g->alive(src)) return std::nullopt;

  const ShortestTree from_src = shortest_products(ifs, *g, src, -1);
  std::optional<Representation> best;
  for (std::size_t x = 0; x < g->size(); ++x) {
    if (!from_src.reached[x] || !g->cyclic(x)) continue;
    // Cheapest cycle through x: best path x -> y inside SCC(x), then y -> x.
    const ShortestTree from_x = shortest_products(ifs, *g, x, g->scc(x));
    BigInt cycle = 0;
    std::size_t close_from = 0;
    int close_label = -1;
    for (std::size_t y = 0; y < g->size(); ++y) {
      if (!from_x.reached[y]) continue;
      for (std::size_t i = 0; i < g->branches(); ++i) {
        if (g->target(y, i) != static_cast<std::int32_t>(x)) continue;
        BigInt c = from_x.dist[y] * big_from_i64(ifs.branch(i).q);
        if (close_label < 0 || c < cycle) {
          cycle = std::move(c);
          close_from = y;
          close_label = static_cast<int>(i);
        }
      }
    }
    if (close_label < 0) continue;
    BigInt value = from_src.dist[x] * (cycle - 1);
    if (best && value >= best->value) continue;
    Coding c{labels_to(from_src, src, x), labels_to(from_x, x, close_from)};
    c.period.push_back(close_label);
    best = Representation{0, 0, std::move(value), std::move(c)};
  }
  if (!best) throw std::logic_error("alive node without a reachable cycle");
  best->coding = canonicalize(best->coding);
  best->preperiod_len = best->coding.preperiod.size();
  best->period_len = best->coding.period.size();
  if (project(ifs, best->coding) != r) throw std::logic_error("minimal representation does not project back");
  if (raw_intrinsic_height(ifs, best->coding) != best->value) throw std::logic_error("canonical form changed h_int");
  return best;
}

}  // namespace cantor_dioph
