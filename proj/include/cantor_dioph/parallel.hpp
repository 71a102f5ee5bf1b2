#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace cantor_dioph {

/// Runs `fn(chunk_index, begin, end)` over [begin, end) split into chunks
/// whose boundaries depend only on the range and `chunk_size`, never on the
/// worker count. Callers store per-chunk results and reduce them in chunk
/// order, which makes output independent of `workers`.
template <typename Fn>
void parallel_chunks(std::uint64_t begin, std::uint64_t end, std::uint64_t chunk_size, unsigned workers, Fn&& fn) {
  if (end <= begin) return;
  chunk_size = std::max<std::uint64_t>(chunk_size, 1);
  const std::uint64_t chunks = (end - begin + chunk_size - 1) / chunk_size;
  workers = std::max(1u, workers);
  auto run_chunk = [&](std::uint64_t c) {
    const std::uint64_t lo = begin + c * chunk_size;
    const std::uint64_t hi = std::min(end, lo + chunk_size);
    fn(static_cast<std::size_t>(c), lo, hi);
  };
  if (workers == 1 || chunks == 1) {
    for (std::uint64_t c = 0; c < chunks; ++c) run_chunk(c);
    return;
  }
  std::mutex mu;
  std::uint64_t next = 0;
  std::exception_ptr error;
  auto worker = [&] {
    for (;;) {
      std::uint64_t c;
      {
        std::lock_guard lock(mu);
        if (next >= chunks || error) return;
        c = next++;
      }
      try {
        run_chunk(c);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::jthread> pool;
  const unsigned n = static_cast<unsigned>(std::min<std::uint64_t>(workers, chunks));
  pool.reserve(n);
  for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
  pool.clear();
  if (error) std::rethrow_exception(error);
}

inline std::size_t chunk_count(std::uint64_t begin, std::uint64_t end, std::uint64_t chunk_size) {
  if (end <= begin) return 0;
  chunk_size = std::max<std::uint64_t>(chunk_size, 1);
  return static_cast<std::size_t>((end - begin + chunk_size - 1) / chunk_size);
}

}  // namespace cantor_dioph
