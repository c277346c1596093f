#pragma once

#include <cstdint>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace gridrules {

enum class ErrorCode {
  Io,
  Parse,
  InvalidArgument,
  Numeric,
  Infeasible,
  Internal,
};

/// Domain error carrying a coarse category so the C boundary can map it
/// to a status code without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) { throw Error(code, msg); }

/// Deterministic 64-bit stream: mt19937_64 plus a fixed 53-bit mapping to
/// doubles, so draws are identical across platforms and compilers.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    // splitmix64; small, fully specified, no distribution objects involved.
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in (0, 1): 53-bit mantissa, zero excluded so inverse CDFs stay finite.
  double uniform01() {
    std::uint64_t u = next_u64() >> 11;
    return (static_cast<double>(u) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

  /// Derive an independent stream for a labeled sub-task.
  Rng fork(std::uint64_t stream) const {
    Rng r(state_ ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
    r.next_u64();
    return r;
  }

 private:
  std::uint64_t state_;
};

/// Fisher-Yates with our own index draws; std::shuffle is implementation-defined.
template <typename T>
void deterministic_shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.below(i));
    std::swap(v[i - 1], v[j]);
  }
}

/// Run fn(begin, end) over [0, n) split into contiguous blocks, one per worker.
/// Results must be written to disjoint, preallocated slots so the output is
/// independent of the worker count.
inline void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t, std::size_t)>& fn) {
  if (n == 0) return;
  if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  std::size_t nw = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
  if (nw <= 1) {
    fn(0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nw);
  std::size_t chunk = (n + nw - 1) / nw;
  std::exception_ptr first_error = nullptr;
  std::mutex err_mutex;
  for (std::size_t w = 0; w < nw; ++w) {
    std::size_t b = w * chunk;
    std::size_t e = std::min(n, b + chunk);
    if (b >= e) break;
    pool.emplace_back([&, b, e] {
      try {
        fn(b, e);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace gridrules
