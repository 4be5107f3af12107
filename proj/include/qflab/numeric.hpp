#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace qflab {

using Complex = std::complex<double>;

inline constexpr double kDefaultTolerance = 1e-9;

/// Neumaier variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double value) {
    const double t = sum_ + value;
    if (std::abs(sum_) >= std::abs(value)) {
      comp_ += (sum_ - t) + value;
    } else {
      comp_ += (value - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

class ComplexSum {
 public:
  void add(const Complex& value) {
    re_.add(value.real());
    im_.add(value.imag());
  }
  void add(double value) { re_.add(value); }
  Complex value() const { return {re_.value(), im_.value()}; }

 private:
  CompensatedSum re_;
  CompensatedSum im_;
};

/// Worker count used by the chunked reductions. Results never depend on it.
void set_thread_count(int threads);
int thread_count();

/// Work counter fed by the enumeration kernels, one unit per innermost term.
void count_terms(std::uint64_t terms);
std::uint64_t terms_counted();
void reset_term_counter();

namespace detail {
/// Set inside reduction workers so that nested reductions run on the calling thread.
inline thread_local bool in_worker = false;
}  // namespace detail

/// Splits [0, count) into fixed chunks of `chunk` items, evaluates
/// `fn(begin, end)` on each chunk (possibly concurrently) and folds the
/// partial results in chunk order with `combine`.
template <typename Partial, typename ChunkFn, typename Combine>
Partial chunked_reduce(std::size_t count, std::size_t chunk, Partial init, ChunkFn fn,
                       Combine combine) {
  if (count == 0) return init;
  chunk = std::max<std::size_t>(chunk, 1);
  const std::size_t chunks = (count + chunk - 1) / chunk;
  std::vector<Partial> partials(chunks, init);
  std::vector<std::exception_ptr> errors(chunks);
  const auto run_chunk = [&](std::size_t c) {
    const std::size_t begin = c * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    try {
      partials[c] = fn(begin, end);
    } catch (...) {
      errors[c] = std::current_exception();
    }
  };
  const std::size_t workers =
      detail::in_worker ? 1 : std::min<std::size_t>(chunks, static_cast<std::size_t>(std::max(1, thread_count())));
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        detail::in_worker = true;
        for (std::size_t c = next.fetch_add(1); c < chunks; c = next.fetch_add(1)) run_chunk(c);
      });
    }
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  Partial result = init;
  for (auto& part : partials) result = combine(result, part);
  return result;
}

/// Chunk size giving roughly 64 chunks, a function of the problem size only.
inline std::size_t default_chunk(std::size_t count) { return std::max<std::size_t>(1, count / 64); }

/// Sums complex chunk results with compensated summation.
template <typename ChunkFn>
Complex chunked_complex_sum(std::size_t count, ChunkFn fn) {
  std::vector<Complex> parts = chunked_reduce(
      count, default_chunk(count), std::vector<Complex>{},
      [&](std::size_t b, std::size_t e) { return std::vector<Complex>{fn(b, e)}; },
      [](std::vector<Complex> acc, const std::vector<Complex>& part) {
        acc.insert(acc.end(), part.begin(), part.end());
        return acc;
      });
  ComplexSum total;
  for (const auto& v : parts) total.add(v);
  return total.value();
}

inline bool is_finite(const Complex& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace qflab
