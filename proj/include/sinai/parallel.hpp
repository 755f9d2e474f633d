#pragma once

#include <cstdint>
#include <exception>
#include <vector>

#include <omp.h>

namespace sinai {

// 0 means "all available".
inline int resolve_threads(int requested) { return requested > 0 ? requested : omp_get_max_threads(); }

// out[i] = f(i) for i < N. Each replicate owns its seed and writes only its
// slot, so the result is identical for any thread count. The first exception
// (lowest index) is rethrown after the loop.
template <class T, class F>
std::vector<T> map_replicates(std::int64_t n, int threads, F&& f) {
  std::vector<T> out(static_cast<std::size_t>(n));
  std::vector<std::exception_ptr> errs;
  std::int64_t first_bad = n;
#pragma omp parallel for schedule(dynamic, 64) num_threads(resolve_threads(threads))
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = f(i);
    } catch (...) {
#pragma omp critical(sinai_map_err)
      {
        if (i < first_bad) {
          first_bad = i;
          errs.assign(1, std::current_exception());
        }
      }
    }
  }
  if (!errs.empty()) std::rethrow_exception(errs.front());
  return out;
}

// Serial reference of map_replicates.
template <class T, class F>
std::vector<T> map_replicates_serial(std::int64_t n, F&& f) {
  std::vector<T> out;
  out.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) out.push_back(f(i));
  return out;
}

}  // namespace sinai
