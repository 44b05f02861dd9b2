#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace qcensus {

inline int default_workers()
{
  unsigned h = std::thread::hardware_concurrency();
  return h == 0 ? 1 : static_cast<int>(h);
}

// Applies fn to 0..count-1 on a bounded pool; results are stored by index, so the
// outcome does not depend on scheduling. The first exception (lowest index) is rethrown.
template <class R, class F>
std::vector<R> parallel_map(std::size_t count, int workers, F&& fn)
{
  std::vector<R> out(count);
  std::vector<std::exception_ptr> errs(count);
  const std::size_t w = std::min<std::size_t>(std::max(1, workers), std::max<std::size_t>(count, 1));
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      try {
        out[i] = fn(i);
      } catch (...) {
        errs[i] = std::current_exception();
      }
    }
  };
  if (w <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < w; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
  return out;
}

} // namespace qcensus
