#pragma once

#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace bigm {

/// Worker count: explicit request wins, then BIGM_WORKBENCH_JOBS, then the
/// hardware concurrency (at least 1).
inline int resolve_jobs(int requested = 0) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("BIGM_WORKBENCH_JOBS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

/// Static partition of [0, count) across at most `jobs` threads. The body
/// must only write to per-index slots so the result is order-independent.
template <typename Body>
void parallel_for(int count, int jobs, Body&& body) {
  if (count <= 0) return;
  jobs = std::min(jobs, count);
  if (jobs <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> workers;
  int stride = (count + jobs - 1) / jobs;
  for (int w = 0; w < jobs; ++w) {
    int lo = w * stride, hi = std::min(count, lo + stride);
    if (lo >= hi) break;
    workers.emplace_back([lo, hi, &body] {
      for (int i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& t : workers) t.join();
}

}  // namespace bigm
