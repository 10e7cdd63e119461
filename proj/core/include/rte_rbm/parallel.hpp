// Copyright (c) 2026 the rte-rbm authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace rte_rbm {

// Thread count resolution: the RTE_RBM_THREADS environment variable wins over
// the requested value; 0 means hardware concurrency.
inline int resolve_threads(int requested)
{
  if (const char* env = std::getenv("RTE_RBM_THREADS"))
  {
    int n = std::atoi(env);
    if (n > 0)
      return n;
  }
  if (requested > 0)
    return requested;
  unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

// Static range split over worker threads. Each chunk writes only its own
// slots, so results are independent of the thread count; reductions are done
// by the caller after the join, in index order.
inline void parallel_for(std::size_t n, int threads,
                         const std::function<void(std::size_t, std::size_t)>& body)
{
  threads = resolve_threads(threads);
  if (threads <= 1 || n < 2)
  {
    body(0, n);
    return;
  }
  std::size_t nt = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
  std::vector<std::thread> pool;
  pool.reserve(nt);
  std::size_t chunk = (n + nt - 1) / nt;
  for (std::size_t t = 0; t < nt; ++t)
  {
    std::size_t lo = t * chunk;
    std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi)
      break;
    pool.emplace_back([lo, hi, &body] { body(lo, hi); });
  }
  for (auto& th : pool)
    th.join();
}

}  // namespace rte_rbm
