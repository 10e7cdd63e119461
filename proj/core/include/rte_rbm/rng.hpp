// Copyright (c) 2026 the rte-rbm authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace rte_rbm {

// Seeded uniform sampler. Doubles are built from the raw 64-bit stream
// ((x >> 11) * 2^-53) instead of std::uniform_real_distribution so that a
// given seed produces the same sequence on every platform.
class SampleRng
{
public:
  explicit SampleRng(std::uint64_t seed) : gen_(seed) {}

  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  Eigen::VectorXd uniform_box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi)
  {
    Eigen::VectorXd mu(lo.size());
    for (Eigen::Index i = 0; i < lo.size(); ++i)
      mu[i] = uniform(lo[i], hi[i]);
    return mu;
  }

private:
  std::mt19937_64 gen_;
};

inline std::vector<Eigen::VectorXd> sample_uniform_box(const Eigen::VectorXd& lo,
                                                       const Eigen::VectorXd& hi,
                                                       int count, std::uint64_t seed)
{
  SampleRng rng(seed);
  std::vector<Eigen::VectorXd> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i)
    out.push_back(rng.uniform_box(lo, hi));
  return out;
}

}  // namespace rte_rbm
