// Copyright (c) 2026 the rte-rbm authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

namespace rte_rbm {

// Command-line entry point (train, predict, evaluate, bench-online,
// dsa-study, registry-dump). Returns the process exit status: 0 on success,
// 1 on usage/configuration errors, 2 when a fatal invariant failed.
int run_cli(const std::vector<std::string>& args);

}  // namespace rte_rbm
