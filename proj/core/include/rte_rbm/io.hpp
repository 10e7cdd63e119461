// Copyright (c) 2026 the rte-rbm authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rte_rbm {

// Fixed scientific-style formatting at 17 significant digits, so identical
// runs produce byte-identical files.
std::string format_g17(double v);

struct CsvTable
{
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

void write_csv(const std::string& path, const CsvTable& table);

void write_text_file(const std::string& path, const std::string& content);

// Flat binary matrix: int64 rows, int64 cols, column-major doubles.
void save_matrix_bin(const std::string& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd load_matrix_bin(const std::string& path);

}  // namespace rte_rbm
