// Copyright (c) 2026 the rte-rbm authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rte_rbm {

// Scalar coefficient that is affine in the parameter vector mu:
//   theta(mu) = c0 + sum_i coeff[i] * mu[i].
struct AffineTheta
{
  double c0 = 0.0;
  Eigen::VectorXd coeff;

  double eval(const Eigen::VectorXd& mu) const
  {
    double v = c0;
    for (Eigen::Index i = 0; i < coeff.size() && i < mu.size(); ++i)
      v += coeff[i] * mu[i];
    return v;
  }

  static AffineTheta constant(double c, int d)
  {
    return {c, Eigen::VectorXd::Zero(d)};
  }
  static AffineTheta component(int i, int d)
  {
    AffineTheta t{0.0, Eigen::VectorXd::Zero(d)};
    t.coeff[i] = 1.0;
    return t;
  }
};

struct Box
{
  std::array<double, 2> lo{0.0, 0.0};
  std::array<double, 2> hi{0.0, 0.0};
};

// Spatial factor of one affine cross-section term.
enum class SpatialProfile
{
  One,    // indicator only
  CoordX  // x * indicator (spatially linear cross section)
};

// One affine material term: theta(mu) * profile(x) * sum_i weight_i * chi_box_i(x).
// Boxes must be aligned with element boundaries at assembly time.
struct MaterialTerm
{
  AffineTheta theta;
  SpatialProfile profile = SpatialProfile::One;
  std::vector<std::pair<Box, double>> boxes;  // (box, weight)
};

// Isotropic volume source contribution, parameter-independent in all
// registered problems (Q_b = 1).
struct SourceTerm
{
  enum class Kind
  {
    ConstantOnBox,
    Gaussian  // amp * exp(-alpha * |x - center|^2)
  };
  Kind kind = Kind::ConstantOnBox;
  Box box;
  double value = 0.0;  // constant value, or Gaussian amplitude
  std::array<double, 2> center{0.0, 0.0};
  double alpha = 0.0;
};

enum class FomKind
{
  Direct,
  SiDsa
};

struct QuadratureSpec
{
  int n_slab = 16;   // 1D: Gauss-Legendre point count
  int n_theta = 30;  // 2D: CL azimuthal count (even)
  int n_xi = 6;      // 2D: CL polar count
};

struct Discretization
{
  int nx = 0;
  int ny = 0;
  QuadratureSpec quad;
  int degree = 1;
};

struct ProblemDefinition
{
  std::string name;
  int dim_x = 1;
  Box domain;

  std::vector<MaterialTerm> scattering;
  std::vector<MaterialTerm> absorption;
  std::vector<SourceTerm> source;
  double inflow_left = 0.0;   // 1D: f(x_L, v) for v > 0
  double inflow_right = 0.0;  // 1D: f(x_R, v) for v < 0

  // Parameter box and names.
  Eigen::VectorXd p_lo, p_hi;
  std::vector<std::string> p_names;

  // Benchmark defaults.
  Discretization paper;
  Discretization quick;
  std::array<int, 2> train_grid{1, 1};  // grid shape over the parameter box
  int test_count = 100;
  double tol_sratio = 1e-8;
  int max_m_default = 60;
  FomKind fom_kind = FomKind::Direct;
  double tol_si = 1e-12;

  int n_params() const { return static_cast<int>(p_lo.size()); }

  // Affine coefficient vector [1, theta_s..., theta_a...] matching the
  // assembled operator family's term order.
  Eigen::VectorXd theta_A(const Eigen::VectorXd& mu) const;
  // Coefficients of the affine data terms (a single constant term here).
  Eigen::VectorXd theta_b(const Eigen::VectorXd& mu) const;

  // Greatest lower bound of the absorption cross section over domain x P
  // (attained at a parameter-box corner since every theta is affine in mu).
  double sigma_a_star() const;

  // Uniform training grid over [p_lo, p_hi], first component fastest.
  std::vector<Eigen::VectorXd> training_set() const;

  const Discretization& disc(bool use_quick) const { return use_quick ? quick : paper; }
};

// The six benchmark problems.
std::vector<ProblemDefinition> registry();
ProblemDefinition find_problem(const std::string& name);

}  // namespace rte_rbm
