// Copyright (c) 2026 the rte-rbm authors
// SPDX-License-Identifier: Apache-2.0

#include "rte_rbm/operators.hpp"

#include <cmath>
#include <stdexcept>

namespace rte_rbm {

namespace {

// Lift a 1D factor matrix to the tensor-product local basis along one axis.
Eigen::MatrixXd kron_axis(const Eigen::MatrixXd& m1d, int axis, int n1, int dim_x)
{
  if (dim_x == 1)
    return m1d;
  const int nloc = n1 * n1;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(nloc, nloc);
  for (int ky = 0; ky < n1; ++ky)
    for (int kx = 0; kx < n1; ++kx)
      for (int ly = 0; ly < n1; ++ly)
        for (int lx = 0; lx < n1; ++lx)
        {
          double v = axis == 0 ? (ky == ly ? m1d(kx, lx) : 0.0)
                               : (kx == lx ? m1d(ky, ly) : 0.0);
          if (v != 0.0)
            out(kx + n1 * ky, lx + n1 * ly) = v;
        }
  return out;
}

bool aligned_with_grid(double v, double lo, double h, int n)
{
  double t = (v - lo) / h;
  return std::abs(t - std::round(t)) <= 1e-9 || t < -1e-9 || t > n + 1e-9;
}

void check_box_alignment(const SpatialMesh& mesh, const Box& box, const char* what)
{
  for (int axis = 0; axis < mesh.dim_x; ++axis)
  {
    double clo = std::max(box.lo[axis], mesh.lo[axis]);
    double chi = std::min(box.hi[axis], mesh.hi[axis]);
    if (!aligned_with_grid(clo, mesh.lo[axis], mesh.h(axis), mesh.cells[axis]) ||
        !aligned_with_grid(chi, mesh.lo[axis], mesh.h(axis), mesh.cells[axis]))
      throw std::invalid_argument(std::string(what) +
                                  ": region not aligned with element boundaries");
  }
}

bool element_in_box(const SpatialMesh& mesh, int e, const Box& box)
{
  int ix = e % mesh.cells[0];
  int iy = mesh.dim_x == 2 ? e / mesh.cells[0] : 0;
  double cx = mesh.center(0, ix);
  double cy = mesh.dim_x == 2 ? mesh.center(1, iy) : 0.5;
  return cx >= box.lo[0] && cx <= box.hi[0] && cy >= box.lo[1] && cy <= box.hi[1];
}

}  // namespace

void ElementBlockDiag::apply(const Eigen::Ref<const Eigen::VectorXd>& x,
                             Eigen::Ref<Eigen::VectorXd> y) const
{
  const int ne = nelem();
  for (int e = 0; e < ne; ++e)
    y.segment(e * nloc_, nloc_).noalias() = block(e) * x.segment(e * nloc_, nloc_);
}

void ElementBlockDiag::apply_add(double c, const Eigen::Ref<const Eigen::VectorXd>& x,
                                 Eigen::Ref<Eigen::VectorXd> y) const
{
  const int ne = nelem();
  for (int e = 0; e < ne; ++e)
    y.segment(e * nloc_, nloc_).noalias() += c * (block(e) * x.segment(e * nloc_, nloc_));
}

void ElementBlockDiag::add_scaled(double c, const ElementBlockDiag& other)
{
  if (blocks_.size() == 0)
  {
    nloc_ = other.nloc_;
    blocks_ = c * other.blocks_;
  }
  else
  {
    blocks_ += c * other.blocks_;
  }
}

void ElementBlockDiag::append_triplets(double c, int row0, int col0,
                                       std::vector<Triplet>& out) const
{
  const int ne = nelem();
  for (int e = 0; e < ne; ++e)
  {
    auto b = block(e);
    for (int k = 0; k < nloc_; ++k)
      for (int l = 0; l < nloc_; ++l)
        if (b(k, l) != 0.0)
          out.emplace_back(row0 + e * nloc_ + k, col0 + e * nloc_ + l, c * b(k, l));
  }
}

TransportOperator::TransportOperator(const DgSpace& space, const AngularQuadrature& quad)
{
  const SpatialMesh& mesh = space.mesh();
  const int n1 = space.nloc1d();
  nloc_ = space.nloc();
  const int nd = quad.size();
  diag_.resize(nd);
  cx_.resize(nd);
  cy_.resize(nd);
  sx_.resize(nd);
  sy_.resize(nd);

  for (int j = 0; j < nd; ++j)
  {
    const double vx = quad.nodes[j][0];
    const double vy = mesh.dim_x == 2 ? quad.nodes[j][1] : 0.0;
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(nloc_, nloc_);
    Eigen::MatrixXd Cx = Eigen::MatrixXd::Zero(nloc_, nloc_);
    Eigen::MatrixXd Cy = Eigen::MatrixXd::Zero(nloc_, nloc_);

    for (int axis = 0; axis < mesh.dim_x; ++axis)
    {
      const double v = axis == 0 ? vx : vy;
      const bool pos = v >= 0.0;  // zero component ordered as positive
      const Eigen::VectorXd& t_out = pos ? space.trace_hi(axis) : space.trace_lo(axis);
      const Eigen::VectorXd& t_in = pos ? space.trace_lo(axis) : space.trace_hi(axis);

      // Volume term -v (S (x) I), outflow face term |v| t_out t_out^T, and
      // the upwind coupling -|v| t_in t_nbr_out^T, where the neighbor's
      // outflow trace equals t_out on its own side of the shared face.
      Eigen::MatrixXd local = -v * space.deriv_matrix(axis) +
                              std::abs(v) * (t_out * t_out.transpose());
      Eigen::MatrixXd coup = -std::abs(v) * (t_in * t_out.transpose());
      D += kron_axis(local, axis, n1, mesh.dim_x);
      (axis == 0 ? Cx : Cy) = kron_axis(coup, axis, n1, mesh.dim_x);
      (axis == 0 ? sx_ : sy_)[j] = pos ? 1 : -1;
    }
    if (mesh.dim_x == 1)
      sy_[j] = 1;
    diag_[j] = D;
    cx_[j] = Cx;
    cy_[j] = Cy;
  }
}

void TransportOperator::apply_direction(const SpatialMesh& mesh, int j,
                                        const Eigen::Ref<const Eigen::VectorXd>& x,
                                        Eigen::Ref<Eigen::VectorXd> y) const
{
  const int nx = mesh.cells[0];
  const int ny = mesh.dim_x == 2 ? mesh.cells[1] : 1;
  const int sx = sx_[j], sy = sy_[j];
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix)
    {
      const int e = ix + nx * iy;
      auto ye = y.segment(e * nloc_, nloc_);
      ye.noalias() = diag_[j] * x.segment(e * nloc_, nloc_);
      const int ux = ix - sx;
      if (ux >= 0 && ux < nx)
        ye.noalias() += cx_[j] * x.segment((ux + nx * iy) * nloc_, nloc_);
      if (mesh.dim_x == 2)
      {
        const int uy = iy - sy;
        if (uy >= 0 && uy < ny)
          ye.noalias() += cy_[j] * x.segment((ix + nx * uy) * nloc_, nloc_);
      }
    }
}

void TransportOperator::apply_direction_transpose(const SpatialMesh& mesh, int j,
                                                  const Eigen::Ref<const Eigen::VectorXd>& x,
                                                  Eigen::Ref<Eigen::VectorXd> y) const
{
  const int nx = mesh.cells[0];
  const int ny = mesh.dim_x == 2 ? mesh.cells[1] : 1;
  const int sx = sx_[j], sy = sy_[j];
  y.setZero();
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix)
    {
      const int e = ix + nx * iy;
      auto xe = x.segment(e * nloc_, nloc_);
      y.segment(e * nloc_, nloc_).noalias() += diag_[j].transpose() * xe;
      const int ux = ix - sx;
      if (ux >= 0 && ux < nx)
        y.segment((ux + nx * iy) * nloc_, nloc_).noalias() += cx_[j].transpose() * xe;
      if (mesh.dim_x == 2)
      {
        const int uy = iy - sy;
        if (uy >= 0 && uy < ny)
          y.segment((ix + nx * uy) * nloc_, nloc_).noalias() += cy_[j].transpose() * xe;
      }
    }
}

void TransportOperator::append_triplets(const SpatialMesh& mesh, int j, int offset,
                                        std::vector<Triplet>& out) const
{
  const int nx = mesh.cells[0];
  const int ny = mesh.dim_x == 2 ? mesh.cells[1] : 1;
  auto emit = [&](int er, int ec, const Eigen::MatrixXd& m) {
    for (int k = 0; k < nloc_; ++k)
      for (int l = 0; l < nloc_; ++l)
        if (m(k, l) != 0.0)
          out.emplace_back(offset + er * nloc_ + k, offset + ec * nloc_ + l, m(k, l));
  };
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix)
    {
      const int e = ix + nx * iy;
      emit(e, e, diag_[j]);
      const int ux = ix - sx_[j];
      if (ux >= 0 && ux < nx)
        emit(e, ux + nx * iy, cx_[j]);
      if (mesh.dim_x == 2)
      {
        const int uy = iy - sy_[j];
        if (uy >= 0 && uy < ny)
          emit(e, ix + nx * uy, cy_[j]);
      }
    }
}

void AffineOperatorFamily::apply(const Eigen::VectorXd& theta_A,
                                 const Eigen::Ref<const Eigen::VectorXd>& x,
                                 Eigen::Ref<Eigen::VectorXd> y) const
{
  const int nd = quad.size();
  const int nsp = space->n_dof_x();
  if (x.size() != static_cast<Eigen::Index>(nd) * nsp)
    throw std::invalid_argument("AffineOperatorFamily::apply: dimension mismatch");

  // Combined spatial blocks at this parameter value.
  ElementBlockDiag s_mu, a_mu;
  for (int q = 0; q < q_s(); ++q)
    s_mu.add_scaled(theta_A[1 + q], scat[q]);
  for (int q = 0; q < q_a(); ++q)
    a_mu.add_scaled(theta_A[1 + q_s() + q], abs[q]);

  Eigen::VectorXd rho = Eigen::VectorXd::Zero(nsp);
  for (int j = 0; j < nd; ++j)
    rho += quad.weights[j] * x.segment(static_cast<Eigen::Index>(j) * nsp, nsp);

  for (int j = 0; j < nd; ++j)
  {
    auto xj = x.segment(static_cast<Eigen::Index>(j) * nsp, nsp);
    auto yj = y.segment(static_cast<Eigen::Index>(j) * nsp, nsp);
    transport.apply_direction(space->mesh(), j, xj, yj);
    if (a_mu.nloc() > 0)
      a_mu.apply_add(1.0, xj, yj);
    if (s_mu.nloc() > 0)
    {
      Eigen::VectorXd diff = xj - rho;
      s_mu.apply_add(1.0, diff, yj);
    }
  }
}

Eigen::VectorXd AffineOperatorFamily::apply(const Eigen::VectorXd& theta_A,
                                            const Eigen::VectorXd& x) const
{
  Eigen::VectorXd y(x.size());
  apply(theta_A, x, y);
  return y;
}

void AffineOperatorFamily::apply_term(int q, const Eigen::Ref<const Eigen::VectorXd>& x,
                                      Eigen::Ref<Eigen::VectorXd> y) const
{
  const int nd = quad.size();
  const int nsp = space->n_dof_x();
  if (q == 0)
  {
    for (int j = 0; j < nd; ++j)
      transport.apply_direction(space->mesh(), j, x.segment(static_cast<Eigen::Index>(j) * nsp, nsp),
                                y.segment(static_cast<Eigen::Index>(j) * nsp, nsp));
    return;
  }
  if (q <= q_s())
  {
    const ElementBlockDiag& s = scat[q - 1];
    Eigen::VectorXd rho = Eigen::VectorXd::Zero(nsp);
    for (int j = 0; j < nd; ++j)
      rho += quad.weights[j] * x.segment(static_cast<Eigen::Index>(j) * nsp, nsp);
    for (int j = 0; j < nd; ++j)
    {
      Eigen::VectorXd diff = x.segment(static_cast<Eigen::Index>(j) * nsp, nsp) - rho;
      s.apply(diff, y.segment(static_cast<Eigen::Index>(j) * nsp, nsp));
    }
    return;
  }
  const ElementBlockDiag& a = abs[q - 1 - q_s()];
  for (int j = 0; j < nd; ++j)
    a.apply(x.segment(static_cast<Eigen::Index>(j) * nsp, nsp),
            y.segment(static_cast<Eigen::Index>(j) * nsp, nsp));
}

void AffineOperatorFamily::apply_term_transpose(int q,
                                                const Eigen::Ref<const Eigen::VectorXd>& x,
                                                Eigen::Ref<Eigen::VectorXd> y) const
{
  const int nd = quad.size();
  const int nsp = space->n_dof_x();
  if (q == 0)
  {
    for (int j = 0; j < nd; ++j)
      transport.apply_direction_transpose(space->mesh(), j,
                                          x.segment(static_cast<Eigen::Index>(j) * nsp, nsp),
                                          y.segment(static_cast<Eigen::Index>(j) * nsp, nsp));
    return;
  }
  if (q <= q_s())
  {
    // ((I - 1 w^T) (x) S)^T = (I - w 1^T) (x) S for symmetric S.
    const ElementBlockDiag& s = scat[q - 1];
    Eigen::VectorXd colsum = Eigen::VectorXd::Zero(nsp);
    for (int j = 0; j < nd; ++j)
      colsum += x.segment(static_cast<Eigen::Index>(j) * nsp, nsp);
    Eigen::VectorXd s_colsum(nsp);
    s.apply(colsum, s_colsum);
    for (int j = 0; j < nd; ++j)
    {
      auto yj = y.segment(static_cast<Eigen::Index>(j) * nsp, nsp);
      s.apply(x.segment(static_cast<Eigen::Index>(j) * nsp, nsp), yj);
      yj -= quad.weights[j] * s_colsum;
    }
    return;
  }
  const ElementBlockDiag& a = abs[q - 1 - q_s()];
  for (int j = 0; j < nd; ++j)
    a.apply(x.segment(static_cast<Eigen::Index>(j) * nsp, nsp),
            y.segment(static_cast<Eigen::Index>(j) * nsp, nsp));
}

Eigen::SparseMatrix<double> AffineOperatorFamily::assemble_sparse(
    const Eigen::VectorXd& theta_A) const
{
  const int nd = quad.size();
  const int nsp = space->n_dof_x();
  const Eigen::Index n = static_cast<Eigen::Index>(nd) * nsp;

  ElementBlockDiag s_mu, a_mu;
  for (int q = 0; q < q_s(); ++q)
    s_mu.add_scaled(theta_A[1 + q], scat[q]);
  for (int q = 0; q < q_a(); ++q)
    a_mu.add_scaled(theta_A[1 + q_s() + q], abs[q]);

  std::vector<Triplet> trips;
  for (int j = 0; j < nd; ++j)
  {
    transport.append_triplets(space->mesh(), j, j * nsp, trips);
    if (a_mu.nloc() > 0)
      a_mu.append_triplets(1.0, j * nsp, j * nsp, trips);
    if (s_mu.nloc() > 0)
      for (int k = 0; k < nd; ++k)
      {
        double c = (j == k ? 1.0 : 0.0) - quad.weights[k];
        if (c != 0.0)
          s_mu.append_triplets(c, j * nsp, k * nsp, trips);
      }
  }
  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(trips.begin(), trips.end());
  return A;
}

Eigen::VectorXd AffineVectorFamily::assemble(const Eigen::VectorXd& theta_b) const
{
  Eigen::VectorXd b = theta_b[0] * terms[0];
  for (int q = 1; q < q_b(); ++q)
    b += theta_b[q] * terms[q];
  return b;
}

void WeightingMatrix::apply_cholesky(Eigen::Ref<Eigen::VectorXd> g) const
{
  for (Eigen::Index j = 0; j < weights.size(); ++j)
    g.segment(j * block, block) *= std::sqrt(weights[j]);
}

double WeightingMatrix::norm_h(const Eigen::Ref<const Eigen::VectorXd>& g) const
{
  double s = 0.0;
  for (Eigen::Index j = 0; j < weights.size(); ++j)
    s += weights[j] * g.segment(j * block, block).squaredNorm();
  return std::sqrt(s);
}

double WeightingMatrix::norm_mh(const Eigen::Ref<const Eigen::VectorXd>& r) const
{
  // M == I for the orthonormal basis, so Mh is diagonal with entries w_j.
  return norm_h(r);
}

TransportOperator assemble_transport(const DgSpace& space, const AngularQuadrature& quad)
{
  return TransportOperator(space, quad);
}

ElementBlockDiag assemble_material_blocks(const DgSpace& space, const MaterialTerm& term)
{
  const SpatialMesh& mesh = space.mesh();
  const int n1 = space.nloc1d();
  const int ne = mesh.num_elements();
  ElementBlockDiag out(ne, space.nloc());

  for (const auto& [box, w] : term.boxes)
    check_box_alignment(mesh, box, "assemble_material_blocks");

  // Per-element x-profile factor: identity, or the x-weighted 1D mass.
  std::vector<double> gx, gw;
  gauss_on_interval(n1 + 1, -1.0, 1.0, gx, gw);
  for (int e = 0; e < ne; ++e)
  {
    double chi = 0.0;
    for (const auto& [box, w] : term.boxes)
      if (element_in_box(mesh, e, box))
        chi += w;
    if (chi == 0.0)
      continue;
    if (term.profile == SpatialProfile::One)
    {
      out.block(e) += chi * Eigen::MatrixXd::Identity(space.nloc(), space.nloc());
      continue;
    }
    const int ix = e % mesh.cells[0];
    Eigen::MatrixXd mx = Eigen::MatrixXd::Zero(n1, n1);
    const double h = mesh.h(0);
    for (std::size_t qp = 0; qp < gx.size(); ++qp)
    {
      double x = mesh.center(0, ix) + 0.5 * h * gx[qp];
      Eigen::VectorXd phi = space.eval_axis(0, ix, x);
      mx += (0.5 * h * gw[qp] * x) * (phi * phi.transpose());
    }
    out.block(e) += chi * kron_axis(mx, 0, n1, mesh.dim_x);
  }
  return out;
}

AffineOperatorFamily assemble_affine_cross_sections(std::shared_ptr<const DgSpace> space,
                                                    const AngularQuadrature& quad,
                                                    const ProblemDefinition& problem)
{
  AffineOperatorFamily fam;
  fam.quad = quad;
  fam.transport = assemble_transport(*space, quad);
  for (const auto& term : problem.scattering)
    fam.scat.push_back(assemble_material_blocks(*space, term));
  for (const auto& term : problem.absorption)
    fam.abs.push_back(assemble_material_blocks(*space, term));
  fam.space = std::move(space);
  return fam;
}

AffineVectorFamily assemble_data(const DgSpace& space, const AngularQuadrature& quad,
                                 const ProblemDefinition& problem)
{
  const SpatialMesh& mesh = space.mesh();
  const int nsp = space.n_dof_x();
  const int nd = quad.size();
  const int nloc = space.nloc();

  // Spatial load vector int_T G phi_k, shared by all directions. Tensor Gauss
  // with K+4 points per axis keeps the quadrature error of the Gaussian
  // sources at the benchmark resolutions below 1e-14 relative.
  const int nq = space.degree() + 4;
  Eigen::VectorXd load = Eigen::VectorXd::Zero(nsp);
  for (const auto& s : problem.source)
    if (s.kind == SourceTerm::Kind::ConstantOnBox)
      check_box_alignment(mesh, s.box, "assemble_data");

  std::vector<double> qx, qwx, qy, qwy;
  gauss_on_interval(nq, -1.0, 1.0, qx, qwx);
  qy = qx;
  qwy = qwx;
  const int ne = mesh.num_elements();
  for (int e = 0; e < ne; ++e)
  {
    const int ix = e % mesh.cells[0];
    const int iy = mesh.dim_x == 2 ? e / mesh.cells[0] : 0;
    const double hx = mesh.h(0);
    const double hy = mesh.dim_x == 2 ? mesh.h(1) : 1.0;
    const int nqy = mesh.dim_x == 2 ? nq : 1;
    for (int a = 0; a < nq; ++a)
      for (int b = 0; b < nqy; ++b)
      {
        double x = mesh.center(0, ix) + 0.5 * hx * qx[a];
        double y = mesh.dim_x == 2 ? mesh.center(1, iy) + 0.5 * hy * qy[b] : 0.5;
        double wq = 0.5 * hx * qwx[a] * (mesh.dim_x == 2 ? 0.5 * hy * qwy[b] : 1.0);
        double g = 0.0;
        for (const auto& s : problem.source)
        {
          if (s.kind == SourceTerm::Kind::ConstantOnBox)
          {
            if (element_in_box(mesh, e, s.box))
              g += s.value;
          }
          else
          {
            double dx = x - s.center[0];
            double dy = mesh.dim_x == 2 ? y - s.center[1] : 0.0;
            g += s.value * std::exp(-s.alpha * (dx * dx + dy * dy));
          }
        }
        if (g != 0.0)
          load.segment(e * nloc, nloc) += wq * g * space.eval_basis(e, x, y);
      }
  }

  Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nd) * nsp);
  for (int j = 0; j < nd; ++j)
    b.segment(static_cast<Eigen::Index>(j) * nsp, nsp) = load;

  // Inflow boundary data (1D slab): -int_e g v.n phi with n outward.
  if (mesh.dim_x == 1)
  {
    const int last = mesh.cells[0] - 1;
    for (int j = 0; j < nd; ++j)
    {
      const double v = quad.nodes[j][0];
      if (v > 0.0 && problem.inflow_left != 0.0)
        b.segment(static_cast<Eigen::Index>(j) * nsp, nloc) +=
            problem.inflow_left * v * space.trace_lo(0);
      if (v < 0.0 && problem.inflow_right != 0.0)
        b.segment(static_cast<Eigen::Index>(j) * nsp + last * nloc, nloc) +=
            problem.inflow_right * (-v) * space.trace_hi(0);
    }
  }

  AffineVectorFamily fam;
  fam.terms.push_back(std::move(b));
  return fam;
}

Eigen::VectorXd apply_A(const AffineOperatorFamily& family, const Eigen::VectorXd& theta_A,
                        const Eigen::VectorXd& g)
{
  return family.apply(theta_A, g);
}

double weighted_norm(const WeightingMatrix& w, const Eigen::VectorXd& g)
{
  return w.norm_h(g);
}

double weighted_residual_norm(const AffineOperatorFamily& family, const WeightingMatrix& w,
                              const Eigen::VectorXd& theta_A, const Eigen::VectorXd& b_mu,
                              const Eigen::VectorXd& g)
{
  Eigen::VectorXd r = family.apply(theta_A, g) - b_mu;
  return w.norm_mh(r);
}

}  // namespace rte_rbm
