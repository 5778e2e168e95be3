#include "pie/l0.hpp"

#include <cmath>

#include "pie/kernel.hpp"

namespace pie {

namespace {

void check_same_disc(const DiscretizationPtr& a, const DiscretizationPtr& b) {
  if (a != b &&
      (a->space.size() != b->space.size() || a->fiber.size() != b->fiber.size()))
    throw std::invalid_argument("grid mismatch between fiber-space values");
}

// Weighted inner product of two x-slices: sum_i w_i a_i conj(b_i).
Complex slice_inner(const QuadratureGrid& g, const Eigen::VectorXcd& a,
                    const Eigen::VectorXcd& b) {
  Complex acc = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i)
    acc += g.weight(static_cast<std::size_t>(i)) * a[i] * std::conj(b[i]);
  return acc;
}

}  // namespace

L0Scalar::L0Scalar(DiscretizationPtr disc, Eigen::VectorXcd values)
    : disc_(std::move(disc)), values_(std::move(values)) {
  if (static_cast<std::size_t>(values_.size()) != disc_->fiber.size())
    throw std::invalid_argument("L0Scalar: value count must equal fiber node count");
}

double L0Scalar::norm() const {
  double acc = 0.0;
  for (Eigen::Index j = 0; j < values_.size(); ++j)
    acc += disc_->fiber.weight(static_cast<std::size_t>(j)) * std::norm(values_[j]);
  return std::sqrt(acc);
}

FiberFunction::FiberFunction(DiscretizationPtr disc, Eigen::MatrixXcd values)
    : disc_(std::move(disc)), values_(std::move(values)) {
  if (static_cast<std::size_t>(values_.rows()) != disc_->space.size() ||
      static_cast<std::size_t>(values_.cols()) != disc_->fiber.size())
    throw std::invalid_argument("FiberFunction: value shape must match the grids");
}

FiberFunction FiberFunction::zero(DiscretizationPtr disc) {
  Eigen::MatrixXcd z = Eigen::MatrixXcd::Zero(disc->space.size(), disc->fiber.size());
  return FiberFunction(std::move(disc), std::move(z));
}

double FiberFunction::norm() const {
  double acc = 0.0;
  for (Eigen::Index j = 0; j < values_.cols(); ++j) {
    double fj = 0.0;
    for (Eigen::Index i = 0; i < values_.rows(); ++i)
      fj += disc_->space.weight(static_cast<std::size_t>(i)) * std::norm(values_(i, j));
    acc += disc_->fiber.weight(static_cast<std::size_t>(j)) * fj;
  }
  return std::sqrt(acc);
}

L0Scalar inner(const FiberFunction& f, const FiberFunction& g) {
  check_same_disc(f.disc(), g.disc());
  const auto& disc = *f.disc();
  Eigen::VectorXcd out(disc.fiber.size());
  for (std::size_t j = 0; j < disc.fiber.size(); ++j)
    out[static_cast<Eigen::Index>(j)] =
        slice_inner(disc.space, f.values().col(j), g.values().col(j));
  return L0Scalar(f.disc(), std::move(out));
}

FiberFunction scale(const L0Scalar& b, const FiberFunction& f) {
  check_same_disc(b.disc(), f.disc());
  Eigen::MatrixXcd out = f.values();
  for (Eigen::Index j = 0; j < out.cols(); ++j) out.col(j) *= b.values()[j];
  return FiberFunction(f.disc(), std::move(out));
}

OrthonormalizeResult l0_orthonormalize(std::span<const FiberFunction> fs,
                                       double rank_tol) {
  if (rank_tol <= 0) throw std::invalid_argument("l0_orthonormalize: rank_tol > 0 required");
  OrthonormalizeResult res;
  if (fs.empty()) return res;
  const auto& disc = fs[0].disc();
  const std::size_t nf = disc->fiber.size();
  for (const auto& f : fs) check_same_disc(disc, f.disc());

  for (const auto& f : fs) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(f.values().rows(), f.values().cols());
    NablaMask mask = NablaMask::empty(nf);
    for (std::size_t j = 0; j < nf; ++j) {
      Eigen::VectorXcd v = f.values().col(j);
      const double orig =
          std::sqrt(std::abs(slice_inner(disc->space, v, v).real()));
      for (std::size_t m = 0; m < res.functions.size(); ++m) {
        if (!res.support[m].flags[j]) continue;
        Eigen::VectorXcd u = res.functions[m].values().col(j);
        v -= slice_inner(disc->space, v, u) * u;
      }
      const double rest = std::sqrt(std::abs(slice_inner(disc->space, v, v).real()));
      if (orig > 0.0 && rest > rank_tol * orig) {
        out.col(j) = v / rest;
        mask.flags[j] = true;
      }
    }
    res.functions.emplace_back(disc, std::move(out));
    res.support.push_back(std::move(mask));
  }
  return res;
}

IndependenceResult nabla_independent(std::span<const FiberFunction> fs,
                                     double rank_tol) {
  if (rank_tol <= 0) throw std::invalid_argument("nabla_independent: rank_tol > 0 required");
  if (fs.empty()) return {true, NablaMask{}};
  const auto& disc = fs[0].disc();
  const std::size_t nf = disc->fiber.size();
  const std::size_t k = fs.size();
  for (const auto& f : fs) check_same_disc(disc, f.disc());

  NablaMask witness = NablaMask::empty(nf);
  for (std::size_t j = 0; j < nf; ++j) {
    Eigen::MatrixXcd gram(k, k);
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < k; ++b)
        gram(a, b) = slice_inner(disc->space, fs[a].values().col(j),
                                 fs[b].values().col(j));
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(gram);
    const double smax = svd.singularValues()[0];
    const double smin = svd.singularValues()[svd.singularValues().size() - 1];
    if (smax <= 0.0 || smin <= rank_tol * smax) witness.flags[j] = true;
  }
  return {!witness.any(), std::move(witness)};
}

BesselBound bessel_bound(const Kernel& kernel, const Discretization& disc,
                         Complex lambda) {
  if (lambda == Complex(0.0)) throw std::invalid_argument("bessel_bound: lambda must be nonzero");
  const std::size_t n = disc.space.size(), nf = disc.fiber.size();
  double total = 0.0;
  for (std::size_t k = 0; k < nf; ++k) {
    double fk = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        fk += disc.space.weight(i) * disc.space.weight(j) *
              std::norm(kernel.eval_indexed(disc, i, j, k));
    total += disc.fiber.weight(k) * fk;
  }
  const double m = total / std::norm(lambda);
  return {static_cast<long long>(std::floor(m + 1e-12)), total};
}

double bessel_pointwise_gap(const Kernel& kernel, const Discretization& disc,
                            Complex lambda, std::span<const FiberFunction> family) {
  const std::size_t n = disc.space.size(), nf = disc.fiber.size();
  double gap = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < nf; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      double lhs = 0.0;
      for (const auto& f : family) lhs += std::norm(f.values()(i, k));
      lhs *= std::norm(lambda);
      double rhs = 0.0;  // int |q(s, x_i, alpha_k)|^2 ds
      for (std::size_t s = 0; s < n; ++s)
        rhs += disc.space.weight(s) * std::norm(kernel.eval_indexed(disc, s, i, k));
      gap = std::max(gap, lhs - rhs);
    }
  }
  return gap;
}

}  // namespace pie
