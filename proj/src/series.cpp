#include "pie/series.hpp"

#include <cmath>

namespace pie {

namespace {

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

// Elementary-symmetric coefficients e_0..e_kmax of A-hat via the Newton
// identities from power sums p_m = tr(A^m); d_k = k! e_k.
std::vector<Complex> newton_coefficients(const Eigen::MatrixXcd& a, int kmax) {
  std::vector<Complex> p(kmax + 1, 0.0), e(kmax + 1, 0.0);
  Eigen::MatrixXcd power = a;
  for (int m = 1; m <= kmax; ++m) {
    p[m] = power.trace();
    if (m < kmax) power = power * a;
  }
  e[0] = 1.0;
  for (int k = 1; k <= kmax; ++k) {
    Complex acc = 0.0;
    double sign = 1.0;
    for (int m = 1; m <= k; ++m) {
      acc += sign * e[k - m] * p[m];
      sign = -sign;
    }
    e[k] = acc / static_cast<double>(k);
  }
  return e;
}

// K * W (quadrature weights applied on the right).
Eigen::MatrixXcd weighted(const FiberOperator& op) {
  Eigen::MatrixXcd kw = op.samples;
  for (Eigen::Index j = 0; j < kw.cols(); ++j)
    kw.col(j) *= op.disc->space.weight(static_cast<std::size_t>(j));
  return kw;
}

// Odometer over k-tuples of node indices; calls fn for each tuple.
template <typename Fn>
void for_each_tuple(std::size_t n, int k, Fn&& fn) {
  std::vector<std::size_t> idx(static_cast<std::size_t>(k), 0);
  while (true) {
    fn(idx);
    int d = 0;
    for (; d < k; ++d) {
      if (++idx[static_cast<std::size_t>(d)] < n) break;
      idx[static_cast<std::size_t>(d)] = 0;
    }
    if (d == k) break;
  }
}

Complex d_k_tensor(const KernelView& view, const Discretization& disc,
                   std::size_t fiber_index, int k) {
  if (k > 3)
    throw std::invalid_argument("d_k: tensor-quadrature unsupported for order > 3");
  const std::size_t n = disc.space.size();
  Complex total = 0.0;
  Eigen::MatrixXcd m(k, k);
  for_each_tuple(n, k, [&](const std::vector<std::size_t>& idx) {
    double w = 1.0;
    for (std::size_t i : idx) w *= disc.space.weight(i);
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b)
        m(a, b) = view.eval_indexed(disc, idx[static_cast<std::size_t>(a)],
                                    idx[static_cast<std::size_t>(b)], fiber_index);
    total += w * m.determinant();
  });
  return total;
}

Complex q_k_tensor(const KernelView& view, const Discretization& disc, std::size_t ix,
                   std::size_t is, std::size_t fiber_index, int k) {
  if (k > 3)
    throw std::invalid_argument("q_k: tensor-quadrature unsupported for order > 3");
  if (k == 0) return view.eval_indexed(disc, ix, is, fiber_index);
  const std::size_t n = disc.space.size();
  Complex total = 0.0;
  Eigen::MatrixXcd m(k + 1, k + 1);
  for_each_tuple(n, k, [&](const std::vector<std::size_t>& idx) {
    double w = 1.0;
    for (std::size_t i : idx) w *= disc.space.weight(i);
    m(0, 0) = view.eval_indexed(disc, ix, is, fiber_index);
    for (int b = 0; b < k; ++b)
      m(0, b + 1) =
          view.eval_indexed(disc, ix, idx[static_cast<std::size_t>(b)], fiber_index);
    for (int a = 0; a < k; ++a) {
      m(a + 1, 0) =
          view.eval_indexed(disc, idx[static_cast<std::size_t>(a)], is, fiber_index);
      for (int b = 0; b < k; ++b)
        m(a + 1, b + 1) = view.eval_indexed(disc, idx[static_cast<std::size_t>(a)],
                                            idx[static_cast<std::size_t>(b)],
                                            fiber_index);
    }
    total += w * m.determinant();
  });
  return total;
}

// Scaled minor coefficients S_k = Q_k / k!:
//   S_0 = K,  S_k = e_k K - (K W) S_{k-1}.
std::vector<Eigen::MatrixXcd> minor_coefficients(const FiberOperator& op, int kmax,
                                                 const std::vector<Complex>& e) {
  const Eigen::MatrixXcd kw = weighted(op);
  std::vector<Eigen::MatrixXcd> s;
  s.reserve(static_cast<std::size_t>(kmax) + 1);
  s.push_back(op.samples);
  for (int k = 1; k <= kmax; ++k)
    s.push_back(e[static_cast<std::size_t>(k)] * op.samples -
                kw * s[static_cast<std::size_t>(k - 1)]);
  return s;
}

}  // namespace

Complex pi_n(const KernelView& view, const Discretization& disc,
             const std::vector<std::vector<double>>& xs,
             const std::vector<std::vector<double>>& ss,
             std::span<const double> alpha) {
  if (xs.empty() || xs.size() != ss.size())
    throw std::invalid_argument("pi_n: need matching nonempty point lists");
  const int n = static_cast<int>(xs.size());
  Eigen::MatrixXcd m(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      m(a, b) = view.eval_at(disc, xs[static_cast<std::size_t>(a)],
                             ss[static_cast<std::size_t>(b)], alpha);
  return m.determinant();
}

Complex d_k(const KernelView& view, const DiscretizationPtr& disc,
            std::size_t fiber_index, int k, CoefficientMethod method) {
  if (k < 1) throw std::invalid_argument("d_k: k >= 1 required");
  if (method == CoefficientMethod::TensorQuadrature)
    return d_k_tensor(view, *disc, fiber_index, k);
  const FiberOperator op = assemble(view, disc, fiber_index);
  const auto e = newton_coefficients(op.symmetrized, k);
  return factorial(k) * e[static_cast<std::size_t>(k)];
}

Complex q_k(const KernelView& view, const DiscretizationPtr& disc, std::size_t ix,
            std::size_t is, std::size_t fiber_index, int k, CoefficientMethod method) {
  if (k < 0) throw std::invalid_argument("q_k: k >= 0 required");
  if (method == CoefficientMethod::TensorQuadrature)
    return q_k_tensor(view, *disc, ix, is, fiber_index, k);
  const FiberOperator op = assemble(view, disc, fiber_index);
  const auto e = newton_coefficients(op.symmetrized, k);
  const auto s = minor_coefficients(op, k, e);
  return factorial(k) * s[static_cast<std::size_t>(k)](static_cast<Eigen::Index>(ix),
                                                       static_cast<Eigen::Index>(is));
}

SeriesResult determinant_series(const KernelView& view, const DiscretizationPtr& disc,
                                std::size_t fiber_index, Complex kappa,
                                const SeriesConfig& cfg) {
  cfg.validate();
  if (kappa == Complex(0.0)) return {1.0, 0.0, 0, true};
  const FiberOperator op = assemble(view, disc, fiber_index);
  const auto e = newton_coefficients(op.symmetrized, cfg.max_order);
  Complex value = 1.0;
  Complex kpow = 1.0;
  for (int k = 1; k <= cfg.max_order; ++k) {
    kpow *= -kappa;
    const Complex term = kpow * e[static_cast<std::size_t>(k)];  // (-kappa)^k/k! * d_k
    value += term;
    if (std::abs(term) <= cfg.tail_tol) return {value, std::abs(term), k, true};
  }
  const double tail = std::abs(kpow * e[static_cast<std::size_t>(cfg.max_order)]);
  return {value, tail, cfg.max_order, false};
}

MinorMatrixResult minor_series_matrix(const KernelView& view,
                                      const DiscretizationPtr& disc,
                                      std::size_t fiber_index, Complex kappa,
                                      const SeriesConfig& cfg) {
  cfg.validate();
  const FiberOperator op = assemble(view, disc, fiber_index);
  if (kappa == Complex(0.0)) return {op.samples, 0.0, 0, true};
  const auto e = newton_coefficients(op.symmetrized, cfg.max_order);
  const auto s = minor_coefficients(op, cfg.max_order, e);
  Eigen::MatrixXcd value = s[0];
  Complex kpow = 1.0;
  for (int k = 1; k <= cfg.max_order; ++k) {
    kpow *= -kappa;
    const Eigen::MatrixXcd term = kpow * s[static_cast<std::size_t>(k)];
    value += term;
    const double mag = term.cwiseAbs().maxCoeff();
    if (mag <= cfg.tail_tol) return {std::move(value), mag, k, true};
  }
  const double tail =
      (kpow * s[static_cast<std::size_t>(cfg.max_order)]).cwiseAbs().maxCoeff();
  return {std::move(value), tail, cfg.max_order, false};
}

SeriesResult minor_series(const KernelView& view, const DiscretizationPtr& disc,
                          std::size_t ix, std::size_t is, std::size_t fiber_index,
                          Complex kappa, const SeriesConfig& cfg) {
  const MinorMatrixResult m = minor_series_matrix(view, disc, fiber_index, kappa, cfg);
  return {m.values(static_cast<Eigen::Index>(ix), static_cast<Eigen::Index>(is)),
          m.tail_bound, m.order_used, m.converged};
}

Lemma1Report lemma1_checks(const KernelView& view, const DiscretizationPtr& disc,
                           Complex kappa, const SeriesConfig& cfg) {
  Lemma1Report rep;
  rep.all_finite = true;
  const std::size_t nf = disc->fiber.size();
  const std::size_t n = disc->space.size();
  rep.minor_l2_sq.resize(nf);
  rep.determinant.resize(nf);
  rep.series_converged.resize(nf);
  for (std::size_t j = 0; j < nf; ++j) {
    const SeriesResult det = determinant_series(view, disc, j, kappa, cfg);
    const MinorMatrixResult minor = minor_series_matrix(view, disc, j, kappa, cfg);
    rep.determinant[j] = det.value;
    rep.series_converged[j] = det.converged && minor.converged;
    double l2 = 0.0;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        l2 += disc->space.weight(a) * disc->space.weight(b) *
              std::norm(minor.values(static_cast<Eigen::Index>(a),
                                     static_cast<Eigen::Index>(b)));
    rep.minor_l2_sq[j] = l2;
    const bool finite = std::isfinite(l2) && std::isfinite(std::abs(det.value)) &&
                        minor.values.allFinite();
    rep.all_finite = rep.all_finite && finite;
  }
  return rep;
}

}  // namespace pie
