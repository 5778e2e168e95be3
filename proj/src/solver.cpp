#include "pie/solver.hpp"

#include <algorithm>
#include <cmath>

#include "pie/parallel.hpp"

namespace pie {

namespace {

struct FiberScan {
  Complex det;
  double sigma_min;
  double sigma_max;
  int nullity;
};

std::vector<FiberScan> scan_fibers(const KernelView& view, const DiscretizationPtr& disc,
                                   Complex kappa, const Thresholds& thr) {
  const std::size_t nf = disc->fiber.size();
  std::vector<FiberScan> out(nf);
  parallel_for(nf, thr.workers, [&](std::size_t j) {
    const FiberOperator op = assemble(view, disc, j);
    const FiberNullspace ns = fiber_nullspace(op, kappa, thr.singular_rel_tol);
    out[j] = {fiber_determinant(op, kappa), ns.sigma_min, ns.sigma_max, ns.dim};
  });
  return out;
}

// Weighted inner product of two node-sampled vectors.
Complex weighted_dot(const QuadratureGrid& g, const Eigen::VectorXcd& a,
                     const Eigen::VectorXcd& b) {
  Complex acc = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i)
    acc += g.weight(static_cast<std::size_t>(i)) * a[i] * std::conj(b[i]);
  return acc;
}

// Align `cur` (N x dc, weighted-orthonormal columns) to `prev` (N x dp).
Eigen::MatrixXcd align_basis(const QuadratureGrid& g, const Eigen::MatrixXcd& prev,
                             const Eigen::MatrixXcd& cur) {
  const Eigen::Index dp = prev.cols(), dc = cur.cols();
  if (dp == 0 || dc == 0) return cur;
  // overlap(a, b) = cur_a^H W prev_b
  Eigen::MatrixXcd overlap(dc, dp);
  for (Eigen::Index a = 0; a < dc; ++a)
    for (Eigen::Index b = 0; b < dp; ++b)
      overlap(a, b) = weighted_dot(g, prev.col(b), cur.col(a));
  if (dp == dc) {
    // Unitary Procrustes: cur * U V^H best matches prev.
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(overlap,
                                           Eigen::ComputeFullU | Eigen::ComputeFullV);
    return cur * (svd.matrixU() * svd.matrixV().adjoint());
  }
  // Unequal nullity across fibers: greedy column matching with phase fix.
  std::vector<bool> used(static_cast<std::size_t>(dc), false);
  Eigen::MatrixXcd result(cur.rows(), dc);
  Eigen::Index next = 0;
  for (Eigen::Index b = 0; b < dp && next < dc; ++b) {
    Eigen::Index best = -1;
    double best_mag = 0.0;
    for (Eigen::Index a = 0; a < dc; ++a) {
      if (used[static_cast<std::size_t>(a)]) continue;
      const double mag = std::abs(overlap(a, b));
      if (mag > best_mag) {
        best_mag = mag;
        best = a;
      }
    }
    if (best < 0) break;
    used[static_cast<std::size_t>(best)] = true;
    Complex phase = overlap(best, b);
    if (std::abs(phase) > 0.0) phase /= std::abs(phase);
    result.col(next++) = cur.col(best) * phase;
  }
  for (Eigen::Index a = 0; a < dc; ++a)
    if (!used[static_cast<std::size_t>(a)]) result.col(next++) = cur.col(a);
  return result;
}

NullFamily build_family(const KernelView& side_view, const DiscretizationPtr& disc,
                        Complex kappa_side, const NablaMask& deficient,
                        const Thresholds& thr, NullSide side) {
  const std::size_t n = disc->space.size();
  const std::size_t nf = disc->fiber.size();

  std::vector<Eigen::MatrixXcd> bases(nf);
  parallel_for(nf, thr.workers, [&](std::size_t j) {
    if (!deficient.flags[j]) return;
    const FiberOperator op = assemble(side_view, disc, j);
    bases[j] = fiber_nullspace(op, kappa_side, thr.singular_rel_tol).basis;
  });

  int m = 0;
  for (std::size_t j = 0; j < nf; ++j)
    if (deficient.flags[j]) m = std::max(m, static_cast<int>(bases[j].cols()));

  // Phase-align fiber by fiber, seeding from the first deficient fiber.
  const Eigen::MatrixXcd* prev = nullptr;
  for (std::size_t j = 0; j < nf; ++j) {
    if (!deficient.flags[j]) continue;
    if (prev) bases[j] = align_basis(disc->space, *prev, bases[j]);
    prev = &bases[j];
  }

  std::vector<FiberFunction> raw;
  for (int k = 0; k < m; ++k) {
    Eigen::MatrixXcd vals = Eigen::MatrixXcd::Zero(n, nf);
    for (std::size_t j = 0; j < nf; ++j)
      if (deficient.flags[j] && k < bases[j].cols()) vals.col(j) = bases[j].col(k);
    raw.emplace_back(disc, std::move(vals));
  }

  OrthonormalizeResult ortho = l0_orthonormalize(raw, thr.rank_tol);

  NullFamily fam;
  fam.functions = std::move(ortho.functions);
  fam.support = std::move(ortho.support);
  fam.count = m;
  fam.side = side;

  // Homogeneous-equation residual per member, restricted to the support.
  for (std::size_t k = 0; k < fam.functions.size(); ++k) {
    const FiberFunction& f = fam.functions[k];
    const FiberFunction sf = apply_pio(side_view, f, thr.workers);
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < nf; ++j) {
      if (!fam.support[k].flags[j]) continue;
      const Eigen::VectorXcd r = f.values().col(j) - kappa_side * sf.values().col(j);
      num += disc->fiber.weight(j) * weighted_dot(disc->space, r, r).real();
      den += disc->fiber.weight(j) *
             weighted_dot(disc->space, f.values().col(j), f.values().col(j)).real();
    }
    if (den > 0.0)
      fam.max_residual = std::max(fam.max_residual, std::sqrt(num / den));
  }
  return fam;
}

}  // namespace

std::string kappa_kind_name(KappaKind k) {
  switch (k) {
    case KappaKind::Regular: return "regular";
    case KappaKind::Characteristic: return "characteristic";
    case KappaKind::SingularFibers: return "singular-fibers";
  }
  return "?";
}

Classification classify(const KernelView& view, const DiscretizationPtr& disc,
                        Complex kappa, const Thresholds& thr) {
  const std::size_t nf = disc->fiber.size();
  const std::vector<FiberScan> scan = scan_fibers(view, disc, kappa, thr);

  NablaMask deficient = NablaMask::empty(nf);
  Eigen::VectorXcd dets(nf);
  int m = 0;
  for (std::size_t j = 0; j < nf; ++j) {
    dets[static_cast<Eigen::Index>(j)] = scan[j].det;
    if (scan[j].nullity > 0) {
      deficient.flags[j] = true;
      m = std::max(m, scan[j].nullity);
    }
  }
  const double frac = deficient.fraction();

  Classification cls{kappa,
                     KappaKind::Regular,
                     0,
                     std::move(deficient),
                     L0Scalar(disc, std::move(dets)),
                     frac};
  if (frac >= thr.tau) {
    cls.kind = KappaKind::Characteristic;
    cls.m = m;
  } else if (frac > 0.0) {
    cls.kind = KappaKind::SingularFibers;
  }
  return cls;
}

std::vector<CharNumber> find_characteristic_numbers(const KernelView& view,
                                                    const DiscretizationPtr& disc,
                                                    const SearchRegion& region,
                                                    const Thresholds& thr) {
  const std::size_t nf = disc->fiber.size();

  // Fiber eigenvalues of the symmetrized sample matrix, sorted per fiber.
  std::vector<std::vector<Complex>> eigs(nf);
  parallel_for(nf, thr.workers, [&](std::size_t j) {
    const FiberOperator op = assemble(view, disc, j);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(op.symmetrized, false);
    std::vector<Complex> vals(es.eigenvalues().data(),
                              es.eigenvalues().data() + es.eigenvalues().size());
    double scale = 0.0;
    for (Complex v : vals) scale = std::max(scale, std::abs(v));
    std::vector<Complex> kept;
    for (Complex v : vals)
      if (std::abs(v) > 1e-10 * std::max(1.0, scale)) kept.push_back(v);
    std::sort(kept.begin(), kept.end(), [](Complex a, Complex b) {
      return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    eigs[j] = std::move(kept);
  });

  struct Cluster {
    Complex sum = 0.0;
    std::size_t count = 0;
    std::vector<bool> fibers;
    Complex center() const { return sum / static_cast<double>(count); }
  };
  std::vector<Cluster> clusters;
  for (std::size_t j = 0; j < nf; ++j) {
    for (Complex lambda : eigs[j]) {
      const Complex kappa = 1.0 / lambda;
      Cluster* home = nullptr;
      for (auto& c : clusters) {
        const Complex ctr = c.center();
        if (std::abs(kappa - ctr) <= thr.cluster_tol * std::max(1.0, std::abs(ctr))) {
          home = &c;
          break;
        }
      }
      if (!home) {
        clusters.push_back({0.0, 0, std::vector<bool>(nf, false)});
        home = &clusters.back();
      }
      home->sum += kappa;
      home->count += 1;
      home->fibers[j] = true;
    }
  }

  std::vector<CharNumber> found;
  for (const auto& c : clusters) {
    std::size_t present = 0;
    for (bool b : c.fibers) present += b ? 1 : 0;
    const double frac = static_cast<double>(present) / static_cast<double>(nf);
    if (frac < thr.tau) continue;
    const Complex kappa0 = c.center();
    if (!region.contains(kappa0)) continue;
    bool dup = false;
    for (const auto& f : found)
      if (std::abs(f.kappa - kappa0) <= thr.cluster_tol * std::max(1.0, std::abs(kappa0)))
        dup = true;
    if (dup) continue;
    const Classification cls = classify(view, disc, kappa0, thr);
    if (cls.kind != KappaKind::Characteristic) continue;
    found.push_back({kappa0, cls.m, frac});
  }
  std::sort(found.begin(), found.end(), [](const CharNumber& a, const CharNumber& b) {
    return a.kappa.real() != b.kappa.real() ? a.kappa.real() < b.kappa.real()
                                            : a.kappa.imag() < b.kappa.imag();
  });
  return found;
}

NullFamilies null_families(const KernelView& view, const DiscretizationPtr& disc,
                           Complex kappa0, const Thresholds& thr,
                           const NullFamilyOptions& opts) {
  const Classification cls = classify(view, disc, kappa0, thr);
  if (cls.kind != KappaKind::Characteristic)
    throw std::invalid_argument("null_families: kappa is not characteristic");

  NullFamilies fams;
  fams.direct =
      build_family(view, disc, kappa0, cls.deficient, thr, NullSide::Direct);
  fams.adjoint = build_family(view.adjoint(), disc, std::conj(kappa0), cls.deficient,
                              thr, NullSide::Adjoint);
  fams.adjoint.count += opts.debug_adjoint_pad;
  if (fams.direct.count != fams.adjoint.count)
    throw InternalConsistencyError(
        "direct and adjoint nullspace counts differ (" +
        std::to_string(fams.direct.count) + " vs " +
        std::to_string(fams.adjoint.count) + ")");
  return fams;
}

SolvabilityResult check_solvability(const FiberFunction& g0, const NullFamily& adjoint,
                                    double tol) {
  SolvabilityResult res;
  const double g0_norm = g0.norm();
  for (const auto& g : adjoint.functions) {
    L0Scalar c = inner(g0, g);
    const double v = c.max_abs();
    res.max_violation = std::max(res.max_violation, v);
    if (v > tol * g0_norm && res.solvable) {
      res.solvable = false;
      res.witness = std::move(c);
    }
  }
  return res;
}

FiberFunction apply_pio(const KernelView& view, const FiberFunction& f, int workers) {
  const auto& disc = f.disc();
  const std::size_t nf = disc->fiber.size();
  Eigen::MatrixXcd out(disc->space.size(), nf);
  parallel_for(nf, workers, [&](std::size_t j) {
    const FiberOperator op = assemble(view, disc, j);
    Eigen::VectorXcd col = f.values().col(j);
    for (Eigen::Index i = 0; i < col.size(); ++i)
      col[i] *= disc->space.weight(static_cast<std::size_t>(i));
    out.col(j) = op.samples * col;
  });
  return FiberFunction(disc, std::move(out));
}

double equation_residual(const KernelView& view, Complex kappa, const FiberFunction& f,
                         const FiberFunction& g0,
                         const std::vector<std::size_t>& excluded, int workers) {
  const auto& disc = f.disc();
  const std::size_t nf = disc->fiber.size();
  std::vector<bool> skip(nf, false);
  for (std::size_t j : excluded) skip[j] = true;

  const FiberFunction sf = apply_pio(view, f, workers);
  double rnorm = 0.0, fnorm = 0.0, gnorm = 0.0;
  for (std::size_t j = 0; j < nf; ++j) {
    if (skip[j]) continue;
    const Eigen::VectorXcd r =
        f.values().col(j) - kappa * sf.values().col(j) - g0.values().col(j);
    const double wj = disc->fiber.weight(j);
    rnorm += wj * weighted_dot(disc->space, r, r).real();
    fnorm += wj *
             weighted_dot(disc->space, f.values().col(j), f.values().col(j)).real();
    gnorm += wj *
             weighted_dot(disc->space, g0.values().col(j), g0.values().col(j)).real();
  }
  const double scale = std::sqrt(fnorm) + std::sqrt(gnorm);
  return scale > 0.0 ? std::sqrt(rnorm) / scale : std::sqrt(rnorm);
}

namespace {

// Per-fiber resolvent solve, skipping excluded fibers (left as zeros).
FiberFunction solve_fiberwise(const KernelView& view, const DiscretizationPtr& disc,
                              Complex kappa, const FiberFunction& g0,
                              const std::vector<bool>& skip, int workers) {
  const std::size_t nf = disc->fiber.size();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(disc->space.size(), nf);
  parallel_for(nf, workers, [&](std::size_t j) {
    if (skip[j]) return;
    const FiberOperator op = assemble(view, disc, j);
    out.col(j) = fiber_solve(op, kappa, g0.values().col(j));
  });
  return FiberFunction(disc, std::move(out));
}

}  // namespace

SolveReport solve(const KernelView& view, const DiscretizationPtr& disc, Complex kappa,
                  const FiberFunction& g0, const Thresholds& thr) {
  const std::size_t nf = disc->fiber.size();
  SolveReport rep;
  rep.classification = classify(view, disc, kappa, thr);

  if (rep.classification.kind != KappaKind::Characteristic) {
    std::vector<bool> skip(nf, false);
    for (std::size_t j = 0; j < nf; ++j) {
      if (rep.classification.deficient.flags[j]) {
        skip[j] = true;
        rep.excluded_fibers.push_back(j);
      }
    }
    rep.solution = solve_fiberwise(view, disc, kappa, g0, skip, thr.workers);
    rep.residual =
        equation_residual(view, kappa, *rep.solution, g0, rep.excluded_fibers,
                          thr.workers);
    return rep;
  }

  // Characteristic case: Fredholm alternative via deflation.
  rep.families = null_families(view, disc, kappa, thr);
  rep.solvability = check_solvability(g0, rep.families->adjoint, thr.solve_tol);
  if (!rep.solvability.solvable) return rep;

  std::vector<std::pair<FiberFunction, FiberFunction>> pairs;
  for (int k = 0; k < rep.families->direct.count; ++k)
    pairs.emplace_back(rep.families->direct.functions[static_cast<std::size_t>(k)],
                       rep.families->adjoint.functions[static_cast<std::size_t>(k)]);
  const KernelView deflated = view.deflated(std::move(pairs));

  FiberFunction f0 = FiberFunction::zero(disc);
  try {
    f0 = solve_fiberwise(deflated, disc, kappa, g0, std::vector<bool>(nf, false),
                         thr.workers);
  } catch (const SingularFiberError& e) {
    throw InternalConsistencyError(
        "deflated fiber unexpectedly singular at index " +
        std::to_string(e.fiber_index));
  }

  for (const auto& f : rep.families->direct.functions)
    rep.max_null_overlap = std::max(rep.max_null_overlap, inner(f0, f).max_abs());

  rep.residual = equation_residual(view, kappa, f0, g0, {}, thr.workers);
  if (rep.residual > thr.solve_tol)
    throw InternalConsistencyError(
        "characteristic solve residual " + std::to_string(rep.residual) +
        " exceeds tolerance");
  rep.solution = std::move(f0);
  return rep;
}

}  // namespace pie
