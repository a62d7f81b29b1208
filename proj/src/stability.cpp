#include "gradstab/stability.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace gradstab {

namespace {

using Rat = boost::multiprecision::cpp_rational;
const double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Exact two-phase simplex: max c.z subject to A z = b, z >= 0.
// Sizes here are tiny (<= ~70 variables, <= ~8 rows), Bland's rule keeps the
// iteration finite.
// ---------------------------------------------------------------------------
struct LPSolution {
  bool feasible = false;
  Rat value = 0;
  std::vector<Rat> z;
};

class ExactSimplex {
 public:
  ExactSimplex(std::vector<std::vector<Rat>> a, std::vector<Rat> b,
               std::vector<Rat> c)
      : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)) {}

  LPSolution solve() {
    const int m = static_cast<int>(a_.size());
    const int n = m > 0 ? static_cast<int>(a_[0].size()) : 0;
    for (int i = 0; i < m; ++i)
      if (b_[i] < 0) {
        for (auto& v : a_[i]) v = -v;
        b_[i] = -b_[i];
      }
    // Tableau with artificial columns.
    rows_ = m;
    cols_ = n + m + 1;
    t_.assign(m, std::vector<Rat>(cols_, 0));
    basis_.resize(m);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) t_[i][j] = a_[i][j];
      t_[i][n + i] = 1;
      t_[i][cols_ - 1] = b_[i];
      basis_[i] = n + i;
    }
    // Phase 1: maximize -sum(artificials).
    std::vector<Rat> obj(cols_, 0);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < cols_; ++j) obj[j] += t_[i][j];
    for (int i = 0; i < m; ++i) obj[n + i] = 0;
    if (!iterate(obj, n + m)) return {};
    Rat phase1 = obj[cols_ - 1];
    if (phase1 != 0) return {};  // infeasible
    // Remove artificials from the basis.
    for (int i = 0; i < m; ++i) {
      if (basis_[i] < n) continue;
      int pivot = -1;
      for (int j = 0; j < n; ++j)
        if (t_[i][j] != 0) {
          pivot = j;
          break;
        }
      if (pivot >= 0) do_pivot(i, pivot);
    }
    // Phase 2.
    std::vector<Rat> obj2(cols_, 0);
    for (int j = 0; j < n; ++j) obj2[j] = -c_[j];
    for (int i = 0; i < m; ++i) {
      if (basis_[i] < n && obj2[basis_[i]] != 0) {
        Rat factor = obj2[basis_[i]];
        for (int j = 0; j < cols_; ++j) obj2[j] -= factor * t_[i][j];
      }
    }
    if (!iterate(obj2, n)) return {};
    LPSolution out;
    out.feasible = true;
    out.value = obj2[cols_ - 1];
    out.z.assign(n, 0);
    for (int i = 0; i < m; ++i)
      if (basis_[i] < n) out.z[basis_[i]] = t_[i][cols_ - 1];
    return out;
  }

 private:
  // Maximizes with reduced-cost row `obj` over the first `usable` columns.
  // Convention: entering column has obj[j] < 0; obj[last] carries the value.
  bool iterate(std::vector<Rat>& obj, int usable) {
    for (int guard = 0; guard < 20000; ++guard) {
      int enter = -1;
      for (int j = 0; j < usable; ++j)
        if (obj[j] < 0) {
          enter = j;
          break;  // Bland
        }
      if (enter < 0) return true;
      int leave = -1;
      Rat best = 0;
      for (int i = 0; i < rows_; ++i) {
        if (t_[i][enter] <= 0) continue;
        Rat ratio = t_[i][cols_ - 1] / t_[i][enter];
        if (leave < 0 || ratio < best ||
            (ratio == best && basis_[i] < basis_[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave < 0) return false;  // unbounded
      do_pivot(leave, enter);
      Rat factor = obj[enter];
      if (factor != 0)
        for (int j = 0; j < cols_; ++j) obj[j] -= factor * t_[leave][j];
    }
    return false;
  }

  void do_pivot(int row, int col) {
    Rat piv = t_[row][col];
    for (int j = 0; j < cols_; ++j) t_[row][j] /= piv;
    for (int i = 0; i < rows_; ++i) {
      if (i == row || t_[i][col] == 0) continue;
      Rat factor = t_[i][col];
      for (int j = 0; j < cols_; ++j) t_[i][j] -= factor * t_[row][j];
    }
    basis_[row] = col;
  }

  std::vector<std::vector<Rat>> a_;
  std::vector<Rat> b_;
  std::vector<Rat> c_;
  std::vector<std::vector<Rat>> t_;
  std::vector<int> basis_;
  int rows_ = 0, cols_ = 0;
};

using RatVec = std::vector<Rat>;

bool hull_contains_zero(const std::vector<RatVec>& w, int dim) {
  const int m = static_cast<int>(w.size());
  std::vector<std::vector<Rat>> a(dim + 1, std::vector<Rat>(m, 0));
  std::vector<Rat> b(dim + 1, 0);
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < dim; ++k) a[k][i] = w[i][k];
    a[dim][i] = 1;
  }
  b[dim] = 1;
  return ExactSimplex(a, b, std::vector<Rat>(m, 0)).solve().feasible;
}

// Maximal t with 0 = sum lambda_i w_i, sum lambda_i = 1, lambda_i >= t >= 0.
// Negative return means 0 is not even in the hull.
Rat relint_margin(const std::vector<RatVec>& w, int dim) {
  const int m = static_cast<int>(w.size());
  const int nv = m + 1;  // s_1..s_m, t
  std::vector<std::vector<Rat>> a(dim + 1, std::vector<Rat>(nv, 0));
  std::vector<Rat> b(dim + 1, 0);
  for (int k = 0; k < dim; ++k) {
    Rat wsum = 0;
    for (int i = 0; i < m; ++i) {
      a[k][i] = w[i][k];
      wsum += w[i][k];
    }
    a[k][m] = wsum;
  }
  for (int i = 0; i < m; ++i) a[dim][i] = 1;
  a[dim][m] = m;
  b[dim] = 1;
  std::vector<Rat> c(nv, 0);
  c[m] = 1;
  LPSolution sol = ExactSimplex(a, b, c).solve();
  if (!sol.feasible) return Rat(-1);
  return sol.value;
}

// A direction beta with <w_i, beta> <= -1 for all i (exists iff 0 is outside
// the hull).
std::optional<RatVec> separating_direction(const std::vector<RatVec>& w, int dim) {
  const int m = static_cast<int>(w.size());
  const int nv = 2 * dim + m;  // beta = p - q, then slacks
  std::vector<std::vector<Rat>> a(m, std::vector<Rat>(nv, 0));
  std::vector<Rat> b(m, 0);
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < dim; ++k) {
      a[i][k] = w[i][k];
      a[i][dim + k] = -w[i][k];
    }
    a[i][2 * dim + i] = 1;
    b[i] = -1;
  }
  LPSolution sol = ExactSimplex(a, b, std::vector<Rat>(nv, 0)).solve();
  if (!sol.feasible) return std::nullopt;
  RatVec beta(dim);
  for (int k = 0; k < dim; ++k) beta[k] = sol.z[k] - sol.z[dim + k];
  return beta;
}

int rational_rank(std::vector<RatVec> rows, int dim) {
  int rank = 0;
  for (int col = 0; col < dim && rank < static_cast<int>(rows.size()); ++col) {
    int pivot = -1;
    for (int r = rank; r < static_cast<int>(rows.size()); ++r)
      if (rows[r][col] != 0) {
        pivot = r;
        break;
      }
    if (pivot < 0) continue;
    std::swap(rows[rank], rows[pivot]);
    for (int r = 0; r < static_cast<int>(rows.size()); ++r) {
      if (r == rank || rows[r][col] == 0) continue;
      Rat factor = rows[r][col] / rows[rank][col];
      for (int k = col; k < dim; ++k) rows[r][k] -= factor * rows[rank][k];
    }
    ++rank;
  }
  return rank;
}

Rat rationalize(double v) {
  // Weights in the catalog are integers or simple fractions; snap to a
  // denominator that covers both, otherwise keep a fine approximation.
  const long long den = 720720;
  return Rat(static_cast<long long>(std::llround(v * den)), den);
}

}  // namespace

const char* stability_class_name(StabilityClass klass) {
  switch (klass) {
    case StabilityClass::Stable: return "Stable";
    case StabilityClass::Polystable: return "Polystable";
    case StabilityClass::StrictlySemistable: return "StrictlySemistable";
    case StabilityClass::Unstable: return "Unstable";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Torus oracle
// ---------------------------------------------------------------------------
TorusVerdict torus_oracle(const ModelSpace& space, const ModelPoint& x) {
  const auto& setup = space.setup;
  const int n = setup->n();
  const bool trace_free = setup->trace_free();

  // Coordinate weights pi_a(E_ii) as rational diagonal vectors.
  std::vector<RatVec> coord_weight(n, RatVec(n, 0));
  for (int i = 0; i < n; ++i) {
    coord_weight[i][i] = 1;
    if (trace_free)
      for (int k = 0; k < n; ++k) coord_weight[i][k] -= Rat(1, n);
  }

  bool exact = true;
  std::vector<Rat> factor_weights;
  for (int j = 0; j < space.factors(); ++j) {
    double w = space.kind == ModelKind::Configuration ? space.weights[j] : 1.0;
    Rat r = rationalize(w);
    if (std::abs(w - std::round(w)) > 1e-12) exact = false;
    factor_weights.push_back(r);
  }

  // Support sets per factor.
  std::vector<std::vector<int>> supports;
  for (const Vec& v : x.reps) {
    std::vector<int> s;
    double scale = std::max(1.0, v.cwiseAbs().maxCoeff());
    for (int i = 0; i < n; ++i)
      if (std::abs(v(i)) > 1e-12 * scale) s.push_back(i);
    supports.push_back(std::move(s));
  }

  TorusVerdict out;
  out.exact = exact;

  if (space.kind == ModelKind::Linear) {
    // Every linear point is semistable for the torus; position of 0 in the
    // support polytope separates stable / polystable / strictly semistable.
    if (supports[0].empty()) {
      out.klass = StabilityClass::Polystable;  // the origin
      return out;
    }
    std::vector<RatVec> w;
    for (int i : supports[0]) w.push_back(coord_weight[i]);
    Rat margin = relint_margin(w, n);
    if (margin > 0) {
      out.klass = rational_rank(w, n) == setup->dim_a()
                      ? StabilityClass::Stable
                      : StabilityClass::Polystable;
    } else {
      out.klass = StabilityClass::StrictlySemistable;
    }
    return out;
  }

  // Minkowski sum of the per-factor weight sets.
  std::vector<RatVec> total{RatVec(n, 0)};
  for (int j = 0; j < space.factors(); ++j) {
    std::vector<RatVec> next;
    for (const auto& base : total)
      for (int i : supports[j]) {
        RatVec v = base;
        for (int k = 0; k < n; ++k) v[k] += factor_weights[j] * coord_weight[i][k];
        next.push_back(std::move(v));
      }
    total = std::move(next);
    if (total.size() > 20000)
      throw Error("torus_oracle: weight set too large");
  }
  std::sort(total.begin(), total.end());
  total.erase(std::unique(total.begin(), total.end()), total.end());

  if (!hull_contains_zero(total, n)) {
    out.klass = StabilityClass::Unstable;
    auto beta = separating_direction(total, n);
    if (beta) {
      Mat m = Mat::Zero(n, n);
      for (int k = 0; k < n; ++k)
        m(k, k) = static_cast<double>((*beta)[k].convert_to<double>());
      Mat proj = setup->project_p(m);
      double len = std::sqrt(std::max(0.0, inner(proj, proj)));
      if (len > 1e-12) out.destabilizer = Direction(setup, (proj / len).eval());
    }
    return out;
  }
  Rat margin = relint_margin(total, n);
  if (margin > 0) {
    out.klass = rational_rank(total, n) == setup->dim_a()
                    ? StabilityClass::Stable
                    : StabilityClass::Polystable;
  } else {
    out.klass = StabilityClass::StrictlySemistable;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Configuration multiplicity oracle
// ---------------------------------------------------------------------------
MultiplicityVerdict configuration_multiplicity_oracle(const ModelSpace& space,
                                                      const ModelPoint& x) {
  if (space.kind == ModelKind::Linear)
    throw Error("multiplicity oracle needs projective factors");
  const int m = space.factors();
  std::vector<int> cluster(m, -1);
  std::vector<double> mult;
  for (int j = 0; j < m; ++j) {
    double wj = space.kind == ModelKind::Configuration ? space.weights[j] : 1.0;
    for (size_t c = 0; c < mult.size(); ++c) {
      int rep = static_cast<int>(
          std::find(cluster.begin(), cluster.end(), static_cast<int>(c)) -
          cluster.begin());
      double overlap = std::abs(x.reps[j].dot(x.reps[rep])) /
                       (x.reps[j].norm() * x.reps[rep].norm());
      if (overlap > 1.0 - 1e-9) {
        cluster[j] = static_cast<int>(c);
        mult[c] += wj;
        break;
      }
    }
    if (cluster[j] < 0) {
      cluster[j] = static_cast<int>(mult.size());
      mult.push_back(wj);
    }
  }
  MultiplicityVerdict out;
  out.distinct_points = static_cast<int>(mult.size());
  for (double v : mult) {
    out.total_weight += v;
    out.max_multiplicity = std::max(out.max_multiplicity, v);
  }
  const double half = 0.5 * out.total_weight;
  const double tol = 1e-9 * std::max(1.0, out.total_weight);
  if (out.max_multiplicity > half + tol) {
    out.klass = StabilityClass::Unstable;
  } else if (std::abs(out.max_multiplicity - half) <= tol) {
    out.klass = out.distinct_points == 2 ? StabilityClass::Polystable
                                         : StabilityClass::StrictlySemistable;
  } else {
    out.klass = StabilityClass::Stable;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Centralizer reduction
// ---------------------------------------------------------------------------
namespace {

// Orthonormal basis of {xi in span(sub): [xi, beta] = 0, <xi, beta> = 0}.
std::vector<Mat> shrink_subspace(const std::vector<Mat>& sub, const Direction& beta) {
  const int m = static_cast<int>(sub.size());
  if (m == 0) return {};
  const int n = static_cast<int>(beta.matrix().rows());
  RealMat a(2 * n * n + 1, m);
  for (int j = 0; j < m; ++j) {
    Mat br = bracket(beta.matrix(), sub[j]);
    for (int c = 0; c < n; ++c)
      for (int r = 0; r < n; ++r) {
        a(c * n + r, j) = br(r, c).real();
        a(n * n + c * n + r, j) = br(r, c).imag();
      }
    a(2 * n * n, j) = inner(sub[j], beta.matrix());
  }
  Eigen::JacobiSVD<RealMat> svd(a, Eigen::ComputeFullV);
  double thresh = 1e-9 * std::max(1.0, svd.singularValues().size() > 0
                                           ? svd.singularValues()(0)
                                           : 0.0);
  std::vector<Mat> out;
  for (int j = 0; j < m; ++j) {
    double sv = j < svd.singularValues().size() ? svd.singularValues()(j) : 0.0;
    if (sv <= thresh) {
      Mat elem = Mat::Zero(n, n);
      for (int q = 0; q < m; ++q) elem += svd.matrixV()(q, j) * sub[q];
      out.push_back(std::move(elem));
    }
  }
  return out;
}

}  // namespace

ReductionChain centralizer_reduction(const ModelSpace& space, const ModelPoint& x,
                                     const ReductionOptions& opts) {
  const auto& setup = space.setup;
  ReductionChain chain{{}, x, identity_element(setup), 0.0};
  ModelPoint current = x;
  std::vector<Mat> sub = setup->p_basis();
  const int max_steps = setup->dim_a();

  PropernessOptions popts;
  popts.sweep = opts.sweep;
  popts.tol = opts.tol;

  for (int step = 0; step <= max_steps; ++step) {
    double mu_norm = gradient_map(space, current).norm;
    if (mu_norm < opts.tol) {
      chain.terminal = current;
      chain.terminal_grad_norm = mu_norm;
      return chain;
    }

    auto push_step = [&](const Direction& beta, double lam) {
      FlowLimit lim = flow_limit(space, current, beta);
      if (lim.status != FlowStatus::Converged)
        throw NumericFailureError("reduction flow diverged on a zero-weight direction");
      chain.steps.push_back(ReductionStep{beta, *lim.point, lam});
      current = *lim.point;
      sub = shrink_subspace(sub, beta);
    };

    PropernessResult prop = properness_estimate(space, current, sub, popts);
    if (!prop.proper) {
      if (prop.witness_lambda < -opts.tol)
        throw NotSemistableError("negative maximal weight found in the chain");
      if (static_cast<int>(chain.steps.size()) >= max_steps)
        throw BudgetExceededError("reduction chain exceeded dim(a)");
      push_step(*prop.witness, prop.witness_lambda);
      continue;
    }

    DescentOptions dopts;
    dopts.tol = opts.tol;
    dopts.budget = opts.budget;
    dopts.subspace = sub;
    DescentResult d = kn_descend(space, current, dopts);
    if (d.status == DescentStatus::Converged) {
      chain.terminal = act(space, d.minimizer.matrix, current);
      chain.terminal_minimizer = d.minimizer;
      chain.terminal_grad_norm = gradient_map(space, chain.terminal).norm;
      return chain;
    }
    if (d.status == DescentStatus::DivergentRay && d.ray_direction) {
      double lam = max_weight(space, current, *d.ray_direction).value;
      if (lam < -opts.tol)
        throw NotSemistableError("descent ray certifies a negative weight");
      if (lam <= opts.tol) {
        if (static_cast<int>(chain.steps.size()) >= max_steps)
          throw BudgetExceededError("reduction chain exceeded dim(a)");
        push_step(*d.ray_direction, lam);
        continue;
      }
    }
    throw BudgetExceededError("centralizer reduction made no progress");
  }
  throw BudgetExceededError("centralizer reduction exceeded dim(a) steps");
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------
StabilityVerdict classify(const ModelSpace& space, const ModelPoint& x,
                          const ClassifyOptions& opts) {
  StabilityVerdict out;
  out.tol = opts.tol;
  out.budget = opts.budget;

  DescentOptions dopts;
  dopts.tol = opts.tol;
  dopts.budget = opts.budget;

  DescentResult d;
  try {
    d = kn_descend(space, x, dopts);
  } catch (const BudgetExceededError&) {
    throw UndecidedError("classification budget exhausted before a verdict");
  }

  if (d.status == DescentStatus::Converged) {
    ModelPoint x0 = act(space, d.minimizer.matrix, x);
    int dim = stabilizer_p_dimension(space, x0);
    out.klass = dim == 0 ? StabilityClass::Stable : StabilityClass::Polystable;
    out.minimizer = MinimizerCertificate{d.minimizer, d.final_grad_norm, dim};
    return out;
  }
  if (d.status == DescentStatus::Stalled)
    throw UndecidedError("descent stalled without a verdict");

  // Divergent ray.
  if (d.inf_grad_norm < opts.tol) {
    out.klass = StabilityClass::StrictlySemistable;
    ReductionOptions ropts;
    ropts.tol = opts.tol;
    ropts.budget = opts.budget;
    ropts.sweep = opts.sweep;
    out.chain = centralizer_reduction(space, x, ropts);
    return out;
  }

  // Candidate destabilizers: the negative gradient direction at the end of
  // the ray, the ray direction itself, then the adapted sweep.
  std::vector<Direction> candidates;
  ModelPoint end_point = act(space, d.minimizer.matrix, x);
  GradientValue mu_end = gradient_map(space, end_point);
  if (mu_end.norm > 1e-12)
    candidates.emplace_back(space.setup, (-mu_end.matrix / mu_end.norm).eval());
  if (d.ray_direction) candidates.push_back(*d.ray_direction);
  for (auto& c : adapted_candidates(space, x, space.setup->p_basis()))
    candidates.push_back(std::move(c));

  const Direction* best = nullptr;
  double best_ratio = 0.0;
  std::vector<double> lambdas(candidates.size());
  for (size_t i = 0; i < candidates.size(); ++i) {
    double lam = max_weight(space, x, candidates[i]).value;
    lambdas[i] = lam;
    if (lam < -1e-12) {
      double ratio = -lam / candidates[i].norm();
      if (ratio > best_ratio) {
        best_ratio = ratio;
        best = &candidates[i];
      }
    }
  }
  if (!best)
    throw UndecidedError("ray detected but no destabilizing direction certified");
  out.klass = StabilityClass::Unstable;
  out.destabilizer = DestabilizingCertificate{
      *best, max_weight(space, x, *best).value};
  return out;
}

// ---------------------------------------------------------------------------
// Commuting vector fields
// ---------------------------------------------------------------------------
namespace {

// Simultaneous spectrum of two commuting symmetric operators.
std::vector<std::pair<double, double>> simultaneous_spectrum(const RealMat& a,
                                                             const RealMat& b) {
  Eigen::SelfAdjointEigenSolver<RealMat> ea(a);
  const RealVec& av = ea.eigenvalues();
  const int dim = static_cast<int>(av.size());
  std::vector<std::pair<double, double>> out;
  int start = 0;
  const double tie = 1e-6 * std::max(1.0, av.cwiseAbs().maxCoeff());
  while (start < dim) {
    int stop = start + 1;
    while (stop < dim && std::abs(av(stop) - av(start)) < tie) ++stop;
    RealMat block = ea.eigenvectors().middleCols(start, stop - start);
    RealMat bb = block.transpose() * b * block;
    Eigen::SelfAdjointEigenSolver<RealMat> eb(bb);
    for (int i = 0; i < stop - start; ++i)
      out.emplace_back(av(start), eb.eigenvalues()(i));
    start = stop;
  }
  return out;
}

// Deterministic probe points: common eigenvectors, eigenspace mixtures for
// each field, and generic Halton points.
std::vector<ModelPoint> probe_grid(const ModelSpace& space, const Direction& alpha,
                                   const Direction& beta, int count) {
  const int n = space.setup->n();
  std::vector<Vec> seeds;

  // Common eigenbasis of the commuting matrices.
  Direction combo(space.setup,
                  (beta.matrix() + 0.318309886183790 * alpha.matrix()).eval());
  for (int i = 0; i < n; ++i) seeds.push_back(combo.eigenvectors().col(i));

  auto eigen_mixtures = [&](const Direction& d) {
    const RealVec& ev = d.eigenvalues();
    int start = 0;
    while (start < n) {
      int stop = start + 1;
      while (stop < n && std::abs(ev(stop) - ev(start)) < 1e-9) ++stop;
      if (stop - start > 1) {
        Vec mix = Vec::Zero(n);
        for (int i = start; i < stop; ++i)
          mix += (1.0 + 0.1 * (i - start)) * d.eigenvectors().col(i);
        seeds.push_back(mix.normalized());
      }
      start = stop;
    }
  };
  eigen_mixtures(alpha);
  eigen_mixtures(beta);

  const bool cx = space.field == FieldKind::Complex;
  auto halton = [](int index, int base) {
    double f = 1.0, r = 0.0;
    while (index > 0) {
      f /= base;
      r += f * (index % base);
      index /= base;
    }
    return r;
  };
  static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (int idx = 1; static_cast<int>(seeds.size()) < count; ++idx) {
    Vec v(n);
    for (int i = 0; i < n; ++i) {
      double re = halton(idx, primes[(2 * i) % 12]) - 0.5;
      double im = cx ? halton(idx, primes[(2 * i + 1) % 12]) - 0.5 : 0.0;
      v(i) = Complex(re, im);
    }
    if (v.norm() < 1e-9) continue;
    seeds.push_back(v.normalized());
  }

  std::vector<ModelPoint> out;
  const int m = space.factors();
  for (const Vec& s : seeds) {
    std::vector<Vec> reps(m, s);
    if (space.kind == ModelKind::Linear)
      out.push_back(ModelPoint{std::move(reps)});
    else
      out.push_back(make_point(space, std::move(reps)));
  }
  return out;
}

}  // namespace

CommutingReport commuting_delta(const ModelSpace& space, const Direction& alpha,
                                const Direction& beta,
                                const std::vector<ModelPoint>& fixed_samples,
                                int probe_count) {
  Mat comm = bracket(alpha.matrix(), beta.matrix());
  if (comm.cwiseAbs().maxCoeff() > 1e-12)
    throw NotCommutingError("directions do not commute");

  CommutingReport out{alpha, beta, kInf, false, 0.0, false, 0, {}};
  for (const ModelPoint& x : fixed_samples) {
    double ra = tangent_norm(space, x, fundamental_field(space, alpha, x));
    double rb = tangent_norm(space, x, fundamental_field(space, beta, x));
    if (ra > 1e-10 || rb > 1e-10)
      throw NotFixedError("sample is not a common fixed point");
    HessianData ha = hessian_fixed_point(space, x, beta);
    HessianData hb = hessian_fixed_point(space, x, alpha);
    auto pairs = simultaneous_spectrum(ha.operator_matrix, hb.operator_matrix);
    double local = kInf;
    for (auto& [a, b] : pairs)
      if (std::abs(a) > 1e-9 && std::abs(b) > 1e-9)
        local = std::min(local, std::abs(a) / std::abs(b));
    out.per_sample_delta.push_back(local);
    out.delta = std::min(out.delta, local);
  }
  out.empty_index_set = !std::isfinite(out.delta);
  out.epsilon_used = out.empty_index_set ? 1.0 : 0.5 * out.delta;

  // Probe that zeros of (beta + eps alpha)_X are exactly the common zeros.
  Direction mixed(space.setup,
                  (beta.matrix() + out.epsilon_used * alpha.matrix()).eval());
  int mismatches = 0;
  for (const ModelPoint& p : probe_grid(space, alpha, beta, probe_count)) {
    double fm = tangent_norm(space, p, fundamental_field(space, mixed, p));
    double fa = tangent_norm(space, p, fundamental_field(space, alpha, p));
    double fb = tangent_norm(space, p, fundamental_field(space, beta, p));
    bool zero_mixed = fm < 1e-8;
    bool zero_both = fa < 1e-8 && fb < 1e-8;
    if (zero_mixed != zero_both) ++mismatches;
  }
  out.probe_mismatches = mismatches;
  out.fixed_set_equal = mismatches == 0;
  return out;
}

CommutingLimitResult commuting_limit_check(const ModelSpace& space,
                                           const ModelPoint& x,
                                           const Direction& alpha,
                                           const Direction& beta, double eps) {
  Mat comm = bracket(alpha.matrix(), beta.matrix());
  if (comm.cwiseAbs().maxCoeff() > 1e-12)
    throw NotCommutingError("directions do not commute");
  CommutingLimitResult out;
  FlowLimit ly = flow_limit(space, x, beta);
  if (ly.status != FlowStatus::Converged) {
    out.status = ly.status;
    return out;
  }
  FlowLimit lz = flow_limit(space, *ly.point, alpha);
  if (lz.status != FlowStatus::Converged) {
    out.status = lz.status;
    return out;
  }
  Direction mixed(space.setup, (beta.matrix() + eps * alpha.matrix()).eval());
  FlowLimit lw = flow_limit(space, x, mixed);
  if (lw.status != FlowStatus::Converged) {
    out.status = lw.status;
    return out;
  }
  out.y = ly.point;
  out.z = lz.point;
  out.residual = point_distance(space, *lw.point, *lz.point);
  return out;
}

double tecnico_check(const ModelSpace& space, const ModelPoint& x,
                     const Direction& beta,
                     const std::vector<GroupElement>& g_samples) {
  if (tangent_norm(space, x, fundamental_field(space, beta, x)) > 1e-10)
    throw NotFixedError("tecnico_check requires a fixed point of beta");
  const double lhs = moment_pairing(space, x, beta);
  double worst = 0.0;
  for (const auto& g : g_samples) {
    ModelPoint gx = act(space, g.matrix, x);
    Mat moved = space.setup->project_p(ad_group(g.matrix, beta.matrix()));
    double rhs = inner(gradient_map(space, gx).matrix, moved);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Stratification and triple transport
// ---------------------------------------------------------------------------
std::vector<StratumEntry> stratify(const ModelSpace& space,
                                   const std::vector<ModelPoint>& grid,
                                   const NormSqFlowOptions& opts) {
  std::vector<StratumEntry> out;
  out.reserve(grid.size());
  for (const ModelPoint& x : grid) {
    NormSqFlowResult r = neg_flow_normsq(space, x, opts);
    out.push_back(StratumEntry{r.terminal, r.label, r.status});
  }
  return out;
}

std::vector<StratumLabel> distinct_strata(const std::vector<StratumEntry>& entries) {
  std::vector<StratumLabel> out;
  for (const auto& e : entries) {
    bool found = false;
    for (const auto& known : out)
      if (same_orbit_key(known, e.label)) {
        found = true;
        break;
      }
    if (!found) out.push_back(e.label);
  }
  return out;
}

Mat TripleTransport::mu_prime(const ModelSpace& space, const ModelPoint& x) const {
  ModelPoint back = act(space, g.matrix.inverse(), x);
  return ad_group(g.matrix, gradient_map(space, back).matrix);
}

double TripleTransport::f_prime(const ModelSpace& space, const ModelPoint& x) const {
  Mat mu = mu_prime(space, x);
  return 0.5 * bform(mu, mu);
}

TripleTransport triple_transport(const ModelSpace& space, const GroupElement& g) {
  (void)space;
  return TripleTransport{g};
}


TransportReport transport_invariance_report(
    const ModelSpace& space, const TripleTransport& transport,
    const std::vector<ModelPoint>& f_samples,
    const std::vector<ModelPoint>& strata_grid,
    const std::vector<ModelPoint>& verdict_samples,
    const ClassifyOptions& classify_opts) {
  TransportReport out;
  const Mat ginv = transport.g.matrix.inverse();

  for (const ModelPoint& x : f_samples) {
    GradientValue mu = gradient_map(space, act(space, ginv, x));
    double f_orig = 0.5 * mu.norm * mu.norm;
    out.max_f_defect = std::max(out.max_f_defect,
                                std::abs(transport.f_prime(space, x) - f_orig));
  }

  if (!strata_grid.empty()) {
    std::vector<std::vector<double>> original, transported;
    for (const ModelPoint& x : strata_grid) {
      NormSqFlowResult r = neg_flow_normsq(space, x);
      original.push_back(orbit_key_for(*space.setup, r.label.critical_beta));
      // In the conjugated triple the flow from x is g applied to the flow of
      // g^{-1} x; its label is the transported gradient at the terminal.
      NormSqFlowResult rt = neg_flow_normsq(space, act(space, ginv, x));
      ModelPoint terminal_t = act(space, transport.g.matrix, rt.terminal);
      transported.push_back(
          orbit_key_for(*space.setup, transport.mu_prime(space, terminal_t)));
    }
    auto canon = [](std::vector<std::vector<double>> v) {
      for (auto& k : v)
        for (auto& e : k) e = std::round(e / 1e-5) * 1e-5;
      std::sort(v.begin(), v.end());
      return v;
    };
    out.strata_match = canon(original) == canon(transported);
  }

  for (const ModelPoint& x : verdict_samples) {
    StabilityVerdict a = classify(space, x, classify_opts);
    StabilityVerdict b = classify(space, act(space, ginv, x), classify_opts);
    if (a.klass != b.klass) {
      out.verdicts_match = false;
      break;
    }
  }
  return out;
}

}  // namespace gradstab
