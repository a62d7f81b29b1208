#include "gradstab/weight.hpp"

#include "gradstab/kempf_ness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gradstab {

namespace {

constexpr double kSupportTol = 1e-12;
const double kInf = std::numeric_limits<double>::infinity();

double halton(int index, int base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * (index % base);
    index /= base;
  }
  return r;
}

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

}  // namespace

bool MaximalWeight::finite() const { return std::isfinite(value); }

double lambda_t(const ModelSpace& space, const ModelPoint& x,
                const Direction& beta, double t) {
  return moment_pairing(space, flow_at(space, x, beta, t), beta);
}

MaximalWeight max_weight(const ModelSpace& space, const ModelPoint& x,
                         const Direction& beta) {
  MaximalWeight out;
  out.method = WeightMethod::ClosedForm;
  const RealVec& ev = beta.eigenvalues();
  double value = 0.0;
  bool infinite = false;
  for (size_t j = 0; j < x.reps.size(); ++j) {
    Vec c = beta.eigenvectors().adjoint() * x.reps[j];
    double vmax = -kInf;
    double scale = c.cwiseAbs().maxCoeff();
    for (int i = 0; i < c.size(); ++i)
      if (std::abs(c(i)) > kSupportTol * std::max(1.0, scale))
        vmax = std::max(vmax, ev(i));
    if (space.kind == ModelKind::Linear) {
      if (vmax > kSupportTol) infinite = true;
    } else {
      double w = space.kind == ModelKind::Configuration ? space.weights[j] : 1.0;
      value += w * vmax;
    }
  }
  out.value = infinite ? kInf : value;
  out.energy_value = energy(space, x, beta);
  if (!infinite) {
    FlowLimit lim = flow_limit(space, x, beta);
    if (lim.status == FlowStatus::Converged) out.limit_point = lim.point;
  }
  return out;
}

MaximalWeight max_weight_numeric(const ModelSpace& space, const ModelPoint& x,
                                 const Direction& beta, double t_max, double tol) {
  MaximalWeight out;
  out.method = WeightMethod::NumericFlow;
  double t = 1.0;
  double lam = moment_pairing(space, x, beta);
  while (true) {
    try {
      ModelPoint pt = flow_at(space, x, beta, t);
      lam = moment_pairing(space, pt, beta);
      Tangent field = fundamental_field(space, beta, pt);
      if (tangent_norm(space, pt, field) < tol || t >= t_max) {
        out.t_reached = t;
        out.limit_point = pt;
        break;
      }
    } catch (const FlowOverflowError&) {
      out.value = kInf;
      out.energy_value = kInf;
      out.t_reached = t;
      return out;
    }
    t = std::min(2.0 * t, t_max) + (t >= t_max ? 1.0 : 0.0);
  }
  // Linear models with growing pairing have infinite weight.
  if (space.kind == ModelKind::Linear && lam > 1e10) {
    out.value = kInf;
    out.energy_value = kInf;
    return out;
  }
  out.value = lam;
  out.energy_value = lam - moment_pairing(space, x, beta);
  return out;
}

MaximalWeight transport_weight(const ModelSpace& space, const ModelPoint& x,
                               const GroupElement& g, const Direction& beta) {
  auto [k, h] = parabolic_split(g, beta);
  Mat transported = k.matrix.adjoint() * beta.matrix() * k.matrix;
  Direction moved(space.setup, space.setup->project_p(transported));
  return max_weight(space, x, moved);
}

MomentWeightMargin moment_weight_margin(const ModelSpace& space,
                                        const ModelPoint& x,
                                        const Direction& beta,
                                        const std::vector<GroupElement>& g_samples) {
  if (beta.norm() < 1e-14) throw ZeroDirectionError("beta must be nonzero");
  MomentWeightMargin out;
  MaximalWeight w = max_weight(space, x, beta);
  out.lhs = w.finite() ? -w.value / beta.norm() : -kInf;
  out.min_rhs = kInf;
  for (const auto& g : g_samples) {
    GradientValue mu = gradient_map(space, act(space, g.matrix, x));
    out.min_rhs = std::min(out.min_rhs, mu.norm);
  }
  return out;
}

std::vector<Direction> sweep_directions(const SetupPtr& setup,
                                        const std::vector<Mat>& subspace_basis,
                                        int count) {
  const int d = static_cast<int>(subspace_basis.size());
  std::vector<Direction> out;
  if (d == 0) return out;
  if (d == 1) {
    out.emplace_back(setup, subspace_basis[0]);
    out.emplace_back(setup, (-subspace_basis[0]).eval());
    return out;
  }
  const int pairs = (d + 1) / 2;
  for (int idx = 1; out.size() < static_cast<size_t>(count); ++idx) {
    RealVec coord(d);
    for (int p = 0; p < pairs; ++p) {
      double u1 = halton(idx, kPrimes[(2 * p) % 12]);
      double u2 = halton(idx, kPrimes[(2 * p + 1) % 12]);
      u1 = std::max(u1, 1e-12);
      double r = std::sqrt(-2.0 * std::log(u1));
      double g1 = r * std::cos(2.0 * M_PI * u2);
      double g2 = r * std::sin(2.0 * M_PI * u2);
      coord(2 * p) = g1;
      if (2 * p + 1 < d) coord(2 * p + 1) = g2;
    }
    double len = coord.norm();
    if (len < 1e-9) continue;
    coord /= len;
    Mat m = Mat::Zero(setup->n(), setup->n());
    for (int i = 0; i < d; ++i) m += coord(i) * subspace_basis[i];
    out.emplace_back(setup, m);
  }
  return out;
}

std::vector<Direction> adapted_candidates(const ModelSpace& space,
                                          const ModelPoint& x,
                                          const std::vector<Mat>& subspace_basis) {
  const auto& setup = space.setup;
  auto project = [&](const Mat& m) {
    Mat out = Mat::Zero(setup->n(), setup->n());
    for (const Mat& b : subspace_basis) out += inner(m, b) * b;
    return out;
  };
  std::vector<Direction> out;
  auto add = [&](const Mat& m) {
    Mat p = project(m);
    double len = std::sqrt(std::max(0.0, inner(p, p)));
    if (len < 1e-9) return;
    out.emplace_back(setup, (p / len).eval());
    out.emplace_back(setup, (-p / len).eval());
  };
  GradientValue mu = gradient_map(space, x);
  if (mu.norm > 1e-12) add(mu.matrix);
  for (const Vec& v : x.reps) {
    double nn = v.squaredNorm();
    if (nn < 1e-24) continue;
    add(setup->project_p((v * v.adjoint() / nn).eval()));
  }
  for (const Mat& a : setup->a_basis()) add(a);
  return out;
}

PropernessResult properness_estimate(const ModelSpace& space, const ModelPoint& x,
                                     const std::vector<Mat>& subspace_basis,
                                     const PropernessOptions& opts) {
  PropernessResult out;
  if (subspace_basis.empty()) {
    out.proper = true;
    out.c1 = 1.0;
    out.c2 = 0.0;
    out.min_lambda = kInf;
    return out;
  }
  std::vector<Direction> dirs = adapted_candidates(space, x, subspace_basis);
  for (auto& d : sweep_directions(space.setup, subspace_basis, opts.sweep))
    dirs.push_back(std::move(d));

  out.min_lambda = kInf;
  bool have_witness = false;
  double worst = kInf;
  for (const auto& d : dirs) {
    double lam = max_weight(space, x, d).value;
    out.min_lambda = std::min(out.min_lambda, lam);
    if (lam <= opts.tol && (!have_witness || lam < worst)) {
      have_witness = true;
      worst = lam;
      out.witness = d;
      out.witness_lambda = lam;
    }
  }
  if (have_witness) {
    out.proper = false;
    return out;
  }

  // Fit the probe constants: C1 from the shallowest asymptotic slope, C2 from
  // the worst deficit on the probe grid.
  const double r_max = *std::max_element(opts.probe_radii.begin(),
                                         opts.probe_radii.end());
  double c1 = 0.0;
  for (const auto& d : dirs) {
    double phi = kn_value(space, x, d.exp(r_max));
    if (phi > 1e-12) c1 = std::max(c1, 2.0 * r_max / phi);
  }
  if (c1 <= 0.0) c1 = 1.0;
  double c2 = 0.0;
  for (const auto& d : dirs)
    for (double r : opts.probe_radii)
      c2 = std::max(c2, r - c1 * kn_value(space, x, d.exp(r)));
  out.proper = true;
  out.c1 = c1;
  out.c2 = c2;
  return out;
}

}  // namespace gradstab
