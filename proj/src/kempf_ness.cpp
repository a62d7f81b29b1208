#include "gradstab/kempf_ness.hpp"

#include <algorithm>
#include <cmath>

namespace gradstab {

double kn_value(const ModelSpace& space, const ModelPoint& x, const Mat& g) {
  double total = 0.0;
  for (size_t j = 0; j < x.reps.size(); ++j) {
    const Vec& v = x.reps[j];
    double before = v.squaredNorm();
    double after = (g * v).squaredNorm();
    if (space.kind == ModelKind::Linear) {
      total += 0.25 * (after - before);
    } else {
      double w = space.kind == ModelKind::Configuration ? space.weights[j] : 1.0;
      total += 0.5 * w * std::log(after / before);
    }
  }
  return total;
}

double kn_cocycle_defect(const ModelSpace& space, const ModelPoint& x,
                         const Mat& g, const Mat& h) {
  double lhs = kn_value(space, x, h * g);
  double rhs = kn_value(space, x, g) + kn_value(space, act(space, g, x), h);
  return std::abs(lhs - rhs);
}

ConvexityScan kn_convexity_scan(const ModelSpace& space, const ModelPoint& x,
                                const Direction& v, double t_lo, double t_hi,
                                int grid) {
  if (grid < 3) throw Error("convexity scan needs at least 3 grid points");
  const double h = (t_hi - t_lo) / (grid - 1);
  std::vector<double> phi(grid);
  for (int i = 0; i < grid; ++i) phi[i] = kn_value(space, x, v.exp(t_lo + i * h));
  ConvexityScan out;
  out.min_second_difference = std::numeric_limits<double>::infinity();
  double max_abs_second = 0.0;
  for (int i = 1; i + 1 < grid; ++i) {
    double second = (phi[i + 1] - 2.0 * phi[i] + phi[i - 1]) / (h * h);
    out.min_second_difference = std::min(out.min_second_difference, second);
    max_abs_second = std::max(max_abs_second, std::abs(second));
  }
  out.flat_direction = max_abs_second < 1e-12;
  return out;
}

namespace {

Mat project_subspace(const std::vector<Mat>& basis, const Mat& xi) {
  Mat out = Mat::Zero(xi.rows(), xi.cols());
  for (const Mat& b : basis) out += inner(xi, b) * b;
  return out;
}

}  // namespace

DescentResult kn_descend(const ModelSpace& space, const ModelPoint& x,
                         const DescentOptions& opts) {
  const auto& setup = space.setup;
  const int n = setup->n();
  const bool restricted = !opts.subspace.empty();

  Mat g = Mat::Identity(n, n);
  ModelPoint cur = x;
  auto effective_mu = [&](const ModelPoint& pt) {
    Mat mu = gradient_map(space, pt).matrix;
    return restricted ? project_subspace(opts.subspace, mu) : mu;
  };

  DescentResult out{GroupElement{setup, g}, 0.0, 0.0, 0,
                    DescentStatus::Converged, std::nullopt, 0.0};
  Mat mu = effective_mu(cur);
  double mu_norm = std::sqrt(std::max(0.0, bform(mu, mu)));
  out.inf_grad_norm = mu_norm;
  if (mu_norm < 1e-13) {
    out.final_grad_norm = mu_norm;
    return out;  // already a zero of the gradient map
  }

  double phi = 0.0;
  double trial = opts.initial_step;
  int stagnant = 0;
  bool settled = false;
  std::vector<double> grad_window;
  // Near the minimum, differences of Phi drown in roundoff; switch the
  // acceptance test to decrease of the gradient-map norm there.
  const double near_phase = 1e-5;

  for (int it = 0; it < opts.budget; ++it) {
    Direction dir(setup, (-mu / mu_norm).eval());
    const double slope = -mu_norm;
    const bool near = mu_norm < near_phase;

    double alpha = trial;
    double line_value = 0.0;
    Mat mu_next;
    double mu_next_norm = 0.0;
    bool accepted = false;
    for (int bt = 0; bt < 45; ++bt) {
      Mat step = dir.exp(alpha);
      line_value = kn_value(space, cur, step);
      if (near) {
        ModelPoint moved = act(space, step, cur);
        mu_next = effective_mu(moved);
        mu_next_norm = std::sqrt(std::max(0.0, bform(mu_next, mu_next)));
        if (mu_next_norm <= mu_norm * (1.0 - 1e-4 * std::min(alpha, 1.0)) &&
            line_value <= 1e-12) {
          accepted = true;
          break;
        }
      } else if (line_value <= opts.armijo * alpha * slope) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }

    if (!accepted) {
      if (mu_norm < opts.tol) {
        out.status = DescentStatus::Converged;
        settled = true;
        break;
      }
      if (++stagnant > 50) {
        out.status = DescentStatus::Stalled;
        settled = true;
        break;
      }
      trial = opts.initial_step;
      continue;
    }
    stagnant = 0;

    g = snap_to_group(*setup, dir.exp(alpha) * g);
    cur = act(space, g, x);
    phi += line_value;
    mu = effective_mu(cur);
    mu_norm = std::sqrt(std::max(0.0, bform(mu, mu)));
    out.inf_grad_norm = std::min(out.inf_grad_norm, mu_norm);
    out.iterations = it + 1;
    trial = alpha == trial ? std::min(2.0 * alpha, opts.max_step)
                           : std::max(alpha, opts.stall_step);

    if (mu_norm < opts.tol && alpha < opts.stall_step) {
      out.status = DescentStatus::Converged;
      settled = true;
      break;
    }

    grad_window.push_back(mu_norm);
    if (grad_window.size() > 100) grad_window.erase(grad_window.begin());
    Mat xi = polar_p_factor(*setup, g);
    double xi_norm = std::sqrt(std::max(0.0, inner(xi, xi)));
    if (xi_norm > opts.ray_threshold) {
      bool stabilized = false;
      if (grad_window.size() == 100) {
        double lo = *std::min_element(grad_window.begin(), grad_window.end());
        double hi = *std::max_element(grad_window.begin(), grad_window.end());
        stabilized = hi - lo <= 1e-6 * std::max(1.0, hi);
      }
      if (stabilized || mu_norm < opts.tol) {
        out.status = DescentStatus::DivergentRay;
        out.ray_direction = Direction(setup, (xi / xi_norm).eval());
        settled = true;
        break;
      }
    }
  }
  if (!settled)
    throw BudgetExceededError("kn_descend: budget exhausted");

  out.minimizer = GroupElement{setup, g};
  out.final_grad_norm = mu_norm;
  out.phi_value = phi;
  return out;
}

}  // namespace gradstab
