#pragma once

#include <optional>
#include <vector>

#include "gradstab/model.hpp"

namespace gradstab {

/// Kempf-Ness function Phi(x, g).  Linear: (|gv|^2 - |v|^2)/4; projective:
/// (1/2) log(|gv|^2/|v|^2); configuration: weighted sum over factors.
double kn_value(const ModelSpace& space, const ModelPoint& x, const Mat& g);

/// |Phi(x, hg) - Phi(x, g) - Phi(gx, h)|.
double kn_cocycle_defect(const ModelSpace& space, const ModelPoint& x,
                         const Mat& g, const Mat& h);

/// Scans t -> Phi(x, exp(t v)) on a uniform grid and reports the minimum
/// central second difference divided by h^2.  Flat when the whole scan stays
/// below 1e-12 in absolute value (stabilizer directions).
struct ConvexityScan {
  double min_second_difference = 0.0;
  bool flat_direction = false;
};
ConvexityScan kn_convexity_scan(const ModelSpace& space, const ModelPoint& x,
                                const Direction& v, double t_lo = -2.0,
                                double t_hi = 2.0, int grid = 81);

/// Axiom-check summary at one (x, g) pair with sampled defects.
struct KempfNessReport {
  double value = 0.0;
  double cocycle_defect = 0.0;
  double k_invariance_defect = 0.0;
  double min_second_difference = 0.0;
};

enum class DescentStatus { Converged, Stalled, DivergentRay };

struct DescentResult {
  GroupElement minimizer;
  double final_grad_norm = 0.0;  // |mu_p(g x)| at the reported element
  double inf_grad_norm = 0.0;    // infimum along the iteration
  int iterations = 0;
  DescentStatus status = DescentStatus::Converged;
  std::optional<Direction> ray_direction;  // normalized, for DivergentRay
  double phi_value = 0.0;
};

struct DescentOptions {
  double tol = 1e-8;
  int budget = 20000;
  double initial_step = 0.5;
  double max_step = 10.0;
  double stall_step = 1e-4;       // accepted steps below this mean convergence
  double ray_threshold = 50.0;    // |xi| beyond which a ray is declared
  double armijo = 1e-4;
  std::vector<Mat> subspace;      // optional orthonormal restriction of p
};

/// Geodesic descent of Phi(x, .) on G/K: moves by exp(-s mu_hat) on the left,
/// with backtracking line search, until the gradient-map norm drops below tol
/// (Converged) or the iterate escapes along an unbounded geodesic
/// (DivergentRay).  Throws BudgetExceededError when the budget runs out with
/// neither outcome.
DescentResult kn_descend(const ModelSpace& space, const ModelPoint& x,
                         const DescentOptions& opts = {});

}  // namespace gradstab
