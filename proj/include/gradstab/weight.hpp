#pragma once

#include <optional>
#include <vector>

#include "gradstab/flow.hpp"

namespace gradstab {

enum class WeightMethod { ClosedForm, NumericFlow };

/// Maximal weight lambda(x, beta): the limit of the moment pairing along
/// exp(t beta) x.  +inf is represented explicitly.
struct MaximalWeight {
  double value = 0.0;           // may be +inf
  WeightMethod method = WeightMethod::ClosedForm;
  std::optional<ModelPoint> limit_point;
  double energy_value = 0.0;    // may be +inf
  double t_reached = 0.0;

  bool finite() const;
};

/// lambda(x, beta, t) = <mu_p(exp(t beta) x), beta>.
double lambda_t(const ModelSpace& space, const ModelPoint& x,
                const Direction& beta, double t);

/// Closed-form maximal weight.  Projective: the largest eigenvalue of beta on
/// the support of the representative (support threshold 1e-12); linear: +inf
/// when that maximum is positive, 0 otherwise; configuration: weighted sum of
/// per-factor values.
MaximalWeight max_weight(const ModelSpace& space, const ModelPoint& x,
                         const Direction& beta);

/// Flow-based maximal weight: lambda(x, beta, t) with the horizon doubled
/// until the field decays or t_max is hit.
MaximalWeight max_weight_numeric(const ModelSpace& space, const ModelPoint& x,
                                 const Direction& beta, double t_max = 60.0,
                                 double tol = 1e-9);

/// Equivariance transport: with g = k h, h in G^{beta-}, the weight of g x in
/// direction beta equals the weight of x in direction Ad(k^{-1}) beta.
MaximalWeight transport_weight(const ModelSpace& space, const ModelPoint& x,
                               const GroupElement& g, const Direction& beta);

/// Moment-weight margin: lhs = -lambda(x,beta)/|beta| and the minimum of
/// |mu_p(g x)| over the supplied group samples.  The inequality guarantees
/// lhs <= min rhs.
struct MomentWeightMargin {
  double lhs = 0.0;
  double min_rhs = 0.0;
};
MomentWeightMargin moment_weight_margin(const ModelSpace& space,
                                        const ModelPoint& x,
                                        const Direction& beta,
                                        const std::vector<GroupElement>& g_samples);

/// Deterministic low-discrepancy unit directions inside the span of the given
/// orthonormal p-subspace basis (Halton points pushed to the sphere).
std::vector<Direction> sweep_directions(const SetupPtr& setup,
                                        const std::vector<Mat>& subspace_basis,
                                        int count);

/// Structured sweep candidates adapted to a point: subspace projections of
/// +-mu_p(x) and of the support directions of the representatives.  These
/// catch the measure-zero witnesses a blind sweep misses.
std::vector<Direction> adapted_candidates(const ModelSpace& space,
                                          const ModelPoint& x,
                                          const std::vector<Mat>& subspace_basis);

struct PropernessResult {
  bool proper = false;
  double c1 = 0.0;
  double c2 = 0.0;
  std::optional<Direction> witness;  // direction with lambda <= tol
  double witness_lambda = 0.0;
  double min_lambda = 0.0;           // over the sweep
};

struct PropernessOptions {
  int sweep = 2000;
  double tol = 1e-7;
  std::vector<double> probe_radii = {0.5, 1.0, 2.0, 4.0, 8.0};
};

/// Linear properness of the Kempf-Ness function on a subspace: Proper with
/// explicit constants |v| <= C1 Phi(x, exp v) + C2 verified on the probe
/// grid, or NotProper with a witness direction of nonpositive weight.
PropernessResult properness_estimate(const ModelSpace& space, const ModelPoint& x,
                                     const std::vector<Mat>& subspace_basis,
                                     const PropernessOptions& opts = {});

}  // namespace gradstab
