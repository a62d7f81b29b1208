#pragma once

#include <optional>
#include <vector>

#include "gradstab/model.hpp"

namespace gradstab {

enum class FlowStatus { Converged, Diverged, BudgetExceeded };

/// Sampled one-parameter flow curve exp(t beta) x.
struct FlowTrajectory {
  std::vector<double> times;
  std::vector<ModelPoint> points;
  std::vector<double> lambda_samples;  // <mu_p(exp(t beta) x), beta>
  std::vector<double> speed2_samples;  // |beta_X|^2 along the curve
  std::vector<double> f_samples;       // (1/2)|mu_p|^2 along the curve
  FlowStatus status = FlowStatus::Converged;
  std::optional<ModelPoint> limit;
};

/// exp(t beta) x in closed form through beta's eigendata.  Projective factors
/// are renormalized; linear entries beyond 1e150 raise FlowOverflowError.
ModelPoint flow_at(const ModelSpace& space, const ModelPoint& x,
                   const Direction& beta, double t);

struct FlowLimit {
  FlowStatus status;
  std::optional<ModelPoint> point;
};

/// Closed-form limit of exp(t beta) x as t -> +inf: the projection of each
/// projective representative onto its top supported eigenspace; the kernel
/// component (or zero) for linear points with no positive supported weight.
/// Diverged for linear points with positive weight on their support.
FlowLimit flow_limit(const ModelSpace& space, const ModelPoint& x,
                     const Direction& beta, double tol = 1e-9);

/// Curve energy E = integral of |beta_X(exp(t beta) x)|^2 over [0, inf);
/// +inf on divergence.  Closed form through the eigendata.
double energy(const ModelSpace& space, const ModelPoint& x, const Direction& beta);

/// Samples the flow curve on the given times.
FlowTrajectory sample_flow(const ModelSpace& space, const ModelPoint& x,
                           const Direction& beta, const std::vector<double>& times);

/// Hessian D^2 mu_p^beta at a fixed point of beta_X, expressed in a
/// metric-orthonormal tangent frame (equals the linearization d beta_X).
struct HessianData {
  RealMat operator_matrix;
  std::vector<Tangent> frame;
  int dim_negative = 0;
  int dim_zero = 0;
  int dim_positive = 0;
};

HessianData hessian_fixed_point(const ModelSpace& space, const ModelPoint& x,
                                const Direction& beta, double zero_tol = 1e-6);

/// Label of a critical point of f = (1/2)|mu_p|^2: the critical value of the
/// gradient map, the f value, and the sorted-eigenvalue orbit key (clustered
/// at 1e-6).
struct StratumLabel {
  Mat critical_beta;
  double f_value = 0.0;
  std::vector<double> orbit_key;
};

/// Canonical key of the adjoint K-orbit of a critical value: the descending
/// eigenvalue list, except for the diagonal torus kinds where conjugation
/// fixes the diagonal and the key keeps the entries in place.
std::vector<double> orbit_key_for(const ReductiveSetup& setup, const Mat& value);

StratumLabel make_stratum_label(const ModelSpace& space, const ModelPoint& x);

bool same_orbit_key(const StratumLabel& a, const StratumLabel& b);

/// Negative gradient flow trajectory of f.
struct NormSqFlowResult {
  std::vector<double> times;
  std::vector<ModelPoint> points;
  std::vector<double> f_samples;
  ModelPoint terminal;
  StratumLabel label;
  FlowStatus status = FlowStatus::Converged;
  int steps = 0;
};

struct NormSqFlowOptions {
  double tol = 1e-8;        // |grad f| threshold
  double initial_step = 0.05;
  double max_time = 1e6;
  int budget = 200000;      // maximum accepted steps
};

/// Integrates xdot = -(mu_p(x))_X(x) with an adaptive embedded Runge-Kutta
/// pair, rejecting steps that increase f.
NormSqFlowResult neg_flow_normsq(const ModelSpace& space, const ModelPoint& x,
                                 const NormSqFlowOptions& opts = {});

/// Critical component data of the upward flow of mu_p^beta.
struct UnstableLabel {
  double critical_value = 0.0;   // mu_p^beta at the limit
  long long component_key = 0;   // critical value clustered at 1e-6
  ModelPoint limit;
};

/// Limit label for the Morse decomposition of mu_p^beta: flows x upward and
/// reports the critical value reached.
UnstableLabel unstable_label(const ModelSpace& space, const ModelPoint& x,
                             const Direction& beta);

}  // namespace gradstab
