#pragma once

#include <optional>
#include <vector>

#include "gradstab/kempf_ness.hpp"
#include "gradstab/weight.hpp"

namespace gradstab {

enum class StabilityClass { Stable, Polystable, StrictlySemistable, Unstable };

const char* stability_class_name(StabilityClass klass);

struct DestabilizingCertificate {
  Direction beta;
  double lambda_value;  // < 0
};

struct MinimizerCertificate {
  GroupElement g;
  double grad_norm;
  int stabilizer_dim;  // dim p_{x0} at the zero
};

struct ReductionStep {
  Direction beta;
  ModelPoint limit;
  double lambda_value;  // in [-tol, tol]
};

struct ReductionChain {
  std::vector<ReductionStep> steps;
  ModelPoint terminal;
  GroupElement terminal_minimizer;
  double terminal_grad_norm;
};

struct StabilityVerdict {
  StabilityClass klass;
  std::optional<DestabilizingCertificate> destabilizer;
  std::optional<MinimizerCertificate> minimizer;
  std::optional<ReductionChain> chain;
  double tol = 0.0;
  int budget = 0;
};

struct ClassifyOptions {
  double tol = 1e-8;
  int budget = 20000;
  int sweep = 400;
};

/// Full classification with certificate: descent converging gives Polystable
/// (Stable when the stabilizer algebra meets p trivially at the zero);
/// a divergent ray with vanishing gradient infimum gives StrictlySemistable
/// with a reduction chain; a ray with positive infimum gives Unstable with a
/// certified destabilizing direction.  Throws UndecidedError when the budget
/// runs out first.
StabilityVerdict classify(const ModelSpace& space, const ModelPoint& x,
                          const ClassifyOptions& opts = {});

/// Verdict of the torus A = exp(a) action from the convex position of the
/// support weight polytope; exact rational arithmetic when the weights are
/// integers.
struct TorusVerdict {
  StabilityClass klass;
  std::optional<Direction> destabilizer;
  bool exact = false;
};
TorusVerdict torus_oracle(const ModelSpace& space, const ModelPoint& x);

/// Combinatorial oracle for point configurations on the projective line:
/// semistable iff every support multiplicity is at most half the total
/// weight, stable iff strictly, polystable beyond stable only for two support
/// points of equal half weight.
struct MultiplicityVerdict {
  StabilityClass klass;
  double total_weight = 0.0;
  double max_multiplicity = 0.0;
  int distinct_points = 0;
};
MultiplicityVerdict configuration_multiplicity_oracle(const ModelSpace& space,
                                                      const ModelPoint& x);

struct ReductionOptions {
  double tol = 1e-8;
  int budget = 20000;
  int sweep = 400;
};

/// Centralizer reduction for analytically semistable points: repeatedly flow
/// along a weight-zero direction, restrict to the orthogonal part of its
/// centralizer, and finish with a restricted descent once the Kempf-Ness
/// function turns proper.  At most dim(a) steps.  Throws NotSemistableError
/// when a direction of negative weight shows up.
ReductionChain centralizer_reduction(const ModelSpace& space, const ModelPoint& x,
                                     const ReductionOptions& opts = {});

struct CommutingReport {
  Direction alpha;
  Direction beta;
  double delta = 0.0;  // +inf on an empty index set
  bool empty_index_set = false;
  double epsilon_used = 0.0;
  bool fixed_set_equal = false;
  int probe_mismatches = 0;
  std::vector<double> per_sample_delta;
};

/// The threshold delta of the commuting pair from simultaneous Hessian
/// spectra at the sampled common fixed points, then a probe-grid check that
/// the zeros of (beta + eps alpha)_X at eps = delta/2 are exactly the common
/// zeros.
CommutingReport commuting_delta(const ModelSpace& space, const Direction& alpha,
                                const Direction& beta,
                                const std::vector<ModelPoint>& fixed_samples,
                                int probe_count = 10000);

struct CommutingLimitResult {
  FlowStatus status = FlowStatus::Converged;
  double residual = 0.0;
  std::optional<ModelPoint> y;
  std::optional<ModelPoint> z;
};

/// Double-limit comparison: flowing along beta then alpha must match the
/// single flow along beta + eps alpha for admissible eps.
CommutingLimitResult commuting_limit_check(const ModelSpace& space,
                                           const ModelPoint& x,
                                           const Direction& alpha,
                                           const Direction& beta, double eps);

/// Max residual of <mu_p(x), beta> = <mu_p(g x), (Ad(g) beta)_p> over the
/// samples, for x a fixed point of beta_X.
double tecnico_check(const ModelSpace& space, const ModelPoint& x,
                     const Direction& beta,
                     const std::vector<GroupElement>& g_samples);

struct StratumEntry {
  ModelPoint point;
  StratumLabel label;
  FlowStatus status;
};

/// Negative gradient flow of the norm square from every grid point, labelled
/// by the critical orbit reached.
std::vector<StratumEntry> stratify(const ModelSpace& space,
                                   const std::vector<ModelPoint>& grid,
                                   const NormSqFlowOptions& opts = {});

/// Collects the distinct orbit keys of a stratification.
std::vector<StratumLabel> distinct_strata(const std::vector<StratumEntry>& entries);

/// The conjugated triple: K' = g K g^{-1}, transported metric, and the
/// gradient map Ad(g) mu_p( g^{-1} . ).
struct TripleTransport {
  GroupElement g;

  Mat mu_prime(const ModelSpace& space, const ModelPoint& x) const;
  double f_prime(const ModelSpace& space, const ModelPoint& x) const;
};

TripleTransport triple_transport(const ModelSpace& space, const GroupElement& g);

struct TransportReport {
  double max_f_defect = 0.0;       // |f'(x) - f(g^{-1} x)| over samples
  bool strata_match = true;        // orbit-key multisets agree on the grid
  bool verdicts_match = true;      // classify agrees at the sample points
};

TransportReport transport_invariance_report(
    const ModelSpace& space, const TripleTransport& transport,
    const std::vector<ModelPoint>& f_samples,
    const std::vector<ModelPoint>& strata_grid,
    const std::vector<ModelPoint>& verdict_samples,
    const ClassifyOptions& classify_opts = {});

}  // namespace gradstab
