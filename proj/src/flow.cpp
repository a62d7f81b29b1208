#include "gradstab/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gradstab {

namespace {

constexpr double kSupportTol = 1e-12;
constexpr double kLinearOverflow = 1e150;
const double kInf = std::numeric_limits<double>::infinity();

// Eigenbasis coordinates of one representative.
Vec support_coords(const Direction& beta, const Vec& v) {
  return beta.eigenvectors().adjoint() * v;
}

}  // namespace

ModelPoint flow_at(const ModelSpace& space, const ModelPoint& x,
                   const Direction& beta, double t) {
  std::vector<Vec> reps;
  reps.reserve(x.reps.size());
  for (const Vec& v : x.reps) {
    Vec c = support_coords(beta, v);
    for (int i = 0; i < c.size(); ++i) c(i) *= std::exp(t * beta.eigenvalues()(i));
    Vec moved = beta.eigenvectors() * c;
    if (space.kind == ModelKind::Linear) {
      if (!moved.allFinite() || moved.cwiseAbs().maxCoeff() > kLinearOverflow)
        throw FlowOverflowError("linear flow overflow");
    } else {
      double len = moved.norm();
      if (len < 1e-300 || !moved.allFinite())
        throw NumericFailureError("projective flow degenerated");
      moved /= len;
    }
    reps.push_back(std::move(moved));
  }
  return ModelPoint{std::move(reps)};
}

FlowLimit flow_limit(const ModelSpace& space, const ModelPoint& x,
                     const Direction& beta, double tol) {
  std::vector<Vec> reps;
  for (const Vec& v : x.reps) {
    Vec c = support_coords(beta, v);
    const RealVec& ev = beta.eigenvalues();
    double vmax = -kInf;
    for (int i = 0; i < c.size(); ++i)
      if (std::abs(c(i)) > kSupportTol) vmax = std::max(vmax, ev(i));
    if (space.kind == ModelKind::Linear) {
      if (vmax > kSupportTol) return FlowLimit{FlowStatus::Diverged, std::nullopt};
      Vec kept = Vec::Zero(c.size());
      for (int i = 0; i < c.size(); ++i)
        if (std::abs(ev(i)) <= kSupportTol) kept(i) = c(i);
      reps.push_back(beta.eigenvectors() * kept);
    } else {
      Vec kept = Vec::Zero(c.size());
      for (int i = 0; i < c.size(); ++i)
        if (std::abs(c(i)) > kSupportTol && ev(i) > vmax - 1e-9) kept(i) = c(i);
      Vec lim = beta.eigenvectors() * kept;
      double len = lim.norm();
      if (len < 1e-14) throw NumericFailureError("flow limit lost support");
      reps.push_back(lim / len);
    }
  }
  ModelPoint y{std::move(reps)};
  double resid = tangent_norm(space, y, fundamental_field(space, beta, y));
  if (resid > tol)
    throw NumericFailureError("flow limit is not a fixed point of the field");
  // The pairing at the limit must reproduce the maximal weight.
  if (space.kind != ModelKind::Linear) {
    double expected = 0.0;
    for (size_t j = 0; j < x.reps.size(); ++j) {
      Vec c = support_coords(beta, x.reps[j]);
      double vmax = -kInf;
      for (int i = 0; i < c.size(); ++i)
        if (std::abs(c(i)) > kSupportTol) vmax = std::max(vmax, beta.eigenvalues()(i));
      expected += (space.kind == ModelKind::Configuration ? space.weights[j] : 1.0) * vmax;
    }
    if (std::abs(moment_pairing(space, y, beta) - expected) > std::max(tol, 1e-8))
      throw NumericFailureError("flow limit pairing mismatch");
  }
  return FlowLimit{FlowStatus::Converged, std::move(y)};
}

double energy(const ModelSpace& space, const ModelPoint& x, const Direction& beta) {
  const RealVec& ev = beta.eigenvalues();
  double total = 0.0;
  for (size_t j = 0; j < x.reps.size(); ++j) {
    Vec c = support_coords(beta, x.reps[j]);
    if (space.kind == ModelKind::Linear) {
      for (int i = 0; i < c.size(); ++i) {
        double a = ev(i);
        double w = std::norm(c(i));
        if (w <= kSupportTol * kSupportTol) continue;
        if (a > kSupportTol) return kInf;
        if (a < -kSupportTol) total += -a * w * 0.5;
      }
    } else {
      double nn = c.squaredNorm();
      double vmax = -kInf;
      double pair0 = 0.0;
      for (int i = 0; i < c.size(); ++i) {
        double w = std::norm(c(i)) / nn;
        pair0 += ev(i) * w;
        if (w > kSupportTol) vmax = std::max(vmax, ev(i));
      }
      double weight = space.kind == ModelKind::Configuration ? space.weights[j] : 1.0;
      total += weight * (vmax - pair0);
    }
  }
  return total;
}

FlowTrajectory sample_flow(const ModelSpace& space, const ModelPoint& x,
                           const Direction& beta, const std::vector<double>& times) {
  FlowTrajectory out;
  for (double t : times) {
    ModelPoint pt = flow_at(space, x, beta, t);
    GradientValue mu = gradient_map(space, pt);
    Tangent field = fundamental_field(space, beta, pt);
    double speed = metric_eval(space, pt, field, field);
    out.times.push_back(t);
    out.lambda_samples.push_back(inner(mu.matrix, beta.matrix()));
    out.speed2_samples.push_back(speed);
    out.f_samples.push_back(0.5 * mu.norm * mu.norm);
    out.points.push_back(std::move(pt));
  }
  FlowLimit lim = flow_limit(space, x, beta, 1e-8);
  out.status = lim.status;
  out.limit = lim.point;
  return out;
}

HessianData hessian_fixed_point(const ModelSpace& space, const ModelPoint& x,
                                const Direction& beta, double zero_tol) {
  Tangent field0 = fundamental_field(space, beta, x);
  if (tangent_norm(space, x, field0) > 1e-10)
    throw NotFixedError("hessian_fixed_point requires a fixed point");
  auto frame = tangent_frame(space, x);
  const int dim = static_cast<int>(frame.size());
  const double h = 1e-5;
  RealMat op(dim, dim);
  for (int a = 0; a < dim; ++a) {
    ModelPoint plus = retract(space, x, frame[a], h);
    ModelPoint minus = retract(space, x, frame[a], -h);
    Tangent fp = fundamental_field(space, beta, plus);
    Tangent fm = fundamental_field(space, beta, minus);
    // Central difference of the field, projected to the tangent space at x.
    // The connection term vanishes at a zero of the field.
    Tangent deriv(x.reps.size());
    for (size_t j = 0; j < x.reps.size(); ++j) {
      Vec d = (fp[j] - fm[j]) / (2.0 * h);
      if (space.kind != ModelKind::Linear) {
        const Vec& base = x.reps[j];
        d -= base.dot(d) * base / base.squaredNorm();
      }
      deriv[j] = std::move(d);
    }
    for (int b = 0; b < dim; ++b)
      op(b, a) = metric_eval(space, x, deriv, frame[b]);
  }
  op = 0.5 * (op + op.transpose().eval());
  Eigen::SelfAdjointEigenSolver<RealMat> es(op);
  HessianData out{std::move(op), std::move(frame), 0, 0, 0};
  for (int i = 0; i < dim; ++i) {
    double v = es.eigenvalues()(i);
    if (v < -zero_tol) ++out.dim_negative;
    else if (v > zero_tol) ++out.dim_positive;
    else ++out.dim_zero;
  }
  return out;
}

std::vector<double> orbit_key_for(const ReductiveSetup& setup, const Mat& value) {
  std::vector<double> key(value.rows());
  if (setup.kind() == GroupKind::DiagTorusR ||
      setup.kind() == GroupKind::DiagTorusC) {
    for (int i = 0; i < value.rows(); ++i)
      key[i] = std::round(value(i, i).real() / 1e-6) * 1e-6;
    return key;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(value);
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    double v = es.eigenvalues()(es.eigenvalues().size() - 1 - i);
    key[i] = std::round(v / 1e-6) * 1e-6;
  }
  return key;
}

StratumLabel make_stratum_label(const ModelSpace& space, const ModelPoint& x) {
  GradientValue mu = gradient_map(space, x);
  StratumLabel out;
  out.f_value = 0.5 * bform(mu.matrix, mu.matrix);
  out.orbit_key = orbit_key_for(*space.setup, mu.matrix);
  out.critical_beta = std::move(mu.matrix);
  return out;
}

bool same_orbit_key(const StratumLabel& a, const StratumLabel& b) {
  if (a.orbit_key.size() != b.orbit_key.size()) return false;
  for (size_t i = 0; i < a.orbit_key.size(); ++i)
    if (std::abs(a.orbit_key[i] - b.orbit_key[i]) > 1.5e-6) return false;
  return true;
}

namespace {

// Tangent arithmetic on raw representative coordinates.
Tangent grad_f(const ModelSpace& space, const ModelPoint& x) {
  GradientValue mu = gradient_map(space, x);
  Direction d(space.setup, mu.matrix);
  return fundamental_field(space, d, x);
}

double f_value(const ModelSpace& space, const ModelPoint& x) {
  GradientValue mu = gradient_map(space, x);
  return 0.5 * mu.norm * mu.norm;
}

}  // namespace

NormSqFlowResult neg_flow_normsq(const ModelSpace& space, const ModelPoint& start,
                                 const NormSqFlowOptions& opts) {
  // Cash-Karp embedded pair.
  static const double a2 = 0.2, a3 = 0.3, a4 = 0.6, a5 = 1.0, a6 = 0.875;
  static const double b21 = 0.2;
  static const double b31 = 3.0 / 40.0, b32 = 9.0 / 40.0;
  static const double b41 = 0.3, b42 = -0.9, b43 = 1.2;
  static const double b51 = -11.0 / 54.0, b52 = 2.5, b53 = -70.0 / 27.0,
                      b54 = 35.0 / 27.0;
  static const double b61 = 1631.0 / 55296.0, b62 = 175.0 / 512.0,
                      b63 = 575.0 / 13824.0, b64 = 44275.0 / 110592.0,
                      b65 = 253.0 / 4096.0;
  static const double c1 = 37.0 / 378.0, c3 = 250.0 / 621.0, c4 = 125.0 / 594.0,
                      c6 = 512.0 / 1771.0;
  static const double d1 = 2825.0 / 27648.0, d3 = 18575.0 / 48384.0,
                      d4 = 13525.0 / 55296.0, d5 = 277.0 / 14336.0, d6 = 0.25;
  (void)a2; (void)a3; (void)a4; (void)a5; (void)a6;

  auto axpy = [&](const ModelPoint& base, std::initializer_list<std::pair<double, const Tangent*>> terms,
                  double h) {
    std::vector<Vec> reps = base.reps;
    for (auto& [coeff, tan] : terms)
      for (size_t j = 0; j < reps.size(); ++j) reps[j] += h * coeff * (*tan)[j];
    if (space.kind != ModelKind::Linear)
      for (auto& v : reps) v.normalize();
    return ModelPoint{std::move(reps)};
  };
  auto field_at = [&](const ModelPoint& p) {
    Tangent g = grad_f(space, p);
    for (auto& comp : g) comp = -comp;
    return g;
  };

  NormSqFlowResult out{{}, {}, {}, start, {}, FlowStatus::Converged, 0};
  ModelPoint x = start;
  double t = 0.0, h = opts.initial_step;
  double f = f_value(space, x);
  out.times.push_back(t);
  out.points.push_back(x);
  out.f_samples.push_back(f);

  int accepted = 0;
  int attempts = 0;
  while (true) {
    Tangent g = grad_f(space, x);
    double gnorm = tangent_norm(space, x, g);
    if (gnorm < opts.tol) break;
    if (accepted >= opts.budget || attempts >= 4 * opts.budget || t > opts.max_time) {
      out.status = FlowStatus::BudgetExceeded;
      break;
    }
    ++attempts;
    Tangent k1 = field_at(x);
    Tangent k2 = field_at(axpy(x, {{b21, &k1}}, h));
    Tangent k3 = field_at(axpy(x, {{b31, &k1}, {b32, &k2}}, h));
    Tangent k4 = field_at(axpy(x, {{b41, &k1}, {b42, &k2}, {b43, &k3}}, h));
    Tangent k5 = field_at(axpy(x, {{b51, &k1}, {b52, &k2}, {b53, &k3}, {b54, &k4}}, h));
    Tangent k6 = field_at(axpy(x, {{b61, &k1}, {b62, &k2}, {b63, &k3}, {b64, &k4}, {b65, &k5}}, h));
    ModelPoint x5 = axpy(x, {{c1, &k1}, {c3, &k3}, {c4, &k4}, {c6, &k6}}, h);
    ModelPoint x4 = axpy(x, {{d1, &k1}, {d3, &k3}, {d4, &k4}, {d5, &k5}, {d6, &k6}}, h);
    double err = point_distance(space, x5, x4);
    double f5 = f_value(space, x5);
    const double err_tol = 1e-9;
    if (err > err_tol || f5 > f + 1e-12) {
      h *= std::max(0.1, 0.9 * std::pow(err_tol / std::max(err, 1e-300), 0.25));
      if (h < 1e-12) {
        out.status = FlowStatus::BudgetExceeded;
        break;
      }
      continue;
    }
    t += h;
    x = std::move(x5);
    f = f5;
    ++accepted;
    if (err < 0.1 * err_tol) h = std::min(h * 2.0, 50.0);
    out.times.push_back(t);
    out.points.push_back(x);
    out.f_samples.push_back(f);
  }
  out.steps = accepted;
  out.terminal = x;
  out.label = make_stratum_label(space, x);
  return out;
}

UnstableLabel unstable_label(const ModelSpace& space, const ModelPoint& x,
                             const Direction& beta) {
  FlowLimit lim = flow_limit(space, x, beta);
  if (lim.status != FlowStatus::Converged)
    throw FlowOverflowError("unstable_label: flow diverges");
  double c = moment_pairing(space, *lim.point, beta);
  UnstableLabel out;
  out.critical_value = c;
  out.component_key = llround(c / 1e-6);
  out.limit = *lim.point;
  return out;
}

}  // namespace gradstab
