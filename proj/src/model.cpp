#include "gradstab/model.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace gradstab {

namespace {

// Metric scale on projective factors making grad mu_p^beta = beta_X.
constexpr double kProjectiveScale = 2.0;

void check_field(const ModelSpace& space) {
  if (space.field == FieldKind::Real && !space.setup->real_entries())
    throw Error("complex groups do not preserve real models");
}

double factor_weight(const ModelSpace& space, int j) {
  return space.kind == ModelKind::Configuration ? space.weights[j] : 1.0;
}

}  // namespace

const char* model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::Linear: return "linear";
    case ModelKind::Projective: return "projective";
    case ModelKind::Configuration: return "configuration";
  }
  return "?";
}

ModelKind model_kind_from_name(const std::string& name) {
  if (name == "linear") return ModelKind::Linear;
  if (name == "projective") return ModelKind::Projective;
  if (name == "configuration") return ModelKind::Configuration;
  throw ParseError("unknown model kind: " + name);
}

ModelSpace ModelSpace::linear(SetupPtr setup, FieldKind field) {
  ModelSpace out{ModelKind::Linear, field, setup->n(), std::move(setup), {}};
  check_field(out);
  return out;
}

ModelSpace ModelSpace::projective(SetupPtr setup, FieldKind field) {
  ModelSpace out{ModelKind::Projective, field, setup->n(), std::move(setup), {}};
  check_field(out);
  return out;
}

ModelSpace ModelSpace::configuration(SetupPtr setup, FieldKind field,
                                     std::vector<double> weights) {
  if (weights.empty()) throw Error("configuration needs at least one factor");
  for (double w : weights)
    if (!(w > 0.0)) throw Error("configuration weights must be positive");
  ModelSpace out{ModelKind::Configuration, field, setup->n(), std::move(setup),
                 std::move(weights)};
  check_field(out);
  return out;
}

ModelPoint make_point(const ModelSpace& space, std::vector<Vec> reps) {
  const int m = space.factors();
  if (static_cast<int>(reps.size()) != m)
    throw InvalidPointError("wrong number of factors");
  for (auto& v : reps) {
    if (v.size() != space.n) throw InvalidPointError("wrong vector length");
    if (!v.allFinite()) throw InvalidPointError("non-finite entries");
    if (space.field == FieldKind::Real && v.imag().cwiseAbs().maxCoeff() > 1e-12)
      throw InvalidPointError("real model requires real representatives");
    if (space.kind != ModelKind::Linear) {
      double len = v.norm();
      if (len < 1e-14)
        throw InvalidPointError("projective representative must be nonzero");
      v /= len;
    }
  }
  return ModelPoint{std::move(reps)};
}

GradientValue gradient_map(const ModelSpace& space, const ModelPoint& x) {
  const auto& setup = *space.setup;
  Mat total = Mat::Zero(space.n, space.n);
  for (int j = 0; j < space.factors(); ++j) {
    const Vec& v = x.reps[j];
    if (space.kind == ModelKind::Linear) {
      total += 0.5 * (v * v.adjoint());
    } else {
      double nn = v.squaredNorm();
      if (nn < 1e-28)
        throw InvalidPointError("zero projective representative");
      total += factor_weight(space, j) * (v * v.adjoint()) / nn;
    }
  }
  Mat mu = setup.project_p(total);
  double norm = std::sqrt(std::max(0.0, bform(mu, mu)));
  return GradientValue{std::move(mu), norm};
}

double moment_pairing(const ModelSpace& space, const ModelPoint& x,
                      const Direction& beta) {
  return inner(gradient_map(space, x).matrix, beta.matrix());
}

Tangent fundamental_field(const ModelSpace& space, const Direction& beta,
                          const ModelPoint& x) {
  Tangent out;
  out.reserve(x.reps.size());
  for (const Vec& v : x.reps) {
    Vec bv = beta.matrix() * v;
    if (space.kind == ModelKind::Linear) {
      out.push_back(std::move(bv));
    } else {
      double nn = v.squaredNorm();
      Complex coeff = v.dot(bv) / nn;  // real: beta Hermitian
      out.push_back(bv - coeff.real() * v);
    }
  }
  return out;
}

double metric_eval(const ModelSpace& space, const ModelPoint& x,
                   const Tangent& v, const Tangent& w) {
  if (v.size() != x.reps.size() || w.size() != x.reps.size())
    throw NotTangentError("tangent factor count mismatch");
  double out = 0.0;
  for (size_t j = 0; j < x.reps.size(); ++j) {
    if (space.kind == ModelKind::Linear) {
      out += v[j].dot(w[j]).real();
    } else {
      const Vec& base = x.reps[j];
      double nn = base.squaredNorm();
      if (std::abs(base.dot(v[j])) > 1e-8 || std::abs(base.dot(w[j])) > 1e-8)
        throw NotTangentError("vector has a component along the representative");
      out += factor_weight(space, static_cast<int>(j)) * kProjectiveScale *
             v[j].dot(w[j]).real() / nn;
    }
  }
  return out;
}

double tangent_norm(const ModelSpace& space, const ModelPoint& x,
                    const Tangent& v) {
  return std::sqrt(std::max(0.0, metric_eval(space, x, v, v)));
}

ModelPoint act(const ModelSpace& space, const Mat& g, const ModelPoint& x) {
  std::vector<Vec> reps;
  reps.reserve(x.reps.size());
  for (const Vec& v : x.reps) {
    Vec gv = g * v;
    if (space.kind != ModelKind::Linear) {
      double len = gv.norm();
      if (len < 1e-300) throw NumericFailureError("projective action degenerates");
      gv /= len;
    }
    reps.push_back(std::move(gv));
  }
  return ModelPoint{std::move(reps)};
}

double point_distance(const ModelSpace& space, const ModelPoint& a,
                      const ModelPoint& b) {
  double out = 0.0;
  for (size_t j = 0; j < a.reps.size(); ++j) {
    double d;
    if (space.kind == ModelKind::Linear) {
      d = (a.reps[j] - b.reps[j]).norm();
    } else {
      double c = std::abs(a.reps[j].dot(b.reps[j])) /
                 (a.reps[j].norm() * b.reps[j].norm());
      d = std::sqrt(std::max(0.0, 1.0 - c * c));
    }
    out = std::max(out, d);
  }
  return out;
}

std::vector<Tangent> tangent_frame(const ModelSpace& space, const ModelPoint& x) {
  const bool cx = space.field == FieldKind::Complex;
  std::vector<Tangent> frame;
  const int m = space.factors();
  for (int j = 0; j < m; ++j) {
    const Vec& base = x.reps[j];
    std::vector<Vec> dirs;
    if (space.kind == ModelKind::Linear) {
      for (int i = 0; i < space.n; ++i) {
        Vec e = Vec::Zero(space.n);
        e(i) = 1.0;
        dirs.push_back(e);
        if (cx) {
          Vec f = Vec::Zero(space.n);
          f(i) = Complex(0, 1);
          dirs.push_back(f);
        }
      }
    } else {
      // Complement of the representative: project the standard basis and
      // orthonormalize (Gram-Schmidt over R, conjugate pair for complex).
      std::vector<Vec> kept;
      auto push_candidate = [&](Vec cand) {
        cand -= base.dot(cand) * base / base.squaredNorm();
        if (space.field == FieldKind::Real)
          cand = cand.real().cast<Complex>();
        for (const Vec& u : kept) cand -= u.dot(cand) * u;
        if (cand.norm() > 1e-9) kept.push_back(cand.normalized());
      };
      for (int i = 0; i < space.n; ++i) {
        Vec e = Vec::Zero(space.n);
        e(i) = 1.0;
        push_candidate(e);
      }
      const int want = space.n - 1;
      if (static_cast<int>(kept.size()) != want)
        throw NumericFailureError("tangent frame construction failed");
      for (const Vec& u : kept) {
        dirs.push_back(u);
        if (cx) dirs.push_back(Complex(0, 1) * u);
      }
    }
    for (Vec& d : dirs) {
      Tangent t(m, Vec::Zero(space.n));
      t[j] = d;
      double len = tangent_norm(space, x, t);
      for (auto& comp : t) comp /= len;
      frame.push_back(std::move(t));
    }
  }
  return frame;
}

ModelPoint retract(const ModelSpace& space, const ModelPoint& x, const Tangent& v,
                   double scale) {
  std::vector<Vec> reps;
  reps.reserve(x.reps.size());
  for (size_t j = 0; j < x.reps.size(); ++j) {
    Vec moved = x.reps[j] + scale * v[j];
    if (space.kind != ModelKind::Linear) {
      double len = moved.norm();
      if (len < 1e-14) throw NumericFailureError("retraction collapsed");
      moved /= len;
    }
    reps.push_back(std::move(moved));
  }
  return ModelPoint{std::move(reps)};
}

int stabilizer_p_dimension(const ModelSpace& space, const ModelPoint& x) {
  const auto& basis = space.setup->p_basis();
  const int m = static_cast<int>(basis.size());
  if (m == 0) return 0;
  auto frame = tangent_frame(space, x);
  const int dim = static_cast<int>(frame.size());
  RealMat a(std::max(dim, 1), m);
  a.setZero();
  for (int c = 0; c < m; ++c) {
    Direction beta(space.setup, basis[c]);
    Tangent field = fundamental_field(space, beta, x);
    for (int r = 0; r < dim; ++r)
      a(r, c) = metric_eval(space, x, field, frame[r]);
  }
  Eigen::JacobiSVD<RealMat> svd(a);
  int rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > 1e-8) ++rank;
  return m - rank;
}

}  // namespace gradstab
