#pragma once

#include <string>
#include <vector>

#include "gradstab/lie.hpp"

namespace gradstab {

enum class ModelKind { Linear, Projective, Configuration };
enum class FieldKind { Real, Complex };

const char* model_kind_name(ModelKind kind);
ModelKind model_kind_from_name(const std::string& name);

/// A Hamiltonian model space X from the catalog: a linear space, a projective
/// space, or a weighted product of projective spaces, acted on by the group
/// of the attached setup.
struct ModelSpace {
  ModelKind kind;
  FieldKind field;
  int n;  // ambient dimension of each factor
  SetupPtr setup;
  std::vector<double> weights;  // Configuration only, one per factor

  int factors() const {
    return kind == ModelKind::Configuration ? static_cast<int>(weights.size()) : 1;
  }

  static ModelSpace linear(SetupPtr setup, FieldKind field);
  static ModelSpace projective(SetupPtr setup, FieldKind field);
  static ModelSpace configuration(SetupPtr setup, FieldKind field,
                                  std::vector<double> weights);
};

/// A point of a model space: one representative vector per factor.
/// Projective representatives are stored unit norm.
struct ModelPoint {
  std::vector<Vec> reps;
};

/// Tangent vector at a point, one ambient component per factor.
using Tangent = std::vector<Vec>;

ModelPoint make_point(const ModelSpace& space, std::vector<Vec> reps);

/// Value of the gradient map at a point: an element of p with its B-norm.
struct GradientValue {
  Mat matrix;
  double norm;
};

/// mu_p.  Linear: project_p of (1/2) v v^*; projective: project_p of
/// v v^* / <v,v>; configuration: weighted sum over factors.
GradientValue gradient_map(const ModelSpace& space, const ModelPoint& x);

/// The pairing <mu_p(x), beta>.
double moment_pairing(const ModelSpace& space, const ModelPoint& x,
                      const Direction& beta);

/// Fundamental vector field beta_X at x, per factor.
Tangent fundamental_field(const ModelSpace& space, const Direction& beta,
                          const ModelPoint& x);

/// Riemannian metric at x.  The projective scale is fixed by the identity
/// grad mu_p^beta = beta_X (factor 2 relative to the ambient real pairing).
double metric_eval(const ModelSpace& space, const ModelPoint& x,
                   const Tangent& v, const Tangent& w);

/// Metric norm of a tangent vector.
double tangent_norm(const ModelSpace& space, const ModelPoint& x,
                    const Tangent& v);

/// Action of a group matrix on a point (projective factors renormalized).
ModelPoint act(const ModelSpace& space, const Mat& g, const ModelPoint& x);

/// A representative-independent distance between points (Fubini-Study-style
/// for projective factors, Euclidean for linear, max over factors).
double point_distance(const ModelSpace& space, const ModelPoint& a,
                      const ModelPoint& b);

/// Orthonormal basis of the real tangent space at x with respect to the
/// model metric.
std::vector<Tangent> tangent_frame(const ModelSpace& space, const ModelPoint& x);

/// Geodesic-free retraction: move from x along tangent v (projective factors
/// renormalized).  Used by finite-difference probes.
ModelPoint retract(const ModelSpace& space, const ModelPoint& x, const Tangent& v,
                   double scale = 1.0);

/// Dimension of p_x = {xi in p : xi_X(x) = 0}, by singular values of the map
/// xi -> xi_X(x) over the p-basis (threshold 1e-8).
int stabilizer_p_dimension(const ModelSpace& space, const ModelPoint& x);

}  // namespace gradstab
