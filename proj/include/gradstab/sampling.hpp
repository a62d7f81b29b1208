#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "gradstab/model.hpp"

namespace gradstab {

/// Deterministic sampler: all randomness in the library and its harnesses
/// flows through this wrapper so a seed pins every draw.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() {
    return (engine_() >> 11) * 0x1.0p-53;
  }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = std::max(uniform(), 1e-300);
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * M_PI * u2);
  }

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

inline Vec random_vector(Rng& rng, int n, bool complex_entries) {
  Vec v(n);
  for (int i = 0; i < n; ++i)
    v(i) = Complex(rng.gaussian(), complex_entries ? rng.gaussian() : 0.0);
  return v;
}

inline ModelPoint random_point(const ModelSpace& space, Rng& rng) {
  std::vector<Vec> reps;
  const bool cx = space.field == FieldKind::Complex;
  for (int j = 0; j < space.factors(); ++j) {
    Vec v = random_vector(rng, space.n, cx);
    while (v.norm() < 1e-6) v = random_vector(rng, space.n, cx);
    reps.push_back(v);
  }
  return make_point(space, std::move(reps));
}

inline Mat random_p_element(const SetupPtr& setup, Rng& rng, double scale = 1.0) {
  Mat out = Mat::Zero(setup->n(), setup->n());
  for (const Mat& b : setup->p_basis()) out += scale * rng.gaussian() * b;
  return out;
}

inline Mat random_k_element(const SetupPtr& setup, Rng& rng, double scale = 1.0) {
  Mat out = Mat::Zero(setup->n(), setup->n());
  for (const Mat& b : setup->k_basis()) out += scale * rng.gaussian() * b;
  return out;
}

inline Direction random_direction(const SetupPtr& setup, Rng& rng) {
  Mat m = random_p_element(setup, rng);
  double len = std::sqrt(std::max(1e-300, inner(m, m)));
  return Direction(setup, (m / len).eval());
}

/// Random K element exp(kappa) with moderate angle.
inline GroupElement random_compact_element(const SetupPtr& setup, Rng& rng,
                                           double scale = 0.7) {
  return GroupElement{setup, exp_k(random_k_element(setup, rng, scale))};
}

/// Random group element k exp(xi) with moderate conditioning.
inline GroupElement random_group_element(const SetupPtr& setup, Rng& rng,
                                         double scale = 0.7) {
  Mat k = exp_k(random_k_element(setup, rng, scale));
  Mat p = exp_p(random_p_element(setup, rng, scale));
  return GroupElement{setup, (k * p).eval()};
}

/// Random tangent vector at x, unit metric norm.
inline Tangent random_tangent(const ModelSpace& space, const ModelPoint& x,
                              Rng& rng) {
  auto frame = tangent_frame(space, x);
  Tangent out(x.reps.size(), Vec::Zero(space.n));
  for (const auto& t : frame) {
    double c = rng.gaussian();
    for (size_t j = 0; j < out.size(); ++j) out[j] += c * t[j];
  }
  double len = tangent_norm(space, x, out);
  if (len < 1e-12) return frame.empty() ? out : frame[0];
  for (auto& comp : out) comp /= len;
  return out;
}

}  // namespace gradstab
