#include "doctest.h"

#include "gradstab/model.hpp"
#include "gradstab/sampling.hpp"

using namespace gradstab;

namespace {

Mat mat2(double a, double b, double c, double d) {
  Mat m(2, 2);
  m << a, b, c, d;
  return m;
}

Vec vec2(Complex a, Complex b) {
  Vec v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("gradient map closed forms") {
  auto slr = ReductiveSetup::make(GroupKind::SL_R, 2);
  ModelSpace cp1 = ModelSpace::projective(slr, FieldKind::Real);

  GradientValue g1 = gradient_map(cp1, make_point(cp1, {vec2(1, 0)}));
  CHECK((g1.matrix - mat2(0.5, 0, 0, -0.5)).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(g1.norm == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));

  GradientValue g2 = gradient_map(cp1, make_point(cp1, {vec2(1, 1)}));
  CHECK((g2.matrix - mat2(0, 0.5, 0.5, 0)).cwiseAbs().maxCoeff() < 1e-14);

  auto glr = ReductiveSetup::make(GroupKind::GL_R, 2);
  ModelSpace lin = ModelSpace::linear(glr, FieldKind::Real);
  GradientValue g3 = gradient_map(lin, make_point(lin, {vec2(1, 0)}));
  CHECK((g3.matrix - mat2(0.5, 0, 0, 0)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("fundamental field closed forms") {
  auto slr = ReductiveSetup::make(GroupKind::SL_R, 2);
  Direction beta(slr, mat2(1, 0, 0, -1));
  ModelSpace cp1 = ModelSpace::projective(slr, FieldKind::Real);

  Tangent at_pole = fundamental_field(cp1, beta, make_point(cp1, {vec2(1, 0)}));
  CHECK(at_pole[0].norm() < 1e-14);

  ModelSpace lin = ModelSpace::linear(slr, FieldKind::Real);
  Tangent at_e2 = fundamental_field(lin, beta, ModelPoint{{vec2(0, 1)}});
  CHECK((at_e2[0] - vec2(0, -1)).norm() < 1e-14);

  // The mid point: the field norm squared equals d/dt lambda at t = 0, which
  // for [1:1] is the derivative of tanh(2t), hence 2.
  ModelPoint mid = make_point(cp1, {vec2(1, 1)});
  Tangent f = fundamental_field(cp1, beta, mid);
  const double h = 1e-6;
  double fd = (moment_pairing(cp1, make_point(cp1, {vec2(std::exp(h), std::exp(-h))}),
                              beta) -
               moment_pairing(cp1, make_point(cp1, {vec2(std::exp(-h), std::exp(h))}),
                              beta)) /
              (2.0 * h);
  CHECK(metric_eval(cp1, mid, f, f) == doctest::Approx(fd).epsilon(1e-6));
  CHECK(metric_eval(cp1, mid, f, f) == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("metric evaluation") {
  auto slr = ReductiveSetup::make(GroupKind::SL_R, 2);
  ModelSpace lin = ModelSpace::linear(slr, FieldKind::Real);
  ModelPoint x{{vec2(1, 0)}};
  Tangent zero{Vec::Zero(2)};
  CHECK(metric_eval(lin, x, zero, zero) == 0.0);
  Tangent e1{vec2(1, 0)};
  CHECK(metric_eval(lin, x, e1, e1) == doctest::Approx(1.0));

  ModelSpace cp1 = ModelSpace::projective(slr, FieldKind::Real);
  ModelPoint p = make_point(cp1, {vec2(1, 0)});
  Tangent bad{vec2(1, 0.5)};
  CHECK_THROWS_AS(metric_eval(cp1, p, bad, bad), NotTangentError);

  // Gradient-pairing consistency on random tangents.
  Rng rng(31);
  ModelSpace cp2 = ModelSpace::projective(ReductiveSetup::make(GroupKind::SL_R, 3),
                                          FieldKind::Complex);
  for (int i = 0; i < 20; ++i) {
    ModelPoint y = random_point(cp2, rng);
    Direction beta = random_direction(cp2.setup, rng);
    Tangent u = random_tangent(cp2, y, rng);
    const double h = 1e-5;
    double fd = (moment_pairing(cp2, retract(cp2, y, u, h), beta) -
                 moment_pairing(cp2, retract(cp2, y, u, -h), beta)) /
                (2.0 * h);
    double pairing = metric_eval(cp2, y, fundamental_field(cp2, beta, y), u);
    CHECK(std::abs(fd - pairing) < 1e-5 * (1.0 + std::abs(fd)));
  }
}

TEST_CASE("point validation") {
  auto slr = ReductiveSetup::make(GroupKind::SL_R, 2);
  ModelSpace cp1 = ModelSpace::projective(slr, FieldKind::Real);
  CHECK_THROWS_AS(make_point(cp1, {Vec::Zero(2)}), InvalidPointError);
  ModelPoint p = make_point(cp1, {vec2(3, 4)});
  CHECK(p.reps[0].norm() == doctest::Approx(1.0).epsilon(1e-14));

  ModelSpace conf = ModelSpace::configuration(slr, FieldKind::Real, {1.0, 2.0});
  CHECK_THROWS_AS(make_point(conf, {vec2(1, 0)}), InvalidPointError);
  CHECK_THROWS(ModelSpace::configuration(slr, FieldKind::Real, {1.0, -1.0}));

  // The linear origin is a valid point.
  ModelSpace lin = ModelSpace::linear(slr, FieldKind::Real);
  ModelPoint origin = make_point(lin, {Vec::Zero(2)});
  CHECK(gradient_map(lin, origin).norm == 0.0);

  // Complex groups cannot act on real models.
  auto slc = ReductiveSetup::make(GroupKind::SL_C, 2);
  CHECK_THROWS(ModelSpace::projective(slc, FieldKind::Real));
}

TEST_CASE("K-equivariance of the gradient map") {
  Rng rng(37);
  auto slc = ReductiveSetup::make(GroupKind::SL_C, 2);
  std::vector<ModelSpace> spaces = {
      ModelSpace::projective(slc, FieldKind::Complex),
      ModelSpace::linear(slc, FieldKind::Complex),
      ModelSpace::configuration(slc, FieldKind::Complex, {1.0, 0.5}),
  };
  for (const auto& space : spaces) {
    for (int i = 0; i < 50; ++i) {
      ModelPoint x = random_point(space, rng);
      GroupElement k = random_compact_element(slc, rng);
      Mat lhs = gradient_map(space, act(space, k.matrix, x)).matrix;
      Mat rhs = ad_group(k.matrix, gradient_map(space, x).matrix);
      CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
}

TEST_CASE("real models embed in their complexifications consistently") {
  auto slr = ReductiveSetup::make(GroupKind::SL_R, 2);
  ModelSpace real_cp1 = ModelSpace::projective(slr, FieldKind::Real);
  ModelSpace cx_cp1 = ModelSpace::projective(slr, FieldKind::Complex);
  Rng rng(41);
  for (int i = 0; i < 20; ++i) {
    Vec v = random_vector(rng, 2, false);
    if (v.norm() < 1e-6) continue;
    ModelPoint xr = make_point(real_cp1, {v});
    ModelPoint xc = make_point(cx_cp1, {v});
    CHECK((gradient_map(real_cp1, xr).matrix - gradient_map(cx_cp1, xc).matrix)
              .cwiseAbs()
              .maxCoeff() < 1e-13);
    Direction beta = random_direction(slr, rng);
    Tangent fr = fundamental_field(real_cp1, beta, xr);
    Tangent fc = fundamental_field(cx_cp1, beta, xc);
    CHECK((fr[0] - fc[0]).norm() < 1e-13);
  }
}

TEST_CASE("stabilizer dimension in p") {
  auto slr = ReductiveSetup::make(GroupKind::SL_R, 2);
  ModelSpace lin = ModelSpace::linear(slr, FieldKind::Real);
  CHECK(stabilizer_p_dimension(lin, make_point(lin, {Vec::Zero(2)})) ==
        slr->dim_p());
  CHECK(stabilizer_p_dimension(lin, make_point(lin, {vec2(0, 1)})) == 0);

  // The hyperbolic fixed point of the compact stabilizer.
  ModelSpace cp1 = ModelSpace::projective(slr, FieldKind::Complex);
  ModelPoint xi = make_point(cp1, {vec2(Complex(0, 1), Complex(1, 0))});
  CHECK(stabilizer_p_dimension(cp1, xi) == 0);

  // A balanced pair keeps the full torus direction.
  auto slc = ReductiveSetup::make(GroupKind::SL_C, 2);
  ModelSpace conf = ModelSpace::configuration(slc, FieldKind::Complex, {1.0, 1.0});
  ModelPoint pair = make_point(conf, {vec2(1, 0), vec2(0, 1)});
  CHECK(stabilizer_p_dimension(conf, pair) == 1);
}
