#include <algorithm>
#include <cmath>
#include <limits>

#include "gradstab/sampling.hpp"
#include "gradstab/scenario.hpp"

namespace gradstab {

namespace {

using nlohmann::json;
const double kInf = std::numeric_limits<double>::infinity();

struct Suite {
  json checks = json::array();
  bool all_pass = true;

  void add(const std::string& name, double residual, double threshold) {
    bool pass = residual <= threshold;
    all_pass = all_pass && pass;
    checks.push_back({{"name", name},
                      {"residual", residual},
                      {"threshold", threshold},
                      {"pass", pass}});
  }
  void add_flag(const std::string& name, bool pass) {
    all_pass = all_pass && pass;
    checks.push_back({{"name", name}, {"pass", pass}});
  }
};

double basis_closure_residual(const ReductiveSetup& setup) {
  auto resid = [&](const Mat& m, bool into_k) {
    Mat proj = into_k ? setup.project_k(m) : setup.project_p(m);
    return (m - proj).cwiseAbs().maxCoeff();
  };
  double worst = 0.0;
  const auto& kb = setup.k_basis();
  const auto& pb = setup.p_basis();
  for (const auto& a : kb)
    for (const auto& b : kb) worst = std::max(worst, resid(bracket(a, b), true));
  for (const auto& a : kb)
    for (const auto& b : pb) worst = std::max(worst, resid(bracket(a, b), false));
  for (const auto& a : pb)
    for (const auto& b : pb) worst = std::max(worst, resid(bracket(a, b), true));
  return worst;
}

}  // namespace

json run_verify_suite(const VerifyOptions& opts) {
  Suite suite;
  Rng rng(opts.seed);

  const std::vector<std::pair<GroupKind, int>> catalog = {
      {GroupKind::SL_R, 2},      {GroupKind::SL_R, 3},      {GroupKind::GL_R, 2},
      {GroupKind::SL_C, 2},      {GroupKind::GL_C, 2},      {GroupKind::DiagTorusR, 2},
      {GroupKind::DiagTorusC, 3}};

  // --- Lie-algebra substrate -------------------------------------------------
  {
    double worst = 0.0;
    for (auto [kind, n] : catalog)
      worst = std::max(worst, basis_closure_residual(*ReductiveSetup::make(kind, n)));
    suite.add("lie.bracket_closure", worst, 1e-10);
  }
  {
    double worst = 0.0;
    for (auto [kind, n] : catalog) {
      auto setup = ReductiveSetup::make(kind, n);
      for (const auto& b : setup->k_basis()) {
        Mat ib = Complex(0, 1) * b;
        worst = std::max(worst, std::abs(inner(ib, ib) - inner(b, b)));
      }
      for (const auto& a : setup->a_basis()) {
        for (const auto& b : setup->a_basis())
          worst = std::max(worst, bracket(a, b).cwiseAbs().maxCoeff());
        worst = std::max(worst, (a - setup->project_p(a)).cwiseAbs().maxCoeff());
      }
    }
    suite.add("lie.i_isometry_and_abelian_a", worst, 1e-12);
  }
  {
    auto setup = ReductiveSetup::make(GroupKind::SL_C, 2);
    Mat i2 = Complex(0, 1) * Mat::Identity(2, 2);
    double worst = std::abs(bform(i2, i2) + 2.0);
    Mat d(2, 2);
    d << 1, 0, 0, -1;
    worst = std::max(worst, std::abs(bform(d, d) - 2.0));
    for (int i = 0; i < 20; ++i) {
      Mat u = random_k_element(setup, rng);
      Mat h = random_p_element(setup, rng);
      worst = std::max(worst, std::abs(bform(u, h)));
    }
    suite.add("lie.bform_signature", worst, 1e-12);
  }
  {
    double worst = 0.0;
    for (auto [kind, n] : catalog) {
      auto setup = ReductiveSetup::make(kind, n);
      for (int i = 0; i < 50; ++i) {
        GroupElement g = random_group_element(setup, rng);
        Mat x = random_k_element(setup, rng) + random_p_element(setup, rng);
        Mat y = random_k_element(setup, rng) + random_p_element(setup, rng);
        double lhs = bform(ad_group(g.matrix, x), ad_group(g.matrix, y));
        double rhs = bform(x, y);
        worst = std::max(worst, std::abs(lhs - rhs) / (1.0 + std::abs(rhs)));
      }
    }
    suite.add("lie.bform_ad_invariance", worst, 1e-8);
  }
  {
    double worst = 0.0;
    for (auto [kind, n] : catalog) {
      auto setup = ReductiveSetup::make(kind, n);
      for (int i = 0; i < 25; ++i) {
        GroupElement g = random_group_element(setup, rng);
        auto [k, xi] = cartan_decompose(g);
        worst = std::max(
            worst, (k.matrix * exp_p(xi) - g.matrix).cwiseAbs().maxCoeff());
        // Uniqueness on a fresh k exp(xi) product.
        GroupElement k2 = random_compact_element(setup, rng);
        Mat xi2 = random_p_element(setup, rng, 0.5);
        GroupElement g2{setup, k2.matrix * exp_p(xi2)};
        auto [k3, xi3] = cartan_decompose(g2);
        worst = std::max(worst, (xi3 - xi2).cwiseAbs().maxCoeff());
        worst = std::max(worst, (k3.matrix - k2.matrix).cwiseAbs().maxCoeff());
      }
    }
    suite.add("lie.cartan_roundtrip", worst, 1e-9);
  }
  {
    auto setup = ReductiveSetup::make(GroupKind::SL_R, 3);
    Mat d = Mat::Zero(3, 3);
    d(0, 0) = 1.0;
    d(1, 1) = 0.25;
    d(2, 2) = -1.25;
    Direction beta(setup, setup->project_p(d));
    double worst = 0.0;
    for (int i = 0; i < 25; ++i) {
      GroupElement g = random_group_element(setup, rng);
      auto [k, h] = parabolic_split(g, beta);
      worst = std::max(worst,
                       (k.matrix * h.matrix - g.matrix).cwiseAbs().maxCoeff());
      // h must be lower triangular in the descending eigenbasis.
      Mat hh = beta.eigenvectors().adjoint() * h.matrix * beta.eigenvectors();
      for (int r = 0; r < 3; ++r)
        for (int c = r + 1; c < 3; ++c)
          worst = std::max(worst, std::abs(hh(r, c)));
      worst = std::max(worst,
                       (k.matrix * k.matrix.adjoint() - Mat::Identity(3, 3))
                           .cwiseAbs()
                           .maxCoeff());
    }
    // Levi projection is a homomorphism on the upper parabolic.
    for (int i = 0; i < 25; ++i) {
      auto upper_member = [&]() {
        Mat m = Mat::Identity(3, 3);
        for (int r = 0; r < 3; ++r)
          for (int c = r + 1; c < 3; ++c) m(r, c) = rng.gaussian();
        Mat diag = Mat::Identity(3, 3);
        double a = 0.3 * rng.gaussian(), b = 0.3 * rng.gaussian();
        diag(0, 0) = std::exp(a);
        diag(1, 1) = std::exp(b);
        diag(2, 2) = std::exp(-a - b);
        Mat in_eigen = diag * m;
        return GroupElement{
            setup, beta.eigenvectors() * in_eigen * beta.eigenvectors().adjoint()};
      };
      GroupElement g1 = upper_member();
      GroupElement g2 = upper_member();
      GroupElement p1 = pi_beta(g1, beta, +1);
      GroupElement p2 = pi_beta(g2, beta, +1);
      GroupElement p12 =
          pi_beta(GroupElement{setup, g1.matrix * g2.matrix}, beta, +1);
      worst = std::max(
          worst, (p12.matrix - p1.matrix * p2.matrix).cwiseAbs().maxCoeff());
    }
    suite.add("lie.parabolic_split_and_levi", worst, 1e-8);
  }

  // --- Model spaces ----------------------------------------------------------
  auto sl2 = ReductiveSetup::make(GroupKind::SL_R, 2);
  auto sl3 = ReductiveSetup::make(GroupKind::SL_R, 3);
  auto slc2 = ReductiveSetup::make(GroupKind::SL_C, 2);
  std::vector<ModelSpace> models = {
      ModelSpace::projective(sl2, FieldKind::Real),
      ModelSpace::projective(sl2, FieldKind::Complex),
      ModelSpace::projective(sl3, FieldKind::Complex),
      ModelSpace::linear(sl2, FieldKind::Real),
      ModelSpace::linear(slc2, FieldKind::Complex),
      ModelSpace::configuration(slc2, FieldKind::Complex, {1.0, 2.0, 1.0}),
  };
  {
    double worst = 0.0;
    for (const auto& space : models) {
      for (int i = 0; i < 10; ++i) {
        ModelPoint x = random_point(space, rng);
        Direction beta = random_direction(space.setup, rng);
        Tangent u = random_tangent(space, x, rng);
        const double h = 1e-5;
        double fd = (moment_pairing(space, retract(space, x, u, h), beta) -
                     moment_pairing(space, retract(space, x, u, -h), beta)) /
                    (2.0 * h);
        double pairing =
            metric_eval(space, x, fundamental_field(space, beta, x), u);
        worst = std::max(worst, std::abs(fd - pairing) / (1.0 + std::abs(fd)));
      }
    }
    suite.add("model.gradient_identity", worst, 1e-5);
  }
  {
    double worst = 0.0;
    for (const auto& space : models) {
      for (int i = 0; i < 10; ++i) {
        ModelPoint x = random_point(space, rng);
        GroupElement k = random_compact_element(space.setup, rng);
        Mat lhs = gradient_map(space, act(space, k.matrix, x)).matrix;
        Mat rhs = ad_group(k.matrix, gradient_map(space, x).matrix);
        worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
      }
    }
    suite.add("model.k_equivariance", worst, 1e-9);
  }
  {
    // Restriction to the fixed set: mu_p commutes with beta there and equals
    // its own projection onto the centralizer part.
    double worst = 0.0;
    ModelSpace cp2(ModelSpace::projective(sl3, FieldKind::Complex));
    Mat d = Mat::Zero(3, 3);
    d(0, 0) = 1;
    d(1, 1) = 1;
    d(2, 2) = -2;
    Direction beta(sl3, sl3->project_p(d));
    for (int i = 0; i < 10; ++i) {
      Vec v = Vec::Zero(3);
      v(0) = Complex(rng.gaussian(), rng.gaussian());
      v(1) = Complex(rng.gaussian(), rng.gaussian());
      ModelPoint x = make_point(cp2, {v});  // inside the top eigenspace
      Mat mu = gradient_map(cp2, x).matrix;
      worst = std::max(worst, bracket(mu, beta.matrix()).cwiseAbs().maxCoeff());
      auto cent = centralizer_basis(beta);
      Mat proj = Mat::Zero(3, 3);
      for (const auto& b : cent.p_part) proj += inner(mu, b) * b;
      worst = std::max(worst, (mu - proj).cwiseAbs().maxCoeff());
    }
    suite.add("model.fixed_set_restriction", worst, 1e-9);
  }
  {
    // Zero-level stabilizer: moving off a zero of mu_p along p leaves the
    // zero level immediately.
    ModelSpace cp1(ModelSpace::projective(sl2, FieldKind::Complex));
    Vec v(2);
    v << Complex(0, 1) / std::sqrt(2.0), Complex(1, 0) / std::sqrt(2.0);
    ModelPoint x = make_point(cp1, {v});
    double mu0 = gradient_map(cp1, x).norm;
    double min_moved = kInf;
    for (int i = 0; i < 20; ++i) {
      Mat xi = random_p_element(sl2, rng, 0.6);
      Direction d(sl2, xi);
      if (tangent_norm(cp1, x, fundamental_field(cp1, d, x)) < 1e-6) continue;
      min_moved = std::min(min_moved,
                           gradient_map(cp1, act(cp1, exp_p(xi), x)).norm);
    }
    suite.add("model.zero_level_base", mu0, 1e-10);
    suite.add_flag("model.zero_level_stabilizer", min_moved > 1e-12);
  }

  // --- Flows and weights -----------------------------------------------------
  {
    double worst = 0.0, worst_deriv = 0.0;
    for (const auto& space : models) {
      for (int i = 0; i < 6; ++i) {
        ModelPoint x = random_point(space, rng);
        Direction beta = random_direction(space.setup, rng);
        double prev = -kInf;
        for (double t : {-2.0, -1.0, 0.0, 0.5, 1.0, 2.0, 4.0}) {
          double lam;
          try {
            lam = lambda_t(space, x, beta, t);
          } catch (const FlowOverflowError&) {
            break;
          }
          worst = std::max(worst, prev - lam);
          prev = lam;
        }
        // d/dt lambda = |beta_X|^2 along the curve.
        try {
          ModelPoint xt = flow_at(space, x, beta, 0.5);
          Tangent f = fundamental_field(space, beta, xt);
          double speed2 = metric_eval(space, xt, f, f);
          const double h = 1e-5;
          double fd = (lambda_t(space, x, beta, 0.5 + h) -
                       lambda_t(space, x, beta, 0.5 - h)) /
                      (2.0 * h);
          worst_deriv = std::max(worst_deriv,
                                 std::abs(fd - speed2) / (1.0 + speed2));
        } catch (const FlowOverflowError&) {
        }
      }
    }
    suite.add("flow.lambda_monotone", worst, 1e-9);
    suite.add("flow.lambda_derivative_speed", worst_deriv, 1e-6);
  }
  {
    // Energy identity lambda = lambda(.,0) + E on finite cases, against the
    // numeric flow value at large horizon.
    double worst = 0.0;
    ModelSpace cp2(ModelSpace::projective(sl3, FieldKind::Complex));
    for (int i = 0; i < 20; ++i) {
      ModelPoint x = random_point(cp2, rng);
      Direction beta = random_direction(sl3, rng);
      MaximalWeight w = max_weight(cp2, x, beta);
      double lam0 = lambda_t(cp2, x, beta, 0.0);
      worst = std::max(worst, std::abs(w.value - (lam0 + w.energy_value)));
    }
    suite.add("weight.energy_identity", worst, 1e-7);
  }
  {
    // Kempf-Ness axioms.
    double cocycle = 0.0, kinv = 0.0, deriv = 0.0, convex = 0.0;
    for (const auto& space : models) {
      for (int i = 0; i < 8; ++i) {
        ModelPoint x = random_point(space, rng);
        GroupElement g = random_group_element(space.setup, rng);
        GroupElement h = random_group_element(space.setup, rng);
        cocycle = std::max(cocycle,
                           kn_cocycle_defect(space, x, g.matrix, h.matrix));
        GroupElement k = random_compact_element(space.setup, rng);
        kinv = std::max(kinv,
                        std::abs(kn_value(space, x, k.matrix * g.matrix) -
                                 kn_value(space, x, g.matrix)));
        Direction beta = random_direction(space.setup, rng);
        convex = std::min(convex,
                          kn_convexity_scan(space, x, beta).min_second_difference);
        double t0 = 1.5 * (2.0 * rng.uniform() - 1.0);
        const double h2 = 1e-4;
        double fd = (kn_value(space, x, beta.exp(t0 + h2)) -
                     kn_value(space, x, beta.exp(t0 - h2))) /
                    (2.0 * h2);
        deriv = std::max(deriv, std::abs(fd - lambda_t(space, x, beta, t0)));
      }
    }
    suite.add("kempf_ness.cocycle", cocycle, 1e-9);
    suite.add("kempf_ness.k_invariance", kinv, 1e-10);
    suite.add("kempf_ness.convexity", -convex, 1e-8);
    suite.add("kempf_ness.derivative_identity", deriv, 1e-7);
  }
  {
    // Moment-weight inequality with the sharp fixed-point case.
    double worst = -kInf;
    ModelSpace cp1(ModelSpace::projective(sl2, FieldKind::Real));
    for (int i = 0; i < 30; ++i) {
      ModelPoint x = random_point(cp1, rng);
      Direction beta = random_direction(sl2, rng);
      std::vector<GroupElement> gs;
      gs.push_back(identity_element(sl2));
      for (int j = 0; j < 20; ++j) gs.push_back(random_group_element(sl2, rng));
      MomentWeightMargin m = moment_weight_margin(cp1, x, beta, gs);
      worst = std::max(worst, m.lhs - m.min_rhs);
    }
    Vec pole(2);
    pole << 0.0, 1.0;
    ModelPoint x = make_point(cp1, {pole});
    Mat d(2, 2);
    d << 1, 0, 0, -1;
    Direction beta(sl2, d);
    std::vector<GroupElement> just_e = {identity_element(sl2)};
    MomentWeightMargin sharp = moment_weight_margin(cp1, x, beta, just_e);
    suite.add("weight.gmwi_inequality", worst, 1e-9);
    suite.add("weight.gmwi_sharp_case", std::abs(sharp.lhs - sharp.min_rhs), 1e-9);
  }
  {
    // Transport equivariance of the maximal weight.
    double worst = 0.0;
    ModelSpace cp2(ModelSpace::projective(sl3, FieldKind::Complex));
    for (int i = 0; i < 20; ++i) {
      ModelPoint x = random_point(cp2, rng);
      Direction beta = random_direction(sl3, rng);
      GroupElement g = random_group_element(sl3, rng);
      MaximalWeight direct = max_weight(cp2, act(cp2, g.matrix, x), beta);
      MaximalWeight moved = transport_weight(cp2, x, g, beta);
      worst = std::max(worst, std::abs(direct.value - moved.value));
    }
    suite.add("weight.transport_equivariance", worst, 1e-6);
  }
  {
    // Lower semicontinuity spot checks along 1/n perturbations.
    double worst = -kInf;
    ModelSpace cp1(ModelSpace::projective(sl2, FieldKind::Complex));
    for (int i = 0; i < 10; ++i) {
      ModelPoint x = random_point(cp1, rng);
      Direction beta = random_direction(sl2, rng);
      double base = max_weight(cp1, x, beta).value;
      Vec dv = random_vector(rng, 2, true);
      Mat dm = random_p_element(sl2, rng);
      double tail_min = kInf;
      for (int n = 8; n <= 64; n *= 2) {
        Vec vn = x.reps[0] + dv / static_cast<double>(n);
        Mat bn = beta.matrix() + dm / static_cast<double>(n);
        Direction betan(sl2, sl2->project_p(bn));
        tail_min = std::min(tail_min,
                            max_weight(cp1, make_point(cp1, {vn}), betan).value);
      }
      worst = std::max(worst, base - tail_min);
    }
    suite.add("weight.lower_semicontinuity", worst, 1e-6);
  }
  {
    // Phi(x, exp(t beta))/t increases to lambda.
    double worst = 0.0;
    ModelSpace cp1(ModelSpace::projective(sl2, FieldKind::Complex));
    for (int i = 0; i < 10; ++i) {
      ModelPoint x = random_point(cp1, rng);
      Direction beta = random_direction(sl2, rng);
      double prev = -kInf;
      double ratio = 0.0;
      for (double t : {1.0, 2.0, 5.0, 10.0, 20.0, 40.0}) {
        ratio = kn_value(cp1, x, beta.exp(t)) / t;
        worst = std::max(worst, prev - ratio - 1e-12);
        prev = ratio;
      }
      worst = std::max(worst, std::abs(ratio - max_weight(cp1, x, beta).value) /
                                  (1.0 + std::abs(ratio)));
    }
    suite.add("weight.phi_slope_to_lambda", worst, 1e-5);
  }

  // --- Stability catalog -----------------------------------------------------
  {
    ModelSpace plane(ModelSpace::linear(sl2, FieldKind::Real));
    Vec v(2);
    v << 0.0, 1.0;
    StabilityVerdict a = classify(plane, make_point(plane, {v}));
    Vec z = Vec::Zero(2);
    StabilityVerdict b = classify(plane, make_point(plane, {z}));
    suite.add_flag("stability.plane_strictly_semistable",
                   a.klass == StabilityClass::StrictlySemistable);
    suite.add_flag("stability.plane_origin_polystable",
                   b.klass == StabilityClass::Polystable &&
                       b.minimizer.has_value() &&
                       b.minimizer->stabilizer_dim == sl2->dim_p());
    ModelSpace cp1c(ModelSpace::projective(sl2, FieldKind::Complex));
    Vec vi(2);
    vi << Complex(0, 1), Complex(1, 0);
    StabilityVerdict c = classify(cp1c, make_point(cp1c, {vi}));
    suite.add_flag("stability.hyperbolic_point_stable",
                   c.klass == StabilityClass::Stable);
  }
  {
    // Configuration verdicts against the multiplicity oracle.
    ModelSpace conf2(ModelSpace::configuration(slc2, FieldKind::Complex, {1, 1, 1, 1}));
    auto mk = [&](std::vector<int> pattern) {
      static const std::vector<Vec> pts = [] {
        std::vector<Vec> out;
        auto v = [](double a, double b, double c, double d) {
          Vec x(2);
          x << Complex(a, b), Complex(c, d);
          return x.normalized();
        };
        out.push_back(v(1, 0, 0, 0));
        out.push_back(v(0, 0, 1, 0));
        out.push_back(v(1, 0, 1, 0));
        out.push_back(v(1, 0, -1, 0));
        out.push_back(v(2, 0, 1, 1));
        return out;
      }();
      std::vector<Vec> reps;
      for (size_t i = 0; i < pattern.size(); ++i)
        for (int c = 0; c < pattern[i]; ++c) reps.push_back(pts[i]);
      return reps;
    };
    struct Case {
      std::vector<int> pattern;
      StabilityClass want;
    };
    std::vector<Case> cases = {
        {{1, 1, 1, 1}, StabilityClass::Stable},
        {{2, 2, 0, 0}, StabilityClass::Polystable},
        {{2, 0, 1, 1}, StabilityClass::StrictlySemistable},
        {{3, 1, 0, 0}, StabilityClass::Unstable},
    };
    bool ok = true;
    for (const auto& kase : cases) {
      auto reps = mk(kase.pattern);
      ModelPoint x = make_point(conf2, std::move(reps));
      MultiplicityVerdict oracle = configuration_multiplicity_oracle(conf2, x);
      StabilityVerdict v = classify(conf2, x);
      ok = ok && oracle.klass == kase.want && v.klass == kase.want;
    }
    suite.add_flag("stability.configuration_catalog", ok);
  }
  {
    // Torus oracle basics on the projective line.
    ModelSpace cp1(ModelSpace::projective(ReductiveSetup::make(GroupKind::DiagTorusR, 2),
                                          FieldKind::Real));
    Vec e1(2), e2(2), mid(2);
    e1 << 1, 0;
    e2 << 0, 1;
    mid << 1, 1;
    TorusVerdict a = torus_oracle(cp1, make_point(cp1, {mid}));
    TorusVerdict b = torus_oracle(cp1, make_point(cp1, {e1}));
    TorusVerdict c = torus_oracle(cp1, make_point(cp1, {e2}));
    suite.add_flag("stability.torus_oracle_line",
                   a.klass == StabilityClass::Stable &&
                       b.klass == StabilityClass::Unstable &&
                       c.klass == StabilityClass::Unstable &&
                       b.destabilizer.has_value());
  }
  {
    // Fixed-set invariance under the centralizer.
    ModelSpace cp2(ModelSpace::projective(sl3, FieldKind::Complex));
    Mat d = Mat::Zero(3, 3);
    d(0, 0) = 1;
    d(1, 1) = 1;
    d(2, 2) = -2;
    Direction beta(sl3, sl3->project_p(d));
    auto cent = centralizer_basis(beta);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      Vec v = Vec::Zero(3);
      v(0) = Complex(rng.gaussian(), rng.gaussian());
      v(1) = Complex(rng.gaussian(), rng.gaussian());
      ModelPoint x = make_point(cp2, {v});
      Mat kpart = Mat::Zero(3, 3), ppart = Mat::Zero(3, 3);
      for (const auto& b : cent.k_part) kpart += 0.4 * rng.gaussian() * b;
      for (const auto& b : cent.p_part) ppart += 0.4 * rng.gaussian() * b;
      Mat g = exp_k(kpart) * exp_p(ppart);
      ModelPoint gx = act(cp2, g, x);
      worst = std::max(worst,
                       tangent_norm(cp2, gx, fundamental_field(cp2, beta, gx)));
      worst = std::max(worst, std::abs(moment_pairing(cp2, gx, beta) -
                                       moment_pairing(cp2, x, beta)));
    }
    suite.add("stability.fixed_set_invariance", worst, 1e-8);
  }
  {
    // tecnico pairing transport at a fixed point.
    ModelSpace cp1(ModelSpace::projective(sl2, FieldKind::Real));
    Vec e2v(2);
    e2v << 0, 1;
    ModelPoint x = make_point(cp1, {e2v});
    Mat d(2, 2);
    d << 1, 0, 0, -1;
    Direction beta(sl2, d);
    std::vector<GroupElement> gs = {identity_element(sl2)};
    for (int i = 0; i < 20; ++i) gs.push_back(random_group_element(sl2, rng));
    for (int i = 0; i < 5; ++i) gs.push_back(random_compact_element(sl2, rng));
    suite.add("stability.tecnico", tecnico_check(cp1, x, beta, gs), 1e-7);
  }
  {
    // Triple transport: f' = f o g^{-1} and verdicts stable under transport.
    ModelSpace cp1(ModelSpace::projective(sl2, FieldKind::Complex));
    GroupElement g = random_group_element(sl2, rng, 0.4);
    TripleTransport tr = triple_transport(cp1, g);
    std::vector<ModelPoint> fs, verdicts;
    for (int i = 0; i < 30; ++i) fs.push_back(random_point(cp1, rng));
    for (int i = 0; i < 2; ++i) verdicts.push_back(random_point(cp1, rng));
    TransportReport rep = transport_invariance_report(cp1, tr, fs, {}, verdicts);
    suite.add("stability.triple_f_defect", rep.max_f_defect, 1e-12);
    suite.add_flag("stability.triple_verdicts", rep.verdicts_match);
  }
  {
    // Norm-square strata of the projective line under the torus.
    auto torus = ReductiveSetup::make(GroupKind::DiagTorusR, 2);
    ModelSpace cp1(ModelSpace::projective(torus, FieldKind::Real));
    std::vector<ModelPoint> grid;
    Vec e1(2), e2(2);
    e1 << 1, 0;
    e2 << 0, 1;
    grid.push_back(make_point(cp1, {e1}));
    grid.push_back(make_point(cp1, {e2}));
    for (int k = 1; k < 12; ++k) {
      Vec v(2);
      double th = M_PI * k / 12.0;
      v << std::cos(th), std::sin(th);
      grid.push_back(make_point(cp1, {v}));
    }
    auto entries = stratify(cp1, grid);
    auto strata = distinct_strata(entries);
    bool three = strata.size() == 3;
    double zero_f = kInf, pole_f = 0.0;
    for (const auto& e : entries) {
      if (std::abs(e.label.f_value) < 1e-10) zero_f = std::min(zero_f, e.label.f_value);
      pole_f = std::max(pole_f, e.label.f_value);
    }
    suite.add_flag("stability.cp1_three_strata", three);
    suite.add("stability.cp1_pole_f_value", std::abs(pole_f - 0.25), 1e-9);
  }

  json out;
  out["seed"] = opts.seed;
  out["sweep"] = opts.sweep;
  out["checks"] = suite.checks;
  out["all_pass"] = suite.all_pass;
  return out;
}

}  // namespace gradstab
