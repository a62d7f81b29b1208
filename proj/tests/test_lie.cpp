#include "doctest.h"

#include "gradstab/lie.hpp"
#include "gradstab/sampling.hpp"
#include "support/oracles.hpp"

using namespace gradstab;

namespace {

Mat mat2(double a, double b, double c, double d) {
  Mat m(2, 2);
  m << a, b, c, d;
  return m;
}

const std::vector<std::pair<GroupKind, int>> kCatalog = {
    {GroupKind::GL_C, 2},       {GroupKind::SL_C, 2},       {GroupKind::SL_C, 3},
    {GroupKind::GL_R, 2},       {GroupKind::SL_R, 2},       {GroupKind::SL_R, 3},
    {GroupKind::DiagTorusR, 2}, {GroupKind::DiagTorusC, 3}};

}  // namespace

TEST_CASE("setup bases satisfy the structural invariants") {
  for (auto [kind, n] : kCatalog) {
    CAPTURE(group_kind_name(kind));
    auto setup = ReductiveSetup::make(kind, n);

    for (const Mat& b : setup->k_basis()) {
      CHECK((b + b.adjoint()).cwiseAbs().maxCoeff() < 1e-14);  // anti-Hermitian
      if (setup->real_entries()) CHECK(b.imag().cwiseAbs().maxCoeff() < 1e-14);
    }
    for (const Mat& b : setup->p_basis()) {
      CHECK((b - b.adjoint()).cwiseAbs().maxCoeff() < 1e-14);  // Hermitian
      if (setup->real_entries()) CHECK(b.imag().cwiseAbs().maxCoeff() < 1e-14);
      if (setup->trace_free()) CHECK(std::abs(b.trace()) < 1e-14);
    }
    // Orthonormality of each basis family.
    auto gram_ok = [](const std::vector<Mat>& basis) {
      for (size_t i = 0; i < basis.size(); ++i)
        for (size_t j = 0; j < basis.size(); ++j) {
          double want = i == j ? 1.0 : 0.0;
          if (std::abs(inner(basis[i], basis[j]) - want) > 1e-12) return false;
        }
      return true;
    };
    CHECK(gram_ok(setup->k_basis()));
    CHECK(gram_ok(setup->p_basis()));
    CHECK(gram_ok(setup->a_basis()));

    // Bracket closure after projection.
    for (const Mat& a : setup->k_basis())
      for (const Mat& b : setup->k_basis()) {
        Mat br = bracket(a, b);
        CHECK((br - setup->project_k(br)).cwiseAbs().maxCoeff() < 1e-10);
      }
    for (const Mat& a : setup->k_basis())
      for (const Mat& b : setup->p_basis()) {
        Mat br = bracket(a, b);
        CHECK((br - setup->project_p(br)).cwiseAbs().maxCoeff() < 1e-10);
      }
    for (const Mat& a : setup->p_basis())
      for (const Mat& b : setup->p_basis()) {
        Mat br = bracket(a, b);
        CHECK((br - setup->project_k(br)).cwiseAbs().maxCoeff() < 1e-10);
      }
    // a is abelian, sits inside p, and multiplication by i is an isometry
    // from the k side into the Hermitian side.
    for (const Mat& a : setup->a_basis()) {
      CHECK((a - setup->project_p(a)).cwiseAbs().maxCoeff() < 1e-12);
      for (const Mat& b : setup->a_basis())
        CHECK(bracket(a, b).cwiseAbs().maxCoeff() < 1e-12);
    }
    for (const Mat& b : setup->k_basis()) {
      Mat ib = Complex(0, 1) * b;
      CHECK(std::abs(inner(ib, ib) - inner(b, b)) < 1e-13);
      CHECK((ib - ib.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
    }
  }
}

TEST_CASE("bform matches its defining values") {
  Mat i2 = Complex(0, 1) * Mat::Identity(2, 2);
  CHECK(bform(i2, i2) == doctest::Approx(-2.0).epsilon(1e-14));
  CHECK(bform(mat2(1, 0, 0, -1), mat2(1, 0, 0, -1)) ==
        doctest::Approx(2.0).epsilon(1e-14));

  auto setup = ReductiveSetup::make(GroupKind::GL_C, 3);
  Rng rng(7);
  for (int i = 0; i < 50; ++i) {
    Mat u = random_k_element(setup, rng);
    Mat h = random_p_element(setup, rng);
    CHECK(std::abs(bform(u, h)) < 1e-13);
    // Signs on the two sides.
    CHECK(bform(u, u) <= 0.0);
    CHECK(bform(h, h) >= 0.0);
    // Agreement with the inner product on each side.
    CHECK(std::abs(bform(u, u) + inner(u, u)) < 1e-12);
    CHECK(std::abs(bform(h, h) - inner(h, h)) < 1e-12);
  }
}

TEST_CASE("bform is Ad-invariant") {
  Rng rng(11);
  for (auto [kind, n] : kCatalog) {
    auto setup = ReductiveSetup::make(kind, n);
    for (int i = 0; i < 50; ++i) {
      GroupElement g = random_group_element(setup, rng);
      Mat x = random_k_element(setup, rng) + random_p_element(setup, rng);
      Mat y = random_k_element(setup, rng) + random_p_element(setup, rng);
      double lhs = bform(ad_group(g.matrix, x), ad_group(g.matrix, y));
      double rhs = bform(x, y);
      CHECK(std::abs(lhs - rhs) < 1e-8 * (1.0 + std::abs(rhs)));
    }
  }
}

TEST_CASE("project_p on the catalog examples") {
  auto slr = ReductiveSetup::make(GroupKind::SL_R, 2);
  CHECK((slr->project_p(mat2(1, 0, 0, -1)) - mat2(1, 0, 0, -1))
            .cwiseAbs()
            .maxCoeff() < 1e-14);
  CHECK(slr->project_p(mat2(0, 1, -1, 0)).cwiseAbs().maxCoeff() < 1e-14);
  // The trace part is orthogonal to every traceless basis element.
  for (const Mat& b : slr->p_basis())
    CHECK(std::abs(inner(Mat::Identity(2, 2), b)) < 1e-14);
  CHECK(slr->project_p(Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);
  // Idempotent and self-adjoint.
  Rng rng(3);
  for (int i = 0; i < 20; ++i) {
    Mat x = random_k_element(slr, rng) + random_p_element(slr, rng);
    Mat y = random_k_element(slr, rng) + random_p_element(slr, rng);
    Mat px = slr->project_p(x);
    CHECK((slr->project_p(px) - px).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(inner(px, y) - inner(x, slr->project_p(y))) < 1e-12);
  }
}

TEST_CASE("cartan decomposition on the catalog examples") {
  auto slr = ReductiveSetup::make(GroupKind::SL_R, 2);

  SUBCASE("already positive definite") {
    auto [k, xi] = cartan_decompose(make_group_element(slr, mat2(2, 0, 0, 0.5)));
    CHECK((k.matrix - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(xi(0, 0).real() - std::log(2.0)) < 1e-12);
    CHECK(std::abs(xi(1, 1).real() + std::log(2.0)) < 1e-12);
  }
  SUBCASE("already a rotation") {
    double c = std::cos(M_PI / 4), s = std::sin(M_PI / 4);
    Mat rot = mat2(c, -s, s, c);
    auto [k, xi] = cartan_decompose(make_group_element(slr, rot));
    CHECK((k.matrix - rot).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(xi.cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("shear against the singular-value oracle") {
    Mat shear = mat2(1, 1, 0, 1);
    auto [k, xi] = cartan_decompose(make_group_element(slr, shear));
    CHECK((k.matrix * exp_p(xi) - shear).cwiseAbs().maxCoeff() < 1e-10);
    auto [ok, oxi] = oracles::svd_polar(shear);
    CHECK((k.matrix - ok).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((xi - oxi).cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("round trip and uniqueness on random elements") {
    Rng rng(5);
    for (auto [kind, n] : kCatalog) {
      auto setup = ReductiveSetup::make(kind, n);
      for (int i = 0; i < 20; ++i) {
        GroupElement k0 = random_compact_element(setup, rng);
        Mat xi0 = random_p_element(setup, rng, 0.6);
        GroupElement g{setup, k0.matrix * exp_p(xi0)};
        auto [k, xi] = cartan_decompose(g);
        CHECK((xi - xi0).cwiseAbs().maxCoeff() < 1e-9);
        CHECK((k.matrix - k0.matrix).cwiseAbs().maxCoeff() < 1e-9);
      }
    }
  }
  SUBCASE("non-members are rejected") {
    CHECK_THROWS_AS(make_group_element(slr, mat2(2, 0, 0, 2)), NonMemberError);
    auto torus = ReductiveSetup::make(GroupKind::DiagTorusR, 2);
    CHECK_THROWS_AS(make_group_element(torus, mat2(1, 0.5, 0, 1)), NonMemberError);
  }
}

TEST_CASE("group element invariants") {
  auto slc = ReductiveSetup::make(GroupKind::SL_C, 2);
  Rng rng(9);
  for (int i = 0; i < 20; ++i) {
    GroupElement g = random_group_element(slc, rng);
    CHECK(std::abs(g.matrix.determinant() - 1.0) < 1e-10);
  }
  auto slr = ReductiveSetup::make(GroupKind::SL_R, 3);
  for (int i = 0; i < 20; ++i) {
    GroupElement g = random_group_element(slr, rng);
    CHECK(g.matrix.imag().cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(g.matrix.determinant() - 1.0) < 1e-10);
  }
}

TEST_CASE("centralizer bases") {
  auto slr2 = ReductiveSetup::make(GroupKind::SL_R, 2);

  SUBCASE("regular direction in sl(2)") {
    Direction beta(slr2, mat2(1, 0, 0, -1));
    auto cent = centralizer_basis(beta);
    REQUIRE(cent.p_part.size() == 1);
    CHECK(cent.k_part.empty());
    CHECK(std::abs(std::abs(inner(cent.p_part[0], mat2(1, 0, 0, -1) / std::sqrt(2.0))) -
                   1.0) < 1e-10);
  }
  SUBCASE("zero direction centralizes everything") {
    Direction zero(slr2, Mat::Zero(2, 2));
    auto cent = centralizer_basis(zero);
    CHECK(cent.p_part.size() == slr2->p_basis().size());
    CHECK(cent.k_part.size() == slr2->k_basis().size());
  }
  SUBCASE("block direction in sl(3)") {
    auto slr3 = ReductiveSetup::make(GroupKind::SL_R, 3);
    Mat d = Mat::Zero(3, 3);
    d(0, 0) = 1;
    d(1, 1) = 1;
    d(2, 2) = -2;
    Direction beta(slr3, d);
    auto cent = centralizer_basis(beta);
    // Block-commutant oracle: symmetric matrices block diagonal for the
    // eigenvalue multiplicities (2, 1), minus the trace constraint:
    // 2*3/2 + 1 - 1 = 3.
    int mult[] = {2, 1};
    int expect = 0;
    for (int m : mult) expect += m * (m + 1) / 2;
    expect -= 1;
    CHECK(static_cast<int>(cent.p_part.size()) == expect);
    for (const Mat& b : cent.p_part) {
      CHECK(bracket(beta.matrix(), b).cwiseAbs().maxCoeff() < 1e-10);
      CHECK((b - slr3->project_p(b)).cwiseAbs().maxCoeff() < 1e-10);
    }
    for (const Mat& b : cent.k_part)
      CHECK(bracket(beta.matrix(), b).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("direction eigendata is deterministic and reconstructs") {
  auto slr3 = ReductiveSetup::make(GroupKind::SL_R, 3);
  Rng rng(13);
  for (int i = 0; i < 20; ++i) {
    Mat m = random_p_element(slr3, rng);
    Direction a(slr3, m), b(slr3, m);
    CHECK((a.eigenvectors() - b.eigenvectors()).cwiseAbs().maxCoeff() == 0.0);
    Mat recon = a.eigenvectors() *
                a.eigenvalues().cast<Complex>().asDiagonal() *
                a.eigenvectors().adjoint();
    CHECK((recon - a.matrix()).cwiseAbs().maxCoeff() < 1e-10);
    for (int j = 0; j + 1 < 3; ++j)
      CHECK(a.eigenvalues()(j) >= a.eigenvalues()(j + 1));
  }
  CHECK_THROWS_AS(Direction(slr3, mat2(0, 1, -1, 0)), NonMemberError);
}

TEST_CASE("parabolic split") {
  auto slr = ReductiveSetup::make(GroupKind::SL_R, 2);
  Direction beta(slr, mat2(1, 0, 0, -1));

  SUBCASE("already lower triangular") {
    Mat g = mat2(1, 0, 1, 1);
    auto [k, h] = parabolic_split(make_group_element(slr, g), beta);
    CHECK((k.matrix - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((h.matrix - g).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("already a rotation") {
    double c = std::cos(0.6), s = std::sin(0.6);
    Mat g = mat2(c, -s, s, c);
    auto [k, h] = parabolic_split(make_group_element(slr, g), beta);
    CHECK((k.matrix - g).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((h.matrix - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("shear against the flag Gram-Schmidt oracle") {
    Mat g = mat2(1, 1, 0, 1);
    auto [k, h] = parabolic_split(make_group_element(slr, g), beta);
    CHECK((k.matrix * h.matrix - g).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(std::abs(h.matrix(0, 1)) < 1e-12);  // lower triangular
    Mat oq = oracles::reversed_gram_schmidt_unitary(g);
    // Same unitary factor up to column signs fixed by the oracle convention.
    Mat prod = oq.adjoint() * k.matrix;
    CHECK((prod.cwiseAbs() - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("random elements reconstruct with k orthogonal") {
    Rng rng(17);
    auto slc3 = ReductiveSetup::make(GroupKind::SL_C, 3);
    Mat d = Mat::Zero(3, 3);
    d(0, 0) = 1.5;
    d(1, 1) = -0.5;
    d(2, 2) = -1.0;
    Direction b3(slc3, d);
    for (int i = 0; i < 25; ++i) {
      GroupElement g = random_group_element(slc3, rng);
      auto [k, h] = parabolic_split(g, b3);
      CHECK((k.matrix * h.matrix - g.matrix).cwiseAbs().maxCoeff() < 1e-10);
      CHECK((k.matrix * k.matrix.adjoint() - Mat::Identity(3, 3))
                .cwiseAbs()
                .maxCoeff() < 1e-10);
      CHECK(std::abs(k.matrix.determinant() - 1.0) < 1e-9);
      Mat hh = b3.eigenvectors().adjoint() * h.matrix * b3.eigenvectors();
      for (int r = 0; r < 3; ++r)
        for (int c = r + 1; c < 3; ++c) CHECK(std::abs(hh(r, c)) < 1e-10);
    }
  }
}

TEST_CASE("parabolic data masks and theta pairing") {
  auto slr3 = ReductiveSetup::make(GroupKind::SL_R, 3);
  Mat d = Mat::Zero(3, 3);
  d(0, 0) = 1;
  d(1, 1) = 1;
  d(2, 2) = -2;
  Direction beta(slr3, slr3->project_p(d));
  ParabolicData data = parabolic_data(beta);
  REQUIRE(data.block_order.size() == 2);
  CHECK(data.block_order[0].second == 2);
  CHECK(data.block_order[1].second == 1);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      int total = data.levi_mask(r, c) + data.upper_mask(r, c) + data.lower_mask(r, c);
      CHECK(total == 1);  // masks partition the entries
      CHECK(data.upper_mask(r, c) == data.lower_mask(c, r));  // theta pairing
    }
  // Block diagonal part equals the conjugation limit at large |t|.
  Rng rng(19);
  for (int trial = 0; trial < 10; ++trial) {
    Mat upper = Mat::Identity(3, 3);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c)
        if (data.upper_mask(r, c)) upper(r, c) = rng.gaussian();
    Mat levi = Mat::Zero(3, 3);
    levi.topLeftCorner(2, 2) = exp_p(mat2(0.2, 0.1, 0.1, -0.2));
    levi(2, 2) = 1.0 / levi.topLeftCorner(2, 2).determinant().real();
    Mat g = levi * upper;
    Mat conj = beta.exp(-20.0) * g * beta.exp(20.0);
    GroupElement member{slr3, g};
    GroupElement projected = pi_beta(member, beta, +1);
    CHECK((conj - projected.matrix).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("levi projection") {
  auto slr = ReductiveSetup::make(GroupKind::SL_R, 2);
  Direction beta(slr, mat2(1, 0, 0, -1));

  SUBCASE("upper unitriangular maps to the identity") {
    GroupElement g = make_group_element(slr, mat2(1, 1, 0, 1));
    GroupElement p = pi_beta(g, beta, +1);
    CHECK((p.matrix - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("block diagonal elements are fixed") {
    GroupElement g = make_group_element(slr, mat2(2, 0, 0, 0.5));
    GroupElement p = pi_beta(g, beta, +1);
    CHECK((p.matrix - g.matrix).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("lower triangular content diverges for the plus parabolic") {
    GroupElement g = make_group_element(slr, mat2(1, 0, 1, 1));
    CHECK_THROWS_AS(pi_beta(g, beta, +1), NotInParabolicError);
    // It belongs to the minus parabolic instead.
    GroupElement p = pi_beta(g, beta, -1);
    CHECK((p.matrix - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("homomorphism property on the parabolic") {
    Rng rng(23);
    for (int i = 0; i < 20; ++i) {
      auto member = [&]() {
        Mat m = mat2(std::exp(0.3 * rng.gaussian()), rng.gaussian(), 0, 1);
        m(1, 1) = 1.0 / m(0, 0).real();
        return make_group_element(slr, m);
      };
      GroupElement g1 = member(), g2 = member();
      GroupElement lhs =
          pi_beta(make_group_element(slr, g1.matrix * g2.matrix), beta, +1);
      GroupElement rhs1 = pi_beta(g1, beta, +1);
      GroupElement rhs2 = pi_beta(g2, beta, +1);
      CHECK((lhs.matrix - rhs1.matrix * rhs2.matrix).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
}
