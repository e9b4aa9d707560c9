#include <gtest/gtest.h>

#include "iop/errors.hpp"
#include "iop/verify.hpp"
#include "iop/youla.hpp"
#include "support/random.hpp"

using namespace iop;
using iop::testing::response_distance;
using iop::testing::Sampler;

namespace {

RationalFunction tf(std::vector<double> num, std::vector<double> den) {
  return RationalFunction(Polynomial(std::move(num)), Polynomial(std::move(den)));
}

RationalMatrix diag(const RationalFunction& f, Eigen::Index n, Domain d) {
  RationalMatrix m(n, n, d);
  for (Eigen::Index i = 0; i < n; ++i) m(i, i) = f;
  return m;
}

// Unstable plant with a nontrivial factorization:
//   z: g = 1/(z - 2), M = (z - 2)/z, N = 1/z, U = 1, V = -2;
//   s: g = 1/(s - 1), M = (s - 1)/(s + 1), N = 1/(s + 1), U = 1, V = -2.
struct Fixture {
  RationalMatrix G;
  DoublyCoprimeFactorization dcf;
};

Fixture unstable_fixture(Domain d, Eigen::Index n) {
  const bool z = d == Domain::discrete;
  const RationalFunction g = z ? tf({1.0}, {-2.0, 1.0}) : tf({1.0}, {-1.0, 1.0});
  const RationalFunction M = z ? tf({-2.0, 1.0}, {0.0, 1.0}) : tf({-1.0, 1.0}, {1.0, 1.0});
  const RationalFunction N = z ? tf({1.0}, {0.0, 1.0}) : tf({1.0}, {1.0, 1.0});
  const RationalMatrix U = diag(1.0, n, d);
  const RationalMatrix V = diag(-2.0, n, d);
  return {diag(g, n, d), {U, V, U, V, diag(M, n, d), diag(M, n, d), diag(N, n, d), diag(N, n, d)}};
}

RationalMatrix random_q(Sampler& rng, Domain d, Eigen::Index m, Eigen::Index p) {
  return rng.fir_matrix(d, m, p, rng.integer(0, 2), 2.0);
}

void expect_quads_near(const ClosedLoopQuad& a, const ClosedLoopQuad& b, double tol) {
  EXPECT_LT(response_distance(a.X, b.X), tol);
  EXPECT_LT(response_distance(a.Y, b.Y), tol);
  EXPECT_LT(response_distance(a.W, b.W), tol);
  EXPECT_LT(response_distance(a.Z, b.Z), tol);
}

}  // namespace

TEST(Dcf, TrivialFactorizationOfStablePlant) {
  Sampler rng(1);
  for (const Domain d : {Domain::discrete, Domain::continuous}) {
    const RationalMatrix G = rng.stable_matrix(d, 2, 3, 1, true);
    const DoublyCoprimeFactorization dcf = trivial_dcf(G);
    const DcfReport r = verify_dcf(G, dcf);
    EXPECT_TRUE(r.valid);
    EXPECT_EQ(r.bezout_residual, 0.0);
    EXPECT_EQ(r.right_residual, 0.0);
    EXPECT_EQ(r.left_residual, 0.0);
  }
}

TEST(Dcf, DetectsBrokenFactorizations) {
  Sampler rng(2);
  const RationalMatrix G = rng.stable_matrix(Domain::discrete, 2, 2, 1, true);
  DoublyCoprimeFactorization broken = trivial_dcf(G);
  broken.Vr = RationalMatrix::identity(2, Domain::discrete);
  const DcfReport r = verify_dcf(G, broken);
  EXPECT_FALSE(r.valid);
  EXPECT_GT(r.bezout_residual, 0.5);

  const Fixture f = unstable_fixture(Domain::discrete, 1);
  const DcfReport unstable = verify_dcf(f.G, trivial_dcf(f.G));
  EXPECT_FALSE(unstable.valid);
  EXPECT_FALSE(unstable.stable[6]);
  EXPECT_TRUE(verify_dcf(f.G, f.dcf).valid);
  EXPECT_TRUE(verify_dcf(unstable_fixture(Domain::continuous, 2).G, unstable_fixture(Domain::continuous, 2).dcf).valid);
}

TEST(YoulaToIop, ZeroParameterGivesOpenLoopQuadruple) {
  Sampler rng(3);
  const RationalMatrix G = rng.stable_matrix(Domain::discrete, 2, 3, 2, true);
  const ClosedLoopQuad q = youla_to_iop(RationalMatrix::zero(3, 2, Domain::discrete), trivial_dcf(G));
  EXPECT_EQ(max_residual(q.X, RationalMatrix::identity(2, Domain::discrete)), 0.0);
  EXPECT_TRUE(q.Y.is_zero());
  EXPECT_EQ(max_residual(q.W, G), 0.0);
  EXPECT_EQ(max_residual(q.Z, RationalMatrix::identity(3, Domain::discrete)), 0.0);
}

// g = 1/(z - 1/2), Q = 3/10: X = Z = 1 - 3g/10, Y = -3/10, W = (1 - 3g/10) g.
TEST(YoulaToIop, ScalarExample) {
  RationalMatrix G(1, 1, Domain::discrete);
  G(0, 0) = tf({1.0}, {-0.5, 1.0});
  const RationalMatrix Q = RationalMatrix::constant(Eigen::MatrixXd::Constant(1, 1, 0.3), Domain::discrete);
  const ClosedLoopQuad q = youla_to_iop(Q, trivial_dcf(G));
  const RationalFunction x = tf({-0.8, 1.0}, {-0.5, 1.0});
  EXPECT_LT(residual_norm({q.X(0, 0), -x}), 1e-12);
  EXPECT_LT(residual_norm({q.Z(0, 0), -x}), 1e-12);
  EXPECT_LT(residual_norm({q.Y(0, 0), RationalFunction(0.3)}), 1e-12);
  EXPECT_LT(residual_norm({q.W(0, 0), -(x * G(0, 0))}), 1e-12);
  EXPECT_LT(max_residual(iop_to_youla(q, trivial_dcf(G)), -q.Y), 1e-12);
}

TEST(YoulaToIop, DeadbeatFromNontrivialFactorization) {
  const Fixture f = unstable_fixture(Domain::discrete, 1);
  const RationalMatrix Q0 = RationalMatrix::zero(1, 1, Domain::discrete);
  const RationalMatrix K = youla_controller(Q0, f.dcf);
  EXPECT_LT(max_residual(K, RationalMatrix::constant(Eigen::MatrixXd::Constant(1, 1, -2.0), Domain::discrete)), 1e-12);
  expect_quads_near(youla_to_iop(Q0, f.dcf), closed_loop_maps(f.G, K), 1e-12);
}

TEST(YoulaToIop, RejectsUnstableOrImproperParameters) {
  const Fixture f = unstable_fixture(Domain::discrete, 1);
  RationalMatrix Q(1, 1, Domain::discrete);
  Q(0, 0) = tf({1.0}, {-2.0, 1.0});
  EXPECT_THROW(youla_to_iop(Q, f.dcf), UnstableParameterError);
  Q(0, 0) = tf({0.0, 1.0}, {1.0});
  EXPECT_THROW(youla_to_iop(Q, f.dcf), UnstableParameterError);
  EXPECT_THROW(youla_to_iop(RationalMatrix::zero(2, 1, Domain::discrete), f.dcf), DimensionError);
}

TEST(IopToYoula, RejectsNonMembers) {
  const Fixture f = unstable_fixture(Domain::discrete, 1);
  ClosedLoopQuad open{RationalMatrix::identity(1, Domain::discrete), RationalMatrix::zero(1, 1, Domain::discrete), f.G,
                      RationalMatrix::identity(1, Domain::discrete)};
  EXPECT_THROW(iop_to_youla(open, f.dcf), MembershipError);
  ClosedLoopQuad off = youla_to_iop(RationalMatrix::zero(1, 1, Domain::discrete), f.dcf);
  off.Y = off.Y + RationalMatrix::constant(Eigen::MatrixXd::Constant(1, 1, 0.1), Domain::discrete);
  EXPECT_THROW(iop_to_youla(off, f.dcf), MembershipError);
}

// Both maps are mutually inverse between stable proper Q and the affine
// subspace, and the controllers they induce coincide.
TEST(YoulaRoundTrip, RoundTripsOnRandomParameters) {
  Sampler rng(77);
  int checked = 0;
  for (int trial = 0; trial < 120; ++trial) {
    const Domain d = trial % 2 ? Domain::discrete : Domain::continuous;
    Fixture f;
    switch (trial % 3) {
      case 0:
        f = unstable_fixture(d, 1 + trial % 2);
        break;
      case 1: {
        const RationalMatrix G = rng.stable_matrix(d, 1, 1, 1, true);
        f = {G, trivial_dcf(G)};
        break;
      }
      default: {
        const RationalMatrix G = rng.stable_matrix(d, 2, 2, 1, true);
        f = {G, trivial_dcf(G)};
      }
    }
    SCOPED_TRACE("trial " + std::to_string(trial));
    const RationalMatrix Q = random_q(rng, d, f.G.cols(), f.G.rows());
    const ClosedLoopQuad quad = youla_to_iop(Q, f.dcf);
    const MembershipReport m = check_iop_membership(f.G, quad);
    EXPECT_TRUE(m.member) << "trial " << trial;
    const RationalMatrix back = iop_to_youla(quad, f.dcf);
    EXPECT_LT(max_residual(back, Q), 1e-8) << "trial " << trial;
    EXPECT_TRUE(is_stable(back));
    EXPECT_NE(properness_class(back), Properness::improper);

    const RationalMatrix K = youla_controller(Q, f.dcf);
    EXPECT_LT(max_residual(K, recover_controller(quad)), 1e-8) << "trial " << trial;
    EXPECT_TRUE(is_internally_stabilizing(f.G, K));
    ++checked;
  }
  EXPECT_GE(checked, 100);
}

// Closing the loop on the induced controller reproduces the quadruple. The
// controller passes through rational arithmetic with pole-zero cancellation
// at 1e-7, so agreement is checked at the level that cancellation allows.
TEST(YoulaRoundTrip, InducedControllerReproducesQuadruple) {
  Sampler rng(77);
  for (int trial = 0; trial < 120; ++trial) {
    const Domain d = trial % 2 ? Domain::discrete : Domain::continuous;
    Fixture f;
    switch (trial % 3) {
      case 0:
        f = unstable_fixture(d, 1 + trial % 2);
        break;
      case 1: {
        const RationalMatrix G = rng.stable_matrix(d, 1, 1, 1, true);
        f = {G, trivial_dcf(G)};
        break;
      }
      default: {
        const RationalMatrix G = rng.stable_matrix(d, 2, 2, 1, true);
        f = {G, trivial_dcf(G)};
      }
    }
    SCOPED_TRACE("trial " + std::to_string(trial));
    const RationalMatrix Q = random_q(rng, d, f.G.cols(), f.G.rows());
    expect_quads_near(closed_loop_maps(f.G, youla_controller(Q, f.dcf)), youla_to_iop(Q, f.dcf), 1e-5);
  }
}

// Starting from a stabilizing controller: its quadruple maps to a stable
// parameter that maps back to the same quadruple.
TEST(YoulaRoundTrip, ControllersMapToStableParameters) {
  Sampler rng(78);
  for (int trial = 0; trial < 40; ++trial) {
    const Domain d = trial % 2 ? Domain::discrete : Domain::continuous;
    const Fixture f = unstable_fixture(d, 1);
    // Stabilizing controllers of the fixture come from stable Q.
    SCOPED_TRACE("trial " + std::to_string(trial));
    const RationalMatrix K = youla_controller(random_q(rng, d, 1, 1), f.dcf);
    const ClosedLoopQuad quad = closed_loop_maps(f.G, K);
    const RationalMatrix Q = iop_to_youla(quad, f.dcf);
    EXPECT_TRUE(is_stable(Q));
    expect_quads_near(youla_to_iop(Q, f.dcf), quad, 1e-8);
  }
}
