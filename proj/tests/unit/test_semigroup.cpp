#include <doctest.h>

#include <cmath>

#include "drazinkit/semigroup.hpp"
#include "support.hpp"

using namespace drazinkit;
using drazinkit::testing::diag;
using drazinkit::testing::Gen;
using drazinkit::testing::max_abs;

namespace {

const Complex I{0.0, 1.0};

template <class F>
ErrorKind kind_of(F&& f)
{
   try
   {
      f();
   }
   catch (const Error& e)
   {
      return e.kind();
   }
   FAIL("expected an error");
   return ErrorKind::parse;
}

const OperatorModel kDecay2 = OperatorModel::diagonal({I / 4.0}, {-1.0});

SpectralProjection proj(const Matrix& p, const OperatorModel& m) { return certify_projection(p, materialize(m)); }

// Projection for the dense fixtures: onto the small cluster.
SpectralProjection small_projection(const testing::JordanFixture& fx)
{
   return projection_contour(fx.model, spectral_set_from_points(fx.model, fx.small, true));
}

}  // namespace

TEST_CASE("evolve on a diagonal")
{
   CHECK(max_abs(evolve(kDecay2, 2.0) - diag({std::exp(I / 2.0), std::exp(-2.0)})) == 0.0);
}

TEST_CASE("evolve on a nilpotent block: the series stops after two terms")
{
   Matrix a(2, 2);
   a << 0.0, 1.0, 0.0, 0.0;
   const Matrix oracle = Matrix::Identity(2, 2) + a;
   CHECK(max_abs(evolve(OperatorModel::dense(a), 1.0) - oracle) < 1e-15);
   Matrix expected(2, 2);
   expected << 1.0, 1.0, 0.0, 1.0;
   CHECK(max_abs(oracle - expected) == 0.0);
}

TEST_CASE("evolve at t = 0 is the identity")
{
   Gen g(51);
   const auto fx = testing::random_jordan(g);
   const Eigen::Index n = static_cast<Eigen::Index>(fx.model.dimension());
   CHECK(max_abs(evolve(fx.model, 0.0) - Matrix::Identity(n, n)) == 0.0);
   CHECK(max_abs(evolve(kDecay2, 0.0) - Matrix::Identity(2, 2)) == 0.0);
}

TEST_CASE("evolve overflow")
{
   CHECK(kind_of([] { evolve(OperatorModel::diagonal({}, {1000.0}), 1.0); }) == ErrorKind::horizon_too_large);
   Matrix a = Matrix::Zero(2, 2);
   a(0, 0) = 1000.0;
   a(0, 1) = 1.0;
   CHECK(kind_of([&] { evolve(OperatorModel::dense(a), 1.0); }) == ErrorKind::horizon_too_large);
}

TEST_CASE("exponential of a projection")
{
   const auto m = OperatorModel::diagonal({0.0}, {1.0});
   const auto p = proj(diag({1.0, 0.0}), m);
   CHECK(max_abs(exp_projection(p, std::log(2.0)) - diag({0.5, 1.0})) < 1e-16);
   CHECK(max_abs(exp_projection(p, 0.0) - Matrix::Identity(2, 2)) == 0.0);
   const auto full = proj(Matrix::Identity(2, 2), m);
   CHECK(max_abs(exp_projection(full, 1.0) - std::exp(-1.0) * Matrix::Identity(2, 2)) == 0.0);

   Matrix bad = Matrix::Zero(2, 2);
   bad(0, 1) = 1.0;
   bad(0, 0) = 0.5;
   CHECK(kind_of([&] { exp_projection(proj(bad, m), 1.0); }) == ErrorKind::certification);
}

TEST_CASE("exponential of a projection agrees with the generic exponential")
{
   Gen g(52);
   for (int trial = 0; trial < 20; ++trial)
   {
      const auto fx = testing::random_jordan(g);
      const auto p = small_projection(fx);
      const double t = g.uniform(0.0, 5.0);
      // Contour projections of non-normal fixtures are idempotent only up to
      // their residual, which the closed form turns into an O(t) defect.
      const double scale = 1.0 + residual_norm(p.matrix);
      CHECK(residual_norm(exp_projection(p, t) - expm(-t * p.matrix)) <= scale * (1e-12 + t * p.idem_residual));
   }
}

TEST_CASE("decay fit on diag(i/4, -1)")
{
   const auto p = proj(diag({1.0, 0.0}), kDecay2);
   const auto probe = decay_fit(kDecay2, p, {0.0, 1.0, 2.0, 4.0});
   const double expected[] = {1.0, std::exp(-1.0), std::exp(-2.0), std::exp(-4.0)};
   for (int k = 0; k < 4; ++k) { CHECK(probe.norms[k] == doctest::Approx(expected[k]).epsilon(1e-12)); }
   CHECK(probe.fit_mu == doctest::Approx(1.0).epsilon(1e-5));
   CHECK(probe.fit_m == doctest::Approx(1.0).epsilon(1e-5));
   CHECK(probe.spectral_gap == 1.0);
   for (int k = 0; k < 4; ++k) { CHECK(probe.norms[k] <= probe.envelope(probe.time_grid[k]) * (1.0 + 1e-9)); }
}

TEST_CASE("decay fit rejects growth and handles the trivial complement")
{
   const auto grow = OperatorModel::diagonal({I / 4.0}, {1.0});
   CHECK(kind_of([&] { decay_fit(grow, proj(diag({1.0, 0.0}), grow), {0.0, 1.0}); }) == ErrorKind::no_decay);
   const auto probe = decay_fit(kDecay2, proj(Matrix::Identity(2, 2), kDecay2), {0.0, 1.0, 2.0});
   CHECK(probe.degenerate);
   CHECK(probe.fit_m == 0.0);
   for (double v : probe.norms) { CHECK(v == 0.0); }
}

TEST_CASE("improper integral examples")
{
   const double tol = 1e-8;
   const auto p = proj(diag({1.0, 0.0}), kDecay2);
   const auto j = improper_integral(kDecay2, p, tol);
   // int_0^inf e^{-t} dt = 1.
   CHECK(residual_norm(j.value - diag({0.0, -1.0})) <= 10.0 * tol);
   CHECK(residual_norm(shifted_inverse(kDecay2, p) - diag({0.0, -1.0})) < 1e-15);

   const auto scalar = OperatorModel::diagonal({}, {-2.0});
   const auto j2 = improper_integral(scalar, proj(Matrix::Zero(1, 1), scalar), tol);
   CHECK(std::abs(j2.value(0, 0) + 0.5) <= 10.0 * tol);

   const auto j3 = improper_integral(kDecay2, proj(Matrix::Identity(2, 2), kDecay2), tol);
   CHECK(max_abs(j3.value) == 0.0);
}

TEST_CASE("improper integral identity on random fixtures")
{
   Gen g(53);
   const double tol = 1e-8;
   for (int trial = 0; trial < 10; ++trial)
   {
      const auto m = testing::random_decaying(g, g.integer(1, 3), g.integer(1, 3));
      const auto p = declared_riesz_projection(m);
      CHECK(residual_norm(improper_integral(m, p, tol).value - shifted_inverse(m, p)) <= 10.0 * tol);
   }
   for (int trial = 0; trial < 3; ++trial)
   {
      const auto fx = testing::random_normal_decaying(g, 2, 2);
      const auto p = small_projection(fx);
      CHECK(residual_norm(improper_integral(fx.model, p, tol).value - shifted_inverse(fx.model, p)) <= 10.0 * tol);
   }
}

TEST_CASE("semigroup law")
{
   Gen g(54);
   std::vector<OperatorModel> fixtures;
   for (int k = 0; k < 3; ++k) { fixtures.push_back(testing::random_decaying(g, 2, 2)); }
   for (int k = 0; k < 3; ++k) { fixtures.push_back(testing::random_jordan(g, true).model); }
   for (const auto& m : fixtures)
   {
      for (int k = 0; k < 50; ++k)
      {
         const double t = g.uniform(0.0, 3.0);
         const double s = g.uniform(0.0, 3.0);
         CHECK(residual_norm(evolve(m, t + s) - evolve(m, t) * evolve(m, s)) <= 1e-10);
      }
   }
}

TEST_CASE("T(t) e^{-tP} is generated by A - P")
{
   Gen g(55);
   for (int trial = 0; trial < 10; ++trial)
   {
      const auto fx = testing::random_jordan(g, true);
      const auto p = small_projection(fx);
      const Matrix a = materialize(fx.model);
      const double t = g.uniform(0.0, 2.0);
      const Matrix s = evolve(fx.model, t) * exp_projection(p, t);
      CHECK(residual_norm(s - expm(t * (a - p.matrix))) <= 1e-10);
   }
}

TEST_CASE("growth bound of the decaying block")
{
   Gen g(56);
   for (int trial = 0; trial < 20; ++trial)
   {
      const auto m = testing::random_decaying(g, 2, 3);
      const auto p = declared_riesz_projection(m);
      const auto probe = decay_fit(m, p, {0.0});
      CHECK(std::abs(-probe.spectral_gap - decaying_block_growth_bound(m, p, 1.0)) <= 1e-8);
   }
}

TEST_CASE("Q projection selects the part of sigma(AP) inside the disc")
{
   const auto m = OperatorModel::diagonal({0.25, 0.125, I / 4.0}, {-1.0});
   const auto p = declared_riesz_projection(m);
   const auto q = q_projection(m, p, 0.2);
   CHECK(max_abs(q.q.matrix - diag({0.0, 1.0, 0.0, 0.0})) < 1e-12);
   CHECK(q.qp_residual <= 1e-9);
   CHECK(q.pq_residual <= 1e-9);
   CHECK(q.identity_residual <= 1e-8);
   const Matrix a = materialize(m);
   CHECK(residual_norm(a * q.q.matrix - q.q.matrix * a) <= 1e-9);

   // theta above every point of sigma(AP): Q = P.
   const auto whole = q_projection(m, p, 0.9);
   CHECK(max_abs(whole.q.matrix - p.matrix) < 1e-12);

   CHECK(kind_of([&] { q_projection(m, p, 1.5); }) == ErrorKind::theta_too_large);
}
