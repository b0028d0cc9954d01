#include <doctest.h>

#include "drazinkit/projector.hpp"
#include "drazinkit/spectral.hpp"
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

}  // namespace

TEST_CASE("contour projection of diag(0,1) onto {0}")
{
   const auto m = OperatorModel::diagonal({0.0}, {1.0});
   const auto sigma = spectral_set_from_points(m, {}, true);
   const auto contour = enclosing_contour(m, sigma);
   REQUIRE(contour.circles.size() == 1);
   CHECK(contour.circles[0].radius == 0.5);
   const auto p = projection_contour(m, sigma);
   CHECK(max_abs(p.matrix - diag({1.0, 0.0})) < 1e-12);
   CHECK(p.idem_residual < 1e-12);
   CHECK(p.certified);
}

TEST_CASE("contour projection of diag(0,1/3,2) onto {0,1/3} uses the midpoint modulus")
{
   const auto m = OperatorModel::diagonal({0.0, 1.0 / 3.0}, {2.0});
   const auto sigma = partition_sigma_n(m, 0).first;
   const auto contour = enclosing_contour(m, sigma);
   REQUIRE(contour.circles.size() == 1);
   CHECK(contour.circles[0].radius == doctest::Approx(7.0 / 6.0).epsilon(1e-15));
   const auto p = projection_contour(m, sigma);
   CHECK(max_abs(p.matrix - diag({1.0, 1.0, 0.0})) < 1e-10);
   CHECK(max_abs(projection_exact_diagonal(m, sigma).matrix - diag({1.0, 1.0, 0.0})) == 0.0);
}

TEST_CASE("projection onto the full spectrum of a nilpotent block")
{
   Matrix a(2, 2);
   a << 0.0, 1.0, 0.0, 0.0;
   const auto m = OperatorModel::dense(a);
   const auto p = projection_contour(m, spectral_set_from_points(m, {}, true));
   CHECK(max_abs(p.matrix - Matrix::Identity(2, 2)) < 1e-12);
}

TEST_CASE("exact diagonal projections")
{
   const auto m1 = OperatorModel::diagonal({0.0, 0.25}, {2.0});
   CHECK(max_abs(projection_exact_diagonal(m1, partition_sigma_n(m1, 0).first).matrix - diag({1.0, 1.0, 0.0})) ==
         0.0);

   const auto m2 = OperatorModel::diagonal({I / 4.0}, {-1.0});
   const auto p2 = projection_exact_diagonal(m2, spectral_set_from_points(m2, {I / 4.0}, false));
   CHECK(max_abs(p2.matrix - diag({1.0, 0.0})) == 0.0);
   CHECK(p2.idem_residual == 0.0);
   CHECK(p2.commute_residual == 0.0);

   const auto m3 = OperatorModel::diagonal({}, {0.25});
   const auto p3 = projection_exact_diagonal(m3, spectral_set_from_points(m3, {}, true));
   CHECK(max_abs(p3.matrix) == 0.0);
}

TEST_CASE("eigenvalue on the contour is ambiguous")
{
   const auto m = OperatorModel::diagonal({}, {0.1, 0.1 + 0.9e-6, 0.1 + 1.8e-6});
   SpectralSet sigma;
   sigma.points.push_back({0.1, 2});
   sigma.radius_r = 0.1;
   sigma.separation_gap = 0.45e-6;
   CHECK(kind_of([&] { projection_exact_diagonal(m, sigma); }) == ErrorKind::ambiguous_membership);
}

TEST_CASE("uncertifiable projections and bad contours")
{
   const auto m = OperatorModel::diagonal({0.0}, {1.0});
   SpectralSet gapless = spectral_set_from_points(m, {}, true);
   gapless.separation_gap = 0.0;
   CHECK(kind_of([&] { projection_contour(m, gapless); }) == ErrorKind::non_separable);

   OrientedContour through;
   through.circles.push_back({Complex{}, 1.0, 1});
   CHECK(kind_of([&] { check_contour_clear(through, {1.0}); }) == ErrorKind::invalid_contour);
   OrientedContour degenerate;
   degenerate.circles.push_back({Complex{}, 0.0, 1});
   CHECK(kind_of([&] { check_contour_clear(degenerate, {1.0}); }) == ErrorKind::invalid_contour);
}

TEST_CASE("contour quadrature matches the exact oracle on random diagonals")
{
   Gen g(31);
   for (int trial = 0; trial < 100; ++trial)
   {
      const auto m = testing::random_diagonal(g, g.integer(1, 5), g.integer(1, 3), trial % 2 == 0);
      const std::size_t n = static_cast<std::size_t>(g.integer(0, static_cast<int>(riesz_sequence(m).size()) - 1));
      const auto [sigma, rest] = partition_sigma_n(m, n);
      const auto exact = projection_exact_diagonal(m, sigma);
      const auto quad = projection_contour(m, sigma);
      CHECK(max_abs(exact.matrix - quad.matrix) <= 1e-10);

      const Matrix a = materialize(m);
      CHECK(residual_norm(a * quad.matrix - quad.matrix * a) <= 1e-10);
      CHECK(std::abs(quad.matrix.trace() - static_cast<double>(sigma.total_multiplicity())) < 1e-8);

      const auto complement = projection_contour(m, rest);
      const Eigen::Index dim = static_cast<Eigen::Index>(m.dimension());
      CHECK(residual_norm(quad.matrix + complement.matrix - Matrix::Identity(dim, dim)) <= 1e-10);
   }
}

TEST_CASE("contour projection certifies Jordan-block fixtures")
{
   Gen g(32);
   for (int trial = 0; trial < 10; ++trial)
   {
      const auto fx = testing::random_jordan(g);
      const auto sigma = spectral_set_from_points(fx.model, fx.small, true);
      const auto p = projection_contour(fx.model, sigma);
      CHECK(p.certified);
      CHECK(p.idem_residual < 1e-10);
      CHECK(std::abs(p.matrix.trace() - static_cast<double>(fx.small.size())) < 1e-8);
   }
}

TEST_CASE("contour sums are reproducible for a fixed node count")
{
   Gen g(33);
   const auto fx = testing::random_jordan(g);
   const auto sigma = spectral_set_from_points(fx.model, fx.small, true);
   const auto contour = enclosing_contour(fx.model, sigma);
   const ResolventSolver solver(fx.model);
   const auto f = [&](Complex z) { return solver.resolvent(z); };
   const Matrix first = contour_integral(contour, f, 96);
   const Matrix second = contour_integral(contour, f, 96);
   CHECK((first - second).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("declared Riesz projection")
{
   const auto m = OperatorModel::diagonal({0.25, I / 4.0}, {-1.0});
   const auto p = declared_riesz_projection(m);
   CHECK(max_abs(p.matrix - diag({1.0, 1.0, 0.0})) == 0.0);
   CHECK(p.certified);
}
