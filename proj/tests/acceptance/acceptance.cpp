// Runs every acceptance criterion at its stated tolerance and prints one
// PASS/FAIL line per criterion. Exit status is the number of failures.

#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "drazinkit/drazin.hpp"
#include "drazinkit/ode2.hpp"
#include "drazinkit/projector.hpp"
#include "drazinkit/semigroup.hpp"
#include "drazinkit/spectral.hpp"
#include "support.hpp"

using namespace drazinkit;
using drazinkit::testing::Gen;

namespace {

const Complex I{0.0, 1.0};

struct Outcome {
   bool pass = true;
   std::string detail;
};

// Tracks the worst value of a residual against its threshold.
struct Worst {
   const char* what;
   double tol;
   double value = 0.0;

   void see(double v)
   {
      if (std::isnan(v) || v > value || std::isnan(value)) { value = v; }
   }
   bool ok() const { return !std::isnan(value) && value <= tol; }
   std::string text() const
   {
      char buf[160];
      std::snprintf(buf, sizeof buf, "%s %.6g (tol %.6g)", what, value, tol);
      return buf;
   }
};

Outcome summarize(std::initializer_list<const Worst*> ws, std::string extra = {})
{
   Outcome o;
   for (const Worst* w : ws)
   {
      o.pass = o.pass && w->ok();
      if (!o.detail.empty()) { o.detail += "; "; }
      o.detail += w->text();
   }
   if (!extra.empty()) { o.detail += "; " + extra; }
   return o;
}

Matrix diag(std::initializer_list<Complex> d) { return testing::diag(d); }

std::vector<OperatorModel> diagonal_fixtures()
{
   Gen g(1001);
   std::vector<OperatorModel> out;
   for (int k = 0; k < 50; ++k) { out.push_back(testing::random_diagonal(g, g.integer(1, 5), g.integer(1, 3), k % 2 == 0)); }
   return out;
}

std::size_t random_index(Gen& g, const OperatorModel& m)
{
   return static_cast<std::size_t>(g.integer(0, static_cast<int>(riesz_sequence(m).size()) - 1));
}

Outcome axioms()
{
   Worst bab{"max ||BAB-B||", 1e-10};
   Worst ab{"max ||AB-BA||", 1e-10};
   Worst haus{"max Hausdorff", 1e-8};
   Gen g(1002);
   auto record = [&](const DrazinCertificate& c) {
      bab.see(c.bab_residual);
      ab.see(c.commute_residual);
      haus.see(c.sigma_match);
   };
   for (const auto& m : diagonal_fixtures())
   {
      record(drazin_algebraic(m, partition_sigma_n(m, random_index(g, m)).first));
   }
   for (int k = 0; k < 5; ++k)
   {
      const auto fx = testing::random_jordan(g);
      const auto sigma = spectral_set_from_points(fx.model, fx.small, true);
      record(drazin_algebraic(fx.model, sigma, admissible_shift(sigma)));
   }
   return summarize({&bab, &ab, &haus}, "50 diagonal + 5 Jordan-block fixtures");
}

Outcome representations()
{
   Worst contour{"max ||contour - algebraic||", 1e-8};
   Worst calculus{"max ||h(A) - algebraic||", 1e-8};
   Gen g(1003);
   for (const auto& m : diagonal_fixtures())
   {
      const auto [sigma, rest] = partition_sigma_n(m, random_index(g, m));
      const Matrix b = drazin_algebraic(m, sigma).b_matrix;
      contour.see(residual_norm(drazin_contour(m, rest) - b));
      calculus.see(residual_norm(functional_calculus_inverse(m, sigma).matrix - b));
   }
   return summarize({&contour, &calculus});
}

Outcome laurent()
{
   // 2 is declared as the leading Riesz point so that sigma_1 = {0, 1/3}.
   const auto m = OperatorModel::diagonal({0.0, 1.0 / 3.0, 2.0}, {});
   const auto sigma = partition_sigma_n(m, 1).first;
   const ResolventSolver solver(m);
   Worst ratio{"max error / tail bound", 1.0};
   Gen g(1004);
   for (int k = 0; k < 20; ++k)
   {
      const double rho = 1.0 / 3.0 + (2.0 - 1.0 / 3.0) * g.uniform(0.05, 0.95);
      const Complex z = std::polar(rho, g.angle());
      const auto lr = laurent_resolvent(m, sigma, z);
      ratio.see(residual_norm(lr.value - solver.resolvent(z)) / lr.tail_bound);
   }
   Worst at_one{"||R(1) - diag(1, 3/2, -1)||", 1e-10};
   at_one.see(residual_norm(laurent_resolvent(m, sigma, 1.0).value - diag({1.0, 1.5, -1.0})));
   return summarize({&ratio, &at_one}, "20 random points in 1/3 < |lambda| < 2");
}

Outcome nonuniqueness()
{
   const auto m = OperatorModel::diagonal({0.0, 1.0 / 3.0, 0.25}, {2.0});
   Worst gap3{"|gap - 3|", 1e-8};
   gap3.see(std::abs(nonuniqueness_gap(m, 0, 1).gap_norm - 3.0));
   Gen g(1005);
   double smallest = INFINITY;
   int count = 0;
   for (const auto& f : diagonal_fixtures())
   {
      const std::size_t len = riesz_sequence(f).size();
      if (len < 2) { continue; }
      const std::size_t n0 = static_cast<std::size_t>(g.integer(0, static_cast<int>(len) - 2));
      const std::size_t n1 = static_cast<std::size_t>(g.integer(static_cast<int>(n0) + 1, static_cast<int>(len) - 1));
      smallest = std::min(smallest, nonuniqueness_gap(f, n0, n1).gap_norm);
      ++count;
   }
   Outcome o = summarize({&gap3});
   char buf[128];
   std::snprintf(buf, sizeof buf, "min gap %.3e over %d random pairs", smallest, count);
   o.detail += "; " + std::string(buf);
   o.pass = o.pass && count > 0 && smallest > 0.0;
   return o;
}

Outcome perturbations()
{
   Gen g(1006);
   int passed = 0;
   Worst comm{"max ||[A,R]||", 1e-12};
   std::string failure;
   for (int k = 0; k < 20; ++k)
   {
      try
      {
         if (k < 15)
         {
            // Diagonal R: small shifts of the Riesz coordinates, invertible
            // coordinates moved by less than their distance to the disc.
            const auto a = testing::random_diagonal(g, g.integer(1, 4), g.integer(1, 3), k % 3 != 0);
            std::vector<Complex> shifts;
            for (const Complex& z : a.diagonal_entries())
            {
               shifts.push_back(std::abs(z) < 0.5 ? g.polar(0.0, 0.1) : g.polar(0.0, 0.3));
            }
            const auto res = perturb_riesz(a, OperatorModel::diagonal(shifts, {}));
            comm.see(res.commutator);
            passed += res.certificate.passes() ? 1 : 0;
         }
         else
         {
            // A polynomial in a dense Jordan-block model commutes with it.
            const auto fx = testing::random_jordan(g);
            const Matrix a = materialize(fx.model);
            const Complex c = g.polar(0.0, 0.2);
            const auto res = perturb_riesz(fx.model, OperatorModel::dense(c * a * a));
            comm.see(res.commutator);
            passed += res.certificate.passes() ? 1 : 0;
         }
      }
      catch (const Error& e)
      {
         if (failure.empty()) { failure = e.what(); }
      }
   }
   Outcome o = summarize({&comm}, std::to_string(passed) + "/20 certificates pass");
   if (!failure.empty()) { o.detail += "; first error: " + failure; }
   o.pass = o.pass && passed == 20;
   return o;
}

struct DecayFixture {
   OperatorModel model;
   SpectralProjection p;
   bool diagonal;
};

std::vector<DecayFixture> decay_fixtures()
{
   std::vector<DecayFixture> out;
   const auto closed = OperatorModel::diagonal({I / 4.0}, {-1.0});
   out.push_back({closed, declared_riesz_projection(closed), true});
   Gen g(1007);
   for (int k = 0; k < 15; ++k)
   {
      const auto m = testing::random_decaying(g, g.integer(1, 3), g.integer(1, 3));
      out.push_back({m, declared_riesz_projection(m), true});
   }
   for (int k = 0; k < 4; ++k)
   {
      const auto fx = testing::random_normal_decaying(g, 2, 2);
      const auto sigma = spectral_set_from_points(fx.model, fx.small, true);
      out.push_back({fx.model, projection_contour(fx.model, sigma), false});
   }
   return out;
}

Outcome integral_identity()
{
   const double tol = 1e-8;
   Worst err{"max ||integral - (A-P)^-1 (I-P)||", 10.0 * tol};
   for (const auto& f : decay_fixtures())
   {
      err.see(residual_norm(improper_integral(f.model, f.p, tol).value - shifted_inverse(f.model, f.p)));
   }
   const auto closed_model = OperatorModel::diagonal({I / 4.0}, {-1.0});
   Worst closed{"||integral - diag(0,-1)|| on diag(i/4,-1)", 10.0 * tol};
   closed.see(residual_norm(improper_integral(closed_model, declared_riesz_projection(closed_model), tol).value -
                            diag({0.0, -1.0})));
   return summarize({&err, &closed}, "20 fixtures, tol 1e-8");
}

Outcome decay_envelope()
{
   Worst ratio{"max norm / envelope - 1", 1e-9};
   // fit_mu = gap - 1e-6 rounds at the scale of the gap (at most 5 here).
   Worst mu{"max |mu - gap| (diagonal)", 1e-6 + 4.0 * std::numeric_limits<double>::epsilon() * 5.0};
   for (const auto& f : decay_fixtures())
   {
      const auto probe0 = decay_fit(f.model, f.p, {0.0});
      const double span = std::max(1.0, 20.0 / probe0.spectral_gap);
      const auto probe = decay_fit(f.model, f.p, uniform_grid(span, 200));
      for (std::size_t k = 0; k < probe.time_grid.size(); ++k)
      {
         const double env = probe.envelope(probe.time_grid[k]);
         ratio.see(probe.norms[k] / env - 1.0);
      }
      if (f.diagonal) { mu.see(std::abs(probe.fit_mu - probe.spectral_gap)); }
   }
   return summarize({&ratio, &mu}, "200 samples per fixture");
}

Outcome q_projection_check()
{
   const auto m = OperatorModel::diagonal({0.25, 0.125, I / 4.0}, {-1.0});
   const auto q = q_projection(m, declared_riesz_projection(m), 0.2);
   Worst qp{"||QP-Q||", 1e-9};
   Worst pq{"||PQ-Q||", 1e-9};
   Worst id{"||A^{D,sigma(AQ)}(I-P) - (A-P)^-1(I-P)||", 1e-8};
   qp.see(q.qp_residual);
   pq.see(q.pq_residual);
   id.see(q.identity_residual);
   return summarize({&qp, &pq, &id});
}

double sup_error(const Ode2Problem& prob, Ode2Mode mode)
{
   const Ode2Solver solver(prob);
   const auto grid = uniform_grid(solver.validity_limit(), 41);
   const auto ref = reference_integrate(prob, grid);
   double worst = 0.0;
   for (std::size_t k = 0; k < grid.size(); ++k)
   {
      worst = std::max(worst, (solver.solve(grid[k], mode) - ref[k]).cwiseAbs().maxCoeff());
   }
   return worst;
}

Outcome ode_oracle()
{
   Worst verbatim{"max sup error, verbatim u0=0", 1e-6};
   Gen g(1009);
   for (int trial = 0; trial < 10; ++trial)
   {
      const auto m = testing::random_diagonal(g, g.integer(1, 3), g.integer(1, 2), trial % 2 == 0);
      const auto sigma = zero_cluster(m);
      const double horizon = std::min(1.5, 0.9 / std::max(sigma.radius_r, 1e-3));
      const Eigen::Index n = static_cast<Eigen::Index>(m.dimension());
      Forcing f;
      for (Eigen::Index k = 0; k < n; ++k)
      {
         if (k % 2 == 0) { f.components.push_back(TrigForcing{g.uniform(-3.0, 3.0), g.uniform(-1.0, 1.0), g.uniform(-2.0, 2.0)}); }
         else { f.components.push_back(PolyForcing{{g.uniform(-1.0, 1.0), g.uniform(-1.0, 1.0), g.uniform(-1.0, 1.0)}}); }
      }
      const Matrix p = spectral_projection(m, sigma).matrix;
      Vector v0(n);
      for (Eigen::Index k = 0; k < n; ++k) { v0(k) = g.gaussian(); }
      v0 = (Matrix::Identity(n, n) - p) * v0;
      verbatim.see(sup_error({m, sigma, f, Vector::Zero(n), v0, horizon}, Ode2Mode::verbatim));
   }

   const auto scalar = OperatorModel::diagonal({}, {-1.0});
   Vector one(1);
   one(0) = 1.0;
   const Ode2Problem u0_case{scalar, zero_cluster(scalar), Forcing::zero(1), one, Vector::Zero(1), 1.0};
   Worst corrected{"sup error, corrected u0 fixture", 1e-6};
   corrected.see(sup_error(u0_case, Ode2Mode::corrected));
   char buf[128];
   std::snprintf(buf, sizeof buf, "verbatim u0 discrepancy %.3e (reported)", sup_error(u0_case, Ode2Mode::verbatim));
   return summarize({&verbatim, &corrected}, buf);
}

Outcome exponential_identity()
{
   Worst closed{"max ||exp_projection - (I-P+e^-t P)||", 0.0};
   Worst generic{"max ||exp_projection - expm(-tP)||", 1e-12};
   Gen g(1010);
   std::vector<SpectralProjection> ps;
   for (int k = 0; k < 10; ++k)
   {
      const auto m = testing::random_diagonal(g, g.integer(1, 4), g.integer(1, 3), true);
      ps.push_back(spectral_projection(m, partition_sigma_n(m, random_index(g, m)).first));
   }
   for (int k = 0; k < 10; ++k)
   {
      const auto fx = k % 2 == 0 ? testing::random_jordan(g) : testing::random_normal_decaying(g, 2, 2);
      ps.push_back(projection_contour(fx.model, spectral_set_from_points(fx.model, fx.small, true)));
   }
   for (const auto& p : ps)
   {
      const double t = g.uniform(0.0, 5.0);
      const Eigen::Index n = p.matrix.rows();
      const Matrix e = exp_projection(p, t);
      closed.see(residual_norm(e - (Matrix::Identity(n, n) - p.matrix + std::exp(-t) * p.matrix)));
      generic.see(residual_norm(e - expm(-t * p.matrix)));
   }
   return summarize({&closed, &generic}, "20 (P, t) pairs");
}

}  // namespace

int main()
{
   const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"Drazin axioms", axioms},
      {"representation agreement", representations},
      {"Laurent expansion", laurent},
      {"non-uniqueness", nonuniqueness},
      {"perturbation", perturbations},
      {"semigroup integral identity", integral_identity},
      {"decay envelope", decay_envelope},
      {"Q projection", q_projection_check},
      {"ODE oracle equivalence", ode_oracle},
      {"exponential identity", exponential_identity},
   };
   int failures = 0;
   int k = 0;
   for (const auto& [name, run] : criteria)
   {
      ++k;
      Outcome o;
      try
      {
         o = run();
      }
      catch (const std::exception& e)
      {
         o = {false, std::string("error: ") + e.what()};
      }
      failures += o.pass ? 0 : 1;
      std::printf("%s criterion %d: %s: %s\n", o.pass ? "PASS" : "FAIL", k, name, o.detail.c_str());
      std::fflush(stdout);
   }
   return failures;
}
