#include "drazinkit/ode2.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "drazinkit/drazin.hpp"
#include "drazinkit/projector.hpp"
#include "drazinkit/semigroup.hpp"
#include "quadrature.hpp"

namespace drazinkit {

namespace {

constexpr double kSeriesStop = 1e-12;
constexpr double kConvolutionTol = 1e-11;

// sum_{m>=0} s^m t^{m+j} / (m+j)!, the j-th zero-started primitive of e^{st}.
Complex exp_primitive(Complex s, int j, double t)
{
   if (t == 0.0) { return j == 0 ? Complex{1.0, 0.0} : Complex{}; }
   const Complex st = s * t;
   if (std::abs(st) >= static_cast<double>(j))
   {
      // Closed form with the Taylor polynomial removed.
      Complex poly{};
      Complex term{1.0, 0.0};
      for (int m = 0; m < j; ++m)
      {
         poly += term;
         term *= st / static_cast<double>(m + 1);
      }
      return (std::exp(st) - poly) / std::pow(s, j);
   }
   Complex base{1.0, 0.0};
   for (int m = 1; m <= j; ++m) { base *= t / static_cast<double>(m); }
   Complex sum{};
   Complex term = base;
   for (int m = 0; m < 10000; ++m)
   {
      sum += term;
      term *= st / static_cast<double>(m + j + 1);
      if (std::abs(term) <= 1e-18 * std::abs(sum)) { break; }
   }
   return sum;
}

std::vector<Matrix> series_operators(const Matrix& a, const Matrix& p, double sup_f, double horizon, int& terms)
{
   const Matrix a2 = a * a;
   std::vector<Matrix> ops;
   Matrix op = p;
   terms = 0;
   for (int j = 1; j <= kMaxSeriesTerms; ++j)
   {
      ops.push_back(op);
      terms = j;
      const double norm = residual_norm(op);
      if (norm == 0.0 || norm * sup_f * std::pow(horizon, 2 * j) < kSeriesStop) { break; }
      op = a2 * op;
   }
   return ops;
}

double vector_norm(const Vector& v) { return v.norm(); }

}  // namespace

Forcing Forcing::uniform(const ScalarForcing& f, std::size_t dim)
{
   Forcing out;
   out.components.assign(dim, f);
   return out;
}

Forcing Forcing::zero(std::size_t dim) { return uniform(PolyForcing{}, dim); }

Complex primitive(const ScalarForcing& f, int j, double t)
{
   if (j < 0) { throw Error(ErrorKind::invalid_argument, "primitive order must be nonnegative"); }
   if (const auto* poly = std::get_if<PolyForcing>(&f))
   {
      Complex sum{};
      for (std::size_t k = 0; k < poly->coeffs.size(); ++k)
      {
         // c_k t^{k+j} k!/(k+j)!
         Complex term = poly->coeffs[k];
         for (std::size_t m = 0; m < k; ++m) { term *= t; }
         for (int m = 1; m <= j; ++m) { term *= t / static_cast<double>(k + static_cast<std::size_t>(m)); }
         sum += term;
      }
      return sum;
   }
   const auto& trig = std::get<TrigForcing>(f);
   if (trig.omega == 0.0)
   {
      return primitive(PolyForcing{{trig.amp * std::cos(trig.phase)}}, j, t);
   }
   // a cos(w t + phi) = a/2 (e^{i phi} e^{i w t} + e^{-i phi} e^{-i w t})
   const Complex iw{0.0, trig.omega};
   const Complex plus = std::exp(Complex{0.0, trig.phase}) * exp_primitive(iw, j, t);
   const Complex minus = std::exp(Complex{0.0, -trig.phase}) * exp_primitive(-iw, j, t);
   return 0.5 * trig.amp * (plus + minus);
}

Vector primitive(const Forcing& f, int j, double t)
{
   Vector out(static_cast<Eigen::Index>(f.dimension()));
   for (std::size_t k = 0; k < f.dimension(); ++k) { out(static_cast<Eigen::Index>(k)) = primitive(f.components[k], j, t); }
   return out;
}

Vector Forcing::value(double t) const { return primitive(*this, 0, t); }

double Forcing::sup_bound(double horizon) const
{
   double sq = 0.0;
   for (const auto& c : components)
   {
      double b = 0.0;
      if (const auto* poly = std::get_if<PolyForcing>(&c))
      {
         for (std::size_t k = 0; k < poly->coeffs.size(); ++k)
         {
            b += std::abs(poly->coeffs[k]) * std::pow(horizon, static_cast<double>(k));
         }
      }
      else { b = std::abs(std::get<TrigForcing>(c).amp); }
      sq += b * b;
   }
   return std::sqrt(sq);
}

namespace {

Compatibility compatibility_of(const Ode2Problem& problem, const Matrix& a, const Matrix& p)
{
   int terms = 0;
   const auto ops = series_operators(a, p, problem.forcing.sup_bound(problem.horizon), problem.horizon, terms);
   const Eigen::Index n = a.rows();
   Vector pos = Vector::Zero(n);
   Vector vel = Vector::Zero(n);
   for (int j = 1; j <= terms; ++j)
   {
      pos += ops[static_cast<std::size_t>(j - 1)] * primitive(problem.forcing, 2 * j, 0.0);
      vel += ops[static_cast<std::size_t>(j - 1)] * primitive(problem.forcing, 2 * j - 1, 0.0);
   }
   return {vector_norm(pos - p * problem.u0), vector_norm(vel - p * problem.v0)};
}

}  // namespace

Compatibility compatibility_check(const Ode2Problem& problem)
{
   const Matrix a = materialize(problem.model);
   const Matrix p = spectral_projection(problem.model, problem.sigma).matrix;
   return compatibility_of(problem, a, p);
}

Ode2Solver::Ode2Solver(Ode2Problem problem) : problem_(std::move(problem))
{
   const std::size_t n = problem_.model.dimension();
   if (static_cast<std::size_t>(problem_.u0.size()) != n || static_cast<std::size_t>(problem_.v0.size()) != n ||
       problem_.forcing.dimension() != n)
   {
      throw Error(ErrorKind::invalid_argument, "initial data and forcing must match the model dimension");
   }
   if (!(problem_.horizon > 0.0)) { throw Error(ErrorKind::horizon, "horizon must be positive"); }
   const double r = problem_.sigma.radius_r;
   if (!(r * problem_.horizon < 1.0))
   {
      std::ostringstream msg;
      msg << "r * horizon = " << r * problem_.horizon << " leaves the series convergence regime (needs < 1)";
      throw Error(ErrorKind::horizon, msg.str());
   }
   limit_ = r > 0.0 ? std::min(problem_.horizon, 1.0 / r) : problem_.horizon;

   a_ = materialize(problem_.model);
   p_ = spectral_projection(problem_.model, problem_.sigma).matrix;
   b_ = drazin_algebraic(problem_.model, problem_.sigma, admissible_shift(problem_.sigma)).b_matrix;
   complement_ = Matrix::Identity(a_.rows(), a_.cols()) - p_;

   const double sup_f = problem_.forcing.sup_bound(problem_.horizon);
   series_ops_ = series_operators(a_, p_, sup_f, problem_.horizon, series_terms_);
   const double rd2 = (r * problem_.horizon) * (r * problem_.horizon);
   if (residual_norm(series_ops_.back()) == 0.0 || sup_f == 0.0) { tail_bound_ = 0.0; }
   else
   {
      tail_bound_ = sup_f * problem_.horizon * problem_.horizon * std::pow(rd2, series_terms_) / (1.0 - rd2);
   }
   compat_ = compatibility_of(problem_, a_, p_);
}

Matrix Ode2Solver::group(double t) const { return evolve(problem_.model, t); }

Vector Ode2Solver::convolution(double t) const
{
   const Vector zero = Vector::Zero(a_.rows());
   if (t == 0.0) { return zero; }
   const Matrix kernel_left = 0.5 * b_;
   const auto integrand = [&](double s) {
      const Vector fs = complement_ * problem_.forcing.value(s);
      return Vector(kernel_left * ((group(t - s) - group(s - t)) * fs));
   };
   const double scale = std::max(1.0, problem_.forcing.sup_bound(problem_.horizon));
   return detail::gauss_panels<Vector>(integrand, 0.0, t, kConvolutionTol * scale).value;
}

Vector Ode2Solver::solve(double t, Ode2Mode mode) const
{
   if (!(t >= 0.0) || t > limit_ * (1.0 + 1e-12))
   {
      std::ostringstream msg;
      msg << "t=" << t << " outside the validity interval [0, " << limit_ << "]";
      throw Error(ErrorKind::horizon, msg.str());
   }
   const Compatibility& c = compat_;
   if (c.pos_residual > kCompatibilityTol || c.vel_residual > kCompatibilityTol)
   {
      std::ostringstream msg;
      msg << "P u0 and P v0 must match the series at 0: residuals " << c.pos_residual << ", " << c.vel_residual;
      throw Error(ErrorKind::incompatible_initial_data, msg.str());
   }

   Vector x = Vector::Zero(a_.rows());
   for (int j = 1; j <= series_terms_; ++j)
   {
      x += series_ops_[static_cast<std::size_t>(j - 1)] * primitive(problem_.forcing, 2 * j, t);
   }

   const Matrix vp = group(t);
   const Matrix vm = group(-t);
   const Matrix sinh_part = 0.5 * (vp - vm);
   const Matrix u_factor = mode == Ode2Mode::verbatim ? sinh_part : Matrix(0.5 * (vp + vm));
   x += u_factor * (complement_ * problem_.u0);
   x += b_ * (sinh_part * (complement_ * problem_.v0));
   x += convolution(t);
   return x;
}

Vector series_solution(const Ode2Problem& problem, double t, Ode2Mode mode)
{
   return Ode2Solver(problem).solve(t, mode);
}

std::vector<Vector> reference_integrate(const Ode2Problem& problem, const std::vector<double>& t_grid)
{
   const Matrix a = materialize(problem.model);
   const Eigen::Index n = a.rows();
   if (problem.u0.size() != n || problem.v0.size() != n ||
       problem.forcing.dimension() != static_cast<std::size_t>(n))
   {
      throw Error(ErrorKind::invalid_argument, "initial data and forcing must match the model dimension");
   }
   const Matrix a2 = a * a;

   double scale = std::max(1.0, std::sqrt(residual_norm(a2)));
   for (const auto& c : problem.forcing.components)
   {
      if (const auto* trig = std::get_if<TrigForcing>(&c)) { scale = std::max(scale, std::abs(trig->omega)); }
   }
   // h^4 scale^4 <= 1e-10
   const double h_target = std::pow(1e-10, 0.25) / scale;

   const auto rhs = [&](double t, const Vector& x, const Vector& v, Vector& dx, Vector& dv) {
      dx = v;
      dv = a2 * x + problem.forcing.value(t);
   };

   std::vector<Vector> out;
   out.reserve(t_grid.size());
   Vector x = problem.u0;
   Vector v = problem.v0;
   double t = 0.0;
   for (double target : t_grid)
   {
      if (target < t || target < 0.0)
      {
         throw Error(ErrorKind::invalid_argument, "time grid must be nondecreasing and start at or after 0");
      }
      const double span = target - t;
      const double steps_d = std::ceil(span / h_target);
      if (steps_d > 1e8) { throw Error(ErrorKind::oracle_failure, "reference integrator needs too many steps"); }
      const long steps = static_cast<long>(steps_d);
      if (steps > 0)
      {
         const double h = span / static_cast<double>(steps);
         if (!(h > 1e-14 * std::max(1.0, target)))
         {
            throw Error(ErrorKind::oracle_failure, "reference integrator step underflow");
         }
         Vector k1x, k1v, k2x, k2v, k3x, k3v, k4x, k4v;
         for (long s = 0; s < steps; ++s)
         {
            const double t0 = t + static_cast<double>(s) * h;
            rhs(t0, x, v, k1x, k1v);
            rhs(t0 + 0.5 * h, x + 0.5 * h * k1x, v + 0.5 * h * k1v, k2x, k2v);
            rhs(t0 + 0.5 * h, x + 0.5 * h * k2x, v + 0.5 * h * k2v, k3x, k3v);
            rhs(t0 + h, x + h * k3x, v + h * k3v, k4x, k4v);
            x += (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
            v += (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
         }
      }
      t = target;
      out.push_back(x);
   }
   return out;
}

}  // namespace drazinkit
