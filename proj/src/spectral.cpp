#include "drazinkit/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace drazinkit {

namespace {

constexpr double kMatchTol = 1e-6;

bool close(Complex a, Complex b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

double max_modulus(const std::vector<Complex>& v)
{
   double m = 0.0;
   for (const Complex& z : v) { m = std::max(m, std::abs(z)); }
   return m;
}

double min_modulus(const std::vector<Complex>& v)
{
   double m = std::numeric_limits<double>::infinity();
   for (const Complex& z : v) { m = std::min(m, std::abs(z)); }
   return m;
}

// Half the radial gap between a disc-shaped set of radius r and the
// complement. 1/2 when nothing lies outside.
double radial_gap(double r, const std::vector<Complex>& outside)
{
   if (outside.empty()) { return 0.5; }
   return (min_modulus(outside) - r) / 2.0;
}

}  // namespace

std::vector<Complex> SpectralSet::values() const
{
   std::vector<Complex> out;
   out.reserve(points.size());
   for (const auto& p : points) { out.push_back(p.value); }
   return out;
}

std::vector<Complex> SpectralSet::realized_values() const
{
   std::vector<Complex> out;
   for (const auto& p : points)
   {
      if (p.multiplicity > 0) { out.push_back(p.value); }
   }
   return out;
}

std::size_t SpectralSet::total_multiplicity() const
{
   std::size_t m = 0;
   for (const auto& p : points) { m += p.multiplicity; }
   return m;
}

std::vector<Complex> eigensolve(const Matrix& m)
{
   const Eigen::Index n = m.rows();
   bool upper = true;
   for (Eigen::Index j = 0; j < n && upper; ++j)
   {
      for (Eigen::Index i = j + 1; i < n; ++i)
      {
         if (m(i, j) != Complex{})
         {
            upper = false;
            break;
         }
      }
   }
   std::vector<Complex> out(static_cast<std::size_t>(n));
   if (upper)
   {
      for (Eigen::Index k = 0; k < n; ++k) { out[static_cast<std::size_t>(k)] = m(k, k); }
      return out;
   }
   Eigen::ComplexEigenSolver<Matrix> es;
   es.compute(m, false);
   if (es.info() != Eigen::Success)
   {
      std::ostringstream msg;
      msg << "QR iteration did not converge within " << es.getMaxIterations() << " iterations per eigenvalue ("
          << n << "x" << n << ")";
      throw Error(ErrorKind::numeric_failure, msg.str());
   }
   for (Eigen::Index k = 0; k < n; ++k) { out[static_cast<std::size_t>(k)] = es.eigenvalues()(k); }
   return out;
}

std::vector<Complex> eigensolve(const OperatorModel& model)
{
   if (model.is_structured()) { return model.diagonal_entries(); }
   return eigensolve(materialize(model));
}

std::vector<SpectralPoint> group_multiplicities(const std::vector<Complex>& values, double tol)
{
   std::vector<SpectralPoint> out;
   for (const Complex& z : values)
   {
      auto it = std::find_if(out.begin(), out.end(), [&](const SpectralPoint& p) { return close(z, p.value, tol); });
      if (it == out.end()) { out.push_back({z, 1}); }
      else { ++it->multiplicity; }
   }
   return out;
}

bool matches_point(const SpectralSet& sigma, Complex z, double tol)
{
   return std::any_of(sigma.points.begin(), sigma.points.end(),
                      [&](const SpectralPoint& p) { return close(z, p.value, tol); });
}

std::pair<SpectralSet, SpectralSet> partition_sigma_n(const OperatorModel& model, std::size_t n)
{
   const auto seq = riesz_sequence(model);
   if (n >= seq.size())
   {
      throw Error(ErrorKind::insufficient_riesz_points, "sigma_" + std::to_string(n) + " needs at least " +
                                                            std::to_string(n + 1) + " Riesz points, model declares " +
                                                            std::to_string(seq.size()));
   }
   const auto inv = invertible_part(model);

   std::vector<Complex> inner(seq.begin() + static_cast<std::ptrdiff_t>(n), seq.end());
   std::vector<Complex> outer(seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(n));
   outer.insert(outer.end(), inv.begin(), inv.end());

   SpectralSet sigma;
   sigma.contains_zero = true;
   sigma.points.push_back({Complex{}, riesz_zero_count(model)});
   for (const auto& p : group_multiplicities(inner, 0.0)) { sigma.points.push_back(p); }
   sigma.radius_r = std::abs(seq[n]);
   sigma.separation_gap = radial_gap(sigma.radius_r, outer);
   if (!(sigma.separation_gap > 0.0))
   {
      std::ostringstream msg;
      msg << "sigma_" << n << " (radius " << sigma.radius_r
          << ") is not separated from the rest of the spectrum by a circle about 0";
      throw Error(ErrorKind::non_separable, msg.str());
   }

   SpectralSet rest;
   rest.contains_zero = false;
   rest.points = group_multiplicities(outer, 0.0);
   rest.radius_r = max_modulus(outer);
   rest.separation_gap = sigma.separation_gap;
   return {sigma, rest};
}

SpectralSet spectral_set_from_points(const OperatorModel& model, const std::vector<Complex>& points,
                                     bool contains_zero)
{
   const auto eig = eigensolve(model);
   std::vector<Complex> centers;
   if (contains_zero) { centers.push_back(Complex{}); }
   for (const Complex& p : points)
   {
      if (std::none_of(centers.begin(), centers.end(), [&](Complex c) { return close(p, c, kMatchTol); }))
      {
         centers.push_back(p);
      }
   }

   SpectralSet sigma;
   sigma.contains_zero = contains_zero;
   for (const Complex& c : centers) { sigma.points.push_back({c, 0}); }

   std::vector<Complex> inside;
   std::vector<Complex> outside;
   for (const Complex& z : eig)
   {
      auto it = std::find_if(sigma.points.begin(), sigma.points.end(),
                             [&](const SpectralPoint& p) { return close(z, p.value, kMatchTol); });
      if (it == sigma.points.end()) { outside.push_back(z); }
      else
      {
         ++it->multiplicity;
         inside.push_back(z);
      }
   }
   sigma.radius_r = std::max(max_modulus(centers), max_modulus(inside));

   if (contains_zero && (outside.empty() || sigma.radius_r < min_modulus(outside)))
   {
      sigma.separation_gap = radial_gap(sigma.radius_r, outside);
   }
   else if (outside.empty()) { sigma.separation_gap = 0.5; }
   else
   {
      double d = std::numeric_limits<double>::infinity();
      for (const Complex& c : centers)
      {
         for (const Complex& z : outside) { d = std::min(d, std::abs(c - z)); }
      }
      sigma.separation_gap = d / 2.0;
   }
   return sigma;
}

SpectralSet zero_cluster(const OperatorModel& model)
{
   const auto seq = riesz_sequence(model);
   const auto inv = invertible_part(model);
   SpectralSet sigma;
   sigma.contains_zero = true;
   sigma.points.push_back({Complex{}, riesz_zero_count(model)});
   for (const auto& p : group_multiplicities(seq, 0.0)) { sigma.points.push_back(p); }
   sigma.radius_r = max_modulus(seq);
   sigma.separation_gap = radial_gap(sigma.radius_r, inv);
   if (!(sigma.separation_gap > 0.0))
   {
      throw Error(ErrorKind::non_separable, "declared Riesz part is not separated from the invertible part");
   }
   return sigma;
}

SpectralSet complement_set(const OperatorModel& model, const SpectralSet& sigma)
{
   std::vector<Complex> outside;
   for (const Complex& z : eigensolve(model))
   {
      if (!matches_point(sigma, z, kMatchTol)) { outside.push_back(z); }
   }
   SpectralSet rest;
   rest.contains_zero = false;
   rest.points = group_multiplicities(outside, kMatchTol);
   rest.radius_r = max_modulus(outside);
   rest.separation_gap = sigma.separation_gap;
   return rest;
}

BrowderDiagnostic acc_browder_diagnostic(const OperatorModel& model, double disc_radius)
{
   if (!(disc_radius > 0.0)) { throw Error(ErrorKind::invalid_argument, "disc radius must be positive"); }
   const auto inv = invertible_part(model);
   const auto seq = riesz_sequence(model);

   BrowderDiagnostic out;
   out.isolated_at_zero = std::none_of(inv.begin(), inv.end(), [&](Complex z) {
      const double m = std::abs(z);
      return m > 0.0 && m < disc_radius;
   });

   std::vector<Complex> inside;
   std::vector<Complex> rest = inv;
   for (const Complex& z : seq)
   {
      if (std::abs(z) <= disc_radius) { inside.push_back(z); }
      else { rest.push_back(z); }
   }
   SpectralSet& w = out.witness;
   w.contains_zero = true;
   w.points.push_back({Complex{}, riesz_zero_count(model)});
   for (const auto& p : group_multiplicities(inside, 0.0)) { w.points.push_back(p); }
   w.radius_r = max_modulus(inside);
   w.separation_gap = std::max(0.0, radial_gap(w.radius_r, rest));
   return out;
}

}  // namespace drazinkit
