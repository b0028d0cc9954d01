#include "drazinkit/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace drazinkit {

std::string_view to_string(ErrorKind kind)
{
   switch (kind)
   {
      case ErrorKind::parse: return "parse";
      case ErrorKind::io: return "io";
      case ErrorKind::invalid_argument: return "invalid-argument";
      case ErrorKind::invalid_model: return "invalid-model";
      case ErrorKind::model_too_large: return "model-too-large";
      case ErrorKind::not_structured: return "not-structured";
      case ErrorKind::near_singular: return "near-singular";
      case ErrorKind::numeric_failure: return "numeric-failure";
      case ErrorKind::insufficient_riesz_points: return "insufficient-riesz-points";
      case ErrorKind::non_separable: return "non-separable";
      case ErrorKind::quadrature_failure: return "quadrature-failure";
      case ErrorKind::ambiguous_membership: return "ambiguous-membership";
      case ErrorKind::inadmissible_shift: return "inadmissible-shift";
      case ErrorKind::shift_singular: return "shift-singular";
      case ErrorKind::invalid_contour: return "invalid-contour";
      case ErrorKind::annulus_violation: return "annulus-violation";
      case ErrorKind::ordering: return "ordering";
      case ErrorKind::commutation: return "commutation";
      case ErrorKind::no_eligible_sigma: return "no-eligible-sigma";
      case ErrorKind::horizon_too_large: return "horizon-too-large";
      case ErrorKind::certification: return "certification";
      case ErrorKind::no_decay: return "no-decay";
      case ErrorKind::theta_too_large: return "theta-too-large";
      case ErrorKind::unsupported_forcing: return "unsupported-forcing";
      case ErrorKind::horizon: return "horizon";
      case ErrorKind::incompatible_initial_data: return "incompatible-initial-data";
      case ErrorKind::oracle_failure: return "oracle-failure";
   }
   return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
   : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind)
{
}

double operator_norm(const Matrix& m, double tol, int max_iter)
{
   if (m.size() == 0) { return 0.0; }
   const double scale = m.cwiseAbs().maxCoeff();
   if (scale == 0.0) { return 0.0; }

   // Work on a rescaled copy so tiny residual matrices do not underflow.
   const Matrix a = m / scale;
   const Matrix gram = a.adjoint() * a;

   // Deterministic start with every coordinate populated.
   Vector x(a.cols());
   for (Eigen::Index k = 0; k < x.size(); ++k)
   {
      const double s = static_cast<double>(k + 1);
      x(k) = Complex(1.0 + 0.1 * s, 0.37 * std::sin(s));
   }
   x.normalize();

   double estimate = 0.0;
   for (int it = 0; it < max_iter; ++it)
   {
      Vector y = gram * x;
      const double ny = y.norm();
      if (ny == 0.0) { return 0.0; }
      const double next = std::sqrt(std::abs(x.dot(y)));
      x = y / ny;
      if (it > 0 && std::abs(next - estimate) <= tol * next)
      {
         estimate = next;
         break;
      }
      estimate = next;
   }
   // One last Rayleigh quotient on the converged vector.
   estimate = std::max(estimate, (a * x).norm());
   return estimate * scale;
}

double spectral_radius(const Matrix& m)
{
   if (m.size() == 0) { return 0.0; }
   Eigen::ComplexEigenSolver<Matrix> es(m, false);
   if (es.info() != Eigen::Success)
   {
      throw Error(ErrorKind::numeric_failure, "eigenvalue iteration did not converge");
   }
   return es.eigenvalues().cwiseAbs().maxCoeff();
}

double hausdorff(const std::vector<Complex>& a, const std::vector<Complex>& b)
{
   if (a.empty() && b.empty()) { return 0.0; }
   if (a.empty() || b.empty()) { return std::numeric_limits<double>::infinity(); }
   auto directed = [](const std::vector<Complex>& from, const std::vector<Complex>& to) {
      double worst = 0.0;
      for (const Complex& z : from)
      {
         double best = std::numeric_limits<double>::infinity();
         for (const Complex& w : to) { best = std::min(best, std::abs(z - w)); }
         worst = std::max(worst, best);
      }
      return worst;
   };
   return std::max(directed(a, b), directed(b, a));
}

}  // namespace drazinkit
