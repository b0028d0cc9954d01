#include "drazinkit/projector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>

namespace drazinkit {

namespace {

constexpr int kInitialNodes = 32;
constexpr int kMaxNodes = 4096;
constexpr double kIdempotencyStop = 1e-10;
constexpr double kMatchTol = 1e-6;

double min_distance(Complex c, const std::vector<Complex>& pts)
{
   double d = std::numeric_limits<double>::infinity();
   for (const Complex& z : pts) { d = std::min(d, std::abs(c - z)); }
   return d;
}

// Cascade summation: partial sums of equal size are merged, which gives
// the pairwise tree for power-of-two counts in a fixed order.
class PairwiseSum {
public:
   void add(Matrix m)
   {
      int level = 0;
      while (level < static_cast<int>(stack_.size()) && stack_[level])
      {
         m += *stack_[level];
         stack_[level].reset();
         ++level;
      }
      if (level == static_cast<int>(stack_.size())) { stack_.emplace_back(); }
      stack_[level] = std::move(m);
   }

   Matrix total(Eigen::Index rows, Eigen::Index cols) const
   {
      Matrix out = Matrix::Zero(rows, cols);
      for (const auto& s : stack_)
      {
         if (s) { out += *s; }
      }
      return out;
   }

private:
   std::vector<std::optional<Matrix>> stack_;
};

}  // namespace

int OrientedContour::winding_number(Complex z) const
{
   int w = 0;
   for (const auto& c : circles)
   {
      if (std::abs(z - c.center) <= c.radius) { w += c.orientation; }
   }
   return w;
}

double OrientedContour::distance_to(Complex z) const
{
   double d = std::numeric_limits<double>::infinity();
   for (const auto& c : circles) { d = std::min(d, std::abs(std::abs(z - c.center) - c.radius)); }
   return d;
}

OrientedContour enclosing_contour(const OperatorModel& model, const SpectralSet& sigma)
{
   const auto eig = eigensolve(model);
   std::vector<Complex> inside;
   std::vector<Complex> outside;
   for (const Complex& z : eig)
   {
      (matches_point(sigma, z, kMatchTol) ? inside : outside).push_back(z);
   }
   const auto centers = sigma.values();

   double r_in = 0.0;
   for (const Complex& z : centers) { r_in = std::max(r_in, std::abs(z)); }
   for (const Complex& z : inside) { r_in = std::max(r_in, std::abs(z)); }
   double r_out = std::numeric_limits<double>::infinity();
   for (const Complex& z : outside) { r_out = std::min(r_out, std::abs(z)); }

   OrientedContour contour;
   if (sigma.contains_zero && r_in < r_out)
   {
      const double radius = outside.empty() ? r_in + 0.5 : 0.5 * (r_in + r_out);
      contour.circles.push_back({Complex{}, radius, 1});
      return contour;
   }
   for (std::size_t k = 0; k < centers.size(); ++k)
   {
      std::vector<Complex> others = outside;
      for (std::size_t j = 0; j < centers.size(); ++j)
      {
         if (j != k) { others.push_back(centers[j]); }
      }
      const double d = min_distance(centers[k], others);
      contour.circles.push_back({centers[k], std::isfinite(d) ? 0.5 * d : 0.5, 1});
   }
   return contour;
}

OrientedContour cluster_contour(const OperatorModel& model, const SpectralSet& sigma_prime)
{
   std::vector<Complex> others{Complex{}};
   for (const Complex& z : eigensolve(model))
   {
      if (!matches_point(sigma_prime, z, kMatchTol)) { others.push_back(z); }
   }
   const auto centers = sigma_prime.values();
   OrientedContour contour;
   for (std::size_t k = 0; k < centers.size(); ++k)
   {
      std::vector<Complex> blockers = others;
      for (std::size_t j = 0; j < centers.size(); ++j)
      {
         if (j != k) { blockers.push_back(centers[j]); }
      }
      contour.circles.push_back({centers[k], 0.5 * min_distance(centers[k], blockers), 1});
   }
   return contour;
}

void check_contour_clear(const OrientedContour& contour, const std::vector<Complex>& eigenvalues,
                         const std::vector<Complex>& extra_points)
{
   if (contour.circles.empty()) { throw Error(ErrorKind::invalid_contour, "contour has no circles"); }
   for (const auto& c : contour.circles)
   {
      if (!(c.radius > 0.0) || !std::isfinite(c.radius))
      {
         throw Error(ErrorKind::invalid_contour, "circle radius must be positive and finite");
      }
      if (c.orientation != 1 && c.orientation != -1)
      {
         throw Error(ErrorKind::invalid_contour, "orientation must be +1 or -1");
      }
   }
   auto check = [&](Complex z, const char* what) {
      if (contour.distance_to(z) <= kSpectrumGuard)
      {
         std::ostringstream msg;
         msg << "contour passes through " << what << " " << z;
         throw Error(ErrorKind::invalid_contour, msg.str());
      }
   };
   for (const Complex& z : eigenvalues) { check(z, "eigenvalue"); }
   for (const Complex& z : extra_points) { check(z, "point"); }
}

Matrix contour_integral(const OrientedContour& contour, const ContourIntegrand& f, int nodes)
{
   PairwiseSum sum;
   Eigen::Index rows = 0;
   Eigen::Index cols = 0;
   for (const auto& c : contour.circles)
   {
      for (int k = 0; k < nodes; ++k)
      {
         const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(nodes);
         const Complex offset = std::polar(c.radius, theta);
         // d lambda / (2 pi i) = offset d theta / (2 pi)
         const Complex weight = static_cast<double>(c.orientation) * offset / static_cast<double>(nodes);
         Matrix term = f(c.center + offset);
         rows = term.rows();
         cols = term.cols();
         sum.add(weight * term);
      }
   }
   return sum.total(rows, cols);
}

SpectralProjection certify_projection(const Matrix& p, const Matrix& a, int nodes_used)
{
   SpectralProjection out;
   out.matrix = p;
   out.idem_residual = residual_norm(p * p - p);
   out.commute_residual = residual_norm(a * p - p * a);
   out.nodes_used = nodes_used;
   out.certified = out.idem_residual <= kProjectionCertifyTol && out.commute_residual <= kProjectionCertifyTol;
   return out;
}

SpectralProjection projection_contour(const OperatorModel& model, const SpectralSet& sigma)
{
   if (!(sigma.separation_gap > 0.0))
   {
      throw Error(ErrorKind::non_separable, "spectral set has no separation gap");
   }
   const ResolventSolver solver(model);
   const OrientedContour contour = enclosing_contour(model, sigma);
   check_contour_clear(contour, solver.eigenvalues());

   Matrix p;
   double idem = std::numeric_limits<double>::infinity();
   int nodes = kInitialNodes;
   for (;; nodes *= 2)
   {
      p = contour_integral(contour, [&](Complex z) { return solver.resolvent(z); }, nodes);
      idem = residual_norm(p * p - p);
      if (idem < kIdempotencyStop || nodes >= kMaxNodes) { break; }
   }
   // Quadrature leaves an idempotency defect near the stopping tolerance.
   // P <- 3P^2 - 2P^3 converges quadratically to the nearby idempotent and,
   // being a polynomial in P, keeps the commutation with A.
   for (int k = 0; k < 3; ++k)
   {
      const Matrix p2 = p * p;
      const Matrix next = 3.0 * p2 - 2.0 * p2 * p;
      const double next_idem = residual_norm(next * next - next);
      if (!(next_idem < idem)) { break; }
      p = next;
      idem = next_idem;
   }
   SpectralProjection out = certify_projection(p, solver.matrix(), nodes);
   if (!out.certified)
   {
      std::ostringstream msg;
      msg << "projection not certified after " << nodes << " nodes per circle: idempotency residual "
          << out.idem_residual << ", commutator " << out.commute_residual;
      throw Error(ErrorKind::quadrature_failure, msg.str());
   }
   return out;
}

SpectralProjection projection_exact_diagonal(const OperatorModel& model, const SpectralSet& sigma)
{
   if (!model.is_structured())
   {
      throw Error(ErrorKind::not_structured, "exact projection needs a diagonal model");
   }
   const auto d = model.diagonal_entries();
   const OrientedContour contour = enclosing_contour(model, sigma);
   const Eigen::Index n = static_cast<Eigen::Index>(d.size());
   Matrix p = Matrix::Zero(n, n);
   for (Eigen::Index k = 0; k < n; ++k)
   {
      const Complex z = d[static_cast<std::size_t>(k)];
      if (contour.distance_to(z) <= kSpectrumGuard)
      {
         std::ostringstream msg;
         msg << "eigenvalue " << z << " sits on the boundary of the spectral set";
         throw Error(ErrorKind::ambiguous_membership, msg.str());
      }
      if (contour.winding_number(z) != 0) { p(k, k) = 1.0; }
   }
   return certify_projection(p, materialize(model), 0);
}

SpectralProjection spectral_projection(const OperatorModel& model, const SpectralSet& sigma)
{
   return model.is_structured() ? projection_exact_diagonal(model, sigma) : projection_contour(model, sigma);
}

SpectralProjection declared_riesz_projection(const OperatorModel& model)
{
   const Reduction red = declared_reduction(model);
   const Eigen::Index n = static_cast<Eigen::Index>(model.dimension());
   Matrix p = Matrix::Zero(n, n);
   for (std::size_t k : red.n_indices) { p(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = 1.0; }
   return certify_projection(p, materialize(model), 0);
}

}  // namespace drazinkit
