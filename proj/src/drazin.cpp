#include "drazinkit/drazin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace drazinkit {

namespace {

constexpr double kMatchTol = 1e-6;
constexpr double kShiftRcondFloor = 1e-14;
constexpr double kCommuteTol = 1e-12;
constexpr double kLaurentTermStop = 1e-14;
constexpr int kContourStart = 32;
constexpr int kContourCap = 4096;

void push_unique(std::vector<Complex>& v, Complex z)
{
   if (std::none_of(v.begin(), v.end(), [&](Complex w) { return w == z; })) { v.push_back(z); }
}

struct ShiftedSolve {
   Matrix b;
   double rcond = 0.0;
};

ShiftedSolve shifted_solve(const Matrix& a, const Matrix& p, Complex xi)
{
   const Eigen::Index n = a.rows();
   const Eigen::PartialPivLU<Matrix> lu(a - xi * p);
   ShiftedSolve out;
   out.rcond = n == 0 ? 1.0 : lu.rcond();
   if (!(out.rcond > kShiftRcondFloor))
   {
      std::ostringstream msg;
      msg << "A - xi P is numerically singular for xi=" << xi << " (rcond " << out.rcond << ")";
      throw Error(ErrorKind::shift_singular, msg.str());
   }
   out.b = lu.solve(Matrix::Identity(n, n) - p);
   return out;
}

DrazinCertificate certify_with(const OperatorModel& model, const Matrix& a, const SpectralSet& sigma,
                               const Matrix& b, Complex xi, const Matrix* projection)
{
   const Eigen::Index n = a.rows();
   const Matrix id = Matrix::Identity(n, n);
   DrazinCertificate cert;
   cert.b_matrix = b;
   cert.xi_used = xi;
   cert.bab_residual = residual_norm(b * a * b - b);
   cert.commute_residual = residual_norm(a * b - b * a);
   const Matrix residue = id - a * b;
   cert.residue_spectrum = eigensolve(Matrix(a * residue));
   cert.sigma_match = hausdorff(cert.residue_spectrum, expected_residue_set(model, sigma));
   if (projection != nullptr) { cert.projection_residual = residual_norm(residue - *projection); }
   return cert;
}

// Largest-modulus eigenvalue first, ties by argument.
void sort_by_modulus(std::vector<Complex>& v)
{
   std::stable_sort(v.begin(), v.end(), [](Complex a, Complex b) {
      if (std::abs(a) != std::abs(b)) { return std::abs(a) > std::abs(b); }
      return std::arg(a) < std::arg(b);
   });
}

// Adds R coordinate by coordinate to a structured model, keeping its
// Riesz/invertible split.
OperatorModel perturb_structured(const OperatorModel& a, const std::vector<Complex>& r, std::size_t& offset)
{
   if (a.kind() == ModelKind::direct_sum)
   {
      std::vector<OperatorModel> parts;
      for (const auto& s : a.summands()) { parts.push_back(perturb_structured(s, r, offset)); }
      return OperatorModel::direct_sum(std::move(parts));
   }
   std::vector<Complex> riesz = a.riesz_eigenvalues();
   std::vector<Complex> inv = a.invertible_eigenvalues();
   for (auto& z : riesz) { z += r[offset++]; }
   for (auto& z : inv)
   {
      z += r[offset++];
      if (z == Complex{})
      {
         throw Error(ErrorKind::no_eligible_sigma, "perturbation moves an invertible-part eigenvalue to 0");
      }
   }
   return OperatorModel::diagonal(std::move(riesz), std::move(inv));
}

SpectralSet choose_structured_sigma(const OperatorModel& model, double sigma_radius)
{
   const auto seq = riesz_sequence(model);
   const auto inv = invertible_part(model);
   double inv_min = std::numeric_limits<double>::infinity();
   for (const Complex& z : inv) { inv_min = std::min(inv_min, std::abs(z)); }

   for (std::size_t m = 0; m <= seq.size(); ++m)
   {
      const double r = m < seq.size() ? std::abs(seq[m]) : 0.0;
      double outer = inv_min;
      if (m > 0) { outer = std::min(outer, std::abs(seq[m - 1])); }
      if (!(r < sigma_radius && r < outer)) { continue; }

      SpectralSet sigma;
      sigma.contains_zero = true;
      sigma.points.push_back({Complex{}, riesz_zero_count(model)});
      std::vector<Complex> inner(seq.begin() + static_cast<std::ptrdiff_t>(m), seq.end());
      for (const auto& p : group_multiplicities(inner, 0.0)) { sigma.points.push_back(p); }
      sigma.radius_r = r;
      sigma.separation_gap = std::isfinite(outer) ? 0.5 * (outer - r) : 0.5;
      return sigma;
   }
   throw Error(ErrorKind::no_eligible_sigma, "no spectral set about 0 with radius below " +
                                                 std::to_string(sigma_radius) + " is separated from the rest");
}

SpectralSet choose_dense_sigma(const OperatorModel& model, double sigma_radius)
{
   auto eig = eigensolve(model);
   sort_by_modulus(eig);
   // Cut the spectrum between the last modulus at or above the radius and
   // everything below it.
   std::vector<Complex> inner;
   double outer = std::numeric_limits<double>::infinity();
   for (const Complex& z : eig)
   {
      if (std::abs(z) < sigma_radius) { inner.push_back(z); }
      else { outer = std::min(outer, std::abs(z)); }
   }
   double r = 0.0;
   for (const Complex& z : inner) { r = std::max(r, std::abs(z)); }
   if (!(r < outer * (1.0 - kMatchTol)))
   {
      throw Error(ErrorKind::no_eligible_sigma, "spectrum inside the radius is not separated from the rest");
   }
   return spectral_set_from_points(model, inner, true);
}

}  // namespace

Complex admissible_shift(const SpectralSet& sigma)
{
   return 2.0 * sigma.radius_r < 1.0 ? Complex{-1.0, 0.0} : Complex{-(2.0 * sigma.radius_r + 1.0), 0.0};
}

std::vector<Complex> expected_residue_set(const OperatorModel& model, const SpectralSet& sigma)
{
   std::vector<Complex> out;
   for (const Complex& z : sigma.realized_values()) { push_unique(out, z); }
   if (sigma.contains_zero && sigma.total_multiplicity() < model.dimension()) { push_unique(out, Complex{}); }
   return out;
}

DrazinCertificate certify_inverse(const OperatorModel& model, const SpectralSet& sigma, const Matrix& b, Complex xi)
{
   return certify_with(model, materialize(model), sigma, b, xi, nullptr);
}

DrazinCertificate drazin_algebraic(const OperatorModel& model, const SpectralSet& sigma, Complex xi)
{
   if (!sigma.contains_zero)
   {
      throw Error(ErrorKind::invalid_argument, "Drazin inverse needs a spectral set containing 0");
   }
   if (!(std::abs(xi) > 2.0 * sigma.radius_r))
   {
      std::ostringstream msg;
      msg << "|xi|=" << std::abs(xi) << " must exceed 2r=" << 2.0 * sigma.radius_r;
      throw Error(ErrorKind::inadmissible_shift, msg.str());
   }
   const Matrix a = materialize(model);
   const SpectralProjection p = spectral_projection(model, sigma);
   const ShiftedSolve first = shifted_solve(a, p.matrix, xi);
   DrazinCertificate cert = certify_with(model, a, sigma, first.b, xi, &p.matrix);

   const ShiftedSolve second = shifted_solve(a, p.matrix, 2.0 * xi);
   cert.xi_independence = residual_norm(first.b - second.b);
   return cert;
}

Matrix drazin_contour(const OperatorModel& model, const SpectralSet& sigma_prime, const OrientedContour& contour)
{
   const ResolventSolver solver(model);
   check_contour_clear(contour, solver.eigenvalues(), {Complex{}});

   // Winding numbers must be constant on sigma' and on the rest (0
   // included), and differ by exactly one.
   std::optional<int> w_prime;
   std::optional<int> w_rest = contour.winding_number(Complex{});
   for (const Complex& z : solver.eigenvalues())
   {
      const int w = contour.winding_number(z);
      auto& slot = matches_point(sigma_prime, z, kMatchTol) ? w_prime : w_rest;
      if (slot && *slot != w)
      {
         std::ostringstream msg;
         msg << "contour winds inconsistently around eigenvalue " << z;
         throw Error(ErrorKind::invalid_contour, msg.str());
      }
      slot = w;
   }
   if (w_prime && *w_prime - *w_rest != 1)
   {
      throw Error(ErrorKind::invalid_contour, "contour does not separate sigma' from sigma and the origin");
   }
   if (!w_prime && *w_rest != 0 && *w_rest != -1)
   {
      throw Error(ErrorKind::invalid_contour, "contour winds more than once around the origin");
   }

   const auto f = [&](Complex z) { return Matrix(solver.resolvent(z) / z); };
   Matrix prev = contour_integral(contour, f, kContourStart);
   double diff = std::numeric_limits<double>::infinity();
   for (int nodes = 2 * kContourStart; nodes <= kContourCap; nodes *= 2)
   {
      Matrix next = contour_integral(contour, f, nodes);
      diff = residual_norm(next - prev);
      prev = std::move(next);
      if (diff <= 1e-13 * std::max(1.0, residual_norm(prev))) { return prev; }
   }
   if (diff <= 1e-9 * std::max(1.0, residual_norm(prev))) { return prev; }
   std::ostringstream msg;
   msg << "contour quadrature did not settle: last refinement changed the result by " << diff;
   throw Error(ErrorKind::quadrature_failure, msg.str());
}

Matrix drazin_contour(const OperatorModel& model, const SpectralSet& sigma_prime)
{
   if (sigma_prime.points.empty())
   {
      const Eigen::Index n = static_cast<Eigen::Index>(model.dimension());
      return Matrix::Zero(n, n);
   }
   return drazin_contour(model, sigma_prime, cluster_contour(model, sigma_prime));
}

LaurentResult laurent_resolvent(const OperatorModel& model, const SpectralSet& sigma, Complex lambda, int p_max)
{
   const Matrix a = materialize(model);
   const Eigen::Index n = a.rows();
   const DrazinCertificate cert = drazin_algebraic(model, sigma, admissible_shift(sigma));
   const Matrix& b = cert.b_matrix;
   const Matrix p = Matrix::Identity(n, n) - a * b;

   LaurentResult out;
   out.inner_radius = spectral_radius(a * p);
   const double rb = spectral_radius(b);
   out.outer_radius = rb > 0.0 ? 1.0 / rb : std::numeric_limits<double>::infinity();

   const double mod = std::abs(lambda);
   if (!(mod > out.inner_radius * (1.0 + 1e-12)) || !(mod < out.outer_radius * (1.0 - 1e-12)))
   {
      std::ostringstream msg;
      msg << "|lambda|=" << mod << " outside annulus (" << out.inner_radius << ", " << out.outer_radius << ")";
      throw Error(ErrorKind::annulus_violation, msg.str());
   }

   // Principal part: sum_{p>=1} lambda^{-p} A^{p-1} P, advanced as
   // P A term / lambda so rounding outside R(P) is not amplified by
   // the complement eigenvalues.
   Matrix principal = Matrix::Zero(n, n);
   Matrix term = p / lambda;
   double last1 = 0.0;
   double largest = 0.0;
   for (int k = 1; k <= p_max; ++k)
   {
      principal += term;
      last1 = residual_norm(term);
      largest = std::max(largest, last1);
      out.principal_terms = k;
      if (last1 < kLaurentTermStop) { break; }
      term = (p * (a * term)) / lambda;
   }

   // Regular part: -sum_{p>=0} lambda^p B^{p+1}.
   Matrix regular = Matrix::Zero(n, n);
   term = b;
   double last2 = 0.0;
   for (int k = 0; k <= p_max; ++k)
   {
      regular -= term;
      last2 = residual_norm(term);
      largest = std::max(largest, last2);
      out.regular_terms = k + 1;
      if (last2 < kLaurentTermStop) { break; }
      term = lambda * (b * term);
   }

   out.value = principal + regular;

   // Geometric extrapolation of the dropped terms plus a rounding allowance
   // for the accumulated partial sums.
   const double q1 = out.inner_radius / mod;
   const double q2 = std::isfinite(out.outer_radius) ? mod / out.outer_radius : 0.0;
   const double tail1 = q1 < 1.0 ? last1 * q1 / (1.0 - q1) : std::numeric_limits<double>::infinity();
   const double tail2 = q2 < 1.0 ? last2 * q2 / (1.0 - q2) : std::numeric_limits<double>::infinity();
   const double rounding = 16.0 * std::numeric_limits<double>::epsilon() *
                           static_cast<double>(out.principal_terms + out.regular_terms) *
                           (largest + residual_norm(out.value));
   out.tail_bound = tail1 + tail2 + rounding;
   return out;
}

FunctionalCalculusResult functional_calculus_inverse(const OperatorModel& model, const SpectralSet& sigma)
{
   if (!model.is_structured())
   {
      throw Error(ErrorKind::not_structured, "functional calculus is applied entrywise to diagonal models");
   }
   if (!sigma.contains_zero) { throw Error(ErrorKind::invalid_argument, "spectral set must contain 0"); }
   const auto d = model.diagonal_entries();
   const OrientedContour contour = enclosing_contour(model, sigma);
   const Eigen::Index n = static_cast<Eigen::Index>(d.size());

   FunctionalCalculusResult out;
   out.matrix = Matrix::Zero(n, n);
   out.predicted_spectrum.push_back(Complex{});
   for (Eigen::Index k = 0; k < n; ++k)
   {
      const Complex z = d[static_cast<std::size_t>(k)];
      if (contour.distance_to(z) <= kSpectrumGuard)
      {
         std::ostringstream msg;
         msg << "eigenvalue " << z << " sits on the boundary of the spectral set";
         throw Error(ErrorKind::ambiguous_membership, msg.str());
      }
      if (contour.winding_number(z) == 0)
      {
         out.matrix(k, k) = 1.0 / z;
         push_unique(out.predicted_spectrum, 1.0 / z);
      }
   }
   return out;
}

NonuniquenessGap nonuniqueness_gap(const OperatorModel& model, std::size_t n0, std::size_t n1)
{
   if (n0 >= n1)
   {
      throw Error(ErrorKind::ordering, "need n0 < n1, got n0=" + std::to_string(n0) + ", n1=" + std::to_string(n1));
   }
   const auto s0 = partition_sigma_n(model, n0).first;
   const auto s1 = partition_sigma_n(model, n1).first;
   const Matrix b0 = drazin_algebraic(model, s0, admissible_shift(s0)).b_matrix;
   const Matrix b1 = drazin_algebraic(model, s1, admissible_shift(s1)).b_matrix;

   NonuniquenessGap out;
   out.gap_norm = operator_norm(b0 - b1);
   const auto seq = riesz_sequence(model);
   for (std::size_t k = n0; k < n1; ++k) { out.predicted = std::max(out.predicted, 1.0 / std::abs(seq[k])); }
   return out;
}

PerturbationResult perturb_riesz(const OperatorModel& model, const OperatorModel& r, double sigma_radius)
{
   if (r.dimension() != model.dimension())
   {
      throw Error(ErrorKind::invalid_argument, "perturbation dimension does not match the model");
   }
   if (r.is_structured() && !invertible_part(r).empty())
   {
      throw Error(ErrorKind::invalid_argument, "perturbation must be Riesz-type: declare all of its eigenvalues as Riesz");
   }
   const Matrix a = materialize(model);
   const Matrix rm = materialize(r);
   const double commutator = residual_norm(a * rm - rm * a);
   if (commutator > kCommuteTol)
   {
      std::ostringstream msg;
      msg << "perturbation does not commute with A: ||AR - RA|| = " << commutator;
      throw Error(ErrorKind::commutation, msg.str());
   }

   std::optional<OperatorModel> perturbed;
   if (model.is_structured() && r.is_structured())
   {
      std::size_t offset = 0;
      perturbed = perturb_structured(model, r.diagonal_entries(), offset);
   }
   else { perturbed = OperatorModel::dense(a + rm); }

   SpectralSet sigma = perturbed->is_structured() ? choose_structured_sigma(*perturbed, sigma_radius)
                                                  : choose_dense_sigma(*perturbed, sigma_radius);
   DrazinCertificate cert = drazin_algebraic(*perturbed, sigma, admissible_shift(sigma));
   return PerturbationResult{std::move(*perturbed), std::move(sigma), std::move(cert), commutator};
}

}  // namespace drazinkit
