#include "drazinkit/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "quadrature.hpp"

namespace drazinkit {

namespace {

constexpr double kMaxExponent = 709.0;

bool is_diagonal_matrix(const Matrix& m)
{
   for (Eigen::Index j = 0; j < m.cols(); ++j)
   {
      for (Eigen::Index i = 0; i < m.rows(); ++i)
      {
         if (i != j && m(i, j) != Complex{}) { return false; }
      }
   }
   return true;
}

// Eigenvalues of A on R(I - P). Exact selection when both A and P are
// diagonal.
std::vector<Complex> decaying_spectrum(const OperatorModel& model, const Matrix& a, const Matrix& p)
{
   const Eigen::Index n = a.rows();
   if (model.is_structured() && is_diagonal_matrix(p))
   {
      std::vector<Complex> out;
      for (Eigen::Index k = 0; k < n; ++k)
      {
         if (std::abs(1.0 - p(k, k)) > 0.5) { out.push_back(a(k, k)); }
      }
      return out;
   }
   return restricted_spectrum(a, Matrix::Identity(n, n) - p);
}

}  // namespace

Matrix expm(const Matrix& m)
{
   Matrix out = m.exp();
   if (!out.allFinite())
   {
      throw Error(ErrorKind::horizon_too_large, "matrix exponential overflowed");
   }
   return out;
}

Matrix evolve(const OperatorModel& model, double t)
{
   if (model.is_structured())
   {
      const auto d = model.diagonal_entries();
      const Eigen::Index n = static_cast<Eigen::Index>(d.size());
      Matrix out = Matrix::Zero(n, n);
      for (Eigen::Index k = 0; k < n; ++k)
      {
         const Complex z = t * d[static_cast<std::size_t>(k)];
         if (z.real() > kMaxExponent)
         {
            std::ostringstream msg;
            msg << "e^{tA} overflows at t=" << t << " (Re(t lambda)=" << z.real() << ")";
            throw Error(ErrorKind::horizon_too_large, msg.str());
         }
         out(k, k) = std::exp(z);
      }
      return out;
   }
   const Matrix a = materialize(model);
   if (t == 0.0) { return Matrix::Identity(a.rows(), a.cols()); }
   return expm(t * a);
}

Matrix exp_projection(const SpectralProjection& p, double t)
{
   if (!p.certified)
   {
      std::ostringstream msg;
      msg << "projection is not certified (idempotency " << p.idem_residual << ", commutator "
          << p.commute_residual << ")";
      throw Error(ErrorKind::certification, msg.str());
   }
   const Eigen::Index n = p.matrix.rows();
   return Matrix::Identity(n, n) - p.matrix + std::exp(-t) * p.matrix;
}

std::vector<Complex> restricted_spectrum(const Matrix& a, const Matrix& q)
{
   const double trace = q.trace().real();
   const Eigen::Index rank = static_cast<Eigen::Index>(std::llround(trace));
   if (rank <= 0) { return {}; }
   const Eigen::ColPivHouseholderQR<Matrix> qr(q);
   const Matrix full = qr.householderQ();
   const Matrix basis = full.leftCols(rank);
   return eigensolve(Matrix(basis.adjoint() * a * basis));
}

double SemigroupProbe::envelope(double t) const
{
   if (degenerate) { return 0.0; }
   return fit_m * std::exp(-fit_mu * t);
}

std::vector<double> uniform_grid(double t_max, int count)
{
   if (count < 2) { return {0.0}; }
   std::vector<double> grid(static_cast<std::size_t>(count));
   for (int k = 0; k < count; ++k)
   {
      grid[static_cast<std::size_t>(k)] = t_max * static_cast<double>(k) / static_cast<double>(count - 1);
   }
   return grid;
}

SemigroupProbe decay_fit(const OperatorModel& model, const SpectralProjection& p, const std::vector<double>& grid)
{
   const Matrix a = materialize(model);
   const Eigen::Index n = a.rows();
   const Matrix complement = Matrix::Identity(n, n) - p.matrix;

   SemigroupProbe probe;
   probe.time_grid = grid;
   const auto spec = decaying_spectrum(model, a, p.matrix);
   if (spec.empty())
   {
      probe.degenerate = true;
      probe.norms.assign(grid.size(), 0.0);
      probe.fit_m = 0.0;
      probe.fit_mu = std::numeric_limits<double>::infinity();
      probe.spectral_gap = std::numeric_limits<double>::infinity();
      return probe;
   }

   double abscissa = -std::numeric_limits<double>::infinity();
   for (const Complex& z : spec) { abscissa = std::max(abscissa, z.real()); }
   if (!(abscissa < 0.0))
   {
      std::ostringstream msg;
      msg << "spectral abscissa on R(I-P) is " << abscissa << "; T(t)(I-P) does not decay";
      throw Error(ErrorKind::no_decay, msg.str());
   }
   probe.spectral_gap = -abscissa;
   probe.fit_mu = probe.spectral_gap - kDecayFitSlack;
   if (!(probe.fit_mu > 0.0))
   {
      throw Error(ErrorKind::no_decay, "spectral gap is below the fit slack");
   }

   probe.norms.reserve(grid.size());
   for (double t : grid)
   {
      const double nk = operator_norm(evolve(model, t) * complement);
      probe.norms.push_back(nk);
      probe.fit_m = std::max(probe.fit_m, nk * std::exp(probe.fit_mu * t));
   }
   return probe;
}

Matrix shifted_inverse(const OperatorModel& model, const SpectralProjection& p)
{
   const Matrix a = materialize(model);
   const Eigen::Index n = a.rows();
   const Eigen::PartialPivLU<Matrix> lu(a - p.matrix);
   if (n > 0 && !(lu.rcond() > 1e-14))
   {
      throw Error(ErrorKind::shift_singular, "A - P is numerically singular");
   }
   return lu.solve(Matrix::Identity(n, n) - p.matrix);
}

ImproperIntegral improper_integral(const OperatorModel& model, const SpectralProjection& p, double tol)
{
   if (!(tol > 0.0)) { throw Error(ErrorKind::invalid_argument, "tolerance must be positive"); }
   const Matrix a = materialize(model);
   const Eigen::Index n = a.rows();
   const Matrix complement = Matrix::Identity(n, n) - p.matrix;

   ImproperIntegral out;
   // The fit only needs the decay rate to place its grid.
   SemigroupProbe rate = decay_fit(model, p, {0.0});
   if (rate.degenerate)
   {
      out.probe = rate;
      out.value = Matrix::Zero(n, n);
      out.probe.integral_estimate = out.value;
      return out;
   }
   const double span = std::max(1.0, 20.0 / rate.spectral_gap);
   out.probe = decay_fit(model, p, uniform_grid(span, 64));
   SemigroupProbe& probe = out.probe;

   probe.tail_cutoff = std::max(0.0, std::log(probe.fit_m / (probe.fit_mu * tol)) / probe.fit_mu);

   const auto integrand = [&](double t) { return Matrix(evolve(model, t) * complement); };
   auto integral = detail::gauss_panels<Matrix>(integrand, 0.0, probe.tail_cutoff, tol);
   out.value = -integral.value;
   out.panels = integral.panels;
   probe.integral_estimate = out.value;
   return out;
}

QProjection q_projection(const OperatorModel& model, const SpectralProjection& p, double theta)
{
   if (!(theta > 0.0)) { throw Error(ErrorKind::invalid_argument, "theta must be positive"); }
   const Matrix a = materialize(model);
   const Eigen::Index n = a.rows();

   for (const Complex& z : decaying_spectrum(model, a, p.matrix))
   {
      if (std::abs(z) <= theta)
      {
         std::ostringstream msg;
         msg << "theta=" << theta << " reaches the eigenvalue " << z << " of A on R(I-P)";
         throw Error(ErrorKind::theta_too_large, msg.str());
      }
   }

   std::vector<Complex> ap_spectrum;
   if (model.is_structured() && is_diagonal_matrix(p.matrix))
   {
      for (Eigen::Index k = 0; k < n; ++k) { ap_spectrum.push_back(a(k, k) * p.matrix(k, k)); }
   }
   else { ap_spectrum = eigensolve(Matrix(a * p.matrix)); }

   std::vector<Complex> inside;
   for (const Complex& z : ap_spectrum)
   {
      if (std::abs(z) < theta && z != Complex{}) { inside.push_back(z); }
   }

   QProjection out;
   out.sigma = spectral_set_from_points(model, inside, true);
   out.q = projection_contour(model, out.sigma);
   const Matrix& q = out.q.matrix;
   out.qp_residual = residual_norm(q * p.matrix - q);
   out.pq_residual = residual_norm(p.matrix * q - q);

   const Matrix complement = Matrix::Identity(n, n) - p.matrix;
   const Matrix lhs = drazin_algebraic(model, out.sigma).b_matrix * complement;
   out.identity_residual = residual_norm(lhs - shifted_inverse(model, p));
   return out;
}

double decaying_block_growth_bound(const OperatorModel& model, const SpectralProjection& p, double t0)
{
   if (!(t0 > 0.0)) { throw Error(ErrorKind::invalid_argument, "t0 must be positive"); }
   const Matrix a = materialize(model);
   const Matrix s = evolve(model, t0);
   std::vector<Complex> spec;
   if (model.is_structured() && is_diagonal_matrix(p.matrix))
   {
      for (Eigen::Index k = 0; k < a.rows(); ++k)
      {
         if (std::abs(1.0 - p.matrix(k, k)) > 0.5) { spec.push_back(s(k, k)); }
      }
   }
   else { spec = restricted_spectrum(s, Matrix::Identity(a.rows(), a.cols()) - p.matrix); }
   double r = 0.0;
   for (const Complex& z : spec) { r = std::max(r, std::abs(z)); }
   return std::log(r) / t0;
}

}  // namespace drazinkit
