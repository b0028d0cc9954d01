#pragma once

// Shared numeric types, the library error type, and matrix norms.

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace drazinkit {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Default cap on materialized dimension.
inline constexpr std::size_t kDefaultDimensionCap = 4096;

/// Distance below which a point is considered to lie on the spectrum.
inline constexpr double kSpectrumGuard = 1e-12;

enum class ErrorKind {
   parse,
   io,
   invalid_argument,
   invalid_model,
   model_too_large,
   not_structured,
   near_singular,
   numeric_failure,
   insufficient_riesz_points,
   non_separable,
   quadrature_failure,
   ambiguous_membership,
   inadmissible_shift,
   shift_singular,
   invalid_contour,
   annulus_violation,
   ordering,
   commutation,
   no_eligible_sigma,
   horizon_too_large,
   certification,
   no_decay,
   theta_too_large,
   unsupported_forcing,
   horizon,
   incompatible_initial_data,
   oracle_failure,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
public:
   Error(ErrorKind kind, const std::string& message);

   ErrorKind kind() const noexcept { return kind_; }

private:
   ErrorKind kind_;
};

/// Frobenius norm. Used for residual certificates: it bounds the 2-norm
/// from above, so a residual that passes here passes in the 2-norm too.
inline double residual_norm(const Matrix& m) { return m.norm(); }

/// Largest singular value by power iteration on M*M.
/// Stops when the relative change of the estimate drops below `tol`.
double operator_norm(const Matrix& m, double tol = 1e-12, int max_iter = 10000);

/// Spectral radius via eigenvalues of a dense matrix.
double spectral_radius(const Matrix& m);

/// Set-level Hausdorff distance; multiplicities are ignored.
/// Two empty sets are at distance 0; one empty set gives +infinity.
double hausdorff(const std::vector<Complex>& a, const std::vector<Complex>& b);

}  // namespace drazinkit
