#pragma once

// Spectral projections from contour quadrature of the resolvent.

#include <functional>
#include <vector>

#include "drazinkit/core.hpp"
#include "drazinkit/opmodel.hpp"
#include "drazinkit/spectral.hpp"

namespace drazinkit {

struct Circle {
   Complex center;
   double radius = 0.0;
   /// +1 counterclockwise, -1 clockwise.
   int orientation = 1;
};

struct OrientedContour {
   std::vector<Circle> circles;

   /// Signed number of times the contour winds around z. Points on a
   /// circle count as inside it.
   int winding_number(Complex z) const;

   /// Smallest distance from z to any circle.
   double distance_to(Complex z) const;
};

struct SpectralProjection {
   Matrix matrix;
   double idem_residual = 0.0;
   double commute_residual = 0.0;
   int nodes_used = 0;
   bool certified = false;
};

inline constexpr double kProjectionCertifyTol = 1e-8;

/// Contour around `sigma` that leaves the rest of the spectrum outside.
/// When sigma contains zero and lies inside a disc that excludes the
/// complement, a single circle centered at 0 is placed at the midpoint
/// modulus. Otherwise one circle surrounds each point of sigma.
OrientedContour enclosing_contour(const OperatorModel& model, const SpectralSet& sigma);

/// Counterclockwise circles around each cluster of `sigma_prime`, avoiding
/// the origin and the remaining spectrum.
OrientedContour cluster_contour(const OperatorModel& model, const SpectralSet& sigma_prime);

/// Throws invalid_contour if any circle passes within the guard distance of
/// an eigenvalue or of one of `extra_points`.
void check_contour_clear(const OrientedContour& contour, const std::vector<Complex>& eigenvalues,
                         const std::vector<Complex>& extra_points = {});

using ContourIntegrand = std::function<Matrix(Complex)>;

/// (1/2 pi i) times the contour integral of `f`, trapezoidal rule with
/// `nodes` points per circle. Node contributions are combined by pairwise
/// summation so the result is reproducible for a fixed node count.
Matrix contour_integral(const OrientedContour& contour, const ContourIntegrand& f, int nodes);

/// Trapezoidal quadrature of the resolvent, doubling nodes from 32 until
/// the idempotency residual drops below 1e-10 or 4096 nodes are used.
SpectralProjection projection_contour(const OperatorModel& model, const SpectralSet& sigma);

/// 0/1 diagonal selecting coordinates whose eigenvalue lies inside the
/// enclosing contour. Diagonal models only.
SpectralProjection projection_exact_diagonal(const OperatorModel& model, const SpectralSet& sigma);

/// Exact projection for structured models, contour quadrature otherwise.
SpectralProjection spectral_projection(const OperatorModel& model, const SpectralSet& sigma);

/// Projection onto the declared Riesz coordinates (structured models).
SpectralProjection declared_riesz_projection(const OperatorModel& model);

/// Wraps an arbitrary projection matrix with its residuals against `a`.
SpectralProjection certify_projection(const Matrix& p, const Matrix& a, int nodes_used = 0);

}  // namespace drazinkit
