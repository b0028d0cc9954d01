#pragma once

// Eigenvalues, spectral sets containing zero, and the Browder accumulation
// diagnostic at the origin.

#include <cstddef>
#include <utility>
#include <vector>

#include "drazinkit/core.hpp"
#include "drazinkit/opmodel.hpp"

namespace drazinkit {

struct SpectralPoint {
   Complex value;
   /// Algebraic multiplicity in the model. Zero marks a virtual point
   /// (the origin adjoined at truncation scale).
   std::size_t multiplicity = 0;
};

/// A finite clopen cluster of the spectrum.
struct SpectralSet {
   std::vector<SpectralPoint> points;
   bool contains_zero = false;
   /// sup |lambda| over the set.
   double radius_r = 0.0;
   /// Half-width of the spectral gap that separates the set from the
   /// rest of the spectrum.
   double separation_gap = 0.0;

   std::vector<Complex> values() const;
   /// Points with nonzero multiplicity.
   std::vector<Complex> realized_values() const;
   std::size_t total_multiplicity() const;
   /// r < 1/2 and the set contains zero.
   bool drazin_eligible() const { return contains_zero && radius_r < 0.5 && separation_gap > 0.0; }
};

/// All eigenvalues with algebraic multiplicity. Diagonal models return their
/// declared entries exactly; upper triangular dense input returns its
/// diagonal; everything else goes through a complex Schur decomposition.
std::vector<Complex> eigensolve(const OperatorModel& model);
std::vector<Complex> eigensolve(const Matrix& m);

/// Groups values that agree to `tol` (relative to max(1, |z|)).
std::vector<SpectralPoint> group_multiplicities(const std::vector<Complex>& values, double tol = 1e-9);

/// (sigma_n, sigma'_n): sigma_n holds 0 and the Riesz points of index > n,
/// sigma'_n holds everything else. n counts entries of riesz_sequence().
std::pair<SpectralSet, SpectralSet> partition_sigma_n(const OperatorModel& model, std::size_t n);

/// Set containing the origin and the listed points, with multiplicities and
/// gap measured against the model spectrum.
SpectralSet spectral_set_from_points(const OperatorModel& model, const std::vector<Complex>& points,
                                     bool contains_zero = true);

/// {0} together with every declared Riesz eigenvalue (sigma_0 without the
/// requirement of a nonempty Riesz sequence).
SpectralSet zero_cluster(const OperatorModel& model);

/// Spectrum of the model minus `sigma`, grouped into clusters.
SpectralSet complement_set(const OperatorModel& model, const SpectralSet& sigma);

/// True if `z` matches one of the set's points.
bool matches_point(const SpectralSet& sigma, Complex z, double tol = 1e-6);

struct BrowderDiagnostic {
   bool isolated_at_zero = false;
   SpectralSet witness;
};

/// Uses the declared structure as a surrogate for the Browder spectrum:
/// invertible part together with the accumulation point 0.
BrowderDiagnostic acc_browder_diagnostic(const OperatorModel& model, double disc_radius);

}  // namespace drazinkit
