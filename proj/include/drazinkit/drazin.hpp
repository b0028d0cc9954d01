#pragma once

// Drazin inverses relative to a spectral set containing zero.
//
// Four constructions are provided and cross-checked against each other:
//   - algebraic:   B = (A - xi P)^{-1} (I - P) with |xi| > 2 r,
//   - contour:     B = (1/2 pi i) \oint lambda^{-1} (lambda - A)^{-1} d lambda,
//   - functional:  B = h(A) with h = 0 near sigma and 1/lambda elsewhere,
//   - Laurent:     the resolvent series in the annulus r(AP) < |lambda| < 1/r(B).

#include <cstddef>
#include <optional>
#include <vector>

#include "drazinkit/core.hpp"
#include "drazinkit/opmodel.hpp"
#include "drazinkit/projector.hpp"
#include "drazinkit/spectral.hpp"

namespace drazinkit {

inline constexpr double kAxiomTol = 1e-10;
inline constexpr double kSigmaMatchTol = 1e-8;

struct DrazinCertificate {
   Matrix b_matrix;
   double bab_residual = 0.0;
   double commute_residual = 0.0;
   /// Eigenvalues of A (I - AB).
   std::vector<Complex> residue_spectrum;
   double sigma_match = 0.0;
   Complex xi_used{-1.0, 0.0};
   /// ||B(xi) - B(xi')|| for a second admissible shift.
   double xi_independence = 0.0;
   /// ||(I - AB) - P_sigma||.
   double projection_residual = 0.0;

   bool passes() const {
      return bab_residual <= kAxiomTol && commute_residual <= kAxiomTol && sigma_match <= kSigmaMatchTol;
   }
};

/// -1 when |xi| = 1 is admissible (r < 1/2), otherwise -(2r + 1).
Complex admissible_shift(const SpectralSet& sigma);

/// The set that sigma(A(I - AB)) should reproduce: the realized points of
/// sigma, plus 0 whenever the complement is nontrivial or 0 is realized.
std::vector<Complex> expected_residue_set(const OperatorModel& model, const SpectralSet& sigma);

DrazinCertificate drazin_algebraic(const OperatorModel& model, const SpectralSet& sigma,
                                   Complex xi = Complex{-1.0, 0.0});

/// Certificate for an externally supplied candidate B.
DrazinCertificate certify_inverse(const OperatorModel& model, const SpectralSet& sigma, const Matrix& b,
                                  Complex xi = Complex{-1.0, 0.0});

/// Contour representation. Valid contours wind once more around the
/// complement than around sigma and the origin; this covers both the
/// clockwise circle about 0 and counterclockwise circles around sigma'.
Matrix drazin_contour(const OperatorModel& model, const SpectralSet& sigma_prime, const OrientedContour& contour);

/// Default contour: counterclockwise circles around each cluster of sigma'.
Matrix drazin_contour(const OperatorModel& model, const SpectralSet& sigma_prime);

struct LaurentResult {
   Matrix value;
   int principal_terms = 0;
   int regular_terms = 0;
   double inner_radius = 0.0;   ///< r(A P_sigma)
   double outer_radius = 0.0;   ///< 1 / r(A^{D,sigma}); infinity when B is nilpotent
   double tail_bound = 0.0;
};

LaurentResult laurent_resolvent(const OperatorModel& model, const SpectralSet& sigma, Complex lambda,
                                int p_max = 5000);

struct FunctionalCalculusResult {
   Matrix matrix;
   /// {0} together with 1/lambda for every eigenvalue outside sigma.
   std::vector<Complex> predicted_spectrum;
};

FunctionalCalculusResult functional_calculus_inverse(const OperatorModel& model, const SpectralSet& sigma);

struct NonuniquenessGap {
   double gap_norm = 0.0;
   double predicted = 0.0;
};

NonuniquenessGap nonuniqueness_gap(const OperatorModel& model, std::size_t n0, std::size_t n1);

struct PerturbationResult {
   OperatorModel perturbed;
   SpectralSet sigma;
   DrazinCertificate certificate;
   double commutator = 0.0;
};

/// Radius below which perturb_riesz looks for a spectral set.
inline constexpr double kPerturbSigmaRadius = 0.25;

/// Builds A + R for a commuting Riesz-type R and certifies a Drazin inverse
/// of the sum relative to the largest admissible spectral set of radius
/// below `sigma_radius`.
PerturbationResult perturb_riesz(const OperatorModel& model, const OperatorModel& r,
                                 double sigma_radius = kPerturbSigmaRadius);

}  // namespace drazinkit
