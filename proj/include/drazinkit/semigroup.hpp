#pragma once

// Matrix semigroups T(t) = e^{tA}, the decay envelope of T(t)(I - P), the
// improper-integral inverse and the auxiliary spectral projection Q.

#include <vector>

#include "drazinkit/core.hpp"
#include "drazinkit/drazin.hpp"
#include "drazinkit/opmodel.hpp"
#include "drazinkit/projector.hpp"
#include "drazinkit/spectral.hpp"

namespace drazinkit {

/// e^{tA}. Negative t is accepted (group mode).
Matrix evolve(const OperatorModel& model, double t);

/// Scaling-and-squaring exponential of a dense matrix.
Matrix expm(const Matrix& m);

/// I - P + e^{-t} P.
Matrix exp_projection(const SpectralProjection& p, double t);

/// Eigenvalues of A restricted to the invariant subspace R(q), where q is a
/// projection commuting with A.
std::vector<Complex> restricted_spectrum(const Matrix& a, const Matrix& q);

struct SemigroupProbe {
   std::vector<double> time_grid;
   std::vector<double> norms;
   double fit_m = 0.0;
   double fit_mu = 0.0;
   /// -max Re sigma(A|R(I-P)).
   double spectral_gap = 0.0;
   Matrix integral_estimate;
   double tail_cutoff = 0.0;
   /// R(I - P) = {0}: every norm vanishes.
   bool degenerate = false;

   double envelope(double t) const;
};

inline constexpr double kDecayFitSlack = 1e-6;

SemigroupProbe decay_fit(const OperatorModel& model, const SpectralProjection& p,
                         const std::vector<double>& grid);

/// Evenly spaced grid of `count` samples on [0, t_max].
std::vector<double> uniform_grid(double t_max, int count);

struct ImproperIntegral {
   Matrix value;
   SemigroupProbe probe;
   int panels = 0;
};

/// J = -\int_0^{T*} T(t)(I - P) dt with composite Gauss panels. The cutoff
/// T* is where the analytic tail M e^{-mu T*} / mu drops below `tol`.
ImproperIntegral improper_integral(const OperatorModel& model, const SpectralProjection& p, double tol);

/// (A - P)^{-1} (I - P).
Matrix shifted_inverse(const OperatorModel& model, const SpectralProjection& p);

struct QProjection {
   SpectralProjection q;
   SpectralSet sigma;
   double qp_residual = 0.0;
   double pq_residual = 0.0;
   /// ||A^{D,sigma(AQ)} (I - P) - (A - P)^{-1} (I - P)||.
   double identity_residual = 0.0;
};

QProjection q_projection(const OperatorModel& model, const SpectralProjection& p, double theta);

/// log(r(S_2(t0))) / t0 where S_2 is T restricted to R(I - P).
double decaying_block_growth_bound(const OperatorModel& model, const SpectralProjection& p, double t0);

}  // namespace drazinkit
