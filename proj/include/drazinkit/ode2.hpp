#pragma once

// x''(t) = A^2 x(t) + f(t) on [0, delta], solved through the split
// X = R(P_sigma) (+) R(I - P_sigma) and cross-checked with a one-step
// integrator.

#include <variant>
#include <vector>

#include "drazinkit/core.hpp"
#include "drazinkit/opmodel.hpp"
#include "drazinkit/spectral.hpp"

namespace drazinkit {

/// sum_k coeffs[k] t^k
struct PolyForcing {
   std::vector<Complex> coeffs;
};

/// amp cos(omega t + phase)
struct TrigForcing {
   double omega = 0.0;
   double phase = 0.0;
   Complex amp{1.0, 0.0};
};

using ScalarForcing = std::variant<PolyForcing, TrigForcing>;

/// One scalar descriptor per vector component.
struct Forcing {
   std::vector<ScalarForcing> components;

   static Forcing uniform(const ScalarForcing& f, std::size_t dim);
   static Forcing zero(std::size_t dim);

   std::size_t dimension() const { return components.size(); }
   Vector value(double t) const;
   /// Upper bound of sup ||f(t)|| over [0, horizon].
   double sup_bound(double horizon) const;
};

/// j-th iterated primitive of f with F^{(j)}(0) = 0 at every level.
/// j = 0 returns f(t).
Complex primitive(const ScalarForcing& f, int j, double t);
Vector primitive(const Forcing& f, int j, double t);

struct Ode2Problem {
   OperatorModel model;
   SpectralSet sigma;
   Forcing forcing;
   Vector u0;
   Vector v0;
   double horizon = 1.0;
};

enum class Ode2Mode {
   /// u0 enters through (V(t) - V(-t))/2, as the closed form is usually
   /// written.
   verbatim,
   /// u0 enters through (V(t) + V(-t))/2, which reproduces x(0) = u0.
   corrected,
};

struct Compatibility {
   double pos_residual = 0.0;
   double vel_residual = 0.0;
};

Compatibility compatibility_check(const Ode2Problem& problem);

inline constexpr double kCompatibilityTol = 1e-8;
inline constexpr int kMaxSeriesTerms = 200;

/// Precomputed pieces of the closed-form solution.
class Ode2Solver {
public:
   explicit Ode2Solver(Ode2Problem problem);

   /// min(horizon, 1/r).
   double validity_limit() const noexcept { return limit_; }
   int series_terms() const noexcept { return series_terms_; }
   /// Geometric bound of the dropped series terms.
   double series_tail_bound() const noexcept { return tail_bound_; }
   const Ode2Problem& problem() const noexcept { return problem_; }
   const Matrix& projection() const noexcept { return p_; }
   const Matrix& drazin_inverse() const noexcept { return b_; }
   const Compatibility& compatibility() const noexcept { return compat_; }

   Vector solve(double t, Ode2Mode mode = Ode2Mode::verbatim) const;

private:
   Matrix group(double t) const;
   Vector convolution(double t) const;

   Ode2Problem problem_;
   Matrix a_;
   Matrix p_;
   Matrix b_;
   Matrix complement_;
   std::vector<Matrix> series_ops_;   // A^{2(j-1)} P
   int series_terms_ = 0;
   double tail_bound_ = 0.0;
   double limit_ = 0.0;
   Compatibility compat_;
};

Vector series_solution(const Ode2Problem& problem, double t, Ode2Mode mode = Ode2Mode::verbatim);

/// Classical RK4 on y' = [[0, I], [A^2, 0]] y + [0; f]. Returns x at each
/// grid time.
std::vector<Vector> reference_integrate(const Ode2Problem& problem, const std::vector<double>& t_grid);

}  // namespace drazinkit
