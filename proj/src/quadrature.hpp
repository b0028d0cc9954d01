#pragma once

// Composite Gauss-Legendre panels with panel doubling. Shared by the
// semigroup integral and the ODE convolution.

#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "drazinkit/core.hpp"

namespace drazinkit::detail {

template <class Result>
struct PanelIntegral {
   Result value;
   int panels = 0;
};

/// Integrates f over [a, b], doubling the panel count from `start_panels`
/// until two successive estimates differ by less than tol / 10. Panels are
/// summed in ascending order of t.
template <class Result, class F>
PanelIntegral<Result> gauss_panels(F&& f, double a, double b, double tol, int start_panels = 4,
                                   int max_panels = 1 << 16)
{
   using rule = boost::math::quadrature::gauss<double, 10>;
   const auto& x = rule::abscissa();
   const auto& w = rule::weights();

   auto integrate = [&](int panels) {
      const double h = (b - a) / static_cast<double>(panels);
      Result total = f(a) * 0.0;
      for (int k = 0; k < panels; ++k)
      {
         const double mid = a + (static_cast<double>(k) + 0.5) * h;
         const double half = 0.5 * h;
         Result panel = f(mid) * 0.0;
         for (std::size_t i = 0; i < x.size(); ++i)
         {
            panel += w[i] * (f(mid - half * x[i]) + f(mid + half * x[i]));
         }
         total += half * panel;
      }
      return total;
   };

   PanelIntegral<Result> out;
   if (!(b > a))
   {
      out.value = f(a) * 0.0;
      return out;
   }
   int panels = start_panels;
   Result prev = integrate(panels);
   for (;;)
   {
      const int next_panels = panels * 2;
      Result next = integrate(next_panels);
      const double diff = (next - prev).norm();
      panels = next_panels;
      prev = std::move(next);
      if (diff < tol / 10.0)
      {
         out.value = std::move(prev);
         out.panels = panels;
         return out;
      }
      if (panels >= max_panels)
      {
         std::ostringstream msg;
         msg << "Gauss panels did not converge on [" << a << ", " << b << "]: last change " << diff
             << " with " << panels << " panels";
         throw Error(ErrorKind::quadrature_failure, msg.str());
      }
   }
}

}  // namespace drazinkit::detail
