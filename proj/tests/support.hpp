#pragma once

// Seeded fixture generators shared by the unit and acceptance suites.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numbers>
#include <random>
#include <vector>

#include "drazinkit/core.hpp"
#include "drazinkit/opmodel.hpp"

namespace drazinkit::testing {

inline std::uint64_t test_seed()
{
   const char* env = std::getenv("DRAZINKIT_SEED");
   return env != nullptr && *env != '\0' ? std::strtoull(env, nullptr, 10) : 0x5eedULL;
}

class Gen {
public:
   explicit Gen(std::uint64_t salt) : rng_(test_seed() ^ (salt * 0x9e3779b97f4a7c15ULL)) {}

   double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
   int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
   double angle() { return uniform(-std::numbers::pi, std::numbers::pi); }
   Complex polar(double lo, double hi) { return std::polar(uniform(lo, hi), angle()); }
   Complex gaussian() { return {normal_(rng_), normal_(rng_)}; }

   /// Moduli in (lo, hi), strictly decreasing, consecutive ratios at most
   /// 1 - min_rel_gap.
   std::vector<double> decreasing_moduli(int count, double lo, double hi, double min_rel_gap = 0.05)
   {
      std::vector<double> m;
      while (static_cast<int>(m.size()) < count)
      {
         m.clear();
         for (int k = 0; k < count; ++k) { m.push_back(uniform(lo, hi)); }
         std::sort(m.rbegin(), m.rend());
         bool ok = true;
         for (int k = 1; k < count; ++k) { ok = ok && m[k] < (1.0 - min_rel_gap) * m[k - 1]; }
         if (!ok) { m.clear(); }
      }
      return m;
   }

   Matrix random_unitary(Eigen::Index n)
   {
      Matrix g(n, n);
      for (Eigen::Index i = 0; i < n; ++i)
      {
         for (Eigen::Index j = 0; j < n; ++j) { g(i, j) = gaussian(); }
      }
      Eigen::HouseholderQR<Matrix> qr(g);
      return qr.householderQ();
   }

private:
   std::mt19937_64 rng_;
   std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Riesz moduli in (0, 1/2), invertible moduli in (1, 5); optional zero
/// coordinate.
inline OperatorModel random_diagonal(Gen& g, int riesz_count, int invertible_count, bool with_zero)
{
   std::vector<Complex> riesz;
   if (with_zero) { riesz.emplace_back(0.0, 0.0); }
   for (double m : g.decreasing_moduli(riesz_count, 0.02, 0.49)) { riesz.push_back(std::polar(m, g.angle())); }
   std::vector<Complex> inv;
   for (double m : g.decreasing_moduli(invertible_count, 1.05, 4.95)) { inv.push_back(std::polar(m, g.angle())); }
   return OperatorModel::diagonal(riesz, inv);
}

/// Same as random_diagonal with every invertible eigenvalue in the open left
/// half plane.
inline OperatorModel random_decaying(Gen& g, int riesz_count, int invertible_count)
{
   std::vector<Complex> riesz;
   for (double m : g.decreasing_moduli(riesz_count, 0.02, 0.49)) { riesz.push_back(std::polar(m, g.angle())); }
   std::vector<Complex> inv;
   for (double m : g.decreasing_moduli(invertible_count, 1.05, 4.95))
   {
      inv.push_back(std::polar(m, g.uniform(0.55, 1.45) * std::numbers::pi));
   }
   return OperatorModel::diagonal(riesz, inv);
}

struct JordanFixture {
   OperatorModel model;
   /// Simple eigenvalues of the small cluster, 0 included.
   std::vector<Complex> small;
};

/// U T U* with T upper triangular: a diagonalizable small cluster of
/// moduli below 1/2 (0 included) and one Jordan block of size 2 or 3 at an
/// eigenvalue of modulus in (1, 5), in the open left half plane when
/// `decaying`.
inline JordanFixture random_jordan(Gen& g, bool decaying = false)
{
   const int small_count = g.integer(1, 3);
   const int block = g.integer(2, 3);
   std::vector<Complex> small{Complex{}};
   for (double m : g.decreasing_moduli(small_count, 0.05, 0.45, 0.2)) { small.push_back(std::polar(m, g.angle())); }
   const Complex mu = decaying ? std::polar(g.uniform(1.2, 4.5), g.uniform(0.6, 1.4) * std::numbers::pi)
                               : g.polar(1.2, 4.5);
   const Eigen::Index n = static_cast<Eigen::Index>(small.size()) + block;
   Matrix t = Matrix::Zero(n, n);
   for (std::size_t k = 0; k < small.size(); ++k)
   {
      t(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = small[k];
   }
   const Eigen::Index s = static_cast<Eigen::Index>(small.size());
   for (Eigen::Index k = 0; k < block; ++k)
   {
      t(s + k, s + k) = mu;
      if (k + 1 < block) { t(s + k, s + k + 1) = 1.0; }
   }
   const Matrix u = g.random_unitary(n);
   return {OperatorModel::dense(u * t * u.adjoint()), small};
}

/// U D U* with D diagonal: the small cluster of random_decaying together
/// with decaying eigenvalues, seen through a random unitary.
inline JordanFixture random_normal_decaying(Gen& g, int riesz_count, int invertible_count)
{
   const OperatorModel d = random_decaying(g, riesz_count, invertible_count);
   std::vector<Complex> small{Complex{}};
   for (const Complex& z : d.riesz_eigenvalues()) { small.push_back(z); }
   const Eigen::Index n = static_cast<Eigen::Index>(d.dimension()) + 1;
   Matrix t = Matrix::Zero(n, n);
   const auto entries = d.diagonal_entries();
   for (Eigen::Index k = 1; k < n; ++k) { t(k, k) = entries[static_cast<std::size_t>(k - 1)]; }
   const Matrix u = g.random_unitary(n);
   return {OperatorModel::dense(u * t * u.adjoint()), small};
}

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline Matrix diag(std::initializer_list<Complex> d)
{
   Vector v(static_cast<Eigen::Index>(d.size()));
   Eigen::Index k = 0;
   for (const Complex& z : d) { v(k++) = z; }
   return v.asDiagonal();
}

}  // namespace drazinkit::testing
