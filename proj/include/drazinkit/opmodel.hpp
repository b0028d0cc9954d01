#pragma once

// Finite operator models: dense matrices, structured diagonals that declare
// a Riesz part and an invertible part, and direct sums of either.

#include <cstddef>
#include <optional>
#include <vector>

#include "drazinkit/core.hpp"

namespace drazinkit {

enum class ModelKind { dense, diagonal, direct_sum };

class OperatorModel {
public:
   /// Square complex matrix, used as is.
   static OperatorModel dense(Matrix entries);

   /// Diagonal model A = A_N (+) A_M. The Riesz eigenvalues occupy the
   /// leading coordinates, the invertible ones follow. Zero entries are
   /// allowed in the Riesz part and are not allowed in the invertible part.
   /// `invertible_gap`, when given, must satisfy
   /// min|invertible| >= gap > max|riesz|.
   static OperatorModel diagonal(std::vector<Complex> riesz, std::vector<Complex> invertible,
                                 std::optional<double> invertible_gap = std::nullopt);

   static OperatorModel direct_sum(std::vector<OperatorModel> summands);

   ModelKind kind() const noexcept { return kind_; }
   std::size_t dimension() const noexcept { return dim_; }

   const Matrix& dense_entries() const noexcept { return dense_; }
   const std::vector<Complex>& riesz_eigenvalues() const noexcept { return riesz_; }
   const std::vector<Complex>& invertible_eigenvalues() const noexcept { return invertible_; }
   std::optional<double> invertible_gap() const noexcept { return invertible_gap_; }
   const std::vector<OperatorModel>& summands() const noexcept { return summands_; }

   /// True for diagonals and for direct sums whose leaves are all diagonal.
   bool is_structured() const;

   /// Diagonal of the materialized matrix for structured models.
   std::vector<Complex> diagonal_entries() const;

private:
   OperatorModel() = default;

   ModelKind kind_ = ModelKind::dense;
   std::size_t dim_ = 0;
   Matrix dense_;
   std::vector<Complex> riesz_;
   std::vector<Complex> invertible_;
   std::optional<double> invertible_gap_;
   std::vector<OperatorModel> summands_;
};

/// Coordinate split (M, N): M carries the invertible part, N the Riesz part.
struct Reduction {
   std::vector<std::size_t> m_indices;
   std::vector<std::size_t> n_indices;
};

/// Coordinates of the declared invertible and Riesz parts, in materialized
/// order. Requires a structured model.
Reduction declared_reduction(const OperatorModel& model);

Matrix materialize(const OperatorModel& model, std::size_t cap = kDefaultDimensionCap);

/// Eigenvalues of the model with algebraic multiplicity (exact for
/// structured models, QR-based otherwise).
std::vector<Complex> spectrum(const OperatorModel& model);

/// Declared Riesz eigenvalues, zeros excluded, ordered by decreasing modulus
/// with ties broken by ascending argument in (-pi, pi]. Repeated values are
/// kept (one entry per multiplicity).
std::vector<Complex> riesz_sequence(const OperatorModel& model);

/// Number of declared Riesz eigenvalues equal to zero.
std::size_t riesz_zero_count(const OperatorModel& model);

/// Declared invertible eigenvalues of a structured model.
std::vector<Complex> invertible_part(const OperatorModel& model);

/// Solves (lambda I - A) X = rhs. The model is materialized once; repeated
/// solves reuse it. Diagonal models solve entrywise.
class ResolventSolver {
public:
   explicit ResolventSolver(const OperatorModel& model, double spectrum_guard = kSpectrumGuard);

   Matrix solve(Complex lambda, const Matrix& rhs) const;

   /// (lambda I - A)^{-1}.
   Matrix resolvent(Complex lambda) const;

   const Matrix& matrix() const noexcept { return a_; }
   const std::vector<Complex>& eigenvalues() const noexcept { return eig_; }
   std::size_t dimension() const noexcept { return static_cast<std::size_t>(a_.rows()); }

private:
   void guard(Complex lambda) const;

   Matrix a_;
   std::vector<Complex> eig_;
   bool diagonal_ = false;
   double guard_;
};

Matrix resolvent_solve(const OperatorModel& model, Complex lambda, const Matrix& rhs);

}  // namespace drazinkit
