#include "drazinkit/opmodel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "drazinkit/spectral.hpp"

namespace drazinkit {

namespace {

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

void collect_structured(const OperatorModel& model, std::vector<Complex>& riesz, std::vector<Complex>& inv)
{
   switch (model.kind())
   {
      case ModelKind::diagonal:
         riesz.insert(riesz.end(), model.riesz_eigenvalues().begin(), model.riesz_eigenvalues().end());
         inv.insert(inv.end(), model.invertible_eigenvalues().begin(), model.invertible_eigenvalues().end());
         return;
      case ModelKind::direct_sum:
         for (const auto& s : model.summands()) { collect_structured(s, riesz, inv); }
         return;
      case ModelKind::dense:
         throw Error(ErrorKind::not_structured, "dense summand has no declared Riesz/invertible split");
   }
}

void collect_reduction(const OperatorModel& model, std::size_t offset, Reduction& out)
{
   if (model.kind() == ModelKind::diagonal)
   {
      const std::size_t nr = model.riesz_eigenvalues().size();
      for (std::size_t k = 0; k < nr; ++k) { out.n_indices.push_back(offset + k); }
      for (std::size_t k = 0; k < model.invertible_eigenvalues().size(); ++k)
      {
         out.m_indices.push_back(offset + nr + k);
      }
      return;
   }
   if (model.kind() == ModelKind::direct_sum)
   {
      for (const auto& s : model.summands())
      {
         collect_reduction(s, offset, out);
         offset += s.dimension();
      }
      return;
   }
   throw Error(ErrorKind::not_structured, "dense model has no declared reduction");
}

}  // namespace

OperatorModel OperatorModel::dense(Matrix entries)
{
   if (entries.rows() != entries.cols())
   {
      throw Error(ErrorKind::invalid_model, "dense model must be square");
   }
   if (!entries.allFinite()) { throw Error(ErrorKind::invalid_model, "dense model has non-finite entries"); }
   OperatorModel m;
   m.kind_ = ModelKind::dense;
   m.dim_ = static_cast<std::size_t>(entries.rows());
   m.dense_ = std::move(entries);
   return m;
}

OperatorModel OperatorModel::diagonal(std::vector<Complex> riesz, std::vector<Complex> invertible,
                                      std::optional<double> invertible_gap)
{
   for (const Complex& z : riesz)
   {
      if (!finite(z)) { throw Error(ErrorKind::invalid_model, "non-finite Riesz eigenvalue"); }
   }
   for (const Complex& z : invertible)
   {
      if (!finite(z)) { throw Error(ErrorKind::invalid_model, "non-finite invertible eigenvalue"); }
      if (z == Complex{}) { throw Error(ErrorKind::invalid_model, "invertible part contains 0"); }
   }
   if (invertible_gap)
   {
      double min_inv = std::numeric_limits<double>::infinity();
      double max_riesz = 0.0;
      for (const Complex& z : invertible) { min_inv = std::min(min_inv, std::abs(z)); }
      for (const Complex& z : riesz) { max_riesz = std::max(max_riesz, std::abs(z)); }
      if (!(*invertible_gap > max_riesz && min_inv >= *invertible_gap))
      {
         std::ostringstream msg;
         msg << "declared gap " << *invertible_gap << " does not separate max|riesz|=" << max_riesz
             << " from min|invertible|=" << min_inv;
         throw Error(ErrorKind::invalid_model, msg.str());
      }
   }
   OperatorModel m;
   m.kind_ = ModelKind::diagonal;
   m.dim_ = riesz.size() + invertible.size();
   m.riesz_ = std::move(riesz);
   m.invertible_ = std::move(invertible);
   m.invertible_gap_ = invertible_gap;
   return m;
}

OperatorModel OperatorModel::direct_sum(std::vector<OperatorModel> summands)
{
   OperatorModel m;
   m.kind_ = ModelKind::direct_sum;
   m.dim_ = 0;
   for (const auto& s : summands) { m.dim_ += s.dimension(); }
   m.summands_ = std::move(summands);
   return m;
}

bool OperatorModel::is_structured() const
{
   switch (kind_)
   {
      case ModelKind::diagonal: return true;
      case ModelKind::dense: return false;
      case ModelKind::direct_sum:
         return std::all_of(summands_.begin(), summands_.end(), [](const auto& s) { return s.is_structured(); });
   }
   return false;
}

std::vector<Complex> OperatorModel::diagonal_entries() const
{
   std::vector<Complex> out;
   out.reserve(dim_);
   if (kind_ == ModelKind::diagonal)
   {
      out = riesz_;
      out.insert(out.end(), invertible_.begin(), invertible_.end());
      return out;
   }
   if (kind_ == ModelKind::direct_sum)
   {
      for (const auto& s : summands_)
      {
         auto d = s.diagonal_entries();
         out.insert(out.end(), d.begin(), d.end());
      }
      return out;
   }
   throw Error(ErrorKind::not_structured, "dense model has no declared diagonal");
}

Reduction declared_reduction(const OperatorModel& model)
{
   Reduction out;
   collect_reduction(model, 0, out);
   return out;
}

Matrix materialize(const OperatorModel& model, std::size_t cap)
{
   const std::size_t n = model.dimension();
   if (n > cap)
   {
      throw Error(ErrorKind::model_too_large,
                  "dimension " + std::to_string(n) + " exceeds cap " + std::to_string(cap));
   }
   switch (model.kind())
   {
      case ModelKind::dense: return model.dense_entries();
      case ModelKind::diagonal:
      {
         const auto d = model.diagonal_entries();
         Matrix out = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
         for (std::size_t k = 0; k < n; ++k) { out(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = d[k]; }
         return out;
      }
      case ModelKind::direct_sum:
      {
         Matrix out = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
         Eigen::Index offset = 0;
         for (const auto& s : model.summands())
         {
            const Eigen::Index k = static_cast<Eigen::Index>(s.dimension());
            out.block(offset, offset, k, k) = materialize(s, cap);
            offset += k;
         }
         return out;
      }
   }
   return {};
}

std::vector<Complex> spectrum(const OperatorModel& model) { return eigensolve(model); }

std::vector<Complex> riesz_sequence(const OperatorModel& model)
{
   std::vector<Complex> riesz;
   std::vector<Complex> inv;
   collect_structured(model, riesz, inv);
   std::vector<Complex> out;
   for (const Complex& z : riesz)
   {
      if (z != Complex{}) { out.push_back(z); }
   }
   std::stable_sort(out.begin(), out.end(), [](Complex a, Complex b) {
      const double ma = std::abs(a);
      const double mb = std::abs(b);
      if (ma != mb) { return ma > mb; }
      return std::arg(a) < std::arg(b);
   });
   return out;
}

std::size_t riesz_zero_count(const OperatorModel& model)
{
   std::vector<Complex> riesz;
   std::vector<Complex> inv;
   collect_structured(model, riesz, inv);
   return static_cast<std::size_t>(std::count(riesz.begin(), riesz.end(), Complex{}));
}

std::vector<Complex> invertible_part(const OperatorModel& model)
{
   std::vector<Complex> riesz;
   std::vector<Complex> inv;
   collect_structured(model, riesz, inv);
   return inv;
}

ResolventSolver::ResolventSolver(const OperatorModel& model, double spectrum_guard)
   : a_(materialize(model)), diagonal_(model.is_structured()), guard_(spectrum_guard)
{
   eig_ = diagonal_ ? model.diagonal_entries() : eigensolve(a_);
}

void ResolventSolver::guard(Complex lambda) const
{
   for (const Complex& z : eig_)
   {
      if (std::abs(lambda - z) <= guard_)
      {
         std::ostringstream msg;
         msg << "lambda=" << lambda << " within " << guard_ << " of eigenvalue " << z;
         throw Error(ErrorKind::near_singular, msg.str());
      }
   }
}

Matrix ResolventSolver::solve(Complex lambda, const Matrix& rhs) const
{
   guard(lambda);
   const Eigen::Index n = a_.rows();
   if (rhs.rows() != n) { throw Error(ErrorKind::invalid_model, "rhs row count does not match model"); }
   if (diagonal_)
   {
      Matrix out(rhs.rows(), rhs.cols());
      for (Eigen::Index i = 0; i < n; ++i) { out.row(i) = rhs.row(i) / (lambda - a_(i, i)); }
      return out;
   }
   Matrix shifted = -a_;
   shifted.diagonal().array() += lambda;
   return Eigen::PartialPivLU<Matrix>(shifted).solve(rhs);
}

Matrix ResolventSolver::resolvent(Complex lambda) const
{
   const Eigen::Index n = a_.rows();
   if (diagonal_)
   {
      guard(lambda);
      Matrix out = Matrix::Zero(n, n);
      for (Eigen::Index i = 0; i < n; ++i) { out(i, i) = 1.0 / (lambda - a_(i, i)); }
      return out;
   }
   return solve(lambda, Matrix::Identity(n, n));
}

Matrix resolvent_solve(const OperatorModel& model, Complex lambda, const Matrix& rhs)
{
   return ResolventSolver(model).solve(lambda, rhs);
}

}  // namespace drazinkit
