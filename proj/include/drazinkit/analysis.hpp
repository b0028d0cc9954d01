#pragma once

// Named analyses behind the command-line front-end. Each one loads nothing
// itself, runs the numerical pipeline and returns a report whose verdict is
// the conjunction of its gating certificates.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "drazinkit/core.hpp"
#include "drazinkit/model_io.hpp"

namespace drazinkit {

enum class Bound {
   at_most,   ///< pass iff value <= threshold
   above,     ///< pass iff value > threshold
};

struct CertificateRecord {
   std::string name;
   double value = 0.0;
   double threshold = 0.0;
   Bound bound = Bound::at_most;
   /// Non-gating records are reported but do not affect the verdict.
   bool gating = true;

   bool pass() const;
};

struct AnalysisReport {
   std::string model_digest;
   std::string analysis;
   nlohmann::json parameters = nlohmann::json::object();
   std::vector<CertificateRecord> certificates;
   nlohmann::json results = nlohmann::json::object();
   std::vector<std::string> artifacts;
   std::string timestamp;

   void certify(std::string name, double value, double threshold, Bound bound = Bound::at_most, bool gating = true);
   bool passed() const;
   /// Keys in fixed order; numbers as 17-digit decimal strings.
   nlohmann::json to_json(bool with_timestamp = true) const;
};

/// Current UTC time, ISO 8601 with seconds.
std::string utc_timestamp();

/// Seed for randomized checks: DRAZINKIT_SEED if set, otherwise `fallback`.
std::uint64_t seed_from_env(std::uint64_t fallback = 20240611);

/// sigma_N from the model, or the explicit "sigma" list of the spec file when
/// the model has no declared Riesz sequence.
SpectralSet select_sigma(const ModelFile& file, std::optional<std::size_t> index);

AnalysisReport analyze_drazin(const ModelFile& file, std::size_t sigma_index, std::optional<Complex> xi);

AnalysisReport analyze_nonunique(const ModelFile& file, std::size_t n0, std::size_t n1);

AnalysisReport analyze_perturb(const ModelFile& file, const ModelFile& riesz);

/// Checks the series at `lambda` and at `random_points` further points of
/// the annulus drawn from `seed`.
AnalysisReport analyze_laurent(const ModelFile& file, std::size_t sigma_index, Complex lambda, std::uint64_t seed,
                               int random_points = 20);

struct SemigroupOptions {
   /// "auto" for the declared Riesz projection, otherwise a JSON matrix file.
   std::string proj = "auto";
   double tol = 1e-8;
   double tmax_cap = 1e4;
   std::optional<double> theta;
   int samples = 200;
   std::filesystem::path csv;
};

AnalysisReport analyze_semigroup(const ModelFile& file, const SemigroupOptions& options);

struct OdeOptions {
   std::string forcing = "zero";
   std::string u0 = "0";
   std::string v0 = "0";
   double t_end = 1.0;
   bool corrected = false;
   std::optional<std::size_t> sigma_index;
   int samples = 21;
   std::filesystem::path csv;
};

AnalysisReport analyze_ode(const ModelFile& file, const OdeOptions& options);

}  // namespace drazinkit
