#include "drazinkit/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>

#include "drazinkit/drazin.hpp"
#include "drazinkit/ode2.hpp"
#include "drazinkit/projector.hpp"
#include "drazinkit/semigroup.hpp"
#include "drazinkit/spectral.hpp"

namespace drazinkit {

namespace {

using nlohmann::json;

json sigma_to_json(const SpectralSet& s)
{
   json points = json::array();
   for (const auto& p : s.points)
   {
      points.push_back({{"value", format_complex(p.value)}, {"multiplicity", p.multiplicity}});
   }
   return {{"points", points},
           {"contains_zero", s.contains_zero},
           {"radius_r", format_real(s.radius_r)},
           {"separation_gap", format_real(s.separation_gap)}};
}

json vector_to_json(const Vector& v)
{
   json out = json::array();
   for (Eigen::Index k = 0; k < v.size(); ++k) { out.push_back(format_complex(v(k))); }
   return out;
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
   std::ofstream out(path, std::ios::binary);
   if (!out) { throw Error(ErrorKind::io, "cannot write " + path.string()); }
   out << text;
   if (!out) { throw Error(ErrorKind::io, "write failed for " + path.string()); }
}

AnalysisReport start_report(const ModelFile& file, const char* analysis)
{
   AnalysisReport r;
   r.model_digest = file.digest;
   r.analysis = analysis;
   r.timestamp = utc_timestamp();
   return r;
}

}  // namespace

bool CertificateRecord::pass() const
{
   if (std::isnan(value)) { return false; }
   return bound == Bound::at_most ? value <= threshold : value > threshold;
}

void AnalysisReport::certify(std::string name, double value, double threshold, Bound bound, bool gating)
{
   certificates.push_back({std::move(name), value, threshold, bound, gating});
}

bool AnalysisReport::passed() const
{
   return std::all_of(certificates.begin(), certificates.end(),
                      [](const CertificateRecord& c) { return !c.gating || c.pass(); });
}

json AnalysisReport::to_json(bool with_timestamp) const
{
   json certs = json::array();
   for (const auto& c : certificates)
   {
      certs.push_back({{"name", c.name},
                       {"value", format_real(c.value)},
                       {"threshold", format_real(c.threshold)},
                       {"relation", c.bound == Bound::at_most ? "<=" : ">"},
                       {"gating", c.gating},
                       {"pass", c.pass()}});
   }
   json out = {{"model_digest", model_digest},
               {"analysis", analysis},
               {"parameters", parameters},
               {"certificates", certs},
               {"verdict", passed() ? "pass" : "fail"},
               {"results", results},
               {"artifacts", artifacts}};
   if (with_timestamp) { out["timestamp"] = timestamp; }
   return out;
}

std::string utc_timestamp()
{
   const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
   std::tm tm{};
   gmtime_r(&now, &tm);
   char buf[32];
   std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
   return buf;
}

std::uint64_t seed_from_env(std::uint64_t fallback)
{
   const char* env = std::getenv("DRAZINKIT_SEED");
   if (env == nullptr || *env == '\0') { return fallback; }
   char* end = nullptr;
   const unsigned long long v = std::strtoull(env, &end, 10);
   if (end == env || *end != '\0') { throw Error(ErrorKind::parse, std::string("DRAZINKIT_SEED is not an integer: ") + env); }
   return v;
}

SpectralSet select_sigma(const ModelFile& file, std::optional<std::size_t> index)
{
   if (file.spec.contains("sigma"))
   {
      const auto& node = file.spec["sigma"];
      if (!node.is_array()) { throw Error(ErrorKind::parse, "\"sigma\" must be a list of points"); }
      std::vector<Complex> points;
      for (const auto& p : node)
      {
         points.push_back(p.is_string() ? parse_complex(p.get<std::string>()) : Complex{p.get<double>(), 0.0});
      }
      return spectral_set_from_points(file.model, points, true);
   }
   if (!index) { return zero_cluster(file.model); }
   return partition_sigma_n(file.model, *index).first;
}

AnalysisReport analyze_drazin(const ModelFile& file, std::size_t sigma_index, std::optional<Complex> xi)
{
   AnalysisReport rep = start_report(file, "drazin");
   const SpectralSet sigma = select_sigma(file, sigma_index);
   const SpectralSet sigma_prime = complement_set(file.model, sigma);
   const Complex shift = xi ? *xi : admissible_shift(sigma);
   rep.parameters = {{"sigma_index", sigma_index}, {"xi", format_complex(shift)}};

   const SpectralProjection p = spectral_projection(file.model, sigma);
   const DrazinCertificate cert = drazin_algebraic(file.model, sigma, shift);
   const Matrix contour = drazin_contour(file.model, sigma_prime);

   rep.certify("projection_idempotency", p.idem_residual, kProjectionCertifyTol);
   rep.certify("projection_commutation", p.commute_residual, kProjectionCertifyTol);
   rep.certify("bab_minus_b", cert.bab_residual, kAxiomTol);
   rep.certify("ab_minus_ba", cert.commute_residual, kAxiomTol);
   rep.certify("residue_spectrum_hausdorff", cert.sigma_match, kSigmaMatchTol);
   rep.certify("i_minus_ab_minus_p", cert.projection_residual, 1e-10);
   rep.certify("xi_independence", cert.xi_independence, 1e-9);
   rep.certify("contour_agreement", residual_norm(contour - cert.b_matrix), 1e-8);
   if (file.model.is_structured())
   {
      const auto fc = functional_calculus_inverse(file.model, sigma);
      rep.certify("functional_calculus_agreement", residual_norm(fc.matrix - cert.b_matrix), 1e-8);
      rep.results["predicted_spectrum_of_b"] = complex_list_to_json(fc.predicted_spectrum);
   }

   rep.results["sigma"] = sigma_to_json(sigma);
   rep.results["sigma_prime"] = sigma_to_json(sigma_prime);
   rep.results["b_matrix"] = matrix_to_json(cert.b_matrix);
   rep.results["projection"] = matrix_to_json(p.matrix);
   rep.results["residue_spectrum"] = complex_list_to_json(cert.residue_spectrum);
   return rep;
}

AnalysisReport analyze_nonunique(const ModelFile& file, std::size_t n0, std::size_t n1)
{
   AnalysisReport rep = start_report(file, "nonuniqueness");
   rep.parameters = {{"n0", n0}, {"n1", n1}};
   const NonuniquenessGap gap = nonuniqueness_gap(file.model, n0, n1);
   rep.certify("gap_norm", gap.gap_norm, 0.0, Bound::above);
   rep.certify("gap_minus_predicted", std::abs(gap.gap_norm - gap.predicted), 1e-8);
   rep.results["gap_norm"] = format_real(gap.gap_norm);
   rep.results["predicted"] = format_real(gap.predicted);
   rep.results["sigma_n0"] = sigma_to_json(partition_sigma_n(file.model, n0).first);
   rep.results["sigma_n1"] = sigma_to_json(partition_sigma_n(file.model, n1).first);
   return rep;
}

AnalysisReport analyze_perturb(const ModelFile& file, const ModelFile& riesz)
{
   AnalysisReport rep = start_report(file, "perturb");
   rep.parameters = {{"riesz_digest", riesz.digest}, {"sigma_radius", format_real(kPerturbSigmaRadius)}};
   const PerturbationResult res = perturb_riesz(file.model, riesz.model);
   rep.certify("commutator", res.commutator, 1e-12);
   rep.certify("bab_minus_b", res.certificate.bab_residual, kAxiomTol);
   rep.certify("ab_minus_ba", res.certificate.commute_residual, kAxiomTol);
   rep.certify("residue_spectrum_hausdorff", res.certificate.sigma_match, kSigmaMatchTol);
   rep.certify("i_minus_ab_minus_p", res.certificate.projection_residual, 1e-10);
   rep.results["perturbed_spectrum"] = complex_list_to_json(spectrum(res.perturbed));
   rep.results["sigma"] = sigma_to_json(res.sigma);
   rep.results["b_matrix"] = matrix_to_json(res.certificate.b_matrix);
   return rep;
}

AnalysisReport analyze_laurent(const ModelFile& file, std::size_t sigma_index, Complex lambda, std::uint64_t seed,
                               int random_points)
{
   AnalysisReport rep = start_report(file, "laurent");
   rep.parameters = {{"sigma_index", sigma_index},
                     {"lambda", format_complex(lambda)},
                     {"seed", seed},
                     {"random_points", random_points}};
   const SpectralSet sigma = select_sigma(file, sigma_index);
   const std::size_t n = file.model.dimension();
   const Matrix identity = Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
   const ResolventSolver solver(file.model);

   const LaurentResult at = laurent_resolvent(file.model, sigma, lambda);
   const double err = residual_norm(at.value - solver.resolvent(lambda));
   rep.certify("series_minus_resolvent", err, at.tail_bound);
   rep.results["value"] = matrix_to_json(at.value);
   rep.results["inner_radius"] = format_real(at.inner_radius);
   rep.results["outer_radius"] = std::isfinite(at.outer_radius) ? json(format_real(at.outer_radius)) : json("inf");
   rep.results["tail_bound"] = format_real(at.tail_bound);
   rep.results["terms"] = {at.principal_terms, at.regular_terms};

   std::mt19937_64 rng(seed);
   std::uniform_real_distribution<double> unit(0.0, 1.0);
   const double inner = at.inner_radius;
   const double outer = std::isfinite(at.outer_radius) ? at.outer_radius : 10.0 * inner + 1.0;
   double worst_ratio = 0.0;
   for (int k = 0; k < random_points; ++k)
   {
      const double rho = inner + (outer - inner) * (0.1 + 0.8 * unit(rng));
      const double theta = 2.0 * std::numbers::pi * unit(rng);
      const Complex z = std::polar(rho, theta);
      const LaurentResult lr = laurent_resolvent(file.model, sigma, z);
      const double e = residual_norm(lr.value - solver.resolvent(z));
      worst_ratio = std::max(worst_ratio, e / lr.tail_bound);
   }
   if (random_points > 0) { rep.certify("random_points_error_over_bound", worst_ratio, 1.0); }
   return rep;
}

AnalysisReport analyze_semigroup(const ModelFile& file, const SemigroupOptions& options)
{
   AnalysisReport rep = start_report(file, "semigroup");
   rep.parameters = {{"proj", options.proj},
                     {"tol", format_real(options.tol)},
                     {"tmax_cap", format_real(options.tmax_cap)},
                     {"samples", options.samples}};
   if (options.theta) { rep.parameters["theta"] = format_real(*options.theta); }
   if (!(options.tol > 0.0) || !(options.tmax_cap > 0.0) || options.samples < 2)
   {
      throw Error(ErrorKind::invalid_argument, "tol and tmax-cap must be positive and samples at least 2");
   }

   const Matrix a = materialize(file.model);
   SpectralProjection p;
   if (options.proj == "auto") { p = declared_riesz_projection(file.model); }
   else
   {
      const Matrix pm = matrix_from_json(read_json_file(options.proj));
      if (pm.rows() != a.rows() || pm.cols() != a.cols())
      {
         throw Error(ErrorKind::invalid_argument, "projection file does not match the model dimension");
      }
      p = certify_projection(pm, a);
   }
   rep.certify("projection_idempotency", p.idem_residual, kProjectionCertifyTol);
   rep.certify("projection_commutation", p.commute_residual, kProjectionCertifyTol);
   if (!p.certified) { throw Error(ErrorKind::certification, "projection residuals exceed 1e-8"); }

   const ImproperIntegral integral = improper_integral(file.model, p, options.tol);
   if (integral.probe.tail_cutoff > options.tmax_cap)
   {
      throw Error(ErrorKind::horizon_too_large, "tail cutoff T*=" + format_real(integral.probe.tail_cutoff) +
                                                    " exceeds --tmax-cap " + format_real(options.tmax_cap));
   }
   const Matrix algebraic = shifted_inverse(file.model, p);
   rep.certify("integral_minus_algebraic", residual_norm(integral.value - algebraic), 10.0 * options.tol);
   rep.results["integral"] = matrix_to_json(integral.value);
   rep.results["algebraic"] = matrix_to_json(algebraic);
   rep.results["tail_cutoff"] = format_real(integral.probe.tail_cutoff);
   rep.results["panels"] = integral.panels;

   const double e_t = 1.0;
   rep.certify("exp_projection_minus_expm", residual_norm(exp_projection(p, e_t) - expm(-e_t * p.matrix)), 1e-12);

   std::string csv = "t,norm,envelope\n";
   if (!integral.probe.degenerate)
   {
      const double span = std::min(options.tmax_cap, std::max(1.0, 20.0 / integral.probe.spectral_gap));
      const SemigroupProbe probe = decay_fit(file.model, p, uniform_grid(span, options.samples));
      double worst = 0.0;
      for (std::size_t k = 0; k < probe.time_grid.size(); ++k)
      {
         const double env = probe.envelope(probe.time_grid[k]);
         worst = std::max(worst, probe.norms[k] / env);
         csv += format_real(probe.time_grid[k]) + "," + format_real(probe.norms[k]) + "," + format_real(env) + "\n";
      }
      rep.certify("envelope_ratio", worst, 1.0 + 1e-9);
      // The subtraction gap - slack rounds at the scale of gap.
      const double mu_allowance = kDecayFitSlack + 4.0 * std::numeric_limits<double>::epsilon() * probe.spectral_gap;
      rep.certify("mu_minus_gap", std::abs(probe.spectral_gap - probe.fit_mu), mu_allowance);
      const double growth = decaying_block_growth_bound(file.model, p, 1.0);
      rep.certify("growth_bound_identity", std::abs(-probe.spectral_gap - growth), 1e-8);
      rep.results["fit_m"] = format_real(probe.fit_m);
      rep.results["fit_mu"] = format_real(probe.fit_mu);
      rep.results["spectral_gap"] = format_real(probe.spectral_gap);
   }
   else
   {
      for (double t : uniform_grid(1.0, options.samples)) { csv += format_real(t) + ",0,0\n"; }
      rep.results["fit_m"] = "0";
   }

   if (options.theta)
   {
      const QProjection q = q_projection(file.model, p, *options.theta);
      rep.certify("qp_minus_q", q.qp_residual, 1e-9);
      rep.certify("pq_minus_q", q.pq_residual, 1e-9);
      rep.certify("q_idempotency", q.q.idem_residual, 1e-9);
      rep.certify("drazin_identity", q.identity_residual, 1e-8);
      rep.results["q"] = matrix_to_json(q.q.matrix);
      rep.results["q_sigma"] = sigma_to_json(q.sigma);
   }
   if (!options.csv.empty())
   {
      write_text(options.csv, csv);
      rep.artifacts.push_back(options.csv.string());
   }
   return rep;
}

AnalysisReport analyze_ode(const ModelFile& file, const OdeOptions& options)
{
   AnalysisReport rep = start_report(file, "ode");
   const std::size_t dim = file.model.dimension();
   rep.parameters = {{"forcing", options.forcing},
                     {"u0", options.u0},
                     {"v0", options.v0},
                     {"t_end", format_real(options.t_end)},
                     {"mode", options.corrected ? "corrected" : "verbatim"},
                     {"samples", options.samples}};
   if (options.sigma_index) { rep.parameters["sigma_index"] = *options.sigma_index; }
   if (options.samples < 2) { throw Error(ErrorKind::invalid_argument, "samples must be at least 2"); }

   Ode2Problem problem{file.model,
                       select_sigma(file, options.sigma_index),
                       parse_forcing(options.forcing, dim),
                       parse_vector(options.u0, dim),
                       parse_vector(options.v0, dim),
                       options.t_end};
   const Ode2Solver solver(problem);
   const Compatibility& compat = solver.compatibility();
   rep.certify("compatibility_position", compat.pos_residual, kCompatibilityTol);
   rep.certify("compatibility_velocity", compat.vel_residual, kCompatibilityTol);
   rep.certify("series_tail_bound", solver.series_tail_bound(), 1e-10);

   const double limit = solver.validity_limit();
   const std::vector<double> grid = uniform_grid(limit, options.samples);
   const std::vector<Vector> reference = reference_integrate(problem, grid);
   const Ode2Mode mode = options.corrected ? Ode2Mode::corrected : Ode2Mode::verbatim;
   const Ode2Mode other = options.corrected ? Ode2Mode::verbatim : Ode2Mode::corrected;

   std::string csv = "t";
   for (std::size_t k = 1; k <= dim; ++k) { csv += ",re_x" + std::to_string(k) + ",im_x" + std::to_string(k); }
   csv += "\n";
   double err = 0.0;
   double err_other = 0.0;
   Vector last;
   for (std::size_t k = 0; k < grid.size(); ++k)
   {
      const Vector x = solver.solve(grid[k], mode);
      err = std::max(err, (x - reference[k]).cwiseAbs().maxCoeff());
      err_other = std::max(err_other, (solver.solve(grid[k], other) - reference[k]).cwiseAbs().maxCoeff());
      csv += format_real(grid[k]);
      for (Eigen::Index j = 0; j < x.size(); ++j) { csv += "," + format_real(x(j).real()) + "," + format_real(x(j).imag()); }
      csv += "\n";
      last = x;
   }
   rep.certify("oracle_sup_error", err, 1e-6);
   rep.certify(options.corrected ? "oracle_sup_error_verbatim" : "oracle_sup_error_corrected", err_other, 1e-6,
               Bound::at_most, false);
   rep.results["validity_limit"] = format_real(limit);
   rep.results["series_terms"] = solver.series_terms();
   rep.results["x_final"] = vector_to_json(last);
   rep.results["sigma"] = sigma_to_json(problem.sigma);

   if (!options.csv.empty())
   {
      write_text(options.csv, csv);
      rep.artifacts.push_back(options.csv.string());
   }
   return rep;
}

}  // namespace drazinkit
