// drazinkit: batch front-end for the Drazin-Riesz analyses.
//
// Exit codes: 0 verdict pass, 1 verdict fail or numerical failure,
// 2 parse error, 3 violated precondition.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "drazinkit/analysis.hpp"
#include "drazinkit/model_io.hpp"

namespace {

using namespace drazinkit;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitParse = 2;
constexpr int kExitPrecondition = 3;

int exit_code_for(ErrorKind kind)
{
   switch (kind)
   {
      case ErrorKind::parse:
      case ErrorKind::io:
      case ErrorKind::unsupported_forcing:
         return kExitParse;
      case ErrorKind::numeric_failure:
      case ErrorKind::quadrature_failure:
      case ErrorKind::shift_singular:
      case ErrorKind::certification:
      case ErrorKind::oracle_failure:
         return kExitFail;
      default:
         return kExitPrecondition;
   }
}

int emit(const AnalysisReport& report, const std::string& out_path)
{
   const std::string body = report.to_json().dump(2) + "\n";
   if (out_path.empty()) { std::cout << body; }
   else
   {
      std::ofstream out(out_path, std::ios::binary);
      if (!out) { throw Error(ErrorKind::io, "cannot write report " + out_path); }
      out << body;
   }
   std::cerr << report.analysis << ": verdict " << (report.passed() ? "pass" : "fail") << "\n";
   for (const auto& c : report.certificates)
   {
      if (c.gating && !c.pass())
      {
         std::cerr << "  failed " << c.name << " = " << format_real(c.value) << " (threshold "
                   << format_real(c.threshold) << ")\n";
      }
   }
   return report.passed() ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv)
{
   CLI::App app{"Generalized Drazin-Riesz inverses of finite operator models"};
   app.require_subcommand(1);

   std::string model_path;
   std::string out_path;
   std::string csv_path;

   auto* analyze = app.add_subcommand("analyze", "Drazin inverse relative to sigma_N with certificates");
   std::size_t sigma_index = 0;
   std::string xi_text;
   analyze->add_option("--model", model_path, "model spec file")->required();
   analyze->add_option("--sigma-index", sigma_index, "N in sigma_N")->required();
   analyze->add_option("--xi", xi_text, "shift xi with |xi| > 2r (default -1, or -(2r+1) when r >= 1/2)");

   auto* nonunique = app.add_subcommand("nonunique", "gap between the inverses for sigma_n0 and sigma_n1");
   std::size_t n0 = 0;
   std::size_t n1 = 0;
   nonunique->add_option("--model", model_path, "model spec file")->required();
   nonunique->add_option("--n0", n0)->required();
   nonunique->add_option("--n1", n1)->required();

   auto* perturb = app.add_subcommand("perturb", "certify A + R for a commuting Riesz-type R");
   std::string riesz_path;
   perturb->add_option("--model", model_path, "model spec file")->required();
   perturb->add_option("--riesz", riesz_path, "spec file of R")->required();

   auto* laurent = app.add_subcommand("laurent", "Laurent series of the resolvent in the annulus");
   std::string lambda_text;
   laurent->add_option("--model", model_path, "model spec file")->required();
   laurent->add_option("--sigma-index", sigma_index, "N in sigma_N")->required();
   laurent->add_option("--lambda", lambda_text, "complex point of the annulus")->required();

   auto* semigroup = app.add_subcommand("semigroup", "decay envelope and improper-integral inverse");
   SemigroupOptions sg;
   double theta = 0.0;
   semigroup->add_option("--model", model_path, "model spec file")->required();
   semigroup->add_option("--proj", sg.proj, "auto, or a JSON matrix file")->default_val("auto");
   semigroup->add_option("--tol", sg.tol, "integral tolerance")->default_val(1e-8);
   semigroup->add_option("--tmax-cap", sg.tmax_cap, "largest admissible tail cutoff")->default_val(1e4);
   auto* theta_opt = semigroup->add_option("--theta", theta, "radius selecting the projection Q");
   semigroup->add_option("--samples", sg.samples, "envelope grid size")->default_val(200);

   auto* ode = app.add_subcommand("ode", "x'' = A^2 x + f through the spectral split");
   OdeOptions od;
   std::size_t ode_sigma = 0;
   ode->add_option("--model", model_path, "model spec file")->required();
   ode->add_option("--forcing", od.forcing, "zero, const<c>, inline JSON or a JSON file")->required();
   ode->add_option("--u0", od.u0, "initial position")->default_val("0");
   ode->add_option("--v0", od.v0, "initial velocity")->default_val("0");
   ode->add_option("--t-end", od.t_end, "horizon delta")->required();
   ode->add_flag("--corrected", od.corrected, "cosh form of the u0 term");
   auto* ode_sigma_opt = ode->add_option("--sigma-index", ode_sigma, "N in sigma_N (default: all Riesz points)");
   ode->add_option("--samples", od.samples, "trajectory samples")->default_val(21);

   for (auto* sub : {analyze, nonunique, perturb, laurent, semigroup, ode})
   {
      sub->add_option("--out", out_path, "report path (default stdout)");
   }
   for (auto* sub : {semigroup, ode}) { sub->add_option("--csv", csv_path, "CSV path"); }

   try { app.parse(argc, argv); }
   catch (const CLI::CallForHelp& e) { return app.exit(e); }
   catch (const CLI::CallForAllHelp& e) { return app.exit(e); }
   catch (const CLI::ParseError& e)
   {
      app.exit(e);
      return kExitParse;
   }

   try
   {
      const ModelFile file = load_model_file(model_path);
      if (*analyze)
      {
         std::optional<Complex> xi;
         if (!xi_text.empty()) { xi = parse_complex(xi_text); }
         return emit(analyze_drazin(file, sigma_index, xi), out_path);
      }
      if (*nonunique) { return emit(analyze_nonunique(file, n0, n1), out_path); }
      if (*perturb) { return emit(analyze_perturb(file, load_model_file(riesz_path)), out_path); }
      if (*laurent)
      {
         return emit(analyze_laurent(file, sigma_index, parse_complex(lambda_text), seed_from_env()), out_path);
      }
      if (*semigroup)
      {
         if (*theta_opt) { sg.theta = theta; }
         sg.csv = csv_path;
         return emit(analyze_semigroup(file, sg), out_path);
      }
      if (*ode)
      {
         if (*ode_sigma_opt) { od.sigma_index = ode_sigma; }
         od.csv = csv_path;
         return emit(analyze_ode(file, od), out_path);
      }
   }
   catch (const Error& e)
   {
      std::cerr << "error: " << e.what() << "\n";
      return exit_code_for(e.kind());
   }
   catch (const std::exception& e)
   {
      std::cerr << "error: " << e.what() << "\n";
      return kExitFail;
   }
   return kExitParse;
}
