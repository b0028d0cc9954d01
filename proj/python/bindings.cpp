#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "drazinkit/analysis.hpp"
#include "drazinkit/drazin.hpp"
#include "drazinkit/model_io.hpp"
#include "drazinkit/ode2.hpp"
#include "drazinkit/projector.hpp"
#include "drazinkit/semigroup.hpp"
#include "drazinkit/spectral.hpp"

namespace py = pybind11;
using namespace drazinkit;

namespace {

// Reports cross the boundary as JSON text; the Python side parses them.
std::string report_text(const AnalysisReport& r) { return r.to_json(false).dump(); }

}  // namespace

PYBIND11_MODULE(_core, m)
{
   m.doc() = "Generalized Drazin-Riesz inverses of finite-dimensional operator models.";

   py::register_exception<Error>(m, "DrazinkitError", PyExc_RuntimeError);

   py::enum_<ModelKind>(m, "ModelKind")
      .value("diagonal", ModelKind::diagonal)
      .value("dense", ModelKind::dense)
      .value("direct_sum", ModelKind::direct_sum);

   py::class_<OperatorModel>(m, "OperatorModel")
      .def_static("dense", &OperatorModel::dense, py::arg("entries"))
      .def_static("diagonal", &OperatorModel::diagonal, py::arg("riesz"), py::arg("invertible"),
                  py::arg("gap") = std::nullopt)
      .def_static("direct_sum", &OperatorModel::direct_sum, py::arg("summands"))
      .def_static("from_json", [](const std::string& text) { return model_from_json(nlohmann::json::parse(text)); })
      .def_static("load", [](const std::filesystem::path& p) { return load_model_file(p).model; })
      .def_property_readonly("kind", &OperatorModel::kind)
      .def_property_readonly("dimension", &OperatorModel::dimension)
      .def_property_readonly("is_structured", &OperatorModel::is_structured)
      .def("matrix", [](const OperatorModel& om) { return materialize(om); })
      .def("spectrum", [](const OperatorModel& om) { return spectrum(om); })
      .def("riesz_sequence", [](const OperatorModel& om) { return riesz_sequence(om); })
      .def("__repr__", [](const OperatorModel& om) {
         return "<OperatorModel dimension=" + std::to_string(om.dimension()) + ">";
      });

   py::class_<SpectralPoint>(m, "SpectralPoint")
      .def_readonly("value", &SpectralPoint::value)
      .def_readonly("multiplicity", &SpectralPoint::multiplicity);

   py::class_<SpectralSet>(m, "SpectralSet")
      .def_readonly("points", &SpectralSet::points)
      .def_readonly("contains_zero", &SpectralSet::contains_zero)
      .def_readonly("radius_r", &SpectralSet::radius_r)
      .def_readonly("separation_gap", &SpectralSet::separation_gap)
      .def("values", &SpectralSet::values);

   m.def("partition_sigma_n", &partition_sigma_n, py::arg("model"), py::arg("n"),
         "(sigma_n, rest of the spectrum)");
   m.def("zero_cluster", &zero_cluster, py::arg("model"));
   m.def("spectral_set_from_points", &spectral_set_from_points, py::arg("model"), py::arg("points"),
         py::arg("contains_zero") = true);
   m.def("complement_set", &complement_set, py::arg("model"), py::arg("sigma"));

   py::class_<SpectralProjection>(m, "SpectralProjection")
      .def_readonly("matrix", &SpectralProjection::matrix)
      .def_readonly("idem_residual", &SpectralProjection::idem_residual)
      .def_readonly("commute_residual", &SpectralProjection::commute_residual)
      .def_readonly("nodes_used", &SpectralProjection::nodes_used)
      .def_readonly("certified", &SpectralProjection::certified);

   m.def("spectral_projection", &spectral_projection, py::arg("model"), py::arg("sigma"));
   m.def("projection_contour", &projection_contour, py::arg("model"), py::arg("sigma"));
   m.def("declared_riesz_projection", &declared_riesz_projection, py::arg("model"));

   py::class_<DrazinCertificate>(m, "DrazinCertificate")
      .def_readonly("b_matrix", &DrazinCertificate::b_matrix)
      .def_readonly("bab_residual", &DrazinCertificate::bab_residual)
      .def_readonly("commute_residual", &DrazinCertificate::commute_residual)
      .def_readonly("residue_spectrum", &DrazinCertificate::residue_spectrum)
      .def_readonly("sigma_match", &DrazinCertificate::sigma_match)
      .def_readonly("xi_used", &DrazinCertificate::xi_used)
      .def_readonly("xi_independence", &DrazinCertificate::xi_independence)
      .def_readonly("projection_residual", &DrazinCertificate::projection_residual)
      .def("passes", &DrazinCertificate::passes);

   m.def("admissible_shift", &admissible_shift, py::arg("sigma"));
   m.def("drazin_algebraic", &drazin_algebraic, py::arg("model"), py::arg("sigma"),
         py::arg("xi") = Complex{-1.0, 0.0});
   m.def("drazin_contour", py::overload_cast<const OperatorModel&, const SpectralSet&>(&drazin_contour),
         py::arg("model"), py::arg("sigma_prime"));
   m.def("functional_calculus_inverse",
         [](const OperatorModel& om, const SpectralSet& s) { return functional_calculus_inverse(om, s).matrix; },
         py::arg("model"), py::arg("sigma"));

   py::class_<LaurentResult>(m, "LaurentResult")
      .def_readonly("value", &LaurentResult::value)
      .def_readonly("principal_terms", &LaurentResult::principal_terms)
      .def_readonly("regular_terms", &LaurentResult::regular_terms)
      .def_readonly("inner_radius", &LaurentResult::inner_radius)
      .def_readonly("outer_radius", &LaurentResult::outer_radius)
      .def_readonly("tail_bound", &LaurentResult::tail_bound);
   m.def("laurent_resolvent", &laurent_resolvent, py::arg("model"), py::arg("sigma"), py::arg("lam"),
         py::arg("p_max") = 5000);
   m.def("resolvent", [](const OperatorModel& om, Complex z) { return ResolventSolver(om).resolvent(z); },
         py::arg("model"), py::arg("lam"));

   m.def("nonuniqueness_gap",
         [](const OperatorModel& om, std::size_t n0, std::size_t n1) {
            const auto g = nonuniqueness_gap(om, n0, n1);
            return py::make_tuple(g.gap_norm, g.predicted);
         },
         py::arg("model"), py::arg("n0"), py::arg("n1"), "(gap_norm, predicted)");

   py::class_<PerturbationResult>(m, "PerturbationResult")
      .def_readonly("perturbed", &PerturbationResult::perturbed)
      .def_readonly("sigma", &PerturbationResult::sigma)
      .def_readonly("certificate", &PerturbationResult::certificate)
      .def_readonly("commutator", &PerturbationResult::commutator);
   m.def("perturb_riesz", &perturb_riesz, py::arg("model"), py::arg("r"), py::arg("sigma_radius") = kPerturbSigmaRadius);

   m.def("evolve", &evolve, py::arg("model"), py::arg("t"));
   m.def("expm", &expm, py::arg("m"));
   m.def("exp_projection", &exp_projection, py::arg("p"), py::arg("t"));

   py::class_<SemigroupProbe>(m, "SemigroupProbe")
      .def_readonly("time_grid", &SemigroupProbe::time_grid)
      .def_readonly("norms", &SemigroupProbe::norms)
      .def_readonly("fit_m", &SemigroupProbe::fit_m)
      .def_readonly("fit_mu", &SemigroupProbe::fit_mu)
      .def_readonly("spectral_gap", &SemigroupProbe::spectral_gap)
      .def_readonly("tail_cutoff", &SemigroupProbe::tail_cutoff)
      .def("envelope", &SemigroupProbe::envelope);
   m.def("decay_fit", &decay_fit, py::arg("model"), py::arg("p"), py::arg("grid"));
   m.def("improper_integral", [](const OperatorModel& om, const SpectralProjection& p, double tol) {
            return improper_integral(om, p, tol).value;
         },
         py::arg("model"), py::arg("p"), py::arg("tol") = 1e-8);
   m.def("shifted_inverse", &shifted_inverse, py::arg("model"), py::arg("p"));

   py::class_<QProjection>(m, "QProjection")
      .def_readonly("q", &QProjection::q)
      .def_readonly("sigma", &QProjection::sigma)
      .def_readonly("qp_residual", &QProjection::qp_residual)
      .def_readonly("pq_residual", &QProjection::pq_residual)
      .def_readonly("identity_residual", &QProjection::identity_residual);
   m.def("q_projection", &q_projection, py::arg("model"), py::arg("p"), py::arg("theta"));

   py::enum_<Ode2Mode>(m, "Ode2Mode").value("verbatim", Ode2Mode::verbatim).value("corrected", Ode2Mode::corrected);

   py::class_<Ode2Problem>(m, "Ode2Problem")
      .def(py::init([](const OperatorModel& om, const SpectralSet& sigma, const std::string& forcing,
                       const Vector& u0, const Vector& v0, double horizon) {
              return Ode2Problem{om, sigma, parse_forcing(forcing, om.dimension()), u0, v0, horizon};
           }),
           py::arg("model"), py::arg("sigma"), py::arg("forcing"), py::arg("u0"), py::arg("v0"), py::arg("horizon"),
           "forcing: \"zero\", \"const<c>\", or a JSON descriptor");

   py::class_<Ode2Solver>(m, "Ode2Solver")
      .def(py::init<Ode2Problem>(), py::arg("problem"))
      .def_property_readonly("validity_limit", &Ode2Solver::validity_limit)
      .def_property_readonly("series_terms", &Ode2Solver::series_terms)
      .def_property_readonly("series_tail_bound", &Ode2Solver::series_tail_bound)
      .def("solve", &Ode2Solver::solve, py::arg("t"), py::arg("mode") = Ode2Mode::verbatim);
   m.def("reference_integrate", &reference_integrate, py::arg("problem"), py::arg("t_grid"));

   m.def("analyze_drazin",
         [](const std::filesystem::path& p, std::size_t n, std::optional<Complex> xi) {
            return report_text(analyze_drazin(load_model_file(p), n, xi));
         },
         py::arg("model_path"), py::arg("sigma_index"), py::arg("xi") = std::nullopt,
         "Report of the drazin analysis as JSON text, without timestamp.");
   m.def("parse_complex", [](const std::string& s) { return parse_complex(s); }, py::arg("text"));
}
