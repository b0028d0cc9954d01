#pragma once

// Text formats: complex literals, eigenvalue rules, model spec files,
// forcing descriptors and content digests.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "drazinkit/core.hpp"
#include "drazinkit/ode2.hpp"
#include "drazinkit/opmodel.hpp"

namespace drazinkit {

/// Parses "a+bi" style literals. Each term is a decimal or a fraction p/q,
/// optionally carrying i: "1/3", "-2+1i", "i/4", "1/8i", "2i/3", "0.5-0.25i".
Complex parse_complex(std::string_view text);

/// 17 significant digits: "0.5", "-1+0.25i", "0.33333333333333331".
std::string format_complex(Complex z);
std::string format_real(double x);

/// Expands "c/(a*k+b)" or "c*q^k" for k = 1..count. Coefficients are
/// complex literals; "*" and "·" are both accepted, and the multiplication
/// sign may be omitted between a coefficient and k ("2k+2").
std::vector<Complex> expand_rule(std::string_view rule, std::size_t count);

/// {"kind": "diagonal", "riesz": [...] | {"rule": ..., "count": K},
///  "invertible": [...], "gap": g}
/// {"kind": "dense", "entries": [[...], ...]}
/// {"kind": "direct_sum", "summands": [...]}
OperatorModel model_from_json(const nlohmann::json& spec);

Matrix matrix_from_json(const nlohmann::json& rows);
nlohmann::json matrix_to_json(const Matrix& m);
nlohmann::json complex_list_to_json(const std::vector<Complex>& values);

/// {"type": "poly", "coeffs": [...]} or
/// {"type": "trig", "omega": w, "phase": p, "amp": a}.
ScalarForcing scalar_forcing_from_json(const nlohmann::json& spec);

/// A single descriptor (broadcast to every component), a list with one
/// descriptor per component, or the shorthands "zero" and "const<c>".
Forcing forcing_from_json(const nlohmann::json& spec, std::size_t dim);

/// Command-line form of a forcing: a shorthand, inline JSON, or a path to a
/// JSON file.
Forcing parse_forcing(std::string_view text, std::size_t dim);

/// One complex literal (broadcast) or a comma-separated list of `dim`.
Vector parse_vector(std::string_view text, std::size_t dim);

/// 64-bit FNV-1a, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

struct ModelFile {
   OperatorModel model;
   nlohmann::json spec;
   std::string digest;
   std::filesystem::path path;
};

ModelFile load_model_file(const std::filesystem::path& path);
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace drazinkit
