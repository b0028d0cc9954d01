#include "drazinkit/model_io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace drazinkit {

namespace {

using nlohmann::json;

std::string strip(std::string_view text)
{
   std::string out;
   for (char c : text)
   {
      if (!std::isspace(static_cast<unsigned char>(c))) { out.push_back(c); }
   }
   return out;
}

// "·" is two bytes in UTF-8; rewrite it as '*'.
std::string normalize_rule(std::string_view text)
{
   std::string s = strip(text);
   const std::string dot = "\xC2\xB7";
   for (std::size_t pos = s.find(dot); pos != std::string::npos; pos = s.find(dot, pos)) { s.replace(pos, 2, "*"); }
   return s;
}

[[noreturn]] void parse_fail(std::string_view what, std::string_view text)
{
   throw Error(ErrorKind::parse, std::string(what) + ": \"" + std::string(text) + "\"");
}

double parse_decimal(std::string_view text, std::string_view whole)
{
   if (text.empty()) { parse_fail("missing number in complex literal", whole); }
   double value = 0.0;
   const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
   if (ec != std::errc{} || ptr != text.data() + text.size()) { parse_fail("bad number", whole); }
   return value;
}

// p or p/q; an empty numerator means 1 ("/4" from "i/4").
double parse_fraction(std::string_view text, std::string_view whole)
{
   const auto slash = text.find('/');
   if (slash == std::string_view::npos) { return text.empty() ? 1.0 : parse_decimal(text, whole); }
   const std::string_view num = text.substr(0, slash);
   const double p = num.empty() ? 1.0 : parse_decimal(num, whole);
   const double q = parse_decimal(text.substr(slash + 1), whole);
   if (q == 0.0) { parse_fail("zero denominator", whole); }
   return p / q;
}

Complex parse_term(std::string_view term, std::string_view whole)
{
   const auto ipos = term.find('i');
   if (ipos == std::string_view::npos) { return {parse_fraction(term, whole), 0.0}; }
   if (term.find('i', ipos + 1) != std::string_view::npos) { parse_fail("repeated i", whole); }
   std::string rest(term.substr(0, ipos));
   rest += term.substr(ipos + 1);
   if (!rest.empty() && rest.back() == '*') { rest.pop_back(); }
   if (!rest.empty() && rest.front() == '*') { rest.erase(rest.begin()); }
   return {0.0, parse_fraction(rest, whole)};
}

// Coefficient and k-term of "a*k+b".
std::pair<Complex, Complex> parse_linear_in_k(std::string_view text, std::string_view whole)
{
   Complex a{};
   Complex b{};
   std::size_t start = 0;
   for (std::size_t pos = 1; pos <= text.size(); ++pos)
   {
      const bool at_end = pos == text.size();
      if (!at_end && !((text[pos] == '+' || text[pos] == '-') && text[pos - 1] != 'e' && text[pos - 1] != 'E'))
      {
         continue;
      }
      std::string term(text.substr(start, pos - start));
      double sign = 1.0;
      if (!term.empty() && (term.front() == '+' || term.front() == '-'))
      {
         sign = term.front() == '-' ? -1.0 : 1.0;
         term.erase(term.begin());
      }
      const auto kpos = term.find('k');
      if (kpos == std::string::npos) { b += sign * parse_complex(term); }
      else
      {
         if (kpos + 1 != term.size()) { parse_fail("k must end its term", whole); }
         std::string coeff = term.substr(0, kpos);
         if (!coeff.empty() && coeff.back() == '*') { coeff.pop_back(); }
         a += sign * (coeff.empty() ? Complex{1.0, 0.0} : parse_complex(coeff));
      }
      start = pos;
   }
   return {a, b};
}

std::string unparen(std::string s)
{
   if (s.size() >= 2 && s.front() == '(' && s.back() == ')') { return s.substr(1, s.size() - 2); }
   return s;
}

std::vector<Complex> complex_list_from_json(const json& node, const char* field)
{
   if (!node.is_array()) { throw Error(ErrorKind::parse, std::string(field) + " must be a list"); }
   std::vector<Complex> out;
   for (const auto& v : node)
   {
      if (v.is_string()) { out.push_back(parse_complex(v.get<std::string>())); }
      else if (v.is_number()) { out.emplace_back(v.get<double>(), 0.0); }
      else { throw Error(ErrorKind::parse, std::string(field) + " entries must be strings or numbers"); }
   }
   return out;
}

Complex complex_from_json(const json& node, const char* field)
{
   if (node.is_string()) { return parse_complex(node.get<std::string>()); }
   if (node.is_number()) { return {node.get<double>(), 0.0}; }
   throw Error(ErrorKind::parse, std::string(field) + " must be a number or a complex string");
}

double real_from_json(const json& node, const char* field)
{
   const Complex z = complex_from_json(node, field);
   if (z.imag() != 0.0) { throw Error(ErrorKind::parse, std::string(field) + " must be real"); }
   return z.real();
}

}  // namespace

Complex parse_complex(std::string_view text)
{
   const std::string s = strip(text);
   if (s.empty()) { parse_fail("empty complex literal", text); }
   Complex sum{};
   std::size_t start = 0;
   for (std::size_t pos = 1; pos <= s.size(); ++pos)
   {
      const bool at_end = pos == s.size();
      if (!at_end && !((s[pos] == '+' || s[pos] == '-') && s[pos - 1] != 'e' && s[pos - 1] != 'E'))
      {
         continue;
      }
      std::string_view term(s.data() + start, pos - start);
      double sign = 1.0;
      if (term.front() == '+' || term.front() == '-')
      {
         sign = term.front() == '-' ? -1.0 : 1.0;
         term.remove_prefix(1);
      }
      if (term.empty()) { parse_fail("dangling sign", text); }
      sum += sign * parse_term(term, text);
      start = pos;
   }
   if (!std::isfinite(sum.real()) || !std::isfinite(sum.imag())) { parse_fail("non-finite value", text); }
   return sum;
}

std::string format_real(double x)
{
   if (x == 0.0) { return "0"; }
   char buf[64];
   std::snprintf(buf, sizeof buf, "%.17g", x);
   return buf;
}

std::string format_complex(Complex z)
{
   if (z.imag() == 0.0) { return format_real(z.real()); }
   std::string out;
   if (z.real() != 0.0) { out = format_real(z.real()); }
   if (z.imag() > 0.0 && !out.empty()) { out += "+"; }
   out += format_real(z.imag());
   out += "i";
   return out;
}

std::vector<Complex> expand_rule(std::string_view rule, std::size_t count)
{
   const std::string s = normalize_rule(rule);
   std::vector<Complex> out;
   out.reserve(count);

   const auto frac = s.find("/(");
   if (frac != std::string::npos)
   {
      if (s.back() != ')') { parse_fail("rule denominator must be parenthesized", rule); }
      const std::string head = s.substr(0, frac);
      const Complex c = head.empty() ? Complex{1.0, 0.0} : parse_complex(head);
      const auto [a, b] = parse_linear_in_k(s.substr(frac + 2, s.size() - frac - 3), rule);
      for (std::size_t k = 1; k <= count; ++k)
      {
         const Complex den = a * static_cast<double>(k) + b;
         if (den == Complex{}) { parse_fail("rule denominator vanishes", rule); }
         out.push_back(c / den);
      }
      return out;
   }

   if (s.size() > 2 && s.compare(s.size() - 2, 2, "^k") == 0)
   {
      const std::string body = s.substr(0, s.size() - 2);
      Complex c{1.0, 0.0};
      std::string q_text = body;
      // The base is the last factor: "c*q", "c*(q)", "(q)" or "q".
      if (!body.empty() && body.back() == ')')
      {
         const auto open = body.rfind('(');
         if (open == std::string::npos) { parse_fail("unbalanced parentheses in rule", rule); }
         q_text = body.substr(open);
         std::string head = body.substr(0, open);
         if (!head.empty() && head.back() == '*') { head.pop_back(); }
         if (!head.empty()) { c = parse_complex(unparen(head)); }
      }
      else if (const auto star = body.rfind('*'); star != std::string::npos)
      {
         c = parse_complex(unparen(body.substr(0, star)));
         q_text = body.substr(star + 1);
      }
      const Complex q = parse_complex(unparen(q_text));
      Complex power = q;
      for (std::size_t k = 1; k <= count; ++k)
      {
         out.push_back(c * power);
         power *= q;
      }
      return out;
   }
   parse_fail("rule must have the form c/(a*k+b) or c*q^k", rule);
}

Matrix matrix_from_json(const json& rows)
{
   if (!rows.is_array() || rows.empty()) { throw Error(ErrorKind::parse, "matrix must be a nonempty list of rows"); }
   const std::size_t n = rows.size();
   const std::size_t m = rows[0].is_array() ? rows[0].size() : 0;
   Matrix out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
   for (std::size_t i = 0; i < n; ++i)
   {
      if (!rows[i].is_array() || rows[i].size() != m) { throw Error(ErrorKind::parse, "matrix rows must have equal length"); }
      for (std::size_t j = 0; j < m; ++j)
      {
         out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = complex_from_json(rows[i][j], "matrix entry");
      }
   }
   return out;
}

json matrix_to_json(const Matrix& m)
{
   json rows = json::array();
   for (Eigen::Index i = 0; i < m.rows(); ++i)
   {
      json row = json::array();
      for (Eigen::Index j = 0; j < m.cols(); ++j) { row.push_back(format_complex(m(i, j))); }
      rows.push_back(std::move(row));
   }
   return rows;
}

json complex_list_to_json(const std::vector<Complex>& values)
{
   json out = json::array();
   for (const Complex& z : values) { out.push_back(format_complex(z)); }
   return out;
}

OperatorModel model_from_json(const json& spec)
{
   if (!spec.is_object() || !spec.contains("kind") || !spec["kind"].is_string())
   {
      throw Error(ErrorKind::parse, "model spec needs a string field \"kind\"");
   }
   const std::string kind = spec["kind"].get<std::string>();
   if (kind == "diagonal")
   {
      std::vector<Complex> riesz;
      if (spec.contains("riesz"))
      {
         const json& r = spec["riesz"];
         if (r.is_object())
         {
            if (!r.contains("rule") || !r["rule"].is_string() || !r.contains("count") || !r["count"].is_number_unsigned())
            {
               throw Error(ErrorKind::parse, "riesz rule needs \"rule\" (string) and \"count\" (nonnegative integer)");
            }
            riesz = expand_rule(r["rule"].get<std::string>(), r["count"].get<std::size_t>());
         }
         else { riesz = complex_list_from_json(r, "riesz"); }
      }
      std::vector<Complex> invertible;
      if (spec.contains("invertible")) { invertible = complex_list_from_json(spec["invertible"], "invertible"); }
      std::optional<double> gap;
      if (spec.contains("gap")) { gap = real_from_json(spec["gap"], "gap"); }
      return OperatorModel::diagonal(std::move(riesz), std::move(invertible), gap);
   }
   if (kind == "dense")
   {
      if (!spec.contains("entries")) { throw Error(ErrorKind::parse, "dense model needs \"entries\""); }
      return OperatorModel::dense(matrix_from_json(spec["entries"]));
   }
   if (kind == "direct_sum")
   {
      if (!spec.contains("summands") || !spec["summands"].is_array())
      {
         throw Error(ErrorKind::parse, "direct_sum model needs a list \"summands\"");
      }
      std::vector<OperatorModel> parts;
      for (const auto& s : spec["summands"]) { parts.push_back(model_from_json(s)); }
      return OperatorModel::direct_sum(std::move(parts));
   }
   throw Error(ErrorKind::parse, "unknown model kind \"" + kind + "\"");
}

ScalarForcing scalar_forcing_from_json(const json& spec)
{
   if (spec.is_string())
   {
      const std::string s = strip(spec.get<std::string>());
      if (s == "zero") { return PolyForcing{}; }
      if (s.rfind("const", 0) == 0) { return PolyForcing{{parse_complex(s.substr(5))}}; }
      throw Error(ErrorKind::unsupported_forcing, "unknown forcing shorthand \"" + s + "\"");
   }
   if (!spec.is_object() || !spec.contains("type") || !spec["type"].is_string())
   {
      throw Error(ErrorKind::parse, "forcing descriptor needs a string field \"type\"");
   }
   const std::string type = spec["type"].get<std::string>();
   if (type == "poly")
   {
      PolyForcing f;
      if (spec.contains("coeffs")) { f.coeffs = complex_list_from_json(spec["coeffs"], "coeffs"); }
      return f;
   }
   if (type == "trig")
   {
      TrigForcing f;
      if (spec.contains("omega")) { f.omega = real_from_json(spec["omega"], "omega"); }
      if (spec.contains("phase")) { f.phase = real_from_json(spec["phase"], "phase"); }
      if (spec.contains("amp")) { f.amp = complex_from_json(spec["amp"], "amp"); }
      return f;
   }
   throw Error(ErrorKind::unsupported_forcing, "forcing type \"" + type + "\" has no closed-form primitives");
}

Forcing forcing_from_json(const json& spec, std::size_t dim)
{
   if (spec.is_array())
   {
      if (spec.size() != dim)
      {
         throw Error(ErrorKind::invalid_argument, "forcing lists " + std::to_string(spec.size()) +
                                                       " components, model dimension is " + std::to_string(dim));
      }
      Forcing f;
      for (const auto& c : spec) { f.components.push_back(scalar_forcing_from_json(c)); }
      return f;
   }
   return Forcing::uniform(scalar_forcing_from_json(spec), dim);
}

Forcing parse_forcing(std::string_view text, std::size_t dim)
{
   const std::string s = strip(text);
   if (s.empty()) { throw Error(ErrorKind::parse, "empty forcing"); }
   if (s.front() == '{' || s.front() == '[')
   {
      json spec;
      try { spec = json::parse(s); }
      catch (const json::parse_error& e) { throw Error(ErrorKind::parse, std::string("forcing JSON: ") + e.what()); }
      return forcing_from_json(spec, dim);
   }
   if (s == "zero" || s.rfind("const", 0) == 0) { return forcing_from_json(json(s), dim); }
   return forcing_from_json(read_json_file(std::string(text)), dim);
}

Vector parse_vector(std::string_view text, std::size_t dim)
{
   const std::string s = strip(text);
   std::vector<Complex> values;
   std::size_t start = 0;
   for (;;)
   {
      const auto comma = s.find(',', start);
      values.push_back(parse_complex(s.substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
      if (comma == std::string::npos) { break; }
      start = comma + 1;
   }
   Vector out(static_cast<Eigen::Index>(dim));
   if (values.size() == 1) { out.setConstant(values[0]); }
   else if (values.size() == dim)
   {
      for (std::size_t k = 0; k < dim; ++k) { out(static_cast<Eigen::Index>(k)) = values[k]; }
   }
   else
   {
      throw Error(ErrorKind::invalid_argument, "vector has " + std::to_string(values.size()) +
                                                    " entries, model dimension is " + std::to_string(dim));
   }
   return out;
}

std::string fnv1a_hex(std::string_view bytes)
{
   std::uint64_t h = 0xcbf29ce484222325ULL;
   for (unsigned char c : bytes)
   {
      h ^= c;
      h *= 0x100000001b3ULL;
   }
   char buf[17];
   std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
   return buf;
}

json read_json_file(const std::filesystem::path& path)
{
   std::ifstream in(path, std::ios::binary);
   if (!in) { throw Error(ErrorKind::io, "cannot read " + path.string()); }
   std::ostringstream buf;
   buf << in.rdbuf();
   try { return json::parse(buf.str()); }
   catch (const json::parse_error& e) { throw Error(ErrorKind::parse, path.string() + ": " + e.what()); }
}

ModelFile load_model_file(const std::filesystem::path& path)
{
   std::ifstream in(path, std::ios::binary);
   if (!in) { throw Error(ErrorKind::io, "cannot read model file " + path.string()); }
   std::ostringstream buf;
   buf << in.rdbuf();
   const std::string text = buf.str();
   json spec;
   try { spec = json::parse(text); }
   catch (const json::parse_error& e) { throw Error(ErrorKind::parse, path.string() + ": " + e.what()); }
   return ModelFile{model_from_json(spec), spec, fnv1a_hex(text), path};
}

}  // namespace drazinkit
