#pragma once

// Config reading and result writing for the tbdkit driver.

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tbdkit/tbdkit.hpp"

namespace tbdkit::cli {

using json = nlohmann::ordered_json;

inline constexpr int schema_version = 1;

class ConfigError : public std::runtime_error {
public:
   using std::runtime_error::runtime_error;
};

inline void check_keys(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where)
{
   if (!obj.is_object()) throw ConfigError(where + ": expected an object");
   for (const auto& [key, _] : obj.items()) {
      bool ok = false;
      for (auto a : allowed) ok = ok || key == a;
      if (!ok) throw ConfigError(where + ": unknown key '" + key + "'");
   }
}

inline double get_number(const json& obj, const std::string& key, double fallback, const std::string& where)
{
   if (!obj.contains(key)) return fallback;
   const json& v = obj.at(key);
   if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
   const double x = v.get<double>();
   if (!std::isfinite(x)) throw ConfigError(where + "." + key + ": expected a finite number");
   return x;
}

inline double get_positive(const json& obj, const std::string& key, double fallback, const std::string& where)
{
   const double x = get_number(obj, key, fallback, where);
   if (!(x > 0.0)) throw ConfigError(where + "." + key + ": must be positive");
   return x;
}

inline long long get_integer(const json& obj, const std::string& key, long long fallback, long long min,
                             const std::string& where)
{
   if (!obj.contains(key)) return fallback;
   const json& v = obj.at(key);
   if (!v.is_number_integer()) throw ConfigError(where + "." + key + ": expected an integer");
   const auto x = v.get<long long>();
   if (x < min) throw ConfigError(where + "." + key + ": must be >= " + std::to_string(min));
   return x;
}

inline bool get_bool(const json& obj, const std::string& key, bool fallback, const std::string& where)
{
   if (!obj.contains(key)) return fallback;
   if (!obj.at(key).is_boolean()) throw ConfigError(where + "." + key + ": expected true or false");
   return obj.at(key).get<bool>();
}

inline std::string get_string(const json& obj, const std::string& key, const std::string& fallback,
                              const std::string& where)
{
   if (!obj.contains(key)) return fallback;
   if (!obj.at(key).is_string()) throw ConfigError(where + "." + key + ": expected a string");
   return obj.at(key).get<std::string>();
}

inline std::vector<double> get_numbers(const json& obj, const std::string& key, std::vector<double> fallback,
                                       const std::string& where)
{
   if (!obj.contains(key)) return fallback;
   const json& v = obj.at(key);
   if (!v.is_array() || v.empty()) throw ConfigError(where + "." + key + ": expected a nonempty array of numbers");
   std::vector<double> out;
   for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError(where + "." + key + ": expected a nonempty array of numbers");
      out.push_back(e.get<double>());
   }
   return out;
}

inline GFunction parse_g(const json& j, const std::string& where)
{
   const std::string kind = get_string(j, "kind", "", where);
   if (kind == "constant") {
      check_keys(j, {"kind", "value"}, where);
      return GFunction::constant(get_number(j, "value", 0.0, where));
   }
   if (kind == "polynomial") {
      check_keys(j, {"kind", "coefficients"}, where);
      return GFunction::polynomial(get_numbers(j, "coefficients", {0.0}, where));
   }
   if (kind == "gaussian") {
      check_keys(j, {"kind", "amplitude", "width"}, where);
      return GFunction::gaussian(get_number(j, "amplitude", 1.0, where), get_positive(j, "width", 1.0, where));
   }
   throw ConfigError(where + ".kind: expected constant, polynomial or gaussian");
}

inline json g_to_json(const GFunction& g)
{
   switch (g.kind) {
   case GFunction::Kind::constant: return {{"kind", "constant"}, {"value", g.amplitude}};
   case GFunction::Kind::polynomial: return {{"kind", "polynomial"}, {"coefficients", g.coefficients}};
   case GFunction::Kind::gaussian: return {{"kind", "gaussian"}, {"amplitude", g.amplitude}, {"width", g.width}};
   }
   return {};
}

inline PotentialSpec parse_potential(const json& j, const std::string& where)
{
   const std::string type = get_string(j, "type", "", where);
   if (type == "zero") {
      check_keys(j, {"type"}, where);
      return potential::Zero{};
   }
   if (type == "constant") {
      check_keys(j, {"type", "v"}, where);
      return potential::Constant{get_number(j, "v", 0.0, where)};
   }
   if (type == "tanh_of_g" || type == "profile") {
      check_keys(j, {"type", "g"}, where);
      if (!j.contains("g")) throw ConfigError(where + ".g: required");
      const GFunction g = parse_g(j.at("g"), where + ".g");
      if (type == "profile") return potential::Profile{g};
      return potential::TanhOfG{g};
   }
   if (type == "yukawa_tanh") {
      check_keys(j, {"type", "g1", "g2", "mu"}, where);
      const double mu = get_number(j, "mu", 1.0, where);
      if (mu < 0.0) throw ConfigError(where + ".mu: must be >= 0");
      return potential::YukawaTanh{get_number(j, "g1", 1.0, where), get_number(j, "g2", 1.0, where), mu};
   }
   throw ConfigError(where + ".type: expected zero, constant, tanh_of_g, yukawa_tanh or profile");
}

inline json potential_to_json(const PotentialSpec& spec)
{
   return std::visit(
      detail::overloaded{
         [](const potential::Zero&) { return json{{"type", "zero"}}; },
         [](const potential::Constant& c) { return json{{"type", "constant"}, {"v", c.v}}; },
         [](const potential::TanhOfG& t) { return json{{"type", "tanh_of_g"}, {"g", g_to_json(t.g)}}; },
         [](const potential::Profile& p) { return json{{"type", "profile"}, {"g", g_to_json(p.g)}}; },
         [](const potential::YukawaTanh& y) {
            return json{{"type", "yukawa_tanh"}, {"g1", y.g1}, {"g2", y.g2}, {"mu", y.mu}};
         },
      },
      spec);
}

struct GridConfig {
   int n = 16;
   double L = 6.0;
   bool offset = true;

   Grid make() const { return Grid(n, L, offset); }
   json to_json() const { return {{"n", n}, {"L", L}, {"offset", offset}}; }
};

inline GridConfig parse_grid(const json& parent, const std::string& key, GridConfig fallback, const std::string& where)
{
   if (!parent.contains(key)) return fallback;
   const json& j = parent.at(key);
   const std::string w = where + "." + key;
   check_keys(j, {"n", "L", "offset"}, w);
   GridConfig g;
   g.n = static_cast<int>(get_integer(j, "n", fallback.n, 2, w));
   if (g.n > 256) throw ConfigError(w + ".n: must be <= 256");
   g.L = get_positive(j, "L", fallback.L, w);
   g.offset = get_bool(j, "offset", fallback.offset, w);
   return g;
}

inline MassPair parse_masses(const json& parent, MassPair fallback, const std::string& where)
{
   if (!parent.contains("masses")) return fallback;
   const json& j = parent.at("masses");
   check_keys(j, {"m1", "m2"}, where + ".masses");
   return MassPair(get_positive(j, "m1", fallback.m1, where + ".masses"),
                   get_positive(j, "m2", fallback.m2, where + ".masses"));
}

// ---------------------------------------------------------------------------
// Output: JSON with numbers at 17 significant digits, and CSV tables.

inline std::string format_number(double x)
{
   if (!std::isfinite(x)) return "null";
   char buf[40];
   std::snprintf(buf, sizeof buf, "%.17g", x);
   return buf;
}

inline void write_json(std::ostream& os, const json& j, int indent = 0)
{
   const std::string pad(static_cast<std::size_t>(indent + 2), ' '), close(static_cast<std::size_t>(indent), ' ');
   switch (j.type()) {
   case json::value_t::object: {
      if (j.empty()) {
         os << "{}";
         return;
      }
      os << "{\n";
      bool first = true;
      for (const auto& [key, value] : j.items()) {
         if (!first) os << ",\n";
         first = false;
         os << pad << json(key).dump() << ": ";
         write_json(os, value, indent + 2);
      }
      os << "\n" << close << "}";
      return;
   }
   case json::value_t::array: {
      if (j.empty()) {
         os << "[]";
         return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
         if (i > 0) os << ",\n";
         os << pad;
         write_json(os, j[i], indent + 2);
      }
      os << "\n" << close << "]";
      return;
   }
   case json::value_t::number_float: os << format_number(j.get<double>()); return;
   default: os << j.dump(); return;
   }
}

inline std::string to_text(const json& j)
{
   std::ostringstream os;
   write_json(os, j);
   os << "\n";
   return os.str();
}

/// A CSV table; complex values go in as two columns (name_re, name_im).
struct Table {
   std::string name;
   std::vector<std::string> header;
   std::vector<std::vector<std::string>> rows;

   Table(std::string n, std::vector<std::string> h) : name(std::move(n)), header(std::move(h)) {}

   class Row {
   public:
      explicit Row(Table& t) : t_(t) {}
      ~Row() { t_.rows.push_back(std::move(cells_)); }
      Row& operator<<(double x)
      {
         cells_.push_back(format_number(x));
         return *this;
      }
      Row& operator<<(std::complex<double> z) { return *this << z.real() << z.imag(); }
      Row& operator<<(long long i)
      {
         cells_.push_back(std::to_string(i));
         return *this;
      }
      Row& operator<<(std::size_t i)
      {
         cells_.push_back(std::to_string(i));
         return *this;
      }
      Row& operator<<(int i) { return *this << static_cast<long long>(i); }
      Row& operator<<(const std::string& s)
      {
         cells_.push_back(s);
         return *this;
      }
      Row& operator<<(const char* s) { return *this << std::string(s); }

   private:
      Table& t_;
      std::vector<std::string> cells_;
   };

   Row row() { return Row(*this); }

   std::string text() const
   {
      std::string out;
      auto line = [&](const std::vector<std::string>& cells) {
         for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + cells[i];
         out += "\n";
      };
      line(header);
      for (const auto& r : rows) line(r);
      return out;
   }
};

inline void write_file(const std::filesystem::path& path, const std::string& text)
{
   std::ofstream f(path, std::ios::binary);
   if (!f) throw std::runtime_error("cannot write " + path.string());
   f << text;
}

inline json four_to_json(const FourVector& v) { return json::array({v.t, v.x, v.y, v.z}); }
inline json vec3_to_json(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }
inline json complex_to_json(std::complex<double> z) { return json::array({z.real(), z.imag()}); }

} // namespace tbdkit::cli
