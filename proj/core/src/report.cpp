#include "nilspec/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "nilspec/version.hpp"

namespace nilspec::report {

Assertion check_rel(const std::string& name, double value, double target, double tol) {
  Assertion a;
  a.name = name;
  a.value = value;
  a.target = target;
  a.tolerance = tol;
  a.relative = true;
  double scale = std::max(std::abs(target), 1e-300);
  a.pass = std::abs(value - target) <= tol * scale;
  return a;
}

Assertion check_abs(const std::string& name, double value, double target, double tol) {
  Assertion a;
  a.name = name;
  a.value = value;
  a.target = target;
  a.tolerance = tol;
  a.relative = false;
  a.pass = std::abs(value - target) <= tol;
  return a;
}

Assertion check_true(const std::string& name, bool condition) {
  Assertion a;
  a.name = name;
  a.value = condition ? 1.0 : 0.0;
  a.target = 1.0;
  a.tolerance = 0.0;
  a.relative = false;
  a.pass = condition;
  return a;
}

bool RunReport::all_pass() const {
  for (const auto& a : assertions)
    if (!a.pass) return false;
  return true;
}

nlohmann::json RunReport::to_json() const {
  nlohmann::json j;
  j["command"] = command;
  j["version"] = version.empty() ? nilspec::version : version;
  j["config"] = config;
  j["results"] = results;
  nlohmann::json asserts = nlohmann::json::array();
  for (const auto& a : assertions) {
    asserts.push_back({{"name", a.name},
                       {"value", a.value},
                       {"target", a.target},
                       {"tolerance", a.tolerance},
                       {"relative", a.relative},
                       {"pass", a.pass}});
  }
  j["assertions"] = asserts;
  j["metadata"] = metadata;
  return j;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

namespace {

void render_value(std::ostream& os, const std::string& path, const nlohmann::json& v) {
  if (v.is_object()) {
    for (auto it = v.begin(); it != v.end(); ++it)
      render_value(os, path.empty() ? it.key() : path + "." + it.key(), it.value());
  } else if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i)
      render_value(os, path + "[" + std::to_string(i) + "]", v[i]);
  } else if (v.is_number_float()) {
    os << "  " << path << " = " << format_number(v.get<double>()) << "\n";
  } else {
    os << "  " << path << " = " << v.dump() << "\n";
  }
}

}  // namespace

std::string render(const RunReport& rep) {
  std::ostringstream os;
  os << "nilspec " << rep.command << " (version "
     << (rep.version.empty() ? nilspec::version : rep.version) << ")\n";
  os << "config:\n";
  render_value(os, "", rep.config);
  os << "results:\n";
  render_value(os, "", rep.results);
  if (!rep.assertions.empty()) {
    os << "assertions:\n";
    for (const auto& a : rep.assertions) {
      os << "  " << (a.pass ? "PASS" : "FAIL") << " " << a.name << ": value "
         << format_number(a.value) << ", target " << format_number(a.target) << ", "
         << (a.relative ? "rel" : "abs") << " tolerance " << format_number(a.tolerance)
         << "\n";
    }
  }
  os << "status: " << (rep.all_pass() ? "PASS" : "FAIL") << "\n";
  return os.str();
}

}  // namespace nilspec::report
