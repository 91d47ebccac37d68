#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace nilspec::report {

// One declared assertion; pass/fail derives only from the declared
// tolerance, never from anything implicit.
struct Assertion {
  std::string name;
  double value = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  bool relative = true;
  bool pass = false;
};

Assertion check_rel(const std::string& name, double value, double target, double tol);
Assertion check_abs(const std::string& name, double value, double target, double tol);
Assertion check_true(const std::string& name, bool condition);

struct RunReport {
  std::string command;
  std::string version;
  nlohmann::json config;
  nlohmann::json results;
  std::vector<Assertion> assertions;
  nlohmann::json metadata;  // wall time, environment; excluded from golden output

  bool all_pass() const;
  nlohmann::json to_json() const;
};

// Fixed 6-significant-digit float formatting used everywhere a report
// prints a number, so identical reports render byte-identically.
std::string format_number(double v);

// Deterministic text rendering: stable key order, fixed formatting, no
// metadata block.
std::string render(const RunReport& rep);

}  // namespace nilspec::report
