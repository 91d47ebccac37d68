#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "nilspec/report.hpp"

using namespace nilspec::report;

namespace {

RunReport sample_report() {
  RunReport rep;
  rep.command = "weyl";
  rep.config = {{"manifold", "torus2"}, {"N", 64}};
  rep.results = {{"exponent", 0.997123456}, {"constant", 0.0795774715}};
  rep.assertions.push_back(check_rel("exponent", 0.997123456, 1.0, 0.05));
  rep.metadata = {{"wall_time_s", 1.234}};
  return rep;
}

}  // namespace

TEST_CASE("rendering is deterministic and excludes metadata") {
  auto rep = sample_report();
  std::string a = render(rep);
  std::string b = render(rep);
  CHECK(a == b);
  CHECK(a.find("wall_time") == std::string::npos);
  CHECK(a.find("PASS exponent") != std::string::npos);
  CHECK(a.find("status: PASS") != std::string::npos);

  // Changing volatile metadata does not change the rendering.
  rep.metadata["wall_time_s"] = 99.9;
  CHECK(render(rep) == a);
}

TEST_CASE("failed assertions render FAIL with the violated tolerance") {
  RunReport rep = sample_report();
  rep.assertions.push_back(check_rel("constant", 0.10, 1.0 / (4.0 * M_PI), 0.05));
  std::string text = render(rep);
  CHECK(text.find("FAIL constant") != std::string::npos);
  CHECK(text.find("status: FAIL") != std::string::npos);
  CHECK(!rep.all_pass());
}

TEST_CASE("six significant digit formatting") {
  CHECK(format_number(0.0795774715) == "0.0795775");
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(123456789.0) == "1.23457e+08");
}

TEST_CASE("json layout carries assertions and metadata") {
  auto j = sample_report().to_json();
  CHECK(j["command"] == "weyl");
  CHECK(j["assertions"][0]["pass"] == true);
  CHECK(j.contains("metadata"));
  CHECK(j["version"].get<std::string>() == std::string(nilspec::version));
}
