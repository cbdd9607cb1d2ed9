#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

#include "hsagg/vectors.hpp"

using namespace hsagg;

namespace {

const std::string kBundle = std::string(HSAGG_DATA_DIR) + "/example_k5.json";

bool check_named(const std::vector<CheckResult>& checks, const std::string& name) {
  for (auto& c : checks)
    if (c.name == name) return c.ok;
  return false;
}

std::string temp_path(const char* stem) {
  return std::string("/tmp/") + stem + ".json";
}

}  // namespace

TEST_CASE("reference bundle loads with the advertised shape") {
  VectorFile vf = load_vector_file(kBundle);
  CHECK(vf.p == 13);
  CHECK(vf.K == 5);
  CHECK(vf.d == 3);
  CHECK(vf.s == 1);
  CHECK(vf.q == 3);
  CHECK(vf.L == 2);
  CHECK(vf.G_S.rows() == 5);
  CHECK(vf.G_S.cols() == 3);
  CHECK(vf.expected_messages.size() == 15);
  CHECK(vf.expected_relays.size() == 5);
  CHECK(vf.code.combos.size() == 5);
  CHECK(vf.code.segment_len == 2);
  CHECK(vf.expected_decodes == std::vector<std::uint32_t>{1, 2, 3, 4, 5});
  CHECK(vf.rate_R1 == Rat(3, 2));
  CHECK(vf.rate_R2 == Rat(1, 2));
  CHECK(vf.rate_RSsum == Rat(3, 2));
}

TEST_CASE("reference bundle passes every check") {
  VectorFile vf = load_vector_file(kBundle);
  auto checks = verify_example(vf);
  REQUIRE(checks.size() == 8);
  for (auto& c : checks) {
    INFO(c.name, ": ", c.detail);
    CHECK(c.ok);
  }
}

TEST_CASE("save and reload round-trips every field") {
  VectorFile vf = load_vector_file(kBundle);
  auto path = temp_path("roundtrip_bundle");
  save_vector_file(vf, path);
  VectorFile back = load_vector_file(path);
  CHECK(back.G_S == vf.G_S);
  CHECK(back.key_mixing == vf.key_mixing);
  CHECK(back.expected_messages.size() == vf.expected_messages.size());
  for (std::size_t i = 0; i < vf.expected_messages.size(); ++i) {
    CHECK(back.expected_messages[i].m == vf.expected_messages[i].m);
    CHECK(back.expected_messages[i].k == vf.expected_messages[i].k);
    CHECK(back.expected_messages[i].theta == vf.expected_messages[i].theta);
    CHECK(back.expected_messages[i].key == vf.expected_messages[i].key);
  }
  for (std::size_t i = 0; i < vf.code.combos.size(); ++i) {
    CHECK(back.code.combos[i].pattern == vf.code.combos[i].pattern);
    CHECK(back.code.combos[i].C == vf.code.combos[i].C);
  }
  CHECK(back.rate_RS == vf.rate_RS);
  auto checks = verify_example(back);
  for (auto& c : checks) CHECK(c.ok);
  std::remove(path.c_str());
}

TEST_CASE("a perturbed combination matrix fails exactly the dependent checks") {
  VectorFile vf = load_vector_file(kBundle);
  vf.code.combos[0].C.set(0, 1, (vf.code.combos[0].C.at(0, 1) + 1) % 13);
  auto checks = verify_example(vf);
  CHECK(check_named(checks, "config"));
  CHECK(check_named(checks, "generator"));
  CHECK_FALSE(check_named(checks, "recovery"));
  CHECK(check_named(checks, "messages"));
}

TEST_CASE("a perturbed message display fails the message check only") {
  VectorFile vf = load_vector_file(kBundle);
  vf.expected_messages[0].key = (vf.expected_messages[0].key + 1) % 13;
  auto checks = verify_example(vf);
  CHECK(check_named(checks, "recovery"));
  CHECK_FALSE(check_named(checks, "messages"));
  CHECK(check_named(checks, "relays"));
  CHECK(check_named(checks, "decodes"));
}

TEST_CASE("a perturbed generator row cascades through dependent checks") {
  VectorFile vf = load_vector_file(kBundle);
  vf.G_S.set(4, 0, (vf.G_S.at(4, 0) + 1) % 13);
  auto checks = verify_example(vf);
  CHECK_FALSE(check_named(checks, "generator"));
  CHECK_FALSE(check_named(checks, "key_mixing"));
}

TEST_CASE("wrong rates are reported") {
  VectorFile vf = load_vector_file(kBundle);
  vf.rate_R1 = Rat(2);
  auto checks = verify_example(vf);
  CHECK_FALSE(check_named(checks, "rates"));
  CHECK(check_named(checks, "recovery"));
}

TEST_CASE("loading a missing or malformed file throws") {
  CHECK_THROWS_AS(load_vector_file("/tmp/does_not_exist_bundle.json"), std::runtime_error);
  auto path = temp_path("malformed_bundle");
  std::ofstream out(path);
  out << "{\"p\": 13";
  out.close();
  CHECK_THROWS_AS(load_vector_file(path), std::runtime_error);
  std::remove(path.c_str());
}
