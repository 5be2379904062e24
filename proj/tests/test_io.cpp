#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>

#include "json.hpp"

#include "collchsh/io.hpp"

using namespace collchsh;

TEST_CASE("fixed7 renders deterministic decimal strings") {
  REQUIRE(fixed7(0.0) == "0.0000000");
  REQUIRE(fixed7(-0.0) == "0.0000000");  // negative zero is normalized
  REQUIRE(fixed7(1.0) == "1.0000000");
  REQUIRE(fixed7(2.0 * std::sqrt(2.0)) == "2.8284271");
  REQUIRE(fixed7(0.3125) == "0.3125000");
  REQUIRE(fixed7(488.0 / 32768.0) == "0.0148926");
  REQUIRE(fixed7(-1.25) == "-1.2500000");
  REQUIRE(fixed7(1e-8) == "0.0000000");
  REQUIRE(fixed7(-1e-9) == "0.0000000");  // rounds to zero, sign dropped
}

TEST_CASE("fnv1a64 matches the published test vectors") {
  REQUIRE(fnv1a64("") == 0xcbf29ce484222325ULL);
  REQUIRE(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  REQUIRE(fnv1a64("hello") == 0xa430d84680aabd0bULL);
  REQUIRE(fnv1a64("n,x,strategy\n") == 0x2c29e7ceab75d754ULL);
  REQUIRE(to_hex(fnv1a64("")) == "cbf29ce484222325");
  REQUIRE(to_hex(0) == "0000000000000000");
}

TEST_CASE("JsonWriter emits insertion-ordered valid JSON") {
  SECTION("flat object with every field type") {
    JsonWriter w;
    w.begin_object();
    w.field("name", "collchsh");
    w.field("x", 0.5);
    w.field("count", 42);
    w.field("big", static_cast<long long>(1) << 40);
    w.field("seed", static_cast<std::uint64_t>(18446744073709551615ULL));
    w.field("ok", true);
    w.end_object();

    const nlohmann::json j = nlohmann::json::parse(w.str());
    REQUIRE(j["name"] == "collchsh");
    REQUIRE(j["x"] == 0.5);
    REQUIRE(j["count"] == 42);
    REQUIRE(j["big"] == (1LL << 40));
    REQUIRE(j["seed"] == 18446744073709551615ULL);
    REQUIRE(j["ok"] == true);
    // Insertion order is preserved byte-wise.
    REQUIRE(w.str().find("\"name\"") < w.str().find("\"x\""));
    REQUIRE(w.str().find("\"x\"") < w.str().find("\"count\""));
  }

  SECTION("nesting: arrays of objects and scalar elements") {
    JsonWriter w;
    w.begin_object();
    w.begin_array("rows");
    w.begin_object();
    w.field("n", 1);
    w.end_object();
    w.begin_object();
    w.field("n", 2);
    w.end_object();
    w.end_array();
    w.begin_array("values");
    w.element(0.25);
    w.element("tag");
    w.end_array();
    w.end_object();

    const nlohmann::json j = nlohmann::json::parse(w.str());
    REQUIRE(j["rows"].size() == 2);
    REQUIRE(j["rows"][1]["n"] == 2);
    REQUIRE(j["values"][0] == 0.25);
    REQUIRE(j["values"][1] == "tag");
  }

  SECTION("escaping of quotes, backslashes and control characters") {
    JsonWriter w;
    w.begin_object();
    w.field("path", "C:\\data\"x\"\n\tend");
    w.field("bell", std::string(1, '\x07'));
    w.end_object();

    const nlohmann::json j = nlohmann::json::parse(w.str());
    REQUIRE(j["path"] == "C:\\data\"x\"\n\tend");
    REQUIRE(j["bell"] == "\a");
  }
}

TEST_CASE("RunManifest serializes to parseable JSON") {
  RunManifest m;
  m.command = "bound";
  m.parameters = {{"pairs", "2"}, {"x", "0.5000000"}};
  m.seed = 7;
  m.version = "0.1.0";
  m.wall_time_ms = 12.5;
  m.output_checksum = "00ff00ff00ff00ff";

  SECTION("note omitted when empty") {
    const nlohmann::json j = nlohmann::json::parse(m.to_json());
    REQUIRE(j["command"] == "bound");
    REQUIRE(j["parameters"]["pairs"] == "2");
    REQUIRE(j["parameters"]["x"] == "0.5000000");
    REQUIRE(j["seed"] == 7);
    REQUIRE(j["version"] == "0.1.0");
    REQUIRE(j["output_checksum"] == "00ff00ff00ff00ff");
    REQUIRE_FALSE(j.contains("note"));
  }

  SECTION("note included when set") {
    m.note = "cross-checked";
    const nlohmann::json j = nlohmann::json::parse(m.to_json());
    REQUIRE(j["note"] == "cross-checked");
  }
}
