#include <doctest.h>

#include <string>
#include <vector>

#include "rfclt/json_io.hpp"
#include "rfclt/lattice.hpp"
#include "rfclt/models.hpp"

using namespace rfclt;

namespace {

// Returns the invalid_argument message, or "" if fn does not throw.
template <class Fn>
std::string error_of(Fn&& fn) {
  try {
    fn();
  } catch (const std::invalid_argument& ex) {
    return ex.what();
  }
  return {};
}

bool mentions(const std::string& msg, const std::string& needle) {
  return msg.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("index json round trip and diagnostics") {
  const Json j = Json::parse(R"([2,-1,3])");
  const Index v = index_from_json(j, 3, "cfg.origin");
  CHECK(v == Index{2, -1, 3});
  CHECK(index_to_json(v) == j);

  CHECK(mentions(error_of([&] { index_from_json(j, 2, "cfg.origin"); }),
                 "cfg.origin"));
  CHECK(mentions(error_of([] { index_from_json(Json::parse("[]"), -1, "x"); }),
                 "x"));
  CHECK(mentions(error_of([] { index_from_json(Json::parse("[1,2,3,4,5]"), -1, "x"); }),
                 "x"));
  CHECK(mentions(error_of([] { index_from_json(Json::parse(R"([1,"a"])"), -1, "x"); }),
                 "x[1]"));
}

TEST_CASE("linear model round trip preserves coefficients and innovations") {
  const Json j = Json::parse(R"({
    "kind": "linear", "dim": 2,
    "coeffs": [{"index":[0,0],"value":0.5},
               {"index":[2,1],"value":-0.25}],
    "innovations": {"dist":"rademacher","structure":"column-mds","seed":7}
  })");
  const Model m = model_from_json(j);
  CHECK(m.is_linear());
  CHECK(m.dim() == 2);
  CHECK(m.linear().support_extent == Index{3, 2});
  CHECK(m.linear().at(Index{0, 0}) == doctest::Approx(0.5));
  CHECK(m.linear().at(Index{2, 1}) == doctest::Approx(-0.25));
  CHECK(m.linear().at(Index{1, 0}) == 0.0);
  CHECK(m.innovations.dist == Distribution::kRademacher);
  CHECK(m.innovations.structure == Structure::kColumnMds);
  CHECK(m.innovations.seed == 7);

  const Model back = model_from_json(model_to_json(m));
  CHECK(back.linear().support_extent == m.linear().support_extent);
  for_each_index(Index{0, 0}, Index{2, 1}, [&](const Index& idx) {
    CHECK(back.linear().at(idx) == m.linear().at(idx));
  });
  CHECK(back.innovations.dist == m.innovations.dist);
  CHECK(back.innovations.structure == m.innovations.structure);
  CHECK(back.innovations.seed == m.innovations.seed);
  // Serialization is deterministic byte-for-byte.
  CHECK(model_to_json(m).dump() == model_to_json(back).dump());
}

TEST_CASE("innovations default to iid standard normal with seed 0") {
  const Model m = model_from_json(Json::parse(
      R"({"kind":"linear","dim":1,"coeffs":[{"index":[0],"value":1.0}]})"));
  CHECK(m.innovations.dist == Distribution::kStandardNormal);
  CHECK(m.innovations.structure == Structure::kIid);
  CHECK(m.innovations.seed == 0);
}

TEST_CASE("generator form builds the alternating family") {
  const Model m = model_from_json(Json::parse(R"({
    "kind":"linear","dim":1,
    "generator":{"name":"alternating","radius":8}
  })"));
  const CoeffArray want = alternating_coeffs(1, 8);
  CHECK(m.linear().support_extent == want.support_extent);
  for_each_index(Index::zeros(1), want.support_extent - Index::ones(1),
                 [&](const Index& idx) {
                   CHECK(m.linear().at(idx) == doctest::Approx(want.at(idx)).epsilon(1e-12));
                 });
  CHECK(mentions(error_of([] {
          model_from_json(Json::parse(
              R"({"kind":"linear","dim":1,"generator":{"name":"nope","radius":8}})"));
        }),
        "generator.name"));
}

TEST_CASE("volterra model round trip") {
  const Json j = Json::parse(R"({
    "kind":"volterra","dim":2,
    "coeffs":[{"index":[0,1,1,0],"value":0.5},
              {"index":[1,2,2,1],"value":-1.0}],
    "innovations":{"dist":"normal","structure":"iid","seed":3}
  })");
  const Model m = model_from_json(j);
  CHECK(!m.is_linear());
  CHECK(m.volterra().entries.size() == 2);
  CHECK(m.volterra().lookup(Index{0, 1}, Index{1, 0}) == doctest::Approx(0.5));
  CHECK(m.volterra().lookup(Index{1, 2}, Index{2, 1}) == doctest::Approx(-1.0));

  const Model back = model_from_json(model_to_json(m));
  CHECK(model_to_json(back).dump() == model_to_json(m).dump());
}

TEST_CASE("model parse errors carry a field path") {
  CHECK(mentions(error_of([] { model_from_json(Json::parse(R"({"dim":2})")); }),
                 "kind"));
  CHECK(mentions(error_of([] {
          model_from_json(Json::parse(R"({"kind":"spline","dim":2,"coeffs":[]})"));
        }),
        "model.kind"));
  CHECK(mentions(error_of([] {
          model_from_json(Json::parse(R"({"kind":"linear","dim":9,"coeffs":[]})"));
        }),
        "model.dim"));
  // Wrong index arity inside an entry points at the entry.
  CHECK(mentions(error_of([] {
          model_from_json(Json::parse(
              R"({"kind":"linear","dim":2,"coeffs":[{"index":[1],"value":1.0}]})"));
        }),
        "coeffs[0].index"));
  CHECK(mentions(error_of([] {
          model_from_json(Json::parse(
              R"({"kind":"linear","dim":2,"coeffs":[{"index":[-1,0],"value":1.0}]})"));
        }),
        "coeffs[0].index"));
  // Volterra index needs 2*dim components and u != v.
  CHECK(mentions(error_of([] {
          model_from_json(Json::parse(
              R"({"kind":"volterra","dim":2,"coeffs":[{"index":[0,1,1],"value":1.0}]})"));
        }),
        "coeffs[0].index"));
  CHECK(mentions(error_of([] {
          model_from_json(Json::parse(
              R"({"kind":"volterra","dim":1,"coeffs":[{"index":[2,2],"value":1.0}]})"));
        }),
        "model.coeffs"));
  CHECK(mentions(error_of([] {
          model_from_json(Json::parse(
              R"({"kind":"linear","dim":1,"coeffs":[{"index":[0],"value":1.0}],
                  "innovations":{"dist":"poisson"}})"));
        }),
        "innovations.dist"));
  CHECK(mentions(error_of([] {
          model_from_json(Json::parse(
              R"({"kind":"linear","dim":1,"coeffs":[{"index":[0],"value":1.0}],
                  "innovations":{"structure":"rowwise"}})"));
        }),
        "innovations.structure"));
}

TEST_CASE("report envelope carries schema version and stable key order") {
  Json cfg;
  cfg["model"] = "stub";
  Json results;
  results["value"] = 1.5;

  const Json rep = report_envelope("clt-test", cfg, results, false);
  CHECK(rep.at("schema_version") == 1);
  CHECK(rep.at("subcommand") == "clt-test");
  CHECK(rep.at("timestamp") == "");
  CHECK(rep.at("config") == cfg);
  CHECK(rep.at("results") == results);

  std::vector<std::string> keys;
  for (const auto& item : rep.items()) keys.push_back(item.key());
  CHECK(keys == std::vector<std::string>{"schema_version", "subcommand", "timestamp",
                                         "config", "results"});

  const Json stamped = report_envelope("clt-test", cfg, results, true);
  const std::string ts = stamped.at("timestamp").get<std::string>();
  REQUIRE(ts.size() == 20);  // RFC 3339 UTC, e.g. 2026-01-02T03:04:05Z
  CHECK(ts[4] == '-');
  CHECK(ts[10] == 'T');
  CHECK(ts.back() == 'Z');
}
