#include "rfclt/json_io.hpp"

#include <cmath>
#include <ctime>
#include <stdexcept>

namespace rfclt {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw std::invalid_argument(where + ": " + what);
}

const Json& require_field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    fail(where, std::string("missing field '") + key + "'");
  }
  return j.at(key);
}

std::int64_t as_int(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  return j.get<std::int64_t>();
}

double as_double(const Json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

}  // namespace

Index index_from_json(const Json& j, int expected_dim, const std::string& where) {
  if (!j.is_array() || j.empty() || j.size() > static_cast<size_t>(kMaxDim)) {
    fail(where, "expected an array of 1.." + std::to_string(kMaxDim) + " integers");
  }
  Index out;
  out.nd = static_cast<int>(j.size());
  for (size_t i = 0; i < j.size(); ++i) {
    out[static_cast<int>(i)] = as_int(j[i], where + "[" + std::to_string(i) + "]");
  }
  if (expected_dim >= 0 && out.nd != expected_dim) {
    fail(where, "expected " + std::to_string(expected_dim) + " components, got " +
                    std::to_string(out.nd));
  }
  return out;
}

Json index_to_json(const Index& v) {
  Json out = Json::array();
  for (int i = 0; i < v.dim(); ++i) out.push_back(v[i]);
  return out;
}

namespace {

InnovationSpec innovations_from_json(const Json& j, const std::string& where) {
  InnovationSpec spec;
  if (j.is_null()) return spec;
  if (!j.is_object()) fail(where, "expected an object");
  if (j.contains("dist")) {
    const std::string d = j.at("dist").get<std::string>();
    if (d == "normal") {
      spec.dist = Distribution::kStandardNormal;
    } else if (d == "rademacher") {
      spec.dist = Distribution::kRademacher;
    } else if (d == "uniform") {
      spec.dist = Distribution::kCenteredUniform;
    } else {
      fail(where + ".dist", "expected one of normal|rademacher|uniform, got '" + d + "'");
    }
  }
  if (j.contains("structure")) {
    const std::string s = j.at("structure").get<std::string>();
    if (s == "iid") {
      spec.structure = Structure::kIid;
    } else if (s == "column-mds") {
      spec.structure = Structure::kColumnMds;
    } else {
      fail(where + ".structure", "expected iid|column-mds, got '" + s + "'");
    }
  }
  if (j.contains("seed")) {
    const Json& s = j.at("seed");
    if (!s.is_number_integer() && !s.is_number_unsigned()) {
      fail(where + ".seed", "expected an integer");
    }
    spec.seed = s.get<std::uint64_t>();
  }
  return spec;
}

}  // namespace

Model model_from_json(const Json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  const std::string kind = require_field(j, "kind", where).get<std::string>();
  const int dim =
      static_cast<int>(as_int(require_field(j, "dim", where), where + ".dim"));
  if (dim < 1 || dim > kMaxDim) {
    fail(where + ".dim", "expected 1.." + std::to_string(kMaxDim));
  }

  Model m;
  m.innovations = innovations_from_json(j.contains("innovations") ? j.at("innovations") : Json(),
                                        where + ".innovations");

  if (kind == "linear") {
    if (j.contains("generator")) {
      const Json& g = j.at("generator");
      const std::string name =
          require_field(g, "name", where + ".generator").get<std::string>();
      if (name != "alternating") {
        fail(where + ".generator.name", "unknown generator '" + name + "'");
      }
      const std::int64_t radius =
          as_int(require_field(g, "radius", where + ".generator"), where + ".generator.radius");
      m.coeffs = alternating_coeffs(dim, radius);
      return m;
    }
    std::vector<std::pair<Index, double>> entries;
    const Json& coeffs = require_field(j, "coeffs", where);
    if (!coeffs.is_array()) fail(where + ".coeffs", "expected an array");
    for (size_t i = 0; i < coeffs.size(); ++i) {
      const std::string ew = where + ".coeffs[" + std::to_string(i) + "]";
      const Json& e = coeffs[i];
      entries.emplace_back(index_from_json(require_field(e, "index", ew), dim, ew + ".index"),
                           as_double(require_field(e, "value", ew), ew + ".value"));
      if (!all_ge(entries.back().first, 0)) fail(ew + ".index", "components must be >= 0");
    }
    m.coeffs = CoeffArray::from_entries(dim, entries);
    return m;
  }
  if (kind == "volterra") {
    std::vector<VolterraEntry> entries;
    const Json& coeffs = require_field(j, "coeffs", where);
    if (!coeffs.is_array()) fail(where + ".coeffs", "expected an array");
    for (size_t i = 0; i < coeffs.size(); ++i) {
      const std::string ew = where + ".coeffs[" + std::to_string(i) + "]";
      const Json& e = coeffs[i];
      const Json& idx = require_field(e, "index", ew);
      if (!idx.is_array() || idx.size() != static_cast<size_t>(2 * dim)) {
        fail(ew + ".index", "expected " + std::to_string(2 * dim) + " components (u then v)");
      }
      VolterraEntry ve;
      ve.u.nd = dim;
      ve.v.nd = dim;
      for (int k = 0; k < dim; ++k) {
        ve.u[k] = as_int(idx[static_cast<size_t>(k)], ew + ".index");
        ve.v[k] = as_int(idx[static_cast<size_t>(dim + k)], ew + ".index");
      }
      ve.value = as_double(require_field(e, "value", ew), ew + ".value");
      if (!all_ge(ve.u, 0) || !all_ge(ve.v, 0)) fail(ew + ".index", "components must be >= 0");
      entries.push_back(ve);
    }
    try {
      m.coeffs = VolterraCoeffs::from_entries(dim, entries);
    } catch (const std::invalid_argument& ex) {
      fail(where + ".coeffs", ex.what());
    }
    return m;
  }
  fail(where + ".kind", "expected linear|volterra, got '" + kind + "'");
}

Json innovations_to_json(const InnovationSpec& spec) {
  Json out;
  switch (spec.dist) {
    case Distribution::kStandardNormal:
      out["dist"] = "normal";
      break;
    case Distribution::kRademacher:
      out["dist"] = "rademacher";
      break;
    case Distribution::kCenteredUniform:
      out["dist"] = "uniform";
      break;
  }
  out["structure"] = spec.structure == Structure::kIid ? "iid" : "column-mds";
  out["seed"] = spec.seed;
  return out;
}

Json model_to_json(const Model& m) {
  Json out;
  out["kind"] = m.is_linear() ? "linear" : "volterra";
  out["dim"] = m.dim();
  Json coeffs = Json::array();
  if (m.is_linear()) {
    const CoeffArray& c = m.linear();
    for_each_index(Index::zeros(c.dim()), c.support_extent - Index::ones(c.dim()),
                   [&](const Index& j) {
                     const double v = c.at(j);
                     if (v == 0.0) return;
                     Json e;
                     e["index"] = index_to_json(j);
                     e["value"] = v;
                     coeffs.push_back(e);
                   });
  } else {
    for (const VolterraEntry& ve : m.volterra().entries) {
      Json e;
      Json idx = index_to_json(ve.u);
      for (int k = 0; k < ve.v.dim(); ++k) idx.push_back(ve.v[k]);
      e["index"] = idx;
      e["value"] = ve.value;
      coeffs.push_back(e);
    }
  }
  out["coeffs"] = coeffs;
  out["innovations"] = innovations_to_json(m.innovations);
  return out;
}

Json report_envelope(const std::string& subcommand, const Json& config,
                     const Json& results, bool with_timestamp) {
  Json out;
  out["schema_version"] = 1;
  out["subcommand"] = subcommand;
  std::string stamp;
  if (with_timestamp) {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    stamp = buf;
  }
  out["timestamp"] = stamp;
  out["config"] = config;
  out["results"] = results;
  return out;
}

}  // namespace rfclt
