#include "nldelta/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <nlohmann/json.hpp>

namespace nldelta {
namespace {

using nlohmann::json;

json parse(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // what() reads "[json.exception.parse_error.101] parse error at line L, column C: ..."
    std::string msg = e.what();
    if (auto pos = msg.find("] "); pos != std::string::npos) msg = msg.substr(pos + 2);
    throw ValidationError("json", msg);
  }
}

void only_keys(const json& obj, const std::string& field, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ValidationError(field, "expected an object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed) known = known || item.key() == key;
    if (!known) throw ValidationError(field + "." + item.key(), "unknown key");
  }
}

double number(const json& obj, const char* key, const std::string& field) {
  if (!obj.contains(key)) throw ValidationError(field + "." + key, "missing");
  const json& v = obj.at(key);
  if (!v.is_number()) throw ValidationError(field + "." + key, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ValidationError(field + "." + key, "not finite");
  return x;
}

double number_or(const json& obj, const char* key, const std::string& field, double fallback) {
  return obj.contains(key) ? number(obj, key, field) : fallback;
}

// [re, im] or a bare real number.
Complex complex_value(const json& v, const std::string& field) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw ValidationError(field, "expected a number or [re, im]");
  return {v[0].get<double>(), v[1].get<double>()};
}

const json& centers_array(const json& doc) {
  if (!doc.contains("centers")) throw ValidationError("centers", "missing");
  const json& arr = doc.at("centers");
  if (!arr.is_array()) throw ValidationError("centers", "expected an array");
  if (arr.empty()) throw ValidationError("centers", "at least one center is required");
  return arr;
}

}  // namespace

ScatteringProblem ScatterConfig::problem(std::optional<double> k_override) const {
  const std::optional<double> kk = k_override ? k_override : k;
  if (!kk) throw ValidationError("k", "missing (give it in the config or on the command line)");
  return validate_and_sort(centers, *kk, amplitude, incidence);
}

ScatterConfig parse_scatter_config(std::string_view text) {
  const json doc = parse(text);
  only_keys(doc, "config", {"centers", "k", "A", "incidence"});

  ScatterConfig cfg;
  const json& arr = centers_array(doc);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string field = "centers[" + std::to_string(i) + "]";
    only_keys(arr[i], field, {"c", "z", "alpha"});
    if (!arr[i].contains("z")) throw ValidationError(field + ".z", "missing");
    const double c = number(arr[i], "c", field);
    const Complex z = complex_value(arr[i].at("z"), field + ".z");
    const double alpha = number_or(arr[i], "alpha", field, 0.0);
    cfg.centers.push_back(DeltaCenter::power_law(c, z, alpha));
  }
  if (doc.contains("k")) cfg.k = number(doc, "k", "config");
  if (doc.contains("A")) cfg.amplitude = complex_value(doc.at("A"), "A");
  if (doc.contains("incidence")) {
    const json& side = doc.at("incidence");
    if (side == "left") {
      cfg.incidence = Incidence::Left;
    } else if (side == "right") {
      cfg.incidence = Incidence::Right;
    } else {
      throw ValidationError("incidence", "expected \"left\" or \"right\"");
    }
  }
  // Field-level checks happen here so a bad file fails before any solve.
  if (cfg.k) {
    cfg.problem();
  } else {
    validate_and_sort(cfg.centers, 1.0, cfg.amplitude, cfg.incidence);
  }
  return cfg;
}

BoundProblem parse_bound_config(std::string_view text) {
  const json doc = parse(text);
  only_keys(doc, "config", {"centers"});
  const json& arr = centers_array(doc);
  std::vector<BoundCenter> centers;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string field = "centers[" + std::to_string(i) + "]";
    only_keys(arr[i], field, {"c", "omega", "alpha"});
    centers.push_back({number(arr[i], "c", field), number(arr[i], "omega", field),
                       number_or(arr[i], "alpha", field, 0.0)});
  }
  return validate_bound_problem(std::move(centers));
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path + ": cannot open for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError(path + ": read failed");
  return buf.str();
}

}  // namespace nldelta
