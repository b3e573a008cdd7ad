#include "pivotqg/service/config.h"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "pivotqg/common/error.h"

namespace pivotqg::service {

using nlohmann::json;

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(Errc::InvalidConfig, "service config: " + what);
}

double parse_double(const std::string& name, const std::string& value) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  require(used == value.size() && !value.empty(), name + " is not a number: '" + value + "'");
  return v;
}

int parse_int(const std::string& name, const std::string& value) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  require(used == value.size() && !value.empty(), name + " is not an integer: '" + value + "'");
  return v;
}

}  // namespace

void ServiceConfig::validate() const {
  auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  require(beam_width > 0, "beam_width must be positive");
  require(max_decode_len > 0, "max_decode_len must be positive");
  require(unit(intra_threshold) && unit(inter_threshold), "knob defaults must lie in [0,1]");
  require(annotator_timeout_s > 0.0, "annotator_timeout_s must be positive");
  require(port >= 0 && port < 65536, "port must be in [0, 65535]");
  require(!db_path.empty(), "db_path must not be empty");
}

void to_json(json& j, const ServiceConfig& c) {
  j = {{"qg_checkpoint", c.qg_checkpoint},
       {"filter_checkpoint", c.filter_checkpoint},
       {"annotator_url", c.annotator_url},
       {"annotator_timeout_s", c.annotator_timeout_s},
       {"beam_width", c.beam_width},
       {"max_decode_len", c.max_decode_len},
       {"intra_threshold", c.intra_threshold},
       {"inter_threshold", c.inter_threshold},
       {"answerability_threshold", c.answerability_threshold},
       {"db_path", c.db_path},
       {"host", c.host},
       {"port", c.port},
       {"cors_origin", c.cors_origin}};
}

void from_json(const json& j, ServiceConfig& c) {
  if (!j.is_object()) throw Error(Errc::InvalidConfig, "service config must be a JSON object");
  json known;
  to_json(known, ServiceConfig{});
  for (const auto& [key, _] : j.items()) {
    require(known.contains(key), "unknown key '" + key + "'");
  }
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) j.at(key).get_to(field);
    };
    get("qg_checkpoint", c.qg_checkpoint);
    get("filter_checkpoint", c.filter_checkpoint);
    get("annotator_url", c.annotator_url);
    get("annotator_timeout_s", c.annotator_timeout_s);
    get("beam_width", c.beam_width);
    get("max_decode_len", c.max_decode_len);
    get("intra_threshold", c.intra_threshold);
    get("inter_threshold", c.inter_threshold);
    get("answerability_threshold", c.answerability_threshold);
    get("db_path", c.db_path);
    get("host", c.host);
    get("port", c.port);
    get("cors_origin", c.cors_origin);
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidConfig, std::string("service config: ") + e.what());
  }
  c.validate();
}

void to_json(json& j, const AppConfig& c) {
  j = {{"qg", c.qg}, {"filter", c.filter}, {"service", c.service}};
}

void from_json(const json& j, AppConfig& c) {
  if (!j.is_object()) throw Error(Errc::InvalidConfig, "config must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (key != "qg" && key != "filter" && key != "service") {
      throw Error(Errc::InvalidConfig, "config: unknown section '" + key + "'");
    }
  }
  if (j.contains("qg")) c.qg = j.at("qg").get<qg::QGConfig>();
  if (j.contains("filter")) c.filter = j.at("filter").get<filter::FilterConfig>();
  if (j.contains("service")) c.service = j.at("service").get<ServiceConfig>();
}

std::optional<std::string> process_env(const std::string& name) {
  if (const char* v = std::getenv(name.c_str())) return std::string(v);
  return std::nullopt;
}

AppConfig load_app_config(const std::string& path, const EnvLookup& env) {
  AppConfig config;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::InvalidConfig, "cannot open config file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    try {
      config = json::parse(text.str()).get<AppConfig>();
    } catch (const json::exception& e) {
      throw Error(Errc::InvalidConfig, "config file '" + path + "': " + e.what());
    }
  }
  const EnvLookup lookup = env ? env : EnvLookup(process_env);
  ServiceConfig& s = config.service;
  auto text = [&](const char* name, std::string& field) {
    if (auto v = lookup(std::string("PIVOTQG_") + name)) field = *v;
  };
  auto real = [&](const char* name, double& field) {
    if (auto v = lookup(std::string("PIVOTQG_") + name)) field = parse_double(name, *v);
  };
  auto integer = [&](const char* name, int& field) {
    if (auto v = lookup(std::string("PIVOTQG_") + name)) field = parse_int(name, *v);
  };
  text("QG_CHECKPOINT", s.qg_checkpoint);
  text("FILTER_CHECKPOINT", s.filter_checkpoint);
  text("ANNOTATOR_URL", s.annotator_url);
  real("ANNOTATOR_TIMEOUT", s.annotator_timeout_s);
  integer("BEAM_WIDTH", s.beam_width);
  integer("MAX_DECODE_LEN", s.max_decode_len);
  real("INTRA_THRESHOLD", s.intra_threshold);
  real("INTER_THRESHOLD", s.inter_threshold);
  real("ANSWERABILITY_THRESHOLD", s.answerability_threshold);
  text("DB_PATH", s.db_path);
  text("HOST", s.host);
  integer("PORT", s.port);
  text("CORS_ORIGIN", s.cors_origin);
  s.validate();
  return config;
}

}  // namespace pivotqg::service
