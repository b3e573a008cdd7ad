#pragma once

#include <functional>
#include <optional>
#include <string>

#include <json.hpp>

#include "pivotqg/filter/filter.h"
#include "pivotqg/qg/config.h"

namespace pivotqg::service {

struct ServiceConfig {
  std::string qg_checkpoint;
  std::string filter_checkpoint;      // empty: no answerability filtering
  std::string annotator_url;          // empty: built-in heuristic annotator
  double annotator_timeout_s = 10.0;
  int beam_width = 5;
  int max_decode_len = 30;
  double intra_threshold = 0.0;       // knob defaults for new sessions
  double inter_threshold = 0.0;
  double answerability_threshold = 0.0;  // V
  std::string db_path = "pivotqg_sessions.db";
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string cors_origin = "*";

  void validate() const;  // throws InvalidConfig
};

void to_json(nlohmann::json& j, const ServiceConfig& c);
void from_json(const nlohmann::json& j, ServiceConfig& c);

struct AppConfig {
  qg::QGConfig qg;
  filter::FilterConfig filter;
  ServiceConfig service;
};

void to_json(nlohmann::json& j, const AppConfig& c);
// Sections "qg", "filter" and "service" are each optional.
void from_json(const nlohmann::json& j, AppConfig& c);

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

// Reads `path` (empty: defaults only), then applies PIVOTQG_* overrides:
// QG_CHECKPOINT, FILTER_CHECKPOINT, ANNOTATOR_URL, ANNOTATOR_TIMEOUT,
// BEAM_WIDTH, MAX_DECODE_LEN, INTRA_THRESHOLD, INTER_THRESHOLD,
// ANSWERABILITY_THRESHOLD, DB_PATH, HOST, PORT, CORS_ORIGIN.
AppConfig load_app_config(const std::string& path, const EnvLookup& env = {});

std::optional<std::string> process_env(const std::string& name);

}  // namespace pivotqg::service
