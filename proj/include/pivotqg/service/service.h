#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <utility>

#include <json.hpp>

#include "pivotqg/answers/annotator.h"
#include "pivotqg/common/error.h"
#include "pivotqg/filter/filter.h"
#include "pivotqg/qg/model.h"
#include "pivotqg/service/config.h"
#include "pivotqg/service/session.h"
#include "pivotqg/service/store.h"

namespace pivotqg::service {

/// Error carrying structured details for the response body.
class ApiError : public Error {
 public:
  ApiError(Errc code, const std::string& message, nlohmann::json details = nlohmann::json::object())
      : Error(code, message), details_(std::move(details)) {}
  const nlohmann::json& details() const { return details_; }

 private:
  nlohmann::json details_;
};

int http_status(Errc code);

struct Models {
  std::shared_ptr<const qg::QGModel> generator;              // null: 503 on generate
  std::shared_ptr<const filter::SpanScoringModel> filter;    // null: no filtering
  std::shared_ptr<const Annotator> annotator;                // null: heuristic
};

// Loads the checkpoints named in `config`; empty paths stay null.
Models load_models(const ServiceConfig& config);

struct ExportDocument {
  std::string body;
  std::string content_type;
};

/// The workbench operations, independent of HTTP. Each call takes a JSON
/// request body where one exists and returns the JSON response body.
/// Failures raise Error or ApiError. Calls on one session are serialized.
class Service {
 public:
  Service(ServiceConfig config, Models models, std::unique_ptr<SessionStore> store);

  nlohmann::json health() const;

  nlohmann::json create_session(const nlohmann::json& body);
  nlohmann::json get_session(const std::string& id);
  nlohmann::json edit_text(const std::string& id, const nlohmann::json& body);
  nlohmann::json candidates(const std::string& id, const std::string& kind);
  nlohmann::json generate(const std::string& id, const nlohmann::json& body);
  nlohmann::json attention(const std::string& id, const std::string& question_id);
  nlohmann::json edit_question(const std::string& id, const std::string& question_id,
                               const nlohmann::json& body);
  nlohmann::json question_history(const std::string& id, const std::string& question_id);
  nlohmann::json edit_answer(const std::string& id, const std::string& answer_id,
                             const nlohmann::json& body);
  nlohmann::json answer_history(const std::string& id, const std::string& answer_id);
  nlohmann::json set_knobs(const std::string& id, const nlohmann::json& body);
  nlohmann::json filtered(const std::string& id);
  ExportDocument export_session(const std::string& id, const std::string& format);

  const ServiceConfig& config() const { return config_; }

 private:
  std::shared_ptr<std::mutex> lock_for(const std::string& id);
  Session load(const std::string& id);
  void save(Session& session);
  std::vector<AnswerSpan>& cached_candidates(Session& s, CandidateKind kind);
  nlohmann::json facets_view(const Session& s) const;

  ServiceConfig config_;
  Models models_;
  std::unique_ptr<SessionStore> store_;
  std::mutex locks_mu_;
  std::unordered_map<std::string, std::shared_ptr<std::mutex>> locks_;
};

}  // namespace pivotqg::service
