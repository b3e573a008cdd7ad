#include <httplib.h>

#include <json.hpp>

#include "pivotqg/answers/annotator.h"
#include "pivotqg/common/error.h"

namespace pivotqg {

namespace {

// httplib::Client wants scheme://host[:port]; anything after is a path prefix.
std::pair<std::string, std::string> split_base_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  const auto host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
  const auto path_start = url.find('/', host_start);
  if (path_start == std::string::npos) return {url, ""};
  std::string path = url.substr(path_start);
  while (!path.empty() && path.back() == '/') path.pop_back();
  return {url.substr(0, path_start), path};
}

[[noreturn]] void unavailable(const std::string& why) {
  throw Error(Errc::AnnotatorUnavailable, "annotator unavailable: " + why);
}

}  // namespace

HttpAnnotator::HttpAnnotator(std::string base_url, std::chrono::milliseconds timeout)
    : base_url_(std::move(base_url)), timeout_(timeout) {}

Annotation HttpAnnotator::annotate(const Paragraph& paragraph) const {
  const auto [host, prefix] = split_base_url(base_url_);
  httplib::Client client(host);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);

  const nlohmann::json request = {{"text", paragraph.utf8()}};
  auto res = client.Post(prefix + "/annotate", request.dump(), "application/json");
  if (!res) unavailable(httplib::to_string(res.error()));
  if (res->status != 200) unavailable("HTTP " + std::to_string(res->status));

  Annotation out;
  try {
    const auto body = nlohmann::json::parse(res->body);
    for (const auto& e : body.value("entities", nlohmann::json::array())) {
      out.entities.push_back({{e.at("start").get<std::size_t>(), e.at("end").get<std::size_t>()},
                              e.value("label", std::string("ENTITY"))});
    }
    for (const auto& np : body.value("noun_phrases", nlohmann::json::array())) {
      out.noun_phrases.push_back({np.at("start").get<std::size_t>(),
                                  np.at("end").get<std::size_t>()});
    }
  } catch (const nlohmann::json::exception& e) {
    unavailable(std::string("bad response: ") + e.what());
  }
  return out;
}

}  // namespace pivotqg
