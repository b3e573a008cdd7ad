#include "pivotqg/service/session.h"

#include <chrono>
#include <ctime>
#include <iomanip>
#include <sstream>

#include "pivotqg/common/error.h"

namespace pivotqg::service {

using nlohmann::json;

void Session::invalidate_results() {
  candidates.clear();
  selected.clear();
  results.clear();
  filtered_out.clear();
  filter_applied = false;
  question_history.clear();
  answer_history.clear();
  generated_at.clear();
}

std::string now_iso8601() {
  const auto now = std::chrono::system_clock::now();
  const auto ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%S") << '.' << std::setw(3) << std::setfill('0')
      << ms << 'Z';
  return out.str();
}

json span_json(const AnswerSpan& span) {
  return {{"text", span.surface},
          {"start", span.chars.start},
          {"end", span.chars.end},
          {"first_token", span.tokens.first},
          {"last_token", span.tokens.last},
          {"source", span_source_name(span.source)}};
}

namespace {

AnswerSpan span_from_json(const json& j) {
  AnswerSpan s;
  s.surface = j.at("text").get<std::string>();
  s.chars = {j.at("start").get<std::size_t>(), j.at("end").get<std::size_t>()};
  s.tokens = {j.at("first_token").get<std::size_t>(), j.at("last_token").get<std::size_t>()};
  s.source = parse_span_source(j.at("source").get<std::string>());
  return s;
}

FlagKind parse_flag_kind(const std::string& name) {
  if (name == flag_kind_name(FlagKind::NonAscii)) return FlagKind::NonAscii;
  if (name == flag_kind_name(FlagKind::Url)) return FlagKind::Url;
  throw Error(Errc::BadData, "unknown flag kind '" + name + "'");
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows ? static_cast<Eigen::Index>(j.at(0).size()) : 0;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j.at(static_cast<std::size_t>(r));
    if (static_cast<Eigen::Index>(row.size()) != cols) throw Error(Errc::BadData, "ragged matrix");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
  }
  return m;
}

json question_json(const GeneratedQuestion& q) {
  return {{"id", q.id},
          {"tokens", q.tokens},
          {"beam_score", q.beam_score},
          {"intra_confidence", q.intra_confidence},
          {"truncated", q.truncated},
          {"attention", matrix_json(q.attention)},
          {"answer", span_json(q.answer)}};
}

GeneratedQuestion question_from_json(const json& j) {
  GeneratedQuestion q;
  q.id = j.at("id").get<std::string>();
  q.tokens = j.at("tokens").get<std::vector<std::string>>();
  q.beam_score = j.at("beam_score").get<double>();
  q.intra_confidence = j.at("intra_confidence").get<double>();
  q.truncated = j.at("truncated").get<bool>();
  q.attention = matrix_from_json(j.at("attention"));
  q.answer = span_from_json(j.at("answer"));
  return q;
}

json history_json(const EditHistory& h) {
  json out = json::array();
  for (const auto& v : h) out.push_back({{"text", v.text}, {"timestamp", v.timestamp}, {"note", v.note}});
  return out;
}

EditHistory history_from_json(const json& j) {
  EditHistory h;
  for (const auto& v : j) {
    h.push_back({v.at("text").get<std::string>(), v.at("timestamp").get<std::string>(),
                 v.value("note", std::string{})});
  }
  return h;
}

// JSON numbers cannot hold infinities; they are stored as null.
json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
double from_finite_or_null(const json& j, double fallback) {
  return j.is_null() ? fallback : j.get<double>();
}

}  // namespace

json flag_json(const ReviewFlag& f) {
  return {{"kind", flag_kind_name(f.kind)},
          {"start", f.range.start},
          {"end", f.range.end},
          {"excerpt", f.excerpt},
          {"message", f.message}};
}

json verdict_json(const filter::FilterVerdict& v) {
  return {{"s_null", v.scores.s_null},
          {"s_best", finite_or_null(v.scores.s_best)},
          {"best_span", {v.scores.best_start, v.scores.best_end}},
          {"diff", finite_or_null(v.diff())},
          {"threshold", finite_or_null(v.threshold)},
          {"answerable", v.answerable}};
}

void to_json(json& j, const Session& s) {
  json flags = json::array();
  for (const auto& f : s.flags) flags.push_back(flag_json(f));
  json candidates = json::object();
  for (const auto& [kind, spans] : s.candidates) {
    json list = json::array();
    for (const auto& sp : spans) list.push_back(span_json(sp));
    candidates[kind] = std::move(list);
  }
  json selected = json::array();
  for (const auto& a : s.selected) selected.push_back({{"id", a.id}, {"span", span_json(a.span)}});
  json facets = json::array();
  for (const auto& f : s.results) {
    json members = json::array();
    for (const auto& m : f.members) {
      json qs = json::array();
      for (const auto& q : m.questions) qs.push_back(question_json(q));
      members.push_back({{"answer_id", m.answer_id},
                         {"answer", span_json(m.answer)},
                         {"inter_confidence", m.inter_confidence},
                         {"questions", std::move(qs)}});
    }
    facets.push_back({{"stem", f.stem},
                      {"inter_confidence", f.inter_confidence},
                      {"members", std::move(members)}});
  }
  json filtered = json::array();
  for (const auto& fq : s.filtered_out) {
    filtered.push_back({{"question", question_json(fq.question)},
                        {"answer_id", fq.answer_id},
                        {"verdict", verdict_json(fq.verdict)}});
  }
  json qh = json::object();
  for (const auto& [id, h] : s.question_history) qh[id] = history_json(h);
  json ah = json::object();
  for (const auto& [id, h] : s.answer_history) ah[id] = history_json(h);

  j = {{"id", s.id},
       {"text", s.paragraph.utf8()},
       {"flags", std::move(flags)},
       {"candidates", std::move(candidates)},
       {"selected", std::move(selected)},
       {"results", std::move(facets)},
       {"filtered_out", std::move(filtered)},
       {"filter_applied", s.filter_applied},
       {"knobs", {{"intra", s.knobs.intra}, {"inter", s.knobs.inter}}},
       {"question_history", std::move(qh)},
       {"answer_history", std::move(ah)},
       {"created_at", s.created_at},
       {"updated_at", s.updated_at},
       {"generated_at", s.generated_at},
       {"next_question", s.next_question},
       {"next_answer", s.next_answer}};
}

void from_json(const json& j, Session& s) {
  s.id = j.at("id").get<std::string>();
  s.paragraph = tokenize(j.at("text").get<std::string>(), s.id);
  s.flags.clear();
  for (const auto& f : j.at("flags")) {
    s.flags.push_back({parse_flag_kind(f.at("kind").get<std::string>()),
                       {f.at("start").get<std::size_t>(), f.at("end").get<std::size_t>()},
                       f.at("excerpt").get<std::string>(),
                       f.at("message").get<std::string>()});
  }
  s.candidates.clear();
  for (const auto& [kind, list] : j.at("candidates").items()) {
    auto& out = s.candidates[kind];
    for (const auto& sp : list) out.push_back(span_from_json(sp));
  }
  s.selected.clear();
  for (const auto& a : j.at("selected")) {
    s.selected.push_back({a.at("id").get<std::string>(), span_from_json(a.at("span"))});
  }
  s.results.clear();
  for (const auto& f : j.at("results")) {
    QuestionFacet facet;
    facet.stem = f.at("stem").get<std::string>();
    facet.inter_confidence = f.at("inter_confidence").get<double>();
    for (const auto& m : f.at("members")) {
      FacetMember member;
      member.answer_id = m.at("answer_id").get<std::string>();
      member.answer = span_from_json(m.at("answer"));
      member.inter_confidence = m.at("inter_confidence").get<double>();
      for (const auto& q : m.at("questions")) member.questions.push_back(question_from_json(q));
      facet.members.push_back(std::move(member));
    }
    s.results.push_back(std::move(facet));
  }
  s.filtered_out.clear();
  for (const auto& fq : j.at("filtered_out")) {
    FilteredQuestion out;
    out.question = question_from_json(fq.at("question"));
    out.answer_id = fq.at("answer_id").get<std::string>();
    const auto& v = fq.at("verdict");
    out.verdict.scores.s_null = v.at("s_null").get<double>();
    out.verdict.scores.s_best = from_finite_or_null(v.at("s_best"), -INFINITY);
    out.verdict.scores.best_start = v.at("best_span").at(0).get<std::size_t>();
    out.verdict.scores.best_end = v.at("best_span").at(1).get<std::size_t>();
    out.verdict.threshold = from_finite_or_null(v.at("threshold"), INFINITY);
    out.verdict.answerable = v.at("answerable").get<bool>();
    s.filtered_out.push_back(std::move(out));
  }
  s.filter_applied = j.at("filter_applied").get<bool>();
  s.knobs = {j.at("knobs").at("intra").get<double>(), j.at("knobs").at("inter").get<double>()};
  s.question_history.clear();
  for (const auto& [id, h] : j.at("question_history").items()) s.question_history[id] = history_from_json(h);
  s.answer_history.clear();
  for (const auto& [id, h] : j.at("answer_history").items()) s.answer_history[id] = history_from_json(h);
  s.created_at = j.at("created_at").get<std::string>();
  s.updated_at = j.at("updated_at").get<std::string>();
  s.generated_at = j.at("generated_at").get<std::string>();
  s.next_question = j.at("next_question").get<std::uint64_t>();
  s.next_answer = j.at("next_answer").get<std::uint64_t>();
}

}  // namespace pivotqg::service
