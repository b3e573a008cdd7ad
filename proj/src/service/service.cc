#include "pivotqg/service/service.h"

#include <cctype>
#include <random>
#include <sstream>

#include "pivotqg/grouping/facets.h"
#include "pivotqg/qg/generator.h"
#include "pivotqg/text/review.h"

namespace pivotqg::service {

using nlohmann::json;

int http_status(Errc code) {
  switch (code) {
    case Errc::EmptyInput:
    case Errc::InvalidUtf8:
    case Errc::BadData:
      return 400;
    case Errc::NotFound:
      return 404;
    case Errc::OverlappingEdits:
    case Errc::UnresolvedFlags:
      return 409;
    case Errc::RangeOutOfBounds:
    case Errc::EmptySpan:
    case Errc::SpanMisaligned:
    case Errc::MalformedTags:
    case Errc::InvalidSpan:
    case Errc::UnknownFormat:
    case Errc::InvalidConfig:
    case Errc::SequenceTooLong:
    case Errc::QuestionTooLong:
    case Errc::NonFiniteInput:
      return 422;
    case Errc::AnnotatorUnavailable:
      return 502;
    case Errc::ModelUnavailable:
      return 503;
    default:
      return 500;
  }
}

Models load_models(const ServiceConfig& config) {
  Models m;
  if (!config.qg_checkpoint.empty()) {
    m.generator = std::make_shared<const qg::QGModel>(qg::QGModel::load(config.qg_checkpoint));
  }
  if (!config.filter_checkpoint.empty()) {
    m.filter = std::make_shared<const filter::SpanScoringModel>(
        filter::SpanScoringModel::load(config.filter_checkpoint));
  }
  if (!config.annotator_url.empty()) {
    m.annotator = std::make_shared<const HttpAnnotator>(
        config.annotator_url,
        std::chrono::milliseconds(static_cast<long>(config.annotator_timeout_s * 1000)));
  }
  return m;
}

namespace {

const json& require_object(const json& body) {
  if (!body.is_object()) throw ApiError(Errc::BadData, "request body must be a JSON object");
  return body;
}

template <typename T>
T field(const json& body, const char* key) {
  if (!body.contains(key)) throw ApiError(Errc::BadData, std::string("missing field '") + key + "'");
  try {
    return body.at(key).get<T>();
  } catch (const json::exception&) {
    throw ApiError(Errc::BadData, std::string("field '") + key + "' has the wrong type");
  }
}

std::string random_id() {
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  std::ostringstream out;
  out << std::hex;
  for (int i = 0; i < 2; ++i) {
    const auto v = rng();
    for (int b = 60; b >= 0; b -= 4) out << ((v >> b) & 0xF);
  }
  return out.str();
}

json tokens_json(const Paragraph& p) {
  json out = json::array();
  for (std::size_t i = 0; i < p.size(); ++i) {
    out.push_back({{"text", p.tokens[i]},
                   {"start", p.token_offsets[i].start},
                   {"end", p.token_offsets[i].end}});
  }
  return out;
}

json flags_json(const std::vector<ReviewFlag>& flags) {
  json out = json::array();
  for (const auto& f : flags) out.push_back(flag_json(f));
  return out;
}

const std::string& current_text(const std::map<std::string, EditHistory>& histories,
                                const std::string& id, const std::string& fallback) {
  auto it = histories.find(id);
  return it == histories.end() || it->second.empty() ? fallback : it->second.back().text;
}

const GeneratedQuestion* find_question(const Session& s, const std::string& qid) {
  for (const auto& f : s.results) {
    for (const auto& m : f.members) {
      for (const auto& q : m.questions) {
        if (q.id == qid) return &q;
      }
    }
  }
  for (const auto& fq : s.filtered_out) {
    if (fq.question.id == qid) return &fq.question;
  }
  return nullptr;
}

const SelectedAnswer* find_answer(const Session& s, const std::string& aid) {
  for (const auto& a : s.selected) {
    if (a.id == aid) return &a;
  }
  return nullptr;
}

json history_view(const std::string& id, const EditHistory& h) {
  json versions = json::array();
  for (std::size_t k = 0; k < h.size(); ++k) {
    versions.push_back(
        {{"version", k}, {"text", h[k].text}, {"timestamp", h[k].timestamp}, {"note", h[k].note}});
  }
  return {{"id", id}, {"versions", std::move(versions)}};
}

void append_version(EditHistory& h, const json& body) {
  require_object(body);
  const auto text = field<std::string>(body, "text");
  bool blank = true;
  for (char c : text) blank = blank && std::isspace(static_cast<unsigned char>(c));
  if (blank) throw ApiError(Errc::EmptyInput, "edited text must not be empty");
  h.push_back({text, now_iso8601(), body.value("note", std::string{})});
}

AnswerSpan resolve_span(const Paragraph& p, const json& spec, std::size_t index) {
  if (!spec.is_object()) throw ApiError(Errc::BadData, "each span must be an object");
  const auto start = field<std::size_t>(spec, "start");
  const auto end = field<std::size_t>(spec, "end");
  if (end <= start) {
    throw ApiError(Errc::InvalidSpan, "span end must exceed its start",
                   {{"index", index}, {"reason", "EmptySpan"}});
  }
  AnswerSpan span;
  try {
    span = validate_custom_span(p, {start, end});
  } catch (const Error& e) {
    throw ApiError(Errc::InvalidSpan, e.what(),
                   {{"index", index}, {"reason", std::string(errc_name(e.code()))}});
  }
  if (spec.contains("source")) {
    try {
      span.source = parse_span_source(spec.at("source").get<std::string>());
    } catch (const std::exception&) {
      throw ApiError(Errc::InvalidSpan, "unknown span source",
                     {{"index", index}, {"reason", "UnknownSource"}});
    }
  }
  return span;
}

}  // namespace

Service::Service(ServiceConfig config, Models models, std::unique_ptr<SessionStore> store)
    : config_(std::move(config)), models_(std::move(models)), store_(std::move(store)) {
  config_.validate();
  if (!models_.annotator) models_.annotator = std::make_shared<const HeuristicAnnotator>();
  if (!store_) store_ = std::make_unique<SessionStore>(config_.db_path);
}

json Service::health() const {
  return {{"status", "ok"},
          {"generator_loaded", models_.generator != nullptr},
          {"filter_loaded", models_.filter != nullptr},
          {"annotator", models_.annotator->name()},
          {"answerability_threshold", config_.answerability_threshold}};
}

std::shared_ptr<std::mutex> Service::lock_for(const std::string& id) {
  std::lock_guard guard(locks_mu_);
  auto& slot = locks_[id];
  if (!slot) slot = std::make_shared<std::mutex>();
  return slot;
}

Session Service::load(const std::string& id) {
  auto s = store_->get(id);
  if (!s) throw ApiError(Errc::NotFound, "no session '" + id + "'", {{"session_id", id}});
  return std::move(*s);
}

void Service::save(Session& session) {
  session.updated_at = now_iso8601();
  store_->put(session);
}

std::vector<AnswerSpan>& Service::cached_candidates(Session& s, CandidateKind kind) {
  const std::string key(candidate_kind_name(kind));
  auto it = s.candidates.find(key);
  if (it == s.candidates.end()) {
    it = s.candidates.emplace(key, extract_candidates(s.paragraph, kind, *models_.annotator)).first;
  }
  return it->second;
}

json Service::facets_view(const Session& s) const {
  json facets = json::array();
  for (const auto& f : apply_knobs(s.results, s.knobs.intra, s.knobs.inter)) {
    json members = json::array();
    for (const auto& m : f.members) {
      json qs = json::array();
      for (const auto& q : m.questions) {
        const std::string original = q.text();
        const std::string& text = current_text(s.question_history, q.id, original);
        qs.push_back({{"id", q.id},
                      {"text", text},
                      {"original_text", original},
                      {"edited", text != original},
                      {"intra_confidence", q.intra_confidence},
                      {"beam_score", q.beam_score},
                      {"truncated", q.truncated}});
      }
      json answer = span_json(m.answer);
      answer["text"] = current_text(s.answer_history, m.answer_id, m.answer.surface);
      answer["original_text"] = m.answer.surface;
      members.push_back({{"answer_id", m.answer_id},
                         {"answer", std::move(answer)},
                         {"inter_confidence", m.inter_confidence},
                         {"questions", std::move(qs)}});
    }
    facets.push_back(
        {{"stem", f.stem}, {"inter_confidence", f.inter_confidence}, {"members", std::move(members)}});
  }
  return facets;
}

json Service::create_session(const json& body) {
  require_object(body);
  const auto text = field<std::string>(body, "text");
  Session s;
  s.flags = review_paragraph(text);  // EmptyInput, InvalidUtf8
  s.id = random_id();
  s.paragraph = tokenize(text, s.id);
  s.knobs = {config_.intra_threshold, config_.inter_threshold};
  s.created_at = now_iso8601();
  {
    auto mu = lock_for(s.id);
    std::lock_guard guard(*mu);
    save(s);
  }
  return {{"session_id", s.id},
          {"flags", flags_json(s.flags)},
          {"ready", s.flags.empty()},
          {"paragraph", s.paragraph.utf8()},
          {"tokens", tokens_json(s.paragraph)}};
}

json Service::get_session(const std::string& id) {
  auto mu = lock_for(id);
  std::lock_guard guard(*mu);
  const Session s = load(id);
  json selected = json::array();
  for (const auto& a : s.selected) {
    json span = span_json(a.span);
    span["id"] = a.id;
    span["text"] = current_text(s.answer_history, a.id, a.span.surface);
    selected.push_back(std::move(span));
  }
  return {{"session_id", s.id},
          {"paragraph", s.paragraph.utf8()},
          {"tokens", tokens_json(s.paragraph)},
          {"flags", flags_json(s.flags)},
          {"ready", s.flags.empty()},
          {"selected", std::move(selected)},
          {"knobs", {{"intra", s.knobs.intra}, {"inter", s.knobs.inter}}},
          {"facets", facets_view(s)},
          {"filtered_out", s.filtered_out.size()},
          {"filter_applied", s.filter_applied},
          {"created_at", s.created_at},
          {"updated_at", s.updated_at},
          {"generated_at", s.generated_at}};
}

json Service::edit_text(const std::string& id, const json& body) {
  require_object(body);
  std::vector<TextEdit> edits;
  const json list = body.value("edits", json::array());
  if (!list.is_array()) throw ApiError(Errc::BadData, "'edits' must be an array");
  for (const auto& e : list) {
    if (!e.is_object()) throw ApiError(Errc::BadData, "each edit must be an object");
    edits.push_back({{field<std::size_t>(e, "start"), field<std::size_t>(e, "end")},
                     field<std::string>(e, "replacement")});
  }
  auto mu = lock_for(id);
  std::lock_guard guard(*mu);
  Session s = load(id);
  const std::string text = apply_edits(s.paragraph.utf8(), std::move(edits));
  s.flags = review_paragraph(text);
  s.paragraph = tokenize(text, s.id);
  s.invalidate_results();
  save(s);
  return {{"session_id", s.id},
          {"flags", flags_json(s.flags)},
          {"ready", s.flags.empty()},
          {"paragraph", s.paragraph.utf8()},
          {"tokens", tokens_json(s.paragraph)}};
}

json Service::candidates(const std::string& id, const std::string& kind_name) {
  CandidateKind kind;
  try {
    kind = parse_candidate_kind(kind_name);
  } catch (const std::exception&) {
    throw ApiError(Errc::UnknownFormat, "kind must be named_entity or noun_phrase",
                   {{"kind", kind_name}});
  }
  auto mu = lock_for(id);
  std::lock_guard guard(*mu);
  Session s = load(id);
  if (!s.flags.empty()) {
    throw ApiError(Errc::UnresolvedFlags, "resolve the review flags first",
                   {{"flags", s.flags.size()}});
  }
  const auto& spans = cached_candidates(s, kind);
  save(s);
  json out = json::array();
  for (std::size_t i = 0; i < spans.size(); ++i) {
    json j = span_json(spans[i]);
    j["id"] = kind_name + ":" + std::to_string(i);
    out.push_back(std::move(j));
  }
  return {{"kind", kind_name}, {"candidates", std::move(out)}};
}

json Service::generate(const std::string& id, const json& body) {
  require_object(body);
  auto mu = lock_for(id);
  std::lock_guard guard(*mu);
  Session s = load(id);
  if (!s.flags.empty()) {
    throw ApiError(Errc::UnresolvedFlags, "resolve the review flags first",
                   {{"flags", s.flags.size()}});
  }

  std::vector<AnswerSpan> spans;
  const json span_list = body.value("spans", json::array());
  if (!span_list.is_array()) throw ApiError(Errc::BadData, "'spans' must be an array");
  for (std::size_t i = 0; i < span_list.size(); ++i) {
    spans.push_back(resolve_span(s.paragraph, span_list[i], i));
  }
  const json ids = body.value("candidate_ids", json::array());
  if (!ids.is_array()) throw ApiError(Errc::BadData, "'candidate_ids' must be an array");
  for (const auto& cid : ids) {
    const std::string text = cid.is_string() ? cid.get<std::string>() : cid.dump();
    const auto colon = text.rfind(':');
    try {
      if (colon == std::string::npos) throw std::invalid_argument("no kind");
      const auto kind = parse_candidate_kind(text.substr(0, colon));
      const auto& cached = cached_candidates(s, kind);
      std::size_t used = 0;
      const std::string index_text = text.substr(colon + 1);
      const unsigned long index = std::stoul(index_text, &used);
      if (used != index_text.size() || index >= cached.size()) throw std::out_of_range("index");
      spans.push_back(cached[index]);
    } catch (const Error& e) {
      if (e.code() == Errc::AnnotatorUnavailable) throw;
      throw ApiError(Errc::InvalidSpan, "unknown candidate id '" + text + "'",
                     {{"candidate_id", text}, {"reason", "UnknownCandidate"}});
    } catch (const std::exception&) {
      throw ApiError(Errc::InvalidSpan, "unknown candidate id '" + text + "'",
                     {{"candidate_id", text}, {"reason", "UnknownCandidate"}});
    }
  }
  if (spans.empty()) {
    throw ApiError(Errc::InvalidSpan, "select at least one answer span", {{"reason", "NoSpans"}});
  }
  if (!models_.generator) {
    throw ApiError(Errc::ModelUnavailable, "no question generation checkpoint is loaded");
  }

  const qg::QGModel& model = *models_.generator;
  const qg::BeamOptions options{static_cast<std::size_t>(config_.beam_width),
                                static_cast<std::size_t>(config_.max_decode_len),
                                model.config().length_normalize};
  auto generated = qg::generate_questions(model, s.paragraph, spans, options);

  s.invalidate_results();
  const std::string stamp = now_iso8601();
  std::vector<AnswerResult> results;
  for (auto& [span, questions] : generated) {
    AnswerResult r;
    r.answer_id = "a" + std::to_string(s.next_answer++);
    r.answer = span;
    s.selected.push_back({r.answer_id, span});
    s.answer_history[r.answer_id] = {{span.surface, stamp, "selected"}};
    for (auto& q : questions) {
      q.id = "q" + std::to_string(s.next_question++);
      s.question_history[q.id] = {{q.text(), stamp, "generated"}};
      if (models_.filter) {
        auto v = filter::is_answerable(*models_.filter, q.text(), s.paragraph,
                                       config_.answerability_threshold);
        if (!v.answerable) {
          s.filtered_out.push_back({std::move(q), r.answer_id, v});
          continue;
        }
      }
      r.questions.push_back(std::move(q));
    }
    results.push_back(std::move(r));
  }
  s.filter_applied = models_.filter != nullptr;
  s.results = group_by_stem(std::move(results));
  s.generated_at = stamp;
  save(s);

  json answers = json::array();
  for (const auto& a : s.selected) {
    json j = span_json(a.span);
    j["id"] = a.id;
    answers.push_back(std::move(j));
  }
  return {{"session_id", s.id},
          {"answers", std::move(answers)},
          {"facets", facets_view(s)},
          {"filtered_out", s.filtered_out.size()},
          {"filter_applied", s.filter_applied},
          {"knobs", {{"intra", s.knobs.intra}, {"inter", s.knobs.inter}}},
          {"generated_at", s.generated_at}};
}

json Service::attention(const std::string& id, const std::string& question_id) {
  auto mu = lock_for(id);
  std::lock_guard guard(*mu);
  const Session s = load(id);
  const GeneratedQuestion* q = find_question(s, question_id);
  if (!q) throw ApiError(Errc::NotFound, "no question '" + question_id + "'");
  json weights = json::array();
  for (Eigen::Index r = 0; r < q->attention.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < q->attention.cols(); ++c) row.push_back(q->attention(r, c));
    weights.push_back(std::move(row));
  }
  return {{"question_id", q->id},
          {"question_tokens", q->tokens},
          {"paragraph_tokens", s.paragraph.tokens},
          {"weights", std::move(weights)}};
}

json Service::edit_question(const std::string& id, const std::string& question_id,
                            const json& body) {
  auto mu = lock_for(id);
  std::lock_guard guard(*mu);
  Session s = load(id);
  auto it = s.question_history.find(question_id);
  if (it == s.question_history.end()) {
    throw ApiError(Errc::NotFound, "no question '" + question_id + "'");
  }
  append_version(it->second, body);
  save(s);
  return history_view(question_id, it->second);
}

json Service::question_history(const std::string& id, const std::string& question_id) {
  auto mu = lock_for(id);
  std::lock_guard guard(*mu);
  const Session s = load(id);
  auto it = s.question_history.find(question_id);
  if (it == s.question_history.end()) {
    throw ApiError(Errc::NotFound, "no question '" + question_id + "'");
  }
  return history_view(question_id, it->second);
}

json Service::edit_answer(const std::string& id, const std::string& answer_id, const json& body) {
  auto mu = lock_for(id);
  std::lock_guard guard(*mu);
  Session s = load(id);
  auto it = s.answer_history.find(answer_id);
  if (it == s.answer_history.end() || !find_answer(s, answer_id)) {
    throw ApiError(Errc::NotFound, "no answer '" + answer_id + "'");
  }
  append_version(it->second, body);
  save(s);
  return history_view(answer_id, it->second);
}

json Service::answer_history(const std::string& id, const std::string& answer_id) {
  auto mu = lock_for(id);
  std::lock_guard guard(*mu);
  const Session s = load(id);
  auto it = s.answer_history.find(answer_id);
  if (it == s.answer_history.end()) throw ApiError(Errc::NotFound, "no answer '" + answer_id + "'");
  return history_view(answer_id, it->second);
}

json Service::set_knobs(const std::string& id, const json& body) {
  require_object(body);
  auto mu = lock_for(id);
  std::lock_guard guard(*mu);
  Session s = load(id);
  Knobs k = s.knobs;
  if (body.contains("intra")) k.intra = field<double>(body, "intra");
  if (body.contains("inter")) k.inter = field<double>(body, "inter");
  auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!unit(k.intra) || !unit(k.inter)) {
    throw ApiError(Errc::RangeOutOfBounds, "knob values must lie in [0, 1]",
                   {{"intra", k.intra}, {"inter", k.inter}});
  }
  s.knobs = k;
  save(s);
  const json facets = facets_view(s);
  std::size_t visible = 0;
  for (const auto& f : facets) {
    for (const auto& m : f.at("members")) visible += m.at("questions").size();
  }
  return {{"knobs", {{"intra", k.intra}, {"inter", k.inter}}},
          {"facets", facets},
          {"visible_questions", visible}};
}

json Service::filtered(const std::string& id) {
  auto mu = lock_for(id);
  std::lock_guard guard(*mu);
  const Session s = load(id);
  json out = json::array();
  for (const auto& fq : s.filtered_out) {
    out.push_back({{"question_id", fq.question.id},
                   {"text", fq.question.text()},
                   {"answer_id", fq.answer_id},
                   {"answer", span_json(fq.question.answer)},
                   {"intra_confidence", fq.question.intra_confidence},
                   {"verdict", verdict_json(fq.verdict)}});
  }
  return {{"filter_applied", s.filter_applied}, {"filtered_out", std::move(out)}};
}

ExportDocument Service::export_session(const std::string& id, const std::string& format) {
  if (format != "json" && format != "text") {
    throw ApiError(Errc::UnknownFormat, "format must be json or text", {{"format", format}});
  }
  auto mu = lock_for(id);
  std::lock_guard guard(*mu);
  const Session s = load(id);
  const auto visible = apply_knobs(s.results, s.knobs.intra, s.knobs.inter);

  if (format == "text") {
    std::string out;
    for (const auto& f : visible) {
      for (const auto& m : f.members) {
        const std::string& answer = current_text(s.answer_history, m.answer_id, m.answer.surface);
        for (const auto& q : m.questions) {
          const std::string original = q.text();
          out += "Q: " + current_text(s.question_history, q.id, original) + "\n";
          out += "A: " + answer + "\n\n";
        }
      }
    }
    return {out, "text/plain; charset=utf-8"};
  }

  json facets = json::array();
  for (const auto& f : visible) {
    json members = json::array();
    for (const auto& m : f.members) {
      json qs = json::array();
      for (const auto& q : m.questions) {
        const std::string original = q.text();
        json history = json::array();
        if (auto it = s.question_history.find(q.id); it != s.question_history.end()) {
          for (const auto& v : it->second) {
            history.push_back({{"text", v.text}, {"timestamp", v.timestamp}});
          }
        }
        qs.push_back({{"text", current_text(s.question_history, q.id, original)},
                      {"intra_confidence", q.intra_confidence},
                      {"beam_score", q.beam_score},
                      {"history", std::move(history)}});
      }
      members.push_back(
          {{"answer",
            {{"text", current_text(s.answer_history, m.answer_id, m.answer.surface)},
             {"start", m.answer.chars.start},
             {"end", m.answer.chars.end},
             {"source", span_source_name(m.answer.source)}}},
           {"questions", std::move(qs)}});
    }
    facets.push_back(
        {{"stem", f.stem}, {"inter_confidence", f.inter_confidence}, {"members", std::move(members)}});
  }
  const json doc = {{"paragraph", s.paragraph.utf8()},
                    {"generated_at", s.generated_at.empty() ? now_iso8601() : s.generated_at},
                    {"facets", std::move(facets)}};
  return {doc.dump(2), "application/json; charset=utf-8"};
}

}  // namespace pivotqg::service
