#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "pivotqg/common/error.h"
#include "pivotqg/filter/filter.h"
#include "pivotqg/qg/generator.h"
#include "pivotqg/qg/trainer.h"
#include "pivotqg/service/config.h"
#include "pivotqg/service/http.h"
#include "pivotqg/service/session.h"
#include "pivotqg/text/review.h"
#include "pivotqg/text/squad.h"

namespace {

using nlohmann::json;
using namespace pivotqg;

std::string read_text_arg(const std::string& arg) {
  if (arg.empty() || arg.front() != '@') return arg;
  std::ifstream in(arg.substr(1));
  if (!in) throw Error(Errc::NotFound, "cannot read '" + arg.substr(1) + "'");
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::vector<CharRange> parse_answers(const std::string& spec) {
  std::vector<CharRange> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw Error(Errc::BadData, "answer '" + item + "' is not start:end");
    try {
      out.push_back({std::stoul(item.substr(0, colon)), std::stoul(item.substr(colon + 1))});
    } catch (const std::exception&) {
      throw Error(Errc::BadData, "answer '" + item + "' is not start:end");
    }
  }
  if (out.empty()) throw Error(Errc::InvalidSpan, "no answer spans given");
  return out;
}

int train_qg(const std::string& data_path, const std::string& config_path, const std::string& out) {
  const auto app = service::load_app_config(config_path);
  const auto squad = load_squad(data_path);
  const auto data = qg::examples_from_squad(squad, static_cast<std::size_t>(app.qg.max_source_len));
  std::cerr << "training examples: " << data.size() << "\n";
  qg::QGModel model(app.qg, qg::build_vocabulary(data, static_cast<std::size_t>(app.qg.vocab_size)));
  if (!app.qg.embeddings_path.empty()) {
    const auto covered = model.load_embeddings(app.qg.embeddings_path);
    std::cerr << "pretrained vectors cover " << covered << " entries\n";
  }
  qg::train(model, data, [](const qg::EpochStats& s) {
    std::cerr << "epoch " << s.epoch << " loss " << s.mean_loss << " lr " << s.learning_rate
              << " n " << s.examples << "\n";
  });
  model.save(out);
  std::cerr << "saved " << out << "\n";
  return 0;
}

int generate(const std::string& ckpt, const std::string& text_arg, const std::string& answers,
             int beam_width, int max_len) {
  const std::string text = read_text_arg(text_arg);
  const auto flags = review_paragraph(text);
  if (!flags.empty()) {
    json j = json::array();
    for (const auto& f : flags) j.push_back(service::flag_json(f));
    std::cerr << "resolve these flags before generating:\n" << j.dump(2) << "\n";
    return 2;
  }
  const auto model = qg::QGModel::load(ckpt);
  const Paragraph paragraph = tokenize(text);
  std::vector<AnswerSpan> spans;
  for (const auto& r : parse_answers(answers)) spans.push_back(validate_custom_span(paragraph, r));
  qg::BeamOptions options = qg::beam_options(model.config());
  if (beam_width > 0) options.beam_width = static_cast<std::size_t>(beam_width);
  if (max_len > 0) options.max_len = static_cast<std::size_t>(max_len);
  json out = json::array();
  for (const auto& [span, questions] : qg::generate_questions(model, paragraph, spans, options)) {
    json qs = json::array();
    for (const auto& q : questions) {
      qs.push_back({{"text", q.text()},
                    {"beam_score", q.beam_score},
                    {"intra_confidence", q.intra_confidence},
                    {"truncated", q.truncated}});
    }
    out.push_back({{"answer", service::span_json(span)}, {"questions", std::move(qs)}});
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

int calibrate(const filter::SpanScoringModel& model, const std::string& validation_path) {
  const auto data = filter::filter_examples_from_squad(load_squad(validation_path));
  const auto cal = filter::calibrate_threshold(filter::calibration_points(model, data));
  std::cout << json{{"threshold", cal.degenerate ? json(nullptr) : json(cal.threshold)},
                    {"accuracy", cal.accuracy},
                    {"degenerate", cal.degenerate},
                    {"examples", data.size()}}
                   .dump()
            << "\n";
  if (cal.degenerate) {
    std::cerr << "validation set has a single class; the threshold is not identifiable\n";
    return 3;
  }
  return 0;
}

int train_filter(const std::string& data_path, const std::string& config_path,
                 const std::string& out, const std::string& validation_path) {
  const auto app = service::load_app_config(config_path);
  const auto data = filter::filter_examples_from_squad(load_squad(data_path));
  std::cerr << "training examples: " << data.size() << "\n";
  auto vocab = filter::filter_vocabulary(data, static_cast<std::size_t>(app.filter.vocab_size));
  filter::SpanScoringModel model(
      app.filter, std::make_unique<filter::ToyContextEncoder>(app.filter, std::move(vocab)));
  for (const auto& s : filter::finetune_filter(model, data)) {
    std::cerr << "epoch " << s.epoch << " loss " << s.mean_loss << " n " << s.examples << "\n";
  }
  model.save(out);
  std::cerr << "saved " << out << "\n";
  return validation_path.empty() ? 0 : calibrate(model, validation_path);
}

int serve(const std::string& config_path, int port) {
  auto app = service::load_app_config(config_path);
  if (port >= 0) app.service.port = port;
  app.service.validate();
  auto models = service::load_models(app.service);
  auto svc = std::make_shared<service::Service>(
      app.service, std::move(models), std::make_unique<service::SessionStore>(app.service.db_path));
  service::HttpServer server(svc);
  std::cerr << "listening on " << app.service.host << ":" << app.service.port << "\n";
  server.listen(app.service.host, app.service.port);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pivotqg: answer-aware question generation workbench"};
  app.require_subcommand(1);

  std::string data, config, out, ckpt, text, answers, validation;
  int beam_width = 0, max_len = 0, port = -1;

  auto* tq = app.add_subcommand("train-qg", "Train the question generator on SQuAD-format data");
  tq->add_option("--data", data, "SQuAD-format JSON")->required()->check(CLI::ExistingFile);
  tq->add_option("--config", config, "AppConfig JSON (qg section is used)");
  tq->add_option("--out", out, "Checkpoint path")->required();

  auto* gen = app.add_subcommand("generate", "Generate questions for answer spans");
  gen->add_option("--ckpt", ckpt, "Generator checkpoint")->required()->check(CLI::ExistingFile);
  gen->add_option("--text", text, "Paragraph text, or @file")->required();
  gen->add_option("--answers", answers, "Code-point spans start:end[,start:end...]")->required();
  gen->add_option("--beam-width", beam_width, "Override the checkpoint beam width");
  gen->add_option("--max-len", max_len, "Override the maximum question length");

  auto* tf = app.add_subcommand("train-filter", "Fine-tune the answerability filter");
  tf->add_option("--data", data, "SQuAD 2.0-format JSON")->required()->check(CLI::ExistingFile);
  tf->add_option("--config", config, "AppConfig JSON (filter section is used)");
  tf->add_option("--out", out, "Checkpoint path")->required();
  tf->add_option("--validation", validation, "Also calibrate V on this set")
      ->check(CLI::ExistingFile);

  auto* cal = app.add_subcommand("calibrate-threshold", "Pick V on a validation set");
  cal->add_option("--ckpt", ckpt, "Filter checkpoint")->required()->check(CLI::ExistingFile);
  cal->add_option("--validation", validation, "SQuAD 2.0-format JSON")
      ->required()
      ->check(CLI::ExistingFile);

  auto* srv = app.add_subcommand("serve", "Run the HTTP service");
  srv->add_option("--config", config, "AppConfig JSON");
  srv->add_option("--port", port, "Override the configured port");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*tq) return train_qg(data, config, out);
    if (*gen) return generate(ckpt, text, answers, beam_width, max_len);
    if (*tf) return train_filter(data, config, out, validation);
    if (*cal) return calibrate(filter::SpanScoringModel::load(ckpt), validation);
    if (*srv) return serve(config, port);
  } catch (const pivotqg::Error& e) {
    std::cerr << "error [" << pivotqg::errc_name(e.code()) << "]: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
