#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "argkg/error.hpp"
#include "argkg/pipeline.hpp"

using namespace argkg;
namespace fs = std::filesystem;

namespace {

struct GlobalOptions {
  std::string config;
  std::string variant;
  std::string mode;
  std::optional<unsigned long long> seed;
  std::optional<int> jobs;
  std::string local_kb;
  std::string output;
};

PipelineConfig load_config(const GlobalOptions& g) {
  if (g.config.empty()) throw ConfigError("--config is required");
  PipelineConfig c = load_pipeline_config(g.config);
  if (!g.variant.empty()) c.variant = variant_from_string(g.variant);
  if (!g.mode.empty()) c.wikidata.mode = client_mode_from_string(g.mode);
  if (g.seed) c.seeds = {*g.seed};
  if (g.jobs) c.jobs = *g.jobs;
  if (!g.output.empty()) c.data.output = g.output;
  c.validate();
  return c;
}

size_t find_topic_instance(const Pipeline& p, const std::string& topic) {
  for (size_t i = 0; i < p.instances().size(); ++i) {
    if (p.instances()[i].topic == topic) return i;
  }
  throw ConfigError("no instance with topic '" + topic + "'");
}

void emit_graph(const SentenceResult& r, const std::string& out, bool dot) {
  if (r.row.skipped) throw DataError("instance skipped: " + r.row.reason);
  std::string text = dot ? graph_to_dot(r.graph) : graph_to_json(r.graph).dump(1) + "\n";
  if (out.empty()) {
    std::cout << text;
  } else {
    write_text(out, text);
  }
}

std::vector<LabeledInstance> split_of(const std::vector<SentenceResult>& results,
                                      const std::string& split) {
  std::vector<LabeledInstance> out;
  for (auto& inst : labeled_instances(results)) {
    if (inst.split == split) out.push_back(std::move(inst));
  }
  return out;
}

void print_evaluation(const Evaluation& e) {
  const auto& c = e.confusion;
  std::printf("accuracy\t%.4f\nmacro_f1\t%.4f\nbinary_f1\t%.4f\n", e.accuracy, e.macro_f1,
              e.binary_f1);
  std::printf("confusion\t%zu %zu / %zu %zu\n", c[0][0], c[0][1], c[1][0], c[1][1]);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evidence-path extraction and argument classification"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--config", g.config, "pipeline config (JSON)");
  app.add_option("--variant", g.variant, "Baseline, WD, WD_LDA, WD_LDA_GV or WD_LDA_GV_OIE");
  app.add_option("--mode", g.mode, "live, record or replay")
      ->check(CLI::IsMember({"live", "record", "replay"}));
  app.add_option("--seed", g.seed, "single classifier seed");
  app.add_option("--jobs", g.jobs, "sentence workers")->check(CLI::PositiveNumber);
  app.add_option("--local-kb", g.local_kb,
                 "answer queries from DIR/triples.tsv and DIR/labels.tsv instead of HTTP")
      ->check(CLI::ExistingDirectory);
  app.add_option("--output", g.output, "output directory (overrides data.output)");

  std::string topic;
  auto* select = app.add_subcommand("select-properties", "property selection for one topic");
  select->add_option("--topic", topic, "topic as written in the dataset")->required();

  size_t index = 0;
  std::string out;
  bool dot = false;
  auto* build = app.add_subcommand("build-graph", "structured graph of one instance");
  auto* enrich_cmd = app.add_subcommand("enrich", "enriched graph of one instance");
  for (auto* cmd : {build, enrich_cmd}) {
    cmd->add_option("--index", index, "dataset row (0-based)")->required();
    cmd->add_option("--out", out, "output file (stdout by default)");
    cmd->add_flag("--dot", dot, "write DOT instead of JSON");
  }

  auto* extract = app.add_subcommand("extract-paths", "graph stages for every instance");

  std::string checkpoint;
  auto* train_cmd = app.add_subcommand("train", "train on the train split");
  train_cmd->add_option("--checkpoint", checkpoint, "output checkpoint")->required();
  auto* eval_cmd = app.add_subcommand("evaluate", "evaluate a checkpoint on the test split");
  eval_cmd->add_option("--checkpoint", checkpoint, "checkpoint to load")
      ->required()
      ->check(CLI::ExistingFile);

  auto* run_cmd = app.add_subcommand("run", "full pipeline and report");

  std::vector<std::string> inputs;
  auto* report_cmd = app.add_subcommand("report", "combine report sidecars into one table");
  report_cmd->add_option("inputs", inputs, "report.json files")
      ->required()
      ->check(CLI::ExistingFile);
  report_cmd->add_option("--out", out, "output file (stdout by default)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*report_cmd) {
      std::vector<RunReport> reports;
      for (const auto& f : inputs) {
        reports.push_back(report_from_json(nlohmann::json::parse(read_file(f))));
      }
      const std::string tsv = reports_to_tsv(reports);
      if (out.empty()) {
        std::cout << tsv;
      } else {
        write_text(out, tsv);
      }
      return 0;
    }

    PipelineConfig config = load_config(g);
    if (*enrich_cmd) config.variant = Variant::WD_LDA_GV_OIE;
    if (*build && config.variant == Variant::WD_LDA_GV_OIE) config.variant = Variant::WD_LDA_GV;
    if ((*build || *enrich_cmd || *select) && config.variant == Variant::Baseline) {
      throw ConfigError("the Baseline variant builds no graph");
    }
    std::unique_ptr<Transport> transport;
    if (!g.local_kb.empty()) {
      transport = std::make_unique<LocalKbTransport>(fs::path(g.local_kb) / "triples.tsv",
                                                     fs::path(g.local_kb) / "labels.tsv");
    }
    Pipeline pipeline(config, std::move(transport));

    if (*select) {
      const auto& inst = pipeline.instances()[find_topic_instance(pipeline, topic)];
      const TopicResources& r = pipeline.topic_resources(inst.topic);
      if (!r.error.empty()) throw DataError(r.error);
      std::cerr << "topic words:";
      for (const auto& w : r.selection.topic_words) std::cerr << ' ' << w;
      std::cerr << "\nranked words:";
      for (const auto& w : r.selection.ranked_words) std::cerr << ' ' << w;
      std::cerr << '\n';
      for (const auto& p : r.properties) std::cout << p << '\n';
      return 0;
    }
    if (*build || *enrich_cmd) {
      if (index >= pipeline.instances().size()) throw ConfigError("--index out of range");
      pipeline.topic_resources(pipeline.instances()[index].topic);
      emit_graph(pipeline.process(index), out, dot);
      return 0;
    }
    if (*run_cmd) {
      RunReport report = pipeline.run();
      std::cout << reports_to_tsv({report});
      for (const auto& n : report.notes) std::cerr << "note: " << n << '\n';
      return 0;
    }

    auto results = pipeline.process_all();
    if (*extract) {
      const fs::path dir = config.data.output / to_string(config.variant) / "paths";
      nlohmann::json rows = nlohmann::json::array();
      for (const auto& r : results) {
        char name[32];
        std::snprintf(name, sizeof name, "%06zu.json", r.row.index);
        nlohmann::json pj = {{"index", r.row.index},
                             {"topic", r.row.topic},
                             {"sentence", r.row.sentence},
                             {"paths", paths_to_json(r.paths)}};
        write_text(dir / name, pj.dump(1) + "\n");
        rows.push_back(row_to_json(r.row, config.timing));
      }
      std::cout << rows.dump(1) << '\n';
      return 0;
    }

    const ModelMode mode =
        config.variant == Variant::Baseline ? ModelMode::Baseline : ModelMode::WithPaths;
    TokenEmbedder embedder(pipeline.vectors(), config.classifier.token_embedding_size);
    if (*train_cmd) {
      ClassifierHyperparams hp = config.classifier;
      hp.seed = config.seeds.front();
      TrainResult tr = train(split_of(results, config.train_split), hp, mode, embedder);
      save_checkpoint(tr.params, checkpoint);
      for (size_t e = 0; e < tr.log.epoch_loss.size(); ++e) {
        std::printf("epoch %zu\tloss %.6f\ttrain_acc %.4f\n", e + 1, tr.log.epoch_loss[e],
                    tr.log.epoch_accuracy[e]);
      }
      return 0;
    }
    if (*eval_cmd) {
      ClassifierParams params = load_checkpoint(checkpoint);
      if (params.mode != mode) throw ConfigError("checkpoint mode does not match the variant");
      print_evaluation(evaluate(params, split_of(results, config.test_split), embedder));
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
