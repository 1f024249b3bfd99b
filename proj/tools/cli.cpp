#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "run_config.hpp"
#include "vsg/dataset.hpp"
#include "vsg/embedding.hpp"
#include "vsg/error.hpp"
#include "vsg/log.hpp"
#include "vsg/model.hpp"
#include "vsg/planner.hpp"
#include "vsg/scene_graph_io.hpp"
#include "vsg/synthetic.hpp"
#include "vsg/training.hpp"

namespace vsg::cli {
namespace {

namespace fs = std::filesystem;

const std::vector<std::string> kSubcommands{"generate", "fit-pca",  "train",           "eval",
                                            "predict",  "plan",     "compare-planners"};

constexpr const char* kVariabilityKey = "variability";

void require_directory(const fs::path& p, const std::string& what) {
  if (!fs::is_directory(p)) throw IoError(what + " '" + p.string() + "' does not exist");
}

void require_file(const fs::path& p, const std::string& what) {
  if (!fs::is_regular_file(p)) throw IoError(what + " '" + p.string() + "' does not exist");
}

void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

void echo_config(std::ostream& out, const Json& config) { out << "config: " << config.dump() << '\n'; }

Split parse_split(const std::string& text) {
  try {
    return split_from_string(text);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

std::pair<std::size_t, std::size_t> parse_range(const std::string& text) {
  const auto dots = text.find("..");
  auto number = [&](std::string_view s) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
      throw UsageError("--n-range expects <min>..<max>, got '" + text + "'");
    }
    return v;
  };
  if (dots == std::string::npos) {
    const auto v = number(text);
    return {v, v};
  }
  const auto lo = number(std::string_view(text).substr(0, dots));
  const auto hi = number(std::string_view(text).substr(dots + 2));
  if (lo == 0 || hi < lo) throw UsageError("--n-range needs 1 <= min <= max, got '" + text + "'");
  return {lo, hi};
}

// Options whose value is only applied when given on the command line.
class Overrides {
 public:
  template <typename T>
  void add(CLI::App* app, const std::string& flag, const std::string& help,
           std::function<void(RunConfig&, const T&)> apply) {
    auto value = std::make_shared<T>();
    CLI::Option* opt = app->add_option(flag, *value, help);
    entries_.push_back([opt, value, apply](RunConfig& c) {
      if (opt->count() > 0) apply(c, *value);
    });
  }
  void apply(RunConfig& config) const {
    for (const auto& e : entries_) e(config);
  }

 private:
  std::vector<std::function<void(RunConfig&)>> entries_;
};

void add_run_overrides(CLI::App* app, Overrides& o) {
  o.add<std::string>(app, "--architecture", "delta_vsg or mlp",
                     [](RunConfig& c, const std::string& v) { c.model.architecture = v; });
  o.add<std::size_t>(app, "--hidden-dim", "hidden width",
                     [](RunConfig& c, const std::size_t& v) { c.model.hidden_dim = v; });
  o.add<std::size_t>(app, "--pca-dim", "embedding width",
                     [](RunConfig& c, const std::size_t& v) { c.model.pca_dim = v; });
  o.add<std::string>(app, "--tau", "edge radius in metres, pNN percentile or inf",
                     [](RunConfig& c, const std::string& v) { c.model.tau = v; });
  o.add<std::string>(app, "--gate", "elementwise or scalar",
                     [](RunConfig& c, const std::string& v) { c.model.gate = gate_mode_from_string(v); });
  o.add<std::size_t>(app, "--epochs", "training epochs",
                     [](RunConfig& c, const std::size_t& v) { c.train.epochs = v; });
  o.add<std::size_t>(app, "--batch-size", "graphs per batch",
                     [](RunConfig& c, const std::size_t& v) { c.train.batch_size = v; });
  o.add<double>(app, "--lr", "Adam learning rate",
                [](RunConfig& c, const double& v) { c.train.learning_rate = v; });
  o.add<double>(app, "--dropout", "dropout rate",
                [](RunConfig& c, const double& v) { c.train.dropout_rate = v; });
  o.add<std::size_t>(app, "--patience", "early stopping patience, 0 disables",
                     [](RunConfig& c, const std::size_t& v) { c.train.patience = v; });
  o.add<std::uint64_t>(app, "--seed", "training seed",
                       [](RunConfig& c, const std::uint64_t& v) { c.train.seed = v; });
  o.add<double>(app, "--gamma", "focal loss exponent",
                [](RunConfig& c, const double& v) { c.loss.gamma = v; });
  o.add<double>(app, "--epsilon", "displacement threshold in metres",
                [](RunConfig& c, const double& v) { c.labels.epsilon = v; });
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
  std::string spec;
  std::string out;
  std::uint64_t seed = 0;
  std::size_t environments = 0;
  std::size_t scans = 0;
};

void run_generate(const GenerateArgs& a, std::ostream& out) {
  require_file(a.spec, "generator spec");
  auto spec = load_generator_spec(a.spec);
  if (a.environments > 0) spec.num_environments = a.environments;
  if (a.scans > 0) spec.num_scans = a.scans;
  echo_config(out, Json{{"command", "generate"},
                        {"spec", a.spec},
                        {"out", a.out},
                        {"seed", a.seed},
                        {"generator", Json::parse(format_generator_spec(spec))}});
  const auto data = generate_synthetic_dataset(spec, a.seed);
  save_synthetic_dataset(data, a.out);
  const auto stats = label_statistics(samples_for(data.dataset, Split::kTrain, {}));
  std::size_t scans = 0;
  for (const auto& env : data.dataset.environments) scans += env.scans.size();
  out << "environments=" << data.dataset.environments.size() << " scans=" << scans
      << " train_positive_rates=" << stats.positive_rate(kPosition) << ','
      << stats.positive_rate(kState) << ',' << stats.positive_rate(kInstance) << '\n';
}

struct FitPcaArgs {
  std::string input;
  std::string out;
  std::size_t dim = 120;
  std::string split = "train";
};

void run_fit_pca(const FitPcaArgs& a, std::ostream& out) {
  const auto split = parse_split(a.split);
  echo_config(out, Json{{"command", "fit-pca"},
                        {"input", a.input},
                        {"out", a.out},
                        {"dim", a.dim},
                        {"split", a.split}});
  require_directory(a.input, "dataset directory");
  const auto dataset = load_dataset(a.input);
  const auto scans = scans_for(dataset, split);
  const auto encoded = encode_nodes(scans, dataset.taxonomy);
  std::size_t dim = a.dim;
  const auto limit = static_cast<std::size_t>(std::min(encoded.rows(), encoded.cols()));
  if (dim > limit) {
    warn("pca_dim " + std::to_string(dim) + " exceeds what the data supports; using " +
         std::to_string(limit));
    dim = limit;
  }
  const auto pca = fit_pca(encoded, dim);
  ensure_parent(a.out);
  save_pca_model(pca, a.out);
  out << "input_dim=" << pca.input_dim() << " output_dim=" << pca.output_dim()
      << " retained_variance=" << pca.retained_variance() << '\n';
}

struct TrainArgs {
  std::string data;
  std::string config;
  std::string out;
  std::string pca;
  std::string report;
};

void run_train(const TrainArgs& a, const Overrides& overrides, std::ostream& out) {
  RunConfig config;
  if (!a.config.empty()) config = load_run_config(a.config);
  overrides.apply(config);
  validate(config);

  std::optional<PcaModel> pca;
  if (!a.pca.empty()) {
    pca = load_pca_model(a.pca);
    config.model.pca_dim = pca->output_dim();
  }
  Json resolved{{"command", "train"},
                {"data", a.data},
                {"config_file", a.config.empty() ? Json(nullptr) : Json(a.config)},
                {"out", a.out},
                {"pca_file", a.pca.empty() ? Json(nullptr) : Json(a.pca)}};
  const Json sections = to_json(config);
  for (const auto& [key, value] : sections.items()) resolved[key] = value;
  echo_config(out, resolved);

  require_directory(a.data, "dataset directory");
  const auto dataset = load_dataset(a.data);
  TrainResult result = [&] {
    if (!pca) return train(dataset, config.model, config.train, config.loss, config.labels);
    const auto train_samples = samples_for(dataset, Split::kTrain, config.labels);
    if (train_samples.empty()) throw TrainingError("the train split has no samples");
    const auto val_samples = samples_for(dataset, Split::kVal, config.labels);
    const auto train_scans = scans_for(dataset, Split::kTrain);
    const auto width = dataset.taxonomy.num_classes() + dataset.taxonomy.num_attributes();
    if (width != pca->input_dim()) {
      throw DimensionError("PCA model expects " + std::to_string(pca->input_dim()) +
                           "-dimensional node vectors, the dataset taxonomy gives " +
                           std::to_string(width));
    }
    const EdgeConfig edges{resolve_tau(TauSetting::parse(config.model.tau), train_scans),
                           config.model.include_semantic_edges};
    return train_on_samples(train_samples, val_samples, dataset.taxonomy, *pca, edges,
                            config.model, config.train, config.loss);
  }();

  ensure_parent(a.out);
  save_checkpoint(result.model, a.out);
  const auto report = format_training_report(result.report);
  if (!a.report.empty()) {
    ensure_parent(a.report);
    write_text_file(a.report, report);
  }
  out << report;
}

struct EvalArgs {
  std::string ckpt;
  std::string data;
  std::string report;
  std::string sweep;
  std::string split = "test";
  double threshold = 0.5;
  double epsilon = LabelConfig{}.epsilon;
};

void run_eval(const EvalArgs& a, std::ostream& out) {
  const auto split = parse_split(a.split);
  if (!(a.threshold > 0.0 && a.threshold < 1.0)) throw UsageError("--threshold must be in (0, 1)");
  LabelConfig labels;
  labels.epsilon = a.epsilon;
  echo_config(out, Json{{"command", "eval"},
                        {"ckpt", a.ckpt},
                        {"data", a.data},
                        {"report", a.report},
                        {"sweep", a.sweep.empty() ? Json(nullptr) : Json(a.sweep)},
                        {"split", a.split},
                        {"threshold", a.threshold},
                        {"labels", to_json(labels)}});
  require_file(a.ckpt, "checkpoint");
  require_directory(a.data, "dataset directory");
  const auto model = load_checkpoint(a.ckpt);
  const auto dataset = load_dataset(a.data);
  const auto samples = samples_for(dataset, split, labels);
  const auto report = evaluate(model, samples, a.threshold);
  const auto csv = format_evaluation_csv(report);
  ensure_parent(a.report);
  write_text_file(a.report, csv);
  if (!a.sweep.empty()) {
    ensure_parent(a.sweep);
    write_text_file(a.sweep, format_threshold_sweep_csv(report));
  }
  out << csv;
}

struct PredictArgs {
  std::string ckpt;
  std::string scene;
  std::string out;
};

SceneGraph load_scene_for(const VsgModel& model, const fs::path& scene) {
  try {
    return load_scene_graph(scene, model.taxonomy());
  } catch (const TaxonomyError& e) {
    throw CheckpointError("scene '" + scene.string() + "' does not fit the checkpoint taxonomy '" +
                          model.taxonomy().name() + "': " + e.what());
  }
}

void run_predict(const PredictArgs& a, std::ostream& out) {
  echo_config(out, Json{{"command", "predict"}, {"ckpt", a.ckpt}, {"scene", a.scene}, {"out", a.out}});
  require_file(a.ckpt, "checkpoint");
  require_file(a.scene, "scene file");
  const auto model = load_checkpoint(a.ckpt);
  const auto graph = load_scene_for(model, a.scene);
  const auto prediction = model.predict(graph);
  std::vector<NodeAnnotation> annotations;
  for (std::size_t i = 0; i < graph.num_nodes(); ++i) {
    annotations.push_back({{"p_position", prediction.position(i)},
                           {"p_state", prediction.state(i)},
                           {"p_instance", prediction.instance(i)}});
  }
  ensure_parent(a.out);
  write_text_file(a.out, format_scene_graph(graph, model.taxonomy(), annotations, kVariabilityKey));
  out << "nodes=" << graph.num_nodes() << " written=" << a.out << '\n';
}

struct PlanArgs {
  std::string ckpt;
  std::string scene;
  std::string realized;
  std::size_t n = 1;
};

void print_route(std::ostream& out, const EpisodeResult& r, const SceneGraph& map,
                 const Taxonomy& taxonomy, std::span<const double> scores) {
  for (std::size_t k = 0; k < r.visit_order.size(); ++k) {
    const auto row = *map.find(r.visit_order[k]);
    const auto& node = map.nodes()[row];
    char line[160];
    std::snprintf(line, sizeof(line), "%zu,%llu,%s,%.6f,%.6f,%.6f,%.6f\n", k + 1,
                  static_cast<unsigned long long>(node.id.value),
                  taxonomy.classes()[node.class_index].c_str(), node.position.x(),
                  node.position.y(), node.position.z(), scores[row]);
    out << line;
  }
}

void run_plan(const PlanArgs& a, std::ostream& out) {
  if (a.n == 0) throw UsageError("--n must be at least 1");
  echo_config(out, Json{{"command", "plan"},
                        {"ckpt", a.ckpt},
                        {"scene", a.scene},
                        {"realized", a.realized.empty() ? Json(nullptr) : Json(a.realized)},
                        {"n", a.n},
                        {"start", "centroid"}});
  require_file(a.ckpt, "checkpoint");
  require_file(a.scene, "scene file");
  if (!a.realized.empty()) require_file(a.realized, "realized scene file");
  const auto model = load_checkpoint(a.ckpt);
  const auto map = load_scene_for(model, a.scene);
  const auto realized = a.realized.empty() ? map : load_scene_for(model, a.realized);
  const auto episode = make_episode(map, realized, a.n);
  const auto scores = variability_scores(model, map);
  const auto vsg = run_vsg_planner(episode, scores, model.taxonomy());

  out << "step,id,class,x,y,z,score\n";
  print_route(out, vsg, map, model.taxonomy(), scores);
  char line[200];
  if (a.realized.empty()) {
    std::snprintf(line, sizeof(line), "route_distance=%.6f objects=%zu\n", vsg.distance,
                  vsg.visit_order.size());
    out << line;
    return;
  }
  const auto coverage = run_coverage(episode, model.taxonomy());
  std::snprintf(line, sizeof(line),
                "vsg_distance=%.6f vsg_changes_found=%zu coverage_distance=%.6f "
                "coverage_changes_found=%zu infeasible=%s\n",
                vsg.distance, vsg.changes_found, coverage.distance, coverage.changes_found,
                vsg.infeasible ? "true" : "false");
  out << line;
}

struct CompareArgs {
  std::string data;
  std::string ckpt;
  std::string out;
  std::string n_range = "1..5";
  std::size_t per_n = 30;
  std::uint64_t seed = 0;
  std::string split = "test";
  double epsilon = LabelConfig{}.epsilon;
};

void run_compare(const CompareArgs& a, std::ostream& out) {
  const auto [n_min, n_max] = parse_range(a.n_range);
  const auto split = parse_split(a.split);
  if (a.per_n == 0) throw UsageError("--seeds must be at least 1");
  LabelConfig labels;
  labels.epsilon = a.epsilon;
  echo_config(out, Json{{"command", "compare-planners"},
                        {"data", a.data},
                        {"ckpt", a.ckpt},
                        {"out", a.out},
                        {"n_min", n_min},
                        {"n_max", n_max},
                        {"episodes_per_n", a.per_n},
                        {"seed", a.seed},
                        {"split", a.split},
                        {"labels", to_json(labels)},
                        {"start", "centroid"}});
  require_file(a.ckpt, "checkpoint");
  require_directory(a.data, "dataset directory");
  const auto model = load_checkpoint(a.ckpt);
  const auto dataset = load_dataset(a.data);
  const auto episodes = sample_episodes(dataset, split, n_min, n_max, a.per_n, a.seed, labels);
  const auto summary = run_benchmark(episodes, dataset.taxonomy, model_scorer(model), labels);
  const auto csv = format_benchmark_csv(summary);
  ensure_parent(a.out);
  write_text_file(a.out, csv);
  out << csv;
  char line[200];
  std::snprintf(line, sizeof(line),
                "episodes=%zu infeasible=%zu win_fraction=%.6f speedup=%.6f "
                "episode_speedup=%.6f\n",
                summary.episodes, summary.infeasible, summary.win_fraction, summary.speedup,
                summary.episode_speedup);
  out << line;
}

std::string quoted(const std::string& text) { return Json(text).dump(); }

void report_error(std::ostream& err, const std::string& kind, const std::string& message) {
  err << "error: kind=" << kind << " message=" << quoted(message) << '\n';
}

std::string subcommand_list() {
  std::string s;
  for (const auto& name : kSubcommands) s += (s.empty() ? "" : ", ") + name;
  return s;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Variable scene graph toolkit: learn object change likelihoods and plan change "
               "detection routes.",
               "vsg"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "generate a synthetic dataset");
  generate->add_option("--spec", gen.spec, "generator spec (JSON)")->required();
  generate->add_option("--out", gen.out, "output dataset directory")->required();
  generate->add_option("--seed", gen.seed, "generator seed")->capture_default_str();
  generate->add_option("--environments", gen.environments, "override the environment count");
  generate->add_option("--scans", gen.scans, "override the scans per environment");

  FitPcaArgs fit;
  auto* fit_pca_cmd = app.add_subcommand("fit-pca", "fit the node embedding on a dataset split");
  fit_pca_cmd->add_option("--input", fit.input, "dataset directory")->required();
  fit_pca_cmd->add_option("--out", fit.out, "output PCA model file")->required();
  fit_pca_cmd->add_option("--dim", fit.dim, "embedding width")->capture_default_str();
  fit_pca_cmd->add_option("--split", fit.split, "train, val or test")->capture_default_str();

  TrainArgs tr;
  Overrides overrides;
  auto* train_cmd = app.add_subcommand("train", "train a variability model");
  train_cmd->add_option("--data", tr.data, "dataset directory")->required();
  train_cmd->add_option("--config", tr.config, "run config (JSON)");
  train_cmd->add_option("--out", tr.out, "output checkpoint")->required();
  train_cmd->add_option("--pca", tr.pca, "PCA model from fit-pca; fitted on the fly otherwise");
  train_cmd->add_option("--report", tr.report, "also write the training report here");
  add_run_overrides(train_cmd, overrides);

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on a dataset split");
  eval_cmd->add_option("--ckpt", ev.ckpt, "checkpoint")->required();
  eval_cmd->add_option("--data", ev.data, "dataset directory")->required();
  eval_cmd->add_option("--report", ev.report, "output metrics CSV")->required();
  eval_cmd->add_option("--sweep", ev.sweep, "output threshold sweep CSV");
  eval_cmd->add_option("--split", ev.split, "train, val or test")->capture_default_str();
  eval_cmd->add_option("--threshold", ev.threshold, "decision threshold")->capture_default_str();
  eval_cmd->add_option("--epsilon", ev.epsilon, "displacement threshold in metres")
      ->capture_default_str();

  PredictArgs pr;
  auto* predict_cmd = app.add_subcommand("predict", "annotate a scene graph with variability");
  predict_cmd->add_option("--ckpt", pr.ckpt, "checkpoint")->required();
  predict_cmd->add_option("--scene", pr.scene, "scene graph file")->required();
  predict_cmd->add_option("--out", pr.out, "output variable scene graph file")->required();

  PlanArgs pl;
  auto* plan_cmd = app.add_subcommand("plan", "plan a change detection route on a scene");
  plan_cmd->add_option("--ckpt", pl.ckpt, "checkpoint")->required();
  plan_cmd->add_option("--scene", pl.scene, "previous map (scene graph file)")->required();
  plan_cmd->add_option("--n", pl.n, "number of changes to find")->capture_default_str();
  plan_cmd->add_option("--realized", pl.realized,
                       "current scene; when given the route is simulated against it");

  CompareArgs cmp;
  auto* compare_cmd =
      app.add_subcommand("compare-planners", "benchmark the VSG planner against coverage");
  compare_cmd->add_option("--data", cmp.data, "dataset directory")->required();
  compare_cmd->add_option("--ckpt", cmp.ckpt, "checkpoint")->required();
  compare_cmd->add_option("--out", cmp.out, "output CSV")->required();
  compare_cmd->add_option("--n-range", cmp.n_range, "range of n, e.g. 1..5")->capture_default_str();
  compare_cmd->add_option("--seeds", cmp.per_n, "episodes per n")->capture_default_str();
  compare_cmd->add_option("--seed", cmp.seed, "episode sampling seed")->capture_default_str();
  compare_cmd->add_option("--split", cmp.split, "train, val or test")->capture_default_str();
  compare_cmd->add_option("--epsilon", cmp.epsilon, "displacement threshold in metres")
      ->capture_default_str();

  if (!args.empty() && !args.front().starts_with("-") &&
      std::find(kSubcommands.begin(), kSubcommands.end(), args.front()) == kSubcommands.end()) {
    report_error(err, "usage",
                 "unknown subcommand '" + args.front() + "'; expected one of: " + subcommand_list());
    return kExitUsageError;
  }

  std::vector<std::string> argv_storage{"vsg"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    auto* target = &app;
    for (auto* sub : app.get_subcommands()) target = sub;
    out << target->help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::string message = e.what();
    if (app.get_subcommands().empty()) message += "; expected one of: " + subcommand_list();
    report_error(err, "usage", message);
    return kExitUsageError;
  }

  auto previous = set_warning_sink([&err](const std::string& m) { err << "warning: " << m << '\n'; });
  int code = kExitOk;
  try {
    if (generate->parsed()) run_generate(gen, out);
    if (fit_pca_cmd->parsed()) run_fit_pca(fit, out);
    if (train_cmd->parsed()) run_train(tr, overrides, out);
    if (eval_cmd->parsed()) run_eval(ev, out);
    if (predict_cmd->parsed()) run_predict(pr, out);
    if (plan_cmd->parsed()) run_plan(pl, out);
    if (compare_cmd->parsed()) run_compare(cmp, out);
  } catch (const UsageError& e) {
    report_error(err, e.kind(), e.what());
    code = kExitUsageError;
  } catch (const Error& e) {
    report_error(err, e.kind(), e.what());
    code = kExitDomainError;
  } catch (const fs::filesystem_error& e) {
    report_error(err, "io", e.what());
    code = kExitDomainError;
  } catch (const std::exception& e) {
    report_error(err, "internal", e.what());
    code = kExitDomainError;
  }
  set_warning_sink(std::move(previous));
  out.flush();
  return code;
}

}  // namespace vsg::cli
