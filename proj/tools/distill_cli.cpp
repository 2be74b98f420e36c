// Command-line front end: target generation, training, distillation,
// the figure-4 style experiment grid, finite-class statistics, and the
// invariant suites.
//
// Exit codes: 0 success, 1 suite failure, 2 usage error, 3 io/parse error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "distill/boolcore.hpp"
#include "distill/harness.hpp"
#include "distill/juntadistill.hpp"
#include "distill/nnmodel.hpp"
#include "distill/statlab.hpp"
#include "distill/suites.hpp"
#include "distill/treedistill.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace distill;

namespace {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  if (fs::path(path).has_parent_path())
    fs::create_directories(fs::path(path).parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << content;
}

/// The resolved configuration is written next to the primary output so
/// any run can be replayed byte-identically with --config.
void write_config(const std::string& out_path, const json& cfg) {
  write_file(out_path + ".config.json", cfg.dump(2) + "\n");
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw IoError(what + ": parse error at byte " + std::to_string(e.byte) +
                  ": " + e.what());
  }
}

/// Loads a serialized model, tree, or junta as a boolean function by
/// sniffing the JSON shape. Juntas need the ambient dimension.
BoolFn load_boolfn(const std::string& path, int d_hint, int& d_out) {
  json j = parse_json(read_file(path), path);
  if (j.contains("root")) {
    auto tree = std::make_shared<DecisionTree>(DecisionTree::from_json(j.dump()));
    d_out = tree->dim();
    return [tree](const BitInput& x) { return eval_tree(*tree, x); };
  }
  if (j.contains("W")) {
    auto model = std::make_shared<ResidualMLP>(ResidualMLP::from_json(j.dump()));
    d_out = model->input_dim();
    return [model](const BitInput& x) { return model->predict(x); };
  }
  if (j.contains("S") && j.contains("table")) {
    if (d_hint <= 0) throw IoError(path + ": junta artifacts need --d");
    auto junta = std::make_shared<JuntaSpec>(JuntaSpec::from_json(j.dump(), d_hint));
    d_out = d_hint;
    return [junta](const BitInput& x) { return junta->evaluate(x); };
  }
  throw IoError(path + ": unrecognized artifact (expected tree, model, or junta)");
}

// ---------------------------------------------------------------- gen-tree

struct GenTreeArgs {
  int d = 30;
  int depth = 3;
  std::uint64_t seed = 1;
  std::string out = "tree.json";
};

void to_json(json& j, const GenTreeArgs& a) {
  j = {{"subcommand", "gen-tree"}, {"d", a.d}, {"depth", a.depth},
       {"seed", a.seed}, {"out", a.out}};
}
void from_json(const json& j, GenTreeArgs& a) {
  j.at("d").get_to(a.d);
  j.at("depth").get_to(a.depth);
  j.at("seed").get_to(a.seed);
  j.at("out").get_to(a.out);
}

int run_gen_tree(const GenTreeArgs& a) {
  Rng rng(a.seed);
  DecisionTree tree = random_tree(a.d, a.depth, rng);
  write_file(a.out, tree.to_json() + "\n");
  write_config(a.out, json(a));
  std::cout << "wrote " << a.out << " (size " << tree.size() << ", depth "
            << tree.depth() << ")\n";
  return 0;
}

// ------------------------------------------------------------------- train

struct TrainArgs {
  std::string tree;        // target tree to sample from, or
  std::string data;        // a ready dataset CSV
  int n = 50000;           // samples drawn when --tree is used
  int layers = 5;
  int width = 128;
  int epochs = 20;
  int batch_size = 128;
  double step_size = 1e-3;
  double target_accuracy = 1.0;
  std::uint64_t seed = 1;
  std::string out = "model.json";
};

void to_json(json& j, const TrainArgs& a) {
  j = {{"subcommand", "train"}, {"tree", a.tree}, {"data", a.data},
       {"n", a.n}, {"layers", a.layers}, {"width", a.width},
       {"epochs", a.epochs}, {"batch_size", a.batch_size},
       {"step_size", a.step_size}, {"target_accuracy", a.target_accuracy},
       {"seed", a.seed}, {"out", a.out}};
}
void from_json(const json& j, TrainArgs& a) {
  j.at("tree").get_to(a.tree);
  j.at("data").get_to(a.data);
  j.at("n").get_to(a.n);
  j.at("layers").get_to(a.layers);
  j.at("width").get_to(a.width);
  j.at("epochs").get_to(a.epochs);
  j.at("batch_size").get_to(a.batch_size);
  j.at("step_size").get_to(a.step_size);
  j.at("target_accuracy").get_to(a.target_accuracy);
  j.at("seed").get_to(a.seed);
  j.at("out").get_to(a.out);
}

int run_train(const TrainArgs& a) {
  LabeledDataset data;
  if (!a.data.empty()) {
    data = LabeledDataset::from_csv(read_file(a.data));
  } else if (!a.tree.empty()) {
    DecisionTree tree = DecisionTree::from_json(read_file(a.tree));
    Rng rng(a.seed);
    auto dist = DistributionSampler::uniform(tree.dim());
    BoolFn f = [&tree](const BitInput& x) { return eval_tree(tree, x); };
    data = gen_dataset(f, "tree:" + a.tree, a.n, dist, rng);
  } else {
    std::cerr << "train: one of --tree or --data is required\n";
    return 2;
  }
  TrainConfig cfg;
  cfg.layers = a.layers;
  cfg.width = a.width;
  cfg.epochs = a.epochs;
  cfg.batch_size = a.batch_size;
  cfg.step_size = a.step_size;
  cfg.target_accuracy = a.target_accuracy;
  cfg.seed = a.seed;
  TrainReport report;
  ResidualMLP model = train(data, cfg, &report);
  write_file(a.out, model.to_json() + "\n");
  write_config(a.out, json(a));
  std::cout << "wrote " << a.out << " (train accuracy " << report.train_accuracy
            << " after " << report.epochs_run << " epochs)\n";
  return 0;
}

// ------------------------------------------------------------ distill-tree

struct DistillTreeArgs {
  std::string model;
  int depth = 3;           // r
  int s = -1;
  int search_depth = -1;   // R
  std::string mode = "empirical";
  int k = 100;
  double tau = 1.0;
  double eps = 0.2;
  double delta = 0.05;
  std::uint64_t seed = 1;
  std::string out = "distilled.json";
};

void to_json(json& j, const DistillTreeArgs& a) {
  j = {{"subcommand", "distill-tree"}, {"model", a.model}, {"depth", a.depth},
       {"s", a.s}, {"search_depth", a.search_depth}, {"mode", a.mode},
       {"k", a.k}, {"tau", a.tau}, {"eps", a.eps}, {"delta", a.delta},
       {"seed", a.seed}, {"out", a.out}};
}
void from_json(const json& j, DistillTreeArgs& a) {
  j.at("model").get_to(a.model);
  j.at("depth").get_to(a.depth);
  j.at("s").get_to(a.s);
  j.at("search_depth").get_to(a.search_depth);
  j.at("mode").get_to(a.mode);
  j.at("k").get_to(a.k);
  j.at("tau").get_to(a.tau);
  j.at("eps").get_to(a.eps);
  j.at("delta").get_to(a.delta);
  j.at("seed").get_to(a.seed);
  j.at("out").get_to(a.out);
}

int run_distill_tree(const DistillTreeArgs& a) {
  ResidualMLP model = ResidualMLP::from_json(read_file(a.model));
  RepresentationOracle oracle = make_oracle(model);
  auto dist = DistributionSampler::uniform(model.input_dim());

  DistillTreeParams params;
  params.depth_budget = a.depth;
  params.size_budget = a.s;
  params.search_depth = a.search_depth;
  params.eps = a.eps;
  params.delta = a.delta;
  params.tau = a.tau;
  params.mode = a.mode == "theoretical" ? ProbeMode::theoretical : ProbeMode::empirical;
  params.k_filter = a.k;

  Rng rng(a.seed);
  DistillTreeResult res = distill_tree(batchify(model), oracle, dist, params, rng);
  write_file(a.out, res.tree.to_json() + "\n");
  json report = {{"probe_count", res.report.probe_count},
                 {"level_sizes", res.report.level_sizes},
                 {"phase2_samples", res.report.phase2_samples},
                 {"value", res.report.value},
                 {"wall_seconds", res.report.wall_seconds}};
  write_file(a.out + ".report.json", report.dump(2) + "\n");
  write_config(a.out, json(a));
  std::cout << "wrote " << a.out << " (probes " << res.report.probe_count
            << ", value " << res.report.value << ")\n";
  return 0;
}

// ----------------------------------------------------------- distill-junta

struct DistillJuntaArgs {
  std::string source;      // model, tree, or junta artifact
  int d = 0;               // required for junta sources
  int k_max = 4;
  double delta = 0.01;
  std::uint64_t seed = 1;
  std::string out = "junta.json";
};

void to_json(json& j, const DistillJuntaArgs& a) {
  j = {{"subcommand", "distill-junta"}, {"source", a.source}, {"d", a.d},
       {"k_max", a.k_max}, {"delta", a.delta}, {"seed", a.seed}, {"out", a.out}};
}
void from_json(const json& j, DistillJuntaArgs& a) {
  j.at("source").get_to(a.source);
  j.at("d").get_to(a.d);
  j.at("k_max").get_to(a.k_max);
  j.at("delta").get_to(a.delta);
  j.at("seed").get_to(a.seed);
  j.at("out").get_to(a.out);
}

int run_distill_junta(const DistillJuntaArgs& a) {
  int d = 0;
  BoolFn f = load_boolfn(a.source, a.d, d);
  Rng rng(a.seed);
  DistillJuntaResult res = distill_junta(f, d, a.k_max, a.delta, rng);
  write_file(a.out, res.junta.to_json() + "\n");
  write_config(a.out, json(a));
  std::cout << "wrote " << a.out << " (arity " << res.junta.arity()
            << ", queries " << res.queries << ")\n";
  return 0;
}

// -------------------------------------------------------------------- eval

struct EvalArgs {
  std::string source;
  std::string target;
  int d = 0;               // ambient dimension for junta artifacts
  int n = 10000;
  bool exact = false;
  std::uint64_t seed = 1;
  std::string out;         // optional JSON result path
};

void to_json(json& j, const EvalArgs& a) {
  j = {{"subcommand", "eval"}, {"source", a.source}, {"target", a.target},
       {"d", a.d}, {"n", a.n}, {"exact", a.exact}, {"seed", a.seed},
       {"out", a.out}};
}
void from_json(const json& j, EvalArgs& a) {
  j.at("source").get_to(a.source);
  j.at("target").get_to(a.target);
  j.at("d").get_to(a.d);
  j.at("n").get_to(a.n);
  j.at("exact").get_to(a.exact);
  j.at("seed").get_to(a.seed);
  j.at("out").get_to(a.out);
}

int run_eval(const EvalArgs& a) {
  int d_source = 0, d_target = 0;
  BoolFn f = load_boolfn(a.source, a.d, d_source);
  BoolFn g = load_boolfn(a.target, a.d, d_target);
  if (d_source != d_target)
    throw IoError("dimension mismatch: " + std::to_string(d_source) + " vs " +
                  std::to_string(d_target));
  double disagreement;
  if (a.exact) {
    disagreement = disagreement_exact(f, g, d_source);
  } else {
    Rng rng(a.seed);
    auto dist = DistributionSampler::uniform(d_source);
    disagreement = disagreement_sampled(f, g, dist, a.n, rng);
  }
  json result = {{"disagreement", disagreement}, {"agreement", 1.0 - disagreement}};
  std::cout << result.dump(2) << "\n";
  if (!a.out.empty()) {
    write_file(a.out, result.dump(2) + "\n");
    write_config(a.out, json(a));
  }
  return 0;
}

// ------------------------------------------------------------------- stats

struct StatsArgs {
  std::string op = "vc";   // vc | pf | vcdim-pf | threshold
  std::string input;       // class CSV for vc / pf; second class for vcdim-pf
  std::string input_g;
  double eps = 0.1;
  double delta = 0.1;
  int truncation = 100;
  int trials = 10000;
  std::uint64_t seed = 1;
  std::string out;
};

void to_json(json& j, const StatsArgs& a) {
  j = {{"subcommand", "stats"}, {"op", a.op}, {"input", a.input},
       {"input_g", a.input_g}, {"eps", a.eps}, {"delta", a.delta},
       {"truncation", a.truncation}, {"trials", a.trials}, {"seed", a.seed},
       {"out", a.out}};
}
void from_json(const json& j, StatsArgs& a) {
  j.at("op").get_to(a.op);
  j.at("input").get_to(a.input);
  j.at("input_g").get_to(a.input_g);
  j.at("eps").get_to(a.eps);
  j.at("delta").get_to(a.delta);
  j.at("truncation").get_to(a.truncation);
  j.at("trials").get_to(a.trials);
  j.at("seed").get_to(a.seed);
  j.at("out").get_to(a.out);
}

int run_stats(const StatsArgs& a) {
  json result;
  std::string artifact;
  if (a.op == "vc") {
    FiniteClass c = FiniteClass::from_csv(read_file(a.input));
    result = {{"op", "vc"}, {"vc_dimension", vc_dimension(c)}};
  } else if (a.op == "pf") {
    FiniteClass c = FiniteClass::from_csv(read_file(a.input));
    FiniteClass pf = pareto_frontier(c);
    result = {{"op", "pf"}, {"size", pf.num_functions()}};
    artifact = pf.to_csv();
  } else if (a.op == "vcdim-pf") {
    FiniteClass f = FiniteClass::from_csv(read_file(a.input));
    FiniteClass g = a.input_g.empty() ? f : FiniteClass::from_csv(read_file(a.input_g));
    result = {{"op", "vcdim-pf"}, {"vcdim_pf", vcdim_pf(f, g)}};
  } else if (a.op == "threshold") {
    Rng rng(a.seed);
    std::vector<double> masses(static_cast<std::size_t>(a.truncation),
                               1.0 / a.truncation);
    double rate = simulate_threshold_distillation(a.eps, a.delta, a.truncation,
                                                  masses, a.trials, rng);
    result = {{"op", "threshold"}, {"eps", a.eps}, {"delta", a.delta},
              {"trials", a.trials}, {"failure_rate", rate}};
  } else {
    std::cerr << "stats: unknown --op " << a.op << "\n";
    return 2;
  }
  std::cout << result.dump(2) << "\n";
  if (!a.out.empty()) {
    write_file(a.out, artifact.empty() ? result.dump(2) + "\n" : artifact);
    write_config(a.out, json(a));
  }
  return 0;
}

// ----------------------------------------------------------------- figure4

struct Figure4Args {
  int d = 30;
  std::vector<int> depths{2, 3};
  std::vector<int> k_values{100};
  int seeds = 3;
  std::uint64_t seed = 1;
  int train_samples = 50000;
  int epochs = 20;
  double tau = 1.0;
  double eps = 0.2;
  double delta = 0.05;
  std::string out = "figure4.csv";
};

void to_json(json& j, const Figure4Args& a) {
  j = {{"subcommand", "figure4"}, {"d", a.d}, {"depths", a.depths},
       {"k_values", a.k_values}, {"seeds", a.seeds}, {"seed", a.seed},
       {"train_samples", a.train_samples}, {"epochs", a.epochs},
       {"tau", a.tau}, {"eps", a.eps}, {"delta", a.delta}, {"out", a.out}};
}
void from_json(const json& j, Figure4Args& a) {
  j.at("d").get_to(a.d);
  j.at("depths").get_to(a.depths);
  j.at("k_values").get_to(a.k_values);
  j.at("seeds").get_to(a.seeds);
  j.at("seed").get_to(a.seed);
  j.at("train_samples").get_to(a.train_samples);
  j.at("epochs").get_to(a.epochs);
  j.at("tau").get_to(a.tau);
  j.at("eps").get_to(a.eps);
  j.at("delta").get_to(a.delta);
  j.at("out").get_to(a.out);
}

int run_figure4_cmd(const Figure4Args& a) {
  Figure4Config cfg;
  cfg.d = a.d;
  cfg.depths = a.depths;
  cfg.k_values = a.k_values;
  cfg.seeds = a.seeds;
  cfg.base_seed = a.seed;
  cfg.train_samples = a.train_samples;
  cfg.train.epochs = a.epochs;
  cfg.tau = a.tau;
  cfg.eps = a.eps;
  cfg.delta = a.delta;
  Figure4Report report = run_figure4(cfg);
  write_file(a.out, figure4_csv(report));
  write_config(a.out, json(a));
  int failures = 0;
  for (const auto& row : report.rows)
    if (!row.ok) {
      ++failures;
      std::cerr << "row (depth " << row.depth << ", k " << row.k << ", seed "
                << row.seed << ") failed: " << row.error << "\n";
    }
  std::cout << "wrote " << a.out << " (" << report.rows.size() - failures << "/"
            << report.rows.size() << " rows)\n";
  return 0;
}

// ------------------------------------------------------------------- suite

int run_suite_cmd(const std::string& name) {
  std::vector<std::string> names =
      name == "all" ? suites::suite_names() : std::vector<std::string>{name};
  bool all_passed = true;
  for (const auto& n : names) {
    suites::SuiteResult res = suites::run_suite(n);
    std::cout << (res.passed ? "PASS" : "FAIL") << " " << res.name << ": "
              << res.detail << "\n";
    all_passed = all_passed && res.passed;
  }
  return all_passed ? 0 : 1;
}

// -------------------------------------------------------------------- main

int dispatch_config(const std::string& path) {
  json j = parse_json(read_file(path), path);
  std::string sub = j.at("subcommand").get<std::string>();
  if (sub == "gen-tree") return run_gen_tree(j.get<GenTreeArgs>());
  if (sub == "train") return run_train(j.get<TrainArgs>());
  if (sub == "distill-tree") return run_distill_tree(j.get<DistillTreeArgs>());
  if (sub == "distill-junta") return run_distill_junta(j.get<DistillJuntaArgs>());
  if (sub == "eval") return run_eval(j.get<EvalArgs>());
  if (sub == "stats") return run_stats(j.get<StatsArgs>());
  if (sub == "figure4") return run_figure4_cmd(j.get<Figure4Args>());
  throw IoError(path + ": unknown subcommand '" + sub + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distillation toolkit: boolean targets, residual MLPs, tree and "
               "junta extraction, and finite-class statistics"};
  app.require_subcommand(0, 1);

  std::string config_path;
  app.add_option("--config", config_path, "Replay a saved run configuration");

  GenTreeArgs gt;
  auto* gen_tree = app.add_subcommand("gen-tree", "Sample a random full decision tree");
  gen_tree->add_option("--d", gt.d, "Input dimension");
  gen_tree->add_option("--depth", gt.depth, "Tree depth");
  gen_tree->add_option("--seed", gt.seed, "RNG seed");
  gen_tree->add_option("--out", gt.out, "Output tree JSON path");

  TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "Train a residual MLP on a boolean target");
  train_cmd->add_option("--tree", tr.tree, "Target tree JSON to sample labels from");
  train_cmd->add_option("--data", tr.data, "Dataset CSV (overrides --tree)");
  train_cmd->add_option("--n", tr.n, "Training samples drawn with --tree");
  train_cmd->add_option("--layers", tr.layers, "Hidden layers");
  train_cmd->add_option("--width", tr.width, "Hidden width");
  train_cmd->add_option("--epochs", tr.epochs, "Max epochs");
  train_cmd->add_option("--batch-size", tr.batch_size, "Minibatch size");
  train_cmd->add_option("--step-size", tr.step_size, "Adam step size");
  train_cmd->add_option("--target-accuracy", tr.target_accuracy,
                        "Early-stop train accuracy");
  train_cmd->add_option("--seed", tr.seed, "RNG seed");
  train_cmd->add_option("--out", tr.out, "Output model JSON path");

  DistillTreeArgs dt;
  auto* distill_tree_cmd =
      app.add_subcommand("distill-tree", "Distill a model into a decision tree");
  distill_tree_cmd->add_option("--model", dt.model, "Model JSON path")->required();
  distill_tree_cmd->add_option("--depth", dt.depth, "Output depth budget r");
  distill_tree_cmd->add_option("--s", dt.s, "Output size budget (odd; -1 for 2^{r+1}-1)");
  distill_tree_cmd->add_option("--search-depth", dt.search_depth,
                               "Clause search depth R (-1 for default)");
  distill_tree_cmd->add_option("--mode", dt.mode, "Probe mode: empirical|theoretical");
  distill_tree_cmd->add_option("--k", dt.k, "Top-k filter per level (empirical mode)");
  distill_tree_cmd->add_option("--tau", dt.tau, "Probe coefficient norm bound");
  distill_tree_cmd->add_option("--eps", dt.eps, "Target disagreement");
  distill_tree_cmd->add_option("--delta", dt.delta, "Failure probability");
  distill_tree_cmd->add_option("--seed", dt.seed, "RNG seed");
  distill_tree_cmd->add_option("--out", dt.out, "Output tree JSON path");

  DistillJuntaArgs dj;
  auto* distill_junta_cmd =
      app.add_subcommand("distill-junta", "Extract a junta with membership queries");
  distill_junta_cmd->add_option("--source", dj.source, "Source artifact path")->required();
  distill_junta_cmd->add_option("--d", dj.d, "Ambient dimension (junta sources only)");
  distill_junta_cmd->add_option("--k", dj.k_max, "Promised arity bound");
  distill_junta_cmd->add_option("--delta", dj.delta, "Failure probability");
  distill_junta_cmd->add_option("--seed", dj.seed, "RNG seed");
  distill_junta_cmd->add_option("--out", dj.out, "Output junta JSON path");

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Disagreement between two artifacts");
  eval_cmd->add_option("--source", ev.source, "Source artifact path")->required();
  eval_cmd->add_option("--target", ev.target, "Target artifact path")->required();
  eval_cmd->add_option("--d", ev.d, "Ambient dimension (junta artifacts only)");
  eval_cmd->add_option("--n", ev.n, "Evaluation samples");
  eval_cmd->add_flag("--exact", ev.exact, "Enumerate all inputs (d <= 24)");
  eval_cmd->add_option("--seed", ev.seed, "RNG seed");
  eval_cmd->add_option("--out", ev.out, "Optional JSON result path");

  StatsArgs st;
  auto* stats_cmd = app.add_subcommand("stats", "Finite-class statistics");
  stats_cmd->add_option("--op", st.op, "vc | pf | vcdim-pf | threshold");
  stats_cmd->add_option("--input", st.input, "Class CSV path");
  stats_cmd->add_option("--input-g", st.input_g, "Second class CSV (vcdim-pf)");
  stats_cmd->add_option("--eps", st.eps, "Threshold-simulation accuracy");
  stats_cmd->add_option("--delta", st.delta, "Threshold-simulation confidence");
  stats_cmd->add_option("--truncation", st.truncation, "Threshold domain size");
  stats_cmd->add_option("--trials", st.trials, "Monte-Carlo trials");
  stats_cmd->add_option("--seed", st.seed, "RNG seed");
  stats_cmd->add_option("--out", st.out, "Optional output path");

  Figure4Args f4;
  auto* figure4_cmd = app.add_subcommand("figure4", "Run the experiment grid");
  figure4_cmd->add_option("--d", f4.d, "Input dimension");
  figure4_cmd->add_option("--depth", f4.depths, "Tree depths (repeatable)");
  figure4_cmd->add_option("--k", f4.k_values, "Top-k filters (repeatable)");
  figure4_cmd->add_option("--seeds", f4.seeds, "Seeds per cell");
  figure4_cmd->add_option("--seed", f4.seed, "Base seed");
  figure4_cmd->add_option("--train-samples", f4.train_samples, "Samples per model");
  figure4_cmd->add_option("--epochs", f4.epochs, "Max training epochs");
  figure4_cmd->add_option("--tau", f4.tau, "Probe norm bound");
  figure4_cmd->add_option("--eps", f4.eps, "Target disagreement");
  figure4_cmd->add_option("--delta", f4.delta, "Failure probability");
  figure4_cmd->add_option("--out", f4.out, "Report CSV path");

  std::string suite_name = "all";
  auto* suite_cmd = app.add_subcommand("suite", "Run invariant suites");
  suite_cmd->add_option("name", suite_name,
                        "dp-oracle | probe-soundness | junta | packing | statlab | all");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (!config_path.empty()) return dispatch_config(config_path);
    if (gen_tree->parsed()) return run_gen_tree(gt);
    if (train_cmd->parsed()) return run_train(tr);
    if (distill_tree_cmd->parsed()) return run_distill_tree(dt);
    if (distill_junta_cmd->parsed()) return run_distill_junta(dj);
    if (eval_cmd->parsed()) return run_eval(ev);
    if (stats_cmd->parsed()) return run_stats(st);
    if (figure4_cmd->parsed()) return run_figure4_cmd(f4);
    if (suite_cmd->parsed()) return run_suite_cmd(suite_name);
    std::cerr << app.help();
    return 2;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
