#pragma once

// Command-line front end. dispatch() returns the process exit code:
// 0 success, 1 data or validation error, 2 usage error.

#include <filesystem>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "labelscape/labelscape.hpp"

namespace labelscape::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitData = 1;
inline constexpr int kExitUsage = 2;

/// Error that maps to the usage exit code (bad flag combination, missing file).
class usage_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require_file(const std::filesystem::path& p, const char* what) {
  if (!std::filesystem::is_regular_file(p))
    throw usage_error(std::string(what) + " not found: " + p.string());
}

inline std::filesystem::path summary_path_for(const std::filesystem::path& out) {
  auto p = out;
  if (p.extension() == ".csv")
    p.replace_extension(".json");
  else
    p += ".json";
  return p;
}

inline std::string labels_text(const LabelSequence& seq) {
  std::string text;
  text.reserve(seq.labels.size() * 2);
  for (auto label : seq.labels) {
    text += std::to_string(label);
    text += '\n';
  }
  return text;
}

inline json maurer_json(const MaurerResult& r) {
  return {{"f_tu", r.f_tu},
          {"p_value", r.p_value},
          {"expected_value", r.expected_value},
          {"sigma", r.sigma},
          {"variance", to_string(r.variance_model)},
          {"L", r.params.block_length},
          {"Q", r.params.init_blocks},
          {"K", r.params.test_blocks},
          {"discarded_bits", r.discarded_bits},
          {"test_blocks_below_recommended", r.params.test_below_recommended()},
          {"init_blocks_below_recommended", r.params.init_below_recommended()}};
}

}  // namespace detail

inline std::string version_text() {
  return std::string("labelscape ") + kVersion + "\n" + maurer_tables::provenance + "\n";
}

inline int dispatch(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Label-landscape randomness analysis with Maurer's universal test", "labelscape"};
  app.fallthrough();
  app.require_subcommand(0, 1);

  seed_t seed = 0;
  unsigned threads = 0;
  bool quiet = false;
  bool show_version = false;
  auto* seed_opt = app.add_option("--seed", seed, "RNG seed")->capture_default_str();
  auto* threads_opt = app.add_option("--threads", threads, "worker threads (0 = all cores)");
  app.add_flag("--quiet", quiet, "suppress informational messages");
  app.add_flag("--version", show_version, "print version and constant-table provenance");

  // gen
  auto* gen = app.add_subcommand("gen", "generate a synthetic hypercube landscape");
  std::string problem = "parity";
  int d = 11, classes = 2;
  double v = 0.0;
  std::filesystem::path gen_out;
  gen->add_option("--problem", problem, "xor | majority | parity | first-bits")->required();
  gen->add_option("--d", d, "input bits (2..24)")->required();
  gen->add_option("--v", v, "label corruption probability");
  gen->add_option("--classes", classes, "class count (first-bits only)");
  gen->add_option("--out", gen_out, "output landscape file")->required();

  // randomize
  auto* rnd = app.add_subcommand("randomize", "randomize a feature/embedding matrix");
  std::string mode, in_format, out_format, gaussian_stats = "per-feature";
  std::filesystem::path rnd_in, rnd_out;
  double lo = 0.0, hi = 1.0, label_v = 0.0;
  rnd->add_option("--mode", mode, "permut-global | permut-ind | gaussian-ind | noise-ind | labels")->required();
  rnd->add_option("--in", rnd_in, "input matrix (csv or .bin)")->required();
  rnd->add_option("--out", rnd_out, "output matrix")->required();
  rnd->add_option("--lo", lo, "noise-ind lower bound");
  rnd->add_option("--hi", hi, "noise-ind upper bound");
  rnd->add_option("--v", label_v, "label corruption probability (mode labels)");
  rnd->add_option("--in-format", in_format, "csv | bin (default: by extension)");
  rnd->add_option("--out-format", out_format, "csv | bin (default: by extension)");
  rnd->add_option("--gaussian-stats", gaussian_stats, "per-feature | pooled");

  // knn
  auto* knn = app.add_subcommand("knn", "build a k-nearest-neighbor landscape from embeddings");
  std::filesystem::path knn_in, knn_out;
  std::size_t k = 10;
  bool symmetrize = false;
  std::string algorithm = "kd-tree", knn_format;
  knn->add_option("--in", knn_in, "embedding matrix (csv or .bin)")->required();
  knn->add_option("--out", knn_out, "output landscape file")->required();
  knn->add_option("--k", k, "neighbors per node")->capture_default_str();
  knn->add_flag("--symmetrize", symmetrize, "add reverse edges");
  knn->add_option("--algorithm", algorithm, "kd-tree | brute-force");
  knn->add_option("--format", knn_format, "csv | bin (default: by extension)");

  // walk
  auto* walk = app.add_subcommand("walk", "random-walk a landscape and emit its label sequence");
  std::filesystem::path walk_in, walk_out, bits_out;
  std::uint64_t steps = 1'000'000;
  std::string policy = "memoryless", encoding = "auto";
  std::optional<node_id> start;
  walk->add_option("--in", walk_in, "landscape file")->required();
  walk->add_option("--steps", steps, "walk length")->capture_default_str();
  walk->add_option("--out", walk_out, "label output (one per line); stdout if omitted");
  walk->add_option("--bits-out", bits_out, "also write the encoded bit sequence (packed + .len)");
  walk->add_option("--encoding", encoding, "auto | binary | alternation");
  walk->add_option("--policy", policy, "memoryless | non-backtracking");
  walk->add_option("--start", start, "fixed start node");

  // maurer
  auto* maurer = app.add_subcommand("maurer", "run Maurer's universal test on a packed bit file");
  std::filesystem::path bits_path, maurer_out;
  std::optional<std::uint64_t> length, big_q, big_k;
  std::optional<int> big_l;
  std::string variance = "corrected";
  maurer->add_option("--bits", bits_path, "packed bits, MSB first; length from <file>.len")->required();
  maurer->add_option("--length", length, "bit count (overrides the sidecar)");
  maurer->add_option("--L", big_l, "block length");
  maurer->add_option("--Q", big_q, "initialization blocks");
  maurer->add_option("--K", big_k, "test blocks");
  maurer->add_option("--variance", variance, "corrected | asymptotic");
  maurer->add_option("--out", maurer_out, "write the JSON result here as well");

  // experiment
  auto* exp = app.add_subcommand("experiment", "run the repeated-walk protocol");
  std::filesystem::path config_path, exp_out, summary_out, g_err_path;
  std::optional<std::size_t> walks_override;
  std::optional<std::uint64_t> steps_override;
  std::string pearson_mode;
  exp->add_option("--config", config_path, "JSON experiment configuration")->required();
  exp->add_option("--out", exp_out, "per-walk results CSV")->required();
  exp->add_option("--summary", summary_out, "JSON summary (default: <out>.json)");
  exp->add_option("--g-err", g_err_path, "CSV of v,g_err to correlate against");
  exp->add_option("--walks", walks_override, "override walks");
  exp->add_option("--steps", steps_override, "override steps");
  exp->add_option("--pearson", pearson_mode, "aggregate | per-run");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  auto info = [&](const std::string& msg) {
    if (!quiet) err << msg << '\n';
  };

  try {
    if (show_version) {
      out << version_text();
      return kExitOk;
    }
    if (*gen) {
      const Landscape landscape =
          generate(HypercubeSpec{d, parse_problem(problem), classes, v, seed});
      save_landscape(gen_out, landscape);
      info("wrote " + std::to_string(landscape.node_count()) + " nodes to " + gen_out.string());
    } else if (*rnd) {
      detail::require_file(rnd_in, "input matrix");
      const auto fin = in_format.empty() ? guess_matrix_format(rnd_in) : parse_matrix_format(in_format);
      const auto fout = out_format.empty() ? guess_matrix_format(rnd_out) : parse_matrix_format(out_format);
      EmbeddingMatrix m = load_embeddings(rnd_in, fin);
      if (mode == "labels") {
        m = corrupt_labels(m, label_v, seed);
      } else {
        RandomizeOptions opts{lo, hi, GaussianStats::per_feature};
        if (gaussian_stats == "pooled") opts.gaussian_stats = GaussianStats::pooled;
        else if (gaussian_stats != "per-feature") throw usage_error("--gaussian-stats must be per-feature or pooled");
        m.features = randomize(m.features, parse_randomize_mode(mode), seed, opts);
      }
      save_embeddings(rnd_out, m, fout);
      info("wrote " + std::to_string(m.n()) + " rows to " + rnd_out.string());
    } else if (*knn) {
      detail::require_file(knn_in, "embedding matrix");
      const auto fmt = knn_format.empty() ? guess_matrix_format(knn_in) : parse_matrix_format(knn_format);
      KnnOptions opts;
      opts.symmetrize = symmetrize;
      opts.threads = threads;
      if (algorithm == "brute-force") opts.algorithm = KnnAlgorithm::brute_force;
      else if (algorithm != "kd-tree") throw usage_error("--algorithm must be kd-tree or brute-force");
      const Landscape landscape = build_knn(load_embeddings(knn_in, fmt), k, opts, knn_in.filename().string());
      save_landscape(knn_out, landscape);
      info("wrote " + std::to_string(landscape.node_count()) + "-node k-NN landscape to " + knn_out.string());
    } else if (*walk) {
      detail::require_file(walk_in, "landscape file");
      const Landscape landscape = load_landscape(walk_in);
      WalkOptions opts;
      if (policy == "non-backtracking") opts.policy = WalkPolicy::non_backtracking;
      else if (policy != "memoryless") throw usage_error("--policy must be memoryless or non-backtracking");
      opts.start = start;
      const LabelSequence seq = random_walk(landscape, steps, seed, opts);
      const std::string text = detail::labels_text(seq);
      if (walk_out.empty()) out << text;
      else io::atomic_write(walk_out, text);
      if (!bits_out.empty()) {
        const bool binary = encoding == "binary" || (encoding == "auto" && seq.num_classes == 2);
        if (!binary && encoding != "alternation" && encoding != "auto")
          throw usage_error("--encoding must be auto, binary or alternation");
        save_packed_bits(bits_out, binary ? as_bits(seq) : alternation_encode(seq.labels));
      }
    } else if (*maurer) {
      detail::require_file(bits_path, "bit file");
      const BitArray bits = load_packed_bits(bits_path, length);
      MaurerParams params;
      if (big_l || big_q || big_k) {
        if (!(big_l && big_q && big_k)) throw usage_error("--L, --Q and --K must be given together");
        params = make_maurer_params(*big_l, *big_q, *big_k);
      } else {
        params = select_maurer_params(bits.size());
      }
      VarianceModel vm = VarianceModel::corrected;
      if (variance == "asymptotic") vm = VarianceModel::asymptotic;
      else if (variance != "corrected") throw usage_error("--variance must be corrected or asymptotic");
      const MaurerResult r = maurer_test(bits, params, vm);
      const std::string text = detail::maurer_json(r).dump(2) + "\n";
      out << text;
      if (!maurer_out.empty()) io::atomic_write(maurer_out, text);
    } else if (*exp) {
      detail::require_file(config_path, "config file");
      ExperimentConfig config = load_experiment_config(config_path);
      if (seed_opt->count()) config.base_seed = seed;
      if (threads_opt->count()) config.threads = threads;
      if (walks_override) config.walks = *walks_override;
      if (steps_override) config.steps = *steps_override;
      if (pearson_mode == "per-run") config.pearson_mode = PearsonMode::per_run;
      else if (pearson_mode == "aggregate") config.pearson_mode = PearsonMode::aggregate;
      else if (!pearson_mode.empty()) throw usage_error("--pearson must be aggregate or per-run");
      std::vector<GeneralizationEntry> g_err;
      if (!g_err_path.empty()) {
        detail::require_file(g_err_path, "generalization table");
        g_err = load_generalization_csv(g_err_path);
      }
      validate(config);
      if (std::holds_alternative<LandscapeFileSource>(config.source))
        detail::require_file(std::get<LandscapeFileSource>(config.source).path, "landscape file");
      if (std::holds_alternative<EmbeddingSource>(config.source))
        detail::require_file(std::get<EmbeddingSource>(config.source).path, "embedding file");

      const auto summary = summary_out.empty() ? detail::summary_path_for(exp_out) : summary_out;
      if (std::filesystem::exists(summary) && std::filesystem::equivalent(summary, config_path))
        throw usage_error("summary path " + summary.string() + " would overwrite the config; pass --summary");

      ExperimentResult result = run_experiment(config);
      if (!g_err.empty()) result = join_generalization(std::move(result), g_err);
      io::atomic_write(exp_out, results_csv(result));
      io::atomic_write(summary, summary_json(result, config).dump(2) + "\n");
      info("wrote " + std::to_string(result.records.size()) + " records to " + exp_out.string() +
           " and summary to " + summary.string());
    } else {
      err << "a subcommand is required (gen, randomize, knn, walk, maurer, experiment)\n"
          << app.help();
      return kExitUsage;
    }
  } catch (const usage_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

}  // namespace labelscape::cli
