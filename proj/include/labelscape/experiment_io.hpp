#pragma once

// Experiment configuration files (JSON), per-walk results CSV, JSON summary,
// and generalization-error tables.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "labelscape/experiment.hpp"
#include "labelscape/io.hpp"
#include "labelscape/version.hpp"

namespace labelscape {

using json = nlohmann::ordered_json;

inline const char* to_string(Encoding e) noexcept {
  switch (e) {
    case Encoding::automatic: return "auto";
    case Encoding::binary: return "binary";
    case Encoding::alternation: return "alternation";
  }
  return "?";
}

inline const char* to_string(WalkPolicy p) noexcept {
  return p == WalkPolicy::memoryless ? "memoryless" : "non-backtracking";
}

inline const char* to_string(PearsonMode m) noexcept {
  return m == PearsonMode::aggregate ? "aggregate" : "per-run";
}

namespace detail {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw parameter_error(std::string("config field '") + key + "' has the wrong type");
  }
}

inline std::filesystem::path resolve_path(const std::filesystem::path& base_dir, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_relative() && !base_dir.empty() ? base_dir / path : path;
}

}  // namespace detail

/// Parses an experiment configuration. Relative paths resolve against `base_dir`.
inline ExperimentConfig parse_experiment_config(const json& j, const std::filesystem::path& base_dir = {}) {
  if (!j.is_object()) throw parameter_error("config must be a JSON object");
  ExperimentConfig c;
  if (!j.contains("landscape")) throw parameter_error("config needs a 'landscape' section");
  const json& src = j.at("landscape");
  if (src.contains("generator")) {
    const json& g = src.at("generator");
    GeneratorSource s;
    s.problem = parse_problem(detail::get_or<std::string>(g, "problem", "parity"));
    s.d = detail::get_or<int>(g, "d", 11);
    s.classes = detail::get_or<int>(g, "classes", 2);
    c.source = s;
  } else if (src.contains("file")) {
    c.source = LandscapeFileSource{detail::resolve_path(base_dir, src.at("file").get<std::string>())};
  } else if (src.contains("embeddings")) {
    const json& e = src.at("embeddings");
    EmbeddingSource s;
    s.path = detail::resolve_path(base_dir, detail::get_or<std::string>(e, "path", ""));
    if (e.contains("format")) s.format = parse_matrix_format(e.at("format").get<std::string>());
    s.k = detail::get_or<std::size_t>(e, "k", 10);
    s.symmetrize = detail::get_or<bool>(e, "symmetrize", false);
    c.source = s;
  } else {
    throw parameter_error("landscape must name a 'generator', 'file' or 'embeddings' source");
  }

  c.walks = detail::get_or<std::size_t>(j, "walks", c.walks);
  c.steps = detail::get_or<std::uint64_t>(j, "steps", c.steps);
  c.v_grid = detail::get_or<std::vector<double>>(j, "v_grid", c.v_grid);
  c.base_seed = detail::get_or<seed_t>(j, "base_seed", c.base_seed);
  c.threads = detail::get_or<unsigned>(j, "threads", c.threads);

  if (j.contains("maurer") && !(j.at("maurer").is_string() && j.at("maurer") == "auto")) {
    const json& m = j.at("maurer");
    if (!m.is_object()) throw parameter_error("maurer must be \"auto\" or {\"L\":..,\"Q\":..,\"K\":..}");
    c.maurer = make_maurer_params(detail::get_or<int>(m, "L", 0), detail::get_or<std::uint64_t>(m, "Q", 0),
                                  detail::get_or<std::uint64_t>(m, "K", 0));
  }
  const auto variance = detail::get_or<std::string>(j, "variance", "corrected");
  if (variance == "corrected") c.variance_model = VarianceModel::corrected;
  else if (variance == "asymptotic") c.variance_model = VarianceModel::asymptotic;
  else throw parameter_error("variance must be 'corrected' or 'asymptotic'");

  const auto encoding = detail::get_or<std::string>(j, "encoding", "auto");
  if (encoding == "auto") c.encoding = Encoding::automatic;
  else if (encoding == "binary") c.encoding = Encoding::binary;
  else if (encoding == "alternation") c.encoding = Encoding::alternation;
  else throw parameter_error("encoding must be 'auto', 'binary' or 'alternation'");

  const auto policy = detail::get_or<std::string>(j, "walk_policy", "memoryless");
  if (policy == "memoryless") c.walk_policy = WalkPolicy::memoryless;
  else if (policy == "non-backtracking") c.walk_policy = WalkPolicy::non_backtracking;
  else throw parameter_error("walk_policy must be 'memoryless' or 'non-backtracking'");

  const auto pearson = detail::get_or<std::string>(j, "pearson", "aggregate");
  if (pearson == "aggregate") c.pearson_mode = PearsonMode::aggregate;
  else if (pearson == "per-run") c.pearson_mode = PearsonMode::per_run;
  else throw parameter_error("pearson must be 'aggregate' or 'per-run'");

  validate(c);
  return c;
}

inline ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  const std::string text = io::read_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw load_error(path.string() + ": invalid JSON: " + e.what());
  }
  return parse_experiment_config(j, path.parent_path());
}

inline json to_json(const ExperimentConfig& c) {
  json j;
  std::visit(
      [&j](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, GeneratorSource>) {
          j["landscape"]["generator"] = {{"problem", to_string(s.problem)}, {"d", s.d}, {"classes", s.classes}};
        } else if constexpr (std::is_same_v<S, LandscapeFileSource>) {
          j["landscape"]["file"] = s.path.string();
        } else {
          j["landscape"]["embeddings"] = {{"path", s.path.string()},
                                          {"format", s.format ? (*s.format == MatrixFormat::csv ? "csv" : "bin")
                                                              : (guess_matrix_format(s.path) == MatrixFormat::csv ? "csv" : "bin")},
                                          {"k", s.k},
                                          {"symmetrize", s.symmetrize}};
        }
      },
      c.source);
  j["walks"] = c.walks;
  j["steps"] = c.steps;
  j["v_grid"] = c.v_grid;
  j["base_seed"] = c.base_seed;
  if (c.maurer)
    j["maurer"] = {{"L", c.maurer->block_length}, {"Q", c.maurer->init_blocks}, {"K", c.maurer->test_blocks}};
  else
    j["maurer"] = "auto";
  j["variance"] = to_string(c.variance_model);
  j["encoding"] = to_string(c.encoding);
  j["walk_policy"] = to_string(c.walk_policy);
  j["pearson"] = to_string(c.pearson_mode);
  j["threads"] = c.threads;
  return j;
}

/// Per-walk records as `v,walk,seed,f_tu,p`, reals with 17 significant digits.
inline std::string results_csv(const ExperimentResult& r) {
  std::string out = "v,walk,seed,f_tu,p\n";
  for (const auto& rec : r.records) {
    out += io::format_double(rec.v);
    out += ',' + std::to_string(rec.walk);
    out += ',' + std::to_string(rec.seed);
    out += ',' + io::format_double(rec.f_tu);
    out += ',' + io::format_double(rec.p_value);
    out += '\n';
  }
  return out;
}

inline json summary_json(const ExperimentResult& r, const ExperimentConfig& c) {
  json j;
  j["tool"] = "labelscape";
  j["version"] = kVersion;
  j["maurer_constants"] = maurer_tables::provenance;
  j["config"] = to_json(c);
  j["landscape_id"] = r.landscape_id;
  j["encoding"] = to_string(r.encoding);
  j["maurer_params"] = {{"L", r.params.block_length},
                        {"Q", r.params.init_blocks},
                        {"K", r.params.test_blocks},
                        {"discarded_bits", c.steps + 1 - r.params.required_bits()},
                        {"variance", to_string(c.variance_model)},
                        {"test_blocks_below_recommended", r.params.test_below_recommended()},
                        {"init_blocks_below_recommended", r.params.init_below_recommended()}};
  json levels = json::array();
  for (const auto& level : r.levels) {
    json l = {{"v", level.v},
              {"corruption_seed", level.corruption_seed},
              {"mean_one_minus_p", level.mean_one_minus_p},
              {"std_one_minus_p", level.std_one_minus_p},
              {"mean_f_tu", level.mean_f_tu}};
    if (level.g_err) l["g_err"] = *level.g_err;
    levels.push_back(std::move(l));
  }
  j["levels"] = std::move(levels);
  if (r.pearson_r) {
    j["pearson_r"] = *r.pearson_r;
    j["pearson_mode"] = to_string(r.pearson_mode);
  }
  return j;
}

/// Reads `v,g_err` rows. A non-numeric first line is a header; when it names
/// `v` and `g_err` columns those are used, otherwise the first two.
inline std::vector<GeneralizationEntry> parse_generalization_csv(std::string_view text) {
  std::vector<GeneralizationEntry> out;
  std::size_t v_col = 0, g_col = 1;
  bool header_seen = false;
  const auto rows = io::lines(text);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (io::trim(rows[r]).empty() || io::trim(rows[r]).front() == '#') continue;
    const auto cells = io::split(rows[r], ',');
    double probe;
    if (out.empty() && !header_seen && !io::parse_double(cells[0], probe)) {
      header_seen = true;
      for (std::size_t c = 0; c < cells.size(); ++c) {
        const auto name = io::trim(cells[c]);
        if (name == "v") v_col = c;
        if (name == "g_err") g_col = c;
      }
      continue;
    }
    GeneralizationEntry e{};
    if (cells.size() <= std::max(v_col, g_col) || !io::parse_double(cells[v_col], e.v) ||
        !io::parse_double(cells[g_col], e.g_err))
      throw load_error("expected numeric v and g_err", static_cast<long>(r + 1));
    out.push_back(e);
  }
  if (out.empty()) throw load_error("generalization table has no rows");
  return out;
}

inline std::vector<GeneralizationEntry> load_generalization_csv(const std::filesystem::path& path) {
  return parse_generalization_csv(io::read_file(path));
}

}  // namespace labelscape
