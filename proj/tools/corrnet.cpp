// corrnet: windowed correlation networks from daily closing prices.

#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "corrnet/corrnet.hpp"

namespace fs = std::filesystem;
using namespace corrnet;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitData = 1;
constexpr int kExitConfig = 2;

// "corr_2000.csv" -> "2000", "network_2000.dot" -> "2000"
std::string label_from_file(const fs::path& path, const std::string& prefix) {
  std::string stem = path.stem().string();
  if (stem.rfind(prefix, 0) == 0) stem.erase(0, prefix.size());
  return stem;
}

void emit(const std::optional<fs::path>& out_dir, const std::string& name, const std::string& body) {
  if (!out_dir) {
    std::cout << body;
    return;
  }
  fs::create_directories(*out_dir);
  io::write_file(*out_dir / name, body);
}

const std::map<std::string, Layout> kLayouts{{"long", Layout::Long}, {"wide", Layout::Wide}};
const std::map<std::string, FillPolicy> kFills{{"intersect", FillPolicy::Intersect}, {"ffill", FillPolicy::ForwardFill}};
const std::map<std::string, WindowMode> kModes{{"year", WindowMode::CalendarYear}, {"fixed", WindowMode::FixedLength}};
const std::map<std::string, DensityConvention> kDensity{{"prose", DensityConvention::Prose},
                                                        {"paper", DensityConvention::PaperLiteral}};
const std::map<std::string, ClusteringRule> kRules{{"paper", ClusteringRule::Paper},
                                                   {"standard", ClusteringRule::Standard}};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"corrnet - correlation threshold networks and Jaccard market-state analysis"};
  app.require_subcommand(1);

  // ---- run
  auto* run = app.add_subcommand("run", "full pipeline: prices -> returns -> correlations -> networks -> similarity");
  std::string config_file, input, out_dir, subset;
  Layout layout = Layout::Wide;
  FillPolicy fill = FillPolicy::ForwardFill;
  WindowMode mode = WindowMode::CalendarYear;
  std::size_t window_length = 260, window_step = 260, min_days = 50, threads = 0;
  double theta = 0.3, regime_drop = 0.5, sigma_floor = kDefaultSigmaFloor;
  std::vector<double> sweep;
  std::string convention_name = "prose", rule_name = "paper";
  bool all_components = false, quiet = false;
  std::vector<std::string> emit_list;

  run->add_option("--config", config_file, "JSON config file; command-line flags take precedence")
      ->check(CLI::ExistingFile);
  auto* o_input = run->add_option("--input", input, "price CSV (UTF-8, header row)");
  auto* o_layout = run->add_option("--layout", layout, "long: date,instrument,close; wide: date,<id>,...")
                       ->transform(CLI::CheckedTransformer(kLayouts, CLI::ignore_case))
                       ->capture_default_str();
  auto* o_fill = run->add_option("--fill", fill, "calendar alignment policy")
                     ->transform(CLI::CheckedTransformer(kFills, CLI::ignore_case))
                     ->capture_default_str();
  auto* o_mode = run->add_option("--window-mode", mode, "year: calendar years; fixed: fixed row count")
                     ->transform(CLI::CheckedTransformer(kModes, CLI::ignore_case))
                     ->capture_default_str();
  auto* o_length = run->add_option("--window-length", window_length, "rows per window (fixed mode)")->capture_default_str();
  auto* o_step = run->add_option("--window-step", window_step, "rows between window starts (fixed mode)")->capture_default_str();
  auto* o_min = run->add_option("--min-days", min_days, "minimum rows per calendar-year window")->capture_default_str();
  auto* o_theta = run->add_option("--theta", theta, "correlation threshold in [-1, 1]")->capture_default_str();
  auto* o_sweep = run->add_option("--theta-sweep", sweep, "comma-separated threshold list")->delimiter(',');
  auto* o_conv = run->add_option("--density-convention", convention_name, "prose: 2M/(N(N-1)); paper: M/(N(N-1))")
                     ->check(CLI::IsMember(kDensity))
                     ->capture_default_str();
  auto* o_rule = run->add_option("--clustering-rule", rule_name, "paper: C_i=0 if degree<=2; standard: if degree<2")
                     ->check(CLI::IsMember(kRules))
                     ->capture_default_str();
  auto* o_all = run->add_flag("--all-components", all_components, "also write components.csv for whole networks");
  auto* o_subset = run->add_option("--subset", subset, "file with one instrument label per line");
  auto* o_drop = run->add_option("--regime-drop", regime_drop, "flag when adjacent J < drop * median")->capture_default_str();
  auto* o_floor = run->add_option("--sigma-floor", sigma_floor, "exclude instruments with smaller return sigma")->capture_default_str();
  auto* o_out = run->add_option("--out", out_dir, "output directory (replaced atomically)");
  auto* o_threads = run->add_option("--threads", threads, "worker threads (default: CORRNET_THREADS or all cores)");
  auto* o_emit = run->add_option("--emit", emit_list, "artifact classes: volatility,correlation,network,metrics,jaccard")
                     ->delimiter(',');
  run->add_flag("--quiet", quiet, "do not print the summary table");

  // ---- synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic wide-layout price CSV");
  std::string spec_file, synth_out;
  synth->add_option("--spec", spec_file, "JSON synthetic spec")->required()->check(CLI::ExistingFile);
  synth->add_option("--out", synth_out, "output CSV path")->required();

  // ---- metrics
  auto* metrics = app.add_subcommand("metrics", "recompute metrics.csv from saved corr_<window>.csv files");
  std::vector<std::string> corr_files;
  std::string metrics_out;
  std::vector<double> m_thetas{0.3};
  std::string m_conv = "prose", m_rule = "paper";
  metrics->add_option("files", corr_files, "correlation CSVs in window order")->required()->check(CLI::ExistingFile);
  metrics->add_option("--theta", m_thetas, "threshold list")->delimiter(',')->capture_default_str();
  metrics->add_option("--density-convention", m_conv, "prose|paper")->check(CLI::IsMember(kDensity))->capture_default_str();
  metrics->add_option("--clustering-rule", m_rule, "paper|standard")->check(CLI::IsMember(kRules))->capture_default_str();
  metrics->add_option("--out", metrics_out, "directory for metrics.csv (default: stdout)");

  // ---- jaccard
  auto* jacc = app.add_subcommand("jaccard", "recompute jaccard.csv and regime flags from saved network_<window>.dot files");
  std::vector<std::string> dot_files;
  std::string jaccard_out;
  double j_drop = 0.5;
  jacc->add_option("files", dot_files, "DOT networks in window order")->required()->check(CLI::ExistingFile);
  jacc->add_option("--regime-drop", j_drop, "flag when adjacent J < drop * median")->capture_default_str();
  jacc->add_option("--out", jaccard_out, "directory for jaccard.csv and regime_flags.txt (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) {
      RunConfig config;
      if (!config_file.empty()) {
        nlohmann::json j;
        try {
          j = nlohmann::json::parse(io::read_file(config_file));
        } catch (const nlohmann::json::exception& e) {
          throw Error(ErrorKind::Config, std::string("config: ") + e.what());
        }
        apply_config_json(config, j);
      }
      if (o_input->count()) config.input = input;
      if (o_layout->count()) config.layout = layout;
      if (o_fill->count()) config.fill = fill;
      if (o_mode->count()) config.window.mode = mode;
      if (o_length->count()) config.window.length = window_length;
      if (o_step->count()) config.window.step = window_step;
      if (o_min->count()) config.window.min_days = min_days;
      if (o_theta->count() && o_sweep->count())
        throw Error(ErrorKind::Config, "--theta and --theta-sweep are mutually exclusive");
      if (o_theta->count()) config.thetas = {theta};
      if (o_sweep->count()) config.thetas = sweep;
      if (o_conv->count()) config.density_convention = kDensity.at(convention_name);
      if (o_rule->count()) config.clustering_rule = kRules.at(rule_name);
      if (o_all->count()) config.all_components = all_components;
      if (o_subset->count()) config.subset = subset;
      if (o_drop->count()) config.regime_drop = regime_drop;
      if (o_floor->count()) config.sigma_floor = sigma_floor;
      if (o_out->count()) config.output_dir = out_dir;
      if (o_threads->count()) {
        if (threads == 0) throw Error(ErrorKind::Config, "--threads must be >= 1");
        config.threads = threads;
      }
      if (o_emit->count()) {
        config.emit = EmitFlags{false, false, false, false, false};
        for (const auto& e : emit_list) {
          if (e == "volatility") config.emit.volatility = true;
          else if (e == "correlation") config.emit.correlation = true;
          else if (e == "network") config.emit.networks = true;
          else if (e == "metrics") config.emit.metrics = true;
          else if (e == "jaccard") config.emit.jaccard = true;
          else throw Error(ErrorKind::Config, "unknown artifact class '" + e + "'");
        }
      }

      RunResult result = run_pipeline(config);
      for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
      if (!quiet) print_summary(result, std::cout);
      return kExitOk;
    }

    if (*synth) {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(io::read_file(spec_file));
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Config, std::string("synth spec: ") + e.what());
      }
      PricePanel panel = generate(synth_spec_from_json(j));
      io::write_file(synth_out, io::prices_wide_csv(panel));
      return kExitOk;
    }

    if (*metrics) {
      for (double t : m_thetas)
        if (!(t >= -1.0 && t <= 1.0)) throw Error(ErrorKind::Config, "theta outside [-1, 1]");
      std::vector<WindowReport> reports;
      for (const auto& file : corr_files) {
        CorrelationMatrix corr = io::parse_correlation_csv(io::read_file(file), label_from_file(file, "corr_"));
        for (double t : m_thetas) reports.push_back(window_report(corr, t, kDensity.at(m_conv), kRules.at(m_rule)));
      }
      emit(metrics_out.empty() ? std::nullopt : std::optional<fs::path>(metrics_out), "metrics.csv",
           io::metrics_csv(reports));
      return kExitOk;
    }

    if (*jacc) {
      if (!(j_drop > 0.0 && j_drop < 1.0)) throw Error(ErrorKind::Config, "--regime-drop must lie in (0, 1)");
      std::vector<Cluster> clusters;
      for (const auto& file : dot_files)
        clusters.push_back(io::parse_dot(io::read_file(file), label_from_file(file, "network_")));
      SimilarityMatrix sim = similarity_matrix(clusters);
      std::optional<fs::path> out = jaccard_out.empty() ? std::nullopt : std::optional<fs::path>(jaccard_out);
      emit(out, "jaccard.csv", io::jaccard_csv(sim));
      emit(out, "regime_flags.txt", io::regime_flags_txt(regime_flags(sim, j_drop)));
      return kExitOk;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return is_config_error(e.kind()) ? kExitConfig : kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}
