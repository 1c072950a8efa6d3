#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "corrnet/correlation.hpp"
#include "corrnet/error.hpp"
#include "corrnet/ingest.hpp"
#include "corrnet/io.hpp"
#include "corrnet/netgraph.hpp"
#include "corrnet/returns.hpp"
#include "corrnet/similarity.hpp"

namespace corrnet {

struct EmitFlags {
  bool volatility = true;
  bool correlation = true;
  bool networks = true;
  bool metrics = true;
  bool jaccard = true;
};

struct RunConfig {
  std::filesystem::path input;
  Layout layout = Layout::Wide;
  FillPolicy fill = FillPolicy::ForwardFill;
  WindowSpec window;
  std::vector<double> thetas{0.3};
  DensityConvention density_convention = DensityConvention::Prose;
  ClusteringRule clustering_rule = ClusteringRule::Paper;
  std::optional<std::filesystem::path> subset;
  std::filesystem::path output_dir;
  double regime_drop = 0.5;
  double sigma_floor = kDefaultSigmaFloor;
  bool all_components = false;
  std::size_t threads = 0;  // 0: CORRNET_THREADS, else hardware concurrency
  EmitFlags emit;

  void validate() const {
    auto fail = [](const std::string& m) { throw Error(ErrorKind::Config, m); };
    if (input.empty()) fail("no input path given");
    if (output_dir.empty()) fail("no output directory given");
    if (thetas.empty()) fail("theta list is empty");
    for (double t : thetas)
      if (!(t >= -1.0 && t <= 1.0)) fail("theta " + io::format_theta(t) + " outside [-1, 1]");
    std::set<double> unique(thetas.begin(), thetas.end());
    if (unique.size() != thetas.size()) fail("theta list has duplicates");
    if (!(regime_drop > 0.0 && regime_drop < 1.0)) fail("regime drop must lie in (0, 1)");
    if (!(sigma_floor > 0.0)) fail("sigma floor must be positive");
    try {
      window.validate();
    } catch (const Error& e) {
      fail(e.what());
    }
  }
};

/// Worker count: explicit value, else CORRNET_THREADS, else hardware concurrency.
inline std::size_t resolve_threads(std::size_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("CORRNET_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    throw Error(ErrorKind::Config, std::string("CORRNET_THREADS must be a positive integer, got '") + env + "'");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Applies the keys present in a JSON config object; absent keys keep their
/// current values.
inline void apply_config_json(RunConfig& c, const nlohmann::json& j) {
  try {
    auto fail = [](const std::string& m) { throw Error(ErrorKind::Config, "config: " + m); };
    if (!j.is_object()) fail("top level must be an object");
    if (j.contains("input")) c.input = j.at("input").get<std::string>();
    if (j.contains("out")) c.output_dir = j.at("out").get<std::string>();
    if (j.contains("layout")) {
      auto v = j.at("layout").get<std::string>();
      if (v == "long") c.layout = Layout::Long;
      else if (v == "wide") c.layout = Layout::Wide;
      else fail("layout must be long or wide");
    }
    if (j.contains("fill")) {
      auto v = j.at("fill").get<std::string>();
      if (v == "intersect") c.fill = FillPolicy::Intersect;
      else if (v == "ffill") c.fill = FillPolicy::ForwardFill;
      else fail("fill must be intersect or ffill");
    }
    if (j.contains("window_mode")) {
      auto v = j.at("window_mode").get<std::string>();
      if (v == "year") c.window.mode = WindowMode::CalendarYear;
      else if (v == "fixed") c.window.mode = WindowMode::FixedLength;
      else fail("window_mode must be year or fixed");
    }
    if (j.contains("window_length")) c.window.length = j.at("window_length").get<std::size_t>();
    if (j.contains("window_step")) c.window.step = j.at("window_step").get<std::size_t>();
    if (j.contains("min_days")) c.window.min_days = j.at("min_days").get<std::size_t>();
    if (j.contains("theta")) c.thetas = {j.at("theta").get<double>()};
    if (j.contains("theta_sweep")) c.thetas = j.at("theta_sweep").get<std::vector<double>>();
    if (j.contains("density_convention")) {
      auto v = j.at("density_convention").get<std::string>();
      if (v == "prose") c.density_convention = DensityConvention::Prose;
      else if (v == "paper") c.density_convention = DensityConvention::PaperLiteral;
      else fail("density_convention must be prose or paper");
    }
    if (j.contains("clustering_rule")) {
      auto v = j.at("clustering_rule").get<std::string>();
      if (v == "paper") c.clustering_rule = ClusteringRule::Paper;
      else if (v == "standard") c.clustering_rule = ClusteringRule::Standard;
      else fail("clustering_rule must be paper or standard");
    }
    if (j.contains("subset")) c.subset = j.at("subset").get<std::string>();
    if (j.contains("regime_drop")) c.regime_drop = j.at("regime_drop").get<double>();
    if (j.contains("sigma_floor")) c.sigma_floor = j.at("sigma_floor").get<double>();
    if (j.contains("all_components")) c.all_components = j.at("all_components").get<bool>();
    if (j.contains("threads")) c.threads = j.at("threads").get<std::size_t>();
    if (j.contains("emit")) {
      const auto& e = j.at("emit");
      c.emit.volatility = e.value("volatility", c.emit.volatility);
      c.emit.correlation = e.value("correlation", c.emit.correlation);
      c.emit.networks = e.value("networks", c.emit.networks);
      c.emit.metrics = e.value("metrics", c.emit.metrics);
      c.emit.jaccard = e.value("jaccard", c.emit.jaccard);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Config, std::string("config: ") + e.what());
  }
}

struct ArtifactEntry {
  std::string path;  // relative to the output directory
  std::string artifact_class;
  std::string sha256;
};

struct Manifest {
  std::vector<std::string> windows;
  std::vector<std::string> skipped_windows;
  std::vector<double> thetas;
  std::vector<ArtifactEntry> artifacts;

  std::set<std::string> classes() const {
    std::set<std::string> out;
    for (const auto& a : artifacts) out.insert(a.artifact_class);
    return out;
  }

  std::string to_json() const {
    nlohmann::ordered_json j;
    j["windows"] = windows;
    j["skipped_windows"] = skipped_windows;
    std::vector<std::string> thetas_text;
    for (double t : thetas) thetas_text.push_back(io::format_theta(t));
    j["thetas"] = thetas_text;
    auto list = nlohmann::ordered_json::array();
    for (const auto& a : artifacts)
      list.push_back(nlohmann::ordered_json{{"path", a.path}, {"class", a.artifact_class}, {"sha256", a.sha256}});
    j["artifacts"] = list;
    return j.dump(2) + "\n";
  }
};

/// Per-window line of the run summary, at the first threshold of the run.
struct SummaryRow {
  std::string window_label;
  WindowReport report;
  double mean_correlation = 0.0;
  std::optional<double> jaccard_previous;
};

struct RunResult {
  Manifest manifest;
  std::vector<SummaryRow> summary;
  std::vector<std::string> warnings;
};

/// Everything computed for one window.
struct WindowAnalysis {
  std::string label;
  VolatilityReport volatility;
  CorrelationMatrix correlation;
  double mean_correlation = 0.0;
  std::vector<ThresholdNetwork> networks;  // one per theta
  std::vector<Cluster> clusters;
  std::vector<WindowReport> reports;
  std::vector<InstrumentId> excluded;
};

inline WindowAnalysis analyze_window(const PriceWindow& window, const RunConfig& config) {
  WindowAnalysis a;
  a.label = window.label;
  ReturnPanel returns = log_returns(window);
  a.volatility = volatility(returns);
  NormalizedReturnPanel normalized = normalize(returns, config.sigma_floor);
  a.excluded = normalized.excluded;
  a.correlation = correlation_matrix(normalized);
  a.mean_correlation = mean_correlation(a.correlation);
  for (double theta : config.thetas) {
    auto& net = a.networks.emplace_back(build_threshold_network(a.correlation, theta));
    auto& cluster = a.clusters.emplace_back(largest_cluster(net));
    a.reports.push_back(window_report(cluster, config.density_convention, config.clustering_rule));
  }
  return a;
}

namespace detail {

inline std::string theta_suffix(const RunConfig& c, double theta) {
  return c.thetas.size() == 1 ? std::string{} : "_t" + io::format_theta(theta);
}

inline std::set<std::string> read_subset(const std::filesystem::path& path) {
  std::set<std::string> keep;
  for (auto line : csv::lines(io::read_file(path))) {
    auto label = csv::trim(line);
    if (!label.empty() && label.front() != '#') keep.insert(std::string(label));
  }
  return keep;
}

// Output directory that may be replaced: absent, empty, or an earlier run.
inline void check_output_dir(const std::filesystem::path& out) {
  namespace fs = std::filesystem;
  if (!fs::exists(out)) return;
  if (!fs::is_directory(out)) throw Error(ErrorKind::Config, out.string() + " exists and is not a directory");
  if (fs::is_empty(out) || fs::exists(out / "manifest.json")) return;
  throw Error(ErrorKind::Config, out.string() + " is a non-empty directory without a manifest; refusing to replace it");
}

}  // namespace detail

/// Runs ingest -> returns -> correlation -> networks -> similarity and
/// writes every artifact. Output appears atomically: files go to a sibling
/// temporary directory that is renamed into place only on success.
inline RunResult run_pipeline(const RunConfig& config) {
  namespace fs = std::filesystem;
  config.validate();
  detail::check_output_dir(config.output_dir);

  RunResult result;
  auto& warnings = result.warnings;

  const std::string content = io::read_file(config.input);
  PricePanel panel = align_calendars(parse_prices(content, config.layout), config.fill, &warnings);
  if (config.subset) {
    panel = panel.select(detail::read_subset(*config.subset));
    if (panel.cols() < 2) throw Error(ErrorKind::TooFewInstruments, "subset leaves fewer than 2 instruments");
  }
  const std::vector<PriceWindow> windows = slice_windows(panel, config.window, &warnings);

  // windows are independent; each worker writes only its own slots
  std::vector<std::optional<WindowAnalysis>> analyses(windows.size());
  std::vector<std::string> failures(windows.size());
  {
    const std::size_t workers = std::min(resolve_threads(config.threads), windows.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
      for (std::size_t k = next++; k < windows.size(); k = next++) {
        try {
          analyses[k] = analyze_window(windows[k], config);
        } catch (const Error& e) {
          failures[k] = e.what();
        }
      }
    };
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
  }

  std::vector<const WindowAnalysis*> done;
  for (std::size_t k = 0; k < windows.size(); ++k) {
    if (analyses[k]) {
      done.push_back(&*analyses[k]);
      result.manifest.windows.push_back(windows[k].label);
      for (const auto& id : analyses[k]->excluded)
        warnings.push_back("window " + windows[k].label + ": " + id.label + " has zero variance; excluded");
    } else {
      result.manifest.skipped_windows.push_back(windows[k].label);
      warnings.push_back("window " + windows[k].label + " skipped: " + failures[k]);
    }
  }
  if (done.empty()) throw Error(ErrorKind::NoWindow, "no window could be analyzed");
  result.manifest.thetas = config.thetas;

  // similarity per threshold
  std::vector<std::optional<SimilarityMatrix>> similarities(config.thetas.size());
  std::vector<std::vector<RegimeFlag>> flags(config.thetas.size());
  if (done.size() >= 2) {
    for (std::size_t t = 0; t < config.thetas.size(); ++t) {
      std::vector<Cluster> clusters;
      for (const auto* a : done) clusters.push_back(a->clusters[t]);
      similarities[t] = similarity_matrix(clusters);
      flags[t] = regime_flags(*similarities[t], config.regime_drop);
    }
  } else {
    warnings.push_back("fewer than 2 windows; Jaccard similarity not computed");
  }

  for (std::size_t k = 0; k < done.size(); ++k) {
    SummaryRow row;
    row.window_label = done[k]->label;
    row.report = done[k]->reports.front();
    row.mean_correlation = done[k]->mean_correlation;
    if (k > 0 && similarities.front()) row.jaccard_previous = (*similarities.front())(k, k - 1);
    result.summary.push_back(std::move(row));
  }

  // serialized writes into a temporary sibling directory
  const fs::path out = config.output_dir;
  const fs::path parent = out.has_parent_path() ? out.parent_path() : fs::path(".");
  const fs::path staging = parent / ("." + out.filename().string() + ".partial");
  std::error_code ec;
  fs::remove_all(staging, ec);
  try {
    fs::create_directories(staging);
    auto emit = [&](const std::string& name, const std::string& cls, const std::string& body) {
      io::write_file(staging / name, body);
      result.manifest.artifacts.push_back({name, cls, io::sha256_hex(body)});
    };

    if (config.emit.volatility) {
      std::vector<VolatilityReport> vols;
      for (const auto* a : done) vols.push_back(a->volatility);
      emit("volatility.csv", "volatility", io::volatility_csv(vols));
    }
    if (config.emit.correlation) {
      std::vector<std::pair<std::string, double>> means;
      for (const auto* a : done) {
        emit("corr_" + a->label + ".csv", "correlation", io::correlation_csv(a->correlation));
        means.emplace_back(a->label, a->mean_correlation);
      }
      emit("mean_correlation.csv", "correlation", io::mean_correlation_csv(means));
    }
    if (config.emit.networks) {
      for (const auto* a : done)
        for (std::size_t t = 0; t < config.thetas.size(); ++t) {
          const std::string stem = "network_" + a->label + detail::theta_suffix(config, config.thetas[t]);
          emit(stem + ".dot", "network", io::to_dot(a->clusters[t]));
          emit(stem + ".graphml", "network", io::to_graphml(a->clusters[t]));
        }
    }
    if (config.emit.metrics) {
      std::string metrics = io::metrics_header();
      for (const auto* a : done)
        for (const auto& r : a->reports) metrics += io::metrics_row(r);
      emit("metrics.csv", "metrics", metrics);
      if (config.all_components) {
        std::string comps = "window,theta,nodes,edges,components,largest\n";
        for (const auto* a : done)
          for (std::size_t t = 0; t < config.thetas.size(); ++t) {
            const auto& g = a->networks[t].graph;
            comps += csv::quote_if_needed(a->label) + "," + io::format_theta(config.thetas[t]) + "," +
                     std::to_string(g.node_count()) + "," + std::to_string(g.edge_count()) + "," +
                     std::to_string(connected_components(g).size()) + "," +
                     std::to_string(a->clusters[t].graph.node_count()) + "\n";
          }
        emit("components.csv", "metrics", comps);
      }
    }
    if (config.emit.jaccard) {
      for (std::size_t t = 0; t < config.thetas.size(); ++t) {
        if (!similarities[t]) continue;
        const std::string suffix = detail::theta_suffix(config, config.thetas[t]);
        emit("jaccard" + suffix + ".csv", "jaccard", io::jaccard_csv(*similarities[t]));
        emit("regime_flags" + suffix + ".txt", "jaccard", io::regime_flags_txt(flags[t]));
      }
    }
    std::sort(result.manifest.artifacts.begin(), result.manifest.artifacts.end(),
              [](const ArtifactEntry& a, const ArtifactEntry& b) { return a.path < b.path; });
    io::write_file(staging / "manifest.json", result.manifest.to_json());

    fs::remove_all(out);
    fs::rename(staging, out);
  } catch (...) {
    fs::remove_all(staging, ec);
    throw;
  }
  return result;
}

/// Fixed-width table, one row per analyzed window. The J column is shown
/// only when there is more than one window.
inline void print_summary(const RunResult& result, std::ostream& os) {
  const bool with_j = result.summary.size() > 1;
  auto opt = [](const std::optional<double>& v, int precision) {
    if (!v) return std::string("-");
    std::ostringstream s;
    s << std::fixed << std::setprecision(precision) << *v;
    return s.str();
  };
  os << std::left << std::setw(12) << "window" << std::right << std::setw(6) << "N" << std::setw(8) << "M"
     << std::setw(10) << "density" << std::setw(10) << "path" << std::setw(10) << "clust" << std::setw(10)
     << "meancorr";
  if (with_j) os << std::setw(10) << "J(prev)";
  os << '\n';
  for (const auto& row : result.summary) {
    os << std::left << std::setw(12) << row.window_label << std::right << std::setw(6) << row.report.cluster_size
       << std::setw(8) << row.report.edge_count << std::setw(10) << opt(row.report.density, 4) << std::setw(10)
       << opt(row.report.path_length, 4) << std::setw(10) << opt(row.report.clustering, 4) << std::setw(10)
       << opt(row.mean_correlation, 4);
    if (with_j) os << std::setw(10) << opt(row.jaccard_previous, 3);
    os << '\n';
  }
}

}  // namespace corrnet
