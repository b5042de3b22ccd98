#pragma once

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "memekf/filter.hpp"
#include "memekf/io.hpp"
#include "memekf/mc_oracle.hpp"
#include "memekf/metrics.hpp"
#include "memekf/moments.hpp"
#include "memekf/random_matrix.hpp"
#include "memekf/scenarios.hpp"
#include "memekf/simulator.hpp"

// Campaign driver behind the command line tool. A campaign is a pure function
// of the scenario bytes and the run configuration: run r draws its
// measurements from substream(substream(scenario.seed, base_seed), r), and
// floats are printed with 17 significant digits, so identical configurations
// produce byte-identical outputs.

namespace memekf {

struct RunConfig {
  std::string scenario;                              // built-in name or file path
  std::vector<std::string> trackers = {"mem-ekf-star"};
  int runs = 1;
  std::uint64_t base_seed = 0;
  std::string out_dir;
  bool emit_diagnostics = false;
};

namespace harness_detail {

inline std::uint64_t fnv1a(const std::string& bytes, std::uint64_t hash = 0xcbf29ce484222325ULL) {
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

inline std::string fmt17(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

struct LoadedScenario {
  ScenarioSpec spec;
  std::string bytes;  // canonical JSON for built-ins, raw file bytes otherwise
};

inline LoadedScenario load_scenario(const std::string& name_or_path) {
  if (auto builtin = builtin_scenario(name_or_path)) {
    json j = *builtin;
    return {*builtin, j.dump(2)};
  }
  std::ifstream in(name_or_path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open scenario file: " + name_or_path);
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string bytes = buf.str();
  ScenarioSpec spec = json::parse(bytes).get<ScenarioSpec>();
  return {std::move(spec), std::move(bytes)};
}

struct StepRecord {
  int k = 0;
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  double alpha = 0.0;
  double l1 = 0.0;
  double l2 = 0.0;
  double gw = 0.0;
};

struct TrackResult {
  std::vector<StepRecord> steps;
  long clamp_events = 0;
  std::vector<json> diagnostics;  // one entry per single update when requested
};

/// Ellipse parameters of an SPD extent: orientation of the major axis and the
/// semi-axes sorted descending. Used for the result rows of the baseline
/// tracker, which has no native (alpha, l1, l2) state.
inline Eigen::Vector3d extent_to_params(const Eigen::Matrix2d& extent) {
  const SymEigen2 eig = sym_eigendecomposition(symmetrized(extent));
  const Eigen::Vector2d major = eig.vectors.col(1);
  return {std::atan2(major(1), major(0)), std::sqrt(std::max(eig.values[1], 0.0)),
          std::sqrt(std::max(eig.values[0], 0.0))};
}

inline TrackResult track_mem_ekf(const ScenarioSpec& spec, const GroundTruth& truth,
                                 const std::vector<MeasurementBatch>& batches,
                                 bool want_diagnostics) {
  const FilterConfig cfg = FilterConfig::make(spec.sensor(), spec.dynamics());
  FilterState state{spec.priors.kin, spec.priors.shape, 0};

  TrackResult result;
  ScanStats stats;
  for (std::size_t k = 0; k < batches.size(); ++k) {
    if (k > 0) {
      state = cfg.dynamics.turn_coupling ? predict_turn_coupled(state, cfg)
                                         : predict(state, cfg);
    }
    if (want_diagnostics) {
      // Same fold as update_scan, with the per-update record captured.
      for (std::size_t i = 0; i < batches[k].detections.size(); ++i) {
        UpdateDiagnostics diag;
        state = update_single(state, batches[k].detections[i], cfg, &diag);
        if (diag.axis_clamped) ++stats.clamp_events;
        json entry = diag;
        entry["k"] = static_cast<int>(k);
        entry["detection"] = static_cast<int>(i);
        result.diagnostics.push_back(std::move(entry));
      }
      state.time_index = batches[k].time_index;
    } else {
      state = update_scan(state, batches[k], cfg, &stats);
    }
    const EllipseSummary est = to_ellipse_summary(state.kin, state.shape);
    result.steps.push_back({static_cast<int>(k), est.center, state.shape.alpha(),
                            state.shape.l1(), state.shape.l2(),
                            gw_distance(truth.summary_at(k), est)});
  }
  result.clamp_events = stats.clamp_events;
  return result;
}

inline TrackResult track_random_matrix(const ScenarioSpec& spec, const GroundTruth& truth,
                                       const std::vector<MeasurementBatch>& batches) {
  const DynamicsModel dyn = spec.dynamics();
  const SensorModel sensor = spec.sensor();

  RMState state;
  state.kin_mean = spec.priors.kin.mean;
  state.kin_cov = spec.priors.kin.cov;
  const Eigen::Matrix2d s0 = shape_matrix(spec.priors.shape.mean);
  state.dof = spec.priors.rm_dof;
  state.scale = (state.dof - 6.0) * Eigen::Matrix2d(s0 * s0.transpose());
  state.tau = spec.priors.rm_tau;
  state.scaling = 4.0;

  TrackResult result;
  for (std::size_t k = 0; k < batches.size(); ++k) {
    if (k > 0) state = rm_predict(state, dyn);
    if (!batches[k].detections.empty()) state = rm_update(state, batches[k], sensor);
    const EllipseSummary est = rm_to_summary(state);
    const Eigen::Vector3d params = extent_to_params(est.extent);
    result.steps.push_back({static_cast<int>(k), est.center, params(0), params(1), params(2),
                            gw_distance(truth.summary_at(k), est)});
  }
  return result;
}

inline std::string csv_of(const std::vector<StepRecord>& steps) {
  std::ostringstream out;
  out << "k,cx,cy,alpha,l1,l2,gw\n";
  for (const StepRecord& s : steps) {
    out << s.k << ',' << fmt17(s.center(0)) << ',' << fmt17(s.center(1)) << ','
        << fmt17(s.alpha) << ',' << fmt17(s.l1) << ',' << fmt17(s.l2) << ',' << fmt17(s.gw)
        << '\n';
  }
  return out.str();
}

/// Aggregate rows: per-step mean of the ellipse parameters over runs and the
/// root mean square of the distances. With a single run this reproduces the
/// run file byte for byte.
inline std::string aggregate_csv(const std::vector<std::vector<StepRecord>>& runs) {
  std::ostringstream out;
  out << "k,cx,cy,alpha,l1,l2,gw\n";
  if (runs.empty()) return out.str();
  const std::size_t len = runs.front().size();
  const double n = static_cast<double>(runs.size());
  for (std::size_t k = 0; k < len; ++k) {
    double cx = 0, cy = 0, alpha = 0, l1 = 0, l2 = 0, gw2 = 0;
    for (const auto& run : runs) {
      cx += run[k].center(0);
      cy += run[k].center(1);
      alpha += run[k].alpha;
      l1 += run[k].l1;
      l2 += run[k].l2;
      gw2 += run[k].gw * run[k].gw;
    }
    out << runs.front()[k].k << ',' << fmt17(cx / n) << ',' << fmt17(cy / n) << ','
        << fmt17(alpha / n) << ',' << fmt17(l1 / n) << ',' << fmt17(l2 / n) << ','
        << fmt17(std::sqrt(gw2 / n)) << '\n';
  }
  return out.str();
}

class OutputSet {
 public:
  explicit OutputSet(std::filesystem::path root) : root_(std::move(root)) {}

  void write(const std::filesystem::path& relative, const std::string& content) {
    const std::filesystem::path full = root_ / relative;
    std::filesystem::create_directories(full.parent_path());
    std::ofstream out(full, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + full.string());
    out << content;
    written_.push_back(full);
    names_.push_back(relative.generic_string());
  }

  void remove_all_written() {
    for (const auto& p : written_) {
      std::error_code ec;
      std::filesystem::remove(p, ec);
    }
  }

  const std::vector<std::string>& names() const { return names_; }

 private:
  std::filesystem::path root_;
  std::vector<std::filesystem::path> written_;
  std::vector<std::string> names_;
};

inline std::string run_file_name(int run) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "run_%03d.csv", run);
  return buf;
}

}  // namespace harness_detail

/// Runs a Monte-Carlo campaign: per tracker and run, simulate, track, score,
/// and write a per-run CSV; then an aggregate RMGW CSV per tracker and a JSON
/// manifest. With a single tracker the files live directly in out_dir,
/// otherwise in one subdirectory per tracker. Returns a process exit code;
/// partially written outputs are removed on failure.
inline int run_campaign(const RunConfig& cfg, std::string* error_message = nullptr) {
  using namespace harness_detail;
  OutputSet outputs{cfg.out_dir.empty() ? std::filesystem::path{"."}
                                        : std::filesystem::path{cfg.out_dir}};
  try {
    if (cfg.runs < 1) throw std::runtime_error("runs must be >= 1");
    if (cfg.trackers.empty()) throw std::runtime_error("at least one tracker is required");
    for (const std::string& t : cfg.trackers) {
      if (t != "mem-ekf-star" && t != "random-matrix")
        throw std::runtime_error("unknown tracker: " + t);
    }

    const LoadedScenario loaded = load_scenario(cfg.scenario);
    const GroundTruth truth = gen_truth(loaded.spec);
    const std::uint64_t campaign_seed = substream(loaded.spec.seed, cfg.base_seed);

    std::string config_canon = "runs=" + std::to_string(cfg.runs) +
                               ";base_seed=" + std::to_string(cfg.base_seed) + ";trackers=";
    for (const std::string& t : cfg.trackers) config_canon += t + ",";
    config_canon += ";diagnostics=" + std::to_string(cfg.emit_diagnostics ? 1 : 0);
    const std::uint64_t config_hash = fnv1a(config_canon, fnv1a(loaded.bytes));

    const bool subdirs = cfg.trackers.size() > 1;
    json manifest;
    {
      char hash_hex[19];
      std::snprintf(hash_hex, sizeof(hash_hex), "0x%016" PRIx64, config_hash);
      manifest["config_hash"] = hash_hex;
    }
    manifest["scenario"] = cfg.scenario;
    manifest["scenario_name"] = loaded.spec.name;
    manifest["runs"] = cfg.runs;
    manifest["base_seed"] = cfg.base_seed;
    manifest["trackers"] = cfg.trackers;
    json run_seeds = json::array();
    for (int r = 0; r < cfg.runs; ++r)
      run_seeds.push_back(substream(campaign_seed, static_cast<std::uint64_t>(r)));
    manifest["run_seeds"] = std::move(run_seeds);

    json clamp_counts = json::object();
    for (const std::string& tracker : cfg.trackers) {
      const std::filesystem::path base = subdirs ? std::filesystem::path{tracker}
                                                 : std::filesystem::path{};
      std::vector<std::vector<StepRecord>> all_runs;
      std::vector<long> clamps;
      for (int r = 0; r < cfg.runs; ++r) {
        const std::uint64_t run_seed = substream(campaign_seed, static_cast<std::uint64_t>(r));
        const auto batches = gen_measurements(truth, loaded.spec.sensor(), run_seed);
        TrackResult result;
        if (tracker == "mem-ekf-star") {
          result = track_mem_ekf(loaded.spec, truth, batches, cfg.emit_diagnostics);
        } else {
          result = track_random_matrix(loaded.spec, truth, batches);
        }
        outputs.write(base / run_file_name(r), csv_of(result.steps));
        if (cfg.emit_diagnostics && !result.diagnostics.empty()) {
          std::string lines;
          for (const json& d : result.diagnostics) lines += d.dump() + "\n";
          char name[40];
          std::snprintf(name, sizeof(name), "diagnostics_run_%03d.jsonl", r);
          outputs.write(base / name, lines);
        }
        clamps.push_back(result.clamp_events);
        all_runs.push_back(std::move(result.steps));
      }
      outputs.write(base / "aggregate.csv", aggregate_csv(all_runs));
      clamp_counts[tracker] = clamps;
    }
    manifest["clamp_events"] = std::move(clamp_counts);
    manifest["files"] = outputs.names();
    outputs.write("manifest.json", manifest.dump(2) + "\n");
    return 0;
  } catch (const std::exception& e) {
    outputs.remove_all_written();
    if (error_message != nullptr) *error_message = e.what();
    return 1;
  }
}

/// Analytic-versus-Monte-Carlo reports for the named moment targets, written
/// as a JSON array. Targets: spread_cov, pseudo_moments, cross_cov.
inline int run_oracle(const std::vector<std::string>& targets, long samples, std::uint64_t seed,
                      const std::string& out_file, std::string* error_message = nullptr) {
  try {
    const Eigen::Vector3d p_mean(0.0, 2.0, 12.0);
    const Eigen::Matrix3d p_cov = Eigen::Vector3d(1.0, 4.0, 9.0).asDiagonal();
    const Eigen::Matrix2d h_cov = 0.25 * Eigen::Matrix2d::Identity();
    const Eigen::Matrix2d v_cov = 2.0 * Eigen::Matrix2d::Identity();
    const Eigen::Vector2d r_mean(1.0, 1.0);
    const Eigen::Matrix2d r_cov = Eigen::Matrix2d::Identity();
    Eigen::Matrix2d y_cov;
    y_cov << 2.0, 1.0, 1.0, 3.0;

    json reports = json::array();
    for (std::size_t i = 0; i < targets.size(); ++i) {
      const std::string& target = targets[i];
      const std::uint64_t target_seed = substream(seed, i);
      if (target == "spread_cov") {
        const Eigen::MatrixXd analytic = spread_covariance(p_mean, p_cov, h_cov).total();
        reports.push_back(
            make_report(target, analytic, mc_spread_cov(p_mean, p_cov, h_cov, samples, target_seed)));
      } else if (target == "pseudo_moments") {
        const McMoments mc = mc_pseudo_moments(y_cov, samples, target_seed);
        McEstimate cov_est{mc.cov, mc.cov_se, mc.samples};
        reports.push_back(make_report("pseudo_moments.cov", pseudo_meas_cov(y_cov), cov_est));
        McEstimate mean_est{mc.mean, mc.mean_se, mc.samples};
        reports.push_back(
            make_report("pseudo_moments.mean", Eigen::MatrixXd(pseudo_meas_mean(y_cov)), mean_est));
      } else if (target == "cross_cov") {
        const Eigen::MatrixXd analytic = pseudo_cross_cov(p_mean, p_cov, h_cov);
        reports.push_back(make_report(
            target, analytic,
            mc_cross_cov(p_mean, p_cov, h_cov, v_cov, r_mean, r_cov, samples, target_seed)));
      } else {
        throw std::runtime_error("unknown oracle target: " + target);
      }
    }
    std::ofstream out(out_file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + out_file);
    out << reports.dump(2) << "\n";
    return 0;
  } catch (const std::exception& e) {
    if (error_message != nullptr) *error_message = e.what();
    return 1;
  }
}

}  // namespace memekf
