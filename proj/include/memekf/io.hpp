#pragma once

#include <json.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

#include "memekf/filter.hpp"
#include "memekf/mc_oracle.hpp"
#include "memekf/simulator.hpp"
#include "memekf/state.hpp"

// JSON (de)serialization for scenario files, diagnostics and reports.
// Matrices are written as arrays of rows (row-major); vectors as flat arrays.

namespace memekf {

using nlohmann::json;

namespace io_detail {

inline json vec_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline json mat_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Eigen::VectorXd vec_from_json(const json& a) {
  Eigen::VectorXd v(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) v(static_cast<Eigen::Index>(i)) = a[i].get<double>();
  return v;
}

inline Eigen::MatrixXd mat_from_json(const json& rows) {
  if (rows.empty()) return {};
  Eigen::MatrixXd m(rows.size(), rows[0].size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows[0].size())
      throw std::invalid_argument("matrix rows of unequal length");
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c].get<double>();
  }
  return m;
}

template <int N>
Eigen::Matrix<double, N, 1> fixed_vec(const json& a) {
  if (a.size() != N) throw std::invalid_argument("expected a vector of length " + std::to_string(N));
  Eigen::Matrix<double, N, 1> v;
  for (int i = 0; i < N; ++i) v(i) = a[static_cast<std::size_t>(i)].get<double>();
  return v;
}

template <int N>
Eigen::Matrix<double, N, N> fixed_mat(const json& rows) {
  const Eigen::MatrixXd m = mat_from_json(rows);
  if (m.rows() != N || m.cols() != N)
    throw std::invalid_argument("expected a " + std::to_string(N) + "x" + std::to_string(N) +
                                " matrix");
  return m;
}

}  // namespace io_detail

inline void to_json(json& j, const KinematicState& s) {
  j = json{{"mean", io_detail::vec_to_json(s.mean)}, {"cov", io_detail::mat_to_json(s.cov)}};
}

inline void from_json(const json& j, KinematicState& s) {
  s.mean = io_detail::vec_from_json(j.at("mean"));
  s.cov = io_detail::mat_from_json(j.at("cov"));
}

inline void to_json(json& j, const ShapeState& s) {
  j = json{{"mean", io_detail::vec_to_json(s.mean)}, {"cov", io_detail::mat_to_json(s.cov)}};
}

inline void from_json(const json& j, ShapeState& s) {
  s.mean = io_detail::fixed_vec<3>(j.at("mean"));
  s.cov = io_detail::fixed_mat<3>(j.at("cov"));
}

inline void to_json(json& j, const SensorModel& s) {
  j = json{{"meas_noise_cov", io_detail::mat_to_json(s.meas_noise_cov)},
           {"mult_noise_cov", io_detail::mat_to_json(s.mult_noise_cov)},
           {"poisson_mean", s.poisson_mean}};
}

inline void from_json(const json& j, SensorModel& s) {
  s.meas_noise_cov = io_detail::fixed_mat<2>(j.at("meas_noise_cov"));
  s.mult_noise_cov = io_detail::fixed_mat<2>(j.at("mult_noise_cov"));
  s.poisson_mean = j.at("poisson_mean").get<double>();
}

inline void to_json(json& j, const MeasurementBatch& b) {
  json dets = json::array();
  for (const auto& d : b.detections) dets.push_back({d(0), d(1)});
  j = json{{"time_index", b.time_index}, {"detections", std::move(dets)}};
}

inline void from_json(const json& j, MeasurementBatch& b) {
  b.time_index = j.at("time_index").get<int>();
  b.detections.clear();
  for (const auto& d : j.at("detections"))
    b.detections.emplace_back(d[0].get<double>(), d[1].get<double>());
}

inline void to_json(json& j, const DynamicsModel& d) {
  j = json{{"A_r", io_detail::mat_to_json(d.A_r)},
           {"A_p", io_detail::mat_to_json(d.A_p)},
           {"Q_r", io_detail::mat_to_json(d.Q_r)},
           {"Q_p", io_detail::mat_to_json(d.Q_p)},
           {"sampling_period", d.sampling_period},
           {"turn_coupling", d.turn_coupling}};
}

inline void from_json(const json& j, DynamicsModel& d) {
  d.A_r = io_detail::mat_from_json(j.at("A_r"));
  d.A_p = io_detail::fixed_mat<3>(j.at("A_p"));
  d.Q_r = io_detail::mat_from_json(j.at("Q_r"));
  d.Q_p = io_detail::fixed_mat<3>(j.at("Q_p"));
  d.sampling_period = j.at("sampling_period").get<double>();
  d.turn_coupling = j.at("turn_coupling").get<bool>();
}

inline void to_json(json& j, const EllipseSummary& e) {
  j = json{{"center", {e.center(0), e.center(1)}},
           {"extent", io_detail::mat_to_json(e.extent)}};
}

inline void from_json(const json& j, EllipseSummary& e) {
  e.center = io_detail::fixed_vec<2>(j.at("center"));
  e.extent = io_detail::fixed_mat<2>(j.at("extent"));
}

inline void to_json(json& j, const FilterState& s) {
  j = json{{"kin", s.kin}, {"shape", s.shape}, {"time_index", s.time_index}};
}

inline void from_json(const json& j, FilterState& s) {
  j.at("kin").get_to(s.kin);
  j.at("shape").get_to(s.shape);
  s.time_index = j.at("time_index").get<int>();
}

inline void to_json(json& j, const UpdateDiagnostics& d) {
  j = json{{"S", io_detail::mat_to_json(d.shape_mat)},
           {"J1", io_detail::mat_to_json(d.j1)},
           {"J2", io_detail::mat_to_json(d.j2)},
           {"C1", io_detail::mat_to_json(d.c1)},
           {"C2", io_detail::mat_to_json(d.c2)},
           {"M", io_detail::mat_to_json(d.sensitivity)},
           {"y_bar", {d.meas_pred(0), d.meas_pred(1)}},
           {"C_y", io_detail::mat_to_json(d.innovation_cov)},
           {"Y", io_detail::vec_to_json(d.pseudo)},
           {"Y_bar", io_detail::vec_to_json(d.pseudo_pred)},
           {"C_Y", io_detail::mat_to_json(d.pseudo_cov)},
           {"C_pY", io_detail::mat_to_json(d.shape_cross_cov)},
           {"axis_clamped", d.axis_clamped}};
}

inline std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::kStationary: return "stationary";
    case ScenarioKind::kCvWaypoints: return "cv_waypoints";
    case ScenarioKind::kVariableTurn: return "variable_turn";
  }
  throw std::invalid_argument("unknown scenario kind");
}

inline ScenarioKind scenario_kind_from_string(const std::string& s) {
  if (s == "stationary") return ScenarioKind::kStationary;
  if (s == "cv_waypoints") return ScenarioKind::kCvWaypoints;
  if (s == "variable_turn") return ScenarioKind::kVariableTurn;
  throw std::invalid_argument("unknown scenario kind: " + s);
}

inline void to_json(json& j, const FilterPriors& p) {
  j = json{{"kin", p.kin},
           {"shape", p.shape},
           {"q_kin", io_detail::mat_to_json(p.q_kin)},
           {"q_shape", io_detail::mat_to_json(p.q_shape)},
           {"turn_coupling", p.turn_coupling},
           {"rm_tau", p.rm_tau},
           {"rm_dof", p.rm_dof}};
}

inline void from_json(const json& j, FilterPriors& p) {
  j.at("kin").get_to(p.kin);
  j.at("shape").get_to(p.shape);
  p.q_kin = io_detail::mat_from_json(j.at("q_kin"));
  p.q_shape = io_detail::fixed_mat<3>(j.at("q_shape"));
  p.turn_coupling = j.at("turn_coupling").get<bool>();
  p.rm_tau = j.value("rm_tau", 50.0);
  p.rm_dof = j.value("rm_dof", 56.0);
}

inline void to_json(json& j, const ScenarioSpec& s) {
  json waypoints = json::array();
  for (const auto& w : s.waypoints) waypoints.push_back({w(0), w(1)});
  j = json{{"name", s.name},
           {"kind", to_string(s.kind)},
           {"steps", s.steps},
           {"T", s.T},
           {"speed_mps", s.speed_mps},
           {"waypoints", std::move(waypoints)},
           {"axes", {s.axes(0), s.axes(1)}},
           {"alpha0", s.alpha0},
           {"poisson_mean", s.poisson_mean},
           {"meas_noise_var", {s.meas_noise_var(0), s.meas_noise_var(1)}},
           {"seed", s.seed},
           {"priors", s.priors}};
  if (!s.q_shape_variants.empty()) {
    json variants = json::array();
    for (const auto& v : s.q_shape_variants) variants.push_back({v(0), v(1), v(2)});
    j["q_shape_variants"] = std::move(variants);
  }
}

inline void from_json(const json& j, ScenarioSpec& s) {
  s.name = j.value("name", std::string{});
  s.kind = scenario_kind_from_string(j.at("kind").get<std::string>());
  s.steps = j.at("steps").get<int>();
  s.T = j.at("T").get<double>();
  s.speed_mps = j.at("speed_mps").get<double>();
  s.waypoints.clear();
  for (const auto& w : j.at("waypoints"))
    s.waypoints.emplace_back(w[0].get<double>(), w[1].get<double>());
  s.axes = Eigen::Vector2d(j.at("axes")[0].get<double>(), j.at("axes")[1].get<double>());
  s.alpha0 = j.at("alpha0").get<double>();
  s.poisson_mean = j.at("poisson_mean").get<double>();
  s.meas_noise_var = Eigen::Vector2d(j.at("meas_noise_var")[0].get<double>(),
                                     j.at("meas_noise_var")[1].get<double>());
  s.seed = j.at("seed").get<std::uint64_t>();
  j.at("priors").get_to(s.priors);
  s.q_shape_variants.clear();
  if (j.contains("q_shape_variants")) {
    for (const auto& v : j.at("q_shape_variants"))
      s.q_shape_variants.emplace_back(v[0].get<double>(), v[1].get<double>(), v[2].get<double>());
  }
}

inline void to_json(json& j, const OracleReport& r) {
  j = json{{"target", r.target},
           {"analytic", io_detail::mat_to_json(r.analytic)},
           {"mc", io_detail::mat_to_json(r.mc)},
           {"samples", r.samples},
           {"rel_frobenius", r.rel_frobenius},
           {"mc_standard_error", r.mc_standard_error}};
}

inline void from_json(const json& j, OracleReport& r) {
  r.target = j.at("target").get<std::string>();
  r.analytic = io_detail::mat_from_json(j.at("analytic"));
  r.mc = io_detail::mat_from_json(j.at("mc"));
  r.samples = j.at("samples").get<long>();
  r.rel_frobenius = j.at("rel_frobenius").get<double>();
  r.mc_standard_error = j.at("mc_standard_error").get<double>();
}

}  // namespace memekf
