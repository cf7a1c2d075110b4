#include "herding/io.hpp"

#include "herding/error.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace herding::io {

using nlohmann::ordered_json;

namespace {

[[noreturn]] void config_error(const std::string& msg) { throw HerdingError(ErrorCode::ConfigError, msg); }

void reject_unknown(const ordered_json& obj, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (!known.contains(key)) config_error("unknown field \"" + key + "\"" + where);
  }
}

double number(const ordered_json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) config_error(std::string("field \"") + key + "\" must be a number");
  return v.get<double>();
}

std::size_t count(const ordered_json& obj, const char* key, std::size_t fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_unsigned()) config_error(std::string("field \"") + key + "\" must be a non-negative integer");
  return v.get<std::size_t>();
}

Vec2 vec2(const ordered_json& v, const std::string& what) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    config_error(what + " must be a [x, y] pair");
  }
  return Vec2(v[0].get<double>(), v[1].get<double>());
}

std::vector<Vec2> vec2_list(const ordered_json& v, const std::string& what) {
  if (!v.is_array()) config_error(what + " must be a list of [x, y] pairs");
  std::vector<Vec2> out;
  for (const auto& item : v) out.push_back(vec2(item, what));
  return out;
}

ordered_json to_json(const Vec2& p) { return ordered_json::array({p.x(), p.y()}); }

ordered_json to_json(const std::vector<Vec2>& ps) {
  auto arr = ordered_json::array();
  for (const auto& p : ps) arr.push_back(to_json(p));
  return arr;
}

ordered_json finite_or_null(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

std::string sci(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.16e", v);
  return buf;
}

}  // namespace

ScenarioConfig config_from_json(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    config_error(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) config_error("config must be a JSON object");
  reject_unknown(doc,
                 {"description", "m", "n", "gains", "goal_center", "goal_radius", "r_avoid", "v_max", "neighbor_dist",
                  "dt", "t_max", "hold_time", "seed", "mode", "jacobian_mode", "initial_evaders", "initial_herders",
                  "singularity_eps", "perturbation"},
                 "");

  ScenarioConfig cfg = default_scenario();
  if (doc.contains("gains")) {
    const auto& g = doc.at("gains");
    if (!g.is_object()) config_error("gains must be an object");
    reject_unknown(g, {"kappa_H", "gamma_h", "gamma_a", "mu", "alpha_split", "k_h", "k_a"}, " in gains");
    cfg.gains.kappa_H = number(g, "kappa_H", cfg.gains.kappa_H);
    cfg.gains.gamma_h = number(g, "gamma_h", cfg.gains.gamma_h);
    cfg.gains.gamma_a = number(g, "gamma_a", cfg.gains.gamma_a);
    cfg.gains.mu = number(g, "mu", cfg.gains.mu);
    cfg.gains.alpha_split = number(g, "alpha_split", cfg.gains.alpha_split);
    cfg.gains.k_h = number(g, "k_h", cfg.gains.k_h);
    cfg.gains.k_a = number(g, "k_a", cfg.gains.k_a);
  }
  if (doc.contains("goal_center")) cfg.goal_center = vec2(doc.at("goal_center"), "goal_center");
  cfg.goal_radius = number(doc, "goal_radius", cfg.goal_radius);
  cfg.r_avoid = number(doc, "r_avoid", cfg.r_avoid);
  cfg.v_max = number(doc, "v_max", cfg.v_max);
  if (doc.contains("neighbor_dist")) {
    const auto& v = doc.at("neighbor_dist");
    if (v.is_string() && v.get<std::string>() == "unbounded") {
      cfg.neighbor_dist.reset();
    } else if (v.is_number()) {
      cfg.neighbor_dist = v.get<double>();
    } else {
      config_error("neighbor_dist must be a number or \"unbounded\"");
    }
  }
  cfg.dt = number(doc, "dt", cfg.dt);
  cfg.t_max = number(doc, "t_max", cfg.t_max);
  cfg.hold_time = number(doc, "hold_time", cfg.hold_time);
  if (doc.contains("seed")) {
    if (!doc.at("seed").is_number_unsigned()) config_error("seed must be a non-negative integer");
    cfg.seed = doc.at("seed").get<std::uint64_t>();
  }
  if (doc.contains("mode")) {
    const auto v = doc.at("mode").is_string() ? doc.at("mode").get<std::string>() : std::string();
    if (v == "centralized") cfg.mode = ControlMode::Centralized;
    else if (v == "decentralized") cfg.mode = ControlMode::Decentralized;
    else config_error("mode must be \"centralized\" or \"decentralized\"");
  }
  if (doc.contains("jacobian_mode")) {
    const auto v = doc.at("jacobian_mode").is_string() ? doc.at("jacobian_mode").get<std::string>() : std::string();
    if (v == "exact_per_herder") cfg.jacobian_mode = JacobianMode::ExactPerHerder;
    else if (v == "paper_literal") cfg.jacobian_mode = JacobianMode::PaperLiteral;
    else config_error("jacobian_mode must be \"exact_per_herder\" or \"paper_literal\"");
  }
  if (doc.contains("initial_evaders")) cfg.initial_evaders = vec2_list(doc.at("initial_evaders"), "initial_evaders");
  if (doc.contains("initial_herders")) cfg.initial_herders = vec2_list(doc.at("initial_herders"), "initial_herders");
  cfg.m = count(doc, "m", cfg.initial_evaders.size());
  cfg.n = count(doc, "n", cfg.initial_herders.size());
  cfg.singularity_eps = number(doc, "singularity_eps", cfg.singularity_eps);

  cfg.perturbation.magnitude = 0.05 * cfg.v_max;
  if (doc.contains("perturbation")) {
    const auto& p = doc.at("perturbation");
    if (!p.is_object()) config_error("perturbation must be an object");
    reject_unknown(p, {"stall_speed", "dwell", "magnitude"}, " in perturbation");
    cfg.perturbation.stall_speed = number(p, "stall_speed", cfg.perturbation.stall_speed);
    cfg.perturbation.dwell = number(p, "dwell", cfg.perturbation.dwell);
    cfg.perturbation.magnitude = number(p, "magnitude", cfg.perturbation.magnitude);
  }
  cfg.validate();
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw HerdingError(ErrorCode::IoError, "cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return config_from_json(buf.str());
}

std::string config_to_json(const ScenarioConfig& cfg) {
  ordered_json doc;
  doc["m"] = cfg.m;
  doc["n"] = cfg.n;
  doc["gains"] = {{"kappa_H", cfg.gains.kappa_H}, {"gamma_h", cfg.gains.gamma_h},
                  {"gamma_a", cfg.gains.gamma_a}, {"mu", cfg.gains.mu},
                  {"alpha_split", cfg.gains.alpha_split}, {"k_h", cfg.gains.k_h},
                  {"k_a", cfg.gains.k_a}};
  doc["goal_center"] = to_json(cfg.goal_center);
  doc["goal_radius"] = cfg.goal_radius;
  doc["r_avoid"] = cfg.r_avoid;
  doc["v_max"] = cfg.v_max;
  doc["neighbor_dist"] = cfg.neighbor_dist ? ordered_json(*cfg.neighbor_dist) : ordered_json("unbounded");
  doc["dt"] = cfg.dt;
  doc["t_max"] = cfg.t_max;
  doc["hold_time"] = cfg.hold_time;
  doc["seed"] = cfg.seed;
  doc["mode"] = to_string(cfg.mode);
  doc["jacobian_mode"] = to_string(cfg.jacobian_mode);
  doc["initial_evaders"] = to_json(cfg.initial_evaders);
  doc["initial_herders"] = to_json(cfg.initial_herders);
  doc["singularity_eps"] = cfg.singularity_eps;
  doc["perturbation"] = {{"stall_speed", cfg.perturbation.stall_speed},
                         {"dwell", cfg.perturbation.dwell},
                         {"magnitude", cfg.perturbation.magnitude}};
  return doc.dump(2) + "\n";
}

std::string trajectory_csv(const sim::TrajectoryLog& log) {
  std::string out = "t";
  for (std::size_t i = 0; i < log.m; ++i) out += ",ex_" + std::to_string(i) + ",ey_" + std::to_string(i);
  for (std::size_t k = 0; k < log.n; ++k) out += ",hx_" + std::to_string(k) + ",hy_" + std::to_string(k);
  for (std::size_t k = 0; k < log.n; ++k) out += ",ux_" + std::to_string(k) + ",uy_" + std::to_string(k);
  for (std::size_t i = 0; i < log.m; ++i) out += ",h1_" + std::to_string(i);
  for (const auto& [i, j] : log.pairs) out += ",h2_" + std::to_string(i) + "_" + std::to_string(j);
  out += ",relaxed\n";

  for (const auto& rec : log.records) {
    out += sci(rec.t);
    for (const auto& p : rec.evaders) out += "," + sci(p.x()) + "," + sci(p.y());
    for (const auto& p : rec.herders) out += "," + sci(p.x()) + "," + sci(p.y());
    for (const auto& u : rec.u_H) out += "," + sci(u.x()) + "," + sci(u.y());
    for (double v : rec.h1_pos) out += "," + sci(v);
    for (double v : rec.h2_pos) out += "," + sci(v);
    out += rec.relaxed ? ",1\n" : ",0\n";
  }
  return out;
}

std::string metrics_json(const sim::TrajectoryLog& log, double hold_time) {
  const auto& s = log.summary;
  ordered_json doc;
  doc["summary"] = {
      {"success", s.success},
      {"time_to_goal", s.time_to_goal ? ordered_json(*s.time_to_goal) : ordered_json(nullptr)},
      {"t_end", s.t_end},
      {"steps", s.steps},
      {"min_h2_pos", finite_or_null(s.min_h2_pos)},
      {"min_h2_full", finite_or_null(s.min_h2_full)},
      {"min_c", finite_or_null(s.min_c)},
      {"clamp_count", s.clamp_count},
      {"relax_count", s.relax_count},
      {"perturb_count", s.perturb_count},
      {"max_herder_path", s.max_herder_path},
      {"error", s.error ? ordered_json(*s.error) : ordered_json(nullptr)},
  };
  if (log.records.empty()) return doc.dump(2) + "\n";

  const auto report = sim::metrics(log, hold_time);
  auto stats = [](const std::vector<sim::WindowStats>& ws) {
    auto arr = ordered_json::array();
    for (const auto& w : ws) arr.push_back({{"mean", w.mean}, {"min", w.min}, {"max", w.max}});
    return arr;
  };
  doc["final_window"] = {{"start", report.window_start},
                         {"h1_pos", stats(report.final_h1_pos)},
                         {"h2_pos", stats(report.final_h2_pos)}};
  auto pair_names = ordered_json::array();
  for (const auto& [i, j] : log.pairs) pair_names.push_back(std::to_string(i) + "_" + std::to_string(j));
  doc["series"] = {{"t", report.t},         {"pairs", pair_names},        {"h1_pos", report.h1_pos},
                   {"h2_pos", report.h2_pos}, {"d_goal", report.d_goal}, {"d_safe", report.d_safe}};
  return doc.dump(2) + "\n";
}

void write_atomic(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw HerdingError(ErrorCode::IoError, "cannot write " + tmp.string());
    out << contents;
    if (!out.flush()) throw HerdingError(ErrorCode::IoError, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw HerdingError(ErrorCode::IoError, "cannot rename onto " + path.string() + ": " + ec.message());
}

}  // namespace herding::io
