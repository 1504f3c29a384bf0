#pragma once

#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "xoq/dynamics.hpp"
#include "xoq/effective_model.hpp"
#include "xoq/synth.hpp"

// JSON file formats: pulse sequences, single-qubit wrapper pairs, Hubbard
// and device parameters, search configuration and reports.

namespace xoq {

using nlohmann::json;

inline json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open \"" + path + "\"");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("parse error in \"" + path + "\": " + e.what());
  }
  return j;
}

inline void save_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open \"" + path + "\" for writing");
  out << j.dump(2) << '\n';
  if (!out.good()) throw std::runtime_error("write to \"" + path + "\" failed");
}

inline ConfigName config_name_from_string(const std::string& s) {
  if (s == "A" || s == "a") return ConfigName::A;
  if (s == "B" || s == "b") return ConfigName::B;
  throw std::invalid_argument("configuration must be \"A\" or \"B\", got \"" +
                              s + "\"");
}

// ---- pulse sequences -------------------------------------------------------

inline json sequence_to_json(const PulseSequence& seq) {
  json steps = json::array();
  for (const PulseStep& step : seq.steps) {
    if (step.is_wait()) {
      steps.push_back(json{{"wait", *step.wait}});
      continue;
    }
    json pulses = json::array();
    for (const Pulse& p : step.pulses) {
      json jp = {{"pair", to_string(p.pair)}, {"duration", p.duration}};
      if (p.strength != 1.0) jp["strength"] = p.strength;
      pulses.push_back(std::move(jp));
    }
    steps.push_back(json{{"pulses", std::move(pulses)}});
  }
  return json{{"configuration", to_string(seq.configuration.name)},
              {"all_controllable", seq.configuration.all_controllable},
              {"jmax_fraction_fixed", seq.jmax_fraction_fixed},
              {"steps", std::move(steps)}};
}

inline PulseSequence sequence_from_json(const json& j) {
  PulseSequence seq;
  const ConfigName name =
      config_name_from_string(j.at("configuration").get<std::string>());
  const bool all_controllable = j.value("all_controllable", false);
  seq.configuration =
      all_controllable
          ? (name == ConfigName::A ? Configuration::a_all_controllable()
                                   : Configuration::b_all_controllable())
          : Configuration::physical(name);
  seq.jmax_fraction_fixed = j.value("jmax_fraction_fixed", 0.5);
  for (const json& js : j.at("steps")) {
    if (js.contains("wait")) {
      seq.steps.push_back(PulseStep::wait_for(js.at("wait").get<double>()));
      continue;
    }
    std::vector<Pulse> pulses;
    for (const json& jp : js.at("pulses")) {
      pulses.push_back(Pulse{pair_from_name(jp.at("pair").get<std::string>()),
                             jp.at("duration").get<double>(),
                             jp.value("strength", 1.0)});
    }
    seq.steps.push_back(PulseStep::of(std::move(pulses)));
  }
  validate_sequence(seq);
  return seq;
}

inline PulseSequence load_sequence(const std::string& path) {
  return sequence_from_json(load_json(path));
}

// ---- single-qubit wrapper pairs --------------------------------------------

struct WrapperSequences {
  PulseSequence before;
  PulseSequence after;
};

// Wrapper files list the before/after single-qubit operations as flat
// arrays of {pair, duration}; they run in the all-controllable variant of
// the named configuration (no fixed background).
inline WrapperSequences wrappers_from_json(const json& j) {
  const ConfigName name =
      config_name_from_string(j.at("configuration").get<std::string>());
  const Configuration config = name == ConfigName::A
                                   ? Configuration::a_all_controllable()
                                   : Configuration::b_all_controllable();
  const auto parse_list = [&](const json& list) {
    PulseSequence seq;
    seq.configuration = config;
    for (const json& jp : list) {
      seq.steps.push_back(PulseStep::single(
          pair_from_name(jp.at("pair").get<std::string>()),
          jp.at("duration").get<double>(), jp.value("strength", 1.0)));
    }
    validate_sequence(seq);
    return seq;
  };
  return {parse_list(j.at("before")), parse_list(j.at("after"))};
}

inline WrapperSequences load_wrappers(const std::string& path) {
  return wrappers_from_json(load_json(path));
}

// ---- Hubbard / device parameters -------------------------------------------

inline int site_from_name(const std::string& name) {
  if (name.size() == 2 && (name[0] == 'a' || name[0] == 'b') &&
      name[1] >= '1' && name[1] <= '3') {
    return (name[0] == 'b' ? 3 : 0) + (name[1] - '1');
  }
  throw std::invalid_argument("unknown site name: \"" + name + "\"");
}

inline SitePair site_pair_from_name(const std::string& name) {
  if (name.size() != 4) {
    throw std::invalid_argument("unknown pair name: \"" + name + "\"");
  }
  return site_pair(site_from_name(name.substr(0, 2)),
                   site_from_name(name.substr(2, 2)));
}

inline HubbardParameters hubbard_from_json(const json& j) {
  HubbardParameters p;
  for (const auto& [name, value] : j.at("eps").items()) {
    p.eps[site_from_name(name)] = value.get<double>();
  }
  for (const auto& [name, value] : j.at("u_site").items()) {
    p.u_site[site_from_name(name)] = value.get<double>();
  }
  const auto read_pairs = [&](const char* key, std::map<SitePair, double>& out) {
    if (!j.contains(key)) return;
    for (const auto& [name, value] : j.at(key).items()) {
      out[site_pair_from_name(name)] = value.get<double>();
    }
  };
  read_pairs("t", p.t);
  read_pairs("u_pair", p.u_pair);
  read_pairs("je", p.je);
  read_pairs("jp", p.jp);
  read_pairs("jt", p.jt);
  return p;
}

inline HubbardParameters load_hubbard(const std::string& path) {
  return hubbard_from_json(load_json(path));
}

inline DeviceParameters device_from_json(const json& j) {
  DeviceParameters d{};
  d.tr_uev = j.at("tr_uev").get<double>();
  d.de_st_uev = j.at("de_st_uev").get<double>();
  if (j.contains("w_nm")) d.w_nm = j.at("w_nm").get<double>();
  if (j.contains("d_intergate_nm")) {
    d.d_intergate_nm = j.at("d_intergate_nm").get<double>();
  }
  if (j.contains("f_back_mv_per_cm")) {
    d.f_back_mv_per_cm = j.at("f_back_mv_per_cm").get<double>();
  }
  if (j.contains("de_v_uev")) d.de_v_uev = j.at("de_v_uev").get<double>();
  return d;
}

inline json couplings_to_json(const EffectiveCouplings& c,
                              const EnergyDifferences& de) {
  json jc;
  for (const auto& [pair, value] : c.j) jc[pair_label(pair)] = value;
  json jd;
  for (const auto& [name, value] : de.as_map()) jd[name] = value;
  return json{{"configuration", to_string(c.configuration)},
              {"couplings", std::move(jc)},
              {"energy_differences", std::move(jd)}};
}

// ---- search configuration and reports --------------------------------------

inline SearchConfig search_config_from_json(const json& j) {
  SearchConfig c;
  c.population = j.value("population", c.population);
  c.generations = j.value("generations", c.generations);
  c.tournament = j.value("tournament", c.tournament);
  c.duration_sigma = j.value("duration_sigma", c.duration_sigma);
  c.p_insert = j.value("p_insert", c.p_insert);
  c.p_delete = j.value("p_delete", c.p_delete);
  c.p_pair_swap = j.value("p_pair_swap", c.p_pair_swap);
  c.p_crossover = j.value("p_crossover", c.p_crossover);
  c.simplex_period = j.value("simplex_period", c.simplex_period);
  c.simplex_iterations = j.value("simplex_iterations", c.simplex_iterations);
  c.target_f = j.value("target_f", c.target_f);
  c.seed = j.value("seed", c.seed);
  c.max_steps = j.value("max_steps", c.max_steps);
  c.t_max_step = j.value("t_max_step", c.t_max_step);
  if (j.contains("objective")) {
    const std::string o = j.at("objective").get<std::string>();
    if (o == "f9") c.objective = ObjectiveKind::f9;
    else if (o == "f_joint") c.objective = ObjectiveKind::f_joint;
    else throw std::invalid_argument("objective must be \"f9\" or \"f_joint\"");
  }
  if (j.contains("step_mode")) {
    const std::string m = j.at("step_mode").get<std::string>();
    if (m == "simultaneous") c.step_mode = StepMode::simultaneous;
    else if (m == "sequential") c.step_mode = StepMode::sequential;
    else throw std::invalid_argument("step_mode must be \"simultaneous\" or \"sequential\"");
  }
  validate_search_config(c);
  return c;
}

inline json search_config_to_json(const SearchConfig& c) {
  return json{
      {"population", c.population},
      {"generations", c.generations},
      {"tournament", c.tournament},
      {"duration_sigma", c.duration_sigma},
      {"p_insert", c.p_insert},
      {"p_delete", c.p_delete},
      {"p_pair_swap", c.p_pair_swap},
      {"p_crossover", c.p_crossover},
      {"simplex_period", c.simplex_period},
      {"simplex_iterations", c.simplex_iterations},
      {"target_f", c.target_f},
      {"seed", c.seed},
      {"max_steps", c.max_steps},
      {"t_max_step", c.t_max_step},
      {"objective", c.objective == ObjectiveKind::f9 ? "f9" : "f_joint"},
      {"step_mode", c.step_mode == StepMode::simultaneous ? "simultaneous"
                                                          : "sequential"},
  };
}

// Wall time is reported on the console but kept out of the file so equal
// seeds give byte-identical outputs.
inline json search_report_to_json(const SearchReport& r,
                                  const SearchConfig& cfg,
                                  const Configuration& config,
                                  double jmax_fraction_fixed = 0.5) {
  return json{
      {"sequence", sequence_to_json(decode(r.best, config, jmax_fraction_fixed))},
      {"report",
       {{"best_f", r.best_f},
        {"evaluations", r.evaluations},
        {"reached_target", r.reached_target},
        {"trace", r.trace},
        {"seed", cfg.seed}}},
      {"search_config", search_config_to_json(cfg)}};
}

}  // namespace xoq
