#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "xoq/dynamics.hpp"
#include "xoq/metrics.hpp"

// Variable-step sequence synthesis: a generational genetic algorithm over
// pulse-step genomes mixed with Nelder-Mead refinement of the duration
// vector.  Runs are fully deterministic for a fixed seed: every stochastic
// decision draws from a per-candidate stream derived from the master seed,
// the generation and the candidate index, so the outcome cannot depend on
// evaluation order or parallelism.

namespace xoq {

enum class ObjectiveKind { f9, f_joint };

struct GenomeStep {
  static constexpr int kWait = -1;
  static constexpr int kNone = -1;

  int pair = kWait;        // index into Configuration::tunable_pairs, or kWait
  double duration = 0.5;   // (0, t_max_step]
  int second_pair = kNone; // optional simultaneous pulse; never with a wait
  double second_duration = 0.0;
};

struct Genome {
  std::vector<GenomeStep> steps;
};

struct SearchConfig {
  int population = 128;
  int generations = 200;
  int tournament = 4;
  double duration_sigma = 0.05;  // std-dev of the duration perturbation
  double p_insert = 0.1;
  double p_delete = 0.1;
  double p_pair_swap = 0.1;
  double p_crossover = 0.7;
  int simplex_period = 10;       // generations between Nelder-Mead refinements
  int simplex_iterations = 200;
  double target_f = 0.001;
  std::uint64_t seed = 20150605;
  int max_steps = 32;
  double t_max_step = 2.0;
  ObjectiveKind objective = ObjectiveKind::f_joint;
  StepMode step_mode = StepMode::simultaneous;
};

inline constexpr double kMinDuration = 1e-6;

inline void validate_search_config(const SearchConfig& c) {
  if (c.population < 4) throw std::invalid_argument("population must be >= 4");
  if (c.generations < 1) throw std::invalid_argument("generations must be >= 1");
  if (c.tournament < 1 || c.tournament > c.population) {
    throw std::invalid_argument("tournament size out of range");
  }
  for (double p : {c.p_insert, c.p_delete, c.p_pair_swap, c.p_crossover}) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("probability not in [0,1]");
  }
  if (c.duration_sigma < 0.0) throw std::invalid_argument("negative sigma");
  if (c.max_steps < 1) throw std::invalid_argument("max_steps must be >= 1");
  if (c.t_max_step <= 0.0) throw std::invalid_argument("t_max_step must be > 0");
  if (c.simplex_period < 1) throw std::invalid_argument("simplex_period >= 1");
}

inline void validate_genome(const Genome& g, const Configuration& config,
                            const SearchConfig& c) {
  if (g.steps.empty() || static_cast<int>(g.steps.size()) > c.max_steps) {
    throw std::invalid_argument("genome length out of range");
  }
  const int n_pairs = static_cast<int>(config.tunable_pairs.size());
  for (const GenomeStep& s : g.steps) {
    if (s.pair < GenomeStep::kWait || s.pair >= n_pairs) {
      throw std::invalid_argument("genome pair index out of range");
    }
    if (s.duration <= 0.0 || s.duration > c.t_max_step) {
      throw std::invalid_argument("genome duration out of range");
    }
    if (s.second_pair != GenomeStep::kNone) {
      if (s.pair == GenomeStep::kWait) {
        throw std::invalid_argument("wait step cannot carry a second pulse");
      }
      if (s.second_pair < 0 || s.second_pair >= n_pairs ||
          s.second_pair == s.pair) {
        throw std::invalid_argument("second pair index invalid");
      }
      if (s.second_duration <= 0.0 || s.second_duration > c.t_max_step) {
        throw std::invalid_argument("second duration out of range");
      }
    }
  }
}

inline std::vector<PulseStep> decode_steps(const Genome& g,
                                           const Configuration& config) {
  std::vector<PulseStep> steps;
  steps.reserve(g.steps.size());
  for (const GenomeStep& s : g.steps) {
    if (s.pair == GenomeStep::kWait) {
      steps.push_back(PulseStep::wait_for(s.duration));
      continue;
    }
    std::vector<Pulse> pulses = {
        Pulse{config.tunable_pairs.at(s.pair), s.duration, 1.0}};
    if (s.second_pair != GenomeStep::kNone) {
      pulses.push_back(
          Pulse{config.tunable_pairs.at(s.second_pair), s.second_duration, 1.0});
    }
    steps.push_back(PulseStep::of(std::move(pulses)));
  }
  return steps;
}

inline PulseSequence decode(const Genome& g, const Configuration& config,
                            double jmax_fraction_fixed = 0.5) {
  PulseSequence seq;
  seq.configuration = config;
  seq.jmax_fraction_fixed = jmax_fraction_fixed;
  seq.steps = decode_steps(g, config);
  return seq;
}

// Sector-restricted objective of a genome; the hot path of the search.
class ObjectiveEvaluator {
 public:
  ObjectiveEvaluator(const Configuration& config, double jmax_fraction_fixed,
                     ObjectiveKind kind, StepMode mode)
      : sectors_(config, jmax_fraction_fixed, mode), kind_(kind) {}

  double operator()(const Genome& g) const {
    const auto [u5, u9] =
        sectors_.propagate(decode_steps(g, sectors_.configuration()));
    return kind_ == ObjectiveKind::f9 ? objective_f9(u9)
                                      : objective_f_joint(u5, u9);
  }

  const Configuration& configuration() const { return sectors_.configuration(); }

 private:
  SectorPropagation sectors_;
  ObjectiveKind kind_;
};

using GenomeObjective = std::function<double(const Genome&)>;

struct SearchReport {
  Genome best;
  double best_f = 0.0;
  std::vector<double> trace;  // best-so-far objective per generation
  std::uint64_t evaluations = 0;
  double wall_seconds = 0.0;
  bool reached_target = false;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Stream for candidate `index` of generation `gen`.
inline std::mt19937_64 candidate_rng(std::uint64_t seed, std::uint64_t gen,
                                     std::uint64_t index) {
  return std::mt19937_64(
      splitmix64(seed ^ splitmix64(gen * 0x51ed2701u + index)));
}

inline double clamp_duration(double d, double t_max) {
  return std::clamp(d, kMinDuration, t_max);
}

inline GenomeStep random_step(std::mt19937_64& rng, const SearchConfig& cfg,
                              int n_pairs) {
  std::uniform_real_distribution<double> dur(kMinDuration, cfg.t_max_step);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> pair(0, n_pairs - 1);
  GenomeStep s;
  if (unit(rng) < 0.15) {
    s.pair = GenomeStep::kWait;
    s.duration = dur(rng);
    return s;
  }
  s.pair = pair(rng);
  s.duration = dur(rng);
  if (unit(rng) < 0.2 && n_pairs > 1) {
    int second = pair(rng);
    if (second != s.pair) {
      s.second_pair = second;
      s.second_duration = dur(rng);
    }
  }
  return s;
}

inline Genome random_genome(std::mt19937_64& rng, const SearchConfig& cfg,
                            int n_pairs) {
  const int max_init = std::min(cfg.max_steps, 14);
  std::uniform_int_distribution<int> length(1, max_init);
  Genome g;
  const int n = length(rng);
  for (int i = 0; i < n; ++i) g.steps.push_back(random_step(rng, cfg, n_pairs));
  return g;
}

inline void mutate(Genome& g, std::mt19937_64& rng, const SearchConfig& cfg,
                   int n_pairs) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, cfg.duration_sigma);
  std::uniform_real_distribution<double> fresh(kMinDuration, cfg.t_max_step);
  std::uniform_int_distribution<int> pair(0, n_pairs - 1);

  // touch a few durations per child, not all of them; a rare full resample
  // keeps escape routes out of local basins
  const double p_touch =
      std::clamp(3.0 / static_cast<double>(2 * g.steps.size()), 0.15, 1.0);
  const auto jiggle = [&](double& d) {
    if (unit(rng) >= p_touch) return;
    d = unit(rng) < 0.1 ? fresh(rng)
                        : clamp_duration(d + noise(rng), cfg.t_max_step);
  };

  for (GenomeStep& s : g.steps) {
    if (cfg.duration_sigma > 0.0) {
      jiggle(s.duration);
      if (s.second_pair != GenomeStep::kNone) jiggle(s.second_duration);
    }
    if (unit(rng) < cfg.p_pair_swap) {
      // reassign the step: wait, a fresh pair, or toggle the second slot
      const double what = unit(rng);
      if (what < 0.2) {
        s.pair = GenomeStep::kWait;
        s.second_pair = GenomeStep::kNone;
      } else {
        s.pair = pair(rng);
        if (what < 0.4 && n_pairs > 1) {
          const int second = pair(rng);
          if (second != s.pair && s.second_pair == GenomeStep::kNone) {
            s.second_pair = second;
            s.second_duration = std::max(kMinDuration, s.duration);
          } else {
            s.second_pair = GenomeStep::kNone;
          }
        } else if (s.second_pair == s.pair) {
          s.second_pair = GenomeStep::kNone;
        }
      }
    }
  }
  if (unit(rng) < cfg.p_insert &&
      static_cast<int>(g.steps.size()) < cfg.max_steps) {
    std::uniform_int_distribution<int> at(0, static_cast<int>(g.steps.size()));
    g.steps.insert(g.steps.begin() + at(rng), random_step(rng, cfg, n_pairs));
  }
  if (unit(rng) < cfg.p_delete && g.steps.size() > 1) {
    std::uniform_int_distribution<int> at(0,
                                          static_cast<int>(g.steps.size()) - 1);
    g.steps.erase(g.steps.begin() + at(rng));
  }
}

inline Genome crossover(const Genome& a, const Genome& b, std::mt19937_64& rng,
                        const SearchConfig& cfg) {
  std::uniform_int_distribution<int> cut_a(0, static_cast<int>(a.steps.size()));
  std::uniform_int_distribution<int> cut_b(0, static_cast<int>(b.steps.size()));
  const int ca = cut_a(rng);
  const int cb = cut_b(rng);
  Genome child;
  child.steps.assign(a.steps.begin(), a.steps.begin() + ca);
  child.steps.insert(child.steps.end(), b.steps.begin() + cb, b.steps.end());
  if (child.steps.empty()) {
    child.steps.push_back(a.steps.empty() ? b.steps.back() : a.steps.back());
  }
  if (static_cast<int>(child.steps.size()) > cfg.max_steps) {
    child.steps.resize(cfg.max_steps);
  }
  return child;
}

// Durations of a genome flattened into a vector, and back.
inline std::vector<double> extract_durations(const Genome& g) {
  std::vector<double> x;
  for (const GenomeStep& s : g.steps) {
    x.push_back(s.duration);
    if (s.second_pair != GenomeStep::kNone) x.push_back(s.second_duration);
  }
  return x;
}

inline Genome with_durations(Genome g, const std::vector<double>& x,
                             double t_max) {
  std::size_t k = 0;
  for (GenomeStep& s : g.steps) {
    s.duration = clamp_duration(x.at(k++), t_max);
    if (s.second_pair != GenomeStep::kNone) {
      s.second_duration = clamp_duration(x.at(k++), t_max);
    }
  }
  return g;
}

}  // namespace detail

// Nelder-Mead over the duration vector with pairs frozen.  Returns a genome
// whose objective is never worse than the input's.
inline Genome refine_durations(const Genome& genome, int iterations,
                               const GenomeObjective& objective,
                               double t_max_step = 2.0,
                               std::uint64_t* evaluations = nullptr) {
  const std::vector<double> x0 = detail::extract_durations(genome);
  const std::size_t n = x0.size();
  std::uint64_t evals = 0;
  const auto f = [&](const std::vector<double>& x) {
    ++evals;
    return objective(detail::with_durations(genome, x, t_max_step));
  };

  using Point = std::pair<double, std::vector<double>>;
  std::vector<Point> simplex;
  const auto init_simplex = [&](double h) {
    simplex.clear();
    simplex.reserve(n + 1);
    simplex.push_back({f(x0), x0});
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> y = x0;
      y[i] = detail::clamp_duration(y[i] + (y[i] + h > t_max_step ? -h : h),
                                    t_max_step);
      simplex.push_back({f(y), y});
    }
  };
  init_simplex(0.05);

  const double f_input = simplex.front().first;
  bool restarted = false;
  int it = 0;
  while (it < iterations) {
    std::sort(simplex.begin(), simplex.end(),
              [](const Point& a, const Point& b) { return a.first < b.first; });

    if (simplex.back().first - simplex.front().first < 1e-15) {
      // a degenerate simplex (e.g. every duration clamped at a bound) gets
      // one restart with inward offsets; a converged one is done
      if (restarted) break;
      restarted = true;
      const std::vector<double> keep = simplex.front().second;
      simplex.clear();
      simplex.push_back({f(keep), keep});
      for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> y = keep;
        y[i] = detail::clamp_duration(
            y[i] + (y[i] + 0.01 > t_max_step ? -0.01 : 0.01), t_max_step);
        simplex.push_back({f(y), y});
      }
      std::sort(simplex.begin(), simplex.end(),
                [](const Point& a, const Point& b) { return a.first < b.first; });
      if (simplex.back().first - simplex.front().first < 1e-15) break;
    }

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j <= n; ++j) {
        if (j + 1 == simplex.size()) continue;  // exclude the worst
        centroid[i] += simplex[j].second[i];
      }
      centroid[i] /= static_cast<double>(n);
    }
    Point& worst = simplex.back();

    const auto blend = [&](double coeff) {
      std::vector<double> y(n);
      for (std::size_t i = 0; i < n; ++i) {
        y[i] = detail::clamp_duration(
            centroid[i] + coeff * (centroid[i] - worst.second[i]), t_max_step);
      }
      return y;
    };

    const std::vector<double> xr = blend(1.0);
    const double fr = f(xr);
    ++it;
    if (fr < simplex.front().first) {
      const std::vector<double> xe = blend(2.0);
      const double fe = f(xe);
      worst = fe < fr ? Point{fe, xe} : Point{fr, xr};
    } else if (fr < simplex[simplex.size() - 2].first) {
      worst = {fr, xr};
    } else {
      const std::vector<double> xc = blend(-0.5);
      const double fc = f(xc);
      if (fc < worst.first) {
        worst = {fc, xc};
      } else {
        // shrink toward the best vertex
        for (std::size_t j = 1; j < simplex.size(); ++j) {
          for (std::size_t i = 0; i < n; ++i) {
            simplex[j].second[i] = detail::clamp_duration(
                simplex[0].second[i] +
                    0.5 * (simplex[j].second[i] - simplex[0].second[i]),
                t_max_step);
          }
          simplex[j].first = f(simplex[j].second);
        }
      }
    }
  }
  std::sort(simplex.begin(), simplex.end(),
            [](const Point& a, const Point& b) { return a.first < b.first; });
  if (evaluations) *evaluations += evals;
  if (simplex.front().first >= f_input) return genome;
  return detail::with_durations(genome, simplex.front().second, t_max_step);
}

// Generational GA with tournament selection, one-point crossover on step
// lists, the configured mutations, elitism of one, and periodic Nelder-Mead
// refinement of the best candidate.  `seed_genomes` warm-start the leading
// population slots; the rest are random.
inline SearchReport run_search_seeded(const SearchConfig& cfg,
                                      const Configuration& target_config,
                                      const GenomeObjective& objective,
                                      const std::vector<Genome>& seed_genomes) {
  validate_search_config(cfg);
  const auto start = std::chrono::steady_clock::now();
  const int n_pairs = static_cast<int>(target_config.tunable_pairs.size());

  SearchReport report;
  std::vector<Genome> population(cfg.population);
  std::vector<double> fitness(cfg.population);
  for (int i = 0; i < cfg.population; ++i) {
    auto rng = detail::candidate_rng(cfg.seed, 0, i);
    if (i < static_cast<int>(seed_genomes.size())) {
      population[i] = seed_genomes[i];
      validate_genome(population[i], target_config, cfg);
    } else {
      population[i] = detail::random_genome(rng, cfg, n_pairs);
    }
    fitness[i] = objective(population[i]);
    ++report.evaluations;
  }

  const auto best_index = [&] {
    int best = 0;
    for (int i = 1; i < cfg.population; ++i) {
      if (fitness[i] < fitness[best]) best = i;
    }
    return best;
  };

  int incumbent = best_index();
  report.best = population[incumbent];
  report.best_f = fitness[incumbent];
  report.trace.push_back(report.best_f);

  // a few slots per generation take fresh immigrants, and a long stall
  // replaces everything but the elite; both guard against the population
  // collapsing into one basin
  const int immigrant_slots = std::max(1, cfg.population / 16);
  const int stall_limit = std::max(20, 3 * cfg.simplex_period);
  int stall = 0;

  for (int gen = 1; gen <= cfg.generations && report.best_f > cfg.target_f;
       ++gen) {
    std::vector<Genome> next(cfg.population);
    std::vector<double> next_fitness(cfg.population);

    // elitism: slot 0 carries the best-so-far unchanged
    next[0] = report.best;
    next_fitness[0] = report.best_f;

    const bool restart = stall >= stall_limit;
    if (restart) stall = 0;

    for (int i = 1; i < cfg.population; ++i) {
      auto rng = detail::candidate_rng(cfg.seed, gen, i);
      std::uniform_int_distribution<int> pick(0, cfg.population - 1);
      std::uniform_real_distribution<double> unit(0.0, 1.0);

      Genome child;
      if (restart || i >= cfg.population - immigrant_slots) {
        child = detail::random_genome(rng, cfg, n_pairs);
      } else {
        const auto tournament = [&] {
          int winner = pick(rng);
          for (int k = 1; k < cfg.tournament; ++k) {
            const int challenger = pick(rng);
            if (fitness[challenger] < fitness[winner]) winner = challenger;
          }
          return winner;
        };
        const int p1 = tournament();
        if (unit(rng) < cfg.p_crossover) {
          const int p2 = tournament();
          child = detail::crossover(population[p1], population[p2], rng, cfg);
        } else {
          child = population[p1];
        }
        detail::mutate(child, rng, cfg, n_pairs);
      }
      next[i] = std::move(child);
      next_fitness[i] = objective(next[i]);
      ++report.evaluations;
    }

    population = std::move(next);
    fitness = std::move(next_fitness);

    if (cfg.simplex_period > 0 && gen % cfg.simplex_period == 0) {
      const int b = best_index();
      Genome refined = refine_durations(population[b], cfg.simplex_iterations,
                                        objective, cfg.t_max_step,
                                        &report.evaluations);
      const double f_refined = objective(refined);
      ++report.evaluations;
      if (f_refined < fitness[b]) {
        population[b] = std::move(refined);
        fitness[b] = f_refined;
      }
    }

    const int b = best_index();
    if (fitness[b] < report.best_f - 1e-15) {
      report.best = population[b];
      report.best_f = fitness[b];
      stall = 0;
    } else {
      ++stall;
    }
    report.trace.push_back(report.best_f);
  }

  if (report.best_f > cfg.target_f) {
    Genome refined = refine_durations(report.best, cfg.simplex_iterations,
                                      objective, cfg.t_max_step,
                                      &report.evaluations);
    const double f_refined = objective(refined);
    ++report.evaluations;
    if (f_refined < report.best_f) {
      report.best = std::move(refined);
      report.best_f = f_refined;
      report.trace.push_back(report.best_f);
    }
  }

  report.reached_target = report.best_f <= cfg.target_f;
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return report;
}

inline SearchReport run_search(const SearchConfig& cfg,
                               const Configuration& target_config,
                               const GenomeObjective& objective) {
  return run_search_seeded(cfg, target_config, objective, {});
}

// Standard entry point: search for a sequence minimizing the configured
// CNOT objective under the given coupling topology.
inline SearchReport run_search(const SearchConfig& cfg,
                               const Configuration& target_config,
                               double jmax_fraction_fixed = 0.5) {
  ObjectiveEvaluator evaluator(target_config, jmax_fraction_fixed,
                               cfg.objective, cfg.step_mode);
  return run_search(cfg, target_config,
                    [&evaluator](const Genome& g) { return evaluator(g); });
}

}  // namespace xoq
