#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "test_support.hpp"
#include "xoq/io.hpp"
#include "xoq/synth.hpp"

using namespace xoq;
using Catch::Matchers::WithinAbs;

namespace {

Genome genome_from_sequence(const PulseSequence& seq) {
  const auto pair_index = [&](SpinPair p) {
    for (std::size_t k = 0; k < seq.configuration.tunable_pairs.size(); ++k) {
      if (seq.configuration.tunable_pairs[k] == p) return static_cast<int>(k);
    }
    throw std::logic_error("pair not tunable");
  };
  Genome g;
  for (const PulseStep& step : seq.steps) {
    GenomeStep s;
    if (step.is_wait()) {
      s.pair = GenomeStep::kWait;
      s.duration = *step.wait;
    } else {
      s.pair = pair_index(step.pulses[0].pair);
      s.duration = step.pulses[0].duration;
      if (step.pulses.size() > 1) {
        s.second_pair = pair_index(step.pulses[1].pair);
        s.second_duration = step.pulses[1].duration;
      }
    }
    g.steps.push_back(s);
  }
  return g;
}

Genome table1_genome() {
  return genome_from_sequence(
      load_sequence(std::string(XOQ_DATA_DIR) + "/table1_configA.json"));
}

// toy problem: one controllable pair, no background; the target is SWAP up
// to a phase, reached exactly at total exchange angle pi (duration 1/2)
struct SwapToy {
  Configuration config;
  GenomeObjective objective;
};

SwapToy make_swap_toy() {
  Configuration config;
  config.name = ConfigName::A;
  config.all_controllable = true;
  config.tunable_pairs = {pair_from_name("a1a2")};

  // two-spin exchange generator on the pair's 4-dim factor
  Matrix ex = Matrix::Zero(4, 4);
  ex(0, 0) = ex(3, 3) = 0.25;
  ex(1, 1) = ex(2, 2) = -0.25;
  ex(1, 2) = ex(2, 1) = 0.5;
  Matrix swap = Matrix::Zero(4, 4);
  swap(0, 0) = swap(3, 3) = 1.0;
  swap(1, 2) = swap(2, 1) = 1.0;

  GenomeObjective objective = [ex, swap](const Genome& g) {
    Matrix u = Matrix::Identity(4, 4);
    for (const GenomeStep& s : g.steps) {
      if (s.pair == GenomeStep::kWait) continue;  // no fixed background
      const auto pulse = [&](double d) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(ex);
        Vector phases(4);
        for (int k = 0; k < 4; ++k) {
          phases(k) = std::polar(1.0, -2.0 * std::numbers::pi * d *
                                          es.eigenvalues()(k));
        }
        return Matrix(es.eigenvectors() * phases.asDiagonal() *
                      es.eigenvectors().adjoint());
      };
      u = pulse(s.duration) * u;
      if (s.second_pair != GenomeStep::kNone) u = pulse(s.second_duration) * u;
    }
    const double overlap = std::abs((swap.adjoint() * u).trace()) / 4.0;
    return std::sqrt(std::max(0.0, 1.0 - overlap));
  };
  return {config, objective};
}

}  // namespace

TEST_CASE("genome decoding and validation") {
  const Configuration config = Configuration::a();
  SearchConfig cfg;

  Genome g;
  g.steps.push_back(GenomeStep{GenomeStep::kWait, 0.5, GenomeStep::kNone, 0.0});
  g.steps.push_back(GenomeStep{2, 0.8, 4, 0.3});
  CHECK_NOTHROW(validate_genome(g, config, cfg));

  const PulseSequence seq = decode(g, config);
  REQUIRE(seq.steps.size() == 2);
  CHECK(seq.steps[0].is_wait());
  REQUIRE(seq.steps[1].pulses.size() == 2);
  CHECK(to_string(seq.steps[1].pulses[0].pair) == "b1b3");
  CHECK(to_string(seq.steps[1].pulses[1].pair) == "a3b1");

  Genome bad = g;
  bad.steps[1].second_pair = 2;  // duplicate of the first pair
  CHECK_THROWS_AS(validate_genome(bad, config, cfg), std::invalid_argument);
  bad = g;
  bad.steps[0].second_pair = 1;  // wait with a second pulse
  CHECK_THROWS_AS(validate_genome(bad, config, cfg), std::invalid_argument);
  bad = g;
  bad.steps[1].duration = 3.0;  // above t_max_step
  CHECK_THROWS_AS(validate_genome(bad, config, cfg), std::invalid_argument);
}

TEST_CASE("mutation and crossover preserve genome invariants") {
  const Configuration config = Configuration::b();
  SearchConfig cfg;
  cfg.p_insert = 0.3;
  cfg.p_delete = 0.3;
  cfg.p_pair_swap = 0.4;
  const int n_pairs = static_cast<int>(config.tunable_pairs.size());

  std::mt19937_64 rng(424242);
  Genome a = detail::random_genome(rng, cfg, n_pairs);
  Genome b = detail::random_genome(rng, cfg, n_pairs);
  for (int k = 0; k < 100000; ++k) {
    if (k % 2 == 0) {
      detail::mutate(a, rng, cfg, n_pairs);
    } else {
      Genome child = detail::crossover(a, b, rng, cfg);
      detail::mutate(child, rng, cfg, n_pairs);
      b = std::move(child);
    }
    if (k % 1000 == 0) {
      validate_genome(a, config, cfg);
      validate_genome(b, config, cfg);
    }
  }
  validate_genome(a, config, cfg);
  validate_genome(b, config, cfg);
}

TEST_CASE("evaluation fixtures") {
  const Configuration config = Configuration::a();
  const ObjectiveEvaluator evaluate(config, 0.5, ObjectiveKind::f_joint,
                                    StepMode::sequential);

  SECTION("a duration-2 wait is a global phase, so f matches the identity") {
    Genome g;
    g.steps.push_back(GenomeStep{GenomeStep::kWait, 2.0, GenomeStep::kNone, 0.0});
    CHECK_THAT(evaluate(g), WithinAbs(1.0, 1e-12));
  }

  SECTION("the bundled config-A reference genome scores below 0.01") {
    CHECK(evaluate(table1_genome()) <= 0.01);
  }

  SECTION("evaluation is deterministic") {
    const Genome g = table1_genome();
    const double f1 = evaluate(g);
    const double f2 = evaluate(g);
    CHECK(f1 == f2);
  }
}

TEST_CASE("refine_durations descends and never climbs") {
  const Configuration config = Configuration::a();
  const ObjectiveEvaluator evaluate(config, 0.5, ObjectiveKind::f_joint,
                                    StepMode::sequential);
  const GenomeObjective objective = [&](const Genome& g) { return evaluate(g); };

  SECTION("a perturbed near-optimum is pulled back down") {
    Genome perturbed = table1_genome();
    for (GenomeStep& s : perturbed.steps) {
      s.duration += 0.01;
      if (s.second_pair != GenomeStep::kNone) s.second_duration += 0.01;
    }
    const double f_perturbed = objective(perturbed);
    REQUIRE(f_perturbed > 0.01);

    const Genome refined = refine_durations(perturbed, 800, objective);
    CHECK(objective(refined) < f_perturbed);
  }

  SECTION("an already-optimal genome is returned unchanged in objective") {
    const Genome g = table1_genome();
    const double f0 = objective(g);
    const Genome refined = refine_durations(g, 150, objective);
    CHECK(objective(refined) <= f0);
  }

  SECTION("a degenerate all-at-bound simplex restarts without crashing") {
    Genome g;
    g.steps.push_back(GenomeStep{0, 2.0, GenomeStep::kNone, 0.0});
    g.steps.push_back(GenomeStep{1, 2.0, GenomeStep::kNone, 0.0});
    const double f0 = objective(g);
    const Genome refined = refine_durations(g, 100, objective);
    CHECK(objective(refined) <= f0);
  }
}

TEST_CASE("toy SWAP synthesis converges within 50 generations") {
  const SwapToy toy = make_swap_toy();
  SearchConfig cfg;
  cfg.population = 48;
  cfg.generations = 50;
  cfg.target_f = 1e-6;
  cfg.simplex_period = 5;
  cfg.simplex_iterations = 200;
  cfg.max_steps = 8;  // short genomes keep the simplex free of dead axes
  cfg.seed = 7;

  const SearchReport report = run_search(cfg, toy.config, toy.objective);
  INFO("best f = " << report.best_f << " after " << report.evaluations
                   << " evaluations");
  CHECK(report.best_f <= 1e-6);
  CHECK(report.reached_target);
  CHECK(static_cast<int>(report.trace.size()) <= cfg.generations + 2);
}

TEST_CASE("search runs are deterministic and monotone") {
  const SwapToy toy = make_swap_toy();
  SearchConfig cfg;
  cfg.population = 24;
  cfg.generations = 12;
  cfg.target_f = 0.0;  // force the full budget
  cfg.simplex_period = 4;
  cfg.simplex_iterations = 40;
  cfg.seed = 99;

  const SearchReport r1 = run_search(cfg, toy.config, toy.objective);
  const SearchReport r2 = run_search(cfg, toy.config, toy.objective);

  REQUIRE(r1.trace.size() == r2.trace.size());
  for (std::size_t k = 0; k < r1.trace.size(); ++k) {
    CHECK(r1.trace[k] == r2.trace[k]);
  }
  CHECK(r1.best_f == r2.best_f);
  CHECK(r1.evaluations == r2.evaluations);
  REQUIRE(r1.best.steps.size() == r2.best.steps.size());
  for (std::size_t k = 0; k < r1.best.steps.size(); ++k) {
    CHECK(r1.best.steps[k].pair == r2.best.steps[k].pair);
    CHECK(r1.best.steps[k].duration == r2.best.steps[k].duration);
  }

  for (std::size_t k = 1; k < r1.trace.size(); ++k) {
    CHECK(r1.trace[k] <= r1.trace[k - 1]);
  }
}

TEST_CASE("a loose physical-configuration search reaches its target") {
  SearchConfig cfg;
  cfg.population = 32;
  cfg.generations = 30;
  cfg.target_f = 0.5;
  cfg.simplex_period = 10;
  cfg.simplex_iterations = 60;
  cfg.seed = 31337;
  cfg.step_mode = StepMode::sequential;

  const SearchReport report = run_search(cfg, Configuration::a());
  INFO("best f = " << report.best_f);
  CHECK(report.reached_target);
}
