#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "xoq/spins.hpp"

// Exchange-pulse dynamics: configuration-specific coupling topologies,
// closed-form pair propagators, piecewise-constant step evolution with the
// always-on intra-dot couplings, and projection of full sequences onto the
// (S=0, Sz=0) and (S=1, Sz=-1) subspace bases.
//
// Times are dimensionless in units of h/Jmax and strengths in units of
// Jmax, so a pulse of duration d and strength s accrues the exchange angle
// theta = 2*pi*s*d.

namespace xoq {

struct SpinPair {
  SpinLabel first, second;  // ordered: position(first) < position(second)
};

inline SpinPair make_pair(SpinLabel i, SpinLabel j) {
  if (i == j) throw std::invalid_argument("spin pair requires distinct spins");
  if (position(i) > position(j)) std::swap(i, j);
  return SpinPair{i, j};
}

constexpr bool operator==(SpinPair lhs, SpinPair rhs) {
  return lhs.first == rhs.first && lhs.second == rhs.second;
}

inline std::string to_string(SpinPair p) {
  return to_string(p.first) + to_string(p.second);
}

inline bool intra_qubit(SpinPair p) { return p.first.qubit == p.second.qubit; }

inline SpinPair pair_from_name(const std::string& name) {
  const auto parse_label = [](const std::string& s) -> std::optional<SpinLabel> {
    if (s.size() != 2 || (s[0] != 'a' && s[0] != 'b') || s[1] < '1' || s[1] > '3') {
      return std::nullopt;
    }
    return SpinLabel{s[0] == 'a' ? Qubit::a : Qubit::b, s[1] - '0'};
  };
  if (name.size() == 4) {
    const auto i = parse_label(name.substr(0, 2));
    const auto j = parse_label(name.substr(2, 2));
    if (i && j && !(*i == *j)) return make_pair(*i, *j);
  }
  throw std::invalid_argument("unknown spin pair name: \"" + name + "\"");
}

enum class ConfigName { A, B };

inline std::string to_string(ConfigName n) { return n == ConfigName::A ? "A" : "B"; }

// Coupling topology of one geometry.  The physical configurations keep the
// intra-dot pairs a1a2 and b1b2 permanently on at a fixed strength; the
// all-controllable variants drop that constraint and open every intra-qubit
// pair to pulsing (used for single-qubit wrapper sequences and toy searches).
struct Configuration {
  ConfigName name;
  bool all_controllable = false;
  std::vector<SpinPair> tunable_pairs;
  std::vector<SpinPair> fixed_pairs;

  bool is_tunable(SpinPair p) const {
    return std::find(tunable_pairs.begin(), tunable_pairs.end(), p) !=
           tunable_pairs.end();
  }

  static Configuration a();
  static Configuration b();
  static Configuration a_all_controllable();
  static Configuration b_all_controllable();
  static Configuration physical(ConfigName n) {
    return n == ConfigName::A ? a() : b();
  }
};

namespace detail {

inline SpinPair named_pair(const char* name) { return pair_from_name(name); }

inline std::vector<SpinPair> intra_pulse_pairs() {
  return {named_pair("a1a3"), named_pair("a2a3"),
          named_pair("b1b3"), named_pair("b2b3")};
}

inline std::vector<SpinPair> inter_pairs(ConfigName n) {
  if (n == ConfigName::A) return {named_pair("a3b1"), named_pair("a3b2")};
  return {named_pair("a1b1"), named_pair("a2b2")};
}

inline std::vector<SpinPair> fixed_intra_pairs() {
  return {named_pair("a1a2"), named_pair("b1b2")};
}

inline Configuration build_config(ConfigName n, bool all_controllable) {
  Configuration c;
  c.name = n;
  c.all_controllable = all_controllable;
  c.tunable_pairs = intra_pulse_pairs();
  for (SpinPair p : inter_pairs(n)) c.tunable_pairs.push_back(p);
  if (all_controllable) {
    for (SpinPair p : fixed_intra_pairs()) c.tunable_pairs.push_back(p);
  } else {
    c.fixed_pairs = fixed_intra_pairs();
  }
  return c;
}

}  // namespace detail

inline Configuration Configuration::a() {
  return detail::build_config(ConfigName::A, false);
}
inline Configuration Configuration::b() {
  return detail::build_config(ConfigName::B, false);
}
inline Configuration Configuration::a_all_controllable() {
  return detail::build_config(ConfigName::A, true);
}
inline Configuration Configuration::b_all_controllable() {
  return detail::build_config(ConfigName::B, true);
}

struct Pulse {
  SpinPair pair;
  double duration;        // units of h/Jmax, >= 0
  double strength = 1.0;  // units of Jmax, in [0, 1]
};

// One time step: either a set of simultaneously started pulses (each ending
// after its own duration, step span = longest) or a bare wait under only the
// fixed couplings.  Mixing a wait with pulses is rejected.
struct PulseStep {
  std::vector<Pulse> pulses;
  std::optional<double> wait;

  bool is_wait() const { return wait.has_value(); }
  double span() const {
    if (wait) return *wait;
    double d = 0.0;
    for (const Pulse& p : pulses) d = std::max(d, p.duration);
    return d;
  }

  static PulseStep wait_for(double duration) {
    PulseStep s;
    s.wait = duration;
    return s;
  }
  static PulseStep of(std::vector<Pulse> pulses) {
    PulseStep s;
    s.pulses = std::move(pulses);
    return s;
  }
  static PulseStep single(SpinPair pair, double duration, double strength = 1.0) {
    return of({Pulse{pair, duration, strength}});
  }
};

struct PulseSequence {
  Configuration configuration;
  std::vector<PulseStep> steps;
  double jmax_fraction_fixed = 0.5;

  // Total duration under the max rule (a wait contributes its own span).
  double total_duration() const {
    double t = 0.0;
    for (const PulseStep& s : steps) t += s.span();
    return t;
  }
};

inline void validate_step(const PulseStep& step, const Configuration& config) {
  if (step.is_wait()) {
    if (!step.pulses.empty()) {
      throw std::invalid_argument("a wait step cannot also carry pulses");
    }
    if (*step.wait < 0.0) throw std::invalid_argument("negative wait duration");
    return;
  }
  if (step.pulses.empty()) throw std::invalid_argument("empty pulse step");
  for (std::size_t i = 0; i < step.pulses.size(); ++i) {
    const Pulse& p = step.pulses[i];
    if (!config.is_tunable(p.pair)) {
      throw std::invalid_argument("pair \"" + to_string(p.pair) +
                                  "\" is not tunable in configuration " +
                                  to_string(config.name));
    }
    if (p.duration < 0.0) throw std::invalid_argument("negative pulse duration");
    if (p.strength < 0.0 || p.strength > 1.0) {
      throw std::invalid_argument("pulse strength must lie in [0, 1]");
    }
    for (std::size_t j = i + 1; j < step.pulses.size(); ++j) {
      if (step.pulses[j].pair == p.pair) {
        throw std::invalid_argument("pair \"" + to_string(p.pair) +
                                    "\" repeated within a step");
      }
    }
  }
}

inline void validate_sequence(const PulseSequence& seq) {
  if (seq.jmax_fraction_fixed <= 0.0 || seq.jmax_fraction_fixed > 1.0) {
    throw std::invalid_argument("jmax_fraction_fixed must lie in (0, 1]");
  }
  for (const PulseStep& s : seq.steps) validate_step(s, seq.configuration);
}

// exp(-i * angle * h) for Hermitian h, by eigendecomposition.
inline Matrix hermitian_propagator(const Matrix& h, double angle) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigendecomposition failed");
  }
  const Eigen::VectorXd& evals = solver.eigenvalues();
  Vector phases(evals.size());
  for (Eigen::Index k = 0; k < evals.size(); ++k) {
    phases(k) = std::polar(1.0, -angle * evals(k));
  }
  return solver.eigenvectors() * phases.asDiagonal() *
         solver.eigenvectors().adjoint();
}

// exp(-i * theta * S_i.S_j) in closed form from the singlet/triplet
// projectors of the pair: U = e^{-i theta/4} (I + (e^{i theta} - 1) P_s)
// with P_s = I/4 - S_i.S_j.
inline Matrix exchange_propagator(SpinPair pair, double theta) {
  const Matrix ex = exchange_op(pair.first, pair.second);
  const Matrix p_singlet = 0.25 * Matrix::Identity(kDim, kDim) - ex;
  const Complex phase = std::polar(1.0, theta);
  return std::polar(1.0, -theta / 4.0) *
         (Matrix::Identity(kDim, kDim) + (phase - 1.0) * p_singlet);
}

enum class StepMode {
  simultaneous,  // pulses in a step start together; max rule for the span
  sequential,    // pulses in a step applied one after another
};

namespace detail {

// Generic propagation over the constant segments of one step.  `pair_op`
// maps a spin pair to its exchange generator in the working representation
// and `identity` supplies that representation's identity matrix.
template <typename PairOp>
Matrix step_propagator_impl(const PulseStep& step, const Configuration& config,
                            double jmax_fraction_fixed, StepMode mode,
                            const PairOp& pair_op, const Matrix& identity) {
  constexpr double tau = 2.0 * std::numbers::pi;
  const auto fixed_hamiltonian = [&] {
    Matrix h = Matrix::Zero(identity.rows(), identity.cols());
    for (SpinPair p : config.fixed_pairs) h += jmax_fraction_fixed * pair_op(p);
    return h;
  };

  if (step.is_wait()) {
    if (*step.wait == 0.0) return identity;
    return hermitian_propagator(fixed_hamiltonian(), tau * *step.wait);
  }

  const Matrix h_fixed = fixed_hamiltonian();
  Matrix u = identity;

  if (mode == StepMode::sequential) {
    for (const Pulse& p : step.pulses) {
      if (p.duration == 0.0) continue;
      const Matrix h = h_fixed + p.strength * pair_op(p.pair);
      u = hermitian_propagator(h, tau * p.duration) * u;
    }
    return u;
  }

  // Simultaneous semantics: all pulses start at the step origin and each
  // switches off after its own duration, giving piecewise-constant segments
  // delimited by the sorted distinct durations.
  std::vector<double> boundaries;
  for (const Pulse& p : step.pulses) {
    if (p.duration > 0.0) boundaries.push_back(p.duration);
  }
  std::sort(boundaries.begin(), boundaries.end());
  boundaries.erase(std::unique(boundaries.begin(), boundaries.end()),
                   boundaries.end());

  double t0 = 0.0;
  for (double t1 : boundaries) {
    Matrix h = h_fixed;
    for (const Pulse& p : step.pulses) {
      if (p.duration > t0) h += p.strength * pair_op(p.pair);
    }
    u = hermitian_propagator(h, tau * (t1 - t0)) * u;
    t0 = t1;
  }
  return u;
}

}  // namespace detail

// Propagator of a single step on the full 64-dim space.
inline Matrix step_propagator(const PulseStep& step, const Configuration& config,
                              double jmax_fraction_fixed,
                              StepMode mode = StepMode::simultaneous) {
  validate_step(step, config);
  const auto pair_op = [](SpinPair p) { return exchange_op(p.first, p.second); };
  return detail::step_propagator_impl(step, config, jmax_fraction_fixed, mode,
                                      pair_op, Matrix::Identity(kDim, kDim));
}

// A sequence propagator restricted to one total-spin sector, expressed in
// the subspace basis ordering.
struct TransformationMatrix {
  Sector sector;
  Matrix entries;  // dim x dim, unitary
};

struct SequencePropagators {
  Matrix full;                 // 64 x 64 unitary, step 1 applied first
  TransformationMatrix u5;     // (S=0, Sz=0) block
  TransformationMatrix u9;     // (S=1, Sz=-1) block
};

inline SequencePropagators sequence_propagator(
    const PulseSequence& seq, StepMode mode = StepMode::simultaneous) {
  validate_sequence(seq);
  const auto pair_op = [](SpinPair p) { return exchange_op(p.first, p.second); };
  Matrix u = Matrix::Identity(kDim, kDim);
  for (const PulseStep& step : seq.steps) {
    u = detail::step_propagator_impl(step, seq.configuration,
                                     seq.jmax_fraction_fixed, mode, pair_op,
                                     Matrix::Identity(kDim, kDim)) *
        u;
  }
  const SubspaceBasis b5 = subspace_basis(Sector::s0);
  const SubspaceBasis b9 = subspace_basis(Sector::s1);
  SequencePropagators out;
  out.u5 = {Sector::s0, b5.vectors.adjoint() * u * b5.vectors};
  out.u9 = {Sector::s1, b9.vectors.adjoint() * u * b9.vectors};
  out.full = std::move(u);
  return out;
}

// Sector-restricted propagation.  Every exchange generator commutes with
// (S_tot^2, S_tot,z), so each sector evolves under the projected
// Hamiltonian; working directly in the 5- and 9-dim blocks avoids the
// 64-dim exponentials.  Agreement with sequence_propagator is a tested
// invariant, and this is the path the search module drives.
class SectorPropagation {
 public:
  SectorPropagation(Configuration config, double jmax_fraction_fixed,
                    StepMode mode = StepMode::simultaneous)
      : config_(std::move(config)),
        jmax_fraction_fixed_(jmax_fraction_fixed),
        mode_(mode),
        basis5_(subspace_basis(Sector::s0)),
        basis9_(subspace_basis(Sector::s1)) {
    for (SpinPair p : config_.tunable_pairs) cache_pair(p);
    for (SpinPair p : config_.fixed_pairs) cache_pair(p);
  }

  const Configuration& configuration() const { return config_; }
  double jmax_fraction_fixed() const { return jmax_fraction_fixed_; }
  StepMode mode() const { return mode_; }

  // (U5, U9) of the given steps under this configuration.
  std::pair<Matrix, Matrix> propagate(const std::vector<PulseStep>& steps) const {
    return {propagate_sector(steps, ops5_, 5), propagate_sector(steps, ops9_, 9)};
  }

 private:
  void cache_pair(SpinPair p) {
    const int key = pair_key(p);
    if (ops5_[key].size() != 0) return;
    const Matrix ex = exchange_op(p.first, p.second);
    ops5_[key] = basis5_.vectors.adjoint() * ex * basis5_.vectors;
    ops9_[key] = basis9_.vectors.adjoint() * ex * basis9_.vectors;
  }

  static int pair_key(SpinPair p) {
    return position(p.first) * kSpinCount + position(p.second);
  }

  Matrix propagate_sector(const std::vector<PulseStep>& steps,
                          const std::array<Matrix, kSpinCount * kSpinCount>& ops,
                          int dim) const {
    const auto pair_op = [&](SpinPair p) -> const Matrix& {
      const Matrix& op = ops[pair_key(p)];
      if (op.size() == 0) {
        throw std::invalid_argument("pair \"" + to_string(p) +
                                    "\" is not part of configuration " +
                                    to_string(config_.name));
      }
      return op;
    };
    Matrix u = Matrix::Identity(dim, dim);
    for (const PulseStep& step : steps) {
      validate_step(step, config_);
      u = detail::step_propagator_impl(step, config_, jmax_fraction_fixed_,
                                       mode_, pair_op,
                                       Matrix::Identity(dim, dim)) *
          u;
    }
    return u;
  }

  Configuration config_;
  double jmax_fraction_fixed_;
  StepMode mode_;
  SubspaceBasis basis5_, basis9_;
  std::array<Matrix, kSpinCount * kSpinCount> ops5_, ops9_;
};

// after . central . before, per sector.  Wrapper sequences must contain only
// intra-qubit pairs; they are evaluated exactly as given (their own
// configuration decides whether a fixed background applies).
inline std::pair<TransformationMatrix, TransformationMatrix> wrap_with_local_ops(
    const TransformationMatrix& central5, const TransformationMatrix& central9,
    const PulseSequence& before, const PulseSequence& after,
    StepMode mode = StepMode::simultaneous) {
  for (const PulseSequence* seq : {&before, &after}) {
    for (const PulseStep& step : seq->steps) {
      for (const Pulse& p : step.pulses) {
        if (!intra_qubit(p.pair)) {
          throw std::invalid_argument(
              "wrapper sequences must be single-qubit operations; pair \"" +
              to_string(p.pair) + "\" couples the qubits");
        }
      }
    }
  }
  const SequencePropagators ub = sequence_propagator(before, mode);
  const SequencePropagators ua = sequence_propagator(after, mode);
  TransformationMatrix out5{Sector::s0,
                            ua.u5.entries * central5.entries * ub.u5.entries};
  TransformationMatrix out9{Sector::s1,
                            ua.u9.entries * central9.entries * ub.u9.entries};
  return {std::move(out5), std::move(out9)};
}

inline std::pair<TransformationMatrix, TransformationMatrix> wrap_with_local_ops(
    const PulseSequence& central, const PulseSequence& before,
    const PulseSequence& after, StepMode mode = StepMode::simultaneous) {
  const SequencePropagators uc = sequence_propagator(central, mode);
  return wrap_with_local_ops(uc.u5, uc.u9, before, after, mode);
}

}  // namespace xoq
