#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "xoq/dynamics.hpp"
#include "xoq/spins.hpp"

// Device-level effective model: occupation-energy differences and effective
// Heisenberg couplings from microscopic Hubbard parameters, an
// exact-diagonalization oracle over the 6-electron / 12-spin-orbital Fock
// sector that validates them, and physical gate-time estimates.
//
// Sites are indexed 0..5 in the canonical spin order a1,a2,a3,b1,b2,b3;
// levels 1,2 of each qubit form its doubly-occupiable dot, level 3 the
// single dot.  Energies are in whatever unit the parameters carry (ueV in
// the device path); only estimate_gate_time converts to seconds.

namespace xoq {

using SitePair = std::pair<int, int>;

inline SitePair site_pair(int i, int j) {
  if (i == j || i < 0 || j < 0 || i >= kSpinCount || j >= kSpinCount) {
    throw std::invalid_argument("invalid site pair");
  }
  return {std::min(i, j), std::max(i, j)};
}

inline SitePair site_pair(SpinPair p) {
  return site_pair(position(p.first), position(p.second));
}

struct HubbardParameters {
  std::array<double, kSpinCount> eps{};     // on-site energies
  std::array<double, kSpinCount> u_site{};  // same-level Coulomb U_k
  std::map<SitePair, double> t;             // tunneling energies
  std::map<SitePair, double> u_pair;        // level-pair Coulomb
  std::map<SitePair, double> je;            // spin exchange
  std::map<SitePair, double> jp;            // pair hopping
  std::map<SitePair, double> jt;            // occupation-modulated hopping

  double get(const std::map<SitePair, double>& m, SitePair p) const {
    const auto it = m.find(p);
    return it == m.end() ? 0.0 : it->second;
  }
};

// Level pairs carrying bare tunneling terms.
inline std::vector<SitePair> hopping_pairs(ConfigName config) {
  std::vector<SitePair> pairs = {{0, 2}, {1, 2}, {3, 5}, {4, 5}};
  if (config == ConfigName::A) {
    pairs.push_back({2, 3});
    pairs.push_back({2, 4});
  } else {
    pairs.push_back({0, 3});
    pairs.push_back({1, 4});
  }
  return pairs;
}

// Level pairs carrying the exchange/pair-hopping/correlated-hopping terms.
inline std::vector<SitePair> exchange_term_pairs(ConfigName config) {
  std::vector<SitePair> pairs = hopping_pairs(config);
  pairs.push_back({0, 1});
  pairs.push_back({3, 4});
  return pairs;
}

// Level pairs carrying density-density Coulomb terms.
inline std::vector<SitePair> coulomb_pairs(ConfigName config) {
  std::vector<SitePair> pairs = {{0, 1}, {0, 2}, {1, 2}, {3, 4}, {3, 5}, {4, 5}};
  if (config == ConfigName::A) {
    pairs.push_back({2, 3});
    pairs.push_back({2, 4});
  } else {
    pairs.push_back({0, 3});
    pairs.push_back({0, 4});
    pairs.push_back({1, 3});
    pairs.push_back({1, 4});
  }
  return pairs;
}

// Spin pairs of the effective Heisenberg Hamiltonian.
inline std::vector<SitePair> heisenberg_pairs(ConfigName config) {
  std::vector<SitePair> pairs = {{0, 2}, {1, 2}, {0, 1}, {3, 5}, {4, 5}, {3, 4}};
  if (config == ConfigName::A) {
    pairs.push_back({2, 3});
    pairs.push_back({2, 4});
  } else {
    pairs.push_back({0, 3});
    pairs.push_back({0, 4});
    pairs.push_back({1, 3});
    pairs.push_back({1, 4});
  }
  return pairs;
}

inline std::string site_name(int s) { return to_string(spin_at(s)); }

inline std::string pair_label(SitePair p) {
  return site_name(p.first) + site_name(p.second);
}

// Classical occupation energy E_(ijk,lmn): on-site, double-occupancy and
// density-density Coulomb contributions of an occupation pattern.
inline double occupation_energy(const std::array<int, kSpinCount>& occ,
                                const HubbardParameters& params,
                                ConfigName config) {
  double e = 0.0;
  for (int s = 0; s < kSpinCount; ++s) {
    if (occ[s] < 0 || occ[s] > 2) throw std::invalid_argument("occupancy 0..2");
    e += occ[s] * params.eps[s];
    if (occ[s] == 2) e += params.u_site[s];
  }
  for (SitePair p : coulomb_pairs(config)) {
    e += occ[p.first] * occ[p.second] * params.get(params.u_pair, p);
  }
  return e;
}

struct EnergyDifferences {
  // index 0 = qubit a, 1 = qubit b
  std::array<double, 2> de1, de2, de3, de4;
  std::optional<double> de5, de6;  // configuration A single-dot <-> double-dot gaps

  std::map<std::string, double> as_map() const {
    std::map<std::string, double> m;
    const char* qn[2] = {"a", "b"};
    for (int q = 0; q < 2; ++q) {
      m["de1_" + std::string(qn[q])] = de1[q];
      m["de2_" + std::string(qn[q])] = de2[q];
      m["de3_" + std::string(qn[q])] = de3[q];
      m["de4_" + std::string(qn[q])] = de4[q];
    }
    if (de5) m["de5"] = *de5;
    if (de6) m["de6"] = *de6;
    return m;
  }
};

// Virtual-state energy gaps entering the effective couplings.  Throws if a
// gap comes out nonpositive, which breaks the perturbative premise.
inline EnergyDifferences energy_differences(const HubbardParameters& params,
                                            ConfigName config) {
  const std::array<int, 3> ground = {1, 1, 1};
  const auto energy = [&](std::array<int, 3> qa, std::array<int, 3> qb) {
    return occupation_energy({qa[0], qa[1], qa[2], qb[0], qb[1], qb[2]}, params,
                             config);
  };
  const double e_ground = energy(ground, ground);

  EnergyDifferences out;
  const std::array<std::array<int, 3>, 4> excited = {
      std::array<int, 3>{0, 1, 2},   // level 1 -> level 3
      std::array<int, 3>{1, 0, 2},   // level 2 -> level 3
      std::array<int, 3>{2, 0, 1},   // level 2 -> level 1
      std::array<int, 3>{0, 2, 1}};  // level 1 -> level 2
  std::array<double, 2>* slots[4] = {&out.de1, &out.de2, &out.de3, &out.de4};
  for (int k = 0; k < 4; ++k) {
    (*slots[k])[0] = energy(excited[k], ground) - e_ground;
    (*slots[k])[1] = energy(ground, excited[k]) - e_ground;
  }
  if (config == ConfigName::A) {
    out.de5 = energy({1, 1, 2}, {0, 1, 1}) - e_ground;
    out.de6 = energy({1, 1, 2}, {1, 0, 1}) - e_ground;
  }
  for (const auto& [name, value] : out.as_map()) {
    if (value <= 0.0) {
      throw std::domain_error("energy difference " + name +
                              " is nonpositive; the perturbative premise of "
                              "the effective model is violated");
    }
  }
  return out;
}

struct EffectiveCouplings {
  ConfigName configuration;
  std::map<SitePair, double> j;  // Heisenberg couplings, energy units
};

inline EffectiveCouplings effective_couplings(const HubbardParameters& params,
                                              ConfigName config) {
  const EnergyDifferences de = energy_differences(params, config);
  EffectiveCouplings out;
  out.configuration = config;

  const auto second_order = [&](SitePair p, double gap) {
    const double hop = params.get(params.t, p) - params.get(params.jt, p);
    return 4.0 * hop * hop / gap - 2.0 * params.get(params.je, p);
  };

  for (int q = 0; q < 2; ++q) {
    const int base = 3 * q;
    out.j[site_pair(base, base + 2)] = second_order({base, base + 2}, de.de1[q]);
    out.j[site_pair(base + 1, base + 2)] =
        second_order({base + 1, base + 2}, de.de2[q]);
    const double jt12 = params.get(params.jt, {base, base + 1});
    out.j[site_pair(base, base + 1)] =
        (1.0 / de.de3[q] + 1.0 / de.de4[q]) * 4.0 * jt12 * jt12 -
        2.0 * params.get(params.je, {base, base + 1});
  }

  if (config == ConfigName::A) {
    out.j[site_pair(2, 3)] = second_order({2, 3}, *de.de5);
    out.j[site_pair(2, 4)] = second_order({2, 4}, *de.de6);
  } else {
    // Pure first-order exchange between facing double dots; the cross
    // couplings vanish identically.
    out.j[site_pair(0, 3)] = -2.0 * params.get(params.je, {0, 3});
    out.j[site_pair(1, 4)] = -2.0 * params.get(params.je, {1, 4});
    out.j[site_pair(0, 4)] = 0.0;
    out.j[site_pair(1, 3)] = 0.0;
  }
  return out;
}

// 64-dim spin Hamiltonian sum_pairs J_ij S_i.S_j of the effective model.
inline Matrix heisenberg_hamiltonian(const EffectiveCouplings& couplings) {
  Matrix h = Matrix::Zero(kDim, kDim);
  for (const auto& [pair, j] : couplings.j) {
    if (j == 0.0) continue;
    h += j * exchange_op(spin_at(pair.first), spin_at(pair.second));
  }
  return h;
}

namespace fock {

inline constexpr int kModes = 2 * kSpinCount;  // 12 spin-orbitals
inline constexpr int kElectrons = kSpinCount;  // half filling, 3 per qubit

// mode index: 2*site + spin, spin 0 = up
constexpr int mode(int site, int spin) { return 2 * site + spin; }

inline bool occupied(std::uint16_t mask, int m) { return (mask >> m) & 1u; }

// Jordan-Wigner sign of acting at mode m: parity of occupied modes below m.
inline int jw_sign(std::uint16_t mask, int m) {
  const std::uint16_t below = mask & static_cast<std::uint16_t>((1u << m) - 1u);
  return (std::popcount(static_cast<unsigned>(below)) & 1) ? -1 : 1;
}

// c_m; returns 0 amplitude if the mode is empty.
inline int destroy(std::uint16_t& mask, int m) {
  if (!occupied(mask, m)) return 0;
  const int sign = jw_sign(mask, m);
  mask = static_cast<std::uint16_t>(mask & ~(1u << m));
  return sign;
}

// c^dagger_m; returns 0 amplitude if the mode is filled.
inline int create(std::uint16_t& mask, int m) {
  if (occupied(mask, m)) return 0;
  const int sign = jw_sign(mask, m);
  mask = static_cast<std::uint16_t>(mask | (1u << m));
  return sign;
}

}  // namespace fock

// Eigenvalues of one Sz block (fixed number of up spins) of the full
// second-quantized Hamiltonian in the 6-electron sector, sorted ascending.
inline std::vector<double> hubbard_oracle_block(const HubbardParameters& params,
                                                ConfigName config, int n_up) {
  using fock::create;
  using fock::destroy;
  using fock::mode;
  using fock::occupied;
  if (n_up < 0 || n_up > fock::kElectrons) {
    throw std::invalid_argument("n_up must be 0..6");
  }

  const auto hoppings = hopping_pairs(config);
  const auto exchanges = exchange_term_pairs(config);
  const auto coulombs = coulomb_pairs(config);

  // enumerate the Sz block
  std::vector<std::uint16_t> states;
  for (unsigned mask = 0; mask < (1u << fock::kModes); ++mask) {
    if (std::popcount(mask) != fock::kElectrons) continue;
    int ups = 0;
    for (int s = 0; s < kSpinCount; ++s) {
      if (occupied(static_cast<std::uint16_t>(mask), mode(s, 0))) ++ups;
    }
    if (ups == n_up) states.push_back(static_cast<std::uint16_t>(mask));
  }
  std::map<std::uint16_t, int> index;
  for (std::size_t i = 0; i < states.size(); ++i) index[states[i]] = i;

  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(states.size(), states.size());
  const auto add = [&](std::uint16_t target, int col, double amp) {
    if (amp == 0.0) return;
    h(index.at(target), col) += amp;
  };

  for (std::size_t col = 0; col < states.size(); ++col) {
    const std::uint16_t m = states[col];

    // diagonal: on-site energies, double occupancy, density-density
    // Coulomb and the Ising part of the exchange term
    double diag = 0.0;
    std::array<int, kSpinCount> occ{};
    for (int s = 0; s < kSpinCount; ++s) {
      occ[s] = occupied(m, mode(s, 0)) + occupied(m, mode(s, 1));
      diag += occ[s] * params.eps[s];
      if (occupied(m, mode(s, 0)) && occupied(m, mode(s, 1))) {
        diag += params.u_site[s];
      }
    }
    for (SitePair p : coulombs) {
      diag += occ[p.first] * occ[p.second] * params.get(params.u_pair, p);
    }
    for (SitePair p : exchanges) {
      const double je = params.get(params.je, p);
      for (int spin : {0, 1}) {
        if (occupied(m, mode(p.first, spin)) &&
            occupied(m, mode(p.second, spin))) {
          diag -= je;
        }
      }
    }
    add(m, col, diag);

    // bare tunneling: t (c+_p c_q + h.c.)
    for (SitePair p : hoppings) {
      const double t = params.get(params.t, p);
      if (t == 0.0) continue;
      for (int spin : {0, 1}) {
        for (auto [from, to] : {std::pair{p.second, p.first},
                                std::pair{p.first, p.second}}) {
          std::uint16_t s = m;
          int sign = destroy(s, mode(from, spin));
          if (!sign) continue;
          const int sign2 = create(s, mode(to, spin));
          if (!sign2) continue;
          add(s, col, t * sign * sign2);
        }
      }
    }

    for (SitePair p : exchanges) {
      const int i = p.first, j = p.second;

      // spin-flip part of the exchange: -Je (c+_{i dn} c+_{j up} c_{j dn} c_{i up} + h.c.)
      const double je = params.get(params.je, p);
      if (je != 0.0) {
        for (auto [x, y] : {std::pair{i, j}, std::pair{j, i}}) {
          std::uint16_t s = m;
          int amp = destroy(s, mode(x, 0));
          if (amp) {
            int a2 = destroy(s, mode(y, 1));
            if (a2) {
              amp *= a2;
              a2 = create(s, mode(y, 0));
              if (a2) {
                amp *= a2;
                a2 = create(s, mode(x, 1));
                if (a2) add(s, col, -je * amp * a2);
              }
            }
          }
        }
      }

      // pair hopping: -Jp (c+_{j up} c+_{j dn} c_{i up} c_{i dn} + h.c.)
      const double jp = params.get(params.jp, p);
      if (jp != 0.0) {
        for (auto [from, to] : {std::pair{i, j}, std::pair{j, i}}) {
          std::uint16_t s = m;
          int amp = destroy(s, mode(from, 1));
          if (amp) {
            int a2 = destroy(s, mode(from, 0));
            if (a2) {
              amp *= a2;
              a2 = create(s, mode(to, 1));
              if (a2) {
                amp *= a2;
                a2 = create(s, mode(to, 0));
                if (a2) add(s, col, -jp * amp * a2);
              }
            }
          }
        }
      }

      // occupation-modulated hopping:
      // -Jt sum_{k in {i,j}, spin} (n_{k,spin} c+_{i,other} c_{j,other} + h.c.)
      const double jt = params.get(params.jt, p);
      if (jt != 0.0) {
        for (int k : {i, j}) {
          for (int spin : {0, 1}) {
            const int other = 1 - spin;
            {  // n_k c+_i c_j: hop j -> i, count n after the hop
              std::uint16_t s = m;
              int amp = destroy(s, mode(j, other));
              if (amp) {
                const int a2 = create(s, mode(i, other));
                if (a2 && occupied(s, mode(k, spin))) {
                  add(s, col, -jt * amp * a2);
                }
              }
            }
            {  // h.c. = c+_j c_i n_k: count n first, hop i -> j
              if (occupied(m, mode(k, spin))) {
                std::uint16_t s = m;
                int amp = destroy(s, mode(i, other));
                if (amp) {
                  const int a2 = create(s, mode(j, other));
                  if (a2) add(s, col, -jt * amp * a2);
                }
              }
            }
          }
        }
      }
    }
  }

  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if ((h - h.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::logic_error("Hubbard block assembly is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("Hubbard block diagonalization failed");
  }
  std::vector<double> spectrum(solver.eigenvalues().size());
  for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k) {
    spectrum[k] = solver.eigenvalues()(k);
  }
  return spectrum;
}

// Lowest n_levels eigenvalues of the 6-electron sector, merged over all Sz
// blocks, sorted ascending.
inline std::vector<double> hubbard_oracle_spectrum(const HubbardParameters& params,
                                                   ConfigName config,
                                                   int n_levels) {
  if (n_levels < 2) throw std::invalid_argument("n_levels must be >= 2");
  std::vector<double> spectrum;
  for (int n_up = 0; n_up <= fock::kElectrons; ++n_up) {
    const std::vector<double> block =
        hubbard_oracle_block(params, config, n_up);
    spectrum.insert(spectrum.end(), block.begin(), block.end());
  }
  std::sort(spectrum.begin(), spectrum.end());
  if (static_cast<int>(spectrum.size()) > n_levels) spectrum.resize(n_levels);
  return spectrum;
}

inline constexpr double kPlanckEVs = 4.135667e-15;  // eV s

struct DeviceParameters {
  double tr_uev;     // tunneling rate expressed as an energy
  double de_st_uev;  // singlet-triplet splitting of the double dot
  // geometry metadata, carried through but never computed from
  std::optional<double> w_nm;
  std::optional<double> d_intergate_nm;
  std::optional<double> f_back_mv_per_cm;
  std::optional<double> de_v_uev;
};

struct GateTimeEstimate {
  double jmax_uev;
  double dimensionless_duration;  // sum over steps of the max duration
  double time_ns;
};

inline double jmax_from_device(const DeviceParameters& dev) {
  if (dev.tr_uev <= 0.0 || dev.de_st_uev <= 0.0) {
    throw std::domain_error("TR and dE_ST must be positive");
  }
  return dev.tr_uev * dev.tr_uev / dev.de_st_uev;
}

inline GateTimeEstimate estimate_gate_time(const DeviceParameters& dev,
                                           const PulseSequence& seq) {
  GateTimeEstimate out;
  out.jmax_uev = jmax_from_device(dev);
  out.dimensionless_duration = seq.total_duration();
  // h/Jmax in ns with Jmax in ueV: h = 4.135667 ueV ns
  out.time_ns = out.dimensionless_duration * (kPlanckEVs * 1e15) / out.jmax_uev;
  return out;
}

}  // namespace xoq
