#pragma once

// Stabilizer oracle over signed Majorana monomials: tracks n independent
// commuting pair/quadruple parity generators under exchange conjugation and
// projective measurement. Exact dyadic statistics; agrees with the dense
// engine on every protocol in scope.

#include <bit>
#include <cstdint>

#include "chords.hpp"
#include "core.hpp"

namespace majbox {

// value = sign · H(mask), with H(S) = i^{m(m-1)/2} γ_{s1}···γ_{sm} the
// canonical Hermitian ascending product (m = popcount even); H(S)² = +1.
struct Monomial {
  std::uint32_t mask = 0;  // bit i-1 <-> mode i
  int sign = +1;

  friend bool operator==(const Monomial&, const Monomial&) = default;
};

inline bool monomials_commute(const Monomial& a, const Monomial& b) {
  return (std::popcount(a.mask & b.mask) & 1) == 0;
}

// Product of two even, commuting monomials (odd-overlap products pick up a
// factor of i and never arise between group members).
inline Monomial monomial_mul(const Monomial& a, const Monomial& b) {
  if (!monomials_commute(a, b))
    throw std::logic_error("product of anticommuting monomials is not Hermitian-canonical");
  auto sigma = [](std::uint32_t m) {
    long k = std::popcount(m);
    return k * (k - 1) / 2;
  };
  // Transpositions needed to merge the two ascending runs; annihilating equal
  // modes contribute no extra sign beyond the counted crossings.
  long inv = 0;
  for (std::uint32_t t = b.mask; t != 0; t &= t - 1) {
    int bitpos = std::countr_zero(t);
    inv += std::popcount(a.mask >> (bitpos + 1));
  }
  long e = sigma(a.mask) + sigma(b.mask) - sigma(a.mask ^ b.mask);
  if (e % 2 != 0) throw std::logic_error("non-real monomial product phase");
  int sign = a.sign * b.sign;
  if (((e / 2) % 2 + 2) % 2 == 1) sign = -sign;
  if (inv % 2 == 1) sign = -sign;
  return Monomial{a.mask ^ b.mask, sign};
}

inline std::uint32_t pair_mask(const PairSpec& p) {
  return (std::uint32_t{1} << (p.a - 1)) | (std::uint32_t{1} << (p.b - 1));
}

// iγ_aγ_b = +H({a,b})
inline Monomial pair_op(const PairSpec& p) { return Monomial{pair_mask(p), +1}; }

// (iγ_{a1}γ_{a2})(iγ_{b1}γ_{b2}) = (-1)^{interleaved} H({a1,a2,b1,b2})
inline Monomial joint_op(const PairSpec& a, const PairSpec& b) {
  return Monomial{pair_mask(a) | pair_mask(b), interleaved(a, b) ? -1 : +1};
}

struct StabGroup {
  int boxCount = 0;
  Parity totalParity = Parity::Even;
  std::vector<Monomial> gens;  // n independent, pairwise commuting

  friend bool operator==(const StabGroup&, const StabGroup&) = default;
};

inline StabGroup stab_init(const std::vector<std::pair<PairSpec, Parity>>& pairs,
                           int boxCount) {
  validate_perfect_matching(pairs, boxCount);
  StabGroup g;
  g.boxCount = boxCount;
  for (const auto& [pr, par] : pairs) {
    g.totalParity ^= par;
    g.gens.push_back(Monomial{pair_mask(pr), par == Parity::Even ? +1 : -1});
  }
  return g;
}

// CCW conjugation: γ_L -> -γ_R, γ_R -> +γ_L (L = min, R = max); CW inverse.
// Modes strictly between L and R that sit in the mask flip the sign once each
// when the replaced mode crosses them in the ascending product.
inline StabGroup stab_braid(const StabGroup& g, int a, int b, BraidDir dir) {
  if (a == b) throw scenario_error("braid requires two distinct positions");
  int L = std::min(a, b), R = std::max(a, b);
  std::uint32_t bitL = std::uint32_t{1} << (L - 1);
  std::uint32_t bitR = std::uint32_t{1} << (R - 1);
  std::uint32_t between = ((std::uint32_t{1} << (R - 1)) - 1) & ~((std::uint32_t{1} << L) - 1);
  StabGroup out = g;
  for (auto& m : out.gens) {
    bool hasL = m.mask & bitL;
    bool hasR = m.mask & bitR;
    if (hasL == hasR) continue;  // γ_Lγ_R commutes with the exchange unitary
    if (std::popcount(m.mask & between) & 1) m.sign = -m.sign;
    if (hasL) {
      m.mask = (m.mask & ~bitL) | bitR;
      if (dir == BraidDir::CCW) m.sign = -m.sign;
    } else {
      m.mask = (m.mask & ~bitR) | bitL;
      if (dir == BraidDir::CW) m.sign = -m.sign;
    }
  }
  return out;
}

namespace detail {

// Expresses target as an XOR of generator masks; returns the chosen subset as
// a bitset over generator indices, or nullopt when outside the span.
inline std::optional<std::uint32_t> gf2_subset(const std::vector<Monomial>& gens,
                                               std::uint32_t target) {
  std::vector<std::uint32_t> rows, combos;
  for (std::size_t i = 0; i < gens.size(); ++i) {
    std::uint32_t row = gens[i].mask;
    std::uint32_t combo = std::uint32_t{1} << i;
    for (std::size_t j = 0; j < rows.size(); ++j) {
      std::uint32_t lead = rows[j] & (~rows[j] + 1);
      if (row & lead) {
        row ^= rows[j];
        combo ^= combos[j];
      }
    }
    if (row) {
      rows.push_back(row);
      combos.push_back(combo);
    }
  }
  std::uint32_t combo = 0;
  for (std::size_t j = 0; j < rows.size(); ++j) {
    std::uint32_t lead = rows[j] & (~rows[j] + 1);
    if (target & lead) {
      target ^= rows[j];
      combo ^= combos[j];
    }
  }
  if (target) return std::nullopt;
  return combo;
}

}  // namespace detail

// Signed value (+1/-1) of operator op when the group determines it.
inline std::optional<int> stab_group_value(const StabGroup& g, const Monomial& op) {
  for (const auto& m : g.gens)
    if (!monomials_commute(m, op)) return std::nullopt;
  auto subset = detail::gf2_subset(g.gens, op.mask);
  if (!subset)
    throw std::logic_error("operator commutes with the group but is outside it");
  Monomial prod{0, +1};
  for (std::size_t i = 0; i < g.gens.size(); ++i)
    if (*subset & (std::uint32_t{1} << i)) prod = monomial_mul(prod, g.gens[i]);
  return op.sign * prod.sign;
}

// Projective measurement of op (a 2- or 4-mode parity): deterministic when
// ±op is generated, otherwise a fair coin with the standard generator update.
inline std::vector<Branch<StabGroup>> stab_measure(const StabGroup& g, const Monomial& op) {
  if (std::popcount(op.mask) != 2 && std::popcount(op.mask) != 4)
    throw scenario_error("measurement operator must touch 2 or 4 modes");
  std::vector<std::size_t> anti;
  for (std::size_t i = 0; i < g.gens.size(); ++i)
    if (!monomials_commute(g.gens[i], op)) anti.push_back(i);

  if (anti.empty()) {
    int v = *stab_group_value(g, op);
    return {Branch<StabGroup>{v > 0 ? Parity::Even : Parity::Odd, Prob::one(), g}};
  }

  StabGroup base = g;
  for (std::size_t k = 1; k < anti.size(); ++k)
    base.gens[anti[k]] = monomial_mul(base.gens[anti[k]], base.gens[anti[0]]);
  std::vector<Branch<StabGroup>> out;
  for (Parity r : {Parity::Even, Parity::Odd}) {
    StabGroup next = base;
    next.gens[anti[0]] = Monomial{op.mask, (r == Parity::Even ? +1 : -1) * op.sign};
    out.push_back(Branch<StabGroup>{r, Prob::half(), std::move(next)});
  }
  return out;
}

struct StabEngine {
  using State = StabGroup;
  static constexpr const char* id = "stab";

  State init(const InitStep& s, int boxCount) const { return stab_init(s.pairs, boxCount); }
  State braid(const State& st, const BraidStep& s) const {
    return stab_braid(st, s.a, s.b, s.dir);
  }
  std::vector<Branch<State>> measure(const State& st, const MeasureStep& s) const {
    return stab_measure(st, pair_op(s.pair));
  }
  std::vector<Branch<State>> joint(const State& st, const JointStep& s) const {
    return stab_measure(st, joint_op(s.pairA, s.pairB));
  }
};

}  // namespace majbox
