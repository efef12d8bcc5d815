#include <random>

#include <catch2/catch_amalgamated.hpp>
#include <majbox/quantum_engine.hpp>
#include <majbox/stabilizer_engine.hpp>

using namespace majbox;

namespace {

// Canonical Hermitian monomial on the dense engine: i^{m(m-1)/2} times the
// ascending product of the masked modes (rightmost factor applied first).
void apply_dense_monomial(const MajoranaRep& rep, std::uint32_t mask, std::vector<Amp>& v) {
  int m = 0;
  for (int i = rep.boxCount; i >= 1; --i)
    if (mask & (std::uint32_t{1} << (i - 1))) {
      rep.apply_gamma(i, v);
      ++m;
    }
  static const Amp phase[4] = {Amp(1, 0), Amp(0, 1), Amp(-1, 0), Amp(0, -1)};
  Amp ph = phase[(m * (m - 1) / 2) % 4];
  for (auto& x : v) x *= ph;
}

StabGroup init4_even() {
  return stab_init({{PairSpec(1, 2), Parity::Even}, {PairSpec(3, 4), Parity::Even}}, 4);
}

}  // namespace

TEST_CASE("monomial product witnesses") {
  auto H = [](std::uint32_t mask) { return Monomial{mask, +1}; };
  CHECK(monomial_mul(H(0b0011), H(0b0011)) == Monomial{0, +1});
  CHECK(monomial_mul(H(0b0011), H(0b1100)) == Monomial{0b1111, +1});
  CHECK(monomial_mul(H(0b0101), H(0b1010)) == Monomial{0b1111, -1});
  CHECK(monomial_mul(H(0b11110), H(0b01100)) == Monomial{0b10010, +1});
  CHECK(monomials_commute(H(0b0011), H(0b1100)));        // disjoint supports
  CHECK(monomials_commute(H(0b0101), H(0b0101)));        // identical supports
  CHECK_FALSE(monomials_commute(H(0b0011), H(0b0110)));  // share one mode
  CHECK_THROWS_AS(monomial_mul(H(0b0011), H(0b0110)), std::logic_error);
  CHECK(pair_op(PairSpec(2, 5)) == Monomial{0b10010, +1});
  CHECK(joint_op(PairSpec(1, 2), PairSpec(3, 4)).sign == +1);
  CHECK(joint_op(PairSpec(1, 3), PairSpec(2, 4)).sign == -1);
}

TEST_CASE("monomial products match the dense engine on random inputs") {
  const int boxes = 6;
  MajoranaRep rep(boxes);
  std::mt19937_64 rng(0x5AB1Eu);
  std::normal_distribution<double> g;
  std::vector<Amp> v(rep.dim());
  for (auto& x : v) x = Amp(g(rng), g(rng));

  auto random_mask = [&] {
    // Even-popcount nonzero masks only: pick 2 or 4 distinct modes.
    int want = (rng() & 1) ? 2 : 4;
    std::uint32_t m = 0;
    while (std::popcount(m) < want) m |= std::uint32_t{1} << (rng() % boxes);
    return m;
  };

  int checked = 0;
  for (int iter = 0; iter < 300; ++iter) {
    std::uint32_t s = random_mask(), t = random_mask();
    if (std::popcount(s & t) % 2 != 0) continue;  // anticommuting: covered above
    Monomial prod = monomial_mul(Monomial{s, +1}, Monomial{t, +1});
    std::vector<Amp> lhs = v, rhs = v;
    apply_dense_monomial(rep, t, lhs);
    apply_dense_monomial(rep, s, lhs);
    apply_dense_monomial(rep, prod.mask, rhs);
    for (std::size_t k = 0; k < v.size(); ++k)
      REQUIRE(std::abs(lhs[k] - static_cast<double>(prod.sign) * rhs[k]) < 1e-12);
    ++checked;
  }
  CHECK(checked > 100);
}

TEST_CASE("group init stores signed pair generators") {
  StabGroup g = stab_init({{PairSpec(1, 4), Parity::Even}, {PairSpec(2, 3), Parity::Odd}}, 4);
  CHECK(g.totalParity == Parity::Odd);
  REQUIRE(g.gens.size() == 2);
  CHECK(stab_group_value(g, pair_op(PairSpec(1, 4))) == +1);
  CHECK(stab_group_value(g, pair_op(PairSpec(2, 3))) == -1);
  CHECK(stab_group_value(g, joint_op(PairSpec(1, 4), PairSpec(2, 3))) == -1);
  CHECK_FALSE(stab_group_value(g, pair_op(PairSpec(1, 2))).has_value());
}

TEST_CASE("one exchange pins the (1,3) value to odd") {
  StabGroup g = stab_braid(init4_even(), 2, 3, BraidDir::CCW);
  CHECK(stab_group_value(g, pair_op(PairSpec(1, 3))) == -1);
  CHECK(stab_group_value(g, pair_op(PairSpec(2, 4))) == +1);
  auto branches = stab_measure(g, pair_op(PairSpec(1, 3)));
  REQUIRE(branches.size() == 1);
  CHECK(branches[0].outcome == Parity::Odd);
}

TEST_CASE("exchange pairs compose as expected") {
  StabGroup g = init4_even();
  StabGroup twice = stab_braid(stab_braid(g, 2, 3, BraidDir::CCW), 2, 3, BraidDir::CCW);
  CHECK(stab_group_value(twice, pair_op(PairSpec(1, 2))) == -1);
  CHECK(stab_group_value(twice, pair_op(PairSpec(3, 4))) == -1);
  StabGroup inv = stab_braid(stab_braid(g, 2, 3, BraidDir::CCW), 2, 3, BraidDir::CW);
  CHECK(inv == g);

  // Period 4 overall; the fourth power returns the original group.
  StabGroup four = twice;
  four = stab_braid(stab_braid(four, 2, 3, BraidDir::CCW), 2, 3, BraidDir::CCW);
  CHECK(four == g);
}

TEST_CASE("the three-exchange sequence fixes (2,3) and (1,4) even") {
  StabGroup g = init4_even();
  for (auto [a, b] : {std::pair{1, 2}, {2, 3}, {1, 2}}) g = stab_braid(g, a, b, BraidDir::CCW);
  CHECK(stab_group_value(g, pair_op(PairSpec(2, 3))) == +1);
  CHECK(stab_group_value(g, pair_op(PairSpec(1, 4))) == +1);
}

TEST_CASE("measurements branch fairly and then repeat deterministically") {
  StabGroup g = stab_init({{PairSpec(1, 4), Parity::Even}, {PairSpec(2, 3), Parity::Even}}, 4);
  auto branches = stab_measure(g, pair_op(PairSpec(1, 2)));
  REQUIRE(branches.size() == 2);
  for (const auto& br : branches) {
    CHECK(br.prob.dy == Dyadic::half());
    CHECK(br.state.totalParity == g.totalParity);
    CHECK(stab_group_value(br.state, pair_op(PairSpec(1, 2))) ==
          (br.outcome == Parity::Even ? +1 : -1));
    // The displaced partners' parity is anti-pinned by the crossing rule here.
    auto partner = stab_measure(br.state, pair_op(PairSpec(3, 4)));
    REQUIRE(partner.size() == 1);
    CHECK(partner[0].outcome == br.outcome);
    auto again = stab_measure(br.state, pair_op(PairSpec(1, 2)));
    REQUIRE(again.size() == 1);
    CHECK(again[0].outcome == br.outcome);
  }
  CHECK_THROWS_AS(stab_measure(g, Monomial{0b1, +1}), scenario_error);
}

TEST_CASE("joint measurement on covered boxes is deterministic") {
  // Arcs (1,3) odd, (2,4) even: the crossed covering forces the joint value.
  StabGroup g = stab_init({{PairSpec(1, 3), Parity::Odd}, {PairSpec(2, 4), Parity::Even}}, 4);
  auto branches = stab_measure(g, joint_op(PairSpec(1, 2), PairSpec(3, 4)));
  REQUIRE(branches.size() == 1);
  CHECK(branches[0].outcome == Parity::Even);  // odd ^ even ^ crossing correction
  CHECK(branches[0].state == g);
}
