#include <random>

#include <catch2/catch_amalgamated.hpp>
#include <majbox/quantum_engine.hpp>

using namespace majbox;

namespace {

std::vector<Amp> random_state(MajoranaRep& rep, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<Amp> v(rep.dim());
  for (auto& x : v) x = Amp(g(rng), g(rng));
  double inv = 1. / std::sqrt(l2_norm_sq(v));
  for (auto& x : v) x *= inv;
  return v;
}

double fidelity(const std::vector<Amp>& a, const std::vector<Amp>& b) {
  Amp acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
  return std::abs(acc);
}

QuantumState init4_even() {
  return q_init({{PairSpec(1, 2), Parity::Even}, {PairSpec(3, 4), Parity::Even}}, 4);
}

}  // namespace

TEST_CASE("mode operators anticommute and square to one") {
  for (int boxes : {4, 6}) {
    MajoranaRep rep(boxes);
    std::mt19937_64 rng(0xA11CEu + static_cast<unsigned>(boxes));
    std::vector<Amp> v = random_state(rep, rng);
    for (int i = 1; i <= boxes; ++i)
      for (int j = i; j <= boxes; ++j) {
        std::vector<Amp> ij = v, ji = v;
        rep.apply_gamma(j, ij);
        rep.apply_gamma(i, ij);
        rep.apply_gamma(i, ji);
        rep.apply_gamma(j, ji);
        for (std::size_t k = 0; k < v.size(); ++k) {
          Amp want = i == j ? 2. * v[k] : Amp(0, 0);
          CHECK(std::abs(ij[k] + ji[k] - want) < 1e-12);
        }
      }
  }
}

TEST_CASE("initial states are simultaneous parity eigenstates") {
  QuantumState st = q_init({{PairSpec(1, 4), Parity::Even}, {PairSpec(2, 3), Parity::Odd}}, 4);
  CHECK(st.totalParity == Parity::Odd);
  CHECK(l2_norm_sq(st.amp) == Catch::Approx(1.));
  CHECK(q_expect_pair(st, PairSpec(1, 4)) == Catch::Approx(1.));
  CHECK(q_expect_pair(st, PairSpec(2, 3)) == Catch::Approx(-1.));

  CHECK_NOTHROW(q_init({{PairSpec(1, 2), Parity::Odd}, {PairSpec(3, 4), Parity::Even}}, 4,
                       Parity::Odd));
  CHECK_THROWS_AS(q_init({{PairSpec(1, 2), Parity::Odd}, {PairSpec(3, 4), Parity::Even}}, 4,
                         Parity::Even),
                  scenario_error);
  CHECK_THROWS_AS(q_init({{PairSpec(1, 2), Parity::Even}}, 4), scenario_error);
}

TEST_CASE("exchange unitaries preserve norm and invert cleanly") {
  QuantumState st = init4_even();
  QuantumState fwd = q_braid(st, 2, 3, BraidDir::CCW);
  CHECK(l2_norm_sq(fwd.amp) == Catch::Approx(1.));
  QuantumState back = q_braid(fwd, 2, 3, BraidDir::CW);
  CHECK(fidelity(back.amp, st.amp) == Catch::Approx(1.));
}

TEST_CASE("one exchange pins the (1,3) parity to odd") {
  QuantumState st = q_braid(init4_even(), 2, 3, BraidDir::CCW);
  CHECK(q_expect_pair(st, PairSpec(1, 3)) == Catch::Approx(-1.));
  auto branches = q_measure_pair(st, PairSpec(1, 3));
  REQUIRE(branches.size() == 1);
  CHECK(branches[0].outcome == Parity::Odd);
  CHECK(branches[0].prob.value() == Catch::Approx(1.));
}

TEST_CASE("repeated exchange cycles the measured parity with period four") {
  const double podd[] = {0.5, 1., 0.5, 0., 0.5, 1., 0.5, 0.};
  QuantumState st = init4_even();
  for (int n = 1; n <= 8; ++n) {
    st = q_braid(st, 2, 3, BraidDir::CCW);
    double p = 0.;
    for (const auto& br : q_measure_pair(st, PairSpec(3, 4)))
      if (br.outcome == Parity::Odd) p = br.prob.value();
    CHECK(p == Catch::Approx(podd[n - 1]).margin(1e-9));
  }
}

TEST_CASE("measurement branches are normalized and repeatable") {
  QuantumState st = q_init({{PairSpec(1, 4), Parity::Even}, {PairSpec(2, 3), Parity::Even}}, 4);
  auto branches = q_measure_pair(st, PairSpec(1, 2));
  REQUIRE(branches.size() == 2);
  double total = 0.;
  for (const auto& br : branches) {
    total += br.prob.value();
    CHECK(l2_norm_sq(br.state.amp) == Catch::Approx(1.));
    CHECK(br.state.totalParity == st.totalParity);
    // Immediately re-measuring the same pair repeats the outcome.
    auto again = q_measure_pair(br.state, PairSpec(1, 2));
    REQUIRE(again.size() == 1);
    CHECK(again[0].outcome == br.outcome);
  }
  CHECK(total == Catch::Approx(1.));
}

TEST_CASE("the three-exchange sequence fixes both final parities even") {
  QuantumState st = init4_even();
  for (auto [a, b] : {std::pair{1, 2}, {2, 3}, {1, 2}}) st = q_braid(st, a, b, BraidDir::CCW);
  CHECK(q_expect_pair(st, PairSpec(2, 3)) == Catch::Approx(1.));
  CHECK(q_expect_pair(st, PairSpec(1, 4)) == Catch::Approx(1.));
}

TEST_CASE("joint measurement interferes: the (2,5) parity locks to the joint outcome") {
  QuantumState st = q_init({{PairSpec(1, 2), Parity::Even},
                            {PairSpec(3, 4), Parity::Even},
                            {PairSpec(5, 6), Parity::Even}},
                           6);
  auto joint = q_joint_measure(st, PairSpec(2, 3), PairSpec(4, 5));
  REQUIRE(joint.size() == 2);
  for (const auto& jb : joint) {
    CHECK(jb.prob.value() == Catch::Approx(0.5));
    auto readback = q_measure_pair(jb.state, PairSpec(2, 5));
    REQUIRE(readback.size() == 1);  // deterministic after the joint projection
    CHECK(readback[0].outcome == jb.outcome);
  }
  CHECK_THROWS_AS(q_joint_measure(st, PairSpec(1, 2), PairSpec(2, 3)), scenario_error);
}

TEST_CASE("quantum engine rejects oversized systems") {
  CHECK_THROWS_AS(MajoranaRep(18), scenario_error);
  CHECK_THROWS_AS(MajoranaRep(3), scenario_error);
}
