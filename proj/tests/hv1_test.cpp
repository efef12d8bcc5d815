#include <random>

#include <catch2/catch_amalgamated.hpp>
#include <majbox/hv1_engine.hpp>

using namespace majbox;

namespace {
HV1State init4_adjacent() {
  return hv1_init({{PairSpec(1, 2), Parity::Even}, {PairSpec(3, 4), Parity::Even}}, 4);
}
}  // namespace

TEST_CASE("chord interleaving and crossing parity") {
  CHECK(interleaved(PairSpec(1, 3), PairSpec(2, 4)));
  CHECK_FALSE(interleaved(PairSpec(1, 4), PairSpec(2, 3)));  // nested
  CHECK_FALSE(interleaved(PairSpec(1, 2), PairSpec(3, 4)));  // disjoint
  CHECK(crossing_parity({PairSpec(1, 3), PairSpec(2, 4)}) == Parity::Odd);
  CHECK(crossing_parity({PairSpec(1, 2), PairSpec(3, 4), PairSpec(5, 6)}) == Parity::Even);
  // Three mutually interleaving chords: 3 crossings, odd.
  CHECK(crossing_parity({PairSpec(1, 4), PairSpec(2, 5), PairSpec(3, 6)}) == Parity::Odd);
}

TEST_CASE("same-arc measurement reads back without disturbing the state") {
  HV1State st = hv1_init({{PairSpec(1, 2), Parity::Odd}, {PairSpec(3, 4), Parity::Even}}, 4);
  auto branches = hv1_measure_pair(st, PairSpec(1, 2));
  REQUIRE(branches.size() == 1);
  CHECK(branches[0].outcome == Parity::Odd);
  CHECK(branches[0].prob.dy == Dyadic::one());
  CHECK(branches[0].state == st);
}

TEST_CASE("cross-arc measurement re-pairs with the interleaving correction") {
  // (1,2)e,(3,4)e measured at (1,3): the new matching (1,3),(2,4) crosses, so
  // the partner arc carries the opposite parity of the outcome.
  HV1State st = init4_adjacent();
  auto branches = hv1_measure_pair(st, PairSpec(1, 3));
  REQUIRE(branches.size() == 2);
  for (const auto& br : branches) {
    CHECK(br.prob.dy == Dyadic::half());
    auto partner = hv1_measure_pair(br.state, PairSpec(2, 4));
    REQUIRE(partner.size() == 1);
    CHECK(partner[0].outcome == (br.outcome ^ Parity::Odd));
    CHECK(matching_total_parity(br.state.arcs) == matching_total_parity(st.arcs));
  }

  // Nested start (1,4)e,(2,3)e measured at (1,2): no crossing change, the
  // partner arc repeats the outcome.
  HV1State nested = hv1_init({{PairSpec(1, 4), Parity::Even}, {PairSpec(2, 3), Parity::Even}}, 4);
  for (const auto& br : hv1_measure_pair(nested, PairSpec(1, 2))) {
    auto partner = hv1_measure_pair(br.state, PairSpec(3, 4));
    REQUIRE(partner.size() == 1);
    CHECK(partner[0].outcome == br.outcome);
  }
}

TEST_CASE("braids swap box labels and ignore direction") {
  HV1State st = init4_adjacent();
  HV1State once = hv1_braid(st, 2, 3, BraidDir::CCW);
  CHECK(arc_pairs(once.arcs) == std::vector<PairSpec>{PairSpec(1, 3), PairSpec(2, 4)});
  CHECK(once == hv1_braid(st, 3, 2, BraidDir::CW));
  CHECK(hv1_braid(once, 2, 3, BraidDir::CCW) == st);  // period 2: the model's failure
  CHECK_THROWS_AS(hv1_braid(st, 1, 3, BraidDir::CCW), scenario_error);

  // Label swap keeps the plain parity XOR but moves the crossing parity.
  CHECK(st.total_parity() == Parity::Even);
  CHECK(once.total_parity() == Parity::Odd);  // XOR still even, crossing flipped
}

TEST_CASE("covered joint measurements are deterministic and leave the state alone") {
  HV1State plain = hv1_init({{PairSpec(1, 2), Parity::Odd}, {PairSpec(3, 4), Parity::Even}}, 4);
  auto both = hv1_joint_measure(plain, PairSpec(1, 2), PairSpec(3, 4));
  REQUIRE(both.size() == 1);
  CHECK(both[0].outcome == Parity::Odd);
  CHECK(both[0].state == plain);

  HV1State crossed = hv1_init({{PairSpec(1, 3), Parity::Odd}, {PairSpec(2, 4), Parity::Even}}, 4);
  auto forced = hv1_joint_measure(crossed, PairSpec(1, 2), PairSpec(3, 4));
  REQUIRE(forced.size() == 1);
  CHECK(forced[0].outcome == Parity::Even);  // odd ^ even ^ crossing correction
  CHECK(forced[0].state == crossed);
}

TEST_CASE("displaced joint measurement branches uniformly") {
  HV1State st = hv1_init({{PairSpec(1, 4), Parity::Even},
                          {PairSpec(2, 3), Parity::Even},
                          {PairSpec(5, 8), Parity::Even},
                          {PairSpec(6, 7), Parity::Even}},
                         8);
  auto branches = hv1_joint_measure(st, PairSpec(1, 2), PairSpec(5, 6));
  REQUIRE(branches.size() == 4);
  int odd = 0;
  for (const auto& br : branches) {
    CHECK(br.prob.dy == Dyadic::make(1, 2));
    odd += br.outcome == Parity::Odd;
    CHECK(matching_total_parity(br.state.arcs) == matching_total_parity(st.arcs));
    // Outcome is the XOR of the two measured arcs' recorded parities.
    Parity a = br.state.arcs[arc_index_containing(br.state.arcs, 1)].second;
    Parity b = br.state.arcs[arc_index_containing(br.state.arcs, 5)].second;
    CHECK(br.outcome == (a ^ b));
    // Each block's displaced partners carry their block's parity.
    Parity pa = br.state.arcs[arc_index_containing(br.state.arcs, 3)].second;
    Parity pb = br.state.arcs[arc_index_containing(br.state.arcs, 7)].second;
    CHECK(pa == a);
    CHECK(pb == b);
  }
  CHECK(odd == 2);
}

TEST_CASE("single-displaced-box joint measurement links the leftovers") {
  HV1State st = hv1_init(
      {{PairSpec(1, 2), Parity::Even}, {PairSpec(3, 4), Parity::Even},
       {PairSpec(5, 6), Parity::Even}},
      6);
  auto branches = hv1_joint_measure(st, PairSpec(2, 3), PairSpec(4, 5));
  REQUIRE(branches.size() == 4);
  for (const auto& br : branches) {
    CHECK(br.prob.dy == Dyadic::make(1, 2));
    REQUIRE(br.state.arcs.size() == 3);
    Parity a = br.state.arcs[arc_index_containing(br.state.arcs, 2)].second;
    Parity b = br.state.arcs[arc_index_containing(br.state.arcs, 4)].second;
    Parity c = br.state.arcs[arc_index_containing(br.state.arcs, 1)].second;
    CHECK(br.state.arcs[arc_index_containing(br.state.arcs, 1)].first == PairSpec(1, 6));
    CHECK(br.outcome == (a ^ b));
    CHECK((a ^ b ^ c) == Parity::Even);  // component constraint
  }
}

TEST_CASE("measure and joint steps conserve the matching total parity") {
  std::mt19937_64 rng(0xC0FFEEu);
  for (int iter = 0; iter < 200; ++iter) {
    int boxes = 4 + 2 * static_cast<int>(rng() % 3);
    ArcList arcs;
    for (int a = 1; a <= boxes; a += 2)
      arcs.emplace_back(PairSpec(a, a + 1), parity_from_bit(static_cast<unsigned>(rng() & 1)));
    sort_arcs(arcs);
    Parity invariant = matching_total_parity(arcs);
    for (int step = 0; step < 12; ++step) {
      int a = 1 + static_cast<int>(rng() % boxes);
      int b = 1 + static_cast<int>(rng() % (boxes - 1));
      if (b >= a) ++b;
      auto branches = measure_arcs(arcs, PairSpec(a, b));
      arcs = branches[rng() % branches.size()].state;
      REQUIRE(matching_total_parity(arcs) == invariant);
    }
  }
}
