#include <cmath>

#include "doctest.h"
#include "uavswarm/errors.hpp"
#include "uavswarm/model.hpp"

using namespace uavswarm;

TEST_CASE("unit conversions") {
  CHECK(dbm_to_watt(30.0) == doctest::Approx(1.0));
  CHECK(dbm_to_watt(-120.0) == doctest::Approx(1e-15));
  CHECK(watt_to_dbm(dbm_to_watt(75.0)) == doctest::Approx(75.0));
  CHECK(db_to_linear(23.0) == doctest::Approx(199.52623149688796).epsilon(1e-12));
  CHECK(linear_to_db(2.0) == doctest::Approx(3.0103).epsilon(1e-4));
}

TEST_CASE("default constants") {
  RadioParams r;
  CHECK(r.epsilon() == doctest::Approx(0.5 * dbm_to_watt(75.0) / dbm_to_watt(-120.0)));
  ChannelParams c;
  CHECK(c.kappa0() == doctest::Approx(4.0 * M_PI * 2e9 / 3e8));
  CHECK_NOTHROW(c.validate());
  CHECK_NOTHROW(r.validate());
  c.path_exponent = 3.0;
  CHECK_THROWS_AS(c.validate(), ParameterError);
  r.eh_eff = 1.5;
  CHECK_THROWS_AS(r.validate(), ParameterError);
}

TEST_CASE("generated devices lie in the disc and depend only on the seed") {
  auto a = generate_scenario(200, 80.0, 7, {}, {}, 4, 12);
  auto b = generate_scenario(200, 80.0, 7, {}, {}, 4, 12);
  auto c = generate_scenario(200, 80.0, 8, {}, {}, 4, 12);
  CHECK(a.devices == b.devices);
  CHECK_FALSE(a.devices == c.devices);
  for (auto d : a.devices) CHECK(std::hypot(d.x, d.y) <= 80.0);
  CHECK(a.uav_count == 4);
  CHECK(a.channel_count == 12);
  CHECK_THROWS_AS(generate_scenario(0, 80.0, 1, {}, {}), ParameterError);
  CHECK_THROWS_AS(generate_scenario(3, -1.0, 1, {}, {}), ParameterError);
}

TEST_CASE("scenario text round trip") {
  auto a = generate_scenario(5, 30.0, 3, {}, {}, 2, 2);
  a.radio.rho = dbm_to_watt(-28.0);
  auto b = scenario_from_text(scenario_to_text(a));
  CHECK(b.devices == a.devices);
  CHECK(b.radio.rho == a.radio.rho);
  CHECK(b.uav_count == 2);
  CHECK(scenario_to_text(b) == scenario_to_text(a));
}

TEST_CASE("scenario parse errors") {
  CHECK_THROWS_AS(scenario_from_text("{\"devices\": [[1, 2],\n [3]]}"), ParseError);
  CHECK_THROWS_AS(scenario_from_text("[1, 2]"), ParseError);
  try {
    scenario_from_text("{\n\"devices\": [[1,2]],\n\"uav_count\": \"x\"}");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.field() == "uav_count");
  }
  try {
    scenario_from_text("{\n\"devices\": [[1,2]\n,,]}");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("binary matrix and associations") {
  BinaryMatrix m(3, 2);
  m.set(0, 1, true);
  m.set(2, 1, true);
  CHECK(m.col_sum(1) == 2);
  CHECK(m.row_sum(1) == 0);
  CHECK(m.col_ones(1) == std::vector<int>{0, 2});

  AssociationState a{BinaryMatrix(2, 2), BinaryMatrix(2, 2), BinaryMatrix(2, 2)};
  CHECK_THROWS_AS(a.validate(), StateError);
  for (int i = 0; i < 2; ++i) {
    a.dl_energy.set(i, 0, true);
    a.ul_info.set(i, i, true);
    a.ul_energy.set(i, 1, true);
  }
  CHECK_NOTHROW(a.validate());
  CHECK(a.ul_uav(1) == 1);
  a.ul_info.set(0, 1, true);
  CHECK_THROWS_AS(a.validate(), StateError);
}

TEST_CASE("schedule validation") {
  CHECK(epochs_needed(0, 4) == 0);
  CHECK(epochs_needed(20, 12) == 2);
  CHECK(epochs_needed(12, 12) == 1);
  AssociationState a{BinaryMatrix(3, 1), BinaryMatrix(3, 1), BinaryMatrix(3, 1)};
  for (int i = 0; i < 3; ++i) a.ul_info.set(i, 0, true);
  Schedule s{{1, 2, 2}, {2}};
  CHECK_NOTHROW(s.validate(a, 2));
  CHECK(s.members(a, 0, 2) == std::vector<int>{1, 2});
  Schedule crowded{{2, 2, 2}, {2}};
  CHECK_THROWS_AS(crowded.validate(a, 2), StateError);
  Schedule short_l{{1, 1, 1}, {1}};
  CHECK_THROWS_AS(short_l.validate(a, 2), StateError);
  TimeAllocation t{0.6, 0.5};
  CHECK_THROWS_AS(t.validate(1.0), StateError);
}
