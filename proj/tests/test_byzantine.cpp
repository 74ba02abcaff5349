#include <doctest.h>

#include <set>

#include "byrdtd/byzantine.hpp"
#include "byrdtd/error.hpp"

using namespace byrdtd;

namespace {

std::map<int, VectorXd> honest_params() {
  std::map<int, VectorXd> m;
  for (int id = 0; id < 4; ++id) m[id] = VectorXd::Constant(3, static_cast<double>(id + 1));
  return m;
}

}  // namespace

TEST_CASE("deterministic attacks") {
  VectorXd shadow(2);
  shadow << 1, -2;
  AttackModel a;
  AttackerState st = make_attacker_state(a, 5);
  a.kind = AttackKind::None;
  CHECK(byzantine_message(a, 5, {}, shadow, st) == shadow);
  a.kind = AttackKind::SignFlip;
  const VectorXd flipped = byzantine_message(a, 5, {}, shadow, st);
  CHECK(flipped(0) == -1.0);
  CHECK(flipped(1) == 2.0);
  a.kind = AttackKind::SameValue;
  CHECK(byzantine_message(a, 5, {}, shadow, st) == VectorXd::Zero(2));
}

TEST_CASE("noise-free Gaussian attack copies an honest agent") {
  AttackModel a{AttackKind::GaussianNoise, 0.0, 9, true};
  AttackerState st = make_attacker_state(a, 7);
  const auto params = honest_params();
  std::set<double> seen;
  for (int i = 0; i < 200; ++i) {
    const VectorXd m = byzantine_message(a, 7, params, VectorXd::Zero(3), st);
    bool matches = false;
    for (const auto& [id, v] : params) matches = matches || m == v;
    CHECK(matches);
    seen.insert(m(0));
  }
  CHECK(seen.size() == 4);  // per-step victims cover every honest agent
}

TEST_CASE("fixed victim stays fixed") {
  AttackModel a{AttackKind::GaussianNoise, 0.0, 9, false};
  AttackerState st = make_attacker_state(a, 7);
  const auto params = honest_params();
  const VectorXd first = byzantine_message(a, 7, params, VectorXd::Zero(3), st);
  for (int i = 0; i < 50; ++i) CHECK(byzantine_message(a, 7, params, VectorXd::Zero(3), st) == first);
}

TEST_CASE("Gaussian noise has the requested spread and is seeded") {
  AttackModel a{AttackKind::GaussianNoise, 2.0, 11, false};
  AttackerState st = make_attacker_state(a, 1);
  std::map<int, VectorXd> one{{0, VectorXd::Zero(1)}};
  double sum = 0.0, sq = 0.0;
  const int n = 40000;
  for (int i = 0; i < n; ++i) {
    const double x = byzantine_message(a, 1, one, VectorXd::Zero(1), st)(0);
    sum += x;
    sq += x * x;
  }
  CHECK(std::abs(sum / n) < 0.05);
  CHECK(std::sqrt(sq / n) == doctest::Approx(2.0).epsilon(0.02));

  AttackerState s1 = make_attacker_state(a, 1), s2 = make_attacker_state(a, 1), s3 = make_attacker_state(a, 2);
  const VectorXd m1 = byzantine_message(a, 1, one, VectorXd::Zero(1), s1);
  CHECK(m1 == byzantine_message(a, 1, one, VectorXd::Zero(1), s2));
  CHECK(m1 != byzantine_message(a, 2, one, VectorXd::Zero(1), s3));
}

TEST_CASE("Gaussian attack without honest agents") {
  AttackModel a{AttackKind::GaussianNoise, 1.0, 1, true};
  AttackerState st = make_attacker_state(a, 0);
  try {
    byzantine_message(a, 0, {}, VectorXd::Zero(2), st);
    FAIL("expected NoHonestAgents");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoHonestAgents);
  }
}

TEST_CASE("attack names and validation") {
  for (AttackKind k : {AttackKind::None, AttackKind::SignFlip, AttackKind::SameValue, AttackKind::GaussianNoise})
    CHECK(parse_attack_kind(attack_name(k)) == k);
  CHECK_THROWS_AS(parse_attack_kind("nope"), Error);
  AttackModel a;
  a.noise_std = -1.0;
  CHECK_THROWS_AS(a.validate(), Error);
}
