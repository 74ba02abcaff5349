#include <doctest.h>

#include <algorithm>
#include <limits>
#include <numeric>

#include "byrdtd/aggregation.hpp"
#include "byrdtd/error.hpp"
#include "byrdtd/simulation.hpp"
#include "byrdtd/environments.hpp"

using namespace byrdtd;

namespace {

InboxSnapshot scalar_inbox(std::vector<int> senders, std::vector<double> values, double self, int receiver = 0) {
  InboxSnapshot in;
  in.receiver = receiver;
  in.senders = std::move(senders);
  in.values.resize(1, static_cast<Eigen::Index>(values.size()));
  for (std::size_t j = 0; j < values.size(); ++j) in.values(0, static_cast<Eigen::Index>(j)) = values[j];
  in.self = VectorXd::Constant(1, self);
  return in;
}

std::vector<int> iota_ids(int first, int n) {
  std::vector<int> ids(static_cast<std::size_t>(n));
  std::iota(ids.begin(), ids.end(), first);
  return ids;
}

}  // namespace

TEST_CASE("mean aggregation") {
  InboxSnapshot in;
  in.receiver = 0;
  in.senders = {1, 2};
  in.values.resize(2, 2);
  in.values << 1, 0, 0, 1;
  in.self = VectorXd::Ones(2);
  const VectorXd out = mean_aggregate(in);
  CHECK(out(0) == doctest::Approx(2.0 / 3.0));
  CHECK(out(1) == doctest::Approx(2.0 / 3.0));

  CHECK(mean_aggregate(scalar_inbox({}, {}, 4.5))(0) == 4.5);
  CHECK(mean_aggregate(scalar_inbox({1, 2, 3}, {7, 7, 7}, 7))(0) == 7.0);
}

TEST_CASE("trimmed mean on a worked example") {
  const InboxSnapshot in = scalar_inbox({1, 2, 3, 4, 5}, {1, 2, 3, 4, 5}, 3);
  const TrimResult r = trimmed_aggregate(in, 1);
  CHECK(r.value(0) == doctest::Approx(3.0));
  CHECK(r.witness.dims[0].low == std::vector<int>{1});
  CHECK(r.witness.dims[0].high == std::vector<int>{5});
  CHECK(r.witness.dims[0].kept == std::vector<int>{2, 3, 4});
  CHECK(trimmed_aggregate_value(in, 1)(0) == r.value(0));
}

TEST_CASE("trimmed mean with q = 0 is the plain mean") {
  const InboxSnapshot in = scalar_inbox({1, 2, 3}, {0.25, -4.0, 9.5}, 1.0);
  CHECK(trimmed_aggregate(in, 0).value(0) == doctest::Approx(mean_aggregate(in)(0)).epsilon(1e-15));
}

TEST_CASE("trimmed mean of equal values") {
  for (int q = 0; q <= 3; ++q) CHECK(trimmed_aggregate(scalar_inbox(iota_ids(1, 6), std::vector<double>(6, 2.5), 2.5), q).value(0) == 2.5);
}

TEST_CASE("ties are broken by sender id") {
  const TrimResult r = trimmed_aggregate(scalar_inbox({4, 7, 9}, {1, 1, 1}, 1), 1);
  CHECK(r.witness.dims[0].low == std::vector<int>{4});
  CHECK(r.witness.dims[0].kept == std::vector<int>{7});
  CHECK(r.witness.dims[0].high == std::vector<int>{9});
}

TEST_CASE("too few neighbors") {
  try {
    trimmed_aggregate(scalar_inbox({1, 2, 3}, {1, 2, 3}, 0), 2);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooFewNeighbors);
  }
}

TEST_CASE("NaN messages land in a discarded tail") {
  InboxSnapshot in;
  in.receiver = 0;
  in.senders = {1, 2, 3, 4};
  in.values.resize(2, 4);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  in.values << 1, 2, 3, nan, 1, 2, 3, nan;
  in.self = VectorXd::Constant(2, 2.0);
  const TrimResult r = trimmed_aggregate(in, 1);
  CHECK(r.witness.dims[0].high == std::vector<int>{4});
  CHECK(r.witness.dims[1].low == std::vector<int>{4});
  CHECK(r.value(0) == doctest::Approx((2.0 + 2.0 + 3.0) / 3.0));
  CHECK(r.value(1) == doctest::Approx((2.0 + 1.0 + 2.0) / 3.0));
}

TEST_CASE("bracketing, permutation and monotonicity properties") {
  Rng rng(31);
  const double big = std::numeric_limits<double>::max();
  const double specials[] = {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
                             std::numeric_limits<double>::quiet_NaN(), big, -big};
  for (int trial = 0; trial < 2000; ++trial) {
    const int nh = 1 + static_cast<int>(uniform_index(rng, 7));
    const int nb = static_cast<int>(uniform_index(rng, 4));
    const int q = std::min(nb + static_cast<int>(uniform_index(rng, 2)), (nh + nb) / 2);
    if (q < nb) continue;
    std::vector<double> vals;
    double lo = 0.0, hi = 0.0;
    const double self = 2.0 * uniform01(rng) - 1.0;
    lo = hi = self;
    for (int i = 0; i < nh; ++i) {
      vals.push_back(2.0 * uniform01(rng) - 1.0);
      lo = std::min(lo, vals.back());
      hi = std::max(hi, vals.back());
    }
    for (int b = 0; b < nb; ++b)
      vals.push_back(uniform01(rng) < 0.5 ? specials[uniform_index(rng, 5)] : 10.0 * standard_normal(rng));
    const InboxSnapshot in = scalar_inbox(iota_ids(1, nh + nb), vals, self);
    const double out = trimmed_aggregate(in, q).value(0);
    CHECK(out >= lo - 1e-15);
    CHECK(out <= hi + 1e-15);

    // increasing one honest value never decreases the result
    std::vector<double> bumped = vals;
    bumped[uniform_index(rng, static_cast<std::size_t>(nh))] += uniform01(rng);
    CHECK(trimmed_aggregate(scalar_inbox(iota_ids(1, nh + nb), bumped, self), q).value(0) >= out);
  }

  // relabeling senders with tie-free values leaves the result unchanged
  std::vector<double> vals{0.3, -1.2, 5.0, 2.2, 0.9, -0.4};
  const double base = trimmed_aggregate(scalar_inbox(iota_ids(1, 6), vals, 0.1), 2).value(0);
  std::vector<int> ids{12, 3, 40, 7, 21, 9};
  for (int rep = 0; rep < 10; ++rep) {
    std::shuffle(ids.begin(), ids.end(), rng);
    std::vector<std::pair<int, double>> pairs;
    for (std::size_t i = 0; i < ids.size(); ++i) pairs.emplace_back(ids[i], vals[i]);
    std::sort(pairs.begin(), pairs.end());
    std::vector<int> s;
    std::vector<double> v;
    for (auto& [id, x] : pairs) {
      s.push_back(id);
      v.push_back(x);
    }
    CHECK(trimmed_aggregate(scalar_inbox(s, v, 0.1), 2).value(0) == base);
  }
}

TEST_CASE("weight row without Byzantine neighbors is uniform") {
  const InboxSnapshot in = scalar_inbox({1, 2, 3}, {0.5, 0.1, 0.9}, 0.0);
  const TrimResult tr = trimmed_aggregate(in, 0);
  const WeightRow row = reconstruct_weight_row(in, 0, {0, 1, 2, 3}, {}, tr.witness);
  for (int j = 0; j < 4; ++j) CHECK(row.dims[0](j) == doctest::Approx(0.25));
}

TEST_CASE("degenerate bracket puts the kept Byzantine mass on the upper partner") {
  // every message equals 3; Byzantine 2 is kept and both bracketing honest values coincide
  const InboxSnapshot in = scalar_inbox({1, 2, 3, 4}, {3, 3, 3, 3}, 1.5);
  const TrimResult tr = trimmed_aggregate(in, 1);
  CHECK(tr.witness.dims[0].low == std::vector<int>{1});
  CHECK(tr.witness.dims[0].kept == std::vector<int>{2, 3});
  CHECK(tr.witness.dims[0].high == std::vector<int>{4});
  const WeightRow row = reconstruct_weight_row(in, 1, {0, 1, 3, 4}, {2}, tr.witness);
  const VectorXd& w = row.dims[0];
  CHECK(w(0) == doctest::Approx(1.0 / 3.0));
  CHECK(w(1) == 0.0);
  CHECK(w(2) == doctest::Approx(1.0 / 3.0));
  CHECK(w(3) == doctest::Approx(1.0 / 3.0));
  VectorXd honest(4);
  honest << 1.5, 3, 3, 3;
  CHECK(w.dot(honest) == doctest::Approx(tr.value(0)).epsilon(1e-14));
}

TEST_CASE("bracketing failure is reported when the trim is too small") {
  const InboxSnapshot in = scalar_inbox({1, 2, 3}, {0.0, 10.0, 11.0}, 0.0);
  const TrimResult tr = trimmed_aggregate(in, 0);
  try {
    reconstruct_weight_row(in, 0, {0, 1}, {2, 3}, tr.witness);
    FAIL("expected BracketingFailed");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BracketingFailed);
  }
}

TEST_CASE("reconstructed rows reproduce the trimmed mean (5 honest + 2 Byzantine, q = 2)") {
  Rng rng(4);
  const std::vector<int> honest{0, 1, 2, 3, 4, 5};
  const std::unordered_set<int> byz{6, 7};
  for (int trial = 0; trial < 500; ++trial) {
    InboxSnapshot in;
    in.receiver = 0;
    in.senders = {1, 2, 3, 4, 5, 6, 7};
    in.values.resize(3, 7);
    for (int j = 0; j < 7; ++j)
      for (int d = 0; d < 3; ++d) in.values(d, j) = j < 5 ? standard_normal(rng) : 3.0 * standard_normal(rng);
    in.self = VectorXd::Random(3);
    const TrimResult tr = trimmed_aggregate(in, 2);
    const WeightRow row = reconstruct_weight_row(in, 2, honest, byz, tr.witness);
    for (int d = 0; d < 3; ++d) {
      VectorXd hv(6);
      hv(0) = in.self(d);
      for (int j = 0; j < 5; ++j) hv(j + 1) = in.values(d, j);
      const VectorXd& w = row.dims[static_cast<std::size_t>(d)];
      CHECK(std::abs(w.dot(hv) - tr.value(d)) < 1e-12);
      CHECK(std::abs(w.sum() - 1.0) < 1e-12);
      CHECK(w(0) == doctest::Approx(1.0 / 4.0));
      CHECK(w.minCoeff() >= 0.0);
      CHECK(w.maxCoeff() <= 1.0 / 4.0 + 1e-12);
    }
  }
}

TEST_CASE("weight floor") {
  CHECK(weight_floor(7, 1, 2) == doctest::Approx(std::min(2.0 / 3.0, 4.0 / 25.0) / 5.0));
  CHECK(weight_floor(6, 2, 2) == 0.0);
}

TEST_CASE("condition checks") {
  const NetworkTopology single = build_complete(1, 0, 0);
  const ConditionReport one = verify_conditions({MatrixXd::Ones(1, 1)}, single, 1);
  CHECK(one.c1);
  CHECK(one.c2);
  CHECK(one.c3);
  CHECK(one.c4);
  CHECK(one.c5);
  CHECK(one.c6);

  const NetworkTopology pair = build_complete(2, 0, 0);
  MatrixXd bad(2, 2);
  bad << 0.5, 0.6, 0.5, 0.5;
  CHECK_FALSE(verify_conditions({bad}, pair, 2).c1);
  MatrixXd good = MatrixXd::Constant(2, 2, 0.5);
  const ConditionReport ok = verify_conditions({good}, pair, 2);
  CHECK(ok.c1);
  CHECK(ok.c6);
  CHECK(ok.c6_power == 1);

  // weight on a non-edge breaks support
  const NetworkTopology path({0, 1}, {}, {{0, 1}}, {});
  MatrixXd leak(2, 2);
  leak << 0.5, 0.5, 0.5, 0.5;
  CHECK_FALSE(verify_conditions({leak}, path, 2).c3);
}

TEST_CASE("complete(7,2,2) rounds satisfy c1, c2, c3, c5 in every coordinate") {
  RandomMrpSpec spec;
  spec.seed = 5;
  const MrpModel model = build_random_mrp(spec);
  const NetworkTopology topo = build_complete(7, 2, 2);
  for (AttackKind kind : {AttackKind::SignFlip, AttackKind::GaussianNoise, AttackKind::SameValue}) {
    AttackModel attack;
    attack.kind = kind;
    attack.seed = 3;
    const SimulationContext ctx{model, topo, Aggregation::Trim, attack, TdParams{0.3, model.discount()},
                                StepSchedule{ScheduleKind::Experimental, 1.0, 1.0, 0.5}};
    SimulationState st = initial_state(ctx, 8);
    // start from spread-out parameters so the trimmed sets are non-trivial
    Rng rng(1);
    for (auto& t : st.thetas) t = VectorXd::Random(5);
    for (auto& t : st.shadows) t = VectorXd::Random(5);
    int rounds = 0;
    bool all = true;
    auto observer = [&](const SimulationState&, const std::vector<VectorXd>& outgoing) {
      const ConditionReport r = verify_conditions(reconstruct_weight_matrices(topo, outgoing), topo, 2);
      all = all && r.c1 && r.c2 && r.c3 && r.c5;
      ++rounds;
    };
    for (int k = 0; k < 50; ++k) run_step(st, ctx, observer);
    CHECK(rounds == 50);
    CHECK(all);
  }
}
