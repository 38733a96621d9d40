#include <gtest/gtest.h>

#include <vector>

#include "ovmm/common/rng.hpp"
#include "ovmm/rewards/rewards.hpp"

namespace ovmm {
namespace {

using namespace ovmm::rewards;

Transition at(double d, double p = 0.0) {
  Transition tr;
  tr.d = d;
  tr.p = p;
  return tr;
}

TEST(Potentials, Examples) {
  EXPECT_DOUBLE_EQ(distance_potential(0.6, 1.0, 0.2), 0.5);
  EXPECT_DOUBLE_EQ(distance_potential(0.1, 1.0, 0.2), 1.0);
  EXPECT_DOUBLE_EQ(distance_potential(1.5, 1.0, 0.2), 0.0);
  EXPECT_DOUBLE_EQ(distance_potential(0.5, 0.1, 0.2), 1.0);
  EXPECT_DOUBLE_EQ(view_potential(0.15, 0.3), 0.5);
  EXPECT_DOUBLE_EQ(view_potential(0.6, 0.3), 1.0);
  EXPECT_DOUBLE_EQ(view_potential(0.0, 0.3), 0.0);
}

TEST(Shaping, ReachingMinimumDistanceInOneStepPaysFullBudget) {
  const RewardConfig cfg;
  const auto r = shaped_place_reward(at(0.2), cfg, RewardState::begin(1.0));
  EXPECT_DOUBLE_EQ(r.distance_term, 40.0);
  EXPECT_DOUBLE_EQ(r.state.best_distance_potential, 1.0);
}

TEST(Shaping, OscillationIsPaidOnce) {
  const RewardConfig cfg;
  auto st = RewardState::begin(1.0);
  double total = 0.0;
  for (double d : {1.0, 0.6, 1.0, 0.6, 1.0, 0.6}) {
    const auto r = shaped_place_reward(at(d), cfg, st);
    total += r.distance_term;
    st = r.state;
  }
  EXPECT_DOUBLE_EQ(total, 20.0);
}

TEST(Shaping, CameraBlockAndWanderPenaltiesStack) {
  const RewardConfig cfg;
  auto tr = at(1.0);
  tr.blocked_fraction = 0.5;
  tr.next.base = {2.0, 0.0, 0.0};
  tr.next.start_base = {0.0, 0.0};
  EXPECT_DOUBLE_EQ(shaped_place_reward(tr, cfg, RewardState::begin(1.0)).penalty_term, -10.0);
  tr.blocked_fraction = 0.2;
  tr.next.base = {1.5, 0.0, 0.0};
  EXPECT_DOUBLE_EQ(shaped_place_reward(tr, cfg, RewardState::begin(1.0)).penalty_term, 0.0);
}

TEST(Shaping, ContactBonusAndCappedSurfaceSteps) {
  const RewardConfig cfg;
  auto st = RewardState::begin(1.0);
  double contact = 0.0;
  auto first = at(1.0);
  first.contact_drop = true;
  first.on_surface = true;
  auto r = shaped_place_reward(first, cfg, st);
  contact += r.contact_term;
  st = r.state;
  for (int k = 0; k < 20; ++k) {
    auto tr = at(1.0);
    tr.on_surface = true;
    r = shaped_place_reward(tr, cfg, st);
    contact += r.contact_term;
    st = r.state;
  }
  EXPECT_DOUBLE_EQ(contact, 195.0);
}

TEST(Shaping, RequiresInitializedState) {
  EXPECT_THROW(shaped_place_reward(at(0.5), RewardConfig{}, RewardState{}), UninitializedState);
}

TEST(Shaping, CumulativeEqualsBudgetTimesBestPotential) {
  const RewardConfig cfg;
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const double d0 = rng.uniform(0.3, 2.0);
    auto st = RewardState::begin(d0);
    double dist = 0.0;
    double view = 0.0;
    for (int k = 0; k < 300; ++k) {
      const auto r = shaped_place_reward(at(rng.uniform(0.0, 2.5), rng.uniform(0.0, 0.4)), cfg, st);
      ASSERT_GE(r.distance_term, 0.0);
      ASSERT_GE(r.view_term, 0.0);
      dist += r.distance_term;
      view += r.view_term;
      st = r.state;
    }
    EXPECT_NEAR(dist, 40.0 * st.best_distance_potential, 1e-9);
    EXPECT_NEAR(view, 30.0 * st.best_view_potential, 1e-9);
  }
}

TEST(Sparse, EventValues) {
  Transition tr;
  tr.with_events({world::Event::ContactDrop, world::Event::OnSurface});
  EXPECT_DOUBLE_EQ(sparse_place_reward(tr), 6.0);
  Transition miss;
  miss.with_events({world::Event::Released, world::Event::OffSurfaceDrop});
  EXPECT_DOUBLE_EQ(sparse_place_reward(miss), -1.0);
}

}  // namespace
}  // namespace ovmm
