#include "ovmm/rewards/rewards.hpp"

#include <algorithm>

namespace ovmm::rewards {

Transition& Transition::with_events(const world::EventList& events) {
  for (auto e : events) {
    contact_drop = contact_drop || e == world::Event::ContactDrop;
    on_surface = on_surface || e == world::Event::OnSurface;
    off_surface_drop = off_surface_drop || e == world::Event::OffSurfaceDrop;
  }
  return *this;
}

double sparse_place_reward(const Transition& tr) {
  double r = 0.0;
  if (tr.contact_drop) r += 5.0;
  if (tr.on_surface) r += 1.0;
  if (tr.off_surface_drop) r -= 1.0;
  return r;
}

double distance_potential(double d, double d_start, double d_min) {
  if (d_start <= d_min) return 1.0;
  return std::clamp((d_start - d) / (d_start - d_min), 0.0, 1.0);
}

double view_potential(double p, double view_cap) { return std::clamp(p / view_cap, 0.0, 1.0); }

ShapedReward shaped_place_reward(const Transition& tr, const RewardConfig& cfg, const RewardState& st) {
  if (!st.d_start) throw UninitializedState("shaped_place_reward: reward state has no d_start");
  ShapedReward out;
  out.state = st;

  const double phi_d = distance_potential(tr.d, *st.d_start, cfg.d_min);
  if (phi_d > st.best_distance_potential) {
    out.distance_term = cfg.distance_total * (phi_d - st.best_distance_potential);
    out.state.best_distance_potential = phi_d;
  }
  const double phi_v = view_potential(tr.p, cfg.view_cap);
  if (phi_v > st.best_view_potential) {
    out.view_term = cfg.view_total * (phi_v - st.best_view_potential);
    out.state.best_view_potential = phi_v;
  }

  if (tr.contact_drop) out.contact_term += cfg.contact_bonus;
  if (tr.on_surface && st.contact_steps_paid < cfg.contact_step_cap) {
    out.contact_term += cfg.contact_per_step;
    ++out.state.contact_steps_paid;
  }

  if (tr.blocked_fraction > cfg.block_fraction_threshold) out.penalty_term += cfg.camera_block_penalty;
  if (distance(tr.next.base.position(), tr.next.start_base) > cfg.wander_radius) {
    out.penalty_term += cfg.wander_penalty;
  }
  return out;
}

}  // namespace ovmm::rewards
