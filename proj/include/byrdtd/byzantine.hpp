#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "byrdtd/mrp.hpp"

namespace byrdtd {

enum class AttackKind { None, SignFlip, SameValue, GaussianNoise };

AttackKind parse_attack_kind(const std::string& name);
const char* attack_name(AttackKind kind);

struct AttackModel {
  AttackKind kind = AttackKind::None;
  double noise_std = 1.0;
  std::uint64_t seed = 0;
  // GaussianNoise: re-pick the victim every step, or keep the first pick for the whole run.
  bool victim_per_step = true;

  void validate() const;
};

// Per Byzantine agent state for the attack: its random stream and, when the
// victim is fixed, the chosen honest id.
struct AttackerState {
  Rng rng;
  int fixed_victim = -1;
};

AttackerState make_attacker_state(const AttackModel& attack, int byz_id);

// None -> own shadow, SignFlip -> -shadow, SameValue -> 0,
// GaussianNoise -> uniformly chosen honest parameter + N(0, noise_std^2) per coordinate.
VectorXd byzantine_message(const AttackModel& attack, int byz_id, const std::map<int, VectorXd>& honest_params,
                           const VectorXd& own_shadow, AttackerState& state);

}  // namespace byrdtd
