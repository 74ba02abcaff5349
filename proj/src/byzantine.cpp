#include "byrdtd/byzantine.hpp"

#include <cmath>
#include <iterator>

#include "byrdtd/error.hpp"

namespace byrdtd {

AttackKind parse_attack_kind(const std::string& name) {
  if (name == "none") return AttackKind::None;
  if (name == "sign_flip") return AttackKind::SignFlip;
  if (name == "same_value") return AttackKind::SameValue;
  if (name == "gaussian_noise") return AttackKind::GaussianNoise;
  throw Error(ErrorCode::InvalidSpec, "unknown attack kind '" + name + "'");
}

const char* attack_name(AttackKind kind) {
  switch (kind) {
    case AttackKind::None: return "none";
    case AttackKind::SignFlip: return "sign_flip";
    case AttackKind::SameValue: return "same_value";
    case AttackKind::GaussianNoise: return "gaussian_noise";
  }
  return "none";
}

void AttackModel::validate() const {
  if (!(noise_std >= 0.0) || !std::isfinite(noise_std))
    throw Error(ErrorCode::InvalidSpec, "noise_std must be a finite non-negative number");
}

AttackerState make_attacker_state(const AttackModel& attack, int byz_id) {
  return AttackerState{Rng(derive_seed(attack.seed, static_cast<std::uint64_t>(byz_id))), -1};
}

VectorXd byzantine_message(const AttackModel& attack, int byz_id, const std::map<int, VectorXd>& honest_params,
                           const VectorXd& own_shadow, AttackerState& state) {
  (void)byz_id;
  switch (attack.kind) {
    case AttackKind::None:
      return own_shadow;
    case AttackKind::SignFlip:
      return -own_shadow;
    case AttackKind::SameValue:
      return VectorXd::Zero(own_shadow.size());
    case AttackKind::GaussianNoise: {
      if (honest_params.empty()) throw Error(ErrorCode::NoHonestAgents, "gaussian attack needs an honest parameter");
      auto it = honest_params.end();
      if (!attack.victim_per_step && state.fixed_victim >= 0) it = honest_params.find(state.fixed_victim);
      if (it == honest_params.end()) {
        it = std::next(honest_params.begin(),
                       static_cast<std::ptrdiff_t>(uniform_index(state.rng, honest_params.size())));
        state.fixed_victim = it->first;
      }
      VectorXd msg = it->second;
      if (attack.noise_std > 0.0)
        for (Eigen::Index d = 0; d < msg.size(); ++d) msg(d) += attack.noise_std * standard_normal(state.rng);
      return msg;
    }
  }
  return own_shadow;
}

}  // namespace byrdtd
