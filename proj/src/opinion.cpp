#include "ngame/opinion.hpp"

#include "ngame/error.hpp"

namespace ngame {

std::vector<OpinionId> OpinionSet::members() const {
  std::vector<OpinionId> out;
  for (Mask rest = mask_; rest != 0; rest &= rest - 1) out.push_back(std::countr_zero(rest));
  return out;
}

std::string opinion_name(OpinionId o) {
  if (o == 0) return "A";
  if (o == 1) return "B";
  return "C" + std::to_string(o - 1);
}

std::string state_name(OpinionSet s) {
  std::string out;
  for (OpinionId o : s.members()) {
    if (!out.empty()) out += '+';
    out += opinion_name(o);
  }
  return out;
}

const char* to_string(RuleVariant v) {
  return v == RuleVariant::Original ? "original" : "listener_only";
}

RuleVariant parse_variant(const std::string& text) {
  if (text == "original") return RuleVariant::Original;
  if (text == "listener_only" || text == "listener-only") return RuleVariant::ListenerOnly;
  fail(ErrorCode::Config, "unknown rule variant '" + text + "'");
}

std::vector<std::pair<OpinionId, double>> utterance_distribution(OpinionSet speaker) {
  if (speaker.empty()) fail(ErrorCode::InvalidState, "speaker holds an empty opinion state");
  const double p = 1.0 / speaker.size();
  std::vector<std::pair<OpinionId, double>> out;
  for (OpinionId o : speaker.members()) out.emplace_back(o, p);
  return out;
}

InteractionOutcome apply_interaction(OpinionSet speaker, OpinionSet listener, OpinionId uttered,
                                     RuleVariant variant, bool speaker_committed,
                                     bool listener_committed) {
  require(!speaker.empty() && !listener.empty(), "interaction between empty states");
  require(speaker.contains(uttered), "uttered opinion is not held by the speaker");
  require(!speaker_committed || speaker.is_single(), "committed speaker with a mixed state");
  require(!listener_committed || listener.is_single(), "committed listener with a mixed state");

  InteractionOutcome out{speaker, listener, listener.contains(uttered)};
  const OpinionSet word = OpinionSet::single(uttered);
  if (out.success) {
    if (!listener_committed) out.new_listener = word;
    if (variant == RuleVariant::Original && !speaker_committed) out.new_speaker = word;
  } else if (!listener_committed) {
    out.new_listener = listener.with(uttered);
  }
  return out;
}

std::vector<RateTerm> interaction_rate_terms(int m, RuleVariant variant, int max_opinions) {
  if (m < 1) fail(ErrorCode::ContractViolation, "m must be at least 1");
  if (m > max_opinions || m > kMaxOpinions) {
    fail(ErrorCode::ResourceLimit,
         "explicit rate-term enumeration capped at m=" + std::to_string(max_opinions));
  }
  const std::size_t n_states = (std::size_t{1} << m) - 1;

  struct Party {
    OpinionSet state;
    Role role;
  };
  std::vector<Party> parties;
  for (std::size_t k = 0; k < n_states; ++k) parties.push_back({OpinionSet::from_index(k), Role::Uncommitted});
  for (OpinionId o = 0; o < m; ++o) parties.push_back({OpinionSet::single(o), Role::Committed});

  std::vector<RateTerm> terms;
  for (const Party& sp : parties) {
    for (const Party& li : parties) {
      const bool sc = sp.role == Role::Committed;
      const bool lc = li.role == Role::Committed;
      for (auto [o, p] : utterance_distribution(sp.state)) {
        const InteractionOutcome r = apply_interaction(sp.state, li.state, o, variant, sc, lc);
        RateTerm t{sp.state, li.state, sp.role, li.role, o, p, {}};
        auto move = [&t](OpinionSet from, OpinionSet to) {
          if (from == to) return;
          t.delta.emplace_back(from, -1);
          t.delta.emplace_back(to, +1);
        };
        if (!sc) move(sp.state, r.new_speaker);
        if (!lc) move(li.state, r.new_listener);
        terms.push_back(std::move(t));
      }
    }
  }
  return terms;
}

std::vector<double> evaluate_rate_terms(const std::vector<RateTerm>& terms, int m,
                                        const std::vector<double>& x,
                                        const std::vector<double>& committed) {
  const std::size_t n_states = (std::size_t{1} << m) - 1;
  require(x.size() == n_states && committed.size() == static_cast<std::size_t>(m),
          "state size does not match m");
  auto density = [&](OpinionSet s, Role role) {
    return role == Role::Committed ? committed[s.members().front()] : x[s.index()];
  };
  std::vector<double> dx(n_states, 0.0);
  for (const RateTerm& t : terms) {
    if (t.delta.empty()) continue;
    const double rate = density(t.speaker, t.speaker_role) * density(t.listener, t.listener_role) * t.probability;
    for (auto [s, d] : t.delta) dx[s.index()] += d * rate;
  }
  return dx;
}

}  // namespace ngame
