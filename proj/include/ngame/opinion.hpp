#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace ngame {

/// Index of a single opinion, in [0, m).  Opinion 0 is conventionally A and
/// opinion 1 is B.
using OpinionId = int;

/// Hard upper bound on m imposed by the 32-bit mask encoding.
inline constexpr int kMaxOpinions = 31;

/// Non-empty subset of the m single opinions, encoded as a bit mask with
/// opinion k at bit k.  The dense index of a state among the 2^m - 1 states is
/// mask - 1.
class OpinionSet {
 public:
  using Mask = std::uint32_t;

  constexpr OpinionSet() = default;
  static constexpr OpinionSet from_mask(Mask mask) { return OpinionSet(mask); }
  static constexpr OpinionSet single(OpinionId o) { return OpinionSet(Mask{1} << o); }
  static constexpr OpinionSet from_index(std::size_t index) { return OpinionSet(static_cast<Mask>(index + 1)); }

  constexpr Mask mask() const { return mask_; }
  constexpr std::size_t index() const { return mask_ - 1; }
  constexpr bool empty() const { return mask_ == 0; }
  constexpr int size() const { return std::popcount(mask_); }
  constexpr bool contains(OpinionId o) const { return (mask_ >> o) & 1u; }
  constexpr bool is_single() const { return std::has_single_bit(mask_); }
  constexpr OpinionSet with(OpinionId o) const { return OpinionSet(mask_ | (Mask{1} << o)); }
  constexpr bool operator==(const OpinionSet&) const = default;

  std::vector<OpinionId> members() const;

 private:
  constexpr explicit OpinionSet(Mask mask) : mask_(mask) {}
  Mask mask_ = 0;
};

/// Human label for opinion o in an m-opinion system: A, B, C1 ... C(m-2).
std::string opinion_name(OpinionId o);
/// Label of a state, e.g. "A", "A+C2".
std::string state_name(OpinionSet s);

enum class RuleVariant { Original, ListenerOnly };

const char* to_string(RuleVariant v);
RuleVariant parse_variant(const std::string& text);

struct InteractionOutcome {
  OpinionSet new_speaker;
  OpinionSet new_listener;
  bool success = false;
};

/// Uniform utterance distribution over the speaker's opinions.
std::vector<std::pair<OpinionId, double>> utterance_distribution(OpinionSet speaker);

/// One pairwise interaction.  Committed parties must hold a singleton and are
/// never modified; a committed listener holding the uttered opinion still
/// counts as a success and collapses an uncommitted speaker (Original only).
InteractionOutcome apply_interaction(OpinionSet speaker, OpinionSet listener, OpinionId uttered,
                                     RuleVariant variant, bool speaker_committed,
                                     bool listener_committed);

enum class Role { Uncommitted, Committed };

/// One (speaker, listener, utterance) channel of the pair-sampling dynamics.
/// Its rate is density(speaker) * density(listener) * probability, where a
/// committed party's density is the committed fraction of its opinion.  `delta`
/// lists the signed change in uncommitted population per opinion state.
struct RateTerm {
  OpinionSet speaker;
  OpinionSet listener;
  Role speaker_role = Role::Uncommitted;
  Role listener_role = Role::Uncommitted;
  OpinionId uttered = 0;
  double probability = 0.0;
  std::vector<std::pair<OpinionSet, int>> delta;
};

/// Default cap for the explicit term enumeration, which grows as 4^m.
inline constexpr int kMaxEnumeratedOpinions = 10;

/// Enumerates every ordered pairing of states and roles with its utterance
/// probability and net state change.
std::vector<RateTerm> interaction_rate_terms(int m, RuleVariant variant,
                                             int max_opinions = kMaxEnumeratedOpinions);

/// Assembles dx/dt over the 2^m - 1 uncommitted states from a term list.
std::vector<double> evaluate_rate_terms(const std::vector<RateTerm>& terms, int m,
                                        const std::vector<double>& x,
                                        const std::vector<double>& committed);

}  // namespace ngame
