#ifndef SIMDIALOG_SCORING_HPP
#define SIMDIALOG_SCORING_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "simdialog/model.hpp"

namespace simdialog {

namespace detail {

inline void require_same_length(std::size_t weights, std::size_t states, const char* what) {
  if (weights != states)
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + ": " + std::to_string(weights) + " weights for " +
                                                  std::to_string(states) + " states");
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

}  // namespace detail

/// Cause score of a reply: general + w_player . s_player + w_npc . s_npc.
inline double cause_score(const CauseWeights& cause, const StateVector& player, const StateVector& npc) {
  detail::require_same_length(cause.player.size(), player.size(), "player cause");
  detail::require_same_length(cause.npc.size(), npc.size(), "npc cause");
  return cause.general + detail::dot(cause.player, player.values()) + detail::dot(cause.npc, npc.values());
}

/// Returns states + effects, each component clamped into [-1, 1].
inline StateVector apply_effect(const StateVector& states, std::span<const double> effects) {
  detail::require_same_length(effects.size(), states.size(), "effect");
  StateVector out = states;
  for (std::size_t i = 0; i < effects.size(); ++i) out.set(i, std::max(-1.0, std::min(1.0, states[i] + effects[i])));
  return out;
}

enum class SelectionMode { Argmax, SoftmaxSample };

struct SelectionPolicy {
  SelectionMode mode = SelectionMode::Argmax;
  double temperature = 1.0;
  std::uint64_t seed = 0;

  static SelectionPolicy argmax() { return {}; }
  static SelectionPolicy softmax(double temperature, std::uint64_t seed) {
    if (!(temperature > 0.0)) throw Error(ErrorCode::InvalidArgument, "softmax temperature must be positive");
    return {SelectionMode::SoftmaxSample, temperature, seed};
  }

  bool operator==(const SelectionPolicy&) const = default;
};

/// Seeded generator for sampled selection. Uniform draws are built from the
/// raw 64-bit output so sequences are identical across standard libraries.
class SelectionRng {
 public:
  explicit SelectionRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool operator==(const SelectionRng&) const = default;

 private:
  std::mt19937_64 engine_;
};

struct Candidate {
  NodeId node;
  CauseWeights cause;
  std::optional<ActorId> npc;  // whose NPC states feed the score
};

struct Selection {
  std::size_t index = 0;
  NodeId node;
  double score = 0.0;
};

using NpcStatesLookup = std::function<const StateVector&(const std::optional<ActorId>&)>;

/// Picks the NPC reply among candidates listed in ascending edge order.
/// Argmax keeps the first maximum, so ties go to the lowest edge order.
/// SoftmaxSample draws proportionally to exp(score / temperature).
inline Selection select_npc_response(std::span<const Candidate> candidates, const StateVector& player,
                                     const NpcStatesLookup& npc_states_of, const SelectionPolicy& policy,
                                     SelectionRng& rng) {
  if (candidates.empty()) throw Error(ErrorCode::NoCandidates, "NPC turn has no candidate replies");

  std::vector<double> scores;
  scores.reserve(candidates.size());
  for (const auto& c : candidates) scores.push_back(cause_score(c.cause, player, npc_states_of(c.npc)));

  std::size_t chosen = 0;
  if (policy.mode == SelectionMode::Argmax) {
    for (std::size_t i = 1; i < scores.size(); ++i)
      if (scores[i] > scores[chosen]) chosen = i;
  } else {
    if (!(policy.temperature > 0.0)) throw Error(ErrorCode::InvalidArgument, "softmax temperature must be positive");
    const double top = *std::max_element(scores.begin(), scores.end());
    std::vector<double> cumulative(scores.size());
    double total = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      total += std::exp((scores[i] - top) / policy.temperature);
      cumulative[i] = total;
    }
    const double draw = rng.uniform() * total;
    chosen = scores.size() - 1;
    for (std::size_t i = 0; i < cumulative.size(); ++i) {
      if (draw < cumulative[i]) {
        chosen = i;
        break;
      }
    }
  }
  return {chosen, candidates[chosen].node, scores[chosen]};
}

/// Stateless form: the generator is seeded from the policy on every call.
inline Selection select_npc_response(std::span<const Candidate> candidates, const StateVector& player,
                                     const NpcStatesLookup& npc_states_of, const SelectionPolicy& policy) {
  SelectionRng rng(policy.seed);
  return select_npc_response(candidates, player, npc_states_of, policy, rng);
}

/// Background tint derived from the mean of every cause component
/// (general, player and NPC weights).
struct ColorClass {
  enum class Kind { Neutral, Positive, Negative };

  Kind kind = Kind::Neutral;
  double intensity = 0.0;  // in [0, 1]; zero for Neutral

  bool operator==(const ColorClass&) const = default;
};

inline constexpr double kNeutralBand = 1e-9;

inline std::string_view to_string(ColorClass::Kind kind) {
  switch (kind) {
    case ColorClass::Kind::Neutral: return "neutral";
    case ColorClass::Kind::Positive: return "positive";
    case ColorClass::Kind::Negative: return "negative";
  }
  return "neutral";
}

inline double mean_cause(const CauseWeights& cause) {
  double sum = cause.general;
  for (double w : cause.player) sum += w;
  for (double w : cause.npc) sum += w;
  return sum / static_cast<double>(1 + cause.player.size() + cause.npc.size());
}

inline ColorClass color_class(const CauseWeights& cause) {
  const double mean = mean_cause(cause);
  if (mean > kNeutralBand) return {ColorClass::Kind::Positive, std::min(1.0, mean)};
  if (mean < -kNeutralBand) return {ColorClass::Kind::Negative, std::min(1.0, -mean)};
  return {};
}

}  // namespace simdialog

#endif  // SIMDIALOG_SCORING_HPP
