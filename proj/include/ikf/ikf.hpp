#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ikf/data.hpp"
#include "ikf/kings.hpp"
#include "ikf/rng.hpp"

namespace ikf {

enum class InteractionKind { Accompanied, Synergistic, Hierarchical };
std::string to_string(InteractionKind kind);
InteractionKind parse_interaction_kind(const std::string& text);

enum class FirstKingMode { Named, Random, Auto };

struct FirstKing {
  FirstKingMode mode = FirstKingMode::Auto;
  std::string name;  ///< variable name or 1-based index, for Named.
};

struct IkfParams {
  double alpha = 0.5;
  std::size_t stop_size = 0;  ///< K; 0 selects max(10, ceil(0.02 p)).
  std::optional<std::size_t> max_kings;
  FirstKing first_king;
  KingParams king;
  std::optional<double> tau_main;   ///< default max(0.25 * max depth-1 PVIM across Kings, tau_dir).
  double tau_dir = 1e-6;
  std::optional<double> tau_order;  ///< default max(0.1 * profile peak, tau_dir), per King.
  bool restrict_to_survivors = false;  ///< rank w^(i) over S_{i-1} instead of all p.
};

std::size_t default_stop_size(std::size_t p);

/// Validates ranges; throws std::invalid_argument.
void validate(const IkfParams& params);

struct TypingThresholds {
  double tau_main = 0.0;
  double tau_dir = 1e-6;
  bool operator==(const TypingThresholds&) const = default;
};

/// Evidence for the orderings of an interaction led by one member.
struct DirectionEvidence {
  std::size_t lead = 0;
  bool observed = false;  ///< lead was a King and produced such a path.
  std::size_t count = 0;
  double pvim_sum = 0.0;
  double avg_pvim = 0.0;
  bool operator==(const DirectionEvidence&) const = default;
};

struct TypedInteraction {
  std::vector<std::size_t> vars;  ///< ascending.
  int order = 2;
  InteractionKind kind = InteractionKind::Synergistic;
  std::vector<std::size_t> dominant;  ///< Hierarchical only: leading member(s).
  bool low_confidence = false;
  std::vector<DirectionEvidence> directions;     ///< one per member, in vars order.
  std::vector<std::optional<double>> main_pvims;  ///< depth-1 PVIM, Kings only.
  TypingThresholds thresholds;
  bool operator==(const TypedInteraction&) const = default;
};

struct IkfReport {
  std::vector<double> W;
  std::vector<KingReport> kings;
  std::vector<std::vector<std::size_t>> survived;  ///< S_1, S_2, ... ascending members.
  std::vector<std::vector<int>> orders;            ///< inferred orders per King.
  std::vector<double> order_taus;
  std::vector<TypedInteraction> interactions;
  TypingThresholds thresholds;
  std::size_t stop_size = 0;

  std::vector<std::size_t> ranking() const;
  /// Every King's depth-d shortlist for `metric`, in King order.
  std::vector<PathRecord> concatenated_shortlist(int depth, PathMetric metric) const;
};

std::size_t choose_first_king(const Dataset& data, const IkfParams& params,
                              const SeedContext& seeds);

/// Explicit thresholds, or tau_main = max(0.25 * largest depth-1 PVIM over
/// Kings, tau_dir). The tau_dir floor keeps numerically-zero main effects
/// from counting when no King has one.
TypingThresholds typing_thresholds(std::span<const KingReport> kings, const IkfParams& params);

/// Explicit tau_order, or max(0.1 * profile peak, tau_dir).
double order_threshold(std::span<const double> profile, const IkfParams& params);

/// Orders claimed by a depth profile: 1 when profile[0] > tau, d >= 2 when
/// profile[d-1] - profile[d-2] > tau.
std::vector<int> infer_orders(std::span<const double> profile, double tau);

/// Accompanied if any member's depth-1 PVIM exceeds tau_main; otherwise
/// Synergistic if every direction's avg PVIM exceeds tau_dir; otherwise
/// Hierarchical led by the directions that do. With no direction above
/// tau_dir the result is Synergistic flagged low-confidence.
TypedInteraction classify_interaction(std::vector<std::size_t> vars,
                                      std::vector<DirectionEvidence> directions,
                                      std::vector<std::optional<double>> main_pvims,
                                      const TypingThresholds& thresholds);

/// Types every unordered variable set that appears in any shortlist.
std::vector<TypedInteraction> type_interactions(std::span<const KingReport> kings,
                                                const TypingThresholds& thresholds);

IkfReport run_ikf(const Dataset& data, const IkfParams& params, const SeedContext& seeds);

}  // namespace ikf
