#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string_view>
#include <utility>
#include <vector>

#include "shortcoder/syntax/syntax.hpp"

namespace shortcoder::rules {

enum class RuleId : std::uint8_t { R1 = 1, R2, R3, R4, R5, R6, R7, R8, R9, R10 };

constexpr std::array<RuleId, 10> kAllRules = {RuleId::R1, RuleId::R2, RuleId::R3, RuleId::R4,
                                              RuleId::R5, RuleId::R6, RuleId::R7, RuleId::R8,
                                              RuleId::R9, RuleId::R10};

std::string_view to_string(RuleId id);
/// Accepts "R3" or "r3".
std::optional<RuleId> parse_rule_id(std::string_view text);

enum class Strictness : std::uint8_t { PaperFaithful, Strict };
std::string_view to_string(Strictness s);
std::optional<Strictness> parse_strictness(std::string_view text);

enum class Safety : std::uint8_t { AlwaysSafe, Guarded };

struct Rule {
  RuleId id;
  std::string_view name;
  Safety safety;
  /// One-line description of the rewrite, used in prompts and reports.
  std::string_view description;
};

/// The ten rules in id order.
const std::array<Rule, 10>& catalog();
const Rule& rule(RuleId id);

struct RuleConfig {
  std::set<RuleId> enabled{kAllRules.begin(), kAllRules.end()};
  Strictness strictness = Strictness::Strict;
  int max_iterations = 32;

  /// Throws std::invalid_argument when enabled is empty or max_iterations < 1.
  void validate() const;
};

struct Firing {
  RuleId rule;
  syntax::Span site;  // span in the tree the rule was applied to

  bool operator==(const Firing&) const = default;
};

struct RewriteResult {
  syntax::SyntaxTree tree;
  std::vector<Firing> fired;
  int iterations = 1;
};

/// simplify_joint still fired in its last permitted sweep.
class BudgetExhausted : public std::runtime_error {
 public:
  explicit BudgetExhausted(int iterations);
  int iterations() const { return iterations_; }

 private:
  int iterations_;
};

std::set<RuleId> applicable_rules(const syntax::SyntaxTree& tree, const RuleConfig& config);

/// One top-down pass rewriting every non-overlapping site of `id`.
/// Throws std::invalid_argument if `id` is not enabled.
RewriteResult apply_rule(const syntax::SyntaxTree& tree, RuleId id, const RuleConfig& config);

/// Sweeps the enabled rules in ascending id order until a sweep fires nothing.
RewriteResult simplify_joint(const syntax::SyntaxTree& tree, const RuleConfig& config);

/// apply_rule of each applicable rule on the original tree, ordered by id.
std::vector<std::pair<RuleId, RewriteResult>> simplify_independent(const syntax::SyntaxTree& tree,
                                                                   const RuleConfig& config);

}  // namespace shortcoder::rules
