#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "shortcoder/rules/rules.hpp"

namespace shortcoder::rules::detail {

using syntax::Kind;
using syntax::Node;
using syntax::NodePtr;

/// One statement list on the path from the module down to a match site.
struct Frame {
  const std::vector<NodePtr>* stmts;
  std::size_t index;  // statement currently being visited
  const Node* owner;  // Module, FunctionDef, If, For, ...
  bool loop_body;
};

/// The enclosing statement lists of a site, innermost last.
class Scope {
 public:
  explicit Scope(const std::vector<Frame>& frames) : frames_(frames) {}

  /// Kind of the nearest enclosing Module, FunctionDef or ClassDef.
  Kind scope_kind() const;

  /// Whether `id` appears in code that may run after statements
  /// [index, index + consumed) of the innermost list within the same scope.
  /// Enclosing loops count as a whole, minus the region itself, since a later
  /// iteration can read earlier writes. At module level every function and
  /// class body is included.
  bool mentioned_later(std::size_t consumed, const std::string& id) const;

 private:
  const std::vector<Frame>& frames_;
};

/// Captured pieces of an accepted site. Only a rule's matcher builds one.
struct Match {
  std::size_t consumed = 1;
  std::vector<NodePtr> parts;
  int variant = 0;
};

class RuleImpl {
 public:
  virtual ~RuleImpl() = default;

  virtual std::optional<Match> match_statements(const Scope&, const std::vector<NodePtr>&,
                                                std::size_t, Strictness) const {
    return std::nullopt;
  }
  virtual std::vector<NodePtr> rewrite_statements(const Match&, Strictness) const { return {}; }

  virtual std::optional<Match> match_expression(const NodePtr&, const Node* /*parent*/,
                                                Strictness) const {
    return std::nullopt;
  }
  virtual NodePtr rewrite_expression(const Match&, Strictness) const { return nullptr; }
};

const RuleImpl& impl(RuleId id);

std::unique_ptr<RuleImpl> make_r1();
std::unique_ptr<RuleImpl> make_r2();
std::unique_ptr<RuleImpl> make_r3();
std::unique_ptr<RuleImpl> make_r4();
std::unique_ptr<RuleImpl> make_r5();
std::unique_ptr<RuleImpl> make_r6();
std::unique_ptr<RuleImpl> make_r7();
std::unique_ptr<RuleImpl> make_r8();
std::unique_ptr<RuleImpl> make_r9();
std::unique_ptr<RuleImpl> make_r10();

// ---- tree queries shared by the rules --------------------------------------

bool is_name(const NodePtr& n, std::string_view id = {});
/// Structural equality ignoring grouping parentheses.
bool same(const NodePtr& a, const NodePtr& b);

/// Every Name id read or written anywhere below n.
std::set<std::string> names_in(const NodePtr& n);
bool mentions(const NodePtr& n, const std::string& id);
bool mentions(const std::vector<const Node*>& nodes, const std::string& id);
bool mentions_excluding(const Node& n, const std::string& id, const std::set<const Node*>& skip);

/// True if any node below n (nested scopes included) satisfies kind.
bool contains_kind(const NodePtr& n, std::initializer_list<Kind> kinds);

/// Like contains_kind but stops at def, class and lambda boundaries.
bool contains_kind_in_scope(const NodePtr& n, std::initializer_list<Kind> kinds);

/// Names, attribute chains on names, and literals.
bool effect_free(const NodePtr& n);

/// Number, string, bytes, True/False/None/..., signed number, or a tuple of these.
bool immutable_literal(const NodePtr& n);

/// Any binding of `id` below n: assignment targets, loop and with targets,
/// del, imports, def/class names, walrus, except-as, global/nonlocal.
bool binds(const NodePtr& n, const std::string& id);

/// The single-target Assign `target = value` parts, or nullopt.
std::optional<std::pair<NodePtr, NodePtr>> simple_assign(const NodePtr& stmt);

/// Statement with only its leading comments kept.
NodePtr keep_leading_comments(const NodePtr& replacement, const NodePtr& original);

NodePtr stmt(Kind kind, std::vector<NodePtr> kids, std::string text = {});
NodePtr expr(Kind kind, std::vector<NodePtr> kids, std::string text = {});
NodePtr block(std::vector<NodePtr> stmts);

}  // namespace shortcoder::rules::detail
