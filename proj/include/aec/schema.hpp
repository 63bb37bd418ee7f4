#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "aec/predicate.hpp"

namespace aec {

struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PredicateDecl {
    std::string name;
    std::vector<std::string> arg_types;
};

// Action template over typed parameters. Precondition/effect patterns may use
// parameter variables ("?x") or object constants.
struct ActionTemplate {
    std::string name;
    std::vector<std::pair<std::string, std::string>> params;  // (?var, type)
    std::vector<Literal> preconditions;
    std::vector<PredicateId> add_effects;
    std::vector<PredicateId> delete_effects;
};

struct GroundAction {
    std::string action;  // template name
    std::vector<std::string> args;

    auto operator<=>(const GroundAction&) const = default;
    std::string str() const;
    static GroundAction parse(std::string_view text);  // same syntax as predicates
};

// Guarded Horn rule: premises => conclusion, over typed variables. Variable
// typing (via the predicate declarations) plays the role of the rule guards.
struct EntailmentRule {
    std::string id;
    std::vector<Literal> premises;
    Literal conclusion;
    bool enabled = true;
};

// Exactly-one constraint: for each binding of by_var, exactly one completion of
// the remaining pattern variables makes the predicate true. Used by world
// sampling and hypothesis enumeration.
struct MutexGroup {
    PredicateId pattern;    // e.g. in(?o,?c)
    std::string by_var;     // e.g. ?o
};

struct GoalConstraints {
    std::vector<Literal> required;

    bool operator==(const GoalConstraints&) const = default;
    std::string str() const;
};

struct InstantiatedAction {
    std::vector<Literal> preconditions;
    std::vector<PredicateId> add_effects;
    std::vector<PredicateId> delete_effects;
};

class DomainSchema {
public:
    std::vector<std::string> types;
    std::map<std::string, std::string> objects;  // object name -> type
    std::vector<PredicateDecl> predicates;
    std::vector<ActionTemplate> actions;
    std::vector<EntailmentRule> rules;
    std::vector<MutexGroup> mutexes;

    const PredicateDecl* find_predicate(const std::string& name) const;
    const ActionTemplate* find_action(const std::string& name) const;
    std::vector<std::string> objects_of_type(const std::string& type) const;

    bool predicate_is_derived(const std::string& name) const;  // some rule concludes it

    // Validates declarations and cross-references; throws SchemaError.
    void validate() const;

    // Typecheck a ground predicate against its declaration.
    bool well_typed(const PredicateId& p) const;

    // All ground instances of every declared predicate.
    std::vector<PredicateId> ground_predicates() const;

    // All ground actions; arguments of the same type are pairwise distinct.
    std::vector<GroundAction> ground_actions() const;

    // Binds a ground action's arguments into its template. Throws SchemaError
    // on arity/type mismatch.
    InstantiatedAction instantiate(const GroundAction& a) const;

    static DomainSchema parse(const std::string& text);

    // Built-in domains, expressed in the same text grammar.
    static std::string micro_text();
    static std::string household_text(int n_objects, int n_boxes);
    static DomainSchema micro();
    static DomainSchema household(int n_objects, int n_boxes);
};

// Parses a standalone "id: lit & lit => lit" rule body (the text grammar's
// rule statement without the leading keyword). Throws SchemaError.
EntailmentRule parse_rule_line(const std::string& line);

// Substitutes variables in a pattern using the given binding; unbound
// variables are left in place.
PredicateId substitute(const PredicateId& pattern,
                       const std::map<std::string, std::string>& binding);

}  // namespace aec
