#pragma once

#include <compare>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace aec {

// A ground (or pattern) predicate instance: name plus ordered argument list.
// Arguments starting with '?' are variables; fully ground predicates have none.
struct PredicateId {
    std::string name;
    std::vector<std::string> args;

    auto operator<=>(const PredicateId&) const = default;

    bool is_ground() const;
    std::string str() const;  // "in(o1,c1)" / "raining"

    // Parses "name(a,b)" or bare "name". Throws std::invalid_argument on
    // malformed input.
    static PredicateId parse(std::string_view text);
};

// A predicate together with a required/asserted boolean value.
using Literal = std::pair<PredicateId, bool>;

std::string literal_str(const Literal& lit);

}  // namespace aec
