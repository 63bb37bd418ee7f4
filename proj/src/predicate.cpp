#include "aec/predicate.hpp"

#include <stdexcept>

namespace aec {

bool PredicateId::is_ground() const {
    for (const auto& a : args)
        if (!a.empty() && a[0] == '?') return false;
    return true;
}

std::string PredicateId::str() const {
    if (args.empty()) return name;
    std::string out = name;
    out += '(';
    for (size_t i = 0; i < args.size(); ++i) {
        if (i) out += ',';
        out += args[i];
    }
    out += ')';
    return out;
}

PredicateId PredicateId::parse(std::string_view text) {
    PredicateId p;
    auto lp = text.find('(');
    if (lp == std::string_view::npos) {
        if (text.empty()) throw std::invalid_argument("empty predicate");
        p.name = std::string(text);
        return p;
    }
    p.name = std::string(text.substr(0, lp));
    if (p.name.empty() || text.back() != ')')
        throw std::invalid_argument("malformed predicate: " + std::string(text));
    std::string_view inner = text.substr(lp + 1, text.size() - lp - 2);
    size_t start = 0;
    while (start <= inner.size() && !inner.empty()) {
        auto comma = inner.find(',', start);
        auto piece = inner.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                         : comma - start);
        if (piece.empty()) throw std::invalid_argument("malformed predicate: " + std::string(text));
        p.args.emplace_back(piece);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return p;
}

std::string literal_str(const Literal& lit) {
    return lit.first.str() + "=" + (lit.second ? "1" : "0");
}

}  // namespace aec
