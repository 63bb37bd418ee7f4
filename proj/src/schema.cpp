#include "aec/schema.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace aec {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream iss(s);
    std::string tok;
    while (iss >> tok) out.push_back(tok);
    return out;
}

// "in(?o,?src)=1" -> Literal
Literal parse_literal(const std::string& tok) {
    auto eq = tok.rfind('=');
    if (eq == std::string::npos || eq + 2 != tok.size())
        throw SchemaError("expected literal 'pred(...)=0|1', got: " + tok);
    char v = tok[eq + 1];
    if (v != '0' && v != '1') throw SchemaError("literal value must be 0 or 1: " + tok);
    return {PredicateId::parse(tok.substr(0, eq)), v == '1'};
}

}  // namespace

std::string GroundAction::str() const {
    PredicateId p{action, args};
    return p.str();
}

GroundAction GroundAction::parse(std::string_view text) {
    auto p = PredicateId::parse(text);
    return GroundAction{p.name, p.args};
}

std::string GoalConstraints::str() const {
    std::string out;
    for (size_t i = 0; i < required.size(); ++i) {
        if (i) out += "&";
        out += literal_str(required[i]);
    }
    return out;
}

const PredicateDecl* DomainSchema::find_predicate(const std::string& name) const {
    for (const auto& d : predicates)
        if (d.name == name) return &d;
    return nullptr;
}

const ActionTemplate* DomainSchema::find_action(const std::string& name) const {
    for (const auto& a : actions)
        if (a.name == name) return &a;
    return nullptr;
}

std::vector<std::string> DomainSchema::objects_of_type(const std::string& type) const {
    std::vector<std::string> out;
    for (const auto& [name, t] : objects)
        if (t == type) out.push_back(name);
    return out;
}

bool DomainSchema::predicate_is_derived(const std::string& name) const {
    for (const auto& r : rules)
        if (r.conclusion.first.name == name) return true;
    return false;
}

bool DomainSchema::well_typed(const PredicateId& p) const {
    const auto* decl = find_predicate(p.name);
    if (!decl || decl->arg_types.size() != p.args.size()) return false;
    for (size_t i = 0; i < p.args.size(); ++i) {
        auto it = objects.find(p.args[i]);
        if (it == objects.end() || it->second != decl->arg_types[i]) return false;
    }
    return true;
}

void DomainSchema::validate() const {
    auto known_type = [&](const std::string& t) {
        return std::find(types.begin(), types.end(), t) != types.end();
    };
    for (const auto& [obj, t] : objects)
        if (!known_type(t)) throw SchemaError("object " + obj + " has unknown type " + t);
    std::set<std::string> pred_names;
    for (const auto& d : predicates) {
        if (!pred_names.insert(d.name).second)
            throw SchemaError("duplicate predicate declaration: " + d.name);
        for (const auto& t : d.arg_types)
            if (!known_type(t)) throw SchemaError("predicate " + d.name + " uses unknown type " + t);
    }
    auto check_pattern = [&](const PredicateId& p, std::map<std::string, std::string>& vars,
                             const std::string& where) {
        const auto* decl = find_predicate(p.name);
        if (!decl) throw SchemaError(where + ": undeclared predicate " + p.name);
        if (decl->arg_types.size() != p.args.size())
            throw SchemaError(where + ": arity mismatch for " + p.str());
        for (size_t i = 0; i < p.args.size(); ++i) {
            const auto& a = p.args[i];
            if (!a.empty() && a[0] == '?') {
                auto [it, inserted] = vars.emplace(a, decl->arg_types[i]);
                if (!inserted && it->second != decl->arg_types[i])
                    throw SchemaError(where + ": variable " + a + " type conflict in " + p.str());
            } else {
                auto it = objects.find(a);
                if (it == objects.end() || it->second != decl->arg_types[i])
                    throw SchemaError(where + ": bad constant " + a + " in " + p.str());
            }
        }
    };
    std::set<std::string> action_names;
    for (const auto& a : actions) {
        if (!action_names.insert(a.name).second)
            throw SchemaError("duplicate action: " + a.name);
        std::map<std::string, std::string> vars;
        for (const auto& [v, t] : a.params) {
            if (!known_type(t)) throw SchemaError("action " + a.name + " param type " + t);
            vars[v] = t;
        }
        size_t n_params = vars.size();
        for (const auto& [p, req] : a.preconditions) check_pattern(p, vars, "action " + a.name);
        for (const auto& p : a.add_effects) check_pattern(p, vars, "action " + a.name);
        for (const auto& p : a.delete_effects) check_pattern(p, vars, "action " + a.name);
        if (vars.size() != n_params)
            throw SchemaError("action " + a.name + " uses undeclared parameter variables");
    }
    std::set<std::string> rule_ids;
    for (const auto& r : rules) {
        if (!rule_ids.insert(r.id).second) throw SchemaError("duplicate rule id: " + r.id);
        if (r.premises.empty()) throw SchemaError("rule " + r.id + " has no premises");
        std::map<std::string, std::string> vars;
        for (const auto& [p, v] : r.premises) {
            check_pattern(p, vars, "rule " + r.id);
            if (p == r.conclusion.first)
                throw SchemaError("rule " + r.id + " conclusion among premises");
        }
        check_pattern(r.conclusion.first, vars, "rule " + r.id);
    }
    for (const auto& m : mutexes) {
        std::map<std::string, std::string> vars;
        check_pattern(m.pattern, vars, "mutex");
    }
}

std::vector<PredicateId> DomainSchema::ground_predicates() const {
    std::vector<PredicateId> out;
    for (const auto& d : predicates) {
        std::vector<std::vector<std::string>> pools;
        for (const auto& t : d.arg_types) pools.push_back(objects_of_type(t));
        std::vector<std::string> args(d.arg_types.size());
        std::function<void(size_t)> rec = [&](size_t i) {
            if (i == pools.size()) {
                out.push_back(PredicateId{d.name, args});
                return;
            }
            for (const auto& o : pools[i]) {
                args[i] = o;
                rec(i + 1);
            }
        };
        rec(0);
    }
    return out;
}

std::vector<GroundAction> DomainSchema::ground_actions() const {
    std::vector<GroundAction> out;
    for (const auto& a : actions) {
        std::vector<std::string> args(a.params.size());
        std::function<void(size_t)> rec = [&](size_t i) {
            if (i == a.params.size()) {
                out.push_back(GroundAction{a.name, args});
                return;
            }
            for (const auto& o : objects_of_type(a.params[i].second)) {
                // same-type parameters must bind distinct objects
                bool dup = false;
                for (size_t j = 0; j < i; ++j)
                    if (a.params[j].second == a.params[i].second && args[j] == o) dup = true;
                if (dup) continue;
                args[i] = o;
                rec(i + 1);
            }
        };
        rec(0);
    }
    return out;
}

PredicateId substitute(const PredicateId& pattern,
                       const std::map<std::string, std::string>& binding) {
    PredicateId out = pattern;
    for (auto& a : out.args) {
        if (!a.empty() && a[0] == '?') {
            auto it = binding.find(a);
            if (it != binding.end()) a = it->second;
        }
    }
    return out;
}

InstantiatedAction DomainSchema::instantiate(const GroundAction& a) const {
    const auto* tmpl = find_action(a.action);
    if (!tmpl) throw SchemaError("unknown action: " + a.action);
    if (tmpl->params.size() != a.args.size())
        throw SchemaError("arity mismatch for action " + a.str());
    std::map<std::string, std::string> binding;
    for (size_t i = 0; i < a.args.size(); ++i) {
        auto it = objects.find(a.args[i]);
        if (it == objects.end() || it->second != tmpl->params[i].second)
            throw SchemaError("bad binding " + a.args[i] + " in " + a.str());
        binding[tmpl->params[i].first] = a.args[i];
    }
    InstantiatedAction out;
    for (const auto& [p, req] : tmpl->preconditions)
        out.preconditions.emplace_back(substitute(p, binding), req);
    for (const auto& p : tmpl->add_effects) out.add_effects.push_back(substitute(p, binding));
    for (const auto& p : tmpl->delete_effects) out.delete_effects.push_back(substitute(p, binding));
    for (const auto& p : out.add_effects)
        for (const auto& q : out.delete_effects)
            if (p == q) throw SchemaError("add/delete overlap in " + a.str());
    return out;
}

EntailmentRule parse_rule_line(const std::string& line) {
    auto colon = line.find(':');
    if (colon == std::string::npos) throw SchemaError("rule needs 'id: body'");
    EntailmentRule rule;
    rule.id = trim(line.substr(0, colon));
    if (rule.id.empty()) throw SchemaError("rule needs an id");
    std::string body = line.substr(colon + 1);
    auto arrow = body.find("=>");
    if (arrow == std::string::npos) throw SchemaError("rule needs '=>'");
    std::string lhs = body.substr(0, arrow);
    std::string rhs = trim(body.substr(arrow + 2));
    size_t start = 0;
    while (start < lhs.size()) {
        auto amp = lhs.find('&', start);
        std::string piece =
            trim(lhs.substr(start, amp == std::string::npos ? std::string::npos : amp - start));
        if (!piece.empty()) rule.premises.push_back(parse_literal(piece));
        if (amp == std::string::npos) break;
        start = amp + 1;
    }
    if (rule.premises.empty()) throw SchemaError("rule has no premises");
    rule.conclusion = parse_literal(rhs);
    return rule;
}

DomainSchema DomainSchema::parse(const std::string& text) {
    DomainSchema schema;
    std::istringstream iss(text);
    std::string raw;
    ActionTemplate* current_action = nullptr;
    int lineno = 0;
    while (std::getline(iss, raw)) {
        ++lineno;
        auto hash = raw.find('#');
        if (hash != std::string::npos) raw = raw.substr(0, hash);
        std::string line = trim(raw);
        if (line.empty()) continue;
        auto toks = split_ws(line);
        const std::string& kw = toks[0];
        auto fail = [&](const std::string& msg) {
            throw SchemaError("line " + std::to_string(lineno) + ": " + msg);
        };
        if (kw == "type") {
            if (toks.size() < 2) fail("type needs a name");
            for (size_t i = 1; i < toks.size(); ++i) schema.types.push_back(toks[i]);
            current_action = nullptr;
        } else if (kw == "object") {
            // object o1 o2 : obj
            auto colon = std::find(toks.begin(), toks.end(), ":");
            if (colon == toks.end() || colon + 2 != toks.end()) fail("object NAMES : TYPE");
            for (auto it = toks.begin() + 1; it != colon; ++it)
                schema.objects[*it] = *(colon + 1);
            current_action = nullptr;
        } else if (kw == "predicate") {
            if (toks.size() != 2) fail("predicate decl takes one token");
            auto p = PredicateId::parse(toks[1]);
            schema.predicates.push_back(PredicateDecl{p.name, p.args});
            current_action = nullptr;
        } else if (kw == "mutex") {
            // mutex in(?o,?c) per ?o
            if (toks.size() != 4 || toks[2] != "per") fail("mutex PATTERN per ?VAR");
            schema.mutexes.push_back(MutexGroup{PredicateId::parse(toks[1]), toks[3]});
            current_action = nullptr;
        } else if (kw == "action") {
            // action move(?o:obj,?src:cont,?dst:cont)
            if (toks.size() != 2) fail("action header takes one token (no spaces)");
            auto head = PredicateId::parse(toks[1]);
            ActionTemplate tmpl;
            tmpl.name = head.name;
            for (const auto& a : head.args) {
                auto colon = a.find(':');
                if (colon == std::string::npos || a.empty() || a[0] != '?')
                    fail("action param must be ?var:type");
                tmpl.params.emplace_back(a.substr(0, colon), a.substr(colon + 1));
            }
            schema.actions.push_back(std::move(tmpl));
            current_action = &schema.actions.back();
        } else if (kw == "pre" || kw == "add" || kw == "del") {
            if (!current_action) fail(kw + " outside action block");
            for (size_t i = 1; i < toks.size(); ++i) {
                if (kw == "pre") {
                    current_action->preconditions.push_back(parse_literal(toks[i]));
                } else {
                    auto p = PredicateId::parse(toks[i]);
                    if (kw == "add")
                        current_action->add_effects.push_back(p);
                    else
                        current_action->delete_effects.push_back(p);
                }
            }
        } else if (kw == "rule") {
            // rule id: lit & lit => lit
            current_action = nullptr;
            try {
                schema.rules.push_back(parse_rule_line(trim(line.substr(4))));
            } catch (const SchemaError& err) {
                fail(err.what());
            }
        } else {
            fail("unknown keyword: " + kw);
        }
    }
    schema.validate();
    return schema;
}

std::string DomainSchema::micro_text() {
    return R"(# micro domain: 2 objects, 2 containers, exhaustively enumerable
type obj
type cont
object o1 o2 : obj
object c1 c2 : cont
predicate in(obj,cont)
predicate open(cont)
predicate reachable(obj)
mutex in(?o,?c) per ?o
action open_box(?c:cont)
  pre open(?c)=0
  add open(?c)
action move(?o:obj,?src:cont,?dst:cont)
  pre in(?o,?src)=1 open(?src)=1 open(?dst)=1
  add in(?o,?dst)
  del in(?o,?src)
rule reach_open: in(?o,?c)=1 & open(?c)=1 => reachable(?o)=1
)";
}

std::string DomainSchema::household_text(int n_objects, int n_boxes) {
    std::ostringstream out;
    out << "# household domain: containers with attributes\n";
    out << "type obj\ntype cont\n";
    out << "object";
    for (int i = 1; i <= n_objects; ++i) out << " o" << i;
    out << " : obj\n";
    out << "object fridge1 sink1";
    for (int i = 1; i <= n_boxes; ++i) out << " box" << i;
    out << " : cont\n";
    out << "predicate in(obj,cont)\n";
    out << "predicate open(cont)\n";
    out << "predicate clean(obj)\n";
    out << "predicate cold(obj)\n";
    out << "mutex in(?o,?c) per ?o\n";
    out << "action open_box(?c:cont)\n  pre open(?c)=0\n  add open(?c)\n";
    out << "action move(?o:obj,?src:cont,?dst:cont)\n"
           "  pre in(?o,?src)=1 open(?src)=1 open(?dst)=1\n"
           "  add in(?o,?dst)\n  del in(?o,?src)\n";
    out << "action wash(?o:obj)\n  pre in(?o,sink1)=1 open(sink1)=1\n  add clean(?o)\n";
    out << "rule fridge_cold: in(?o,fridge1)=1 => cold(?o)=1\n";
    return out.str();
}

DomainSchema DomainSchema::micro() { return parse(micro_text()); }

DomainSchema DomainSchema::household(int n_objects, int n_boxes) {
    return parse(household_text(n_objects, n_boxes));
}

}  // namespace aec
