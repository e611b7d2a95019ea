#include "rgnn/pddl.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

namespace rgnn {

namespace {

struct SExpr {
    // Either a symbol (list empty, symbol set) or a list.
    std::string symbol;
    std::vector<SExpr> list;
    bool is_symbol = false;
    int line = 0, column = 0;

    bool is_list() const { return !is_symbol; }
};

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    struct Token {
        enum Kind { lparen, rparen, symbol, eof } kind;
        std::string value;
        int line, column;
    };

    Token next() {
        skip_space();
        Token t;
        t.line = line_;
        t.column = column_;
        if (pos_ >= text_.size()) {
            t.kind = Token::eof;
            return t;
        }
        char c = text_[pos_];
        if (c == '(') {
            advance();
            t.kind = Token::lparen;
            return t;
        }
        if (c == ')') {
            advance();
            t.kind = Token::rparen;
            return t;
        }
        t.kind = Token::symbol;
        while (pos_ < text_.size()) {
            c = text_[pos_];
            if (c == '(' || c == ')' || c == ';' || std::isspace(static_cast<unsigned char>(c)))
                break;
            t.value += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            advance();
        }
        return t;
    }

private:
    void skip_space() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == ';') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1, column_ = 1;
};

SExpr parse_sexpr(Lexer& lexer, const Lexer::Token& first) {
    SExpr node;
    node.line = first.line;
    node.column = first.column;
    if (first.kind == Lexer::Token::symbol) {
        node.is_symbol = true;
        node.symbol = first.value;
        return node;
    }
    if (first.kind != Lexer::Token::lparen)
        throw SyntaxError("expected '(' or symbol", first.line, first.column);
    for (;;) {
        Lexer::Token t = lexer.next();
        if (t.kind == Lexer::Token::eof)
            throw SyntaxError("unexpected end of input in list", t.line, t.column);
        if (t.kind == Lexer::Token::rparen) return node;
        node.list.push_back(parse_sexpr(lexer, t));
    }
}

SExpr parse_top(std::string_view text) {
    Lexer lexer(text);
    Lexer::Token t = lexer.next();
    if (t.kind == Lexer::Token::eof)
        throw SyntaxError("empty input", t.line, t.column);
    SExpr root = parse_sexpr(lexer, t);
    Lexer::Token rest = lexer.next();
    if (rest.kind != Lexer::Token::eof)
        throw SyntaxError("trailing content after top-level form", rest.line,
                          rest.column);
    return root;
}

const std::string& symbol_of(const SExpr& e, const char* what) {
    if (!e.is_symbol)
        throw SyntaxError(std::string("expected ") + what, e.line, e.column);
    return e.symbol;
}

// Parses "x y - t z - u rest..." into (name, type) pairs.
std::vector<std::pair<std::string, std::string>> typed_list(
    const std::vector<SExpr>& items, std::size_t begin, const char* what) {
    std::vector<std::pair<std::string, std::string>> out;
    std::vector<std::string> pending;
    for (std::size_t i = begin; i < items.size(); ++i) {
        const std::string& s = symbol_of(items[i], what);
        if (s == "-") {
            if (i + 1 >= items.size())
                throw SyntaxError("dangling '-' in typed list", items[i].line,
                                  items[i].column);
            const std::string& type = symbol_of(items[i + 1], "type name");
            for (auto& name : pending) out.emplace_back(name, type);
            pending.clear();
            ++i;
        } else {
            pending.push_back(s);
        }
    }
    for (auto& name : pending) out.emplace_back(name, "object");
    return out;
}

struct SchemaContext {
    const DomainModel* domain;
    ActionSchema* schema;
    std::map<std::string, int> param_index;
};

AtomTemplate parse_atom_template(const SExpr& e, const SchemaContext& ctx) {
    if (!e.is_list() || e.list.empty() || !e.list[0].is_symbol)
        throw SyntaxError("expected atom", e.line, e.column);
    const std::string& pname = e.list[0].symbol;
    if (pname == "=" || pname == "not" || pname == "and" || pname == "or" ||
        pname == "forall" || pname == "exists" || pname == "when")
        throw UnsupportedFeatureError("unsupported construct in schema: " + pname);
    if (!ctx.domain->vocab.contains(pname))
        throw UnknownPredicateError("unknown predicate in schema " +
                                    ctx.schema->name + ": " + pname);
    AtomTemplate tmpl;
    tmpl.predicate = ctx.domain->vocab.id(pname);
    const Predicate& pred = ctx.domain->vocab.at(tmpl.predicate);
    if (static_cast<int>(e.list.size()) - 1 != pred.arity)
        throw ArityMismatchError("predicate " + pname + " used with " +
                                 std::to_string(e.list.size() - 1) +
                                 " args, declared arity " +
                                 std::to_string(pred.arity));
    for (std::size_t i = 1; i < e.list.size(); ++i) {
        const std::string& var = symbol_of(e.list[i], "schema variable");
        if (var.empty() || var[0] != '?')
            throw UnsupportedFeatureError(
                "constants in action schemas are not supported: " + var);
        auto it = ctx.param_index.find(var);
        if (it == ctx.param_index.end())
            throw SyntaxError("undeclared variable " + var + " in action " +
                              ctx.schema->name, e.list[i].line, e.list[i].column);
        tmpl.params.push_back(it->second);
    }
    return tmpl;
}

std::vector<const SExpr*> conjunction_items(const SExpr& e) {
    std::vector<const SExpr*> items;
    if (e.is_list() && !e.list.empty() && e.list[0].is_symbol &&
        e.list[0].symbol == "and") {
        for (std::size_t i = 1; i < e.list.size(); ++i)
            items.push_back(&e.list[i]);
    } else {
        items.push_back(&e);
    }
    return items;
}

void parse_action(const SExpr& e, DomainModel& domain) {
    if (e.list.size() < 2 || !e.list[1].is_symbol)
        throw SyntaxError("expected action name", e.line, e.column);
    ActionSchema schema;
    schema.name = e.list[1].symbol;
    SchemaContext ctx{&domain, &schema, {}};

    const SExpr* precondition = nullptr;
    const SExpr* effect = nullptr;
    for (std::size_t i = 2; i < e.list.size(); i += 2) {
        const std::string& key = symbol_of(e.list[i], "action section keyword");
        if (i + 1 >= e.list.size())
            throw SyntaxError("missing value for " + key, e.list[i].line,
                              e.list[i].column);
        const SExpr& value = e.list[i + 1];
        if (key == ":parameters") {
            if (!value.is_list())
                throw SyntaxError("expected parameter list", value.line,
                                  value.column);
            for (auto& [name, type] : typed_list(value.list, 0, "parameter")) {
                if (name.empty() || name[0] != '?')
                    throw SyntaxError("parameter must start with '?': " + name,
                                      value.line, value.column);
                if (type != "object" && !domain.has_type(type))
                    throw SyntaxError("unknown type " + type + " in action " +
                                      schema.name, value.line, value.column);
                if (ctx.param_index.count(name))
                    throw SyntaxError("duplicate parameter " + name, value.line,
                                      value.column);
                ctx.param_index[name] = static_cast<int>(schema.params.size());
                schema.params.push_back(TypedVar{name, type});
            }
        } else if (key == ":precondition") {
            precondition = &value;
        } else if (key == ":effect") {
            effect = &value;
        } else {
            throw UnsupportedFeatureError("unsupported action section: " + key);
        }
    }
    if (precondition != nullptr) {
        for (const SExpr* item : conjunction_items(*precondition)) {
            if (item->is_list() && !item->list.empty() &&
                item->list[0].is_symbol && item->list[0].symbol == "not")
                throw UnsupportedFeatureError(
                    "negative preconditions are not supported (action " +
                    schema.name + ")");
            schema.precond.push_back(parse_atom_template(*item, ctx));
        }
    }
    if (effect == nullptr)
        throw SyntaxError("action " + schema.name + " has no effect", e.line,
                          e.column);
    for (const SExpr* item : conjunction_items(*effect)) {
        if (item->is_list() && !item->list.empty() && item->list[0].is_symbol &&
            item->list[0].symbol == "not") {
            if (item->list.size() != 2)
                throw SyntaxError("malformed (not ...) effect", item->line,
                                  item->column);
            schema.del.push_back(parse_atom_template(item->list[1], ctx));
        } else {
            schema.add.push_back(parse_atom_template(*item, ctx));
        }
    }
    domain.schemas.push_back(std::move(schema));
}

}  // namespace

bool DomainModel::has_type(const std::string& type_name) const {
    if (type_name == "object") return true;
    for (const auto& [t, parent] : types)
        if (t == type_name) return true;
    return false;
}

bool DomainModel::is_subtype(const std::string& type,
                             const std::string& ancestor) const {
    if (ancestor == "object" || type == ancestor) return true;
    std::string current = type;
    // type chains are short; cycles are rejected at parse time
    for (int guard = 0; guard < 64; ++guard) {
        bool found = false;
        for (const auto& [t, parent] : types) {
            if (t == current) {
                current = parent;
                found = true;
                break;
            }
        }
        if (!found) return false;
        if (current == ancestor) return true;
        if (current == "object") return false;
    }
    return false;
}

DomainModel parse_domain(std::string_view text) {
    SExpr root = parse_top(text);
    if (!root.is_list() || root.list.size() < 2 || !root.list[0].is_symbol ||
        root.list[0].symbol != "define")
        throw SyntaxError("expected (define (domain ...) ...)", root.line,
                          root.column);
    const SExpr& head = root.list[1];
    if (!head.is_list() || head.list.size() != 2 ||
        symbol_of(head.list[0], "keyword") != "domain")
        throw SyntaxError("expected (domain NAME)", head.line, head.column);

    DomainModel domain;
    domain.name = symbol_of(head.list[1], "domain name");

    for (std::size_t i = 2; i < root.list.size(); ++i) {
        const SExpr& section = root.list[i];
        if (!section.is_list() || section.list.empty() ||
            !section.list[0].is_symbol)
            throw SyntaxError("expected domain section", section.line,
                              section.column);
        const std::string& key = section.list[0].symbol;
        if (key == ":requirements") {
            for (std::size_t j = 1; j < section.list.size(); ++j) {
                const std::string& req = symbol_of(section.list[j], "requirement");
                if (req != ":strips" && req != ":typing")
                    throw UnsupportedFeatureError("unsupported requirement: " + req);
            }
        } else if (key == ":types") {
            for (auto& [name, parent] : typed_list(section.list, 1, "type")) {
                if (name == "object")
                    throw SyntaxError("cannot redeclare type 'object'",
                                      section.line, section.column);
                domain.types.emplace_back(name, parent);
            }
            for (const auto& [name, parent] : domain.types)
                if (parent != "object" && !domain.has_type(parent))
                    throw SyntaxError("unknown parent type " + parent,
                                      section.line, section.column);
        } else if (key == ":predicates") {
            for (std::size_t j = 1; j < section.list.size(); ++j) {
                const SExpr& decl = section.list[j];
                if (!decl.is_list() || decl.list.empty() ||
                    !decl.list[0].is_symbol)
                    throw SyntaxError("expected predicate declaration", decl.line,
                                      decl.column);
                auto args = typed_list(decl.list, 1, "predicate argument");
                domain.vocab.add(decl.list[0].symbol,
                                 static_cast<int>(args.size()),
                                 PredicateOrigin::domain);
            }
        } else if (key == ":action") {
            parse_action(section, domain);
        } else {
            throw UnsupportedFeatureError("unsupported domain section: " + key);
        }
    }
    std::sort(domain.schemas.begin(), domain.schemas.end(),
              [](const ActionSchema& a, const ActionSchema& b) {
                  return a.name < b.name;
              });
    return domain;
}

RelationalState parse_problem(std::string_view text, const DomainModel& domain) {
    SExpr root = parse_top(text);
    if (!root.is_list() || root.list.size() < 2 || !root.list[0].is_symbol ||
        root.list[0].symbol != "define")
        throw SyntaxError("expected (define (problem ...) ...)", root.line,
                          root.column);
    const SExpr& head = root.list[1];
    if (!head.is_list() || head.list.size() != 2 ||
        symbol_of(head.list[0], "keyword") != "problem")
        throw SyntaxError("expected (problem NAME)", head.line, head.column);

    RelationalState state;
    state.vocab = domain.vocab;
    std::map<std::string, ObjectId> object_ids;

    auto parse_ground_atom = [&](const SExpr& e) {
        if (!e.is_list() || e.list.empty() || !e.list[0].is_symbol)
            throw SyntaxError("expected ground atom", e.line, e.column);
        const std::string& pname = e.list[0].symbol;
        if (!state.vocab.contains(pname))
            throw UnknownPredicateError("unknown predicate: " + pname);
        Atom atom;
        atom.predicate = state.vocab.id(pname);
        const Predicate& pred = state.vocab.at(atom.predicate);
        if (static_cast<int>(e.list.size()) - 1 != pred.arity)
            throw ArityMismatchError("predicate " + pname + " used with " +
                                     std::to_string(e.list.size() - 1) +
                                     " args, declared arity " +
                                     std::to_string(pred.arity));
        for (std::size_t i = 1; i < e.list.size(); ++i) {
            const std::string& obj = symbol_of(e.list[i], "object name");
            auto it = object_ids.find(obj);
            if (it == object_ids.end())
                throw UnknownObjectError("undeclared object: " + obj);
            atom.args.push_back(it->second);
        }
        return atom;
    };

    bool saw_domain = false;
    for (std::size_t i = 2; i < root.list.size(); ++i) {
        const SExpr& section = root.list[i];
        if (!section.is_list() || section.list.empty() ||
            !section.list[0].is_symbol)
            throw SyntaxError("expected problem section", section.line,
                              section.column);
        const std::string& key = section.list[0].symbol;
        if (key == ":domain") {
            if (section.list.size() != 2 ||
                symbol_of(section.list[1], "domain name") != domain.name)
                throw SyntaxError("problem references a different domain",
                                  section.line, section.column);
            saw_domain = true;
        } else if (key == ":objects") {
            for (auto& [name, type] : typed_list(section.list, 1, "object")) {
                if (type != "object" && !domain.has_type(type))
                    throw SyntaxError("unknown object type " + type, section.line,
                                      section.column);
                if (object_ids.count(name))
                    throw SyntaxError("duplicate object " + name, section.line,
                                      section.column);
                object_ids[name] = static_cast<ObjectId>(state.objects.size());
                state.objects.push_back(name);
                state.object_types.push_back(type);
            }
        } else if (key == ":init") {
            for (std::size_t j = 1; j < section.list.size(); ++j)
                state.atoms.push_back(parse_ground_atom(section.list[j]));
        } else if (key == ":goal") {
            if (section.list.size() != 2)
                throw SyntaxError("expected a single goal formula", section.line,
                                  section.column);
            for (const SExpr* item : conjunction_items(section.list[1])) {
                if (item->is_list() && !item->list.empty() &&
                    item->list[0].is_symbol && item->list[0].symbol == "not")
                    throw UnsupportedFeatureError("negative goals are not supported");
                state.goal.push_back(parse_ground_atom(*item));
            }
        } else {
            throw UnsupportedFeatureError("unsupported problem section: " + key);
        }
    }
    if (!saw_domain)
        throw SyntaxError("problem is missing a (:domain ...) section",
                          root.line, root.column);
    return canonicalize(state);
}

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace

Instance parse_instance_text(std::string_view domain_text,
                             std::string_view problem_text,
                             const std::string& id) {
    Instance instance;
    instance.id = id;
    instance.domain = parse_domain(domain_text);
    instance.init = parse_problem(problem_text, instance.domain);
    return instance;
}

Instance parse_instance_files(const std::string& domain_path,
                              const std::string& problem_path) {
    std::string id = problem_path;
    auto slash = id.find_last_of('/');
    if (slash != std::string::npos) id = id.substr(slash + 1);
    auto dot = id.find_last_of('.');
    if (dot != std::string::npos) id = id.substr(0, dot);
    return parse_instance_text(read_file(domain_path), read_file(problem_path), id);
}

bool GroundAction::applicable(const RelationalState& state) const {
    // state.atoms and precond are both in canonical (name, args) order
    return std::includes(state.atoms.begin(), state.atoms.end(),
                         precond.begin(), precond.end(),
                         [&](const Atom& a, const Atom& b) {
                             return atom_less_by_name(state.vocab, a, b);
                         });
}

std::vector<GroundAction> ground(const DomainModel& domain,
                                 const RelationalState& state) {
    std::vector<GroundAction> actions;
    const int num_objects = static_cast<int>(state.objects.size());

    for (const ActionSchema& schema : domain.schemas) {
        // candidate objects per parameter, respecting types
        std::vector<std::vector<ObjectId>> candidates(schema.params.size());
        for (std::size_t p = 0; p < schema.params.size(); ++p) {
            for (ObjectId o = 0; o < num_objects; ++o) {
                const std::string& otype =
                    state.object_types.empty() ? std::string("object")
                                               : state.object_types[static_cast<std::size_t>(o)];
                if (schema.params[p].type == "object" ||
                    domain.is_subtype(otype, schema.params[p].type))
                    candidates[p].push_back(o);
            }
        }

        std::vector<std::size_t> cursor(schema.params.size(), 0);
        bool empty_domain = false;
        for (const auto& c : candidates)
            if (c.empty()) empty_domain = true;
        if (empty_domain && !schema.params.empty()) continue;

        for (;;) {
            std::vector<ObjectId> binding(schema.params.size());
            for (std::size_t p = 0; p < schema.params.size(); ++p)
                binding[p] = candidates[p][cursor[p]];

            GroundAction action;
            action.name = "(" + schema.name;
            for (ObjectId o : binding)
                action.name += " " + state.objects[static_cast<std::size_t>(o)];
            action.name += ")";
            auto atom_less = [&](const Atom& a, const Atom& b) {
                return atom_less_by_name(state.vocab, a, b);
            };
            auto instantiate = [&](const std::vector<AtomTemplate>& tmpls) {
                std::vector<Atom> atoms;
                for (const AtomTemplate& t : tmpls) {
                    Atom atom;
                    atom.predicate = t.predicate;
                    for (int p : t.params)
                        atom.args.push_back(binding[static_cast<std::size_t>(p)]);
                    atoms.push_back(std::move(atom));
                }
                std::sort(atoms.begin(), atoms.end(), atom_less);
                atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
                return atoms;
            };
            action.precond = instantiate(schema.precond);
            action.add = instantiate(schema.add);
            action.del = instantiate(schema.del);

            std::vector<Atom> overlap;
            std::set_intersection(action.add.begin(), action.add.end(),
                                  action.del.begin(), action.del.end(),
                                  std::back_inserter(overlap), atom_less);
            if (overlap.empty()) actions.push_back(std::move(action));

            // odometer over the binding space
            std::size_t p = schema.params.size();
            while (p > 0) {
                --p;
                if (++cursor[p] < candidates[p].size()) break;
                cursor[p] = 0;
                if (p == 0) {
                    p = schema.params.size() + 1;
                    break;
                }
            }
            if (schema.params.empty() || p == schema.params.size() + 1) break;
        }
    }
    return actions;
}

RelationalState apply(const RelationalState& state, const GroundAction& action) {
    RelationalState next = state;
    std::vector<Atom> remaining;
    remaining.reserve(state.atoms.size());
    std::set_difference(state.atoms.begin(), state.atoms.end(),
                        action.del.begin(), action.del.end(),
                        std::back_inserter(remaining),
                        [&](const Atom& a, const Atom& b) {
                            return atom_less_by_name(state.vocab, a, b);
                        });
    for (const Atom& atom : action.add) remaining.push_back(atom);
    next.atoms = std::move(remaining);
    return canonicalize(next);
}

std::vector<Successor> successors(const RelationalState& state,
                                  const std::vector<GroundAction>& actions) {
    std::vector<Successor> result;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < actions.size(); ++i) {
        if (!actions[i].applicable(state)) continue;
        RelationalState next = apply(state, actions[i]);
        std::string key = state_key(next);
        if (!seen.insert(std::move(key)).second) continue;
        result.push_back(Successor{static_cast<int>(i), std::move(next)});
    }
    return result;
}

}  // namespace rgnn
