#include "bcp/text.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace bcp {

namespace {

std::string strip_comment(const std::string& line) {
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '#' && (i == 0 || std::isspace(static_cast<unsigned char>(line[i - 1])))) {
            return line.substr(0, i);
        }
    }
    return line;
}

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

/// Splits on `sep` at parenthesis depth zero, so separators inside tuple-style
/// state names such as (x1,x1,0) survive.
std::vector<std::string> split_top(const std::string& s, char sep) {
    std::vector<std::string> out;
    int depth = 0;
    std::string cur;
    for (char ch : s) {
        if (ch == '(') ++depth;
        if (ch == ')') --depth;
        if (ch == sep && depth == 0) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(trim(cur));
    return out;
}

/// Splits "lhs -> rhs" at the first depth-zero arrow.
bool split_arrow(const std::string& s, std::string& lhs, std::string& rhs) {
    int depth = 0;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        if (s[i] == '(') ++depth;
        if (s[i] == ')') --depth;
        if (depth == 0 && s[i] == '-' && s[i + 1] == '>') {
            lhs = trim(s.substr(0, i));
            rhs = trim(s.substr(i + 2));
            return true;
        }
    }
    return false;
}

struct LineReader {
    std::vector<std::pair<int, std::string>> lines;  // (line number, content)

    explicit LineReader(const std::string& text) {
        std::istringstream in(text);
        std::string raw;
        int number = 0;
        while (std::getline(in, raw)) {
            ++number;
            std::string line = trim(strip_comment(raw));
            if (!line.empty()) lines.push_back({number, line});
        }
    }
};

[[noreturn]] void parse_fail(int line, const std::string& message) {
    raise(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + message);
}

bool take_key(const std::string& line, const std::string& key, std::string& rest) {
    if (line.rfind(key, 0) == 0) {
        rest = trim(line.substr(key.size()));
        return true;
    }
    return false;
}

} // namespace

Protocol parse_protocol(const std::string& text) {
    LineReader reader(text);
    if (reader.lines.empty()) raise(ErrorCode::ParseError, "line 1: empty protocol file");

    Protocol p;
    bool have_header = false;
    std::vector<std::pair<int, std::string>> deferred;

    for (const auto& [num, line] : reader.lines) {
        std::string rest;
        try {
            if (take_key(line, "protocol", rest) && (line.size() == 8 || std::isspace(static_cast<unsigned char>(line[8])))) {
                if (have_header) parse_fail(num, "duplicate protocol header");
                if (rest.empty()) parse_fail(num, "protocol header needs a name");
                p.name = rest;
                have_header = true;
            } else if (take_key(line, "states:", rest)) {
                for (const auto& tok : split_ws(rest)) p.add_state(tok);
            } else if (take_key(line, "alphabet:", rest)) {
                for (const auto& tok : split_ws(rest)) p.alphabet.push_back(tok);
            } else {
                deferred.push_back({num, line});
            }
        } catch (const Error& e) {
            if (e.code() == ErrorCode::ParseError) throw;
            parse_fail(num, e.what());
        }
    }
    if (!have_header) {
        raise(ErrorCode::ParseError, "line 1: expected 'protocol <name>' header");
    }

    std::vector<std::optional<StateId>> input_map(p.alphabet.size());
    p.output.assign(p.states.size(), 0);

    {
        std::unordered_map<std::string, int> seen;
        for (const auto& a : p.alphabet) {
            if (++seen[a] == 2) raise(ErrorCode::ParseError, "duplicate alphabet symbol '" + a + "'");
        }
    }

    auto symbol_index = [&](const std::string& name, int num) -> std::size_t {
        for (std::size_t i = 0; i < p.alphabet.size(); ++i) {
            if (p.alphabet[i] == name) return i;
        }
        parse_fail(num, "unknown alphabet symbol '" + name + "'");
    };

    for (const auto& [num, line] : deferred) {
        std::string rest;
        try {
            if (take_key(line, "input:", rest)) {
                for (const auto& entry : split_top(rest, ';')) {
                    if (entry.empty()) continue;
                    std::string lhs, rhs;
                    if (!split_arrow(entry, lhs, rhs)) parse_fail(num, "input entry needs 'symbol -> state'");
                    std::size_t sym = symbol_index(lhs, num);
                    if (input_map[sym]) parse_fail(num, "duplicate input entry for symbol '" + lhs + "'");
                    input_map[sym] = p.state(rhs);
                }
            } else if (take_key(line, "leaders:", rest)) {
                std::vector<Config::Entry> entries;
                for (const auto& tok : split_ws(rest)) {
                    auto colon = tok.rfind(':');
                    if (colon == std::string::npos || colon + 1 == tok.size()) {
                        parse_fail(num, "leader entry needs 'state:count'");
                    }
                    std::string name = tok.substr(0, colon);
                    std::uint32_t count = 0;
                    try {
                        count = static_cast<std::uint32_t>(std::stoul(tok.substr(colon + 1)));
                    } catch (const std::exception&) {
                        parse_fail(num, "bad leader count in '" + tok + "'");
                    }
                    entries.push_back({p.state(name), count});
                }
                p.leaders = Config::from_entries(std::move(entries));
            } else if (take_key(line, "output1:", rest)) {
                for (const auto& tok : split_ws(rest)) p.output[p.state(tok)] = 1;
            } else if (take_key(line, "note:", rest)) {
                p.notes.push_back(rest);
            } else if (take_key(line, "rv:", rest)) {
                std::string lhs, rhs;
                if (!split_arrow(rest, lhs, rhs)) parse_fail(num, "rendez-vous needs 'p q -> p2 q2'");
                auto pre = split_ws(lhs);
                auto post = split_ws(rhs);
                if (pre.size() != 2 || post.size() != 2) {
                    parse_fail(num, "rendez-vous needs two states on each side");
                }
                p.rendezvous.push_back(
                    {p.state(pre[0]), p.state(pre[1]), p.state(post[0]), p.state(post[1])});
            } else if (take_key(line, "bc:", rest)) {
                auto parts = split_top(rest, ';');
                if (parts.empty() || parts.size() > 2) parse_fail(num, "broadcast needs 'q -> r [; transfers]'");
                std::string lhs, rhs;
                if (!split_arrow(parts[0], lhs, rhs)) parse_fail(num, "broadcast needs 'q -> r'");
                StateId pre = p.state(lhs);
                StateId post = p.state(rhs);
                std::vector<StateId> images(p.states.size());
                std::vector<char> assigned(p.states.size(), 0);
                for (StateId q = 0; q < images.size(); ++q) images[q] = q;
                if (parts.size() == 2 && !parts[1].empty()) {
                    for (const auto& entry : split_top(parts[1], ',')) {
                        if (entry.empty()) continue;
                        std::string from, to;
                        if (!split_arrow(entry, from, to)) parse_fail(num, "transfer entry needs 'q -> r'");
                        StateId src = p.state(from);
                        if (assigned[src]) parse_fail(num, "duplicate transfer entry for state '" + from + "'");
                        assigned[src] = 1;
                        images[src] = p.state(to);
                    }
                }
                p.broadcasts.push_back({pre, post, p.intern_transfer(std::move(images))});
            } else {
                parse_fail(num, "unrecognized line '" + line + "'");
            }
        } catch (const Error& e) {
            if (e.code() == ErrorCode::ParseError) throw;
            parse_fail(num, e.what());
        }
    }

    p.input_map.clear();
    for (std::size_t i = 0; i < input_map.size(); ++i) {
        if (!input_map[i]) {
            raise(ErrorCode::ParseError,
                  "input map is missing alphabet symbol '" + p.alphabet[i] + "'");
        }
        p.input_map.push_back(*input_map[i]);
    }
    return p;
}

std::string serialize_protocol(const Protocol& p) {
    std::ostringstream out;
    out << "protocol " << p.name << "\n";
    const std::size_t chunk = 12;
    for (std::size_t i = 0; i < p.states.size(); i += chunk) {
        out << "states:";
        for (std::size_t j = i; j < std::min(i + chunk, p.states.size()); ++j) {
            out << " " << p.states[j];
        }
        out << "\n";
    }
    out << "alphabet:";
    for (const auto& a : p.alphabet) out << " " << a;
    out << "\n";
    if (!p.alphabet.empty()) {
        out << "input: ";
        for (std::size_t i = 0; i < p.alphabet.size(); ++i) {
            if (i) out << " ; ";
            out << p.alphabet[i] << " -> " << p.states[p.input_map[i]];
        }
        out << "\n";
    }
    if (!p.leaders.empty()) {
        out << "leaders:";
        for (const auto& [q, n] : p.leaders.entries()) {
            out << " " << p.states[q] << ":" << n;
        }
        out << "\n";
    }
    {
        bool any = false;
        for (std::size_t q = 0; q < p.states.size(); ++q) any = any || p.output[q];
        if (any) {
            out << "output1:";
            for (std::size_t q = 0; q < p.states.size(); ++q) {
                if (p.output[q]) out << " " << p.states[q];
            }
            out << "\n";
        }
    }
    for (const auto& note : p.notes) out << "note: " << note << "\n";
    for (const auto& t : p.rendezvous) {
        out << "rv: " << p.states[t.p] << " " << p.states[t.q] << " -> " << p.states[t.p2] << " "
            << p.states[t.q2] << "\n";
    }
    for (const auto& b : p.broadcasts) {
        out << "bc: " << p.states[b.pre] << " -> " << p.states[b.post];
        const auto& f = p.transfers[b.transfer];
        bool first = true;
        for (StateId q = 0; q < f.size(); ++q) {
            if (f[q] == q) continue;
            out << (first ? " ; " : ", ") << p.states[q] << " -> " << p.states[f[q]];
            first = false;
        }
        out << "\n";
    }
    return out.str();
}

namespace {

Instruction parse_instruction(CounterMachine& m, const std::string& text, int num) {
    std::string s = trim(text);
    if (s == "nop") return {InsKind::Nop, 0};
    auto open = s.find('(');
    if (open == std::string::npos || s.back() != ')') {
        parse_fail(num, "bad instruction '" + s + "'");
    }
    std::string kind = s.substr(0, open);
    std::string counter = trim(s.substr(open + 1, s.size() - open - 2));
    auto id = m.find_counter(counter);
    if (!id) parse_fail(num, "unknown counter '" + counter + "'");
    if (kind == "inc") return {InsKind::Inc, *id};
    if (kind == "dec") return {InsKind::Dec, *id};
    if (kind == "zero") return {InsKind::Zero, *id};
    if (kind == "nonzero") return {InsKind::Nonzero, *id};
    parse_fail(num, "unknown instruction kind '" + kind + "'");
}

} // namespace

CounterMachine parse_machine(const std::string& text) {
    LineReader reader(text);
    if (reader.lines.empty()) raise(ErrorCode::ParseError, "line 1: empty machine file");

    CounterMachine m;
    bool have_header = false;
    std::optional<std::string> init_name, accept_name, reject_name;
    std::vector<std::pair<int, std::string>> trans_lines;

    for (const auto& [num, line] : reader.lines) {
        std::string rest;
        try {
            if (take_key(line, "cm", rest) && (line.size() == 2 || std::isspace(static_cast<unsigned char>(line[2])))) {
                if (have_header) parse_fail(num, "duplicate machine header");
                if (rest.empty()) parse_fail(num, "machine header needs a name");
                m.name = rest;
                have_header = true;
            } else if (take_key(line, "counters:", rest)) {
                for (const auto& tok : split_ws(rest)) m.add_counter(tok);
            } else if (take_key(line, "input-arity:", rest)) {
                try {
                    m.input_arity = static_cast<std::uint32_t>(std::stoul(rest));
                } catch (const std::exception&) {
                    parse_fail(num, "bad input arity '" + rest + "'");
                }
            } else if (take_key(line, "states:", rest)) {
                for (const auto& tok : split_ws(rest)) m.add_state(tok);
            } else if (take_key(line, "init:", rest)) {
                // The control-state line may carry init:, accept:, reject: together.
                auto toks = split_ws(rest);
                if (toks.empty()) parse_fail(num, "init needs a state");
                init_name = toks[0];
                for (std::size_t i = 1; i + 1 < toks.size(); i += 2) {
                    if (toks[i] == "accept:") accept_name = toks[i + 1];
                    else if (toks[i] == "reject:") reject_name = toks[i + 1];
                    else parse_fail(num, "unexpected token '" + toks[i] + "'");
                }
            } else if (take_key(line, "accept:", rest)) {
                auto toks = split_ws(rest);
                if (toks.empty()) parse_fail(num, "accept needs a state");
                accept_name = toks[0];
                for (std::size_t i = 1; i + 1 < toks.size(); i += 2) {
                    if (toks[i] == "reject:") reject_name = toks[i + 1];
                    else parse_fail(num, "unexpected token '" + toks[i] + "'");
                }
            } else if (take_key(line, "reject:", rest)) {
                auto toks = split_ws(rest);
                if (toks.empty()) parse_fail(num, "reject needs a state");
                reject_name = toks[0];
            } else if (take_key(line, "bound:", rest)) {
                auto toks = split_ws(rest);
                if (toks.size() == 1 && toks[0] == "n") m.bound = Bound{BoundClass::N, 1};
                else if (toks.size() == 1 && toks[0] == "weak-n") m.bound = Bound{BoundClass::WeakN, 1};
                else if (toks.size() == 2 && toks[0] == "poly") {
                    try {
                        m.bound = Bound{BoundClass::Poly, static_cast<std::uint32_t>(std::stoul(toks[1]))};
                    } catch (const std::exception&) {
                        parse_fail(num, "bad polynomial degree '" + toks[1] + "'");
                    }
                } else parse_fail(num, "bad bound declaration '" + rest + "'");
            } else if (take_key(line, "trans:", rest)) {
                trans_lines.push_back({num, rest});
            } else {
                parse_fail(num, "unrecognized line '" + line + "'");
            }
        } catch (const Error& e) {
            if (e.code() == ErrorCode::ParseError) throw;
            parse_fail(num, e.what());
        }
    }
    if (!have_header) raise(ErrorCode::ParseError, "line 1: expected 'cm <name>' header");
    if (!init_name || !accept_name || !reject_name) {
        raise(ErrorCode::ParseError, "machine needs init:, accept: and reject: states");
    }
    if (m.input_arity > m.counters.size()) {
        raise(ErrorCode::ParseError, "input arity exceeds the number of counters");
    }

    auto resolve = [&](const std::string& name) {
        auto id = m.find_state(name);
        if (!id) raise(ErrorCode::ParseError, "unknown control state '" + name + "'");
        return *id;
    };
    m.initial = resolve(*init_name);
    m.accept = resolve(*accept_name);
    m.reject = resolve(*reject_name);

    int macro_counter = 0;
    for (const auto& [num, rest] : trans_lines) {
        try {
            std::string src_tok;
            std::string tail;
            {
                auto first_ws = rest.find_first_of(" \t");
                if (first_ws == std::string::npos) parse_fail(num, "transition needs 'src ins dst'");
                src_tok = rest.substr(0, first_ws);
                tail = trim(rest.substr(first_ws));
            }
            std::uint32_t src = resolve(src_tok);
            if (!tail.empty() && tail.front() == '[') {
                auto close = tail.find(']');
                if (close == std::string::npos) parse_fail(num, "macro is missing ']'");
                std::string body = tail.substr(1, close - 1);
                std::string dst_tok = trim(tail.substr(close + 1));
                if (dst_tok.empty() || dst_tok.find_first_of(" \t") != std::string::npos) {
                    parse_fail(num, "macro needs exactly one destination state");
                }
                std::uint32_t dst = resolve(dst_tok);
                std::vector<Instruction> instrs;
                for (const auto& piece : split_top(body, ';')) {
                    if (piece.empty()) parse_fail(num, "empty instruction in macro");
                    instrs.push_back(parse_instruction(m, piece, num));
                }
                add_macro(m, src, instrs, dst, "m" + std::to_string(macro_counter++));
            } else {
                auto toks = split_ws(tail);
                if (toks.size() != 2) parse_fail(num, "transition needs 'src ins dst'");
                Instruction ins = parse_instruction(m, toks[0], num);
                m.transitions.push_back({src, ins, resolve(toks[1])});
            }
        } catch (const Error& e) {
            if (e.code() == ErrorCode::ParseError) throw;
            parse_fail(num, e.what());
        }
    }
    return m;
}

std::string serialize_machine(const CounterMachine& m) {
    std::ostringstream out;
    out << "cm " << m.name << "\n";
    out << "counters:";
    for (const auto& x : m.counters) out << " " << x;
    out << "\n";
    out << "input-arity: " << m.input_arity << "\n";
    const std::size_t chunk = 12;
    for (std::size_t i = 0; i < m.states.size(); i += chunk) {
        out << "states:";
        for (std::size_t j = i; j < std::min(i + chunk, m.states.size()); ++j) {
            out << " " << m.states[j];
        }
        out << "\n";
    }
    out << "init: " << m.states[m.initial] << "  accept: " << m.states[m.accept]
        << "  reject: " << m.states[m.reject] << "\n";
    if (m.bound) {
        out << "bound: ";
        switch (m.bound->cls) {
            case BoundClass::N: out << "n"; break;
            case BoundClass::WeakN: out << "weak-n"; break;
            case BoundClass::Poly: out << "poly " << m.bound->degree; break;
        }
        out << "\n";
    }
    for (const auto& t : m.transitions) {
        out << "trans: " << m.states[t.src] << " " << instruction_to_string(m, t.ins) << " "
            << m.states[t.dst] << "\n";
    }
    return out.str();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::IoError, "cannot open '" + path + "' for reading");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorCode::IoError, "cannot open '" + path + "' for writing");
    out << content;
    if (!out) raise(ErrorCode::IoError, "failed while writing '" + path + "'");
}

Protocol load_protocol_file(const std::string& path) {
    return parse_protocol(read_file(path));
}

CounterMachine load_machine_file(const std::string& path) {
    return parse_machine(read_file(path));
}

} // namespace bcp
