#include "bcp/oracle.hpp"

#include <stdexcept>

#include "bcp/error.hpp"

namespace bcp {

namespace {

// Builtins read missing input components as zero, so an oracle applied at
// the wrong arity still evaluates (and simply disagrees) instead of reading
// past the end of the vector.
std::uint32_t comp(const std::vector<std::uint32_t>& v, std::size_t i) {
    return i < v.size() ? v[i] : 0;
}

} // namespace

Oracle builtin_oracle(const std::string& spec) {
    if (spec == "power2") {
        return {spec, 1, [](const std::vector<std::uint32_t>& v) {
                    std::uint32_t x = comp(v, 0);
                    return (x > 1 && (x & (x - 1)) == 0) ? 1 : 0;
                }};
    }
    if (spec == "majority") {
        return {spec, 2, [](const std::vector<std::uint32_t>& v) { return comp(v, 1) >= comp(v, 0) ? 1 : 0; }};
    }
    if (spec == "geq") {
        return {spec, 2, [](const std::vector<std::uint32_t>& v) { return comp(v, 0) >= comp(v, 1) ? 1 : 0; }};
    }
    if (spec == "lt") {
        return {spec, 2, [](const std::vector<std::uint32_t>& v) { return comp(v, 0) < comp(v, 1) ? 1 : 0; }};
    }
    if (spec == "even") {
        return {spec, 1, [](const std::vector<std::uint32_t>& v) { return comp(v, 0) % 2 == 0 ? 1 : 0; }};
    }
    if (spec == "odd") {
        return {spec, 1, [](const std::vector<std::uint32_t>& v) { return comp(v, 0) % 2 == 1 ? 1 : 0; }};
    }
    if (spec == "div3") {
        return {spec, 1, [](const std::vector<std::uint32_t>& v) { return comp(v, 0) % 3 == 0 ? 1 : 0; }};
    }
    if (spec.rfind("threshold:", 0) == 0) {
        std::uint32_t k = 0;
        try {
            k = static_cast<std::uint32_t>(std::stoul(spec.substr(10)));
        } catch (const std::exception&) {
            raise(ErrorCode::ParseError, "bad threshold oracle '" + spec + "'");
        }
        return {spec, 1, [k](const std::vector<std::uint32_t>& v) { return comp(v, 0) >= k ? 1 : 0; }};
    }
    raise(ErrorCode::UnknownName, "unknown builtin oracle '" + spec + "'");
}

namespace {

std::uint32_t parse_u32(const std::string& s, const std::string& context) {
    try {
        std::size_t used = 0;
        unsigned long value = std::stoul(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return static_cast<std::uint32_t>(value);
    } catch (const std::exception&) {
        raise(ErrorCode::ParseError, "bad number '" + s + "' in " + context);
    }
}

std::vector<std::uint32_t> parse_tuple(const std::string& s) {
    if (s.size() < 2 || s.front() != '(' || s.back() != ')') {
        raise(ErrorCode::ParseError, "bad input tuple '" + s + "'");
    }
    std::vector<std::uint32_t> out;
    std::string body = s.substr(1, s.size() - 2);
    std::size_t start = 0;
    while (true) {
        auto comma = body.find(',', start);
        std::string piece =
            comma == std::string::npos ? body.substr(start) : body.substr(start, comma - start);
        out.push_back(parse_u32(piece, "input tuple"));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

} // namespace

std::vector<std::vector<std::uint32_t>> parse_input_range(const std::string& spec) {
    auto dots = spec.find("..");
    std::vector<std::vector<std::uint32_t>> out;
    if (dots == std::string::npos) {
        // A single point: "5" or "(2,3)".
        if (!spec.empty() && spec.front() == '(') {
            out.push_back(parse_tuple(spec));
        } else {
            out.push_back({parse_u32(spec, "input range")});
        }
        return out;
    }
    std::string lo = spec.substr(0, dots);
    std::string hi = spec.substr(dots + 2);
    if (!lo.empty() && lo.front() == '(') {
        std::vector<std::uint32_t> a = parse_tuple(lo);
        std::vector<std::uint32_t> b = parse_tuple(hi);
        if (a.size() != b.size()) {
            raise(ErrorCode::ParseError, "input range endpoints have different arity");
        }
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (a[i] > b[i]) raise(ErrorCode::ParseError, "descending input range");
        }
        // Row-major sweep over the rectangle.
        std::vector<std::uint32_t> cur = a;
        while (true) {
            out.push_back(cur);
            std::size_t i = cur.size();
            while (i > 0) {
                --i;
                if (cur[i] < b[i]) {
                    ++cur[i];
                    for (std::size_t j = i + 1; j < cur.size(); ++j) cur[j] = a[j];
                    break;
                }
                if (i == 0) return out;
            }
        }
    }
    std::uint32_t a = parse_u32(lo, "input range");
    std::uint32_t b = parse_u32(hi, "input range");
    if (a > b) raise(ErrorCode::ParseError, "descending input range");
    for (std::uint32_t x = a; x <= b; ++x) out.push_back({x});
    return out;
}

std::vector<std::vector<std::uint32_t>> inputs_with_sum(std::size_t arity, std::uint32_t lo,
                                                        std::uint32_t hi) {
    std::vector<std::vector<std::uint32_t>> out;
    std::vector<std::uint32_t> cur(arity, 0);
    auto rec = [&](auto&& self, std::size_t i, std::uint32_t sum) -> void {
        if (i == arity) {
            if (sum >= lo) out.push_back(cur);
            return;
        }
        for (std::uint32_t v = 0; sum + v <= hi; ++v) {
            cur[i] = v;
            self(self, i + 1, sum + v);
        }
        cur[i] = 0;
    };
    if (arity == 0) return out;
    rec(rec, 0, 0);
    return out;
}

} // namespace bcp
