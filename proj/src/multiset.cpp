#include "bcp/multiset.hpp"

#include <cassert>

namespace bcp {

Config Config::from_entries(std::vector<Entry> entries) {
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.first < b.first; });
    Config c;
    c.entries_.reserve(entries.size());
    for (const auto& [q, n] : entries) {
        if (n == 0) continue;
        if (!c.entries_.empty() && c.entries_.back().first == q) {
            c.entries_.back().second += n;
        } else {
            c.entries_.push_back({q, n});
        }
    }
    return c;
}

std::uint32_t Config::count(StateId q) const {
    auto it = std::lower_bound(
        entries_.begin(), entries_.end(), q,
        [](const Entry& e, StateId key) { return e.first < key; });
    if (it != entries_.end() && it->first == q) return it->second;
    return 0;
}

std::uint64_t Config::size() const {
    std::uint64_t total = 0;
    for (const auto& e : entries_) total += e.second;
    return total;
}

Config Config::add(StateId q, std::uint32_t k) const {
    if (k == 0) return *this;
    Config c = *this;
    auto it = std::lower_bound(
        c.entries_.begin(), c.entries_.end(), q,
        [](const Entry& e, StateId key) { return e.first < key; });
    if (it != c.entries_.end() && it->first == q) {
        it->second += k;
    } else {
        c.entries_.insert(it, {q, k});
    }
    return c;
}

Config Config::sub(StateId q, std::uint32_t k) const {
    if (k == 0) return *this;
    Config c = *this;
    auto it = std::lower_bound(
        c.entries_.begin(), c.entries_.end(), q,
        [](const Entry& e, StateId key) { return e.first < key; });
    assert(it != c.entries_.end() && it->first == q && it->second >= k);
    if (it->second == k) {
        c.entries_.erase(it);
    } else {
        it->second -= k;
    }
    return c;
}

} // namespace bcp
