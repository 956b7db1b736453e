#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

namespace bcp {

using StateId = std::uint32_t;

/// A configuration is a finite multiset over interned states, kept canonical:
/// entries sorted by state id, every count strictly positive.
class Config {
  public:
    using Entry = std::pair<StateId, std::uint32_t>;

    Config() = default;

    /// Builds from arbitrary (state, count) pairs; merges duplicates, drops zeros.
    static Config from_entries(std::vector<Entry> entries);

    std::uint32_t count(StateId q) const;
    std::uint64_t size() const;
    bool empty() const { return entries_.empty(); }

    /// Number of distinct states present.
    std::size_t support_size() const { return entries_.size(); }

    const std::vector<Entry>& entries() const { return entries_; }

    Config add(StateId q, std::uint32_t k) const;

    /// Precondition: count(q) >= k.
    Config sub(StateId q, std::uint32_t k) const;

    bool operator==(const Config& other) const = default;
    bool operator<(const Config& other) const { return entries_ < other.entries_; }

  private:
    std::vector<Entry> entries_;
};

struct ConfigHash {
    std::size_t operator()(const Config& c) const {
        std::uint64_t h = 0x9e3779b97f4a7c15ull;
        for (const auto& [q, n] : c.entries()) {
            std::uint64_t v = (std::uint64_t(q) << 32) | n;
            v *= 0xbf58476d1ce4e5b9ull;
            v ^= v >> 31;
            h = (h ^ v) * 0x94d049bb133111ebull;
        }
        return static_cast<std::size_t>(h ^ (h >> 29));
    }
};

} // namespace bcp
