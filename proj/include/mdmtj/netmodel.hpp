#pragma once

// Maps a stored word plus a border convention onto the parallel network of
// mini-resistors under the junction and evaluates it.

#include <mdmtj/chartable.hpp>
#include <mdmtj/errors.hpp>

#include <algorithm>
#include <array>
#include <bit>
#include <compare>
#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

namespace mdmtj {

inline constexpr int kMaxDomains = 30;

// Bits under the junction, leftmost physical domain first. A 1 is a +Z
// (anti-parallel, high resistance) domain, a 0 a -Z domain.
class BitPattern {
public:
    BitPattern() = default;

    // `value` read as a binary number of `size` digits, most significant first.
    BitPattern(int size, std::uint32_t value) : value_(value), size_(static_cast<std::uint8_t>(size)) {
        if (size < 1) throw InvalidPattern(std::to_string(size), "pattern must contain at least one bit");
        if (size > kMaxDomains) {
            throw InvalidPattern(std::to_string(size), "pattern longer than " + std::to_string(kMaxDomains));
        }
        value_ &= mask();
    }

    static BitPattern parse(std::string_view text) {
        const std::string arg(text);
        if (text.empty()) throw InvalidPattern(arg, "empty pattern");
        if (text.size() > static_cast<std::size_t>(kMaxDomains)) {
            throw InvalidPattern(arg, "longer than " + std::to_string(kMaxDomains) + " bits");
        }
        std::uint32_t v = 0;
        for (std::size_t i = 0; i < text.size(); ++i) {
            const char ch = text[i];
            if (ch != '0' && ch != '1') {
                throw InvalidPattern(arg, "character '" + std::string(1, ch) + "' at position " +
                                              std::to_string(i) + " is not 0 or 1");
            }
            v = (v << 1) | static_cast<std::uint32_t>(ch - '0');
        }
        return BitPattern(static_cast<int>(text.size()), v);
    }

    int size() const noexcept { return size_; }
    std::uint32_t value() const noexcept { return value_; }

    // Bit of domain `i`, counted from the left.
    int operator[](int i) const noexcept { return static_cast<int>((value_ >> (size_ - 1 - i)) & 1u); }
    Polarity polarity(int i) const noexcept { return (*this)[i] ? Polarity::PlusZ : Polarity::MinusZ; }

    int weight() const noexcept { return std::popcount(value_); }

    BitPattern reversed() const {
        std::uint32_t v = 0;
        for (int i = 0; i < size_; ++i) v = (v << 1) | static_cast<std::uint32_t>((*this)[size_ - 1 - i]);
        return BitPattern(size_, v);
    }

    BitPattern complemented() const { return BitPattern(size_, ~value_ & mask()); }

    std::string to_string() const {
        std::string s(size_, '0');
        for (int i = 0; i < size_; ++i) s[i] = static_cast<char>('0' + (*this)[i]);
        return s;
    }

    // Same length compares lexicographically.
    auto operator<=>(const BitPattern& o) const noexcept {
        if (auto c = size_ <=> o.size_; c != 0) return c;
        return value_ <=> o.value_;
    }
    bool operator==(const BitPattern&) const = default;

private:
    std::uint32_t mask() const noexcept {
        return size_ >= 32 ? ~0u : ((1u << size_) - 1u);
    }

    std::uint32_t value_ = 0;
    std::uint8_t size_ = 0;
};

enum class Border : std::uint8_t { Same, Differ };

// Whether each out-of-window neighbor has the opposite polarity of the
// adjacent edge domain.
struct BorderCondition {
    Border left = Border::Same;
    Border right = Border::Same;

    BorderCondition mirrored() const noexcept { return {right, left}; }

    auto operator<=>(const BorderCondition&) const = default;
};

inline constexpr std::array<BorderCondition, 4> kAllBorderConditions{{
    {Border::Same, Border::Same},
    {Border::Same, Border::Differ},
    {Border::Differ, Border::Same},
    {Border::Differ, Border::Differ},
}};

inline std::string to_string(BorderCondition b) {
    auto side = [](Border x) { return x == Border::Same ? "same" : "differ"; };
    return std::string(side(b.left)) + "," + side(b.right);
}

using SegmentCounts = std::array<std::uint16_t, kSegmentKindCount>;

struct Decomposition {
    SegmentCounts counts{};
    BitPattern pattern;
    BorderCondition borders;

    std::uint32_t count(SegmentKind k) const noexcept { return counts[index_of(k)]; }
    std::uint32_t total() const noexcept { return std::accumulate(counts.begin(), counts.end(), 0u); }
};

namespace detail {

// Sums conductances in ascending order so the result depends only on the
// multiset of terms.
inline double resistance_from_conductances(std::vector<double>& terms) {
    if (terms.empty()) throw EmptyNetwork("no segments in the network");
    std::sort(terms.begin(), terms.end());
    double g = 0;
    for (double t : terms) g += t;
    return 1.0 / g;
}

inline void append_conductances(const SegmentCounts& counts, const SegmentResistanceTable& table,
                                std::vector<double>& terms) {
    for (auto kind : kAllSegmentKinds) {
        if (const auto n = counts[index_of(kind)]; n != 0) terms.push_back(static_cast<double>(n) / table[kind]);
    }
}

} // namespace detail

// Walls sit between differing neighbors (full wall, named by the left to
// right transition) and on a Differ border (half wall of the edge domain's
// polarity). Each wall next to a domain shortens it by half a notch.
inline Decomposition decompose(const BitPattern& p, BorderCondition b) {
    Decomposition d{{}, p, b};
    const int n = p.size();
    auto add = [&](SegmentKind k) { ++d.counts[index_of(k)]; };

    for (int i = 0; i < n; ++i) {
        int walls = 0;
        if (i == 0) {
            if (b.left == Border::Differ) {
                ++walls;
                add(half_wall(p.polarity(0)));
            }
        } else if (p[i - 1] != p[i]) {
            ++walls;
        }
        if (i == n - 1) {
            if (b.right == Border::Differ) {
                ++walls;
                add(half_wall(p.polarity(i)));
            }
        } else if (p[i] != p[i + 1]) {
            ++walls;
            add(p[i] == 0 ? SegmentKind::Wall01 : SegmentKind::Wall10);
        }
        add(domain_segment(p.polarity(i), static_cast<LengthClass>(walls)));
    }
    return d;
}

inline double equivalent_resistance(const SegmentCounts& counts, const SegmentResistanceTable& table) {
    std::vector<double> terms;
    terms.reserve(kSegmentKindCount);
    detail::append_conductances(counts, table, terms);
    return detail::resistance_from_conductances(terms);
}

inline double equivalent_resistance(const Decomposition& d, const SegmentResistanceTable& table) {
    return equivalent_resistance(d.counts, table);
}

inline double pattern_resistance(const BitPattern& p, BorderCondition b, const SegmentResistanceTable& table) {
    return equivalent_resistance(decompose(p, b), table);
}

inline double read_current(int domains, const DriveParams& drive, const DeviceGeometry& geometry) {
    return drive.read_current(domains, geometry.domain_area());
}

inline double pattern_voltage(const BitPattern& p, BorderCondition b, const SegmentResistanceTable& table,
                              const DriveParams& drive, const DeviceGeometry& geometry) {
    return read_current(p.size(), drive, geometry) * pattern_resistance(p, b, table);
}

// Segment multiset with the two wall directions merged. Patterns sharing a
// key differ at most by the direction asymmetry of their walls.
struct EquivalenceKey {
    SegmentCounts counts{};

    auto operator<=>(const EquivalenceKey&) const = default;
};

inline EquivalenceKey equivalence_key(const BitPattern& p, BorderCondition b) {
    EquivalenceKey key{decompose(p, b).counts};
    key.counts[index_of(SegmentKind::Wall01)] += key.counts[index_of(SegmentKind::Wall10)];
    key.counts[index_of(SegmentKind::Wall10)] = 0;
    return key;
}

// Multiset seen from the other end of the wire.
inline SegmentCounts mirrored_counts(SegmentCounts c) {
    std::swap(c[index_of(SegmentKind::Wall01)], c[index_of(SegmentKind::Wall10)]);
    return c;
}

} // namespace mdmtj
