#pragma once

// Hamming-weight clustering of every stored word, sense margins between
// adjacent clusters, the closed-form worst-case margin and the scaling sweep.

#include <mdmtj/chartable.hpp>
#include <mdmtj/errors.hpp>
#include <mdmtj/netmodel.hpp>
#include <mdmtj/parallel.hpp>

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace mdmtj {

// A fixed border convention, or the worst case over all four taken
// pattern by pattern.
struct BorderSelection {
    bool worst_case = false;
    BorderCondition fixed{};

    static BorderSelection of(BorderCondition b) { return {false, b}; }
    static BorderSelection worst() { return {true, {}}; }

    std::vector<BorderCondition> conventions() const {
        if (worst_case) return {kAllBorderConditions.begin(), kAllBorderConditions.end()};
        return {fixed};
    }

    bool operator==(const BorderSelection&) const = default;
};

inline std::string to_string(const BorderSelection& s) { return s.worst_case ? "worst" : to_string(s.fixed); }

// Words of one length that decompose into the same segment multiset.
struct PatternClass {
    SegmentCounts counts{};
    BitPattern representative; // lexicographically smallest member
    std::uint64_t multiplicity = 0;
    int weight = 0;
    // Edge bits, filled when classes are split by edges: first two bits
    // (first only for one domain) and the last bit with whether it differs
    // from its left neighbor.
    std::uint8_t head = 0;
    std::uint8_t tail = 0;
};

namespace detail {

struct EnumState {
    SegmentCounts counts{};
    std::uint8_t last = 0;
    std::uint8_t walls = 0;
    std::uint8_t head = 0;

    auto operator<=>(const EnumState&) const = default;
};

struct EnumValue {
    std::uint64_t multiplicity = 0;
    std::uint32_t representative = 0;
};

inline void merge(std::map<EnumState, EnumValue>& into, const EnumState& key, const EnumValue& v) {
    auto [it, inserted] = into.try_emplace(key, v);
    if (!inserted) {
        it->second.multiplicity += v.multiplicity;
        it->second.representative = std::min(it->second.representative, v.representative);
    }
}

} // namespace detail

inline void check_domain_count(int domains) {
    if (domains < 1) throw DomainCountTooSmall("domain count must be at least 1, got " + std::to_string(domains));
    if (domains > kMaxDomains) {
        throw DomainCountTooLarge("domain count must be at most " + std::to_string(kMaxDomains) + ", got " +
                                  std::to_string(domains));
    }
}

// All 2^D words grouped into segment-multiset classes, built left to right
// without visiting individual words. With `split_edges` the classes are
// further split by the edge bits that misalignment analysis needs.
inline std::vector<PatternClass> enumerate_classes(int domains, BorderCondition b, bool split_edges = false) {
    check_domain_count(domains);
    using detail::EnumState;
    using detail::EnumValue;

    std::map<EnumState, EnumValue> states;
    for (std::uint8_t bit : {0, 1}) {
        EnumState s;
        s.last = bit;
        s.head = split_edges ? bit : 0;
        if (b.left == Border::Differ) {
            s.walls = 1;
            ++s.counts[index_of(half_wall(bit ? Polarity::PlusZ : Polarity::MinusZ))];
        }
        detail::merge(states, s, EnumValue{1, bit});
    }

    for (int i = 1; i < domains; ++i) {
        std::map<EnumState, EnumValue> next;
        for (const auto& [s, v] : states) {
            for (std::uint8_t bit : {0, 1}) {
                EnumState n = s;
                int walls = s.walls;
                n.walls = 0;
                if (bit != s.last) {
                    ++walls;
                    n.walls = 1;
                    ++n.counts[index_of(s.last == 0 ? SegmentKind::Wall01 : SegmentKind::Wall10)];
                }
                ++n.counts[index_of(domain_segment(s.last ? Polarity::PlusZ : Polarity::MinusZ,
                                                   static_cast<LengthClass>(walls)))];
                n.last = bit;
                if (split_edges && i == 1) n.head = static_cast<std::uint8_t>((s.head << 1) | bit);
                detail::merge(next, n, EnumValue{v.multiplicity, (v.representative << 1) | bit});
            }
        }
        states = std::move(next);
    }

    // Final domain closes against the right border.
    std::map<std::tuple<SegmentCounts, std::uint8_t, std::uint8_t>, EnumValue> classes;
    for (const auto& [s, v] : states) {
        SegmentCounts counts = s.counts;
        int walls = s.walls;
        const auto pol = s.last ? Polarity::PlusZ : Polarity::MinusZ;
        if (b.right == Border::Differ) {
            ++walls;
            ++counts[index_of(half_wall(pol))];
        }
        ++counts[index_of(domain_segment(pol, static_cast<LengthClass>(walls)))];
        const auto tail = static_cast<std::uint8_t>(split_edges ? (s.last << 1) | (domains > 1 ? s.walls : 0) : 0);
        auto key = std::make_tuple(counts, s.head, tail);
        auto [it, inserted] = classes.try_emplace(key, v);
        if (!inserted) {
            it->second.multiplicity += v.multiplicity;
            it->second.representative = std::min(it->second.representative, v.representative);
        }
    }

    std::vector<PatternClass> out;
    out.reserve(classes.size());
    for (const auto& [key, v] : classes) {
        PatternClass c;
        c.counts = std::get<0>(key);
        c.head = std::get<1>(key);
        c.tail = std::get<2>(key);
        c.representative = BitPattern(domains, v.representative);
        c.multiplicity = v.multiplicity;
        c.weight = c.representative.weight();
        out.push_back(c);
    }
    std::sort(out.begin(), out.end(), [](const PatternClass& a, const PatternClass& b) {
        return a.representative < b.representative;
    });
    return out;
}

struct ResistanceClass {
    BitPattern representative;
    BorderCondition borders;
    std::uint64_t multiplicity = 0;
    double resistance = 0;
};

struct LevelCluster {
    int weight = 0;
    double min_resistance = 0;
    double max_resistance = 0;
    double min_voltage = 0;
    double max_voltage = 0;
    std::uint64_t pattern_count = 0; // C(D, weight)
    std::vector<ResistanceClass> classes;
};

struct AdjacentMargin {
    int weight_low = 0;
    double low_max_resistance = 0;
    double high_min_resistance = 0;
    double margin = 0; // volts
};

struct MarginReport {
    int domains = 0;
    BorderSelection borders;
    double read_current = 0;
    std::vector<LevelCluster> clusters;
    std::vector<AdjacentMargin> adjacent_margins;
    double min_margin = 0;
    std::pair<int, int> min_margin_pair{0, 1};
    int distinguishable_levels = 0;
};

inline std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    return r;
}

namespace detail {

inline std::vector<ResistanceClass> resistance_classes(int domains, BorderCondition b,
                                                       const SegmentResistanceTable& table) {
    std::vector<ResistanceClass> out;
    for (const auto& c : enumerate_classes(domains, b)) {
        out.push_back({c.representative, b, c.multiplicity, equivalent_resistance(c.counts, table)});
    }
    return out;
}

inline MarginReport assemble_report(int domains, const BorderSelection& sel, std::vector<ResistanceClass> classes,
                                    double current) {
    MarginReport r;
    r.domains = domains;
    r.borders = sel;
    r.read_current = current;
    r.clusters.resize(static_cast<std::size_t>(domains) + 1);
    for (int w = 0; w <= domains; ++w) {
        auto& c = r.clusters[w];
        c.weight = w;
        c.pattern_count = binomial(domains, w);
        c.min_resistance = std::numeric_limits<double>::infinity();
        c.max_resistance = -std::numeric_limits<double>::infinity();
    }
    std::sort(classes.begin(), classes.end(), [](const ResistanceClass& a, const ResistanceClass& b) {
        return std::tie(a.representative, a.borders) < std::tie(b.representative, b.borders);
    });
    for (auto& rc : classes) {
        auto& c = r.clusters[rc.representative.weight()];
        c.min_resistance = std::min(c.min_resistance, rc.resistance);
        c.max_resistance = std::max(c.max_resistance, rc.resistance);
        c.classes.push_back(std::move(rc));
    }
    for (auto& c : r.clusters) {
        c.min_voltage = current * c.min_resistance;
        c.max_voltage = current * c.max_resistance;
    }
    r.min_margin = std::numeric_limits<double>::infinity();
    int levels = 1;
    for (int w = 0; w < domains; ++w) {
        const auto& lo = r.clusters[w];
        const auto& hi = r.clusters[w + 1];
        AdjacentMargin m{w, lo.max_resistance, hi.min_resistance, hi.min_voltage - lo.max_voltage};
        if (m.margin > 0) ++levels;
        if (m.margin < r.min_margin) {
            r.min_margin = m.margin;
            r.min_margin_pair = {w, w + 1};
        }
        r.adjacent_margins.push_back(m);
    }
    r.distinguishable_levels = levels;
    return r;
}

} // namespace detail

inline MarginReport enumerate_levels(int domains, const BorderSelection& sel, const SegmentResistanceTable& table,
                                     const DriveParams& drive, const DeviceGeometry& geometry) {
    check_domain_count(domains);
    std::vector<ResistanceClass> classes;
    for (const auto b : sel.conventions()) {
        auto part = detail::resistance_classes(domains, b, table);
        classes.insert(classes.end(), part.begin(), part.end());
    }
    return detail::assemble_report(domains, sel, std::move(classes), read_current(domains, drive, geometry));
}

inline MarginReport enumerate_levels(int domains, BorderCondition b, const SegmentResistanceTable& table,
                                     const DriveParams& drive, const DeviceGeometry& geometry) {
    return enumerate_levels(domains, BorderSelection::of(b), table, drive, geometry);
}

// The two network resistances the closed form subtracts: the lightest
// weight-1 word ("0..01" with a Differ right border) and the heaviest
// weight-0 word ("0..0" with both borders Differ).
struct ClosedFormTerms {
    double weight_one_min = 0;
    double weight_zero_max = 0;
};

inline ClosedFormTerms closed_form_terms(int domains, const SegmentResistanceTable& t) {
    if (domains < 2) {
        throw DomainCountTooSmall("closed-form margin needs at least 2 domains, got " + std::to_string(domains));
    }
    const double interior = (domains - 2) / t[SegmentKind::MinusZ80];
    const double g_one = interior + 1 / t[SegmentKind::MinusZ74] + 1 / t[SegmentKind::PlusZ68] +
                         1 / t[SegmentKind::Wall01] + 1 / t[SegmentKind::HalfWallPlusZ];
    const double g_zero = interior + 2 / t[SegmentKind::MinusZ74] + 2 / t[SegmentKind::HalfWallMinusZ];
    return {1 / g_one, 1 / g_zero};
}

inline double closed_form_min_margin(int domains, const SegmentResistanceTable& table, const DriveParams& drive,
                                     const DeviceGeometry& geometry) {
    const auto terms = closed_form_terms(domains, table);
    return read_current(domains, drive, geometry) * (terms.weight_one_min - terms.weight_zero_max);
}

// Sense-amplifier references halfway across each gap.
inline std::vector<double> reference_ladder(const MarginReport& report) {
    std::vector<double> out;
    for (const auto& m : report.adjacent_margins) {
        if (!(m.margin > 0)) {
            throw ClustersOverlap("clusters " + std::to_string(m.weight_low) + " and " +
                                  std::to_string(m.weight_low + 1) + " overlap");
        }
        const auto& lo = report.clusters[m.weight_low];
        const auto& hi = report.clusters[m.weight_low + 1];
        out.push_back((lo.max_voltage + hi.min_voltage) / 2);
    }
    return out;
}

inline constexpr int kMaxEnumeratedSweepDomains = 20;

struct SweepRow {
    int domains = 0;
    double closed_form_margin = 0;
    // same,same / same,differ / differ,same / differ,differ / worst
    std::array<std::optional<double>, 5> enumerated_margin{};
};

inline constexpr std::array<std::string_view, 5> kSweepColumns{"same,same", "same,differ", "differ,same",
                                                               "differ,differ", "worst"};

inline std::size_t sweep_column(const BorderSelection& sel) {
    if (sel.worst_case) return 4;
    return static_cast<std::size_t>(std::find(kAllBorderConditions.begin(), kAllBorderConditions.end(), sel.fixed) -
                                    kAllBorderConditions.begin());
}

struct SweepReport {
    double threshold = 0; // volts
    std::vector<SweepRow> rows;
    std::optional<int> max_scalable_domains;
};

inline SweepReport sweep_domains(int min_domains, int max_domains, double threshold_volts,
                                 const SegmentResistanceTable& table, const DriveParams& drive,
                                 const DeviceGeometry& geometry, unsigned workers = 1) {
    if (min_domains < 2) throw DomainCountTooSmall("sweep must start at 2 or more domains");
    if (max_domains > kMaxDomains) throw DomainCountTooLarge("sweep must end at 30 or fewer domains");
    if (min_domains > max_domains) throw DomainCountTooSmall("sweep range is empty");

    SweepReport out;
    out.threshold = threshold_volts;
    out.rows.resize(static_cast<std::size_t>(max_domains - min_domains + 1));
    detail::parallel_for(out.rows.size(), workers, [&](std::size_t i) {
        const int d = min_domains + static_cast<int>(i);
        SweepRow& row = out.rows[i];
        row.domains = d;
        row.closed_form_margin = closed_form_min_margin(d, table, drive, geometry);
        if (d > kMaxEnumeratedSweepDomains) return;
        const double current = read_current(d, drive, geometry);
        std::vector<ResistanceClass> all;
        for (std::size_t k = 0; k < kAllBorderConditions.size(); ++k) {
            auto part = detail::resistance_classes(d, kAllBorderConditions[k], table);
            all.insert(all.end(), part.begin(), part.end());
            row.enumerated_margin[k] =
                detail::assemble_report(d, BorderSelection::of(kAllBorderConditions[k]), std::move(part), current)
                    .min_margin;
        }
        row.enumerated_margin[4] = detail::assemble_report(d, BorderSelection::worst(), std::move(all), current)
                                       .min_margin;
    });
    for (const auto& row : out.rows) {
        if (row.closed_form_margin >= threshold_volts) out.max_scalable_domains = row.domains;
    }
    return out;
}

} // namespace mdmtj
