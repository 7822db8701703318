#pragma once

// Reference paths for the test suite. Nothing here reuses the production
// decomposition or summation: segments are laid out by walking the wire,
// parallel sums are exact rationals, and reports come from a raw loop over
// every word.

#include <mdmtj/chartable.hpp>
#include <mdmtj/errors.hpp>
#include <mdmtj/margins.hpp>
#include <mdmtj/netmodel.hpp>

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mdmtj::oracle {

// Arbitrary precision, always in lowest terms with a positive denominator.
using ExactRational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline constexpr int kMaxOracleDomains = 12;

// Every finite double is a dyadic rational; this returns it exactly.
inline ExactRational exact_from_double(double v) {
    if (!std::isfinite(v)) throw Error("cannot convert a non-finite value to a rational");
    if (v == 0) return ExactRational(0);
    int exp = 0;
    const double mant = std::frexp(v, &exp); // v = mant * 2^exp, 0.5 <= |mant| < 1
    const auto scaled = static_cast<std::int64_t>(std::ldexp(mant, 53));
    exp -= 53;
    BigInt num(scaled);
    BigInt den(1);
    if (exp > 0) num <<= exp;
    else den <<= -exp;
    return ExactRational(num, den);
}

// Decimal text such as "1911", "-2.5" or "3.21e10", without rounding.
inline ExactRational parse_decimal(std::string_view text) {
    const std::string arg(text);
    bool negative = false;
    if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
        negative = text.front() == '-';
        text.remove_prefix(1);
    }
    BigInt digits(0);
    long scale = 0;
    bool seen_digit = false;
    bool seen_point = false;
    std::size_t i = 0;
    for (; i < text.size(); ++i) {
        const char c = text[i];
        if (c >= '0' && c <= '9') {
            digits = digits * 10 + (c - '0');
            if (seen_point) --scale;
            seen_digit = true;
        } else if (c == '.' && !seen_point) {
            seen_point = true;
        } else {
            break;
        }
    }
    if (!seen_digit) throw Error("not a decimal number: '" + arg + "'");
    if (i < text.size()) {
        if (text[i] != 'e' && text[i] != 'E') throw Error("not a decimal number: '" + arg + "'");
        ++i;
        bool exp_negative = false;
        if (i < text.size() && (text[i] == '-' || text[i] == '+')) exp_negative = text[i++] == '-';
        if (i == text.size()) throw Error("not a decimal number: '" + arg + "'");
        long e = 0;
        for (; i < text.size(); ++i) {
            if (text[i] < '0' || text[i] > '9') throw Error("not a decimal number: '" + arg + "'");
            e = e * 10 + (text[i] - '0');
            if (e > 100000) throw Error("exponent out of range: '" + arg + "'");
        }
        scale += exp_negative ? -e : e;
    }
    BigInt pow10(1);
    for (long k = 0; k < std::labs(scale); ++k) pow10 *= 10;
    ExactRational r = scale >= 0 ? ExactRational(digits * pow10) : ExactRational(digits, pow10);
    return negative ? ExactRational(-r) : r;
}

inline ExactRational rational_parallel_sum(std::span<const ExactRational> resistances) {
    if (resistances.empty()) throw EmptyNetwork("parallel sum of an empty network");
    ExactRational conductance(0);
    for (const auto& r : resistances) {
        if (r <= 0) throw Error("parallel sum needs positive resistances");
        conductance += 1 / r;
    }
    return 1 / conductance;
}

// Segments in physical order, left to right, as drawn for the device:
// [half wall] domain wall domain wall ... domain [half wall]. A domain's
// length is 80 nm less 6 nm for every wall that touches it.
inline std::vector<SegmentKind> walk_segments(const BitPattern& p, BorderCondition b) {
    const std::string bits = p.to_string();
    const std::size_t n = bits.size();
    std::vector<SegmentKind> out;
    for (std::size_t i = 0; i < n; ++i) {
        const bool plus = bits[i] == '1';
        const bool wall_left = i == 0 ? b.left == Border::Differ : bits[i - 1] != bits[i];
        const bool wall_right = i + 1 == n ? b.right == Border::Differ : bits[i] != bits[i + 1];
        if (i == 0 && wall_left) out.push_back(plus ? SegmentKind::HalfWallPlusZ : SegmentKind::HalfWallMinusZ);

        const int length_nm = 80 - 6 * (int(wall_left) + int(wall_right));
        SegmentKind body{};
        switch (length_nm) {
        case 80: body = plus ? SegmentKind::PlusZ80 : SegmentKind::MinusZ80; break;
        case 74: body = plus ? SegmentKind::PlusZ74 : SegmentKind::MinusZ74; break;
        default: body = plus ? SegmentKind::PlusZ68 : SegmentKind::MinusZ68; break;
        }
        out.push_back(body);

        if (i + 1 < n && wall_right) out.push_back(plus ? SegmentKind::Wall10 : SegmentKind::Wall01);
        if (i + 1 == n && wall_right) out.push_back(plus ? SegmentKind::HalfWallPlusZ : SegmentKind::HalfWallMinusZ);
    }
    return out;
}

inline ExactRational exact_resistance(const std::vector<SegmentKind>& segments, const SegmentResistanceTable& table) {
    std::vector<ExactRational> values;
    values.reserve(segments.size());
    for (auto k : segments) values.push_back(exact_from_double(table[k]));
    return rational_parallel_sum(values);
}

inline ExactRational exact_pattern_resistance(const BitPattern& p, BorderCondition b,
                                              const SegmentResistanceTable& table) {
    return exact_resistance(walk_segments(p, b), table);
}

inline double to_double(const ExactRational& r) { return r.convert_to<double>(); }

// Raw loop over all 2^D words of every selected convention.
inline MarginReport brute_force_report(int domains, const BorderSelection& sel, const SegmentResistanceTable& table,
                                       const DriveParams& drive, const DeviceGeometry& geometry) {
    if (domains > kMaxOracleDomains) {
        throw DomainCountTooLarge("brute-force oracle is limited to " + std::to_string(kMaxOracleDomains) +
                                  " domains");
    }
    if (domains < 1) throw DomainCountTooSmall("brute-force oracle needs at least one domain");

    struct Group {
        std::uint32_t first = 0;
        std::uint64_t count = 0;
        double resistance = 0;
    };
    const double current = drive.current_density * domains * (geometry.domain_length * geometry.track_width);

    MarginReport r;
    r.domains = domains;
    r.borders = sel;
    r.read_current = current;
    for (int w = 0; w <= domains; ++w) {
        LevelCluster c;
        c.weight = w;
        c.min_resistance = std::numeric_limits<double>::max();
        c.max_resistance = std::numeric_limits<double>::lowest();
        r.clusters.push_back(c);
    }

    for (const auto b : sel.conventions()) {
        std::map<std::vector<SegmentKind>, Group> groups;
        for (std::uint32_t v = 0; v < (1u << domains); ++v) {
            auto segments = walk_segments(BitPattern(domains, v), b);
            std::sort(segments.begin(), segments.end());
            auto& g = groups[segments];
            if (g.count == 0) {
                g.first = v;
                g.resistance = to_double(exact_resistance(segments, table));
            }
            ++g.count;
        }
        for (const auto& [segments, g] : groups) {
            const BitPattern rep(domains, g.first);
            auto& c = r.clusters[rep.weight()];
            c.classes.push_back({rep, b, g.count, g.resistance});
            if (g.resistance < c.min_resistance) c.min_resistance = g.resistance;
            if (g.resistance > c.max_resistance) c.max_resistance = g.resistance;
        }
    }

    for (auto& c : r.clusters) {
        std::uint64_t total = 0;
        for (const auto& rc : c.classes) total += rc.multiplicity;
        c.pattern_count = total / sel.conventions().size();
        std::sort(c.classes.begin(), c.classes.end(), [](const ResistanceClass& a, const ResistanceClass& b) {
            if (a.representative != b.representative) return a.representative < b.representative;
            return a.borders < b.borders;
        });
        c.min_voltage = current * c.min_resistance;
        c.max_voltage = current * c.max_resistance;
    }

    r.min_margin = std::numeric_limits<double>::max();
    r.distinguishable_levels = 1;
    for (int w = 0; w + 1 <= domains; ++w) {
        const double gap = r.clusters[w + 1].min_voltage - r.clusters[w].max_voltage;
        r.adjacent_margins.push_back({w, r.clusters[w].max_resistance, r.clusters[w + 1].min_resistance, gap});
        if (gap > 0) ++r.distinguishable_levels;
        if (gap < r.min_margin) {
            r.min_margin = gap;
            r.min_margin_pair = {w, w + 1};
        }
    }
    return r;
}

inline bool close_relative(double a, double b, double tol) {
    if (a == b) return true;
    return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

// Field-by-field comparison. Integer and pattern fields must be equal;
// real fields agree to `tol` relative. Returns the first difference.
inline std::optional<std::string> compare_reports(const MarginReport& a, const MarginReport& b, double tol = 1e-9) {
    auto real = [&](const std::string& what, double x, double y) -> std::optional<std::string> {
        if (close_relative(x, y, tol)) return std::nullopt;
        return what + ": " + std::to_string(x) + " vs " + std::to_string(y);
    };
    if (a.domains != b.domains) return "domains differ";
    if (!(a.borders == b.borders)) return "border selections differ";
    if (auto d = real("read current", a.read_current, b.read_current)) return d;
    if (a.clusters.size() != b.clusters.size()) return "cluster count differs";
    for (std::size_t w = 0; w < a.clusters.size(); ++w) {
        const auto& x = a.clusters[w];
        const auto& y = b.clusters[w];
        const std::string tag = "cluster " + std::to_string(w) + " ";
        if (x.weight != y.weight || x.pattern_count != y.pattern_count) return tag + "weight or count differs";
        if (auto d = real(tag + "min resistance", x.min_resistance, y.min_resistance)) return d;
        if (auto d = real(tag + "max resistance", x.max_resistance, y.max_resistance)) return d;
        if (auto d = real(tag + "min voltage", x.min_voltage, y.min_voltage)) return d;
        if (auto d = real(tag + "max voltage", x.max_voltage, y.max_voltage)) return d;
        if (x.classes.size() != y.classes.size()) {
            return tag + "class count " + std::to_string(x.classes.size()) + " vs " + std::to_string(y.classes.size());
        }
        for (std::size_t i = 0; i < x.classes.size(); ++i) {
            const auto& p = x.classes[i];
            const auto& q = y.classes[i];
            if (p.representative != q.representative || !(p.borders == q.borders) || p.multiplicity != q.multiplicity) {
                return tag + "class " + p.representative.to_string() + " vs " + q.representative.to_string();
            }
            if (auto d = real(tag + p.representative.to_string(), p.resistance, q.resistance)) return d;
        }
    }
    if (a.adjacent_margins.size() != b.adjacent_margins.size()) return "margin count differs";
    for (std::size_t i = 0; i < a.adjacent_margins.size(); ++i) {
        const auto& x = a.adjacent_margins[i];
        const auto& y = b.adjacent_margins[i];
        const std::string tag = "margin " + std::to_string(i) + " ";
        if (x.weight_low != y.weight_low) return tag + "weights differ";
        if (auto d = real(tag + "low max", x.low_max_resistance, y.low_max_resistance)) return d;
        if (auto d = real(tag + "high min", x.high_min_resistance, y.high_min_resistance)) return d;
        // margins are differences of nearby voltages; compare on the voltage scale
        if (std::abs(x.margin - y.margin) > tol * a.clusters.back().max_voltage) {
            return tag + std::to_string(x.margin) + " vs " + std::to_string(y.margin);
        }
    }
    if (std::abs(a.min_margin - b.min_margin) > tol * a.clusters.back().max_voltage) return "min margin differs";
    if (a.min_margin_pair != b.min_margin_pair) return "min margin pair differs";
    if (a.distinguishable_levels != b.distinguishable_levels) return "distinguishable levels differ";
    return std::nullopt;
}

struct SymmetryOptions {
    // Test hook: when false the mirror check forgets that reversing the
    // wire also reverses every full wall.
    bool reverse_wall_directions = true;
};

enum class SymmetryKind { Mirror, Complement };

struct SymmetryViolation {
    SymmetryKind kind;
    BitPattern pattern;
    BorderCondition borders;
    std::string detail;
};

struct SymmetryResult {
    bool passed = true;
    std::size_t cases_checked = 0;
    std::optional<SymmetryViolation> first_violation;
};

// Exhaustive check of the production model, up to `max_domains`:
//   mirror     R(p, (l,r), T) == R(reverse p, (r,l), T with wall directions swapped)
//   complement R(p, b, T)     == R(~p, b, T with every polarity swapped)
// Both are exact; the multiset correspondence behind them is checked too.
inline SymmetryResult symmetry_sweep(int max_domains, const SegmentResistanceTable& table,
                                     SymmetryOptions options = {}) {
    if (max_domains > kMaxOracleDomains) {
        throw DomainCountTooLarge("symmetry sweep is limited to " + std::to_string(kMaxOracleDomains) + " domains");
    }
    const auto mirror_table = options.reverse_wall_directions ? swap_wall_directions(table) : table;
    const auto complement_table = swap_polarities(table);

    SymmetryResult result;
    auto fail = [&](SymmetryKind k, const BitPattern& p, BorderCondition b, std::string why) {
        result.passed = false;
        result.first_violation = SymmetryViolation{k, p, b, std::move(why)};
    };

    for (int d = 1; d <= max_domains; ++d) {
        for (std::uint32_t v = 0; v < (1u << d); ++v) {
            const BitPattern p(d, v);
            for (const auto b : kAllBorderConditions) {
                ++result.cases_checked;
                const auto fwd = decompose(p, b);
                const auto rev = decompose(p.reversed(), b.mirrored());
                const auto expected = options.reverse_wall_directions ? mirrored_counts(fwd.counts) : fwd.counts;
                if (expected != rev.counts) {
                    fail(SymmetryKind::Mirror, p, b, "segment multiset of the reversed word does not correspond");
                    return result;
                }
                const double r = equivalent_resistance(fwd, table);
                const double r_mirror = equivalent_resistance(rev, mirror_table);
                if (r != r_mirror) {
                    fail(SymmetryKind::Mirror, p, b,
                         "resistance " + std::to_string(r) + " vs mirrored " + std::to_string(r_mirror));
                    return result;
                }
                const double r_comp = pattern_resistance(p.complemented(), b, complement_table);
                if (r != r_comp) {
                    fail(SymmetryKind::Complement, p, b,
                         "resistance " + std::to_string(r) + " vs complemented " + std::to_string(r_comp));
                    return result;
                }
            }
        }
    }
    return result;
}

} // namespace mdmtj::oracle
