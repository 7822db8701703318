#pragma once

// Stack-to-notch misalignment. Shifting the MgO/fixed-layer stack by an
// offset uncovers the edge domain on one side (outer half wall first, then
// the domain body) and exposes the same length of the out-of-window
// neighbor on the other side. Interior domains stay fully covered.

#include <mdmtj/chartable.hpp>
#include <mdmtj/errors.hpp>
#include <mdmtj/margins.hpp>
#include <mdmtj/netmodel.hpp>
#include <mdmtj/parallel.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace mdmtj {

enum class NeighborAssumption : std::uint8_t { Zero, One, WorstCase };

inline std::string to_string(NeighborAssumption n) {
    switch (n) {
    case NeighborAssumption::Zero: return "0";
    case NeighborAssumption::One: return "1";
    case NeighborAssumption::WorstCase: return "worst";
    }
    return "worst";
}

struct MisalignmentSpec {
    double offset = 0; // meters, positive shifts the stack toward +X
    NeighborAssumption left_neighbor = NeighborAssumption::WorstCase;
    NeighborAssumption right_neighbor = NeighborAssumption::WorstCase;
};

struct ScaledSegment {
    SegmentKind kind;
    double covered_length = 0;
    double resistance = 0;
};

struct PerturbedDecomposition {
    Decomposition nominal;              // segments still fully covered
    std::vector<ScaledSegment> scaled;  // partly covered and overhang segments
};

inline double equivalent_resistance(const PerturbedDecomposition& d, const SegmentResistanceTable& table) {
    std::vector<double> terms;
    detail::append_conductances(d.nominal.counts, table, terms);
    for (const auto& s : d.scaled) terms.push_back(1 / s.resistance);
    return detail::resistance_from_conductances(terms);
}

inline void check_offset(double offset, const DeviceGeometry& geometry) {
    if (!(std::abs(offset) <= geometry.notch_length)) {
        throw OffsetOutOfRange("offset " + std::to_string(offset * 1e9) + " nm exceeds the notch length " +
                               std::to_string(geometry.notch_length * 1e9) + " nm");
    }
}

// `neighbor_bit` is the polarity of the domain exposed past the leading
// edge (right neighbor for positive offsets, left for negative).
inline PerturbedDecomposition apply_misalignment(const BitPattern& p, BorderCondition b, double offset,
                                                 int neighbor_bit, const SegmentResistanceTable& table,
                                                 const DeviceGeometry& geometry) {
    check_offset(offset, geometry);
    PerturbedDecomposition out{decompose(p, b), {}};
    if (offset == 0) return out;

    const int n = p.size();
    const bool shift_right = offset > 0;
    const double shift = std::abs(offset);
    const int edge = shift_right ? 0 : n - 1;
    const Border trailing = shift_right ? b.left : b.right;

    int walls = 0;
    walls += (edge == 0) ? (b.left == Border::Differ) : (p[edge - 1] != p[edge]);
    walls += (edge == n - 1) ? (b.right == Border::Differ) : (p[edge] != p[edge + 1]);
    const SegmentKind body = domain_segment(p.polarity(edge), static_cast<LengthClass>(walls));

    auto take = [&](SegmentKind k) { --out.nominal.counts[index_of(k)]; };
    auto add = [&](SegmentKind k, double covered) {
        out.scaled.push_back({k, covered, scaled_resistance(k, covered, table, geometry)});
    };

    double uncovered = shift;
    if (trailing == Border::Differ) {
        const SegmentKind h = half_wall(p.polarity(edge));
        const double len = nominal_length(h, geometry);
        take(h);
        if (uncovered < len) add(h, len - uncovered);
        uncovered = std::max(0.0, uncovered - len);
    }
    take(body);
    add(body, nominal_length(body, geometry) - uncovered);

    const auto exposed = neighbor_bit ? Polarity::PlusZ : Polarity::MinusZ;
    add(domain_segment(exposed, LengthClass::L80), shift);
    return out;
}

inline std::vector<int> neighbor_bits(NeighborAssumption n) {
    switch (n) {
    case NeighborAssumption::Zero: return {0};
    case NeighborAssumption::One: return {1};
    case NeighborAssumption::WorstCase: return {0, 1};
    }
    return {0, 1};
}

// Perturbed networks for this word, one per admissible neighbor polarity
// on the exposed side.
inline std::vector<PerturbedDecomposition> apply_misalignment(const BitPattern& p, BorderCondition b,
                                                              const MisalignmentSpec& spec,
                                                              const SegmentResistanceTable& table,
                                                              const DeviceGeometry& geometry) {
    std::vector<PerturbedDecomposition> out;
    const auto side = spec.offset >= 0 ? spec.right_neighbor : spec.left_neighbor;
    for (int bit : neighbor_bits(side)) out.push_back(apply_misalignment(p, b, spec.offset, bit, table, geometry));
    return out;
}

// Classes split by edge bits, reused across offsets.
class MisalignmentAnalyzer {
public:
    MisalignmentAnalyzer(int domains, BorderCondition b, const SegmentResistanceTable& table,
                         const DriveParams& drive, const DeviceGeometry& geometry)
        : domains_(domains), borders_(b), table_(table), geometry_(geometry),
          current_(mdmtj::read_current(domains, drive, geometry)), classes_(enumerate_classes(domains, b, true)) {}

    int domains() const noexcept { return domains_; }
    double read_current() const noexcept { return current_; }

    // Perturbed clusters; under WorstCase each word contributes both its
    // lighter and heavier alternative.
    MarginReport report(const MisalignmentSpec& spec) const {
        std::vector<ResistanceClass> entries;
        entries.reserve(classes_.size() * 2);
        for (const auto& c : classes_) {
            for (const auto& d : apply_misalignment(c.representative, borders_, spec, table_, geometry_)) {
                entries.push_back({c.representative, borders_, c.multiplicity, equivalent_resistance(d, table_)});
            }
        }
        return detail::assemble_report(domains_, BorderSelection::of(borders_), std::move(entries), current_);
    }

    double min_margin(const MisalignmentSpec& spec) const {
        const auto n = static_cast<std::size_t>(domains_) + 1;
        std::vector<double> lo(n, std::numeric_limits<double>::infinity());
        std::vector<double> hi(n, -std::numeric_limits<double>::infinity());
        for (const auto& c : classes_) {
            const int w = c.weight;
            for (const auto& d : apply_misalignment(c.representative, borders_, spec, table_, geometry_)) {
                const double r = equivalent_resistance(d, table_);
                lo[w] = std::min(lo[w], r);
                hi[w] = std::max(hi[w], r);
            }
        }
        double m = std::numeric_limits<double>::infinity();
        for (std::size_t w = 0; w + 1 < n; ++w) m = std::min(m, current_ * lo[w + 1] - current_ * hi[w]);
        return m;
    }

private:
    int domains_;
    BorderCondition borders_;
    SegmentResistanceTable table_;
    DeviceGeometry geometry_;
    double current_;
    std::vector<PatternClass> classes_;
};

struct OffsetResult {
    MisalignmentSpec spec;
    double margin_positive = 0; // stack shifted by +|offset|
    double margin_negative = 0; // stack shifted by -|offset|
    double perturbed_min_margin = 0;
};

struct MonteCarloSpec {
    std::size_t samples = 1000;
    double sigma = nm_to_m(5.5) / 6;
    double truncation = 6; // in sigmas
    std::uint64_t seed = 0;
    NeighborAssumption neighbors = NeighborAssumption::WorstCase;
};

struct MonteCarloSample {
    std::size_t index = 0;
    double offset = 0;
    double min_margin = 0;
};

struct MarginSummary {
    double mean = 0;
    double stddev = 0;
    double min = 0;
    double p01 = 0;
};

struct MonteCarloResult {
    MonteCarloSpec spec;
    MarginSummary margin;
    double offset_mean = 0;
    std::vector<MonteCarloSample> samples;
};

struct VariationReport {
    int domains = 0;
    BorderCondition borders;
    double nominal_min_margin = 0;
    double margin_deviation = 0;
    std::optional<OffsetResult> offset;
    std::optional<MonteCarloResult> monte_carlo;
};

// Both offset signs are evaluated and the smaller margin kept.
inline VariationReport offset_margin_report(int domains, BorderCondition b, const MisalignmentSpec& spec,
                                            const SegmentResistanceTable& table, const DriveParams& drive,
                                            const DeviceGeometry& geometry) {
    check_offset(spec.offset, geometry);
    const MisalignmentAnalyzer analyzer(domains, b, table, drive, geometry);
    VariationReport r;
    r.domains = domains;
    r.borders = b;
    r.nominal_min_margin = analyzer.min_margin(MisalignmentSpec{0, spec.left_neighbor, spec.right_neighbor});

    OffsetResult o;
    o.spec = spec;
    MisalignmentSpec s = spec;
    s.offset = std::abs(spec.offset);
    o.margin_positive = analyzer.min_margin(s);
    s.offset = -std::abs(spec.offset);
    o.margin_negative = analyzer.min_margin(s);
    o.perturbed_min_margin = std::min(o.margin_positive, o.margin_negative);
    r.margin_deviation = r.nominal_min_margin - o.perturbed_min_margin;
    r.offset = o;
    return r;
}

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Offset of sample `index`: its own mt19937_64 seeded from the run seed
// and the index, so results do not depend on scheduling.
inline double sample_offset(const MonteCarloSpec& mc, std::size_t index) {
    std::mt19937_64 engine(splitmix64(mc.seed ^ splitmix64(static_cast<std::uint64_t>(index))));
    std::normal_distribution<double> normal(0.0, mc.sigma);
    const double bound = mc.truncation * mc.sigma;
    for (;;) {
        const double x = normal(engine);
        if (std::abs(x) <= bound) return x;
    }
}

inline VariationReport monte_carlo_margins(int domains, BorderCondition b, const MonteCarloSpec& mc,
                                           const SegmentResistanceTable& table, const DriveParams& drive,
                                           const DeviceGeometry& geometry, unsigned workers = 1) {
    if (mc.samples < 1) throw Error("Monte Carlo needs at least one sample");
    if (!(mc.sigma > 0) || !(mc.truncation > 0)) throw Error("Monte Carlo sigma and truncation must be positive");
    check_offset(mc.truncation * mc.sigma, geometry);

    const MisalignmentAnalyzer analyzer(domains, b, table, drive, geometry);
    VariationReport r;
    r.domains = domains;
    r.borders = b;
    r.nominal_min_margin = analyzer.min_margin(MisalignmentSpec{0, mc.neighbors, mc.neighbors});

    MonteCarloResult res;
    res.spec = mc;
    res.samples.resize(mc.samples);
    detail::parallel_for(mc.samples, workers, [&](std::size_t i) {
        const double offset = sample_offset(mc, i);
        res.samples[i] = {i, offset, analyzer.min_margin(MisalignmentSpec{offset, mc.neighbors, mc.neighbors})};
    });

    const double n = static_cast<double>(mc.samples);
    double sum = 0;
    double offset_sum = 0;
    double lowest = std::numeric_limits<double>::infinity();
    for (const auto& s : res.samples) {
        sum += s.min_margin;
        offset_sum += s.offset;
        lowest = std::min(lowest, s.min_margin);
    }
    res.margin.mean = sum / n;
    res.offset_mean = offset_sum / n;
    double sq = 0;
    for (const auto& s : res.samples) sq += (s.min_margin - res.margin.mean) * (s.min_margin - res.margin.mean);
    res.margin.stddev = mc.samples > 1 ? std::sqrt(sq / (n - 1)) : 0.0;
    res.margin.min = lowest;

    std::vector<double> sorted(mc.samples);
    std::transform(res.samples.begin(), res.samples.end(), sorted.begin(),
                   [](const MonteCarloSample& s) { return s.min_margin; });
    std::sort(sorted.begin(), sorted.end());
    // nearest-rank 1st percentile
    const auto rank = static_cast<std::size_t>(std::ceil(0.01 * n));
    res.margin.p01 = sorted[rank == 0 ? 0 : rank - 1];

    r.margin_deviation = r.nominal_min_margin - res.margin.min;
    r.monte_carlo = std::move(res);
    return r;
}

} // namespace mdmtj
