#include <mdmtj/variation.hpp>

#include "reference_values.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace mdmtj;

namespace {

const BorderCondition kSame{Border::Same, Border::Same};

BitPattern bits(const char* s) { return BitPattern::parse(s); }

MisalignmentSpec worst_at(double nm) {
    return {nm_to_m(nm), NeighborAssumption::WorstCase, NeighborAssumption::WorstCase};
}

} // namespace

TEST(Misalignment, ZeroOffsetIsNominal) {
    const auto c = default_characterization();
    for (int n = 1; n <= 8; ++n) {
        for (std::uint32_t v = 0; v < (1u << n); ++v) {
            const BitPattern p(n, v);
            for (auto b : kAllBorderConditions) {
                for (int nb : {0, 1}) {
                    const auto d = apply_misalignment(p, b, 0.0, nb, c.table, c.geometry);
                    ASSERT_TRUE(d.scaled.empty());
                    ASSERT_EQ(d.nominal.counts, decompose(p, b).counts);
                    ASSERT_EQ(equivalent_resistance(d, c.table), pattern_resistance(p, b, c.table));
                }
            }
        }
    }
}

TEST(Misalignment, UniformWordShiftedBySixNanometres) {
    const auto c = default_characterization();
    const auto d = apply_misalignment(bits("0000"), kSame, nm_to_m(6), 0, c.table, c.geometry);
    EXPECT_EQ(d.nominal.count(SegmentKind::MinusZ80), 3u);
    ASSERT_EQ(d.scaled.size(), 2u);
    EXPECT_EQ(d.scaled[0].kind, SegmentKind::MinusZ80);
    EXPECT_NEAR(d.scaled[0].resistance, 1911.0 * 80 / 74, 1e-9);
    EXPECT_EQ(d.scaled[1].kind, SegmentKind::MinusZ80);
    EXPECT_NEAR(d.scaled[1].resistance, 25480, 1e-8);

    const double expected = 1 / (3 / 1911.0 + 74 / (1911.0 * 80) + 6 / (1911.0 * 80));
    EXPECT_NEAR(equivalent_resistance(d, c.table), expected, 1e-9);
    // the junction still covers 320 nm of -Z free layer
    EXPECT_NEAR(equivalent_resistance(d, c.table), 477.75, 1e-9);
}

TEST(Misalignment, HalfWallUncoveredBeforeBody) {
    const auto c = default_characterization();
    const BorderCondition dd{Border::Differ, Border::Differ};
    const auto part = apply_misalignment(bits("0000"), dd, nm_to_m(4), 1, c.table, c.geometry);
    ASSERT_EQ(part.scaled.size(), 3u);
    EXPECT_EQ(part.scaled[0].kind, SegmentKind::HalfWallMinusZ);
    EXPECT_NEAR(part.scaled[0].covered_length, nm_to_m(2), 1e-20);
    EXPECT_NEAR(part.scaled[1].covered_length, nm_to_m(74), 1e-20);
    EXPECT_EQ(part.scaled[2].kind, SegmentKind::PlusZ80);

    const auto gone = apply_misalignment(bits("0000"), dd, nm_to_m(10), 1, c.table, c.geometry);
    ASSERT_EQ(gone.scaled.size(), 2u);
    EXPECT_EQ(gone.nominal.count(SegmentKind::HalfWallMinusZ), 1u);
    EXPECT_NEAR(gone.scaled[0].covered_length, nm_to_m(70), 1e-20);

    const auto left = apply_misalignment(bits("0001"), dd, -nm_to_m(3), 0, c.table, c.geometry);
    EXPECT_EQ(left.scaled[0].kind, SegmentKind::HalfWallPlusZ);
    EXPECT_EQ(left.nominal.count(SegmentKind::HalfWallPlusZ), 0u);
}

TEST(Misalignment, OffsetBeyondNotchRejected) {
    const auto c = default_characterization();
    EXPECT_THROW(apply_misalignment(bits("0000"), kSame, nm_to_m(12.5), 0, c.table, c.geometry), OffsetOutOfRange);
    EXPECT_THROW(offset_margin_report(4, kSame, worst_at(-13), c.table, c.drive, c.geometry), OffsetOutOfRange);
    EXPECT_NO_THROW(apply_misalignment(bits("0000"), kSame, nm_to_m(12), 0, c.table, c.geometry));
}

TEST(Misalignment, WorstCaseTakesBothNeighbors) {
    const auto c = default_characterization();
    const MisalignmentAnalyzer a(4, kSame, c.table, c.drive, c.geometry);
    for (double nm : {-6.0, -2.0, 3.0, 6.0}) {
        const auto zero = a.min_margin({nm_to_m(nm), NeighborAssumption::Zero, NeighborAssumption::Zero});
        const auto one = a.min_margin({nm_to_m(nm), NeighborAssumption::One, NeighborAssumption::One});
        const auto worst = a.min_margin(worst_at(nm));
        EXPECT_LE(worst, std::min(zero, one) + 1e-15) << nm;
    }
    const auto alts = apply_misalignment(bits("0110"), kSame, worst_at(5), c.table, c.geometry);
    EXPECT_EQ(alts.size(), 2u);
}

TEST(Misalignment, FourDomainReduction) {
    const auto c = default_characterization();
    const auto r6 = offset_margin_report(4, kSame, worst_at(6), c.table, c.drive, c.geometry);
    ASSERT_TRUE(r6.offset);
    const double nominal = r6.nominal_min_margin;
    const double reduced = r6.offset->perturbed_min_margin;
    const double fraction = (nominal - reduced) / nominal;
    EXPECT_GE(fraction, 0.05);
    EXPECT_LE(fraction, 0.25);
    // frozen from the independent model evaluation
    EXPECT_NEAR(nominal, 32.46e-3, 0.01e-3);
    EXPECT_NEAR(reduced, 27.606e-3, 0.005e-3);
    EXPECT_NEAR(fraction, 0.1495, 0.0005);
    EXPECT_DOUBLE_EQ(r6.margin_deviation, nominal - reduced);

    const auto r2 = offset_margin_report(4, kSame, worst_at(2), c.table, c.drive, c.geometry);
    EXPECT_LT(r2.margin_deviation, r6.margin_deviation);
    EXPECT_NEAR(r2.margin_deviation / nominal, 0.0499, 0.0005);

    // micromagnetic figures sit in the same band
    const double reported = (reference::kFourDomainMinMargin - reference::kFourDomainMisalignedMargin) /
                            reference::kFourDomainMinMargin;
    EXPECT_GE(reported, 0.05);
    EXPECT_LE(reported, 0.25);
}

TEST(Misalignment, MarginShrinksWithOffset) {
    const auto c = default_characterization();
    for (int d : {4, 5}) {
        const MisalignmentAnalyzer a(d, kSame, c.table, c.drive, c.geometry);
        for (double sign : {1.0, -1.0}) {
            double prev = a.min_margin(worst_at(0));
            for (int i = 1; i <= 24; ++i) {
                const double m = a.min_margin(worst_at(sign * 0.5 * i));
                EXPECT_LE(m, prev + 1e-15) << "D=" << d << " offset " << sign * 0.5 * i;
                prev = m;
            }
        }
    }
}

TEST(Misalignment, MarginContinuousInOffset) {
    const auto c = default_characterization();
    for (auto b : kAllBorderConditions) {
        const MisalignmentAnalyzer a(4, b, c.table, c.drive, c.geometry);
        for (int i = -1199; i < 1199; i += 7) {
            const double nm = i * 0.01;
            const double step = std::abs(a.min_margin(worst_at(nm + 0.01)) - a.min_margin(worst_at(nm)));
            ASSERT_LT(step, 0.05e-3) << to_string(b) << " at " << nm << " nm";
        }
    }
}

TEST(Misalignment, ReportAgreesWithMinMargin) {
    const auto c = default_characterization();
    for (auto b : kAllBorderConditions) {
        const MisalignmentAnalyzer a(5, b, c.table, c.drive, c.geometry);
        for (double nm : {-7.5, 0.0, 4.0}) {
            EXPECT_NEAR(a.report(worst_at(nm)).min_margin, a.min_margin(worst_at(nm)), 1e-15);
        }
    }
}

TEST(MonteCarlo, DeterministicAcrossWorkerCounts) {
    const auto c = default_characterization();
    MonteCarloSpec mc;
    mc.samples = 500;
    mc.seed = 42;
    const auto a = monte_carlo_margins(4, kSame, mc, c.table, c.drive, c.geometry, 1);
    const auto b = monte_carlo_margins(4, kSame, mc, c.table, c.drive, c.geometry, 8);
    ASSERT_TRUE(a.monte_carlo && b.monte_carlo);
    for (std::size_t i = 0; i < mc.samples; ++i) {
        ASSERT_EQ(a.monte_carlo->samples[i].offset, b.monte_carlo->samples[i].offset);
        ASSERT_EQ(a.monte_carlo->samples[i].min_margin, b.monte_carlo->samples[i].min_margin);
    }
    EXPECT_EQ(a.monte_carlo->margin.mean, b.monte_carlo->margin.mean);

    mc.seed = 43;
    const auto other = monte_carlo_margins(4, kSame, mc, c.table, c.drive, c.geometry, 1);
    EXPECT_NE(other.monte_carlo->samples[0].offset, a.monte_carlo->samples[0].offset);
}

TEST(MonteCarlo, SampleStatistics) {
    const auto c = default_characterization();
    MonteCarloSpec mc;
    mc.samples = 10000;
    mc.seed = 7;
    const auto r = monte_carlo_margins(4, kSame, mc, c.table, c.drive, c.geometry, 0);
    const auto& res = *r.monte_carlo;
    EXPECT_LT(std::abs(res.offset_mean), 3 * mc.sigma / std::sqrt(static_cast<double>(mc.samples)));
    for (const auto& s : res.samples) ASSERT_LE(std::abs(s.offset), mc.truncation * mc.sigma);

    const auto at6 = offset_margin_report(4, kSame, worst_at(6), c.table, c.drive, c.geometry);
    EXPECT_GE(res.margin.min, at6.offset->perturbed_min_margin);
    EXPECT_LE(res.margin.min, res.margin.p01);
    EXPECT_LE(res.margin.p01, res.margin.mean);
    EXPECT_LE(res.margin.mean, r.nominal_min_margin);
    EXPECT_GT(res.margin.stddev, 0);
    EXPECT_DOUBLE_EQ(r.margin_deviation, r.nominal_min_margin - res.margin.min);
}

TEST(MonteCarlo, RejectsTruncationPastNotch) {
    const auto c = default_characterization();
    MonteCarloSpec mc;
    mc.sigma = nm_to_m(3);
    EXPECT_THROW(monte_carlo_margins(4, kSame, mc, c.table, c.drive, c.geometry), OffsetOutOfRange);
    mc.sigma = 0;
    EXPECT_THROW(monte_carlo_margins(4, kSame, mc, c.table, c.drive, c.geometry), Error);
}
