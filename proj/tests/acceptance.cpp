// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <mdmtj/mdmtj.hpp>
#include <mdmtj/oracle.hpp>

#include "reference_values.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <string>
#include <vector>

using namespace mdmtj;

namespace {

int failures = 0;

void verdict(int id, const char* name, bool ok, const std::string& detail) {
    std::printf("%s  %2d  %s: %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
    if (!ok) ++failures;
}

void sub(const char* label, bool ok, const std::string& detail) {
    std::printf("          %s %s: %s\n", ok ? "ok  " : "FAIL", label, detail.c_str());
}

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string fmt(const char* f, double a, double b) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

const BorderCondition kSame{Border::Same, Border::Same};

std::vector<BorderSelection> selections() {
    std::vector<BorderSelection> out;
    for (auto b : kAllBorderConditions) out.push_back(BorderSelection::of(b));
    out.push_back(BorderSelection::worst());
    return out;
}

void five_domain_table(const Characterization& c) {
    double worst = 0;
    std::string worst_pattern;
    for (const auto& e : reference::kFiveDomainTable) {
        const double r = pattern_resistance(BitPattern::parse(std::string(e.pattern)), kSame, c.table);
        const double dev = std::abs(r - e.ohms) / e.ohms;
        if (dev > worst) {
            worst = dev;
            worst_pattern = std::string(e.pattern);
        }
    }
    verdict(1, "five-domain resistances", worst <= 0.002,
            std::to_string(reference::kFiveDomainTable.size()) + " words, worst deviation " +
                fmt("%.3f%%", worst * 100) + " at " + worst_pattern +
                " (duplicated 11110 label in the weight-4 rows checked as 11101)");
}

void worked_example() {
    const std::string cmd = std::string(MDMTJ_CLI_PATH) + " resistance --pattern 00010";
    FILE* pipe = ::popen(cmd.c_str(), "r");
    std::string out;
    char buf[128];
    while (pipe && std::fgets(buf, sizeof buf, pipe)) out += buf;
    const int status = pipe ? ::pclose(pipe) : -1;
    const double ohms = out.empty() ? 0 : std::strtod(out.c_str(), nullptr);
    const bool ok = status == 0 && std::abs(ohms - reference::kWorkedExampleOhms) <=
                                       0.002 * reference::kWorkedExampleOhms;
    std::string shown = out;
    if (!shown.empty() && shown.back() == '\n') shown.pop_back();
    verdict(2, "worked example via CLI", ok, "`resistance --pattern 00010` printed \"" + shown + "\", expected 431.5 ohm +/-0.2%");
}

void closed_form(const Characterization& c) {
    const double d5 = closed_form_min_margin(5, c.table, c.drive, c.geometry);
    const double d6 = closed_form_min_margin(6, c.table, c.drive, c.geometry);
    const double d7 = closed_form_min_margin(7, c.table, c.drive, c.geometry);
    const bool ok = std::abs(d5 - reference::kClosedFormD5) <= 0.05e-3 &&
                    std::abs(d6 - reference::kClosedFormD6) <= 0.05e-3 &&
                    std::abs(d7 - reference::kClosedFormD7) <= 0.05e-3;
    verdict(3, "closed-form scaling", ok,
            fmt("D5 %.4f mV, ", d5 * 1e3) + fmt("D6 %.4f mV, ", d6 * 1e3) + fmt("D7 %.4f mV (+/-0.05 mV)", d7 * 1e3));
}

void closed_form_structure(const Characterization& c) {
    double worst = 0;
    for (int d = 2; d <= 10; ++d) {
        const auto terms = closed_form_terms(d, c.table);
        double one_min = INFINITY;
        double zero_max = -INFINITY;
        for (auto b : kAllBorderConditions) {
            const auto r = enumerate_levels(d, b, c.table, c.drive, c.geometry);
            one_min = std::min(one_min, r.clusters[1].min_resistance);
            zero_max = std::max(zero_max, r.clusters[0].max_resistance);
        }
        worst = std::max({worst, std::abs(terms.weight_one_min - one_min) / one_min,
                          std::abs(terms.weight_zero_max - zero_max) / zero_max});
    }
    verdict(4, "closed-form terms are enumerated extremes", worst <= 1e-12,
            "D = 2..10, four conventions, worst relative difference " + fmt("%.2e", worst));
}

void four_domain(const Characterization& c) {
    const auto r = enumerate_levels(4, kSame, c.table, c.drive, c.geometry);
    const double m = r.min_margin;
    const double rel = std::abs(m - reference::kFourDomainMinMargin) / reference::kFourDomainMinMargin;
    const bool ok = std::abs(m - 32.5e-3) <= 0.1e-3 && rel <= 0.10 && r.min_margin_pair == std::pair<int, int>{0, 1};
    verdict(5, "four-domain margin", ok,
            fmt("%.2f mV between weights 0 and 1, %.1f%% from 33.5 mV", m * 1e3, rel * 100));
}

void cluster_separation(const Characterization& c) {
    bool ok = true;
    std::string where;
    for (int d = 4; d <= 7 && ok; ++d) {
        for (const auto& sel : selections()) {
            const auto r = enumerate_levels(d, sel, c.table, c.drive, c.geometry);
            for (int w = 0; w < d; ++w) {
                if (!(r.clusters[w].max_resistance < r.clusters[w + 1].min_resistance)) {
                    ok = false;
                    where = "overlap at D=" + std::to_string(d) + " " + to_string(sel);
                }
            }
            if (sel.worst_case || sel.fixed != kSame) continue;
            for (std::size_t i = 0; i + 1 < r.adjacent_margins.size(); ++i) {
                if (!(r.adjacent_margins[i].margin < r.adjacent_margins[i + 1].margin)) {
                    ok = false;
                    where = "margin not increasing at D=" + std::to_string(d);
                }
            }
        }
    }
    verdict(6, "cluster separation", ok,
            ok ? "D = 4..7 clusters disjoint under every convention, same,same margins increase with weight" : where);
}

void oracle_equivalence(const Characterization& c) {
    double worst = 0;
    std::size_t words = 0;
    for (int n = 1; n <= oracle::kMaxOracleDomains; ++n) {
        for (std::uint32_t v = 0; v < (1u << n); ++v) {
            const BitPattern p(n, v);
            for (auto b : kAllBorderConditions) {
                const double exact = oracle::to_double(oracle::exact_pattern_resistance(p, b, c.table));
                worst = std::max(worst, std::abs(pattern_resistance(p, b, c.table) - exact) / exact);
                ++words;
            }
        }
    }
    const bool sums_ok = worst <= 1e-9;

    std::string mismatch;
    for (int d = 1; d <= oracle::kMaxOracleDomains && mismatch.empty(); ++d) {
        for (const auto& sel : selections()) {
            const auto diff = oracle::compare_reports(enumerate_levels(d, sel, c.table, c.drive, c.geometry),
                                                      oracle::brute_force_report(d, sel, c.table, c.drive, c.geometry));
            if (diff) {
                mismatch = "D=" + std::to_string(d) + " " + to_string(sel) + ": " + *diff;
                break;
            }
        }
    }

    const auto five = oracle::brute_force_report(5, BorderSelection::of(kSame), c.table, c.drive, c.geometry);
    std::set<double> distinct;
    std::size_t classes = 0;
    for (const auto& cl : five.clusters) {
        classes += cl.classes.size();
        for (const auto& rc : cl.classes) distinct.insert(rc.resistance);
    }
    const bool count_ok = distinct.size() == 18;

    verdict(7, "oracle equivalence", sums_ok && mismatch.empty() && count_ok,
            "rational sums, brute-force reports, five-domain class count");
    sub("rational vs floating point", sums_ok,
        std::to_string(words) + " words up to D=12, worst relative error " + fmt("%.2e", worst));
    sub("brute force vs enumerator", mismatch.empty(),
        mismatch.empty() ? "field-for-field equal, D = 1..12, all conventions and worst" : mismatch);
    sub("D=5 distinct resistance classes", count_ok,
        std::to_string(distinct.size()) + " distinct values (" + std::to_string(classes) +
            " segment multisets) under same,same; 18 required");
}

void symmetries(const Characterization& c) {
    const auto r = oracle::symmetry_sweep(10, c.table);
    std::string detail = std::to_string(r.cases_checked) + " cases, D <= 10, mirror and complement";
    if (r.first_violation) detail += "; first violation " + r.first_violation->pattern.to_string();
    verdict(8, "symmetries", r.passed, detail);
}

void variation(const Characterization& c) {
    bool identity = true;
    for (int n = 1; n <= 8 && identity; ++n) {
        for (std::uint32_t v = 0; v < (1u << n); ++v) {
            const BitPattern p(n, v);
            for (auto b : kAllBorderConditions) {
                const auto d = apply_misalignment(p, b, 0.0, 1, c.table, c.geometry);
                if (equivalent_resistance(d, c.table) != pattern_resistance(p, b, c.table)) identity = false;
            }
        }
    }
    const MisalignmentAnalyzer a(4, kSame, c.table, c.drive, c.geometry);
    const double nominal = enumerate_levels(4, kSame, c.table, c.drive, c.geometry).min_margin;
    const MisalignmentSpec zero{0, NeighborAssumption::WorstCase, NeighborAssumption::WorstCase};
    identity = identity && a.min_margin(zero) == nominal;

    bool monotone = true;
    double prev = nominal;
    for (int i = 1; i <= 24; ++i) {
        const double m = a.min_margin({nm_to_m(0.25 * i), NeighborAssumption::WorstCase, NeighborAssumption::WorstCase});
        if (m > prev) monotone = false;
        prev = m;
    }

    const auto r = offset_margin_report(4, kSame, {nm_to_m(6), NeighborAssumption::WorstCase,
                                                   NeighborAssumption::WorstCase},
                                        c.table, c.drive, c.geometry);
    const double reduction = r.margin_deviation / r.nominal_min_margin;
    const bool band = reduction >= 0.05 && reduction <= 0.25;
    verdict(9, "misalignment", identity && monotone && band,
            std::string("zero offset exact: ") + (identity ? "yes" : "no") + ", non-increasing on 0..6 nm: " +
                (monotone ? "yes" : "no") +
                fmt(", 6 nm reduction %.2f%% (%.2f mV", reduction * 100, r.nominal_min_margin * 1e3) +
                fmt(" -> %.2f mV), band 5..25%%", r.offset->perturbed_min_margin * 1e3));
}

void monte_carlo(const Characterization& c) {
    MonteCarloSpec mc;
    mc.samples = 1000;
    mc.seed = 20240611;
    const auto a = monte_carlo_margins(4, kSame, mc, c.table, c.drive, c.geometry, 1);
    const auto b = monte_carlo_margins(4, kSame, mc, c.table, c.drive, c.geometry, 1);
    const auto p = monte_carlo_margins(4, kSame, mc, c.table, c.drive, c.geometry, 8);
    bool same = true;
    for (const auto* other : {&b, &p}) {
        const auto& x = *a.monte_carlo;
        const auto& y = *other->monte_carlo;
        same = same && x.margin.mean == y.margin.mean && x.margin.stddev == y.margin.stddev &&
               x.margin.min == y.margin.min && x.margin.p01 == y.margin.p01 && x.offset_mean == y.offset_mean;
        for (std::size_t i = 0; i < mc.samples; ++i) {
            same = same && x.samples[i].offset == y.samples[i].offset &&
                   x.samples[i].min_margin == y.samples[i].min_margin;
        }
    }

    mc.samples = 10000;
    const auto big = monte_carlo_margins(4, kSame, mc, c.table, c.drive, c.geometry, 0);
    const double bound = 3 * mc.sigma / std::sqrt(10000.0);
    const bool centred = std::abs(big.monte_carlo->offset_mean) <= bound;
    verdict(10, "Monte Carlo determinism", same && centred,
            std::string("n=1000 repeated and at 8 workers bit-identical: ") + (same ? "yes" : "no") +
                fmt("; n=10000 offset mean %.4f nm (bound %.4f nm)", big.monte_carlo->offset_mean * 1e9, bound * 1e9));
}

} // namespace

int main() {
    const auto c = default_characterization();
    five_domain_table(c);
    worked_example();
    closed_form(c);
    closed_form_structure(c);
    four_domain(c);
    cluster_separation(c);
    oracle_equivalence(c);
    symmetries(c);
    variation(c);
    monte_carlo(c);
    std::printf("%d of 10 criteria passed\n", 10 - failures);
    return failures == 0 ? 0 : 1;
}
