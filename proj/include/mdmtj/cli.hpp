#pragma once

// Command-line front end. `run` is the whole program minus process setup,
// so it can be driven in-process.
//
// Exit codes: 0 success, 1 internal error, 2 usage or invalid argument,
// 3 configuration error.

#include <mdmtj/chartable.hpp>
#include <mdmtj/errors.hpp>
#include <mdmtj/margins.hpp>
#include <mdmtj/netmodel.hpp>
#include <mdmtj/oracle.hpp>
#include <mdmtj/variation.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace mdmtj::cli {

inline constexpr const char* kVersion = "1.0.0";

using Json = nlohmann::ordered_json;

class UsageError : public Error {
public:
    using Error::Error;
};

inline std::string fixed(double v, int digits = 2) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

inline std::string mv(double volts) { return fixed(volts * 1e3); }

inline BorderSelection parse_borders(const std::string& text, bool allow_worst) {
    if (text == "worst") {
        if (!allow_worst) throw UsageError("--borders worst is only accepted by margin and sweep");
        return BorderSelection::worst();
    }
    for (const auto b : kAllBorderConditions) {
        if (to_string(b) == text) return BorderSelection::of(b);
    }
    throw UsageError("unknown border convention '" + text +
                     "' (expected same,same, same,differ, differ,same, differ,differ or worst)");
}

inline NeighborAssumption parse_neighbors(const std::string& text) {
    if (text == "0") return NeighborAssumption::Zero;
    if (text == "1") return NeighborAssumption::One;
    if (text == "worst") return NeighborAssumption::WorstCase;
    throw UsageError("unknown neighbor assumption '" + text + "' (expected 0, 1 or worst)");
}

// Honors SOURCE_DATE_EPOCH so that machine-readable output can be made
// byte-reproducible.
inline std::string run_timestamp() {
    std::time_t t = std::time(nullptr);
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
        char* end = nullptr;
        const long long v = std::strtoll(epoch, &end, 10);
        if (end != epoch && *end == '\0') t = static_cast<std::time_t>(v);
    }
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct RunManifest {
    std::string command;
    std::vector<std::string> arguments;
    std::vector<std::pair<std::string, std::string>> configuration;
    std::string version = kVersion;
    std::optional<std::uint64_t> seed;
    std::string timestamp;

    Json to_json() const {
        Json j;
        j["command"] = command;
        j["arguments"] = arguments;
        j["version"] = version;
        j["seed"] = seed ? Json(*seed) : Json(nullptr);
        j["timestamp"] = timestamp;
        Json cfg = Json::object();
        for (const auto& [k, v] : configuration) cfg[k] = v;
        j["configuration"] = cfg;
        return j;
    }

    // CSV files carry the manifest as leading comment lines.
    std::string csv_preamble() const {
        std::ostringstream os;
        os << "# command: " << command << '\n';
        os << "# arguments:";
        for (const auto& a : arguments) os << ' ' << a;
        os << '\n';
        os << "# version: " << version << '\n';
        os << "# seed: " << (seed ? std::to_string(*seed) : "none") << '\n';
        os << "# timestamp: " << timestamp << '\n';
        for (const auto& [k, v] : configuration) os << "# config " << k << " = " << v << '\n';
        return os.str();
    }
};

namespace detail {

struct Common {
    std::string config_path;
    std::string format = "table";
    std::string out_path;
    bool oracle = false;
};

inline Characterization load(const Common& c) {
    return c.config_path.empty() ? default_characterization() : load_config(c.config_path);
}

inline RunManifest manifest(const std::string& command, const std::vector<std::string>& args,
                            const Characterization& ch, std::optional<std::uint64_t> seed = std::nullopt) {
    return RunManifest{command, args, config_entries(ch), kVersion, seed, run_timestamp()};
}

inline void emit(const Common& c, std::ostream& out, const std::string& text) {
    if (c.out_path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(c.out_path, std::ios::binary);
    if (!f) throw Error("cannot write '" + c.out_path + "'");
    f << text;
}

inline Json report_json(const MarginReport& r) {
    Json j;
    j["domains"] = r.domains;
    j["borders"] = to_string(r.borders);
    j["read_current_a"] = r.read_current;
    Json clusters = Json::array();
    for (const auto& c : r.clusters) {
        Json jc;
        jc["weight"] = c.weight;
        jc["pattern_count"] = c.pattern_count;
        jc["min_resistance_ohm"] = c.min_resistance;
        jc["max_resistance_ohm"] = c.max_resistance;
        jc["min_voltage_mv"] = c.min_voltage * 1e3;
        jc["max_voltage_mv"] = c.max_voltage * 1e3;
        Json classes = Json::array();
        for (const auto& rc : c.classes) {
            classes.push_back({{"pattern_class", rc.representative.to_string()},
                               {"borders", to_string(rc.borders)},
                               {"multiplicity", rc.multiplicity},
                               {"resistance_ohm", rc.resistance},
                               {"voltage_mv", rc.resistance * r.read_current * 1e3}});
        }
        jc["classes"] = classes;
        clusters.push_back(jc);
    }
    j["clusters"] = clusters;
    Json margins = Json::array();
    for (const auto& m : r.adjacent_margins) {
        margins.push_back({{"weight_low", m.weight_low},
                           {"weight_high", m.weight_low + 1},
                           {"r_low_max_ohm", m.low_max_resistance},
                           {"r_high_min_ohm", m.high_min_resistance},
                           {"margin_mv", m.margin * 1e3}});
    }
    j["adjacent_margins"] = margins;
    j["min_margin_mv"] = r.min_margin * 1e3;
    j["min_margin_pair"] = {r.min_margin_pair.first, r.min_margin_pair.second};
    j["distinguishable_levels"] = r.distinguishable_levels;
    return j;
}

inline std::string margins_csv(const MarginReport& r) {
    std::ostringstream os;
    os << "weight_low,weight_high,r_low_max_ohm,r_high_min_ohm,margin_mv\n";
    for (const auto& m : r.adjacent_margins) {
        os << m.weight_low << ',' << m.weight_low + 1 << ',' << fixed(m.low_max_resistance) << ','
           << fixed(m.high_min_resistance) << ',' << mv(m.margin) << '\n';
    }
    return os.str();
}

// Returns false and reports on `err` when the brute-force path disagrees.
inline bool oracle_check_report(const MarginReport& r, const Characterization& ch, std::ostream& err) {
    if (r.domains > oracle::kMaxOracleDomains) {
        err << "oracle: skipped, more than " << oracle::kMaxOracleDomains << " domains\n";
        return true;
    }
    const auto reference = oracle::brute_force_report(r.domains, r.borders, ch.table, ch.drive, ch.geometry);
    if (auto diff = oracle::compare_reports(r, reference)) {
        err << "oracle: MISMATCH " << *diff << '\n';
        return false;
    }
    err << "oracle: agree\n";
    return true;
}

} // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Multi-domain MTJ compact model: resistance, sense margins and misalignment"};
    app.name("mdmtj");
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    // Thread count never changes results, so it stays out of the manifest
    // and output is identical across parallelism levels.
    std::vector<std::string> arguments;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--workers") {
            ++i;
            continue;
        }
        if (a.rfind("--workers=", 0) == 0) continue;
        arguments.push_back(a);
    }

    detail::Common common;
    auto add_common = [&](CLI::App* sub, bool formats) {
        sub->add_option("--config", common.config_path, "characterization file (key = value)");
        sub->add_flag("--oracle", common.oracle, "cross-check against the reference path")->group("");
        if (formats) {
            sub->add_option("--format", common.format, "output format")
                ->check(CLI::IsMember({"table", "csv", "json"}));
            sub->add_option("--out", common.out_path, "write output to this file");
        }
    };

    std::string pattern_text;
    std::string borders_text = "same,same";
    int domains = 0;

    auto* resistance = app.add_subcommand("resistance", "equivalent resistance of one stored word");
    resistance->add_option("--pattern", pattern_text, "stored bits, leftmost domain first")->required();
    resistance->add_option("--borders", borders_text, "border convention");
    add_common(resistance, false);

    auto* voltage = app.add_subcommand("voltage", "sense voltage of one stored word");
    voltage->add_option("--pattern", pattern_text, "stored bits, leftmost domain first")->required();
    voltage->add_option("--borders", borders_text, "border convention");
    add_common(voltage, false);

    auto* levels = app.add_subcommand("levels", "resistance classes grouped by count of ones");
    levels->add_option("--domains", domains, "domains under the junction")->required();
    levels->add_option("--borders", borders_text, "border convention");
    add_common(levels, true);

    bool closed_form = false;
    auto* margin = app.add_subcommand("margin", "sense margins between adjacent levels");
    margin->add_option("--domains", domains, "domains under the junction")->required();
    auto* cf = margin->add_flag("--closed-form", closed_form, "closed-form worst-case 0/1 margin");
    margin->add_option("--borders", borders_text, "border convention or worst")->excludes(cf);
    add_common(margin, true);

    int from = 0;
    int to = 0;
    double threshold_mv = 0;
    unsigned workers = 0;
    auto* sweep = app.add_subcommand("sweep", "margin scaling over a range of domain counts");
    sweep->add_option("--from", from, "first domain count")->required();
    sweep->add_option("--to", to, "last domain count")->required();
    sweep->add_option("--threshold-mv", threshold_mv, "smallest margin a sense amplifier resolves")->required();
    sweep->add_option("--borders", borders_text, "convention for the enumerated column");
    sweep->add_option("--workers", workers, "threads (0 = all cores)");
    add_common(sweep, true);

    double offset_nm = 0;
    std::size_t mc_samples = 0;
    std::uint64_t seed = 0;
    std::string neighbors_text = "worst";
    auto* variation = app.add_subcommand("variation", "stack-to-notch misalignment");
    variation->add_option("--domains", domains, "domains under the junction")->required();
    auto* off = variation->add_option("--offset-nm", offset_nm, "deterministic offset in nm");
    auto* mcs = variation->add_option("--monte-carlo", mc_samples, "number of random offsets");
    auto* sd = variation->add_option("--seed", seed, "Monte Carlo seed");
    off->excludes(mcs);
    mcs->needs(sd);
    sd->needs(mcs);
    variation->add_option("--neighbors", neighbors_text, "polarity of the exposed neighbor: 0, 1 or worst");
    variation->add_option("--borders", borders_text, "border convention");
    variation->add_option("--workers", workers, "threads (0 = all cores)");
    add_common(variation, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (resistance->parsed() || voltage->parsed()) {
            const auto p = BitPattern::parse(pattern_text);
            const auto b = parse_borders(borders_text, false).fixed;
            const auto ch = detail::load(common);
            const double r = pattern_resistance(p, b, ch.table);
            if (resistance->parsed()) {
                out << fixed(r) << " ohm\n";
            } else {
                out << mv(read_current(p.size(), ch.drive, ch.geometry) * r) << " mV\n";
            }
            if (common.oracle) {
                const double exact = oracle::to_double(oracle::exact_pattern_resistance(p, b, ch.table));
                if (!oracle::close_relative(r, exact, 1e-9)) {
                    err << "oracle: MISMATCH " << r << " vs " << exact << '\n';
                    return 1;
                }
                err << "oracle: agree\n";
            }
            return 0;
        }

        if (levels->parsed()) {
            const auto sel = parse_borders(borders_text, false);
            const auto ch = detail::load(common);
            const auto report = enumerate_levels(domains, sel, ch.table, ch.drive, ch.geometry);
            std::ostringstream os;
            if (common.format == "json") {
                Json j;
                j["manifest"] = detail::manifest("levels", arguments, ch).to_json();
                j["report"] = detail::report_json(report);
                os << j.dump(2) << '\n';
            } else if (common.format == "csv") {
                os << detail::manifest("levels", arguments, ch).csv_preamble();
                os << "pattern_class,weight,multiplicity,resistance_ohm,voltage_mv\n";
                for (const auto& c : report.clusters) {
                    for (const auto& rc : c.classes) {
                        os << rc.representative.to_string() << ',' << c.weight << ',' << rc.multiplicity << ','
                           << fixed(rc.resistance) << ',' << mv(rc.resistance * report.read_current) << '\n';
                    }
                }
            } else {
                os << "domains " << domains << "  borders " << to_string(sel) << "  read current "
                   << fixed(report.read_current * 1e3, 5) << " mA\n";
                char line[128];
                std::snprintf(line, sizeof line, "%6s  %-30s  %12s  %14s  %10s\n", "weight", "pattern_class",
                              "multiplicity", "resistance_ohm", "voltage_mv");
                os << line;
                for (const auto& c : report.clusters) {
                    for (const auto& rc : c.classes) {
                        std::snprintf(line, sizeof line, "%6d  %-30s  %12llu  %14s  %10s\n", c.weight,
                                      rc.representative.to_string().c_str(),
                                      static_cast<unsigned long long>(rc.multiplicity), fixed(rc.resistance).c_str(),
                                      mv(rc.resistance * report.read_current).c_str());
                        os << line;
                    }
                }
            }
            detail::emit(common, out, os.str());
            if (common.oracle && !detail::oracle_check_report(report, ch, err)) return 1;
            return 0;
        }

        if (margin->parsed()) {
            const auto ch = detail::load(common);
            std::ostringstream os;
            if (closed_form) {
                check_domain_count(domains);
                const auto terms = closed_form_terms(domains, ch.table);
                const double m = closed_form_min_margin(domains, ch.table, ch.drive, ch.geometry);
                if (common.format == "json") {
                    Json j;
                    j["manifest"] = detail::manifest("margin", arguments, ch).to_json();
                    j["report"] = {{"domains", domains},
                                   {"borders", "worst"},
                                   {"weight_zero_max_ohm", terms.weight_zero_max},
                                   {"weight_one_min_ohm", terms.weight_one_min},
                                   {"closed_form_margin_mv", m * 1e3}};
                    os << j.dump(2) << '\n';
                } else if (common.format == "csv") {
                    os << detail::manifest("margin", arguments, ch).csv_preamble();
                    os << "weight_low,weight_high,r_low_max_ohm,r_high_min_ohm,margin_mv\n";
                    os << "0,1," << fixed(terms.weight_zero_max) << ',' << fixed(terms.weight_one_min) << ','
                       << mv(m) << '\n';
                } else {
                    os << mv(m) << " mV\n";
                }
                detail::emit(common, out, os.str());
                return 0;
            }

            const auto sel = parse_borders(borders_text, true);
            const auto report = enumerate_levels(domains, sel, ch.table, ch.drive, ch.geometry);
            if (common.format == "json") {
                Json j;
                j["manifest"] = detail::manifest("margin", arguments, ch).to_json();
                j["report"] = detail::report_json(report);
                os << j.dump(2) << '\n';
            } else if (common.format == "csv") {
                os << detail::manifest("margin", arguments, ch).csv_preamble();
                os << detail::margins_csv(report);
            } else {
                os << "domains " << domains << "  borders " << to_string(sel) << '\n';
                char line[128];
                std::snprintf(line, sizeof line, "%6s  %6s  %14s  %14s  %10s\n", "w_low", "w_high", "r_low_max_ohm",
                              "r_high_min_ohm", "margin_mv");
                os << line;
                for (const auto& m : report.adjacent_margins) {
                    std::snprintf(line, sizeof line, "%6d  %6d  %14s  %14s  %10s\n", m.weight_low,
                                  m.weight_low + 1, fixed(m.low_max_resistance).c_str(),
                                  fixed(m.high_min_resistance).c_str(), mv(m.margin).c_str());
                    os << line;
                }
                os << "min margin " << mv(report.min_margin) << " mV between weights "
                   << report.min_margin_pair.first << " and " << report.min_margin_pair.second << '\n';
                os << "distinguishable levels " << report.distinguishable_levels << " of " << domains + 1 << '\n';
                try {
                    const auto ladder = reference_ladder(report);
                    os << "reference thresholds (mV):";
                    for (double t : ladder) os << ' ' << mv(t);
                    os << '\n';
                } catch (const ClustersOverlap& e) {
                    os << "reference thresholds: none (" << e.what() << ")\n";
                }
            }
            detail::emit(common, out, os.str());
            if (common.oracle && !detail::oracle_check_report(report, ch, err)) return 1;
            return 0;
        }

        if (sweep->parsed()) {
            const auto sel = parse_borders(borders_text, true);
            const auto ch = detail::load(common);
            const auto report = sweep_domains(from, to, threshold_mv * 1e-3, ch.table, ch.drive, ch.geometry, workers);
            const std::size_t column = sweep_column(sel);
            std::ostringstream os;
            if (common.format == "json") {
                Json j;
                j["manifest"] = detail::manifest("sweep", arguments, ch).to_json();
                Json rows = Json::array();
                for (const auto& row : report.rows) {
                    Json jr;
                    jr["domains"] = row.domains;
                    jr["closed_form_margin_mv"] = row.closed_form_margin * 1e3;
                    const auto& e = row.enumerated_margin[column];
                    jr["enumerated_margin_mv"] = e ? Json(*e * 1e3) : Json(nullptr);
                    Json all = Json::object();
                    for (std::size_t k = 0; k < kSweepColumns.size(); ++k) {
                        const auto& v = row.enumerated_margin[k];
                        all[std::string(kSweepColumns[k])] = v ? Json(*v * 1e3) : Json(nullptr);
                    }
                    jr["enumerated_by_borders_mv"] = all;
                    rows.push_back(jr);
                }
                j["report"] = {{"borders", to_string(sel)},
                               {"threshold_mv", threshold_mv},
                               {"rows", rows},
                               {"max_scalable_domains", report.max_scalable_domains
                                                            ? Json(*report.max_scalable_domains)
                                                            : Json(nullptr)}};
                os << j.dump(2) << '\n';
            } else if (common.format == "csv") {
                os << detail::manifest("sweep", arguments, ch).csv_preamble();
                os << "domains,closed_form_margin_mv,enumerated_margin_mv\n";
                for (const auto& row : report.rows) {
                    const auto& e = row.enumerated_margin[column];
                    os << row.domains << ',' << mv(row.closed_form_margin) << ',' << (e ? mv(*e) : "") << '\n';
                }
            } else {
                char line[160];
                std::snprintf(line, sizeof line, "%7s  %11s  %11s  %11s  %11s  %13s  %11s\n", "domains",
                              "closed_form", "same,same", "same,differ", "differ,same", "differ,differ", "worst");
                os << line;
                for (const auto& row : report.rows) {
                    auto cell = [&](std::size_t k) {
                        const auto& v = row.enumerated_margin[k];
                        return v ? mv(*v) : std::string("-");
                    };
                    std::snprintf(line, sizeof line, "%7d  %11s  %11s  %11s  %11s  %13s  %11s\n", row.domains,
                                  mv(row.closed_form_margin).c_str(), cell(0).c_str(), cell(1).c_str(),
                                  cell(2).c_str(), cell(3).c_str(), cell(4).c_str());
                    os << line;
                }
                os << "margins in mV; threshold " << fixed(threshold_mv) << " mV; max scalable domains: "
                   << (report.max_scalable_domains ? std::to_string(*report.max_scalable_domains)
                                                   : std::string("none found"))
                   << '\n';
            }
            detail::emit(common, out, os.str());
            return 0;
        }

        if (variation->parsed()) {
            const auto b = parse_borders(borders_text, false).fixed;
            const auto neighbors = parse_neighbors(neighbors_text);
            check_domain_count(domains);
            const auto ch = detail::load(common);
            std::ostringstream os;

            if (mcs->count() > 0) {
                MonteCarloSpec mc;
                mc.samples = mc_samples;
                mc.seed = seed;
                mc.neighbors = neighbors;
                if (mc.samples < 1) throw UsageError("--monte-carlo needs at least one sample");
                const auto report = monte_carlo_margins(domains, b, mc, ch.table, ch.drive, ch.geometry, workers);
                const auto& res = *report.monte_carlo;
                const auto man = detail::manifest("variation", arguments, ch, seed);
                if (common.format == "json") {
                    Json samples = Json::array();
                    for (const auto& s : res.samples) {
                        samples.push_back({{"sample", s.index},
                                           {"delta_nm", s.offset * 1e9},
                                           {"min_margin_mv", s.min_margin * 1e3}});
                    }
                    Json j;
                    j["manifest"] = man.to_json();
                    j["report"] = {{"domains", domains},
                                   {"borders", to_string(b)},
                                   {"neighbors", to_string(neighbors)},
                                   {"samples", mc.samples},
                                   {"seed", mc.seed},
                                   {"sigma_nm", mc.sigma * 1e9},
                                   {"truncation_sigma", mc.truncation},
                                   {"nominal_min_margin_mv", report.nominal_min_margin * 1e3},
                                   {"margin_mean_mv", res.margin.mean * 1e3},
                                   {"margin_stddev_mv", res.margin.stddev * 1e3},
                                   {"margin_min_mv", res.margin.min * 1e3},
                                   {"margin_p01_mv", res.margin.p01 * 1e3},
                                   {"margin_deviation_mv", report.margin_deviation * 1e3},
                                   {"delta_mean_nm", res.offset_mean * 1e9},
                                   {"per_sample", samples}};
                    os << j.dump(2) << '\n';
                } else if (common.format == "csv") {
                    os << man.csv_preamble();
                    os << "sample,delta_nm,min_margin_mv\n";
                    for (const auto& s : res.samples) {
                        os << s.index << ',' << fixed(s.offset * 1e9, 4) << ',' << mv(s.min_margin) << '\n';
                    }
                } else {
                    os << "domains " << domains << "  borders " << to_string(b) << "  neighbors "
                       << to_string(neighbors) << "  samples " << mc.samples << "  seed " << mc.seed << '\n';
                    os << "sigma " << fixed(mc.sigma * 1e9, 4) << " nm, truncated at +/-" << fixed(mc.truncation, 1)
                       << " sigma\n";
                    os << "nominal min margin   " << mv(report.nominal_min_margin) << " mV\n";
                    os << "margin mean          " << mv(res.margin.mean) << " mV\n";
                    os << "margin stddev        " << mv(res.margin.stddev) << " mV\n";
                    os << "margin min           " << mv(res.margin.min) << " mV\n";
                    os << "margin 1st pct       " << mv(res.margin.p01) << " mV\n";
                    os << "worst deviation      " << mv(report.margin_deviation) << " mV\n";
                }
            } else {
                MisalignmentSpec spec{nm_to_m(offset_nm), neighbors, neighbors};
                const auto report = offset_margin_report(domains, b, spec, ch.table, ch.drive, ch.geometry);
                const auto& o = *report.offset;
                const double reduction =
                    report.nominal_min_margin != 0 ? report.margin_deviation / report.nominal_min_margin : 0.0;
                if (common.format == "json") {
                    Json j;
                    j["manifest"] = detail::manifest("variation", arguments, ch).to_json();
                    j["report"] = {{"domains", domains},
                                   {"borders", to_string(b)},
                                   {"neighbors", to_string(neighbors)},
                                   {"offset_nm", offset_nm},
                                   {"nominal_min_margin_mv", report.nominal_min_margin * 1e3},
                                   {"margin_positive_mv", o.margin_positive * 1e3},
                                   {"margin_negative_mv", o.margin_negative * 1e3},
                                   {"perturbed_min_margin_mv", o.perturbed_min_margin * 1e3},
                                   {"margin_deviation_mv", report.margin_deviation * 1e3},
                                   {"relative_reduction", reduction}};
                    os << j.dump(2) << '\n';
                } else if (common.format == "csv") {
                    os << detail::manifest("variation", arguments, ch).csv_preamble();
                    os << "offset_nm,nominal_margin_mv,margin_positive_mv,margin_negative_mv,"
                          "perturbed_min_margin_mv\n";
                    os << fixed(offset_nm, 4) << ',' << mv(report.nominal_min_margin) << ','
                       << mv(o.margin_positive) << ',' << mv(o.margin_negative) << ',' << mv(o.perturbed_min_margin)
                       << '\n';
                } else {
                    os << "domains " << domains << "  borders " << to_string(b) << "  neighbors "
                       << to_string(neighbors) << "  offset " << fixed(offset_nm, 4) << " nm\n";
                    os << "nominal min margin   " << mv(report.nominal_min_margin) << " mV\n";
                    os << "shifted +offset      " << mv(o.margin_positive) << " mV\n";
                    os << "shifted -offset      " << mv(o.margin_negative) << " mV\n";
                    os << "perturbed min margin " << mv(o.perturbed_min_margin) << " mV ("
                       << fixed(reduction * 100, 1) << "% below nominal)\n";
                }
            }
            detail::emit(common, out, os.str());
            return 0;
        }
    } catch (const ConfigParseError& e) {
        err << "configuration error: " << e.what() << '\n';
        return 3;
    } catch (const ConfigInvariantError& e) {
        err << "configuration error: " << e.what() << '\n';
        return 3;
    } catch (const InvalidPattern& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const DomainCountTooLarge& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const DomainCountTooSmall& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const OffsetOutOfRange& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return 1;
    }
    err << "internal error: no command ran\n";
    return 1;
}

} // namespace mdmtj::cli
