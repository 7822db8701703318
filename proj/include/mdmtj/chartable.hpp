#pragma once

// Characterization data for the multi-domain MTJ compact model: the
// mini-resistor vocabulary and its ohm values, device geometry, the read
// drive, and informational material parameters. Everything is SI inside
// the library; the configuration file speaks nm and ohms.

#include <mdmtj/errors.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

namespace mdmtj {

enum class Polarity : std::uint8_t { MinusZ, PlusZ };

// Free-layer length left under the junction once 0, 1 or 2 adjacent walls
// have taken their share of the domain.
enum class LengthClass : std::uint8_t { L80, L74, L68 };

enum class SegmentKind : std::uint8_t {
    MinusZ80,
    MinusZ74,
    MinusZ68,
    PlusZ80,
    PlusZ74,
    PlusZ68,
    Wall01,         // full wall, -Z domain on the left, +Z on the right
    Wall10,         // full wall, +Z domain on the left, -Z on the right
    HalfWallMinusZ, // edge half wall of a -Z edge domain
    HalfWallPlusZ,  // edge half wall of a +Z edge domain
};

inline constexpr std::size_t kSegmentKindCount = 10;

inline constexpr std::array<SegmentKind, kSegmentKindCount> kAllSegmentKinds{
    SegmentKind::MinusZ80, SegmentKind::MinusZ74,      SegmentKind::MinusZ68,     SegmentKind::PlusZ80,
    SegmentKind::PlusZ74,  SegmentKind::PlusZ68,       SegmentKind::Wall01,       SegmentKind::Wall10,
    SegmentKind::HalfWallMinusZ, SegmentKind::HalfWallPlusZ,
};

constexpr std::size_t index_of(SegmentKind kind) noexcept { return static_cast<std::size_t>(kind); }

constexpr bool is_domain(SegmentKind kind) noexcept { return index_of(kind) < 6; }
constexpr bool is_full_wall(SegmentKind kind) noexcept {
    return kind == SegmentKind::Wall01 || kind == SegmentKind::Wall10;
}
constexpr bool is_half_wall(SegmentKind kind) noexcept {
    return kind == SegmentKind::HalfWallMinusZ || kind == SegmentKind::HalfWallPlusZ;
}

constexpr SegmentKind domain_segment(Polarity p, LengthClass c) noexcept {
    return static_cast<SegmentKind>((p == Polarity::PlusZ ? 3 : 0) + static_cast<int>(c));
}

constexpr SegmentKind half_wall(Polarity p) noexcept {
    return p == Polarity::PlusZ ? SegmentKind::HalfWallPlusZ : SegmentKind::HalfWallMinusZ;
}

// Domain kinds only.
constexpr Polarity polarity_of(SegmentKind kind) noexcept {
    return index_of(kind) >= 3 ? Polarity::PlusZ : Polarity::MinusZ;
}
constexpr LengthClass length_class_of(SegmentKind kind) noexcept {
    return static_cast<LengthClass>(index_of(kind) % 3);
}

constexpr Polarity opposite(Polarity p) noexcept {
    return p == Polarity::PlusZ ? Polarity::MinusZ : Polarity::PlusZ;
}

constexpr std::string_view name_of(SegmentKind kind) noexcept {
    constexpr std::array<std::string_view, kSegmentKindCount> names{
        "R-80", "R-74", "R-68", "R+80", "R+74", "R+68", "Rdw01", "Rdw10", "Rhdw-", "Rhdw+",
    };
    return names[index_of(kind)];
}

struct SegmentResistanceTable {
    std::array<double, kSegmentKindCount> ohms{};

    double operator[](SegmentKind kind) const noexcept { return ohms[index_of(kind)]; }
    double& operator[](SegmentKind kind) noexcept { return ohms[index_of(kind)]; }

    bool operator==(const SegmentResistanceTable&) const = default;
};

struct DeviceGeometry {
    double domain_length = 80e-9;
    double track_width = 40e-9;
    double free_layer_thickness = 2e-9;
    double notch_length = 12e-9;
    double mgo_thickness = 1e-9;

    // Junction area over one domain.
    double domain_area() const noexcept { return domain_length * track_width; }
    double mtj_length(int domains) const noexcept { return domains * domain_length; }

    bool operator==(const DeviceGeometry&) const = default;
};

struct DriveParams {
    double current_density = 3.21e10; // A/m^2

    // The current grows with the junction so that the density stays fixed.
    double read_current(int domains, double domain_area) const noexcept {
        return current_density * domains * domain_area;
    }

    bool operator==(const DriveParams&) const = default;
};

// Carried through to reports; never used in computation.
struct CharacterizationMetadata {
    std::string material = "CoFeB";
    double k_u = 99999;              // erg/cc
    double m_s = 1200;               // emu/cc
    double exchange_stiffness = 2.2; // uerg/cm
    double amr_ratio = 0.014;
    double tmr_ratio = 0.8;
    double resistivity = 15; // uOhm cm

    bool operator==(const CharacterizationMetadata&) const = default;
};

struct Characterization {
    SegmentResistanceTable table;
    DeviceGeometry geometry;
    DriveParams drive;
    CharacterizationMetadata metadata;

    bool operator==(const Characterization&) const = default;
};

inline double nm_to_m(double nm) noexcept { return nm / 1e9; }

inline SegmentResistanceTable default_segment_table() {
    SegmentResistanceTable t;
    t[SegmentKind::MinusZ80] = 1911;
    t[SegmentKind::MinusZ74] = 2048;
    t[SegmentKind::MinusZ68] = 2228;
    t[SegmentKind::PlusZ80] = 4324;
    t[SegmentKind::PlusZ74] = 4730;
    t[SegmentKind::PlusZ68] = 5143;
    t[SegmentKind::Wall01] = 20053;
    t[SegmentKind::Wall10] = 20063;
    t[SegmentKind::HalfWallMinusZ] = 35061;
    t[SegmentKind::HalfWallPlusZ] = 46196;
    return t;
}

inline DeviceGeometry default_geometry() {
    return DeviceGeometry{nm_to_m(80), nm_to_m(40), nm_to_m(2), nm_to_m(12), nm_to_m(1)};
}

inline Characterization default_characterization() {
    return Characterization{default_segment_table(), default_geometry(), DriveParams{}, CharacterizationMetadata{}};
}

// Length of free layer the segment occupies at full coverage. The three
// domain classes lose half a notch per adjacent wall.
inline double nominal_length(SegmentKind kind, const DeviceGeometry& g) noexcept {
    if (is_full_wall(kind)) return g.notch_length;
    if (is_half_wall(kind)) return g.notch_length / 2;
    switch (length_class_of(kind)) {
    case LengthClass::L80: return g.domain_length;
    case LengthClass::L74: return g.domain_length - g.notch_length / 2;
    case LengthClass::L68: return g.domain_length - g.notch_length;
    }
    return g.domain_length;
}

// Resistance of a segment only partly under the junction. Conductance is
// taken proportional to covered area, anchored at the characterized value
// for the segment's own class.
inline double scaled_resistance(SegmentKind kind, double covered_length, const SegmentResistanceTable& table,
                                const DeviceGeometry& geometry) {
    if (!(covered_length > 0)) {
        throw DegenerateCoverage("covered length must be positive for " + std::string(name_of(kind)));
    }
    return table[kind] * (nominal_length(kind, geometry) / covered_length);
}

// Mirror image of a table under reversal of the reading direction.
inline SegmentResistanceTable swap_wall_directions(SegmentResistanceTable t) {
    std::swap(t[SegmentKind::Wall01], t[SegmentKind::Wall10]);
    return t;
}

// Table seen by the bit-complemented device: every -Z entry exchanged with
// its +Z counterpart, wall directions exchanged.
inline SegmentResistanceTable swap_polarities(SegmentResistanceTable t) {
    for (auto c : {LengthClass::L80, LengthClass::L74, LengthClass::L68}) {
        std::swap(t[domain_segment(Polarity::MinusZ, c)], t[domain_segment(Polarity::PlusZ, c)]);
    }
    std::swap(t[SegmentKind::Wall01], t[SegmentKind::Wall10]);
    std::swap(t[SegmentKind::HalfWallMinusZ], t[SegmentKind::HalfWallPlusZ]);
    return t;
}

// ---------------------------------------------------------------------------
// Configuration file
// ---------------------------------------------------------------------------

namespace detail {

enum class FieldUnit { Ohm, Nanometer, AmperePerSquareMeter, Passthrough, Text };

struct ConfigField {
    std::string_view key;
    FieldUnit unit;
};

inline constexpr std::array<ConfigField, 23> kConfigFields{{
    {"r_minus_80", FieldUnit::Ohm},
    {"r_minus_74", FieldUnit::Ohm},
    {"r_minus_68", FieldUnit::Ohm},
    {"r_plus_80", FieldUnit::Ohm},
    {"r_plus_74", FieldUnit::Ohm},
    {"r_plus_68", FieldUnit::Ohm},
    {"r_dw_01", FieldUnit::Ohm},
    {"r_dw_10", FieldUnit::Ohm},
    {"r_hdw_minus", FieldUnit::Ohm},
    {"r_hdw_plus", FieldUnit::Ohm},
    {"domain_length_nm", FieldUnit::Nanometer},
    {"track_width_nm", FieldUnit::Nanometer},
    {"notch_length_nm", FieldUnit::Nanometer},
    {"free_thickness_nm", FieldUnit::Nanometer},
    {"mgo_thickness_nm", FieldUnit::Nanometer},
    {"j_c_a_per_m2", FieldUnit::AmperePerSquareMeter},
    {"material", FieldUnit::Text},
    {"k_u", FieldUnit::Passthrough},
    {"m_s", FieldUnit::Passthrough},
    {"exchange_stiffness", FieldUnit::Passthrough},
    {"amr_ratio", FieldUnit::Passthrough},
    {"tmr_ratio", FieldUnit::Passthrough},
    {"resistivity", FieldUnit::Passthrough},
}};

// Resistance keys are listed in SegmentKind order.
inline std::string_view resistance_key(SegmentKind kind) { return kConfigFields[index_of(kind)].key; }

inline double* numeric_field(Characterization& c, std::string_view key) {
    for (auto kind : kAllSegmentKinds) {
        if (resistance_key(kind) == key) return &c.table[kind];
    }
    if (key == "domain_length_nm") return &c.geometry.domain_length;
    if (key == "track_width_nm") return &c.geometry.track_width;
    if (key == "notch_length_nm") return &c.geometry.notch_length;
    if (key == "free_thickness_nm") return &c.geometry.free_layer_thickness;
    if (key == "mgo_thickness_nm") return &c.geometry.mgo_thickness;
    if (key == "j_c_a_per_m2") return &c.drive.current_density;
    if (key == "k_u") return &c.metadata.k_u;
    if (key == "m_s") return &c.metadata.m_s;
    if (key == "exchange_stiffness") return &c.metadata.exchange_stiffness;
    if (key == "amr_ratio") return &c.metadata.amr_ratio;
    if (key == "tmr_ratio") return &c.metadata.tmr_ratio;
    if (key == "resistivity") return &c.metadata.resistivity;
    return nullptr;
}

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

inline std::optional<double> parse_double(std::string_view text) {
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) return std::nullopt;
    return value;
}

// Shortest decimal that reads back to the same double.
inline std::string format_exact(double v) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

// Decimal nm text whose ingestion reproduces `meters` exactly.
inline std::string format_nm(double meters) {
    double candidate = meters * 1e9;
    if (nm_to_m(candidate) == meters) return format_exact(candidate);
    double down = candidate;
    double up = candidate;
    for (int step = 0; step < 64; ++step) {
        down = std::nextafter(down, -INFINITY);
        up = std::nextafter(up, INFINITY);
        if (nm_to_m(down) == meters) return format_exact(down);
        if (nm_to_m(up) == meters) return format_exact(up);
    }
    return format_exact(candidate);
}

} // namespace detail

// Checks every characterization invariant. `explicit_keys` steers which key
// is named when an ordering rule between two keys is broken.
inline void validate(const Characterization& c, const std::set<std::string, std::less<>>& explicit_keys = {}) {
    using detail::resistance_key;
    auto blame = [&](std::string_view a, std::string_view b) {
        if (!explicit_keys.contains(a) && explicit_keys.contains(b)) return std::string(b);
        return std::string(a);
    };
    auto num = [](double v) { return detail::format_exact(v); };

    for (auto kind : kAllSegmentKinds) {
        if (!(c.table[kind] > 0)) {
            throw ConfigInvariantError(std::string(resistance_key(kind)), "resistance must be positive");
        }
    }
    for (auto p : {Polarity::MinusZ, Polarity::PlusZ}) {
        const std::array classes{LengthClass::L80, LengthClass::L74, LengthClass::L68};
        for (std::size_t i = 0; i + 1 < classes.size(); ++i) {
            const auto longer = domain_segment(p, classes[i]);
            const auto shorter = domain_segment(p, classes[i + 1]);
            if (!(c.table[longer] < c.table[shorter])) {
                throw ConfigInvariantError(blame(resistance_key(longer), resistance_key(shorter)),
                                           std::string(resistance_key(longer)) + " (" + num(c.table[longer]) +
                                               ") must be below " + std::string(resistance_key(shorter)) + " (" +
                                               num(c.table[shorter]) + ")");
            }
        }
    }
    for (auto cls : {LengthClass::L80, LengthClass::L74, LengthClass::L68}) {
        const auto lo = domain_segment(Polarity::MinusZ, cls);
        const auto hi = domain_segment(Polarity::PlusZ, cls);
        if (!(c.table[hi] > c.table[lo])) {
            throw ConfigInvariantError(blame(resistance_key(hi), resistance_key(lo)),
                                       std::string(resistance_key(hi)) + " (" + num(c.table[hi]) +
                                           ") must exceed " + std::string(resistance_key(lo)) + " (" +
                                           num(c.table[lo]) + ")");
        }
    }

    const std::array<std::pair<std::string_view, double>, 5> dims{{
        {"domain_length_nm", c.geometry.domain_length},
        {"track_width_nm", c.geometry.track_width},
        {"notch_length_nm", c.geometry.notch_length},
        {"free_thickness_nm", c.geometry.free_layer_thickness},
        {"mgo_thickness_nm", c.geometry.mgo_thickness},
    }};
    for (const auto& [key, value] : dims) {
        if (!(value > 0)) throw ConfigInvariantError(std::string(key), "dimension must be positive");
    }
    if (!(c.geometry.notch_length < c.geometry.domain_length)) {
        throw ConfigInvariantError(blame("notch_length_nm", "domain_length_nm"),
                                   "notch must be shorter than a domain");
    }
    if (!(c.drive.current_density > 0)) {
        throw ConfigInvariantError("j_c_a_per_m2", "current density must be positive");
    }
}

// Reads `key = value` lines over the built-in defaults.
inline Characterization parse_config(std::istream& in) {
    Characterization c = default_characterization();
    std::set<std::string, std::less<>> seen;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigParseError(line_no, "", "expected 'key = value'");
        const auto key = detail::trim(line.substr(0, eq));
        const auto value = detail::trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigParseError(line_no, "", "missing key");

        const auto field = std::find_if(detail::kConfigFields.begin(), detail::kConfigFields.end(),
                                        [&](const detail::ConfigField& f) { return f.key == key; });
        if (field == detail::kConfigFields.end()) {
            throw ConfigParseError(line_no, std::string(key), "unknown key");
        }
        if (seen.contains(key)) throw ConfigParseError(line_no, std::string(key), "duplicate key");
        seen.emplace(key);
        if (value.empty()) throw ConfigParseError(line_no, std::string(key), "missing value");

        if (field->unit == detail::FieldUnit::Text) {
            c.metadata.material = std::string(value);
            continue;
        }
        const auto number = detail::parse_double(value);
        if (!number) {
            throw ConfigParseError(line_no, std::string(key), "non-numeric value '" + std::string(value) + "'");
        }
        *detail::numeric_field(c, key) = field->unit == detail::FieldUnit::Nanometer ? nm_to_m(*number) : *number;
    }
    validate(c, seen);
    return c;
}

inline Characterization load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigParseError(0, "", "cannot open configuration file '" + path + "'");
    return parse_config(in);
}

// Effective configuration as ordered key/value text, in file units.
inline std::vector<std::pair<std::string, std::string>> config_entries(const Characterization& c) {
    std::vector<std::pair<std::string, std::string>> out;
    Characterization copy = c;
    for (const auto& field : detail::kConfigFields) {
        std::string value;
        switch (field.unit) {
        case detail::FieldUnit::Text: value = c.metadata.material; break;
        case detail::FieldUnit::Nanometer: value = detail::format_nm(*detail::numeric_field(copy, field.key)); break;
        default: value = detail::format_exact(*detail::numeric_field(copy, field.key)); break;
        }
        out.emplace_back(std::string(field.key), std::move(value));
    }
    return out;
}

inline std::string serialize_config(const Characterization& c) {
    std::ostringstream os;
    for (const auto& [key, value] : config_entries(c)) os << key << " = " << value << '\n';
    return os.str();
}

} // namespace mdmtj
