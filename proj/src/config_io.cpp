#include "cascade_kde/config_io.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>

#include "cascade_kde/csv.hpp"
#include "cascade_kde/errors.hpp"

namespace cascade_kde {
namespace {

double to_double(const std::string& key, const std::string& value) {
    try {
        return parse_number(value);
    } catch (const InvalidInput&) {
        throw ConfigError("key '" + key + "': expected a number, got '" + value + "'");
    }
}

template <typename Int>
Int to_integer(const std::string& key, const std::string& value) {
    Int out{};
    const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (value.empty() || ec != std::errc{} || end != value.data() + value.size()) {
        throw ConfigError("key '" + key + "': expected an integer, got '" + value + "'");
    }
    return out;
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    throw ConfigError("key '" + key + "': expected true/false, got '" + value + "'");
}

std::string text(bool b) { return b ? "true" : "false"; }
std::string text(double d) { return format_number(d); }
std::string text(int i) { return std::to_string(i); }
std::string text(std::uint64_t u) { return std::to_string(u); }
std::string text(Eigen::Index i) { return std::to_string(i); }

using Setter = std::function<void(const std::string& key, const std::string& value)>;

void apply(const KeyValues& entries, const std::map<std::string, Setter, std::less<>>& setters,
           const char* what) {
    for (const auto& [key, value] : entries) {
        const auto it = setters.find(key);
        if (it == setters.end()) {
            throw ConfigError(std::string(what) + ": unknown key '" + key + "'");
        }
        it->second(key, value);
    }
}

template <typename T, typename F>
T wrap_invalid(F&& f) {
    try {
        return f();
    } catch (const InvalidInput& e) {
        throw ConfigError(e.what());
    }
}

}  // namespace

std::vector<IniSection> parse_ini(std::istream& in) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError("config: line " + std::to_string(e.line()) + ": " + e.message());
    }
    std::vector<IniSection> sections;
    IniSection root;
    for (const auto& [name, node] : tree) {
        if (node.empty()) {
            root.entries.emplace_back(name, node.data());
            continue;
        }
        IniSection section{name, {}};
        for (const auto& [key, child] : node) section.entries.emplace_back(key, child.data());
        sections.push_back(std::move(section));
    }
    if (!root.entries.empty()) sections.insert(sections.begin(), std::move(root));
    return sections;
}

std::vector<IniSection> parse_ini(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    return parse_ini(in);
}

void write_ini(std::ostream& out, const std::vector<IniSection>& sections) {
    bool first = true;
    for (const auto& section : sections) {
        if (!section.name.empty()) {
            if (!first) out << '\n';
            out << '[' << section.name << "]\n";
        }
        for (const auto& [key, value] : section.entries) out << key << " = " << value << '\n';
        first = false;
    }
}

RestorationConfig restoration_config_from(const KeyValues& entries) {
    RestorationConfig c;
    auto& v = c.variant;
    const std::map<std::string, Setter, std::less<>> setters{
        {"bw0", [&](auto& k, auto& s) { c.bw0 = to_double(k, s); }},
        {"bw_step", [&](auto& k, auto& s) { c.bw_step = to_double(k, s); }},
        {"k_max", [&](auto& k, auto& s) { c.k_max = to_integer<int>(k, s); }},
        {"lambda", [&](auto& k, auto& s) { c.lambda = to_double(k, s); }},
        {"iqr_multiplier", [&](auto& k, auto& s) { c.iqr_multiplier = to_double(k, s); }},
        {"r_t_factor", [&](auto& k, auto& s) { c.r_t_factor = to_double(k, s); }},
        {"stop_patience", [&](auto& k, auto& s) { c.stop_patience = to_integer<int>(k, s); }},
        {"grid_size", [&](auto& k, auto& s) { c.grid_size = to_integer<int>(k, s); }},
        {"fixed_grid_lower", [&](auto& k, auto& s) { c.fixed_grid_lower = to_double(k, s); }},
        {"fixed_grid_upper", [&](auto& k, auto& s) { c.fixed_grid_upper = to_double(k, s); }},
        {"data_driven_bandwidth", [&](auto& k, auto& s) { c.data_driven_bandwidth = to_bool(k, s); }},
        {"threads", [&](auto& k, auto& s) { c.threads = to_integer<int>(k, s); }},
        {"no_truncation", [&](auto& k, auto& s) { v.no_truncation = to_bool(k, s); }},
        {"no_padding", [&](auto& k, auto& s) { v.no_padding = to_bool(k, s); }},
        {"fixed_grid", [&](auto& k, auto& s) { v.fixed_grid = to_bool(k, s); }},
        {"fixed_bandwidth", [&](auto& k, auto& s) { v.fixed_bandwidth = to_bool(k, s); }},
        {"one_dimensional", [&](auto& k, auto& s) { v.one_dimensional = to_bool(k, s); }},
        {"fixed_k", [&](auto& k, auto& s) { v.fixed_k = to_integer<int>(k, s); }},
        {"random_k", [&](auto& k, auto& s) { v.random_k_seed = to_integer<std::uint64_t>(k, s); }},
    };
    apply(entries, setters, "restoration config");
    c.validate();
    return c;
}

KeyValues to_key_values(const RestorationConfig& c) {
    KeyValues kv{
        {"bw0", text(c.bw0)},
        {"bw_step", text(c.bw_step)},
        {"k_max", text(c.k_max)},
        {"lambda", text(c.lambda)},
        {"iqr_multiplier", text(c.iqr_multiplier)},
        {"r_t_factor", text(c.r_t_factor)},
        {"stop_patience", text(c.stop_patience)},
        {"fixed_grid_lower", text(c.fixed_grid_lower)},
        {"fixed_grid_upper", text(c.fixed_grid_upper)},
        {"data_driven_bandwidth", text(c.data_driven_bandwidth)},
        {"threads", text(c.threads)},
        {"no_truncation", text(c.variant.no_truncation)},
        {"no_padding", text(c.variant.no_padding)},
        {"fixed_grid", text(c.variant.fixed_grid)},
        {"fixed_bandwidth", text(c.variant.fixed_bandwidth)},
        {"one_dimensional", text(c.variant.one_dimensional)},
    };
    if (c.grid_size) kv.emplace_back("grid_size", text(*c.grid_size));
    if (c.variant.fixed_k) kv.emplace_back("fixed_k", text(*c.variant.fixed_k));
    if (c.variant.random_k_seed) kv.emplace_back("random_k", text(*c.variant.random_k_seed));
    return kv;
}

BaselineSpec baseline_spec_from(const KeyValues& entries) {
    BaselineSpec b;
    const std::map<std::string, Setter, std::less<>> setters{
        {"kind", [&](auto&, auto& s) { b.kind = baseline_kind_from_string(s); }},
        {"window", [&](auto& k, auto& s) { b.window = to_integer<int>(k, s); }},
        {"polyorder", [&](auto& k, auto& s) { b.polyorder = to_integer<int>(k, s); }},
        {"sigma", [&](auto& k, auto& s) { b.sigma = to_double(k, s); }},
        {"trim", [&](auto& k, auto& s) { b.trim = to_double(k, s); }},
        {"hampel_threshold", [&](auto& k, auto& s) { b.hampel_threshold = to_double(k, s); }},
        {"bandwidth", [&](auto& k, auto& s) { b.bandwidth = to_double(k, s); }},
    };
    apply(entries, setters, "baseline spec");
    b.validate();
    return b;
}

KeyValues to_key_values(const BaselineSpec& b) {
    return {
        {"kind", to_string(b.kind)},
        {"window", text(b.window)},
        {"polyorder", text(b.polyorder)},
        {"sigma", text(b.sigma)},
        {"trim", text(b.trim)},
        {"hampel_threshold", text(b.hampel_threshold)},
        {"bandwidth", text(b.bandwidth)},
    };
}

CorruptionSpec corruption_spec_from(const KeyValues& entries) {
    CorruptionSpec c;
    const std::map<std::string, Setter, std::less<>> setters{
        {"kind", [&](auto&, auto& s) {
             c.kind = wrap_invalid<CorruptionKind>([&] { return corruption_kind_from_string(s); });
         }},
        {"sigma", [&](auto& k, auto& s) { c.sigma = to_double(k, s); }},
        {"ratio", [&](auto& k, auto& s) { c.ratio = to_double(k, s); }},
        {"amplitude", [&](auto& k, auto& s) { c.amplitude = to_double(k, s); }},
        {"seed", [&](auto& k, auto& s) { c.seed = to_integer<std::uint64_t>(k, s); }},
        {"clip_impulses", [&](auto& k, auto& s) { c.clip_impulses = to_bool(k, s); }},
    };
    apply(entries, setters, "corruption spec");
    wrap_invalid<int>([&] {
        c.validate();
        return 0;
    });
    return c;
}

KeyValues to_key_values(const CorruptionSpec& c) {
    return {
        {"kind", to_string(c.kind)},
        {"sigma", text(c.sigma)},
        {"ratio", text(c.ratio)},
        {"amplitude", text(c.amplitude)},
        {"seed", text(c.seed)},
        {"clip_impulses", text(c.clip_impulses)},
    };
}

SyntheticSignalSpec signal_spec_from(const KeyValues& entries) {
    SyntheticSignalSpec s;
    const std::map<std::string, Setter, std::less<>> setters{
        {"signal", [&](auto&, auto& v) {
             s.kind = wrap_invalid<SignalKind>([&] { return signal_kind_from_string(v); });
         }},
        {"length", [&](auto& k, auto& v) { s.length = to_integer<Eigen::Index>(k, v); }},
        {"frequency", [&](auto& k, auto& v) { s.frequency = to_double(k, v); }},
        {"peak_count", [&](auto& k, auto& v) { s.peak_count = to_integer<int>(k, v); }},
        {"decay_rate", [&](auto& k, auto& v) { s.decay_rate = to_double(k, v); }},
        {"knee", [&](auto& k, auto& v) { s.knee = to_double(k, v); }},
    };
    apply(entries, setters, "signal spec");
    wrap_invalid<int>([&] {
        s.validate();
        return 0;
    });
    return s;
}

KeyValues to_key_values(const SyntheticSignalSpec& s) {
    return {
        {"signal", to_string(s.kind)},
        {"length", text(s.length)},
        {"frequency", text(s.frequency)},
        {"peak_count", text(s.peak_count)},
        {"decay_rate", text(s.decay_rate)},
        {"knee", text(s.knee)},
    };
}

}  // namespace cascade_kde
