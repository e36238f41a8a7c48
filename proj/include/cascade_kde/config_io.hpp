#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "cascade_kde/baselines.hpp"
#include "cascade_kde/corruption.hpp"
#include "cascade_kde/restoration.hpp"

namespace cascade_kde {

/// Ordered `key = value` pairs of one section.
using KeyValues = std::vector<std::pair<std::string, std::string>>;

struct IniSection {
    std::string name;  ///< empty for keys before the first header
    KeyValues entries;
};

/// INI-style text: `[section]` headers, `key = value` lines, `;` or `#`
/// comments. Section order and key order are preserved.
[[nodiscard]] std::vector<IniSection> parse_ini(std::istream& in);
[[nodiscard]] std::vector<IniSection> parse_ini(const std::filesystem::path& path);
void write_ini(std::ostream& out, const std::vector<IniSection>& sections);

// Every reader rejects unknown keys and malformed values with ConfigError.

[[nodiscard]] RestorationConfig restoration_config_from(const KeyValues& entries);
[[nodiscard]] KeyValues to_key_values(const RestorationConfig& config);

[[nodiscard]] BaselineSpec baseline_spec_from(const KeyValues& entries);
[[nodiscard]] KeyValues to_key_values(const BaselineSpec& spec);

[[nodiscard]] CorruptionSpec corruption_spec_from(const KeyValues& entries);
[[nodiscard]] KeyValues to_key_values(const CorruptionSpec& spec);

[[nodiscard]] SyntheticSignalSpec signal_spec_from(const KeyValues& entries);
[[nodiscard]] KeyValues to_key_values(const SyntheticSignalSpec& spec);

}  // namespace cascade_kde
