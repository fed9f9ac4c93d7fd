#pragma once

// INI-style run configuration with [family], [experiment] and [output] sections.

#include <map>
#include <string>
#include <vector>

#include "hnm/model_family.hpp"

namespace hnm {

struct RunConfig {
    std::map<std::string, std::string> family;
    std::map<std::string, std::string> experiment;
    std::map<std::string, std::string> output;

    /// Empty text gives an empty config (all defaults).
    static RunConfig parse(const std::string& ini_text);

    /// "section.key=value" or "key=value"; a bare key goes to [family] or
    /// [output] when it belongs to that schema, otherwise to [experiment].
    void apply_override(const std::string& assignment);

    /// Rejects unknown keys for the given subcommand and malformed values.
    void validate(const std::string& subcommand) const;

    double number(const std::map<std::string, std::string>& sec, const std::string& key, double fallback) const;
    int integer(const std::map<std::string, std::string>& sec, const std::string& key, int fallback) const;
    std::vector<double> list(const std::map<std::string, std::string>& sec, const std::string& key,
                             const std::vector<double>& fallback) const;
    bool has(const std::map<std::string, std::string>& sec, const std::string& key) const {
        return sec.count(key) > 0;
    }
};

const std::vector<std::string>& subcommands();
const std::vector<std::string>& family_keys();
const std::vector<std::string>& output_keys();
const std::vector<std::string>& experiment_keys(const std::string& subcommand);

/// Builds (and, if alpha or s0 is given, tunes) the configured family.
FamilyHandle family_from_config(const RunConfig& cfg);

std::vector<double> parse_list(const std::string& text);

}  // namespace hnm
