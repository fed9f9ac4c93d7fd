#include "hnm/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace hnm {

namespace {

bool contains(const std::vector<std::string>& v, const std::string& s) {
    return std::find(v.begin(), v.end(), s) != v.end();
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v))
        throw Error(ErrorCode::Config, "key '" + key + "': expected a number, got '" + text + "'");
    return v;
}

}  // namespace

std::vector<double> parse_list(const std::string& text) {
    std::string t = text;
    std::replace(t.begin(), t.end(), ',', ' ');
    std::istringstream in(t);
    std::vector<double> out;
    std::string tok;
    while (in >> tok) out.push_back(to_double("list", tok));
    return out;
}

const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> s{"henon",   "family-check", "cross-form", "classify",
                                            "cascade", "atlas2d",      "resonance",  "rescale-verify"};
    return s;
}

const std::vector<std::string>& family_keys() {
    static const std::vector<std::string> s{"recipe", "lambda", "beta", "x_plus", "y_minus", "n0", "c", "p",
                                            "q",      "g1",     "g2",   "h2",     "mu",      "alpha", "s0"};
    return s;
}

const std::vector<std::string>& output_keys() {
    static const std::vector<std::string> s{"dir", "formats"};
    return s;
}

const std::vector<std::string>& experiment_keys(const std::string& sub) {
    static const std::map<std::string, std::vector<std::string>> table{
        {"henon", {"M", "m_min", "m_max", "m_points"}},
        {"family-check", {"samples"}},
        {"cross-form", {"k_min", "k_max", "samples"}},
        {"classify", {"k_min", "k_max", "window", "alpha_offset"}},
        {"cascade", {"k_min", "k_max", "phi_points"}},
        {"atlas2d", {"k_min", "k_max", "alpha_eps", "alpha_points"}},
        {"resonance", {"k_min", "k_max"}},
        {"rescale-verify", {"k_min", "k_max", "M"}},
    };
    const auto it = table.find(sub);
    if (it == table.end()) throw Error(ErrorCode::Config, "unknown subcommand '" + sub + "'");
    return it->second;
}

RunConfig RunConfig::parse(const std::string& ini_text) {
    RunConfig cfg;
    if (trim(ini_text).empty()) return cfg;
    boost::property_tree::ptree tree;
    try {
        std::istringstream in(ini_text);
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw Error(ErrorCode::Config, std::string("config parse error: ") + e.what());
    }
    for (const auto& [section, body] : tree) {
        std::map<std::string, std::string>* dst = nullptr;
        if (section == "family") dst = &cfg.family;
        else if (section == "experiment") dst = &cfg.experiment;
        else if (section == "output") dst = &cfg.output;
        else throw Error(ErrorCode::Config, "unknown config section '" + section + "'");
        for (const auto& [key, value] : body) (*dst)[key] = trim(value.data());
    }
    return cfg;
}

void RunConfig::apply_override(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw Error(ErrorCode::Config, "override '" + assignment + "' is not of the form key=value");
    std::string key = trim(assignment.substr(0, eq));
    const std::string value = trim(assignment.substr(eq + 1));
    const auto dot = key.find('.');
    if (dot != std::string::npos) {
        const std::string section = key.substr(0, dot);
        key = key.substr(dot + 1);
        if (section == "family") family[key] = value;
        else if (section == "experiment") experiment[key] = value;
        else if (section == "output") output[key] = value;
        else throw Error(ErrorCode::Config, "unknown config section '" + section + "'");
        return;
    }
    if (contains(family_keys(), key)) family[key] = value;
    else if (contains(output_keys(), key)) output[key] = value;
    else experiment[key] = value;
}

void RunConfig::validate(const std::string& sub) const {
    const auto& ek = experiment_keys(sub);
    for (const auto& [k, v] : family)
        if (!contains(family_keys(), k)) throw Error(ErrorCode::Config, "unknown [family] key '" + k + "'");
    for (const auto& [k, v] : output)
        if (!contains(output_keys(), k)) throw Error(ErrorCode::Config, "unknown [output] key '" + k + "'");
    for (const auto& [k, v] : experiment)
        if (!contains(ek, k))
            throw Error(ErrorCode::Config, "unknown [experiment] key '" + k + "' for subcommand " + sub);
    for (const auto& [k, v] : family) {
        if (k == "recipe") recipe_from_name(v);
        else if (k == "beta" || k == "p" || k == "q") parse_list(v);
        else to_double(k, v);
    }
    for (const auto& [k, v] : experiment) to_double(k, v);
    if (has(output, "formats")) {
        std::string f = output.at("formats");
        std::replace(f.begin(), f.end(), ',', ' ');
        std::istringstream in(f);
        std::string tok;
        while (in >> tok)
            if (tok != "json" && tok != "csv" && tok != "svg")
                throw Error(ErrorCode::Config, "unknown output format '" + tok + "'");
    }
}

double RunConfig::number(const std::map<std::string, std::string>& sec, const std::string& key, double fallback) const {
    const auto it = sec.find(key);
    return it == sec.end() ? fallback : to_double(key, it->second);
}

int RunConfig::integer(const std::map<std::string, std::string>& sec, const std::string& key, int fallback) const {
    const double v = number(sec, key, fallback);
    if (v != std::floor(v) || std::abs(v) > 1e6) throw Error(ErrorCode::Config, "key '" + key + "': expected an integer");
    return static_cast<int>(v);
}

std::vector<double> RunConfig::list(const std::map<std::string, std::string>& sec, const std::string& key,
                                    const std::vector<double>& fallback) const {
    const auto it = sec.find(key);
    return it == sec.end() ? fallback : parse_list(it->second);
}

FamilyHandle family_from_config(const RunConfig& cfg) {
    const auto& f = cfg.family;
    LocalMapParams local;
    local.lambda = cfg.number(f, "lambda", 0.5);
    local.beta = cfg.list(f, "beta", {});
    RecipeSpec r;
    r.kind = recipe_from_name(f.count("recipe") ? f.at("recipe") : "henon-like");
    r.x_plus = cfg.number(f, "x_plus", 1.0);
    r.y_minus = cfg.number(f, "y_minus", 1.0);
    r.n0 = cfg.integer(f, "n0", 1);
    r.c = cfg.number(f, "c", 1.0);
    r.p = cfg.list(f, "p", {0.2});
    r.q = cfg.list(f, "q", {1.0});
    r.g1 = cfg.number(f, "g1", 0.3);
    r.g2 = cfg.number(f, "g2", 0.0);
    r.h2 = cfg.number(f, "h2", 0.1);
    FamilyHandle h = build_family(local, r, cfg.number(f, "mu", 0.0));
    if (cfg.has(f, "alpha") || cfg.has(f, "s0"))
        h = tune_to(h, cfg.number(f, "alpha", h.alpha), cfg.number(f, "s0", h.s0));
    return h;
}

}  // namespace hnm
