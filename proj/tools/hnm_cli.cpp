// hnm: command-line front end over the C API.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hnm/hnm.h"

namespace {

const std::vector<std::string> kSubcommands{"henon",   "family-check", "cross-form", "classify",
                                            "cascade", "atlas2d",      "resonance",  "rescale-verify"};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerics for conservative maps with a nonorientable homoclinic tangency"};
    app.set_version_flag("--version", std::string(hnm_version()));

    std::string sub, config_path, out_dir;
    std::vector<std::string> sets;
    int threads = 1;
    app.add_option("subcommand", sub, "One of: henon, family-check, cross-form, classify, cascade, atlas2d, resonance, rescale-verify")
        ->required()
        ->check(CLI::IsMember(kSubcommands));
    app.add_option("--config", config_path, "INI config file with [family], [experiment], [output] sections");
    app.add_option("--set", sets, "Override, key=value or section.key=value (repeatable)")->allow_extra_args(false);
    app.add_option("--out", out_dir, "Output directory (default: [output] dir, else ./out)");
    app.add_option("--threads", threads, "Worker threads for sweeps")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    std::string text;
    if (!config_path.empty()) {
        std::ifstream in(config_path, std::ios::binary);
        if (!in) {
            std::cerr << "{\"error\": {\"code\": \"config\", \"message\": \"cannot read config file\"}}\n";
            return 1;
        }
        std::ostringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }

    std::vector<const char*> ov;
    for (const auto& s : sets) ov.push_back(s.c_str());
    int exit_status = 2;
    char* envelope = nullptr;
    const hnm_status st = hnm_run(sub.c_str(), text.c_str(), ov.data(), ov.size(),
                                  out_dir.empty() ? nullptr : out_dir.c_str(), threads, &exit_status, &envelope);
    if (st != HNM_OK) {
        std::cerr << hnm_status_name(st) << ": " << hnm_last_error() << "\n";
        hnm_string_free(envelope);
        return 2;
    }
    if (exit_status == 0) {
        std::cout << sub << ": ok\n";
    } else {
        std::cerr << (envelope ? envelope : "") << std::flush;
    }
    hnm_string_free(envelope);
    return exit_status;
}
