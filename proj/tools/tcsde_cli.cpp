#include "tcsde/config.hpp"
#include "tcsde/errors.hpp"
#include "tcsde/run.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

struct Options {
    std::string config_file;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string preset;
    bool svg = false;
    std::vector<std::string> sets;
    std::optional<double> alpha;
    std::vector<double> z;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw tcsde::ParseError("", "cannot read config file '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

int execute(const std::string& command, const Options& o) {
    const std::string text = o.config_file.empty() ? std::string() : read_file(o.config_file);
    std::vector<std::pair<std::string, std::string>> overrides;
    overrides.emplace_back("run.command", command);
    if (!o.preset.empty()) {
        overrides.emplace_back("run.preset", o.preset);
    }
    for (const auto& s : o.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) {
            throw tcsde::ParseError(s, "--set expects section.key=value");
        }
        overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    if (o.seed) {
        overrides.emplace_back("mc.seed", std::to_string(*o.seed));
    }
    if (!o.out.empty()) {
        overrides.emplace_back("run.output_dir", o.out);
    }
    if (o.svg) {
        overrides.emplace_back("run.svg", "true");
    }
    if (o.alpha) {
        overrides.emplace_back("run.alpha", number(*o.alpha));
    }
    if (!o.z.empty()) {
        std::string list;
        for (double z : o.z) {
            list += (list.empty() ? "" : ",") + number(z);
        }
        overrides.emplace_back("ml.z", list);
    }

    const tcsde::RunConfig config = tcsde::parse_config(text, overrides);
    for (const auto& note : tcsde::config_notes(config)) {
        std::cerr << "note: " << note << "\n";
    }
    if (auto w = tcsde::preset_warning(config)) {
        std::cerr << "warning: " << *w << "\n";
    }
    const tcsde::OutputBundle bundle = tcsde::run(config);
    for (const auto& m : bundle.messages) {
        std::cout << m << "\n";
    }
    std::cout << "summary: " << bundle.json_summary_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Time-changed SDE toolkit: stable clocks, theta schemes, Mittag-Leffler stability"};
    app.require_subcommand(1);

    Options opts;
    const std::pair<const char*, const char*> commands[] = {
        {"path", "simulate one subordinator, its inverse and an ST/FBEM trajectory"},
        {"ml", "evaluate the Mittag-Leffler function"},
        {"moments", "Monte Carlo moments of the inverse subordinator vs closed form"},
        {"convergence", "strong error table and fitted order"},
        {"stability", "mean-square stability curves with Mittag-Leffler envelopes"},
        {"validate", "falsify a model's declared assumption constants on a grid"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", opts.config_file, "INI run configuration")
            ->check(CLI::ExistingFile);
        sub->add_option("--seed", opts.seed, "master seed");
        sub->add_option("--out", opts.out, "output directory");
        sub->add_option("--preset", opts.preset, "experiment scale")
            ->check(CLI::IsMember({"desk", "paper"}));
        sub->add_flag("--svg", opts.svg, "also render SVG figures");
        sub->add_option("--set", opts.sets, "override: section.key=value (repeatable)");
        sub->add_option("--alpha", opts.alpha, "stability index in (0, 1]");
        if (std::string(name) == "ml") {
            sub->add_option("--z", opts.z, "argument(s) of E_alpha");
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        return execute(command, opts);
    } catch (const std::exception& e) {
        std::cerr << tcsde::error_json(e).dump() << "\n";
        const bool config_error = dynamic_cast<const tcsde::ParseError*>(&e) ||
                                  dynamic_cast<const tcsde::ConfigurationError*>(&e);
        return config_error ? 2 : 1;
    }
}
