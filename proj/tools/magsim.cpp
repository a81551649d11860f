#include "magsim/config.hpp"
#include "magsim/error.hpp"
#include "magsim/experiment.hpp"
#include "magsim/table.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;

// One line per failure on stderr: key=value fields, message last.
int report(const magsim::Error& e)
{
    const bool numerical = e.kind() == magsim::ErrorKind::numerical;
    const char* kind = numerical ? "numerical" : e.kind() == magsim::ErrorKind::io ? "io" : "config";
    std::cerr << "magsim: error kind=" << kind << " type=" << e.name();
    if (const auto* pe = dynamic_cast<const magsim::ParseError*>(&e))
        std::cerr << " line=" << pe->line() << " column=" << pe->column();
    std::cerr << " message=\"" << e.what() << "\"\n";
    return numerical ? kNumericalError : kConfigError;
}

struct RunArgs {
    std::string config;
    std::vector<std::string> sets;
    std::string out;
};

magsim::ConfigMap gather(const RunArgs& a)
{
    magsim::ConfigMap map;
    if (!a.config.empty()) map = magsim::read_config_file(a.config);
    for (const auto& s : a.sets) magsim::apply_override(map, s);
    return map;
}

void emit(const magsim::ResultTable& t, const std::string& path)
{
    if (path.empty() || path == "-")
        magsim::write_csv(std::cout, t);
    else
        magsim::write_output(t, path);
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Sensor-ancilla DC magnetometry simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", magsim::version());

    RunArgs args;
    auto add_common = [&](CLI::App* sub, bool with_out) {
        sub->add_option("--config,-c", args.config, "configuration file");
        sub->add_option("--set,-s", args.sets, "override, section.key=value")->take_all();
        if (with_out) sub->add_option("--out,-o", args.out, "output CSV, - for stdout");
    };

    std::vector<std::pair<CLI::App*, magsim::Mode>> runs;
    for (magsim::Mode m : magsim::all_modes()) {
        auto* sub = app.add_subcommand(magsim::mode_name(m), std::string("run ") + magsim::mode_name(m));
        add_common(sub, true);
        runs.emplace_back(sub, m);
    }
    auto* validate = app.add_subcommand("validate", "check a configuration and print its hash");
    add_common(validate, false);
    app.add_subcommand("defaults", "print every key with its default");
    std::string replay_path;
    auto* replay = app.add_subcommand("replay", "re-run from the metadata of an emitted CSV");
    replay->add_option("table", replay_path, "CSV written by magsim")->required();
    replay->add_option("--out,-o", args.out, "output CSV, - for stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "magsim: error kind=config type=UsageError message=\"" << e.what() << "\"\n";
        return kConfigError;
    }

    try {
        if (app.got_subcommand("defaults")) {
            std::cout << magsim::defaults_text();
            return kOk;
        }
        if (validate->parsed()) {
            const auto cfg = magsim::build_config(gather(args));
            char buf[17];
            std::snprintf(buf, sizeof buf, "%016llx",
                          static_cast<unsigned long long>(magsim::config_hash(cfg)));
            std::cout << "ok mode=" << magsim::mode_name(cfg.mode) << " config_hash=" << buf
                      << " delta_MHz=" << cfg.delta() << '\n';
            return kOk;
        }
        if (replay->parsed()) {
            const auto cfg = magsim::build_config(
                magsim::config_from_metadata(magsim::read_table(replay_path)));
            emit(magsim::run_experiment(cfg), args.out);
            return kOk;
        }
        for (const auto& [sub, mode] : runs) {
            if (!sub->parsed()) continue;
            auto map = gather(args);
            map["run.mode"] = magsim::mode_name(mode);
            const auto cfg = magsim::build_config(map);
            emit(magsim::run_experiment(cfg), args.out.empty() ? cfg.output : args.out);
            return kOk;
        }
    } catch (const magsim::Error& e) {
        return report(e);
    } catch (const std::exception& e) {
        std::cerr << "magsim: error kind=numerical type=Unexpected message=\"" << e.what() << "\"\n";
        return kNumericalError;
    }
    return kOk;
}
