#include "magsim/config.hpp"

#include "magsim/error.hpp"
#include "magsim/format.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace magsim {

namespace {

const std::vector<std::pair<Mode, const char*>> kModes = {
    {Mode::xy8_fringe, "xy8_fringe"},   {Mode::tau_scan, "tau_scan"},
    {Mode::field_sweep, "field_sweep"}, {Mode::filter_map, "filter_map"},
    {Mode::sensitivity_table, "sensitivity_table"},
    {Mode::maytag, "maytag"},           {Mode::spinlock, "spinlock"},
    {Mode::vector, "vector"},           {Mode::interp_demo, "interp_demo"},
};

const std::vector<std::string> kSystemKeys = {"delta0", "gamma_e", "gamma_n",
                                              "q0",     "a_par",   "a_perp"};

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool valid_name(const std::string& s)
{
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return std::islower(static_cast<unsigned char>(c)) ||
               std::isdigit(static_cast<unsigned char>(c)) || c == '_';
    });
}

const ConfigKey* find_key(const std::string& name)
{
    for (const auto& k : config_keys())
        if (k.name == name) return &k;
    return nullptr;
}

bool known_section(const std::string& s)
{
    const std::string prefix = s + ".";
    for (const auto& k : config_keys())
        if (k.name.rfind(prefix, 0) == 0) return true;
    return false;
}

double to_number(const std::string& key, const std::string& v)
{
    try {
        return parse_double(v);
    } catch (const std::exception&) {
        throw ValidationError(key + ": expected a number, got '" + v + "'");
    }
}

}  // namespace

const char* mode_name(Mode m)
{
    for (const auto& [mode, name] : kModes)
        if (mode == m) return name;
    return "?";
}

Mode parse_mode(const std::string& s)
{
    for (const auto& [mode, name] : kModes)
        if (s == name) return mode;
    throw ValidationError("run.mode: unknown mode '" + s + "'");
}

const std::vector<Mode>& all_modes()
{
    static const std::vector<Mode> modes = [] {
        std::vector<Mode> m;
        for (const auto& entry : kModes) m.push_back(entry.first);
        return m;
    }();
    return modes;
}

const std::vector<ConfigKey>& config_keys()
{
    static const std::vector<ConfigKey> keys = {
        {"system.ancilla", "nitrogen14", "nitrogen14 or carbon13; selects the preset below"},
        {"system.delta0", "2870", "zero-field splitting, MHz"},
        {"system.gamma_e", "2.8", "sensor gyromagnetic ratio, MHz/G"},
        {"system.gamma_n", "-0.0003077", "ancilla gyromagnetic ratio, MHz/G"},
        {"system.q0", "-4.95", "quadrupole, MHz"},
        {"system.a_par", "-2.16", "longitudinal hyperfine, MHz"},
        {"system.a_perp", "-2.62", "transverse hyperfine, MHz"},

        {"field.delta", "141", "sensor splitting, MHz; sets b_z"},
        {"field.b_z", "", "longitudinal field, G; alternative to delta"},
        {"field.b_e", "0.2098", "applied transverse field, G"},
        {"field.b_i", "0", "intrinsic misalignment, G"},
        {"field.beta", "0", "angle between b_e and b_i, rad"},

        {"readout.ds_over_c", "17.27", "readout noise ratio; C = 0.5 / ds_over_c"},
        {"readout.c_factor", "", "readout factor C; alternative to ds_over_c"},
        {"readout.dead_time", "1.3", "us"},
        {"readout.csr_multiplier", "", "C_CSR / C; empty disables CSR"},
        {"readout.csr_dead_time", "1.3", "us"},

        {"decay.t2", "60", "us"},
        {"decay.p", "1", "stretch exponent"},
        {"decay.t2_star", "1.16", "us"},

        {"run.mode", "xy8_fringe", "default mode when the CLI names none"},
        {"run.seed", "1", "master seed"},
        {"run.output", "", "CSV path; empty writes to stdout"},
        {"run.cycles", "0", "XY8 cycles; 0 picks three fringe periods"},
        {"run.tau", "0", "pi-pulse spacing, us; 0 runs the tau scan"},
        {"run.ancilla_init", "polarized", "polarized or mixed"},
        {"run.truncation", "full", "full or manifold"},
        {"run.fit_trials", "0", "Monte-Carlo refits of the fringe; 0 skips the fit"},

        {"tau_scan.span", "0.05", "relative half-width around 1/(2|omega0|)"},
        {"tau_scan.points", "201", ""},

        {"sweep.b_e_start", "0", "G"},
        {"sweep.b_e_stop", "0.5", "G"},
        {"sweep.points", "51", ""},
        {"sweep.n_pulses", "400", "pulses at which S is evaluated"},

        {"filter.cycles", "3,8,13", "XY8 orders"},
        {"filter.f_max", "0.5", "MHz"},
        {"filter.points", "101", ""},
        {"filter.amplitude", "0.05", "tone amplitude, G"},
        {"filter.phases", "64", "phase quadrature"},
        {"filter.oracle", "false", "also inject the tone into the oracle"},
        {"filter.oracle_phases", "8", ""},

        {"sensitivity.deltas", "139,141,150,153,165,174.5", "MHz"},
        {"sensitivity.t", "60", "us"},

        {"maytag.omega_lf", "0.5", "MHz"},
        {"maytag.delta_amp", "141", "MHz"},
        {"maytag.cycles", "16", ""},
        {"maytag.tone_amplitude", "0.15", "G"},
        {"maytag.tone_phase", "0", "rad"},
        {"maytag.waveform", "square", "square or sine"},
        {"maytag.f_max_factor", "3", "sweep up to this multiple of omega_lf"},
        {"maytag.points", "61", ""},
        {"maytag.oracle", "false", "also run the oracle per frequency"},
        {"maytag.oracle_phases", "4", ""},

        {"spinlock.rabi_min", "0.5", "fraction of |omega0|"},
        {"spinlock.rabi_max", "1.5", "fraction of |omega0|"},
        {"spinlock.points", "41", ""},
        {"spinlock.lock_time", "10", "us"},
        {"spinlock.detuning_db", "0", "dB"},
        {"spinlock.t1rho", "350", "us"},
        {"spinlock.oracle", "true", ""},

        {"vector.b_par", "1", "G"},
        {"vector.b_perp", "0.819346", "G"},
        {"vector.b_perp_with_bias", "1.103725", "G"},
        {"vector.bias", "0.5", "G"},
        {"vector.bias_direction", "0", "rad"},

        {"interp.window", "0.001", "timing resolution, us"},
        {"interp.slices", "16", ""},
        {"interp.orders", "8,16,32,48,64", "XY8 orders of the chevron"},
    };
    return keys;
}

ConfigMap parse_config(const std::string& text)
{
    ConfigMap out;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const int col = static_cast<int>(line.find_first_not_of(" \t")) + 1;

        if (body.front() == '[') {
            if (body.back() != ']')
                throw ParseError("section header is missing ']'", line_no, col);
            const std::string name = trim(body.substr(1, body.size() - 2));
            if (!known_section(name))
                throw ParseError("unknown section '" + name + "'", line_no, col + 1);
            section = name;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("expected 'key = value'", line_no, col);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!valid_name(key))
            throw ParseError("malformed key '" + key + "'", line_no, col);
        if (section.empty())
            throw ParseError("key '" + key + "' appears before any section", line_no, col);
        const std::string full = section + "." + key;
        if (!find_key(full)) throw ParseError("unknown key '" + full + "'", line_no, col);
        if (out.count(full)) throw ParseError("duplicate key '" + full + "'", line_no, col);
        out[full] = value;
    }
    return out;
}

std::string resolve_config_path(const std::string& path)
{
    namespace fs = std::filesystem;
    if (fs::exists(path)) return path;
    if (const char* dir = std::getenv("MAGSIM_CONFIG_DIR"); dir && fs::path(path).is_relative()) {
        const fs::path alt = fs::path(dir) / path;
        if (fs::exists(alt)) return alt.string();
    }
    return path;
}

ConfigMap read_config_file(const std::string& path)
{
    const std::string resolved = resolve_config_path(path);
    std::ifstream in(resolved);
    if (!in) throw IoError("cannot read config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void apply_override(ConfigMap& map, const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ValidationError("override '" + assignment + "' lacks '='");
    const std::string key = trim(assignment.substr(0, eq));
    if (!find_key(key)) throw ValidationError("unknown key '" + key + "'");
    map[key] = trim(assignment.substr(eq + 1));
}

std::string ExperimentConfig::get(const std::string& key) const
{
    const auto it = values.find(key);
    if (it == values.end()) throw ValidationError("unknown key '" + key + "'");
    return it->second;
}

double ExperimentConfig::number(const std::string& key) const { return to_number(key, get(key)); }

long long ExperimentConfig::integer(const std::string& key) const
{
    const double v = number(key);
    if (v != std::floor(v) || std::abs(v) > 9e15)
        throw ValidationError(key + ": expected an integer");
    return static_cast<long long>(v);
}

bool ExperimentConfig::flag(const std::string& key) const
{
    const std::string v = get(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ValidationError(key + ": expected true or false, got '" + v + "'");
}

std::vector<double> ExperimentConfig::list(const std::string& key) const
{
    std::vector<double> out;
    std::stringstream ss(get(key));
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(to_number(key, trim(item)));
    if (out.empty()) throw ValidationError(key + ": expected at least one value");
    return out;
}

ExperimentConfig build_config(const ConfigMap& explicit_values)
{
    for (const auto& [k, v] : explicit_values)
        if (!find_key(k)) throw ValidationError("unknown key '" + k + "'");
    auto is_set = [&](const std::string& k) {
        const auto it = explicit_values.find(k);
        return it != explicit_values.end() && !it->second.empty();
    };

    ExperimentConfig cfg;
    for (const auto& k : config_keys()) {
        const auto it = explicit_values.find(k.name);
        cfg.values[k.name] = it != explicit_values.end() ? it->second : k.fallback;
    }

    const std::string ancilla = cfg.get("system.ancilla");
    if (ancilla == "nitrogen14")
        cfg.system = SpinSystemParams::nitrogen14();
    else if (ancilla == "carbon13")
        cfg.system = SpinSystemParams::carbon13();
    else
        throw ValidationError("system.ancilla: expected nitrogen14 or carbon13");
    // Preset values stand unless the file sets them.
    const SpinSystemParams& s = cfg.system;
    const double preset[] = {s.delta0, s.gamma_e, s.gamma_n, s.q0, s.a_par, s.a_perp};
    for (std::size_t i = 0; i < kSystemKeys.size(); ++i) {
        const std::string key = "system." + kSystemKeys[i];
        if (!is_set(key)) cfg.values[key] = format_double(preset[i]);
    }
    cfg.system.delta0 = cfg.number("system.delta0");
    cfg.system.gamma_e = cfg.number("system.gamma_e");
    cfg.system.gamma_n = cfg.number("system.gamma_n");
    cfg.system.q0 = cfg.number("system.q0");
    cfg.system.a_par = cfg.number("system.a_par");
    cfg.system.a_perp = cfg.number("system.a_perp");
    cfg.system.validate();

    if (is_set("field.delta") && is_set("field.b_z"))
        throw ValidationError("field.delta and field.b_z are mutually exclusive");
    if (is_set("field.b_z")) {
        cfg.values["field.delta"] = "";
        cfg.field.b_z = cfg.number("field.b_z");
    } else {
        cfg.field.b_z = bz_for_delta(cfg.system, cfg.number("field.delta"));
    }
    cfg.field.b_e = cfg.number("field.b_e");
    cfg.field.b_i = cfg.number("field.b_i");
    cfg.field.beta = cfg.number("field.beta");
    cfg.field.validate();

    if (is_set("readout.c_factor") && is_set("readout.ds_over_c"))
        throw ValidationError("readout.c_factor and readout.ds_over_c are mutually exclusive");
    if (is_set("readout.c_factor")) {
        cfg.values["readout.ds_over_c"] = "";
        cfg.readout.c_factor = cfg.number("readout.c_factor");
    } else {
        cfg.readout.c_factor = 0.5 / cfg.number("readout.ds_over_c");
    }
    cfg.readout.dead_time = cfg.number("readout.dead_time");
    if (!cfg.get("readout.csr_multiplier").empty())
        cfg.readout.csr = CsrReadout{cfg.number("readout.csr_multiplier"),
                                     cfg.number("readout.csr_dead_time")};
    cfg.readout.validate();

    cfg.decay.t2 = cfg.number("decay.t2");
    cfg.decay.p_exp = cfg.number("decay.p");
    cfg.decay.t2_star = cfg.number("decay.t2_star");
    cfg.decay.validate();

    cfg.mode = parse_mode(cfg.get("run.mode"));
    const long long seed = cfg.integer("run.seed");
    if (seed < 0) throw ValidationError("run.seed must be non-negative");
    cfg.seed = static_cast<std::uint64_t>(seed);
    cfg.output = cfg.get("run.output");

    // Canonical spelling so that equivalent files hash alike.
    for (auto& [k, v] : cfg.values) {
        if (v.empty() || v.find(',') != std::string::npos) continue;
        try {
            v = format_double(parse_double(v));
        } catch (const ValidationError&) {
        }
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) { return build_config(read_config_file(path)); }

std::uint64_t config_hash(const ExperimentConfig& cfg)
{
    std::uint64_t h = 1469598103934665603ull;
    for (const auto& [k, v] : cfg.values) {
        for (char c : k + "=" + v + "\n") {
            h ^= static_cast<unsigned char>(c);
            h *= 1099511628211ull;
        }
    }
    return h;
}

std::string defaults_text()
{
    std::ostringstream os;
    std::string section;
    for (const auto& k : config_keys()) {
        const auto dot = k.name.find('.');
        const std::string sec = k.name.substr(0, dot);
        if (sec != section) {
            if (!section.empty()) os << '\n';
            os << '[' << sec << "]\n";
            section = sec;
        }
        os << k.name.substr(dot + 1) << " = " << k.fallback;
        if (!k.help.empty()) os << "  # " << k.help;
        os << '\n';
    }
    return os.str();
}

}  // namespace magsim
