#pragma once

#include "magsim/metrology.hpp"
#include "magsim/oracle.hpp"
#include "magsim/spin_core.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

// Configuration files are INI-like:
//
//   # comment
//   [section]
//   key = value
//
// Every key must be listed in config_keys(). Values are numbers, words or
// comma-separated number lists. An empty value leaves the key unset.
namespace magsim {

enum class Mode {
    xy8_fringe,
    tau_scan,
    field_sweep,
    filter_map,
    sensitivity_table,
    maytag,
    spinlock,
    vector,
    interp_demo
};

const char* mode_name(Mode m);
Mode parse_mode(const std::string& s);
const std::vector<Mode>& all_modes();

struct ConfigKey {
    std::string name;  // section.key
    std::string fallback;
    std::string help;
};

const std::vector<ConfigKey>& config_keys();

// Raw key/value assignments, section.key -> value.
using ConfigMap = std::map<std::string, std::string>;

ConfigMap parse_config(const std::string& text);
ConfigMap read_config_file(const std::string& path);

// Resolves a path against MAGSIM_CONFIG_DIR when it does not exist as given.
std::string resolve_config_path(const std::string& path);

// Applies "section.key=value".
void apply_override(ConfigMap& map, const std::string& assignment);

struct ExperimentConfig {
    SpinSystemParams system;
    FieldConfig field;
    ReadoutModel readout;
    DecayModel decay;
    Mode mode = Mode::xy8_fringe;
    std::uint64_t seed = 1;
    std::string output;
    ConfigMap values;  // every key, defaults filled in

    double delta() const { return system.delta0 - system.gamma_e * field.b_z; }
    std::string get(const std::string& key) const;
    double number(const std::string& key) const;
    long long integer(const std::string& key) const;
    bool flag(const std::string& key) const;
    std::vector<double> list(const std::string& key) const;
};

ExperimentConfig build_config(const ConfigMap& explicit_values);
ExperimentConfig load_config(const std::string& path);

// FNV-1a over the sorted resolved keys.
std::uint64_t config_hash(const ExperimentConfig& cfg);

// The defaults table in config syntax.
std::string defaults_text();

}  // namespace magsim
