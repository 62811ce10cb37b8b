#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qtwtt/clock_model.hpp"
#include "qtwtt/event_timer.hpp"
#include "qtwtt/fiber_link.hpp"
#include "qtwtt/photon_source.hpp"
#include "qtwtt/sync_engine.hpp"

namespace qtwtt {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Fully resolved experiment description. Every field is reachable through a
/// flat dotted config key (see key_table in scenario.cpp), so files, --set
/// overrides and sweeps share one namespace.
struct Scenario {
    std::string name{"custom"};
    std::string description;
    std::string kind{"session"};  ///< session | calibration | synthetic

    double duration_s{190};
    double window_s{1.0};
    std::uint64_t seed{12345};
    bool drift_removal{false};

    double clock_step_s{0.1};
    ClockModel clock_ntsc;         ///< site reference at NTSC (maser side)
    ClockModel clock_lso;          ///< site reference at LSO (Rb side)
    ClockModel clock_transferred;  ///< fiber-transferred 10 MHz residual

    std::string et1_freq_ref{"ntsc"};
    std::string et1_pps_ref{"ntsc"};
    std::string et2_freq_ref{"lso"};
    std::string et2_pps_ref{"lso"};

    double pair_rate_hz{6000};
    double correlation_sigma_fs{1.0};
    DetectorModel detector;

    FiberLink link;
    bool ndc{false};

    EventTimer et1;
    EventTimer et2;

    SyncParams sync;

    bool attack_enabled{false};
    AttackSpec attack;

    double synthetic_sigma_fs{132'000};
    int synthetic_pairs_per_window{1440};
    int synthetic_windows{256};
    Duration synthetic_offset{};

    void validate() const;
    int n_windows() const;
};

/// Apply one `key = value` override; throws ConfigError on unknown keys or
/// unparsable values.
void scenario_set(Scenario& s, const std::string& key, const std::string& value);

/// Render the fully resolved scenario as a config file (covers every key).
std::string scenario_echo(const Scenario& s);

/// Parse a config file body. Starts from the named base scenario when the
/// file carries `scenario = <name>`, else from defaults.
Scenario parse_scenario_text(const std::string& text, const std::string& origin = "<config>");
Scenario load_scenario_file(const std::string& path);

struct ScenarioInfo {
    std::string name;
    std::string description;
};

/// Registry of named presets, lexicographically ordered.
std::vector<ScenarioInfo> list_scenarios();
bool scenario_exists(const std::string& name);
Scenario make_scenario(const std::string& name);

} // namespace qtwtt
