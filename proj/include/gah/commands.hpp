#pragma once

// Experiment drivers shared by the command-line tool and the HTTP service.
// compute_* functions are pure; cmd_* functions also write the output files.

#include <string>
#include <vector>

#include <json.hpp>

#include "gah/config.hpp"
#include "gah/gah_system.hpp"
#include "gah/trapping.hpp"

namespace gah {

Trajectory<double> compute_simulation(const RunConfig& cfg);
std::vector<Crossing<double>> compute_section(const RunConfig& cfg);
TrappingRun<double> compute_trap(const RunConfig& cfg);
std::vector<MapOrbit<double>> compute_iterate(const RunConfig& cfg, const std::vector<Point2>& seeds);

/// Report document of a trapping run, as written to report.json.
nlohmann::json trap_report_json(const RunConfig& cfg, const TrappingRun<double>& run);
nlohmann::json orbits_json(const SectionPlane<double>& plane, const std::vector<Point2>& seeds,
                           const std::vector<MapOrbit<double>>& orbits);

struct GahSystemDemo {
    std::vector<Point2> seeds;
    std::vector<GahImage<double>> images;
};
GahSystemDemo compute_gah_system_demo(const RunConfig& cfg);
nlohmann::json gah_system_report_json(const GahSystemDemo& demo);

struct GahModelDemo {
    std::vector<Point2> grid;
    RegionIterates<double> iterates;
};
GahModelDemo compute_gah_model_demo(const RunConfig& cfg);
nlohmann::json gah_model_report_json(const RunConfig& cfg, const GahModelDemo& demo);

/// Names of the files written, relative to cfg.out_dir.
struct CommandResult {
    std::vector<std::string> files;
    /// Human-readable one-line summary for the terminal.
    std::string summary;
    /// False when the run completed but its verdict failed (e.g. not trapping).
    bool ok = true;
};

CommandResult cmd_simulate(const RunConfig& cfg);
CommandResult cmd_section(const RunConfig& cfg);
CommandResult cmd_trap(const RunConfig& cfg);
CommandResult cmd_gah_demo(const RunConfig& cfg);

/// JSON documents are dumped with 2-space indentation and a trailing newline.
std::string dump_json(const nlohmann::json& doc);

}  // namespace gah
