#pragma once

// Plain-text run configuration:
//
//   # comment
//   [system]
//   name = rossler
//   a = 0.2
//   [plane]
//   angle = 2pi/5
//   [quad]
//   vertices = -3.55,-27:11.91,-6.6:12,0:-8.5,3.5
//   [run]
//   iters = 5
//
// Unknown sections or keys are errors. Later assignments win, so a preset,
// a config file and command-line flags can be layered in that order.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gah/gah_model.hpp"
#include "gah/polygon.hpp"
#include "gah/section.hpp"

namespace gah {

enum class SystemKind { Rossler, GahSystem, GahModel };

const char* system_name(SystemKind s);
SystemKind parse_system(std::string_view name);

struct RunConfig {
    SystemKind system = SystemKind::Rossler;
    RosslerParams<double> rossler{};
    GahModelParams<double> model{};
    RectRegion<double> region{};

    SectionPlane<double> plane = rossler_figure_plane();
    Quadrilateral<double> quad = rossler_figure_quadrilateral();

    IntegratorConfig<double> integrator{};
    Refine refine = Refine::DenseBisection;
    /// Minimum flight time of a return; 0 selects 10 * max_step.
    double t_min = 0;

    std::size_t iterations = 1;
    std::size_t points_per_edge = 1000;
    /// Seed grid per side (gah_system) or sample resolution (gah_model).
    std::size_t grid = 20;

    std::string out_dir = "out";
    /// Trajectory export format: csv, json or both.
    std::string format = "csv";

    /// Full consistency check; throws InvalidArgument.
    void validate() const;

    ReturnOptions<double> return_options() const;
};

/// Applies one `key = value` assignment in `section`.
void apply_setting(RunConfig& cfg, std::string_view section, std::string_view key, std::string_view value);

/// Parses config text on top of `base`. Errors name the offending line.
RunConfig parse_config(std::string_view text, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

/// Canonical text form; parse_config(to_config_text(c)) reproduces c exactly.
std::string to_config_text(const RunConfig& cfg);
nlohmann::json config_json(const RunConfig& cfg);

std::vector<std::string> preset_names();
/// Built-in presets reproducing the Rossler experiments: fig2, fig3, fig4.
RunConfig preset(std::string_view name);
std::string preset_text(std::string_view name);

Quadrilateral<double> parse_quad(std::string_view text);
std::string format_quad(const Quadrilateral<double>& q);

}  // namespace gah
