#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gah/gah_model.hpp"
#include "gah/section.hpp"
#include "gah/trapping.hpp"

namespace gah::io {

/// Rotated-frame column names, with combining circumflex accents.
inline constexpr std::string_view x_hat = "x\xCC\x82";
inline constexpr std::string_view y_hat = "y\xCC\x82";
inline constexpr std::string_view z_hat = "z\xCC\x82";

/// Shortest text that parses back to exactly `v`.
std::string format_real(double v);
/// Parses a whole string as a real number; throws InvalidArgument otherwise.
double parse_real(std::string_view text);

/// CSV `t,x,y,z`, states expressed in the frame of `frame` (angle 0 gives world coordinates).
void write_trajectory_csv(std::ostream& os, const Trajectory<double>& traj, const SectionPlane<double>& frame);
nlohmann::json trajectory_json(const Trajectory<double>& traj, const SectionPlane<double>& frame);

/// CSV `t,x̂,ŷ,ẑ`.
void write_crossings_csv(std::ostream& os, const std::vector<Crossing<double>>& crossings);
nlohmann::json crossings_json(const std::vector<Crossing<double>>& crossings);

/// CSV `iter,x̂,ŷ`; iter 0 is the discretized boundary.
void write_clouds_csv(std::ostream& os, const TrappingRun<double>& run);
nlohmann::json clouds_json(const TrappingRun<double>& run);

nlohmann::json report_json(const ContainmentReport& report);

/// Two-column CSV with the given header, e.g. `r,z`.
void write_points_csv(std::ostream& os, std::string_view header, const std::vector<Point2>& points);

/// CSV `iter,x,y`; iter 0 is the sample grid.
void write_model_clouds_csv(std::ostream& os, const std::vector<Point2>& grid, const RegionIterates<double>& iterates);

nlohmann::json point_json(const Point2& p);
nlohmann::json points_json(const std::vector<Point2>& pts);

/// Writes `content` to `path`, creating parent directories.
void write_file(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

}  // namespace gah::io
