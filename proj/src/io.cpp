#include "gah/io.hpp"

#include <charconv>
#include <fstream>
#include <regex>
#include <sstream>

namespace gah::io {

std::string format_real(double v) {
    require(std::isfinite(v), "cannot format a non-finite value", ErrorKind::NonFiniteState);
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

bool parse_plain(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* first = s.data();
    if (*first == '+') ++first;
    const auto res = std::from_chars(first, s.data() + s.size(), out);
    return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

}  // namespace

double parse_real(std::string_view text) {
    const std::string s = trim(text);
    double v = 0;
    if (parse_plain(s, v)) {
        require(std::isfinite(v), "value '" + s + "' is not finite");
        return v;
    }
    // Multiples of pi: "pi", "-pi/2", "2pi/5", "0.4*pi".
    static const std::regex pi_form(R"(^([+-]?[0-9.eE+-]*?)\*?pi(?:/([0-9.eE+]+))?$)");
    std::smatch m;
    if (std::regex_match(s, m, pi_form)) {
        double coef = 1;
        const std::string c = m[1].str();
        if (c == "-") {
            coef = -1;
        } else if (!c.empty() && c != "+" && !parse_plain(c, coef)) {
            throw Error(ErrorKind::InvalidArgument, "malformed number '" + s + "'");
        }
        double den = 1;
        if (m[2].matched && (!parse_plain(m[2].str(), den) || den == 0)) {
            throw Error(ErrorKind::InvalidArgument, "malformed number '" + s + "'");
        }
        return coef * std::numbers::pi / den;
    }
    throw Error(ErrorKind::InvalidArgument, "malformed number '" + s + "'");
}

void write_trajectory_csv(std::ostream& os, const Trajectory<double>& traj, const SectionPlane<double>& frame) {
    os << "t,x,y,z\n";
    for (const auto& s : traj.samples) {
        const State3 r = frame.to_plane_frame(s.state);
        os << format_real(s.t) << ',' << format_real(r.x()) << ',' << format_real(r.y()) << ',' << format_real(r.z())
           << '\n';
    }
}

nlohmann::json trajectory_json(const Trajectory<double>& traj, const SectionPlane<double>& frame) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& s : traj.samples) {
        const State3 r = frame.to_plane_frame(s.state);
        out.push_back({{"t", s.t}, {"x", r.x()}, {"y", r.y()}, {"z", r.z()}});
    }
    return out;
}

void write_crossings_csv(std::ostream& os, const std::vector<Crossing<double>>& crossings) {
    os << "t," << x_hat << ',' << y_hat << ',' << z_hat << '\n';
    for (const auto& c : crossings) {
        os << format_real(c.t) << ',' << format_real(c.point.x()) << ',' << format_real(c.point.y()) << ','
           << format_real(c.point.z()) << '\n';
    }
}

nlohmann::json crossings_json(const std::vector<Crossing<double>>& crossings) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& c : crossings) {
        out.push_back({{"t", c.t},
                       {"point", {c.point.x(), c.point.y(), c.point.z()}},
                       {"direction", direction_name(c.direction)}});
    }
    return out;
}

void write_clouds_csv(std::ostream& os, const TrappingRun<double>& run) {
    os << "iter," << x_hat << ',' << y_hat << '\n';
    for (const auto& p : run.boundary) os << "0," << format_real(p.x()) << ',' << format_real(p.y()) << '\n';
    for (std::size_t j = 0; j < run.clouds.size(); ++j) {
        for (const auto& c : run.clouds[j]) {
            os << j + 1 << ',' << format_real(c.point.x()) << ',' << format_real(c.point.y()) << '\n';
        }
    }
}

nlohmann::json clouds_json(const TrappingRun<double>& run) {
    nlohmann::json out = nlohmann::json::array();
    out.push_back({{"iter", 0}, {"points", points_json(run.boundary)}});
    for (std::size_t j = 0; j < run.clouds.size(); ++j) {
        nlohmann::json pts = nlohmann::json::array();
        nlohmann::json seeds = nlohmann::json::array();
        nlohmann::json margins = nlohmann::json::array();
        for (const auto& c : run.clouds[j]) {
            pts.push_back(point_json(c.point));
            seeds.push_back(c.seed);
            margins.push_back(c.margin);
        }
        out.push_back({{"iter", j + 1}, {"points", pts}, {"seeds", seeds}, {"margins", margins}});
    }
    return out;
}

nlohmann::json report_json(const ContainmentReport& report) {
    nlohmann::json iters = nlohmann::json::array();
    for (std::size_t j = 0; j < report.per_iteration.size(); ++j) {
        const auto& s = report.per_iteration[j];
        iters.push_back({{"iteration", j + 1},
                         {"returned", s.returned},
                         {"inside", s.inside},
                         {"escaped", s.escaped},
                         {"no_return", s.no_return},
                         {"min_margin", s.min_margin ? nlohmann::json(*s.min_margin) : nlohmann::json(nullptr)}});
    }
    return {{"total_seeds", report.total_seeds},
            {"no_return_tolerance", report.no_return_tolerance},
            {"trapping", report.trapping()},
            {"per_iteration", iters}};
}

void write_points_csv(std::ostream& os, std::string_view header, const std::vector<Point2>& points) {
    os << header << '\n';
    for (const auto& p : points) os << format_real(p.x()) << ',' << format_real(p.y()) << '\n';
}

void write_model_clouds_csv(std::ostream& os, const std::vector<Point2>& grid, const RegionIterates<double>& iterates) {
    os << "iter,x,y\n";
    for (const auto& p : grid) os << "0," << format_real(p.x()) << ',' << format_real(p.y()) << '\n';
    for (std::size_t k = 0; k < iterates.clouds.size(); ++k) {
        for (const auto& p : iterates.clouds[k]) {
            os << k + 1 << ',' << format_real(p.x()) << ',' << format_real(p.y()) << '\n';
        }
    }
}

nlohmann::json point_json(const Point2& p) { return nlohmann::json::array({p.x(), p.y()}); }

nlohmann::json points_json(const std::vector<Point2>& pts) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& p : pts) out.push_back(point_json(p));
    return out;
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    require(bool(f), "cannot open '" + path.string() + "' for writing");
    f.write(content.data(), std::streamsize(content.size()));
    require(bool(f), "failed writing '" + path.string() + "'");
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    require(bool(f), "cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace gah::io
