#include "gah/config.hpp"

#include <charconv>
#include <sstream>

#include "gah/io.hpp"

namespace gah {

const char* system_name(SystemKind s) {
    switch (s) {
        case SystemKind::Rossler: return "rossler";
        case SystemKind::GahSystem: return "gah_system";
        case SystemKind::GahModel: return "gah_model";
    }
    return "rossler";
}

SystemKind parse_system(std::string_view name) {
    if (name == "rossler") return SystemKind::Rossler;
    if (name == "gah_system") return SystemKind::GahSystem;
    if (name == "gah_model") return SystemKind::GahModel;
    throw Error(ErrorKind::InvalidArgument, "unknown system '" + std::string(name) + "'");
}

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::size_t parse_count(std::string_view text) {
    const std::string s = trim(text);
    std::size_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    require(!s.empty() && res.ec == std::errc() && res.ptr == s.data() + s.size(),
            "expected a non-negative integer, got '" + s + "'");
    return v;
}

Point2 parse_pair(std::string_view text) {
    const auto parts = split(text, ',');
    require(parts.size() == 2, "expected 'x,y', got '" + std::string(text) + "'");
    return {io::parse_real(parts[0]), io::parse_real(parts[1])};
}

std::string format_pair(const Point2& p) { return io::format_real(p.x()) + "," + io::format_real(p.y()); }

Orientation parse_orientation(std::string_view s) {
    if (s == "preserving") return Orientation::Preserving;
    if (s == "reversing") return Orientation::Reversing;
    throw Error(ErrorKind::InvalidArgument, "unknown orientation '" + std::string(s) + "'");
}

Refine parse_refine(std::string_view s) {
    if (s == "linear") return Refine::Linear;
    if (s == "dense_bisection") return Refine::DenseBisection;
    throw Error(ErrorKind::InvalidArgument, "unknown refinement '" + std::string(s) + "'");
}

const char* refine_name(Refine r) { return r == Refine::Linear ? "linear" : "dense_bisection"; }

[[noreturn]] void unknown_key(std::string_view section, std::string_view key) {
    throw Error(ErrorKind::InvalidArgument, "unknown key '" + std::string(key) + "' in [" + std::string(section) + "]");
}

}  // namespace

Quadrilateral<double> parse_quad(std::string_view text) {
    const auto parts = split(text, ':');
    require(parts.size() == 4, "quadrilateral needs exactly 4 vertices 'x1,y1:x2,y2:x3,y3:x4,y4'");
    Quadrilateral<double> q;
    for (int i = 0; i < 4; ++i) q.vertices[i] = parse_pair(parts[i]);
    return q;
}

std::string format_quad(const Quadrilateral<double>& q) {
    std::string out;
    for (int i = 0; i < 4; ++i) {
        if (i) out += ':';
        out += format_pair(q.vertices[i]);
    }
    return out;
}

void apply_setting(RunConfig& cfg, std::string_view section, std::string_view key_in, std::string_view value_in) {
    const std::string key = trim(key_in);
    const std::string value = trim(value_in);
    require(!value.empty(), "empty value for '" + key + "'");
    if (section == "system") {
        if (key == "name") cfg.system = parse_system(value);
        else if (key == "a") cfg.rossler.a = io::parse_real(value);
        else if (key == "b") cfg.rossler.b = io::parse_real(value);
        else if (key == "c") cfg.rossler.c = io::parse_real(value);
        else if (key == "lambda_v") cfg.model.lambda_v = io::parse_real(value);
        else if (key == "lambda_h") cfg.model.lambda_h = io::parse_real(value);
        else if (key == "fold_center") cfg.model.fold_center = parse_pair(value);
        else if (key == "tail_center") cfg.model.tail_center = parse_pair(value);
        else if (key == "arc_length") cfg.model.arc_length = io::parse_real(value);
        else if (key == "translate") cfg.model.translate = parse_pair(value);
        else if (key == "orientation") cfg.model.orientation = parse_orientation(value);
        else if (key == "region_x") {
            const Point2 p = parse_pair(value);
            cfg.region.x_lo = p.x();
            cfg.region.x_hi = p.y();
        }
        else if (key == "region_y") {
            const Point2 p = parse_pair(value);
            cfg.region.y_lo = p.x();
            cfg.region.y_hi = p.y();
        }
        else if (key == "keystone") {
            const Point2 p = parse_pair(value);
            cfg.region.k_lo = p.x();
            cfg.region.k_hi = p.y();
        }
        else if (key == "s_lo") cfg.region.s_lo = io::parse_real(value);
        else unknown_key(section, key);
    } else if (section == "plane") {
        if (key == "angle") cfg.plane.rotation_angle = io::parse_real(value);
        else if (key == "axis") cfg.plane.rotation_axis = parse_axis(value);
        else if (key == "coord") {
            const std::size_t c = parse_count(value);
            require(c >= 1 && c <= 3, "plane coord must be 1, 2 or 3");
            cfg.plane.cut_coord = int(c) - 1;
        } else if (key == "value") cfg.plane.cut_value = io::parse_real(value);
        else if (key == "direction") cfg.plane.direction = parse_direction(value);
        else unknown_key(section, key);
    } else if (section == "quad") {
        if (key == "vertices") cfg.quad = parse_quad(value);
        else unknown_key(section, key);
    } else if (section == "run") {
        if (key == "t_start") cfg.integrator.t_span.first = io::parse_real(value);
        else if (key == "t_end") cfg.integrator.t_span.second = io::parse_real(value);
        else if (key == "x0") {
            const auto parts = split(value, ',');
            require(parts.size() == 3, "x0 needs three components");
            cfg.integrator.initial_state = State3(io::parse_real(parts[0]), io::parse_real(parts[1]), io::parse_real(parts[2]));
        } else if (key == "rel_tol") cfg.integrator.rel_tol = io::parse_real(value);
        else if (key == "abs_tol") cfg.integrator.abs_tol = io::parse_real(value);
        else if (key == "max_step") cfg.integrator.max_step = io::parse_real(value);
        else if (key == "t_min") cfg.t_min = io::parse_real(value);
        else if (key == "refine") cfg.refine = parse_refine(value);
        else if (key == "iters") cfg.iterations = parse_count(value);
        else if (key == "points_per_edge") cfg.points_per_edge = parse_count(value);
        else if (key == "grid") cfg.grid = parse_count(value);
        else if (key == "out_dir") cfg.out_dir = value;
        else if (key == "format") {
            require(value == "csv" || value == "json" || value == "both", "format must be csv, json or both");
            cfg.format = value;
        } else unknown_key(section, key);
    } else {
        throw Error(ErrorKind::InvalidArgument, "unknown section [" + std::string(section) + "]");
    }
}

RunConfig parse_config(std::string_view text, RunConfig base) {
    std::string section;
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    for (std::string raw; std::getline(in, raw);) {
        ++line_no;
        std::string line = raw.substr(0, raw.find('#'));
        line = trim(line);
        if (line.empty()) continue;
        try {
            if (line.front() == '[') {
                require(line.back() == ']', "unterminated section header");
                section = trim(std::string_view(line).substr(1, line.size() - 2));
                require(section == "system" || section == "plane" || section == "quad" || section == "run",
                        "unknown section [" + section + "]");
                continue;
            }
            const auto eq = line.find('=');
            require(eq != std::string::npos, "expected 'key = value'");
            require(!section.empty(), "assignment outside of a section");
            apply_setting(base, section, std::string_view(line).substr(0, eq), std::string_view(line).substr(eq + 1));
        } catch (const Error& e) {
            throw Error(e.kind(), "line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return base;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
    return parse_config(io::read_file(path), std::move(base));
}

void RunConfig::validate() const {
    rossler.validate();
    plane.validate();
    quad.validate();
    integrator.validate();
    require(iterations >= 1, "iteration count must be >= 1");
    require(grid >= 2, "grid must be >= 2");
    require(std::isfinite(t_min) && t_min >= 0, "t_min must be >= 0");
    require(!out_dir.empty(), "out_dir must not be empty");
    if (system == SystemKind::GahModel) model.validate_for(region);
}

ReturnOptions<double> RunConfig::return_options() const {
    ReturnOptions<double> o;
    o.t_min = t_min;
    o.refine = refine;
    return o;
}

std::string to_config_text(const RunConfig& c) {
    using io::format_real;
    std::ostringstream os;
    os << "[system]\n"
       << "name = " << system_name(c.system) << '\n'
       << "a = " << format_real(c.rossler.a) << '\n'
       << "b = " << format_real(c.rossler.b) << '\n'
       << "c = " << format_real(c.rossler.c) << '\n'
       << "lambda_v = " << format_real(c.model.lambda_v) << '\n'
       << "lambda_h = " << format_real(c.model.lambda_h) << '\n'
       << "fold_center = " << format_pair(c.model.fold_center) << '\n'
       << "tail_center = " << format_pair(c.model.tail_center) << '\n'
       << "arc_length = " << format_real(c.model.arc_length) << '\n'
       << "translate = " << format_pair(c.model.translate) << '\n'
       << "orientation = " << (c.model.orientation == Orientation::Preserving ? "preserving" : "reversing") << '\n'
       << "region_x = " << format_pair({c.region.x_lo, c.region.x_hi}) << '\n'
       << "region_y = " << format_pair({c.region.y_lo, c.region.y_hi}) << '\n'
       << "s_lo = " << format_real(c.region.s_lo) << '\n'
       << "keystone = " << format_pair({c.region.k_lo, c.region.k_hi}) << '\n'
       << "\n[plane]\n"
       << "angle = " << format_real(c.plane.rotation_angle) << '\n'
       << "axis = " << axis_name(c.plane.rotation_axis) << '\n'
       << "coord = " << c.plane.cut_coord + 1 << '\n'
       << "value = " << format_real(c.plane.cut_value) << '\n'
       << "direction = " << direction_name(c.plane.direction) << '\n'
       << "\n[quad]\n"
       << "vertices = " << format_quad(c.quad) << '\n'
       << "\n[run]\n"
       << "t_start = " << format_real(c.integrator.t_span.first) << '\n'
       << "t_end = " << format_real(c.integrator.t_span.second) << '\n'
       << "x0 = " << format_real(c.integrator.initial_state.x()) << ',' << format_real(c.integrator.initial_state.y())
       << ',' << format_real(c.integrator.initial_state.z()) << '\n'
       << "rel_tol = " << format_real(c.integrator.rel_tol) << '\n'
       << "abs_tol = " << format_real(c.integrator.abs_tol) << '\n'
       << "max_step = " << format_real(c.integrator.max_step) << '\n'
       << "t_min = " << format_real(c.t_min) << '\n'
       << "refine = " << refine_name(c.refine) << '\n'
       << "iters = " << c.iterations << '\n'
       << "points_per_edge = " << c.points_per_edge << '\n'
       << "grid = " << c.grid << '\n'
       << "out_dir = " << c.out_dir << '\n'
       << "format = " << c.format << '\n';
    return os.str();
}

nlohmann::json config_json(const RunConfig& c) {
    nlohmann::json quad = nlohmann::json::array();
    for (const auto& v : c.quad.vertices) quad.push_back(io::point_json(v));
    nlohmann::json sys = {{"name", system_name(c.system)}};
    if (c.system == SystemKind::Rossler) {
        sys["params"] = {{"a", c.rossler.a}, {"b", c.rossler.b}, {"c", c.rossler.c}};
    } else if (c.system == SystemKind::GahModel) {
        sys["params"] = {{"lambda_v", c.model.lambda_v},
                         {"lambda_h", c.model.lambda_h},
                         {"fold_center", io::point_json(c.model.fold_center)},
                         {"tail_center", io::point_json(c.model.tail_center)},
                         {"arc_length", c.model.arc_length},
                         {"translate", io::point_json(c.model.translate)},
                         {"orientation", c.model.orientation == Orientation::Preserving ? "preserving" : "reversing"}};
    }
    return {{"system", sys},
            {"plane",
             {{"angle", c.plane.rotation_angle},
              {"axis", axis_name(c.plane.rotation_axis)},
              {"coord", c.plane.cut_coord + 1},
              {"value", c.plane.cut_value},
              {"direction", direction_name(c.plane.direction)}}},
            {"quad", quad},
            {"run",
             {{"t_span", {c.integrator.t_span.first, c.integrator.t_span.second}},
              {"x0", {c.integrator.initial_state.x(), c.integrator.initial_state.y(), c.integrator.initial_state.z()}},
              {"rel_tol", c.integrator.rel_tol},
              {"abs_tol", c.integrator.abs_tol},
              {"max_step", c.integrator.max_step},
              {"t_min", c.t_min},
              {"refine", refine_name(c.refine)},
              {"iters", c.iterations},
              {"points_per_edge", c.points_per_edge},
              {"grid", c.grid}}}};
}

namespace {

constexpr std::string_view rossler_base = R"([system]
name = rossler
a = 0.2
b = 0.1
c = 10

[plane]
angle = 2pi/5
axis = z
coord = 3
value = 5
direction = both

[quad]
vertices = -3.55,-27:11.91,-6.6:12,0:-8.5,3.5

[run]
t_start = 0
t_end = 1000
x0 = 0,1,0
rel_tol = 1e-9
abs_tol = 1e-9
max_step = 0.01
)";

}  // namespace

std::vector<std::string> preset_names() { return {"fig2", "fig3", "fig4"}; }

std::string preset_text(std::string_view name) {
    const std::string base(rossler_base);
    if (name == "fig2") return "# Section scatter of the Rossler attractor.\n" + base + "refine = dense_bisection\nout_dir = out/fig2\n";
    if (name == "fig3") return "# First return of the trapping quadrilateral.\n" + base + "iters = 1\npoints_per_edge = 1000\nout_dir = out/fig3\n";
    if (name == "fig4") return "# Five iterations of the trapping quadrilateral.\n" + base + "iters = 5\npoints_per_edge = 1000\nout_dir = out/fig4\n";
    throw Error(ErrorKind::InvalidArgument, "unknown preset '" + std::string(name) + "'");
}

RunConfig preset(std::string_view name) { return parse_config(preset_text(name)); }

}  // namespace gah
