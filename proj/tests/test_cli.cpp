#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "gah/config.hpp"
#include "gah/io.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out, err;
};

fs::path scratch_dir() {
    const fs::path dir = fs::temp_directory_path() / ("gahtool_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    return dir;
}

Run gahtool(const std::string& args) {
    const fs::path dir = scratch_dir();
    const std::string cmd = "cd '" + dir.string() + "' && '" GAHTOOL_PATH "' " + args + " > stdout.txt 2> stderr.txt";
    const int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = gah::io::read_file(dir / "stdout.txt");
    r.err = gah::io::read_file(dir / "stderr.txt");
    return r;
}

std::string output(const std::string& rel) { return gah::io::read_file(scratch_dir() / rel); }

std::vector<std::vector<double>> csv_rows(const std::string& text, std::string* header = nullptr) {
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    if (header) *header = line;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        std::vector<double> row;
        std::istringstream ls(line);
        for (std::string cell; std::getline(ls, cell, ',');) row.push_back(std::stod(cell));
        rows.push_back(row);
    }
    return rows;
}

void check_single_error_line(const Run& r, const std::string& kind) {
    CHECK(r.err.starts_with("error: kind=" + kind + " message=\""));
    CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);
}

}  // namespace

TEST_CASE("simulate writes the trajectory over the full span") {
    const Run r = gahtool("simulate --out-dir sim");
    REQUIRE(r.code == 0);
    std::string header;
    const auto rows = csv_rows(output("sim/trajectory.csv"), &header);
    CHECK(header == "t,x,y,z");
    REQUIRE(rows.size() > 1000);
    CHECK(rows.front()[0] == 0.0);
    CHECK(rows.back()[0] == 1000.0);
    for (std::size_t i = 1; i < rows.size(); ++i) REQUIRE(rows[i][0] > rows[i - 1][0]);
}

TEST_CASE("simulate with a zero angle reports world coordinates") {
    REQUIRE(gahtool("simulate --angle 0 --out-dir w").code == 0);
    const auto rows = csv_rows(output("w/trajectory.csv"));
    CHECK(rows.front() == std::vector<double>{0, 0, 1, 0});

    REQUIRE(gahtool("simulate --angle 2pi/5 --out-dir r").code == 0);
    const auto rot = csv_rows(output("r/trajectory.csv"));
    REQUIRE(rot.size() == rows.size());
    // The rotated frame is an isometry of the same samples.
    for (std::size_t i = 0; i < rows.size(); i += 997) {
        const double a = std::hypot(rows[i][1], rows[i][2]), b = std::hypot(rot[i][1], rot[i][2]);
        CHECK(std::abs(a - b) < 1e-9 * std::max(1.0, a));
        CHECK(rows[i][3] == rot[i][3]);
    }
}

TEST_CASE("simulate rejects an empty time span") {
    const fs::path cfg = scratch_dir() / "zero.cfg";
    gah::io::write_file(cfg, "[run]\nt_start = 5\nt_end = 5\n");
    const Run r = gahtool("simulate --config zero.cfg --out-dir z");
    CHECK(r.code == 2);
    check_single_error_line(r, "InvalidArgument");
}

TEST_CASE("section crossings lie on the plane and split by direction") {
    REQUIRE(gahtool("section --preset fig2 --out-dir both").code == 0);
    REQUIRE(gahtool("section --preset fig2 --direction ascending --out-dir asc").code == 0);
    std::string header;
    const auto both = csv_rows(output("both/crossings.csv"), &header);
    const auto asc = csv_rows(output("asc/crossings.csv"));
    CHECK(header == "t,x\xCC\x82,y\xCC\x82,z\xCC\x82");
    REQUIRE(!both.empty());
    for (const auto& row : both) CHECK(std::abs(row[3] - 5.0) < 1e-9);
    CHECK(std::abs(2.0 * double(asc.size()) - double(both.size())) <= 1.0);
}

TEST_CASE("a plane the orbit never meets gives an empty crossing file") {
    const Run r = gahtool("section --cut 1e6 --out-dir far");
    CHECK(r.code == 0);
    CHECK(output("far/crossings.csv") == "t,x\xCC\x82,y\xCC\x82,z\xCC\x82\n");
}

TEST_CASE("section rejects a malformed angle") {
    const Run r = gahtool("section --angle two --out-dir bad");
    CHECK(r.code == 2);
    check_single_error_line(r, "InvalidArgument");
}

TEST_CASE("trap verifies the quadrilateral") {
    const Run r = gahtool("trap --preset fig3 --points-per-edge 100 --out-dir trap");
    CHECK(r.code == 0);
    const auto report = nlohmann::json::parse(output("trap/report.json"));
    CHECK(report["trapping"] == true);
    CHECK(report["total_seeds"] == 404);
    const auto& it = report["per_iteration"][0];
    CHECK(it["inside"] == it["returned"]);
    CHECK(it["min_margin"].get<double>() > 0);
    std::string header;
    const auto clouds = csv_rows(output("trap/clouds.csv"), &header);
    CHECK(header == "iter,x\xCC\x82,y\xCC\x82");
    CHECK(clouds.size() == 2 * 404);
}

TEST_CASE("trap with a shrunken quadrilateral fails its verdict") {
    const auto tiny = gah::rossler_figure_quadrilateral().scaled_about_centroid(0.1);
    const Run r = gahtool("trap --quad=" + gah::format_quad(tiny) + " --points-per-edge 20 --out-dir tiny");
    CHECK(r.code == 1);
    const auto report = nlohmann::json::parse(output("tiny/report.json"));
    CHECK(report["trapping"] == false);
    CHECK(report["per_iteration"][0]["escaped"].get<int>() > 0);
}

TEST_CASE("trap rejects a zero iteration count") {
    const Run r = gahtool("trap --iters 0 --out-dir k0");
    CHECK(r.code == 2);
    check_single_error_line(r, "InvalidArgument");
    CHECK_FALSE(fs::exists(scratch_dir() / "k0" / "report.json"));
}

TEST_CASE("unknown subcommands and options fail cleanly") {
    CHECK(gahtool("frobnicate").code == 2);
    CHECK(gahtool("trap --no-such-flag").code == 2);
    CHECK(gahtool("trap --preset fig9").code == 2);
}

TEST_CASE("preset prints its config text") {
    const Run r = gahtool("preset fig4");
    CHECK(r.code == 0);
    CHECK(r.out.find("iters = 5") != std::string::npos);
}

TEST_CASE("gah-demo for the constructed flow and the planar model") {
    Run r = gahtool("gah-demo --system gah_system --out-dir gs");
    CHECK(r.code == 0);
    const auto gs = nlohmann::json::parse(output("gs/gah_report.json"));
    CHECK(gs["contained"] == true);
    CHECK(gs["mapped"] == 400);
    std::string header;
    CHECK(csv_rows(output("gs/image.csv"), &header).size() == 400);
    CHECK(header == "r,z");

    r = gahtool("gah-demo --system gah_model --iters 3 --out-dir gm");
    CHECK(r.code == 0);
    const auto gm = nlohmann::json::parse(output("gm/model_report.json"));
    CHECK(gm["trapping"] == true);
    CHECK(gm["star"]["holds"] == true);
    CHECK(csv_rows(output("gm/model_clouds.csv"), &header).size() == 4 * 400);
    CHECK(header == "iter,x,y");

    r = gahtool("gah-demo --out-dir ross");
    CHECK(r.code == 2);
}

TEST_CASE("repeated runs write byte-identical outputs") {
    REQUIRE(gahtool("trap --preset fig4 --points-per-edge 20 --out-dir rep1").code == 0);
    REQUIRE(gahtool("trap --preset fig4 --points-per-edge 20 --out-dir rep2").code == 0);
    CHECK(output("rep1/clouds.csv") == output("rep2/clouds.csv"));
    auto a = nlohmann::json::parse(output("rep1/report.json"));
    auto b = nlohmann::json::parse(output("rep2/report.json"));
    a["config"].erase("out_dir");
    b["config"].erase("out_dir");
    CHECK(a == b);
}
