#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hupa/core.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

fs::path workdir() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / "hupa_test_cli";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Run cli(const std::string& args, const std::string& env = "") {
    const fs::path d = workdir();
    const std::string cmd = "cd '" + d.string() + "' && " + env + " '" HUPA_CLI_PATH "' " + args +
                            " >'" + (d / "stdout.txt").string() + "' 2>'" + (d / "stderr.txt").string() + "'";
    const int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(d / "stdout.txt");
    r.err = slurp(d / "stderr.txt");
    return r;
}

json report(const std::string& name) { return json::parse(slurp(workdir() / name)); }

std::size_t count_of(const std::string& hay, const std::string& needle) {
    std::size_t n = 0;
    for (auto at = hay.find(needle); at != std::string::npos; at = hay.find(needle, at + 1)) ++n;
    return n;
}

}  // namespace

TEST_CASE("generate") {
    auto r = cli("generate poisson --box 64x64 --rho 1 --seed 7 -o p.pat");
    CHECK(r.code == 0);
    CHECK(r.out == "p.pat\n");
    const auto p = hupa::load_pattern(workdir() / "p.pat");
    CHECK(p.size() > 3800);
    const std::string first = slurp(workdir() / "p.pat");
    CHECK(cli("generate poisson --box 64x64 --rho 1 --seed 7 -o p.pat").code == 0);
    CHECK(slurp(workdir() / "p.pat") == first);

    r = cli("generate lattice --kind square --box 10x10 --spacing 3 -o bad.pat");
    CHECK(r.code == 2);
    CHECK(r.err.find("nearest commensurate length is 9") != std::string::npos);
    CHECK(r.err.find("spacing 3.33") != std::string::npos);

    CHECK(cli("generate perturbed --box 64x64 --jitter 0.3 --seed 7 -o pl.pat").code == 0);
    CHECK(cli("generate lattice --box 8x8 -o sq.pat").code == 0);
    CHECK(cli("generate lattice --kind cubic --box 4x4x4 -o cub.pat").code == 0);
    CHECK(hupa::load_pattern(workdir() / "cub.pat").size() == 64);

    r = cli("generate rsa --box 20x20 --radius 0.5 --phi 0.3 --seed 1 --csv -o rsa.pat");
    CHECK(r.code == 0);
    CHECK(r.out == "rsa.pat\nrsa.csv\n");
    CHECK(slurp(workdir() / "rsa.csv").rfind("x,y\n", 0) == 0);
    CHECK(hupa::load_pattern(workdir() / "rsa.pat").hard_radius() == 0.5);

    r = cli("generate rsa --box 4x4 --radius 1.5 --count 2 --max-attempts 200 --seed 1 -o no.pat");
    CHECK(r.code == 1);
    CHECK(r.err.find("target") != std::string::npos);

    CHECK(cli("generate poisson --box 64 --seed 1").code == 2);
    CHECK(cli("generate poisson --box 64x64 --rho -1").code == 2);
    CHECK(cli("generate wobble --box 4x4").code == 2);
    CHECK(cli("generate rsa --box 4x4 --radius 0.1").code == 2);
    CHECK(cli("generate perturbed --box 8x8 --jitter 0.7").code == 2);
    CHECK(cli("--no-such-flag generate poisson --box 4x4").code == 2);
    CHECK(cli("").code == 2);

    r = cli("--out-dir nested/dir generate poisson --box 8x8 --seed 2 -o q.pat");
    CHECK(r.code == 0);
    CHECK(fs::exists(workdir() / "nested/dir/q.pat"));
}

TEST_CASE("variance") {
    REQUIRE(cli("generate poisson --box 64x64 --rho 1 --seed 7 -o p.pat").code == 0);
    REQUIRE(cli("generate perturbed --box 64x64 --jitter 0.3 --seed 7 -o pl.pat").code == 0);

    auto r = cli("--seed 7 variance p.pat -o pv");
    CHECK(r.code == 0);
    CHECK(r.out == "pv.csv\npv.json\n");
    auto j = report("pv.json");
    CHECK(j["order"]["label"] == "non_hyperuniform");
    CHECK(j["parameters"]["radii_source"] == "default");
    CHECK(j["parameters"]["radii"].size() == 16);
    CHECK(j["parameters"]["windows"] == 10000);
    CHECK(j["parameters"]["windows_source"] == "default");
    CHECK(j["seeds"]["seed"] == 7);
    CHECK(j["version"] == "0.1.0");
    CHECK(j["inputs"][0]["sha256"].get<std::string>().size() == 64);
    CHECK_FALSE(j.contains("wall_clock_seconds"));
    CHECK(slurp(workdir() / "pv.csv").rfind("R,mean,variance,n_windows,mode\n", 0) == 0);

    r = cli("--seed 7 variance pl.pat -o plv");
    CHECK(r.code == 0);
    CHECK(report("plv.json")["order"]["label"] == "hyperuniform");

    r = cli("variance pl.pat --radii 2,4,8 --windows 5000 -o echo");
    CHECK(r.code == 0);
    j = report("echo.json");
    CHECK(j["parameters"]["radii_flag"] == "2,4,8");
    CHECK(j["parameters"]["radii"] == json::array({2.0, 4.0, 8.0}));
    CHECK(j["parameters"]["windows"] == 5000);
    CHECK(j["parameters"]["windows_source"] == "flag");
    CHECK(j["seeds"]["seed"] == 0);

    CHECK(cli("variance pl.pat --radii 2,4,40 -o big").code == 1);
    CHECK(cli("variance pl.pat --radii 2,x -o big").code == 2);
    CHECK(cli("variance pl.pat --radii 2,4 -o two").code == 1);
    CHECK(cli("variance missing.pat").code == 1);
    CHECK(cli("variance pl.pat --windows 1").code == 2);

    r = cli("--record-timing variance pl.pat --radii 2,4,8 --windows 100 -o timed");
    CHECK(r.code == 0);
    CHECK(report("timed.json").contains("wall_clock_seconds"));
}

TEST_CASE("tessellate") {
    REQUIRE(cli("generate lattice --box 8x8 -o sq.pat").code == 0);
    auto r = cli("tessellate sq.pat -o sqv");
    CHECK(r.code == 0);
    auto j = report("sqv.json");
    CHECK(j["cell_stats"]["area_cv"] == 0.0);
    CHECK(j["cell_stats"]["side_histogram"] == json{{"4", 64}});

    REQUIRE(cli("generate poisson --box 32x32 --seed 3 -o s.pat").code == 0);
    r = cli("tessellate s.pat -o sv --svg s.svg");
    CHECK(r.code == 0);
    j = report("sv.json");
    CHECK(j["cell_stats"]["mean_sides"] == 6.0);
    const auto n = hupa::load_pattern(workdir() / "s.pat").size();
    const std::string svg = slurp(workdir() / "s.svg");
    CHECK(svg.find("version=\"1.1\"") != std::string::npos);
    CHECK(count_of(svg, "<path ") == n);
    CHECK(count_of(svg, "<circle ") == n);
    CHECK(slurp(workdir() / "sv.tess").rfind("#hupa-tess v1\nrule=voronoi", 0) == 0);

    r = cli("tessellate s.pat --rule delaunay -o sd");
    CHECK(r.code == 0);
    j = report("sd.json");
    CHECK(j["triangulation"]["euler_characteristic"] == 0);
    CHECK(j["triangulation"]["faces"] == 2 * n);

    CHECK(cli("tessellate s.pat --rule hull").code == 2);
    REQUIRE(cli("generate poisson --box 4x4x4 --seed 3 -o s3.pat").code == 0);
    CHECK(cli("tessellate s3.pat").code == 1);
}

TEST_CASE("field") {
    {
        std::ofstream out(workdir() / "dark.pbm");
        out << "P1\n64 64\n";
        for (int i = 0; i < 64 * 64; ++i) out << "1 ";
    }
    auto r = cli("field dark.pbm -o d");
    CHECK(r.code == 1);
    CHECK(r.err.find("degenerate field: zero variance at all radii") != std::string::npos);

    {
        std::ofstream out(workdir() / "g.pgm");
        out << "P2\n32 32\n255\n";
        for (int i = 0; i < 32 * 32; ++i) out << (i * 37 % 256) << " ";
    }
    CHECK(cli("field g.pgm").code == 2);
    CHECK(cli("variance g.pgm").code == 2);
    r = cli("field g.pgm --threshold 100 --radii 2,3,4,6 -o g");
    CHECK(r.code == 0);
    auto j = report("g.json");
    CHECK(j["order"]["mode"] == "dark_fraction");
    CHECK(j["parameters"]["threshold"] == 100);
    CHECK(j["parameters"]["periodicity_asserted"] == false);
    CHECK(j["warnings"].size() == 1);

    {
        std::ofstream out(workdir() / "broken.pbm");
        out << "P1\n4 4\n1 1 1 9\n";
    }
    r = cli("field broken.pbm");
    CHECK(r.code == 1);
    CHECK(r.err.find("byte offset 13") != std::string::npos);

    // walls of perturbed-lattice cells fluctuate less than walls of Poisson cells
    REQUIRE(cli("--seed 4 generate poisson --box 32x32 -o wp.pat").code == 0);
    REQUIRE(cli("--seed 4 generate perturbed --box 32x32 --jitter 0.3 -o wl.pat").code == 0);
    REQUIRE(cli("tessellate wp.pat -o wpt --raster wp.pbm --pixels 512 --wall 0.1").code == 0);
    REQUIRE(cli("tessellate wl.pat -o wlt --raster wl.pbm --pixels 512 --wall 0.1").code == 0);
    REQUIRE(cli("--seed 4 field wp.pbm --radii 1.5,2,3,4,6,8 --windows 4000 --periodic -o wpf").code == 0);
    REQUIRE(cli("--seed 4 variance wl.pbm --radii 1.5,2,3,4,6,8 --windows 4000 --periodic -o wlf").code == 0);
    CHECK(report("wlf.json")["fit"]["alpha"].get<double>() < report("wpf.json")["fit"]["alpha"].get<double>());
    CHECK(report("wpf.json")["warnings"].empty());
}

TEST_CASE("render") {
    {
        std::ofstream out(workdir() / "empty.pat");
        out << "#hupa-pattern v1\ndim=2 lengths=5,5 hard_radius=none\nprovenance=\n";
    }
    auto r = cli("render empty.pat -o empty.svg");
    CHECK(r.code == 0);
    std::string svg = slurp(workdir() / "empty.svg");
    CHECK(count_of(svg, "<circle") == 0);
    CHECK(count_of(svg, "<rect x=\"0\" y=\"0\" width=\"50.000\" height=\"50.000\" fill=\"none\"") == 1);

    REQUIRE(cli("generate lattice --box 10x10 -o hundred.pat").code == 0);
    REQUIRE(cli("render hundred.pat --scale 4 -o h.svg").code == 0);
    svg = slurp(workdir() / "h.svg");
    CHECK(count_of(svg, "<circle") == 100);
    REQUIRE(cli("render hundred.pat --scale 4 -o h.svg").code == 0);
    CHECK(slurp(workdir() / "h.svg") == svg);
    CHECK(cli("render nothing.pat").code == 1);
    CHECK(cli("render hundred.pat --scale 0").code == 2);
}

TEST_CASE("thread count does not change output bytes") {
    REQUIRE(cli("generate poisson --box 48x48 --seed 5 -o t.pat").code == 0);
    fs::create_directories(workdir() / "t1");
    fs::create_directories(workdir() / "t4");
    REQUIRE(cli("--threads 1 --seed 3 variance t.pat -o t1/v").code == 0);
    REQUIRE(cli("--seed 3 variance t.pat -o t4/v", "HUPA_THREADS=4").code == 0);
    CHECK(slurp(workdir() / "t1/v.csv") == slurp(workdir() / "t4/v.csv"));
    auto a = report("t1/v.json"), b = report("t4/v.json");
    a["outputs"][0].erase("path");
    b["outputs"][0].erase("path");
    CHECK(a == b);
}
