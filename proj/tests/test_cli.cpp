#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const std::string cli = TROPFAN_CLI;
const std::string data_dir = TROPFAN_DATA_DIR;

fs::path work_dir() {
    fs::path p = fs::temp_directory_path() / "tropfan-cli-tests";
    fs::create_directories(p);
    return p;
}

int run(const std::string& args) {
    int rc = std::system((cli + " " + args + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json load(const fs::path& p) { return json::parse(slurp(p)); }

}  // namespace

TEST_CASE("flows command counts the worked example") {
    fs::path out = work_dir() / "flows.json";
    REQUIRE(run("flows --input " + data_dir + "/triangle.json --out " + out.string()) == 0);
    json doc = load(out);
    CHECK(doc.at("counts").at("on_base") == 7);
    CHECK(doc.at("counts").at("on_proper_models") == 8);
    CHECK(doc.at("triples").size() == 15);
}

TEST_CASE("invalid input exits nonzero") {
    fs::path bad = work_dir() / "bad.json";
    std::ofstream(bad) << R"({"graph": {"vertices": [{"id": "v1", "genus": 1, "legs": ["h1"]}], "edges": []},
                             "A": {"h1": 1}, "k": 0, "theta": {"v1": "1/2"}})";
    CHECK(run("flows --input " + bad.string()) == 1);  // degree mismatch
    CHECK(run("flows --input " + (work_dir() / "missing.json").string()) == 1);
}

TEST_CASE("div-fan document: wall, verification, determinism, round-trip") {
    fs::path out1 = work_dir() / "div1.json";
    fs::path out2 = work_dir() / "div2.json";
    REQUIRE(run("div-fan --input " + data_dir + "/triangle.json --box 4 --out " + out1.string()) == 0);
    REQUIRE(run("div-fan --input " + data_dir + "/triangle.json --box 4 --out " + out2.string()) == 0);
    CHECK(slurp(out1) == slurp(out2));  // byte-identical

    json doc = load(out1);
    CHECK(doc.at("kind") == "div");
    CHECK(doc.at("verification").at("pass") == true);

    bool wall_found = false;
    int maximal = 0;
    for (const auto& jc : doc.at("cones")) {
        maximal += jc.at("maximal").get<bool>() ? 1 : 0;
        for (const auto& eq : jc.at("equations"))
            if (eq.get<std::string>() == "l1 - 3*l2") wall_found = true;
    }
    CHECK(wall_found);
    CHECK(maximal == 8);

    // serialize(parse(text)) is a fixed point
    CHECK(json::parse(slurp(out1)).dump(2) + "\n" == slurp(out1));
}

TEST_CASE("rub-fan document carries rays, sublattices, indices") {
    fs::path out = work_dir() / "rub.json";
    REQUIRE(run("rub-fan --input " + data_dir + "/triangle.json --box 4 --out " + out.string()) == 0);
    json doc = load(out);
    CHECK(doc.at("kind") == "rub");
    CHECK(doc.at("verification").at("pass") == true);

    json split_rays = json::array({{0, 1, 2}, {1, 1, 0}, {1, 2, 0}});
    bool found_index_two = false;
    int maximal = 0, split_cells_of_square = 0;
    for (const auto& jc : doc.at("cones")) {
        if (jc.at("maximal").get<bool>()) ++maximal;
        if (jc.at("rays") == split_rays) {
            REQUIRE(jc.contains("sublattice"));
            CHECK(jc.at("sublattice").at("index") == "2");
            CHECK(jc.at("sublattice").at("generators") == split_rays);
            found_index_two = true;
        }
        for (const auto& jl : jc.at("labels"))
            if (jl.at("model") == json::array({"e2"}) && jl.at("flow").value("e1", 0LL) == 2 &&
                jc.at("maximal").get<bool>())
                ++split_cells_of_square;
    }
    CHECK(found_index_two);
    CHECK(maximal == 9);
    CHECK(split_cells_of_square == 2);
}

TEST_CASE("slice emits the exact cross-section") {
    fs::path fan_out = work_dir() / "div_for_slice.json";
    fs::path slice_out = work_dir() / "slice.json";
    fs::path svg_out = work_dir() / "slice.svg";
    REQUIRE(run("div-fan --input " + data_dir + "/triangle.json --box 0 --out " + fan_out.string()) == 0);
    REQUIRE(run("slice --input " + fan_out.string() + " --out " + slice_out.string() + " --svg " +
                svg_out.string()) == 0);

    json doc = load(slice_out);
    int maximal_regions = 0;
    bool square_found = false;
    for (const auto& region : doc.at("regions")) {
        if (region.at("maximal").get<bool>()) ++maximal_regions;
        // the shaded square: corners (0,1/3,2/3), (0,1/2,1/2), (1/2,1/2,0), (1/3,2/3,0)
        std::set<std::string> corners;
        for (const auto& v : region.at("vertices")) {
            std::string s;
            for (const auto& c : v) s += c.get<std::string>() + ";";
            corners.insert(s);
        }
        if (corners == std::set<std::string>{"0;1/3;2/3;", "0;1/2;1/2;", "1/2;1/2;0;", "1/3;2/3;0;"})
            square_found = true;
    }
    CHECK(maximal_regions == 8);
    CHECK(square_found);
    CHECK(slurp(svg_out).substr(0, 4) == "<svg");
}

TEST_CASE("check command reports pass on the segment example") {
    fs::path out = work_dir() / "check.json";
    REQUIRE(run("check --input " + data_dir + "/segment.json --box 4 --out " + out.string()) == 0);
    json doc = load(out);
    CHECK(doc.at("pass") == true);
}

TEST_CASE("check with a skipped flow fails with a witness") {
    fs::path out = work_dir() / "check_broken.json";
    REQUIRE(run("check --input " + data_dir + "/segment.json --box 4 --skip-triple 0 --out " +
                out.string()) == 0);
    json doc = load(out);
    CHECK(doc.at("pass") == false);
    bool witnessed = false;
    for (const auto& c : doc.at("checks"))
        if (!c.at("pass").get<bool>() && !c.at("witness").get<std::string>().empty()) witnessed = true;
    CHECK(witnessed);
}

TEST_CASE("suggest-theta proposes a validated generic vector") {
    fs::path out = work_dir() / "theta.json";
    REQUIRE(run("suggest-theta --input " + data_dir + "/triangle.json --out " + out.string()) == 0);
    json doc = load(out);
    CHECK(doc.at("generic") == true);
    CHECK(doc.at("signs") == "-++");
    CHECK(doc.at("total") == "0");
    CHECK(doc.at("theta").at("v1").get<std::string>().front() == '-');
}
