#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "tropfan/fan.hpp"
#include "tropfan/io.hpp"
#include "tropfan/oracle.hpp"

namespace {

using tropfan::json;

void write_output(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << "\n";
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    out << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j;
    in >> j;
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tropfan: theta-stable flows, twist cones, and relatticed cone subdivisions"};
    app.require_subcommand(1);

    std::string input, out, format = "doc", svg_out, signs, weights_csv;
    long long box = 6;
    int skip_triple = -1;

    auto add_common = [&](CLI::App* cmd, bool needs_input = true) {
        if (needs_input) cmd->add_option("--input", input, "problem file (JSON)")->required();
        cmd->add_option("--out", out, "output path (default: stdout)");
        cmd->add_option("--format", format, "doc | pretty")->check(CLI::IsMember({"doc", "pretty"}));
    };

    CLI::App* flows = app.add_subcommand("flows", "list every (model, divisor, flow) triple");
    add_common(flows);

    CLI::App* divfan = app.add_subcommand("div-fan", "build the theta-subdivision of the edge-length orthant");
    add_common(divfan);
    divfan->add_option("--box", box, "verification box bound (default 6)");

    CLI::App* rubfan = app.add_subcommand("rub-fan", "build the subdivided, relatticed cone complex");
    add_common(rubfan);
    rubfan->add_option("--box", box, "verification box bound (default 6)");

    CLI::App* slice = app.add_subcommand("slice", "cut a 2d/3d fan document with <w,l> = 1");
    slice->add_option("--input", input, "fan document (JSON)")->required();
    slice->add_option("--out", out, "output path (default: stdout)");
    slice->add_option("--weights", weights_csv, "comma-separated positive weights (default: all 1)");
    slice->add_option("--svg", svg_out, "also render to this SVG file");

    CLI::App* check = app.add_subcommand("check", "run the full property suite");
    add_common(check);
    check->add_option("--box", box, "box bound for point scans (default 6)");
    check->add_option("--skip-triple", skip_triple, "drop one flow triple (negative control)");

    CLI::App* suggest = app.add_subcommand("suggest-theta", "propose a validated generic theta");
    add_common(suggest);
    suggest->add_option("--signs, --pattern", signs, "one '+'/'-' per vertex (default: '-' at the first marking)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (flows->parsed()) {
            tropfan::ProblemSpec p = tropfan::load_problem_file(input);
            tropfan::Fan fan = tropfan::build_div_fan(p.graph, p.a(), p.theta);
            write_output(out, format == "pretty" ? tropfan::flows_pretty(p, fan)
                                                 : dump(tropfan::flows_document(p, fan)));
        } else if (divfan->parsed() || rubfan->parsed()) {
            tropfan::ProblemSpec p = tropfan::load_problem_file(input);
            tropfan::Fan fan = divfan->parsed() ? tropfan::build_div_fan(p.graph, p.a(), p.theta)
                                                : tropfan::build_rub_fan(p.graph, p.a(), p.theta);
            tropfan::VerificationReport report = tropfan::verify_subdivision(fan, box);
            json doc = tropfan::fan_document(p, fan, &report);
            write_output(out, format == "pretty" ? tropfan::fan_pretty(doc) : dump(doc));
        } else if (slice->parsed()) {
            json fan_doc = load_json(input);
            std::vector<tropfan::Rat> weights;
            if (weights_csv.empty()) {
                weights.assign(fan_doc.at("ambient").size(), tropfan::Rat(1));
            } else {
                std::stringstream ss(weights_csv);
                std::string item;
                while (std::getline(ss, item, ',')) weights.push_back(tropfan::parse_rat(item));
            }
            json doc = tropfan::slice_document(fan_doc, weights);
            write_output(out, dump(doc));
            if (!svg_out.empty()) write_output(svg_out, tropfan::slice_svg(doc));
        } else if (check->parsed()) {
            tropfan::ProblemSpec p = tropfan::load_problem_file(input);
            tropfan::Fan div_fan = tropfan::build_div_fan(p.graph, p.a(), p.theta, skip_triple);
            tropfan::Fan rub_fan = tropfan::build_rub_fan(p.graph, p.a(), p.theta, skip_triple);

            tropfan::VerificationReport all;
            all.box = box;
            for (auto& c : tropfan::verify_subdivision(div_fan, box).checks) {
                c.name = "div-" + c.name;
                all.checks.push_back(c);
            }
            for (auto& c : tropfan::verify_subdivision(rub_fan, box).checks) {
                c.name = "rub-" + c.name;
                all.checks.push_back(c);
            }
            tropfan::CheckResult smooth{"rub-smoothness", true, ""};
            for (const auto& fc : rub_fan.cones) {
                if (!fc.maximal || fc.labels.empty()) continue;
                if (!fc.lattice || !tropfan::is_unimodular(fc.cone, *fc.lattice)) {
                    smooth.pass = false;
                    smooth.witness = "a maximal cone is not smooth";
                }
            }
            all.checks.push_back(smooth);
            tropfan::CheckResult lattices{"rub-lattice-methods", true, ""};
            for (const auto& fc : rub_fan.cones) {
                if (!fc.lift || !fc.lattice) continue;
                try {
                    (void)tropfan::rub_lattice(*fc.lift, fc.cone);
                } catch (const std::exception& e) {
                    lattices.pass = false;
                    lattices.witness = e.what();
                }
            }
            all.checks.push_back(lattices);
            for (auto& c : tropfan::oracle_equivalence(div_fan, box).checks) all.checks.push_back(c);
            for (auto& c : tropfan::oracle_equivalence(rub_fan, box).checks) all.checks.push_back(c);

            json doc = tropfan::report_to_json(all);
            doc["schema"] = "tropfan.check/1";
            write_output(out, dump(doc));
        } else if (suggest->parsed()) {
            tropfan::ProblemSpec p = [&] {
                // theta may be absent or non-generic here; parse leniently.
                json j = load_json(input);
                if (!j.contains("theta")) j["theta"] = json::object();
                tropfan::ProblemSpec spec;
                try {
                    spec = tropfan::problem_from_json(j);
                } catch (const std::invalid_argument&) {
                    json relaxed = j;
                    relaxed["theta"] = json::object();
                    json jg = relaxed.at("graph");
                    std::vector<tropfan::VertexData> verts;
                    for (const auto& jv : jg.at("vertices"))
                        verts.push_back({jv.at("id").get<std::string>(), jv.value("genus", 0),
                                         jv.value("legs", std::vector<std::string>{})});
                    std::vector<tropfan::EdgeData> edges;
                    for (const auto& je : jg.value("edges", json::array()))
                        edges.push_back({je.at("id").get<std::string>(), je.at("from").get<std::string>(),
                                         je.at("to").get<std::string>()});
                    spec.graph = tropfan::Graph(verts, edges);
                    spec.k = relaxed.value("k", 0LL);
                    json ja = relaxed.value("A", json::object());
                    for (const auto& [leg, val] : ja.items()) spec.a_by_leg[leg] = val.get<long long>();
                }
                return spec;
            }();
            if (signs.empty()) {
                std::string first = tropfan::first_leg_vertex(p.graph);
                for (const auto& v : p.graph.vertices()) signs += (v.id == first ? '-' : '+');
            }
            tropfan::Rat total = tropfan::rat_of(p.k * (2 * p.graph.genus() - 2));
            tropfan::StabilityCondition theta = tropfan::suggest_theta(p.graph, signs, total);
            json jt = json::object();
            for (const auto& [v, q] : theta.values) jt[v] = tropfan::rat_str(q);
            json doc{{"schema", "tropfan.theta/1"},
                     {"theta", jt},
                     {"signs", signs},
                     {"generic", true},
                     {"total", tropfan::rat_str(theta.total())}};
            write_output(out, dump(doc));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
