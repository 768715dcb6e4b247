#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cord/equilibrium.hpp"
#include "cord/errors.hpp"
#include "cord/exportgraph.hpp"
#include "cord/extension.hpp"
#include "cord/matching.hpp"
#include "cord/ordering.hpp"
#include "cord/parser.hpp"
#include "cord/query.hpp"

namespace {

using nlohmann::json;

std::vector<std::string> split_list(const std::string& csv) {
    std::vector<std::string> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

// A name may refer to a model block, an extension (its merged model), or a
// dynamics block (its equilibrium system).
cord::IncidenceModel resolve_model(const cord::LoweredFile& file, const std::string& name) {
    if (const auto* m = file.find_model(name)) return *m;
    if (const auto* e = file.find_extension(name)) return cord::merged_model(*e);
    if (const auto* d = file.find_dynamics(name)) {
        std::map<std::string, bool> positivity;
        for (const auto& v : d->positive) positivity[v] = true;
        return cord::equilibrium_of(*d, positivity).model;
    }
    throw cord::ValidationError("no model, extension, or dynamics named '" + name + "'");
}

void emit(const std::string& text) { std::cout << text; }

void emit_json(const json& j) { std::cout << j.dump(2) << "\n"; }

struct Args {
    std::string file, name, format = "json";
    std::string x, y, given, target, base_vars, observations, graph = "cluster", out;
    bool perfect = false, absence = false;
    int n = 2000;
    std::uint64_t seed = 1;
    double alpha = 0.01;
    std::size_t max_cycles = 1000;
};

int run(int argc, char** argv) {
    CLI::App app{"causal ordering toolkit for equation-system models"};
    app.require_subcommand(1);
    Args a;

    auto add_input = [&](CLI::App* cmd) {
        cmd->add_option("file", a.file, "model file (.cmf)")->required();
        cmd->add_option("name", a.name, "block name")->required();
    };

    auto* order = app.add_subcommand("order", "causal ordering graph of a model");
    add_input(order);
    order->add_option("--format", a.format, "json|dot");

    auto* markov = app.add_subcommand("markov", "Markov ordering graph of a model");
    add_input(markov);
    markov->add_option("--format", a.format, "json|dot");

    auto* dsep = app.add_subcommand("dsep", "d-separation query on the Markov ordering graph");
    add_input(dsep);
    dsep->add_option("--x", a.x, "left vertex set, comma separated")->required();
    dsep->add_option("--y", a.y, "right vertex set, comma separated")->required();
    dsep->add_option("--given", a.given, "conditioning set, comma separated");
    dsep->add_option("--format", a.format, "json|text");

    auto* effects = app.add_subcommand("effects", "generic intervention effects");
    add_input(effects);
    effects->add_option("--target", a.target,
                        "equation, parameter, or exogenous variable (soft intervention); "
                        "with --perfect, a cluster label or member vertex")
        ->required();
    effects->add_flag("--perfect", a.perfect, "perfect intervention on a cluster");

    auto* checkext = app.add_subcommand("check-extension", "robustness of model predictions");
    checkext->add_option("file", a.file, "model file (.cmf)")->required();
    checkext->add_option("name", a.name, "extension block name")->required();
    checkext->add_flag("--absence", a.absence,
                       "check preservation of absent relations instead of present ones");

    auto* feedback = app.add_subcommand("feedback", "new feedback loops of extended dynamics");
    feedback->add_option("file", a.file, "model file (.cmf)")->required();
    feedback->add_option("name", a.name, "dynamics block name")->required();
    feedback->add_option("--base-vars", a.base_vars, "variables of the base model")->required();
    feedback->add_option("--max-cycles", a.max_cycles, "cycle enumeration cap");

    auto* simulate = app.add_subcommand("simulate", "sample equilibrium distributions");
    add_input(simulate);
    simulate->add_option("--n", a.n, "number of draws");
    simulate->add_option("--seed", a.seed, "random seed");
    simulate->add_option("--format", a.format, "json|csv");

    auto* diagnose = app.add_subcommand("diagnose", "explain unexpected independences");
    add_input(diagnose);
    diagnose->add_option("--observations", a.observations,
                         "JSON file: [{\"x\":..,\"y\":..,\"given\":[..],\"independent\":..}]")
        ->required();

    auto* exportcmd = app.add_subcommand("export", "write a graph as DOT or JSON");
    add_input(exportcmd);
    exportcmd->add_option("--graph", a.graph, "cluster|markov|oriented");
    exportcmd->add_option("--format", a.format, "dot|json");
    exportcmd->add_option("--out", a.out, "output path (stdout when omitted)");

    CLI11_PARSE(app, argc, argv);

    cord::LoweredFile lowered = cord::load_file(a.file);

    if (order->parsed()) {
        auto co = cord::causal_ordering(resolve_model(lowered, a.name));
        if (a.format == "dot")
            emit(cord::to_dot(co));
        else
            emit_json(cord::to_json(co));
        return 0;
    }
    if (markov->parsed()) {
        auto mo = cord::markov_ordering(resolve_model(lowered, a.name));
        if (a.format == "dot")
            emit(cord::to_dot(mo));
        else
            emit_json(cord::to_json(mo));
        return 0;
    }
    if (dsep->parsed()) {
        auto mo = cord::markov_ordering(resolve_model(lowered, a.name));
        bool separated =
            cord::d_separated(mo, split_list(a.x), split_list(a.y), split_list(a.given));
        if (a.format == "text") {
            std::cout << "d-separated: " << (separated ? "true" : "false") << "\n";
        } else {
            emit_json({{"x", split_list(a.x)},
                       {"y", split_list(a.y)},
                       {"given", split_list(a.given)},
                       {"d_separated", separated}});
        }
        return 0;
    }
    if (effects->parsed()) {
        auto co = cord::causal_ordering(resolve_model(lowered, a.name));
        cord::EffectReport report =
            a.perfect
                ? cord::perfect_intervention_effects(co, cord::resolve_cluster(co, a.target))
                : cord::soft_intervention_effects(co, a.target);
        emit_json(report.to_json());
        return 0;
    }
    if (checkext->parsed()) {
        const auto* ext = lowered.find_extension(a.name);
        if (!ext) throw cord::ValidationError("no extension named '" + a.name + "'");
        auto verdict = a.absence ? cord::check_absence_preservation(*ext)
                                 : cord::check_presence_preservation(*ext);
        emit_json(verdict.to_json());
        return 0;
    }
    if (feedback->parsed()) {
        const auto* dyn = lowered.find_dynamics(a.name);
        if (!dyn) throw cord::ValidationError("no dynamics block named '" + a.name + "'");
        auto vars = split_list(a.base_vars);
        auto report = cord::detect_new_feedback(
            *dyn, std::set<std::string>(vars.begin(), vars.end()), a.max_cycles);
        emit_json(report.to_json());
        return 0;
    }
    if (simulate->parsed()) {
        cord::SampleOptions options;
        cord::IncidenceModel model = resolve_model(lowered, a.name);
        const auto* dyn = lowered.find_dynamics(a.name);
        if (dyn) options.dynamics = dyn;
        auto samples = cord::sample_equilibria(model, a.n, a.seed, options);
        if (a.format == "csv")
            emit(cord::to_csv(samples));
        else
            emit_json(cord::to_json(samples));
        return 0;
    }
    if (diagnose->parsed()) {
        auto mo = cord::markov_ordering(resolve_model(lowered, a.name));
        std::ifstream in(a.observations);
        if (!in) throw cord::Error("cannot open observations file: " + a.observations);
        json doc = json::parse(in);
        std::vector<cord::Observation> obs;
        for (const auto& item : doc) {
            cord::Observation o;
            o.x = item.at("x").get<std::string>();
            o.y = item.at("y").get<std::string>();
            if (item.contains("given"))
                o.given = item.at("given").get<std::vector<std::string>>();
            o.independent = item.at("independent").get<bool>();
            obs.push_back(std::move(o));
        }
        emit_json(cord::diagnose(mo, obs).to_json());
        return 0;
    }
    if (exportcmd->parsed()) {
        cord::IncidenceModel model = resolve_model(lowered, a.name);
        std::string text;
        if (a.graph == "oriented") {
            auto g = cord::bipartite_of(model);
            auto m = cord::maximum_matching(g);
            if (!cord::is_perfect(g, m))
                throw cord::NoPerfectMatchingError("model has no perfect matching",
                                                   cord::deficiency_witness(g));
            auto oriented = cord::orient(g, m);
            text = a.format == "dot" ? cord::to_dot(oriented)
                                     : cord::to_json(oriented).dump(2) + "\n";
        } else if (a.graph == "markov") {
            auto mo = cord::markov_ordering(model);
            text = a.format == "dot" ? cord::to_dot(mo) : cord::to_json(mo).dump(2) + "\n";
        } else {
            auto co = cord::causal_ordering(model);
            text = a.format == "dot" ? cord::to_dot(co) : cord::to_json(co).dump(2) + "\n";
        }
        if (a.out.empty()) {
            emit(text);
        } else {
            std::ofstream out(a.out);
            if (!out) throw cord::Error("cannot write: " + a.out);
            out << text;
        }
        return 0;
    }
    return 5;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const cord::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const cord::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const cord::NoPerfectMatchingError& e) {
        std::cerr << "error: " << e.what() << "\n";
        if (!e.witness().empty()) {
            std::cerr << "deficient equations:";
            for (const auto& f : e.witness()) std::cerr << " " << f;
            std::cerr << "\n";
        }
        return 3;
    } catch (const cord::SolverError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 5;
    }
}
