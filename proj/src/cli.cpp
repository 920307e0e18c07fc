#include "aggrum/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "aggrum/axioms.hpp"
#include "aggrum/geometry.hpp"
#include "aggrum/io.hpp"
#include "aggrum/model.hpp"
#include "aggrum/rationalizer.hpp"
#include "aggrum/report.hpp"
#include "aggrum/simulation.hpp"

namespace aggrum {

namespace {

namespace fs = std::filesystem;

struct Options {
    std::string input, output, axiom = "ru", method = "auto", variant = "multi", grid = "lambda", kind = "mixture";
    int n = 6, k = 10, jobs = 1, atomic = 2, non_atomic = 1, vertices = 5;
    double resolution = 0.1;
    std::uint64_t seed = 1;
    std::vector<double> lam_x{0.8, 0.1, 0.1}, lam_y{0.8, 0.1, 0.1}, lam_xy{0.8, 0.1, 0.1};
    std::vector<std::string> utilities;
};

bool is_domain_failure(Errc c) {
    switch (c) {
    case Errc::AxiomViolated:
    case Errc::NotRURational:
    case Errc::NotMenuIndependent:
    case Errc::NotIdentified:
    case Errc::NoConvergence: return true;
    default: return false;
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::InvalidInput, "cannot read " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_text(const Options& o, std::ostream& out, const std::string& text, const std::string& suffix = "") {
    if (o.output.empty()) {
        out << text;
        return;
    }
    const std::string path = o.output + suffix;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(Errc::InvalidInput, "cannot write " + path);
    f << text;
}

void write_json(const Options& o, std::ostream& out, const Json& j) { write_text(o, out, j.dump(2) + "\n"); }

Manifest load(const Options& o) {
    if (o.input.empty()) throw Error(Errc::InvalidInput, "--input is required");
    return parse_manifest(read_file(o.input));
}

const StochasticChoice& need_choice(const Manifest& m) {
    if (!m.choice) throw Error(Errc::InvalidInput, "manifest has no stochastic choice");
    return *m.choice;
}

PartialRuMethod parse_method(const std::string& s) {
    if (s == "bm") return PartialRuMethod::Bm;
    if (s == "lp") return PartialRuMethod::Lp;
    return PartialRuMethod::Auto;
}

Lambda3 lambda3(const std::vector<double>& v) {
    if (v.size() != 3) throw Error(Errc::InvalidInput, "a composition needs three weights for {z}, {w}, {z,w}");
    const double s = v[0] + v[1] + v[2];
    if (v[0] < 0 || v[1] < 0 || v[2] < 0 || std::abs(s - 1.0) > 1e-9)
        throw Error(Errc::InvalidInput, "composition weights must be nonnegative and sum to 1");
    return {v[0], v[1], v[2]};
}

int cmd_check(const Options& o, std::ostream& out) {
    auto m = load(o);
    const auto& rho = need_choice(m);
    AxiomReport rep;
    if (o.axiom == "lm") rep = check_limited_monotonicity(rho, m.space);
    else if (o.axiom == "partial") rep = check_partial_ru(rho, m.space, parse_method(o.method));
    else if (o.axiom == "ru") rep = check_ru_rational(rho, m.space, parse_method(o.method));
    else rep = check_aru_rational(rho, m.space);
    auto body = report_json(rep, m.space);
    body["axiom"] = o.axiom;
    write_json(o, out, tagged_report("check", body));
    return rep.passed ? kExitPass : kExitFail;
}

int cmd_rationalize(const Options& o, std::ostream& out) {
    auto m = load(o);
    const auto& rho = need_choice(m);
    const Variant v = o.variant == "outside_option" ? Variant::OutsideOption : Variant::Multi;
    try {
        auto r = rationalize(rho, m.space, v);
        write_text(o, out, print_manifest(rationalization_manifest(r, m.space)));
        return kExitPass;
    } catch (const AxiomViolatedError& e) {
        auto body = report_json(e.report(), m.space);
        body["error"] = e.what();
        write_json(o, out, tagged_report("rationalize", body));
        return kExitFail;
    }
}

int cmd_evaluate(const Options& o, std::ostream& out) {
    auto m = load(o);
    if (!m.preference) throw Error(Errc::InvalidInput, "manifest has no preference distribution");
    const auto dom = m.choice ? m.choice->domain() : ChoiceDomain::full(m.space);
    Manifest res;
    res.space = m.space;
    if (m.composition) {
        res.choice = forward_evaluate(*m.preference, *m.X, *m.composition, dom);
        res.metadata = {{"construction", "forward_evaluate"}};
    } else {
        res.choice = aru_evaluate(*m.preference, m.space, dom);
        res.metadata = {{"construction", "aru_evaluate"}};
    }
    if (m.choice) res.metadata["max_abs_diff_to_input"] = max_abs_diff(*res.choice, *m.choice);
    write_text(o, out, print_manifest(res));
    return kExitPass;
}

int cmd_distance(const Options& o, std::ostream& out) {
    auto m = load(o);
    auto d = aru_distance(need_choice(m), m.space);
    write_json(o, out, tagged_report("distance", distance_json(d, m.space)));
    return kExitPass;
}

int cmd_caratheodory(const Options& o, std::ostream& out) {
    auto m = load(o);
    auto s = approx_caratheodory(need_choice(m), o.k, m.space);
    write_json(o, out, tagged_report("caratheodory", caratheodory_json(s, m.space)));
    return kExitPass;
}

int cmd_vertices(const Options& o, std::ostream& out) {
    Json body;
    if (!o.input.empty()) {
        auto m = load(o);
        if (m.space.size() > 5) throw Error(Errc::TooLarge, "vertex enumeration is limited to 5 aggregates");
        const auto dom = m.choice ? m.choice->domain() : ChoiceDomain::full(m.space);
        Json vs = Json::array();
        for (const auto& order : all_orders(m.space.size())) {
            Manifest v;
            v.space = m.space;
            v.choice = aru_evaluate(PreferenceDistribution::degenerate(m.space.ids(), order), m.space, dom);
            Json choice = to_json(v)["choice"];
            vs.push_back({{"order", order_json(m.space.ids(), order)}, {"choice", choice}});
        }
        body["aru_vertices"] = vs;
    } else {
        auto b = vertex_count_lower_bound(o.n);
        const boost::multiprecision::cpp_int threshold = boost::multiprecision::cpp_int(1) << (1u << (o.n - 1));
        body = {{"n", o.n},
                {"count", b.count.str()},
                {"ratio_bound", b.ratio_bound.str()},
                {"threshold", "2^" + std::to_string(1u << (o.n - 1))},
                {"ratio_bound_exceeds_threshold", b.ratio_bound >= threshold}};
    }
    write_json(o, out, tagged_report("vertices", body));
    return kExitPass;
}

LogitWorld world_from(const Options& o) {
    LogitWorld w;
    for (const auto& kv : o.utilities) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) throw Error(Errc::InvalidInput, "utilities are given as id=value");
        try {
            w.u[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
        } catch (const std::exception&) {
            throw Error(Errc::InvalidInput, "bad utility value in " + kv);
        }
    }
    w.lam_x = lambda3(o.lam_x);
    w.lam_y = lambda3(o.lam_y);
    w.lam_xy = lambda3(o.lam_xy);
    return w;
}

int cmd_simulate(const Options& o, std::ostream& out) {
    auto w = world_from(o);
    auto r = evaluate_world(w, true);
    Manifest rho;
    rho.space = logit_world_space();
    rho.choice = r.rho;
    Json body{{"u", Json(w.u)},
              {"lambda", {{"x,a0", w.lam_x}, {"y,a0", w.lam_y}, {"x,y,a0", w.lam_xy}}},
              {"u_hat", Json(r.u_hat)},
              {"bias", r.bias},
              {"ordering_reversed", ordering_reversed(r.u_hat, w.u)},
              {"squared_distance", *r.squared_distance},
              {"likelihood", "equal weight per market over {x,a0}, {y,a0}, {x,y,a0}; u(a0) = 0"},
              {"choice", to_json(rho)["choice"]}};
    write_json(o, out, tagged_report("simulate", body));
    return kExitPass;
}

int cmd_sweep(const Options& o, std::ostream& out) {
    if (o.grid == "minmax") {
        auto rows = minmax_bias(world_from(o).u, o.resolution, o.jobs);
        write_text(o, out, minmax_csv(rows), o.output.empty() ? "" : ".csv");
        return kExitPass;
    }
    SweepConfig cfg;
    if (o.grid == "lambda") cfg = lambda_sweep_config();
    else if (o.grid == "utility") cfg = utility_sweep_config();
    else throw Error(Errc::InvalidInput, "unknown grid " + o.grid);
    if (cfg.kind == SweepKind::Lambda) cfg.lambda_step = o.resolution;
    else cfg.u_step = o.resolution;
    auto rows = sweep(cfg, o.jobs);
    if (o.output.empty()) {
        out << sweep_csv(rows, cfg.kind);
        return kExitPass;
    }
    write_text(o, out, sweep_csv(rows, cfg.kind), ".csv");
    const std::string what = cfg.kind == SweepKind::Lambda ? "lambda({x,a0})" : "u(z), u(w)";
    write_text(o, out, sweep_svg(rows, cfg.kind, HeatmapMeasure::Bias, "Bias across " + what), "_bias.svg");
    write_text(o, out, sweep_svg(rows, cfg.kind, HeatmapMeasure::Distance, "Squared ARU distance across " + what),
               "_distance.svg");
    return kExitPass;
}

int cmd_generate(const Options& o, std::ostream& out) {
    if (o.atomic < 1 || o.non_atomic < 0 || o.atomic + o.non_atomic > 8)
        throw Error(Errc::InvalidInput, "generate supports up to 8 aggregates");
    std::vector<std::string> at, na;
    for (int i = 0; i < o.atomic; ++i) at.push_back("y" + std::to_string(i + 1));
    for (int i = 0; i < o.non_atomic; ++i) na.push_back("a" + std::to_string(i));
    AggregateSpace space(at, na);
    const auto dom = ChoiceDomain::full(space);
    Manifest m;
    m.space = space;
    if (o.kind == "nesting") {
        if (o.non_atomic != 1) throw Error(Errc::InvalidInput, "the nesting family has one non-atomic aggregate");
        m.choice = build_nesting_counterexample(space);
        m.metadata = {{"construction", "nesting_counterexample"}};
    } else {
        // Random mixture of RU vertices: each vertex deviates on a random subset of menus.
        std::mt19937_64 rng(o.seed);
        std::exponential_distribution<double> ex(1.0);
        std::bernoulli_distribution coin(0.5);
        std::vector<double> w;
        std::vector<StochasticChoice> parts;
        for (int v = 0; v < o.vertices; ++v) {
            std::vector<int> ranking(static_cast<std::size_t>(space.size()));
            std::iota(ranking.begin(), ranking.end(), 0);
            std::shuffle(ranking.begin(), ranking.end(), rng);
            MenuCollectionFamily fam;
            for (Menu menu : dom.menus()) {
                std::vector<int> cands;
                for (int a : menu.members())
                    if (!space.is_atomic(a)) cands.push_back(a);
                if (cands.empty() || !coin(rng)) continue;
                fam.assign(cands[std::uniform_int_distribution<std::size_t>(0, cands.size() - 1)(rng)], menu);
            }
            parts.push_back(vertex_choice(space, LinearOrder(ranking), fam, dom));
            w.push_back(ex(rng));
        }
        const double total = std::accumulate(w.begin(), w.end(), 0.0);
        StochasticChoice rho;
        for (Menu menu : dom.menus()) {
            std::vector<double> p(static_cast<std::size_t>(menu.size()), 0.0);
            for (std::size_t v = 0; v < parts.size(); ++v)
                for (std::size_t i = 0; i < p.size(); ++i) p[i] += w[v] / total * parts[v].at(menu)[i];
            rho.set(menu, p);
        }
        m.choice = std::move(rho);
        m.metadata = {{"construction", "random_vertex_mixture"}, {"seed", o.seed}, {"vertices", o.vertices}};
    }
    write_text(o, out, print_manifest(m));
    return kExitPass;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Aggregated random utility: axioms, rationalization, geometry and logit simulations", "aggrum"};
    app.require_subcommand(1);
    Options o;

    auto input = [&](CLI::App* s, bool required = true) {
        auto* opt = s->add_option("--input", o.input, "Manifest file (JSON)");
        if (required) opt->required();
    };
    auto output = [&](CLI::App* s) { s->add_option("--output", o.output, "Output file (default: stdout)"); };

    auto* check = app.add_subcommand("check", "Test an axiom on a stochastic choice manifest");
    input(check);
    output(check);
    check->add_option("--axiom", o.axiom, "lm | partial | ru | aru")->check(CLI::IsMember({"lm", "partial", "ru", "aru"}));
    check->add_option("--method", o.method, "bm | lp | auto")->check(CLI::IsMember({"bm", "lp", "auto"}));

    auto* rat = app.add_subcommand("rationalize", "Construct (mu_X, X, lambda) for an RU-rational manifest");
    input(rat);
    output(rat);
    rat->add_option("--variant", o.variant, "multi | outside_option")->check(CLI::IsMember({"multi", "outside_option"}));

    auto* eval = app.add_subcommand("evaluate", "Forward-evaluate a preference (and composition) manifest");
    input(eval);
    output(eval);

    auto* dist = app.add_subcommand("distance", "Squared Euclidean distance to the ARU polytope");
    input(dist);
    output(dist);

    auto* car = app.add_subcommand("caratheodory", "Sparse uniform mixture of k RU vertices");
    input(car);
    output(car);
    car->add_option("--k", o.k, "Number of vertices")->check(CLI::PositiveNumber);

    auto* vert = app.add_subcommand("vertices", "RU vertex count bound, or ARU vertices of a small space");
    input(vert, false);
    output(vert);
    vert->add_option("--n", o.n, "Number of atomic aggregates")->check(CLI::Range(1, 24));

    auto* sim = app.add_subcommand("simulate", "One logit world: reduced data, fitted utilities, bias, distance");
    output(sim);
    sim->add_option("--u", o.utilities, "Utilities as id=value (x, y, z, w)");
    sim->add_option("--lam-x", o.lam_x, "Composition on {x,a0} over {z},{w},{z,w}")->expected(3);
    sim->add_option("--lam-y", o.lam_y, "Composition on {y,a0}")->expected(3);
    sim->add_option("--lam-xy", o.lam_xy, "Composition on {x,y,a0}")->expected(3);

    auto* swp = app.add_subcommand("sweep", "Grid sweeps to CSV (and SVG heatmaps when --output is a prefix)");
    output(swp);
    swp->add_option("--grid", o.grid, "lambda | utility | minmax")->check(CLI::IsMember({"lambda", "utility", "minmax"}));
    swp->add_option("--resolution", o.resolution, "Grid step (lambda step, or utility step for the utility grid)")
        ->check(CLI::PositiveNumber);
    swp->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
    swp->add_option("--u", o.utilities, "Utilities as id=value for minmax");

    auto* gen = app.add_subcommand("generate", "Write a test manifest");
    output(gen);
    gen->add_option("--kind", o.kind, "mixture | nesting")->check(CLI::IsMember({"mixture", "nesting"}));
    gen->add_option("--seed", o.seed, "Random seed");
    gen->add_option("--atomic", o.atomic, "Atomic aggregates");
    gen->add_option("--non-atomic", o.non_atomic, "Non-atomic aggregates");
    gen->add_option("--vertices", o.vertices, "Vertices in the mixture")->check(CLI::PositiveNumber);

    std::vector<std::string> argv(args.rbegin(), args.rend());
    try {
        app.parse(argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitPass;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitPass;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (*check) return cmd_check(o, out);
        if (*rat) return cmd_rationalize(o, out);
        if (*eval) return cmd_evaluate(o, out);
        if (*dist) return cmd_distance(o, out);
        if (*car) return cmd_caratheodory(o, out);
        if (*vert) return cmd_vertices(o, out);
        if (*sim) return cmd_simulate(o, out);
        if (*swp) return cmd_sweep(o, out);
        if (*gen) return cmd_generate(o, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return is_domain_failure(e.code()) ? kExitFail : kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace aggrum
