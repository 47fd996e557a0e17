#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "gibbslie/cli.hpp"

namespace {

using gibbslie::cli::Options;
using gibbslie::cli::Result;

void add_common(CLI::App* app, Options& o, bool needs_element)
{
    app->add_option("--algebra", o.algebra, "Algebra file, fixture name or bundled name")->required();
    app->add_option("--cartan", o.cartan, "Comma-separated Cartan basis expressions");
    auto* el = app->add_option("--element", o.element, "Element expression or coordinate list");
    if (needs_element) el->required();
    app->add_option("--seed", o.seed, "Seed for every random choice");
    app->add_option("--tol-spec", o.tol_spec, "Imaginary-axis tolerance relative to the spectral radius");
    app->add_option("--tol-trace", o.tol_trace, "Trace truncation tolerance");
}

void add_output(CLI::App* app, std::string& json_out, bool& timing)
{
    app->add_option("--json-out", json_out, "Also write the report to this file");
    app->add_flag("--timing", timing, "Include wall time in the report");
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Gibbs elements, invariant cones and KMS checks for finite-dimensional real Lie algebras"};
    app.require_subcommand(1);
    Options o;
    std::string json_out;
    std::function<Result()> action;

    auto* algebra = app.add_subcommand("algebra", "Algebra input checks");
    algebra->require_subcommand(1);
    auto* validate = algebra->add_subcommand("validate", "Parse an algebra and verify the Jacobi identity");
    validate->add_option("--algebra", o.algebra, "Algebra file, fixture name or bundled name")->required();
    add_output(validate, json_out, o.timing);
    validate->callback([&] { action = [&] { return gibbslie::cli::algebra_validate(o); }; });

    auto* spectral = app.add_subcommand("spectral", "Ellipticity and compact embedding");
    spectral->require_subcommand(1);
    for (const char* mode : {"elliptic", "compact-embed", "ellipticity-ideal"}) {
        auto* sub = spectral->add_subcommand(mode);
        add_common(sub, o, true);
        add_output(sub, json_out, o.timing);
        sub->callback([&o, &action, m = std::string(mode)] {
            o.spectral_mode = m;
            action = [&o] { return gibbslie::cli::spectral(o); };
        });
    }

    auto* roots = app.add_subcommand("roots", "Root decomposition and positive systems");
    add_common(roots, o, false);
    add_output(roots, json_out, o.timing);
    roots->callback([&] { action = [&] { return gibbslie::cli::roots(o); }; });

    auto* cones = app.add_subcommand("cones", "C_min, C_max and admissibility per positive system");
    add_common(cones, o, false);
    add_output(cones, json_out, o.timing);
    cones->callback([&] { action = [&] { return gibbslie::cli::cones(o); }; });

    auto* gibbs = app.add_subcommand("gibbs-element", "Decide whether an element is a Gibbs element");
    add_common(gibbs, o, true);
    add_output(gibbs, json_out, o.timing);
    gibbs->callback([&] { action = [&] { return gibbslie::cli::gibbs_element(o); }; });

    auto* trace = app.add_subcommand("trace", "Character trace of a weight module at an element of t");
    add_common(trace, o, true);
    add_output(trace, json_out, o.timing);
    trace->add_option("--module", o.module, "verma | sl2 | oscillator | su2_irrep");
    trace->add_option("--weight", o.weight, "Highest weight in t-coordinates");
    trace->add_option("--two-j", o.two_j, "Twice the spin for su2_irrep");
    trace->add_option("--depth", o.depth, "Truncation depth");
    trace->callback([&] { action = [&] { return gibbslie::cli::trace(o); }; });

    auto* kms = app.add_subcommand("kms", "KMS residual suite on a truncated representation");
    kms->add_option("--family", o.family, "su2 | oscillator | heisenberg | sl2_lowest");
    kms->add_option("--lambda", o.lambda, "Frequency, central charge or lowest weight");
    kms->add_option("--beta", o.beta, "Inverse temperature");
    kms->add_option("--N", o.N, "Truncation size");
    kms->add_option("--two-j", o.two_j, "Twice the su2 spin");
    kms->add_option("--word", o.word, "First word, e.g. \"p:0.5,q:0.3\"");
    kms->add_option("--word2", o.word2, "Second word");
    kms->add_option("--grid-points", o.grid_points, "Points on the t-grid [-5, 5]");
    kms->add_option("--seed", o.seed, "Seed for random words and the perturbation");
    kms->add_flag("--perturb", o.perturb, "Negative control: perturb the density off the dynamics");
    add_output(kms, json_out, o.timing);
    kms->callback([&] { action = [&] { return gibbslie::cli::kms(o); }; });

    auto* pipeline = app.add_subcommand("pipeline", "Full chain from the Cartan subalgebra to the Gibbs verdict");
    add_common(pipeline, o, true);
    add_output(pipeline, json_out, o.timing);
    pipeline->callback([&] { action = [&] { return gibbslie::cli::pipeline(o); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : gibbslie::cli::kInputError;
    }

    const Result r = action();
    const std::string text = r.report.dump(2);
    std::cout << text << '\n';
    if (!json_out.empty()) {
        std::ofstream out(json_out);
        if (!out) {
            std::cerr << "cannot write '" << json_out << "'\n";
            return gibbslie::cli::kInputError;
        }
        out << text << '\n';
    }
    return r.exit_code;
}
