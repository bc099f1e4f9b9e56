#include "torwave/cli.hpp"

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "torwave/acceptance.hpp"
#include "torwave/error.hpp"
#include "torwave/experiments.hpp"
#include "torwave/serialize.hpp"

namespace torwave::cli {
namespace {

struct Options {
    std::uint64_t m = 0;
    std::vector<std::uint64_t> m_list;
    std::string curve = "circle:0.5,0.5";
    std::string ensemble = "gaussian";
    std::string second_ensemble = "rademacher";
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    std::uint64_t trial = 0;
    std::size_t workers = 1;
    std::vector<double> eps = {0.1, 0.2, 0.3};
    double alpha = 0.0;
    double beta = 0.0;
    double delta = 0.0;
    double R = 0.0;
    double t = 0.3;
    std::size_t samples = 1000;
    double separation = 1e-3;
    std::size_t quadrature = 64;
    std::size_t grid = 1000;
    std::size_t check_density = 64;
    std::size_t points_per_lambda = 50;
    double eta = 1e-4;
    bool certified = false;
    bool classify = false;
    bool list = false;
    std::string format = "json";
    std::string out;
    std::string replay;
    std::string preset;
};

std::shared_ptr<const EigenvalueSpec> spec_of(std::uint64_t m)
{
    if (m == 0) throw InvalidArgument("--m must be a positive integer");
    return std::make_shared<const EigenvalueSpec>(enumerate_lattice_points(m));
}

GridConfig grid_of(const Options& o)
{
    GridConfig cfg;
    cfg.points_per_lambda = o.points_per_lambda;
    cfg.tangency_threshold = o.eta;
    cfg.certified_mode = o.certified;
    return cfg;
}

void require_trials(const Options& o)
{
    if (o.trials == 0) throw InvalidArgument("--trials must be positive");
}

// Stability parameters: defaults for N, each overridable from the command line.
StabilityParams stability_of(const Options& o, std::size_t N)
{
    auto p = default_stability_params(N);
    if (o.alpha > 0.0) p.alpha = o.alpha;
    if (o.beta > 0.0) p.beta = o.beta;
    if (o.delta > 0.0) p.delta = o.delta;
    if (o.R > 0.0) p.R = o.R;
    return p;
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument(fmt::format("cannot open '{}'", path));
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string report_from_csv(const std::string& text, const Options& o)
{
    if (o.m == 0) throw InvalidArgument("replaying a CSV trial dump requires --m");
    std::istringstream in(text);
    const auto rec = read_trial_csv(in);
    const auto spec = spec_of(o.m);
    std::size_t suspects = 0;
    for (auto s : rec.suspects) suspects += static_cast<std::size_t>(s);
    return to_json(summarize_counts(*spec, rec.z_values, suspects, o.eps));
}

std::string run_lattice(const Options& o)
{
    return to_json(*spec_of(o.m));
}

std::string run_curve_validate(const Options& o)
{
    const auto curve = parse_curve(o.curve);
    return to_json(validate_curve(curve, o.grid), curve.describe());
}

std::string run_count(const Options& o)
{
    const auto spec = spec_of(o.m);
    const RestrictedWave rw(sample_coefficients(spec, parse_ensemble(o.ensemble), o.seed, o.trial),
                            parse_curve(o.curve));
    const auto zeros = count_zeros(rw, grid_of(o));
    if (!o.classify) return to_json(zeros);
    const auto p = stability_of(o, spec->N());
    const auto c = classify_intervals(rw, p.alpha, p.beta, p.R, p.delta, o.check_density);
    return fmt::format("{{\"zeros\":{},\"classification\":{}}}", to_json(zeros), to_json(c));
}

std::string run_mc_command(const Options& o)
{
    require_trials(o);
    const auto batch = run_mc(spec_of(o.m), parse_curve(o.curve), parse_ensemble(o.ensemble), o.trials, o.seed,
                              grid_of(o), o.workers);
    if (o.format == "csv") {
        std::ostringstream s;
        write_trial_csv(batch, s);
        return s.str();
    }
    return to_json(summarize(batch, o.eps));
}

std::string run_tail(const Options& o)
{
    if (!o.replay.empty()) return report_from_csv(read_file(o.replay), o);
    require_trials(o);
    const auto batch = run_mc(spec_of(o.m), parse_curve(o.curve), parse_ensemble(o.ensemble), o.trials, o.seed,
                              grid_of(o), o.workers);
    return to_json(summarize(batch, o.eps));
}

std::string run_repulsion(const Options& o)
{
    return to_json(repulsion_probe(spec_of(o.m), parse_curve(o.curve), o.t, parse_ensemble(o.ensemble), o.alpha,
                                   o.beta, o.trials, o.seed));
}

std::string run_sieve(const Options& o)
{
    return to_json(large_sieve_scan(spec_of(o.m), parse_curve(o.curve), parse_ensemble(o.ensemble), o.samples,
                                    o.seed, o.separation));
}

std::string run_variance_term(const Options& o)
{
    return to_json(variance_leading_term(*spec_of(o.m), parse_curve(o.curve), o.quadrature));
}

std::string run_universality(const Options& o)
{
    return to_json(universality_gap(spec_of(o.m), parse_curve(o.curve), parse_ensemble(o.ensemble),
                                    parse_ensemble(o.second_ensemble), o.trials, o.seed, grid_of(o), o.workers));
}

std::string run_scan(const Options& o)
{
    if (o.m_list.empty()) throw InvalidArgument("--m-list must name at least one m");
    if (o.eps.size() != 1) throw InvalidArgument("scan takes exactly one --eps");
    require_trials(o);
    const auto rows = concentration_scan(o.m_list, parse_curve(o.curve), parse_ensemble(o.ensemble), o.eps[0],
                                         o.trials, o.seed, grid_of(o), o.workers);
    return to_json(rows, o.eps[0]);
}

std::string run_perturb(const Options& o)
{
    return to_json(perturbation_persistence(spec_of(o.m), parse_curve(o.curve), parse_ensemble(o.ensemble),
                                            o.samples, o.seed, o.check_density, grid_of(o)));
}

std::string run_replay(const Options& o)
{
    const std::string text = read_file(o.replay);
    if (text.rfind("trial,", 0) == 0) return report_from_csv(text, o);
    return replay_json(text);
}

int run_accept(const Options& o, std::ostream& out, std::ostream& err)
{
    if (o.list || o.preset.empty()) {
        for (const auto& p : acceptance::presets()) out << fmt::format("{:<20} {}\n", p.name, p.summary);
        return kOk;
    }
    const auto* preset = acceptance::find_preset(o.preset);
    if (!preset) {
        err << fmt::format("error: unknown preset '{}'\n", o.preset);
        return kInvalidArgument;
    }
    bool all = true;
    for (const auto& r : preset->run()) {
        out << acceptance::format_result(r) << '\n';
        all = all && r.passed;
    }
    return all ? kOk : kAssertionFailed;
}

void emit(const std::string& text, const Options& o, std::ostream& out)
{
    const bool newline = text.empty() || text.back() != '\n';
    if (o.out.empty()) {
        out << text << (newline ? "\n" : "");
        return;
    }
    std::ofstream f(o.out, std::ios::binary);
    if (!f) throw InvalidArgument(fmt::format("cannot write '{}'", o.out));
    f << text << (newline ? "\n" : "");
}

std::string single_line(std::string s)
{
    for (char& c : s) {
        if (c == '\n' || c == '\r') c = ' ';
    }
    while (!s.empty() && s.back() == ' ') s.pop_back();
    return s;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    Options o;
    o.workers = default_workers();

    CLI::App app{"Arithmetic random waves restricted to curves on the flat torus", "torwave"};
    app.require_subcommand(1);
    const auto ensembles = CLI::IsMember({"gaussian", "rademacher", "uniform"});

    auto add_m = [&](CLI::App* c) { c->add_option("--m", o.m, "Eigenvalue index m (E = {|mu|^2 = m})")->required(); };
    auto add_curve = [&](CLI::App* c) {
        c->add_option("--curve", o.curve, "circle:cx,cy or oval:A,B,cx,cy")->capture_default_str();
    };
    auto add_ensemble = [&](CLI::App* c) {
        c->add_option("--ensemble", o.ensemble, "Coefficient law")->check(ensembles)->capture_default_str();
    };
    auto add_seed = [&](CLI::App* c) { c->add_option("--seed", o.seed, "Master seed")->capture_default_str(); };
    auto add_trials = [&](CLI::App* c) {
        c->add_option("--trials", o.trials, "Number of Monte Carlo trials")->required();
    };
    auto add_workers = [&](CLI::App* c) {
        c->add_option("--workers", o.workers, "Worker threads (default TORWAVE_WORKERS)")
            ->check(CLI::PositiveNumber);
    };
    auto add_grid = [&](CLI::App* c) {
        c->add_option("--points-per-lambda", o.points_per_lambda, "Sign-change grid density")
            ->capture_default_str();
        c->add_option("--eta", o.eta, "Near-tangency threshold")->capture_default_str();
        c->add_flag("--certified", o.certified, "Report the certified fraction of cells");
    };
    auto add_eps = [&](CLI::App* c) {
        c->add_option("--eps", o.eps, "Tail thresholds (fractions of lambda)")->delimiter(',')->capture_default_str();
    };
    auto add_out = [&](CLI::App* c) { c->add_option("--out", o.out, "Write output to this file"); };

    auto* lattice = app.add_subcommand("lattice", "Lattice points and multiplicity of m");
    add_m(lattice);
    lattice->add_option("--format", o.format)->check(CLI::IsMember({"json"}));
    add_out(lattice);

    auto* curve = app.add_subcommand("curve-validate", "Unit-speed, curvature and closure checks");
    add_curve(curve);
    curve->add_option("--grid", o.grid, "Sample points (>= 1000)")->capture_default_str();
    add_out(curve);

    auto* count = app.add_subcommand("count", "Zeros of one sample on the curve");
    add_m(count);
    add_curve(count);
    add_ensemble(count);
    add_seed(count);
    count->add_option("--trial", o.trial, "Trial index")->capture_default_str();
    add_grid(count);
    count->add_flag("--classify", o.classify, "Also classify intervals as stable or unstable");
    count->add_option("--alpha", o.alpha, "Override the default alpha");
    count->add_option("--beta", o.beta, "Override the default beta");
    count->add_option("--delta", o.delta, "Override the default delta");
    count->add_option("--R", o.R, "Override the default R");
    count->add_option("--check-density", o.check_density, "Samples per interval length")->capture_default_str();
    add_out(count);

    auto* mc = app.add_subcommand("mc", "Monte Carlo nodal counts");
    add_m(mc);
    add_curve(mc);
    add_ensemble(mc);
    add_trials(mc);
    add_seed(mc);
    add_workers(mc);
    add_grid(mc);
    add_eps(mc);
    mc->add_option("--format", o.format, "csv: one row per trial; json: report")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    add_out(mc);

    auto* tail = app.add_subcommand("tail", "Tail table of |Z - mean| >= eps lambda");
    tail->add_option("--m", o.m, "Eigenvalue index m");
    add_curve(tail);
    add_ensemble(tail);
    tail->add_option("--trials", o.trials, "Number of Monte Carlo trials");
    add_seed(tail);
    add_workers(tail);
    add_grid(tail);
    add_eps(tail);
    tail->add_option("--replay", o.replay, "Recompute from a CSV trial dump (needs --m)");
    add_out(tail);

    auto* repulsion = app.add_subcommand("repulsion", "P(|f(t)| <= alpha, |f'(t)| <= beta lambda)");
    add_m(repulsion);
    add_curve(repulsion);
    add_ensemble(repulsion);
    add_trials(repulsion);
    add_seed(repulsion);
    repulsion->add_option("--t", o.t, "Curve parameter")->capture_default_str();
    repulsion->add_option("--alpha", o.alpha, "Value window")->required();
    repulsion->add_option("--beta", o.beta, "Derivative window (in units of lambda)")->required();
    add_out(repulsion);

    auto* sieve = app.add_subcommand("sieve", "Large-sieve ratios over many samples");
    add_m(sieve);
    add_curve(sieve);
    add_ensemble(sieve);
    add_seed(sieve);
    sieve->add_option("--samples", o.samples)->capture_default_str();
    sieve->add_option("--separation", o.separation)->capture_default_str();
    add_out(sieve);

    auto* vterm = app.add_subcommand("variance-term", "Leading variance term by quadrature");
    add_m(vterm);
    add_curve(vterm);
    vterm->add_option("--quadrature", o.quadrature, "Gauss-Legendre nodes (>= 64)")->capture_default_str();
    add_out(vterm);

    auto* univ = app.add_subcommand("universality", "Mean and variance gap between two ensembles");
    add_m(univ);
    add_curve(univ);
    add_ensemble(univ);
    univ->add_option("--versus", o.second_ensemble, "Second ensemble")->check(ensembles)->capture_default_str();
    add_trials(univ);
    add_seed(univ);
    add_workers(univ);
    add_grid(univ);
    add_out(univ);

    auto* scan = app.add_subcommand("scan", "Tail at one eps across several m");
    scan->add_option("--m-list", o.m_list, "Comma-separated m values")->delimiter(',')->required();
    add_curve(scan);
    add_ensemble(scan);
    add_trials(scan);
    add_seed(scan);
    add_workers(scan);
    add_grid(scan);
    scan->add_option("--eps", o.eps, "Tail threshold")->delimiter(',')->required();
    add_out(scan);

    auto* perturb = app.add_subcommand("perturb", "Root persistence under small perturbations");
    add_m(perturb);
    add_curve(perturb);
    add_ensemble(perturb);
    add_seed(perturb);
    perturb->add_option("--samples", o.samples)->capture_default_str();
    perturb->add_option("--check-density", o.check_density)->capture_default_str();
    add_grid(perturb);
    add_out(perturb);

    auto* replay = app.add_subcommand("replay", "Re-derive statistics from emitted JSON or CSV");
    replay->add_option("file", o.replay, "JSON document or CSV trial dump")->required();
    replay->add_option("--m", o.m, "Eigenvalue index (CSV input only)");
    add_eps(replay);
    add_out(replay);

    auto* accept = app.add_subcommand("accept", "Run a named acceptance preset");
    accept->add_option("name", o.preset, "Preset name");
    accept->add_flag("--list", o.list, "List presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << single_line(e.what()) << '\n';
        return kInvalidArgument;
    }

    try {
        if (accept->parsed()) return run_accept(o, out, err);
        std::string result;
        if (lattice->parsed()) result = run_lattice(o);
        else if (curve->parsed()) result = run_curve_validate(o);
        else if (count->parsed()) result = run_count(o);
        else if (mc->parsed()) result = run_mc_command(o);
        else if (tail->parsed()) result = run_tail(o);
        else if (repulsion->parsed()) result = run_repulsion(o);
        else if (sieve->parsed()) result = run_sieve(o);
        else if (vterm->parsed()) result = run_variance_term(o);
        else if (univ->parsed()) result = run_universality(o);
        else if (scan->parsed()) result = run_scan(o);
        else if (perturb->parsed()) result = run_perturb(o);
        else if (replay->parsed()) result = run_replay(o);
        emit(result, o, out);
        return kOk;
    } catch (const InvalidArgument& e) {
        err << "error: " << single_line(e.what()) << '\n';
        return kInvalidArgument;
    } catch (const std::exception& e) {
        err << "numeric failure: " << single_line(e.what()) << '\n';
        return kNumericFailure;
    }
}

}  // namespace torwave::cli
