#include "magspec/agmon.hpp"
#include "magspec/bounds.hpp"
#include "magspec/degennes.hpp"
#include "magspec/diagnostics.hpp"
#include "magspec/eigensolver.hpp"
#include "magspec/experiments.hpp"
#include "magspec/io.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

using namespace magspec;
using json = nlohmann::json;

namespace {

/// Inline JSON when it starts with '{', otherwise a file path.
json descriptor(const std::string& arg) {
    auto first = arg.find_first_not_of(" \t\n");
    if (first != std::string::npos && arg[first] == '{') {
        try {
            return json::parse(arg);
        } catch (const json::parse_error& e) {
            throw InvalidArgument(std::string("malformed inline JSON: ") + e.what());
        }
    }
    return io::read_json_file(arg);
}

/// a:b:n (linear) or a:b:n:log (geometric).
std::vector<double> parse_range(const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() == 1) return {std::stod(parts[0])};
    if (parts.size() != 3 && !(parts.size() == 4 && parts[3] == "log"))
        throw InvalidArgument("range must be a:b:n or a:b:n:log, got '" + s + "'");
    double a = std::stod(parts[0]), b = std::stod(parts[1]);
    int n = std::stoi(parts[2]);
    if (n < 1) throw InvalidArgument("range needs n >= 1");
    bool geo = parts.size() == 4;
    if (geo && !(a > 0 && b > 0)) throw InvalidArgument("geometric range needs positive ends");
    std::vector<double> out;
    for (int i = 0; i < n; ++i) {
        double t = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
        out.push_back(geo ? a * std::pow(b / a, t) : a + (b - a) * t);
    }
    return out;
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") std::cout << text;
    else io::write_text_atomic(path, text);
}

std::string stem_of(const std::string& path) {
    std::filesystem::path p(path);
    return (p.parent_path() / p.stem()).string();
}

double auto_h(double q) { return 0.4 / std::sqrt(q); }

int exit_for(const experiments::RunResult& r) { return r.manifest.all_converged() ? 0 : 3; }

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Magnetic Neumann Laplacian spectra and surface localization"};
    app.require_subcommand(1);
    // -h would clash with the grid spacing option --h
    app.set_help_flag("--help", "Print this help message and exit");

    // degennes
    double dg_tol = 1e-6, dg_h = 1e-3, dg_T = 20;
    std::string dg_out, dg_curve;
    int dg_threads = 1;
    auto* dg = app.add_subcommand("degennes", "Minimize the de Gennes function on the discretized half-line");
    dg->add_option("--tol", dg_tol, "xi tolerance");
    dg->add_option("--h", dg_h, "half-line spacing");
    dg->add_option("--T", dg_T, "truncation length");
    dg->add_option("--out", dg_out, "output path (stdout if absent)");
    dg->add_option("--curve", dg_curve, "emit the sampled curve lo:hi:n as CSV instead");
    dg->add_option("--threads", dg_threads);

    // eig
    std::string eg_domain, eg_field = R"({"type":"linear","B0":[0,0,1]})", eg_bc = "neumann", eg_out, eg_vec,
                eg_pre = "auto";
    double eg_q = 0, eg_h = 0, eg_tol = 1e-8;
    int eg_iter = 3000;
    auto* eg = app.add_subcommand("eig", "Lowest eigenpair of the discrete magnetic Laplacian");
    eg->add_option("--domain", eg_domain, "domain descriptor (file or inline JSON)")->required();
    eg->add_option("--field", eg_field, "field descriptor (file or inline JSON)");
    eg->add_option("--q", eg_q, "coupling")->required();
    eg->add_option("--bc", eg_bc, "neumann | dirichlet");
    eg->add_option("--h", eg_h, "grid spacing (default 0.4/sqrt(q))");
    eg->add_option("--tol", eg_tol);
    eg->add_option("--max-iter", eg_iter);
    eg->add_option("--preconditioner", eg_pre, "auto | jacobi | ldlt");
    eg->add_option("--out", eg_out, "result JSON (stdout if absent)");
    eg->add_option("--vector", eg_vec, "eigenvector dump (default <out>.bin when --out is given)");

    // quasimode
    std::string qm_domain, qm_field = R"({"type":"linear","B0":[0,0,1]})", qm_out;
    double qm_q = 0, qm_h = 0, qm_delta = 1.0 / 3, qm_eps = 0.125, qm_scale = 4, qm_C = 1;
    bool qm_solve = false;
    auto* qm = app.add_subcommand("quasimode", "Boundary quasimode certificate and bound evaluation");
    qm->add_option("--domain", qm_domain)->required();
    qm->add_option("--field", qm_field);
    qm->add_option("--q", qm_q)->required();
    qm->add_option("--h", qm_h, "grid spacing (default 0.4/sqrt(q))");
    qm->add_option("--delta", qm_delta);
    qm->add_option("--epsilon", qm_eps);
    qm->add_option("--cutoff-scale", qm_scale);
    qm->add_option("--C", qm_C);
    qm->add_flag("--solve", qm_solve, "also compute the eigenvalue");
    qm->add_option("--out", qm_out, "CSV path (stdout if absent)");

    // scan-helical
    std::string sh_qtau, sh_domain = R"({"type":"disk","center":[0,0,0],"radius":1})", sh_out, sh_manifest, sh_svg;
    double sh_x = 0, sh_c0 = 1, sh_h = 0;
    std::vector<double> sh_tau;
    int sh_rot = 16, sh_threads = 1;
    std::uint64_t sh_seed = 0;
    auto* sh = app.add_subcommand("scan-helical", "Minimum over sampled helical directors");
    sh->add_option("--qtau", sh_qtau, "q tau range a:b:n[:log]")->required();
    sh->add_option("--x", sh_x);
    sh->add_option("--c0", sh_c0);
    sh->add_option("--tau", sh_tau, "explicit tau (one value or one per q tau)");
    sh->add_option("--rotations", sh_rot);
    sh->add_option("--seed", sh_seed);
    sh->add_option("--domain", sh_domain);
    sh->add_option("--h", sh_h);
    sh->add_option("--threads", sh_threads);
    sh->add_option("--out", sh_out);
    sh->add_option("--manifest", sh_manifest);
    sh->add_option("--svg", sh_svg);

    // scan-domain
    std::string sd_R, sd_domain = R"({"type":"disk","center":[0,0,0],"radius":1})",
                      sd_field = R"({"type":"linear","B0":[0,0,1]})", sd_out, sd_manifest, sd_svg;
    double sd_q = 0, sd_y = 0, sd_c0 = 4, sd_h = 0;
    int sd_threads = 1;
    auto* sd = app.add_subcommand("scan-domain", "Eigenvalues on dilated domains");
    sd->add_option("--q", sd_q)->required();
    sd->add_option("--R", sd_R, "dilation range a:b:n[:log]")->required();
    sd->add_option("--y", sd_y);
    sd->add_option("--c0", sd_c0);
    sd->add_option("--domain", sd_domain);
    sd->add_option("--field", sd_field);
    sd->add_option("--h", sd_h);
    sd->add_option("--threads", sd_threads);
    sd->add_option("--out", sd_out);
    sd->add_option("--manifest", sd_manifest);
    sd->add_option("--svg", sd_svg);

    // agmon
    std::string ag_eig, ag_gamma = "auto", ag_window = "auto", ag_out, ag_summary;
    double ag_alpha_frac = 0.5, ag_eps = 1.0, ag_C = 1.0;
    auto* ag = app.add_subcommand("agmon", "Normal decay of a stored eigenfunction");
    ag->add_option("--eig", ag_eig, "result JSON written by 'magspec eig'")->required();
    ag->add_option("--gamma", ag_gamma, "ramp width or auto");
    ag->add_option("--alpha-frac", ag_alpha_frac, "alpha as a fraction of (1 - Theta0)^(1/2) sqrt(q)");
    ag->add_option("--eps", ag_eps);
    ag->add_option("--C", ag_C, "constant in the weighted bound");
    ag->add_option("--window", ag_window, "fit window a:b or auto");
    ag->add_option("--out", ag_out, "shell CSV (stdout if absent)");
    ag->add_option("--summary", ag_summary, "summary JSON path (stderr if absent)");

    // run
    std::string rn_config;
    int rn_threads = 0;
    bool rn_dry = false;
    auto* rn = app.add_subcommand("run", "Configuration-driven experiment");
    rn->add_option("--config", rn_config)->required();
    rn->add_option("--threads", rn_threads);
    rn->add_flag("--dry-run", rn_dry, "validate and list jobs without computing");

    for (auto* sub : app.get_subcommands({})) sub->set_help_flag("--help", "Print this help message and exit");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*dg) {
            degennes::HalfLineDiscretization disc{dg_T, dg_h};
            disc.validate();
            if (!dg_curve.empty()) {
                auto r = parse_range(dg_curve);
                if (r.size() < 2) throw InvalidArgument("curve needs at least two points");
                auto pts = degennes::sample_curve(r.front(), r.back(), static_cast<int>(r.size()), disc, dg_threads);
                std::string s = "xi,mu\n";
                char buf[64];
                for (const auto& p : pts) {
                    std::snprintf(buf, sizeof buf, "%.12g,%.12g\n", p.xi, p.mu);
                    s += buf;
                }
                emit(dg_out, s);
                return 0;
            }
            auto m = degennes::minimize_mu(disc, dg_tol);
            emit(dg_out, io::degennes_to_json(m, {1, 2, 3, 4, 5, 6, 8, 10}).dump(2) + "\n");
            return 0;
        }

        if (*eg) {
            const Domain dom = io::domain_from_json(descriptor(eg_domain));
            const FieldPtr A = io::field_from_json(descriptor(eg_field));
            const double h = eg_h > 0 ? eg_h : auto_h(eg_q);
            auto grid = std::make_shared<const Grid>(Grid::build(dom, h));
            const auto bc = boundary_condition_from_string(eg_bc);
            const auto op = assemble(dom, *A, eg_q, bc, grid);
            EigenOptions eo;
            eo.tol = eg_tol;
            eo.max_iter = eg_iter;
            eo.preconditioner =
                eg_pre == "auto" ? Preconditioner::Automatic : preconditioner_from_string(eg_pre);
            const auto er = lowest_eigenpair(op, eo);
            json out = {{"domain", io::domain_to_json(dom)},
                        {"field", io::field_to_json(*A)},
                        {"q", eg_q},
                        {"bc", to_string(bc)},
                        {"h", h},
                        {"nodes", grid->size()},
                        {"lambda", er.lambda},
                        {"lambda_over_q", eg_q > 0 ? er.lambda / eg_q : 0.0},
                        {"residual", er.residual},
                        {"converged", er.converged},
                        {"iterations", er.iterations},
                        {"second_lambda", er.second_lambda},
                        {"preconditioner", er.preconditioner}};
            std::string vec = eg_vec;
            if (vec.empty() && !eg_out.empty()) vec = stem_of(eg_out) + ".bin";
            if (!vec.empty()) {
                io::write_vector_binary(vec, er.vector);
                const std::string idx = stem_of(vec) + "_nodes.json";
                io::write_text_atomic(idx, io::grid_nodes_to_json(*grid).dump() + "\n");
                out["vector_file"] = std::filesystem::absolute(vec).string();
                out["node_index_file"] = std::filesystem::absolute(idx).string();
            }
            emit(eg_out, out.dump(2) + "\n");
            return er.converged ? 0 : 3;
        }

        if (*qm) {
            const Domain dom = io::domain_from_json(descriptor(qm_domain));
            const FieldPtr A = io::field_from_json(descriptor(qm_field));
            const double h = qm_h > 0 ? qm_h : auto_h(qm_q);
            auto grid = std::make_shared<const Grid>(Grid::build(dom, h));
            auto model = std::make_shared<const degennes::DeGennesMinimum>(
                degennes::minimize_mu(degennes::HalfLineDiscretization{}, 1e-8));
            bounds::CertificateOptions co;
            co.cutoff_scale = qm_scale;
            co.params.epsilon = qm_eps;
            co.params.delta = qm_delta;
            co.params.C = qm_C;
            co.solve = qm_solve;
            const auto rep = bounds::quasimode_certificate(dom, A, qm_q, qm_delta, grid, model, co);
            experiments::CsvRow row{qm_q,
                                    qm_q,
                                    rep.computed_mu.value_or(std::nan("")),
                                    *rep.quasimode_rayleigh,
                                    rep.lower_rhs,
                                    rep.upper_rhs,
                                    h,
                                    rep.residual.value_or(std::nan(""))};
            emit(qm_out, std::string(experiments::csv_header) + "\n" + experiments::format_row(row) + "\n");
            return 0;
        }

        if (*sh) {
            experiments::ExperimentConfig c;
            c.scenario = experiments::Scenario::Helical;
            c.domain = descriptor(sh_domain);
            c.qtau = parse_range(sh_qtau);
            c.tau = sh_tau;
            c.x = sh_x;
            c.c0 = sh_c0;
            c.rotations = sh_rot;
            c.seed = sh_seed;
            if (sh_h > 0) c.h = sh_h;
            c.threads = sh_threads;
            c.csv = sh_out;
            c.manifest = sh_manifest;
            c.svg = sh_svg;
            auto r = experiments::run(c);
            if (sh_out.empty()) std::cout << r.csv;
            return exit_for(r);
        }

        if (*sd) {
            experiments::ExperimentConfig c;
            c.scenario = experiments::Scenario::LargeDomain;
            c.domain = descriptor(sd_domain);
            c.field = descriptor(sd_field);
            c.q = {sd_q};
            c.R = parse_range(sd_R);
            c.y = sd_y;
            c.c0 = sd_c0;
            if (sd_h > 0) c.h = sd_h;
            c.threads = sd_threads;
            c.csv = sd_out;
            c.manifest = sd_manifest;
            c.svg = sd_svg;
            auto r = experiments::run(c);
            if (sd_out.empty()) std::cout << r.csv;
            return exit_for(r);
        }

        if (*ag) {
            const json e = io::read_json_file(ag_eig);
            if (!e.contains("vector_file")) throw InvalidArgument("eigen result has no vector_file; rerun eig with --out");
            const Domain dom = io::domain_from_json(e.at("domain"));
            const FieldPtr A = io::field_from_json(e.at("field"));
            const double q = e.at("q").get<double>(), h = e.at("h").get<double>(), mu = e.at("lambda").get<double>();
            auto grid = std::make_shared<const Grid>(Grid::build(dom, h));
            const CVector u = io::read_vector_binary(e.at("vector_file").get<std::string>());
            if (static_cast<std::size_t>(u.size()) != grid->size())
                throw InvalidArgument("stored vector does not match the rebuilt grid");
            const auto model = degennes::minimize_mu(degennes::HalfLineDiscretization{}, 1e-8);
            const double gamma = ag_gamma == "auto" ? std::min(0.25, 0.5 * dom.inradius()) : std::stod(ag_gamma);
            std::pair<double, double> window{0.0, 0.0};
            if (ag_window != "auto") {
                auto colon = ag_window.find(':');
                if (colon == std::string::npos) throw InvalidArgument("window must be a:b or auto");
                window = {std::stod(ag_window.substr(0, colon)), std::stod(ag_window.substr(colon + 1))};
            }
            const double rate = agmon::main_rate(q, model.theta0);
            const double alpha = ag_alpha_frac * rate;
            const auto decay = agmon::fit_decay(u, dom, *grid, window, rate);
            const auto w = agmon::make_weight(*grid, gamma, alpha);
            EigenOptions de;
            de.tol = 1e-3; // value-only use; the bulk cluster is nearly degenerate
            const auto d = lowest_eigenpair(assemble(dom, *A, q, BoundaryCondition::Dirichlet, grid), de);
            const double amax = agmon::admissible_alpha(mu, d.lambda, ag_eps);
            json summary = {{"q", q},
                            {"mu", mu},
                            {"mu0", d.lambda},
                            {"mu0_residual", d.residual},
                            {"gamma", gamma},
                            {"alpha", alpha},
                            {"alpha_admissible", amax},
                            {"weighted_h1", agmon::weighted_h1_norm(u, w, dom, *grid)},
                            {"fitted_rate", decay.fitted_rate()},
                            {"theoretical_rate", rate},
                            {"ratio", decay.ratio()},
                            {"fit_window", json::array({decay.fit_window.first, decay.fit_window.second})},
                            {"shells_used", decay.shells_used},
                            {"mass_within_5_over_sqrt_q", agmon::boundary_mass_fraction(u, *grid, 5 / std::sqrt(q))}};
            summary["rhs"] = alpha < amax ? json(agmon::agmon_rhs(mu, d.lambda, ag_eps, gamma, alpha, ag_C)) : json();
            emit(ag_out, experiments::agmon_csv(decay));
            if (ag_summary.empty()) std::cerr << summary.dump(2) << "\n";
            else io::write_text_atomic(ag_summary, summary.dump(2) + "\n");
            return 0;
        }

        if (*rn) {
            auto cfg = experiments::ExperimentConfig::from_json(io::read_json_file(rn_config));
            experiments::RunOptions ro;
            ro.dry_run = rn_dry;
            if (rn_threads > 0) ro.threads = rn_threads;
            auto r = experiments::run(cfg, ro);
            if (rn_dry) {
                std::cout << r.manifest.to_json().dump(2) << "\n";
                return 0;
            }
            if (cfg.csv.empty()) std::cout << r.csv;
            if (cfg.manifest.empty()) std::cerr << r.manifest.to_json().dump(2) << "\n";
            return exit_for(r);
        }
    } catch (const InvalidArgument& e) {
        std::cerr << "magspec: invalid input: " << e.what() << "\n";
        return 2;
    } catch (const RegimeError& e) {
        std::cerr << "magspec: regime violation: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "magspec: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
