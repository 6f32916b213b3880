#include "magspec/experiments.hpp"

#include "magspec/diagnostics.hpp"
#include "magspec/parallel.hpp"

#include <Eigen/Core>
#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

namespace magspec::experiments {

namespace {

constexpr const char* library_version = "0.1.0";
const double nan = std::numeric_limits<double>::quiet_NaN();

std::vector<double> number_list(const json& j, const char* key) {
    std::vector<double> out;
    if (!j.contains(key)) return out;
    const auto& v = j.at(key);
    if (v.is_number()) return {v.get<double>()};
    if (!v.is_array()) throw InvalidArgument(std::string("'") + key + "' must be a number or a list");
    for (const auto& e : v) {
        if (!e.is_number()) throw InvalidArgument(std::string("'") + key + "' entries must be numeric");
        out.push_back(e.get<double>());
    }
    return out;
}

void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [k, v] : j.items())
        if (!ok.count(k)) throw InvalidArgument("unknown key '" + k + "' in " + where);
}

/// Best rational with denominator <= 1000 when it reproduces x to 1e-12.
std::optional<bounds::Rational> as_rational(double x) {
    for (long long d = 1; d <= 1000; ++d) {
        double n = std::round(x * static_cast<double>(d));
        if (std::abs(n / static_cast<double>(d) - x) <= 1e-12) return bounds::Rational(static_cast<long long>(n), d);
    }
    return std::nullopt;
}

std::string rational_string(const bounds::Rational& r) {
    std::ostringstream os;
    os << r.numerator();
    if (r.denominator() != 1) os << "/" << r.denominator();
    return os.str();
}

Preconditioner parse_preconditioner(const std::string& s) {
    if (s == "auto") return Preconditioner::Automatic;
    return preconditioner_from_string(s);
}

std::string fmt(double x) {
    if (std::isnan(x)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

struct JobSpec {
    double q = 0;     ///< coupling (q tau for helical)
    double param = 0; ///< tau or R; q for asymptotic/agmon
};

struct Exps {
    double epsilon, delta;
    json echo;
};

Exps exponents_for(const ExperimentConfig& c) {
    double eps = 0.125, del = 1.0 / 3;
    std::optional<bounds::Rational> rx;
    if (c.scenario == Scenario::Helical || c.scenario == Scenario::LargeDomain) {
        double x = c.scenario == Scenario::Helical ? c.x : c.y / (1 + 2 * c.y);
        auto e = bounds::choose_exponents(x);
        eps = e.epsilon;
        del = e.delta;
        if (auto r = as_rational(c.scenario == Scenario::Helical ? c.x : c.y)) {
            bounds::Rational xr = c.scenario == Scenario::Helical ? *r : *r / (1 + 2 * *r);
            rx = xr;
        }
    }
    if (c.epsilon) eps = *c.epsilon;
    if (c.delta) del = *c.delta;
    json echo = {{"epsilon", eps}, {"delta", del}};
    if (rx && !c.epsilon && !c.delta) {
        auto e = bounds::choose_exponents(*rx);
        echo["epsilon_exact"] = rational_string(e.epsilon);
        echo["delta_exact"] = rational_string(e.delta);
        echo["x_effective"] = rational_string(*rx);
        auto rates = bounds::helical_rates(*rx);
        echo["lower_rate"] = rational_string(rates.lower);
        echo["upper_rate"] = rational_string(rates.upper);
    } else if (auto re = as_rational(eps), rd = as_rational(del); re && rd) {
        echo["epsilon_exact"] = rational_string(*re);
        echo["delta_exact"] = rational_string(*rd);
    }
    return {eps, del, echo};
}

std::vector<JobSpec> job_list(const ExperimentConfig& c) {
    std::vector<JobSpec> jobs;
    switch (c.scenario) {
    case Scenario::Asymptotic:
    case Scenario::Agmon:
        for (double q : c.q) jobs.push_back({q, q});
        break;
    case Scenario::Helical:
        for (std::size_t i = 0; i < c.qtau.size(); ++i) {
            double tau = c.tau.empty()       ? c.c0 * std::pow(c.qtau[i], c.x)
                         : c.tau.size() == 1 ? c.tau[0]
                                             : c.tau[i];
            jobs.push_back({c.qtau[i], tau});
        }
        break;
    case Scenario::LargeDomain:
        for (double R : c.R) jobs.push_back({c.q.front(), R});
        break;
    }
    return jobs;
}

/// Largest coupling seen by any grid in the run.
double effective_q_max(const ExperimentConfig& c) {
    double m = 0;
    for (const auto& j : job_list(c)) {
        double e = c.scenario == Scenario::LargeDomain ? j.q * j.param * j.param : j.q;
        m = std::max(m, e);
    }
    return m;
}

} // namespace

std::string to_string(Scenario s) {
    switch (s) {
    case Scenario::Asymptotic: return "asymptotic";
    case Scenario::Helical: return "helical";
    case Scenario::LargeDomain: return "large_domain";
    case Scenario::Agmon: return "agmon";
    }
    return "?";
}

Scenario scenario_from_string(const std::string& s) {
    if (s == "asymptotic") return Scenario::Asymptotic;
    if (s == "helical") return Scenario::Helical;
    if (s == "large_domain") return Scenario::LargeDomain;
    if (s == "agmon") return Scenario::Agmon;
    throw InvalidArgument("unknown scenario '" + s + "'");
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    if (!j.is_object()) throw InvalidArgument("experiment config must be a JSON object");
    reject_unknown(j,
                   {"scenario", "domain", "field", "q", "qtau", "tau", "x", "c0", "rotations", "helical_mode", "R",
                    "y", "x0", "grid", "solver", "bounds", "refine", "agmon", "degennes", "output", "threads", "seed"},
                   "config");
    ExperimentConfig c;
    if (!j.contains("scenario")) throw InvalidArgument("config needs a 'scenario'");
    c.scenario = scenario_from_string(j.at("scenario").get<std::string>());
    if (!j.contains("domain")) throw InvalidArgument("config needs a 'domain'");
    c.domain = j.at("domain");
    if (j.contains("field")) c.field = j.at("field");
    c.q = number_list(j, "q");
    c.qtau = number_list(j, "qtau");
    c.tau = number_list(j, "tau");
    c.R = number_list(j, "R");
    c.x = j.value("x", 0.0);
    c.y = j.value("y", 0.0);
    c.c0 = j.value("c0", 1.0);
    c.rotations = j.value("rotations", 32);
    c.helical_mode = j.value("helical_mode", std::string("auto"));
    if (j.contains("x0")) c.x0 = io::vec3_from_json(j.at("x0"));
    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        reject_unknown(g, {"h"}, "grid");
        if (g.contains("h") && g.at("h").is_number()) c.h = g.at("h").get<double>();
        else if (g.contains("h") && g.at("h") != "auto") throw InvalidArgument("grid.h must be a number or \"auto\"");
    }
    if (j.contains("solver")) {
        const auto& s = j.at("solver");
        reject_unknown(s, {"tol", "max_iter", "preconditioner"}, "solver");
        c.tol = s.value("tol", c.tol);
        c.max_iter = s.value("max_iter", c.max_iter);
        c.preconditioner = s.value("preconditioner", c.preconditioner);
    }
    if (j.contains("bounds")) {
        const auto& b = j.at("bounds");
        reject_unknown(b, {"C", "epsilon", "delta", "quasimode", "cutoff_scale"}, "bounds");
        c.C = b.value("C", c.C);
        if (b.contains("epsilon")) c.epsilon = b.at("epsilon").get<double>();
        if (b.contains("delta")) c.delta = b.at("delta").get<double>();
        c.quasimode = b.value("quasimode", c.quasimode);
        c.cutoff_scale = b.value("cutoff_scale", c.cutoff_scale);
    }
    c.refine = j.value("refine", false);
    if (j.contains("agmon")) {
        const auto& a = j.at("agmon");
        reject_unknown(a, {"gamma", "alpha_frac", "eps"}, "agmon");
        c.gamma = a.value("gamma", c.gamma);
        c.alpha_frac = a.value("alpha_frac", c.alpha_frac);
        c.agmon_eps = a.value("eps", c.agmon_eps);
    }
    if (j.contains("degennes")) {
        const auto& d = j.at("degennes");
        reject_unknown(d, {"T", "h", "tol"}, "degennes");
        c.model.T = d.value("T", c.model.T);
        c.model.h = d.value("h", c.model.h);
        c.model_tol = d.value("tol", c.model_tol);
    }
    if (j.contains("output")) {
        const auto& o = j.at("output");
        reject_unknown(o, {"csv", "manifest", "svg"}, "output");
        c.csv = o.value("csv", std::string());
        c.manifest = o.value("manifest", std::string());
        c.svg = o.value("svg", std::string());
    }
    c.threads = j.value("threads", 1);
    c.seed = j.value("seed", static_cast<std::uint64_t>(0));
    return c;
}

json ExperimentConfig::to_json() const {
    json j = {{"scenario", experiments::to_string(scenario)},
              {"domain", domain},
              {"field", field},
              {"q", q},
              {"qtau", qtau},
              {"tau", tau},
              {"x", x},
              {"c0", c0},
              {"rotations", rotations},
              {"helical_mode", helical_mode},
              {"R", R},
              {"y", y},
              {"x0", io::vec3_to_json(x0)},
              {"solver", {{"tol", tol}, {"max_iter", max_iter}, {"preconditioner", preconditioner}}},
              {"refine", refine},
              {"agmon", {{"gamma", gamma}, {"alpha_frac", alpha_frac}, {"eps", agmon_eps}}},
              {"degennes", {{"T", model.T}, {"h", model.h}, {"tol", model_tol}}},
              {"output", {{"csv", csv}, {"manifest", manifest}, {"svg", svg}}},
              {"threads", threads},
              {"seed", seed}};
    j["grid"] = h ? json{{"h", *h}} : json{{"h", "auto"}};
    json b = {{"C", C}, {"quasimode", quasimode}, {"cutoff_scale", cutoff_scale}};
    if (epsilon) b["epsilon"] = *epsilon;
    if (delta) b["delta"] = *delta;
    j["bounds"] = b;
    return j;
}

double ExperimentConfig::grid_spacing() const {
    if (h) return *h;
    double qm = effective_q_max(*this);
    if (!(qm > 0)) throw InvalidArgument("cannot choose an automatic grid without couplings");
    return 0.4 / std::sqrt(qm);
}

void ExperimentConfig::validate() const {
    const Domain dom = io::domain_from_json(domain);
    if (scenario != Scenario::Helical) {
        if (field.is_null()) throw InvalidArgument("scenario '" + experiments::to_string(scenario) + "' needs a field");
        (void)io::field_from_json(field);
    }
    auto positive = [](const std::vector<double>& v, const char* name) {
        for (double e : v)
            if (!(e > 0) || !std::isfinite(e)) throw InvalidArgument(std::string(name) + " entries must be positive");
    };
    switch (scenario) {
    case Scenario::Asymptotic:
    case Scenario::Agmon:
        if (q.empty()) throw InvalidArgument("empty parameter grid: 'q' has no entries");
        positive(q, "q");
        break;
    case Scenario::Helical: {
        if (qtau.empty()) throw InvalidArgument("empty parameter grid: 'qtau' has no entries");
        positive(qtau, "qtau");
        positive(tau, "tau");
        if (tau.size() > 1 && tau.size() != qtau.size())
            throw InvalidArgument("'tau' must have one entry or match 'qtau'");
        if (!(x >= 0 && x < 0.5)) throw InvalidArgument("x must lie in [0, 1/2)");
        if (!(c0 > 0)) throw InvalidArgument("c0 must be positive");
        if (rotations < 1) throw InvalidArgument("rotations must be at least 1");
        if (helical_mode != "auto" && helical_mode != "2d" && helical_mode != "3d")
            throw InvalidArgument("helical_mode must be auto, 2d or 3d");
        if (helical_mode == "2d" && dom.dimension() != 2) throw InvalidArgument("2d helical mode needs a disk");
        if (helical_mode == "3d" && dom.dimension() != 3) throw InvalidArgument("3d helical mode needs a 3D domain");
        for (const auto& jb : job_list(*this)) {
            double cap = c0 * std::pow(jb.q, x);
            if (jb.param > cap * (1 + 1e-12)) {
                std::ostringstream os;
                os << "helical regime violated: tau=" << jb.param << " > c0 (q tau)^x=" << cap << " at q tau=" << jb.q;
                throw RegimeError(os.str());
            }
        }
        break;
    }
    case Scenario::LargeDomain:
        if (R.empty()) throw InvalidArgument("empty parameter grid: 'R' has no entries");
        if (q.size() != 1) throw InvalidArgument("large_domain needs exactly one 'q'");
        positive(R, "R");
        positive(q, "q");
        if (!(y >= 0)) throw InvalidArgument("y must be nonnegative");
        if (!(c0 > 0)) throw InvalidArgument("c0 must be positive");
        for (double r : R) {
            double cap = c0 * std::pow(q.front(), y);
            if (r > cap * (1 + 1e-12)) {
                std::ostringstream os;
                os << "large-domain regime violated: R=" << r << " > c0 q^y=" << cap;
                throw RegimeError(os.str());
            }
        }
        break;
    }
    if (!(tol > 0)) throw InvalidArgument("solver tol must be positive");
    if (max_iter < 1) throw InvalidArgument("solver max_iter must be positive");
    (void)parse_preconditioner(preconditioner);
    if (threads < 1) throw InvalidArgument("threads must be at least 1");
    if (!(C >= 0)) throw InvalidArgument("C must be nonnegative");
    if (!(cutoff_scale > 0)) throw InvalidArgument("cutoff_scale must be positive");
    if (epsilon && !(*epsilon > 0 && *epsilon < 0.5)) throw InvalidArgument("epsilon must lie in (0, 1/2)");
    if (delta && !(*delta > 0 && *delta < 0.5)) throw InvalidArgument("delta must lie in (0, 1/2)");
    if (!(gamma > 0)) throw InvalidArgument("agmon gamma must be positive");
    if (!(alpha_frac > 0 && alpha_frac < 1)) throw InvalidArgument("agmon alpha_frac must lie in (0, 1)");
    if (!(agmon_eps > 0)) throw InvalidArgument("agmon eps must be positive");
    model.validate();
    const double hh = grid_spacing();
    if (!(hh > 0)) throw InvalidArgument("grid spacing must be positive");
    const double qm = effective_q_max(*this);
    if (hh > 1.0 / std::sqrt(qm))
        throw DiscretizationError("h=" + fmt(hh) + " exceeds 1/sqrt(q)=" + fmt(1.0 / std::sqrt(qm)));
}

std::string format_row(const CsvRow& r) {
    return fmt(r.q) + "," + fmt(r.tau_or_R) + "," + fmt(r.lambda) + "," + fmt(r.certificate) + "," +
           fmt(r.lower_rhs) + "," + fmt(r.upper_rhs) + "," + fmt(r.h) + "," + fmt(r.residual);
}

std::string agmon_csv(const agmon::DecayReport& rep) {
    std::string s = std::string(agmon_csv_header) + "\n";
    for (const auto& sh : rep.shells) {
        double lg = sh.max_abs_u > 0 ? std::log(sh.max_abs_u) : -std::numeric_limits<double>::infinity();
        s += fmt(sh.d) + "," + fmt(sh.max_abs_u) + "," + (std::isfinite(lg) ? fmt(lg) : std::string("-inf")) + "," +
             fmt(rep.fitted_slope) + "," + fmt(rep.theoretical_rate) + "\n";
    }
    return s;
}

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw Error("SHA-256 digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 0xf];
    }
    return out;
}

std::string config_hash(const json& j) { return sha256_hex(j.dump()); }

json RunManifest::to_json() const {
    json jobs_j = json::array();
    for (const auto& jb : jobs) {
        json o = {{"id", jb.id},           {"status", jb.status},   {"converged", jb.converged},
                  {"wall_seconds", jb.wall_seconds}, {"params", jb.params}, {"refinement", jb.refinement},
                  {"csv_row", jb.csv_row}};
        if (!jb.extra.is_null()) o["extra"] = jb.extra;
        if (!jb.error.empty()) o["error"] = jb.error;
        jobs_j.push_back(std::move(o));
    }
    return {{"config_hash", config_hash},
            {"versions", versions},
            {"scenario", experiments::to_string(scenario)},
            {"theta0", theta0},
            {"xi0", xi0},
            {"exponents", exponents},
            {"all_converged", all_converged()},
            {"jobs", std::move(jobs_j)}};
}

bool RunManifest::all_converged() const {
    if (jobs.empty()) return false;
    for (const auto& j : jobs)
        if (!j.converged) return false;
    return true;
}

namespace {

struct JobOutcome {
    CsvRow row;
    bool converged = false;
    json refinement = json::object();
    json extra;
    std::string side_csv;
};

json refinement_record(double h, double lam, double lam_half) {
    double rel = std::abs(lam - lam_half) / std::abs(lam_half);
    return {{"h", h}, {"h_half", h / 2}, {"lambda", lam}, {"lambda_half", lam_half}, {"relative_change", rel},
            {"stable", rel <= 0.02}};
}

class Runner {
public:
    Runner(const ExperimentConfig& c, std::shared_ptr<const degennes::DeGennesMinimum> model, Exps e)
        : c_(c), dom_(io::domain_from_json(c.domain)), model_(std::move(model)), exps_(std::move(e)) {
        if (!c.field.is_null()) A_ = io::field_from_json(c.field);
        h_ = c.grid_spacing();
        eig_.tol = c.tol;
        eig_.max_iter = c.max_iter;
        eig_.preconditioner = parse_preconditioner(c.preconditioner);
        grid_ = std::make_shared<const Grid>(Grid::build(dom_, h_));
    }

    bounds::CertificateOptions cert_options() const {
        bounds::CertificateOptions o;
        o.cutoff_scale = c_.cutoff_scale;
        o.params.epsilon = exps_.epsilon;
        o.params.delta = exps_.delta;
        o.params.C = c_.C;
        return o;
    }

    /// Quasimode certificate; NaN with a warning when the geometry admits none.
    double certificate(const Domain& dom, const FieldPtr& A, double q, std::shared_ptr<const Grid> grid,
                       json& extra) const {
        if (!c_.quasimode) return nan;
        try {
            auto rep = bounds::quasimode_certificate(dom, A, q, exps_.delta, grid, model_, cert_options());
            extra["truncation_mass"] = rep.truncation_mass;
            return *rep.quasimode_rayleigh;
        } catch (const Error& e) {
            warn(std::string("certificate unavailable: ") + e.what());
            extra["certificate_error"] = e.what();
            return nan;
        }
    }

    JobOutcome fixed_domain(double q) const {
        JobOutcome out;
        out.extra = json::object();
        const auto op = assemble(dom_, *A_, q, BoundaryCondition::Neumann, grid_);
        const auto er = lowest_eigenpair(op, eig_);
        out.converged = er.converged;
        bounds::BoundParams p;
        p.epsilon = exps_.epsilon;
        p.delta = exps_.delta;
        p.C = c_.C;
        const auto sn = seminorms(*A_, dom_.bounding_box());
        out.row = {q,
                   q,
                   er.lambda,
                   certificate(dom_, A_, q, grid_, out.extra),
                   bounds::lower_bound_rhs(q, p, sn, model_->theta0),
                   bounds::upper_bound_rhs(q, p, sn, model_->theta0),
                   h_,
                   er.residual};
        out.extra["preconditioner"] = er.preconditioner;
        out.extra["iterations"] = er.iterations;
        if (c_.refine) {
            auto fine = std::make_shared<const Grid>(Grid::build(dom_, h_ / 2));
            const auto ef = lowest_eigenpair(assemble(dom_, *A_, q, BoundaryCondition::Neumann, fine), eig_);
            out.refinement = refinement_record(h_, er.lambda, ef.lambda);
            out.converged = out.converged && ef.converged;
        }
        if (c_.scenario == Scenario::Agmon) {
            // the bulk Landau cluster is nearly degenerate; only the value is used, known to +- residual
            EigenOptions de = eig_;
            de.tol = std::max(eig_.tol, 1e-3);
            const auto d = lowest_eigenpair(assemble(dom_, *A_, q, BoundaryCondition::Dirichlet, grid_), de);
            out.converged = out.converged && d.converged;
            const double amax = agmon::admissible_alpha(er.lambda, d.lambda, c_.agmon_eps);
            const double alpha = c_.alpha_frac * agmon::main_rate(q, model_->theta0);
            const auto w = agmon::make_weight(*grid_, c_.gamma, alpha);
            const auto decay = agmon::fit_decay(er.vector, dom_, *grid_, {0.0, 0.0}, agmon::main_rate(q, model_->theta0));
            json rhs = nullptr;
            if (alpha < amax) rhs = agmon::agmon_rhs(er.lambda, d.lambda, c_.agmon_eps, c_.gamma, alpha, 1.0);
            else warn("agmon exponent " + fmt(alpha) + " is not admissible (sup " + fmt(amax) + ")");
            json a = {{"mu0", d.lambda},
                      {"mu0_residual", d.residual},
                      {"alpha", alpha},
                      {"alpha_admissible", amax},
                      {"gamma", c_.gamma},
                      {"weighted_h1", agmon::weighted_h1_norm(er.vector, w, dom_, *grid_)},
                      {"rhs_C1", rhs},
                      {"fitted_rate", decay.fitted_rate()},
                      {"theoretical_rate", decay.theoretical_rate},
                      {"fit_window", json::array({decay.fit_window.first, decay.fit_window.second})},
                      {"shells_used", decay.shells_used},
                      {"mass_within_5_over_sqrt_q", agmon::boundary_mass_fraction(er.vector, *grid_, 5 / std::sqrt(q))}};
            out.extra["agmon"] = a;
            out.side_csv = agmon_csv(decay);
        }
        return out;
    }

    JobOutcome helical(double qtau, double tau, int threads) const {
        JobOutcome out;
        out.extra = json::object();
        const auto rots = sample_rotations(c_.rotations, c_.seed);
        bounds::HelicalOptions ho;
        ho.eigen = eig_;
        ho.threads = threads;
        const double q = qtau / tau;
        const auto hs = bounds::helical_mu_star(q, tau, rots, dom_, grid_, ho);
        out.converged = hs.all_converged;
        const FieldPtr best = dom_.dimension() == 2 ? bounds::helical_cross_section(tau, hs.argmin_rotation, dom_.center())
                                                    : normalized_helical(tau, hs.argmin_rotation);
        const auto rb = bounds::helical_ratio_bounds(qtau, tau, c_.x, c_.c0, c_.C, model_->theta0);
        out.row = {qtau, tau, hs.mu_star, certificate(dom_, best, qtau, grid_, out.extra), rb.lower * qtau,
                   rb.upper * qtau, h_, hs.residuals[hs.argmin]};
        out.extra["argmin"] = hs.argmin;
        out.extra["argmin_rotation"] = io::rotation_to_json(hs.argmin_rotation);
        out.extra["values"] = hs.values;
        out.extra["mode"] = dom_.dimension() == 2 ? "2d" : "3d";
        if (c_.refine) {
            auto fine = std::make_shared<const Grid>(Grid::build(dom_, h_ / 2));
            const auto ef = lowest_eigenpair(assemble(dom_, *best, qtau, BoundaryCondition::Neumann, fine), eig_);
            out.refinement = refinement_record(h_, hs.mu_star, ef.lambda);
            out.converged = out.converged && ef.converged;
        }
        return out;
    }

    JobOutcome large_domain(double q, double R) const {
        JobOutcome out;
        out.extra = json::object();
        const auto ld = bounds::large_domain_mu(q, R, A_, dom_, c_.x0, grid_, eig_);
        const Domain domR = scale_domain(dom_, R, c_.x0);
        auto gridR = std::make_shared<const Grid>(grid_->scaled(R, c_.x0, domR));
        const auto rb = bounds::large_domain_ratio_bounds(q, R, c_.y, c_.c0, c_.C, model_->theta0);
        out.converged = ld.converged;
        out.row = {q, R, ld.mu_direct, certificate(domR, A_, q, gridR, out.extra), rb.lower * q, rb.upper * q,
                   h_ * R, ld.residual_direct};
        out.extra["mu_rescaled"] = ld.mu_rescaled;
        out.extra["rescaling_gap"] = ld.gap;
        if (c_.refine) {
            auto fine = std::make_shared<const Grid>(Grid::build(domR, h_ * R / 2));
            const auto ef = lowest_eigenpair(assemble(domR, *A_, q, BoundaryCondition::Neumann, fine), eig_);
            out.refinement = refinement_record(h_ * R, ld.mu_direct, ef.lambda);
            out.converged = out.converged && ef.converged;
        }
        return out;
    }

    double h() const { return h_; }

private:
    const ExperimentConfig& c_;
    Domain dom_;
    FieldPtr A_;
    std::shared_ptr<const degennes::DeGennesMinimum> model_;
    Exps exps_;
    double h_ = 0;
    EigenOptions eig_;
    std::shared_ptr<const Grid> grid_;
};

std::string side_path(const std::string& csv, int job) {
    std::string stem = csv;
    if (stem.size() > 4 && stem.substr(stem.size() - 4) == ".csv") stem.resize(stem.size() - 4);
    return stem + "_agmon_job" + std::to_string(job) + ".csv";
}

} // namespace

RunResult run(const ExperimentConfig& cfg, const RunOptions& opts) {
    ExperimentConfig c = cfg;
    if (opts.threads) c.threads = *opts.threads;
    c.validate();

    RunResult res;
    auto& m = res.manifest;
    m.scenario = c.scenario;
    // the hash covers the physics, not the output locations or thread count
    json hashed = c.to_json();
    hashed.erase("output");
    hashed.erase("threads");
    m.config_hash = config_hash(hashed);
    m.versions = {{"magspec", library_version},
                  {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                std::to_string(EIGEN_MINOR_VERSION)},
                  {"compiler", __VERSION__}};
    const Exps exps = exponents_for(c);
    m.exponents = exps.echo;
    const auto jobs = job_list(c);
    const double h = c.grid_spacing();

    for (std::size_t i = 0; i < jobs.size(); ++i) {
        JobRecord r;
        r.id = static_cast<int>(i);
        r.status = "planned";
        r.params = {{"q", jobs[i].q}, {"h", h}};
        if (c.scenario == Scenario::Helical) r.params["tau"] = jobs[i].param;
        if (c.scenario == Scenario::LargeDomain) r.params["R"] = jobs[i].param;
        m.jobs.push_back(r);
    }
    if (opts.dry_run) return res;

    auto model = std::make_shared<const degennes::DeGennesMinimum>(degennes::minimize_mu(c.model, c.model_tol));
    m.theta0 = model->theta0;
    m.xi0 = model->xi0;

    std::vector<JobOutcome> outcomes(jobs.size());
    std::vector<std::string> errors(jobs.size());
    std::vector<char> ok(jobs.size(), 0);
    std::vector<double> wall(jobs.size(), 0.0);
    Runner runner(c, model, exps);

    auto one = [&](std::size_t i, int inner_threads) {
        const auto t0 = std::chrono::steady_clock::now();
        try {
            switch (c.scenario) {
            case Scenario::Asymptotic:
            case Scenario::Agmon: outcomes[i] = runner.fixed_domain(jobs[i].q); break;
            case Scenario::Helical: outcomes[i] = runner.helical(jobs[i].q, jobs[i].param, inner_threads); break;
            case Scenario::LargeDomain: outcomes[i] = runner.large_domain(jobs[i].q, jobs[i].param); break;
            }
            ok[i] = 1;
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
        wall[i] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };
    if (c.scenario == Scenario::Helical) {
        for (std::size_t i = 0; i < jobs.size(); ++i) one(i, c.threads);
    } else {
        parallel_for(jobs.size(), c.threads, [&](std::size_t i) { one(i, 1); });
    }

    res.csv = std::string(csv_header) + "\n";
    std::vector<PlotPoint> plot;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        auto& r = m.jobs[i];
        r.wall_seconds = wall[i];
        if (!ok[i]) {
            r.status = "failed";
            r.error = errors[i];
            warn("job " + std::to_string(i) + " failed: " + errors[i]);
            continue;
        }
        const auto& o = outcomes[i];
        r.status = "ok";
        r.converged = o.converged;
        r.refinement = o.refinement;
        r.extra = o.extra;
        r.csv_row = static_cast<int>(res.rows.size());
        res.rows.push_back(o.row);
        res.csv += format_row(o.row) + "\n";
        if (!o.side_csv.empty()) {
            std::string p = c.csv.empty() ? std::string() : side_path(c.csv, r.id);
            res.side_files.emplace_back(p, o.side_csv);
        }
        double xval = c.scenario == Scenario::LargeDomain ? o.row.tau_or_R : o.row.q;
        plot.push_back({xval, o.row.lambda / o.row.q});
    }

    if (plot.size() >= 2) {
        PlotSpec ps;
        ps.reference_y = m.theta0;
        if (c.scenario == Scenario::Helical) {
            ps.x_label = "q tau";
            ps.y_label = "mu* / (q tau)";
            ps.title = "mu* / (q tau)";
        } else if (c.scenario == Scenario::LargeDomain) {
            ps.x_label = "R";
        }
        res.svg = emit_svg(plot, ps);
    } else if (!c.svg.empty()) {
        warn("fewer than two completed jobs; no plot emitted");
    }

    if (opts.write_files) {
        if (!c.csv.empty()) io::write_text_atomic(c.csv, res.csv);
        for (const auto& [p, s] : res.side_files)
            if (!p.empty()) io::write_text_atomic(p, s);
        if (!c.svg.empty() && !res.svg.empty()) io::write_text_atomic(c.svg, res.svg);
        if (!c.manifest.empty()) io::write_text_atomic(c.manifest, m.to_json().dump(2) + "\n");
    }
    return res;
}

} // namespace magspec::experiments
