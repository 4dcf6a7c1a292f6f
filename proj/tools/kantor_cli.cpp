// Command-line driver: parse JSON instances, dispatch to the library,
// emit JSON/text reports and CSV matrices.
//
// Exit codes: 0 success, 1 checker violation / infeasibility, 2 malformed input.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "kantor/acceptance.hpp"
#include "kantor/json_io.hpp"
#include "kantor/primal_dual.hpp"
#include "kantor/regularize.hpp"

using namespace kantor;

namespace {

struct Options {
    std::string transfer_path, mu_path, nu_path, chain_path, spec_path;
    std::string method = "karp";
    std::string format = "json";
    std::string csv_path;
    std::string eps = "1";
    double tol = 1e-9;
    int iters = 1000;
};

void emit(const json& report, const Options& opt) {
    if (opt.format == "text") {
        for (auto it = report.begin(); it != report.end(); ++it)
            std::cout << it.key() << ": " << it.value().dump() << "\n";
    } else {
        std::cout << report.dump(2) << "\n";
    }
}

std::vector<double> parse_eps(const std::string& s) {
    std::vector<double> out;
    size_t pos = 0;
    while (pos < s.size()) {
        size_t comma = s.find(',', pos);
        if (comma == std::string::npos) comma = s.size();
        out.push_back(std::stod(s.substr(pos, comma - pos)));
        pos = comma + 1;
    }
    if (out.empty()) throw std::invalid_argument("--eps needs at least one value");
    return out;
}

Transfer load_transfer(const Options& opt) { return transfer_from_json(load_json_file(opt.transfer_path)); }

int cmd_eval(const Options& opt) {
    Transfer t = load_transfer(opt);
    Measure mu = measure_from_json(load_json_file(opt.mu_path), t.source);
    Measure nu = measure_from_json(load_json_file(opt.nu_path), t.target);
    EvalMethod m = EvalMethod::automatic;
    if (opt.method == "primal") m = EvalMethod::primal;
    if (opt.method == "dual" || opt.method == "ascent") m = EvalMethod::ascent;
    json rep;
    rep["method"] = opt.method == "karp" ? "automatic" : opt.method;
    if (m == EvalMethod::ascent) {
        DualAscentReport r = dual_ascent(t, mu, nu);
        rep["value"] = number_to_json(r.value);
        rep["iterations"] = r.iterations;
        rep["attained"] = r.attained;
        rep["diverging"] = r.diverging;
    } else {
        rep["value"] = number_to_json(transfer_value(t, mu, nu, m));
    }
    emit(rep, opt);
    return 0;
}

int cmd_mane(const Options& opt) {
    Transfer t = load_transfer(opt);
    json rep;
    rep["method"] = opt.method;
    if (opt.method == "karp" || opt.method == "lp") {
        if (!t.is_cost_like()) throw std::invalid_argument("mane --method karp|lp needs a cost representation");
        MinMeanCycleResult r = opt.method == "karp" ? mane_min_mean_cycle(*t.cost) : mane_diag_lp(*t.cost);
        rep["c"] = number_to_json(r.value);
        if (r.exact) rep["c_exact"] = {{"num", r.num}, {"den", r.den}};
    } else if (opt.method == "iterate") {
        IterativeManeResult r = mane_iterative(t, zero_potential(t.target), opt.iters);
        rep["c"] = r.estimate;
        rep["error_bound"] = r.error_bound;
        rep["n"] = r.n;
    } else {
        throw std::invalid_argument("--method must be karp, lp or iterate");
    }
    emit(rep, opt);
    return 0;
}

int cmd_weak_kam(const Options& opt) {
    Transfer t = load_transfer(opt);
    double c;
    if (t.is_cost_like()) {
        c = mane_min_mean_cycle(*t.cost).value;
    } else {
        c = 0.0;  // kernel kinds: invariant distributions put the level at zero
    }
    WeakKAMResult w = weak_kam_solve(t, c);
    json rep;
    rep["c"] = c;
    rep["u"] = potential_to_json(w.u);
    rep["residual"] = w.residual;
    rep["stage1_iters"] = w.stage1_iters;
    rep["stage2_iters"] = w.stage2_iters;
    rep["tolerance"] = opt.tol;
    emit(rep, opt);
    return w.residual <= opt.tol ? 0 : 1;
}

int cmd_peierls(const Options& opt) {
    Transfer t = load_transfer(opt);
    if (!t.is_cost_like()) throw std::invalid_argument("peierls needs a cost representation");
    MinMeanCycleResult c = mane_min_mean_cycle(*t.cost);
    PeierlsResult p = peierls_barrier(*t.cost, c);
    json rep;
    rep["c"] = number_to_json(c.value);
    rep["c_inf"] = mat_to_json(p.c_inf);
    rep["aubry"] = p.aubry;
    rep["exact"] = p.exact;
    if (p.tolerance_ambiguity) rep["tolerance_ambiguity"] = true;
    emit(rep, opt);
    if (!opt.csv_path.empty()) {
        std::ofstream out(opt.csv_path);
        write_matrix_csv(out, p.c_inf);
    }
    return 0;
}

int cmd_mather(const Options& opt) {
    Transfer t = load_transfer(opt);
    if (!t.is_cost_like()) throw std::invalid_argument("mather needs a cost representation");
    Coupling pi = mather_measure(*t.cost, t.source);
    json rep;
    rep["c"] = number_to_json(mane_min_mean_cycle(*t.cost).value);
    rep["mather"] = coupling_to_json(pi);
    emit(rep, opt);
    if (!opt.csv_path.empty()) {
        std::ofstream out(opt.csv_path);
        write_matrix_csv(out, pi.w);
    }
    return 0;
}

int cmd_schrodinger(const Options& opt) {
    Transfer t = load_transfer(opt);
    if (!t.kernel) throw std::invalid_argument("schrodinger needs a kernel representation");
    SchrodingerResult r = schrodinger_effective(*t.kernel);
    json rep;
    rep["m"] = r.m;
    rep["iterations"] = r.iterations;
    rep["c"] = 0.0;
    emit(rep, opt);
    return 0;
}

int cmd_stochastic(const Options& opt) {
    ControlledChain ch = chain_from_json(load_json_file(opt.chain_path));
    RVIResult r = relative_value_iteration(ch);
    OccupationResult o = occupation_lp(ch);
    json rep;
    rep["c_rvi"] = r.c;
    rep["c_lp"] = o.c;
    rep["agreement"] = std::abs(r.c - o.c);
    rep["u"] = potential_to_json(r.u);
    rep["residual"] = r.residual;
    rep["iterations"] = r.iterations;
    rep["invariance_residual"] = o.invariance_residual;
    emit(rep, opt);
    return std::abs(r.c - o.c) <= 1e-6 ? 0 : 1;
}

int cmd_regularize(const Options& opt) {
    Transfer t = load_transfer(opt);
    std::vector<double> ladder = parse_eps(opt.eps);
    std::vector<double> curve = c_epsilon_curve(t, ladder);
    double base = t.is_cost_like() ? mane_min_mean_cycle(*t.cost).value : kInf;
    json rep;
    rep["eps"] = ladder;
    rep["c_eps"] = curve;
    rep["c_base"] = number_to_json(base);
    emit(rep, opt);
    return 0;
}

int cmd_inequality(const Options& opt) {
    InequalitySpec spec = inequality_from_json(load_json_file(opt.spec_path));
    MaureyReport dual = maurey_dual_check(spec);
    PrimalScanReport primal = primal_inequality_scan(spec);
    json rep;
    rep["dual_worst_product"] = dual.worst_product;
    rep["dual_witness_g"] = dual.witness_g;
    rep["dual_pass"] = dual.pass;
    rep["primal_worst_violation"] = number_to_json(primal.worst_violation);
    if (!primal.pass) {
        rep["primal_witness_sigma1"] = measure_to_json(primal.witness_sigma1);
        rep["primal_witness_sigma2"] = measure_to_json(primal.witness_sigma2);
    }
    rep["primal_pass"] = primal.pass;
    rep["grids"] = {{"sigma_steps", spec.sigma_steps}, {"g_levels", spec.g_levels}};
    emit(rep, opt);
    return primal.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"linear transfers, Kantorovich operators and their ergodic objects"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--format", opt.format)->check(CLI::IsMember({"json", "text"}));
        sub->add_option("--tol", opt.tol);
        sub->add_option("--csv", opt.csv_path);
    };
    auto* eval = app.add_subcommand("eval", "transfer value at (mu, nu)");
    eval->add_option("--transfer", opt.transfer_path)->required();
    eval->add_option("--mu", opt.mu_path)->required();
    eval->add_option("--nu", opt.nu_path)->required();
    eval->add_option("--method", opt.method);
    add_common(eval);

    auto* mane = app.add_subcommand("mane", "Mane constant");
    mane->add_option("--transfer", opt.transfer_path)->required();
    mane->add_option("--method", opt.method)->check(CLI::IsMember({"karp", "lp", "iterate"}));
    mane->add_option("--iters", opt.iters);
    add_common(mane);

    auto* wk = app.add_subcommand("weak-kam", "weak KAM solution and residual");
    wk->add_option("--transfer", opt.transfer_path)->required();
    add_common(wk);

    auto* pe = app.add_subcommand("peierls", "Peierls barrier and Aubry set");
    pe->add_option("--transfer", opt.transfer_path)->required();
    add_common(pe);

    auto* ma = app.add_subcommand("mather", "canonical Mather coupling");
    ma->add_option("--transfer", opt.transfer_path)->required();
    add_common(ma);

    auto* sc = app.add_subcommand("schrodinger", "invariant distribution of a kernel");
    sc->add_option("--transfer", opt.transfer_path)->required();
    add_common(sc);

    auto* st = app.add_subcommand("stochastic", "RVI + occupation LP for a controlled chain");
    st->add_option("--chain", opt.chain_path)->required();
    add_common(st);

    auto* re = app.add_subcommand("regularize", "c(T_eps) ladder");
    re->add_option("--transfer", opt.transfer_path)->required();
    re->add_option("--eps", opt.eps);
    add_common(re);

    auto* in = app.add_subcommand("inequality", "transport-entropy inequality checks");
    in->add_option("--spec", opt.spec_path)->required();
    add_common(in);

    auto* self = app.add_subcommand("selftest", "run the acceptance suite");
    add_common(self);

    CLI11_PARSE(app, argc, argv);

    try {
        if (eval->parsed()) return cmd_eval(opt);
        if (mane->parsed()) return cmd_mane(opt);
        if (wk->parsed()) return cmd_weak_kam(opt);
        if (pe->parsed()) return cmd_peierls(opt);
        if (ma->parsed()) return cmd_mather(opt);
        if (sc->parsed()) return cmd_schrodinger(opt);
        if (st->parsed()) return cmd_stochastic(opt);
        if (re->parsed()) return cmd_regularize(opt);
        if (in->parsed()) return cmd_inequality(opt);
        if (self->parsed()) return run_acceptance(std::cout) ? 0 : 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const kantor::error& e) {
        std::string msg = e.what();
        std::cerr << "error: " << msg << "\n";
        return msg.rfind("cannot open file", 0) == 0 ? 2 : 1;
    }
    return 2;
}
