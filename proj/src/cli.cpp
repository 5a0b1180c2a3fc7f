#include "twic/cli.hpp"

#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "twic/capacity.hpp"
#include "twic/oracle.hpp"
#include "twic/pairing.hpp"
#include "twic/sim.hpp"

namespace twic {

namespace {

nlohmann::json rational_json(const Rational& r) {
    return {{"exact", r.to_string()}, {"value", r.to_double()}};
}

Rational parse_lambda_or_throw(const std::string& text) {
    auto r = parse_rational(text);
    if (!r.has_value() || *r < Rational(0) || *r > Rational(1))
        throw CLI::ValidationError("lambda", "expected a rational p/q in [0, 1], got '" + text + "'");
    return *r;
}

int cmd_capacity(const ChannelConfig& cfg, std::string& out) {
    const CapacityReport rep = capacity_report(cfg);
    nlohmann::json j;
    j["config"] = {{"n", cfg.n},
                   {"m", cfg.m},
                   {"nb", cfg.nb},
                   {"mb", cfg.mb},
                   {"lambda", rational_json(cfg.lambda)}};
    j["c_no"] = rational_json(rep.c_no);
    j["c_pf"] = rational_json(rep.c_pf);
    j["inner"] = rational_json(rep.inner);
    j["outer"] = rational_json(rep.outer);
    j["outer_raw"] = rational_json(rep.outer_raw);
    j["matched"] = rep.matched;
    j["regime"] = {{"forward", to_string(rep.regime.forward)},
                   {"backward", to_string(rep.regime.backward)},
                   {"netgain", to_string(rep.regime.netgain)}};
    out = j.dump(2) + "\n";
    return 0;
}

int cmd_simulate(const std::string& scheme, ChannelConfig cfg, bool exhaustive, long long limit,
                 std::uint64_t seed, const std::string& dump_path, const std::string& plan_path,
                 std::string& out, std::string& err) {
    SchemeKind kind;
    if (scheme == "nofb") {
        kind = SchemeKind::NonFeedback;
    } else if (scheme == "type1") {
        kind = SchemeKind::TypeI;
    } else if (scheme == "type2") {
        kind = SchemeKind::TypeII;
    } else if (scheme == "type3") {
        kind = SchemeKind::TypeIII;
    } else if (scheme == "fourmsg") {
        kind = SchemeKind::FourMessage;
    } else {
        err = "unknown scheme '" + scheme + "'\n";
        return 2;
    }

    // The CLI applies the strict regime split; the library accepts any config
    // the mechanism supports.
    if (kind == SchemeKind::TypeII && cmp_alpha(cfg.nb, cfg.mb, 1, 2) < 0) {
        err = "type2 expects a cross-heavy backward IC (alpha~ >= 1/2)\n";
        return 2;
    }
    if (kind == SchemeKind::TypeIII && cmp_alpha(cfg.nb, cfg.mb, 1, 2) >= 0) {
        err = "type3 expects a private-heavy backward IC (alpha~ < 1/2)\n";
        return 2;
    }

    SchemeSpec spec;
    try {
        spec = compile(kind, cfg);
    } catch (const SchemeError& e) {
        err = std::string("compile rejected: ") + e.what() + "\n";
        return 2;
    }
    validate_scheme(spec);

    const long long eff_limit = exhaustive ? (1LL << std::min(spec.total_bits(), 40)) : limit;
    const VerificationReport rep = verify_exhaustive(spec, eff_limit, seed);

    if (!dump_path.empty()) {
        MessageSet zero(spec.total_bits());
        std::ofstream f(dump_path);
        f << transcript_to_jsonl(run_block(spec, zero).first);
    }
    if (!plan_path.empty()) {
        std::ofstream f(plan_path);
        f << scheme_to_json(spec, true) << "\n";
    }

    nlohmann::json j;
    j["scheme"] = spec.label;
    j["config"] = {{"n", cfg.n},
                   {"m", cfg.m},
                   {"nb", cfg.nb},
                   {"mb", cfg.mb},
                   {"lambda", rational_json(spec.cfg.lambda)}};
    j["M"] = spec.M;
    j["block_length"] = spec.block_length();
    const RatePoint rate = scheme_rate(spec);
    j["rate"] = {{"forward_sum", rational_json(rate.forward_sum)},
                 {"backward_sum", rational_json(rate.backward_sum)}};
    j["messages_tested"] = rep.messages_tested;
    j["exhaustive"] = rep.exhaustive;
    j["failures"] = rep.failures;
    j["budget"] = {{"ok", rep.budget.ok},
                   {"used", {rep.budget.used[0], rep.budget.used[1]}},
                   {"allowed", rational_json(rep.budget.allowed)}};
    j["pass"] = rep.pass();
    if (rep.failures > 0 && rep.first_counterexample.has_value()) {
        std::string bits;
        for (int b = 0; b < spec.total_bits(); ++b)
            bits += rep.first_counterexample->test(b) ? '1' : '0';
        j["first_counterexample"] = bits;
    }
    out = j.dump(2) + "\n";
    return rep.pass() ? 0 : 1;
}

int cmd_netgain(const ChannelConfig& cfg, int steps, bool with_outer, std::string& out) {
    std::vector<Rational> grid;
    for (int i = 0; i < steps; ++i) grid.push_back(Rational(i, steps - 1));
    const NetGainCurve curve = net_gain(cfg, grid);
    std::ostringstream csv;
    csv << "lambda,fb_gain,indep_gain";
    if (with_outer) csv << ",fb_gain_outer";
    csv << "\n";
    const Rational base = c_no(cfg.n, cfg.m);
    for (size_t i = 0; i < grid.size(); ++i) {
        csv << curve.lambda[i].to_decimal_string() << "," << curve.fb_gain[i].to_decimal_string()
            << "," << curve.indep_gain[i].to_decimal_string();
        if (with_outer) {
            ChannelConfig at = cfg;
            at.lambda = grid[i];
            csv << "," << (outer_sum(at) - base).to_decimal_string();
        }
        csv << "\n";
    }
    out = csv.str();
    return 0;
}

int cmd_regime_map(int max_n, int max_m, int max_nb, int max_mb, std::string& out) {
    std::ostringstream csv;
    csv << "n,m,nb,mb,alpha,alpha_t,netgain,matched\n";
    auto ratio_str = [](int num, int den) -> std::string {
        if (den == 0) return num > 0 ? "inf" : "1";  // degenerate (0,0) reads as 1
        return Rational(num, den).to_decimal_string();
    };
    for (int n = 1; n <= max_n; ++n)
        for (int m = 1; m <= max_m; ++m)
            for (int nb = 1; nb <= max_nb; ++nb)
                for (int mb = 1; mb <= max_mb; ++mb) {
                    ChannelConfig cfg{n, m, nb, mb, Rational(0)};
                    const RegimeLabel label = classify_regime(cfg);
                    const bool matched =
                        !(cmp_alpha(n, m, 2, 3) < 0 && cmp_alpha(nb, mb, 1, 1) < 0);
                    csv << n << "," << m << "," << nb << "," << mb << "," << ratio_str(m, n)
                        << "," << ratio_str(mb, nb) << "," << to_string(label.netgain) << ","
                        << (matched ? "true" : "false") << "\n";
                }
    out = csv.str();
    return 0;
}

std::vector<std::pair<int, int>> read_pair_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open '" + path + "'");
    std::vector<std::pair<int, int>> pairs;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        int a, b;
        if (!(ls >> a >> b) || a < 0 || b < 0)
            throw std::runtime_error("malformed line '" + line + "' in " + path);
        pairs.emplace_back(a, b);
    }
    if (pairs.empty()) throw std::runtime_error("no subchannels in " + path);
    return pairs;
}

int cmd_pair(const std::string& fwd_path, const std::string& bwd_path, const Rational& lambda,
             std::string& out, std::string& err) {
    std::vector<std::pair<int, int>> forwards, backwards;
    try {
        forwards = read_pair_file(fwd_path);
        backwards = read_pair_file(bwd_path);
        if (forwards.size() != backwards.size())
            throw std::runtime_error("forward and backward lists differ in length");
    } catch (const std::exception& e) {
        err = std::string(e.what()) + "\n";
        return 2;
    }
    const PairingResult result = pair_subchannels(forwards, backwards, lambda);
    nlohmann::json j;
    j["lambda"] = rational_json(lambda);
    auto arr = nlohmann::json::array();
    for (const auto& p : result.pairs) {
        arr.push_back({{"forward_index", p.forward_index},
                       {"backward_index", p.backward_index},
                       {"forward", {forwards[static_cast<size_t>(p.forward_index)].first,
                                    forwards[static_cast<size_t>(p.forward_index)].second}},
                       {"backward", {backwards[static_cast<size_t>(p.backward_index)].first,
                                     backwards[static_cast<size_t>(p.backward_index)].second}},
                       {"net_gain", rational_json(p.net_gain)}});
    }
    j["pairs"] = arr;
    j["total_net_gain"] = rational_json(result.total_net_gain);
    out = j.dump(2) + "\n";
    return 0;
}

int cmd_weak(int n, int m, int nb, int mb, const std::string& lambda_s,
             const std::string& lambda_t_s, const std::string& rt_target_s, std::string& out,
             std::string& err) {
    Rational lambda(0), lambda_t(0);
    if (!rt_target_s.empty()) {
        const auto t = parse_rational(rt_target_s);
        if (!t.has_value() || *t < Rational(0)) {
            err = "malformed --rt-target\n";
            return 2;
        }
        // Feasibility: the backward-message bound must reach the target.
        const Rational cap_fwd = Rational(2 * n);          // 2*lambda_t*n at lambda_t = 1
        const Rational cap_bwd = c_no(nb, mb);             // (1 - lambda)*C at lambda = 0
        if (*t > rat_min(cap_fwd, cap_bwd)) {
            err = "backward target " + t->to_string() + " is infeasible for this channel\n";
            return 1;
        }
        lambda_t = *t / Rational(2 * n);              // smallest forward share feeding the target
        lambda = cap_bwd == Rational(0) ? Rational(0)
                                        : rat_max(Rational(0), Rational(1) - *t / cap_bwd);
        // Remaining backward time helps the forward direction; the largest
        // feasible lambda is optimal since the forward bound is nondecreasing
        // in it.
    } else {
        try {
            lambda = parse_lambda_or_throw(lambda_s);
            lambda_t = parse_lambda_or_throw(lambda_t_s);
        } catch (const std::exception& e) {
            err = std::string(e.what()) + "\n";
            return 2;
        }
    }
    const WeakInteractionBound b = weak_interaction_bound(n, m, nb, mb, lambda, lambda_t);
    nlohmann::json j;
    j["config"] = {{"n", n}, {"m", m}, {"nb", nb}, {"mb", mb}};
    j["lambda"] = rational_json(lambda);
    j["lambda_t"] = rational_json(lambda_t);
    j["r_sum_bound"] = rational_json(b.r_sum_bound);
    j["rt_sum_bound"] = rational_json(b.rt_sum_bound);
    out = j.dump(2) + "\n";
    return 0;
}

}  // namespace

CommandResult run_cli(const std::vector<std::string>& args) {
    CommandResult result;

    CLI::App app{"two-way deterministic interference channel laboratory"};
    app.require_subcommand(1);

    // capacity
    auto* cap = app.add_subcommand("capacity", "closed-form capacity report as JSON");
    int c_n = 0, c_m = 0, c_nb = 0, c_mb = 0;
    std::string c_lambda = "0";
    cap->add_option("--n", c_n)->required();
    cap->add_option("--m", c_m)->required();
    cap->add_option("--nb", c_nb)->required();
    cap->add_option("--mb", c_mb)->required();
    cap->add_option("--lambda", c_lambda);

    // simulate
    auto* sim = app.add_subcommand("simulate", "compile, run and verify a scheme");
    std::string s_scheme;
    int s_n = 2, s_m = 1, s_nb = 1, s_mb = 1;
    std::string s_lambda = "1/2";
    bool s_exhaustive = false;
    long long s_limit = 1LL << 20;
    std::string s_dump;
    sim->add_option("scheme", s_scheme, "nofb|type1|type2|type3|fourmsg")->required();
    sim->add_option("--n", s_n);
    sim->add_option("--m", s_m);
    sim->add_option("--nb", s_nb);
    sim->add_option("--mb", s_mb);
    sim->add_option("--lambda", s_lambda);
    sim->add_flag("--exhaustive", s_exhaustive, "enumerate every message tuple");
    sim->add_option("--limit", s_limit, "exhaustive cutoff before sampling kicks in");
    sim->add_option("--dump", s_dump, "write the all-zero-message transcript as JSON lines");
    std::string s_plan;
    sim->add_option("--scheme-json", s_plan, "write the compiled plan (level/feedback maps)");
    std::uint64_t s_seed = kVerifySeed;
    sim->add_option("--seed", s_seed, "seed for the sampled verification fallback");

    // netgain
    auto* ng = app.add_subcommand("netgain", "feedback vs independent-use gain curves as CSV");
    int g_n = 2, g_m = 1, g_nb = 1, g_mb = 1, g_steps = 5;
    bool g_outer = false;
    ng->add_option("--n", g_n);
    ng->add_option("--m", g_m);
    ng->add_option("--nb", g_nb);
    ng->add_option("--mb", g_mb);
    ng->add_option("--lambda-steps", g_steps)->check(CLI::Range(2, 10000));
    ng->add_flag("--outer", g_outer, "append the converse-based optimistic gain column");

    // regime-map
    auto* rm = app.add_subcommand("regime-map", "net-gain regime grid as CSV");
    int r_n = 6, r_m = 6, r_nb = 6, r_mb = 6;
    rm->add_option("--max-n", r_n)->check(CLI::Range(1, 30));
    rm->add_option("--max-m", r_m)->check(CLI::Range(1, 30));
    rm->add_option("--max-nb", r_nb)->check(CLI::Range(1, 30));
    rm->add_option("--max-mb", r_mb)->check(CLI::Range(1, 30));

    // pair
    auto* pr = app.add_subcommand("pair", "match forward and backward subchannels for net gain");
    std::string p_fwd, p_bwd, p_lambda = "1/2";
    pr->add_option("--forwards", p_fwd)->required();
    pr->add_option("--backwards", p_bwd)->required();
    pr->add_option("--lambda", p_lambda);

    // weak
    auto* wk = app.add_subcommand("weak", "no-mixing interaction bounds");
    int w_n = 2, w_m = 1, w_nb = 1, w_mb = 1;
    std::string w_lambda = "0", w_lambda_t = "0", w_target;
    wk->add_option("--n", w_n);
    wk->add_option("--m", w_m);
    wk->add_option("--nb", w_nb);
    wk->add_option("--mb", w_mb);
    wk->add_option("--lambda", w_lambda);
    wk->add_option("--lambda-t", w_lambda_t);
    wk->add_option("--rt-target", w_target, "solve for the best forward bound at this backward rate");

    std::vector<std::string> argv = args;
    std::reverse(argv.begin(), argv.end());
    try {
        app.parse(argv);
    } catch (const CLI::ParseError& e) {
        std::ostringstream msg;
        if (e.get_exit_code() == 0) {  // --help
            msg << app.help();
            result.out = msg.str();
            result.exit_code = 0;
            return result;
        }
        result.err = std::string(e.what()) + "\n";
        result.exit_code = 2;
        return result;
    }

    try {
        if (cap->parsed()) {
            const auto lam = parse_rational(c_lambda);
            if (!lam.has_value() || *lam < Rational(0) || *lam > Rational(1)) {
                result.err = "malformed --lambda '" + c_lambda + "'\n";
                result.exit_code = 2;
                return result;
            }
            ChannelConfig cfg{c_n, c_m, c_nb, c_mb, *lam};
            cfg.validate();
            result.exit_code = cmd_capacity(cfg, result.out);
        } else if (sim->parsed()) {
            const auto lam = parse_rational(s_lambda);
            if (!lam.has_value() || *lam < Rational(0) || *lam > Rational(1)) {
                result.err = "malformed --lambda '" + s_lambda + "'\n";
                result.exit_code = 2;
                return result;
            }
            if (s_scheme == "fourmsg" && sim->count("--nb") == 0 && sim->count("--mb") == 0) {
                s_nb = 0;
                s_mb = 1;  // default cross-delivery wiring
            }
            ChannelConfig cfg{s_n, s_m, s_nb, s_mb, *lam};
            cfg.validate();
            result.exit_code = cmd_simulate(s_scheme, cfg, s_exhaustive, s_limit, s_seed, s_dump,
                                            s_plan, result.out, result.err);
        } else if (ng->parsed()) {
            ChannelConfig cfg{g_n, g_m, g_nb, g_mb, Rational(0)};
            cfg.validate();
            result.exit_code = cmd_netgain(cfg, g_steps, g_outer, result.out);
        } else if (rm->parsed()) {
            result.exit_code = cmd_regime_map(r_n, r_m, r_nb, r_mb, result.out);
        } else if (pr->parsed()) {
            const auto lam = parse_rational(p_lambda);
            if (!lam.has_value() || *lam < Rational(0) || *lam > Rational(1)) {
                result.err = "malformed --lambda '" + p_lambda + "'\n";
                result.exit_code = 2;
                return result;
            }
            result.exit_code = cmd_pair(p_fwd, p_bwd, *lam, result.out, result.err);
        } else if (wk->parsed()) {
            result.exit_code = cmd_weak(w_n, w_m, w_nb, w_mb, w_lambda, w_lambda_t, w_target,
                                        result.out, result.err);
        }
    } catch (const std::exception& e) {
        result.err = std::string(e.what()) + "\n";
        result.exit_code = 2;
    }
    return result;
}

}  // namespace twic
