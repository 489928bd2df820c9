#pragma once

#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "quadcorr/acceptance.hpp"
#include "quadcorr/common.hpp"
#include "quadcorr/constructor.hpp"
#include "quadcorr/demo.hpp"
#include "quadcorr/expsum.hpp"
#include "quadcorr/exactreal.hpp"
#include "quadcorr/latcount.hpp"
#include "quadcorr/modcount.hpp"
#include "quadcorr/paircorr.hpp"

namespace quadcorr {

/// Rows of JSON scalars, written as CSV or as a JSON array of objects.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<nlohmann::ordered_json>> rows;

    explicit Table(std::string_view header) {
        std::string cur;
        for (char ch : header) {
            if (ch == ',') {
                columns.push_back(cur);
                cur.clear();
            } else {
                cur += ch;
            }
        }
        columns.push_back(cur);
    }

    void add(std::vector<nlohmann::ordered_json> row) {
        require(row.size() == columns.size(), "internal: row width mismatch");
        rows.push_back(std::move(row));
    }

    static std::string cell(const nlohmann::ordered_json& v) {
        std::string s;
        if (v.is_null()) return s;
        if (v.is_string()) s = v.get<std::string>();
        else if (v.is_number_float()) s = format_double(v.get<double>());
        else s = v.dump();
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
        return q + "\"";
    }

    std::string csv() const {
        std::string out;
        for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + columns[i];
        out += "\n";
        for (auto& r : rows) {
            for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + cell(r[i]);
            out += "\n";
        }
        return out;
    }

    nlohmann::ordered_json json() const {
        auto arr = nlohmann::ordered_json::array();
        for (auto& r : rows) {
            nlohmann::ordered_json o;
            for (std::size_t i = 0; i < r.size(); ++i) o[columns[i]] = r[i];
            arr.push_back(o);
        }
        return arr;
    }
};

namespace detail {

inline std::vector<std::string> split_list(std::string_view s, char sep = ',') {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == sep) {
            out.push_back(cur);
            cur.clear();
        } else if (ch != ' ') {
            cur += ch;
        }
    }
    if (!cur.empty() || !out.empty()) out.push_back(cur);
    return out;
}

inline std::vector<Rational> parse_rational_list(std::string_view s, const char* what) {
    std::vector<Rational> out;
    for (auto& t : split_list(s)) {
        require(!t.empty(), std::string(what) + " list has an empty entry");
        out.push_back(parse_rational(t));
    }
    require(!out.empty(), std::string(what) + " list is empty");
    return out;
}

inline std::vector<u64> parse_u64_list(std::string_view s, const char* what) {
    std::vector<u64> out;
    for (auto& t : split_list(s)) {
        BigInt v = parse_integer(t);
        require(v >= 0 && v <= std::numeric_limits<u64>::max(), std::string(what) + " entry out of range");
        out.push_back(v.convert_to<u64>());
    }
    require(!out.empty(), std::string(what) + " list is empty");
    return out;
}

/// `key = value` lines with `#` comments.
inline std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), "cannot read config file '" + path + "'");
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    int lineno = 0;
    auto trim = [](std::string s) {
        auto b = s.find_first_not_of(" \t\r"), e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        require(eq != std::string::npos,
                "config line " + std::to_string(lineno) + " is not of the form key = value");
        out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return out;
}

}  // namespace detail

inline const std::vector<std::string>& subcommand_names() {
    static const std::vector<std::string> names = {
        "paircorr", "r0",      "badset", "dispersion", "construct", "verify-avoidance", "expsum", "lattice",
        "vcounts",  "conjecture2", "divisor-ap", "suite", "counterexample"};
    return names;
}

/// Runs the command line; returns 0 on success, 1 on a failed suite or
/// computation, 2 on usage errors.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Pair correlation of quadratic sequences modulo one: exact counts, identities and bounds", "quadcorr"};
    app.require_subcommand(1);
    app.fallthrough();
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    std::string config_path, out_path, format = "csv";
    int threads = -1;
    app.add_option("--config", config_path, "file of key = value lines; flags given on the command line win");
    app.add_option("--threads", threads, "worker threads (0 = all cores); also PAIRCORR_THREADS");
    app.add_option("--out", out_path, "write results to this file instead of stdout");
    app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    // option storage shared by the subcommands
    std::string alpha, xs = "1", q_list, eta_s = "1/200", interval = "1/3:2/5", b_list, beta, delta_s, Delta_s,
                level = "desk", only, golden, X_s = "3/10";
    u64 suite_seed = SuiteOptions{}.seed;
    u64 N = 1000, q = 0, qlo = 0, qhi = 0, qstart = 10, qmax = 200, bits = kDefaultBits, M = 0, A = 0, B = 0, P0 = 0,
        P1 = 0, s = 0, seed = 1, samples = 0, linearN = 0;
    std::optional<u64> Nopt;
    double lemma2 = 1;
    std::string method = "sorted";
    bool equally_spaced = false, no_budget = false;

    auto* paircorr = app.add_subcommand("paircorr", "R(N,X) and R0(N,X) of alpha*n^2, one row per X");
    paircorr->add_option("--alpha", alpha, "alpha spec: sqrt:n, rat:p/q, dec:..., ratio:(u+sqrt:n)/v, cf:...")->required();
    paircorr->add_option("--N", N, "number of points");
    paircorr->add_option("--X", xs, "comma-separated X values");
    paircorr->add_option("--bits", bits, "working precision in bits");
    paircorr->add_option("--method", method, "sorted, uv or naive")->check(CLI::IsMember({"sorted", "uv", "naive"}));

    auto* r0 = app.add_subcommand("r0", "weighted pair correlation R0 with its exact value");
    r0->add_option("--alpha", alpha, "alpha spec");
    r0->add_flag("--equally-spaced", equally_spaced, "use theta_n = n/N instead of alpha*n^2");
    r0->add_option("--N", N, "number of points");
    r0->add_option("--X", xs, "comma-separated X values");

    auto* badset = app.add_subcommand("badset", "bad residue sets B(q)");
    badset->add_option("--q", q_list, "comma-separated moduli");
    badset->add_option("--qlo", qlo, "first modulus of a range");
    badset->add_option("--qhi", qhi, "last modulus of a range");
    badset->add_option("--eta", eta_s, "eta in (0, 1/100]");

    auto* dispersion = app.add_subcommand("dispersion", "sum of squared dispersions against its bound");
    dispersion->add_option("--q", q_list, "comma-separated moduli");
    dispersion->add_option("--qlo", qlo, "first modulus of a range");
    dispersion->add_option("--qhi", qhi, "last modulus of a range");
    dispersion->add_option("--N", Nopt, "box size N <= q^(2/3) instead of the maximal dispersion");
    dispersion->add_option("--eta", eta_s, "eta in (0, 1/100]");

    auto* construct = app.add_subcommand("construct", "rational approximations avoiding the bad intervals");
    construct->add_option("--interval", interval, "closed interval lo:hi inside [0,1]");
    construct->add_option("--qstart", qstart, "first modulus");
    construct->add_option("--qmax", qmax, "last modulus");
    construct->add_option("--eta", eta_s, "eta in (0, 1/100]");
    construct->add_option("--lemma2-constant", lemma2, "constant recorded in the certificate");
    construct->add_flag("--no-budget", no_budget, "skip the measure budget check");

    auto* verify = app.add_subcommand("verify-avoidance", "bad intervals containing x");
    verify->add_option("--x", alpha, "number spec, as for --alpha")->required();
    verify->add_option("--qstart", qstart, "first modulus");
    verify->add_option("--qmax", qmax, "last modulus");
    verify->add_option("--eta", eta_s, "eta in (0, 1/100]");

    auto* expsum = app.add_subcommand("expsum", "quadratic exponential sum S(b;q), or the linear sum T(b;N,q)");
    expsum->add_option("--b", b_list, "b1,b2,b3,b4 (one value with --linear-N)")->required();
    expsum->add_option("--q", q, "modulus")->required();
    expsum->add_option("--linear-N", linearN, "evaluate the linear sum over x <= N");

    auto* lattice = app.add_subcommand("lattice", "1 + 2R(M,beta,delta) through the pair lattice");
    lattice->add_option("--M", M, "range of x")->required();
    lattice->add_option("--beta", beta, "beta spec")->required();
    lattice->add_option("--delta", delta_s, "delta in (0,1)")->required();

    auto* vcounts = app.add_subcommand("vcounts", "V, V*, V1 and V2 counts");
    vcounts->add_option("--alpha", alpha, "alpha spec")->required();
    vcounts->add_option("--A", A, "bound on a")->required();
    vcounts->add_option("--B", B, "bound on b")->required();
    vcounts->add_option("--Delta", Delta_s, "Delta >= 0")->required();
    vcounts->add_option("--P0", P0, "lower end of the prime window (exclusive)");
    vcounts->add_option("--P1", P1, "upper end of the prime window");

    auto* conj2 = app.add_subcommand("conjecture2", "#{u,v <= N : uv = c mod q} against phi(q)N^2/q^2");
    conj2->add_option("--N", N, "box size");
    conj2->add_option("--q", q, "modulus")->required();
    conj2->add_option("--c", q_list, "comma-separated unit residues");
    conj2->add_option("--samples", samples, "random unit residues instead of --c");
    conj2->add_option("--seed", seed, "random seed");

    auto* divap = app.add_subcommand("divisor-ap", "sum of d(n) over n <= M, n = s mod q");
    divap->add_option("--M", M, "upper bound")->required();
    divap->add_option("--q", q, "modulus")->required();
    divap->add_option("--s", s, "residue")->required();

    auto* suite = app.add_subcommand("suite", "acceptance criteria A1-A9 with a pass/fail table");
    suite->add_option("--level", level, "desk or smoke")->check(CLI::IsMember({"desk", "smoke"}));
    suite->add_option("--only", only, "comma-separated criteria, e.g. A1,A3");
    suite->add_option("--seed", suite_seed, "random seed");
    suite->add_option("--golden", golden, "golden certificate for A9");

    auto* counter = app.add_subcommand("counterexample", "alpha = a/q + 1/(4q^3) with N = q");
    counter->add_option("--q", q, "odd prime")->required();
    counter->add_option("--X", X_s, "X in (1/4, 1/2)");
    counter->add_option("--seed", seed, "random seed for a");

    // config file values go before the command-line arguments, so flags win
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string sub;
    for (auto& a : args)
        if (std::find(subcommand_names().begin(), subcommand_names().end(), a) != subcommand_names().end()) {
            sub = a;
            break;
        }
    try {
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
            else if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
        }
        if (!config_path.empty() && !sub.empty()) {
            auto* target = app.get_subcommand(sub);
            std::vector<std::string> injected;
            for (auto& [key, value] : detail::read_config(config_path)) {
                const std::string flag = "--" + key;
                bool here = false, anywhere = app.get_option_no_throw(flag) != nullptr;
                if (auto* opt = target->get_option_no_throw(flag)) {
                    here = true;
                    if (opt->get_type_size() == 0) {
                        if (value == "true" || value == "1") injected.push_back(flag);
                        continue;
                    }
                }
                for (auto& name : subcommand_names())
                    if (app.get_subcommand(name)->get_option_no_throw(flag)) anywhere = true;
                require(anywhere, "unknown config key '" + key + "'");
                if (app.get_option_no_throw(flag) && !here) {
                    // global options are placed before the subcommand
                    args.insert(args.begin(), {flag, value});
                    continue;
                }
                if (here) {
                    injected.push_back(flag);
                    injected.push_back(value);
                }
            }
            auto pos = std::find(args.begin(), args.end(), sub);
            args.insert(pos + 1, injected.begin(), injected.end());
        }
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << "run 'quadcorr --help' for usage\n";
        return 2;
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    if (threads >= 0) thread_setting() = static_cast<unsigned>(threads);

    std::ostringstream body;
    int code = 0;
    auto emit = [&](const Table& t) {
        if (format == "json") body << t.json().dump(2) << "\n";
        else body << t.csv();
    };
    const auto start = std::chrono::steady_clock::now();
    try {
        const Rational eta = parse_rational(eta_s);
        auto moduli = [&]() {
            std::vector<u64> qs;
            if (!q_list.empty()) qs = detail::parse_u64_list(q_list, "q");
            if (qlo || qhi) {
                require(qlo >= 2 && qlo <= qhi, "--qlo/--qhi need 2 <= qlo <= qhi");
                guard(qhi - qlo <= 100000, "q range too long");
                for (u64 v = qlo; v <= qhi; ++v) qs.push_back(v);
            }
            require(!qs.empty(), "give --q or --qlo/--qhi");
            return qs;
        };

        if (paircorr->parsed()) {
            auto src = RealSource::parse(alpha);
            require(N >= 1, "--N must be >= 1");
            Table t(paircorr_csv_header());
            std::optional<SequenceModOne> seq;
            for (auto& X : detail::parse_rational_list(xs, "X")) {
                require(X >= 0, "X must be >= 0");
                PairCorrResult r;
                if (method == "uv") {
                    r = pair_correlation_uv(src, N, X, static_cast<unsigned>(bits));
                } else {
                    if (!seq) seq = quadratic_sequence(src, N, static_cast<unsigned>(bits));
                    r = method == "naive" ? pair_correlation_naive(*seq, X) : pair_correlation(*seq, X);
                }
                std::optional<double> R0;
                if (X > 0) {
                    if (!seq) seq = quadratic_sequence(src, N, static_cast<unsigned>(bits));
                    R0 = weighted_pair_correlation(*seq, X).R0;
                }
                t.add({src.label(), N, to_string(X), r.R, R0 ? nlohmann::ordered_json(*R0) : nlohmann::ordered_json(),
                       to_string(r.method)});
            }
            emit(t);
        } else if (r0->parsed()) {
            require(equally_spaced != !alpha.empty(), "give exactly one of --alpha and --equally-spaced");
            require(N >= 1, "--N must be >= 1");
            auto seq = equally_spaced ? equally_spaced_sequence(N) : quadratic_sequence(RealSource::parse(alpha), N);
            const std::string label = equally_spaced ? "equally-spaced" : RealSource::parse(alpha).label();
            Table t("source,N,X,R0,R0_exact,lower_bound");
            for (auto& X : detail::parse_rational_list(xs, "X")) {
                require(X > 0, "X must be > 0");
                auto r = weighted_pair_correlation(seq, X);
                t.add({label, N, to_string(X), *r.R0,
                       r.R0_exact ? nlohmann::ordered_json(to_string(*r.R0_exact)) : nlohmann::ordered_json(),
                       to_string(equally_spaced_reference(X))});
            }
            emit(t);
        } else if (badset->parsed()) {
            Table t("q,eta,card,members");
            for (u64 m : moduli()) {
                auto bs = bad_set(m, eta);
                std::string members;
                for (u64 a : bs) members += (members.empty() ? "" : " ") + std::to_string(a);
                t.add({m, to_string(eta), bs.size(), members});
            }
            emit(t);
        } else if (dispersion->parsed()) {
            Table t(dispersion_csv_header());
            for (u64 m : moduli()) {
                auto r = dispersion_report(m, Nopt, eta);
                t.add({r.q, r.q1, to_string(r.eta), r.sum_delta_sq, r.bound_value, r.ratio,
                       r.card_bad_set ? nlohmann::ordered_json(*r.card_bad_set) : nlohmann::ordered_json()});
            }
            emit(t);
        } else if (construct->parsed()) {
            ConstructOptions opt;
            opt.enforce_budget = !no_budget;
            opt.lemma2_constant = lemma2;
            auto res = construct_alpha(parse_interval(interval), qstart, qmax, eta, opt);
            body << certificate_json(res).dump(2) << "\n";
        } else if (verify->parsed()) {
            auto x = RealSource::parse(alpha);
            Table t("q,a,class,radius");
            for (auto& b : verify_avoidance(x, qstart, qmax, eta)) t.add({b.q, b.a, b.cls, to_string(b.radius())});
            emit(t);
        } else if (expsum->parsed()) {
            auto bs = detail::split_list(b_list);
            std::vector<i64> bv;
            for (auto& v : bs) {
                BigInt x = parse_integer(v);
                require(abs(x) < (BigInt(1) << 62), "b entry out of range");
                bv.push_back(x.convert_to<i64>());
            }
            Table t("q,b,re,im,err,method");
            if (linearN) {
                require(bv.size() == 1, "--linear-N takes a single b");
                auto v = linear_sum(bv[0], linearN, q);
                t.add({q, b_list, v.re, v.im, v.err, v.method});
            } else {
                require(bv.size() == 4, "--b needs four integers");
                auto v = quad_sum(Vec4{bv[0], bv[1], bv[2], bv[3]}, q);
                t.add({q, b_list, v.re, v.im, v.err, v.method});
            }
            emit(t);
        } else if (lattice->parsed()) {
            auto src = RealSource::parse(beta);
            const Rational d = parse_rational(delta_s);
            auto pl = pair_lattice(M, src, d);
            auto sc = lattice_square_count(pl);
            const u64 R = near_multiple_count(M, src, d);
            Table t(lattice_csv_header());
            t.add({M, src.label(), to_string(d), R, pl.basis.lambda1, sc.count, sc.main, sc.error_term});
            emit(t);
        } else if (vcounts->parsed()) {
            VCountSpec spec;
            spec.A = A;
            spec.B = B;
            spec.Delta = parse_rational(Delta_s);
            spec.alpha = RealSource::parse(alpha);
            spec.P0 = P0;
            spec.P1 = P1;
            Table t("alpha,A,B,Delta,P0,P1,V,V_star,V1,V2,V2_by_P");
            const u64 V = v_count(spec), Vs = v_star_count(spec);
            nlohmann::ordered_json v1, v2, byP;
            if (P0 || P1) {
                auto sp = v_split(spec);
                v1 = sp.v1;
                v2 = sp.v2_total();
                std::string bp;
                for (auto& [P, c] : sp.v2) bp += (bp.empty() ? "" : ";") + std::to_string(P) + ":" + std::to_string(c);
                byP = bp;
            }
            t.add({spec.alpha.label(), A, B, to_string(spec.Delta), P0, P1, V, Vs, v1, v2, byP});
            emit(t);
        } else if (conj2->parsed()) {
            std::vector<u64> cs;
            if (!q_list.empty()) cs = detail::parse_u64_list(q_list, "c");
            if (samples) {
                require(q >= 2, "--q must be >= 2");
                Rng rng(seed);
                for (u64 i = 0; i < samples; ++i) {
                    u64 c;
                    do c = uniform_below(rng, q);
                    while (std::gcd(c, q) != 1);
                    cs.push_back(c);
                }
            }
            require(!cs.empty(), "give --c or --samples");
            Table t(conjecture2_csv_header());
            for (u64 c : cs) {
                auto h = hyperbola_ap_count(N, q, c);
                t.add({h.N, h.q, h.c, h.count, h.expected, h.ratio});
            }
            emit(t);
        } else if (divap->parsed()) {
            Table t("M,q,s,sum");
            t.add({M, q, s, divisor_sum_ap(M, q, s)});
            emit(t);
        } else if (suite->parsed()) {
            SuiteOptions o;
            o.level = parse_level(level);
            o.seed = suite_seed;
            if (!golden.empty()) o.golden_path = golden;
            std::vector<std::string> ids;
            if (!only.empty()) ids = detail::split_list(only);
            auto results = run_suite(o, ids, out_path.empty() ? out : body);
            for (auto& r : results)
                if (!r.passed) code = 1;
        } else if (counter->parsed()) {
            auto rep = demo_counterexample(q, parse_rational(X_s), seed);
            Table t("q,a,alpha,N,X,pair_count,R,family_pairs,family_bound");
            t.add({rep.q, rep.a, to_string(rep.alpha), rep.q, to_string(rep.X), rep.result.pair_count, rep.result.R,
                   rep.family_pairs, to_string(rep.family_bound())});
            emit(t);
        }
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const CostGuard& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "failed: " << e.what() << "\n";
        return 1;
    }

    if (out_path.empty()) {
        out << body.str();
    } else {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) {
            err << "error: cannot write '" << out_path << "'\n";
            return 2;
        }
        f << body.str();
    }
    err << "wall-clock " << std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() << " s\n";
    return code;
}

}  // namespace quadcorr
