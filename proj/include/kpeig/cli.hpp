#pragma once

#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <kpeig/asymptotics.hpp>
#include <kpeig/oracle.hpp>
#include <kpeig/parallel.hpp>
#include <kpeig/potential.hpp>
#include <kpeig/report.hpp>
#include <kpeig/solver.hpp>

namespace kpeig::cli {

/// Accepts plain reals plus pi-fraction literals ("pi", "pi/2", "2pi/3",
/// "3*pi/4"), so breakpoints like pi/2 stay exact to the last ulp.
inline double parse_pi_literal(std::string s) {
    std::erase_if(s, [](unsigned char ch) { return std::isspace(ch); });
    if (s.empty()) throw std::invalid_argument("empty numeric literal");
    double sign = 1.0;
    if (s.front() == '-') {
        sign = -1.0;
        s.erase(0, 1);
    } else if (s.front() == '+') {
        s.erase(0, 1);
    }
    const auto pos = s.find("pi");
    auto to_double = [](const std::string& t) {
        std::size_t used = 0;
        const double v = std::stod(t, &used);
        if (used != t.size()) throw std::invalid_argument("bad numeric literal: " + t);
        return v;
    };
    if (pos == std::string::npos) return sign * to_double(s);
    double coeff = 1.0;
    if (pos > 0) {
        std::string head = s.substr(0, pos);
        if (head.back() == '*') head.pop_back();
        if (!head.empty()) coeff = to_double(head);
    }
    double denom = 1.0;
    if (pos + 2 < s.size()) {
        std::string tail = s.substr(pos + 2);
        if (tail.front() != '/') throw std::invalid_argument("bad pi literal: " + s);
        denom = to_double(tail.substr(1));
        if (denom == 0.0) throw std::invalid_argument("bad pi literal: " + s);
    }
    return sign * coeff * kPi / denom;
}

namespace detail {

struct Range {
    int lo = 1;
    int hi = 1;
};

inline Range parse_range(const std::string& s) {
    const auto dots = s.find("..");
    Range r;
    if (dots == std::string::npos) {
        r.lo = r.hi = std::stoi(s);
    } else {
        r.lo = std::stoi(s.substr(0, dots));
        r.hi = std::stoi(s.substr(dots + 2));
    }
    if (r.lo < 1 || r.hi < r.lo) throw std::invalid_argument("bad index range: " + s);
    return r;
}

/// `key = value` lines; '#' starts a comment; unknown keys are errors.
inline std::map<std::string, std::string> load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    auto trim = [](std::string t) {
        const auto b = t.find_first_not_of(" \t\r");
        const auto e = t.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string{} : t.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw std::runtime_error("config line without '=': " + line);
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

/// `[[x1,v1],[x2,v2],...]`: piece j ends at x_j with value v_j; x_m = pi.
inline StepPotential parse_pieces(const std::string& text) {
    std::vector<double> numbers;
    std::string token;
    for (char ch : text) {
        if ((ch >= '0' && ch <= '9') || ch == '.' || ch == '-' || ch == '+' || ch == 'e' ||
            ch == 'E' || ch == 'p' || ch == 'i' || ch == '/' || ch == '*') {
            token += ch;
        } else {
            if (!token.empty()) numbers.push_back(parse_pi_literal(token));
            token.clear();
        }
    }
    if (!token.empty()) numbers.push_back(parse_pi_literal(token));
    if (numbers.empty() || numbers.size() % 2 != 0)
        throw std::invalid_argument("pieces: expected [[x1,v1],[x2,v2],...]");
    std::vector<double> breaks{0.0};
    std::vector<double> values;
    for (std::size_t i = 0; i < numbers.size(); i += 2) {
        breaks.push_back(numbers[i]);
        values.push_back(numbers[i + 1]);
    }
    if (std::abs(breaks.back() - kPi) > 1e-12)
        throw std::invalid_argument("pieces: last breakpoint must equal pi");
    breaks.back() = kPi;
    return StepPotential(std::move(breaks), std::move(values));
}

struct PotentialSpec {
    std::optional<std::string> jump, a, b, c, pieces;

    [[nodiscard]] StepPotential build() const {
        if (pieces) {
            if (jump || a || b || c)
                throw std::invalid_argument("give either pieces or (jump|a,b) with c, not both");
            return parse_pieces(*pieces);
        }
        if (jump && (a || b)) throw std::invalid_argument("give either --jump or --a/--b, not both");
        if (jump) {
            const double J = parse_pi_literal(*jump);
            if (J == 0.0) return make_zero_potential();
            if (!c) throw std::invalid_argument("--jump requires --c");
            return make_kronig_penney(J, parse_pi_literal(*c));
        }
        if (a && b && c) {
            const double av = parse_pi_literal(*a);
            const double bv = parse_pi_literal(*b);
            const double cv = parse_pi_literal(*c);
            if (!(av < bv)) throw std::invalid_argument("potential: a < b required");
            if (!(cv > 0.0 && cv < kPi)) throw std::invalid_argument("potential: c must lie in (0, pi)");
            return StepPotential({0.0, cv, kPi}, {av, bv});  // ctor enforces mean zero
        }
        throw std::invalid_argument("no potential given: use --jump J --c C, --a A --b B --c C, or --pieces");
    }
};

inline void add_potential_options(CLI::App* cmd, PotentialSpec& spec,
                                  const std::map<std::string, std::string>& cfg) {
    auto opt = [&](const char* key) -> std::optional<std::string> {
        const auto it = cfg.find(key);
        if (it == cfg.end()) return std::nullopt;
        return it->second;
    };
    spec.jump = opt("jump");
    spec.a = opt("a");
    spec.b = opt("b");
    spec.c = opt("c");
    spec.pieces = opt("pieces");
    cmd->add_option_function<std::string>("--jump", [&](const std::string& v) { spec.jump = v; },
                                          "jump b - a of the two-piece potential (0 = zero potential)");
    cmd->add_option_function<std::string>("--a", [&](const std::string& v) { spec.a = v; },
                                          "low piece value a < 0");
    cmd->add_option_function<std::string>("--b", [&](const std::string& v) { spec.b = v; },
                                          "high piece value b > 0");
    cmd->add_option_function<std::string>("--c", [&](const std::string& v) { spec.c = v; },
                                          "jump location in (0, pi); pi-literals accepted");
    cmd->add_option_function<std::string>("--pieces", [&](const std::string& v) { spec.pieces = v; },
                                          "general step potential [[x1,v1],[x2,v2],...]");
}

inline long long cell_int(int v) { return static_cast<long long>(v); }

}  // namespace detail

/// Runs one CLI invocation.  Exit codes: 0 success, 2 admissibility or
/// potential-specification violations, 1 usage or internal errors.
inline int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Dirichlet eigenvalues of -y'' + q y on [0, pi] for mean-zero step potentials"};
    app.require_subcommand(1);

    std::map<std::string, std::string> cfg;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) {
                err << "--config requires a file path\n";
                return 1;
            }
            try {
                cfg = detail::load_config(args[i + 1]);
            } catch (const std::exception& ex) {
                err << ex.what() << '\n';
                return 1;
            }
        }
    }

    auto cfg_int = [&](const char* key, int dflt) {
        const auto it = cfg.find(key);
        return it == cfg.end() ? dflt : std::stoi(it->second);
    };
    auto cfg_double = [&](const char* key, double dflt) {
        const auto it = cfg.find(key);
        return it == cfg.end() ? dflt : std::stod(it->second);
    };
    auto cfg_str = [&](const char* key, std::string dflt) {
        const auto it = cfg.find(key);
        return it == cfg.end() ? dflt : it->second;
    };

    std::string config_path;
    app.add_option("--config", config_path, "key=value config file (flags override)");

    int r = cfg_int("r", 5), s = cfg_int("s", 5), max_iter = cfg_int("max_iter", 50);
    double tol = cfg_double("tol", 1e-15);
    long cutoff = long(cfg_double("cutoff", 1e6));
    std::string nrange = cfg_str("n", "1..6");
    std::string format_name = cfg_str("format", "text");
    std::string column = cfg_str("column", "all");

    detail::PotentialSpec pot;

    auto add_common = [&](CLI::App* cmd, bool series_opts) {
        detail::add_potential_options(cmd, pot, cfg);
        cmd->add_option("--n", nrange, "spectral index or range, e.g. 3 or 1..6");
        cmd->add_option("--format", format_name, "text | csv | json");
        if (series_opts) {
            cmd->add_option("--r", r, "index radius of the truncated series");
            cmd->add_option("--s", s, "series depth");
            cmd->add_option("--tol", tol, "iteration stopping tolerance");
            cmd->add_option("--max-iter", max_iter, "iteration cap");
        }
    };

    CLI::App* cmd_estimate = app.add_subcommand("estimate", "fixed-point eigenvalue estimates");
    add_common(cmd_estimate, true);
    CLI::App* cmd_oracle = app.add_subcommand("oracle", "transfer-matrix ground truth");
    add_common(cmd_oracle, false);
    double oracle_tol = 1e-13;
    cmd_oracle->add_option("--tol", oracle_tol, "bisection bracket tolerance");
    CLI::App* cmd_asym = app.add_subcommand("asymptotic", "closed-form asymptotic estimates");
    add_common(cmd_asym, false);
    cmd_asym->add_option("--cutoff", cutoff, "direct-series cutoff for the baseline column");
    CLI::App* cmd_compare = app.add_subcommand("compare", "all routes side by side with error bounds");
    add_common(cmd_compare, true);
    CLI::App* cmd_sweep = app.add_subcommand("sweep", "scaled-residual study over an index range");
    add_common(cmd_sweep, false);
    cmd_sweep->add_option("--column", column, "thm2_residual_scaled | sharp_residual_scaled | all");

    try {
        app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n' << app.help();
        return 1;
    }

    try {
        const StepPotential q = pot.build();
        const detail::Range range = detail::parse_range(nrange);
        const Format format = parse_format(format_name);
        const std::size_t count = std::size_t(range.hi - range.lo + 1);

        // Admissibility is gated up front for every requested index.
        for (int n = range.lo; n <= range.hi; ++n) {
            const ConditionCheck gate = check_condition(q, n);
            if (!gate.ok) {
                err << gate.message << '\n';
                return 2;
            }
        }

        Table table;
        if (app.got_subcommand(cmd_estimate)) {
            table.columns = {"n", "value", "iterations", "residual", "window_lo", "window_hi",
                             "lipschitz", "truncation_bound", "iteration_bound", "total_bound"};
            std::vector<EigenvalueEstimate> ests(count);
            std::exception_ptr failure;
            parallel_for_index(count, [&](std::size_t i) {
                try {
                    SeriesConfig cfgn{range.lo + int(i), r, s, tol, max_iter};
                    ests[i] = solve(q, cfgn);
                } catch (...) {
                    failure = std::current_exception();
                }
            });
            if (failure) std::rethrow_exception(failure);
            for (const auto& e : ests) {
                auto& row = table.add_row();
                row[0] = detail::cell_int(e.n);
                row[1] = e.value;
                row[2] = detail::cell_int(e.iterations);
                row[3] = e.residual;
                row[4] = e.window_lo;
                row[5] = e.window_hi;
                row[6] = e.budget.lipschitz;
                if (e.budget.truncation_bound) row[7] = *e.budget.truncation_bound;
                row[8] = e.budget.iteration_bound(e.iterations);
                if (const auto t = e.budget.total_bound(e.iterations)) row[9] = *t;
            }
        } else if (app.got_subcommand(cmd_oracle)) {
            table.columns = {"n", "value", "bracket_lo", "bracket_hi", "residual", "bisection_steps"};
            std::vector<OracleResult> results(count);
            std::exception_ptr failure;
            parallel_for_index(count, [&](std::size_t i) {
                try {
                    results[i] = find_eigenvalue(q, range.lo + int(i), oracle_tol);
                } catch (...) {
                    failure = std::current_exception();
                }
            });
            if (failure) std::rethrow_exception(failure);
            for (const auto& o : results) {
                auto& row = table.add_row();
                row[0] = detail::cell_int(o.n);
                row[1] = o.value;
                row[2] = o.bracket_lo;
                row[3] = o.bracket_hi;
                row[4] = o.residual;
                row[5] = detail::cell_int(o.bisection_steps);
            }
        } else if (app.got_subcommand(cmd_asym)) {
            table.columns = {"n", "second_order", "sharp", "series_baseline"};
            for (int n = range.lo; n <= range.hi; ++n) {
                auto& row = table.add_row();
                row[0] = detail::cell_int(n);
                row[1] = q.is_zero() ? double(n) * n : second_order_kp(q, n);
                row[2] = sharp_estimate(q, n);
                row[3] = eq8_estimate(q, n, cutoff);
            }
        } else if (app.got_subcommand(cmd_compare)) {
            table.columns = {"n", "fixed_point", "oracle", "thm2", "sharp",
                             "total_bound", "observed_err", "bound_ok"};
            struct Row {
                EigenvalueEstimate est;
                OracleResult orc;
                double thm2, sharp;
            };
            std::vector<Row> rows(count);
            std::exception_ptr failure;
            parallel_for_index(count, [&](std::size_t i) {
                try {
                    const int n = range.lo + int(i);
                    SeriesConfig cfgn{n, r, s, tol, max_iter};
                    rows[i].est = solve(q, cfgn);
                    rows[i].orc = find_eigenvalue(q, n);
                    rows[i].thm2 = q.is_zero() ? double(n) * n : second_order_kp(q, n);
                    rows[i].sharp = sharp_estimate(q, n);
                } catch (...) {
                    failure = std::current_exception();
                }
            });
            if (failure) std::rethrow_exception(failure);
            for (const auto& rrow : rows) {
                auto& row = table.add_row();
                const double observed = std::abs(rrow.orc.value - rrow.est.value);
                row[0] = detail::cell_int(rrow.est.n);
                row[1] = rrow.est.value;
                row[2] = rrow.orc.value;
                row[3] = rrow.thm2;
                row[4] = rrow.sharp;
                const auto bound = rrow.est.budget.total_bound(rrow.est.iterations);
                if (bound) {
                    row[5] = *bound;
                    row[7] = observed <= *bound;
                }
                row[6] = observed;
            }
        } else if (app.got_subcommand(cmd_sweep)) {
            const bool want_thm2 = column == "all" || column == "thm2_residual_scaled";
            const bool want_sharp = column == "all" || column == "sharp_residual_scaled";
            if (!want_thm2 && !want_sharp) throw std::invalid_argument("unknown sweep column: " + column);
            table.columns = {"n"};
            if (want_thm2) table.columns.push_back("thm2_residual_scaled");
            if (want_sharp) table.columns.push_back("sharp_residual_scaled");
            struct Row {
                double thm2 = 0.0, sharp = 0.0;
            };
            std::vector<Row> rows(count);
            std::exception_ptr failure;
            parallel_for_index(count, [&](std::size_t i) {
                try {
                    const int n = range.lo + int(i);
                    const double truth = find_eigenvalue(q, n).value;
                    const double n3 = double(n) * n * n;
                    rows[i].thm2 =
                        n3 * std::abs(truth - (q.is_zero() ? double(n) * n : second_order_kp(q, n)));
                    rows[i].sharp = n3 * std::abs(truth - sharp_estimate(q, n));
                } catch (...) {
                    failure = std::current_exception();
                }
            });
            if (failure) std::rethrow_exception(failure);
            for (std::size_t i = 0; i < count; ++i) {
                auto& row = table.add_row();
                std::size_t col = 0;
                row[col++] = detail::cell_int(range.lo + int(i));
                if (want_thm2) row[col++] = rows[i].thm2;
                if (want_sharp) row[col++] = rows[i].sharp;
            }
        }
        out << render(table, format);
        return 0;
    } catch (const condition_error& ex) {
        err << ex.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& ex) {
        err << ex.what() << '\n';
        return 2;
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << '\n';
        return 1;
    }
}

}  // namespace kpeig::cli
