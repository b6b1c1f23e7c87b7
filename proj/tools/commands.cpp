#include "commands.hpp"

#include "run_config.hpp"

#include <nlskam/csv.hpp>
#include <nlskam/errors.hpp>
#include <nlskam/format.hpp>
#include <nlskam/hamops.hpp>
#include <nlskam/kamflow.hpp>
#include <nlskam/smalldiv.hpp>
#include <nlskam/synth.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <numbers>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace nlskam::cli
{

namespace fs = std::filesystem;

namespace
{

int guarded(Streams io, const std::function<int()> &body)
{
    try {
        return body();
    } catch (const ConfigError &e) {
        fmt::print(io.err, "config error: {}\n", e.what());
        return config_error;
    } catch (const NumericalError &e) {
        fmt::print(io.err, "numerical abort: {}\n", e.what());
        return numerical_error;
    } catch (const IoError &e) {
        fmt::print(io.err, "i/o error: {}\n", e.what());
        return io_error;
    } catch (const fs::filesystem_error &e) {
        fmt::print(io.err, "i/o error: {}\n", e.what());
        return io_error;
    } catch (const std::exception &e) {
        fmt::print(io.err, "error: {}\n", e.what());
        return failure;
    }
}

std::string num(double x)
{
    return format_real(x);
}

std::string ham_name(std::size_t i)
{
    return fmt::format("S_{:03}.ham", i);
}

} // namespace

std::size_t CsvTable::column(const std::string &name) const
{
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
        throw IoError("csv column missing: " + name);
    }
    return static_cast<std::size_t>(it - header.begin());
}

CsvTable read_csv(const std::string &path)
{
    const std::string text = read_text_file(path);
    if (!verify_checksum(text)) {
        throw IoError("checksum mismatch in " + path);
    }
    CsvTable t;
    std::istringstream in(text);
    std::string line;
    auto split = [](const std::string &l) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(l);
        while (std::getline(ls, cell, ',')) {
            cells.push_back(cell);
        }
        return cells;
    };
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') {
            continue;
        }
        if (t.header.empty()) {
            t.header = split(line);
        } else {
            t.rows.push_back(split(line));
        }
    }
    return t;
}

int cmd_validate(const std::string &config, Streams io)
{
    return guarded(io, [&] {
        const RunConfig c = load_config(config);
        const auto rep = validate_admissible(c.site_schedule(), 400);
        if (!rep.all_passed()) {
            std::string what;
            for (const auto *r : {&rep.growth, &rep.superadditive, &rep.square}) {
                if (!r->passed) {
                    what += (what.empty() ? "" : "; ") + r->counterexample;
                }
            }
            throw ConfigError("schedule", "site schedule is not admissible: " + what);
        }
        io.out << echo_config(c);
        return static_cast<int>(ok);
    });
}

int cmd_kam_run(const std::string &config, const std::optional<std::string> &out_dir, Streams io)
{
    return guarded(io, [&] {
        const RunConfig c = load_config(config);
        const fs::path dir = resolve_output_dir(c, out_dir);
        const auto params = c.ham_params();
        const auto V = c.potential();
        const auto problem = c.kam_problem();
        const Hamiltonian H = build_nls(c.fcoeffs, V, params);
        const Hamiltonian N0 = diagonal(problem.omega.as_map(), params);
        const KamResult res = run_kam(H, N0, problem, c.run_options());

        CsvWriter trace({"n", "eps", "theta", "lambda_sup", "dropped_mass", "m_norm", "neumann_terms",
                         "counter_residual", "homological_residual", "generator_norm"});
        for (const auto &d : res.trace) {
            trace.row({std::to_string(d.n), num(d.eps), num(d.theta), num(d.lambda_sup), num(d.dropped_mass),
                       num(d.m_norm), std::to_string(d.neumann_terms), num(d.counter_residual),
                       num(d.homological_residual), num(d.generator_norm)});
            fmt::print(io.out, "step {:2d}  eps {:.3e}  theta {:.3e}  |lambda| {:.3e}\n", d.n, d.eps, d.theta,
                       d.lambda_sup);
        }
        trace.write(dir / "trace.csv");

        CsvWriter lam({"j", "lambda", "omega", "V"});
        for (int j = -c.J; j <= c.J; ++j) {
            auto it = res.lambda.find(j);
            lam.row({std::to_string(j), num(it == res.lambda.end() ? 0.0 : it->second), num(problem.omega(j)),
                     num(V.at(j))});
        }
        lam.write(dir / "lambda.csv");

        CsvWriter summary({"converged", "steps", "eps0", "eps_final", "conjugacy_residual", "eps_vs_N0", "eps_vs_D"});
        summary.row({res.converged ? "1" : "0", std::to_string(res.final_state.n), num(res.trace.front().eps),
                     num(res.final_state.eps), num(res.conjugacy_residual), num(res.eps_vs_N0), num(res.eps_vs_D)});
        summary.write(dir / "summary.csv");

        write_text_file(dir / "N.ham", res.N.dump());
        for (std::size_t i = 0; i < res.psi.size(); ++i) {
            write_text_file(dir / ham_name(i), res.psi[i].dump());
        }
        write_text_file(dir / "run.yaml", echo_config(c));
        fmt::print(io.out, "{} after {} steps; conjugacy residual {:.3e}; output in {}\n",
                   res.converged ? "converged" : "stopped", res.final_state.n, res.conjugacy_residual, dir.string());
        return static_cast<int>(ok);
    });
}

int cmd_measure(const std::string &config, const std::optional<std::string> &out_dir, Streams io)
{
    return guarded(io, [&] {
        const RunConfig c = load_config(config);
        const fs::path dir = resolve_output_dir(c, out_dir);
        const auto sched = c.site_schedule();
        const auto S = c.sites();
        std::map<int, double> V_normal;
        for (const auto &[j, v] : c.potential()) {
            if (!std::binary_search(S.begin(), S.end(), j)) {
                V_normal[j] = v;
            }
        }
        const double cop = coperta_sum(c.J, c.measure_lmax, sched, c.tau);
        CsvWriter out({"gamma", "samples", "failures", "fraction", "ci_lo", "ci_hi", "bound"});
        for (double g : c.measure_gammas) {
            const auto est = measure_complement_mc(DiophParams(g, sched, c.tau), c.J, c.measure_lmax,
                                                   c.measure_samples, c.measure_seed, V_normal, c.measure_threads);
            out.row({num(g), std::to_string(est.samples), std::to_string(est.failures), num(est.fraction),
                     num(est.ci_lo), num(est.ci_hi), num(16 * g * cop)});
            fmt::print(io.out, "gamma {:<8} failing fraction {:.4f}  [{:.4f}, {:.4f}]  bound {:.4g}\n", num(g),
                       est.fraction, est.ci_lo, est.ci_hi, 16 * g * cop);
        }
        out.write(dir / "measure.csv");
        return static_cast<int>(ok);
    });
}

int cmd_synthesize(const SynthArgs &args, Streams io)
{
    return guarded(io, [&] {
        const fs::path run = args.run_dir;
        const RunConfig c = load_config((run / "run.yaml").string());
        const fs::path dir = args.out_dir ? fs::path(*args.out_dir) : run;
        const double t0 = args.t0.value_or(c.synth_t0);
        const double t1 = args.t1.value_or(c.synth_t1);
        const int nt = args.nt.value_or(c.synth_nt);
        const int nx = args.nx.value_or(c.synth_nx);
        if (!(t1 > t0) || nt < 1 || nx < 1) {
            throw ConfigError("synthesize", "need t1 > t0 and positive nt, nx");
        }

        std::vector<Hamiltonian> psi;
        for (std::size_t i = 0; fs::exists(run / ham_name(i)); ++i) {
            psi.push_back(Hamiltonian::parse(read_text_file(run / ham_name(i))));
        }
        const CsvTable lt = read_csv((run / "lambda.csv").string());
        std::map<int, double> lambda, omega;
        for (const auto &r : lt.rows) {
            const int j = static_cast<int>(parse_integer(r.at(lt.column("j"))));
            lambda[j] = parse_real(r.at(lt.column("lambda")));
            omega[j] = parse_real(r.at(lt.column("omega")));
        }
        const ActionVector I = c.actions();
        PhaseMap nu;
        for (const auto &[s, a] : I) {
            nu[s] = omega.at(s);
        }
        std::map<int, double> V_total;
        for (const auto &[j, w] : omega) {
            V_total[j] = w + lambda[j] - static_cast<double>(j) * j;
        }

        std::vector<double> ts, xs;
        for (int k = 0; k < nt; ++k) {
            ts.push_back(nt == 1 ? t0 : t0 + (t1 - t0) * k / (nt - 1));
        }
        for (int m = 0; m < nx; ++m) {
            xs.push_back(2 * std::numbers::pi * m / nx);
        }
        const SynthGrid g = synth_solution(psi, I, nu, ts, xs, c.J, c.synth_steps);
        CsvWriter field({"t", "x", "re", "im"});
        for (std::size_t a = 0; a < ts.size(); ++a) {
            for (std::size_t b = 0; b < xs.size(); ++b) {
                const Complex u = g.u[a * xs.size() + b];
                field.row({num(ts[a]), num(xs[b]), num(u.real()), num(u.imag())});
            }
        }
        field.write(dir / "field.csv");

        // The weak form pairs chi with u without conjugation: mode -s of chi
        // tests mode s of u.
        TestFunction chi{t0, t1, {}};
        for (const auto &[s, a] : I) {
            chi.modes[-s] = 1.0;
        }
        ModeField u = [&](double t) {
            PhaseMap phi;
            for (const auto &[s, w] : nu) {
                phi[s] = wrap_phase(w, t);
            }
            return apply_psi(psi, torus_point(I, phi, c.J), c.synth_steps);
        };
        const Complex r = weak_residual(u, V_total, c.fcoeffs, chi, Quadrature{nt + nt % 2, nx});
        CsvWriter res({"J", "D", "nt", "nx", "residual_re", "residual_im", "residual_abs"});
        res.row({std::to_string(c.J), std::to_string(c.D), std::to_string(nt), std::to_string(nx), num(r.real()),
                 num(r.imag()), num(std::abs(r))});
        res.write(dir / "residual.csv");
        fmt::print(io.out, "field: {} x {} points; weak residual {:.3e}\n", ts.size(), xs.size(), std::abs(r));
        return static_cast<int>(ok);
    });
}

int cmd_report(const std::vector<std::string> &inputs, const std::optional<std::string> &out_dir, Streams io)
{
    return guarded(io, [&] {
        if (inputs.empty()) {
            throw ConfigError("report", "no input directories");
        }
        const fs::path dir = out_dir ? fs::path(*out_dir) : fs::path(resolve_output_dir(RunConfig{}, {})) / "report";
        CsvWriter summary({"source", "kind", "parameter", "value"});
        CsvWriter eps({"source", "n", "eps", "loglog_inv_eps"});
        CsvWriter meas({"source", "gamma", "fraction", "ci_lo", "ci_hi", "bound"});
        CsvWriter resid({"source", "J", "D", "residual"});
        for (const auto &in : inputs) {
            const fs::path p = in;
            if (!fs::is_directory(p)) {
                throw IoError("not a directory: " + in);
            }
            const std::string src = p.filename().empty() ? p.parent_path().filename().string() : p.filename().string();
            if (fs::exists(p / "trace.csv")) {
                const auto t = read_csv((p / "trace.csv").string());
                std::string last_eps = "0";
                for (const auto &r : t.rows) {
                    const double e = parse_real(r.at(t.column("eps")));
                    const bool ll = e > 0 && e < 1;
                    eps.row({src, r.at(t.column("n")), r.at(t.column("eps")),
                             ll ? num(std::log(std::log(1 / e))) : "nan"});
                    last_eps = r.at(t.column("eps"));
                }
                summary.row({src, "kam", std::to_string(t.rows.size() - 1), last_eps});
            }
            if (fs::exists(p / "measure.csv")) {
                const auto t = read_csv((p / "measure.csv").string());
                auto rows = t.rows;
                const auto gc = t.column("gamma");
                std::stable_sort(rows.begin(), rows.end(), [&](const auto &a, const auto &b) {
                    return parse_real(a.at(gc)) > parse_real(b.at(gc));
                });
                for (const auto &r : rows) {
                    meas.row({src, r.at(gc), r.at(t.column("fraction")), r.at(t.column("ci_lo")),
                              r.at(t.column("ci_hi")), r.at(t.column("bound"))});
                    summary.row({src, "measure", r.at(gc), r.at(t.column("fraction"))});
                }
            }
            if (fs::exists(p / "residual.csv")) {
                const auto t = read_csv((p / "residual.csv").string());
                for (const auto &r : t.rows) {
                    resid.row({src, r.at(t.column("J")), r.at(t.column("D")), r.at(t.column("residual_abs"))});
                    summary.row({src, "residual", r.at(t.column("D")), r.at(t.column("residual_abs"))});
                }
            }
        }
        summary.write(dir / "summary.csv");
        eps.write(dir / "eps_decay.csv");
        meas.write(dir / "measure_vs_gamma.csv");
        resid.write(dir / "residual_vs_truncation.csv");
        fmt::print(io.out, "{} summary rows written to {}\n", summary.rows(), dir.string());
        return static_cast<int>(ok);
    });
}

} // namespace nlskam::cli
