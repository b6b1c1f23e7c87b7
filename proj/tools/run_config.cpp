#include "run_config.hpp"

#include <nlskam/errors.hpp>
#include <nlskam/format.hpp>
#include <nlskam/random.hpp>
#include <nlskam/smalldiv.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <type_traits>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

namespace nlskam::cli
{

namespace
{

int line_of(const YAML::Node &n)
{
    return n.Mark().line >= 0 ? n.Mark().line + 1 : -1;
}

// Walks one YAML mapping, remembering which keys were consumed so that
// unknown keys can be reported.
class Section
{
public:
    Section(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path))
    {
        if (node_ && !node_.IsNull() && !node_.IsMap()) {
            throw ConfigError(path_, "expected a mapping", line_of(node_));
        }
    }

    YAML::Node take(const std::string &key)
    {
        seen_.insert(key);
        // Const lookup: a missing key must not be inserted into the document.
        const YAML::Node &n = node_;
        return node_ && node_.IsMap() ? n[key] : YAML::Node(YAML::NodeType::Undefined);
    }

    Section sub(const std::string &key) { return Section(take(key), field(key)); }

    std::string field(const std::string &key) const { return path_.empty() ? key : path_ + "." + key; }

    void finish() const
    {
        if (!node_) {
            return;
        }
        for (const auto &kv : node_) {
            const auto key = kv.first.as<std::string>();
            if (!seen_.count(key)) {
                throw ConfigError(field(key), "unknown key", line_of(kv.first));
            }
        }
    }

    double real(const std::string &key, double &out)
    {
        const auto n = take(key);
        if (n) {
            out = to_real(n, field(key));
        }
        return out;
    }

    template <typename Int>
    Int integer(const std::string &key, Int &out)
    {
        const auto n = take(key);
        if (n) {
            const long long v = to_integer(n, field(key));
            if (std::is_unsigned_v<Int> && v < 0) {
                throw ConfigError(field(key), "must be non-negative", line_of(n));
            }
            out = static_cast<Int>(v);
        }
        return out;
    }

    static double to_real(const YAML::Node &n, const std::string &field)
    {
        if (!n.IsScalar()) {
            throw ConfigError(field, "expected a number", line_of(n));
        }
        try {
            return parse_real(n.Scalar());
        } catch (const std::exception &) {
            throw ConfigError(field, "expected a number, got '" + n.Scalar() + "'", line_of(n));
        }
    }

    static long long to_integer(const YAML::Node &n, const std::string &field)
    {
        if (!n.IsScalar()) {
            throw ConfigError(field, "expected an integer", line_of(n));
        }
        try {
            return parse_integer(n.Scalar());
        } catch (const std::exception &) {
            throw ConfigError(field, "expected an integer, got '" + n.Scalar() + "'", line_of(n));
        }
    }

    int line(const std::string &key) const { return node_ && node_[key] ? line_of(node_[key]) : -1; }

private:
    YAML::Node node_;
    std::string path_;
    std::set<std::string> seen_;
};

std::vector<int> int_list(const YAML::Node &n, const std::string &field)
{
    std::vector<int> out;
    if (!n) {
        return out;
    }
    if (!n.IsSequence()) {
        throw ConfigError(field, "expected a list of integers", line_of(n));
    }
    for (const auto &e : n) {
        out.push_back(static_cast<int>(Section::to_integer(e, field)));
    }
    return out;
}

std::vector<double> real_list(const YAML::Node &n, const std::string &field)
{
    std::vector<double> out;
    if (!n.IsSequence()) {
        throw ConfigError(field, "expected a list of numbers", line_of(n));
    }
    for (const auto &e : n) {
        out.push_back(Section::to_real(e, field));
    }
    return out;
}

std::map<int, double> int_real_map(const YAML::Node &n, const std::string &field)
{
    std::map<int, double> out;
    if (!n) {
        return out;
    }
    if (!n.IsMap()) {
        throw ConfigError(field, "expected a mapping from mode to number", line_of(n));
    }
    for (const auto &kv : n) {
        const int j = static_cast<int>(Section::to_integer(kv.first, field));
        out[j] = Section::to_real(kv.second, fmt::format("{}.{}", field, j));
    }
    return out;
}

template <typename F>
void guard(const std::string &field, int line, F &&f)
{
    try {
        f();
    } catch (const ConfigError &) {
        throw;
    } catch (const std::exception &e) {
        throw ConfigError(field, e.what(), line);
    }
}

void require(bool ok, const std::string &field, const std::string &what, int line)
{
    if (!ok) {
        throw ConfigError(field, what, line);
    }
}

} // namespace

RunConfig parse_config(std::string_view yaml)
{
    YAML::Node root;
    try {
        root = YAML::Load(std::string(yaml));
    } catch (const YAML::ParserException &e) {
        throw ConfigError("<document>", e.msg, e.mark.line + 1);
    }
    if (!root || root.IsNull()) {
        throw ConfigError("<document>", "empty configuration");
    }
    RunConfig c;
    Section top(root, "");

    auto tr = top.sub("truncation");
    tr.integer("J", c.J);
    tr.integer("D", c.D);
    tr.finish();
    require(c.J >= 1 && c.J <= max_mode, "truncation.J", fmt::format("J must lie in [1, {}]", max_mode),
            tr.line("J"));
    require(c.D >= 1 && 2 * c.D + 2 <= max_letters, "truncation.D",
            fmt::format("D must lie in [1, {}]", (max_letters - 2) / 2), tr.line("D"));

    auto sc = top.sub("schedule");
    if (auto n = sc.take("kind")) {
        guard(sc.field("kind"), line_of(n), [&] { c.site_kind = parse_site_kind(n.as<std::string>()); });
    }
    sc.real("eta", c.eta);
    sc.integer("i_star", c.i_star);
    if (auto n = sc.take("variant")) {
        guard(sc.field("variant"), line_of(n), [&] { c.variant = parse_site_variant(n.as<std::string>()); });
    }
    c.s0 = int_list(sc.take("s0"), sc.field("s0"));
    if (auto n = sc.take("secondary_eta")) {
        c.secondary_eta = Section::to_real(n, sc.field("secondary_eta"));
    }
    sc.finish();
    guard(sc.field("eta"), sc.line("eta"), [&] { SiteFunction(c.site_kind, c.eta); });
    guard(sc.field("i_star"), sc.line("i_star"), [&] { (void)c.site_schedule(); });

    auto nl = top.sub("nonlinearity");
    if (auto n = nl.take("coefficients")) {
        c.fcoeffs.clear();
        const std::string f = nl.field("coefficients");
        require(n.IsSequence(), f, "expected a list of [degree, value] pairs", line_of(n));
        for (const auto &e : n) {
            require(e.IsSequence() && e.size() == 2, f, "expected a [degree, value] pair", line_of(e));
            c.fcoeffs.emplace_back(static_cast<int>(Section::to_integer(e[0], f)), Section::to_real(e[1], f));
        }
    }
    nl.real("radius", c.f_radius);
    nl.finish();
    for (const auto &[d, v] : c.fcoeffs) {
        require(d >= 1 && d <= c.D, nl.field("coefficients"),
                fmt::format("degree {} outside [1, D = {}]", d, c.D), nl.line("coefficients"));
        require(std::isfinite(v), nl.field("coefficients"), "coefficient must be finite", nl.line("coefficients"));
    }
    require(c.f_radius > 0, nl.field("radius"), "radius must be positive", nl.line("radius"));

    top.real("gamma", c.gamma);
    top.real("tau", c.tau);
    guard("gamma", top.line("gamma"), [&] { DiophParams(c.gamma, c.site_schedule(), c.tau); });

    auto nm = top.sub("norms");
    nm.real("r0", c.r0);
    nm.real("p0", c.p0);
    nm.real("rho", c.rho);
    nm.real("delta", c.delta);
    nm.finish();
    require(c.r0 > 0, nm.field("r0"), "r0 must be positive", nm.line("r0"));
    require(c.p0 > 0, nm.field("p0"), "p0 must be positive", nm.line("p0"));
    guard(nm.field("rho"), nm.line("rho"), [&] { (void)c.schedules(); });
    require(c.r0 * c.r0 < c.f_radius, nl.field("radius"), "need r0^2 < radius for f to be analytic on the ball",
            nl.line("radius"));

    auto ac = top.sub("actions");
    c.action_support = int_list(ac.take("support"), ac.field("support"));
    ac.real("value", c.action_value);
    ac.real("decay", c.action_decay);
    c.action_values = int_real_map(ac.take("values"), ac.field("values"));
    ac.finish();
    {
        const auto S = c.sites();
        for (int s : c.action_support) {
            require(std::binary_search(S.begin(), S.end(), s), ac.field("support"),
                    fmt::format("{} is not a tangential site in [-J, J]", s), ac.line("support"));
        }
        for (const auto &[s, v] : c.action_values) {
            require(std::binary_search(S.begin(), S.end(), s), ac.field("values"),
                    fmt::format("{} is not a tangential site in [-J, J]", s), ac.line("values"));
            require(v >= 0, ac.field("values"), "actions must be non-negative", ac.line("values"));
        }
        require(c.action_value >= 0, ac.field("value"), "actions must be non-negative", ac.line("value"));
        const Torus torus(S, c.actions());
        require(torus.action_radius(c.p0) < c.r0, "actions",
                fmt::format("actions lie outside I(p0, r0): radius {} >= r0", torus.action_radius(c.p0)),
                top.line("actions"));
    }

    auto po = top.sub("potential");
    po.integer("seed", c.potential_seed);
    po.real("amplitude", c.potential_amplitude);
    c.potential_values = int_real_map(po.take("values"), po.field("values"));
    po.finish();
    require(c.potential_amplitude >= 0 && c.potential_amplitude <= 0.25, po.field("amplitude"),
            "amplitude must lie in [0, 1/4]", po.line("amplitude"));
    for (const auto &[j, v] : c.potential_values) {
        require(std::abs(j) <= c.J && std::abs(v) <= 0.25, po.field("values"),
                fmt::format("V_{} must have |j| <= J and |V| <= 1/4", j), po.line("values"));
    }

    auto tl = top.sub("tolerances");
    tl.real("kam", c.kam_tol);
    tl.integer("max_steps", c.max_steps);
    tl.real("smallness_gate", c.smallness_gate);
    tl.real("neumann", c.neumann_tol);
    tl.real("lie", c.lie_tol);
    if (auto n = tl.take("check_frequencies")) {
        guard(tl.field("check_frequencies"), line_of(n), [&] { c.check_frequencies = n.as<bool>(); });
    }
    tl.finish();
    require(c.kam_tol > 0, tl.field("kam"), "tolerance must be positive", tl.line("kam"));
    require(c.max_steps >= 0, tl.field("max_steps"), "max_steps must be non-negative", tl.line("max_steps"));
    require(c.smallness_gate > 0, tl.field("smallness_gate"), "gate must be positive", tl.line("smallness_gate"));
    require(c.neumann_tol > 0 && c.lie_tol >= 0, "tolerances", "tolerances must be positive", top.line("tolerances"));

    auto me = top.sub("measure");
    me.integer("lmax", c.measure_lmax);
    me.integer("samples", c.measure_samples);
    if (auto n = me.take("gammas")) {
        c.measure_gammas = real_list(n, me.field("gammas"));
    }
    me.integer("seed", c.measure_seed);
    me.integer("threads", c.measure_threads);
    me.finish();
    require(c.measure_lmax >= 2 && c.measure_lmax <= max_letters, me.field("lmax"), "lmax must lie in [2, 16]",
            me.line("lmax"));
    require(c.measure_samples > 0, me.field("samples"), "samples must be positive", me.line("samples"));
    require(!c.measure_gammas.empty(), me.field("gammas"), "need at least one gamma", me.line("gammas"));
    for (double g : c.measure_gammas) {
        require(g > 0, me.field("gammas"), "gammas must be positive", me.line("gammas"));
    }
    require(c.measure_threads >= 1, me.field("threads"), "threads must be positive", me.line("threads"));

    auto sy = top.sub("synth");
    sy.real("t0", c.synth_t0);
    sy.real("t1", c.synth_t1);
    sy.integer("nt", c.synth_nt);
    sy.integer("nx", c.synth_nx);
    sy.integer("steps", c.synth_steps);
    sy.finish();
    require(c.synth_t1 > c.synth_t0, sy.field("t1"), "need t1 > t0", sy.line("t1"));
    require(c.synth_nt >= 2 && c.synth_nt % 2 == 0, sy.field("nt"), "nt must be even and >= 2", sy.line("nt"));
    require(c.synth_nx >= 1, sy.field("nx"), "nx must be positive", sy.line("nx"));
    require(c.synth_steps >= 1, sy.field("steps"), "steps must be positive", sy.line("steps"));

    auto out = top.sub("output");
    if (auto n = out.take("dir")) {
        c.output_dir = n.as<std::string>();
    }
    out.finish();
    top.finish();
    return c;
}

RunConfig load_config(const std::string &path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config " + path);
    }
    std::ostringstream os;
    os << in.rdbuf();
    return parse_config(os.str());
}

SiteSchedule RunConfig::site_schedule() const
{
    std::optional<SiteFunction> secondary;
    if (secondary_eta) {
        secondary = SiteFunction(SiteKind::loggevrey, *secondary_eta);
    }
    return SiteSchedule(SiteFunction(site_kind, eta), i_star, variant, s0, secondary);
}

std::vector<int> RunConfig::sites() const
{
    return gen_sites(site_schedule(), J);
}

ActionVector RunConfig::actions() const
{
    ActionVector I;
    const auto support = action_support.empty() ? sites() : action_support;
    for (int s : support) {
        I[s] = action_value * std::pow(jjap(s), -action_decay);
    }
    for (const auto &[s, v] : action_values) {
        I[s] = v;
    }
    return I;
}

std::map<int, double> RunConfig::potential() const
{
    CounterRng rng(potential_seed);
    std::map<int, double> V;
    for (int j = -J; j <= J; ++j) {
        V[j] = rng.uniform(0, static_cast<std::uint64_t>(j + max_mode), -potential_amplitude, potential_amplitude);
    }
    for (const auto &[j, v] : potential_values) {
        V[j] = v;
    }
    return V;
}

FrequencyVector RunConfig::omega() const
{
    return FrequencyVector::from_potential(J, potential());
}

HamParams RunConfig::ham_params() const
{
    return HamParams{J, D, r0, p0};
}

Schedules RunConfig::schedules() const
{
    return Schedules(r0, p0, rho, delta, eta);
}

KamProblem RunConfig::kam_problem() const
{
    KamProblem p{omega(), Torus(sites(), actions()), gamma, site_schedule(), tau, schedules()};
    p.neumann_tol = neumann_tol;
    p.lie_tol = lie_tol;
    p.check_frequencies = check_frequencies;
    return p;
}

RunOptions RunConfig::run_options() const
{
    RunOptions o;
    o.max_steps = max_steps;
    o.tol = kam_tol;
    o.smallness_gate = smallness_gate;
    return o;
}

std::string echo_config(const RunConfig &c)
{
    YAML::Emitter e;
    auto num = [](double x) { return format_real(x); };
    e << YAML::BeginMap;
    e << YAML::Key << "truncation" << YAML::Value << YAML::BeginMap << YAML::Key << "J" << YAML::Value << c.J
      << YAML::Key << "D" << YAML::Value << c.D << YAML::EndMap;
    e << YAML::Key << "schedule" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "kind" << YAML::Value << to_string(c.site_kind);
    e << YAML::Key << "eta" << YAML::Value << num(c.eta);
    e << YAML::Key << "i_star" << YAML::Value << c.i_star;
    e << YAML::Key << "variant" << YAML::Value << to_string(c.variant);
    e << YAML::Key << "s0" << YAML::Value << YAML::Flow << c.s0;
    if (c.secondary_eta) {
        e << YAML::Key << "secondary_eta" << YAML::Value << num(*c.secondary_eta);
    }
    e << YAML::EndMap;
    e << YAML::Key << "nonlinearity" << YAML::Value << YAML::BeginMap << YAML::Key << "coefficients" << YAML::Value
      << YAML::BeginSeq;
    for (const auto &[d, v] : c.fcoeffs) {
        e << YAML::Flow << YAML::BeginSeq << d << num(v) << YAML::EndSeq;
    }
    e << YAML::EndSeq << YAML::Key << "radius" << YAML::Value << num(c.f_radius) << YAML::EndMap;
    e << YAML::Key << "gamma" << YAML::Value << num(c.gamma);
    e << YAML::Key << "tau" << YAML::Value << num(c.tau);
    e << YAML::Key << "norms" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "r0" << YAML::Value << num(c.r0) << YAML::Key << "p0" << YAML::Value << num(c.p0);
    e << YAML::Key << "rho" << YAML::Value << num(c.rho) << YAML::Key << "delta" << YAML::Value << num(c.delta);
    e << YAML::EndMap;
    e << YAML::Key << "actions" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "support" << YAML::Value << YAML::Flow << c.action_support;
    e << YAML::Key << "value" << YAML::Value << num(c.action_value);
    e << YAML::Key << "decay" << YAML::Value << num(c.action_decay);
    e << YAML::Key << "values" << YAML::Value << YAML::Flow << YAML::BeginMap;
    for (const auto &[s, v] : c.action_values) {
        e << YAML::Key << s << YAML::Value << num(v);
    }
    e << YAML::EndMap << YAML::EndMap;
    e << YAML::Key << "potential" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "seed" << YAML::Value << c.potential_seed;
    e << YAML::Key << "amplitude" << YAML::Value << num(c.potential_amplitude);
    e << YAML::Key << "values" << YAML::Value << YAML::Flow << YAML::BeginMap;
    for (const auto &[j, v] : c.potential_values) {
        e << YAML::Key << j << YAML::Value << num(v);
    }
    e << YAML::EndMap << YAML::EndMap;
    e << YAML::Key << "tolerances" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "kam" << YAML::Value << num(c.kam_tol);
    e << YAML::Key << "max_steps" << YAML::Value << c.max_steps;
    e << YAML::Key << "smallness_gate" << YAML::Value << num(c.smallness_gate);
    e << YAML::Key << "neumann" << YAML::Value << num(c.neumann_tol);
    e << YAML::Key << "lie" << YAML::Value << num(c.lie_tol);
    e << YAML::Key << "check_frequencies" << YAML::Value << c.check_frequencies;
    e << YAML::EndMap;
    e << YAML::Key << "measure" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "lmax" << YAML::Value << c.measure_lmax;
    e << YAML::Key << "samples" << YAML::Value << c.measure_samples;
    e << YAML::Key << "gammas" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (double g : c.measure_gammas) {
        e << num(g);
    }
    e << YAML::EndSeq;
    e << YAML::Key << "seed" << YAML::Value << c.measure_seed;
    e << YAML::Key << "threads" << YAML::Value << c.measure_threads;
    e << YAML::EndMap;
    e << YAML::Key << "synth" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "t0" << YAML::Value << num(c.synth_t0) << YAML::Key << "t1" << YAML::Value << num(c.synth_t1);
    e << YAML::Key << "nt" << YAML::Value << c.synth_nt << YAML::Key << "nx" << YAML::Value << c.synth_nx;
    e << YAML::Key << "steps" << YAML::Value << c.synth_steps;
    e << YAML::EndMap;
    e << YAML::Key << "output" << YAML::Value << YAML::BeginMap << YAML::Key << "dir" << YAML::Value << c.output_dir
      << YAML::EndMap;
    e << YAML::EndMap;
    return std::string(e.c_str()) + "\n";
}

std::string resolve_output_dir(const RunConfig &c, const std::optional<std::string> &flag)
{
    if (flag && !flag->empty()) {
        return *flag;
    }
    if (const char *env = std::getenv("NLSKAM_OUTPUT_DIR"); env != nullptr && *env != '\0') {
        return env;
    }
    return c.output_dir;
}

} // namespace nlskam::cli
