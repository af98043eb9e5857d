#include "rbelast/config.hpp"

#include "rbelast/errors.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace rbe {

namespace {

namespace pt = boost::property_tree;

std::string trim(std::string s)
{
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v)
{
    const std::string t = trim(v);
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
    if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(x))
        throw OutOfRangeValue(key + " = '" + v + "' is not a number");
    return x;
}

long long to_int(const std::string& key, const std::string& v)
{
    const std::string t = trim(v);
    long long x = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
    if (ec != std::errc() || ptr != t.data() + t.size())
        throw OutOfRangeValue(key + " = '" + v + "' is not an integer");
    return x;
}

std::vector<double> to_list(const std::string& key, const std::string& v)
{
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(to_double(key, item));
    if (out.empty())
        throw OutOfRangeValue(key + " is empty");
    return out;
}

void positive(const std::string& key, double x)
{
    if (!(x > 0.0))
        throw OutOfRangeValue(key + " must be positive");
}

std::string fmt(double x)
{
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

} // namespace

RunConfig parse_config(std::string_view text)
{
    pt::ptree tree;
    std::istringstream in{std::string(text)};
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw MalformedFile(e.message() + " at line " + std::to_string(e.line()));
    }

    static const std::map<std::string, std::set<std::string>> known = {
        {"problem", {"name", "resolution", "nu", "mu_lo", "mu_hi"}},
        {"greedy", {"n_train", "tol", "n_max", "seed", "indicator"}},
        {"scm", {"tol", "m", "j_max", "n_train"}},
        {"online", {"n", "delta_mu1"}},
    };
    for (const auto& [section, body] : tree) {
        const auto it = known.find(section);
        if (it == known.end())
            throw UnknownKey(body.empty() ? "top-level key '" + section + "'" : "section [" + section + "]");
        for (const auto& [key, value] : body)
            if (!it->second.count(key))
                throw UnknownKey("[" + section + "] " + key);
    }

    RunConfig cfg;
    auto get = [&](const std::string& path) { return tree.get_optional<std::string>(path); };

    if (auto v = get("problem.name"))
        cfg.problem = trim(*v);
    if (cfg.problem.empty())
        throw OutOfRangeValue("[problem] name is required");
    bool known_name = false;
    for (const auto& n : problem_names())
        known_name |= n == cfg.problem;
    if (!known_name)
        throw UnknownProblem("'" + cfg.problem + "'");

    if (auto v = get("problem.resolution")) {
        const auto r = trim(*v);
        if (r == "coarse")
            cfg.options.resolution = Resolution::Coarse;
        else if (r == "fine")
            cfg.options.resolution = Resolution::Fine;
        else
            throw OutOfRangeValue("resolution must be coarse or fine");
    }
    if (auto v = get("problem.nu")) {
        const double nu = to_double("nu", *v);
        if (!(nu > -1.0 && nu < 0.5))
            throw OutOfRangeValue("nu must lie in (-1, 0.5)");
        cfg.options.nu = nu;
    }
    const auto lo = get("problem.mu_lo"), hi = get("problem.mu_hi");
    if (lo.has_value() != hi.has_value())
        throw OutOfRangeValue("mu_lo and mu_hi must be given together");
    if (lo) {
        ParamBox box{to_list("mu_lo", *lo), to_list("mu_hi", *hi)};
        if (box.lo.size() != box.hi.size())
            throw OutOfRangeValue("mu_lo and mu_hi differ in length");
        cfg.options.box = box;
    }

    if (auto v = get("greedy.n_train")) {
        cfg.n_train = static_cast<int>(to_int("n_train", *v));
        if (cfg.n_train < 1)
            throw OutOfRangeValue("n_train must be >= 1");
    }
    if (auto v = get("greedy.tol")) {
        cfg.tol = to_double("tol", *v);
        positive("tol", cfg.tol);
    }
    if (auto v = get("greedy.n_max")) {
        cfg.N_max = static_cast<int>(to_int("n_max", *v));
        if (cfg.N_max < 1 || cfg.N_max > 500)
            throw OutOfRangeValue("n_max must lie in [1, 500]");
    }
    if (auto v = get("greedy.seed")) {
        const long long s = to_int("seed", *v);
        if (s < 0)
            throw OutOfRangeValue("seed must be non-negative");
        cfg.seed = static_cast<std::uint64_t>(s);
    }
    if (auto v = get("greedy.indicator")) {
        const auto s = trim(*v);
        if (s == "relative")
            cfg.indicator = Indicator::RelativeOutputBound;
        else if (s == "absolute")
            cfg.indicator = Indicator::AbsoluteOutputBound;
        else
            throw OutOfRangeValue("indicator must be relative or absolute");
    }

    if (auto v = get("scm.tol")) {
        cfg.scm.tol = to_double("scm tol", *v);
        if (!(cfg.scm.tol > 0.0 && cfg.scm.tol < 1.0))
            throw OutOfRangeValue("scm tol must lie in (0, 1)");
    }
    if (auto v = get("scm.m")) {
        cfg.scm.M = static_cast<int>(to_int("m", *v));
        if (cfg.scm.M < 1)
            throw OutOfRangeValue("m must be >= 1");
    }
    if (auto v = get("scm.j_max")) {
        cfg.scm.J_max = static_cast<int>(to_int("j_max", *v));
        if (cfg.scm.J_max < 1)
            throw OutOfRangeValue("j_max must be >= 1");
    }
    if (auto v = get("scm.n_train")) {
        cfg.scm_n_train = static_cast<int>(to_int("scm n_train", *v));
        if (cfg.scm_n_train < 1)
            throw OutOfRangeValue("scm n_train must be >= 1");
    }

    if (auto v = get("online.n")) {
        cfg.online_N = static_cast<int>(to_int("n", *v));
        if (cfg.online_N < 0)
            throw OutOfRangeValue("online n must be >= 0");
    }
    if (auto v = get("online.delta_mu1")) {
        cfg.delta_mu1 = to_double("delta_mu1", *v);
        positive("delta_mu1", cfg.delta_mu1);
    }
    return cfg;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw MalformedFile("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string canonical_config(const RunConfig& cfg)
{
    std::ostringstream os;
    os << "problem.name=" << cfg.problem << '\n'
       << "problem.resolution=" << (cfg.options.resolution == Resolution::Fine ? "fine" : "coarse") << '\n';
    if (cfg.options.nu)
        os << "problem.nu=" << fmt(*cfg.options.nu) << '\n';
    if (cfg.options.box) {
        os << "problem.mu_lo=";
        for (std::size_t i = 0; i < cfg.options.box->lo.size(); ++i)
            os << (i ? "," : "") << fmt(cfg.options.box->lo[i]);
        os << "\nproblem.mu_hi=";
        for (std::size_t i = 0; i < cfg.options.box->hi.size(); ++i)
            os << (i ? "," : "") << fmt(cfg.options.box->hi[i]);
        os << '\n';
    }
    os << "greedy.n_train=" << cfg.n_train << '\n'
       << "greedy.tol=" << fmt(cfg.tol) << '\n'
       << "greedy.n_max=" << cfg.N_max << '\n'
       << "greedy.seed=" << cfg.seed << '\n'
       << "greedy.indicator=" << (cfg.indicator == Indicator::RelativeOutputBound ? "relative" : "absolute") << '\n'
       << "scm.tol=" << fmt(cfg.scm.tol) << '\n'
       << "scm.m=" << cfg.scm.M << '\n'
       << "scm.j_max=" << cfg.scm.J_max << '\n'
       << "scm.n_train=" << cfg.scm_n_train << '\n'
       << "online.n=" << cfg.online_N << '\n'
       << "online.delta_mu1=" << fmt(cfg.delta_mu1) << '\n';
    return os.str();
}

std::uint64_t fnv1a(std::string_view bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t config_hash(const RunConfig& cfg)
{
    return fnv1a(canonical_config(cfg));
}

} // namespace rbe
