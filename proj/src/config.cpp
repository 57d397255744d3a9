#include "andlab/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace andlab {

HoppingKernel ExperimentConfig::kernel() const {
    if (kernel_zero) return HoppingKernel::zero(dimension);
    HoppingKernel k(dimension);
    for (const auto& [off, amp] : kernel_terms) k.set(off, amp);
    k.require_nontrivial();
    return k;
}

void ExperimentConfig::validate() const {
    auto fail = [](const std::string& field, const std::string& why) {
        throw std::invalid_argument("config: " + field + ": " + why);
    };
    if (dimension < 1 || dimension > 3) fail("model.dimension", "must be 1..3");
    if (!kernel_zero && kernel_terms.empty())
        fail("model.kernel", "empty kernel (use 'zero' for the diagnostic model)");
    for (const auto& [off, amp] : kernel_terms) {
        (void)amp;
        if (static_cast<int>(off.size()) != dimension)
            fail("model.kernel", "offset dimension mismatch");
    }
    disorder.validate();
    if (ids_side < 8) fail("ids.side", "must be >= 8");
    if (stats_side < 8) fail("stats.side", "must be >= 8");
    for (int s : wcontrol_sides)
        if (s < 8) fail("wcontrol.sides", "every side must be >= 8");
    if (ids_lo >= ids_hi) fail("ids.realizations", "empty range");
    if (stats_lo >= stats_hi) fail("stats.realizations", "empty range");
    if (ids_lo < stats_hi && stats_lo < ids_hi)
        fail("stats.realizations",
             "statistics realization range overlaps the reference pool range; "
             "the two phases must use disjoint realizations");
    if (anchor_kind != "bulk" && anchor_kind != "lower_edge" &&
        anchor_kind != "upper_edge")
        fail("anchor.kind", "expected bulk | lower_edge | upper_edge");
    if (window_mass <= 0.0) fail("window.mass", "must be > 0");
    if (count_mass <= 0.0 || count_mass > window_mass)
        fail("window.count_mass", "must be in (0, window.mass]");
    if (edge_margin < 0.0) fail("window.edge_margin", "must be >= 0");
    if (moment_mass <= 0.0) fail("moments.mass", "must be > 0");
    if (minami_constant <= 0.0) fail("moments.minami_constant", "must be > 0");
    if (wcontrol_realizations < 2) fail("wcontrol.realizations", "must be >= 2");
    if (clt_mass <= 0.0) fail("clt.mass", "must be > 0");
    if (deviation_gammas.empty()) fail("clt.gammas", "must not be empty");
    if (!std::is_sorted(deviation_gammas.begin(), deviation_gammas.end()))
        fail("clt.gammas", "must be ascending");
    if (reduction_c1 <= 0.0 || reduction_c2 <= 0.0)
        fail("reduction.c1/c2", "must be > 0");
    if (bernoulli_mass <= 0.0 || bernoulli_mass > 0.1)
        fail("reduction.bernoulli_mass", "must be in (0, 0.1]");
    if (lifshitz_offsets.size() < 3)
        fail("lifshitz.offsets", "need at least 3 offsets");
    for (double a : lifshitz_offsets)
        if (a <= 0.0) fail("lifshitz.offsets", "offsets must be > 0");
    if (null_reps < 2) fail("null.reps", "must be >= 2");
    if (threads <= 0) fail("threads", "must be > 0");
    if (out_dir.empty()) fail("out", "must not be empty");
}

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream ss(s);
    std::vector<std::string> out;
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing junk");
        return d;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: " + key + ": not a number: " + v);
    }
}

std::int64_t to_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        std::int64_t i = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing junk");
        return i;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: " + key + ": not an integer: " + v);
    }
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw std::invalid_argument("config: " + key + ": expected true|false: " + v);
}

// "1:1.0 2,0:0.25" -> offset:amplitude terms; offset components comma-split
std::vector<std::pair<std::vector<int>, double>> parse_kernel_terms(
    const std::string& key, const std::string& v) {
    std::vector<std::pair<std::vector<int>, double>> terms;
    for (const auto& tok : split_ws(v)) {
        auto colon = tok.rfind(':');
        if (colon == std::string::npos)
            throw std::invalid_argument("config: " + key +
                                        ": expected offset:amplitude, got " + tok);
        std::vector<int> off;
        std::stringstream cs(tok.substr(0, colon));
        std::string part;
        while (std::getline(cs, part, ','))
            off.push_back(static_cast<int>(to_int(key, part)));
        if (off.empty())
            throw std::invalid_argument("config: " + key + ": empty offset");
        terms.emplace_back(std::move(off),
                           to_double(key, tok.substr(colon + 1)));
    }
    return terms;
}

DisorderSpec parse_disorder(const std::string& key, const std::string& v,
                            double lambda) {
    auto toks = split_ws(v);
    if (toks.empty())
        throw std::invalid_argument("config: " + key + ": empty value");
    if (toks[0] == "uniform") {
        if (toks.size() != 3)
            throw std::invalid_argument("config: " + key +
                                        ": expected 'uniform <a> <b>'");
        return DisorderSpec::uniform(to_double(key, toks[1]),
                                     to_double(key, toks[2]), lambda);
    }
    if (toks[0] == "table") {
        DisorderSpec d;
        d.family = DisorderFamily::TabulatedInverseCdf;
        d.lambda = lambda;
        for (std::size_t i = 1; i < toks.size(); ++i) {
            auto colon = toks[i].find(':');
            if (colon == std::string::npos)
                throw std::invalid_argument("config: " + key +
                                            ": expected u:q pairs");
            d.icdf_u.push_back(to_double(key, toks[i].substr(0, colon)));
            d.icdf_q.push_back(to_double(key, toks[i].substr(colon + 1)));
        }
        return d;
    }
    throw std::invalid_argument("config: " + key + ": unknown family " + toks[0]);
}

} // namespace

ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig cfg;
    std::set<std::string> seen;
    std::string disorder_value; // deferred: needs lambda
    double lambda = cfg.disorder.lambda;
    bool lambda_set = false, disorder_set = false;

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (!seen.insert(key).second)
            throw std::invalid_argument("config: duplicate key " + key);

        if (key == "model.id") cfg.model_id = value;
        else if (key == "model.dimension")
            cfg.dimension = static_cast<int>(to_int(key, value));
        else if (key == "model.kernel") {
            if (value == "zero") {
                cfg.kernel_zero = true;
                cfg.kernel_terms.clear();
            } else {
                cfg.kernel_terms = parse_kernel_terms(key, value);
            }
        } else if (key == "model.disorder") {
            disorder_value = value;
            disorder_set = true;
        } else if (key == "model.lambda") {
            lambda = to_double(key, value);
            lambda_set = true;
        } else if (key == "ids.side")
            cfg.ids_side = static_cast<int>(to_int(key, value));
        else if (key == "ids.realization_lo") cfg.ids_lo = to_int(key, value);
        else if (key == "ids.realization_hi") cfg.ids_hi = to_int(key, value);
        else if (key == "ids.truncate_below")
            cfg.ids_truncate = to_double(key, value);
        else if (key == "stats.side")
            cfg.stats_side = static_cast<int>(to_int(key, value));
        else if (key == "stats.realization_lo") cfg.stats_lo = to_int(key, value);
        else if (key == "stats.realization_hi") cfg.stats_hi = to_int(key, value);
        else if (key == "anchor.kind") cfg.anchor_kind = value;
        else if (key == "anchor.energy") cfg.anchor_energy = to_double(key, value);
        else if (key == "window.mass") cfg.window_mass = to_double(key, value);
        else if (key == "window.count_mass")
            cfg.count_mass = to_double(key, value);
        else if (key == "window.edge_margin")
            cfg.edge_margin = to_double(key, value);
        else if (key == "moments.mass") cfg.moment_mass = to_double(key, value);
        else if (key == "moments.minami_constant")
            cfg.minami_constant = to_double(key, value);
        else if (key == "wcontrol.sides") {
            cfg.wcontrol_sides.clear();
            for (const auto& t : split_ws(value))
                cfg.wcontrol_sides.push_back(static_cast<int>(to_int(key, t)));
        } else if (key == "wcontrol.realizations")
            cfg.wcontrol_realizations = to_int(key, value);
        else if (key == "clt.mass") cfg.clt_mass = to_double(key, value);
        else if (key == "clt.gammas") {
            cfg.deviation_gammas.clear();
            for (const auto& t : split_ws(value))
                cfg.deviation_gammas.push_back(to_double(key, t));
        } else if (key == "reduction.c1")
            cfg.reduction_c1 = to_double(key, value);
        else if (key == "reduction.c2") cfg.reduction_c2 = to_double(key, value);
        else if (key == "reduction.keep_vectors")
            cfg.keep_vectors = to_bool(key, value);
        else if (key == "reduction.bernoulli_mass")
            cfg.bernoulli_mass = to_double(key, value);
        else if (key == "lifshitz.offsets") {
            cfg.lifshitz_offsets.clear();
            for (const auto& t : split_ws(value))
                cfg.lifshitz_offsets.push_back(to_double(key, t));
        } else if (key == "null.reps")
            cfg.null_reps = static_cast<int>(to_int(key, value));
        else if (key == "threads")
            cfg.threads = static_cast<int>(to_int(key, value));
        else if (key == "seed")
            cfg.master_seed = static_cast<std::uint64_t>(to_int(key, value));
        else if (key == "out") cfg.out_dir = value;
        else if (key.rfind("labels.", 0) == 0)
            cfg.labels[key.substr(7)] = value;
        else
            throw std::invalid_argument("config: unknown key " + key);
    }
    if (disorder_set) cfg.disorder = parse_disorder("model.disorder",
                                                    disorder_value, lambda);
    else if (lambda_set) cfg.disorder.lambda = lambda;
    cfg.validate();
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    return parse_config(in);
}

} // namespace andlab
