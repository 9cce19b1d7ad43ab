#pragma once
// Strict run configuration: a single JSON file, every physics parameter
// explicit (no defaults for beta, eps, L, d), unknown keys rejected at every
// level, and a lossless serialization round-trip for artifact manifests.
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "h22/elliptic.hpp"
#include "h22/errors.hpp"
#include "h22/lattice.hpp"
#include "h22/sampler.hpp"

namespace h22 {

using Json = nlohmann::json;

struct EdgeOverride {
    int i = 0, j = 0;
    double beta = 0.0;
};

struct SiteOverride {
    int site = 0;
    double eps = 0.0;
};

// one entry of the observable list; which parameters matter depends on name
struct ObservableSpec {
    std::string name;
    std::vector<std::pair<int, int>> pairs;
    double m = 1.0;
    double gamma = 0.5;
    double a = 2.0;
    double alpha = 0.3;
    long n = 0;
};

struct RunConfig {
    int d = 0, L = 0;        // required
    double beta = 0.0;       // required, > 0
    double eps = 0.0;        // required, >= 0
    std::vector<EdgeOverride> beta_edges;
    std::vector<SiteOverride> eps_sites;
    SamplerConfig sampler;   // defaults allowed: sampler knobs are not physics
    std::vector<ObservableSpec> observables;
    std::string out_dir = "out";
    uint64_t seed = 1;
};

namespace detail {

inline void check_keys(const Json& j, const std::string& where,
                       std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed) ok = ok || it.key() == k;
        if (!ok) throw ConfigError("unknown key '" + it.key() + "' in " + where);
    }
}

inline const Json& need(const Json& j, const char* key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) throw ConfigError("missing required key '" + std::string(key) +
                                         "' in " + where);
    return *it;
}

inline double jnum(const Json& j, const std::string& field) {
    if (!j.is_number()) throw ConfigError(field + " must be a number");
    return j.get<double>();
}

inline int jint(const Json& j, const std::string& field) {
    if (!j.is_number_integer()) throw ConfigError(field + " must be an integer");
    return j.get<int>();
}

inline long jlong(const Json& j, const std::string& field) {
    if (!j.is_number_integer()) throw ConfigError(field + " must be an integer");
    return j.get<long>();
}

inline uint64_t juint(const Json& j, const std::string& field) {
    if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() &&
                                   j.get<long long>() < 0))
        throw ConfigError(field + " must be a nonnegative integer");
    return j.get<uint64_t>();
}

inline bool jbool(const Json& j, const std::string& field) {
    if (!j.is_boolean()) throw ConfigError(field + " must be a boolean");
    return j.get<bool>();
}

inline std::string jstr(const Json& j, const std::string& field) {
    if (!j.is_string()) throw ConfigError(field + " must be a string");
    return j.get<std::string>();
}

} // namespace detail

inline SamplerConfig parse_sampler(const Json& j) {
    using namespace detail;
    SamplerConfig s;
    check_keys(j, "sampler",
               {"warmup_sweeps", "measure_sweeps", "thin", "mala_every", "shift_every",
                "local_width", "mala_step", "shift_width", "refresh_interval", "adapt",
                "init_t", "logdet_scale", "chains"});
    if (j.contains("warmup_sweeps")) s.warmup_sweeps = jint(j["warmup_sweeps"], "sampler.warmup_sweeps");
    if (j.contains("measure_sweeps")) s.measure_sweeps = jint(j["measure_sweeps"], "sampler.measure_sweeps");
    if (j.contains("thin")) s.thin = jint(j["thin"], "sampler.thin");
    if (j.contains("mala_every")) s.mala_every = jint(j["mala_every"], "sampler.mala_every");
    if (j.contains("shift_every")) s.shift_every = jint(j["shift_every"], "sampler.shift_every");
    if (j.contains("local_width")) s.local_width = jnum(j["local_width"], "sampler.local_width");
    if (j.contains("mala_step")) s.mala_step = jnum(j["mala_step"], "sampler.mala_step");
    if (j.contains("shift_width")) s.shift_width = jnum(j["shift_width"], "sampler.shift_width");
    if (j.contains("refresh_interval"))
        s.refresh_interval = jint(j["refresh_interval"], "sampler.refresh_interval");
    if (j.contains("adapt")) s.adapt = jbool(j["adapt"], "sampler.adapt");
    if (j.contains("init_t")) s.init_t = jnum(j["init_t"], "sampler.init_t");
    if (j.contains("logdet_scale")) s.logdet_scale = jnum(j["logdet_scale"], "sampler.logdet_scale");
    if (j.contains("chains")) s.chains = jint(j["chains"], "sampler.chains");

    if (s.warmup_sweeps < 0) throw ConfigError("sampler.warmup_sweeps must be >= 0");
    if (s.measure_sweeps < 1) throw ConfigError("sampler.measure_sweeps must be >= 1");
    if (s.thin < 1) throw ConfigError("sampler.thin must be >= 1");
    if (s.mala_every < 0) throw ConfigError("sampler.mala_every must be >= 0");
    if (s.shift_every < 0) throw ConfigError("sampler.shift_every must be >= 0");
    if (!(s.local_width > 0.0)) throw ConfigError("sampler.local_width must be > 0");
    if (!(s.mala_step > 0.0)) throw ConfigError("sampler.mala_step must be > 0");
    if (!(s.shift_width > 0.0)) throw ConfigError("sampler.shift_width must be > 0");
    if (s.refresh_interval < 1) throw ConfigError("sampler.refresh_interval must be >= 1");
    if (!(s.logdet_scale > 0.0)) throw ConfigError("sampler.logdet_scale must be > 0");
    if (s.chains < 1) throw ConfigError("sampler.chains must be >= 1");
    return s;
}

inline ObservableSpec parse_observable(const Json& j, const std::string& where) {
    using namespace detail;
    check_keys(j, where, {"name", "pairs", "m", "gamma", "a", "alpha", "n"});
    ObservableSpec o;
    o.name = jstr(need(j, "name", where), where + ".name");
    if (o.name.empty()) throw ConfigError(where + ".name must not be empty");
    if (j.contains("pairs")) {
        const Json& p = j["pairs"];
        if (!p.is_array()) throw ConfigError(where + ".pairs must be an array of [x, y]");
        for (const Json& e : p) {
            if (!e.is_array() || e.size() != 2)
                throw ConfigError(where + ".pairs entries must be [x, y]");
            o.pairs.emplace_back(jint(e[0], where + ".pairs[..][0]"),
                                 jint(e[1], where + ".pairs[..][1]"));
        }
    }
    if (j.contains("m")) o.m = jnum(j["m"], where + ".m");
    if (j.contains("gamma")) o.gamma = jnum(j["gamma"], where + ".gamma");
    if (j.contains("a")) o.a = jnum(j["a"], where + ".a");
    if (j.contains("alpha")) o.alpha = jnum(j["alpha"], where + ".alpha");
    if (j.contains("n")) o.n = jlong(j["n"], where + ".n");
    return o;
}

inline RunConfig parse_run_config(const Json& j) {
    using namespace detail;
    check_keys(j, "config", {"lattice", "couplings", "sampler", "observables", "output", "seed"});
    RunConfig cfg;

    const Json& lat = need(j, "lattice", "config");
    check_keys(lat, "lattice", {"d", "L"});
    cfg.d = jint(need(lat, "d", "lattice"), "lattice.d");
    cfg.L = jint(need(lat, "L", "lattice"), "lattice.L");
    if (cfg.d < 1 || cfg.d > 3) throw ConfigError("lattice.d must be 1, 2, or 3");
    if (cfg.L < 1) throw ConfigError("lattice.L must be >= 1");

    const Json& cpl = need(j, "couplings", "config");
    check_keys(cpl, "couplings", {"beta", "eps", "beta_edges", "eps_sites"});
    cfg.beta = jnum(need(cpl, "beta", "couplings"), "couplings.beta");
    cfg.eps = jnum(need(cpl, "eps", "couplings"), "couplings.eps");
    if (!(cfg.beta > 0.0))
        throw ConfigError("couplings.beta must be > 0 (got " + std::to_string(cfg.beta) + ")");
    if (!(cfg.eps >= 0.0))
        throw ConfigError("couplings.eps must be >= 0 (got " + std::to_string(cfg.eps) + ")");
    if (cpl.contains("beta_edges")) {
        const Json& be = cpl["beta_edges"];
        if (!be.is_array()) throw ConfigError("couplings.beta_edges must be an array");
        for (const Json& e : be) {
            if (!e.is_array() || e.size() != 3)
                throw ConfigError("couplings.beta_edges entries must be [i, j, beta]");
            EdgeOverride o{jint(e[0], "beta_edges[..][0]"), jint(e[1], "beta_edges[..][1]"),
                           jnum(e[2], "beta_edges[..][2]")};
            if (!(o.beta >= 0.0)) throw ConfigError("couplings.beta_edges beta must be >= 0");
            cfg.beta_edges.push_back(o);
        }
    }
    if (cpl.contains("eps_sites")) {
        const Json& es = cpl["eps_sites"];
        if (!es.is_array()) throw ConfigError("couplings.eps_sites must be an array");
        for (const Json& e : es) {
            if (!e.is_array() || e.size() != 2)
                throw ConfigError("couplings.eps_sites entries must be [site, eps]");
            SiteOverride o{jint(e[0], "eps_sites[..][0]"), jnum(e[1], "eps_sites[..][1]")};
            if (!(o.eps >= 0.0)) throw ConfigError("couplings.eps_sites eps must be >= 0");
            cfg.eps_sites.push_back(o);
        }
    }

    if (j.contains("sampler")) cfg.sampler = parse_sampler(j["sampler"]);
    if (j.contains("observables")) {
        const Json& obs = j["observables"];
        if (!obs.is_array()) throw ConfigError("observables must be an array");
        for (size_t k = 0; k < obs.size(); ++k)
            cfg.observables.push_back(
                parse_observable(obs[k], "observables[" + std::to_string(k) + "]"));
    }
    if (j.contains("output")) cfg.out_dir = jstr(j["output"], "output");
    if (j.contains("seed")) cfg.seed = juint(j["seed"], "seed");
    return cfg;
}

inline RunConfig parse_run_config_text(const std::string& text) {
    Json j = Json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ConfigError("config is not valid JSON");
    return parse_run_config(j);
}

// canonical serialization: shortest-round-trip doubles and sorted keys, so that
// parse(to_json(cfg)) == cfg and the dump is stable for hashing
inline Json to_json(const RunConfig& cfg) {
    Json j;
    j["lattice"] = {{"d", cfg.d}, {"L", cfg.L}};
    Json cpl;
    cpl["beta"] = cfg.beta;
    cpl["eps"] = cfg.eps;
    if (!cfg.beta_edges.empty()) {
        Json be = Json::array();
        for (const auto& o : cfg.beta_edges) be.push_back({o.i, o.j, o.beta});
        cpl["beta_edges"] = be;
    }
    if (!cfg.eps_sites.empty()) {
        Json es = Json::array();
        for (const auto& o : cfg.eps_sites) es.push_back({o.site, o.eps});
        cpl["eps_sites"] = es;
    }
    j["couplings"] = cpl;
    Json s;
    s["warmup_sweeps"] = cfg.sampler.warmup_sweeps;
    s["measure_sweeps"] = cfg.sampler.measure_sweeps;
    s["thin"] = cfg.sampler.thin;
    s["mala_every"] = cfg.sampler.mala_every;
    s["shift_every"] = cfg.sampler.shift_every;
    s["local_width"] = cfg.sampler.local_width;
    s["mala_step"] = cfg.sampler.mala_step;
    s["shift_width"] = cfg.sampler.shift_width;
    s["refresh_interval"] = cfg.sampler.refresh_interval;
    s["adapt"] = cfg.sampler.adapt;
    if (std::isfinite(cfg.sampler.init_t)) s["init_t"] = cfg.sampler.init_t;
    s["logdet_scale"] = cfg.sampler.logdet_scale;
    s["chains"] = cfg.sampler.chains;
    j["sampler"] = s;
    if (!cfg.observables.empty()) {
        Json obs = Json::array();
        for (const auto& o : cfg.observables) {
            Json e;
            e["name"] = o.name;
            if (!o.pairs.empty()) {
                Json p = Json::array();
                for (const auto& pr : o.pairs) p.push_back({pr.first, pr.second});
                e["pairs"] = p;
            }
            e["m"] = o.m;
            e["gamma"] = o.gamma;
            e["a"] = o.a;
            e["alpha"] = o.alpha;
            e["n"] = o.n;
            obs.push_back(e);
        }
        j["observables"] = obs;
    }
    j["output"] = cfg.out_dir;
    j["seed"] = cfg.seed;
    return j;
}

// lattice builder that also admits the single-site system (L = 1): the torus
// generator needs side >= 2, but quadrature checks want 1-site configs
inline Torus lattice_from(const RunConfig& cfg) {
    if (cfg.L == 1) {
        Torus T;
        T.dim = cfg.d;
        T.side = 1;
        T.num_sites = 1;
        T.graph.n = 1;
        T.graph.nbr.assign(1, {});
        return T;
    }
    return build_torus(cfg.d, cfg.L);
}

inline CouplingMap couplings_from(const RunConfig& cfg, const Graph& g) {
    CouplingMap c = CouplingMap::uniform(g, cfg.beta, cfg.eps);
    for (const auto& o : cfg.beta_edges) {
        if (o.i < 0 || o.i >= g.n || o.j < 0 || o.j >= g.n || o.i == o.j)
            throw ConfigError("couplings.beta_edges: bad edge (" + std::to_string(o.i) + ", " +
                              std::to_string(o.j) + ")");
        Edge e{std::min(o.i, o.j), std::max(o.i, o.j)};
        auto it = std::lower_bound(g.edges.begin(), g.edges.end(), e);
        if (it == g.edges.end() || !(*it == e))
            throw ConfigError("couplings.beta_edges: (" + std::to_string(o.i) + ", " +
                              std::to_string(o.j) + ") is not a lattice edge");
        c.beta_edge[size_t(it - g.edges.begin())] = o.beta;
    }
    for (const auto& o : cfg.eps_sites) {
        if (o.site < 0 || o.site >= g.n)
            throw ConfigError("couplings.eps_sites: site " + std::to_string(o.site) +
                              " out of range");
        c.eps_site[size_t(o.site)] = o.eps;
    }
    c.validate(g);
    return c;
}

} // namespace h22
