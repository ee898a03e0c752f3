#include "bhplab/report.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>

namespace bhplab {

namespace {

struct Sha1 {
    std::uint32_t h[5] = {0x67452301u, 0xEFCDAB89u, 0x98BADCFEu, 0x10325476u, 0xC3D2E1F0u};
    std::uint64_t total = 0;
    unsigned char buf[64];
    std::size_t fill = 0;

    static std::uint32_t rol(std::uint32_t x, int n) { return (x << n) | (x >> (32 - n)); }

    void block(const unsigned char* p) {
        std::uint32_t w[80];
        for (int i = 0; i < 16; ++i)
            w[i] = (std::uint32_t(p[4 * i]) << 24) | (std::uint32_t(p[4 * i + 1]) << 16) |
                   (std::uint32_t(p[4 * i + 2]) << 8) | std::uint32_t(p[4 * i + 3]);
        for (int i = 16; i < 80; ++i) w[i] = rol(w[i - 3] ^ w[i - 8] ^ w[i - 14] ^ w[i - 16], 1);
        std::uint32_t a = h[0], b = h[1], c = h[2], d = h[3], e = h[4];
        for (int i = 0; i < 80; ++i) {
            std::uint32_t f, k;
            if (i < 20) {
                f = (b & c) | (~b & d);
                k = 0x5A827999u;
            } else if (i < 40) {
                f = b ^ c ^ d;
                k = 0x6ED9EBA1u;
            } else if (i < 60) {
                f = (b & c) | (b & d) | (c & d);
                k = 0x8F1BBCDCu;
            } else {
                f = b ^ c ^ d;
                k = 0xCA62C1D6u;
            }
            const std::uint32_t t = rol(a, 5) + f + e + k + w[i];
            e = d;
            d = c;
            c = rol(b, 30);
            b = a;
            a = t;
        }
        h[0] += a;
        h[1] += b;
        h[2] += c;
        h[3] += d;
        h[4] += e;
    }

    void update(const unsigned char* p, std::size_t n) {
        total += n;
        while (n > 0) {
            const std::size_t take = std::min(n, sizeof(buf) - fill);
            std::memcpy(buf + fill, p, take);
            fill += take;
            p += take;
            n -= take;
            if (fill == 64) {
                block(buf);
                fill = 0;
            }
        }
    }

    std::string final_hex() {
        const std::uint64_t bits = total * 8;
        unsigned char pad = 0x80;
        update(&pad, 1);
        unsigned char zero = 0;
        while (fill != 56) update(&zero, 1);
        unsigned char len[8];
        for (int i = 0; i < 8; ++i) len[i] = static_cast<unsigned char>(bits >> (56 - 8 * i));
        update(len, 8);
        char out[41];
        for (int i = 0; i < 5; ++i) std::snprintf(out + 8 * i, 9, "%08x", h[i]);
        return std::string(out, 40);
    }
};

}  // namespace

std::string sha1_hex(const std::string& data) {
    Sha1 s;
    s.update(reinterpret_cast<const unsigned char*>(data.data()), data.size());
    return s.final_hex();
}

std::string git_blob_hash(const std::string& payload) {
    std::string full = "blob " + std::to_string(payload.size());
    full.push_back('\0');
    full += payload;
    return sha1_hex(full);
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string verdict_name(Verdict v) {
    switch (v) {
        case Verdict::consistent: return "consistent";
        case Verdict::inconsistent: return "inconsistent";
        default: return "inconclusive";
    }
}

json ExperimentReport::to_json() const {
    json j;
    j["experiment"] = experiment;
    j["params"] = params;
    j["per_scale"] = per_scale;
    j["fitted_constants"] = fitted_constants;
    j["verdict"] = verdict_name(verdict);
    j["decided_by"] = decided_by;
    j["censor_flagged"] = censor_flagged;
    return j;
}

int ExperimentReport::exit_code() const {
    switch (verdict) {
        case Verdict::consistent: return 0;
        case Verdict::inconsistent: return 2;
        default: return 3;
    }
}

std::string estimates_csv(const std::vector<ScaleRow>& rows) {
    std::string out = "experiment,r,mean,stderr,n,censored_frac\n";
    for (const auto& r : rows) {
        out += r.experiment;
        out += ',';
        out += format_double(r.r);
        out += ',';
        out += format_double(r.mean);
        out += ',';
        out += format_double(r.se);
        out += ',';
        out += std::to_string(r.n);
        out += ',';
        out += format_double(r.censored_frac);
        out += '\n';
    }
    return out;
}

std::string plot_csv(const std::vector<PlotRow>& rows) {
    std::string out = "scale,statistic,lo,hi\n";
    for (const auto& r : rows) {
        out += format_double(r[0]);
        for (int i = 1; i < 4; ++i) {
            out += ',';
            out += format_double(r[i]);
        }
        out += '\n';
    }
    return out;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open for writing: " + path);
    f << content;
}

// --- codecs ----------------------------------------------------------------

json to_json(const SubordinatorSpec& s) {
    json j;
    j["drift"] = s.drift();
    json levy;
    if (const auto* st = std::get_if<StableSub>(&s.density())) {
        levy["kind"] = "stable";
        levy["alpha"] = st->alpha;
        if (st->intensity != 1.0) levy["intensity"] = st->intensity;
    } else if (const auto* ts = std::get_if<TemperedStableSub>(&s.density())) {
        levy["kind"] = "tempered";
        levy["alpha"] = ts->alpha;
        levy["m"] = ts->m;
    } else if (const auto* ss = std::get_if<SumStableSub>(&s.density())) {
        levy["kind"] = "sum_stable";
        levy["alpha"] = ss->alpha;
        levy["beta"] = ss->beta;
    } else if (std::holds_alternative<GammaSub>(s.density())) {
        levy["kind"] = "gamma";
    } else if (const auto* cu = std::get_if<CustomSub>(&s.density())) {
        if (cu->name.empty())
            throw ConfigError("custom subordinator densities are not serializable");
        levy["kind"] = cu->name;
    } else {
        levy["kind"] = "none";
    }
    j["levy"] = levy;
    return j;
}

SubordinatorSpec subordinator_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("subordinator: expected object");
    double drift = 0.0;
    SubDensity density = std::monostate{};
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (it.key() == "drift") {
            drift = it.value().get<double>();
        } else if (it.key() == "levy") {
            const json& l = it.value();
            const std::string kind = l.at("kind").get<std::string>();
            if (kind == "stable") {
                StableSub st{l.at("alpha").get<double>()};
                if (l.contains("intensity")) st.intensity = l["intensity"].get<double>();
                density = st;
            } else if (kind == "tempered") {
                density = TemperedStableSub{l.at("alpha").get<double>(), l.at("m").get<double>()};
            } else if (kind == "sum_stable") {
                density = SumStableSub{l.at("alpha").get<double>(), l.at("beta").get<double>()};
            } else if (kind == "gamma") {
                density = GammaSub{};
            } else if (kind == "gauss_tail") {
                density = gauss_tail_density();
            } else if (kind == "none") {
                density = std::monostate{};
            } else {
                throw ConfigError("subordinator.levy.kind: unknown kind '" + kind + "'");
            }
        } else {
            throw ConfigError("subordinator." + it.key() + ": unknown key");
        }
    }
    return SubordinatorSpec(drift, density);
}

SubordinatorSpec subordinator_from_name(const std::string& name) {
    auto args = [&name](std::size_t at) {
        std::vector<double> out;
        std::size_t close = name.find(')', at);
        if (close == std::string::npos) throw ConfigError("bad preset name: " + name);
        std::string inner = name.substr(at + 1, close - at - 1);
        std::size_t pos = 0;
        while (pos < inner.size()) {
            std::size_t comma = inner.find(',', pos);
            if (comma == std::string::npos) comma = inner.size();
            out.push_back(std::stod(inner.substr(pos, comma - pos)));
            pos = comma + 1;
        }
        return out;
    };
    if (name.rfind("bm+stable(", 0) == 0) {
        const auto a = args(9);
        return SubordinatorSpec(1.0, StableSub{a.at(0)});
    }
    if (name.rfind("stable(", 0) == 0) {
        const auto a = args(6);
        return SubordinatorSpec(0.0, StableSub{a.at(0)});
    }
    if (name.rfind("tempered(", 0) == 0) {
        const auto a = args(8);
        return SubordinatorSpec(0.0, TemperedStableSub{a.at(0), a.at(1)});
    }
    if (name.rfind("bm+sum(", 0) == 0) {
        const auto a = args(6);
        return SubordinatorSpec(1.0, SumStableSub{a.at(0), a.at(1)});
    }
    if (name == "bm+log") return SubordinatorSpec(1.0, GammaSub{});
    if (name == "bm") return SubordinatorSpec(1.0, std::monostate{});
    throw ConfigError("unknown subordinator preset: " + name);
}

json to_json(const LevyTriple& t) {
    json j;
    j["dim"] = t.dim();
    json g = json::array();
    for (int i = 0; i < t.dim(); ++i) {
        json row = json::array();
        for (int k = 0; k < t.dim(); ++k) row.push_back(t.gaussian(i, k));
        g.push_back(row);
    }
    j["gaussian"] = g;
    json b = json::array();
    for (int i = 0; i < t.dim(); ++i) b.push_back(t.drift()[i]);
    j["drift"] = b;
    json jm;
    if (const auto* st = std::get_if<IsotropicStable>(&t.jumps())) {
        jm["kind"] = "stable";
        jm["alpha"] = st->alpha;
        jm["c"] = st->c;
    } else if (t.has_jumps()) {
        throw ConfigError("radial jump densities are not serializable");
    } else {
        jm["kind"] = "none";
    }
    j["jumps"] = jm;
    return j;
}

LevyTriple triple_from_json(const json& j) {
    const int d = j.at("dim").get<int>();
    if (d < 1 || d > kMaxDim) throw ConfigError("triple.dim: must be 1..3");
    double a[kMaxDim][kMaxDim] = {{0}};
    const json& g = j.at("gaussian");
    for (int i = 0; i < d; ++i)
        for (int k = 0; k < d; ++k) a[i][k] = g.at(i).at(k).get<double>();
    Vec b = vec0();
    for (int i = 0; i < d; ++i) b[i] = j.at("drift").at(i).get<double>();
    JumpMeasure jm = std::monostate{};
    if (j.contains("jumps")) {
        const json& q = j["jumps"];
        const std::string kind = q.at("kind").get<std::string>();
        if (kind == "stable")
            jm = IsotropicStable{q.at("alpha").get<double>(), q.at("c").get<double>()};
        else if (kind != "none")
            throw ConfigError("triple.jumps.kind: unknown kind '" + kind + "'");
    }
    return LevyTriple(d, a, b, jm);
}

static json vec_json(const Vec& v, int d) {
    json a = json::array();
    for (int i = 0; i < d; ++i) a.push_back(v[i]);
    return a;
}

static Vec vec_from_json(const json& j) {
    Vec v = vec0();
    for (std::size_t i = 0; i < j.size() && i < kMaxDim; ++i) v[i] = j.at(i).get<double>();
    return v;
}

json to_json(const DomainSpec& dom, int d) {
    json j;
    if (const auto* b = std::get_if<Ball>(&dom)) {
        j["kind"] = "ball";
        j["center"] = vec_json(b->center, d);
        j["radius"] = b->radius;
    } else if (const auto* c = std::get_if<TruncatedCone>(&dom)) {
        j["kind"] = "cone";
        j["vertex"] = vec_json(c->vertex, d);
        j["axis"] = vec_json(c->axis, d);
        j["theta"] = c->theta;
        j["radius"] = c->radius;
    } else if (const auto* h = std::get_if<HalfSpace>(&dom)) {
        j["kind"] = "halfspace";
        j["point"] = vec_json(h->point, d);
        j["normal"] = vec_json(h->normal, d);
    } else if (const auto* sh = std::get_if<Shell>(&dom)) {
        j["kind"] = "shell";
        j["center"] = vec_json(sh->center, d);
        j["r_inner"] = sh->r_inner;
        j["r_outer"] = sh->r_outer;
    } else {
        throw ConfigError("graph patches are not serializable");
    }
    return j;
}

DomainSpec domain_from_json(const json& j, int* dim_out) {
    const std::string kind = j.at("kind").get<std::string>();
    int d = 2;
    if (kind == "ball") {
        d = static_cast<int>(j.at("center").size());
        if (dim_out) *dim_out = d;
        return Ball{vec_from_json(j["center"]), j.at("radius").get<double>()};
    }
    if (kind == "cone") {
        d = static_cast<int>(j.at("vertex").size());
        if (dim_out) *dim_out = d;
        TruncatedCone c{vec_from_json(j["vertex"]), vec_from_json(j.at("axis")),
                        j.at("theta").get<double>(), j.at("radius").get<double>()};
        const double n = norm(c.axis, d);
        if (std::fabs(n - 1.0) > 1e-9) throw ConfigError("domain.axis: must be a unit vector");
        return c;
    }
    if (kind == "shell") {
        d = static_cast<int>(j.at("center").size());
        if (dim_out) *dim_out = d;
        return Shell{vec_from_json(j["center"]), j.at("r_inner").get<double>(),
                     j.at("r_outer").get<double>()};
    }
    if (kind == "halfspace") {
        d = static_cast<int>(j.at("point").size());
        if (dim_out) *dim_out = d;
        HalfSpace h{vec_from_json(j["point"]), vec_from_json(j.at("normal"))};
        const double n = norm(h.normal, d);
        if (std::fabs(n - 1.0) > 1e-9) throw ConfigError("domain.normal: must be a unit vector");
        return h;
    }
    throw ConfigError("domain.kind: unknown kind '" + kind + "'");
}

json to_json(const Estimate& e) {
    json j;
    j["mean"] = e.mean;
    j["stderr"] = e.se;
    j["n"] = e.n;
    return j;
}

}  // namespace bhplab
