#include "cosrays/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cosrays/coshcomb.hpp"
#include "cosrays/error.hpp"

namespace cosrays::cli {

using nlohmann::json;

namespace {

constexpr double pi = std::numbers::pi;
constexpr const char* kSchema = "v1";

std::string num(double v, const char* fmt = "%.17g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

json cjson(cplx z) { return json::array({z.real(), z.imag()}); }

} // namespace

std::string to_csv(const RayPolyline& poly) {
    std::string s = "t,re,im,err\n";
    for (const RaySample& r : poly.samples) s += num(r.t) + "," + num(r.z.real()) + "," + num(r.z.imag()) + "," + num(r.err) + "\n";
    return s;
}

std::string emit_svg(const std::vector<RayPolyline>& polylines, const SvgOptions& opt) {
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    for (const auto& p : polylines)
        for (const auto& s : p.samples) {
            x0 = std::min(x0, s.z.real());
            x1 = std::max(x1, s.z.real());
            y0 = std::min(y0, s.z.imag());
            y1 = std::max(y1, s.z.imag());
        }
    if (!(x0 <= x1)) throw Error("empty_input", "nothing to plot");

    // degenerate extents (a ray on the real axis) get a thin band
    double w = x1 - x0, h = y1 - y0;
    const double span = std::max({w, h, 1e-9});
    if (w < 0.05 * span) {
        x0 -= 0.5 * (0.05 * span - w);
        w = 0.05 * span;
    }
    if (h < 0.05 * span) {
        y0 -= 0.5 * (0.05 * span - h);
        h = 0.05 * span;
    }
    x0 -= 0.05 * w;
    y0 -= 0.05 * h;
    w *= 1.1;
    h *= 1.1;
    y1 = y0 + h;
    x1 = x0 + w;

    const double px_w = 800.0;
    const double px_h = std::clamp(std::round(px_w * h / w), 100.0, 2400.0);
    auto X = [&](double x) { return num((x - x0) / w * px_w, "%.3f"); };
    auto Y = [&](double y) { return num((y1 - y) / h * px_h, "%.3f"); };

    std::ostringstream o;
    o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(px_w, "%.0f") << "\" height=\"" << num(px_h, "%.0f")
      << "\" viewBox=\"0 0 " << num(px_w, "%.0f") << " " << num(px_h, "%.0f") << "\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    if (opt.partition) {
        const double step = opt.kind ? strip_height(*opt.kind) : 2.0 * pi;
        const double offset = opt.kind ? 0.0 : pi;
        const long k0 = static_cast<long>(std::ceil((y0 - offset) / step));
        const long k1 = static_cast<long>(std::floor((y1 - offset) / step));
        if (k1 - k0 < 400) {
            o << "<g stroke=\"#bbbbbb\" stroke-width=\"1\" stroke-dasharray=\"4 3\">\n";
            for (long k = k0; k <= k1; ++k) {
                const std::string y = Y(offset + step * static_cast<double>(k));
                o << "<line x1=\"0\" y1=\"" << y << "\" x2=\"" << num(px_w, "%.0f") << "\" y2=\"" << y << "\"/>\n";
            }
            o << "</g>\n";
        }
    }

    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"};
    for (std::size_t i = 0; i < polylines.size(); ++i) {
        const auto& p = polylines[i];
        if (p.samples.empty()) continue;
        o << "<path fill=\"none\" stroke=\"" << palette[i % 8] << "\" stroke-width=\"1.5\" data-address=\""
          << format_signed(p.addr) << "\" d=\"";
        for (std::size_t j = 0; j < p.samples.size(); ++j)
            o << (j ? " L" : "M") << X(p.samples[j].z.real()) << "," << Y(p.samples[j].z.imag());
        o << "\"/>\n";
    }
    o << "</svg>\n";
    return o.str();
}

// ---- verification suites ----------------------------------------------------

ExternalAddress random_address(std::mt19937_64& rng, long max_index, std::size_t max_pre, std::size_t max_per) {
    std::uniform_int_distribution<long> idx(-max_index, max_index);
    std::uniform_int_distribution<int> side(0, 1);
    std::uniform_int_distribution<std::size_t> npre(0, max_pre), nper(1, max_per);
    auto sym = [&] { return Symbol{idx(rng), side(rng) ? Side::R : Side::L}; };
    std::vector<Symbol> pre(npre(rng)), per(nper(rng));
    for (auto& s : pre) s = sym();
    for (auto& s : per) s = sym();
    return ExternalAddress(pre, per);
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"contraction", "conjugacy", "sandwich", "branches", "recovery", "order", "itinerary"};
    return names;
}

namespace {

NormalizedMap needs_disjoint(const MapSpec& spec, const std::string& suite) {
    if (spec.kind) throw Error("usage", "suite " + suite + " needs a disjoint-type map a=..,b=..", spec.id);
    return disjoint_type_scale(spec.map);
}

ModelPoint random_point(std::mt19937_64& rng, double lo, double hi) {
    ExternalAddress s = random_address(rng, 3, 2, 2);
    const double ts = t_min(s);
    std::uniform_real_distribution<double> u(lo, hi);
    return ModelPoint{ts + u(rng), s};
}

void note_ratio(SuiteReport& r, double measured, double allowed) {
    ++r.checked;
    const double q = allowed > 0 ? measured / allowed : (measured > 0 ? INFINITY : 0.0);
    r.worst = std::max(r.worst, q);
    if (!(measured <= allowed)) ++r.violations;
}

SuiteReport contraction(const MapSpec& spec, std::mt19937_64& rng) {
    const NormalizedMap nm = needs_disjoint(spec, "contraction");
    const double mu = mu_bound(nm);
    SuiteReport r{"contraction"};
    for (int i = 0; i < 100; ++i) {
        const ModelPoint x = random_point(rng, 0.1, 3.0);
        cplx prev = phi_n(nm, x, 0);
        for (std::size_t k = 0; k <= 30; ++k) {
            const cplx next = phi_n(nm, x, k + 1);
            note_ratio(r, std::abs(next - prev), mu / std::ldexp(1.0, static_cast<int>(k)));
            prev = next;
        }
    }
    return r;
}

SuiteReport conjugacy(const MapSpec& spec, std::mt19937_64& rng) {
    const NormalizedMap nm = needs_disjoint(spec, "conjugacy");
    SuiteReport r{"conjugacy"};
    for (int i = 0; i < 100; ++i) {
        const ModelPoint x = random_point(rng, 0.1, 3.0);
        const PhiValue a = phi(nm, x, 1e-8);
        const ModelPoint fx = std::get<ModelPoint>(step(x));
        const PhiValue b = phi(nm, fx, 1e-8);
        note_ratio(r, std::abs(eval(nm.base, a.z) - b.z), 2.0 * a.err);
    }
    return r;
}

SuiteReport sandwich(const MapSpec& spec, std::mt19937_64& rng) {
    const NormalizedMap nm = needs_disjoint(spec, "sandwich");
    SuiteReport r{"sandwich"};
    for (int i = 0; i < 10000; ++i) {
        const ModelPoint x = random_point(rng, 0.0, 3.0);
        const ModelPoint fx = std::get<ModelPoint>(step(x));
        const double grow = std::expm1(x.t) + nm.A;
        const double m = std::abs(project(fx, nm.A));
        ++r.checked;
        if (!(grow / std::sqrt(2.0) <= m && m <= grow)) ++r.violations;
    }
    return r;
}

SuiteReport branches(const MapSpec& spec, std::mt19937_64& rng) {
    const NormalizedMap nm = needs_disjoint(spec, "branches");
    SuiteReport r{"branches"};
    std::uniform_int_distribution<long> idx(-5, 5);
    std::uniform_int_distribution<int> side(0, 1);
    std::uniform_real_distribution<double> lr(std::log(nm.R_tract * 1.01), std::log(1e6)), th(-pi, pi);
    while (r.checked < 2000) {
        const Symbol s{idx(rng), side(rng) ? Side::R : Side::L};
        const cplx w = std::polar(std::exp(lr(rng)), th(rng));
        if (dist_to_cut(nm.base, w) < 1e-6) continue;
        const cplx z = inverse_branch(nm, s, w);
        note_ratio(r, std::abs(eval(nm.base, z) - w), 1e-10 * (1.0 + std::abs(w)));
        note_ratio(r, std::abs(branch_residual(nm.base, s, w, z)), 1.0);
    }
    return r;
}

SuiteReport recovery(const MapSpec& spec, std::mt19937_64& rng) {
    const NormalizedMap nm = needs_disjoint(spec, "recovery");
    SuiteReport r{"recovery"};
    std::map<std::string, std::size_t> reasons;
    for (int i = 0; i < 50; ++i) {
        const ExternalAddress s = random_address(rng, 3, 2, 2);
        const ModelPoint x{t_min(s) + 0.5, s};
        ++r.checked;
        try {
            const PhiValue v = phi(nm, x, 1e-12);
            const auto got = address_of(nm, v.z, 20, v.err);
            for (std::size_t k = 0; k < 20; ++k)
                if (!(got[k] == s.symbol_at(k))) {
                    ++r.violations;
                    ++reasons["mismatch"];
                    break;
                }
        } catch (const Error& e) {
            ++r.violations;
            ++reasons[e.code()];
        }
    }
    for (const auto& [k, v] : reasons) r.note += (r.note.empty() ? "" : ", ") + k + " x" + std::to_string(v);
    return r;
}

SuiteReport order(std::mt19937_64& rng) {
    SuiteReport r{"order"};
    std::vector<Symbol> syms;
    for (long n = -10; n <= 10; ++n) {
        syms.push_back({n, Side::L});
        syms.push_back({n, Side::R});
    }
    auto lt = [](Symbol a, Symbol b) { return compare_symbols(a, b) < 0; };
    for (Symbol a : syms)
        for (Symbol b : syms) {
            ++r.checked;
            const int n = lt(a, b) + lt(b, a) + (a == b);
            if (n != 1) ++r.violations;
            for (Symbol c : syms)
                if (lt(a, b) && lt(b, c) && !lt(a, c)) ++r.violations;
        }
    for (int i = 0; i < 1000; ++i) {
        const ExternalAddress a = random_address(rng, 3, 2, 2), b = random_address(rng, 3, 2, 2), c = random_address(rng, 3, 2, 2);
        if (a == b || b == c || a == c) continue;
        r.checked += 2;
        if (cyclic_between(a, b, c) != cyclic_between(b, c, a)) ++r.violations;
        if (cyclic_between(a, b, c) && cyclic_between(c, b, a)) ++r.violations;
    }
    return r;
}

SuiteReport itinerary_suite(const MapSpec& spec) {
    if (!spec.kind) throw Error("usage", "suite itinerary needs cosh or cosh2", spec.id);
    SuiteReport r{"itinerary"};
    std::vector<Symbol> syms;
    for (long n = -2; n <= 2; ++n) {
        syms.push_back({n, Side::L});
        syms.push_back({n, Side::R});
    }
    std::vector<std::vector<Symbol>> words{{}};
    for (Symbol a : syms) words.push_back({a});
    for (Symbol a : syms)
        for (Symbol b : syms) words.push_back({a, b});
    std::set<std::string> seen;
    std::map<std::vector<long>, SignedAddress> by_itin;
    for (const auto& pre : words)
        for (const auto& per : words) {
            if (per.empty()) continue;
            const ExternalAddress s(pre, per);
            if (!seen.insert(format_address(s)).second) continue;
            for (Sign sg : {Sign::Minus, Sign::Plus}) {
                const SignedAddress sa{s, sg};
                const auto key = itinerary_prefix(*spec.kind, sa, 40);
                auto [it, fresh] = by_itin.emplace(key, sa);
                ++r.checked;
                if (!fresh && overlap(*spec.kind, it->second, sa).kind != OverlapKind::SameRay) {
                    ++r.violations;
                    if (r.note.empty()) r.note = format_signed(it->second) + " vs " + format_signed(sa);
                }
            }
        }
    return r;
}

} // namespace

SuiteReport run_suite(const std::string& name, const MapSpec& spec, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    if (name == "contraction") return contraction(spec, rng);
    if (name == "conjugacy") return conjugacy(spec, rng);
    if (name == "sandwich") return sandwich(spec, rng);
    if (name == "branches") return branches(spec, rng);
    if (name == "recovery") return recovery(spec, rng);
    if (name == "order") return order(rng);
    if (name == "itinerary") return itinerary_suite(spec);
    throw Error("usage", "unknown suite", name);
}

// ---- command line ------------------------------------------------------------

namespace {

struct Config {
    std::string map = "cosh";
    std::vector<std::string> addresses;
    std::string a, b;
    std::string t;
    std::string z;
    std::size_t samples = 200;
    double tol = 1e-8;
    int depth = -1;
    std::string out;
    std::string format;
    unsigned jobs = 1;
    std::string suite;
    std::string op = "eval";
    bool partition = false;
    std::uint64_t seed = 1;
};

std::pair<double, double> parse_range(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw Error("usage", "expected lo:hi", text);
    char* end = nullptr;
    const double lo = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + colon) throw Error("usage", "bad range start", text);
    const char* q = text.c_str() + colon + 1;
    const double hi = std::strtod(q, &end);
    if (end == q || *end) throw Error("usage", "bad range end", text);
    if (!(lo < hi)) throw Error("usage", "range needs lo < hi", text);
    return {lo, hi};
}

double parse_real(const std::string& text) {
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end) throw Error("usage", "expected a number", text);
    return v;
}

SignedAddress signed_arg(const std::string& text) {
    if (text.find(',') != std::string::npos) return parse_signed(text);
    return SignedAddress{parse_address(text), Sign::Plus};
}

MapKind kind_of(const MapSpec& spec) {
    if (!spec.kind) throw Error("usage", "this command needs --map cosh or cosh2", spec.id);
    return *spec.kind;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string cmd_trace(const Config& c, bool plot) {
    const MapSpec spec = parse_map_spec(c.map);
    if (c.addresses.empty()) throw Error("usage", "--address is required");
    if (!plot && c.addresses.size() != 1) throw Error("usage", "trace takes one --address");
    const auto [lo, hi] = parse_range(c.t.empty() ? "0.5:5" : c.t);
    std::vector<RayPolyline> polys;
    for (const auto& a : c.addresses) {
        polys.push_back(trace_ray(spec, signed_arg(a), lo, hi, c.samples, c.tol, c.jobs));
        if (polys.back().samples.empty()) {
            const std::string why = polys.back().rejected.empty() ? "" : polys.back().rejected.front().reason;
            throw Error("no_samples", "every sample was rejected (" + why + ")", a);
        }
    }
    const std::string fmt = plot ? "svg" : (c.format.empty() ? "csv" : c.format);
    if (fmt == "svg") return emit_svg(polys, SvgOptions{c.partition, spec.kind});
    if (fmt == "csv") return to_csv(polys.front());
    if (fmt != "json") throw Error("usage", "format must be csv, json or svg", fmt);
    const RayPolyline& p = polys.front();
    json j{{"schema", kSchema}, {"command", "trace"}, {"map", p.map_id}, {"address", format_signed(p.addr)},
           {"tol", c.tol}, {"depth_used", p.depth_used}};
    j["samples"] = json::array();
    for (const auto& s : p.samples) j["samples"].push_back({{"t", s.t}, {"re", s.z.real()}, {"im", s.z.imag()}, {"err", s.err}});
    j["rejected"] = json::array();
    for (const auto& r : p.rejected) j["rejected"].push_back({{"t", r.t}, {"reason", r.reason}});
    return dump(j);
}

std::string cmd_endpoint(const Config& c, bool& stabilized) {
    const MapSpec spec = parse_map_spec(c.map);
    if (c.addresses.size() != 1) throw Error("usage", "endpoint takes one --address");
    const SignedAddress sa = signed_arg(c.addresses.front());
    const Endpoint e = endpoint_estimate(spec, sa, c.tol);
    stabilized = e.stabilized;
    return dump(json{{"schema", kSchema},        {"command", "endpoint"},   {"map", spec.id},
                     {"address", format_signed(sa)}, {"z", cjson(e.z)},       {"stabilized", e.stabilized},
                     {"iterations", e.iterations}, {"last_delta", e.last_delta}, {"t_min", t_min(sa.addr)}});
}

std::string cmd_itinerary(const Config& c) {
    const MapKind kind = kind_of(parse_map_spec(c.map));
    if (c.addresses.size() != 1) throw Error("usage", "itinerary takes one --address");
    const SignedAddress sa = signed_arg(c.addresses.front());
    json j = itinerary(kind, sa);
    j["schema"] = kSchema;
    j["address"] = format_signed(sa);
    if (c.depth > 0) j["prefix"] = itinerary_prefix(kind, sa, static_cast<std::size_t>(c.depth));
    return dump(j);
}

std::string cmd_overlap(const Config& c) {
    const MapKind kind = kind_of(parse_map_spec(c.map));
    if (c.a.empty() || c.b.empty()) throw Error("usage", "overlap needs --a and --b");
    const SignedAddress a = signed_arg(c.a), b = signed_arg(c.b);
    const OverlapDescriptor d = overlap(kind, a, b);
    json j = d;
    j["schema"] = kSchema;
    j["a"] = format_signed(a);
    j["b"] = format_signed(b);
    j["lands_together"] = lands_together(kind, a, b);
    j["same_itinerary"] = same_itinerary(kind, a, b);
    return dump(j);
}

std::string cmd_addresses_at(const Config& c) {
    const MapKind kind = kind_of(parse_map_spec(c.map));
    if (c.z.empty()) throw Error("usage", "addresses-at needs --z");
    const cplx z = parse_complex(c.z);
    const int depth = c.depth < 0 ? 2 : c.depth;
    if (depth > 2) throw Error("usage", "depth must be at most 2");
    json list = json::array();
    for (const auto& sa : signed_addresses_at(kind, z, depth)) list.push_back(format_signed(sa));
    return dump(json{{"schema", kSchema}, {"command", "addresses-at"}, {"map", kind_name(kind)}, {"z", cjson(z)}, {"addresses", list}});
}

std::string cmd_model(const Config& c) {
    if (c.addresses.size() != 1) throw Error("usage", "model takes one --address");
    const ExternalAddress s = signed_arg(c.addresses.front()).addr;
    json j{{"schema", kSchema}, {"command", "model"}, {"op", c.op}, {"addr", format_address(s)}};
    if (c.op == "ts") {
        j["t_min"] = t_min(s);
        return dump(j);
    }
    if (c.t.empty()) throw Error("usage", "--t is required");
    const ModelPoint x{parse_real(c.t), s};
    j["t"] = x.t;
    if (c.op == "eval") {
        const auto r = step(x);
        if (auto* o = std::get_if<OutOfSpace>(&r)) j["out_of_space"] = o->deficit;
        else j["result"] = std::get<ModelPoint>(r);
    } else if (c.op == "membership") {
        const Membership m = in_JF(x, c.depth > 0 ? static_cast<std::size_t>(c.depth) : 64);
        if (std::holds_alternative<Member>(m)) j["membership"] = "member";
        else if (auto* n = std::get_if<NonMember>(&m)) {
            j["membership"] = "non_member";
            j["step"] = n->step;
        } else j["membership"] = "undecided";
    } else {
        throw Error("usage", "op must be eval, ts or membership", c.op);
    }
    return dump(j);
}

std::string cmd_verify(const Config& c, bool& ok) {
    const MapSpec spec = parse_map_spec(c.map);
    if (c.suite.empty()) throw Error("usage", "--suite is required");
    const SuiteReport r = run_suite(c.suite, spec, c.seed);
    ok = r.passed();
    json j{{"schema", kSchema}, {"command", "verify"}, {"suite", r.name}, {"map", spec.id}, {"checked", r.checked},
           {"violations", r.violations}, {"worst_ratio", r.worst}, {"passed", r.passed()}};
    if (!r.note.empty()) j["note"] = r.note;
    return dump(j);
}

void write_output(const Config& c, const std::string& text, std::ostream& out) {
    if (c.out.empty()) {
        out << text;
        return;
    }
    std::ofstream f(c.out, std::ios::binary);
    if (!f) throw Error("io", "cannot open output file", c.out);
    f << text;
}

void error_json(std::ostream& err, const std::string& code, const std::string& message, const std::string& at) {
    err << json{{"error", code}, {"message", message}, {"at", at}}.dump() << "\n";
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Config c;
    if (const char* env = std::getenv("COSRAYS_JOBS")) {
        const long j = std::strtol(env, nullptr, 10);
        if (j > 0) c.jobs = static_cast<unsigned>(j);
    }

    CLI::App app{"Dynamic rays of cosine maps", "cosrays"};
    app.require_subcommand(1);
    auto common = [&](CLI::App* s) {
        s->add_option("--map", c.map, "cosh, cosh2 or a=RE+IMi,b=RE+IMi");
        s->add_option("--tol", c.tol, "error tolerance")->check(CLI::PositiveNumber);
        s->add_option("--out", c.out, "output file (default stdout)");
    };
    auto* trace = app.add_subcommand("trace", "sample a ray as CSV, JSON or SVG");
    auto* endpoint = app.add_subcommand("endpoint", "estimate the landing point of a ray");
    auto* itin = app.add_subcommand("itinerary", "itinerary of a signed address (cosh, cosh2)");
    auto* ovl = app.add_subcommand("overlap", "where two canonical rays coincide");
    auto* at = app.add_subcommand("addresses-at", "signed addresses of the rays through a skeleton point");
    auto* model = app.add_subcommand("model", "the model map: eval, ts, membership");
    auto* verify = app.add_subcommand("verify", "run a named check suite");
    auto* plot = app.add_subcommand("plot", "SVG of several rays");
    for (auto* s : {trace, endpoint, itin, ovl, at, model, verify, plot}) common(s);
    for (auto* s : {trace, plot}) {
        s->add_option("--t", c.t, "potential range lo:hi");
        s->add_option("--samples", c.samples, "samples per ray")->check(CLI::Range(2, 1000000));
        s->add_option("--jobs", c.jobs, "worker threads (default $COSRAYS_JOBS or 1)")->check(CLI::Range(1, 256));
        s->add_flag("--partition", c.partition, "draw the strip boundaries");
    }
    trace->add_option("--address", c.addresses, "signed address, e.g. \"|0R,+\"")->required()->expected(1);
    trace->add_option("--format", c.format, "csv, json or svg")->check(CLI::IsMember({"csv", "json", "svg"}));
    plot->add_option("--address", c.addresses, "signed addresses")->required();
    for (auto* s : {endpoint, itin, model}) s->add_option("--address", c.addresses, "address")->required()->expected(1);
    itin->add_option("--depth", c.depth, "also print this many leading strips");
    ovl->add_option("--a", c.a, "first signed address")->required();
    ovl->add_option("--b", c.b, "second signed address")->required();
    at->add_option("--z", c.z, "point, e.g. 0.785398i")->required();
    at->add_option("--depth", c.depth, "0: lines, 1: axis, 2: first preimages");
    model->add_option("--op", c.op, "eval, ts or membership")->check(CLI::IsMember({"eval", "ts", "membership"}));
    model->add_option("--t", c.t, "potential");
    model->add_option("--depth", c.depth, "membership horizon");
    verify->add_option("--suite", c.suite, "suite name")->required()->check(CLI::IsMember(suite_names()));
    verify->add_option("--seed", c.seed, "random seed");

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        error_json(err, "usage", e.what(), "arguments");
        return 2;
    }

    try {
        std::string text;
        int code = 0;
        if (trace->parsed()) text = cmd_trace(c, false);
        else if (plot->parsed()) text = cmd_trace(c, true);
        else if (endpoint->parsed()) {
            bool ok = false;
            text = cmd_endpoint(c, ok);
            if (!ok) {
                error_json(err, "not_stabilized", "endpoint did not stabilize within the budget", c.addresses.front());
                code = 1;
            }
        } else if (itin->parsed()) text = cmd_itinerary(c);
        else if (ovl->parsed()) text = cmd_overlap(c);
        else if (at->parsed()) text = cmd_addresses_at(c);
        else if (model->parsed()) text = cmd_model(c);
        else {
            bool ok = false;
            text = cmd_verify(c, ok);
            if (!ok) {
                error_json(err, "suite_failed", "suite reported violations", c.suite);
                code = 1;
            }
        }
        write_output(c, text, out);
        return code;
    } catch (const ParseError& e) {
        error_json(err, e.code(), e.what(), e.at());
        return 2;
    } catch (const Error& e) {
        error_json(err, e.code(), e.what(), e.at());
        return e.code() == "usage" ? 2 : 1;
    }
}

} // namespace cosrays::cli
