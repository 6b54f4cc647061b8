#include "cosrays/raytrace.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <map>
#include <numbers>
#include <thread>

#include "cosrays/error.hpp"

namespace cosrays {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double two_pi = 2.0 * pi;
constexpr double kLogSwitch = 40.0;  // beyond this potential the next one is kept as a logarithm
constexpr double kStatic = 8.0;      // image potential above which the fixed branch is the continuation
constexpr std::size_t kMaxLevels = 20000;

struct LogPoint {
    double log_abs;
    double arg;
};

// C_A at the level after a potential T_prev > kLogSwitch, in log-polar form.
LogPoint log_projection(double T_prev, Symbol s_next, double A) {
    const double lnT = T_prev + std::log1p(-(1.0 + two_pi * static_cast<double>(s_next.magnitude())) * std::exp(-T_prev));
    const double im = two_pi * static_cast<double>(s_next.n);
    const double inv = std::exp(-lnT);
    const double lab = lnT + std::log1p(A * inv);
    if (s_next.side == Side::R) return {lab, im * inv};
    return {lab, (im >= 0 ? pi : -pi) - im * inv};
}

} // namespace

// ---- disjoint type -----------------------------------------------------------

cplx project(const ModelPoint& x, double A) {
    const Symbol s0 = x.addr.symbol_at(0);
    const double re = x.t + A;
    return cplx(s0.side == Side::R ? re : -re, two_pi * static_cast<double>(s0.n));
}

double mu_bound(const NormalizedMap& nm) {
    const double M = std::max(std::abs(nm.base.a), std::abs(nm.base.b));
    return nm.A + std::log(std::sqrt(2.0)) + std::abs(std::log(M)) + 2.0 + 3.0 * pi;
}

cplx phi_n(const NormalizedMap& nm, const ModelPoint& x, std::size_t n) {
    std::vector<double> T{x.t};
    std::size_t top = n;
    bool logseed = false;
    for (std::size_t k = 1; k <= n; ++k) {
        if (T[k - 1] > kLogSwitch) {
            // deeper levels move this one by less than mu e^{-40}: truncate here
            top = k;
            logseed = true;
            break;
        }
        T.push_back(next_potential(T[k - 1], x.addr.symbol_at(k)));
        if (T.back() < 0) throw Error("out_of_space", "point is not in J(F)", "step " + std::to_string(k));
    }
    cplx z;
    std::size_t start;
    if (!logseed) {
        z = project(ModelPoint{T[n], shift(x.addr, n)}, nm.A);
        start = n;
    } else {
        const LogPoint lp = log_projection(T[top - 1], x.addr.symbol_at(top), nm.A);
        z = branch_log(nm.base, x.addr.symbol_at(top - 1), lp.log_abs, lp.arg);
        start = top - 1;
    }
    for (std::size_t k = start; k-- > 0;) z = inverse_branch(nm, x.addr.symbol_at(k), z);
    return z;
}

std::size_t phi_depth(const NormalizedMap& nm, double tol) {
    const double n = std::ceil(std::log2(2.0 * mu_bound(nm) / tol));
    return static_cast<std::size_t>(std::max(1.0, n));
}

PhiValue phi(const NormalizedMap& nm, const ModelPoint& x, double tol) {
    if (!(tol > 0)) throw Error("usage", "tol must be positive");
    const std::size_t n = phi_depth(nm, tol);
    const double err = mu_bound(nm) / std::ldexp(1.0, static_cast<int>(n) - 1);
    return PhiValue{phi_n(nm, x, n), err, n};
}

// ---- cosh family -------------------------------------------------------------

cplx Family::f(cplx z) const {
    const cplx c = std::cosh(z);
    return kind == MapKind::Cosh ? c : c * c;
}

Family family(MapKind kind) {
    if (kind == MapKind::Cosh) return Family{kind, cosh_map(), 1.0, 0.0};
    const double e = std::exp(1.0);
    return Family{kind, CosineMap{e / 2.0, 1.0 / (2.0 * e), Cut{-1.0, 1.0}}, 2.0, -1.0};
}

std::string kind_name(MapKind kind) { return kind == MapKind::Cosh ? "cosh" : "cosh2"; }

namespace {

struct Lifter {
    const CosineMap& g;
    std::array<cplx, 2> cv;
    LiftOptions opt;
    std::vector<cplx>& out;
    cplx z;
    bool hit = false;

    double dist_cv(cplx w) const { return std::min(std::abs(w - cv[0]), std::abs(w - cv[1])); }

    // nearest preimage of w to ref, plus distance to the runner-up
    cplx nearest(cplx w, cplx ref, double& d1, double& d2) const {
        auto [u1, u2] = roots(g, w);
        cplx best{};
        d1 = d2 = INFINITY;
        for (cplx u : {u1, u2}) {
            const cplx l = std::log(u);
            const double k = std::round((ref.imag() - l.imag()) / two_pi);
            for (int dk = -1; dk <= 1; ++dk) {
                const cplx c = l + cplx(0, two_pi * (k + dk));
                const double d = std::abs(c - ref);
                if (d < d1) {
                    d2 = d1;
                    d1 = d;
                    best = c;
                } else if (d < d2) {
                    d2 = d;
                }
            }
        }
        return best;
    }

    void plain(cplx a, cplx b, int depth) {
        const double d = std::abs(b - a);
        const double rho = dist_cv(a);
        if (d == 0.0) return;
        if (rho < 1e-13) {
            // sitting on a critical value: both continuations agree to first order
            double d1, d2;
            z = nearest(b, z, d1, d2);
            out.push_back(z);
            return;
        }
        if (d <= 0.25 * rho) {
            double d1, d2;
            const cplx c = nearest(b, z, d1, d2);
            if (d1 < 0.5 * d2 && d1 <= 0.25) {
                z = c;
                out.push_back(z);
                return;
            }
        }
        if (depth > 64) throw Error("continuation", "path lifting failed to separate preimages");
        const cplx mid = 0.5 * (a + b);
        plain(a, mid, depth + 1);
        plain(mid, b, depth + 1);
    }

    void segment(cplx a, cplx b) {
        const cplx d = b - a;
        const double len = std::abs(d);
        if (len == 0.0) return;
        for (cplx v : cv) {
            const double s = ((v - a) * std::conj(d)).real() / (len * len);
            if (s <= 0.0 || s >= 1.0) continue;
            const double h = std::abs(a + s * d - v);
            const double thr = std::max(1e-9 * len, 1e-13 * (1.0 + std::abs(v)));
            // an end just past v still fixes the side; only an end on v leaves both lifts equal
            const double on = 1e-13 * (1.0 + std::abs(v));
            if (h > thr || std::abs(a - v) <= on || std::abs(b - v) <= on) continue;
            if (opt.stop_at_critical) {
                const double r = 1e-7 * std::min(std::abs(a - v), 1.0);
                plain(a, v + r * (a - v) / std::abs(a - v), 0);
                double d1, d2;
                z = nearest(v, z, d1, d2);
                out.push_back(z);
                hit = true;
                return;
            }
            // pass the critical value on the side fixed by the sign: + keeps it on the left
            const double r = 0.5 * std::min(std::abs(a - v), std::abs(b - v));
            const cplx ea = (a - v) / std::abs(a - v);
            const cplx eb = (b - v) / std::abs(b - v);
            double ta = std::arg(ea), tb = std::arg(eb);
            double sweep;
            if (opt.sign == Sign::Plus) {
                sweep = std::fmod(tb - ta + 4 * pi, two_pi);
                if (sweep <= 0) sweep += two_pi;
            } else {
                sweep = -std::fmod(ta - tb + 4 * pi, two_pi);
                if (sweep >= 0) sweep -= two_pi;
            }
            cplx prev = v + r * ea;
            plain(a, prev, 0);
            constexpr int arc = 24;
            for (int j = 1; j <= arc; ++j) {
                const cplx p = v + std::polar(r, ta + sweep * j / arc);
                plain(prev, p, 0);
                prev = p;
            }
            plain(prev, b, 0);
            return;
        }
        plain(a, b, 0);
    }
};

} // namespace

LiftedPath lift_path(const CosineMap& g, const std::vector<cplx>& path, cplx z_start, const LiftOptions& opt) {
    LiftedPath res;
    res.points.push_back(z_start);
    Lifter L{g, critical_values(g), opt, res.points, z_start};
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        L.segment(path[i], path[i + 1]);
        if (L.hit) break;
    }
    res.hit_critical = L.hit;
    return res;
}

namespace {

struct Potentials {
    std::vector<double> T; // T[0..L], T[L] > kLogSwitch
};

Potentials potentials_to_seed(const ExternalAddress& s, double t, std::size_t min_level) {
    Potentials p;
    p.T.push_back(t);
    for (std::size_t k = 1;; ++k) {
        if (k > kMaxLevels) throw Error("q_violation", "pullback depth exceeds the certified budget", "t = " + std::to_string(t));
        if (p.T.back() > kLogSwitch && k - 1 >= min_level) break;
        p.T.push_back(next_potential(p.T.back(), s.symbol_at(k)));
        if (p.T.back() < 0) throw Error("below_t_min", "potential below the minimal potential", "t = " + std::to_string(t));
    }
    return p;
}

// Ray point at level j whose own potential is Tj, by the fixed branches from the seed down.
cplx static_at(const CosineMap& g, const ExternalAddress& s, std::size_t j, double Tj) {
    std::vector<double> T{Tj};
    while (T.back() <= kLogSwitch) {
        if (T.size() > kMaxLevels) throw Error("q_violation", "pullback depth exceeds the certified budget");
        T.push_back(next_potential(T.back(), s.symbol_at(j + T.size())));
        if (T.back() < 0) throw Error("below_t_min", "potential below the minimal potential");
    }
    const std::size_t L = T.size() - 1;
    const LogPoint lp = log_projection(T[L], s.symbol_at(j + L + 1), 0.0);
    cplx z = branch_log(g, s.symbol_at(j + L), lp.log_abs, lp.arg);
    for (std::size_t k = L; k-- > 0;) z = branch(g, s.symbol_at(j + k), z);
    return z;
}

double dist_cv(const std::array<cplx, 2>& cv, cplx w) {
    return std::min(std::abs(w - cv[0]), std::abs(w - cv[1]));
}

bool chord_through(const std::array<cplx, 2>& cv, cplx a, cplx b) {
    const cplx d = b - a;
    const double len = std::abs(d);
    if (len == 0) return false;
    for (cplx v : cv) {
        const double s = ((v - a) * std::conj(d)).real() / (len * len);
        if (s <= 0 || s >= 1) continue;
        if (std::abs(a + s * d - v) <= std::max(1e-9 * len, 1e-13 * (1 + std::abs(v)))) return true;
    }
    return false;
}

// Static path of one level, parametrized by that level's own potential.
struct StaticSampler {
    const CosineMap& g;
    const ExternalAddress& s;
    std::size_t level;
    std::array<cplx, 2> cv;
    std::vector<cplx> out;
    std::size_t budget = 200000;

    cplx at(double T) const { return static_at(g, s, level, T); }

    // appends the refined samples of (ta, tb]
    void refine(double ta, cplx wa, double tb, cplx wb, int depth) {
        const double d = std::abs(wb - wa);
        bool ok = d <= 0.5 && d <= 0.25 * dist_cv(cv, wa) && d <= 0.25 * dist_cv(cv, wb);
        const double tm = 0.5 * (ta + tb);
        cplx wm{};
        bool have_mid = false;
        if (!ok && d <= 0.5 && chord_through(cv, wa, wb)) {
            wm = at(tm);
            have_mid = true;
            const cplx dir = (wb - wa) / d;
            ok = std::abs(((wm - wa) / dir).imag()) <= 1e-2 * d;
        }
        if (ok || depth > 50 || ta == tm || tb == tm) {
            out.push_back(wb);
            return;
        }
        if (out.size() > budget) throw Error("continuation", "static path needs too many samples");
        if (!have_mid) wm = at(tm);
        refine(ta, wa, tm, wm, depth + 1);
        refine(tm, wm, tb, wb, depth + 1);
    }

    // polyline of the level from potential T_from to T_to
    std::vector<cplx> run(double T_from, double T_to, std::optional<cplx> w_to = std::nullopt) {
        constexpr int coarse = 16;
        out.clear();
        double ta = T_from;
        cplx wa = at(ta);
        out.push_back(wa);
        for (int i = 1; i <= coarse; ++i) {
            const double tb = i == coarse ? T_to : T_from + (T_to - T_from) * i / coarse;
            const cplx wb = i == coarse && w_to ? *w_to : at(tb);
            refine(ta, wa, tb, wb, 0);
            ta = tb;
            wa = wb;
        }
        return std::move(out);
    }
};

// Drop vertices whose removal moves the path by less than a tenth of the distance
// to the critical values; the straight homotopy then avoids them, so lifts agree.
void thin(std::vector<cplx>& path, const std::array<cplx, 2>& cv) {
    if (path.size() < 3) return;
    std::vector<cplx> out{path.front()};
    std::size_t i = 0;
    while (i + 1 < path.size()) {
        std::size_t j = i + 1;
        while (j + 1 < path.size() && j - i < 64) {
            const cplx a = path[i], b = path[j + 1];
            const cplx d = b - a;
            const double len2 = std::norm(d);
            bool ok = len2 > 0 && std::sqrt(len2) <= 0.5;
            for (std::size_t m = i + 1; ok && m <= j; ++m) {
                const double s = std::clamp(((path[m] - a) * std::conj(d)).real() / len2, 0.0, 1.0);
                const double dev = std::abs(a + s * d - path[m]);
                ok = dev <= 0.1 * dist_cv(cv, path[m]) && dev <= 1e-3;
            }
            if (ok) ok = std::sqrt(len2) <= 0.25 * std::min(dist_cv(cv, a), dist_cv(cv, b));
            if (!ok) break;
            ++j;
        }
        out.push_back(path[j]);
        i = j;
    }
    path.swap(out);
}

// Smallest own potential of level k at which every later level has potential >= kStatic.
double level_anchor(const ExternalAddress& s, std::size_t k) {
    return t_floor(shift(s, k), kStatic) * (1 + 1e-13) + 1e-13;
}

// first-order error of a chain, with the square-root model near critical points
double chain_error(const CosineMap& g, const std::vector<cplx>& z, double seed_err) {
    double err = seed_err;
    for (std::size_t k = z.size() - 1; k-- > 0;) {
        const double e = std::abs(eval_unchecked(g, z[k]) - z[k + 1]) + err;
        const double d1 = std::abs(derivative(g, z[k]));
        const double d2 = std::max(std::abs(eval_unchecked(g, z[k])), 1e-300);
        const double lin = e / std::max(d1, 1e-300);
        const double sq = std::sqrt(2.0 * e / d2);
        err = std::min(lin, sq) + 4e-16 * std::abs(z[k]);
    }
    return err;
}

} // namespace

FamilyPoint trace_family_point(const Family& F, const SignedAddress& sa, double t) {
    const ExternalAddress& s = sa.addr;
    const CosineMap& g = F.g;
    const Potentials p = potentials_to_seed(s, t, 0);
    const std::size_t L = p.T.size() - 1;
    long kd = -1;
    for (std::size_t k = 0; k < L; ++k)
        if (p.T[k + 1] < kStatic) kd = static_cast<long>(k);

    std::vector<cplx> chain(L + 1);
    {
        const LogPoint lp = log_projection(p.T[L], s.symbol_at(L + 1), 0.0);
        chain[L] = branch_log(g, s.symbol_at(L), lp.log_abs, lp.arg);
        for (std::size_t k = L; k-- > static_cast<std::size_t>(kd + 1);) chain[k] = branch(g, s.symbol_at(k), chain[k + 1]);
    }
    if (kd >= 0) {
        // levels above kd are fixed branches at t; below, continue each level from
        // its own anchor, where the fixed branch is still valid, down to t
        const auto cv = critical_values(g);
        std::vector<double> anchor(kd + 1);
        std::map<std::string, double> memo; // shifted addresses repeat along the period
        for (long k = 0; k <= kd; ++k) {
            const std::size_t ku = static_cast<std::size_t>(k);
            const std::string key = format_address(shift(s, ku));
            auto it = memo.find(key);
            anchor[k] = it != memo.end() ? it->second : (memo[key] = level_anchor(s, ku));
            anchor[k] = std::max(anchor[k], p.T[ku]);
        }
        auto image_of_anchor = [&](long k) { return next_potential(anchor[k], s.symbol_at(static_cast<std::size_t>(k) + 1)); };
        StaticSampler ss{g, s, static_cast<std::size_t>(kd + 1), cv, {}};
        std::vector<cplx> path = ss.run(image_of_anchor(kd), p.T[kd + 1], chain[kd + 1]);
        for (long k = kd; k >= 0; --k) {
            const std::size_t ku = static_cast<std::size_t>(k);
            const cplx start = static_at(g, s, ku, anchor[k]);
            LiftedPath lp = lift_path(g, path, start, LiftOptions{sa.sign, false});
            chain[k] = lp.points.back();
            if (k == 0) break;
            ss.level = ku;
            path = ss.run(image_of_anchor(k - 1), anchor[k]);
            path.pop_back(); // equals lp.points.front()
            path.insert(path.end(), lp.points.begin(), lp.points.end());
            thin(path, cv);
        }
    }
    const double seed_err = 16.0 * std::exp(-p.T[L]);
    const double err = chain_error(g, chain, seed_err);
    return FamilyPoint{F.to_z(chain[0]), err / F.alpha, L};
}

// ---- polylines -------------------------------------------------------------

cplx parse_complex(const std::string& text) {
    const char* p = text.c_str();
    char* end = nullptr;
    double first = std::strtod(p, &end);
    if (end == p) throw Error("usage", "bad complex number", text);
    if (*end == 'i' && end[1] == '\0') return cplx(0, first);
    if (*end == '\0') return cplx(first, 0);
    const char* q = end;
    double second = std::strtod(q, &end);
    if (end == q || *end != 'i' || end[1] != '\0') throw Error("usage", "bad complex number", text);
    return cplx(first, second);
}

MapSpec parse_map_spec(const std::string& text) {
    if (text == "cosh") return MapSpec{text, MapKind::Cosh, cosh_map()};
    if (text == "cosh2") return MapSpec{text, MapKind::Cosh2, family(MapKind::Cosh2).g};
    const auto comma = text.find(',');
    if (text.rfind("a=", 0) != 0 || comma == std::string::npos || text.compare(comma + 1, 2, "b=") != 0)
        throw Error("usage", "map must be cosh, cosh2 or a=..,b=..", text);
    const cplx a = parse_complex(text.substr(2, comma - 2));
    const cplx b = parse_complex(text.substr(comma + 3));
    return MapSpec{text, std::nullopt, make_map(a, b)};
}

namespace {

template <class Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn fn) {
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
    if (jobs == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < n;) fn(i);
        });
    for (auto& th : pool) th.join();
}

} // namespace

RayPolyline trace_ray(const MapSpec& spec, const SignedAddress& sa, double t_lo, double t_hi, std::size_t n_samples,
                      double tol, unsigned jobs) {
    if (!(t_lo < t_hi) || n_samples < 2 || !(tol > 0)) throw Error("usage", "need t_lo < t_hi, samples >= 2, tol > 0");
    RayPolyline poly;
    poly.map_id = spec.id;
    poly.addr = sa;
    struct Slot {
        bool ok = false;
        RaySample s{};
        std::string reason;
        std::size_t depth = 0;
    };
    std::vector<Slot> slots(n_samples);
    std::optional<NormalizedMap> nm;
    std::optional<Family> fam;
    double ts = t_min(sa.addr);
    if (spec.kind) fam = family(*spec.kind);
    else nm = disjoint_type_scale(spec.map);

    parallel_for(n_samples, jobs, [&](std::size_t i) {
        const double t = t_lo + (t_hi - t_lo) * static_cast<double>(i) / static_cast<double>(n_samples - 1);
        Slot& sl = slots[i];
        sl.s.t = t;
        if (t <= ts) {
            sl.reason = "below_t_min";
            return;
        }
        try {
            if (nm) {
                const PhiValue v = phi(*nm, ModelPoint{t, sa.addr}, tol);
                sl.s = RaySample{t, v.z, v.err};
                sl.depth = v.depth;
            } else {
                const FamilyPoint fp = trace_family_point(*fam, sa, t);
                sl.s = RaySample{t, fp.z, fp.err};
                sl.depth = fp.depth;
            }
            if (sl.s.err > tol) sl.reason = "tolerance";
            else sl.ok = true;
        } catch (const Error& e) {
            sl.reason = e.code();
        }
    });
    for (const Slot& sl : slots) {
        if (sl.ok) {
            poly.samples.push_back(sl.s);
            poly.depth_used = std::max(poly.depth_used, sl.depth);
        } else {
            poly.rejected.push_back(RejectedSample{sl.s.t, sl.reason});
        }
    }
    return poly;
}

Endpoint endpoint_estimate(const MapSpec& spec, const SignedAddress& sa, double tol) {
    const double ts = t_min(sa.addr);
    std::optional<NormalizedMap> nm;
    std::optional<Family> fam;
    if (spec.kind) fam = family(*spec.kind);
    else nm = disjoint_type_scale(spec.map);
    auto point = [&](double t) {
        if (nm) return phi(*nm, ModelPoint{t, sa.addr}, std::min(tol, 1e-10) * 0.1).z;
        return trace_family_point(*fam, sa, t).z;
    };

    Endpoint ep;
    std::vector<cplx> zs;
    int calm = 0;
    for (std::size_t k = 0; k < 60; ++k) {
        const double eps = std::ldexp(1.0, -static_cast<int>(k));
        if (eps < 1e-12 * std::max(1.0, ts)) break;
        try {
            zs.push_back(point(ts + eps));
        } catch (const Error&) {
            break; // pullback budget exhausted this close to t_min
        }
        ep.iterations = k + 1;
        if (zs.size() < 2) continue;
        const double delta = std::abs(zs.back() - zs[zs.size() - 2]);
        ep.last_delta = delta;
        calm = delta < tol ? calm + 1 : 0;
        if (calm >= 3) {
            ep.stabilized = true;
            break;
        }
    }
    if (zs.empty()) throw Error("no_samples", "no ray point could be traced near t_min");
    ep.z = zs.back();
    if (zs.size() >= 3) {
        // Aitken step on the last three values when they converge geometrically
        const cplx d1 = zs[zs.size() - 2] - zs[zs.size() - 3];
        const cplx d2 = zs.back() - zs[zs.size() - 2];
        const cplx dd = d2 - d1;
        if (std::abs(dd) > 0 && std::abs(d2) < 0.9 * std::abs(d1)) {
            const cplx corr = d2 * d2 / dd;
            if (std::abs(corr) <= 10.0 * std::abs(d2)) ep.z -= corr;
        }
    }
    return ep;
}

} // namespace cosrays
