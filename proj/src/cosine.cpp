#include "cosrays/cosine.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cosrays/error.hpp"

namespace cosrays {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double two_pi = 2.0 * pi;
constexpr double kRefX = 40.0;      // reference abscissa pinning branch index 0
constexpr double kProxyLog = 27.631021115928547; // ln 1e12
constexpr double kBoundaryTol = 1e-9;

double cut_angle(const Cut& c, cplx w) {
    double th = std::arg(w - c.base);
    if (c.dir > 0) {
        if (th > pi / 2) th -= two_pi;
    } else {
        if (th <= -pi / 2) th += two_pi;
    }
    return th;
}

double nearest_rep(double angle, double target) {
    return angle + two_pi * std::round((target - angle) / two_pi);
}

// continuous argument of the large root, zero at g(kRefX)
struct Frame {
    Cut cut;
    double phi_ref;
    double m_L; // 2 pi multiple fixing the L branch at g(-kRefX)
};

double theta_of(const CosineMap& m, const Frame& f, cplx w, cplx u_large) {
    return nearest_rep(std::arg(u_large), cut_angle(f.cut, w) - f.phi_ref);
}

Frame frame_of(const CosineMap& m) {
    Frame f{cut_of(m), 0.0, 0.0};
    const cplx wr = eval_unchecked(m, cplx(kRefX, 0.0));
    f.phi_ref = cut_angle(f.cut, wr);
    const cplx wl = eval_unchecked(m, cplx(-kRefX, 0.0));
    const double th = theta_of(m, f, wl, roots(m, wl).first);
    f.m_L = std::round((th - std::arg(m.b / m.a)) / two_pi);
    return f;
}

} // namespace

CosineMap make_map(cplx a, cplx b) {
    if (a == cplx(0) || b == cplx(0)) throw Error("bad_map", "cosine map needs a*b != 0");
    return CosineMap{a, b, std::nullopt};
}

CosineMap cosh_map() { return CosineMap{0.5, 0.5, Cut{0.0, 1.0}}; }

cplx eval_unchecked(const CosineMap& m, cplx z) { return m.a * std::exp(z) + m.b * std::exp(-z); }

cplx eval(const CosineMap& m, cplx z) {
    if (std::abs(z.real()) > 700.0) throw Error("overflow", "real part too large to evaluate", "Re z = " + std::to_string(z.real()));
    return eval_unchecked(m, z);
}

cplx derivative(const CosineMap& m, cplx z) { return m.a * std::exp(z) - m.b * std::exp(-z); }

SingularData singular_data(const CosineMap& m) {
    // g' = 0  <=>  e^{2z} = b/a ; principal Log keeps |Im| <= pi/2
    const cplx c = 0.5 * std::log(m.b / m.a);
    return SingularData{eval_unchecked(m, c), eval_unchecked(m, c + cplx(0, pi)), c};
}

std::array<cplx, 2> critical_values(const CosineMap& m) {
    auto sd = singular_data(m);
    return {sd.v1, sd.v2};
}

Cut cut_of(const CosineMap& m) {
    if (m.cut) return *m.cut;
    auto sd = singular_data(m);
    const double d = sd.v1.imag() - sd.v2.imag();
    if (std::abs(d) <= 1e-12 * (1.0 + std::abs(sd.v1))) {
        // real ab: upward from the value with the larger real part
        return Cut{sd.v1.real() >= sd.v2.real() ? sd.v1 : sd.v2, 1.0};
    }
    return d > 0 ? Cut{sd.v1, 1.0} : Cut{sd.v2, -1.0};
}

double dist_to_cut(const CosineMap& m, cplx w) {
    const Cut c = cut_of(m);
    const double along = (w.imag() - c.base.imag()) * c.dir;
    if (along <= 0) return std::abs(w - c.base);
    return std::abs(w.real() - c.base.real());
}

std::array<double, 6> k_terms(const CosineMap& m) {
    const double aa = std::abs(m.a), bb = std::abs(m.b);
    return {(std::sqrt(2 * bb / aa) + std::sqrt(2 * aa / bb)) * (aa + bb),
            8 * aa * bb,
            1.0,
            0.5 * std::log(2 * bb / aa),
            0.5 * std::log(2 * aa / bb),
            std::log(16.0 / (aa * bb))};
}

double k_constant(const CosineMap& m) {
    auto t = k_terms(m);
    return *std::max_element(t.begin(), t.end());
}

std::pair<cplx, cplx> roots(const CosineMap& m, cplx w) {
    cplx s = std::sqrt(w * w - 4.0 * m.a * m.b);
    if (std::abs(w + s) < std::abs(w - s)) s = -s;
    const cplx big = (w + s) / (2.0 * m.a);
    return {big, m.b / (m.a * big)};
}

cplx branch(const CosineMap& m, Symbol s, cplx w) {
    const Frame f = frame_of(m);
    auto [ul, us] = roots(m, w);
    const double th = theta_of(m, f, w, ul);
    double im;
    double re;
    if (s.side == Side::R) {
        re = std::log(std::abs(ul));
        im = th;
    } else {
        re = std::log(std::abs(us));
        im = std::arg(m.b / m.a) - th + two_pi * f.m_L;
    }
    return cplx(re, im + two_pi * static_cast<double>(s.n));
}

cplx branch_log(const CosineMap& m, Symbol s, double log_abs, double arg) {
    if (log_abs < 300.0) return branch(m, s, std::polar(std::exp(log_abs), arg));
    const cplx zp = branch(m, s, std::polar(std::exp(kProxyLog), arg));
    const double shift = log_abs - kProxyLog;
    return s.side == Side::R ? zp + shift : zp - shift;
}

Side side_of(const CosineMap& m, cplx z) {
    return z.real() > 0.5 * std::log(std::abs(m.b / m.a)) ? Side::R : Side::L;
}

Symbol domain_of(const CosineMap& m, cplx z) {
    const Side side = side_of(m, z);
    const cplx w = eval(m, z);
    if (dist_to_cut(m, w) < kBoundaryTol)
        throw Error("boundary", "point lies on the preimage of the cut", "z = " + std::to_string(z.real()) + "," + std::to_string(z.imag()));
    const cplx z0 = branch(m, Symbol{0, side}, w);
    const double k = std::round((z.imag() - z0.imag()) / two_pi);
    const cplx zk = z0 + cplx(0, two_pi * k);
    if (std::abs(zk - z) > 1e-7 * (1.0 + std::abs(z)))
        throw Error("boundary", "point does not match a fundamental domain of its side");
    return Symbol{static_cast<long>(k), side};
}

// ---- normalized maps ---------------------------------------------------------

double constant_A(const NormalizedMap& nm) {
    constexpr int N = 8;
    constexpr int samples = 64;
    double A = nm.K + 1.0;
    for (int round = 0; round <= 20; ++round, A *= 2.0) {
        bool ok = true;
        for (int n = -N; n <= N && ok; ++n) {
            for (int side = 0; side < 2 && ok; ++side) {
                const double sgn = side ? 1.0 : -1.0;
                for (int i = 0; i < samples && ok; ++i) {
                    const double x = A + 50.0 * i / (samples - 1);
                    if (x > 650.0) break;
                    const cplx z(sgn * x, two_pi * n);
                    const cplx w = eval(nm.base, z);
                    if (std::abs(w) <= nm.R_tract || dist_to_cut(nm.base, w) < kBoundaryTol) {
                        ok = false;
                        break;
                    }
                    try {
                        const Symbol s = domain_of(nm.base, z);
                        ok = s == Symbol{n, side ? Side::R : Side::L};
                    } catch (const Error&) {
                        ok = false;
                    }
                }
            }
        }
        if (ok) return A;
    }
    throw Error("a_search", "no half-line constant found within 20 doublings");
}

NormalizedMap disjoint_type_scale(const CosineMap& m) {
    const double Kf = k_constant(m);
    // 2 pi i translates of D_R cover |Re z| <= Kf
    const double R = std::sqrt(Kf * Kf + pi * pi) + 1e-6;
    const double lam = 0.999 * Kf / ((std::abs(m.a) + std::abs(m.b)) * std::exp(R));
    NormalizedMap nm;
    nm.lambda = lam;
    nm.base = CosineMap{lam * m.a, lam * m.b, std::nullopt};
    nm.K = k_constant(nm.base);
    nm.K_source = Kf;
    nm.R_tract = R;

    // tracts avoid the strip |Re z| <= K_source: the strip maps into D_R
    for (int i = 0; i < 1000; ++i) {
        const double y = two_pi * i / 1000.0;
        for (double x : {-Kf, -0.5 * Kf, 0.0, 0.5 * Kf, Kf}) {
            if (std::abs(eval(nm.base, cplx(x, y))) >= R)
                throw Error("verification", "tract meets the strip |Re z| <= K");
        }
    }
    // critical values inside D_R
    for (cplx v : critical_values(nm.base))
        if (std::abs(v) >= R) throw Error("verification", "critical value outside the removed disk");
    // expansion on |Re z| > K
    for (int i = 0; i < 200; ++i) {
        const double y = two_pi * i / 200.0;
        for (double x : {nm.K, nm.K + 1.0, nm.K + 10.0}) {
            if (std::abs(derivative(nm.base, cplx(x, y))) <= 2.0 || std::abs(derivative(nm.base, cplx(-x, y))) <= 2.0)
                throw Error("verification", "|g'| <= 2 beyond K");
        }
    }
    nm.A = constant_A(nm);
    return nm;
}

Symbol fundamental_domain_of(const NormalizedMap& nm, cplx z) {
    const cplx w = eval(nm.base, z);
    if (std::abs(w) <= nm.R_tract)
        throw Error("outside_tract", "point is not in the tracts", "|g(z)| = " + std::to_string(std::abs(w)));
    const Symbol s = domain_of(nm.base, z);
    if (std::abs(z.imag() - two_pi * s.n) >= 3 * pi)
        throw Error("boundary", "index outside the 3 pi band");
    return s;
}

cplx inverse_branch(const NormalizedMap& nm, Symbol s, cplx w) {
    if (std::abs(w) <= nm.R_tract) throw Error("domain", "w lies in the removed disk");
    if (dist_to_cut(nm.base, w) < kBoundaryTol) throw Error("domain", "w lies on the cut");
    const cplx z = branch(nm.base, s, w);
    if (std::abs(eval(nm.base, z) - w) > 1e-10 * (1.0 + std::abs(w)))
        throw Error("branch", "inverse branch failed its round trip");
    return z;
}

cplx branch_residual(const CosineMap& m, Symbol s, cplx w, cplx z) {
    const cplx lw = std::log(w);
    cplx r = s.side == Side::R ? z - (lw - std::log(m.a)) : z - (-lw + std::log(m.b));
    r -= cplx(0, two_pi * static_cast<double>(s.n));
    return cplx(r.real(), r.imag() - two_pi * std::round(r.imag() / two_pi));
}

std::vector<Symbol> address_of(const NormalizedMap& nm, cplx z, std::size_t depth, double z_err) {
    std::vector<Symbol> out;
    double err = std::max(z_err, 1e-16 * std::abs(z));
    for (std::size_t i = 0; i < depth; ++i) {
        const std::string at = "iterate " + std::to_string(i);
        if (err > 1e-3)
            throw Error("precision_exhausted", "forward orbit error bound exceeds the classification margin", at);
        if (std::abs(z.real()) > 700.0)
            throw Error("orbit_escape", "orbit leaves double range before the requested depth", at);
        try {
            out.push_back(fundamental_domain_of(nm, z));
        } catch (const Error& e) {
            throw Error(e.code(), e.what(), at);
        }
        const cplx w = eval(nm.base, z);
        err = std::abs(derivative(nm.base, z)) * err + 1e-16 * std::abs(w) * (1.0 + std::abs(z));
        z = w;
    }
    return out;
}

} // namespace cosrays
