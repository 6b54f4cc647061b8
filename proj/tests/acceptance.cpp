// One line per acceptance criterion; exit status 1 if any line fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "cosrays/cli.hpp"
#include "cosrays/coshcomb.hpp"

using namespace cosrays;

namespace {

constexpr double pi = std::numbers::pi;

// tolerances, all fixed here
constexpr double kSkeletonTol = 1e-6;
constexpr double kAgreeTol = 1e-6;
constexpr double kApartTol = 1e-3;
constexpr double kOffMargin = 0.05;   // potential gap between the overlap interval and "off" samples
// interval ends against the claimed segment ends; for cosh2 the lower end is a critical
// point mapped onto a critical point, so one ulp of potential moves the split by ~ulp^(1/4)
constexpr double kSegmentTol = 5e-3;
constexpr double kOnAxisTol = 1e-6;
constexpr double kEndpointTol = 1e-9;
constexpr double kEndpointApart = 1e-3;
constexpr double kOrbitBound = 1e3;
constexpr int kInsidePoints = 20;
constexpr int kOffPoints = 20;
constexpr int kScanPoints = 120;
constexpr double kScanWidth = 2.0;
constexpr double kScanStart = 0.05;   // above t_min; closer starts need deeper pullbacks

const char* const kDisjointMap = "a=0.5,b=0.5"; // cosh itself, rescaled to disjoint type

struct Line {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

Line from_suite(const std::string& name, const char* map) {
    const auto r = cli::run_suite(name, parse_map_spec(map));
    std::string d = std::to_string(r.checked) + " checks, " + std::to_string(r.violations) + " violations";
    if (r.worst > 0) d += ", worst ratio " + fmt("%.3g", r.worst);
    if (!r.note.empty()) d += " (" + r.note + ")";
    return {r.passed(), d};
}

// ---- 6 -----------------------------------------------------------------------

Line skeleton() {
    const Family F = family(MapKind::Cosh);
    std::size_t bad = 0, n = 0;
    double worst = 0, first_ok = 0;
    for (const char* a : {"|0R,+", "|0R,-", "1L|0R,+", "1L|0R,-"}) {
        const SignedAddress sa = parse_signed(a);
        const double target = sa.addr.symbol_at(0).side == Side::L ? 2 * pi : 0.0;
        for (int i = 0; i <= 450; ++i) {
            const double t = 0.5 + 0.01 * i;
            const cplx z = trace_family_point(F, sa, t).z;
            ++n;
            const double dev = std::abs(z.imag() - target);
            const bool ok = dev <= kSkeletonTol && (target == 0.0 || z.real() < 0);
            if (!ok) {
                ++bad;
                worst = std::max(worst, dev);
                first_ok = std::max(first_ok, t + 0.01);
            }
        }
    }
    std::string d = std::to_string(n) + " samples, " + std::to_string(bad) + " off the line";
    if (bad) d += ", all below t = " + fmt("%.2f", first_ok) + ", max |Im - line| " + fmt("%.3g", worst);
    return {bad == 0, d};
}

// ---- 7 -----------------------------------------------------------------------

struct Instance {
    SignedAddress a, b;
    OverlapDescriptor d;
};

std::vector<Instance> vertical_instances(MapKind kind) {
    std::vector<Instance> v;
    const ExternalAddress& t0 = upper_boundary_tail();
    const ExternalAddress& t1 = lower_boundary_tail();
    for (long K = -2; K <= 2; ++K)
        for (Sign s : {Sign::Plus, Sign::Minus}) {
            std::vector<std::pair<SignedAddress, SignedAddress>> pairs{
                {{prepend({K, Side::L}, t0), flip(s)}, {prepend({K, Side::R}, t0), s}}};
            if (kind == MapKind::Cosh)
                pairs.push_back({{prepend({K, Side::L}, t1), flip(s)}, {prepend({K + 1, Side::R}, t1), s}});
            for (const auto& [a, b] : pairs) v.push_back({a, b, overlap(kind, a, b)});
        }
    return v;
}

struct Found {
    bool ok = false;
    double lo = 0, hi = 0;
    std::string why;
};

double gap(const Family& F, const Instance& in, double t) {
    const double tb = corresponding_potential(in.d, in.a, in.b, t);
    if (tb < t_min(in.b.addr)) return INFINITY;
    return std::abs(trace_family_point(F, in.a, t).z - trace_family_point(F, in.b, tb).z);
}

// potential interval on ray a where a and b agree, by scan and bisection
Found locate(const Family& F, const Instance& in) {
    const double t0 = std::max(t_min(in.a.addr), 0.0) + kScanStart;
    auto at = [&](int i) { return t0 + kScanWidth * i / kScanPoints; };
    int first = -1, last = -1;
    for (int i = 0; i <= kScanPoints; ++i)
        if (gap(F, in, at(i)) < kAgreeTol) {
            if (first < 0) first = i;
            else if (last < i - 1) return {false, 0, 0, "agreement set is not an interval"};
            last = i;
        }
    if (first < 0) return {false, 0, 0, "no agreement found"};
    auto edge = [&](double in_t, double out_t) {
        for (int k = 0; k < 50; ++k) {
            const double mid = 0.5 * (in_t + out_t);
            (gap(F, in, mid) < kAgreeTol ? in_t : out_t) = mid;
        }
        return in_t;
    };
    Found f{true};
    f.lo = first == 0 ? at(0) : edge(at(first), at(first - 1));
    f.hi = last == kScanPoints ? at(last) : edge(at(last), at(last + 1));
    return f;
}

struct Tally {
    std::size_t instances = 0, failed = 0;
    std::string first_failure;
    void fail(const Instance& in, const std::string& why) {
        ++failed;
        if (first_failure.empty()) first_failure = format_signed(in.a) + " vs " + format_signed(in.b) + ": " + why;
    }
};

// agreement inside, separation outside, geometry of the agreement set
void check_instance(const Family& F, const Instance& in, const Found& f, Tally& tally,
                    const std::function<bool(cplx)>& on_claimed_set) {
    ++tally.instances;
    if (!f.ok) return tally.fail(in, f.why);
    for (int i = 0; i < kInsidePoints; ++i) {
        const double t = f.lo + (f.hi - f.lo) * (i + 0.5) / kInsidePoints;
        if (!(gap(F, in, t) <= kAgreeTol)) return tally.fail(in, "apart inside at t=" + fmt("%.6g", t));
        if (!on_claimed_set(trace_family_point(F, in.a, t).z))
            return tally.fail(in, "off the claimed set at t=" + fmt("%.6g", t));
    }
    const double t0 = std::max(t_min(in.a.addr), 0.0) + kScanStart;
    int off = 0;
    for (int i = 0; off < kOffPoints && i < 200; ++i) {
        const double t = t0 + 0.02 * (i * 37 % 200); // spread over [t0, t0 + 4)
        if (t > f.lo - kOffMargin && t < f.hi + kOffMargin) continue;
        ++off;
        if (!(gap(F, in, t) > kApartTol)) return tally.fail(in, "together outside at t=" + fmt("%.6g", t));
    }
    if (off < kOffPoints) return tally.fail(in, "too few off-set samples");
}

Line overlap_tables() {
    Tally tally;
    for (MapKind kind : {MapKind::Cosh, MapKind::Cosh2}) {
        const Family F = family(kind);
        for (const Instance& v : vertical_instances(kind)) {
            if (v.d.kind != OverlapKind::VerticalSegment) {
                ++tally.instances;
                tally.fail(v, "table pair not classified as a vertical segment");
                continue;
            }
            const Found f = locate(F, v);
            const auto [s0, s1] = vertical_segment(v.d.K, v.d.sign);
            const double ylo = std::min(s0.imag(), s1.imag()), yhi = std::max(s0.imag(), s1.imag());
            auto on_segment = [&](cplx z) {
                return std::abs(z.real()) <= kOnAxisTol && z.imag() >= ylo - kOnAxisTol && z.imag() <= yhi + kOnAxisTol;
            };
            check_instance(F, v, f, tally, on_segment);
            if (!f.ok) continue;
            // the interval ends sit on the segment ends
            const cplx e1 = trace_family_point(F, v.a, f.lo).z, e2 = trace_family_point(F, v.a, f.hi).z;
            const bool covers = (std::abs(e1 - s0) < kSegmentTol && std::abs(e2 - s1) < kSegmentTol) ||
                                (std::abs(e1 - s1) < kSegmentTol && std::abs(e2 - s0) < kSegmentTol);
            if (!covers) tally.fail(v, "agreement does not span the segment");

            // preimage arcs over segments on the positive real axis of the image
            const bool positive = v.d.K >= 1 || (v.d.K == 0 && v.d.sign == Sign::Plus);
            if (!positive) continue;
            for (long P = -2; P <= 2; ++P)
                for (int side = 0; side < 2; ++side) {
                    Instance in;
                    if (side == 0) {
                        in.a = {prepend({P + 1, Side::R}, v.a.addr), v.a.sign};
                        in.b = {prepend({P, Side::R}, v.b.addr), v.b.sign};
                    } else {
                        in.a = {prepend({P, Side::L}, v.a.addr), v.a.sign};
                        in.b = {prepend({P + 1, Side::L}, v.b.addr), v.b.sign};
                    }
                    in.d = overlap(kind, in.a, in.b);
                    if (in.d.kind != OverlapKind::PreimageArc) {
                        ++tally.instances;
                        tally.fail(in, "table pair not classified as a preimage arc");
                        continue;
                    }
                    // the arc maps onto the segment, so its potentials pull back exactly
                    const Symbol next = v.a.addr.symbol_at(0);
                    const Found g{true, invert_t(f.lo, next), invert_t(f.hi, next)};
                    auto onto_segment = [&](cplx z) { return on_segment(F.f(z)); };
                    check_instance(F, in, g, tally, onto_segment);
                }
        }
    }
    std::string d = std::to_string(tally.instances) + " instances, " + std::to_string(tally.failed) + " failed";
    if (!tally.first_failure.empty()) d += "; first: " + tally.first_failure;
    return {tally.failed == 0, d};
}

// ---- 8, 9 --------------------------------------------------------------------

Line no_common_landing() {
    std::size_t pairs = 0, bad = 0, unstable = 0;
    double closest = INFINITY;
    const std::vector<const char*> rays{"|0R,+", "|0R,-", "0L|0R,+", "1R|0R,-", "|1R,+"};
    for (const char* map : {"cosh", "cosh2"}) {
        const MapSpec spec = parse_map_spec(map);
        std::vector<cplx> ends;
        for (const char* r : rays) {
            const Endpoint e = endpoint_estimate(spec, parse_signed(r), kEndpointTol);
            if (!e.stabilized) ++unstable;
            ends.push_back(e.z);
        }
        for (std::size_t i = 0; i < ends.size(); ++i)
            for (std::size_t j = i + 1; j < ends.size(); ++j) {
                ++pairs;
                const double dz = std::abs(ends[i] - ends[j]);
                closest = std::min(closest, dz);
                if (!(dz > kEndpointApart)) ++bad;
            }
    }
    // itinerary distinctness over the canonical family
    std::size_t itin_checked = 0, itin_bad = 0;
    for (const char* map : {"cosh", "cosh2"}) {
        const auto r = cli::run_suite("itinerary", parse_map_spec(map));
        itin_checked += r.checked;
        itin_bad += r.violations;
    }
    // lands_together on every distinct pair of a smaller family
    std::vector<SignedAddress> fam;
    for (long n = -2; n <= 2; ++n)
        for (Side s : {Side::L, Side::R})
            for (long m = -2; m <= 2; ++m)
                for (Side u : {Side::L, Side::R})
                    for (Sign g : {Sign::Plus, Sign::Minus}) {
                        fam.push_back({ExternalAddress({}, {{n, s}, {m, u}}), g});
                        if (m == 0 && u == Side::R) fam.push_back({ExternalAddress({{n, s}}, {{m, u}}), g});
                    }
    std::size_t lt_checked = 0, lt_bad = 0;
    for (MapKind kind : {MapKind::Cosh, MapKind::Cosh2})
        for (std::size_t i = 0; i < fam.size(); ++i)
            for (std::size_t j = i + 1; j < fam.size(); ++j) {
                if (overlap(kind, fam[i], fam[j]).kind == OverlapKind::SameRay) continue;
                ++lt_checked;
                if (lands_together(kind, fam[i], fam[j])) ++lt_bad;
            }
    const bool pass = bad == 0 && unstable == 0 && itin_bad == 0 && lt_bad == 0;
    std::string d = std::to_string(pairs) + " endpoint pairs (closest " + fmt("%.3g", closest) + ", " +
                    std::to_string(unstable) + " unstable); " + std::to_string(itin_checked) + " itineraries, " +
                    std::to_string(itin_bad) + " clashes; " + std::to_string(lt_checked) + " lands_together pairs, " +
                    std::to_string(lt_bad) + " true";
    return {pass, d};
}

Line bounded_orbits() {
    const MapSpec spec = parse_map_spec("cosh");
    const Family F = family(MapKind::Cosh);
    std::size_t n = 0, bad = 0;
    double worst = 0;
    for (const char* w : {"", "0L ", "1R ", "-1R ", "1L "})
        for (const char* s : {",+", ",-"}) {
            const std::string text = std::string(w) + "|0R" + s;
            const Endpoint e = endpoint_estimate(spec, parse_signed(text), kEndpointTol);
            ++n;
            cplx z = e.z;
            double m = std::abs(z);
            for (int k = 0; k < 20 && std::isfinite(m); ++k) {
                z = F.f(z);
                m = std::max(m, std::abs(z));
            }
            worst = std::max(worst, m);
            if (!e.stabilized || !(m < kOrbitBound)) ++bad;
        }
    return {bad == 0, std::to_string(n) + " endpoints, largest orbit modulus " + fmt("%.4g", worst)};
}

// ---- 11 ----------------------------------------------------------------------

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Line determinism() {
    const std::string dir = COSRAYS_GOLDEN_DIR;
    const std::vector<std::pair<std::vector<std::string>, std::string>> cases{
        {{"trace", "--map", "cosh", "--address", "|0R,+", "--t", "0.5:5", "--samples", "200", "--format", "csv"},
         "ray.csv"},
        {{"plot", "--map", "cosh", "--address", "|0R,+", "--address", "0L|0R,-", "--address", "1R|0R,+", "--t",
          "0.6:4", "--samples", "60", "--partition"},
         "plot.svg"}};
    std::size_t runs = 0, mismatches = 0;
    for (const auto& [args, file] : cases) {
        const std::string want = slurp(dir + "/" + file);
        for (int rep = 0; rep < 2; ++rep)
            for (const char* jobs : {"1", "4"}) {
                auto a = args;
                a.push_back("--jobs");
                a.push_back(jobs);
                std::ostringstream out, err;
                ++runs;
                if (cli::run(a, out, err) != 0 || out.str() != want || want.empty()) ++mismatches;
            }
    }
    return {mismatches == 0, std::to_string(runs) + " runs, " + std::to_string(mismatches) + " differ from the golden files"};
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Line()>>> criteria{
        {"contraction", [] { return from_suite("contraction", kDisjointMap); }},
        {"conjugacy", [] { return from_suite("conjugacy", kDisjointMap); }},
        {"sandwich", [] { return from_suite("sandwich", kDisjointMap); }},
        {"inverse branches", [] { return from_suite("branches", kDisjointMap); }},
        {"address recovery", [] { return from_suite("recovery", kDisjointMap); }},
        {"cosh skeleton", skeleton},
        {"overlap tables", overlap_tables},
        {"no common landing", no_common_landing},
        {"bounded orbits", bounded_orbits},
        {"order", [] { return from_suite("order", "cosh"); }},
        {"determinism", determinism},
    };
    int failed = 0, idx = 0;
    for (const auto& [name, run] : criteria) {
        ++idx;
        const auto start = std::chrono::steady_clock::now();
        Line l;
        try {
            l = run();
        } catch (const std::exception& e) {
            l = {false, std::string("exception: ") + e.what()};
        }
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s %2d %-18s %s [%.1fs]\n", l.pass ? "PASS" : "FAIL", idx, name.c_str(), l.detail.c_str(), s);
        std::fflush(stdout);
        if (!l.pass) ++failed;
    }
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return failed ? 1 : 0;
}
