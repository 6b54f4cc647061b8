#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cosrays/raytrace.hpp"

namespace cosrays::cli {

// Exit codes: 0 ok, 1 domain error (JSON on err), 2 usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct SvgOptions {
    bool partition = false;
    std::optional<MapKind> kind; // strip height for the overlay; custom maps get Im = (2n+1) pi
};

// Throws Error("empty_input") when no polyline has a sample.
std::string emit_svg(const std::vector<RayPolyline>& polylines, const SvgOptions& opt);

std::string to_csv(const RayPolyline& poly);

struct SuiteReport {
    std::string name;
    std::size_t checked = 0;
    std::size_t violations = 0;
    double worst = 0; // largest ratio measured / allowed
    std::string note;
    bool passed() const { return checked > 0 && violations == 0; }
};

const std::vector<std::string>& suite_names();
SuiteReport run_suite(const std::string& name, const MapSpec& spec, std::uint64_t seed = 1);

// Random canonical address: indices |n| <= max_index, preperiod <= max_pre, period 1..max_per.
ExternalAddress random_address(std::mt19937_64& rng, long max_index, std::size_t max_pre, std::size_t max_per);

} // namespace cosrays::cli
