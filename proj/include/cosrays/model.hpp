#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include <json.hpp>

#include "cosrays/address.hpp"

namespace cosrays {

struct ModelPoint {
    double t = 0.0;
    ExternalAddress addr{{}, {Symbol{}}};
};

struct SignedModelPoint {
    ModelPoint point;
    Sign sign = Sign::Plus;
};

struct OutOfSpace {
    double deficit; // the negative first coordinate
};

using StepResult = std::variant<ModelPoint, OutOfSpace>;
using SignedStepResult = std::variant<SignedModelPoint, OutOfSpace>;

// e^t - 1 - 2pi|s1|
double next_potential(double t, Symbol s1);

StepResult step(const ModelPoint& x);
SignedStepResult step_signed(const SignedModelPoint& x);

double invert_t(double T_next, Symbol s1);

double t_min(const ExternalAddress& s, double tol = 1e-12);

// Smallest t with every later potential >= floor (floor >= 0 gives t_min).
double t_floor(const ExternalAddress& s, double floor, double tol = 1e-12);

struct Member {};
struct NonMember {
    std::size_t step;
};
struct Undecided {};
using Membership = std::variant<Member, NonMember, Undecided>;

Membership in_JF(const ModelPoint& x, std::size_t horizon);

std::vector<ModelPoint> orbit(const ModelPoint& x, std::size_t n);

// Potentials T_0..T_n along the orbit, stopping early once one exceeds cap.
std::vector<double> potentials(const ModelPoint& x, std::size_t n, double cap);

void to_json(nlohmann::json& j, const ModelPoint& x);
void from_json(const nlohmann::json& j, ModelPoint& x);

} // namespace cosrays
